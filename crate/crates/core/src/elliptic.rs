//! Weierstrass sigma and zeta functions on an arbitrary lattice
//! Λ = ℤω₁ + ℤω₂, via Jacobi theta series with argument reduction.
//!
//! With τ = ω₂/ω₁ and nome q = exp(iπτ),
//!
//!   σ(z) = (ω₁/π) · exp(η₁ z²/ω₁) · θ₁(πz/ω₁, q) / θ₁′(0, q),
//!   ζ(z) = 2η₁ z/ω₁ + (π/ω₁) · θ₁′(v, q)/θ₁(v, q),   v = πz/ω₁,
//!
//! where η₁ = ζ(ω₁/2) = −π²θ₁‴(0)/(6 ω₁ θ₁′(0)). Arguments are first
//! reduced to the fundamental cell and the quasi-periodicity factors
//!
//!   σ(z + pω₁ + qω₂) = (−1)^{p+q+pq} e^{2η_Ω(z + Ω/2)} σ(z),
//!   ζ(z + Ω) = ζ(z) + 2η_Ω,       η_Ω = p η₁ + q η₂,
//!
//! are applied, so the series only ever sees arguments where it converges
//! geometrically. η₂ follows from the Legendre relation
//! η₁ω₂ − η₂ω₁ = πi.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{CoreError, Result};
use crate::lattice::LatticeSpec;

const MAX_THETA_TERMS: usize = 64;

/// Precomputed lattice constants for sigma/zeta evaluation. Construct once
/// per lattice and reuse: grid evaluations call into it in tight loops.
#[derive(Debug, Clone)]
pub struct EllipticCtx {
    omega1: Complex64,
    omega2: Complex64,
    /// Cached nome powers q^{(n+1/2)²} with alternating sign folded in.
    signed_qpows: Vec<Complex64>,
    theta1p0: Complex64,
    /// η₁ = ζ(ω₁/2)
    pub eta1: Complex64,
    /// η₂ = ζ(ω₂/2)
    pub eta2: Complex64,
    lattice: LatticeSpec,
}

impl EllipticCtx {
    pub fn new(lattice: &LatticeSpec) -> Self {
        let omega1 = lattice.omega1;
        let omega2 = lattice.omega2;
        let tau = omega2 / omega1;
        let lq = Complex64::new(0.0, PI) * tau; // log q
        let mut signed_qpows = Vec::new();
        for n in 0..MAX_THETA_TERMS {
            let m = (2 * n + 1) as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let qpow = (lq * (m * m / 4.0)).exp() * sign;
            let small = qpow.norm() < 1e-22;
            signed_qpows.push(qpow);
            if n > 2 && small {
                break;
            }
        }
        // θ₁′(0) = 2 Σ (−1)ⁿ (2n+1) q^{(n+1/2)²},  θ₁‴(0) = −2 Σ (−1)ⁿ (2n+1)³ (...).
        let mut tp0 = Complex64::new(0.0, 0.0);
        let mut tp3 = Complex64::new(0.0, 0.0);
        for (n, qp) in signed_qpows.iter().enumerate() {
            let m = (2 * n + 1) as f64;
            tp0 += qp * m;
            tp3 -= qp * (m * m * m);
        }
        let theta1p0 = tp0 * 2.0;
        let theta1ppp0 = tp3 * 2.0;
        let eta1 = -(PI * PI) * theta1ppp0 / (omega1 * 6.0 * theta1p0);
        let eta2 = (eta1 * omega2 - Complex64::new(0.0, PI)) / omega1;
        Self {
            omega1,
            omega2,
            signed_qpows,
            theta1p0,
            eta1,
            eta2,
            lattice: *lattice,
        }
    }

    /// θ₁(v) and θ₁′(v) by the cached series; sin/cos of (2n+1)v are built
    /// from one complex exponential and a power recursion.
    fn theta1_pair(&self, v: Complex64) -> (Complex64, Complex64) {
        let w = (Complex64::new(0.0, 1.0) * v).exp();
        let winv = 1.0 / w;
        let w2 = w * w;
        let w2inv = winv * winv;
        let mut wp = w; // w^{2n+1}
        let mut wm = winv; // w^{-(2n+1)}
        let half_i = Complex64::new(0.0, -0.5); // 1/(2i)
        let mut t = Complex64::new(0.0, 0.0);
        let mut tp = Complex64::new(0.0, 0.0);
        for (n, qp) in self.signed_qpows.iter().enumerate() {
            let m = (2 * n + 1) as f64;
            let sin = (wp - wm) * half_i;
            let cos = (wp + wm) * 0.5;
            t += qp * sin;
            tp += qp * cos * m;
            wp *= w2;
            wm *= w2inv;
        }
        (t * 2.0, tp * 2.0)
    }

    /// σ and σ′ at a point already inside the fundamental cell.
    fn sigma_reduced(&self, z: Complex64) -> (Complex64, Complex64) {
        let v = PI * z / self.omega1;
        let (t, tp) = self.theta1_pair(v);
        let gauss = (self.eta1 * z * z / self.omega1).exp();
        let c = self.omega1 / PI;
        let sigma = c * gauss * t / self.theta1p0;
        // σ′ = σ·(2η₁z/ω₁) + e^{η₁z²/ω₁}·θ₁′(v)/θ₁′(0)
        let sigma_p = sigma * (self.eta1 * z * 2.0 / self.omega1) + gauss * tp / self.theta1p0;
        (sigma, sigma_p)
    }

    /// Weierstrass σ(z) and σ′(z) with argument reduction.
    pub fn sigma_and_prime(&self, z: Complex64) -> (Complex64, Complex64) {
        let (zr, p, q) = self.lattice.reduce(z);
        let (s, sp) = self.sigma_reduced(zr);
        if p == 0 && q == 0 {
            return (s, sp);
        }
        let eta = self.eta1 * p as f64 + self.eta2 * q as f64;
        let omega = self.omega1 * p as f64 + self.omega2 * q as f64;
        let parity = p + q + p * q;
        let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
        let chi = (eta * 2.0 * (zr + omega * 0.5)).exp() * sign;
        (chi * s, chi * (sp + s * eta * 2.0))
    }

    pub fn sigma(&self, z: Complex64) -> Complex64 {
        self.sigma_and_prime(z).0
    }

    /// Weierstrass ζ(z) = σ′(z)/σ(z); fails within 1e-10 of a lattice point.
    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        if self.lattice.dist_to_lattice(z) < 1e-10 {
            return Err(CoreError::PoleAtLatticePoint);
        }
        let (zr, p, q) = self.lattice.reduce(z);
        let (s, sp) = self.sigma_reduced(zr);
        let eta = self.eta1 * p as f64 + self.eta2 * q as f64;
        Ok(sp / s + eta * 2.0)
    }
}

/// Weierstrass sigma function for the lattice of `lattice`.
pub fn sigma(z: Complex64, lattice: &LatticeSpec) -> Complex64 {
    EllipticCtx::new(lattice).sigma(z)
}

/// Weierstrass zeta function σ′/σ.
pub fn zeta_w(z: Complex64, lattice: &LatticeSpec) -> Result<Complex64> {
    EllipticCtx::new(lattice).zeta(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::oracles;

    fn square() -> LatticeSpec {
        LatticeSpec::unit_square(16).unwrap()
    }

    fn oblique() -> LatticeSpec {
        LatticeSpec::new(Complex64::new(1.2, 0.0), Complex64::new(0.3, 0.9), 16).unwrap()
    }

    #[test]
    fn sigma_vanishes_at_lattice_points() {
        let lat = square();
        assert!(sigma(Complex64::new(0.0, 0.0), &lat).norm() < 1e-14);
        for (p, q) in [(1.0, 0.0), (0.0, 1.0), (2.0, -3.0)] {
            let z = lat.omega1 * p + lat.omega2 * q;
            assert!(sigma(z, &lat).norm() < 1e-10, "sigma({z}) != 0");
        }
    }

    #[test]
    fn sigma_is_odd() {
        let lat = square();
        let z = Complex64::new(0.3, 0.2);
        let d = (sigma(-z, &lat) + sigma(z, &lat)).norm();
        assert!(d < 1e-12, "oddness defect {d}");
    }

    #[test]
    fn sigma_leading_term() {
        let lat = square();
        let z = Complex64::new(1e-4, 0.0);
        let r = sigma(z, &lat) / z;
        assert!((r - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn sigma_prime_at_origin_is_one() {
        let ctx = EllipticCtx::new(&oblique());
        let (_, sp) = ctx.sigma_and_prime(Complex64::new(0.0, 0.0));
        assert!((sp - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sigma_matches_product_oracle() {
        // The symmetrically truncated product converges like R⁻² (the odd
        // z³/ω³ tails cancel pairwise), so at R = 80 the oracle itself is
        // good to a few 1e-6 relative.
        for lat in [square(), oblique()] {
            for z in [
                Complex64::new(0.3, 0.2),
                Complex64::new(-0.1, 0.35),
                Complex64::new(0.45, -0.4),
            ] {
                let fast = sigma(z, &lat);
                let slow = oracles::sigma_product(z, &lat, 80.0);
                let rel = (fast - slow).norm() / slow.norm();
                assert!(rel < 2e-5, "sigma({z}) relative error {rel}");
            }
        }
    }

    #[test]
    fn sigma_quasi_periodicity_consistency() {
        // Evaluate far outside the fundamental cell and compare against the
        // value at the reduced point combined with the quasi-period factor
        // built from the independently derived eta constants.
        let lat = oblique();
        let z = Complex64::new(0.31, 0.17);
        let shifted = z + lat.omega1 * 3.0 - lat.omega2 * 2.0;
        let direct = sigma(shifted, &lat);
        let ctx = EllipticCtx::new(&lat);
        let eta = ctx.eta1 * 3.0 + ctx.eta2 * (-2.0);
        let omega = lat.omega1 * 3.0 - lat.omega2 * 2.0;
        let parity: i64 = 3 + (-2) + 3 * (-2);
        let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
        let expected = sigma(z, &lat) * (eta * 2.0 * (z + omega * 0.5)).exp() * sign;
        assert!((direct - expected).norm() / expected.norm() < 1e-9);
    }

    #[test]
    fn zeta_is_odd_and_has_simple_pole() {
        let lat = square();
        let z = Complex64::new(0.27, -0.13);
        let zp = zeta_w(z, &lat).unwrap();
        let zm = zeta_w(-z, &lat).unwrap();
        assert!((zp + zm).norm() < 1e-10);
        // ζ(z) − 1/z stays bounded near 0.
        let small = Complex64::new(1e-3, 0.0);
        let val = zeta_w(small, &lat).unwrap();
        assert!((val - 1.0 / small).norm() < 1.0);
        assert!(zeta_w(Complex64::new(0.0, 0.0), &lat).is_err());
    }

    #[test]
    fn zeta_matches_product_oracle() {
        for lat in [square(), oblique()] {
            let z = Complex64::new(0.21, 0.18);
            let fast = zeta_w(z, &lat).unwrap();
            let slow = oracles::zeta_product(z, &lat, 80.0);
            assert!(
                (fast - slow).norm() < 1e-5 * (1.0 + slow.norm()),
                "zeta mismatch {} vs {}",
                fast,
                slow
            );
        }
    }

    #[test]
    fn zeta_is_log_derivative_of_sigma() {
        let lat = oblique();
        let ctx = EllipticCtx::new(&lat);
        let z = Complex64::new(0.4, 0.22);
        let h = 1e-6;
        let fd = (ctx.sigma(z + Complex64::new(h, 0.0)) - ctx.sigma(z - Complex64::new(h, 0.0)))
            / (2.0 * h * ctx.sigma(z));
        let zv = ctx.zeta(z).unwrap();
        assert!((fd - zv).norm() < 1e-6);
        // σ′ from the same path agrees with the FD of σ.
        let (s, sp) = ctx.sigma_and_prime(z);
        assert!((sp / s - zv).norm() < 1e-10);
    }

    #[test]
    fn legendre_relation() {
        let ctx = EllipticCtx::new(&oblique());
        let lhs = ctx.eta1 * ctx.omega2 - ctx.eta2 * ctx.omega1;
        assert!((lhs - Complex64::new(0.0, PI)).norm() < 1e-12);
    }
}
