//! Cross-module validation suites and the independent slow oracles they
//! check against. The oracles deliberately avoid the production code paths:
//! sigma/zeta come from symmetrically truncated Weierstrass products and the
//! Christoffel check from finite differences of the metric.

pub mod oracles {
    use num_complex::Complex64;

    use crate::lattice::LatticeSpec;

    fn lattice_points_within(lattice: &LatticeSpec, radius: f64) -> Vec<Complex64> {
        // Lower bound |p ω₁ + q ω₂| ≥ σ_min · max(|p|, |q|) via the smallest
        // singular value of the period matrix.
        let a11 = lattice.omega1.re;
        let a21 = lattice.omega1.im;
        let a12 = lattice.omega2.re;
        let a22 = lattice.omega2.im;
        let g11 = a11 * a11 + a21 * a21;
        let g12 = a11 * a12 + a21 * a22;
        let g22 = a12 * a12 + a22 * a22;
        let tr = g11 + g22;
        let det = g11 * g22 - g12 * g12;
        let smin = (0.5 * (tr - (tr * tr - 4.0 * det).sqrt())).sqrt();
        let m = (radius / smin).ceil() as i64 + 1;
        let mut pts = Vec::new();
        for p in -m..=m {
            for q in -m..=m {
                if p == 0 && q == 0 {
                    continue;
                }
                let w = lattice.omega1 * p as f64 + lattice.omega2 * q as f64;
                if w.norm() <= radius {
                    pts.push(w);
                }
            }
        }
        pts
    }

    /// Truncated Weierstrass product
    /// σ(z) ≈ z ∏_{0<|ω|≤R} (1 − z/ω) exp(z/ω + z²/(2ω²)).
    /// Symmetric truncation cancels the odd tails, leaving an O(R⁻²) error.
    pub fn sigma_product(z: Complex64, lattice: &LatticeSpec, radius: f64) -> Complex64 {
        let mut log_sum = Complex64::new(0.0, 0.0);
        for w in lattice_points_within(lattice, radius) {
            let r = z / w;
            log_sum += (Complex64::new(1.0, 0.0) - r).ln() + r + r * r * 0.5;
        }
        z * log_sum.exp()
    }

    /// Truncated partial-fraction expansion
    /// ζ(z) ≈ 1/z + Σ_{0<|ω|≤R} [1/(z−ω) + 1/ω + z/ω²].
    pub fn zeta_product(z: Complex64, lattice: &LatticeSpec, radius: f64) -> Complex64 {
        let mut sum = 1.0 / z;
        for w in lattice_points_within(lattice, radius) {
            sum += 1.0 / (z - w) + 1.0 / w + z / (w * w);
        }
        sum
    }
}
