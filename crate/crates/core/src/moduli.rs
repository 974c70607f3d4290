//! The moduli space of degree-n holomorphic maps Σ → S² and its local
//! parametrization by elliptic functions.
//!
//! Under stereographic projection from the chart pole p = (0, 0, 1) a
//! degree-n holomorphic map is the elliptic function
//!
//!   f(z) = λ σ(z−a₁)···σ(z−aₙ) / (σ(z−b₁)···σ(z−bₙ)),
//!
//! with λ ≠ 0, Σaᵢ = Σbⱼ mod Λ and {aᵢ} ∩ {bⱼ} = ∅. A point is packed into
//! 4n real coordinates q = (Re λ, Im λ, Re a₁, Im a₁, …, Re b_{n−1},
//! Im b_{n−1}); bₙ = Σaᵢ − Σ_{j<n} bⱼ is always derived, which keeps the
//! degree constraint exact.
//!
//! Evaluation is pole-safe throughout: with N = λ∏σ(z−aᵢ), D = ∏σ(z−bⱼ)
//! the map is the projective expression
//!
//!   ψ = (2 Re(N D̄), 2 Im(N D̄), |N|² − |D|²) / (|N|² + |D|²),
//!
//! which never divides by an individual σ. Moduli derivatives ψ_μ are
//! analytic: ∂N/∂aᵢ etc. are assembled from σ and σ′ factor products
//! (never by dividing out a σ that may vanish), and the projective
//! differential annihilates the common (N, D) rescaling direction, so
//! quasi-period bookkeeping drops out automatically.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::elliptic::EllipticCtx;
use crate::error::{CoreError, Result};
use crate::field::Field;
use crate::lattice::LatticeSpec;

/// Fraction of the shorter period used as the default admissibility margin.
pub const DELTA_SEP_FACTOR: f64 = 0.05;

/// Finite-difference step in moduli coordinates for second derivatives.
pub const H_SECOND_DERIV: f64 = 1e-5;

/// Finite-difference step for directional second/third derivatives of
/// analytic quantities (balanced against roundoff at ~1e-8 accuracy).
pub const H_DIRECTIONAL: f64 = 1e-4;

/// A point of the moduli space M_n in the fixed elliptic chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuliPoint {
    /// Degree n ≥ 2.
    pub n: usize,
    pub lambda: Complex64,
    /// Zeros a₁..aₙ of the stereographic image.
    pub a: Vec<Complex64>,
    /// Poles b₁..b_{n−1}; bₙ is derived.
    pub b: Vec<Complex64>,
    pub lattice: LatticeSpec,
}

/// Admissibility diagnostics: separations are distances mod Λ.
#[derive(Debug, Clone, Copy)]
pub struct Admissibility {
    pub ok: bool,
    pub delta_sep: f64,
    pub min_ab_separation: f64,
    pub min_aa_separation: f64,
    pub min_bb_separation: f64,
    pub lambda_abs: f64,
}

impl ModuliPoint {
    pub fn new(
        lambda: Complex64,
        a: Vec<Complex64>,
        b: Vec<Complex64>,
        lattice: LatticeSpec,
    ) -> Result<Self> {
        let n = a.len();
        if n < 2 {
            return Err(CoreError::InvalidModuli(format!(
                "degree must be at least 2, got {n}"
            )));
        }
        if b.len() != n - 1 {
            return Err(CoreError::InvalidModuli(format!(
                "expected {} free poles for degree {n}, got {}",
                n - 1,
                b.len()
            )));
        }
        Ok(Self {
            n,
            lambda,
            a,
            b,
            lattice,
        })
    }

    /// Dimension of the chart, 4n.
    pub fn dim(&self) -> usize {
        4 * self.n
    }

    /// The derived pole bₙ = Σaᵢ − Σ_{j<n} bⱼ.
    pub fn b_last(&self) -> Complex64 {
        let sa: Complex64 = self.a.iter().sum();
        let sb: Complex64 = self.b.iter().sum();
        sa - sb
    }

    /// All n poles, including the derived one.
    pub fn b_full(&self) -> Vec<Complex64> {
        let mut b = self.b.clone();
        b.push(self.b_last());
        b
    }

    /// Pack into the real coordinate vector q ∈ ℝ^{4n}.
    pub fn to_q(&self) -> Vec<f64> {
        let mut q = Vec::with_capacity(self.dim());
        q.push(self.lambda.re);
        q.push(self.lambda.im);
        for z in &self.a {
            q.push(z.re);
            q.push(z.im);
        }
        for z in &self.b {
            q.push(z.re);
            q.push(z.im);
        }
        q
    }

    /// Rebuild a point of degree n from packed coordinates.
    pub fn from_q(n: usize, q: &[f64], lattice: LatticeSpec) -> Result<Self> {
        if q.len() != 4 * n {
            return Err(CoreError::InvalidModuli(format!(
                "coordinate vector has length {}, expected {}",
                q.len(),
                4 * n
            )));
        }
        let lambda = Complex64::new(q[0], q[1]);
        let a = (0..n)
            .map(|i| Complex64::new(q[2 + 2 * i], q[3 + 2 * i]))
            .collect();
        let b = (0..n - 1)
            .map(|j| Complex64::new(q[2 + 2 * n + 2 * j], q[3 + 2 * n + 2 * j]))
            .collect();
        Self::new(lambda, a, b, lattice)
    }

    /// The point displaced by `delta` in packed coordinates.
    pub fn displaced(&self, delta: &[f64]) -> Result<Self> {
        let q: Vec<f64> = self
            .to_q()
            .iter()
            .zip(delta)
            .map(|(a, d)| a + d)
            .collect();
        Self::from_q(self.n, &q, self.lattice)
    }

    pub fn default_delta_sep(&self) -> f64 {
        DELTA_SEP_FACTOR * self.lattice.omega1.norm().min(self.lattice.omega2.norm())
    }

    /// Admissibility with margin `delta_sep` (`None` for the default).
    /// Requires |λ| > 0 and all zero/pole locations separated mod Λ: zeros
    /// from poles (the {aᵢ} ∩ {bⱼ} = ∅ condition with a compact margin) and
    /// zeros/poles among themselves (simple zeros and poles, so ±p are
    /// regular values of the map).
    pub fn admissibility(&self, delta_sep: Option<f64>) -> Admissibility {
        let delta = delta_sep.unwrap_or_else(|| self.default_delta_sep());
        let b = self.b_full();
        let dist = |x: Complex64, y: Complex64| self.lattice.dist_to_lattice(x - y);
        let mut min_ab = f64::INFINITY;
        for &ai in &self.a {
            for &bj in &b {
                min_ab = min_ab.min(dist(ai, bj));
            }
        }
        let mut min_aa = f64::INFINITY;
        for i in 0..self.a.len() {
            for j in (i + 1)..self.a.len() {
                min_aa = min_aa.min(dist(self.a[i], self.a[j]));
            }
        }
        let mut min_bb = f64::INFINITY;
        for i in 0..b.len() {
            for j in (i + 1)..b.len() {
                min_bb = min_bb.min(dist(b[i], b[j]));
            }
        }
        let lambda_abs = self.lambda.norm();
        let ok = lambda_abs > 1e-12 && min_ab >= delta && min_aa >= delta && min_bb >= delta;
        Admissibility {
            ok,
            delta_sep: delta,
            min_ab_separation: min_ab,
            min_aa_separation: min_aa,
            min_bb_separation: min_bb,
            lambda_abs,
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.admissibility(None).ok
    }

    fn require_admissible(&self) -> Result<()> {
        let report = self.admissibility(None);
        if report.ok {
            Ok(())
        } else {
            Err(CoreError::Inadmissible(format!(
                "min a-b separation {:.3e}, min a-a {:.3e}, min b-b {:.3e}, |lambda| {:.3e}, margin {:.3e}",
                report.min_ab_separation,
                report.min_aa_separation,
                report.min_bb_separation,
                report.lambda_abs,
                report.delta_sep
            )))
        }
    }

    fn grid_compatible(&self, grid: &LatticeSpec) -> Result<()> {
        if grid.omega1 != self.lattice.omega1 || grid.omega2 != self.lattice.omega2 {
            return Err(CoreError::LatticeMismatch);
        }
        Ok(())
    }

    /// Evaluate ψ(q, ·) on the point's own grid.
    pub fn eval(&self) -> Result<Field> {
        self.eval_on(&self.lattice)
    }

    /// Evaluate ψ(q, ·) as a unit-norm field on `grid` (same periods, any
    /// resolution).
    pub fn eval_on(&self, grid: &LatticeSpec) -> Result<Field> {
        self.require_admissible()?;
        self.grid_compatible(grid)?;
        let ctx = EllipticCtx::new(grid);
        let b = self.b_full();
        let mut psi = Field::zeros(*grid);
        for idx in 0..grid.len() {
            let z = grid.point(idx);
            let mut num = self.lambda;
            for &ai in &self.a {
                num *= ctx.sigma(z - ai);
            }
            let mut den = Complex64::new(1.0, 0.0);
            for &bj in &b {
                den *= ctx.sigma(z - bj);
            }
            let p = projective_point(num, den);
            for c in 0..3 {
                psi.comps[c].values[idx] = p[c];
            }
        }
        Ok(psi)
    }

    /// Evaluate ψ together with all 4n analytic moduli derivatives ψ_μ in a
    /// single pass over the grid.
    pub fn eval_with_derivs(&self, grid: &LatticeSpec) -> Result<(Field, Vec<Field>)> {
        self.require_admissible()?;
        self.grid_compatible(grid)?;
        let ctx = EllipticCtx::new(grid);
        let n = self.n;
        let dim = self.dim();
        let b = self.b_full();
        let mut psi = Field::zeros(*grid);
        let mut derivs: Vec<Field> = (0..dim).map(|_| Field::zeros(*grid)).collect();

        let mut sa = vec![Complex64::default(); n];
        let mut spa = vec![Complex64::default(); n];
        let mut sb = vec![Complex64::default(); n];
        let mut spb = vec![Complex64::default(); n];

        for idx in 0..grid.len() {
            let z = grid.point(idx);
            for i in 0..n {
                let (s, sp) = ctx.sigma_and_prime(z - self.a[i]);
                sa[i] = s;
                spa[i] = sp;
            }
            for j in 0..n {
                let (s, sp) = ctx.sigma_and_prime(z - b[j]);
                sb[j] = s;
                spb[j] = sp;
            }
            let prod_a: Complex64 = sa.iter().product();
            let prod_b: Complex64 = sb.iter().product();
            let num = self.lambda * prod_a;
            let den = prod_b;
            let p = projective_point(num, den);
            for c in 0..3 {
                psi.comps[c].values[idx] = p[c];
            }

            // Products with one factor left out, formed without division.
            let excl = |s: &[Complex64], skip: usize| -> Complex64 {
                s.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != skip)
                    .map(|(_, v)| v)
                    .product()
            };
            let prod_b_head: Complex64 = sb[..n - 1].iter().product();

            // Complex derivative of (N, D) w.r.t. each complex parameter.
            let mut param_derivs: Vec<(Complex64, Complex64)> = Vec::with_capacity(2 * n);
            // λ
            param_derivs.push((prod_a, Complex64::new(0.0, 0.0)));
            // aᵢ: d/daᵢ σ(z−aᵢ) = −σ′(z−aᵢ); bₙ depends on aᵢ with dbₙ/daᵢ = 1.
            for i in 0..n {
                let dn = -self.lambda * spa[i] * excl(&sa, i);
                let dd = -spb[n - 1] * prod_b_head;
                param_derivs.push((dn, dd));
            }
            // bⱼ (j < n): dbₙ/dbⱼ = −1.
            for j in 0..n - 1 {
                let dd = -spb[j] * excl(&sb, j) + spb[n - 1] * excl(&sb, n - 1);
                param_derivs.push((Complex64::new(0.0, 0.0), dd));
            }

            for (pi, &(dn, dd)) in param_derivs.iter().enumerate() {
                // Real and imaginary coordinate directions of the parameter.
                let d_re = projective_differential(num, den, p, dn, dd);
                let i_dn = Complex64::new(0.0, 1.0) * dn;
                let i_dd = Complex64::new(0.0, 1.0) * dd;
                let d_im = projective_differential(num, den, p, i_dn, i_dd);
                for c in 0..3 {
                    derivs[2 * pi].comps[c].values[idx] = d_re[c];
                    derivs[2 * pi + 1].comps[c].values[idx] = d_im[c];
                }
            }
        }
        Ok((psi, derivs))
    }

    /// Analytic moduli derivative ψ_μ = ∂ψ/∂q^μ.
    pub fn d_moduli(&self, mu: usize, grid: &LatticeSpec) -> Result<Field> {
        let (_, derivs) = self.eval_with_derivs(grid)?;
        derivs
            .into_iter()
            .nth(mu)
            .ok_or_else(|| CoreError::InvalidModuli(format!("index {mu} out of range")))
    }

    /// Second moduli derivative ψ_{μν} by centered differences of the
    /// analytic first derivatives, symmetrized in (μ, ν).
    pub fn d2_moduli(&self, mu: usize, nu: usize, grid: &LatticeSpec) -> Result<Field> {
        let h = H_SECOND_DERIV;
        let fd = |first: usize, second: usize| -> Result<Field> {
            let mut dp = vec![0.0; self.dim()];
            dp[second] = h;
            let mut dm = vec![0.0; self.dim()];
            dm[second] = -h;
            let plus = self.displaced(&dp)?.d_moduli(first, grid)?;
            let minus = self.displaced(&dm)?.d_moduli(first, grid)?;
            Ok(plus.sub(&minus).scale(1.0 / (2.0 * h)))
        };
        let a = fd(mu, nu)?;
        let b = fd(nu, mu)?;
        Ok(a.add(&b).scale(0.5))
    }

    /// All second derivatives ψ_{μν} as a symmetric (4n)² table, computed
    /// from 2·4n full first-derivative evaluations.
    pub fn second_derivs(&self, grid: &LatticeSpec) -> Result<Vec<Vec<Field>>> {
        let dim = self.dim();
        let h = H_SECOND_DERIV;
        let mut fd: Vec<Vec<Field>> = Vec::with_capacity(dim);
        for nu in 0..dim {
            let mut dp = vec![0.0; dim];
            dp[nu] = h;
            let (_, plus) = self.displaced(&dp)?.eval_with_derivs(grid)?;
            dp[nu] = -h;
            let (_, minus) = self.displaced(&dp)?.eval_with_derivs(grid)?;
            let row: Vec<Field> = plus
                .iter()
                .zip(minus.iter())
                .map(|(p, m)| p.sub(m).scale(1.0 / (2.0 * h)))
                .collect();
            fd.push(row); // fd[nu][mu] ≈ ∂_ν ψ_μ
        }
        let mut out: Vec<Vec<Field>> = Vec::with_capacity(dim);
        for mu in 0..dim {
            let mut row = Vec::with_capacity(dim);
            for nu in 0..dim {
                row.push(fd[nu][mu].add(&fd[mu][nu]).scale(0.5));
            }
            out.push(row);
        }
        Ok(out)
    }

    /// Directional second derivative ψ_{μν} v^μ v^ν along `v`, by a centered
    /// second difference of ψ along the ray q + s·v.
    pub fn directional_dd_psi(&self, v: &[f64], grid: &LatticeSpec) -> Result<Field> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(Field::zeros(*grid));
        }
        let h = H_DIRECTIONAL;
        let step: Vec<f64> = v.iter().map(|x| x / norm * h).collect();
        let plus = self.displaced(&step)?.eval_on(grid)?;
        let minus = self
            .displaced(&step.iter().map(|x| -x).collect::<Vec<_>>())?
            .eval_on(grid)?;
        let center = self.eval_on(grid)?;
        Ok(plus
            .add(&minus)
            .add_scaled(-2.0, &center)
            .scale(norm * norm / (h * h)))
    }

    /// Directional third-derivative contractions ψ_{μνλ} v^ν v^λ for all μ,
    /// by a centered second difference of the analytic ψ_μ along `v`.
    pub fn directional_dd_dmoduli(&self, v: &[f64], grid: &LatticeSpec) -> Result<Vec<Field>> {
        let dim = self.dim();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok((0..dim).map(|_| Field::zeros(*grid)).collect());
        }
        let h = H_DIRECTIONAL;
        let step: Vec<f64> = v.iter().map(|x| x / norm * h).collect();
        let (_, plus) = self.displaced(&step)?.eval_with_derivs(grid)?;
        let (_, minus) = self
            .displaced(&step.iter().map(|x| -x).collect::<Vec<_>>())?
            .eval_with_derivs(grid)?;
        let (_, center) = self.eval_with_derivs(grid)?;
        Ok((0..dim)
            .map(|mu| {
                plus[mu]
                    .add(&minus[mu])
                    .add_scaled(-2.0, &center[mu])
                    .scale(norm * norm / (h * h))
            })
            .collect())
    }

    /// Serialize to the flat JSON schema
    /// `{n, lattice: {omega1, omega2}, lambda: [re, im], a: [[re, im]…], b: [[re, im]…]}`
    /// with b of length n−1 (bₙ always derived).
    pub fn to_json(&self) -> Value {
        let c = |z: Complex64| json!([z.re, z.im]);
        json!({
            "n": self.n,
            "lattice": {
                "omega1": c(self.lattice.omega1),
                "omega2": c(self.lattice.omega2),
            },
            "lambda": c(self.lambda),
            "a": self.a.iter().map(|&z| c(z)).collect::<Vec<_>>(),
            "b": self.b.iter().map(|&z| c(z)).collect::<Vec<_>>(),
        })
    }

    /// Deserialize from the schema of [`ModuliPoint::to_json`]; the grid
    /// resolution is supplied externally (it is not part of the schema).
    pub fn from_json(v: &Value, grid_n: usize) -> Result<Self> {
        let c = |v: &Value, what: &str| -> Result<Complex64> {
            let arr = v
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| CoreError::InvalidModuli(format!("{what} must be [re, im]")))?;
            Ok(Complex64::new(
                arr[0].as_f64().unwrap_or(f64::NAN),
                arr[1].as_f64().unwrap_or(f64::NAN),
            ))
        };
        let n = v["n"]
            .as_u64()
            .ok_or_else(|| CoreError::InvalidModuli("missing degree n".into()))?
            as usize;
        let omega1 = c(&v["lattice"]["omega1"], "omega1")?;
        let omega2 = c(&v["lattice"]["omega2"], "omega2")?;
        let lattice = LatticeSpec::new(omega1, omega2, grid_n)?;
        let arr = |key: &str| -> Result<Vec<Complex64>> {
            v[key]
                .as_array()
                .ok_or_else(|| CoreError::InvalidModuli(format!("missing array {key}")))?
                .iter()
                .map(|e| c(e, key))
                .collect()
        };
        let point = Self::new(c(&v["lambda"], "lambda")?, arr("a")?, arr("b")?, lattice)?;
        if point.n != n {
            return Err(CoreError::InvalidModuli(format!(
                "declared degree {n} does not match {} zeros",
                point.n
            )));
        }
        Ok(point)
    }
}

/// A tangent vector at a moduli point, in packed coordinates.
#[derive(Debug, Clone)]
pub struct ModuliTangent {
    pub v: Vec<f64>,
    pub base: ModuliPoint,
}

impl ModuliTangent {
    pub fn new(v: Vec<f64>, base: ModuliPoint) -> Result<Self> {
        if v.len() != base.dim() {
            return Err(CoreError::InvalidModuli(format!(
                "tangent length {} does not match 4n = {}",
                v.len(),
                base.dim()
            )));
        }
        Ok(Self { v, base })
    }
}

/// ψ from homogeneous coordinates: (2Re(N D̄), 2Im(N D̄), |N|²−|D|²)/(|N|²+|D|²).
fn projective_point(num: Complex64, den: Complex64) -> [f64; 3] {
    let g = num * den.conj();
    let n2 = num.norm_sqr();
    let d2 = den.norm_sqr();
    let h = n2 + d2;
    [2.0 * g.re / h, 2.0 * g.im / h, (n2 - d2) / h]
}

/// Differential of [`projective_point`] in the direction (δN, δD); kills
/// perturbations proportional to (N, D) by construction.
fn projective_differential(
    num: Complex64,
    den: Complex64,
    p: [f64; 3],
    dn: Complex64,
    dd: Complex64,
) -> [f64; 3] {
    let h = num.norm_sqr() + den.norm_sqr();
    let d_n2 = 2.0 * (num.conj() * dn).re;
    let d_d2 = 2.0 * (den.conj() * dd).re;
    let dg = dn * den.conj() + num * dd.conj();
    let dh = d_n2 + d_d2;
    [
        (2.0 * dg.re - p[0] * dh) / h,
        (2.0 * dg.im - p[1] * dh) / h,
        (d_n2 - d_d2 - p[2] * dh) / h,
    ]
}

/// Stereographic projection from the chart pole p = (0, 0, 1).
pub fn stereographic(x: [f64; 3]) -> Result<Complex64> {
    let denom = 1.0 - x[2];
    if denom.abs() < 1e-14 {
        return Err(CoreError::InvalidModuli(
            "stereographic projection undefined at the chart pole".into(),
        ));
    }
    Ok(Complex64::new(x[0] / denom, x[1] / denom))
}

/// Inverse stereographic projection onto S² ⊂ ℝ³.
pub fn stereographic_inv(w: Complex64) -> [f64; 3] {
    let d = 1.0 + w.norm_sqr();
    [2.0 * w.re / d, 2.0 * w.im / d, (w.norm_sqr() - 1.0) / d]
}

/// Generic admissible n = 2 point on the unit square torus, used as the
/// default configuration throughout.
pub fn default_n2_point(grid_n: usize) -> Result<ModuliPoint> {
    let lattice = LatticeSpec::unit_square(grid_n)?;
    ModuliPoint::new(
        Complex64::new(1.0, 0.0),
        vec![Complex64::new(0.1, 0.0), Complex64::new(0.3, 0.4)],
        vec![Complex64::new(0.0, 0.7)],
        lattice,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Direction;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn point(grid_n: usize) -> ModuliPoint {
        default_n2_point(grid_n).unwrap()
    }

    #[test]
    fn packing_roundtrip() {
        let p = point(16);
        let q = p.to_q();
        assert_eq!(q.len(), 8);
        let back = ModuliPoint::from_q(2, &q, p.lattice).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn admissibility_examples() {
        let p = point(16);
        let rep = p.admissibility(None);
        assert!(rep.ok, "{rep:?}");
        assert!(rep.min_ab_separation > 0.1);

        // a₁ = b₁ is never admissible.
        let bad = ModuliPoint::new(
            Complex64::new(1.0, 0.0),
            vec![Complex64::new(0.1, 0.0), Complex64::new(0.3, 0.4)],
            vec![Complex64::new(0.1, 0.0)],
            p.lattice,
        )
        .unwrap();
        assert!(!bad.is_admissible());

        // λ = 0 is never admissible.
        let mut zero_lambda = p.clone();
        zero_lambda.lambda = Complex64::new(0.0, 0.0);
        assert!(!zero_lambda.is_admissible());
    }

    #[test]
    fn map_is_unit_norm_and_hits_chart_poles() {
        let p = point(32);
        let psi = p.eval().unwrap();
        let (unit, defect) = psi.normalize_pointwise();
        assert!(defect < 1e-12, "unit-norm defect {defect}");
        drop(unit);

        // The grid contains z = a₁ = 0.1 + 0i only if 0.1·N is an integer,
        // so evaluate through a lattice whose grid hits it: use direct
        // projective evaluation at the exact points instead.
        let ctx = EllipticCtx::new(&p.lattice);
        let at = |z: Complex64| {
            let b = p.b_full();
            let mut num = p.lambda;
            for &ai in &p.a {
                num *= ctx.sigma(z - ai);
            }
            let mut den = Complex64::new(1.0, 0.0);
            for &bj in &b {
                den *= ctx.sigma(z - bj);
            }
            projective_point(num, den)
        };
        let at_zero = at(p.a[0]);
        assert!((at_zero[2] + 1.0).abs() < 1e-12); // ψ = −p at a zero of f
        let at_pole = at(p.b[0]);
        assert!((at_pole[2] - 1.0).abs() < 1e-12); // ψ = +p at a pole of f
    }

    #[test]
    fn map_is_doubly_periodic() {
        let p = point(16);
        let ctx = EllipticCtx::new(&p.lattice);
        let b = p.b_full();
        let eval = |z: Complex64| {
            let mut num = p.lambda;
            for &ai in &p.a {
                num *= ctx.sigma(z - ai);
            }
            let mut den = Complex64::new(1.0, 0.0);
            for &bj in &b {
                den *= ctx.sigma(z - bj);
            }
            projective_point(num, den)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let v0 = eval(z);
            for w in [p.lattice.omega1, p.lattice.omega2] {
                let v1 = eval(z + w);
                let d = (0..3)
                    .map(|c| (v1[c] - v0[c]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert!(d < 1e-8, "periodicity defect {d} at {z}");
            }
        }
    }

    #[test]
    fn harmonic_map_residual_small() {
        // Holomorphic maps are harmonic: ψ_xx + ψ_yy + (|ψ_x|²+|ψ_y|²)ψ = 0.
        let p = point(64);
        let psi = p.eval().unwrap();
        let px = psi.deriv(Direction::X);
        let py = psi.deriv(Direction::Y);
        let e = px.norm_sq().add(&py.norm_sq());
        let residual = psi.laplacian().add(&psi.scale_by(&e));
        assert!(
            residual.c0_norm() < 1e-6,
            "harmonic residual {}",
            residual.c0_norm()
        );
    }

    #[test]
    fn moduli_derivatives_are_tangent_and_match_fd() {
        let p = point(32);
        let grid = p.lattice;
        let (psi, derivs) = p.eval_with_derivs(&grid).unwrap();
        assert_eq!(derivs.len(), 8);
        // ψ·ψ_μ = 0 pointwise.
        for d in &derivs {
            assert!(psi.dot(d).max_abs() < 1e-10);
        }
        // Central finite differences of ψ reproduce each ψ_μ.
        let h = 1e-5;
        for mu in 0..8 {
            let mut dq = vec![0.0; 8];
            dq[mu] = h;
            let plus = p.displaced(&dq).unwrap().eval().unwrap();
            dq[mu] = -h;
            let minus = p.displaced(&dq).unwrap().eval().unwrap();
            let fd = plus.sub(&minus).scale(1.0 / (2.0 * h));
            let err = fd.sub(&derivs[mu]).c0_norm();
            assert!(err < 1e-6, "psi_{mu} FD mismatch {err}");
        }
    }

    #[test]
    fn moduli_derivatives_have_full_rank_gram() {
        let p = point(32);
        let (_, derivs) = p.eval_with_derivs(&p.lattice).unwrap();
        let dim = derivs.len();
        let mut gram = nalgebra::DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                gram[(i, j)] = derivs[i].l2_inner(&derivs[j]).unwrap();
            }
        }
        let eig = nalgebra::SymmetricEigen::new(gram);
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        assert!(min > 1e-8 * max, "Gram matrix nearly singular: {min} vs {max}");
    }

    #[test]
    fn second_derivs_symmetric_and_consistent() {
        let p = point(16);
        let grid = p.lattice;
        let table = p.second_derivs(&grid).unwrap();
        let (psi, derivs) = p.eval_with_derivs(&grid).unwrap();
        for mu in 0..8 {
            for nu in mu..8 {
                let d = table[mu][nu].sub(&table[nu][mu]).c0_norm();
                assert!(d == 0.0, "symmetrization should be exact, got {d}");
                // ψ·ψ_{μν} + ψ_μ·ψ_ν = 0 pointwise (differentiate |ψ|² = 1 twice).
                let lhs = psi
                    .dot(&table[mu][nu])
                    .add(&derivs[mu].dot(&derivs[nu]));
                assert!(lhs.max_abs() < 1e-5, "constraint defect {}", lhs.max_abs());
            }
        }
        // Spot-check against the single-pair entry point.
        let single = p.d2_moduli(1, 3, &grid).unwrap();
        assert!(single.sub(&table[1][3]).c0_norm() < 1e-10);
    }

    #[test]
    fn second_derivs_richardson() {
        // Halving the step changes ψ_{μν} at the h² level only.
        let p = point(16);
        let grid = p.lattice;
        let fd_at = |h: f64, mu: usize, nu: usize| -> Field {
            let mut dp = vec![0.0; 8];
            dp[nu] = h;
            let plus = p.displaced(&dp).unwrap().d_moduli(mu, &grid).unwrap();
            dp[nu] = -h;
            let minus = p.displaced(&dp).unwrap().d_moduli(mu, &grid).unwrap();
            plus.sub(&minus).scale(1.0 / (2.0 * h))
        };
        let coarse = fd_at(2e-4, 2, 5);
        let fine = fd_at(1e-4, 2, 5);
        assert!(coarse.sub(&fine).c0_norm() < 1e-4);
    }

    #[test]
    fn stereographic_roundtrip_and_anchors() {
        assert_eq!(
            stereographic([0.0, 0.0, -1.0]).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let w = stereographic([1.0, 0.0, 0.0]).unwrap();
        assert!((w - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(stereographic([0.0, 0.0, 1.0]).is_err());
        let x = stereographic_inv(Complex64::new(0.0, 0.0));
        assert_eq!(x, [0.0, 0.0, -1.0]);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let v = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..0.99),
            ];
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            let x = [v[0] / norm, v[1] / norm, v[2] / norm];
            let back = stereographic_inv(stereographic(x).unwrap());
            for c in 0..3 {
                assert!((back[c] - x[c]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let p = point(16);
        let v = p.to_json();
        assert_eq!(v["b"].as_array().unwrap().len(), 1);
        let back = ModuliPoint::from_json(&v, 16).unwrap();
        assert_eq!(p, back);
    }
}
