//! Grid fields on the torus: ℝ-valued and ℝ³-valued, with spectral
//! differentiation, quadrature and Sobolev/Cᵏ norms.
//!
//! All operations are pure: they borrow their inputs and return fresh
//! fields, so values are immutable after construction and safe to share
//! across threads.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{CoreError, Result};
use crate::lattice::LatticeSpec;
use crate::spectral;

/// Differentiation direction in the real coordinates z = x + iy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
}

/// A real-valued function sampled on the torus grid.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub values: Vec<f64>,
    pub lattice: LatticeSpec,
}

impl ScalarField {
    pub fn new(values: Vec<f64>, lattice: LatticeSpec) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(CoreError::InvalidLattice(format!(
                "field length {} does not match grid {}²",
                values.len(),
                lattice.grid_n
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(CoreError::InvalidLattice(
                "field contains non-finite values".into(),
            ));
        }
        Ok(Self { values, lattice })
    }

    pub fn zeros(lattice: LatticeSpec) -> Self {
        Self {
            values: vec![0.0; lattice.len()],
            lattice,
        }
    }

    pub fn constant(lattice: LatticeSpec, c: f64) -> Self {
        Self {
            values: vec![c; lattice.len()],
            lattice,
        }
    }

    pub fn from_fn(lattice: LatticeSpec, f: impl Fn(Complex64) -> f64) -> Self {
        let values = (0..lattice.len()).map(|i| f(lattice.point(i))).collect();
        Self { values, lattice }
    }

    /// Spectral derivative along x or y (exact for the trigonometric
    /// interpolant; dual-lattice wave vectors handle oblique tori).
    pub fn deriv(&self, dir: Direction) -> Self {
        let mult = spectral::deriv_multiplier(&self.lattice, dir == Direction::Y);
        Self {
            values: spectral::apply_multiplier(&self.values, &self.lattice, mult),
            lattice: self.lattice,
        }
    }

    /// Fourier-multiplier Laplacian f ↦ f_xx + f_yy.
    pub fn laplacian(&self) -> Self {
        let mult = spectral::laplacian_multiplier(&self.lattice);
        Self {
            values: spectral::apply_multiplier(&self.values, &self.lattice, mult),
            lattice: self.lattice,
        }
    }

    /// Quadrature ∫_Σ f: cell area times grid sum (trapezoid rule on a
    /// periodic domain, spectrally accurate).
    pub fn integrate(&self) -> f64 {
        self.lattice.cell_area() * self.values.iter().sum::<f64>()
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.lattice != other.lattice {
            return Err(CoreError::LatticeMismatch);
        }
        let dot: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum();
        Ok(self.lattice.cell_area() * dot)
    }

    /// Hᵏ norm for k ∈ 0..=3, via the Fourier multiplier Σ_{j≤k} |k|^{2j}
    /// (one term per ordered multi-index of length j over {x, y}).
    pub fn sobolev_norm(&self, k: usize) -> Result<f64> {
        Ok(self.sobolev_norm_sq(k)?.sqrt())
    }

    pub(crate) fn sobolev_norm_sq(&self, k: usize) -> Result<f64> {
        if k > 3 {
            return Err(CoreError::SobolevIndexOutOfRange(k));
        }
        let n = self.lattice.grid_n;
        let coeffs = spectral::fft2(&self.values, n);
        let ksq = spectral::k_squared(&self.lattice);
        let area = self.lattice.area();
        let mut total = 0.0;
        for (c, &k2) in coeffs.iter().zip(ksq.iter()) {
            let mut mult = 1.0;
            let mut pw = 1.0;
            for _ in 0..k {
                pw *= k2;
                mult += pw;
            }
            total += mult * c.norm_sqr();
        }
        Ok(area * total)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
            lattice: self.lattice,
        }
    }

    pub fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.lattice, other.lattice);
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            lattice: self.lattice,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a * b)
    }

    /// Random band-limited field with modes max(|m|,|n|) ≤ `max_mode`,
    /// normalized to unit grid rms.
    pub fn random_bandlimited(
        lattice: LatticeSpec,
        max_mode: usize,
        rng: &mut impl Rng,
    ) -> Self {
        let raw: Vec<f64> = (0..lattice.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cut = max_mode as i64;
        let filtered = spectral::apply_multiplier(&raw, &lattice, |m_idx, n_idx| {
            let m = lattice.signed_mode(m_idx).abs();
            let n = lattice.signed_mode(n_idx).abs();
            if m <= cut && n <= cut && m_idx != lattice.grid_n / 2 && n_idx != lattice.grid_n / 2 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let rms = (filtered.iter().map(|v| v * v).sum::<f64>() / filtered.len() as f64).sqrt();
        let scale = if rms > 0.0 { 1.0 / rms } else { 1.0 };
        Self {
            values: filtered.iter().map(|v| v * scale).collect(),
            lattice,
        }
    }
}

/// An ℝ³-valued function on the grid: three components on one lattice.
#[derive(Debug, Clone)]
pub struct Field {
    pub comps: [ScalarField; 3],
}

impl Field {
    pub fn new(comps: [ScalarField; 3]) -> Result<Self> {
        if comps[0].lattice != comps[1].lattice || comps[0].lattice != comps[2].lattice {
            return Err(CoreError::LatticeMismatch);
        }
        Ok(Self { comps })
    }

    pub fn zeros(lattice: LatticeSpec) -> Self {
        Self {
            comps: [
                ScalarField::zeros(lattice),
                ScalarField::zeros(lattice),
                ScalarField::zeros(lattice),
            ],
        }
    }

    pub fn from_fn(lattice: LatticeSpec, f: impl Fn(Complex64) -> [f64; 3]) -> Self {
        let mut vals = [
            Vec::with_capacity(lattice.len()),
            Vec::with_capacity(lattice.len()),
            Vec::with_capacity(lattice.len()),
        ];
        for i in 0..lattice.len() {
            let v = f(lattice.point(i));
            for c in 0..3 {
                vals[c].push(v[c]);
            }
        }
        let [a, b, c] = vals;
        Self {
            comps: [
                ScalarField { values: a, lattice },
                ScalarField { values: b, lattice },
                ScalarField { values: c, lattice },
            ],
        }
    }

    pub fn lattice(&self) -> LatticeSpec {
        self.comps[0].lattice
    }

    pub fn len(&self) -> usize {
        self.comps[0].values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The 3-vector at grid index `idx`.
    pub fn at(&self, idx: usize) -> [f64; 3] {
        [
            self.comps[0].values[idx],
            self.comps[1].values[idx],
            self.comps[2].values[idx],
        ]
    }

    pub fn deriv(&self, dir: Direction) -> Self {
        Self {
            comps: [
                self.comps[0].deriv(dir),
                self.comps[1].deriv(dir),
                self.comps[2].deriv(dir),
            ],
        }
    }

    pub fn laplacian(&self) -> Self {
        Self {
            comps: [
                self.comps[0].laplacian(),
                self.comps[1].laplacian(),
                self.comps[2].laplacian(),
            ],
        }
    }

    /// Pointwise dot product Y·Z as a scalar field.
    pub fn dot(&self, other: &Self) -> ScalarField {
        let mut out = ScalarField::zeros(self.lattice());
        for c in 0..3 {
            for (o, (a, b)) in out
                .values
                .iter_mut()
                .zip(self.comps[c].values.iter().zip(&other.comps[c].values))
            {
                *o += a * b;
            }
        }
        out
    }

    /// Pointwise cross product Y × Z.
    pub fn cross(&self, other: &Self) -> Self {
        let lattice = self.lattice();
        let mut out = Field::zeros(lattice);
        for i in 0..self.len() {
            let a = self.at(i);
            let b = other.at(i);
            out.comps[0].values[i] = a[1] * b[2] - a[2] * b[1];
            out.comps[1].values[i] = a[2] * b[0] - a[0] * b[2];
            out.comps[2].values[i] = a[0] * b[1] - a[1] * b[0];
        }
        out
    }

    /// Pointwise |Y|².
    pub fn norm_sq(&self) -> ScalarField {
        self.dot(self)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            comps: [
                self.comps[0].scale(c),
                self.comps[1].scale(c),
                self.comps[2].scale(c),
            ],
        }
    }

    /// self + c · other.
    pub fn add_scaled(&self, c: f64, other: &Self) -> Self {
        self.zip(other, |a, b| a + c * b)
    }

    /// Pointwise multiplication by a scalar field.
    pub fn scale_by(&self, s: &ScalarField) -> Self {
        Self {
            comps: [
                self.comps[0].mul(s),
                self.comps[1].mul(s),
                self.comps[2].mul(s),
            ],
        }
    }

    pub fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64 + Copy) -> Self {
        Self {
            comps: [
                self.comps[0].zip(&other.comps[0], f),
                self.comps[1].zip(&other.comps[1], f),
                self.comps[2].zip(&other.comps[2], f),
            ],
        }
    }

    /// L² inner product ∫_Σ Y·Z.
    pub fn l2_inner(&self, other: &Self) -> Result<f64> {
        if self.lattice() != other.lattice() {
            return Err(CoreError::LatticeMismatch);
        }
        Ok(self.dot(other).integrate())
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_inner(self).expect("same lattice").sqrt()
    }

    /// Hᵏ norm, k ∈ 0..=3.
    pub fn sobolev_norm(&self, k: usize) -> Result<f64> {
        let mut total = 0.0;
        for c in &self.comps {
            total += c.sobolev_norm_sq(k)?;
        }
        Ok(total.sqrt())
    }

    /// C⁰ norm: grid maximum of the pointwise vector modulus.
    pub fn c0_norm(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.len() {
            let v = self.at(i);
            m = m.max((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt());
        }
        m
    }

    /// C¹ norm: maximum over the field and its first spectral derivatives.
    pub fn c1_norm(&self) -> f64 {
        self.c0_norm()
            .max(self.deriv(Direction::X).c0_norm())
            .max(self.deriv(Direction::Y).c0_norm())
    }

    /// Cᵏ norm for k ∈ {0, 1}.
    pub fn ck_norm(&self, k: usize) -> f64 {
        match k {
            0 => self.c0_norm(),
            1 => self.c1_norm(),
            _ => panic!("ck_norm only defined for k in {{0, 1}}"),
        }
    }

    /// Pointwise rescaling to the unit sphere. Returns the maximum
    /// pre-normalization defect max | |Y| − 1 |.
    pub fn normalize_pointwise(&self) -> (Self, f64) {
        let mut out = self.clone();
        let mut defect: f64 = 0.0;
        for i in 0..self.len() {
            let v = self.at(i);
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            defect = defect.max((norm - 1.0).abs());
            for c in 0..3 {
                out.comps[c].values[i] = v[c] / norm;
            }
        }
        (out, defect)
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.values.iter().all(|v| v.is_finite()))
    }

    pub fn random_bandlimited(
        lattice: LatticeSpec,
        max_mode: usize,
        rng: &mut impl Rng,
    ) -> Self {
        Self {
            comps: [
                ScalarField::random_bandlimited(lattice, max_mode, rng),
                ScalarField::random_bandlimited(lattice, max_mode, rng),
                ScalarField::random_bandlimited(lattice, max_mode, rng),
            ],
        }
    }
}
