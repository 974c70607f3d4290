//! The flat torus Σ = ℂ/Λ and its discrete grid.
//!
//! The lattice Λ is generated by two periods ω₁ (real, positive) and ω₂
//! (Im ω₂ > 0). Fields are sampled on the uniform N×N grid
//! z = (i/N)ω₁ + (j/N)ω₂ in lattice coordinates, so an oblique torus needs
//! no special casing anywhere: spectral differentiation uses the dual
//! lattice, quadrature uses the parallelogram cell area.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// A flat two-torus ℂ/Λ together with its grid resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    /// First period; real and positive.
    pub omega1: Complex64,
    /// Second period; Im ω₂ > 0.
    pub omega2: Complex64,
    /// Grid resolution per lattice direction (even, ≥ 8).
    pub grid_n: usize,
}

impl LatticeSpec {
    pub fn new(omega1: Complex64, omega2: Complex64, grid_n: usize) -> Result<Self> {
        if omega1.im != 0.0 || omega1.re <= 0.0 {
            return Err(CoreError::InvalidLattice(format!(
                "omega1 must be real and positive, got {omega1}"
            )));
        }
        if !(omega2 / omega1).im.is_finite() || (omega2 / omega1).im <= 0.0 {
            return Err(CoreError::InvalidLattice(format!(
                "Im(omega2/omega1) must be positive, got omega2 = {omega2}"
            )));
        }
        if grid_n < 8 || grid_n % 2 != 0 {
            return Err(CoreError::InvalidLattice(format!(
                "grid_n must be even and at least 8, got {grid_n}"
            )));
        }
        Ok(Self {
            omega1,
            omega2,
            grid_n,
        })
    }

    /// Unit square torus of resolution `grid_n` (ω₁ = 1, ω₂ = i).
    pub fn unit_square(grid_n: usize) -> Result<Self> {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), grid_n)
    }

    /// Area of the fundamental cell, |Im(ω̄₁ ω₂)|.
    pub fn area(&self) -> f64 {
        (self.omega1.conj() * self.omega2).im.abs()
    }

    /// Quadrature weight of one grid cell.
    pub fn cell_area(&self) -> f64 {
        self.area() / (self.grid_n * self.grid_n) as f64
    }

    /// Minimal spacing between adjacent grid points.
    pub fn min_spacing(&self) -> f64 {
        (self.omega1.norm().min(self.omega2.norm())) / self.grid_n as f64
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.grid_n * self.grid_n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid point at flat index `idx = j*N + i`, that is (i/N)ω₁ + (j/N)ω₂.
    pub fn point(&self, idx: usize) -> Complex64 {
        let n = self.grid_n;
        let i = (idx % n) as f64 / n as f64;
        let j = (idx / n) as f64 / n as f64;
        self.omega1 * i + self.omega2 * j
    }

    /// All grid points in flat-index order.
    pub fn points(&self) -> Vec<Complex64> {
        (0..self.len()).map(|idx| self.point(idx)).collect()
    }

    /// Dual-lattice wave vector (k_x, k_y) of the Fourier mode (m, n),
    /// where the mode's phase is exp(2πi(m u + n v)) in lattice coordinates
    /// z = u ω₁ + v ω₂. Solving 2π(mu + nv) = k_x x + k_y y for z = x + iy
    /// gives k = 2π A⁻ᵀ (m, n) with A the period matrix.
    pub fn wave_vector(&self, m: i64, n: i64) -> (f64, f64) {
        let a11 = self.omega1.re;
        let a21 = self.omega1.im;
        let a12 = self.omega2.re;
        let a22 = self.omega2.im;
        let det = a11 * a22 - a12 * a21;
        let two_pi = 2.0 * std::f64::consts::PI;
        let kx = two_pi * (a22 * m as f64 - a21 * n as f64) / det;
        let ky = two_pi * (-a12 * m as f64 + a11 * n as f64) / det;
        (kx, ky)
    }

    /// Signed mode number for FFT bin `idx` (0..N), with the Nyquist bin
    /// mapped to +N/2.
    pub fn signed_mode(&self, idx: usize) -> i64 {
        let n = self.grid_n as i64;
        let i = idx as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Reduce z modulo Λ to lattice coordinates in [-1/2, 1/2)².
    /// Returns (reduced point, integer shift coefficients (p, q)) with
    /// z = reduced + p ω₁ + q ω₂.
    pub fn reduce(&self, z: Complex64) -> (Complex64, i64, i64) {
        let (u, v) = self.lattice_coords(z);
        let p = (u + 0.5).floor();
        let q = (v + 0.5).floor();
        let reduced = z - self.omega1 * p - self.omega2 * q;
        (reduced, p as i64, q as i64)
    }

    /// Lattice coordinates (u, v) with z = u ω₁ + v ω₂.
    pub fn lattice_coords(&self, z: Complex64) -> (f64, f64) {
        let a11 = self.omega1.re;
        let a21 = self.omega1.im;
        let a12 = self.omega2.re;
        let a22 = self.omega2.im;
        let det = a11 * a22 - a12 * a21;
        let u = (a22 * z.re - a12 * z.im) / det;
        let v = (-a21 * z.re + a11 * z.im) / det;
        (u, v)
    }

    /// Distance from z to the nearest lattice point.
    pub fn dist_to_lattice(&self, z: Complex64) -> f64 {
        // The rounding reduction is not exact for very oblique cells; check
        // the neighbouring cells as well.
        let (r, _, _) = self.reduce(z);
        let mut best = f64::INFINITY;
        for p in -1..=1 {
            for q in -1..=1 {
                let w = r - self.omega1 * p as f64 - self.omega2 * q as f64;
                best = best.min(w.norm());
            }
        }
        best
    }
}
