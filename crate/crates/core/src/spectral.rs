//! 2-D FFT plumbing and Fourier multipliers on the torus grid.
//!
//! Transforms act on real grid data stored row-major (`idx = j*N + i`).
//! The forward transform is normalized by 1/N² so the (0,0) coefficient of
//! a constant field is the constant itself; with that convention Parseval
//! reads ∫|f|² = area · Σ|f̂|², which the tests pin down.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};

use crate::lattice::LatticeSpec;

struct PlanPair {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

static PLANS: Lazy<Mutex<HashMap<usize, Arc<PlanPair>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn plans(n: usize) -> Arc<PlanPair> {
    let mut map = PLANS.lock().unwrap();
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(PlanPair {
                fwd: planner.plan_fft_forward(n),
                inv: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

fn transpose(data: &mut [Complex64], n: usize) {
    for j in 0..n {
        for i in (j + 1)..n {
            data.swap(j * n + i, i * n + j);
        }
    }
}

fn fft2_complex(data: &mut [Complex64], n: usize, forward: bool) {
    let plan = plans(n);
    let fft = if forward { &plan.fwd } else { &plan.inv };
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    transpose(data, n);
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    transpose(data, n);
}

/// Forward transform of a real grid; coefficients indexed `[n_idx*N + m_idx]`
/// (mode m along ω₁, n along ω₂), normalized by 1/N².
pub fn fft2(values: &[f64], n: usize) -> Vec<Complex64> {
    debug_assert_eq!(values.len(), n * n);
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2_complex(&mut data, n, true);
    let scale = 1.0 / (n * n) as f64;
    for c in &mut data {
        *c *= scale;
    }
    data
}

/// Inverse of [`fft2`], discarding the (tiny) imaginary residue.
pub fn ifft2(coeffs: &[Complex64], n: usize) -> Vec<f64> {
    debug_assert_eq!(coeffs.len(), n * n);
    let mut data = coeffs.to_vec();
    fft2_complex(&mut data, n, false);
    data.iter().map(|c| c.re).collect()
}

/// Apply a Fourier multiplier `mult(m_idx, n_idx) -> Complex64` to a real field.
pub fn apply_multiplier<F>(values: &[f64], lattice: &LatticeSpec, mult: F) -> Vec<f64>
where
    F: Fn(usize, usize) -> Complex64,
{
    let n = lattice.grid_n;
    let mut coeffs = fft2(values, n);
    for n_idx in 0..n {
        for m_idx in 0..n {
            coeffs[n_idx * n + m_idx] *= mult(m_idx, n_idx);
        }
    }
    ifft2(&coeffs, n)
}

/// First-derivative multiplier i·k along the requested real direction.
/// Nyquist rows/columns are zeroed so the derivative of a real field is real
/// and odd symmetry is preserved.
pub fn deriv_multiplier(lattice: &LatticeSpec, axis_y: bool) -> impl Fn(usize, usize) -> Complex64 + '_ {
    let n = lattice.grid_n;
    move |m_idx, n_idx| {
        if m_idx == n / 2 || n_idx == n / 2 {
            return Complex64::new(0.0, 0.0);
        }
        let m = lattice.signed_mode(m_idx);
        let nn = lattice.signed_mode(n_idx);
        let (kx, ky) = lattice.wave_vector(m, nn);
        Complex64::new(0.0, if axis_y { ky } else { kx })
    }
}

/// Laplacian multiplier −|k|² (an even multiplier, so Nyquist modes keep
/// their full weight).
pub fn laplacian_multiplier(lattice: &LatticeSpec) -> impl Fn(usize, usize) -> Complex64 + '_ {
    move |m_idx, n_idx| {
        let m = lattice.signed_mode(m_idx);
        let nn = lattice.signed_mode(n_idx);
        let (kx, ky) = lattice.wave_vector(m, nn);
        Complex64::new(-(kx * kx + ky * ky), 0.0)
    }
}

/// Squared dual wave vector |k|² of each mode, same indexing as [`fft2`].
pub fn k_squared(lattice: &LatticeSpec) -> Vec<f64> {
    let n = lattice.grid_n;
    let mut out = vec![0.0; n * n];
    for n_idx in 0..n {
        for m_idx in 0..n {
            let (kx, ky) =
                lattice.wave_vector(lattice.signed_mode(m_idx), lattice.signed_mode(n_idx));
            out[n_idx * n + m_idx] = kx * kx + ky * ky;
        }
    }
    out
}

/// Zero all modes with max(|m|, |n|) > N/3 (2/3-rule dealiasing).
pub fn dealias(values: &[f64], lattice: &LatticeSpec) -> Vec<f64> {
    let n = lattice.grid_n;
    let cut = (n / 3) as i64;
    apply_multiplier(values, lattice, |m_idx, n_idx| {
        let m = lattice.signed_mode(m_idx).abs();
        let nn = lattice.signed_mode(n_idx).abs();
        if m > cut || nn > cut {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}
