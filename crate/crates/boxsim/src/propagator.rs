//! Exact free evolution in the sine eigenbasis of the box.
//!
//! The potential vanishes between the walls, so the box eigenfunctions
//! `phi_n(x) = sqrt(2/L) sin(n pi x / L)` diagonalize the evolution exactly:
//! any time t is reached in a single step by phase rotation of the spectral
//! coefficients. The transform is the sine transform of the first kind,
//! computed as an FFT of the odd extension; under the chosen scaling it is
//! unitary, so the discrete norm is conserved to rounding.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::lattice::{Grid, PhysicalParams, WaveFunction};
use crate::numeric::pairwise_sum_by;

/// Complex coefficients over the sine modes n = 1..N of the box.
#[derive(Debug, Clone)]
pub struct SpectralCoeffs {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralCoeffs {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// c_n for n = 1..N, stored at index n-1.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Parseval sum, equals the coordinate-space norm2 under the unitary
    /// scaling.
    pub fn weight(&self) -> f64 {
        pairwise_sum_by(self.coeffs.len(), |i| self.coeffs[i].norm_sqr())
    }
}

thread_local! {
    static FFT_PLANS: RefCell<HashMap<usize, Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn fft_plan(len: usize) -> Arc<dyn Fft<f64>> {
    FFT_PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry(len)
            .or_insert_with(|| FftPlanner::new().plan_fft_forward(len))
            .clone()
    })
}

/// Unnormalized sine transform of the first kind,
/// `out_k = sum_{j=1..N} in_j sin(pi j k / (N+1))`, k = 1..N,
/// via a length-2(N+1) FFT of the odd extension. Self-inverse up to the
/// factor (N+1)/2.
fn dst1(data: &[Complex64]) -> Vec<Complex64> {
    let n = data.len();
    let m = 2 * (n + 1);
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (i, &v) in data.iter().enumerate() {
        buf[i + 1] = v;
        buf[m - 1 - i] = -v;
    }
    fft_plan(m).process(&mut buf);
    // Y_k = -2i * DST_k for the odd extension under the e^{-2pi i jk/m}
    // convention, hence DST_k = (i/2) Y_k.
    let half_i = Complex64::new(0.0, 0.5);
    (1..=n).map(|k| half_i * buf[k]).collect()
}

/// Projects onto the sine modes: c_n = sum_i psi_i phi_n(x_i) dx.
pub fn to_spectral(wf: &WaveFunction) -> SpectralCoeffs {
    let grid = wf.grid();
    let scale = (2.0 / grid.length()).sqrt() * grid.dx();
    let coeffs = dst1(wf.amps()).into_iter().map(|c| c * scale).collect();
    SpectralCoeffs {
        grid: grid.clone(),
        coeffs,
    }
}

/// Synthesizes psi_i = sum_n c_n phi_n(x_i) back on the grid.
pub fn from_spectral(sc: &SpectralCoeffs) -> WaveFunction {
    let scale = (2.0 / sc.grid.length()).sqrt();
    let amps = dst1(&sc.coeffs).into_iter().map(|a| a * scale).collect();
    WaveFunction::new(sc.grid.clone(), amps).expect("coefficient count matches grid")
}

/// Box spectrum E_n = n^2 pi^2 hbar^2 / (2 m L^2).
pub fn mode_energy(n: usize, grid: &Grid, params: &PhysicalParams) -> Result<f64> {
    if n < 1 || n > grid.n_points() {
        return Err(Error::ModeOutOfRange {
            n,
            n_points: grid.n_points(),
        });
    }
    let nf = n as f64;
    let l = grid.length();
    Ok(nf * nf * PI * PI * params.hbar * params.hbar / (2.0 * params.mass * l * l))
}

/// Evolves by time t (any sign) in one exact step:
/// c_n(t) = c_n(0) exp(-i E_n t / hbar).
pub fn evolve(wf: &WaveFunction, t: f64, params: &PhysicalParams) -> WaveFunction {
    let mut sc = to_spectral(wf);
    let l = sc.grid.length();
    // E_n t / hbar = n^2 * base
    let base = PI * PI * params.hbar * t / (2.0 * params.mass * l * l);
    for (idx, c) in sc.coeffs.iter_mut().enumerate() {
        let nf = (idx + 1) as f64;
        *c *= Complex64::from_polar(1.0, -nf * nf * base);
    }
    from_spectral(&sc)
}

/// Fidelity of the round trip forward t, back -t against the initial state.
/// Spectral propagation is exactly unitary, so this stays at 1 up to
/// rounding for every t.
pub fn reversal_fidelity(wf0: &WaveFunction, t: f64, params: &PhysicalParams) -> f64 {
    let there = evolve(wf0, t, params);
    let back = evolve(&there, -t, params);
    crate::lattice::fidelity(wf0, &back).expect("evolution preserves the grid")
}
