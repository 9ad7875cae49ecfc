//! Pure-state density matrix and the Gaussian decoherence factor.
//!
//! Kernel convention: the stored values are samples of the continuum kernel
//! rho(x_i, x_j). Every operator-level statement (trace, purity, the
//! eigenproblem) refers to the dx-weighted matrix A = rho * dx, which keeps
//! the continuum limits grid-independent.

use num_complex::Complex64;

use crate::analysis::BlockPartition;
use crate::error::{Error, Result};
use crate::lattice::{Grid, WaveFunction};
use crate::numeric::{pairwise_sum, pairwise_sum_by};

/// Hermitian N x N kernel rho(x_i, x_j) on a grid.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    grid: Grid,
    kernel: Vec<Complex64>, // row-major, length N*N
}

impl DensityMatrix {
    /// Wraps raw kernel samples (row-major, length N^2).
    pub fn from_kernel(grid: Grid, kernel: Vec<Complex64>) -> Result<Self> {
        let n = grid.n_points();
        if kernel.len() != n * n {
            return Err(Error::GridMismatch(format!(
                "kernel length {} does not match the {n}x{n} grid",
                kernel.len()
            )));
        }
        Ok(DensityMatrix { grid, kernel })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Row-major kernel samples.
    pub fn kernel(&self) -> &[Complex64] {
        &self.kernel
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.kernel[i * self.grid.n_points() + j]
    }

    /// Kernel diagonal, the position density rho(x_i, x_i).
    pub fn diagonal(&self) -> Vec<Complex64> {
        let n = self.grid.n_points();
        (0..n).map(|i| self.kernel[i * n + i]).collect()
    }
}

/// Projector kernel psi(x_i) conj(psi(x_j)) of a pure state.
///
/// The lower triangle is computed and mirrored by conjugation, so
/// Hermiticity holds bit-exactly.
pub fn pure_density(wf: &WaveFunction) -> DensityMatrix {
    let n = wf.grid().n_points();
    let amps = wf.amps();
    let mut kernel = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..i {
            let v = amps[i] * amps[j].conj();
            kernel[i * n + j] = v;
            kernel[j * n + i] = v.conj();
        }
        kernel[i * n + i] = Complex64::new(amps[i].norm_sqr(), 0.0);
    }
    DensityMatrix {
        grid: wf.grid().clone(),
        kernel,
    }
}

/// Multiplies the kernel elementwise by exp(-(x_i - x_j)^2 / d^2).
///
/// The diagonal is untouched bit-exactly (the factor there is exactly 1),
/// and Hermiticity is preserved by mirroring the scaled lower triangle. On
/// the uniform lattice x_i - x_j = (i - j) dx, so the factor is Toeplitz and
/// one table of N values covers the whole matrix.
pub fn apply_decoherence(rho: &DensityMatrix, d: f64) -> Result<DensityMatrix> {
    if !d.is_finite() || d <= 0.0 {
        return Err(Error::Config(format!(
            "decoherence length d must be positive, got {d}"
        )));
    }
    let n = rho.grid.n_points();
    let dx = rho.grid.dx();
    let inv_d2 = 1.0 / (d * d);
    let mut factor = vec![1.0f64; n];
    for (k, f) in factor.iter_mut().enumerate().skip(1) {
        let sep = k as f64 * dx;
        *f = (-sep * sep * inv_d2).exp();
    }
    let mut kernel = rho.kernel.clone();
    for i in 0..n {
        for j in 0..i {
            let v = rho.kernel[i * n + j] * factor[i - j];
            kernel[i * n + j] = v;
            kernel[j * n + i] = v.conj();
        }
    }
    Ok(DensityMatrix {
        grid: rho.grid.clone(),
        kernel,
    })
}

/// Trace of the weighted operator, sum_i rho(x_i, x_i) dx.
pub fn trace(rho: &DensityMatrix) -> f64 {
    let n = rho.grid.n_points();
    rho.grid.dx() * pairwise_sum_by(n, |i| rho.kernel[i * n + i].re)
}

/// tr(rho^2) of the weighted operator, sum_ij |rho(x_i, x_j)|^2 dx^2.
///
/// 1 for a pure state; decoherence strictly contracts it.
pub fn purity(rho: &DensityMatrix) -> f64 {
    let n = rho.grid.n_points();
    let dx2 = rho.grid.dx() * rho.grid.dx();
    let row_sums: Vec<f64> = (0..n)
        .map(|i| pairwise_sum_by(n, |j| rho.kernel[i * n + j].norm_sqr()))
        .collect();
    dx2 * pairwise_sum(&row_sums)
}

/// Relative Hilbert-Schmidt weight of the kernel outside the block diagonal
/// induced by `partition`: 0 for an exactly block-diagonal kernel.
pub fn off_block_mass(rho: &DensityMatrix, partition: &BlockPartition) -> Result<f64> {
    let n = rho.grid.n_points();
    partition.validate(n)?;
    let block_of = partition.block_index_map(n);
    let row_total: Vec<f64> = (0..n)
        .map(|i| pairwise_sum_by(n, |j| rho.kernel[i * n + j].norm_sqr()))
        .collect();
    let row_off: Vec<f64> = (0..n)
        .map(|i| {
            pairwise_sum_by(n, |j| {
                if block_of[i] == block_of[j] {
                    0.0
                } else {
                    rho.kernel[i * n + j].norm_sqr()
                }
            })
        })
        .collect();
    let total = pairwise_sum(&row_total);
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok(pairwise_sum(&row_off) / total)
}
