//! Shared test helpers: an independent brute-force Hermitian diagonalizer
//! (cyclic complex Jacobi — a different algorithm family from the library's
//! Householder+QL path) and random PSD kernel generators.
#![allow(dead_code)] // each test binary uses its own subset

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use boxsim::decoherence::DensityMatrix;
use boxsim::lattice::{make_grid, Grid};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Brute-force eigendecomposition by cyclic complex Jacobi rotations.
/// Returns (eigenvalues descending, eigenvectors column-major, unit 2-norm).
///
/// Self-checks its own residual so a defective oracle cannot silently
/// vouch for the library.
pub fn jacobi_eigh(a0: &[Complex64], n: usize) -> (Vec<f64>, Vec<Complex64>) {
    assert_eq!(a0.len(), n * n);
    let mut a = a0.to_vec();
    let mut v = vec![ZERO; n * n]; // column-major accumulator
    for j in 0..n {
        v[j * n + j] = ONE;
    }
    let scale: f64 = a0.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r; // e^{i phi}
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (app - aqq) / (2.0 * r);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // R[p][p]=c, R[p][q]=-s e^{i phi}, R[q][p]=s e^{-i phi}, R[q][q]=c
                let se_neg = s * phase.conj();
                let se_pos = s * phase;

                // Columns: B = A R
                for i in 0..n {
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    a[i * n + p] = c * aip + se_neg * aiq;
                    a[i * n + q] = -se_pos * aip + c * aiq;
                }
                // Rows: A' = R^H B
                for j in 0..n {
                    let apj = a[p * n + j];
                    let aqj = a[q * n + j];
                    a[p * n + j] = c * apj + se_pos * aqj;
                    a[q * n + j] = -se_neg * apj + c * aqj;
                }
                // Accumulate V <- V R (column-major columns p and q).
                for i in 0..n {
                    let vip = v[p * n + i];
                    let viq = v[q * n + i];
                    v[p * n + i] = c * vip + se_neg * viq;
                    v[q * n + i] = -se_pos * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .re
            .partial_cmp(&a[i * n + i].re)
            .expect("finite eigenvalues")
    });
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i].re).collect();
    let mut vectors = vec![ZERO; n * n];
    for (k, &col) in order.iter().enumerate() {
        vectors[k * n..(k + 1) * n].copy_from_slice(&v[col * n..(col + 1) * n]);
    }

    // Oracle self-check: residual of each eigenpair against the input.
    for k in 0..n {
        let vk = &vectors[k * n..(k + 1) * n];
        let mut resid = 0.0f64;
        for i in 0..n {
            let mut av = ZERO;
            for j in 0..n {
                av += a0[i * n + j] * vk[j];
            }
            resid += (av - values[k] * vk[i]).norm_sqr();
        }
        assert!(
            resid.sqrt() <= 1e-11 * scale * n as f64,
            "jacobi oracle failed its own residual check: k={k} resid={:.3e}",
            resid.sqrt()
        );
    }
    (values, vectors)
}

/// Random Hermitian PSD kernel with unit trace under the dx weight:
/// kernel = B B^H / (dx * tr(B B^H)).
pub fn random_psd_density(n: usize, seed: u64) -> (Grid, DensityMatrix) {
    let grid = make_grid(n, 1.0).expect("test grid");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b: Vec<Complex64> = (0..n * n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut kernel = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut acc = ZERO;
            for k in 0..n {
                acc += b[i * n + k] * b[j * n + k].conj();
            }
            kernel[i * n + j] = acc;
            kernel[j * n + i] = acc.conj();
        }
    }
    let tr: f64 = (0..n).map(|i| kernel[i * n + i].re).sum();
    let norm = 1.0 / (tr * grid.dx());
    for z in &mut kernel {
        *z *= norm;
    }
    let rho = DensityMatrix::from_kernel(grid.clone(), kernel).expect("kernel size");
    (grid, rho)
}

/// Random normalized wave function on a fresh grid.
pub fn random_wavefunction(n: usize, seed: u64) -> boxsim::lattice::WaveFunction {
    let grid = make_grid(n, 1.0).expect("test grid");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    boxsim::lattice::WaveFunction::new(grid, amps)
        .expect("amp count")
        .normalized()
        .expect("nonzero")
}
