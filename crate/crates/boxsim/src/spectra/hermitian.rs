//! Dense complex Hermitian eigensolver.
//!
//! Three stages, EISPACK/LAPACK lineage:
//!
//! 1. Householder tridiagonalization reading only the lower triangle: the
//!    reflectors force every subdiagonal element real, so the resulting
//!    tridiagonal matrix is real symmetric. Reflector vectors are packed
//!    into the zeroed-out part of the input.
//! 2. Backward accumulation of the unitary factor Q from the reflectors.
//! 3. Implicit-shift QL iteration on the real tridiagonal, with each plane
//!    rotation applied to the (complex) eigenvector columns.
//!
//! Eigenvector storage is column-major so a rotation touches two contiguous
//! slices and a finished eigenvector is one contiguous slice.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// QL iteration cap per eigenvalue. LAPACK uses 30; a little headroom costs
/// nothing and failure here means a numerics bug rather than hard input.
const MAX_QL_ITERS: usize = 50;

pub(crate) struct DenseEigen {
    /// Eigenvalues in QL output order (unsorted).
    pub values: Vec<f64>,
    /// Column-major N x N; column k is a unit 2-norm eigenvector of
    /// values[k].
    pub vectors: Vec<Complex64>,
}

/// Elementary unitary reflector U = I - tau v v^H with v[0] = 1 mapping the
/// input column onto (beta, 0, .., 0), beta real.
///
/// Returns (tau, beta) and writes v[1..] over x[1..]; x[0] is left to the
/// caller (the packed storage wants v[0] = 1 there).
fn make_reflector(x: &mut [Complex64]) -> (Complex64, f64) {
    let alpha = x[0];
    let tail2: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
    let r2 = alpha.norm_sqr() + tail2;
    if r2 == 0.0 {
        return (ZERO, 0.0);
    }
    if tail2 == 0.0 && alpha.im == 0.0 {
        // Already in the desired form; no reflection needed.
        return (ZERO, alpha.re);
    }
    let r = r2.sqrt();
    let beta = if alpha.re >= 0.0 { -r } else { r };
    let tau = Complex64::new((beta - alpha.re) / beta, alpha.im / beta);
    let scale = ONE / (alpha - beta);
    for z in &mut x[1..] {
        *z *= scale;
    }
    (tau, beta)
}

/// Householder tridiagonalization of the Hermitian matrix `a` (row-major,
/// lower triangle trusted). On return `d`/`e` hold the real tridiagonal
/// (e[k] couples k and k+1), `tau` the reflector scalars, and the columns
/// of `a` below the subdiagonal hold the reflector vectors.
fn tridiagonalize(
    a: &mut [Complex64],
    n: usize,
    d: &mut [f64],
    e: &mut [f64],
    tau: &mut [Complex64],
) {
    let mut v = vec![ZERO; n];
    let mut u = vec![ZERO; n];
    let mut w = vec![ZERO; n];

    for k in 0..n.saturating_sub(1) {
        let m = n - k - 1;

        // Reflector from column k below the diagonal.
        for (i, vi) in v[..m].iter_mut().enumerate() {
            *vi = a[(k + 1 + i) * n + k];
        }
        let (t, beta) = make_reflector(&mut v[..m]);
        tau[k] = t;
        e[k] = beta;
        v[0] = ONE;
        // Pack v into the column it annihilated.
        for (i, &vi) in v[..m].iter().enumerate() {
            a[(k + 1 + i) * n + k] = vi;
        }
        if t == ZERO {
            continue;
        }

        // u = A2 v over the trailing block, reading the lower triangle once.
        for ui in u[..m].iter_mut() {
            *ui = ZERO;
        }
        for i in 0..m {
            let gi = k + 1 + i;
            let row = &a[gi * n + k + 1..gi * n + k + 1 + i];
            let vi = v[i];
            let mut acc = ZERO;
            for (j, &h) in row.iter().enumerate() {
                acc += h * v[j];
                u[j] += h.conj() * vi;
            }
            u[i] += acc + a[gi * n + gi].re * vi;
        }

        // w = conj(tau) u - (|tau|^2 (v^H u) / 2) v
        let mut s = ZERO;
        for i in 0..m {
            s += v[i].conj() * u[i];
        }
        let c = 0.5 * t.norm_sqr() * s;
        let tc = t.conj();
        for i in 0..m {
            w[i] = tc * u[i] - c * v[i];
        }

        // Hermitian rank-2 update A2 -= v w^H + w v^H on the lower triangle.
        for i in 0..m {
            let gi = k + 1 + i;
            let vi = v[i];
            let wi = w[i];
            let base = gi * n + k + 1;
            let row = &mut a[base..=base + i];
            for (j, rj) in row.iter_mut().enumerate() {
                *rj -= vi * w[j].conj() + wi * v[j].conj();
            }
            let di = base + i;
            a[di] = Complex64::new(a[di].re, 0.0);
        }
    }

    for i in 0..n {
        d[i] = a[i * n + i].re;
    }
    e[n - 1] = 0.0;
}

/// Backward accumulation of Q = U_0^H U_1^H .. U_{n-2}^H into a column-major
/// identity.
fn accumulate_q(a: &[Complex64], n: usize, tau: &[Complex64]) -> Vec<Complex64> {
    let mut z = vec![ZERO; n * n];
    for j in 0..n {
        z[j * n + j] = ONE;
    }
    let mut v = vec![ZERO; n];
    for k in (0..n.saturating_sub(1)).rev() {
        let t = tau[k];
        if t == ZERO {
            continue;
        }
        let m = n - k - 1;
        for (i, vi) in v[..m].iter_mut().enumerate() {
            *vi = a[(k + 1 + i) * n + k];
        }
        let tc = t.conj();
        // Columns j <= k are still e_j and have no overlap with v.
        for j in k + 1..n {
            let col = &mut z[j * n + k + 1..j * n + k + 1 + m];
            let mut f = ZERO;
            for (ci, &vi) in col.iter().zip(&v[..m]) {
                f += vi.conj() * ci;
            }
            f *= tc;
            for (ci, &vi) in col.iter_mut().zip(&v[..m]) {
                *ci -= f * vi;
            }
        }
    }
    z
}

/// One plane rotation on two adjacent eigenvector columns.
#[inline]
fn rotate_columns(zi: &mut [Complex64], zi1: &mut [Complex64], c: f64, s: f64) {
    for (p, q) in zi.iter_mut().zip(zi1.iter_mut()) {
        let a = *p;
        let b = *q;
        *q = Complex64::new(s * a.re + c * b.re, s * a.im + c * b.im);
        *p = Complex64::new(c * a.re - s * b.re, c * a.im - s * b.im);
    }
}

/// Implicit-shift QL on the real tridiagonal (d, e), rotating the columns of
/// z alongside. EISPACK tql2 with an iteration cap.
fn ql_implicit(d: &mut [f64], e: &mut [f64], z: &mut [Complex64], n: usize) -> Result<()> {
    let eps = f64::EPSILON;
    let mut shift_total = 0.0f64;
    let mut tst1 = 0.0f64;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut iter = 0;
        loop {
            // Look for a negligible subdiagonal element.
            let mut m = l;
            while m + 1 < n {
                if e[m].abs() <= eps * tst1 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERS {
                return Err(Error::NoConvergence { index: l });
            }

            // Implicit shift from the leading 2x2.
            let g = d[l];
            let mut p = (d[l + 1] - g) / (2.0 * e[l]);
            let mut r = p.hypot(1.0);
            if p < 0.0 {
                r = -r;
            }
            d[l] = e[l] / (p + r);
            d[l + 1] = e[l] * (p + r);
            let dl1 = d[l + 1];
            let mut h = g - d[l];
            for di in d[l + 2..n].iter_mut() {
                *di -= h;
            }
            shift_total += h;

            // Implicit QL sweep from m down to l.
            p = d[m];
            let mut c = 1.0f64;
            let mut c2 = c;
            let mut c3 = c;
            let el1 = e[l + 1];
            let mut s = 0.0f64;
            let mut s2 = 0.0f64;
            for i in (l..m).rev() {
                c3 = c2;
                c2 = c;
                s2 = s;
                let gg = c * e[i];
                h = c * p;
                r = p.hypot(e[i]);
                e[i + 1] = s * r;
                s = e[i] / r;
                c = p / r;
                p = c * d[i] - s * gg;
                d[i + 1] = h + s * (c * gg + s * d[i]);

                let (zi, zi1) = z[i * n..(i + 2) * n].split_at_mut(n);
                rotate_columns(zi, zi1, c, s);
            }
            p = -s * s2 * c3 * el1 * e[l] / dl1;
            e[l] = s * p;
            d[l] = c * p;

            if e[l].abs() <= eps * tst1 {
                break;
            }
        }
        d[l] += shift_total;
        e[l] = 0.0;
    }
    Ok(())
}

/// Full eigendecomposition of the Hermitian matrix stored row-major in `a`
/// (only the lower triangle and the real diagonal are read). Destroys `a`.
pub(crate) fn eigh_inplace(a: &mut [Complex64], n: usize) -> Result<DenseEigen> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(DenseEigen {
            values: vec![],
            vectors: vec![],
        });
    }
    if n == 1 {
        return Ok(DenseEigen {
            values: vec![a[0].re],
            vectors: vec![ONE],
        });
    }

    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    let mut tau = vec![ZERO; n];
    tridiagonalize(a, n, &mut d, &mut e, &mut tau);
    let mut z = accumulate_q(a, n, &tau);
    ql_implicit(&mut d, &mut e, &mut z, n)?;
    Ok(DenseEigen {
        values: d,
        vectors: z,
    })
}
