//! Spatial discretization, wave-function container, and the Gaussian initial
//! state.
//!
//! The grid is the interior-point Dirichlet lattice `x_i = i * L/(N+1)`,
//! i = 1..N: the natural lattice of the sine transform of the first kind,
//! on which the infinite-wall boundary condition is exact by construction.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum_by;

/// Minimum number of interior points; below this the lattice cannot resolve
/// anything and the node detector has no room to work.
pub const MIN_POINTS: usize = 8;

/// Analytic Gaussian tail mass outside the box above which the initial
/// packet is rejected.
pub const TAIL_LIMIT: f64 = 1e-6;

/// Uniform interior lattice on (0, L) with Dirichlet endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n_points: usize,
    length: f64,
    dx: f64,
    coords: Vec<f64>,
}

impl Grid {
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Box length L.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Lattice spacing L/(N+1).
    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Interior coordinates x_i = i*dx, i = 1..N.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// True when `other` is the same lattice (same point count and length).
    pub fn same_lattice(&self, other: &Grid) -> bool {
        self.n_points == other.n_points && self.length.to_bits() == other.length.to_bits()
    }
}

/// Physical constants and initial-state parameters.
///
/// `sigma` is the standard deviation of the initial position density
/// |psi_0|^2 (hence the 4 sigma^2 in the packet exponent).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
    pub p0: f64,
    pub q0: f64,
    pub sigma: f64,
}

impl PhysicalParams {
    pub fn new(hbar: f64, mass: f64, p0: f64, q0: f64, sigma: f64) -> Result<Self> {
        let p = PhysicalParams {
            hbar,
            mass,
            p0,
            q0,
            sigma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("sigma", self.sigma),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.p0.is_finite() || !self.q0.is_finite() {
            return Err(Error::Config("p0 and q0 must be finite".into()));
        }
        Ok(())
    }

    /// de Broglie wavelength 2 pi hbar / p0 of the initial momentum.
    pub fn de_broglie_wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar / self.p0
    }
}

/// Complex amplitudes psi(x_i) on a grid.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    grid: Grid,
    amps: Vec<Complex64>,
}

impl WaveFunction {
    /// Wraps raw amplitudes; does not normalize.
    pub fn new(grid: Grid, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "amplitude count {} does not match grid size {}",
                amps.len(),
                grid.n_points()
            )));
        }
        Ok(WaveFunction { grid, amps })
    }

    /// The n-th box eigenfunction sqrt(2/L) sin(n pi x / L) sampled on the
    /// grid. Exactly continuum-normalized on this lattice.
    pub fn sine_mode(grid: &Grid, n: usize) -> Result<Self> {
        if n < 1 || n > grid.n_points() {
            return Err(Error::ModeOutOfRange {
                n,
                n_points: grid.n_points(),
            });
        }
        let scale = (2.0 / grid.length()).sqrt();
        let amps = grid
            .coords()
            .iter()
            .map(|&x| {
                Complex64::new(
                    scale * (n as f64 * std::f64::consts::PI * x / grid.length()).sin(),
                    0.0,
                )
            })
            .collect();
        Ok(WaveFunction {
            grid: grid.clone(),
            amps,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Copy rescaled so that sum |psi_i|^2 dx = 1.
    pub fn normalized(&self) -> Result<WaveFunction> {
        let n2 = norm2(self);
        if n2 <= 0.0 {
            return Err(Error::Config(
                "cannot normalize a zero wave function".into(),
            ));
        }
        let s = 1.0 / n2.sqrt();
        Ok(WaveFunction {
            grid: self.grid.clone(),
            amps: self.amps.iter().map(|a| a * s).collect(),
        })
    }
}

/// Builds the interior Dirichlet lattice with `n_points` points on (0, length).
pub fn make_grid(n_points: usize, length: f64) -> Result<Grid> {
    if n_points < MIN_POINTS {
        return Err(Error::Config(format!(
            "n_points must be at least {MIN_POINTS}, got {n_points}"
        )));
    }
    if !length.is_finite() || length <= 0.0 {
        return Err(Error::Config(format!(
            "length must be positive, got {length}"
        )));
    }
    let dx = length / (n_points + 1) as f64;
    let coords = (1..=n_points).map(|i| i as f64 * dx).collect();
    Ok(Grid {
        n_points,
        length,
        dx,
        coords,
    })
}

/// Samples the Gaussian packet
/// `psi(x) ~ exp(i p0 (x - q0)/hbar) exp(-(x - q0)^2 / (4 sigma^2))`
/// on the grid and renormalizes.
///
/// Fails with [`Error::TailLeak`] when the analytic tail mass of the
/// position density outside (0, L) exceeds [`TAIL_LIMIT`]: the packet does
/// not fit between the walls and truncation would distort it.
pub fn gaussian_packet(grid: &Grid, params: &PhysicalParams) -> Result<WaveFunction> {
    params.validate()?;
    let tail = tail_mass(grid.length(), params);
    if tail >= TAIL_LIMIT {
        return Err(Error::TailLeak {
            tail_mass: tail,
            limit: TAIL_LIMIT,
        });
    }
    let inv_hbar = 1.0 / params.hbar;
    let inv_4s2 = 1.0 / (4.0 * params.sigma * params.sigma);
    let amps: Vec<Complex64> = grid
        .coords()
        .iter()
        .map(|&x| {
            let u = x - params.q0;
            let envelope = (-u * u * inv_4s2).exp();
            Complex64::from_polar(envelope, params.p0 * u * inv_hbar)
        })
        .collect();
    WaveFunction::new(grid.clone(), amps)?.normalized()
}

/// Analytic mass of the Gaussian position density N(q0, sigma^2) outside
/// (0, length).
pub fn tail_mass(length: f64, params: &PhysicalParams) -> f64 {
    let s = params.sigma * std::f64::consts::SQRT_2;
    0.5 * libm::erfc(params.q0 / s) + 0.5 * libm::erfc((length - params.q0) / s)
}

/// Discrete norm squared, sum |psi_i|^2 dx.
pub fn norm2(wf: &WaveFunction) -> f64 {
    let amps = wf.amps();
    wf.grid().dx() * pairwise_sum_by(amps.len(), |i| amps[i].norm_sqr())
}

/// Squared overlap |sum conj(a_i) b_i dx|^2.
///
/// 1 for identical normalized states, invariant under a global phase on
/// either argument.
pub fn fidelity(a: &WaveFunction, b: &WaveFunction) -> Result<f64> {
    if !a.grid().same_lattice(b.grid()) {
        return Err(Error::GridMismatch(
            "fidelity requires both states on the same grid".into(),
        ));
    }
    let (aa, bb) = (a.amps(), b.amps());
    let re = pairwise_sum_by(aa.len(), |i| (aa[i].conj() * bb[i]).re);
    let im = pairwise_sum_by(aa.len(), |i| (aa[i].conj() * bb[i]).im);
    let dx = a.grid().dx();
    let overlap = Complex64::new(re * dx, im * dx);
    Ok(overlap.norm_sqr())
}
