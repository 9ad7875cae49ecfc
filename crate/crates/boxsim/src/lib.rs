//! Decoherence-induced localization of a wave packet in an infinite square
//! well.
//!
//! The pipeline: build a Gaussian packet on a Dirichlet lattice, evolve it
//! exactly in the sine eigenbasis of the box, form the pure-state density
//! matrix, suppress off-diagonal coherences with a Gaussian factor
//! `exp(-(x-x')^2/d^2)`, diagonalize the resulting kernel, and measure how
//! narrow the eigenstates are compared to the interference pattern of the
//! density profile.
//!
//! Modules mirror the pipeline stages:
//!
//! - [`lattice`]: grid, wave-function container, Gaussian initial state
//! - [`propagator`]: sine-spectral transform and exact free evolution
//! - [`decoherence`]: density-matrix construction and the Gaussian kernel
//! - [`spectra`]: dense Hermitian eigendecomposition
//! - [`analysis`]: interference nodes, block partition, localization metrics
//! - [`runner`]: configuration, pipeline orchestration, sweeps, file output
//!
//! ```
//! use boxsim::lattice::{gaussian_packet, make_grid, PhysicalParams};
//! use boxsim::propagator::evolve;
//! use boxsim::decoherence::{apply_decoherence, pure_density};
//! use boxsim::spectra::{effective_rank, eigh};
//!
//! let grid = make_grid(128, 1.0)?;
//! let params = PhysicalParams::new(1.0, 1.0, 30.0, 0.5, 0.05)?;
//! let psi = evolve(&gaussian_packet(&grid, &params)?, 0.5, &params);
//! let rho = apply_decoherence(&pure_density(&psi), 0.01)?;
//! let eig = eigh(&rho)?;
//! assert!(effective_rank(&eig)? > 1.0);
//! # Ok::<(), boxsim::Error>(())
//! ```

pub mod analysis;
pub mod decoherence;
pub mod error;
pub mod lattice;
pub mod numeric;
pub mod propagator;
pub mod runner;
pub mod spectra;

pub use error::{Error, Result};
pub use lattice::{
    fidelity, gaussian_packet, make_grid, norm2, Grid, PhysicalParams, WaveFunction,
};
