//! Error type shared by all modules.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid configuration value, with the offending field named.
    #[error("config: {0}")]
    Config(String),

    /// Config file could not be parsed; carries the 1-based line number.
    #[error("config parse error at line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },

    /// The analytic Gaussian tail mass outside the box exceeds the bound;
    /// the packet does not fit between the walls.
    #[error("gaussian packet does not fit the box: tail mass {tail_mass:.3e} exceeds {limit:.1e}")]
    TailLeak { tail_mass: f64, limit: f64 },

    /// Two wave functions live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Mode index outside 1..=n_points.
    #[error("mode index {n} out of range 1..={n_points}")]
    ModeOutOfRange { n: usize, n_points: usize },

    /// Input kernel failed the Hermiticity validation.
    #[error("kernel is not Hermitian: max asymmetry {max_asymmetry:.3e}")]
    NonHermitian { max_asymmetry: f64 },

    /// The tridiagonal QL iteration exceeded its cap. This signals a
    /// numerics bug, not bad input data.
    #[error("eigensolver failed to converge at eigenvalue index {index}")]
    NoConvergence { index: usize },

    /// Spectrum sums to zero; participation number is undefined.
    #[error("all-zero spectrum: effective rank is undefined")]
    ZeroSpectrum,

    /// A block partition does not cover the grid exactly.
    #[error("invalid block partition: {0}")]
    InvalidPartition(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
