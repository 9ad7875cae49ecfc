//! Interference-pattern measurement, node partition, and eigenstate
//! localization metrics.
//!
//! The density profile of the evolved packet oscillates on the de Broglie
//! scale with near-zero minima. Those minima cut the box into blocks that
//! nearly decouple under strong decoherence, and the point of the analysis
//! is to show that the dominant eigenstates of the decohered kernel live
//! inside single blocks and are correspondingly narrow.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Grid, PhysicalParams, WaveFunction};
use crate::numeric::{pairwise_sum, pairwise_sum_by};
use crate::spectra::EigenDecomposition;

/// Grid partition at the near-zero minima of a density profile.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    /// Parabolically refined node positions, ascending, in (0, L).
    node_positions: Vec<f64>,
    /// Consecutive index ranges covering 0..N; boundaries sit at the
    /// detected minimum samples.
    blocks: Vec<std::ops::Range<usize>>,
}

impl BlockPartition {
    /// The trivial partition: one block over the whole grid.
    pub fn single(n_points: usize) -> Self {
        BlockPartition {
            node_positions: Vec::new(),
            blocks: std::iter::once(0..n_points).collect(),
        }
    }

    /// Builds a partition from explicit boundary indices (each must be an
    /// interior index) and the matching refined positions.
    pub fn from_boundaries(
        n_points: usize,
        boundary_indices: &[usize],
        node_positions: Vec<f64>,
    ) -> Result<Self> {
        if boundary_indices.len() != node_positions.len() {
            return Err(Error::InvalidPartition(
                "boundary and node counts differ".into(),
            ));
        }
        let mut blocks = Vec::with_capacity(boundary_indices.len() + 1);
        let mut prev = 0usize;
        for &b in boundary_indices {
            if b <= prev || b >= n_points {
                return Err(Error::InvalidPartition(format!(
                    "boundary index {b} is not strictly inside the remaining range"
                )));
            }
            blocks.push(prev..b);
            prev = b;
        }
        blocks.push(prev..n_points);
        Ok(BlockPartition {
            node_positions,
            blocks,
        })
    }

    pub fn node_positions(&self) -> &[f64] {
        &self.node_positions
    }

    pub fn blocks(&self) -> &[std::ops::Range<usize>] {
        &self.blocks
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Mean distance between adjacent nodes; None with fewer than two nodes.
    pub fn mean_node_spacing(&self) -> Option<f64> {
        if self.node_positions.len() < 2 {
            return None;
        }
        let span = self.node_positions.last().unwrap() - self.node_positions.first().unwrap();
        Some(span / (self.node_positions.len() - 1) as f64)
    }

    /// Checks that the blocks are disjoint, ordered, and cover 0..n exactly.
    pub fn validate(&self, n_points: usize) -> Result<()> {
        let mut expect = 0usize;
        for b in &self.blocks {
            if b.start != expect {
                return Err(Error::InvalidPartition(format!(
                    "block starting at {} leaves a gap or overlap at {expect}",
                    b.start
                )));
            }
            if b.end <= b.start {
                return Err(Error::InvalidPartition(format!(
                    "empty block at index {}",
                    b.start
                )));
            }
            expect = b.end;
        }
        if expect != n_points {
            return Err(Error::InvalidPartition(format!(
                "blocks cover 0..{expect}, grid has {n_points} points"
            )));
        }
        Ok(())
    }

    /// Block id for every grid index.
    pub fn block_index_map(&self, n_points: usize) -> Vec<usize> {
        let mut map = vec![0usize; n_points];
        for (bi, b) in self.blocks.iter().enumerate() {
            for slot in &mut map[b.clone()] {
                *slot = bi;
            }
        }
        map
    }
}

/// Per-eigenstate localization metrics.
#[derive(Debug, Clone)]
pub struct EigenstateRow {
    pub index: usize,
    pub eigenvalue: f64,
    pub x_mean: f64,
    pub width_std: f64,
    pub ipr_length: f64,
    /// Largest fraction of this state's probability mass inside one block.
    pub max_block_mass: f64,
}

/// Localization summary for the top-weight eigenstates.
#[derive(Debug, Clone)]
pub struct LocalizationReport {
    /// Rows for the highest-weight eigenstates capturing `weight_cutoff` of
    /// the total spectral weight.
    pub rows: Vec<EigenstateRow>,
    pub lambda_db: f64,
    pub d: f64,
    pub effective_rank: f64,
    /// Fraction of the total weight carried by eigenstates narrower than
    /// the de Broglie wavelength (over the whole spectrum).
    pub weight_fraction_below_lambda_db: f64,
    /// Weighted median of width_std over the reported rows.
    pub weighted_median_width: f64,
    pub mean_node_spacing: Option<f64>,
    /// True when the profile has no interior nodes (the packet has not yet
    /// spread into an interference pattern); eigenstates need not be narrow
    /// in this regime.
    pub pre_spreading: bool,
    pub total_weight: f64,
}

/// |psi(x_i)|^2, same length as the grid.
pub fn density_profile(wf: &WaveFunction) -> Vec<f64> {
    wf.amps().iter().map(|a| a.norm_sqr()).collect()
}

/// Finds near-zero strict local minima of a profile and cuts the grid there.
///
/// A node is a sample below `rel_threshold * max(profile)` that is strictly
/// smaller than both neighbors; its position is refined by the parabola
/// through the three surrounding samples. No nodes yields the single-block
/// partition.
pub fn find_nodes(profile: &[f64], grid: &Grid, rel_threshold: f64) -> Result<BlockPartition> {
    if !rel_threshold.is_finite() || rel_threshold <= 0.0 || rel_threshold >= 1.0 {
        return Err(Error::Config(format!(
            "rel_threshold must be in (0, 1), got {rel_threshold}"
        )));
    }
    if profile.len() != grid.n_points() {
        return Err(Error::GridMismatch(
            "profile length does not match grid".into(),
        ));
    }
    let peak = profile.iter().fold(0.0f64, |a, &b| a.max(b));
    if peak <= 0.0 {
        return Ok(BlockPartition::single(grid.n_points()));
    }
    let cut = rel_threshold * peak;
    let mut boundary_indices = Vec::new();
    let mut node_positions = Vec::new();
    for i in 1..profile.len() - 1 {
        let (a, b, c) = (profile[i - 1], profile[i], profile[i + 1]);
        if b < a && b < c && b < cut {
            // Parabolic refinement through the three samples.
            let denom = a - 2.0 * b + c;
            let delta = if denom > 0.0 {
                0.5 * (a - c) / denom
            } else {
                0.0
            };
            boundary_indices.push(i);
            node_positions.push(grid.coords()[i] + delta * grid.dx());
        }
    }
    BlockPartition::from_boundaries(grid.n_points(), &boundary_indices, node_positions)
}

fn weight_moments(weights: &[f64], grid: &Grid) -> (f64, f64) {
    let total = pairwise_sum(weights);
    if total <= 0.0 {
        return (0.0, 0.0);
    }
    let coords = grid.coords();
    let mean = pairwise_sum_by(weights.len(), |i| coords[i] * weights[i]) / total;
    let var = pairwise_sum_by(weights.len(), |i| {
        let u = coords[i] - mean;
        u * u * weights[i]
    }) / total;
    (mean, var.max(0.0).sqrt())
}

/// Position mean of |v|^2 dx.
pub fn eigenstate_mean(v: &[Complex64], grid: &Grid) -> f64 {
    let w: Vec<f64> = v.iter().map(|z| z.norm_sqr() * grid.dx()).collect();
    weight_moments(&w, grid).0
}

/// Standard-deviation width sqrt(<x^2> - <x>^2) of |v|^2 dx.
pub fn eigenstate_width(v: &[Complex64], grid: &Grid) -> f64 {
    let w: Vec<f64> = v.iter().map(|z| z.norm_sqr() * grid.dx()).collect();
    weight_moments(&w, grid).1
}

/// Inverse participation length (sum |v|^2 dx)^2 / (sum |v|^4 dx): dx for a
/// one-point spike, w for a uniform state over length w. Reduces to
/// 1/(sum |v|^4 dx) for continuum-normalized input.
pub fn ipr_length(v: &[Complex64], grid: &Grid) -> f64 {
    let dx = grid.dx();
    let s2 = dx * pairwise_sum_by(v.len(), |i| v[i].norm_sqr());
    let s4 = dx
        * pairwise_sum_by(v.len(), |i| {
            let m = v[i].norm_sqr();
            m * m
        });
    if s4 <= 0.0 {
        return 0.0;
    }
    s2 * s2 / s4
}

fn max_block_mass(v: &[Complex64], grid: &Grid, partition: &BlockPartition) -> f64 {
    let dx = grid.dx();
    let total = dx * pairwise_sum_by(v.len(), |i| v[i].norm_sqr());
    if total <= 0.0 {
        return 0.0;
    }
    partition
        .blocks()
        .iter()
        .map(|b| dx * pairwise_sum_by(b.len(), |i| v[b.start + i].norm_sqr()) / total)
        .fold(0.0f64, f64::max)
}

/// Weighted median: smallest value whose cumulative weight reaches half the
/// total.
fn weighted_median(values: &[f64], weights: &[f64]) -> f64 {
    debug_assert_eq!(values.len(), weights.len());
    if values.is_empty() {
        return 0.0;
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite widths"));
    let total: f64 = order.iter().map(|&i| weights[i]).sum();
    let mut acc = 0.0;
    for &i in &order {
        acc += weights[i];
        if acc >= 0.5 * total {
            return values[i];
        }
    }
    values[order[order.len() - 1]]
}

/// Builds localization rows for the top-weight eigenstates (those capturing
/// `weight_cutoff` of the total weight) plus the spectrum-level summary.
pub fn localization_report(
    eig: &EigenDecomposition,
    params: &PhysicalParams,
    d: f64,
    weight_cutoff: f64,
    partition: &BlockPartition,
) -> Result<LocalizationReport> {
    if !weight_cutoff.is_finite() || weight_cutoff <= 0.0 || weight_cutoff > 1.0 {
        return Err(Error::Config(format!(
            "weight_cutoff must be in (0, 1], got {weight_cutoff}"
        )));
    }
    let grid = eig.grid();
    partition.validate(grid.n_points())?;

    let lambda_db = params.de_broglie_wavelength();
    let total_weight = eig.total_weight();
    if !total_weight.is_finite() || total_weight <= 0.0 {
        return Err(Error::ZeroSpectrum);
    }

    // Width of every eigenstate; the below-lambda_dB weight fraction runs
    // over the whole spectrum.
    let widths: Vec<f64> = (0..eig.len())
        .map(|k| eigenstate_width(eig.eigenvector(k), grid))
        .collect();
    let below = pairwise_sum_by(eig.len(), |k| {
        if widths[k] < lambda_db {
            eig.eigenvalues()[k]
        } else {
            0.0
        }
    });

    let mut rows = Vec::new();
    let mut acc = 0.0;
    for (k, &width_std) in widths.iter().enumerate() {
        let lambda = eig.eigenvalues()[k];
        let v = eig.eigenvector(k);
        rows.push(EigenstateRow {
            index: k,
            eigenvalue: lambda,
            x_mean: eigenstate_mean(v, grid),
            width_std,
            ipr_length: ipr_length(v, grid),
            max_block_mass: max_block_mass(v, grid, partition),
        });
        acc += lambda;
        if acc >= weight_cutoff * total_weight {
            break;
        }
    }

    let row_widths: Vec<f64> = rows.iter().map(|r| r.width_std).collect();
    let row_weights: Vec<f64> = rows.iter().map(|r| r.eigenvalue).collect();

    Ok(LocalizationReport {
        lambda_db,
        d,
        effective_rank: crate::spectra::effective_rank(eig)?,
        weight_fraction_below_lambda_db: below / total_weight,
        weighted_median_width: weighted_median(&row_widths, &row_weights),
        mean_node_spacing: partition.mean_node_spacing(),
        pre_spreading: partition.node_positions().is_empty(),
        total_weight,
        rows,
    })
}
