//! Pipeline orchestration: packet -> evolve -> decohere -> eigh -> analyze,
//! with CSV/JSON outputs and a sweep harness.
//!
//! All CSV bodies are deterministic: fixed summation orders upstream, fixed
//! eigenvalue tie-breaking, and full-precision fixed formatting here. Two
//! runs with the same configuration produce bit-identical files.

mod config;

pub use config::{apply_config_text, load_config, SimConfig, MAX_POINTS, SWEEPABLE_KEYS};

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::analysis::{density_profile, find_nodes, localization_report, LocalizationReport};
use crate::decoherence::{apply_decoherence, off_block_mass, pure_density, purity, trace};
use crate::error::{Error, Result};
use crate::lattice::{gaussian_packet, make_grid, tail_mass};
use crate::propagator::{evolve, reversal_fidelity};
use crate::spectra::{effective_rank, eigh};

/// Everything a finished run reports: the configuration echo, derived
/// scalars, the output file list, and per-stage wall-clock timings.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config: SimConfig,
    pub lambda_db: f64,
    pub dx: f64,
    pub tail_mass: f64,
    pub trace: f64,
    pub purity: f64,
    pub effective_rank: f64,
    pub reversal_fidelity: Option<f64>,
    pub n_nodes: usize,
    pub mean_node_spacing: Option<f64>,
    pub weight_fraction_below_lambda_db: f64,
    pub weighted_median_width: f64,
    pub off_block_mass: f64,
    pub pre_spreading: bool,
    pub output_files: Vec<String>,
    pub timings_s: BTreeMap<String, f64>,
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(dir: &Path, name: &str) -> Result<std::io::BufWriter<std::fs::File>> {
    let path = dir.join(name);
    let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    Ok(std::io::BufWriter::new(file))
}

fn finish(mut w: std::io::BufWriter<std::fs::File>, dir: &Path, name: &str) -> Result<()> {
    w.flush().map_err(|e| Error::io(dir.join(name), e))
}

macro_rules! wline {
    ($w:expr, $dir:expr, $name:expr, $($arg:tt)*) => {
        writeln!($w, $($arg)*).map_err(|e| Error::io($dir.join($name), e))?
    };
}

/// Runs the full pipeline for one configuration and writes
/// `profile.csv`, `blocks.csv`, `spectrum.csv`, `report.csv`,
/// `eigvec_<k>.csv` (k < dump_top_k), and `manifest.json` into
/// `cfg.output_dir`.
pub fn run_pipeline(cfg: &SimConfig) -> Result<RunManifest> {
    cfg.validate()?;
    let dir = cfg.output_dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let mut timings: BTreeMap<String, f64> = BTreeMap::new();
    let mut files: Vec<String> = Vec::new();
    let clock = Instant::now();

    // Initial state.
    let grid = make_grid(cfg.n_points, cfg.length)?;
    let params = cfg.physical_params();
    let psi0 = gaussian_packet(&grid, &params)?;
    let tail = tail_mass(cfg.length, &params);
    timings.insert("setup".into(), clock.elapsed().as_secs_f64());

    // Propagation (and the reversal consistency check on the same state).
    let stage = Instant::now();
    let reversal = cfg
        .reversal_check
        .then(|| reversal_fidelity(&psi0, cfg.t, &params));
    let psi_t = evolve(&psi0, cfg.t, &params);
    timings.insert("evolve".into(), stage.elapsed().as_secs_f64());

    // Interference pattern and node partition.
    let stage = Instant::now();
    let profile = density_profile(&psi_t);
    let partition = find_nodes(&profile, &grid, cfg.rel_threshold)?;
    timings.insert("profile".into(), stage.elapsed().as_secs_f64());

    // Density matrix, decohered unless disabled.
    let stage = Instant::now();
    let rho = {
        let pure = pure_density(&psi_t);
        if cfg.no_decoherence {
            pure
        } else {
            apply_decoherence(&pure, cfg.d)?
        }
    };
    let tr = trace(&rho);
    let pur = purity(&rho);
    let obm = off_block_mass(&rho, &partition)?;
    timings.insert("kernel".into(), stage.elapsed().as_secs_f64());

    // Eigendecomposition.
    let stage = Instant::now();
    let eig = eigh(&rho)?;
    drop(rho);
    let erank = effective_rank(&eig)?;
    timings.insert("eigh".into(), stage.elapsed().as_secs_f64());

    // Localization metrics.
    let stage = Instant::now();
    let report = localization_report(&eig, &params, cfg.d, cfg.weight_cutoff, &partition)?;
    timings.insert("analysis".into(), stage.elapsed().as_secs_f64());

    // File output.
    let stage = Instant::now();
    write_profile(&dir, &grid, &psi_t, &profile)?;
    files.push("profile.csv".into());
    write_blocks(&dir, &partition)?;
    files.push("blocks.csv".into());
    write_spectrum(&dir, &grid, &eig)?;
    files.push("spectrum.csv".into());
    write_report(&dir, &report)?;
    files.push("report.csv".into());
    for k in 0..cfg.dump_top_k.min(eig.len()) {
        let name = format!("eigvec_{k}.csv");
        write_eigvec(&dir, &name, &grid, eig.eigenvector(k))?;
        files.push(name);
    }
    files.push("manifest.json".into());
    timings.insert("write".into(), stage.elapsed().as_secs_f64());
    timings.insert("total".into(), clock.elapsed().as_secs_f64());

    let manifest = RunManifest {
        config: cfg.clone(),
        lambda_db: params.de_broglie_wavelength(),
        dx: grid.dx(),
        tail_mass: tail,
        trace: tr,
        purity: pur,
        effective_rank: erank,
        reversal_fidelity: reversal,
        n_nodes: partition.node_positions().len(),
        mean_node_spacing: report.mean_node_spacing,
        weight_fraction_below_lambda_db: report.weight_fraction_below_lambda_db,
        weighted_median_width: report.weighted_median_width,
        off_block_mass: obm,
        pre_spreading: report.pre_spreading,
        output_files: files,
        timings_s: timings,
    };
    let path = dir.join("manifest.json");
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serialization cannot fail");
    std::fs::write(&path, body + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

fn write_profile(
    dir: &Path,
    grid: &crate::lattice::Grid,
    psi: &crate::lattice::WaveFunction,
    profile: &[f64],
) -> Result<()> {
    let name = "profile.csv";
    let mut w = create(dir, name)?;
    wline!(w, dir, name, "x,re_psi,im_psi,abs2");
    for (i, &x) in grid.coords().iter().enumerate() {
        let a = psi.amps()[i];
        wline!(
            w,
            dir,
            name,
            "{},{},{},{}",
            fmt(x),
            fmt(a.re),
            fmt(a.im),
            fmt(profile[i])
        );
    }
    finish(w, dir, name)
}

fn write_blocks(dir: &Path, partition: &crate::analysis::BlockPartition) -> Result<()> {
    let name = "blocks.csv";
    let mut w = create(dir, name)?;
    wline!(w, dir, name, "node_x");
    for &x in partition.node_positions() {
        wline!(w, dir, name, "{}", fmt(x));
    }
    finish(w, dir, name)
}

fn write_spectrum(
    dir: &Path,
    grid: &crate::lattice::Grid,
    eig: &crate::spectra::EigenDecomposition,
) -> Result<()> {
    let name = "spectrum.csv";
    let mut w = create(dir, name)?;
    wline!(w, dir, name, "k,lambda,width_std,ipr_length,x_mean");
    for k in 0..eig.len() {
        let v = eig.eigenvector(k);
        wline!(
            w,
            dir,
            name,
            "{},{},{},{},{}",
            k,
            fmt(eig.eigenvalues()[k]),
            fmt(crate::analysis::eigenstate_width(v, grid)),
            fmt(crate::analysis::ipr_length(v, grid)),
            fmt(crate::analysis::eigenstate_mean(v, grid))
        );
    }
    finish(w, dir, name)
}

fn write_report(dir: &Path, report: &LocalizationReport) -> Result<()> {
    let name = "report.csv";
    let mut w = create(dir, name)?;
    wline!(
        w,
        dir,
        name,
        "k,lambda,x_mean,width_std,ipr_length,max_block_mass"
    );
    for r in &report.rows {
        wline!(
            w,
            dir,
            name,
            "{},{},{},{},{},{}",
            r.index,
            fmt(r.eigenvalue),
            fmt(r.x_mean),
            fmt(r.width_std),
            fmt(r.ipr_length),
            fmt(r.max_block_mass)
        );
    }
    finish(w, dir, name)
}

fn write_eigvec(
    dir: &Path,
    name: &str,
    grid: &crate::lattice::Grid,
    v: &[num_complex::Complex64],
) -> Result<()> {
    let mut w = create(dir, name)?;
    wline!(w, dir, name, "x,re_v,im_v");
    for (i, &x) in grid.coords().iter().enumerate() {
        wline!(w, dir, name, "{},{},{}", fmt(x), fmt(v[i].re), fmt(v[i].im));
    }
    finish(w, dir, name)
}

/// One sweep item: the axis value, where its outputs went, and either the
/// manifest or the error message.
#[derive(Debug, Clone)]
pub struct SweepItem {
    pub value: f64,
    pub directory: PathBuf,
    pub outcome: std::result::Result<RunManifest, String>,
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Runs the pipeline once per value of `axis`, each into its own
/// sub-directory, continuing past individual failures. Writes
/// `sweep_summary.csv` (value, effective rank, weight fraction below the de
/// Broglie wavelength, error) into the template's output directory.
pub fn sweep(template: &SimConfig, axis: &str, values: &[f64]) -> Result<Vec<SweepItem>> {
    if !SWEEPABLE_KEYS.contains(&axis) {
        return Err(Error::Config(format!(
            "axis {axis:?} is not sweepable; choose one of {SWEEPABLE_KEYS:?}"
        )));
    }
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let root = template.output_dir.clone();
    std::fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;

    let mut items = Vec::with_capacity(values.len());
    for &value in values {
        let mut cfg = template.clone();
        let directory = root.join(format!("{axis}_{value}"));
        let outcome = cfg
            .set(axis, &value.to_string())
            .and_then(|()| {
                cfg.output_dir = directory.clone();
                run_pipeline(&cfg)
            })
            .map_err(|e| e.to_string());
        items.push(SweepItem {
            value,
            directory,
            outcome,
        });
    }

    let name = "sweep_summary.csv";
    let mut w = create(&root, name)?;
    wline!(
        w,
        &root,
        name,
        "value,effective_rank,weight_fraction_below_lambda_db,error"
    );
    for item in &items {
        match &item.outcome {
            Ok(m) => wline!(
                w,
                &root,
                name,
                "{},{},{},",
                item.value,
                fmt(m.effective_rank),
                fmt(m.weight_fraction_below_lambda_db)
            ),
            Err(e) => wline!(w, &root, name, "{},,,{}", item.value, csv_escape(e)),
        }
    }
    finish(w, &root, name)?;
    Ok(items)
}
