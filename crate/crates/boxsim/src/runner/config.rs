//! Flat `key = value` configuration with built-in reference defaults.
//!
//! One pair per line, `#` starts a comment, unknown keys are errors. File
//! values override the built-in defaults and command-line overrides beat
//! both.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

/// Full pipeline configuration. The defaults are the reference run:
/// L = 1, hbar = 1, m = 1, p0 = 30, q0 = 0.5, sigma = 0.05, t = 0.5,
/// d = 0.01, N = 2048.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub length: f64,
    pub hbar: f64,
    pub mass: f64,
    pub p0: f64,
    pub q0: f64,
    pub sigma: f64,
    pub t: f64,
    pub d: f64,
    pub n_points: usize,
    pub rel_threshold: f64,
    pub weight_cutoff: f64,
    pub output_dir: PathBuf,
    pub dump_top_k: usize,
    pub no_decoherence: bool,
    pub reversal_check: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            length: 1.0,
            hbar: 1.0,
            mass: 1.0,
            p0: 30.0,
            q0: 0.5,
            sigma: 0.05,
            t: 0.5,
            d: 0.01,
            n_points: 2048,
            rel_threshold: 0.02,
            weight_cutoff: 0.9,
            output_dir: PathBuf::from("out"),
            dump_top_k: 8,
            no_decoherence: false,
            reversal_check: true,
        }
    }
}

/// Upper bound on the lattice size: the dense kernel and the eigenvector
/// matrix each cost 16 N^2 bytes, about 1 GiB apiece at this cap.
pub const MAX_POINTS: usize = 8192;

/// Numeric fields a sweep may vary.
pub const SWEEPABLE_KEYS: &[&str] = &[
    "length",
    "hbar",
    "mass",
    "p0",
    "q0",
    "sigma",
    "t",
    "d",
    "n_points",
    "rel_threshold",
    "weight_cutoff",
];

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("{key}: expected a number, got {value:?}")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    // Accept the float spellings a sweep produces ("2048" or "2048.0").
    if let Ok(v) = value.parse::<usize>() {
        return Ok(v);
    }
    if let Ok(f) = value.parse::<f64>() {
        if f >= 0.0 && f.fract() == 0.0 && f <= usize::MAX as f64 {
            return Ok(f as usize);
        }
    }
    Err(Error::Config(format!(
        "{key}: expected a non-negative integer, got {value:?}"
    )))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!(
            "{key}: expected true/false, got {value:?}"
        ))),
    }
}

impl SimConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "length" => self.length = parse_f64(key, value)?,
            "hbar" => self.hbar = parse_f64(key, value)?,
            "mass" => self.mass = parse_f64(key, value)?,
            "p0" => self.p0 = parse_f64(key, value)?,
            "q0" => self.q0 = parse_f64(key, value)?,
            "sigma" => self.sigma = parse_f64(key, value)?,
            "t" => self.t = parse_f64(key, value)?,
            "d" => self.d = parse_f64(key, value)?,
            "n_points" => self.n_points = parse_usize(key, value)?,
            "rel_threshold" => self.rel_threshold = parse_f64(key, value)?,
            "weight_cutoff" => self.weight_cutoff = parse_f64(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "dump_top_k" => self.dump_top_k = parse_usize(key, value)?,
            "no_decoherence" => self.no_decoherence = parse_bool(key, value)?,
            "reversal_check" => self.reversal_check = parse_bool(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Field-by-field invariant check; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("length", self.length),
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("p0", self.p0),
            ("sigma", self.sigma),
            ("d", self.d),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.t.is_finite() {
            return Err(Error::Config(format!("t must be finite, got {}", self.t)));
        }
        if !self.q0.is_finite() || self.q0 <= 0.0 || self.q0 >= self.length {
            return Err(Error::Config(format!(
                "q0 must lie strictly inside (0, length), got {}",
                self.q0
            )));
        }
        if self.n_points < crate::lattice::MIN_POINTS {
            return Err(Error::Config(format!(
                "n_points must be at least {}, got {}",
                crate::lattice::MIN_POINTS,
                self.n_points
            )));
        }
        if self.n_points > MAX_POINTS {
            return Err(Error::Config(format!(
                "n_points must be at most {MAX_POINTS}, got {} \
                 (each dense N x N complex matrix needs 16 N^2 bytes: \
                 ~1 GiB at N = {MAX_POINTS}, and the pipeline holds two)",
                self.n_points
            )));
        }
        if !self.rel_threshold.is_finite() || self.rel_threshold <= 0.0 || self.rel_threshold >= 1.0
        {
            return Err(Error::Config(format!(
                "rel_threshold must be in (0, 1), got {}",
                self.rel_threshold
            )));
        }
        if !self.weight_cutoff.is_finite() || self.weight_cutoff <= 0.0 || self.weight_cutoff > 1.0
        {
            return Err(Error::Config(format!(
                "weight_cutoff must be in (0, 1], got {}",
                self.weight_cutoff
            )));
        }
        Ok(())
    }

    pub fn physical_params(&self) -> crate::lattice::PhysicalParams {
        crate::lattice::PhysicalParams {
            hbar: self.hbar,
            mass: self.mass,
            p0: self.p0,
            q0: self.q0,
            sigma: self.sigma,
        }
    }
}

/// Parses the body of a config file into `cfg`.
pub fn apply_config_text(cfg: &mut SimConfig, text: &str) -> Result<()> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::ConfigParse {
                line: lineno + 1,
                msg: format!("expected key = value, got {line:?}"),
            });
        };
        cfg.set(key.trim(), value.trim())
            .map_err(|e| Error::ConfigParse {
                line: lineno + 1,
                msg: e.to_string(),
            })?;
    }
    Ok(())
}

/// Builds the effective configuration: built-in defaults, then the file (if
/// given), then the command-line overrides, then validation.
pub fn load_config(path: Option<&Path>, overrides: &[(String, String)]) -> Result<SimConfig> {
    let mut cfg = SimConfig::default();
    if let Some(p) = path {
        let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
        apply_config_text(&mut cfg, &text)?;
    }
    for (key, value) in overrides {
        cfg.set(key, value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}
