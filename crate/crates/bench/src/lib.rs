//! Configuration-driven experiment harness for `pauliprop`.
//!
//! A JSON configuration names a topology, a circuit ensemble, depths,
//! cutoffs, an observable, an input state and the estimators to run. The
//! `sweep` command writes one CSV row per `(depth, k, estimator)`, the
//! `weights` command a weight histogram of the propagated observable per
//! depth, and `validate` runs the oracle self-check suite. Each CSV starts
//! with a `#` line carrying the tool version, the SHA-256 of the
//! configuration bytes and the master seed, and is mirrored as JSON.

pub mod config;
pub mod error;
pub mod output;
pub mod sweep;
pub mod validate;
pub mod weights;

use std::path::{Path, PathBuf};

pub use config::{Estimator, Experiment, ExperimentConfig};
pub use error::BenchError;
pub use output::{Cell, Provenance, Table};
pub use sweep::{run_sweep, CellFailure, SweepOutcome, SWEEP_COLUMNS};
pub use validate::{run_validation, Check, ValidationReport};
pub use weights::{run_weights, WeightsOutcome, WEIGHT_COLUMNS};

/// Environment variable naming the default output directory.
pub const OUTPUT_ENV: &str = "PAULIPROP_OUT";

/// Output directory: the explicit flag, then [`OUTPUT_ENV`], then the
/// configuration's `output_dir` (relative to the configuration file), then `results`.
pub fn output_dir(flag: Option<&Path>, env: Option<&str>, exp: &Experiment) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(e) = env.filter(|e| !e.is_empty()) {
        return PathBuf::from(e);
    }
    match &exp.config.output_dir {
        Some(p) => exp.base_dir.join(p),
        None => PathBuf::from("results"),
    }
}
