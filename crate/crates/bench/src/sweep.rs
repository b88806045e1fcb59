use std::time::Instant;

use pauliprop::error_analysis::{mse_from_trials, sample_trials_with, trivial_from_trials, TrialRecord};
use pauliprop::rng::derive_seed;
use pauliprop::{
    back_propagate, mc_mse_estimate, mc_trivial_variance, mse_bound, sample_indexed_circuit, Circuit, EnsembleSpec,
    Error, TruncationPolicy, ORACLE_MAX_QUBITS,
};
use rayon::prelude::*;

use crate::config::{Estimator, Experiment};
use crate::output::{Cell, Provenance, Table};

pub const SWEEP_COLUMNS: [&str; 10] = [
    "depth",
    "k",
    "estimator",
    "status",
    "mse_mean",
    "mse_stderr",
    "bound",
    "var_trivial",
    "runtime_ms",
    "peak_terms",
];

const TAG_CIRCUIT: u64 = 1;
const TAG_TRIALS: u64 = 2;
const TAG_TRIVIAL: u64 = 3;
const TAG_MC: u64 = 4;

/// Seed for one purpose at one `(depth, k)` cell.
pub(crate) fn cell_seed(master: u64, depth: usize, k: usize, tag: u64) -> u64 {
    derive_seed(derive_seed(derive_seed(master, depth as u64), k as u64), tag)
}

/// The circuit used for timing and weight histograms at `depth`.
pub(crate) fn reference_circuit(exp: &Experiment, depth: usize) -> pauliprop::Result<Circuit> {
    if depth == 0 {
        return Ok(Circuit::new(exp.n_qubits));
    }
    let spec = exp.ensemble(depth)?;
    sample_indexed_circuit(&spec, cell_seed(exp.config.seed, depth, 0, TAG_CIRCUIT), 0)
}

pub(crate) fn policy(exp: &Experiment, k: usize) -> TruncationPolicy {
    let mut p = TruncationPolicy::weight(k).with_coeff_eps(exp.config.coeff_eps);
    if let Some(m) = exp.config.max_terms {
        p = p.with_max_terms(m);
    }
    p
}

/// One failed cell, for the caller's report.
#[derive(Clone, Debug, PartialEq)]
pub struct CellFailure {
    pub depth: usize,
    pub k: Option<usize>,
    pub estimator: &'static str,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub table: Table,
    pub failures: Vec<CellFailure>,
    pub provenance: Provenance,
}

impl SweepOutcome {
    pub fn success(&self) -> bool {
        self.failures.is_empty()
    }
}

fn status_of(e: &Error) -> &'static str {
    match e {
        Error::BudgetExceeded { .. } => "budget_exceeded",
        _ => "error",
    }
}

#[derive(Clone, Debug, Default)]
struct Measured {
    mean: Option<f64>,
    stderr: Option<f64>,
    status: Option<&'static str>,
}

struct DepthResult {
    rows: Vec<Vec<Cell>>,
    failures: Vec<CellFailure>,
}

/// Runs every configured estimator for every `(depth, k)` cell.
///
/// Depths run in parallel; rows come back in configuration order, so the
/// output depends only on the configuration (and on wall-clock time through
/// `runtime_ms` when timings are recorded).
pub fn run_sweep(exp: &Experiment) -> SweepOutcome {
    let results: Vec<DepthResult> = exp.config.depths.par_iter().map(|&d| run_depth(exp, d)).collect();
    let mut table = Table::new(SWEEP_COLUMNS.to_vec());
    let mut failures = Vec::new();
    for r in results {
        for row in r.rows {
            table.push(row);
        }
        failures.extend(r.failures);
    }
    SweepOutcome {
        table,
        failures,
        provenance: Provenance {
            config_hash: exp.config_hash.clone(),
            seed: exp.config.seed,
        },
    }
}

fn run_depth(exp: &Experiment, depth: usize) -> DepthResult {
    let c = &exp.config;
    let ks = &c.k;
    let est = &exp.estimators;
    let mut failures = Vec::new();
    let mut fail = |k: Option<usize>, estimator: Estimator, e: &Error| {
        failures.push(CellFailure {
            depth,
            k,
            estimator: estimator.name(),
            message: e.to_string(),
        });
        status_of(e)
    };
    let spec: Option<EnsembleSpec> = if depth == 0 {
        None
    } else {
        match exp.ensemble(depth) {
            Ok(s) => Some(s),
            Err(e) => {
                let status = fail(None, Estimator::Propagate, &e);
                let rows = ks.iter().map(|&k| failed_row(depth, k, "all", status)).collect();
                return DepthResult { rows, failures };
            }
        }
    };

    let mut trials: Option<Result<Vec<TrialRecord>, Error>> = None;
    if let (Some(spec), true) = (&spec, est.contains(&Estimator::EmpiricalMse)) {
        let policies: Vec<TruncationPolicy> = ks.iter().map(|&k| policy(exp, k)).collect();
        let seed = cell_seed(c.seed, depth, 0, TAG_TRIALS);
        let r = sample_trials_with(spec, &exp.observable, &exp.state, &policies, c.trials, seed);
        if let Err(e) = &r {
            fail(None, Estimator::EmpiricalMse, e);
        }
        trials = Some(r);
    }

    let mu = exp.observable.identity_coefficient();
    let oracle_trivial = exp.n_qubits <= ORACLE_MAX_QUBITS || !exp.path_sampling_supported();
    let var_trivial: Measured = match (&spec, est.contains(&Estimator::Trivial)) {
        (_, false) => Measured::default(),
        (None, true) => Measured {
            mean: Some(0.0),
            ..Default::default()
        },
        (Some(spec), true) => {
            let variance = match &trials {
                Some(Ok(records)) => Ok(trivial_from_trials(records, mu).variance),
                _ if oracle_trivial => {
                    // exact values only; no truncation policy can fail here
                    let seed = cell_seed(c.seed, depth, 0, TAG_TRIALS);
                    sample_trials_with(spec, &exp.observable, &exp.state, &[], c.trials, seed)
                        .map(|records| trivial_from_trials(&records, mu).variance)
                }
                _ => mc_trivial_variance(
                    spec,
                    &exp.observable,
                    &exp.state,
                    c.samples,
                    cell_seed(c.seed, depth, 0, TAG_TRIVIAL),
                )
                .map(|m| m.mean),
            };
            match variance {
                Ok(v) => Measured {
                    mean: Some(v),
                    ..Default::default()
                },
                Err(e) => Measured {
                    status: Some(fail(None, Estimator::Trivial, &e)),
                    ..Default::default()
                },
            }
        }
    };

    let l2 = exp.observable.l2_mass();
    let mut rows = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        let bound = est.contains(&Estimator::Bound).then(|| mse_bound(k, l2));
        let (mut runtime, mut peak, mut prop_status) = (None, None, None);
        if est.contains(&Estimator::Propagate) {
            match reference_circuit(exp, depth) {
                Ok(circuit) => {
                    let start = Instant::now();
                    match back_propagate(&exp.observable, &circuit, &policy(exp, k)) {
                        Ok(r) => {
                            runtime = c.record_timings.then(|| start.elapsed().as_secs_f64() * 1e3);
                            peak = Some(r.stats.peak_terms as u64);
                        }
                        Err(e) => prop_status = Some(fail(Some(k), Estimator::Propagate, &e)),
                    }
                }
                Err(e) => prop_status = Some(fail(Some(k), Estimator::Propagate, &e)),
            }
        }

        let mut measured: Vec<(Estimator, Measured)> = Vec::new();
        if est.contains(&Estimator::McMse) {
            let m = match &spec {
                None => Ok((0.0, 0.0)),
                Some(spec) => mc_mse_estimate(
                    spec,
                    &exp.observable,
                    &exp.state,
                    k,
                    c.samples,
                    cell_seed(c.seed, depth, k, TAG_MC),
                )
                .map(|m| (m.mean, m.stderr)),
            };
            measured.push((
                Estimator::McMse,
                match m {
                    Ok((mean, stderr)) => Measured {
                        mean: Some(mean),
                        stderr: Some(stderr),
                        status: None,
                    },
                    Err(e) => Measured {
                        status: Some(fail(Some(k), Estimator::McMse, &e)),
                        ..Default::default()
                    },
                },
            ));
        }
        if est.contains(&Estimator::EmpiricalMse) {
            let m = match (&spec, &trials) {
                (None, _) => Measured {
                    mean: Some(0.0),
                    stderr: Some(0.0),
                    status: None,
                },
                (Some(_), Some(Ok(records))) => {
                    let e = mse_from_trials(records, i, mse_bound(k, l2));
                    Measured {
                        mean: Some(e.mean),
                        stderr: Some(e.stderr),
                        status: None,
                    }
                }
                (Some(_), Some(Err(e))) => Measured {
                    status: Some(status_of(e)),
                    ..Default::default()
                },
                (Some(_), None) => unreachable!("oracle trials run whenever empirical_mse is requested"),
            };
            measured.push((Estimator::EmpiricalMse, m));
        }
        if measured.is_empty() {
            let name = if est.contains(&Estimator::Propagate) {
                Estimator::Propagate
            } else {
                Estimator::Trivial
            };
            measured.push((name, Measured::default()));
        }
        for (estimator, m) in measured {
            let status = m.status.or(prop_status).or(var_trivial.status).unwrap_or("ok");
            rows.push(vec![
                Cell::Int(depth as u64),
                Cell::Int(k as u64),
                Cell::Text(estimator.name().into()),
                Cell::Text(status.into()),
                Cell::float(m.mean),
                Cell::float(m.stderr),
                Cell::float(bound),
                Cell::float(var_trivial.mean),
                Cell::float(runtime),
                peak.map_or(Cell::Empty, Cell::Int),
            ]);
        }
    }
    DepthResult { rows, failures }
}

fn failed_row(depth: usize, k: usize, estimator: &str, status: &str) -> Vec<Cell> {
    let mut row = vec![
        Cell::Int(depth as u64),
        Cell::Int(k as u64),
        Cell::Text(estimator.into()),
        Cell::Text(status.into()),
    ];
    row.resize(SWEEP_COLUMNS.len(), Cell::Empty);
    row
}
