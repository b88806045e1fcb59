use pauliprop::back_propagate;
use rayon::prelude::*;

use crate::config::Experiment;
use crate::output::{Cell, Provenance, Table};
use crate::sweep::{policy, reference_circuit, CellFailure};

pub const WEIGHT_COLUMNS: [&str; 4] = ["depth", "weight", "term_count", "l2_mass"];

#[derive(Clone, Debug)]
pub struct WeightsOutcome {
    pub table: Table,
    /// Squared-coefficient mass of the whole propagated observable, per depth.
    pub totals: Vec<(usize, f64)>,
    pub failures: Vec<CellFailure>,
    pub provenance: Provenance,
}

/// Weight histogram of the propagated observable at every configured depth,
/// on the same reference circuits as the sweep's `propagate` estimator.
pub fn run_weights(exp: &Experiment) -> WeightsOutcome {
    let k = exp.weights_k();
    let per_depth: Vec<_> = exp
        .config
        .depths
        .par_iter()
        .map(|&depth| {
            reference_circuit(exp, depth)
                .and_then(|c| back_propagate(&exp.observable, &c, &policy(exp, k)))
                .map(|r| (depth, r.observable))
                .map_err(|e| CellFailure {
                    depth,
                    k: Some(k),
                    estimator: "weights",
                    message: e.to_string(),
                })
        })
        .collect();
    let mut table = Table::new(WEIGHT_COLUMNS.to_vec());
    let mut totals = Vec::new();
    let mut failures = Vec::new();
    for r in per_depth {
        match r {
            Ok((depth, o)) => {
                for (w, bin) in o.weight_histogram() {
                    table.push(vec![
                        Cell::Int(depth as u64),
                        Cell::Int(w as u64),
                        Cell::Int(bin.term_count as u64),
                        Cell::Float(bin.l2_mass),
                    ]);
                }
                totals.push((depth, o.l2_mass()));
            }
            Err(f) => failures.push(f),
        }
    }
    WeightsOutcome {
        table,
        totals,
        failures,
        provenance: Provenance {
            config_hash: exp.config_hash.clone(),
            seed: exp.config.seed,
        },
    }
}
