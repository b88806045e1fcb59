use rayon::prelude::*;

use super::bounds::mse_bound;
use super::sampler::MseEstimate;
use crate::circuit::{sample_indexed_circuit, EnsembleSpec};
use crate::error::{Error, Result};
use crate::oracle::{statevector_expectation, ORACLE_MAX_QUBITS};
use crate::pauli::PauliSum;
use crate::propagation::{estimate_expectation, ProductState, TruncationPolicy};
use crate::stats::{mean_and_stderr, sample_variance};

/// Exact and truncated expectation values of one sampled circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub exact: f64,
    /// One entry per requested cutoff, in request order.
    pub truncated: Vec<f64>,
}

/// Oracle and propagation values on `trials` circuits of `spec`, one
/// weight cutoff per entry of `ks`.
///
/// Circuit `i` is drawn from stream `i` of `seed`; every cutoff sees the
/// same circuits.
pub fn sample_trials(
    spec: &EnsembleSpec,
    o: &PauliSum<f64>,
    rho: &ProductState,
    ks: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    let policies: Vec<TruncationPolicy> = ks.iter().map(|&k| TruncationPolicy::weight(k)).collect();
    sample_trials_with(spec, o, rho, &policies, trials, seed)
}

/// As [`sample_trials`] with arbitrary truncation policies.
pub fn sample_trials_with(
    spec: &EnsembleSpec,
    o: &PauliSum<f64>,
    rho: &ProductState,
    policies: &[TruncationPolicy],
    trials: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    let n = spec.n_qubits();
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::OracleCap {
            n_qubits: n,
            cap: ORACLE_MAX_QUBITS,
        });
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let circuit = sample_indexed_circuit(spec, seed, i as u64)?;
            let exact = statevector_expectation(&circuit, o, rho)?;
            let truncated = policies
                .iter()
                .map(|policy| estimate_expectation(o, &circuit, policy, rho))
                .collect::<Result<Vec<f64>>>()?;
            Ok(TrialRecord { exact, truncated })
        })
        .collect()
}

/// Mean of `(f − f̃)²` for cutoff position `index` of the records.
pub fn mse_from_trials(records: &[TrialRecord], index: usize, bound: f64) -> MseEstimate {
    let sq: Vec<f64> = records.iter().map(|r| (r.exact - r.truncated[index]).powi(2)).collect();
    let (mean, stderr) = mean_and_stderr(&sq);
    MseEstimate {
        mean,
        stderr,
        samples: records.len(),
        bound,
    }
}

/// Oracle-based mean-squared error of cutoff `k` over sampled circuits.
pub fn empirical_mse(
    spec: &EnsembleSpec,
    o: &PauliSum<f64>,
    rho: &ProductState,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<MseEstimate> {
    let records = sample_trials(spec, o, rho, &[k], trials, seed)?;
    Ok(mse_from_trials(&records, 0, mse_bound(k, o.l2_mass())))
}

/// The estimator that always answers `μ = Tr[O]/2ⁿ`, and its error `Var_U f_U`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrivialStats {
    pub mu: f64,
    /// Unbiased sample variance of the exact values.
    pub variance: f64,
    pub trials: usize,
}

pub fn trivial_from_trials(records: &[TrialRecord], mu: f64) -> TrivialStats {
    let exact: Vec<f64> = records.iter().map(|r| r.exact).collect();
    TrivialStats {
        mu,
        variance: sample_variance(&exact),
        trials: records.len(),
    }
}

pub fn trivial_estimator_stats(
    spec: &EnsembleSpec,
    o: &PauliSum<f64>,
    rho: &ProductState,
    trials: usize,
    seed: u64,
) -> Result<TrivialStats> {
    let records = sample_trials(spec, o, rho, &[], trials, seed)?;
    Ok(trivial_from_trials(&records, o.identity_coefficient()))
}

/// Empirical check of `E(f − f̃)² = E(f − μ)² − E(f̃ − μ)²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarianceGap {
    pub mse: f64,
    pub var_exact: f64,
    pub var_truncated: f64,
    /// Mean of `D = (f − f̃)² − (f − μ)² + (f̃ − μ)²`.
    pub residual: f64,
    /// Standard error of `D`.
    pub sigma: f64,
}

pub fn variance_gap(records: &[TrialRecord], index: usize, mu: f64) -> VarianceGap {
    let mut sq = Vec::with_capacity(records.len());
    let mut ve = Vec::with_capacity(records.len());
    let mut vt = Vec::with_capacity(records.len());
    let mut d = Vec::with_capacity(records.len());
    for r in records {
        let (f, ft) = (r.exact, r.truncated[index]);
        let a = (f - ft).powi(2);
        let b = (f - mu).powi(2);
        let c = (ft - mu).powi(2);
        sq.push(a);
        ve.push(b);
        vt.push(c);
        d.push(a - b + c);
    }
    let (residual, sigma) = mean_and_stderr(&d);
    VarianceGap {
        mse: mean_and_stderr(&sq).0,
        var_exact: mean_and_stderr(&ve).0,
        var_truncated: mean_and_stderr(&vt).0,
        residual,
        sigma,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_brickwork_1d, build_staircase_2d, Layering, Topology};

    fn z0(n: usize) -> PauliSum<f64> {
        PauliSum::parse_literal("Z0", n).unwrap()
    }

    #[test]
    fn exact_cutoff_has_no_error() {
        let spec = EnsembleSpec::haar(build_staircase_2d(2, 3, 1).unwrap(), 2);
        let est = empirical_mse(&spec, &z0(6), &ProductState::zero_state(6), 6, 20, 4).unwrap();
        assert!(est.mean <= 1e-18);
    }

    #[test]
    fn trivial_stats_basics() {
        let spec = EnsembleSpec::haar(build_brickwork_1d(4, 2).unwrap(), 1);
        let o = PauliSum::parse_literal("0.5 + Z0", 4).unwrap();
        let s = trivial_estimator_stats(&spec, &o, &ProductState::zero_state(4), 50, 1).unwrap();
        assert_eq!(s.mu, 0.5);
        assert!(s.variance > 0.0);

        // a layering with no slots that touch the observable keeps f ≡ 1
        let top = Topology::new(4, vec![(2, 3)], "far").unwrap();
        let spec = EnsembleSpec::haar(Layering::sequential(top), 1);
        let s = trivial_estimator_stats(&spec, &z0(4), &ProductState::zero_state(4), 10, 1).unwrap();
        assert!(s.variance.abs() < 1e-24);
    }

    #[test]
    fn gap_identity_holds_per_sample_in_expectation() {
        let spec = EnsembleSpec::haar(build_brickwork_1d(6, 4).unwrap(), 1);
        let rho = ProductState::zero_state(6);
        let records = sample_trials(&spec, &z0(6), &rho, &[1, 2], 300, 8).unwrap();
        for i in 0..2 {
            let g = variance_gap(&records, i, 0.0);
            assert!(g.residual.abs() <= 4.0 * g.sigma + 1e-12, "{g:?}");
            assert!(g.var_exact >= g.mse - 4.0 * g.sigma);
        }
    }

    #[test]
    fn oracle_cap_and_trials() {
        let spec = EnsembleSpec::haar(build_brickwork_1d(15, 1).unwrap(), 1);
        assert!(matches!(
            empirical_mse(&spec, &z0(15), &ProductState::zero_state(15), 1, 1, 0),
            Err(Error::OracleCap { .. })
        ));
        let spec = EnsembleSpec::haar(build_brickwork_1d(4, 1).unwrap(), 1);
        assert!(empirical_mse(&spec, &z0(4), &ProductState::zero_state(4), 1, 0, 0).is_err());
    }
}
