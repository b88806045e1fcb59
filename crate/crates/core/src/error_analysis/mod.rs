//! Truncation-error analysis: the analytic bound, Pauli-path Monte Carlo,
//! oracle-based empirical estimators and counting helpers.
//!
//! The path sampler draws `P_L` with probability `a_P²/Σa²` and walks it
//! through each layer's second-moment transfer `E_U T[Q][P]²`. For locally
//! scrambling ensembles distinct paths are uncorrelated, so the mean of
//! `Σa² · Tr[P_0 ρ]² · 1[some P_j, j ≥ 1, exceeds weight k]` is the
//! mean-squared error of the weight-`k` estimator.

mod bounds;
mod empirical;
mod sampler;
mod transfer;

pub use bounds::{chernoff_samples, markov_k, mse_bound, pauli_count, weight1_variance_brickwork, PauliCount};
pub use empirical::{
    empirical_mse, mse_from_trials, sample_trials, sample_trials_with, trivial_estimator_stats, trivial_from_trials,
    variance_gap, TrialRecord, TrivialStats, VarianceGap,
};
pub use sampler::{mc_mse_estimate, mc_mse_with_transfer, mc_trivial_variance, sample_path, MseEstimate, PathSample};
pub use transfer::{build_transfer, SecondMomentTransfer, SlotTransfer};
