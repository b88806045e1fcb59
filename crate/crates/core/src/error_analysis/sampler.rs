use rand::Rng;
use rayon::prelude::*;

use super::bounds::mse_bound;
use super::transfer::{build_transfer, SecondMomentTransfer};
use crate::circuit::EnsembleSpec;
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};
use crate::propagation::ProductState;
use crate::rng::stream_rng;
use crate::stats::mean_and_stderr;

/// Samples per generator stream.
const SAMPLE_CHUNK: usize = 4096;

/// Sample mean of a non-negative error quantity with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MseEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    /// Analytic upper bound for the quantity.
    pub bound: f64,
}

impl MseEstimate {
    /// `mean ≤ bound + sigmas · stderr`.
    pub fn within_bound(&self, sigmas: f64) -> bool {
        self.mean <= self.bound + sigmas * self.stderr
    }
}

/// One Pauli path drawn from the second-moment distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSample {
    /// `P_L`, drawn with probability `a_P² / Σ a²`.
    pub terminal: PauliString,
    /// `P_L, …, P_0` when retained.
    pub path: Option<Vec<PauliString>>,
    /// Some `P_j`, `1 ≤ j ≤ L`, has weight above the cutoff.
    pub truncated: bool,
    /// `Σ a² · Tr[P_0 ρ]² · 1[truncated]`.
    pub value: f64,
}

struct TerminalSampler {
    terms: Vec<PauliString>,
    cumulative: Vec<f64>,
    l2: f64,
}

impl TerminalSampler {
    fn new(o: &PauliSum<f64>) -> Result<Self> {
        let mut terms = Vec::with_capacity(o.len());
        let mut cumulative = Vec::with_capacity(o.len());
        let mut acc = 0.0;
        for (p, c) in o.sorted_terms() {
            acc += c * c;
            terms.push(p.clone());
            cumulative.push(acc);
        }
        if acc <= 0.0 {
            return Err(Error::InvalidArgument(
                "path sampling needs a non-zero observable".into(),
            ));
        }
        Ok(TerminalSampler {
            terms,
            cumulative,
            l2: acc,
        })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> &PauliString {
        let u = rng.random::<f64>() * self.l2;
        let i = self.cumulative.partition_point(|&c| c <= u);
        &self.terms[i.min(self.terms.len() - 1)]
    }
}

/// Walks `p = P_L` down to `P_0`; returns whether some `P_j` (`j ≥ 1`) exceeds weight `k`.
fn walk<R: Rng + ?Sized>(
    transfer: &SecondMomentTransfer,
    p: &mut PauliString,
    k: usize,
    rng: &mut R,
    mut path: Option<&mut Vec<PauliString>>,
) -> bool {
    let mut truncated = false;
    for j in (1..=transfer.depth()).rev() {
        truncated |= p.weight() > k;
        transfer.step(j, p, rng);
        if let Some(path) = path.as_deref_mut() {
            path.push(p.clone());
        }
    }
    truncated
}

fn check_sizes(transfer: &SecondMomentTransfer, o: &PauliSum<f64>, rho: &ProductState) -> Result<()> {
    let n = transfer.n_qubits();
    for found in [o.n_qubits(), rho.n_qubits()] {
        if found != n {
            return Err(Error::SizeMismatch { expected: n, found });
        }
    }
    Ok(())
}

/// Draws a single path, optionally keeping every intermediate Pauli.
pub fn sample_path<R: Rng + ?Sized>(
    transfer: &SecondMomentTransfer,
    o: &PauliSum<f64>,
    rho: &ProductState,
    k: usize,
    keep_path: bool,
    rng: &mut R,
) -> Result<PathSample> {
    check_sizes(transfer, o, rho)?;
    let sampler = TerminalSampler::new(o)?;
    let terminal = sampler.draw(rng).clone();
    let mut p = terminal.clone();
    let mut path = keep_path.then(|| vec![terminal.clone()]);
    let truncated = walk(transfer, &mut p, k, rng, path.as_mut());
    let value = if truncated {
        sampler.l2 * rho.trace_unchecked(&p).powi(2)
    } else {
        0.0
    };
    Ok(PathSample {
        terminal,
        path,
        truncated,
        value,
    })
}

/// Mean of `Σa² · Tr[P_0 ρ]² · flag(P_L, truncated)` over `samples` paths.
///
/// Chunk `c` of the samples draws from stream `c` of `seed`, so the result
/// depends only on `(seed, samples)`.
fn path_mean<F>(
    transfer: &SecondMomentTransfer,
    o: &PauliSum<f64>,
    rho: &ProductState,
    k: usize,
    samples: usize,
    seed: u64,
    flag: F,
) -> Result<(f64, f64, f64)>
where
    F: Fn(&PauliString, bool) -> bool + Sync,
{
    check_sizes(transfer, o, rho)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let sampler = TerminalSampler::new(o)?;
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    let values: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let count = SAMPLE_CHUNK.min(samples - c * SAMPLE_CHUNK);
            (0..count)
                .map(|_| {
                    let terminal = sampler.draw(&mut rng);
                    let mut p = terminal.clone();
                    let truncated = walk(transfer, &mut p, k, &mut rng, None);
                    if flag(terminal, truncated) {
                        sampler.l2 * rho.trace_unchecked(&p).powi(2)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let flat: Vec<f64> = values.concat();
    let (mean, stderr) = mean_and_stderr(&flat);
    Ok((mean, stderr, sampler.l2))
}

/// Monte Carlo estimate of the mean-squared truncation error at cutoff `k`
/// using an already built transfer.
pub fn mc_mse_with_transfer(
    transfer: &SecondMomentTransfer,
    o: &PauliSum<f64>,
    rho: &ProductState,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<MseEstimate> {
    let (mean, stderr, l2) = path_mean(transfer, o, rho, k, samples, seed, |_, truncated| truncated)?;
    Ok(MseEstimate {
        mean,
        stderr,
        samples,
        bound: mse_bound(k, l2),
    })
}

/// Monte Carlo estimate of `E_U (f_U − f̃_U^{(k)})²` by Pauli-path sampling.
pub fn mc_mse_estimate(
    spec: &EnsembleSpec,
    o: &PauliSum<f64>,
    rho: &ProductState,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<MseEstimate> {
    mc_mse_with_transfer(&build_transfer(spec)?, o, rho, k, samples, seed)
}

/// Monte Carlo estimate of `E_U f_U² − a_I²`, the trivial estimator's error.
///
/// This is `Var_U f_U` whenever every non-identity Pauli averages to zero
/// over the ensemble (true for the Haar and uniform-angle families built here
/// whenever every qubit is acted on). The bound field holds `Σ_{P≠I} a_P²`.
pub fn mc_trivial_variance(
    spec: &EnsembleSpec,
    o: &PauliSum<f64>,
    rho: &ProductState,
    samples: usize,
    seed: u64,
) -> Result<MseEstimate> {
    let transfer = build_transfer(spec)?;
    let n = transfer.n_qubits();
    let (mean, stderr, l2) = path_mean(&transfer, o, rho, n, samples, seed, |terminal, _| {
        !terminal.is_identity()
    })?;
    Ok(MseEstimate {
        mean,
        stderr,
        samples,
        bound: l2 - o.identity_coefficient().powi(2),
    })
}
