use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::scalar::Scalar;

/// `(2/3)^(k+1) · ‖O‖²`: the mean-squared truncation error bound over a
/// locally scrambling ensemble.
pub fn mse_bound(k: usize, op_norm_sq: f64) -> f64 {
    (2.0f64 / 3.0).powi(k as i32 + 1) * op_norm_sq
}

/// `(1/5)(2/5)^L · Σ_{|P|=1} a_P²`.
pub fn weight1_variance_brickwork<T: Scalar>(depth: usize, o: &PauliSum<T>) -> f64 {
    let weight1: f64 = o
        .sorted_terms()
        .into_iter()
        .filter(|(p, _)| p.weight() == 1)
        .map(|(_, c)| c.to_f64_lossy().powi(2))
        .sum();
    0.2 * 0.4f64.powi(depth as i32) * weight1
}

/// Number of `n`-qubit Paulis of weight at most `k`, with its closed-form upper bound.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliCount {
    pub n: usize,
    pub k: usize,
    /// `Σ_{ℓ≤k} 3^ℓ C(n, ℓ)`.
    pub exact: BigUint,
    /// `(3en/k)^k`, `1` at `k = 0`.
    pub bound: f64,
}

impl PauliCount {
    /// Decides `exact ≤ (3en/k)^k` in integer arithmetic.
    ///
    /// Uses `e > 2.718281828`: `exact · k^k · 10^(9k) ≤ (3n · 2718281828)^k`
    /// implies the claim.
    pub fn bound_holds(&self) -> bool {
        if self.k == 0 {
            return self.exact <= BigUint::one();
        }
        let k = self.k as u32;
        let lhs = &self.exact * BigUint::from(self.k).pow(k) * BigUint::from(10u32).pow(9 * k);
        let rhs = (BigUint::from(3 * self.n) * BigUint::from(2_718_281_828u64)).pow(k);
        lhs <= rhs
    }

    pub fn exact_f64(&self) -> f64 {
        self.exact.to_f64().unwrap_or(f64::INFINITY)
    }
}

pub fn pauli_count(n: usize, k: usize) -> Result<PauliCount> {
    if n == 0 {
        return Err(Error::InvalidArgument("pauli_count needs n ≥ 1".into()));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    let mut exact = BigUint::zero();
    let mut binom = BigUint::one();
    let mut pow3 = BigUint::one();
    for l in 0..=k {
        if l > 0 {
            binom = binom * BigUint::from(n - l + 1) / BigUint::from(l);
            pow3 *= 3u32;
        }
        exact += &binom * &pow3;
    }
    let bound = if k == 0 {
        1.0
    } else {
        (3.0 * std::f64::consts::E * n as f64 / k as f64).powi(k as i32)
    };
    Ok(PauliCount { n, k, exact, bound })
}

/// Samples `M ≥ ln(2/δ) / (2ε²)` for a Hoeffding interval of half-width `ε`
/// (in units of the sample range) at confidence `1 − δ`.
pub fn chernoff_samples(eps: f64, delta: f64) -> Result<usize> {
    if !(eps > 0.0 && delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need ε > 0 and 0 < δ < 1, got {eps}, {delta}"
        )));
    }
    Ok(((2.0 / delta).ln() / (2.0 * eps * eps)).ceil() as usize)
}

/// Smallest `k` with `P(|f − f̃| > ε) ≤ δ` by Markov's inequality on the
/// `(2/3)^(k+1)` bound (unit observable norm).
pub fn markov_k(eps: f64, delta: f64) -> Result<usize> {
    if !(eps > 0.0 && delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need ε > 0 and δ > 0, got {eps}, {delta}"
        )));
    }
    let k = ((2.0 / (3.0 * eps * eps * delta)).ln() / 1.5f64.ln()).ceil();
    Ok(k.max(0.0) as usize)
}
