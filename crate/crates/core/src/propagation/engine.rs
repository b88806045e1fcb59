use std::time::Instant;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::packed::{Packed, PauliKey};
use super::ptm::{gate_ptm, PtMatrix};
use super::state::ProductState;
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};
use crate::scalar::Scalar;

/// Groups per work unit. Fixed, so the output order does not depend on how
/// many threads the pool happens to have.
const CHUNK: usize = 1024;

/// What survives each propagation step.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationPolicy {
    /// Terms of weight above `weight_k` are discarded.
    pub weight_k: usize,
    /// Terms with `|a_P| < coeff_eps` are discarded; `0` disables.
    pub coeff_eps: f64,
    /// Abort with [`Error::BudgetExceeded`] when a step leaves more terms; `None` or `0` disables.
    pub max_terms: Option<usize>,
    /// Truncate after every gate instead of after every layer.
    pub per_gate: bool,
}

impl TruncationPolicy {
    pub fn weight(k: usize) -> Self {
        TruncationPolicy {
            weight_k: k,
            coeff_eps: 0.0,
            max_terms: None,
            per_gate: false,
        }
    }

    /// No truncation for an `n`-qubit problem.
    pub fn exact(n_qubits: usize) -> Self {
        TruncationPolicy::weight(n_qubits)
    }

    pub fn with_coeff_eps(mut self, eps: f64) -> Self {
        self.coeff_eps = eps;
        self
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = (max_terms > 0).then_some(max_terms);
        self
    }

    pub fn with_per_gate(mut self, per_gate: bool) -> Self {
        self.per_gate = per_gate;
        self
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.weight_k > n_qubits {
            return Err(Error::InvalidArgument(format!(
                "weight cutoff {} exceeds the qubit count {n_qubits}",
                self.weight_k
            )));
        }
        if !(self.coeff_eps >= 0.0 && self.coeff_eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid coeff_eps {}", self.coeff_eps)));
        }
        Ok(())
    }

    fn budget(&self) -> Option<usize> {
        self.max_terms.filter(|&m| m > 0)
    }
}

/// Bookkeeping for one processed layer.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerStats {
    /// 1-based position of the layer in the circuit.
    pub layer: usize,
    pub terms_before: usize,
    pub terms_after: usize,
    /// `Σ a_P²` over the terms discarded after this layer.
    pub mass_truncated: f64,
    pub millis: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct PropagationStats {
    /// One entry per layer, in processing order (last circuit layer first).
    pub layers: Vec<LayerStats>,
    /// Mass removed when truncating the input observable.
    pub initial_truncated_mass: f64,
    /// Largest number of simultaneously stored terms.
    pub peak_terms: usize,
    pub total_millis: f64,
}

impl PropagationStats {
    pub fn total_truncated_mass(&self) -> f64 {
        self.initial_truncated_mass + self.layers.iter().map(|l| l.mass_truncated).sum::<f64>()
    }
}

#[derive(Clone, Debug)]
pub struct PropagationResult<T: Scalar> {
    /// The truncated Heisenberg-evolved observable.
    pub observable: PauliSum<T>,
    pub stats: PropagationStats,
}

/// Maps terms through `ptm` on `support`.
///
/// Terms are grouped by their factors off the support; each group is one
/// vector over the local Paulis and maps by a single matrix-vector product,
/// so outputs of different groups never collide. Inputs must act
/// non-trivially on the support; outputs then do too.
fn transform<K: PauliKey, T: Scalar>(terms: Vec<(K, T)>, support: &[usize], ptm: &PtMatrix<T>) -> Vec<(K, T)> {
    let dim = ptm.dim();
    let mut index: FxHashMap<K, usize> = FxHashMap::with_capacity_and_hasher(terms.len(), Default::default());
    let mut rests: Vec<K> = Vec::new();
    let mut vectors: Vec<T> = Vec::new();
    for (mut p, c) in terms {
        let q = p.local_index(support);
        p.set_local(support, 0);
        let g = *index.entry(p).or_insert_with_key(|rest| {
            rests.push(rest.clone());
            vectors.resize(vectors.len() + dim, T::zero());
            rests.len() - 1
        });
        vectors[g * dim + q] += c;
    }
    drop(index);
    let tol = T::drop_tolerance();
    let map_groups = |(rests, vectors): (&[K], &[T])| {
        let mut out = Vec::with_capacity(rests.len() * (dim - 1));
        let mut acc = [T::zero(); 16];
        for (rest, v) in rests.iter().zip(vectors.chunks_exact(dim)) {
            acc[..dim].fill(T::zero());
            for (q, &a) in v.iter().enumerate().skip(1) {
                if a != T::zero() {
                    for &(col, t) in ptm.row(q) {
                        acc[col] += a * t;
                    }
                }
            }
            for (col, &c) in acc[..dim].iter().enumerate().skip(1) {
                if c.abs() >= tol {
                    let mut p = rest.clone();
                    p.set_local(support, col);
                    out.push((p, c));
                }
            }
        }
        out
    };
    if rests.len() > CHUNK {
        rests
            .par_chunks(CHUNK)
            .zip(vectors.par_chunks(CHUNK * dim))
            .map(map_groups)
            .collect::<Vec<_>>()
            .concat()
    } else {
        map_groups((&rests, &vectors))
    }
}

type Terms<K, T> = Vec<(K, T)>;

/// Applies `gate` to the terms of `work` it touches. Returns `(outputs, untouched)`.
fn apply_to_vec<K: PauliKey, T: Scalar>(
    work: Vec<(K, T)>,
    gate: &Gate,
    ptm: &PtMatrix<T>,
    n_qubits: usize,
) -> (Terms<K, T>, Terms<K, T>) {
    let mask = K::mask(n_qubits, gate.support());
    let (touched, rest): (Vec<_>, Vec<_>) = work.into_iter().partition(|(p, _)| p.overlaps(&mask));
    (transform(touched, gate.support(), ptm), rest)
}

fn to_keys<K: PauliKey, T: Scalar>(s: &PauliSum<T>) -> FxHashMap<K, T> {
    let mut out = FxHashMap::with_capacity_and_hasher(s.len(), Default::default());
    for (p, &c) in s.iter() {
        out.insert(K::from_pauli(p), c);
    }
    out
}

fn from_keys<K: PauliKey, T: Scalar>(n_qubits: usize, map: FxHashMap<K, T>) -> PauliSum<T> {
    let mut out = PauliSum::with_capacity(n_qubits, map.len());
    for (k, c) in map {
        out.insert_fresh(k.to_pauli(n_qubits), c);
    }
    out
}

fn check_gate<T: Scalar>(n: usize, gate: &Gate, ptm: &PtMatrix<T>) -> Result<()> {
    if let Some(&q) = gate.support().iter().find(|&&q| q >= n) {
        return Err(Error::QubitOutOfRange { qubit: q, n_qubits: n });
    }
    if ptm.support_size() != gate.arity() {
        return Err(Error::SizeMismatch {
            expected: gate.arity(),
            found: ptm.support_size(),
        });
    }
    Ok(())
}

/// `U† S U` for a single gate, with no truncation.
pub fn apply_gate_adjoint<T: Scalar>(s: &PauliSum<T>, gate: &Gate, ptm: &PtMatrix<T>) -> Result<PauliSum<T>> {
    let n = s.n_qubits();
    check_gate(n, gate, ptm)?;
    let mask = PauliString::mask(n, gate.support());
    let mut out = s.clone();
    let touched = out.extract_if(|p, _| p.overlaps(&mask));
    for (p, c) in transform(touched, gate.support(), ptm) {
        out.insert_fresh(p, c);
    }
    Ok(out)
}

/// Heisenberg back-propagation with truncation.
///
/// The input observable is truncated first; after each layer `L, …, 2` the
/// terms that layer touched are truncated again. The first circuit layer is
/// applied without truncation, as is everything when the circuit is empty.
pub fn back_propagate<T: Scalar>(
    observable: &PauliSum<T>,
    circuit: &Circuit,
    policy: &TruncationPolicy,
) -> Result<PropagationResult<T>> {
    let n = circuit.n_qubits();
    if observable.n_qubits() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: observable.n_qubits(),
        });
    }
    policy.validate(n)?;
    match n.div_ceil(64) {
        0 | 1 => run::<Packed<1>, T>(observable, circuit, policy),
        2 => run::<Packed<2>, T>(observable, circuit, policy),
        3 | 4 => run::<Packed<4>, T>(observable, circuit, policy),
        5..=8 => run::<Packed<8>, T>(observable, circuit, policy),
        _ => run::<PauliString, T>(observable, circuit, policy),
    }
}

fn run<K: PauliKey, T: Scalar>(
    observable: &PauliSum<T>,
    circuit: &Circuit,
    policy: &TruncationPolicy,
) -> Result<PropagationResult<T>> {
    let n = circuit.n_qubits();
    let start = Instant::now();
    let depth = circuit.depth();
    let mut stats = PropagationStats::default();
    let mut current: FxHashMap<K, T> = to_keys(observable);
    stats.peak_terms = current.len();
    let keeps = |p: &K, c: T| p.weight() <= policy.weight_k && c.abs().to_f64_lossy() >= policy.coeff_eps;

    if depth > 0 {
        let dropped: Vec<(K, T)> = current.extract_if(|p, c| !keeps(p, *c)).collect();
        stats.initial_truncated_mass = dropped.iter().map(|(_, c)| c.to_f64_lossy().powi(2)).sum();
        check_budget(policy, depth, current.len())?;
    }

    for j in (1..=depth).rev() {
        let layer_start = Instant::now();
        let layer = &circuit.layers()[j - 1];
        let truncate = j > 1;
        let terms_before = current.len();
        let mut mass = 0.0f64;

        let qubits: Vec<usize> = layer.qubits().collect();
        let layer_mask = K::mask(n, &qubits);
        let mut work: Vec<(K, T)> = current.extract_if(|p, _| p.overlaps(&layer_mask)).collect();
        for gate in layer.gates() {
            let ptm = gate_ptm::<T>(gate)?;
            let (outputs, mut rest) = apply_to_vec(work, gate, &ptm, n);
            if truncate && policy.per_gate {
                for (p, c) in outputs {
                    if keeps(&p, c) {
                        rest.push((p, c));
                    } else {
                        mass += c.to_f64_lossy().powi(2);
                    }
                }
            } else {
                rest.extend(outputs);
            }
            work = rest;
            stats.peak_terms = stats.peak_terms.max(current.len() + work.len());
        }
        for (p, c) in work {
            if truncate && !keeps(&p, c) {
                mass += c.to_f64_lossy().powi(2);
            } else {
                current.insert(p, c);
            }
        }
        check_budget(policy, j, current.len())?;
        stats.layers.push(LayerStats {
            layer: j,
            terms_before,
            terms_after: current.len(),
            mass_truncated: mass,
            millis: layer_start.elapsed().as_secs_f64() * 1e3,
        });
    }
    stats.total_millis = start.elapsed().as_secs_f64() * 1e3;
    Ok(PropagationResult {
        observable: from_keys(n, current),
        stats,
    })
}

fn check_budget(policy: &TruncationPolicy, layer: usize, terms: usize) -> Result<()> {
    match policy.budget() {
        Some(max_terms) if terms > max_terms => Err(Error::BudgetExceeded {
            layer,
            terms,
            max_terms,
        }),
        _ => Ok(()),
    }
}

/// `f̃ = Tr[ρ O^{(k)}]` for the truncated back-propagated observable.
pub fn estimate_expectation<T: Scalar>(
    observable: &PauliSum<T>,
    circuit: &Circuit,
    policy: &TruncationPolicy,
    rho: &ProductState,
) -> Result<T> {
    if rho.n_qubits() != circuit.n_qubits() {
        return Err(Error::SizeMismatch {
            expected: circuit.n_qubits(),
            found: rho.n_qubits(),
        });
    }
    back_propagate(observable, circuit, policy)?.observable.expectation(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_staircase_2d, sample_circuit, EnsembleSpec, Layer};
    use crate::rng::stream_rng;

    type Sum = PauliSum<f64>;

    fn lit(s: &str, n: usize) -> Sum {
        Sum::parse_literal(s, n).unwrap()
    }

    fn single_layer(n: usize, gates: Vec<Gate>) -> Circuit {
        let mut c = Circuit::new(n);
        c.push_layer(Layer::new(gates).unwrap()).unwrap();
        c
    }

    #[test]
    fn gate_adjoint_examples() {
        let g = Gate::cnot(0, 1);
        let out = apply_gate_adjoint(&lit("Z0", 2), &g, &gate_ptm(&g).unwrap()).unwrap();
        assert_eq!(out, lit("Z0", 2));

        let theta: f64 = 0.3;
        let g = Gate::rz(0, theta);
        let out = apply_gate_adjoint(&lit("X0", 1), &g, &gate_ptm(&g).unwrap()).unwrap();
        assert!((out.get(&"X".parse().unwrap()) - theta.cos()).abs() < 1e-15);
        assert!((out.get(&"Y".parse().unwrap()) + theta.sin()).abs() < 1e-15);

        let g = Gate::cnot(1, 2);
        let out = apply_gate_adjoint(&lit("X0", 3), &g, &gate_ptm(&g).unwrap()).unwrap();
        assert_eq!(out, lit("X0", 3));

        let g = Gate::cnot(3, 4);
        assert!(apply_gate_adjoint(&lit("X0", 3), &g, &gate_ptm(&g).unwrap()).is_err());
    }

    #[test]
    fn empty_circuit_and_k0() {
        let o = lit("0.5*Z0*Z1 + X2", 3);
        let r = back_propagate(&o, &Circuit::new(3), &TruncationPolicy::weight(0)).unwrap();
        assert_eq!(r.observable, o);
        assert!(r.stats.layers.is_empty());

        let c = single_layer(3, vec![Gate::h(0)]);
        let r = back_propagate(&o, &c, &TruncationPolicy::weight(0)).unwrap();
        assert!(r.observable.is_empty());
    }

    #[test]
    fn expectation_examples() {
        let rho = ProductState::zero_state(1);
        let o = lit("Z0", 1);
        assert_eq!(
            estimate_expectation(&o, &Circuit::new(1), &TruncationPolicy::weight(1), &rho).unwrap(),
            1.0
        );
        let c = single_layer(1, vec![Gate::h(0)]);
        assert!(
            estimate_expectation(&o, &c, &TruncationPolicy::weight(1), &rho)
                .unwrap()
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn final_layer_is_not_truncated() {
        // Z0 through CNOT(1,0) gives Z0 Z1; with k = 1 that must survive the first layer.
        let c = single_layer(2, vec![Gate::cnot(1, 0)]);
        let r = back_propagate(&lit("Z0", 2), &c, &TruncationPolicy::weight(1)).unwrap();
        assert_eq!(r.observable, lit("Z0*Z1", 2));

        let mut c2 = Circuit::new(2);
        c2.push_layer(Layer::new(vec![Gate::h(0)]).unwrap()).unwrap();
        c2.push_layer(Layer::new(vec![Gate::cnot(1, 0)]).unwrap()).unwrap();
        let r = back_propagate(&lit("Z0", 2), &c2, &TruncationPolicy::weight(1)).unwrap();
        assert!(r.observable.is_empty());
        assert_eq!(r.stats.layers[0].layer, 2);
        assert_eq!(r.stats.layers[0].mass_truncated, 1.0);
    }

    #[test]
    fn staircase_light_cone_becomes_global() {
        let spec = EnsembleSpec::haar(build_staircase_2d(2, 2, 1).unwrap(), 1);
        let c = sample_circuit(&spec, &mut stream_rng(11, 0)).unwrap();
        let r = back_propagate(&lit("Z0", 4), &c, &TruncationPolicy::weight(4)).unwrap();
        assert_eq!(r.observable.max_weight(), 4);
        assert!((r.observable.l2_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn telescoping_mass_and_budget() {
        let spec = EnsembleSpec::haar(build_staircase_2d(3, 3, 1).unwrap(), 2);
        let c = sample_circuit(&spec, &mut stream_rng(5, 0)).unwrap();
        let o = lit("Z0 + 0.5*X1*X2*X3", 9);
        for per_gate in [false, true] {
            let policy = TruncationPolicy::weight(2).with_per_gate(per_gate);
            let r = back_propagate(&o, &c, &policy).unwrap();
            assert_eq!(r.stats.layers.len(), c.depth());
            assert!(r.stats.initial_truncated_mass == 0.25);
            let total = r.observable.l2_mass() + r.stats.total_truncated_mass();
            assert!((total - o.l2_mass()).abs() < 1e-10);
        }
        let err = back_propagate(&o, &c, &TruncationPolicy::weight(9).with_max_terms(20)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert!(back_propagate(&o, &c, &TruncationPolicy::weight(10)).is_err());
    }
}
