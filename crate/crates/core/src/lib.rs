//! Low-weight Pauli propagation.
//!
//! Expectation values `Tr[U ρ U† O]` of layered circuits are estimated by
//! back-propagating `O` through the circuit in the (unnormalized) Pauli basis,
//! discarding every Pauli term whose weight exceeds a cutoff `k` after each
//! layer. The crate also ships the tools needed to certify the resulting error:
//!
//! - [`pauli`]: bit-mask Pauli strings and sparse real Pauli sums.
//! - [`circuit`]: gates, layers, topologies and random circuit ensembles.
//! - [`propagation`]: Pauli transfer matrices and the truncated Heisenberg engine.
//! - [`oracle`]: a brute-force statevector reference for small circuits.
//! - [`error_analysis`]: the `(2/3)^(k+1)` mean-squared-error bound, Monte Carlo
//!   Pauli-path sampling of the error, and oracle-based empirical estimators.
//!
//! Coefficient arithmetic is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the common `f64` instantiation.
//!
//! ```
//! use pauliprop::{back_propagate, Circuit, Gate, Layer, PauliSumF64, ProductState, TruncationPolicy};
//!
//! let obs = PauliSumF64::parse_literal("Z0", 2).unwrap();
//! let mut circuit = Circuit::new(2);
//! circuit.push_layer(Layer::new(vec![Gate::h(0)]).unwrap()).unwrap();
//! circuit.push_layer(Layer::new(vec![Gate::cnot(0, 1)]).unwrap()).unwrap();
//!
//! let result = back_propagate(&obs, &circuit, &TruncationPolicy::weight(2)).unwrap();
//! let value = result.observable.expectation(&ProductState::zero_state(2)).unwrap();
//! assert!(value.abs() < 1e-12);
//! ```

pub mod circuit;
pub mod error;
pub mod error_analysis;
pub mod oracle;
pub mod pauli;
pub mod propagation;
pub mod rng;
pub mod scalar;
pub mod stats;

pub use circuit::{
    build_brickwork_1d, build_staircase_2d, load_topology_edges, sample_circuit, sample_haar_su4,
    sample_indexed_circuit, AngleCorrelation, AngleDistribution, Circuit, CliffordKind, EnsembleSpec, Gate, GateFamily,
    GateKind, Layer, Layering, RotationPattern, Topology, TopologySource, UnitaryMatrix,
};
pub use error::{Error, Result};
pub use error_analysis::{
    build_transfer, chernoff_samples, empirical_mse, markov_k, mc_mse_estimate, mc_trivial_variance, mse_bound,
    pauli_count, trivial_estimator_stats, weight1_variance_brickwork, MseEstimate, PauliCount, SecondMomentTransfer,
};
pub use oracle::{ptm_reference, statevector_expectation, StateVector, ORACLE_MAX_QUBITS};
pub use pauli::{Pauli, PauliPhase, PauliString, PauliSum};
pub use propagation::{
    apply_gate_adjoint, back_propagate, estimate_expectation, gate_ptm, product_state_trace, LayerStats, ProductState,
    PropagationResult, PropagationStats, PtMatrix, TruncationPolicy,
};
pub use scalar::Scalar;

/// Pauli sum with `f64` coefficients.
pub type PauliSumF64 = PauliSum<f64>;
/// Pauli sum with `f32` coefficients.
pub type PauliSumF32 = PauliSum<f32>;
/// Pauli transfer matrix with `f64` entries.
pub type PtMatrixF64 = PtMatrix<f64>;
/// Propagation result with `f64` coefficients.
pub type PropagationResultF64 = PropagationResult<f64>;
