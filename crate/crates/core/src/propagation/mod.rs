//! Pauli transfer matrices and truncated Heisenberg back-propagation.

mod engine;
mod packed;
mod ptm;
mod state;

pub use engine::{
    apply_gate_adjoint, back_propagate, estimate_expectation, LayerStats, PropagationResult, PropagationStats,
    TruncationPolicy,
};
pub use ptm::{gate_ptm, PtMatrix};
pub use state::{product_state_trace, ProductState};
