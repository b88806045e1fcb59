//! Pauli strings as paired X/Z bit masks, and sparse real Pauli sums.

mod string;
mod sum;

pub use string::{Pauli, PauliPhase, PauliString};
pub use sum::{PauliSum, WeightBin};

use crate::error::Result;

pub fn pauli_weight(p: &PauliString) -> usize {
    p.weight()
}

pub fn pauli_commutes(p: &PauliString, q: &PauliString) -> Result<bool> {
    p.commutes(q)
}

pub fn pauli_multiply(p: &PauliString, q: &PauliString) -> Result<(PauliString, PauliPhase)> {
    p.multiply(q)
}
