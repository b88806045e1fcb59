use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::scalar::Scalar;
use crate::stats::compensated_sum;

const BLOCH_TOLERANCE: f64 = 1e-12;

/// Product state given by per-qubit Bloch vectors `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    bloch: Vec<[f64; 3]>,
}

impl ProductState {
    pub fn new(bloch: Vec<[f64; 3]>) -> Result<Self> {
        for (q, v) in bloch.iter().enumerate() {
            let norm_sq: f64 = v.iter().map(|c| c * c).sum();
            if !norm_sq.is_finite() || norm_sq.sqrt() > 1.0 + BLOCH_TOLERANCE {
                return Err(Error::InvalidState(format!(
                    "qubit {q}: Bloch vector {v:?} lies outside the unit ball"
                )));
            }
        }
        Ok(ProductState { bloch })
    }

    /// `|0…0⟩`.
    pub fn zero_state(n_qubits: usize) -> Self {
        ProductState {
            bloch: vec![[0.0, 0.0, 1.0]; n_qubits],
        }
    }

    /// `|+…+⟩`.
    pub fn plus_state(n_qubits: usize) -> Self {
        ProductState {
            bloch: vec![[1.0, 0.0, 0.0]; n_qubits],
        }
    }

    /// Computational basis state; `bits[q]` is the value of qubit `q`.
    pub fn basis_state(bits: &[bool]) -> Self {
        ProductState {
            bloch: bits.iter().map(|&b| [0.0, 0.0, if b { -1.0 } else { 1.0 }]).collect(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.bloch.len()
    }

    pub fn bloch(&self, qubit: usize) -> [f64; 3] {
        self.bloch[qubit]
    }

    /// True when every Bloch vector has unit length.
    pub fn is_pure(&self) -> bool {
        self.bloch
            .iter()
            .all(|v| (v.iter().map(|c| c * c).sum::<f64>().sqrt() - 1.0).abs() <= 1e-10)
    }

    /// `Tr[P ρ]` without the size check.
    pub(crate) fn trace_unchecked(&self, p: &PauliString) -> f64 {
        let mut value = 1.0;
        for (w, (&x, &z)) in p.x_words().iter().zip(p.z_words()).enumerate() {
            let mut bits = x | z;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                let q = w * 64 + b;
                let component = match Pauli::from_bits((x >> b) & 1 == 1, (z >> b) & 1 == 1) {
                    Pauli::X => 0,
                    Pauli::Y => 1,
                    _ => 2,
                };
                value *= self.bloch[q][component];
                if value == 0.0 {
                    return 0.0;
                }
                bits &= bits - 1;
            }
        }
        value
    }
}

/// `Tr[P ρ]`: the product of the Bloch components selected by `P`.
pub fn product_state_trace(p: &PauliString, rho: &ProductState) -> Result<f64> {
    if p.n_qubits() != rho.n_qubits() {
        return Err(Error::SizeMismatch {
            expected: rho.n_qubits(),
            found: p.n_qubits(),
        });
    }
    Ok(rho.trace_unchecked(p))
}

impl<T: Scalar> PauliSum<T> {
    /// `Tr[O ρ] = Σ a_P Tr[P ρ]`.
    pub fn expectation(&self, rho: &ProductState) -> Result<T> {
        if self.n_qubits() != rho.n_qubits() {
            return Err(Error::SizeMismatch {
                expected: rho.n_qubits(),
                found: self.n_qubits(),
            });
        }
        let value = compensated_sum(
            self.sorted_terms()
                .into_iter()
                .map(|(p, c)| c.to_f64_lossy() * rho.trace_unchecked(p)),
        );
        Ok(T::from_f64_lossy(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(s: &str, rho: &ProductState) -> f64 {
        product_state_trace(&PauliString::parse_with_qubits(s, rho.n_qubits()).unwrap(), rho).unwrap()
    }

    #[test]
    fn zero_state_traces() {
        let rho = ProductState::zero_state(3);
        assert_eq!(trace("Z0", &rho), 1.0);
        assert_eq!(trace("X0", &rho), 0.0);
        assert_eq!(trace("Z0*Z1", &rho), 1.0);
        assert_eq!(trace("I", &rho), 1.0);
        assert_eq!(trace("Z0*Y2", &rho), 0.0);
    }

    #[test]
    fn general_bloch_vectors() {
        let rho = ProductState::new(vec![[0.6, 0.0, 0.8], [0.0, -1.0, 0.0]]).unwrap();
        assert!((trace("X0*Y1", &rho) + 0.6).abs() < 1e-15);
        assert!((trace("Z0", &rho) - 0.8).abs() < 1e-15);
        assert!(rho.is_pure());
        assert!(ProductState::new(vec![[0.9, 0.9, 0.0]]).is_err());
        assert!(!ProductState::new(vec![[0.5, 0.0, 0.0]]).unwrap().is_pure());
        let basis = ProductState::basis_state(&[false, true]);
        assert_eq!(trace("Z0*Z1", &basis), -1.0);
    }

    #[test]
    fn sum_expectation() {
        let o = PauliSum::<f64>::parse_literal("0.5 + 2*Z0 + -1*X1", 2).unwrap();
        assert_eq!(o.expectation(&ProductState::zero_state(2)).unwrap(), 2.5);
        assert_eq!(o.expectation(&ProductState::plus_state(2)).unwrap(), -0.5);
        assert!(o.expectation(&ProductState::zero_state(3)).is_err());
    }
}
