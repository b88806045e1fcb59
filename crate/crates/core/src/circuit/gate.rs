use std::fmt;

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

pub type Support = SmallVec<[usize; 2]>;

const UNITARITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CliffordKind {
    H,
    S,
    X,
    Y,
    Z,
    Cnot,
    Cz,
    Swap,
}

impl CliffordKind {
    pub fn arity(self) -> usize {
        match self {
            CliffordKind::Cnot | CliffordKind::Cz | CliffordKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CliffordKind::H => "H",
            CliffordKind::S => "S",
            CliffordKind::X => "X",
            CliffordKind::Y => "Y",
            CliffordKind::Z => "Z",
            CliffordKind::Cnot => "CNOT",
            CliffordKind::Cz => "CZ",
            CliffordKind::Swap => "SWAP",
        }
    }

    pub fn from_name(name: &str) -> Option<CliffordKind> {
        Some(match name.to_ascii_uppercase().as_str() {
            "H" => CliffordKind::H,
            "S" => CliffordKind::S,
            "X" => CliffordKind::X,
            "Y" => CliffordKind::Y,
            "Z" => CliffordKind::Z,
            "CNOT" | "CX" => CliffordKind::Cnot,
            "CZ" => CliffordKind::Cz,
            "SWAP" => CliffordKind::Swap,
            _ => return None,
        })
    }

    pub const ALL: [CliffordKind; 8] = [
        CliffordKind::H,
        CliffordKind::S,
        CliffordKind::X,
        CliffordKind::Y,
        CliffordKind::Z,
        CliffordKind::Cnot,
        CliffordKind::Cz,
        CliffordKind::Swap,
    ];
}

/// Dense complex unitary of dimension 2 or 4, row-major.
///
/// For two-qubit gates the basis index is `2·b0 + b1`, where `b0` is the bit of
/// the first support qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl UnitaryMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::InvalidGate(format!("unitary dimension {dim} not in {{2, 4}}")));
        }
        if data.len() != dim * dim {
            return Err(Error::InvalidGate(format!(
                "expected {} matrix entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        let m = UnitaryMatrix { dim, data };
        let dev = m.unitarity_deviation();
        if dev.is_nan() || dev >= UNITARITY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(m)
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        UnitaryMatrix { dim, data }
    }

    pub(crate) fn from_raw(dim: usize, data: Vec<Complex64>) -> Self {
        UnitaryMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        if self.dim == 2 {
            1
        } else {
            2
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// `max |U†U - I|` over all entries.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..d {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                if i == j {
                    acc -= 1.0;
                }
                let dev = acc.norm();
                if dev.is_nan() {
                    return f64::INFINITY;
                }
                worst = worst.max(dev);
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    Clifford(CliffordKind),
    /// `exp(-i·angle·G/2)` with `G` given on the gate support (local qubit `i` is `support[i]`).
    Rotation {
        generator: PauliString,
        angle: f64,
    },
    Unitary(UnitaryMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    support: Support,
    kind: GateKind,
}

impl Gate {
    pub fn new(support: &[usize], kind: GateKind) -> Result<Gate> {
        if support.is_empty() || support.len() > 2 {
            return Err(Error::InvalidGate(format!(
                "support must hold 1 or 2 qubits, got {}",
                support.len()
            )));
        }
        if support.len() == 2 && support[0] == support[1] {
            return Err(Error::InvalidGate(format!("repeated qubit {}", support[0])));
        }
        let arity = match &kind {
            GateKind::Clifford(c) => c.arity(),
            GateKind::Rotation { generator, angle } => {
                if generator.is_identity() {
                    return Err(Error::InvalidGate("rotation generator is the identity".into()));
                }
                if !angle.is_finite() {
                    return Err(Error::InvalidGate(format!("non-finite angle {angle}")));
                }
                generator.n_qubits()
            }
            GateKind::Unitary(u) => u.n_qubits(),
        };
        if arity != support.len() {
            return Err(Error::InvalidGate(format!(
                "gate acts on {arity} qubits but support has {}",
                support.len()
            )));
        }
        Ok(Gate {
            support: Support::from_slice(support),
            kind,
        })
    }

    pub fn clifford(kind: CliffordKind, support: &[usize]) -> Result<Gate> {
        Gate::new(support, GateKind::Clifford(kind))
    }

    pub fn h(q: usize) -> Gate {
        Gate::clifford(CliffordKind::H, &[q]).expect("valid H")
    }

    pub fn s(q: usize) -> Gate {
        Gate::clifford(CliffordKind::S, &[q]).expect("valid S")
    }

    /// Panics if `control == target`.
    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::clifford(CliffordKind::Cnot, &[control, target]).expect("distinct CNOT qubits")
    }

    /// Panics if `a == b`.
    pub fn cz(a: usize, b: usize) -> Gate {
        Gate::clifford(CliffordKind::Cz, &[a, b]).expect("distinct CZ qubits")
    }

    pub fn rotation(support: &[usize], generator: &str, angle: f64) -> Result<Gate> {
        let generator: PauliString = generator.parse()?;
        Gate::new(support, GateKind::Rotation { generator, angle })
    }

    pub fn rx(q: usize, angle: f64) -> Gate {
        Gate::rotation(&[q], "X", angle).expect("valid RX")
    }

    pub fn ry(q: usize, angle: f64) -> Gate {
        Gate::rotation(&[q], "Y", angle).expect("valid RY")
    }

    pub fn rz(q: usize, angle: f64) -> Gate {
        Gate::rotation(&[q], "Z", angle).expect("valid RZ")
    }

    pub fn rzz(a: usize, b: usize, angle: f64) -> Result<Gate> {
        Gate::rotation(&[a, b], "ZZ", angle)
    }

    pub fn unitary(support: &[usize], matrix: UnitaryMatrix) -> Result<Gate> {
        Gate::new(support, GateKind::Unitary(matrix))
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn arity(&self) -> usize {
        self.support.len()
    }

    pub fn is_clifford(&self) -> bool {
        matches!(self.kind, GateKind::Clifford(_))
    }
}

impl fmt::Display for Gate {
    /// One line of the circuit text format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qubits = self.support.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
        match &self.kind {
            GateKind::Clifford(c) => write!(f, "clifford {} {}", c.name(), qubits),
            GateKind::Rotation { generator, angle } => {
                write!(f, "rotation {} {} angle={:?}", generator, qubits, angle)
            }
            GateKind::Unitary(u) => {
                let entries = u
                    .data()
                    .iter()
                    .map(|z| format!("{:?},{:?}", z.re, z.im))
                    .collect::<Vec<_>>()
                    .join(";");
                write!(f, "unitary {} matrix={}", qubits, entries)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_validation() {
        assert!(Gate::clifford(CliffordKind::Cnot, &[0]).is_err());
        assert!(Gate::clifford(CliffordKind::H, &[0, 1]).is_err());
        assert!(Gate::clifford(CliffordKind::Cz, &[2, 2]).is_err());
        assert!(Gate::rotation(&[0], "I", 0.3).is_err());
        assert!(Gate::rotation(&[0, 1], "Z", 0.3).is_err());
        assert!(Gate::rotation(&[0], "Z", f64::NAN).is_err());
        assert!(Gate::new(&[], GateKind::Clifford(CliffordKind::H)).is_err());
        assert!(Gate::unitary(&[0], UnitaryMatrix::identity(4)).is_err());
        assert!(Gate::unitary(&[0, 1], UnitaryMatrix::identity(4)).is_ok());
    }

    #[test]
    fn non_unitary_rejected() {
        let mut data = UnitaryMatrix::identity(2).data().to_vec();
        data[0] = Complex64::new(1.1, 0.0);
        assert!(matches!(UnitaryMatrix::new(2, data), Err(Error::NotUnitary(_))));
        assert!(UnitaryMatrix::new(3, vec![Complex64::new(1.0, 0.0); 9]).is_err());
        assert!(UnitaryMatrix::new(2, vec![Complex64::new(f64::NAN, 0.0); 4]).is_err());
    }
}
