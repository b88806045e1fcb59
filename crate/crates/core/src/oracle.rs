//! Dense statevector reference simulator for small circuits.
//!
//! Every gate matrix here is built from its textbook definition, so the
//! results are independent of the closed forms used by [`crate::propagation`].

use num_complex::Complex64;

use crate::circuit::{Circuit, CliffordKind, Gate, GateKind, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::propagation::{ProductState, PtMatrix};
use crate::scalar::Scalar;
use crate::stats::compensated_sum;

/// Largest qubit count the oracle accepts.
pub const ORACLE_MAX_QUBITS: usize = 14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Amplitudes over `2^n` basis states; qubit `q` is bit `q` of the index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Pure product state with the given Bloch vectors.
    pub fn from_product_state(rho: &ProductState) -> Result<Self> {
        let n = rho.n_qubits();
        check_cap(n)?;
        if !rho.is_pure() {
            return Err(Error::InvalidState("the oracle needs a pure product state".into()));
        }
        let mut amps = vec![ONE];
        for q in 0..n {
            let [x, y, z] = rho.bloch(q);
            let a = ((1.0 + z) / 2.0).max(0.0).sqrt();
            let b = if a > 1e-12 {
                Complex64::new(x, y) / (2.0 * a)
            } else {
                ONE
            };
            // new qubit is the most significant bit so far
            let mut next = Vec::with_capacity(amps.len() * 2);
            next.extend(amps.iter().map(|v| v * a));
            next.extend(amps.iter().map(|v| v * b));
            amps = next;
        }
        Ok(StateVector { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        compensated_sum(self.amps.iter().map(|a| a.norm_sqr())).sqrt()
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        if let Some(&q) = gate.support().iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                n_qubits: self.n_qubits,
            });
        }
        let u = gate_matrix(gate);
        match gate.support() {
            [q] => self.apply_1q(*q, &u),
            [a, b] => self.apply_2q(*a, *b, &u),
            _ => unreachable!("gates act on one or two qubits"),
        }
        Ok(())
    }

    fn apply_1q(&mut self, q: usize, u: &UnitaryMatrix) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (v0, v1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = u.get(0, 0) * v0 + u.get(0, 1) * v1;
                self.amps[i | bit] = u.get(1, 0) * v0 + u.get(1, 1) * v1;
            }
        }
    }

    /// Local basis index is `2·bit(a) + bit(b)`.
    fn apply_2q(&mut self, a: usize, b: usize, u: &UnitaryMatrix) {
        let (ba, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & (ba | bb) != 0 {
                continue;
            }
            let idx = [i, i | bb, i | ba, i | ba | bb];
            let v = idx.map(|j| self.amps[j]);
            for (r, &j) in idx.iter().enumerate() {
                self.amps[j] = (0..4).map(|c| u.get(r, c) * v[c]).sum();
            }
        }
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch {
                expected: self.n_qubits,
                found: circuit.n_qubits(),
            });
        }
        for gate in circuit.gates() {
            self.apply_gate(gate)?;
        }
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩`, using `P|b⟩ = i^{|x∧z|} (−1)^{|b∧z|} |b ⊕ x⟩`.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch {
                expected: self.n_qubits,
                found: p.n_qubits(),
            });
        }
        let (mut x, mut z) = (0usize, 0usize);
        for q in 0..self.n_qubits {
            let (px, pz) = p.get(q).bits();
            x |= (px as usize) << q;
            z |= (pz as usize) << q;
        }
        let lead = [ONE, I, -ONE, -I][((x & z).count_ones() % 4) as usize];
        let value: Complex64 = (0..self.amps.len())
            .map(|b| {
                let sign = if (b & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                self.amps[b ^ x].conj() * self.amps[b] * sign
            })
            .sum::<Complex64>()
            * lead;
        Ok(value.re)
    }

    pub fn expectation<T: Scalar>(&self, o: &PauliSum<T>) -> Result<f64> {
        let values = o
            .sorted_terms()
            .into_iter()
            .map(|(p, c)| Ok(c.to_f64_lossy() * self.pauli_expectation(p)?))
            .collect::<Result<Vec<f64>>>()?;
        Ok(compensated_sum(values))
    }
}

fn check_cap(n: usize) -> Result<()> {
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::OracleCap {
            n_qubits: n,
            cap: ORACLE_MAX_QUBITS,
        });
    }
    Ok(())
}

/// Exact `Tr[U ρ U† O]` by forward statevector simulation.
pub fn statevector_expectation<T: Scalar>(circuit: &Circuit, o: &PauliSum<T>, rho: &ProductState) -> Result<f64> {
    check_cap(circuit.n_qubits())?;
    if o.n_qubits() != circuit.n_qubits() || rho.n_qubits() != circuit.n_qubits() {
        return Err(Error::SizeMismatch {
            expected: circuit.n_qubits(),
            found: if o.n_qubits() != circuit.n_qubits() {
                o.n_qubits()
            } else {
                rho.n_qubits()
            },
        });
    }
    let mut psi = StateVector::from_product_state(rho)?;
    psi.apply_circuit(circuit)?;
    psi.expectation(o)
}

fn pauli_matrix(p: Pauli) -> [Complex64; 4] {
    match p {
        Pauli::I => [ONE, ZERO, ZERO, ONE],
        Pauli::X => [ZERO, ONE, ONE, ZERO],
        Pauli::Y => [ZERO, -I, I, ZERO],
        Pauli::Z => [ONE, ZERO, ZERO, -ONE],
    }
}

fn kron(a: &[Complex64], da: usize, b: &[Complex64], db: usize) -> Vec<Complex64> {
    let d = da * db;
    let mut out = vec![ZERO; d * d];
    for ar in 0..da {
        for ac in 0..da {
            for br in 0..db {
                for bc in 0..db {
                    out[(ar * db + br) * d + ac * db + bc] = a[ar * da + ac] * b[br * db + bc];
                }
            }
        }
    }
    out
}

/// Dense matrix of a local Pauli string, first qubit as the most significant factor.
fn local_pauli_matrix(p: &PauliString) -> Vec<Complex64> {
    let mut out = vec![ONE];
    let mut d = 1;
    for q in 0..p.n_qubits() {
        out = kron(&out, d, &pauli_matrix(p.get(q)), 2);
        d *= 2;
    }
    out
}

fn matmul(a: &[Complex64], b: &[Complex64], d: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; d * d];
    for r in 0..d {
        for c in 0..d {
            out[r * d + c] = (0..d).map(|k| a[r * d + k] * b[k * d + c]).sum();
        }
    }
    out
}

fn adjoint(a: &[Complex64], d: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; d * d];
    for r in 0..d {
        for c in 0..d {
            out[c * d + r] = a[r * d + c].conj();
        }
    }
    out
}

fn clifford_matrix(kind: CliffordKind) -> UnitaryMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r = |v: f64| Complex64::new(v, 0.0);
    let data = match kind {
        CliffordKind::H => vec![r(s), r(s), r(s), r(-s)],
        CliffordKind::S => vec![ONE, ZERO, ZERO, I],
        CliffordKind::X => pauli_matrix(Pauli::X).to_vec(),
        CliffordKind::Y => pauli_matrix(Pauli::Y).to_vec(),
        CliffordKind::Z => pauli_matrix(Pauli::Z).to_vec(),
        CliffordKind::Cnot => permutation(&[0, 1, 3, 2]),
        CliffordKind::Swap => permutation(&[0, 2, 1, 3]),
        CliffordKind::Cz => {
            let mut m = permutation(&[0, 1, 2, 3]);
            m[15] = -ONE;
            m
        }
    };
    UnitaryMatrix::new(if kind.arity() == 1 { 2 } else { 4 }, data).expect("textbook Clifford")
}

/// `|c⟩ → |perm[c]⟩`.
fn permutation(perm: &[usize]) -> Vec<Complex64> {
    let d = perm.len();
    let mut m = vec![ZERO; d * d];
    for (c, &r) in perm.iter().enumerate() {
        m[r * d + c] = ONE;
    }
    m
}

/// `cos(θ/2)·1 − i sin(θ/2)·G`.
fn rotation_matrix(generator: &PauliString, angle: f64) -> UnitaryMatrix {
    let g = local_pauli_matrix(generator);
    let d = 1 << generator.n_qubits();
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let data = (0..d * d)
        .map(|i| {
            let id = if i / d == i % d { c } else { 0.0 };
            Complex64::new(id, 0.0) - I * s * g[i]
        })
        .collect();
    UnitaryMatrix::new(d, data).expect("rotations are unitary")
}

/// The matrix of `gate` in its local basis.
pub fn gate_matrix(gate: &Gate) -> UnitaryMatrix {
    match gate.kind() {
        GateKind::Clifford(kind) => clifford_matrix(*kind),
        GateKind::Rotation { generator, angle } => rotation_matrix(generator, *angle),
        GateKind::Unitary(u) => u.clone(),
    }
}

/// Transfer matrix of `gate` by dense evaluation of `Tr[U† Q U P] / 2^m`.
pub fn ptm_reference(gate: &Gate) -> PtMatrix<f64> {
    let u = gate_matrix(gate);
    let m = gate.arity();
    let d = u.dim();
    let paulis: Vec<Vec<Complex64>> = (0..d * d)
        .map(|i| local_pauli_matrix(&PauliString::from_local_index(m, i)))
        .collect();
    let ud = adjoint(u.data(), d);
    let mut data = vec![0.0; d * d * d * d];
    for (qi, q) in paulis.iter().enumerate() {
        let conj = matmul(&matmul(&ud, q, d), u.data(), d);
        for (pi, p) in paulis.iter().enumerate() {
            let prod = matmul(&conj, p, d);
            let tr: Complex64 = (0..d).map(|i| prod[i * d + i]).sum();
            data[qi * d * d + pi] = tr.re / d as f64;
        }
    }
    PtMatrix::from_dense(m, data).expect("square PTM")
}
