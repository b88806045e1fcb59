use num_complex::Complex64;

use crate::circuit::{CliffordKind, Gate, GateKind, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::pauli::{PauliPhase, PauliString};
use crate::scalar::Scalar;

/// Pauli transfer matrix of a 1- or 2-qubit gate.
///
/// `T[Q][P] = Tr[U† Q U P] / 2^m` over local Paulis enumerated `I,X,Y,Z`
/// lexicographically, the first support qubit being the most significant
/// digit. Row `Q` is therefore the expansion of `U† Q U`.
#[derive(Clone, Debug, PartialEq)]
pub struct PtMatrix<T: Scalar> {
    m: usize,
    data: Vec<T>,
    /// Non-zero entries of every row, in column order.
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> PtMatrix<T> {
    /// Builds from a dense row-major `4^m × 4^m` array.
    pub fn from_dense(m: usize, data: Vec<T>) -> Result<Self> {
        if !(1..=2).contains(&m) {
            return Err(Error::InvalidArgument(format!("PTM support size {m} not in 1..=2")));
        }
        let dim = 1 << (2 * m);
        if data.len() != dim * dim {
            return Err(Error::SizeMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        let cutoff = T::from_f64_lossy(1e-15);
        let rows = (0..dim)
            .map(|r| {
                (0..dim)
                    .filter_map(|c| {
                        let v = data[r * dim + c];
                        (v.abs() > cutoff).then_some((c, v))
                    })
                    .collect()
            })
            .collect();
        Ok(PtMatrix { m, data, rows })
    }

    pub fn identity(m: usize) -> Self {
        let dim = 1 << (2 * m);
        let mut data = vec![T::zero(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = T::one();
        }
        PtMatrix::from_dense(m, data).expect("valid identity")
    }

    pub fn support_size(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        1 << (2 * self.m)
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.dim() + col]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// Non-zero `(column, value)` pairs of row `row`.
    pub fn row(&self, row: usize) -> &[(usize, T)] {
        &self.rows[row]
    }

    /// `max |T·Tᵀ − I|`.
    pub fn orthogonality_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let dot: f64 = (0..dim)
                    .map(|k| self.get(i, k).to_f64_lossy() * self.get(j, k).to_f64_lossy())
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Largest entrywise difference; infinite if the shapes differ.
    pub fn max_abs_diff(&self, other: &PtMatrix<T>) -> f64 {
        if self.m != other.m {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.to_f64_lossy() - b.to_f64_lossy()).abs())
            .fold(0.0, f64::max)
    }

    pub fn cast<U: Scalar>(&self) -> PtMatrix<U> {
        PtMatrix::from_dense(
            self.m,
            self.data.iter().map(|v| U::from_f64_lossy(v.to_f64_lossy())).collect(),
        )
        .expect("same shape")
    }
}

/// Transfer matrix of `gate`, closed form for Clifford and rotation kinds.
pub fn gate_ptm<T: Scalar>(gate: &Gate) -> Result<PtMatrix<T>> {
    let m = gate.arity();
    let dim = 1usize << (2 * m);
    let mut data = vec![T::zero(); dim * dim];
    match gate.kind() {
        GateKind::Clifford(kind) => {
            for q in 0..dim {
                let (p, sign) = clifford_image(*kind, q);
                data[q * dim + p] = T::from_f64_lossy(sign);
            }
        }
        GateKind::Rotation { generator, angle } => {
            let (c, s) = (angle.cos(), angle.sin());
            for q in 0..dim {
                let p = PauliString::from_local_index(m, q);
                if p.commutes_unchecked(generator) {
                    data[q * dim + q] = T::one();
                    continue;
                }
                // e^{iθG/2} P e^{-iθG/2} = cosθ P − i sinθ P·G and P·G = ±i R
                let (r, phase) = p.multiply_unchecked(generator);
                let sign = if phase == PauliPhase::I { 1.0 } else { -1.0 };
                let all: Vec<usize> = (0..m).collect();
                data[q * dim + q] = T::from_f64_lossy(c);
                data[q * dim + r.local_index(&all)] = T::from_f64_lossy(sign * s);
            }
        }
        GateKind::Unitary(u) => {
            let dev = u.unitarity_deviation();
            if dev > 1e-8 {
                return Err(Error::NotUnitary(dev));
            }
            for (i, v) in unitary_ptm(u).into_iter().enumerate() {
                data[i] = T::from_f64_lossy(v);
            }
        }
    }
    PtMatrix::from_dense(m, data)
}

/// Image `U† P U = sign · P'` of local Pauli `index` under a Clifford, as `(P' index, sign)`.
fn clifford_image(kind: CliffordKind, index: usize) -> (usize, f64) {
    let m = kind.arity();
    let all: Vec<usize> = (0..m).collect();
    let p = PauliString::from_local_index(m, index);
    // P = i^{|x∧z|} Π X_a^{x_a} Π Z_a^{z_a}
    let mut acc = PauliString::identity(m);
    let mut phase =
        PauliPhase::from_exponent((0..m).filter(|&a| matches!(p.get(a).bits(), (true, true))).count() as i64);
    for want_z in [false, true] {
        for a in 0..m {
            let (x, z) = p.get(a).bits();
            if (want_z && z) || (!want_z && x) {
                let (img, sign) = generator_image(kind, a, want_z);
                let (next, ph) = acc.multiply_unchecked(&img);
                acc = next;
                phase = phase * ph * sign;
            }
        }
    }
    debug_assert!(phase.is_real());
    let sign = if phase == PauliPhase::ONE { 1.0 } else { -1.0 };
    (acc.local_index(&all), sign)
}

/// `U† X_a U` (or `U† Z_a U`) for the named Clifford.
fn generator_image(kind: CliffordKind, a: usize, is_z: bool) -> (PauliString, PauliPhase) {
    use CliffordKind::*;
    let plus = PauliPhase::ONE;
    let minus = PauliPhase::MINUS_ONE;
    let (text, sign) = match (kind, is_z, a) {
        (H, false, _) => ("Z", plus),
        (H, true, _) => ("X", plus),
        (S, false, _) => ("Y", minus),
        (S, true, _) => ("Z", plus),
        (X, false, _) => ("X", plus),
        (X, true, _) => ("Z", minus),
        (Y, false, _) => ("X", minus),
        (Y, true, _) => ("Z", minus),
        (Z, false, _) => ("X", minus),
        (Z, true, _) => ("Z", plus),
        (Cnot, false, 0) => ("XX", plus),
        (Cnot, false, _) => ("IX", plus),
        (Cnot, true, 0) => ("ZI", plus),
        (Cnot, true, _) => ("ZZ", plus),
        (Cz, false, 0) => ("XZ", plus),
        (Cz, false, _) => ("ZX", plus),
        (Cz, true, 0) => ("ZI", plus),
        (Cz, true, _) => ("IZ", plus),
        (Swap, false, 0) => ("IX", plus),
        (Swap, false, _) => ("XI", plus),
        (Swap, true, 0) => ("IZ", plus),
        (Swap, true, _) => ("ZI", plus),
    };
    (text.parse().expect("static Pauli literal"), sign)
}

/// Row-major dense PTM of an explicit unitary, using the monomial structure of
/// Pauli matrices: `P|b⟩ = i^{|x∧z|} (−1)^{|b∧z|} |b ⊕ x⟩`.
fn unitary_ptm(u: &UnitaryMatrix) -> Vec<f64> {
    let d = u.dim();
    let m = u.n_qubits();
    let pdim = d * d;
    let masks: Vec<(usize, usize, Complex64)> = (0..pdim)
        .map(|idx| {
            let (mut x, mut z) = (0usize, 0usize);
            for a in 0..m {
                let digit = (idx >> (2 * (m - 1 - a))) & 3;
                let bit = 1 << (m - 1 - a);
                let (px, pz) = crate::pauli::Pauli::from_index(digit).bits();
                if px {
                    x |= bit;
                }
                if pz {
                    z |= bit;
                }
            }
            let y = (x & z).count_ones();
            let lead = [
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, -1.0),
            ][(y % 4) as usize];
            (x, z, lead)
        })
        .collect();
    // P[b ⊕ x][b]
    let pauli_entry = |(_, z, lead): (usize, usize, Complex64), b: usize| -> Complex64 {
        if (b & z).count_ones() % 2 == 1 {
            -lead
        } else {
            lead
        }
    };
    let mut out = vec![0.0; pdim * pdim];
    let mut qu = vec![Complex64::new(0.0, 0.0); d * d];
    let mut conj = vec![Complex64::new(0.0, 0.0); d * d];
    for (qi, &q) in masks.iter().enumerate() {
        // (Q U)[b ⊕ x][c] = Q[b ⊕ x][b] U[b][c]
        for b in 0..d {
            let val = pauli_entry(q, b);
            for c in 0..d {
                qu[(b ^ q.0) * d + c] = val * u.get(b, c);
            }
        }
        // U† Q U
        for r in 0..d {
            for c in 0..d {
                conj[r * d + c] = (0..d).map(|k| u.get(k, r).conj() * qu[k * d + c]).sum();
            }
        }
        for (pi, &p) in masks.iter().enumerate() {
            // Tr[M P] = Σ_b M[b][b ⊕ x] P[b ⊕ x][b]
            let tr: Complex64 = (0..d).map(|b| conj[b * d + (b ^ p.0)] * pauli_entry(p, b)).sum();
            out[qi * pdim + pi] = tr.re / d as f64;
        }
    }
    out
}
