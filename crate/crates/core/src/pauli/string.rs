use std::fmt;
use std::str::FromStr;

use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

/// Mask storage; two inline words cover the 127-qubit heavy-hex device without allocating.
pub(crate) type Words = SmallVec<[u64; 2]>;

fn word_count(n_qubits: usize) -> usize {
    n_qubits.div_ceil(64).max(1)
}

/// Single-qubit Pauli, encoded as `(x, z)` bits: I=(0,0), X=(1,0), Y=(1,1), Z=(0,1).
///
/// The discriminant is the position in the `I, X, Y, Z` enumeration used for
/// transfer-matrix indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_index(index: usize) -> Pauli {
        Pauli::ALL[index & 3]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        ['I', 'X', 'Y', 'Z'][self as usize]
    }
}

/// Phase `i^exponent` picked up when multiplying Pauli strings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct PauliPhase(u8);

impl PauliPhase {
    pub const ONE: PauliPhase = PauliPhase(0);
    pub const I: PauliPhase = PauliPhase(1);
    pub const MINUS_ONE: PauliPhase = PauliPhase(2);
    pub const MINUS_I: PauliPhase = PauliPhase(3);

    pub fn from_exponent(exponent: i64) -> PauliPhase {
        PauliPhase(exponent.rem_euclid(4) as u8)
    }

    /// Exponent of `i`, in `0..4`.
    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// `(re, im)` of the phase.
    pub fn to_complex(self) -> (f64, f64) {
        match self.0 {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    }
}

impl std::ops::Mul for PauliPhase {
    type Output = PauliPhase;

    fn mul(self, rhs: PauliPhase) -> PauliPhase {
        PauliPhase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for PauliPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+1", "+i", "-1", "-i"][self.0 as usize])
    }
}

/// An `n`-qubit Pauli operator without phase, stored as X and Z bit masks.
///
/// Qubit `q` lives in bit `q % 64` of word `q / 64`. Bits above `n_qubits` are
/// always zero so that equality, hashing and ordering only see the masks.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x: Words,
    z: Words,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> PauliString {
        let words = word_count(n_qubits);
        PauliString {
            n_qubits,
            x: smallvec![0; words],
            z: smallvec![0; words],
        }
    }

    /// A single non-identity (or identity) factor on qubit `qubit`.
    pub fn single(n_qubits: usize, qubit: usize, pauli: Pauli) -> Result<PauliString> {
        let mut p = PauliString::identity(n_qubits);
        p.set(qubit, pauli)?;
        Ok(p)
    }

    pub fn from_paulis(paulis: &[Pauli]) -> PauliString {
        let mut p = PauliString::identity(paulis.len());
        for (q, &pauli) in paulis.iter().enumerate() {
            p.set_unchecked(q, pauli);
        }
        p
    }

    /// Builds a string from explicit masks; bits at or above `n_qubits` are rejected.
    pub fn from_masks(n_qubits: usize, x: &[u64], z: &[u64]) -> Result<PauliString> {
        let words = word_count(n_qubits);
        let mut p = PauliString::identity(n_qubits);
        for (target, source) in [(&mut p.x, x), (&mut p.z, z)] {
            for (w, &value) in source.iter().enumerate() {
                if value == 0 {
                    continue;
                }
                if w >= words {
                    return Err(Error::QubitOutOfRange {
                        qubit: w * 64 + value.trailing_zeros() as usize,
                        n_qubits,
                    });
                }
                target[w] = value;
            }
        }
        if let Some(q) = p.highest_set_bit() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
            }
        }
        Ok(p)
    }

    fn highest_set_bit(&self) -> Option<usize> {
        (0..self.x.len()).rev().find_map(|w| {
            let word = self.x[w] | self.z[w];
            (word != 0).then(|| w * 64 + 63 - word.leading_zeros() as usize)
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        let (w, b) = (qubit / 64, qubit % 64);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, pauli: Pauli) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        self.set_unchecked(qubit, pauli);
        Ok(())
    }

    fn set_unchecked(&mut self, qubit: usize, pauli: Pauli) {
        let (w, b) = (qubit / 64, qubit % 64);
        let (x, z) = pauli.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Qubits with a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (w, (x, z)) in self.x.iter().zip(&self.z).enumerate() {
            let mut bits = x | z;
            while bits != 0 {
                out.push(w * 64 + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }

    /// True if the string acts non-trivially on any qubit set in `mask`.
    pub fn overlaps_mask(&self, mask: &[u64]) -> bool {
        self.x.iter().zip(&self.z).zip(mask).any(|((x, z), m)| (x | z) & m != 0)
    }

    fn check_size(&self, other: &PauliString) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Two Pauli strings commute iff they anticommute on an even number of sites.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_size(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &PauliString) -> bool {
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= (self.x[w] & other.z[w]).count_ones() ^ (self.z[w] & other.x[w]).count_ones();
        }
        parity & 1 == 0
    }

    /// Returns `(R, phase)` with `self · other = phase · R`.
    pub fn multiply(&self, other: &PauliString) -> Result<(PauliString, PauliPhase)> {
        self.check_size(other)?;
        Ok(self.multiply_unchecked(other))
    }

    pub(crate) fn multiply_unchecked(&self, other: &PauliString) -> (PauliString, PauliPhase) {
        // With P = i^{x·z} X^x Z^z on every site:
        // P·Q = i^{|x1 z1| + |x2 z2| - |x3 z3|} (-1)^{|z1 x2|} R.
        let mut exponent: i64 = 0;
        let mut x = Words::with_capacity(self.x.len());
        let mut z = Words::with_capacity(self.x.len());
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (x3, z3) = (x1 ^ x2, z1 ^ z2);
            exponent += (x1 & z1).count_ones() as i64 + (x2 & z2).count_ones() as i64 - (x3 & z3).count_ones() as i64
                + 2 * (z1 & x2).count_ones() as i64;
            x.push(x3);
            z.push(z3);
        }
        (
            PauliString {
                n_qubits: self.n_qubits,
                x,
                z,
            },
            PauliPhase::from_exponent(exponent),
        )
    }

    /// Index of the restriction to `support` in the `I,X,Y,Z` lexicographic
    /// enumeration, `support[0]` being the most significant digit.
    pub fn local_index(&self, support: &[usize]) -> usize {
        support.iter().fold(0, |acc, &q| acc * 4 + self.get(q).index())
    }

    /// Copy of `self` with the factors on `support` replaced by local index `index`.
    pub fn with_local(&self, support: &[usize], index: usize) -> PauliString {
        let mut out = self.clone();
        out.set_local(support, index);
        out
    }

    pub(crate) fn set_local(&mut self, support: &[usize], mut index: usize) {
        for &q in support.iter().rev() {
            self.set_unchecked(q, Pauli::from_index(index & 3));
            index >>= 2;
        }
    }

    /// Dense string over exactly `support.len()` qubits for local index `index`.
    pub fn from_local_index(m: usize, index: usize) -> PauliString {
        let support: Vec<usize> = (0..m).collect();
        PauliString::identity(m).with_local(&support, index)
    }

    /// Parses either the dense form (`"IXYZ"`, length `n_qubits`, leftmost is
    /// qubit 0) or the sparse form (`"Z0*Z1"`, `"X3 Y5"`, `"I"`).
    pub fn parse_with_qubits(text: &str, n_qubits: usize) -> Result<PauliString> {
        let text = text.trim();
        if text.chars().count() == n_qubits && text.chars().all(|c| Pauli::from_char(c).is_some()) {
            let paulis: Vec<Pauli> = text.chars().filter_map(Pauli::from_char).collect();
            return Ok(PauliString::from_paulis(&paulis));
        }
        let mut p = PauliString::identity(n_qubits);
        if text.is_empty() || text == "I" {
            return Ok(p);
        }
        let invalid = || Error::InvalidPauli(text.to_string());
        for token in text
            .split(|c: char| c == '*' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            let mut chars = token.chars();
            let pauli = chars.next().and_then(Pauli::from_char).ok_or_else(invalid)?;
            let qubit: usize = chars.as_str().parse().map_err(|_| invalid())?;
            if qubit >= n_qubits {
                return Err(Error::QubitOutOfRange { qubit, n_qubits });
            }
            if p.get(qubit) != Pauli::I {
                return Err(invalid());
            }
            p.set_unchecked(qubit, pauli);
        }
        Ok(p)
    }

    /// Sparse literal, e.g. `"Z0*Z1"`; the identity prints as `"I"`.
    pub fn to_sparse_string(&self) -> String {
        let support = self.support();
        if support.is_empty() {
            return "I".to_string();
        }
        support
            .iter()
            .map(|&q| format!("{}{}", self.get(q).as_char(), q))
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({})", self.to_sparse_string())
    }
}

/// Dense form only; the qubit count is the string length.
impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let paulis = s
            .trim()
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::InvalidPauli(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if paulis.is_empty() {
            return Err(Error::InvalidPauli(s.to_string()));
        }
        Ok(PauliString::from_paulis(&paulis))
    }
}
