use std::hash::Hash;

use crate::pauli::PauliString;

/// Hash-map key for Pauli strings inside the propagation loop.
pub(crate) trait PauliKey: Clone + Eq + Hash + Send + Sync {
    fn from_pauli(p: &PauliString) -> Self;
    fn to_pauli(&self, n_qubits: usize) -> PauliString;
    /// Key whose x-part has the bits of `qubits`; used as an overlap mask.
    fn mask(n_qubits: usize, qubits: &[usize]) -> Self;
    fn overlaps(&self, mask: &Self) -> bool;
    fn weight(&self) -> usize;
    fn local_index(&self, support: &[usize]) -> usize;
    fn set_local(&mut self, support: &[usize], index: usize);
}

/// Bit-packed string for at most `64·W` qubits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Packed<const W: usize> {
    x: [u64; W],
    z: [u64; W],
}

// local digit (I, X, Y, Z) = (0, 1, 2, 3) from the bits x + 2z
const DIGIT: [usize; 4] = [0, 1, 3, 2];
// (x, z) bits from a local digit
const BITS: [(u64, u64); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

impl<const W: usize> PauliKey for Packed<W> {
    fn from_pauli(p: &PauliString) -> Self {
        let mut out = Packed { x: [0; W], z: [0; W] };
        out.x[..p.x_words().len()].copy_from_slice(p.x_words());
        out.z[..p.z_words().len()].copy_from_slice(p.z_words());
        out
    }

    fn to_pauli(&self, n_qubits: usize) -> PauliString {
        let words = n_qubits.div_ceil(64).max(1);
        PauliString::from_masks(n_qubits, &self.x[..words.min(W)], &self.z[..words.min(W)])
            .expect("packed keys stay within range")
    }

    fn mask(_: usize, qubits: &[usize]) -> Self {
        let mut out = Packed { x: [0; W], z: [0; W] };
        for &q in qubits {
            out.x[q / 64] |= 1 << (q % 64);
        }
        out
    }

    #[inline]
    fn overlaps(&self, mask: &Self) -> bool {
        (0..W).any(|w| (self.x[w] | self.z[w]) & mask.x[w] != 0)
    }

    #[inline]
    fn weight(&self) -> usize {
        (0..W).map(|w| (self.x[w] | self.z[w]).count_ones() as usize).sum()
    }

    #[inline]
    fn local_index(&self, support: &[usize]) -> usize {
        support.iter().fold(0, |acc, &q| {
            let (w, b) = (q / 64, q % 64);
            let bits = (((self.x[w] >> b) & 1) | (((self.z[w] >> b) & 1) << 1)) as usize;
            acc * 4 + DIGIT[bits]
        })
    }

    #[inline]
    fn set_local(&mut self, support: &[usize], mut index: usize) {
        for &q in support.iter().rev() {
            let (w, b) = (q / 64, q % 64);
            let (x, z) = BITS[index & 3];
            self.x[w] = (self.x[w] & !(1 << b)) | (x << b);
            self.z[w] = (self.z[w] & !(1 << b)) | (z << b);
            index >>= 2;
        }
    }
}

impl PauliKey for PauliString {
    fn from_pauli(p: &PauliString) -> Self {
        p.clone()
    }

    fn to_pauli(&self, _: usize) -> PauliString {
        self.clone()
    }

    fn mask(n_qubits: usize, qubits: &[usize]) -> Self {
        let mut x = vec![0u64; n_qubits.div_ceil(64).max(1)];
        for &q in qubits {
            x[q / 64] |= 1 << (q % 64);
        }
        PauliString::from_masks(n_qubits, &x, &[]).expect("mask qubits are in range")
    }

    fn overlaps(&self, mask: &Self) -> bool {
        self.overlaps_mask(mask.x_words())
    }

    fn weight(&self) -> usize {
        PauliString::weight(self)
    }

    fn local_index(&self, support: &[usize]) -> usize {
        PauliString::local_index(self, support)
    }

    fn set_local(&mut self, support: &[usize], index: usize) {
        PauliString::set_local(self, support, index)
    }
}
