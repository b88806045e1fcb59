use std::collections::BTreeMap;
use std::fmt;

use rustc_hash::FxHashMap;

use super::PauliString;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Real-coefficient expansion `O = Σ a_P P` over unnormalized Pauli strings.
///
/// Coefficients whose magnitude drops below [`Scalar::drop_tolerance`] during
/// a merge are removed, so the map only ever holds non-negligible terms.
/// The map uses a fixed hasher; iteration order is reproducible but not
/// meaningful, use [`PauliSum::sorted_terms`] when order matters.
#[derive(Clone, PartialEq)]
pub struct PauliSum<T: Scalar> {
    n_qubits: usize,
    terms: FxHashMap<PauliString, T>,
}

/// Per-weight term count and squared-coefficient mass.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct WeightBin<T> {
    pub term_count: usize,
    pub l2_mass: T,
}

impl<T: Scalar> PauliSum<T> {
    pub fn new(n_qubits: usize) -> Self {
        PauliSum {
            n_qubits,
            terms: FxHashMap::default(),
        }
    }

    pub fn with_capacity(n_qubits: usize, capacity: usize) -> Self {
        PauliSum {
            n_qubits,
            terms: FxHashMap::with_capacity_and_hasher(capacity, Default::default()),
        }
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, T)>,
    {
        let mut sum = PauliSum::new(n_qubits);
        for (p, c) in terms {
            sum.add_term(p, c)?;
        }
        Ok(sum)
    }

    /// A single Pauli with coefficient one.
    pub fn from_pauli(p: PauliString) -> Self {
        let mut sum = PauliSum::new(p.n_qubits());
        sum.terms.insert(p, T::one());
        sum
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, p: &PauliString) -> T {
        self.terms.get(p).copied().unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &T)> {
        self.terms.iter()
    }

    /// Terms ordered by mask.
    pub fn sorted_terms(&self) -> Vec<(&PauliString, T)> {
        let mut out: Vec<_> = self.terms.iter().map(|(p, &c)| (p, c)).collect();
        out.sort_unstable_by(|a, b| a.0.cmp(b.0));
        out
    }

    /// Adds `coeff·p`, merging with an existing term.
    pub fn add_term(&mut self, p: PauliString, coeff: T) -> Result<()> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch {
                expected: self.n_qubits,
                found: p.n_qubits(),
            });
        }
        self.add_unchecked(p, coeff);
        Ok(())
    }

    pub(crate) fn add_unchecked(&mut self, p: PauliString, coeff: T) {
        use std::collections::hash_map::Entry;
        let tol = T::drop_tolerance();
        match self.terms.entry(p) {
            Entry::Occupied(mut e) => {
                let v = *e.get() + coeff;
                if v.abs() < tol {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                if coeff.abs() >= tol {
                    e.insert(coeff);
                }
            }
        }
    }

    /// Inserts a term known not to collide with an existing key.
    pub(crate) fn insert_fresh(&mut self, p: PauliString, coeff: T) {
        debug_assert!(!self.terms.contains_key(&p));
        self.terms.insert(p, coeff);
    }

    pub(crate) fn extract_if<F>(&mut self, mut pred: F) -> Vec<(PauliString, T)>
    where
        F: FnMut(&PauliString, T) -> bool,
    {
        self.terms.extract_if(|p, c| pred(p, *c)).collect()
    }

    /// Coefficient of the identity, i.e. `Tr[O] / 2^n`.
    pub fn identity_coefficient(&self) -> T {
        self.get(&PauliString::identity(self.n_qubits))
    }

    pub fn max_weight(&self) -> usize {
        self.terms.keys().map(PauliString::weight).max().unwrap_or(0)
    }

    /// Sub-sum of terms with weight at most `k`.
    pub fn truncate_weight(&self, k: usize) -> Self {
        self.filter(|p, _| p.weight() <= k)
    }

    /// Drops terms with `|a_P| < eps`.
    pub fn truncate_coeff(&self, eps: T) -> Self {
        self.filter(|_, c| c.abs() >= eps)
    }

    pub fn filter<F>(&self, mut keep: F) -> Self
    where
        F: FnMut(&PauliString, T) -> bool,
    {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .filter(|(p, &c)| keep(p, c))
                .map(|(p, &c)| (p.clone(), c))
                .collect(),
        }
    }

    /// `Σ a_P²`, the squared Pauli 2-norm.
    pub fn l2_mass(&self) -> T {
        // Summed in mask order so the result does not depend on hash layout.
        self.sorted_terms().into_iter().map(|(_, c)| c * c).sum()
    }

    pub fn weight_histogram(&self) -> BTreeMap<usize, WeightBin<T>> {
        let mut hist: BTreeMap<usize, WeightBin<T>> = BTreeMap::new();
        for (p, c) in self.sorted_terms() {
            let bin = hist.entry(p.weight()).or_default();
            bin.term_count += 1;
            bin.l2_mass += c * c;
        }
        hist
    }

    pub fn scale(&mut self, factor: T) {
        for c in self.terms.values_mut() {
            *c *= factor;
        }
        self.terms.retain(|_, c| c.abs() >= T::drop_tolerance());
    }

    /// `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::SizeMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        let mut out = self.clone();
        for (p, c) in other.sorted_terms() {
            out.add_unchecked(p.clone(), -c);
        }
        Ok(out)
    }

    pub fn cast<U: Scalar>(&self) -> PauliSum<U> {
        let mut out = PauliSum::with_capacity(self.n_qubits, self.len());
        for (p, c) in self.sorted_terms() {
            out.add_unchecked(p.clone(), U::from_f64_lossy(c.to_f64_lossy()));
        }
        out
    }

    /// Parses `"Z0"`, `"0.5*Z0*Z1 + -0.25*X2"` or a dense string like `"ZIII"`.
    pub fn parse_literal(text: &str, n_qubits: usize) -> Result<Self> {
        let mut sum = PauliSum::new(n_qubits);
        for term in text.split('+').map(str::trim).filter(|t| !t.is_empty()) {
            let (coeff, pauli) = split_coefficient(term);
            let coeff = match coeff {
                Some(c) => parse_coeff::<T>(c, term)?,
                None => T::one(),
            };
            sum.add_term(PauliString::parse_with_qubits(pauli, n_qubits)?, coeff)?;
        }
        if text.trim().is_empty() {
            return Err(Error::InvalidPauli(text.to_string()));
        }
        Ok(sum)
    }

    /// Parses one `coeff pauli_literal` pair per line; blank lines and `#` comments are skipped.
    pub fn parse_lines(text: &str, n_qubits: usize) -> Result<Self> {
        let mut sum = PauliSum::new(n_qubits);
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (coeff, literal) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::InvalidPauli(line.to_string()))?;
            let coeff = parse_coeff::<T>(coeff, line)?;
            sum.add_term(PauliString::parse_with_qubits(literal.trim(), n_qubits)?, coeff)?;
        }
        Ok(sum)
    }
}

fn split_coefficient(term: &str) -> (Option<&str>, &str) {
    match term.split_once('*') {
        Some((head, rest)) if head.trim().parse::<f64>().is_ok() => (Some(head.trim()), rest.trim()),
        _ if term.parse::<f64>().is_ok() => (Some(term), "I"),
        _ => (None, term),
    }
}

fn parse_coeff<T: Scalar>(text: &str, context: &str) -> Result<T> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(T::from_f64_lossy)
        .ok_or_else(|| Error::InvalidPauli(context.to_string()))
}

/// One `coeff literal` line per term in mask order; inverse of [`PauliSum::parse_lines`].
impl<T: Scalar> fmt::Display for PauliSum<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, c) in self.sorted_terms() {
            writeln!(f, "{} {}", c, p.to_sparse_string())?;
        }
        Ok(())
    }
}

impl<T: Scalar> fmt::Debug for PauliSum<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.sorted_terms().into_iter().map(|(p, c)| (p.to_sparse_string(), c)))
            .finish()
    }
}
