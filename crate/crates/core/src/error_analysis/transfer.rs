use rand::Rng;

use crate::circuit::{AngleCorrelation, EnsembleSpec, SlotKind, Support};
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Tolerance on `E sin θ cos θ`; beyond it distinct paths correlate.
const CROSS_MOMENT_TOL: f64 = 1e-12;

/// Second moment `E_U T[Q][P]²` of one gate slot, as a distribution over
/// outputs `P` for every local input `Q`.
#[derive(Clone, Debug, PartialEq)]
pub enum SlotTransfer {
    /// Haar two-qubit gate: a non-identity input goes to each of the 15
    /// non-identity outputs with probability `1/15`.
    HaarSu4,
    /// Haar single-qubit gate: uniform over `X, Y, Z`.
    HaarSingle,
    /// Random-angle Pauli rotation. Inputs commuting with the generator are
    /// fixed; the others stay with probability `stay` and otherwise move to
    /// the branch string `Q·G` (phase dropped, which no downstream quantity sees).
    Rotation {
        generator: PauliString,
        stay: f64,
        jump: f64,
    },
}

impl SlotTransfer {
    pub fn arity(&self) -> usize {
        match self {
            SlotTransfer::HaarSu4 => 2,
            SlotTransfer::HaarSingle => 1,
            SlotTransfer::Rotation { generator, .. } => generator.n_qubits(),
        }
    }

    /// Distribution of outputs for local input `input`, as `(output, probability)`.
    pub fn row(&self, input: usize) -> Vec<(usize, f64)> {
        if input == 0 {
            return vec![(0, 1.0)];
        }
        match self {
            SlotTransfer::HaarSu4 => (1..16).map(|p| (p, 1.0 / 15.0)).collect(),
            SlotTransfer::HaarSingle => (1..4).map(|p| (p, 1.0 / 3.0)).collect(),
            SlotTransfer::Rotation { generator, stay, jump } => match branch(generator, input) {
                None => vec![(input, 1.0)],
                Some(r) => vec![(input, *stay), (r, *jump)],
            },
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, input: usize, rng: &mut R) -> usize {
        if input == 0 {
            return 0;
        }
        match self {
            SlotTransfer::HaarSu4 => rng.random_range(1..16),
            SlotTransfer::HaarSingle => rng.random_range(1..4),
            SlotTransfer::Rotation { generator, stay, .. } => match branch(generator, input) {
                None => input,
                Some(r) => {
                    if rng.random::<f64>() < *stay {
                        input
                    } else {
                        r
                    }
                }
            },
        }
    }
}

/// Local index of `Q·G` when `Q` anticommutes with `G`.
fn branch(generator: &PauliString, input: usize) -> Option<usize> {
    let m = generator.n_qubits();
    let q = PauliString::from_local_index(m, input);
    if q.commutes_unchecked(generator) {
        return None;
    }
    let (r, _) = q.multiply_unchecked(generator);
    let all: Vec<usize> = (0..m).collect();
    Some(r.local_index(&all))
}

/// Per-layer second-moment transfers of an ensemble; `layers()[0]` is `U_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondMomentTransfer {
    n_qubits: usize,
    layers: Vec<Vec<(Support, SlotTransfer)>>,
}

impl SecondMomentTransfer {
    pub fn from_layers(n_qubits: usize, layers: Vec<Vec<(Support, SlotTransfer)>>) -> Result<Self> {
        for layer in &layers {
            let mut seen = vec![false; n_qubits];
            for (support, t) in layer {
                if support.len() != t.arity() {
                    return Err(Error::InvalidArgument(format!(
                        "transfer of arity {} on support {support:?}",
                        t.arity()
                    )));
                }
                for &q in support {
                    if q >= n_qubits {
                        return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
                    }
                    if std::mem::replace(&mut seen[q], true) {
                        return Err(Error::OverlappingSupports(q));
                    }
                }
            }
        }
        Ok(SecondMomentTransfer { n_qubits, layers })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<(Support, SlotTransfer)>] {
        &self.layers
    }

    /// Largest `|Σ_P row(Q)[P] − 1|` over every slot and input.
    pub fn max_row_deviation(&self) -> f64 {
        self.layers
            .iter()
            .flatten()
            .flat_map(|(_, t)| {
                (0..1usize << (2 * t.arity())).map(move |q| (t.row(q).iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Applies layer `j` (1-based) to `p` in place, drawing one output per touched slot.
    pub fn step<R: Rng + ?Sized>(&self, j: usize, p: &mut PauliString, rng: &mut R) {
        for (support, t) in &self.layers[j - 1] {
            let q = p.local_index(support);
            if q != 0 {
                let out = t.sample(q, rng);
                p.set_local(support, out);
            }
        }
    }
}

/// Second-moment transfer of `spec`.
///
/// Correlated or deterministic angles are rejected, as is any rotation
/// distribution whose `E sin θ cos θ` is non-zero.
pub fn build_transfer(spec: &EnsembleSpec) -> Result<SecondMomentTransfer> {
    match spec.correlation {
        AngleCorrelation::IndependentUniform => {}
        AngleCorrelation::SharedSingleAngle => {
            return Err(Error::UnsupportedEnsemble(
                "a shared angle correlates distinct Pauli paths".into(),
            ))
        }
        AngleCorrelation::FixedAngles(_) => {
            return Err(Error::UnsupportedEnsemble(
                "deterministic angles have no path orthogonality".into(),
            ))
        }
    }
    let mut layers = Vec::new();
    for layer in spec.template()? {
        let mut slots = Vec::with_capacity(layer.len());
        for slot in layer {
            let t = match slot.kind {
                SlotKind::HaarSu4 => SlotTransfer::HaarSu4,
                SlotKind::Rotation {
                    generator,
                    distribution,
                    ..
                } => {
                    let (stay, jump, cross) = distribution.second_moments();
                    if cross.abs() > CROSS_MOMENT_TOL {
                        return Err(Error::UnsupportedEnsemble(format!(
                            "angle distribution {distribution:?} has E[sin θ cos θ] = {cross}"
                        )));
                    }
                    SlotTransfer::Rotation { generator, stay, jump }
                }
            };
            slots.push((slot.support, t));
        }
        layers.push(slots);
    }
    SecondMomentTransfer::from_layers(spec.n_qubits(), layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_brickwork_1d, AngleDistribution, RotationPattern};
    use crate::rng::stream_rng;

    #[test]
    fn rows_and_samples() {
        let rz = SlotTransfer::Rotation {
            generator: "Z".parse().unwrap(),
            stay: 0.5,
            jump: 0.5,
        };
        assert_eq!(rz.row(1), vec![(1, 0.5), (2, 0.5)]);
        assert_eq!(rz.row(3), vec![(3, 1.0)]);
        assert_eq!(SlotTransfer::HaarSu4.row(0), vec![(0, 1.0)]);
        assert_eq!(SlotTransfer::HaarSu4.row(4).len(), 15);
        let mut rng = stream_rng(1, 0);
        let draws: Vec<usize> = (0..1000).map(|_| SlotTransfer::HaarSu4.sample(7, &mut rng)).collect();
        assert!(draws.iter().all(|&d| (1..16).contains(&d)));
        assert_eq!(SlotTransfer::HaarSingle.sample(0, &mut rng), 0);
    }

    #[test]
    fn build_from_specs() {
        let layering = build_brickwork_1d(4, 3).unwrap();
        let t = build_transfer(&EnsembleSpec::haar(layering.clone(), 1)).unwrap();
        assert_eq!(t.depth(), 3);
        assert!(t.max_row_deviation() < 1e-12);

        let patterns = vec![
            RotationPattern::uniform("X").unwrap(),
            RotationPattern::uniform("ZZ").unwrap(),
        ];
        let spec = EnsembleSpec::rotations(
            layering.clone(),
            patterns.clone(),
            AngleCorrelation::IndependentUniform,
            2,
        );
        let t = build_transfer(&spec).unwrap();
        assert_eq!(t.depth(), 2 * (1 + 3));
        assert!(t.max_row_deviation() < 1e-12);

        let shared = EnsembleSpec::rotations(
            layering.clone(),
            patterns.clone(),
            AngleCorrelation::SharedSingleAngle,
            1,
        );
        assert!(matches!(build_transfer(&shared), Err(Error::UnsupportedEnsemble(_))));

        let mut skewed = patterns;
        skewed[0].distribution = AngleDistribution::Uniform { low: 0.0, high: 1.0 };
        let spec = EnsembleSpec::rotations(layering, skewed, AngleCorrelation::IndependentUniform, 1);
        assert!(matches!(build_transfer(&spec), Err(Error::UnsupportedEnsemble(_))));
    }
}
