use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::gate::{Gate, GateKind, Support, UnitaryMatrix};
use super::layer::{Circuit, Layer};
use super::topology::Layering;
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::rng::stream_rng;

/// Angle law for one rotation pattern.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AngleDistribution {
    Uniform { low: f64, high: f64 },
}

impl Default for AngleDistribution {
    fn default() -> Self {
        AngleDistribution::Uniform {
            low: 0.0,
            high: 2.0 * PI,
        }
    }
}

impl AngleDistribution {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            AngleDistribution::Uniform { low, high } => low + (high - low) * rng.random::<f64>(),
        }
    }

    /// `(E cos²θ, E sin²θ, E sin θ cos θ)` in closed form.
    pub fn second_moments(&self) -> (f64, f64, f64) {
        match *self {
            AngleDistribution::Uniform { low, high } => {
                let width = high - low;
                if width.abs() < 1e-300 {
                    let (s, c) = low.sin_cos();
                    return (c * c, s * s, s * c);
                }
                let osc = ((2.0 * high).sin() - (2.0 * low).sin()) / (4.0 * width);
                let sin_cos = ((2.0 * low).cos() - (2.0 * high).cos()) / (4.0 * width);
                (0.5 + osc, 0.5 - osc, sin_cos)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotationPattern {
    /// One- or two-qubit generator. One-qubit patterns act on every qubit,
    /// two-qubit patterns on every slot of the layering.
    pub generator: PauliString,
    pub distribution: AngleDistribution,
}

impl RotationPattern {
    pub fn uniform(generator: &str) -> Result<Self> {
        Ok(RotationPattern {
            generator: generator.parse()?,
            distribution: AngleDistribution::default(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateFamily {
    /// An independent Haar-random two-qubit unitary on every layering slot.
    HaarSu4PerEdge,
    /// Per repetition: one layer per single-qubit pattern on all qubits, then
    /// each two-qubit pattern over the layering, in list order.
    RotationSet(Vec<RotationPattern>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum AngleCorrelation {
    IndependentUniform,
    /// A single angle drawn once per circuit and shared by every rotation.
    SharedSingleAngle,
    /// Deterministic angles, assigned cyclically in rotation order.
    FixedAngles(Vec<f64>),
}

/// A distribution over circuits: layering, gate family, angle correlations, repetitions.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub layering: Layering,
    pub family: GateFamily,
    pub correlation: AngleCorrelation,
    pub repetitions: usize,
}

/// What a gate slot of the ensemble holds before sampling.
#[derive(Clone, Debug, PartialEq)]
pub enum SlotKind {
    HaarSu4,
    Rotation {
        generator: PauliString,
        distribution: AngleDistribution,
        /// Position among all rotations of the circuit, in circuit order.
        index: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Slot {
    pub support: Support,
    pub kind: SlotKind,
}

impl EnsembleSpec {
    pub fn haar(layering: Layering, repetitions: usize) -> Self {
        EnsembleSpec {
            layering,
            family: GateFamily::HaarSu4PerEdge,
            correlation: AngleCorrelation::IndependentUniform,
            repetitions,
        }
    }

    pub fn rotations(
        layering: Layering,
        patterns: Vec<RotationPattern>,
        correlation: AngleCorrelation,
        repetitions: usize,
    ) -> Self {
        EnsembleSpec {
            layering,
            family: GateFamily::RotationSet(patterns),
            correlation,
            repetitions,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.layering.n_qubits()
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument("repetitions must be positive".into()));
        }
        match &self.family {
            GateFamily::HaarSu4PerEdge => {
                if self.layering.layers().is_empty() {
                    return Err(Error::InvalidArgument("Haar ensemble needs at least one slot".into()));
                }
            }
            GateFamily::RotationSet(patterns) => {
                if patterns.is_empty() {
                    return Err(Error::InvalidArgument("empty rotation set".into()));
                }
                for p in patterns {
                    let m = p.generator.n_qubits();
                    if !(1..=2).contains(&m) || p.generator.is_identity() {
                        return Err(Error::InvalidArgument(format!(
                            "rotation pattern `{}` must be a non-identity 1- or 2-qubit Pauli",
                            p.generator
                        )));
                    }
                    if m == 2 && self.layering.layers().is_empty() {
                        return Err(Error::InvalidArgument(
                            "two-qubit rotation pattern over an empty layering".into(),
                        ));
                    }
                }
            }
        }
        if let AngleCorrelation::FixedAngles(angles) = &self.correlation {
            if angles.is_empty() || angles.iter().any(|a| !a.is_finite()) {
                return Err(Error::InvalidArgument(
                    "fixed angles must be finite and non-empty".into(),
                ));
            }
        }
        Ok(())
    }

    /// The slot structure shared by every circuit of the ensemble; `layers[0]` is `U_1`.
    pub fn template(&self) -> Result<Vec<Vec<Slot>>> {
        self.validate()?;
        let n = self.n_qubits();
        let mut layers = Vec::new();
        let mut rotation_index = 0;
        for _ in 0..self.repetitions {
            match &self.family {
                GateFamily::HaarSu4PerEdge => {
                    for layer in self.layering.layers() {
                        layers.push(
                            layer
                                .iter()
                                .map(|&(u, v)| Slot {
                                    support: Support::from_slice(&[u, v]),
                                    kind: SlotKind::HaarSu4,
                                })
                                .collect(),
                        );
                    }
                }
                GateFamily::RotationSet(patterns) => {
                    let mut rotation = |support: &[usize], p: &RotationPattern| {
                        let slot = Slot {
                            support: Support::from_slice(support),
                            kind: SlotKind::Rotation {
                                generator: p.generator.clone(),
                                distribution: p.distribution,
                                index: rotation_index,
                            },
                        };
                        rotation_index += 1;
                        slot
                    };
                    for p in patterns.iter().filter(|p| p.generator.n_qubits() == 1) {
                        layers.push((0..n).map(|q| rotation(&[q], p)).collect());
                    }
                    for p in patterns.iter().filter(|p| p.generator.n_qubits() == 2) {
                        for layer in self.layering.layers() {
                            layers.push(layer.iter().map(|&(u, v)| rotation(&[u, v], p)).collect());
                        }
                    }
                }
            }
        }
        Ok(layers)
    }
}

/// Draws one circuit from `spec`. A pure function of the spec and the generator state.
pub fn sample_circuit<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<Circuit> {
    let template = spec.template()?;
    let shared = match spec.correlation {
        AngleCorrelation::SharedSingleAngle => {
            let dist = match &spec.family {
                GateFamily::RotationSet(p) => p[0].distribution,
                GateFamily::HaarSu4PerEdge => AngleDistribution::default(),
            };
            Some(dist.sample(rng))
        }
        _ => None,
    };
    let mut circuit = Circuit::new(spec.n_qubits());
    for layer in template {
        let mut gates = Vec::with_capacity(layer.len());
        for slot in layer {
            let kind = match slot.kind {
                SlotKind::HaarSu4 => GateKind::Unitary(sample_haar_su4(rng)),
                SlotKind::Rotation {
                    generator,
                    distribution,
                    index,
                } => {
                    let angle = match &spec.correlation {
                        AngleCorrelation::IndependentUniform => distribution.sample(rng),
                        AngleCorrelation::SharedSingleAngle => shared.expect("drawn above"),
                        AngleCorrelation::FixedAngles(a) => a[index % a.len()],
                    };
                    GateKind::Rotation { generator, angle }
                }
            };
            gates.push(Gate::new(&slot.support, kind)?);
        }
        circuit.push_layer(Layer::new(gates)?)?;
    }
    Ok(circuit)
}

/// Circuit `index` of the ensemble under `master_seed`.
pub fn sample_indexed_circuit(spec: &EnsembleSpec, master_seed: u64, index: u64) -> Result<Circuit> {
    sample_circuit(spec, &mut stream_rng(master_seed, index))
}

/// Haar-random element of SU(4): Gram-Schmidt on a complex Ginibre matrix
/// (equivalent to QR with a positive-diagonal R), then the determinant phase
/// is divided out.
pub fn sample_haar_su4<R: Rng + ?Sized>(rng: &mut R) -> UnitaryMatrix {
    sample_haar(4, rng)
}

pub fn sample_haar_u2<R: Rng + ?Sized>(rng: &mut R) -> UnitaryMatrix {
    sample_haar(2, rng)
}

fn sample_haar<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> UnitaryMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    loop {
        // columns[c][r]
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(re * scale, im * scale)
                    })
                    .collect()
            })
            .collect();
        if !orthonormalize(&mut cols) {
            continue;
        }
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (c, col) in cols.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                data[r * dim + c] = v;
            }
        }
        let det = determinant(&data, dim);
        let phase = Complex64::from_polar(1.0, -det.arg() / dim as f64);
        for v in &mut data {
            *v *= phase;
        }
        return UnitaryMatrix::from_raw(dim, data);
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass; false on rank deficiency.
fn orthonormalize(cols: &mut [Vec<Complex64>]) -> bool {
    for i in 0..cols.len() {
        for _ in 0..2 {
            for j in 0..i {
                let proj: Complex64 = cols[j].iter().zip(&cols[i]).map(|(a, b)| a.conj() * b).sum();
                let (head, tail) = cols.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                    *x -= proj * y;
                }
            }
        }
        let norm = cols[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return false;
        }
        for x in &mut cols[i] {
            *x /= norm;
        }
    }
    true
}

/// Determinant by Gaussian elimination with partial pivoting.
fn determinant(data: &[Complex64], dim: usize) -> Complex64 {
    let mut a = data.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for c in 0..dim {
        let pivot = (c..dim)
            .max_by(|&i, &j| a[i * dim + c].norm().total_cmp(&a[j * dim + c].norm()))
            .unwrap_or(c);
        if a[pivot * dim + c].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != c {
            for k in 0..dim {
                a.swap(pivot * dim + k, c * dim + k);
            }
            det = -det;
        }
        let p = a[c * dim + c];
        det *= p;
        for r in c + 1..dim {
            let f = a[r * dim + c] / p;
            for k in c..dim {
                let v = a[c * dim + k];
                a[r * dim + k] -= f * v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::topology::{build_brickwork_1d, build_staircase_2d};

    #[test]
    fn haar_is_unitary_special_and_deterministic() {
        for seed in 0..50 {
            let u = sample_haar_su4(&mut stream_rng(seed, 0));
            assert!(u.unitarity_deviation() < 1e-10);
            let det = determinant(u.data(), 4);
            assert!((det - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        }
        let a = sample_haar_su4(&mut stream_rng(42, 0));
        let b = sample_haar_su4(&mut stream_rng(42, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn haar_trace_second_moment() {
        // E|Tr U|² = 1 for Haar measure on SU(d), d ≥ 2.
        let mut rng = stream_rng(2024, 0);
        let samples: Vec<f64> = (0..10_000)
            .map(|_| sample_haar_su4(&mut rng).trace().norm_sqr() / 16.0)
            .collect();
        let (mean, se) = crate::stats::mean_and_stderr(&samples);
        assert!((mean - 1.0 / 16.0).abs() < 5.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn haar_staircase_structure() {
        let spec = EnsembleSpec::haar(build_staircase_2d(2, 2, 1).unwrap(), 1);
        let c = sample_circuit(&spec, &mut stream_rng(1, 0)).unwrap();
        assert_eq!(c.depth(), 3);
        assert!(c
            .layers()
            .iter()
            .all(|l| l.gates().len() == 1 && matches!(l.gates()[0].kind(), GateKind::Unitary(_))));
        assert_eq!(
            sample_indexed_circuit(&spec, 5, 2).unwrap(),
            sample_indexed_circuit(&spec, 5, 2).unwrap()
        );
        assert_ne!(
            sample_indexed_circuit(&spec, 5, 2).unwrap(),
            sample_indexed_circuit(&spec, 5, 3).unwrap()
        );
    }

    fn rotation_spec(correlation: AngleCorrelation) -> EnsembleSpec {
        EnsembleSpec::rotations(
            build_staircase_2d(2, 2, 1).unwrap(),
            vec![
                RotationPattern::uniform("X").unwrap(),
                RotationPattern::uniform("Z").unwrap(),
                RotationPattern::uniform("ZZ").unwrap(),
            ],
            correlation,
            2,
        )
    }

    fn angles(c: &Circuit) -> Vec<f64> {
        c.gates()
            .map(|g| match g.kind() {
                GateKind::Rotation { angle, .. } => *angle,
                _ => panic!("rotation ensemble produced a non-rotation"),
            })
            .collect()
    }

    #[test]
    fn rotation_ensemble_structure_and_correlations() {
        let c = sample_circuit(
            &rotation_spec(AngleCorrelation::SharedSingleAngle),
            &mut stream_rng(3, 0),
        )
        .unwrap();
        // per repetition: RX layer, RZ layer, three RZZ layers
        assert_eq!(c.depth(), 10);
        assert_eq!(c.gate_count(), 2 * (4 + 4 + 3));
        let a = angles(&c);
        assert!(a.iter().all(|&x| x == a[0]));

        let c = sample_circuit(
            &rotation_spec(AngleCorrelation::IndependentUniform),
            &mut stream_rng(3, 0),
        )
        .unwrap();
        let a = angles(&c);
        assert!(a.iter().all(|&x| (0.0..2.0 * PI).contains(&x)));
        assert!(a.windows(2).any(|w| w[0] != w[1]));

        let c = sample_circuit(
            &rotation_spec(AngleCorrelation::FixedAngles(vec![0.1, 0.2])),
            &mut stream_rng(3, 0),
        )
        .unwrap();
        let a = angles(&c);
        assert_eq!(&a[..3], &[0.1, 0.2, 0.1]);
    }

    #[test]
    fn every_layer_is_disjoint() {
        let spec = EnsembleSpec::haar(build_brickwork_1d(7, 5).unwrap(), 2);
        let c = sample_circuit(&spec, &mut stream_rng(9, 0)).unwrap();
        assert_eq!(c.depth(), 10);
        for layer in c.layers() {
            assert!(Layer::new(layer.gates().to_vec()).is_ok());
        }
    }

    #[test]
    fn angle_moments() {
        let (c2, s2, sc) = AngleDistribution::default().second_moments();
        assert!((c2 - 0.5).abs() < 1e-15 && (s2 - 0.5).abs() < 1e-15 && sc.abs() < 1e-15);
        let (c2, s2, sc) = AngleDistribution::Uniform {
            low: 0.0,
            high: PI / 2.0,
        }
        .second_moments();
        assert!((c2 - 0.5).abs() < 1e-15 && (s2 - 0.5).abs() < 1e-15);
        assert!((sc - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn invalid_specs() {
        let mut spec = rotation_spec(AngleCorrelation::FixedAngles(vec![]));
        assert!(spec.validate().is_err());
        spec.correlation = AngleCorrelation::IndependentUniform;
        spec.repetitions = 0;
        assert!(spec.validate().is_err());
    }
}
