use std::fmt;

use num_complex::Complex64;

use super::gate::{CliffordKind, Gate, GateKind, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Gates with pairwise-disjoint supports, applied simultaneously.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    gates: Vec<Gate>,
}

impl Layer {
    pub fn new(gates: Vec<Gate>) -> Result<Layer> {
        if gates.is_empty() {
            return Err(Error::EmptyLayer);
        }
        let mut seen: Vec<usize> = Vec::new();
        for g in &gates {
            for &q in g.support() {
                if seen.contains(&q) {
                    return Err(Error::OverlappingSupports(q));
                }
                seen.push(q);
            }
        }
        Ok(Layer { gates })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.gates.iter().flat_map(|g| g.support().iter().copied())
    }

    pub fn max_qubit(&self) -> usize {
        self.qubits().max().unwrap_or(0)
    }
}

/// `U = U_L ⋯ U_1`; `layers[0]` is `U_1`, the first layer in circuit time.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    layers: Vec<Layer>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Circuit {
        Circuit {
            n_qubits,
            layers: Vec::new(),
        }
    }

    pub fn push_layer(&mut self, layer: Layer) -> Result<()> {
        let q = layer.max_qubit();
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                n_qubits: self.n_qubits,
            });
        }
        self.layers.push(layer);
        Ok(())
    }

    /// Appends each gate as its own single-gate layer.
    pub fn push_sequential(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push_layer(Layer::new(vec![g])?)?;
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(|l| l.gates.len()).sum()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flat_map(|l| l.gates.iter())
    }

    /// Parses the text produced by `Display`.
    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, msg: &str| Error::InvalidArgument(format!("circuit line {line}: {msg}"));
        let (line_no, header) = lines.next().ok_or_else(|| err(0, "missing header"))?;
        let n_qubits: usize = header
            .strip_prefix("circuit ")
            .and_then(|n| n.trim().parse().ok())
            .ok_or_else(|| err(line_no, "expected `circuit <n_qubits>`"))?;
        let mut circuit = Circuit::new(n_qubits);
        let mut pending: Option<Vec<Gate>> = None;
        for (line_no, line) in lines {
            if line == "layer" {
                if let Some(gates) = pending.take() {
                    circuit.push_layer(Layer::new(gates)?)?;
                }
                pending = Some(Vec::new());
                continue;
            }
            let gates = pending
                .as_mut()
                .ok_or_else(|| err(line_no, "gate before first `layer`"))?;
            gates.push(parse_gate_line(line).map_err(|e| err(line_no, &e.to_string()))?);
        }
        if let Some(gates) = pending {
            circuit.push_layer(Layer::new(gates)?)?;
        }
        Ok(circuit)
    }
}

fn parse_gate_line(line: &str) -> Result<Gate> {
    let bad = || Error::InvalidGate(line.to_string());
    let mut tokens = line.split_whitespace();
    let kind = tokens.next().ok_or_else(bad)?;
    match kind {
        "clifford" => {
            let name = tokens.next().ok_or_else(bad)?;
            let c = CliffordKind::from_name(name).ok_or_else(bad)?;
            let support = tokens
                .map(|t| t.parse().map_err(|_| bad()))
                .collect::<Result<Vec<usize>>>()?;
            Gate::clifford(c, &support)
        }
        "rotation" => {
            let generator: PauliString = tokens.next().ok_or_else(bad)?.parse()?;
            let mut support = Vec::new();
            let mut angle = None;
            for t in tokens {
                if let Some(a) = t.strip_prefix("angle=") {
                    angle = Some(a.parse::<f64>().map_err(|_| bad())?);
                } else {
                    support.push(t.parse().map_err(|_| bad())?);
                }
            }
            Gate::new(
                &support,
                GateKind::Rotation {
                    generator,
                    angle: angle.ok_or_else(bad)?,
                },
            )
        }
        "unitary" => {
            let mut support = Vec::new();
            let mut data = None;
            for t in tokens {
                if let Some(m) = t.strip_prefix("matrix=") {
                    let entries = m
                        .split(';')
                        .map(|pair| {
                            let (re, im) = pair.split_once(',').ok_or_else(bad)?;
                            Ok(Complex64::new(
                                re.parse().map_err(|_| bad())?,
                                im.parse().map_err(|_| bad())?,
                            ))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    data = Some(entries);
                } else {
                    support.push(t.parse().map_err(|_| bad())?);
                }
            }
            let dim = 1usize << support.len();
            Gate::unitary(&support, UnitaryMatrix::new(dim, data.ok_or_else(bad)?)?)
        }
        _ => Err(bad()),
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "circuit {}", self.n_qubits)?;
        for layer in &self.layers {
            writeln!(f, "layer")?;
            for g in &layer.gates {
                writeln!(f, "  {g}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layer_rejects_overlap_and_empty() {
        assert!(matches!(
            Layer::new(vec![Gate::cnot(0, 1), Gate::h(1)]),
            Err(Error::OverlappingSupports(1))
        ));
        assert!(matches!(Layer::new(vec![]), Err(Error::EmptyLayer)));
        assert!(Layer::new(vec![Gate::cnot(0, 1), Gate::h(2)]).is_ok());
    }

    #[test]
    fn circuit_rejects_out_of_range() {
        let mut c = Circuit::new(2);
        assert!(c.push_layer(Layer::new(vec![Gate::h(2)]).unwrap()).is_err());
        assert_eq!(c.depth(), 0);
    }

    #[test]
    fn text_round_trip() {
        let mut c = Circuit::new(3);
        c.push_layer(Layer::new(vec![Gate::h(0), Gate::rzz(1, 2, 0.123456789).unwrap()]).unwrap())
            .unwrap();
        let theta: f64 = 0.7;
        let u = UnitaryMatrix::new(
            2,
            vec![
                Complex64::new(theta.cos(), 0.0),
                Complex64::new(0.0, -theta.sin()),
                Complex64::new(0.0, -theta.sin()),
                Complex64::new(theta.cos(), 0.0),
            ],
        )
        .unwrap();
        c.push_layer(Layer::new(vec![Gate::unitary(&[2], u).unwrap(), Gate::cnot(1, 0)]).unwrap())
            .unwrap();
        let text = c.to_string();
        assert_eq!(Circuit::from_text(&text).unwrap(), c);
        assert!(Circuit::from_text("circuit 2\nclifford H 0").is_err());
        assert!(Circuit::from_text("layer\n").is_err());
    }
}
