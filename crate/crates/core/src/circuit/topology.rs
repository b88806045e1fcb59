use std::path::PathBuf;

use crate::error::{Error, Result};

const HEAVYHEX127: &str = include_str!("../../data/heavyhex127.txt");

/// Builtin topologies accepted by [`load_topology_edges`].
pub const BUILTIN_TOPOLOGIES: &[&str] = &["heavyhex127"];

/// Undirected coupling graph with a meaningful edge order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    n_qubits: usize,
    edges: Vec<(usize, usize)>,
    name: String,
}

impl Topology {
    pub fn new(n_qubits: usize, edges: Vec<(usize, usize)>, name: impl Into<String>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidTopology("zero qubits".into()));
        }
        for &(u, v) in &edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let q = u.max(v);
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
            }
        }
        Ok(Topology {
            n_qubits,
            edges,
            name: name.into(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Subgraph induced by qubits `0..m`, keeping the edge order.
    pub fn induced_prefix(&self, m: usize) -> Result<Topology> {
        if m == 0 || m > self.n_qubits {
            return Err(Error::InvalidTopology(format!(
                "prefix {m} not in 1..={}",
                self.n_qubits
            )));
        }
        let edges = self.edges.iter().copied().filter(|&(u, v)| u < m && v < m).collect();
        Topology::new(m, edges, format!("{}[..{m}]", self.name))
    }
}

/// A topology together with the slot order of one circuit repetition.
///
/// Each inner vector is one layer of two-qubit gate slots with disjoint supports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layering {
    topology: Topology,
    layers: Vec<Vec<(usize, usize)>>,
}

impl Layering {
    pub fn new(topology: Topology, layers: Vec<Vec<(usize, usize)>>) -> Result<Self> {
        for layer in &layers {
            if layer.is_empty() {
                return Err(Error::EmptyLayer);
            }
            let mut seen = Vec::new();
            for &(u, v) in layer {
                for q in [u, v] {
                    if q >= topology.n_qubits {
                        return Err(Error::QubitOutOfRange {
                            qubit: q,
                            n_qubits: topology.n_qubits,
                        });
                    }
                    if seen.contains(&q) {
                        return Err(Error::OverlappingSupports(q));
                    }
                    seen.push(q);
                }
                if u == v {
                    return Err(Error::SelfLoop(u));
                }
            }
        }
        Ok(Layering { topology, layers })
    }

    /// One edge per layer, in edge order.
    pub fn sequential(topology: Topology) -> Self {
        let layers = topology.edges.iter().map(|&e| vec![e]).collect();
        Layering { topology, layers }
    }

    /// As-soon-as-possible packing of the edge sequence: every edge lands one
    /// layer after the latest earlier edge sharing a qubit. The product of the
    /// layers equals the sequential product.
    pub fn greedy(topology: Topology) -> Self {
        let mut next_free = vec![0usize; topology.n_qubits];
        let mut layers: Vec<Vec<(usize, usize)>> = Vec::new();
        for &(u, v) in &topology.edges {
            let slot = next_free[u].max(next_free[v]);
            if slot == layers.len() {
                layers.push(Vec::new());
            }
            layers[slot].push((u, v));
            next_free[u] = slot + 1;
            next_free[v] = slot + 1;
        }
        Layering { topology, layers }
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn n_qubits(&self) -> usize {
        self.topology.n_qubits
    }

    pub fn layers(&self) -> &[Vec<(usize, usize)>] {
        &self.layers
    }

    pub fn slot_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }
}

/// Sequential two-qubit slots along a snake path through a `rows × cols` grid.
///
/// The snake visits row 0 left to right, row 1 right to left, and so on; qubit
/// `r·cols + c` sits at grid position `(r, c)`. Within each repetition the path
/// edges are emitted in reverse, `(p_{rc-2}, p_{rc-1})` first and `(p_0, p_1)`
/// last, one gate per layer. Back-propagating an observable on `p_0` therefore
/// meets the path in order and covers every qubit after one repetition.
pub fn build_staircase_2d(rows: usize, cols: usize, repetitions: usize) -> Result<Layering> {
    let n = rows * cols;
    if n < 2 {
        return Err(Error::InvalidTopology(format!(
            "staircase needs at least 2 qubits, got {rows}x{cols}"
        )));
    }
    if repetitions == 0 {
        return Err(Error::InvalidArgument("repetitions must be positive".into()));
    }
    let path: Vec<usize> = (0..rows)
        .flat_map(|r| {
            let row: Vec<usize> = (0..cols).map(|c| r * cols + c).collect();
            if r % 2 == 0 {
                row
            } else {
                row.into_iter().rev().collect()
            }
        })
        .collect();
    let pass: Vec<(usize, usize)> = path.windows(2).rev().map(|w| (w[0], w[1])).collect();
    let topology = Topology::new(n, pass.clone(), format!("staircase{rows}x{cols}"))?;
    let layers = (0..repetitions).flat_map(|_| pass.iter().map(|&e| vec![e])).collect();
    Ok(Layering { topology, layers })
}

/// Alternating nearest-neighbour layers: odd layers `(0,1),(2,3),…`, even layers `(1,2),(3,4),…`.
pub fn build_brickwork_1d(n: usize, depth: usize) -> Result<Layering> {
    if n < 2 {
        return Err(Error::InvalidTopology(format!("brickwork needs n >= 2, got {n}")));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be positive".into()));
    }
    let edges: Vec<(usize, usize)> = (0..n - 1).map(|q| (q, q + 1)).collect();
    let topology = Topology::new(n, edges, format!("brickwork{n}"))?;
    // With two qubits the even layers would be empty; every layer reuses the only edge.
    let layers = if n == 2 {
        vec![vec![(0, 1)]; depth]
    } else {
        (0..depth)
            .map(|l| (l % 2..n - 1).step_by(2).map(|q| (q, q + 1)).collect())
            .collect()
    };
    Ok(Layering { topology, layers })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopologySource {
    Builtin(String),
    File(PathBuf),
    Text(String),
}

/// Edge list text: one `u v` pair per line, `#` starts a comment. The qubit
/// count is one more than the largest index unless `n_qubits` is given.
pub fn parse_topology_edges(text: &str, name: &str, n_qubits: Option<usize>) -> Result<Topology> {
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::TopologyParse { line: i + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(format!("expected `u v`, got `{line}`")));
        }
        let u: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(format!("bad index `{}`", fields[0])))?;
        let v: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(format!("bad index `{}`", fields[1])))?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        edges.push((u, v));
    }
    let inferred = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = n_qubits.unwrap_or(inferred);
    Topology::new(n, edges, name)
}

pub fn load_topology_edges(source: &TopologySource) -> Result<Topology> {
    match source {
        TopologySource::Builtin(name) => match name.as_str() {
            "heavyhex127" => parse_topology_edges(HEAVYHEX127, "heavyhex127", Some(127)),
            other => Err(Error::UnknownBuiltin(other.to_string())),
        },
        TopologySource::File(path) => {
            let text = std::fs::read_to_string(path)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "edges".into());
            parse_topology_edges(&text, &name, None)
        }
        TopologySource::Text(text) => parse_topology_edges(text, "edges", None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_examples() {
        let l = build_staircase_2d(1, 2, 1).unwrap();
        assert_eq!(l.layers(), &[vec![(0, 1)]]);
        let l = build_staircase_2d(2, 2, 1).unwrap();
        assert_eq!(l.layers(), &[vec![(3, 2)], vec![(1, 3)], vec![(0, 1)]]);
        let l2 = build_staircase_2d(2, 2, 2).unwrap();
        assert_eq!(l2.layers().len(), 6);
        assert_eq!(&l2.layers()[3..], l.layers());
        assert!(build_staircase_2d(1, 1, 1).is_err());
        assert_eq!(build_staircase_2d(4, 4, 1).unwrap().slot_count(), 15);
    }

    #[test]
    fn brickwork_examples() {
        let l = build_brickwork_1d(4, 2).unwrap();
        assert_eq!(l.layers(), &[vec![(0, 1), (2, 3)], vec![(1, 2)]]);
        let l = build_brickwork_1d(2, 3).unwrap();
        assert_eq!(l.layers(), &[vec![(0, 1)], vec![(0, 1)], vec![(0, 1)]]);
        let l = build_brickwork_1d(5, 1).unwrap();
        assert_eq!(l.layers(), &[vec![(0, 1), (2, 3)]]);
        assert!(build_brickwork_1d(1, 3).is_err());
    }

    #[test]
    fn builtin_heavyhex() {
        let t = load_topology_edges(&TopologySource::Builtin("heavyhex127".into())).unwrap();
        let lines = HEAVYHEX127
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .count();
        assert_eq!(t.n_qubits(), 127);
        assert_eq!(t.edges().len(), lines);
        let mut degree = vec![0; 127];
        for &(u, v) in t.edges() {
            degree[u] += 1;
            degree[v] += 1;
        }
        assert!(degree.iter().all(|&d| (1..=3).contains(&d)));
        assert!(matches!(
            load_topology_edges(&TopologySource::Builtin("grid9".into())),
            Err(Error::UnknownBuiltin(_))
        ));
    }

    #[test]
    fn edge_text_parsing() {
        let t = load_topology_edges(&TopologySource::Text("0 1\n1 2".into())).unwrap();
        assert_eq!(t.n_qubits(), 3);
        assert_eq!(t.edges(), &[(0, 1), (1, 2)]);
        assert!(matches!(
            load_topology_edges(&TopologySource::Text("0 0".into())),
            Err(Error::SelfLoop(0))
        ));
        assert!(matches!(
            parse_topology_edges("# c\n0 x\n", "t", None),
            Err(Error::TopologyParse { line: 2, .. })
        ));
        assert!(matches!(
            parse_topology_edges("0 5\n", "t", Some(3)),
            Err(Error::QubitOutOfRange { qubit: 5, .. })
        ));
    }

    #[test]
    fn greedy_layering_respects_order() {
        let t = Topology::new(4, vec![(0, 1), (2, 3), (1, 2), (0, 1)], "t").unwrap();
        let l = Layering::greedy(t);
        assert_eq!(l.layers(), &[vec![(0, 1), (2, 3)], vec![(1, 2)], vec![(0, 1)]]);
        let hh = load_topology_edges(&TopologySource::Builtin("heavyhex127".into())).unwrap();
        let l = Layering::greedy(hh);
        assert_eq!(l.slot_count(), 144);
        assert!(Layering::new(l.topology().clone(), l.layers().to_vec()).is_ok());
    }
}
