//! Experiment configuration: a single JSON document, checked against the
//! schema by serde and then semantically by [`ExperimentConfig::resolve`].

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use pauliprop::circuit::Layering;
use pauliprop::{
    build_brickwork_1d, build_staircase_2d, build_transfer, load_topology_edges, AngleCorrelation, AngleDistribution,
    EnsembleSpec, PauliSumF64, ProductState, RotationPattern, TopologySource, ORACLE_MAX_QUBITS,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::BenchError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologyConfig {
    /// Snake-ordered staircase on a grid; one gate per layer, depth counts repetitions.
    Staircase2d { rows: usize, cols: usize },
    /// Open-boundary brickwork; depth counts layers.
    Brickwork1d { n: usize },
    /// Edge list from a builtin name or a file, greedily packed into layers;
    /// depth counts repetitions.
    Edges {
        #[serde(default)]
        builtin: Option<String>,
        #[serde(default)]
        file: Option<PathBuf>,
        #[serde(default)]
        induced_prefix: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternConfig {
    pub generator: String,
    #[serde(default)]
    pub low: Option<f64>,
    #[serde(default)]
    pub high: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationConfig {
    Independent,
    Shared,
    Fixed(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnsembleConfig {
    HaarSu4,
    Rotations {
        patterns: Vec<PatternConfig>,
        #[serde(default = "independent")]
        correlation: CorrelationConfig,
    },
}

fn independent() -> CorrelationConfig {
    CorrelationConfig::Independent
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateConfig {
    /// `"zero"` or `"plus"`.
    Named(String),
    /// One Bloch vector per qubit.
    Bloch { bloch: Vec<[f64; 3]> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Propagate,
    McMse,
    EmpiricalMse,
    Trivial,
    Bound,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Propagate => "propagate",
            Estimator::McMse => "mc_mse",
            Estimator::EmpiricalMse => "empirical_mse",
            Estimator::Trivial => "trivial",
            Estimator::Bound => "bound",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub topology: TopologyConfig,
    pub ensemble: EnsembleConfig,
    pub depths: Vec<usize>,
    pub k: Vec<usize>,
    pub observable: String,
    #[serde(default = "zero_state")]
    pub state: StateConfig,
    pub estimators: Vec<Estimator>,
    /// Path samples per Monte Carlo estimate.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Circuits per oracle-based estimate.
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub coeff_eps: f64,
    #[serde(default)]
    pub max_terms: Option<usize>,
    /// Cutoff for the weight histogram; defaults to the largest swept `k`.
    #[serde(default)]
    pub weights_k: Option<usize>,
    #[serde(default = "yes")]
    pub record_timings: bool,
}

fn zero_state() -> StateConfig {
    StateConfig::Named("zero".into())
}
fn default_samples() -> usize {
    100_000
}
fn default_trials() -> usize {
    200
}
fn yes() -> bool {
    true
}

/// A validated configuration with its derived objects.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub config: ExperimentConfig,
    /// Hex SHA-256 of the configuration bytes.
    pub config_hash: String,
    /// Directory of the configuration file, for relative paths.
    pub base_dir: PathBuf,
    pub n_qubits: usize,
    pub observable: PauliSumF64,
    pub state: ProductState,
    pub estimators: BTreeSet<Estimator>,
}

fn field(name: impl Into<String>, message: impl Into<String>) -> BenchError {
    BenchError::Config {
        field: name.into(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    /// Parses JSON; syntax and schema errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        serde_json::from_str(text).map_err(|e| BenchError::ConfigSyntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Reads, parses and resolves the configuration at `path`.
    pub fn load(path: &Path) -> Result<Experiment, BenchError> {
        let bytes = std::fs::read(path).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone()).map_err(|_| field("", "configuration is not UTF-8"))?;
        let config = ExperimentConfig::from_json(&text)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        config.resolve(&bytes, base)
    }

    /// Semantic validation against the configured topology.
    pub fn resolve(self, raw: &[u8], base_dir: PathBuf) -> Result<Experiment, BenchError> {
        if self.name.trim().is_empty() || self.name.contains(['/', '\\']) {
            return Err(field("name", "must be a non-empty file-name stem"));
        }
        let n = self.n_qubits(&base_dir)?;
        if self.depths.is_empty() {
            return Err(field("depths", "must not be empty"));
        }
        if self.k.is_empty() {
            return Err(field("k", "must not be empty"));
        }
        for (i, &k) in self.k.iter().enumerate() {
            if k > n {
                return Err(field(
                    format!("k[{i}]"),
                    format!("{k} exceeds the {n} qubits of the topology"),
                ));
            }
        }
        if let Some(k) = self.weights_k {
            if k > n {
                return Err(field(
                    "weights_k",
                    format!("{k} exceeds the {n} qubits of the topology"),
                ));
            }
        }
        let observable =
            PauliSumF64::parse_literal(&self.observable, n).map_err(|e| field("observable", e.to_string()))?;
        if observable.is_empty() {
            return Err(field("observable", "is zero"));
        }
        let state = match &self.state {
            StateConfig::Named(s) if s == "zero" => ProductState::zero_state(n),
            StateConfig::Named(s) if s == "plus" => ProductState::plus_state(n),
            StateConfig::Named(s) => {
                return Err(field(
                    "state",
                    format!("unknown state `{s}`; use zero, plus or {{\"bloch\": [...]}}"),
                ))
            }
            StateConfig::Bloch { bloch } => {
                if bloch.len() != n {
                    return Err(field("state.bloch", format!("{} vectors for {n} qubits", bloch.len())));
                }
                ProductState::new(bloch.clone()).map_err(|e| field("state.bloch", e.to_string()))?
            }
        };
        if self.estimators.is_empty() {
            return Err(field("estimators", "must not be empty"));
        }
        let estimators: BTreeSet<Estimator> = self.estimators.iter().copied().collect();
        if !(self.coeff_eps >= 0.0 && self.coeff_eps.is_finite()) {
            return Err(field("coeff_eps", "must be finite and non-negative"));
        }
        if self.samples == 0 {
            return Err(field("samples", "must be positive"));
        }
        if self.trials == 0 {
            return Err(field("trials", "must be positive"));
        }
        let needs_oracle = estimators.contains(&Estimator::EmpiricalMse)
            || (estimators.contains(&Estimator::Trivial) && !self.path_sampling_supported());
        if needs_oracle && n > ORACLE_MAX_QUBITS {
            return Err(field(
                "estimators",
                format!("oracle-based estimates need at most {ORACLE_MAX_QUBITS} qubits, the topology has {n}"),
            ));
        }
        let experiment = Experiment {
            config_hash: hex(&Sha256::digest(raw)),
            base_dir,
            n_qubits: n,
            observable,
            state,
            estimators,
            config: self,
        };
        for (i, &depth) in experiment.config.depths.iter().enumerate() {
            if depth == 0 {
                continue;
            }
            let spec = experiment
                .ensemble(depth)
                .map_err(|e| field(format!("depths[{i}]"), e.to_string()))?;
            if experiment.estimators.contains(&Estimator::McMse) {
                build_transfer(&spec).map_err(|e| field("estimators", format!("mc_mse: {e}")))?;
            }
        }
        Ok(experiment)
    }

    fn path_sampling_supported(&self) -> bool {
        match &self.ensemble {
            EnsembleConfig::HaarSu4 => true,
            EnsembleConfig::Rotations { correlation, .. } => *correlation == CorrelationConfig::Independent,
        }
    }

    fn n_qubits(&self, base: &Path) -> Result<usize, BenchError> {
        Ok(match &self.topology {
            TopologyConfig::Staircase2d { rows, cols } => rows * cols,
            TopologyConfig::Brickwork1d { n } => *n,
            TopologyConfig::Edges { .. } => self.edge_topology(base)?.n_qubits(),
        })
    }

    fn edge_topology(&self, base: &Path) -> Result<pauliprop::Topology, BenchError> {
        let TopologyConfig::Edges {
            builtin,
            file,
            induced_prefix,
        } = &self.topology
        else {
            unreachable!("edge topology requested for a builder")
        };
        let source = match (builtin, file) {
            (Some(name), None) => TopologySource::Builtin(name.clone()),
            (None, Some(path)) => TopologySource::File(base.join(path)),
            _ => return Err(field("topology", "give exactly one of `builtin` and `file`")),
        };
        let t = load_topology_edges(&source).map_err(|e| field("topology", e.to_string()))?;
        match induced_prefix {
            Some(m) => t
                .induced_prefix(*m)
                .map_err(|e| field("topology.induced_prefix", e.to_string())),
            None => Ok(t),
        }
    }
}

impl Experiment {
    /// The circuit ensemble at `depth` (`depth ≥ 1`).
    pub fn ensemble(&self, depth: usize) -> pauliprop::Result<EnsembleSpec> {
        let c = &self.config;
        let (layering, repetitions): (Layering, usize) = match &c.topology {
            TopologyConfig::Staircase2d { rows, cols } => (build_staircase_2d(*rows, *cols, 1)?, depth),
            TopologyConfig::Brickwork1d { n } => (build_brickwork_1d(*n, depth)?, 1),
            TopologyConfig::Edges { .. } => {
                let t = c
                    .edge_topology(&self.base_dir)
                    .map_err(|e| pauliprop::Error::InvalidTopology(e.to_string()))?;
                (Layering::greedy(t), depth)
            }
        };
        let spec = match &c.ensemble {
            EnsembleConfig::HaarSu4 => EnsembleSpec::haar(layering, repetitions),
            EnsembleConfig::Rotations { patterns, correlation } => {
                let patterns = patterns
                    .iter()
                    .map(|p| {
                        let mut pattern = RotationPattern::uniform(&p.generator)?;
                        if p.low.is_some() || p.high.is_some() {
                            let AngleDistribution::Uniform { low, high } = pattern.distribution;
                            pattern.distribution = AngleDistribution::Uniform {
                                low: p.low.unwrap_or(low),
                                high: p.high.unwrap_or(high),
                            };
                        }
                        Ok(pattern)
                    })
                    .collect::<pauliprop::Result<Vec<_>>>()?;
                let correlation = match correlation {
                    CorrelationConfig::Independent => AngleCorrelation::IndependentUniform,
                    CorrelationConfig::Shared => AngleCorrelation::SharedSingleAngle,
                    CorrelationConfig::Fixed(a) => AngleCorrelation::FixedAngles(a.clone()),
                };
                EnsembleSpec::rotations(layering, patterns, correlation, repetitions)
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn weights_k(&self) -> usize {
        self.config
            .weights_k
            .unwrap_or_else(|| *self.config.k.iter().max().expect("k is non-empty"))
    }

    /// Whether Monte Carlo path sampling applies to this ensemble.
    pub fn path_sampling_supported(&self) -> bool {
        self.config.path_sampling_supported()
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
