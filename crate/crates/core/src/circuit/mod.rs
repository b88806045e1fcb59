//! Circuit representation, topology builders and random circuit ensembles.

mod ensemble;
mod gate;
mod layer;
mod topology;

pub use ensemble::{
    sample_circuit, sample_haar_su4, sample_haar_u2, sample_indexed_circuit, AngleCorrelation, AngleDistribution,
    EnsembleSpec, GateFamily, RotationPattern, Slot, SlotKind,
};
pub use gate::{CliffordKind, Gate, GateKind, Support, UnitaryMatrix};
pub use layer::{Circuit, Layer};
pub use topology::{
    build_brickwork_1d, build_staircase_2d, load_topology_edges, parse_topology_edges, Layering, Topology,
    TopologySource, BUILTIN_TOPOLOGIES,
};
