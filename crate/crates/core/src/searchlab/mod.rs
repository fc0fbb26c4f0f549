//! Search-instance generation and measurement-based search experiments:
//! expander sampling, edge coloring, the frustration-free search family,
//! the two-measurement search protocol, and the lattice search scan.

pub mod coloring;
pub mod graph;
pub mod instance;
pub mod lattice;
pub mod search;

pub use coloring::{misra_gries_edge_color, verify_proper, EdgeColoring};
pub use graph::{complete_graph, random_regular_expander, torus_adjacency, RegularGraph};
pub use instance::{
    build_search_ff, gap_certificate, search_ground_state, GapCertificate, SearchInstance,
};
pub use lattice::{lattice_family, LatticeFamily, LatticeScan, ScanPoint};
pub use search::{measurement_search, wilson_lower_bound, SearchStats};
