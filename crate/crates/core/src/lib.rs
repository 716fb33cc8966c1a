//! Median graphs: Θ-classes, all weighted eccentricities in quasilinear
//! time, and a distance oracle with poly-logarithmic labels.

#![allow(clippy::needless_range_loop)]

pub mod eccentricities;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod testkit;
pub mod theta;
pub mod unionfind;

pub use eccentricities::{morse, morse_with_stats, BalanceVerdict, EccVector, MorseStats, SliceDecomposition};
pub use error::{Error, Result};
pub use oracle::{build_oracle, label_size_bits, ladder_sequence, query, HopOrder, LabelTable, LevelRecord};
pub use graph::{
    bfs_distances, gated_bfs, induced_subgraph, DistanceVector, GateAssignment, Graph,
    SubgraphMap, Validation, VertexWeights,
};
pub use theta::{
    boundaries, compute_theta_classes, halfspace_sizes_all, is_pof, ladder_table, median_set,
    ClassSet, HalfspaceSizes, LadderTable, ThetaPartition,
};
pub use unionfind::UnionFind;
