//! Generators, brute-force oracles and structural verifiers.
//!
//! Everything here favors obvious correctness over speed and is meant for
//! tests, `--verify` paths and benchmarks.

pub mod fixtures;
mod generators;
mod oracles;
mod verify;

pub use generators::{
    bouquet, cartesian_product, generate, grid, hypercube, median_closure, path, random_tree,
    GeneratorSpec, MAX_GENERATED,
};
pub use oracles::{
    brute_ecc, brute_ecc_with_limit, brute_median_set, djokovic_partition, oracle_limit,
    AllPairsOracle, DEFAULT_ORACLE_LIMIT, ORACLE_LIMIT_ENV,
};
pub use verify::{is_median_graph, verify_structure, StructureReport, FULL_CHECK_LIMIT};
