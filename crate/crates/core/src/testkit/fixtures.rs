//! Small hand-drawn median graphs with named vertices.

use crate::graph::{Graph, Validation};

/// Vertex names of [`three_cube_with_wings`], indexed by vertex id.
pub const WINGS_NAMES: [&str; 21] = [
    "a1", "a2", "b1", "b2", "b3", "c1", "c2", "c3", "d1", "d2", "d3", "d4", "e1", "e2", "f1",
    "f2", "d5", "g1", "g2", "g3", "g4",
];

/// Vertex id of a name from [`WINGS_NAMES`].
pub fn wings_id(name: &str) -> usize {
    WINGS_NAMES
        .iter()
        .position(|&x| x == name)
        .unwrap_or_else(|| panic!("no vertex named {name}"))
}

/// A 21-vertex median graph of dimension 3: a 2x3 grid of squares with a
/// 3-cube hanging off its right column and a few squares and pendant edges
/// on the left.
pub fn three_cube_with_wings() -> Graph {
    let pairs = [
        ("a1", "a2"),
        ("a1", "b1"),
        ("a2", "b2"),
        ("b1", "b2"),
        ("b1", "c1"),
        ("b2", "c2"),
        ("c1", "c2"),
        ("b2", "b3"),
        ("b3", "c3"),
        ("c2", "c3"),
        ("b2", "d1"),
        ("a2", "d3"),
        ("b3", "d2"),
        ("d1", "d3"),
        ("d1", "d2"),
        ("a2", "d4"),
        ("b3", "e1"),
        ("c3", "e2"),
        ("e1", "e2"),
        ("c1", "f1"),
        ("c2", "f2"),
        ("f1", "f2"),
        ("d3", "d5"),
        ("g1", "g2"),
        ("g1", "g3"),
        ("g2", "g4"),
        ("g3", "g4"),
        ("c1", "g1"),
        ("c2", "g2"),
        ("f1", "g3"),
        ("f2", "g4"),
    ];
    Graph::from_edges(
        WINGS_NAMES.len(),
        pairs.iter().map(|&(a, b)| (wings_id(a), wings_id(b))),
        Validation::Check,
    )
    .expect("fixture is a valid graph")
}
