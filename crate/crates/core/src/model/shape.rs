use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// One of the nine connected subgraphs of K4.
///
/// Canonical vertices are the tuple positions `0..vertex_count()`; the edge
/// lists below are the ones the bracket notation denotes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Shape {
    K2,
    P3,
    P4,
    K3,
    C4,
    K13,
    #[serde(rename = "KITE")]
    Kite,
    #[serde(rename = "K4E")]
    K4e,
    K4,
}

const K2_EDGES: &[(usize, usize)] = &[(0, 1)];
const P3_EDGES: &[(usize, usize)] = &[(0, 1), (1, 2)];
const P4_EDGES: &[(usize, usize)] = &[(0, 1), (1, 2), (2, 3)];
const K3_EDGES: &[(usize, usize)] = &[(0, 1), (0, 2), (1, 2)];
const C4_EDGES: &[(usize, usize)] = &[(0, 1), (1, 2), (2, 3), (3, 0)];
const K13_EDGES: &[(usize, usize)] = &[(0, 1), (0, 2), (0, 3)];
const KITE_EDGES: &[(usize, usize)] = &[(0, 1), (0, 2), (1, 2), (2, 3)];
const K4E_EDGES: &[(usize, usize)] = &[(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)];
const K4_EDGES: &[(usize, usize)] = &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl Shape {
    pub const ALL: [Shape; 9] = [
        Shape::K2,
        Shape::P3,
        Shape::P4,
        Shape::K3,
        Shape::C4,
        Shape::K13,
        Shape::Kite,
        Shape::K4e,
        Shape::K4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Shape::K2 => "K2",
            Shape::P3 => "P3",
            Shape::P4 => "P4",
            Shape::K3 => "K3",
            Shape::C4 => "C4",
            Shape::K13 => "K13",
            Shape::Kite => "KITE",
            Shape::K4e => "K4E",
            Shape::K4 => "K4",
        }
    }

    pub fn vertex_count(self) -> usize {
        match self {
            Shape::K2 => 2,
            Shape::P3 | Shape::K3 => 3,
            _ => 4,
        }
    }

    pub fn edges(self) -> &'static [(usize, usize)] {
        match self {
            Shape::K2 => K2_EDGES,
            Shape::P3 => P3_EDGES,
            Shape::P4 => P4_EDGES,
            Shape::K3 => K3_EDGES,
            Shape::C4 => C4_EDGES,
            Shape::K13 => K13_EDGES,
            Shape::Kite => KITE_EDGES,
            Shape::K4e => K4E_EDGES,
            Shape::K4 => K4_EDGES,
        }
    }

    pub fn edge_count(self) -> usize {
        self.edges().len()
    }

    /// Degree of each canonical vertex.
    pub fn degrees(self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count()];
        for &(a, b) in self.edges() {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Paths read the same in both directions.
    pub fn is_path(self) -> bool {
        matches!(self, Shape::P3 | Shape::P4)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Shape {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Shape::ALL
            .into_iter()
            .find(|shape| shape.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ModelError::UnknownShape(s.to_string()))
    }
}
