//! Points, shapes, blocks, classes and designs.

mod block;
mod design;
mod json;
mod point;
mod shape;

pub use block::{edge, parse_block, Block, Edge};
pub use design::{format_type, repeat, GroupedDesign, GroupedKind, ParallelClass, ResolvableDesign};
pub use json::{ClassFile, DesignFile, Document};
pub use point::Point;
pub use shape::Shape;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("malformed block: {0}")]
    MalformedBlock(String),
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("unknown shape '{0}' (expected one of K2, P3, P4, K3, C4, K13, KITE, K4E, K4)")]
    UnknownShape(String),
    #[error("invalid point label '{0}'")]
    BadPoint(String),
    #[error("point {0} has no image under the relabeling")]
    Unmapped(Point),
    #[error("invalid design file: {0}")]
    Json(String),
}

/// Parses a comma-free list of point labels, e.g. `["0", "inf"]`.
pub fn points<I, S>(labels: I) -> Result<Vec<Point>, ModelError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    labels.into_iter().map(|s| s.as_ref().parse()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_point() -> impl Strategy<Value = Point> {
        prop_oneof![
            (0u32..500).prop_map(Point::Int),
            (0u32..20).prop_map(Point::Inf),
            (prop::sample::select(vec!['x', 'y', 'z']), 1u32..9).prop_map(|(c, i)| Point::Sym(c, i)),
        ]
    }

    fn arb_block() -> impl Strategy<Value = Block> {
        (prop::sample::select(Shape::ALL.to_vec()), prop::collection::btree_set(arb_point(), 4))
            .prop_flat_map(|(shape, set)| {
                let pts: Vec<Point> = set.into_iter().collect();
                Just(pts).prop_shuffle().prop_map(move |mut pts| {
                    pts.truncate(shape.vertex_count());
                    Block::new(shape, pts).unwrap()
                })
            })
    }

    proptest! {
        #[test]
        fn parse_format_round_trip(block in arb_block()) {
            let text = block.to_string();
            let back = parse_block(&text, block.shape()).unwrap();
            prop_assert_eq!(back, block);
        }

        #[test]
        fn edges_live_on_the_tuple(block in arb_block()) {
            let edges = block.edges();
            prop_assert_eq!(edges.len(), block.shape().edge_count());
            let mut sorted = edges.clone();
            sorted.sort();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), edges.len());
            for (a, b) in edges {
                prop_assert!(block.points().contains(&a) && block.points().contains(&b));
            }
        }
    }
}
