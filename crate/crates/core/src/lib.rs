//! Construction, planning and certification of resolvable G-designs of
//! order v and index λ, for G a connected subgraph of K4.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: points, shapes, blocks, parallel classes, designs and the
//!   JSON exchange format.
//! - [`admissibility`]: necessary conditions and the known spectrum.
//! - [`development`]: cyclic and subscript development of base blocks.
//! - [`verifier`]: exhaustive certificate checks.
//! - [`catalog`]: built-in small designs and classical ingredients, plus
//!   import of externally supplied ones.
//! - [`constructions`]: recursive machinery and the planner.
//! - [`search`]: backtracking for small designs and nonexistence proofs.
//! - [`cli`]: the `rdk` command-line front end.

pub mod admissibility;
pub mod catalog;
pub mod cli;
pub mod constructions;
pub mod development;
pub mod model;
pub mod search;
pub mod verifier;

pub use model::{Block, GroupedDesign, GroupedKind, ParallelClass, Point, ResolvableDesign, Shape};
