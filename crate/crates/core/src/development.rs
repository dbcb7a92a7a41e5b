//! Modular development of base blocks.
//!
//! Three flavours: translating integer labels through Z_n (infinity points
//! stay put), translating one block at a fixed stride to collect disjoint
//! translates into a class, and rotating subscripts of `x_i`, `y_i`-style
//! symbols modulo m. Every produced class is checked to be a partition of
//! its ambient points minus the declared missing set.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{parse_block, Block, ModelError, ParallelClass, Point, Shape};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DevelopError {
    #[error("translate by {shift} is not a class: point {point} repeats")]
    NotAClass { shift: u32, point: Point },
    #[error("base class is fixed by the shift {shift}; short orbits are not supported")]
    ShortOrbit { shift: u32 },
    #[error("label {point} is outside Z_{modulus}")]
    OutOfRange { point: Point, modulus: u32 },
    #[error("point {0} is neither an integer nor a declared fixed point")]
    UndeclaredFixed(Point),
    #[error("stride {step} does not divide modulus {modulus}")]
    BadStride { step: u32, modulus: u32 },
    #[error("subscript of {point} is outside 1..={modulus}")]
    BadSubscript { point: Point, modulus: u32 },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Base blocks over Z_n plus fixed points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseClass {
    pub blocks: Vec<Block>,
    pub modulus: u32,
    pub fixed: BTreeSet<Point>,
}

impl BaseClass {
    pub fn new(blocks: Vec<Block>, modulus: u32, fixed: impl IntoIterator<Item = Point>) -> Self {
        BaseClass {
            blocks,
            modulus,
            fixed: fixed.into_iter().collect(),
        }
    }

    /// Z_n ∪ fixed.
    pub fn ambient(&self) -> BTreeSet<Point> {
        (0..self.modulus)
            .map(Point::Int)
            .chain(self.fixed.iter().copied())
            .collect()
    }

    fn validate(&self) -> Result<(), DevelopError> {
        if self.modulus == 0 {
            return Err(DevelopError::ZeroModulus);
        }
        for b in &self.blocks {
            for &p in b.points() {
                match p {
                    Point::Int(x) if x >= self.modulus => {
                        return Err(DevelopError::OutOfRange {
                            point: p,
                            modulus: self.modulus,
                        })
                    }
                    Point::Int(_) => {}
                    _ if self.fixed.contains(&p) => {}
                    _ => return Err(DevelopError::UndeclaredFixed(p)),
                }
            }
        }
        Ok(())
    }
}

/// Adds `shift` to integer labels modulo `modulus`; other points are fixed.
pub fn translate(p: Point, shift: u32, modulus: u32) -> Point {
    match p {
        Point::Int(x) => Point::Int((x + shift) % modulus),
        other => other,
    }
}

/// Rotates the subscript of symbol points within `1..=modulus`.
pub fn rotate_subscript(p: Point, shift: u32, modulus: u32) -> Point {
    match p {
        Point::Sym(c, i) => Point::Sym(c, 1 + (i - 1 + shift) % modulus),
        other => other,
    }
}

fn shifted_class(
    blocks: &[Block],
    shift: u32,
    ambient: &BTreeSet<Point>,
    f: impl Fn(Point) -> Point,
) -> Result<ParallelClass, DevelopError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(blocks.len());
    for b in blocks {
        let moved = b.map_points(&f)?;
        for &p in moved.points() {
            if !seen.insert(p) {
                return Err(DevelopError::NotAClass { shift, point: p });
            }
        }
        out.push(moved);
    }
    let missing = ambient.difference(&seen).copied().collect();
    Ok(ParallelClass::partial(out, missing))
}

fn class_key(class: &ParallelClass) -> BTreeSet<Vec<(Point, Point)>> {
    class.blocks.iter().map(Block::edge_key).collect()
}

/// Rejects base classes mapped onto themselves by a proper shift.
fn reject_short_orbit(classes: &[ParallelClass]) -> Result<(), DevelopError> {
    let n = classes.len();
    if n < 2 {
        return Ok(());
    }
    let base = class_key(&classes[0]);
    for s in 1..n {
        if n % s == 0 && class_key(&classes[s]) == base {
            return Err(DevelopError::ShortOrbit { shift: s as u32 });
        }
    }
    Ok(())
}

/// Develops a base class through Z_n: n classes in shift order.
pub fn develop_classes(base: &BaseClass) -> Result<Vec<ParallelClass>, DevelopError> {
    base.validate()?;
    let ambient = base.ambient();
    let n = base.modulus;
    let classes = (0..n)
        .map(|s| shifted_class(&base.blocks, s, &ambient, |p| translate(p, s, n)))
        .collect::<Result<Vec<_>, _>>()?;
    reject_short_orbit(&classes)?;
    Ok(classes)
}

/// Collects the translates of one block at stride `step`.
///
/// Class `s` is `{block + s, block + s + step, ..., block + s + n − step}`
/// for `s` in `0..step`; each must be vertex-disjoint.
pub fn develop_grouped(block: &Block, modulus: u32, step: u32) -> Result<Vec<ParallelClass>, DevelopError> {
    if modulus == 0 {
        return Err(DevelopError::ZeroModulus);
    }
    if step == 0 || modulus % step != 0 {
        return Err(DevelopError::BadStride { step, modulus });
    }
    let base = BaseClass::new(vec![block.clone()], modulus, std::iter::empty());
    base.validate()?;
    let ambient = base.ambient();
    let translates: Vec<Block> = (0..modulus / step)
        .map(|k| block.map_points(|p| translate(p, k * step, modulus)))
        .collect::<Result<_, _>>()?;
    (0..step)
        .map(|s| shifted_class(&translates, s, &ambient, |p| translate(p, s, modulus)))
        .collect()
}

/// Develops a class over subscripted symbols by rotating subscripts mod `m`.
pub fn develop_subscripts(blocks: &[Block], modulus: u32) -> Result<Vec<ParallelClass>, DevelopError> {
    if modulus == 0 {
        return Err(DevelopError::ZeroModulus);
    }
    let mut letters = BTreeSet::new();
    let mut fixed = BTreeSet::new();
    for b in blocks {
        for &p in b.points() {
            match p {
                Point::Sym(c, i) => {
                    if i == 0 || i > modulus {
                        return Err(DevelopError::BadSubscript { point: p, modulus });
                    }
                    letters.insert(c);
                }
                other => {
                    fixed.insert(other);
                }
            }
        }
    }
    let ambient: BTreeSet<Point> = letters
        .iter()
        .flat_map(|&c| (1..=modulus).map(move |i| Point::Sym(c, i)))
        .chain(fixed)
        .collect();
    let classes = (0..modulus)
        .map(|s| shifted_class(blocks, s, &ambient, |p| rotate_subscript(p, s, modulus)))
        .collect::<Result<Vec<_>, _>>()?;
    reject_short_orbit(&classes)?;
    Ok(classes)
}

/// A block in a file: either a label array or bracket notation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BlockSpec {
    Tuple(Vec<Point>),
    Notation(String),
}

impl BlockSpec {
    pub fn to_block(&self, shape: Shape) -> Result<Block, ModelError> {
        match self {
            BlockSpec::Tuple(t) => Block::new(shape, t.clone()),
            BlockSpec::Notation(s) => parse_block(s, shape),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupedSpec {
    pub block: BlockSpec,
    pub step: u32,
}

/// Base-block file:
/// `{ "shape": "K4E", "modulus": 19, "fixed": ["inf"], "baseClasses": [[...]], "grouped": [{"block": [...], "step": 4}] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BaseBlockFile {
    pub shape: Shape,
    pub modulus: u32,
    #[serde(default)]
    pub fixed: Vec<Point>,
    #[serde(default)]
    pub base_classes: Vec<Vec<BlockSpec>>,
    #[serde(default)]
    pub grouped: Vec<GroupedSpec>,
}

impl BaseBlockFile {
    /// Developed classes: each base class in file order, then each grouped
    /// block. Missing sets are taken against Z_n ∪ fixed.
    pub fn develop(&self) -> Result<Vec<ParallelClass>, DevelopError> {
        let ambient: BTreeSet<Point> = (0..self.modulus)
            .map(Point::Int)
            .chain(self.fixed.iter().copied())
            .collect();
        let mut out = Vec::new();
        for bc in &self.base_classes {
            let blocks = bc
                .iter()
                .map(|b| b.to_block(self.shape))
                .collect::<Result<Vec<_>, _>>()?;
            out.extend(develop_classes(&BaseClass::new(
                blocks,
                self.modulus,
                self.fixed.iter().copied(),
            ))?);
        }
        for g in &self.grouped {
            let block = g.block.to_block(self.shape)?;
            for class in develop_grouped(&block, self.modulus, g.step)? {
                out.push(ParallelClass::merge([&class], &ambient));
            }
        }
        Ok(out)
    }
}
