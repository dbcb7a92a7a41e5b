use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Block, ModelError, Point, Shape};

/// Blocks whose vertex sets partition the ambient points minus `missing`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParallelClass {
    pub blocks: Vec<Block>,
    pub missing: BTreeSet<Point>,
}

impl ParallelClass {
    pub fn full(blocks: Vec<Block>) -> Self {
        ParallelClass {
            blocks,
            missing: BTreeSet::new(),
        }
    }

    pub fn partial(blocks: Vec<Block>, missing: BTreeSet<Point>) -> Self {
        ParallelClass { blocks, missing }
    }

    pub fn is_full(&self) -> bool {
        self.missing.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Point> + '_ {
        self.blocks.iter().flat_map(|b| b.points().iter().copied())
    }

    pub fn map_points(&self, mut f: impl FnMut(Point) -> Point) -> Result<Self, ModelError> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.map_points(&mut f))
            .collect::<Result<_, _>>()?;
        let missing = self.missing.iter().map(|&p| f(p)).collect();
        Ok(ParallelClass { blocks, missing })
    }

    /// Concatenates classes on disjoint point sets into one.
    ///
    /// Missing sets are intersected against `ambient`: the result misses
    /// whatever of `ambient` none of the parts covers.
    pub fn merge<'a>(
        parts: impl IntoIterator<Item = &'a ParallelClass>,
        ambient: &BTreeSet<Point>,
    ) -> ParallelClass {
        let mut blocks = Vec::new();
        for part in parts {
            blocks.extend(part.blocks.iter().cloned());
        }
        let covered: BTreeSet<Point> = blocks
            .iter()
            .flat_map(|b: &Block| b.points().iter().copied())
            .collect();
        let missing = ambient.difference(&covered).copied().collect();
        ParallelClass { blocks, missing }
    }
}

/// A resolvable decomposition of λK_v (or a grouped variant of it, see
/// [`GroupedDesign`]) into copies of `shape`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvableDesign {
    pub points: BTreeSet<Point>,
    pub lambda: u32,
    pub shape: Shape,
    pub classes: Vec<ParallelClass>,
}

impl ResolvableDesign {
    pub fn new(
        points: impl IntoIterator<Item = Point>,
        lambda: u32,
        shape: Shape,
        classes: Vec<ParallelClass>,
    ) -> Self {
        ResolvableDesign {
            points: points.into_iter().collect(),
            lambda,
            shape,
            classes,
        }
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.classes.iter().flat_map(|c| c.blocks.iter())
    }

    pub fn block_count(&self) -> usize {
        self.classes.iter().map(|c| c.blocks.len()).sum()
    }

    pub fn full_class_count(&self) -> usize {
        self.classes.iter().filter(|c| c.is_full()).count()
    }

    /// Relabels every point through `map`; unmapped points are an error.
    pub fn relabel(&self, map: &BTreeMap<Point, Point>) -> Result<Self, ModelError> {
        let lookup = |p: Point| map.get(&p).copied().ok_or(ModelError::Unmapped(p));
        let points = self
            .points
            .iter()
            .map(|&p| lookup(p))
            .collect::<Result<BTreeSet<_>, _>>()?;
        if points.len() != self.points.len() {
            return Err(ModelError::MalformedBlock("relabeling is not injective".into()));
        }
        let mut failure = None;
        let classes = self
            .classes
            .iter()
            .map(|c| {
                c.map_points(|p| match map.get(&p) {
                    Some(&q) => q,
                    None => {
                        failure.get_or_insert(ModelError::Unmapped(p));
                        p
                    }
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(ResolvableDesign {
            points,
            lambda: self.lambda,
            shape: self.shape,
            classes,
        })
    }

    /// Relabels points to `0..v` in sorted order.
    pub fn normalized(&self) -> Self {
        let map: BTreeMap<Point, Point> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, Point::Int(i as u32)))
            .collect();
        self.relabel(&map).expect("bijective relabeling")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GroupedKind {
    Gdd,
    Rgdd,
    Frame,
    Ird,
}

impl fmt::Display for GroupedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupedKind::Gdd => "GDD",
            GroupedKind::Rgdd => "RGDD",
            GroupedKind::Frame => "FRAME",
            GroupedKind::Ird => "IRD",
        })
    }
}

/// A design over a partitioned point set.
///
/// For GDD, RGDD and FRAME the groups partition the points and within-group
/// pairs are never covered. For IRD the `hole` carries the uncovered set and
/// `groups` is empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupedDesign {
    pub design: ResolvableDesign,
    pub groups: Vec<Vec<Point>>,
    pub kind: GroupedKind,
    pub hole: Option<BTreeSet<Point>>,
}

impl GroupedDesign {
    pub fn new(design: ResolvableDesign, groups: Vec<Vec<Point>>, kind: GroupedKind) -> Self {
        let mut groups: Vec<Vec<Point>> = groups
            .into_iter()
            .map(|mut g| {
                g.sort();
                g
            })
            .collect();
        groups.sort();
        GroupedDesign {
            design,
            groups,
            kind,
            hole: None,
        }
    }

    pub fn ird(design: ResolvableDesign, hole: BTreeSet<Point>) -> Self {
        GroupedDesign {
            design,
            groups: Vec::new(),
            kind: GroupedKind::Ird,
            hole: Some(hole),
        }
    }

    /// Group sizes as `(size, multiplicity)`, ascending by size.
    pub fn type_vector(&self) -> Vec<(usize, usize)> {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for g in &self.groups {
            *counts.entry(g.len()).or_default() += 1;
        }
        counts.into_iter().collect()
    }

    pub fn relabel(&self, map: &BTreeMap<Point, Point>) -> Result<Self, ModelError> {
        let design = self.design.relabel(map)?;
        let lookup = |p: &Point| map.get(p).copied().ok_or(ModelError::Unmapped(*p));
        let groups = self
            .groups
            .iter()
            .map(|g| g.iter().map(lookup).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let hole = match &self.hole {
            Some(h) => Some(h.iter().map(lookup).collect::<Result<BTreeSet<_>, _>>()?),
            None => None,
        };
        let mut out = GroupedDesign::new(design, groups, self.kind);
        out.hole = hole;
        Ok(out)
    }

    /// Repeats every class `times` times, scaling the index.
    pub fn repeated(&self, times: u32) -> Self {
        GroupedDesign {
            design: repeat(&self.design, times),
            ..self.clone()
        }
    }
}

/// Lists the whole class sequence `times` times over; index scales by `times`.
pub fn repeat(design: &ResolvableDesign, times: u32) -> ResolvableDesign {
    let mut classes = Vec::with_capacity(design.classes.len() * times as usize);
    for _ in 0..times {
        classes.extend(design.classes.iter().cloned());
    }
    ResolvableDesign {
        classes,
        lambda: design.lambda * times,
        ..design.clone()
    }
}

/// Formats a type vector like `4^3` or `2^1 4^2`.
pub fn format_type(type_vector: &[(usize, usize)]) -> String {
    type_vector
        .iter()
        .map(|(g, u)| format!("{g}^{u}"))
        .collect::<Vec<_>>()
        .join(" ")
}
