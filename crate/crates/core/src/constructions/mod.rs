//! Recursive constructions: group filling, weighting, repetition, frames
//! with a hole, and the five-matching construction. Every operation
//! verifies its output before returning it.

mod one_factor;
mod recipe;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::catalog::{verify_document, CatalogError, IngredientKey};
use crate::model::{
    repeat, Block, Document, GroupedDesign, GroupedKind, ParallelClass, Point, ResolvableDesign, Shape,
};
use crate::verifier::VerificationReport;

pub use one_factor::{one_factor_construction, one_factor_final_blocks, one_factor_matchings};
pub use recipe::{execute, plan, route_for, Op, Recipe, Step};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("fill mismatch: {0}")]
    FillMismatch(String),
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("replacement mismatch: {0}")]
    ReplaceMismatch(String),
    #[error("cannot combine frame and hole: {0}")]
    CombineMismatch(String),
    #[error("five-matching construction: {0}")]
    OneFactor(String),
    #[error("({shape}, v={v}, index {lambda}) is not admissible: {}", reasons.join("; "))]
    NotAdmissible {
        shape: Shape,
        v: u64,
        lambda: u32,
        reasons: Vec<String>,
    },
    #[error("missing ingredients: {}", list(.0))]
    MissingIngredients(Vec<IngredientKey>),
    #[error(transparent)]
    Catalog(Box<CatalogError>),
    #[error("{step} produced an invalid object: {}", report.summary())]
    Invalid {
        step: String,
        report: Box<VerificationReport>,
    },
    #[error("step {step} expects {expected}")]
    WrongInput { step: String, expected: String },
}

fn list(keys: &[IngredientKey]) -> String {
    keys.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", ")
}

impl From<CatalogError> for ConstructionError {
    fn from(e: CatalogError) -> Self {
        ConstructionError::Catalog(Box::new(e))
    }
}

fn checked(step: &str, doc: Document) -> Result<Document, ConstructionError> {
    let report = verify_document(&doc);
    if report.valid {
        Ok(doc)
    } else {
        Err(ConstructionError::Invalid {
            step: step.to_string(),
            report: Box::new(report),
        })
    }
}

/// Maps the sorted points of `from` onto `to` position by position.
fn positional_map(from: &BTreeSet<Point>, to: &[Point]) -> BTreeMap<Point, Point> {
    from.iter().copied().zip(to.iter().copied()).collect()
}

/// Fills every group of an RGDD with a copy of `filler`.
///
/// Host classes pass through; class `j` of every filler copy merges into
/// one new class. With `hole_group`, that group stays empty and the result
/// is an incomplete design whose new classes miss it.
pub fn fill_groups(
    host: &GroupedDesign,
    filler: &ResolvableDesign,
    hole_group: Option<usize>,
) -> Result<Document, ConstructionError> {
    if host.kind != GroupedKind::Rgdd {
        return Err(ConstructionError::FillMismatch(format!("host is a {}, not an RGDD", host.kind)));
    }
    if host.design.lambda != filler.lambda {
        return Err(ConstructionError::IndexMismatch(format!(
            "host index {} but filler index {}",
            host.design.lambda, filler.lambda
        )));
    }
    if host.design.shape != filler.shape {
        return Err(ConstructionError::FillMismatch(format!(
            "host shape {} but filler shape {}",
            host.design.shape, filler.shape
        )));
    }
    if let Some(g) = host.groups.iter().find(|g| g.len() != filler.order()) {
        return Err(ConstructionError::FillMismatch(format!(
            "group of size {} cannot take a filler on {} points",
            g.len(),
            filler.order()
        )));
    }
    if hole_group.is_some_and(|h| h >= host.groups.len()) {
        return Err(ConstructionError::FillMismatch("hole group out of range".into()));
    }
    let ambient = &host.design.points;
    let copies: Vec<ResolvableDesign> = host
        .groups
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != hole_group)
        .map(|(_, g)| {
            filler
                .relabel(&positional_map(&filler.points, g))
                .expect("group and filler have equal size")
        })
        .collect();
    let mut classes = host.design.classes.clone();
    for j in 0..filler.classes.len() {
        classes.push(ParallelClass::merge(copies.iter().map(|c| &c.classes[j]), ambient));
    }
    let design = ResolvableDesign::new(ambient.iter().copied(), host.design.lambda, host.design.shape, classes);
    let doc = match hole_group {
        None => Document::Design(design),
        Some(h) => Document::Grouped(GroupedDesign::ird(design, host.groups[h].iter().copied().collect())),
    };
    checked("fill_groups", doc)
}

/// Gives weight `weight` to every master point and replaces each master
/// block by `copies` copies of `ingredient` on the expanded points.
///
/// The ingredient is an RGDD of type `weight^k` for `k`-point master
/// blocks, or a plain design on `k` points when `weight` is 1. Master
/// point number `i` (in sorted order) becomes points `i·w .. i·w+w−1`.
/// Each master class yields one output class per ingredient class.
pub fn weight_and_replace(
    master: &Document,
    weight: u32,
    ingredient: &Document,
    copies: u32,
) -> Result<Document, ConstructionError> {
    let md = master.design();
    if !matches!(md.shape, Shape::K2 | Shape::K3 | Shape::K4) {
        return Err(ConstructionError::ReplaceMismatch(format!(
            "master blocks must be complete graphs, got {}",
            md.shape
        )));
    }
    if weight == 0 || copies == 0 {
        return Err(ConstructionError::ReplaceMismatch("weight and copies must be positive".into()));
    }
    let k = md.shape.vertex_count();
    let w = weight as usize;
    // Ingredient groups in order: group i receives master block point i.
    let (ing, ing_groups): (&ResolvableDesign, Vec<Vec<Point>>) = match ingredient {
        Document::Design(d) if weight == 1 && d.order() == k => (d, d.points.iter().map(|&p| vec![p]).collect()),
        Document::Grouped(g)
            if g.kind == GroupedKind::Rgdd && g.groups.len() == k && g.groups.iter().all(|x| x.len() == w) =>
        {
            (&g.design, g.groups.clone())
        }
        _ => {
            return Err(ConstructionError::ReplaceMismatch(format!(
                "ingredient must be an RGDD of type {weight}^{k} (or a design on {k} points at weight 1)"
            )))
        }
    };
    let index: BTreeMap<Point, u32> = md.points.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
    let expand = |p: Point, j: usize| Point::Int(index[&p] * weight + j as u32);
    let points: BTreeSet<Point> = md.points.iter().flat_map(|&p| (0..w).map(move |j| expand(p, j))).collect();

    let mut classes = Vec::new();
    for class in &md.classes {
        let images: Vec<ResolvableDesign> = class
            .blocks
            .iter()
            .map(|b| {
                let mut map = BTreeMap::new();
                for (i, g) in ing_groups.iter().enumerate() {
                    for (j, &q) in g.iter().enumerate() {
                        map.insert(q, expand(b.points()[i], j));
                    }
                }
                ing.relabel(&map).expect("ingredient groups cover its points")
            })
            .collect();
        for _ in 0..copies {
            for j in 0..ing.classes.len() {
                classes.push(ParallelClass::merge(images.iter().map(|d| &d.classes[j]), &points));
            }
        }
    }
    let lambda = md.lambda * ing.lambda * copies;
    let design = ResolvableDesign::new(points.iter().copied(), lambda, ing.shape, classes);
    let expand_set = |set: &[Point]| -> Vec<Point> { set.iter().flat_map(|&p| (0..w).map(move |j| expand(p, j))).collect() };
    let doc = match master {
        Document::Design(_) if weight == 1 => Document::Design(design),
        Document::Design(d) => {
            let groups = d.points.iter().map(|&p| expand_set(&[p])).collect();
            Document::Grouped(GroupedDesign::new(design, groups, GroupedKind::Rgdd))
        }
        Document::Grouped(g) => {
            let groups = g.groups.iter().map(|grp| expand_set(grp)).collect();
            let mut out = GroupedDesign::new(design, groups, g.kind);
            out.hole = g
                .hole
                .as_ref()
                .map(|h| expand_set(&h.iter().copied().collect::<Vec<_>>()).into_iter().collect());
            Document::Grouped(out)
        }
    };
    checked("weight_and_replace", doc)
}

/// Lists every class `mu` times; the index scales by `mu`.
pub fn repeat_classes(doc: &Document, mu: u32) -> Document {
    assert!(mu >= 1, "repetition count must be positive");
    match doc {
        Document::Design(d) => Document::Design(repeat(d, mu)),
        Document::Grouped(g) => Document::Grouped(g.repeated(mu)),
    }
}

/// Completes a frame with `h` new points.
///
/// Each frame group `G_i` receives a copy of `ird` on `G_i ∪ H` (hole on
/// `H`). Its full classes pair with the frame classes missing `G_i`, taken
/// `copies` times, both sides sorted. Partial class `j` of every IRD copy
/// merges with class `j` of `filler` placed on `H`. Frame points are
/// renumbered `0..n` in sorted order and `H` becomes `n..n+h`.
pub fn frame_fill_with_hole(
    frame: &GroupedDesign,
    ird: &GroupedDesign,
    filler: &ResolvableDesign,
    copies: u32,
) -> Result<ResolvableDesign, ConstructionError> {
    let mismatch = |m: String| Err(ConstructionError::CombineMismatch(m));
    if frame.kind != GroupedKind::Frame || frame.groups.len() < 2 {
        return mismatch("a frame with at least two groups is required".into());
    }
    let hole = match (&ird.kind, &ird.hole) {
        (GroupedKind::Ird, Some(h)) => h,
        _ => return mismatch("the group ingredient must be an incomplete design with a hole".into()),
    };
    let g = frame.groups[0].len();
    if frame.groups.iter().any(|x| x.len() != g) {
        return mismatch("frame groups must have equal size".into());
    }
    let h = hole.len();
    if ird.design.order() != g + h {
        return mismatch(format!("incomplete design has order {} but groups need {}", ird.design.order(), g + h));
    }
    if filler.order() != h {
        return mismatch(format!("hole filler has order {} but the hole has {h} points", filler.order()));
    }
    let lambda = frame.design.lambda * copies;
    if ird.design.lambda != lambda || filler.lambda != lambda {
        return Err(ConstructionError::IndexMismatch(format!(
            "frame index {} × {copies} copies, incomplete design index {}, filler index {}",
            frame.design.lambda, ird.design.lambda, filler.lambda
        )));
    }

    let renumber: BTreeMap<Point, Point> = frame
        .design
        .points
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, Point::Int(i as u32)))
        .collect();
    let n = renumber.len() as u32;
    let frame = frame.relabel(&renumber).expect("bijective renumbering");
    let hole_points: Vec<Point> = (n..n + h as u32).map(Point::Int).collect();
    let all: BTreeSet<Point> = (0..n + h as u32).map(Point::Int).collect();
    let ird_non_hole: Vec<Point> = ird.design.points.difference(hole).copied().collect();

    let mut classes = Vec::new();
    let mut ird_partials: Vec<Vec<ParallelClass>> = Vec::new();
    for group in &frame.groups {
        let group_set: BTreeSet<Point> = group.iter().copied().collect();
        let mut partial: Vec<ParallelClass> = Vec::new();
        for c in frame.design.classes.iter().filter(|c| c.missing == group_set) {
            for _ in 0..copies {
                partial.push(c.clone());
            }
        }
        partial.sort();
        let mut map: BTreeMap<Point, Point> = ird_non_hole.iter().copied().zip(group.iter().copied()).collect();
        map.extend(hole.iter().copied().zip(hole_points.iter().copied()));
        let placed = ird.design.relabel(&map).expect("incomplete design fits the group and hole");
        let mut full: Vec<ParallelClass> = placed.classes.iter().filter(|c| c.is_full()).cloned().collect();
        full.sort();
        if full.len() != partial.len() {
            return mismatch(format!(
                "incomplete design has {} full classes but {} frame classes miss a group",
                full.len(),
                partial.len()
            ));
        }
        for (a, b) in partial.iter().zip(&full) {
            classes.push(ParallelClass::merge([a, b], &all));
        }
        ird_partials.push(placed.classes.into_iter().filter(|c| !c.is_full()).collect());
    }
    let filler = filler
        .relabel(&positional_map(&filler.points, &hole_points))
        .expect("filler fits the hole");
    if ird_partials[0].len() != filler.classes.len() {
        return mismatch(format!(
            "incomplete design has {} partial classes but the filler has {} classes",
            ird_partials[0].len(),
            filler.classes.len()
        ));
    }
    for (j, fc) in filler.classes.iter().enumerate() {
        let parts = std::iter::once(fc).chain(ird_partials.iter().map(|p| &p[j]));
        classes.push(ParallelClass::merge(parts, &all));
    }
    let design = ResolvableDesign::new(all.iter().copied(), lambda, ird.design.shape, classes);
    match checked("frame_fill_with_hole", Document::Design(design))? {
        Document::Design(d) => Ok(d),
        Document::Grouped(_) => unreachable!(),
    }
}

fn block(shape: Shape, pts: &[u32]) -> Block {
    Block::new(shape, pts.iter().map(|&p| Point::Int(p)).collect()).expect("distinct points")
}

#[cfg(test)]
mod tests;
