//! Exhaustive certificate checks.
//!
//! Nothing here returns early: every pair multiplicity, every class and every
//! count is checked and all defects are listed, so a report doubles as a
//! debugging artifact.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::admissibility::{class_count, frame_classes_per_group, ird_class_counts, rgdd_class_count};
use crate::model::{GroupedDesign, GroupedKind, ParallelClass, Point, ResolvableDesign};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeDefect {
    pub pair: (Point, Point),
    pub expected: u32,
    pub actual: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassDefect {
    /// `None` for defects of the design as a whole (e.g. its groups).
    pub class_index: Option<usize>,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountDefect {
    pub what: String,
    pub expected: u64,
    pub actual: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub valid: bool,
    pub edge_defects: Vec<EdgeDefect>,
    pub class_defects: Vec<ClassDefect>,
    pub count_defects: Vec<CountDefect>,
}

impl VerificationReport {
    fn finish(mut self) -> Self {
        self.valid = self.edge_defects.is_empty()
            && self.class_defects.is_empty()
            && self.count_defects.is_empty();
        self
    }

    fn class(&mut self, index: Option<usize>, description: String) {
        self.class_defects.push(ClassDefect {
            class_index: index,
            description,
        });
    }

    fn count(&mut self, what: impl Into<String>, expected: u64, actual: u64) {
        if expected != actual {
            self.count_defects.push(CountDefect {
                what: what.into(),
                expected,
                actual,
            });
        }
    }

    /// A short human-readable digest.
    pub fn summary(&self) -> String {
        if self.valid {
            return "valid".to_string();
        }
        let mut parts = Vec::new();
        if !self.edge_defects.is_empty() {
            let e = &self.edge_defects[0];
            parts.push(format!(
                "{} pair defects (first {{{},{}}}: expected {}, got {})",
                self.edge_defects.len(),
                e.pair.0,
                e.pair.1,
                e.expected,
                e.actual
            ));
        }
        if let Some(c) = self.class_defects.first() {
            parts.push(format!(
                "{} class defects (first: {})",
                self.class_defects.len(),
                c.description
            ));
        }
        if let Some(c) = self.count_defects.first() {
            parts.push(format!(
                "{} count defects (first: {} expected {}, got {})",
                self.count_defects.len(),
                c.what,
                c.expected,
                c.actual
            ));
        }
        parts.join("; ")
    }
}

/// Dense symmetric multiplicity table over point indices.
struct PairTable {
    n: usize,
    counts: Vec<u32>,
}

impl PairTable {
    fn new(n: usize) -> Self {
        PairTable {
            n,
            counts: vec![0; n * n],
        }
    }

    fn add(&mut self, i: usize, j: usize) {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.counts[a * self.n + b] += 1;
    }

    fn get(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.n + j]
    }
}

struct Indexed<'a> {
    points: Vec<Point>,
    index: BTreeMap<Point, usize>,
    design: &'a ResolvableDesign,
}

impl<'a> Indexed<'a> {
    fn new(design: &'a ResolvableDesign) -> Self {
        let points: Vec<Point> = design.points.iter().copied().collect();
        let index = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        Indexed {
            points,
            index,
            design,
        }
    }

    /// Tallies pair multiplicities and checks every class is a partition of
    /// `points ∖ missing`.
    fn scan(&self, report: &mut VerificationReport) -> PairTable {
        let mut table = PairTable::new(self.points.len());
        for (ci, class) in self.design.classes.iter().enumerate() {
            self.check_class(ci, class, report);
            for block in &class.blocks {
                if block.shape() != self.design.shape {
                    report.class(
                        Some(ci),
                        format!("block {block} has shape {} not {}", block.shape(), self.design.shape),
                    );
                }
                for (a, b) in block.edges() {
                    if let (Some(&i), Some(&j)) = (self.index.get(&a), self.index.get(&b)) {
                        table.add(i, j);
                    }
                }
            }
        }
        table
    }

    fn check_class(&self, ci: usize, class: &ParallelClass, report: &mut VerificationReport) {
        let mut seen = vec![false; self.points.len()];
        for &p in &class.missing {
            match self.index.get(&p) {
                Some(&i) => seen[i] = true,
                None => report.class(Some(ci), format!("missing point {p} is not a design point")),
            }
        }
        for block in &class.blocks {
            for &p in block.points() {
                match self.index.get(&p) {
                    None => report.class(Some(ci), format!("block {block} uses unknown point {p}")),
                    Some(&i) if seen[i] => {
                        let why = if class.missing.contains(&p) {
                            "which the class declares missing"
                        } else {
                            "already covered in this class"
                        };
                        report.class(Some(ci), format!("block {block} uses point {p} {why}"));
                    }
                    Some(&i) => seen[i] = true,
                }
            }
        }
        let uncovered: Vec<String> = self
            .points
            .iter()
            .zip(&seen)
            .filter(|(_, &s)| !s)
            .map(|(p, _)| p.to_string())
            .collect();
        if !uncovered.is_empty() {
            report.class(
                Some(ci),
                format!("points neither covered nor declared missing: {}", uncovered.join(",")),
            );
        }
    }

    fn check_pairs(
        &self,
        table: &PairTable,
        expected: impl Fn(usize, usize) -> u32,
        report: &mut VerificationReport,
    ) {
        let n = self.points.len();
        for i in 0..n {
            for j in i + 1..n {
                let want = expected(i, j);
                let got = table.get(i, j);
                if want != got {
                    report.edge_defects.push(EdgeDefect {
                        pair: (self.points[i], self.points[j]),
                        expected: want,
                        actual: got,
                    });
                }
            }
        }
    }
}

/// Checks a resolvable (λK_v, G)-design: every pair covered exactly λ times,
/// every class a full partition of the points, and the class count equal to
/// λ(v−1)|V(G)| / (2|E(G)|).
pub fn verify_design(design: &ResolvableDesign) -> VerificationReport {
    let mut report = VerificationReport::default();
    let ix = Indexed::new(design);
    let table = ix.scan(&mut report);
    ix.check_pairs(&table, |_, _| design.lambda, &mut report);
    for (ci, class) in design.classes.iter().enumerate() {
        if !class.is_full() {
            report.class(
                Some(ci),
                format!("class misses {} points; resolvable designs need full classes", class.missing.len()),
            );
        }
    }
    let v = design.order() as u64;
    if design.lambda == 0 {
        report.class(None, "index must be at least 1".into());
    } else if v >= design.shape.vertex_count() as u64 {
        match class_count(design.shape, v, design.lambda as u64) {
            Ok(r) => report.count("full classes", r, design.full_class_count() as u64),
            Err(e) => report.class(None, e.to_string()),
        }
    } else {
        report.class(None, format!("order {v} is below the shape's vertex count"));
    }
    report.finish()
}

/// Checks a grouped design according to its kind.
///
/// - GDD: within-group pairs 0 times, cross pairs λ times.
/// - RGDD: additionally all classes full, with the full-class count.
/// - FRAME: every class misses exactly one group, and each group of size g
///   is missed by λ·g·|V(G)| / (2|E(G)|) classes.
/// - IRD: hole pairs 0 times, all other pairs λ times; classes are full or
///   miss exactly the hole, with the partial and full counts of the IRD.
pub fn verify_grouped(g: &GroupedDesign) -> VerificationReport {
    let mut report = VerificationReport::default();
    let design = &g.design;
    let lambda = design.lambda;
    let ix = Indexed::new(design);
    let table = ix.scan(&mut report);
    let n = ix.points.len();
    let shape = design.shape;

    // group id per point index; usize::MAX for "no group"
    let mut group_of = vec![usize::MAX; n];
    for (gi, group) in g.groups.iter().enumerate() {
        for p in group {
            match ix.index.get(p) {
                None => report.class(None, format!("group point {p} is not a design point")),
                Some(&i) if group_of[i] != usize::MAX => {
                    report.class(None, format!("point {p} lies in two groups"))
                }
                Some(&i) => group_of[i] = gi,
            }
        }
    }
    let mut in_hole = vec![false; n];

    match g.kind {
        GroupedKind::Gdd | GroupedKind::Rgdd | GroupedKind::Frame => {
            if let Some(p) = group_of.iter().position(|&x| x == usize::MAX) {
                report.class(None, format!("point {} lies in no group", ix.points[p]));
            }
            if g.hole.is_some() {
                report.class(None, format!("a {} carries no hole", g.kind));
            }
        }
        GroupedKind::Ird => match &g.hole {
            None => report.class(None, "IRD without a hole".into()),
            Some(hole) => {
                for p in hole {
                    match ix.index.get(p) {
                        Some(&i) => in_hole[i] = true,
                        None => report.class(None, format!("hole point {p} is not a design point")),
                    }
                }
            }
        },
    }

    ix.check_pairs(
        &table,
        |i, j| {
            let same_group = group_of[i] != usize::MAX && group_of[i] == group_of[j];
            if same_group || (in_hole[i] && in_hole[j]) {
                0
            } else {
                lambda
            }
        },
        &mut report,
    );

    let lam = lambda as u64;
    if lambda == 0 {
        report.class(None, "index must be at least 1".into());
        return report.finish();
    }
    match g.kind {
        GroupedKind::Gdd => {}
        GroupedKind::Rgdd => {
            for (ci, class) in design.classes.iter().enumerate() {
                if !class.is_full() {
                    report.class(Some(ci), "RGDD classes must be full".into());
                }
            }
            let sizes: Vec<(u64, u64)> = g
                .type_vector()
                .into_iter()
                .map(|(s, u)| (s as u64, u as u64))
                .collect();
            match rgdd_class_count(shape, &sizes, lam) {
                Ok(r) => report.count("full classes", r, design.full_class_count() as u64),
                Err(e) => report.class(None, e.to_string()),
            }
        }
        GroupedKind::Frame => {
            let group_sets: Vec<BTreeSet<Point>> = g
                .groups
                .iter()
                .map(|gr| gr.iter().copied().collect())
                .collect();
            let mut per_group = vec![0u64; group_sets.len()];
            for (ci, class) in design.classes.iter().enumerate() {
                match group_sets.iter().position(|gr| *gr == class.missing) {
                    Some(gi) => per_group[gi] += 1,
                    None => report.class(Some(ci), "frame class does not miss exactly one group".into()),
                }
            }
            if g.groups.len() < 2 {
                report.class(None, "a frame needs at least two groups".into());
            }
            for (gi, group) in g.groups.iter().enumerate() {
                match frame_classes_per_group(shape, group.len() as u64, lam) {
                    Ok(expected) => report.count(
                        format!("classes missing group {gi}"),
                        expected,
                        per_group[gi],
                    ),
                    Err(e) => report.class(None, e.to_string()),
                }
            }
        }
        GroupedKind::Ird => {
            let hole = g.hole.clone().unwrap_or_default();
            let mut partial = 0;
            let mut full = 0;
            for (ci, class) in design.classes.iter().enumerate() {
                if class.is_full() {
                    full += 1;
                } else if class.missing == hole {
                    partial += 1;
                } else {
                    report.class(Some(ci), "IRD class neither full nor missing exactly the hole".into());
                }
            }
            let h = hole.len() as u64;
            let rest = (n as u64).saturating_sub(h);
            match ird_class_counts(shape, rest, h, lam) {
                Ok((p, f)) => {
                    report.count("partial classes", p, partial);
                    report.count("full classes", f, full);
                }
                Err(e) => report.class(None, e.to_string()),
            }
        }
    }
    report.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_block, Block, Shape};

    fn class(shape: Shape, blocks: &[&str]) -> ParallelClass {
        ParallelClass::full(blocks.iter().map(|b| parse_block(b, shape).unwrap()).collect())
    }

    fn pts(n: u32) -> Vec<Point> {
        (0..n).map(Point::Int).collect()
    }

    fn c4_design(lambda: u32) -> ResolvableDesign {
        ResolvableDesign::new(
            pts(4),
            lambda,
            Shape::C4,
            vec![
                class(Shape::C4, &["(0,1,2,3)"]),
                class(Shape::C4, &["(0,1,3,2)"]),
                class(Shape::C4, &["(0,2,1,3)"]),
            ],
        )
    }

    #[test]
    fn three_four_cycles_cover_twice() {
        assert!(verify_design(&c4_design(2)).valid);
    }

    #[test]
    fn wrong_index_flags_every_pair() {
        let report = verify_design(&c4_design(1));
        assert!(!report.valid);
        assert_eq!(report.edge_defects.len(), 6);
        assert!(report.edge_defects.iter().all(|e| e.expected == 1 && e.actual == 2));
    }

    #[test]
    fn overlapping_class_is_reported() {
        let mut d = c4_design(2);
        d.classes[0].blocks.push(parse_block("(0,1,2,3)", Shape::C4).unwrap());
        let report = verify_design(&d);
        assert!(!report.valid);
        assert!(report.class_defects.iter().any(|c| c.class_index == Some(0)));
    }

    #[test]
    fn frame_with_stray_class() {
        // K2 frame of type 2^3: groups {0,1},{2,3},{4,5}.
        let groups = vec![pts(2), vec![Point::Int(2), Point::Int(3)], vec![Point::Int(4), Point::Int(5)]];
        let k2 = |a: u32, b: u32| Block::new(Shape::K2, vec![Point::Int(a), Point::Int(b)]).unwrap();
        let missing = |a: u32, b: u32| [Point::Int(a), Point::Int(b)].into_iter().collect();
        let classes = vec![
            ParallelClass::partial(vec![k2(2, 4), k2(3, 5)], missing(0, 1)),
            ParallelClass::partial(vec![k2(2, 5), k2(3, 4)], missing(0, 1)),
            ParallelClass::partial(vec![k2(0, 4), k2(1, 5)], missing(2, 3)),
            ParallelClass::partial(vec![k2(0, 5), k2(1, 4)], missing(2, 3)),
            ParallelClass::partial(vec![k2(0, 2), k2(1, 3)], missing(4, 5)),
            ParallelClass::partial(vec![k2(0, 3), k2(1, 2)], missing(4, 5)),
        ];
        let design = ResolvableDesign::new(pts(6), 1, Shape::K2, classes);
        let frame = GroupedDesign::new(design, groups, GroupedKind::Frame);
        assert!(verify_grouped(&frame).valid, "{:?}", verify_grouped(&frame));

        let mut bad = frame.clone();
        bad.design.classes[5].missing = missing(0, 2);
        bad.design.classes[5].blocks = vec![k2(1, 3), k2(4, 5)];
        let report = verify_grouped(&bad);
        assert!(!report.valid);
        assert!(report
            .class_defects
            .iter()
            .any(|c| c.description.contains("does not miss exactly one group")));
    }

    #[test]
    fn rgdd_counts_and_group_pairs() {
        // K2 RGDD of type 2^2: two matchings across the groups.
        let groups = vec![pts(2), vec![Point::Int(2), Point::Int(3)]];
        let d = ResolvableDesign::new(
            pts(4),
            1,
            Shape::K2,
            vec![class(Shape::K2, &["[0,2]", "[1,3]"]), class(Shape::K2, &["[0,3]", "[1,2]"])],
        );
        let g = GroupedDesign::new(d, groups, GroupedKind::Rgdd);
        assert!(verify_grouped(&g).valid);
        let mut bad = g.clone();
        bad.design.classes[1] = class(Shape::K2, &["[0,1]", "[2,3]"]);
        let report = verify_grouped(&bad);
        assert!(report.edge_defects.iter().any(|e| e.expected == 0 && e.actual == 1));
    }
}
