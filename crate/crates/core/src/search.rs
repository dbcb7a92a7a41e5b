//! Exhaustive backtracking for small resolvable designs and RGDDs.
//!
//! The search builds one parallel class at a time. Inside a class, the
//! smallest uncovered point is always the minimum vertex of the next block,
//! and candidate blocks are tried in a fixed order: sorted vertex tuple
//! first, then the distinct placements of the shape on those vertices.
//! Residual pair multiplicities live in a dense table.
//!
//! Symmetry breaking has two parts. Classes are kept in non-decreasing
//! order of their block sequences, and for ungrouped problems the first
//! class is fixed to the lexicographically smallest class, which any design
//! can be relabeled to contain. Both can be switched off to cross-check
//! existence claims.
//!
//! A budget overrun is reported as such and never as nonexistence.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::admissibility::{class_count, divisibility_check, rgdd_class_count};
use crate::model::{Block, Document, GroupedDesign, GroupedKind, ParallelClass, Point, ResolvableDesign, Shape};
use crate::verifier::{verify_design, verify_grouped};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    pub nodes: u64,
    pub wall: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            nodes: 100_000_000,
            wall: Duration::from_secs(60),
        }
    }
}

impl Budget {
    pub fn nodes(nodes: u64) -> Self {
        Budget {
            nodes,
            ..Budget::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchProblem {
    pub shape: Shape,
    pub order: usize,
    /// Groups of point indices; pairs inside a group are never covered.
    pub groups: Option<Vec<Vec<usize>>>,
    pub lambda: u32,
    pub resolvable: bool,
    pub budget: Budget,
    pub symmetry_breaking: bool,
    /// Answer from the divisibility conditions when they already rule the
    /// design out.
    pub prefilter: bool,
}

impl SearchProblem {
    pub fn design(shape: Shape, order: usize, lambda: u32) -> Self {
        SearchProblem {
            shape,
            order,
            groups: None,
            lambda,
            resolvable: true,
            budget: Budget::default(),
            symmetry_breaking: true,
            prefilter: true,
        }
    }

    /// Groups of size `g` for each `(g, u)`, laid out consecutively.
    pub fn rgdd(shape: Shape, type_vector: &[(usize, usize)], lambda: u32) -> Self {
        let mut groups = Vec::new();
        let mut next = 0;
        for &(g, u) in type_vector {
            for _ in 0..u {
                groups.push((next..next + g).collect());
                next += g;
            }
        }
        SearchProblem {
            groups: Some(groups),
            ..SearchProblem::design(shape, next, lambda)
        }
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SearchOutcome {
    Found(Box<Document>),
    ExhaustedNonexistent,
    BudgetExceeded { nodes: u64 },
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out<'a> {
            outcome: &'a str,
            #[serde(skip_serializing_if = "Option::is_none")]
            nodes: Option<u64>,
            #[serde(skip_serializing_if = "Option::is_none")]
            design: Option<serde_json::Value>,
        }
        let out = match self {
            SearchOutcome::Found(doc) => Out {
                outcome: "FOUND",
                nodes: None,
                design: Some(serde_json::from_str(&doc.to_json()).expect("valid json")),
            },
            SearchOutcome::ExhaustedNonexistent => Out {
                outcome: "EXHAUSTED_NONEXISTENT",
                nodes: None,
                design: None,
            },
            SearchOutcome::BudgetExceeded { nodes } => Out {
                outcome: "BUDGET_EXCEEDED",
                nodes: Some(*nodes),
                design: None,
            },
        };
        serde_json::to_value(out).expect("serializable")
    }
}

/// A distinct copy of the shape on a sorted vertex tuple: `perm[i]` is the
/// tuple position of canonical vertex `i`.
#[derive(Clone, Debug)]
struct Placement {
    perm: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

fn placements(shape: Shape) -> Vec<Placement> {
    let k = shape.vertex_count();
    let mut perms = vec![Vec::new()];
    for _ in 0..k {
        perms = perms
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..k)
                    .filter(|x| !p.contains(x))
                    .map(|x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    let mut out: Vec<Placement> = Vec::new();
    for perm in perms {
        let mut edges: Vec<(usize, usize)> = shape
            .edges()
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a], perm[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort();
        if !out.iter().any(|p| p.edges == edges) {
            out.push(Placement { perm, edges });
        }
    }
    out.sort_by(|a, b| a.edges.cmp(&b.edges));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Choice {
    verts: [u8; 4],
    placement: u8,
}

enum Flow {
    Found,
    Exhausted,
    OutOfBudget,
}

struct Searcher {
    n: usize,
    k: usize,
    shape: Shape,
    classes_needed: usize,
    per_class: usize,
    residual: Vec<u8>,
    placements: Vec<Placement>,
    classes: Vec<Vec<Choice>>,
    fix_first: bool,
    order_classes: bool,
    min_deg: u32,
    max_deg: u32,
    nodes: u64,
    budget: Budget,
    started: Instant,
}

impl Searcher {
    fn res(&self, a: usize, b: usize) -> u8 {
        self.residual[a * self.n + b]
    }

    fn adjust(&mut self, choice: &Choice, delta: i8) {
        let p = &self.placements[choice.placement as usize];
        for &(x, y) in &p.edges {
            let (a, b) = (choice.verts[x] as usize, choice.verts[y] as usize);
            let i = a * self.n + b;
            let j = b * self.n + a;
            self.residual[i] = (self.residual[i] as i8 + delta) as u8;
            self.residual[j] = self.residual[i];
        }
    }

    fn fits(&self, verts: &[u8; 4], placement: usize) -> bool {
        self.placements[placement]
            .edges
            .iter()
            .all(|&(x, y)| self.res(verts[x] as usize, verts[y] as usize) > 0)
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget.nodes {
            return false;
        }
        if self.nodes % 4096 == 0 && self.started.elapsed() > self.budget.wall {
            return false;
        }
        true
    }

    /// Cheap necessary conditions on the residual after `done` classes.
    fn feasible(&self, done: usize) -> bool {
        let rem = (self.classes_needed - done) as u32;
        for a in 0..self.n {
            let mut deg = 0u32;
            for b in 0..self.n {
                let r = self.res(a, b) as u32;
                if r > rem {
                    return false;
                }
                deg += r;
            }
            if deg < self.min_deg * rem || deg > self.max_deg * rem {
                return false;
            }
        }
        true
    }

    fn solve(&mut self, c: usize) -> Flow {
        if c == self.classes_needed {
            return Flow::Found;
        }
        self.classes.push(Vec::with_capacity(self.per_class));
        let tight = self.order_classes && c > 0;
        let flow = self.build(c, 0, 0, tight);
        if !matches!(flow, Flow::Found) {
            self.classes.pop();
        }
        flow
    }

    fn build(&mut self, c: usize, bi: usize, covered: u64, tight: bool) -> Flow {
        if bi == self.per_class {
            if !self.feasible(c + 1) {
                return Flow::Exhausted;
            }
            return self.solve(c + 1);
        }
        let p = (!covered).trailing_zeros() as usize;
        let prev = if tight { Some(self.classes[c - 1][bi]) } else { None };

        if c == 0 && self.fix_first {
            let mut verts = [0u8; 4];
            for (i, v) in verts.iter_mut().take(self.k).enumerate() {
                *v = (p + i) as u8;
            }
            if !self.fits(&verts, 0) {
                return Flow::Exhausted;
            }
            return self.place(c, bi, covered, Choice { verts, placement: 0 }, false);
        }

        // Uncovered candidates above p, ascending.
        let free: Vec<u8> = (p + 1..self.n)
            .filter(|&q| covered & (1u64 << q) == 0)
            .map(|q| q as u8)
            .collect();
        let mut idx = vec![0usize; self.k - 1];
        if free.len() < self.k - 1 {
            return Flow::Exhausted;
        }
        for (i, x) in idx.iter_mut().enumerate() {
            *x = i;
        }
        loop {
            let mut verts = [0u8; 4];
            verts[0] = p as u8;
            for (i, &x) in idx.iter().enumerate() {
                verts[i + 1] = free[x];
            }
            for pl in 0..self.placements.len() {
                let choice = Choice {
                    verts,
                    placement: pl as u8,
                };
                if let Some(prev) = prev {
                    if choice < prev {
                        continue;
                    }
                }
                if !self.fits(&verts, pl) {
                    continue;
                }
                let still_tight = prev == Some(choice);
                match self.place(c, bi, covered, choice, still_tight) {
                    Flow::Exhausted => {}
                    other => return other,
                }
            }
            // next combination
            let m = free.len();
            let r = self.k - 1;
            let mut i = r;
            loop {
                if i == 0 {
                    return Flow::Exhausted;
                }
                i -= 1;
                if idx[i] < m - r + i {
                    idx[i] += 1;
                    for j in i + 1..r {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    fn place(&mut self, c: usize, bi: usize, covered: u64, choice: Choice, tight: bool) -> Flow {
        if !self.tick() {
            return Flow::OutOfBudget;
        }
        self.adjust(&choice, -1);
        self.classes[c].push(choice);
        let mut mask = covered;
        for &v in &choice.verts[..self.k] {
            mask |= 1u64 << v;
        }
        let flow = self.build(c, bi + 1, mask, tight);
        if matches!(flow, Flow::Found) {
            return flow;
        }
        self.classes[c].pop();
        self.adjust(&choice, 1);
        flow
    }

    fn block(&self, choice: &Choice) -> Block {
        let p = &self.placements[choice.placement as usize];
        let tuple = (0..self.k)
            .map(|i| Point::Int(choice.verts[p.perm[i]] as u32))
            .collect();
        Block::new(self.shape, tuple).expect("distinct vertices")
    }
}

/// Runs the backtracking search described in the module docs.
pub fn search(problem: &SearchProblem) -> SearchOutcome {
    let shape = problem.shape;
    let n = problem.order;
    let k = shape.vertex_count();
    assert!(n <= 64, "search supports at most 64 points");
    assert!(problem.budget.nodes > 0, "budget must be positive");

    if !problem.resolvable {
        return search_decomposition(problem);
    }
    if n % k != 0 {
        return SearchOutcome::ExhaustedNonexistent;
    }
    let lambda = problem.lambda as u64;
    let classes_needed = match &problem.groups {
        None => {
            if problem.prefilter {
                match divisibility_check(shape, n as u64, lambda) {
                    Ok(v) if v.is_admissible() => {}
                    _ => return SearchOutcome::ExhaustedNonexistent,
                }
            }
            match class_count(shape, n as u64, lambda) {
                Ok(r) => r as usize,
                Err(_) if problem.prefilter => return SearchOutcome::ExhaustedNonexistent,
                // Enough classes to overshoot the edge total: the search
                // then has to exhaust to report nonexistence.
                Err(_) => {
                    let edges = lambda as usize * n * (n - 1) / 2;
                    let per_class = (n / k).max(1) * shape.edge_count();
                    edges.div_ceil(per_class)
                }
            }
        }
        Some(groups) => {
            let mut sizes = std::collections::BTreeMap::new();
            for g in groups {
                *sizes.entry(g.len() as u64).or_insert(0u64) += 1;
            }
            let sizes: Vec<(u64, u64)> = sizes.into_iter().collect();
            match rgdd_class_count(shape, &sizes, lambda) {
                Ok(r) => r as usize,
                Err(_) => return SearchOutcome::ExhaustedNonexistent,
            }
        }
    };

    let mut residual = vec![problem.lambda as u8; n * n];
    for i in 0..n {
        residual[i * n + i] = 0;
    }
    if let Some(groups) = &problem.groups {
        for g in groups {
            for &a in g {
                for &b in g {
                    residual[a * n + b] = 0;
                }
            }
        }
    }
    let degrees = shape.degrees();
    let mut searcher = Searcher {
        n,
        k,
        shape,
        classes_needed,
        per_class: n / k,
        residual,
        placements: placements(shape),
        classes: Vec::new(),
        fix_first: problem.symmetry_breaking && problem.groups.is_none(),
        order_classes: problem.symmetry_breaking,
        min_deg: *degrees.iter().min().unwrap() as u32,
        max_deg: *degrees.iter().max().unwrap() as u32,
        nodes: 0,
        budget: problem.budget,
        started: Instant::now(),
    };
    if !searcher.feasible(0) {
        return SearchOutcome::ExhaustedNonexistent;
    }
    match searcher.solve(0) {
        Flow::Exhausted => SearchOutcome::ExhaustedNonexistent,
        Flow::OutOfBudget => SearchOutcome::BudgetExceeded {
            nodes: searcher.nodes,
        },
        Flow::Found => {
            let classes = searcher
                .classes
                .iter()
                .map(|c| ParallelClass::full(c.iter().map(|ch| searcher.block(ch)).collect()))
                .collect();
            let design = ResolvableDesign::new((0..n as u32).map(Point::Int), problem.lambda, shape, classes);
            let doc = match &problem.groups {
                None => {
                    let report = verify_design(&design);
                    assert!(report.valid, "search produced an invalid design: {}", report.summary());
                    Document::Design(design)
                }
                Some(groups) => {
                    let groups = groups
                        .iter()
                        .map(|g| g.iter().map(|&i| Point::Int(i as u32)).collect())
                        .collect();
                    let g = GroupedDesign::new(design, groups, GroupedKind::Rgdd);
                    let report = verify_grouped(&g);
                    assert!(report.valid, "search produced an invalid RGDD: {}", report.summary());
                    Document::Grouped(g)
                }
            };
            SearchOutcome::Found(Box::new(doc))
        }
    }
}

/// Plain (non-resolvable) decomposition: the first pair with residual
/// multiplicity is always covered next. The result is returned as a GDD
/// whose classes are single blocks.
fn search_decomposition(problem: &SearchProblem) -> SearchOutcome {
    let shape = problem.shape;
    let n = problem.order;
    let k = shape.vertex_count();
    let mut residual = vec![problem.lambda as u8; n * n];
    for i in 0..n {
        residual[i * n + i] = 0;
    }
    let groups: Vec<Vec<usize>> = problem
        .groups
        .clone()
        .unwrap_or_else(|| (0..n).map(|i| vec![i]).collect());
    for g in &groups {
        for &a in g {
            for &b in g {
                residual[a * n + b] = 0;
            }
        }
    }
    let total: usize = residual.iter().map(|&x| x as usize).sum::<usize>() / 2;
    if total % shape.edge_count() != 0 {
        return SearchOutcome::ExhaustedNonexistent;
    }
    let places = placements(shape);
    let started = Instant::now();
    let mut nodes = 0u64;
    let mut chosen: Vec<Vec<usize>> = Vec::new();

    fn rec(
        n: usize,
        k: usize,
        residual: &mut Vec<u8>,
        places: &[Placement],
        chosen: &mut Vec<Vec<usize>>,
        nodes: &mut u64,
        budget: &Budget,
        started: &Instant,
    ) -> Option<bool> {
        let first = (0..n * n).find(|&i| i / n < i % n && residual[i] > 0);
        let Some(first) = first else { return Some(true) };
        let (a, b) = (first / n, first % n);
        let others: Vec<usize> = (0..n).filter(|&x| x != a && x != b).collect();
        let mut subsets: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..k - 2 {
            subsets = subsets
                .into_iter()
                .flat_map(|s| {
                    let start = s.last().map_or(0, |&l| others.iter().position(|&o| o == l).unwrap() + 1);
                    others[start..]
                        .iter()
                        .map(|&o| {
                            let mut t = s.clone();
                            t.push(o);
                            t
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        for extra in subsets {
            let mut verts: Vec<usize> = vec![a, b];
            verts.extend(extra);
            verts.sort();
            for pl in places {
                let edges: Vec<(usize, usize)> = pl.edges.iter().map(|&(x, y)| (verts[x], verts[y])).collect();
                if !edges.iter().any(|&(x, y)| (x, y) == (a, b)) {
                    continue;
                }
                if edges.iter().any(|&(x, y)| residual[x * n + y] == 0) {
                    continue;
                }
                *nodes += 1;
                if *nodes > budget.nodes || (*nodes % 4096 == 0 && started.elapsed() > budget.wall) {
                    return None;
                }
                for &(x, y) in &edges {
                    residual[x * n + y] -= 1;
                    residual[y * n + x] -= 1;
                }
                chosen.push((0..k).map(|i| verts[pl.perm[i]]).collect());
                match rec(n, k, residual, places, chosen, nodes, budget, started) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
                chosen.pop();
                for &(x, y) in &edges {
                    residual[x * n + y] += 1;
                    residual[y * n + x] += 1;
                }
            }
        }
        Some(false)
    }

    match rec(n, k, &mut residual, &places, &mut chosen, &mut nodes, &problem.budget, &started) {
        None => SearchOutcome::BudgetExceeded { nodes },
        Some(false) => SearchOutcome::ExhaustedNonexistent,
        Some(true) => {
            let all: std::collections::BTreeSet<Point> = (0..n as u32).map(Point::Int).collect();
            let classes = chosen
                .iter()
                .map(|t| {
                    let block = Block::new(shape, t.iter().map(|&i| Point::Int(i as u32)).collect())
                        .expect("distinct vertices");
                    ParallelClass::merge([&ParallelClass::full(vec![block])], &all)
                })
                .collect();
            let design = ResolvableDesign::new(all.iter().copied(), problem.lambda, shape, classes);
            let groups = groups
                .iter()
                .map(|g| g.iter().map(|&i| Point::Int(i as u32)).collect())
                .collect();
            let g = GroupedDesign::new(design, groups, GroupedKind::Gdd);
            let report = verify_grouped(&g);
            assert!(report.valid, "search produced an invalid decomposition: {}", report.summary());
            SearchOutcome::Found(Box::new(Document::Grouped(g)))
        }
    }
}

/// Searches for an RGDD of the given type.
pub fn search_rgdd(shape: Shape, type_vector: &[(usize, usize)], lambda: u32, budget: Budget) -> SearchOutcome {
    search(&SearchProblem::rgdd(shape, type_vector, lambda).with_budget(budget))
}

/// A search restricted to designs invariant under a given permutation.
///
/// Only `base_classes` classes are searched; the design is their images
/// under all powers of `generator`. Coverage is tracked per pair orbit, so
/// a pair orbit of length `L` under a generator of order `m` needs exactly
/// `λ·L/m` base edges. Exhaustion here means no design with that
/// automorphism exists, which says nothing about designs without it.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclicProblem {
    pub shape: Shape,
    pub order: usize,
    pub groups: Option<Vec<Vec<usize>>>,
    pub lambda: u32,
    /// `generator[p]` is the image of point `p`.
    pub generator: Vec<usize>,
    pub base_classes: usize,
    pub budget: Budget,
}

impl CyclicProblem {
    /// RGDD of type `4^u` on `Z_{2u-2} × {0,1}` plus four fixed points.
    ///
    /// Point `(x, l)` is `x + l·m` with `m = 2u-2`; the fixed points come
    /// last and form one group. The other groups are
    /// `{(i,0), (i,1), (i+u-1,0), (i+u-1,1)}`.
    pub fn two_layer_groups_of_four(shape: Shape, u: usize, lambda: u32, base_classes: usize) -> Self {
        assert!(u >= 2);
        let m = 2 * u - 2;
        let half = u - 1;
        let mut groups: Vec<Vec<usize>> = (0..half)
            .map(|i| vec![i, i + half, i + m, i + half + m])
            .collect();
        groups.push((2 * m..2 * m + 4).collect());
        let generator = (0..2 * m + 4)
            .map(|p| if p < 2 * m { (p / m) * m + (p % m + 1) % m } else { p })
            .collect();
        CyclicProblem {
            shape,
            order: 2 * m + 4,
            groups: Some(groups),
            lambda,
            generator,
            base_classes,
            budget: Budget::default(),
        }
    }

    /// Groups `{i, i+u, ..}` of `Z_{g·u}` for `g = 4` plus a fixed group of
    /// four points, developed by `+1`.
    pub fn residues_plus_fixed_group(shape: Shape, u: usize, lambda: u32, base_classes: usize) -> Self {
        let n = 4 * (u - 1);
        let mut groups: Vec<Vec<usize>> = (0..u - 1).map(|i| (0..4).map(|j| i + j * (u - 1)).collect()).collect();
        groups.push((n..n + 4).collect());
        CyclicProblem {
            shape,
            order: n + 4,
            groups: Some(groups),
            lambda,
            generator: (0..n + 4).map(|p| if p < n { (p + 1) % n } else { p }).collect(),
            base_classes,
            budget: Budget::default(),
        }
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }
}

struct CyclicSearcher {
    n: usize,
    k: usize,
    per_class: usize,
    base_classes: usize,
    orbit: Vec<u32>,
    need: Vec<i32>,
    placements: Vec<Placement>,
    classes: Vec<Vec<Choice>>,
    nodes: u64,
    budget: Budget,
    started: Instant,
}

const NO_ORBIT: u32 = u32::MAX;

impl CyclicSearcher {
    /// Applies the block's edges; returns false (and leaves the state
    /// unchanged) if some orbit would be over-covered.
    fn apply(&mut self, choice: &Choice) -> bool {
        let edges = &self.placements[choice.placement as usize].edges;
        for (i, &(x, y)) in edges.iter().enumerate() {
            let o = self.orbit[choice.verts[x] as usize * self.n + choice.verts[y] as usize];
            if o == NO_ORBIT || self.need[o as usize] == 0 {
                for &(x, y) in &edges[..i] {
                    let o = self.orbit[choice.verts[x] as usize * self.n + choice.verts[y] as usize];
                    self.need[o as usize] += 1;
                }
                return false;
            }
            self.need[o as usize] -= 1;
        }
        true
    }

    fn undo(&mut self, choice: &Choice) {
        for &(x, y) in &self.placements[choice.placement as usize].edges {
            let o = self.orbit[choice.verts[x] as usize * self.n + choice.verts[y] as usize];
            self.need[o as usize] += 1;
        }
    }

    fn solve(&mut self, c: usize) -> Flow {
        if c == self.base_classes {
            return Flow::Found;
        }
        self.classes.push(Vec::new());
        let flow = self.build(c, 0, 0, c > 0);
        if !matches!(flow, Flow::Found) {
            self.classes.pop();
        }
        flow
    }

    fn build(&mut self, c: usize, bi: usize, covered: u64, tight: bool) -> Flow {
        if bi == self.per_class {
            return self.solve(c + 1);
        }
        let p = (!covered).trailing_zeros() as usize;
        let prev = if tight { Some(self.classes[c - 1][bi]) } else { None };
        let free: Vec<u8> = (p + 1..self.n)
            .filter(|&q| covered & (1u64 << q) == 0)
            .map(|q| q as u8)
            .collect();
        let r = self.k - 1;
        if free.len() < r {
            return Flow::Exhausted;
        }
        let mut idx: Vec<usize> = (0..r).collect();
        loop {
            let mut verts = [0u8; 4];
            verts[0] = p as u8;
            for (i, &x) in idx.iter().enumerate() {
                verts[i + 1] = free[x];
            }
            for pl in 0..self.placements.len() {
                let choice = Choice {
                    verts,
                    placement: pl as u8,
                };
                if prev.is_some_and(|prev| choice < prev) {
                    continue;
                }
                if !self.apply(&choice) {
                    continue;
                }
                self.nodes += 1;
                if self.nodes > self.budget.nodes
                    || (self.nodes % 4096 == 0 && self.started.elapsed() > self.budget.wall)
                {
                    return Flow::OutOfBudget;
                }
                self.classes[c].push(choice);
                let mut mask = covered;
                for &v in &verts[..self.k] {
                    mask |= 1u64 << v;
                }
                let flow = self.build(c, bi + 1, mask, prev == Some(choice));
                if matches!(flow, Flow::Found) {
                    return flow;
                }
                self.classes[c].pop();
                self.undo(&choice);
                if matches!(flow, Flow::OutOfBudget) {
                    return flow;
                }
            }
            let m = free.len();
            let mut i = r;
            loop {
                if i == 0 {
                    return Flow::Exhausted;
                }
                i -= 1;
                if idx[i] < m - r + i {
                    idx[i] += 1;
                    for j in i + 1..r {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
}

/// Runs the automorphism-restricted search described on [`CyclicProblem`].
pub fn search_cyclic(problem: &CyclicProblem) -> SearchOutcome {
    let shape = problem.shape;
    let n = problem.order;
    let k = shape.vertex_count();
    assert!(n <= 64, "search supports at most 64 points");
    assert_eq!(problem.generator.len(), n, "generator must permute every point");
    if n % k != 0 {
        return SearchOutcome::ExhaustedNonexistent;
    }
    let sigma = &problem.generator;

    // Order of the generator.
    let mut m = 1usize;
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut p = start;
        while !seen[p] {
            seen[p] = true;
            p = sigma[p];
            len += 1;
        }
        m = m / gcd(m, len) * len;
    }

    let mut target = vec![problem.lambda as i32; n * n];
    if let Some(groups) = &problem.groups {
        for g in groups {
            for &a in g {
                for &b in g {
                    target[a * n + b] = 0;
                }
            }
        }
    }
    let mut orbit = vec![NO_ORBIT; n * n];
    let mut need = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if orbit[a * n + b] != NO_ORBIT {
                continue;
            }
            let id = need.len() as u32;
            let (mut x, mut y) = (a, b);
            let mut len = 0i32;
            loop {
                if orbit[x * n + y] == id {
                    break;
                }
                if target[x * n + y] != target[a * n + b] {
                    // Groups are not invariant under the generator.
                    return SearchOutcome::ExhaustedNonexistent;
                }
                orbit[x * n + y] = id;
                orbit[y * n + x] = id;
                len += 1;
                (x, y) = (sigma[x], sigma[y]);
            }
            let t = target[a * n + b] * len;
            if t % m as i32 != 0 {
                return SearchOutcome::ExhaustedNonexistent;
            }
            need.push(t / m as i32);
        }
    }
    for (i, o) in orbit.iter_mut().enumerate() {
        if target[i] == 0 {
            *o = NO_ORBIT;
        }
    }
    let total: i32 = need.iter().sum();
    if total as usize != problem.base_classes * (n / k) * shape.edge_count() {
        return SearchOutcome::ExhaustedNonexistent;
    }

    let mut searcher = CyclicSearcher {
        n,
        k,
        per_class: n / k,
        base_classes: problem.base_classes,
        orbit,
        need,
        placements: placements(shape),
        classes: Vec::new(),
        nodes: 0,
        budget: problem.budget,
        started: Instant::now(),
    };
    match searcher.solve(0) {
        Flow::Exhausted => SearchOutcome::ExhaustedNonexistent,
        Flow::OutOfBudget => SearchOutcome::BudgetExceeded {
            nodes: searcher.nodes,
        },
        Flow::Found => {
            let block = |choice: &Choice| {
                let p = &searcher.placements[choice.placement as usize];
                (0..k).map(|i| choice.verts[p.perm[i]] as usize).collect::<Vec<_>>()
            };
            let mut classes = Vec::new();
            for base in &searcher.classes {
                let mut current: Vec<Vec<usize>> = base.iter().map(block).collect();
                for _ in 0..m {
                    let blocks = current
                        .iter()
                        .map(|t| {
                            Block::new(shape, t.iter().map(|&i| Point::Int(i as u32)).collect())
                                .expect("distinct vertices")
                        })
                        .collect();
                    classes.push(ParallelClass::full(blocks));
                    current = current
                        .iter()
                        .map(|t| t.iter().map(|&i| sigma[i]).collect())
                        .collect();
                }
            }
            let design = ResolvableDesign::new((0..n as u32).map(Point::Int), problem.lambda, shape, classes);
            let doc = match &problem.groups {
                None => {
                    let report = verify_design(&design);
                    assert!(report.valid, "cyclic search produced an invalid design: {}", report.summary());
                    Document::Design(design)
                }
                Some(groups) => {
                    let groups = groups
                        .iter()
                        .map(|g| g.iter().map(|&i| Point::Int(i as u32)).collect())
                        .collect();
                    let g = GroupedDesign::new(design, groups, GroupedKind::Rgdd);
                    let report = verify_grouped(&g);
                    assert!(report.valid, "cyclic search produced an invalid RGDD: {}", report.summary());
                    Document::Grouped(g)
                }
            };
            SearchOutcome::Found(Box::new(doc))
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn found_classes(outcome: &SearchOutcome) -> usize {
        match outcome {
            SearchOutcome::Found(doc) => doc.design().classes.len(),
            other => panic!("expected FOUND, got {other:?}"),
        }
    }

    #[test]
    fn placement_counts() {
        let counts: Vec<usize> = Shape::ALL.iter().map(|&s| placements(s).len()).collect();
        // K2 P3 P4 K3 C4 K13 KITE K4E K4
        assert_eq!(counts, [1, 3, 12, 1, 3, 4, 12, 6, 1]);
    }

    #[test]
    fn triangles_on_six_points_index_two() {
        let outcome = search(&SearchProblem::design(Shape::K3, 6, 2));
        assert_eq!(outcome, SearchOutcome::ExhaustedNonexistent);
    }

    #[test]
    fn triangles_on_six_points_index_four() {
        assert_eq!(found_classes(&search(&SearchProblem::design(Shape::K3, 6, 4))), 10);
    }

    #[test]
    fn stars_on_four_points() {
        assert_eq!(found_classes(&search(&SearchProblem::design(Shape::K13, 4, 2))), 4);
    }

    #[test]
    fn four_cycle_index_one_is_filtered() {
        assert_eq!(
            search(&SearchProblem::design(Shape::C4, 4, 1)),
            SearchOutcome::ExhaustedNonexistent
        );
    }

    #[test]
    fn cocktail_party_matchings() {
        assert_eq!(found_classes(&search_rgdd(Shape::K2, &[(2, 3)], 1, Budget::default())), 4);
    }

    #[test]
    fn star_rgdd_type_four_squared() {
        assert_eq!(found_classes(&search_rgdd(Shape::K13, &[(4, 2)], 6, Budget::default())), 16);
    }

    #[test]
    fn kite_rgdd_type_four_cubed() {
        assert_eq!(found_classes(&search_rgdd(Shape::Kite, &[(4, 3)], 1, Budget::default())), 4);
    }

    #[test]
    fn budget_is_not_nonexistence() {
        let outcome = search(&SearchProblem::design(Shape::K3, 6, 2).with_budget(Budget::nodes(3)));
        assert!(matches!(outcome, SearchOutcome::BudgetExceeded { .. }));
    }

    #[test]
    fn deterministic() {
        let p = SearchProblem::design(Shape::K4e, 4, 5);
        assert_eq!(search(&p), search(&p));
    }

    #[test]
    fn symmetry_breaking_agrees_on_existence() {
        let cases = [
            (Shape::K3, 6, 2),
            (Shape::K3, 6, 4),
            (Shape::K13, 4, 2),
            (Shape::C4, 4, 2),
            (Shape::Kite, 4, 2),
            (Shape::K2, 4, 1),
            (Shape::P3, 3, 2),
            (Shape::K2, 6, 1),
        ];
        for (shape, v, lambda) in cases {
            let mut p = SearchProblem::design(shape, v, lambda);
            let with = search(&p).is_found();
            p.symmetry_breaking = false;
            let without = search(&p).is_found();
            assert_eq!(with, without, "{shape} {v} {lambda}");
        }
    }

    #[test]
    fn cyclic_kite_rgdd_type_four_to_the_fourth() {
        let p = CyclicProblem::two_layer_groups_of_four(Shape::Kite, 4, 1, 1);
        assert_eq!(found_classes(&search_cyclic(&p)), 6);
    }

    #[test]
    fn cyclic_one_rotational_triangles() {
        // KTS(9) as Z_8 plus a fixed point would need a base class fixed by
        // the half turn; the search reports the restriction as exhausted.
        let p = CyclicProblem {
            shape: Shape::K3,
            order: 9,
            groups: None,
            lambda: 1,
            generator: (0..9).map(|p| if p < 8 { (p + 1) % 8 } else { p }).collect(),
            base_classes: 1,
            budget: Budget::default(),
        };
        assert!(matches!(search_cyclic(&p), SearchOutcome::ExhaustedNonexistent));
    }

    #[test]
    fn plain_decomposition() {
        let mut p = SearchProblem::design(Shape::K3, 7, 1);
        p.resolvable = false;
        assert_eq!(found_classes(&search(&p)), 7);
        let mut p = SearchProblem::design(Shape::K3, 6, 1);
        p.resolvable = false;
        assert_eq!(search(&p), SearchOutcome::ExhaustedNonexistent);
    }
}
