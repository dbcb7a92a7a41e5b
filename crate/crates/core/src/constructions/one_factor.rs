//! Index-5 K4E designs from five edge-disjoint perfect matchings of K_v.

use std::collections::BTreeMap;

use crate::model::{Block, Document, GroupedDesign, GroupedKind, ParallelClass, Point, ResolvableDesign, Shape};

use super::{block, checked, ConstructionError};

/// Five pairwise disjoint perfect matchings `F1..F5` of `K_v` on `0..v`.
///
/// `F1`, `F2` split the cycle `P1 = (0 1 … v−1)` by parity. `F3`, `F4` split
/// the cycle `x_k = k(v/2−1) mod v` by parity of `k`. `F5` joins `i` and
/// `i + v/2`. Requires `v ≡ 0 (mod 4)` and `v ≥ 8`, so that `v/2−1` is odd
/// and prime to `v`.
pub fn one_factor_matchings(v: u32) -> Result<[Vec<(u32, u32)>; 5], ConstructionError> {
    if v < 8 || v % 4 != 0 {
        return Err(ConstructionError::OneFactor(format!(
            "order {v} needs v ≡ 0 (mod 4) and v ≥ 8"
        )));
    }
    let half = v / 2;
    let pair = |a: u32, b: u32| (a.min(b), a.max(b));
    let cycle_split = |step: u32, parity: u32| -> Vec<(u32, u32)> {
        let mut m: Vec<(u32, u32)> = (0..v)
            .filter(|k| k % 2 == parity)
            .map(|k| pair(k * step % v, (k + 1) * step % v))
            .collect();
        m.sort();
        m
    };
    let mut f5: Vec<(u32, u32)> = (0..half).map(|i| (i, i + half)).collect();
    f5.sort();
    Ok([cycle_split(1, 0), cycle_split(1, 1), cycle_split(half - 1, 0), cycle_split(half - 1, 1), f5])
}

/// The two classes on the union of the five matchings: blocks
/// `(i, v/2+i, v/2+1+i; 1+i)` mod `v`, even `i` in one class and odd `i`
/// in the other.
pub fn one_factor_final_blocks(v: u32) -> [Vec<Block>; 2] {
    let half = v / 2;
    let mut out = [Vec::new(), Vec::new()];
    for i in 0..half {
        let b = block(Shape::K4e, &[i, half + i, (half + 1 + i) % v, 1 + i]);
        out[(i % 2) as usize].push(b);
    }
    out
}

/// Places one K4E RGDD of type `2^(v/2)` on each matching (its groups onto
/// the matching's edges) and adds the two final classes. The result is a
/// resolvable K4E design of order `v` and index 5.
pub fn one_factor_construction(v: u32, rgdd: &GroupedDesign) -> Result<ResolvableDesign, ConstructionError> {
    let matchings = one_factor_matchings(v)?;
    let d = &rgdd.design;
    if rgdd.kind != GroupedKind::Rgdd
        || d.shape != Shape::K4e
        || d.lambda != 1
        || rgdd.groups.len() != (v / 2) as usize
        || rgdd.groups.iter().any(|g| g.len() != 2)
    {
        return Err(ConstructionError::OneFactor(format!(
            "ingredient must be a K4E RGDD of type 2^{} and index 1",
            v / 2
        )));
    }
    let mut classes = Vec::new();
    for m in &matchings {
        let mut map = BTreeMap::new();
        for (g, &(a, b)) in rgdd.groups.iter().zip(m) {
            map.insert(g[0], Point::Int(a));
            map.insert(g[1], Point::Int(b));
        }
        classes.extend(d.relabel(&map).expect("groups cover the points").classes);
    }
    for blocks in one_factor_final_blocks(v) {
        classes.push(ParallelClass::full(blocks));
    }
    let design = ResolvableDesign::new((0..v).map(Point::Int), 5, Shape::K4e, classes);
    match checked("one_factor_construction", Document::Design(design))? {
        Document::Design(d) => Ok(d),
        Document::Grouped(_) => unreachable!(),
    }
}
