//! Built-in ingredients: explicit designs stored as data files and small
//! classical objects generated on demand.

use std::collections::BTreeSet;

use serde::Deserialize;

use crate::development::{develop_subscripts, BaseBlockFile, BlockSpec, GroupedSpec};
use crate::model::{
    parse_block, Block, Document, GroupedDesign, GroupedKind, ModelError, ParallelClass, Point, ResolvableDesign,
    Shape,
};

use super::{CatalogError, IngredientKey, IngredientKind, TypeSpec};

/// `(id, contents)` of every data file shipped with the crate.
pub(crate) const DATA_FILES: &[(&str, &str)] = &[
    ("c4_2k4", include_str!("../../data/c4_2k4.json")),
    ("kite_2k4", include_str!("../../data/kite_2k4.json")),
    ("kite_2k8", include_str!("../../data/kite_2k8.json")),
    ("k13_2k4", include_str!("../../data/k13_2k4.json")),
    ("k13_rgdd_4_2_6", include_str!("../../data/k13_rgdd_4_2_6.json")),
    ("k13_rgdd_4_3_3", include_str!("../../data/k13_rgdd_4_3_3.json")),
    ("k13_6k20", include_str!("../../data/k13_6k20.json")),
    ("k4e_5k4", include_str!("../../data/k4e_5k4.json")),
    ("k4e_5k8", include_str!("../../data/k4e_5k8.json")),
    ("k4e_5k12", include_str!("../../data/k4e_5k12.json")),
    ("k4e_5k20", include_str!("../../data/k4e_5k20.json")),
    ("k4e_ird_28_8_5", include_str!("../../data/k4e_ird_28_8_5.json")),
    ("k4_k16", include_str!("../../data/k4_k16.json")),
    ("k3_kts9", include_str!("../../data/k3_kts9.json")),
];

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct DataFile {
    #[allow(dead_code)]
    description: String,
    kind: IngredientKind,
    shape: Shape,
    lambda: u32,
    points: Vec<Point>,
    #[serde(default)]
    groups: Option<Vec<Vec<Point>>>,
    #[serde(default)]
    hole: Option<Vec<Point>>,
    #[serde(default)]
    classes: Vec<Vec<String>>,
    #[serde(default)]
    cyclic: Option<CyclicPart>,
    #[serde(default)]
    subscripts: Option<SubscriptPart>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct CyclicPart {
    modulus: u32,
    #[serde(default)]
    fixed: Vec<Point>,
    #[serde(default)]
    base_classes: Vec<Vec<BlockSpec>>,
    #[serde(default)]
    grouped: Vec<GroupedSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct SubscriptPart {
    modulus: u32,
    base_classes: Vec<Vec<String>>,
}

/// Expands a data file into its design. Classes come in file order:
/// explicit classes, developed classes, then subscript rotations.
pub(crate) fn load_data(id: &str, text: &str) -> Result<Document, CatalogError> {
    let bad = |e: String| CatalogError::BadData { id: id.to_string(), message: e };
    let file: DataFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let ambient: BTreeSet<Point> = file.points.iter().copied().collect();
    let mut classes: Vec<ParallelClass> = Vec::new();
    for class in &file.classes {
        let blocks = class
            .iter()
            .map(|b| parse_block(b, file.shape))
            .collect::<Result<Vec<_>, ModelError>>()
            .map_err(|e| bad(e.to_string()))?;
        classes.push(ParallelClass::full(blocks));
    }
    if let Some(c) = file.cyclic {
        let base = BaseBlockFile {
            shape: file.shape,
            modulus: c.modulus,
            fixed: c.fixed,
            base_classes: c.base_classes,
            grouped: c.grouped,
        };
        classes.extend(base.develop().map_err(|e| bad(e.to_string()))?);
    }
    if let Some(s) = file.subscripts {
        for class in &s.base_classes {
            let blocks = class
                .iter()
                .map(|b| parse_block(b, file.shape))
                .collect::<Result<Vec<_>, ModelError>>()
                .map_err(|e| bad(e.to_string()))?;
            classes.extend(develop_subscripts(&blocks, s.modulus).map_err(|e| bad(e.to_string()))?);
        }
    }
    let classes = classes.iter().map(|c| ParallelClass::merge([c], &ambient)).collect();
    let design = ResolvableDesign::new(ambient, file.lambda, file.shape, classes);
    let doc = match file.kind {
        IngredientKind::ResolvableDesign => Document::Design(design),
        IngredientKind::Rgdd => Document::Grouped(GroupedDesign::new(
            design,
            file.groups.ok_or_else(|| bad("RGDD without groups".into()))?,
            GroupedKind::Rgdd,
        )),
        IngredientKind::Ird => Document::Grouped(GroupedDesign::ird(
            design,
            file.hole.ok_or_else(|| bad("IRD without hole".into()))?.into_iter().collect(),
        )),
        other => return Err(bad(format!("unsupported data kind {other}"))),
    };
    Ok(doc)
}

/// Generated ingredients, by key. Returns the id and a constructor.
pub(crate) fn generator(key: &IngredientKey) -> Option<(String, Box<dyn Fn() -> Document>)> {
    let lambda = key.lambda;
    match (key.kind, key.shape, &key.type_spec, key.hole) {
        (IngredientKind::OneFactorization, Shape::K2, TypeSpec::Order(v), None)
            if lambda == 1 && *v >= 2 && v % 2 == 0 =>
        {
            let v = *v as u32;
            Some(("round-robin".into(), Box::new(move || Document::Design(round_robin(v)))))
        }
        (IngredientKind::OneFactorization, Shape::K2, TypeSpec::Groups(parts), None)
            if lambda == 1 && parts.len() == 1 && parts[0].0 == 2 && parts[0].1 >= 2 =>
        {
            let t = parts[0].1 as u32;
            Some((
                "round-robin-minus-factor".into(),
                Box::new(move || Document::Grouped(cocktail_party(t))),
            ))
        }
        (IngredientKind::ResolvableDesign, shape @ (Shape::K2 | Shape::K3 | Shape::K4), TypeSpec::Order(v), None)
            if lambda == 1 && *v == shape.vertex_count() as u64 =>
        {
            Some(("single-block".into(), Box::new(move || Document::Design(single_block(shape)))))
        }
        (IngredientKind::Rgdd, Shape::C4, TypeSpec::Groups(parts), None) if lambda == 1 && parts == &[(2, 2)] => {
            Some(("bipartite-four-cycle".into(), Box::new(|| Document::Grouped(four_cycle_on_two_pairs()))))
        }
        (IngredientKind::Frame, Shape::K2, TypeSpec::Groups(parts), None)
            if lambda == 1 && parts.len() == 1 && parts[0].0 == 2 && parts[0].1 >= 3 =>
        {
            let u = parts[0].1 as u32;
            let id = if u % 2 == 1 { "lifted-near-one-factorization" } else { "starter-with-fixed-group" };
            Some((id.into(), Box::new(move || Document::Grouped(matching_frame(u)))))
        }
        _ => None,
    }
}

fn k2(a: u32, b: u32) -> Block {
    Block::new(Shape::K2, vec![Point::Int(a), Point::Int(b)]).expect("distinct points")
}

/// Classes of the round-robin 1-factorization of `K_{2t}`: point `2t−1`
/// is fixed and class `r` pairs `r+i` with `r−i` mod `2t−1`.
fn round_robin_classes(v: u32) -> Vec<ParallelClass> {
    let m = v - 1;
    (0..m)
        .map(|r| {
            let mut blocks = vec![k2(r, m)];
            for i in 1..v / 2 {
                blocks.push(k2((r + i) % m, (r + m - i) % m));
            }
            ParallelClass::full(blocks)
        })
        .collect()
}

pub fn round_robin(v: u32) -> ResolvableDesign {
    assert!(v >= 2 && v % 2 == 0);
    ResolvableDesign::new((0..v).map(Point::Int), 1, Shape::K2, round_robin_classes(v))
}

/// `K_{2t}` minus one 1-factor, resolved into `2t−2` matchings. The removed
/// factor forms the groups.
pub fn cocktail_party(t: u32) -> GroupedDesign {
    let mut classes = round_robin_classes(2 * t);
    let removed = classes.remove(0);
    let groups = removed.blocks.iter().map(|b| b.points().to_vec()).collect();
    let design = ResolvableDesign::new((0..2 * t).map(Point::Int), 1, Shape::K2, classes);
    GroupedDesign::new(design, groups, GroupedKind::Rgdd)
}

fn single_block(shape: Shape) -> ResolvableDesign {
    let n = shape.vertex_count() as u32;
    let block = Block::new(shape, (0..n).map(Point::Int).collect()).expect("distinct points");
    ResolvableDesign::new((0..n).map(Point::Int), 1, shape, vec![ParallelClass::full(vec![block])])
}

fn four_cycle_on_two_pairs() -> GroupedDesign {
    let block = Block::new(Shape::C4, [0, 2, 1, 3].map(Point::Int).to_vec()).expect("distinct points");
    let design = ResolvableDesign::new((0..4).map(Point::Int), 1, Shape::C4, vec![ParallelClass::full(vec![block])]);
    GroupedDesign::new(
        design,
        vec![vec![Point::Int(0), Point::Int(1)], vec![Point::Int(2), Point::Int(3)]],
        GroupedKind::Rgdd,
    )
}

/// K2-frame of type `2^u`: two partial matchings miss each group.
///
/// Odd `u` lifts the near-1-factorization of `K_u` (point `x` becomes
/// `2x, 2x+1`, each edge two matchings of `K_{2,2}`). Even `u` develops one
/// base class over `Z_n`, `n = 2(u−1)`, with groups `{i, i+u−1}` and a
/// fixed group `{n, n+1}`; the two classes missing the fixed group are the
/// difference-1 edges split by parity.
pub fn matching_frame(u: u32) -> GroupedDesign {
    assert!(u >= 3);
    let mut classes = Vec::new();
    let (points, groups): (BTreeSet<Point>, Vec<Vec<Point>>) = if u % 2 == 1 {
        let points = (0..2 * u).map(Point::Int).collect();
        for i in 0..u {
            let edges: Vec<(u32, u32)> = (1..=(u - 1) / 2).map(|j| ((i + j) % u, (i + u - j) % u)).collect();
            for twist in 0..2 {
                let blocks = edges
                    .iter()
                    .flat_map(|&(a, b)| [k2(2 * a, 2 * b + twist), k2(2 * a + 1, 2 * b + 1 - twist)])
                    .collect();
                classes.push(ParallelClass::merge([&ParallelClass::full(blocks)], &points));
            }
        }
        let groups = (0..u).map(|x| vec![Point::Int(2 * x), Point::Int(2 * x + 1)]).collect();
        (points, groups)
    } else {
        let m = u - 1;
        let n = 2 * m;
        let points = (0..n + 2).map(Point::Int).collect();
        for shift in 0..2 {
            let blocks = (0..m).map(|j| k2((2 * j + shift) % n, (2 * j + 1 + shift) % n)).collect();
            classes.push(ParallelClass::merge([&ParallelClass::full(blocks)], &points));
        }
        let (x, y, pairs) = fixed_point_starter(m).expect("a starter exists for every odd m >= 3");
        for s in 0..n {
            let mut blocks = vec![k2(n, (x + s) % n), k2(n + 1, (y + s) % n)];
            blocks.extend(pairs.iter().map(|&(a, b)| k2((a + s) % n, (b + s) % n)));
            classes.push(ParallelClass::merge([&ParallelClass::full(blocks)], &points));
        }
        let mut groups: Vec<Vec<Point>> = (0..m).map(|i| vec![Point::Int(i), Point::Int(i + m)]).collect();
        groups.push(vec![Point::Int(n), Point::Int(n + 1)]);
        (points, groups)
    };
    let design = ResolvableDesign::new(points, 1, Shape::K2, classes);
    GroupedDesign::new(design, groups, GroupedKind::Frame)
}

/// Points `x, y` and pairs partitioning `Z_{2m} ∖ {0, m, x, y}` whose
/// differences are `±2..±(m−1)`, each exactly once.
fn fixed_point_starter(m: u32) -> Option<(u32, u32, Vec<(u32, u32)>)> {
    let n = 2 * m;
    let difference_sum: u32 = (2..m).sum();
    for x in 1..n {
        for y in x + 1..n {
            let remaining: u32 = (0..n).sum::<u32>() - m - x - y;
            if y == m || x == m || remaining % 2 != difference_sum % 2 {
                continue;
            }
            let mut used = vec![false; n as usize];
            for p in [0, m, x, y] {
                used[p as usize] = true;
            }
            let mut out = Vec::new();
            if place_differences(n, m - 1, &mut used, &mut out) {
                out.sort();
                return Some((x, y, out));
            }
        }
    }
    None
}

/// Places one pair of difference `d`, then `d−1`, down to 2, on unused
/// points of `Z_n`.
fn place_differences(n: u32, d: u32, used: &mut [bool], out: &mut Vec<(u32, u32)>) -> bool {
    if d < 2 {
        return true;
    }
    for p in 0..n {
        let q = (p + d) % n;
        if used[p as usize] || used[q as usize] {
            continue;
        }
        used[p as usize] = true;
        used[q as usize] = true;
        out.push((p.min(q), p.max(q)));
        if place_differences(n, d - 1, used, out) {
            return true;
        }
        out.pop();
        used[p as usize] = false;
        used[q as usize] = false;
    }
    false
}
