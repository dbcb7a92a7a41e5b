use std::collections::BTreeMap;

use super::*;
use crate::admissibility::class_count;
use crate::catalog::{cocktail_party, matching_frame, round_robin, Registry, TypeSpec};
use crate::model::Edge;
use crate::search::{search, SearchOutcome, SearchProblem};

fn fetch(reg: &mut Registry, key: IngredientKey) -> Document {
    reg.fetch(&key).unwrap()
}

fn design_of(doc: Document) -> ResolvableDesign {
    match doc {
        Document::Design(d) => d,
        Document::Grouped(_) => panic!("expected a design"),
    }
}

fn grouped_of(doc: Document) -> GroupedDesign {
    match doc {
        Document::Grouped(g) => g,
        Document::Design(_) => panic!("expected a grouped design"),
    }
}

fn edge_multiset<'a>(blocks: impl Iterator<Item = &'a Block>) -> BTreeMap<Edge, u32> {
    let mut out = BTreeMap::new();
    for b in blocks {
        for e in b.edges() {
            *out.entry(e).or_default() += 1;
        }
    }
    out
}

#[test]
fn star_six_k8_from_fill() {
    let mut reg = Registry::default();
    let host = grouped_of(fetch(&mut reg, IngredientKey::rgdd(Shape::K13, &[(4, 2)], 6)));
    let filler = design_of(reg.fetch(&IngredientKey::design(Shape::K13, 4, 6)).unwrap());
    assert_eq!(filler.classes.len(), 12);
    let out = design_of(fill_groups(&host, &filler, None).unwrap());
    assert_eq!(out.classes.len(), 28);
    assert_eq!(out.classes.len() as u64, class_count(Shape::K13, 8, 6).unwrap());
}

#[test]
fn fill_then_unfill_restores_host_edges() {
    let mut reg = Registry::default();
    let host = grouped_of(fetch(&mut reg, IngredientKey::rgdd(Shape::K13, &[(4, 3)], 6)));
    let filler = design_of(reg.fetch(&IngredientKey::design(Shape::K13, 4, 6)).unwrap());
    let out = design_of(fill_groups(&host, &filler, None).unwrap());
    assert_eq!(out.classes.len(), 44);
    let groups: Vec<BTreeSet<Point>> = host.groups.iter().map(|g| g.iter().copied().collect()).collect();
    let cross = out
        .blocks()
        .filter(|b| !groups.iter().any(|g| b.points().iter().all(|p| g.contains(p))));
    assert_eq!(edge_multiset(cross), edge_multiset(host.design.blocks()));
}

#[test]
fn single_group_host_returns_the_filler() {
    let mut reg = Registry::default();
    let filler = design_of(reg.fetch(&IngredientKey::design(Shape::C4, 4, 2)).unwrap());
    let host_design = ResolvableDesign::new(filler.points.iter().copied(), 2, Shape::C4, Vec::new());
    let host = GroupedDesign::new(host_design, vec![filler.points.iter().copied().collect()], GroupedKind::Rgdd);
    let out = design_of(fill_groups(&host, &filler, None).unwrap());
    assert_eq!(out, filler);
}

#[test]
fn fill_rejects_index_and_size_mismatch() {
    let mut reg = Registry::default();
    let host = grouped_of(fetch(&mut reg, IngredientKey::rgdd(Shape::K13, &[(4, 2)], 6)));
    let wrong_index = design_of(reg.fetch(&IngredientKey::design(Shape::K13, 4, 2)).unwrap());
    assert!(matches!(
        fill_groups(&host, &wrong_index, None),
        Err(ConstructionError::IndexMismatch(_))
    ));
    let wrong_size = design_of(reg.fetch(&IngredientKey::design(Shape::K13, 8, 6)).unwrap());
    assert!(matches!(
        fill_groups(&host, &wrong_size, None),
        Err(ConstructionError::FillMismatch(_))
    ));
}

#[test]
fn fill_leaving_hole_gives_incomplete_design() {
    let mut reg = Registry::default();
    let host = grouped_of(fetch(&mut reg, IngredientKey::rgdd(Shape::K13, &[(4, 3)], 6)));
    let filler = design_of(reg.fetch(&IngredientKey::design(Shape::K13, 4, 6)).unwrap());
    let ird = grouped_of(fill_groups(&host, &filler, Some(2)).unwrap());
    assert_eq!(ird.kind, GroupedKind::Ird);
    assert_eq!(ird.design.full_class_count(), 32);
    assert_eq!(ird.design.classes.len() - 32, 12);
}

#[test]
fn weight_four_on_kts9() {
    let mut reg = Registry::default();
    let master = fetch(&mut reg, IngredientKey::design(Shape::K3, 9, 1));
    let ing = repeat_classes(&fetch(&mut reg, IngredientKey::rgdd(Shape::K13, &[(4, 3)], 3)), 2);
    let host = grouped_of(weight_and_replace(&master, 4, &ing, 1).unwrap());
    assert_eq!(host.design.classes.len(), 128);
    assert_eq!(host.type_vector(), vec![(4, 9)]);
    let filler = design_of(reg.fetch(&IngredientKey::design(Shape::K13, 4, 6)).unwrap());
    let out = design_of(fill_groups(&host, &filler, None).unwrap());
    assert_eq!(out.classes.len(), 140);
}

#[test]
fn weight_one_with_single_block_is_identity() {
    let mut reg = Registry::default();
    let master = design_of(fetch(&mut reg, IngredientKey::design(Shape::K4, 16, 1)));
    let ing = fetch(&mut reg, IngredientKey::design(Shape::K4, 4, 1));
    let out = design_of(weight_and_replace(&Document::Design(master.clone()), 1, &ing, 1).unwrap());
    assert_eq!(out, master.normalized());
}

#[test]
fn weight_rejects_wrong_ingredient_type() {
    let master = Document::Design(round_robin(6));
    let ing = Document::Grouped(cocktail_party(3));
    assert!(matches!(
        weight_and_replace(&master, 2, &ing, 1),
        Err(ConstructionError::ReplaceMismatch(_))
    ));
}

#[test]
fn repeat_scales_index_and_classes() {
    let mut reg = Registry::default();
    let d = fetch(&mut reg, IngredientKey::design(Shape::C4, 4, 2));
    let out = design_of(repeat_classes(&d, 3));
    assert_eq!((out.lambda, out.classes.len()), (6, 9));
    assert!(verify_document(&Document::Design(out)).valid);
    assert_eq!(repeat_classes(&d, 1), d);
}

#[test]
fn k2_frame_with_hole_gives_one_factorization() {
    // A 1-factorization of K_{2u+2} from a K2 frame of type 2^u, a K2 IRD
    // on four points with a hole of two, and one edge on the hole.
    for u in 3..=7 {
        let frame = matching_frame(u);
        let points: Vec<Point> = (0..4).map(Point::Int).collect();
        let k2 = |a: usize, b: usize| Block::new(Shape::K2, vec![points[a], points[b]]).unwrap();
        let hole: BTreeSet<Point> = [points[2], points[3]].into();
        let classes = vec![
            ParallelClass::full(vec![k2(0, 2), k2(1, 3)]),
            ParallelClass::full(vec![k2(0, 3), k2(1, 2)]),
            ParallelClass::partial(vec![k2(0, 1)], hole.clone()),
        ];
        let ird = GroupedDesign::ird(ResolvableDesign::new(points.clone(), 1, Shape::K2, classes), hole);
        let filler = round_robin(2);
        let out = frame_fill_with_hole(&frame, &ird, &filler, 1).unwrap();
        assert_eq!(out.order(), 2 * u as usize + 2);
        assert_eq!(out.classes.len(), 2 * u as usize + 1);
    }
}

#[test]
fn frame_fill_rejects_mismatched_counts() {
    let frame = matching_frame(3);
    let points: Vec<Point> = (0..4).map(Point::Int).collect();
    let hole: BTreeSet<Point> = [points[2], points[3]].into();
    let ird = GroupedDesign::ird(ResolvableDesign::new(points, 1, Shape::K2, Vec::new()), hole);
    assert!(matches!(
        frame_fill_with_hole(&frame, &ird, &round_robin(2), 1),
        Err(ConstructionError::CombineMismatch(_))
    ));
    let single = GroupedDesign::new(
        ResolvableDesign::new((0..2).map(Point::Int), 1, Shape::K2, Vec::new()),
        vec![(0..2).map(Point::Int).collect()],
        GroupedKind::Frame,
    );
    assert!(matches!(
        frame_fill_with_hole(&single, &ird, &round_robin(2), 1),
        Err(ConstructionError::CombineMismatch(_))
    ));
}

#[test]
fn matchings_partition_the_circulant() {
    for v in [12u32, 92, 212] {
        let ms = one_factor_matchings(v).unwrap();
        let mut degree = vec![0u32; v as usize];
        let mut edges = BTreeSet::new();
        for m in &ms {
            assert_eq!(m.len() as u32, v / 2);
            let mut seen = BTreeSet::new();
            for &(a, b) in m {
                assert!(seen.insert(a) && seen.insert(b));
                assert!(edges.insert((a, b)));
                degree[a as usize] += 1;
                degree[b as usize] += 1;
            }
        }
        assert_eq!(edges.len() as u32, 5 * v / 2);
        assert!(degree.iter().all(|&d| d == 5));
        let half = v / 2;
        for &(a, b) in &edges {
            let d = (b - a).min(v - (b - a));
            assert!(d == 1 || d == half - 1 || d == half);
        }
    }
    assert!(one_factor_matchings(18).is_err());
    assert!(one_factor_matchings(4).is_err());
}

#[test]
fn final_blocks_form_two_classes_on_the_circulant() {
    let v = 92;
    let [even, odd] = one_factor_final_blocks(v);
    for class in [&even, &odd] {
        assert_eq!(class.len() as u32, v / 4);
        let pts: BTreeSet<Point> = class.iter().flat_map(|b| b.points().iter().copied()).collect();
        assert_eq!(pts.len() as u32, v);
    }
    let union: BTreeSet<(u32, u32)> = one_factor_matchings(v).unwrap().concat().into_iter().collect();
    let covered: BTreeSet<(u32, u32)> = even
        .iter()
        .chain(&odd)
        .flat_map(|b| b.edges())
        .map(|(a, b)| (a.as_int().unwrap(), b.as_int().unwrap()))
        .collect();
    assert_eq!(covered, union);
}

/// Stand-in for a K4E RGDD of type 2^6: any index-1 decomposition with the
/// right groups. It is not resolvable, so the mock is checked by edge
/// multiplicities only.
#[test]
fn mock_one_factor_ledger_balances() {
    let v = 12u32;
    let problem = SearchProblem {
        resolvable: false,
        ..SearchProblem::rgdd(Shape::K4e, &[(2, 6)], 1)
    };
    let SearchOutcome::Found(doc) = search(&problem) else {
        panic!("a K4E decomposition of K_(2×6) exists");
    };
    let mock = grouped_of(*doc);
    let mut ledger: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for m in one_factor_matchings(v).unwrap() {
        let mut map = BTreeMap::new();
        for (g, &(a, b)) in mock.groups.iter().zip(&m) {
            map.insert(g[0], Point::Int(a));
            map.insert(g[1], Point::Int(b));
        }
        for b in mock.design.relabel(&map).unwrap().blocks() {
            for (x, y) in b.edges() {
                *ledger.entry((x.as_int().unwrap(), y.as_int().unwrap())).or_default() += 1;
            }
        }
    }
    for b in one_factor_final_blocks(v).concat() {
        for (x, y) in b.edges() {
            *ledger.entry((x.as_int().unwrap(), y.as_int().unwrap())).or_default() += 1;
        }
    }
    assert_eq!(ledger.len() as u32, v * (v - 1) / 2);
    assert!(ledger.values().all(|&m| m == 5));
}

#[test]
fn one_factor_rejects_wrong_ingredient() {
    assert!(matches!(
        one_factor_construction(12, &cocktail_party(6)),
        Err(ConstructionError::OneFactor(_))
    ));
}

fn generate(shape: Shape, v: u64, lambda: u32) -> ResolvableDesign {
    let mut reg = Registry::default();
    let recipe = plan(shape, v, lambda, &reg).unwrap();
    assert!(recipe.missing().is_empty(), "{:?}", recipe.missing());
    design_of(execute(&recipe, &mut reg).unwrap())
}

#[test]
fn planned_designs_have_the_right_class_counts() {
    for (shape, v, lambda) in [
        (Shape::C4, 16, 2),
        (Shape::Kite, 8, 4),
        (Shape::K13, 16, 2),
        (Shape::K13, 8, 6),
        (Shape::K13, 24, 6),
        (Shape::K4e, 16, 5),
    ] {
        let d = generate(shape, v, lambda);
        assert_eq!(d.classes.len() as u64, class_count(shape, v, lambda as u64).unwrap(), "{shape} {v} {lambda}");
    }
}

#[test]
fn six_k44_stars_through_frame_and_hole() {
    let d = generate(Shape::K13, 44, 6);
    assert_eq!(d.classes.len() as u64, class_count(Shape::K13, 44, 6).unwrap());
}

#[test]
fn copy_count_note_on_star_replacement() {
    let reg = Registry::default();
    let recipe = plan(Shape::K13, 16, 2, &reg).unwrap();
    assert_eq!(recipe.root.route, "k13.v4mod12");
    assert_eq!(recipe.root.op, Op::WeightAndReplace { weight: 1, copies: 1 });
    assert!(recipe.root.notes.iter().any(|n| n.contains("= 1")));
}

#[test]
fn plan_rejects_inadmissible() {
    let reg = Registry::default();
    assert!(matches!(
        plan(Shape::C4, 6, 2, &reg),
        Err(ConstructionError::NotAdmissible { .. })
    ));
    assert!(matches!(
        plan(Shape::K13, 16, 1, &reg),
        Err(ConstructionError::NotAdmissible { .. })
    ));
}

#[test]
fn missing_external_for_5k36() {
    let mut reg = Registry::default();
    let recipe = plan(Shape::K4e, 36, 5, &reg).unwrap();
    assert_eq!(recipe.missing(), vec![IngredientKey::design(Shape::K4e, 36, 1)]);
    assert!(matches!(
        execute(&recipe, &mut reg),
        Err(ConstructionError::MissingIngredients(_))
    ));
}

#[test]
fn recipe_round_trips_through_json() {
    let reg = Registry::default();
    let recipe = plan(Shape::K4e, 212, 5, &reg).unwrap();
    let back: Recipe = serde_json::from_str(&recipe.to_json()).unwrap();
    assert_eq!(back, recipe);
    assert_eq!(
        recipe.missing(),
        vec![IngredientKey::rgdd(Shape::K4e, &[(2, 106)], 1)]
    );
}

#[test]
fn one_factorization_of_k6_key() {
    assert_eq!(
        IngredientKey::one_factorization(TypeSpec::Order(6)).to_string(),
        "ONE_FACTORIZATION K2 6 index 1"
    );
}
