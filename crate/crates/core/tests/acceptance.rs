//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use rdk::admissibility::{divisibility_check, spectrum_verdict};
use rdk::catalog::{data_keys, showcase_keys, verify_document, IngredientKey, IngredientSource, Registry, TypeSpec};
use rdk::cli::{run, ExitStatus};
use rdk::model::{DesignFile, Document};
use rdk::search::{search, Budget, SearchOutcome, SearchProblem};
use rdk::{GroupedKind, Shape};

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(detail: impl Into<String>) -> Outcome {
    Outcome {
        pass: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        pass: false,
        detail: detail.into(),
    }
}

/// Class counts from edge accounting: each class covers `blocks × |E|`
/// edges and each point lies in one block per full class.
fn expected_classes(doc: &Document) -> (u64, u64) {
    let d = doc.design();
    let v = d.order() as u64;
    let lambda = d.lambda as u64;
    let nv = d.shape.vertex_count() as u64;
    let ne = d.shape.edge_count() as u64;
    let pairs = |n: u64| n * n.saturating_sub(1) / 2;
    match doc {
        Document::Design(_) => (lambda * pairs(v) / ((v / nv) * ne), 0),
        Document::Grouped(g) => match g.kind {
            GroupedKind::Rgdd | GroupedKind::Gdd => {
                let within: u64 = g.groups.iter().map(|x| pairs(x.len() as u64)).sum();
                (lambda * (pairs(v) - within) / ((v / nv) * ne), 0)
            }
            GroupedKind::Frame => {
                // Uniform groups: every partial class has (v−g)/|V| blocks.
                let size = g.groups[0].len() as u64;
                let within: u64 = g.groups.iter().map(|x| pairs(x.len() as u64)).sum();
                (0, lambda * (pairs(v) - within) / (((v - size) / nv) * ne))
            }
            GroupedKind::Ird => {
                let h = g.hole.as_ref().map_or(0, |h| h.len() as u64);
                // Each point outside the hole has degree λ(v−1); a full class
                // gives it 2|E|/|V| on average, a partial class the same on
                // the v−h covered points. Hole points see only full classes.
                let full = lambda * (v - h) * nv / (2 * ne);
                let partial = lambda * (h - 1) * nv / (2 * ne);
                (full, partial)
            }
        },
    }
}

fn class_split(doc: &Document) -> (u64, u64) {
    let d = doc.design();
    let full = d.classes.iter().filter(|c| c.is_full()).count() as u64;
    (full, d.classes.len() as u64 - full)
}

fn builtin_keys(reg: &Registry) -> Vec<IngredientKey> {
    let mut keys = data_keys();
    keys.extend(
        showcase_keys()
            .into_iter()
            .filter(|k| matches!(reg.source(k), IngredientSource::Builtin { .. })),
    );
    keys
}

fn criterion_1() -> Outcome {
    let mut reg = Registry::default();
    let keys = builtin_keys(&reg);
    for key in &keys {
        let doc = match reg.fetch(key) {
            Ok(d) => d,
            Err(e) => return fail(format!("{key}: {e}")),
        };
        if !verify_document(&doc).valid {
            return fail(format!("{key} does not verify"));
        }
        if class_split(&doc) != expected_classes(&doc) {
            return fail(format!(
                "{key}: classes {:?}, expected {:?}",
                class_split(&doc),
                expected_classes(&doc)
            ));
        }
    }
    let pinned: [(IngredientKey, (u64, u64)); 6] = [
        (IngredientKey::design(Shape::C4, 4, 2), (3, 0)),
        (IngredientKey::design(Shape::Kite, 8, 2), (7, 0)),
        (IngredientKey::rgdd(Shape::K13, &[(4, 2)], 6), (16, 0)),
        (IngredientKey::design(Shape::K13, 20, 6), (76, 0)),
        (IngredientKey::design(Shape::K4e, 20, 5), (38, 0)),
        (IngredientKey::ird(Shape::K4e, 28, 8, 5), (40, 14)),
    ];
    for (key, want) in pinned {
        let doc = reg.fetch(&key).expect("pinned objects are built in");
        if class_split(&doc) != want {
            return fail(format!("{key}: {:?} != {want:?}", class_split(&doc)));
        }
    }
    if keys.len() < 15 {
        return fail(format!("only {} built-in objects", keys.len()));
    }
    ok(format!("{} built-in objects verified with exact class counts", keys.len()))
}

fn cli(args: &[&str]) -> (ExitStatus, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["rdk"];
    argv.extend_from_slice(args);
    let status = run(argv, &mut out, &mut err);
    (status, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn generate_and_verify(dir: &std::path::Path, shape: Shape, v: u64, lambda: u32) -> Result<(), String> {
    let path = dir.join(format!("{}_{v}_{lambda}.json", shape.name()));
    let p = path.to_str().unwrap();
    let (status, _, err) = cli(&["generate", shape.name(), &v.to_string(), &lambda.to_string(), "--out", p]);
    if status != ExitStatus::Success {
        return Err(format!("generate {shape} {v} {lambda}: {status:?} {err}"));
    }
    let (status, _, err) = cli(&["verify", p]);
    if status != ExitStatus::Success {
        return Err(format!("verify {shape} {v} {lambda}: {status:?} {err}"));
    }
    let doc = DesignFile::parse(&std::fs::read_to_string(&path).unwrap()).map_err(|e| e.to_string())?;
    let want = expected_classes(&doc).0;
    if doc.design().classes.len() as u64 != want || doc.design().lambda != lambda {
        return Err(format!("{shape} {v} {lambda}: {} classes, expected {want}", doc.design().classes.len()));
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut cases = Vec::new();
    for v in [4, 8, 12, 16, 20, 24] {
        cases.push((Shape::C4, v, 2));
        cases.push((Shape::Kite, v, 2));
    }
    for v in [4, 16] {
        cases.push((Shape::K13, v, 2));
    }
    for v in [8, 12, 20, 24, 36] {
        cases.push((Shape::K13, v, 6));
    }
    for v in [4, 8, 12, 16, 20] {
        cases.push((Shape::K4e, v, 5));
    }
    for &(shape, v, lambda) in &cases {
        if let Err(e) = generate_and_verify(dir.path(), shape, v, lambda) {
            return fail(e);
        }
    }
    ok(format!("{} designs generated and verified", cases.len()))
}

fn criterion_3() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (Shape::C4, 8, 6),
        (Shape::Kite, 8, 6),
        (Shape::K13, 8, 12),
        (Shape::K13, 16, 4),
        (Shape::K4e, 8, 10),
        (Shape::K4e, 12, 15),
    ];
    for &(shape, v, lambda) in &cases {
        if let Err(e) = generate_and_verify(dir.path(), shape, v, lambda) {
            return fail(e);
        }
    }
    ok(format!("{} index multiples composed with r = λ(v−1)|V|/(2|E|)", cases.len()))
}

fn criterion_4() -> Outcome {
    if search(&SearchProblem::design(Shape::K3, 6, 2)) != SearchOutcome::ExhaustedNonexistent {
        return fail("(2K6, K3) not exhausted");
    }
    let mut agreed = 0;
    let mut enumerated = 0;
    for shape in Shape::ALL {
        for v in shape.vertex_count()..=8 {
            for lambda in 1..=6u32 {
                if divisibility_check(shape, v as u64, lambda as u64).unwrap().is_admissible() {
                    continue;
                }
                let filtered = search(&SearchProblem::design(shape, v, lambda));
                if filtered != SearchOutcome::ExhaustedNonexistent {
                    return fail(format!("{shape} {v} {lambda}: {:?}", filtered.to_json()));
                }
                agreed += 1;
                if v <= 6 && lambda <= 2 {
                    let full = search(
                        &SearchProblem {
                            prefilter: false,
                            ..SearchProblem::design(shape, v, lambda)
                        }
                        .with_budget(Budget::nodes(20_000_000)),
                    );
                    if full != SearchOutcome::ExhaustedNonexistent {
                        return fail(format!("{shape} {v} {lambda} unfiltered: {:?}", full.to_json()));
                    }
                    enumerated += 1;
                }
            }
        }
    }
    ok(format!(
        "(2K6,K3) exhausted; {agreed} inadmissible cases agree with the pre-filter, {enumerated} of them by full enumeration"
    ))
}

fn params(doc: &Document) -> (Shape, usize, u32, usize, Option<Vec<(usize, usize)>>) {
    let d = doc.design();
    let groups = match doc {
        Document::Grouped(g) => Some(g.type_vector()),
        Document::Design(_) => None,
    };
    (d.shape, d.order(), d.lambda, d.classes.len(), groups)
}

fn criterion_5() -> Outcome {
    let mut reg = Registry::default();
    let mut cases: Vec<(SearchProblem, IngredientKey)> = vec![
        (SearchProblem::design(Shape::C4, 4, 2), IngredientKey::design(Shape::C4, 4, 2)),
        (SearchProblem::design(Shape::Kite, 4, 2), IngredientKey::design(Shape::Kite, 4, 2)),
        (SearchProblem::design(Shape::K13, 4, 2), IngredientKey::design(Shape::K13, 4, 2)),
        (SearchProblem::design(Shape::K4e, 4, 5), IngredientKey::design(Shape::K4e, 4, 5)),
    ];
    for t in 2..=4u64 {
        cases.push((
            SearchProblem::rgdd(Shape::K2, &[(2, t as usize)], 1),
            IngredientKey::one_factorization(TypeSpec::groups(&[(2, t)])),
        ));
    }
    for (problem, key) in &cases {
        let SearchOutcome::Found(found) = search(problem) else {
            return fail(format!("search did not find {key}"));
        };
        let catalog = reg.fetch(key).expect("catalog entry");
        if params(&found) != params(&catalog) {
            return fail(format!("{key}: {:?} vs {:?}", params(&found), params(&catalog)));
        }
    }
    ok(format!("{} searched objects match catalog parameters", cases.len()))
}

fn design_mut(doc: &mut Document) -> &mut rdk::ResolvableDesign {
    match doc {
        Document::Design(d) => d,
        Document::Grouped(g) => &mut g.design,
    }
}

fn vertex_set(b: &rdk::Block) -> Vec<rdk::Point> {
    let mut v = b.points().to_vec();
    v.sort();
    v
}

/// Applies one random mutation; `None` when the chosen kind does not apply.
fn mutate(doc: &Document, rng: &mut ChaCha8Rng) -> Option<(String, Document)> {
    let mut m = doc.clone();
    let d = design_mut(&mut m);
    let nc = d.classes.len();
    match rng.gen_range(0..3) {
        0 => {
            let c = rng.gen_range(0..nc);
            let b = rng.gen_range(0..d.classes[c].blocks.len());
            d.classes[c].blocks.remove(b);
            Some((format!("delete block {b} of class {c}"), m))
        }
        1 => {
            let c = rng.gen_range(0..nc);
            let src = rng.gen_range(0..nc);
            let b = d.classes[src].blocks.choose(rng)?.clone();
            d.classes[c].blocks.push(b);
            Some((format!("insert a block of class {src} into class {c}"), m))
        }
        _ => {
            if nc < 2 {
                return None;
            }
            let i = rng.gen_range(0..nc);
            let j = (i + rng.gen_range(1..nc)) % nc;
            let bi = rng.gen_range(0..d.classes[i].blocks.len());
            let candidates: Vec<usize> = (0..d.classes[j].blocks.len())
                .filter(|&bj| vertex_set(&d.classes[j].blocks[bj]) != vertex_set(&d.classes[i].blocks[bi]))
                .collect();
            let bj = *candidates.choose(rng)?;
            let a = d.classes[i].blocks[bi].clone();
            let b = std::mem::replace(&mut d.classes[j].blocks[bj], a);
            d.classes[i].blocks[bi] = b;
            Some((format!("swap blocks between classes {i} and {j}"), m))
        }
    }
}

fn corpus() -> Vec<(String, Document)> {
    let mut reg = Registry::default();
    let mut docs: Vec<(String, Document)> = builtin_keys(&reg)
        .into_iter()
        .map(|k| {
            let d = reg.fetch(&k).unwrap();
            (k.to_string(), d)
        })
        .collect();
    for (shape, v, lambda) in [(Shape::C4, 16, 2), (Shape::K13, 24, 6), (Shape::K4e, 16, 5)] {
        let key = IngredientKey::design(shape, v, lambda);
        docs.push((key.to_string(), reg.fetch(&key).unwrap()));
    }
    docs
}

fn criterion_6() -> Outcome {
    let docs = corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
    let mut done = 0;
    while done < 100 {
        let (name, doc) = docs.choose(&mut rng).unwrap();
        let Some((what, mutated)) = mutate(doc, &mut rng) else { continue };
        if verify_document(&mutated).valid {
            return fail(format!("{name}: '{what}' still verifies"));
        }
        *kinds.entry(what.split(' ').next().unwrap().to_string()).or_default() += 1;
        done += 1;
    }
    ok(format!("100 mutations over {} objects all rejected {kinds:?}", docs.len()))
}

fn criterion_7() -> Outcome {
    let rgdd = IngredientKey::rgdd;
    let cases: Vec<(u64, &str, Vec<IngredientKey>)> = vec![
        (
            140,
            "k4e.v20mod120",
            vec![rgdd(Shape::K4, &[(4, 7)], 1), rgdd(Shape::K4e, &[(5, 4)], 5)],
        ),
        (164, "k4e.v44mod120", vec![rgdd(Shape::K4e, &[(4, 41)], 5)]),
        (188, "k4e.v68mod120", vec![IngredientKey::frame(Shape::K4e, &[(20, 9)], 1)]),
        (212, "k4e.v92mod120", vec![rgdd(Shape::K4e, &[(2, 106)], 1)]),
        (116, "k4e.v116mod120", vec![IngredientKey::design(Shape::K4e, 116, 1)]),
    ];
    for (v, route, want) in cases {
        let (status, out, _) = cli(&["generate", "K4E", &v.to_string(), "5", "--dry-run", "--trace"]);
        if status != ExitStatus::MissingIngredient {
            return fail(format!("v={v}: exit {status:?}"));
        }
        let value: Value = serde_json::from_str(&out).unwrap();
        let mut missing: Vec<IngredientKey> = value["missing"]
            .as_array()
            .unwrap()
            .iter()
            .map(|m| serde_json::from_value(m["key"].clone()).unwrap())
            .collect();
        missing.sort();
        let mut want = want;
        want.sort();
        if missing != want {
            return fail(format!("v={v}: missing {missing:?}"));
        }
        let root = value["recipe"]["root"]["route"].as_str().unwrap_or_default();
        let want_root = if v == 116 { "copies" } else { route };
        if root != want_root {
            return fail(format!("v={v}: root cites {root}, expected {want_root}"));
        }
        let mut externals = Vec::new();
        collect_externals(&value["recipe"]["root"], &mut externals);
        if externals.iter().any(|r| r != route) || externals.is_empty() {
            return fail(format!("v={v}: external leaves cite {externals:?}, expected {route}"));
        }
        if !spectrum_verdict(Shape::K4e, v, 5).unwrap().is_admissible() {
            return fail(format!("v={v} is not admissible"));
        }
    }
    ok("five residues: routes and EXTERNAL lists exact")
}

fn collect_externals(step: &Value, out: &mut Vec<String>) {
    if step["op"]["source"]["source"] == "EXTERNAL" {
        out.push(step["route"].as_str().unwrap().to_string());
    }
    if let Some(children) = step["children"].as_array() {
        for c in children {
            collect_externals(c, out);
        }
    }
}

fn main() {
    let criteria: [(u32, &str, u64, fn() -> Outcome); 7] = [
        (1, "built-in sweep", 10, criterion_1),
        (2, "planner coverage", 60, criterion_2),
        (3, "index composition", 30, criterion_3),
        (4, "nonexistence oracle", 60, criterion_4),
        (5, "search vs catalog", 120, criterion_5),
        (6, "mutation soundness", 30, criterion_6),
        (7, "dry-run completeness", 5, criterion_7),
    ];
    let mut failures = 0;
    for (n, name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let pass = outcome.pass && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {n} ({name}): {} [{:.2} s, limit {limit} s{}]",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", exceeded" }
        );
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
