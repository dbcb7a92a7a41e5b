//! Planning: the route table from `(shape, v, λ)` to a tree of operations,
//! and its execution against a [`Registry`].

use serde::{Deserialize, Serialize};

use crate::admissibility::{spectrum_verdict, Status, SPECTRUM};
use crate::catalog::{IngredientKey, IngredientSource, Registry, TypeSpec};
use crate::model::{Document, Shape};

use super::{
    fill_groups, frame_fill_with_hole, one_factor_construction, repeat_classes, weight_and_replace,
    ConstructionError,
};

/// One construction step. Leaves fetch ingredients; inner nodes combine
/// the outputs of their children in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    /// Identifier of the construction this node belongs to.
    pub route: String,
    pub op: Op,
    /// Parameters of the object this node produces.
    pub output: IngredientKey,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Op {
    Fetch { source: IngredientSource, available: bool },
    Repeat { times: u32 },
    WeightAndReplace { weight: u32, copies: u32 },
    FillGroups,
    /// Fills every group but the last, which becomes the hole.
    FillGroupsLeavingHole,
    FrameFillWithHole { copies: u32 },
    OneFactor { order: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recipe {
    pub shape: Shape,
    pub order: u64,
    pub lambda: u32,
    pub root: Step,
}

impl Recipe {
    /// Fetch leaves whose source is an absent external file, deduplicated.
    pub fn missing(&self) -> Vec<IngredientKey> {
        fn walk(step: &Step, out: &mut Vec<IngredientKey>) {
            if let Op::Fetch { available: false, .. } = step.op {
                out.push(step.output.clone());
            }
            for c in &step.children {
                walk(c, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Route identifiers in pre-order.
    pub fn routes(&self) -> Vec<String> {
        fn walk(step: &Step, out: &mut Vec<String>) {
            out.push(step.route.clone());
            for c in &step.children {
                walk(c, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("recipes serialize")
    }
}

enum Route {
    /// Fetched as a single ingredient.
    Leaf(&'static str),
    /// `λ / base` copies of the design at the base index.
    Copies(u32),
    Build(&'static str),
}

/// Smallest index at which the route table starts for this order.
fn base_index(shape: Shape, v: u64, lambda: u32) -> u32 {
    // Orders ≡ 4 (mod 12) and ≡ 16 (mod 20) have K4E designs at index 1
    // (external) and at index 5 from K4 designs; multiples of 5 use the
    // latter.
    if shape == Shape::K4e && v % 12 == 4 && lambda % 5 == 0 {
        return 5;
    }
    SPECTRUM
        .iter()
        .find(|r| r.shape == shape && r.residues.contains(&(v % r.modulus)))
        .map_or(1, |r| r.lambda_divisor as u32)
}

fn select_route(shape: Shape, v: u64, lambda: u32) -> Route {
    if shape == Shape::K3 && v == 6 {
        return Route::Leaf("catalog");
    }
    let base = base_index(shape, v, lambda);
    if lambda != base {
        return Route::Copies(base);
    }
    match (shape, base) {
        (Shape::C4, _) if v == 4 => Route::Leaf("c4.2k4"),
        (Shape::C4, _) => Route::Build("c4.v0mod4"),
        (Shape::Kite, _) if v == 4 => Route::Leaf("kite.2k4"),
        (Shape::Kite, _) if v == 8 => Route::Leaf("kite.2k8"),
        (Shape::Kite, _) => Route::Build("kite.v0mod4"),
        (Shape::K13, 2) if v == 4 => Route::Leaf("k13.2k4"),
        (Shape::K13, 2) => Route::Build("k13.v4mod12"),
        (Shape::K13, _) => match v {
            8 => Route::Build("k13.6k8"),
            12 => Route::Build("k13.6k12"),
            20 => Route::Leaf("k13.6k20"),
            24 => Route::Build("k13.6k24"),
            36 => Route::Build("k13.6k36"),
            _ if v % 12 == 0 => Route::Build("k13.v0mod12"),
            _ if v % 24 == 8 => Route::Build("k13.v8mod24"),
            _ => Route::Build("k13.v20mod24"),
        },
        (Shape::K4e, 5) => match v {
            4 => Route::Leaf("k4e.5k4"),
            8 => Route::Leaf("k4e.5k8"),
            12 => Route::Leaf("k4e.5k12"),
            20 => Route::Leaf("k4e.5k20"),
            24 => Route::Build("k4e.5k24"),
            36 => Route::Build("k4e.5k36"),
            44 => Route::Leaf("k4e.v44mod120"),
            68 => Route::Leaf("k4e.v68mod120"),
            _ if v % 12 == 4 => Route::Build("k4e.v4mod12"),
            _ if v % 12 == 0 => Route::Build("k4e.v0mod12"),
            _ if v % 24 == 8 => Route::Build("k4e.v8mod24"),
            _ => match v % 120 {
                20 => Route::Build("k4e.v20mod120"),
                44 => Route::Build("k4e.v44mod120"),
                68 => Route::Build("k4e.v68mod120"),
                _ => Route::Build("k4e.v92mod120"),
            },
        },
        (Shape::K4e, _) if v % 120 == 116 => Route::Leaf("k4e.v116mod120"),
        (Shape::K4e, _) => Route::Leaf("k4e.v16mod20"),
        _ => Route::Leaf("catalog"),
    }
}

fn admissible(shape: Shape, v: u64, lambda: u32) -> bool {
    spectrum_verdict(shape, v, lambda as u64).is_ok_and(|v| v.status == Status::Admissible)
}

/// The composite route that builds `(shape, v, λ)` when it is built from
/// other ingredients rather than fetched as one; `None` otherwise.
pub fn route_for(shape: Shape, v: u64, lambda: u32) -> Option<&'static str> {
    if !admissible(shape, v, lambda) {
        return None;
    }
    match select_route(shape, v, lambda) {
        Route::Leaf(_) => None,
        Route::Copies(_) => Some("copies"),
        Route::Build(id) => Some(id),
    }
}

fn design_key(shape: Shape, v: u64, lambda: u32) -> IngredientKey {
    if shape == Shape::K2 && lambda == 1 {
        IngredientKey::one_factorization(TypeSpec::Order(v))
    } else {
        IngredientKey::design(shape, v, lambda)
    }
}

struct Planner<'a> {
    registry: &'a Registry,
}

impl Planner<'_> {
    fn fetch(&self, route: &str, key: IngredientKey) -> Step {
        Step {
            route: route.to_string(),
            op: Op::Fetch {
                source: self.registry.source(&key),
                available: self.registry.is_available(&key),
            },
            output: key,
            notes: Vec::new(),
            children: Vec::new(),
        }
    }

    fn node(&self, route: &str, op: Op, output: IngredientKey, children: Vec<Step>) -> Step {
        Step {
            route: route.to_string(),
            op,
            output,
            notes: Vec::new(),
            children,
        }
    }

    /// Has a source that is not itself a composite route.
    fn direct(&self, key: &IngredientKey) -> bool {
        match self.registry.source(key) {
            IngredientSource::Imported { .. } => true,
            IngredientSource::Builtin { id } => !id.starts_with("recipe:"),
            _ => false,
        }
    }

    fn design(&self, shape: Shape, v: u64, lambda: u32) -> Step {
        let key = design_key(shape, v, lambda);
        let route = select_route(shape, v, lambda);
        let label = match route {
            Route::Leaf(id) | Route::Build(id) => id,
            Route::Copies(_) => "copies",
        };
        if self.direct(&key) {
            return self.fetch(label, key);
        }
        match route {
            Route::Leaf(id) => self.fetch(id, key),
            Route::Copies(base) => {
                let child = self.design(shape, v, base);
                self.node("copies", Op::Repeat { times: lambda / base }, key, vec![child])
            }
            Route::Build(id) => self.build(id, shape, v, lambda, key),
        }
    }

    /// `copies` from index arithmetic: target ÷ master index ÷ ingredient index.
    fn replace(&self, route: &str, weight: u32, output: IngredientKey, master: Step, ingredient: Step) -> Step {
        let product = master.output.lambda * ingredient.output.lambda;
        let copies = (output.lambda / product).max(1);
        let mut step = self.node(route, Op::WeightAndReplace { weight, copies }, output, vec![master, ingredient]);
        step.notes.push(format!(
            "copies = {} / ({} × {}) = {copies}",
            step.output.lambda, step.children[0].output.lambda, step.children[1].output.lambda
        ));
        step
    }

    fn fill(&self, route: &str, output: IngredientKey, host: Step, filler: Step) -> Step {
        self.node(route, Op::FillGroups, output, vec![host, filler])
    }

    fn build(&self, id: &'static str, shape: Shape, v: u64, lambda: u32, key: IngredientKey) -> Step {
        let rgdd = |g: u64, u: u64, l: u32| IngredientKey::rgdd(shape, &[(g, u)], l);
        let repeat = |times: u32, child: Step| {
            let mut out = child.output.clone();
            out.lambda *= times;
            self.node(id, Op::Repeat { times }, out, vec![child])
        };
        match id {
            "c4.v0mod4" => {
                let t = v / 4;
                let master = self.fetch(id, IngredientKey::one_factorization(TypeSpec::groups(&[(2, t)])));
                let ing = self.fetch(id, IngredientKey::rgdd(Shape::C4, &[(2, 2)], 1));
                let host = self.replace(id, 2, rgdd(4, t, lambda), master, ing);
                self.fill(id, key, host, self.design(shape, 4, lambda))
            }
            "kite.v0mod4" => {
                let host = repeat(2, self.fetch(id, rgdd(4, v / 4, 1)));
                self.fill(id, key, host, self.design(shape, 4, lambda))
            }
            "k13.v4mod12" => {
                let master = self.fetch(id, IngredientKey::design(Shape::K4, v, 1));
                let mut step = self.replace(id, 1, key, master, self.design(shape, 4, lambda));
                step.notes.push("a count of 2 copies would give index 4".into());
                step
            }
            "k13.6k8" => {
                let host = self.fetch(id, rgdd(4, 2, 6));
                self.fill(id, key, host, self.design(shape, 4, 6))
            }
            "k13.6k12" => {
                let host = repeat(2, self.fetch(id, rgdd(4, 3, 3)));
                self.fill(id, key, host, self.design(shape, 4, 6))
            }
            "k13.6k24" => {
                let master = self.fetch(id, IngredientKey::one_factorization(TypeSpec::Order(6)));
                let host = self.replace(id, 4, rgdd(4, 6, 6), master, self.fetch(id, rgdd(4, 2, 6)));
                self.fill(id, key, host, self.design(shape, 4, 6))
            }
            "k13.6k36" => {
                let master = self.fetch(id, IngredientKey::design(Shape::K3, 9, 1));
                let ing = repeat(2, self.fetch(id, rgdd(4, 3, 3)));
                let host = self.replace(id, 4, rgdd(4, 9, 6), master, ing);
                self.fill(id, key, host, self.design(shape, 4, 6))
            }
            "k13.v0mod12" | "k13.v8mod24" => {
                let g = if id == "k13.v0mod12" { 12 } else { 8 };
                let master = self.fetch(id, IngredientKey::rgdd(Shape::K4, &[(g, v / g)], 1));
                let host = self.replace(id, 1, rgdd(g, v / g, 6), master, self.design(shape, 4, 2));
                self.fill(id, key, host, self.design(shape, g, 6))
            }
            "k13.v20mod24" => {
                let u = (v - 4) / 8;
                let master = self.fetch(id, IngredientKey::frame(Shape::K2, &[(2, u)], 1));
                let frame_key = IngredientKey::frame(shape, &[(8, u)], 6);
                let frame = self.replace(id, 4, frame_key, master, self.fetch(id, rgdd(4, 2, 6)));
                let host = repeat(2, self.fetch(id, rgdd(4, 3, 3)));
                let ird = self.node(
                    id,
                    Op::FillGroupsLeavingHole,
                    IngredientKey::ird(shape, 12, 4, 6),
                    vec![host, self.design(shape, 4, 6)],
                );
                self.node(
                    id,
                    Op::FrameFillWithHole { copies: 1 },
                    key,
                    vec![frame, ird, self.design(shape, 4, 6)],
                )
            }
            "k4e.5k24" => {
                let host = self.fetch(id, rgdd(4, 6, 5));
                self.fill(id, key, host, self.design(shape, 4, 5))
            }
            "k4e.5k36" => {
                let base = self.fetch(id, IngredientKey::design(shape, 36, 1));
                self.node(id, Op::Repeat { times: 5 }, key, vec![base])
            }
            "k4e.v4mod12" => {
                let master = self.fetch(id, IngredientKey::design(Shape::K4, v, 1));
                self.replace(id, 1, key, master, self.design(shape, 4, 5))
            }
            "k4e.v0mod12" | "k4e.v8mod24" => {
                let g = if id == "k4e.v0mod12" { 12 } else { 8 };
                let master = self.fetch(id, IngredientKey::rgdd(Shape::K4, &[(g, v / g)], 1));
                let host = self.replace(id, 1, rgdd(g, v / g, 5), master, self.design(shape, 4, 5));
                self.fill(id, key, host, self.design(shape, g, 5))
            }
            "k4e.v20mod120" => {
                let master = self.fetch(id, IngredientKey::rgdd(Shape::K4, &[(4, v / 20)], 1));
                let ing = self.fetch(id, rgdd(5, 4, 5));
                let host = self.replace(id, 5, rgdd(20, v / 20, 5), master, ing);
                self.fill(id, key, host, self.design(shape, 20, 5))
            }
            "k4e.v44mod120" => {
                let host = self.fetch(id, rgdd(4, v / 4, 5));
                self.fill(id, key, host, self.design(shape, 4, 5))
            }
            "k4e.v68mod120" => {
                let frame = self.fetch(id, IngredientKey::frame(shape, &[(20, (v - 8) / 20)], 1));
                let ird = self.fetch(id, IngredientKey::ird(shape, 28, 8, 5));
                self.node(
                    id,
                    Op::FrameFillWithHole { copies: 5 },
                    key,
                    vec![frame, ird, self.design(shape, 8, 5)],
                )
            }
            "k4e.v92mod120" => {
                let ing = self.fetch(id, rgdd(2, v / 2, 1));
                self.node(id, Op::OneFactor { order: v as u32 }, key, vec![ing])
            }
            other => unreachable!("route {other} has no builder"),
        }
    }
}

/// Plans `(shape, v, λ)`. Ingredients that are not available still appear
/// as leaves; see [`Recipe::missing`].
pub fn plan(shape: Shape, v: u64, lambda: u32, registry: &Registry) -> Result<Recipe, ConstructionError> {
    let verdict = spectrum_verdict(shape, v, lambda as u64).map_err(|e| ConstructionError::NotAdmissible {
        shape,
        v,
        lambda,
        reasons: vec![e.to_string()],
    })?;
    if verdict.status != Status::Admissible {
        return Err(ConstructionError::NotAdmissible {
            shape,
            v,
            lambda,
            reasons: verdict.violations().map(|c| c.description.clone()).collect(),
        });
    }
    let root = Planner { registry }.design(shape, v, lambda);
    Ok(Recipe {
        shape,
        order: v,
        lambda,
        root,
    })
}

/// Runs every step bottom-up. Each operation verifies its output; leaves
/// are verified by the registry. The result is checked against the key of
/// its step.
pub fn execute(recipe: &Recipe, registry: &mut Registry) -> Result<Document, ConstructionError> {
    let missing = recipe.missing();
    if !missing.is_empty() {
        return Err(ConstructionError::MissingIngredients(missing));
    }
    run(&recipe.root, registry)
}

fn run(step: &Step, registry: &mut Registry) -> Result<Document, ConstructionError> {
    let mut inputs = Vec::with_capacity(step.children.len());
    for child in &step.children {
        inputs.push(run(child, registry)?);
    }
    let wrong = |expected: &str| ConstructionError::WrongInput {
        step: step.route.clone(),
        expected: expected.to_string(),
    };
    let out = match &step.op {
        Op::Fetch { .. } => registry.fetch(&step.output)?,
        Op::Repeat { times } => repeat_classes(&inputs[0], *times),
        Op::WeightAndReplace { weight, copies } => weight_and_replace(&inputs[0], *weight, &inputs[1], *copies)?,
        Op::FillGroups | Op::FillGroupsLeavingHole => {
            let (Document::Grouped(host), Document::Design(filler)) = (&inputs[0], &inputs[1]) else {
                return Err(wrong("an RGDD and a design"));
            };
            let hole = matches!(step.op, Op::FillGroupsLeavingHole).then(|| host.groups.len() - 1);
            fill_groups(host, filler, hole)?
        }
        Op::FrameFillWithHole { copies } => {
            let (Document::Grouped(frame), Document::Grouped(ird), Document::Design(filler)) =
                (&inputs[0], &inputs[1], &inputs[2])
            else {
                return Err(wrong("a frame, an incomplete design and a design"));
            };
            Document::Design(frame_fill_with_hole(frame, ird, filler, *copies)?)
        }
        Op::OneFactor { order } => {
            let Document::Grouped(g) = &inputs[0] else {
                return Err(wrong("an RGDD of type 2^(v/2)"));
            };
            Document::Design(one_factor_construction(*order, g)?)
        }
    };
    let found = IngredientKey::of_document(&out).map_err(|e| ConstructionError::Catalog(Box::new(e)))?;
    if found != step.output {
        return Err(ConstructionError::IndexMismatch(format!(
            "step {} produced {found}, expected {}",
            step.route, step.output
        )));
    }
    Ok(out)
}
