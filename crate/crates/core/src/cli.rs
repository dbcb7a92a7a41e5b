//! The `rdk` command line. Machine output is JSON on stdout (TSV for
//! `spectrum`); diagnostics go to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::admissibility::spectrum_table;
use crate::catalog::{verify_document, CatalogError, IngredientKey, Registry, TypeSpec};
use crate::constructions::{execute, plan, ConstructionError};
use crate::model::{DesignFile, Document, GroupedKind, Shape};
use crate::search::{search, Budget, SearchOutcome, SearchProblem};

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    /// Success, or a valid certificate.
    Success = 0,
    /// Invalid, nonexistent, not admissible, or no answer within budget.
    Negative = 1,
    /// Usage or I/O error, malformed input.
    Usage = 2,
    /// A required ingredient is not available.
    MissingIngredient = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Parser, Debug)]
#[command(name = "rdk", version, about = "Resolvable G-designs for subgraphs of K4")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Plan and build a resolvable design, then verify it.
    Generate {
        shape: Shape,
        v: u64,
        lambda: u32,
        /// Write the design here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the recipe and missing ingredients without building.
        #[arg(long)]
        dry_run: bool,
        /// Include the recipe in the output.
        #[arg(long)]
        trace: bool,
    },
    /// Check a design file.
    Verify {
        file: PathBuf,
        /// Require the file to hold this kind of object.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
    },
    /// Tabulate admissibility verdicts.
    Spectrum {
        shape: Shape,
        #[arg(long)]
        v_max: u64,
        #[arg(long)]
        lambda_max: u64,
    },
    /// Backtracking search for a small design or RGDD.
    Search(SearchArgs),
    /// Inspect or extend the ingredient library.
    Ingredients {
        #[command(subcommand)]
        action: IngredientsAction,
    },
}

#[derive(Args, Debug)]
struct SearchArgs {
    shape: Shape,
    /// Order of an ungrouped design.
    #[arg(long, conflicts_with = "type_spec", required_unless_present = "type_spec")]
    v: Option<usize>,
    /// Group type such as 4^3.
    #[arg(long = "type")]
    type_spec: Option<TypeSpec>,
    #[arg(long)]
    lambda: u32,
    #[arg(long)]
    budget_nodes: Option<u64>,
    #[arg(long)]
    budget_secs: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum IngredientsAction {
    /// Every known key with its source.
    List,
    /// Verify a file and register it; copies it into $RDK_INGREDIENTS when set.
    Import { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Design,
    Rgdd,
    Frame,
    Ird,
}

fn kind_name(doc: &Document) -> &'static str {
    match doc {
        Document::Design(_) => "DESIGN",
        Document::Grouped(g) => match g.kind {
            GroupedKind::Gdd => "GDD",
            GroupedKind::Rgdd => "RGDD",
            GroupedKind::Frame => "FRAME",
            GroupedKind::Ird => "IRD",
        },
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn json(&mut self, value: &serde_json::Value) {
        let _ = writeln!(self.out, "{}", serde_json::to_string_pretty(value).expect("JSON values serialize"));
    }

    fn note(&mut self, message: impl std::fmt::Display) {
        let _ = writeln!(self.err, "rdk: {message}");
    }
}

/// Runs the process with its real arguments and streams.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock()).code()
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                ExitStatus::Usage
            } else {
                let _ = write!(out, "{text}");
                ExitStatus::Success
            };
        }
    };
    let mut io = Io { out, err };
    match cli.command {
        Command::Generate {
            shape,
            v,
            lambda,
            out,
            dry_run,
            trace,
        } => generate(&mut io, shape, v, lambda, out, dry_run, trace),
        Command::Verify { file, kind } => verify(&mut io, file, kind),
        Command::Spectrum {
            shape,
            v_max,
            lambda_max,
        } => {
            let _ = write!(io.out, "{}", spectrum_table(shape, v_max, lambda_max));
            ExitStatus::Success
        }
        Command::Search(args) => run_search(&mut io, args),
        Command::Ingredients { action } => ingredients(&mut io, action),
    }
}

fn catalog_status(e: &CatalogError) -> ExitStatus {
    match e {
        CatalogError::MissingIngredient { .. } | CatalogError::SearchBudgetExceeded { .. } => {
            ExitStatus::MissingIngredient
        }
        CatalogError::Io { .. } | CatalogError::Model(_) | CatalogError::NoDirectory => ExitStatus::Usage,
        CatalogError::Construction { source, .. } => construction_status(source),
        _ => ExitStatus::Negative,
    }
}

fn construction_status(e: &ConstructionError) -> ExitStatus {
    match e {
        ConstructionError::MissingIngredients(_) => ExitStatus::MissingIngredient,
        ConstructionError::Catalog(inner) => catalog_status(inner),
        _ => ExitStatus::Negative,
    }
}

fn generate(
    io: &mut Io<'_>,
    shape: Shape,
    v: u64,
    lambda: u32,
    out: Option<PathBuf>,
    dry_run: bool,
    trace: bool,
) -> ExitStatus {
    let mut registry = Registry::from_env();
    let recipe = match plan(shape, v, lambda, &registry) {
        Ok(r) => r,
        Err(e) => {
            io.note(&e);
            let reasons = match &e {
                ConstructionError::NotAdmissible { reasons, .. } => reasons.clone(),
                other => vec![other.to_string()],
            };
            io.json(&json!({ "status": "NOT_ADMISSIBLE", "reasons": reasons }));
            return construction_status(&e);
        }
    };
    let missing = recipe.missing();
    let missing_json: Vec<serde_json::Value> = missing
        .iter()
        .map(|k| json!({ "key": k, "file": k.file_name() }))
        .collect();
    if dry_run || !missing.is_empty() {
        for k in &missing {
            io.note(format_args!("missing {k}: supply {}", k.file_name()));
        }
        let mut value = json!({
            "status": if missing.is_empty() { "READY" } else { "MISSING_INGREDIENTS" },
            "missing": missing_json,
        });
        if dry_run || trace {
            value["recipe"] = serde_json::to_value(&recipe).expect("recipes serialize");
        }
        io.json(&value);
        return if missing.is_empty() {
            ExitStatus::Success
        } else {
            ExitStatus::MissingIngredient
        };
    }
    let doc = match execute(&recipe, &mut registry) {
        Ok(doc) => doc,
        Err(e) => {
            io.note(&e);
            io.json(&json!({ "status": "FAILED", "error": e.to_string() }));
            return construction_status(&e);
        }
    };
    let text = doc.to_json();
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, format!("{text}\n")) {
                io.note(format_args!("cannot write {}: {e}", path.display()));
                return ExitStatus::Usage;
            }
            io.note(format_args!(
                "wrote {} ({} classes)",
                path.display(),
                doc.design().classes.len()
            ));
            if trace {
                io.json(&json!({ "recipe": recipe }));
            }
        }
        None if trace => {
            let design: serde_json::Value = serde_json::from_str(&text).expect("documents are JSON");
            io.json(&json!({ "recipe": recipe, "design": design }));
        }
        None => {
            let _ = writeln!(io.out, "{text}");
        }
    }
    ExitStatus::Success
}

fn verify(io: &mut Io<'_>, file: PathBuf, kind: Option<KindArg>) -> ExitStatus {
    let text = match std::fs::read_to_string(&file) {
        Ok(t) => t,
        Err(e) => {
            io.note(format_args!("cannot read {}: {e}", file.display()));
            return ExitStatus::Usage;
        }
    };
    let doc = match DesignFile::parse(&text) {
        Ok(d) => d,
        Err(e) => {
            io.note(format_args!("{}: {e}", file.display()));
            io.json(&json!({ "valid": false, "error": e.to_string() }));
            return ExitStatus::Usage;
        }
    };
    let report = verify_document(&doc);
    let found = kind_name(&doc);
    let kind_ok = kind.is_none_or(|k| {
        let wanted = match k {
            KindArg::Design => "DESIGN",
            KindArg::Rgdd => "RGDD",
            KindArg::Frame => "FRAME",
            KindArg::Ird => "IRD",
        };
        wanted == found
    });
    let mut value = serde_json::to_value(&report).expect("reports serialize");
    value["kind"] = json!(found);
    if !kind_ok {
        value["valid"] = json!(false);
        io.note(format_args!("{} holds a {found}", file.display()));
    }
    io.json(&value);
    if report.valid && kind_ok {
        ExitStatus::Success
    } else {
        if !report.valid {
            io.note(report.summary());
        }
        ExitStatus::Negative
    }
}

fn run_search(io: &mut Io<'_>, args: SearchArgs) -> ExitStatus {
    let mut problem = match (&args.v, &args.type_spec) {
        (Some(v), _) => SearchProblem::design(args.shape, *v, args.lambda),
        (None, Some(TypeSpec::Order(v))) => SearchProblem::design(args.shape, *v as usize, args.lambda),
        (None, Some(TypeSpec::Groups(parts))) => {
            let parts: Vec<(usize, usize)> = parts.iter().map(|&(g, u)| (g as usize, u as usize)).collect();
            SearchProblem::rgdd(args.shape, &parts, args.lambda)
        }
        (None, None) => unreachable!("clap requires --v or --type"),
    };
    if problem.order > 64 {
        io.note("search handles at most 64 points");
        return ExitStatus::Usage;
    }
    let mut budget = Budget::default();
    if let Some(n) = args.budget_nodes {
        budget.nodes = n;
    }
    if let Some(s) = args.budget_secs {
        budget.wall = Duration::from_secs(s);
    }
    problem.budget = budget;
    let outcome = search(&problem);
    io.json(&outcome.to_json());
    match outcome {
        SearchOutcome::Found(_) => ExitStatus::Success,
        SearchOutcome::ExhaustedNonexistent => ExitStatus::Negative,
        SearchOutcome::BudgetExceeded { nodes } => {
            io.note(format_args!("budget exhausted after {nodes} nodes; existence undecided"));
            ExitStatus::Negative
        }
    }
}

fn ingredients(io: &mut Io<'_>, action: IngredientsAction) -> ExitStatus {
    let mut registry = Registry::from_env();
    match action {
        IngredientsAction::List => {
            let rows: Vec<serde_json::Value> = registry
                .listing()
                .into_iter()
                .map(|(key, source)| {
                    json!({
                        "key": key,
                        "source": source.to_string(),
                        "available": registry.is_available(&key),
                        "file": key.file_name(),
                    })
                })
                .collect();
            io.json(&json!(rows));
            ExitStatus::Success
        }
        IngredientsAction::Import { file } => {
            let result: Result<(IngredientKey, Option<PathBuf>), CatalogError> = if registry.directory().is_some() {
                registry.import_into_directory(&file).map(|(k, p)| (k, Some(p)))
            } else {
                registry.import_ingredient(&file).map(|k| (k, None))
            };
            match result {
                Ok((key, stored)) => {
                    if stored.is_none() {
                        io.note("verified; set RDK_INGREDIENTS to keep a copy");
                    }
                    io.json(&json!({
                        "status": "IMPORTED",
                        "key": key,
                        "stored": stored.map(|p| p.display().to_string()),
                    }));
                    ExitStatus::Success
                }
                Err(e) => {
                    io.note(&e);
                    io.json(&json!({ "status": "REJECTED", "error": e.to_string() }));
                    catalog_status(&e)
                }
            }
        }
    }
}
