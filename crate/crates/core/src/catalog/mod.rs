//! Ingredient library: built-in data files, generated classical objects,
//! search-backed entries, and externally supplied files.
//!
//! A key resolves to the first available source in this order: imported
//! files, built-in data or generators, search, and finally an external file
//! named [`IngredientKey::file_name`] inside the directory given by
//! `RDK_INGREDIENTS`. Every object is verified before it is handed out.

mod builtin;
mod key;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::{self, ConstructionError};
use crate::model::{DesignFile, Document, ModelError, Shape};
use crate::search::{search_cyclic, search_rgdd, Budget, CyclicProblem, SearchOutcome};
use crate::verifier::{verify_design, verify_grouped, VerificationReport};

pub use builtin::{cocktail_party, matching_frame, round_robin};
pub use key::{IngredientKey, IngredientKind, TypeSpec};

pub const INGREDIENT_DIR_VAR: &str = "RDK_INGREDIENTS";

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("missing ingredient {key}: supply {file} in ${INGREDIENT_DIR_VAR}")]
    MissingIngredient { key: IngredientKey, file: String },
    #[error("search for {key} stopped after {nodes} nodes without a result")]
    SearchBudgetExceeded { key: IngredientKey, nodes: u64 },
    #[error("search for {key} found no design with the prescribed structure")]
    SearchExhausted { key: IngredientKey },
    #[error("ingredient rejected: {}", report.summary())]
    RejectedIngredient { report: Box<VerificationReport> },
    #[error("{key} is already registered with different contents ({path})")]
    VersionConflict { key: IngredientKey, path: PathBuf },
    #[error("not an ingredient: {0}")]
    NotAnIngredient(String),
    #[error("built-in data file {id} is broken: {message}")]
    BadData { id: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no ingredient directory; set ${INGREDIENT_DIR_VAR}")]
    NoDirectory,
    #[error("building {key}: {source}")]
    Construction {
        key: IngredientKey,
        #[source]
        source: Box<ConstructionError>,
    },
}

/// Where an ingredient comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IngredientSource {
    Builtin { id: String },
    Searched { method: String },
    External { file: String },
    Imported { origin: String },
}

impl fmt::Display for IngredientSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngredientSource::Builtin { id } => write!(f, "BUILTIN({id})"),
            IngredientSource::Searched { method } => write!(f, "SEARCHED({method})"),
            IngredientSource::External { file } => write!(f, "EXTERNAL({file})"),
            IngredientSource::Imported { origin } => write!(f, "IMPORTED({origin})"),
        }
    }
}

/// Verification of either document variant.
pub fn verify_document(doc: &Document) -> VerificationReport {
    match doc {
        Document::Design(d) => verify_design(d),
        Document::Grouped(g) => verify_grouped(g),
    }
}

fn data_entries() -> &'static BTreeMap<IngredientKey, (&'static str, Document)> {
    static DATA: OnceLock<BTreeMap<IngredientKey, (&'static str, Document)>> = OnceLock::new();
    DATA.get_or_init(|| {
        builtin::DATA_FILES
            .iter()
            .map(|&(id, text)| {
                let doc = builtin::load_data(id, text).unwrap_or_else(|e| panic!("{e}"));
                let key = IngredientKey::of_document(&doc).unwrap_or_else(|e| panic!("{id}: {e}"));
                (key, (id, doc))
            })
            .collect()
    })
}

/// Keys with a shipped data file, in key order.
pub fn data_keys() -> Vec<IngredientKey> {
    data_entries().keys().cloned().collect()
}

/// Keys answered by the search module, with the method used.
fn searched_method(key: &IngredientKey) -> Option<String> {
    if key.kind != IngredientKind::Rgdd || key.hole.is_some() {
        return None;
    }
    let TypeSpec::Groups(parts) = &key.type_spec else { return None };
    match (key.shape, parts.as_slice(), key.lambda) {
        (Shape::Kite, &[(4, 3)], 1) => Some("backtracking".into()),
        (Shape::Kite, &[(4, u)], 1) if (4..=8).contains(&u) => Some("two-layer cyclic".into()),
        (Shape::K4e, &[(4, 6)], 5) => Some("cyclic over Z20 with a fixed group".into()),
        _ => None,
    }
}

struct Imported {
    bytes: String,
    origin: String,
    doc: Document,
}

/// Resolves, builds and caches ingredients.
pub struct Registry {
    dir: Option<PathBuf>,
    imported: BTreeMap<IngredientKey, Imported>,
    cache: BTreeMap<IngredientKey, Document>,
    budget: Budget,
}

impl Default for Registry {
    fn default() -> Self {
        Registry::new(None)
    }
}

impl Registry {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Registry {
            dir,
            imported: BTreeMap::new(),
            cache: BTreeMap::new(),
            budget: Budget::default(),
        }
    }

    /// Uses `RDK_INGREDIENTS` when set.
    pub fn from_env() -> Self {
        Registry::new(std::env::var_os(INGREDIENT_DIR_VAR).map(PathBuf::from))
    }

    pub fn with_search_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn directory(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn external_path(&self, key: &IngredientKey) -> Option<PathBuf> {
        let path = self.dir.as_ref()?.join(key.file_name());
        path.is_file().then_some(path)
    }

    /// The source `fetch` would use, without building anything.
    pub fn source(&self, key: &IngredientKey) -> IngredientSource {
        if let Some(imp) = self.imported.get(key) {
            return IngredientSource::Imported {
                origin: imp.origin.clone(),
            };
        }
        if let Some(id) = self.builtin_id(key) {
            return IngredientSource::Builtin { id };
        }
        if let Some(method) = searched_method(key) {
            return IngredientSource::Searched { method };
        }
        IngredientSource::External { file: key.file_name() }
    }

    fn builtin_id(&self, key: &IngredientKey) -> Option<String> {
        if let Some((id, _)) = data_entries().get(key) {
            return Some(format!("data:{id}"));
        }
        if let Some((id, _)) = builtin::generator(key) {
            return Some(id);
        }
        if let Some((base, times)) = self.repeat_base(key) {
            return Some(format!("{} repeated {times} times", self.builtin_id(&base)?));
        }
        if key.kind == IngredientKind::ResolvableDesign {
            if let TypeSpec::Order(v) = key.type_spec {
                return constructions::route_for(key.shape, v, key.lambda).map(|r| format!("recipe:{r}"));
            }
        }
        None
    }

    /// A built-in grouped ingredient at a smaller index dividing the
    /// requested one.
    fn repeat_base(&self, key: &IngredientKey) -> Option<(IngredientKey, u32)> {
        if !matches!(key.kind, IngredientKind::Rgdd | IngredientKind::Frame | IngredientKind::Ird) {
            return None;
        }
        (1..key.lambda).rev().filter(|l| key.lambda % l == 0).find_map(|l| {
            let base = IngredientKey {
                lambda: l,
                ..key.clone()
            };
            let known = data_entries().contains_key(&base) || builtin::generator(&base).is_some();
            known.then_some((base, key.lambda / l))
        })
    }

    /// True when `fetch` can succeed without a user-supplied file; search
    /// entries count as available.
    pub fn is_available(&self, key: &IngredientKey) -> bool {
        match self.source(key) {
            IngredientSource::External { .. } => self.external_path(key).is_some(),
            _ => true,
        }
    }

    /// Returns a verified object for `key`.
    pub fn fetch(&mut self, key: &IngredientKey) -> Result<Document, CatalogError> {
        if let Some(doc) = self.cache.get(key) {
            return Ok(doc.clone());
        }
        let doc = self.build(key)?;
        let report = verify_document(&doc);
        if !report.valid {
            return Err(CatalogError::RejectedIngredient {
                report: Box::new(report),
            });
        }
        self.cache.insert(key.clone(), doc.clone());
        Ok(doc)
    }

    fn build(&mut self, key: &IngredientKey) -> Result<Document, CatalogError> {
        if let Some(imp) = self.imported.get(key) {
            return Ok(imp.doc.clone());
        }
        if let Some((_, doc)) = data_entries().get(key) {
            return Ok(doc.clone());
        }
        if let Some((_, make)) = builtin::generator(key) {
            return Ok(make());
        }
        if let Some((base, times)) = self.repeat_base(key) {
            return match self.fetch(&base)? {
                Document::Grouped(g) => Ok(Document::Grouped(g.repeated(times))),
                Document::Design(d) => Ok(Document::Design(crate::model::repeat(&d, times))),
            };
        }
        if let Some(method) = searched_method(key) {
            match self.run_search(key, &method) {
                SearchOutcome::Found(doc) => return Ok(*doc),
                outcome => {
                    if let Some(path) = self.external_path(key) {
                        return self.load_external(key, &path);
                    }
                    return Err(match outcome {
                        SearchOutcome::BudgetExceeded { nodes } => CatalogError::SearchBudgetExceeded {
                            key: key.clone(),
                            nodes,
                        },
                        _ => CatalogError::SearchExhausted { key: key.clone() },
                    });
                }
            }
        }
        if key.kind == IngredientKind::ResolvableDesign {
            if let TypeSpec::Order(v) = key.type_spec {
                if constructions::route_for(key.shape, v, key.lambda).is_some() {
                    let recipe = constructions::plan(key.shape, v, key.lambda, self).map_err(|e| {
                        CatalogError::Construction {
                            key: key.clone(),
                            source: Box::new(e),
                        }
                    })?;
                    return constructions::execute(&recipe, self).map_err(|e| match e {
                        ConstructionError::Catalog(inner) => *inner,
                        e => CatalogError::Construction {
                            key: key.clone(),
                            source: Box::new(e),
                        },
                    });
                }
            }
        }
        match self.external_path(key) {
            Some(path) => self.load_external(key, &path),
            None => Err(CatalogError::MissingIngredient {
                key: key.clone(),
                file: key.file_name(),
            }),
        }
    }

    fn run_search(&self, key: &IngredientKey, method: &str) -> SearchOutcome {
        let TypeSpec::Groups(parts) = &key.type_spec else { unreachable!() };
        let (g, u) = parts[0];
        match method {
            "backtracking" => search_rgdd(key.shape, &[(g as usize, u as usize)], key.lambda, self.budget),
            "two-layer cyclic" => search_cyclic(
                &CyclicProblem::two_layer_groups_of_four(key.shape, u as usize, key.lambda, 1).with_budget(self.budget),
            ),
            _ => search_cyclic(
                &CyclicProblem::residues_plus_fixed_group(key.shape, u as usize, key.lambda, 2).with_budget(self.budget),
            ),
        }
    }

    fn load_external(&mut self, key: &IngredientKey, path: &Path) -> Result<Document, CatalogError> {
        let text = std::fs::read_to_string(path).map_err(|e| CatalogError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let doc = DesignFile::parse(&text)?;
        let found = IngredientKey::of_document(&doc)?;
        if &found != key {
            return Err(CatalogError::NotAnIngredient(format!(
                "{} holds {found}, expected {key}",
                path.display()
            )));
        }
        Ok(doc)
    }

    /// Parses, verifies and registers a design file; returns its key.
    ///
    /// Importing the same key again is a no-op when the bytes are
    /// identical and a [`CatalogError::VersionConflict`] otherwise.
    pub fn import_text(&mut self, text: &str, origin: &str) -> Result<IngredientKey, CatalogError> {
        let doc = DesignFile::parse(text)?;
        let key = IngredientKey::of_document(&doc)?;
        let report = verify_document(&doc);
        if !report.valid {
            return Err(CatalogError::RejectedIngredient {
                report: Box::new(report),
            });
        }
        if let Some(existing) = self.imported.get(&key) {
            if existing.bytes == text {
                return Ok(key);
            }
            return Err(CatalogError::VersionConflict {
                key,
                path: PathBuf::from(&existing.origin),
            });
        }
        self.cache.remove(&key);
        self.imported.insert(
            key.clone(),
            Imported {
                bytes: text.to_string(),
                origin: origin.to_string(),
                doc,
            },
        );
        Ok(key)
    }

    pub fn import_ingredient(&mut self, path: &Path) -> Result<IngredientKey, CatalogError> {
        let text = std::fs::read_to_string(path).map_err(|e| CatalogError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        self.import_text(&text, &path.display().to_string())
    }

    /// Imports `path` and copies it into the ingredient directory under its
    /// canonical name. Returns the key and the stored path.
    pub fn import_into_directory(&mut self, path: &Path) -> Result<(IngredientKey, PathBuf), CatalogError> {
        let dir = self.dir.clone().ok_or(CatalogError::NoDirectory)?;
        let text = std::fs::read_to_string(path).map_err(|e| CatalogError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let key = self.import_text(&text, &path.display().to_string())?;
        let target = dir.join(key.file_name());
        if target.is_file() {
            let existing = std::fs::read_to_string(&target).map_err(|e| CatalogError::Io {
                path: target.clone(),
                message: e.to_string(),
            })?;
            if existing == text {
                return Ok((key, target));
            }
            self.imported.remove(&key);
            return Err(CatalogError::VersionConflict { key, path: target });
        }
        std::fs::write(&target, &text).map_err(|e| CatalogError::Io {
            path: target.clone(),
            message: e.to_string(),
        })?;
        Ok((key, target))
    }

    /// Built-in keys plus whatever the ingredient directory holds.
    pub fn listing(&self) -> Vec<(IngredientKey, IngredientSource)> {
        let mut keys: Vec<IngredientKey> = data_keys();
        keys.extend(showcase_keys());
        keys.extend(self.imported.keys().cloned());
        if let Some(dir) = &self.dir {
            if let Ok(entries) = std::fs::read_dir(dir) {
                let mut files: Vec<PathBuf> = entries.filter_map(|e| e.ok()).map(|e| e.path()).collect();
                files.sort();
                for path in files {
                    if path.extension().is_some_and(|e| e == "json") {
                        if let Ok(text) = std::fs::read_to_string(&path) {
                            if let Ok(doc) = DesignFile::parse(&text) {
                                if let Ok(key) = IngredientKey::of_document(&doc) {
                                    keys.push(key);
                                }
                            }
                        }
                    }
                }
            }
        }
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|k| {
                let source = self.source(&k);
                (k, source)
            })
            .collect()
    }
}

/// Representative generated and searched keys, for listings and sweeps.
pub fn showcase_keys() -> Vec<IngredientKey> {
    vec![
        IngredientKey::one_factorization(TypeSpec::Order(6)),
        IngredientKey::one_factorization(TypeSpec::groups(&[(2, 4)])),
        IngredientKey::design(Shape::K4, 4, 1),
        IngredientKey::rgdd(Shape::C4, &[(2, 2)], 1),
        IngredientKey::frame(Shape::K2, &[(2, 5)], 1),
        IngredientKey::rgdd(Shape::K13, &[(4, 3)], 6),
        IngredientKey::rgdd(Shape::Kite, &[(4, 3)], 1),
        IngredientKey::rgdd(Shape::Kite, &[(4, 4)], 1),
        IngredientKey::rgdd(Shape::K4e, &[(4, 6)], 5),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_data_file_loads_and_verifies() {
        let mut reg = Registry::default();
        for key in data_keys() {
            let doc = reg.fetch(&key).unwrap();
            assert!(verify_document(&doc).valid, "{key}");
        }
        assert_eq!(data_keys().len(), builtin::DATA_FILES.len());
    }

    #[test]
    fn sources() {
        let reg = Registry::default();
        assert_eq!(
            reg.source(&IngredientKey::rgdd(Shape::K13, &[(4, 2)], 6)),
            IngredientSource::Builtin {
                id: "data:k13_rgdd_4_2_6".into()
            }
        );
        assert_eq!(
            reg.source(&IngredientKey::rgdd(Shape::K4, &[(12, 4)], 1)),
            IngredientSource::External {
                file: "rgdd_K4_12^4_1.json".into()
            }
        );
        assert!(matches!(
            reg.source(&IngredientKey::rgdd(Shape::Kite, &[(4, 5)], 1)),
            IngredientSource::Searched { .. }
        ));
        assert_eq!(
            reg.source(&IngredientKey::rgdd(Shape::K13, &[(4, 3)], 6)),
            IngredientSource::Builtin {
                id: "data:k13_rgdd_4_3_3 repeated 2 times".into()
            }
        );
    }

    #[test]
    fn missing_external() {
        let mut reg = Registry::default();
        let key = IngredientKey::rgdd(Shape::K4, &[(12, 4)], 1);
        match reg.fetch(&key) {
            Err(CatalogError::MissingIngredient { file, .. }) => assert_eq!(file, "rgdd_K4_12^4_1.json"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fetch_is_deterministic() {
        let key = IngredientKey::rgdd(Shape::Kite, &[(4, 4)], 1);
        let a = Registry::default().fetch(&key).unwrap();
        let b = Registry::default().fetch(&key).unwrap();
        assert_eq!(a, b);
    }
}
