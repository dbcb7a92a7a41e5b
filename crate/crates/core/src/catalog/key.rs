use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::model::{Document, GroupedKind, Shape};

use super::CatalogError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IngredientKind {
    ResolvableDesign,
    Rgdd,
    Frame,
    Ird,
    OneFactorization,
    Packing,
    Covering,
}

impl IngredientKind {
    pub const ALL: [IngredientKind; 7] = [
        IngredientKind::ResolvableDesign,
        IngredientKind::Rgdd,
        IngredientKind::Frame,
        IngredientKind::Ird,
        IngredientKind::OneFactorization,
        IngredientKind::Packing,
        IngredientKind::Covering,
    ];

    /// Lower-case form used in file names.
    pub fn slug(self) -> &'static str {
        match self {
            IngredientKind::ResolvableDesign => "resolvable_design",
            IngredientKind::Rgdd => "rgdd",
            IngredientKind::Frame => "frame",
            IngredientKind::Ird => "ird",
            IngredientKind::OneFactorization => "one_factorization",
            IngredientKind::Packing => "packing",
            IngredientKind::Covering => "covering",
        }
    }
}

impl fmt::Display for IngredientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.slug().to_uppercase())
    }
}

/// Either a plain order or a multiset of group sizes `(g, u)` meaning `g^u`.
///
/// Text form: `20` for an order, `4^3` or `2^1.4^2` for group types.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeSpec {
    Order(u64),
    Groups(Vec<(u64, u64)>),
}

impl TypeSpec {
    /// Sorts group sizes and folds type `1^v` into the order `v`.
    pub fn groups(parts: &[(u64, u64)]) -> TypeSpec {
        let mut merged: std::collections::BTreeMap<u64, u64> = Default::default();
        for &(g, u) in parts {
            if u > 0 {
                *merged.entry(g).or_default() += u;
            }
        }
        if merged.len() == 1 && merged.contains_key(&1) {
            return TypeSpec::Order(merged[&1]);
        }
        TypeSpec::Groups(merged.into_iter().collect())
    }

    pub fn order(&self) -> u64 {
        match self {
            TypeSpec::Order(v) => *v,
            TypeSpec::Groups(parts) => parts.iter().map(|(g, u)| g * u).sum(),
        }
    }
}

impl fmt::Display for TypeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeSpec::Order(v) => write!(f, "{v}"),
            TypeSpec::Groups(parts) => {
                let text: Vec<String> = parts.iter().map(|(g, u)| format!("{g}^{u}")).collect();
                f.write_str(&text.join("."))
            }
        }
    }
}

impl FromStr for TypeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("invalid type '{s}' (expected e.g. 20 or 4^3)");
        if !s.contains('^') {
            return s.parse().map(TypeSpec::Order).map_err(|_| bad());
        }
        let parts = s
            .split(['.', ' '])
            .filter(|p| !p.is_empty())
            .map(|part| {
                let (g, u) = part.split_once('^').ok_or_else(bad)?;
                Ok((g.parse().map_err(|_| bad())?, u.parse().map_err(|_| bad())?))
            })
            .collect::<Result<Vec<(u64, u64)>, String>>()?;
        if parts.iter().any(|&(g, u)| g == 0 || u == 0) {
            return Err(bad());
        }
        Ok(TypeSpec::groups(&parts))
    }
}

impl Serialize for TypeSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TypeSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parameters that identify an ingredient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IngredientKey {
    pub kind: IngredientKind,
    pub shape: Shape,
    #[serde(rename = "type")]
    pub type_spec: TypeSpec,
    pub lambda: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hole: Option<u64>,
}

impl IngredientKey {
    pub fn design(shape: Shape, v: u64, lambda: u32) -> Self {
        IngredientKey {
            kind: IngredientKind::ResolvableDesign,
            shape,
            type_spec: TypeSpec::Order(v),
            lambda,
            hole: None,
        }
    }

    pub fn rgdd(shape: Shape, parts: &[(u64, u64)], lambda: u32) -> Self {
        IngredientKey {
            kind: IngredientKind::Rgdd,
            shape,
            type_spec: TypeSpec::groups(parts),
            lambda,
            hole: None,
        }
    }

    pub fn frame(shape: Shape, parts: &[(u64, u64)], lambda: u32) -> Self {
        IngredientKey {
            kind: IngredientKind::Frame,
            ..IngredientKey::rgdd(shape, parts, lambda)
        }
    }

    /// Incomplete design on `order` points (hole included).
    pub fn ird(shape: Shape, order: u64, hole: u64, lambda: u32) -> Self {
        IngredientKey {
            kind: IngredientKind::Ird,
            shape,
            type_spec: TypeSpec::Order(order),
            lambda,
            hole: Some(hole),
        }
    }

    /// 1-factorization of `K_v`, or of the cocktail-party graph when
    /// `type_spec` is `2^t`.
    pub fn one_factorization(type_spec: TypeSpec) -> Self {
        IngredientKey {
            kind: IngredientKind::OneFactorization,
            shape: Shape::K2,
            type_spec,
            lambda: 1,
            hole: None,
        }
    }

    /// Expected file name inside the ingredient directory.
    pub fn file_name(&self) -> String {
        let ty = match self.hole {
            Some(h) => format!("{}h{h}", self.type_spec),
            None => self.type_spec.to_string(),
        };
        format!("{}_{}_{}_{}.json", self.kind.slug(), self.shape.name(), ty, self.lambda)
    }

    /// The key describing an exchange document's parameters.
    pub fn of_document(doc: &Document) -> Result<Self, CatalogError> {
        let d = doc.design();
        let v = d.order() as u64;
        let key = match doc {
            Document::Design(_) if d.shape == Shape::K2 => {
                IngredientKey::one_factorization(TypeSpec::Order(v))
            }
            Document::Design(_) => IngredientKey::design(d.shape, v, d.lambda),
            Document::Grouped(g) => {
                let parts: Vec<(u64, u64)> = g.type_vector().iter().map(|&(a, b)| (a as u64, b as u64)).collect();
                match g.kind {
                    GroupedKind::Rgdd if d.shape == Shape::K2 && d.lambda == 1 => {
                        IngredientKey::one_factorization(TypeSpec::groups(&parts))
                    }
                    GroupedKind::Rgdd => IngredientKey::rgdd(d.shape, &parts, d.lambda),
                    GroupedKind::Frame => IngredientKey::frame(d.shape, &parts, d.lambda),
                    GroupedKind::Ird => {
                        let h = g.hole.as_ref().map_or(0, |h| h.len() as u64);
                        IngredientKey::ird(d.shape, v, h, d.lambda)
                    }
                    GroupedKind::Gdd => {
                        return Err(CatalogError::NotAnIngredient(
                            "non-resolvable GDDs are not catalog ingredients".into(),
                        ))
                    }
                }
            }
        };
        Ok(key)
    }
}

impl fmt::Display for IngredientKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} index {}", self.kind, self.shape, self.type_spec, self.lambda)?;
        if let Some(h) = self.hole {
            write!(f, " hole {h}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_names() {
        assert_eq!(
            IngredientKey::rgdd(Shape::K4e, &[(4, 41)], 5).file_name(),
            "rgdd_K4E_4^41_5.json"
        );
        assert_eq!(
            IngredientKey::ird(Shape::K4e, 28, 8, 5).file_name(),
            "ird_K4E_28h8_5.json"
        );
        assert_eq!(
            IngredientKey::design(Shape::K4e, 36, 1).file_name(),
            "resolvable_design_K4E_36_1.json"
        );
    }

    #[test]
    fn unit_groups_fold_into_order() {
        assert_eq!(TypeSpec::groups(&[(1, 6)]), TypeSpec::Order(6));
        assert_eq!("1^6".parse::<TypeSpec>().unwrap(), TypeSpec::Order(6));
    }

    #[test]
    fn type_text_round_trip() {
        for text in ["20", "4^3", "2^1.4^2"] {
            let t: TypeSpec = text.parse().unwrap();
            assert_eq!(t.to_string(), text);
        }
        assert!("4^0".parse::<TypeSpec>().is_err());
        assert!("x^2".parse::<TypeSpec>().is_err());
    }

    #[test]
    fn key_serializes_compactly() {
        let key = IngredientKey::rgdd(Shape::K13, &[(4, 2)], 6);
        let json = serde_json::to_string(&key).unwrap();
        assert_eq!(json, r#"{"kind":"RGDD","shape":"K13","type":"4^2","lambda":6}"#);
        assert_eq!(serde_json::from_str::<IngredientKey>(&json).unwrap(), key);
    }
}
