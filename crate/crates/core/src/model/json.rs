//! The JSON design-exchange format.
//!
//! ```json
//! { "shape": "K4E", "lambda": 5, "points": ["0", "1", "inf1"],
//!   "groups": [["0", "5"]], "hole": ["inf1"],
//!   "classes": [ { "missing": [], "blocks": [["1", "2", "0", "3"]] } ] }
//! ```
//!
//! `groups` and `hole` are optional. Block arrays hold the ordered tuple in
//! notation order.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Block, GroupedDesign, GroupedKind, ModelError, ParallelClass, Point, ResolvableDesign, Shape};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFile {
    pub shape: Shape,
    pub lambda: u32,
    pub points: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<Vec<Point>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hole: Option<Vec<Point>>,
    pub classes: Vec<ClassFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassFile {
    #[serde(default)]
    pub missing: Vec<Point>,
    pub blocks: Vec<Vec<Point>>,
}

/// A parsed exchange document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Design(ResolvableDesign),
    Grouped(GroupedDesign),
}

impl Document {
    pub fn design(&self) -> &ResolvableDesign {
        match self {
            Document::Design(d) => d,
            Document::Grouped(g) => &g.design,
        }
    }

    pub fn to_json(&self) -> String {
        let file = match self {
            Document::Design(d) => DesignFile::from_design(d),
            Document::Grouped(g) => DesignFile::from_grouped(g),
        };
        file.to_json()
    }
}

impl DesignFile {
    pub fn from_design(d: &ResolvableDesign) -> Self {
        DesignFile {
            shape: d.shape,
            lambda: d.lambda,
            points: d.points.iter().copied().collect(),
            groups: None,
            hole: None,
            classes: d
                .classes
                .iter()
                .map(|c| ClassFile {
                    missing: c.missing.iter().copied().collect(),
                    blocks: c.blocks.iter().map(|b| b.points().to_vec()).collect(),
                })
                .collect(),
        }
    }

    pub fn from_grouped(g: &GroupedDesign) -> Self {
        let mut file = DesignFile::from_design(&g.design);
        if g.kind != GroupedKind::Ird || !g.groups.is_empty() {
            file.groups = Some(g.groups.clone());
        }
        file.hole = g.hole.as_ref().map(|h| h.iter().copied().collect());
        file
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("design files always serialize");
        s.push('\n');
        s
    }

    pub fn into_design(self) -> Result<ResolvableDesign, ModelError> {
        let shape = self.shape;
        let points: BTreeSet<Point> = self.points.iter().copied().collect();
        if points.len() != self.points.len() {
            return Err(ModelError::MalformedBlock("duplicate point labels".into()));
        }
        let classes = self
            .classes
            .into_iter()
            .map(|c| {
                let blocks = c
                    .blocks
                    .into_iter()
                    .map(|t| Block::new(shape, t))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(ParallelClass::partial(blocks, c.missing.into_iter().collect()))
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        Ok(ResolvableDesign {
            points,
            lambda: self.lambda,
            shape,
            classes,
        })
    }

    /// Builds the document, inferring the grouped kind when groups or a hole
    /// are present: a hole means IRD; groups with all classes full mean RGDD;
    /// groups with every class missing exactly one group mean FRAME;
    /// anything else is a plain GDD.
    pub fn into_document(self) -> Result<Document, ModelError> {
        let groups = self.groups.clone();
        let hole = self.hole.clone();
        let design = self.into_design()?;
        match (groups, hole) {
            (None, None) => Ok(Document::Design(design)),
            (groups, Some(hole)) => {
                let mut g = GroupedDesign::ird(design, hole.into_iter().collect());
                if let Some(groups) = groups {
                    g.groups = groups;
                }
                Ok(Document::Grouped(g))
            }
            (Some(groups), None) => {
                let kind = infer_kind(&design, &groups);
                Ok(Document::Grouped(GroupedDesign::new(design, groups, kind)))
            }
        }
    }

    pub fn parse(text: &str) -> Result<Document, ModelError> {
        let file: DesignFile =
            serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        file.into_document()
    }
}

fn infer_kind(design: &ResolvableDesign, groups: &[Vec<Point>]) -> GroupedKind {
    if design.classes.iter().all(|c| c.is_full()) {
        return GroupedKind::Rgdd;
    }
    let group_sets: Vec<BTreeSet<Point>> = groups
        .iter()
        .map(|g| g.iter().copied().collect())
        .collect();
    if design
        .classes
        .iter()
        .all(|c| group_sets.iter().any(|g| *g == c.missing))
    {
        GroupedKind::Frame
    } else {
        GroupedKind::Gdd
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_spec_style_document() {
        let text = r#"{ "shape": "K13", "lambda": 2, "points": ["0","1","2","3"],
            "classes": [ { "missing": [], "blocks": [["0","1","2","3"]] } ] }"#;
        let doc = DesignFile::parse(text).unwrap();
        let d = doc.design();
        assert_eq!(d.shape, Shape::K13);
        assert_eq!(d.classes[0].blocks[0].to_string(), "(0;1,2,3)");
    }

    #[test]
    fn infers_kinds() {
        let text = r#"{ "shape": "K2", "lambda": 1, "points": ["0","1","2","3"],
            "groups": [["0","1"],["2","3"]],
            "classes": [ { "blocks": [["0","2"],["1","3"]] }, { "blocks": [["0","3"],["1","2"]] } ] }"#;
        match DesignFile::parse(text).unwrap() {
            Document::Grouped(g) => assert_eq!(g.kind, GroupedKind::Rgdd),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_fields_and_bad_blocks() {
        assert!(DesignFile::parse(r#"{"shape":"K2","lambda":1,"points":[],"classes":[],"x":1}"#).is_err());
        let text = r#"{ "shape": "K2", "lambda": 1, "points": ["0","1"],
            "classes": [ { "blocks": [["0","0"]] } ] }"#;
        assert!(matches!(DesignFile::parse(text), Err(ModelError::MalformedBlock(_))));
    }
}
