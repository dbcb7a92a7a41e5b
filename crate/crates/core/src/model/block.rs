use std::fmt;

use super::{ModelError, Point, Shape};

/// A copy of a shape placed on an ordered tuple of points.
///
/// The tuple order is the bracket notation order, so `(a,b,c;d)` for K4−e
/// keeps `d` last. Paths are stored with the smaller endpoint first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    shape: Shape,
    tuple: Vec<Point>,
}

/// An unordered pair stored as `(min, max)`.
pub type Edge = (Point, Point);

pub fn edge(a: Point, b: Point) -> Edge {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Block {
    pub fn new(shape: Shape, mut tuple: Vec<Point>) -> Result<Self, ModelError> {
        if tuple.len() != shape.vertex_count() {
            return Err(ModelError::MalformedBlock(format!(
                "{shape} needs {} points, got {}",
                shape.vertex_count(),
                tuple.len()
            )));
        }
        for i in 0..tuple.len() {
            for j in i + 1..tuple.len() {
                if tuple[i] == tuple[j] {
                    return Err(ModelError::MalformedBlock(format!(
                        "point {} repeated in {shape} block",
                        tuple[i]
                    )));
                }
            }
        }
        if shape.is_path() && tuple[tuple.len() - 1] < tuple[0] {
            tuple.reverse();
        }
        Ok(Block { shape, tuple })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn points(&self) -> &[Point] {
        &self.tuple
    }

    /// The edge multiset of the block, in canonical edge order.
    pub fn edges(&self) -> Vec<Edge> {
        self.shape
            .edges()
            .iter()
            .map(|&(a, b)| edge(self.tuple[a], self.tuple[b]))
            .collect()
    }

    /// Applies `f` to every point. Fails if the image repeats a point.
    pub fn map_points(&self, mut f: impl FnMut(Point) -> Point) -> Result<Block, ModelError> {
        Block::new(self.shape, self.tuple.iter().map(|&p| f(p)).collect())
    }

    /// Sorted edge list; two blocks with equal keys are the same subgraph.
    pub fn edge_key(&self) -> Vec<Edge> {
        let mut e = self.edges();
        e.sort();
        e
    }

    pub fn parse(text: &str, shape: Shape) -> Result<Block, ModelError> {
        parse_block(text, shape)
    }
}

/// `(open, separators, close)` for each shape's notation.
fn notation(shape: Shape) -> (char, &'static [char], char) {
    match shape {
        Shape::K2 => ('[', &[','], ']'),
        Shape::P3 => ('[', &[',', ','], ']'),
        Shape::P4 => ('[', &[',', ',', ','], ']'),
        Shape::K3 => ('(', &[',', ','], ')'),
        Shape::C4 => ('(', &[',', ',', ','], ')'),
        Shape::K13 => ('(', &[';', ',', ','], ')'),
        Shape::Kite => ('(', &[',', ',', '-'], ')'),
        Shape::K4e => ('(', &[',', ',', ';'], ')'),
        Shape::K4 => ('{', &[',', ',', ','], '}'),
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (open, seps, close) = notation(self.shape);
        write!(f, "{open}{}", self.tuple[0])?;
        for (sep, p) in seps.iter().zip(&self.tuple[1..]) {
            write!(f, "{sep}{p}")?;
        }
        write!(f, "{close}")
    }
}

/// Reads a block in bracket notation, e.g. `(inf,4,5;0)` for K4−e.
pub fn parse_block(text: &str, shape: Shape) -> Result<Block, ModelError> {
    let (open, seps, close) = notation(shape);
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut pos = 0;
    let err = |position: usize, message: String| ModelError::Parse { position, message };
    let skip_ws = |pos: &mut usize| {
        while *pos < chars.len() && chars[*pos].1.is_whitespace() {
            *pos += 1;
        }
    };
    let offset = |pos: usize| chars.get(pos).map_or(text.len(), |c| c.0);
    let expect = |pos: &mut usize, want: char| -> Result<(), ModelError> {
        skip_ws(pos);
        match chars.get(*pos) {
            Some(&(_, c)) if c == want => {
                *pos += 1;
                Ok(())
            }
            Some(&(at, c)) => Err(err(at, format!("expected '{want}', found '{c}'"))),
            None => Err(err(text.len(), format!("expected '{want}', found end of input"))),
        }
    };
    let label = |pos: &mut usize| -> Result<Point, ModelError> {
        skip_ws(pos);
        let start = *pos;
        while *pos < chars.len() && (chars[*pos].1.is_alphanumeric() || chars[*pos].1 == '\u{221e}') {
            *pos += 1;
        }
        if start == *pos {
            return Err(err(offset(start), "expected a point label".into()));
        }
        let s: String = chars[start..*pos].iter().map(|c| c.1).collect();
        s.parse()
            .map_err(|e: ModelError| err(offset(start), e.to_string()))
    };

    expect(&mut pos, open)?;
    let mut tuple = vec![label(&mut pos)?];
    for &sep in seps {
        expect(&mut pos, sep)?;
        tuple.push(label(&mut pos)?);
    }
    expect(&mut pos, close)?;
    skip_ws(&mut pos);
    if pos < chars.len() {
        return Err(err(offset(pos), "trailing characters after block".into()));
    }
    Block::new(shape, tuple)
}
