use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ModelError;

/// A point label.
///
/// Three roles exist: integers (the points moved by modular development),
/// infinity symbols (`inf`, `inf1`, `inf2`, ...) that development fixes, and
/// subscripted symbols such as `x1` or `y3` whose subscripts can be rotated.
///
/// The total order is integers numerically, then infinities by index, then
/// symbols by letter and subscript. Every listing in the crate follows it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Int(u32),
    /// `Inf(0)` renders as `inf`, `Inf(k)` as `inf{k}`.
    Inf(u32),
    Sym(char, u32),
}

impl Point {
    fn rank(&self) -> u8 {
        match self {
            Point::Int(_) => 0,
            Point::Inf(_) => 1,
            Point::Sym(..) => 2,
        }
    }

    pub fn as_int(&self) -> Option<u32> {
        match *self {
            Point::Int(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_int(&self) -> bool {
        matches!(self, Point::Int(_))
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Point::Int(a), Point::Int(b)) => a.cmp(b),
            (Point::Inf(a), Point::Inf(b)) => a.cmp(b),
            (Point::Sym(a, i), Point::Sym(b, j)) => (a, i).cmp(&(b, j)),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Int(x) => write!(f, "{x}"),
            Point::Inf(0) => f.write_str("inf"),
            Point::Inf(k) => write!(f, "inf{k}"),
            Point::Sym(c, i) => write!(f, "{c}{i}"),
        }
    }
}

impl FromStr for Point {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::BadPoint(s.to_string());
        if s.is_empty() {
            return Err(bad());
        }
        if s.bytes().all(|b| b.is_ascii_digit()) {
            return s.parse().map(Point::Int).map_err(|_| bad());
        }
        let inf_tail = s
            .strip_prefix("inf")
            .or_else(|| s.strip_prefix('\u{221e}'));
        if let Some(tail) = inf_tail {
            if tail.is_empty() {
                return Ok(Point::Inf(0));
            }
            if tail.bytes().all(|b| b.is_ascii_digit()) {
                return match tail.parse::<u32>() {
                    Ok(k) if k > 0 => Ok(Point::Inf(k)),
                    _ => Err(bad()),
                };
            }
            return Err(bad());
        }
        let mut chars = s.chars();
        let letter = chars.next().ok_or_else(bad)?;
        let tail = chars.as_str();
        if letter.is_ascii_alphabetic()
            && !tail.is_empty()
            && tail.bytes().all(|b| b.is_ascii_digit())
        {
            return tail.parse().map(|i| Point::Sym(letter, i)).map_err(|_| bad());
        }
        Err(bad())
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
