//! Line-oriented trace format.
//!
//! ```text
//! # comment
//! I <id> <x> <y> <r>
//! D <id>
//! Q <id1> <id2>
//! ```

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use diskconn::{Point, Site, SiteId};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("op {index}: site {id} inserted twice")]
    DuplicateInsert { index: usize, id: SiteId },
    #[error("op {index}: site {id} is not live")]
    NotLive { index: usize, id: SiteId },
    #[error("op {index}: invalid site: {msg}")]
    InvalidSite { index: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceOp {
    Insert(Site),
    Delete(SiteId),
    Query(SiteId, SiteId),
}

impl TraceOp {
    pub fn code(&self) -> char {
        match self {
            TraceOp::Insert(_) => 'I',
            TraceOp::Delete(_) => 'D',
            TraceOp::Query(..) => 'Q',
        }
    }
}

impl fmt::Display for TraceOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // `{}` on f64 prints the shortest string that parses back exactly.
        match self {
            TraceOp::Insert(s) => write!(f, "I {} {} {} {}", s.id.0, s.center.x, s.center.y, s.radius),
            TraceOp::Delete(id) => write!(f, "D {}", id.0),
            TraceOp::Query(a, b) => write!(f, "Q {} {}", a.0, b.0),
        }
    }
}

/// What a valid trace looks like, used to pick compatible structures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceShape {
    pub inserts: usize,
    pub deletes: usize,
    pub queries: usize,
    pub min_radius: f64,
    pub max_radius: f64,
    /// Inserts before the first delete or query.
    pub leading_inserts: usize,
    pub peak_live: usize,
}

impl TraceShape {
    pub fn insert_only(&self) -> bool {
        self.deletes == 0
    }

    /// All inserts come first.
    pub fn delete_only(&self) -> bool {
        self.leading_inserts == self.inserts
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub ops: Vec<TraceOp>,
}

impl Trace {
    pub fn new(ops: Vec<TraceOp>) -> Self {
        Self { ops }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn prefix(&self, len: usize) -> Trace {
        Trace { ops: self.ops[..len.min(self.ops.len())].to_vec() }
    }

    /// Checks id discipline and site validity and summarizes the trace.
    pub fn validate(&self) -> Result<TraceShape, TraceError> {
        let mut ever = HashSet::new();
        let mut live = HashSet::new();
        let mut shape = TraceShape {
            inserts: 0,
            deletes: 0,
            queries: 0,
            min_radius: f64::INFINITY,
            max_radius: 0.0,
            leading_inserts: 0,
            peak_live: 0,
        };
        let mut leading = true;
        for (index, op) in self.ops.iter().enumerate() {
            match *op {
                TraceOp::Insert(s) => {
                    Site::new(s.id, s.center, s.radius)
                        .and_then(|s| s.check_canonical())
                        .map_err(|e| TraceError::InvalidSite { index, msg: e.to_string() })?;
                    if !ever.insert(s.id) {
                        return Err(TraceError::DuplicateInsert { index, id: s.id });
                    }
                    live.insert(s.id);
                    shape.inserts += 1;
                    shape.min_radius = shape.min_radius.min(s.radius);
                    shape.max_radius = shape.max_radius.max(s.radius);
                    shape.peak_live = shape.peak_live.max(live.len());
                    if leading {
                        shape.leading_inserts += 1;
                    }
                }
                TraceOp::Delete(id) => {
                    if !live.remove(&id) {
                        return Err(TraceError::NotLive { index, id });
                    }
                    shape.deletes += 1;
                    leading = false;
                }
                TraceOp::Query(a, b) => {
                    for id in [a, b] {
                        if !live.contains(&id) {
                            return Err(TraceError::NotLive { index, id });
                        }
                    }
                    shape.queries += 1;
                    leading = false;
                }
            }
        }
        Ok(shape)
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            writeln!(f, "{op}")?;
        }
        Ok(())
    }
}

fn field<T: FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T, TraceError> {
    let tok = tok.ok_or_else(|| TraceError::Parse { line, msg: format!("missing {what}") })?;
    tok.parse().map_err(|_| TraceError::Parse { line, msg: format!("bad {what} {tok:?}") })
}

impl FromStr for Trace {
    type Err = TraceError;

    /// Parses the text format; does not validate id discipline.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut ops = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut toks = body.split_whitespace();
            let op = match toks.next() {
                Some("I") => {
                    let id = SiteId(field(line, toks.next(), "id")?);
                    let x = field(line, toks.next(), "x")?;
                    let y = field(line, toks.next(), "y")?;
                    let r = field(line, toks.next(), "radius")?;
                    TraceOp::Insert(Site { id, center: Point::new(x, y), radius: r })
                }
                Some("D") => TraceOp::Delete(SiteId(field(line, toks.next(), "id")?)),
                Some("Q") => TraceOp::Query(SiteId(field(line, toks.next(), "id")?), SiteId(field(line, toks.next(), "id")?)),
                Some(other) => return Err(TraceError::Parse { line, msg: format!("unknown op {other:?}") }),
                None => unreachable!("blank lines are skipped"),
            };
            if let Some(extra) = toks.next() {
                return Err(TraceError::Parse { line, msg: format!("trailing token {extra:?}") });
            }
            ops.push(op);
        }
        Ok(Trace { ops })
    }
}
