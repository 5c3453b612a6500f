//! Reproducible random workloads.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use diskconn::{Point, Site, SiteId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::trace::{Trace, TraceOp};

/// Generated pairs never have `|dist - (r_a + r_b)|` below this, relative to
/// `max(1, r_a + r_b)`.
pub const TANGENCY_GAP: f64 = 1e-9;
/// Center redraws before giving up on avoiding tangency.
const MAX_REDRAWS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("psi must be finite and at least 1, got {0}")]
    Psi(f64),
    #[error("spread must be finite and positive, got {0}")]
    Spread(f64),
    #[error("{mode} traces need ops >= n ({ops} < {n})")]
    TooFewOps { mode: Mode, n: usize, ops: usize },
    #[error("could not place site {0} away from tangency")]
    Crowded(u64),
    #[error("unknown mode {0:?}")]
    UnknownMode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    FullyDynamic,
    InsertOnly,
    DeleteOnly,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::FullyDynamic => "fully-dynamic",
            Mode::InsertOnly => "insert-only",
            Mode::DeleteOnly => "delete-only",
        })
    }
}

impl FromStr for Mode {
    type Err = GenerateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fully-dynamic" => Ok(Mode::FullyDynamic),
            "insert-only" => Ok(Mode::InsertOnly),
            "delete-only" => Ok(Mode::DeleteOnly),
            other => Err(GenerateError::UnknownMode(other.to_string())),
        }
    }
}

/// Generator parameters.
///
/// `n` bounds the live set (fully dynamic) or is the number of sites
/// (semi-dynamic). `ops` is the trace length; insert-only and delete-only
/// traces need `ops >= n`, and delete-only traces delete every site when
/// `ops >= 2n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub mode: Mode,
    pub n: usize,
    pub ops: usize,
    pub psi: f64,
    pub spread: f64,
    pub seed: u64,
}

/// Live-site buckets of side `2 psi` for the tangency check.
struct Placer {
    bucket: f64,
    cells: HashMap<(i64, i64), Vec<Site>>,
}

impl Placer {
    fn new(psi: f64) -> Self {
        Self { bucket: 2.0 * psi, cells: HashMap::new() }
    }

    fn key(&self, p: Point) -> (i64, i64) {
        ((p.x / self.bucket).floor() as i64, (p.y / self.bucket).floor() as i64)
    }

    fn near_tangent(&self, s: &Site) -> bool {
        let (kx, ky) = self.key(s.center);
        (-1..=1).flat_map(|dx| (-1..=1).map(move |dy| (kx + dx, ky + dy))).any(|k| {
            self.cells.get(&k).is_some_and(|v| {
                v.iter().any(|o| {
                    let sum = s.radius + o.radius;
                    (s.center.dist(o.center) - sum).abs() < TANGENCY_GAP * sum.max(1.0)
                })
            })
        })
    }

    fn add(&mut self, s: Site) {
        self.cells.entry(self.key(s.center)).or_default().push(s);
    }

    fn remove(&mut self, s: &Site) {
        let k = self.key(s.center);
        if let Some(v) = self.cells.get_mut(&k) {
            v.retain(|o| o.id != s.id);
        }
    }
}

struct Builder {
    rng: ChaCha8Rng,
    params: GenParams,
    placer: Placer,
    live: Vec<Site>,
    next_id: u64,
    ops: Vec<TraceOp>,
}

impl Builder {
    fn radius(&mut self) -> f64 {
        let psi = self.params.psi;
        if psi == 1.0 {
            return 1.0;
        }
        // Log-uniform so every scale in [1, psi] is represented.
        self.rng.gen_range(0.0..=psi.log2()).exp2().clamp(1.0, psi)
    }

    fn insert(&mut self) -> Result<(), GenerateError> {
        let id = self.next_id;
        self.next_id += 1;
        let r = self.radius();
        for _ in 0..MAX_REDRAWS {
            let s = self.params.spread;
            let site = Site { id: SiteId(id), center: Point::new(self.rng.gen_range(0.0..s), self.rng.gen_range(0.0..s)), radius: r };
            if !self.placer.near_tangent(&site) {
                self.placer.add(site);
                self.live.push(site);
                self.ops.push(TraceOp::Insert(site));
                return Ok(());
            }
        }
        Err(GenerateError::Crowded(id))
    }

    fn delete(&mut self) {
        let i = self.rng.gen_range(0..self.live.len());
        let site = self.live.swap_remove(i);
        self.placer.remove(&site);
        self.ops.push(TraceOp::Delete(site.id));
    }

    fn query(&mut self) {
        let a = self.live[self.rng.gen_range(0..self.live.len())].id;
        let b = self.live[self.rng.gen_range(0..self.live.len())].id;
        self.ops.push(TraceOp::Query(a, b));
    }
}

/// Builds a trace from `params`; the same parameters give the same trace.
pub fn generate(params: GenParams) -> Result<Trace, GenerateError> {
    let GenParams { mode, n, ops, psi, spread, seed } = params;
    if !(psi.is_finite() && psi >= 1.0) {
        return Err(GenerateError::Psi(psi));
    }
    if !(spread.is_finite() && spread > 0.0) {
        return Err(GenerateError::Spread(spread));
    }
    if mode != Mode::FullyDynamic && ops < n {
        return Err(GenerateError::TooFewOps { mode, n, ops });
    }
    let mut b = Builder {
        rng: ChaCha8Rng::seed_from_u64(seed),
        params,
        placer: Placer::new(psi),
        live: Vec::new(),
        next_id: 0,
        ops: Vec::with_capacity(ops),
    };
    match mode {
        Mode::FullyDynamic => {
            while b.ops.len() < ops {
                let roll: f64 = b.rng.gen();
                if b.live.is_empty() || (roll < 0.45 && b.live.len() < n) {
                    if n == 0 {
                        break;
                    }
                    b.insert()?;
                } else if roll < 0.7 {
                    b.delete();
                } else {
                    b.query();
                }
            }
        }
        Mode::InsertOnly => {
            // Queries are spread uniformly among the slots after the first insert.
            let mut inserts_left = n;
            while b.ops.len() < ops {
                let slots_left = ops - b.ops.len();
                if inserts_left > 0 && (b.live.is_empty() || b.rng.gen_range(0..slots_left) < inserts_left) {
                    b.insert()?;
                    inserts_left -= 1;
                } else {
                    b.query();
                }
            }
        }
        Mode::DeleteOnly => {
            for _ in 0..n {
                b.insert()?;
            }
            let mut deletes_left = n.min(ops - n);
            while b.ops.len() < ops && !b.live.is_empty() {
                let slots_left = ops - b.ops.len();
                if deletes_left > 0 && b.rng.gen_range(0..slots_left) < deletes_left {
                    b.delete();
                    deletes_left -= 1;
                } else {
                    b.query();
                }
            }
        }
    }
    Ok(Trace::new(b.ops))
}
