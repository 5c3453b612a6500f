//! Trace replay, oracle comparison and failure shrinking.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use diskconn::bdg::{BdgMode, BoundedDiskConnectivity};
use diskconn::geometry::disks_intersect;
use diskconn::oracle::{components, oracle_regions, AnchorSystem, RegionSets};
use diskconn::quadforest::{build_compressed, QuadForest};
use diskconn::regions::{ConeCounts, RegionId, S1_WINDOW};
use diskconn::semidyn::{DecrementalConnectivity, IncrementalConnectivity, Variant};
use diskconn::udg::UnitDiskConnectivity;
use diskconn::{DiskConnectivity, Site, SiteId, StructureError, StructureStats};
use serde::Serialize;
use thiserror::Error;

use crate::trace::{Trace, TraceError, TraceOp, TraceShape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Udg,
    Bdg,
    /// Bounded structure with a matching for every cell pair.
    BdgRef,
    Inc,
    DecBounded,
    DecGeneral,
    Oracle,
}

impl Kind {
    pub const ALL: [Kind; 7] = [Kind::Udg, Kind::Bdg, Kind::BdgRef, Kind::Inc, Kind::DecBounded, Kind::DecGeneral, Kind::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Udg => "udg",
            Kind::Bdg => "bdg",
            Kind::BdgRef => "bdg-ref",
            Kind::Inc => "inc",
            Kind::DecBounded => "dec-bounded",
            Kind::DecGeneral => "dec-general",
            Kind::Oracle => "oracle",
        }
    }

    fn is_decremental(self) -> bool {
        matches!(self, Kind::DecBounded | Kind::DecGeneral)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| RunError::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    None,
    Oracle,
}

/// A disagreement with the brute-force answer.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "what", rename_all = "kebab-case")]
pub enum Mismatch {
    Query { a: u64, b: u64, expected: bool, got: bool },
    /// Revealed (region, site) pairs of a deletion, regions in debug form.
    Revealed { deleted: u64, missing: Vec<(String, u64)>, unexpected: Vec<(String, u64)> },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error("unknown structure kind {0:?}")]
    UnknownKind(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("{kind} cannot replay this trace: {reason}")]
    Incompatible { kind: Kind, reason: String },
    #[error("op {index} ({op}): {error}")]
    Structure { index: usize, op: String, error: StructureError },
    #[error("op {index} ({op}): oracle mismatch {mismatch:?}")]
    Mismatch { index: usize, op: String, mismatch: Mismatch },
}

impl RunError {
    /// Index of the failing operation for failures that happen mid-replay.
    pub fn failing_index(&self) -> Option<usize> {
        match self {
            RunError::Structure { index, .. } | RunError::Mismatch { index, .. } => Some(*index),
            _ => None,
        }
    }
}

/// One replayed operation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpRecord {
    pub index: usize,
    pub op: char,
    pub micros: f64,
    pub answer: Option<bool>,
    pub cells: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub kind: String,
    pub seed: u64,
    pub checked: bool,
    pub ops: usize,
    pub inserts: usize,
    pub deletes: usize,
    pub queries: usize,
    pub true_answers: usize,
    pub total_micros: f64,
    pub mean_insert_micros: f64,
    pub mean_delete_micros: f64,
    pub mean_update_micros: f64,
    pub mean_query_micros: f64,
    pub final_sites: usize,
    pub final_cells: usize,
    pub final_edges: usize,
    pub peak_cells: usize,
    pub peak_edges: usize,
    pub peak_matched_sites: usize,
    pub touched: u64,
    pub reassignments: u64,
    pub reassignments_per_delete: f64,
    pub revealed_pairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<OpRecord>,
    pub summary: Summary,
    pub stats: StructureStats,
}

impl RunOutput {
    pub fn answers(&self) -> Vec<bool> {
        self.records.iter().filter_map(|r| r.answer).collect()
    }
}

/// Brute-force structure: component labels recomputed after each update.
#[derive(Debug, Default)]
pub struct BruteForce {
    sites: BTreeMap<SiteId, Site>,
    labels: Option<BTreeMap<SiteId, usize>>,
}

impl BruteForce {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sites(&self) -> impl Iterator<Item = &Site> {
        self.sites.values()
    }
}

impl DiskConnectivity for BruteForce {
    fn insert(&mut self, site: Site) -> Result<(), StructureError> {
        if self.sites.insert(site.id, site).is_some() {
            return Err(StructureError::DuplicateSite(site.id));
        }
        self.labels = None;
        Ok(())
    }

    fn delete(&mut self, id: SiteId) -> Result<(), StructureError> {
        self.sites.remove(&id).ok_or(StructureError::UnknownSite(id))?;
        self.labels = None;
        Ok(())
    }

    fn connected(&mut self, a: SiteId, b: SiteId) -> Result<bool, StructureError> {
        let sites = &self.sites;
        let labels = self.labels.get_or_insert_with(|| {
            let live: Vec<Site> = sites.values().copied().collect();
            components(&live).into_iter().collect()
        });
        let la = labels.get(&a).ok_or(StructureError::UnknownSite(a))?;
        let lb = labels.get(&b).ok_or(StructureError::UnknownSite(b))?;
        Ok(la == lb)
    }

    fn len(&self) -> usize {
        self.sites.len()
    }

    fn stats(&self) -> StructureStats {
        StructureStats { sites: self.sites.len(), vertices: self.sites.len(), ..StructureStats::default() }
    }

    fn audit(&mut self) -> Result<(), String> {
        Ok(())
    }
}

/// Region sets of the initial sites, shrunk deletion by deletion. Deleting a
/// site only removes `S1` members, so `S2` sets can only lose members and the
/// losses are exactly the revealed pairs.
struct RevealOracle {
    sets: RegionSets,
    sites: BTreeMap<SiteId, Site>,
    s1_of: BTreeMap<SiteId, Vec<RegionId>>,
}

impl RevealOracle {
    fn new(initial: &[Site], variant: Variant) -> Result<Self, StructureError> {
        let cones = ConeCounts::default();
        let sets = match variant {
            Variant::Bounded { psi } => {
                let mut f = QuadForest::for_radius_bound(psi, S1_WINDOW)?;
                for s in initial {
                    f.insert_site(s)?;
                }
                let cells: Vec<_> = f.nodes().map(|n| n.cell).collect();
                oracle_regions(initial, AnchorSystem::Cells(&cells), cones)
            }
            Variant::General => {
                let tree = build_compressed(initial, S1_WINDOW)?;
                oracle_regions(initial, AnchorSystem::Tree(&tree), cones)
            }
        };
        let mut s1_of: BTreeMap<SiteId, Vec<RegionId>> = BTreeMap::new();
        for (r, set) in &sets.s1 {
            for id in set {
                s1_of.entry(*id).or_default().push(*r);
            }
        }
        Ok(Self { sets, sites: initial.iter().map(|s| (s.id, *s)).collect(), s1_of })
    }

    fn delete(&mut self, id: SiteId) -> BTreeSet<(RegionId, SiteId)> {
        let mut revealed = BTreeSet::new();
        for region in self.s1_of.remove(&id).unwrap_or_default() {
            let s1 = self.sets.s1.get_mut(&region).expect("indexed region");
            s1.remove(&id);
            let Some(s2) = self.sets.s2.get_mut(&region) else { continue };
            let sites = &self.sites;
            s2.retain(|u| {
                let keep = *u == id || s1.iter().any(|t| disks_intersect(&sites[u], &sites[t]));
                if !keep {
                    revealed.insert((region, *u));
                }
                keep
            });
        }
        for s2 in self.sets.s2.values_mut() {
            s2.remove(&id);
        }
        self.sites.remove(&id);
        revealed
    }
}

enum Built {
    Plain(Box<dyn DiskConnectivity>),
    Dec(Box<DecrementalConnectivity>),
}

impl Built {
    fn get(&mut self) -> &mut dyn DiskConnectivity {
        match self {
            Built::Plain(g) => g.as_mut(),
            Built::Dec(g) => g.as_mut(),
        }
    }
}

fn incompatible(kind: Kind, reason: &str) -> RunError {
    RunError::Incompatible { kind, reason: reason.to_string() }
}

/// Radius bound handed to the bounded structures.
fn psi_of(shape: &TraceShape) -> f64 {
    shape.max_radius.max(1.0)
}

fn check_compatible(kind: Kind, shape: &TraceShape) -> Result<(), RunError> {
    if kind != Kind::Oracle && shape.inserts > 0 && shape.min_radius < 1.0 {
        return Err(incompatible(kind, "radii below 1; normalize the trace first"));
    }
    match kind {
        Kind::Udg if shape.inserts > 0 && shape.max_radius != 1.0 => Err(incompatible(kind, "every radius must equal 1 (psi = 1)")),
        Kind::Inc if !shape.insert_only() => Err(incompatible(kind, "trace deletes sites")),
        Kind::DecBounded | Kind::DecGeneral if !shape.delete_only() => {
            Err(incompatible(kind, "trace inserts after its first delete or query"))
        }
        _ => Ok(()),
    }
}

fn variant_of(kind: Kind, shape: &TraceShape) -> Variant {
    match kind {
        Kind::DecBounded => Variant::Bounded { psi: psi_of(shape) },
        _ => Variant::General,
    }
}

fn make(kind: Kind, shape: &TraceShape) -> Result<Box<dyn DiskConnectivity>, StructureError> {
    Ok(match kind {
        Kind::Udg => Box::new(UnitDiskConnectivity::new()),
        Kind::Bdg => Box::new(BoundedDiskConnectivity::new(psi_of(shape), BdgMode::Representative)?),
        Kind::BdgRef => Box::new(BoundedDiskConnectivity::new(psi_of(shape), BdgMode::Plain)?),
        Kind::Inc => Box::new(IncrementalConnectivity::new(psi_of(shape))?),
        Kind::Oracle => Box::new(BruteForce::new()),
        Kind::DecBounded | Kind::DecGeneral => unreachable!("built from the leading inserts"),
    })
}

fn micros_since(t: Instant) -> f64 {
    t.elapsed().as_nanos() as f64 / 1000.0
}

/// Replays `trace` on a fresh structure of `kind`.
///
/// Decremental kinds are built once from the leading inserts; those insert
/// records share the build time evenly. With `Check::Oracle` every query and
/// every deletion's revealed set is compared against brute force and the
/// first disagreement is returned as an error.
pub fn run(kind: Kind, trace: &Trace, check: Check, seed: u64) -> Result<RunOutput, RunError> {
    let shape = trace.validate()?;
    check_compatible(kind, &shape)?;
    let structure_err = |index: usize, error: StructureError| RunError::Structure { index, op: trace.ops[index].to_string(), error };

    let mut records = Vec::with_capacity(trace.len());
    let mut oracle = (check == Check::Oracle).then(BruteForce::new);
    let mut reveal_oracle = None;
    let mut start = 0;
    let mut built = if kind.is_decremental() {
        let k = shape.leading_inserts;
        let initial: Vec<Site> = trace.ops[..k]
            .iter()
            .map(|op| match op {
                TraceOp::Insert(s) => *s,
                _ => unreachable!("leading ops are inserts"),
            })
            .collect();
        let variant = variant_of(kind, &shape);
        let t = Instant::now();
        let g = DecrementalConnectivity::build(&initial, variant, seed).map_err(|e| structure_err(k.saturating_sub(1), e))?;
        let share = if k > 0 { micros_since(t) / k as f64 } else { 0.0 };
        let stats = g.stats();
        for index in 0..k {
            records.push(OpRecord { index, op: 'I', micros: share, answer: None, cells: stats.vertices, edges: stats.edges });
        }
        if let Some(o) = oracle.as_mut() {
            for s in &initial {
                o.insert(*s).expect("validated trace");
            }
            reveal_oracle = Some(RevealOracle::new(&initial, variant).map_err(|e| structure_err(k.saturating_sub(1), e))?);
        }
        start = k;
        Built::Dec(Box::new(g))
    } else {
        Built::Plain(make(kind, &shape).map_err(|e| structure_err(0, e))?)
    };

    let mut summary = Summary { kind: kind.name().to_string(), seed, checked: oracle.is_some(), ..Summary::default() };
    let mut peak_matched = 0;
    for (index, op) in trace.ops.iter().enumerate().skip(start) {
        let g = built.get();
        let t = Instant::now();
        let result = match *op {
            TraceOp::Insert(s) => g.insert(s).map(|_| None),
            TraceOp::Delete(id) => g.delete(id).map(|_| None),
            TraceOp::Query(a, b) => g.connected(a, b).map(Some),
        };
        let micros = micros_since(t);
        let answer = result.map_err(|e| structure_err(index, e))?;
        let stats = g.stats();
        peak_matched = peak_matched.max(stats.matched_sites);
        records.push(OpRecord { index, op: op.code(), micros, answer, cells: stats.vertices, edges: stats.edges });

        let Some(o) = oracle.as_mut() else { continue };
        let mismatch = match *op {
            TraceOp::Insert(s) => {
                o.insert(s).expect("validated trace");
                None
            }
            TraceOp::Delete(id) => {
                o.delete(id).expect("validated trace");
                match (reveal_oracle.as_mut(), &built) {
                    (Some(ro), Built::Dec(dec)) => {
                        let want = ro.delete(id);
                        let got: BTreeSet<(RegionId, SiteId)> = dec.last_revealed().iter().copied().collect();
                        summary.revealed_pairs += got.len();
                        (want != got).then(|| {
                            let show = |s: &BTreeSet<_>, t: &BTreeSet<_>| {
                                s.difference(t).map(|(r, u): &(RegionId, SiteId)| (format!("{r:?}"), u.0)).collect()
                            };
                            Mismatch::Revealed { deleted: id.0, missing: show(&want, &got), unexpected: show(&got, &want) }
                        })
                    }
                    _ => None,
                }
            }
            TraceOp::Query(a, b) => {
                let expected = o.connected(a, b).expect("validated trace");
                let got = answer.expect("query answer");
                (expected != got).then_some(Mismatch::Query { a: a.0, b: b.0, expected, got })
            }
        };
        if let Some(mismatch) = mismatch {
            return Err(RunError::Mismatch { index, op: op.to_string(), mismatch });
        }
    }

    let stats = built.get().stats();
    summarize(&mut summary, &records, &stats, peak_matched);
    Ok(RunOutput { records, summary, stats })
}

fn mean(sum: f64, count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

fn summarize(summary: &mut Summary, records: &[OpRecord], stats: &StructureStats, peak_matched: usize) {
    let mut time = BTreeMap::<char, f64>::new();
    for r in records {
        *time.entry(r.op).or_default() += r.micros;
        match r.op {
            'I' => summary.inserts += 1,
            'D' => summary.deletes += 1,
            _ => summary.queries += 1,
        }
        summary.true_answers += usize::from(r.answer == Some(true));
        summary.peak_cells = summary.peak_cells.max(r.cells);
        summary.peak_edges = summary.peak_edges.max(r.edges);
    }
    let t = |c: char| time.get(&c).copied().unwrap_or(0.0);
    summary.ops = records.len();
    summary.total_micros = time.values().sum();
    summary.mean_insert_micros = mean(t('I'), summary.inserts);
    summary.mean_delete_micros = mean(t('D'), summary.deletes);
    summary.mean_update_micros = mean(t('I') + t('D'), summary.inserts + summary.deletes);
    summary.mean_query_micros = mean(t('Q'), summary.queries);
    summary.final_sites = stats.sites;
    summary.final_cells = stats.vertices;
    summary.final_edges = stats.edges;
    summary.peak_matched_sites = peak_matched;
    summary.touched = stats.touched;
    summary.reassignments = stats.reassignments;
    summary.reassignments_per_delete = mean(stats.reassignments as f64, summary.deletes);
}

/// Machine-readable description of a failed checked replay.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureReport {
    pub status: &'static str,
    pub kind: String,
    pub seed: u64,
    pub error: String,
    pub failing_index: usize,
    pub mismatch: Option<Mismatch>,
    /// Length of the shortest prefix that still fails.
    pub minimal_prefix_len: usize,
    pub minimal_prefix: Vec<String>,
}

/// Shortest failing prefix length by binary search, given a length `known`
/// already observed to fail. The result is re-checked; if the search lands
/// on a passing length (a non-monotone predicate), `known` is returned.
pub fn shrink_prefix(known: usize, mut fails: impl FnMut(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, known);
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if fails(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi < known && !fails(hi) {
        known
    } else {
        hi
    }
}

/// Shortest prefix of `trace` whose checked replay fails.
pub fn shrink(kind: Kind, trace: &Trace, seed: u64, known: usize) -> usize {
    shrink_prefix(known, |len| run(kind, &trace.prefix(len), Check::Oracle, seed).is_err())
}

/// Checked replay; on a mid-replay failure, shrinks and reports.
pub fn run_checked(kind: Kind, trace: &Trace, seed: u64) -> Result<RunOutput, Box<FailureReport>> {
    let err = match run(kind, trace, Check::Oracle, seed) {
        Ok(out) => return Ok(out),
        Err(e) => e,
    };
    let mismatch = match &err {
        RunError::Mismatch { mismatch, .. } => Some(mismatch.clone()),
        _ => None,
    };
    let (failing_index, minimal_prefix_len) = match err.failing_index() {
        Some(i) => (i, shrink(kind, trace, seed, i + 1)),
        None => (0, 0),
    };
    Err(Box::new(FailureReport {
        status: if mismatch.is_some() { "mismatch" } else { "error" },
        kind: kind.name().to_string(),
        seed,
        error: err.to_string(),
        failing_index,
        mismatch,
        minimal_prefix_len,
        minimal_prefix: trace.ops[..minimal_prefix_len].iter().map(|op| op.to_string()).collect(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for k in Kind::ALL {
            assert_eq!(k.name().parse::<Kind>().unwrap(), k);
        }
        assert!("quadtree".parse::<Kind>().is_err());
    }

    #[test]
    fn brute_force_answers() {
        let mut g = BruteForce::new();
        g.insert(Site::at(1, 0.0, 0.0, 1.0)).unwrap();
        g.insert(Site::at(2, 2.0, 0.0, 1.0)).unwrap();
        g.insert(Site::at(3, 9.0, 0.0, 1.0)).unwrap();
        assert!(g.connected(SiteId(1), SiteId(2)).unwrap());
        assert!(!g.connected(SiteId(1), SiteId(3)).unwrap());
        g.delete(SiteId(2)).unwrap();
        assert!(g.connected(SiteId(2), SiteId(1)).is_err());
        assert_eq!(g.insert(Site::at(1, 0.0, 0.0, 1.0)), Err(StructureError::DuplicateSite(SiteId(1))));
    }
}
