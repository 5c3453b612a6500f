use std::collections::BTreeSet;

use diskconn::geometry::disks_intersect;
use diskconn::grid::CellId;
use diskconn::oracle::{oracle_regions, AnchorSystem, RegionSets};
use diskconn::quadforest::{build_compressed, QuadForest};
use diskconn::regions::{
    s1_membership, s1_regions_bounded, AnchorFrame, ConeCounts, RegionKind, S1_WINDOW,
};
use diskconn::{Point, Site, SiteId};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_sites(rng: &mut ChaCha8Rng, n: u64, spread: f64, max_r: f64) -> Vec<Site> {
    (0..n)
        .map(|i| {
            let r = (rng.gen_range(0.0..max_r.log2().max(0.0) + f64::EPSILON)).exp2().min(max_r).max(1.0);
            Site::at(i, rng.gen_range(0.0..spread), rng.gen_range(0.0..spread), r)
        })
        .collect()
}

fn forest_of(sites: &[Site], psi: f64) -> Vec<CellId> {
    let mut f = QuadForest::for_radius_bound(psi, S1_WINDOW).unwrap();
    for s in sites {
        f.insert_site(s).unwrap();
    }
    f.nodes().map(|n| n.cell).collect()
}

/// Independent region test: polar angle and distance from the apex.
fn naive_kind(frame: &AnchorFrame, p: Point, d1: u32, d2: u32) -> Option<RegionKind> {
    let a = frame.apex();
    let (dx, dy) = (p.x - a.x, p.y - a.y);
    let d = dx.hypot(dy);
    let s = frame.smallest.diameter();
    let t = frame.largest.diameter();
    let turn = dy.atan2(dx).rem_euclid(std::f64::consts::TAU) / std::f64::consts::TAU;
    if d < s {
        Some(RegionKind::Inner)
    } else if d < 2.5 * s {
        Some(RegionKind::Middle(((turn * d2 as f64) as u32).min(d2 - 1)))
    } else if d <= 2.5 * s + 2.0 * t {
        Some(RegionKind::Outer(((turn * d1 as f64) as u32).min(d1 - 1)))
    } else {
        None
    }
}

#[test]
fn membership_matches_clause_by_clause() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cones = ConeCounts::default();
    for _ in 0..20_000 {
        let lo = CellId::new(rng.gen_range(0..4), rng.gen_range(5..9), rng.gen_range(5..9));
        let general = rng.gen_bool(0.5);
        let hi = if general { lo.ancestor_at(lo.level + rng.gen_range(0..3)) } else { lo };
        let frame = AnchorFrame { smallest: lo, largest: hi, general };
        let a = frame.apex();
        let reach = frame.outer_radius() * 1.2;
        let p = Point::new(a.x + rng.gen_range(-reach..reach), a.y + rng.gen_range(-reach..reach));
        if p.x < 0.0 || p.y < 0.0 {
            continue;
        }
        let r = rng.gen_range(0.5..3.0) * lo.diameter();
        let t = Site::new(SiteId(0), p, r).unwrap();
        let kind = naive_kind(&frame, p, 23, 8);
        for k in cones.kinds() {
            let located = kind == Some(k);
            let s = lo.diameter();
            let top = if general { 2.0 * hi.diameter() } else { 2.0 * s };
            let radius_ok = s <= r && (r < top || (r == top && (general || matches!(k, RegionKind::Outer(_)))));
            let contact = !matches!(k, RegionKind::Outer(_)) || a.dist(p) <= r + 2.5 * s;
            assert_eq!(s1_membership(&frame, k, cones, &t), located && radius_ok && contact, "{frame:?} {t:?} {k:?}");
        }
    }
}

#[test]
fn bounded_candidates_find_every_membership() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cones = ConeCounts::default();
    for psi in [1.0f64, 4.0, 64.0] {
        let sites = random_sites(&mut rng, 60, 40.0 * psi.sqrt(), psi);
        let mut f = QuadForest::for_radius_bound(psi, S1_WINDOW).unwrap();
        for s in &sites {
            f.insert_site(s).unwrap();
        }
        let cells: Vec<CellId> = f.nodes().map(|n| n.cell).collect();
        let want = oracle_regions(&sites, AnchorSystem::Cells(&cells), cones);
        let mut got = RegionSets::default();
        for t in &sites {
            let found = s1_regions_bounded(&f, cones, t).unwrap();
            assert!(found.len() <= 225);
            for id in found {
                got.s1.entry(id).or_default().insert(t.id);
            }
        }
        assert_eq!(got.s1, want.s1);
    }
}

/// Every pair in an `S1` set intersects; every disk-graph edge `{s, t}` with
/// `r_s <= r_t` has a region with `t` in `S1` and `s` in `S2`.
fn check_clique_and_coverage(sites: &[Site], sets: &RegionSets) {
    let by_id: std::collections::HashMap<SiteId, &Site> = sites.iter().map(|s| (s.id, s)).collect();
    for (region, set) in &sets.s1 {
        let v: Vec<_> = set.iter().collect();
        for (i, a) in v.iter().enumerate() {
            for b in &v[i + 1..] {
                assert!(disks_intersect(by_id[a], by_id[b]), "{region:?}: {a} and {b} are disjoint");
            }
        }
    }
    let mut covered: BTreeSet<(SiteId, SiteId)> = BTreeSet::new();
    for (region, s1) in &sets.s1 {
        if let Some(s2) = sets.s2.get(region) {
            for t in s1 {
                for s in s2 {
                    covered.insert((*s, *t));
                }
            }
        }
    }
    for s in sites {
        for t in sites {
            if s.id != t.id && s.radius <= t.radius && disks_intersect(s, t) {
                let ok = covered.contains(&(s.id, t.id)) || (s.radius == t.radius && covered.contains(&(t.id, s.id)));
                assert!(ok, "edge {} - {} is not covered", s.id, t.id);
            }
        }
    }
}

#[test]
fn bounded_clique_and_coverage() {
    let cones = ConeCounts::default();
    for seed in 0..12 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi: f64 = [1.0, 4.0, 64.0][seed as usize % 3];
        let sites = random_sites(&mut rng, 80, 30.0 * psi.sqrt(), psi);
        let cells = forest_of(&sites, psi);
        check_clique_and_coverage(&sites, &oracle_regions(&sites, AnchorSystem::Cells(&cells), cones));
    }
}

#[test]
fn general_clique_and_coverage() {
    let cones = ConeCounts::default();
    for seed in 0..12 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let sites = random_sites(&mut rng, 80, 3000.0, 1024.0);
        let tree = build_compressed(&sites, S1_WINDOW).unwrap();
        check_clique_and_coverage(&sites, &oracle_regions(&sites, AnchorSystem::Tree(&tree), cones));
    }
}

#[test]
fn power_of_two_radius_reaches_the_lower_window() {
    // r = 2 sits at level 1 and is admitted by the outer regions of level-0
    // anchors with r = 2|σ|.
    let cones = ConeCounts::default();
    let t = Site::at(1, 50.0, 50.0, 2.0);
    let near = Site::at(2, 50.0 + 2.0, 50.0, 1.0);
    let mut f = QuadForest::for_radius_bound(4.0, S1_WINDOW).unwrap();
    f.insert_site(&t).unwrap();
    f.insert_site(&near).unwrap();
    let found = s1_regions_bounded(&f, cones, &t).unwrap();
    let lower = found.iter().filter(|r| matches!(r.anchor, diskconn::regions::Anchor::Cell(c) if c.level == 0));
    assert!(lower.clone().count() > 0);
    assert!(lower.clone().all(|r| matches!(r.kind, RegionKind::Outer(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn oracle_regions_ignore_site_order(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sites = random_sites(&mut rng, 30, 60.0, 16.0);
        let cells = forest_of(&sites, 16.0);
        let cones = ConeCounts::default();
        let a = oracle_regions(&sites, AnchorSystem::Cells(&cells), cones);
        let mut rev = sites.clone();
        rev.reverse();
        let mut shuffled_cells = cells.clone();
        shuffled_cells.reverse();
        let b = oracle_regions(&rev, AnchorSystem::Cells(&shuffled_cells), cones);
        prop_assert_eq!(a, b);
    }
}
