use std::collections::BTreeSet;

use diskconn::grid::{cell_of, level_of_radius, neighborhood, CellId};
use diskconn::quadforest::{build_compressed, CompressedQuadtree, QuadForest};
use diskconn::{Site, SiteId};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const K: u32 = 15;

fn own_cell(s: &Site) -> CellId {
    cell_of(s.center, level_of_radius(s.radius).unwrap())
}

#[test]
fn forest_keeps_neighborhoods_and_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut f = QuadForest::for_radius_bound(16.0, K).unwrap();
    let mut live: Vec<Site> = Vec::new();
    for i in 0..600u64 {
        if live.len() < 10 || rng.gen_bool(0.6) {
            let s = Site::at(i, rng.gen_range(0.0..150.0), rng.gen_range(0.0..150.0), rng.gen_range(1.0..16.0));
            let created = f.insert_site(&s).unwrap();
            assert!(created.iter().all(|c| f.contains(*c)));
            live.push(s);
        } else {
            let s = live.swap_remove(rng.gen_range(0..live.len()));
            assert_eq!(f.delete_site(s.id).unwrap(), own_cell(&s));
        }
    }
    for s in &live {
        for c in neighborhood(own_cell(s), K).unwrap() {
            assert!(f.contains(c), "{c:?} missing around {}", s.id);
        }
    }
    // Recount subtree sizes from scratch.
    for node in f.nodes() {
        let below = live.iter().filter(|s| node.cell.contains_cell(&own_cell(s))).count();
        assert_eq!(node.subtree_sites, below, "{:?}", node.cell);
    }
    f.check_invariants().unwrap();
}

#[test]
fn second_site_in_a_cell_creates_nothing() {
    let mut f = QuadForest::new(3, K).unwrap();
    assert!(!f.insert_site(&Site::at(1, 0.1, 0.1, 1.0)).unwrap().is_empty());
    assert!(f.insert_site(&Site::at(2, 0.2, 0.1, 1.0)).unwrap().is_empty());
}

fn random_tree(seed: u64, n: u64, spread: f64, max_r: f64) -> (Vec<Site>, CompressedQuadtree) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sites: Vec<Site> = (0..n)
        .map(|i| {
            let r = rng.gen_range(0.0..max_r.log2().max(1e-9)).exp2();
            Site::at(i, rng.gen_range(0.0..spread), rng.gen_range(0.0..spread), r)
        })
        .collect();
    let t = build_compressed(&sites, K).unwrap();
    (sites, t)
}

#[test]
fn compressed_nodes_nest_or_are_disjoint() {
    let (sites, t) = random_tree(1, 12, 1e5, 300.0);
    let cells: Vec<CellId> = t.cells().collect();
    for (i, a) in cells.iter().enumerate() {
        for b in &cells[i + 1..] {
            let overlap = a.rect().dist_to_rect(&b.rect()) == 0.0
                && a.rect().x0.max(b.rect().x0) < a.rect().x1.min(b.rect().x1)
                && a.rect().y0.max(b.rect().y0) < a.rect().y1.min(b.rect().y1);
            assert!(!overlap || a.contains_cell(b) || b.contains_cell(a), "{a:?} {b:?}");
        }
    }
    for s in &sites {
        assert_eq!(t.cell_of_site(s.id), Some(own_cell(s)));
        for c in neighborhood(own_cell(s), K).unwrap() {
            assert!(t.contains(c));
        }
    }
}

#[test]
fn compressed_size_is_spread_independent() {
    // Collinear sites with exponentially growing gaps.
    let n = 40u64;
    let mut ratios = Vec::new();
    for exp in [4u32, 10, 20, 30, 40] {
        let base = 2f64.powi(exp as i32).powf(1.0 / n as f64);
        let sites: Vec<Site> = (0..n).map(|i| Site::at(i, base.powi(i as i32) * 3.0, 3.0, 1.0)).collect();
        let t = build_compressed(&sites, K).unwrap();
        assert!(t.cell_count() <= 2 * (K * K) as usize * n as usize);
        ratios.push(t.cell_count() as f64 / n as f64);
    }
    // Small spreads share neighborhood cells; once they stop overlapping the
    // count per site stays flat however far apart the sites are.
    let (lo, hi) = ratios[1..].iter().fold((f64::MAX, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
    assert!(hi <= 2.0 * lo, "node ratios {ratios:?}");
}

#[test]
fn heavy_paths_partition_and_bound_light_edges() {
    let (_, t) = random_tree(2, 300, 5e4, 200.0);
    let mut seen = BTreeSet::new();
    for p in t.heavy_paths() {
        for w in p.cells.windows(2) {
            assert_eq!(t.parent(w[0]).unwrap(), Some(w[1]));
        }
        assert_eq!(t.parent(*p.cells.last().unwrap()).unwrap(), p.parent);
        for c in &p.cells {
            assert!(seen.insert(*c), "{c:?} on two heavy paths");
        }
    }
    assert_eq!(seen.len(), t.cell_count());
    let bound = (t.cell_count() as f64).log2().floor() as usize + 1;
    for leaf in t.cells().filter(|c| t.children(*c).unwrap().is_empty()) {
        let path = t.root_path(leaf).unwrap();
        let light = path.iter().map(|c| t.path_position(*c).unwrap().0).collect::<Vec<_>>().windows(2).filter(|w| w[0] != w[1]).count();
        assert!(light <= bound, "{light} light edges above {leaf:?}");
    }
}

fn check_decomposition(t: &CompressedQuadtree, cell: CellId) -> usize {
    let pieces = t.decompose_root_path(cell).unwrap();
    let mut union = Vec::new();
    for id in &pieces {
        let cp = t.canonical(*id);
        let cells = t.canonical_cells(*id);
        assert_eq!((cells[0], *cells.last().unwrap()), (cp.smallest, cp.largest));
        assert!(cp.largest.contains_cell(&cp.smallest));
        union.extend_from_slice(cells);
    }
    let mut path = t.root_path(cell).unwrap();
    let distinct: BTreeSet<CellId> = union.iter().copied().collect();
    assert_eq!(distinct.len(), union.len(), "pieces overlap");
    union.sort();
    path.sort();
    assert_eq!(union, path);
    pieces.len()
}

#[test]
fn root_path_decomposition_is_exact() {
    for seed in 0..4 {
        let (_, t) = random_tree(seed, 150, 1e6, 1e3);
        assert_eq!(check_decomposition(&t, t.root()), 1);
        let log = (t.cell_count() as f64).log2().ceil();
        let mut worst = 0;
        for c in t.cells() {
            worst = worst.max(check_decomposition(&t, c));
        }
        assert!(worst as f64 <= 2.0 * log * log, "{worst} pieces");
        assert!(t.decompose_root_path(CellId::new(0, 1 << 40, 0)).is_err());
    }
}

#[test]
fn canonical_paths_enumerate_balanced_tree_nodes() {
    let (_, t) = random_tree(9, 50, 1e4, 50.0);
    let all = t.canonical_paths();
    let expected: usize = t.heavy_paths().iter().map(|p| 2 * p.cells.len() - 1).sum();
    assert_eq!(all.len(), expected);
    for c in t.cells() {
        for id in t.canonical_paths_containing(c).unwrap() {
            assert!(all.contains(&id));
            assert!(t.canonical_cells(id).contains(&c));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn forest_insert_delete_restores_counts(seed in 0u64..1000, n in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = QuadForest::for_radius_bound(8.0, K).unwrap();
        let sites: Vec<Site> = (0..n as u64)
            .map(|i| Site::at(i, rng.gen_range(0.0..60.0), rng.gen_range(0.0..60.0), rng.gen_range(1.0..8.0)))
            .collect();
        for s in &sites {
            f.insert_site(s).unwrap();
        }
        for s in &sites {
            f.delete_site(s.id).unwrap();
        }
        prop_assert!(f.nodes().all(|n| n.subtree_sites == 0 && n.sites.is_empty()));
        prop_assert!(f.delete_site(SiteId(0)).is_err());
    }
}
