//! Lower envelopes of congruent lower circular arcs under vertical ray
//! shooting from below.
//!
//! Each curve is the lower half of a circle of a common radius `R`, extended
//! upward to `+∞` outside `[cx - R, cx + R]`. For congruent arcs the
//! difference of two curves is monotone on their common support, so in
//! `(cx, owner)` order the envelope visits curves left to right and any two
//! key-ordered groups swap dominance at most once. [`EnvelopeTree`] stores
//! that swap point at every node of a treap.

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::geometry::SiteId;
use crate::util::{from_ordered_key, ordered_key};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvelopeError {
    #[error("curve for owner {0} is already present")]
    DuplicateOwner(SiteId),
    #[error("no curve for owner {0}")]
    UnknownOwner(SiteId),
    #[error("curve radius {got} differs from the envelope radius {expected}")]
    RadiusMismatch { expected: f64, got: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcCurve {
    pub owner: SiteId,
    pub cx: f64,
    pub cy: f64,
    pub radius: f64,
}

impl ArcCurve {
    pub fn new(owner: SiteId, cx: f64, cy: f64, radius: f64) -> Self {
        Self { owner, cx, cy, radius }
    }

    /// Height at `x`, or `None` for `+∞`.
    pub fn value(&self, x: f64) -> Option<f64> {
        let dx = x - self.cx;
        if dx.abs() > self.radius {
            return None;
        }
        Some(self.cy - (self.radius * self.radius - dx * dx).max(0.0).sqrt())
    }
}

/// Result of a ray shot: the lowest curve and its height.
pub type Hit = (SiteId, f64);

pub trait LowerEnvelope {
    fn insert(&mut self, curve: ArcCurve) -> Result<(), EnvelopeError>;
    fn delete(&mut self, owner: SiteId) -> Result<ArcCurve, EnvelopeError>;
    /// Lowest curve at `x`; ties go to the smallest owner.
    fn ray_shoot(&self, x: f64) -> Option<Hit>;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `a` beats `b` when strictly lower, or equally low with a smaller owner.
/// `None` is `+∞`.
fn beats(a: Option<Hit>, b: Option<Hit>) -> bool {
    match (a, b) {
        (Some((oa, va)), Some((ob, vb))) => va < vb || (va == vb && oa < ob),
        (Some(_), None) => true,
        (None, Some(_)) => false,
        (None, None) => true,
    }
}

fn eval_curve(c: &ArcCurve, x: f64) -> Option<Hit> {
    c.value(x).map(|v| (c.owner, v))
}

/// Reference implementation: scans every curve.
#[derive(Debug, Clone, Default)]
pub struct ScanEnvelope {
    curves: FxHashMap<SiteId, ArcCurve>,
}

impl ScanEnvelope {
    pub fn new() -> Self {
        Self::default()
    }
}

impl LowerEnvelope for ScanEnvelope {
    fn insert(&mut self, curve: ArcCurve) -> Result<(), EnvelopeError> {
        if self.curves.contains_key(&curve.owner) {
            return Err(EnvelopeError::DuplicateOwner(curve.owner));
        }
        self.curves.insert(curve.owner, curve);
        Ok(())
    }

    fn delete(&mut self, owner: SiteId) -> Result<ArcCurve, EnvelopeError> {
        self.curves.remove(&owner).ok_or(EnvelopeError::UnknownOwner(owner))
    }

    fn ray_shoot(&self, x: f64) -> Option<Hit> {
        let mut best = None;
        for c in self.curves.values() {
            let h = eval_curve(c, x);
            if h.is_some() && beats(h, best) {
                best = h;
            }
        }
        best
    }

    fn len(&self) -> usize {
        self.curves.len()
    }
}

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct TNode {
    curve: ArcCurve,
    prio: u64,
    left: u32,
    right: u32,
    min_cx: f64,
    max_cx: f64,
    /// Queries with `x <= t_left` are answered in the left subtree.
    t_left: f64,
    /// Otherwise queries with `x <= t_right` are answered by this node's
    /// curve, the rest in the right subtree.
    t_right: f64,
}

/// Treap over curves in `(cx, owner)` order. Each node keeps the swap point
/// between its left subtree and the rest, and between its own curve and its
/// right subtree, so a query follows one root-leaf path. Updates recompute
/// the swap points on the touched path by bisection over the float order.
#[derive(Debug, Clone)]
pub struct EnvelopeTree {
    radius: f64,
    nodes: Vec<TNode>,
    free: Vec<u32>,
    root: u32,
    by_owner: FxHashMap<SiteId, u32>,
}

fn priority(owner: SiteId) -> u64 {
    // splitmix64 finalizer
    let mut z = owner.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl EnvelopeTree {
    pub fn new(radius: f64) -> Self {
        Self { radius, nodes: Vec::new(), free: Vec::new(), root: NIL, by_owner: FxHashMap::default() }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn key_less(a: &ArcCurve, b: &ArcCurve) -> bool {
        a.cx.total_cmp(&b.cx).then(a.owner.cmp(&b.owner)).is_lt()
    }

    fn eval(&self, mut cur: u32, x: f64) -> Option<Hit> {
        loop {
            let n = &self.nodes[cur as usize];
            if n.left != NIL && x <= n.t_left {
                cur = n.left;
            } else if n.right != NIL && x > n.t_right {
                cur = n.right;
            } else {
                return eval_curve(&n.curve, x);
            }
        }
    }

    fn eval_self_and_right(&self, t: u32, x: f64) -> Option<Hit> {
        let n = &self.nodes[t as usize];
        if n.right != NIL && x > n.t_right {
            self.eval(n.right, x)
        } else {
            eval_curve(&n.curve, x)
        }
    }

    /// Largest `x` at which the left group still wins. Left wins for
    /// `x < lo` (right group all infinite) and loses for `x > hi`.
    fn swap_point(&self, lo: f64, hi: f64, left_wins: impl Fn(f64) -> bool) -> f64 {
        if lo > hi || !left_wins(lo) {
            return lo.next_down();
        }
        let (mut a, mut b) = (ordered_key(lo) as i128, ordered_key(hi) as i128);
        if left_wins(hi) {
            return hi;
        }
        // invariant: wins at a, loses at b
        while b - a > 1 {
            let m = a + (b - a) / 2;
            if left_wins(from_ordered_key(m as i64)) {
                a = m;
            } else {
                b = m;
            }
        }
        from_ordered_key(a as i64)
    }

    fn update(&mut self, t: u32) {
        let (left, right, cx) = {
            let n = &self.nodes[t as usize];
            (n.left, n.right, n.curve.cx)
        };
        let min_cx = if left != NIL { self.nodes[left as usize].min_cx } else { cx };
        let max_cx = if right != NIL { self.nodes[right as usize].max_cx } else { cx };
        let r = self.radius;
        let t_right = if right != NIL {
            let curve = self.nodes[t as usize].curve;
            let lo = self.nodes[right as usize].min_cx - r;
            self.swap_point(lo, cx + r, |x| beats(eval_curve(&curve, x), self.eval(right, x)))
        } else {
            f64::INFINITY
        };
        {
            let n = &mut self.nodes[t as usize];
            n.min_cx = min_cx;
            n.max_cx = max_cx;
            n.t_right = t_right;
        }
        let t_left = if left != NIL {
            let hi = self.nodes[left as usize].max_cx + r;
            self.swap_point(cx - r, hi, |x| beats(self.eval(left, x), self.eval_self_and_right(t, x)))
        } else {
            f64::NEG_INFINITY
        };
        self.nodes[t as usize].t_left = t_left;
    }

    fn rotate_right(&mut self, t: u32) -> u32 {
        let l = self.nodes[t as usize].left;
        self.nodes[t as usize].left = self.nodes[l as usize].right;
        self.nodes[l as usize].right = t;
        self.update(t);
        self.update(l);
        l
    }

    fn rotate_left(&mut self, t: u32) -> u32 {
        let r = self.nodes[t as usize].right;
        self.nodes[t as usize].right = self.nodes[r as usize].left;
        self.nodes[r as usize].left = t;
        self.update(t);
        self.update(r);
        r
    }

    fn insert_at(&mut self, t: u32, n: u32) -> u32 {
        if t == NIL {
            self.update(n);
            return n;
        }
        if Self::key_less(&self.nodes[n as usize].curve, &self.nodes[t as usize].curve) {
            let l = self.insert_at(self.nodes[t as usize].left, n);
            self.nodes[t as usize].left = l;
            if self.nodes[l as usize].prio > self.nodes[t as usize].prio {
                return self.rotate_right(t);
            }
        } else {
            let r = self.insert_at(self.nodes[t as usize].right, n);
            self.nodes[t as usize].right = r;
            if self.nodes[r as usize].prio > self.nodes[t as usize].prio {
                return self.rotate_left(t);
            }
        }
        self.update(t);
        t
    }

    fn delete_at(&mut self, t: u32, target: u32) -> u32 {
        debug_assert!(t != NIL);
        if t == target {
            let (l, r) = (self.nodes[t as usize].left, self.nodes[t as usize].right);
            if l == NIL {
                return r;
            }
            if r == NIL {
                return l;
            }
            if self.nodes[l as usize].prio > self.nodes[r as usize].prio {
                let top = self.rotate_right(t);
                let sub = self.delete_at(t, target);
                self.nodes[top as usize].right = sub;
                self.update(top);
                return top;
            }
            let top = self.rotate_left(t);
            let sub = self.delete_at(t, target);
            self.nodes[top as usize].left = sub;
            self.update(top);
            return top;
        }
        if Self::key_less(&self.nodes[target as usize].curve, &self.nodes[t as usize].curve) {
            let l = self.delete_at(self.nodes[t as usize].left, target);
            self.nodes[t as usize].left = l;
        } else {
            let r = self.delete_at(self.nodes[t as usize].right, target);
            self.nodes[t as usize].right = r;
        }
        self.update(t);
        t
    }

    /// Height of the subtree in nodes; used by tests.
    pub fn depth(&self) -> usize {
        fn go(tree: &EnvelopeTree, t: u32) -> usize {
            if t == NIL {
                0
            } else {
                let n = &tree.nodes[t as usize];
                1 + go(tree, n.left).max(go(tree, n.right))
            }
        }
        go(self, self.root)
    }
}

impl LowerEnvelope for EnvelopeTree {
    fn insert(&mut self, curve: ArcCurve) -> Result<(), EnvelopeError> {
        if curve.radius != self.radius {
            return Err(EnvelopeError::RadiusMismatch { expected: self.radius, got: curve.radius });
        }
        if self.by_owner.contains_key(&curve.owner) {
            return Err(EnvelopeError::DuplicateOwner(curve.owner));
        }
        let node = TNode {
            curve,
            prio: priority(curve.owner),
            left: NIL,
            right: NIL,
            min_cx: curve.cx,
            max_cx: curve.cx,
            t_left: f64::NEG_INFINITY,
            t_right: f64::INFINITY,
        };
        let idx = match self.free.pop() {
            Some(i) => {
                self.nodes[i as usize] = node;
                i
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as u32
            }
        };
        self.by_owner.insert(curve.owner, idx);
        self.root = self.insert_at(self.root, idx);
        Ok(())
    }

    fn delete(&mut self, owner: SiteId) -> Result<ArcCurve, EnvelopeError> {
        let idx = self.by_owner.remove(&owner).ok_or(EnvelopeError::UnknownOwner(owner))?;
        self.root = self.delete_at(self.root, idx);
        self.free.push(idx);
        Ok(self.nodes[idx as usize].curve)
    }

    fn ray_shoot(&self, x: f64) -> Option<Hit> {
        if self.root == NIL {
            return None;
        }
        self.eval(self.root, x)
    }

    fn len(&self) -> usize {
        self.by_owner.len()
    }
}
