//! Euler-tour forests stored as splay trees over an index arena.
//!
//! Every vertex owns one node; a tree edge owns two arc nodes, one per
//! direction. A tree is the splay tree of a cyclic rotation of its tour.
//! Nodes carry two flag bits whose subtree OR is maintained so the first
//! flagged node of a tree is found in amortized logarithmic time.

pub(crate) const NIL: u32 = u32::MAX;

/// Vertex node: the vertex has non-tree edges at this forest's level.
pub(crate) const F_NONTREE: u8 = 1;
/// Arc node: the tree edge's level equals this forest's level.
pub(crate) const F_LEVEL_EDGE: u8 = 2;

#[derive(Debug, Clone)]
struct Node {
    parent: u32,
    left: u32,
    right: u32,
    /// Vertex nodes in this subtree.
    verts: u32,
    flags: u8,
    agg: u8,
    is_vertex: bool,
    /// Vertex id for vertex nodes, edge id for arcs.
    payload: u32,
}

#[derive(Debug, Default, Clone)]
pub(crate) struct EttArena {
    nodes: Vec<Node>,
    free: Vec<u32>,
}

impl EttArena {
    fn alloc(&mut self, is_vertex: bool, payload: u32) -> u32 {
        let node = Node {
            parent: NIL,
            left: NIL,
            right: NIL,
            verts: is_vertex as u32,
            flags: 0,
            agg: 0,
            is_vertex,
            payload,
        };
        if let Some(i) = self.free.pop() {
            self.nodes[i as usize] = node;
            i
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as u32
        }
    }

    pub(crate) fn new_vertex(&mut self, v: u32) -> u32 {
        self.alloc(true, v)
    }

    pub(crate) fn new_arc(&mut self, edge: u32) -> u32 {
        self.alloc(false, edge)
    }

    fn release(&mut self, x: u32) {
        debug_assert!(!self.nodes[x as usize].is_vertex);
        self.free.push(x);
    }

    pub(crate) fn payload(&self, x: u32) -> u32 {
        self.nodes[x as usize].payload
    }

    pub(crate) fn has_flag(&self, x: u32, flag: u8) -> bool {
        self.nodes[x as usize].flags & flag != 0
    }

    fn update(&mut self, x: u32) {
        let (l, r) = (self.nodes[x as usize].left, self.nodes[x as usize].right);
        let mut verts = self.nodes[x as usize].is_vertex as u32;
        let mut agg = self.nodes[x as usize].flags;
        if l != NIL {
            verts += self.nodes[l as usize].verts;
            agg |= self.nodes[l as usize].agg;
        }
        if r != NIL {
            verts += self.nodes[r as usize].verts;
            agg |= self.nodes[r as usize].agg;
        }
        let n = &mut self.nodes[x as usize];
        n.verts = verts;
        n.agg = agg;
    }

    fn is_root(&self, x: u32) -> bool {
        self.nodes[x as usize].parent == NIL
    }

    fn rotate(&mut self, x: u32) {
        let p = self.nodes[x as usize].parent;
        let g = self.nodes[p as usize].parent;
        if self.nodes[p as usize].left == x {
            let b = self.nodes[x as usize].right;
            self.nodes[p as usize].left = b;
            if b != NIL {
                self.nodes[b as usize].parent = p;
            }
            self.nodes[x as usize].right = p;
        } else {
            let b = self.nodes[x as usize].left;
            self.nodes[p as usize].right = b;
            if b != NIL {
                self.nodes[b as usize].parent = p;
            }
            self.nodes[x as usize].left = p;
        }
        self.nodes[p as usize].parent = x;
        self.nodes[x as usize].parent = g;
        if g != NIL {
            if self.nodes[g as usize].left == p {
                self.nodes[g as usize].left = x;
            } else {
                self.nodes[g as usize].right = x;
            }
        }
        self.update(p);
        self.update(x);
    }

    pub(crate) fn splay(&mut self, x: u32) {
        while !self.is_root(x) {
            let p = self.nodes[x as usize].parent;
            if !self.is_root(p) {
                let g = self.nodes[p as usize].parent;
                let zigzig = (self.nodes[g as usize].left == p) == (self.nodes[p as usize].left == x);
                if zigzig {
                    self.rotate(p);
                } else {
                    self.rotate(x);
                }
            }
            self.rotate(x);
        }
    }

    pub(crate) fn set_flag(&mut self, x: u32, flag: u8, on: bool) {
        self.splay(x);
        let n = &mut self.nodes[x as usize];
        if on {
            n.flags |= flag;
        } else {
            n.flags &= !flag;
        }
        self.update(x);
    }

    /// Number of vertices in the tree containing `x`.
    pub(crate) fn tree_size(&mut self, x: u32) -> u32 {
        self.splay(x);
        self.nodes[x as usize].verts
    }

    fn top(&self, mut x: u32) -> u32 {
        while self.nodes[x as usize].parent != NIL {
            x = self.nodes[x as usize].parent;
        }
        x
    }

    pub(crate) fn same_tree(&mut self, a: u32, b: u32) -> bool {
        if a == b {
            return true;
        }
        self.splay(a);
        let t = self.top(b);
        self.splay(b);
        t == a
    }

    fn join(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        let mut m = a;
        while self.nodes[m as usize].right != NIL {
            m = self.nodes[m as usize].right;
        }
        self.splay(m);
        self.nodes[m as usize].right = b;
        self.nodes[b as usize].parent = m;
        self.update(m);
        m
    }

    /// Splits off everything before `x`; returns (before, tree starting at x).
    fn split_before(&mut self, x: u32) -> (u32, u32) {
        self.splay(x);
        let l = self.nodes[x as usize].left;
        if l != NIL {
            self.nodes[l as usize].parent = NIL;
            self.nodes[x as usize].left = NIL;
            self.update(x);
        }
        (l, x)
    }

    /// Splits off everything after `x`; returns (tree ending at x, after).
    fn split_after(&mut self, x: u32) -> (u32, u32) {
        self.splay(x);
        let r = self.nodes[x as usize].right;
        if r != NIL {
            self.nodes[r as usize].parent = NIL;
            self.nodes[x as usize].right = NIL;
            self.update(x);
        }
        (x, r)
    }

    /// Rotates the tour of `v`'s tree so it starts at `v`.
    fn reroot(&mut self, v: u32) -> u32 {
        let (before, rest) = self.split_before(v);
        self.join(rest, before)
    }

    /// Links the trees of vertex nodes `u` and `v` through fresh arcs.
    pub(crate) fn link(&mut self, u: u32, v: u32, arc_uv: u32, arc_vu: u32) {
        let tu = self.reroot(u);
        let tv = self.reroot(v);
        let t = self.join(tu, arc_uv);
        let t = self.join(t, tv);
        self.join(t, arc_vu);
    }

    /// Removes the two arcs of one tree edge and frees them.
    pub(crate) fn cut(&mut self, a1: u32, a2: u32) {
        let (before, rest) = self.split_before(a1);
        let (_, after) = self.split_after(rest);
        let in_before = before != NIL && {
            let t = self.top(a2);
            self.splay(a2);
            t == before
        };
        if in_before {
            let (b1, rest) = self.split_before(a2);
            let (_, b2) = self.split_after(rest);
            // b2 is the detached subtree; b1 + after is the other side.
            let _ = b2;
            self.join(b1, after);
        } else {
            let (_, rest) = self.split_before(a2);
            let (_, a_after) = self.split_after(rest);
            self.join(before, a_after);
        }
        self.release(a1);
        self.release(a2);
    }

    /// First node in tour order of `x`'s tree carrying `flag`.
    pub(crate) fn find_flag(&mut self, x: u32, flag: u8) -> Option<u32> {
        self.splay(x);
        if self.nodes[x as usize].agg & flag == 0 {
            return None;
        }
        let mut cur = x;
        loop {
            let n = &self.nodes[cur as usize];
            if n.left != NIL && self.nodes[n.left as usize].agg & flag != 0 {
                cur = n.left;
            } else if n.flags & flag != 0 {
                break;
            } else {
                cur = n.right;
            }
        }
        self.splay(cur);
        Some(cur)
    }
}
