//! Rooted truncations of the universal covering tree of an edge-indexed graph.
//!
//! Every vertex carries a covering type (a vertex of the base graph) and a
//! coloring of its incident edges by `{1..deg}`. At a vertex of type `q` the
//! edges lying over the base dart `d` take the contiguous block of colors
//! assigned to `d` (blocks follow the declaration order of the darts at `q`).
//! Inside its block, the edge towards the parent takes the position it has in
//! the parent's block, reduced modulo the block length; the children then fill
//! the remaining colors in increasing order. When both indices of an edge are
//! equal this makes the color of every edge the same at both ends.

use std::sync::Arc;

use crate::eig::EdgeIndexedGraph;
use crate::error::{domain, Error, Result};

pub type VertexId = u32;

/// Marker for "no vertex" in adjacency tables.
pub const NONE: VertexId = u32::MAX;

/// Default cap on the number of tree vertices.
pub const DEFAULT_VERTEX_CAP: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub dart: usize,
    pub start: usize,
    pub len: usize,
}

/// Per-type color blocks derived from a base graph.
#[derive(Clone, Debug)]
pub struct ColorLayout {
    blocks: Vec<Vec<Block>>,
    color_dart: Vec<Vec<usize>>,
    child_type: Vec<Vec<u32>>,
    child_in_color: Vec<Vec<u8>>,
}

impl ColorLayout {
    pub fn new(base: &EdgeIndexedGraph) -> Self {
        let n = base.vertex_count();
        let darts = base.darts();
        let mut blocks = vec![Vec::new(); n];
        let mut color_dart = vec![Vec::new(); n];
        for (q, (bl, cd)) in blocks.iter_mut().zip(color_dart.iter_mut()).enumerate() {
            let mut start = 0;
            for d in base.darts_at(q) {
                let len = darts[d].index as usize;
                bl.push(Block { dart: d, start, len });
                cd.extend(std::iter::repeat_n(d, len));
                start += len;
            }
        }
        let block_of = |q: usize, d: usize| blocks[q].iter().find(|b| b.dart == d).unwrap().clone();
        let mut child_type = vec![Vec::new(); n];
        let mut child_in_color = vec![Vec::new(); n];
        for q in 0..n {
            for (c, &d) in color_dart[q].iter().enumerate() {
                let t = darts[d].target;
                let own = block_of(q, d);
                let rev = block_of(t, darts[d].reverse);
                child_type[q].push(t as u32);
                child_in_color[q].push((rev.start + (c - own.start) % rev.len) as u8);
            }
        }
        ColorLayout {
            blocks,
            color_dart,
            child_type,
            child_in_color,
        }
    }

    pub fn degree(&self, q: usize) -> usize {
        self.color_dart[q].len()
    }

    pub fn blocks(&self, q: usize) -> &[Block] {
        &self.blocks[q]
    }

    /// Base dart under the 0-based color `c` at type `q`.
    pub fn dart_of(&self, q: usize, c: usize) -> usize {
        self.color_dart[q][c]
    }

    /// Type of the neighbor across color `c` at type `q`.
    #[inline]
    pub fn child_type(&self, q: usize, c: usize) -> usize {
        self.child_type[q][c] as usize
    }

    /// 0-based color, at a child reached across color `c`, of the edge back.
    #[inline]
    pub fn child_in_color(&self, q: usize, c: usize) -> usize {
        self.child_in_color[q][c] as usize
    }

    pub fn type_count(&self) -> usize {
        self.blocks.len()
    }
}

/// A breadth-first truncation `B(root, radius)` of the covering tree.
#[derive(Clone, Debug)]
pub struct TreeBall {
    base: Arc<EdgeIndexedGraph>,
    layout: Arc<ColorLayout>,
    root_type: usize,
    radius: u32,
    ty: Vec<u32>,
    depth: Vec<u32>,
    parent: Vec<VertexId>,
    parent_color: Vec<u8>,
    color_in_parent: Vec<u8>,
    adj_start: Vec<usize>,
    adj: Vec<VertexId>,
    sphere_start: Vec<usize>,
}

impl TreeBall {
    pub fn build(base: Arc<EdgeIndexedGraph>, root_type: usize, radius: u32) -> Result<Self> {
        Self::build_capped(base, root_type, radius, DEFAULT_VERTEX_CAP)
    }

    pub fn build_capped(
        base: Arc<EdgeIndexedGraph>,
        root_type: usize,
        radius: u32,
        cap: u64,
    ) -> Result<Self> {
        if let Err(d) = base.validate() {
            return domain(format!("invalid base graph: {d}"));
        }
        if !base.is_connected() {
            return domain("base graph is disconnected");
        }
        if root_type >= base.vertex_count() {
            return domain(format!("root type {root_type} not in base graph"));
        }
        let estimate = estimate_size(&base, root_type, radius);
        if estimate > cap as f64 {
            return Err(Error::Capacity(format!(
                "tree ball of radius {radius} has about {estimate:.0} vertices (cap {cap})"
            )));
        }
        let layout = Arc::new(ColorLayout::new(&base));
        let mut t = TreeBall {
            base,
            layout,
            root_type,
            radius,
            ty: Vec::new(),
            depth: Vec::new(),
            parent: Vec::new(),
            parent_color: Vec::new(),
            color_in_parent: Vec::new(),
            adj_start: Vec::new(),
            adj: Vec::new(),
            sphere_start: vec![0],
        };
        t.push_vertex(root_type, 0, NONE, u8::MAX, u8::MAX);
        let mut i = 0;
        while i < t.ty.len() {
            let q = t.ty[i] as usize;
            let d = t.depth[i];
            if d < radius {
                for c in 0..t.layout.degree(q) {
                    if c as u8 == t.parent_color[i] {
                        continue;
                    }
                    let child_ty = t.layout.child_type(q, c);
                    let in_color = t.layout.child_in_color(q, c) as u8;
                    let u = t.push_vertex(child_ty, d + 1, i as VertexId, in_color, c as u8);
                    t.adj[t.adj_start[i] + c] = u;
                }
            }
            i += 1;
        }
        for r in 0..=radius {
            let end = t.depth.partition_point(|&d| d <= r);
            t.sphere_start.push(end);
        }
        Ok(t)
    }

    fn push_vertex(&mut self, q: usize, depth: u32, parent: VertexId, pc: u8, cip: u8) -> VertexId {
        let id = self.ty.len() as VertexId;
        self.ty.push(q as u32);
        self.depth.push(depth);
        self.parent.push(parent);
        self.parent_color.push(pc);
        self.color_in_parent.push(cip);
        self.adj_start.push(self.adj.len());
        let deg = self.layout.degree(q);
        self.adj.extend(std::iter::repeat_n(NONE, deg));
        if parent != NONE {
            let s = self.adj_start[id as usize] + pc as usize;
            self.adj[s] = parent;
        }
        id
    }

    pub fn base(&self) -> &Arc<EdgeIndexedGraph> {
        &self.base
    }

    pub fn layout(&self) -> &ColorLayout {
        &self.layout
    }

    pub fn root_type(&self) -> usize {
        self.root_type
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.ty.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ty.is_empty()
    }

    /// Number of vertices in `B(root, r)`; these are exactly the ids `0..ball_len(r)`.
    pub fn ball_len(&self, r: u32) -> usize {
        self.sphere_start[(r.min(self.radius) + 1) as usize]
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        self.sphere_start.windows(2).map(|w| w[1] - w[0]).collect()
    }

    #[inline]
    pub fn vertex_type(&self, v: VertexId) -> usize {
        self.ty[v as usize] as usize
    }

    #[inline]
    pub fn depth(&self, v: VertexId) -> u32 {
        self.depth[v as usize]
    }

    #[inline]
    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        let p = self.parent[v as usize];
        (p != NONE).then_some(p)
    }

    /// 0-based color at `v` of the edge to its parent.
    #[inline]
    pub fn parent_color(&self, v: VertexId) -> Option<usize> {
        let c = self.parent_color[v as usize];
        (c != u8::MAX).then_some(c as usize)
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.layout.degree(self.vertex_type(v))
    }

    /// Neighbor across the 0-based color `c`, or `None` beyond the truncation.
    #[inline]
    pub fn neighbor(&self, v: VertexId, c: usize) -> Option<VertexId> {
        let u = self.adj[self.adj_start[v as usize] + c];
        (u != NONE).then_some(u)
    }

    /// 0-based color at `v` of the edge `v – u`, if they are adjacent.
    #[inline]
    pub fn color_toward(&self, v: VertexId, u: VertexId) -> Option<usize> {
        if self.parent[v as usize] == u {
            self.parent_color(v)
        } else if self.parent[u as usize] == v {
            Some(self.color_in_parent[u as usize] as usize)
        } else {
            None
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        (v as usize) < self.ty.len()
    }

    pub fn distance(&self, u: VertexId, v: VertexId) -> Result<u32> {
        if !self.contains(u) || !self.contains(v) {
            return domain(format!("unknown vertex id in distance({u}, {v})"));
        }
        let (mut a, mut b) = (u, v);
        let mut dist = 0;
        while self.depth(a) > self.depth(b) {
            a = self.parent[a as usize];
            dist += 1;
        }
        while self.depth(b) > self.depth(a) {
            b = self.parent[b as usize];
            dist += 1;
        }
        while a != b {
            a = self.parent[a as usize];
            b = self.parent[b as usize];
            dist += 2;
        }
        Ok(dist)
    }

    /// `B(center, k)` in BFS order from `center` as `(vertex, towards, dist)`:
    /// `towards` is the neighbor one step closer to the center (`NONE` for the
    /// center itself). Vertices beyond the truncation are omitted.
    pub fn ball_around(&self, center: VertexId, k: u32) -> Vec<(VertexId, VertexId, u32)> {
        let mut out = vec![(center, NONE, 0)];
        let mut i = 0;
        while i < out.len() {
            let (v, prev, d) = out[i];
            if d < k {
                for c in 0..self.degree(v) {
                    if let Some(u) = self.neighbor(v, c) {
                        if u != prev {
                            out.push((u, v, d + 1));
                        }
                    }
                }
            }
            i += 1;
        }
        out
    }

    /// One line per vertex: id, type name, depth, parent, and `color:neighbor`
    /// pairs with 1-based colors (`*` for neighbors beyond the truncation).
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for v in 0..self.len() as VertexId {
            let name = &self.base.vertices()[self.vertex_type(v)].name;
            let parent = self.parent(v).map_or("-".to_string(), |p| p.to_string());
            let colors: Vec<String> = (0..self.degree(v))
                .map(|c| match self.neighbor(v, c) {
                    Some(u) => format!("{}:{u}", c + 1),
                    None => format!("{}:*", c + 1),
                })
                .collect();
            out.push_str(&format!(
                "{v} type={name} depth={} parent={parent} colors={}\n",
                self.depth(v),
                colors.join(",")
            ));
        }
        out
    }
}

/// Predicted vertex count of `B(root, radius)`, from per-dart index bookkeeping.
pub fn estimate_size(base: &EdgeIndexedGraph, root_type: usize, radius: u32) -> f64 {
    let darts = base.darts();
    // level[d] = number of vertices whose parent edge lies over dart d (at the vertex).
    let mut level = vec![0f64; darts.len()];
    let mut total = 1f64;
    for d in base.darts_at(root_type) {
        level[darts[d].reverse] += darts[d].index as f64;
    }
    for r in 1..=radius {
        let count: f64 = level.iter().sum();
        total += count;
        if r == radius || total > 1e18 {
            break;
        }
        let mut next = vec![0f64; darts.len()];
        for (e, &cnt) in level.iter().enumerate() {
            if cnt == 0.0 {
                continue;
            }
            let q = darts[e].origin;
            for d in base.darts_at(q) {
                let k = darts[d].index as f64 - if d == e { 1.0 } else { 0.0 };
                next[darts[d].reverse] += cnt * k;
            }
        }
        level = next;
    }
    total
}

/// Checks the covering invariant on every interior vertex: the edges over
/// each base dart number exactly its index. Used by tests.
pub fn covering_invariant_holds(t: &TreeBall) -> bool {
    let base = t.base();
    (0..t.len() as VertexId)
        .filter(|&v| t.depth(v) < t.radius())
        .all(|v| {
            let q = t.vertex_type(v);
            base.darts_at(q).all(|d| {
                let over = (0..t.degree(v))
                    .filter(|&c| t.layout().dart_of(q, c) == d)
                    .filter(|&c| {
                        t.neighbor(v, c)
                            .map(|u| t.vertex_type(u) == base.darts()[d].target)
                            .unwrap_or(false)
                    })
                    .count();
                over == base.darts()[d].index as usize
            })
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t3() -> Arc<EdgeIndexedGraph> {
        Arc::new(EdgeIndexedGraph::parse("v a color=0\nv b color=1\ne a b i12=3 i21=3\n").unwrap())
    }

    fn valency_one() -> Arc<EdgeIndexedGraph> {
        Arc::new(
            EdgeIndexedGraph::parse(
                "v a color=0\nv b color=1\nv c color=2\ne a b i12=3 i21=3\ne b c i12=5 i21=1\n",
            )
            .unwrap(),
        )
    }

    #[test]
    fn t3_spheres() {
        let t = TreeBall::build(t3(), 0, 2).unwrap();
        assert_eq!(t.sphere_sizes(), vec![1, 3, 6]);
        assert_eq!(t.len(), 10);
        let t = TreeBall::build(t3(), 0, 3).unwrap();
        assert_eq!(t.sphere_sizes(), vec![1, 3, 6, 12]);
        assert!(covering_invariant_holds(&t));
        assert_eq!(TreeBall::build(t3(), 1, 0).unwrap().sphere_sizes(), vec![1]);
    }

    #[test]
    fn valency_one_ball() {
        let base = valency_one();
        let t = TreeBall::build(base.clone(), 1, 1).unwrap();
        assert_eq!(t.degree(0), 8);
        let kinds: Vec<_> = (1..9).map(|v| t.vertex_type(v)).collect();
        assert_eq!(kinds, vec![0, 0, 0, 2, 2, 2, 2, 2]);
        let t = TreeBall::build(base, 1, 2).unwrap();
        assert_eq!(t.sphere_sizes(), vec![1, 8, 6]);
        assert!(covering_invariant_holds(&t));
    }

    #[test]
    fn distances() {
        let t = TreeBall::build(t3(), 0, 3).unwrap();
        assert_eq!(t.distance(0, 0).unwrap(), 0);
        for v in t.ball_len(1) as u32..t.ball_len(2) as u32 {
            assert_eq!(t.distance(0, v).unwrap(), 2);
        }
        assert_eq!(t.distance(1, 2).unwrap(), 2);
        assert!(t.distance(0, 10_000).is_err());
    }

    #[test]
    fn symmetric_colors_on_equal_indices() {
        let t = TreeBall::build(t3(), 0, 3).unwrap();
        for v in 1..t.len() as u32 {
            let p = t.parent(v).unwrap();
            assert_eq!(t.color_toward(v, p), t.color_toward(p, v));
        }
    }

    #[test]
    fn deterministic_dump() {
        let a = TreeBall::build(valency_one(), 0, 3).unwrap().dump();
        let b = TreeBall::build(valency_one(), 0, 3).unwrap().dump();
        assert_eq!(a, b);
        assert!(a.starts_with("0 type=a depth=0 parent=- colors=1:1,2:2,3:3\n"));
    }

    #[test]
    fn capacity_refusal() {
        assert!(matches!(
            TreeBall::build_capped(t3(), 0, 30, 1000),
            Err(Error::Capacity(_))
        ));
        assert_eq!(estimate_size(&t3(), 0, 3), 22.0);
    }
}
