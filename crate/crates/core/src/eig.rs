//! Finite edge-indexed graphs.
//!
//! An edge-indexed graph is a finite multigraph whose oriented edges ("darts")
//! carry a positive index: the number of edges lying over that dart at any
//! lift of its origin in the universal covering tree. It is both the input
//! from which trees are built and the output of quotient computations.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{domain, Error, Result};

/// Isomorphism search refuses graphs with more vertices than this.
pub const MAX_ISO_VERTICES: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub color: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dart {
    pub origin: usize,
    pub target: usize,
    pub index: u32,
    pub reverse: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeIndexedGraph {
    vertices: Vec<Vertex>,
    darts: Vec<Dart>,
}

/// First violated invariant found by [`EdgeIndexedGraph::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    ZeroIndex { dart: usize },
    BrokenReversal { dart: usize },
    EndpointMismatch { dart: usize },
    VertexOutOfRange { dart: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::ZeroIndex { dart } => write!(f, "index must be ≥ 1 (dart {dart})"),
            Diagnostic::BrokenReversal { dart } => {
                write!(f, "reversal involution broken (dart {dart})")
            }
            Diagnostic::EndpointMismatch { dart } => {
                write!(f, "endpoints inconsistent under reversal (dart {dart})")
            }
            Diagnostic::VertexOutOfRange { dart } => {
                write!(f, "dart {dart} references an unknown vertex")
            }
        }
    }
}

impl EdgeIndexedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assembles a graph without checking any invariant; see [`Self::validate`].
    pub fn from_raw_parts(vertices: Vec<Vertex>, darts: Vec<Dart>) -> Self {
        EdgeIndexedGraph { vertices, darts }
    }

    pub fn add_vertex(&mut self, name: impl Into<String>, color: u32) -> usize {
        self.vertices.push(Vertex {
            name: name.into(),
            color,
        });
        self.vertices.len() - 1
    }

    /// Adds the geometric edge `u – v` with index `i_uv` on the dart `u → v`
    /// and `i_vu` on its reverse. For a loop (`u == v`) the two darts are the
    /// `+` and `-` orientations. Returns the id of the first dart.
    pub fn add_edge(&mut self, u: usize, v: usize, i_uv: u32, i_vu: u32) -> usize {
        let d = self.darts.len();
        self.darts.push(Dart {
            origin: u,
            target: v,
            index: i_uv,
            reverse: d + 1,
        });
        self.darts.push(Dart {
            origin: v,
            target: u,
            index: i_vu,
            reverse: d,
        });
        d
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn darts(&self) -> &[Dart] {
        &self.darts
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.name == name)
    }

    /// Darts originating at `q`, in declaration order.
    pub fn darts_at(&self, q: usize) -> impl Iterator<Item = usize> + '_ {
        self.darts
            .iter()
            .enumerate()
            .filter(move |(_, d)| d.origin == q)
            .map(|(i, _)| i)
    }

    /// Degree of any lift of `q` in the covering tree.
    pub fn upstairs_degree(&self, q: usize) -> usize {
        self.darts_at(q).map(|d| self.darts[d].index as usize).sum()
    }

    pub fn validate(&self) -> std::result::Result<(), Diagnostic> {
        let n = self.vertices.len();
        for (i, d) in self.darts.iter().enumerate() {
            if d.origin >= n || d.target >= n {
                return Err(Diagnostic::VertexOutOfRange { dart: i });
            }
            if d.index == 0 {
                return Err(Diagnostic::ZeroIndex { dart: i });
            }
            if d.reverse >= self.darts.len()
                || d.reverse == i
                || self.darts[d.reverse].reverse != i
            {
                return Err(Diagnostic::BrokenReversal { dart: i });
            }
            let r = &self.darts[d.reverse];
            if r.origin != d.target || r.target != d.origin {
                return Err(Diagnostic::EndpointMismatch { dart: i });
            }
        }
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        self.bfs_distances(0).iter().all(|d| d.is_some())
    }

    fn bfs_distances(&self, from: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertices.len()];
        dist[from] = Some(0);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for d in self.darts_at(u) {
                let t = self.darts[d].target;
                if dist[t].is_none() {
                    dist[t] = Some(dist[u].unwrap() + 1);
                    queue.push_back(t);
                }
            }
        }
        dist
    }

    /// Vertex of minimal eccentricity (first one on ties).
    pub fn center(&self) -> Option<usize> {
        (0..self.vertices.len()).min_by_key(|&v| {
            self.bfs_distances(v)
                .iter()
                .map(|d| d.unwrap_or(usize::MAX))
                .max()
                .unwrap_or(0)
        })
    }

    pub fn eccentricity(&self, v: usize) -> usize {
        self.bfs_distances(v)
            .iter()
            .map(|d| d.unwrap_or(usize::MAX))
            .max()
            .unwrap_or(0)
    }

    /// Cycle-product test: along every closed dart path the product of the
    /// indices equals the product of the reverse indices.
    ///
    /// Ratios are propagated along a BFS spanning tree as exact rationals and
    /// compared across every remaining dart.
    pub fn is_unimodular(&self) -> Result<bool> {
        if !self.is_connected() {
            return domain("unimodularity test needs a connected graph");
        }
        if let Err(diag) = self.validate() {
            return domain(diag.to_string());
        }
        if self.vertices.is_empty() {
            return Ok(true);
        }
        let mut potential: Vec<Option<BigRational>> = vec![None; self.vertices.len()];
        potential[0] = Some(BigRational::from_integer(BigInt::from(1)));
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for d in self.darts_at(u) {
                let dart = self.darts[d];
                let ratio = BigRational::new(
                    BigInt::from(dart.index),
                    BigInt::from(self.darts[dart.reverse].index),
                );
                let value = potential[u].clone().unwrap() * ratio;
                match &potential[dart.target] {
                    None => {
                        potential[dart.target] = Some(value);
                        queue.push_back(dart.target);
                    }
                    Some(existing) => {
                        if *existing != value {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Multiset of `(index, reverse index)` per ordered vertex pair.
    fn signature(&self) -> BTreeMap<(usize, usize), Vec<(u32, u32)>> {
        let mut sig: BTreeMap<(usize, usize), Vec<(u32, u32)>> = BTreeMap::new();
        for d in &self.darts {
            sig.entry((d.origin, d.target))
                .or_default()
                .push((d.index, self.darts[d.reverse].index));
        }
        for v in sig.values_mut() {
            v.sort_unstable();
        }
        sig
    }

    /// Serializes to the line format read by [`EdgeIndexedGraph::parse`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parses `v <id> color=<c>` and `e <id1> <id2> i12=<n> i21=<m>` lines
    /// (`e <id> <id> i+=<n> i-=<m>` for loops). `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut g = EdgeIndexedGraph::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse(format!("line {}: {msg}: {raw:?}", lineno + 1));
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "v" => {
                    if toks.len() != 3 {
                        return Err(err("expected `v <id> color=<c>`"));
                    }
                    let color = toks[2]
                        .strip_prefix("color=")
                        .and_then(|c| c.parse().ok())
                        .ok_or_else(|| err("bad color"))?;
                    if g.vertex_by_name(toks[1]).is_some() {
                        return Err(err("duplicate vertex"));
                    }
                    g.add_vertex(toks[1], color);
                }
                "e" => {
                    if toks.len() != 5 {
                        return Err(err("expected `e <id1> <id2> i12=<n> i21=<m>`"));
                    }
                    let u = g.vertex_by_name(toks[1]).ok_or_else(|| err("unknown vertex"))?;
                    let v = g.vertex_by_name(toks[2]).ok_or_else(|| err("unknown vertex"))?;
                    let (k1, k2) = if u == v { ("i+=", "i-=") } else { ("i12=", "i21=") };
                    let a = toks[3]
                        .strip_prefix(k1)
                        .and_then(|x| x.parse().ok())
                        .ok_or_else(|| err(&format!("expected {k1}<n>")))?;
                    let b = toks[4]
                        .strip_prefix(k2)
                        .and_then(|x| x.parse().ok())
                        .ok_or_else(|| err(&format!("expected {k2}<m>")))?;
                    g.add_edge(u, v, a, b);
                }
                _ => return Err(err("unknown record")),
            }
        }
        Ok(g)
    }

    /// Graphviz rendering: colors as node labels, indices as tail/head labels.
    pub fn export_dot(&self) -> String {
        let mut out = String::from("graph eig {\n");
        for v in &self.vertices {
            out.push_str(&format!("  \"{}\" [label=\"{}\"];\n", v.name, v.color));
        }
        for (i, d) in self.darts.iter().enumerate() {
            if d.reverse < i {
                continue;
            }
            let r = &self.darts[d.reverse];
            out.push_str(&format!(
                "  \"{}\" -- \"{}\" [taillabel=\"{}\", headlabel=\"{}\"];\n",
                self.vertices[d.origin].name, self.vertices[d.target].name, d.index, r.index
            ));
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for EdgeIndexedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vertices {
            writeln!(f, "v {} color={}", v.name, v.color)?;
        }
        for (i, d) in self.darts.iter().enumerate() {
            if d.reverse < i {
                continue;
            }
            let r = &self.darts[d.reverse];
            let (a, b) = (&self.vertices[d.origin].name, &self.vertices[d.target].name);
            if d.origin == d.target {
                writeln!(f, "e {a} {b} i+={} i-={}", d.index, r.index)?;
            } else {
                writeln!(f, "e {a} {b} i12={} i21={}", d.index, r.index)?;
            }
        }
        Ok(())
    }
}

/// Whether a color-, index- and incidence-preserving bijection exists.
///
/// Backtracks over vertex bijections; for a fixed vertex bijection a dart
/// bijection exists iff the `(index, reverse index)` multisets agree on every
/// ordered vertex pair.
pub fn eig_isomorphic(a: &EdgeIndexedGraph, b: &EdgeIndexedGraph) -> Result<bool> {
    let n = a.vertex_count();
    if n > MAX_ISO_VERTICES || b.vertex_count() > MAX_ISO_VERTICES {
        return Err(Error::Capacity(format!(
            "isomorphism search limited to {MAX_ISO_VERTICES} vertices"
        )));
    }
    if n != b.vertex_count() || a.darts.len() != b.darts.len() {
        return Ok(false);
    }
    let sa = a.signature();
    let sb = b.signature();
    let local = |g: &EdgeIndexedGraph, s: &BTreeMap<(usize, usize), Vec<(u32, u32)>>, v: usize| {
        let mut out: Vec<(u32, u32)> = s
            .iter()
            .filter(|((o, _), _)| *o == v)
            .flat_map(|(_, l)| l.iter().copied())
            .collect();
        out.sort_unstable();
        (g.vertices[v].color, out)
    };
    let la: Vec<_> = (0..n).map(|v| local(a, &sa, v)).collect();
    let lb: Vec<_> = (0..n).map(|v| local(b, &sb, v)).collect();
    let empty = Vec::new();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        i: usize,
        n: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        la: &[(u32, Vec<(u32, u32)>)],
        lb: &[(u32, Vec<(u32, u32)>)],
        sa: &BTreeMap<(usize, usize), Vec<(u32, u32)>>,
        sb: &BTreeMap<(usize, usize), Vec<(u32, u32)>>,
        empty: &Vec<(u32, u32)>,
    ) -> bool {
        if i == n {
            return true;
        }
        for j in 0..n {
            if used[j] || la[i] != lb[j] {
                continue;
            }
            map[i] = j;
            let consistent = (0..=i).all(|k| {
                let fwd = sa.get(&(i, k)).unwrap_or(empty) == sb.get(&(j, map[k])).unwrap_or(empty);
                let bwd = sa.get(&(k, i)).unwrap_or(empty) == sb.get(&(map[k], j)).unwrap_or(empty);
                fwd && bwd
            });
            if consistent {
                used[j] = true;
                if extend(i + 1, n, map, used, la, lb, sa, sb, empty) {
                    return true;
                }
                used[j] = false;
            }
        }
        map[i] = usize::MAX;
        false
    }

    Ok(extend(0, n, &mut map, &mut used, &la, &lb, &sa, &sb, &empty))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge(i: u32, j: u32) -> EdgeIndexedGraph {
        let mut g = EdgeIndexedGraph::new();
        let a = g.add_vertex("a", 0);
        let b = g.add_vertex("b", 1);
        g.add_edge(a, b, i, j);
        g
    }

    fn path() -> EdgeIndexedGraph {
        EdgeIndexedGraph::parse("v a color=0\nv b color=1\nv c color=2\ne a b i12=3 i21=3\ne b c i12=5 i21=1\n")
            .unwrap()
    }

    #[test]
    fn validation() {
        assert_eq!(single_edge(3, 3).validate(), Ok(()));
        let g = single_edge(0, 3);
        assert_eq!(g.validate().unwrap_err().to_string(), "index must be ≥ 1 (dart 0)");
        let mut darts = single_edge(3, 3).darts().to_vec();
        darts[1].reverse = 1;
        let g = EdgeIndexedGraph::from_raw_parts(single_edge(3, 3).vertices().to_vec(), darts);
        assert!(g.validate().unwrap_err().to_string().starts_with("reversal involution broken"));
    }

    #[test]
    fn unimodularity() {
        assert!(single_edge(3, 3).is_unimodular().unwrap());
        assert!(path().is_unimodular().unwrap());
        let mut loop_graph = EdgeIndexedGraph::new();
        let a = loop_graph.add_vertex("a", 0);
        loop_graph.add_edge(a, a, 1, 2);
        assert!(!loop_graph.is_unimodular().unwrap());
        let mut two = EdgeIndexedGraph::new();
        two.add_vertex("a", 0);
        two.add_vertex("b", 0);
        assert!(two.is_unimodular().is_err());
    }

    #[test]
    fn isomorphism() {
        let p = path();
        assert!(eig_isomorphic(&p, &p).unwrap());
        assert!(!eig_isomorphic(&single_edge(3, 3), &single_edge(3, 4)).unwrap());
        let relabeled = EdgeIndexedGraph::parse(
            "v z color=2\nv x color=0\nv y color=1\ne y z i12=5 i21=1\ne y x i12=3 i21=3\n",
        )
        .unwrap();
        assert!(eig_isomorphic(&p, &relabeled).unwrap());
    }

    #[test]
    fn text_round_trip() {
        let p = path();
        assert_eq!(EdgeIndexedGraph::parse(&p.to_text()).unwrap(), p);
        let mut l = EdgeIndexedGraph::new();
        let a = l.add_vertex("a", 0);
        l.add_edge(a, a, 1, 2);
        assert_eq!(l.to_text(), "v a color=0\ne a a i+=1 i-=2\n");
        assert_eq!(EdgeIndexedGraph::parse(&l.to_text()).unwrap(), l);
        assert!(EdgeIndexedGraph::parse("e a b i12=1 i21=1").is_err());
    }

    #[test]
    fn dot_export() {
        assert_eq!(EdgeIndexedGraph::new().export_dot(), "graph eig {\n}\n");
        let dot = single_edge(3, 3).export_dot();
        assert!(dot.contains("\"a\" -- \"b\" [taillabel=\"3\", headlabel=\"3\"]"));
        let mut l = EdgeIndexedGraph::new();
        let a = l.add_vertex("a", 0);
        l.add_edge(a, a, 1, 2);
        assert!(l.export_dot().contains("\"a\" -- \"a\" [taillabel=\"1\", headlabel=\"2\"]"));
    }

    #[test]
    fn degrees() {
        let p = path();
        let degs: Vec<_> = (0..3).map(|q| p.upstairs_degree(q)).collect();
        assert_eq!(degs, vec![3, 8, 1]);
        assert_eq!(p.center(), Some(1));
    }
}
