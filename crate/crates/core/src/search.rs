//! Backtracking enumeration of portraits, sphere by sphere.
//!
//! Vertices are expanded in id order; expanding `x` fixes the images of the
//! children of `x` by choosing a local action at `x` that sends the parent
//! color to the parent color of the image. Expansions below the output ball
//! only have to succeed once (existence phase).

use std::collections::{HashMap, HashSet};
use std::rc::Rc;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::permgrp::Permutation;
use crate::portrait::{local_action_of, Portrait};
use crate::spec::{GroupSpec, UniversalTables};
use crate::tree::{TreeBall, VertexId, NONE};

/// One side of an edge: the half-tree entered through the given color.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Side {
    /// A vertex of the ball, entered through a color of it.
    Tree(VertexId, u8),
    /// A vertex beyond the truncation, known by its type.
    Free(u32, u8),
}

/// Decides whether one half-tree maps onto another inside a universal group.
pub(crate) struct Ext<'a> {
    tree: &'a TreeBall,
    tables: &'a UniversalTables,
    memo: HashMap<(Side, Side), bool>,
}

impl<'a> Ext<'a> {
    pub fn new(tree: &'a TreeBall, tables: &'a UniversalTables) -> Self {
        Ext {
            tree,
            tables,
            memo: HashMap::new(),
        }
    }

    fn ty(&self, s: Side) -> usize {
        match s {
            Side::Tree(v, _) => self.tree.vertex_type(v),
            Side::Free(q, _) => q as usize,
        }
    }

    fn in_color(s: Side) -> usize {
        match s {
            Side::Tree(_, c) | Side::Free(_, c) => c as usize,
        }
    }

    fn is_pure(&self, s: Side) -> bool {
        match s {
            Side::Free(..) => true,
            Side::Tree(v, c) => self.tree.parent_color(v) == Some(c as usize),
        }
    }

    fn step(&self, s: Side, c: usize) -> Side {
        let l = &self.tables.layout;
        match s {
            Side::Tree(v, _) => match self.tree.neighbor(v, c) {
                Some(u) => Side::Tree(u, self.tree.color_toward(u, v).unwrap() as u8),
                None => {
                    let q = self.tree.vertex_type(v);
                    Side::Free(l.child_type(q, c) as u32, l.child_in_color(q, c) as u8)
                }
            },
            Side::Free(q, _) => {
                let q = q as usize;
                Side::Free(l.child_type(q, c) as u32, l.child_in_color(q, c) as u8)
            }
        }
    }

    pub fn extends(&mut self, a: Side, b: Side) -> bool {
        let q = self.ty(a);
        if self.ty(b) != q {
            return false;
        }
        let (s, t) = (Self::in_color(a), Self::in_color(b));
        if self.is_pure(a) && self.is_pure(b) {
            return self.tables.generic(q, s, t);
        }
        if let Some(&r) = self.memo.get(&(a, b)) {
            return r;
        }
        let table = &self.tables.local[q];
        let mut res = false;
        'outer: for &e in table.transporters(s, t) {
            let g = &table.elements[e as usize];
            for c in 0..table.degree {
                if c != s && !self.extends(self.step(a, c), self.step(b, g.apply0(c))) {
                    continue 'outer;
                }
            }
            res = true;
            break;
        }
        self.memo.insert((a, b), res);
        res
    }

    /// Whether some group element maps `u` to `v`, optionally sending color
    /// `pin.0` at `u` to color `pin.1` at `v`.
    pub fn transports(&mut self, u: VertexId, v: VertexId, pin: Option<(usize, usize)>) -> bool {
        let q = self.tree.vertex_type(u);
        if self.tree.vertex_type(v) != q {
            return false;
        }
        let table = &self.tables.local[q];
        'outer: for g in &table.elements {
            if let Some((c, d)) = pin {
                if g.apply0(c) != d {
                    continue;
                }
            }
            for c in 0..table.degree {
                let a = self.step(Side::Tree(u, u8::MAX), c);
                let b = self.step(Side::Tree(v, u8::MAX), g.apply0(c));
                if !self.extends(a, b) {
                    continue 'outer;
                }
            }
            return true;
        }
        false
    }
}

pub(crate) type Ball = Rc<Vec<(VertexId, VertexId, u32)>>;

/// Per-thread scratch state.
pub(crate) struct Ctx<'a> {
    pub ext: Ext<'a>,
    balls: HashMap<(VertexId, u32), Ball>,
}

impl<'a> Ctx<'a> {
    pub fn new(tree: &'a TreeBall, tables: &'a UniversalTables) -> Self {
        Ctx {
            ext: Ext::new(tree, tables),
            balls: HashMap::new(),
        }
    }

    fn ball(&mut self, tree: &TreeBall, v: VertexId, k: u32) -> Ball {
        self.balls
            .entry((v, k))
            .or_insert_with(|| Rc::new(tree.ball_around(v, k)))
            .clone()
    }
}

/// Restrictions of a fixed portrait set to balls `B(v,k)`.
pub(crate) struct ProfileSets {
    maps: Vec<Vec<VertexId>>,
    sets: Mutex<HashMap<(VertexId, u32), Arc<(Vec<VertexId>, HashSet<Vec<VertexId>>)>>>,
}

impl ProfileSets {
    pub fn new(maps: Vec<Vec<VertexId>>) -> Self {
        ProfileSets {
            maps,
            sets: Mutex::new(HashMap::new()),
        }
    }

    fn test(&self, tree: &TreeBall, map: &[VertexId], v: VertexId, k: u32) -> bool {
        let entry = {
            let mut sets = self.sets.lock().unwrap();
            sets.entry((v, k))
                .or_insert_with(|| {
                    let ids: Vec<VertexId> = tree.ball_around(v, k).iter().map(|x| x.0).collect();
                    let set = self
                        .maps
                        .iter()
                        .filter(|p| ids.iter().all(|&x| (x as usize) < p.len()))
                        .map(|p| ids.iter().map(|&x| p[x as usize]).collect())
                        .collect();
                    Arc::new((ids, set))
                })
                .clone()
        };
        let img: Vec<VertexId> = entry.0.iter().map(|&x| map[x as usize]).collect();
        entry.1.contains(&img)
    }
}

/// Answers "does some element of the group agree with a map on `B(v,k)`".
pub(crate) enum Tester {
    Universal(Arc<UniversalTables>),
    KClosure { inner: Box<Tester>, k: u32 },
    Profile(ProfileSets),
}

impl Tester {
    /// Tester for specs without `+k` wrappers.
    pub fn for_spec(spec: &GroupSpec, _tree: &TreeBall) -> Result<Tester> {
        Ok(match spec {
            GroupSpec::Universal(u) => Tester::Universal(u.tables()?),
            GroupSpec::KClosure { inner, k } => Tester::KClosure {
                inner: Box::new(Tester::for_spec(inner, _tree)?),
                k: *k,
            },
            GroupSpec::PlusK { .. } => {
                return Err(Error::Unsupported("+k specs have no ball tester".into()))
            }
        })
    }

    pub fn test(&self, tree: &TreeBall, map: &[VertexId], v: VertexId, k: u32, ctx: &mut Ctx) -> bool {
        match self {
            Tester::Universal(tables) => {
                let ball = ctx.ball(tree, v, k);
                for &(x, prev, d) in ball.iter() {
                    if d < k {
                        match local_action_of(tree, map, x) {
                            Some(s) if tables.local[tree.vertex_type(x)].contains(&s) => {}
                            _ => return false,
                        }
                    } else {
                        let (gx, gp) = (map[x as usize], map[prev as usize]);
                        let (Some(a), Some(b)) = (tree.color_toward(x, prev), tree.color_toward(gx, gp)) else {
                            return false;
                        };
                        if !ctx.ext.extends(Side::Tree(x, a as u8), Side::Tree(gx, b as u8)) {
                            return false;
                        }
                    }
                }
                true
            }
            Tester::KClosure { inner, k: k2 } => {
                if k <= *k2 {
                    inner.test(tree, map, v, k, ctx)
                } else {
                    let ball = ctx.ball(tree, v, k - k2);
                    ball.iter().all(|&(w, _, _)| inner.test(tree, map, w, *k2, ctx))
                }
            }
            Tester::Profile(sets) => sets.test(tree, map, v, k),
        }
    }

    /// Membership of a whole portrait in the k-closure described by `self`.
    pub fn portrait_passes(&self, g: &Portrait) -> Result<bool> {
        let Tester::KClosure { k, .. } = self else {
            return Err(Error::Unsupported("portrait test needs a k-closure".into()));
        };
        let tables = match innermost(self) {
            Some(t) => t,
            None => return Err(Error::Unsupported("no universal spec inside".into())),
        };
        let tree = g.tree();
        let mut ctx = Ctx::new(tree, &tables);
        let inner_r = g.radius() - k;
        for v in 0..tree.ball_len(inner_r) as VertexId {
            if !self.test(tree, g.map(), v, *k, &mut ctx) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn innermost(t: &Tester) -> Option<Arc<UniversalTables>> {
    match t {
        Tester::Universal(tb) => Some(tb.clone()),
        Tester::KClosure { inner, .. } => innermost(inner),
        Tester::Profile(_) => None,
    }
}

/// Frontier size at which the search fans out over threads.
const FAN_OUT: usize = 256;

pub(crate) struct Plan<'a> {
    pub tree: &'a TreeBall,
    pub tables: &'a UniversalTables,
    /// Prune choices by half-tree extendability (exact universal search).
    pub use_ext: bool,
    /// Images forced on the ids below `forced.len()`.
    pub forced: Option<&'a [VertexId]>,
    pub forced_radius: u32,
    pub tester: Option<&'a Tester>,
    n_exp: usize,
    prefix_end: usize,
    out_len: usize,
    dom_len: usize,
    checks: Vec<Vec<(VertexId, u32)>>,
}

impl<'a> Plan<'a> {
    /// Search whose results are maps on `B(root, out_r)` that extend to
    /// `B(root, dom_r)`.
    pub fn new(tree: &'a TreeBall, tables: &'a UniversalTables, out_r: u32, dom_r: u32) -> Self {
        let dom_r = dom_r.max(out_r).max(1);
        let n_exp = tree.ball_len(dom_r - 1);
        Plan {
            tree,
            tables,
            use_ext: false,
            forced: None,
            forced_radius: 0,
            tester: None,
            n_exp,
            prefix_end: if out_r == 0 { 0 } else { tree.ball_len(out_r - 1) },
            out_len: tree.ball_len(out_r),
            dom_len: tree.ball_len(dom_r),
            checks: vec![Vec::new(); n_exp],
        }
    }

    pub fn with_forced(mut self, forced: &'a [VertexId], radius: u32) -> Self {
        self.forced = Some(forced);
        self.forced_radius = radius;
        self
    }

    /// Runs `tester` on `B(v, k)` for every `v` in `B(root, r)` once the ball
    /// is fully assigned.
    pub fn with_tests(mut self, tester: &'a Tester, r: u32, k: u32) -> Self {
        self.tester = Some(tester);
        for v in 0..self.tree.ball_len(r) as VertexId {
            let trigger = self
                .tree
                .ball_around(v, k)
                .iter()
                .filter_map(|&(x, _, _)| self.tree.parent(x))
                .max()
                .unwrap_or(0);
            self.checks[trigger as usize].push((v, k));
        }
        self
    }

    /// Upper bound on the number of outputs.
    pub fn predicted(&self, roots: usize) -> f64 {
        let mut p = roots as f64;
        for x in 0..self.prefix_end as VertexId {
            if self.forced.is_some() && self.tree.depth(x) < self.forced_radius {
                continue;
            }
            let t = &self.tables.local[self.tree.vertex_type(x)];
            p *= if x == 0 { t.elements.len() } else { t.max_transporter } as f64;
        }
        p
    }

    fn try_choice(&self, x: VertexId, y: VertexId, s: Option<usize>, g: &Permutation, map: &mut [VertexId], ctx: &mut Ctx) -> bool {
        let tree = self.tree;
        for c in 0..tree.degree(x) {
            if Some(c) == s {
                continue;
            }
            let u = tree.neighbor(x, c).expect("expanded vertex is interior");
            let Some(img) = tree.neighbor(y, g.apply0(c)) else {
                return false;
            };
            if let Some(f) = self.forced {
                if (u as usize) < f.len() && f[u as usize] != img {
                    return false;
                }
            }
            if self.use_ext {
                let a = Side::Tree(u, tree.parent_color(u).unwrap() as u8);
                let b = Side::Tree(img, tree.color_toward(img, y).unwrap() as u8);
                if !ctx.ext.extends(a, b) {
                    return false;
                }
            }
            map[u as usize] = img;
        }
        if let Some(t) = self.tester {
            for &(v, k) in &self.checks[x as usize] {
                if !t.test(tree, map, v, k, ctx) {
                    return false;
                }
            }
        }
        true
    }

    /// Parent colors at `x` and at its image, and the local table.
    fn slot(&self, idx: usize, map: &[VertexId]) -> (VertexId, VertexId, Option<(usize, usize)>) {
        let x = idx as VertexId;
        let y = map[idx];
        let st = self.tree.parent(x).map(|p| {
            let s = self.tree.parent_color(x).unwrap();
            let t = self.tree.color_toward(y, map[p as usize]).unwrap();
            (s, t)
        });
        (x, y, st)
    }

    fn choices(&self, x: VertexId, st: Option<(usize, usize)>) -> Box<dyn Iterator<Item = u32> + 'a> {
        let t = &self.tables.local[self.tree.vertex_type(x)];
        match st {
            Some((s, d)) => Box::new(t.transporters(s, d).iter().copied()),
            None => Box::new(0..t.elements.len() as u32),
        }
    }

    fn element(&self, x: VertexId, e: u32) -> &'a Permutation {
        &self.tables.local[self.tree.vertex_type(x)].elements[e as usize]
    }

    fn dfs(&self, idx: usize, map: &mut Vec<VertexId>, ctx: &mut Ctx, out: &mut Vec<Vec<VertexId>>) {
        if idx == self.prefix_end && idx < self.n_exp {
            if self.exists(idx, map, ctx) {
                out.push(map[..self.out_len].to_vec());
            }
            return;
        }
        if idx == self.n_exp {
            out.push(map[..self.out_len].to_vec());
            return;
        }
        let (x, y, st) = self.slot(idx, map);
        for e in self.choices(x, st) {
            if self.try_choice(x, y, st.map(|p| p.0), self.element(x, e), map, ctx) {
                self.dfs(idx + 1, map, ctx, out);
            }
        }
    }

    fn exists(&self, idx: usize, map: &mut Vec<VertexId>, ctx: &mut Ctx) -> bool {
        if idx == self.n_exp {
            return true;
        }
        let (x, y, st) = self.slot(idx, map);
        for e in self.choices(x, st) {
            if self.try_choice(x, y, st.map(|p| p.0), self.element(x, e), map, ctx)
                && self.exists(idx + 1, map, ctx)
            {
                return true;
            }
        }
        false
    }

    /// All maps on the output ball sending the root into `roots`, in a
    /// deterministic order independent of the thread count.
    pub fn run(&self, roots: &[VertexId]) -> Vec<Vec<VertexId>> {
        let mut frontier: Vec<(usize, Vec<VertexId>)> = roots
            .iter()
            .map(|&w| {
                let mut m = vec![NONE; self.dom_len];
                m[0] = w;
                (0, m)
            })
            .collect();
        let mut ctx = Ctx::new(self.tree, self.tables);
        while frontier.len() < FAN_OUT && frontier.iter().any(|(i, _)| *i < self.prefix_end) {
            let mut next = Vec::new();
            for (idx, mut map) in frontier {
                if idx >= self.prefix_end {
                    next.push((idx, map));
                    continue;
                }
                let (x, y, st) = self.slot(idx, &map);
                for e in self.choices(x, st) {
                    if self.try_choice(x, y, st.map(|p| p.0), self.element(x, e), &mut map, &mut ctx) {
                        next.push((idx + 1, map.clone()));
                    }
                }
            }
            frontier = next;
        }
        frontier
            .into_par_iter()
            .map(|(idx, mut map)| {
                let mut ctx = Ctx::new(self.tree, self.tables);
                let mut out = Vec::new();
                self.dfs(idx, &mut map, &mut ctx, &mut out);
                out
            })
            .collect::<Vec<_>>()
            .concat()
    }
}
