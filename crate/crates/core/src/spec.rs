//! Group specifications: universal groups with prescribed local action on an
//! edge-indexed base, and the k-closure and `+k` wrappers around them.

use std::fmt;
use std::ops::Range;
use std::sync::{Arc, OnceLock};

use sha2::{Digest, Sha256};

use crate::eig::EdgeIndexedGraph;
use crate::error::{domain, Error, Result};
use crate::permgrp::{PermGroup, Permutation};
use crate::portrait::{local_action_of, Portrait};
use crate::tree::ColorLayout;

/// Names accepted by [`GroupSpec::preset`].
pub const PRESETS: &[&str] = &[
    "t3-sym",
    "t3-alt",
    "t3-intransitive",
    "t3-trivial",
    "valency1",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Yes,
    No,
    Indeterminate,
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Membership::Yes => "yes",
            Membership::No => "no",
            Membership::Indeterminate => "indeterminate",
        })
    }
}

/// Elements of one local group, indexed for transporter lookups.
#[derive(Debug)]
pub(crate) struct LocalTable {
    pub degree: usize,
    pub elements: Vec<Permutation>,
    /// `by_pair[s * degree + t]`: indices of elements mapping color `s` to `t`.
    pub by_pair: Vec<Vec<u32>>,
    pub max_transporter: usize,
}

impl LocalTable {
    fn new(group: &PermGroup) -> Result<Self> {
        let n = group.degree();
        let elements = group.elements()?.to_vec();
        let mut by_pair = vec![Vec::new(); n * n];
        for (i, g) in elements.iter().enumerate() {
            for s in 0..n {
                by_pair[s * n + g.apply0(s)].push(i as u32);
            }
        }
        let max_transporter = by_pair.iter().map(Vec::len).max().unwrap_or(1);
        Ok(LocalTable {
            degree: n,
            elements,
            by_pair,
            max_transporter,
        })
    }

    #[inline]
    pub fn transporters(&self, s: usize, t: usize) -> &[u32] {
        &self.by_pair[s * self.degree + t]
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }
}

/// Precomputed data for enumerating a universal group.
#[derive(Debug)]
pub(crate) struct UniversalTables {
    pub layout: Arc<ColorLayout>,
    pub local: Vec<LocalTable>,
    /// `generic[q][s * deg + t]`: whether the subtree hanging below a type-`q`
    /// vertex entered through color `s` admits an isomorphism onto one entered
    /// through `t` with every local action in the prescribed groups.
    pub generic: Vec<Vec<bool>>,
}

impl UniversalTables {
    fn new(layout: Arc<ColorLayout>, groups: &[PermGroup]) -> Result<Self> {
        let local = groups.iter().map(LocalTable::new).collect::<Result<Vec<_>>>()?;
        let n = layout.type_count();
        let mut generic: Vec<Vec<bool>> = (0..n)
            .map(|q| {
                let d = layout.degree(q);
                let mut v = vec![false; d * d];
                for s in 0..d {
                    for t in 0..d {
                        v[s * d + t] = layout.dart_of(q, s) == layout.dart_of(q, t);
                    }
                }
                v
            })
            .collect();
        // greatest fixed point
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..n {
                let d = layout.degree(q);
                for s in 0..d {
                    for t in 0..d {
                        if !generic[q][s * d + t] {
                            continue;
                        }
                        let ok = local[q].transporters(s, t).iter().any(|&e| {
                            let g = &local[q].elements[e as usize];
                            (0..d).filter(|&c| c != s).all(|c| {
                                let cq = layout.child_type(q, c);
                                let cd = layout.degree(cq);
                                let a = layout.child_in_color(q, c);
                                let b = layout.child_in_color(q, g.apply0(c));
                                generic[cq][a * cd + b]
                            })
                        });
                        if !ok {
                            generic[q][s * d + t] = false;
                            changed = true;
                        }
                    }
                }
            }
        }
        Ok(UniversalTables {
            layout,
            local,
            generic,
        })
    }

    #[inline]
    pub fn generic(&self, q: usize, s: usize, t: usize) -> bool {
        self.generic[q][s * self.local[q].degree + t]
    }
}

/// A universal group: all type-preserving automorphisms of the covering tree
/// whose local action at each vertex lies in the group assigned to its type.
pub struct UniversalSpec {
    base: Arc<EdgeIndexedGraph>,
    local: Vec<PermGroup>,
    labels: Vec<String>,
    tables: OnceLock<std::result::Result<Arc<UniversalTables>, String>>,
}

impl fmt::Debug for UniversalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UniversalSpec")
            .field("labels", &self.labels)
            .finish()
    }
}

impl UniversalSpec {
    pub fn base(&self) -> &Arc<EdgeIndexedGraph> {
        &self.base
    }

    pub fn local(&self, q: usize) -> &PermGroup {
        &self.local[q]
    }

    pub fn local_groups(&self) -> &[PermGroup] {
        &self.local
    }

    pub fn label(&self, q: usize) -> &str {
        &self.labels[q]
    }

    pub(crate) fn tables(&self) -> Result<Arc<UniversalTables>> {
        self.tables
            .get_or_init(|| {
                let layout = Arc::new(ColorLayout::new(&self.base));
                UniversalTables::new(layout, &self.local)
                    .map(Arc::new)
                    .map_err(|e| e.to_string())
            })
            .clone()
            .map_err(Error::Capacity)
    }
}

#[derive(Clone, Debug)]
pub enum GroupSpec {
    Universal(Arc<UniversalSpec>),
    KClosure { inner: Box<GroupSpec>, k: u32 },
    PlusK { inner: Box<GroupSpec>, k: u32 },
}

/// Color blocks of each type as 0-based ranges.
fn block_ranges(layout: &ColorLayout, q: usize) -> Vec<Range<usize>> {
    layout
        .blocks(q)
        .iter()
        .map(|b| b.start..b.start + b.len)
        .collect()
}

/// Validated universal spec. Types without an assignment get the full
/// block-preserving group.
pub fn make_universal(
    base: Arc<EdgeIndexedGraph>,
    assignments: Vec<(usize, PermGroup)>,
) -> Result<GroupSpec> {
    let labeled = assignments
        .into_iter()
        .map(|(q, g)| {
            let label = format!(
                "<{}>",
                g.generators()
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            (q, g, label)
        })
        .collect();
    make_universal_labeled(base, labeled)
}

fn make_universal_labeled(
    base: Arc<EdgeIndexedGraph>,
    assignments: Vec<(usize, PermGroup, String)>,
) -> Result<GroupSpec> {
    if let Err(d) = base.validate() {
        return domain(format!("invalid base graph: {d}"));
    }
    if !base.is_connected() {
        return domain("base graph is disconnected");
    }
    let layout = ColorLayout::new(&base);
    let n = base.vertex_count();
    let mut local: Vec<Option<(PermGroup, String)>> = vec![None; n];
    for (q, g, label) in assignments {
        if q >= n {
            return domain(format!("type {q} not in base graph"));
        }
        let name = &base.vertices()[q].name;
        if g.degree() != layout.degree(q) {
            return domain(format!(
                "degree mismatch at {name}: group has degree {}, vertex has degree {}",
                g.degree(),
                layout.degree(q)
            ));
        }
        if !g.preserves_blocks(&block_ranges(&layout, q)) {
            return domain(format!("block violation at {name}: {label} mixes dart classes"));
        }
        local[q] = Some((g, label));
    }
    let mut groups = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (q, entry) in local.into_iter().enumerate() {
        let (g, label) = match entry {
            Some(x) => x,
            None => {
                let parts = layout
                    .blocks(q)
                    .iter()
                    .map(|b| PermGroup::symmetric(b.len))
                    .collect::<Result<Vec<_>>>()?;
                (PermGroup::block_product(&parts)?, "Full".to_string())
            }
        };
        groups.push(g);
        labels.push(label);
    }
    Ok(GroupSpec::Universal(Arc::new(UniversalSpec {
        base,
        local: groups,
        labels,
        tables: OnceLock::new(),
    })))
}

/// Single edge with indices `(3,3)`: its covering tree is the trivalent tree.
pub fn t3_base() -> EdgeIndexedGraph {
    let mut g = EdgeIndexedGraph::new();
    let a = g.add_vertex("a", 0);
    let b = g.add_vertex("b", 1);
    g.add_edge(a, b, 3, 3);
    g
}

/// Path `a–b–c` with indices `a→b:3, b→a:3, b→c:5, c→b:1`.
pub fn valency_one_base() -> EdgeIndexedGraph {
    let mut g = EdgeIndexedGraph::new();
    let a = g.add_vertex("a", 0);
    let b = g.add_vertex("b", 1);
    let c = g.add_vertex("c", 2);
    g.add_edge(a, b, 3, 3);
    g.add_edge(b, c, 5, 1);
    g
}

/// Parses a local group expression on a star with the given color blocks.
///
/// Accepted forms: `Sym(n)`, `Alt(n)`, `Trivial`, `Trivial(n)`, `Full`,
/// `<(1 2),(1 2 3)>` and `Blocks(G1,...,Gm)` with one `Sym/Alt/Trivial(n)` per
/// consecutive block of points.
pub fn parse_local_group(expr: &str, degree: usize, blocks: &[Range<usize>]) -> Result<PermGroup> {
    let e = expr.trim();
    let perr = |msg: String| Error::Parse(msg);
    if e == "Full" {
        let parts = blocks
            .iter()
            .map(|b| PermGroup::symmetric(b.len()))
            .collect::<Result<Vec<_>>>()?;
        return PermGroup::block_product(&parts);
    }
    if e == "Trivial" {
        return PermGroup::trivial(degree);
    }
    if let Some(body) = e.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
        let gens = split_top(body, ',')
            .into_iter()
            .filter(|s| !s.trim().is_empty())
            .map(|s| Permutation::parse(s.trim(), degree))
            .collect::<Result<Vec<_>>>()?;
        return PermGroup::new(degree, gens);
    }
    if let Some(body) = e.strip_prefix("Blocks(").and_then(|s| s.strip_suffix(')')) {
        let parts = split_top(body, ',')
            .into_iter()
            .map(|s| {
                let s = s.trim();
                let (name, n) = named_degree(s).ok_or_else(|| perr(format!("bad block group `{s}`")))?;
                named_group(name, n).ok_or_else(|| perr(format!("bad block group `{s}`")))?
            })
            .collect::<Result<Vec<_>>>()?;
        let g = PermGroup::block_product(&parts)?;
        if g.degree() != degree {
            return domain(format!("`{e}` has degree {} not {degree}", g.degree()));
        }
        return Ok(g);
    }
    if let Some((name, n)) = named_degree(e) {
        if n != degree {
            return domain(format!("degree mismatch: `{e}` on a star of degree {degree}"));
        }
        if let Some(g) = named_group(name, n) {
            return g;
        }
    }
    Err(perr(format!("unknown group expression `{e}`")))
}

fn named_degree(s: &str) -> Option<(&str, usize)> {
    let open = s.find('(')?;
    let inner = s[open + 1..].strip_suffix(')')?;
    Some((&s[..open], inner.trim().parse().ok()?))
}

fn named_group(name: &str, n: usize) -> Option<Result<PermGroup>> {
    match name {
        "Sym" => Some(PermGroup::symmetric(n)),
        "Alt" => Some(PermGroup::alternating(n)),
        "Trivial" => Some(PermGroup::trivial(n)),
        _ => None,
    }
}

/// Splits at `sep` outside of brackets.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '<' | '[' => depth += 1,
            ')' | '>' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn tokens(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start: Option<usize> = None;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '<' | '[' => depth += 1,
            ')' | '>' | ']' => depth -= 1,
            _ => {}
        }
        if ch.is_whitespace() && depth == 0 {
            if let Some(st) = start.take() {
                out.push(&s[st..i]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push(&s[st..]);
    }
    out
}

impl GroupSpec {
    /// Parses the spec text format. `load_base` resolves `base=<path>`; when a
    /// universal spec names no base, `default_base` is used, then the
    /// trivalent edge.
    pub fn parse_with(
        text: &str,
        default_base: Option<&Arc<EdgeIndexedGraph>>,
        load_base: &dyn Fn(&str) -> Result<EdgeIndexedGraph>,
    ) -> Result<GroupSpec> {
        let toks = tokens(text.trim());
        Self::parse_tokens(&toks, default_base, load_base)
    }

    /// Parses a spec that does not reference base files.
    pub fn parse(text: &str, default_base: Option<&Arc<EdgeIndexedGraph>>) -> Result<GroupSpec> {
        Self::parse_with(text, default_base, &|p| {
            EdgeIndexedGraph::parse(&std::fs::read_to_string(p)?)
        })
    }

    fn parse_tokens(
        toks: &[&str],
        default_base: Option<&Arc<EdgeIndexedGraph>>,
        load_base: &dyn Fn(&str) -> Result<EdgeIndexedGraph>,
    ) -> Result<GroupSpec> {
        let Some((&head, rest)) = toks.split_first() else {
            return Err(Error::Parse("empty spec".into()));
        };
        if rest.is_empty() && head.starts_with('(') && head.ends_with(')') {
            return Self::parse_with(&head[1..head.len() - 1], default_base, load_base);
        }
        match head {
            "preset" => match rest {
                [name] => Self::preset(name),
                _ => Err(Error::Parse("expected `preset <name>`".into())),
            },
            "kclosure" | "plusk" => {
                let k = rest
                    .first()
                    .and_then(|t| t.strip_prefix("k="))
                    .and_then(|v| v.parse::<u32>().ok())
                    .ok_or_else(|| Error::Parse(format!("expected `{head} k=<n> of <spec>`")))?;
                if rest.get(1) != Some(&"of") {
                    return Err(Error::Parse(format!("expected `{head} k=<n> of <spec>`")));
                }
                if k == 0 {
                    return domain("wrapper needs k ≥ 1");
                }
                let inner = Box::new(Self::parse_tokens(&rest[2..], default_base, load_base)?);
                Ok(if head == "kclosure" {
                    GroupSpec::KClosure { inner, k }
                } else {
                    GroupSpec::PlusK { inner, k }
                })
            }
            "universal" => {
                let mut base = default_base.cloned();
                let mut pairs = Vec::new();
                for t in rest {
                    let (key, val) = t
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("expected key=value, got `{t}`")))?;
                    if key == "base" {
                        base = Some(Arc::new(load_base(val)?));
                    } else {
                        pairs.push((key, val));
                    }
                }
                let base = base.unwrap_or_else(|| Arc::new(t3_base()));
                let layout = ColorLayout::new(&base);
                let mut assignments = Vec::new();
                for (key, val) in pairs {
                    let q = base
                        .vertex_by_name(key)
                        .ok_or_else(|| Error::Parse(format!("unknown vertex type `{key}`")))?;
                    let g = parse_local_group(val, layout.degree(q), &block_ranges(&layout, q))?;
                    assignments.push((q, g, val.to_string()));
                }
                make_universal_labeled(base, assignments)
            }
            _ => Err(Error::Parse(format!("unknown spec form `{head}`"))),
        }
    }

    pub fn preset(name: &str) -> Result<GroupSpec> {
        let t3 = || Arc::new(t3_base());
        let sym = |n| PermGroup::symmetric(n);
        match name {
            "t3-sym" => make_universal_labeled(
                t3(),
                vec![(0, sym(3)?, "Sym(3)".into()), (1, sym(3)?, "Sym(3)".into())],
            ),
            "t3-alt" => {
                let alt = PermGroup::alternating(3)?;
                make_universal_labeled(
                    t3(),
                    vec![(0, alt.clone(), "Alt(3)".into()), (1, alt, "Alt(3)".into())],
                )
            }
            "t3-intransitive" => make_universal_labeled(
                t3(),
                vec![
                    (0, PermGroup::new(3, vec![Permutation::parse("(1 2)", 3)?])?, "<(1 2)>".into()),
                    (1, sym(3)?, "Sym(3)".into()),
                ],
            ),
            "t3-trivial" => make_universal_labeled(
                t3(),
                vec![
                    (0, PermGroup::trivial(3)?, "Trivial".into()),
                    (1, PermGroup::trivial(3)?, "Trivial".into()),
                ],
            ),
            "valency1" | "valency-one" => {
                let b = PermGroup::block_product(&[sym(3)?, PermGroup::alternating(5)?])?;
                make_universal_labeled(
                    Arc::new(valency_one_base()),
                    vec![
                        (0, sym(3)?, "Sym(3)".into()),
                        (1, b, "Blocks(Sym(3),Alt(5))".into()),
                        (2, PermGroup::trivial(1)?, "Trivial".into()),
                    ],
                )
            }
            _ => Err(Error::Parse(format!(
                "unknown preset `{name}` (known: {})",
                PRESETS.join(", ")
            ))),
        }
    }

    pub fn base(&self) -> &Arc<EdgeIndexedGraph> {
        self.universal().base()
    }

    /// The innermost universal spec.
    pub fn universal(&self) -> &UniversalSpec {
        match self {
            GroupSpec::Universal(u) => u,
            GroupSpec::KClosure { inner, .. } | GroupSpec::PlusK { inner, .. } => inner.universal(),
        }
    }

    pub fn is_universal(&self) -> bool {
        matches!(self, GroupSpec::Universal(_))
    }

    pub fn contains_plus_k(&self) -> bool {
        match self {
            GroupSpec::Universal(_) => false,
            GroupSpec::KClosure { inner, .. } => inner.contains_plus_k(),
            GroupSpec::PlusK { .. } => true,
        }
    }

    /// Extra radius needed beyond the output radius of a profile.
    pub fn required_margin(&self) -> u32 {
        match self {
            GroupSpec::Universal(_) => 0,
            GroupSpec::KClosure { inner, k } | GroupSpec::PlusK { inner, k } => {
                inner.required_margin() + k
            }
        }
    }

    /// Deterministic serialization covering the base and every local group's
    /// element set; the input of [`GroupSpec::hash`].
    pub fn canonical(&self) -> Result<String> {
        Ok(match self {
            GroupSpec::Universal(u) => {
                let mut s = String::from("universal\n");
                s.push_str(&u.base.to_text());
                for (q, g) in u.local.iter().enumerate() {
                    let mut h = Sha256::new();
                    for e in g.elements()? {
                        h.update(e.images0());
                    }
                    s.push_str(&format!("local {q} degree={} {}\n", g.degree(), hex::encode(h.finalize())));
                }
                s
            }
            GroupSpec::KClosure { inner, k } => format!("kclosure {k}\n{}", inner.canonical()?),
            GroupSpec::PlusK { inner, k } => format!("plusk {k}\n{}", inner.canonical()?),
        })
    }

    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.canonical()?.as_bytes())))
    }

    /// Ball-level membership of a portrait.
    ///
    /// Universal: every local action at a vertex whose star lies in the domain
    /// belongs to the local group. KClosure: for every `v` with `B(v,k)` in the
    /// domain some element of the inner group agrees with `g` on `B(v,k)`.
    /// Indeterminate when the domain is smaller than `k` or a `+k` wrapper is
    /// involved.
    pub fn membership(&self, g: &Portrait) -> Result<Membership> {
        if **g.tree().base() != **self.base() {
            return domain("tree mismatch: portrait and spec have different base graphs");
        }
        match self {
            GroupSpec::Universal(u) => {
                let t = g.tree();
                for v in 0..t.ball_len(g.radius().saturating_sub(1)) as u32 {
                    if g.radius() == 0 {
                        break;
                    }
                    let Some(sigma) = local_action_of(t, g.map(), v) else {
                        continue;
                    };
                    if !u.local[t.vertex_type(v)].contains(&sigma)? {
                        return Ok(Membership::No);
                    }
                }
                Ok(Membership::Yes)
            }
            GroupSpec::KClosure { k, .. } => {
                if g.radius() < *k || self.contains_plus_k() {
                    return Ok(Membership::Indeterminate);
                }
                let tester = crate::search::Tester::for_spec(self, g.tree())?;
                let ok = tester.portrait_passes(g)?;
                Ok(if ok { Membership::Yes } else { Membership::No })
            }
            GroupSpec::PlusK { .. } => Ok(Membership::Indeterminate),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Universal(u) => {
                write!(f, "universal")?;
                for (q, label) in u.labels.iter().enumerate() {
                    write!(f, " {}={}", u.base.vertices()[q].name, label)?;
                }
                Ok(())
            }
            GroupSpec::KClosure { inner, k } => write!(f, "kclosure k={k} of ({inner})"),
            GroupSpec::PlusK { inner, k } => write!(f, "plusk k={k} of ({inner})"),
        }
    }
}
