//! Analysis suites turning profiles into finite certificates.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::eig::{eig_isomorphic, EdgeIndexedGraph};
use crate::error::{domain, Error, Result};
use crate::permgrp::prime_factors;
use crate::profile::Engine;
use crate::report::Report;
use crate::search::Ext;
use crate::spec::{t3_base, valency_one_base, GroupSpec, UniversalTables};
use crate::tree::{TreeBall, VertexId};

fn primes_text(s: &BTreeSet<u64>) -> String {
    format!("{{{}}}", s.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgreementReport {
    /// `(r, stabilizer profiles equal, moving profiles equal)` for `r = 1..=rmax`.
    pub flags: Vec<(u32, bool, bool)>,
    pub r_star: u32,
    pub distance: f64,
}

impl AgreementReport {
    pub fn to_report(&self) -> Report {
        let rows: Vec<Report> = self
            .flags
            .iter()
            .map(|&(r, s, m)| Report::new().with("r", r).with("stabilizer_equal", s).with("moving_equal", m))
            .collect();
        Report::new()
            .with("radii", rows)
            .with("r_star", self.r_star)
            .with("distance", format!("2^-{}", self.r_star))
    }
}

/// Largest radius up to which the stabilizer and moving profiles of `a` and `b` agree.
pub fn agreement_radius(
    engine: &Engine,
    a: &GroupSpec,
    b: &GroupSpec,
    root_type: usize,
    rmax: u32,
    d: u32,
) -> Result<AgreementReport> {
    if **a.base() != **b.base() {
        return domain("specs live on different base graphs");
    }
    let mut flags = Vec::new();
    let mut r_star = 0;
    let mut prefix = true;
    for r in 1..=rmax {
        let s = engine
            .profile(a, root_type, r, 0)?
            .same_set(&engine.profile(b, root_type, r, 0)?)?;
        let m = if d == 0 {
            s
        } else {
            engine
                .profile(a, root_type, r, d)?
                .same_set(&engine.profile(b, root_type, r, d)?)?
        };
        prefix &= s && m;
        if prefix {
            r_star = r;
        }
        flags.push((r, s, m));
    }
    Ok(AgreementReport {
        flags,
        r_star,
        distance: 0.5f64.powi(r_star as i32),
    })
}

/// Vertex and edge orbits near the root, found by transporter search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitData {
    pub vertex_reps: Vec<VertexId>,
    /// Class of each vertex of `B(root, rmax − 1)`.
    pub vertex_class: Vec<usize>,
    /// Per vertex class: color classes at its representative (0-based colors).
    pub dart_classes: Vec<Vec<Vec<usize>>>,
    /// `reverse[(class, dart class)] = (class, dart class)`.
    pub reverse: Vec<Vec<(usize, usize)>>,
}

fn tables_for(spec: &GroupSpec) -> Result<Arc<UniversalTables>> {
    match spec {
        GroupSpec::Universal(u) => u.tables(),
        // a k-closure has the same vertex and dart orbits as its inner group
        GroupSpec::KClosure { inner, .. } => tables_for(inner),
        GroupSpec::PlusK { .. } => Err(Error::Unsupported(
            "orbit detection for +k specs (generated profiles fix the root)".into(),
        )),
    }
}

fn orbit_data(tree: &TreeBall, tables: &UniversalTables, margin: u32, rmax: u32) -> Result<OrbitData> {
    let mut ext = Ext::new(tree, tables);
    let mut reps: Vec<VertexId> = Vec::new();
    let n = tree.ball_len(rmax - 1);
    let mut class = Vec::with_capacity(n);
    for v in 0..n as VertexId {
        match reps.iter().position(|&r| ext.transports(r, v, None)) {
            Some(i) => class.push(i),
            None => {
                if tree.depth(v) > margin {
                    return domain(format!(
                        "orbits not locally detectable: vertex {v} at depth {} meets no orbit of B(root, {margin})",
                        tree.depth(v)
                    ));
                }
                reps.push(v);
                class.push(reps.len() - 1);
            }
        }
    }
    let mut dart_classes = Vec::new();
    for &v in &reps {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for c in 0..tree.degree(v) {
            match classes.iter_mut().find(|cl| ext.transports(v, v, Some((cl[0], c)))) {
                Some(cl) => cl.push(c),
                None => classes.push(vec![c]),
            }
        }
        dart_classes.push(classes);
    }
    let mut reverse = Vec::new();
    for (i, &v) in reps.iter().enumerate() {
        let mut row = Vec::new();
        for cl in &dart_classes[i] {
            let u = tree.neighbor(v, cl[0]).unwrap();
            let j = class[u as usize];
            let w = reps[j];
            let back = tree.color_toward(u, v).unwrap();
            let k = dart_classes[j]
                .iter()
                .position(|cl2| ext.transports(u, w, Some((back, cl2[0]))))
                .ok_or_else(|| Error::Domain(format!("no reverse dart class for edge {v}–{u}")))?;
            row.push((j, k));
        }
        reverse.push(row);
    }
    Ok(OrbitData {
        vertex_reps: reps,
        vertex_class: class,
        dart_classes,
        reverse,
    })
}

/// Root type used for orbit detection: a center of the base graph, so that
/// every vertex type occurs close to the root.
pub fn orbit_root(spec: &GroupSpec) -> usize {
    spec.base().center().unwrap_or(0)
}

fn orbits(engine: &Engine, spec: &GroupSpec, rmax: u32) -> Result<(Arc<TreeBall>, Arc<UniversalTables>, OrbitData)> {
    let margin = spec.required_margin() + 1;
    if rmax < margin + 2 {
        return domain(format!("orbit detection needs Rmax ≥ {}", margin + 2));
    }
    let tables = tables_for(spec)?;
    let tree = engine.tree(spec.base(), orbit_root(spec), rmax)?;
    let data = orbit_data(&tree, &tables, margin, rmax)?;
    Ok((tree, tables, data))
}

/// Orbit classes of `B(root, rmax − 1)`, requiring every class to meet
/// `B(root, margin)`.
pub fn orbits_near_root(engine: &Engine, spec: &GroupSpec, rmax: u32, margin: u32) -> Result<OrbitData> {
    if rmax < margin + 2 {
        return domain(format!("orbit detection needs Rmax ≥ {}", margin + 2));
    }
    let tables = tables_for(spec)?;
    let tree = engine.tree(spec.base(), orbit_root(spec), rmax)?;
    orbit_data(&tree, &tables, margin, rmax)
}

/// Edge-indexed quotient of the tree by the group.
pub fn quotient_graph(engine: &Engine, spec: &GroupSpec, rmax: u32) -> Result<EdgeIndexedGraph> {
    let (tree, _, data) = orbits(engine, spec, rmax)?;
    Ok(quotient_from(&tree, spec, &data))
}

fn quotient_from(tree: &TreeBall, spec: &GroupSpec, data: &OrbitData) -> EdgeIndexedGraph {
    let base = spec.base();
    let mut g = EdgeIndexedGraph::new();
    let types: Vec<usize> = data.vertex_reps.iter().map(|&v| tree.vertex_type(v)).collect();
    for (i, &q) in types.iter().enumerate() {
        let same = types.iter().filter(|&&t| t == q).count();
        let nth = types[..i].iter().filter(|&&t| t == q).count();
        let vb = &base.vertices()[q];
        let name = if same == 1 {
            vb.name.clone()
        } else {
            format!("{}{}", vb.name, nth + 1)
        };
        g.add_vertex(name, vb.color);
    }
    let mut done = vec![Vec::new(); data.vertex_reps.len()];
    for (i, row) in data.reverse.iter().enumerate() {
        for (k, &(j, k2)) in row.iter().enumerate() {
            if done[i].contains(&k) || (i == j && k == k2) {
                continue;
            }
            done[i].push(k);
            done[j].push(k2);
            g.add_edge(i, j, data.dart_classes[i][k].len() as u32, data.dart_classes[j][k2].len() as u32);
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShCertificate {
    pub vertex_reps: Vec<VertexId>,
    pub edge_reps: Vec<(VertexId, VertexId)>,
    /// `(x, y)` with `x` a representative, `y` within distance 1 of `F`, same orbit.
    pub vertex_pairs: Vec<(VertexId, VertexId)>,
    pub edge_pairs: Vec<((VertexId, VertexId), (VertexId, VertexId))>,
    pub quotient: EdgeIndexedGraph,
}

impl ShCertificate {
    /// Largest distance between vertices of `F` (edge endpoints included).
    pub fn diameter(&self, tree: &TreeBall) -> Result<u32> {
        let pts = self.points();
        let mut d = 0;
        for &a in &pts {
            for &b in &pts {
                d = d.max(tree.distance(a, b)?);
            }
        }
        Ok(d)
    }

    fn points(&self) -> BTreeSet<VertexId> {
        let mut pts: BTreeSet<VertexId> = self.vertex_reps.iter().copied().collect();
        for &(a, b) in &self.edge_reps {
            pts.insert(a);
            pts.insert(b);
        }
        pts
    }

    pub fn to_report(&self) -> Report {
        let e = |(a, b): (VertexId, VertexId)| format!("{a}-{b}");
        Report::new()
            .with("vertex_reps", self.vertex_reps.iter().map(|v| v.to_string()).collect::<Vec<_>>())
            .with("edge_reps", self.edge_reps.iter().map(|&x| e(x)).collect::<Vec<_>>())
            .with(
                "vertex_pairs",
                self.vertex_pairs.iter().map(|(x, y)| format!("{x}~{y}")).collect::<Vec<_>>(),
            )
            .with(
                "edge_pairs",
                self.edge_pairs
                    .iter()
                    .map(|&(x, y)| format!("{}~{}", e(x), e(y)))
                    .collect::<Vec<_>>(),
            )
            .with("quotient_vertices", self.quotient.vertex_count())
            .with("quotient_edges", self.quotient.darts().len() / 2)
    }
}

pub fn sh_certificate(engine: &Engine, spec: &GroupSpec, rmax: u32) -> Result<ShCertificate> {
    let (tree, tables, data) = orbits(engine, spec, rmax)?;
    let quotient = quotient_from(&tree, spec, &data);
    let mut ext = Ext::new(&tree, &tables);
    let mut edge_reps = Vec::new();
    let mut done = vec![Vec::new(); data.vertex_reps.len()];
    for (i, row) in data.reverse.iter().enumerate() {
        for (k, &(j, k2)) in row.iter().enumerate() {
            if done[i].contains(&k) {
                continue;
            }
            done[i].push(k);
            done[j].push(k2);
            let v = data.vertex_reps[i];
            edge_reps.push((v, tree.neighbor(v, data.dart_classes[i][k][0]).unwrap()));
        }
    }
    let mut cert = ShCertificate {
        vertex_reps: data.vertex_reps.clone(),
        edge_reps,
        vertex_pairs: Vec::new(),
        edge_pairs: Vec::new(),
        quotient,
    };
    let pts = cert.points();
    let mut near: BTreeSet<VertexId> = pts.clone();
    for &p in &pts {
        for c in 0..tree.degree(p) {
            if let Some(u) = tree.neighbor(p, c) {
                near.insert(u);
            }
        }
    }
    for &x in &cert.vertex_reps {
        for &y in &near {
            if ext.transports(x, y, None) {
                cert.vertex_pairs.push((x, y));
            }
        }
    }
    let mut near_edges: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    for &p in &near {
        for c in 0..tree.degree(p) {
            if let Some(u) = tree.neighbor(p, c) {
                near_edges.insert((p.min(u), p.max(u)));
            }
        }
    }
    for &(a, b) in &cert.edge_reps {
        let ca = tree.color_toward(a, b).unwrap();
        for &(p, q) in &near_edges {
            let fwd = ext.transports(a, p, Some((ca, tree.color_toward(p, q).unwrap())));
            let mut bwd = || ext.transports(a, q, Some((ca, tree.color_toward(q, p).unwrap())));
            if fwd || bwd() {
                cert.edge_pairs.push(((a, b), (p, q)));
            }
        }
    }
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateComparison {
    pub radius: u32,
    pub displacement: u32,
    pub profiles_equal: bool,
    pub certificates_equal: bool,
    pub quotients_isomorphic: bool,
}

impl CertificateComparison {
    /// Equal profiles force equal certificates.
    pub fn holds(&self) -> bool {
        !self.profiles_equal || (self.certificates_equal && self.quotients_isomorphic)
    }
}

/// Compares moving profiles at radius `diam(F) + margin + 1` with displacement
/// bound `diam(F) + 1`, and the certificates of both specs.
pub fn compare_certificates(engine: &Engine, a: &GroupSpec, b: &GroupSpec, rmax: u32) -> Result<CertificateComparison> {
    let ca = sh_certificate(engine, a, rmax)?;
    let cb = sh_certificate(engine, b, rmax)?;
    let root = orbit_root(a);
    let tree = engine.tree(a.base(), root, rmax)?;
    let diam = ca.diameter(&tree)?;
    let margin = a.required_margin().max(b.required_margin()) + 1;
    let radius = diam + margin + 1;
    let displacement = diam + 1;
    let profiles_equal = if **a.base() != **b.base() {
        false
    } else if a.canonical()? == b.canonical()? {
        true
    } else {
        engine
            .profile(a, root, radius, displacement)?
            .same_set(&engine.profile(b, root, radius, displacement)?)?
    };
    Ok(CertificateComparison {
        radius,
        displacement,
        profiles_equal,
        certificates_equal: ca == cb,
        quotients_isomorphic: eig_isomorphic(&ca.quotient, &cb.quotient)?,
    })
}

/// Primes dividing the order of the layer at level `n`.
pub fn prime_content(engine: &Engine, spec: &GroupSpec, root_type: usize, n: u32) -> Result<BTreeSet<u64>> {
    Ok(prime_factors(engine.layer(spec, root_type, n)?.len() as u64))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelPrimes {
    pub root_type: usize,
    pub level: u32,
    pub order: u64,
    pub primes: BTreeSet<u64>,
}

fn level_primes(engine: &Engine, spec: &GroupSpec, levels: std::ops::RangeInclusive<u32>) -> Result<Vec<LevelPrimes>> {
    let mut out = Vec::new();
    for q in 0..spec.base().vertex_count() {
        for n in levels.clone() {
            let order = engine.layer(spec, q, n)?.len() as u64;
            out.push(LevelPrimes {
                root_type: q,
                level: n,
                order,
                primes: prime_factors(order),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProPiReport {
    pub pi: BTreeSet<u64>,
    pub r: u32,
    pub k: u32,
    pub depth: u32,
    pub hypothesis: Vec<LevelPrimes>,
    pub hypothesis_holds: bool,
    /// Absent when the hypothesis is not met.
    pub conclusion: Option<Vec<LevelPrimes>>,
}

impl ProPiReport {
    pub fn conclusion_holds(&self) -> Option<bool> {
        self.conclusion
            .as_ref()
            .map(|c| c.iter().all(|l| l.primes.is_subset(&self.pi)))
    }

    /// The hypothesis held and the conclusion failed.
    pub fn violated(&self) -> bool {
        self.hypothesis_holds && self.conclusion_holds() == Some(false)
    }

    pub fn to_report(&self) -> Report {
        let rows = |ls: &[LevelPrimes]| -> Vec<Report> {
            ls.iter()
                .map(|l| {
                    Report::new()
                        .with("type", l.root_type)
                        .with("level", l.level)
                        .with("order", l.order)
                        .with("primes", primes_text(&l.primes))
                })
                .collect()
        };
        let mut r = Report::new()
            .with("pi", primes_text(&self.pi))
            .with("levels", format!("{}..{}", self.r, self.depth))
            .with("k", self.k)
            .with("hypothesis", rows(&self.hypothesis))
            .with("hypothesis_holds", self.hypothesis_holds);
        match &self.conclusion {
            Some(c) => {
                r.push("conclusion", rows(c));
                r.push("conclusion_holds", self.conclusion_holds().unwrap());
            }
            None => {
                r.push("conclusion", "hypothesis not met");
            }
        }
        r
    }
}

/// Layers `r..=depth` of the spec are π-groups, then so are those of its k-closure.
pub fn verify_pro_pi_transfer(
    engine: &Engine,
    spec: &GroupSpec,
    pi: &BTreeSet<u64>,
    r: u32,
    k: u32,
    depth: u32,
) -> Result<ProPiReport> {
    if k < r + 1 {
        return domain(format!("need k ≥ r + 1 (k = {k}, r = {r})"));
    }
    if depth < r {
        return domain("depth below r");
    }
    let hypothesis = level_primes(engine, spec, r..=depth)?;
    let hypothesis_holds = hypothesis.iter().all(|l| l.primes.is_subset(pi));
    let conclusion = if hypothesis_holds {
        let wrapped = GroupSpec::KClosure {
            inner: Box::new(spec.clone()),
            k,
        };
        Some(level_primes(engine, &wrapped, r..=depth)?)
    } else {
        None
    };
    Ok(ProPiReport {
        pi: pi.clone(),
        r,
        k,
        depth,
        hypothesis,
        hypothesis_holds,
        conclusion,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorsionOutcome {
    Holds { tested: usize },
    Counterexample { encoding: Vec<u8>, order: u64 },
}

impl TorsionOutcome {
    pub fn to_report(&self) -> Report {
        match self {
            TorsionOutcome::Holds { tested } => Report::new().with("result", "holds").with("tested", *tested),
            TorsionOutcome::Counterexample { encoding, order } => Report::new()
                .with("result", "counterexample")
                .with("order", *order)
                .with("portrait", hex::encode(encoding)),
        }
    }
}

/// Among portraits fixing `B(root, n)` whose `p`-th power fixes `B(root, M)`,
/// looks for one not fixing `B(root, n+1)`.
pub fn torsion_claim_check(
    engine: &Engine,
    spec: &GroupSpec,
    root_type: usize,
    p: u64,
    n: u32,
    m: u32,
) -> Result<TorsionOutcome> {
    if m <= n {
        return domain(format!("need M > n (M = {m}, n = {n})"));
    }
    if p < 2 {
        return domain("p must be at least 2");
    }
    let prof = engine.fixator_profile(spec, root_type, n, m)?;
    let tree = engine.tree(spec.base(), root_type, m)?;
    let inner = tree.ball_len(n + 1);
    let mut tested = 0;
    for g in prof.portraits(&tree)? {
        tested += 1;
        if !g.power(p)?.is_identity() {
            continue;
        }
        if !g.fixes_ball(n + 1) {
            debug_assert!(inner <= g.map().len());
            return Ok(TorsionOutcome::Counterexample {
                encoding: g.encode(),
                order: g.order()?,
            });
        }
    }
    Ok(TorsionOutcome::Holds { tested })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalTransitivity {
    pub per_type: Vec<(String, usize, u8)>,
    pub all_two_transitive: bool,
}

impl LocalTransitivity {
    pub fn to_report(&self) -> Report {
        let rows: Vec<Report> = self
            .per_type
            .iter()
            .map(|(n, d, t)| Report::new().with("type", n.as_str()).with("degree", *d).with("transitivity", *t))
            .collect();
        Report::new()
            .with("types", rows)
            .with("two_transitive", self.all_two_transitive)
    }
}

pub fn local_two_transitivity(spec: &GroupSpec) -> Result<LocalTransitivity> {
    let GroupSpec::Universal(u) = spec else {
        return Err(Error::Unsupported("local 2-transitivity needs a universal spec".into()));
    };
    let mut per_type = Vec::new();
    for (q, g) in u.local_groups().iter().enumerate() {
        per_type.push((u.base().vertices()[q].name.clone(), g.degree(), g.transitivity_degree()?));
    }
    let all_two_transitive = per_type.iter().all(|x| x.2 == 2);
    Ok(LocalTransitivity {
        per_type,
        all_two_transitive,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteReport {
    pub sizes: Vec<usize>,
    pub discrete: bool,
    /// `(k, k-closure profile equals the spec's)` at the largest radius.
    pub kclosure_equal: Vec<(u32, bool)>,
}

impl DiscreteReport {
    pub fn equal_from(&self) -> Option<u32> {
        let first_bad = self.kclosure_equal.iter().rev().find(|x| !x.1).map(|x| x.0);
        let ks: Vec<u32> = self.kclosure_equal.iter().map(|x| x.0).collect();
        match first_bad {
            None => ks.first().copied(),
            Some(b) => ks.into_iter().find(|&k| k > b),
        }
    }

    pub fn to_report(&self) -> Report {
        Report::new()
            .with("sizes", self.sizes.clone())
            .with("discrete", self.discrete)
            .with(
                "kclosure_equal",
                self.kclosure_equal
                    .iter()
                    .map(|(k, e)| Report::new().with("k", *k).with("equal", *e))
                    .collect::<Vec<_>>(),
            )
            .with("equal_from", self.equal_from())
    }
}

pub fn discreteness_check(engine: &Engine, spec: &GroupSpec, root_type: usize, rmax: u32) -> Result<DiscreteReport> {
    if rmax < 2 {
        return domain("discreteness check needs Rmax ≥ 2");
    }
    let mut sizes = Vec::new();
    for r in 1..=rmax {
        sizes.push(engine.profile(spec, root_type, r, 0)?.len());
    }
    let discrete = sizes[sizes.len() - 1] == sizes[sizes.len() - 2];
    let mut kclosure_equal = Vec::new();
    if discrete {
        let own = engine.profile(spec, root_type, rmax, 0)?;
        for k in 1..rmax {
            let cl = engine.kclosure_profile(spec, k, root_type, rmax)?;
            kclosure_equal.push((k, cl.same_set(&own)?));
        }
    }
    Ok(DiscreteReport {
        sizes,
        discrete,
        kclosure_equal,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentReport {
    pub own_size: usize,
    pub sizes: Vec<(u32, usize)>,
    pub chain_holds: bool,
    pub contains_spec: bool,
    pub closed_at: Option<u32>,
}

impl DescentReport {
    pub fn to_report(&self) -> Report {
        Report::new()
            .with("own_size", self.own_size)
            .with(
                "closures",
                self.sizes
                    .iter()
                    .map(|(k, s)| Report::new().with("k", *k).with("size", *s))
                    .collect::<Vec<_>>(),
            )
            .with("chain_holds", self.chain_holds)
            .with("contains_spec", self.contains_spec)
            .with("closed_at", self.closed_at)
    }
}

/// k-closure profiles for `k = 1..=kmax` at radius `r`.
pub fn closure_descent_suite(
    engine: &Engine,
    spec: &GroupSpec,
    root_type: usize,
    r: u32,
    kmax: u32,
) -> Result<DescentReport> {
    let own = engine.profile(spec, root_type, r, 0)?;
    let mut profiles = Vec::new();
    for k in 1..=kmax {
        profiles.push((k, engine.kclosure_profile(spec, k, root_type, r)?));
    }
    let mut chain_holds = true;
    for w in profiles.windows(2) {
        chain_holds &= crate::profile::profile_contains(&w[0].1, &w[1].1)?;
    }
    let mut contains_spec = true;
    let mut closed_at = None;
    for (k, p) in &profiles {
        contains_spec &= crate::profile::profile_contains(p, &own)?;
        if closed_at.is_none() && p.same_set(&own)? {
            closed_at = Some(*k);
        }
    }
    Ok(DescentReport {
        own_size: own.len(),
        sizes: profiles.iter().map(|(k, p)| (*k, p.len())).collect(),
        chain_holds,
        contains_spec,
        closed_at,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValencyOneReport {
    pub degrees: Vec<usize>,
    pub quotient_matches: bool,
    pub profile_size: usize,
    /// Encoding of an order-5 portrait fixing the type-a neighbors.
    pub five_cycle: Option<Vec<u8>>,
    pub core_primes: Vec<(u32, BTreeSet<u64>)>,
    pub core_primes_ok: bool,
    pub layer0_order: u64,
    pub obstruction: bool,
}

impl ValencyOneReport {
    pub fn passed(&self) -> bool {
        let mut d = self.degrees.clone();
        d.sort();
        d == [1, 3, 8]
            && self.quotient_matches
            && self.profile_size == 360
            && self.five_cycle.is_some()
            && self.core_primes_ok
            && self.obstruction
    }

    pub fn to_report(&self) -> Report {
        Report::new()
            .with("degrees", self.degrees.clone())
            .with("quotient_matches", self.quotient_matches)
            .with("stabilizer_profile_b_r1", self.profile_size)
            .with("five_cycle", self.five_cycle.as_ref().map(hex::encode))
            .with(
                "core_primes",
                self.core_primes
                    .iter()
                    .map(|(n, p)| Report::new().with("level", *n).with("primes", primes_text(p)))
                    .collect::<Vec<_>>(),
            )
            .with("core_primes_ok", self.core_primes_ok)
            .with("layer0_order", self.layer0_order)
            .with("obstruction", self.obstruction)
            .with("passed", self.passed())
    }
}

/// Hand-written quotient of the valency-one preset.
pub fn valency_one_fixture() -> EdgeIndexedGraph {
    valency_one_base()
}

pub fn valency_one_report(engine: &Engine) -> Result<ValencyOneReport> {
    let spec = GroupSpec::preset("valency1")?;
    let base = spec.base().clone();
    let degrees = (0..base.vertex_count()).map(|q| base.upstairs_degree(q)).collect();
    let quotient_matches = eig_isomorphic(&quotient_graph(engine, &spec, 3)?, &valency_one_fixture())?;
    let b = base.vertex_by_name("b").unwrap();
    let prof = engine.stabilizer_profile(&spec, b, 1)?;
    let tree = engine.tree(&base, b, 1)?;
    let mut five_cycle = None;
    for g in prof.portraits(&tree)? {
        let fixes_a = (0..tree.degree(0))
            .filter(|&c| base.vertices()[tree.vertex_type(tree.neighbor(0, c).unwrap())].name == "a")
            .all(|c| g.image(tree.neighbor(0, c).unwrap()) == tree.neighbor(0, c));
        if fixes_a && g.order()? == 5 {
            five_cycle = Some(g.encode());
            break;
        }
    }
    let core = GroupSpec::preset("t3-sym")?;
    let mut core_primes = Vec::new();
    for n in 0..=3 {
        core_primes.push((n, prime_content(engine, &core, 0, n)?));
    }
    let allowed: BTreeSet<u64> = [2, 3].into();
    let core_primes_ok = core_primes.iter().all(|(_, p)| p.is_subset(&allowed));
    let layer0_order = engine.layer(&spec, b, 0)?.len() as u64;
    let core_union: BTreeSet<u64> = core_primes.iter().flat_map(|(_, p)| p.iter().copied()).collect();
    let obstruction = layer0_order.is_multiple_of(5) && !core_union.contains(&5);
    Ok(ValencyOneReport {
        degrees,
        quotient_matches,
        profile_size: prof.len(),
        five_cycle,
        core_primes,
        core_primes_ok,
        layer0_order,
        obstruction,
    })
}

/// Hand-written quotients for the trivalent presets.
pub fn t3_fixture() -> EdgeIndexedGraph {
    t3_base()
}

pub fn intransitive_fixture() -> EdgeIndexedGraph {
    let mut g = EdgeIndexedGraph::new();
    let a = g.add_vertex("a", 0);
    let b = g.add_vertex("b", 1);
    g.add_edge(a, b, 2, 2);
    g.add_edge(a, b, 1, 1);
    g
}
