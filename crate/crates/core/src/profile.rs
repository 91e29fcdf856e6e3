//! Profiles: the sets of portraits a spec realizes on a ball.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex};

use sha2::{Digest, Sha256};

use crate::cache::ProfileCache;
use crate::eig::EdgeIndexedGraph;
use crate::error::{domain, Error, Result};
use crate::portrait::{decode_map, encode_map, Portrait};
use crate::search::{Plan, ProfileSets, Tester};
use crate::spec::GroupSpec;
use crate::tree::{TreeBall, VertexId, DEFAULT_VERTEX_CAP};

/// Default refusal threshold for predicted profile sizes.
pub const DEFAULT_PORTRAIT_CAP: f64 = 2e6;

/// A canonically sorted set of encoded portraits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub spec_hash: String,
    pub base_hash: String,
    pub root_type: usize,
    pub radius: u32,
    pub displacement: u32,
    entries: Vec<Vec<u8>>,
}

impl Profile {
    pub fn new(
        spec: &GroupSpec,
        root_type: usize,
        radius: u32,
        displacement: u32,
        mut entries: Vec<Vec<u8>>,
    ) -> Result<Profile> {
        entries.sort();
        entries.dedup();
        Ok(Profile {
            spec_hash: spec.hash()?,
            base_hash: base_hash(spec.base()),
            root_type,
            radius,
            displacement,
            entries,
        })
    }

    fn from_maps(spec: &GroupSpec, root_type: usize, radius: u32, d: u32, maps: &[Vec<VertexId>]) -> Result<Profile> {
        let entries = maps.iter().map(|m| encode_map(radius, m)).collect();
        Profile::new(spec, root_type, radius, d, entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Vec<u8>] {
        &self.entries
    }

    pub fn contains_encoding(&self, e: &[u8]) -> bool {
        self.entries.binary_search_by(|x| x.as_slice().cmp(e)).is_ok()
    }

    /// Vertex maps in profile order.
    pub fn maps(&self) -> Vec<Vec<VertexId>> {
        self.entries
            .iter()
            .map(|e| decode_map(e).expect("profile entries are valid encodings").1)
            .collect()
    }

    pub fn portraits(&self, tree: &Arc<TreeBall>) -> Result<Vec<Portrait>> {
        self.entries
            .iter()
            .map(|e| Portrait::decode(tree.clone(), e))
            .collect()
    }

    /// Hex SHA-256 over all entries.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for e in &self.entries {
            h.update((e.len() as u32).to_le_bytes());
            h.update(e);
        }
        hex::encode(h.finalize())
    }

    /// Restrictions to a smaller radius (as a set).
    pub fn restrict(&self, tree: &TreeBall, r: u32) -> Result<Profile> {
        if r > self.radius {
            return domain(format!("cannot restrict radius {} to {r}", self.radius));
        }
        let len = tree.ball_len(r);
        let mut entries: Vec<Vec<u8>> = self
            .maps()
            .iter()
            .map(|m| encode_map(r, &m[..len]))
            .collect();
        entries.sort();
        entries.dedup();
        Ok(Profile {
            radius: r,
            entries,
            ..self.clone()
        })
    }

    fn check_comparable(&self, other: &Profile) -> Result<()> {
        if self.root_type != other.root_type
            || self.radius != other.radius
            || self.displacement != other.displacement
            || self.base_hash != other.base_hash
        {
            return domain(format!(
                "profiles differ in parameters: (type {}, r {}, D {}) vs (type {}, r {}, D {})",
                self.root_type, self.radius, self.displacement, other.root_type, other.radius, other.displacement
            ));
        }
        Ok(())
    }

    /// Same parameters and the same portraits, regardless of the spec.
    pub fn same_set(&self, other: &Profile) -> Result<bool> {
        self.check_comparable(other)?;
        Ok(self.entries == other.entries)
    }
}

fn base_hash(base: &EdgeIndexedGraph) -> String {
    hex::encode(Sha256::digest(base.to_text().as_bytes()))
}

/// Whether `inner ⊆ outer`.
pub fn profile_contains(outer: &Profile, inner: &Profile) -> Result<bool> {
    outer.check_comparable(inner)?;
    Ok(inner.entries.iter().all(|e| outer.contains_encoding(e)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionReport {
    pub holds: bool,
    /// Size of the profile at the tested radius.
    pub checked: usize,
    /// Encodings that do not extend one radius further.
    pub witnesses: Vec<Vec<u8>>,
}

/// Compares `lower` with the restrictions of `upper` to the radius of `lower`.
pub fn extension_check_profiles(lower: &Profile, upper: &Profile, tree: &TreeBall) -> Result<ExtensionReport> {
    let restricted = upper.restrict(tree, lower.radius)?;
    let witnesses: Vec<Vec<u8>> = lower
        .entries
        .iter()
        .filter(|e| !restricted.contains_encoding(e))
        .cloned()
        .collect();
    Ok(ExtensionReport {
        holds: witnesses.is_empty(),
        checked: lower.len(),
        witnesses,
    })
}

/// Enumeration front end: tree reuse, capacity limits and the profile cache.
pub struct Engine {
    pub portrait_cap: f64,
    pub tree_cap: u64,
    cache: Option<ProfileCache>,
    trees: Mutex<HashMap<(String, usize), Arc<TreeBall>>>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new()
    }
}

impl Engine {
    /// No cache, default caps.
    pub fn new() -> Self {
        Engine {
            portrait_cap: DEFAULT_PORTRAIT_CAP,
            tree_cap: DEFAULT_VERTEX_CAP,
            cache: None,
            trees: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_cache(mut self, cache: ProfileCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_portrait_cap(mut self, cap: f64) -> Self {
        self.portrait_cap = cap;
        self
    }

    pub fn cache(&self) -> Option<&ProfileCache> {
        self.cache.as_ref()
    }

    /// A tree ball of at least the given radius; balls are shared between
    /// calls since vertex ids do not depend on the truncation radius.
    pub fn tree(&self, base: &Arc<EdgeIndexedGraph>, root_type: usize, radius: u32) -> Result<Arc<TreeBall>> {
        let key = (base.to_text(), root_type);
        if let Some(t) = self.trees.lock().unwrap().get(&key) {
            if t.radius() >= radius {
                return Ok(t.clone());
            }
        }
        let t = Arc::new(TreeBall::build_capped(base.clone(), root_type, radius, self.tree_cap)?);
        self.trees.lock().unwrap().insert(key, t.clone());
        Ok(t)
    }

    fn cached(
        &self,
        kind: &str,
        spec: &GroupSpec,
        params: &[u32],
        root_type: usize,
        radius: u32,
        d: u32,
        compute: impl FnOnce() -> Result<Vec<Vec<VertexId>>>,
    ) -> Result<Profile> {
        let key = match &self.cache {
            Some(_) => {
                let canon = spec.canonical()?;
                let params: Vec<String> = params.iter().map(|p| p.to_string()).collect();
                Some(ProfileCache::key(&[
                    "profile-v1",
                    kind,
                    &canon,
                    &params.join(","),
                    &root_type.to_string(),
                    &radius.to_string(),
                    &d.to_string(),
                ]))
            }
            None => None,
        };
        if let (Some(cache), Some(key)) = (&self.cache, &key) {
            if let Some(entries) = cache.lookup(key) {
                return Profile::new(spec, root_type, radius, d, entries);
            }
        }
        let maps = compute()?;
        let p = Profile::from_maps(spec, root_type, radius, d, &maps)?;
        if let (Some(cache), Some(key)) = (&self.cache, &key) {
            if let Err(e) = cache.store(key, &p.entries) {
                log::warn!("could not write cache entry: {e}");
            }
        }
        Ok(p)
    }

    fn check_root(spec: &GroupSpec, root_type: usize) -> Result<()> {
        if root_type >= spec.base().vertex_count() {
            return domain(format!("root type {root_type} not in base graph"));
        }
        Ok(())
    }

    /// Restrictions to `B(root, r)` of the elements fixing the root.
    pub fn stabilizer_profile(&self, spec: &GroupSpec, root_type: usize, r: u32) -> Result<Profile> {
        if let GroupSpec::PlusK { .. } = spec {
            return Err(Error::Unsupported("+k specs: use plus_k_profile".into()));
        }
        self.profile(spec, root_type, r, 0)
    }

    /// Restrictions to `B(root, r)` of the elements moving the root by at most `d`.
    pub fn moving_profile(&self, spec: &GroupSpec, root_type: usize, r: u32, d: u32) -> Result<Profile> {
        if let GroupSpec::PlusK { .. } = spec {
            return Err(Error::Unsupported("+k specs only have stabilizer profiles".into()));
        }
        self.profile(spec, root_type, r, d)
    }

    pub fn kclosure_profile(&self, spec: &GroupSpec, k: u32, root_type: usize, r: u32) -> Result<Profile> {
        if r == 0 || k == 0 {
            return domain("k-closure profiles need r ≥ 1 and k ≥ 1");
        }
        let wrapped = GroupSpec::KClosure {
            inner: Box::new(spec.clone()),
            k,
        };
        self.profile(&wrapped, root_type, r, 0)
    }

    /// Any spec, including `+k` wrappers (which only allow `d = 0`).
    pub fn profile(&self, spec: &GroupSpec, root_type: usize, r: u32, d: u32) -> Result<Profile> {
        Self::check_root(spec, root_type)?;
        match spec {
            GroupSpec::PlusK { inner, k } => {
                if d > 0 {
                    return Err(Error::Unsupported("+k specs only have stabilizer profiles".into()));
                }
                self.plus_k_profile(inner, *k, root_type, r)
            }
            _ => self.cached("profile", spec, &[], root_type, r, d, || {
                self.enumerate(spec, root_type, r, r, d, None)
            }),
        }
    }

    /// Elements of the profile at radius `r` fixing `B(root, n)` pointwise.
    pub fn fixator_profile(&self, spec: &GroupSpec, root_type: usize, n: u32, r: u32) -> Result<Profile> {
        Self::check_root(spec, root_type)?;
        if n > r {
            return domain(format!("fixed ball radius {n} exceeds profile radius {r}"));
        }
        if spec.contains_plus_k() {
            let tree = self.tree(spec.base(), root_type, r)?;
            let len = tree.ball_len(n);
            let full = self.profile(spec, root_type, r, 0)?;
            let maps: Vec<Vec<VertexId>> = full
                .maps()
                .into_iter()
                .filter(|m| m[..len].iter().enumerate().all(|(i, &j)| i as VertexId == j))
                .collect();
            return Profile::from_maps(spec, root_type, r, 0, &maps);
        }
        self.cached("fixator", spec, &[n], root_type, r, 0, || {
            let tree = self.tree(spec.base(), root_type, n)?;
            let forced: Vec<VertexId> = (0..tree.ball_len(n) as VertexId).collect();
            self.enumerate(spec, root_type, r, r, 0, Some((&forced, n)))
        })
    }

    /// The layer `{g ∈ profile(n+1) : g fixes B(root, n)}`.
    pub fn layer(&self, spec: &GroupSpec, root_type: usize, n: u32) -> Result<Profile> {
        self.fixator_profile(spec, root_type, n, n + 1)
    }

    /// Whether every portrait at radius `r` extends to one at radius `r+1`.
    pub fn extension_check(&self, spec: &GroupSpec, root_type: usize, r: u32) -> Result<ExtensionReport> {
        Self::check_root(spec, root_type)?;
        if r == 0 {
            return domain("extension check needs r ≥ 1");
        }
        let lower = self.profile(spec, root_type, r, 0)?;
        let restricted = if spec.contains_plus_k() {
            let tree = self.tree(spec.base(), root_type, r + 1)?;
            self.profile(spec, root_type, r + 1, 0)?.restrict(&tree, r)?
        } else {
            let maps = self.enumerate(spec, root_type, r, r + 1, 0, None)?;
            Profile::from_maps(spec, root_type, r, 0, &maps)?
        };
        let witnesses: Vec<Vec<u8>> = lower
            .entries
            .iter()
            .filter(|e| !restricted.contains_encoding(e))
            .cloned()
            .collect();
        Ok(ExtensionReport {
            holds: witnesses.is_empty(),
            checked: lower.len(),
            witnesses,
        })
    }

    /// Subgroup generated by the stabilizer portraits that fix `B(e, k−1)`
    /// pointwise for some edge `e` of `B(root, r)`.
    pub fn plus_k_profile(&self, spec: &GroupSpec, k: u32, root_type: usize, r: u32) -> Result<Profile> {
        Self::check_root(spec, root_type)?;
        if k == 0 || k > r {
            return domain(format!("+k profile needs 1 ≤ k ≤ r (k = {k}, r = {r})"));
        }
        let wrapped = GroupSpec::PlusK {
            inner: Box::new(spec.clone()),
            k,
        };
        self.cached("plusk", &wrapped, &[], root_type, r, 0, || {
            let stab = self.profile(spec, root_type, r, 0)?;
            let tree = self.tree(spec.base(), root_type, r)?;
            let len = tree.ball_len(r);
            let mut fix_sets: Vec<Vec<VertexId>> = Vec::new();
            for x in 1..len as VertexId {
                let p = tree.parent(x).unwrap();
                let mut s: BTreeSet<VertexId> = BTreeSet::new();
                for end in [p, x] {
                    for (y, _, _) in tree.ball_around(end, k - 1) {
                        if (y as usize) < len {
                            s.insert(y);
                        }
                    }
                }
                fix_sets.push(s.into_iter().collect());
            }
            let gens: Vec<Vec<VertexId>> = stab
                .maps()
                .into_iter()
                .filter(|m| fix_sets.iter().any(|s| s.iter().all(|&y| m[y as usize] == y)))
                .collect();
            Ok(generate(len, &gens))
        })
    }

    /// Maps on `B(root, out_r)` of the elements realized on `B(root, test_r)`.
    fn enumerate(
        &self,
        spec: &GroupSpec,
        root_type: usize,
        out_r: u32,
        test_r: u32,
        d: u32,
        forced: Option<(&[VertexId], u32)>,
    ) -> Result<Vec<Vec<VertexId>>> {
        let tables = spec.universal().tables()?;
        let (dom_r, outer) = match spec {
            GroupSpec::Universal(_) => (test_r, None),
            GroupSpec::KClosure { inner, k } => {
                if d > 0 && inner.contains_plus_k() {
                    return Err(Error::Unsupported("moving profiles of k-closures of +k specs".into()));
                }
                let tester = self.tester(inner, root_type, test_r + k)?;
                (test_r + k, Some((tester, *k)))
            }
            GroupSpec::PlusK { .. } => {
                return Err(Error::Unsupported("+k specs are generated, not enumerated".into()))
            }
        };
        let tree = self.tree(spec.base(), root_type, dom_r.max(1) + d)?;
        let mut plan = Plan::new(&tree, &tables, out_r, dom_r);
        plan.use_ext = spec.is_universal();
        if let Some((f, n)) = forced {
            plan = plan.with_forced(f, n);
        }
        if let Some((tester, k)) = &outer {
            plan = plan.with_tests(tester, test_r, *k);
        }
        let roots: Vec<VertexId> = if forced.is_some() {
            vec![0]
        } else {
            (0..tree.ball_len(d) as VertexId)
                .filter(|&v| tree.vertex_type(v) == root_type)
                .collect()
        };
        let predicted = plan.predicted(roots.len());
        if predicted > self.portrait_cap {
            let shown = if predicted < 1e9 {
                format!("{predicted:.0}")
            } else {
                format!("{predicted:.3e}")
            };
            return Err(Error::Capacity(format!(
                "predicted {shown} portraits at radius {out_r} (cap {:.0})",
                self.portrait_cap
            )));
        }
        log::debug!("enumerating {spec} at r={out_r} (test radius {test_r}, D={d}), bound {predicted:.0}");
        Ok(plan.run(&roots))
    }

    fn tester(&self, spec: &GroupSpec, root_type: usize, radius: u32) -> Result<Tester> {
        Ok(match spec {
            GroupSpec::Universal(u) => Tester::Universal(u.tables()?),
            GroupSpec::KClosure { inner, k } => Tester::KClosure {
                inner: Box::new(self.tester(inner, root_type, radius)?),
                k: *k,
            },
            GroupSpec::PlusK { inner, k } => {
                let p = self.plus_k_profile(inner, *k, root_type, radius)?;
                Tester::Profile(ProfileSets::new(p.maps()))
            }
        })
    }
}

/// Closure of a set of self-maps of `0..len` under composition.
fn generate(len: usize, gens: &[Vec<VertexId>]) -> Vec<Vec<VertexId>> {
    let identity: Vec<VertexId> = (0..len as VertexId).collect();
    let mut group: HashSet<Vec<VertexId>> = HashSet::from([identity.clone()]);
    let mut order = vec![identity];
    let mut kept: Vec<&Vec<VertexId>> = Vec::new();
    for g in gens {
        if group.contains(g) {
            continue;
        }
        kept.push(g);
        let mut queue: VecDeque<usize> = (0..order.len()).collect();
        while let Some(i) = queue.pop_front() {
            for s in &kept {
                let prod: Vec<VertexId> = order[i].iter().map(|&x| s[x as usize]).collect();
                if group.insert(prod.clone()) {
                    order.push(prod);
                    queue.push_back(order.len() - 1);
                }
            }
        }
    }
    order
}
