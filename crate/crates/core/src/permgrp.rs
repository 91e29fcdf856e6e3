//! Permutation groups of small degree.
//!
//! Groups are stored by generators and materialized on demand into a sorted
//! element list. Degrees in this crate stay small (vertex degrees of the
//! trees under study), so exhaustive closure is used throughout instead of a
//! stabilizer chain.
//!
//! Points are 1-based in every public signature and in the cycle notation;
//! images are stored 0-based.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{domain, Error, Result};

/// Largest supported degree.
pub const MAX_DEGREE: usize = 12;

/// Materialization refuses groups with more elements than this.
pub const MAX_ELEMENTS: usize = 5_000_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u8).collect(),
        }
    }

    /// Builds a permutation from 0-based images.
    pub fn from_images(images: Vec<u8>) -> Result<Self> {
        let n = images.len();
        if n > MAX_DEGREE {
            return Err(Error::Capacity(format!("degree {n} exceeds {MAX_DEGREE}")));
        }
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return domain(format!("images {images:?} do not form a bijection"));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<u8>) -> Self {
        Permutation { images }
    }

    /// Parses disjoint-cycle notation such as `(1 2 3)(4 5)`; `()` is the identity.
    pub fn parse(text: &str, degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::Capacity(format!("degree {degree} exceeds {MAX_DEGREE}")));
        }
        let mut images: Vec<u8> = (0..degree as u8).collect();
        let mut moved = vec![false; degree];
        let text = text.trim();
        let mut rest = text;
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in {text:?}")))?;
            let close = open
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed cycle in {text:?}")))?;
            let body = &open[..close];
            let points = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad point {s:?} in {text:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            for &p in &points {
                if p == 0 || p > degree {
                    return Err(Error::Parse(format!("point {p} out of range 1..={degree}")));
                }
                if moved[p - 1] {
                    return Err(Error::Parse(format!("point {p} repeated in {text:?}")));
                }
                moved[p - 1] = true;
            }
            for (i, &p) in points.iter().enumerate() {
                let q = points[(i + 1) % points.len()];
                images[p - 1] = (q - 1) as u8;
            }
            rest = open[close + 1..].trim_start();
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a 1-based point.
    pub fn image(&self, point: usize) -> usize {
        self.images[point - 1] as usize + 1
    }

    #[inline]
    pub(crate) fn apply0(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn images0(&self) -> &[u8] {
        &self.images
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: other.images.iter().map(|&i| self.images[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j as usize)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push(i + 1);
                i = self.images[i] as usize;
            }
            out.push(cyc);
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1u64, |acc, c| num_integer_lcm(acc, c.len() as u64))
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn num_integer_lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A permutation group on `{1..degree}` given by generators.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Arc<OnceLock<std::result::Result<Arc<Vec<Permutation>>, String>>>,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup")
            .field("degree", &self.degree)
            .field("generators", &self.generators)
            .finish()
    }
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::Capacity(format!("degree {degree} exceeds {MAX_DEGREE}")));
        }
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return domain(format!("generator {g} has degree {} not {degree}", g.degree()));
        }
        let generators = generators.into_iter().filter(|g| !g.is_identity()).collect();
        Ok(PermGroup {
            degree,
            generators,
            elements: Arc::new(OnceLock::new()),
        })
    }

    /// A group whose element set is already known to be closed.
    pub(crate) fn from_closed_elements(degree: usize, mut elements: Vec<Permutation>) -> Self {
        elements.sort();
        elements.dedup();
        let generators = elements.iter().filter(|g| !g.is_identity()).cloned().collect();
        let cell = OnceLock::new();
        let _ = cell.set(Ok(Arc::new(elements)));
        PermGroup {
            degree,
            generators,
            elements: Arc::new(cell),
        }
    }

    pub fn trivial(degree: usize) -> Result<Self> {
        Self::new(degree, vec![])
    }

    pub fn symmetric(degree: usize) -> Result<Self> {
        let mut gens = Vec::new();
        if degree >= 2 {
            let mut t: Vec<u8> = (0..degree as u8).collect();
            t.swap(0, 1);
            gens.push(Permutation::from_images(t)?);
            let c: Vec<u8> = (0..degree).map(|i| ((i + 1) % degree) as u8).collect();
            gens.push(Permutation::from_images(c)?);
        }
        Self::new(degree, gens)
    }

    pub fn alternating(degree: usize) -> Result<Self> {
        let mut gens = Vec::new();
        for k in 2..degree {
            let mut t: Vec<u8> = (0..degree as u8).collect();
            // (1 2 k+1)
            t[0] = 1;
            t[1] = k as u8;
            t[k] = 0;
            gens.push(Permutation::from_images(t)?);
        }
        Self::new(degree, gens)
    }

    /// Direct product of groups acting on consecutive blocks of points.
    pub fn block_product(parts: &[PermGroup]) -> Result<Self> {
        let degree: usize = parts.iter().map(|p| p.degree).sum();
        if degree > MAX_DEGREE {
            return Err(Error::Capacity(format!("degree {degree} exceeds {MAX_DEGREE}")));
        }
        let mut gens = Vec::new();
        let mut offset = 0;
        for part in parts {
            for g in &part.generators {
                let mut img: Vec<u8> = (0..degree as u8).collect();
                for i in 0..part.degree {
                    img[offset + i] = (offset + g.apply0(i)) as u8;
                }
                gens.push(Permutation::from_images_unchecked(img));
            }
            offset += part.degree;
        }
        Self::new(degree, gens)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Sorted list of all elements; materialized once.
    pub fn elements(&self) -> Result<&[Permutation]> {
        let res = self.elements.get_or_init(|| self.close().map(Arc::new));
        match res {
            Ok(v) => Ok(v.as_slice()),
            Err(msg) => Err(Error::Capacity(msg.clone())),
        }
    }

    fn close(&self) -> std::result::Result<Vec<Permutation>, String> {
        let id = Permutation::identity(self.degree);
        let mut seen: HashSet<Permutation> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(id.clone());
        queue.push_back(id);
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                let y = g.compose(&x);
                if !seen.contains(&y) {
                    if seen.len() >= MAX_ELEMENTS {
                        return Err(format!(
                            "group of degree {} has more than {MAX_ELEMENTS} elements",
                            self.degree
                        ));
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        let mut all: Vec<Permutation> = seen.into_iter().collect();
        all.sort();
        Ok(all)
    }

    pub fn order(&self) -> Result<u64> {
        Ok(self.elements()?.len() as u64)
    }

    pub fn contains(&self, p: &Permutation) -> Result<bool> {
        if p.degree() != self.degree {
            return Ok(false);
        }
        Ok(self.elements()?.binary_search(p).is_ok())
    }

    /// Orbit of a 1-based point, sorted.
    pub fn orbit(&self, point: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        let mut stack = vec![point - 1];
        seen[point - 1] = true;
        while let Some(i) = stack.pop() {
            for g in &self.generators {
                let j = g.apply0(i);
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        (0..self.degree).filter(|&i| seen[i]).map(|i| i + 1).collect()
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut covered = vec![false; self.degree];
        let mut out = Vec::new();
        for p in 1..=self.degree {
            if !covered[p - 1] {
                let o = self.orbit(p);
                for &q in &o {
                    covered[q - 1] = true;
                }
                out.push(o);
            }
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(1).len() == self.degree
    }

    pub fn point_stabilizer(&self, point: usize) -> Result<PermGroup> {
        if point == 0 || point > self.degree {
            return domain(format!("point {point} out of range 1..={}", self.degree));
        }
        let elems = self
            .elements()?
            .iter()
            .filter(|g| g.apply0(point - 1) == point - 1)
            .cloned()
            .collect();
        Ok(PermGroup::from_closed_elements(self.degree, elems))
    }

    /// 2 if 2-transitive, 1 if transitive only, 0 otherwise.
    ///
    /// A group of degree 1 is reported as transitive only: it has no pairs of
    /// distinct points to act on.
    pub fn transitivity_degree(&self) -> Result<u8> {
        if self.degree == 0 {
            return domain("transitivity of a degree-0 group");
        }
        if !self.is_transitive() {
            return Ok(0);
        }
        if self.degree == 1 {
            return Ok(1);
        }
        let stab = self.point_stabilizer(1)?;
        let orbit = stab.orbit(2);
        Ok(if orbit.len() == self.degree - 1 { 2 } else { 1 })
    }

    /// Whether `Alt(n) ≤ G`, tested on the generating 3-cycles `(1 2 k)`.
    pub fn contains_alternating(&self) -> Result<bool> {
        if self.degree < 3 {
            return domain(format!("alternating group test needs degree ≥ 3, got {}", self.degree));
        }
        let alt = PermGroup::alternating(self.degree)?;
        for g in alt.generators() {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn primes(&self) -> Result<BTreeSet<u64>> {
        Ok(prime_factors(self.order()?))
    }

    /// Action on an invariant set of points, relabeled to `1..=points.len()` in
    /// the given order.
    pub fn restrict_to(&self, points: &[usize]) -> Result<PermGroup> {
        let mut pos = vec![usize::MAX; self.degree];
        for (i, &p) in points.iter().enumerate() {
            if p == 0 || p > self.degree {
                return domain(format!("point {p} out of range"));
            }
            pos[p - 1] = i;
        }
        let mut gens = Vec::new();
        for g in &self.generators {
            let mut img = Vec::with_capacity(points.len());
            for &p in points {
                let q = pos[g.apply0(p - 1)];
                if q == usize::MAX {
                    return domain(format!("points {points:?} are not invariant under {g}"));
                }
                img.push(q as u8);
            }
            gens.push(Permutation::from_images_unchecked(img));
        }
        PermGroup::new(points.len(), gens)
    }

    /// Whether every generator maps each of the given 0-based point ranges onto itself.
    pub fn preserves_blocks(&self, blocks: &[std::ops::Range<usize>]) -> bool {
        self.generators.iter().all(|g| {
            blocks
                .iter()
                .all(|b| b.clone().all(|i| b.contains(&g.apply0(i))))
        })
    }
}

/// Distinct prime divisors of `n` (empty for `n ≤ 1`).
pub fn prime_factors(mut n: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            out.insert(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out.insert(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(s: &str, n: usize) -> Permutation {
        Permutation::parse(s, n).unwrap()
    }

    fn group(n: usize, gens: &[&str]) -> PermGroup {
        PermGroup::new(n, gens.iter().map(|g| perm(g, n)).collect()).unwrap()
    }

    #[test]
    fn cycle_notation_round_trip() {
        let p = perm("(1 2 3)(4 5)", 5);
        assert_eq!(p.to_string(), "(1 2 3)(4 5)");
        assert_eq!(perm("()", 4).to_string(), "()");
        assert!(Permutation::parse("(1 1)", 3).is_err());
        assert!(Permutation::parse("(1 4)", 3).is_err());
    }

    #[test]
    fn compose_applies_right_first() {
        let g = perm("(1 2 3)", 3);
        let h = perm("(1 2)", 3);
        assert_eq!(g.compose(&h), perm("(1 3)", 3));
    }

    #[test]
    fn orders() {
        assert_eq!(group(3, &["(1 2 3)"]).order().unwrap(), 3);
        assert_eq!(group(3, &["(1 2)", "(1 2 3)"]).order().unwrap(), 6);
        assert_eq!(PermGroup::trivial(5).unwrap().order().unwrap(), 1);
        assert_eq!(PermGroup::alternating(5).unwrap().order().unwrap(), 60);
        assert_eq!(PermGroup::symmetric(5).unwrap().order().unwrap(), 120);
        assert!(matches!(PermGroup::symmetric(13), Err(Error::Capacity(_))));
    }

    #[test]
    fn transitivity() {
        assert_eq!(PermGroup::symmetric(3).unwrap().transitivity_degree().unwrap(), 2);
        assert_eq!(PermGroup::alternating(3).unwrap().transitivity_degree().unwrap(), 1);
        assert_eq!(group(3, &["(1 2)"]).transitivity_degree().unwrap(), 0);
    }

    #[test]
    fn alternating_containment() {
        assert!(PermGroup::symmetric(5).unwrap().contains_alternating().unwrap());
        assert!(PermGroup::alternating(3).unwrap().contains_alternating().unwrap());
        assert!(!group(4, &["(1 2 3 4)"]).contains_alternating().unwrap());
        assert!(PermGroup::symmetric(2).unwrap().contains_alternating().is_err());
    }

    #[test]
    fn stabilizers() {
        let s3 = PermGroup::symmetric(3).unwrap();
        assert_eq!(s3.point_stabilizer(1).unwrap().order().unwrap(), 2);
        let a3 = PermGroup::alternating(3).unwrap();
        assert_eq!(a3.point_stabilizer(1).unwrap().order().unwrap(), 1);
        let t = PermGroup::trivial(3).unwrap();
        assert_eq!(t.point_stabilizer(1).unwrap().order().unwrap(), 1);
        assert!(s3.point_stabilizer(4).is_err());
    }

    #[test]
    fn primes() {
        let set = |v: &[u64]| v.iter().copied().collect::<BTreeSet<_>>();
        assert_eq!(PermGroup::symmetric(3).unwrap().primes().unwrap(), set(&[2, 3]));
        assert_eq!(PermGroup::alternating(5).unwrap().primes().unwrap(), set(&[2, 3, 5]));
        assert!(PermGroup::trivial(4).unwrap().primes().unwrap().is_empty());
    }

    #[test]
    fn block_product_and_restriction() {
        let parts = [PermGroup::symmetric(3).unwrap(), PermGroup::alternating(5).unwrap()];
        let g = PermGroup::block_product(&parts).unwrap();
        assert_eq!(g.order().unwrap(), 360);
        assert!(g.preserves_blocks(&[0..3, 3..8]));
        let leaves = g.restrict_to(&[4, 5, 6, 7, 8]).unwrap();
        assert_eq!(leaves.order().unwrap(), 60);
        assert!(leaves.contains_alternating().unwrap());
        assert!(g.restrict_to(&[1, 4]).is_err());
    }
}
