//! Finite partial automorphisms of a tree ball.
//!
//! A portrait is stored as its vertex action on `B(root, r)`; since the
//! domain ball consists of the ids `0..ball_len(r)`, the map is a plain
//! vector indexed by vertex id. Edge action is implied.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::permgrp::Permutation;
use crate::tree::{TreeBall, VertexId};

#[derive(Clone)]
pub struct Portrait {
    tree: Arc<TreeBall>,
    radius: u32,
    map: Vec<VertexId>,
}

impl PartialEq for Portrait {
    fn eq(&self, other: &Self) -> bool {
        self.radius == other.radius && self.map == other.map
    }
}

impl Eq for Portrait {}

impl fmt::Debug for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Portrait(r={}, {:?})", self.radius, self.map)
    }
}

impl Portrait {
    /// Checks injectivity, adjacency and type preservation.
    pub fn new(tree: Arc<TreeBall>, radius: u32, map: Vec<VertexId>) -> Result<Self> {
        if radius > tree.radius() || map.len() != tree.ball_len(radius) {
            return domain(format!(
                "map of length {} does not cover B(root, {radius})",
                map.len()
            ));
        }
        let mut seen = std::collections::HashSet::with_capacity(map.len());
        for (v, &img) in map.iter().enumerate() {
            if !tree.contains(img) {
                return domain(format!("image {img} outside the tree"));
            }
            if !seen.insert(img) {
                return domain(format!("portrait is not injective at {img}"));
            }
            let v = v as VertexId;
            if tree.vertex_type(v) != tree.vertex_type(img) {
                return domain(format!("vertex {v} and its image {img} have different types"));
            }
            if let Some(p) = tree.parent(v) {
                if tree.color_toward(img, map[p as usize]).is_none() {
                    return domain(format!("edge {p}–{v} is not mapped to an edge"));
                }
            }
        }
        Ok(Portrait { tree, radius, map })
    }

    pub fn identity(tree: Arc<TreeBall>, radius: u32) -> Self {
        let radius = radius.min(tree.radius());
        let map = (0..tree.ball_len(radius) as VertexId).collect();
        Portrait { tree, radius, map }
    }

    pub fn tree(&self) -> &Arc<TreeBall> {
        &self.tree
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn map(&self) -> &[VertexId] {
        &self.map
    }

    pub fn image(&self, v: VertexId) -> Option<VertexId> {
        self.map.get(v as usize).copied()
    }

    /// Distance from the root to its image.
    pub fn displacement(&self) -> u32 {
        self.tree.depth(self.map[0])
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i as VertexId == j)
    }

    /// Whether the portrait fixes `B(root, n)` pointwise (requires `n ≤ r`).
    pub fn fixes_ball(&self, n: u32) -> bool {
        let len = self.tree.ball_len(n.min(self.radius));
        self.map[..len].iter().enumerate().all(|(i, &j)| i as VertexId == j)
    }

    pub fn restrict(&self, r: u32) -> Result<Portrait> {
        if r > self.radius {
            return domain(format!("cannot restrict radius {} to {r}", self.radius));
        }
        Ok(Portrait {
            tree: self.tree.clone(),
            radius: r,
            map: self.map[..self.tree.ball_len(r)].to_vec(),
        })
    }

    /// `self ∘ other` on the largest ball where it is defined: radius
    /// `min(r_other, r_self − displacement(other))`.
    pub fn compose(&self, other: &Portrait) -> Result<Portrait> {
        if !Arc::ptr_eq(&self.tree, &other.tree) && self.tree.len() != other.tree.len() {
            return domain("portraits live on different trees");
        }
        let disp = other.displacement();
        if disp > self.radius {
            return domain("composable domain is empty");
        }
        let r = other.radius.min(self.radius - disp);
        let len = self.tree.ball_len(r);
        let map = other.map[..len]
            .iter()
            .map(|&x| self.map[x as usize])
            .collect();
        let tree = if self.tree.radius() >= other.tree.radius() {
            self.tree.clone()
        } else {
            other.tree.clone()
        };
        Ok(Portrait { tree, radius: r, map })
    }

    /// Inverse of a portrait mapping its domain onto itself.
    pub fn inverse(&self) -> Result<Portrait> {
        if !self.is_self_map() {
            return domain("only self-mapping portraits have inverses");
        }
        let mut inv = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j as usize] = i as VertexId;
        }
        Ok(Portrait {
            tree: self.tree.clone(),
            radius: self.radius,
            map: inv,
        })
    }

    /// Displacement 0 and image equal to the domain.
    pub fn is_self_map(&self) -> bool {
        let len = self.map.len() as VertexId;
        self.map[0] == 0 && self.map.iter().all(|&j| j < len)
    }

    /// Local action at `v`, read through the colorings at `v` and its image.
    pub fn local_action(&self, v: VertexId) -> Result<Permutation> {
        if !self.tree.contains(v) || self.tree.depth(v) >= self.radius {
            return domain(format!("vertex {v} is not interior to B(root, {})", self.radius));
        }
        local_action_of(&self.tree, &self.map, v)
            .ok_or_else(|| Error::Domain(format!("neighbors of {v} leave the tree")))
    }

    /// Least `m ≥ 1` with `g^m` the identity on the domain.
    pub fn order(&self) -> Result<u64> {
        if !self.is_self_map() {
            return domain("order needs a portrait mapping its domain onto itself");
        }
        // lcm of cycle lengths of the vertex permutation
        let n = self.map.len();
        let mut seen = vec![false; n];
        let mut order = 1u64;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0u64;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = self.map[i] as usize;
                len += 1;
            }
            order = lcm(order, len);
        }
        Ok(order)
    }

    /// `g^p` for a self-mapping portrait.
    pub fn power(&self, p: u64) -> Result<Portrait> {
        if !self.is_self_map() {
            return domain("powers need a portrait mapping its domain onto itself");
        }
        let mut acc = Portrait::identity(self.tree.clone(), self.radius);
        for _ in 0..p {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Canonical bytes: the radius, then the image of every domain vertex in
    /// id order as little-endian `u32`.
    pub fn encode(&self) -> Vec<u8> {
        encode_map(self.radius, &self.map)
    }

    pub fn decode(tree: Arc<TreeBall>, bytes: &[u8]) -> Result<Portrait> {
        let (radius, map) = decode_map(bytes)?;
        Portrait::new(tree, radius, map)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

pub(crate) fn encode_map(radius: u32, map: &[VertexId]) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 4 * map.len());
    out.extend_from_slice(&radius.to_le_bytes());
    for &v in map {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub(crate) fn decode_map(bytes: &[u8]) -> Result<(u32, Vec<VertexId>)> {
    if bytes.len() < 8 || !bytes.len().is_multiple_of(4) {
        return Err(Error::Parse(format!("portrait encoding of length {}", bytes.len())));
    }
    let words: Vec<u32> = bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Ok((words[0], words[1..].to_vec()))
}

/// Local action of a (partial) vertex map at `v`; `None` when a neighbor of
/// `v` or its image is missing.
pub(crate) fn local_action_of(tree: &TreeBall, map: &[VertexId], v: VertexId) -> Option<Permutation> {
    let w = *map.get(v as usize)?;
    let deg = tree.degree(v);
    let mut images = Vec::with_capacity(deg);
    for c in 0..deg {
        let u = tree.neighbor(v, c)?;
        let gu = *map.get(u as usize)?;
        images.push(tree.color_toward(w, gu)? as u8);
    }
    Some(Permutation::from_images_unchecked(images))
}
