//! Complete binary trees of uniform depth.
//!
//! A tree of depth `T` is stored as a flat heap-ordered array of `2^T - 1`
//! node values. The node reached at level `t` (1-based) after the sign prefix
//! `ε_1..ε_{t-1}` lives at offset `2^{t-1} - 1 + binary(prefix)`, where the
//! prefix is read most-significant-first with `-1 ↦ 0` and `+1 ↦ 1`.
//!
//! Sign paths of length `T` are packed the same way into an integer in
//! `0..2^T` (`ε_1` is the most significant bit), so enumerating all paths is
//! plain integer counting and yields them in lexicographic order.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{serde_rational_vec, Rational};

/// Largest depth a tree may have; keeps `2^T` inside a `usize` comfortably.
pub const MAX_DEPTH: usize = 24;

/// Default bound on the number of trees `enumerate_trees` will walk.
pub const DEFAULT_TREE_BUDGET: u64 = 10_000_000;

/// A sequence of `±1` signs packed into an integer, first sign most significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignPath {
    bits: u64,
    len: usize,
}

impl SignPath {
    pub fn from_index(bits: u64, len: usize) -> Self {
        debug_assert!(len <= 63 && bits < (1u64 << len));
        SignPath { bits, len }
    }

    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        if signs.len() > 63 {
            return Err(Error::Bounds(format!("path of length {} too long", signs.len())));
        }
        let mut bits = 0u64;
        for &s in signs {
            bits <<= 1;
            match s {
                1 => bits |= 1,
                -1 => {}
                other => return Err(Error::Domain(format!("sign {other} is not ±1"))),
            }
        }
        Ok(SignPath { bits, len: signs.len() })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn index(&self) -> u64 {
        self.bits
    }

    /// Sign `ε_t`, `t` in `1..=len`.
    pub fn sign(&self, t: usize) -> i8 {
        assert!(t >= 1 && t <= self.len, "sign index {t} outside 1..={}", self.len);
        if (self.bits >> (self.len - t)) & 1 == 1 {
            1
        } else {
            -1
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        (1..=self.len).map(|t| self.sign(t)).collect()
    }

    /// The first `t - 1` signs as a packed prefix.
    pub fn prefix(&self, t: usize) -> u64 {
        self.bits >> (self.len + 1 - t)
    }

    pub fn negate(&self) -> Self {
        let mask = if self.len == 0 { 0 } else { (1u64 << self.len) - 1 };
        SignPath { bits: !self.bits & mask, len: self.len }
    }

    /// All `2^len` paths in lexicographic order.
    pub fn all(len: usize) -> impl Iterator<Item = SignPath> {
        (0..(1u64 << len)).map(move |bits| SignPath { bits, len })
    }
}

/// Offset of the level-`t` node below `prefix` (which packs `t - 1` signs).
#[inline]
pub fn node_offset(t: usize, prefix: u64) -> usize {
    (1usize << (t - 1)) - 1 + prefix as usize
}

/// Offset of the level-`t` node on path `path` of a depth-`depth` tree.
#[inline]
pub fn path_offset(depth: usize, path: u64, t: usize) -> usize {
    node_offset(t, path >> (depth + 1 - t))
}

/// Level (1-based) of the node stored at `offset`.
#[inline]
pub fn level_of(offset: usize) -> usize {
    (usize::BITS - (offset + 1).leading_zeros()) as usize
}

/// A complete binary tree of depth `T ≥ 1` with node values of type `V`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tree<V> {
    depth: usize,
    values: Vec<V>,
}

pub type DomainTree = Tree<usize>;
pub type RealTree = Tree<Rational>;

pub fn node_count(depth: usize) -> usize {
    (1usize << depth) - 1
}

impl<V: Clone> Tree<V> {
    pub fn new(depth: usize, values: Vec<V>) -> Result<Self> {
        if depth == 0 || depth > MAX_DEPTH {
            return Err(Error::Structural(format!("depth {depth} outside 1..={MAX_DEPTH}")));
        }
        if values.len() != node_count(depth) {
            return Err(Error::Structural(format!(
                "depth {depth} needs {} nodes, got {}",
                node_count(depth),
                values.len()
            )));
        }
        Ok(Tree { depth, values })
    }

    pub fn leaf(value: V) -> Self {
        Tree { depth: 1, values: vec![value] }
    }

    /// Tree whose every node at level `t` holds `level_values[t - 1]`.
    pub fn constant_levels(level_values: &[V]) -> Result<Self> {
        let depth = level_values.len();
        Self::from_fn(depth, |t, _| level_values[t - 1].clone())
    }

    /// Builds a tree from `f(level, prefix)`.
    pub fn from_fn<F: FnMut(usize, u64) -> V>(depth: usize, mut f: F) -> Result<Self> {
        if depth == 0 || depth > MAX_DEPTH {
            return Err(Error::Structural(format!("depth {depth} outside 1..={MAX_DEPTH}")));
        }
        let mut values = Vec::with_capacity(node_count(depth));
        for t in 1..=depth {
            for prefix in 0..(1u64 << (t - 1)) {
                values.push(f(t, prefix));
            }
        }
        Ok(Tree { depth, values })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn root(&self) -> &V {
        &self.values[0]
    }

    /// `x_t(ε)`: the level-`t` value along `path`. Only the first `t - 1`
    /// signs are read, so `path` may be shorter than the depth.
    pub fn eval_path(&self, path: &SignPath, t: usize) -> Result<&V> {
        if t == 0 || t > self.depth {
            return Err(Error::Bounds(format!("round {t} outside 1..={}", self.depth)));
        }
        if path.len() + 1 < t {
            return Err(Error::Bounds(format!("path of length {} cannot reach level {t}", path.len())));
        }
        Ok(&self.values[node_offset(t, path.prefix(t))])
    }

    /// Fast evaluation for a packed full-length path index.
    #[inline]
    pub fn at(&self, path: u64, t: usize) -> &V {
        &self.values[path_offset(self.depth, path, t)]
    }

    /// Values along a packed full-length path, levels `1..=T`.
    pub fn along(&self, path: u64) -> impl Iterator<Item = &V> + '_ {
        (1..=self.depth).map(move |t| self.at(path, t))
    }

    /// The node value at `(level, prefix)`.
    pub fn node(&self, t: usize, prefix: u64) -> &V {
        &self.values[node_offset(t, prefix)]
    }

    fn subtree(&self, first: u64) -> Result<Self> {
        if self.depth < 2 {
            return Err(Error::Structural("a depth-1 tree has no subtrees".into()));
        }
        Self::from_fn(self.depth - 1, |t, prefix| {
            let full = (first << (t - 1)) | prefix;
            self.values[node_offset(t + 1, full)].clone()
        })
    }

    pub fn left(&self) -> Result<Self> {
        self.subtree(0)
    }

    pub fn right(&self) -> Result<Self> {
        self.subtree(1)
    }

    /// Inverse of [`join`].
    pub fn split(&self) -> Result<(V, Self, Self)> {
        Ok((self.root().clone(), self.left()?, self.right()?))
    }

    /// Tree `x^R` with `x^R_t(ε) = x_t(-ε)`.
    pub fn reflect(&self) -> Self {
        Self::from_fn(self.depth, |t, prefix| {
            let mask = (1u64 << (t - 1)) - 1;
            self.values[node_offset(t, !prefix & mask)].clone()
        })
        .expect("reflection keeps the depth")
    }

    pub fn map<U: Clone, F: FnMut(&V) -> U>(&self, f: F) -> Tree<U> {
        Tree { depth: self.depth, values: self.values.iter().map(f).collect() }
    }

    pub fn try_map<U: Clone, F: FnMut(&V) -> Result<U>>(&self, f: F) -> Result<Tree<U>> {
        Ok(Tree { depth: self.depth, values: self.values.iter().map(f).collect::<Result<_>>()? })
    }

    /// Node-wise combination of two trees of equal depth.
    pub fn zip_with<W: Clone, U: Clone, F: FnMut(&V, &W) -> U>(&self, other: &Tree<W>, mut f: F) -> Result<Tree<U>> {
        if self.depth != other.depth {
            return Err(Error::Structural(format!("depth mismatch {} vs {}", self.depth, other.depth)));
        }
        Ok(Tree {
            depth: self.depth,
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
        })
    }

    /// Keeps the top `depth` levels.
    pub fn truncate(&self, depth: usize) -> Result<Self> {
        if depth == 0 || depth > self.depth {
            return Err(Error::Structural(format!("cannot truncate depth {} to {depth}", self.depth)));
        }
        Ok(Tree { depth, values: self.values[..node_count(depth)].to_vec() })
    }
}

impl<V: Clone + Ord> Tree<V> {
    /// `Img(x)`: the set of all node values.
    pub fn image(&self) -> BTreeSet<V> {
        self.values.iter().cloned().collect()
    }
}

/// Joins two subtrees of equal depth under a new root.
pub fn join<V: Clone>(root: V, left: &Tree<V>, right: &Tree<V>) -> Result<Tree<V>> {
    if left.depth != right.depth {
        return Err(Error::Structural(format!(
            "cannot join subtrees of depth {} and {}",
            left.depth, right.depth
        )));
    }
    Tree::from_fn(left.depth + 1, |t, prefix| {
        if t == 1 {
            return root.clone();
        }
        let first = prefix >> (t - 2);
        let rest = prefix & ((1u64 << (t - 2)) - 1);
        let side = if first == 0 { left } else { right };
        side.values[node_offset(t - 1, rest)].clone()
    })
}

/// Number of domain-valued trees of the given depth, if it fits in a `u64`.
pub fn tree_count(domain_size: usize, depth: usize) -> Option<u64> {
    if depth == 0 || depth > MAX_DEPTH {
        return None;
    }
    (domain_size as u64).checked_pow(u32::try_from(node_count(depth)).ok()?)
}

/// Iterator over every domain-valued tree, in lexicographic order of the flat arrays.
pub struct TreeEnumerator {
    domain_size: usize,
    depth: usize,
    next: Option<Vec<usize>>,
}

impl Iterator for TreeEnumerator {
    type Item = DomainTree;

    fn next(&mut self) -> Option<DomainTree> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        let mut carried = true;
        while i > 0 && carried {
            i -= 1;
            succ[i] += 1;
            if succ[i] == self.domain_size {
                succ[i] = 0;
            } else {
                carried = false;
            }
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(Tree { depth: self.depth, values: current })
    }
}

/// All `n^(2^T - 1)` domain-valued trees of depth `T`.
pub fn enumerate_trees(domain_size: usize, depth: usize, budget: u64) -> Result<TreeEnumerator> {
    if domain_size == 0 {
        return Err(Error::Domain("domain must be nonempty".into()));
    }
    let count = tree_count(domain_size, depth).ok_or_else(|| {
        Error::Capacity(format!("tree count {domain_size}^(2^{depth}-1) overflows; use local search"))
    })?;
    if count > budget {
        return Err(Error::Capacity(format!(
            "{count} trees exceed the enumeration budget {budget}; use local search"
        )));
    }
    Ok(TreeEnumerator { domain_size, depth, next: Some(vec![0; node_count(depth)]) })
}

/// A tree with every node drawn uniformly from `0..domain_size`.
pub fn random_tree<R: rand::Rng + ?Sized>(domain_size: usize, depth: usize, rng: &mut R) -> Result<DomainTree> {
    if domain_size == 0 {
        return Err(Error::Domain("domain must be nonempty".into()));
    }
    Tree::new(depth, (0..node_count(depth)).map(|_| rng.gen_range(0..domain_size)).collect())
}

#[derive(Serialize, Deserialize)]
struct DomainTreeJson {
    depth: usize,
    values: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RealTreeJson {
    depth: usize,
    #[serde(with = "serde_rational_vec")]
    values: Vec<Rational>,
}

impl DomainTree {
    pub fn from_json(s: &str) -> Result<Self> {
        let j: DomainTreeJson = serde_json::from_str(s)?;
        Tree::new(j.depth, j.values)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(DomainTreeJson { depth: self.depth, values: self.values.clone() })
            .expect("plain struct serializes")
    }
}

impl RealTree {
    pub fn from_json(s: &str) -> Result<Self> {
        let j: RealTreeJson = serde_json::from_str(s)?;
        Tree::new(j.depth, j.values)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(RealTreeJson { depth: self.depth, values: self.values.clone() })
            .expect("plain struct serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Walks child pointers explicitly instead of using offset arithmetic.
    fn pointer_walk(t: &Tree<i32>, signs: &[i8], level: usize) -> i32 {
        let mut idx = 0usize;
        for &s in &signs[..level - 1] {
            idx = if s < 0 { 2 * idx + 1 } else { 2 * idx + 2 };
        }
        t.values()[idx]
    }

    fn seven() -> Tree<i32> {
        Tree::new(3, (1..=7).collect()).unwrap()
    }

    #[test]
    fn root_is_constant() {
        let t = Tree::leaf(5);
        for p in SignPath::all(1) {
            assert_eq!(*t.eval_path(&p, 1).unwrap(), 5);
        }
    }

    #[test]
    fn depth_two_left_child() {
        let t = Tree::new(2, vec![1, 2, 3]).unwrap();
        let p = SignPath::from_signs(&[-1]).unwrap();
        assert_eq!(*t.eval_path(&p, 2).unwrap(), 2);
    }

    #[test]
    fn depth_three_offset_six() {
        let t = seven();
        let p = SignPath::from_signs(&[1, 1, -1]).unwrap();
        assert_eq!(*t.eval_path(&p, 3).unwrap(), 7);
        for p in SignPath::all(3) {
            for level in 1..=3 {
                assert_eq!(*t.eval_path(&p, level).unwrap(), pointer_walk(&t, &p.signs(), level));
            }
        }
    }

    #[test]
    fn out_of_range_round_is_bounds_error() {
        let t = seven();
        let p = SignPath::from_signs(&[1, 1, 1]).unwrap();
        assert!(matches!(t.eval_path(&p, 0), Err(Error::Bounds(_))));
        assert!(matches!(t.eval_path(&p, 4), Err(Error::Bounds(_))));
    }

    #[test]
    fn short_path_reads_only_prefix() {
        let t = seven();
        let p = SignPath::from_signs(&[1]).unwrap();
        assert_eq!(*t.eval_path(&p, 2).unwrap(), 3);
        assert!(t.eval_path(&p, 3).is_err());
    }

    #[test]
    fn join_basics() {
        let j = join(1, &Tree::leaf(2), &Tree::leaf(3)).unwrap();
        let p = SignPath::from_signs(&[-1]).unwrap();
        assert_eq!(*j.eval_path(&p, 2).unwrap(), 2);
        let a = Tree::new(2, vec![1, 2, 3]).unwrap();
        let b = Tree::new(2, vec![4, 5, 6]).unwrap();
        let j = join(0, &a, &b).unwrap();
        assert_eq!(j.values().len(), 7);
        assert_eq!(j.split().unwrap(), (0, a.clone(), b.clone()));
        assert!(matches!(join(0, &a, &Tree::leaf(1)), Err(Error::Structural(_))));
    }

    #[test]
    fn reflect_swaps_children() {
        let t = Tree::new(2, vec!['a', 'b', 'c']).unwrap();
        assert_eq!(t.reflect().values(), &['a', 'c', 'b']);
        let sym = Tree::constant_levels(&[1, 2, 3]).unwrap();
        assert_eq!(sym.reflect(), sym);
    }

    #[test]
    fn ragged_trees_rejected() {
        assert!(Tree::new(2, vec![1, 2]).is_err());
        assert!(Tree::<i32>::new(0, vec![]).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_trees(1, 3, DEFAULT_TREE_BUDGET).unwrap().count(), 1);
        assert_eq!(enumerate_trees(2, 2, DEFAULT_TREE_BUDGET).unwrap().count(), 8);
        assert_eq!(enumerate_trees(3, 2, DEFAULT_TREE_BUDGET).unwrap().count(), 27);
        let all: Vec<_> = enumerate_trees(2, 2, DEFAULT_TREE_BUDGET).unwrap().collect();
        let mut sorted = all.clone();
        sorted.sort_by(|a, b| a.values().cmp(b.values()));
        assert_eq!(all, sorted);
        assert!(matches!(enumerate_trees(4, 4, 1000), Err(Error::Capacity(_))));
    }

    #[test]
    fn apply_matches_eval_composition() {
        let x = Tree::new(2, vec![0usize, 1, 2]).unwrap();
        let row = [5, 7, 9];
        let fx = x.map(|&i| row[i]);
        for p in SignPath::all(2) {
            for t in 1..=2 {
                assert_eq!(*fx.eval_path(&p, t).unwrap(), row[*x.eval_path(&p, t).unwrap()]);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let x = Tree::new(2, vec![0usize, 1, 0]).unwrap();
        let back = DomainTree::from_json(&x.to_json().to_string()).unwrap();
        assert_eq!(back, x);
        let r = RealTree::from_json(r#"{"depth":2,"values":["1/2",-1,"0.25"]}"#).unwrap();
        assert_eq!(r.values()[0], Rational::new(1, 2));
        assert_eq!(RealTree::from_json(&r.to_json().to_string()).unwrap(), r);
    }

    #[test]
    fn level_of_offsets() {
        assert_eq!(level_of(0), 1);
        assert_eq!(level_of(1), 2);
        assert_eq!(level_of(2), 2);
        assert_eq!(level_of(6), 3);
        assert_eq!(level_of(7), 4);
    }
}
