//! Rademacher averages of the linear class `{x ↦ ⟨w, x⟩ : ‖w‖₂ ≤ 1}`.
//!
//! On each path the supremum over the unit ball is `‖Σ_t ε_t x_t(ε)‖₂`, so
//! the per-tree value is an exact average of norms over all `2^T` paths.

use rand::Rng;

use crate::error::{Error, Result};
use crate::harness::rng::stream_rng;
use crate::trees::DomainTree;

pub const MAX_LINEAR_DEPTH: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearReport {
    pub depth: usize,
    /// One value per tree.
    pub values: Vec<f64>,
    /// `sqrt(2T) · max ‖x‖₂`.
    pub bound: f64,
    pub holds: bool,
}

impl LinearReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "depth": self.depth,
            "values": self.values,
            "bound": self.bound,
            "holds": self.holds,
        })
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// `E_ε ‖Σ_t ε_t x_t(ε)‖₂` for one tree whose nodes index into `vectors`.
pub fn linear_rad_tree(vectors: &[Vec<f64>], x: &DomainTree) -> Result<f64> {
    let depth = x.depth();
    if depth > MAX_LINEAR_DEPTH {
        return Err(Error::Capacity(format!("linear check is limited to depth {MAX_LINEAR_DEPTH}")));
    }
    let dim = vectors.first().map_or(0, Vec::len);
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::Structural("vectors have different dimensions".into()));
    }
    if let Some(&p) = x.values().iter().find(|&&p| p >= vectors.len()) {
        return Err(Error::Lookup(format!("tree point {p} outside {} vectors", vectors.len())));
    }
    let mut total = 0.0;
    for path in 0..1u64 << depth {
        let mut s = vec![0.0; dim];
        for t in 1..=depth {
            let sign = if (path >> (depth - t)) & 1 == 1 { 1.0 } else { -1.0 };
            for (a, b) in s.iter_mut().zip(&vectors[*x.at(path, t)]) {
                *a += sign * b;
            }
        }
        total += norm(&s);
    }
    Ok(total / (1u64 << depth) as f64)
}

/// Checks every tree against `sqrt(2T) · max ‖x‖₂`, with a `1e-9` tolerance.
pub fn linear_rad_check(vectors: &[Vec<f64>], trees: &[DomainTree]) -> Result<LinearReport> {
    let depth = trees.first().map(DomainTree::depth).ok_or_else(|| Error::Domain("no trees".into()))?;
    if trees.iter().any(|x| x.depth() != depth) {
        return Err(Error::Structural("trees have different depths".into()));
    }
    let radius = vectors.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let bound = (2.0 * depth as f64).sqrt() * radius;
    let values = trees.iter().map(|x| linear_rad_tree(vectors, x)).collect::<Result<Vec<_>>>()?;
    let holds = values.iter().all(|&v| v <= bound + 1e-9);
    Ok(LinearReport { depth, values, bound, holds })
}

/// `count` vectors of unit length in `R^dim`, seeded.
pub fn random_unit_vectors(count: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = stream_rng(seed, 0);
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = norm(&v);
            if n > 1e-3 {
                break v.into_iter().map(|a| a / n).collect();
            }
        })
        .collect()
}
