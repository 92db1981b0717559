//! Exact tail probabilities of the symmetrized supremum on a fixed tree.

use num_traits::Signed;
use rayon::prelude::*;
use serde_json::json;

use crate::classes::FunctionClass;
use crate::covers::{cover_number, CoverMode, Norm, MAX_EXACT_DEPTH, MAX_EXACT_FUNCTIONS};
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, rat, to_f64, Rational};
use crate::shattering::fat_dim;
use crate::trees::DomainTree;

/// Deepest tree whose paths are enumerated.
pub const MAX_TAIL_DEPTH: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct TailReport {
    pub alpha: Rational,
    pub depth: usize,
    /// Paths on which `sup_f |(1/T) Σ ε_t f(x_t(ε))| > α/4`.
    pub violating: u64,
    /// `violating / 2^T`.
    pub lhs: Rational,
    /// `2 |V| exp(-Tα²/128)` for the `ℓ1` cover `V` at `α/8` that was found.
    pub rhs: f64,
    pub cover_size: usize,
    pub cover_mode: CoverMode,
    pub fat: i32,
    /// `2 (16eT/α)^fat exp(-Tα²/128)` with `fat` at scale `α/8`.
    pub fat_rhs: f64,
    pub holds: bool,
}

impl TailReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "alpha": fmt_rational(&self.alpha),
            "depth": self.depth,
            "violating": self.violating,
            "lhs": fmt_rational(&self.lhs),
            "lhs_f64": to_f64(&self.lhs),
            "rhs": self.rhs,
            "cover_size": self.cover_size,
            "cover_mode": format!("{:?}", self.cover_mode).to_lowercase(),
            "fat": self.fat,
            "fat_rhs": self.fat_rhs,
            "holds": self.holds,
        })
    }
}

/// Number of sign paths on which `sup_f |Σ_t ε_t f(x_t(ε))| > T·threshold`.
pub fn tail_count(class: &FunctionClass, x: &DomainTree, threshold: &Rational) -> Result<u64> {
    let depth = x.depth();
    if depth > MAX_TAIL_DEPTH {
        return Err(Error::Capacity(format!("path enumeration is limited to depth {MAX_TAIL_DEPTH}")));
    }
    if let Some(&p) = x.values().iter().find(|&&p| p >= class.domain_size()) {
        return Err(Error::Lookup(format!("tree point {p} outside domain of size {}", class.domain_size())));
    }
    // |S| / scale > T · n/d  ⇔  |S| · d > T · n · scale
    let (n, d) = (i128::from(*threshold.numer()), i128::from(*threshold.denom()));
    let cut = depth as i128 * n * i128::from(class.scale());
    let table = class.table();
    Ok((0..1u64 << depth)
        .into_par_iter()
        .filter(|&path| {
            table.iter().any(|row| {
                let s: i64 = (1..=depth)
                    .map(|t| {
                        let v = row[*x.at(path, t)];
                        if (path >> (depth - t)) & 1 == 1 {
                            v
                        } else {
                            -v
                        }
                    })
                    .sum();
                i128::from(s.abs()) * d > cut
            })
        })
        .count() as u64)
}

/// Compares the exact tail probability at `α/4` against the cover-based bound.
///
/// The `ℓ1` cover at `α/8` is searched exactly when the class and tree are
/// small, and greedily otherwise; either way its size is at least the
/// covering number, so the bound only grows.
pub fn pollard_check(class: &FunctionClass, x: &DomainTree, alpha: Rational) -> Result<TailReport> {
    if class.is_empty() {
        return Err(Error::Domain("empty class".into()));
    }
    if !alpha.is_positive() {
        return Err(Error::Domain("α must be positive".into()));
    }
    let depth = x.depth();
    let violating = tail_count(class, x, &(alpha / int(4)))?;
    let lhs = rat(violating as i64, 1 << depth);
    let mode = if class.len() <= MAX_EXACT_FUNCTIONS && depth <= MAX_EXACT_DEPTH { CoverMode::Exact } else { CoverMode::Greedy };
    let cover = cover_number(class, x, alpha / int(8), Norm::L1, mode)?;
    let a = to_f64(&alpha);
    let t = depth as f64;
    let tail = (-t * a * a / 128.0).exp();
    let rhs = 2.0 * cover.len() as f64 * tail;
    let fat = fat_dim(class, alpha / int(8))?;
    let fat_rhs = 2.0 * (16.0 * std::f64::consts::E * t / a).powi(fat.max(0)) * tail;
    Ok(TailReport {
        alpha,
        depth,
        violating,
        holds: to_f64(&lhs) <= rhs,
        lhs,
        rhs,
        cover_size: cover.len(),
        cover_mode: mode,
        fat,
        fat_rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::ClassKind;
    use crate::trees::Tree;

    #[test]
    fn singleton_and_large_alpha() {
        let c = FunctionClass::new(2, 1, ClassKind::RealGrid, vec![vec![1, -1]]).unwrap();
        let x = Tree::new(2, vec![0, 1, 0]).unwrap();
        let r = pollard_check(&c, &x, int(8)).unwrap();
        assert_eq!(r.lhs, int(0));
        assert!(r.holds);
        let pennies = FunctionClass::new(2, 1, ClassKind::RealGrid, vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(pollard_check(&pennies, &x, int(5)).unwrap().violating, 0);
    }

    #[test]
    fn pennies_depth_eight() {
        let c = FunctionClass::new(2, 1, ClassKind::RealGrid, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let x = Tree::from_fn(8, |t, p| ((t as u64 + p) % 2) as usize).unwrap();
        let r = pollard_check(&c, &x, int(1)).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(r.rhs <= r.fat_rhs);
    }
}
