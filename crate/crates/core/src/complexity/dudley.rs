//! Chaining bound on a fixed tree, and the link between Rademacher averages
//! and fat-shattering dimensions.

use num_traits::{Signed, Zero};

use super::rad::{rad_sup, SupMode};
use crate::classes::FunctionClass;
use crate::covers::{cover_number, CoverMode, Norm};
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, rat, to_f64, Rational};
use crate::shattering::fat_dim;
use crate::trees::DomainTree;

/// Scales `β_j = 2^-j`, `j = 0..=levels`, and how covers are computed at each.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainingParams {
    pub levels: usize,
    pub cover_mode: CoverMode,
}

impl Default for ChainingParams {
    fn default() -> Self {
        ChainingParams { levels: 8, cover_mode: CoverMode::Exact }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DudleyReport {
    /// Smallest bound over the candidate cut-off scales.
    pub value: f64,
    /// Cut-off scale attaining it; 0 when the 0-cover tail wins.
    pub alpha: Rational,
    /// `(β_j, N_2(β_j))` for `j = 1..=levels`.
    pub covers: Vec<(Rational, usize)>,
    pub zero_cover: usize,
    pub cover_mode: CoverMode,
}

impl DudleyReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "value": self.value,
            "alpha": fmt_rational(&self.alpha),
            "covers": self.covers.iter().map(|(b, n)| serde_json::json!({"scale": fmt_rational(b), "size": n})).collect::<Vec<_>>(),
            "zero_cover": self.zero_cover,
            "cover_mode": format!("{:?}", self.cover_mode).to_lowercase(),
        })
    }
}

/// Upper bound on `inf_α {4Tα + 12 ∫_α^1 sqrt(T ln N_2(δ, F, x)) dδ}`.
///
/// Covering numbers only grow as `δ` shrinks, so on each segment
/// `[β_{j+1}, β_j]` the integrand is bounded by its value at `β_{j+1}`.
/// Below the last scale the integrand is bounded using the 0-cover.
pub fn dudley_bound(class: &FunctionClass, x: &DomainTree, params: ChainingParams) -> Result<DudleyReport> {
    if class.table().iter().flatten().any(|v| v.abs() > class.scale()) {
        return Err(Error::Domain("chaining needs values in [-1, 1]".into()));
    }
    if params.levels == 0 {
        return Err(Error::Domain("at least one scale is needed".into()));
    }
    let t = x.depth() as f64;
    let betas: Vec<Rational> = (0..=params.levels).map(|j| rat(1, 1i64 << j)).collect();
    let mut covers = Vec::new();
    for b in &betas[1..] {
        covers.push((*b, cover_number(class, x, *b, Norm::L2, params.cover_mode)?.len()));
    }
    let zero_cover = cover_number(class, x, Rational::zero(), Norm::Zero, params.cover_mode)?.len();
    let entropy = |n: usize| (t * (n as f64).ln()).sqrt();
    let mut integral = 0.0;
    let mut best = (4.0 * t, int(1));
    for j in 0..params.levels {
        let width = to_f64(&(betas[j] - betas[j + 1]));
        integral += width * entropy(covers[j].1);
        let cand = 4.0 * t * to_f64(&betas[j + 1]) + 12.0 * integral;
        if cand < best.0 {
            best = (cand, betas[j + 1]);
        }
    }
    let tail = 12.0 * (integral + to_f64(&betas[params.levels]) * entropy(zero_cover));
    if tail < best.0 {
        best = (tail, Rational::zero());
    }
    Ok(DudleyReport { value: best.0, alpha: best.1, covers, zero_cover, cover_mode: params.cover_mode })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FatRadReport {
    pub rad: Rational,
    pub depth: usize,
    /// `(β, fat_β)` for every grid scale above `2 Rad / T`.
    pub checks: Vec<(Rational, i32)>,
    pub holds: bool,
}

/// Checks `fat_β(F) < T` for every scale `β = j/(2S)` above `2 Rad_T(F) / T`,
/// up to just past the spread of the class.
pub fn fat_rad_relation(class: &FunctionClass, depth: usize) -> Result<FatRadReport> {
    let rad = rad_sup(class, depth, SupMode::exact())?.exact.expect("exact mode is exact");
    let threshold = rad * rat(2, depth as i64);
    let step = rat(1, 2 * class.scale());
    let top = class.spread() + step;
    let mut checks = Vec::new();
    let mut beta = step;
    while beta <= top {
        if beta > threshold {
            checks.push((beta, fat_dim(class, beta)?));
        }
        beta += step;
    }
    let holds = checks.iter().all(|&(_, d)| (d as i64) < depth as i64);
    Ok(FatRadReport { rad, depth, checks, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{constants, ClassKind};
    use crate::complexity::rad_tree_exact;
    use crate::trees::Tree;

    #[test]
    fn singleton_bound_is_zero() {
        let c = constants(&[rat(1, 2)], 2).unwrap();
        let x = Tree::new(2, vec![0, 1, 0]).unwrap();
        let r = dudley_bound(&c, &x, ChainingParams::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn bound_dominates_rad() {
        let c = FunctionClass::new(2, 1, ClassKind::Binary, vec![vec![1, 1], vec![1, -1], vec![-1, 1], vec![-1, -1]]).unwrap();
        let x = Tree::new(2, vec![0, 1, 0]).unwrap();
        let r = dudley_bound(&c, &x, ChainingParams::default()).unwrap();
        assert!(to_f64(&rad_tree_exact(&c, &x).unwrap()) <= r.value);
    }

    #[test]
    fn fat_rad_examples() {
        let single = constants(&[int(0)], 1).unwrap();
        let r = fat_rad_relation(&single, 2).unwrap();
        assert!(r.holds);
        let pennies = FunctionClass::new(2, 1, ClassKind::RealGrid, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let r = fat_rad_relation(&pennies, 1).unwrap();
        assert_eq!(r.rad, rat(1, 2));
        assert!(r.checks.iter().all(|(b, _)| *b > int(1)));
        assert!(r.holds);
    }
}
