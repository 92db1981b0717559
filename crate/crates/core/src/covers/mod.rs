//! Covers and packings of function classes on trees.
//!
//! Distances between two value sequences along a path are the normalized
//! `ℓp` distances `((1/T) Σ |a_t - b_t|^p)^(1/p)`; comparisons against a
//! radius `α` are done exactly as `Σ |a_t - b_t|^p ≤ T α^p`.

mod construct;
mod packing;
mod pointwise;
mod search;

pub use construct::{cover_construct, g_k, g_k_f64, sauer_bound, ConstructMode};
pub use packing::{packing_number, strong_packing_number};
pub use pointwise::{compose_class, cover_compose, pointwise_entropy, PiecewiseLinear};
pub use search::{cover_number, zero_cover_min, CoverMode, MAX_EXACT_DEPTH, MAX_EXACT_FUNCTIONS};

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::classes::FunctionClass;
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, Rational};
use crate::trees::{DomainTree, RealTree, SignPath};

/// Which distance a cover or packing is measured in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Norm {
    /// Exact node equality along the path.
    Zero,
    L1,
    L2,
    Inf,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::Zero => "0",
            Norm::L1 => "1",
            Norm::L2 => "2",
            Norm::Inf => "inf",
        })
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "0" | "zero" => Ok(Norm::Zero),
            "1" | "l1" => Ok(Norm::L1),
            "2" | "l2" => Ok(Norm::L2),
            "inf" | "infinity" | "linf" | "max" => Ok(Norm::Inf),
            other => Err(Error::Parse(format!("unknown norm {other:?}"))),
        }
    }
}

/// A finite set of real-valued trees used as a cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSet {
    pub trees: Vec<RealTree>,
    pub norm: Norm,
    pub radius: Rational,
    /// Set when the cover trees were searched on a finite candidate grid, so
    /// that the size is only an upper bound on the true covering number.
    pub grid_restricted: bool,
}

impl CoverSet {
    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "norm": self.norm.to_string(),
            "radius": fmt_rational(&self.radius),
            "grid_restricted": self.grid_restricted,
            "trees": self.trees.iter().map(RealTree::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Whether two sequences are within `radius` of each other.
pub fn within(norm: Norm, a: &[Rational], b: &[Rational], radius: &Rational) -> bool {
    let t = int(a.len() as i64);
    let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
    match norm {
        Norm::Zero => a == b,
        Norm::Inf => diffs.fold(Rational::zero(), |m, d| m.max(d)) <= *radius,
        Norm::L1 => diffs.sum::<Rational>() <= t * radius,
        Norm::L2 => diffs.map(|d| d * d).sum::<Rational>() <= t * radius * radius,
    }
}

/// Whether two sequences are strictly more than `radius` apart.
pub fn separated(norm: Norm, a: &[Rational], b: &[Rational], radius: &Rational) -> bool {
    match norm {
        Norm::Zero => a != b,
        _ => !within(norm, a, b, radius),
    }
}

/// Values of `f(x)` along a full path.
pub fn path_values(class: &FunctionClass, f: usize, x: &DomainTree, path: u64) -> Vec<Rational> {
    x.along(path).map(|&p| class.value(f, p)).collect()
}

/// The distinct trees `f(x)`, together with one representative row each.
pub fn projection(class: &FunctionClass, x: &DomainTree) -> Vec<(usize, RealTree)> {
    let mut out: Vec<(usize, RealTree)> = Vec::new();
    for f in 0..class.len() {
        let t = x.map(|&p| class.value(f, p));
        if !out.iter().any(|(_, u)| *u == t) {
            out.push((f, t));
        }
    }
    out
}

/// Checks the cover definition over every row and every path.
pub fn is_cover(cover: &CoverSet, class: &FunctionClass, x: &DomainTree) -> bool {
    let depth = x.depth();
    if cover.trees.iter().any(|v| v.depth() != depth) || x.values().iter().any(|&p| p >= class.domain_size()) {
        return false;
    }
    SignPath::all(depth).all(|eps| {
        let p = eps.index();
        let covered: Vec<Vec<Rational>> = cover.trees.iter().map(|v| v.along(p).copied().collect()).collect();
        (0..class.len()).all(|f| {
            let fv = path_values(class, f, x, p);
            covered.iter().any(|v| within(cover.norm, v, &fv, &cover.radius))
        })
    })
}

pub(crate) fn check_depths(class: &FunctionClass, x: &DomainTree) -> Result<()> {
    if let Some(&p) = x.values().iter().find(|&&p| p >= class.domain_size()) {
        return Err(Error::Lookup(format!("tree point {p} outside domain of size {}", class.domain_size())));
    }
    Ok(())
}
