//! Pointwise (sup-norm over the whole domain) covers and composition of covers.

use num_traits::{Signed, Zero};

use super::{CoverSet, Norm};
use crate::classes::FunctionClass;
use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// Up to this many rows the minimum pointwise cover is computed exactly.
const EXACT_POINTWISE_ROWS: usize = 14;

/// Number of functions needed so that every row is within `α` of one of them
/// at every point. A set of rows can share a center exactly when its spread at
/// each point is at most `2α`. Exact for small classes, greedy beyond.
pub fn pointwise_entropy(class: &FunctionClass, alpha: Rational) -> Result<usize> {
    if alpha < Rational::zero() {
        return Err(Error::Domain("radius must be nonnegative".into()));
    }
    let n = class.len();
    if n == 0 {
        return Ok(0);
    }
    let two_alpha = alpha * int(2 * class.scale());
    let fits = |rows: &[usize]| -> bool {
        (0..class.domain_size()).all(|x| {
            let lo = rows.iter().map(|&f| class.raw(f, x)).min().unwrap_or(0);
            let hi = rows.iter().map(|&f| class.raw(f, x)).max().unwrap_or(0);
            int(hi - lo) <= two_alpha
        })
    };
    if n <= EXACT_POINTWISE_ROWS {
        let size = 1usize << n;
        let feasible: Vec<bool> = (0..size)
            .map(|m| fits(&crate::classes::iter_mask(m as u64).collect::<Vec<_>>()))
            .collect();
        // best[m]: fewest groups partitioning the rows in m.
        let mut best = vec![usize::MAX; size];
        best[0] = 0;
        for m in 1..size {
            let low = m & m.wrapping_neg();
            let rest = m ^ low;
            let mut sub = rest;
            loop {
                let group = sub | low;
                if feasible[group] && best[m ^ group] != usize::MAX {
                    best[m] = best[m].min(best[m ^ group] + 1);
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        return Ok(best[size - 1]);
    }
    let mut left: Vec<usize> = (0..n).collect();
    let mut groups = 0;
    while let Some(&seed) = left.first() {
        let mut group = vec![seed];
        for &f in &left[1..] {
            group.push(f);
            if !fits(&group) {
                group.pop();
            }
        }
        left.retain(|f| !group.contains(f));
        groups += 1;
    }
    Ok(groups)
}

/// A piecewise-linear map on the reals given by breakpoints, constant beyond the ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinear {
    points: Vec<(Rational, Rational)>,
}

impl PiecewiseLinear {
    pub fn new(mut points: Vec<(Rational, Rational)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("a map needs at least one breakpoint".into()));
        }
        points.sort_by(|a, b| a.0.cmp(&b.0));
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Domain("breakpoints must have distinct abscissae".into()));
        }
        Ok(PiecewiseLinear { points })
    }

    pub fn identity() -> Self {
        PiecewiseLinear { points: vec![(int(-2), int(-2)), (int(2), int(2))] }
    }

    pub fn constant(c: Rational) -> Self {
        PiecewiseLinear { points: vec![(int(0), c)] }
    }

    /// Clamp to `[-c, c]`.
    pub fn clamp(c: Rational) -> Self {
        PiecewiseLinear { points: vec![(-c, -c), (c, c)] }
    }

    pub fn apply(&self, v: &Rational) -> Rational {
        let first = self.points[0];
        let last = *self.points.last().expect("nonempty");
        if *v <= first.0 {
            return first.1;
        }
        if *v >= last.0 {
            return last.1;
        }
        let i = self.points.iter().position(|p| p.0 >= *v).expect("v is inside the breakpoint range");
        let (x0, y0) = self.points[i - 1];
        let (x1, y1) = self.points[i];
        y0 + (y1 - y0) * (v - x0) / (x1 - x0)
    }

    /// Largest absolute slope.
    pub fn lipschitz(&self) -> Rational {
        self.points
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(Rational::zero(), |m, s| m.max(s))
    }
}

/// `{g(v) : v ∈ V, g ∈ W}`, an `ℓ∞` cover at radius `2α` of `G ∘ F`, where `V`
/// is an `ℓ∞` cover of `F` at radius `α` and `W` is a pointwise cover at a
/// radius of at most `α` of a class of 1-Lipschitz maps.
pub fn cover_compose(maps: &[PiecewiseLinear], maps_radius: Rational, cover: &CoverSet) -> Result<CoverSet> {
    if !matches!(cover.norm, Norm::Inf | Norm::Zero) {
        return Err(Error::Contract("composition needs an ℓ∞ cover".into()));
    }
    if maps_radius > cover.radius {
        return Err(Error::Contract("map cover radius exceeds the class cover radius".into()));
    }
    if let Some(g) = maps.iter().find(|g| g.lipschitz() > int(1)) {
        return Err(Error::Contract(format!("map has Lipschitz constant {} > 1", g.lipschitz())));
    }
    let mut trees = Vec::new();
    for v in &cover.trees {
        for g in maps {
            let t = v.map(|a| g.apply(a));
            if !trees.contains(&t) {
                trees.push(t);
            }
        }
    }
    Ok(CoverSet { trees, norm: Norm::Inf, radius: cover.radius * int(2), grid_restricted: cover.grid_restricted })
}

/// The class `{g ∘ f}` for the given maps, as a free-valued class.
pub fn compose_class(class: &FunctionClass, maps: &[PiecewiseLinear]) -> Result<FunctionClass> {
    let mut rows = Vec::new();
    for g in maps {
        for f in 0..class.len() {
            rows.push(class.row_values(f).iter().map(|v| g.apply(v)).collect::<Vec<_>>());
        }
    }
    FunctionClass::from_rationals(class.domain_size(), crate::classes::ClassKind::Free, &rows)
}
