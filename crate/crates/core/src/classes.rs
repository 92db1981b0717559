//! Finite function classes on finite domains, stored as exact integer tables.
//!
//! Row `f` of a class with scale `S` holds integers `v` standing for `v / S`.
//! Domain points are indices `0..n`; any geometry lives with the caller.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::rng::stream_rng;
use crate::rational::{common_denominator, in_units, int, rat, Rational};

/// What values a class may take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassKind {
    /// Values in `{-1, +1}`.
    Binary,
    /// Values in `{0, 1/k, ..., 1}`, i.e. the integer levels `0..=k` divided by `k`.
    Levels(u32),
    /// Any grid values in `[-1, 1]`.
    RealGrid,
    /// Absolute losses, values in `[0, 2]`.
    Loss,
    /// Unrestricted grid values (shifted or rescaled classes).
    Free,
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassKind::Binary => write!(f, "binary"),
            ClassKind::Levels(k) => write!(f, "levels:{k}"),
            ClassKind::RealGrid => write!(f, "real"),
            ClassKind::Loss => write!(f, "loss"),
            ClassKind::Free => write!(f, "free"),
        }
    }
}

impl FromStr for ClassKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "binary" => return Ok(ClassKind::Binary),
            "real" | "real-grid" | "realgrid" => return Ok(ClassKind::RealGrid),
            "loss" => return Ok(ClassKind::Loss),
            "free" => return Ok(ClassKind::Free),
            _ => {}
        }
        let k = s
            .strip_prefix("levels")
            .map(|r| r.trim_matches(|c| c == ':' || c == '(' || c == ')'))
            .and_then(|r| r.parse::<u32>().ok())
            .filter(|&k| k > 0)
            .ok_or_else(|| Error::Parse(format!("unknown class kind {s:?}")))?;
        Ok(ClassKind::Levels(k))
    }
}

/// A finite class of functions `0..n -> Q`, duplicate rows removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionClass {
    domain_size: usize,
    scale: i64,
    kind: ClassKind,
    table: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct ClassJson {
    domain_size: usize,
    scale: i64,
    kind: String,
    functions: Vec<Vec<i64>>,
}

impl FunctionClass {
    pub fn new(domain_size: usize, scale: i64, kind: ClassKind, table: Vec<Vec<i64>>) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::Domain("domain must be nonempty".into()));
        }
        if scale <= 0 {
            return Err(Error::Domain(format!("scale {scale} must be positive")));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != domain_size {
                return Err(Error::Structural(format!(
                    "row {i} has {} entries, domain has {domain_size}",
                    row.len()
                )));
            }
            for &v in row {
                let ok = match kind {
                    ClassKind::Binary => v == scale || v == -scale,
                    ClassKind::Levels(k) => {
                        scale % k as i64 == 0 && (0..=scale).contains(&v) && v % (scale / k as i64) == 0
                    }
                    ClassKind::RealGrid => v.abs() <= scale,
                    ClassKind::Loss => (0..=2 * scale).contains(&v),
                    ClassKind::Free => true,
                };
                if !ok {
                    return Err(Error::Domain(format!("value {v}/{scale} not allowed for kind {kind}")));
                }
            }
        }
        let mut seen = HashSet::new();
        let table = table.into_iter().filter(|r| seen.insert(r.clone())).collect();
        Ok(FunctionClass { domain_size, scale, kind, table })
    }

    /// Builds a class from exact values, choosing the smallest common scale.
    pub fn from_rationals(domain_size: usize, kind: ClassKind, rows: &[Vec<Rational>]) -> Result<Self> {
        let mut scale = common_denominator(rows.iter().flatten());
        if let ClassKind::Levels(k) = kind {
            scale = scale.lcm(&(k as i64));
        }
        let table = rows.iter().map(|r| r.iter().map(|v| in_units(v, scale)).collect()).collect();
        Self::new(domain_size, scale, kind, table)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: ClassJson = serde_json::from_str(s)?;
        Self::new(j.domain_size, j.scale, j.kind.parse()?, j.functions)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ClassJson {
            domain_size: self.domain_size,
            scale: self.scale,
            kind: self.kind.to_string(),
            functions: self.table.clone(),
        })
        .expect("plain struct serializes")
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn kind(&self) -> ClassKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn table(&self) -> &[Vec<i64>] {
        &self.table
    }

    pub fn row(&self, f: usize) -> &[i64] {
        &self.table[f]
    }

    /// Raw integer value `S * f(x)`.
    #[inline]
    pub fn raw(&self, f: usize, x: usize) -> i64 {
        self.table[f][x]
    }

    pub fn value(&self, f: usize, x: usize) -> Rational {
        rat(self.table[f][x], self.scale)
    }

    pub fn row_values(&self, f: usize) -> Vec<Rational> {
        (0..self.domain_size).map(|x| self.value(f, x)).collect()
    }

    /// The table expressed in units of `1/unit`; `unit` must be a multiple of the scale.
    pub fn table_in_units(&self, unit: i64) -> Vec<Vec<i64>> {
        assert!(unit % self.scale == 0, "unit {unit} is not a multiple of scale {}", self.scale);
        let m = unit / self.scale;
        self.table.iter().map(|r| r.iter().map(|v| v * m).collect()).collect()
    }

    /// Sorted distinct raw values taken at `x` by the rows in `mask`.
    pub fn values_at(&self, mask: u64, x: usize) -> Vec<i64> {
        let mut v: Vec<i64> = iter_mask(mask).map(|f| self.table[f][x]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Bitset of all rows; only meaningful for classes of at most 64 rows.
    pub fn full_mask(&self) -> u64 {
        full_mask(self.table.len())
    }

    /// Errors unless the rows fit in a `u64` bitset.
    pub fn require_bitset(&self) -> Result<()> {
        if self.table.len() > 64 {
            return Err(Error::Capacity(format!("{} functions exceed the exact-mode limit of 64", self.table.len())));
        }
        Ok(())
    }

    /// Largest minus smallest value over the whole table.
    pub fn spread(&self) -> Rational {
        let all = self.table.iter().flatten();
        match (all.clone().min(), all.max()) {
            (Some(lo), Some(hi)) => rat(hi - lo, self.scale),
            _ => Rational::zero(),
        }
    }

    pub fn subclass(&self, rows: &[usize]) -> Self {
        FunctionClass {
            domain_size: self.domain_size,
            scale: self.scale,
            kind: self.kind,
            table: rows.iter().map(|&f| self.table[f].clone()).collect(),
        }
    }

    pub fn subclass_mask(&self, mask: u64) -> Self {
        self.subclass(&iter_mask(mask).collect::<Vec<_>>())
    }

    /// Rows with `f(x)` in `(lo, hi]`.
    pub fn restrict_interval(&self, x: usize, lo: &Rational, hi: &Rational) -> Result<Self> {
        if x >= self.domain_size {
            return Err(Error::Lookup(format!("point {x} outside domain of size {}", self.domain_size)));
        }
        let keep: Vec<usize> = (0..self.len())
            .filter(|&f| {
                let v = self.value(f, x);
                &v > lo && &v <= hi
            })
            .collect();
        Ok(self.subclass(&keep))
    }

    /// `V(r, x)`: rows with `f(x)` in `(r - α/2, r + α/2]`.
    pub fn restrict(&self, x: usize, r: &Rational, alpha: &Rational) -> Result<Self> {
        let h = alpha / int(2);
        self.restrict_interval(x, &(r - h), &(r + h))
    }

    /// Rows whose value at `x` rounds to grid point `r`.
    pub fn restrict_bucket(&self, x: usize, r: &Rational, grid: &AlphaGrid) -> Result<Self> {
        if x >= self.domain_size {
            return Err(Error::Lookup(format!("point {x} outside domain of size {}", self.domain_size)));
        }
        let mut keep = Vec::new();
        for f in 0..self.len() {
            if &grid.floor(&self.value(f, x))? == r {
                keep.push(f);
            }
        }
        Ok(self.subclass(&keep))
    }

    /// Applies `g(f, x, f(x))` to every entry and rebuilds the class.
    pub fn map_values<G: FnMut(usize, usize, Rational) -> Rational>(&self, kind: ClassKind, mut g: G) -> Result<Self> {
        let rows: Vec<Vec<Rational>> = (0..self.len())
            .map(|f| (0..self.domain_size).map(|x| g(f, x, self.value(f, x))).collect())
            .collect();
        Self::from_rationals(self.domain_size, kind, &rows)
    }
}

pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Indices of the set bits, ascending.
pub fn iter_mask(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// The discretization `B_α = {-1 + α/2, -1 + 3α/2, ...}` of `[-1, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaGrid {
    alpha: Rational,
    points: Vec<Rational>,
}

impl AlphaGrid {
    pub fn new(alpha: Rational) -> Result<Self> {
        if alpha <= Rational::zero() {
            return Err(Error::Domain(format!("scale {alpha} must be positive")));
        }
        let top = int(1) + alpha / int(2);
        let mut points = Vec::new();
        let mut r = int(-1) + alpha / int(2);
        while r < top {
            points.push(r);
            r += alpha;
        }
        Ok(AlphaGrid { alpha, points })
    }

    pub fn alpha(&self) -> Rational {
        self.alpha
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `⌊a⌋_α`: the nearest grid point, ties to the smaller one.
    pub fn floor(&self, a: &Rational) -> Result<Rational> {
        if a.abs() > int(1) {
            return Err(Error::Domain(format!("{a} lies outside [-1, 1]")));
        }
        let mut best = self.points[0];
        for p in &self.points[1..] {
            if (p - a).abs() < (best - a).abs() {
                best = *p;
            }
        }
        Ok(best)
    }

    /// Index of `⌊a⌋_α` in `points`.
    pub fn floor_index(&self, a: &Rational) -> Result<usize> {
        let r = self.floor(a)?;
        Ok(self.points.iter().position(|p| *p == r).expect("floor returns a grid point"))
    }
}

pub fn floor_alpha(a: &Rational, grid: &AlphaGrid) -> Result<Rational> {
    grid.floor(a)
}

/// The loss class `{(x, y) ↦ |f(x) - y|}` on `X × Y`; point `(x, j)` has index `x * |Y| + j`.
pub fn supervised_loss_class(class: &FunctionClass, labels: &[Rational]) -> Result<FunctionClass> {
    if labels.is_empty() {
        return Err(Error::Domain("label set must be nonempty".into()));
    }
    if labels.iter().any(|y| y.abs() > int(1)) {
        return Err(Error::Domain("labels must lie in [-1, 1]".into()));
    }
    let mut unit = class.scale;
    for y in labels {
        let d = *y.denom();
        unit = unit
            .checked_div(unit.gcd(&d))
            .and_then(|u| u.checked_mul(d))
            .ok_or_else(|| Error::Capacity("common grid of labels and class overflows".into()))?;
    }
    let base = class.table_in_units(unit);
    let ys: Vec<i64> = labels.iter().map(|y| in_units(y, unit)).collect();
    let table = base
        .iter()
        .map(|row| row.iter().flat_map(|&v| ys.iter().map(move |&y| (v - y).abs())).collect())
        .collect();
    FunctionClass::new(class.domain_size * labels.len(), unit, ClassKind::Loss, table)
}

/// Splits a loss-class point index into `(x, label index)`.
pub fn split_point(point: usize, label_count: usize) -> (usize, usize) {
    (point / label_count, point % label_count)
}

/// The tree with distinct points `0..2^T-1` in storage order, and the class of
/// `{0,1}`-valued functions each equal to 1 on exactly one leaf.
pub fn leaf_class(depth: usize) -> Result<(FunctionClass, crate::trees::DomainTree)> {
    if depth == 0 || depth > 12 {
        return Err(Error::Capacity(format!("leaf class depth {depth} outside 1..=12")));
    }
    let n = crate::trees::node_count(depth);
    let first_leaf = (1usize << (depth - 1)) - 1;
    let table = (first_leaf..n)
        .map(|leaf| (0..n).map(|x| i64::from(x == leaf)).collect())
        .collect();
    let class = FunctionClass::new(n, 1, ClassKind::Levels(1), table)?;
    let tree = crate::trees::Tree::new(depth, (0..n).collect())?;
    Ok((class, tree))
}

/// Binary step functions `x ↦ +1 if x ≥ s else -1`, for `s = 0..=n`.
pub fn thresholds(n: usize) -> Result<FunctionClass> {
    let table = (0..=n)
        .map(|s| (0..n).map(|x| if x >= s { 1 } else { -1 }).collect())
        .collect();
    FunctionClass::new(n, 1, ClassKind::Binary, table)
}

/// All `2^n` functions `0..n -> {±1}`.
pub fn full_binary(n: usize) -> Result<FunctionClass> {
    if n > 16 {
        return Err(Error::Capacity(format!("2^{n} functions is too many")));
    }
    let table = (0..1u64 << n)
        .map(|bits| (0..n).map(|x| if (bits >> (n - 1 - x)) & 1 == 1 { 1 } else { -1 }).collect())
        .collect();
    FunctionClass::new(n, 1, ClassKind::Binary, table)
}

/// Constant functions with the given values on a domain of size `n`.
pub fn constants(values: &[Rational], n: usize) -> Result<FunctionClass> {
    let rows: Vec<Vec<Rational>> = values.iter().map(|v| vec![*v; n]).collect();
    let kind = if values.iter().all(|v| v.abs() == int(1)) { ClassKind::Binary } else { ClassKind::RealGrid };
    FunctionClass::from_rationals(n, kind, &rows)
}

/// `m` rows of uniform values on the grid `{-S, ..., S} / S`; duplicates are dropped.
pub fn random_class(n: usize, m: usize, scale: i64, seed: u64) -> Result<FunctionClass> {
    if scale <= 0 {
        return Err(Error::Domain(format!("scale {scale} must be positive")));
    }
    let mut rng = stream_rng(seed, 0);
    let table = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-scale..=scale)).collect()).collect();
    FunctionClass::new(n, scale, ClassKind::RealGrid, table)
}

/// Random `{0, 1/k, ..., 1}`-valued class.
pub fn random_levels_class(n: usize, m: usize, k: u32, seed: u64) -> Result<FunctionClass> {
    let mut rng = stream_rng(seed, 1);
    let table = (0..m).map(|_| (0..n).map(|_| rng.gen_range(0..=k as i64)).collect()).collect();
    FunctionClass::new(n, k as i64, ClassKind::Levels(k), table)
}

/// Random binary class.
pub fn random_binary_class(n: usize, m: usize, seed: u64) -> Result<FunctionClass> {
    let mut rng = stream_rng(seed, 2);
    let table = (0..m)
        .map(|_| (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect())
        .collect();
    FunctionClass::new(n, 1, ClassKind::Binary, table)
}

/// Linear functions `x ↦ <w, x>` on the given points, for every weight on the
/// grid `step·Z^m` inside the Euclidean unit ball. Points must have norm at most 1.
pub fn linear_ball_class(points: &[Vec<Rational>], step: Rational, budget: usize) -> Result<FunctionClass> {
    let m = points.first().map(Vec::len).ok_or_else(|| Error::Domain("no points".into()))?;
    if points.iter().any(|p| p.len() != m) {
        return Err(Error::Structural("points of differing dimension".into()));
    }
    if points.iter().any(|p| p.iter().map(|c| c * c).sum::<Rational>() > int(1)) {
        return Err(Error::Domain("points must lie in the unit ball".into()));
    }
    if step <= Rational::zero() || step > int(1) {
        return Err(Error::Domain("grid step must lie in (0, 1]".into()));
    }
    let per_axis = (int(1) / step).floor().to_integer();
    let axis: Vec<Rational> = (-per_axis..=per_axis).map(|j| step * int(j)).collect();
    let total = (axis.len() as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if total > budget as u128 {
        return Err(Error::Capacity(format!("{total} grid weights exceed the budget {budget}")));
    }
    let mut rows = Vec::new();
    let mut idx = vec![0usize; m];
    loop {
        let w: Vec<Rational> = idx.iter().map(|&i| axis[i]).collect();
        if w.iter().map(|c| c * c).sum::<Rational>() <= int(1) {
            rows.push(points.iter().map(|p| p.iter().zip(&w).map(|(a, b)| a * b).sum()).collect());
        }
        let mut i = 0;
        while i < m {
            idx[i] += 1;
            if idx[i] < axis.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == m {
            break;
        }
    }
    FunctionClass::from_rationals(points.len(), ClassKind::RealGrid, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_collapse() {
        let c = FunctionClass::new(2, 1, ClassKind::Binary, vec![vec![1, -1], vec![1, -1], vec![-1, 1]]).unwrap();
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn kinds_are_validated() {
        assert!(FunctionClass::new(1, 2, ClassKind::Binary, vec![vec![1]]).is_err());
        assert!(FunctionClass::new(1, 2, ClassKind::Levels(2), vec![vec![-1]]).is_err());
        assert!(FunctionClass::new(1, 4, ClassKind::Levels(2), vec![vec![1]]).is_err());
        assert!(FunctionClass::new(1, 4, ClassKind::Levels(2), vec![vec![2]]).is_ok());
        assert!(FunctionClass::new(1, 2, ClassKind::RealGrid, vec![vec![3]]).is_err());
    }

    #[test]
    fn grids() {
        let b1 = AlphaGrid::new(int(1)).unwrap();
        assert_eq!(b1.points(), &[rat(-1, 2), rat(1, 2)]);
        let bh = AlphaGrid::new(rat(1, 2)).unwrap();
        assert_eq!(bh.points(), &[rat(-3, 4), rat(-1, 4), rat(1, 4), rat(3, 4)]);
        assert_eq!(AlphaGrid::new(int(2)).unwrap().points(), &[int(0)]);
        assert!(AlphaGrid::new(int(0)).is_err());
    }

    #[test]
    fn floor_examples() {
        let b1 = AlphaGrid::new(int(1)).unwrap();
        assert_eq!(floor_alpha(&int(0), &b1).unwrap(), rat(-1, 2));
        assert_eq!(floor_alpha(&rat(-1, 2), &b1).unwrap(), rat(-1, 2));
        let bh = AlphaGrid::new(rat(1, 2)).unwrap();
        assert_eq!(floor_alpha(&rat(9, 10), &bh).unwrap(), rat(3, 4));
        assert!(matches!(floor_alpha(&rat(3, 2), &bh), Err(Error::Domain(_))));
    }

    #[test]
    fn restrict_examples() {
        let c = constants(&[int(-1), int(0), int(1)], 1).unwrap();
        let r = c.restrict(0, &int(0), &int(1)).unwrap();
        assert_eq!(r.table(), &[vec![0]]);
        assert_eq!(c.restrict(0, &int(0), &int(4)).unwrap(), c);
        assert!(c.restrict(0, &int(5), &rat(1, 2)).unwrap().is_empty());
        assert!(matches!(c.restrict(3, &int(0), &int(1)), Err(Error::Lookup(_))));
    }

    #[test]
    fn bucket_keeps_lower_endpoint() {
        let c = constants(&[int(-1), int(1)], 1).unwrap();
        let g = AlphaGrid::new(int(1)).unwrap();
        assert_eq!(c.restrict_bucket(0, &rat(-1, 2), &g).unwrap().len(), 1);
        assert_eq!(c.restrict_bucket(0, &rat(1, 2), &g).unwrap().len(), 1);
    }

    #[test]
    fn loss_class_examples() {
        let zero = constants(&[int(0)], 1).unwrap();
        let l = supervised_loss_class(&zero, &[int(0)]).unwrap();
        assert_eq!(l.table(), &[vec![0]]);
        let pm = constants(&[int(1), int(-1)], 2).unwrap();
        let l = supervised_loss_class(&pm, &[int(1), int(-1)]).unwrap();
        assert_eq!(l.domain_size(), 4);
        let vals: Vec<Vec<Rational>> = (0..2).map(|f| l.row_values(f)).collect();
        assert_eq!(vals[0], vec![int(0), int(2), int(0), int(2)]);
        assert_eq!(vals[1], vec![int(2), int(0), int(2), int(0)]);
    }

    #[test]
    fn generators() {
        assert_eq!(full_binary(2).unwrap().len(), 4);
        assert_eq!(thresholds(3).unwrap().len(), 4);
        let c = constants(&[int(-1), int(0), int(1)], 2).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.table().iter().all(|r| r[0] == r[1]));
        let (lc, tree) = leaf_class(3).unwrap();
        assert_eq!(lc.len(), 4);
        assert_eq!(tree.image().len(), 7);
        assert_eq!(random_class(3, 5, 4, 7).unwrap(), random_class(3, 5, 4, 7).unwrap());
    }

    #[test]
    fn linear_class_values_in_range() {
        let pts = vec![vec![int(1), int(0)], vec![rat(3, 5), rat(4, 5)]];
        let c = linear_ball_class(&pts, rat(1, 2), 1000).unwrap();
        assert!(c.len() > 5);
        assert!(c.table().iter().flatten().all(|v| v.abs() <= c.scale()));
    }

    #[test]
    fn kind_strings_round_trip() {
        for k in [ClassKind::Binary, ClassKind::Levels(3), ClassKind::RealGrid, ClassKind::Loss, ClassKind::Free] {
            assert_eq!(k.to_string().parse::<ClassKind>().unwrap(), k);
        }
        assert_eq!("levels(2)".parse::<ClassKind>().unwrap(), ClassKind::Levels(2));
    }

    #[test]
    fn json_round_trip() {
        let c = thresholds(3).unwrap();
        assert_eq!(FunctionClass::from_json(&c.to_json().to_string()).unwrap(), c);
    }
}
