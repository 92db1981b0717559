//! Littlestone and sequential fat-shattering dimensions, with certificates.
//!
//! Both dimensions are computed by recursion over subclasses, keyed by row
//! bitsets. A split at point `x` sends the rows with `f(x) ≤ a` to the `-1`
//! branch and the rows with `f(x) ≥ b` to the `+1` branch, where `a < b` are
//! values attained at `x` with `b - a ≥ α`; the witness is `(a + b) / 2`.
//! Enlarging either side never lowers the dimension, so for each `a` only the
//! smallest admissible `b` needs to be tried.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::classes::{iter_mask, ClassKind, FunctionClass};
use crate::error::{Error, Result};
use crate::rational::{int, rat, Rational};
use crate::trees::{join, DomainTree, RealTree, SignPath, Tree};

/// A domain tree together with a witness tree that it is shattered against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShatterCertificate {
    pub tree: DomainTree,
    pub witness: RealTree,
    pub alpha: Rational,
}

impl ShatterCertificate {
    pub fn depth(&self) -> usize {
        self.tree.depth()
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct J {
            alpha: String,
            tree: serde_json::Value,
            witness: serde_json::Value,
        }
        serde_json::to_value(J {
            alpha: crate::rational::fmt_rational(&self.alpha),
            tree: self.tree.to_json(),
            witness: self.witness.to_json(),
        })
        .expect("plain struct serializes")
    }
}

/// Littlestone dimension of a binary class.
pub fn ldim(class: &FunctionClass) -> Result<usize> {
    if class.kind() != ClassKind::Binary {
        return Err(Error::Kind(format!("Littlestone dimension needs a binary class, got {}", class.kind())));
    }
    class.require_bitset()?;
    if class.is_empty() {
        return Err(Error::Domain("empty class".into()));
    }
    let mut memo = HashMap::new();
    Ok(ldim_rec(class, class.full_mask(), &mut memo))
}

fn ldim_rec(class: &FunctionClass, mask: u64, memo: &mut HashMap<u64, usize>) -> usize {
    if mask.count_ones() < 2 {
        return 0;
    }
    if let Some(&d) = memo.get(&mask) {
        return d;
    }
    let cap = (63 - mask.count_ones().leading_zeros()) as usize;
    let mut best = 0;
    for x in 0..class.domain_size() {
        let mut neg = 0u64;
        let mut pos = 0u64;
        for f in iter_mask(mask) {
            if class.raw(f, x) > 0 {
                pos |= 1 << f;
            } else {
                neg |= 1 << f;
            }
        }
        if neg == 0 || pos == 0 {
            continue;
        }
        let d = 1 + ldim_rec(class, neg, memo).min(ldim_rec(class, pos, memo));
        best = best.max(d);
        if best >= cap {
            break;
        }
    }
    memo.insert(mask, best);
    best
}

/// Memoized fat-shattering recursion over subclasses of one class at one scale.
///
/// The memo is kept across queries, so one solver can serve many subclasses.
pub struct FatSolver {
    table: Vec<Vec<i64>>,
    unit: i64,
    alpha_units: i64,
    alpha: Rational,
    points: Vec<usize>,
    memo: HashMap<u64, i32>,
}

/// A chosen split: point, lower value, upper value (in solver units).
#[derive(Clone, Copy, Debug)]
struct Split {
    x: usize,
    a: i64,
    b: i64,
}

impl FatSolver {
    pub fn new(class: &FunctionClass, alpha: Rational) -> Result<Self> {
        let points: Vec<usize> = (0..class.domain_size()).collect();
        Self::on_points(class, alpha, &points)
    }

    /// Solver whose trees may only use the given domain points.
    pub fn on_points(class: &FunctionClass, alpha: Rational, points: &[usize]) -> Result<Self> {
        if alpha <= Rational::zero() {
            return Err(Error::Domain(format!("scale {alpha} must be positive")));
        }
        class.require_bitset()?;
        if let Some(&x) = points.iter().find(|&&x| x >= class.domain_size()) {
            return Err(Error::Lookup(format!("point {x} outside domain")));
        }
        let unit = 2 * class.scale().lcm(alpha.denom());
        let alpha_units = (alpha * int(unit)).to_integer();
        Ok(FatSolver {
            table: class.table_in_units(unit),
            unit,
            alpha_units,
            alpha,
            points: points.to_vec(),
            memo: HashMap::new(),
        })
    }

    pub fn alpha(&self) -> Rational {
        self.alpha
    }

    pub fn full_mask(&self) -> u64 {
        crate::classes::full_mask(self.table.len())
    }

    /// Dimension of the subclass `mask`; `-1` for the empty subclass.
    pub fn dim(&mut self, mask: u64) -> i32 {
        if mask == 0 {
            return -1;
        }
        if mask.count_ones() == 1 {
            return 0;
        }
        if let Some(&d) = self.memo.get(&mask) {
            return d;
        }
        // A shattered tree of depth d needs 2^d distinct rows.
        let cap = (63 - mask.count_ones().leading_zeros()) as i32;
        let mut best = 0;
        'outer: for i in 0..self.points.len() {
            let x = self.points[i];
            for (neg, pos, _) in self.splits(mask, x) {
                let lo = self.dim(neg);
                if lo < best {
                    continue;
                }
                let d = 1 + lo.min(self.dim(pos));
                if d > best {
                    best = d;
                    if best >= cap {
                        break 'outer;
                    }
                }
            }
        }
        self.memo.insert(mask, best);
        best
    }

    /// All maximal splits of `mask` at `x`: (minus side, plus side, split values).
    fn splits(&self, mask: u64, x: usize) -> Vec<(u64, u64, Split)> {
        let mut vals: Vec<i64> = iter_mask(mask).map(|f| self.table[f][x]).collect();
        vals.sort_unstable();
        vals.dedup();
        let mut out = Vec::new();
        for &a in &vals {
            let Some(&b) = vals.iter().find(|&&b| b - a >= self.alpha_units) else {
                continue;
            };
            let mut neg = 0u64;
            let mut pos = 0u64;
            for f in iter_mask(mask) {
                let v = self.table[f][x];
                if v <= a {
                    neg |= 1 << f;
                }
                if v >= b {
                    pos |= 1 << f;
                }
            }
            out.push((neg, pos, Split { x, a, b }));
        }
        out
    }

    fn best_split(&mut self, mask: u64, depth: i32) -> Option<(u64, u64, Split)> {
        for i in 0..self.points.len() {
            let x = self.points[i];
            for (neg, pos, s) in self.splits(mask, x) {
                if 1 + self.dim(neg).min(self.dim(pos)) >= depth {
                    return Some((neg, pos, s));
                }
            }
        }
        None
    }

    /// A certificate of the given depth for the subclass `mask`.
    pub fn certificate(&mut self, mask: u64, depth: usize) -> Result<ShatterCertificate> {
        if depth == 0 {
            return Err(Error::Domain("no certificate of depth 0".into()));
        }
        if self.dim(mask) < depth as i32 {
            return Err(Error::Domain(format!("subclass is not shattered to depth {depth}")));
        }
        let (tree, witness) = self.build(mask, depth);
        Ok(ShatterCertificate { tree, witness, alpha: self.alpha })
    }

    fn build(&mut self, mask: u64, depth: usize) -> (DomainTree, RealTree) {
        let (neg, pos, s) = self.best_split(mask, depth as i32).expect("dimension guarantees a split");
        let mid = rat(s.a + s.b, 2 * self.unit);
        if depth == 1 {
            return (Tree::leaf(s.x), Tree::leaf(mid));
        }
        let (lt, lw) = self.build(neg, depth - 1);
        let (rt, rw) = self.build(pos, depth - 1);
        (
            join(s.x, &lt, &rt).expect("equal depths"),
            join(mid, &lw, &rw).expect("equal depths"),
        )
    }
}

/// Sequential fat-shattering dimension at scale `α`; `-1` for an empty class.
pub fn fat_dim(class: &FunctionClass, alpha: Rational) -> Result<i32> {
    let mut s = FatSolver::new(class, alpha)?;
    let m = s.full_mask();
    Ok(s.dim(m))
}

/// Fat-shattering dimension when trees may only use the given points.
pub fn fat_dim_on(class: &FunctionClass, alpha: Rational, points: &[usize]) -> Result<i32> {
    let mut s = FatSolver::on_points(class, alpha, points)?;
    let m = s.full_mask();
    Ok(s.dim(m))
}

/// A certificate of depth `fat_dim(class, α)`.
pub fn extract_shattered_tree(class: &FunctionClass, alpha: Rational) -> Result<ShatterCertificate> {
    let mut s = FatSolver::new(class, alpha)?;
    let m = s.full_mask();
    let d = s.dim(m);
    if d < 1 {
        return Err(Error::Domain(format!("class is not shattered at scale {alpha}: dimension {d}")));
    }
    s.certificate(m, d as usize)
}

/// Checks the shattering definition directly over all `2^d` sign paths.
pub fn check_certificate(class: &FunctionClass, cert: &ShatterCertificate) -> bool {
    let d = cert.tree.depth();
    if cert.witness.depth() != d || cert.tree.values().iter().any(|&x| x >= class.domain_size()) {
        return false;
    }
    let half = cert.alpha / int(2);
    SignPath::all(d).all(|eps| {
        (0..class.len()).any(|f| {
            (1..=d).all(|t| {
                let x = *cert.tree.at(eps.index(), t);
                let s = *cert.witness.at(eps.index(), t);
                let margin = (class.value(f, x) - s) * int(eps.sign(t) as i64);
                margin >= half
            })
        })
    })
}
