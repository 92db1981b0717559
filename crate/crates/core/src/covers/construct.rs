//! The recursive cover of `{0, ..., k}`-valued classes and the counting function `g_k`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::{check_depths, CoverSet, Norm};
use crate::classes::{iter_mask, ClassKind, FunctionClass};
use crate::error::{Error, Result};
use crate::rational::{rat, Rational};
use crate::shattering::FatSolver;
use crate::trees::{join, DomainTree, RealTree, Tree};

/// `Σ_{i ≤ d} C(T, i) k^i`.
pub fn g_k(d: u64, t: u64, k: u64) -> BigUint {
    let mut total = BigUint::zero();
    let mut binom = BigUint::one();
    let mut kp = BigUint::one();
    for i in 0..=d.min(t) {
        if i > 0 {
            binom = binom * BigUint::from(t - i + 1) / BigUint::from(i);
            kp *= BigUint::from(k);
        }
        total += &binom * &kp;
    }
    total
}

/// Closed-form upper bound on `g_k(d, T)`: `(ekT/d)^d` when `T ≥ d`, `(ekT)^d` otherwise.
pub fn sauer_bound(d: u64, t: u64, k: u64) -> f64 {
    if d == 0 {
        return 1.0;
    }
    let base = std::f64::consts::E * k as f64 * t as f64;
    if t >= d {
        (base / d as f64).powi(d as i32)
    } else {
        base.powi(d as i32)
    }
}

pub fn g_k_f64(d: u64, t: u64, k: u64) -> f64 {
    g_k(d, t, k).to_f64().unwrap_or(f64::INFINITY)
}

/// Which of the two recursive constructions to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstructMode {
    /// Exact 0-cover, size at most `g_k(fat_1, T)`.
    Fat1,
    /// `ℓ∞` cover at half a level, size at most `g_k(fat_2, T)`.
    Fat2,
}

struct Builder<'a> {
    class: &'a FunctionClass,
    k: i64,
    level: i64,
    mode: ConstructMode,
}

impl Builder<'_> {
    /// Root level index of row `f` at point `p`.
    fn level_of(&self, f: usize, p: usize) -> i64 {
        self.class.raw(f, p) / self.level
    }

    fn build(&self, mask: u64, x: &DomainTree) -> Result<Vec<RealTree>> {
        let root = *x.root();
        let mut groups: Vec<(i64, u64)> = Vec::new();
        for i in 0..=self.k {
            let g = iter_mask(mask).filter(|&f| self.level_of(f, root) == i).fold(0u64, |m, f| m | 1 << f);
            if g != 0 {
                groups.push((i, g));
            }
        }
        // Root values in half levels, so a merged pair sits at 2i + 1.
        let mut parts: Vec<(i64, u64)> = groups.iter().map(|&(i, g)| (2 * i, g)).collect();
        if self.mode == ConstructMode::Fat2 && groups.len() >= 2 {
            let img: Vec<usize> = x.image().into_iter().collect();
            let alpha = rat(2, self.k);
            let mut solver = FatSolver::on_points(self.class, alpha, &img)?;
            let dims: Vec<i32> = groups.iter().map(|&(_, g)| solver.dim(g)).collect();
            let top = solver.dim(mask);
            let at_top: Vec<usize> = (0..groups.len()).filter(|&i| dims[i] == top).collect();
            if at_top.len() == 2 && groups[at_top[1]].0 - groups[at_top[0]].0 == 1 {
                let (a, b) = (at_top[0], at_top[1]);
                parts = Vec::new();
                for (j, &(i, g)) in groups.iter().enumerate() {
                    if j == a {
                        parts.push((2 * i + 1, g | groups[b].1));
                    } else if j != b {
                        parts.push((2 * i, g));
                    }
                }
            }
        }
        let mut out = Vec::new();
        for (half_levels, g) in parts {
            let value = rat(half_levels, 2 * self.k);
            if x.depth() == 1 {
                out.push(Tree::leaf(value));
                continue;
            }
            let left = self.build(g, &x.left()?)?;
            let right = self.build(g, &x.right()?)?;
            let m = left.len().max(right.len());
            for i in 0..m {
                let l = &left[i.min(left.len() - 1)];
                let r = &right[i.min(right.len() - 1)];
                out.push(join(value, l, r)?);
            }
        }
        Ok(out)
    }
}

/// Builds a cover by splitting on the root value and pairing subtree covers.
///
/// In `Fat1` mode the result is a 0-cover. In `Fat2` mode it is an `ℓ∞` cover
/// at radius `1/(2k)`, i.e. half of one level; two adjacent root groups that
/// both keep the 2-level fat dimension of the whole class on the tree share a root
/// halfway between them.
pub fn cover_construct(class: &FunctionClass, x: &DomainTree, mode: ConstructMode) -> Result<CoverSet> {
    let ClassKind::Levels(k) = class.kind() else {
        return Err(Error::Kind(format!("recursive cover needs a levels class, got {}", class.kind())));
    };
    class.require_bitset()?;
    check_depths(class, x)?;
    if class.is_empty() {
        return Err(Error::Domain("empty class".into()));
    }
    let b = Builder { class, k: k as i64, level: class.scale() / k as i64, mode };
    let trees = b.build(class.full_mask(), x)?;
    let (norm, radius) = match mode {
        ConstructMode::Fat1 => (Norm::Zero, Rational::zero()),
        ConstructMode::Fat2 => (Norm::Inf, rat(1, 2 * k as i64)),
    };
    Ok(CoverSet { trees, norm, radius, grid_restricted: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::random_levels_class;
    use crate::covers::is_cover;
    use crate::rational::int;

    #[test]
    fn g_k_values() {
        assert_eq!(g_k(1, 1, 1), BigUint::from(2u32));
        assert_eq!(g_k(2, 3, 1), BigUint::from(7u32));
        assert_eq!(g_k(1, 2, 2), BigUint::from(5u32));
        assert_eq!(g_k(0, 5, 3), BigUint::from(1u32));
    }

    #[test]
    fn g_k_recurrence_and_bound() {
        for k in 1..=4u64 {
            for d in 1..=12u64 {
                for t in 1..=12u64 {
                    assert_eq!(g_k(d, t, k), g_k(d, t - 1, k) + BigUint::from(k) * g_k(d - 1, t - 1, k));
                    if t >= d {
                        assert!(g_k_f64(d, t, k) <= sauer_bound(d, t, k) * (1.0 + 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn base_cases() {
        let single = FunctionClass::new(2, 1, ClassKind::Levels(1), vec![vec![0, 1]]).unwrap();
        let x = Tree::new(2, vec![0, 1, 0]).unwrap();
        assert_eq!(cover_construct(&single, &x, ConstructMode::Fat1).unwrap().len(), 1);
        let both = FunctionClass::new(1, 1, ClassKind::Levels(1), vec![vec![0], vec![1]]).unwrap();
        let v = cover_construct(&both, &Tree::leaf(0), ConstructMode::Fat1).unwrap();
        assert_eq!(v.len(), 2);
        assert!(is_cover(&v, &both, &Tree::leaf(0)));
    }

    #[test]
    fn constructions_are_covers() {
        for seed in 0..20 {
            let c = random_levels_class(3, 6, 2, seed).unwrap();
            let x = Tree::new(3, (0..7).map(|i| (i * 5 + seed as usize) % 3).collect()).unwrap();
            for mode in [ConstructMode::Fat1, ConstructMode::Fat2] {
                let v = cover_construct(&c, &x, mode).unwrap();
                assert!(is_cover(&v, &c, &x), "seed {seed} mode {mode:?}");
            }
        }
        let bin = crate::classes::constants(&[int(1)], 1).unwrap();
        assert!(matches!(cover_construct(&bin, &Tree::leaf(0), ConstructMode::Fat1), Err(Error::Kind(_))));
    }
}
