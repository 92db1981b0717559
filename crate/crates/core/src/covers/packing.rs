//! Packing numbers on a tree, in both the per-element and the common-path sense.
//!
//! Both separation notions survive passing to subsets, so a maximum packing
//! is found by growing candidate sets and backtracking.

use super::{check_depths, path_values, projection, separated, Norm};
use crate::classes::FunctionClass;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::trees::DomainTree;

/// Projections beyond this many distinct trees are not searched.
const MAX_PACKING_TREES: usize = 24;

struct Packing {
    /// `sep[a][b]`: bitset of path prefixes on which trees `a` and `b` are separated.
    sep: Vec<Vec<u128>>,
    full: u128,
    strong: bool,
    best: usize,
}

impl Packing {
    fn ok(&self, set: &[usize]) -> bool {
        if self.strong {
            let mut common = self.full;
            for (i, &a) in set.iter().enumerate() {
                for &b in &set[i + 1..] {
                    common &= self.sep[a][b];
                }
            }
            common != 0
        } else {
            set.iter().all(|&a| set.iter().filter(|&&b| b != a).fold(self.full, |m, &b| m & self.sep[a][b]) != 0)
        }
    }

    fn grow(&mut self, set: &mut Vec<usize>, next: usize, n: usize) {
        self.best = self.best.max(set.len());
        if set.len() + (n - next) <= self.best {
            return;
        }
        for c in next..n {
            if set.iter().any(|&a| self.sep[a][c] == 0) {
                continue;
            }
            set.push(c);
            if self.ok(set) {
                self.grow(set, c + 1, n);
            }
            set.pop();
        }
    }
}

fn largest(class: &FunctionClass, x: &DomainTree, alpha: Rational, norm: Norm, strong: bool) -> Result<usize> {
    check_depths(class, x)?;
    if class.is_empty() {
        return Err(Error::Domain("empty class".into()));
    }
    let depth = x.depth();
    if depth > 8 {
        return Err(Error::Capacity(format!("packing search limited to depth 8, got {depth}")));
    }
    let proj = projection(class, x);
    if proj.len() > MAX_PACKING_TREES {
        return Err(Error::Capacity(format!(
            "{} distinct projected trees exceed the packing budget of {MAX_PACKING_TREES}",
            proj.len()
        )));
    }
    let n = proj.len();
    let prefixes = 1u64 << (depth - 1);
    let seqs: Vec<Vec<Vec<Rational>>> = proj
        .iter()
        .map(|(f, _)| (0..prefixes).map(|q| path_values(class, *f, x, q << 1)).collect())
        .collect();
    let mut sep = vec![vec![0u128; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let mut bits = 0u128;
            for q in 0..prefixes as usize {
                if separated(norm, &seqs[a][q], &seqs[b][q], &alpha) {
                    bits |= 1 << q;
                }
            }
            sep[a][b] = bits;
            sep[b][a] = bits;
        }
    }
    let full = if prefixes == 128 { u128::MAX } else { (1u128 << prefixes) - 1 };
    let mut p = Packing { sep, full, strong, best: 1 };
    p.grow(&mut Vec::new(), 0, n);
    Ok(p.best)
}

/// Size of the largest subset of `{f(x)}` in which every member is separated
/// from all others on some path of its own.
pub fn packing_number(class: &FunctionClass, x: &DomainTree, alpha: Rational, norm: Norm) -> Result<usize> {
    largest(class, x, alpha, norm, false)
}

/// Size of the largest subset of `{f(x)}` whose members are pairwise
/// separated on one common path.
pub fn strong_packing_number(class: &FunctionClass, x: &DomainTree, alpha: Rational, norm: Norm) -> Result<usize> {
    largest(class, x, alpha, norm, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{constants, leaf_class, random_class};
    use crate::rational::{int, rat};
    use crate::trees::Tree;

    #[test]
    fn identical_on_image_gives_one() {
        let c = FunctionClass::new(3, 1, crate::classes::ClassKind::RealGrid, vec![vec![0, 1, 1], vec![0, 1, -1]]).unwrap();
        let x = Tree::new(2, vec![0, 1, 1]).unwrap();
        assert_eq!(packing_number(&c, &x, rat(1, 10), Norm::Inf).unwrap(), 1);
        assert_eq!(strong_packing_number(&c, &x, rat(1, 10), Norm::Inf).unwrap(), 1);
    }

    #[test]
    fn leaf_example_gap() {
        let (c, x) = leaf_class(3).unwrap();
        for norm in [Norm::L1, Norm::L2, Norm::Inf] {
            assert_eq!(packing_number(&c, &x, rat(1, 10), norm).unwrap(), 4);
            assert_eq!(strong_packing_number(&c, &x, rat(1, 10), norm).unwrap(), 2);
        }
    }

    #[test]
    fn constant_trees_make_notions_coincide() {
        for seed in 0..10 {
            let c = random_class(3, 6, 2, seed).unwrap();
            let x = Tree::constant_levels(&[0usize, 2, 1]).unwrap();
            for norm in [Norm::L1, Norm::L2, Norm::Inf] {
                for a in [rat(1, 4), rat(1, 2), int(1)] {
                    assert_eq!(
                        packing_number(&c, &x, a, norm).unwrap(),
                        strong_packing_number(&c, &x, a, norm).unwrap()
                    );
                }
            }
        }
        let c = constants(&[int(0)], 1).unwrap();
        assert_eq!(packing_number(&c, &Tree::leaf(0), int(1), Norm::Inf).unwrap(), 1);
    }
}
