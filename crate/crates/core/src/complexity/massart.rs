//! Maximal inequality for finite sets of real-valued trees.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::rational::{rat, to_f64, Rational};
use crate::trees::{RealTree, SignPath};

#[derive(Clone, Debug, PartialEq)]
pub struct MassartReport {
    /// `E_ε max_v Σ_t ε_t v_t(ε)`, exact.
    pub lhs: Rational,
    /// `sqrt(2 ln|V| · max_v max_ε Σ_t v_t(ε)^2)`.
    pub rhs: f64,
    pub holds: bool,
}

/// Compares the expected maximum over a finite set of trees with its bound.
pub fn massart_bound(trees: &[RealTree]) -> Result<MassartReport> {
    let first = trees.first().ok_or_else(|| Error::Domain("tree set must be nonempty".into()))?;
    let depth = first.depth();
    if trees.iter().any(|v| v.depth() != depth) {
        return Err(Error::Structural("trees of differing depth".into()));
    }
    if depth > super::MAX_EXACT_PATH_DEPTH {
        return Err(Error::Capacity(format!("depth {depth} too large for exact enumeration")));
    }
    let unit = trees.iter().flat_map(|v| v.values()).fold(1i64, |acc, r| acc.lcm(r.denom()));
    let ints: Vec<Vec<i64>> = trees
        .iter()
        .map(|v| v.values().iter().map(|r| (r * Rational::from_integer(unit)).to_integer()).collect())
        .collect();
    let mut total: i128 = 0;
    let mut max_sq: i128 = 0;
    for eps in SignPath::all(depth) {
        let p = eps.index();
        let mut best = i128::MIN;
        for vals in &ints {
            let mut s = 0i128;
            let mut sq = 0i128;
            for t in 1..=depth {
                let v = vals[crate::trees::path_offset(depth, p, t)] as i128;
                s += eps.sign(t) as i128 * v;
                sq += v * v;
            }
            best = best.max(s);
            max_sq = max_sq.max(sq);
        }
        total += best;
    }
    let den = (unit as i128) << depth;
    let g = num_integer::gcd(total, den);
    let lhs = rat((total / g) as i64, (den / g) as i64);
    let sq = max_sq as f64 / (unit as f64 * unit as f64);
    let rhs = (2.0 * (trees.len() as f64).ln() * sq).sqrt();
    Ok(MassartReport { lhs, rhs, holds: to_f64(&lhs) <= rhs + 1e-9 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::trees::Tree;

    #[test]
    fn singleton_set() {
        let v = Tree::new(2, vec![int(1), rat(1, 2), int(-1)]).unwrap();
        let r = massart_bound(&[v]).unwrap();
        assert_eq!(r.lhs, int(0));
        assert_eq!(r.rhs, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn two_constant_trees() {
        let a = Tree::constant_levels(&[int(1), int(1)]).unwrap();
        let b = Tree::constant_levels(&[int(-1), int(-1)]).unwrap();
        let r = massart_bound(&[a, b]).unwrap();
        assert_eq!(r.lhs, int(1));
        assert!((r.rhs - (4.0 * 2f64.ln()).sqrt()).abs() < 1e-9);
        assert!(r.holds);
    }

    #[test]
    fn empty_set_rejected() {
        assert!(matches!(massart_bound(&[]), Err(Error::Domain(_))));
    }
}
