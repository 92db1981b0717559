//! Sequential Rademacher averages on a fixed tree and over all trees.

use rand::Rng;
use rayon::prelude::*;

use super::{RadMode, RadResult};
use crate::classes::FunctionClass;
use crate::covers::check_depths;
use crate::error::{Error, Result};
use crate::harness::rng::stream_rng;
use crate::rational::{rat, Rational};
use crate::trees::{node_count, tree_count, DomainTree, Tree, DEFAULT_TREE_BUDGET};

/// Deepest tree for exact path enumeration.
pub const MAX_EXACT_PATH_DEPTH: usize = 20;

/// `Σ_ε max_f Σ_t ε_t f(x_t(ε))` over all `2^T` paths, in raw table units.
///
/// The walk shares partial sums between paths with a common prefix.
pub fn path_sum_total(table: &[Vec<i64>], x: &DomainTree) -> i64 {
    let depth = x.depth();
    let mut sums = vec![vec![0i64; table.len()]; depth + 1];
    let mut total = 0i64;
    walk(table, x, 1, 0, &mut sums, &mut total);
    total
}

fn walk(table: &[Vec<i64>], x: &DomainTree, t: usize, prefix: u64, sums: &mut [Vec<i64>], total: &mut i64) {
    let p = *x.node(t, prefix);
    let depth = x.depth();
    for sign in [-1i64, 1] {
        if t == depth {
            let best = table
                .iter()
                .zip(&sums[t - 1])
                .map(|(row, s)| s + sign * row[p])
                .max()
                .expect("class is nonempty");
            *total += best;
            continue;
        }
        let (done, rest) = sums.split_at_mut(t);
        for ((next, prev), row) in rest[0].iter_mut().zip(&done[t - 1]).zip(table) {
            *next = prev + sign * row[p];
        }
        walk(table, x, t + 1, 2 * prefix + u64::from(sign > 0), sums, total);
    }
}

/// Exact `E_ε sup_f Σ_t ε_t f(x_t(ε))` as a rational.
pub fn rad_tree_exact(class: &FunctionClass, x: &DomainTree) -> Result<Rational> {
    check_depths(class, x)?;
    if class.is_empty() {
        return Err(Error::Domain("empty class".into()));
    }
    if x.depth() > MAX_EXACT_PATH_DEPTH {
        return Err(Error::Capacity(format!(
            "exact enumeration is limited to depth {MAX_EXACT_PATH_DEPTH}; use Monte Carlo"
        )));
    }
    let total = path_sum_total(class.table(), x);
    Ok(rat(total, class.scale() << x.depth()))
}

/// Rademacher average of the class on a given tree.
pub fn rad_fixed_tree(class: &FunctionClass, x: &DomainTree, mode: RadMode) -> Result<RadResult> {
    match mode {
        RadMode::Exact => {
            let v = rad_tree_exact(class, x)?;
            Ok(RadResult::exact_tree(v, x.clone()))
        }
        RadMode::MonteCarlo { trials, seed } => {
            check_depths(class, x)?;
            if class.is_empty() {
                return Err(Error::Domain("empty class".into()));
            }
            if trials < 2 {
                return Err(Error::Domain("Monte Carlo needs at least two trials".into()));
            }
            let depth = x.depth();
            let scale = class.scale() as f64;
            let samples: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|i| {
                    let mut rng = stream_rng(seed, i);
                    let path: u64 = if depth >= 64 { rng.gen() } else { rng.gen_range(0..1u64 << depth) };
                    let best = class
                        .table()
                        .iter()
                        .map(|row| {
                            (1..=depth)
                                .map(|t| {
                                    let sign = if (path >> (depth - t)) & 1 == 1 { 1 } else { -1 };
                                    sign * row[*x.at(path, t)]
                                })
                                .sum::<i64>()
                        })
                        .max()
                        .expect("class is nonempty");
                    best as f64 / scale
                })
                .collect();
            let n = samples.len() as f64;
            let mean = samples.iter().sum::<f64>() / n;
            let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
            Ok(RadResult {
                value: mean,
                exact: None,
                mode: super::RadKind::MonteCarlo,
                argmax_tree: Some(x.clone()),
                samples: trials,
                std_error: Some((var / n).sqrt()),
                seed: Some(seed),
            })
        }
    }
}

/// How to realize the supremum over trees.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupMode {
    /// Every tree, up to the given count.
    Exact { budget: u64 },
    /// Coordinate ascent over node values from seeded random starts.
    Local { restarts: u64, seed: u64 },
}

impl SupMode {
    pub fn exact() -> Self {
        SupMode::Exact { budget: crate::harness::budget_override().unwrap_or(DEFAULT_TREE_BUDGET) }
    }
}

fn decode(index: u64, n: usize, depth: usize) -> Vec<usize> {
    let len = node_count(depth);
    let mut v = vec![0usize; len];
    let mut r = index;
    for slot in v.iter_mut().rev() {
        *slot = (r % n as u64) as usize;
        r /= n as u64;
    }
    v
}

/// `sup_x E_ε sup_f Σ_t ε_t f(x_t(ε))` over all trees of depth `T` on the class's domain.
pub fn rad_sup(class: &FunctionClass, depth: usize, mode: SupMode) -> Result<RadResult> {
    if class.is_empty() {
        return Err(Error::Domain("empty class".into()));
    }
    if depth == 0 || depth > MAX_EXACT_PATH_DEPTH {
        return Err(Error::Bounds(format!("depth {depth} outside 1..={MAX_EXACT_PATH_DEPTH}")));
    }
    let n = class.domain_size();
    let table = class.table();
    match mode {
        SupMode::Exact { budget } => {
            let count = tree_count(n, depth)
                .filter(|&c| c <= budget)
                .ok_or_else(|| Error::Capacity(format!("{n}^(2^{depth}-1) trees exceed the budget {budget}; use local search")))?;
            let (best, idx) = (0..count)
                .into_par_iter()
                .map(|i| {
                    let x = Tree::new(depth, decode(i, n, depth)).expect("decoded tree has full size");
                    (path_sum_total(table, &x), i)
                })
                .reduce(|| (i64::MIN, u64::MAX), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
            let x = Tree::new(depth, decode(idx, n, depth)).expect("decoded tree has full size");
            let value = rat(best, class.scale() << depth);
            Ok(RadResult { samples: count, ..RadResult::exact_sup(value, x) })
        }
        SupMode::Local { restarts, seed } => {
            let len = node_count(depth);
            let runs: Vec<(i64, Vec<usize>)> = (0..restarts.max(1))
                .into_par_iter()
                .map(|r| {
                    let mut rng = stream_rng(seed, r);
                    let mut vals: Vec<usize> = (0..len).map(|_| rng.gen_range(0..n)).collect();
                    let eval = |v: &[usize]| path_sum_total(table, &Tree::new(depth, v.to_vec()).expect("full size"));
                    let mut cur = eval(&vals);
                    loop {
                        let mut improved = false;
                        for o in 0..len {
                            for cand in 0..n {
                                if cand == vals[o] {
                                    continue;
                                }
                                let old = vals[o];
                                vals[o] = cand;
                                let s = eval(&vals);
                                if s > cur {
                                    cur = s;
                                    improved = true;
                                } else {
                                    vals[o] = old;
                                }
                            }
                        }
                        if !improved {
                            break;
                        }
                    }
                    (cur, vals)
                })
                .collect();
            let (best, vals) = runs.into_iter().max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1))).expect("one restart");
            let value = rat(best, class.scale() << depth);
            let x = Tree::new(depth, vals).expect("full size");
            Ok(RadResult {
                value: crate::rational::to_f64(&value),
                exact: Some(value),
                mode: super::RadKind::LocalSearch,
                argmax_tree: Some(x),
                samples: restarts.max(1),
                std_error: None,
                seed: Some(seed),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{constants, ClassKind};
    use crate::rational::int;

    fn pennies() -> FunctionClass {
        FunctionClass::new(2, 1, ClassKind::RealGrid, vec![vec![1, 0], vec![0, 1]]).unwrap()
    }

    #[test]
    fn singleton_is_zero() {
        let c = FunctionClass::new(2, 2, ClassKind::RealGrid, vec![vec![1, -2]]).unwrap();
        let x = Tree::new(3, vec![0, 1, 0, 1, 1, 0, 0]).unwrap();
        assert_eq!(rad_tree_exact(&c, &x).unwrap(), int(0));
    }

    #[test]
    fn pennies_examples() {
        let c = pennies();
        assert_eq!(rad_tree_exact(&c, &Tree::leaf(0)).unwrap(), rat(1, 2));
        let s = rad_sup(&c, 1, SupMode::exact()).unwrap();
        assert_eq!(s.exact, Some(rat(1, 2)));
    }

    #[test]
    fn two_constants_depth_two() {
        let c = constants(&[int(1), int(-1)], 1).unwrap();
        let x = Tree::new(2, vec![0, 0, 0]).unwrap();
        assert_eq!(rad_tree_exact(&c, &x).unwrap(), int(1));
    }

    #[test]
    fn local_is_lower_bound() {
        let c = crate::classes::random_class(3, 4, 2, 5).unwrap();
        let e = rad_sup(&c, 2, SupMode::exact()).unwrap();
        let l = rad_sup(&c, 2, SupMode::Local { restarts: 4, seed: 1 }).unwrap();
        assert!(l.exact.unwrap() <= e.exact.unwrap());
    }

    #[test]
    fn monte_carlo_is_close() {
        let c = crate::classes::random_class(3, 5, 2, 9).unwrap();
        let x = Tree::new(4, (0..15).map(|i| i % 3).collect()).unwrap();
        let exact = crate::rational::to_f64(&rad_tree_exact(&c, &x).unwrap());
        let mc = rad_fixed_tree(&c, &x, RadMode::MonteCarlo { trials: 20_000, seed: 3 }).unwrap();
        assert!((mc.value - exact).abs() <= 3.0 * mc.std_error.unwrap() + 1e-12);
    }

    #[test]
    fn budget_exceeded() {
        let c = pennies();
        assert!(matches!(rad_sup(&c, 4, SupMode::Exact { budget: 100 }), Err(Error::Capacity(_))));
    }
}
