//! Minimum covers by exhaustive search, and greedy covers.
//!
//! A cover must match every pair (path, values of some row along it). Those
//! requirements are grouped so that each group can be matched by a single
//! tree; the number of groups is the cover size. Paths differing only in the
//! last sign visit the same nodes and are merged.

use num_integer::Integer;
use num_traits::Zero;

use super::{check_depths, projection, CoverSet, Norm};
use crate::classes::FunctionClass;
use crate::error::{Error, Result};
use crate::rational::{int, rat, Rational};
use crate::trees::{node_offset, path_offset, DomainTree, Tree};

/// Largest class handled by exact search.
pub const MAX_EXACT_FUNCTIONS: usize = 8;
/// Deepest tree handled by exact search.
pub const MAX_EXACT_DEPTH: usize = 3;

const STEP_BUDGET: u64 = 200_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverMode {
    Exact,
    Greedy,
}

struct Req {
    prefix: u64,
    seq: Vec<i64>,
    nodes: Vec<usize>,
}

struct Problem {
    depth: usize,
    unit: i64,
    norm: Norm,
    alpha_u: i64,
    budget: i128,
    reqs: Vec<Req>,
    cands: Vec<Vec<i64>>,
}

impl Problem {
    fn new(class: &FunctionClass, x: &DomainTree, alpha: Rational, norm: Norm) -> Result<Self> {
        check_depths(class, x)?;
        if alpha < Rational::zero() {
            return Err(Error::Domain("radius must be nonnegative".into()));
        }
        let alpha = if norm == Norm::Zero { Rational::zero() } else { alpha };
        let unit = class.scale().lcm(&(2 * alpha.denom()));
        let alpha_u = (alpha * int(unit)).to_integer();
        let t = x.depth();
        let budget = match norm {
            Norm::L1 => t as i128 * alpha_u as i128,
            Norm::L2 => t as i128 * (alpha_u as i128) * (alpha_u as i128),
            _ => 0,
        };
        let table = class.table_in_units(unit);
        let mut reqs: Vec<Req> = Vec::new();
        for q in 0..(1u64 << (t - 1)) {
            let nodes: Vec<usize> = (1..=t).map(|lvl| path_offset(t, q << 1, lvl)).collect();
            let mut seqs: Vec<Vec<i64>> = table.iter().map(|row| nodes.iter().map(|&o| row[x.values()[o]]).collect()).collect();
            seqs.sort();
            seqs.dedup();
            for seq in seqs {
                reqs.push(Req { prefix: q, seq, nodes: nodes.clone() });
            }
        }
        let half = alpha_u / 2;
        let cands = x
            .values()
            .iter()
            .map(|&p| {
                let mut c: Vec<i64> = table
                    .iter()
                    .flat_map(|row| (-2..=2).map(move |j| row[p] + j * half))
                    .collect();
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        Ok(Problem { depth: t, unit, norm, alpha_u, budget, reqs, cands })
    }

    fn cost(&self, d: i64) -> i128 {
        match self.norm {
            Norm::L2 => (d as i128) * (d as i128),
            _ => d.abs() as i128,
        }
    }

    fn uses_intervals(&self) -> bool {
        matches!(self.norm, Norm::Zero | Norm::Inf)
    }

    /// Whether `seq` lies within the radius of the target sequence `target`.
    fn close(&self, a: &[i64], b: &[i64]) -> bool {
        match self.norm {
            Norm::Zero => a == b,
            Norm::Inf => a.iter().zip(b).all(|(x, y)| (x - y).abs() <= self.alpha_u),
            _ => a.iter().zip(b).map(|(x, y)| self.cost(x - y)).sum::<i128>() <= self.budget,
        }
    }

    /// Node assignment matching every member, if one exists on the candidate grid.
    fn solve_group(&self, members: &[usize]) -> Option<Vec<(usize, i64)>> {
        let mut out = Vec::new();
        if self.uses_intervals() {
            let n = self.cands.len();
            let mut lo = vec![i64::MIN; n];
            let mut hi = vec![i64::MAX; n];
            for &m in members {
                let r = &self.reqs[m];
                for (i, &o) in r.nodes.iter().enumerate() {
                    lo[o] = lo[o].max(r.seq[i] - self.alpha_u);
                    hi[o] = hi[o].min(r.seq[i] + self.alpha_u);
                    if lo[o] > hi[o] {
                        return None;
                    }
                }
            }
            for o in 0..n {
                if lo[o] != i64::MIN {
                    out.push((o, 0i64.clamp(lo[o], hi[o])));
                }
            }
            return Some(out);
        }
        let mut residual = vec![self.budget; self.reqs.len()];
        if self.dp(1, 0, members.to_vec(), &mut residual, &mut out) {
            Some(out)
        } else {
            None
        }
    }

    fn dp(&self, t: usize, prefix: u64, members: Vec<usize>, res: &mut [i128], out: &mut Vec<(usize, i64)>) -> bool {
        if members.is_empty() {
            return true;
        }
        let node = node_offset(t, prefix);
        for &u in &self.cands[node] {
            let costs: Vec<i128> = members.iter().map(|&m| self.cost(u - self.reqs[m].seq[t - 1])).collect();
            if members.iter().zip(&costs).any(|(&m, &c)| c > res[m]) {
                continue;
            }
            if t == self.depth {
                out.push((node, u));
                return true;
            }
            for (&m, &c) in members.iter().zip(&costs) {
                res[m] -= c;
            }
            let bit = self.depth - 1 - t;
            let (right, left): (Vec<usize>, Vec<usize>) =
                members.iter().partition(|&&m| (self.reqs[m].prefix >> bit) & 1 == 1);
            let mark = out.len();
            let ok = self.dp(t + 1, 2 * prefix, left, res, out) && self.dp(t + 1, 2 * prefix + 1, right, res, out);
            for (&m, &c) in members.iter().zip(&costs) {
                res[m] += c;
            }
            if ok {
                out.push((node, u));
                return true;
            }
            out.truncate(mark);
        }
        false
    }

    fn tree_from(&self, assignment: &[(usize, i64)]) -> Tree<Rational> {
        let mut vals = vec![Rational::zero(); self.cands.len()];
        for &(o, u) in assignment {
            vals[o] = rat(u, self.unit);
        }
        Tree::new(self.depth, vals).expect("node count matches depth")
    }

    fn conflicts(&self) -> Vec<Vec<bool>> {
        let n = self.reqs.len();
        let mut c = vec![vec![false; n]; n];
        for a in 0..n {
            for b in a + 1..n {
                let bad = self.solve_group(&[a, b]).is_none();
                c[a][b] = bad;
                c[b][a] = bad;
            }
        }
        c
    }
}

struct Search<'a> {
    p: &'a Problem,
    conflict: Vec<Vec<bool>>,
    order: Vec<usize>,
    groups: Vec<Vec<usize>>,
    steps: u64,
}

impl Search<'_> {
    fn run(&mut self, i: usize, k: usize) -> Result<bool> {
        self.steps += 1;
        if self.steps > STEP_BUDGET {
            return Err(Error::Capacity("cover search exceeded its step budget; use greedy mode".into()));
        }
        if i == self.order.len() {
            return Ok(true);
        }
        let r = self.order[i];
        for g in 0..self.groups.len() {
            if self.groups[g].iter().any(|&m| self.conflict[r][m]) {
                continue;
            }
            self.groups[g].push(r);
            if self.groups[g].len() <= 2 || self.p.solve_group(&self.groups[g]).is_some() {
                if self.run(i + 1, k)? {
                    return Ok(true);
                }
            }
            self.groups[g].pop();
        }
        if self.groups.len() < k {
            self.groups.push(vec![r]);
            if self.run(i + 1, k)? {
                return Ok(true);
            }
            self.groups.pop();
        }
        Ok(false)
    }
}

fn greedy_clique(conflict: &[Vec<bool>]) -> usize {
    let n = conflict.len();
    let mut best = usize::from(n > 0);
    for start in 0..n {
        let mut clique = vec![start];
        let mut rest: Vec<usize> = (0..n).filter(|&v| conflict[start][v]).collect();
        rest.sort_by_key(|&v| std::cmp::Reverse(conflict[v].iter().filter(|&&b| b).count()));
        for v in rest {
            if clique.iter().all(|&u| conflict[u][v]) {
                clique.push(v);
            }
        }
        best = best.max(clique.len());
    }
    best
}

fn greedy(p: &Problem, class: &FunctionClass, x: &DomainTree) -> Vec<Tree<Rational>> {
    let proj = projection(class, x);
    let unit_trees: Vec<Vec<i64>> = proj
        .iter()
        .map(|(_, t)| t.values().iter().map(|v| (v * int(p.unit)).to_integer()).collect())
        .collect();
    let covers: Vec<Vec<bool>> = unit_trees
        .iter()
        .map(|vals| {
            p.reqs
                .iter()
                .map(|r| {
                    let seq: Vec<i64> = r.nodes.iter().map(|&o| vals[o]).collect();
                    p.close(&seq, &r.seq)
                })
                .collect()
        })
        .collect();
    let mut uncovered = vec![true; p.reqs.len()];
    let mut chosen = Vec::new();
    while uncovered.iter().any(|&u| u) {
        let (best, _) = covers
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.iter().zip(&uncovered).filter(|(a, b)| **a && **b).count()))
            .max_by_key(|&(i, n)| (n, std::cmp::Reverse(i)))
            .expect("projection is nonempty");
        for (u, &c) in uncovered.iter_mut().zip(&covers[best]) {
            if c {
                *u = false;
            }
        }
        chosen.push(proj[best].1.clone());
    }
    chosen
}

/// Covering number `N_p(α, F, x)`, with the cover that attains it.
///
/// Exact mode searches over all groupings of the requirements. For `ℓ∞` and
/// the 0-cover every node can take any real value, so the result is the true
/// minimum. For `ℓ1` and `ℓ2` node values are drawn from the attained values
/// shifted by multiples of `α/2`, and the result is flagged as grid-restricted.
/// Greedy mode picks projected trees `f(x)` greedily and is an upper bound.
pub fn cover_number(class: &FunctionClass, x: &DomainTree, alpha: Rational, norm: Norm, mode: CoverMode) -> Result<CoverSet> {
    if class.is_empty() {
        return Err(Error::Domain("empty class".into()));
    }
    let p = Problem::new(class, x, alpha, norm)?;
    let radius = if norm == Norm::Zero { Rational::zero() } else { alpha };
    let greedy_trees = greedy(&p, class, x);
    if mode == CoverMode::Greedy {
        return Ok(CoverSet { trees: greedy_trees, norm, radius, grid_restricted: true });
    }
    if class.len() > MAX_EXACT_FUNCTIONS || x.depth() > MAX_EXACT_DEPTH {
        return Err(Error::Capacity(format!(
            "exact cover search is limited to {MAX_EXACT_FUNCTIONS} functions and depth {MAX_EXACT_DEPTH}; use greedy mode"
        )));
    }
    let grid_restricted = matches!(norm, Norm::L1 | Norm::L2);
    let conflict = p.conflicts();
    let mut order: Vec<usize> = (0..p.reqs.len()).collect();
    order.sort_by_key(|&r| std::cmp::Reverse(conflict[r].iter().filter(|&&b| b).count()));
    let lower = greedy_clique(&conflict);
    let mut search = Search { p: &p, conflict, order, groups: Vec::new(), steps: 0 };
    for k in lower..greedy_trees.len() {
        search.groups.clear();
        if search.run(0, k)? {
            let trees = search
                .groups
                .iter()
                .map(|g| p.tree_from(&p.solve_group(g).expect("groups are feasible")))
                .collect();
            return Ok(CoverSet { trees, norm, radius, grid_restricted });
        }
    }
    Ok(CoverSet { trees: greedy_trees, norm, radius, grid_restricted })
}

/// Size of a smallest 0-cover, with a cover attaining it.
pub fn zero_cover_min(class: &FunctionClass, x: &DomainTree) -> Result<(usize, CoverSet)> {
    let c = cover_number(class, x, Rational::zero(), Norm::Zero, CoverMode::Exact)?;
    Ok((c.len(), c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{constants, full_binary, leaf_class};
    use crate::covers::is_cover;

    #[test]
    fn zero_cover_examples() {
        let single = constants(&[int(0)], 2).unwrap();
        let x = Tree::new(2, vec![0, 1, 0]).unwrap();
        assert_eq!(zero_cover_min(&single, &x).unwrap().0, 1);

        let (c, x) = leaf_class(3).unwrap();
        let (n, v) = zero_cover_min(&c, &x).unwrap();
        assert_eq!(n, 2);
        assert!(is_cover(&v, &c, &x));

        let fb = full_binary(1).unwrap();
        let x = Tree::new(2, vec![0, 0, 0]).unwrap();
        assert_eq!(zero_cover_min(&fb, &x).unwrap().0, 2);
    }

    #[test]
    fn wide_radius_gives_one_tree() {
        let c = constants(&[int(-1), int(0), int(1)], 2).unwrap();
        let x = Tree::new(2, vec![0, 1, 0]).unwrap();
        for norm in [Norm::L1, Norm::L2, Norm::Inf] {
            let v = cover_number(&c, &x, int(1), norm, CoverMode::Exact).unwrap();
            assert_eq!(v.len(), 1);
            assert!(is_cover(&v, &c, &x));
        }
    }

    #[test]
    fn binary_inf_just_below_two_matches_zero_cover() {
        let fb = full_binary(2).unwrap();
        let x = Tree::new(2, vec![0, 1, 1]).unwrap();
        let zero = zero_cover_min(&fb, &x).unwrap().0;
        let v = cover_number(&fb, &x, rat(99, 100), Norm::Inf, CoverMode::Exact).unwrap();
        assert_eq!(v.len(), zero);
    }

    #[test]
    fn capacity_error_beyond_budget() {
        let fb = full_binary(4).unwrap();
        let x = Tree::new(1, vec![0]).unwrap();
        assert!(matches!(zero_cover_min(&fb, &x), Err(Error::Capacity(_))));
        assert!(cover_number(&fb, &x, int(0), Norm::Zero, CoverMode::Greedy).is_ok());
    }
}
