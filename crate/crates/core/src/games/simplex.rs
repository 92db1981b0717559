//! Two-phase primal simplex in exact rational arithmetic, using Bland's rule
//! so that it terminates on degenerate problems.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub relation: Relation,
    pub rhs: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: BigRational,
    pub x: Vec<BigRational>,
    /// Shadow price of each inequality; `None` for equalities.
    pub duals: Vec<Option<BigRational>>,
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    obj: Vec<BigRational>,
    width: usize,
}

impl Tableau {
    fn set_objective(&mut self, cost: &[BigRational]) {
        let mut obj: Vec<BigRational> = (0..=self.width)
            .map(|j| if j < self.width { -cost[j].clone() } else { BigRational::zero() })
            .collect();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if cost[b].is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(row) {
                *o += &cost[b] * v;
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.rows[r][e].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let f = row[e].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= &f * pv;
            }
        }
        if !self.obj[e].is_zero() {
            let f = self.obj[e].clone();
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= &f * pv;
            }
        }
        self.basis[r] = e;
    }

    /// Runs to optimality; columns at or beyond `allowed` never enter.
    fn optimize(&mut self, allowed: usize) -> Result<()> {
        loop {
            let Some(e) = (0..allowed).find(|&j| self.obj[j].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(BigRational, usize, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[e].is_positive() {
                    continue;
                }
                let ratio = &row[self.width] / &row[e];
                let better = match &best {
                    None => true,
                    Some((r, _, b)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                };
                if better {
                    best = Some((ratio, i, self.basis[i]));
                }
            }
            let (_, r, _) = best.ok_or_else(|| Error::Domain("linear program is unbounded".into()))?;
            self.pivot(r, e);
        }
    }
}

/// Maximizes `c·v` subject to the constraints and `v ≥ 0`.
pub fn maximize(c: &[BigRational], constraints: &[Constraint]) -> Result<LpSolution> {
    let n = c.len();
    if constraints.iter().any(|k| k.coeffs.len() != n) {
        return Err(Error::Structural("constraint width differs from objective".into()));
    }
    let slack_count = constraints.iter().filter(|k| k.relation != Relation::Eq).count();
    // Artificial variables go on rows whose slack cannot start in the basis.
    let needs_art: Vec<bool> = constraints
        .iter()
        .map(|k| match k.relation {
            Relation::Eq => true,
            Relation::Le => k.rhs.is_negative(),
            Relation::Ge => !k.rhs.is_negative(),
        })
        .collect();
    let art_count = needs_art.iter().filter(|&&a| a).count();
    let width = n + slack_count + art_count;
    let mut rows = Vec::with_capacity(constraints.len());
    let mut basis = Vec::with_capacity(constraints.len());
    let mut slack_col = Vec::with_capacity(constraints.len());
    let (mut s, mut a) = (n, n + slack_count);
    for (k, &art) in constraints.iter().zip(&needs_art) {
        let mut row = vec![BigRational::zero(); width + 1];
        row[..n].clone_from_slice(&k.coeffs);
        row[width] = k.rhs.clone();
        match k.relation {
            Relation::Le => row[s] = BigRational::one(),
            Relation::Ge => row[s] = -BigRational::one(),
            Relation::Eq => {}
        }
        if k.relation == Relation::Eq {
            slack_col.push(None);
        } else {
            slack_col.push(Some(s));
            s += 1;
        }
        if row[width].is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        if art {
            row[a] = BigRational::one();
            basis.push(a);
            a += 1;
        } else {
            basis.push(slack_col.last().copied().flatten().expect("inequality row"));
        }
        rows.push(row);
    }
    let mut tab = Tableau { rows, basis, obj: Vec::new(), width };
    let art_start = n + slack_count;
    if art_count > 0 {
        let cost: Vec<BigRational> =
            (0..width).map(|j| if j >= art_start { -BigRational::one() } else { BigRational::zero() }).collect();
        tab.set_objective(&cost);
        tab.optimize(width)?;
        if tab.obj[width].is_negative() {
            return Err(Error::Domain("linear program is infeasible".into()));
        }
        for r in 0..tab.rows.len() {
            if tab.basis[r] >= art_start {
                if let Some(e) = (0..art_start).find(|&j| !tab.rows[r][j].is_zero()) {
                    tab.pivot(r, e);
                }
            }
        }
    }
    let cost: Vec<BigRational> = (0..width).map(|j| if j < n { c[j].clone() } else { BigRational::zero() }).collect();
    tab.set_objective(&cost);
    tab.optimize(art_start)?;
    let mut x = vec![BigRational::zero(); n];
    for (row, &b) in tab.rows.iter().zip(&tab.basis) {
        if b < n {
            x[b] = row[width].clone();
        }
    }
    let duals = constraints
        .iter()
        .zip(&slack_col)
        .map(|(k, col)| {
            col.map(|j| match k.relation {
                Relation::Ge => -tab.obj[j].clone(),
                _ => tab.obj[j].clone(),
            })
        })
        .collect();
    Ok(LpSolution { value: tab.obj[width].clone(), x, duals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn le(coeffs: &[i64], rhs: i64) -> Constraint {
        Constraint { coeffs: coeffs.iter().map(|&v| q(v, 1)).collect(), relation: Relation::Le, rhs: q(rhs, 1) }
    }

    #[test]
    fn textbook() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 -> 36 at (2, 6).
        let s = maximize(&[q(3, 1), q(5, 1)], &[le(&[1, 0], 4), le(&[0, 2], 12), le(&[3, 2], 18)]).unwrap();
        assert_eq!(s.value, q(36, 1));
        assert_eq!(s.x, vec![q(2, 1), q(6, 1)]);
        assert_eq!(s.duals, vec![Some(q(0, 1)), Some(q(3, 2)), Some(q(1, 1))]);
    }

    #[test]
    fn equality_and_ge() {
        // max x - y, x + y = 1, x ≥ 1/4, y ≥ 1/4 -> 1/2.
        let c = [q(1, 1), q(-1, 1)];
        let k = vec![
            Constraint { coeffs: vec![q(1, 1), q(1, 1)], relation: Relation::Eq, rhs: q(1, 1) },
            Constraint { coeffs: vec![q(1, 1), q(0, 1)], relation: Relation::Ge, rhs: q(1, 4) },
            Constraint { coeffs: vec![q(0, 1), q(1, 1)], relation: Relation::Ge, rhs: q(1, 4) },
        ];
        let s = maximize(&c, &k).unwrap();
        assert_eq!(s.value, q(1, 2));
        assert_eq!(s.duals[2], Some(q(-2, 1)));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let k = vec![le(&[1], -1)];
        assert!(matches!(maximize(&[q(1, 1)], &k), Err(Error::Domain(_))));
        let k = vec![le(&[-1], 1)];
        assert!(matches!(maximize(&[q(1, 1)], &k), Err(Error::Domain(_))));
    }
}
