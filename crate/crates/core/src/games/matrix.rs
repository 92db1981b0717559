//! Exact solution of finite zero-sum matrix games.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::simplex::{maximize, Constraint, Relation};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixGameSolution {
    pub value: BigRational,
    /// Optimal mixture of the minimizing row player.
    pub row: Vec<BigRational>,
    /// Optimal mixture of the maximizing column player.
    pub col: Vec<BigRational>,
}

/// `min_q max_p qᵀ M p`, where the row player minimizes.
///
/// Entries are shifted to be positive; the row player's program is then
/// `max Σ u` over `u ≥ 0` with `Mᵀ u ≤ 1`, whose optimum is the inverse of the
/// shifted value. The column mixture comes from the shadow prices.
pub fn solve_matrix_game(m: &[Vec<BigRational>]) -> Result<MatrixGameSolution> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(Error::Domain("matrix game needs at least one row and one column".into()));
    }
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::Structural("ragged payoff matrix".into()));
    }
    let min = m.iter().flatten().min().expect("nonempty").clone();
    let shift = BigRational::one() - min;
    let constraints: Vec<Constraint> = (0..cols)
        .map(|j| Constraint {
            coeffs: (0..rows).map(|i| &m[i][j] + &shift).collect(),
            relation: Relation::Le,
            rhs: BigRational::one(),
        })
        .collect();
    let sol = maximize(&vec![BigRational::one(); rows], &constraints)?;
    let inv = BigRational::one() / &sol.value;
    let row = sol.x.iter().map(|u| u * &inv).collect();
    let col = sol.duals.iter().map(|d| d.clone().unwrap_or_else(BigRational::zero) * &inv).collect();
    Ok(MatrixGameSolution { value: inv - shift, row, col })
}

/// `max_j (qᵀ M)_j` for a row mixture `q`.
pub fn row_guarantee(m: &[Vec<BigRational>], q: &[BigRational]) -> BigRational {
    (0..m[0].len())
        .map(|j| m.iter().zip(q).map(|(r, w)| &r[j] * w).sum::<BigRational>())
        .max()
        .expect("nonempty")
}

/// `min_i (M p)_i` for a column mixture `p`.
pub fn col_guarantee(m: &[Vec<BigRational>], p: &[BigRational]) -> BigRational {
    m.iter()
        .map(|r| r.iter().zip(p).map(|(a, w)| a * w).sum::<BigRational>())
        .min()
        .expect("nonempty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn one_by_one() {
        let s = solve_matrix_game(&[vec![q(-3, 2)]]).unwrap();
        assert_eq!(s.value, q(-3, 2));
        assert_eq!(s.row, vec![q(1, 1)]);
        assert_eq!(s.col, vec![q(1, 1)]);
    }

    #[test]
    fn pennies() {
        let m = vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]];
        let s = solve_matrix_game(&m).unwrap();
        assert_eq!(s.value, q(1, 2));
        assert_eq!(s.row, vec![q(1, 2), q(1, 2)]);
        assert_eq!(s.col, vec![q(1, 2), q(1, 2)]);
    }

    #[test]
    fn saddle_point() {
        let m = vec![vec![q(2, 1), q(3, 1)], vec![q(1, 1), q(4, 1)]];
        let s = solve_matrix_game(&m).unwrap();
        assert_eq!(row_guarantee(&m, &s.row), s.value);
        assert_eq!(col_guarantee(&m, &s.col), s.value);
    }

    #[test]
    fn empty() {
        assert!(matches!(solve_matrix_game(&[]), Err(Error::Domain(_))));
    }
}
