//! The fat-shattering version-space learner.

use std::collections::HashMap;

use num_traits::Signed;
use rand_chacha::ChaCha8Rng;

use super::Learner;
use crate::classes::{AlphaGrid, FunctionClass};
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, Rational};
use crate::shattering::FatSolver;

/// Everything about one class at one scale that version spaces share:
/// the grid, the row buckets `V(r, x)` and a memo of fat dimensions.
pub struct SoaCore {
    class: FunctionClass,
    grid: AlphaGrid,
    solver: FatSolver,
    /// `buckets[x][i]`: rows whose value at `x` rounds to grid point `i`.
    buckets: Vec<Vec<u64>>,
    cache: HashMap<(u64, usize), Option<Rational>>,
}

impl SoaCore {
    pub fn new(class: &FunctionClass, alpha: Rational) -> Result<Self> {
        let grid = AlphaGrid::new(alpha)?;
        let solver = FatSolver::new(class, alpha)?;
        let mut buckets = vec![vec![0u64; grid.len()]; class.domain_size()];
        for (x, b) in buckets.iter_mut().enumerate() {
            for f in 0..class.len() {
                b[grid.floor_index(&class.value(f, x))?] |= 1 << f;
            }
        }
        Ok(SoaCore { class: class.clone(), grid, solver, buckets, cache: HashMap::new() })
    }

    pub fn class(&self) -> &FunctionClass {
        &self.class
    }

    pub fn grid(&self) -> &AlphaGrid {
        &self.grid
    }

    pub fn alpha(&self) -> Rational {
        self.grid.alpha()
    }

    pub fn full_mask(&self) -> u64 {
        self.class.full_mask()
    }

    pub fn dim(&mut self, mask: u64) -> i32 {
        self.solver.dim(mask)
    }

    /// Rows of `mask` whose value at `x` rounds to the grid point with index `i`.
    pub fn restrict(&self, mask: u64, x: usize, i: usize) -> u64 {
        mask & self.buckets[x][i]
    }

    /// Grid indices whose bucket keeps the largest fat dimension, and that dimension.
    pub fn maximizers(&mut self, mask: u64, x: usize) -> (i32, Vec<usize>) {
        let dims: Vec<i32> = (0..self.grid.len()).map(|i| self.solver.dim(mask & self.buckets[x][i])).collect();
        let top = *dims.iter().max().expect("grid is nonempty");
        (top, (0..dims.len()).filter(|&i| dims[i] == top).collect())
    }

    /// Average of the maximizing grid points, or `None` for an empty version space.
    ///
    /// When the maximizers keep the dimension of the whole version space there
    /// can be at most two of them and they must be adjacent; anything else is
    /// reported as an error rather than averaged.
    pub fn predict(&mut self, mask: u64, x: usize) -> Result<Option<Rational>> {
        if mask == 0 {
            return Ok(None);
        }
        if let Some(p) = self.cache.get(&(mask, x)) {
            return Ok(*p);
        }
        let (top, r) = self.maximizers(mask, x);
        if top == self.solver.dim(mask) && (r.len() > 2 || (r.len() == 2 && r[1] != r[0] + 1)) {
            return Err(Error::Protocol(format!(
                "{} grid points at {x} keep the full dimension {top}: {r:?}",
                r.len()
            )));
        }
        let pts = self.grid.points();
        let p = r.iter().map(|&i| pts[i]).sum::<Rational>() / int(r.len() as i64);
        self.cache.insert((mask, x), Some(p));
        Ok(Some(p))
    }
}

/// Plays the fat-SOA prediction and shrinks the version space to the label's
/// bucket whenever the prediction misses by more than `α`.
pub struct FatSoa {
    core: SoaCore,
    version: u64,
    mistakes: usize,
}

impl FatSoa {
    pub fn new(class: &FunctionClass, alpha: Rational) -> Result<Self> {
        if class.is_empty() {
            return Err(Error::Domain("empty class".into()));
        }
        let core = SoaCore::new(class, alpha)?;
        let version = core.full_mask();
        Ok(FatSoa { core, version, mistakes: 0 })
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    /// Rounds so far with `|f_t(x_t) - y_t| > α`.
    pub fn mistakes(&self) -> usize {
        self.mistakes
    }

    pub fn prediction(&mut self, x: usize) -> Result<Rational> {
        self.core.predict(self.version, x)?.ok_or_else(|| Error::Protocol("version space is empty".into()))
    }
}

impl Learner for FatSoa {
    fn name(&self) -> String {
        format!("fatsoa(alpha={})", fmt_rational(&self.core.alpha()))
    }

    fn predict(&mut self, _t: usize, x: usize, _rng: &mut ChaCha8Rng) -> Result<Rational> {
        self.prediction(x)
    }

    fn update(&mut self, t: usize, x: usize, y: &Rational) -> Result<()> {
        let p = self.prediction(x)?;
        if (p - y).abs() <= self.core.alpha() {
            return Ok(());
        }
        self.mistakes += 1;
        let i = self.core.grid().floor_index(y)?;
        self.version = self.core.restrict(self.version, x, i);
        if self.version == 0 {
            return Err(Error::Protocol(format!(
                "no function is consistent with label {} at point {x} on round {t}",
                fmt_rational(y)
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::constants;
    use crate::rational::rat;
    use rand::SeedableRng;

    #[test]
    fn single_maximizer() {
        let c = constants(&[int(0)], 1).unwrap();
        let mut l = FatSoa::new(&c, int(1)).unwrap();
        // B_1 = {-1/2, 1/2}; 0 rounds down to -1/2.
        assert_eq!(l.prediction(0).unwrap(), rat(-1, 2));
    }

    #[test]
    fn adjacent_maximizers_average() {
        let c = constants(&[rat(-1, 2), rat(1, 2)], 1).unwrap();
        let mut l = FatSoa::new(&c, int(1)).unwrap();
        assert_eq!(l.prediction(0).unwrap(), int(0));
    }

    #[test]
    fn three_constants_realizable() {
        let c = constants(&[int(-1), int(0), int(1)], 2).unwrap();
        let mut l = FatSoa::new(&c, int(1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for t in 1..=4 {
            let x = t % 2;
            l.predict(t, x, &mut rng).unwrap();
            l.update(t, x, &int(0)).unwrap();
        }
        assert!(l.mistakes() <= 1);
        let mut l = FatSoa::new(&c, int(1)).unwrap();
        l.update(1, 0, &int(1)).unwrap();
        assert!(matches!(l.update(2, 0, &int(-1)), Err(Error::Protocol(_))));
    }
}
