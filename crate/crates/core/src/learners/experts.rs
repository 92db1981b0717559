//! Experts built on fat-SOA: each one overrides the version-space prediction
//! on a few chosen rounds with a chosen grid point.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand_chacha::ChaCha8Rng;

use super::soa::SoaCore;
use super::Learner;
use crate::classes::{AlphaGrid, FunctionClass};
use crate::covers::g_k;
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, Rational};
use crate::shattering::fat_dim;

/// Default cap on the size of one expert pool.
pub const DEFAULT_EXPERT_BUDGET: u64 = 100_000;

/// Override rounds `i_1 < ... < i_L` (1-based) and, for each, which of the
/// `|B_α| - 1` grid points other than the fat-SOA point's bucket to play.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpertSpec {
    pub rounds: Vec<usize>,
    pub labels: Vec<usize>,
}

impl ExpertSpec {
    pub fn plain() -> Self {
        ExpertSpec { rounds: Vec::new(), labels: Vec::new() }
    }

    fn schedule(&self, horizon: usize) -> Vec<Option<usize>> {
        let mut s = vec![None; horizon];
        for (&r, &l) in self.rounds.iter().zip(&self.labels) {
            s[r - 1] = Some(l);
        }
        s
    }
}

/// `Σ_{L ≤ d} C(T, L) (|B_α| - 1)^L`.
pub fn expert_count(fat: u64, horizon: u64, grid_len: u64) -> BigUint {
    g_k(fat, horizon, grid_len.saturating_sub(1))
}

/// `(2T/α)^d`.
pub fn expert_count_bound(fat: u64, horizon: u64, alpha: &Rational) -> f64 {
    (2.0 * horizon as f64 / crate::rational::to_f64(alpha)).powi(fat as i32)
}

/// Every expert with at most `fat_α(F)` override rounds among `1..=T`.
pub fn enumerate_experts(class: &FunctionClass, alpha: Rational, horizon: usize, budget: u64) -> Result<Vec<ExpertSpec>> {
    if class.is_empty() {
        return Err(Error::Domain("empty class".into()));
    }
    let d = fat_dim(class, alpha)?.max(0) as usize;
    let b = AlphaGrid::new(alpha)?.len();
    let count = expert_count(d as u64, horizon as u64, b as u64);
    if count.to_u64().is_none_or(|c| c > budget) {
        return Err(Error::Capacity(format!("{count} experts exceed the budget {budget}")));
    }
    let mut out = Vec::with_capacity(count.to_usize().unwrap_or(0));
    let mut rounds = Vec::new();
    choose(&mut out, &mut rounds, 1, horizon, d, b.saturating_sub(1));
    Ok(out)
}

fn choose(out: &mut Vec<ExpertSpec>, rounds: &mut Vec<usize>, next: usize, horizon: usize, left: usize, alts: usize) {
    let mut labels = vec![0; rounds.len()];
    loop {
        out.push(ExpertSpec { rounds: rounds.clone(), labels: labels.clone() });
        let Some(i) = (0..labels.len()).rev().find(|&i| labels[i] + 1 < alts) else {
            break;
        };
        labels[i] += 1;
        labels[i + 1..].iter_mut().for_each(|l| *l = 0);
    }
    if left == 0 || alts == 0 {
        return;
    }
    for r in next..=horizon {
        rounds.push(r);
        choose(out, rounds, r + 1, horizon, left - 1, alts);
        rounds.pop();
    }
}

/// A set of experts at one scale sharing one [`SoaCore`].
pub struct ExpertPool {
    core: SoaCore,
    horizon: usize,
    specs: Vec<ExpertSpec>,
    schedules: Vec<Vec<Option<usize>>>,
    masks: Vec<u64>,
    /// Grid index each expert played on the current round, if it was an override.
    played: Vec<Option<usize>>,
}

impl ExpertPool {
    pub fn new(class: &FunctionClass, alpha: Rational, horizon: usize, budget: u64) -> Result<Self> {
        let specs = enumerate_experts(class, alpha, horizon, budget)?;
        Self::with_specs(class, alpha, horizon, specs)
    }

    pub fn with_specs(class: &FunctionClass, alpha: Rational, horizon: usize, specs: Vec<ExpertSpec>) -> Result<Self> {
        let core = SoaCore::new(class, alpha)?;
        let alts = core.grid().len().saturating_sub(1);
        for s in &specs {
            if s.rounds.len() != s.labels.len()
                || s.rounds.windows(2).any(|w| w[0] >= w[1])
                || s.rounds.iter().any(|&r| r == 0 || r > horizon)
                || s.labels.iter().any(|&l| l >= alts)
            {
                return Err(Error::Domain(format!("malformed expert {s:?}")));
            }
        }
        let full = core.full_mask();
        Ok(ExpertPool {
            schedules: specs.iter().map(|s| s.schedule(horizon)).collect(),
            masks: vec![full; specs.len()],
            played: vec![None; specs.len()],
            core,
            horizon,
            specs,
        })
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn specs(&self) -> &[ExpertSpec] {
        &self.specs
    }

    pub fn alpha(&self) -> Rational {
        self.core.alpha()
    }

    pub fn reset(&mut self) {
        let full = self.core.full_mask();
        self.masks.iter_mut().for_each(|m| *m = full);
        self.played.iter_mut().for_each(|p| *p = None);
    }

    /// Every expert's prediction at `x` on round `t`.
    ///
    /// An expert whose version space has emptied falls back to predicting 0
    /// before any override is applied.
    pub fn predict_all(&mut self, t: usize, x: usize) -> Result<Vec<Rational>> {
        if t == 0 || t > self.horizon {
            return Err(Error::Protocol(format!("round {t} outside 1..={}", self.horizon)));
        }
        let mut out = Vec::with_capacity(self.specs.len());
        for e in 0..self.specs.len() {
            let base = self.core.predict(self.masks[e], x)?.unwrap_or_else(|| int(0));
            match self.schedules[e][t - 1] {
                None => {
                    self.played[e] = None;
                    out.push(base);
                }
                Some(l) => {
                    let skip = self.core.grid().floor_index(&base)?;
                    let i = if l < skip { l } else { l + 1 };
                    self.played[e] = Some(i);
                    out.push(self.core.grid().points()[i]);
                }
            }
        }
        Ok(out)
    }

    /// Applies the override restrictions for the round just predicted.
    pub fn advance(&mut self, x: usize) {
        for e in 0..self.specs.len() {
            if let Some(i) = self.played[e].take() {
                self.masks[e] = self.core.restrict(self.masks[e], x, i);
            }
        }
    }
}

/// One expert from a pool run on its own, for tracing.
pub struct SingleExpert {
    pool: ExpertPool,
}

impl SingleExpert {
    pub fn new(class: &FunctionClass, alpha: Rational, horizon: usize, spec: ExpertSpec) -> Result<Self> {
        Ok(SingleExpert { pool: ExpertPool::with_specs(class, alpha, horizon, vec![spec])? })
    }
}

impl Learner for SingleExpert {
    fn name(&self) -> String {
        format!("expert(alpha={}, {:?})", fmt_rational(&self.pool.alpha()), self.pool.specs[0])
    }

    fn predict(&mut self, t: usize, x: usize, _rng: &mut ChaCha8Rng) -> Result<Rational> {
        Ok(self.pool.predict_all(t, x)?[0])
    }

    fn update(&mut self, _t: usize, x: usize, _y: &Rational) -> Result<()> {
        self.pool.advance(x);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{constants, full_binary};
    use crate::rational::rat;

    #[test]
    fn counts() {
        assert_eq!(expert_count(0, 5, 4), BigUint::from(1u32));
        assert_eq!(expert_count(1, 2, 4), BigUint::from(7u32));
        let c = constants(&[int(-1), int(1)], 1).unwrap();
        let e = enumerate_experts(&c, rat(1, 2), 2, 1000).unwrap();
        assert_eq!(e.len(), 7);
        let mut dedup = e.clone();
        dedup.sort_by(|a, b| (&a.rounds, &a.labels).cmp(&(&b.rounds, &b.labels)));
        dedup.dedup();
        assert_eq!(dedup.len(), 7);
    }

    #[test]
    fn budget() {
        let c = full_binary(3).unwrap();
        assert!(matches!(enumerate_experts(&c, rat(1, 4), 10, 100), Err(Error::Capacity(_))));
    }

    #[test]
    fn override_skips_soa_bucket() {
        let c = constants(&[int(-1), int(1)], 2).unwrap();
        let specs = vec![ExpertSpec::plain(), ExpertSpec { rounds: vec![1], labels: vec![0] }];
        let mut pool = ExpertPool::with_specs(&c, rat(1, 2), 2, specs).unwrap();
        let p = pool.predict_all(1, 0).unwrap();
        let grid = AlphaGrid::new(rat(1, 2)).unwrap();
        assert_ne!(grid.floor(&p[0]).unwrap(), p[1]);
        assert_eq!(grid.floor(&p[1]).unwrap(), p[1]);
        pool.advance(0);
        assert_eq!(pool.masks[0], 3);
    }
}
