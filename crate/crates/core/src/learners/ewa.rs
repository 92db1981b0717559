//! Exponentially weighted averages over experts, and the multi-scale learner.

use num_traits::{Signed, ToPrimitive};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::experts::{expert_count, ExpertPool};
use super::Learner;
use crate::classes::{AlphaGrid, FunctionClass};
use crate::error::{Error, Result};
use crate::harness::rng::stream_rng;
use crate::rational::{fmt_rational, rat, to_f64, Rational};
use crate::shattering::fat_dim;

/// Weights over experts, renormalized after every update.
#[derive(Clone, Debug, PartialEq)]
pub struct Ewa {
    weights: Vec<f64>,
    eta: f64,
}

impl Ewa {
    pub fn new(priors: Vec<f64>, eta: f64) -> Result<Self> {
        if priors.is_empty() || priors.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::Domain("priors must be nonnegative and nonempty".into()));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("priors sum to {total}, not 1")));
        }
        if !(eta > 0.0) {
            return Err(Error::Domain("learning rate must be positive".into()));
        }
        Ok(Ewa { weights: priors, eta })
    }

    /// `η = T^{-1/2}`.
    pub fn for_horizon(priors: Vec<f64>, horizon: usize) -> Result<Self> {
        Self::new(priors, 1.0 / (horizon as f64).sqrt())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        self.weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
    }

    pub fn expected_loss(&self, losses: &[f64]) -> f64 {
        self.weights.iter().zip(losses).map(|(w, l)| w * l).sum()
    }

    /// `w_i ← w_i e^{-η ℓ_i} / Σ_j w_j e^{-η ℓ_j}` for losses in `[0, 1]`.
    pub fn update(&mut self, losses: &[f64]) -> Result<()> {
        if losses.len() != self.weights.len() {
            return Err(Error::Structural("one loss per expert is needed".into()));
        }
        if losses.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::Domain("losses must lie in [0, 1]".into()));
        }
        for (w, l) in self.weights.iter_mut().zip(losses) {
            *w *= (-self.eta * l).exp();
        }
        let z: f64 = self.weights.iter().sum();
        self.weights.iter_mut().for_each(|w| *w /= z);
        Ok(())
    }
}

/// `L_i + √T/8 + √T ln(1/p_i)`.
pub fn ewa_bound(expert_loss: f64, horizon: usize, prior: f64) -> f64 {
    let s = (horizon as f64).sqrt();
    expert_loss + s / 8.0 + s * (1.0 / prior).ln()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EwaMatrixReport {
    pub horizon: usize,
    pub trials: u64,
    /// Mean realized total loss over the trials.
    pub mean: f64,
    pub std_error: f64,
    /// Exact expected total loss, from the deterministic weights.
    pub expected: f64,
    /// `(Σ_t ℓ_{t,i}, bound for expert i)`.
    pub experts: Vec<(f64, f64)>,
    /// `mean ≤ bound_i + 3·stderr` for every expert.
    pub holds: bool,
}

/// Runs the sampling forecaster on a fixed loss matrix (`losses[t][i]`).
pub fn ewa_on_matrix(losses: &[Vec<f64>], priors: &[f64], trials: u64, seed: u64) -> Result<EwaMatrixReport> {
    let horizon = losses.len();
    if horizon == 0 || trials < 2 {
        return Err(Error::Domain("need at least one round and two trials".into()));
    }
    let base = Ewa::for_horizon(priors.to_vec(), horizon)?;
    let mut w = base.clone();
    let mut expected = 0.0;
    for row in losses {
        expected += w.expected_loss(row);
        w.update(row)?;
    }
    let totals: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let mut w = base.clone();
            let mut total = 0.0;
            for row in losses {
                total += row[w.sample(&mut rng)];
                w.update(row).expect("validated above");
            }
            total
        })
        .collect();
    let n = trials as f64;
    let mean = totals.iter().sum::<f64>() / n;
    let var = totals.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let std_error = (var / n).sqrt();
    let experts: Vec<(f64, f64)> = (0..priors.len())
        .map(|i| {
            let own: f64 = losses.iter().map(|r| r[i]).sum();
            (own, ewa_bound(own, horizon, priors[i]))
        })
        .collect();
    let holds = experts.iter().all(|&(_, b)| mean <= b + 3.0 * std_error);
    Ok(EwaMatrixReport { horizon, trials, mean, std_error, expected, experts, holds })
}

/// EWA over one or more expert pools, on supervised absolute loss halved into `[0, 1]`.
pub struct EwaLearner {
    pools: Vec<ExpertPool>,
    priors: Vec<f64>,
    ewa: Ewa,
    last: Vec<Rational>,
    label: String,
}

impl EwaLearner {
    /// `priors[i]` is the total mass of pool `i`, spread evenly over its experts.
    pub fn new(pools: Vec<ExpertPool>, pool_priors: &[f64], horizon: usize, label: String) -> Result<Self> {
        if pools.len() != pool_priors.len() || pools.iter().any(ExpertPool::is_empty) {
            return Err(Error::Domain("each nonempty pool needs one prior".into()));
        }
        let priors: Vec<f64> = pools
            .iter()
            .zip(pool_priors)
            .flat_map(|(p, &m)| std::iter::repeat(m / p.len() as f64).take(p.len()))
            .collect();
        let ewa = Ewa::for_horizon(priors.clone(), horizon)?;
        Ok(EwaLearner { pools, priors, ewa, last: Vec::new(), label })
    }

    pub fn weights(&self) -> &[f64] {
        self.ewa.weights()
    }

    pub fn experts(&self) -> usize {
        self.priors.len()
    }
}

impl Learner for EwaLearner {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn predict(&mut self, t: usize, x: usize, rng: &mut ChaCha8Rng) -> Result<Rational> {
        let mut preds = Vec::with_capacity(self.priors.len());
        for p in &mut self.pools {
            preds.extend(p.predict_all(t, x)?);
        }
        let i = self.ewa.sample(rng);
        let y = preds[i];
        self.last = preds;
        Ok(y)
    }

    fn update(&mut self, t: usize, x: usize, y: &Rational) -> Result<()> {
        if self.last.len() != self.priors.len() {
            return Err(Error::Protocol(format!("update before prediction on round {t}")));
        }
        let losses: Vec<f64> = self.last.iter().map(|p| to_f64(&(p - y).abs()) / 2.0).collect();
        self.ewa.update(&losses)?;
        for p in &mut self.pools {
            p.advance(x);
        }
        self.last.clear();
        Ok(())
    }
}

/// EWA with uniform priors over all experts at one scale.
pub fn ewa_learner(class: &FunctionClass, alpha: Rational, horizon: usize, budget: u64) -> Result<EwaLearner> {
    let pool = ExpertPool::new(class, alpha, horizon, budget)?;
    EwaLearner::new(vec![pool], &[1.0], horizon, format!("ewa(alpha={})", fmt_rational(&alpha)))
}

/// One scale of the multi-scale learner.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleInfo {
    pub index: u32,
    pub alpha: Rational,
    pub fat: i32,
    pub experts: u64,
    /// Mass of the whole pool after renormalizing over the scales kept.
    pub prior: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgnosticPlan {
    pub horizon: usize,
    pub scales: Vec<ScaleInfo>,
    /// Set when a scale was dropped because its pool exceeded the budget.
    pub truncated: bool,
}

/// Scales `α_i = 2^{-i}`, `i = 1..=max_scales`, with pool masses `6/(π² i²)`
/// renormalized over the scales whose pools fit in the budget.
pub fn agnostic_plan(class: &FunctionClass, horizon: usize, max_scales: u32, budget: u64) -> Result<AgnosticPlan> {
    let mut scales = Vec::new();
    let mut truncated = false;
    for i in 1..=max_scales {
        let alpha = rat(1, 1i64 << i);
        let fat = fat_dim(class, alpha)?.max(0);
        let b = AlphaGrid::new(alpha)?.len() as u64;
        match expert_count(fat as u64, horizon as u64, b).to_u64() {
            Some(n) if n <= budget => {
                let p = 6.0 / (std::f64::consts::PI.powi(2) * f64::from(i * i));
                scales.push(ScaleInfo { index: i, alpha, fat, experts: n, prior: p });
            }
            _ => {
                truncated = true;
                break;
            }
        }
    }
    if scales.is_empty() {
        return Err(Error::Capacity(format!("no scale fits in the expert budget {budget}")));
    }
    let total: f64 = scales.iter().map(|s| s.prior).sum();
    scales.iter_mut().for_each(|s| s.prior /= total);
    Ok(AgnosticPlan { horizon, scales, truncated })
}

pub fn agnostic_learner(class: &FunctionClass, plan: &AgnosticPlan) -> Result<EwaLearner> {
    let pools = plan
        .scales
        .iter()
        .map(|s| ExpertPool::new(class, s.alpha, plan.horizon, s.experts))
        .collect::<Result<Vec<_>>>()?;
    let priors: Vec<f64> = plan.scales.iter().map(|s| s.prior).collect();
    EwaLearner::new(pools, &priors, plan.horizon, "agnostic".into())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScaleBound {
    pub alpha: Rational,
    /// `αT + 2(√T/8 + √T ln(|E_α| / p_α))`, from the expert bound with the
    /// realized prior of the best expert, doubled to undo the loss halving.
    pub per_scale: f64,
    /// `αT + sqrt(T fat_α ln(2T/α)) + √T (3 + 2 ln ln(1/α))`.
    pub closed_form: f64,
}

pub fn agnostic_bounds(plan: &AgnosticPlan) -> Vec<ScaleBound> {
    let t = plan.horizon as f64;
    let s = t.sqrt();
    plan.scales
        .iter()
        .map(|sc| {
            let a = to_f64(&sc.alpha);
            let prior = sc.prior / sc.experts as f64;
            ScaleBound {
                alpha: sc.alpha,
                per_scale: a * t + 2.0 * (s / 8.0 + s * (1.0 / prior).ln()),
                closed_form: a * t
                    + (t * f64::from(sc.fat) * (2.0 * t / a).ln()).sqrt()
                    + s * (3.0 + 2.0 * (1.0 / a).ln().ln()),
            }
        })
        .collect()
}
