//! Playing a learner against an adversary and recording the regret.

use num_traits::Signed;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::Learner;
use crate::classes::FunctionClass;
use crate::error::{Error, Result};
use crate::games::Adversary;
use crate::harness::rng::stream_rng;
use crate::rational::{fmt_rational, to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegretTrace {
    pub trial: u64,
    pub seed: u64,
    pub points: Vec<usize>,
    pub labels: Vec<Rational>,
    pub predictions: Vec<Rational>,
    pub losses: Vec<Rational>,
    pub cumulative: Rational,
    /// `min_f Σ_t |f(x_t) - y_t|`.
    pub comparator: Rational,
    pub regret: Rational,
}

impl RegretTrace {
    pub fn to_json(&self) -> serde_json::Value {
        let s = |v: &[Rational]| v.iter().map(fmt_rational).collect::<Vec<_>>();
        serde_json::json!({
            "trial": self.trial,
            "seed": self.seed,
            "points": self.points,
            "labels": s(&self.labels),
            "predictions": s(&self.predictions),
            "losses": s(&self.losses),
            "cumulative": fmt_rational(&self.cumulative),
            "comparator": fmt_rational(&self.comparator),
            "regret": fmt_rational(&self.regret),
        })
    }
}

pub fn comparator_loss(class: &FunctionClass, points: &[usize], labels: &[Rational]) -> Rational {
    (0..class.len())
        .map(|f| points.iter().zip(labels).map(|(&x, y)| (class.value(f, x) - y).abs()).sum::<Rational>())
        .min()
        .expect("class is nonempty")
}

/// One game of `horizon` rounds.
pub fn play(
    learner: &mut dyn Learner,
    adversary: &mut dyn Adversary,
    class: &FunctionClass,
    horizon: usize,
    rng: &mut ChaCha8Rng,
) -> Result<RegretTrace> {
    if class.is_empty() {
        return Err(Error::Domain("empty class".into()));
    }
    adversary.start(horizon, rng)?;
    let mut points = Vec::with_capacity(horizon);
    let mut labels = Vec::with_capacity(horizon);
    let mut predictions = Vec::with_capacity(horizon);
    let fail = |e: Error, points: &[usize], labels: &[Rational], preds: &[Rational]| -> Error {
        let rounds: Vec<String> = points
            .iter()
            .zip(labels)
            .zip(preds)
            .map(|((x, y), p)| format!("(x={x}, y={}, p={})", fmt_rational(y), fmt_rational(p)))
            .collect();
        Error::Protocol(format!("{e} after rounds [{}]", rounds.join(", ")))
    };
    for t in 1..=horizon {
        let (x, y) = adversary.next(t)?;
        if x >= class.domain_size() {
            return Err(Error::Lookup(format!("adversary played point {x} outside the domain")));
        }
        let p = learner.predict(t, x, rng).map_err(|e| fail(e, &points, &labels, &predictions))?;
        adversary.observe(t, &p);
        points.push(x);
        labels.push(y);
        predictions.push(p);
        learner.update(t, x, &y).map_err(|e| fail(e, &points, &labels, &predictions))?;
    }
    let losses: Vec<Rational> = predictions.iter().zip(&labels).map(|(p, y)| (p - y).abs()).collect();
    let cumulative: Rational = losses.iter().sum();
    let comparator = comparator_loss(class, &points, &labels);
    Ok(RegretTrace {
        trial: 0,
        seed: 0,
        points,
        labels,
        predictions,
        losses,
        cumulative,
        comparator,
        regret: cumulative - comparator,
    })
}

/// `trials` independent games; trial `i` uses stream `i` of `seed`.
pub fn simulate<L, A>(
    make_learner: L,
    make_adversary: A,
    class: &FunctionClass,
    horizon: usize,
    trials: u64,
    seed: u64,
) -> Result<Vec<RegretTrace>>
where
    L: Fn() -> Result<Box<dyn Learner>> + Sync,
    A: Fn() -> Result<Box<dyn Adversary>> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let mut learner = make_learner()?;
            let mut adversary = make_adversary()?;
            let mut trace = play(learner.as_mut(), adversary.as_mut(), class, horizon, &mut rng)?;
            trace.trial = i;
            trace.seed = seed;
            Ok(trace)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub trials: usize,
    pub mean_regret: f64,
    pub std_error: f64,
}

pub fn summarize(traces: &[RegretTrace]) -> Summary {
    let n = traces.len() as f64;
    let vals: Vec<f64> = traces.iter().map(|t| to_f64(&t.regret)).collect();
    let mean = vals.iter().sum::<f64>() / n;
    let var = if traces.len() > 1 { vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Summary { trials: traces.len(), mean_regret: mean, std_error: (var / n).sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::constants;
    use crate::games::{SequenceAdversary, StochasticAdversary};
    use crate::learners::{Const0, FatSoa};
    use crate::rational::int;
    use rand::SeedableRng;

    #[test]
    fn regret_is_cumulative_minus_comparator() {
        let c = constants(&[int(-1), int(1)], 1).unwrap();
        let mut adv = SequenceAdversary { rounds: vec![(0, int(1)), (0, int(1)), (0, int(-1))] };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = play(&mut Const0, &mut adv, &c, 3, &mut rng).unwrap();
        assert_eq!(t.cumulative, int(3));
        assert_eq!(t.comparator, int(2));
        assert_eq!(t.regret, int(1));
    }

    #[test]
    fn deterministic_given_seed() {
        let c = constants(&[int(-1), int(0), int(1)], 2).unwrap();
        let run = || {
            simulate(
                || Ok(Box::new(FatSoa::new(&c, int(1))?) as Box<dyn Learner>),
                || Ok(Box::new(StochasticAdversary::new(&c, None)?) as Box<dyn Adversary>),
                &c,
                5,
                8,
                42,
            )
            .unwrap()
        };
        assert_eq!(run(), run());
        for t in run() {
            assert!(t.regret <= int(5));
        }
    }
}
