//! Online learners for the supervised protocol and the loop that plays them.

mod ewa;
mod experts;
mod simulate;
mod soa;

pub use ewa::{
    agnostic_bounds, agnostic_learner, agnostic_plan, ewa_bound, ewa_learner, ewa_on_matrix, AgnosticPlan, Ewa,
    EwaLearner, EwaMatrixReport, ScaleBound, ScaleInfo,
};
pub use experts::{
    enumerate_experts, expert_count, expert_count_bound, ExpertPool, ExpertSpec, SingleExpert, DEFAULT_EXPERT_BUDGET,
};
pub use simulate::{comparator_loss, play, simulate, summarize, RegretTrace, Summary};
pub use soa::{FatSoa, SoaCore};

use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::rational::{int, Rational};

/// A player that predicts a value in `[-1, 1]` for each revealed point.
pub trait Learner {
    fn name(&self) -> String;

    fn predict(&mut self, t: usize, x: usize, rng: &mut ChaCha8Rng) -> Result<Rational>;

    fn update(&mut self, t: usize, x: usize, y: &Rational) -> Result<()>;
}

/// Always predicts 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct Const0;

impl Learner for Const0 {
    fn name(&self) -> String {
        "const0".into()
    }

    fn predict(&mut self, _t: usize, _x: usize, _rng: &mut ChaCha8Rng) -> Result<Rational> {
        Ok(int(0))
    }

    fn update(&mut self, _t: usize, _x: usize, _y: &Rational) -> Result<()> {
        Ok(())
    }
}
