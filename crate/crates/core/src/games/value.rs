//! The minimax value of the online game on a finite class, by backward induction.
//!
//! The regret at the end of the game depends on `x_1..x_T` only through the
//! vector of cumulative losses of the rows, so states are keyed by that
//! vector and the number of steps left.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::matrix::solve_matrix_game;
use super::simplex::{maximize, Constraint, Relation};
use crate::classes::{supervised_loss_class, FunctionClass};
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, Rational};

/// Default cap on the number of histories `Σ_{t ≤ T} n^t`.
pub const DEFAULT_GAME_BUDGET: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LossMode {
    /// The player picks a row `f` and loses `f(x_t)`.
    Direct,
    /// The class is the absolute loss class of `base` over `X × Y`.
    Supervised { base: FunctionClass, labels: Vec<Rational> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameSpec {
    pub class: FunctionClass,
    pub horizon: usize,
    pub mode: LossMode,
    pub budget: u64,
    /// Keep the optimal mixtures at every history, not just the root.
    pub record_policy: bool,
}

impl GameSpec {
    pub fn direct(class: FunctionClass, horizon: usize) -> Self {
        GameSpec {
            class,
            horizon,
            mode: LossMode::Direct,
            budget: crate::harness::budget_override().unwrap_or(DEFAULT_GAME_BUDGET),
            record_policy: false,
        }
    }

    fn histories(&self) -> Option<u64> {
        let n = self.class.domain_size() as u64;
        (0..=self.horizon as u32).try_fold(0u64, |acc, t| acc.checked_add(n.checked_pow(t)?))
    }

    fn check(&self) -> Result<()> {
        if self.class.is_empty() {
            return Err(Error::Domain("empty class".into()));
        }
        if self.horizon == 0 {
            return Err(Error::Domain("horizon must be positive".into()));
        }
        match self.histories() {
            Some(h) if h <= self.budget => Ok(()),
            _ => Err(Error::Capacity(format!(
                "{}^{} histories exceed the game budget {}",
                self.class.domain_size(),
                self.horizon,
                self.budget
            ))),
        }
    }
}

/// The supervised game with absolute loss on labels `Y`.
pub fn supervised_spec(class: &FunctionClass, labels: &[Rational], horizon: usize) -> Result<GameSpec> {
    let loss = supervised_loss_class(class, labels)?;
    let mut spec = GameSpec::direct(loss, horizon);
    spec.mode = LossMode::Supervised { base: class.clone(), labels: labels.to_vec() };
    Ok(spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    Primal,
    Dual,
}

/// Optimal mixtures at one history.
#[derive(Clone, Debug, PartialEq)]
pub struct Policy {
    /// Over rows; absent in the dual form.
    pub player: Option<Vec<BigRational>>,
    /// Over domain points.
    pub adversary: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameValue {
    pub value: BigRational,
    pub form: Form,
    /// Distinct states solved.
    pub states: usize,
    pub root: Policy,
    /// Keyed by the history `x_1..x_t`, filled when requested.
    pub policy: BTreeMap<Vec<usize>, Policy>,
}

fn big_vec(v: &[BigRational]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

impl GameValue {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "form": match self.form { Form::Primal => "primal", Form::Dual => "dual" },
            "value": self.value.to_string(),
            "value_f64": crate::rational::big_to_f64(&self.value),
            "states": self.states,
            "player": self.root.player.as_deref().map(big_vec),
            "adversary": big_vec(&self.root.adversary),
        })
    }
}

struct Solver<'a> {
    spec: &'a GameSpec,
    form: Form,
    scale: BigRational,
    memo: HashMap<(usize, Vec<i64>), (BigRational, Policy)>,
    policy: BTreeMap<Vec<usize>, Policy>,
}

impl Solver<'_> {
    fn big(&self, raw: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(raw)) / &self.scale
    }

    fn value(&mut self, cum: Vec<i64>, history: &mut Vec<usize>) -> Result<BigRational> {
        let left = self.spec.horizon - history.len();
        if left == 0 {
            return Ok(-self.big(*cum.iter().min().expect("class is nonempty")));
        }
        let key = (left, cum);
        let cached = self.memo.get(&key).cloned();
        let (v, pol) = match cached {
            Some(hit) if !self.spec.record_policy => hit,
            _ => {
                let class = &self.spec.class;
                let n = class.domain_size();
                let mut next = Vec::with_capacity(n);
                for x in 0..n {
                    let c: Vec<i64> = key.1.iter().zip(class.table()).map(|(s, row)| s + row[x]).collect();
                    history.push(x);
                    next.push(self.value(c, history)?);
                    history.pop();
                }
                let solved = match cached {
                    Some(hit) => hit,
                    None => self.solve_stage(&next)?,
                };
                self.memo.insert(key.clone(), solved.clone());
                solved
            }
        };
        if self.spec.record_policy {
            self.policy.insert(history.clone(), pol);
        }
        Ok(v)
    }

    fn solve_stage(&self, next: &[BigRational]) -> Result<(BigRational, Policy)> {
        let class = &self.spec.class;
        let n = class.domain_size();
        match self.form {
            Form::Primal => {
                let m: Vec<Vec<BigRational>> = class
                    .table()
                    .iter()
                    .map(|row| (0..n).map(|x| self.big(row[x]) + &next[x]).collect())
                    .collect();
                let s = solve_matrix_game(&m)?;
                Ok((s.value, Policy { player: Some(s.row), adversary: s.col }))
            }
            Form::Dual => {
                // Variables: z⁺, z⁻, p_0..p_{n-1}.
                let mut c = vec![BigRational::one(), -BigRational::one()];
                c.extend(next.iter().cloned());
                let mut constraints: Vec<Constraint> = class
                    .table()
                    .iter()
                    .map(|row| {
                        let mut coeffs = vec![BigRational::one(), -BigRational::one()];
                        coeffs.extend(row.iter().map(|&v| -self.big(v)));
                        Constraint { coeffs, relation: Relation::Le, rhs: BigRational::zero() }
                    })
                    .collect();
                let mut simplex = vec![BigRational::zero(), BigRational::zero()];
                simplex.extend((0..n).map(|_| BigRational::one()));
                constraints.push(Constraint { coeffs: simplex, relation: Relation::Eq, rhs: BigRational::one() });
                let s = maximize(&c, &constraints)?;
                Ok((s.value, Policy { player: None, adversary: s.x[2..].to_vec() }))
            }
        }
    }
}

fn run(spec: &GameSpec, form: Form) -> Result<GameValue> {
    spec.check()?;
    let mut solver = Solver {
        spec,
        form,
        scale: BigRational::from_integer(BigInt::from(spec.class.scale())),
        memo: HashMap::new(),
        policy: BTreeMap::new(),
    };
    let value = solver.value(vec![0; spec.class.len()], &mut Vec::new())?;
    let root = solver.memo.get(&(spec.horizon, vec![0; spec.class.len()])).expect("root solved").1.clone();
    Ok(GameValue { value, form, states: solver.memo.len(), root, policy: solver.policy })
}

/// `inf_q sup_x E_{f∼q}[f(x) + V(h·x)]` at every history, with terminal
/// value `-min_f Σ_t f(x_t)`.
pub fn value_primal(spec: &GameSpec) -> Result<GameValue> {
    run(spec, Form::Primal)
}

/// `sup_p [min_f E_{x∼p} f(x) + E_{x∼p} W(h·x)]` at every history, as a linear
/// program with one free epigraph variable.
pub fn value_dual(spec: &GameSpec) -> Result<GameValue> {
    run(spec, Form::Dual)
}

/// Human-readable description of a spec, for reports.
pub fn describe(spec: &GameSpec) -> String {
    match &spec.mode {
        LossMode::Direct => format!("direct n={} |F|={} T={}", spec.class.domain_size(), spec.class.len(), spec.horizon),
        LossMode::Supervised { base, labels } => format!(
            "supervised n={} |F|={} Y=[{}] T={}",
            base.domain_size(),
            base.len(),
            labels.iter().map(fmt_rational).collect::<Vec<_>>().join(","),
            spec.horizon
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{constants, ClassKind};
    use crate::rational::int;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn pennies() -> FunctionClass {
        FunctionClass::new(2, 1, ClassKind::RealGrid, vec![vec![1, 0], vec![0, 1]]).unwrap()
    }

    #[test]
    fn singleton_is_zero() {
        let c = FunctionClass::new(2, 2, ClassKind::RealGrid, vec![vec![1, -1]]).unwrap();
        for t in 1..=3 {
            let spec = GameSpec::direct(c.clone(), t);
            assert!(value_primal(&spec).unwrap().value.is_zero());
            assert!(value_dual(&spec).unwrap().value.is_zero());
        }
    }

    #[test]
    fn pennies_values() {
        let spec = GameSpec::direct(pennies(), 1);
        assert_eq!(value_primal(&spec).unwrap().value, big(1, 2));
        assert_eq!(value_dual(&spec).unwrap().value, big(1, 2));
        let spec = GameSpec::direct(pennies(), 2);
        assert_eq!(value_primal(&spec).unwrap().value, value_dual(&spec).unwrap().value);
    }

    #[test]
    fn policy_recorded() {
        let mut spec = GameSpec::direct(pennies(), 2);
        spec.record_policy = true;
        let v = value_primal(&spec).unwrap();
        assert_eq!(v.policy.len(), 3);
        assert_eq!(v.policy[&vec![]].player, Some(vec![big(1, 2), big(1, 2)]));
    }

    #[test]
    fn supervised_singleton() {
        let c = constants(&[int(0)], 2).unwrap();
        let spec = supervised_spec(&c, &[int(-1), int(1)], 2).unwrap();
        assert!(value_primal(&spec).unwrap().value.is_zero());
    }

    #[test]
    fn budget() {
        let mut spec = GameSpec::direct(pennies(), 4);
        spec.budget = 10;
        assert!(matches!(value_primal(&spec), Err(Error::Capacity(_))));
    }
}
