//! Adversaries for the supervised protocol: each round they reveal a point
//! and a label, and afterwards see the player's realized prediction.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::classes::FunctionClass;
use crate::error::{Error, Result};
use crate::rational::{int, to_f64, Rational};
use crate::shattering::{extract_shattered_tree, ShatterCertificate};
use crate::trees::DomainTree;

pub trait Adversary: Send {
    fn name(&self) -> &'static str;

    /// Begins a new game, drawing any internal randomness.
    fn start(&mut self, horizon: usize, rng: &mut ChaCha8Rng) -> Result<()>;

    /// Point and label for round `t` (1-based).
    fn next(&mut self, t: usize) -> Result<(usize, Rational)>;

    /// The player's realized prediction on round `t`.
    fn observe(&mut self, _t: usize, _prediction: &Rational) {}
}

fn sign_value(s: i8) -> Rational {
    int(i64::from(s))
}

fn draw_signs(n: usize, rng: &mut ChaCha8Rng) -> Vec<i8> {
    (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
}

fn prefix_bits(signs: &[i8]) -> u64 {
    signs.iter().fold(0u64, |acc, &s| acc << 1 | u64::from(s > 0))
}

/// Labels are uniform signs and the point follows the tree along the labels so far.
#[derive(Clone, Debug)]
pub struct TreeAdversary {
    tree: DomainTree,
    fixed: Option<Vec<i8>>,
    labels: Vec<i8>,
}

impl TreeAdversary {
    /// Plays a predetermined label sequence instead of drawing one.
    pub fn with_labels(tree: DomainTree, labels: Vec<i8>) -> Result<Self> {
        if labels.len() != tree.depth() || labels.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Domain("labels must be one sign per level".into()));
        }
        Ok(TreeAdversary { tree, fixed: Some(labels), labels: Vec::new() })
    }
}

pub fn rad_adversary(tree: DomainTree) -> TreeAdversary {
    TreeAdversary { tree, fixed: None, labels: Vec::new() }
}

impl Adversary for TreeAdversary {
    fn name(&self) -> &'static str {
        "tree"
    }

    fn start(&mut self, horizon: usize, rng: &mut ChaCha8Rng) -> Result<()> {
        if horizon != self.tree.depth() {
            return Err(Error::Protocol(format!("tree depth {} but horizon {horizon}", self.tree.depth())));
        }
        self.labels = match &self.fixed {
            Some(l) => l.clone(),
            None => draw_signs(horizon, rng),
        };
        Ok(())
    }

    fn next(&mut self, t: usize) -> Result<(usize, Rational)> {
        let x = *self.tree.node(t, prefix_bits(&self.labels[..t - 1]));
        Ok((x, sign_value(self.labels[t - 1])))
    }
}

/// The block construction behind the lower bound: rounds are split into
/// `depth` blocks of length `k`; block `j` shows the node of a shattered tree
/// reached by the majority signs of the earlier blocks, with uniform labels.
#[derive(Clone, Debug)]
pub struct BlockAdversary {
    cert: ShatterCertificate,
    block: usize,
    fixed: Option<Vec<i8>>,
    signs: Vec<i8>,
}

impl BlockAdversary {
    pub fn with_signs(&self, signs: Vec<i8>) -> Result<Self> {
        if signs.len() != self.horizon() || signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Domain("one sign per round is needed".into()));
        }
        Ok(BlockAdversary { fixed: Some(signs), ..self.clone() })
    }

    pub fn depth(&self) -> usize {
        self.cert.depth()
    }

    pub fn block_len(&self) -> usize {
        self.block
    }

    pub fn horizon(&self) -> usize {
        self.block * self.depth()
    }

    pub fn certificate(&self) -> &ShatterCertificate {
        &self.cert
    }

    /// `α sqrt(T d / 8)` for the depth actually used.
    pub fn bound(&self) -> f64 {
        to_f64(&self.cert.alpha) * (self.horizon() as f64 * self.depth() as f64 / 8.0).sqrt()
    }

    /// Majority sign of block `j` (1-based), ties to `+1`.
    fn block_sign(&self, j: usize) -> i8 {
        let s: i64 = self.signs[(j - 1) * self.block..j * self.block].iter().map(|&e| i64::from(e)).sum();
        if s >= 0 {
            1
        } else {
            -1
        }
    }
}

/// Builds the block adversary from a shattered tree of depth `fat_α`.
///
/// With `T ≥ d` the depth used is the largest divisor of `T` not above `d`,
/// so that blocks have equal length; with `T < d` the tree is cut to depth `T`.
pub fn lower_bound_adversary(class: &FunctionClass, alpha: Rational, horizon: usize) -> Result<BlockAdversary> {
    if horizon == 0 {
        return Err(Error::Domain("horizon must be positive".into()));
    }
    let cert = extract_shattered_tree(class, alpha)?;
    let d = cert.depth();
    let used = if horizon < d { horizon } else { (1..=d).rev().find(|&e| horizon % e == 0).expect("1 divides") };
    let cert = ShatterCertificate { tree: cert.tree.truncate(used)?, witness: cert.witness.truncate(used)?, alpha };
    Ok(BlockAdversary { cert, block: horizon / used, fixed: None, signs: Vec::new() })
}

impl Adversary for BlockAdversary {
    fn name(&self) -> &'static str {
        "lowerbound"
    }

    fn start(&mut self, horizon: usize, rng: &mut ChaCha8Rng) -> Result<()> {
        if horizon != self.horizon() {
            return Err(Error::Protocol(format!("adversary built for horizon {} but got {horizon}", self.horizon())));
        }
        self.signs = match &self.fixed {
            Some(s) => s.clone(),
            None => draw_signs(horizon, rng),
        };
        Ok(())
    }

    fn next(&mut self, t: usize) -> Result<(usize, Rational)> {
        let j = (t - 1) / self.block + 1;
        let eps: Vec<i8> = (1..j).map(|i| self.block_sign(i)).collect();
        let x = *self.cert.tree.node(j, prefix_bits(&eps));
        Ok((x, sign_value(self.signs[t - 1])))
    }
}

/// Uniform points labelled by one fixed row of the class.
#[derive(Clone, Debug)]
pub struct StochasticAdversary {
    class: FunctionClass,
    fixed: Option<usize>,
    target: usize,
    points: Vec<usize>,
}

impl StochasticAdversary {
    /// `target` picks the labelling row; `None` draws one per game.
    pub fn new(class: &FunctionClass, target: Option<usize>) -> Result<Self> {
        if class.is_empty() || target.is_some_and(|f| f >= class.len()) {
            return Err(Error::Lookup("target row outside the class".into()));
        }
        Ok(StochasticAdversary { class: class.clone(), fixed: target, target: 0, points: Vec::new() })
    }

    pub fn target(&self) -> usize {
        self.target
    }
}

impl Adversary for StochasticAdversary {
    fn name(&self) -> &'static str {
        "stochastic"
    }

    fn start(&mut self, horizon: usize, rng: &mut ChaCha8Rng) -> Result<()> {
        self.target = self.fixed.unwrap_or_else(|| rng.gen_range(0..self.class.len()));
        self.points = (0..horizon).map(|_| rng.gen_range(0..self.class.domain_size())).collect();
        Ok(())
    }

    fn next(&mut self, t: usize) -> Result<(usize, Rational)> {
        let x = self.points[t - 1];
        Ok((x, self.class.value(self.target, x)))
    }
}

/// A fixed sequence of `(x_t, y_t)`.
#[derive(Clone, Debug)]
pub struct SequenceAdversary {
    pub rounds: Vec<(usize, Rational)>,
}

impl Adversary for SequenceAdversary {
    fn name(&self) -> &'static str {
        "sequence"
    }

    fn start(&mut self, horizon: usize, _rng: &mut ChaCha8Rng) -> Result<()> {
        if horizon != self.rounds.len() {
            return Err(Error::Protocol(format!("{} rounds but horizon {horizon}", self.rounds.len())));
        }
        Ok(())
    }

    fn next(&mut self, t: usize) -> Result<(usize, Rational)> {
        Ok(self.rounds[t - 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::constants;
    use crate::trees::Tree;
    use rand::SeedableRng;

    #[test]
    fn tree_follows_labels() {
        let x = Tree::new(2, vec![0, 1, 2]).unwrap();
        let mut a = TreeAdversary::with_labels(x, vec![1, -1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        a.start(2, &mut rng).unwrap();
        assert_eq!(a.next(1).unwrap(), (0, int(1)));
        assert_eq!(a.next(2).unwrap(), (2, int(-1)));
    }

    #[test]
    fn block_construction() {
        let c = constants(&[int(-1), int(1)], 1).unwrap();
        let a = lower_bound_adversary(&c, int(2), 4).unwrap();
        assert_eq!((a.depth(), a.block_len()), (1, 4));
        assert!((a.bound() - 2.0 * 0.5f64.sqrt()).abs() < 1e-12);
        let cut = lower_bound_adversary(&crate::classes::full_binary(3).unwrap(), int(2), 2).unwrap();
        assert_eq!((cut.depth(), cut.block_len()), (2, 1));
        let single = constants(&[int(0)], 1).unwrap();
        assert!(matches!(lower_bound_adversary(&single, int(1), 4), Err(Error::Domain(_))));
    }
}
