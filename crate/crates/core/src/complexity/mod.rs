//! Sequential Rademacher complexity and the bounds built around it.

mod dudley;
mod linear;
mod massart;
mod rad;
mod structural;

pub use dudley::{dudley_bound, fat_rad_relation, ChainingParams, DudleyReport, FatRadReport};
pub use linear::{linear_rad_check, linear_rad_tree, random_unit_vectors, LinearReport, MAX_LINEAR_DEPTH};
pub use massart::{massart_bound, MassartReport};
pub use rad::{path_sum_total, rad_fixed_tree, rad_sup, rad_tree_exact, SupMode, MAX_EXACT_PATH_DEPTH};
pub use structural::{compose_pointwise, structural_checks, StructuralCheck, StructuralReport, MAX_STRUCTURAL_FUNCTIONS};

use serde::Serialize;

use crate::rational::{to_f64, Rational};
use crate::trees::DomainTree;

/// How a Rademacher average was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadKind {
    /// Maximum over every tree, exact.
    ExactSup,
    /// Exact average over every path of one tree.
    ExactTree,
    /// Sampled paths on one tree.
    MonteCarlo,
    /// Best tree found by local search; a lower bound on the supremum.
    LocalSearch,
}

/// Evaluation mode on a fixed tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadMode {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadResult {
    pub value: f64,
    pub exact: Option<Rational>,
    pub mode: RadKind,
    pub argmax_tree: Option<DomainTree>,
    /// Paths, trees, trials or restarts, depending on the mode.
    pub samples: u64,
    pub std_error: Option<f64>,
    pub seed: Option<u64>,
}

impl RadResult {
    pub fn exact_tree(value: Rational, x: DomainTree) -> Self {
        RadResult {
            value: to_f64(&value),
            exact: Some(value),
            mode: RadKind::ExactTree,
            samples: 1 << x.depth(),
            argmax_tree: Some(x),
            std_error: None,
            seed: None,
        }
    }

    pub fn exact_sup(value: Rational, x: DomainTree) -> Self {
        RadResult {
            value: to_f64(&value),
            exact: Some(value),
            mode: RadKind::ExactSup,
            argmax_tree: Some(x),
            samples: 0,
            std_error: None,
            seed: None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "value": self.value,
            "exact": self.exact.map(|r| crate::rational::fmt_rational(&r)),
            "mode": self.mode,
            "argmax_tree": self.argmax_tree.as_ref().map(DomainTree::to_json),
            "samples": self.samples,
            "std_error": self.std_error,
            "seed": self.seed,
        })
    }
}
