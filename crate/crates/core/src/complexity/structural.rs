//! Exact checks of the structural properties of the sequential Rademacher
//! complexity at the level of the supremum over all trees.

use num_traits::Signed;

use super::rad::{rad_sup, rad_tree_exact, SupMode};
use crate::classes::{iter_mask, ClassKind, FunctionClass};
use crate::covers::PiecewiseLinear;
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, rat, Rational};
use crate::trees::{enumerate_trees, DEFAULT_TREE_BUDGET};

/// Largest class accepted by [`structural_checks`].
pub const MAX_STRUCTURAL_FUNCTIONS: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralCheck {
    pub property: String,
    pub detail: String,
    pub lhs: Rational,
    pub rhs: Rational,
    /// `true` for `lhs == rhs`, `false` for `lhs ≤ rhs`.
    pub equality: bool,
    pub holds: bool,
}

impl StructuralCheck {
    fn new(property: &str, detail: String, lhs: Rational, rhs: Rational, equality: bool) -> Self {
        let holds = if equality { lhs == rhs } else { lhs <= rhs };
        StructuralCheck { property: property.into(), detail, lhs, rhs, equality, holds }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "property": self.property,
            "detail": self.detail,
            "lhs": fmt_rational(&self.lhs),
            "rhs": fmt_rational(&self.rhs),
            "relation": if self.equality { "==" } else { "<=" },
            "holds": self.holds,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralReport {
    pub depth: usize,
    pub checks: Vec<StructuralCheck>,
    pub holds: bool,
}

impl StructuralReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "depth": self.depth,
            "holds": self.holds,
            "checks": self.checks.iter().map(StructuralCheck::to_json).collect::<Vec<_>>(),
        })
    }
}

struct Sup {
    depth: usize,
    budget: u64,
}

impl Sup {
    fn of(&self, class: &FunctionClass) -> Result<Rational> {
        let r = rad_sup(class, self.depth, SupMode::Exact { budget: self.budget })?;
        Ok(r.exact.expect("exact mode is exact"))
    }
}

fn free(class: &FunctionClass, rows: Vec<Vec<Rational>>) -> Result<FunctionClass> {
    FunctionClass::from_rationals(class.domain_size(), ClassKind::Free, &rows)
}

fn rows(class: &FunctionClass) -> Vec<Vec<Rational>> {
    (0..class.len()).map(|f| class.row_values(f)).collect()
}

/// `φ(f(z), z)` with one map per domain point.
pub fn compose_pointwise(class: &FunctionClass, maps: &[PiecewiseLinear]) -> Result<FunctionClass> {
    if maps.len() != class.domain_size() {
        return Err(Error::Structural(format!("{} maps for a domain of size {}", maps.len(), class.domain_size())));
    }
    class.map_values(ClassKind::Free, |_, z, v| maps[z].apply(&v))
}

/// Runs every structural check on the class with trees of the given depth.
///
/// All quantities are exact suprema over every tree of that depth, so the
/// class must be small; see [`MAX_STRUCTURAL_FUNCTIONS`].
pub fn structural_checks(class: &FunctionClass, depth: usize) -> Result<StructuralReport> {
    if class.is_empty() {
        return Err(Error::Domain("empty class".into()));
    }
    if class.len() > MAX_STRUCTURAL_FUNCTIONS {
        return Err(Error::Capacity(format!(
            "structural checks take at most {MAX_STRUCTURAL_FUNCTIONS} functions, got {}",
            class.len()
        )));
    }
    let sup = Sup { depth, budget: crate::harness::budget_override().unwrap_or(DEFAULT_TREE_BUDGET) };
    let base = sup.of(class)?;
    let fs = rows(class);
    let n = class.domain_size();
    let mut checks = Vec::new();

    for mask in 1..class.full_mask() {
        let idx: Vec<usize> = iter_mask(mask).collect();
        let sub = class.subclass(&idx);
        checks.push(StructuralCheck::new("subset", format!("rows {idx:?}"), sup.of(&sub)?, base, false));
    }

    let mut hull = fs.clone();
    for i in 0..fs.len() {
        for j in i + 1..fs.len() {
            for l in [rat(1, 4), rat(1, 2), rat(3, 4)] {
                hull.push(fs[i].iter().zip(&fs[j]).map(|(a, b)| l * a + (int(1) - l) * b).collect());
            }
        }
    }
    let m = int(fs.len() as i64);
    hull.push((0..n).map(|z| fs.iter().map(|r| r[z]).sum::<Rational>() / m).collect());
    checks.push(StructuralCheck::new("convex-hull", "grid mixtures".into(), sup.of(&free(class, hull)?)?, base, true));

    for c in [int(-1), rat(1, 2), rat(-1, 2)] {
        let scaled = free(class, fs.iter().map(|r| r.iter().map(|v| c * v).collect()).collect())?;
        checks.push(StructuralCheck::new("scaling", format!("c = {}", fmt_rational(&c)), sup.of(&scaled)?, c.abs() * base, true));
    }
    let neg = free(class, fs.iter().map(|r| r.iter().map(|v| -v).collect()).collect())?;
    let mut reflect_ok = true;
    for x in enumerate_trees(n, depth, sup.budget)? {
        if rad_tree_exact(&neg, &x.reflect())? != rad_tree_exact(class, &x)? {
            reflect_ok = false;
            break;
        }
    }
    checks.push(StructuralCheck::new(
        "reflection",
        "negated class on reflected trees".into(),
        int(i64::from(reflect_ok)),
        int(1),
        true,
    ));

    let maps: Vec<(&str, PiecewiseLinear)> = vec![
        ("identity", PiecewiseLinear::identity()),
        ("clamp 1/2", PiecewiseLinear::clamp(rat(1, 2))),
        ("abs", PiecewiseLinear::new(vec![(int(-2), int(2)), (int(0), int(0)), (int(2), int(2))])?),
        ("halve", PiecewiseLinear::new(vec![(int(-2), int(-1)), (int(2), int(1))])?),
        ("double", PiecewiseLinear::new(vec![(int(-2), int(-4)), (int(2), int(4))])?),
    ];
    for (name, g) in &maps {
        let img = free(class, fs.iter().map(|r| r.iter().map(|v| g.apply(v)).collect()).collect())?;
        checks.push(StructuralCheck::new("lipschitz", (*name).into(), sup.of(&img)?, g.lipschitz() * base, false));
    }

    // Per-point maps: |t - y_z| with a different y at each point, and a mix.
    let shifts: Vec<PiecewiseLinear> = (0..n)
        .map(|z| {
            let y = if z % 2 == 0 { rat(1, 2) } else { rat(-1, 2) };
            PiecewiseLinear::new(vec![(int(-2), int(2) + y.abs()), (y, int(0)), (int(2), int(2) + y.abs())])
        })
        .collect::<Result<_>>()?;
    let mixed: Vec<PiecewiseLinear> = (0..n)
        .map(|z| if z % 2 == 0 { maps[1].1.clone() } else { maps[3].1.clone() })
        .collect();
    for (name, per_point) in [("absolute loss", shifts), ("clamp and halve", mixed)] {
        let l = per_point.iter().map(PiecewiseLinear::lipschitz).max().expect("nonempty domain");
        let img = compose_pointwise(class, &per_point)?;
        checks.push(StructuralCheck::new("contraction", name.into(), sup.of(&img)?, l * base, false));
    }

    for (name, h) in [
        ("zero", vec![int(0); n]),
        ("alternating", (0..n).map(|z| if z % 2 == 0 { rat(1, 2) } else { rat(-1, 3) }).collect::<Vec<_>>()),
    ] {
        let shifted = free(class, fs.iter().map(|r| r.iter().zip(&h).map(|(v, s)| v + s).collect()).collect())?;
        checks.push(StructuralCheck::new("shift", name.into(), sup.of(&shifted)?, base, true));
    }

    let holds = checks.iter().all(|c| c.holds);
    Ok(StructuralReport { depth, checks, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pennies_all_hold() {
        let c = FunctionClass::new(2, 1, ClassKind::RealGrid, vec![vec![1, 0], vec![0, 1]]).unwrap();
        for depth in 1..=2 {
            let r = structural_checks(&c, depth).unwrap();
            assert!(r.holds, "{:?}", r.checks.iter().filter(|c| !c.holds).collect::<Vec<_>>());
        }
    }

    #[test]
    fn identity_is_equality() {
        let c = FunctionClass::new(2, 2, ClassKind::RealGrid, vec![vec![1, -2], vec![2, 0]]).unwrap();
        let r = structural_checks(&c, 2).unwrap();
        let id = r.checks.iter().find(|c| c.detail == "identity").unwrap();
        assert_eq!(id.lhs, id.rhs);
    }

    #[test]
    fn too_large() {
        let c = crate::classes::full_binary(3).unwrap();
        assert!(matches!(structural_checks(&c, 1), Err(Error::Capacity(_))));
    }
}
