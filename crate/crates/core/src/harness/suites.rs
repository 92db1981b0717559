//! Verification suites. Each suite generates seeded instances, evaluates both
//! sides of one family of inequalities and returns one row per check.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::report::{ReportRecord, Rel};
use super::rng::stream_rng;
use crate::classes::{constants, leaf_class, random_class, random_levels_class, AlphaGrid, FunctionClass};
use crate::complexity::{
    dudley_bound, fat_rad_relation, linear_rad_check, massart_bound, rad_sup, rad_tree_exact, random_unit_vectors,
    structural_checks, ChainingParams, SupMode,
};
use crate::covers::{
    cover_construct, cover_number, g_k, is_cover, packing_number, pointwise_entropy, strong_packing_number,
    zero_cover_min, ConstructMode, CoverMode, Norm,
};
use crate::error::{Error, Result};
use crate::games::{
    lower_bound_adversary, supervised_spec, value_dual, value_primal, Adversary, GameSpec, SequenceAdversary,
    TreeAdversary,
};
use crate::learners::{
    agnostic_learner, agnostic_plan, enumerate_experts, ewa_learner, ewa_on_matrix, expert_count, expert_count_bound,
    play, simulate, summarize, Const0, ExpertPool, ExpertSpec, FatSoa, Learner, SingleExpert,
};
use crate::rational::{fmt_rational, int, rat, to_big, to_f64, Rational};
use crate::shattering::fat_dim;
use crate::tailbounds::pollard_check;
use crate::trees::{enumerate_trees, random_tree, DomainTree, RealTree, Tree, DEFAULT_TREE_BUDGET};

/// Suite names in report order.
pub const SUITES: [&str; 17] = [
    "duality", "value-rad", "rad-lower", "packing", "gap", "sauer", "massart", "chaining", "fat-rad", "fatsoa", "experts", "ewa",
    "lowerbound", "linear", "structural", "pollard", "entropy",
];

/// Runs one suite, or every suite for `all`.
pub fn run_suite(name: &str, config: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    if name == "all" {
        let mut out = Vec::new();
        for s in SUITES {
            out.extend(run_suite(s, config)?);
        }
        return Ok(out);
    }
    let c = config;
    match name {
        "duality" => duality(c),
        "value-rad" => value_rad(c),
        "rad-lower" => rad_lower(c),
        "packing" => packing_chain(c),
        "gap" => gap(c),
        "sauer" => sauer(c),
        "massart" => massart(c),
        "chaining" => chaining(c),
        "fat-rad" => fat_rad(c),
        "fatsoa" => fatsoa(c),
        "experts" => experts(c),
        "ewa" => ewa(c),
        "lowerbound" => lowerbound(c),
        "linear" => linear(c),
        "structural" => structural(c),
        "pollard" => pollard(c),
        "entropy" => entropy(c),
        other => Err(Error::Usage(format!("unknown suite {other:?}; expected one of {} or all", SUITES.join(", ")))),
    }
}

/// Runs `f` on instances `0..count` in parallel, each with its own stream of
/// the configured seed, and concatenates the rows in instance order.
fn per_instance<F>(cfg: &ExperimentConfig, count: u64, f: F) -> Result<Vec<ReportRecord>>
where
    F: Fn(u64, &mut ChaCha8Rng) -> Result<Vec<ReportRecord>> + Sync,
{
    let parts: Vec<Result<Vec<ReportRecord>>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(cfg.seed, i);
            let start = Instant::now();
            let mut rows = f(i, &mut rng)?;
            if cfg.timing {
                let ms = start.elapsed().as_millis() as u64;
                for r in &mut rows {
                    r.runtime_ms = Some(ms);
                }
            }
            Ok(rows)
        })
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn tree_budget(cfg: &ExperimentConfig) -> u64 {
    cfg.budget.unwrap_or(DEFAULT_TREE_BUDGET)
}

fn sup(cfg: &ExperimentConfig, class: &FunctionClass, depth: usize) -> Result<Rational> {
    let r = rad_sup(class, depth, SupMode::Exact { budget: tree_budget(cfg) })?;
    Ok(r.exact.expect("exact mode is exact"))
}

fn shape(c: &FunctionClass, t: usize) -> String {
    format!("n={} |F|={} T={}", c.domain_size(), c.len(), t)
}

/// Small game with values in `{0, 1/2, 1}`.
fn random_game(rng: &mut ChaCha8Rng) -> Result<(FunctionClass, usize)> {
    let n = rng.gen_range(1..=2);
    let m = rng.gen_range(2..=3);
    let t = rng.gen_range(1..=3);
    Ok((random_levels_class(n, m, 2, rng.gen())?, t))
}

fn duality(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    per_instance(cfg, cfg.instances_or(20), |i, rng| {
        let (c, t) = random_game(rng)?;
        let spec = GameSpec::direct(c.clone(), t);
        let p = value_primal(&spec)?;
        let d = value_dual(&spec)?;
        Ok(vec![ReportRecord::big("duality", i, "primal == dual", &p.value, Rel::Eq, &d.value).with_detail(shape(&c, t))])
    })
}

fn value_rad(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    per_instance(cfg, cfg.instances_or(20), |i, rng| {
        let (c, t) = random_game(rng)?;
        let v = value_primal(&GameSpec::direct(c.clone(), t))?.value;
        let r = sup(cfg, &c, t)?;
        Ok(vec![ReportRecord::big("value-rad", i, "value <= 2 rad", &v, Rel::Le, &(to_big(&r) * to_big(&int(2))))
            .with_detail(shape(&c, t))])
    })
}

fn sign_vectors(len: usize) -> impl Iterator<Item = Vec<i8>> {
    (0..1u64 << len).map(move |b| (0..len).map(|t| if (b >> (len - 1 - t)) & 1 == 1 { 1 } else { -1 }).collect())
}

/// Exact expected regret against the tree adversary, averaging over every
/// label vector with the player's own randomness fixed by `seed`.
fn tree_regret(make: &dyn Fn() -> Result<Box<dyn Learner>>, c: &FunctionClass, x: &DomainTree, seed: u64) -> Result<Rational> {
    let t = x.depth();
    let mut total = Rational::from_integer(0);
    for labels in sign_vectors(t) {
        let mut adv = TreeAdversary::with_labels(x.clone(), labels)?;
        let mut rng = stream_rng(seed, 0);
        total += play(make()?.as_mut(), &mut adv, c, t, &mut rng)?.regret;
    }
    Ok(total / Rational::from_integer(1 << t))
}

fn rad_lower(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    per_instance(cfg, cfg.instances_or(12), |i, rng| {
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(2..=3);
        let t = rng.gen_range(1..=3);
        let c = random_class(n, m, 2, rng.gen())?;
        let seed: u64 = rng.gen();
        let players: Vec<(&str, Box<dyn Fn() -> Result<Box<dyn Learner>>>)> = vec![
            ("const0", Box::new(|| Ok(Box::new(Const0) as Box<dyn Learner>))),
            ("ewa", Box::new(|| Ok(Box::new(ewa_learner(&c, int(1), t, 10_000)?) as Box<dyn Learner>))),
            ("expert", Box::new(|| Ok(Box::new(SingleExpert::new(&c, rat(1, 2), t, ExpertSpec::plain())?) as Box<dyn Learner>))),
        ];
        let trees: Vec<DomainTree> = enumerate_trees(n, t, tree_budget(cfg))?.collect();
        let mut rows = Vec::new();
        let mut best = Rational::from_integer(0);
        for (name, make) in &players {
            let mut mismatches = 0u64;
            for x in &trees {
                let rad = rad_tree_exact(&c, x)?;
                best = best.max(rad);
                if tree_regret(make.as_ref(), &c, x, seed)? != rad {
                    mismatches += 1;
                }
            }
            rows.push(
                ReportRecord::count("rad-lower", i, &format!("trees with E[regret] != rad ({name})"), mismatches, Rel::Eq, 0)
                    .with_detail(format!("{} over {} trees", shape(&c, t), trees.len())),
            );
        }
        let spec = supervised_spec(&c, &[int(-1), int(1)], t)?;
        let v = value_primal(&spec)?.value;
        rows.push(ReportRecord::big("rad-lower", i, "max_x rad <= supervised value", &to_big(&best), Rel::Le, &v).with_detail(shape(&c, t)));
        Ok(rows)
    })
}

fn radius(rng: &mut ChaCha8Rng) -> Rational {
    [rat(1, 4), rat(1, 2), rat(3, 4), int(1)][rng.gen_range(0..4)]
}

fn packing_chain(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    per_instance(cfg, cfg.instances_or(50), |i, rng| {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(2..=5);
        let depth = rng.gen_range(1..=3);
        let c = random_class(n, m, 2, rng.gen())?;
        let x = random_tree(n, depth, rng)?;
        let a = radius(rng);
        let p = [Norm::L1, Norm::L2, Norm::Inf][(i % 3) as usize];
        let strong = strong_packing_number(&c, &x, a * int(2), p)? as u64;
        let cover = cover_number(&c, &x, a, p, CoverMode::Exact)?;
        let weak = packing_number(&c, &x, a, p)? as u64;
        let detail = format!("{} alpha={} p={p}", shape(&c, depth), fmt_rational(&a));
        Ok(vec![
            ReportRecord::count("packing", i, "strong packing(2a) <= cover(a)", strong, Rel::Le, cover.len() as u64)
                .with_detail(detail.clone()),
            ReportRecord::count("packing", i, "cover(a) <= packing(a)", cover.len() as u64, Rel::Le, weak).with_detail(detail),
        ])
    })
}

fn gap(_cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let (c, x) = leaf_class(3)?;
    let (zero, v) = zero_cover_min(&c, &x)?;
    let a = rat(1, 10);
    Ok(vec![
        ReportRecord::count("gap", 0, "zero cover size", zero as u64, Rel::Eq, 2).with_detail("leaf class, depth 3"),
        ReportRecord::count("gap", 0, "zero cover is valid", u64::from(is_cover(&v, &c, &x)), Rel::Eq, 1),
        ReportRecord::count("gap", 0, "packing at 1/10", packing_number(&c, &x, a, Norm::Inf)? as u64, Rel::Eq, 4),
        ReportRecord::count("gap", 0, "strong packing at 1/10", strong_packing_number(&c, &x, a, Norm::Inf)? as u64, Rel::Eq, 2),
    ])
}

fn sauer(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let count = cfg.instances_or(30);
    let mut rows = per_instance(cfg, count, |i, rng| {
        let k = rng.gen_range(1..=2u32);
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(2..=6);
        let depth = rng.gen_range(1..=3);
        let c = random_levels_class(n, m, k, rng.gen())?;
        let x = random_tree(n, depth, rng)?;
        let t = depth as u64;
        let kk = i64::from(k);
        let fat1 = fat_dim(&c, rat(1, kk))?.max(0) as u64;
        let fat2 = fat_dim(&c, rat(2, kk))?.max(0) as u64;
        let zero = zero_cover_min(&c, &x)?.0;
        let v1 = cover_construct(&c, &x, ConstructMode::Fat1)?;
        let v2 = cover_construct(&c, &x, ConstructMode::Fat2)?;
        let inf = cover_number(&c, &x, rat(1, 2 * kk), Norm::Inf, CoverMode::Exact)?;
        let gk1 = g_k(fat1, t, u64::from(k)).to_u64().unwrap_or(u64::MAX);
        let gk2 = g_k(fat2, t, u64::from(k)).to_u64().unwrap_or(u64::MAX);
        let detail = format!("k={k} {} fat1={fat1} fat2={fat2}", shape(&c, depth));
        let row = |check: &str, a: usize, rel, b: u64| ReportRecord::count("sauer", i, check, a as u64, rel, b).with_detail(detail.clone());
        Ok(vec![
            row("zero cover <= construction", zero, Rel::Le, v1.len() as u64),
            row("construction <= g_k(fat1, T)", v1.len(), Rel::Le, gk1),
            row("construction is a 0-cover", usize::from(is_cover(&v1, &c, &x)), Rel::Eq, 1),
            row("exact N_inf(half level) <= g_k(fat2, T)", inf.len(), Rel::Le, gk2),
            row("half-level construction is a cover", usize::from(is_cover(&v2, &c, &x)), Rel::Eq, 1),
            row("half-level construction <= g_k(fat2, T)", v2.len(), Rel::Le, gk2),
        ])
    })?;
    let mut bad = 0u64;
    for k in 1..=4u64 {
        for d in 1..=12u64 {
            for t in 1..=12u64 {
                if g_k(d, t, k) != g_k(d, t - 1, k) + BigUint::from(k) * g_k(d - 1, t - 1, k) {
                    bad += 1;
                }
            }
        }
    }
    rows.push(ReportRecord::count("sauer", count, "g_k recurrence failures", bad, Rel::Eq, 0).with_detail("k<=4, d,T<=12"));
    Ok(rows)
}

fn massart(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let count = cfg.instances_or(100);
    let mut rows = per_instance(cfg, count, |i, rng| {
        let depth = rng.gen_range(1..=10);
        let size = rng.gen_range(1..=6);
        let trees: Vec<RealTree> =
            (0..size).map(|_| Tree::from_fn(depth, |_, _| rat(rng.gen_range(-4..=4), 4))).collect::<Result<_>>()?;
        let r = massart_bound(&trees)?;
        Ok(vec![ReportRecord::float("massart", i, "E max <= massart bound", to_f64(&r.lhs), Rel::Le, r.rhs)
            .with_detail(format!("{size} trees, T={depth}, lhs={}", fmt_rational(&r.lhs)))])
    })?;
    let anchor = vec![Tree::constant_levels(&[int(1), int(1)])?, Tree::constant_levels(&[int(-1), int(-1)])?];
    let r = massart_bound(&anchor)?;
    let target = (4.0 * 2f64.ln()).sqrt();
    rows.push(ReportRecord::exact("massart", count, "two constant trees: lhs", &r.lhs, Rel::Eq, &int(1)));
    rows.push(
        ReportRecord::float("massart", count, "two constant trees: |rhs - sqrt(4 ln 2)|", (r.rhs - target).abs(), Rel::Le, 1e-9)
            .with_detail(format!("rhs={}", r.rhs)),
    );
    Ok(rows)
}

fn chaining(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let count = cfg.instances_or(30);
    per_instance(cfg, count, |i, rng| {
        let exact = i < count / 2;
        let n = rng.gen_range(1..=3);
        let (m, depth) = if exact { (rng.gen_range(2..=6), rng.gen_range(1..=3)) } else { (rng.gen_range(2..=12), rng.gen_range(1..=8)) };
        let c = random_class(n, m, 2, rng.gen())?;
        let x = random_tree(n, depth, rng)?;
        let mode = if exact { CoverMode::Exact } else { CoverMode::Greedy };
        let b = dudley_bound(&c, &x, ChainingParams { cover_mode: mode, ..Default::default() })?;
        let r = rad_tree_exact(&c, &x)?;
        Ok(vec![ReportRecord::float("chaining", i, "rad(x) <= chaining bound", to_f64(&r), Rel::Le, b.value)
            .with_detail(format!("{} covers={mode:?} rad={}", shape(&c, depth), fmt_rational(&r)))])
    })
}

fn fat_rad(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    per_instance(cfg, cfg.instances_or(20), |i, rng| {
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(2..=4);
        let t = rng.gen_range(1..=3);
        let c = random_class(n, m, 2, rng.gen())?;
        let r = fat_rad_relation(&c, t)?;
        let mut rows: Vec<ReportRecord> = r
            .checks
            .iter()
            .map(|(beta, fat)| {
                ReportRecord::count("fat-rad", i, &format!("fat at {} < T", fmt_rational(beta)), (*fat).max(0) as u64, Rel::Lt, t as u64)
                    .with_detail(format!("{} rad={}", shape(&c, t), fmt_rational(&r.rad)))
            })
            .collect();
        if rows.is_empty() {
            rows.push(ReportRecord::count("fat-rad", i, "scales above 2 rad/T", 0, Rel::Le, 0).with_detail(shape(&c, t)));
        }
        Ok(rows)
    })
}

fn sequences(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|s| (0..n).map(move |x| [s.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Scales `2/j`, whose grids have exactly `j` points.
fn grid_scales(max: i64) -> Vec<Rational> {
    (1..=max).map(|j| rat(2, j)).collect()
}

fn fatsoa(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    per_instance(cfg, cfg.instances_or(20), |i, rng| {
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(2..=6);
        let c = random_class(n, m, 2, rng.gen())?;
        let mut rows = Vec::new();
        for alpha in grid_scales(8) {
            let d = fat_dim(&c, alpha)?;
            let mut worst = 0usize;
            let mut runs = 0u64;
            for t in 1..=4 {
                for xs in sequences(n, t) {
                    for f in 0..c.len() {
                        let rounds = xs.iter().map(|&x| (x, c.value(f, x))).collect();
                        let mut learner = FatSoa::new(&c, alpha)?;
                        let mut r = stream_rng(0, 0);
                        play(&mut learner, &mut SequenceAdversary { rounds }, &c, t, &mut r)?;
                        worst = worst.max(learner.mistakes());
                        runs += 1;
                    }
                }
            }
            rows.push(
                ReportRecord::count("fatsoa", i, &format!("max mistakes <= fat at {}", fmt_rational(&alpha)), worst as u64, Rel::Le, d.max(0) as u64)
                    .with_detail(format!("n={n} |F|={} T<=4, {runs} runs", c.len())),
            );
        }
        Ok(rows)
    })
}

fn experts(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let budget = cfg.budget.unwrap_or(1 << 22);
    per_instance(cfg, cfg.instances_or(20), |i, rng| {
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(2..=4);
        let t = rng.gen_range(1..=3);
        let alpha = rat(2, rng.gen_range(1..=8));
        let c = random_class(n, m, 2, rng.gen())?;
        let d = fat_dim(&c, alpha)?.max(0) as u64;
        let b = AlphaGrid::new(alpha)?.len() as u64;
        let specs = enumerate_experts(&c, alpha, t, budget)?;
        let formula = expert_count(d, t as u64, b);
        let bound = expert_count_bound(d, t as u64, &alpha);
        let mut uncovered = 0u64;
        for xs in sequences(n, t) {
            let mut pool = ExpertPool::with_specs(&c, alpha, t, specs.clone())?;
            let mut worst = vec![vec![Rational::from_integer(0); pool.len()]; c.len()];
            for (s, &x) in xs.iter().enumerate() {
                let preds = pool.predict_all(s + 1, x)?;
                for (f, row) in worst.iter_mut().enumerate() {
                    for (w, p) in row.iter_mut().zip(&preds) {
                        *w = (*w).max(crate::rational::abs(&(c.value(f, x) - p)));
                    }
                }
                pool.advance(x);
            }
            uncovered += worst.iter().filter(|row| !row.iter().any(|w| *w <= alpha)).count() as u64;
        }
        let detail = format!("{} alpha={} fat={d} |B|={b}", shape(&c, t), fmt_rational(&alpha));
        Ok(vec![
            ReportRecord::big("experts", i, "pool size == sum_L C(T,L)(|B|-1)^L", &to_big(&int(specs.len() as i64)), Rel::Eq, &formula_big(&formula))
                .with_detail(detail.clone()),
            ReportRecord::float("experts", i, "pool size <= (2T/alpha)^fat", specs.len() as f64, Rel::Le, bound).with_detail(detail.clone()),
            ReportRecord::count("experts", i, "(f, sequence) pairs with no expert within alpha", uncovered, Rel::Eq, 0).with_detail(detail),
        ])
    })
}

fn formula_big(v: &BigUint) -> num_rational::BigRational {
    num_rational::BigRational::from_integer(num_bigint::BigInt::from(v.clone()))
}

fn ewa(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let horizon = cfg.horizon.unwrap_or(16);
    let trials = cfg.trials_or(10_000);
    per_instance(cfg, cfg.instances_or(5), |i, rng| {
        let k = rng.gen_range(2..=8usize);
        let losses: Vec<Vec<f64>> =
            (0..horizon).map(|_| (0..k).map(|_| f64::from(rng.gen_range(0..=4u8)) / 4.0).collect()).collect();
        let priors = vec![1.0 / k as f64; k];
        let r = ewa_on_matrix(&losses, &priors, trials, rng.gen())?;
        Ok(r.experts
            .iter()
            .enumerate()
            .map(|(e, &(own, bound))| {
                ReportRecord::float("ewa", i, &format!("mean loss <= bound + 3 se (expert {e})"), r.mean, Rel::Le, bound + 3.0 * r.std_error)
                    .sampled()
                    .with_detail(format!("T={horizon} experts={k} trials={trials} own={own} se={}", r.std_error))
            })
            .collect())
    })
}

fn lowerbound(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let c = constants(&[int(-1), int(1)], 1)?;
    let trials = cfg.trials_or(400);
    let mut rows = Vec::new();
    for (i, t) in [4usize, 8].into_iter().enumerate() {
        let i = i as u64;
        let adv = lower_bound_adversary(&c, int(2), t)?;
        let target = 2.0 * (t as f64 / 8.0).sqrt();
        let mut total = Rational::from_integer(0);
        for s in sign_vectors(t) {
            let mut a = adv.with_signs(s)?;
            let mut r = stream_rng(0, 0);
            total += play(&mut Const0, &mut a, &c, t, &mut r)?.regret;
        }
        let mean = total / Rational::from_integer(1 << t);
        rows.push(
            ReportRecord::float("lowerbound", i, "2 sqrt(T/8) <= E[regret] of const0", target, Rel::Le, to_f64(&mean))
                .with_detail(format!("T={t}, exact over 2^{t} sign vectors, mean={}", fmt_rational(&mean))),
        );
        let plan = agnostic_plan(&c, t, 3, cfg.budget.unwrap_or(100_000))?;
        let traces = simulate(
            || Ok(Box::new(agnostic_learner(&c, &plan)?) as Box<dyn Learner>),
            || Ok(Box::new(adv.clone()) as Box<dyn Adversary>),
            &c,
            t,
            trials,
            cfg.seed ^ t as u64,
        )?;
        let s = summarize(&traces);
        rows.push(
            ReportRecord::float("lowerbound", i, "2 sqrt(T/8) - 3 se <= mean regret of agnostic", target - 3.0 * s.std_error, Rel::Le, s.mean_regret)
                .sampled()
                .with_detail(format!("T={t} trials={trials} se={}", s.std_error)),
        );
    }
    Ok(rows)
}

fn linear(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let depth = cfg.horizon.unwrap_or(8);
    per_instance(cfg, cfg.instances_or(50), |i, rng| {
        let nodes = (1usize << depth) - 1;
        let vs = random_unit_vectors(nodes, 3, rng.gen());
        let x = Tree::new(depth, (0..nodes).collect())?;
        let r = linear_rad_check(&vs, &[x])?;
        Ok(vec![ReportRecord::float("linear", i, "E||sum eps x|| <= sqrt(2T)", r.values[0], Rel::Le, r.bound)
            .with_detail(format!("T={depth}, distinct unit vectors in R^3 at every node"))])
    })
}

/// Every class with at most four distinct rows over `{-1, 0, 1}` on one or two points.
fn tiny_classes() -> Result<Vec<FunctionClass>> {
    let mut out = Vec::new();
    for n in 1..=2usize {
        let rows: Vec<Vec<i64>> = sequences(3, n).into_iter().map(|r| r.into_iter().map(|v| v as i64 - 1).collect()).collect();
        for mask in 1u32..1 << rows.len() {
            if mask.count_ones() <= 4 {
                let table = (0..rows.len()).filter(|b| mask >> b & 1 == 1).map(|b| rows[b].clone()).collect();
                out.push(FunctionClass::new(n, 1, crate::classes::ClassKind::RealGrid, table)?);
            }
        }
    }
    Ok(out)
}

fn structural(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let classes = tiny_classes()?;
    let cases: Vec<(FunctionClass, usize)> = classes.into_iter().flat_map(|c| [(c.clone(), 1), (c, 2)]).collect();
    per_instance(cfg, cases.len() as u64, |i, _| {
        let (c, t) = &cases[i as usize];
        let r = structural_checks(c, *t)?;
        let failed: Vec<String> = r.checks.iter().filter(|k| !k.holds).map(|k| format!("{}: {}", k.property, k.detail)).collect();
        let mut detail = format!("{} checks={}", shape(c, *t), r.checks.len());
        if !failed.is_empty() {
            detail = format!("{detail}; failed: {}", failed.join("; "));
        }
        Ok(vec![ReportRecord::count("structural", i, "violated structural checks", failed.len() as u64, Rel::Eq, 0).with_detail(detail)])
    })
}

fn pollard(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    let row = |i: u64, c: &FunctionClass, x: &DomainTree, alpha: Rational| -> Result<ReportRecord> {
        let r = pollard_check(c, x, alpha)?;
        Ok(ReportRecord::float("pollard", i, "P(sup |avg| > a/4) <= 2 N1(a/8) exp(-T a^2/128)", to_f64(&r.lhs), Rel::Le, r.rhs).with_detail(
            format!(
                "{} alpha={} lhs={} cover={} ({:?}) fat_rhs={}",
                shape(c, x.depth()),
                fmt_rational(&alpha),
                fmt_rational(&r.lhs),
                r.cover_size,
                r.cover_mode,
                r.fat_rhs
            ),
        ))
    };
    if let Some(path) = &cfg.class {
        let c = FunctionClass::load(path)?;
        let tree_path = cfg.tree.as_ref().ok_or_else(|| Error::Usage("pollard with a class file needs --tree".into()))?;
        let x = DomainTree::from_json(&std::fs::read_to_string(tree_path)?)?;
        let alpha = cfg.alpha()?.ok_or_else(|| Error::Usage("pollard with a class file needs --alpha".into()))?;
        return Ok(vec![row(0, &c, &x, alpha)?]);
    }
    per_instance(cfg, cfg.instances_or(20), |i, rng| {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(2..=6);
        let depth = rng.gen_range(4..=12);
        let c = random_class(n, m, 2, rng.gen())?;
        let x = random_tree(n, depth, rng)?;
        let alpha = rat(rng.gen_range(1..=16), 4);
        Ok(vec![row(i, &c, &x, alpha)?])
    })
}

fn entropy(cfg: &ExperimentConfig) -> Result<Vec<ReportRecord>> {
    per_instance(cfg, cfg.instances_or(20), |i, rng| {
        let n = rng.gen_range(1..=2);
        let m = rng.gen_range(2..=5);
        let t = rng.gen_range(1..=2);
        let c = random_class(n, m, 2, rng.gen())?;
        let mut rows = Vec::new();
        for alpha in [rat(1, 4), rat(1, 2), int(1)] {
            let mut worst = 0usize;
            let mut count = 0u64;
            for x in enumerate_trees(n, t, tree_budget(cfg))? {
                worst = worst.max(cover_number(&c, &x, alpha, Norm::Inf, CoverMode::Exact)?.len());
                count += 1;
            }
            let e = pointwise_entropy(&c, alpha)?;
            rows.push(
                ReportRecord::count("entropy", i, &format!("max_x N_inf({}) <= pointwise entropy", fmt_rational(&alpha)), worst as u64, Rel::Le, e as u64)
                    .with_detail(format!("{} over {count} trees", shape(&c, t))),
            );
        }
        Ok(rows)
    })
}
