use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use seqcomplex::classes::{constants, leaf_class, random_binary_class, random_class, ClassKind, FunctionClass};
use seqcomplex::complexity::{
    dudley_bound, fat_rad_relation, linear_rad_check, massart_bound, rad_fixed_tree, rad_sup, rad_tree_exact,
    random_unit_vectors, structural_checks, ChainingParams, RadMode, SupMode,
};
use seqcomplex::covers::CoverMode;
use seqcomplex::rational::{int, rat, to_f64, Rational};
use seqcomplex::shattering::fat_dim;
use seqcomplex::trees::{enumerate_trees, random_tree, DomainTree, RealTree, SignPath, Tree};

/// Average over sign vectors of the best row, walking the tree node by node.
fn rad_oracle(c: &FunctionClass, x: &DomainTree) -> Rational {
    let depth = x.depth();
    let mut total = Rational::from_integer(0);
    for p in SignPath::all(depth) {
        let signs = p.signs();
        let best = (0..c.len())
            .map(|f| {
                (1..=depth)
                    .map(|t| Rational::from_integer(signs[t - 1] as i64) * c.value(f, *x.eval_path(&p, t).unwrap()))
                    .sum::<Rational>()
            })
            .max()
            .unwrap();
        total += best;
    }
    total / Rational::from_integer(1 << depth)
}

fn sup_oracle(c: &FunctionClass, depth: usize) -> Rational {
    enumerate_trees(c.domain_size(), depth, u64::MAX).unwrap().map(|x| rad_oracle(c, &x)).max().unwrap()
}

fn arb_class() -> impl Strategy<Value = FunctionClass> {
    (1usize..=3, 1usize..=5, 1i64..=3, any::<u64>()).prop_map(|(n, m, s, seed)| random_class(n, m, s, seed).unwrap())
}

fn arb_tree(n: usize, max_depth: usize) -> impl Strategy<Value = DomainTree> {
    (1..=max_depth, any::<u64>()).prop_map(move |(d, seed)| random_tree(n, d, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_tree_matches_oracle(c in arb_class(), seed in any::<u64>(), d in 1usize..=5) {
        let x = random_tree(c.domain_size(), d, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(rad_tree_exact(&c, &x).unwrap(), rad_oracle(&c, &x));
    }

    #[test]
    fn singleton_is_zero(v in -4i64..=4, n in 1usize..=3, seed in any::<u64>(), d in 1usize..=10) {
        let c = constants(&[rat(v, 4)], n).unwrap();
        let x = random_tree(n, d, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(rad_tree_exact(&c, &x).unwrap(), int(0));
    }

    #[test]
    fn negation_with_reflection(c in arb_class(), seed in any::<u64>(), d in 1usize..=6) {
        let x = random_tree(c.domain_size(), d, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let neg = c.map_values(ClassKind::Free, |_, _, v| -v).unwrap();
        prop_assert_eq!(rad_tree_exact(&neg, &x.reflect()).unwrap(), rad_tree_exact(&c, &x).unwrap());
    }

    #[test]
    fn sup_matches_oracle(n in 1usize..=2, m in 1usize..=4, seed in any::<u64>(), d in 1usize..=2) {
        let c = random_class(n, m, 2, seed).unwrap();
        let r = rad_sup(&c, d, SupMode::exact()).unwrap();
        let best = sup_oracle(&c, d);
        prop_assert_eq!(r.exact.unwrap(), best);
        prop_assert_eq!(rad_oracle(&c, r.argmax_tree.as_ref().unwrap()), best);
        let l = rad_sup(&c, d, SupMode::Local { restarts: 3, seed }).unwrap();
        prop_assert!(l.exact.unwrap() <= best);
    }

    #[test]
    fn chaining_dominates(c in arb_class(), seed in any::<u64>(), d in 1usize..=3) {
        let x = random_tree(c.domain_size(), d, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let params = ChainingParams { levels: 6, cover_mode: if c.len() <= 8 { CoverMode::Exact } else { CoverMode::Greedy } };
        let b = dudley_bound(&c, &x, params).unwrap();
        prop_assert!(to_f64(&rad_tree_exact(&c, &x).unwrap()) <= b.value + 1e-9);
    }

    #[test]
    fn chaining_greedy_dominates(x in arb_tree(3, 6), seed in any::<u64>()) {
        let c = random_class(3, 12, 2, seed).unwrap();
        let b = dudley_bound(&c, &x, ChainingParams { levels: 6, cover_mode: CoverMode::Greedy }).unwrap();
        prop_assert!(to_f64(&rad_tree_exact(&c, &x).unwrap()) <= b.value + 1e-9);
    }

    #[test]
    fn fat_rad(n in 1usize..=3, m in 1usize..=4, s in 1i64..=2, seed in any::<u64>(), d in 1usize..=3) {
        prop_assume!(n <= 2 || d <= 2 || m <= 3);
        let c = random_class(n, m, s, seed).unwrap();
        let r = fat_rad_relation(&c, d).unwrap();
        prop_assert!(r.holds);
        for (beta, dim) in &r.checks {
            prop_assert_eq!(*dim, fat_dim(&c, *beta).unwrap());
            prop_assert!(*beta > r.rad * rat(2, d as i64));
        }
    }
}

#[test]
fn monte_carlo_within_three_errors() {
    for seed in 0..20u64 {
        let c = random_class(3, 5, 2, seed).unwrap();
        let d = 6 + (seed as usize % 7);
        let x = random_tree(3, d, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let exact = to_f64(&rad_tree_exact(&c, &x).unwrap());
        let mc = rad_fixed_tree(&c, &x, RadMode::MonteCarlo { trials: 20_000, seed }).unwrap();
        assert!((mc.value - exact).abs() <= 3.0 * mc.std_error.unwrap(), "seed {seed}");
    }
}

#[test]
fn massart_on_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        use rand::Rng;
        let depth = rng.gen_range(1..=5);
        let count = rng.gen_range(1..=6);
        let trees: Vec<RealTree> = (0..count)
            .map(|_| Tree::from_fn(depth, |_, _| rat(rng.gen_range(-4..=4), 4)).unwrap())
            .collect();
        let r = massart_bound(&trees).unwrap();
        assert!(r.holds, "{r:?}");
        let mut oracle = Rational::from_integer(0);
        for p in SignPath::all(depth) {
            let signs = p.signs();
            oracle += trees
                .iter()
                .map(|v| (1..=depth).map(|t| Rational::from_integer(signs[t - 1] as i64) * v.eval_path(&p, t).unwrap()).sum::<Rational>())
                .max()
                .unwrap();
        }
        assert_eq!(r.lhs, oracle / Rational::from_integer(1 << depth));
    }
}

#[test]
fn chaining_examples() {
    let (c, x) = leaf_class(3).unwrap();
    let b = dudley_bound(&c, &x, ChainingParams::default()).unwrap();
    assert!(to_f64(&rad_tree_exact(&c, &x).unwrap()) <= b.value);
    let bin = seqcomplex::classes::full_binary(2).unwrap();
    let x = Tree::new(2, vec![0, 1, 1]).unwrap();
    let b = dudley_bound(&bin, &x, ChainingParams::default()).unwrap();
    assert!(to_f64(&rad_tree_exact(&bin, &x).unwrap()) <= b.value);
}

#[test]
fn linear_random_trees() {
    let vs = random_unit_vectors(6, 3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trees: Vec<DomainTree> = (0..50).map(|_| random_tree(vs.len(), 8, &mut rng).unwrap()).collect();
    let r = linear_rad_check(&vs, &trees).unwrap();
    assert!((r.bound - 4.0).abs() < 1e-9);
    assert!(r.holds);
}

#[test]
fn structural_on_small_classes() {
    for seed in 0..12 {
        let c = random_class(1 + (seed as usize % 2), 1 + (seed as usize % 4), 2, seed).unwrap();
        for depth in 1..=2 {
            let r = structural_checks(&c, depth).unwrap();
            assert!(r.holds, "seed {seed} depth {depth}: {:?}", r.checks.iter().filter(|c| !c.holds).collect::<Vec<_>>());
        }
    }
    let b = random_binary_class(2, 3, 1).unwrap();
    assert!(structural_checks(&b, 2).unwrap().holds);
}
