use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive};
use proptest::prelude::*;
use seqcomplex::classes::{leaf_class, random_class, random_levels_class, ClassKind, FunctionClass};
use seqcomplex::covers::{
    cover_construct, cover_number, g_k, is_cover, packing_number, strong_packing_number, zero_cover_min, ConstructMode,
    CoverMode, Norm,
};
use seqcomplex::rational::{int, rat, Rational};
use seqcomplex::shattering::fat_dim;
use seqcomplex::trees::{DomainTree, SignPath, Tree};

/// Smallest 0-cover by splitting on the root value: rows sharing a root value
/// need max(left, right) trees, rows with different root values never share.
fn zero_cover_oracle(c: &FunctionClass, rows: &[usize], x: &DomainTree) -> usize {
    let mut roots: Vec<i64> = rows.iter().map(|&f| c.raw(f, *x.root())).collect();
    roots.sort();
    roots.dedup();
    roots
        .iter()
        .map(|&v| {
            let sub: Vec<usize> = rows.iter().copied().filter(|&f| c.raw(f, *x.root()) == v).collect();
            if x.depth() == 1 {
                1
            } else {
                zero_cover_oracle(c, &sub, &x.left().unwrap()).max(zero_cover_oracle(c, &sub, &x.right().unwrap()))
            }
        })
        .sum()
}

/// Requirements (path values per row per path) for brute-force partition search.
fn requirements(c: &FunctionClass, x: &DomainTree) -> Vec<(u64, Vec<Rational>)> {
    let mut out = Vec::new();
    for p in SignPath::all(x.depth()) {
        for f in 0..c.len() {
            let seq: Vec<Rational> = x.along(p.index()).map(|&q| c.value(f, q)).collect();
            if !out.contains(&(p.index(), seq.clone())) {
                out.push((p.index(), seq));
            }
        }
    }
    out
}

/// A group is matched by one tree in sup norm iff at every node the radius
/// intervals of its members intersect.
fn inf_group_ok(x: &DomainTree, reqs: &[(u64, Vec<Rational>)], group: &[usize], alpha: Rational) -> bool {
    let mut lo = vec![int(-100); x.values().len()];
    let mut hi = vec![int(100); x.values().len()];
    for &g in group {
        let (p, seq) = &reqs[g];
        for t in 1..=x.depth() {
            let o = seqcomplex::trees::path_offset(x.depth(), *p, t);
            lo[o] = lo[o].max(seq[t - 1] - alpha);
            hi[o] = hi[o].min(seq[t - 1] + alpha);
        }
    }
    lo.iter().zip(&hi).all(|(a, b)| a <= b)
}

/// Minimum number of blocks over all set partitions of the requirements.
fn min_partition(n: usize, ok: &dyn Fn(&[usize]) -> bool) -> usize {
    fn rec(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, best: &mut usize, ok: &dyn Fn(&[usize]) -> bool) {
        if blocks.len() >= *best {
            return;
        }
        if i == n {
            *best = blocks.len();
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            if ok(&blocks[b]) {
                rec(i + 1, n, blocks, best, ok);
            }
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        rec(i + 1, n, blocks, best, ok);
        blocks.pop();
    }
    let mut best = n + 1;
    rec(0, n, &mut Vec::new(), &mut best, ok);
    best
}

fn small_class() -> impl Strategy<Value = FunctionClass> {
    (1usize..=3, 1usize..=5).prop_flat_map(|(n, m)| {
        prop::collection::vec(prop::collection::vec(-2i64..=2, n), m)
            .prop_map(move |t| FunctionClass::new(n, 2, ClassKind::RealGrid, t).unwrap())
    })
}

fn tree_for(n: usize, depth: usize) -> impl Strategy<Value = DomainTree> {
    prop::collection::vec(0..n, (1 << depth) - 1).prop_map(move |v| Tree::new(depth, v).unwrap())
}

fn class_and_tree(max_depth: usize) -> impl Strategy<Value = (FunctionClass, DomainTree)> {
    (small_class(), 1..=max_depth).prop_flat_map(|(c, d)| {
        let n = c.domain_size();
        (Just(c), tree_for(n, d))
    })
}

fn radius() -> impl Strategy<Value = Rational> {
    prop::sample::select(vec![rat(1, 4), rat(1, 2), rat(3, 4), int(1)])
}

#[test]
fn leaf_example_zero_cover_is_two() {
    let (c, x) = leaf_class(3).unwrap();
    assert_eq!(zero_cover_min(&c, &x).unwrap().0, 2);
    assert_eq!(zero_cover_oracle(&c, &(0..c.len()).collect::<Vec<_>>(), &x), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zero_cover_matches_recursion((c, x) in class_and_tree(3)) {
        let (n, v) = zero_cover_min(&c, &x).unwrap();
        prop_assert!(is_cover(&v, &c, &x));
        prop_assert_eq!(n, zero_cover_oracle(&c, &(0..c.len()).collect::<Vec<_>>(), &x));
    }

    #[test]
    fn inf_cover_matches_partition_search((c, x) in class_and_tree(2), a in radius()) {
        let v = cover_number(&c, &x, a, Norm::Inf, CoverMode::Exact).unwrap();
        prop_assert!(!v.grid_restricted);
        prop_assert!(is_cover(&v, &c, &x));
        let reqs = requirements(&c, &x);
        let brute = min_partition(reqs.len(), &|g: &[usize]| inf_group_ok(&x, &reqs, g, a));
        prop_assert_eq!(v.len(), brute);
    }

    #[test]
    fn norm_order_and_greedy((c, x) in class_and_tree(3), a in radius()) {
        let sizes: Vec<usize> = [Norm::L1, Norm::L2, Norm::Inf]
            .iter()
            .map(|&p| {
                let v = cover_number(&c, &x, a, p, CoverMode::Exact).unwrap();
                assert!(is_cover(&v, &c, &x));
                let g = cover_number(&c, &x, a, p, CoverMode::Greedy).unwrap();
                assert!(is_cover(&g, &c, &x));
                assert!(g.len() >= v.len());
                v.len()
            })
            .collect();
        prop_assert!(sizes[0] <= sizes[1] && sizes[1] <= sizes[2]);
    }

    #[test]
    fn discretization_bound((c, x) in class_and_tree(3), a in radius()) {
        let n = cover_number(&c, &x, a, Norm::Inf, CoverMode::Exact).unwrap().len();
        let d = fat_dim(&c, a).unwrap();
        let bound = (2.0 * std::f64::consts::E * x.depth() as f64 / a.to_f64().unwrap()).powi(d);
        prop_assert!(n as f64 <= bound);
    }

    #[test]
    fn packing_cover_chain((c, x) in class_and_tree(3), a in radius()) {
        for p in [Norm::L1, Norm::L2, Norm::Inf] {
            let strong = strong_packing_number(&c, &x, a * int(2), p).unwrap();
            let weak = packing_number(&c, &x, a, p).unwrap();
            let v = cover_number(&c, &x, a, p, CoverMode::Exact).unwrap();
            prop_assert!(strong <= v.len(), "strong {} > cover {} at {:?}", strong, v.len(), p);
            prop_assert!(v.len() <= weak, "cover {} > packing {} at {:?}", v.len(), weak, p);
            prop_assert!(strong_packing_number(&c, &x, a, p).unwrap() <= weak);
        }
    }

    #[test]
    fn recursive_covers_within_g_k(k in 1u32..=3, n in 1usize..=3, m in 1usize..=6, depth in 1usize..=3, seed in any::<u64>()) {
        let c = random_levels_class(n, m, k, seed).unwrap();
        let x = Tree::new(depth, (0..(1 << depth) - 1).map(|i| (i * 7 + seed as usize) % n).collect()).unwrap();
        let t = depth as u64;
        let fat1 = fat_dim(&c, rat(1, k as i64)).unwrap() as u64;
        let fat2 = fat_dim(&c, rat(2, k as i64)).unwrap() as u64;

        let v1 = cover_construct(&c, &x, ConstructMode::Fat1).unwrap();
        prop_assert!(is_cover(&v1, &c, &x));
        let zero = zero_cover_min(&c, &x).unwrap().0;
        prop_assert!(zero <= v1.len());
        prop_assert!(BigUint::from(v1.len()) <= g_k(fat1, t, k as u64));

        let v2 = cover_construct(&c, &x, ConstructMode::Fat2).unwrap();
        prop_assert!(is_cover(&v2, &c, &x));
        prop_assert!(BigUint::from(v2.len()) <= g_k(fat2, t, k as u64));
        let exact = cover_number(&c, &x, rat(1, 2 * k as i64), Norm::Inf, CoverMode::Exact).unwrap();
        prop_assert!(exact.len() <= v2.len());
    }
}

#[test]
fn wide_radius_single_tree() {
    for seed in 0..5 {
        let c = random_class(2, 5, 2, seed).unwrap();
        let x = Tree::new(2, vec![0, 1, 1]).unwrap();
        let spread = c.spread();
        let v = cover_number(&c, &x, spread, Norm::Inf, CoverMode::Exact).unwrap();
        assert_eq!(v.len(), 1);
        assert!(spread.is_positive() || v.len() == 1);
    }
}
