use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use xintseq::compression::{
    compress_pair_to_fixpoint, delta, delta_family, gamma, gamma_family, is_cross_intersecting_subsets,
};
use xintseq::model::{
    enumerate_space, from_labeled, meets, product_bound_from_pairs, space_size, star, star_size, theorem_bound,
    to_labeled,
};
use xintseq::search::{k_fold_max_product, max_product, max_weighted_product, Budget, Context, Relation};
use xintseq::suites::{check_labeled_pair, random_context, random_labeled_pair};
use xintseq::weighted::{
    enumerate_hereditary_compressed, lemma_weighted_family, lemma_weights_on, random_product_weights, split_family,
    Weight,
};
use xintseq::{BitSet, IpSequence, Subset, SubsetFamily};

fn caps_strategy(max_len: usize, max_cap: u32) -> impl Strategy<Value = IpSequence> {
    prop::collection::vec(1..=max_cap, 1..=max_len).prop_map(|mut v| {
        v.sort_unstable();
        IpSequence::new(v).unwrap()
    })
}

fn space_strategy(max_len: usize, max_cap: u32) -> impl Strategy<Value = (IpSequence, usize)> {
    caps_strategy(max_len, max_cap).prop_flat_map(|c| {
        let n = c.len();
        (Just(c), 1..=n)
    })
}

fn family_strategy(max_n: usize) -> impl Strategy<Value = SubsetFamily> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::btree_set(0u64..(1 << n), 0..=8)
            .prop_map(move |ms| SubsetFamily::new(n, ms.into_iter().map(Subset::from_mask)).unwrap())
    })
}

/// A cross-intersecting pair over the same universe.
fn cross_pair_strategy() -> impl Strategy<Value = (SubsetFamily, SubsetFamily)> {
    (1usize..=5, any::<u64>()).prop_map(|(n, seed)| {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let top = 1u64 << n;
        let a: BTreeSet<Subset> = (0..rng.gen_range(1..=4)).map(|_| Subset::from_mask(rng.gen_range(1..top))).collect();
        let b: BTreeSet<Subset> = (1..top)
            .map(Subset::from_mask)
            .filter(|b| a.iter().all(|x| x.intersects(*b)))
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        (SubsetFamily::new(n, a).unwrap(), SubsetFamily::new(n, b).unwrap())
    })
}

fn context_strategy() -> impl Strategy<Value = Context> {
    any::<u64>().prop_map(|s| random_context(&mut ChaCha8Rng::seed_from_u64(s)))
}

fn count_by_formula(caps: &IpSequence, rank: usize) -> u64 {
    // sum over rank-subsets of positions of the product of caps
    let n = caps.len();
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == rank)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| caps.caps()[i] as u64).product::<u64>())
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn space_size_matches_the_count((c, r) in space_strategy(4, 4)) {
        let members = enumerate_space(&c, r).unwrap();
        prop_assert_eq!(members.len() as u64, count_by_formula(&c, r));
        prop_assert_eq!(space_size(&c, r).unwrap(), BigUint::from(count_by_formula(&c, r)));
        prop_assert!(members.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn labeled_bijection_round_trips((c, r) in space_strategy(4, 4)) {
        for a in enumerate_space(&c, r).unwrap() {
            let l = to_labeled(&a);
            prop_assert_eq!(l.len(), r);
            prop_assert_eq!(from_labeled(&l, c.len()).unwrap(), a);
        }
    }

    #[test]
    fn meets_is_labeled_intersection((c, r) in space_strategy(3, 3), (d, s) in space_strategy(3, 3)) {
        let xs = enumerate_space(&c, r).unwrap();
        let ys = enumerate_space(&d, s).unwrap();
        for a in xs.iter().take(30) {
            prop_assert!(meets(a, a));
            for b in ys.iter().take(30) {
                prop_assert_eq!(meets(a, b), to_labeled(a).intersects(&to_labeled(b)));
                prop_assert_eq!(meets(a, b), meets(b, a));
            }
        }
    }

    #[test]
    fn stars_have_the_stated_size((c, r) in space_strategy(4, 4), p in 1usize..=4, q in 1u32..=4) {
        prop_assume!(p <= c.len() && q <= c.cap(p));
        let st = star(&c, r, p, q).unwrap();
        let direct = enumerate_space(&c, r).unwrap().into_iter().filter(|a| a.entry(p) == q).count();
        prop_assert_eq!(st.len(), direct);
        prop_assert_eq!(BigUint::from(direct), star_size(&c, r, p).unwrap());
        if p == 1 {
            prop_assert_eq!(BigUint::from(direct), theorem_bound(&[(c.clone(), r)]).unwrap());
        }
    }

    #[test]
    fn pairwise_bounds_multiply(x in prop::collection::vec(1u32..50, 2..6), slack in prop::collection::vec(0u32..5, 6)) {
        let k = x.len();
        let y: Vec<BigUint> = x.iter().zip(&slack).map(|(a, s)| BigUint::from(a + s)).collect();
        let x: Vec<BigUint> = x.into_iter().map(BigUint::from).collect();
        if let Some(holds) = product_bound_from_pairs(&x, &y) {
            prop_assert!(holds);
            let lhs: BigUint = x.iter().product();
            let rhs: BigUint = y[..k].iter().product();
            prop_assert!(lhs <= rhs);
        }
    }

    #[test]
    fn left_compressions_preserve_size_and_cross_intersection((a, b) in cross_pair_strategy()) {
        let n = a.universe();
        for i in 1..=n {
            for j in 1..=n {
                if i == j { continue; }
                let (da, db) = (delta_family(i, j, &a), delta_family(i, j, &b));
                prop_assert_eq!(da.len(), a.len());
                prop_assert_eq!(db.len(), b.len());
                prop_assert!(is_cross_intersecting_subsets(&da, &db));
            }
        }
    }

    #[test]
    fn delta_is_idempotent(mask in 0u64..64, i in 1usize..=6, j in 1usize..=6) {
        let s = Subset::from_mask(mask);
        prop_assert_eq!(delta(i, j, delta(i, j, s)), delta(i, j, s));
    }

    #[test]
    fn fixpoint_contract((a, b) in cross_pair_strategy()) {
        let fx = compress_pair_to_fixpoint(&a, &b).unwrap();
        prop_assert!(fx.left.is_compressed() && fx.right.is_compressed());
        prop_assert_eq!((fx.left.len(), fx.right.len()), (a.len(), b.len()));
        prop_assert!(is_cross_intersecting_subsets(&fx.left, &fx.right));
        prop_assert!(fx.steps.len() as u64 <= a.potential() + b.potential());
        prop_assert!(fx.left.potential() <= a.potential() && fx.right.potential() <= b.potential());
    }

    #[test]
    fn single_family_delta_never_raises_potential(f in family_strategy(5), i in 1usize..=5, j in 1usize..=5) {
        prop_assume!(i < j && j <= f.universe());
        let g = delta_family(i, j, &f);
        prop_assert!(g.potential() <= f.potential());
        prop_assert!(g == f || g.potential() < f.potential());
    }

    #[test]
    fn relabelling_lemma_per_step(seed in any::<u64>()) {
        let (a, b, v) = random_labeled_pair(&mut ChaCha8Rng::seed_from_u64(seed));
        let problems = check_labeled_pair(&a, &b, &v);
        prop_assert!(problems.is_empty(), "{:?}", problems);
    }

    #[test]
    fn gamma_is_idempotent_and_size_preserving(seed in any::<u64>(), x in 1usize..=3, y in 1u32..=3) {
        let (a, _, _) = random_labeled_pair(&mut ChaCha8Rng::seed_from_u64(seed));
        for l in a.iter() {
            prop_assert_eq!(gamma(x, y, &gamma(x, y, l)), gamma(x, y, l));
        }
        prop_assert_eq!(gamma_family(x, y, &a).len(), a.len());
    }

    #[test]
    fn closure_laws(ctx in context_strategy(), m1 in any::<u16>(), m2 in any::<u16>()) {
        let n = ctx.left_len();
        let s = BitSet::from_indices(n, (0..n).filter(|i| m1 >> i & 1 == 1));
        let t = s.union(&BitSet::from_indices(n, (0..n).filter(|i| m2 >> i & 1 == 1)));
        let ns = ctx.common_right(&s);
        prop_assert!(s.is_subset(&ctx.close_left(&s)));
        prop_assert!(ctx.common_right(&t).is_subset(&ns));
        prop_assert_eq!(ctx.common_right(&ctx.common_left(&ns)), ns);
    }

    #[test]
    fn closure_dominates_any_cross_pair(ctx in context_strategy(), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = ctx.left_len();
        let a = BitSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.3)));
        let full_b = ctx.common_right(&a);
        let b = BitSet::from_indices(ctx.right_len(), full_b.iter().filter(|_| rng.gen_bool(0.7)));
        prop_assert!(ctx.is_cross(&a, &b));
        let best = max_product(&ctx, &Budget::default()).unwrap().value;
        let product = (a.count() * b.count()) as u64;
        prop_assert!(BigUint::from(product) <= best);
        // enlarging to the closure never lowers the product
        let right = ctx.common_right(&ctx.common_left(&b));
        let left = ctx.common_left(&b);
        prop_assert!(a.is_subset(&left) && b.is_subset(&right));
        prop_assert!(ctx.is_cross(&left, &right));
    }

    #[test]
    fn max_product_matches_brute_force(seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (l, r) = (rng.gen_range(1..=6usize), rng.gen_range(1..=6usize));
        let cells: Vec<bool> = (0..l * r).map(|_| rng.gen_bool(0.5)).collect();
        let ctx = Context::from_fn(l, r, Relation::Custom, |x, y| cells[x * r + y]).unwrap();
        let mut best = 0usize;
        let mut arg = BTreeSet::new();
        for ma in 0u32..1 << l {
            let a = BitSet::from_indices(l, (0..l).filter(|i| ma >> i & 1 == 1));
            for mb in 0u32..1 << r {
                let b = BitSet::from_indices(r, (0..r).filter(|i| mb >> i & 1 == 1));
                if !ctx.is_cross(&a, &b) { continue; }
                let p = a.count() * b.count();
                if p > best { best = p; arg.clear(); }
                if p == best && p > 0 { arg.insert((a.to_vec(), b.to_vec())); }
            }
        }
        let res = max_product(&ctx, &Budget::default()).unwrap();
        prop_assert_eq!(res.value, BigUint::from(best));
        let got: BTreeSet<_> = res.maximizers.iter().map(|m| (m.left.to_vec(), m.right.to_vec())).collect();
        prop_assert_eq!(got, arg);
    }

    #[test]
    fn split_identities(seed in any::<u64>(), pick in any::<prop::sample::Index>(), sub in any::<u32>()) {
        let families: Vec<SubsetFamily> = (2..=3).flat_map(|m| enumerate_hereditary_compressed(m).unwrap()).collect();
        let f = pick.get(&families);
        let wf = random_product_weights(f, seed).unwrap();
        let n = f.universe();
        let split = wf.split_at_top().unwrap();
        prop_assert!(split.lower.check_conditions().is_clean());
        if let Some(up) = &split.upper {
            prop_assert!(up.check_conditions().is_clean());
        }
        // a random subfamily B and its two halves
        let members: Vec<Subset> = f.iter().collect();
        let b = SubsetFamily::new(n, members.iter().enumerate().filter(|(i, _)| sub >> i & 1 == 1).map(|(_, s)| *s)).unwrap();
        let (b0, b1) = split_family(&b).unwrap();
        let upper_w = match &split.upper {
            Some(up) => up.family_weight(&b1).unwrap(),
            None => { prop_assert!(b1.is_empty()); Weight::from_integer(0.into()) }
        };
        prop_assert_eq!(wf.family_weight(&b).unwrap(), split.lower.family_weight(&b0).unwrap() + upper_w);
        // the star of 1 splits the same way
        let star_upper = split.upper.as_ref().map(|u| u.star_weight(1)).unwrap_or_else(|| Weight::from_integer(0.into()));
        prop_assert_eq!(wf.star_weight(1), split.lower.star_weight(1) + star_upper);
        // monotone and additive
        prop_assert!(wf.family_weight(&b).unwrap() <= wf.total_weight());
        prop_assert!(wf.star_weight(n) <= wf.star_weight(1));
    }

    #[test]
    fn weighted_search_matches_brute_force(seed in any::<u64>(), gi in any::<prop::sample::Index>(), hi in any::<prop::sample::Index>()) {
        let families: Vec<SubsetFamily> = (1..=3).flat_map(|m| enumerate_hereditary_compressed(m).unwrap())
            .filter(|f| f.len() <= 6).collect();
        let g = random_product_weights(gi.get(&families), seed).unwrap();
        let h = random_product_weights(hi.get(&families), seed.wrapping_add(1)).unwrap();
        let gs: Vec<Subset> = g.family().iter().collect();
        let hs: Vec<Subset> = h.family().iter().collect();
        let mut best = Weight::from_integer(0.into());
        for ma in 0u32..1 << gs.len() {
            let a: Vec<Subset> = (0..gs.len()).filter(|i| ma >> i & 1 == 1).map(|i| gs[i]).collect();
            for mb in 0u32..1 << hs.len() {
                let b: Vec<Subset> = (0..hs.len()).filter(|i| mb >> i & 1 == 1).map(|i| hs[i]).collect();
                if !a.iter().all(|x| b.iter().all(|y| x.intersects(*y))) { continue; }
                let wa = a.iter().fold(Weight::from_integer(0.into()), |acc, s| acc + g.weight(*s));
                let wb = b.iter().fold(Weight::from_integer(0.into()), |acc, s| acc + h.weight(*s));
                if wa.clone() * wb.clone() > best { best = wa * wb; }
            }
        }
        let ctx = Context::intersection(g.family(), h.family()).unwrap();
        let res = max_weighted_product(&ctx, &g, &h, &Budget::default()).unwrap();
        prop_assert_eq!(&res.value, &best);
        prop_assert!(res.within_bound());
    }
}

fn is_hereditary_and_compressed(n: usize, f: &BTreeSet<u64>) -> bool {
    f.iter().all(|&m| {
        let s = Subset::from_mask(m);
        s.elements().all(|e| f.contains(&s.without(e).mask()))
            && (1..=n).all(|i| (1..=n).all(|j| i >= j || f.contains(&delta(i, j, s).mask())))
    })
}

#[test]
fn hereditary_compressed_enumeration_matches_brute_force() {
    for m in 0..=4usize {
        let subsets = 1u64 << m;
        let mut expected = BTreeSet::new();
        for choice in 0u64..1 << subsets {
            let f: BTreeSet<u64> = (0..subsets).filter(|s| choice >> s & 1 == 1).collect();
            if !f.is_empty() && is_hereditary_and_compressed(m, &f) {
                expected.insert(f);
            }
        }
        let got: Vec<BTreeSet<u64>> = enumerate_hereditary_compressed(m)
            .unwrap()
            .iter()
            .map(|f| f.iter().map(Subset::mask).collect())
            .collect();
        let got_set: BTreeSet<_> = got.iter().cloned().collect();
        assert_eq!(got.len(), got_set.len(), "duplicates at m={m}");
        assert_eq!(got_set, expected, "m={m}");
        for f in enumerate_hereditary_compressed(m).unwrap() {
            assert!(f.is_hereditary() && f.is_compressed());
        }
    }
}

#[test]
fn value_one_weights_satisfy_both_conditions() {
    for n in 1..=4usize {
        for c in xintseq::suites::cap_vectors(n, 3, 5) {
            let caps = IpSequence::new(c).unwrap();
            for r in 1..=n {
                let wf = lemma_weighted_family(&caps, r).unwrap();
                assert!(wf.check_conditions().is_clean());
                for f in enumerate_hereditary_compressed(n).unwrap() {
                    if f.iter().all(|s| s.len() <= r) {
                        assert!(lemma_weights_on(&f, &caps, r).unwrap().check_conditions().is_clean());
                    }
                }
            }
        }
    }
}

#[test]
fn product_weight_draws_satisfy_both_conditions() {
    let f = SubsetFamily::power_set(3).unwrap();
    for seed in 0..100 {
        assert!(random_product_weights(&f, seed).unwrap().check_conditions().is_clean());
    }
}

#[test]
fn k_fold_matches_brute_force_on_the_small_grid() {
    let sp = xintseq::Space::full(IpSequence::new(vec![2, 2]).unwrap()).unwrap();
    let ctx = Context::meets(&sp, &sp).unwrap();
    let sets: Vec<BitSet> = (0u32..16).map(|m| BitSet::from_indices(4, (0..4).filter(|i| m >> i & 1 == 1))).collect();
    let mut best = 0;
    for a in &sets {
        for b in &sets {
            if !ctx.is_cross(a, b) {
                continue;
            }
            for c in &sets {
                if ctx.is_cross(a, c) && ctx.is_cross(b, c) {
                    best = best.max(a.count() * b.count() * c.count());
                }
            }
        }
    }
    let res = k_fold_max_product(&ctx, 3, &Budget::default()).unwrap();
    assert_eq!(res.value, BigUint::from(best as u64));
}
