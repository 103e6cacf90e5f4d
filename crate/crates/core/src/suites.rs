//! Named verification suites.
//!
//! Each suite checks one family of statements exhaustively over a small
//! grid of instances (or over a seeded random corpus) and reports one row
//! per instance. Instances run in parallel; rows come back in a fixed order.

use crate::bitset::BitSet;
use crate::compression::{
    cascade_extent, cascade_order, check_avoid_intersection, compress_pair_to_fixpoint, delta, delta_family, gamma,
    gamma_cascade, gamma_family, is_cross_intersecting_labeled, is_cross_intersecting_subsets,
    meets_in_value_one_layer, LabeledFamily, Subset, SubsetFamily,
};
use crate::error::{Error, Result};
use crate::model::{enumerate_space, space_size, theorem_bound, to_labeled, IpSequence, LabeledSet, Space};
use crate::search::{
    classify_maximizer, closed_pairs, k_fold_max_product, max_product, max_weighted_product, Budget, Classification,
    ClosedPair, Context, Relation,
};
use crate::weighted::{
    enumerate_hereditary_compressed, lemma_weight, lemma_weighted_family, lemma_weights_on, random_product_weights,
    WeightedFamily,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashSet};

pub const SUITE_NAMES: [&str; 9] = [
    "thm-main-small",
    "thm-partial-grid",
    "c1-two",
    "c1-one",
    "k-fold",
    "weighted-micro",
    "compression-props",
    "weight-formula",
    "closure-oracle",
];

/// One checked instance.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteRow {
    pub suite: &'static str,
    pub instance: String,
    pub bound: String,
    pub max: String,
    /// Whether every maximizer is a star of the expected kind, for suites
    /// where that is asserted.
    pub all_star: Option<bool>,
    pub ok: bool,
    pub detail: String,
}

impl SuiteRow {
    pub const CSV_HEADER: [&'static str; 7] = ["suite", "instance", "bound", "max", "all_star", "ok", "detail"];

    pub fn csv_record(&self) -> [String; 7] {
        [
            self.suite.to_string(),
            self.instance.clone(),
            self.bound.clone(),
            self.max.clone(),
            self.all_star.map(|b| b.to_string()).unwrap_or_default(),
            self.ok.to_string(),
            self.detail.clone(),
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SuiteRow> {
        self.rows.iter().filter(|r| !r.ok)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SuiteOptions {
    pub budget: Budget,
    /// Base seed of the randomised suites.
    pub seed: u64,
}

/// Runs one suite by name, or every suite for `"all"`.
pub fn run(name: &str, opts: &SuiteOptions) -> Result<Vec<SuiteReport>> {
    if name == "all" {
        return SUITE_NAMES.iter().map(|n| run_one(n, opts)).collect();
    }
    Ok(vec![run_one(name, opts)?])
}

fn run_one(name: &str, opts: &SuiteOptions) -> Result<SuiteReport> {
    let (name, rows) = match name {
        "thm-main-small" => ("thm-main-small", thm_main_small(&opts.budget)?),
        "thm-partial-grid" => ("thm-partial-grid", thm_partial_grid(&opts.budget)?),
        "c1-two" => ("c1-two", c1_two(&opts.budget)?),
        "c1-one" => ("c1-one", c1_one(&opts.budget)?),
        "k-fold" => ("k-fold", k_fold(&opts.budget)?),
        "weighted-micro" => ("weighted-micro", weighted_micro(opts)?),
        "compression-props" => ("compression-props", compression_props(opts.seed)),
        "weight-formula" => ("weight-formula", weight_formula(opts.seed)?),
        "closure-oracle" => ("closure-oracle", closure_oracle(opts)?),
        other => return Err(Error::Parse(format!("unknown suite {other:?}"))),
    };
    Ok(SuiteReport { name, rows })
}

/// All non-decreasing cap vectors of length `len` with entries in `[lo, hi]`.
pub fn cap_vectors(len: usize, lo: u32, hi: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| {
                let start = v.last().copied().unwrap_or(lo);
                (start..=hi).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn ip(c: &[u32]) -> IpSequence {
    IpSequence::new(c.to_vec()).expect("grid caps are valid")
}

fn fmt_caps(c: &[u32]) -> String {
    c.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn class_label(c: &Classification) -> String {
    match c {
        Classification::Star {
            position,
            value,
            caps_minimal,
        } => format!("star(p={position},q={value},minimal={caps_minimal})"),
        Classification::NonStar => "non-star".into(),
    }
}

/// Splitmix-style seed derivation, so every corpus item gets its own stream.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Search result for one pair of sequence spaces.
pub struct PairOutcome {
    pub left: Space,
    pub right: Space,
    pub bound: BigUint,
    pub max: BigUint,
    pub maximizers: Vec<ClosedPair>,
    pub classes: Vec<Classification>,
}

pub fn search_pair(c: &[u32], r: usize, d: &[u32], s: usize, budget: &Budget) -> Result<PairOutcome> {
    let left = Space::new(ip(c), r)?;
    let right = Space::new(ip(d), s)?;
    let ctx = Context::meets(&left, &right)?;
    let res = max_product(&ctx, budget)?;
    let bound = theorem_bound(&[(ip(c), r), (ip(d), s)])?;
    let classes = res
        .maximizers
        .iter()
        .map(|m| classify_maximizer(m, &left, &right))
        .collect();
    Ok(PairOutcome {
        left,
        right,
        bound,
        max: res.value,
        maximizers: res.maximizers,
        classes,
    })
}

fn thm_main_small(budget: &Budget) -> Result<Vec<SuiteRow>> {
    let grid: Vec<Vec<u32>> = (2..=3).flat_map(|n| cap_vectors(n, 3, 4)).collect();
    grid.par_iter()
        .map(|c| {
            let n = c.len();
            let out = search_pair(c, n, c, n, budget)?;
            let prod: u64 = c.iter().map(|&x| x as u64).product();
            let expected = BigUint::from(prod / c[0] as u64).pow(2);
            let all_star = out.classes.iter().all(Classification::is_caps_minimal_star);
            let minimal_positions = c.iter().filter(|&&x| x == c[0]).count();
            let count_ok = out.maximizers.len() == minimal_positions * c[0] as usize;
            let ok = out.max == expected && out.bound == expected && all_star && count_ok;
            Ok(SuiteRow {
                suite: "thm-main-small",
                instance: format!("c=({})", fmt_caps(c)),
                bound: expected.to_string(),
                max: out.max.to_string(),
                all_star: Some(all_star),
                ok,
                detail: format!(
                    "{} maximizers, expected {} caps-minimal stars",
                    out.maximizers.len(),
                    minimal_positions * c[0] as usize
                ),
            })
        })
        .collect()
}

/// `(c, r, d, s)`: caps and rank of each side.
pub type PairInstance = (Vec<u32>, usize, Vec<u32>, usize);

/// The `(c, r, d, s)` grid of the partial-sequence statement.
pub fn partial_grid() -> Vec<PairInstance> {
    let caps: Vec<Vec<u32>> = (1..=3).flat_map(|n| cap_vectors(n, 3, 4)).collect();
    let mut out = Vec::new();
    for c in &caps {
        for d in &caps {
            for r in 1..=c.len() {
                for s in 1..=d.len() {
                    out.push((c.clone(), r, d.clone(), s));
                }
            }
        }
    }
    out
}

fn thm_partial_grid(budget: &Budget) -> Result<Vec<SuiteRow>> {
    partial_grid()
        .par_iter()
        .map(|(c, r, d, s)| {
            let out = search_pair(c, *r, d, *s, budget)?;
            let all_star = out.classes.iter().all(Classification::is_caps_minimal_star);
            let ok = out.max == out.bound && all_star;
            let detail = match out.classes.iter().find(|k| !k.is_caps_minimal_star()) {
                Some(k) => format!("{} maximizers; offending maximizer {}", out.maximizers.len(), class_label(k)),
                None => format!("{} maximizers", out.maximizers.len()),
            };
            Ok(SuiteRow {
                suite: "thm-partial-grid",
                instance: format!("c=({}) r={} d=({}) s={}", fmt_caps(c), r, fmt_caps(d), s),
                bound: out.bound.to_string(),
                max: out.max.to_string(),
                all_star: Some(all_star),
                ok,
                detail,
            })
        })
        .collect()
}

/// `{a in S_(2,..,2) : at least two coordinates equal 1}`.
pub fn hamming_majority(space: &Space) -> BitSet {
    BitSet::from_indices(
        space.len(),
        (0..space.len()).filter(|&i| space.get(i).entries().iter().filter(|&&v| v == 1).count() >= 2),
    )
}

fn c1_two(budget: &Budget) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();

    let sp = Space::full(ip(&[2, 2, 2]))?;
    let ctx = Context::meets(&sp, &sp)?;
    let res = max_product(&ctx, budget)?;
    let maj = hamming_majority(&sp);
    let maj_pair = ClosedPair {
        left: maj.clone(),
        right: maj.clone(),
    };
    let attains = ctx.is_cross(&maj, &maj) && maj_pair.product() == 16;
    let listed = res.maximizers.contains(&maj_pair);
    rows.push(SuiteRow {
        suite: "c1-two",
        instance: "c=(2,2,2) majority pair".into(),
        bound: "16".into(),
        max: res.value.to_string(),
        all_star: None,
        ok: res.value == BigUint::from(16u32) && attains && listed,
        detail: format!("majority pair attains: {attains}, listed among maximizers: {listed}"),
    });

    let sp = Space::full(ip(&[2, 2]))?;
    let ctx = Context::meets(&sp, &sp)?;
    let res = max_product(&ctx, budget)?;
    let idx = |e: &[u32]| sp.index_of(&crate::model::PartialSequence::from_entries(e.to_vec())).expect("member");
    let pair = ClosedPair {
        left: BitSet::from_indices(4, [idx(&[1, 1]), idx(&[2, 2])]),
        right: BitSet::from_indices(4, [idx(&[1, 2]), idx(&[2, 1])]),
    };
    let closed = ctx.common_right(&pair.left) == pair.right && ctx.common_left(&pair.right) == pair.left;
    let listed = res.maximizers.contains(&pair);
    let non_star = classify_maximizer(&pair, &sp, &sp) == Classification::NonStar;
    rows.push(SuiteRow {
        suite: "c1-two",
        instance: "c=(2,2) diagonal/anti-diagonal pair".into(),
        bound: "4".into(),
        max: res.value.to_string(),
        all_star: None,
        ok: res.value == BigUint::from(4u32) && closed && listed && non_star,
        detail: format!("closed: {closed}, listed: {listed}, non-star: {non_star}"),
    });

    for n in 2..=3 {
        let c = vec![2u32; n];
        let out = search_pair(&c, n, &c, n, budget)?;
        let expected = BigUint::from(1u32 << (n - 1)).pow(2);
        let stars_listed = (1..=n).all(|p| {
            (1..=2).all(|q| {
                let st = BitSet::from_indices(out.left.len(), out.left.star_indices(p, q));
                out.maximizers.contains(&ClosedPair {
                    left: st.clone(),
                    right: st,
                })
            })
        });
        let non_stars = out.classes.iter().filter(|k| **k == Classification::NonStar).count();
        rows.push(SuiteRow {
            suite: "c1-two",
            instance: format!("c=({})", fmt_caps(&c)),
            bound: expected.to_string(),
            max: out.max.to_string(),
            all_star: Some(non_stars == 0),
            ok: out.max == expected && stars_listed,
            detail: format!(
                "{} maximizers, {} non-star, all stars listed: {stars_listed}",
                out.maximizers.len(),
                non_stars
            ),
        });
    }
    Ok(rows)
}

fn c1_one(budget: &Budget) -> Result<Vec<SuiteRow>> {
    let out = search_pair(&[1, 1, 1], 2, &[1, 1, 1], 2, budget)?;
    let everything_meets = out.maximizers.len() == 1 && out.maximizers[0].left.count() == out.left.len();
    Ok(vec![SuiteRow {
        suite: "c1-one",
        instance: "c=d=(1,1,1) r=s=2".into(),
        bound: out.bound.to_string(),
        max: out.max.to_string(),
        all_star: None,
        ok: out.max == BigUint::from(9u32) && out.bound == BigUint::from(4u32) && everything_meets,
        detail: format!("max exceeds bound: {}", out.max > out.bound),
    }])
}

fn k_fold(budget: &Budget) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    for (c, r, expected) in [(vec![3u32, 3], 2usize, 27u32), (vec![2, 2, 2], 3, 64)] {
        let sp = Space::new(ip(&c), r)?;
        let ctx = Context::meets(&sp, &sp)?;
        let res = k_fold_max_product(&ctx, 3, budget)?;
        let bound = theorem_bound(&vec![(ip(&c), r); 3])?;
        let (all_star, extra) = if c[0] >= 3 {
            let common_star = |t: &Vec<BitSet>| {
                t.iter().all(|a| a == &t[0])
                    && matches!(
                        classify_maximizer(
                            &ClosedPair {
                                left: t[0].clone(),
                                right: t[1].clone()
                            },
                            &sp,
                            &sp
                        ),
                        Classification::Star { caps_minimal: true, .. }
                    )
            };
            (Some(res.maximizers.iter().all(common_star)), true)
        } else {
            let maj = hamming_majority(&sp);
            (None, res.maximizers.contains(&vec![maj.clone(), maj.clone(), maj]))
        };
        rows.push(SuiteRow {
            suite: "k-fold",
            instance: format!("c=({}) r={} k=3", fmt_caps(&c), r),
            bound: bound.to_string(),
            max: res.value.to_string(),
            all_star,
            ok: res.value == BigUint::from(expected) && bound == res.value && all_star.unwrap_or(true) && extra,
            detail: format!("{} maximizing tuples over {} closed sets", res.maximizers.len(), res.closed_sets),
        });
    }
    let corpus: [(&[u32], usize); 6] = [
        (&[3, 3], 2),
        (&[2, 2], 2),
        (&[2, 2, 2], 3),
        (&[3, 3, 3], 2),
        (&[1, 1, 1], 2),
        (&[3, 4], 1),
    ];
    for (c, r) in corpus {
        let sp = Space::new(ip(c), r)?;
        let ctx = Context::meets(&sp, &sp)?;
        let two = k_fold_max_product(&ctx, 2, budget)?;
        let pair = max_product(&ctx, budget)?;
        rows.push(SuiteRow {
            suite: "k-fold",
            instance: format!("c=({}) r={} k=2", fmt_caps(c), r),
            bound: pair.value.to_string(),
            max: two.value.to_string(),
            all_star: None,
            ok: two.value == pair.value,
            detail: "k=2 agrees with the pair search".into(),
        });
    }
    Ok(rows)
}

/// A hereditary compressed family with one of its test weightings.
pub struct CorpusEntry {
    pub label: String,
    pub weights: WeightedFamily,
}

/// For each family: value-one-layer weights for every admissible `(c, r)`
/// with caps in `[3, 4]`, then `draws` seeded product-form weightings.
pub struct WeightedCorpus {
    pub families: Vec<SubsetFamily>,
    pub lemma: Vec<Vec<CorpusEntry>>,
    pub product: Vec<Vec<CorpusEntry>>,
}

pub fn weighted_corpus(max_universe: usize, draws: usize, seed: u64) -> Result<WeightedCorpus> {
    let mut families = Vec::new();
    for m in 1..=max_universe {
        families.extend(enumerate_hereditary_compressed(m)?);
    }
    let mut lemma = Vec::new();
    let mut product = Vec::new();
    for (fi, f) in families.iter().enumerate() {
        let m = f.universe();
        let top = f.iter().map(Subset::len).max().unwrap_or(0).max(1);
        let mut ls = Vec::new();
        for c in cap_vectors(m, 3, 4) {
            for r in top..=m {
                ls.push(CorpusEntry {
                    label: format!("value-one weights c=({}) r={r}", fmt_caps(&c)),
                    weights: lemma_weights_on(f, &ip(&c), r)?,
                });
            }
        }
        lemma.push(ls);
        let mut ps = Vec::new();
        for t in 0..draws {
            let s = derive_seed(seed, (fi * draws + t) as u64);
            ps.push(CorpusEntry {
                label: format!("product weights seed={s}"),
                weights: random_product_weights(f, s)?,
            });
        }
        product.push(ps);
    }
    Ok(WeightedCorpus {
        families,
        lemma,
        product,
    })
}

fn family_label(f: &SubsetFamily) -> String {
    let members: Vec<String> = f.iter().map(|s| s.to_string()).collect();
    format!("[{}]{{{}}}", f.universe(), members.join(","))
}

/// Checks the weighted product bound and its equality case for one pair.
pub fn check_weighted_pair(g: &WeightedFamily, h: &WeightedFamily, budget: &Budget) -> Result<std::result::Result<(), String>> {
    let ctx = Context::intersection(g.family(), h.family())?;
    let res = max_weighted_product(&ctx, g, h, budget)?;
    if res.value != res.bound {
        return Ok(Err(format!("max {} != bound {}", res.value, res.bound)));
    }
    if !res.maximizers_are_qualifying_stars() {
        return Ok(Err(format!(
            "maximizers not all qualifying stars ({} maximizers, missing star pairs {:?})",
            res.maximizers.len(),
            res.missing_star_pairs
        )));
    }
    Ok(Ok(()))
}

fn weighted_micro(opts: &SuiteOptions) -> Result<Vec<SuiteRow>> {
    let corpus = weighted_corpus(3, 25, opts.seed)?;
    let n = corpus.families.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut checked = 0usize;
            let mut failure = None;
            let lemma = corpus.lemma[i]
                .iter()
                .flat_map(|g| corpus.lemma[j].iter().map(move |h| (g, h)));
            let product = corpus.product[i].iter().zip(&corpus.product[j]);
            for (g, h) in lemma.chain(product) {
                checked += 1;
                if let Err(why) = check_weighted_pair(&g.weights, &h.weights, &opts.budget)? {
                    failure.get_or_insert(format!("g: {}; h: {}; {why}", g.label, h.label));
                }
            }
            let big = |e: &CorpusEntry| e.weights.star_weight(1).to_string();
            let sample_bound = corpus.product[i]
                .first()
                .zip(corpus.product[j].first())
                .map(|(g, h)| format!("{}*{}", big(g), big(h)))
                .unwrap_or_default();
            Ok(SuiteRow {
                suite: "weighted-micro",
                instance: format!("G={} H={}", family_label(&corpus.families[i]), family_label(&corpus.families[j])),
                bound: sample_bound,
                max: String::new(),
                all_star: Some(failure.is_none()),
                ok: failure.is_none(),
                detail: failure.unwrap_or_else(|| format!("{checked} weightings")),
            })
        })
        .collect()
}

fn weight_formula(seed: u64) -> Result<Vec<SuiteRow>> {
    let grid: Vec<(Vec<u32>, usize)> = (1..=4)
        .flat_map(|n| cap_vectors(n, 3, 5))
        .flat_map(|c| (1..=c.len()).map(move |r| (c.clone(), r)))
        .collect();
    let mut rows: Vec<SuiteRow> = grid
        .par_iter()
        .map(|(c, r)| {
            let caps = ip(c);
            let wf = lemma_weighted_family(&caps, *r)?;
            let total = wf.total_weight();
            let size = space_size(&caps, *r)?;
            let direct = value_one_layer_counts(&caps, *r)?;
            let zero = BigUint::from(0u32);
            let formula_ok = wf
                .family()
                .iter()
                .all(|a| lemma_weight(&caps, *r, a).ok().as_ref() == Some(direct.get(&a).unwrap_or(&zero)));
            let report = wf.check_conditions();
            let stars_ok = (1..=c.len()).all(|a| wf.star_weight(a) <= wf.star_weight(1));
            let partition_ok = total == crate::weighted::weight_from_uint(&size);
            Ok(SuiteRow {
                suite: "weight-formula",
                instance: format!("c=({}) r={}", fmt_caps(c), r),
                bound: size.to_string(),
                max: total.to_string(),
                all_star: None,
                ok: partition_ok && formula_ok && report.is_clean() && stars_ok,
                detail: format!(
                    "partition: {partition_ok}, direct count: {formula_ok}, conditions: {}, star weights: {stars_ok}",
                    report.is_clean()
                ),
            })
        })
        .collect::<Result<_>>()?;

    let corpus = weighted_corpus(3, 25, seed)?;
    let entries: Vec<&CorpusEntry> = corpus.lemma.iter().chain(&corpus.product).flatten().collect();
    let bad: Vec<String> = entries
        .par_iter()
        .filter(|e| {
            let w = &e.weights;
            !((1..=w.universe()).all(|a| w.star_weight(a) <= w.star_weight(1)) && w.check_conditions().is_clean())
        })
        .map(|e| format!("{} on {}", e.label, family_label(e.weights.family())))
        .collect();
    rows.push(SuiteRow {
        suite: "weight-formula",
        instance: format!("weighted corpus ({} weightings)", entries.len()),
        bound: String::new(),
        max: String::new(),
        all_star: None,
        ok: bad.is_empty(),
        detail: bad.first().cloned().unwrap_or_else(|| "star weights peak at 1; conditions hold".into()),
    });
    Ok(rows)
}

/// Labeled sets of `L_c^(r)` bucketed by the positions carrying value 1.
pub fn value_one_layer_counts(caps: &IpSequence, rank: usize) -> Result<BTreeMap<Subset, BigUint>> {
    let mut out: BTreeMap<Subset, BigUint> = BTreeMap::new();
    for a in enumerate_space(caps, rank)? {
        let layer = Subset::from_elements(to_labeled(&a).pairs().iter().filter(|p| p.1 == 1).map(|p| p.0));
        *out.entry(layer).or_default() += 1u32;
    }
    Ok(out)
}

fn random_subset_pair(rng: &mut ChaCha8Rng) -> (SubsetFamily, SubsetFamily) {
    loop {
        let n = rng.gen_range(1..=5usize);
        let top = 1u64 << n;
        let k = rng.gen_range(1..=4);
        let a: BTreeSet<Subset> = (0..k).map(|_| Subset::from_mask(rng.gen_range(1..top))).collect();
        let candidates: Vec<Subset> = (1..top)
            .map(Subset::from_mask)
            .filter(|b| a.iter().all(|x| x.intersects(*b)))
            .collect();
        let b: BTreeSet<Subset> = candidates.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if b.is_empty() {
            continue;
        }
        return (
            SubsetFamily::new(n, a).expect("fits"),
            SubsetFamily::new(n, b).expect("fits"),
        );
    }
}

/// Problems found on one random subset-family pair.
pub fn check_subset_pair(a: &SubsetFamily, b: &SubsetFamily) -> Vec<String> {
    let n = a.universe();
    let mut bad = Vec::new();
    let cross = is_cross_intersecting_subsets(a, b);
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let (da, db) = (delta_family(i, j, a), delta_family(i, j, b));
            if da.len() != a.len() || db.len() != b.len() {
                bad.push(format!("Delta_{{{i},{j}}} changed a size"));
            }
            if cross && !is_cross_intersecting_subsets(&da, &db) {
                bad.push(format!("Delta_{{{i},{j}}} broke cross-intersection"));
            }
            for s in a.iter().chain(b.iter()) {
                if delta(i, j, delta(i, j, s)) != delta(i, j, s) {
                    bad.push(format!("delta_{{{i},{j}}} not idempotent on {s}"));
                }
            }
        }
    }
    match compress_pair_to_fixpoint(a, b) {
        Ok(fx) => {
            if fx.left.len() != a.len() || fx.right.len() != b.len() {
                bad.push("fixpoint changed a size".into());
            }
            if !fx.left.is_compressed() || !fx.right.is_compressed() {
                bad.push("fixpoint not compressed".into());
            }
            if cross && !is_cross_intersecting_subsets(&fx.left, &fx.right) {
                bad.push("fixpoint broke cross-intersection".into());
            }
            if fx.steps.len() as u64 > a.potential() + b.potential() {
                bad.push("fixpoint took more steps than the potential".into());
            }
        }
        Err(e) => bad.push(format!("fixpoint failed: {e}")),
    }
    bad
}

fn random_caps(rng: &mut ChaCha8Rng, max_len: usize, max_cap: u32) -> IpSequence {
    let n = rng.gen_range(1..=max_len);
    let mut c: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=max_cap)).collect();
    c.sort_unstable();
    IpSequence::new(c).expect("sorted positive")
}

/// Every labeled set of `L_c^(<= n)` with at least one pair.
pub fn labeled_universe(caps: &IpSequence) -> Vec<LabeledSet> {
    (1..=caps.len())
        .flat_map(|r| enumerate_space(caps, r).expect("valid rank"))
        .map(|s| to_labeled(&s))
        .collect()
}

/// A random pair with `(A ∩ B) \ V` non-empty across all cross pairs.
pub fn random_labeled_pair(rng: &mut ChaCha8Rng) -> (LabeledFamily, LabeledFamily, BTreeSet<(usize, u32)>) {
    loop {
        let c = random_caps(rng, 3, 3);
        let d = random_caps(rng, 3, 3);
        let (l, h) = (c.len().max(d.len()), c.last().max(d.last()));
        let avoid: BTreeSet<(usize, u32)> = (1..=l)
            .flat_map(|x| (2..=h).map(move |y| (x, y)))
            .filter(|_| rng.gen_bool(0.3))
            .collect();
        let ua = labeled_universe(&c);
        let k = rng.gen_range(1..=4);
        let a: Vec<LabeledSet> = (0..k).map(|_| ua[rng.gen_range(0..ua.len())].clone()).collect();
        let candidates: Vec<LabeledSet> = labeled_universe(&d)
            .into_iter()
            .filter(|b| a.iter().all(|x| x.common_pairs(b).any(|p| !avoid.contains(&p))))
            .collect();
        let b: Vec<LabeledSet> = candidates.into_iter().filter(|_| rng.gen_bool(0.5)).collect();
        if b.is_empty() {
            continue;
        }
        return (
            LabeledFamily::new(c, a).expect("valid members"),
            LabeledFamily::new(d, b).expect("valid members"),
            avoid,
        );
    }
}

/// Problems found on one random labeled-family pair satisfying the
/// avoid-set precondition for `avoid`.
pub fn check_labeled_pair(a: &LabeledFamily, b: &LabeledFamily, avoid: &BTreeSet<(usize, u32)>) -> Vec<String> {
    let mut bad = Vec::new();
    let (l, h) = cascade_extent(a, b);
    for (x, y) in cascade_order(l, h) {
        let (ga, gb) = (gamma_family(x, y, a), gamma_family(x, y, b));
        if ga.len() != a.len() || gb.len() != b.len() {
            bad.push(format!("Gamma_{{{x},{y}}} changed a size"));
        }
        let mut grown = avoid.clone();
        grown.insert((x, y));
        if !check_avoid_intersection(&ga, &gb, &grown) {
            bad.push(format!("Gamma_{{{x},{y}}} broke the avoid-set property"));
        }
        for s in a.iter().chain(b.iter()) {
            if gamma(x, y, &gamma(x, y, s)) != gamma(x, y, s) {
                bad.push(format!("gamma_{{{x},{y}}} not idempotent"));
            }
        }
    }
    // the cascade, one step at a time, growing the avoided set from nothing
    let mut left = a.clone();
    let mut right = b.clone();
    let mut seen = BTreeSet::new();
    for (x, y) in cascade_order(l, h) {
        left = gamma_family(x, y, &left);
        right = gamma_family(x, y, &right);
        seen.insert((x, y));
        if !check_avoid_intersection(&left, &right, &seen) {
            bad.push(format!("cascade lost the avoid-set property at Gamma_{{{x},{y}}}"));
            break;
        }
    }
    match gamma_cascade(a, b) {
        Ok((ca, cb)) => {
            if (ca.clone(), cb.clone()) != (left, right) {
                bad.push("cascade differs from its step-by-step composition".into());
            }
            if !meets_in_value_one_layer(&ca, &cb, l) {
                bad.push("cascade output misses the value-one layer".into());
            }
            if ca.len() != a.len() || cb.len() != b.len() {
                bad.push("cascade changed a size".into());
            }
        }
        Err(e) => bad.push(format!("cascade refused: {e}")),
    }
    if !is_cross_intersecting_labeled(a, b) {
        bad.push("generator produced a non-intersecting pair".into());
    }
    bad
}

pub const PROPERTY_SAMPLES: usize = 1000;

fn compression_props(seed: u64) -> Vec<SuiteRow> {
    let subset: Vec<Vec<String>> = (0..PROPERTY_SAMPLES)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            let (a, b) = random_subset_pair(&mut rng);
            check_subset_pair(&a, &b)
        })
        .collect();
    let labeled: Vec<Vec<String>> = (0..PROPERTY_SAMPLES)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed ^ 0x5eed, i as u64));
            let (a, b, v) = random_labeled_pair(&mut rng);
            check_labeled_pair(&a, &b, &v)
        })
        .collect();
    let row = |what: &str, results: Vec<Vec<String>>| {
        let failing: Vec<(usize, String)> = results
            .into_iter()
            .enumerate()
            .filter_map(|(i, v)| v.into_iter().next().map(|m| (i, m)))
            .collect();
        SuiteRow {
            suite: "compression-props",
            instance: format!("{PROPERTY_SAMPLES} random {what} pairs, seed {seed}"),
            bound: String::new(),
            max: String::new(),
            all_star: None,
            ok: failing.is_empty(),
            detail: match failing.first() {
                Some((i, m)) => format!("{} violating samples; first #{i}: {m}", failing.len()),
                None => "no violations".into(),
            },
        }
    };
    vec![row("subset-family", subset), row("labeled-family", labeled)]
}

/// A random relation with `|X|, |Y|` in `[1, 12]`.
pub fn random_context(rng: &mut ChaCha8Rng) -> Context {
    let left = rng.gen_range(1..=12);
    let right = rng.gen_range(1..=12);
    let p = rng.gen_range(0.15..0.85);
    let cells: Vec<bool> = (0..left * right).map(|_| rng.gen_bool(p)).collect();
    Context::from_fn(left, right, Relation::Custom, |x, y| cells[x * right + y]).expect("nonempty")
}

/// Closed left extents by closing every subset of `X`.
pub fn brute_force_closed(ctx: &Context) -> HashSet<BitSet> {
    let n = ctx.left_len();
    (0u64..1 << n)
        .map(|m| ctx.close_left(&BitSet::from_indices(n, (0..n).filter(|i| m >> i & 1 == 1))))
        .collect()
}

pub const ORACLE_CONTEXTS: usize = 50;

fn closure_oracle(opts: &SuiteOptions) -> Result<Vec<SuiteRow>> {
    (0..ORACLE_CONTEXTS)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, i as u64));
            let ctx = random_context(&mut rng);
            let pairs = closed_pairs(&ctx, &opts.budget)?;
            let got: HashSet<BitSet> = pairs.iter().map(|p| p.left.clone()).collect();
            let expected = brute_force_closed(&ctx);
            let rights_ok = pairs.iter().all(|p| p.right == ctx.common_right(&p.left));
            let ok = got.len() == pairs.len() && got == expected && rights_ok;
            Ok(SuiteRow {
                suite: "closure-oracle",
                instance: format!("context #{i} ({}x{})", ctx.left_len(), ctx.right_len()),
                bound: expected.len().to_string(),
                max: pairs.len().to_string(),
                all_star: None,
                ok,
                detail: format!("{} closed pairs, oracle {}", pairs.len(), expected.len()),
            })
        })
        .collect()
}

/// `(c, r, d, s)` instances of the partial-sequence grid whose worst
/// maximizer is a star at a position where the cap is not the smallest.
pub fn partial_grid_exceptions(budget: &Budget) -> Result<Vec<(PairInstance, String)>> {
    let rows = thm_partial_grid(budget)?;
    Ok(partial_grid()
        .into_iter()
        .zip(rows)
        .filter(|(_, row)| !row.ok)
        .map(|(inst, row)| (inst, row.detail))
        .collect())
}
