use super::closed::{closed_pairs, visit_closed_pairs, Budget, ClosedPair};
use super::context::{Context, Relation};
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::weighted::{Weight, WeightedFamily};
use num_bigint::BigUint;
use num_traits::Zero;
use std::ops::{Add, ControlFlow, Mul};

/// Exact maximum of `|A| |B|` over cross-intersecting pairs.
#[derive(Clone, Debug)]
pub struct MaxProduct {
    pub value: BigUint,
    /// All maximizing pairs, in report order. Empty when the maximum is 0.
    pub maximizers: Vec<ClosedPair>,
    /// Closed pairs visited (after pruning).
    pub visited: u128,
}

/// Branch-and-bound over closed pairs for the largest `w(A) * v(B)` with
/// positive product. Ties with the incumbent are never pruned, so every
/// maximizer is found.
fn best_pairs<W>(ctx: &Context, budget: &Budget, left_w: &[W], right_w: &[W]) -> Result<(W, Vec<ClosedPair>, u128)>
where
    W: Clone + Ord + Zero + Add<Output = W> + Mul<Output = W>,
{
    let sum = |s: &BitSet, w: &[W]| s.iter().fold(W::zero(), |acc, i| acc + w[i].clone());
    let mut best = W::zero();
    let mut found: Vec<ClosedPair> = Vec::new();
    let visited = visit_closed_pairs(ctx, budget, |left, right, start| {
        let wl = sum(left, left_w);
        let wr = sum(right, right_w);
        let value = wl.clone() * wr.clone();
        if !value.is_zero() {
            if value > best {
                best = value.clone();
                found.clear();
            }
            if value == best {
                found.push(ClosedPair {
                    left: left.clone(),
                    right: right.clone(),
                });
            }
        }
        if right.is_empty() {
            return ControlFlow::Break(());
        }
        // descendants only add left elements from `start` on that relate to
        // something in the current right extent, and shrink the right extent
        let reach = (start..ctx.left_len())
            .filter(|&x| !left.contains(x) && !ctx.row(x).is_disjoint(right))
            .fold(wl, |acc, x| acc + left_w[x].clone());
        if !best.is_zero() && reach * wr < best {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    found.sort_by(|a, b| a.report_cmp(b));
    Ok((best, found, visited))
}

pub fn max_product(ctx: &Context, budget: &Budget) -> Result<MaxProduct> {
    let ones_l = vec![1u128; ctx.left_len()];
    let ones_r = vec![1u128; ctx.right_len()];
    let (value, maximizers, visited) = best_pairs(ctx, budget, &ones_l, &ones_r)?;
    Ok(MaxProduct {
        value: BigUint::from(value),
        maximizers,
        visited,
    })
}

/// Plain reference search: scan every closed pair, no pruning.
pub fn max_product_exhaustive(ctx: &Context, budget: &Budget) -> Result<MaxProduct> {
    let pairs = closed_pairs(ctx, budget)?;
    let visited = pairs.len() as u128;
    let best = pairs.iter().map(ClosedPair::product).max().unwrap_or(0);
    let mut maximizers: Vec<_> = if best == 0 {
        Vec::new()
    } else {
        pairs.into_iter().filter(|p| p.product() == best).collect()
    };
    maximizers.sort_by(|a, b| a.report_cmp(b));
    Ok(MaxProduct {
        value: BigUint::from(best),
        maximizers,
        visited,
    })
}

/// A maximizing pair of the weighted search with its star analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedMaximizer {
    pub pair: ClosedPair,
    /// Every `a ∈ [m] ∩ [n]` with `A = G(a)` and `B = H(a)`.
    pub star_centres: Vec<usize>,
    /// The centres that also satisfy `g(G(a)) = g(G(1))` and
    /// `h(H(a)) = h(H(1))`.
    pub qualifying_centres: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct WeightedMax {
    pub value: Weight,
    /// `g(G(1)) * h(H(1))`.
    pub bound: Weight,
    pub maximizers: Vec<WeightedMaximizer>,
    /// Centres `a` whose star pair meets the side conditions and has a
    /// positive product but is missing from `maximizers`.
    pub missing_star_pairs: Vec<usize>,
}

impl WeightedMax {
    pub fn within_bound(&self) -> bool {
        self.value <= self.bound
    }

    pub fn attains_bound(&self) -> bool {
        self.value == self.bound
    }

    /// The equality characterisation: every maximizer is a qualifying star
    /// pair and every qualifying star pair is a maximizer.
    pub fn maximizers_are_qualifying_stars(&self) -> bool {
        self.maximizers.iter().all(|m| !m.qualifying_centres.is_empty())
            && self.missing_star_pairs.is_empty()
    }
}

/// Exact maximum of `g(A) h(B)` over cross-intersecting `A ⊆ G`, `B ⊆ H`.
///
/// `ctx` must be the intersection context of `g.family()` and `h.family()`.
pub fn max_weighted_product(
    ctx: &Context,
    g: &WeightedFamily,
    h: &WeightedFamily,
    budget: &Budget,
) -> Result<WeightedMax> {
    if ctx.relation() != Relation::Intersection {
        return Err(Error::RelationMismatch(format!(
            "weighted search needs an intersection context, got {:?}",
            ctx.relation()
        )));
    }
    if ctx.left_len() != g.family().len() || ctx.right_len() != h.family().len() {
        return Err(Error::RelationMismatch(format!(
            "context is {}x{} but families have {} and {} members",
            ctx.left_len(),
            ctx.right_len(),
            g.family().len(),
            h.family().len()
        )));
    }
    let gs: Vec<_> = g.family().iter().collect();
    let hs: Vec<_> = h.family().iter().collect();
    let gw: Vec<Weight> = gs.iter().map(|s| g.weight(*s).clone()).collect();
    let hw: Vec<Weight> = hs.iter().map(|s| h.weight(*s).clone()).collect();
    let (value, pairs, _) = best_pairs(ctx, budget, &gw, &hw)?;

    let bound = g.star_weight(1) * h.star_weight(1);
    let common = g.universe().min(h.universe());
    let star_bits = |members: &[crate::compression::Subset], a: usize| {
        BitSet::from_indices(
            members.len(),
            members.iter().enumerate().filter(|(_, s)| s.contains(a)).map(|(i, _)| i),
        )
    };
    let qualifies = |a: usize| g.star_weight(a) == g.star_weight(1) && h.star_weight(a) == h.star_weight(1);

    let maximizers: Vec<WeightedMaximizer> = pairs
        .into_iter()
        .map(|pair| {
            let star_centres: Vec<usize> = (1..=common)
                .filter(|&a| pair.left == star_bits(&gs, a) && pair.right == star_bits(&hs, a))
                .collect();
            let qualifying_centres = star_centres.iter().copied().filter(|&a| qualifies(a)).collect();
            WeightedMaximizer {
                pair,
                star_centres,
                qualifying_centres,
            }
        })
        .collect();

    let missing_star_pairs = (1..=common)
        .filter(|&a| qualifies(a))
        .filter(|&a| !(g.star_weight(a) * h.star_weight(a)).is_zero())
        .filter(|&a| {
            let l = star_bits(&gs, a);
            let r = star_bits(&hs, a);
            !maximizers.iter().any(|m| m.pair.left == l && m.pair.right == r)
        })
        .collect();

    Ok(WeightedMax {
        value,
        bound,
        maximizers,
        missing_star_pairs,
    })
}

/// Exact maximum of `|A_1| .. |A_k|` over pairwise cross-intersecting tuples
/// drawn from one space.
#[derive(Clone, Debug)]
pub struct KFoldMax {
    pub value: BigUint,
    /// Maximizing tuples in report order. Empty when the maximum is 0.
    pub maximizers: Vec<Vec<BitSet>>,
    pub closed_sets: usize,
}

/// k-fold search over the closed sets of a symmetric context.
///
/// In an optimal tuple with positive product each `A_i` equals the set of
/// elements meeting every other member, an intersection of closed sets, so
/// it is closed itself; and given `A_1 .. A_{k-1}` the best `A_k` is exactly
/// that intersection.
pub fn k_fold_max_product(ctx: &Context, k: usize, budget: &Budget) -> Result<KFoldMax> {
    if k < 2 {
        return Err(Error::InvalidK(k));
    }
    if !ctx.is_symmetric() {
        return Err(Error::RelationMismatch(
            "k-fold search needs a symmetric self-context".into(),
        ));
    }
    let closed: Vec<ClosedPair> = closed_pairs(ctx, budget)?;
    let c = closed.len() as u128;
    let space = c.checked_pow(k as u32).unwrap_or(u128::MAX);
    if space > budget.max_closed_pairs {
        return Err(Error::BudgetExceeded {
            what: "closed-set tuples",
            needed: space,
            limit: budget.max_closed_pairs,
        });
    }
    let mut state = KFoldState {
        closed: &closed,
        k,
        best: 0,
        found: Vec::new(),
        chosen: Vec::with_capacity(k),
    };
    state.descend(BitSet::full(ctx.left_len()), 1)?;
    let mut maximizers = state.found;
    maximizers.sort_by(|a, b| {
        a.iter()
            .map(BitSet::to_vec)
            .cmp(b.iter().map(BitSet::to_vec))
    });
    Ok(KFoldMax {
        value: BigUint::from(state.best),
        maximizers,
        closed_sets: closed.len(),
    })
}

struct KFoldState<'a> {
    closed: &'a [ClosedPair],
    k: usize,
    best: u128,
    found: Vec<Vec<BitSet>>,
    chosen: Vec<usize>,
}

impl KFoldState<'_> {
    fn descend(&mut self, allowed: BitSet, product: u128) -> Result<()> {
        let remaining = self.k - self.chosen.len();
        let width = allowed.count() as u128;
        if remaining == 1 {
            let value = product.checked_mul(width).ok_or(Error::BudgetExceeded {
                what: "product width",
                needed: u128::MAX,
                limit: u128::MAX,
            })?;
            if value > 0 && value >= self.best {
                if value > self.best {
                    self.best = value;
                    self.found.clear();
                }
                let mut tuple: Vec<BitSet> = self.chosen.iter().map(|&i| self.closed[i].left.clone()).collect();
                tuple.push(allowed);
                self.found.push(tuple);
            }
            return Ok(());
        }
        let reach = width
            .checked_pow(remaining as u32)
            .and_then(|w| w.checked_mul(product))
            .unwrap_or(u128::MAX);
        if reach == 0 || reach < self.best {
            return Ok(());
        }
        for (i, cp) in self.closed.iter().enumerate() {
            if cp.left.is_empty() || !cp.left.is_subset(&allowed) {
                continue;
            }
            let next = allowed.intersection(&cp.right);
            self.chosen.push(i);
            self.descend(next, product * cp.left.count() as u128)?;
            self.chosen.pop();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::SubsetFamily;
    use crate::model::{IpSequence, PartialSequence, Space};
    use crate::weighted::{product_weights, weight_from_ratio};

    fn full(c: &[u32]) -> Space {
        Space::full(IpSequence::new(c.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn max_product_33() {
        let sp = full(&[3, 3]);
        let ctx = Context::meets(&sp, &sp).unwrap();
        let res = max_product(&ctx, &Budget::default()).unwrap();
        assert_eq!(res.value, 9u32.into());
        assert_eq!(res.maximizers.len(), 6);
        for m in &res.maximizers {
            assert_eq!(m.left, m.right);
        }
    }

    #[test]
    fn max_product_ones_beats_bound() {
        let sp = Space::new(IpSequence::new(vec![1, 1, 1]).unwrap(), 2).unwrap();
        let ctx = Context::meets(&sp, &sp).unwrap();
        let res = max_product(&ctx, &Budget::default()).unwrap();
        assert_eq!(res.value, 9u32.into());
    }

    #[test]
    fn max_product_22_includes_non_star() {
        let sp = full(&[2, 2]);
        let ctx = Context::meets(&sp, &sp).unwrap();
        let res = max_product(&ctx, &Budget::default()).unwrap();
        assert_eq!(res.value, 4u32.into());
        let idx = |e: &[u32]| sp.index_of(&PartialSequence::from_entries(e.to_vec())).unwrap();
        let diag = BitSet::from_indices(4, [idx(&[1, 1]), idx(&[2, 2])]);
        let anti = BitSet::from_indices(4, [idx(&[1, 2]), idx(&[2, 1])]);
        assert!(res.maximizers.contains(&ClosedPair { left: diag, right: anti.clone() }));
        assert!(res
            .maximizers
            .iter()
            .any(|m| m.left == BitSet::from_indices(4, sp.star_indices(1, 1))));
        // 4 stars, the diagonal/anti-diagonal pair in both orientations
        assert_eq!(res.maximizers.len(), 6);
    }

    #[test]
    fn pruned_search_matches_exhaustive() {
        for (c, r) in [(vec![2, 3], 2), (vec![3, 3, 3], 2), (vec![2, 2, 2], 3), (vec![3, 4], 1)] {
            let sp = Space::new(IpSequence::new(c).unwrap(), r).unwrap();
            let ctx = Context::meets(&sp, &sp).unwrap();
            let a = max_product(&ctx, &Budget::default()).unwrap();
            let b = max_product_exhaustive(&ctx, &Budget::default()).unwrap();
            assert_eq!(a.value, b.value);
            assert_eq!(a.maximizers, b.maximizers);
        }
    }

    fn wctx(g: &WeightedFamily, h: &WeightedFamily) -> Context {
        Context::intersection(g.family(), h.family()).unwrap()
    }

    #[test]
    fn weighted_single_star() {
        let f = SubsetFamily::from_lists(1, &[&[], &[1]]);
        let g = product_weights(&f, &[weight_from_ratio(1, 3)]).unwrap();
        let res = max_weighted_product(&wctx(&g, &g), &g, &g, &Budget::default()).unwrap();
        assert_eq!(res.value, weight_from_ratio(1, 9));
        assert!(res.attains_bound());
        assert!(res.maximizers_are_qualifying_stars());
    }

    #[test]
    fn weighted_symmetric_factors_tie() {
        let f = SubsetFamily::power_set(2).unwrap();
        let half = weight_from_ratio(1, 2);
        let g = product_weights(&f, &[half.clone(), half]).unwrap();
        let res = max_weighted_product(&wctx(&g, &g), &g, &g, &Budget::default()).unwrap();
        assert!(res.attains_bound());
        assert_eq!(res.maximizers.len(), 2);
        let centres: Vec<_> = res.maximizers.iter().map(|m| m.qualifying_centres.clone()).collect();
        assert_eq!(centres, vec![vec![1], vec![2]]);
        assert!(res.maximizers_are_qualifying_stars());
    }

    #[test]
    fn weighted_unique_maximizer() {
        let f = SubsetFamily::power_set(2).unwrap();
        let g = product_weights(&f, &[weight_from_ratio(1, 2), weight_from_ratio(1, 3)]).unwrap();
        let res = max_weighted_product(&wctx(&g, &g), &g, &g, &Budget::default()).unwrap();
        assert!(res.attains_bound());
        assert_eq!(res.maximizers.len(), 1);
        assert_eq!(res.maximizers[0].qualifying_centres, vec![1]);
    }

    #[test]
    fn weighted_rejects_meets_context() {
        let f = SubsetFamily::power_set(1).unwrap();
        let g = product_weights(&f, &[weight_from_ratio(1, 2)]).unwrap();
        let sp = full(&[2]);
        let ctx = Context::meets(&sp, &sp).unwrap();
        assert!(matches!(
            max_weighted_product(&ctx, &g, &g, &Budget::default()),
            Err(Error::RelationMismatch(_))
        ));
    }

    #[test]
    fn k_fold_examples() {
        let sp = full(&[3, 3]);
        let ctx = Context::meets(&sp, &sp).unwrap();
        let res = k_fold_max_product(&ctx, 3, &Budget::default()).unwrap();
        assert_eq!(res.value, 27u32.into());
        let two = k_fold_max_product(&ctx, 2, &Budget::default()).unwrap();
        assert_eq!(two.value, max_product(&ctx, &Budget::default()).unwrap().value);
        assert!(matches!(k_fold_max_product(&ctx, 1, &Budget::default()), Err(Error::InvalidK(1))));
    }

    #[test]
    fn k_fold_needs_symmetric_context() {
        let a = full(&[3]);
        let b = full(&[3, 3]);
        let ctx = Context::meets(&a, &b).unwrap();
        assert!(matches!(
            k_fold_max_product(&ctx, 3, &Budget::default()),
            Err(Error::RelationMismatch(_))
        ));
    }
}
