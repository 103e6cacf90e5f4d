//! Weighted hereditary compressed families.
//!
//! Weights are exact rationals. The two weight conditions the product bound
//! needs are
//!
//! * (a) `w(A) >= 2 w(B)` whenever `A ⊊ B` are both members, and
//! * (b) `w(delta_{i,j}(C)) >= w(C)` for every member `C` and `i < j`.
//!
//! They are not enforced at construction (so that violating inputs can be
//! inspected); [`WeightedFamily::check_conditions`] reports every violation.

use crate::compression::{delta, left_pairs, Subset, SubsetFamily};
use crate::error::{Error, Result};
use crate::model::{elementary_symmetric, IpSequence};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub type Weight = BigRational;

pub fn weight_from_ratio(num: i64, den: i64) -> Weight {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn weight_from_uint(n: &BigUint) -> Weight {
    BigRational::from_integer(BigInt::from(n.clone()))
}

/// A non-empty hereditary compressed family with a positive weight per member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedFamily {
    family: SubsetFamily,
    weights: BTreeMap<Subset, Weight>,
}

/// Every violation of the two weight conditions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConditionReport {
    /// `(A, B)` with `A ⊊ B` and `w(A) < 2 w(B)`.
    pub halving: Vec<(Subset, Subset)>,
    /// `(i, j, C)` with `w(delta_{i,j}(C)) < w(C)`.
    pub shifting: Vec<(usize, usize, Subset)>,
}

impl ConditionReport {
    pub fn is_clean(&self) -> bool {
        self.halving.is_empty() && self.shifting.is_empty()
    }
}

/// Output of [`WeightedFamily::split_at_top`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopSplit {
    /// Members avoiding `n`, with unchanged weights.
    pub lower: WeightedFamily,
    /// `{H \ {n} : n ∈ H}` weighted by `h(H ∪ {n})`; `None` when no member
    /// contains `n`.
    pub upper: Option<WeightedFamily>,
}

impl WeightedFamily {
    pub fn new(family: SubsetFamily, weights: BTreeMap<Subset, Weight>) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::InvalidWeightedFamily("family is empty".into()));
        }
        if !family.is_hereditary() {
            return Err(Error::InvalidWeightedFamily(format!(
                "{family} is not hereditary"
            )));
        }
        if !family.is_compressed() {
            return Err(Error::InvalidWeightedFamily(format!(
                "{family} is not compressed"
            )));
        }
        for s in family.iter() {
            match weights.get(&s) {
                None => {
                    return Err(Error::InvalidWeightedFamily(format!("no weight for {s}")))
                }
                Some(w) if !w.is_positive() => {
                    return Err(Error::InvalidWeightedFamily(format!(
                        "weight {w} of {s} is not positive"
                    )))
                }
                _ => {}
            }
        }
        if let Some(extra) = weights.keys().find(|s| !family.contains(**s)) {
            return Err(Error::InvalidWeightedFamily(format!(
                "weight given for non-member {extra}"
            )));
        }
        Ok(WeightedFamily { family, weights })
    }

    pub fn from_fn<F: FnMut(Subset) -> Weight>(family: SubsetFamily, mut f: F) -> Result<Self> {
        let weights = family.iter().map(|s| (s, f(s))).collect();
        Self::new(family, weights)
    }

    pub fn family(&self) -> &SubsetFamily {
        &self.family
    }

    pub fn universe(&self) -> usize {
        self.family.universe()
    }

    pub fn weights(&self) -> &BTreeMap<Subset, Weight> {
        &self.weights
    }

    /// Weight of a member. Panics for non-members.
    pub fn weight(&self, s: Subset) -> &Weight {
        &self.weights[&s]
    }

    pub fn check_conditions(&self) -> ConditionReport {
        let mut report = ConditionReport::default();
        let two = weight_from_ratio(2, 1);
        for a in self.family.iter() {
            for b in self.family.iter() {
                if a.is_proper_subset(b) && self.weight(a) < &(&two * self.weight(b)) {
                    report.halving.push((a, b));
                }
            }
        }
        for c in self.family.iter() {
            for (i, j) in left_pairs(self.universe()) {
                let d = delta(i, j, c);
                if d != c && self.weight(d) < self.weight(c) {
                    report.shifting.push((i, j, c));
                }
            }
        }
        report
    }

    /// Total weight of a subfamily; zero for the empty subfamily.
    pub fn family_weight(&self, sub: &SubsetFamily) -> Result<Weight> {
        let mut total = Weight::zero();
        for s in sub.iter() {
            match self.weights.get(&s) {
                Some(w) => total += w,
                None => return Err(Error::NotAMember(s.to_string())),
            }
        }
        Ok(total)
    }

    /// Total weight of the members selected by `pick`.
    pub fn weight_where<F: Fn(Subset) -> bool>(&self, pick: F) -> Weight {
        self.weights
            .iter()
            .filter(|(s, _)| pick(**s))
            .fold(Weight::zero(), |acc, (_, w)| acc + w)
    }

    pub fn star_of(&self, a: usize) -> SubsetFamily {
        self.family.star(a)
    }

    pub fn star_weight(&self, a: usize) -> Weight {
        self.weight_where(|s| s.contains(a))
    }

    pub fn total_weight(&self) -> Weight {
        self.weight_where(|_| true)
    }

    /// Restriction of the weights to a hereditary compressed subfamily.
    pub fn restrict(&self, sub: &SubsetFamily) -> Result<Self> {
        let weights = sub
            .iter()
            .map(|s| {
                self.weights
                    .get(&s)
                    .cloned()
                    .map(|w| (s, w))
                    .ok_or_else(|| Error::NotAMember(s.to_string()))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Self::new(sub.clone(), weights)
    }

    /// Splits off the top element `n` of the universe.
    pub fn split_at_top(&self) -> Result<TopSplit> {
        let n = self.universe();
        if n < 2 {
            return Err(Error::UniverseTooSmall {
                size: n,
                reason: "splitting needs a universe of at least 2 elements",
            });
        }
        let mut lower = BTreeMap::new();
        let mut upper = BTreeMap::new();
        for (s, w) in &self.weights {
            if s.contains(n) {
                upper.insert(s.without(n), w.clone());
            } else {
                lower.insert(*s, w.clone());
            }
        }
        let lower_family = SubsetFamily::new(n - 1, lower.keys().copied())?;
        let lower = WeightedFamily::new(lower_family, lower)?;
        let upper = if upper.is_empty() {
            None
        } else {
            let fam = SubsetFamily::new(n - 1, upper.keys().copied())?;
            Some(WeightedFamily::new(fam, upper)?)
        };
        Ok(TopSplit { lower, upper })
    }
}

/// `(S_0, S_1)` with `S_0 = {S : n ∉ S}` and `S_1 = {S \ {n} : n ∈ S}`, both
/// over `[n - 1]`.
pub fn split_family(f: &SubsetFamily) -> Result<(SubsetFamily, SubsetFamily)> {
    let n = f.universe();
    if n == 0 {
        return Err(Error::UniverseTooSmall {
            size: 0,
            reason: "nothing to split off",
        });
    }
    let low = SubsetFamily::new(n - 1, f.iter().filter(|s| !s.contains(n)))?;
    let high = SubsetFamily::new(n - 1, f.iter().filter(|s| s.contains(n)).map(|s| s.without(n)))?;
    Ok((low, high))
}

/// Number of labeled sets in `L_c^(r)` whose value-1 pairs are exactly
/// `A x {1}`: `e_{r-|A|}` over `c_e - 1` for `e ∉ A`. Zero when `|A| > r`.
pub fn lemma_weight(caps: &IpSequence, rank: usize, a: Subset) -> Result<BigUint> {
    if !a.fits(caps.len()) {
        return Err(Error::ElementOutOfRange {
            element: a.max_element(),
            universe: caps.len(),
        });
    }
    if a.len() > rank {
        return Ok(BigUint::zero());
    }
    let rest = (1..=caps.len())
        .filter(|&e| !a.contains(e))
        .map(|e| u64::from(caps.cap(e) - 1));
    Ok(elementary_symmetric(rest, rank - a.len()))
}

/// The value-one-layer weights on `C([n], <= r)`.
pub fn lemma_weighted_family(caps: &IpSequence, rank: usize) -> Result<WeightedFamily> {
    if rank == 0 || rank > caps.len() {
        return Err(Error::InvalidRank {
            rank,
            len: caps.len(),
        });
    }
    let family = SubsetFamily::up_to_size(caps.len(), rank)?;
    lemma_weights_on(&family, caps, rank)
}

/// The value-one-layer weights restricted to `family`, which must live in
/// `C([n], <= r)` with `n = caps.len()`.
pub fn lemma_weights_on(family: &SubsetFamily, caps: &IpSequence, rank: usize) -> Result<WeightedFamily> {
    if family.universe() != caps.len() {
        return Err(Error::UniverseMismatch {
            left: family.universe(),
            right: caps.len(),
        });
    }
    let mut weights = BTreeMap::new();
    for s in family.iter() {
        weights.insert(s, weight_from_uint(&lemma_weight(caps, rank, s)?));
    }
    WeightedFamily::new(family.clone(), weights)
}

/// `w(A) = prod_{a ∈ A} u_a` for the given factors `u_1, .., u_n`.
pub fn product_weights(family: &SubsetFamily, factors: &[Weight]) -> Result<WeightedFamily> {
    if factors.len() < family.universe() {
        return Err(Error::InvalidWeightedFamily(format!(
            "{} factors for a universe of {}",
            factors.len(),
            family.universe()
        )));
    }
    WeightedFamily::from_fn(family.clone(), |s| {
        s.elements()
            .fold(Weight::one(), |acc, e| acc * &factors[e - 1])
    })
}

/// Seeded nonincreasing factors in `(0, 1/2]`.
pub fn random_factors(n: usize, seed: u64) -> Vec<Weight> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors: Vec<Weight> = (0..n)
        .map(|_| {
            let den: i64 = rng.gen_range(2..=16);
            let num: i64 = rng.gen_range(1..=den / 2);
            weight_from_ratio(num, den)
        })
        .collect();
    factors.sort_by(|a, b| b.cmp(a));
    factors
}

/// Product-form weights with seeded factors `u_1 >= u_2 >= ..` in `(0, 1/2]`.
///
/// Each extra element multiplies by at most 1/2, which gives (a); replacing
/// `j` by a smaller `i` swaps `u_j` for `u_i >= u_j`, which gives (b).
pub fn random_product_weights(family: &SubsetFamily, seed: u64) -> Result<WeightedFamily> {
    if !family.is_hereditary() || !family.is_compressed() {
        return Err(Error::InvalidWeightedFamily(format!(
            "{family} must be hereditary and compressed"
        )));
    }
    product_weights(family, &random_factors(family.universe(), seed))
}

/// Largest universe [`enumerate_hereditary_compressed`] accepts.
pub const MAX_ENUMERATION_UNIVERSE: usize = 4;

/// Every non-empty hereditary compressed subfamily of `2^[m]`, each once.
///
/// Decides membership of the subsets of `[m]` in increasing mask order. Both
/// the immediate subsets of `S` and its left-shifts have smaller masks, so
/// when `S` is reached every set it depends on has already been decided.
pub fn enumerate_hereditary_compressed(m: usize) -> Result<Vec<SubsetFamily>> {
    if m > MAX_ENUMERATION_UNIVERSE {
        return Err(Error::UniverseTooLarge {
            size: m,
            max: MAX_ENUMERATION_UNIVERSE,
            reason: "the number of families grows doubly exponentially",
        });
    }
    let total = 1u64 << m;
    let mut out = Vec::new();
    let mut chosen = vec![false; total as usize];
    decide(m, 0, &mut chosen, &mut out);
    Ok(out)
}

fn decide(m: usize, mask: u64, chosen: &mut Vec<bool>, out: &mut Vec<SubsetFamily>) {
    if mask == chosen.len() as u64 {
        if chosen[0] {
            let members = (0..mask).filter(|&s| chosen[s as usize]).map(Subset::from_mask);
            out.push(SubsetFamily::new(m, members).expect("fits"));
        }
        return;
    }
    let s = Subset::from_mask(mask);
    let allowed = s.elements().all(|e| chosen[s.without(e).mask() as usize])
        && s.elements().all(|j| {
            (1..j)
                .filter(|&i| !s.contains(i))
                .all(|i| chosen[delta(i, j, s).mask() as usize])
        });
    chosen[mask as usize] = false;
    decide(m, mask + 1, chosen, out);
    if allowed {
        chosen[mask as usize] = true;
        decide(m, mask + 1, chosen, out);
        chosen[mask as usize] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(c: &[u32]) -> IpSequence {
        IpSequence::new(c.to_vec()).unwrap()
    }

    fn s(e: &[usize]) -> Subset {
        Subset::from_elements(e.iter().copied())
    }

    fn q(n: i64, d: i64) -> Weight {
        weight_from_ratio(n, d)
    }

    #[test]
    fn lemma_weight_examples() {
        let c = ip(&[3, 3, 3]);
        assert_eq!(lemma_weight(&c, 2, s(&[1])).unwrap(), 4u32.into());
        assert_eq!(lemma_weight(&c, 2, s(&[1, 2])).unwrap(), 1u32.into());
        assert_eq!(lemma_weight(&c, 2, s(&[])).unwrap(), 12u32.into());
        assert_eq!(lemma_weight(&c, 2, s(&[1, 2, 3])).unwrap(), 0u32.into());
        let wf = lemma_weighted_family(&c, 2).unwrap();
        assert_eq!(wf.total_weight(), q(27, 1));
    }

    #[test]
    fn conditions_hold_for_lemma_weights() {
        let wf = lemma_weighted_family(&ip(&[3, 3, 3]), 2).unwrap();
        assert!(wf.check_conditions().is_clean());
    }

    #[test]
    fn conditions_report_violations() {
        let fam = SubsetFamily::from_lists(2, &[&[], &[1], &[2]]);
        let weights = BTreeMap::from([(s(&[]), q(4, 1)), (s(&[1]), q(1, 1)), (s(&[2]), q(3, 1))]);
        let wf = WeightedFamily::new(fam, weights).unwrap();
        let report = wf.check_conditions();
        assert_eq!(report.shifting, vec![(1, 2, s(&[2]))]);
        // 4 < 2 * 3 as well
        assert_eq!(report.halving, vec![(s(&[]), s(&[2]))]);
    }

    #[test]
    fn family_weight_examples() {
        let wf = lemma_weighted_family(&ip(&[3, 3, 3]), 2).unwrap();
        assert_eq!(wf.family_weight(&SubsetFamily::empty(3)).unwrap(), Weight::zero());
        assert_eq!(wf.family_weight(wf.family()).unwrap(), q(27, 1));
        let star = wf.star_of(1);
        assert_eq!(star, SubsetFamily::from_lists(3, &[&[1], &[1, 2], &[1, 3]]));
        assert_eq!(wf.family_weight(&star).unwrap(), q(6, 1));
        let bad = SubsetFamily::from_lists(3, &[&[1, 2, 3]]);
        assert!(matches!(wf.family_weight(&bad), Err(Error::NotAMember(_))));
    }

    #[test]
    fn star_weight_examples() {
        let wf = lemma_weighted_family(&ip(&[3, 4, 5]), 2).unwrap();
        assert!(wf.star_weight(1) >= wf.star_weight(3));
        let wf = product_weights(&SubsetFamily::power_set(2).unwrap(), &[q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(wf.star_weight(1), wf.star_weight(2));
        let small = lemma_weighted_family(&ip(&[3, 3]), 1).unwrap();
        assert!(small.star_of(5).is_empty());
        assert_eq!(small.star_weight(5), Weight::zero());
    }

    #[test]
    fn split_examples() {
        let wf = lemma_weighted_family(&ip(&[3, 3]), 2).unwrap();
        let split = wf.split_at_top().unwrap();
        let lower_family = SubsetFamily::from_lists(1, &[&[], &[1]]);
        assert_eq!(split.lower.family(), &lower_family);
        let upper = split.upper.clone().unwrap();
        assert_eq!(upper.family(), &lower_family);
        assert_eq!(upper.weight(s(&[1])), wf.weight(s(&[1, 2])));
        assert_eq!(
            split.lower.total_weight() + upper.total_weight(),
            wf.total_weight()
        );
        assert!(split.lower.check_conditions().is_clean());
        assert!(upper.check_conditions().is_clean());

        let no_top = lemma_weights_on(&SubsetFamily::from_lists(2, &[&[], &[1]]), &ip(&[3, 3]), 2).unwrap();
        assert_eq!(no_top.split_at_top().unwrap().upper, None);

        let tiny = lemma_weighted_family(&ip(&[3]), 1).unwrap();
        assert!(matches!(tiny.split_at_top(), Err(Error::UniverseTooSmall { .. })));
    }

    #[test]
    fn split_star_identity() {
        let wf = lemma_weighted_family(&ip(&[3, 3, 4]), 2).unwrap();
        let split = wf.split_at_top().unwrap();
        let upper = split.upper.unwrap();
        assert_eq!(
            wf.star_weight(1),
            split.lower.star_weight(1) + upper.star_weight(1)
        );
    }

    #[test]
    fn product_weight_examples() {
        let f = SubsetFamily::power_set(2).unwrap();
        let wf = product_weights(&f, &[q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(wf.weight(s(&[1, 2])), &q(1, 4));
        let wf = product_weights(&f, &[q(1, 2), q(1, 3)]).unwrap();
        assert_eq!(wf.weight(s(&[])), &q(1, 1));
        assert_eq!(wf.weight(s(&[1])), &q(1, 2));
        assert_eq!(wf.weight(s(&[2])), &q(1, 3));
        assert_eq!(wf.weight(s(&[1, 2])), &q(1, 6));
        assert!(wf.check_conditions().is_clean());
    }

    #[test]
    fn random_product_weights_are_sound_and_seeded() {
        let f = SubsetFamily::power_set(3).unwrap();
        for seed in 0..100 {
            let wf = random_product_weights(&f, seed).unwrap();
            assert!(wf.check_conditions().is_clean(), "seed {seed}");
            assert_eq!(wf, random_product_weights(&f, seed).unwrap());
        }
        let bad = SubsetFamily::from_lists(2, &[&[], &[2]]);
        assert!(random_product_weights(&bad, 0).is_err());
    }

    #[test]
    fn hereditary_compressed_small_counts() {
        let one = enumerate_hereditary_compressed(1).unwrap();
        assert_eq!(
            one,
            vec![
                SubsetFamily::from_lists(1, &[&[]]),
                SubsetFamily::from_lists(1, &[&[], &[1]]),
            ]
        );
        for m in 0..=4 {
            for f in enumerate_hereditary_compressed(m).unwrap() {
                assert!(f.is_hereditary() && f.is_compressed() && !f.is_empty());
            }
        }
        assert!(matches!(
            enumerate_hereditary_compressed(5),
            Err(Error::UniverseTooLarge { .. })
        ));
    }

    #[test]
    fn weighted_family_rejects_bad_input() {
        let f = SubsetFamily::from_lists(2, &[&[], &[2]]);
        assert!(WeightedFamily::from_fn(f, |_| q(1, 1)).is_err());
        let f = SubsetFamily::power_set(1).unwrap();
        assert!(WeightedFamily::from_fn(f.clone(), |_| q(0, 1)).is_err());
        assert!(WeightedFamily::from_fn(SubsetFamily::empty(2), |_| q(1, 1)).is_err());
        let mut w = BTreeMap::from([(s(&[]), q(1, 1))]);
        assert!(WeightedFamily::new(f.clone(), w.clone()).is_err());
        w.insert(s(&[1]), q(1, 2));
        w.insert(s(&[2]), q(1, 2));
        assert!(WeightedFamily::new(f, w).is_err());
    }
}
