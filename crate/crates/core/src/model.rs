//! Ground objects: cap vectors, spaces of partial sequences, labeled sets,
//! stars and the counting formulas behind the product bounds.
//!
//! Positions and values are 1-based throughout the public API, so the pair
//! `(2, 3)` in a labeled set means "position 2 carries value 3". Value 0 in a
//! sequence entry means the position is absent.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use std::fmt;

/// An increasing positive cap vector `c = (c_1, .., c_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IpSequence {
    caps: Vec<u32>,
}

impl IpSequence {
    pub fn new(caps: Vec<u32>) -> Result<Self> {
        if caps.is_empty() {
            return Err(Error::EmptyCaps);
        }
        for (i, &c) in caps.iter().enumerate() {
            if c == 0 {
                return Err(Error::ZeroCap {
                    position: i + 1,
                    cap: c,
                });
            }
        }
        for (i, w) in caps.windows(2).enumerate() {
            if w[0] > w[1] {
                return Err(Error::NotIncreasing {
                    position: i + 1,
                    prev: w[0],
                    next: w[1],
                });
            }
        }
        Ok(IpSequence { caps })
    }

    pub fn len(&self) -> usize {
        self.caps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.caps.is_empty()
    }

    /// Cap at 1-based `position`.
    pub fn cap(&self, position: usize) -> u32 {
        self.caps[position - 1]
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn first(&self) -> u32 {
        self.caps[0]
    }

    pub fn last(&self) -> u32 {
        self.caps[self.caps.len() - 1]
    }

    fn check_rank(&self, rank: usize) -> Result<()> {
        if rank == 0 || rank > self.len() {
            return Err(Error::InvalidRank {
                rank,
                len: self.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for IpSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.caps)
    }
}

fn write_tuple(f: &mut fmt::Formatter<'_>, xs: &[u32]) -> fmt::Result {
    write!(f, "(")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, ")")
}

/// A sequence of non-negative entries; zero marks an absent position.
///
/// The derived ordering is lexicographic on entries, which is the canonical
/// enumeration order of a [`Space`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialSequence {
    entries: Vec<u32>,
}

impl PartialSequence {
    /// Wraps raw entries without checking them against any space.
    pub fn from_entries(entries: Vec<u32>) -> Self {
        PartialSequence { entries }
    }

    /// Builds a member of `S_c^(r)`, rejecting anything outside it.
    pub fn in_space(caps: &IpSequence, rank: usize, entries: Vec<u32>) -> Result<Self> {
        caps.check_rank(rank)?;
        let s = PartialSequence { entries };
        s.validate(caps, rank)?;
        Ok(s)
    }

    pub fn validate(&self, caps: &IpSequence, rank: usize) -> Result<()> {
        if self.entries.len() != caps.len() {
            return Err(Error::LengthMismatch {
                expected: caps.len(),
                found: self.entries.len(),
            });
        }
        for (i, (&a, &c)) in self.entries.iter().zip(caps.caps()).enumerate() {
            if a > c {
                return Err(Error::InvalidValue {
                    position: i + 1,
                    value: a,
                    cap: c,
                });
            }
        }
        if self.rank() != rank {
            return Err(Error::WrongRank {
                expected: rank,
                found: self.rank(),
            });
        }
        Ok(())
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry at 1-based `position`, zero beyond the end.
    pub fn entry(&self, position: usize) -> u32 {
        self.entries.get(position - 1).copied().unwrap_or(0)
    }

    /// Number of nonzero entries.
    pub fn rank(&self) -> usize {
        self.entries.iter().filter(|&&a| a != 0).count()
    }

    /// True iff the two sequences agree on some nonzero entry. Sequences of
    /// different lengths are compared up to the shorter one.
    pub fn meets(&self, other: &PartialSequence) -> bool {
        meets(self, other)
    }

    pub fn to_labeled(&self) -> LabeledSet {
        to_labeled(self)
    }
}

impl fmt::Display for PartialSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.entries)
    }
}

pub fn meets(a: &PartialSequence, b: &PartialSequence) -> bool {
    a.entries
        .iter()
        .zip(&b.entries)
        .any(|(&x, &y)| x != 0 && x == y)
}

/// A set of `(position, value)` pairs with distinct positions and values >= 1.
///
/// Pairs are kept sorted by position, so equality and ordering are structural.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledSet {
    pairs: Vec<(usize, u32)>,
}

impl LabeledSet {
    pub fn new<I: IntoIterator<Item = (usize, u32)>>(pairs: I) -> Result<Self> {
        let mut pairs: Vec<(usize, u32)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        for &(p, v) in &pairs {
            if p == 0 {
                return Err(Error::MalformedLabeledSet("position 0".into()));
            }
            if v == 0 {
                return Err(Error::MalformedLabeledSet(format!(
                    "value 0 at position {p}"
                )));
            }
        }
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::MalformedLabeledSet(format!(
                "duplicate position {}",
                w[0].0
            )));
        }
        Ok(LabeledSet { pairs })
    }

    pub fn empty() -> Self {
        LabeledSet { pairs: Vec::new() }
    }

    pub fn pairs(&self) -> &[(usize, u32)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, pair: (usize, u32)) -> bool {
        self.value_at(pair.0) == Some(pair.1)
    }

    pub fn value_at(&self, position: usize) -> Option<u32> {
        self.pairs
            .binary_search_by_key(&position, |&(p, _)| p)
            .ok()
            .map(|i| self.pairs[i].1)
    }

    /// Returns a copy with the value at `position` replaced. The position must
    /// already carry a pair.
    pub(crate) fn with_value(&self, position: usize, value: u32) -> LabeledSet {
        let mut pairs = self.pairs.clone();
        let i = pairs
            .binary_search_by_key(&position, |&(p, _)| p)
            .expect("position present");
        pairs[i].1 = value;
        LabeledSet { pairs }
    }

    pub fn intersects(&self, other: &LabeledSet) -> bool {
        self.common_pairs(other).next().is_some()
    }

    /// Pairs present in both sets, in position order.
    pub fn common_pairs<'a>(
        &'a self,
        other: &'a LabeledSet,
    ) -> impl Iterator<Item = (usize, u32)> + 'a {
        self.pairs
            .iter()
            .copied()
            .filter(move |&pair| other.contains(pair))
    }

    /// True iff every pair sits inside the cap vector.
    pub fn fits(&self, caps: &IpSequence) -> bool {
        self.pairs
            .iter()
            .all(|&(p, v)| p <= caps.len() && v <= caps.cap(p))
    }

    pub fn support(&self) -> BTreeSet<usize> {
        support(self)
    }
}

impl fmt::Display for LabeledSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (p, v)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({p},{v})")?;
        }
        write!(f, "}}")
    }
}

pub fn to_labeled(a: &PartialSequence) -> LabeledSet {
    LabeledSet {
        pairs: a
            .entries
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| (i + 1, v))
            .collect(),
    }
}

pub fn from_labeled(l: &LabeledSet, n: usize) -> Result<PartialSequence> {
    let mut entries = vec![0; n];
    for &(p, v) in &l.pairs {
        if p > n {
            return Err(Error::InvalidPosition { position: p, len: n });
        }
        entries[p - 1] = v;
    }
    Ok(PartialSequence { entries })
}

/// Positions that carry a pair.
pub fn support(l: &LabeledSet) -> BTreeSet<usize> {
    l.pairs.iter().map(|&(p, _)| p).collect()
}

/// Every member of `S_c^(r)` in lexicographic order.
pub fn enumerate_space(caps: &IpSequence, rank: usize) -> Result<Vec<PartialSequence>> {
    caps.check_rank(rank)?;
    let mut out = Vec::new();
    let mut cur = vec![0u32; caps.len()];
    fill(caps.caps(), rank, 0, &mut cur, &mut out);
    Ok(out)
}

fn fill(caps: &[u32], left: usize, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<PartialSequence>) {
    if pos == caps.len() {
        if left == 0 {
            out.push(PartialSequence {
                entries: cur.clone(),
            });
        }
        return;
    }
    let remaining = caps.len() - pos;
    if left < remaining {
        cur[pos] = 0;
        fill(caps, left, pos + 1, cur, out);
    }
    if left > 0 {
        for v in 1..=caps[pos] {
            cur[pos] = v;
            fill(caps, left - 1, pos + 1, cur, out);
        }
        cur[pos] = 0;
    }
}

/// `e_k(values)`: the sum over all k-subsets of the product of their members.
pub fn elementary_symmetric<I>(values: I, k: usize) -> BigUint
where
    I: IntoIterator<Item = u64>,
{
    let mut e: Vec<BigUint> = vec![BigUint::zero(); k + 1];
    e[0] = BigUint::one();
    for v in values {
        for j in (1..=k).rev() {
            let add = &e[j - 1] * v;
            e[j] += add;
        }
    }
    e.swap_remove(k)
}

/// `|S_c^(r)|`.
pub fn space_size(caps: &IpSequence, rank: usize) -> Result<BigUint> {
    caps.check_rank(rank)?;
    Ok(elementary_symmetric(caps.caps().iter().map(|&c| c as u64), rank))
}

/// Size of the star `{a in S_c^(r) : a_p = q}`; independent of `q`.
pub fn star_size(caps: &IpSequence, rank: usize, position: usize) -> Result<BigUint> {
    caps.check_rank(rank)?;
    check_position(caps, position)?;
    Ok(elementary_symmetric(
        caps.caps()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i + 1 != position)
            .map(|(_, &c)| c as u64),
        rank - 1,
    ))
}

fn check_position(caps: &IpSequence, position: usize) -> Result<()> {
    if position == 0 || position > caps.len() {
        return Err(Error::InvalidPosition {
            position,
            len: caps.len(),
        });
    }
    Ok(())
}

/// The star `{a in S_c^(r) : a_p = q}`, in canonical order.
pub fn star(caps: &IpSequence, rank: usize, position: usize, value: u32) -> Result<Vec<PartialSequence>> {
    caps.check_rank(rank)?;
    check_position(caps, position)?;
    if value == 0 || value > caps.cap(position) {
        return Err(Error::InvalidValue {
            position,
            value,
            cap: caps.cap(position),
        });
    }
    Ok(enumerate_space(caps, rank)?
        .into_iter()
        .filter(|a| a.entry(position) == value)
        .collect())
}

/// Product over the given spaces of the star sizes at centre `(1, 1)`.
///
/// For two equal full-rank spaces this is `(|S_c| / c_1)^2`.
pub fn theorem_bound(spaces: &[(IpSequence, usize)]) -> Result<BigUint> {
    let mut acc = BigUint::one();
    for (caps, rank) in spaces {
        acc *= star_size(caps, *rank, 1)?;
    }
    Ok(acc)
}

/// `s mod* t`: the usual residue, except that multiples of `t` map to `t`.
pub fn mod_star(s: usize, t: usize) -> usize {
    assert!(t > 0);
    match s % t {
        0 => t,
        r => r,
    }
}

/// The pairing `(1,2), (3,4), .., (2k-1, 2k)` taken `mod* k`, as 1-based
/// index pairs. Each index appears exactly twice and every pair is of
/// distinct indices, so pairwise bounds `x_i x_j <= y_i y_j` multiply out to
/// `(prod x)^2 <= (prod y)^2`.
pub fn cyclic_pairing(k: usize) -> Vec<(usize, usize)> {
    assert!(k >= 2);
    (1..=k)
        .map(|t| (mod_star(2 * t - 1, k), mod_star(2 * t, k)))
        .collect()
}

/// Checks `prod x <= prod y` by multiplying the pairwise bounds along
/// [`cyclic_pairing`]. Returns `None` if some pairwise hypothesis fails.
pub fn product_bound_from_pairs(x: &[BigUint], y: &[BigUint]) -> Option<bool> {
    let k = x.len();
    assert_eq!(k, y.len());
    assert!(k >= 2);
    for i in 0..k {
        for j in 0..k {
            if i != j && &x[i] * &x[j] > &y[i] * &y[j] {
                return None;
            }
        }
    }
    let mut lhs = BigUint::one();
    let mut rhs = BigUint::one();
    for (i, j) in cyclic_pairing(k) {
        lhs *= &x[i - 1] * &x[j - 1];
        rhs *= &y[i - 1] * &y[j - 1];
    }
    Some(lhs <= rhs)
}

/// A space `S_c^(r)` together with its canonical enumeration.
#[derive(Clone, Debug)]
pub struct Space {
    caps: IpSequence,
    rank: usize,
    members: Vec<PartialSequence>,
}

impl Space {
    pub fn new(caps: IpSequence, rank: usize) -> Result<Self> {
        let members = enumerate_space(&caps, rank)?;
        Ok(Space {
            caps,
            rank,
            members,
        })
    }

    /// The full-rank space `S_c`.
    pub fn full(caps: IpSequence) -> Result<Self> {
        let n = caps.len();
        Self::new(caps, n)
    }

    pub fn caps(&self) -> &IpSequence {
        &self.caps
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[PartialSequence] {
        &self.members
    }

    pub fn get(&self, index: usize) -> &PartialSequence {
        &self.members[index]
    }

    pub fn index_of(&self, a: &PartialSequence) -> Option<usize> {
        self.members.binary_search(a).ok()
    }

    /// Indices of the star at `(position, value)`. Out-of-range centres give
    /// an empty star rather than an error, since the two sides of a pair may
    /// have different caps.
    pub fn star_indices(&self, position: usize, value: u32) -> Vec<usize> {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, a)| value != 0 && a.entry(position) == value)
            .map(|(i, _)| i)
            .collect()
    }

    /// `r = n`, i.e. the space is the Cartesian product `[c_1] x .. x [c_n]`.
    pub fn is_full_rank(&self) -> bool {
        self.rank == self.caps.len()
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S_{}^({})", self.caps, self.rank)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(c: &[u32]) -> IpSequence {
        IpSequence::new(c.to_vec()).unwrap()
    }

    fn seq(e: &[u32]) -> PartialSequence {
        PartialSequence::from_entries(e.to_vec())
    }

    #[test]
    fn rejects_bad_caps() {
        assert_eq!(IpSequence::new(vec![]), Err(Error::EmptyCaps));
        assert!(matches!(IpSequence::new(vec![2, 1]), Err(Error::NotIncreasing { .. })));
        assert!(matches!(IpSequence::new(vec![0, 1]), Err(Error::ZeroCap { .. })));
    }

    #[test]
    fn enumerate_small_spaces() {
        let s = enumerate_space(&ip(&[2, 2]), 2).unwrap();
        assert_eq!(s, vec![seq(&[1, 1]), seq(&[1, 2]), seq(&[2, 1]), seq(&[2, 2])]);

        let s = enumerate_space(&ip(&[2, 3]), 1).unwrap();
        let expect: BTreeSet<_> = [[1, 0], [2, 0], [0, 1], [0, 2], [0, 3]]
            .iter()
            .map(|e| seq(e))
            .collect();
        assert_eq!(s.len(), 5);
        assert_eq!(s.iter().cloned().collect::<BTreeSet<_>>(), expect);
        // lexicographic
        assert_eq!(s[0], seq(&[0, 1]));

        assert_eq!(enumerate_space(&ip(&[3, 3, 3]), 2).unwrap().len(), 27);
    }

    #[test]
    fn invalid_rank() {
        assert!(matches!(
            enumerate_space(&ip(&[3, 3]), 0),
            Err(Error::InvalidRank { rank: 0, len: 2 })
        ));
        assert!(matches!(enumerate_space(&ip(&[3, 3]), 3), Err(Error::InvalidRank { .. })));
    }

    #[test]
    fn meets_examples() {
        assert!(meets(&seq(&[1, 2]), &seq(&[1, 3])));
        assert!(!meets(&seq(&[1, 0]), &seq(&[0, 1])));
        assert!(meets(&seq(&[0, 2, 1]), &seq(&[3, 2, 0])));
        // different lengths: only the common prefix counts
        assert!(!meets(&seq(&[1, 2]), &seq(&[2, 1, 2])));
        assert!(meets(&seq(&[1, 2, 3]), &seq(&[2, 2])));
    }

    #[test]
    fn labeled_examples() {
        let l = to_labeled(&seq(&[1, 0, 2]));
        assert_eq!(l.pairs(), &[(1, 1), (3, 2)]);
        assert_eq!(from_labeled(&LabeledSet::empty(), 3).unwrap(), seq(&[0, 0, 0]));
        let l = to_labeled(&seq(&[2, 3]));
        assert_eq!(l.pairs(), &[(1, 2), (2, 3)]);
        assert_eq!(from_labeled(&l, 2).unwrap(), seq(&[2, 3]));
    }

    #[test]
    fn labeled_rejects_duplicates() {
        assert!(matches!(
            LabeledSet::new([(1, 1), (1, 2)]),
            Err(Error::MalformedLabeledSet(_))
        ));
        assert!(LabeledSet::new([(1, 0)]).is_err());
        let l = LabeledSet::new([(4, 1)]).unwrap();
        assert!(matches!(from_labeled(&l, 3), Err(Error::InvalidPosition { .. })));
    }

    #[test]
    fn support_examples() {
        let l = LabeledSet::new([(1, 1), (3, 2)]).unwrap();
        assert_eq!(support(&l), BTreeSet::from([1, 3]));
        assert!(support(&LabeledSet::empty()).is_empty());
        assert_eq!(support(&to_labeled(&seq(&[0, 2, 1]))), BTreeSet::from([2, 3]));
    }

    #[test]
    fn star_examples() {
        assert_eq!(star(&ip(&[3, 3, 3]), 2, 1, 1).unwrap().len(), 6);
        assert_eq!(star(&ip(&[3, 4]), 2, 1, 2).unwrap().len(), 4);
        assert_eq!(star(&ip(&[2, 2]), 2, 2, 1).unwrap(), vec![seq(&[1, 1]), seq(&[2, 1])]);
        assert!(matches!(star(&ip(&[3, 4]), 2, 1, 4), Err(Error::InvalidValue { .. })));
    }

    #[test]
    fn bound_examples() {
        let c = ip(&[3, 3]);
        assert_eq!(theorem_bound(&[(c.clone(), 2), (c.clone(), 2)]).unwrap(), 9u32.into());
        let c3 = ip(&[3, 3, 3]);
        assert_eq!(theorem_bound(&[(c3.clone(), 2), (c3, 2)]).unwrap(), 36u32.into());
        assert_eq!(
            theorem_bound(&[(c.clone(), 2), (c.clone(), 2), (c, 2)]).unwrap(),
            27u32.into()
        );
    }

    #[test]
    fn mod_star_pairing() {
        assert_eq!(mod_star(6, 3), 3);
        assert_eq!(mod_star(7, 3), 1);
        assert_eq!(cyclic_pairing(3), vec![(1, 2), (3, 1), (2, 3)]);
        assert_eq!(cyclic_pairing(4), vec![(1, 2), (3, 4), (1, 2), (3, 4)]);
    }

    #[test]
    fn space_indexing() {
        let sp = Space::new(ip(&[3, 3, 3]), 2).unwrap();
        for (i, a) in sp.members().iter().enumerate() {
            assert_eq!(sp.index_of(a), Some(i));
        }
        assert_eq!(sp.star_indices(1, 1).len(), 6);
        assert!(sp.star_indices(1, 4).is_empty());
    }
}
