use crate::error::{Error, Result};
use crate::model::{IpSequence, LabeledSet};
use std::collections::BTreeSet;
use std::fmt;

/// Largest ground set a [`Subset`] can live in.
pub const MAX_UNIVERSE: usize = 64;

/// A subset of `[n]` packed into a mask; element `e` is bit `e - 1`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_mask(mask: u64) -> Self {
        Subset(mask)
    }

    /// Panics on element 0 or elements above [`MAX_UNIVERSE`].
    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Self {
        let mut s = Subset::EMPTY;
        for e in elements {
            s = s.with(e);
        }
        s
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn contains(self, e: usize) -> bool {
        (1..=MAX_UNIVERSE).contains(&e) && self.0 >> (e - 1) & 1 == 1
    }

    #[inline]
    pub fn with(self, e: usize) -> Self {
        assert!((1..=MAX_UNIVERSE).contains(&e), "element {e} out of range");
        Subset(self.0 | 1 << (e - 1))
    }

    #[inline]
    pub fn without(self, e: usize) -> Self {
        if (1..=MAX_UNIVERSE).contains(&e) {
            Subset(self.0 & !(1 << (e - 1)))
        } else {
            self
        }
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: Subset) -> bool {
        self != other && self.is_subset(other)
    }

    /// Largest element, or 0 for the empty set.
    pub fn max_element(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    pub fn fits(self, n: usize) -> bool {
        self.max_element() <= n
    }

    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                return None;
            }
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b + 1)
        })
    }

    /// Sum of the elements; the potential that left-compressions decrease.
    pub fn element_sum(self) -> u64 {
        self.elements().map(|e| e as u64).sum()
    }

    /// All subsets of `self`, in increasing mask order.
    pub fn subsets(self) -> impl Iterator<Item = Subset> {
        let full = self.0;
        let mut cur = Some(0u64);
        std::iter::from_fn(move || {
            let s = cur?;
            cur = if s == full {
                None
            } else {
                Some(s.wrapping_sub(full) & full)
            };
            Some(Subset(s))
        })
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

fn check_universe(n: usize) -> Result<()> {
    if n > MAX_UNIVERSE {
        return Err(Error::UniverseTooLarge {
            size: n,
            max: MAX_UNIVERSE,
            reason: "subsets are packed into 64-bit masks",
        });
    }
    Ok(())
}

/// A family of subsets of `[n]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetFamily {
    n: usize,
    members: BTreeSet<Subset>,
}

impl SubsetFamily {
    pub fn new<I: IntoIterator<Item = Subset>>(n: usize, members: I) -> Result<Self> {
        check_universe(n)?;
        let members: BTreeSet<Subset> = members.into_iter().collect();
        if let Some(bad) = members.iter().find(|s| !s.fits(n)) {
            return Err(Error::ElementOutOfRange {
                element: bad.max_element(),
                universe: n,
            });
        }
        Ok(SubsetFamily { n, members })
    }

    /// Convenience constructor from element lists; panics on invalid input.
    pub fn from_lists(n: usize, lists: &[&[usize]]) -> Self {
        Self::new(n, lists.iter().map(|l| Subset::from_elements(l.iter().copied())))
            .expect("valid subset family")
    }

    pub fn empty(n: usize) -> Self {
        SubsetFamily {
            n,
            members: BTreeSet::new(),
        }
    }

    pub fn power_set(n: usize) -> Result<Self> {
        Self::up_to_size(n, n)
    }

    /// `C([n], <= r)`: all subsets of `[n]` with at most `r` elements.
    pub fn up_to_size(n: usize, r: usize) -> Result<Self> {
        check_universe(n)?;
        if n > 24 {
            return Err(Error::UniverseTooLarge {
                size: n,
                max: 24,
                reason: "explicit power-set listing",
            });
        }
        let members = (0u64..1 << n)
            .map(Subset)
            .filter(|s| s.len() <= r)
            .collect();
        Ok(SubsetFamily { n, members })
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.members.contains(&s)
    }

    pub fn members(&self) -> &BTreeSet<Subset> {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = Subset> + '_ {
        self.members.iter().copied()
    }

    pub fn is_subfamily_of(&self, other: &SubsetFamily) -> bool {
        self.members.is_subset(&other.members)
    }

    /// The star `F(a)`: members containing `a`.
    pub fn star(&self, a: usize) -> SubsetFamily {
        SubsetFamily {
            n: self.n,
            members: self.iter().filter(|s| s.contains(a)).collect(),
        }
    }

    /// Closed under taking subsets.
    pub fn is_hereditary(&self) -> bool {
        self.iter()
            .all(|s| s.elements().all(|e| self.contains(s.without(e))))
    }

    /// Sum over members of the element sums.
    pub fn potential(&self) -> u64 {
        self.iter().map(Subset::element_sum).sum()
    }

    pub(crate) fn from_parts(n: usize, members: BTreeSet<Subset>) -> Self {
        SubsetFamily { n, members }
    }

    /// Re-states the family over `[m]`; fails if a member does not fit.
    pub fn with_universe(&self, m: usize) -> Result<Self> {
        Self::new(m, self.iter())
    }
}

impl fmt::Debug for SubsetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.n)?;
        f.debug_set().entries(self.members.iter()).finish()
    }
}

impl fmt::Display for SubsetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// A family of labeled sets inside `L_c^(<= n)` for a cap vector `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledFamily {
    caps: IpSequence,
    members: BTreeSet<LabeledSet>,
}

impl LabeledFamily {
    pub fn new<I: IntoIterator<Item = LabeledSet>>(caps: IpSequence, members: I) -> Result<Self> {
        let members: BTreeSet<LabeledSet> = members.into_iter().collect();
        for m in &members {
            for &(p, v) in m.pairs() {
                if p > caps.len() {
                    return Err(Error::InvalidPosition {
                        position: p,
                        len: caps.len(),
                    });
                }
                if v > caps.cap(p) {
                    return Err(Error::InvalidValue {
                        position: p,
                        value: v,
                        cap: caps.cap(p),
                    });
                }
            }
        }
        Ok(LabeledFamily { caps, members })
    }

    pub fn caps(&self) -> &IpSequence {
        &self.caps
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, l: &LabeledSet) -> bool {
        self.members.contains(l)
    }

    pub fn members(&self) -> &BTreeSet<LabeledSet> {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = &LabeledSet> + Clone + '_ {
        self.members.iter()
    }

    /// Members containing the pair `(position, value)`.
    pub fn star(&self, position: usize, value: u32) -> LabeledFamily {
        LabeledFamily {
            caps: self.caps.clone(),
            members: self
                .iter()
                .filter(|l| l.contains((position, value)))
                .cloned()
                .collect(),
        }
    }

    pub(crate) fn from_parts(caps: IpSequence, members: BTreeSet<LabeledSet>) -> Self {
        LabeledFamily { caps, members }
    }
}
