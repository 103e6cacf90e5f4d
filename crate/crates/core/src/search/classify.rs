use super::closed::ClosedPair;
use crate::bitset::BitSet;
use crate::model::Space;
use serde::Serialize;

/// Shape of a maximizing pair over two sequence spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    /// `A` and `B` are the stars at position `position` with value `value`.
    /// `caps_minimal` records `c_p = c_1` and `d_p = d_1`.
    Star {
        position: usize,
        value: u32,
        caps_minimal: bool,
    },
    NonStar,
}

impl Classification {
    pub fn is_caps_minimal_star(&self) -> bool {
        matches!(self, Classification::Star { caps_minimal: true, .. })
    }
}

pub fn classify_maximizer(pair: &ClosedPair, left: &Space, right: &Space) -> Classification {
    let (c, d) = (left.caps(), right.caps());
    for p in 1..=c.len().min(d.len()) {
        for q in 1..=c.cap(p).min(d.cap(p)) {
            let a = BitSet::from_indices(left.len(), left.star_indices(p, q));
            if a != pair.left {
                continue;
            }
            let b = BitSet::from_indices(right.len(), right.star_indices(p, q));
            if b == pair.right {
                return Classification::Star {
                    position: p,
                    value: q,
                    caps_minimal: c.cap(p) == c.first() && d.cap(p) == d.first(),
                };
            }
        }
    }
    Classification::NonStar
}

/// Counts of star, caps-minimal star and non-star maximizers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassificationSummary {
    pub stars: usize,
    pub caps_minimal_stars: usize,
    pub non_stars: usize,
}

pub fn summarize(classes: &[Classification]) -> ClassificationSummary {
    let mut out = ClassificationSummary::default();
    for c in classes {
        match c {
            Classification::Star { caps_minimal, .. } => {
                out.stars += 1;
                if *caps_minimal {
                    out.caps_minimal_stars += 1;
                }
            }
            Classification::NonStar => out.non_stars += 1,
        }
    }
    out
}
