//! Compression calculi: left-compressions on subset families and the
//! value-relabelling operators on labeled families, with the
//! cross-intersection predicates they preserve.

mod family;
mod labeled;
mod shift;

pub use family::{LabeledFamily, Subset, SubsetFamily, MAX_UNIVERSE};
pub use labeled::{
    cascade_extent, cascade_order, check_avoid_intersection, gamma, gamma_cascade, gamma_family,
    meets_in_value_one_layer,
};
pub use shift::{
    compress_pair_to_fixpoint, compress_pair_with_order, compress_to_fixpoint, delta,
    delta_family, left_pairs, Fixpoint,
};

use crate::model::PartialSequence;

/// The "intersects" relation of whatever kind of object is being compared:
/// set intersection for subsets and labeled sets, meeting for sequences.
pub trait Meets {
    fn meets(&self, other: &Self) -> bool;
}

impl Meets for Subset {
    fn meets(&self, other: &Self) -> bool {
        self.intersects(*other)
    }
}

impl Meets for PartialSequence {
    fn meets(&self, other: &Self) -> bool {
        crate::model::meets(self, other)
    }
}

/// Every member of `a` meets every member of `b`. Vacuously true when either
/// side is empty.
pub fn is_cross_intersecting<'a, T, A, B>(a: A, b: B) -> bool
where
    T: Meets + 'a,
    A: IntoIterator<Item = &'a T>,
    B: IntoIterator<Item = &'a T> + Clone,
{
    a.into_iter()
        .all(|x| b.clone().into_iter().all(|y| x.meets(y)))
}

pub fn is_cross_intersecting_subsets(a: &SubsetFamily, b: &SubsetFamily) -> bool {
    a.iter().all(|x| b.iter().all(|y| x.intersects(y)))
}

pub fn is_cross_intersecting_labeled(a: &LabeledFamily, b: &LabeledFamily) -> bool {
    is_cross_intersecting(a.iter(), b.iter())
}
