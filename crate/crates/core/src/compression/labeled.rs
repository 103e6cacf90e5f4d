use super::family::LabeledFamily;
use super::Meets;
use crate::error::{Error, Result};
use crate::model::LabeledSet;
use std::collections::BTreeSet;

/// `gamma_{x,y}`: relabel the pair `(x, y)` to `(x, 1)` when present.
/// With `y = 1` this is the identity.
pub fn gamma(x: usize, y: u32, l: &LabeledSet) -> LabeledSet {
    if y != 1 && l.contains((x, y)) {
        l.with_value(x, 1)
    } else {
        l.clone()
    }
}

/// `Gamma_{x,y}` on a family: a member moves to its image only when the
/// image is not already present.
pub fn gamma_family(x: usize, y: u32, f: &LabeledFamily) -> LabeledFamily {
    let members: BTreeSet<LabeledSet> = f
        .iter()
        .map(|a| {
            let g = gamma(x, y, a);
            if f.contains(&g) {
                a.clone()
            } else {
                g
            }
        })
        .collect();
    LabeledFamily::from_parts(f.caps().clone(), members)
}

/// The operator order of the full cascade: positions `1..=l`, and within each
/// position values `2..=h` ascending. This is the order in which the
/// operators are applied, i.e. right to left in the composition
/// `Gamma_{l,h} o .. o Gamma_{1,2}`.
pub fn cascade_order(l: usize, h: u32) -> Vec<(usize, u32)> {
    (1..=l)
        .flat_map(|x| (2..=h).map(move |y| (x, y)))
        .collect()
}

/// `l = max(m, n)` and `h = max(c_m, d_n)` for the two families' spaces.
pub fn cascade_extent(a: &LabeledFamily, b: &LabeledFamily) -> (usize, u32) {
    (
        a.caps().len().max(b.caps().len()),
        a.caps().last().max(b.caps().last()),
    )
}

/// Applies the full relabelling cascade to a cross-intersecting pair.
///
/// Afterwards every cross pair shares a pair carrying value 1.
pub fn gamma_cascade(a: &LabeledFamily, b: &LabeledFamily) -> Result<(LabeledFamily, LabeledFamily)> {
    if !super::is_cross_intersecting(a.iter(), b.iter()) {
        return Err(Error::NotCrossIntersecting);
    }
    let (l, h) = cascade_extent(a, b);
    let mut left = a.clone();
    let mut right = b.clone();
    for (x, y) in cascade_order(l, h) {
        left = gamma_family(x, y, &left);
        right = gamma_family(x, y, &right);
    }
    Ok((left, right))
}

/// True iff `(A ∩ B) \ V` is non-empty for every `A` in `a`, `B` in `b`.
pub fn check_avoid_intersection(
    a: &LabeledFamily,
    b: &LabeledFamily,
    avoid: &BTreeSet<(usize, u32)>,
) -> bool {
    a.iter().all(|x| {
        b.iter()
            .all(|y| x.common_pairs(y).any(|p| !avoid.contains(&p)))
    })
}

/// True iff every cross pair shares some `(i, 1)` with `i <= l`.
pub fn meets_in_value_one_layer(a: &LabeledFamily, b: &LabeledFamily, l: usize) -> bool {
    a.iter().all(|x| {
        b.iter()
            .all(|y| x.common_pairs(y).any(|(p, v)| v == 1 && p <= l))
    })
}

impl Meets for LabeledSet {
    fn meets(&self, other: &Self) -> bool {
        self.intersects(other)
    }
}
