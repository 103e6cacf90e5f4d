use super::family::{Subset, SubsetFamily};
use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// `delta_{i,j}`: swap `j` for `i` when `j` is present and `i` is not.
pub fn delta(i: usize, j: usize, a: Subset) -> Subset {
    if a.contains(j) && !a.contains(i) {
        a.without(j).with(i)
    } else {
        a
    }
}

/// `Delta_{i,j}` on a family: a member moves to its `delta_{i,j}` image only
/// when that image is not already in the family.
pub fn delta_family(i: usize, j: usize, f: &SubsetFamily) -> SubsetFamily {
    let members: BTreeSet<Subset> = f
        .iter()
        .map(|a| {
            let d = delta(i, j, a);
            if f.contains(d) {
                a
            } else {
                d
            }
        })
        .collect();
    SubsetFamily::from_parts(f.universe(), members)
}

/// Pairs `(i, j)` with `1 <= i < j <= n`, in lexicographic order.
pub fn left_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
}

impl SubsetFamily {
    /// Invariant under every left-compression. Uses the member-wise
    /// characterisation: `delta_{i,j}(F)` stays in the family for `i < j`.
    pub fn is_compressed(&self) -> bool {
        self.iter().all(|s| {
            s.elements().all(|j| {
                (1..j)
                    .filter(|&i| !s.contains(i))
                    .all(|i| self.contains(delta(i, j, s)))
            })
        })
    }
}

/// Result of driving a pair of families to a common left-compression fixpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixpoint {
    pub left: SubsetFamily,
    pub right: SubsetFamily,
    /// Effective `(i, j)` applications, in order.
    pub steps: Vec<(usize, usize)>,
}

/// Applies left-compressions to both families until neither changes.
///
/// Sweeps `(i, j)` lexicographically and restarts after every effective
/// application. Each effective step strictly lowers the summed potential of
/// at least one family and never raises either, so the loop terminates.
pub fn compress_pair_to_fixpoint(a: &SubsetFamily, b: &SubsetFamily) -> Result<Fixpoint> {
    compress_pair_with_order(a, b, &left_pairs(a.universe()).collect::<Vec<_>>())
}

/// Same as [`compress_pair_to_fixpoint`] with a caller-chosen sweep order.
pub fn compress_pair_with_order(
    a: &SubsetFamily,
    b: &SubsetFamily,
    order: &[(usize, usize)],
) -> Result<Fixpoint> {
    if a.universe() != b.universe() {
        return Err(Error::UniverseMismatch {
            left: a.universe(),
            right: b.universe(),
        });
    }
    let n = a.universe();
    for &(i, j) in order {
        if !(1..=n).contains(&i) || !(1..=n).contains(&j) || i >= j {
            return Err(Error::InvalidPosition {
                position: i.max(j),
                len: n,
            });
        }
    }
    let mut left = a.clone();
    let mut right = b.clone();
    let mut steps = Vec::new();
    'sweep: loop {
        for &(i, j) in order {
            let l2 = delta_family(i, j, &left);
            let r2 = delta_family(i, j, &right);
            if l2 != left || r2 != right {
                left = l2;
                right = r2;
                steps.push((i, j));
                continue 'sweep;
            }
        }
        break;
    }
    Ok(Fixpoint { left, right, steps })
}

/// Single-family version of the fixpoint cascade.
pub fn compress_to_fixpoint(f: &SubsetFamily) -> SubsetFamily {
    let mut cur = f.clone();
    'sweep: loop {
        for (i, j) in left_pairs(cur.universe()) {
            let next = delta_family(i, j, &cur);
            if next != cur {
                cur = next;
                continue 'sweep;
            }
        }
        return cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(e: &[usize]) -> Subset {
        Subset::from_elements(e.iter().copied())
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(1, 3, s(&[2, 3])), s(&[1, 2]));
        assert_eq!(delta(1, 2, s(&[1, 2])), s(&[1, 2]));
        assert_eq!(delta(2, 3, s(&[])), s(&[]));
    }

    #[test]
    fn delta_family_examples() {
        let f = SubsetFamily::from_lists(2, &[&[2]]);
        assert_eq!(delta_family(1, 2, &f), SubsetFamily::from_lists(2, &[&[1]]));

        let f = SubsetFamily::from_lists(2, &[&[1], &[2]]);
        assert_eq!(delta_family(1, 2, &f), f);

        let f = SubsetFamily::from_lists(3, &[&[3], &[1, 3], &[2]]);
        let g = delta_family(1, 3, &f);
        assert_eq!(g, SubsetFamily::from_lists(3, &[&[1], &[1, 3], &[2]]));
        assert_eq!(g.len(), f.len());
    }

    #[test]
    fn compressed_examples() {
        let f = SubsetFamily::from_lists(1, &[&[], &[1]]);
        assert!(f.is_compressed());
        assert!(!SubsetFamily::from_lists(2, &[&[2]]).is_compressed());
        let f = SubsetFamily::from_lists(3, &[&[], &[1], &[2], &[1, 2], &[3], &[1, 3]]);
        assert!(f.is_compressed());
        // exhaustive agreement with the definition
        for (i, j) in left_pairs(3) {
            assert_eq!(delta_family(i, j, &f), f);
        }
    }

    #[test]
    fn fixpoint_examples() {
        let a = SubsetFamily::from_lists(2, &[&[2]]);
        let fp = compress_pair_to_fixpoint(&a, &a).unwrap();
        assert_eq!(fp.left, SubsetFamily::from_lists(2, &[&[1]]));
        assert_eq!(fp.right, fp.left);
        assert_eq!(fp.steps, vec![(1, 2)]);

        let a = SubsetFamily::from_lists(2, &[&[1], &[2]]);
        let b = SubsetFamily::from_lists(2, &[&[1, 2]]);
        let fp = compress_pair_to_fixpoint(&a, &b).unwrap();
        assert_eq!((fp.left, fp.right), (a, b));
        assert!(fp.steps.is_empty());
    }

    #[test]
    fn fixpoint_contract_under_both_orders() {
        let a = SubsetFamily::from_lists(3, &[&[3]]);
        let b = SubsetFamily::from_lists(3, &[&[3], &[1, 3]]);
        let forward: Vec<_> = left_pairs(3).collect();
        let backward: Vec<_> = forward.iter().rev().copied().collect();
        for order in [forward, backward] {
            let fp = compress_pair_with_order(&a, &b, &order).unwrap();
            assert_eq!(fp.left, SubsetFamily::from_lists(3, &[&[1]]));
            assert_eq!(fp.left.len(), 1);
            assert_eq!(fp.right.len(), 2);
            assert!(fp.left.is_compressed() && fp.right.is_compressed());
            assert!(fp.right.contains(s(&[1])));
            assert!(super::super::is_cross_intersecting_subsets(&fp.left, &fp.right));
        }
    }

    #[test]
    fn mismatched_universes() {
        let a = SubsetFamily::from_lists(2, &[&[1]]);
        let b = SubsetFamily::from_lists(3, &[&[1]]);
        assert!(matches!(
            compress_pair_to_fixpoint(&a, &b),
            Err(Error::UniverseMismatch { left: 2, right: 3 })
        ));
    }
}
