use super::context::Context;
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::ops::ControlFlow;

/// Refusal thresholds. Searches never truncate: exceeding a limit is an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Upper bound on `|X| * |Y|` of a context.
    pub max_cells: u128,
    /// Upper bound on closed pairs visited by one enumeration, and on the
    /// tuple-space size `C^k` of a k-fold search.
    pub max_closed_pairs: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_cells: 1_000_000,
            max_closed_pairs: 50_000_000,
        }
    }
}

impl Budget {
    pub fn check_cells(&self, ctx: &Context) -> Result<()> {
        if ctx.cells() > self.max_cells {
            return Err(Error::BudgetExceeded {
                what: "relation cells",
                needed: ctx.cells(),
                limit: self.max_cells,
            });
        }
        Ok(())
    }
}

/// `(A, B)` with `B = N(A)` and `A = N(B)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClosedPair {
    pub left: BitSet,
    pub right: BitSet,
}

impl ClosedPair {
    /// `|A| * |B|`.
    pub fn product(&self) -> u128 {
        self.left.count() as u128 * self.right.count() as u128
    }

    /// The report ordering: lexicographic on the sorted left extent, then on
    /// the right extent.
    pub fn report_cmp(&self, other: &ClosedPair) -> Ordering {
        self.left
            .to_vec()
            .cmp(&other.left.to_vec())
            .then_with(|| self.right.to_vec().cmp(&other.right.to_vec()))
    }
}

/// Closed pairs in lectic order of their left extents (NextClosure).
///
/// Yields `Err` once and then stops if the budget's closed-pair ceiling is hit.
pub struct ClosedPairs<'a> {
    ctx: &'a Context,
    next: Option<BitSet>,
    emitted: u128,
    limit: u128,
    failed: bool,
}

impl Iterator for ClosedPairs<'_> {
    type Item = Result<ClosedPair>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let current = self.next.take()?;
        if self.emitted >= self.limit {
            self.failed = true;
            return Some(Err(Error::BudgetExceeded {
                what: "closed pairs",
                needed: self.emitted + 1,
                limit: self.limit,
            }));
        }
        self.emitted += 1;
        self.next = next_closure(self.ctx, &current);
        let right = self.ctx.common_right(&current);
        Some(Ok(ClosedPair {
            left: current,
            right,
        }))
    }
}

fn next_closure(ctx: &Context, current: &BitSet) -> Option<BitSet> {
    let n = ctx.left_len();
    let mut a = current.clone();
    for i in (0..n).rev() {
        if a.contains(i) {
            a.remove(i);
        } else {
            let mut with_i = a.clone();
            with_i.insert(i);
            let closed = ctx.close_left(&with_i);
            if closed.agrees_below(&a, i) {
                return Some(closed);
            }
        }
    }
    None
}

/// Streams every closed pair exactly once, in lectic order of the left side.
pub fn enumerate_closed_pairs<'a>(ctx: &'a Context, budget: &Budget) -> Result<ClosedPairs<'a>> {
    budget.check_cells(ctx)?;
    Ok(ClosedPairs {
        ctx,
        next: Some(ctx.close_left(&BitSet::empty(ctx.left_len()))),
        emitted: 0,
        limit: budget.max_closed_pairs,
        failed: false,
    })
}

/// Collects [`enumerate_closed_pairs`] into a vector.
pub fn closed_pairs(ctx: &Context, budget: &Budget) -> Result<Vec<ClosedPair>> {
    enumerate_closed_pairs(ctx, budget)?.collect()
}

/// Depth-first closed-pair enumeration (Close-by-One).
///
/// The visitor sees each closed pair once, with the smallest left element a
/// descendant may still add; returning `ControlFlow::Break(())` skips that
/// pair's subtree. Every descendant `(A', B')` of `(A, B)` satisfies
/// `A ⊆ A'`, `B' ⊆ B`, and `A' \ A ⊆ {start, ..}`, which is what pruning
/// callers rely on.
pub fn visit_closed_pairs<F>(ctx: &Context, budget: &Budget, mut visit: F) -> Result<u128>
where
    F: FnMut(&BitSet, &BitSet, usize) -> ControlFlow<()>,
{
    budget.check_cells(ctx)?;
    let right = BitSet::full(ctx.right_len());
    let left = ctx.common_left(&right);
    let mut seen = 0u128;
    cbo(ctx, left, right, 0, budget.max_closed_pairs, &mut seen, &mut visit)?;
    Ok(seen)
}

fn cbo<F>(
    ctx: &Context,
    left: BitSet,
    right: BitSet,
    start: usize,
    limit: u128,
    seen: &mut u128,
    visit: &mut F,
) -> Result<()>
where
    F: FnMut(&BitSet, &BitSet, usize) -> ControlFlow<()>,
{
    if *seen >= limit {
        return Err(Error::BudgetExceeded {
            what: "closed pairs",
            needed: *seen + 1,
            limit,
        });
    }
    *seen += 1;
    if visit(&left, &right, start).is_break() {
        return Ok(());
    }
    for j in start..ctx.left_len() {
        if left.contains(j) {
            continue;
        }
        let next_right = right.intersection(ctx.row(j));
        let next_left = ctx.common_left(&next_right);
        if next_left.agrees_below(&left, j) {
            cbo(ctx, next_left, next_right, j + 1, limit, seen, visit)?;
        }
    }
    Ok(())
}
