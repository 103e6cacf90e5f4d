use crate::bitset::BitSet;
use crate::compression::SubsetFamily;
use crate::error::{Error, Result};
use crate::model::{meets, Space};

/// Which relation a context encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// Sequences agreeing on a nonzero entry.
    Meets,
    /// Subsets with a common element.
    Intersection,
    /// Anything else (hand-built or random contexts).
    Custom,
}

/// A dense bipartite relation between a left universe `X` and a right
/// universe `Y`, stored both by rows and by columns.
#[derive(Clone, Debug)]
pub struct Context {
    relation: Relation,
    rows: Vec<BitSet>,
    cols: Vec<BitSet>,
}

impl Context {
    pub fn from_fn<F>(left: usize, right: usize, relation: Relation, mut related: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> bool,
    {
        if left == 0 || right == 0 {
            return Err(Error::EmptyUniverse);
        }
        let mut rows = vec![BitSet::empty(right); left];
        let mut cols = vec![BitSet::empty(left); right];
        for (x, row) in rows.iter_mut().enumerate() {
            for (y, col) in cols.iter_mut().enumerate() {
                if related(x, y) {
                    row.insert(y);
                    col.insert(x);
                }
            }
        }
        Ok(Context {
            relation,
            rows,
            cols,
        })
    }

    /// Rows indexed by left elements, each a subset of the right universe.
    pub fn from_rows(right: usize, rows: Vec<BitSet>) -> Result<Self> {
        let left = rows.len();
        if rows.iter().any(|r| r.universe() != right) {
            return Err(Error::RelationMismatch("row width differs from right universe".into()));
        }
        Self::from_fn(left, right, Relation::Custom, |x, y| rows[x].contains(y))
    }

    /// The "meets" relation between two sequence spaces, indexed by their
    /// canonical enumerations.
    pub fn meets(left: &Space, right: &Space) -> Result<Self> {
        Self::from_fn(left.len(), right.len(), Relation::Meets, |x, y| {
            meets(left.get(x), right.get(y))
        })
    }

    /// The intersection relation between two subset families, indexed by
    /// their member order.
    pub fn intersection(left: &SubsetFamily, right: &SubsetFamily) -> Result<Self> {
        let l: Vec<_> = left.iter().collect();
        let r: Vec<_> = right.iter().collect();
        Self::from_fn(l.len(), r.len(), Relation::Intersection, |x, y| {
            l[x].intersects(r[y])
        })
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn left_len(&self) -> usize {
        self.rows.len()
    }

    pub fn right_len(&self) -> usize {
        self.cols.len()
    }

    pub fn cells(&self) -> u128 {
        self.left_len() as u128 * self.right_len() as u128
    }

    #[inline]
    pub fn related(&self, x: usize, y: usize) -> bool {
        self.rows[x].contains(y)
    }

    pub fn row(&self, x: usize) -> &BitSet {
        &self.rows[x]
    }

    pub fn col(&self, y: usize) -> &BitSet {
        &self.cols[y]
    }

    /// Same universe on both sides and `R(x, y) = R(y, x)`.
    pub fn is_symmetric(&self) -> bool {
        self.left_len() == self.right_len()
            && (0..self.left_len()).all(|x| self.rows[x] == self.cols[x])
    }

    /// The context with left and right swapped.
    pub fn transposed(&self) -> Context {
        Context {
            relation: self.relation,
            rows: self.cols.clone(),
            cols: self.rows.clone(),
        }
    }

    /// `N(A)` for `A ⊆ X`: right elements related to every member of `A`.
    /// `N(∅) = Y`.
    pub fn common_right(&self, a: &BitSet) -> BitSet {
        let mut out = BitSet::full(self.right_len());
        for x in a.iter() {
            out.intersect_with(&self.rows[x]);
        }
        out
    }

    /// `N(B)` for `B ⊆ Y`: left elements related to every member of `B`.
    pub fn common_left(&self, b: &BitSet) -> BitSet {
        let mut out = BitSet::full(self.left_len());
        for y in b.iter() {
            out.intersect_with(&self.cols[y]);
        }
        out
    }

    /// `N(N(A))`, the closure of a left subset.
    pub fn close_left(&self, a: &BitSet) -> BitSet {
        self.common_left(&self.common_right(a))
    }

    /// True iff every member of `a` is related to every member of `b`.
    pub fn is_cross(&self, a: &BitSet, b: &BitSet) -> bool {
        a.iter().all(|x| b.is_subset(&self.rows[x]))
    }
}
