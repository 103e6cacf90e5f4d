//! Exact maximum-product search over cross-intersecting pairs.
//!
//! A pair `(A, B)` of a relation `R ⊆ X × Y` is cross-related when every
//! member of `A` is related to every member of `B`. Write `N(A)` for the
//! right elements related to all of `A`, and `N(B)` likewise. A pair is
//! closed when `B = N(A)` and `A = N(B)`.
//!
//! Any cross-related `(A, B)` has `B ⊆ N(A)`, and `(N(N(A)), N(A))` is a
//! closed pair containing it on both sides. Since the objective only grows
//! with either side, some maximizer is closed, and every maximizer with a
//! positive product is closed. The searches below therefore enumerate
//! closed pairs only.

mod classify;
mod closed;
mod context;
mod product;

pub use classify::{classify_maximizer, summarize, Classification, ClassificationSummary};
pub use closed::{closed_pairs, enumerate_closed_pairs, visit_closed_pairs, Budget, ClosedPair, ClosedPairs};
pub use context::{Context, Relation};
pub use product::{
    k_fold_max_product, max_product, max_product_exhaustive, max_weighted_product, KFoldMax, MaxProduct,
    WeightedMax, WeightedMaximizer,
};
