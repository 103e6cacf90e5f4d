//! Exact combinatorics of cross-intersecting families of partial integer
//! sequences.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: cap vectors, sequence spaces `S_c^(r)`, labeled sets, stars
//!   and the star-product bound.
//! * [`compression`]: left-compressions `Delta_{i,j}` on subset families and
//!   relabellings `Gamma_{x,y}` on labeled families.
//! * [`weighted`]: weighted hereditary compressed families, the
//!   value-one-layer weights, and generators for verification corpora.
//! * [`search`]: exact maximum-product search over cross-intersecting pairs
//!   and k-tuples via closed-pair (concept) enumeration.
//! * [`suites`]: the named verification suites driven by the CLI.
//! * [`io`]: JSON-lines and JSON formats.

pub mod bitset;
pub mod compression;
pub mod error;
pub mod io;
pub mod model;
pub mod search;
pub mod suites;
pub mod weighted;

pub use bitset::BitSet;
pub use compression::{LabeledFamily, Meets, Subset, SubsetFamily};
pub use error::{Error, Result};
pub use model::{IpSequence, LabeledSet, PartialSequence, Space};
pub use search::{Budget, ClosedPair, Context, Relation};
pub use weighted::{Weight, WeightedFamily};
