//! Finite subsets of ℕ, infinite index sets, and regular thin families
//! described finitely enough to classify arbitrary finite sets.

mod family;
mod finset;
mod index_set;
mod props;

pub use family::{classify, restrict, shift_family, ExplicitFamily, FamilyKind, FamilySpec, Membership};
pub(crate) use family::{matching_paren, top_level_find};
pub use finset::FinSet;
pub use index_set::{image, image_family, index_inverse, IndexSet, Tail};
pub use props::{
    check_regular_properties, check_thin, initial_segment_map, initial_segment_of, rank, sqsubseteq_check,
    tree_rank, very_large_check, RegularityReport, SqClause, SqReport, VeryLargeReport, VERY_LARGE_NODE_BUDGET,
};
