//! Ordered spaces, disjointness, disjoint complements and bands.

mod bands;
mod disjoint;
pub mod pattern;
mod space;

pub use bands::{
    band_patterns, disjoint_complement, enumerate_bands, generator_patterns, Band, BandSummary,
    M_MAX,
};

pub use disjoint::{
    is_disjoint, is_disjoint_oracle, is_disjoint_oracle_with, upper_bounds, OracleVerdict,
    UpperBoundSet,
};
pub use pattern::{saturate, Pattern};
pub use space::{make_space, OrderedSpace};
