//! Zero patterns of dual functionals and their rank closure.

use fixedbitset::FixedBitSet;
use nalgebra::DMatrix;

use super::OrderedSpace;
use crate::error::Result;
use crate::linalg::{RowSpan, SPAN_TOL};

/// Set of dual-functional indices. A band is described by the indices of
/// the functionals that vanish on it.
pub type Pattern = FixedBitSet;

pub fn pattern_of(m: usize, indices: impl IntoIterator<Item = usize>) -> Pattern {
    let mut p = FixedBitSet::with_capacity(m);
    for j in indices {
        p.insert(j);
    }
    p
}

pub fn indices(p: &Pattern) -> Vec<usize> {
    p.ones().collect()
}

pub fn complement(p: &Pattern) -> Pattern {
    let mut c = p.clone();
    c.toggle_range(..);
    c
}

/// `{j : φ_j ∈ span{φ_k : k ∈ z}}`.
pub(crate) fn saturate_rows(phi: &DMatrix<f64>, z: &Pattern) -> Pattern {
    let span = RowSpan::of_rows(phi, z.ones());
    saturate_with(phi, z, &span)
}

pub(crate) fn saturate_with(phi: &DMatrix<f64>, z: &Pattern, span: &RowSpan) -> Pattern {
    let mut out = z.clone();
    if span.rank() == phi.ncols() {
        out.insert_range(..);
        return out;
    }
    for j in 0..phi.nrows() {
        if !out.contains(j) && span.contains(&phi.row(j).transpose(), SPAN_TOL * 10.0) {
            out.insert(j);
        }
    }
    out
}

/// Rank closure of a zero pattern. On a certified cover, the saturated
/// patterns are exactly the zero sets `{j : φ_j(x) = 0 ∀x ∈ S}` of
/// subspaces `S`, and a band's pattern is always saturated.
pub fn saturate(space: &OrderedSpace, z: &Pattern) -> Result<Pattern> {
    space.require_cover()?;
    Ok(saturate_rows(space.phi(), &resize(z, space.num_rows())))
}

pub(crate) fn resize(z: &Pattern, m: usize) -> Pattern {
    let mut p = z.clone();
    p.grow(m);
    p
}
