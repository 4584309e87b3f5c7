//! Linear operators on ordered spaces: positivity, locality, disjointness
//! preservation and the algebraic facts connecting them.

mod generate;
mod predicates;
mod theorems;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inf_norm, intersect_spans, inverse_refined, null_space, orthonormal_columns, rank, SPAN_TOL};
use crate::order::OrderedSpace;
use crate::tol::Truth;

pub use generate::{
    cover_multiplication, local_operator_basis, multiplier_basis, random_cover_multiplication,
    random_local_operator, random_operator, random_positive_local_bijection,
};
pub use predicates::{
    band_residual, is_band_preserving, is_bipositive, is_bipositive_with, is_disjointness_preserving,
    is_disjointness_preserving_sampled, is_disjointness_preserving_with, is_local,
    is_local_sampled, is_local_with, is_positive, is_positive_with, positive_off_diagonal_pair,
    random_disjoint_pairs,
};
pub use theorems::{
    center_bound_check, inverse_local_check, locality_algebra_check, AlgebraReport, CenterReport,
    CheckStatus, InverseReport,
};

/// Square matrix acting on a space, optionally restricted to a domain
/// subspace given by a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LinOp {
    matrix: DMatrix<f64>,
    space: String,
    /// Orthonormal columns spanning the domain; `None` is the whole space.
    domain: Option<DMatrix<f64>>,
}

impl LinOp {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension(format!(
                "operator matrix is {}x{}, expected square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("operator entries must be finite".into()));
        }
        Ok(Self {
            matrix,
            space: String::new(),
            domain: None,
        })
    }

    /// Operator on `space`, checking the dimension.
    pub fn on(space: &OrderedSpace, matrix: DMatrix<f64>) -> Result<Self> {
        let op = Self::new(matrix)?;
        op.check_space(space)?;
        Ok(op.with_space_name(space.name()))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n)).expect("identity is square and finite")
    }

    pub fn with_space_name(mut self, name: impl Into<String>) -> Self {
        self.space = name.into();
        self
    }

    /// Restricts the domain to the span of the columns of `basis`, which
    /// must be independent.
    pub fn with_domain(mut self, basis: DMatrix<f64>) -> Result<Self> {
        if basis.nrows() != self.dim() {
            return Err(Error::Dimension(format!(
                "domain basis has {} rows for an operator of dimension {}",
                basis.nrows(),
                self.dim()
            )));
        }
        if rank(&basis) < basis.ncols() {
            return Err(Error::InvalidInput("domain basis columns are dependent".into()));
        }
        self.domain = if basis.ncols() == self.dim() {
            None
        } else {
            Some(orthonormal_columns(&basis))
        };
        Ok(self)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn space_name(&self) -> &str {
        &self.space
    }

    pub fn domain(&self) -> Option<&DMatrix<f64>> {
        self.domain.as_ref()
    }

    /// Orthonormal domain basis, the identity for a full domain.
    pub fn domain_basis(&self) -> DMatrix<f64> {
        self.domain
            .clone()
            .unwrap_or_else(|| DMatrix::identity(self.dim(), self.dim()))
    }

    pub fn has_full_domain(&self) -> bool {
        self.domain.is_none()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }

    pub fn norm_inf(&self) -> f64 {
        inf_norm(&self.matrix)
    }

    pub(crate) fn check_space(&self, space: &OrderedSpace) -> Result<()> {
        if self.dim() != space.dim() {
            return Err(Error::Dimension(format!(
                "operator of dimension {} on a space of dimension {}",
                self.dim(),
                space.dim()
            )));
        }
        Ok(())
    }

    /// `αS + βT` on `D(S) ∩ D(T)`.
    pub fn combine(alpha: f64, s: &LinOp, beta: f64, t: &LinOp) -> Result<LinOp> {
        if s.dim() != t.dim() {
            return Err(Error::Dimension("operators of different dimension".into()));
        }
        let m = &s.matrix * alpha + &t.matrix * beta;
        let mut out = LinOp::new(m)?.with_space_name(s.space.clone());
        out.domain = match (&s.domain, &t.domain) {
            (None, None) => None,
            (Some(d), None) | (None, Some(d)) => Some(d.clone()),
            (Some(a), Some(b)) => Some(intersect_spans(a, b)),
        };
        Ok(out)
    }

    /// `S ∘ T` on `{x ∈ D(T) : Tx ∈ D(S)}`.
    pub fn compose(s: &LinOp, t: &LinOp) -> Result<LinOp> {
        if s.dim() != t.dim() {
            return Err(Error::Dimension("operators of different dimension".into()));
        }
        let mut out = LinOp::new(&s.matrix * &t.matrix)?.with_space_name(s.space.clone());
        out.domain = match &s.domain {
            None => t.domain.clone(),
            Some(ds) => {
                // x = W c with T W c = V e
                let w = t.domain_basis();
                let tw = &t.matrix * &w;
                let (n, k, l) = (s.dim(), w.ncols(), ds.ncols());
                let mut joint = DMatrix::zeros(n, k + l);
                joint.view_mut((0, 0), (n, k)).copy_from(&tw);
                joint.view_mut((0, k), (n, l)).copy_from(&(-ds));
                let null = null_space(&joint, SPAN_TOL);
                let basis = orthonormal_columns(&(&w * null.rows(0, k)));
                (basis.ncols() < n).then_some(basis)
            }
        };
        Ok(out)
    }

    /// `T⁻¹`, defined for a full domain and a well-conditioned matrix.
    pub fn inverse(&self) -> Result<LinOp> {
        if !self.has_full_domain() {
            return Err(Error::InvalidInput(
                "inverse requires an operator with full domain".into(),
            ));
        }
        let inv = inverse_refined(&self.matrix, 1e-12)?;
        Ok(LinOp::new(inv)?.with_space_name(self.space.clone()))
    }
}

/// How a verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Cone-membership linear programs.
    Lp,
    /// Scan over the band lattice.
    ExactBands,
    /// Random disjoint pairs decided by the definitional oracle.
    Sampled,
}

/// Re-checkable evidence for a `false` verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// A vector whose order status is not matched by its image: `x >= 0`
    /// with `φ_j(Tx) < 0`, or `Tx >= 0` with `φ_j(x) < 0`.
    Point {
        x: Vec<f64>,
        image: Vec<f64>,
        functional: usize,
    },
    /// Disjoint `x ⊥ y` with `Tx` not disjoint from `y` (locality) or from
    /// `Ty` (disjointness preservation). `band` is the pattern of a band
    /// containing `x` whose disjoint complement contains `y`.
    Pair {
        x: Vec<f64>,
        y: Vec<f64>,
        band: Option<Vec<usize>>,
    },
    /// `x >= 0` with `φ_j(x) = 0` but `φ_j(Tx) = value != 0`.
    OffDiagonal {
        functional: usize,
        x: Vec<f64>,
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub value: Truth,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    /// Largest band-pattern residual found by an exact scan.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    /// Disjoint pairs examined by a sampled check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    pub(crate) fn new(value: Truth, method: Method) -> Self {
        Self {
            value,
            method,
            certificate: None,
            residual: None,
            pairs: None,
            note: None,
        }
    }

    pub(crate) fn with_certificate(mut self, c: Certificate) -> Self {
        self.certificate = Some(c);
        self
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_true(&self) -> bool {
        self.value.is_true()
    }

    pub fn is_false(&self) -> bool {
        self.value.is_false()
    }
}

pub(crate) fn to_vec(v: &DVector<f64>) -> Vec<f64> {
    v.iter().cloned().collect()
}
