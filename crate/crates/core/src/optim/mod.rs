//! Small dense linear programs with independently checkable certificates.
//!
//! Every problem has the form
//!
//! ```text
//! minimize  c·x   subject to   G x >= h,   E x = f,   x_j >= 0 for non-free j
//! ```
//!
//! and every answer is re-verified against the raw data before it is
//! returned, so a solver slip surfaces as [`Error::Numerical`] rather than
//! as a wrong verdict.

mod cone;
pub mod scalar;
mod simplex;
pub mod verify;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

pub use cone::{cone_member, cone_member_with, ConeMembership};

use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// Float or exact rational arithmetic inside the simplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arith {
    #[default]
    Float,
    Exact,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: DVector<f64>,
    pub ineq: DMatrix<f64>,
    pub ineq_rhs: DVector<f64>,
    pub eq: DMatrix<f64>,
    pub eq_rhs: DVector<f64>,
    /// `free[j]` is false when `x_j >= 0` is imposed.
    pub free: Vec<bool>,
    pub tol: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve_lp`].
///
/// * `Optimal`: `witness` is a minimizer, `certificate` the multipliers
///   `(λ, μ)` for the inequality and equality rows.
/// * `Infeasible`: `certificate` is a Farkas vector `(λ, μ)` with `λ >= 0`,
///   `Gᵀλ + Eᵀμ <= 0` (`= 0` on free variables) and `h·λ + f·μ = 1`.
/// * `Unbounded`: `witness` is feasible and `certificate` is an improving
///   ray with max-abs entry 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub value: f64,
    pub witness: Vec<f64>,
    pub certificate: Vec<f64>,
}

impl LinearProgram {
    /// Problem over `objective.len()` free variables with no constraints.
    pub fn new(objective: DVector<f64>) -> Self {
        let d = objective.len();
        Self {
            objective,
            ineq: DMatrix::zeros(0, d),
            ineq_rhs: DVector::zeros(0),
            eq: DMatrix::zeros(0, d),
            eq_rhs: DVector::zeros(0),
            free: vec![true; d],
            tol: Tolerances::default(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn with_ineq(mut self, g: DMatrix<f64>, h: DVector<f64>) -> Self {
        self.ineq = g;
        self.ineq_rhs = h;
        self
    }

    pub fn with_eq(mut self, e: DMatrix<f64>, f: DVector<f64>) -> Self {
        self.eq = e;
        self.eq_rhs = f;
        self
    }

    pub fn with_nonneg(mut self, vars: impl IntoIterator<Item = usize>) -> Self {
        for j in vars {
            self.free[j] = false;
        }
        self
    }

    pub fn with_tol(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        let d = self.num_vars();
        if d == 0 {
            return Err(Error::Dimension("linear program has no variables".into()));
        }
        if self.ineq.ncols() != d
            || self.eq.ncols() != d
            || self.ineq.nrows() != self.ineq_rhs.len()
            || self.eq.nrows() != self.eq_rhs.len()
            || self.free.len() != d
        {
            return Err(Error::Dimension(format!(
                "linear program with {d} variables has inconsistent blocks: G {}x{}, h {}, E {}x{}, f {}",
                self.ineq.nrows(),
                self.ineq.ncols(),
                self.ineq_rhs.len(),
                self.eq.nrows(),
                self.eq.ncols(),
                self.eq_rhs.len()
            )));
        }
        let finite = self
            .objective
            .iter()
            .chain(self.ineq.iter())
            .chain(self.ineq_rhs.iter())
            .chain(self.eq.iter())
            .chain(self.eq_rhs.iter())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidInput(
                "linear program data must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Incremental row builder for `G x >= h` / `E x = f` systems.
#[derive(Debug, Clone)]
pub struct RowBuilder {
    dim: usize,
    ge: Vec<f64>,
    ge_rhs: Vec<f64>,
    eq: Vec<f64>,
    eq_rhs: Vec<f64>,
}

impl RowBuilder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            ge: Vec::new(),
            ge_rhs: Vec::new(),
            eq: Vec::new(),
            eq_rhs: Vec::new(),
        }
    }

    pub fn ge(&mut self, row: &[f64], rhs: f64) -> &mut Self {
        debug_assert_eq!(row.len(), self.dim);
        self.ge.extend_from_slice(row);
        self.ge_rhs.push(rhs);
        self
    }

    pub fn eq(&mut self, row: &[f64], rhs: f64) -> &mut Self {
        debug_assert_eq!(row.len(), self.dim);
        self.eq.extend_from_slice(row);
        self.eq_rhs.push(rhs);
        self
    }

    pub fn build(self, objective: DVector<f64>) -> LinearProgram {
        let d = self.dim;
        let k = self.ge_rhs.len();
        let e = self.eq_rhs.len();
        LinearProgram::new(objective)
            .with_ineq(
                DMatrix::from_row_slice(k, d, &self.ge),
                DVector::from_vec(self.ge_rhs),
            )
            .with_eq(
                DMatrix::from_row_slice(e, d, &self.eq),
                DVector::from_vec(self.eq_rhs),
            )
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    solve_lp_with(lp, Arith::Float)
}

pub fn solve_lp_exact(lp: &LinearProgram) -> Result<LpOutcome> {
    solve_lp_with(lp, Arith::Exact)
}

pub fn solve_lp_with(lp: &LinearProgram, arith: Arith) -> Result<LpOutcome> {
    lp.validate()?;
    let raw = match arith {
        Arith::Float => simplex::solve::<f64>(lp)?,
        Arith::Exact => simplex::solve::<BigRational>(lp)?,
    };
    let out = LpOutcome {
        status: raw.status,
        value: raw.value,
        witness: raw.witness,
        certificate: raw.certificate,
    };
    verify::check_outcome(lp, &out)?;
    Ok(out)
}
