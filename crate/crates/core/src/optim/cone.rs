use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{solve_lp_with, Arith, LinearProgram, LpStatus};
use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// Answer to "is `target` a nonnegative combination of the rows?".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeMembership {
    /// `target = Σ coefficients_i · row_i` with nonnegative coefficients.
    Member { coefficients: Vec<f64> },
    /// `separator·row_i >= 0` for all rows and `separator·target < 0`.
    Separated { separator: Vec<f64> },
}

impl ConeMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, ConeMembership::Member { .. })
    }
}

pub fn cone_member(rows: &DMatrix<f64>, target: &DVector<f64>) -> Result<ConeMembership> {
    cone_member_with(rows, target, &Tolerances::default(), Arith::Float)
}

pub fn cone_member_with(
    rows: &DMatrix<f64>,
    target: &DVector<f64>,
    tol: &Tolerances,
    arith: Arith,
) -> Result<ConeMembership> {
    let d = target.len();
    if rows.ncols() != d && rows.nrows() > 0 {
        return Err(Error::Dimension(format!(
            "cone rows have {} columns, target has {d}",
            rows.ncols()
        )));
    }
    let r = rows.nrows();
    if r == 0 {
        return Ok(if target.iter().all(|&v| v == 0.0) {
            ConeMembership::Member {
                coefficients: Vec::new(),
            }
        } else {
            ConeMembership::Separated {
                separator: target.iter().map(|v| -v).collect(),
            }
        });
    }
    // variables λ >= 0 with Rᵀλ = target
    let lp = LinearProgram::new(DVector::zeros(r))
        .with_eq(rows.transpose(), target.clone())
        .with_nonneg(0..r)
        .with_tol(*tol);
    let out = solve_lp_with(&lp, arith)?;
    match out.status {
        LpStatus::Optimal => Ok(ConeMembership::Member {
            coefficients: out.witness,
        }),
        LpStatus::Infeasible => Ok(ConeMembership::Separated {
            separator: out.certificate.iter().map(|v| -v).collect(),
        }),
        LpStatus::Unbounded => Err(Error::Invariant(
            "feasibility problem with zero objective reported unbounded".into(),
        )),
    }
}
