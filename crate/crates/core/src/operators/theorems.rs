//! Executable checks of the algebraic facts about local operators: sums
//! and compositions of local operators are local, the inverse of a positive
//! local bijection with positive inverse is local, and on a lattice the
//! local operators are exactly those with `-‖T‖I <= T <= ‖T‖I`.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{is_local, is_positive, LinOp, Verdict};
use crate::error::{Error, Result};
use crate::norms::{operator_norm, NormSpec};
use crate::order::OrderedSpace;
use crate::tol::Truth;

/// Outcome of a theorem check. `NotApplicable` means a hypothesis is unmet
/// and is distinct from `Fail`, which would contradict the theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
    Undecided,
}

impl CheckStatus {
    fn from_truth(t: Truth) -> Self {
        match t {
            Truth::True => CheckStatus::Pass,
            Truth::False => CheckStatus::Fail,
            Truth::Undecided => CheckStatus::Undecided,
        }
    }

    pub fn is_failure(self) -> bool {
        self == CheckStatus::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraReport {
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub alpha: f64,
    pub beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub composition: Option<Verdict>,
}

/// With `S` and `T` local, `αS + βT` and `S ∘ T` must be local on their
/// natural domains.
pub fn locality_algebra_check(
    space: &OrderedSpace,
    s: &LinOp,
    t: &LinOp,
    alpha: f64,
    beta: f64,
) -> Result<AlgebraReport> {
    let mut report = AlgebraReport {
        status: CheckStatus::NotApplicable,
        reason: None,
        alpha,
        beta,
        sum: None,
        composition: None,
    };
    for (name, op) in [("S", s), ("T", t)] {
        let v = is_local(space, op)?;
        if !v.is_true() {
            report.reason = Some(format!("hypothesis unmet: {name} is not local ({:?})", v.value));
            return Ok(report);
        }
    }
    let sum = is_local(space, &LinOp::combine(alpha, s, beta, t)?)?;
    let comp = is_local(space, &LinOp::compose(s, t)?)?;
    report.status = CheckStatus::from_truth(sum.value.and(comp.value));
    report.sum = Some(sum);
    report.composition = Some(comp);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseReport {
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inverse_local: Option<Verdict>,
}

/// If `T` is a local bijection and both `T` and `T⁻¹` are positive, then
/// `T⁻¹` is local. A singular matrix is an input error; unmet hypotheses
/// give `NotApplicable`.
pub fn inverse_local_check(space: &OrderedSpace, op: &LinOp) -> Result<InverseReport> {
    let not_applicable = |reason: String| InverseReport {
        status: CheckStatus::NotApplicable,
        reason: Some(reason),
        inverse_local: None,
    };
    if !op.has_full_domain() {
        return Ok(not_applicable("operator domain is not the whole space".into()));
    }
    let inv = op.inverse()?;
    let hypotheses = [
        ("T positive", is_positive(space, op)?),
        ("T⁻¹ positive", is_positive(space, &inv)?),
        ("T local", is_local(space, op)?),
    ];
    for (name, v) in hypotheses {
        if !v.is_true() {
            return Ok(not_applicable(format!("hypothesis unmet: {name} is {:?}", v.value)));
        }
    }
    let v = is_local(space, &inv)?;
    Ok(InverseReport {
        status: CheckStatus::from_truth(v.value),
        reason: None,
        inverse_local: Some(v),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterReport {
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub local: Truth,
    /// Smallest `α` with `-αI <= T <= αI`; `None` when no `α` works.
    pub alpha_min: Option<f64>,
    pub op_norm: f64,
    /// `‖T‖I - T >= 0` and `‖T‖I + T >= 0`.
    pub upper_positive: Truth,
    pub lower_positive: Truth,
}

/// On a lattice, `T` is local iff `-‖T‖I <= T <= ‖T‖I`. In lattice
/// coordinates `Φ T Φ⁻¹` must then be diagonal, and `α_min` is its largest
/// absolute diagonal entry. Spaces that are not lattices are not applicable.
pub fn center_bound_check(space: &OrderedSpace, op: &LinOp, norm: &NormSpec) -> Result<CenterReport> {
    space.require_cover()?;
    op.check_space(space)?;
    let (m, n) = (space.num_rows(), space.dim());
    let op_norm = operator_norm(space, norm, op.matrix())?;
    if m != n {
        return Ok(CenterReport {
            status: CheckStatus::NotApplicable,
            reason: Some(Error::NotLattice { rows: m, dim: n }.to_string()),
            local: Truth::Undecided,
            alpha_min: None,
            op_norm,
            upper_positive: Truth::Undecided,
            lower_positive: Truth::Undecided,
        });
    }
    let phi = space.phi();
    let phi_inv = crate::linalg::inverse_refined(phi, 1e-12)?;
    let lat = phi * op.matrix() * &phi_inv;
    let scale = lat.amax();
    let off = (0..n)
        .flat_map(|i| (0..n).filter(move |&k| k != i).map(move |k| (i, k)))
        .map(|(i, k)| lat[(i, k)].abs())
        .fold(0.0, f64::max);
    let alpha_min = (off <= space.tol().band * scale)
        .then(|| (0..n).map(|i| lat[(i, i)].abs()).fold(0.0, f64::max));
    let local = is_local(space, op)?.value;
    let eye = DMatrix::identity(n, n) * op_norm;
    let upper = is_positive(space, &LinOp::on(space, &eye - op.matrix())?)?.value;
    let lower = is_positive(space, &LinOp::on(space, &eye + op.matrix())?)?.value;
    let bounded = upper.and(lower);
    let status = match (local, bounded) {
        (Truth::Undecided, _) | (_, Truth::Undecided) => CheckStatus::Undecided,
        (l, b) if l == b => CheckStatus::Pass,
        _ => CheckStatus::Fail,
    };
    Ok(CenterReport {
        status,
        reason: None,
        local,
        alpha_min,
        op_norm,
        upper_positive: upper,
        lower_positive: lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::cover::canonicalize;
    use nalgebra::DVector;

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(v))
    }

    #[test]
    fn algebra_on_diagonals() {
        let s = canonicalize(&catalog::standard(3)).unwrap().into_space();
        let a = LinOp::on(&s, diag(&[1.0, 2.0, 3.0])).unwrap();
        let b = LinOp::on(&s, diag(&[-1.0, 0.5, 0.0])).unwrap();
        let r = locality_algebra_check(&s, &a, &b, 2.0, -3.0).unwrap();
        assert_eq!(r.status, CheckStatus::Pass);
        let zero = locality_algebra_check(&s, &a, &b, 0.0, 0.0).unwrap();
        assert_eq!(zero.status, CheckStatus::Pass);
        let swap = LinOp::on(&s, DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        let na = locality_algebra_check(&s, &a, &swap, 1.0, 1.0).unwrap();
        assert_eq!(na.status, CheckStatus::NotApplicable);
    }

    #[test]
    fn inverse_examples() {
        let s = canonicalize(&catalog::standard(3)).unwrap().into_space();
        let a = LinOp::on(&s, diag(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(inverse_local_check(&s, &a).unwrap().status, CheckStatus::Pass);
        let f = canonicalize(&catalog::four_ray()).unwrap().into_space();
        let l = LinOp::on(&f, DMatrix::identity(3, 3) * 0.7).unwrap();
        assert_eq!(inverse_local_check(&f, &l).unwrap().status, CheckStatus::Pass);
        // negative diagonal: local but not positive
        let neg = LinOp::on(&s, diag(&[-1.0, 2.0, 3.0])).unwrap();
        assert_eq!(inverse_local_check(&s, &neg).unwrap().status, CheckStatus::NotApplicable);
        let sing = LinOp::on(&s, diag(&[0.0, 2.0, 3.0])).unwrap();
        assert!(matches!(inverse_local_check(&s, &sing), Err(Error::Singular(_))));
    }

    #[test]
    fn center_bound_examples() {
        let s = canonicalize(&catalog::standard(2)).unwrap().into_space();
        let t = LinOp::on(&s, diag(&[0.5, -0.25])).unwrap();
        let r = center_bound_check(&s, &t, &NormSpec::Sup).unwrap();
        assert_eq!(r.status, CheckStatus::Pass);
        assert_eq!(r.local, Truth::True);
        assert!((r.alpha_min.unwrap() - 0.5).abs() < 1e-12);
        assert!((r.op_norm - 0.5).abs() < 1e-12);

        let id = center_bound_check(&s, &LinOp::identity(2), &NormSpec::Sup).unwrap();
        assert_eq!((id.alpha_min, id.op_norm), (Some(1.0), 1.0));
        let zero = LinOp::on(&s, DMatrix::zeros(2, 2)).unwrap();
        assert_eq!(center_bound_check(&s, &zero, &NormSpec::Sup).unwrap().alpha_min, Some(0.0));

        // a non-local operator is not sandwiched by any multiple of I
        let shear = LinOp::on(&s, DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0])).unwrap();
        let r = center_bound_check(&s, &shear, &NormSpec::Sup).unwrap();
        assert_eq!(r.status, CheckStatus::Pass);
        assert_eq!(r.alpha_min, None);
        assert_eq!(r.local, Truth::False);

        let f = canonicalize(&catalog::four_ray()).unwrap().into_space();
        let r = center_bound_check(&f, &LinOp::identity(3), &NormSpec::Sup).unwrap();
        assert_eq!(r.status, CheckStatus::NotApplicable);
    }
}
