//! Translation on a periodic grid and multiplication by a grid function,
//! both on the grid lattice `ℝ^g`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::cover::canonicalize;
use crate::error::{Error, Result};
use crate::operators::{
    is_bipositive, is_disjointness_preserving, is_disjointness_preserving_sampled, is_local,
    Certificate, LinOp, Verdict,
};
use crate::order::{is_disjoint_oracle, OrderedSpace, M_MAX};
use crate::report::{Check, ScanReport, ScanRow};
use crate::semigroups::{convergence_samples, cor_positive_resolvents, thm_bounded_local, YosidaParams};
use crate::tol::Truth;

/// Periodic grid of `points` cells on a circle of length `period`, and the
/// shift times to test. Every time must be a multiple of the cell width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TranslationConfig {
    pub points: usize,
    pub period: f64,
    pub ts: Vec<f64>,
}

impl Default for TranslationConfig {
    fn default() -> Self {
        Self {
            points: 8,
            period: 1.0,
            ts: vec![0.0, 0.125, 0.25, 0.5],
        }
    }
}

/// `(Px)_i = x_{(i + k) mod n}`.
fn cyclic_shift(n: usize, k: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if (i + k) % n == j { 1.0 } else { 0.0 })
}

fn not(t: Truth) -> Truth {
    match t {
        Truth::True => Truth::False,
        Truth::False => Truth::True,
        Truth::Undecided => Truth::Undecided,
    }
}

fn grid_lattice(n: usize) -> Result<OrderedSpace> {
    Ok(canonicalize(&catalog::standard(n))?.into_space())
}

fn dp_verdict(space: &OrderedSpace, op: &LinOp) -> Result<Verdict> {
    if space.num_rows() <= M_MAX {
        is_disjointness_preserving(space, op)
    } else {
        is_disjointness_preserving_sampled(space, op, 256, 0)
    }
}

/// Files a `x ⊥ y`, `Tx not ⊥ y` certificate after re-checking it with the
/// oracle; returns whether it was confirmed.
fn confirm_pair(space: &OrderedSpace, op: &LinOp, v: &Verdict, report: &mut ScanReport) -> Result<bool> {
    let Some(cert @ Certificate::Pair { x, y, .. }) = &v.certificate else {
        return Ok(false);
    };
    let x = DVector::from_column_slice(x);
    let y = DVector::from_column_slice(y);
    let ok = is_disjoint_oracle(space, &x, &y)?.truth.is_true()
        && is_disjoint_oracle(space, &op.apply(&x), &y)?.truth.is_false();
    report.witnesses.push(cert.clone());
    Ok(ok)
}

/// Cyclic shifts are disjointness preserving and, unless trivial, not
/// local; the forward-difference generator is not local on the grid.
pub fn translation_demo(cfg: &TranslationConfig) -> Result<ScanReport> {
    let n = cfg.points;
    if n < 2 || !(cfg.period > 0.0 && cfg.period.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "translation grid needs at least 2 points and a positive period (got {n}, {})",
            cfg.period
        )));
    }
    let h = cfg.period / n as f64;
    let space = grid_lattice(n)?;
    let mut report = ScanReport::new("translation");
    report.notes.push(
        "locality of d/ds is a property of differentiable functions that no grid operator reproduces; only the semigroup claims are certified"
            .into(),
    );

    let mut dp_all = Truth::True;
    let mut local_as_expected = Truth::True;
    for &t in &cfg.ts {
        let steps = t / h;
        if !t.is_finite() || (steps - steps.round()).abs() > 1e-9 * steps.abs().max(1.0) {
            return Err(Error::InvalidInput(format!(
                "t = {t} is not a multiple of the grid step {h}"
            )));
        }
        let k = (steps.round() as i64).rem_euclid(n as i64) as usize;
        let op = LinOp::on(&space, cyclic_shift(n, k))?;
        let bip = is_bipositive(&space, &op)?;
        let dp = dp_verdict(&space, &op)?;
        let local = is_local(&space, &op)?;
        dp_all = dp_all.and(dp.value);
        let expected_local = k == 0;
        let agrees = match local.value {
            Truth::Undecided => Truth::Undecided,
            v => Truth::from_bool(v.is_true() == expected_local),
        };
        local_as_expected = local_as_expected.and(agrees);
        if local.is_false() && !confirm_pair(&space, &op, &local, &mut report)? {
            local_as_expected = Truth::Undecided;
            report.notes.push(format!("t = {t}: locality witness not confirmed by the oracle"));
        }
        report.rows.push(ScanRow::new("bipositive(T(t))").t(t).verdict(bip.value));
        report.rows.push(ScanRow::new("dp(T(t))").t(t).verdict(dp.value));
        report.rows.push(ScanRow::new("local(T(t))").t(t).verdict(local.value).residual(local.residual));
    }
    report.conclusion(Check::new("T(t) disjointness preserving", dp_all));
    report.conclusion(Check::new("T(t) local only for whole periods", local_as_expected));

    let diff = (cyclic_shift(n, 1) - DMatrix::identity(n, n)) / h;
    let gen = LinOp::on(&space, diff)?;
    let gv = is_local(&space, &gen)?;
    let mut gen_not_local = not(gv.value);
    if gv.is_false() && !confirm_pair(&space, &gen, &gv, &mut report)? {
        gen_not_local = Truth::Undecided;
    }
    report.rows.push(ScanRow::new("local(forward difference)").verdict(gv.value).residual(gv.residual));
    report.conclusion(Check::new("forward difference not local", gen_not_local));
    report.finish();
    Ok(report)
}

/// Multiplication by `q` on `ℝ^g`: the generator and every `e^{tq}` are
/// local, and the positive-resolvent pipeline passes with `λ₀ = max q + 1`.
pub fn multiplication_demo(q: &[f64], ts: &[f64]) -> Result<ScanReport> {
    if q.is_empty() || q.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("multiplier must be nonempty and finite".into()));
    }
    let g = q.len();
    let space = grid_lattice(g)?;
    let a = LinOp::on(&space, DMatrix::from_diagonal(&DVector::from_column_slice(q)))?;
    let mut report = ScanReport::new("multiplication");
    report.notes.push(
        "the semigroup acts pointwise as x(s) ↦ e^{t q(s)} x(s); the q(t) in the source formula is a misprint".into(),
    );
    let av = is_local(&space, &a)?;
    report.rows.push(ScanRow::new("local(A)").verdict(av.value).residual(av.residual));
    report.conclusion(Check::new("A local", av.value));
    report.absorb("exp(tA)", thm_bounded_local(&space, &a, ts)?);

    let qmax = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lambda0 = qmax + 1.0;
    let positive_ts: Vec<f64> = ts.iter().copied().filter(|&t| t >= 0.0).collect();
    let params = YosidaParams::new(YosidaParams::default().lambdas, positive_ts)?;
    let cor = cor_positive_resolvents(&space, &a, lambda0, &params, &convergence_samples(g))?;
    report.variant = cor.variant.clone();
    report.absorb("positive resolvents", cor);
    report.finish();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::CheckStatus;
    use proptest::prelude::*;

    #[test]
    fn translation_on_eight_points() {
        let r = translation_demo(&TranslationConfig::default()).unwrap();
        assert_eq!(r.status, CheckStatus::Pass, "{:?} {:?}", r.reason, r.notes);
        let local: Vec<Truth> = r
            .rows
            .iter()
            .filter(|x| x.check == "local(T(t))")
            .map(|x| x.verdict.unwrap())
            .collect();
        assert_eq!(local, vec![Truth::True, Truth::False, Truth::False, Truth::False]);
        // two shift witnesses plus the generator witness
        assert_eq!(r.witnesses.len(), 4);
    }

    #[test]
    fn translation_rejects_misaligned_time() {
        let cfg = TranslationConfig {
            ts: vec![0.1],
            ..Default::default()
        };
        assert!(matches!(translation_demo(&cfg), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn forward_difference_witness_is_adjacent_pair() {
        let space = grid_lattice(8).unwrap();
        let d = LinOp::on(&space, (cyclic_shift(8, 1) - DMatrix::identity(8, 8)) * 8.0).unwrap();
        let v = is_local(&space, &d).unwrap();
        let Some(Certificate::Pair { x, y, .. }) = v.certificate else {
            panic!("expected a pair witness");
        };
        let xi = x.iter().position(|&v| v != 0.0).unwrap();
        let yi = y.iter().position(|&v| v != 0.0).unwrap();
        assert_eq!(x.iter().filter(|&&v| v != 0.0).count(), 1);
        assert_eq!((xi + 7) % 8, yi);
    }

    #[test]
    fn multiplication_examples() {
        let q: Vec<f64> = (0..16).map(|i| -(i as f64) / 15.0).collect();
        let r = multiplication_demo(&q, &[1e-2, 1.0, 10.0]).unwrap();
        assert_eq!(r.status, CheckStatus::Pass, "{:?}", r.reason);
        let c = multiplication_demo(&[0.7; 4], &[0.5, 2.0]).unwrap();
        assert!(c.passed());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn verdicts_invariant_under_constant_shift(
            q in prop::collection::vec(-2.0f64..2.0, 2..6),
            c in -3.0f64..3.0,
        ) {
            let ts = [0.1, 1.0];
            let base = multiplication_demo(&q, &ts).unwrap();
            let shifted: Vec<f64> = q.iter().map(|v| v + c).collect();
            let other = multiplication_demo(&shifted, &ts).unwrap();
            prop_assert_eq!(base.status, other.status);
            let verdicts = |r: &ScanReport| r.rows.iter().map(|x| x.verdict).collect::<Vec<_>>();
            prop_assert_eq!(verdicts(&base), verdicts(&other));
        }
    }
}
