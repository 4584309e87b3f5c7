//! Scans that check, on finite grids, how locality passes between a
//! generator, its resolvents, its Yosida approximations and its semigroup.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{resolvent, yosida, Semigroup, YosidaParams};
use crate::cover::LatticeCover;
use crate::error::{Error, Result};
use crate::linalg::{spectral_bound, vec_inf_norm};
use crate::norms::{rho_meet_disjoint, NormSpec};
use crate::operators::{
    inverse_local_check, is_disjointness_preserving, is_local, is_positive, random_disjoint_pairs,
    Certificate, CheckStatus, LinOp, Verdict,
};
use crate::order::{disjoint_complement, is_disjoint_oracle, OrderedSpace};
use crate::report::{Check, ScanReport, ScanRow};
use crate::tol::Truth;

/// Relative slack allowed when checking that a table decreases.
const MONOTONE_SLACK: f64 = 1e-12;

/// Checks a locality counterexample with the definitional oracle and files
/// it in the report.
fn record_witness(space: &OrderedSpace, op: &LinOp, v: &Verdict, report: &mut ScanReport, label: &str) -> Result<()> {
    let Some(cert) = &v.certificate else {
        return Ok(());
    };
    if let Certificate::Pair { x, y, .. } = cert {
        let x = DVector::from_column_slice(x);
        let y = DVector::from_column_slice(y);
        let disjoint = is_disjoint_oracle(space, &x, &y)?.truth;
        let image = is_disjoint_oracle(space, &op.apply(&x), &y)?.truth;
        if !(disjoint.is_true() && image.is_false()) {
            report.notes.push(format!(
                "{label}: witness not confirmed by the oracle (x ⊥ y {disjoint}, Tx ⊥ y {image})"
            ));
        }
    }
    report.witnesses.push(cert.clone());
    Ok(())
}

fn locality_rows<F>(
    space: &OrderedSpace,
    ts: &[f64],
    check: &str,
    eval: F,
) -> Result<Vec<(ScanRow, LinOp, Verdict)>>
where
    F: Fn(f64) -> Result<(LinOp, f64)> + Sync,
{
    ts.par_iter()
        .map(|&t| {
            let (op, err) = eval(t)?;
            let v = is_local(space, &op)?;
            let row = ScanRow::new(check)
                .t(t)
                .verdict(v.value)
                .error(err)
                .residual(v.residual);
            Ok((row, op, v))
        })
        .collect()
}

/// A bounded local generator has local `e^{tA}` for every real `t`.
pub fn thm_bounded_local(space: &OrderedSpace, a: &LinOp, ts: &[f64]) -> Result<ScanReport> {
    a.check_space(space)?;
    let sg = Semigroup::new(a.clone())?;
    let mut report = ScanReport::new("bounded_local_generator");
    report.hypothesis(Check::new("A local", is_local(space, a)?.value));
    let rows = locality_rows(space, ts, "local(exp(tA))", |t| {
        let e = sg.eval(t)?;
        Ok((LinOp::on(space, e.matrix)?, e.error_estimate))
    })?;
    let mut all = Truth::True;
    for (row, op, v) in rows {
        all = all.and(v.value);
        record_witness(space, &op, &v, &mut report, &format!("t = {}", row.t.unwrap_or(0.0)))?;
        report.rows.push(row);
    }
    report.conclusion(Check::new("exp(tA) local on the grid", all));
    report.notes.push(
        "exp(tA) is the power series sum over n of t^n A^n / n!; the source proof mixes indices k and n in this sum"
            .into(),
    );
    report.finish();
    Ok(report)
}

/// Largest `|φ_j(v)|` over the functionals vanishing on the band `{x}^dd`,
/// relative to `‖x‖_∞`.
fn band_escape(space: &OrderedSpace, x: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    let d = disjoint_complement(space, std::slice::from_ref(x))?;
    let cols: Vec<DVector<f64>> = d.basis().column_iter().map(|c| c.into_owned()).collect();
    let dd = disjoint_complement(space, &cols)?;
    let phi_v = space.eval(v);
    let worst = dd.indices().iter().map(|&j| phi_v[j].abs()).fold(0.0, f64::max);
    Ok(worst / vec_inf_norm(x).max(f64::MIN_POSITIVE))
}

fn nonincreasing(values: &[f64], scale: f64) -> bool {
    values
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + MONOTONE_SLACK) + MONOTONE_SLACK * scale)
}

/// If `A` and every resolvent `(λI - A)⁻¹` on the ladder are local, then
/// the Yosida approximations `A_λ`, their exponentials and the semigroup
/// are local, with `e^{tA_λ}x → e^{tA}x` as `λ → ∞`. The limit is checked
/// to stay in the band `{x}^dd` generated by each sample.
///
/// Unmet hypotheses give `NotApplicable`; the conclusions are still
/// tabulated.
pub fn thm_local_resolvents(
    space: &OrderedSpace,
    a: &LinOp,
    params: &YosidaParams,
    xs: &[DVector<f64>],
) -> Result<ScanReport> {
    a.check_space(space)?;
    params.check_against(a)?;
    for x in xs {
        space.check_vec(x)?;
    }
    let sg = Semigroup::new(a.clone())?;
    let mut report = ScanReport::new("local_resolvents");
    report.hypothesis(Check::new("A local", is_local(space, a)?.value));
    report.notes.push(
        "resolvent locality is checked on the finite lambda ladder only".to_string(),
    );

    let tol_band = space.tol().band;
    let exact: Vec<DMatrix<f64>> = params
        .ts
        .par_iter()
        .map(|&t| Ok(sg.eval(t)?.matrix))
        .collect::<Result<_>>()?;

    let mut yosida_local = Truth::True;
    let mut exp_yosida_local = Truth::True;
    let mut errors = vec![vec![0.0; params.lambdas.len()]; params.ts.len() * xs.len()];
    for (li, &lambda) in params.lambdas.iter().enumerate() {
        let r = LinOp::on(space, resolvent(a, lambda)?)?;
        let rv = is_local(space, &r)?;
        report.hypothesis(Check::new(format!("R({lambda}) local"), rv.value));
        report.rows.push(
            ScanRow::new("local(R(lambda))")
                .lambda(lambda)
                .verdict(rv.value)
                .residual(rv.residual),
        );
        let a_l = yosida(a, lambda)?.with_space_name(space.name());
        let yv = is_local(space, &a_l)?;
        yosida_local = yosida_local.and(yv.value);
        record_witness(space, &a_l, &yv, &mut report, &format!("A_{lambda}"))?;
        report.rows.push(
            ScanRow::new("local(A_lambda)")
                .lambda(lambda)
                .verdict(yv.value)
                .residual(yv.residual),
        );
        let sg_l = Semigroup::new(a_l)?;
        let rows = locality_rows(space, &params.ts, "local(exp(tA_lambda))", |t| {
            let e = sg_l.eval(t)?;
            Ok((LinOp::on(space, e.matrix)?, e.error_estimate))
        })?;
        for (ti, (row, op, v)) in rows.into_iter().enumerate() {
            exp_yosida_local = exp_yosida_local.and(v.value);
            record_witness(space, &op, &v, &mut report, &format!("exp(tA_{lambda})"))?;
            report.rows.push(row.lambda(lambda));
            for (k, x) in xs.iter().enumerate() {
                let err = vec_inf_norm(&(op.matrix() * x - &exact[ti] * x));
                errors[ti * xs.len() + k][li] = err;
                report.rows.push(
                    ScanRow::new("convergence")
                        .t(params.ts[ti])
                        .lambda(lambda)
                        .pair(k)
                        .error(err),
                );
            }
        }
    }
    report.conclusion(Check::new("A_lambda local", yosida_local));
    report.conclusion(Check::new("exp(tA_lambda) local", exp_yosida_local));

    let mut monotone = true;
    for (ti, &t) in params.ts.iter().enumerate() {
        for (k, x) in xs.iter().enumerate() {
            let scale = vec_inf_norm(&(&exact[ti] * x)).max(vec_inf_norm(x));
            if !nonincreasing(&errors[ti * xs.len() + k], scale) {
                monotone = false;
                report
                    .notes
                    .push(format!("convergence error not decreasing in lambda at t = {t}, sample {k}"));
            }
        }
    }
    report.conclusion(Check::new(
        "exp(tA_lambda)x -> exp(tA)x monotonically",
        Truth::from_bool(monotone),
    ));

    let rows = locality_rows(space, &params.ts, "local(T(t))", |t| {
        let e = sg.eval(t)?;
        Ok((LinOp::on(space, e.matrix)?, e.error_estimate))
    })?;
    let mut limit_local = Truth::True;
    for (row, op, v) in rows {
        limit_local = limit_local.and(v.value);
        record_witness(space, &op, &v, &mut report, &format!("T({})", row.t.unwrap_or(0.0)))?;
        report.rows.push(row);
    }
    report.conclusion(Check::new("T(t) local", limit_local));

    // the limit stays in each band {x}^dd
    let mut in_band = true;
    for (ti, &t) in params.ts.iter().enumerate() {
        for (k, x) in xs.iter().enumerate() {
            let tx = &exact[ti] * x;
            let escape = band_escape(space, x, &tx)?;
            let ok = escape <= tol_band * (1.0 + vec_inf_norm(&tx) / vec_inf_norm(x).max(f64::MIN_POSITIVE));
            in_band &= ok;
            report.rows.push(
                ScanRow::new("band(T(t)x)")
                    .t(t)
                    .pair(k)
                    .verdict(Truth::from_bool(ok))
                    .residual(Some(escape)),
            );
        }
    }
    report.conclusion(Check::new("T(t)x stays in {x}^dd", Truth::from_bool(in_band)));
    report.finish();
    Ok(report)
}

/// If every `T(t)` is disjointness preserving, the generator is local.
/// Each disjoint pair `x ⊥ y` gets a table of
/// `ρ(|i((T(t)x - x)/t)| ∧ |i(y)|)` for decreasing `t`, then
/// `ρ(|i(Ax)| ∧ |i(y)|)` is required to vanish and `Ax ⊥ y` is confirmed by
/// the oracle. Only positive `t` are used.
pub fn thm_generator_local(
    cover: &LatticeCover,
    sg: &Semigroup,
    ts: &[f64],
    pairs: usize,
    seed: u64,
    norm: &NormSpec,
) -> Result<ScanReport> {
    let space = cover.space();
    let a = sg.generator();
    a.check_space(space)?;
    norm.validate(space)?;
    let mut ts: Vec<f64> = ts.iter().copied().filter(|&t| t > 0.0).collect();
    ts.sort_by(|p, q| q.total_cmp(p));
    ts.dedup();
    if ts.is_empty() {
        return Err(Error::InvalidInput("generator scan needs a positive t".into()));
    }
    let mut report = ScanReport::new("generator_local");

    let verdicts: Vec<(f64, LinOp, Verdict)> = ts
        .par_iter()
        .map(|&t| {
            let op = LinOp::on(space, sg.eval(t)?.matrix)?;
            let v = is_disjointness_preserving(space, &op)?;
            Ok((t, op, v))
        })
        .collect::<Result<_>>()?;
    for (t, _, v) in &verdicts {
        report.hypothesis(Check::new(format!("T({t}) disjointness preserving"), v.value));
        report.rows.push(
            ScanRow::new("dp(T(t))")
                .t(*t)
                .verdict(v.value)
                .residual(v.residual),
        );
        if let Some(c) = &v.certificate {
            report.witnesses.push(c.clone());
        }
    }
    if report.unmet_hypothesis().is_some() {
        let gen = is_local(space, a)?;
        report.notes.push(format!(
            "generator local: {} (the theorem makes no claim without its hypothesis)",
            gen.value
        ));
        report.finish();
        return Ok(report);
    }

    let samples = random_disjoint_pairs(space, a.domain(), pairs, seed)?;
    if samples.is_empty() {
        report
            .notes
            .push("space has no nontrivial band, so there are no disjoint pairs".into());
    }
    let tol_rho = space.tol().zero;
    let per_pair: Vec<(Vec<ScanRow>, Truth, bool, f64)> = samples
        .par_iter()
        .enumerate()
        .map(|(k, (x, y))| {
            let x = x / vec_inf_norm(x);
            let y = y / vec_inf_norm(y);
            let mut rows = Vec::new();
            let mut table = Vec::new();
            for (t, op, _) in &verdicts {
                let q = (op.apply(&x) - &x) / *t;
                let rho = rho_meet_disjoint(cover, norm, &q, &y)?.rho;
                table.push(rho);
                rows.push(ScanRow::new("rho(difference quotient)").t(*t).pair(k).rho(rho));
            }
            let ax = a.apply(&x);
            let rv = rho_meet_disjoint(cover, norm, &ax, &y)?;
            let oracle = is_disjoint_oracle(space, &ax, &y)?.truth;
            let ok = Truth::from_bool(rv.rho <= tol_rho).and(oracle);
            rows.push(ScanRow::new("rho(Ax)").pair(k).rho(rv.rho).verdict(ok));
            let monotone = nonincreasing(&table, 1.0);
            Ok((rows, ok, monotone, *table.last().expect("nonempty grid")))
        })
        .collect::<Result<_>>()?;

    let mut ax_disjoint = Truth::True;
    let mut monotone = true;
    let mut last = 0.0f64;
    for (rows, ok, mono, tail) in per_pair {
        ax_disjoint = ax_disjoint.and(ok);
        monotone &= mono;
        last = last.max(tail);
        report.rows.extend(rows);
    }
    report.conclusion(Check::new("Ax ⊥ y on every pair", ax_disjoint));
    report.conclusion(
        Check::new(
            "difference-quotient rho decreases to <= 1e-6",
            Truth::from_bool(monotone && last <= 1e-6),
        )
        .with_note(format!("largest value at t = {}: {last:e}", ts[ts.len() - 1])),
    );
    report.finish();
    Ok(report)
}

/// Resolvent positivity and locality from either hypothesis set:
///
/// * `λ₀I - A` positive and local, and `(λI - A)⁻¹` positive for `λ >= λ₀`;
/// * `A` positive and local with `A <= λ₀I`.
///
/// Each resolvent is shown local through the inverse of the positive local
/// bijection `λI - A`, then the Yosida scan runs on the ladder entries
/// above both `λ₀` and the spectral margin.
pub fn cor_positive_resolvents(
    space: &OrderedSpace,
    a: &LinOp,
    lambda0: f64,
    params: &YosidaParams,
    xs: &[DVector<f64>],
) -> Result<ScanReport> {
    a.check_space(space)?;
    if !lambda0.is_finite() {
        return Err(Error::InvalidInput(format!("lambda0 = {lambda0} is not finite")));
    }
    let n = a.dim();
    let shift = |l: f64| LinOp::combine(l, &LinOp::identity(n), -1.0, a);
    let mut report = ScanReport::new("positive_resolvents");

    let b = shift(lambda0)?;
    let b_pos = is_positive(space, &b)?.value;
    let b_loc = is_local(space, &b)?.value;
    let mut lambdas: Vec<f64> = params.lambdas.iter().copied().filter(|&l| l >= lambda0).collect();
    if lambdas.first() != Some(&lambda0) {
        lambdas.insert(0, lambda0);
    }
    let mut r_pos = Truth::True;
    for &l in &lambdas {
        let v = match resolvent(a, l) {
            Ok(r) => is_positive(space, &LinOp::on(space, r)?)?.value,
            Err(Error::Resolvent { .. }) => Truth::False,
            Err(e) => return Err(e),
        };
        report.rows.push(ScanRow::new("positive(R(lambda))").lambda(l).verdict(v));
        r_pos = r_pos.and(v);
    }

    let first = [
        Check::new("lambda0 I - A positive", b_pos),
        Check::new("lambda0 I - A local", b_loc),
        Check::new("R(lambda) positive for lambda >= lambda0", r_pos),
    ];
    if first.iter().all(|c| c.value.is_true()) {
        report.variant = Some("shifted generator positive and local, positive resolvents".into());
        report.hypotheses.extend(first);
    } else {
        let second = [
            Check::new("A positive", is_positive(space, a)?.value),
            Check::new("A local", is_local(space, a)?.value),
            Check::new("A <= lambda0 I", b_pos),
        ];
        report.variant = Some("positive local generator bounded by lambda0".into());
        let use_second = second.iter().all(|c| c.value.is_true());
        report.hypotheses.extend(if use_second { second } else { first });
        if !use_second {
            report.variant = None;
            report.finish();
            return Ok(report);
        }
        report.notes.push(format!(
            "resolvent positivity derived from the positive semigroup; observed on the ladder: {r_pos}"
        ));
    }

    let mut via_inverse = Truth::True;
    for &l in &lambdas {
        let inv = match inverse_local_check(space, &shift(l)?) {
            Ok(inv) => inv,
            Err(Error::Singular(_) | Error::Numerical(_)) => {
                report.notes.push(format!("lambda = {l} is not in the resolvent set; skipped"));
                continue;
            }
            Err(e) => return Err(e),
        };
        let v = match inv.status {
            CheckStatus::Pass => Truth::True,
            CheckStatus::Fail => Truth::False,
            _ => Truth::Undecided,
        };
        if let Some(reason) = inv.reason {
            report.notes.push(format!("lambda = {l}: {reason}"));
        }
        report.rows.push(
            ScanRow::new("local(R(lambda)) via inverse")
                .lambda(l)
                .verdict(v)
                .residual(inv.inverse_local.and_then(|x| x.residual)),
        );
        via_inverse = via_inverse.and(v);
    }
    report.conclusion(Check::new("R(lambda) local via the inverse of lambda I - A", via_inverse));

    let bound = spectral_bound(a.matrix()) + super::SPECTRAL_MARGIN;
    let ladder: Vec<f64> = params
        .lambdas
        .iter()
        .copied()
        .filter(|&l| l >= lambda0 && l > bound)
        .collect();
    if ladder.is_empty() {
        return Err(Error::Resolvent {
            lambda: lambda0,
            reason: format!("no ladder value above both lambda0 and the spectral margin {bound:.6}"),
        });
    }
    let inner = thm_local_resolvents(space, a, &YosidaParams::new(ladder, params.ts.clone())?, xs)?;
    report.notes.push(format!("local resolvent scan: {:?}", inner.status));
    for h in inner.hypotheses {
        if !h.value.is_true() {
            report.hypothesis(h);
        }
    }
    report.conclusions.extend(inner.conclusions);
    report.rows.extend(inner.rows);
    report.witnesses.extend(inner.witnesses);
    report.notes.extend(inner.notes);
    report.finish();
    Ok(report)
}
