//! Certificate checks that use only the raw problem data.

use nalgebra::DVector;

use super::{LinearProgram, LpOutcome, LpStatus};
use crate::error::{Error, Result};

/// Largest constraint violation of `x`, each row scaled by its magnitude.
pub fn max_violation(lp: &LinearProgram, x: &[f64]) -> f64 {
    let x = DVector::from_column_slice(x);
    let mut worst = 0.0f64;
    for i in 0..lp.ineq.nrows() {
        let row = lp.ineq.row(i);
        let act: f64 = row.iter().zip(x.iter()).map(|(a, v)| a * v).sum();
        let scale = 1.0
            + lp.ineq_rhs[i].abs()
            + row.iter().zip(x.iter()).map(|(a, v)| (a * v).abs()).sum::<f64>();
        worst = worst.max((lp.ineq_rhs[i] - act) / scale);
    }
    for i in 0..lp.eq.nrows() {
        let row = lp.eq.row(i);
        let act: f64 = row.iter().zip(x.iter()).map(|(a, v)| a * v).sum();
        let scale = 1.0
            + lp.eq_rhs[i].abs()
            + row.iter().zip(x.iter()).map(|(a, v)| (a * v).abs()).sum::<f64>();
        worst = worst.max((lp.eq_rhs[i] - act).abs() / scale);
    }
    for (j, v) in x.iter().enumerate() {
        if !lp.free[j] {
            worst = worst.max(-v);
        }
    }
    worst
}

/// `Gᵀλ + Eᵀμ` for a multiplier vector laid out as `(λ, μ)`.
fn transposed_combination(lp: &LinearProgram, y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let k = lp.ineq.nrows();
    let d = lp.num_vars();
    let mut combo = vec![0.0; d];
    let mut mag = vec![0.0; d];
    for j in 0..d {
        for i in 0..k {
            let t = lp.ineq[(i, j)] * y[i];
            combo[j] += t;
            mag[j] += t.abs();
        }
        for i in 0..lp.eq.nrows() {
            let t = lp.eq[(i, j)] * y[k + i];
            combo[j] += t;
            mag[j] += t.abs();
        }
    }
    (combo, mag)
}

fn rhs_dot(lp: &LinearProgram, y: &[f64]) -> (f64, f64) {
    let k = lp.ineq.nrows();
    let mut dot = 0.0;
    let mut mag = 0.0;
    for i in 0..k {
        dot += lp.ineq_rhs[i] * y[i];
        mag += (lp.ineq_rhs[i] * y[i]).abs();
    }
    for i in 0..lp.eq.nrows() {
        dot += lp.eq_rhs[i] * y[k + i];
        mag += (lp.eq_rhs[i] * y[k + i]).abs();
    }
    (dot, mag)
}

/// Primal feasibility, objective value, dual feasibility and zero gap.
pub fn verify_optimal(lp: &LinearProgram, out: &LpOutcome) -> Result<()> {
    let tol = lp.tol;
    let x = &out.witness;
    let viol = max_violation(lp, x);
    if viol > tol.feas {
        return Err(Error::Numerical(format!(
            "optimal witness violates constraints by {viol:.3e}"
        )));
    }
    let cx: f64 = lp.objective.iter().zip(x.iter()).map(|(c, v)| c * v).sum();
    if (cx - out.value).abs() > tol.obj * (1.0 + out.value.abs()) {
        return Err(Error::Numerical(format!(
            "objective {cx} disagrees with reported value {}",
            out.value
        )));
    }
    let y = &out.certificate;
    let k = lp.ineq.nrows();
    if y.len() != k + lp.eq.nrows() {
        return Err(Error::Numerical("dual vector has wrong length".into()));
    }
    let ymax = y.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if y[..k].iter().any(|&l| l < -tol.feas * ymax) {
        return Err(Error::Numerical("negative inequality multiplier".into()));
    }
    let (combo, mag) = transposed_combination(lp, y);
    for j in 0..lp.num_vars() {
        let reduced = lp.objective[j] - combo[j];
        let scale = 1.0 + lp.objective[j].abs() + mag[j];
        let bad = if lp.free[j] {
            reduced.abs() > tol.obj * scale
        } else {
            reduced < -tol.obj * scale
        };
        if bad {
            return Err(Error::Numerical(format!(
                "dual infeasible at variable {j}: reduced cost {reduced:.3e}"
            )));
        }
    }
    let (dual_value, dmag) = rhs_dot(lp, y);
    // Complementary slackness may leave a tiny gap on nonneg columns; scale by
    // the magnitudes involved.
    let xs = x.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let scale = 1.0 + out.value.abs() + dmag + xs * mag.iter().fold(0.0f64, |a, v| a.max(*v));
    if (dual_value - out.value).abs() > tol.obj * scale {
        return Err(Error::Numerical(format!(
            "duality gap {:.3e} between {} and {}",
            dual_value - out.value,
            out.value,
            dual_value
        )));
    }
    Ok(())
}

/// Farkas alternative: `λ >= 0`, `Gᵀλ + Eᵀμ <= 0` (`= 0` on free columns),
/// `h·λ + f·μ > 0`.
pub fn verify_farkas(lp: &LinearProgram, y: &[f64]) -> Result<()> {
    let tol = lp.tol;
    let k = lp.ineq.nrows();
    if y.len() != k + lp.eq.nrows() {
        return Err(Error::Numerical("Farkas vector has wrong length".into()));
    }
    let ymax = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if y[..k].iter().any(|&l| l < -tol.feas * ymax) {
        return Err(Error::Numerical(
            "Farkas vector has a negative inequality weight".into(),
        ));
    }
    let (combo, mag) = transposed_combination(lp, y);
    for j in 0..lp.num_vars() {
        let scale = tol.feas * (ymax + mag[j]);
        let bad = if lp.free[j] {
            combo[j].abs() > scale
        } else {
            combo[j] > scale
        };
        if bad {
            return Err(Error::Numerical(format!(
                "Farkas combination nonzero at variable {j}: {:.3e}",
                combo[j]
            )));
        }
    }
    let (dot, dmag) = rhs_dot(lp, y);
    if dot <= tol.feas * (ymax + dmag) {
        return Err(Error::Numerical(format!(
            "Farkas right-hand side {dot:.3e} is not positive"
        )));
    }
    Ok(())
}

/// Improving ray of a feasible problem: `G r >= 0`, `E r = 0`, `r_j >= 0` on
/// non-free columns and `c·r < 0`.
pub fn verify_ray(lp: &LinearProgram, witness: &[f64], ray: &[f64]) -> Result<()> {
    let tol = lp.tol;
    let viol = max_violation(lp, witness);
    if viol > tol.feas {
        return Err(Error::Numerical(format!(
            "unbounded witness violates constraints by {viol:.3e}"
        )));
    }
    let r = DVector::from_column_slice(ray);
    let rmax = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if rmax == 0.0 {
        return Err(Error::Numerical("zero ray".into()));
    }
    let gr = &lp.ineq * &r;
    let er = &lp.eq * &r;
    let gmax = lp.ineq.iter().chain(lp.eq.iter()).fold(1.0f64, |a, v| a.max(v.abs()));
    let t = tol.feas * gmax * rmax * (lp.num_vars() as f64);
    if gr.iter().any(|&v| v < -t) || er.iter().any(|&v| v.abs() > t) {
        return Err(Error::Numerical("ray leaves the recession cone".into()));
    }
    if (0..lp.num_vars()).any(|j| !lp.free[j] && r[j] < -t) {
        return Err(Error::Numerical("ray violates a sign constraint".into()));
    }
    let cr = lp.objective.dot(&r);
    if cr >= -tol.obj * rmax {
        return Err(Error::Numerical(format!("ray is not improving: c·r = {cr:.3e}")));
    }
    Ok(())
}

pub fn check_outcome(lp: &LinearProgram, out: &LpOutcome) -> Result<()> {
    match out.status {
        LpStatus::Optimal => verify_optimal(lp, out),
        LpStatus::Infeasible => verify_farkas(lp, &out.certificate),
        LpStatus::Unbounded => verify_ray(lp, &out.witness, &out.certificate),
    }
}
