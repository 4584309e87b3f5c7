//! Dense two-phase tableau simplex.
//!
//! The problem is brought to the form `A z = b, z >= 0, b >= 0` with one
//! artificial column per row. Artificial columns stay in the tableau for the
//! whole run (they are only barred from re-entering in phase 2), so their
//! reduced costs give the row multipliers directly: `y = 1 - d_art` after
//! phase 1 and `y = -d_art` after phase 2.

use super::scalar::Scalar;
use super::{LinearProgram, LpStatus};
use crate::error::{Error, Result};

/// Dantzig pivots that make no progress before switching to Bland's rule.
const DEGENERACY_BUDGET: usize = 64;

/// Pivots between rebuilds of a floating-point tableau from the original rows.
const REFACTOR_EVERY: usize = 32;

pub(crate) struct RawOutcome {
    pub status: LpStatus,
    pub value: f64,
    pub witness: Vec<f64>,
    pub certificate: Vec<f64>,
}

enum Phase {
    Optimal,
    Unbounded(usize),
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    obj: Vec<T>,
    basis: Vec<usize>,
    rhs: usize,
    /// Rows as first assembled, used to rebuild the tableau.
    orig: Vec<Vec<T>>,
    /// Cost of the current phase, one entry per column.
    cost: Vec<T>,
}

impl<T: Scalar> Tableau<T> {
    /// Reduced costs and objective value of `cost` under the current basis.
    fn price(&mut self) {
        let ncols = self.rhs;
        let mut obj = vec![T::zero(); ncols + 1];
        obj[..ncols].clone_from_slice(&self.cost);
        for (i, row) in self.rows.iter().enumerate() {
            let cb = self.cost[self.basis[i]].clone();
            if cb.is_zero() {
                continue;
            }
            for c in 0..=ncols {
                obj[c] = obj[c].clone() - cb.clone() * row[c].clone();
            }
        }
        self.obj = obj;
    }

    /// Recomputes `B⁻¹ [A | b]` from the original rows by Gauss-Jordan
    /// elimination with partial pivoting, discarding accumulated round-off.
    /// Leaves the tableau untouched if the basis looks singular.
    fn refactor(&mut self) {
        let nrows = self.rows.len();
        let mut work = self.orig.clone();
        let mut assigned = vec![false; nrows];
        let mut new_basis = vec![0usize; nrows];
        let mut order: Vec<usize> = self.basis.clone();
        order.sort_unstable();
        for &col in &order {
            let mut best: Option<(usize, T)> = None;
            for (i, row) in work.iter().enumerate() {
                if assigned[i] {
                    continue;
                }
                let a = row[col].abs_val();
                if best.as_ref().is_none_or(|(_, b)| a > *b) {
                    best = Some((i, a));
                }
            }
            let Some((r, mag)) = best else { return };
            if mag <= T::pivot_tol() {
                return;
            }
            let piv = work[r][col].clone();
            for v in work[r].iter_mut() {
                *v = v.clone() / piv.clone();
            }
            let prow = work[r].clone();
            for (i, row) in work.iter_mut().enumerate() {
                if i == r {
                    continue;
                }
                let f = row[col].clone();
                if f.is_zero() {
                    continue;
                }
                for (v, p) in row.iter_mut().zip(prow.iter()) {
                    if !p.is_zero() {
                        *v = v.clone() - f.clone() * p.clone();
                    }
                }
            }
            assigned[r] = true;
            new_basis[r] = col;
        }
        for row in work.iter_mut() {
            for v in row.iter_mut() {
                *v = v.clone().flush();
            }
        }
        self.rows = work;
        self.basis = new_basis;
        self.price();
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let piv = self.rows[r][q].clone();
        for v in self.rows[r].iter_mut() {
            *v = (v.clone() / piv.clone()).flush();
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[q].clone();
            if f.is_zero() {
                continue;
            }
            for (v, p) in row.iter_mut().zip(pivot_row.iter()) {
                if !p.is_zero() {
                    *v = (v.clone() - f.clone() * p.clone()).flush();
                }
            }
        }
        let f = self.obj[q].clone();
        if !f.is_zero() {
            for (v, p) in self.obj.iter_mut().zip(pivot_row.iter()) {
                if !p.is_zero() {
                    *v = (v.clone() - f.clone() * p.clone()).flush();
                }
            }
        }
        self.basis[r] = q;
    }

    fn clamped_rhs(&self, i: usize) -> T {
        let b = &self.rows[i][self.rhs];
        if *b < T::zero() {
            T::zero()
        } else {
            b.clone()
        }
    }

    /// Minimum ratio, ties broken by the smallest basic index.
    fn textbook_ratio(&self, q: usize, piv_tol: &T) -> Option<(usize, T)> {
        let mut leaving: Option<(usize, T)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if row[q] > *piv_tol {
                let ratio = self.clamped_rhs(i) / row[q].clone();
                let better = match &leaving {
                    None => true,
                    Some((l, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        leaving
    }

    /// Two-pass ratio test: among rows whose ratio is within a small
    /// feasibility slack of the minimum, take the largest pivot element.
    fn harris_ratio(&self, q: usize, piv_tol: &T) -> Option<(usize, T)> {
        let col_max = self
            .rows
            .iter()
            .map(|r| r[q].abs_val())
            .fold(T::zero(), |a, b| if b > a { b } else { a });
        // relative threshold keeps tiny entries of a large column out
        let rel = T::from_f64(1e-9) * col_max;
        let tol = if rel > *piv_tol { rel } else { piv_tol.clone() };
        let slack = T::from_f64(1e-9);
        let mut bound: Option<T> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if row[q] > tol {
                let r = (self.clamped_rhs(i) + slack.clone()) / row[q].clone();
                if bound.as_ref().is_none_or(|b| r < *b) {
                    bound = Some(r);
                }
            }
        }
        let bound = bound?;
        let mut leaving: Option<(usize, T)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if row[q] > tol {
                let ratio = self.clamped_rhs(i) / row[q].clone();
                if ratio <= bound
                    && leaving
                        .as_ref()
                        .is_none_or(|(l, _)| row[q] > self.rows[*l][q])
                {
                    leaving = Some((i, ratio));
                }
            }
        }
        leaving
    }

    /// Runs simplex iterations with entering columns restricted to `0..allowed`.
    /// With `bounded` set the objective is known to be bounded below, so a
    /// column without an admissible pivot only carries round-off and is
    /// barred instead of reported as a ray.
    fn run(&mut self, allowed: usize, bounded: bool) -> Result<Phase> {
        let ncols = self.obj.len();
        let cap = 100 * (self.rows.len() + ncols) + 1000;
        let neg_cost_tol = -T::cost_tol();
        let piv_tol = T::pivot_tol();
        let mut degenerate = 0usize;
        let mut bland = false;
        let mut barred = vec![false; allowed];
        let mut pivots = 0usize;
        for _ in 0..cap {
            let mut entering: Option<usize> = None;
            for c in 0..allowed {
                if self.obj[c] < neg_cost_tol && !barred[c] {
                    match entering {
                        None => entering = Some(c),
                        Some(e) if !bland && self.obj[c] < self.obj[e] => entering = Some(c),
                        _ => {}
                    }
                    if bland {
                        break;
                    }
                }
            }
            let Some(q) = entering else {
                return Ok(Phase::Optimal);
            };
            let leaving = if bland || T::is_exact() {
                self.textbook_ratio(q, &piv_tol)
            } else {
                self.harris_ratio(q, &piv_tol)
            };
            let Some((r, ratio)) = leaving else {
                if bounded {
                    barred[q] = true;
                    continue;
                }
                return Ok(Phase::Unbounded(q));
            };
            if ratio.is_zero() {
                degenerate += 1;
                if degenerate > DEGENERACY_BUDGET {
                    bland = true;
                }
            }
            self.pivot(r, q);
            pivots += 1;
            if !T::is_exact() && pivots % REFACTOR_EVERY == 0 {
                self.refactor();
            }
        }
        Err(Error::Numerical(format!(
            "simplex iteration cap {cap} exceeded"
        )))
    }
}

pub(crate) fn solve<T: Scalar>(lp: &LinearProgram) -> Result<RawOutcome> {
    let d = lp.num_vars();
    let k = lp.ineq.nrows();
    let e = lp.eq.nrows();
    let nrows = k + e;

    // structural columns: x_j, plus a negative part for free variables
    let mut neg_col = vec![None; d];
    let mut n_struct = d;
    for (j, slot) in neg_col.iter_mut().enumerate() {
        if lp.free[j] {
            *slot = Some(n_struct);
            n_struct += 1;
        }
    }
    let slack0 = n_struct;
    let art0 = slack0 + k;
    let ncols = art0 + nrows;
    let rhs = ncols;

    let mut sign = vec![1.0f64; nrows];
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(nrows);
    for i in 0..nrows {
        let (coef, b) = if i < k {
            (lp.ineq.row(i), lp.ineq_rhs[i])
        } else {
            (lp.eq.row(i - k), lp.eq_rhs[i - k])
        };
        let s = if b < 0.0 { -1.0 } else { 1.0 };
        sign[i] = s;
        let mut row = vec![T::zero(); ncols + 1];
        for j in 0..d {
            let a = coef[j];
            if a != 0.0 {
                row[j] = T::from_f64(s * a);
                if let Some(nc) = neg_col[j] {
                    row[nc] = T::from_f64(-s * a);
                }
            }
        }
        if i < k {
            row[slack0 + i] = T::from_f64(-s);
        }
        row[art0 + i] = T::from_f64(1.0);
        row[rhs] = T::from_f64(s * b);
        rows.push(row);
    }

    let mut obj = vec![T::zero(); ncols + 1];
    for row in &rows {
        for c in 0..art0 {
            obj[c] = obj[c].clone() - row[c].clone();
        }
        obj[rhs] = obj[rhs].clone() - row[rhs].clone();
    }
    let mut phase_one_cost = vec![T::zero(); ncols];
    for c in phase_one_cost.iter_mut().skip(art0) {
        *c = T::from_f64(1.0);
    }
    let mut tab = Tableau {
        orig: rows.clone(),
        rows,
        obj,
        basis: (art0..art0 + nrows).collect(),
        rhs,
        cost: phase_one_cost,
    };

    if let Phase::Unbounded(_) = tab.run(ncols, true)? {
        return Err(Error::Invariant(
            "phase-one objective reported unbounded".into(),
        ));
    }
    if !T::is_exact() {
        tab.refactor();
    }
    let infeasibility = -tab.obj[rhs].to_f64();
    let b_scale = 1.0
        + lp.ineq_rhs.iter().chain(lp.eq_rhs.iter()).fold(0.0f64, |a, v| a.max(v.abs()));
    let infeasible = if T::is_exact() {
        !tab.obj[rhs].is_zero()
    } else {
        infeasibility > lp.tol.feas * b_scale
    };
    if infeasible {
        // y_i = 1 - d_art_i, mapped back through the row flips
        let one = T::from_f64(1.0);
        let mut y: Vec<T> = (0..nrows)
            .map(|i| {
                let v = one.clone() - tab.obj[art0 + i].clone();
                if sign[i] < 0.0 {
                    -v
                } else {
                    v
                }
            })
            .collect();
        let mut dot = T::zero();
        for (i, yi) in y.iter().enumerate() {
            let b = if i < k { lp.ineq_rhs[i] } else { lp.eq_rhs[i - k] };
            dot = dot + yi.clone() * T::from_f64(b);
        }
        if dot > T::zero() {
            for v in y.iter_mut() {
                *v = v.clone() / dot.clone();
            }
        }
        return Ok(RawOutcome {
            status: LpStatus::Infeasible,
            value: f64::INFINITY,
            witness: Vec::new(),
            certificate: y.iter().map(|v| v.to_f64()).collect(),
        });
    }

    // drive zero-level artificials out of the basis where possible
    for r in 0..nrows {
        if tab.basis[r] >= art0 {
            let col = (0..art0).find(|&c| tab.rows[r][c].abs_val() > T::pivot_tol());
            if let Some(c) = col {
                tab.pivot(r, c);
            }
        }
    }

    let mut cost = vec![T::zero(); ncols];
    for j in 0..d {
        cost[j] = T::from_f64(lp.objective[j]);
        if let Some(nc) = neg_col[j] {
            cost[nc] = T::from_f64(-lp.objective[j]);
        }
    }
    tab.cost = cost;
    tab.price();

    let mut phase = tab.run(art0, false)?;
    if !T::is_exact() {
        tab.refactor();
        if let Phase::Optimal = phase {
            // round-off removed by the rebuild may leave a few more pivots
            phase = tab.run(art0, false)?;
        }
    }
    let mut z = vec![T::zero(); ncols];
    for (i, &b) in tab.basis.iter().enumerate() {
        z[b] = tab.rows[i][rhs].clone();
    }
    let to_x = |z: &[T]| -> Vec<f64> {
        (0..d)
            .map(|j| {
                let mut v = z[j].clone();
                if let Some(nc) = neg_col[j] {
                    v = v - z[nc].clone();
                }
                v.to_f64()
            })
            .collect()
    };
    let witness = to_x(&z);

    match phase {
        Phase::Optimal => {
            let y: Vec<f64> = (0..nrows)
                .map(|i| {
                    let v = -tab.obj[art0 + i].to_f64();
                    v * sign[i]
                })
                .collect();
            Ok(RawOutcome {
                status: LpStatus::Optimal,
                value: -tab.obj[rhs].to_f64(),
                witness,
                certificate: y,
            })
        }
        Phase::Unbounded(q) => {
            let mut dz = vec![T::zero(); ncols];
            dz[q] = T::from_f64(1.0);
            for (i, &b) in tab.basis.iter().enumerate() {
                dz[b] = -tab.rows[i][q].clone();
            }
            let mut ray = to_x(&dz);
            let scale = ray.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if scale > 0.0 {
                for v in ray.iter_mut() {
                    *v /= scale;
                }
            }
            Ok(RawOutcome {
                status: LpStatus::Unbounded,
                value: f64::NEG_INFINITY,
                witness,
                certificate: ray,
            })
        }
    }
}
