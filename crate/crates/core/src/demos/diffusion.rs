//! The Neumann heat kernel on `[0, 1]`,
//! `K_t(x, y) = 1 + 2 Σ_{n>=1} e^{-π²n²t} cos(πnx) cos(πny)`, and the
//! failure of disjointness preservation of `f ↦ ∫ K_t(·, y) f(y) dy`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::Grid;
use crate::catalog;
use crate::error::{Error, Result};
use crate::operators::Certificate;
use crate::order::is_disjoint_oracle;
use crate::report::{Check, ScanReport, ScanRow};
use crate::tol::Truth;

const MAX_TERMS: usize = 1_000_000;
/// Grid refinements tried before a margin failure is reported.
const MAX_REFINEMENTS: usize = 3;

/// Settings for the diffusion demo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiffusionConfig {
    pub grid_points: usize,
    pub ts: Vec<f64>,
    /// Bound required of the truncated series tail.
    pub target: f64,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        Self {
            grid_points: 101,
            ts: vec![0.05, 0.1, 0.5],
            target: 1e-12,
        }
    }
}

/// A kernel value with a bound on its distance to the exact value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelEval {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Number of series terms summed.
    pub terms: usize,
    pub value: f64,
    /// `2 Σ_{n>N} e^{-π²n²t}`, bounded geometrically.
    pub tail_bound: f64,
    /// Floating-point summation error bound.
    pub round_bound: f64,
}

impl KernelEval {
    pub fn bound(&self) -> f64 {
        self.tail_bound + self.round_bound
    }
}

/// `2e^{-π²(N+1)²t} / (1 - e^{-π²(2N+3)t})`, which dominates
/// `2 Σ_{n>N} e^{-π²n²t}` because `n² - (N+1)² >= k(2N+3)` for
/// `n = N + 1 + k`.
fn tail_bound(t: f64, terms: usize) -> f64 {
    let n1 = (terms + 1) as f64;
    let q = (-PI * PI * (2.0 * terms as f64 + 3.0) * t).exp();
    2.0 * (-PI * PI * n1 * n1 * t).exp() / (1.0 - q)
}

fn terms_for(t: f64, target: f64) -> Result<usize> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("heat kernel needs t > 0 (got {t})")));
    }
    if !(target > 0.0) {
        return Err(Error::InvalidInput(format!("accuracy target must be positive (got {target})")));
    }
    // the bound is decreasing in N; start from the estimate and step up
    let guess = ((2.0 / target).ln().max(0.0) / (PI * PI * t)).sqrt().floor() as usize;
    let mut n = guess.saturating_sub(2);
    while tail_bound(t, n) > target {
        n += 1;
        if n > MAX_TERMS {
            return Err(Error::InvalidInput(format!(
                "t = {t} needs more than {MAX_TERMS} series terms"
            )));
        }
    }
    Ok(n)
}

fn round_bound(t: f64, terms: usize) -> f64 {
    let mass: f64 = 1.0 + 2.0 * (1..=terms).map(|n| (-PI * PI * (n * n) as f64 * t).exp()).sum::<f64>();
    4.0 * (terms + 2) as f64 * f64::EPSILON * mass
}

/// Truncated series with the smallest `N` whose tail bound is at most
/// `target`.
pub fn diffusion_kernel(t: f64, x: f64, y: f64, target: f64) -> Result<KernelEval> {
    for v in [x, y] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidInput(format!("kernel argument {v} outside [0, 1]")));
        }
    }
    let terms = terms_for(t, target)?;
    let sum: f64 = (1..=terms)
        .map(|n| {
            let nf = n as f64;
            (-PI * PI * nf * nf * t).exp() * (PI * nf * x).cos() * (PI * nf * y).cos()
        })
        .sum();
    Ok(KernelEval {
        t,
        x,
        y,
        terms,
        value: 1.0 + 2.0 * sum,
        tail_bound: tail_bound(t, terms),
        round_bound: round_bound(t, terms),
    })
}

/// Kernel values on `grid × grid`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelTable {
    pub t: f64,
    pub terms: usize,
    pub tail_bound: f64,
    pub round_bound: f64,
    pub points: Vec<f64>,
    /// `values[i][k] = K_t(points[i], points[k])`.
    pub values: Vec<Vec<f64>>,
    pub min_value: f64,
    /// `min value - tail_bound - round_bound`; positive certifies `K_t > 0`
    /// on the grid.
    pub min_margin: f64,
}

impl KernelTable {
    pub fn positive(&self) -> bool {
        self.min_margin > 0.0
    }

    fn matrix(&self) -> DMatrix<f64> {
        let g = self.points.len();
        DMatrix::from_fn(g, g, |i, k| self.values[i][k])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y,value,tail_bound\n");
        for (i, x) in self.points.iter().enumerate() {
            for (k, y) in self.points.iter().enumerate() {
                out.push_str(&format!("{},{},{},{},{}\n", self.t, x, y, self.values[i][k], self.tail_bound));
            }
        }
        out
    }
}

pub fn kernel_table(t: f64, grid: &Grid, target: f64) -> Result<KernelTable> {
    let pts = grid.points();
    if pts.first().is_some_and(|&p| p < 0.0) || pts.last().is_some_and(|&p| p > 1.0) {
        return Err(Error::InvalidInput("kernel grid must lie in [0, 1]".into()));
    }
    let terms = terms_for(t, target)?;
    let g = pts.len();
    // K = 1 + C diag(2e) Cᵀ with C[i][n] = cos(π(n+1)x_i)
    let c = DMatrix::from_fn(g, terms, |i, n| (PI * (n + 1) as f64 * pts[i]).cos());
    let w = DVector::from_fn(terms, |n, _| {
        let nf = (n + 1) as f64;
        2.0 * (-PI * PI * nf * nf * t).exp()
    });
    let cw = DMatrix::from_fn(g, terms, |i, n| c[(i, n)] * w[n]);
    let k = cw * c.transpose();
    let values: Vec<Vec<f64>> = (0..g).map(|i| (0..g).map(|j| 1.0 + k[(i, j)]).collect()).collect();
    let min_value = values.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let tail = tail_bound(t, terms);
    let round = round_bound(t, terms);
    Ok(KernelTable {
        t,
        terms,
        tail_bound: tail,
        round_bound: round,
        points: pts.to_vec(),
        values,
        min_value,
        min_margin: min_value - tail - round,
    })
}

/// `max(0, 1 - |x - center|/half_width)` sampled on the grid.
pub fn hat(grid: &Grid, center: f64, half_width: f64) -> Vec<f64> {
    grid.points()
        .iter()
        .map(|&x| (1.0 - (x - center).abs() / half_width).max(0.0))
        .collect()
}

/// Nonnegative `f ⊥ g` whose images under the kernel operator are both
/// positive at a common point, with margins exceeding the error budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DpWitness {
    pub t: f64,
    pub x: f64,
    pub x_index: usize,
    pub tf: f64,
    pub tg: f64,
    /// Quadrature plus series error bound for `tf` and `tg`.
    pub budget_f: f64,
    pub budget_g: f64,
    pub grid_points: usize,
    pub kernel_terms: usize,
    /// Oracle verdict on `f ⊥ g` in the grid lattice.
    pub inputs_disjoint: Truth,
    /// Oracle verdict on `T(t)f ⊥ T(t)g` in the grid lattice.
    pub outputs_disjoint: Truth,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl DpWitness {
    pub fn verified(&self) -> bool {
        self.inputs_disjoint.is_true() && self.outputs_disjoint.is_false()
    }
}

/// Sums of `n^p e^{-π²n²t}` over all `n >= 1`, for `p = 1, 2`.
fn derivative_masses(t: f64) -> (f64, f64) {
    let (mut s1, mut s2) = (0.0, 0.0);
    for n in 1..=MAX_TERMS {
        let nf = n as f64;
        let e = (-PI * PI * nf * nf * t).exp();
        s1 += nf * e;
        s2 += nf * nf * e;
        if nf * nf * e < 1e-18 * s2.max(f64::MIN_POSITIVE) && nf * nf * PI * PI * t > 4.0 {
            break;
        }
    }
    (s1, s2)
}

/// Error bound for the trapezoid rule applied to `y ↦ K_t(x, y)f(y)` with
/// `f` the piecewise-linear interpolant of the samples:
/// `Σ h³/12 · max|∂²_y(K f)|` over intervals where `f` is nonzero, using
/// `|∂_y K| <= 2π Σ n e^{-π²n²t}` and `|∂²_y K| <= 2π² Σ n² e^{-π²n²t}`.
fn quadrature_bound(grid: &Grid, f: &[f64], t: f64) -> f64 {
    let (s1, s2) = derivative_masses(t);
    let (d1, d2) = (2.0 * PI * s1, 2.0 * PI * PI * s2);
    let pts = grid.points();
    pts.windows(2)
        .zip(f.windows(2))
        .map(|(x, v)| {
            let h = x[1] - x[0];
            let fmax = v[0].abs().max(v[1].abs());
            if fmax == 0.0 {
                return 0.0;
            }
            let slope = (v[1] - v[0]).abs() / h;
            h * h * h / 12.0 * (d2 * fmax + 2.0 * d1 * slope)
        })
        .sum()
}

fn validate_pair(grid: &Grid, f: &[f64], g: &[f64]) -> Result<()> {
    if f.len() != grid.len() || g.len() != grid.len() {
        return Err(Error::Dimension(format!(
            "functions of length {} and {} on a grid of {} points",
            f.len(),
            g.len(),
            grid.len()
        )));
    }
    if f.iter().chain(g).any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidInput("functions must be finite and nonnegative".into()));
    }
    // the interpolants must have disjoint supports, so no interval may
    // touch both
    let touches = |h: &[f64], i: usize| h[i] > 0.0 || h[i + 1] > 0.0;
    if (0..grid.len().saturating_sub(1)).any(|i| touches(f, i) && touches(g, i)) {
        return Err(Error::InvalidInput(
            "the interpolated functions do not have disjoint supports".into(),
        ));
    }
    Ok(())
}

/// Applies the kernel operator `(T(t)f)(x) = ∫ K_t(x, y) f(y) dy` to `f`
/// and `g` by the trapezoid rule and looks for a grid point where both
/// images are positive beyond the error budget. `None` when either input
/// vanishes or no point clears the budget.
pub fn diffusion_dp_pair(t: f64, grid: &Grid, f: &[f64], g: &[f64], target: f64) -> Result<Option<DpWitness>> {
    validate_pair(grid, f, g)?;
    if f.iter().all(|&v| v == 0.0) || g.iter().all(|&v| v == 0.0) {
        return Ok(None);
    }
    let table = kernel_table(t, grid, target)?;
    let k = table.matrix();
    let w = DVector::from_column_slice(grid.weights());
    let fv = DVector::from_column_slice(f);
    let gv = DVector::from_column_slice(g);
    let tf = &k * fv.component_mul(&w);
    let tg = &k * gv.component_mul(&w);
    let budget = |h: &DVector<f64>| {
        let mass: f64 = h.component_mul(&w).sum();
        quadrature_bound(grid, h.as_slice(), t) + table.bound_per_unit_mass() * mass
    };
    let (bf, bg) = (budget(&fv), budget(&gv));
    let best = (0..grid.len())
        .max_by(|&a, &b| {
            let ma = (tf[a] - bf).min(tg[a] - bg);
            let mb = (tf[b] - bf).min(tg[b] - bg);
            ma.total_cmp(&mb).then(b.cmp(&a))
        })
        .expect("nonempty grid");
    if tf[best] - bf <= 0.0 || tg[best] - bg <= 0.0 {
        return Ok(None);
    }
    let lattice = catalog::standard(grid.len());
    let inputs = is_disjoint_oracle(&lattice, &fv, &gv)?.truth;
    let outputs = is_disjoint_oracle(&lattice, &tf, &tg)?.truth;
    Ok(Some(DpWitness {
        t,
        x: grid.points()[best],
        x_index: best,
        tf: tf[best],
        tg: tg[best],
        budget_f: bf,
        budget_g: bg,
        grid_points: grid.len(),
        kernel_terms: table.terms,
        inputs_disjoint: inputs,
        outputs_disjoint: outputs,
        f: f.to_vec(),
        g: g.to_vec(),
    }))
}

impl KernelTable {
    /// Kernel error per unit of `∫|f|`.
    fn bound_per_unit_mass(&self) -> f64 {
        self.tail_bound + self.round_bound
    }
}

/// Disjoint hats on `[0.1, 0.3]` and `[0.7, 0.9]` on a uniform grid of
/// `[0, 1]`, refining the grid up to three times if the margins do not
/// clear the error budget.
pub fn diffusion_not_dp(t: f64, grid_points: usize, target: f64) -> Result<DpWitness> {
    let mut g = grid_points;
    for _ in 0..=MAX_REFINEMENTS {
        let grid = Grid::uniform(0.0, 1.0, g)?;
        let f = hat(&grid, 0.2, 0.1);
        let h = hat(&grid, 0.8, 0.1);
        if let Some(w) = diffusion_dp_pair(t, &grid, &f, &h, target)? {
            if w.verified() {
                return Ok(w);
            }
        }
        g = 2 * g - 1;
    }
    Err(Error::Numerical(format!(
        "no certified disjointness-preservation witness for t = {t} up to {g} grid points"
    )))
}

/// Kernel positivity and a disjointness-preservation counterexample for
/// each `t`.
pub fn diffusion_demo(cfg: &DiffusionConfig) -> Result<ScanReport> {
    let mut report = ScanReport::new("diffusion");
    report.notes.push(
        "the kernel operator integrates f(y) against K_t(x, y); the f(x) in the source formula is a misprint"
            .into(),
    );
    report.notes.push(
        "locality of the second-derivative generator on C[0,1] cannot be certified on a grid and is out of scope"
            .into(),
    );
    let grid = Grid::uniform(0.0, 1.0, cfg.grid_points)?;
    let mut positive = Truth::True;
    let mut not_dp = Truth::True;
    for &t in &cfg.ts {
        let table = kernel_table(t, &grid, cfg.target)?;
        positive = positive.and(Truth::from_bool(table.positive()));
        report.rows.push(
            ScanRow::new("kernel positive")
                .t(t)
                .verdict(Truth::from_bool(table.positive()))
                .error(table.tail_bound)
                .residual(Some(table.min_margin)),
        );
        let w = diffusion_not_dp(t, cfg.grid_points, cfg.target)?;
        not_dp = not_dp.and(Truth::from_bool(w.verified()));
        report.rows.push(
            ScanRow::new("not disjointness preserving")
                .t(t)
                .verdict(Truth::from_bool(w.verified()))
                .error(w.budget_f.max(w.budget_g))
                .residual(Some((w.tf - w.budget_f).min(w.tg - w.budget_g))),
        );
        report.witnesses.push(Certificate::Pair {
            x: w.f.clone(),
            y: w.g.clone(),
            band: None,
        });
    }
    report.conclusion(Check::new("K_t - tail > 0 on the grid", positive));
    report.conclusion(Check::new("T(t) not disjointness preserving", not_dp));
    report.finish();
    Ok(report)
}
