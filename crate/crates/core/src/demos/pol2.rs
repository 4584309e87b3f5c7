//! Grid functions on `[0, 1)` that are quadratic polynomials on `[0, 1/2]`.
//!
//! A function is stored as `(a₀, a₁, a₂, x(s_1), …, x(s_K))`: the
//! polynomial coefficients and the free values at the grid points beyond
//! `1/2`. Evaluation at the grid points gives the dual functionals, so the
//! cone is the set of functions that are nonnegative on the grid.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::Grid;
use crate::cover::{canonicalize, DensityReport, LatticeCover};
use crate::error::{Error, Result};
use crate::operators::{cover_multiplication, is_local, LinOp};
use crate::order::{is_disjoint_oracle, make_space, OrderedSpace};
use crate::report::{Check, ScanReport, ScanRow};
use crate::semigroups::{convergence_samples, cor_positive_resolvents, YosidaParams, LAMBDA_LADDER, T_GRID};
use crate::tol::Truth;

const HALF: f64 = 0.5;

/// Settings for the polynomial-block demo. The multiplier is
/// `q(s) = q_left` on `[0, 1/2]` and `q_left - q_slope (s - 1/2)` beyond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Pol2Config {
    /// Points of the half-open grid `k/points`, `k < points`.
    pub points: usize,
    pub q_left: f64,
    pub q_slope: f64,
    /// Defaults to `max(0, sup q) + 1`.
    pub lambda0: Option<f64>,
    pub lambdas: Vec<f64>,
    pub ts: Vec<f64>,
    pub density_samples: usize,
    pub seed: u64,
}

impl Default for Pol2Config {
    fn default() -> Self {
        Self {
            points: 12,
            q_left: 0.5,
            q_slope: 3.0,
            lambda0: None,
            lambdas: LAMBDA_LADDER.to_vec(),
            ts: T_GRID.to_vec(),
            density_samples: 256,
            seed: 0,
        }
    }
}

impl Pol2Config {
    pub fn multiplier(&self, grid: &Grid) -> Vec<f64> {
        grid.points()
            .iter()
            .map(|&s| if s <= HALF { self.q_left } else { self.q_left - self.q_slope * (s - HALF) })
            .collect()
    }
}

/// The polynomial-block space with its certified cover.
#[derive(Debug, Clone)]
pub struct Pol2Space {
    grid: Grid,
    poly_points: usize,
    evaluation: DMatrix<f64>,
    cover: LatticeCover,
}

impl Pol2Space {
    pub fn space(&self) -> &OrderedSpace {
        self.cover.space()
    }

    pub fn cover(&self) -> &LatticeCover {
        &self.cover
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of grid points in `[0, 1/2]`.
    pub fn poly_points(&self) -> usize {
        self.poly_points
    }

    /// Maps coordinates to grid samples.
    pub fn evaluation(&self) -> &DMatrix<f64> {
        &self.evaluation
    }

    pub fn samples(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.evaluation * c
    }

    /// Coordinates of the function that is the polynomial `a` on
    /// `[0, 1/2]` and takes the values `tail` beyond.
    pub fn coords(&self, a: [f64; 3], tail: &[f64]) -> Result<DVector<f64>> {
        let k = self.grid.len() - self.poly_points;
        if tail.len() != k {
            return Err(Error::Dimension(format!("{} tail values for {k} points", tail.len())));
        }
        Ok(DVector::from_iterator(3 + k, a.into_iter().chain(tail.iter().copied())))
    }

    /// Multiplication by grid values `q`, which must be constant on
    /// `[0, 1/2]` so that products stay quadratic there.
    pub fn multiplication(&self, q: &[f64]) -> Result<LinOp> {
        if q.len() != self.grid.len() {
            return Err(Error::Dimension(format!(
                "multiplier of length {} on {} grid points",
                q.len(),
                self.grid.len()
            )));
        }
        let c = q[0];
        if q[..self.poly_points].iter().any(|&v| (v - c).abs() > 1e-12 * (1.0 + c.abs())) {
            return Err(Error::InvalidInput(
                "multiplier must be constant on [0, 1/2] to keep the polynomial block".into(),
            ));
        }
        let kept: Vec<f64> = self.cover.kept_rows().iter().map(|&j| q[j]).collect();
        cover_multiplication(self.space(), &kept)
    }
}

/// Builds the space on a grid in `[0, 1)` with at least three points in
/// `[0, 1/2]` and one beyond, and certifies its lattice cover.
pub fn pol2_space(grid: &Grid) -> Result<Pol2Space> {
    let pts = grid.points();
    if pts.first().is_some_and(|&p| p < 0.0) || pts.last().is_some_and(|&p| p >= 1.0) {
        return Err(Error::InvalidInput("grid must lie in [0, 1)".into()));
    }
    let poly_points = pts.iter().filter(|&&s| s <= HALF).count();
    let k = pts.len() - poly_points;
    if poly_points < 3 {
        return Err(Error::InvalidInput(format!(
            "rank failure: {poly_points} grid points in [0, 1/2] cannot determine a quadratic"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidInput("grid needs a point in (1/2, 1)".into()));
    }
    let n = 3 + k;
    let evaluation = DMatrix::from_fn(pts.len(), n, |i, c| {
        if i < poly_points {
            if c < 3 {
                pts[i].powi(c as i32)
            } else {
                0.0
            }
        } else if c == 3 + (i - poly_points) {
            1.0
        } else {
            0.0
        }
    });
    let space = make_space(evaluation.clone())?.with_name(format!("pol2_{}", pts.len()));
    let cover = canonicalize(&space)?;
    Ok(Pol2Space {
        grid: grid.clone(),
        poly_points,
        evaluation,
        cover,
    })
}

/// Space construction, cover certification, a disjointness check across
/// `1/2`, and the positive-resolvent pipeline for a multiplier constant on
/// `[0, 1/2]`.
pub fn pol2_demo(cfg: &Pol2Config) -> Result<(ScanReport, DensityReport)> {
    let grid = Grid::half_open(0.0, 1.0, cfg.points)?;
    let pol = pol2_space(&grid)?;
    let space = pol.space();
    let mut report = ScanReport::new("pol2");
    report.notes.push(
        "order density of the grid cone is certified here by sampling; it is a separate fact from density of the continuous space"
            .into(),
    );
    report.hypothesis(Check::new("pointed and generating", Truth::True));
    report.hypothesis(Check::new("cover certified", Truth::from_bool(space.is_cover_certified())));
    let density = pol.cover().certify_order_density(cfg.density_samples, cfg.seed)?;
    report.hypothesis(Check::new("order density on samples", Truth::from_bool(density.passed)));

    // a function living beyond 1/2 and one vanishing there
    let k = grid.len() - pol.poly_points();
    let mut tail = vec![0.0; k];
    tail[0] = 1.0;
    let right = pol.coords([0.0; 3], &tail)?;
    let left = pol.coords([1.0, 0.0, 0.0], &vec![0.0; k])?;
    let dj = is_disjoint_oracle(space, &right, &left)?.truth;
    report.rows.push(ScanRow::new("disjoint(right, left)").verdict(dj));
    report.conclusion(Check::new("functions on opposite sides of 1/2 are disjoint", dj));

    let q = cfg.multiplier(&grid);
    let a = pol.multiplication(&q)?;
    let av = is_local(space, &a)?;
    report.rows.push(ScanRow::new("local(A)").verdict(av.value).residual(av.residual));
    report.conclusion(Check::new("A local", av.value));

    let sup_q = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lambda0 = cfg.lambda0.unwrap_or(sup_q.max(0.0) + 1.0);
    if lambda0 <= sup_q {
        report.notes.push(format!("lambda0 = {lambda0} does not exceed sup q = {sup_q}"));
    }
    let params = YosidaParams::new(cfg.lambdas.clone(), cfg.ts.clone())?;
    let cor = cor_positive_resolvents(space, &a, lambda0, &params, &convergence_samples(space.dim()))?;
    report.variant = cor.variant.clone();
    report.absorb("positive resolvents", cor);
    report.finish();
    Ok((report, density))
}
