//! Standard spaces and random space generation.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::order::OrderedSpace;

/// `ℝⁿ` with the coordinatewise cone.
pub fn standard(n: usize) -> OrderedSpace {
    OrderedSpace::new(DMatrix::identity(n, n))
        .expect("identity functionals give a valid cone")
        .with_name(format!("standard{n}"))
}

/// Cone in `ℝ³` over a square, with dual functionals `(±1, ±1, 1)`.
pub fn four_ray() -> OrderedSpace {
    OrderedSpace::from_rows(&[
        vec![1.0, 1.0, 1.0],
        vec![1.0, -1.0, 1.0],
        vec![-1.0, 1.0, 1.0],
        vec![-1.0, -1.0, 1.0],
    ])
    .expect("four-ray cone is valid")
    .with_name("four_ray")
}

/// Cone in `ℝ³` over a regular `k`-gon, functionals `(cos θ_i, sin θ_i, 1)`.
pub fn polygon(k: usize) -> OrderedSpace {
    let angles: Vec<f64> = (0..k).map(|i| 2.0 * PI * i as f64 / k as f64).collect();
    polygon_with_angles(&angles)
        .expect("regular polygon cone is valid")
        .with_name(format!("polygon{k}"))
}

/// Polygon cone with given normal angles. The largest angular gap must be
/// below `π` for the cone to be pointed.
pub fn polygon_with_angles(angles: &[f64]) -> Result<OrderedSpace> {
    let rows: Vec<Vec<f64>> = angles.iter().map(|t| vec![t.cos(), t.sin(), 1.0]).collect();
    OrderedSpace::from_rows(&rows)
}

/// Block-diagonal direct sum of the spaces' functionals.
pub fn direct_sum(parts: &[OrderedSpace]) -> Result<OrderedSpace> {
    if parts.is_empty() {
        return Err(Error::InvalidInput("direct sum of no spaces".into()));
    }
    let n: usize = parts.iter().map(|p| p.dim()).sum();
    let m: usize = parts.iter().map(|p| p.num_rows()).sum();
    let mut phi = DMatrix::zeros(m, n);
    let (mut r, mut c) = (0, 0);
    for p in parts {
        phi.view_mut((r, c), (p.num_rows(), p.dim())).copy_from(p.phi());
        r += p.num_rows();
        c += p.dim();
    }
    let name = parts.iter().map(|p| p.name()).collect::<Vec<_>>().join("+");
    Ok(OrderedSpace::new(phi)?.with_name(name))
}

/// Image of the space under the invertible map `s`: functionals `Φ s⁻¹`.
pub fn transformed(space: &OrderedSpace, s: &DMatrix<f64>) -> Result<OrderedSpace> {
    let inv = s
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("transformation is not invertible".into()))?;
    Ok(OrderedSpace::new(space.phi() * inv)?.with_name(space.name().to_string()))
}

#[derive(Debug, Clone)]
pub struct RandomSpaceOptions {
    pub max_dim: usize,
    pub max_rows: usize,
    /// Add nonnegative combinations of existing functionals.
    pub redundant_rows: bool,
}

impl Default for RandomSpaceOptions {
    fn default() -> Self {
        Self {
            max_dim: 6,
            max_rows: 12,
            redundant_rows: true,
        }
    }
}

/// Random direct sum of half-lines and polygon cones over random
/// quadrilaterals, pentagons and hexagons, moved by a random linear map with
/// condition number at most 4 and rescaled row by row.
pub fn random_space<R: Rng>(rng: &mut R, opts: &RandomSpaceOptions) -> OrderedSpace {
    loop {
        let mut parts = Vec::new();
        let (mut n, mut m) = (0usize, 0usize);
        let target_dim = rng.random_range(2..=opts.max_dim.max(2));
        while n < target_dim {
            let choice = rng.random_range(0..4);
            let (dn, dm) = match choice {
                0 => (1, 1),
                1 => (3, 4),
                2 => (3, 5),
                _ => (3, 6),
            };
            if n + dn > opts.max_dim || m + dm > opts.max_rows {
                if n + 1 <= opts.max_dim && m + 1 <= opts.max_rows {
                    parts.push(standard(1));
                    n += 1;
                    m += 1;
                    continue;
                }
                break;
            }
            let part = if dn == 1 {
                standard(1)
            } else {
                random_polygon(rng, dm)
            };
            parts.push(part);
            n += dn;
            m += dm;
        }
        if parts.is_empty() {
            continue;
        }
        let Ok(sum) = direct_sum(&parts) else {
            continue;
        };
        let s = random_conditioned(rng, n, 4.0);
        let Ok(moved) = transformed(&sum, &s) else {
            continue;
        };
        let mut phi = moved.phi().clone();
        for mut row in phi.row_iter_mut() {
            row *= rng.random_range(0.5..2.0);
        }
        let mut rows: Vec<Vec<f64>> = crate::linalg::to_rows(&phi);
        if opts.redundant_rows {
            let spare = opts.max_rows.saturating_sub(m).min(2);
            let extra = rng.random_range(0..=spare);
            for _ in 0..extra {
                let a = rng.random_range(0..m);
                let b = rng.random_range(0..m);
                let (wa, wb) = (rng.random_range(0.2..1.0), rng.random_range(0.2..1.0));
                let row: Vec<f64> = (0..n).map(|i| wa * rows[a][i] + wb * rows[b][i]).collect();
                let at = rng.random_range(0..=rows.len());
                rows.insert(at, row);
            }
        }
        if let Ok(space) = OrderedSpace::from_rows(&rows) {
            return space.with_name(sum.name().to_string());
        }
    }
}

/// Polygon cone over `k` normals with jittered angles; consecutive gaps stay
/// below `π`.
pub fn random_polygon<R: Rng>(rng: &mut R, k: usize) -> OrderedSpace {
    let offset = rng.random_range(0.0..2.0 * PI);
    let angles: Vec<f64> = (0..k)
        .map(|i| offset + 2.0 * PI * (i as f64 + rng.random_range(-0.3..0.3)) / k as f64)
        .collect();
    polygon_with_angles(&angles)
        .expect("gaps below pi give a pointed generating cone")
        .with_name(format!("polygon{k}"))
}

/// `Q diag(d) Qᵀ`-style map with singular values in `[1, cond]` up to scale.
pub fn random_conditioned<R: Rng>(rng: &mut R, n: usize, cond: f64) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q1 = g.qr().q();
    let g2 = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q2 = g2.qr().q();
    let d = DVector::from_fn(n, |_, _| rng.random_range(1.0..cond));
    q1 * DMatrix::from_diagonal(&d) * q2.transpose()
}
