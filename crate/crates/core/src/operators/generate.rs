//! Random operators with prescribed order properties.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::LinOp;
use crate::error::{Error, Result};
use crate::linalg::{inf_norm, null_space, SPAN_TOL};
use crate::order::{generator_patterns, Band, OrderedSpace};

/// Basis of the space of local operators: matrices `A` with
/// `φ_j(A v) = 0` for every generator band, every `j` in its pattern and
/// every basis vector `v` of the band. Generators suffice because every
/// band is an intersection of them.
pub fn local_operator_basis(space: &OrderedSpace) -> Result<Vec<DMatrix<f64>>> {
    let n = space.dim();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for p in generator_patterns(space)? {
        let band = Band::from_saturated(space, p.clone());
        let u = band.basis();
        for j in p.ones() {
            for c in 0..u.ncols() {
                // coefficient of A[a, b] is φ_j[a]·u[b, c]
                let mut r = vec![0.0; n * n];
                for a in 0..n {
                    for b in 0..n {
                        r[a * n + b] = space.phi()[(j, a)] * u[(b, c)];
                    }
                }
                rows.push(r);
            }
        }
    }
    let k = DMatrix::from_fn(rows.len(), n * n, |i, c| rows[i][c]);
    let null = null_space(&k, SPAN_TOL);
    Ok(null
        .column_iter()
        .map(|col| DMatrix::from_fn(n, n, |a, b| col[a * n + b]))
        .collect())
}

fn normalized(m: DMatrix<f64>) -> DMatrix<f64> {
    let s = inf_norm(&m);
    if s > 0.0 {
        m / s
    } else {
        m
    }
}

/// Random element of the local class with `‖A‖_∞ = 1`.
pub fn random_local_operator<R: Rng>(space: &OrderedSpace, rng: &mut R) -> Result<LinOp> {
    let basis = local_operator_basis(space)?;
    let n = space.dim();
    let mut a = DMatrix::zeros(n, n);
    for b in &basis {
        let c: f64 = rng.sample(StandardNormal);
        a += b * c;
    }
    LinOp::on(space, normalized(a))
}

/// Gaussian matrix with `‖A‖_∞ = 1`.
pub fn random_operator<R: Rng>(space: &OrderedSpace, rng: &mut R) -> Result<LinOp> {
    let n = space.dim();
    let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    LinOp::on(space, normalized(a))
}

/// Multipliers `d ∈ ℝ^{m_c}` for which `diag(d)` maps the image of the
/// cover embedding into itself, as columns. Always contains the constants.
pub fn multiplier_basis(space: &OrderedSpace) -> Result<DMatrix<f64>> {
    space.require_cover()?;
    let phi = space.phi();
    let (m, n) = phi.shape();
    let pinv = pseudo_inverse(phi)?;
    let off_range = DMatrix::identity(m, m) - phi * &pinv;
    // (I - P) diag(d) Φ = 0, one equation per entry
    let k = DMatrix::from_fn(m * n, m, |row, kk| {
        let (i, c) = (row / n, row % n);
        off_range[(i, kk)] * phi[(kk, c)]
    });
    Ok(null_space(&k, SPAN_TOL))
}

fn pseudo_inverse(phi: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    phi.clone()
        .pseudo_inverse(1e-12)
        .map_err(|e| Error::Numerical(format!("pseudo-inverse failed: {e}")))
}

/// The operator acting as multiplication by `q` in cover coordinates:
/// `Φ A = diag(q) Φ`. Fails unless `q` is an admissible multiplier.
pub fn cover_multiplication(space: &OrderedSpace, q: &[f64]) -> Result<LinOp> {
    space.require_cover()?;
    let phi = space.phi();
    if q.len() != phi.nrows() {
        return Err(Error::Dimension(format!(
            "multiplier of length {} for {} cover coordinates",
            q.len(),
            phi.nrows()
        )));
    }
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(q));
    let dphi = &d * phi;
    let a = pseudo_inverse(phi)? * &dphi;
    let res = inf_norm(&(phi * &a - &dphi));
    let scale = 1.0 + inf_norm(&dphi);
    if res > 1e-9 * scale {
        return Err(Error::InvalidInput(format!(
            "multiplier does not map the embedded space into itself (residual {res:.3e})"
        )));
    }
    LinOp::on(space, a)
}

/// Random admissible multiplier with values spread over `[lo, hi]` and its
/// operator. On spaces where only constants are admissible the multiplier
/// is the constant `hi`.
pub fn random_cover_multiplication<R: Rng>(
    space: &OrderedSpace,
    rng: &mut R,
    lo: f64,
    hi: f64,
) -> Result<(LinOp, Vec<f64>)> {
    let basis = multiplier_basis(space)?;
    let c = DVector::from_fn(basis.ncols(), |_, _| rng.sample::<f64, _>(StandardNormal));
    let raw = &basis * c;
    let (mn, mx) = (raw.min(), raw.max());
    let q: Vec<f64> = if mx - mn > 1e-9 * (1.0 + mx.abs().max(mn.abs())) {
        raw.iter().map(|v| lo + (hi - lo) * (v - mn) / (mx - mn)).collect()
    } else {
        vec![hi; raw.len()]
    };
    Ok((cover_multiplication(space, &q)?, q))
}

/// Positive local bijection with positive inverse: multiplication by a
/// multiplier with values in `[0.25, 4]`.
pub fn random_positive_local_bijection<R: Rng>(space: &OrderedSpace, rng: &mut R) -> Result<LinOp> {
    let lo = rng.random_range(0.25..1.0);
    let hi = rng.random_range(1.0..4.0);
    Ok(random_cover_multiplication(space, rng, lo, hi)?.0)
}
