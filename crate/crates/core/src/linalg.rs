//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, Schur};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Relative residual below which a vector is treated as lying in a span.
pub const SPAN_TOL: f64 = 1e-9;

/// Orthonormal basis of the span of a set of row vectors, grown
/// incrementally by modified Gram-Schmidt with one re-orthogonalization pass.
#[derive(Debug, Clone)]
pub struct RowSpan {
    dim: usize,
    basis: Vec<DVector<f64>>,
}

impl RowSpan {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            basis: Vec::new(),
        }
    }

    /// Span of the selected rows of `rows`.
    pub fn of_rows<I>(rows: &DMatrix<f64>, indices: I) -> Self
    where
        I: IntoIterator<Item = usize>,
    {
        let mut span = Self::new(rows.ncols());
        for j in indices {
            span.try_add(&rows.row(j).transpose());
        }
        span
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[DVector<f64>] {
        &self.basis
    }

    /// Component of `v` orthogonal to the span.
    pub fn residual(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &self.basis {
                let c = q.dot(&r);
                r.axpy(-c, q, 1.0);
            }
        }
        r
    }

    pub fn residual_norm(&self, v: &DVector<f64>) -> f64 {
        self.residual(v).norm()
    }

    /// True when `v` lies in the span up to the relative tolerance `tol`.
    pub fn contains(&self, v: &DVector<f64>, tol: f64) -> bool {
        let scale = v.norm();
        if scale == 0.0 {
            return true;
        }
        self.residual_norm(v) <= tol * scale
    }

    /// Adds `v` if it is independent of the current span. Returns whether the
    /// rank grew.
    pub fn try_add(&mut self, v: &DVector<f64>) -> bool {
        let scale = v.norm();
        if scale == 0.0 || self.basis.len() == self.dim {
            return false;
        }
        let r = self.residual(v);
        let rn = r.norm();
        if rn <= SPAN_TOL * scale {
            return false;
        }
        self.basis.push(r / rn);
        true
    }

    /// Orthonormal basis (as columns) of the orthogonal complement of the
    /// span, i.e. the common null space of the spanning rows.
    pub fn complement_basis(&self) -> DMatrix<f64> {
        let mut full = self.clone();
        let mut extra = Vec::new();
        for i in 0..self.dim {
            if full.rank() == self.dim {
                break;
            }
            let e = DVector::from_fn(self.dim, |k, _| if k == i { 1.0 } else { 0.0 });
            if full.try_add(&e) {
                extra.push(full.basis.last().cloned().unwrap());
            }
        }
        let mut out = DMatrix::zeros(self.dim, extra.len());
        for (c, v) in extra.iter().enumerate() {
            out.set_column(c, v);
        }
        out
    }
}

/// Orthonormal basis of the column span of `m`, dropping dependent columns.
pub fn orthonormal_columns(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut span = RowSpan::new(m.nrows());
    for c in m.column_iter() {
        span.try_add(&c.into_owned());
    }
    columns(span.basis(), m.nrows())
}

fn columns(vs: &[DVector<f64>], n: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(n, vs.len());
    for (c, v) in vs.iter().enumerate() {
        out.set_column(c, v);
    }
    out
}

/// Orthonormal basis of `span(u) ∩ span(w)` for matrices with orthonormal
/// columns.
pub fn intersect_spans(u: &DMatrix<f64>, w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = u.nrows();
    if u.ncols() == 0 || w.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    if u.ncols() == n {
        return w.clone();
    }
    if w.ncols() == n {
        return u.clone();
    }
    let k = u.ncols();
    let mut joint = DMatrix::zeros(n, k + w.ncols());
    joint.view_mut((0, 0), (n, k)).copy_from(u);
    joint.view_mut((0, k), (n, w.ncols())).copy_from(&(-w));
    let null = null_space(&joint, SPAN_TOL);
    orthonormal_columns(&(u * null.rows(0, k)))
}

/// Basis of the null space of a rational matrix by reduced row echelon form.
pub fn rational_null_space(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v = &*v - &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[i][f].clone();
            }
            v
        })
        .collect()
}

/// Exact rational value of every entry.
pub fn to_rational(m: &DMatrix<f64>) -> Vec<Vec<BigRational>> {
    m.row_iter()
        .map(|r| {
            r.iter()
                .map(|&v| BigRational::from_float(v).expect("finite matrix entry"))
                .collect()
        })
        .collect()
}

/// Numerical rank by singular values relative to the largest one.
pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > SPAN_TOL * smax).count()
}

/// Orthonormal basis (columns) of the null space of `m`.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    // Pad to at least square so the SVD returns a full right basis.
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = if smax == 0.0 { 0.5 } else { rel_tol * smax };
    let null_rows: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cutoff)
        .map(|(i, _)| i)
        .collect();
    let mut out = DMatrix::zeros(cols, null_rows.len());
    for (c, &i) in null_rows.iter().enumerate() {
        out.set_column(c, &v_t.row(i).transpose());
    }
    out
}

/// Maximum absolute row sum.
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Maximum absolute column sum.
pub fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn vec_inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Inverse with Newton refinement until `||M X - I||_inf <= target`.
pub fn inverse_refined(m: &DMatrix<f64>, target: f64) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Dimension(format!(
            "inverse of a {}x{} matrix",
            n,
            m.ncols()
        )));
    }
    let lu = m.clone().lu();
    let mut x = lu
        .try_inverse()
        .ok_or_else(|| Error::Singular("LU factorization found a zero pivot".into()))?;
    let cond = one_norm(m) * one_norm(&x);
    if !cond.is_finite() || cond > 1e12 {
        return Err(Error::Singular(format!(
            "condition estimate {cond:.3e} exceeds 1e12"
        )));
    }
    let eye = DMatrix::<f64>::identity(n, n);
    for _ in 0..4 {
        let r = &eye - m * &x;
        if inf_norm(&r) <= target {
            return Ok(x);
        }
        x += &x * r;
    }
    let r = &eye - m * &x;
    let res = inf_norm(&r);
    if res <= target {
        Ok(x)
    } else {
        Err(Error::Numerical(format!(
            "inverse residual {res:.3e} above {target:.1e} after refinement"
        )))
    }
}

/// Largest real part among the eigenvalues. When the QR iteration does not
/// converge on `M` or `Mᵀ`, returns the smallest of the logarithmic norms
/// for the `1`, `2` and `∞` norms, each an upper bound.
pub fn spectral_bound(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return f64::NEG_INFINITY;
    }
    let max_iter = 200 * n.max(4);
    for a in [m.clone(), m.transpose()] {
        if let Some(schur) = Schur::try_new(a, f64::EPSILON, max_iter) {
            return schur
                .complex_eigenvalues()
                .iter()
                .map(|z| z.re)
                .fold(f64::NEG_INFINITY, f64::max);
        }
    }
    log_norm_bound(m)
}

/// `min(μ₁, μ₂, μ∞)` with `μ(A) = lim (‖I + hA‖ - 1)/h`.
fn log_norm_bound(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let row = |a: &DMatrix<f64>| {
        (0..n)
            .map(|i| a[(i, i)] + (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let sym = (m + m.transpose()) * 0.5;
    let mu2 = sym.symmetric_eigenvalues().max();
    row(m).min(row(&m.transpose())).min(mu2)
}

pub fn from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let m = rows.len();
    let n = rows.first().map(|r| r.len()).unwrap_or(0);
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().cloned().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn row_span_detects_dependence() {
        let rows = DMatrix::from_row_slice(
            4,
            3,
            &[
                1.0, 1.0, 1.0, //
                1.0, -1.0, 1.0, //
                -1.0, 1.0, 1.0, //
                -1.0, -1.0, 1.0,
            ],
        );
        let span = RowSpan::of_rows(&rows, [0, 1, 2]);
        assert_eq!(span.rank(), 3);
        let pair = RowSpan::of_rows(&rows, [0, 1]);
        assert!(!pair.contains(&rows.row(2).transpose(), 1e-9));
        let c = pair.complement_basis();
        assert_eq!(c.ncols(), 1);
        // null space of the first two rows is span{(-1,0,1)}
        let v = c.column(0);
        assert!((v[0] + v[2]).abs() < 1e-12 && v[1].abs() < 1e-12);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = null_space(&m, 1e-10);
        assert_eq!(ns.ncols(), 2);
        assert!((&m * &ns).norm() < 1e-12);
    }

    #[test]
    fn refined_inverse_residual() {
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 2.0, 5.0]);
        let x = inverse_refined(&m, 1e-12).unwrap();
        let r = DMatrix::identity(2, 2) - &m * &x;
        assert!(inf_norm(&r) <= 1e-12);
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(inverse_refined(&singular, 1e-10).is_err());
    }

    #[test]
    fn spectral_bound_terminates_on_cyclic_permutations() {
        for n in 2..7 {
            let p = DMatrix::from_fn(n, n, |i, j| if (i + 1) % n == j { 1.0 } else { 0.0 });
            assert!((spectral_bound(&p) - 1.0).abs() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn log_norms_bound_the_spectrum() {
        let m = DMatrix::from_row_slice(3, 3, &[-1.0, 4.0, 0.0, 0.0, -2.0, 1.0, 0.5, 0.0, 0.3]);
        assert!(log_norm_bound(&m) >= spectral_bound(&m));
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -3.0]));
        assert_eq!(log_norm_bound(&d), 1.0);
    }

    #[test]
    fn spectral_bound_of_rotation_generator() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(spectral_bound(&m).abs() < 1e-12);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -3.0]));
        assert!((spectral_bound(&d) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn span_intersection() {
        let u = orthonormal_columns(&DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]));
        let w = orthonormal_columns(&DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]));
        let i = intersect_spans(&u, &w);
        assert_eq!(i.ncols(), 1);
        assert!((i[(1, 0)].abs() - 1.0).abs() < 1e-12);
        let e3 = DMatrix::from_row_slice(3, 1, &[0.0, 0.0, 1.0]);
        assert_eq!(intersect_spans(&u, &e3).ncols(), 0);
    }

    #[test]
    fn rational_kernel() {
        let rows = to_rational(&DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, -1.0]));
        let ns = rational_null_space(&rows, 3);
        assert_eq!(ns.len(), 1);
        let v: Vec<f64> = ns[0].iter().map(|q| q.to_f64().unwrap()).collect();
        assert_eq!(v, vec![-1.0, 1.0, 1.0]);
        assert_eq!(rational_null_space(&[], 2).len(), 2);
    }
}
