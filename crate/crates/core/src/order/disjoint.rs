//! Upper-bound sets and the two disjointness tests.

use nalgebra::DVector;

use super::OrderedSpace;
use crate::error::Result;
use crate::linalg::vec_inf_norm;
use crate::optim::{solve_lp_with, Arith, LinearProgram, LpStatus};
use crate::tol::Truth;

/// Gap multiple beyond which an LP shortfall is a definite non-containment.
/// Shortfalls between `τ` and this multiple of `τ` are reported undecided.
const DECISIVE_FACTOR: f64 = 1e3;

/// `{u : Φu >= bounds}` together with one of its points.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperBoundSet {
    pub bounds: DVector<f64>,
    pub point: DVector<f64>,
}

impl UpperBoundSet {
    pub fn contains(&self, space: &OrderedSpace, u: &DVector<f64>) -> bool {
        let thr = space.tol.feas * (1.0 + vec_inf_norm(&self.bounds));
        space
            .eval(u)
            .iter()
            .zip(self.bounds.iter())
            .all(|(v, c)| v - c >= -thr)
    }
}

/// Upper bounds of a finite set: `∩ (a + K)`, i.e. `Φu >= max_a Φa`.
pub fn upper_bounds(space: &OrderedSpace, points: &[DVector<f64>]) -> Result<UpperBoundSet> {
    let m = space.num_rows();
    let mut c = DVector::from_element(m, f64::NEG_INFINITY);
    for a in points {
        space.check_vec(a)?;
        let v = space.eval(a);
        for j in 0..m {
            c[j] = c[j].max(v[j]);
        }
    }
    if points.is_empty() {
        c.fill(0.0);
    }
    Ok(UpperBoundSet {
        point: point_above(space, &c),
        bounds: c,
    })
}

/// A multiple of the interior point that dominates the bounds.
fn point_above(space: &OrderedSpace, c: &DVector<f64>) -> DVector<f64> {
    let w = space.eval(space.interior_point());
    let t = c
        .iter()
        .zip(w.iter())
        .map(|(ci, wi)| ci / wi)
        .fold(0.0f64, f64::max);
    space.interior_point() * t
}

/// Verdict of the definitional oracle. A `False` carries an upper bound of
/// one pair that is not an upper bound of the other.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleVerdict {
    pub truth: Truth,
    pub witness: Option<DVector<f64>>,
    /// Number of LPs solved.
    pub lp_count: usize,
}

pub fn is_disjoint_oracle(
    space: &OrderedSpace,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<OracleVerdict> {
    is_disjoint_oracle_with(space, x, y, Arith::Float)
}

/// Decides `x ⊥ y` from the definition: the upper-bound sets of
/// `{x+y, -x-y}` and `{x-y, -x+y}` coincide. Both are polyhedra
/// `U_i = {u : Φu >= c_i}` with `c_1 = |Φ(x+y)|` and `c_2 = |Φ(x-y)|`;
/// `U_1 ⊆ U_2` holds iff `min_{U_1} φ_j >= c_2j` for each `j`, which needs an
/// LP only where `c_2j > c_1j`. Works on any valid space.
pub fn is_disjoint_oracle_with(
    space: &OrderedSpace,
    x: &DVector<f64>,
    y: &DVector<f64>,
    arith: Arith,
) -> Result<OracleVerdict> {
    space.check_vec(x)?;
    space.check_vec(y)?;
    let c1 = space.eval(&(x + y)).abs();
    let c2 = space.eval(&(x - y)).abs();
    let scale = space.scale() * (vec_inf_norm(x) + vec_inf_norm(y));
    let tau = space.tol.zero * scale;

    let mut lp_count = 0;
    let mut truth = Truth::True;
    for (lo, hi) in [(&c1, &c2), (&c2, &c1)] {
        let mut rows: Vec<usize> = (0..space.num_rows()).filter(|&j| hi[j] > lo[j]).collect();
        // largest excess first: the most likely place to find a shortfall
        rows.sort_by(|&a, &b| (hi[b] - lo[b]).total_cmp(&(hi[a] - lo[a])).then(a.cmp(&b)));
        for j in rows {
            if hi[j] - lo[j] <= tau {
                continue;
            }
            lp_count += 1;
            let lp = LinearProgram::new(space.row(j))
                .with_ineq(space.phi().clone(), lo.clone())
                .with_tol(space.tol);
            let out = match solve_lp_with(&lp, arith) {
                Ok(o) if o.status == LpStatus::Optimal => o,
                _ => {
                    truth = Truth::Undecided;
                    continue;
                }
            };
            let gap = out.value - hi[j];
            if gap < -DECISIVE_FACTOR * tau {
                return Ok(OracleVerdict {
                    truth: Truth::False,
                    witness: Some(DVector::from_vec(out.witness)),
                    lp_count,
                });
            }
            if gap < -tau {
                truth = Truth::Undecided;
            }
        }
    }
    Ok(OracleVerdict {
        truth,
        witness: None,
        lp_count,
    })
}

/// Componentwise test through the lattice cover: `x ⊥ y` iff no functional
/// is nonzero on both. Requires a certified cover.
pub fn is_disjoint(space: &OrderedSpace, x: &DVector<f64>, y: &DVector<f64>) -> Result<bool> {
    space.require_cover()?;
    space.check_vec(x)?;
    space.check_vec(y)?;
    Ok(space.support(x).is_disjoint(&space.support(y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::cover::canonicalize;
    use crate::error::Error;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    #[test]
    fn upper_bound_examples() {
        let s = catalog::standard(2);
        let u = upper_bounds(&s, &[v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap();
        assert_eq!(u.bounds, v(&[1.0, 1.0]));
        assert!(u.contains(&s, &u.point));

        let f = catalog::four_ray();
        let u = upper_bounds(&f, &[v(&[1.0, 0.0, 1.0]), v(&[-1.0, 0.0, 1.0])]).unwrap();
        assert_eq!(u.bounds, v(&[2.0, 2.0, 2.0, 2.0]));
        assert!(u.contains(&f, &u.point));

        let a = v(&[0.3, -0.2, 1.0]);
        let u = upper_bounds(&f, &[a.clone(), a.clone()]).unwrap();
        assert_eq!(u.bounds, f.eval(&a));
    }

    #[test]
    fn oracle_standard_plane() {
        let s = catalog::standard(2);
        let r = is_disjoint_oracle(&s, &v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap();
        assert_eq!(r.truth, Truth::True);
        let r = is_disjoint_oracle(&s, &v(&[1.0, 1.0]), &v(&[0.0, 1.0])).unwrap();
        assert_eq!(r.truth, Truth::False);
    }

    #[test]
    fn oracle_four_ray() {
        let f = catalog::four_ray();
        for arith in [Arith::Float, Arith::Exact] {
            let r = is_disjoint_oracle_with(&f, &v(&[1.0, 0.0, 1.0]), &v(&[-1.0, 0.0, 1.0]), arith)
                .unwrap();
            assert_eq!(r.truth, Truth::True);
            let r = is_disjoint_oracle_with(&f, &v(&[1.0, 0.0, 1.0]), &v(&[0.0, 1.0, 1.0]), arith)
                .unwrap();
            assert_eq!(r.truth, Truth::False);
            // the witness is an upper bound of exactly one of the two pairs
            let w = r.witness.unwrap();
            let x = v(&[1.0, 0.0, 1.0]);
            let y = v(&[0.0, 1.0, 1.0]);
            let u1 = upper_bounds(&f, &[&x + &y, -(&x + &y)]).unwrap();
            let u2 = upper_bounds(&f, &[&x - &y, -(&x - &y)]).unwrap();
            assert_ne!(u1.contains(&f, &w), u2.contains(&f, &w));
        }
    }

    #[test]
    fn oracle_horizontal_lines_disjoint() {
        // (1,1,0) and (1,-1,0) span the two non-directed bands of the cone
        let f = catalog::four_ray();
        let r = is_disjoint_oracle(&f, &v(&[1.0, 1.0, 0.0]), &v(&[1.0, -1.0, 0.0])).unwrap();
        assert_eq!(r.truth, Truth::True);
    }

    #[test]
    fn zero_is_disjoint_from_everything() {
        let f = catalog::four_ray();
        let r = is_disjoint_oracle(&f, &v(&[0.3, -2.0, 0.1]), &DVector::zeros(3)).unwrap();
        assert_eq!(r.truth, Truth::True);
        assert_eq!(r.lp_count, 0);
    }

    #[test]
    fn fast_test_examples() {
        let f = canonicalize(&catalog::four_ray()).unwrap().into_space();
        assert!(is_disjoint(&f, &v(&[1.0, 0.0, 1.0]), &v(&[-1.0, 0.0, 1.0])).unwrap());
        assert!(!is_disjoint(&f, &v(&[1.0, 0.0, 1.0]), &v(&[1.0, 0.0, 1.0])).unwrap());
        let s = canonicalize(&catalog::standard(3)).unwrap().into_space();
        assert!(is_disjoint(&s, &v(&[1.0, 0.0, 0.0]), &v(&[0.0, 1.0, 0.0])).unwrap());
    }

    #[test]
    fn fast_test_refuses_uncertified() {
        let f = catalog::four_ray();
        assert!(matches!(
            is_disjoint(&f, &v(&[1.0, 0.0, 1.0]), &v(&[-1.0, 0.0, 1.0])),
            Err(Error::NotCoverCertified(_))
        ));
    }
}
