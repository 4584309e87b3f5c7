//! The functional-representation lattice cover `x ↦ Φ_c x ∈ ℝ^{m_c}`.
//!
//! Removing every dual functional that is a nonnegative combination of the
//! others leaves the extreme rays of the dual cone. Each survivor then
//! defines a facet of `K`, and the image of `X` is order dense in `ℝ^{m_c}`:
//! for any `z` and any facet `j`, moving along the relative interior of the
//! facet from a point with `φ_j = z_j` eventually satisfies every other bound.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::optim::{cone_member_with, solve_lp, Arith, ConeMembership, LinearProgram, LpStatus};
use crate::order::OrderedSpace;

/// Canonical lattice cover of an ordered space.
#[derive(Debug, Clone)]
pub struct LatticeCover {
    space: OrderedSpace,
    source_rows: usize,
    kept: Vec<usize>,
    removed: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityFailure {
    pub z: Vec<f64>,
    pub infimum: Vec<f64>,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub samples: usize,
    pub seed: u64,
    pub passed: bool,
    pub failures: Vec<DensityFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverReport {
    pub name: String,
    pub dim: usize,
    pub source_rows: usize,
    pub canonical_rows: Vec<Vec<f64>>,
    pub removed_rows: Vec<usize>,
    pub density: DensityReport,
}

/// Removes redundant functionals in index order, scales survivors to unit
/// max-abs entry and returns the certified cover.
pub fn canonicalize(space: &OrderedSpace) -> Result<LatticeCover> {
    let phi = space.phi();
    let (m, n) = phi.shape();
    let tol = *space.tol();
    let mut kept: Vec<usize> = (0..m).collect();
    let mut removed = Vec::new();
    for j in 0..m {
        let others: Vec<usize> = kept.iter().cloned().filter(|&k| k != j).collect();
        let rows = select_rows(phi, &others);
        if cone_member_with(&rows, &space.row(j), &tol, Arith::Float)?.is_member() {
            kept.retain(|&k| k != j);
            removed.push(j);
        }
    }
    if kept.is_empty() {
        return Err(Error::Invariant(
            "every dual functional was redundant".into(),
        ));
    }
    let mut phi_c = select_rows(phi, &kept);
    for mut row in phi_c.row_iter_mut() {
        let s = row.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        row /= s;
    }
    // same cone both ways: every raw row lies in the canonical cone
    for j in 0..m {
        if !cone_member_with(&phi_c, &space.row(j), &tol, Arith::Float)?.is_member() {
            return Err(Error::Invariant(format!(
                "dual functional {j} is not generated by the canonical rows"
            )));
        }
    }
    let cert = OrderedSpace::certified(phi_c, space.interior_point().clone(), space.name().to_string(), tol);
    debug_assert_eq!(cert.dim(), n);
    Ok(LatticeCover {
        space: cert,
        source_rows: m,
        kept,
        removed,
    })
}

fn select_rows(phi: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), phi.ncols(), |r, c| phi[(idx[r], c)])
}

impl LatticeCover {
    /// The certified space over the canonical functionals.
    pub fn space(&self) -> &OrderedSpace {
        &self.space
    }

    pub fn into_space(self) -> OrderedSpace {
        self.space
    }

    pub fn phi_c(&self) -> &DMatrix<f64> {
        self.space.phi()
    }

    pub fn m_c(&self) -> usize {
        self.space.num_rows()
    }

    /// Source index of each canonical row.
    pub fn kept_rows(&self) -> &[usize] {
        &self.kept
    }

    pub fn removed_rows(&self) -> &[usize] {
        &self.removed
    }

    pub fn embed(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.space.check_vec(x)?;
        Ok(self.space.eval(x))
    }

    /// `⋁ i(a) − ⋁ i(b)` in `ℝ^{m_c}`.
    pub fn rc_element(&self, a: &[DVector<f64>], b: &[DVector<f64>]) -> Result<DVector<f64>> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidInput(
                "both families must be nonempty".into(),
            ));
        }
        Ok(self.sup(a)? - self.sup(b)?)
    }

    fn sup(&self, xs: &[DVector<f64>]) -> Result<DVector<f64>> {
        let mut out = DVector::from_element(self.m_c(), f64::NEG_INFINITY);
        for x in xs {
            let e = self.embed(x)?;
            out.zip_apply(&e, |o, v| *o = o.max(v));
        }
        Ok(out)
    }

    /// Samples `z ∈ [-1,1]^{m_c}` and checks that the componentwise infimum
    /// of `{Φ_c x : Φ_c x >= z}` equals `z`.
    pub fn certify_order_density(&self, samples: usize, seed: u64) -> Result<DensityReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = Vec::new();
        for _ in 0..samples {
            let z = DVector::from_fn(self.m_c(), |_, _| rng.random_range(-1.0..1.0));
            let inf = up_set_infimum(self.phi_c(), &z)?;
            let dev = (&inf - &z).amax();
            if dev > 1e-8 {
                failures.push(DensityFailure {
                    z: z.iter().cloned().collect(),
                    infimum: inf.iter().cloned().collect(),
                    max_deviation: dev,
                });
            }
        }
        Ok(DensityReport {
            samples,
            seed,
            passed: failures.is_empty(),
            failures,
        })
    }

    pub fn report(&self, samples: usize, seed: u64) -> Result<CoverReport> {
        Ok(CoverReport {
            name: self.space.name().to_string(),
            dim: self.space.dim(),
            source_rows: self.source_rows,
            canonical_rows: crate::linalg::to_rows(self.phi_c()),
            removed_rows: self.removed.clone(),
            density: self.certify_order_density(samples, seed)?,
        })
    }
}

/// `c_j = min{φ_j(x) : Φx >= z}` for each row of `phi`.
pub fn up_set_infimum(phi: &DMatrix<f64>, z: &DVector<f64>) -> Result<DVector<f64>> {
    let m = phi.nrows();
    let mut c = DVector::zeros(m);
    for j in 0..m {
        let lp = LinearProgram::new(phi.row(j).transpose()).with_ineq(phi.clone(), z.clone());
        let out = solve_lp(&lp)?;
        match out.status {
            LpStatus::Optimal => c[j] = out.value,
            status => {
                return Err(Error::Invariant(format!(
                    "up-set infimum LP for row {j} is {status:?}"
                )))
            }
        }
    }
    Ok(c)
}

/// Whether `target` lies in the dual cone spanned by the rows, used for
/// redundancy diagnostics.
pub fn is_redundant(rows: &DMatrix<f64>, target: &DVector<f64>) -> Result<bool> {
    Ok(matches!(
        cone_member_with(rows, target, &Default::default(), Arith::Float)?,
        ConeMembership::Member { .. }
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use proptest::prelude::*;

    #[test]
    fn redundant_sum_row_is_removed() {
        let s = OrderedSpace::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let c = canonicalize(&s).unwrap();
        assert_eq!(c.removed_rows(), &[2]);
        assert_eq!(c.phi_c(), &DMatrix::identity(2, 2));
        assert!(c.space().is_cover_certified());
    }

    #[test]
    fn four_ray_and_identity_unchanged() {
        let f = catalog::four_ray();
        let c = canonicalize(&f).unwrap();
        assert!(c.removed_rows().is_empty());
        assert_eq!(c.phi_c(), f.phi());
        let s = catalog::standard(4);
        assert_eq!(canonicalize(&s).unwrap().phi_c(), s.phi());
    }

    #[test]
    fn duplicate_rows_keep_one_copy() {
        let s = OrderedSpace::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let c = canonicalize(&s).unwrap();
        assert_eq!(c.removed_rows(), &[0]);
        assert_eq!(c.phi_c(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    }

    #[test]
    fn canonicalize_is_idempotent() {
        for s in [catalog::four_ray(), catalog::polygon(6), catalog::standard(3)] {
            let once = canonicalize(&s).unwrap();
            let twice = canonicalize(once.space()).unwrap();
            assert_eq!(once.phi_c(), twice.phi_c());
            assert!(twice.removed_rows().is_empty());
        }
    }

    #[test]
    fn embed_examples() {
        let c = canonicalize(&catalog::four_ray()).unwrap();
        let e = c.embed(&DVector::from_vec(vec![0.0, 0.0, 1.0])).unwrap();
        assert_eq!(e, DVector::from_element(4, 1.0));
        assert_eq!(c.embed(&DVector::zeros(3)).unwrap(), DVector::zeros(4));
        let s = canonicalize(&catalog::standard(3)).unwrap();
        let x = DVector::from_vec(vec![0.5, -2.0, 3.0]);
        assert_eq!(s.embed(&x).unwrap(), x);
    }

    #[test]
    fn rc_element_examples() {
        let c = canonicalize(&catalog::four_ray()).unwrap();
        let a = [
            DVector::from_vec(vec![1.0, 0.0, 1.0]),
            DVector::from_vec(vec![-1.0, 0.0, 1.0]),
        ];
        let r = c.rc_element(&a, &[DVector::zeros(3)]).unwrap();
        assert_eq!(r, DVector::from_element(4, 2.0));
        let s = canonicalize(&catalog::standard(2)).unwrap();
        let r = s
            .rc_element(
                &[DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![0.0, 1.0])],
                &[DVector::zeros(2)],
            )
            .unwrap();
        assert_eq!(r, DVector::from_vec(vec![1.0, 1.0]));
        let x = DVector::from_vec(vec![0.2, 0.1, 1.0]);
        assert_eq!(c.rc_element(&[x.clone()], &[DVector::zeros(3)]).unwrap(), c.embed(&x).unwrap());
    }

    #[test]
    fn density_passes_on_canonical_covers() {
        for s in [catalog::standard(3), catalog::four_ray(), catalog::polygon(5)] {
            let c = canonicalize(&s).unwrap();
            let r = c.certify_order_density(64, 7).unwrap();
            assert!(r.passed, "{:?}", r.failures.first());
        }
        let c = canonicalize(&catalog::four_ray()).unwrap();
        let z = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        assert!((up_set_infimum(c.phi_c(), &z).unwrap() - &z).amax() < 1e-12);
    }

    #[test]
    fn density_fails_with_redundant_row() {
        let phi = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let z = DVector::from_vec(vec![0.0, 0.0, -1.0]);
        let inf = up_set_infimum(&phi, &z).unwrap();
        // x1 + x2 cannot drop below 0 once x1, x2 >= 0
        assert!((inf[2] - 0.0).abs() < 1e-12);
        assert!(is_redundant(&DMatrix::identity(2, 2), &DVector::from_vec(vec![1.0, 1.0])).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        // Bipositivity of the embedding: x ∈ K iff Φ_c x >= 0, compared
        // against the raw functionals.
        #[test]
        fn embedding_is_bipositive(seed in 0u64..1000, xs in proptest::collection::vec(-1.0f64..1.0, 3)) {
            let raw = catalog::random_space(&mut ChaCha8Rng::seed_from_u64(seed), &Default::default());
            let c = canonicalize(&raw).unwrap();
            let n = raw.dim();
            let x = DVector::from_fn(n, |i, _| xs[i % 3] + 0.1 * i as f64);
            let in_raw = raw.eval(&x).iter().all(|&v| v >= 0.0);
            let in_cover = c.embed(&x).unwrap().iter().all(|&v| v >= 0.0);
            prop_assert_eq!(in_raw, in_cover);
        }
    }
}
