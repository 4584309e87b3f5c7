//! Matrix semigroups `T(t) = e^{tA}`, resolvents, Yosida approximations and
//! scans that check how locality passes between a generator and its
//! semigroup.

mod expm;
mod scans;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inf_norm, inverse_refined, spectral_bound};
use crate::operators::LinOp;

pub use expm::{expm, expm_with, Expm, ExpmMethod, ExpmOptions};
pub use scans::{
    cor_positive_resolvents, thm_bounded_local, thm_generator_local, thm_local_resolvents,
};

/// Default positive time grid.
pub const T_GRID: [f64; 5] = [1e-3, 1e-2, 1e-1, 1.0, 10.0];
/// Default `λ` ladder for Yosida approximations.
pub const LAMBDA_LADDER: [f64; 4] = [1e1, 1e2, 1e3, 1e4];
/// Margin above the spectral bound required of every `λ`.
pub const SPECTRAL_MARGIN: f64 = 1.0;

/// First, middle and last basis vectors and a spread vector, used as
/// samples for convergence tables.
pub fn convergence_samples(n: usize) -> Vec<DVector<f64>> {
    let mut xs: Vec<DVector<f64>> = [0, n / 2, n - 1]
        .iter()
        .map(|&i| DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 }))
        .collect();
    xs.dedup();
    xs.push(DVector::from_fn(n, |k, _| 1.0 + k as f64 / n as f64));
    xs
}

/// `T_GRID` followed by its negatives when `with_negative`.
pub fn default_t_grid(with_negative: bool) -> Vec<f64> {
    let mut ts = T_GRID.to_vec();
    if with_negative {
        ts.extend(T_GRID.iter().map(|t| -t));
    }
    ts
}

/// The uniformly continuous semigroup generated by a bounded operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Semigroup {
    generator: LinOp,
    options: ExpmOptions,
}

impl Semigroup {
    /// Fails unless the generator is defined on the whole space.
    pub fn new(generator: LinOp) -> Result<Self> {
        if !generator.has_full_domain() {
            return Err(Error::InvalidInput(
                "a matrix semigroup needs a generator defined on the whole space".into(),
            ));
        }
        Ok(Self {
            generator,
            options: ExpmOptions::default(),
        })
    }

    pub fn with_options(mut self, options: ExpmOptions) -> Self {
        self.options = options;
        self
    }

    pub fn generator(&self) -> &LinOp {
        &self.generator
    }

    pub fn options(&self) -> &ExpmOptions {
        &self.options
    }

    pub fn eval(&self, t: f64) -> Result<Expm> {
        expm_with(self.generator.matrix(), t, &self.options)
    }

    /// `T(t)` as an operator on the generator's space.
    pub fn at(&self, t: f64) -> Result<LinOp> {
        Ok(LinOp::new(self.eval(t)?.matrix)?.with_space_name(self.generator.space_name()))
    }
}

fn full_domain(a: &LinOp) -> Result<()> {
    if a.has_full_domain() {
        Ok(())
    } else {
        Err(Error::InvalidInput(
            "resolvents are computed for generators defined on the whole space".into(),
        ))
    }
}

/// `(λI - A)⁻¹` with `‖(λI - A)R - I‖_∞ <= 1e-10`.
pub fn resolvent(a: &LinOp, lambda: f64) -> Result<DMatrix<f64>> {
    full_domain(a)?;
    if !lambda.is_finite() {
        return Err(Error::InvalidInput(format!("lambda = {lambda} is not finite")));
    }
    let n = a.dim();
    let shifted = DMatrix::identity(n, n) * lambda - a.matrix();
    inverse_refined(&shifted, 1e-10).map_err(|e| Error::Resolvent {
        lambda,
        reason: e.to_string(),
    })
}

/// Yosida approximation `A_λ = λA(λI - A)⁻¹`, checked against
/// `λ²(λI - A)⁻¹ - λI`.
pub fn yosida(a: &LinOp, lambda: f64) -> Result<LinOp> {
    let r = resolvent(a, lambda)?;
    let n = a.dim();
    let a_lambda = a.matrix() * &r * lambda;
    let alt = &r * (lambda * lambda) - DMatrix::identity(n, n) * lambda;
    let gap = inf_norm(&(&a_lambda - &alt));
    let scale = 1.0 + inf_norm(&alt);
    if gap > 1e-10 * scale {
        return Err(Error::Resolvent {
            lambda,
            reason: format!("Yosida identity violated by {gap:.3e}"),
        });
    }
    Ok(LinOp::new(a_lambda)?.with_space_name(a.space_name()))
}

/// Grids for resolvent and Yosida scans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YosidaParams {
    /// Strictly increasing.
    pub lambdas: Vec<f64>,
    pub ts: Vec<f64>,
}

impl Default for YosidaParams {
    fn default() -> Self {
        Self {
            lambdas: LAMBDA_LADDER.to_vec(),
            ts: T_GRID.to_vec(),
        }
    }
}

impl YosidaParams {
    pub fn new(lambdas: Vec<f64>, ts: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidInput("empty lambda list".into()));
        }
        if lambdas.iter().chain(&ts).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("lambda and t values must be finite".into()));
        }
        if lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("lambda list must be strictly increasing".into()));
        }
        Ok(Self { lambdas, ts })
    }

    /// Rejects every `λ <= s(A) + 1`, with `s(A)` the largest real part of
    /// an eigenvalue of `A`.
    pub fn check_against(&self, a: &LinOp) -> Result<()> {
        let bound = spectral_bound(a.matrix());
        match self.lambdas.iter().find(|&&l| l <= bound + SPECTRAL_MARGIN) {
            Some(&lambda) => Err(Error::Resolvent {
                lambda,
                reason: format!(
                    "below the spectral bound estimate {bound:.6} plus margin {SPECTRAL_MARGIN}"
                ),
            }),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use proptest::prelude::*;

    fn diag(v: &[f64]) -> LinOp {
        LinOp::new(DMatrix::from_diagonal(&DVector::from_column_slice(v))).unwrap()
    }

    #[test]
    fn resolvent_examples() {
        let z = resolvent(&LinOp::new(DMatrix::zeros(2, 2)).unwrap(), 4.0).unwrap();
        assert!((z - DMatrix::identity(2, 2) * 0.25).amax() < 1e-15);
        let r = resolvent(&diag(&[1.0, 2.0]), 3.0).unwrap();
        assert!((r - DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 1.0]))).amax() < 1e-15);
        match resolvent(&diag(&[1.0, 2.0]), 2.0) {
            Err(Error::Resolvent { lambda, .. }) => assert_eq!(lambda, 2.0),
            other => panic!("expected resolvent error, got {other:?}"),
        }
    }

    #[test]
    fn yosida_examples() {
        let a = 0.7;
        for lambda in [2.0, 10.0, 1e3] {
            let y = yosida(&diag(&[a]), lambda).unwrap();
            assert!((y.matrix()[(0, 0)] - a * lambda / (lambda - a)).abs() < 1e-12);
        }
        let nil = LinOp::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])).unwrap();
        let y = yosida(&nil, 1.0).unwrap();
        assert!((y.matrix() - nil.matrix()).amax() < 1e-14);
    }

    #[test]
    fn yosida_converges_monotonically() {
        let a = LinOp::new(DMatrix::from_row_slice(3, 3, &[0.5, 1.0, 0.0, -0.3, 0.2, 0.4, 0.1, 0.0, -1.0])).unwrap();
        let gaps: Vec<f64> = LAMBDA_LADDER
            .iter()
            .map(|&l| inf_norm(&(yosida(&a, l).unwrap().matrix() - a.matrix())))
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        assert!(gaps[3] < 1e-3);
    }

    #[test]
    fn params_guard_spectral_bound() {
        let a = diag(&[5.0, -1.0]);
        let p = YosidaParams::new(vec![5.5, 10.0], T_GRID.to_vec()).unwrap();
        assert!(matches!(p.check_against(&a), Err(Error::Resolvent { lambda, .. }) if lambda == 5.5));
        assert!(YosidaParams::default().check_against(&a).is_ok());
        assert!(YosidaParams::new(vec![10.0, 10.0], vec![]).is_err());
        assert!(YosidaParams::new(vec![], vec![]).is_err());
    }

    #[test]
    fn semigroup_requires_full_domain() {
        let d = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        let a = LinOp::identity(2).with_domain(d).unwrap();
        assert!(Semigroup::new(a).is_err());
        let sg = Semigroup::new(LinOp::identity(2)).unwrap();
        assert!((sg.at(1.0).unwrap().matrix()[(0, 0)] - 1f64.exp()).abs() < 1e-14);
    }

    fn small_matrix() -> impl Strategy<Value = DMatrix<f64>> {
        (2usize..5).prop_flat_map(|n| {
            prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| DMatrix::from_vec(n, n, v))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn semigroup_law(a in small_matrix(), s in -2.0f64..2.0, t in -2.0f64..2.0) {
            for method in [ExpmMethod::TaylorScaled, ExpmMethod::PadeScaled] {
                let opts = ExpmOptions { method, ..Default::default() };
                let est = expm_with(&a, s + t, &opts).unwrap().matrix;
                let prod = expm_with(&a, s, &opts).unwrap().matrix * expm_with(&a, t, &opts).unwrap().matrix;
                let scale = 1.0 + inf_norm(&est);
                prop_assert!(inf_norm(&(est - prod)) <= 1e-9 * scale);
            }
        }

        #[test]
        fn zero_time_is_identity(a in small_matrix()) {
            let n = a.nrows();
            let e = expm(&a, 0.0).unwrap();
            prop_assert!((e - DMatrix::identity(n, n)).amax() <= 1e-13);
        }

        #[test]
        fn taylor_and_pade_agree(a in small_matrix(), t in -5.0f64..5.0) {
            let ta = expm(&a, t).unwrap();
            let pa = expm_with(&a, t, &ExpmOptions { method: ExpmMethod::PadeScaled, ..Default::default() }).unwrap().matrix;
            prop_assert!(inf_norm(&(&ta - pa)) <= 1e-10 * (1.0 + inf_norm(&ta)));
        }

        #[test]
        fn yosida_identity_and_resolvent_residual(a in small_matrix(), lam in 5.0f64..100.0) {
            let op = LinOp::new(a.clone()).unwrap();
            let n = a.nrows();
            let r = resolvent(&op, lam).unwrap();
            let res = (DMatrix::identity(n, n) * lam - &a) * &r - DMatrix::identity(n, n);
            prop_assert!(inf_norm(&res) <= 1e-10);
            prop_assert!(yosida(&op, lam).is_ok());
        }
    }
}
