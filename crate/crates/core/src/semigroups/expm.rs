//! Matrix exponential by scaling and squaring.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::one_norm;

/// Core approximant used on the scaled matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpmMethod {
    /// Truncated Taylor series, order chosen from the scaled norm.
    #[default]
    TaylorScaled,
    /// Diagonal [13/13] Padé approximant.
    PadeScaled,
}

/// Options for [`expm_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpmOptions {
    pub method: ExpmMethod,
    /// Largest number of squarings allowed.
    pub max_squarings: u32,
    /// Fixed Taylor order; `None` picks the smallest order meeting the
    /// target. Ignored by the Padé core.
    pub taylor_order: Option<usize>,
}

impl Default for ExpmOptions {
    fn default() -> Self {
        Self {
            method: ExpmMethod::TaylorScaled,
            max_squarings: 64,
            taylor_order: None,
        }
    }
}

/// `e^{tA}` with the data of its evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Expm {
    pub matrix: DMatrix<f64>,
    /// A-priori relative backward error of the core approximant, which
    /// squaring leaves unchanged.
    pub error_estimate: f64,
    pub squarings: u32,
    /// Taylor truncation order or Padé degree.
    pub order: usize,
}

/// Relative error target for the core approximant.
const TARGET: f64 = f64::EPSILON / 2.0;
/// Bound at which the adaptive Taylor core starts squaring.
const TAYLOR_THETA: f64 = 0.5;
const MAX_TAYLOR_ORDER: usize = 40;
const PADE13_THETA: f64 = 5.371920351148152;
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

pub fn expm(a: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    Ok(expm_with(a, t, &ExpmOptions::default())?.matrix)
}

/// `e^{tA}` by scaling and squaring. The Taylor core bounds the relative
/// backward error by `Σ_{k>N} ρ^{k-1}/k!` with `ρ = ‖tA‖₁/2^s`.
pub fn expm_with(a: &DMatrix<f64>, t: f64, opts: &ExpmOptions) -> Result<Expm> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Dimension(format!("exponential of a {}x{} matrix", n, a.ncols())));
    }
    if !t.is_finite() || a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("exponential needs finite t and entries".into()));
    }
    let x = a * t;
    let eta = one_norm(&x);
    if !eta.is_finite() {
        return Err(Error::Overflow { norm: eta });
    }
    let (core, squarings, order, error_estimate) = match opts.method {
        ExpmMethod::TaylorScaled => taylor_core(&x, eta, opts)?,
        ExpmMethod::PadeScaled => pade_core(&x, eta, opts)?,
    };
    let mut m = core;
    for _ in 0..squarings {
        m = &m * &m;
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow { norm: eta });
    }
    Ok(Expm {
        matrix: m,
        error_estimate,
        squarings,
        order,
    })
}

/// `Σ_{k>N} ρ^{k-1}/k!`, bounded by a geometric tail.
fn taylor_remainder(rho: f64, order: usize) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    let k = order + 1;
    let mut lead = 1.0;
    for i in 1..=k {
        lead *= rho / i as f64;
    }
    lead / rho / (1.0 - rho / (k + 1) as f64)
}

fn squarings_for(eta: f64, theta: f64, opts: &ExpmOptions) -> Result<u32> {
    let s = if eta > theta {
        (eta / theta).log2().ceil() as u32
    } else {
        0
    };
    if s > opts.max_squarings {
        return Err(Error::Overflow { norm: eta });
    }
    Ok(s)
}

fn taylor_core(x: &DMatrix<f64>, eta: f64, opts: &ExpmOptions) -> Result<(DMatrix<f64>, u32, usize, f64)> {
    let (s, order) = match opts.taylor_order {
        None => {
            let s = squarings_for(eta, TAYLOR_THETA, opts)?;
            let rho = eta / 2f64.powi(s as i32);
            let order = (1..=MAX_TAYLOR_ORDER)
                .find(|&k| taylor_remainder(rho, k) <= TARGET)
                .unwrap_or(MAX_TAYLOR_ORDER);
            (s, order)
        }
        Some(order) => {
            let order = order.max(1);
            let mut s = squarings_for(eta, TAYLOR_THETA, opts)?;
            while taylor_remainder(eta / 2f64.powi(s as i32), order) > TARGET {
                s += 1;
                if s > opts.max_squarings {
                    return Err(Error::Overflow { norm: eta });
                }
            }
            (s, order)
        }
    };
    let scaled = x / 2f64.powi(s as i32);
    let rho = eta / 2f64.powi(s as i32);
    let n = x.nrows();
    // Horner: I + X(I + X/2(I + X/3(...)))
    let eye = DMatrix::<f64>::identity(n, n);
    let mut acc = eye.clone();
    for k in (1..=order).rev() {
        acc = &eye + (&scaled * acc) / k as f64;
    }
    Ok((acc, s, order, taylor_remainder(rho, order)))
}

fn pade_core(x: &DMatrix<f64>, eta: f64, opts: &ExpmOptions) -> Result<(DMatrix<f64>, u32, usize, f64)> {
    let s = squarings_for(eta, PADE13_THETA, opts)?;
    let a = x / 2f64.powi(s as i32);
    let n = a.nrows();
    let b = &PADE13;
    let eye = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]) + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &eye * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]) + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &eye * b[0];
    let p = &v + &u;
    let q = &v - &u;
    let r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::Numerical("Padé denominator is singular".into()))?;
    Ok((r, s, 13, TARGET))
}
