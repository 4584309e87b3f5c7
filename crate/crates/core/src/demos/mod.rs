//! Grid versions of function-space examples: the heat kernel on `[0, 1]`,
//! translation and multiplication semigroups, and a space of functions
//! that are quadratic polynomials on `[0, 1/2]`.

mod diffusion;
mod pol2;
mod shift;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::ScanReport;

pub use diffusion::{
    diffusion_demo, diffusion_dp_pair, diffusion_kernel, diffusion_not_dp, hat, kernel_table, DiffusionConfig,
    DpWitness, KernelEval, KernelTable,
};
pub use pol2::{pol2_demo, pol2_space, Pol2Config, Pol2Space};
pub use shift::{multiplication_demo, translation_demo, TranslationConfig};

/// Strictly increasing sample points with trapezoid weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput("grid points must be finite".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("grid points must be strictly increasing".into()));
        }
        let g = points.len();
        let weights = (0..g)
            .map(|i| {
                let left = if i > 0 { points[i] - points[i - 1] } else { 0.0 };
                let right = if i + 1 < g { points[i + 1] - points[i] } else { 0.0 };
                (left + right) / 2.0
            })
            .collect();
        Ok(Self { points, weights })
    }

    /// `g` equally spaced points from `a` to `b` inclusive.
    pub fn uniform(a: f64, b: f64, g: usize) -> Result<Self> {
        if g < 2 || b <= a {
            return Err(Error::InvalidInput(format!(
                "uniform grid needs g >= 2 and a < b (got g = {g}, [{a}, {b}])"
            )));
        }
        let h = (b - a) / (g - 1) as f64;
        Self::new((0..g).map(|i| if i + 1 == g { b } else { a + h * i as f64 }).collect())
    }

    /// `g` equally spaced points `a + k(b - a)/g`, `k < g`, excluding `b`.
    pub fn half_open(a: f64, b: f64, g: usize) -> Result<Self> {
        if g < 1 || b <= a {
            return Err(Error::InvalidInput(format!(
                "half-open grid needs g >= 1 and a < b (got g = {g}, [{a}, {b}))"
            )));
        }
        let h = (b - a) / g as f64;
        Self::new((0..g).map(|i| a + h * i as f64).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest gap between neighbouring points.
    pub fn max_step(&self) -> f64 {
        self.points.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Index of the point nearest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        (0..self.len())
            .min_by(|&a, &b| (self.points[a] - x).abs().total_cmp(&(self.points[b] - x).abs()))
            .unwrap_or(0)
    }
}

/// Demo settings accepted from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DemoConfig {
    pub diffusion: DiffusionConfig,
    pub translation: TranslationConfig,
    pub multiplication_points: usize,
    pub pol2: Pol2Config,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            diffusion: DiffusionConfig::default(),
            translation: TranslationConfig::default(),
            multiplication_points: 16,
            pol2: Pol2Config::default(),
        }
    }
}

/// Every demo folded into one report.
pub fn demos_all(cfg: &DemoConfig) -> Result<ScanReport> {
    let mut report = ScanReport::new("demos");
    report.absorb("diffusion", diffusion_demo(&cfg.diffusion)?);
    report.absorb("translation", translation_demo(&cfg.translation)?);
    let g = cfg.multiplication_points.max(2);
    let q: Vec<f64> = (0..g).map(|i| -(i as f64) / (g - 1) as f64).collect();
    report.absorb("multiplication", multiplication_demo(&q, &crate::semigroups::T_GRID)?);
    report.absorb("pol2", pol2_demo(&cfg.pol2)?.0);
    report.finish();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_weights() {
        let g = Grid::uniform(0.0, 1.0, 5).unwrap();
        assert_eq!(g.weights(), &[0.125, 0.25, 0.25, 0.25, 0.125]);
        let total: f64 = g.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert_eq!(g.nearest(0.6), 2);
        assert!((g.max_step() - 0.25).abs() < 1e-15);
        assert!(Grid::new(vec![0.0, 0.0]).is_err());
        assert!(Grid::uniform(1.0, 0.0, 3).is_err());
        let h = Grid::half_open(0.0, 1.0, 4).unwrap();
        assert_eq!(h.points(), &[0.0, 0.25, 0.5, 0.75]);
    }

    #[test]
    fn all_demos_pass_on_defaults() {
        let r = demos_all(&DemoConfig::default()).unwrap();
        assert!(r.passed(), "{:?}", r.reason);
        assert_eq!(r.conclusions.len(), 4);
    }

    #[test]
    fn config_rejects_unknown_fields() {
        let c: DemoConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, DemoConfig::default());
        assert!(serde_json::from_str::<DemoConfig>(r#"{"bogus": 1}"#).is_err());
    }
}
