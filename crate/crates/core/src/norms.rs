//! Polyhedral norms, regularization and the extension seminorm `ρ` on the
//! lattice cover.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cover::LatticeCover;
use crate::error::{Error, Result};
use crate::optim::{solve_lp, LpStatus, RowBuilder};
use crate::order::{Band, OrderedSpace};

/// Norm on `X`. Every kind is a maximum of finitely many linear forms, so
/// every quantity below is a linear program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormFile", into = "NormFile")]
pub enum NormSpec {
    Sup,
    One,
    /// `‖x‖_u = inf{α >= 0 : -αu <= x <= αu}` for an interior point `u`.
    OrderUnit { u: Vec<f64> },
    WeightedSup { w: Vec<f64> },
}

/// On-disk form `{"kind": ..., "u": [...], "w": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NormFile {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w: Option<Vec<f64>>,
}

impl TryFrom<NormFile> for NormSpec {
    type Error = String;

    fn try_from(f: NormFile) -> std::result::Result<Self, String> {
        let unexpected = |field: &str| Err(format!("field `{field}` is not used by norm kind `{}`", f.kind));
        match f.kind.as_str() {
            "sup" | "one" => {
                if f.u.is_some() {
                    return unexpected("u");
                }
                if f.w.is_some() {
                    return unexpected("w");
                }
                Ok(if f.kind == "sup" { NormSpec::Sup } else { NormSpec::One })
            }
            "order_unit" => {
                if f.w.is_some() {
                    return unexpected("w");
                }
                let u = f.u.ok_or("norm kind `order_unit` requires field `u`")?;
                Ok(NormSpec::OrderUnit { u })
            }
            "weighted_sup" => {
                if f.u.is_some() {
                    return unexpected("u");
                }
                let w = f.w.ok_or("norm kind `weighted_sup` requires field `w`")?;
                Ok(NormSpec::WeightedSup { w })
            }
            other => Err(format!(
                "unknown norm kind `{other}`; expected sup, one, order_unit or weighted_sup"
            )),
        }
    }
}

impl From<NormSpec> for NormFile {
    fn from(n: NormSpec) -> Self {
        let (kind, u, w) = match n {
            NormSpec::Sup => ("sup", None, None),
            NormSpec::One => ("one", None, None),
            NormSpec::OrderUnit { u } => ("order_unit", Some(u), None),
            NormSpec::WeightedSup { w } => ("weighted_sup", None, Some(w)),
        };
        NormFile {
            kind: kind.to_string(),
            u,
            w,
        }
    }
}

/// Value of a regularized norm or of `ρ` with a minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct RegValue {
    pub value: f64,
    pub witness: DVector<f64>,
}

impl NormSpec {
    pub fn validate(&self, space: &OrderedSpace) -> Result<()> {
        let n = space.dim();
        match self {
            NormSpec::Sup | NormSpec::One => Ok(()),
            NormSpec::WeightedSup { w } => {
                if w.len() != n {
                    return Err(Error::Dimension(format!(
                        "weights of length {} for dimension {n}",
                        w.len()
                    )));
                }
                if w.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
                    return Err(Error::InvalidInput("weights must be positive".into()));
                }
                Ok(())
            }
            NormSpec::OrderUnit { u } => {
                if u.len() != n {
                    return Err(Error::Dimension(format!(
                        "order unit of length {} for dimension {n}",
                        u.len()
                    )));
                }
                let pu = space.eval(&DVector::from_column_slice(u));
                if pu.iter().any(|&v| v <= 0.0) {
                    return Err(Error::InvalidInput(
                        "order unit must be an interior point of the cone".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// The linear forms whose maximum is the norm.
    pub fn forms(&self, space: &OrderedSpace) -> Vec<DVector<f64>> {
        let n = space.dim();
        let unit = |i: usize, s: f64| DVector::from_fn(n, |k, _| if k == i { s } else { 0.0 });
        match self {
            NormSpec::Sup => (0..n).flat_map(|i| [unit(i, 1.0), unit(i, -1.0)]).collect(),
            NormSpec::WeightedSup { w } => {
                (0..n).flat_map(|i| [unit(i, w[i]), unit(i, -w[i])]).collect()
            }
            NormSpec::One => (0..1usize << n)
                .map(|mask| {
                    DVector::from_fn(n, |k, _| if mask >> k & 1 == 1 { -1.0 } else { 1.0 })
                })
                .collect(),
            NormSpec::OrderUnit { u } => {
                let pu = space.eval(&DVector::from_column_slice(u));
                (0..space.num_rows())
                    .flat_map(|j| {
                        let f = space.row(j) / pu[j];
                        [f.clone(), -f]
                    })
                    .collect()
            }
        }
    }

    pub fn eval(&self, space: &OrderedSpace, x: &DVector<f64>) -> f64 {
        match self {
            NormSpec::Sup => x.amax(),
            NormSpec::One => x.iter().map(|v| v.abs()).sum(),
            NormSpec::WeightedSup { w } => {
                x.iter().zip(w).map(|(v, wi)| (v * wi).abs()).fold(0.0, f64::max)
            }
            NormSpec::OrderUnit { u } => {
                let pu = space.eval(&DVector::from_column_slice(u));
                space
                    .eval(x)
                    .iter()
                    .zip(pu.iter())
                    .map(|(a, b)| a.abs() / b)
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Number of auxiliary LP variables in the epigraph encoding.
    fn aux_vars(&self, space: &OrderedSpace) -> usize {
        match self {
            NormSpec::One => space.dim(),
            _ => 0,
        }
    }

    /// Appends `‖x‖ <= t` where `x` occupies `x_off..x_off+n`.
    fn push_epigraph(
        &self,
        b: &mut RowBuilder,
        space: &OrderedSpace,
        total: usize,
        x_off: usize,
        t: usize,
        aux_off: usize,
    ) {
        let n = space.dim();
        match self {
            NormSpec::One => {
                for i in 0..n {
                    for s in [1.0, -1.0] {
                        let mut r = vec![0.0; total];
                        r[aux_off + i] = 1.0;
                        r[x_off + i] = -s;
                        b.ge(&r, 0.0);
                    }
                }
                let mut r = vec![0.0; total];
                r[t] = 1.0;
                for i in 0..n {
                    r[aux_off + i] = -1.0;
                }
                b.ge(&r, 0.0);
            }
            _ => {
                for f in self.forms(space) {
                    let mut r = vec![0.0; total];
                    r[t] = 1.0;
                    for i in 0..n {
                        r[x_off + i] = -f[i];
                    }
                    b.ge(&r, 0.0);
                }
            }
        }
    }
}

/// Appends `rows·x >= rhs` row by row, with `x` at `x_off`.
fn push_rows(b: &mut RowBuilder, rows: &DMatrix<f64>, rhs: &DVector<f64>, total: usize, x_off: usize, sign: f64) {
    for j in 0..rows.nrows() {
        let mut r = vec![0.0; total];
        for i in 0..rows.ncols() {
            r[x_off + i] = sign * rows[(j, i)];
        }
        b.ge(&r, rhs[j]);
    }
}

/// Minimizes `t` over an LP whose variables are `(x, t, aux)`.
fn minimize_t(b: RowBuilder, n: usize, total: usize) -> Result<RegValue> {
    let mut c = DVector::zeros(total);
    c[n] = 1.0;
    let out = solve_lp(&b.build(c))?;
    if out.status != LpStatus::Optimal {
        return Err(Error::Invariant(format!(
            "norm minimization reported {:?}",
            out.status
        )));
    }
    Ok(RegValue {
        value: out.value.max(0.0),
        witness: DVector::from_column_slice(&out.witness[..n]),
    })
}

/// `inf{‖y‖ : -y <= x <= y}`.
pub fn regular_norm(space: &OrderedSpace, norm: &NormSpec, x: &DVector<f64>) -> Result<RegValue> {
    regularized_norm(space, norm, x, 1)
}

/// The regularization applied `times` times:
/// `inf{‖y_k‖ : ±x <= y_1, ±y_1 <= y_2, ...}`.
pub fn regularized_norm(
    space: &OrderedSpace,
    norm: &NormSpec,
    x: &DVector<f64>,
    times: usize,
) -> Result<RegValue> {
    space.check_vec(x)?;
    norm.validate(space)?;
    if times == 0 {
        return Ok(RegValue {
            value: norm.eval(space, x),
            witness: x.clone(),
        });
    }
    let n = space.dim();
    // variables: y_times (n), t, aux, y_1 .. y_{times-1}
    let aux = norm.aux_vars(space);
    let total = n + 1 + aux + n * (times - 1);
    let chain = |k: usize| -> usize {
        if k == times {
            0
        } else {
            n + 1 + aux + n * (k - 1)
        }
    };
    let mut b = RowBuilder::new(total);
    let phi = space.phi();
    let px = space.eval(x);
    // level 1 dominates ±x
    push_rows(&mut b, phi, &px, total, chain(1), 1.0);
    push_rows(&mut b, phi, &(-&px), total, chain(1), 1.0);
    for k in 1..times {
        // Φ(y_{k+1} - y_k) >= 0 and Φ(y_{k+1} + y_k) >= 0
        for s in [1.0, -1.0] {
            for j in 0..phi.nrows() {
                let mut r = vec![0.0; total];
                for i in 0..n {
                    r[chain(k + 1) + i] += phi[(j, i)];
                    r[chain(k) + i] -= s * phi[(j, i)];
                }
                b.ge(&r, 0.0);
            }
        }
    }
    norm.push_epigraph(&mut b, space, total, 0, n, n + 1);
    minimize_t(b, n, total)
}

/// `ρ(z) = inf{‖x‖ : -i(x) <= z <= i(x)}` for `z ∈ ℝ^{m_c}`.
pub fn rho_extension(cover: &LatticeCover, norm: &NormSpec, z: &DVector<f64>) -> Result<RegValue> {
    let space = cover.space();
    norm.validate(space)?;
    if z.len() != cover.m_c() {
        return Err(Error::Dimension(format!(
            "cover vector of length {} for {} coordinates",
            z.len(),
            cover.m_c()
        )));
    }
    let n = space.dim();
    let aux = norm.aux_vars(space);
    let total = n + 1 + aux;
    let mut b = RowBuilder::new(total);
    push_rows(&mut b, cover.phi_c(), &z.abs(), total, 0, 1.0);
    norm.push_epigraph(&mut b, space, total, 0, n, n + 1);
    minimize_t(b, n, total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoVerdict {
    pub rho: f64,
    pub threshold: f64,
    pub disjoint: bool,
}

/// `ρ(|i(u)| ∧ |i(v)|)` and whether it vanishes up to `τ_zero` relative to
/// the smaller of `‖u‖`, `‖v‖`. A positive verdict implies `u ⊥ v`.
pub fn rho_meet_disjoint(
    cover: &LatticeCover,
    norm: &NormSpec,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<RhoVerdict> {
    let space = cover.space();
    let iu = cover.embed(u)?.abs();
    let iv = cover.embed(v)?.abs();
    let z = iu.zip_map(&iv, f64::min);
    let rho = rho_extension(cover, norm, &z)?.value;
    let threshold = space.tol().zero * norm.eval(space, u).min(norm.eval(space, v));
    Ok(RhoVerdict {
        rho,
        threshold,
        disjoint: rho <= threshold,
    })
}

/// `M = sup{‖x‖ : 0 <= x <= y, ‖y‖ <= 1}`, maximizing each defining linear
/// form of the norm over the bounded polyhedron.
pub fn semimonotone_constant(space: &OrderedSpace, norm: &NormSpec) -> Result<f64> {
    norm.validate(space)?;
    let n = space.dim();
    let phi = space.phi();
    let aux = norm.aux_vars(space);
    // variables: y (n), t, aux, x (n)
    let total = n + 1 + aux + n;
    let x_off = n + 1 + aux;
    let mut b = RowBuilder::new(total);
    let zero = DVector::zeros(phi.nrows());
    push_rows(&mut b, phi, &zero, total, x_off, 1.0);
    for j in 0..phi.nrows() {
        let mut r = vec![0.0; total];
        for i in 0..n {
            r[i] = phi[(j, i)];
            r[x_off + i] = -phi[(j, i)];
        }
        b.ge(&r, 0.0);
    }
    norm.push_epigraph(&mut b, space, total, 0, n, n + 1);
    let mut cap = vec![0.0; total];
    cap[n] = -1.0;
    b.ge(&cap, -1.0);
    let base = b;
    let mut best = 0.0f64;
    for f in norm.forms(space) {
        let mut c = DVector::zeros(total);
        for i in 0..n {
            c[x_off + i] = -f[i];
        }
        let out = solve_lp(&base.clone().build(c))?;
        match out.status {
            LpStatus::Optimal => best = best.max(-out.value),
            status => {
                return Err(Error::Invariant(format!(
                    "semimonotone LP reported {status:?}; the region must be bounded"
                )))
            }
        }
    }
    Ok(best)
}

/// `‖A‖ = sup{‖Ax‖ : ‖x‖ <= 1}`, maximizing each defining form of the norm
/// composed with `A` over the unit ball.
pub fn operator_norm(space: &OrderedSpace, norm: &NormSpec, a: &DMatrix<f64>) -> Result<f64> {
    norm.validate(space)?;
    let n = space.dim();
    if a.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "operator of shape {:?} on a space of dimension {n}",
            a.shape()
        )));
    }
    let aux = norm.aux_vars(space);
    // variables: x (n), t, aux
    let total = n + 1 + aux;
    let mut b = RowBuilder::new(total);
    norm.push_epigraph(&mut b, space, total, 0, n, n + 1);
    let mut cap = vec![0.0; total];
    cap[n] = -1.0;
    b.ge(&cap, -1.0);
    let mut best = 0.0f64;
    for f in norm.forms(space) {
        let fa = a.transpose() * f;
        let mut c = DVector::zeros(total);
        for i in 0..n {
            c[i] = -fa[i];
        }
        let out = solve_lp(&b.clone().build(c))?;
        match out.status {
            LpStatus::Optimal => best = best.max(-out.value),
            status => {
                return Err(Error::Invariant(format!(
                    "operator norm LP reported {status:?} over the unit ball"
                )))
            }
        }
    }
    Ok(best)
}

/// `‖x‖_u` by a one-variable LP.
pub fn order_unit_norm(space: &OrderedSpace, u: &DVector<f64>, x: &DVector<f64>) -> Result<f64> {
    space.check_vec(x)?;
    let norm = NormSpec::OrderUnit {
        u: u.iter().cloned().collect(),
    };
    norm.validate(space)?;
    let pu = space.eval(u);
    let px = space.eval(x);
    let mut b = RowBuilder::new(1);
    for j in 0..space.num_rows() {
        b.ge(&[pu[j]], px[j]);
        b.ge(&[pu[j]], -px[j]);
    }
    let out = solve_lp(&b.build(DVector::from_element(1, 1.0)))?;
    if out.status != LpStatus::Optimal {
        return Err(Error::Invariant("order-unit LP not optimal".into()));
    }
    Ok(out.value.max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedProbeReport {
    pub trials: usize,
    pub limits_in_band: usize,
    pub sequences_rejected: usize,
    pub max_pattern_residual: f64,
    pub passed: bool,
}

/// Builds convergent sequences inside the band (random elements plus
/// decaying perturbations projected back onto the band) and checks that the
/// limits satisfy the band's zero pattern. Unprojected perturbations leave
/// the band and are counted as rejected sequences.
pub fn band_closed_probe(
    space: &OrderedSpace,
    norm: &NormSpec,
    band: &Band,
    trials: usize,
    seed: u64,
) -> Result<ClosedProbeReport> {
    space.require_cover()?;
    norm.validate(space)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = space.dim();
    let basis = band.basis();
    let proj = basis * basis.transpose();
    let mut limits_in_band = 0;
    let mut rejected = 0;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let c = DVector::from_fn(basis.ncols(), |_, _| rng.random_range(-1.0..1.0));
        let limit = basis * c;
        let e = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let mut in_band = true;
        let mut escaped = false;
        for k in 1..=20 {
            let h = 1.0 / k as f64;
            let xk = &limit * (1.0 + h) + &proj * &e * h;
            in_band &= band.contains(space, &xk);
            let raw = &limit + &e * h;
            escaped |= !band.contains(space, &raw);
        }
        let res = band
            .pattern()
            .ones()
            .map(|j| space.phi().row(j).dot(&limit.transpose()).abs())
            .fold(0.0, f64::max);
        worst = worst.max(res / (1.0 + norm.eval(space, &limit)));
        if in_band && band.contains(space, &limit) {
            limits_in_band += 1;
        }
        if escaped {
            rejected += 1;
        }
    }
    Ok(ClosedProbeReport {
        trials,
        limits_in_band,
        sequences_rejected: rejected,
        max_pattern_residual: worst,
        passed: limits_in_band == trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::cover::canonicalize;
    use crate::optim::solve_lp_exact;
    use proptest::prelude::{prop_assert, proptest, ProptestConfig};
    use crate::order::pattern::pattern_of;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    #[test]
    fn norm_spec_json() {
        let n: NormSpec = serde_json::from_str(r#"{"kind":"order_unit","u":[1,1]}"#).unwrap();
        assert_eq!(n, NormSpec::OrderUnit { u: vec![1.0, 1.0] });
        let n: NormSpec = serde_json::from_str(r#"{"kind":"sup"}"#).unwrap();
        assert_eq!(n, NormSpec::Sup);
        assert!(serde_json::from_str::<NormSpec>(r#"{"kind":"sup","bogus":1}"#).is_err());
        assert!(serde_json::from_str::<NormSpec>(r#"{"kind":"euclid"}"#).is_err());
    }

    #[test]
    fn regular_norm_standard_plane() {
        let s = catalog::standard(2);
        let r = regular_norm(&s, &NormSpec::Sup, &v(&[1.0, -1.0])).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        // the witness dominates ±x and has sup norm 1; on the lattice the
        // modulus (1,1) is the unique such element
        assert!((&r.witness - v(&[1.0, 1.0])).amax() < 1e-9);
        let r = regular_norm(&s, &NormSpec::Sup, &DVector::zeros(2)).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn regular_norm_four_ray_matches_exact_lp() {
        let f = catalog::four_ray();
        let x = v(&[1.0, 0.0, 0.0]);
        let r = regular_norm(&f, &NormSpec::Sup, &x).unwrap();
        // exact-arithmetic solve of the same program: min t, Φy >= ±Φx, t >= ±y_i
        let phi = f.phi();
        let px = f.eval(&x);
        let mut b = RowBuilder::new(4);
        for j in 0..4 {
            let row = [phi[(j, 0)], phi[(j, 1)], phi[(j, 2)], 0.0];
            b.ge(&row, px[j]);
            b.ge(&row, -px[j]);
        }
        for i in 0..3 {
            let mut row = [0.0; 4];
            row[3] = 1.0;
            row[i] = -1.0;
            b.ge(&row, 0.0);
            row[i] = 1.0;
            b.ge(&row, 0.0);
        }
        let exact = solve_lp_exact(&b.build(v(&[0.0, 0.0, 0.0, 1.0]))).unwrap();
        assert!((r.value - exact.value).abs() < 1e-12);
        // y must dominate |x1| through the cone, forcing y3 >= 1
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn order_unit_norm_examples() {
        let s = catalog::standard(2);
        let u = v(&[1.0, 1.0]);
        assert!((order_unit_norm(&s, &u, &v(&[2.0, -1.0])).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(order_unit_norm(&s, &u, &DVector::zeros(2)).unwrap(), 0.0);
        assert!((order_unit_norm(&s, &u, &u).unwrap() - 1.0).abs() < 1e-12);
        assert!(order_unit_norm(&s, &v(&[1.0, 0.0]), &u).is_err());
    }

    #[test]
    fn rho_examples() {
        let c = canonicalize(&catalog::four_ray()).unwrap();
        assert_eq!(rho_extension(&c, &NormSpec::Sup, &DVector::zeros(4)).unwrap().value, 0.0);
        let r = rho_meet_disjoint(&c, &NormSpec::Sup, &v(&[1.0, 0.0, 1.0]), &v(&[-1.0, 0.0, 1.0]))
            .unwrap();
        assert!(r.disjoint && r.rho == 0.0);
        let u = v(&[0.2, 0.1, 1.0]);
        assert!(!rho_meet_disjoint(&c, &NormSpec::Sup, &u, &u).unwrap().disjoint);
        // z = e_1: φ_3 >= 0 gives x1 + x2 <= x3 and φ_0 >= 1 gives
        // x1 + x2 >= 1 - x3, so x3 >= 1/2; attained at (1/4, 1/4, 1/2)
        let z = v(&[1.0, 0.0, 0.0, 0.0]);
        let r = rho_extension(&c, &NormSpec::Sup, &z).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn semimonotone_examples() {
        let s = catalog::standard(3);
        assert!((semimonotone_constant(&s, &NormSpec::Sup).unwrap() - 1.0).abs() < 1e-12);
        let f = catalog::four_ray();
        let m = semimonotone_constant(&f, &NormSpec::Sup).unwrap();
        assert!(m >= 1.0 - 1e-12);
        // sampled lower bound: never exceeds the LP value
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gens = [v(&[1.0, 0.0, 1.0]), v(&[-1.0, 0.0, 1.0]), v(&[0.0, 1.0, 1.0]), v(&[0.0, -1.0, 1.0])];
        let mut sampled: f64 = 0.0;
        for _ in 0..2000 {
            let a: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0)).collect();
            let b: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0)).collect();
            let x = gens.iter().zip(&a).fold(DVector::zeros(3), |acc, (g, w)| acc + g * *w);
            let y = &x + gens.iter().zip(&b).fold(DVector::zeros(3), |acc, (g, w)| acc + g * *w);
            sampled = sampled.max(x.amax() / y.amax());
        }
        assert!(sampled <= m + 1e-9, "{sampled} > {m}");
        let ou = NormSpec::OrderUnit { u: vec![0.0, 0.0, 1.0] };
        assert!((semimonotone_constant(&f, &ou).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn operator_norms_match_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = catalog::standard(3);
        for _ in 0..5 {
            let a = DMatrix::from_fn(3, 3, |_, _| rng.random_range(-2.0..2.0));
            let sup = operator_norm(&s, &NormSpec::Sup, &a).unwrap();
            assert!((sup - crate::linalg::inf_norm(&a)).abs() < 1e-9);
            let one = operator_norm(&s, &NormSpec::One, &a).unwrap();
            assert!((one - crate::linalg::one_norm(&a)).abs() < 1e-9);
        }
        let f = catalog::four_ray();
        let id = DMatrix::identity(3, 3);
        let ou = NormSpec::OrderUnit { u: vec![0.0, 0.0, 1.0] };
        assert!((operator_norm(&f, &ou, &id).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn band_probe() {
        let c = canonicalize(&catalog::four_ray()).unwrap();
        let s = c.space();
        let band = Band::from_pattern(s, &pattern_of(4, [0, 1])).unwrap();
        let r = band_closed_probe(s, &NormSpec::Sup, &band, 200, 1).unwrap();
        assert!(r.passed);
        assert_eq!(r.sequences_rejected, 200);

        let st = canonicalize(&catalog::standard(2)).unwrap();
        let e1_band = Band::from_pattern(st.space(), &pattern_of(2, [1])).unwrap();
        let r = band_closed_probe(st.space(), &NormSpec::Sup, &e1_band, 1000, 2).unwrap();
        assert!(r.passed);
        assert!(r.max_pattern_residual < 1e-12);
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        // ρ is a monotone seminorm with ρ(|z|) = ρ(z), and extends the
        // regularized norm through the embedding.
        #[test]
        fn rho_seminorm_properties(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let raw = catalog::random_space(&mut rng, &Default::default());
            let c = canonicalize(&raw).unwrap();
            let m = c.m_c();
            let norm = NormSpec::Sup;
            let z = random_vec(&mut rng, m);
            let w = random_vec(&mut rng, m);
            let a = rng.random_range(-3.0..3.0);
            let rz = rho_extension(&c, &norm, &z).unwrap().value;
            let rw = rho_extension(&c, &norm, &w).unwrap().value;
            let raz = rho_extension(&c, &norm, &(&z * a)).unwrap().value;
            prop_assert!((raz - a.abs() * rz).abs() <= 1e-8 * (1.0 + rz));
            let rsum = rho_extension(&c, &norm, &(&z + &w)).unwrap().value;
            prop_assert!(rsum <= rz + rw + 1e-8);
            let zabs = z.abs();
            prop_assert!((rho_extension(&c, &norm, &zabs).unwrap().value - rz).abs() <= 1e-9);
            let bigger = &zabs + w.abs();
            prop_assert!(rho_extension(&c, &norm, &bigger).unwrap().value >= rz - 1e-9);

            let x = random_vec(&mut rng, raw.dim());
            let reg = regular_norm(&raw, &norm, &x).unwrap().value;
            let ext = rho_extension(&c, &norm, &c.embed(&x).unwrap()).unwrap().value;
            prop_assert!((reg - ext).abs() <= 1e-8 * (1.0 + reg));
            let twice = regularized_norm(&raw, &norm, &x, 2).unwrap().value;
            prop_assert!((twice - reg).abs() <= 1e-8 * (1.0 + reg));
            // -y <= x <= y gives 0 <= x + y <= 2y, so ‖x‖ <= (2M + 1)‖y‖
            let mm = semimonotone_constant(&raw, &norm).unwrap();
            prop_assert!(reg >= norm.eval(&raw, &x) / (2.0 * mm + 1.0) - 1e-9);
        }
    }
}
