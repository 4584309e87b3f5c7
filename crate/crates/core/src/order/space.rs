use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::optim::{solve_lp, LpStatus, RowBuilder};
use crate::tol::Tolerances;

/// Finite-dimensional ordered vector space `(ℝⁿ, K)` with
/// `K = {x : Φx >= 0}`. Rows of `Φ` are the dual functionals `φ_j`.
///
/// Construction verifies that `K` is pointed (`rank Φ = n`) and generating
/// (an interior point exists). Spaces produced by [`crate::cover::canonicalize`]
/// additionally carry the cover certification, which unlocks the fast
/// componentwise disjointness test and band computations.
#[derive(Debug, Clone)]
pub struct OrderedSpace {
    pub(crate) name: String,
    pub(crate) phi: DMatrix<f64>,
    pub(crate) interior: DVector<f64>,
    pub(crate) cover_certified: bool,
    pub(crate) tol: Tolerances,
    pub(crate) cache: Arc<BandCache>,
}

#[derive(Debug, Default)]
pub(crate) struct BandCache {
    pub generators: OnceLock<Vec<FixedBitSet>>,
    pub all: OnceLock<std::result::Result<Vec<FixedBitSet>, Error>>,
}

/// Validates `phi` and builds the space. See [`OrderedSpace`].
pub fn make_space(phi: DMatrix<f64>) -> Result<OrderedSpace> {
    OrderedSpace::new(phi)
}

impl OrderedSpace {
    pub fn new(phi: DMatrix<f64>) -> Result<Self> {
        let (m, n) = phi.shape();
        if m == 0 || n == 0 {
            return Err(Error::InvalidInput(
                "dual functional matrix must be nonempty".into(),
            ));
        }
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "dual functionals must have finite entries".into(),
            ));
        }
        if let Some(j) = (0..m).find(|&j| phi.row(j).iter().all(|&v| v == 0.0)) {
            return Err(Error::InvalidInput(format!("dual functional {j} is zero")));
        }
        let rank = linalg::rank(&phi);
        if rank < n {
            return Err(Error::NotPointed { rank, dim: n });
        }
        let interior = interior_point(&phi)?;
        Ok(Self {
            name: String::new(),
            phi,
            interior,
            cover_certified: false,
            tol: Tolerances::default(),
            cache: Arc::default(),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(linalg::from_rows(rows)?)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_tol(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    /// Marks `phi` as a certified lattice cover. Only the cover module may
    /// call this after checking extremality and cone equality.
    pub(crate) fn certified(phi: DMatrix<f64>, interior: DVector<f64>, name: String, tol: Tolerances) -> Self {
        Self {
            name,
            phi,
            interior,
            cover_certified: true,
            tol,
            cache: Arc::default(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.phi.ncols()
    }

    /// Number of dual functionals.
    pub fn num_rows(&self) -> usize {
        self.phi.nrows()
    }

    pub fn phi(&self) -> &DMatrix<f64> {
        &self.phi
    }

    pub fn row(&self, j: usize) -> DVector<f64> {
        self.phi.row(j).transpose()
    }

    /// A point with `Φx > 0`, certifying that the cone is generating.
    pub fn interior_point(&self) -> &DVector<f64> {
        &self.interior
    }

    pub fn is_cover_certified(&self) -> bool {
        self.cover_certified
    }

    pub fn tol(&self) -> &Tolerances {
        &self.tol
    }

    /// `‖Φ‖_∞`, the scale used for support detection.
    pub fn scale(&self) -> f64 {
        linalg::inf_norm(&self.phi)
    }

    /// `Φx`.
    pub fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.phi * x
    }

    pub fn check_vec(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "vector of length {} in a space of dimension {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// `x ∈ K` up to the zero tolerance relative to `‖Φ‖‖x‖`.
    pub fn contains(&self, x: &DVector<f64>) -> bool {
        let thr = self.tol.zero * self.scale() * linalg::vec_inf_norm(x);
        self.eval(x).iter().all(|&v| v >= -thr)
    }

    /// Dual functionals that are nonzero on `x`, relative to
    /// `τ_zero·‖Φ‖_∞·‖x‖_∞`.
    pub fn support(&self, x: &DVector<f64>) -> FixedBitSet {
        let thr = self.tol.zero * self.scale() * linalg::vec_inf_norm(x);
        let v = self.eval(x);
        let mut s = FixedBitSet::with_capacity(self.num_rows());
        for (j, &val) in v.iter().enumerate() {
            if val.abs() > thr {
                s.insert(j);
            }
        }
        s
    }

    pub(crate) fn require_cover(&self) -> Result<()> {
        if self.cover_certified {
            Ok(())
        } else {
            Err(Error::NotCoverCertified(self.name.clone()))
        }
    }
}

/// Solves `max s` s.t. `Φx >= s·1`, `s <= 1`; a positive optimum gives an
/// interior point.
fn interior_point(phi: &DMatrix<f64>) -> Result<DVector<f64>> {
    let (m, n) = phi.shape();
    let mut b = RowBuilder::new(n + 1);
    let mut row = vec![0.0; n + 1];
    for j in 0..m {
        for i in 0..n {
            row[i] = phi[(j, i)];
        }
        row[n] = -1.0;
        b.ge(&row, 0.0);
    }
    let mut cap = vec![0.0; n + 1];
    cap[n] = -1.0;
    b.ge(&cap, -1.0);
    let mut c = DVector::zeros(n + 1);
    c[n] = -1.0;
    let out = solve_lp(&b.build(c))?;
    if out.status != LpStatus::Optimal || -out.value <= 1e-9 {
        return Err(Error::NotGenerating);
    }
    Ok(DVector::from_iterator(n, out.witness[..n].iter().cloned()))
}
