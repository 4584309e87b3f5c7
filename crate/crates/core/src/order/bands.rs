//! Bands of a cover-certified space and their enumeration.
//!
//! On a certified cover the disjoint complement of a set `S` is the zero set
//! of the functionals supporting some element of `S`. Consequently the band
//! lattice is generated under intersection by the bands `{s}^d` whose
//! pattern is the saturated complement of a hyperplane flat of the row
//! matroid, and the full lattice is the intersection closure of those
//! generators together with the whole space.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::pattern::{complement, indices, resize, saturate_rows, Pattern};
use super::OrderedSpace;
use crate::error::{Error, Result};
use crate::linalg::RowSpan;
use crate::optim::{solve_lp, LpStatus, RowBuilder};

/// Largest row count for which the band lattice is enumerated.
pub const M_MAX: usize = 16;

/// Subspace `B = {x : φ_j(x) = 0 ∀ j ∈ pattern}` with saturated pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pattern: Pattern,
    /// Orthonormal columns spanning the band.
    basis: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandSummary {
    pub pattern: Vec<usize>,
    pub dim: usize,
    pub directed: bool,
}

impl Band {
    /// Band of the saturation of `pattern`.
    pub fn from_pattern(space: &OrderedSpace, pattern: &Pattern) -> Result<Band> {
        space.require_cover()?;
        let p = saturate_rows(space.phi(), &resize(pattern, space.num_rows()));
        Ok(Self::from_saturated(space, p))
    }

    pub(crate) fn from_saturated(space: &OrderedSpace, pattern: Pattern) -> Band {
        let basis = RowSpan::of_rows(space.phi(), pattern.ones()).complement_basis();
        Band { pattern, basis }
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn indices(&self) -> Vec<usize> {
        indices(&self.pattern)
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Membership by pattern: `φ_j(x) = 0` for every `j` in the pattern.
    pub fn contains(&self, space: &OrderedSpace, x: &DVector<f64>) -> bool {
        let thr = space.tol.zero * space.scale() * crate::linalg::vec_inf_norm(x);
        self.pattern.ones().all(|j| space.phi.row(j).dot(&x.transpose()).abs() <= thr)
    }

    /// `B^d`, whose pattern is the saturation of the functionals that do not
    /// vanish on `B`.
    pub fn complement(&self, space: &OrderedSpace) -> Band {
        Self::from_saturated(space, complement_pattern(space.phi(), &self.pattern))
    }

    /// `B = B^dd`, checked on patterns.
    pub fn is_band(&self, space: &OrderedSpace) -> bool {
        let dd = complement_pattern(space.phi(), &complement_pattern(space.phi(), &self.pattern));
        dd == self.pattern
    }

    /// Whether `B ∩ K` spans `B`, i.e. some `x ∈ B` has `φ_j(x) > 0` for
    /// every functional outside the pattern.
    pub fn is_directed(&self, space: &OrderedSpace) -> Result<bool> {
        let k = self.dim();
        if k == 0 {
            return Ok(true);
        }
        let off: Vec<usize> = (0..space.num_rows()).filter(|j| !self.pattern.contains(*j)).collect();
        let pb = space.phi() * &self.basis;
        let mut b = RowBuilder::new(k + 1);
        let mut row = vec![0.0; k + 1];
        for &j in &off {
            for c in 0..k {
                row[c] = pb[(j, c)];
            }
            row[k] = -1.0;
            b.ge(&row, 0.0);
        }
        let mut cap = vec![0.0; k + 1];
        cap[k] = -1.0;
        b.ge(&cap, -1.0);
        let mut obj = DVector::zeros(k + 1);
        obj[k] = -1.0;
        let out = solve_lp(&b.build(obj))?;
        Ok(out.status == LpStatus::Optimal && -out.value > 1e-9)
    }

    pub fn summary(&self, space: &OrderedSpace) -> Result<BandSummary> {
        Ok(BandSummary {
            pattern: self.indices(),
            dim: self.dim(),
            directed: self.is_directed(space)?,
        })
    }
}

/// Pattern of `B^d` for the band with (saturated) pattern `p`.
pub(crate) fn complement_pattern(phi: &DMatrix<f64>, p: &Pattern) -> Pattern {
    // functionals not identically zero on B are exactly those outside sat(p)
    saturate_rows(phi, &complement(&saturate_rows(phi, p)))
}

/// `M^d` for a finite set `M`: the band cut out by every functional that
/// supports some element of `M`.
pub fn disjoint_complement(space: &OrderedSpace, m: &[DVector<f64>]) -> Result<Band> {
    space.require_cover()?;
    let mut z = Pattern::with_capacity(space.num_rows());
    for x in m {
        space.check_vec(x)?;
        z.union_with(&space.support(x));
    }
    Ok(Band::from_saturated(space, saturate_rows(space.phi(), &z)))
}

/// Generator patterns `sat([m] ∖ H)` over hyperplane flats `H`, sorted.
pub fn generator_patterns(space: &OrderedSpace) -> Result<&[Pattern]> {
    space.require_cover()?;
    Ok(space
        .cache
        .generators
        .get_or_init(|| compute_generators(space.phi())))
}

fn compute_generators(phi: &DMatrix<f64>) -> Vec<Pattern> {
    let (m, n) = phi.shape();
    let mut flats: HashSet<Pattern> = HashSet::new();
    let mut gens: HashSet<Pattern> = HashSet::new();
    let mut chosen = Vec::with_capacity(n);
    hyperplanes(phi, n - 1, 0, &mut chosen, RowSpan::new(n), &mut flats);
    for h in &flats {
        let mut c = h.clone();
        c.grow(m);
        gens.insert(saturate_rows(phi, &complement(&c)));
    }
    sort_patterns(gens.into_iter().collect())
}

/// Depth-first search over independent row subsets of size `target`,
/// recording their closures.
fn hyperplanes(
    phi: &DMatrix<f64>,
    target: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    span: RowSpan,
    flats: &mut HashSet<Pattern>,
) {
    let m = phi.nrows();
    if chosen.len() == target {
        let mut z = Pattern::with_capacity(m);
        for &j in chosen.iter() {
            z.insert(j);
        }
        let flat = super::pattern::saturate_with(phi, &z, &span);
        flats.insert(flat);
        return;
    }
    for j in start..m {
        if m - j < target - chosen.len() {
            break;
        }
        let mut next = span.clone();
        if next.try_add(&phi.row(j).transpose()) {
            chosen.push(j);
            hyperplanes(phi, target, j + 1, chosen, next, flats);
            chosen.pop();
        }
    }
}

fn sort_patterns(mut v: Vec<Pattern>) -> Vec<Pattern> {
    v.sort_by(|a, b| {
        a.count_ones(..)
            .cmp(&b.count_ones(..))
            .then_with(|| indices(a).cmp(&indices(b)))
    });
    v
}

/// All band patterns, from the whole space (empty pattern) to `{0}`
/// (all functionals), sorted by size then lexicographically.
pub fn band_patterns(space: &OrderedSpace) -> Result<&[Pattern]> {
    space.require_cover()?;
    let m = space.num_rows();
    if m > M_MAX {
        return Err(Error::TooLarge {
            what: "band enumeration row count",
            count: m,
            limit: M_MAX,
        });
    }
    let gens = generator_patterns(space)?;
    let all = space.cache.all.get_or_init(|| {
        let phi = space.phi();
        let mut seen: HashSet<Pattern> = HashSet::new();
        let empty = Pattern::with_capacity(m);
        let mut list = vec![empty.clone()];
        seen.insert(empty);
        for g in gens {
            let snapshot = list.len();
            for i in 0..snapshot {
                let mut u = list[i].clone();
                u.union_with(g);
                let s = saturate_rows(phi, &u);
                if seen.insert(s.clone()) {
                    list.push(s);
                }
            }
        }
        Ok(sort_patterns(list))
    });
    all.as_deref().map_err(Clone::clone)
}

pub fn enumerate_bands(space: &OrderedSpace) -> Result<Vec<Band>> {
    Ok(band_patterns(space)?
        .iter()
        .map(|p| Band::from_saturated(space, p.clone()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::cover::canonicalize;

    fn band_dims(space: &OrderedSpace) -> Vec<(Vec<usize>, usize)> {
        enumerate_bands(space)
            .unwrap()
            .iter()
            .map(|b| (b.indices(), b.dim()))
            .collect()
    }

    #[test]
    fn standard_plane_has_four_bands() {
        let s = canonicalize(&catalog::standard(2)).unwrap().into_space();
        assert_eq!(
            band_dims(&s),
            vec![(vec![], 2), (vec![0], 1), (vec![1], 1), (vec![0, 1], 0)]
        );
    }

    #[test]
    fn one_dimensional_space() {
        let s = canonicalize(&catalog::standard(1)).unwrap().into_space();
        assert_eq!(band_dims(&s), vec![(vec![], 1), (vec![0], 0)]);
    }

    #[test]
    fn four_ray_bands() {
        let s = canonicalize(&catalog::four_ray()).unwrap().into_space();
        let bands = enumerate_bands(&s).unwrap();
        for b in &bands {
            assert!(b.is_band(&s));
        }
        let directed: Vec<Vec<usize>> = bands
            .iter()
            .filter(|b| b.is_directed(&s).unwrap())
            .map(|b| b.indices())
            .collect();
        // {0}, the four extreme rays of K and the whole space
        assert_eq!(
            directed,
            vec![vec![], vec![0, 1], vec![0, 2], vec![1, 3], vec![2, 3], vec![0, 1, 2, 3]]
        );
        // the remaining two bands are the horizontal lines through (1,1,0)
        // and (1,-1,0), which contain no nonzero positive element
        let other: Vec<Vec<usize>> = bands
            .iter()
            .filter(|b| !b.is_directed(&s).unwrap())
            .map(|b| b.indices())
            .collect();
        assert_eq!(other, vec![vec![0, 3], vec![1, 2]]);
    }

    #[test]
    fn four_ray_ray_bands_are_spanned_by_rays() {
        let s = canonicalize(&catalog::four_ray()).unwrap().into_space();
        let rays = [
            ([0usize, 1], [-1.0, 0.0, 1.0]),
            ([2, 3], [1.0, 0.0, 1.0]),
            ([0, 2], [0.0, -1.0, 1.0]),
            ([1, 3], [0.0, 1.0, 1.0]),
        ];
        for (pat, ray) in rays {
            let b = Band::from_pattern(&s, &super::super::pattern::pattern_of(4, pat)).unwrap();
            assert_eq!(b.dim(), 1);
            assert!(b.contains(&s, &DVector::from_row_slice(&ray)));
        }
    }

    #[test]
    fn disjoint_complement_examples() {
        let s = canonicalize(&catalog::four_ray()).unwrap().into_space();
        let b = disjoint_complement(&s, &[DVector::from_vec(vec![1.0, 0.0, 1.0])]).unwrap();
        assert_eq!(b.indices(), vec![0, 1]);
        assert!(b.contains(&s, &DVector::from_vec(vec![-1.0, 0.0, 1.0])));
        assert_eq!(b.dim(), 1);

        let full = disjoint_complement(&s, &[DVector::zeros(3)]).unwrap();
        assert_eq!(full.dim(), 3);
        let empty_set = disjoint_complement(&s, &[]).unwrap();
        assert_eq!(empty_set.dim(), 3);

        let std3 = canonicalize(&catalog::standard(3)).unwrap().into_space();
        let b = disjoint_complement(&std3, &[DVector::from_vec(vec![1.0, 0.0, 0.0])]).unwrap();
        assert_eq!(b.indices(), vec![0]);
        assert_eq!(b.dim(), 2);
    }

    #[test]
    fn polygon_cone_has_trivial_band_lattice() {
        let s = canonicalize(&catalog::polygon(5)).unwrap().into_space();
        assert_eq!(band_dims(&s), vec![(vec![], 3), (vec![0, 1, 2, 3, 4], 0)]);
    }

    #[test]
    fn direct_sum_bands_are_products() {
        let s = canonicalize(&catalog::direct_sum(&[catalog::standard(1), catalog::four_ray()]).unwrap())
            .unwrap()
            .into_space();
        assert_eq!(band_patterns(&s).unwrap().len(), 2 * 8);
    }

    #[test]
    fn uncertified_space_is_refused() {
        assert!(matches!(
            band_patterns(&catalog::standard(2)),
            Err(Error::NotCoverCertified(_))
        ));
    }
}
