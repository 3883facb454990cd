//! Exact integrals over polytopes and their boundaries, and lattice sums.
//!
//! Volume integrals triangulate and apply the Dirichlet moment formula in
//! barycentric coordinates,
//! `∫_S Π λ_i^{β_i} = k!·μ(S)·Π β_i! / (k + |β|)!`, which holds for a
//! `k`-simplex with any translation-invariant measure `μ` on its affine hull.
//! Boundary integrals use the same formula with the lattice-normalised
//! facet measure `dσ`.

use thiserror::Error;

use crate::geometry::Polytope;
use crate::pl::PlFunction;
use crate::polynomial::Polynomial;
use crate::region::{Region, Simplex};
use crate::scalar::{factorial, Scalar};

/// Default cap on the integer bounding box scanned by [`lattice_points`].
pub const DEFAULT_LATTICE_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntegrationError {
    #[error("simplex is degenerate (zero volume)")]
    DegenerateSimplex,
    #[error("simplex has {found} vertices, expected {expected} for a full-dimensional simplex")]
    NotFullDimensional { expected: usize, found: usize },
    #[error("lattice scan of {cells} cells exceeds the budget of {budget}")]
    ScaleOverflow { cells: u128, budget: u128 },
    #[error("scale k must be positive")]
    NonPositiveScale,
}

/// Integral of `f` over a `k`-simplex whose measure is `measure`.
fn simplex_integral<T: Scalar>(s: &Simplex<T>, f: &Polynomial<T>, measure: &T) -> T {
    if f.is_zero() || measure.is_zero() {
        return T::zero();
    }
    let k = s.order();
    let n = s.ambient_dim();
    // x_j = Σ_i λ_i v_ij
    let subs: Vec<Polynomial<T>> = (0..n)
        .map(|j| {
            let coeffs: Vec<T> = s.vertices.iter().map(|v| v[j].clone()).collect();
            Polynomial::affine(&coeffs, &T::zero())
        })
        .collect();
    let bary = f.compose(&subs);
    let kf = factorial::<T>(k as u32);
    let mut total = T::zero();
    for (beta, c) in bary.terms() {
        let deg: u32 = beta.iter().sum();
        let num = beta.iter().fold(T::one(), |acc, &b| acc * factorial::<T>(b));
        total += c.clone() * num / factorial::<T>(k as u32 + deg);
    }
    total * kf * measure
}

/// `∫_S x^α dx` over a full-dimensional simplex.
pub fn integrate_monomial_simplex<T: Scalar>(s: &Simplex<T>, alpha: &[u32]) -> Result<T, IntegrationError> {
    let n = s.ambient_dim();
    if s.vertices.len() != n + 1 {
        return Err(IntegrationError::NotFullDimensional { expected: n + 1, found: s.vertices.len() });
    }
    let vol = s.volume();
    if vol.is_zero_tol() {
        return Err(IntegrationError::DegenerateSimplex);
    }
    Ok(simplex_integral(s, &Polynomial::monomial(alpha.to_vec(), T::one()), &vol))
}

/// `∫_S f dx` over a full-dimensional simplex.
pub fn integrate_simplex<T: Scalar>(s: &Simplex<T>, f: &Polynomial<T>) -> T {
    simplex_integral(s, f, &s.volume())
}

/// `∫_R f dx` over a convex region (zero when it is lower-dimensional).
pub fn integrate_region<T: Scalar>(r: &Region<T>, f: &Polynomial<T>) -> T {
    r.triangulate().iter().fold(T::zero(), |acc, s| acc + integrate_simplex(s, f))
}

/// `∫_P f dx`.
pub fn integrate_polynomial<T: Scalar>(p: &Polytope<T>, f: &Polynomial<T>) -> T {
    integrate_region(p.region(), f)
}

/// `∫ f dσ` over the face of `r` on constraint `c`, where that constraint is
/// the hyperplane of a facet with primitive normal `normal`.
pub fn region_facet_integral<T: Scalar>(r: &Region<T>, c: usize, normal: &[i64], f: &Polynomial<T>) -> T {
    r.facet_triangulation(c).iter().fold(T::zero(), |acc, s| acc + simplex_integral(s, f, &s.facet_measure(normal)))
}

/// `∫_{∂P} f dσ` for a polynomial `f`.
pub fn boundary_integral<T: Scalar>(p: &Polytope<T>, f: &Polynomial<T>) -> T {
    let mut total = T::zero();
    for facet in p.facets() {
        let normal = &p.halfspaces()[facet.halfspace_index].normal;
        for s in &facet.simplices {
            total += simplex_integral(s, f, &s.facet_measure(normal));
        }
    }
    total
}

/// `∫_P w·u dx`, integrated cell by cell.
pub fn integrate_pl_weighted<T: Scalar>(u: &PlFunction<T>, weight: &Polynomial<T>) -> T {
    u.cells().iter().fold(T::zero(), |acc, cell| {
        let f = weight * &u.pieces()[cell.piece].to_polynomial();
        acc + integrate_region(&cell.region, &f)
    })
}

/// `∫_P u dx`.
pub fn integrate_pl<T: Scalar>(u: &PlFunction<T>) -> T {
    integrate_pl_weighted(u, &Polynomial::constant(u.domain().dim(), T::one()))
}

/// `∫_{∂P} w·u dσ`; each facet inherits the cell structure of `u`.
pub fn boundary_integral_pl_weighted<T: Scalar>(u: &PlFunction<T>, weight: &Polynomial<T>) -> T {
    let p = u.domain();
    let mut total = T::zero();
    for cell in u.cells() {
        let f = weight * &u.pieces()[cell.piece].to_polynomial();
        for (i, h) in p.halfspaces().iter().enumerate() {
            total += region_facet_integral(&cell.region, i, &h.normal, &f);
        }
    }
    total
}

/// `∫_{∂P} u dσ`.
pub fn boundary_integral_pl<T: Scalar>(u: &PlFunction<T>) -> T {
    boundary_integral_pl_weighted(u, &Polynomial::constant(u.domain().dim(), T::one()))
}

/// Integer points of `kP̄`.
pub fn lattice_points<T: Scalar>(p: &Polytope<T>, k: i64) -> Result<Vec<Vec<i64>>, IntegrationError> {
    lattice_points_with_budget(p, k, DEFAULT_LATTICE_BUDGET)
}

pub fn lattice_points_with_budget<T: Scalar>(
    p: &Polytope<T>,
    k: i64,
    budget: u128,
) -> Result<Vec<Vec<i64>>, IntegrationError> {
    if k <= 0 {
        return Err(IntegrationError::NonPositiveScale);
    }
    let n = p.dim();
    let kk = T::from_int(k);
    let mut lo = vec![i64::MAX; n];
    let mut hi = vec![i64::MIN; n];
    let overflow = IntegrationError::ScaleOverflow { cells: u128::MAX, budget };
    for v in p.vertices() {
        for j in 0..n {
            let x = v[j].clone() * &kk;
            lo[j] = lo[j].min(x.ceil_i64().ok_or(overflow.clone())?);
            hi[j] = hi[j].max(x.floor_i64().ok_or(overflow.clone())?);
        }
    }
    let cells = (0..n).try_fold(1u128, |acc, j| acc.checked_mul((hi[j] - lo[j] + 1).max(0) as u128));
    match cells {
        Some(c) if c <= budget => {}
        Some(c) => return Err(IntegrationError::ScaleOverflow { cells: c, budget }),
        None => return Err(overflow),
    }
    let bounds: Vec<(Vec<T>, T)> = p.halfspaces().iter().map(|h| (h.normal_scalar(), h.bound.clone() * &kk)).collect();
    let mut out = Vec::new();
    let mut cur = lo.clone();
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return Ok(out);
    }
    loop {
        let x: Vec<T> = cur.iter().map(|&c| T::from_int(c)).collect();
        if bounds.iter().all(|(l, b)| crate::scalar::dot(l, &x).cmp_tol(b) != std::cmp::Ordering::Greater) {
            out.push(cur.clone());
        }
        // odometer increment, last coordinate fastest
        let mut j = n;
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            if cur[j] < hi[j] {
                cur[j] += 1;
                break;
            }
            cur[j] = lo[j];
        }
    }
}

/// `N(B_{k,P})` and `Σ_{I ∈ Z^n ∩ kP̄} φ(I/k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSum<T> {
    pub k: i64,
    pub count: usize,
    pub weighted_sum: T,
}

pub fn pl_lattice_sum<T: Scalar>(
    p: &Polytope<T>,
    phi: &PlFunction<T>,
    k: i64,
) -> Result<LatticeSum<T>, IntegrationError> {
    let pts = lattice_points(p, k)?;
    let kk = T::from_int(k);
    let weighted_sum = pts.iter().fold(T::zero(), |acc, pt| {
        let x: Vec<T> = pt.iter().map(|&c| T::from_int(c) / &kk).collect();
        acc + phi.value(&x)
    });
    Ok(LatticeSum { k, count: pts.len(), weighted_sum })
}

/// `Σ φ(I/k) − k^n ∫_P φ dx − (k^{n−1}/2) ∫_{∂P} φ dσ`, which stays
/// `O(k^{n−2})` as `k` grows.
pub fn ehrhart_residual<T: Scalar>(p: &Polytope<T>, phi: &PlFunction<T>, k: i64) -> Result<T, IntegrationError> {
    let sum = pl_lattice_sum(p, phi, k)?;
    let n = p.dim() as u32;
    let kk = T::from_int(k);
    let kn = num_traits::pow(kk.clone(), n as usize);
    let kn1 = num_traits::pow(kk, n as usize - 1);
    let vol_term = kn * integrate_pl(phi);
    let bd_term = kn1 * boundary_integral_pl(phi) / T::from_int(2);
    Ok(sum.weighted_sum - vol_term - bd_term)
}
