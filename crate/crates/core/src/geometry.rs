//! Rational convex polytopes in half-space form with integer normals.

use std::cmp::Ordering;

use num_integer::Integer;
use thiserror::Error;

use crate::linalg::{integer_det, kernel_vector, rank};
use crate::pl::AffineFunction;
use crate::region::{for_each_subset, Constraint, Region, Simplex};
use crate::scalar::{dot, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("half-space {index}: normal has {found} components, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("half-space {0}: normal is zero")]
    ZeroNormal(usize),
    #[error("half-space {0}: normal is not primitive (components share a common factor)")]
    NonPrimitiveNormal(usize),
    #[error("need at least {needed} half-spaces in dimension {dim}, got {found}")]
    TooFewHalfspaces { dim: usize, needed: usize, found: usize },
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("polytope is not full-dimensional (vertex hull has dimension {0})")]
    Degenerate(isize),
    #[error("polytope is not simple: vertex {vertex} lies on {count} facet hyperplanes")]
    NotSimple { vertex: usize, count: usize },
    #[error("the origin is not an interior point")]
    OriginNotInterior,
}

/// `⟨normal, x⟩ ≤ bound` with a primitive integer normal.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace<T> {
    pub normal: Vec<i64>,
    pub bound: T,
}

impl<T: Scalar> HalfSpace<T> {
    pub fn new(normal: Vec<i64>, bound: T) -> Self {
        Self { normal, bound }
    }

    pub fn normal_scalar(&self) -> Vec<T> {
        self.normal.iter().map(|&v| T::from_int(v)).collect()
    }

    pub fn norm_sq(&self) -> i64 {
        self.normal.iter().map(|v| v * v).sum()
    }

    fn constraint(&self) -> Constraint<T> {
        Constraint::new(self.normal_scalar(), self.bound.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Facet<T> {
    pub halfspace_index: usize,
    pub vertex_indices: Vec<usize>,
    pub simplices: Vec<Simplex<T>>,
    /// `|l_i|₂²`; the facet's `dσ` is Euclidean measure over its square root.
    pub norm_sq: i64,
}

impl<T: Scalar> Facet<T> {
    /// The facet's total `dσ`-measure.
    pub fn measure(&self, normal: &[i64]) -> T {
        self.simplices.iter().fold(T::zero(), |acc, s| acc + s.facet_measure(normal))
    }
}

/// A bounded, full-dimensional, simple polytope `{x : ⟨l_i,x⟩ ≤ λ_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope<T> {
    dim: usize,
    halfspaces: Vec<HalfSpace<T>>,
    dropped: Vec<HalfSpace<T>>,
    facets: Vec<Facet<T>>,
    origin_interior: bool,
    region: Region<T>,
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

fn check_bounded<T: Scalar>(dim: usize, normals: &[Vec<T>]) -> Result<(), GeometryError> {
    if rank(normals) < dim {
        return Err(GeometryError::Unbounded);
    }
    // a pointed recession cone is trivial iff none of its candidate extreme
    // rays (kernels of n−1 independent normals) is feasible
    let mut unbounded = false;
    for_each_subset(normals.len(), dim - 1, |idx| {
        if unbounded {
            return;
        }
        let rows: Vec<Vec<T>> = idx.iter().map(|&i| normals[i].clone()).collect();
        let d = kernel_vector(&rows, dim);
        if d.iter().all(|x| x.is_zero_tol()) {
            return;
        }
        for s in [T::one(), -T::one()] {
            let ray: Vec<T> = d.iter().map(|x| x.clone() * &s).collect();
            if normals.iter().all(|l| dot(l, &ray).sign() != Ordering::Greater) {
                unbounded = true;
            }
        }
    });
    if unbounded {
        Err(GeometryError::Unbounded)
    } else {
        Ok(())
    }
}

/// Validates half-space data and builds the polytope, enumerating vertices
/// over all `n`-subsets of hyperplanes. Half-spaces whose face is not a facet
/// are dropped and kept in [`Polytope::dropped`].
pub fn build_polytope<T: Scalar>(dim: usize, halfspaces: Vec<HalfSpace<T>>) -> Result<Polytope<T>, GeometryError> {
    for (i, h) in halfspaces.iter().enumerate() {
        if h.normal.len() != dim {
            return Err(GeometryError::DimensionMismatch { index: i, expected: dim, found: h.normal.len() });
        }
        match gcd_all(&h.normal) {
            0 => return Err(GeometryError::ZeroNormal(i)),
            1 => {}
            _ => return Err(GeometryError::NonPrimitiveNormal(i)),
        }
    }
    if dim == 0 || halfspaces.len() < dim + 1 {
        return Err(GeometryError::TooFewHalfspaces { dim, needed: dim + 1, found: halfspaces.len() });
    }
    let normals: Vec<Vec<T>> = halfspaces.iter().map(HalfSpace::normal_scalar).collect();
    check_bounded(dim, &normals)?;

    let full = Region::new(dim, halfspaces.iter().map(HalfSpace::constraint).collect());
    let hull_dim = full.affine_dim();
    if hull_dim < dim as isize {
        return Err(GeometryError::Degenerate(hull_dim));
    }
    let mut kept: Vec<HalfSpace<T>> = Vec::new();
    let mut dropped: Vec<HalfSpace<T>> = Vec::new();
    for (i, h) in halfspaces.into_iter().enumerate() {
        let duplicate = kept.contains(&h);
        if duplicate || full.facet_triangulation(i).is_empty() {
            dropped.push(h);
        } else {
            kept.push(h);
        }
    }
    let halfspaces = kept;

    let region = Region::new(dim, halfspaces.iter().map(HalfSpace::constraint).collect());
    for v in 0..region.vertices().len() {
        let count = region.tight_at(v).len();
        if count != dim {
            return Err(GeometryError::NotSimple { vertex: v, count });
        }
    }
    let facets = halfspaces
        .iter()
        .enumerate()
        .map(|(i, h)| Facet {
            halfspace_index: i,
            vertex_indices: region.face_vertices(i),
            simplices: region.facet_triangulation(i),
            norm_sq: h.norm_sq(),
        })
        .collect();
    let origin_interior = halfspaces.iter().all(|h| h.bound.sign() == Ordering::Greater);
    Ok(Polytope { dim, halfspaces, dropped, facets, origin_interior, region })
}

impl<T: Scalar> Polytope<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace<T>] {
        &self.halfspaces
    }

    /// Redundant input half-spaces removed during construction.
    pub fn dropped(&self) -> &[HalfSpace<T>] {
        &self.dropped
    }

    pub fn vertices(&self) -> &[Vec<T>] {
        self.region.vertices()
    }

    pub fn facets(&self) -> &[Facet<T>] {
        &self.facets
    }

    pub fn origin_interior(&self) -> bool {
        self.origin_interior
    }

    pub fn region(&self) -> &Region<T> {
        &self.region
    }

    /// Half-space indices meeting at vertex `v`.
    pub fn vertex_facets(&self, v: usize) -> &[usize] {
        self.region.tight_at(v)
    }

    pub fn volume(&self) -> T {
        self.region.volume()
    }

    /// Total `dσ`-measure of the boundary.
    pub fn boundary_measure(&self) -> T {
        self.facets.iter().fold(T::zero(), |acc, f| acc + f.measure(&self.halfspaces[f.halfspace_index].normal))
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.region.contains(x)
    }

    /// Strictly inside every half-space.
    pub fn is_interior(&self, x: &[T]) -> bool {
        self.region.constraints().iter().all(|c| c.slack(x).sign() == Ordering::Greater)
    }

    /// Rebuilds the polytope over another scalar type.
    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Result<Polytope<U>, GeometryError> {
        let hs = self.halfspaces.iter().map(|h| HalfSpace::new(h.normal.clone(), f(&h.bound))).collect();
        build_polytope(self.dim, hs)
    }
}

/// Result of [`delzant_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelzantReport {
    pub is_delzant: bool,
    /// First vertex (in lexicographic vertex order) whose normals do not
    /// form a lattice basis.
    pub violating_vertex: Option<usize>,
    pub determinant: Option<i128>,
}

pub fn delzant_check<T: Scalar>(p: &Polytope<T>) -> DelzantReport {
    for v in 0..p.vertices().len() {
        let m: Vec<Vec<i64>> = p.vertex_facets(v).iter().map(|&i| p.halfspaces[i].normal.clone()).collect();
        let d = integer_det(&m);
        if d.abs() != 1 {
            return DelzantReport { is_delzant: false, violating_vertex: Some(v), determinant: Some(d) };
        }
    }
    DelzantReport { is_delzant: true, violating_vertex: None, determinant: None }
}

/// Full-dimensional simplices tiling `P`: a fan from the first vertex over
/// triangulations of the facets not containing it.
pub fn triangulate<T: Scalar>(p: &Polytope<T>) -> Vec<Simplex<T>> {
    p.region.triangulate()
}

/// Cones with apex at the origin over each facet simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeDecomposition<T> {
    pub cells: Vec<(usize, Simplex<T>)>,
}

impl<T: Scalar> ConeDecomposition<T> {
    pub fn volume(&self) -> T {
        self.cells.iter().fold(T::zero(), |acc, (_, s)| acc + s.volume())
    }

    /// Volume of the cone over facet `i`.
    pub fn facet_volume(&self, i: usize) -> T {
        self.cells.iter().filter(|(f, _)| *f == i).fold(T::zero(), |acc, (_, s)| acc + s.volume())
    }
}

pub fn cone_decomposition<T: Scalar>(p: &Polytope<T>) -> Result<ConeDecomposition<T>, GeometryError> {
    if !p.origin_interior {
        return Err(GeometryError::OriginNotInterior);
    }
    let origin = vec![T::zero(); p.dim];
    let cells = p
        .facets
        .iter()
        .flat_map(|f| {
            let origin = origin.clone();
            f.simplices.iter().map(move |s| {
                let mut vs = Vec::with_capacity(s.vertices.len() + 1);
                vs.push(origin.clone());
                vs.extend(s.vertices.iter().cloned());
                (f.halfspace_index, Simplex::new(vs))
            })
        })
        .collect();
    Ok(ConeDecomposition { cells })
}

/// Cells of `P` cut by the zero sets of `cuts`, one per realised sign
/// pattern. Lower-dimensional pieces are dropped. The first constraints of
/// every cell are the half-spaces of `P` in order.
pub fn subdivide_by_hyperplanes<T: Scalar>(p: &Polytope<T>, cuts: &[AffineFunction<T>]) -> Vec<Region<T>> {
    let mut cells = vec![p.region.clone()];
    for g in cuts {
        let mut next = Vec::with_capacity(cells.len() * 2);
        for cell in &cells {
            for side in [g.clone(), g.negated()] {
                let piece = cell.intersect([side.le_zero()]);
                if piece.is_full_dimensional() {
                    next.push(piece);
                }
            }
        }
        cells = next;
    }
    cells
}

/// Shifts `P` by `t`: bounds become `λ_i + ⟨l_i, t⟩`.
pub fn translate<T: Scalar>(p: &Polytope<T>, t: &[T]) -> Result<Polytope<T>, GeometryError> {
    let hs = p
        .halfspaces
        .iter()
        .map(|h| HalfSpace::new(h.normal.clone(), h.bound.clone() + dot(&h.normal_scalar(), t)))
        .collect();
    build_polytope(p.dim, hs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Rational};

    fn hs(n: &[i64], b: Rational) -> HalfSpace<Rational> {
        HalfSpace::new(n.to_vec(), b)
    }

    fn pt(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(a, b)| q(a, b)).collect()
    }

    fn cp2() -> Polytope<Rational> {
        build_polytope(2, vec![hs(&[-1, 0], q(1, 1)), hs(&[0, -1], q(1, 1)), hs(&[1, 1], q(1, 1))]).unwrap()
    }

    fn square() -> Polytope<Rational> {
        build_polytope(
            2,
            vec![hs(&[1, 0], q(1, 1)), hs(&[0, 1], q(1, 1)), hs(&[-1, 0], q(1, 1)), hs(&[0, -1], q(1, 1))],
        )
        .unwrap()
    }

    fn pentagon() -> Polytope<Rational> {
        build_polytope(
            2,
            vec![
                hs(&[1, 0], q(1, 1)),
                hs(&[0, 1], q(1, 1)),
                hs(&[-1, 0], q(1, 1)),
                hs(&[0, -1], q(1, 1)),
                hs(&[1, 1], q(1, 1)),
            ],
        )
        .unwrap()
    }

    fn has_vertices(p: &Polytope<Rational>, expected: &[Vec<Rational>]) {
        assert_eq!(p.vertices().len(), expected.len());
        for e in expected {
            assert!(p.vertices().contains(e), "missing vertex {e:?}");
        }
    }

    #[test]
    fn cp2_triangle_vertices() {
        let p = cp2();
        has_vertices(&p, &[pt(&[(-1, 1), (-1, 1)]), pt(&[(2, 1), (-1, 1)]), pt(&[(-1, 1), (2, 1)])]);
        assert!(p.origin_interior());
        assert_eq!(p.facets().len(), 3);
    }

    #[test]
    fn pentagon_vertices() {
        let p = pentagon();
        has_vertices(
            &p,
            &[
                pt(&[(-1, 1), (-1, 1)]),
                pt(&[(1, 1), (-1, 1)]),
                pt(&[(1, 1), (0, 1)]),
                pt(&[(0, 1), (1, 1)]),
                pt(&[(-1, 1), (1, 1)]),
            ],
        );
        // V = E for polygons
        assert_eq!(p.facets().len(), p.vertices().len());
    }

    #[test]
    fn square_vertices() {
        let p = square();
        has_vertices(
            &p,
            &[pt(&[(1, 1), (1, 1)]), pt(&[(1, 1), (-1, 1)]), pt(&[(-1, 1), (1, 1)]), pt(&[(-1, 1), (-1, 1)])],
        );
    }

    #[test]
    fn construction_errors() {
        let unb = build_polytope(2, vec![hs(&[1, 0], q(1, 1)), hs(&[0, 1], q(1, 1)), hs(&[1, 1], q(1, 1))]);
        assert_eq!(unb.unwrap_err(), GeometryError::Unbounded);
        let strip = build_polytope(2, vec![hs(&[1, 0], q(1, 1)), hs(&[-1, 0], q(1, 1)), hs(&[1, 0], q(2, 1))]);
        assert_eq!(strip.unwrap_err(), GeometryError::Unbounded);
        let nonprim = build_polytope(2, vec![hs(&[2, 0], q(1, 1)), hs(&[0, -1], q(1, 1)), hs(&[-1, 1], q(1, 1))]);
        assert_eq!(nonprim.unwrap_err(), GeometryError::NonPrimitiveNormal(0));
        let zero = build_polytope(2, vec![hs(&[0, 0], q(1, 1)), hs(&[0, -1], q(1, 1)), hs(&[-1, 1], q(1, 1))]);
        assert_eq!(zero.unwrap_err(), GeometryError::ZeroNormal(0));
        let few = build_polytope(2, vec![hs(&[1, 0], q(1, 1)), hs(&[0, 1], q(1, 1))]);
        assert!(matches!(few.unwrap_err(), GeometryError::TooFewHalfspaces { .. }));
        let empty = build_polytope(
            2,
            vec![hs(&[1, 0], q(-1, 1)), hs(&[-1, 0], q(-1, 1)), hs(&[0, 1], q(1, 1)), hs(&[0, -1], q(1, 1))],
        );
        assert!(matches!(empty.unwrap_err(), GeometryError::Degenerate(_)));
        let flat = build_polytope(
            2,
            vec![hs(&[1, 0], q(0, 1)), hs(&[-1, 0], q(0, 1)), hs(&[0, 1], q(1, 1)), hs(&[0, -1], q(1, 1))],
        );
        assert_eq!(flat.unwrap_err(), GeometryError::Degenerate(1));
        let mismatch = build_polytope(2, vec![hs(&[1], q(1, 1)), hs(&[0, 1], q(1, 1)), hs(&[-1, -1], q(1, 1))]);
        assert!(matches!(mismatch.unwrap_err(), GeometryError::DimensionMismatch { index: 0, .. }));
    }

    #[test]
    fn non_simple_rejected() {
        // square pyramid apex: four facets through (0,0,1)
        let p = build_polytope(
            3,
            vec![
                hs(&[0, 0, -1], q(0, 1)),
                hs(&[1, 0, 1], q(1, 1)),
                hs(&[-1, 0, 1], q(1, 1)),
                hs(&[0, 1, 1], q(1, 1)),
                hs(&[0, -1, 1], q(1, 1)),
            ],
        );
        assert!(matches!(p.unwrap_err(), GeometryError::NotSimple { count: 4, .. }));
    }

    #[test]
    fn redundant_halfspaces_dropped() {
        let p = build_polytope(
            2,
            vec![
                hs(&[1, 0], q(1, 1)),
                hs(&[0, 1], q(1, 1)),
                hs(&[-1, 0], q(1, 1)),
                hs(&[0, -1], q(1, 1)),
                hs(&[1, 1], q(5, 1)),
                hs(&[1, 1], q(2, 1)), // touches only the corner (1,1)
            ],
        )
        .unwrap();
        assert_eq!(p.halfspaces().len(), 4);
        assert_eq!(p.dropped().len(), 2);
        assert_eq!(p.volume(), q(4, 1));
    }

    #[test]
    fn delzant_examples() {
        assert!(pentagon_is_delzant());
        assert!(delzant_check(&square()).is_delzant);
        let p = build_polytope(2, vec![hs(&[-1, 0], q(1, 1)), hs(&[0, -1], q(1, 1)), hs(&[1, 2], q(2, 1))]).unwrap();
        let r = delzant_check(&p);
        assert!(!r.is_delzant);
        assert_eq!(p.vertices()[r.violating_vertex.unwrap()], pt(&[(-1, 1), (3, 2)]));
        assert_eq!(r.determinant.map(i128::abs), Some(2));
    }

    fn pentagon_is_delzant() -> bool {
        delzant_check(&pentagon()).is_delzant
    }

    #[test]
    fn triangulation_volumes() {
        let sq = triangulate(&square());
        assert_eq!(sq.len(), 2);
        assert!(sq.iter().all(|s| s.volume() == q(2, 1)));
        let t = triangulate(&cp2());
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].volume(), q(9, 2));
        let pent = triangulate(&pentagon());
        assert_eq!(pent.len(), 3);
        assert_eq!(pent.iter().map(Simplex::volume).sum::<Rational>(), q(7, 2));
    }

    #[test]
    fn cone_decompositions() {
        let sq = cone_decomposition(&square()).unwrap();
        assert_eq!(sq.cells.len(), 4);
        assert!(sq.cells.iter().all(|(_, s)| s.volume() == q(1, 1)));
        let tri = cone_decomposition(&cp2()).unwrap();
        assert_eq!(tri.cells.len(), 3);
        assert!(tri.cells.iter().all(|(_, s)| s.volume() == q(3, 2)));
        let pent = pentagon();
        let c = cone_decomposition(&pent).unwrap();
        assert_eq!(c.cells.len(), 5);
        assert_eq!(c.volume(), q(7, 2));
        // λ_i · dσ(E_i) = n · Vol(cone over E_i)
        for f in pent.facets() {
            let h = &pent.halfspaces()[f.halfspace_index];
            assert_eq!(h.bound.clone() * f.measure(&h.normal), q(2, 1) * c.facet_volume(f.halfspace_index));
        }
        let shifted = translate(&square(), &[q(1, 1), q(0, 1)]).unwrap();
        assert_eq!(cone_decomposition(&shifted).unwrap_err(), GeometryError::OriginNotInterior);
    }

    #[test]
    fn facet_measures() {
        assert_eq!(cp2().boundary_measure(), q(9, 1));
        assert_eq!(square().boundary_measure(), q(8, 1));
        assert_eq!(pentagon().boundary_measure(), q(7, 1));
    }

    #[test]
    fn subdivisions() {
        let x1 = AffineFunction::new(vec![q(1, 1), q(0, 1)], q(0, 1));
        let x2 = AffineFunction::new(vec![q(0, 1), q(1, 1)], q(0, 1));
        let sq = subdivide_by_hyperplanes(&square(), std::slice::from_ref(&x1));
        assert_eq!(sq.len(), 2);
        assert!(sq.iter().all(|c| c.volume() == q(2, 1)));
        let mut tri: Vec<Rational> =
            subdivide_by_hyperplanes(&cp2(), std::slice::from_ref(&x1)).iter().map(Region::volume).collect();
        tri.sort();
        assert_eq!(tri, vec![q(2, 1), q(5, 2)]);
        let pent = subdivide_by_hyperplanes(&pentagon(), &[x1, x2]);
        assert_eq!(pent.len(), 4);
        assert_eq!(pent.iter().map(Region::volume).sum::<Rational>(), q(7, 2));
    }

    #[test]
    fn translations() {
        let sq = square();
        assert_eq!(translate(&sq, &[q(0, 1), q(0, 1)]).unwrap(), sq);
        let t = translate(&cp2(), &[q(1, 1), q(1, 1)]).unwrap();
        has_vertices(&t, &[pt(&[(0, 1), (0, 1)]), pt(&[(3, 1), (0, 1)]), pt(&[(0, 1), (3, 1)])]);
        let centered = translate(&pentagon(), &[q(2, 21), q(2, 21)]).unwrap();
        let x1 = crate::polynomial::Polynomial::variable(2, 0);
        assert_eq!(crate::integration::integrate_polynomial(&centered, &x1), q(0, 1));
    }
}
