//! General bounded convex regions in half-space form.
//!
//! [`Region`] is the workhorse behind polytopes, PL cells and cone pieces:
//! it accepts arbitrary scalar normals, tolerates non-simple vertices and
//! lower-dimensional (even empty) results, and triangulates by recursive
//! pulling from the lowest-indexed vertex of each face.

use std::cmp::Ordering;

use crate::linalg::{affine_dim, det, kernel_vector, solve};
use crate::scalar::{dot, factorial, Scalar};

/// The constraint `⟨normal, x⟩ ≤ bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<T> {
    pub normal: Vec<T>,
    pub bound: T,
}

impl<T: Scalar> Constraint<T> {
    pub fn new(normal: Vec<T>, bound: T) -> Self {
        Self { normal, bound }
    }

    /// `bound − ⟨normal, x⟩`; non-negative exactly on the feasible side.
    pub fn slack(&self, x: &[T]) -> T {
        self.bound.clone() - dot(&self.normal, x)
    }
}

/// A simplex given by its vertices; `k + 1` points span a `k`-simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct Simplex<T> {
    pub vertices: Vec<Vec<T>>,
}

impl<T: Scalar> Simplex<T> {
    pub fn new(vertices: Vec<Vec<T>>) -> Self {
        Self { vertices }
    }

    /// Intrinsic dimension `k` (one less than the vertex count).
    pub fn order(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    fn edge_matrix(&self, skip_coord: Option<usize>) -> Vec<Vec<T>> {
        let v0 = &self.vertices[0];
        self.vertices[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(v0)
                    .enumerate()
                    .filter(|&(j, _)| Some(j) != skip_coord)
                    .map(|(_, (a, b))| a.clone() - b)
                    .collect()
            })
            .collect()
    }

    /// Signed `det` of the edge vectors of a full-dimensional simplex.
    pub fn signed_det(&self) -> T {
        det(&self.edge_matrix(None))
    }

    /// Lebesgue volume of a full-dimensional simplex.
    pub fn volume(&self) -> T {
        self.signed_det().abs() / factorial::<T>(self.order() as u32)
    }

    /// Lattice-normalised measure of a codimension-one simplex lying on a
    /// hyperplane with primitive integer normal `normal`.
    ///
    /// Projecting out a coordinate `j` with `normal[j] ≠ 0` scales Euclidean
    /// measure by `|normal[j]| / |normal|`, so the `dσ = dσ₀ / |normal|`
    /// measure equals the projected volume divided by `|normal[j]|`.
    pub fn facet_measure(&self, normal: &[i64]) -> T {
        let j = normal.iter().position(|&v| v != 0).expect("nonzero normal");
        let d = det(&self.edge_matrix(Some(j))).abs();
        d / factorial::<T>(self.order() as u32) / T::from_int(normal[j].abs())
    }

    /// Half-space description of a full-dimensional simplex.
    pub fn to_region(&self) -> Region<T> {
        let n = self.ambient_dim();
        let mut constraints = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let others: Vec<&Vec<T>> =
                self.vertices.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, v)| v).collect();
            let base = others[0];
            let rows: Vec<Vec<T>> =
                others[1..].iter().map(|v| v.iter().zip(base).map(|(a, b)| a.clone() - b).collect()).collect();
            let mut normal = kernel_vector(&rows, n);
            let mut bound = dot(&normal, base);
            if dot(&normal, &self.vertices[i]).cmp_tol(&bound) == Ordering::Greater {
                normal.iter_mut().for_each(|x| *x = -x.clone());
                bound = -bound;
            }
            constraints.push(Constraint::new(normal, bound));
        }
        Region::new(n, constraints)
    }
}

/// Calls `f` on every `k`-subset of `0..m` in lexicographic order.
pub(crate) fn for_each_subset(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        let need = k - cur.len();
        for i in start..=(m.saturating_sub(need)) {
            if i >= m {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, f);
            cur.pop();
        }
    }
    if k > m {
        return;
    }
    rec(0, m, k, &mut Vec::with_capacity(k), &mut f);
}

pub(crate) fn cmp_points<T: Scalar>(a: &[T], b: &[T]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.cmp_tol(y)).find(|o| *o != Ordering::Equal).unwrap_or(Ordering::Equal)
}

/// All vertices of `{x : ⟨a_i,x⟩ ≤ b_i}` (assumed bounded), sorted
/// lexicographically, each paired with the sorted list of tight constraints.
pub(crate) fn enumerate_vertices<T: Scalar>(
    dim: usize,
    constraints: &[Constraint<T>],
) -> (Vec<Vec<T>>, Vec<Vec<usize>>) {
    let mut found: Vec<Vec<T>> = Vec::new();
    for_each_subset(constraints.len(), dim, |idx| {
        let a: Vec<Vec<T>> = idx.iter().map(|&i| constraints[i].normal.clone()).collect();
        let b: Vec<T> = idx.iter().map(|&i| constraints[i].bound.clone()).collect();
        let Some(x) = solve(&a, &b) else { return };
        if constraints.iter().any(|c| c.slack(&x).sign() == Ordering::Less) {
            return;
        }
        if !found.iter().any(|v| cmp_points(v, &x) == Ordering::Equal) {
            found.push(x);
        }
    });
    found.sort_by(|a, b| cmp_points(a, b));
    let tight = found
        .iter()
        .map(|v| (0..constraints.len()).filter(|&i| constraints[i].slack(v).is_zero_tol()).collect())
        .collect();
    (found, tight)
}

/// A bounded convex region `{x : ⟨a_i,x⟩ ≤ b_i}` with its vertex set.
#[derive(Clone, Debug, PartialEq)]
pub struct Region<T> {
    dim: usize,
    constraints: Vec<Constraint<T>>,
    vertices: Vec<Vec<T>>,
    tight: Vec<Vec<usize>>,
}

impl<T: Scalar> Region<T> {
    /// Builds the region and enumerates its vertices. Constraints must bound
    /// the region; the result may be empty or lower-dimensional.
    pub fn new(dim: usize, constraints: Vec<Constraint<T>>) -> Self {
        let (vertices, tight) = enumerate_vertices(dim, &constraints);
        Self { dim, constraints, vertices, tight }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[Constraint<T>] {
        &self.constraints
    }

    pub fn vertices(&self) -> &[Vec<T>] {
        &self.vertices
    }

    /// Indices of the constraints tight at vertex `v`.
    pub fn tight_at(&self, v: usize) -> &[usize] {
        &self.tight[v]
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn affine_dim(&self) -> isize {
        let refs: Vec<&[T]> = self.vertices.iter().map(|v| v.as_slice()).collect();
        affine_dim(&refs)
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim() == self.dim as isize
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.constraints.iter().all(|c| c.slack(x).sign() != Ordering::Less)
    }

    /// The region cut by additional constraints.
    pub fn intersect(&self, extra: impl IntoIterator<Item = Constraint<T>>) -> Region<T> {
        let mut constraints = self.constraints.clone();
        constraints.extend(extra);
        Region::new(self.dim, constraints)
    }

    /// Vertices tight on constraint `c`.
    pub fn face_vertices(&self, c: usize) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.tight[v].binary_search(&c).is_ok()).collect()
    }

    fn face_affine_dim(&self, face: &[usize]) -> isize {
        let refs: Vec<&[T]> = face.iter().map(|&v| self.vertices[v].as_slice()).collect();
        affine_dim(&refs)
    }

    /// Pulling triangulation of the `k`-dimensional face spanned by `face`.
    fn pull(&self, face: &[usize], k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            let mut s = prefix.clone();
            s.push(face[0]);
            out.push(s);
            return;
        }
        let apex = face[0];
        let mut seen: Vec<Vec<usize>> = Vec::new();
        for c in 0..self.constraints.len() {
            let sub: Vec<usize> = face.iter().copied().filter(|&v| self.tight[v].binary_search(&c).is_ok()).collect();
            if sub.len() < k || sub.len() == face.len() || sub.contains(&apex) || seen.contains(&sub) {
                continue;
            }
            if self.face_affine_dim(&sub) != k as isize - 1 {
                continue;
            }
            prefix.push(apex);
            self.pull(&sub, k - 1, prefix, out);
            prefix.pop();
            seen.push(sub);
        }
    }

    fn simplices_of(&self, face: &[usize], k: usize) -> Vec<Simplex<T>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        if face.len() < k + 1 {
            return Vec::new();
        }
        self.pull(face, k, &mut Vec::new(), &mut out);
        out.into_iter().map(|idx| Simplex::new(idx.into_iter().map(|v| self.vertices[v].clone()).collect())).collect()
    }

    /// Full-dimensional simplices tiling the region; empty when the region
    /// is lower-dimensional.
    pub fn triangulate(&self) -> Vec<Simplex<T>> {
        if !self.is_full_dimensional() {
            return Vec::new();
        }
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        self.simplices_of(&all, self.dim)
    }

    /// `(dim − 1)`-simplices tiling the face on constraint `c`, or nothing
    /// when that face is not a facet.
    pub fn facet_triangulation(&self, c: usize) -> Vec<Simplex<T>> {
        let face = self.face_vertices(c);
        if self.dim == 0 || self.face_affine_dim(&face) != self.dim as isize - 1 {
            return Vec::new();
        }
        self.simplices_of(&face, self.dim - 1)
    }

    pub fn volume(&self) -> T {
        self.triangulate().iter().fold(T::zero(), |acc, s| acc + s.volume())
    }

    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Region<U> {
        let constraints =
            self.constraints.iter().map(|c| Constraint::new(c.normal.iter().map(&f).collect(), f(&c.bound))).collect();
        Region::new(self.dim, constraints)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Rational};

    fn square() -> Region<Rational> {
        let c = |a: i64, b: i64| Constraint::new(vec![q(a, 1), q(b, 1)], q(1, 1));
        Region::new(2, vec![c(1, 0), c(-1, 0), c(0, 1), c(0, -1)])
    }

    #[test]
    fn subsets_enumerated_lexicographically() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen[5], vec![2, 3]);
        let mut zero = 0;
        for_each_subset(3, 0, |_| zero += 1);
        assert_eq!(zero, 1);
    }

    #[test]
    fn square_region_vertices_and_volume() {
        let r = square();
        assert_eq!(r.vertices().len(), 4);
        assert_eq!(r.volume(), q(4, 1));
        assert_eq!(r.triangulate().len(), 2);
        assert_eq!(r.facet_triangulation(0).len(), 1);
    }

    #[test]
    fn non_simple_cut_through_vertex() {
        // cut along the diagonal x1 ≤ x2 through two vertices
        let r = square().intersect([Constraint::new(vec![q(1, 1), q(-1, 1)], q(0, 1))]);
        assert_eq!(r.vertices().len(), 3);
        assert_eq!(r.volume(), q(2, 1));
        assert!(r.is_full_dimensional());
    }

    #[test]
    fn empty_and_flat_regions() {
        let r = square().intersect([Constraint::new(vec![q(1, 1), q(0, 1)], q(-2, 1))]);
        assert!(r.is_empty());
        assert!(r.triangulate().is_empty());
        let flat = square().intersect([Constraint::new(vec![q(1, 1), q(0, 1)], q(-1, 1))]);
        assert_eq!(flat.affine_dim(), 1);
        assert_eq!(flat.volume(), q(0, 1));
    }

    #[test]
    fn simplex_round_trip_to_region() {
        let s = Simplex::new(vec![vec![q(0, 1), q(0, 1)], vec![q(3, 1), q(0, 1)], vec![q(0, 1), q(2, 1)]]);
        let r = s.to_region();
        assert_eq!(r.vertices().len(), 3);
        assert_eq!(r.volume(), q(3, 1));
        assert!(r.contains(&[q(1, 1), q(1, 2)]));
        assert!(!r.contains(&[q(2, 1), q(2, 1)]));
    }

    #[test]
    fn three_dimensional_cube() {
        let mut cs = Vec::new();
        for j in 0..3 {
            for s in [1, -1] {
                let mut n = vec![q(0, 1); 3];
                n[j] = q(s, 1);
                cs.push(Constraint::new(n, q(1, 1)));
            }
        }
        let r = Region::new(3, cs);
        assert_eq!(r.vertices().len(), 8);
        assert_eq!(r.volume(), q(8, 1));
        let facet = r.facet_triangulation(0);
        let area: Rational = facet.iter().map(|s| s.facet_measure(&[1, 0, 0])).sum();
        assert_eq!(area, q(4, 1));
    }

    #[test]
    fn float_region_matches_exact() {
        let r = square().map_scalar(Scalar::to_f64);
        assert!((r.volume() - 4.0).abs() < 1e-12);
    }
}
