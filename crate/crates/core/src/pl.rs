//! Affine and convex piecewise-linear functions on a polytope.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::geometry::Polytope;
use crate::polynomial::Polynomial;
use crate::region::{Constraint, Region};
use crate::scalar::{dot, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlError {
    #[error("a PL function needs at least one affine piece")]
    EmptyPieceList,
    #[error("piece {index} has {found} gradient components, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("point lies outside the domain")]
    OutsideDomain,
    #[error("normalization point is not interior to the domain")]
    PointNotInterior,
}

/// `x ↦ ⟨gradient, x⟩ + constant`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFunction<T> {
    pub gradient: Vec<T>,
    pub constant: T,
}

impl<T: Scalar> AffineFunction<T> {
    pub fn new(gradient: Vec<T>, constant: T) -> Self {
        Self { gradient, constant }
    }

    pub fn constant(dim: usize, c: T) -> Self {
        Self::new(vec![T::zero(); dim], c)
    }

    /// The coordinate function `x_{j+1}`.
    pub fn coordinate(dim: usize, j: usize) -> Self {
        let mut g = vec![T::zero(); dim];
        g[j] = T::one();
        Self::new(g, T::zero())
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn evaluate(&self, x: &[T]) -> T {
        dot(&self.gradient, x) + &self.constant
    }

    pub fn negated(&self) -> Self {
        Self::new(self.gradient.iter().map(|g| -g.clone()).collect(), -self.constant.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.gradient.iter().zip(&other.gradient).map(|(a, b)| a.clone() - b).collect(),
            self.constant.clone() - &other.constant,
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.gradient.iter().zip(&other.gradient).map(|(a, b)| a.clone() + b).collect(),
            self.constant.clone() + &other.constant,
        )
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.gradient.iter().map(|g| g.clone() * s).collect(), self.constant.clone() * s)
    }

    /// The half-space `{x : f(x) ≤ 0}`.
    pub fn le_zero(&self) -> Constraint<T> {
        Constraint::new(self.gradient.clone(), -self.constant.clone())
    }

    pub fn to_polynomial(&self) -> Polynomial<T> {
        Polynomial::affine(&self.gradient, &self.constant)
    }

    pub fn is_constant(&self) -> bool {
        self.gradient.iter().all(|g| g.is_zero_tol())
    }
}

impl<T: Scalar> fmt::Display for AffineFunction<T> {
    /// Renders in the PL expression grammar, e.g. `1/2 + 3*x1 - x2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        if !self.constant.is_zero() {
            write!(f, "{}", self.constant)?;
            wrote = true;
        }
        for (j, g) in self.gradient.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let (neg, mag) = if g.is_negative() { (true, -g.clone()) } else { (false, g.clone()) };
            match (wrote, neg) {
                (false, true) => f.write_str("-")?,
                (true, true) => f.write_str(" - ")?,
                (true, false) => f.write_str(" + ")?,
                (false, false) => {}
            }
            if mag.is_one() {
                write!(f, "x{}", j + 1)?;
            } else {
                write!(f, "{}*x{}", mag, j + 1)?;
            }
            wrote = true;
        }
        if !wrote {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// The region of the domain where one piece attains the maximum.
#[derive(Clone, Debug, PartialEq)]
pub struct PlCell<T> {
    pub piece: usize,
    pub region: Region<T>,
}

/// `u = max{u¹, …, u^r}` restricted to a polytope, with the maximizer cells
/// of every piece that is active on a full-dimensional set.
#[derive(Clone, Debug, PartialEq)]
pub struct PlFunction<T> {
    pieces: Vec<AffineFunction<T>>,
    domain: Polytope<T>,
    cells: Vec<PlCell<T>>,
}

/// Builds `max(pieces)` on `domain`. Duplicate pieces and pieces that never
/// attain the maximum on a full-dimensional set are dropped.
pub fn make_pl<T: Scalar>(pieces: Vec<AffineFunction<T>>, domain: &Polytope<T>) -> Result<PlFunction<T>, PlError> {
    if pieces.is_empty() {
        return Err(PlError::EmptyPieceList);
    }
    let n = domain.dim();
    if let Some((index, p)) = pieces.iter().enumerate().find(|(_, p)| p.dim() != n) {
        return Err(PlError::DimensionMismatch { index, expected: n, found: p.dim() });
    }
    let mut unique: Vec<AffineFunction<T>> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if !unique.contains(&p) {
            unique.push(p);
        }
    }
    let mut kept = Vec::new();
    let mut cells = Vec::new();
    for (l, piece) in unique.iter().enumerate() {
        let region = if unique.len() == 1 {
            domain.region().clone()
        } else {
            let cuts = unique.iter().enumerate().filter(|&(m, _)| m != l).map(|(_, other)| other.sub(piece).le_zero());
            domain.region().intersect(cuts)
        };
        if region.is_full_dimensional() {
            cells.push(PlCell { piece: kept.len(), region });
            kept.push(piece.clone());
        }
    }
    Ok(PlFunction { pieces: kept, domain: domain.clone(), cells })
}

impl<T: Scalar> PlFunction<T> {
    pub fn pieces(&self) -> &[AffineFunction<T>] {
        &self.pieces
    }

    pub fn cells(&self) -> &[PlCell<T>] {
        &self.cells
    }

    pub fn domain(&self) -> &Polytope<T> {
        &self.domain
    }

    /// `max` over pieces, without a domain check.
    pub fn value(&self, x: &[T]) -> T {
        let mut it = self.pieces.iter().map(|p| p.evaluate(x));
        let first = it.next().expect("non-empty");
        it.fold(first, |m, v| if v > m { v } else { m })
    }

    pub fn evaluate(&self, x: &[T]) -> Result<T, PlError> {
        if x.len() != self.domain.dim() || !self.domain.contains(x) {
            return Err(PlError::OutsideDomain);
        }
        Ok(self.value(x))
    }

    /// Subtracts the supporting affine function at interior `p`, giving
    /// `ũ ≥ 0` with `ũ(p) = 0`. When several pieces tie at `p`, the
    /// subgradient is the mean of their gradients.
    pub fn normalize_at(&self, p: &[T]) -> Result<PlFunction<T>, PlError> {
        if p.len() != self.domain.dim() || !self.domain.is_interior(p) {
            return Err(PlError::PointNotInterior);
        }
        let top = self.value(p);
        let active: Vec<&AffineFunction<T>> =
            self.pieces.iter().filter(|f| f.evaluate(p).cmp_tol(&top) == Ordering::Equal).collect();
        let count = T::from_int(active.len() as i64);
        let n = self.domain.dim();
        let slope: Vec<T> =
            (0..n).map(|j| active.iter().fold(T::zero(), |acc, f| acc + &f.gradient[j]) / &count).collect();
        // support(x) = ⟨s, x − p⟩ + u(p)
        let support = AffineFunction::new(slope.clone(), top - dot(&slope, p));
        let pieces = self.pieces.iter().map(|f| f.sub(&support)).collect();
        let cells = self.cells.clone();
        Ok(PlFunction { pieces, domain: self.domain.clone(), cells })
    }

    /// A single piece is active on the whole domain.
    pub fn is_affine(&self) -> bool {
        self.cells.len() == 1
    }

    /// All data are rational by construction; retained for completeness.
    pub fn is_rational(&self) -> bool {
        true
    }

    /// Multiplies every piece by `s > 0`.
    pub fn scaled(&self, s: &T) -> PlFunction<T> {
        PlFunction {
            pieces: self.pieces.iter().map(|f| f.scale(s)).collect(),
            domain: self.domain.clone(),
            cells: self.cells.clone(),
        }
    }
}

/// `max{0, g}`; the zero set of `g` is the crease.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplePl<T> {
    pub crease: AffineFunction<T>,
}

impl<T: Scalar> SimplePl<T> {
    pub fn new(crease: AffineFunction<T>) -> Self {
        Self { crease }
    }

    pub fn to_pl(&self, domain: &Polytope<T>) -> Result<PlFunction<T>, PlError> {
        make_pl(vec![AffineFunction::constant(self.crease.dim(), T::zero()), self.crease.clone()], domain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog, square};
    use crate::scalar::{q, Rational};

    fn aff(g: &[(i64, i64)], c: (i64, i64)) -> AffineFunction<Rational> {
        AffineFunction::new(g.iter().map(|&(a, b)| q(a, b)).collect(), q(c.0, c.1))
    }

    #[test]
    fn affine_display() {
        let f = |g: [i64; 2], c: i64| AffineFunction::new(vec![q(g[0], 1), q(g[1], 1)], q(c, 2)).to_string();
        assert_eq!(f([1, -1], 0), "x1 - x2");
        assert_eq!(f([-3, 0], 1), "1/2 - 3*x1");
        assert_eq!(f([0, 2], -3), "-3/2 + 2*x2");
        assert_eq!(f([0, 0], 0), "0");
        assert_eq!(f([-1, 0], 0), "-x1");
    }

    #[test]
    fn make_pl_cells() {
        let sq = square();
        let u = make_pl(vec![aff(&[(1, 1), (0, 1)], (0, 1)), aff(&[(0, 1), (0, 1)], (0, 1))], &sq).unwrap();
        assert_eq!(u.cells().len(), 2);
        let three = make_pl(
            vec![aff(&[(1, 1), (1, 1)], (-1, 1)), aff(&[(0, 1), (0, 1)], (0, 1)), aff(&[(-1, 1), (-1, 1)], (-1, 1))],
            &sq,
        )
        .unwrap();
        assert_eq!(three.cells().len(), 3);
        let zero_piece = three.pieces().iter().position(|p| p.is_constant()).unwrap();
        let band = three.cells().iter().find(|c| c.piece == zero_piece).unwrap();
        assert!(band.region.contains(&[q(0, 1), q(0, 1)]));
        let dup = make_pl(vec![aff(&[(1, 1), (0, 1)], (0, 1)), aff(&[(1, 1), (0, 1)], (0, 1))], &sq).unwrap();
        assert_eq!(dup.pieces().len(), 1);
        assert_eq!(dup.cells().len(), 1);
        assert_eq!(make_pl(vec![], &sq).unwrap_err(), PlError::EmptyPieceList);
    }

    #[test]
    fn evaluation() {
        let sq = square();
        let u = SimplePl::new(aff(&[(1, 1), (0, 1)], (0, 1))).to_pl(&sq).unwrap();
        assert_eq!(u.evaluate(&[q(1, 2), q(-1, 1)]).unwrap(), q(1, 2));
        assert_eq!(u.evaluate(&[q(-1, 1), q(0, 1)]).unwrap(), q(0, 1));
        assert_eq!(u.evaluate(&[q(2, 1), q(0, 1)]).unwrap_err(), PlError::OutsideDomain);
        let pent = catalog("cp2_2blowup").unwrap();
        let w = SimplePl::new(aff(&[(1, 1), (1, 1)], (-1, 1))).to_pl(&pent).unwrap();
        assert_eq!(w.evaluate(&[q(1, 1), q(0, 1)]).unwrap(), q(0, 1));
    }

    #[test]
    fn normalization() {
        let sq = square();
        let affine = make_pl(vec![aff(&[(1, 1), (0, 1)], (3, 1))], &sq).unwrap();
        let z = affine.normalize_at(&[q(0, 1), q(0, 1)]).unwrap();
        assert_eq!(z.pieces(), &[aff(&[(0, 1), (0, 1)], (0, 1))]);

        let u = SimplePl::new(aff(&[(1, 1), (0, 1)], (0, 1))).to_pl(&sq).unwrap();
        let same = u.normalize_at(&[q(-1, 2), q(0, 1)]).unwrap();
        assert_eq!(same.pieces(), u.pieces());

        let tied = u.normalize_at(&[q(0, 1), q(0, 1)]).unwrap();
        let mut got = tied.pieces().to_vec();
        got.sort_by(|a, b| a.gradient[0].cmp(&b.gradient[0]));
        assert_eq!(got, vec![aff(&[(-1, 2), (0, 1)], (0, 1)), aff(&[(1, 2), (0, 1)], (0, 1))]);

        assert_eq!(u.normalize_at(&[q(1, 1), q(0, 1)]).unwrap_err(), PlError::PointNotInterior);
    }

    #[test]
    fn affineness() {
        let sq = square();
        let a = make_pl(vec![aff(&[(1, 1), (0, 1)], (0, 1)), aff(&[(1, 1), (0, 1)], (-1, 1))], &sq).unwrap();
        assert!(a.is_affine());
        let b = SimplePl::new(aff(&[(1, 1), (0, 1)], (0, 1))).to_pl(&sq).unwrap();
        assert!(!b.is_affine());
        let c = SimplePl::new(aff(&[(1, 1), (0, 1)], (-2, 1))).to_pl(&sq).unwrap();
        assert!(c.is_affine());
        assert!(a.is_rational() && b.is_rational() && c.is_rational());
        let three = make_pl(
            vec![aff(&[(1, 1), (1, 1)], (-1, 1)), aff(&[(0, 1), (0, 1)], (0, 1)), aff(&[(-1, 1), (-1, 1)], (-1, 1))],
            &sq,
        )
        .unwrap();
        assert!(three.is_rational());
    }
}
