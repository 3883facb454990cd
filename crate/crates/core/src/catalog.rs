//! Built-in polytopes: the five anticanonical toric Fano surfaces and the
//! two-parameter hexagon family on the three-point blow-up.

use thiserror::Error;

use crate::geometry::{build_polytope, GeometryError, HalfSpace, Polytope};
use crate::scalar::{fmt_rational, parse_rational, q, Rational, Scalar};

pub const CATALOG_NAMES: &[&str] = &["cp2", "cp1xcp1", "cp2_1blowup", "cp2_2blowup", "cp2_3blowup", "hexagon(λ,μ)"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error(
        "unknown catalog polytope `{0}` (known: cp2, cp1xcp1, cp2_1blowup, cp2_2blowup, cp2_3blowup, hexagon(l,m))"
    )]
    UnknownName(String),
    #[error("hexagon parameters ({lambda}, {mu}) must be positive with lambda/2 < mu < 2*lambda")]
    InvalidHexagonParams { lambda: String, mu: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Hexagon normals in the order `l_1 … l_6`.
pub const HEXAGON_NORMALS: [[i64; 2]; 6] = [[1, 0], [0, -1], [-1, -1], [-1, 0], [0, 1], [1, 1]];

fn unit_bounds(normals: &[[i64; 2]]) -> Polytope<Rational> {
    let hs = normals.iter().map(|n| HalfSpace::new(n.to_vec(), q(1, 1))).collect();
    build_polytope(2, hs).expect("catalog polytope is valid")
}

pub fn cp2() -> Polytope<Rational> {
    unit_bounds(&[[-1, 0], [0, -1], [1, 1]])
}

/// `CP¹ × CP¹`, the square `[-1, 1]²`.
pub fn square() -> Polytope<Rational> {
    unit_bounds(&[[1, 0], [0, 1], [-1, 0], [0, -1]])
}

pub fn cp2_1blowup() -> Polytope<Rational> {
    unit_bounds(&[[-1, -1], [-1, 0], [0, -1], [1, 1]])
}

pub fn cp2_2blowup() -> Polytope<Rational> {
    unit_bounds(&[[1, 0], [0, 1], [-1, 0], [0, -1], [1, 1]])
}

pub fn cp2_3blowup() -> Polytope<Rational> {
    unit_bounds(&HEXAGON_NORMALS)
}

/// The hexagon with bounds `λ, μ, λ, μ, λ, μ`, without the parameter check
/// of [`hexagon`]. On the boundary `μ = 2λ` (or `λ = 2μ`) three sides
/// collapse and the result is a triangle.
pub fn hexagon_unchecked(lambda: &Rational, mu: &Rational) -> Result<Polytope<Rational>, GeometryError> {
    let hs = HEXAGON_NORMALS
        .iter()
        .enumerate()
        .map(|(i, n)| HalfSpace::new(n.to_vec(), if i % 2 == 0 { lambda.clone() } else { mu.clone() }))
        .collect();
    build_polytope(2, hs)
}

/// The hexagon family, requiring `λ/2 < μ < 2λ`.
pub fn hexagon(lambda: &Rational, mu: &Rational) -> Result<Polytope<Rational>, CatalogError> {
    let two = q(2, 1);
    let zero = q(0, 1);
    let ok = *lambda > zero && *mu > zero && lambda.clone() < mu.clone() * &two && mu.clone() < lambda.clone() * &two;
    if !ok {
        return Err(CatalogError::InvalidHexagonParams { lambda: fmt_rational(lambda), mu: fmt_rational(mu) });
    }
    Ok(hexagon_unchecked(lambda, mu)?)
}

fn parse_hexagon_args(name: &str) -> Option<Result<(Rational, Rational), CatalogError>> {
    let inner = name.strip_prefix("hexagon(")?.strip_suffix(')')?;
    let parsed = inner.split_once(',').and_then(|(a, b)| Some((parse_rational(a)?, parse_rational(b)?)));
    Some(parsed.ok_or_else(|| CatalogError::UnknownName(name.to_string())))
}

/// Looks up a catalog polytope by name; `hexagon(λ,μ)` takes rational
/// parameters such as `hexagon(2,3)` or `hexagon(1/2, 2/3)`.
pub fn catalog(name: &str) -> Result<Polytope<Rational>, CatalogError> {
    let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    match compact.as_str() {
        "cp2" => Ok(cp2()),
        "cp1xcp1" => Ok(square()),
        "cp2_1blowup" => Ok(cp2_1blowup()),
        "cp2_2blowup" => Ok(cp2_2blowup()),
        "cp2_3blowup" => Ok(cp2_3blowup()),
        other => match parse_hexagon_args(other) {
            Some(Ok((l, m))) => hexagon(&l, &m),
            Some(Err(e)) => Err(e),
            None => Err(CatalogError::UnknownName(name.to_string())),
        },
    }
}

/// If `p` belongs to the hexagon family (the six hexagon normals with
/// alternating bounds), returns `(λ, μ)`. Dropped half-spaces count, so
/// degenerate members on the parameter boundary are recognised too.
pub fn hexagon_params<T: Scalar>(p: &Polytope<T>) -> Option<(T, T)> {
    let all: Vec<&HalfSpace<T>> = p.halfspaces().iter().chain(p.dropped()).collect();
    if all.len() != 6 || p.dim() != 2 {
        return None;
    }
    let mut bounds: Vec<T> = Vec::with_capacity(6);
    for n in HEXAGON_NORMALS {
        let h = all.iter().find(|h| h.normal == n)?;
        bounds.push(h.bound.clone());
    }
    let (l, m) = (bounds[0].clone(), bounds[1].clone());
    let alternating = bounds.iter().enumerate().all(|(i, b)| b.cmp_tol(if i % 2 == 0 { &l } else { &m }).is_eq());
    alternating.then_some((l, m))
}
