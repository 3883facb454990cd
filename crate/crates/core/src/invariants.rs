//! Average scalar curvature, Futaki data, the extremal potential `θ_X`, the
//! functional `L(u)`, relative Futaki invariants of toric degenerations and
//! the sufficient stability conditions.
//!
//! Conventions: boundary integrals use the lattice measure `dσ`;
//! `R̄ = Vol_dσ(∂P) / Vol(P)`; the centering constants `c` and coefficients
//! `a` of `θ_X = Σ a_i (x_i + c_i)` are fixed by requiring `L` to vanish on
//! every affine function.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::catalog::hexagon_params;
use crate::geometry::{cone_decomposition, GeometryError, Polytope};
use crate::integration::{
    boundary_integral, boundary_integral_pl, integrate_pl, integrate_pl_weighted, integrate_polynomial,
    integrate_region, lattice_points, IntegrationError,
};
use crate::linalg::{det, solve};
use crate::pl::{AffineFunction, PlFunction};
use crate::polynomial::Polynomial;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("moment matrix is singular")]
    SingularMoment,
    #[error("condition {0} only applies to the hexagon family")]
    WrongFamily(Condition),
    #[error("the origin is not an interior point")]
    OriginNotInterior,
    #[error(transparent)]
    Integration(#[from] IntegrationError),
}

impl From<GeometryError> for InvariantError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::OriginNotInterior => InvariantError::OriginNotInterior,
            // cone_decomposition only fails on the origin precondition
            other => unreachable!("unexpected geometry error {other}"),
        }
    }
}

/// `R̄ = ∫_{∂P} dσ / ∫_P dx`.
pub fn average_scalar_curvature<T: Scalar>(p: &Polytope<T>) -> T {
    p.boundary_measure() / p.volume()
}

/// `c_i = −∫_P x_i dx / Vol(P)`, so that `∫_P (x_i + c_i) dx = 0`.
pub fn centering_constants<T: Scalar>(p: &Polytope<T>) -> Vec<T> {
    let vol = p.volume();
    (0..p.dim()).map(|j| -integrate_polynomial(p, &Polynomial::variable(p.dim(), j)) / &vol).collect()
}

fn centered_coordinates<T: Scalar>(n: usize, c: &[T]) -> Vec<Polynomial<T>> {
    (0..n).map(|j| &Polynomial::variable(n, j) + &Polynomial::constant(n, c[j].clone())).collect()
}

/// `b_j = ∫_{∂P} (x_j + c_j) dσ`; zero exactly when the Futaki invariant
/// vanishes on the class.
pub fn futaki_vector<T: Scalar>(p: &Polytope<T>) -> Vec<T> {
    let c = centering_constants(p);
    centered_coordinates(p.dim(), &c).iter().map(|y| boundary_integral(p, y)).collect()
}

/// `M_jk = ∫_P (x_j + c_j)(x_k + c_k) dx`.
pub fn moment_matrix<T: Scalar>(p: &Polytope<T>, c: &[T]) -> Vec<Vec<T>> {
    let ys = centered_coordinates(p.dim(), c);
    let n = p.dim();
    let mut m = vec![vec![T::zero(); n]; n];
    for j in 0..n {
        for k in j..n {
            let v = integrate_polynomial(p, &(&ys[j] * &ys[k]));
            m[j][k] = v.clone();
            m[k][j] = v;
        }
    }
    m
}

/// Leading principal minors of a square matrix.
pub fn leading_minors<T: Scalar>(m: &[Vec<T>]) -> Vec<T> {
    (1..=m.len()).map(|k| det(&m[..k].iter().map(|r| r[..k].to_vec()).collect::<Vec<_>>())).collect()
}

/// The extremal affine potential and its range over `P̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalData<T> {
    pub c: Vec<T>,
    pub a: Vec<T>,
    pub theta: AffineFunction<T>,
    pub theta_min: T,
    pub theta_max: T,
    pub norm: T,
}

impl<T: Scalar> ExtremalData<T> {
    pub fn is_trivial(&self) -> bool {
        self.a.iter().all(|x| x.is_zero_tol())
    }
}

/// Solves `M a = b` for `θ_X = Σ a_i (x_i + c_i)`.
pub fn extremal_field<T: Scalar>(p: &Polytope<T>) -> Result<ExtremalData<T>, InvariantError> {
    let c = centering_constants(p);
    let b = centered_coordinates(p.dim(), &c).iter().map(|y| boundary_integral(p, y)).collect::<Vec<_>>();
    let m = moment_matrix(p, &c);
    let a = solve(&m, &b).ok_or(InvariantError::SingularMoment)?;
    let constant = a.iter().zip(&c).fold(T::zero(), |acc, (ai, ci)| acc + ai.clone() * ci);
    let theta = AffineFunction::new(a.clone(), constant);
    let values: Vec<T> = p.vertices().iter().map(|v| theta.evaluate(v)).collect();
    let theta_min = values.iter().cloned().fold(values[0].clone(), |m, v| if v < m { v } else { m });
    let theta_max = values.iter().cloned().fold(values[0].clone(), |m, v| if v > m { v } else { m });
    let norm = if theta_min.abs() > theta_max.abs() { theta_min.abs() } else { theta_max.abs() };
    Ok(ExtremalData { c, a, theta, theta_min, theta_max, norm })
}

/// `‖θ_X‖ = max_{P̄} |θ_X|`, attained at a vertex.
pub fn theta_norm<T: Scalar>(e: &ExtremalData<T>, p: &Polytope<T>) -> T {
    p.vertices().iter().map(|v| e.theta.evaluate(v).abs()).fold(T::zero(), |m, v| if v > m { v } else { m })
}

fn curvature_weight<T: Scalar>(p: &Polytope<T>, e: &ExtremalData<T>) -> Polynomial<T> {
    let n = p.dim();
    &Polynomial::constant(n, average_scalar_curvature(p)) + &e.theta.to_polynomial()
}

/// `L(u) = ∫_{∂P} u dσ − ∫_P (R̄ + θ_X) u dx`.
pub fn linear_functional<T: Scalar>(p: &Polytope<T>, u: &PlFunction<T>, e: &ExtremalData<T>) -> T {
    boundary_integral_pl(u) - integrate_pl_weighted(u, &curvature_weight(p, e))
}

/// Sums `∫ f_{i,λ}` over the pieces `P_i ∩ P^λ` of the cone decomposition
/// refined by the cells of `u`, where `f` depends on the facet `i` and the
/// active piece `λ`.
fn cone_cell_sum<T: Scalar>(
    p: &Polytope<T>,
    u: &PlFunction<T>,
    integrand: impl Fn(usize, &AffineFunction<T>) -> Polynomial<T>,
) -> Result<T, InvariantError> {
    let cones = cone_decomposition(p)?;
    let mut total = T::zero();
    for (facet, simplex) in &cones.cells {
        if u.cells().len() == 1 {
            let f = integrand(*facet, &u.pieces()[u.cells()[0].piece]);
            total += crate::integration::integrate_simplex(simplex, &f);
            continue;
        }
        let cone = simplex.to_region();
        for cell in u.cells() {
            let piece = cone.intersect(cell.region.constraints().iter().cloned());
            if !piece.is_full_dimensional() {
                continue;
            }
            total += integrate_region(&piece, &integrand(*facet, &u.pieces()[cell.piece]));
        }
    }
    Ok(total)
}

/// `L(u)` in cone form: `Σ_i ∫_{P_i} [⟨x, ∇u⟩/λ_i + (n/λ_i − R̄ − θ_X) u] dx`.
pub fn linear_functional_cone<T: Scalar>(
    p: &Polytope<T>,
    u: &PlFunction<T>,
    e: &ExtremalData<T>,
) -> Result<T, InvariantError> {
    let n = p.dim();
    let weight = curvature_weight(p, e);
    cone_cell_sum(p, u, |facet, piece| {
        let lambda = p.halfspaces()[facet].bound.clone();
        let euler = Polynomial::affine(&piece.gradient, &T::zero()).scale(&(T::one() / &lambda));
        let coeff = &Polynomial::constant(n, T::from_int(n as i64) / &lambda) - &weight;
        &euler + &(&coeff * &piece.to_polynomial())
    })
}

/// `Σ_i ∫_{P_i} ((n+1)/λ_i − R̄ − θ_X) u dx`, a lower bound for `L(u)` when
/// `u` is normalized at the origin.
pub fn cone_lower_bound<T: Scalar>(
    p: &Polytope<T>,
    u: &PlFunction<T>,
    e: &ExtremalData<T>,
) -> Result<T, InvariantError> {
    let n = p.dim();
    let weight = curvature_weight(p, e);
    cone_cell_sum(p, u, |facet, piece| {
        let lambda = p.halfspaces()[facet].bound.clone();
        let coeff = &Polynomial::constant(n, T::from_int(n as i64 + 1) / &lambda) - &weight;
        &coeff * &piece.to_polynomial()
    })
}

/// Invariants of the toric degeneration induced by a convex PL function.
#[derive(Clone, Debug, PartialEq)]
pub struct DegenerationReport<T> {
    pub l_value: T,
    /// `F_β̃(α̃) = −L(u) / (2 Vol P)`.
    pub rel_futaki: T,
    /// `F(α̃) = −(∫_{∂P} u dσ − R̄ ∫_P u dx) / (2 Vol P)`.
    pub gen_futaki_alpha: T,
    /// `F(β̃) = −∫_P θ_X² dx / (2 Vol P)`.
    pub gen_futaki_beta: T,
    /// `(α̃, β̃) = −∫_P θ_X u dx`.
    pub ip_ab: T,
    /// `(β̃, β̃) = −∫_P θ_X² dx`.
    pub ip_bb: T,
    pub trivial: bool,
}

pub fn relative_futaki<T: Scalar>(p: &Polytope<T>, u: &PlFunction<T>, e: &ExtremalData<T>) -> DegenerationReport<T> {
    let vol = p.volume();
    let two_vol = T::from_int(2) * &vol;
    let rbar = average_scalar_curvature(p);
    let bd = boundary_integral_pl(u);
    let vol_u = integrate_pl(u);
    let theta = e.theta.to_polynomial();
    let theta_u = integrate_pl_weighted(u, &theta);
    let theta_sq = integrate_polynomial(p, &(&theta * &theta));
    let l_value = bd.clone() - rbar.clone() * &vol_u - &theta_u;
    DegenerationReport {
        rel_futaki: -l_value.clone() / &two_vol,
        gen_futaki_alpha: -(bd - rbar * vol_u) / &two_vol,
        gen_futaki_beta: -theta_sq.clone() / &two_vol,
        ip_ab: -theta_u,
        ip_bb: -theta_sq,
        trivial: u.is_affine(),
        l_value,
    }
}

/// Lattice analogue of `(α̃, β̃)` at scale `k`:
/// `(Tr(A_k B_k) − Tr(A_k) Tr(B_k)/d_k) / k^{n+2}` with diagonal weights
/// `k(R − u(I/k))` and `k θ(I/k)`. The roof constant `R` cancels.
pub fn lattice_inner_product<T: Scalar>(
    p: &Polytope<T>,
    u: &PlFunction<T>,
    theta: &AffineFunction<T>,
    k: i64,
) -> Result<T, InvariantError> {
    let pts = lattice_points(p, k)?;
    let kk = T::from_int(k);
    let (mut su, mut st, mut sut) = (T::zero(), T::zero(), T::zero());
    for pt in &pts {
        let x: Vec<T> = pt.iter().map(|&c| T::from_int(c) / &kk).collect();
        let uv = u.value(&x);
        let tv = theta.evaluate(&x);
        sut += uv.clone() * &tv;
        su += uv;
        st += tv;
    }
    let d = T::from_int(pts.len() as i64);
    let kn = num_traits::pow(kk, p.dim());
    Ok(-(sut - su * st / d) / kn)
}

/// The sufficient conditions that can be checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    /// `R̄ + ‖θ_X‖ ≤ (n+1)/λ_i` for every facet.
    C02,
    /// `R̄ + ‖θ_X‖ ≤ n+1`, the Fano specialisation.
    C02Prime,
    /// `R̄ ≤ (n+1)/λ_i`, for vanishing Futaki invariant.
    C02DoublePrime,
    /// `R̄ + θ_X ≤ (n+1)/λ_i` pointwise on `P`.
    C43,
    /// The cone-volume criterion for vanishing Futaki invariant.
    C04,
    /// The hexagon-family window on `μ/λ`.
    C61,
}

impl Condition {
    pub const ALL: [Condition; 6] = [
        Condition::C02,
        Condition::C02Prime,
        Condition::C02DoublePrime,
        Condition::C43,
        Condition::C04,
        Condition::C61,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::C02 => "c02",
            Condition::C02Prime => "c02prime",
            Condition::C02DoublePrime => "c02doubleprime",
            Condition::C43 => "c43",
            Condition::C04 => "c04",
            Condition::C61 => "c61",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where the smallest slack of a condition is attained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Facet(usize),
    Vertex(usize),
    FacetVertex { facet: usize, vertex: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionVerdict<T> {
    pub condition: Condition,
    pub holds: bool,
    /// Minimum slack; `holds` exactly when it is non-negative.
    pub margin: T,
    pub witness: Option<Witness>,
}

impl<T: Scalar> ConditionVerdict<T> {
    fn from_margin(condition: Condition, margin: T, witness: Option<Witness>) -> Self {
        Self { condition, holds: margin.sign() != Ordering::Less, margin, witness }
    }
}

fn argmin<T: Scalar>(values: impl IntoIterator<Item = T>) -> (usize, T) {
    let mut it = values.into_iter().enumerate();
    let first = it.next().expect("non-empty");
    it.fold(first, |(bi, bv), (i, v)| if v < bv { (i, v) } else { (bi, bv) })
}

pub fn check_condition<T: Scalar>(
    p: &Polytope<T>,
    e: &ExtremalData<T>,
    which: Condition,
) -> Result<ConditionVerdict<T>, InvariantError> {
    let n1 = T::from_int(p.dim() as i64 + 1);
    let rbar = average_scalar_curvature(p);
    let lambdas: Vec<T> = p.halfspaces().iter().map(|h| h.bound.clone()).collect();
    let verdict = match which {
        Condition::C02 => {
            let lhs = rbar + &e.norm;
            let (i, m) = argmin(lambdas.iter().map(|l| n1.clone() / l - &lhs));
            ConditionVerdict::from_margin(which, m, Some(Witness::Facet(i)))
        }
        Condition::C02Prime => ConditionVerdict::from_margin(which, n1 - rbar - &e.norm, None),
        Condition::C02DoublePrime => {
            let (i, m) = argmin(lambdas.iter().map(|l| n1.clone() / l - &rbar));
            ConditionVerdict::from_margin(which, m, Some(Witness::Facet(i)))
        }
        Condition::C43 => {
            // R̄ + θ_X is affine, so its maximum over P̄ sits at a vertex
            let (v, neg_max) = argmin(p.vertices().iter().map(|x| -e.theta.evaluate(x)));
            let (i, m) = argmin(lambdas.iter().map(|l| n1.clone() / l - &rbar + &neg_max));
            ConditionVerdict::from_margin(which, m, Some(Witness::FacetVertex { facet: i, vertex: v }))
        }
        Condition::C04 => {
            let cones = cone_decomposition(p)?;
            let vols: Vec<T> = (0..lambdas.len()).map(|j| cones.facet_volume(j)).collect();
            let total = vols.iter().fold(T::zero(), |a, v| a + v);
            let weighted = vols.iter().zip(&lambdas).fold(T::zero(), |a, (v, l)| a + v.clone() / l);
            let bound = n1 / T::from_int(p.dim() as i64);
            let (i, neg) = argmin(lambdas.iter().map(|l| -(l.clone() * &weighted / &total)));
            ConditionVerdict::from_margin(which, bound + neg, Some(Witness::Facet(i)))
        }
        Condition::C61 => {
            let (l, m) = hexagon_params(p).ok_or(InvariantError::WrongFamily(which))?;
            // |λ − μ| ≤ (√10/5)·min(λ, μ), squared
            let small = if l < m { l.clone() } else { m.clone() };
            let diff = l - m;
            let margin = T::from_int(10) * small.clone() * small - T::from_int(25) * diff.clone() * diff;
            ConditionVerdict::from_margin(which, margin, None)
        }
    };
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog, cp2, cp2_1blowup, cp2_2blowup, hexagon, square};
    use crate::pl::{make_pl, SimplePl};
    use crate::scalar::{q, Rational};

    fn max0x1() -> AffineFunction<Rational> {
        AffineFunction::new(vec![q(1, 1), q(0, 1)], q(0, 1))
    }

    #[test]
    fn average_scalar_curvature_values() {
        assert_eq!(average_scalar_curvature(&cp2()), q(2, 1));
        assert_eq!(average_scalar_curvature(&cp2_2blowup()), q(2, 1));
        let (l, m) = (q(2, 1), q(3, 1));
        let expected = q(2, 1) * (m.clone() + &l) / (q(4, 1) * &l * &m - &m * &m - &l * &l);
        assert_eq!(average_scalar_curvature(&hexagon(&l, &m).unwrap()), expected);
    }

    #[test]
    fn centering_values() {
        assert_eq!(centering_constants(&square()), vec![q(0, 1), q(0, 1)]);
        assert_eq!(centering_constants(&cp2_2blowup()), vec![q(2, 21), q(2, 21)]);
        assert_eq!(centering_constants(&cp2_1blowup()), vec![q(-1, 12), q(-1, 12)]);
    }

    #[test]
    fn futaki_values() {
        assert_eq!(futaki_vector(&hexagon(&q(2, 1), &q(3, 1)).unwrap()), vec![q(0, 1), q(0, 1)]);
        assert_eq!(futaki_vector(&cp2_2blowup()), vec![q(-1, 3), q(-1, 3)]);
        assert_eq!(futaki_vector(&square()), vec![q(0, 1), q(0, 1)]);
    }

    #[test]
    fn extremal_values() {
        let pent = cp2_2blowup();
        let e = extremal_field(&pent).unwrap();
        assert_eq!(e.a, vec![q(-168, 409), q(-168, 409)]);
        assert_eq!((e.theta_min.clone(), e.theta_max.clone()), (q(-200, 409), q(304, 409)));
        assert_eq!(theta_norm(&e, &pent), q(304, 409));
        assert!(e.theta_min > q(-2, 1) && e.theta_max < q(1, 1));
        let hex = extremal_field(&hexagon(&q(2, 1), &q(3, 1)).unwrap()).unwrap();
        assert!(hex.is_trivial());
        assert_eq!(hex.norm, q(0, 1));
        let quad = extremal_field(&cp2_1blowup()).unwrap();
        assert_eq!(quad.a, vec![q(6, 11), q(6, 11)]);
    }

    #[test]
    fn moment_matrix_is_positive_definite() {
        let p = cp2_1blowup();
        let m = moment_matrix(&p, &centering_constants(&p));
        assert_eq!(m, vec![vec![q(71, 36), q(-49, 36)], vec![q(-49, 36), q(71, 36)]]);
        assert!(leading_minors(&m).iter().all(|d| *d > q(0, 1)));
    }

    #[test]
    fn l_values() {
        let tri = cp2();
        let e = extremal_field(&tri).unwrap();
        let u = SimplePl::new(max0x1()).to_pl(&tri).unwrap();
        assert_eq!(linear_functional(&tri, &u, &e), q(4, 3));
        assert_eq!(linear_functional_cone(&tri, &u, &e).unwrap(), q(4, 3));
        let sq = square();
        let es = extremal_field(&sq).unwrap();
        let v = SimplePl::new(max0x1()).to_pl(&sq).unwrap();
        assert_eq!(linear_functional(&sq, &v, &es), q(1, 1));
        assert_eq!(linear_functional_cone(&sq, &v, &es).unwrap(), q(1, 1));
        let aff = make_pl(vec![AffineFunction::new(vec![q(3, 1), q(-2, 7)], q(5, 1))], &sq).unwrap();
        assert_eq!(linear_functional(&sq, &aff, &es), q(0, 1));
        assert_eq!(linear_functional_cone(&sq, &aff, &es).unwrap(), q(0, 1));
    }

    #[test]
    fn relative_futaki_values() {
        let tri = cp2();
        let e = extremal_field(&tri).unwrap();
        let u = SimplePl::new(max0x1()).to_pl(&tri).unwrap();
        let r = relative_futaki(&tri, &u, &e);
        assert_eq!(r.rel_futaki, q(-4, 27));
        assert_eq!(r.rel_futaki, r.gen_futaki_alpha); // θ_X = 0
        assert!(!r.trivial);
        let aff = make_pl(vec![AffineFunction::new(vec![q(1, 2), q(1, 1)], q(-1, 1))], &tri).unwrap();
        let ra = relative_futaki(&tri, &aff, &e);
        assert_eq!(ra.rel_futaki, q(0, 1));
        assert!(ra.trivial);
    }

    #[test]
    fn relative_futaki_decomposition_with_extremal_action() {
        let pent = cp2_2blowup();
        let e = extremal_field(&pent).unwrap();
        let u = SimplePl::new(AffineFunction::new(vec![q(1, 1), q(-1, 2)], q(1, 3))).to_pl(&pent).unwrap();
        let r = relative_futaki(&pent, &u, &e);
        let rebuilt = r.gen_futaki_alpha.clone() - r.ip_ab.clone() / &r.ip_bb * &r.gen_futaki_beta;
        assert_eq!(rebuilt, r.rel_futaki);
        // ∫_{∂P} θ_X dσ = ∫_P θ_X² dx
        let theta = e.theta.to_polynomial();
        assert_eq!(boundary_integral(&pent, &theta), -r.ip_bb);
    }

    #[test]
    fn condition_examples() {
        let pent = cp2_2blowup();
        let e = extremal_field(&pent).unwrap();
        let c02 = check_condition(&pent, &e, Condition::C02).unwrap();
        assert!(c02.holds);
        assert_eq!(c02.margin, q(105, 409));
        let hex = hexagon(&q(2, 1), &q(3, 1)).unwrap();
        let eh = extremal_field(&hex).unwrap();
        let c61 = check_condition(&hex, &eh, Condition::C61).unwrap();
        assert!(c61.holds);
        assert_eq!(c61.margin, q(15, 1));
        let sq = square();
        let es = extremal_field(&sq).unwrap();
        let c04 = check_condition(&sq, &es, Condition::C04).unwrap();
        assert!(c04.holds);
        assert_eq!(c04.margin, q(1, 2));
        assert_eq!(check_condition(&sq, &es, Condition::C61).unwrap_err(), InvariantError::WrongFamily(Condition::C61));
        let shifted = crate::geometry::translate(&sq, &[q(1, 1), q(0, 1)]).unwrap();
        let esh = extremal_field(&shifted).unwrap();
        assert_eq!(check_condition(&shifted, &esh, Condition::C04).unwrap_err(), InvariantError::OriginNotInterior);
    }

    #[test]
    fn c61_matches_c02doubleprime_on_hexagons() {
        for (l, m) in [(2, 3), (3, 2), (4, 7), (1, 1), (5, 9), (3, 5)] {
            let hex = hexagon(&q(l, 1), &q(m, 1)).unwrap();
            let e = extremal_field(&hex).unwrap();
            let a = check_condition(&hex, &e, Condition::C61).unwrap().holds;
            let b = check_condition(&hex, &e, Condition::C02DoublePrime).unwrap().holds;
            assert_eq!(a, b, "({l},{m})");
        }
    }

    #[test]
    fn c43_on_fano_surfaces() {
        for name in ["cp2", "cp1xcp1", "cp2_1blowup", "cp2_2blowup", "cp2_3blowup"] {
            let p = catalog(name).unwrap();
            let e = extremal_field(&p).unwrap();
            assert!(check_condition(&p, &e, Condition::C43).unwrap().holds, "{name}");
        }
    }
}
