//! Grid scan over simple PL functions `max{0, ⟨a,x⟩ − s}` on a polygon,
//! normalized at an interior point, estimating the coercivity constant `λ*`
//! in `L(u) ≥ λ ∫_{∂P} u dσ` and looking for destabilizers (`L(u) < 0`).
//!
//! Every grid point is screened in `f64`; the best few of each round are
//! re-evaluated exactly and only exact values are reported. The estimate is
//! an upper bound for `λ*` over the sampled family, never the infimum.

use std::cmp::Ordering;

use num_integer::Integer;
use thiserror::Error;

use crate::geometry::Polytope;
use crate::integration::{integrate_region, region_facet_integral};
use crate::invariants::{average_scalar_curvature, centering_constants, ExtremalData};
use crate::pl::{AffineFunction, SimplePl};
use crate::polynomial::Polynomial;
use crate::scalar::{Rational, Scalar};

/// Label attached to the estimate in reports.
pub const ESTIMATE_LABEL: &str = "upper bound from sampled simple PL family";

/// Denominator used when snapping the tangent half-angle and offset fraction.
const SNAP: i64 = 256;
const OFFSET_SNAP: i64 = 1 << 16;
/// Points per axis in each refinement grid.
const REFINE_GRID: usize = 20;
/// Best float candidates re-evaluated exactly per round.
const EXACT_CHECKS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScanError {
    #[error("the scan is only defined for polygons, got dimension {0}")]
    NotPlanar(usize),
    #[error("grid counts must be at least 1")]
    InvalidConfig,
    #[error("the grid produced no crease through the interior; widen the offsets")]
    NoInteriorCrease,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanConfig {
    pub direction_count: usize,
    pub offset_count: usize,
    pub refine_rounds: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { direction_count: 360, offset_count: 100, refine_rounds: 2 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub lambda_star_estimate: Rational,
    pub worst_u: SimplePl<Rational>,
    /// Exact `L(worst_u)`.
    pub worst_l: Rational,
    /// Exact `∫_{∂P} worst_u dσ`.
    pub worst_boundary: Rational,
    pub destabilizer_found: bool,
    /// `R̄ + θ_X ≥ 0` on `P̄`.
    pub hypothesis_holds: bool,
    pub candidates: usize,
    pub exact_evaluations: usize,
}

/// Integer crease normal for angle `phi`, via the rational point
/// `((1 − t²), 2t)` with `t = tan(phi/2)` snapped to `P/SNAP`.
pub fn snapped_direction(phi: f64) -> [i64; 2] {
    let phi = phi.rem_euclid(std::f64::consts::TAU);
    if (phi - std::f64::consts::PI).abs() < 1e-9 {
        return [-1, 0];
    }
    let p = ((phi / 2.0).tan() * SNAP as f64).round() as i64;
    let (a, b) = (SNAP * SNAP - p * p, 2 * p * SNAP);
    let g = a.gcd(&b).max(1);
    [a / g, b / g]
}

/// `τ` snapped to a dyadic rational strictly inside `(0, 1)`.
fn snapped_fraction(tau: f64) -> Rational {
    let k = (tau * OFFSET_SNAP as f64).round() as i64;
    Rational::from_ratio(k.clamp(1, OFFSET_SNAP - 1), OFFSET_SNAP)
}

/// `g = ±(⟨a,x⟩ − s)` with `s` at fraction `τ` of the range of `⟨a,·⟩`
/// over the vertices, so the crease meets the interior. The sign makes
/// `g(p0) ≤ 0`, so `max{0, g}` is normalized at `p0`.
fn crease<T: Scalar>(p: &Polytope<T>, p0: &[T], a: [i64; 2], tau: &Rational) -> AffineFunction<T> {
    let grad = vec![T::from_int(a[0]), T::from_int(a[1])];
    let heights: Vec<T> = p.vertices().iter().map(|v| grad[0].clone() * &v[0] + grad[1].clone() * &v[1]).collect();
    let lo = heights.iter().cloned().fold(heights[0].clone(), |m, h| if h < m { h } else { m });
    let hi = heights.iter().cloned().fold(heights[0].clone(), |m, h| if h > m { h } else { m });
    let s = lo.clone() + T::from_rational(tau) * (hi - lo);
    let g = AffineFunction::new(grad, -s);
    if g.evaluate(p0).sign() == Ordering::Greater {
        g.negated()
    } else {
        g
    }
}

/// The point where candidates are normalized: the origin when interior,
/// otherwise the centroid.
pub fn normalization_point(p: &Polytope<Rational>) -> Vec<Rational> {
    if p.origin_interior() {
        vec![Rational::from_int(0); p.dim()]
    } else {
        centering_constants(p).into_iter().map(|c| -c).collect()
    }
}

/// `(L(u), ∫_{∂P} u dσ)` for `u = max{0, g}`; only the cell `{g ≥ 0}`
/// contributes. `None` when that cell is lower-dimensional.
pub fn simple_pl_terms<T: Scalar>(p: &Polytope<T>, weight: &Polynomial<T>, g: &AffineFunction<T>) -> Option<(T, T)> {
    let cell = p.region().intersect([g.negated().le_zero()]);
    if !cell.is_full_dimensional() {
        return None;
    }
    let gp = g.to_polynomial();
    let boundary = p
        .halfspaces()
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (i, h)| acc + region_facet_integral(&cell, i, &h.normal, &gp));
    let interior = integrate_region(&cell, &(weight * &gp));
    Some((boundary.clone() - interior, boundary))
}

#[derive(Clone, Debug)]
struct Candidate {
    phi: f64,
    tau: f64,
    ratio: f64,
}

struct Exact {
    phi: f64,
    tau: f64,
    crease: AffineFunction<Rational>,
    l: Rational,
    boundary: Rational,
    ratio: Rational,
}

pub fn scan(p: &Polytope<Rational>, e: &ExtremalData<Rational>, cfg: &ScanConfig) -> Result<ScanResult, ScanError> {
    if p.dim() != 2 {
        return Err(ScanError::NotPlanar(p.dim()));
    }
    if cfg.direction_count == 0 || cfg.offset_count == 0 {
        return Err(ScanError::InvalidConfig);
    }
    let weight = &Polynomial::constant(2, average_scalar_curvature(p)) + &e.theta.to_polynomial();
    let hypothesis_holds =
        p.vertices().iter().all(|v| (average_scalar_curvature(p) + e.theta.evaluate(v)).sign() != Ordering::Less);

    let p0 = normalization_point(p);
    let p0f: Vec<f64> = p0.iter().map(|x| x.to_f64()).collect();
    let pf = p.map_scalar(|x| x.to_f64()).expect("float image of a valid polytope");
    let wf = weight.map_scalar(|x| x.to_f64());

    let screen = |phi: f64, tau: f64| -> Option<Candidate> {
        let g = crease(&pf, &p0f, snapped_direction(phi), &snapped_fraction(tau));
        let (l, b) = simple_pl_terms(&pf, &wf, &g)?;
        (b > 0.0).then(|| Candidate { phi, tau, ratio: l / b })
    };
    let exact = |c: &Candidate| -> Option<Exact> {
        let g = crease(p, &p0, snapped_direction(c.phi), &snapped_fraction(c.tau));
        let (l, boundary) = simple_pl_terms(p, &weight, &g)?;
        if boundary.sign() != Ordering::Greater {
            return None;
        }
        Some(Exact { phi: c.phi, tau: c.tau, ratio: l.clone() / &boundary, crease: g, l, boundary })
    };

    let mut candidates = 0usize;
    let mut exact_evaluations = 0usize;
    let mut incumbent: Option<Exact> = None;
    let mut round = |grid: Vec<(f64, f64)>, incumbent: &mut Option<Exact>| {
        let mut screened: Vec<Candidate> = grid.into_iter().filter_map(|(phi, tau)| screen(phi, tau)).collect();
        candidates += screened.len();
        screened.sort_by(|a, b| a.ratio.partial_cmp(&b.ratio).unwrap_or(Ordering::Equal));
        for c in screened.iter().take(EXACT_CHECKS) {
            let Some(x) = exact(c) else { continue };
            exact_evaluations += 1;
            if incumbent.as_ref().is_none_or(|best| x.ratio < best.ratio) {
                *incumbent = Some(x);
            }
        }
    };

    let dphi = std::f64::consts::TAU / cfg.direction_count as f64;
    let dtau = 1.0 / cfg.offset_count as f64;
    let coarse = (0..cfg.direction_count)
        .flat_map(|i| (0..cfg.offset_count).map(move |j| (i as f64 * dphi, (j as f64 + 0.5) * dtau)))
        .collect();
    round(coarse, &mut incumbent);

    let (mut span_phi, mut span_tau) = (dphi, dtau);
    for _ in 0..cfg.refine_rounds {
        let Some(best) = incumbent.as_ref() else { break };
        let (phi0, tau0) = (best.phi, best.tau);
        let steps = REFINE_GRID as f64;
        let grid = (0..=REFINE_GRID)
            .flat_map(|i| {
                (0..=REFINE_GRID).map(move |j| {
                    let phi = phi0 + span_phi * (2.0 * i as f64 / steps - 1.0);
                    let tau = tau0 + span_tau * (2.0 * j as f64 / steps - 1.0);
                    (phi, tau)
                })
            })
            .filter(|&(_, tau)| tau > 0.0 && tau < 1.0)
            .collect();
        round(grid, &mut incumbent);
        span_phi *= 2.0 / steps;
        span_tau *= 2.0 / steps;
    }

    let best = incumbent.ok_or(ScanError::NoInteriorCrease)?;
    Ok(ScanResult {
        destabilizer_found: best.l.sign() == Ordering::Less,
        lambda_star_estimate: best.ratio,
        worst_u: SimplePl::new(best.crease),
        worst_l: best.l,
        worst_boundary: best.boundary,
        hypothesis_holds,
        candidates,
        exact_evaluations,
    })
}
