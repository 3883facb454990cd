//! Structured reports for the command-line workflows.
//!
//! Every rational is emitted as an exact `"p/q"` string next to a decimal
//! approximation. Reports carry no timestamps, so identical inputs give
//! identical bytes.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::catalog::hexagon_params;
use crate::geometry::{delzant_check, Polytope};
use crate::integration::{ehrhart_residual, pl_lattice_sum, IntegrationError};
use crate::invariants::{
    average_scalar_curvature, check_condition, cone_lower_bound, extremal_field, futaki_vector, lattice_inner_product,
    linear_functional, linear_functional_cone, relative_futaki, Condition, ConditionVerdict, ExtremalData,
    InvariantError, Witness,
};
use crate::pl::PlFunction;
use crate::scalar::{fmt_rational, Rational, Scalar};
use crate::search::{scan, ScanConfig, ScanError, ScanResult, ESTIMATE_LABEL};

/// An exact value with a decimal preview.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Value {
    pub exact: String,
    pub decimal: f64,
}

impl From<&Rational> for Value {
    fn from(x: &Rational) -> Self {
        Self { exact: fmt_rational(x), decimal: x.to_f64() }
    }
}

fn v(x: &Rational) -> Value {
    x.into()
}

fn vs(xs: &[Rational]) -> Vec<Value> {
    xs.iter().map(v).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub input_sha256: String,
}

impl Provenance {
    pub fn for_input(input: &str) -> Self {
        let digest = Sha256::digest(input.as_bytes());
        let input_sha256 = digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        Self { tool: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION"), input_sha256 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolytopeSummary {
    pub name: Option<String>,
    pub dim: usize,
    pub volume: Value,
    pub boundary_measure: Value,
    pub vertices: Vec<Vec<String>>,
    pub facet_count: usize,
    pub dropped_halfspaces: usize,
    pub delzant: bool,
    pub origin_interior: bool,
}

impl PolytopeSummary {
    pub fn new(p: &Polytope<Rational>, name: Option<&str>) -> Self {
        Self {
            name: name.map(str::to_string),
            dim: p.dim(),
            volume: v(&p.volume()),
            boundary_measure: v(&p.boundary_measure()),
            vertices: p.vertices().iter().map(|x| x.iter().map(fmt_rational).collect()).collect(),
            facet_count: p.halfspaces().len(),
            dropped_halfspaces: p.dropped().len(),
            delzant: delzant_check(p).is_delzant,
            origin_interior: p.origin_interior(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionEntry {
    pub name: Condition,
    pub holds: bool,
    pub margin: Value,
    pub witness: Option<Witness>,
}

impl From<&ConditionVerdict<Rational>> for ConditionEntry {
    fn from(c: &ConditionVerdict<Rational>) -> Self {
        Self { name: c.condition, holds: c.holds, margin: v(&c.margin), witness: c.witness }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegenerationEntry {
    pub expression: String,
    pub active_pieces: usize,
    pub trivial: bool,
    pub l_value: Value,
    pub rel_futaki: Value,
    pub gen_futaki_alpha: Value,
    pub gen_futaki_beta: Value,
    pub ip_ab: Value,
    pub ip_bb: Value,
    /// Non-trivial with `L(u) < 0`, i.e. positive relative Futaki invariant.
    pub destabilizing: bool,
}

impl DegenerationEntry {
    pub fn new(expression: &str, p: &Polytope<Rational>, u: &PlFunction<Rational>, e: &ExtremalData<Rational>) -> Self {
        let r = relative_futaki(p, u, e);
        Self {
            expression: expression.to_string(),
            active_pieces: u.cells().len(),
            trivial: r.trivial,
            l_value: v(&r.l_value),
            rel_futaki: v(&r.rel_futaki),
            gen_futaki_alpha: v(&r.gen_futaki_alpha),
            gen_futaki_beta: v(&r.gen_futaki_beta),
            ip_ab: v(&r.ip_ab),
            ip_bb: v(&r.ip_bb),
            destabilizing: !r.trivial && r.l_value.sign() == Ordering::Less,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanEntry {
    pub label: &'static str,
    pub lambda_star_estimate: Value,
    pub worst_u: String,
    pub worst_l: Value,
    pub worst_boundary: Value,
    pub destabilizer_found: bool,
    pub hypothesis_holds: bool,
    pub direction_count: usize,
    pub offset_count: usize,
    pub refine_rounds: usize,
    pub candidates: usize,
    pub exact_evaluations: usize,
}

impl ScanEntry {
    pub fn new(r: &ScanResult, cfg: &ScanConfig) -> Self {
        Self {
            label: ESTIMATE_LABEL,
            lambda_star_estimate: v(&r.lambda_star_estimate),
            worst_u: format!("max(0, {})", r.worst_u.crease),
            worst_l: v(&r.worst_l),
            worst_boundary: v(&r.worst_boundary),
            destabilizer_found: r.destabilizer_found,
            hypothesis_holds: r.hypothesis_holds,
            direction_count: cfg.direction_count,
            offset_count: cfg.offset_count,
            refine_rounds: cfg.refine_rounds,
            candidates: r.candidates,
            exact_evaluations: r.exact_evaluations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub polytope: PolytopeSummary,
    pub rbar: Value,
    pub centering: Vec<Value>,
    pub futaki: Vec<Value>,
    pub extremal: Vec<Value>,
    pub theta_min: Value,
    pub theta_max: Value,
    pub theta_norm: Value,
    pub conditions: Vec<ConditionEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub degenerations: Vec<DegenerationEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanEntry>,
    pub provenance: Provenance,
}

/// Conditions reported for `p`: `c02` and `c43` always; the Fano form
/// `c02prime` when every bound is 1; `c02doubleprime` and `c04` when the
/// Futaki vector vanishes (the latter also needs the origin inside);
/// `c61` on the hexagon family.
pub fn applicable_conditions(p: &Polytope<Rational>, futaki: &[Rational]) -> Vec<Condition> {
    let mut out = vec![Condition::C02];
    if p.halfspaces().iter().all(|h| h.bound == Rational::from_int(1)) {
        out.push(Condition::C02Prime);
    }
    let futaki_zero = futaki.iter().all(|b| b.sign() == Ordering::Equal);
    if futaki_zero {
        out.push(Condition::C02DoublePrime);
    }
    out.push(Condition::C43);
    if futaki_zero && p.origin_interior() {
        out.push(Condition::C04);
    }
    if hexagon_params(p).is_some() {
        out.push(Condition::C61);
    }
    out
}

pub struct AnalyzeOptions<'a> {
    pub name: Option<&'a str>,
    pub degenerations: Vec<(String, PlFunction<Rational>)>,
    pub scan: Option<ScanConfig>,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
}

pub fn analyze(p: &Polytope<Rational>, opts: AnalyzeOptions<'_>, input: &str) -> Result<StabilityReport, ReportError> {
    let e = extremal_field(p)?;
    let futaki = futaki_vector(p);
    let mut conditions = Vec::new();
    for c in applicable_conditions(p, &futaki) {
        conditions.push(ConditionEntry::from(&check_condition(p, &e, c)?));
    }
    let degenerations = opts.degenerations.iter().map(|(s, u)| DegenerationEntry::new(s, p, u, &e)).collect();
    let scan = match opts.scan {
        Some(cfg) if p.dim() == 2 => Some(ScanEntry::new(&scan(p, &e, &cfg)?, &cfg)),
        _ => None,
    };
    Ok(StabilityReport {
        polytope: PolytopeSummary::new(p, opts.name),
        rbar: v(&average_scalar_curvature(p)),
        centering: vs(&e.c),
        futaki: vs(&futaki),
        extremal: vs(&e.a),
        theta_min: v(&e.theta_min),
        theta_max: v(&e.theta_max),
        theta_norm: v(&e.norm),
        conditions,
        degenerations,
        scan,
        provenance: Provenance::for_input(input),
    })
}

impl StabilityReport {
    /// Every reported condition holds, no degeneration destabilizes, and
    /// the scan found no destabilizer.
    pub fn all_clear(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
            && self.degenerations.iter().all(|d| !d.destabilizing)
            && self.scan.as_ref().is_none_or(|s| !s.destabilizer_found)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LfunReport {
    pub polytope: PolytopeSummary,
    pub expression: String,
    pub active_pieces: usize,
    pub affine: bool,
    pub l_boundary_form: Value,
    pub l_cone_form: Option<Value>,
    /// `Σ_i ∫_{P_i} ((n+1)/λ_i − R̄ − θ_X) ũ` for `u` normalized at the origin.
    pub cone_lower_bound: Option<Value>,
    pub boundary_integral: Value,
    pub ratio: Option<Value>,
    pub negative: bool,
    pub provenance: Provenance,
}

pub fn lfun(
    p: &Polytope<Rational>,
    name: Option<&str>,
    expression: &str,
    u: &PlFunction<Rational>,
    input: &str,
) -> Result<LfunReport, ReportError> {
    let e = extremal_field(p)?;
    let l = linear_functional(p, u, &e);
    let (cone, lower) = if p.origin_interior() {
        let origin = vec![Rational::from_int(0); p.dim()];
        let normalized = u.normalize_at(&origin).expect("origin is interior");
        (Some(v(&linear_functional_cone(p, u, &e)?)), Some(v(&cone_lower_bound(p, &normalized, &e)?)))
    } else {
        (None, None)
    };
    let bd = crate::integration::boundary_integral_pl(u);
    let ratio = (bd.sign() == Ordering::Greater).then(|| v(&(l.clone() / &bd)));
    Ok(LfunReport {
        polytope: PolytopeSummary::new(p, name),
        expression: expression.to_string(),
        active_pieces: u.cells().len(),
        affine: u.is_affine(),
        l_boundary_form: v(&l),
        l_cone_form: cone,
        cone_lower_bound: lower,
        boundary_integral: v(&bd),
        ratio,
        negative: l.sign() == Ordering::Less,
        provenance: Provenance::for_input(input),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelativeFutakiReport {
    pub polytope: PolytopeSummary,
    pub extremal: Vec<Value>,
    pub degeneration: DegenerationEntry,
    pub provenance: Provenance,
}

pub fn relative_futaki_report(
    p: &Polytope<Rational>,
    name: Option<&str>,
    expression: &str,
    u: &PlFunction<Rational>,
    input: &str,
) -> Result<RelativeFutakiReport, ReportError> {
    let e = extremal_field(p)?;
    Ok(RelativeFutakiReport {
        polytope: PolytopeSummary::new(p, name),
        extremal: vs(&e.a),
        degeneration: DegenerationEntry::new(expression, p, u, &e),
        provenance: Provenance::for_input(input),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EhrhartReport {
    pub polytope: PolytopeSummary,
    pub expression: String,
    pub k: i64,
    pub lattice_points: usize,
    pub lattice_sum: Value,
    /// `Σ φ(I/k) − k^n ∫ φ − (k^{n−1}/2) ∫_{∂P} φ dσ`.
    pub residual: Value,
    /// Lattice analogue of `(α̃, β̃)` at scale `k`.
    pub lattice_inner_product: Value,
    /// `(α̃, β̃) = −∫_P θ_X φ dx`.
    pub continuum_inner_product: Value,
    pub provenance: Provenance,
}

pub fn ehrhart(
    p: &Polytope<Rational>,
    name: Option<&str>,
    expression: &str,
    u: &PlFunction<Rational>,
    k: i64,
    input: &str,
) -> Result<EhrhartReport, ReportError> {
    let e = extremal_field(p)?;
    let sum = pl_lattice_sum(p, u, k)?;
    Ok(EhrhartReport {
        polytope: PolytopeSummary::new(p, name),
        expression: expression.to_string(),
        k,
        lattice_points: sum.count,
        lattice_sum: v(&sum.weighted_sum),
        residual: v(&ehrhart_residual(p, u, k)?),
        lattice_inner_product: v(&lattice_inner_product(p, u, &e.theta, k)?),
        continuum_inner_product: v(&relative_futaki(p, u, &e).ip_ab),
        provenance: Provenance::for_input(input),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub polytope: PolytopeSummary,
    pub scan: ScanEntry,
    pub provenance: Provenance,
}

pub fn scan_report(
    p: &Polytope<Rational>,
    name: Option<&str>,
    cfg: &ScanConfig,
    input: &str,
) -> Result<ScanReport, ReportError> {
    let e = extremal_field(p)?;
    let r = scan(p, &e, cfg)?;
    Ok(ScanReport {
        polytope: PolytopeSummary::new(p, name),
        scan: ScanEntry::new(&r, cfg),
        provenance: Provenance::for_input(input),
    })
}

/// Human-readable rendering.
pub trait Table {
    fn table(&self) -> String;
}

fn fmt_value(x: &Value) -> String {
    format!("{}  (≈ {:.6})", x.exact, x.decimal)
}

fn fmt_vector(xs: &[Value]) -> String {
    let inner: Vec<&str> = xs.iter().map(|x| x.exact.as_str()).collect();
    format!("({})", inner.join(", "))
}

fn row(out: &mut String, key: &str, value: impl AsRef<str>) {
    let _ = writeln!(out, "{key:<28} {}", value.as_ref());
}

fn polytope_rows(out: &mut String, p: &PolytopeSummary) {
    row(out, "polytope", p.name.as_deref().unwrap_or("(spec file)"));
    row(out, "dimension", p.dim.to_string());
    row(out, "volume", fmt_value(&p.volume));
    row(out, "boundary measure", fmt_value(&p.boundary_measure));
    let verts: Vec<String> = p.vertices.iter().map(|x| format!("({})", x.join(", "))).collect();
    row(out, "vertices", verts.join(" "));
    row(out, "facets", p.facet_count.to_string());
    if p.dropped_halfspaces > 0 {
        row(out, "redundant half-spaces", p.dropped_halfspaces.to_string());
    }
    row(out, "delzant", p.delzant.to_string());
    row(out, "origin interior", p.origin_interior.to_string());
}

fn degeneration_rows(out: &mut String, d: &DegenerationEntry) {
    row(out, "u", &d.expression);
    row(out, "  active pieces", d.active_pieces.to_string());
    row(out, "  trivial", d.trivial.to_string());
    row(out, "  destabilizing", d.destabilizing.to_string());
    row(out, "  L(u)", fmt_value(&d.l_value));
    row(out, "  relative Futaki", fmt_value(&d.rel_futaki));
    row(out, "  Futaki of alpha", fmt_value(&d.gen_futaki_alpha));
    row(out, "  Futaki of beta", fmt_value(&d.gen_futaki_beta));
    row(out, "  (alpha, beta)", fmt_value(&d.ip_ab));
    row(out, "  (beta, beta)", fmt_value(&d.ip_bb));
}

fn scan_rows(out: &mut String, s: &ScanEntry) {
    row(out, "lambda* estimate", format!("{}  [{}]", fmt_value(&s.lambda_star_estimate), s.label));
    row(out, "worst u", &s.worst_u);
    row(out, "  L(worst u)", fmt_value(&s.worst_l));
    row(out, "  boundary integral", fmt_value(&s.worst_boundary));
    row(out, "destabilizer found", s.destabilizer_found.to_string());
    row(out, "Rbar + theta >= 0", s.hypothesis_holds.to_string());
    row(
        out,
        "grid",
        format!("{} directions x {} offsets, {} refine rounds", s.direction_count, s.offset_count, s.refine_rounds),
    );
    row(out, "candidates", format!("{} screened, {} exact", s.candidates, s.exact_evaluations));
}

fn provenance_rows(out: &mut String, p: &Provenance) {
    row(out, "tool", format!("{} {}", p.tool, p.version));
    row(out, "input sha256", &p.input_sha256);
}

impl Table for StabilityReport {
    fn table(&self) -> String {
        let mut out = String::new();
        polytope_rows(&mut out, &self.polytope);
        row(&mut out, "Rbar", fmt_value(&self.rbar));
        row(&mut out, "centering c", fmt_vector(&self.centering));
        row(&mut out, "Futaki vector b", fmt_vector(&self.futaki));
        row(&mut out, "extremal a", fmt_vector(&self.extremal));
        row(&mut out, "theta range", format!("[{}, {}]", self.theta_min.exact, self.theta_max.exact));
        row(&mut out, "|theta|", fmt_value(&self.theta_norm));
        for c in &self.conditions {
            let verdict = if c.holds { "holds" } else { "FAILS" };
            row(&mut out, &format!("condition {}", c.name), format!("{verdict}, margin {}", fmt_value(&c.margin)));
        }
        for d in &self.degenerations {
            degeneration_rows(&mut out, d);
        }
        if let Some(s) = &self.scan {
            scan_rows(&mut out, s);
        }
        provenance_rows(&mut out, &self.provenance);
        out
    }
}

impl Table for LfunReport {
    fn table(&self) -> String {
        let mut out = String::new();
        polytope_rows(&mut out, &self.polytope);
        row(&mut out, "u", &self.expression);
        row(&mut out, "active pieces", self.active_pieces.to_string());
        row(&mut out, "affine", self.affine.to_string());
        row(&mut out, "L(u)", fmt_value(&self.l_boundary_form));
        if let Some(c) = &self.l_cone_form {
            row(&mut out, "L(u), cone form", fmt_value(c));
        }
        if let Some(c) = &self.cone_lower_bound {
            row(&mut out, "cone lower bound", fmt_value(c));
        }
        row(&mut out, "boundary integral", fmt_value(&self.boundary_integral));
        if let Some(r) = &self.ratio {
            row(&mut out, "L(u) / boundary integral", fmt_value(r));
        }
        provenance_rows(&mut out, &self.provenance);
        out
    }
}

impl Table for RelativeFutakiReport {
    fn table(&self) -> String {
        let mut out = String::new();
        polytope_rows(&mut out, &self.polytope);
        row(&mut out, "extremal a", fmt_vector(&self.extremal));
        degeneration_rows(&mut out, &self.degeneration);
        provenance_rows(&mut out, &self.provenance);
        out
    }
}

impl Table for EhrhartReport {
    fn table(&self) -> String {
        let mut out = String::new();
        polytope_rows(&mut out, &self.polytope);
        row(&mut out, "phi", &self.expression);
        row(&mut out, "k", self.k.to_string());
        row(&mut out, "lattice points", self.lattice_points.to_string());
        row(&mut out, "lattice sum", fmt_value(&self.lattice_sum));
        row(&mut out, "residual", fmt_value(&self.residual));
        row(&mut out, "lattice (alpha, beta)", fmt_value(&self.lattice_inner_product));
        row(&mut out, "continuum (alpha, beta)", fmt_value(&self.continuum_inner_product));
        provenance_rows(&mut out, &self.provenance);
        out
    }
}

impl Table for ScanReport {
    fn table(&self) -> String {
        let mut out = String::new();
        polytope_rows(&mut out, &self.polytope);
        scan_rows(&mut out, &self.scan);
        provenance_rows(&mut out, &self.provenance);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog, cp2, cp2_2blowup};
    use crate::pl::make_pl;
    use crate::spec::parse_pl;

    fn opts(name: &str) -> AnalyzeOptions<'_> {
        AnalyzeOptions { name: Some(name), degenerations: Vec::new(), scan: None }
    }

    #[test]
    fn pentagon_report() {
        let r = analyze(&cp2_2blowup(), opts("cp2_2blowup"), "catalog:cp2_2blowup").unwrap();
        assert_eq!(r.extremal[0].exact, "-168/409");
        assert_eq!(r.centering[0].exact, "2/21");
        let c02 = r.conditions.iter().find(|c| c.name == Condition::C02).unwrap();
        assert!(c02.holds);
        assert_eq!(c02.margin.exact, "105/409");
        assert!(r.all_clear());
        let names: Vec<Condition> = r.conditions.iter().map(|c| c.name).collect();
        assert_eq!(names, vec![Condition::C02, Condition::C02Prime, Condition::C43]);
        assert!(r.table().contains("-168/409"));
    }

    #[test]
    fn hexagon_report_includes_window_condition() {
        let r = analyze(&catalog("hexagon(2,3)").unwrap(), opts("hexagon(2,3)"), "x").unwrap();
        assert!(r.conditions.iter().any(|c| c.name == Condition::C61 && c.holds));
        assert!(r.conditions.iter().any(|c| c.name == Condition::C04));
    }

    #[test]
    fn reports_are_deterministic() {
        let a = serde_json::to_string(&analyze(&cp2(), opts("cp2"), "catalog:cp2").unwrap()).unwrap();
        let b = serde_json::to_string(&analyze(&cp2(), opts("cp2"), "catalog:cp2").unwrap()).unwrap();
        assert_eq!(a, b);
        let c = serde_json::to_string(&analyze(&cp2(), opts("cp2"), "catalog:cp1xcp1").unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn provenance_hash_is_sha256() {
        assert_eq!(
            Provenance::for_input("abc").input_sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn spot_reports() {
        let tri = cp2();
        let u = make_pl(parse_pl("max(0, x1)", 2).unwrap(), &tri).unwrap();
        let rf = relative_futaki_report(&tri, Some("cp2"), "max(0, x1)", &u, "x").unwrap();
        assert_eq!(rf.degeneration.rel_futaki.exact, "-4/27");
        assert!(!rf.degeneration.destabilizing);
        let lf = lfun(&tri, Some("cp2"), "max(0, x1)", &u, "x").unwrap();
        assert_eq!(lf.l_boundary_form.exact, "4/3");
        assert_eq!(lf.l_cone_form.unwrap().exact, "4/3");
        assert_eq!(lf.ratio.unwrap().exact, "1/3");
        let sq = catalog("cp1xcp1").unwrap();
        let phi = make_pl(parse_pl("max(0, x1)", 2).unwrap(), &sq).unwrap();
        let eh = ehrhart(&sq, None, "max(0, x1)", &phi, 10, "x").unwrap();
        assert_eq!(eh.residual.exact, "1/2");
        assert_eq!(eh.lattice_points, 441);
    }
}
