//! The acceptance suite: twelve checks over the catalog polytopes, each
//! reported as one pass/fail line. Random inputs come from a fixed seed.

use std::cmp::Ordering;
use std::fmt;
use std::time::{Duration, Instant};

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{catalog, cp2, cp2_1blowup, cp2_2blowup, hexagon, hexagon_unchecked, CatalogError};
use crate::geometry::Polytope;
use crate::integration::{boundary_integral, ehrhart_residual, integrate_polynomial};
use crate::invariants::{
    average_scalar_curvature, centering_constants, check_condition, extremal_field, linear_functional,
    linear_functional_cone, relative_futaki, Condition, ExtremalData,
};
use crate::pl::{make_pl, AffineFunction, PlFunction};
use crate::report::{analyze, AnalyzeOptions};
use crate::scalar::{fmt_rational, q, Rational, Scalar};
use crate::search::{scan, ScanConfig};

pub const SEED: u64 = 0x5eed_2012;

/// Names of the polytopes swept by the randomized checks.
pub const SWEEP: [&str; 6] = ["cp2", "cp1xcp1", "cp2_1blowup", "cp2_2blowup", "cp2_3blowup", "hexagon(2,3)"];

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "extremal field exactness"),
    (2, "centering exactness"),
    (3, "average scalar curvature"),
    (4, "condition suite"),
    (5, "L vanishes on affine functions"),
    (6, "boundary and cone forms agree"),
    (7, "sign of L on the pentagon"),
    (8, "relative Futaki spot value"),
    (9, "Ehrhart residuals"),
    (10, "inner-product identity"),
    (11, "quadrilateral audit"),
    (12, "scan sanity"),
];

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2}. {}: {} ({:.3} s)", self.id, self.title, self.detail, self.elapsed.as_secs_f64())
    }
}

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn fmt_vec(xs: &[Rational]) -> String {
    format!("({})", xs.iter().map(fmt_rational).collect::<Vec<_>>().join(", "))
}

fn random_rational(rng: &mut ChaCha8Rng, max_numer: i64, max_denom: i64) -> Rational {
    q(rng.gen_range(-max_numer..=max_numer), rng.gen_range(1..=max_denom))
}

/// An affine function with small random rational coefficients.
pub fn random_affine(rng: &mut ChaCha8Rng, dim: usize) -> AffineFunction<Rational> {
    let gradient = (0..dim).map(|_| random_rational(rng, 9, 5)).collect();
    AffineFunction::new(gradient, random_rational(rng, 9, 5))
}

/// `max` of two to four random affine pieces.
pub fn random_convex_pl(rng: &mut ChaCha8Rng, p: &Polytope<Rational>) -> PlFunction<Rational> {
    let count = rng.gen_range(2..=4);
    let pieces = (0..count)
        .map(|_| {
            let gradient = (0..p.dim()).map(|_| random_rational(rng, 6, 4)).collect();
            AffineFunction::new(gradient, random_rational(rng, 3, 4))
        })
        .collect();
    make_pl(pieces, p).expect("pieces match the dimension")
}

type SweepEntry = (&'static str, Polytope<Rational>, ExtremalData<Rational>);

fn sweep() -> Result<Vec<SweepEntry>, String> {
    SWEEP
        .iter()
        .map(|&name| {
            let p = catalog(name).map_err(err)?;
            let e = extremal_field(&p).map_err(err)?;
            Ok((name, p, e))
        })
        .collect()
}

fn timed(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {:.3} s, limit {:.0} s", t.as_secs_f64(), limit.as_secs_f64()))
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let report = analyze(
        &cp2_2blowup(),
        AnalyzeOptions { name: Some("cp2_2blowup"), degenerations: Vec::new(), scan: None },
        "catalog:cp2_2blowup",
    )
    .map_err(err)?;
    timed(Duration::from_secs(1), start)?;
    let a: Vec<&str> = report.extremal.iter().map(|x| x.exact.as_str()).collect();
    ensure(a == ["-168/409", "-168/409"], || format!("a = {a:?}"))?;
    Ok(format!("a = ({}, {})", a[0], a[1]))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let p = cp2_2blowup();
    let c = centering_constants(&p);
    let expected = q(1, 1) / (q(3, 1) * p.volume());
    timed(Duration::from_secs(1), start)?;
    ensure(expected == q(2, 21) && c.iter().all(|x| *x == expected), || format!("c = {}", fmt_vec(&c)))?;
    Ok(format!("c = {} = 1/(3 Vol)", fmt_vec(&c)))
}

fn criterion_3() -> Check {
    for name in ["cp2", "cp1xcp1", "cp2_1blowup", "cp2_2blowup", "cp2_3blowup"] {
        let r = average_scalar_curvature(&catalog(name).map_err(err)?);
        ensure(r == q(2, 1), || format!("Rbar({name}) = {}", fmt_rational(&r)))?;
    }
    let mut seen = Vec::new();
    for (l, m) in [(1, 1), (2, 3), (3, 2), (1, 2)] {
        let (lr, mr) = (q(l, 1), q(m, 1));
        let p = hexagon_unchecked(&lr, &mr).map_err(err)?;
        let formula = q(2, 1) * (mr.clone() + &lr) / (q(4, 1) * &lr * &mr - &mr * &mr - &lr * &lr);
        let r = average_scalar_curvature(&p);
        ensure(r == formula, || format!("hexagon({l},{m}): {} vs {}", fmt_rational(&r), fmt_rational(&formula)))?;
        seen.push(format!("({l},{m}) -> {}", fmt_rational(&r)));
    }
    Ok(format!("Rbar = 2 on the five Fano surfaces; hexagon {}", seen.join(", ")))
}

fn criterion_4() -> Check {
    for name in ["cp2", "cp1xcp1", "cp2_3blowup"] {
        let p = catalog(name).map_err(err)?;
        let e = extremal_field(&p).map_err(err)?;
        ensure(e.is_trivial(), || format!("theta nonzero on {name}"))?;
        let c = check_condition(&p, &e, Condition::C02).map_err(err)?;
        ensure(c.holds, || format!("c02 fails on {name}"))?;
    }
    let pent = cp2_2blowup();
    let e = extremal_field(&pent).map_err(err)?;
    let c02 = check_condition(&pent, &e, Condition::C02).map_err(err)?;
    ensure(c02.holds && c02.margin == q(105, 409), || format!("pentagon c02 margin {}", fmt_rational(&c02.margin)))?;
    for p in [cp2_1blowup(), cp2_2blowup()] {
        let e = extremal_field(&p).map_err(err)?;
        ensure(e.theta_min > q(-2, 1) && e.theta_max < q(1, 1), || {
            format!("theta range [{}, {}]", fmt_rational(&e.theta_min), fmt_rational(&e.theta_max))
        })?;
    }
    for (l, m) in [(2, 3), (3, 2)] {
        let p = hexagon(&q(l, 1), &q(m, 1)).map_err(err)?;
        let e = extremal_field(&p).map_err(err)?;
        let c = check_condition(&p, &e, Condition::C61).map_err(err)?;
        ensure(c.holds, || format!("c61 fails on hexagon({l},{m})"))?;
    }
    let rejected = matches!(hexagon(&q(1, 1), &q(3, 1)), Err(CatalogError::InvalidHexagonParams { .. }));
    ensure(rejected, || "hexagon(1,3) was accepted".into())?;
    Ok("c02 on cp2, cp1xcp1, cp2_3blowup; pentagon margin 105/409; -2 < theta < 1; c61 holds at (2,3), (3,2); (1,3) rejected"
        .into())
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = 0;
    let mut total = 0;
    for (_, p, e) in sweep()? {
        for _ in 0..100 {
            let u = make_pl(vec![random_affine(&mut rng, p.dim())], &p).map_err(err)?;
            total += 1;
            if linear_functional(&p, &u, &e).sign() != Ordering::Equal {
                failures += 1;
            }
        }
    }
    ensure(failures == 0, || format!("{failures} of {total} nonzero"))?;
    Ok(format!("{total} affine functions, 0 failures"))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut total = 0;
    for (name, p, e) in sweep()? {
        for _ in 0..50 {
            let u = random_convex_pl(&mut rng, &p);
            let a = linear_functional(&p, &u, &e);
            let b = linear_functional_cone(&p, &u, &e).map_err(err)?;
            ensure(a == b, || format!("{name}: boundary {} vs cone {}", fmt_rational(&a), fmt_rational(&b)))?;
            total += 1;
        }
    }
    Ok(format!("{total} convex PL functions, exact agreement"))
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let p = cp2_2blowup();
    let e = extremal_field(&p).map_err(err)?;
    let (mut zero, mut nonaffine) = (0, 0);
    for i in 0..200 {
        let u = random_convex_pl(&mut rng, &p);
        let r = relative_futaki(&p, &u, &e);
        match r.l_value.sign() {
            Ordering::Less => return Err(format!("sample {i}: L = {}", fmt_rational(&r.l_value))),
            Ordering::Equal => {
                zero += 1;
                ensure(u.is_affine(), || format!("sample {i}: L = 0 on a non-affine function"))?;
            }
            Ordering::Greater => {}
        }
        if !u.is_affine() {
            nonaffine += 1;
            ensure(r.rel_futaki.sign() == Ordering::Less, || {
                format!("sample {i}: relative Futaki {}", fmt_rational(&r.rel_futaki))
            })?;
        }
    }
    Ok(format!("200 samples, {nonaffine} non-affine with negative relative Futaki, {zero} with L = 0 (all affine)"))
}

fn criterion_8() -> Check {
    let p = cp2();
    let e = extremal_field(&p).map_err(err)?;
    let u = make_pl(vec![AffineFunction::constant(2, q(0, 1)), AffineFunction::coordinate(2, 0)], &p).map_err(err)?;
    let r = relative_futaki(&p, &u, &e);
    ensure(r.rel_futaki == q(-4, 27), || format!("got {}", fmt_rational(&r.rel_futaki)))?;
    Ok(format!("L = {}, relative Futaki = {}", fmt_rational(&r.l_value), fmt_rational(&r.rel_futaki)))
}

fn criterion_9() -> Check {
    let phi_of = |p: &Polytope<Rational>| {
        make_pl(vec![AffineFunction::constant(2, q(0, 1)), AffineFunction::coordinate(2, 0)], p)
    };
    let sq = catalog("cp1xcp1").map_err(err)?;
    let phi = phi_of(&sq).map_err(err)?;
    for k in [10, 25, 50] {
        let r = ehrhart_residual(&sq, &phi, k).map_err(err)?;
        ensure(r == q(1, 2), || format!("square, k = {k}: residual {}", fmt_rational(&r)))?;
    }
    let tri = cp2();
    let phi = phi_of(&tri).map_err(err)?;
    let mut worst = q(0, 1);
    for k in 1..=50 {
        let r = ehrhart_residual(&tri, &phi, k).map_err(err)?.abs();
        if r > worst {
            worst = r;
        }
    }
    ensure(worst <= q(2, 1), || format!("cp2 residual reaches {}", fmt_rational(&worst)))?;
    Ok(format!("square residual 1/2 at k = 10, 25, 50; cp2 max |residual| = {} for k <= 50", fmt_rational(&worst)))
}

fn boundary_and_square(p: &Polytope<Rational>, e: &ExtremalData<Rational>) -> (Rational, Rational) {
    let theta = e.theta.to_polynomial();
    (boundary_integral(p, &theta), integrate_polynomial(p, &(&theta * &theta)))
}

fn criterion_10() -> Check {
    let mut parts = Vec::new();
    for (name, p) in [("cp2_2blowup", cp2_2blowup()), ("cp2_1blowup", cp2_1blowup())] {
        let e = extremal_field(&p).map_err(err)?;
        let (b, s) = boundary_and_square(&p, &e);
        ensure(b == s, || format!("{name}: {} vs {}", fmt_rational(&b), fmt_rational(&s)))?;
        parts.push(format!("{name}: {}", fmt_rational(&b)));
    }
    Ok(parts.join("; "))
}

/// Extremal data for a quadrilateral candidate `a₁ = a₂ = a`.
fn audit_candidate(p: &Polytope<Rational>, c: &[Rational], a: &Rational) -> ExtremalData<Rational> {
    let constant = a.clone() * (c[0].clone() + &c[1]);
    let theta = AffineFunction::new(vec![a.clone(), a.clone()], constant);
    let values: Vec<Rational> = p.vertices().iter().map(|x| theta.evaluate(x)).collect();
    let min = values.iter().min().cloned().expect("vertices");
    let max = values.iter().max().cloned().expect("vertices");
    let norm = if min.abs() > max.abs() { min.abs() } else { max.abs() };
    ExtremalData { c: c.to_vec(), a: vec![a.clone(), a.clone()], theta, theta_min: min, theta_max: max, norm }
}

fn criterion_11() -> Check {
    let p = cp2_1blowup();
    let e = extremal_field(&p).map_err(err)?;
    ensure(e.a == [q(6, 11), q(6, 11)], || format!("computed a = {}", fmt_vec(&e.a)))?;
    let mut parts = Vec::new();
    for (label, a) in [("computed", q(6, 11)), ("reference", q(5, 29))] {
        let cand = audit_candidate(&p, &e.c, &a);
        ensure(cand.theta_min > q(-2, 1) && cand.theta_max < q(1, 1), || format!("{label} a violates -2 < theta < 1"))?;
        let c02 = check_condition(&p, &cand, Condition::C02).map_err(err)?;
        ensure(c02.holds, || format!("{label} a fails c02"))?;
        parts.push(format!(
            "{label} a = {}: theta in [{}, {}], c02 margin {}",
            fmt_rational(&a),
            fmt_rational(&cand.theta_min),
            fmt_rational(&cand.theta_max),
            fmt_rational(&c02.margin)
        ));
    }
    let (b, s) = boundary_and_square(&p, &e);
    ensure(b == s, || "identity fails for the computed a".into())?;
    let (b2, s2) = boundary_and_square(&p, &audit_candidate(&p, &e.c, &q(5, 29)));
    parts.push(format!(
        "identity {} = {} for computed a; reference a gives {} vs {}",
        fmt_rational(&b),
        fmt_rational(&s),
        fmt_rational(&b2),
        fmt_rational(&s2)
    ));
    Ok(parts.join("; "))
}

fn criterion_12() -> Check {
    let start = Instant::now();
    let p = catalog("cp1xcp1").map_err(err)?;
    let e = extremal_field(&p).map_err(err)?;
    let r = scan(&p, &e, &ScanConfig::default()).map_err(err)?;
    timed(Duration::from_secs(10), start)?;
    ensure(r.lambda_star_estimate.sign() == Ordering::Greater, || {
        format!("estimate {}", fmt_rational(&r.lambda_star_estimate))
    })?;
    ensure(!r.destabilizer_found, || "destabilizer reported".into())?;
    Ok(format!(
        "lambda* estimate {} at max(0, {}), {} candidates, no destabilizer",
        fmt_rational(&r.lambda_star_estimate),
        r.worst_u.crease,
        r.candidates
    ))
}

/// Runs criterion `id` (1 to 12).
pub fn run_criterion(id: u8) -> Outcome {
    let (_, title) = CRITERIA[usize::from(id) - 1];
    let start = Instant::now();
    let result = match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        11 => criterion_11(),
        12 => criterion_12(),
        _ => Err(format!("no criterion {id}")),
    };
    let elapsed = start.elapsed();
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Outcome { id, title, passed, detail, elapsed }
}

pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id)).collect()
}
