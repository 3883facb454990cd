//! Exact results against plain floating-point quadrature that shares no
//! code with the library: midpoint sums on a fine grid for area integrals
//! and a midpoint rule along each edge for `dσ` integrals.

use toric_kstab::catalog::catalog;
use toric_kstab::invariants::{average_scalar_curvature, extremal_field, linear_functional};
use toric_kstab::pl::{make_pl, AffineFunction};
use toric_kstab::{q, Scalar};

/// A polygon `⟨l_i, x⟩ ≤ b_i` with its vertices in counter-clockwise order.
struct Polygon {
    normals: Vec<[f64; 2]>,
    bounds: Vec<f64>,
    vertices: Vec<[f64; 2]>,
}

impl Polygon {
    fn new(normals: &[[i64; 2]], bounds: &[f64], vertices: &[[f64; 2]]) -> Self {
        Self {
            normals: normals.iter().map(|n| [n[0] as f64, n[1] as f64]).collect(),
            bounds: bounds.to_vec(),
            vertices: vertices.to_vec(),
        }
    }

    fn inside(&self, x: f64, y: f64) -> bool {
        self.normals.iter().zip(&self.bounds).all(|(n, b)| n[0] * x + n[1] * y <= *b)
    }

    /// `∫_P f dx` by midpoint sums over an `m × m` grid of the bounding box.
    fn area_integral(&self, m: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
        let (x0, x1) = self.vertices.iter().fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(v[0]), b.max(v[0])));
        let (y0, y1) = self.vertices.iter().fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(v[1]), b.max(v[1])));
        let (hx, hy) = ((x1 - x0) / m as f64, (y1 - y0) / m as f64);
        let mut total = 0.0;
        for i in 0..m {
            let x = x0 + (i as f64 + 0.5) * hx;
            for j in 0..m {
                let y = y0 + (j as f64 + 0.5) * hy;
                if self.inside(x, y) {
                    total += f(x, y);
                }
            }
        }
        total * hx * hy
    }

    /// `∫_{∂P} f dσ`: on an edge with primitive normal `l`, `dσ = ds / |l|`.
    fn boundary_integral(&self, steps: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
        let k = self.vertices.len();
        let mut total = 0.0;
        for i in 0..k {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % k]);
            let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            let n = self
                .normals
                .iter()
                .zip(&self.bounds)
                .find(|(n, c)| (n[0] * mid[0] + n[1] * mid[1] - *c).abs() < 1e-12)
                .expect("edge lies on a facet")
                .0;
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            let scale = len / (n[0] * n[0] + n[1] * n[1]).sqrt() / steps as f64;
            for s in 0..steps {
                let t = (s as f64 + 0.5) / steps as f64;
                total += f(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])) * scale;
            }
        }
        total
    }
}

fn pentagon() -> Polygon {
    Polygon::new(
        &[[1, 0], [0, 1], [-1, 0], [0, -1], [1, 1]],
        &[1.0; 5],
        &[[-1.0, -1.0], [1.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 1.0]],
    )
}

fn quadrilateral() -> Polygon {
    Polygon::new(
        &[[-1, -1], [-1, 0], [0, -1], [1, 1]],
        &[1.0; 4],
        &[[-1.0, 0.0], [0.0, -1.0], [2.0, -1.0], [-1.0, 2.0]],
    )
}

/// Extremal coefficients from quadrature: centre, then solve `M a = b`.
fn quadrature_extremal(p: &Polygon) -> [f64; 2] {
    const M: usize = 1200;
    let vol = p.area_integral(M, |_, _| 1.0);
    let c = [-p.area_integral(M, |x, _| x) / vol, -p.area_integral(M, |_, y| y) / vol];
    let m11 = p.area_integral(M, |x, _| (x + c[0]).powi(2));
    let m22 = p.area_integral(M, |_, y| (y + c[1]).powi(2));
    let m12 = p.area_integral(M, |x, y| (x + c[0]) * (y + c[1]));
    let b1 = p.boundary_integral(4000, |x, _| x + c[0]);
    let b2 = p.boundary_integral(4000, |_, y| y + c[1]);
    let det = m11 * m22 - m12 * m12;
    [(b1 * m22 - b2 * m12) / det, (m11 * b2 - m12 * b1) / det]
}

#[test]
fn pentagon_extremal_coefficients() {
    let exact = extremal_field(&catalog("cp2_2blowup").unwrap()).unwrap();
    let numeric = quadrature_extremal(&pentagon());
    for j in 0..2 {
        assert!((exact.a[j].to_f64() - numeric[j]).abs() < 5e-3, "{numeric:?}");
    }
    assert!((exact.a[0].to_f64() + 168.0 / 409.0).abs() < 1e-15);
}

#[test]
fn quadrilateral_extremal_coefficients() {
    let exact = extremal_field(&catalog("cp2_1blowup").unwrap()).unwrap();
    let numeric = quadrature_extremal(&quadrilateral());
    for j in 0..2 {
        assert!((exact.a[j].to_f64() - numeric[j]).abs() < 5e-3, "{numeric:?}");
    }
    assert_eq!(exact.a, vec![q(6, 11), q(6, 11)]);
}

#[test]
fn average_scalar_curvature_by_quadrature() {
    for (name, poly) in [("cp2_2blowup", pentagon()), ("cp2_1blowup", quadrilateral())] {
        let numeric = poly.boundary_integral(1000, |_, _| 1.0) / poly.area_integral(1000, |_, _| 1.0);
        let exact = average_scalar_curvature(&catalog(name).unwrap()).to_f64();
        assert!((numeric - exact).abs() < 1e-2, "{name}: {numeric} vs {exact}");
    }
}

#[test]
fn l_of_a_simple_function_by_quadrature() {
    // triangle x1 ≥ −1, x2 ≥ −1, x1 + x2 ≤ 1 with u = max{0, x1}; θ_X = 0, R̄ = 2
    let tri = Polygon::new(&[[-1, 0], [0, -1], [1, 1]], &[1.0; 3], &[[-1.0, -1.0], [2.0, -1.0], [-1.0, 2.0]]);
    let u = |x: f64, _: f64| x.max(0.0);
    let numeric = tri.boundary_integral(20000, u) - 2.0 * tri.area_integral(1500, u);
    let p = catalog("cp2").unwrap();
    let e = extremal_field(&p).unwrap();
    let pl = make_pl(vec![AffineFunction::constant(2, q(0, 1)), AffineFunction::coordinate(2, 0)], &p).unwrap();
    let exact = linear_functional(&p, &pl, &e);
    assert_eq!(exact, q(4, 3));
    assert!((numeric - 4.0 / 3.0).abs() < 1e-2, "{numeric}");
}

#[test]
fn pentagon_l_with_extremal_weight_by_quadrature() {
    let p = catalog("cp2_2blowup").unwrap();
    let e = extremal_field(&p).unwrap();
    let a = e.a[0].to_f64();
    let c = e.c[0].to_f64();
    let theta = move |x: f64, y: f64| a * (x + c) + a * (y + c);
    let u = |x: f64, y: f64| 0.0f64.max(x - 0.5 * y).max(y - 0.25);
    let poly = pentagon();
    let numeric = poly.boundary_integral(20000, u) - poly.area_integral(1500, |x, y| (2.0 + theta(x, y)) * u(x, y));
    let pieces = vec![
        AffineFunction::constant(2, q(0, 1)),
        AffineFunction::new(vec![q(1, 1), q(-1, 2)], q(0, 1)),
        AffineFunction::new(vec![q(0, 1), q(1, 1)], q(-1, 4)),
    ];
    let exact = linear_functional(&p, &make_pl(pieces, &p).unwrap(), &e).to_f64();
    assert!((numeric - exact).abs() < 1e-2, "{numeric} vs {exact}");
    assert!(exact > 0.0);
}
