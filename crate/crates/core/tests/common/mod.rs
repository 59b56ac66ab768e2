//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use quadrature::double_exponential;
use semiclass::curve::LevelCurve;
use semiclass::symbol::{eigenvector_from_angles, pauli_matrix};
use semiclass::{Branch, PauliSymbol, Region};

type C2 = [Complex64; 2];

fn inner(a: &C2, b: &C2) -> Complex64 {
    // <a, b> linear in the first slot
    a[0] * b[0].conj() + a[1] * b[1].conj()
}

fn matvec(m: &[[Complex64; 2]; 2], v: &C2) -> C2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn sub(a: &C2, b: &C2) -> C2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn scale(a: &C2, s: Complex64) -> C2 {
    [a[0] * s, a[1] * s]
}

/// Eigenvector `e^{i eta} u` built from the spherical angles at a point.
pub fn gauged_vector(sym: &PauliSymbol, branch: Branch, x: f64, xi: f64, eta: &dyn Fn(f64, f64) -> f64) -> C2 {
    let (th, ph) = sym.spherical(x, xi).unwrap();
    let u = eigenvector_from_angles(branch, th, ph);
    scale(&u, Complex64::from_polar(1.0, eta(x, xi)))
}

/// `(mu1', mu1'', mu1''')` from the inner-product definition
/// `1/(2i) <{H0 - mu, e}, e> + 1/i <{mu, e}, e> + mu Im <e_x, e_xi>`,
/// with all derivatives taken by fourth-order central differences.
pub fn raw_mu1(
    sym: &PauliSymbol,
    branch: Branch,
    x: f64,
    xi: f64,
    eta: &dyn Fn(f64, f64) -> f64,
) -> (f64, f64, f64) {
    let d = 1e-3;
    // fourth-order central differences
    let stencil = |f: &dyn Fn(f64) -> Complex64| -> Complex64 {
        ((f(d) - f(-d)) * 8.0 - (f(2.0 * d) - f(-2.0 * d))) / (12.0 * d)
    };
    let e = |x: f64, xi: f64| gauged_vector(sym, branch, x, xi, eta);
    let h0 = |x: f64, xi: f64| pauli_matrix(sym.p_values(x, xi).unwrap());
    let mu = |x: f64, xi: f64| Complex64::new(sym.eigenvalue(branch, x, xi).unwrap(), 0.0);
    let e0 = e(x, xi);
    let ex: C2 = [0, 1].map(|k| stencil(&|s| e(x + s, xi)[k]));
    let exi: C2 = [0, 1].map(|k| stencil(&|s| e(x, xi + s)[k]));
    let m0 = sym.eigenvalue(branch, x, xi).unwrap();
    let mux = stencil(&|s| mu(x + s, xi)).re;
    let muxi = stencil(&|s| mu(x, xi + s)).re;
    let hx = {
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = stencil(&|s| h0(x + s, xi)[i][j]) - if i == j { mux } else { 0.0 };
            }
        }
        m
    };
    let hxi = {
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = stencil(&|s| h0(x, xi + s)[i][j]) - if i == j { muxi } else { 0.0 };
            }
        }
        m
    };
    // {A, e} = A_xi e_x - A_x e_xi
    let br_h = sub(&matvec(&hxi, &ex), &matvec(&hx, &exi));
    let br_mu = sub(&scale(&ex, Complex64::new(muxi, 0.0)), &scale(&exi, Complex64::new(mux, 0.0)));
    let i = Complex64::new(0.0, 1.0);
    let m1 = inner(&br_h, &e0) / (2.0 * i);
    let m2 = inner(&br_mu, &e0) / i;
    let m3 = m0 * inner(&ex, &exi).im;
    (m1.re, m2.re, m3)
}

/// `sum w_j f(x_j, xi_j)` with the curve's own quadrature weights.
pub fn curve_integral(curve: &LevelCurve, f: impl Fn(f64, f64) -> f64) -> f64 {
    let w = curve.weights();
    curve.samples.iter().zip(&w).map(|(s, w)| w * f(s.x, s.xi)).sum()
}

/// Area of the region enclosed by `{mu = E}` around `center`, from the polar
/// form `1/2 int r(phi)^2 dphi`. The boundary radius along each ray is found
/// by bisection; the region must be star-shaped about `center`.
pub fn polar_area(sym: &PauliSymbol, branch: Branch, energy: f64, region: Region, center: (f64, f64), r_max: f64) -> f64 {
    let inside = |x: f64, xi: f64| {
        let m = sym.eigenvalue(branch, x, xi).unwrap();
        match region {
            Region::Well => m < energy,
            Region::Barrier => m > energy,
        }
    };
    assert!(inside(center.0, center.1), "center must lie inside the region");
    let radius = |phi: f64| {
        let (c, s) = (phi.cos(), phi.sin());
        let steps = 4000;
        let dr = r_max / steps as f64;
        let mut lo = 0.0;
        let mut hi = None;
        for k in 1..=steps {
            let r = k as f64 * dr;
            if !inside(center.0 + r * c, center.1 + r * s) {
                hi = Some(r);
                break;
            }
            lo = r;
        }
        let mut hi = hi.expect("boundary within r_max");
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if inside(center.0 + mid * c, center.1 + mid * s) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let n = 2048;
    let sum: f64 = (0..n).map(|k| radius(2.0 * PI * k as f64 / n as f64).powi(2)).sum();
    0.5 * sum * 2.0 * PI / n as f64
}

/// Turning point of `x^2 + x^4 = E^2`.
pub fn turning_point(e: f64) -> f64 {
    ((-1.0 + (1.0 + 4.0 * e * e).sqrt()) / 2.0).sqrt()
}

/// `int_0^x0 g(x) / sqrt(E^2 - x^2 - x^4) dx` with `x = x0 sin s`, which
/// removes the inverse square root at the turning point.
fn turning_point_integral(e: f64, g: impl Fn(f64) -> f64) -> f64 {
    let x0 = turning_point(e);
    let f = |s: f64| {
        let x = x0 * s.sin();
        // E^2 - x^2 - x^4 = (x0^2 - x^2)(1 + x0^2 + x^2)
        g(x) / (1.0 + x0 * x0 + x * x).sqrt()
    };
    double_exponential::integrate(f, 0.0, 0.5 * PI, 1e-13).integral
}

/// `(3/E) int_0^x0 x^2 / sqrt(E^2 - x^2 - x^4) dx` for `P = (x, xi, x^2)`.
pub fn rw_reference(e: f64) -> f64 {
    3.0 / e * turning_point_integral(e, |x| x * x)
}

/// `-2 int_0^x0 (E^2 + x^4) / (E (E + x^2) sqrt(E^2 - x^2 - x^4)) dx`.
pub fn berry_reference(e: f64) -> f64 {
    -2.0 * turning_point_integral(e, |x| (e * e + x.powi(4)) / (e * (e + x * x)))
}

/// Wraps an angle difference into `(-pi, pi]`.
pub fn wrap(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// One closed level curve per preset: symbol, branch, energy and a point
/// inside the enclosed region from which it is star-shaped.
pub struct Case {
    pub name: &'static str,
    pub sym: PauliSymbol,
    pub branch: Branch,
    pub energy: f64,
    pub center: (f64, f64),
    pub r_max: f64,
}

pub fn cases() -> Vec<Case> {
    use semiclass::presets::*;
    vec![
        Case { name: "simple_dirac", sym: simple_dirac(), branch: Branch::Plus, energy: 1.0, center: (0.0, 0.0), r_max: 3.0 },
        Case { name: "jackiw_rebbi", sym: jackiw_rebbi(1.0), branch: Branch::Plus, energy: 0.5, center: (0.0, 0.0), r_max: 3.0 },
        Case { name: "rw_example", sym: rw_example(), branch: Branch::Plus, energy: 1.0, center: (0.0, 0.0), r_max: 3.0 },
        Case {
            name: "timmel_mele_low",
            sym: timmel_mele_low(0.0),
            branch: Branch::Minus,
            energy: 0.1,
            center: (0.5, 0.0),
            r_max: 3.0,
        },
        Case {
            name: "timmel_mele_tb",
            sym: timmel_mele_tb(),
            branch: Branch::Minus,
            energy: 0.0,
            center: (0.5, 0.5),
            r_max: 0.5,
        },
        Case {
            name: "radial_dirac",
            sym: radial_dirac(1.0, "", "", "1 + x^2").unwrap(),
            branch: Branch::Plus,
            energy: 3.0,
            center: (0.8, 0.0),
            r_max: 4.0,
        },
    ]
}
