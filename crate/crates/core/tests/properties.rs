mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use semiclass::expr::parse;
use semiclass::phases::rotate_full;
use semiclass::symbol::pauli_matrix;
use semiclass::{presets, Branch, Error, PauliSymbol};

/// Presets with a box of admissible sample points.
fn sampled_presets() -> Vec<(PauliSymbol, (f64, f64), (f64, f64))> {
    vec![
        (presets::simple_dirac(), (-3.0, 3.0), (-3.0, 3.0)),
        (presets::jackiw_rebbi(1.0), (-3.0, 3.0), (-3.0, 3.0)),
        (presets::rw_example(), (-2.0, 2.0), (-2.0, 2.0)),
        (presets::timmel_mele_low(0.3), (0.0, 1.0), (-2.0, 2.0)),
        (presets::timmel_mele_tb(), (0.0, 1.0), (0.0, 1.0)),
        (presets::radial_dirac(1.0, "1/x", "0.5*x", "1 + x^2").unwrap(), (0.2, 4.0), (-3.0, 3.0)),
    ]
}

fn for_each_point(cases: u32, check: impl Fn(&PauliSymbol, f64, f64) -> Result<(), TestCaseError>) {
    for (sym, xr, xir) in sampled_presets() {
        let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
        runner
            .run(&(xr.0..xr.1, xir.0..xir.1), |(x, xi)| {
                let norm = sym.norm_p(x, xi).unwrap();
                let p = sym.p_values(x, xi).unwrap();
                // stay away from crossings and from the poles of the sphere
                prop_assume!(norm > 1e-3 && p[1].hypot(p[2]) > 1e-3 * norm);
                check(&sym, x, xi)
            })
            .unwrap_or_else(|e| panic!("{}: {e}", sym.name));
    }
}

#[test]
fn eigenvectors_solve_the_principal_symbol() {
    for_each_point(1000, |sym, x, xi| {
        let h0 = pauli_matrix(sym.p_values(x, xi).unwrap());
        for b in [Branch::Plus, Branch::Minus] {
            let u = sym.eigenvector(b, x, xi).unwrap();
            let mu = sym.eigenvalue(b, x, xi).unwrap();
            let r0 = h0[0][0] * u[0] + h0[0][1] * u[1] - u[0] * mu;
            let r1 = h0[1][0] * u[0] + h0[1][1] * u[1] - u[1] * mu;
            let res = (r0.norm_sqr() + r1.norm_sqr()).sqrt();
            prop_assert!(res < 1e-9 * mu.abs().max(1.0), "residual {res} at ({x}, {xi})");
        }
        Ok(())
    });
}

#[test]
fn eigenvectors_are_orthonormal() {
    for_each_point(300, |sym, x, xi| {
        let up = sym.eigenvector(Branch::Plus, x, xi).unwrap();
        let um = sym.eigenvector(Branch::Minus, x, xi).unwrap();
        let dot = up[0] * um[0].conj() + up[1] * um[1].conj();
        prop_assert!(dot.norm() < 1e-12);
        for u in [up, um] {
            prop_assert!(((u[0].norm_sqr() + u[1].norm_sqr()).sqrt() - 1.0).abs() < 1e-12);
        }
        Ok(())
    });
}

#[test]
fn spherical_angles_reconstruct_p() {
    for_each_point(300, |sym, x, xi| {
        let p = sym.p_values(x, xi).unwrap();
        let rho = sym.norm_p(x, xi).unwrap();
        let (th, ph) = sym.spherical(x, xi).unwrap();
        let q = [rho * th.sin() * ph.cos(), rho * th.sin() * ph.sin(), rho * th.cos()];
        for i in 0..3 {
            prop_assert!((q[i] - p[i + 1]).abs() < 1e-10 * rho.max(1.0));
        }
        Ok(())
    });
}

#[test]
fn subprincipal_expectation() {
    let sym = PauliSymbol::from_strings(
        "with_h1",
        ["", "xi", "x", "0.3*x^2"],
        ["0.2", "cos(x)", "-xi", "x*xi"],
        semiclass::Domain::Line,
    )
    .unwrap();
    let mut runner = TestRunner::new(Config { cases: 300, failure_persistence: None, ..Config::default() });
    runner
        .run(&(-2.0..2.0f64, -2.0..2.0f64), |(x, xi)| {
            prop_assume!(x.hypot(xi) > 1e-2);
            let h1 = sym.h1_matrix(x, xi).unwrap();
            let pt = sym.local(x, xi).unwrap();
            for b in [Branch::Plus, Branch::Minus] {
                let u = sym.eigenvector(b, x, xi).unwrap();
                let hu = [h1[0][0] * u[0] + h1[0][1] * u[1], h1[1][0] * u[0] + h1[1][1] * u[1]];
                let direct = (hu[0] * u[0].conj() + hu[1] * u[1].conj()).re;
                prop_assert!((direct - pt.h1_expectation(b).unwrap()).abs() < 1e-8);
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn curvature_terms_combine() {
    // mu1' + mu1''' from the inner-product definition against the
    // curvature-density form, on the non-planar preset and a tilted one
    let syms = [
        presets::rw_example(),
        PauliSymbol::from_strings("tilted", ["0.5*x", "x", "xi", "sin(x)*xi"], ["", "", "", ""], semiclass::Domain::Line)
            .unwrap(),
    ];
    for sym in syms {
        let mut runner = TestRunner::new(Config { cases: 200, failure_persistence: None, ..Config::default() });
        runner
            .run(&(-1.5..1.5f64, -1.5..1.5f64), |(x, xi)| {
                prop_assume!(x.hypot(xi) > 0.2);
                let pt = sym.local(x, xi).unwrap();
                for b in [Branch::Plus, Branch::Minus] {
                    let (m1, _, m3) = common::raw_mu1(&sym, b, x, xi, &|_, _| 0.0);
                    let density = pt.rw_density(b).unwrap();
                    prop_assert!((m1 + m3 - density).abs() < 1e-8 * density.abs().max(1.0), "{} {b:?}: {} vs {density}", sym.name, m1 + m3);
                }
                Ok(())
            })
            .unwrap();
    }
}

proptest! {
    #[test]
    fn rotation_flattens_the_plane(
        a in 0.0..PI, b in -PI..PI, s in -3.0..3.0f64, t in -3.0..3.0f64,
    ) {
        let c = [a.sin() * b.cos(), a.sin() * b.sin(), a.cos()];
        // two unit vectors spanning the plane orthogonal to c
        let e1 = if c[2].abs() < 0.9 { [-c[1], c[0], 0.0] } else { [0.0, -c[2], c[1]] };
        let n1 = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
        let e1 = e1.map(|v| v / n1);
        let e2 = [c[1] * e1[2] - c[2] * e1[1], c[2] * e1[0] - c[0] * e1[2], c[0] * e1[1] - c[1] * e1[0]];
        let p = [0, 1, 2].map(|i| s * e1[i] + t * e2[i]);
        let q = rotate_full(c, p);
        let np = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        let nq = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
        prop_assert!(q[2].abs() < 1e-12 * np.max(1.0));
        prop_assert!((nq - np).abs() < 1e-12 * np.max(1.0));
    }
}

type Grad = fn(f64, f64) -> (f64, f64);

/// Expressions with their derivatives worked out by hand.
fn grad_corpus() -> Vec<(&'static str, Grad)> {
    vec![
        ("x^2", |x, _| (2.0 * x, 0.0)),
        ("x*xi", |x, xi| (xi, x)),
        ("tanh(x)", |x, _| (1.0 - x.tanh().powi(2), 0.0)),
        ("sin(x)*cos(xi)", |x, xi| (x.cos() * xi.cos(), -x.sin() * xi.sin())),
        ("x^3 - 2*x*xi^2", |x, xi| (3.0 * x * x - 2.0 * xi * xi, -4.0 * x * xi)),
        ("exp(-x^2)", |x, _| (-2.0 * x * (-x * x).exp(), 0.0)),
        ("1 - cos(2*pi*x)", |x, _| (2.0 * PI * (2.0 * PI * x).sin(), 0.0)),
        ("-sqrt(3)*sin(2*pi*x)", |x, _| (-(3.0f64).sqrt() * 2.0 * PI * (2.0 * PI * x).cos(), 0.0)),
        ("2*cos(2*pi*xi) + 1", |_, xi| (0.0, -4.0 * PI * (2.0 * PI * xi).sin())),
        ("x^2 + xi^2 + x^4", |x, xi| (2.0 * x + 4.0 * x.powi(3), 2.0 * xi)),
        ("sqrt(1 + x^2)", |x, _| (x / (1.0 + x * x).sqrt(), 0.0)),
        ("log(2 + sin(x))", |x, _| (x.cos() / (2.0 + x.sin()), 0.0)),
        ("tanh(x*xi)", |x, xi| ((1.0 - (x * xi).tanh().powi(2)) * xi, (1.0 - (x * xi).tanh().powi(2)) * x)),
        ("atan2(xi, x)", |x, xi| (-xi / (x * x + xi * xi), x / (x * x + xi * xi))),
        ("exp(x) - exp(-xi)", |x, xi| (x.exp(), (-xi).exp())),
        ("x / (1 + xi^2)", |x, xi| (1.0 / (1.0 + xi * xi), -2.0 * x * xi / (1.0 + xi * xi).powi(2))),
        ("(x - xi)^2 * 0.5", |x, xi| (x - xi, xi - x)),
        ("tan(0.3*x)", |x, _| (0.3 / (0.3 * x).cos().powi(2), 0.0)),
        ("abs(x) + 3", |x, _| (x.signum(), 0.0)),
        ("xi*tanh(x) + x^2*xi^3", |x, xi| (xi * (1.0 - x.tanh().powi(2)) + 2.0 * x * xi.powi(3), x.tanh() + 3.0 * x * x * xi * xi)),
        ("sin(x)^2 + cos(x)^2", |_, _| (0.0, 0.0)),
        ("exp(x)*cos(xi)", |x, xi| (x.exp() * xi.cos(), -x.exp() * xi.sin())),
    ]
}

proptest! {
    #[test]
    fn finite_difference_gradients(x in 0.1..1.2f64, xi in 0.1..1.2f64) {
        for (text, g) in grad_corpus() {
            let e = parse(text).unwrap();
            let (gx, gxi) = e.grad(x, xi, 1.0).unwrap();
            let (ex, exi) = g(x, xi);
            let mag = ex.abs().max(exi.abs()).max(1.0);
            prop_assert!((gx - ex).abs() < 1e-7 * mag, "{text} d/dx {gx} vs {ex}");
            prop_assert!((gxi - exi).abs() < 1e-7 * mag, "{text} d/dxi {gxi} vs {exi}");
        }
    }

    #[test]
    fn parser_never_panics(s in "[ -~]{0,24}") {
        let _ = parse(&s);
    }
}

#[test]
fn malformed_inputs_are_rejected() {
    let corpus = [
        "", " ", "(", ")", "x +", "* x", "sin(", "sin()", "sin(x, xi)", "atan2(x)", "x ** 2", "2x", "x xi", "1..2",
        "y", "foo(x)", "x^", "((x)", "x)", "1e", "sqrt x", ",", "x,", "pi(1)", "3 +* 4",
    ];
    for s in corpus {
        match parse(s) {
            Err(Error::SyntaxError { .. } | Error::UnknownIdentifier { .. }) => {}
            other => panic!("{s:?}: {other:?}"),
        }
    }
}

