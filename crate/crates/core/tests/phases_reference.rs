//! Phase integrals against independent references: 1-D reductions for
//! `P = (x, xi, x^2)`, the inner-product form of `mu1`, and gauge changes.

mod common;

use std::f64::consts::PI;

use semiclass::curve::{trace, TraceOptions};
use semiclass::phases::{assemble_with, berry_phase, rw_phase, PhaseMode};
use semiclass::presets::{rw_example, simple_dirac};
use semiclass::Branch;

#[test]
fn rw_example_matches_turning_point_integrals() {
    let sym = rw_example();
    for e in [0.5, 1.0, 1.5] {
        let c = trace(&sym, Branch::Plus, e, &TraceOptions::default()).unwrap();
        let rw = rw_phase(&sym, Branch::Plus, &c).unwrap();
        let b = berry_phase(&sym, Branch::Plus, &c).unwrap();
        assert!((rw - common::rw_reference(e)).abs() < 1e-4, "E={e}: {rw} vs {}", common::rw_reference(e));
        assert!((b - common::berry_reference(e)).abs() < 1e-4, "E={e}: {b} vs {}", common::berry_reference(e));
    }
}

#[test]
fn closed_forms_match_inner_product_definition() {
    let sym = rw_example();
    for &(x, xi) in &[(0.3, 0.4), (-0.5, 0.2), (0.7, -0.6), (0.1, 0.9), (-1.2, -0.3)] {
        for br in [Branch::Plus, Branch::Minus] {
            let (a, b, c) = common::raw_mu1(&sym, br, x, xi, &|_, _| 0.0);
            let f = sym.local(x, xi).unwrap().f1_parts(br).unwrap();
            assert!((a - f.mu1_a).abs() < 1e-8, "mu1' at ({x}, {xi})");
            assert!((b - f.mu1_b).abs() < 1e-8, "mu1'' at ({x}, {xi})");
            assert!((c - f.mu1_c).abs() < 1e-8, "mu1''' at ({x}, {xi})");
        }
    }
}

#[test]
fn dirac_mu1_is_half_inverse_energy() {
    let sym = simple_dirac();
    // at (0, 1): lambda = 1, mu1 = 1/(2 lambda)
    assert!((sym.f1_integrand(Branch::Plus, 0.0, 1.0).unwrap() - 0.5).abs() < 1e-8);
    let c = trace(&sym, Branch::Plus, 1.0, &TraceOptions::default()).unwrap();
    let i = common::curve_integral(&c, |x, xi| sym.f1_integrand(Branch::Plus, x, xi).unwrap());
    assert!((i - PI).abs() < 1e-4);
}

#[test]
fn gauge_change_shifts_berry_phase_by_whole_turns() {
    let sym = rw_example();
    let c = trace(&sym, Branch::Plus, 1.0, &TraceOptions::default()).unwrap();
    let base = |eta: &dyn Fn(f64, f64) -> f64| {
        let mut tb = 0.0;
        let mut trw = 0.0;
        let w = c.weights();
        for (s, w) in c.samples.iter().zip(&w) {
            let (a, b, cc) = common::raw_mu1(&sym, Branch::Plus, s.x, s.xi, eta);
            tb += w * b;
            trw += w * (a + cc);
        }
        (tb, trw)
    };
    let (b0, rw0) = base(&|_, _| 0.0);
    let lib = assemble_with(&sym, Branch::Plus, &c, PhaseMode::Generic).unwrap();
    assert!((b0 - lib.theta_b).abs() < 1e-6);
    assert!((rw0 - lib.theta_rw).abs() < 1e-6);
    let eta = |x: f64, xi: f64| x.sin() * xi.cos() + 2.0 * xi.atan2(x);
    let (b1, rw1) = base(&eta);
    let turns = (b1 - b0) / (2.0 * PI);
    assert!((turns - turns.round()).abs() * 2.0 * PI < 1e-4, "shift {}", b1 - b0);
    assert_eq!(turns.round().abs(), 2.0);
    assert!((rw1 - rw0).abs() < 1e-6);
}
