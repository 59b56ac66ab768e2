use std::f64::consts::PI;

use semiclass::bs::{predict_spectrum, ActionFunction, GridOptions};
use semiclass::{presets, Branch};

#[test]
fn roots_satisfy_the_rule() {
    let cases = [
        (presets::simple_dirac(), Branch::Plus, (0.05, 1.0), 0.01),
        (presets::jackiw_rebbi(1.0), Branch::Plus, (0.05, 0.9), 0.1),
        (presets::rw_example(), Branch::Plus, (0.1, 0.62), 0.01),
        (presets::timmel_mele_tb(), Branch::Minus, (-0.3, 0.3), 0.01),
    ];
    for (sym, branch, window, h) in cases {
        for order in [0, 1] {
            let af = ActionFunction::build(&sym, branch, window, h, order, &GridOptions::default()).unwrap();
            let t = af.predict_spectrum().unwrap();
            assert!(!t.rows.is_empty(), "{}", sym.name);
            for w in t.rows.windows(2) {
                assert!(w[0].e_pred <= w[1].e_pred);
            }
            for r in &t.rows {
                let target = 2.0 * PI * r.k as f64 * h;
                let residual = (af.s_eff(r.e_pred).0 - target).abs();
                assert!(residual < 1e-10 * target.abs().max(1.0), "{} k={} residual {residual:e}", sym.name, r.k);
            }
        }
    }
}

#[test]
fn level_spacing_follows_the_period() {
    let h = 0.01;
    let t = predict_spectrum(&presets::simple_dirac(), Branch::Plus, (0.05, 1.0), h, 0, &GridOptions::default()).unwrap();
    // for the Dirac well the ratio is 1 - 1/(4k) + O(k^-2): within 2% from k = 13
    for w in t.rows.windows(2).filter(|w| w[0].k >= 13) {
        let period = 2.0 * PI * w[0].e_pred;
        let ratio = (w[1].e_pred - w[0].e_pred) * period / (2.0 * PI * h);
        assert!((ratio - 1.0).abs() < 0.02, "k={} ratio {ratio}", w[0].k);
    }
}

#[test]
fn barrier_rule_mirrors_the_well_rule() {
    let d = presets::simple_dirac();
    let opts = GridOptions::default();
    for order in [0, 1] {
        let well = predict_spectrum(&d, Branch::Plus, (0.05, 0.5), 0.01, order, &opts).unwrap();
        let barrier = predict_spectrum(&d.negated(), Branch::Minus, (-0.5, -0.05), 0.01, order, &opts).unwrap();
        assert_eq!(well.rows.len(), barrier.rows.len());
        for (a, b) in well.rows.iter().zip(barrier.rows.iter().rev()) {
            assert!((a.e_pred + b.e_pred).abs() < 1e-8, "{} vs {}", a.e_pred, b.e_pred);
        }
    }
}
