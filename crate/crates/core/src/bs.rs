//! Bohr-Sommerfeld quantization: `S_eff(E) = 2 pi k h`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curve::{trace, Region, TraceOptions};
use crate::error::{Error, Result};
use crate::phases::{assemble_with, reduce_s1, PhaseMode};
use crate::symbol::{Branch, PauliSymbol};

#[derive(Debug, Clone)]
pub struct GridOptions {
    /// Uniform starting grid size.
    pub initial: usize,
    /// Tolerance on the interpolation error of `S0` (relative to `max(1, |S0|)`)
    /// and of `h S1` (absolute).
    pub tol: f64,
    pub max_nodes: usize,
    /// Energy where the curve shrinks to a point; adds the node `S0 = 0` there.
    pub well_bottom: Option<f64>,
    pub trace: TraceOptions,
    pub phase_mode: PhaseMode,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            initial: 9,
            tol: 1e-8,
            max_nodes: 2000,
            well_bottom: None,
            trace: TraceOptions::default(),
            phase_mode: PhaseMode::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionNode {
    pub energy: f64,
    pub s0: f64,
    /// `dS0/dE`, the period of the orbit.
    pub period_t: f64,
    /// `S1` made continuous along the grid.
    pub s1: f64,
    pub s1_raw: f64,
    pub synthetic: bool,
}

#[derive(Debug, Clone)]
pub struct ActionFunction {
    pub branch: Branch,
    pub window: (f64, f64),
    pub order: u8,
    pub h: f64,
    pub region: Region,
    pub nodes: Vec<ActionNode>,
    /// Largest interpolation error seen at the verification probes.
    pub max_probe_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub k: i64,
    pub e_pred: f64,
    pub order: u8,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub h: f64,
    pub branch: Branch,
    pub window: (f64, f64),
    pub rows: Vec<SpectrumRow>,
}

struct Probe {
    s0: f64,
    t: f64,
    s1_raw: f64,
    region: Region,
}

fn probe(sym: &PauliSymbol, branch: Branch, e: f64, opts: &GridOptions, order: u8) -> Result<Probe> {
    let c = trace(sym, branch, e, &opts.trace)?;
    if order == 0 {
        let (s0, _) = crate::curve::action_s0_err(&c);
        return Ok(Probe { s0, t: c.period_t, s1_raw: 0.0, region: c.region });
    }
    let r = assemble_with(sym, branch, &c, opts.phase_mode)?;
    Ok(Probe { s0: r.s0, t: r.period_t, s1_raw: r.s1_raw, region: r.region })
}

fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

/// Cubic Hermite on `[x0, x1]`: value and derivative at `x`.
fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> (f64, f64) {
    let w = x1 - x0;
    let s = (x - x0) / w;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let v = h00 * y0 + h10 * w * d0 + h01 * y1 + h11 * w * d1;
    let dh00 = (6.0 * s2 - 6.0 * s) / w;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = (-6.0 * s2 + 6.0 * s) / w;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let d = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
    (v, d)
}

impl ActionFunction {
    pub fn build(
        sym: &PauliSymbol,
        branch: Branch,
        window: (f64, f64),
        h: f64,
        order: u8,
        opts: &GridOptions,
    ) -> Result<ActionFunction> {
        if order > 1 {
            return Err(Error::InvalidArgument("order must be 0 or 1".into()));
        }
        let (lo, hi) = window;
        if !(hi > lo) {
            return Err(Error::InvalidArgument(format!("empty window [{lo}, {hi}]")));
        }
        let n = opts.initial.max(3);
        let mut raw: Vec<(f64, Probe)> = Vec::new();
        let mut region = None;
        let start = usize::from(opts.well_bottom.is_some());
        for i in start..n {
            let e = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let p = probe(sym, branch, e, opts, order)?;
            if *region.get_or_insert(p.region) != p.region {
                return Err(Error::NonMonotone { energy: e });
            }
            raw.push((e, p));
        }
        let mut af = ActionFunction {
            branch,
            window,
            order,
            h,
            region: region.unwrap(),
            nodes: Vec::new(),
            max_probe_error: 0.0,
        };
        af.rebuild(&raw, opts.well_bottom);

        let min_width = 1e-7 * (hi - lo);
        let mut pending: Vec<(f64, f64, bool)> =
            af.nodes.windows(2).map(|w| (w[0].energy, w[1].energy, w[0].synthetic)).collect();
        while let Some((ea, eb, from_bottom)) = pending.pop() {
            if af.nodes.len() >= opts.max_nodes || eb - ea < min_width {
                continue;
            }
            let mid = 0.5 * (ea + eb);
            if from_bottom && mid - ea < 1e-6 * (hi - lo) {
                continue;
            }
            let p = probe(sym, branch, mid, opts, order)?;
            if p.region != af.region {
                return Err(Error::NonMonotone { energy: mid });
            }
            let (s0_i, _) = af.s0_at(mid);
            let s1_i = af.s1_at(mid).0;
            let s1_true = s1_i + wrap(p.s1_raw - s1_i);
            let e0 = (s0_i - p.s0).abs() / p.s0.abs().max(1.0);
            let e1 = h * (s1_i - s1_true).abs() * f64::from(order);
            let err = e0.max(e1);
            raw.push((mid, p));
            af.rebuild(&raw, opts.well_bottom);
            if err > opts.tol {
                pending.push((ea, mid, from_bottom));
                pending.push((mid, eb, false));
            } else {
                af.max_probe_error = af.max_probe_error.max(err);
            }
        }
        af.check_monotone()?;
        Ok(af)
    }

    fn rebuild(&mut self, raw: &[(f64, Probe)], bottom: Option<f64>) {
        let mut nodes: Vec<ActionNode> = raw
            .iter()
            .map(|(e, p)| ActionNode { energy: *e, s0: p.s0, period_t: p.t, s1: p.s1_raw, s1_raw: p.s1_raw, synthetic: false })
            .collect();
        nodes.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
        let mut prev: Option<f64> = None;
        for nd in nodes.iter_mut() {
            nd.s1 = match prev {
                None => reduce_s1(nd.s1_raw),
                Some(p) => p + wrap(nd.s1_raw - p),
            };
            prev = Some(nd.s1);
        }
        if let Some(eb) = bottom {
            let (a, b) = (nodes[0], nodes[1]);
            let slope = |ya: f64, yb: f64| (yb - ya) / (b.energy - a.energy);
            let t = a.period_t + slope(a.period_t, b.period_t) * (eb - a.energy);
            let s1 = a.s1 + slope(a.s1, b.s1) * (eb - a.energy);
            nodes.insert(
                0,
                ActionNode { energy: eb, s0: 0.0, period_t: t.max(0.0), s1, s1_raw: s1, synthetic: true },
            );
        }
        self.nodes = nodes;
    }

    fn locate(&self, e: f64) -> usize {
        let n = self.nodes.len();
        match self.nodes.binary_search_by(|nd| nd.energy.partial_cmp(&e).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// `(S0, dS0/dE)` from the Hermite interpolant.
    pub fn s0_at(&self, e: f64) -> (f64, f64) {
        let i = self.locate(e);
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        hermite(a.energy, b.energy, a.s0, b.s0, a.period_t, b.period_t, e)
    }

    fn s1_slope(&self, i: usize) -> f64 {
        let n = self.nodes.len();
        let nd = &self.nodes;
        let d = |a: usize, b: usize| (nd[b].s1 - nd[a].s1) / (nd[b].energy - nd[a].energy);
        if n < 3 {
            return d(0, n - 1);
        }
        if i == 0 {
            let (h0, h1) = (nd[1].energy - nd[0].energy, nd[2].energy - nd[1].energy);
            return ((2.0 * h0 + h1) * d(0, 1) - h0 * d(1, 2)) / (h0 + h1);
        }
        if i == n - 1 {
            let (h0, h1) = (nd[n - 2].energy - nd[n - 3].energy, nd[n - 1].energy - nd[n - 2].energy);
            return ((2.0 * h1 + h0) * d(n - 2, n - 1) - h1 * d(n - 3, n - 2)) / (h0 + h1);
        }
        let (h0, h1) = (nd[i].energy - nd[i - 1].energy, nd[i + 1].energy - nd[i].energy);
        (h1 * d(i - 1, i) + h0 * d(i, i + 1)) / (h0 + h1)
    }

    /// `(S1, dS1/dE)` from a cubic Hermite spline with three-point slopes.
    pub fn s1_at(&self, e: f64) -> (f64, f64) {
        if self.nodes.len() < 2 {
            return (self.nodes[0].s1, 0.0);
        }
        let i = self.locate(e);
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        hermite(a.energy, b.energy, a.s1, b.s1, self.s1_slope(i), self.s1_slope(i + 1), e)
    }

    fn sign(&self) -> f64 {
        match self.region {
            Region::Well => 1.0,
            Region::Barrier => -1.0,
        }
    }

    /// `S_eff = +-S0 + h S1 [order 1]` and its derivative.
    pub fn s_eff(&self, e: f64) -> (f64, f64) {
        let (s0, t) = self.s0_at(e);
        let (mut v, mut d) = (self.sign() * s0, self.sign() * t);
        if self.order >= 1 {
            let (s1, ds1) = self.s1_at(e);
            v += self.h * s1;
            d += self.h * ds1;
        }
        (v, d)
    }

    fn check_monotone(&self) -> Result<()> {
        let vals: Vec<f64> = self.nodes.iter().map(|nd| self.s_eff(nd.energy).0).collect();
        let dir = (vals[vals.len() - 1] - vals[0]).signum();
        for (w, nd) in vals.windows(2).zip(&self.nodes) {
            if (w[1] - w[0]) * dir <= 0.0 {
                return Err(Error::NonMonotone { energy: nd.energy });
            }
        }
        for nd in &self.nodes {
            if nd.period_t < 0.0 {
                return Err(Error::NonMonotone { energy: nd.energy });
            }
        }
        Ok(())
    }

    /// Roots of `S_eff(E) = 2 pi k h` for every integer `k` in range.
    pub fn predict_spectrum(&self) -> Result<SpectrumTable> {
        self.check_monotone()?;
        let (lo, hi) = (self.nodes[0].energy, self.nodes[self.nodes.len() - 1].energy);
        let (slo, shi) = (self.s_eff(lo).0, self.s_eff(hi).0);
        let (smin, smax) = (slo.min(shi), slo.max(shi));
        let unit = 2.0 * PI * self.h;
        let kmin = (smin / unit).ceil() as i64;
        let kmax = (smax / unit).floor() as i64;
        let mut rows = Vec::new();
        for k in kmin..=kmax {
            let target = unit * k as f64;
            let f = |e: f64| self.s_eff(e).0 - target;
            let (mut a, mut b) = (lo, hi);
            let (mut fa, _) = (f(a), f(b));
            if fa == 0.0 {
                b = a;
            }
            for _ in 0..200 {
                if b - a <= 1e-15 * a.abs().max(b.abs()).max(1.0) {
                    break;
                }
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if (fm > 0.0) == (fa > 0.0) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            let mut e = 0.5 * (a + b);
            for _ in 0..5 {
                let (v, d) = self.s_eff(e);
                if d == 0.0 || (v - target).abs() < 1e-14 * target.abs().max(1.0) {
                    break;
                }
                let next = e - (v - target) / d;
                if next < lo || next > hi {
                    break;
                }
                e = next;
            }
            let residual = (self.s_eff(e).0 - target).abs();
            rows.push(SpectrumRow { k, e_pred: e, order: self.order, residual });
        }
        rows.sort_by(|a, b| a.e_pred.partial_cmp(&b.e_pred).unwrap());
        Ok(SpectrumTable { h: self.h, branch: self.branch, window: self.window, rows })
    }
}

/// Convenience: build the action and solve in one call.
pub fn predict_spectrum(
    sym: &PauliSymbol,
    branch: Branch,
    window: (f64, f64),
    h: f64,
    order: u8,
    opts: &GridOptions,
) -> Result<SpectrumTable> {
    ActionFunction::build(sym, branch, window, h, order, opts)?.predict_spectrum()
}
