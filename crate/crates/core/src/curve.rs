//! Closed level curves `mu = E` traced along the Hamilton flow.
//!
//! The tracer runs two passes. An adaptive pilot pass walks the curve in
//! arc length (RK4 on the normalized Hamilton field, Newton projection
//! back onto the level set) until it passes the seed again, which fixes
//! the loop length. The final pass repeats the walk with uniform arc
//! length steps so that the periodic trapezoid rule on the samples is
//! spectrally accurate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::{Branch, Local, PauliSymbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Well,
    Barrier,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::Well => "well",
            Region::Barrier => "barrier",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct TraceOptions {
    /// Initial pilot step in arc length; derived from the seed distance when unset.
    pub ds: Option<f64>,
    pub tol_level: Option<f64>,
    pub tol_close: Option<f64>,
    pub max_steps: Option<usize>,
    /// Minimum number of samples in the final pass.
    pub min_samples: Option<usize>,
    /// Seed search start, overriding the symbol's hint.
    pub hint: Option<(f64, f64)>,
    /// Also search along `x = const` lines on the line domain.
    pub vertical_search: bool,
    /// Fail with `PoleOnCurve` if `p1 = p2 = 0` somewhere on the curve.
    pub require_phi: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub xi: f64,
}

#[derive(Debug, Clone)]
pub struct LevelCurve {
    /// `M + 1` samples; the last one closes the loop at `t = period_t`.
    pub samples: Vec<Sample>,
    pub period_t: f64,
    pub energy: f64,
    pub branch: Branch,
    pub region: Region,
    pub h_min_gap: f64,
    pub grad_min: f64,
    /// Loop length in arc length.
    pub length: f64,
    /// `(d mu/dx, d mu/dxi)` at the first `M` samples.
    pub grad: Vec<(f64, f64)>,
    pub ds: f64,
    pub tol_level: f64,
    pub tol_close: f64,
}

/// Everything the stepping needs at one point.
#[derive(Debug, Clone, Copy)]
struct Node {
    x: f64,
    xi: f64,
    mu: f64,
    gx: f64,
    gxi: f64,
    rho: f64,
}

impl Node {
    fn speed(&self) -> f64 {
        self.gx.hypot(self.gxi)
    }

    /// Unit tangent along the Hamilton field `(mu_xi, -mu_x)`.
    fn tangent(&self) -> (f64, f64) {
        let s = self.speed();
        (self.gxi / s, -self.gx / s)
    }
}

struct Tracer<'a> {
    sym: &'a PauliSymbol,
    branch: Branch,
    energy: f64,
    tol_level: f64,
    tol_grad: f64,
    require_phi: bool,
    h_min_gap: f64,
    grad_min: f64,
}

impl<'a> Tracer<'a> {
    fn node(&mut self, x: f64, xi: f64) -> Result<Node> {
        let loc = self.sym.local(x, xi)?;
        self.node_from(&loc)
    }

    fn node_from(&mut self, loc: &Local) -> Result<Node> {
        let rho = loc.rho();
        if rho < 1e-8 {
            return Err(Error::CrossingOnCurve { x: loc.x, xi: loc.xi });
        }
        if self.require_phi && loc.p[1] * loc.p[1] + loc.p[2] * loc.p[2] < 1e-12 * rho * rho {
            return Err(Error::PoleOnCurve { x: loc.x, xi: loc.xi });
        }
        let (gx, gxi) = loc.mu_grad(self.branch)?;
        let norm = gx.hypot(gxi);
        if norm < self.tol_grad {
            return Err(Error::DegenerateGradient { x: loc.x, xi: loc.xi, norm });
        }
        self.h_min_gap = self.h_min_gap.min(rho);
        self.grad_min = self.grad_min.min(norm);
        Ok(Node { x: loc.x, xi: loc.xi, mu: loc.mu(self.branch), gx, gxi, rho })
    }

    /// Newton iteration along the gradient back onto `mu = E`.
    fn project(&mut self, mut n: Node) -> Result<Node> {
        for _ in 0..30 {
            let r = n.mu - self.energy;
            if r.abs() <= self.tol_level {
                return Ok(n);
            }
            let g2 = n.gx * n.gx + n.gxi * n.gxi;
            n = self.node(n.x - r * n.gx / g2, n.xi - r * n.gxi / g2)?;
        }
        if (n.mu - self.energy).abs() <= 10.0 * self.tol_level {
            return Ok(n);
        }
        Err(Error::DegenerateGradient { x: n.x, xi: n.xi, norm: n.speed() })
    }

    /// One RK4 step of length `h` in arc length from `n`; returns the new
    /// node (projected) and the flow-time increment.
    fn step(&mut self, n: &Node, h: f64) -> Result<(Node, f64)> {
        let (k1x, k1y) = n.tangent();
        let k1t = 1.0 / n.speed();
        let a = self.node(n.x + 0.5 * h * k1x, n.xi + 0.5 * h * k1y)?;
        let (k2x, k2y) = a.tangent();
        let k2t = 1.0 / a.speed();
        let b = self.node(n.x + 0.5 * h * k2x, n.xi + 0.5 * h * k2y)?;
        let (k3x, k3y) = b.tangent();
        let k3t = 1.0 / b.speed();
        let c = self.node(n.x + h * k3x, n.xi + h * k3y)?;
        let (k4x, k4y) = c.tangent();
        let k4t = 1.0 / c.speed();
        let x = n.x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        let xi = n.xi + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        let dt = h / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t);
        let m = self.node(x, xi)?;
        Ok((self.project(m)?, dt))
    }
}

fn lattice(sym: &PauliSymbol) -> (Option<f64>, Option<f64>) {
    (sym.domain.period_x(), sym.domain.period_xi())
}

/// Offset of `(x, xi)` from `(x0, xi0)` reduced to the nearest lattice image,
/// together with the lattice shift that was removed.
fn reduced_offset(sym: &PauliSymbol, x: f64, xi: f64, x0: f64, xi0: f64) -> ((f64, f64), (i64, i64)) {
    let (px, pxi) = lattice(sym);
    let mut dx = x - x0;
    let mut dxi = xi - xi0;
    let mut shift = (0, 0);
    if let Some(p) = px {
        let k = (dx / p).round();
        dx -= k * p;
        shift.0 = k as i64;
    }
    if let Some(p) = pxi {
        let k = (dxi / p).round();
        dxi -= k * p;
        shift.1 = k as i64;
    }
    ((dx, dxi), shift)
}

/// Finds a point on `mu = E` by scanning rays from the hint.
///
/// Rays run along `xi = hint.xi`, first towards `+x` then `-x`. On torus
/// domains, or when `vertical` is set, rays along `x = hint.x` follow.
pub fn find_seed(
    sym: &PauliSymbol,
    branch: Branch,
    energy: f64,
    hint: Option<(f64, f64)>,
    vertical: bool,
) -> Result<(f64, f64)> {
    let (hx, hxi) = hint.or(sym.seed_hint).unwrap_or((0.0, 0.0));
    let mut dirs = vec![(1.0, 0.0), (-1.0, 0.0)];
    if vertical || sym.domain.is_torus() {
        dirs.push((0.0, 1.0));
        dirs.push((0.0, -1.0));
    }
    let tol = 1e-12 * energy.abs().max(1.0);
    let g = |r: f64, d: (f64, f64)| -> Option<f64> {
        sym.eigenvalue(branch, hx + r * d.0, hxi + r * d.1).ok().map(|m| m - energy)
    };
    for d in dirs {
        let period = if d.0 != 0.0 { sym.domain.period_x() } else { sym.domain.period_xi() };
        let reach = period.map_or(200.0, |p| p);
        let mut r0 = 0.0;
        let mut g0 = g(r0, d);
        while r0 < reach {
            let r1 = (r0 + 2e-3 * r0.max(1.0)).min(reach);
            let g1 = g(r1, d);
            if let (Some(a), Some(b)) = (g0, g1) {
                if a == 0.0 {
                    return Ok((hx + r0 * d.0, hxi + r0 * d.1));
                }
                if a * b < 0.0 {
                    let (mut lo, mut hi, mut glo) = (r0, r1, a);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        match g(mid, d) {
                            Some(gm) if gm.abs() <= tol => {
                                lo = mid;
                                hi = mid;
                                break;
                            }
                            Some(gm) if gm * glo > 0.0 => {
                                lo = mid;
                                glo = gm;
                            }
                            Some(_) => hi = mid,
                            None => break,
                        }
                    }
                    let r = 0.5 * (lo + hi);
                    return Ok((hx + r * d.0, hxi + r * d.1));
                }
            }
            r0 = r1;
            g0 = g1;
        }
    }
    Err(Error::SeedNotFound { energy })
}

/// Traces the closed level curve of `mu = E` through the seed found by [`find_seed`].
pub fn trace(sym: &PauliSymbol, branch: Branch, energy: f64, opts: &TraceOptions) -> Result<LevelCurve> {
    let hint = opts.hint.or(sym.seed_hint).unwrap_or((0.0, 0.0));
    let seed = find_seed(sym, branch, energy, Some(hint), opts.vertical_search)?;
    trace_from(sym, branch, energy, seed, hint, opts)
}

/// Traces from a given point on (or near) the level set.
pub fn trace_from(
    sym: &PauliSymbol,
    branch: Branch,
    energy: f64,
    seed: (f64, f64),
    hint: (f64, f64),
    opts: &TraceOptions,
) -> Result<LevelCurve> {
    let tol_level = opts.tol_level.unwrap_or(1e-10 * energy.abs().max(1.0));
    let mut tr = Tracer {
        sym,
        branch,
        energy,
        tol_level,
        tol_grad: 1e-8,
        require_phi: opts.require_phi,
        h_min_gap: f64::INFINITY,
        grad_min: f64::INFINITY,
    };
    let start = tr.node(seed.0, seed.1)?;
    let start = tr.project(start)?;

    let dist0 = (start.x - hint.0).hypot(start.xi - hint.1);
    let scale = if dist0 > 1e-6 { dist0 } else { 1.0 / start.speed().max(1e-3) };
    let ds0 = opts.ds.unwrap_or(0.02 * scale).max(1e-9);
    let max_steps = opts.max_steps.unwrap_or((100.0 * scale / ds0).ceil() as usize * 20 + 1000);

    // Pilot pass.
    let tau0 = start.tangent();
    let along = |tr: &Tracer, n: &Node| -> ((f64, f64), (i64, i64), f64) {
        let (off, shift) = reduced_offset(tr.sym, n.x, n.xi, start.x, start.xi);
        (off, shift, off.0 * tau0.0 + off.1 * tau0.1)
    };
    let mut cur = start;
    let mut s = 0.0;
    let mut h = ds0;
    let mut max_dist: f64 = 0.0;
    let mut min_step = f64::INFINITY;
    let mut steps = 0usize;
    let length = loop {
        if steps >= max_steps {
            return Err(Error::NotClosed { steps });
        }
        let (next, _) = tr.step(&cur, h)?;
        let t0 = cur.tangent();
        let t1 = next.tangent();
        let turn = (t0.0 * t1.1 - t0.1 * t1.0).atan2(t0.0 * t1.0 + t0.1 * t1.1).abs();
        if turn > 0.05 && h > 1e-12 * scale {
            h *= 0.5;
            continue;
        }
        steps += 1;
        min_step = min_step.min(h);
        let (_, _, g_cur) = along(&tr, &cur);
        let (off, shift, g_next) = along(&tr, &next);
        let dist = off.0.hypot(off.1);
        max_dist = max_dist.max(dist);
        let tol_close = opts.tol_close.unwrap_or(10.0 * h);
        if max_dist > 4.0 * h && g_cur < 0.0 && g_next >= 0.0 && dist < tol_close.max(2.0 * h) {
            if shift != (0, 0) {
                return Err(Error::NotClosed { steps });
            }
            // Partial step landing on the plane through the seed.
            let (mut lo, mut hi) = (0.0, h);
            let (mut glo, mut ghi) = (g_cur, g_next);
            for _ in 0..60 {
                let sig = (lo - glo * (hi - lo) / (ghi - glo)).clamp(lo + 1e-3 * (hi - lo), hi - 1e-3 * (hi - lo));
                let (m, _) = tr.step(&cur, sig)?;
                let gm = along(&tr, &m).2;
                if gm.abs() < 1e-15 * scale || hi - lo < 1e-15 * scale {
                    lo = sig;
                    break;
                }
                if gm < 0.0 {
                    lo = sig;
                    glo = gm;
                } else {
                    hi = sig;
                    ghi = gm;
                }
                if (hi - lo) < 1e-14 * scale {
                    break;
                }
            }
            break s + lo;
        }
        s += h;
        cur = next;
        if turn < 0.015 {
            h *= 1.5;
        }
    };

    let min_samples = opts.min_samples.unwrap_or(256).max(16);
    let mut m = ((length / min_step).ceil() as usize * 2).max(min_samples);
    m += m % 2;
    final_pass(tr, start, length, m, opts)
}

fn final_pass(mut tr: Tracer, start: Node, mut length: f64, m: usize, opts: &TraceOptions) -> Result<LevelCurve> {
    let tau0 = start.tangent();
    let mut nodes = Vec::with_capacity(m + 1);
    let mut times = Vec::with_capacity(m + 1);
    for _ in 0..4 {
        nodes.clear();
        times.clear();
        let h = length / m as f64;
        let mut cur = start;
        let mut t = 0.0;
        nodes.push(cur);
        times.push(0.0);
        for _ in 0..m {
            let (next, dt) = tr.step(&cur, h)?;
            t += dt;
            cur = next;
            nodes.push(cur);
            times.push(t);
        }
        let (off, _) = reduced_offset(tr.sym, cur.x, cur.xi, start.x, start.xi);
        let gap = off.0 * tau0.0 + off.1 * tau0.1;
        if gap.abs() <= 1e-13 * length {
            break;
        }
        length -= gap;
    }
    let h = length / m as f64;
    let last = nodes[m];
    let (off, shift) = reduced_offset(tr.sym, last.x, last.xi, start.x, start.xi);
    let tol_close = opts.tol_close.unwrap_or(10.0 * h);
    if shift != (0, 0) || off.0.hypot(off.1) > tol_close {
        return Err(Error::NotClosed { steps: m });
    }

    let grad: Vec<(f64, f64)> = nodes[..m].iter().map(|n| (n.gx, n.gxi)).collect();
    let period_t: f64 = nodes[..m].iter().map(|n| h / n.speed()).sum();
    let mut samples: Vec<Sample> = nodes
        .iter()
        .zip(&times)
        .map(|(n, &t)| Sample { t, x: n.x, xi: n.xi })
        .collect();
    samples[m].t = period_t;
    let h_min_gap = nodes.iter().map(|n| n.rho).fold(tr.h_min_gap, f64::min);
    let mut curve = LevelCurve {
        samples,
        period_t,
        energy: tr.energy,
        branch: tr.branch,
        region: Region::Well,
        h_min_gap,
        grad_min: tr.grad_min,
        length,
        grad,
        ds: h,
        tol_level: tr.tol_level,
        tol_close,
    };
    curve.region = classify(tr.sym, &curve)?;
    Ok(curve)
}

impl LevelCurve {
    /// Number of quadrature nodes (samples without the closing duplicate).
    pub fn len(&self) -> usize {
        self.grad.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grad.is_empty()
    }

    /// Flow-time weights `ds / |grad mu|` of the periodic trapezoid rule.
    pub fn weights(&self) -> Vec<f64> {
        self.grad.iter().map(|g| self.ds / g.0.hypot(g.1)).collect()
    }

    /// `sum_j w_j v_j` over the first `M` samples, with an error estimate
    /// from the half-resolution rule.
    pub fn quadrature(&self, values: &[f64]) -> (f64, f64) {
        let w = self.weights();
        let full: f64 = w.iter().zip(values).map(|(a, b)| a * b).sum();
        let half: f64 = w.iter().zip(values).step_by(2).map(|(a, b)| 2.0 * a * b).sum();
        let mag: f64 = w.iter().zip(values).map(|(a, b)| (a * b).abs()).sum();
        (full, (full - half).abs() + 1e-13 * mag)
    }

    /// Signed area enclosed by the samples, positive for counterclockwise order.
    pub fn signed_area_ccw(&self) -> f64 {
        let n = self.len();
        let mut a = 0.0;
        for j in 0..n {
            let p = &self.samples[j];
            let q = &self.samples[(j + 1) % n];
            a += p.x * q.xi - q.x * p.xi;
        }
        0.5 * a
    }

    pub fn contains(&self, x: f64, xi: f64) -> bool {
        let n = self.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (&self.samples[i], &self.samples[j]);
            if (a.xi > xi) != (b.xi > xi) && x < (b.x - a.x) * (xi - a.xi) / (b.xi - a.xi) + a.x {
                inside = !inside;
            }
            j = i;
        }
        inside
    }

    /// Rough size of the curve: the larger side of its bounding box.
    pub fn extent(&self) -> f64 {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for s in &self.samples {
            x0 = x0.min(s.x);
            x1 = x1.max(s.x);
            y0 = y0.min(s.xi);
            y1 = y1.max(s.xi);
        }
        (x1 - x0).max(y1 - y0)
    }

    /// Re-traces the same loop with `factor` times as many samples.
    pub fn refined(&self, sym: &PauliSymbol, factor: usize) -> Result<LevelCurve> {
        let tr = Tracer {
            sym,
            branch: self.branch,
            energy: self.energy,
            tol_level: self.tol_level,
            tol_grad: 1e-8,
            require_phi: false,
            h_min_gap: f64::INFINITY,
            grad_min: f64::INFINITY,
        };
        let mut tr = tr;
        let s0 = self.samples[0];
        let start = tr.node(s0.x, s0.xi)?;
        let m = self.len() * factor.max(1);
        let opts = TraceOptions { tol_close: Some(self.tol_close), ..TraceOptions::default() };
        final_pass(tr, start, self.length, m, &opts)
    }
}

/// `integral over gamma of f dt` by the periodic trapezoid rule.
pub fn integrate_dt(curve: &LevelCurve, mut f: impl FnMut(f64, f64) -> Result<f64>) -> Result<f64> {
    Ok(integrate_dt_err(curve, &mut f)?.0)
}

/// As [`integrate_dt`], returning `(value, error estimate)`.
pub fn integrate_dt_err(curve: &LevelCurve, mut f: impl FnMut(f64, f64) -> Result<f64>) -> Result<(f64, f64)> {
    let values = curve.samples[..curve.len()]
        .iter()
        .map(|s| f(s.x, s.xi))
        .collect::<Result<Vec<_>>>()?;
    Ok(curve.quadrature(&values))
}

/// `S0 = integral of xi dx` in the Hamilton-flow orientation, computed as
/// `integral of xi mu_xi dt`.
pub fn action_s0(curve: &LevelCurve) -> f64 {
    action_s0_err(curve).0
}

pub fn action_s0_err(curve: &LevelCurve) -> (f64, f64) {
    let values: Vec<f64> = curve.samples[..curve.len()]
        .iter()
        .zip(&curve.grad)
        .map(|(s, g)| s.xi * g.1)
        .collect();
    curve.quadrature(&values)
}

pub fn period_err(curve: &LevelCurve) -> (f64, f64) {
    curve.quadrature(&vec![1.0; curve.len()])
}

/// Well or barrier, from the value of `mu` just inside the curve.
pub fn classify(sym: &PauliSymbol, curve: &LevelCurve) -> Result<Region> {
    let s0 = curve.samples[0];
    let g = curve.grad[0];
    let gn = g.0.hypot(g.1);
    let n = (g.0 / gn, g.1 / gn);
    let limit = 0.25 * curve.extent();
    let mut delta = 3.0 * curve.ds;
    let mut interior = None;
    while interior.is_none() && delta <= limit.max(3.0 * curve.ds) {
        for sgn in [-1.0, 1.0] {
            let (x, xi) = (s0.x + sgn * delta * n.0, s0.xi + sgn * delta * n.1);
            if curve.contains(x, xi) {
                if let Ok(mu) = sym.eigenvalue(curve.branch, x, xi) {
                    interior = Some(mu);
                    break;
                }
            }
        }
        delta *= 2.0;
    }
    let mu = interior.ok_or(Error::Inconsistent)?;
    let by_value = if mu < curve.energy { Region::Well } else { Region::Barrier };
    let by_orientation = if curve.signed_area_ccw() < 0.0 { Region::Well } else { Region::Barrier };
    if by_value != by_orientation {
        return Err(Error::Inconsistent);
    }
    Ok(by_value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use std::f64::consts::PI;

    #[test]
    fn dirac_circle() {
        let sym = presets::simple_dirac();
        let c = trace(&sym, Branch::Plus, 1.0, &TraceOptions::default()).unwrap();
        assert!((c.period_t - 2.0 * PI).abs() < 1e-6, "{}", c.period_t);
        assert!((action_s0(&c) - PI).abs() < 1e-8);
        assert_eq!(c.region, Region::Well);
        for s in &c.samples {
            assert!((s.x.hypot(s.xi) - 1.0).abs() < 1e-10);
        }
        let first = c.samples[0];
        let last = c.samples[c.samples.len() - 1];
        assert!((first.x - last.x).hypot(first.xi - last.xi) < c.tol_close);
        assert_eq!(last.t, c.period_t);
        assert!(c.samples.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn seeds() {
        let d = presets::simple_dirac();
        let (x, xi) = find_seed(&d, Branch::Plus, 1.0, None, false).unwrap();
        assert!((x - 1.0).abs() < 1e-10 && xi == 0.0);
        let rw = presets::rw_example();
        let (x, xi) = find_seed(&rw, Branch::Plus, 2f64.sqrt(), None, false).unwrap();
        assert!((x - 1.0).abs() < 1e-10 && xi == 0.0);
        let jr = presets::jackiw_rebbi(1.0);
        assert!(matches!(find_seed(&jr, Branch::Plus, 2.0, None, false), Err(Error::SeedNotFound { .. })));
    }

    #[test]
    fn jr_turning_points() {
        let jr = presets::jackiw_rebbi(1.0);
        let c = trace(&jr, Branch::Plus, 0.5, &TraceOptions::default()).unwrap();
        let xmax = c.samples.iter().map(|s| s.x).fold(f64::NEG_INFINITY, f64::max);
        let xmin = c.samples.iter().map(|s| s.x).fold(f64::INFINITY, f64::min);
        assert!((xmax - 0.5f64.atanh()).abs() < 1e-4);
        assert!((xmin + 0.5f64.atanh()).abs() < 1e-4);
    }

    #[test]
    fn classification() {
        let d = presets::simple_dirac();
        let c = trace(&d, Branch::Plus, 1.0, &TraceOptions::default()).unwrap();
        assert_eq!(classify(&d, &c).unwrap(), Region::Well);
        let nd = d.negated();
        let c = trace(&nd, Branch::Minus, -1.0, &TraceOptions::default()).unwrap();
        assert_eq!(c.region, Region::Barrier);
        assert!(action_s0(&c) < 0.0);
        let tm = presets::timmel_mele_low(0.0);
        let c = trace(&tm, Branch::Minus, 0.0, &TraceOptions::default()).unwrap();
        assert_eq!(c.region, Region::Barrier);
        let tb = presets::timmel_mele_tb();
        let c = trace(&tb, Branch::Minus, 0.0, &TraceOptions::default()).unwrap();
        assert_eq!(c.region, Region::Barrier);
    }

    #[test]
    fn quadrature_basics() {
        let d = presets::simple_dirac();
        let c = trace(&d, Branch::Plus, 1.0, &TraceOptions::default()).unwrap();
        assert!((integrate_dt(&c, |_, _| Ok(1.0)).unwrap() - c.period_t).abs() < 1e-12);
        assert!(integrate_dt(&c, |x, _| Ok(x.powi(3))).unwrap().abs() < 1e-10);
        let half = integrate_dt(&c, |x, xi| Ok(0.5 / x.hypot(xi))).unwrap();
        assert!((half - PI).abs() < 1e-4);
    }
}
