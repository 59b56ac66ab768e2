//! Geometric phase corrections along a traced curve and the assembled `S1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curve::{action_s0_err, LevelCurve, Region};
use crate::error::{Error, Result};
use crate::symbol::{Branch, PauliSymbol};

/// Plane used to build the complex image curve `q(gamma)` for the winding number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Plane {
    /// Least-squares normal fitted to the sampled `P` vectors.
    Auto,
    /// `p_i` vanishes: `q = -p3 + i p2` (1), `p1 - i p3` (2), `p1 + i p2` (3).
    VanishingIndex(usize),
    /// Constant unit normal `C` with `C . P = 0`.
    Normal([f64; 3]),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Winding {
    /// Winding number of the counterclockwise boundary image.
    pub wind: i64,
    /// Winding along the stored (Hamilton-flow) sample order.
    pub wind_flow: i64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseErrors {
    pub s0: f64,
    pub theta_b: f64,
    pub theta_rw: f64,
    pub i_h1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub energy: f64,
    pub branch: Branch,
    pub region: Region,
    pub period_t: f64,
    pub s0: f64,
    pub theta_b: f64,
    pub theta_rw: f64,
    pub i_h1: f64,
    /// `pi - I_H1 - theta_B - theta_RW` reduced into `(-pi/2, 3pi/2]`.
    pub s1: f64,
    pub s1_raw: f64,
    pub winding: Option<i64>,
    pub quantized_branch_used: bool,
    pub errors: PhaseErrors,
}

/// Reduces an angle into `(-pi/2, 3pi/2]`.
pub fn reduce_s1(v: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = (v + 0.5 * PI).rem_euclid(two_pi) - 0.5 * PI;
    if r <= -0.5 * PI {
        r += two_pi;
    }
    r
}

fn wrap(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(2.0 * PI) - PI;
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}

const MAX_REFINE: usize = 5;

/// Returns the curve itself or a refined copy on which `angle` changes by
/// less than `pi/2` between neighbouring samples.
fn resolve_angles<F>(sym: &PauliSymbol, curve: &LevelCurve, angle: F) -> Result<(LevelCurve, Vec<f64>)>
where
    F: Fn(&PauliSymbol, f64, f64) -> Result<f64>,
{
    let mut c = curve.clone();
    for _ in 0..=MAX_REFINE {
        let a = c.samples.iter().map(|s| angle(sym, s.x, s.xi)).collect::<Result<Vec<_>>>()?;
        if a.windows(2).all(|w| wrap(w[1] - w[0]).abs() < 0.5 * PI) {
            return Ok((c, a));
        }
        c = c.refined(sym, 2)?;
    }
    Err(Error::UnwrapFailure)
}

fn unwrapped_total(angles: &[f64]) -> f64 {
    angles.windows(2).map(|w| wrap(w[1] - w[0])).sum()
}

fn pole_to_curve(e: Error) -> Error {
    match e {
        Error::PoleError { x, xi } => Error::PoleOnCurve { x, xi },
        Error::CrossingError { x, xi } => Error::CrossingOnCurve { x, xi },
        other => other,
    }
}

fn phi_at(sym: &PauliSymbol, x: f64, xi: f64) -> Result<f64> {
    sym.local(x, xi)?.phi().map_err(pole_to_curve)
}

/// `theta_B = +-integral ((1 - cos theta)/2) {mu, phi} dt`, with error estimate.
pub fn berry_phase_err(sym: &PauliSymbol, branch: Branch, curve: &LevelCurve) -> Result<(f64, f64)> {
    let (c, _) = resolve_angles(sym, curve, phi_at)?;
    let vals = c.samples[..c.len()]
        .iter()
        .map(|s| sym.local(s.x, s.xi)?.berry_density(branch).map_err(pole_to_curve))
        .collect::<Result<Vec<_>>>()?;
    Ok(c.quadrature(&vals))
}

pub fn berry_phase(sym: &PauliSymbol, branch: Branch, curve: &LevelCurve) -> Result<f64> {
    Ok(berry_phase_err(sym, branch, curve)?.0)
}

/// `theta_RW = integral (+-p0 + 3|P|)(sin theta/4){theta, phi} dt`.
pub fn rw_phase_err(sym: &PauliSymbol, branch: Branch, curve: &LevelCurve) -> Result<(f64, f64)> {
    let vals = curve.samples[..curve.len()]
        .iter()
        .map(|s| sym.local(s.x, s.xi)?.rw_density(branch).map_err(pole_to_curve))
        .collect::<Result<Vec<_>>>()?;
    Ok(curve.quadrature(&vals))
}

pub fn rw_phase(sym: &PauliSymbol, branch: Branch, curve: &LevelCurve) -> Result<f64> {
    Ok(rw_phase_err(sym, branch, curve)?.0)
}

/// `integral (r0 +- sum r_i p_i / |P|) dt`.
pub fn h1_phase_err(sym: &PauliSymbol, branch: Branch, curve: &LevelCurve) -> Result<(f64, f64)> {
    if !sym.has_subprincipal() {
        return Ok((0.0, 0.0));
    }
    let vals = curve.samples[..curve.len()]
        .iter()
        .map(|s| sym.local(s.x, s.xi)?.h1_expectation(branch).map_err(pole_to_curve))
        .collect::<Result<Vec<_>>>()?;
    Ok(curve.quadrature(&vals))
}

pub fn h1_phase(sym: &PauliSymbol, branch: Branch, curve: &LevelCurve) -> Result<f64> {
    Ok(h1_phase_err(sym, branch, curve)?.0)
}

/// Eigenvector of the smallest eigenvalue of a symmetric 3x3 matrix (cyclic Jacobi).
fn smallest_eigvec(mut a: [[f64; 3]; 3]) -> [f64; 3] {
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _ in 0..50 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        let diag = a[0][0].abs() + a[1][1].abs() + a[2][2].abs();
        if off <= 1e-300 || off <= 1e-18 * diag {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let vkp = row[p];
                let vkq = row[q];
                row[p] = c * vkp - s * vkq;
                row[q] = s * vkp + c * vkq;
            }
        }
    }
    let k = (0..3).min_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap()).unwrap();
    let mut c = [v[0][k], v[1][k], v[2][k]];
    let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    c.iter_mut().for_each(|x| *x /= n);
    // canonical sign: largest component positive
    let big = (0..3).max_by(|&i, &j| c[i].abs().partial_cmp(&c[j].abs()).unwrap()).unwrap();
    if c[big] < 0.0 {
        c.iter_mut().for_each(|x| *x = -*x);
    }
    c
}

/// Best-fit constant normal to the sampled `P` vectors and the planarity residual
/// `max |C . P| / max |P|`.
pub fn fit_normal(sym: &PauliSymbol, curve: &LevelCurve) -> Result<([f64; 3], f64)> {
    let pts = curve.samples[..curve.len()]
        .iter()
        .map(|s| sym.p_values(s.x, s.xi))
        .collect::<Result<Vec<_>>>()?;
    let mut m = [[0.0; 3]; 3];
    for p in &pts {
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += p[i + 1] * p[j + 1];
            }
        }
    }
    let c = smallest_eigvec(m);
    let mut worst: f64 = 0.0;
    let mut big: f64 = 0.0;
    for p in &pts {
        worst = worst.max((c[0] * p[1] + c[1] * p[2] + c[2] * p[3]).abs());
        big = big.max((p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt());
    }
    Ok((c, if big > 0.0 { worst / big } else { f64::INFINITY }))
}

/// `(q1, q2)`: `P` rotated about `C x e3` so that the plane normal becomes `e3`.
pub fn rotate_to_plane(c: [f64; 3], p: [f64; 3]) -> (f64, f64) {
    let [c1, c2, c3] = c;
    let [p1, p2, p3] = p;
    if 1.0 - c3.abs() < 1e-12 {
        return (p1, p2);
    }
    let k = (1.0 - c3) / (c1 * c1 + c2 * c2);
    let q1 = p1 * (c3 + c2 * c2 * k) - p2 * c1 * c2 * k - c1 * p3;
    let q2 = p2 * (c3 + c1 * c1 * k) - p1 * c1 * c2 * k - c2 * p3;
    (q1, q2)
}

/// Full rotated vector `Q` (third component should vanish on the plane).
pub fn rotate_full(c: [f64; 3], p: [f64; 3]) -> [f64; 3] {
    let (q1, q2) = rotate_to_plane(c, p);
    let q3 = if 1.0 - c[2].abs() < 1e-12 { p[2] } else { c[0] * p[0] + c[1] * p[1] + c[2] * p[2] };
    [q1, q2, q3]
}

fn planar_q(plane: Plane, p: [f64; 4]) -> Result<(f64, f64)> {
    Ok(match plane {
        Plane::VanishingIndex(1) => (-p[3], p[2]),
        Plane::VanishingIndex(2) => (p[1], -p[3]),
        Plane::VanishingIndex(3) => (p[1], p[2]),
        Plane::VanishingIndex(i) => return Err(Error::InvalidArgument(format!("vanishing index {i} not in 1..=3"))),
        Plane::Normal(c) => rotate_to_plane(c, [p[1], p[2], p[3]]),
        Plane::Auto => unreachable!("resolved by caller"),
    })
}

fn plane_normal(plane: Plane) -> [f64; 3] {
    match plane {
        Plane::VanishingIndex(1) => [1.0, 0.0, 0.0],
        Plane::VanishingIndex(2) => [0.0, 1.0, 0.0],
        Plane::VanishingIndex(_) => [0.0, 0.0, 1.0],
        Plane::Normal(c) => c,
        Plane::Auto => [0.0, 0.0, 1.0],
    }
}

/// Winding number of `q(gamma)` around the origin.
pub fn winding(sym: &PauliSymbol, curve: &LevelCurve, plane: Plane) -> Result<Winding> {
    let plane = match plane {
        Plane::Auto => {
            let (c, res) = fit_normal(sym, curve)?;
            if res >= 1e-8 {
                return Err(Error::NotPlanar { residual: res });
            }
            Plane::Normal(c)
        }
        Plane::Normal(c) => {
            let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
            Plane::Normal([c[0] / n, c[1] / n, c[2] / n])
        }
        other => other,
    };
    let c = plane_normal(plane);
    let mut qmax: f64 = 0.0;
    for s in &curve.samples {
        let p = sym.p_values(s.x, s.xi)?;
        let norm = (p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt();
        let off = (c[0] * p[1] + c[1] * p[2] + c[2] * p[3]).abs();
        if off >= 1e-8 * norm.max(f64::MIN_POSITIVE) {
            return Err(Error::NotPlanar { residual: off / norm });
        }
        qmax = qmax.max(norm);
    }
    let tol = 1e-12 * qmax.max(1e-300);
    let arg = |sym: &PauliSymbol, x: f64, xi: f64| -> Result<f64> {
        let (a, b) = planar_q(plane, sym.p_values(x, xi)?)?;
        if a.hypot(b) < tol {
            return Err(Error::OriginOnCurve);
        }
        Ok(b.atan2(a))
    };
    let (c, angles) = resolve_angles(sym, curve, arg)?;
    let turns = unwrapped_total(&angles) / (2.0 * PI);
    let wind_flow = turns.round();
    let residual = (turns - wind_flow).abs();
    if residual >= 0.05 {
        return Err(Error::RoundingAmbiguous { residual });
    }
    let ccw = if c.signed_area_ccw() < 0.0 { -1.0 } else { 1.0 };
    Ok(Winding { wind: (wind_flow * ccw) as i64, wind_flow: wind_flow as i64, residual })
}

/// Selects between the quantized and the generic formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseMode {
    /// Quantized formulas when `P` is planar along the curve, generic otherwise.
    Auto,
    Generic,
    Quantized(Plane),
}

pub fn assemble(sym: &PauliSymbol, branch: Branch, curve: &LevelCurve) -> Result<PhaseReport> {
    assemble_with(sym, branch, curve, PhaseMode::Auto)
}

pub fn assemble_with(sym: &PauliSymbol, branch: Branch, curve: &LevelCurve, mode: PhaseMode) -> Result<PhaseReport> {
    let (s0, s0_err) = action_s0_err(curve);
    let (i_h1, h1_err) = h1_phase_err(sym, branch, curve)?;
    let plane = match mode {
        PhaseMode::Generic => None,
        PhaseMode::Quantized(p) => Some(p),
        PhaseMode::Auto => {
            let (c, res) = fit_normal(sym, curve)?;
            (res < 1e-8).then_some(Plane::Normal(c))
        }
    };
    let (theta_b, theta_rw, winding, errs, quantized) = match plane {
        Some(p) => {
            let w = winding(sym, curve, p)?;
            (branch.sign() * PI * w.wind_flow as f64, 0.0, Some(w.wind), (0.0, 0.0), true)
        }
        None => {
            let (b, be) = berry_phase_err(sym, branch, curve)?;
            let (r, re) = rw_phase_err(sym, branch, curve)?;
            (b, r, None, (be, re), false)
        }
    };
    let s1_raw = PI - i_h1 - theta_b - theta_rw;
    Ok(PhaseReport {
        energy: curve.energy,
        branch,
        region: curve.region,
        period_t: curve.period_t,
        s0,
        theta_b,
        theta_rw,
        i_h1,
        s1: reduce_s1(s1_raw),
        s1_raw,
        winding,
        quantized_branch_used: quantized,
        errors: PhaseErrors { s0: s0_err, theta_b: errs.0, theta_rw: errs.1, i_h1: h1_err },
    })
}
