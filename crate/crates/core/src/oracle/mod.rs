//! Weyl quantization of a Pauli symbol on a Fourier basis and the spectrum
//! of the resulting Hermitian matrix.
//!
//! Each field is split numerically into terms `a(x) b(xi)` with `b` drawn from
//! a small fixed family. A term `a(x) b(xi)` between plane waves `n` and `m`
//! has Weyl matrix element `a_hat(n - m) b((xi_n + xi_m) / 2)`.

pub mod eig;

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Var;
use crate::presets;
use crate::symbol::{Domain, Field, PauliSymbol};

pub use eig::HermitianMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Basis {
    /// Plane waves on the periodized interval `[-half_width, half_width)`.
    FourierLine { half_width: f64, modes: usize },
    /// Plane waves on the symbol's x-period.
    FourierTorus { modes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantPlan {
    pub basis: Basis,
    pub h: f64,
    /// Bloch quasimomentum; shifts the torus frequencies by `h kx`.
    #[serde(default)]
    pub kx: f64,
}

impl QuantPlan {
    pub fn line(half_width: f64, modes: usize, h: f64) -> QuantPlan {
        QuantPlan { basis: Basis::FourierLine { half_width, modes }, h, kx: 0.0 }
    }

    pub fn torus(modes: usize, h: f64) -> QuantPlan {
        QuantPlan { basis: Basis::FourierTorus { modes }, h, kx: 0.0 }
    }

    pub fn modes(&self) -> usize {
        match self.basis {
            Basis::FourierLine { modes, .. } | Basis::FourierTorus { modes } => modes,
        }
    }

    /// Same plan with twice the modes (and, on the line, twice the width at
    /// unchanged resolution when `widen` is set).
    pub fn doubled(&self, widen: bool) -> QuantPlan {
        let basis = match self.basis {
            Basis::FourierLine { half_width, modes } => Basis::FourierLine {
                half_width: if widen { 2.0 * half_width } else { half_width },
                modes: 2 * modes,
            },
            Basis::FourierTorus { modes } => Basis::FourierTorus { modes: 2 * modes },
        };
        QuantPlan { basis, ..*self }
    }

    fn validate(&self, domain: Domain) -> Result<()> {
        let n = self.modes();
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("modes must be a power of two >= 64, got {n}")));
        }
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::InvalidArgument(format!("h must be positive, got {}", self.h)));
        }
        match (self.basis, domain) {
            (Basis::FourierLine { half_width, .. }, Domain::Line) if half_width > 0.0 => Ok(()),
            (Basis::FourierLine { .. }, Domain::Line) => {
                Err(Error::InvalidArgument("half_width must be positive".into()))
            }
            (Basis::FourierTorus { .. }, Domain::TorusX { .. } | Domain::TorusXXi { .. }) => Ok(()),
            (Basis::FourierLine { .. }, _) => {
                Err(Error::InvalidArgument("periodic symbol needs a torus basis".into()))
            }
            (Basis::FourierTorus { .. }, Domain::Line) => {
                Err(Error::InvalidArgument("torus basis needs a periodic symbol".into()))
            }
        }
    }
}

/// The quantized operator `(H0 + h H1)^w` as a `2N x 2N` matrix, indexed
/// `spin * N + (n + N/2)`.
#[derive(Debug, Clone)]
pub struct QuantizedOperator {
    pub matrix: HermitianMatrix,
    pub plan: QuantPlan,
    /// Frequencies `xi_n` of the basis functions.
    pub xi: Vec<f64>,
    /// Relative Hermiticity residual of the assembled matrix, measured
    /// before the final symmetrization.
    pub assembly_residual: f64,
}

/// Family of xi-profiles a term may carry.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Profile {
    One,
    Xi,
    Xi2,
    Cos(f64),
    Sin(f64),
}

impl Profile {
    fn eval(self, xi: f64) -> f64 {
        match self {
            Profile::One => 1.0,
            Profile::Xi => xi,
            Profile::Xi2 => xi * xi,
            Profile::Cos(p) => (2.0 * PI * xi / p).cos(),
            Profile::Sin(p) => (2.0 * PI * xi / p).sin(),
        }
    }
}

fn profiles(domain: Domain) -> Vec<Profile> {
    match domain.period_xi() {
        Some(p) => vec![Profile::One, Profile::Cos(p), Profile::Sin(p)],
        None => vec![Profile::One, Profile::Xi, Profile::Xi2, Profile::Cos(1.0), Profile::Sin(1.0)],
    }
}

const FIT_XI: [f64; 5] = [-0.61, -0.23, 0.09, 0.37, 0.71];
const CHECK_XI: [f64; 3] = [-0.47, 0.23, 1.13];

/// Splits fields into `sum_k a_k(x) b_k(xi)` by collocation in `xi` at every
/// grid point `x`, then verifies the split at further `xi` values.
struct Splitter {
    profiles: Vec<Profile>,
    /// Inverse of the collocation matrix, row-major.
    inv: Vec<f64>,
    fit: Vec<f64>,
}

impl Splitter {
    fn new(domain: Domain) -> Splitter {
        let profiles = profiles(domain);
        let k = profiles.len();
        let scale = domain.period_xi().unwrap_or(1.0);
        let fit: Vec<f64> = FIT_XI[..k].iter().map(|v| v * scale).collect();
        let mut a: Vec<f64> = Vec::with_capacity(k * k);
        for &xi in &fit {
            a.extend(profiles.iter().map(|p| p.eval(xi)));
        }
        let inv = invert(&a, k).expect("collocation matrix is regular");
        Splitter { profiles, inv, fit }
    }

    /// Coefficients `a_k(x_j)` of `field` on the grid, one vector per profile.
    fn split(&self, field: &Field, name: &str, xs: &[f64]) -> Result<Vec<Vec<f64>>> {
        let k = self.profiles.len();
        let mut out = vec![vec![0.0; xs.len()]; k];
        if field.is_zero() {
            return Ok(out);
        }
        let xi_free = !field.expr().depends_on(Var::Xi);
        let scale = self.fit.iter().map(|v| v.abs()).fold(1.0, f64::max);
        for (j, &x) in xs.iter().enumerate() {
            if xi_free {
                out[0][j] = field.value(x, 0.0)?;
                continue;
            }
            let vals: Vec<f64> = self.fit.iter().map(|&xi| field.value(x, xi)).collect::<Result<_>>()?;
            let coef: Vec<f64> =
                (0..k).map(|r| (0..k).map(|c| self.inv[r * k + c] * vals[c]).sum()).collect();
            let mag = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
            for &t in &CHECK_XI {
                let xi = t * scale;
                let model: f64 = self.profiles.iter().zip(&coef).map(|(p, c)| c * p.eval(xi)).sum();
                let truth = field.value(x, xi)?;
                if (model - truth).abs() > 1e-9 * mag.max(truth.abs()) {
                    return Err(Error::UnsupportedSymbol(format!(
                        "{name} = {field} is not a combination of supported xi-profiles at x = {x}"
                    )));
                }
            }
            for (r, c) in coef.into_iter().enumerate() {
                out[r][j] = if c.abs() <= 1e-12 * mag { 0.0 } else { c };
            }
        }
        Ok(out)
    }
}

/// Gauss-Jordan inverse with partial pivoting.
fn invert(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))?;
        if m[piv * n + col].abs() < 1e-300 {
            return None;
        }
        for c in 0..n {
            m.swap(col * n + c, piv * n + c);
            inv.swap(col * n + c, piv * n + c);
        }
        let d = m[col * n + col];
        for c in 0..n {
            m[col * n + c] /= d;
            inv[col * n + c] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r * n + col];
                if f != 0.0 {
                    for c in 0..n {
                        m[r * n + c] -= f * m[col * n + c];
                        inv[r * n + c] -= f * inv[col * n + c];
                    }
                }
            }
        }
    }
    Some(inv)
}

/// Fourier coefficients `a_hat(d)` for `d` in `(-N, N)`, stored at `d + N`.
struct Coefficients {
    n: usize,
    c: Vec<Complex64>,
}

impl Coefficients {
    fn at(&self, d: isize) -> Complex64 {
        self.c[(d + self.n as isize) as usize]
    }

    fn is_zero(&self) -> bool {
        self.c.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
}

/// Grid geometry and coefficient transform for one basis.
struct Grid {
    n: usize,
    xs: Vec<f64>,
    xi: Vec<f64>,
    line: bool,
}

impl Grid {
    fn new(plan: &QuantPlan, domain: Domain) -> Grid {
        let n = plan.modes();
        let h = plan.h;
        match plan.basis {
            Basis::FourierLine { half_width: l, .. } => Grid {
                n,
                xs: (0..n).map(|j| -l + 2.0 * l * j as f64 / n as f64).collect(),
                xi: (0..n).map(|i| PI * (i as f64 - (n / 2) as f64) * h / l).collect(),
                line: true,
            },
            Basis::FourierTorus { .. } => {
                let p = domain.period_x().expect("torus domain");
                let m = 4 * n;
                Grid {
                    n,
                    xs: (0..m).map(|j| p * j as f64 / m as f64).collect(),
                    xi: (0..n).map(|i| 2.0 * PI * h * (i as f64 - (n / 2) as f64) / p + h * plan.kx).collect(),
                    line: false,
                }
            }
        }
    }

    fn coefficients(&self, samples: &[f64], fft: &mut FftPlanner<f64>) -> Coefficients {
        let n = self.n;
        let m = samples.len();
        let mut c = vec![Complex64::new(0.0, 0.0); 2 * n];
        if samples.iter().all(|&v| v == 0.0) {
            return Coefficients { n, c };
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.plan_fft_forward(m).process(&mut buf);
        let inv_m = 1.0 / m as f64;
        if self.line {
            // grid starts at -L: a_hat(d) = (-1)^d FFT[d mod N] / N
            for d in -(n as isize) + 1..n as isize {
                let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                c[(d + n as isize) as usize] = buf[d.rem_euclid(n as isize) as usize] * (sign * inv_m);
            }
        } else {
            let big = buf.iter().map(|z| z.norm()).fold(0.0, f64::max) * inv_m;
            for d in -(n as isize) + 1..n as isize {
                let z = buf[d.rem_euclid(m as isize) as usize] * inv_m;
                c[(d + n as isize) as usize] = if z.norm() <= 1e-14 * big.max(1e-300) { Complex64::new(0.0, 0.0) } else { z };
            }
        }
        Coefficients { n, c }
    }
}

/// Assembles the Weyl quantization of `H0 + h H1` for the plan.
pub fn quantize(sym: &PauliSymbol, plan: &QuantPlan) -> Result<QuantizedOperator> {
    plan.validate(sym.domain)?;
    let grid = Grid::new(plan, sym.domain);
    let splitter = Splitter::new(sym.domain);
    let n = grid.n;
    let h = plan.h;
    let names = ["p0", "p1", "p2", "p3", "r0", "r1", "r2", "r3"];

    // ops[i] = Op(p_i + h r_i) as an N x N matrix
    let mut fft = FftPlanner::new();
    let mut ops: Vec<Vec<Complex64>> = Vec::with_capacity(4);
    for i in 0..4 {
        let pa = splitter.split(&sym.p[i], names[i], &grid.xs)?;
        let ra = splitter.split(&sym.r[i], names[i + 4], &grid.xs)?;
        let mut op = vec![Complex64::new(0.0, 0.0); n * n];
        for (k, profile) in splitter.profiles.iter().enumerate() {
            let samples: Vec<f64> = pa[k].iter().zip(&ra[k]).map(|(p, r)| p + h * r).collect();
            let coef = grid.coefficients(&samples, &mut fft);
            if coef.is_zero() {
                continue;
            }
            for a in 0..n {
                for b in 0..n {
                    let c = coef.at(a as isize - b as isize);
                    if c.re != 0.0 || c.im != 0.0 {
                        op[a * n + b] += c * profile.eval(0.5 * (grid.xi[a] + grid.xi[b]));
                    }
                }
            }
        }
        ops.push(op);
    }

    let i_unit = Complex64::new(0.0, 1.0);
    let mut m = HermitianMatrix::zeros(2 * n);
    for a in 0..n {
        for b in 0..n {
            let idx = a * n + b;
            let (g0, g1, g2, g3) = (ops[0][idx], ops[1][idx], ops[2][idx], ops[3][idx]);
            m.set(a, b, g0 + g3);
            m.set(a, n + b, g1 - i_unit * g2);
            m.set(n + a, b, g1 + i_unit * g2);
            m.set(n + a, n + b, g0 - g3);
        }
    }
    let assembly_residual = m.hermiticity_residual();
    m.symmetrize();
    Ok(QuantizedOperator { matrix: m, plan: *plan, xi: grid.xi, assembly_residual })
}

/// Eigenvalues with the fraction of eigenvector mass near the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Largest edge mass over the returned values (line plans with a window).
    pub boundary_mass: Option<f64>,
    /// States living at the edge of the truncated phase space (the seam
    /// `x = +-L` or the highest frequencies); artifacts of the periodization,
    /// not part of the spectrum on the line.
    pub edge_states: Vec<f64>,
}

/// Eigenvector mass allowed in the outer tenth of a line grid, in position
/// and in frequency.
pub const BOUNDARY_TOL: f64 = 1e-8;

impl QuantizedOperator {
    /// All eigenvalues, or those in `[a, b]`, ascending.
    ///
    /// With a window on a line plan the eigenvectors are checked for decay
    /// towards `|x| = L` and towards the largest frequencies. States with more
    /// than half their mass in either outer tenth come from the periodization
    /// and are moved to `edge_states`. Any other state with edge mass above
    /// [`BOUNDARY_TOL`] fails with [`Error::PlanTooSmall`].
    pub fn eigenvalues(&self, window: Option<(f64, f64)>) -> Result<Spectrum> {
        let tri = eig::tridiagonalize(self.matrix.clone());
        let all = tri.eigenvalues()?;
        let Some((lo, hi)) = window else {
            return Ok(Spectrum { values: all, boundary_mass: None, edge_states: Vec::new() });
        };
        let inside: Vec<f64> = all.iter().copied().filter(|&v| v >= lo && v <= hi).collect();
        let Basis::FourierLine { .. } = self.plan.basis else {
            return Ok(Spectrum { values: inside, boundary_mass: None, edge_states: Vec::new() });
        };
        let vecs = tri.eigenvectors(&inside);
        let norm = all.iter().map(|v| v.abs()).fold(1.0, f64::max);
        let mut values = Vec::new();
        let mut edge_states = Vec::new();
        let mut worst: f64 = 0.0;
        let mut i = 0;
        while i < inside.len() {
            let mut j = i + 1;
            while j < inside.len() && inside[j] - inside[j - 1] < 1e-10 * norm {
                j += 1;
            }
            for (k, (mx, mxi)) in self.edge_masses(&vecs[i..j])?.into_iter().enumerate() {
                let e = inside[i + k];
                if mx.max(mxi) > 0.5 {
                    edge_states.push(e);
                } else {
                    worst = worst.max(mx).max(mxi);
                    values.push(e);
                }
            }
            i = j;
        }
        if worst > BOUNDARY_TOL {
            return Err(Error::PlanTooSmall(format!(
                "eigenvector mass {worst:.3e} in the outer tenth of the grid exceeds {BOUNDARY_TOL:e}"
            )));
        }
        Ok(Spectrum { values, boundary_mass: Some(worst), edge_states })
    }

    /// `(position, frequency)` edge masses of the eigenbasis of a degenerate
    /// cluster that diagonalizes the sum of both edge projectors.
    fn edge_masses(&self, vecs: &[Vec<Complex64>]) -> Result<Vec<(f64, f64)>> {
        let Basis::FourierLine { half_width: l, modes: n } = self.plan.basis else {
            return Ok(vec![(0.0, 0.0); vecs.len()]);
        };
        let outer_x: Vec<bool> = (0..2 * n)
            .map(|idx| (-l + 2.0 * l * (idx % n) as f64 / n as f64).abs() >= 0.9 * l)
            .collect();
        let outer_xi: Vec<bool> =
            (0..2 * n).map(|idx| ((idx % n) as f64 - (n / 2) as f64).abs() >= 0.45 * n as f64).collect();
        let psis: Vec<Vec<Complex64>> = vecs.iter().map(|v| self.position_values(v)).collect();
        let gram = |vs: &[Vec<Complex64>], mask: &[bool]| -> HermitianMatrix {
            let k = vs.len();
            let tot: Vec<f64> = vs.iter().map(|p| p.iter().map(|z| z.norm_sqr()).sum::<f64>()).collect();
            let mut b = HermitianMatrix::zeros(k);
            for r in 0..k {
                for c in 0..k {
                    let s: Complex64 = vs[r]
                        .iter()
                        .zip(&vs[c])
                        .zip(mask)
                        .filter(|(_, &o)| o)
                        .map(|((a, b), _)| a.conj() * b)
                        .sum();
                    b.set(r, c, s / (tot[r] * tot[c]).sqrt());
                }
            }
            b
        };
        let bx = gram(&psis, &outer_x);
        let bxi = gram(vecs, &outer_xi);
        let k = vecs.len();
        if k == 1 {
            return Ok(vec![(bx.get(0, 0).re, bxi.get(0, 0).re)]);
        }
        let mut sum = bx.clone();
        sum.data.iter_mut().zip(&bxi.data).for_each(|(a, b)| *a += b);
        sum.symmetrize();
        let tri = eig::tridiagonalize(sum);
        let lambdas = tri.eigenvalues()?;
        let quad = |b: &HermitianMatrix, w: &[Complex64]| -> f64 {
            b.matvec(w).iter().zip(w).map(|(p, q)| (q.conj() * p).re).sum::<f64>().clamp(0.0, 1.0)
        };
        Ok(tri.eigenvectors(&lambdas).iter().map(|w| (quad(&bx, w), quad(&bxi, w))).collect())
    }

    /// Position-space values of a line-basis vector on the grid, both spins.
    fn position_values(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.plan.modes();
        let ifft = FftPlanner::new().plan_fft_inverse(n);
        let mut out = Vec::with_capacity(2 * n);
        for spin in 0..2 {
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            for i in 0..n {
                let mode = i as isize - (n / 2) as isize;
                let sign = if mode.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                buf[mode.rem_euclid(n as isize) as usize] = v[spin * n + i] * sign;
            }
            ifft.process(&mut buf);
            out.extend(buf);
        }
        out
    }

    /// Fraction of `|psi|^2` at `|x| >= 0.9 L` for a line-basis vector.
    pub fn boundary_mass(&self, v: &[Complex64]) -> f64 {
        match self.plan.basis {
            Basis::FourierLine { .. } => self.edge_masses(&[v.to_vec()]).map_or(1.0, |m| m[0].0),
            Basis::FourierTorus { .. } => 0.0,
        }
    }
}

/// Quantizes and returns the eigenvalues in `window` (all if `None`).
pub fn eigenvalues(sym: &PauliSymbol, plan: &QuantPlan, window: Option<(f64, f64)>) -> Result<Spectrum> {
    quantize(sym, plan)?.eigenvalues(window)
}

/// Which Timmel-Mele model to sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum TmVariant {
    /// Low-energy model at each quasimomentum in the grid.
    Low { kx: Vec<f64> },
    /// Tight-binding model; single column at `kx = 0`.
    TightBinding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandTable {
    pub h: f64,
    pub kx: Vec<f64>,
    /// `bands[j][i]`: band `i` at `kx[j]`.
    pub bands: Vec<Vec<f64>>,
    /// Spread `max - min` of each band over the kx grid.
    pub variation: Vec<f64>,
}

impl BandTable {
    pub fn max_variation(&self) -> f64 {
        self.variation.iter().copied().fold(0.0, f64::max)
    }
}

/// Eigenvalues nearest zero as functions of `kx`.
///
/// With a window, each column holds the eigenvalues inside it (the count
/// must agree across columns). Without one, or when the window is empty,
/// each column holds the single eigenvalue closest to zero.
pub fn tm_bands(variant: &TmVariant, h: f64, modes: usize, window: Option<(f64, f64)>) -> Result<BandTable> {
    let kxs = match variant {
        TmVariant::Low { kx } => kx.clone(),
        TmVariant::TightBinding => vec![0.0],
    };
    if kxs.is_empty() {
        return Err(Error::InvalidArgument("empty kx grid".into()));
    }
    let mut spectra = Vec::with_capacity(kxs.len());
    for &kx in &kxs {
        let sym = match variant {
            TmVariant::Low { .. } => presets::timmel_mele_low(kx),
            TmVariant::TightBinding => presets::timmel_mele_tb(),
        };
        spectra.push(eigenvalues(&sym, &QuantPlan::torus(modes, h), None)?.values);
    }
    let pick_window = |vals: &[f64], (a, b): (f64, f64)| -> Vec<f64> {
        vals.iter().copied().filter(|&v| v >= a && v <= b).collect()
    };
    let nearest = |vals: &[f64]| -> Vec<f64> {
        vec![vals.iter().copied().min_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(f64::NAN)]
    };
    let mut bands: Vec<Vec<f64>> = match window {
        Some(w) => spectra.iter().map(|s| pick_window(s, w)).collect(),
        None => Vec::new(),
    };
    if bands.is_empty() || bands.iter().all(|b| b.is_empty()) {
        bands = spectra.iter().map(|s| nearest(s)).collect();
    }
    let count = bands[0].len();
    if bands.iter().any(|b| b.len() != count) {
        return Err(Error::InvalidArgument(format!(
            "band count varies over the kx grid: {:?}",
            bands.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    let variation = (0..count)
        .map(|i| {
            let (lo, hi) = bands.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), b| (lo.min(b[i]), hi.max(b[i])));
            hi - lo
        })
        .collect();
    Ok(BandTable { h, kx: kxs, bands, variation })
}

/// One row of a nearest-neighbour pairing between predicted and reference levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub predicted: f64,
    pub reference: Option<f64>,
}

impl Pairing {
    pub fn error(&self) -> Option<f64> {
        self.reference.map(|r| (self.predicted - r).abs())
    }
}

/// Pairs each predicted level with the nearest reference level, accepting the
/// pair when the distance is below half the local reference spacing.
/// Unmatched predictions are kept with `reference = None`; two predictions
/// claiming the same reference are a [`Error::MatchFailure`].
pub fn pair_levels(predicted: &[f64], reference: &[f64]) -> Result<Vec<Pairing>> {
    let mut refs = reference.to_vec();
    refs.sort_by(f64::total_cmp);
    let mut claimed: Vec<Option<f64>> = vec![None; refs.len()];
    let mut out = Vec::with_capacity(predicted.len());
    for &e in predicted {
        let Some(j) = (0..refs.len()).min_by(|&a, &b| (refs[a] - e).abs().total_cmp(&(refs[b] - e).abs())) else {
            out.push(Pairing { predicted: e, reference: None });
            continue;
        };
        let left = if j > 0 { refs[j] - refs[j - 1] } else { f64::INFINITY };
        let right = if j + 1 < refs.len() { refs[j + 1] - refs[j] } else { f64::INFINITY };
        let spacing = left.min(right);
        if (refs[j] - e).abs() < 0.5 * spacing {
            if let Some(prev) = claimed[j] {
                if prev != e {
                    return Err(Error::MatchFailure { energy: e });
                }
            }
            claimed[j] = Some(e);
            out.push(Pairing { predicted: e, reference: Some(refs[j]) });
        } else {
            out.push(Pairing { predicted: e, reference: None });
        }
    }
    Ok(out)
}
