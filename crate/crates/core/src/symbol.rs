//! The 2x2 self-adjoint symbol `H0 + h H1` in Pauli form.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse, Expr, Program};

/// A scalar field with compiled evaluation and optional closed-form partials.
#[derive(Debug, Clone)]
pub struct Field {
    expr: Expr,
    prog: Program,
    partials: Option<(Program, Program)>,
}

impl Field {
    pub fn new(expr: Expr) -> Field {
        let prog = expr.compile();
        Field { expr, prog, partials: None }
    }

    pub fn parse(text: &str) -> Result<Field> {
        Ok(Field::new(parse(text)?))
    }

    pub fn zero() -> Field {
        Field::new(Expr::Num(0.0))
    }

    /// Registers closed-form partial derivatives `(d/dx, d/dxi)`.
    pub fn with_partials(mut self, dx: Expr, dxi: Expr) -> Field {
        self.partials = Some((dx.compile(), dxi.compile()));
        self
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn is_zero(&self) -> bool {
        self.prog.as_const() == Some(0.0)
    }

    pub fn value(&self, x: f64, xi: f64) -> Result<f64> {
        self.prog.eval(x, xi)
    }

    pub fn grad(&self, x: f64, xi: f64) -> Result<(f64, f64)> {
        match &self.partials {
            Some((dx, dxi)) => Ok((dx.eval(x, xi)?, dxi.eval(x, xi)?)),
            None => self.prog.grad(x, xi, 1.0),
        }
    }

    pub fn negated(&self) -> Field {
        if self.is_zero() {
            return self.clone();
        }
        // registered partials are dropped; the negated field falls back to differences
        Field::new(Expr::Neg(Box::new(self.expr.clone())))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Line,
    TorusX { period_x: f64 },
    TorusXXi { period_x: f64, period_xi: f64 },
}

impl Domain {
    pub fn period_x(&self) -> Option<f64> {
        match *self {
            Domain::Line => None,
            Domain::TorusX { period_x } | Domain::TorusXXi { period_x, .. } => Some(period_x),
        }
    }

    pub fn period_xi(&self) -> Option<f64> {
        match *self {
            Domain::TorusXXi { period_xi, .. } => Some(period_xi),
            _ => None,
        }
    }

    pub fn is_torus(&self) -> bool {
        !matches!(self, Domain::Line)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn opposite(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Branch> {
        match s {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            _ => Err(Error::InvalidArgument(format!("unknown branch `{s}`"))),
        }
    }
}

/// `H0 = p0 s0 + p1 s1 + p2 s2 + p3 s3`, `H1 = r0 s0 + ... + r3 s3`.
#[derive(Debug, Clone)]
pub struct PauliSymbol {
    pub name: String,
    pub p: [Field; 4],
    pub r: [Field; 4],
    pub domain: Domain,
    /// Starting point for the level-set seed search.
    pub seed_hint: Option<(f64, f64)>,
}

impl PauliSymbol {
    pub fn new(name: impl Into<String>, p: [Field; 4], r: [Field; 4], domain: Domain) -> Result<PauliSymbol> {
        let sym = PauliSymbol { name: name.into(), p, r, domain, seed_hint: None };
        sym.check_periodic()?;
        Ok(sym)
    }

    /// Builds a symbol from expression strings; missing entries are zero.
    pub fn from_strings(name: impl Into<String>, p: [&str; 4], r: [&str; 4], domain: Domain) -> Result<PauliSymbol> {
        let field = |s: &str| if s.trim().is_empty() { Ok(Field::zero()) } else { Field::parse(s) };
        let p = [field(p[0])?, field(p[1])?, field(p[2])?, field(p[3])?];
        let r = [field(r[0])?, field(r[1])?, field(r[2])?, field(r[3])?];
        PauliSymbol::new(name, p, r, domain)
    }

    pub fn with_seed_hint(mut self, x: f64, xi: f64) -> PauliSymbol {
        self.seed_hint = Some((x, xi));
        self
    }

    fn check_periodic(&self) -> Result<()> {
        let (px, pxi) = (self.domain.period_x(), self.domain.period_xi());
        if px.is_none() {
            return Ok(());
        }
        let names = ["p0", "p1", "p2", "p3", "r0", "r1", "r2", "r3"];
        for (field, name) in self.p.iter().chain(self.r.iter()).zip(names) {
            for j in 0..16 {
                let x = 0.137 + 0.61 * j as f64;
                let xi = -1.3 + 0.29 * j as f64;
                let base = field.value(x, xi)?;
                let scale = base.abs().max(1.0);
                let mut shifted = vec![field.value(x + px.unwrap(), xi)?];
                if let Some(pxi) = pxi {
                    shifted.push(field.value(x, xi + pxi)?);
                }
                if shifted.iter().any(|v| (v - base).abs() > 1e-10 * scale) {
                    return Err(Error::NotPeriodic { field: name.into() });
                }
            }
        }
        Ok(())
    }

    /// The symbol of `-H`.
    pub fn negated(&self) -> PauliSymbol {
        let neg = |fs: &[Field; 4]| [fs[0].negated(), fs[1].negated(), fs[2].negated(), fs[3].negated()];
        PauliSymbol {
            name: format!("-{}", self.name),
            p: neg(&self.p),
            r: neg(&self.r),
            domain: self.domain,
            seed_hint: self.seed_hint,
        }
    }

    pub fn has_subprincipal(&self) -> bool {
        self.r.iter().any(|f| !f.is_zero())
    }

    pub fn p_values(&self, x: f64, xi: f64) -> Result<[f64; 4]> {
        Ok([
            self.p[0].value(x, xi)?,
            self.p[1].value(x, xi)?,
            self.p[2].value(x, xi)?,
            self.p[3].value(x, xi)?,
        ])
    }

    pub fn norm_p(&self, x: f64, xi: f64) -> Result<f64> {
        let p = self.p_values(x, xi)?;
        Ok((p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt())
    }

    pub fn eigenvalue(&self, branch: Branch, x: f64, xi: f64) -> Result<f64> {
        let p = self.p_values(x, xi)?;
        Ok(p[0] + branch.sign() * (p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt())
    }

    /// `(mu, d mu/dx, d mu/dxi)`.
    pub fn eigenvalue_grad(&self, branch: Branch, x: f64, xi: f64) -> Result<(f64, f64, f64)> {
        let pt = self.local(x, xi)?;
        let (gx, gxi) = pt.mu_grad(branch)?;
        Ok((pt.mu(branch), gx, gxi))
    }

    /// `(theta, phi)` with `theta` in `[0, pi]` and `phi` in `(-pi, pi]`.
    pub fn spherical(&self, x: f64, xi: f64) -> Result<(f64, f64)> {
        let pt = self.local(x, xi)?;
        Ok((pt.theta()?, pt.phi()?))
    }

    pub fn eigenvector(&self, branch: Branch, x: f64, xi: f64) -> Result<[Complex64; 2]> {
        let pt = self.local(x, xi)?;
        let theta = pt.theta()?;
        let phi = pt.phi()?;
        Ok(eigenvector_from_angles(branch, theta, phi))
    }

    pub fn f1_integrand(&self, branch: Branch, x: f64, xi: f64) -> Result<f64> {
        Ok(self.local(x, xi)?.f1_parts(branch)?.total())
    }

    /// Values and gradients of all eight fields at one point.
    pub fn local(&self, x: f64, xi: f64) -> Result<Local> {
        let mut p = [0.0; 4];
        let mut dp = [(0.0, 0.0); 4];
        let mut r = [0.0; 4];
        for i in 0..4 {
            p[i] = self.p[i].value(x, xi)?;
            dp[i] = self.p[i].grad(x, xi)?;
            r[i] = self.r[i].value(x, xi)?;
        }
        Ok(Local { x, xi, p, dp, r })
    }

    /// 2x2 matrix of `H0` at a point, row major.
    pub fn h0_matrix(&self, x: f64, xi: f64) -> Result<[[Complex64; 2]; 2]> {
        Ok(pauli_matrix(self.p_values(x, xi)?))
    }

    pub fn h1_matrix(&self, x: f64, xi: f64) -> Result<[[Complex64; 2]; 2]> {
        let r = [
            self.r[0].value(x, xi)?,
            self.r[1].value(x, xi)?,
            self.r[2].value(x, xi)?,
            self.r[3].value(x, xi)?,
        ];
        Ok(pauli_matrix(r))
    }
}

pub fn pauli_matrix(c: [f64; 4]) -> [[Complex64; 2]; 2] {
    [
        [Complex64::new(c[0] + c[3], 0.0), Complex64::new(c[1], -c[2])],
        [Complex64::new(c[1], c[2]), Complex64::new(c[0] - c[3], 0.0)],
    ]
}

pub fn eigenvector_from_angles(branch: Branch, theta: f64, phi: f64) -> [Complex64; 2] {
    let (s, c) = (0.5 * theta).sin_cos();
    match branch {
        Branch::Plus => [Complex64::new(c, 0.0), Complex64::from_polar(s, phi)],
        Branch::Minus => [-Complex64::from_polar(s, -phi), Complex64::new(c, 0.0)],
    }
}

/// Poisson bracket `{a, b} = a_xi b_x - a_x b_xi` of two gradients `(d/dx, d/dxi)`.
pub fn bracket(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.1 * b.0 - a.0 * b.1
}

/// The four pieces of the subprincipal integrand `f1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F1Parts {
    /// `r0 +- sum r_i p_i / |P|`.
    pub h1: f64,
    /// `|P| (sin theta / 2) {theta, phi}`.
    pub mu1_a: f64,
    /// `+-((1 - cos theta) / 2) {mu, phi}`.
    pub mu1_b: f64,
    /// `(+-p0 + |P|)(sin theta / 4) {theta, phi}`.
    pub mu1_c: f64,
}

impl F1Parts {
    pub fn total(&self) -> f64 {
        self.h1 + self.mu1_a + self.mu1_b + self.mu1_c
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Local {
    pub x: f64,
    pub xi: f64,
    pub p: [f64; 4],
    pub dp: [(f64, f64); 4],
    pub r: [f64; 4],
}

impl Local {
    pub fn rho(&self) -> f64 {
        (self.p[1] * self.p[1] + self.p[2] * self.p[2] + self.p[3] * self.p[3]).sqrt()
    }

    fn planar_sq(&self) -> f64 {
        self.p[1] * self.p[1] + self.p[2] * self.p[2]
    }

    pub fn mu(&self, branch: Branch) -> f64 {
        self.p[0] + branch.sign() * self.rho()
    }

    fn crossing(&self) -> Error {
        Error::CrossingError { x: self.x, xi: self.xi }
    }

    fn pole(&self) -> Error {
        Error::PoleError { x: self.x, xi: self.xi }
    }

    fn check_rho(&self) -> Result<f64> {
        let rho = self.rho();
        if rho > 0.0 {
            Ok(rho)
        } else {
            Err(self.crossing())
        }
    }

    fn check_pole(&self) -> Result<(f64, f64)> {
        let rho = self.check_rho()?;
        let s2 = self.planar_sq();
        if s2 < 1e-12 * rho * rho {
            return Err(self.pole());
        }
        Ok((rho, s2))
    }

    /// Gradient of `|P|`.
    pub fn rho_grad(&self) -> Result<(f64, f64)> {
        let rho = self.check_rho()?;
        let (mut gx, mut gxi) = (0.0, 0.0);
        for i in 1..4 {
            gx += self.p[i] * self.dp[i].0;
            gxi += self.p[i] * self.dp[i].1;
        }
        Ok((gx / rho, gxi / rho))
    }

    pub fn mu_grad(&self, branch: Branch) -> Result<(f64, f64)> {
        let (rx, rxi) = self.rho_grad()?;
        let s = branch.sign();
        Ok((self.dp[0].0 + s * rx, self.dp[0].1 + s * rxi))
    }

    pub fn theta(&self) -> Result<f64> {
        let rho = self.check_rho()?;
        Ok((self.p[3] / rho).clamp(-1.0, 1.0).acos())
    }

    pub fn phi(&self) -> Result<f64> {
        self.check_pole()?;
        // p2 = -0 is treated as +0 so that phi = pi on the negative p1 axis
        Ok((self.p[2] + 0.0).atan2(self.p[1]))
    }

    pub fn theta_grad(&self) -> Result<(f64, f64)> {
        let (rho, s2) = self.check_pole()?;
        let s = s2.sqrt();
        let rho2 = rho * rho;
        let d = |k: usize| {
            let dot: f64 = (1..4).map(|i| self.p[i] * if k == 0 { self.dp[i].0 } else { self.dp[i].1 }).sum();
            let d3 = if k == 0 { self.dp[3].0 } else { self.dp[3].1 };
            (self.p[3] * dot - rho2 * d3) / (rho2 * s)
        };
        Ok((d(0), d(1)))
    }

    pub fn phi_grad(&self) -> Result<(f64, f64)> {
        let (_, s2) = self.check_pole()?;
        let (p1, p2) = (self.p[1], self.p[2]);
        Ok((
            (p1 * self.dp[2].0 - p2 * self.dp[1].0) / s2,
            (p1 * self.dp[2].1 - p2 * self.dp[1].1) / s2,
        ))
    }

    /// `<H1 u, u>` for the branch eigenvector.
    pub fn h1_expectation(&self, branch: Branch) -> Result<f64> {
        let rho = self.check_rho()?;
        let dot = self.r[1] * self.p[1] + self.r[2] * self.p[2] + self.r[3] * self.p[3];
        Ok(self.r[0] + branch.sign() * dot / rho)
    }

    pub fn f1_parts(&self, branch: Branch) -> Result<F1Parts> {
        let h1 = self.h1_expectation(branch)?;
        let rho = self.rho();
        let theta = self.theta()?;
        let dtheta = self.theta_grad()?;
        let dphi = self.phi_grad()?;
        let dmu = self.mu_grad(branch)?;
        let tp = bracket(dtheta, dphi);
        let s = branch.sign();
        let (sin_t, cos_t) = theta.sin_cos();
        Ok(F1Parts {
            h1,
            mu1_a: rho * 0.5 * sin_t * tp,
            mu1_b: s * 0.5 * (1.0 - cos_t) * bracket(dmu, dphi),
            mu1_c: (s * self.p[0] + rho) * 0.25 * sin_t * tp,
        })
    }

    /// Berry integrand `+-((1 - cos theta)/2){mu, phi}`.
    pub fn berry_density(&self, branch: Branch) -> Result<f64> {
        Ok(self.f1_parts(branch)?.mu1_b)
    }

    /// Rammal-Wilkinson integrand `(+-p0 + 3|P|)(sin theta / 4){theta, phi}`.
    pub fn rw_density(&self, branch: Branch) -> Result<f64> {
        let rho = self.check_rho()?;
        let theta = self.theta()?;
        let tp = bracket(self.theta_grad()?, self.phi_grad()?);
        Ok((branch.sign() * self.p[0] + 3.0 * rho) * 0.25 * theta.sin() * tp)
    }
}
