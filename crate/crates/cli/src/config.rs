//! Run configuration: one JSON document, validated before any numerics.

use std::path::PathBuf;

use serde::Deserialize;

use semiclass::bs::GridOptions;
use semiclass::oracle::Basis;
use semiclass::phases::PhaseMode;
use semiclass::presets::Preset;
use semiclass::{Branch, Domain, PauliSymbol, QuantPlan, TraceOptions};

use crate::Failure;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub symbol: Option<SymbolSpec>,
    pub branch: Option<Branch>,
    /// Energy window `[a, b]` for the BS action and the oracle.
    pub window: Option<[f64; 2]>,
    /// Energies for `trace` and `phases`.
    pub energies: Option<Vec<f64>>,
    pub h: Option<Vec<f64>>,
    pub order: Option<u8>,
    /// Energy where the curve shrinks to a point (adds `S0 = 0` there).
    pub well_bottom: Option<f64>,
    #[serde(default)]
    pub tracer: TracerConfig,
    #[serde(default)]
    pub phase_mode: PhaseModeConfig,
    pub plan: Option<PlanConfig>,
    #[serde(default)]
    pub compare: CompareConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSpec {
    Preset(Preset),
    Inline(InlineSymbol),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineSymbol {
    #[serde(default = "inline_name")]
    pub name: String,
    /// `p0..p3`; empty strings are zero.
    pub p: [String; 4],
    #[serde(default)]
    pub r: [String; 4],
    #[serde(default = "line")]
    pub domain: Domain,
    pub seed: Option<[f64; 2]>,
}

fn inline_name() -> String {
    "inline".into()
}

fn line() -> Domain {
    Domain::Line
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TracerConfig {
    pub ds: Option<f64>,
    pub tol_level: Option<f64>,
    pub tol_close: Option<f64>,
    pub max_steps: Option<usize>,
    pub min_samples: Option<usize>,
    pub hint: Option<[f64; 2]>,
    #[serde(default)]
    pub vertical_search: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseModeConfig {
    #[default]
    Auto,
    Generic,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub basis: Basis,
    #[serde(default)]
    pub kx: f64,
    /// Eigenvalue window; defaults to the top-level `window`.
    pub window: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    #[serde(default)]
    pub select: Selection,
    /// Adds `-E` (with `-k`) for every positive BS root; only valid for
    /// symbols with `p0 = p3 = 0`, whose spectra are symmetric.
    #[serde(default)]
    pub mirror: bool,
}

/// Which oracle levels enter the comparison.
#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Selection {
    #[default]
    All,
    SmallestAbs {
        count: usize,
    },
    LowestPositive {
        count: usize,
    },
}

impl Selection {
    pub fn apply(self, values: &[f64]) -> Vec<f64> {
        let mut v = values.to_vec();
        match self {
            Selection::All => {}
            Selection::SmallestAbs { count } => {
                v.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
                v.truncate(count);
            }
            Selection::LowestPositive { count } => {
                v.retain(|&e| e > 0.0);
                v.sort_by(f64::total_cmp);
                v.truncate(count);
            }
        }
        v.sort_by(f64::total_cmp);
        v
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// Command-line values that override the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub h: Option<Vec<f64>>,
    pub order: Option<u8>,
    pub branch: Option<Branch>,
    pub window: Option<[f64; 2]>,
    pub out: Option<PathBuf>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::config(format!("config: {e}")))
    }

    pub fn apply(&mut self, o: Overrides) -> Result<(), Failure> {
        if let Some(name) = o.preset {
            let p = Preset::by_name(&name).ok_or_else(|| Failure::config(format!("unknown preset `{name}`")))?;
            self.symbol = Some(SymbolSpec::Preset(p));
        }
        if o.h.is_some() {
            self.h = o.h;
        }
        if o.order.is_some() {
            self.order = o.order;
        }
        if o.branch.is_some() {
            self.branch = o.branch;
        }
        if o.window.is_some() {
            self.window = o.window;
        }
        if o.out.is_some() {
            self.output.dir = o.out;
        }
        self.validate()
    }

    fn validate(&self) -> Result<(), Failure> {
        let bad = |m: String| Err(Failure::config(m));
        if let Some([a, b]) = self.window {
            if !(a < b) {
                return bad(format!("window [{a}, {b}] is empty"));
            }
        }
        if let Some(hs) = &self.h {
            if hs.is_empty() || hs.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
                return bad(format!("h must be a non-empty list of positive numbers, got {hs:?}"));
            }
        }
        if let Some(o) = self.order {
            if o > 1 {
                return bad(format!("order must be 0 or 1, got {o}"));
            }
        }
        if let Some(es) = &self.energies {
            if es.iter().any(|e| !e.is_finite()) {
                return bad("energies must be finite".into());
            }
        }
        Ok(())
    }

    pub fn symbol(&self) -> Result<PauliSymbol, Failure> {
        match &self.symbol {
            None => Err(Failure::config("no symbol: set `symbol` in the config or pass --preset".into())),
            Some(SymbolSpec::Preset(p)) => Ok(p.build()?),
            Some(SymbolSpec::Inline(s)) => {
                let p = [&*s.p[0], &*s.p[1], &*s.p[2], &*s.p[3]];
                let r = [&*s.r[0], &*s.r[1], &*s.r[2], &*s.r[3]];
                let sym = PauliSymbol::from_strings(s.name.clone(), p, r, s.domain)?;
                Ok(match s.seed {
                    Some([x, xi]) => sym.with_seed_hint(x, xi),
                    None => sym,
                })
            }
        }
    }

    pub fn branch(&self) -> Branch {
        self.branch.unwrap_or(Branch::Plus)
    }

    pub fn window(&self) -> Result<(f64, f64), Failure> {
        self.window.map(|[a, b]| (a, b)).ok_or_else(|| Failure::config("no energy window: set `window` or pass --window".into()))
    }

    pub fn hs(&self) -> Result<Vec<f64>, Failure> {
        self.h.clone().ok_or_else(|| Failure::config("no h: set `h` or pass --h".into()))
    }

    pub fn energies(&self) -> Result<Vec<f64>, Failure> {
        match &self.energies {
            Some(e) if !e.is_empty() => Ok(e.clone()),
            _ => Err(Failure::config("no energies: set `energies`".into())),
        }
    }

    pub fn trace_options(&self) -> TraceOptions {
        let t = &self.tracer;
        TraceOptions {
            ds: t.ds,
            tol_level: t.tol_level,
            tol_close: t.tol_close,
            max_steps: t.max_steps,
            min_samples: t.min_samples,
            hint: t.hint.map(|[x, xi]| (x, xi)),
            vertical_search: t.vertical_search,
            require_phi: false,
        }
    }

    pub fn phase_mode(&self) -> PhaseMode {
        match self.phase_mode {
            PhaseModeConfig::Auto => PhaseMode::Auto,
            PhaseModeConfig::Generic => PhaseMode::Generic,
        }
    }

    pub fn grid_options(&self) -> GridOptions {
        GridOptions {
            well_bottom: self.well_bottom,
            trace: self.trace_options(),
            phase_mode: self.phase_mode(),
            ..GridOptions::default()
        }
    }

    /// Quantization plan at `h`: the configured one, or the preset default.
    pub fn plan(&self, h: f64) -> Result<QuantPlan, Failure> {
        if let Some(p) = &self.plan {
            return Ok(QuantPlan { basis: p.basis, h, kx: p.kx });
        }
        let preset = match &self.symbol {
            Some(SymbolSpec::Preset(p)) => p,
            _ => return Err(Failure::config("no quantization plan: set `plan`".into())),
        };
        Ok(match preset {
            Preset::SimpleDirac => QuantPlan::line(8.0, 256, h),
            Preset::JackiwRebbi { .. } => QuantPlan::line(15.0, 256, h),
            Preset::RwExample => QuantPlan::line(2.0, 256, h),
            Preset::TimmelMeleLow { .. } => QuantPlan::torus(128, h),
            Preset::TimmelMeleTb => QuantPlan::torus(256, h),
            Preset::RadialDirac { .. } => {
                return Err(Failure::config("radial_dirac has no default plan: set `plan`".into()))
            }
        })
    }

    pub fn oracle_window(&self) -> Option<(f64, f64)> {
        self.plan.and_then(|p| p.window).or(self.window).map(|[a, b]| (a, b))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.output.dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::from_json(r#"{"symbol": {"preset": {"name": "rw_example"}}, "hh": [0.1]}"#).is_err());
        assert!(Config::from_json(r#"{"tracer": {"dss": 0.1}}"#).is_err());
        assert!(Config::from_json(r#"{"symbol": {"preset": {"name": "jackiw_rebbi", "m": 2}}}"#).is_err());
    }

    #[test]
    fn inline_symbol() {
        let c = Config::from_json(
            r#"{"symbol": {"inline": {"p": ["", "xi", "x", ""], "seed": [0, 0]}}, "window": [0.1, 1], "h": [0.1]}"#,
        )
        .unwrap();
        let s = c.symbol().unwrap();
        assert_eq!(s.eigenvalue(Branch::Plus, 3.0, 4.0).unwrap(), 5.0);
        assert_eq!(s.seed_hint, Some((0.0, 0.0)));
    }

    #[test]
    fn overrides_win() {
        let mut c = Config::from_json(r#"{"h": [0.1], "branch": "minus"}"#).unwrap();
        c.apply(Overrides { preset: Some("simple_dirac".into()), h: Some(vec![0.01]), ..Overrides::default() }).unwrap();
        assert_eq!(c.hs().unwrap(), vec![0.01]);
        assert_eq!(c.branch(), Branch::Minus);
        assert!(matches!(c.plan(0.01).unwrap().basis, Basis::FourierLine { .. }));
    }

    #[test]
    fn selections() {
        let v = [-0.3, 0.1, -0.05, 0.2, 0.4];
        assert_eq!(Selection::SmallestAbs { count: 3 }.apply(&v), vec![-0.05, 0.1, 0.2]);
        assert_eq!(Selection::LowestPositive { count: 2 }.apply(&v), vec![0.1, 0.2]);
    }
}
