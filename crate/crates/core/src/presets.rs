//! Named model symbols.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::symbol::{Domain, PauliSymbol};

const NONE: [&str; 4] = ["", "", "", ""];

/// `p1 = xi`, `p2 = x`: level sets of the plus branch are circles.
pub fn simple_dirac() -> PauliSymbol {
    PauliSymbol::from_strings("simple_dirac", ["", "xi", "x", ""], NONE, Domain::Line)
        .expect("preset parses")
        .with_seed_hint(0.0, 0.0)
}

/// Jackiw-Rebbi: `p1 = xi`, `p2 = m0 tanh(x)`.
pub fn jackiw_rebbi(m0: f64) -> PauliSymbol {
    let p2 = format!("{} * tanh(x)", crate::expr::Expr::num(m0));
    PauliSymbol::from_strings("jackiw_rebbi", ["", "xi", &p2, ""], NONE, Domain::Line)
        .expect("preset parses")
        .with_seed_hint(0.0, 0.0)
}

/// `P = (x, xi, x^2)`, a symbol with non-planar `P`.
pub fn rw_example() -> PauliSymbol {
    PauliSymbol::from_strings("rw_example", ["", "x", "xi", "x^2"], NONE, Domain::Line)
        .expect("preset parses")
        .with_seed_hint(0.0, 0.0)
}

const TM_P0: &str = "1 - cos(2*pi*x)";
const TM_P1: &str = "-sqrt(3) * sin(2*pi*x)";

/// Timmel-Mele low-energy model with quasimomentum `kx`, `H1 = -kx s2`.
pub fn timmel_mele_low(kx: f64) -> PauliSymbol {
    let r2 = crate::expr::Expr::num(-kx).to_string();
    PauliSymbol::from_strings(
        "timmel_mele_low",
        [TM_P0, TM_P1, "-xi", ""],
        ["", "", &r2, ""],
        Domain::TorusX { period_x: 1.0 },
    )
    .expect("preset parses")
    .with_seed_hint(0.5, 0.0)
}

/// Timmel-Mele tight-binding model.
pub fn timmel_mele_tb() -> PauliSymbol {
    PauliSymbol::from_strings(
        "timmel_mele_tb",
        [TM_P0, TM_P1, "-(2*cos(2*pi*xi) + 1)", ""],
        NONE,
        Domain::TorusXXi { period_x: 1.0, period_xi: 1.0 },
    )
    .expect("preset parses")
    .with_seed_hint(0.5, 0.5)
}

/// Radial partial-wave Dirac operator on the half line `x = r > 0`:
/// `p0 = phi_el`, `p1 = kappa/x + phi_am`, `p2 = xi`, `p3 = phi_sc`.
/// The rest mass term belongs in `phi_sc`.
pub fn radial_dirac(kappa: f64, phi_el: &str, phi_am: &str, phi_sc: &str) -> Result<PauliSymbol> {
    let p1 = format!("{} / x + ({})", crate::expr::Expr::num(kappa), if phi_am.trim().is_empty() { "0" } else { phi_am });
    Ok(PauliSymbol::from_strings("radial_dirac", [phi_el, &p1, "xi", phi_sc], NONE, Domain::Line)?
        .with_seed_hint(1.0, 0.0))
}

/// Preset selection as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Preset {
    SimpleDirac,
    JackiwRebbi {
        #[serde(default = "one")]
        m0: f64,
    },
    RwExample,
    TimmelMeleLow {
        #[serde(default)]
        kx: f64,
    },
    TimmelMeleTb,
    RadialDirac {
        kappa: f64,
        #[serde(default)]
        phi_el: String,
        #[serde(default)]
        phi_am: String,
        phi_sc: String,
    },
}

fn one() -> f64 {
    1.0
}

impl Preset {
    pub fn build(&self) -> Result<PauliSymbol> {
        Ok(match self {
            Preset::SimpleDirac => simple_dirac(),
            Preset::JackiwRebbi { m0 } => jackiw_rebbi(*m0),
            Preset::RwExample => rw_example(),
            Preset::TimmelMeleLow { kx } => timmel_mele_low(*kx),
            Preset::TimmelMeleTb => timmel_mele_tb(),
            Preset::RadialDirac { kappa, phi_el, phi_am, phi_sc } => radial_dirac(*kappa, phi_el, phi_am, phi_sc)?,
        })
    }

    /// Preset with default parameters, by name.
    pub fn by_name(name: &str) -> Option<Preset> {
        Some(match name {
            "simple_dirac" => Preset::SimpleDirac,
            "jackiw_rebbi" => Preset::JackiwRebbi { m0: 1.0 },
            "rw_example" => Preset::RwExample,
            "timmel_mele_low" => Preset::TimmelMeleLow { kx: 0.0 },
            "timmel_mele_tb" => Preset::TimmelMeleTb,
            "radial_dirac" => Preset::RadialDirac {
                kappa: 1.0,
                phi_el: String::new(),
                phi_am: String::new(),
                phi_sc: "1 + x^2".into(),
            },
            _ => return None,
        })
    }
}

/// `(name, parameters, description)` for every preset.
pub const CATALOG: &[(&str, &str, &str)] = &[
    ("simple_dirac", "", "p1 = xi, p2 = x; circular level sets, S0 = pi E^2"),
    ("jackiw_rebbi", "m0 = 1", "p1 = xi, p2 = m0 tanh(x); domain wall with a zero mode"),
    ("rw_example", "", "P = (x, xi, x^2); non-trivial Rammal-Wilkinson phase"),
    ("timmel_mele_low", "kx = 0", "torus in x; p0 = 1 - cos 2pi x, p1 = -sqrt3 sin 2pi x, p2 = -xi, r2 = -kx"),
    ("timmel_mele_tb", "", "torus in x and xi; as timmel_mele_low with p2 = -(2 cos 2pi xi + 1)"),
    (
        "radial_dirac",
        "kappa, phi_el = 0, phi_am = 0, phi_sc",
        "half line r > 0; p0 = phi_el, p1 = kappa/r + phi_am, p2 = xi, p3 = phi_sc (mass included)",
    ),
];
