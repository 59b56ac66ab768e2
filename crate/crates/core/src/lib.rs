//! Semiclassical Bohr-Sommerfeld spectra for self-adjoint 2x2 systems
//! `H0 + h H1` on the line or the torus, together with a Weyl-quantized
//! eigensolver that serves as ground truth.

pub mod bs;
pub mod curve;
pub mod error;
pub mod expr;
pub mod oracle;
pub mod phases;
pub mod presets;
pub mod symbol;
pub mod table;

pub use curve::{LevelCurve, Region, Sample, TraceOptions};
pub use error::{Error, Result};
pub use expr::Expr;
pub use oracle::{HermitianMatrix, QuantPlan};
pub use phases::{PhaseReport, Plane};
pub use symbol::{Branch, Domain, PauliSymbol};
