//! CSV renderings of curves, phase reports, spectra and band tables.
//!
//! Numbers are written with 17 significant digits, `,` separated, LF
//! terminated, so identical runs give identical bytes.

use std::io::Write;

use crate::bs::{SpectrumRow, SpectrumTable};
use crate::curve::LevelCurve;
use crate::oracle::{BandTable, Pairing};
use crate::phases::PhaseReport;

/// `f64` with 17 significant digits.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn render<I, R>(comments: &[String], header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut out: Vec<u8> = Vec::new();
    for c in comments {
        writeln!(out, "# {c}").expect("write to memory");
    }
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut out);
        w.write_record(header).expect("write to memory");
        for row in rows {
            w.write_record(row.into_iter().collect::<Vec<_>>()).expect("write to memory");
        }
        w.flush().expect("write to memory");
    }
    String::from_utf8(out).expect("csv output is utf-8")
}

/// Columns `t, x, xi`; the header comment records `E`, branch, period and region.
pub fn curve_csv(c: &LevelCurve) -> String {
    let comments = [format!(
        "E={} branch={} period_T={} region={}",
        num(c.energy),
        c.branch.name(),
        num(c.period_t),
        c.region.name()
    )];
    render(&comments, &["t", "x", "xi"], c.samples.iter().map(|s| [num(s.t), num(s.x), num(s.xi)]))
}

pub const PHASE_HEADER: [&str; 9] = ["E", "branch", "S0", "theta_B", "theta_RW", "I_H1", "S1", "winding", "quantized"];

pub fn phase_row(r: &PhaseReport) -> [String; 9] {
    [
        num(r.energy),
        r.branch.name().to_string(),
        num(r.s0),
        num(r.theta_b),
        num(r.theta_rw),
        num(r.i_h1),
        num(r.s1),
        r.winding.map(|w| w.to_string()).unwrap_or_default(),
        r.quantized_branch_used.to_string(),
    ]
}

pub fn phases_csv(rows: &[PhaseReport]) -> String {
    render(&[], &PHASE_HEADER, rows.iter().map(phase_row))
}

pub fn spectrum_csv(t: &SpectrumTable) -> String {
    render(
        &[],
        &["k", "E_pred", "order", "residual"],
        t.rows.iter().map(|r| [r.k.to_string(), num(r.e_pred), r.order.to_string(), num(r.residual)]),
    )
}

/// Columns `index, value`.
pub fn eigenvalues_csv(values: &[f64]) -> String {
    render(&[], &["index", "value"], values.iter().enumerate().map(|(i, v)| [i.to_string(), num(*v)]))
}

/// Columns `kx, E1, E2, ...`.
pub fn bands_csv(b: &BandTable) -> String {
    let count = b.bands.first().map_or(0, Vec::len);
    let names: Vec<String> = (1..=count).map(|i| format!("E{i}")).collect();
    let mut header = vec!["kx"];
    header.extend(names.iter().map(String::as_str));
    render(
        &[],
        &header,
        b.kx.iter().zip(&b.bands).map(|(kx, row)| std::iter::once(num(*kx)).chain(row.iter().map(|v| num(*v)))),
    )
}

/// One row of the BS-versus-oracle comparison, keyed by an oracle level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    /// Quantum number of the matched BS root, if any.
    pub k: Option<i64>,
    pub e_order0: Option<f64>,
    pub e_order1: Option<f64>,
    pub e_oracle: f64,
}

impl CompareRow {
    pub fn delta0(&self) -> Option<f64> {
        Some((self.e_order0? - self.e_oracle).abs())
    }

    pub fn delta1(&self) -> Option<f64> {
        Some((self.e_order1? - self.e_oracle).abs())
    }
}

/// Columns `k, E_bs_order0, E_bs_order1, E_oracle, delta0, delta1`; empty
/// cells mark oracle levels without a BS partner.
pub fn compare_csv(rows: &[CompareRow]) -> String {
    render(
        &[],
        &["k", "E_bs_order0", "E_bs_order1", "E_oracle", "delta0", "delta1"],
        rows.iter().map(|r| {
            [
                r.k.map(|k| k.to_string()).unwrap_or_default(),
                opt(r.e_order0),
                opt(r.e_order1),
                num(r.e_oracle),
                opt(r.delta0()),
                opt(r.delta1()),
            ]
        }),
    )
}

/// Pairs every oracle level with the nearest BS root of each order (within
/// half the local spacing of the roots). `k` comes from the order-1 partner
/// when there is one.
pub fn compare_rows(order0: &[SpectrumRow], order1: &[SpectrumRow], oracle: &[f64]) -> crate::Result<Vec<CompareRow>> {
    let mut levels = oracle.to_vec();
    levels.sort_by(f64::total_cmp);
    let partner = |rows: &[SpectrumRow]| -> crate::Result<Vec<Option<SpectrumRow>>> {
        let e: Vec<f64> = rows.iter().map(|r| r.e_pred).collect();
        let pairs: Vec<Pairing> = crate::oracle::pair_levels(&levels, &e)?;
        Ok(pairs
            .iter()
            .map(|p| p.reference.and_then(|r| rows.iter().find(|row| row.e_pred == r).copied()))
            .collect())
    };
    let p0 = partner(order0)?;
    let p1 = partner(order1)?;
    Ok(levels
        .iter()
        .zip(p0.iter().zip(&p1))
        .map(|(&e, (a, b))| CompareRow {
            k: b.or(*a).map(|r| r.k),
            e_order0: a.map(|r| r.e_pred),
            e_order1: b.map(|r| r.e_pred),
            e_oracle: e,
        })
        .collect())
}
