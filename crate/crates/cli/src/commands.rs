//! The subcommands. Each returns the files it wrote.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use semiclass::bs::{ActionFunction, SpectrumRow};
use semiclass::curve::trace;
use semiclass::oracle::eigenvalues;
use semiclass::phases::assemble_with;
use semiclass::presets::CATALOG;
use semiclass::table;

use crate::config::{Config, Format};
use crate::Failure;

/// Writes `contents` to `dir/name` through a temporary file and a rename.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Failure::io(dir, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| Failure::io(tmp.path(), e))?;
    let path = dir.join(name);
    tmp.persist(&path).map_err(|e| Failure::io(&path, e.error))?;
    Ok(path)
}

pub fn trace_curves(cfg: &Config) -> Result<Vec<PathBuf>, Failure> {
    let sym = cfg.symbol()?;
    let branch = cfg.branch();
    let opts = cfg.trace_options();
    let mut out = Vec::new();
    for e in cfg.energies()? {
        let c = trace(&sym, branch, e, &opts)?;
        out.push(write_atomic(&cfg.out_dir(), &format!("curve_{}_E{e}.csv", branch.name()), &table::curve_csv(&c))?);
    }
    Ok(out)
}

pub fn phases(cfg: &Config) -> Result<Vec<PathBuf>, Failure> {
    let sym = cfg.symbol()?;
    let branch = cfg.branch();
    let opts = cfg.trace_options();
    let reports = cfg
        .energies()?
        .into_iter()
        .map(|e| {
            let c = trace(&sym, branch, e, &opts)?;
            assemble_with(&sym, branch, &c, cfg.phase_mode())
        })
        .collect::<semiclass::Result<Vec<_>>>()?;
    let path = match cfg.output.format {
        Format::Csv => write_atomic(&cfg.out_dir(), "phases.csv", &table::phases_csv(&reports))?,
        Format::Json => {
            let text = serde_json::to_string_pretty(&reports).expect("phase reports serialize") + "\n";
            write_atomic(&cfg.out_dir(), "phases.json", &text)?
        }
    };
    Ok(vec![path])
}

pub fn bs_spectrum(cfg: &Config) -> Result<Vec<PathBuf>, Failure> {
    let sym = cfg.symbol()?;
    let order = cfg.order.unwrap_or(1);
    let opts = cfg.grid_options();
    let mut out = Vec::new();
    for h in cfg.hs()? {
        let t = ActionFunction::build(&sym, cfg.branch(), cfg.window()?, h, order, &opts)?.predict_spectrum()?;
        out.push(write_atomic(&cfg.out_dir(), &format!("spectrum_h{h}_order{order}.csv"), &table::spectrum_csv(&t))?);
    }
    Ok(out)
}

pub fn oracle_spectrum(cfg: &Config) -> Result<Vec<PathBuf>, Failure> {
    let sym = cfg.symbol()?;
    let mut out = Vec::new();
    for h in cfg.hs()? {
        let s = eigenvalues(&sym, &cfg.plan(h)?, cfg.oracle_window())?;
        out.push(write_atomic(&cfg.out_dir(), &format!("eigenvalues_h{h}.csv"), &table::eigenvalues_csv(&s.values))?);
    }
    Ok(out)
}

fn mirrored(rows: &[SpectrumRow]) -> Vec<SpectrumRow> {
    let mut all = rows.to_vec();
    all.extend(rows.iter().filter(|r| r.k != 0).map(|r| SpectrumRow { k: -r.k, e_pred: -r.e_pred, ..*r }));
    all.sort_by(|a, b| a.e_pred.total_cmp(&b.e_pred));
    all
}

pub fn compare(cfg: &Config) -> Result<Vec<PathBuf>, Failure> {
    let sym = cfg.symbol()?;
    if cfg.compare.mirror && !(sym.p[0].is_zero() && sym.p[3].is_zero()) {
        return Err(Failure::config("compare.mirror needs p0 = p3 = 0".into()));
    }
    let opts = cfg.grid_options();
    let window = cfg.window()?;
    let mut out = Vec::new();
    for h in cfg.hs()? {
        let mut tables = Vec::new();
        for order in [0, 1] {
            let rows = ActionFunction::build(&sym, cfg.branch(), window, h, order, &opts)?.predict_spectrum()?.rows;
            tables.push(if cfg.compare.mirror { mirrored(&rows) } else { rows });
        }
        let oracle = eigenvalues(&sym, &cfg.plan(h)?, cfg.oracle_window())?.values;
        let selected = cfg.compare.select.apply(&oracle);
        let rows = table::compare_rows(&tables[0], &tables[1], &selected)?;
        out.push(write_atomic(&cfg.out_dir(), &format!("compare_h{h}.csv"), &table::compare_csv(&rows))?);
    }
    Ok(out)
}

pub fn presets_listing() -> String {
    let mut s = String::new();
    for (name, params, doc) in CATALOG {
        let params = if params.is_empty() { "-" } else { params };
        s.push_str(&format!("{name}\n  parameters: {params}\n  {doc}\n"));
    }
    s
}
