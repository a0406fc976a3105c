//! Sweeps, figure reproduction and verification on top of `qread-core`.

pub mod config;
pub mod figures;
pub mod output;
pub mod sweep;
pub mod verify;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use qread_core::discrimination::ReportOptions;
use qread_core::{bound_report, info_report, ReadoutScenario, Transmitter};

use config::{ConfigError, OutputKind, SweepConfig};

/// Overrides every other output directory setting.
pub const OUT_DIR_ENV: &str = "QREAD_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] qread_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Environment override, then the explicit setting, then the working directory.
pub fn resolve_out_dir(configured: Option<&Path>) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => configured.map_or_else(|| PathBuf::from("."), Path::to_path_buf),
    }
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf, CliError> {
    fs::write(&path, contents).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok(path)
}

/// Runs a sweep and writes `<name>.csv` (and SVG plots when requested).
pub fn run_and_write(config: &SweepConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let table = sweep::run_sweep(config)?;
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    if config.outputs.contains(&OutputKind::Csv) {
        written.push(write(dir.join(format!("{}.csv", config.name)), &output::to_csv(&table))?);
    }
    if config.outputs.contains(&OutputKind::Svg) {
        for (suffix, svg) in output::sweep_plots(&table) {
            written.push(write(dir.join(format!("{}{suffix}.svg", config.name)), &svg)?);
        }
    }
    Ok(written)
}

/// One scenario as `key=value` lines.
pub fn bounds_text(scenario: &ReadoutScenario, transmitter: &Transmitter) -> Result<String, CliError> {
    let r = bound_report(scenario, transmitter, ReportOptions::default())?;
    let info = info_report(scenario, transmitter)?;
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k}={v}");
    };
    kv("transmitter", transmitter.label());
    kv("copies", r.copies.to_string());
    kv("n_s", r.n_s.to_string());
    kv("n_b", r.n_b.to_string());
    kv("r0", scenario.r0.to_string());
    kv("r1", scenario.r1.to_string());
    let ln = |k: &str, b: qread_core::discrimination::Bound<qread_core::LnProb>, kv: &mut dyn FnMut(&str, String)| {
        kv(&format!("ln_{k}"), output::format_value(b.value.0));
        kv(&format!("log10_{k}"), output::format_value(b.value.log10()));
        kv(&format!("{k}.method"), b.method.tag().to_string());
    };
    ln("p_qcb", r.ln_p_qcb, &mut kv);
    if let Some(b) = r.ln_p_qcb_closed {
        // the photon-coherent closed form is the quoted one, not checked against the states
        let key = if matches!(transmitter, Transmitter::PhotonCoherent { .. }) { "p_qcb_quoted" } else { "p_qcb_closed" };
        ln(key, b, &mut kv);
    }
    if let Some(b) = r.ln_p_qcb_numeric {
        ln("p_qcb_numeric", b, &mut kv);
    }
    ln("p_classical_lb", r.ln_p_classical_lb, &mut kv);
    if let Some(h) = r.p_helstrom {
        kv("p_helstrom", output::format_value(h.value));
        kv("p_helstrom.method", h.method.tag().to_string());
    }
    kv("j_min_quantum", output::format_value(info.j_min_quantum));
    kv("j_max_classical", output::format_value(info.j_max_classical));
    kv("gain", output::format_value(info.gain));
    Ok(s)
}
