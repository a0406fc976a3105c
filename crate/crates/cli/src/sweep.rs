//! Bounds and information as functions of the number of copies.

use std::f64::consts::LN_10;

use qread_core::discrimination::{classical_lb_noisy_ln, psi_qcb_quoted};
use qread_core::{InfoReport, LnProb, PerCopy, StateFactory, Transmitter};

use crate::config::{slug, SweepConfig};

/// Result of a sweep: column names, rows (first column is `M`), and header
/// comments recording the parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

fn log10(p: LnProb) -> f64 {
    p.0 / LN_10
}

/// Quoted closed form for the photon⊕coherent family, when it applies.
fn quoted_psi(t: &Transmitter, n_b: f64, copies: usize) -> Option<LnProb> {
    match t {
        Transmitter::PhotonCoherent { alpha } if alpha.im == 0.0 => psi_qcb_quoted(t.signal_mean(), n_b, copies).ok(),
        _ => None,
    }
}

pub fn run_sweep(config: &SweepConfig) -> qread_core::Result<SweepTable> {
    let factory = StateFactory::default();
    let per_copy: Vec<PerCopy> =
        config.transmitters.iter().map(|t| PerCopy::new(&factory, t, config.n_b)).collect::<Result<_, _>>()?;
    let slugs: Vec<String> = config.transmitters.iter().map(slug).collect();
    let cols = config.columns;

    let mut columns = vec!["M".to_string()];
    if cols.bounds() {
        for (t, s) in config.transmitters.iter().zip(&slugs) {
            columns.push(format!("log10_P_qcb_{s}"));
            if quoted_psi(t, config.n_b, 1).is_some() {
                columns.push(format!("log10_P_qcb_quoted_{s}"));
            }
        }
        columns.push("log10_C".to_string());
    }
    if cols.info() {
        columns.extend(slugs.iter().map(|s| format!("J_min_Q_{s}")));
        columns.push("J_max_C".to_string());
        columns.extend(slugs.iter().map(|s| format!("G_{s}")));
    }

    let mut rows = Vec::with_capacity(config.copies.len());
    for &m in &config.copies {
        let classical = classical_lb_noisy_ln(m, config.n_s, config.n_b, 0.0, 1.0)?;
        let mut row = vec![m as f64];
        if cols.bounds() {
            for (t, pc) in config.transmitters.iter().zip(&per_copy) {
                row.push(log10(pc.qcb(m)));
                if let Some(q) = quoted_psi(t, config.n_b, m) {
                    row.push(log10(q));
                }
            }
            row.push(log10(classical));
        }
        if cols.info() {
            let infos: Vec<InfoReport> =
                per_copy.iter().map(|pc| InfoReport::from_bounds(pc.qcb(m), classical)).collect::<Result<_, _>>()?;
            row.extend(infos.iter().map(|i| i.j_min_quantum));
            row.push(infos.first().map_or(f64::NAN, |i| i.j_max_classical));
            row.extend(infos.iter().map(|i| i.gain));
        }
        rows.push(row);
    }

    let mut comments = vec![
        format!("name: {}", config.name),
        format!("n_s: {}", config.n_s),
        format!("n_b: {}", config.n_b),
        "reflectivities: r0 = 0, r1 = 1".to_string(),
        format!(
            "copies: {}..={} ({} values)",
            config.copies.first().unwrap_or(&0),
            config.copies.last().unwrap_or(&0),
            config.copies.len()
        ),
    ];
    for (t, s) in config.transmitters.iter().zip(&slugs) {
        comments.push(format!("transmitter {s}: {} (signal mean {})", t.label(), t.signal_mean()));
    }
    comments.push("log10_P_qcb_*: Chernoff bound from the constructed Fock-space output states".to_string());
    if columns.iter().any(|c| c.starts_with("log10_P_qcb_quoted_")) {
        comments.push("log10_P_qcb_quoted_*: quoted closed form for the photon-coherent transmitter".to_string());
    }
    Ok(SweepTable { comments, columns, rows })
}
