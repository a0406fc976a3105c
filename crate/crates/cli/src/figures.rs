//! Built-in sweeps for the seven published panels.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use qread_core::Transmitter;

use crate::config::{Columns, OutputKind, SweepConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    F1a,
    F1b,
    F2a,
    F2b,
    F3a,
    F3b,
    F4,
}

impl FigureId {
    pub const ALL: [FigureId; 7] =
        [FigureId::F1a, FigureId::F1b, FigureId::F2a, FigureId::F2b, FigureId::F3a, FigureId::F3b, FigureId::F4];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::F1a => "1a",
            FigureId::F1b => "1b",
            FigureId::F2a => "2a",
            FigureId::F2b => "2b",
            FigureId::F3a => "3a",
            FigureId::F3b => "3b",
            FigureId::F4 => "4",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| format!("unknown figure `{s}` (expected one of 1a, 1b, 2a, 2b, 3a, 3b, 4)"))
    }
}

fn mm(n_s: f64, ms: &[usize]) -> Vec<Transmitter> {
    ms.iter().map(|&m| Transmitter::mm_for_signal_mean(m, n_s).expect("built-in figure parameters")).collect()
}

fn psi(n_s: f64) -> Transmitter {
    Transmitter::photon_coherent_for_signal_mean(n_s).expect("built-in figure parameters")
}

/// Sweep definition of a figure. Probability panels run `M = 1..35`,
/// information panels `M = 1..15`.
pub fn figure_config(id: FigureId) -> SweepConfig {
    let (n_s, n_b, transmitters, columns) = match id {
        FigureId::F1a => (1.0, 0.1, mm(1.0, &[2]), Columns::Bounds),
        FigureId::F1b => (3.0, 0.1, mm(3.0, &[4, 5, 6]), Columns::Bounds),
        FigureId::F2a => (0.5, 1e-5, mm(0.5, &[1]), Columns::Info),
        FigureId::F2b => (2.5, 1.0, mm(2.5, &[3, 4, 5]), Columns::Info),
        FigureId::F3a => (1.0, 0.01, vec![psi(1.0), Transmitter::SingleFock], Columns::Bounds),
        FigureId::F3b => (5.0, 1.5, vec![psi(5.0)], Columns::Bounds),
        FigureId::F4 => (0.75, 1e-5, vec![psi(0.75)], Columns::Info),
    };
    let last = if columns == Columns::Info { 15 } else { 35 };
    SweepConfig {
        name: id.as_str().to_string(),
        n_s,
        n_b,
        copies: (1..=last).collect(),
        transmitters,
        outputs: BTreeSet::from([OutputKind::Csv]),
        out_dir: None,
        columns,
    }
}
