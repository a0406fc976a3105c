//! Sweep configuration files (TOML).

use std::collections::BTreeSet;
use std::path::PathBuf;

use qread_core::{Transmitter, C64};
use serde::Deserialize;
use toml::Spanned;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config error at {}: {msg}", location(.field, *.line))]
    Field { field: String, line: Option<usize>, msg: String },
}

fn location(field: &str, line: Option<usize>) -> String {
    match line {
        Some(l) => format!("line {l}, field `{field}`"),
        None => format!("field `{field}`"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Csv,
    Svg,
}

/// Which column groups a sweep emits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Columns {
    /// `log10` error bounds.
    Bounds,
    /// Retrieved information and gain.
    Info,
    #[default]
    All,
}

impl Columns {
    pub fn bounds(self) -> bool {
        self != Columns::Info
    }

    pub fn info(self) -> bool {
        self != Columns::Bounds
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCopies {
    start: usize,
    end: usize,
    #[serde(default = "one")]
    step: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum RawTransmitter {
    Mm { m: usize, m_prime: Option<usize> },
    Noon { m: usize },
    PhotonCoherent { alpha_re: Option<f64>, alpha_im: Option<f64> },
    Fock,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    n_s: Spanned<f64>,
    n_b: Spanned<f64>,
    copies: Spanned<RawCopies>,
    #[serde(default)]
    outputs: Option<Vec<OutputKind>>,
    out_dir: Option<PathBuf>,
    #[serde(default)]
    columns: Columns,
    #[serde(default)]
    transmitter: Vec<Spanned<RawTransmitter>>,
}

/// A validated sweep over the number of copies.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub name: String,
    pub n_s: f64,
    pub n_b: f64,
    pub copies: Vec<usize>,
    pub transmitters: Vec<Transmitter>,
    pub outputs: BTreeSet<OutputKind>,
    pub out_dir: Option<PathBuf>,
    pub columns: Columns,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let line_of = |span: std::ops::Range<usize>| Some(text[..span.start.min(text.len())].matches('\n').count() + 1);
        let field = |name: &str, line, msg: String| ConfigError::Field { field: name.to_string(), line, msg };

        let n_s = *raw.n_s.get_ref();
        if !(n_s > 0.0) || !n_s.is_finite() {
            return Err(field("n_s", line_of(raw.n_s.span()), format!("signal photon number must be > 0, got {n_s}")));
        }
        let n_b = *raw.n_b.get_ref();
        if !(n_b >= 0.0) || !n_b.is_finite() {
            return Err(field("n_b", line_of(raw.n_b.span()), format!("noise photon number must be >= 0, got {n_b}")));
        }

        let c = raw.copies.get_ref();
        let cline = line_of(raw.copies.span());
        if c.start == 0 {
            return Err(field("copies.start", cline, "copies start at 1".into()));
        }
        if c.step == 0 {
            return Err(field("copies.step", cline, "step must be >= 1".into()));
        }
        if c.end < c.start {
            return Err(field("copies", cline, format!("empty range {}..={}", c.start, c.end)));
        }
        let copies: Vec<usize> = (c.start..=c.end).step_by(c.step).collect();

        if raw.transmitter.is_empty() {
            return Err(field("transmitter", None, "at least one [[transmitter]] entry is required".into()));
        }
        let mut transmitters = Vec::new();
        let mut slugs = BTreeSet::new();
        for (i, entry) in raw.transmitter.iter().enumerate() {
            let line = line_of(entry.span());
            let name = format!("transmitter[{i}]");
            let t = build_transmitter(entry.get_ref(), n_s).map_err(|msg| field(&name, line, msg))?;
            if !slugs.insert(slug(&t)) {
                return Err(field(&name, line, format!("duplicate transmitter {}", t.label())));
            }
            transmitters.push(t);
        }

        let outputs = raw.outputs.unwrap_or_else(|| vec![OutputKind::Csv]).into_iter().collect();
        Ok(SweepConfig {
            name: raw.name.unwrap_or_else(|| "sweep".to_string()),
            n_s,
            n_b,
            copies,
            transmitters,
            outputs,
            out_dir: raw.out_dir,
            columns: raw.columns,
        })
    }
}

fn build_transmitter(raw: &RawTransmitter, n_s: f64) -> Result<Transmitter, String> {
    let t = match *raw {
        RawTransmitter::Mm { m, m_prime: Some(mp) } => Transmitter::MandM { m, m_prime: mp },
        RawTransmitter::Mm { m, m_prime: None } => Transmitter::mm_for_signal_mean(m, n_s).map_err(|e| e.to_string())?,
        RawTransmitter::Noon { m } => Transmitter::Noon { m },
        RawTransmitter::PhotonCoherent { alpha_re: None, alpha_im: None } => {
            Transmitter::photon_coherent_for_signal_mean(n_s).map_err(|e| e.to_string())?
        }
        RawTransmitter::PhotonCoherent { alpha_re, alpha_im } => {
            Transmitter::PhotonCoherent { alpha: C64::new(alpha_re.unwrap_or(0.0), alpha_im.unwrap_or(0.0)) }
        }
        RawTransmitter::Fock => Transmitter::SingleFock,
    };
    t.validate().map_err(|e| e.to_string())?;
    Ok(t)
}

/// Column-safe transmitter name.
pub fn slug(t: &Transmitter) -> String {
    match t.canonical() {
        Transmitter::MandM { m, m_prime } => format!("mm_{m}_{m_prime}"),
        Transmitter::PhotonCoherent { alpha } if alpha.im == 0.0 => format!("psi_a{}", alpha.re),
        Transmitter::PhotonCoherent { alpha } => format!("psi_a{}_{}i", alpha.re, alpha.im),
        _ => "fock".to_string(),
    }
}
