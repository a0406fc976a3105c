use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qread::config::{OutputKind, SweepConfig};
use qread::figures::{figure_config, FigureId};
use qread::verify::{run_verify, Evaluators};
use qread::{bounds_text, resolve_out_dir, run_and_write, CliError};
use qread_core::{ReadoutScenario, Transmitter, C64};

#[derive(Parser)]
#[command(name = "qread", version, about = "Error bounds for quantum reading of a binary optical memory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Mm,
    Noon,
    Psi,
    Fock,
}

#[derive(Subcommand)]
enum Command {
    /// Bounds for one scenario, as key=value lines
    Bounds {
        #[arg(long, value_enum)]
        transmitter: Kind,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        m_prime: Option<usize>,
        /// Signal photons; derives m' or alpha when those are not given
        #[arg(long)]
        n_s: Option<f64>,
        #[arg(long)]
        alpha_re: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        alpha_im: f64,
        #[arg(long)]
        n_b: f64,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long, default_value_t = 0.0)]
        r0: f64,
        #[arg(long, default_value_t = 1.0)]
        r1: f64,
    },
    /// Run a TOML sweep configuration
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Reproduce one figure panel: 1a, 1b, 2a, 2b, 3a, 3b or 4
    Figure {
        id: FigureId,
        #[arg(long)]
        svg: bool,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run the verification suite
    Verify {
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn transmitter(kind: Kind, m: Option<usize>, m_prime: Option<usize>, n_s: Option<f64>, alpha: Option<C64>) -> Result<Transmitter, String> {
    let need_m = || m.ok_or_else(|| "--m is required for this transmitter".to_string());
    let t = match kind {
        Kind::Mm => match (m_prime, n_s) {
            (Some(mp), _) => Transmitter::MandM { m: need_m()?, m_prime: mp },
            (None, Some(n_s)) => Transmitter::mm_for_signal_mean(need_m()?, n_s).map_err(|e| e.to_string())?,
            (None, None) => return Err("--m-prime or --n-s is required for mm".into()),
        },
        Kind::Noon => Transmitter::Noon { m: need_m()? },
        Kind::Psi => match (alpha, n_s) {
            (Some(a), _) => Transmitter::PhotonCoherent { alpha: a },
            (None, Some(n_s)) => Transmitter::photon_coherent_for_signal_mean(n_s).map_err(|e| e.to_string())?,
            (None, None) => return Err("--alpha-re or --n-s is required for psi".into()),
        },
        Kind::Fock => Transmitter::SingleFock,
    };
    t.validate().map_err(|e| e.to_string())?;
    if let Some(n_s) = n_s {
        if (t.signal_mean() - n_s).abs() > 1e-9 {
            return Err(format!("{} has signal mean {}, not {n_s}", t.label(), t.signal_mean()));
        }
    }
    Ok(t)
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Bounds { transmitter: kind, m, m_prime, n_s, alpha_re, alpha_im, n_b, copies, r0, r1 } => {
            let alpha = alpha_re.map(|re| C64::new(re, alpha_im));
            let t = transmitter(kind, m, m_prime, n_s, alpha)?;
            let scenario = ReadoutScenario::for_transmitter(copies, &t, n_b)?.with_reflectivities(r0, r1)?;
            print!("{}", bounds_text(&scenario, &t)?);
        }
        Command::Sweep { config, out_dir } => {
            let text = std::fs::read_to_string(&config).map_err(|source| CliError::Io { path: config.clone(), source })?;
            let cfg = SweepConfig::from_toml(&text).map_err(|e| format!("{}: {e}", config.display()))?;
            let dir = resolve_out_dir(out_dir.as_deref().or(cfg.out_dir.as_deref()));
            for p in run_and_write(&cfg, &dir)? {
                println!("wrote {}", p.display());
            }
        }
        Command::Figure { id, svg, out_dir } => {
            let mut cfg = figure_config(id);
            if svg {
                cfg.outputs.insert(OutputKind::Svg);
            }
            for p in run_and_write(&cfg, &resolve_out_dir(out_dir.as_deref()))? {
                println!("wrote {}", p.display());
            }
        }
        Command::Verify { report } => {
            let r = run_verify(&Evaluators::default());
            let text = r.render();
            print!("{text}");
            if let Some(path) = report {
                std::fs::write(&path, &text).map_err(|source| CliError::Io { path, source })?;
            }
            if !r.all_passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
