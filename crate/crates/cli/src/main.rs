use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coupler_core::sweep::{parse_config_text, write_csv, Settings};
use coupler_core::{compute_coefficients, figure, run_sweep, validate, Grid, Row};
use num_complex::Complex64;

/// Closed-form contradirectional coupler: coefficients, witnesses, sweeps.
#[derive(Debug, Parser)]
#[command(name = "coupler", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the twelve solution coefficients at `--length`.
    Coeffs(Options),
    /// Print witness values at `--length` (all of them unless `--witness` is given).
    Witness(Options),
    /// Sweep witnesses over a grid of lengths and write CSV.
    Sweep(Options),
    /// Reproduce a figure preset as CSV; `--start/--stop/--points` override its grid.
    Figure {
        id: String,
        #[command(flatten)]
        options: Options,
    },
    /// Run the validation suite and print a key=value report.
    Validate(Options),
}

#[derive(Debug, Args)]
struct Options {
    /// Flat key=value file, applied before any flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Linear coupling (complex, e.g. 0.1+0i).
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    /// Nonlinear coupling Γ (complex).
    #[arg(long, allow_hyphen_values = true)]
    gamma_nl: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta_k: Option<String>,
    /// Interaction length for `coeffs` and `witness`.
    #[arg(long, allow_hyphen_values = true)]
    length: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma_in: Option<String>,
    /// `L` or `GammaL`.
    #[arg(long)]
    axis: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    start: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    stop: Option<String>,
    #[arg(long)]
    points: Option<String>,
    /// Repeatable: mean, quad, amp:N, D:N, Dij, hz:M:N, hz-other, duan, three-mode.
    #[arg(long)]
    witness: Vec<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<String>,
}

enum Failure {
    Config(String),
    Domain(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Domain(_) => 3,
        }
    }
}

impl From<coupler_core::Error> for Failure {
    fn from(e: coupler_core::Error) -> Self {
        let config = match &e {
            coupler_core::Error::AtGridPoint { source, .. } => source.is_config_error(),
            other => other.is_config_error(),
        };
        if config {
            Failure::Config(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

impl Options {
    fn flags(&self) -> Vec<(&'static str, &str)> {
        let single = [
            ("k", &self.k),
            ("gamma-nl", &self.gamma_nl),
            ("delta-k", &self.delta_k),
            ("length", &self.length),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma-in", &self.gamma_in),
            ("axis", &self.axis),
            ("start", &self.start),
            ("stop", &self.stop),
            ("points", &self.points),
            ("out", &self.out),
            ("seed", &self.seed),
        ];
        single
            .into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
            .collect()
    }

    /// Config file first, then flags. Witnesses named on the command line
    /// replace those from the file.
    fn settings(&self) -> Result<Settings, Failure> {
        let mut s = Settings::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            let pairs = parse_config_text(&text)?;
            s.apply_all(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
        }
        s.apply_all(self.flags())?;
        if !self.witness.is_empty() {
            s.witnesses.clear();
            for w in &self.witness {
                s.apply("witness", w)?;
            }
        }
        Ok(s)
    }

    fn grid_overridden(&self) -> bool {
        self.start.is_some() || self.stop.is_some() || self.points.is_some()
    }
}

fn complex(z: Complex64) -> String {
    format!(
        "{:.16e}{}{:.16e}i",
        z.re,
        if z.im < 0.0 { "" } else { "+" },
        z.im
    )
}

fn open_output(out: &Option<String>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Failure::Config(format!("{path}: {e}")))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(
    out: &Option<String>,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), Failure> {
    let mut w = open_output(out)?;
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Failure::Domain(format!("write failed: {e}")))
}

fn csv(out: &Option<String>, rows: &[Row]) -> Result<(), Failure> {
    emit(out, |w| write_csv(w, rows))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Coeffs(o) => {
            let s = o.settings()?;
            let c = compute_coefficients(&s.params()?)?;
            emit(&s.out, |w| {
                for (name, v) in c.named() {
                    writeln!(w, "{name}={}", complex(v))?;
                }
                Ok(())
            })
        }
        Command::Witness(o) => {
            let s = o.settings()?;
            let c = compute_coefficients(&s.params()?)?;
            let input = s.input()?;
            let mut entries = Vec::new();
            for sel in s.selectors() {
                entries.extend(sel.entries(&c, &input)?);
            }
            emit(&s.out, |w| {
                for (name, v) in &entries {
                    writeln!(w, "{name}={v:.16e}")?;
                }
                Ok(())
            })
        }
        Command::Sweep(o) => {
            let s = o.settings()?;
            let rows = run_sweep(&s.sweep_config()?)?;
            csv(&s.out, &rows)
        }
        Command::Figure { id, options } => {
            let s = options.settings()?;
            let mut fig = figure(&id)?;
            if options.grid_overridden() {
                let base = fig.series[0].grid;
                let start = options.start.as_ref().map_or(base.start, |_| s.start);
                let stop = options.stop.as_ref().map_or(base.stop, |_| s.stop);
                let points = options.points.as_ref().map_or(base.points, |_| s.points);
                fig = fig.with_grid(Grid::new(start, stop, points)?);
            }
            let rows = fig.run()?;
            csv(&s.out, &rows)
        }
        Command::Validate(o) => {
            let s = o.settings()?;
            let report = validate(&s.params()?, s.seed)?;
            emit(&s.out, |w| write!(w, "{report}"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Config(m) | Failure::Domain(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}
