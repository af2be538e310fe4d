//! `trinode`: classify points, draw slices and portraits, verify the exact
//! lemma suite and sweep an atlas of labelled regions.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use trinode::bifurcation::{Window, DEFAULT_WINDOW};

use commands::{Scope, SliceArgs};
use report::Failure;

#[derive(Parser)]
#[command(name = "trinode", version, about = "Quadratic systems with a semi-elemental triple node")]
struct Cli {
    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Singular points, invariant tuple and portrait label at (m, n, k).
    Classify {
        /// `p/q`, integer, decimal or `c*sqrt(r)`.
        #[arg(short, allow_hyphen_values = true)]
        m: String,
        /// `p/q`, integer, decimal or `c*sqrt(r)`.
        #[arg(short, allow_hyphen_values = true)]
        n: String,
        /// `p/q`, integer, decimal or `c*sqrt(r)`.
        #[arg(short, allow_hyphen_values = true)]
        k: String,
        /// Count separatrices passing this close (disc metric) to a saddle as
        /// connected to it.
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
    },
    /// Bifurcation curves and regions of the slice k = const.
    Slice {
        /// `p/q`, integer, decimal or `c*sqrt(r)`.
        #[arg(short, allow_hyphen_values = true)]
        k: String,
        /// `m0,m1,n0,n1`.
        #[arg(long, value_parser = parse_window)]
        window: Option<Window>,
        #[arg(long, default_value_t = 128)]
        resolution: usize,
        /// Trace the separatrix-connection curve (k > 2√2; slow).
        #[arg(long)]
        with_s7: bool,
        #[arg(long, default_value_t = 10)]
        s7_lines: usize,
        /// Output prefix; writes `<out>.svg` and `<out>.json`.
        #[arg(long, default_value = "slice")]
        out: PathBuf,
    },
    /// Phase portrait on the Poincaré disc as SVG.
    Portrait {
        /// `p/q`, integer, decimal or `c*sqrt(r)`.
        #[arg(short, allow_hyphen_values = true)]
        m: String,
        /// `p/q`, integer, decimal or `c*sqrt(r)`.
        #[arg(short, allow_hyphen_values = true)]
        n: String,
        /// `p/q`, integer, decimal or `c*sqrt(r)`.
        #[arg(short, allow_hyphen_values = true)]
        k: String,
        #[arg(long, default_value = "portrait.svg")]
        out: PathBuf,
        #[arg(long, default_value_t = 600)]
        size: u32,
        /// Also dump the skeleton as JSON.
        #[arg(long)]
        skeleton_json: Option<PathBuf>,
    },
    /// Exact lemma suite, conic certificates and table checks.
    Verify {
        #[arg(long, value_enum, default_value_t = Scope::All)]
        scope: Scope,
    },
    /// Classify every region of several slices.
    Atlas {
        /// Comma-separated slice values, e.g. `0,1,sqrt8,3`.
        #[arg(long = "k", value_delimiter = ',', required = true, allow_hyphen_values = true)]
        ks: Vec<String>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, value_parser = parse_window)]
        window: Option<Window>,
        /// Write the JSON report here (stdout text otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_window(s: &str) -> Result<Window, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [m0, m1, n0, n1] if m0 < m1 && n0 < n1 => Ok(Window { m: (m0, m1), n: (n0, n1) }),
        _ => Err("expected m0,m1,n0,n1 with m0 < m1 and n0 < n1".into()),
    }
}

fn run(cli: &Cli) -> Result<report::Report, Failure> {
    match &cli.command {
        Command::Classify { m, n, k, tol } => commands::classify(m, n, k, *tol),
        Command::Slice { k, window, resolution, with_s7, s7_lines, out } => commands::slice(SliceArgs {
            k,
            window: window.unwrap_or(DEFAULT_WINDOW),
            resolution: *resolution,
            with_s7: *with_s7,
            s7_lines: *s7_lines,
            out,
        }),
        Command::Portrait { m, n, k, out, size, skeleton_json } => {
            commands::portrait(m, n, k, out, *size, skeleton_json.as_deref())
        }
        Command::Verify { scope } => commands::verify(*scope),
        Command::Atlas { ks, grid, window, out } => {
            commands::atlas_cmd(ks, *grid, window.unwrap_or(DEFAULT_WINDOW), out.as_deref())
        }
    }
}

fn emit(r: &report::Report, json: bool) {
    if json {
        print!("{}", r.to_json());
    } else {
        for l in &r.text {
            println!("{l}");
        }
        for d in &r.diagnostics {
            eprintln!("note: {d}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            emit(&r, cli.json);
            ExitCode::SUCCESS
        }
        Err(f) => {
            match &f {
                Failure::Verification(r) | Failure::Inconclusive(r) => emit(r, cli.json),
                _ => {}
            }
            eprintln!("error: {f}");
            ExitCode::from(f.code() as u8)
        }
    }
}
