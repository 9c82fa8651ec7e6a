//! `bisync` command-line front end. Reads JSON artifacts, runs one library
//! operation and writes a JSON report.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on usage
//! or input errors.

mod commands;
mod report;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use report::Report;

#[derive(Debug, Parser)]
#[command(name = "bisync", version, about = "Bisynchronous games, densities and quantum permutation certificates")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub group: Group,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Numerical tolerance for every check.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Input JSON file, `-` for standard input.
    #[arg(long = "in", global = true, default_value = "-", value_name = "PATH")]
    pub input: String,

    /// Report destination, `-` for standard output.
    #[arg(long, global = true, default_value = "-", value_name = "PATH")]
    pub out: String,

    /// Indent the JSON report.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(Debug, Subcommand)]
pub enum Group {
    /// Nonlocal games given by their losing tuples.
    Game {
        #[command(subcommand)]
        cmd: GameCmd,
    },
    /// Conditional probability densities p(a,b|x,y).
    Density {
        #[command(subcommand)]
        cmd: DensityCmd,
    },
    /// Vector strategies.
    Vect {
        #[command(subcommand)]
        cmd: VectCmd,
    },
    /// Projective systems and quantum permutations.
    Qperm {
        #[command(subcommand)]
        cmd: QpermCmd,
    },
    /// Linear maps on matrices, stored by Choi matrix.
    Map {
        #[command(subcommand)]
        cmd: MapCmd,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GameClass {
    Sync,
    Bisync,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum DensityClass {
    Valid,
    Nonsignalling,
    Sync,
    Bisync,
    Local,
}

#[derive(Debug, Subcommand)]
pub enum GameCmd {
    /// Test whether the game is synchronous or bisynchronous.
    Check {
        #[arg(long, value_enum, default_value_t = GameClass::Bisync)]
        class: GameClass,
    },
    /// Exchange the roles of questions and answers.
    Flip,
    /// Graph homomorphism game Hom(G, H).
    Hom {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
    },
    /// Graph isomorphism game Iso(G, H).
    Iso {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
    },
    /// Bisynchronous lift of a synchronous game.
    Lift,
}

#[derive(Debug, Subcommand)]
pub enum DensityCmd {
    /// Membership in a correlation class; each class includes the checks of
    /// the classes before it.
    Check {
        #[arg(long, value_enum, default_value_t = DensityClass::Bisync)]
        class: DensityClass,
    },
    /// Whether the density never loses the given game.
    Perfect {
        #[arg(long)]
        game: PathBuf,
    },
    /// Exchange the roles of questions and answers.
    Flip,
    /// Composition: the input density followed by `--then`.
    Compose {
        #[arg(long)]
        then: PathBuf,
    },
    /// Decompose into deterministic strategies or return a separating
    /// functional.
    LocalDecompose {
        /// Use all synchronous deterministic strategies instead of permutations.
        #[arg(long)]
        sync: bool,
    },
    /// Emit the three-question cyclic counterexample.
    Z3,
}

#[derive(Debug, Subcommand)]
pub enum VectCmd {
    /// Orthogonality and sum conditions of a vector strategy.
    Verify,
    /// Gram density of a vector strategy.
    Density,
}

#[derive(Debug, Subcommand)]
pub enum QpermCmd {
    /// Projection, sum and orthogonality conditions.
    Verify,
    /// Induced density tau(E_xa E_yb).
    Density,
    /// Apply the factorizable map to a matrix.
    Apply {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Whether the system intertwines the adjacency matrices of G and H.
    Intertwine {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
    },
    /// Fixed-point algebra of the induced map.
    Fixpoints {
        /// Compare commutant, fixed points, Kraus commutant and pattern span.
        #[arg(long)]
        crosscheck: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum MapCmd {
    /// Choi matrix of the map induced by a density.
    Build,
    /// Channel properties of a map.
    Check,
    /// Adjoint map.
    Adjoint,
    /// Kraus operators.
    Kraus,
    /// Basis of the fixed-point space of a unital channel.
    Fixpoints,
    /// Map of a convex combination of permutations.
    Mixperm,
}

fn read_input(path: &str) -> anyhow::Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn write_output(path: &str, text: &str) -> anyhow::Result<()> {
    if path == "-" {
        let mut out = io::stdout().lock();
        writeln!(out, "{text}")?;
        out.flush()?;
    } else {
        fs::write(path, format!("{text}\n")).with_context(|| format!("writing {path}"))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    let tol = cli.global.tol;
    if !(tol.is_finite() && tol >= 0.0) {
        bail!("--tol must be a finite non-negative number, got {tol}");
    }
    commands::dispatch(cli)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run(&cli).and_then(|report| {
        let text = bisync::io::to_json(&report, cli.global.pretty);
        write_output(&cli.global.out, &text)?;
        Ok(report.pass)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
