//! `tselliptic`: spectra, Green's functions and nonlinear solves for
//! Dirichlet problems on products of time scales.
//!
//! Exit codes: 0 success, 2 not converged or no solution, 3 configuration
//! or usage error.

mod commands;
mod config;
mod output;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tselliptic::solver::Status;
use tselliptic::Error;

use config::{Config, MeshConfig};
use output::{Format, Sink};

#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit 3.
    Config(String),
    /// The numerics gave up: exit 2.
    Unsolved(String),
}

impl Failure {
    pub fn from_core(e: Error) -> Self {
        match e {
            Error::Numerical(_)
            | Error::InsufficientRoots { .. }
            | Error::Eval(_)
            | Error::EvalAt { .. } => Failure::Unsolved(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }

    fn exit(&self) -> ExitCode {
        match self {
            Failure::Config(m) => {
                eprintln!("error: {m}");
                ExitCode::from(3)
            }
            Failure::Unsolved(m) => {
                eprintln!("error: {m}");
                ExitCode::from(2)
            }
        }
    }
}

#[derive(Parser)]
#[command(name = "tselliptic", version, about, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Time-scale literal for one axis; repeat for products. Replaces `axes`.
    #[arg(long = "domain", value_name = "LITERAL")]
    domain: Vec<String>,
    /// Mesh step for continuous intervals. Replaces `mesh`.
    #[arg(long, value_name = "STEP")]
    h: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Directory for result files.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Format for stdout and for result files.
    #[arg(long, value_enum, value_name = "FMT")]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Lowest eigenvalues, eigenfunctions and the first-eigenvalue bound.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Number of eigenvalues.
        #[arg(long, value_name = "N")]
        k: Option<usize>,
    },
    /// Solve -Δu + f(x, u) = 0 with zero boundary values.
    Solve {
        #[command(flatten)]
        common: Common,
        /// picard, homotopy or enumerate. Replaces `solver.method`.
        #[arg(long, value_name = "NAME")]
        method: Option<String>,
        /// Nonlinearity. Replaces `f`.
        #[arg(long = "f", value_name = "EXPR", allow_hyphen_values = true)]
        f: Option<String>,
        /// Parameter binding NAME=VALUE for `f`; repeatable.
        #[arg(long = "bind", value_name = "NAME=VALUE", value_parser = parse_binding)]
        bind: Vec<(String, f64)>,
    },
    /// Green's function G(t, s) and A⁻¹f on a one-dimensional domain.
    Greens {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        t: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        s: Option<f64>,
        /// `t,f` table, or an expression in x1, to invert.
        #[arg(long, value_name = "PATH")]
        function: Option<PathBuf>,
    },
    /// Re-run a canned scenario and compare against stored values.
    Reproduce {
        /// table-1, ex-7.1 … ex-7.9, or all.
        id: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn parse_binding(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("`{value}`: {e}"))?;
    Ok((name.trim().to_string(), v))
}

fn load(common: &Common) -> Result<Config, Failure> {
    let mut cfg = match &common.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if !common.domain.is_empty() {
        cfg.axes = common.domain.clone();
    }
    if let Some(h) = common.h {
        cfg.mesh = Some(MeshConfig {
            h: Some(h),
            ..Default::default()
        });
    }
    Ok(cfg)
}

fn sink(cfg: &Config, o: &OutputArgs) -> Sink {
    Sink {
        stdout: o.format,
        files: match o.format {
            Some(f) => vec![f],
            None => cfg
                .output
                .formats
                .clone()
                .unwrap_or(vec![Format::Json, Format::Csv]),
        },
        dir: o.out.clone().or_else(|| cfg.output.dir.clone()),
    }
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Spectrum { common, k } => {
            let cfg = load(&common)?;
            let a = commands::spectrum(&cfg, k)?;
            sink(&cfg, &common.output).emit(&a)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            common,
            method,
            f,
            bind,
        } => {
            let mut cfg = load(&common)?;
            if f.is_some() {
                cfg.f = f;
            }
            cfg.bindings.extend(bind);
            let name = method.unwrap_or_else(|| cfg.method().to_string());
            let solved = commands::solve(&cfg, &name)?;
            let out = sink(&cfg, &common.output);
            if out.dir.is_none() && out.stdout != Some(Format::Json) {
                // The values are already on stdout.
                let mut brief = solved.artifacts.json.clone();
                if let Some(sols) = brief["solutions"].as_array_mut() {
                    for s in sols {
                        s.as_object_mut().map(|o| o.remove("u"));
                    }
                }
                eprintln!(
                    "{}",
                    serde_json::to_string(&brief).expect("JSON values serialize")
                );
            }
            out.emit(&solved.artifacts)?;
            Ok(if solved.status == Status::Converged {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Greens {
            common,
            t,
            s,
            function,
        } => {
            let cfg = load(&common)?;
            let a = commands::greens(&cfg, t, s, function.as_deref())?;
            sink(&cfg, &common.output).emit(&a)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Reproduce { id, output } => {
            let checks = reproduce::run(&id).ok_or_else(|| {
                Failure::Config(format!(
                    "unknown scenario `{id}`; available: {}, all",
                    reproduce::ids().join(", ")
                ))
            })?;
            sink(&Config::default(), &output).emit(&reproduce::artifacts(&checks))?;
            Ok(if checks.iter().all(|c| c.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    run(cli.command).unwrap_or_else(|f| f.exit())
}
