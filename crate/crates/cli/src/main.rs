use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use minvar_core::harness::{CheckResult, VerificationReport};
use minvar_core::io::{
    report_to_json, run_identities, run_mesh, run_takahashi, run_verify, table_to_csv, to_obj, write_file,
    RunConfig,
};

/// Numerical verification of minimal submanifold families.
#[derive(Parser)]
#[command(name = "minvar", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimality, screw invariance, cone scaling and Takahashi checks.
    Verify(RunArgs),
    /// Clifford-torus identities and helicoid metric algebra, with a CSV table.
    Identities(RunArgs),
    /// OBJ mesh of a two-parameter slice of the family.
    Mesh(RunArgs),
    /// Sphere, spherical-join and cone minimality of a spherical base.
    Takahashi(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    config: PathBuf,
    /// Overrides `plan.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `plan.count`.
    #[arg(long)]
    points: Option<usize>,
    /// Overrides the command's main output path (report, CSV table or mesh).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig> {
        let text = std::fs::read_to_string(&self.config)
            .with_context(|| format!("cannot read {}", self.config.display()))?;
        let mut cfg = RunConfig::from_json(&text).with_context(|| format!("in {}", self.config.display()))?;
        if let Some(seed) = self.seed {
            cfg.plan.seed = seed;
        }
        if let Some(points) = self.points {
            cfg.plan.count = points;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

enum Outcome {
    Matched,
    Mismatch,
}

fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, contents)?,
        None => print!("{contents}"),
    }
    Ok(())
}

fn summarize(checks: &[CheckResult]) {
    for c in checks {
        eprintln!(
            "{:<28} {:<14} max {:.3e}  min {:.3e}  tol {:.1e}  points {} excluded {}",
            c.name,
            format!("{:?}", c.verdict),
            c.max_residual,
            c.min_residual,
            c.tolerance,
            c.points_evaluated,
            c.points_excluded
        );
    }
}

fn verdict(report: &VerificationReport, extra: bool) -> Outcome {
    summarize(&report.checks);
    if report.all_match_expectation() && extra {
        Outcome::Matched
    } else {
        Outcome::Mismatch
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Verify(args) => {
            let cfg = args.load()?;
            let report = run_verify(&cfg)?;
            let out = args.out.as_deref().or(cfg.output.report.as_deref());
            emit(out, &(report_to_json(&report) + "\n"))?;
            Ok(verdict(&report, true))
        }
        Command::Takahashi(args) => {
            let cfg = args.load()?;
            let t = run_takahashi(&cfg)?;
            let out = args.out.as_deref().or(cfg.output.report.as_deref());
            emit(out, &(serde_json::to_string_pretty(&t)? + "\n"))?;
            if !t.agree {
                eprintln!("the three statements disagree");
            }
            Ok(verdict(&t.report, t.agree))
        }
        Command::Identities(args) => {
            let cfg = args.load()?;
            let (report, table) = run_identities(&cfg)?;
            let csv_out = args.out.as_deref().or(cfg.output.csv.as_deref());
            emit(csv_out, &table_to_csv(&table)?)?;
            if let Some(p) = cfg.output.report.as_deref() {
                write_file(p, &(report_to_json(&report) + "\n"))?;
            }
            Ok(verdict(&report, true))
        }
        Command::Mesh(args) => {
            let cfg = args.load()?;
            let mesh = run_mesh(&cfg)?;
            let out = args.out.as_deref().or(cfg.output.mesh.as_deref());
            emit(out, &to_obj(&mesh))?;
            eprintln!("{} vertices, {} triangles", mesh.vertices.len(), mesh.faces.len());
            Ok(Outcome::Matched)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Matched) => ExitCode::SUCCESS,
        Ok(Outcome::Mismatch) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
