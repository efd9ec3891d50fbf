use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use metric_curves::calculus::Ladder;
use metric_curves::profile::{profile, to_csv, Grid, ProfileOptions};
use metric_curves::report::{run_suite, Suite, SuiteOptions, VerificationReport};
use metric_curves::spec::CurveSpec;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "mdcurves",
    version,
    about = "Build, profile and verify curves in normed spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a curve and write its derived constants and a sample table as JSON.
    Build {
        /// Curve spec: a JSON file path or an inline JSON object.
        #[arg(long)]
        spec: String,
        /// Sample grid `a:b:n`; defaults to 101 points over the domain.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<Grid>,
        /// Overrides the depth of a hat spec.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate derived numbers, md, its defect and bilateral ratios on a grid.
    Profile {
        #[arg(long)]
        spec: String,
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<Grid>,
        /// Scale ladder `t0:ratio:steps`.
        #[arg(long)]
        ladder: Option<Ladder>,
        #[arg(long)]
        depth: Option<usize>,
        /// Output path; `.json` selects JSON, anything else CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites and report each check.
    Verify {
        /// One of spiral, box, hat, kink, reparam, porosity or all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Replaces the suite's default curve.
        #[arg(long)]
        spec: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Depth of the hat curve in the hat suite.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// An error in the invocation or its inputs, as opposed to a failed check.
#[derive(Debug)]
struct ConfigError(anyhow::Error);

type CmdResult = std::result::Result<bool, ConfigError>;

impl<E: Into<anyhow::Error>> From<E> for ConfigError {
    fn from(e: E) -> Self {
        ConfigError(e.into())
    }
}

fn read_spec(arg: &str, depth: Option<usize>) -> anyhow::Result<CurveSpec> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading spec {arg}"))?
    };
    let mut spec = CurveSpec::from_json(&text)?;
    if let Some(d) = depth {
        match &mut spec {
            CurveSpec::Hat { depth, .. } => *depth = d,
            other => bail!("--depth applies to hat specs, not {}", other.kind()),
        }
    }
    Ok(spec)
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(out: Option<&Path>, contents: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            std::io::stdout().write_all(contents.as_bytes())?;
            Ok(())
        }
    }
}

fn pretty(v: &serde_json::Value) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn build(spec: &str, grid: Option<Grid>, depth: Option<usize>, out: Option<&Path>) -> CmdResult {
    let spec = read_spec(spec, depth)?;
    let built = spec.build()?;
    let d = built.curve.domain();
    let grid = match grid {
        Some(g) => g,
        None => Grid::new(d.lo, d.hi, 101)?,
    };
    let samples: Vec<_> = grid
        .points()
        .into_iter()
        .map(|t| Ok(json!({ "t": t, "point": built.curve.eval(t)?.0.to_vec() })))
        .collect::<anyhow::Result<_>>()?;
    let doc = json!({
        "spec": spec,
        "domain": d,
        "metadata": built.metadata,
        "samples": samples,
    });
    emit(out, &pretty(&doc)?)?;
    Ok(true)
}

fn run_profile(
    spec: &str,
    grid: Option<Grid>,
    ladder: Option<Ladder>,
    depth: Option<usize>,
    out: Option<&Path>,
) -> CmdResult {
    let spec = read_spec(spec, depth)?;
    let built = spec.build()?;
    let d = built.curve.domain();
    let grid = match grid {
        Some(g) => g,
        None => Grid::new(d.lo, d.hi, 101)?,
    };
    let ladder = ladder.unwrap_or_else(|| Ladder::default_for(d));
    let rows = profile(
        &built.curve,
        &grid.points(),
        &ladder,
        &ProfileOptions::default(),
    )?;
    let as_json = out.is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
    let text = if as_json {
        pretty(&json!({ "spec": spec, "grid": grid, "ladder": ladder, "rows": rows }))?
    } else {
        to_csv(&rows)
    };
    emit(out, &text)?;
    Ok(true)
}

fn verify(
    suite: &str,
    spec: Option<&str>,
    seed: u64,
    depth: Option<usize>,
    out: Option<&Path>,
) -> CmdResult {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse()?]
    };
    let mut spec = spec.map(|s| read_spec(s, None)).transpose()?;
    if let Some(d) = depth {
        match &mut spec {
            Some(CurveSpec::Hat { depth, .. }) => *depth = d,
            None => {
                spec = Some(CurveSpec::Hat {
                    depth: d,
                    alphas: None,
                    qs: None,
                    bs: None,
                    theta_1: None,
                })
            }
            Some(other) => {
                return Err(
                    anyhow::anyhow!("--depth applies to hat specs, not {}", other.kind()).into(),
                )
            }
        }
    }
    if let Some(s) = &spec {
        if suites.len() != 1 || suites[0].name() != s.kind() {
            return Err(anyhow::anyhow!("a {} spec cannot drive suite {suite}", s.kind()).into());
        }
    }
    let opts = SuiteOptions { seed, spec };
    let reports: Vec<VerificationReport> = suites.iter().map(|&s| run_suite(s, &opts)).collect();
    for r in &reports {
        for c in &r.checks {
            eprintln!(
                "{} {} measured {:e} {} {:e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.id,
                c.measured,
                c.relation,
                c.threshold
            );
            if let Some(d) = &c.detail {
                eprintln!("    {d}");
            }
        }
    }
    let passed = reports.iter().all(|r| r.passed);
    emit(
        out,
        &pretty(&json!({ "passed": passed, "seed": seed, "reports": reports }))?,
    )?;
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match &cli.command {
        Command::Build {
            spec,
            grid,
            depth,
            out,
        } => build(spec, *grid, *depth, out.as_deref()),
        Command::Profile {
            spec,
            grid,
            ladder,
            depth,
            out,
        } => run_profile(spec, *grid, *ladder, *depth, out.as_deref()),
        Command::Verify {
            suite,
            spec,
            seed,
            depth,
            out,
        } => verify(suite, spec.as_deref(), *seed, *depth, out.as_deref()),
    };
    eprintln!("wall time {:.3} s", start.elapsed().as_secs_f64());
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(ConfigError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
