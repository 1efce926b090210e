use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use sepint_cli::criteria::CriterionResult;
use sepint_cli::{dispatch, RunConfig, OUT_ENV};

#[derive(Debug, Parser)]
#[command(name = "sepint", version, about = "Checks for superintegrable potentials separable in polar coordinates")]
struct Cli {
    /// JSON run configuration; flags given on the command line override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for reports and artifacts.
    #[arg(long, global = true, env = OUT_ENV)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for batch work.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Tolerance override, `key=value`; repeatable.
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    #[command(subcommand)]
    command: Option<Command>,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    let v: f64 = v.parse().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.to_string(), v))
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the compatibility condition of a leading term against R(r) + S(θ)/r².
    LccCheck {
        /// Leading-term JSON (Cartesian or polar).
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Radial part: zero, kepler[:a], oscillator[:b], onofri[:a,d].
        #[arg(long, alias = "R")]
        radial: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        harmonics: Option<u32>,
    },
    /// Dimension of leading terms compatible with a radial part.
    RadialScan {
        #[arg(long = "N")]
        n: Option<u32>,
        #[arg(long)]
        radial: Option<String>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        r_lo: Option<f64>,
        #[arg(long)]
        r_hi: Option<f64>,
        /// `admissible` or `excluded`.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Build and export a potential; parameters come from a JSON file.
    Construct {
        /// JSON object with a `family` key and the family's parameters.
        #[arg(long)]
        params: Option<PathBuf>,
        /// File stem for the exported header and table.
        #[arg(long)]
        name: Option<String>,
    },
    /// Integrate an orbit and report closure.
    Orbit {
        /// Exported potential header (JSON).
        #[arg(long)]
        potential: Option<PathBuf>,
        /// Initial phase point as JSON, or a path to one.
        #[arg(long)]
        init: Option<String>,
        #[arg(long)]
        periods: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        /// `leapfrog` or `yoshida4`.
        #[arg(long)]
        scheme: Option<String>,
        #[arg(long)]
        q_max: Option<u64>,
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Integrate Painlevé VI and optionally tabulate the quantum exotic profile.
    P6 {
        /// Four comma-separated parameters.
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<f64>>,
        #[arg(long)]
        tau0: Option<f64>,
        #[arg(long)]
        p0: Option<f64>,
        #[arg(long)]
        dp0: Option<f64>,
        #[arg(long)]
        lo: Option<f64>,
        #[arg(long)]
        hi: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long = "N")]
        n: Option<u32>,
        #[arg(long)]
        hbar: Option<f64>,
        /// `cos2` or `sin2`.
        #[arg(long)]
        tau: Option<String>,
    },
    /// Search for a polynomial relation among H, X and a third observable.
    Dependence {
        #[arg(long)]
        potential: Option<PathBuf>,
        /// `product`, `lz-p2` or `generic`.
        #[arg(long)]
        third: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        degree: Option<u32>,
        /// `syzygy`, `independent` or `any`.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Run a named suite of acceptance criteria.
    Suite {
        /// `acceptance` or `smoke`.
        #[arg(conflicts_with = "name_flag")]
        name: Option<String>,
        #[arg(long = "name", id = "name_flag")]
        name_flag: Option<String>,
    },
    /// Summarize the reports in a directory.
    Report {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run whatever the configuration file names.
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {}

fn put<T: serde::Serialize>(m: &mut Map<String, Value>, key: &str, v: Option<T>) {
    if let Some(v) = v {
        m.insert(key.into(), json!(v));
    }
}

fn command_params(cmd: Command) -> anyhow::Result<Option<(&'static str, Map<String, Value>)>> {
    let mut m = Map::new();
    let name = match cmd {
        Command::LccCheck {
            spec,
            radial,
            trials,
            harmonics,
        } => {
            put(&mut m, "spec", spec);
            put(&mut m, "radial", radial);
            put(&mut m, "trials", trials);
            put(&mut m, "harmonics", harmonics);
            "lcc-check"
        }
        Command::RadialScan {
            n,
            radial,
            count,
            r_lo,
            r_hi,
            expect,
        } => {
            put(&mut m, "N", n);
            put(&mut m, "radial", radial);
            put(&mut m, "count", count);
            put(&mut m, "r_lo", r_lo);
            put(&mut m, "r_hi", r_hi);
            put(&mut m, "expect", expect);
            "radial-scan"
        }
        Command::Construct { params, name } => {
            if let Some(path) = params {
                let raw = std::fs::read_to_string(&path)?;
                match serde_json::from_str(&raw)? {
                    Value::Object(obj) => m = obj,
                    _ => anyhow::bail!("{} must hold a JSON object", path.display()),
                }
            }
            put(&mut m, "name", name);
            "construct"
        }
        Command::Orbit {
            potential,
            init,
            periods,
            dt,
            scheme,
            q_max,
            stride,
        } => {
            put(&mut m, "potential", potential);
            if let Some(s) = init {
                // inline JSON, otherwise a path
                let v = serde_json::from_str::<Value>(&s).unwrap_or(Value::String(s));
                m.insert("init".into(), v);
            }
            put(&mut m, "periods", periods);
            put(&mut m, "dt", dt);
            put(&mut m, "scheme", scheme);
            put(&mut m, "q_max", q_max);
            put(&mut m, "stride", stride);
            "orbit"
        }
        Command::P6 {
            gammas,
            tau0,
            p0,
            dp0,
            lo,
            hi,
            samples,
            n,
            hbar,
            tau,
        } => {
            put(&mut m, "gammas", gammas);
            put(&mut m, "tau0", tau0);
            put(&mut m, "p0", p0);
            put(&mut m, "dp0", dp0);
            put(&mut m, "lo", lo);
            put(&mut m, "hi", hi);
            put(&mut m, "samples", samples);
            put(&mut m, "N", n);
            put(&mut m, "hbar", hbar);
            put(&mut m, "tau", tau);
            "p6"
        }
        Command::Dependence {
            potential,
            third,
            samples,
            degree,
            expect,
        } => {
            put(&mut m, "potential", potential);
            put(&mut m, "third", third);
            put(&mut m, "samples", samples);
            put(&mut m, "degree", degree);
            put(&mut m, "expect", expect);
            "dependence"
        }
        Command::Suite { name, name_flag } => {
            put(&mut m, "name", name.or(name_flag));
            "suite"
        }
        Command::Report { input } => {
            put(&mut m, "input", input);
            "report"
        }
        Command::Run(_) => return Ok(None),
    };
    Ok(Some((name, m)))
}

fn build_config(cli: Cli) -> anyhow::Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::new(""),
    };
    match cli.command.map(command_params).transpose()?.flatten() {
        Some((name, params)) => {
            if !config.command.is_empty() && config.command != name {
                anyhow::bail!("configuration names {:?} but the command line asks for {name:?}", config.command);
            }
            config.command = name.to_string();
            config.params.extend(params);
        }
        None if config.command.is_empty() => anyhow::bail!("no command given; see --help"),
        None => {}
    }
    if let Some(out) = cli.out {
        config.output_dir = out;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if cli.jobs.is_some() {
        config.jobs = cli.jobs;
    }
    let overrides: BTreeMap<String, f64> = cli.tol.into_iter().collect();
    config.tolerances.extend(overrides);
    Ok(config)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = build_config(cli).and_then(|c| dispatch(&c));
    match outcome {
        Ok(out) => {
            let r = &out.report;
            if let Some(items) = r.results.get("results").and_then(Value::as_array) {
                for item in items {
                    if let Ok(c) = serde_json::from_value::<CriterionResult>(item.clone()) {
                        println!("{}", c.line());
                    }
                }
            }
            if let Some(err) = r.results.get("error").and_then(Value::as_str) {
                eprintln!("error: {err}");
            }
            println!(
                "{} {} -> {}",
                r.command,
                if r.passed { "PASS" } else { "FAIL" },
                out.path.display()
            );
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
