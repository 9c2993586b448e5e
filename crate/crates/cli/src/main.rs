mod jobs;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use loewner_core::definiteness::{Definiteness, DEFAULT_TOL};
use loewner_core::funcs::{FunctionDescriptor, Interval, WeightTag};
use loewner_core::intervals::{GridSpec, Requirement};
use loewner_core::loewner::identities::IdentityName;
use loewner_core::loewner::PointTuple;
use loewner_core::property::Property;
use loewner_core::search::implication::BoundaryTemplate;
use loewner_core::search::{AlphaGrid, Family};

use jobs::{Job, RunConfig};
use output::Format;

#[derive(Args, Debug, Clone)]
struct Common {
    /// RNG seed; drawn from entropy and recorded in the report when absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Relative tolerance for definiteness and order tests.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Report format [default: human].
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for data-parallel checks.
    #[arg(long, global = true, env = "LOEWNER_JOBS")]
    jobs: Option<usize>,
    /// Exit with status 2 when a counterexample or failure is found.
    #[arg(long, global = true)]
    expect_hold: bool,
}

#[derive(Args, Debug, Clone)]
struct FunctionArg {
    /// Preset (`power:0.5`, `moebius-monotone:0.5`, `moebius-convex:-0.5`,
    /// `piecewise-quad-linear`, `affine:c0:c1`, `neg:<preset>`) or inline JSON.
    #[arg(long, short = 'f', conflicts_with = "function_file")]
    function: Option<String>,
    /// JSON function descriptor file.
    #[arg(long)]
    function_file: Option<PathBuf>,
}

impl FunctionArg {
    fn resolve(&self) -> Result<FunctionDescriptor> {
        match (&self.function, &self.function_file) {
            (Some(s), None) => Ok(s.parse()?),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(text.parse()?)
            }
            _ => bail!("pass one of --function or --function-file"),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the Loewner matrix of f (or of a weighted f) at given points.
    Build {
        #[command(flatten)]
        function: FunctionArg,
        #[arg(long)]
        points: PointTuple,
        #[arg(long, default_value = "none")]
        weight: WeightTag,
        /// Endpoints for the interval weights; defaults to the function's domain.
        #[arg(long)]
        interval: Option<Interval>,
    },
    /// Test definiteness of a (weighted) Loewner matrix at given or random points.
    Check {
        #[command(flatten)]
        function: FunctionArg,
        #[arg(long, default_value = "none")]
        weight: WeightTag,
        #[arg(long, default_value = "psd")]
        property: Definiteness,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Test this tuple instead of random ones.
        #[arg(long)]
        points: Option<PointTuple>,
        /// Sampling interval and interval-weight endpoints.
        #[arg(long)]
        interval: Option<Interval>,
    },
    /// Randomized n-monotonicity check.
    Monotone {
        #[command(flatten)]
        args: OrderArgs,
    },
    /// Randomized n-convexity (or n-concavity) check.
    Convex {
        #[command(flatten)]
        args: OrderArgs,
        #[arg(long)]
        concave: bool,
    },
    /// Classify a one-parameter family over a grid of parameters.
    Sweep {
        #[arg(long, default_value = "power")]
        family: Family,
        /// `start:stop:step` or a single value.
        #[arg(long, allow_hyphen_values = true)]
        alpha: AlphaGrid,
        /// Matrix orders, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        order: Vec<usize>,
        /// Properties, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "monotone")]
        property: Vec<Property>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Skip re-testing c.p.d./c.n.d. tuples with the closed form.
        #[arg(long)]
        no_audit: bool,
    },
    /// Budgeted targeted search for a counterexample.
    Hunt {
        #[command(flatten)]
        function: FunctionArg,
        #[arg(long)]
        property: Property,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long)]
        interval: Option<Interval>,
    },
    /// Probe a cataloged implication or counterexample.
    Probe {
        /// Implication id, e.g. `convex[2n+1]=>cnd+bound[n]`.
        #[arg(required_unless_present = "list")]
        id: Option<String>,
        /// List catalog ids and exit.
        #[arg(long)]
        list: bool,
        /// Values of n, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        hunt_budget: usize,
    },
    /// Carry a function on a finite interval to (0, inf) and verify the transfer formulas.
    Conjugate {
        #[command(flatten)]
        function: FunctionArg,
        /// Points in the original interval; defaults to five interior points.
        #[arg(long)]
        points: Option<PointTuple>,
        /// Also tabulate the four boundary correspondences.
        #[arg(long)]
        limits: bool,
    },
    /// Evaluate the divided-difference identity suite at random arguments.
    VerifyIdentities {
        /// Identities to run, comma separated; all by default.
        #[arg(long, value_delimiter = ',')]
        identity: Vec<IdentityName>,
        #[arg(long, default_value_t = 1000)]
        evaluations: usize,
    },
    /// Heuristic estimate of a boundary limit of f.
    Boundary {
        #[command(flatten)]
        function: FunctionArg,
        /// One of: limsup-f-over-t, liminf-f-over-t, limsup-f-at-infinity,
        /// limsup-f-at-zero, limsup-t-f, liminf-t-f, limsup-t2-f,
        /// limsup-f-at-right, limsup-right-weighted, liminf-left-weighted,
        /// limsup-left-squared. Finite endpoints come from the function's domain.
        #[arg(long)]
        kind: String,
        /// One of: finite-above, finite-below, non-positive, non-negative.
        #[arg(long)]
        requirement: Option<String>,
        #[arg(long, default_value_t = GridSpec::default().ratio)]
        ratio: f64,
        #[arg(long, default_value_t = GridSpec::default().points)]
        grid_points: usize,
    },
    /// Re-score a witness from a report or witness JSON file.
    Replay {
        file: PathBuf,
    },
    /// Re-run the configuration embedded in a JSON or CSV report.
    Rerun {
        file: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
struct OrderArgs {
    #[command(flatten)]
    function: FunctionArg,
    #[arg(long, default_value_t = 2)]
    order: usize,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long)]
    interval: Option<Interval>,
}

#[derive(Parser, Debug)]
#[command(name = "loewner", version, about = "Loewner matrices, conditional definiteness and matrix monotonicity checks")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
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
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let common = cli.common;
    if let Some(n) = common.jobs {
        if n == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    if !(common.tol.is_finite() && common.tol >= 0.0) {
        bail!("--tol must be a non-negative number, got {}", common.tol);
    }
    let config = match cli.command {
        Command::Probe { list: true, .. } => {
            let mut out = String::new();
            for (id, imp) in loewner_core::search::catalog() {
                out.push_str(&format!("{id}\t{}\n", jobs::describe(&imp)));
            }
            emit(&common.output, &out)?;
            return Ok(0);
        }
        Command::Rerun { file } => {
            let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let mut config = output::extract_config(&text)?;
            if let Some(format) = common.format {
                config.format = format;
            }
            config
        }
        command => RunConfig {
            job: to_job(command)?,
            seed: common.seed.unwrap_or_else(rand::random),
            tol: common.tol,
            format: common.format.unwrap_or(Format::Human),
        },
    };
    let report = jobs::execute(&config)?;
    let text = output::render(&config, &report)?;
    emit(&common.output, &text)?;
    Ok(if common.expect_hold && report.counterexample { 2 } else { 0 })
}

fn emit(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn kebab<T: serde::de::DeserializeOwned>(what: &str, s: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| anyhow::anyhow!("unknown {what} `{s}` (see --help)"))
}

fn to_job(command: Command) -> Result<Job> {
    Ok(match command {
        Command::Build {
            function,
            points,
            weight,
            interval,
        } => Job::Build {
            function: function.resolve()?,
            points,
            weight,
            interval,
        },
        Command::Check {
            function,
            weight,
            property,
            order,
            trials,
            points,
            interval,
        } => Job::Check {
            function: function.resolve()?,
            weight,
            property,
            order: points.as_ref().map_or(order, |p| p.len()),
            trials,
            points,
            interval,
        },
        Command::Monotone { args } => order_job(args, Property::Monotone)?,
        Command::Convex { args, concave } => {
            order_job(args, if concave { Property::Concave } else { Property::Convex })?
        }
        Command::Sweep {
            family,
            alpha,
            order,
            property,
            trials,
            no_audit,
        } => Job::Sweep {
            family,
            alpha,
            orders: order,
            properties: property,
            trials,
            audit: !no_audit,
        },
        Command::Hunt {
            function,
            property,
            order,
            budget,
            interval,
        } => Job::Hunt {
            function: function.resolve()?,
            property,
            order,
            budget,
            interval,
        },
        Command::Probe {
            id,
            sizes,
            trials,
            hunt_budget,
            ..
        } => Job::Probe {
            id: id.context("an implication id is required")?,
            sizes,
            trials,
            hunt_budget,
        },
        Command::Conjugate {
            function,
            points,
            limits,
        } => Job::Conjugate {
            function: function.resolve()?,
            points,
            limits,
        },
        Command::VerifyIdentities { identity, evaluations } => Job::VerifyIdentities {
            identities: if identity.is_empty() {
                IdentityName::ALL.to_vec()
            } else {
                identity
            },
            evaluations,
        },
        Command::Boundary {
            function,
            kind,
            requirement,
            ratio,
            grid_points,
        } => {
            let template: BoundaryTemplate = kebab("boundary kind", &kind)?;
            let requirement: Option<Requirement> = requirement.map(|r| kebab("requirement", &r)).transpose()?;
            Job::Boundary {
                function: function.resolve()?,
                template,
                requirement,
                grid: GridSpec {
                    ratio,
                    points: grid_points,
                },
            }
        }
        Command::Replay { file } => {
            let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            Job::Replay {
                witness: output::extract_witness(&text)?,
            }
        }
        Command::Rerun { .. } => unreachable!("handled by the caller"),
    })
}

fn order_job(args: OrderArgs, property: Property) -> Result<Job> {
    Ok(Job::Order {
        function: args.function.resolve()?,
        property,
        order: args.order,
        trials: args.trials,
        interval: args.interval,
    })
}
