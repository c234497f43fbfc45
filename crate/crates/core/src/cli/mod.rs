//! Command-line front end.
//!
//! Every subcommand builds a list of [`Record`]s and renders them in one go,
//! so an error never leaves partial output on stdout. Exit codes: 0 on
//! success, 1 on usage or domain errors, 2 when any verdict is `Violated`.

mod grid;
mod output;
mod selftest;

use std::io::Write;

use clap::{Args, Parser, Subcommand};

use crate::moments::{
    even_exponent_ratio, joint_abs_moment, marginal_abs_moment, moment_ratio_eval, one_dim_ratio,
    BivariatePairSpec, ExponentPair, RHO_MAX,
};
use crate::oracle::{isserlis_even_moment, mc_joint_moment, quad_joint_moment};
use crate::verify::{
    check_bivariate, check_monotonicity, check_one_dim, sweep, SweepGrid, DEFAULT_TOLERANCE,
};

pub use grid::parse_grid;
pub use output::{Format, Inputs, Record, Summary, SummaryRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATED: i32 = 2;

const DEFAULT_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "gpi", version, about = "Gaussian product inequality calculator and checker")]
pub struct RunConfig {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Absolute moments of one Gaussian or of a correlated pair.
    #[command(subcommand)]
    Moment(MomentCommand),
    /// Joint moment over the product of marginal moments.
    #[command(allow_negative_numbers = true)]
    Ratio(RatioArgs),
    /// Check one inequality and report a verdict.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Check the bivariate inequality over a grid.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Independent numerical oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Default grid, identity suite and oracle cross-checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Subcommand)]
pub enum MomentCommand {
    /// E|X|^nu for X ~ N(0, sigma^2).
    #[command(allow_negative_numbers = true)]
    Marginal {
        #[arg(long)]
        nu: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
    },
    /// E|X1|^alpha1 |X2|^alpha2; `--rho 1` or `-1` uses the degenerate limit.
    #[command(allow_negative_numbers = true)]
    Joint(PairArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub alpha1: f64,
    #[arg(long)]
    pub alpha2: f64,
    #[arg(long)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
}

#[derive(Debug, Args)]
pub struct RatioArgs {
    #[arg(long)]
    pub alpha1: f64,
    #[arg(long, conflicts_with = "m")]
    pub alpha2: Option<f64>,
    /// Even second exponent `2m`, evaluated by the finite sum.
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, required_unless_present = "one_dim")]
    pub rho: Option<f64>,
    /// E|X|^(a1+a2) / (E|X|^a1 E|X|^a2) for a single Gaussian.
    #[arg(long, conflicts_with_all = ["m", "rho"])]
    pub one_dim: bool,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Joint moment against the product of marginals.
    #[command(allow_negative_numbers = true)]
    Bivariate {
        #[arg(long)]
        alpha1: f64,
        #[arg(long)]
        alpha2: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// One-dimensional ratio against (a1+1)(a2+1)/(a1+a2+1).
    #[command(allow_negative_numbers = true)]
    OneDim {
        #[arg(long)]
        alpha1: f64,
        #[arg(long)]
        alpha2: f64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// Sign of the derivative of the moment ratio in z = rho^2.
    #[command(allow_negative_numbers = true)]
    Monotonicity {
        #[arg(long)]
        alpha1: f64,
        #[arg(long)]
        alpha2: f64,
        /// z values in [0, 0.9].
        #[arg(long, default_value = "0.1:0.9:0.1", allow_hyphen_values = true)]
        z_grid: String,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha1_grid: String,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha2_grid: String,
    #[arg(long, allow_hyphen_values = true)]
    pub rho_grid: String,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Add the current time to the summary (output is then not reproducible).
    #[arg(long)]
    pub timestamp: bool,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Seeded Monte Carlo estimate of the joint moment.
    #[command(allow_negative_numbers = true)]
    Mc {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Adaptive quadrature of the joint moment.
    #[command(allow_negative_numbers = true)]
    Quad {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 1e-9)]
        rel_tol: f64,
    },
    /// E[X1^(2p) X2^(2q)] for unit variances by pairing enumeration.
    #[command(allow_negative_numbers = true)]
    Isserlis {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        rho: f64,
    },
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Seed for the Monte Carlo cross-checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,
}

/// Entry point used by the binary.
pub fn run(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the command line `argv` (program name first) against the given
/// streams and returns the exit code.
pub fn run_with(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = writeln!(err, "error: {}", first_line(&e.to_string()));
                    EXIT_ERROR
                }
            };
        }
    };
    match execute(&config.command) {
        Ok((records, summary)) => {
            let text = output::render(&records, summary.as_ref(), config.format);
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return EXIT_ERROR;
            }
            if records.iter().any(Record::is_violation) {
                EXIT_VIOLATED
            } else {
                EXIT_OK
            }
        }
        Err(msg) => {
            let _ = writeln!(err, "error: {}", first_line(&msg));
            EXIT_ERROR
        }
    }
}

fn first_line(msg: &str) -> &str {
    let msg = msg.trim_start_matches("error: ");
    msg.lines().next().unwrap_or("").trim()
}

type Outcome = Result<(Vec<Record>, Option<Summary>), String>;

fn execute(command: &Command) -> Outcome {
    match command {
        Command::Moment(m) => moment(m),
        Command::Ratio(args) => ratio(args),
        Command::Verify(v) => verify(v),
        Command::Sweep(args) => run_sweep(args),
        Command::Oracle(o) => oracle(o),
        Command::Selftest(args) => {
            let records = selftest::run(args.seed, args.samples).map_err(|e| e.to_string())?;
            let summary = Summary::from_records(&records);
            Ok((records, Some(summary)))
        }
    }
}

fn single(record: Record) -> Outcome {
    Ok((vec![record], None))
}

fn pair_inputs(check: &str, p: &PairArgs) -> Inputs {
    let mut inputs = Inputs::new(check).pair(p.alpha1, p.alpha2).rho(p.rho);
    inputs.sigma1 = Some(p.sigma1);
    inputs.sigma2 = Some(p.sigma2);
    inputs
}

fn pair_domain(p: &PairArgs) -> Result<(ExponentPair, BivariatePairSpec), String> {
    let pair = ExponentPair::new(p.alpha1, p.alpha2).map_err(|e| e.to_string())?;
    let spec = BivariatePairSpec::new(p.sigma1, p.sigma2, p.rho).map_err(|e| e.to_string())?;
    Ok((pair, spec))
}

fn moment(m: &MomentCommand) -> Outcome {
    match m {
        MomentCommand::Marginal { nu, sigma } => {
            let v = marginal_abs_moment(*nu, *sigma).map_err(|e| e.to_string())?;
            let mut inputs = Inputs::new("moment_marginal");
            inputs.nu = Some(*nu);
            inputs.sigma1 = Some(*sigma);
            single(Record::value(inputs, v.value, v.error_bound, v.method.as_str()))
        }
        MomentCommand::Joint(p) => {
            let (pair, spec) = pair_domain(p)?;
            let v = joint_abs_moment(pair, spec).map_err(|e| e.to_string())?;
            single(Record::value(pair_inputs("moment_joint", p), v.value, v.error_bound, v.method.as_str()))
        }
    }
}

fn ratio(args: &RatioArgs) -> Outcome {
    if args.one_dim {
        let alpha2 = args.alpha2.ok_or("--one-dim needs --alpha2")?;
        let v = one_dim_ratio(args.alpha1, alpha2).map_err(|e| e.to_string())?;
        let inputs = Inputs::new("ratio_one_dim").pair(args.alpha1, alpha2);
        return single(Record::value(inputs, v, 16.0 * f64::EPSILON * v, "beta_ratio"));
    }
    let rho = args.rho.ok_or("--rho is required")?;
    match (args.alpha2, args.m) {
        (None, Some(m)) => {
            let v = even_exponent_ratio(args.alpha1, m, rho).map_err(|e| e.to_string())?;
            let mut inputs = Inputs::new("ratio_even").rho(rho);
            inputs.alpha1 = Some(args.alpha1);
            inputs.m = Some(m);
            let bound = 4.0 * (m as f64 + 1.0) * f64::EPSILON * v.abs();
            single(Record::value(inputs, v, bound, "closed_form"))
        }
        (Some(alpha2), None) => {
            let pair = ExponentPair::new(args.alpha1, alpha2).map_err(|e| e.to_string())?;
            let eval = moment_ratio_eval(pair, rho).map_err(|e| e.to_string())?;
            let inputs = Inputs::new("ratio").pair(args.alpha1, alpha2).rho(rho);
            let bound = eval.tail_bound + 64.0 * f64::EPSILON * eval.value.abs();
            single(Record::value(inputs, eval.value, bound, "hypergeometric"))
        }
        _ => Err("ratio needs exactly one of --alpha2 or --m".into()),
    }
}

fn verify(v: &VerifyCommand) -> Outcome {
    match v {
        VerifyCommand::Bivariate { alpha1, alpha2, rho, tolerance } => {
            let pair = ExponentPair::new(*alpha1, *alpha2).map_err(|e| e.to_string())?;
            let verdict = check_bivariate(pair, *rho, *tolerance).map_err(|e| e.to_string())?;
            let inputs = Inputs::new("bivariate").pair(*alpha1, *alpha2).rho(*rho);
            single(Record::verdict(inputs, &verdict, "hypergeometric"))
        }
        VerifyCommand::OneDim { alpha1, alpha2, tolerance } => {
            let verdict = check_one_dim(*alpha1, *alpha2, *tolerance).map_err(|e| e.to_string())?;
            let inputs = Inputs::new("one_dim").pair(*alpha1, *alpha2);
            single(Record::verdict(inputs, &verdict, "beta_ratio"))
        }
        VerifyCommand::Monotonicity { alpha1, alpha2, z_grid } => {
            let zs = parse_grid(z_grid)?;
            let pair = ExponentPair::new(*alpha1, *alpha2).map_err(|e| e.to_string())?;
            let verdict = check_monotonicity(pair, &zs).map_err(|e| e.to_string())?;
            let mut inputs = Inputs::new("monotonicity").pair(*alpha1, *alpha2);
            inputs.grid = Some(z_grid.clone());
            single(Record::verdict(inputs, &verdict, "kernel_derivative"))
        }
    }
}

fn run_sweep(args: &SweepArgs) -> Outcome {
    let a1 = parse_grid(&args.alpha1_grid).map_err(|e| format!("--alpha1-grid: {e}"))?;
    let a2 = parse_grid(&args.alpha2_grid).map_err(|e| format!("--alpha2-grid: {e}"))?;
    let rho = parse_grid(&args.rho_grid).map_err(|e| format!("--rho-grid: {e}"))?;
    // Reject out-of-domain values before any computation.
    for &a in a1.iter().chain(&a2) {
        if !(a > -1.0) {
            return Err(format!("grid exponent {a} is not > -1"));
        }
    }
    if let Some(r) = rho.iter().find(|r| !(r.abs() <= RHO_MAX)) {
        return Err(format!("grid correlation {r} is outside [-{RHO_MAX}, {RHO_MAX}]"));
    }
    let grid = SweepGrid::new(a1, a2, rho).map_err(|e| e.to_string())?;
    let report = sweep(&grid, args.tolerance).map_err(|e| e.to_string())?;
    if let Some(s) = report.skipped.first() {
        return Err(format!(
            "point alpha1={} alpha2={} rho={} failed: {}",
            s.alpha1, s.alpha2, s.rho, s.reason
        ));
    }
    let records: Vec<Record> = report
        .records
        .iter()
        .map(|r| {
            let inputs = Inputs::new("bivariate").pair(r.alpha1, r.alpha2).rho(r.rho);
            Record::verdict(inputs, &r.verdict, "hypergeometric")
        })
        .collect();
    let mut summary = Summary::from_records(&records);
    if args.timestamp {
        summary.timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
    }
    Ok((records, Some(summary)))
}

fn oracle(o: &OracleCommand) -> Outcome {
    match o {
        OracleCommand::Mc { pair: p, samples, seed } => {
            let (pair, spec) = pair_domain(p)?;
            let est = mc_joint_moment(pair, spec, *samples, *seed).map_err(|e| e.to_string())?;
            let mut inputs = pair_inputs("oracle_mc", p);
            inputs.samples = Some(*samples);
            inputs.seed = Some(*seed);
            let mut record = Record::value(inputs, est.mean, est.std_error, "monte_carlo");
            record.variance_finite = Some(est.variance_finite);
            single(record)
        }
        OracleCommand::Quad { pair: p, rel_tol } => {
            let (pair, spec) = pair_domain(p)?;
            let est = quad_joint_moment(pair, spec, *rel_tol).map_err(|e| e.to_string())?;
            let mut inputs = pair_inputs("oracle_quad", p);
            inputs.tolerance = Some(*rel_tol);
            single(Record::value(inputs, est.value, est.abs_error_estimate, "quadrature"))
        }
        OracleCommand::Isserlis { p, q, rho } => {
            let v = isserlis_even_moment(*p, *q, *rho).map_err(|e| e.to_string())?;
            let mut inputs = Inputs::new("oracle_isserlis").rho(*rho);
            inputs.p = Some(*p);
            inputs.q = Some(*q);
            single(Record::value(inputs, v, 0.0, "isserlis"))
        }
    }
}
