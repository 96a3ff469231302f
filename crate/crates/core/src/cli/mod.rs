//! Command-line front end. Every subcommand writes a flat CSV (to `--out` or
//! standard output).
//!
//! Exit codes: 0 success, 1 numeric or domain failure, 2 usage error.

mod svg;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::complexity::{log_spaced, sweep_lambda, RegretCurvePoint, DEFAULT_REGRET_GRID};
use crate::lowerbound::{bayes_risk_three_point, lfp_magnitudes, prior_entropy, solve_lfp_eps, three_point};
use crate::online::{
    lambda_star, regret_upper_bound, run_online, DataMode, LambdaChoice, OnlineConfig, OnlineRunResult,
};
use crate::priors::{infinite_dim_partial_bounds, infinite_dim_weights};
use crate::Error;

pub use svg::render_sweep_svg;

pub const SWEEP_HEADER: &str = "lambda,shtarkov,regret_st,regret_jeffreys,st_upper,argmax_u_st,argmax_u_jeffreys";
pub const BOUNDS_HEADER: &str = "d,n,L,B,lambda_star,upper_bound,lower_bound,ratio";
pub const ONLINE_HEADER: &str = "t,step_loss,cum_regret_luckiness,cum_regret_ball";
pub const LOWERBOUND_HEADER: &str = "eps,mu,entropy,bayes_risk,ratio";
pub const LOWERBOUND_DIAG_HEADER: &str = ",P_d_bound,d_eps,risk_scale";
pub const WEIGHTS_HEADER: &str = "j,lambda_j,partial_bound";

#[derive(Debug, Parser)]
#[command(
    name = "l1minimax",
    version,
    about = "Minimax regret under l1-penalized logarithmic loss",
    after_help = "Set RAYON_NUM_THREADS to control the worker pool used by `sweep`."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Worst-case regrets of the spike-and-tails and tilted Jeffreys priors over a log-spaced lambda grid.
    Sweep(SweepArgs),
    /// Upper bound of the spike-and-tails mixture vs. the minimax lower bound on an l1-ball.
    Bounds(BoundsArgs),
    /// Sequential run of the spike-and-tails mixture on Gaussian losses.
    Online(OnlineArgs),
    /// Three-point prior entropy and Bayes risk.
    Lowerbound(LowerboundArgs),
    /// Per-coordinate penalty weights for infinitely many dimensions.
    Weights(WeightsArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.1)]
    pub lam_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub lam_max: f64,
    /// Number of log-spaced lambda values.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Upper end of the search range for the worst case [default: 10 + 5 lambda].
    #[arg(long)]
    pub u_max: Option<f64>,
    /// Scan size of the worst-case search.
    #[arg(long, default_value_t = DEFAULT_REGRET_GRID)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a line chart of the three curves.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub d: usize,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Per-round smoothness (precision).
    #[arg(long = "L", default_value_t = 1.0)]
    pub smoothness: f64,
    /// l1-ball radius.
    #[arg(long = "B", default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DataArg {
    Adversarial,
    Gaussian,
    Zeros,
}

#[derive(Debug, Args)]
pub struct OnlineArgs {
    #[arg(long, default_value_t = 100)]
    pub d: usize,
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long = "L", default_value_t = 1.0)]
    pub smoothness: f64,
    #[arg(long = "B", default_value_t = 1.0)]
    pub radius: f64,
    /// A positive number, or `auto` for sqrt(2 L n ln(d / sqrt(L n))).
    #[arg(long, default_value = "auto", value_parser = parse_lambda)]
    pub lam: LambdaChoice,
    #[arg(long, value_enum, default_value_t = DataArg::Adversarial)]
    pub data: DataArg,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LowerboundArgs {
    /// Comma-separated values in (0, 1).
    #[arg(long, default_value = "0.1,0.01,0.001", value_parser = parse_eps_list)]
    pub eps_list: EpsList,
    #[arg(long = "L", default_value_t = 1.0)]
    pub smoothness: f64,
    /// Diagnostics: fraction c in (0, 1) (requires --B and --d).
    #[arg(long, requires_all = ["radius", "d"])]
    pub c: Option<f64>,
    #[arg(long = "B", requires_all = ["c", "d"])]
    pub radius: Option<f64>,
    #[arg(long, requires_all = ["c", "radius"])]
    pub d: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    #[arg(long = "L", default_value_t = 1.0)]
    pub smoothness: f64,
    /// Number of coordinates J.
    #[arg(long, default_value_t = 10)]
    pub dims: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsList(pub Vec<f64>);

fn parse_lambda(s: &str) -> std::result::Result<LambdaChoice, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(LambdaChoice::Auto);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(LambdaChoice::Fixed(v)),
        _ => Err(format!("expected a positive number or `auto`, got `{s}`")),
    }
}

fn parse_eps_list(s: &str) -> std::result::Result<EpsList, String> {
    let values = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<f64>() {
            Ok(v) if v > 0.0 && v < 1.0 => Ok(v),
            _ => Err(format!("`{t}` is not a number in (0, 1)")),
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("eps list is empty".into());
    }
    Ok(EpsList(values))
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

/// Parses `args` (program name first) and runs the subcommand; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Online(a) => cmd_online(a),
        Command::Lowerbound(a) => cmd_lowerbound(a),
        Command::Weights(a) => cmd_weights(a),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn emit(out: Option<&Path>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| CliError::Numeric(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout()
            .lock()
            .write_all(body.as_bytes())
            .map_err(|e| CliError::Numeric(format!("cannot write to stdout: {e}"))),
    }
}

fn join_row(cells: &[String]) -> String {
    let mut row = cells.join(",");
    row.push('\n');
    row
}

pub fn sweep_csv(rows: &[RegretCurvePoint]) -> String {
    let mut s = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.lam, r.shtarkov, r.regret_st, r.regret_jeffreys, r.st_upper, r.argmax_u_st, r.argmax_u_jeffreys
        );
    }
    s
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<(), CliError> {
    if !(a.lam_min > 0.0 && a.lam_min.is_finite() && a.lam_max.is_finite()) || a.lam_max < a.lam_min {
        return Err(usage(format!(
            "need 0 < --lam-min <= --lam-max, got {} and {}",
            a.lam_min, a.lam_max
        )));
    }
    if a.points == 0 {
        return Err(usage("--points must be at least 1"));
    }
    if a.grid < 2 {
        return Err(usage("--grid must be at least 2"));
    }
    if let Some(u) = a.u_max {
        if !(u > 0.0 && u.is_finite()) {
            return Err(usage(format!("--u-max must be positive, got {u}")));
        }
    }
    let lams = log_spaced(a.lam_min, a.lam_max, a.points)?;
    let rows = sweep_lambda(&lams, a.u_max, a.grid)?;
    emit(a.out.as_deref(), &sweep_csv(&rows))?;
    if let Some(path) = &a.svg {
        std::fs::write(path, render_sweep_svg(&rows))
            .map_err(|e| CliError::Numeric(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

/// The single data row of `bounds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsRow {
    pub lambda_star: f64,
    pub upper: f64,
    pub lower: f64,
    pub ratio: f64,
}

pub fn bounds_row(d: usize, n: usize, smoothness: f64, radius: f64) -> crate::Result<BoundsRow> {
    let lambda_star = lambda_star(smoothness, n, d)?;
    let upper = regret_upper_bound(radius, smoothness, n, d)?;
    let lower = crate::lowerbound::minimax_regret_lower(radius, smoothness * n as f64, d)?;
    Ok(BoundsRow {
        lambda_star,
        upper,
        lower,
        ratio: upper / lower,
    })
}

pub fn cmd_bounds(a: &BoundsArgs) -> Result<(), CliError> {
    if a.d == 0 || a.n == 0 {
        return Err(usage("--d and --n must be at least 1"));
    }
    if !(a.smoothness > 0.0 && a.radius > 0.0) {
        return Err(usage("--L and --B must be positive"));
    }
    let row = bounds_row(a.d, a.n, a.smoothness, a.radius)?;
    let body = format!(
        "{BOUNDS_HEADER}\n{}",
        join_row(&[
            a.d.to_string(),
            a.n.to_string(),
            a.smoothness.to_string(),
            a.radius.to_string(),
            row.lambda_star.to_string(),
            row.upper.to_string(),
            row.lower.to_string(),
            row.ratio.to_string(),
        ])
    );
    emit(a.out.as_deref(), &body)
}

pub fn online_csv(r: &OnlineRunResult) -> String {
    let mut s = format!("{ONLINE_HEADER}\n");
    for (i, step) in r.step_losses.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            i + 1,
            step,
            r.cum_regret_luckiness[i],
            r.cum_regret_ball[i]
        );
    }
    let _ = writeln!(
        s,
        "total,{},{},{}",
        r.sequential_mixture_loss(),
        r.batch.luckiness,
        r.batch.ball
    );
    s
}

/// CSV body and the human-readable bound comparison of `online`.
pub fn online_outputs(a: &OnlineArgs) -> Result<(String, String), CliError> {
    if a.d == 0 || a.n == 0 {
        return Err(usage("--d and --n must be at least 1"));
    }
    if !(a.smoothness > 0.0 && a.radius > 0.0) {
        return Err(usage("--L and --B must be positive"));
    }
    let cfg = OnlineConfig {
        d: a.d,
        n: a.n,
        smoothness: a.smoothness,
        radius: a.radius,
        lam: a.lam,
        data: match a.data {
            DataArg::Adversarial => DataMode::AdversarialMean,
            DataArg::Gaussian => DataMode::IidGaussian,
            DataArg::Zeros => DataMode::Zeros,
        },
        seed: a.seed,
    };
    let r = run_online(&cfg)?;
    let summary = format!(
        "lambda = {}\ncumulative regret (ball) = {}\ncumulative regret (luckiness) = {}\nbound = {}\nwithin bound: {}\n",
        r.lam,
        r.cumulative_regret_ball,
        r.cumulative_regret_luckiness,
        r.bound,
        r.cumulative_regret_ball <= r.bound
    );
    Ok((online_csv(&r), summary))
}

pub fn cmd_online(a: &OnlineArgs) -> Result<(), CliError> {
    let (csv, summary) = online_outputs(a)?;
    emit(a.out.as_deref(), &csv)?;
    // Keep the CSV on stdout clean when no file was given.
    if a.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

pub fn cmd_lowerbound(a: &LowerboundArgs) -> Result<(), CliError> {
    if !(a.smoothness > 0.0 && a.smoothness.is_finite()) {
        return Err(usage("--L must be positive"));
    }
    let diag = match (a.c, a.radius, a.d) {
        (Some(c), Some(b), Some(d)) => {
            if !(c > 0.0 && c < 1.0 && b > 0.0) || d == 0 {
                return Err(usage("need 0 < --c < 1, --B > 0 and --d >= 1"));
            }
            Some((c, b, d))
        }
        _ => None,
    };
    let mut eps_values = a.eps_list.0.clone();
    if let Some((c, b, d)) = diag {
        eps_values.push(solve_lfp_eps(c, b, d, a.smoothness)?);
    }

    let mut s = String::from(LOWERBOUND_HEADER);
    if diag.is_some() {
        s.push_str(LOWERBOUND_DIAG_HEADER);
    }
    s.push('\n');
    for eps in eps_values {
        let mu = three_point(eps, a.smoothness)?.mu;
        let entropy = prior_entropy(eps)?;
        let risk = bayes_risk_three_point(eps, a.smoothness)?;
        let mut cells = vec![
            eps.to_string(),
            mu.to_string(),
            entropy.to_string(),
            risk.to_string(),
            (risk / entropy).to_string(),
        ];
        if let Some((c, _, d)) = diag {
            let m = lfp_magnitudes(eps, c, d)?;
            cells.extend([m.p_d_bound.to_string(), m.d_eps.to_string(), m.risk_scale.to_string()]);
        }
        s.push_str(&join_row(&cells));
    }
    emit(a.out.as_deref(), &s)
}

pub fn cmd_weights(a: &WeightsArgs) -> Result<(), CliError> {
    if a.dims < 1 {
        return Err(usage("--dims must be at least 1"));
    }
    if !(a.smoothness > 0.0 && a.smoothness.is_finite()) {
        return Err(usage("--L must be positive"));
    }
    let weights = infinite_dim_weights(a.smoothness, a.dims)?;
    let partial = infinite_dim_partial_bounds(a.dims)?;
    let mut s = format!("{WEIGHTS_HEADER}\n");
    for (j, (w, p)) in weights.iter().zip(&partial).enumerate() {
        let _ = writeln!(s, "{},{},{}", j + 1, w, p);
    }
    emit(a.out.as_deref(), &s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_list_parsing() {
        assert_eq!(
            parse_eps_list("0.1, 0.01,0.001").unwrap(),
            EpsList(vec![0.1, 0.01, 0.001])
        );
        assert!(parse_eps_list("").is_err());
        assert!(parse_eps_list("0.1,abc").is_err());
        assert!(parse_eps_list("1.5").is_err());
    }

    #[test]
    fn lambda_parsing() {
        assert_eq!(parse_lambda("auto").unwrap(), LambdaChoice::Auto);
        assert_eq!(parse_lambda("2.5").unwrap(), LambdaChoice::Fixed(2.5));
        assert!(parse_lambda("-1").is_err());
    }

    #[test]
    fn bounds_row_values() {
        let r = bounds_row(1_000_000, 100, 1.0, 1.0).unwrap();
        assert!((r.lambda_star - 47.9847).abs() < 1e-3);
        assert!((r.upper - 48.304).abs() < 1e-2);
        assert!((r.lower - 23.9924).abs() < 1e-3);
        assert!(r.ratio >= 2.0 && r.ratio <= 2.1);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["l1minimax", "sweep", "--bogus"]), 2);
        assert_eq!(run(["l1minimax", "lowerbound", "--eps-list", ""]), 2);
        assert_eq!(run(["l1minimax", "weights", "--dims", "0"]), 2);
        assert_eq!(run(["l1minimax", "sweep", "--points", "0"]), 2);
        assert_eq!(run(["l1minimax", "lowerbound", "--c", "0.5"]), 2);
    }

    #[test]
    fn domain_errors_exit_one() {
        assert_eq!(run(["l1minimax", "bounds", "--d", "10", "--n", "100", "--L", "1"]), 1);
        assert_eq!(run(["l1minimax", "online", "--d", "10", "--n", "100"]), 1);
    }
}
