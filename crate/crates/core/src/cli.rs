//! Command-line front end.
//!
//! Every command writes exactly one artifact (CSV or JSON) to `--out` or
//! stdout. CSV headers carry units in brackets; JSON objects echo their
//! inputs. Exit status is 0 on success, 1 for rejected input and 2 when a
//! numerical method fails.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::channels::{Channel, Model, OutputKind};
use crate::constellation::{
    approx_jeffreys_constellation, fit_poly_density, jeffreys_constellation, pam_constellation,
    BarrierSchedule, Constellation,
};
use crate::error::{Error, Result};
use crate::jeffreys::{
    asymptotic_capacity, average_cost, jeffreys_factor, solve_lambda_star, TiltedPrior,
};
use crate::mutual_info::{blahut_arimoto, mi_finite_output, mi_gaussian_sufficient};
use crate::noniid::{fisher_rate_finite, fisher_rate_limit, Autocovariance};
use crate::receiver_quant::{capacity_loss_el, gaussian_tail_radius, loglog_slope, Quantizer1D};

#[derive(Debug, Parser)]
#[command(
    name = "jfactor",
    version,
    about = "Capacity and constellation design from Fisher information"
)]
pub struct Cli {
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-sample Fisher information on a θ grid (CSV).
    Fisher(FisherArgs),
    /// JF(λ) and the tilted average cost M(λ) on a λ grid (CSV).
    Jf(JfArgs),
    /// Optimally tilted Jeffreys prior density and CDF (CSV).
    Prior(PriorArgs),
    /// Optimal tilt for a power budget (JSON).
    LambdaStar(PowerArgs),
    /// Asymptotic capacity in bits (JSON).
    Capacity(CapacityArgs),
    /// Constellation points (CSV).
    Constellation(ConstellationArgs),
    /// Polynomial approximation of the tilted prior (JSON).
    FitPoly(FitPolyArgs),
    /// Exact mutual information of a constellation (JSON).
    Mi(MiArgs),
    /// Capacity loss of binned receivers (CSV).
    QuantLoss(QuantLossArgs),
    /// Fisher information rate in correlated noise (CSV).
    FisherRate(FisherRateArgs),
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct ChannelArg {
    /// Channel JSON, inline or a file path.
    #[arg(long)]
    pub channel: String,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct FisherArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    /// start:stop:count; defaults to 33 points across the parameter range.
    #[arg(long, allow_hyphen_values = true)]
    pub theta_grid: Option<Grid>,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct JfArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    #[arg(long = "P")]
    pub power: f64,
    #[arg(long, default_value = "0:4:64", allow_hyphen_values = true)]
    pub lambda_grid: Grid,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct PriorArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    #[arg(long = "P")]
    pub power: f64,
    /// Number of midpoints across the support.
    #[arg(long, default_value_t = 257)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct PowerArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    #[arg(long = "P")]
    pub power: f64,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct CapacityArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    #[arg(long = "P")]
    pub power: f64,
    #[arg(long)]
    pub nr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Jeffreys,
    Poly,
    Pam,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct ConstellationArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    #[arg(long = "P")]
    pub power: f64,
    #[arg(long = "M")]
    pub size: usize,
    #[arg(long, value_enum, default_value_t = Mode::Jeffreys)]
    pub mode: Mode,
    /// Polynomial degree for `--mode poly`.
    #[arg(long, default_value_t = 8)]
    pub degree: usize,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct FitPolyArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    /// Power budget; the fit targets the prior at its optimal tilt.
    #[arg(
        long = "P",
        conflicts_with = "lambda",
        required_unless_present = "lambda"
    )]
    pub power: Option<f64>,
    /// Explicit tilt instead of a power budget.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 8)]
    pub degree: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MiMode {
    Jeffreys,
    Poly,
    Pam,
    /// Blahut–Arimoto weights over the Jeffreys points.
    Ba,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct MiArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    #[arg(long = "P")]
    pub power: f64,
    #[arg(long = "M")]
    pub size: usize,
    #[arg(long)]
    pub nr: u64,
    #[arg(long, value_enum, default_value_t = MiMode::Jeffreys)]
    pub mode: MiMode,
    #[arg(long, default_value_t = 8)]
    pub degree: usize,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct QuantLossArgs {
    #[command(flatten)]
    pub channel: ChannelArg,
    /// Interior bin counts.
    #[arg(
        long = "L",
        value_delimiter = ',',
        default_value = "8,16,32,64,128,256,512,1024"
    )]
    pub levels: Vec<usize>,
    /// Fixed overflow radius; default 3 + √(ln L), or B for truncated noise.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = crate::receiver_quant::LOSS_GRID)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct FisherRateArgs {
    /// Autocovariance JSON, inline or a file path.
    #[arg(long)]
    pub acov: String,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "64,128,256,512,1024,2048,4096"
    )]
    pub n: Vec<usize>,
}

/// `start:stop:count`, evenly spaced and inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + h * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:count, got '{s}'"));
        }
        let start: f64 = parts[0].trim().parse().map_err(|e| format!("start: {e}"))?;
        let stop: f64 = parts[1].trim().parse().map_err(|e| format!("stop: {e}"))?;
        let count: usize = parts[2].trim().parse().map_err(|e| format!("count: {e}"))?;
        if !start.is_finite() || !stop.is_finite() || count == 0 {
            return Err(format!(
                "grid '{s}' needs finite bounds and a positive count"
            ));
        }
        Ok(Grid { start, stop, count })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

/// Result of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub body: String,
    /// Extra line for stderr.
    pub note: Option<String>,
}

impl Artifact {
    fn new(body: String) -> Self {
        Artifact { body, note: None }
    }
}

fn read_source(src: &str, what: &str) -> Result<String> {
    if src.trim_start().starts_with('{') {
        return Ok(src.to_string());
    }
    std::fs::read_to_string(src)
        .map_err(|e| Error::Validation(format!("cannot read {what} file '{src}': {e}")))
}

pub fn load_channel(src: &str) -> Result<Channel> {
    Channel::from_json(&read_source(src, "channel")?)
}

pub fn load_acov(src: &str) -> Result<Autocovariance> {
    let a: Autocovariance = serde_json::from_str(&read_source(src, "autocovariance")?)
        .map_err(|e| Error::Validation(format!("autocovariance JSON: {e}")))?;
    a.validate()?;
    Ok(a)
}

fn channel_value(ch: &Channel) -> Value {
    serde_json::from_str(&ch.to_json()).expect("channel JSON round-trips")
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

fn json_body(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn constellation_rows(c: &Constellation) -> Vec<Vec<String>> {
    c.points
        .iter()
        .zip(&c.probs)
        .enumerate()
        .map(|(i, (x, p))| vec![i.to_string(), num(*x), num(*p)])
        .collect()
}

fn build_constellation(
    ch: &Channel,
    power: f64,
    m: usize,
    mode: Mode,
    degree: usize,
) -> Result<Constellation> {
    match mode {
        Mode::Jeffreys => jeffreys_constellation(ch, power, m),
        Mode::Pam => pam_constellation(ch, power, m),
        Mode::Poly => {
            let sol = solve_lambda_star(ch, power)?;
            let fit = fit_poly_density(ch, sol.lambda_star, degree, &BarrierSchedule::default())?;
            approx_jeffreys_constellation(&fit.density, power, m)
        }
    }
}

fn exact_mi(ch: &Channel, input: &Constellation, n_r: u64) -> Result<f64> {
    match (ch.output_kind(), ch.model()) {
        (OutputKind::Finite(_), _) => mi_finite_output(ch, input, n_r),
        (_, Model::Awgn) => mi_gaussian_sufficient(input, n_r as f64),
        _ => Err(Error::Unsupported(format!(
            "exact mutual information is available for finite-output channels and awgn, not {}",
            ch.kind_name()
        ))),
    }
}

/// Runs a parsed command and returns its artifact.
pub fn run(cli: &Cli) -> Result<Artifact> {
    match &cli.command {
        Command::Fisher(a) => {
            let ch = load_channel(&a.channel.channel)?;
            let grid = match a.theta_grid {
                Some(g) => g,
                None => {
                    let (lo, hi) = ch.param_space().scalar_range();
                    Grid {
                        start: lo,
                        stop: hi,
                        count: 33,
                    }
                }
            };
            let mut rows = Vec::new();
            if ch.dim() > 1 {
                for r in grid.values() {
                    rows.push(vec![num(r), num(ch.sqrt_det_fisher(r)?)]);
                }
                Ok(Artifact::new(csv_table(
                    &["radius[amplitude]", "sqrt_det_fisher[amplitude^-d]"],
                    &rows,
                )))
            } else {
                for t in grid.values() {
                    let j = ch.fisher(t)?;
                    rows.push(vec![num(t), num(j), num(j.sqrt())]);
                }
                Ok(Artifact::new(csv_table(
                    &[
                        "theta[amplitude]",
                        "fisher[amplitude^-2]",
                        "sqrt_fisher[amplitude^-1]",
                    ],
                    &rows,
                )))
            }
        }
        Command::Jf(a) => {
            let ch = load_channel(&a.channel.channel)?;
            let mut rows = Vec::new();
            for l in a.lambda_grid.values() {
                rows.push(vec![
                    num(l),
                    num(jeffreys_factor(&ch, l, a.power)?),
                    num(average_cost(&ch, l)?),
                ]);
            }
            Ok(Artifact::new(csv_table(
                &[
                    "lambda[bits/cost]",
                    "jf[amplitude^d]",
                    "mean_cost[amplitude^2]",
                ],
                &rows,
            )))
        }
        Command::Prior(a) => {
            let ch = load_channel(&a.channel.channel)?;
            if a.grid == 0 {
                return Err(Error::Validation("--grid must be positive".into()));
            }
            let sol = solve_lambda_star(&ch, a.power)?;
            let prior = TiltedPrior::new(&ch, sol.lambda_star, a.power)?;
            let (lo, hi) = prior.support();
            let h = (hi - lo) / a.grid as f64;
            let mut rows = Vec::new();
            for i in 0..a.grid {
                let t = lo + h * (i as f64 + 0.5);
                rows.push(vec![
                    num(t),
                    num(prior.density(t)),
                    num(prior.marginal_density(t)),
                    num(prior.cdf(t)?),
                ]);
            }
            let first = if prior.is_radial() {
                "radius[amplitude]"
            } else {
                "theta[amplitude]"
            };
            Ok(Artifact::new(csv_table(
                &[
                    first,
                    "density[amplitude^-d]",
                    "marginal_density[amplitude^-1]",
                    "cdf[probability]",
                ],
                &rows,
            )))
        }
        Command::LambdaStar(a) => {
            let ch = load_channel(&a.channel.channel)?;
            let sol = solve_lambda_star(&ch, a.power)?;
            Ok(Artifact::new(json_body(&json!({
                "command": "lambda-star",
                "channel": channel_value(&ch),
                "P": a.power,
                "lambda_star": sol.lambda_star,
                "jf": sol.jf,
                "log2_jf": sol.log2_jf,
                "mean_cost_at_lambda_star": sol.m_at_star,
            }))))
        }
        Command::Capacity(a) => {
            let ch = load_channel(&a.channel.channel)?;
            let sol = solve_lambda_star(&ch, a.power)?;
            let cap = asymptotic_capacity(&ch, a.power, a.nr)?;
            Ok(Artifact::new(json_body(&json!({
                "command": "capacity",
                "channel": channel_value(&ch),
                "P": a.power,
                "nr": a.nr,
                "lambda_star": sol.lambda_star,
                "jf": sol.jf,
                "capacity_bits": cap,
            }))))
        }
        Command::Constellation(a) => {
            let ch = load_channel(&a.channel.channel)?;
            let c = build_constellation(&ch, a.power, a.size, a.mode, a.degree)?;
            Ok(Artifact::new(csv_table(
                &["index", "point[amplitude]", "probability"],
                &constellation_rows(&c),
            )))
        }
        Command::FitPoly(a) => {
            let ch = load_channel(&a.channel.channel)?;
            let lambda = match (a.lambda, a.power) {
                (Some(l), _) => l,
                (None, Some(p)) => solve_lambda_star(&ch, p)?.lambda_star,
                (None, None) => return Err(Error::Validation("give --P or --lambda".into())),
            };
            let fit = fit_poly_density(&ch, lambda, a.degree, &BarrierSchedule::default())?;
            let (lo, hi) = fit.density.support();
            Ok(Artifact::new(json_body(&json!({
                "command": "fit-poly",
                "channel": channel_value(&ch),
                "P": a.power,
                "lambda": lambda,
                "degree": a.degree,
                "support": [lo, hi],
                "coefficients": fit.density.coeffs(),
                "divergence_nats": fit.divergence,
                "final_grad_norm": fit.final_grad_norm,
                "newton_steps": fit.trace.len(),
            }))))
        }
        Command::Mi(a) => {
            let ch = load_channel(&a.channel.channel)?;
            let (input, iterations) = match a.mode {
                MiMode::Jeffreys => (
                    build_constellation(&ch, a.power, a.size, Mode::Jeffreys, a.degree)?,
                    None,
                ),
                MiMode::Poly => (
                    build_constellation(&ch, a.power, a.size, Mode::Poly, a.degree)?,
                    None,
                ),
                MiMode::Pam => (
                    build_constellation(&ch, a.power, a.size, Mode::Pam, a.degree)?,
                    None,
                ),
                MiMode::Ba => {
                    let base = jeffreys_constellation(&ch, a.power, a.size)?;
                    let ba = blahut_arimoto(&ch, &base.points, a.nr, 1e-9, 10_000)?;
                    (ba.input, Some(ba.iterations))
                }
            };
            let mi = exact_mi(&ch, &input, a.nr)?;
            let cap = asymptotic_capacity(&ch, a.power, a.nr as f64)?;
            Ok(Artifact::new(json_body(&json!({
                "command": "mi",
                "channel": channel_value(&ch),
                "P": a.power,
                "M": a.size,
                "nr": a.nr,
                "mode": format!("{:?}", a.mode).to_lowercase(),
                "mi_bits": mi,
                "asymptotic_capacity_bits": cap,
                "ba_iterations": iterations,
                "points": input.points,
                "probabilities": input.probs,
            }))))
        }
        Command::QuantLoss(a) => {
            let ch = load_channel(&a.channel.channel)?;
            if a.levels.is_empty() {
                return Err(Error::Validation("--L needs at least one bin count".into()));
            }
            let mut rows = Vec::new();
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for &l in &a.levels {
                let r = match (a.radius, ch.model()) {
                    (Some(r), _) => r,
                    (None, Model::TruncatedAwgn { b }) => *b,
                    (None, _) => gaussian_tail_radius(l),
                };
                let e = capacity_loss_el(&ch, &Quantizer1D::new(r, l)?, a.grid)?;
                if e.is_finite() && e >= crate::receiver_quant::LOSS_FLOOR {
                    xs.push(l as f64);
                    ys.push(e);
                }
                rows.push(vec![l.to_string(), num(r), num(e)]);
            }
            let mut art = Artifact::new(csv_table(
                &[
                    "levels[bins]",
                    "radius[amplitude]",
                    "loss_eL[nat*amplitude]",
                ],
                &rows,
            ));
            if xs.len() >= 2 {
                art.note = Some(format!(
                    "log-log slope of e_L vs L: {}",
                    loglog_slope(&xs, &ys)?
                ));
            }
            Ok(art)
        }
        Command::FisherRate(a) => {
            let acov = load_acov(&a.acov)?;
            let limit = fisher_rate_limit(&acov)?;
            let mut rows = Vec::new();
            for &n in &a.n {
                rows.push(vec![
                    n.to_string(),
                    num(fisher_rate_finite(&acov, n)?),
                    num(limit),
                ]);
            }
            Ok(Artifact::new(csv_table(
                &[
                    "n[samples]",
                    "fisher_rate[variance^-1]",
                    "limit[variance^-1]",
                ],
                &rows,
            )))
        }
    }
}

fn write_artifact(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, body)
            .map_err(|e| Error::Validation(format!("cannot write '{}': {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| Error::Validation(format!("cannot write stdout: {e}")))
        }
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        2
    } else {
        1
    }
}

/// Parses `args` (program name first), runs, writes output and returns the
/// process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = run(&cli).and_then(|art| {
        write_artifact(cli.out.as_deref(), &art.body)?;
        Ok(art.note)
    });
    match result {
        Ok(note) => {
            if let Some(n) = note {
                eprintln!("{n}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "0:4:5".parse().unwrap();
        assert_eq!(g.values(), vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        let g: Grid = "2:2:1".parse().unwrap();
        assert_eq!(g.values(), vec![2.0]);
        assert!("0:1".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
        assert!("a:1:3".parse::<Grid>().is_err());
    }

    #[test]
    fn jf_csv_shape() {
        let cli = Cli::try_parse_from([
            "jfactor",
            "jf",
            "--channel",
            r#"{"kind":"awgn","A":1}"#,
            "--P",
            "0.111",
            "--lambda-grid",
            "0:4:9",
        ])
        .unwrap();
        let art = run(&cli).unwrap();
        let mut lines = art.body.lines();
        assert_eq!(
            lines.next().unwrap(),
            "lambda[bits/cost],jf[amplitude^d],mean_cost[amplitude^2]"
        );
        let m: Vec<f64> = lines
            .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
            .collect();
        assert_eq!(m.len(), 9);
        assert!(m.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn error_codes() {
        assert_eq!(
            main_with_args([
                "jfactor",
                "capacity",
                "--channel",
                "/nonexistent.json",
                "--P",
                "1",
                "--nr",
                "10"
            ]),
            1
        );
        assert_eq!(main_with_args(["jfactor", "capacity", "--P", "1"]), 1);
        assert_eq!(exit_code(&Error::Degenerate(0.0)), 2);
    }
}
