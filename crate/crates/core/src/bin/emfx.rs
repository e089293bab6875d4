//! Batch front end: reads a flat key-value config, runs the analytic
//! engines and the Monte Carlo oracle, and emits RFC-4180 CSV with a
//! self-describing header comment.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use emf_exposure::coverage::{coverage_probability, eta_sweep_coverage};
use emf_exposure::distribution::EiDistribution;
use emf_exposure::laplace::IntraClusterVariant;
use emf_exposure::moments::{component_percentages, mean_ei};
use emf_exposure::monte_carlo::{run as mc_run, RunReport};
use emf_exposure::{
    parse_config, to_config_string, NetworkParams, NumericalResult, ObserverKind,
    QuadratureSpec, UserModel,
};

#[derive(Parser)]
#[command(
    name = "emfx",
    version,
    about = "EMF exposure index and uplink coverage of stochastic cellular networks"
)]
struct Cli {
    /// Flat key-value config file (missing keys keep defaults)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = ModelArg::Ppp)]
    model: ModelArg,
    #[arg(long, global = true, value_enum, default_value_t = ObserverArg::Passive)]
    observer: ObserverArg,
    /// Monte Carlo trials per point (0 = analytic only)
    #[arg(long, global = true, default_value_t = 0)]
    mc_trials: usize,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output CSV path (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Relative tolerance of the quadrature and inversion engines
    #[arg(long, global = true)]
    quad_rel_tol: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Ppp,
    Mcp1,
    Mcp2,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObserverArg {
    Passive,
    Active,
}

#[derive(Subcommand)]
enum Cmd {
    /// Mean exposure index and components, optionally swept over the
    /// user-to-BS density ratio
    Mean {
        /// Comma-separated density-ratio grid (default: single point)
        #[arg(long)]
        grid: Option<String>,
    },
    /// CDF of the exposure index on a w-grid
    Cdf {
        /// Comma-separated w values (default: log-spaced around the mean)
        #[arg(long)]
        w_grid: Option<String>,
        /// Number of points of the automatic grid
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Percentile of the exposure index, optionally swept over the
    /// density ratio
    Percentile {
        #[arg(long, default_value_t = 0.95)]
        q: f64,
        #[arg(long)]
        grid: Option<String>,
    },
    /// Uplink coverage probability across a power-control compensation
    /// grid
    Coverage {
        /// Comma-separated eta grid (default 0.1..1.0 step 0.1)
        #[arg(long)]
        eta_grid: Option<String>,
    },
    /// Raw Monte Carlo per-trial dump
    Simulate,
    /// General parameter sweep
    Sweep {
        /// One of: user_density_ratio, eta, gamma_db
        #[arg(long)]
        param: String,
        /// Comma-separated, strictly monotone grid
        #[arg(long)]
        grid: String,
        /// Comma-separated outputs from: mean, p95, coverage,
        /// percent_ul_u
        #[arg(long, default_value = "mean")]
        outputs: String,
    },
}

enum AppError {
    Config(String),
    Numerical(String),
}

impl From<emf_exposure::ConfigError> for AppError {
    fn from(e: emf_exposure::ConfigError) -> Self {
        AppError::Config(e.to_string())
    }
}

impl From<emf_exposure::NumericalError> for AppError {
    fn from(e: emf_exposure::NumericalError) -> Self {
        AppError::Numerical(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}

struct Ctx {
    params: NetworkParams,
    model: UserModel,
    observer: ObserverKind,
    spec: QuadratureSpec,
    mc_trials: usize,
    seed: u64,
}

impl Ctx {
    /// Parameters with the swept quantity applied.
    fn at(&self, param: &str, v: f64) -> NetworkParams {
        let mut p = self.params.clone();
        match param {
            "user_density_ratio" => match self.model {
                UserModel::Ppp => p.lambda_u = v * p.lambda_b,
                _ => p.lambda_cu = v * p.lambda_b,
            },
            "eta" => p.eta = v,
            "gamma_db" => p.gamma = 10f64.powf(v / 10.0),
            _ => unreachable!("validated earlier"),
        }
        p
    }

    fn point_seed(&self, index: usize) -> u64 {
        // splitmix-style mix of (master seed, grid index)
        let mut z = self
            .seed
            .wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn mc(&self, p: &NetworkParams, index: usize) -> Result<RunReport, AppError> {
        Ok(mc_run(
            p,
            self.model,
            self.observer,
            self.mc_trials,
            self.point_seed(index),
        )?)
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    let raw = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| AppError::Config(format!("{}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => NetworkParams::default(),
    };
    let model = match cli.model {
        ModelArg::Ppp => UserModel::Ppp,
        ModelArg::Mcp1 => UserModel::Mcp1,
        ModelArg::Mcp2 => UserModel::Mcp2,
    };
    let observer = match cli.observer {
        ObserverArg::Passive => ObserverKind::Passive,
        ObserverArg::Active => ObserverKind::Active,
    };
    let params = raw.validate(model)?;
    let mut spec = QuadratureSpec::default();
    if let Some(tol) = cli.quad_rel_tol {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(AppError::Config(
                "--quad-rel-tol must lie in (0, 1)".into(),
            ));
        }
        spec.rel_tol = tol;
    }
    let ctx = Ctx {
        params,
        model,
        observer,
        spec,
        mc_trials: cli.mc_trials,
        seed: cli.seed,
    };
    let csv = match &cli.cmd {
        Cmd::Mean { grid } => cmd_mean(&ctx, grid.as_deref())?,
        Cmd::Cdf { w_grid, points } => cmd_cdf(&ctx, w_grid.as_deref(), *points)?,
        Cmd::Percentile { q, grid } => cmd_percentile(&ctx, *q, grid.as_deref())?,
        Cmd::Coverage { eta_grid } => cmd_coverage(&ctx, eta_grid.as_deref())?,
        Cmd::Simulate => cmd_simulate(&ctx)?,
        Cmd::Sweep {
            param,
            grid,
            outputs,
        } => cmd_sweep(&ctx, param, grid, outputs)?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| AppError::Numerical(format!("{}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn header_comment(ctx: &Ctx) -> String {
    let params_line = to_config_string(&ctx.params).replace('\n', " ").replace(" = ", "=");
    format!(
        "# emfx {} model={:?} observer={:?} seed={} mc_trials={} rel_tol={:e} {}\n",
        env!("CARGO_PKG_VERSION"),
        ctx.model,
        ctx.observer,
        ctx.seed,
        ctx.mc_trials,
        ctx.spec.rel_tol,
        params_line.trim_end()
    )
}

fn parse_grid(text: &str) -> Result<Vec<f64>, AppError> {
    let vals: Result<Vec<f64>, _> = text.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let vals = vals.map_err(|e| AppError::Config(format!("bad grid value: {e}")))?;
    if vals.is_empty() {
        return Err(AppError::Config("empty grid".into()));
    }
    Ok(vals)
}

fn parse_monotone_grid(text: &str) -> Result<Vec<f64>, AppError> {
    let vals = parse_grid(text)?;
    if !vals.windows(2).all(|w| w[1] > w[0]) {
        return Err(AppError::Config("grid must be strictly increasing".into()));
    }
    Ok(vals)
}

fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.8e}")
    } else {
        "NA".into()
    }
}

/// Retries a numerical evaluation once with a 10x looser tolerance.
fn with_retry<T>(
    spec: &QuadratureSpec,
    f: impl Fn(&QuadratureSpec) -> NumericalResult<T>,
) -> NumericalResult<T> {
    f(spec).or_else(|_| {
        let mut loose = spec.clone();
        loose.rel_tol *= 10.0;
        f(&loose)
    })
}

fn cmd_mean(ctx: &Ctx, grid: Option<&str>) -> Result<String, AppError> {
    let grid = match grid {
        Some(g) => parse_monotone_grid(g)?,
        None => vec![current_ratio(ctx)],
    };
    let mut out = header_comment(ctx);
    out.push_str("value,ei_bs,ei_ul_u,ei_ul_tr,ei_total,percent_ul_u");
    if ctx.mc_trials > 0 {
        out.push_str(",mc_ei_bs,mc_ei_ul_u,mc_ei_ul_tr,mc_ei_total,mc_ci_total");
    }
    out.push('\n');
    for (i, &v) in grid.iter().enumerate() {
        let p = ctx.at("user_density_ratio", v).validate(ctx.model)?;
        let b = mean_ei(&p, ctx.model, ctx.observer, IntraClusterVariant::Palm, &ctx.spec)?;
        let pct = component_percentages(&b)[1];
        write!(
            out,
            "{},{},{},{},{},{}",
            fmt(v),
            fmt(b.ei_bs),
            fmt(b.ei_ul_u),
            fmt(b.ei_ul_tr),
            fmt(b.total()),
            fmt(pct)
        )
        .unwrap();
        if ctx.mc_trials > 0 {
            let mc = ctx.mc(&p, i)?;
            write!(
                out,
                ",{},{},{},{},{}",
                fmt(mc.mean.ei_bs),
                fmt(mc.mean.ei_ul_u),
                fmt(mc.mean.ei_ul_tr),
                fmt(mc.mean.total()),
                fmt(mc.total_ci_half_width())
            )
            .unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

fn current_ratio(ctx: &Ctx) -> f64 {
    match ctx.model {
        UserModel::Ppp => ctx.params.lambda_u / ctx.params.lambda_b,
        _ => ctx.params.lambda_cu / ctx.params.lambda_b,
    }
}

fn cmd_cdf(ctx: &Ctx, w_grid: Option<&str>, points: usize) -> Result<String, AppError> {
    let dist = EiDistribution::new(
        &ctx.params,
        ctx.model,
        ctx.observer,
        IntraClusterVariant::Palm,
        &ctx.spec,
    )?;
    let grid = match w_grid {
        Some(g) => parse_monotone_grid(g)?,
        None => {
            if points < 2 {
                return Err(AppError::Config("--points must be >= 2".into()));
            }
            let m = dist.mean();
            let (lo, hi) = (0.05 * m, 20.0 * m);
            (0..points)
                .map(|i| lo * (hi / lo).powf(i as f64 / (points - 1) as f64))
                .collect()
        }
    };
    let mc = if ctx.mc_trials > 0 {
        Some(ctx.mc(&ctx.params, 0)?)
    } else {
        None
    };
    let mut out = header_comment(ctx);
    out.push_str("w,cdf");
    if mc.is_some() {
        out.push_str(",mc_cdf");
    }
    out.push('\n');
    for &w in &grid {
        let c = with_retry(&ctx.spec, |s| {
            EiDistribution::new(
                &ctx.params,
                ctx.model,
                ctx.observer,
                IntraClusterVariant::Palm,
                s,
            )?
            .cdf(w)
        })?;
        write!(out, "{},{}", fmt(w), fmt(c)).unwrap();
        if let Some(mc) = &mc {
            write!(out, ",{}", fmt(mc.ei_total.cdf(w))).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

fn cmd_percentile(ctx: &Ctx, q: f64, grid: Option<&str>) -> Result<String, AppError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(AppError::Config("--q must lie in (0, 1)".into()));
    }
    let grid = match grid {
        Some(g) => parse_monotone_grid(g)?,
        None => vec![current_ratio(ctx)],
    };
    let mut out = header_comment(ctx);
    out.push_str("value,percentile");
    if ctx.mc_trials > 0 {
        out.push_str(",mc_percentile");
    }
    out.push('\n');
    for (i, &v) in grid.iter().enumerate() {
        let p = ctx.at("user_density_ratio", v).validate(ctx.model)?;
        // per-row NA policy: a bracketing/inversion failure marks the row
        let analytic = with_retry(&ctx.spec, |s| {
            EiDistribution::new(&p, ctx.model, ctx.observer, IntraClusterVariant::Palm, s)?
                .percentile(q)
        });
        match analytic {
            Ok(w) => write!(out, "{},{}", fmt(v), fmt(w)).unwrap(),
            Err(_) => write!(out, "{},NA", fmt(v)).unwrap(),
        }
        if ctx.mc_trials > 0 {
            let mc = ctx.mc(&p, i)?;
            write!(out, ",{}", fmt(mc.ei_total.quantile(q))).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

fn cmd_coverage(ctx: &Ctx, eta_grid: Option<&str>) -> Result<String, AppError> {
    let grid = match eta_grid {
        Some(g) => parse_monotone_grid(g)?,
        None => (1..=10).map(|i| 0.1 * i as f64).collect(),
    };
    let sweep = eta_sweep_coverage(&ctx.params, ctx.model, &grid, &ctx.spec)?;
    let mut out = header_comment(ctx);
    out.push_str("eta,coverage");
    if ctx.mc_trials > 0 {
        out.push_str(",mc_coverage");
    }
    out.push_str(",is_argmax\n");
    let gamma_db = 10.0 * ctx.params.gamma.log10();
    for (i, &(eta, cov)) in sweep.points.iter().enumerate() {
        write!(out, "{},{}", fmt(eta), fmt(cov)).unwrap();
        if ctx.mc_trials > 0 {
            let mut p = ctx.params.clone();
            p.eta = eta;
            let mc = mc_run(&p, ctx.model, ObserverKind::Active, ctx.mc_trials, ctx.point_seed(i))?;
            let exceed = mc
                .sinr_db
                .as_ref()
                .map(|d| d.exceedance(gamma_db))
                .unwrap_or(f64::NAN);
            write!(out, ",{}", fmt(exceed)).unwrap();
        }
        out.push_str(if i == sweep.argmax { ",1\n" } else { ",0\n" });
    }
    Ok(out)
}

fn cmd_simulate(ctx: &Ctx) -> Result<String, AppError> {
    if ctx.mc_trials == 0 {
        return Err(AppError::Config("simulate requires --mc-trials >= 1".into()));
    }
    let mc = ctx.mc(&ctx.params, 0)?;
    let mut out = header_comment(ctx);
    out.push_str("trial,observer,ei_bs,ei_ul_u,ei_ul_tr,ei_total,sinr_db\n");
    let obs = match ctx.observer {
        ObserverKind::Passive => "passive",
        ObserverKind::Active => "active",
    };
    for (i, row) in mc.rows.iter().enumerate() {
        let sinr = row.sinr_db.map(fmt).unwrap_or_default();
        writeln!(
            out,
            "{i},{obs},{},{},{},{},{sinr}",
            fmt(row.ei.ei_bs),
            fmt(row.ei.ei_ul_u),
            fmt(row.ei.ei_ul_tr),
            fmt(row.ei.total())
        )
        .unwrap();
    }
    Ok(out)
}

fn cmd_sweep(ctx: &Ctx, param: &str, grid: &str, outputs: &str) -> Result<String, AppError> {
    if !["user_density_ratio", "eta", "gamma_db"].contains(&param) {
        return Err(AppError::Config(format!(
            "unknown sweep parameter '{param}' (expected user_density_ratio, eta or gamma_db)"
        )));
    }
    let grid = parse_monotone_grid(grid)?;
    let outputs: Vec<&str> = outputs.split(',').map(str::trim).collect();
    for o in &outputs {
        if !["mean", "p95", "coverage", "percent_ul_u"].contains(o) {
            return Err(AppError::Config(format!(
                "unknown output '{o}' (expected mean, p95, coverage or percent_ul_u)"
            )));
        }
    }
    let mut out = header_comment(ctx);
    out.push_str("value");
    for o in &outputs {
        match *o {
            "mean" => out.push_str(",ei_bs,ei_ul_u,ei_ul_tr,ei_total"),
            "p95" => out.push_str(",p95"),
            "coverage" => out.push_str(",coverage"),
            "percent_ul_u" => out.push_str(",percent_ul_u"),
            _ => unreachable!(),
        }
        if ctx.mc_trials > 0 && *o == "mean" {
            out.push_str(",mc_ei_total,mc_ci_total");
        }
    }
    out.push('\n');
    for (i, &v) in grid.iter().enumerate() {
        let p = ctx.at(param, v).validate(ctx.model)?;
        write!(out, "{}", fmt(v)).unwrap();
        for o in &outputs {
            match *o {
                "mean" | "percent_ul_u" => {
                    let b =
                        mean_ei(&p, ctx.model, ctx.observer, IntraClusterVariant::Palm, &ctx.spec)?;
                    if *o == "mean" {
                        write!(
                            out,
                            ",{},{},{},{}",
                            fmt(b.ei_bs),
                            fmt(b.ei_ul_u),
                            fmt(b.ei_ul_tr),
                            fmt(b.total())
                        )
                        .unwrap();
                        if ctx.mc_trials > 0 {
                            let mc = ctx.mc(&p, i)?;
                            write!(
                                out,
                                ",{},{}",
                                fmt(mc.mean.total()),
                                fmt(mc.total_ci_half_width())
                            )
                            .unwrap();
                        }
                    } else {
                        write!(out, ",{}", fmt(component_percentages(&b)[1])).unwrap();
                    }
                }
                "p95" => {
                    let r = with_retry(&ctx.spec, |s| {
                        EiDistribution::new(
                            &p,
                            ctx.model,
                            ctx.observer,
                            IntraClusterVariant::Palm,
                            s,
                        )?
                        .percentile(0.95)
                    });
                    match r {
                        Ok(w) => write!(out, ",{}", fmt(w)).unwrap(),
                        Err(_) => out.push_str(",NA"),
                    }
                }
                "coverage" => {
                    let c = coverage_probability(&p, ctx.model, &ctx.spec)?;
                    write!(out, ",{}", fmt(c)).unwrap();
                }
                _ => unreachable!(),
            }
        }
        out.push('\n');
    }
    Ok(out)
}
