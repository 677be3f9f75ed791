use serde::Serialize;
use serde_json::{json, Value};

use erwd::bounds::{bound_report, pi_bound_order, BoundReport, Certificate};
use erwd::coupling::{beta_star_bound, run_coupled, BetaStar};
use erwd::enumeration::{expansion_coefficient, CoefficientEntry};
use erwd::estimator::{
    estimate_velocity_with, find_beta0_with, phase_sweep_with, uniform_grid, EstimatorConfig, GridRow, RootBudget,
    VelocityEstimate,
};
use erwd::greens::{greens_power_integral, greens_power_series, GreensRow, GreensMethod, GreensTable};
use erwd::par::{map_indexed, Execution};
use erwd::rng::derive_seed;
use erwd::{Error, WalkParams};

use crate::args::*;
use crate::output::Emitter;
use crate::CliError;

pub struct Context {
    pub argv: Vec<String>,
    pub global: GlobalArgs,
    pub exec: Execution,
}

impl Context {
    fn emitter(&self, config: Value, stem: &str, default: Format) -> (Emitter, Format) {
        let format = self.global.format.unwrap_or(default);
        let ext = match format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let e = Emitter::new(self.argv.clone(), config, self.global.output.as_deref(), self.global.output_dir.as_deref(), stem, ext);
        (e, format)
    }

    fn full(&self) -> bool {
        self.global.budget == Budget::Full
    }
}

fn row(e: &VelocityEstimate) -> GridRow {
    GridRow {
        d: e.d,
        beta: e.beta,
        mu: e.mu,
        n_walks: e.n_walks,
        n_steps: e.n_steps,
        v1_hat: e.v1_hat,
        stderr: e.stderr,
        verdict: e.sign_verdict,
        seed: e.seed,
    }
}

pub fn simulate(ctx: &Context, a: &SimulateArgs) -> Result<(), CliError> {
    let params = WalkParams::new(a.d, a.beta, a.mu)?;
    let walks = a.walks.unwrap_or(if ctx.full() { 1000 } else { 200 });
    let steps = a.steps.unwrap_or(7000);
    let config = EstimatorConfig { z: a.z, exec: ctx.exec };
    let est = estimate_velocity_with(&params, walks, steps, a.seed, &config)?;
    eprintln!("v1_hat = {:.6} +- {:.6} ({})", est.v1_hat, est.stderr, est.sign_verdict.as_str());
    let cfg = json!({"subcommand": "simulate", "d": a.d, "beta": a.beta, "mu": a.mu, "walks": walks, "steps": steps, "seed": a.seed, "z": a.z});
    let (out, format) = ctx.emitter(cfg, "simulate", Format::Json);
    match format {
        Format::Json => out.json(&est)?,
        Format::Csv => out.csv(&[row(&est)])?,
    }
    Ok(())
}

pub fn sweep(ctx: &Context, a: &SweepArgs) -> Result<(), CliError> {
    let betas = a.beta_grid.clone().unwrap_or_else(|| uniform_grid(a.grid));
    let mus = a.mu_grid.clone().unwrap_or_else(|| uniform_grid(a.grid));
    let walks = a.walks.unwrap_or(if ctx.full() { 1000 } else { 100 });
    let steps = a.steps.unwrap_or(if ctx.full() { 7000 } else { 2000 });
    let config = EstimatorConfig { z: a.z, exec: ctx.exec };
    let grid = phase_sweep_with(a.d, &betas, &mus, walks, steps, a.seed, &config)?;
    eprint!("{}", grid.sign_map());
    let cfg = json!({"subcommand": "sweep", "d": a.d, "beta_grid": betas, "mu_grid": mus, "walks": walks, "steps": steps, "seed": a.seed, "z": a.z});
    let (out, format) = ctx.emitter(cfg, "sweep", Format::Csv);
    match format {
        Format::Json => out.json(&grid)?,
        Format::Csv => out.csv(&grid.rows())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct SeriesBracket {
    d: usize,
    n: usize,
    lower: f64,
    upper: f64,
    steps: usize,
}

#[derive(Serialize)]
struct GreensReport {
    rows: Vec<GreensRow>,
    series_brackets: Vec<SeriesBracket>,
    /// Largest |integral - series| over the requested entries.
    max_discrepancy: Option<f64>,
}

pub const AGREEMENT: f64 = 1e-6;

pub fn greens(ctx: &Context, a: &GreensArgs) -> Result<(), CliError> {
    let powers: Vec<usize> = match a.n {
        Some(n) => vec![n],
        None => (1..=3).filter(|&n| a.d > 2 * n).collect(),
    };
    if powers.is_empty() {
        return Err(Error::Divergent(format!("G_{}^{{*n}}(0) is infinite for every n >= 1", a.d)).into());
    }
    let want_integral = a.method != GreensMethodArg::Series;
    let want_series = a.method != GreensMethodArg::Integral;
    let mut rows = Vec::new();
    let mut brackets = Vec::new();
    let mut max_discrepancy: Option<f64> = None;
    for &n in &powers {
        let integral = if want_integral { Some(greens_power_integral(a.d, n)?) } else { None };
        let series = if want_series { Some(greens_power_series(a.d, n, a.series_steps)?) } else { None };
        if let Some(v) = integral {
            rows.push(GreensRow { d: a.d, n, value: v.value, method: GreensMethod::Integral, error_estimate: v.error_estimate });
        }
        if let Some(s) = series {
            rows.push(GreensRow { d: a.d, n, value: s.estimate, method: GreensMethod::Series, error_estimate: s.estimate_error });
            brackets.push(SeriesBracket { d: a.d, n, lower: s.value_lower, upper: s.value_lower + s.tail_bound, steps: s.steps });
        }
        if let (Some(v), Some(s)) = (integral, series) {
            let diff = (v.value - s.estimate).abs();
            max_discrepancy = Some(max_discrepancy.map_or(diff, |m: f64| m.max(diff)));
        }
    }
    for r in &rows {
        eprintln!("G_{}^{{*{}}}(0) = {:.12} [{:?}, error {:.1e}]", r.d, r.n, r.value, r.method, r.error_estimate);
    }
    let cfg = json!({"subcommand": "greens", "d": a.d, "n": powers, "method": a.method, "series_steps": a.series_steps});
    let (out, format) = ctx.emitter(cfg, "greens", Format::Json);
    match format {
        Format::Json => out.json(&GreensReport { rows, series_brackets: brackets, max_discrepancy })?,
        Format::Csv => out.csv(&rows)?,
    }
    if let Some(m) = max_discrepancy.filter(|&m| m > AGREEMENT) {
        return Err(Error::Accuracy(format!("integral and series differ by {m:.3e} (> {AGREEMENT:.0e})")).into());
    }
    Ok(())
}

fn bounds_table(d: usize, published: bool, exec: Execution) -> Result<GreensTable, CliError> {
    let computed = GreensTable::for_bounds([d], exec)?;
    Ok(if published { computed.overlay(&GreensTable::published()) } else { computed })
}

#[derive(Serialize)]
struct BoundRow {
    quantity: String,
    value: Option<f64>,
    verdict: Option<&'static str>,
    margin: Option<f64>,
}

fn bound_rows(r: &BoundReport) -> Vec<BoundRow> {
    let plain = |q: &str, v: Option<f64>| BoundRow { quantity: q.to_string(), value: v, verdict: None, margin: None };
    let cert = |q: &str, c: &Certificate| BoundRow {
        quantity: q.to_string(),
        value: c.value,
        verdict: Some(match c.verdict {
            erwd::bounds::Verdict::Pass => "pass",
            erwd::bounds::Verdict::Fail => "fail",
            erwd::bounds::Verdict::NotEvaluable => "not_evaluable",
        }),
        margin: c.margin,
    };
    vec![
        plain("e0", Some(r.e0)),
        plain("e1", Some(r.e1)),
        plain("a_d", Some(r.a_d)),
        plain("epsilon_d", r.epsilon_d),
        plain("pi_total_n1", Some(r.pi_total_n1)),
        plain("pi_total_tail", r.pi_total_tail),
        plain("rho_total", r.rho_total),
        plain("chi_total", r.chi_total),
        plain("gamma_total", r.gamma_total),
        plain("grand_total", r.grand_total),
        cert("continuity_d6", &r.certificates.continuity_d6),
        cert("monotonicity_d12", &r.certificates.monotonicity_d12),
        cert("positivity_d9", &r.certificates.positivity_d9),
    ]
}

pub fn bounds(ctx: &Context, a: &BoundsArgs) -> Result<(), CliError> {
    let table = bounds_table(a.d, a.published, ctx.exec)?;
    let report = bound_report(a.d, a.beta, a.mu, &table)?;
    if let Some(g) = report.grand_total {
        eprintln!("grand_total = {g:.6}");
    }
    for (name, c) in [
        ("continuity_d6", &report.certificates.continuity_d6),
        ("monotonicity_d12", &report.certificates.monotonicity_d12),
        ("positivity_d9", &report.certificates.positivity_d9),
    ] {
        match (c.value, c.margin) {
            (Some(v), Some(m)) => eprintln!("{name}: {:?} ({} = {v:.6} < {}, margin {m})", c.verdict, c.quantity, c.threshold),
            _ => eprintln!("{name}: {:?} ({})", c.verdict, c.note.as_deref().unwrap_or("")),
        }
    }
    let cfg = json!({"subcommand": "bounds", "d": a.d, "beta": a.beta, "mu": a.mu, "published": a.published, "greens": table.rows()});
    let (out, format) = ctx.emitter(cfg, "bounds", Format::Json);
    match format {
        Format::Json => out.json(&report)?,
        Format::Csv => out.csv(&bound_rows(&report))?,
    }
    Ok(())
}

pub fn find_beta0(ctx: &Context, a: &FindBeta0Args) -> Result<(), CliError> {
    let defaults = RootBudget::default();
    let budget = RootBudget {
        base_walks: a.walks.unwrap_or(if ctx.full() { 1000 } else { defaults.base_walks }),
        n_steps: a.steps.unwrap_or(defaults.n_steps),
        max_factor: a.max_factor,
        max_points: a.max_points,
    };
    let config = EstimatorConfig { z: a.z, exec: ctx.exec };
    let result = find_beta0_with(a.d, a.mu, a.width, &budget, a.seed, &config)?;
    eprintln!(
        "beta0 in [{:.4}, {:.4}] ({:?}): {}",
        result.beta0_interval[0], result.beta0_interval[1], result.status, result.confidence_note
    );
    let cfg = json!({"subcommand": "find-beta0", "d": a.d, "mu": a.mu, "width": a.width, "budget": budget, "seed": a.seed, "z": a.z});
    let (out, format) = ctx.emitter(cfg, "find-beta0", Format::Json);
    match format {
        Format::Json => out.json(&result)?,
        Format::Csv => out.csv(&result.evaluations.iter().map(row).collect::<Vec<_>>())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct EnumerateReport {
    d: usize,
    beta: f64,
    mu: f64,
    m: usize,
    order: usize,
    abs_total: f64,
    signed_drift: f64,
    /// Sum of `abs_total` over lengths `N+1..=m` at this order.
    cumulative_abs_total: f64,
    /// Bound on the sum over all lengths at this order (absent when d < 6).
    bound: Option<f64>,
    within_bound: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<CoefficientEntry>>,
}

pub fn enumerate(ctx: &Context, a: &EnumerateArgs) -> Result<(), CliError> {
    let params = WalkParams::new(a.d, a.beta, a.mu)?;
    let top = expansion_coefficient(&params, a.m, a.order)?;
    let mut cumulative = 0.0;
    for m in a.order + 1..a.m {
        cumulative += expansion_coefficient(&params, m, a.order)?.abs_total;
    }
    cumulative += top.abs_total;
    let bound = if a.d >= 6 {
        let table = bounds_table(a.d, false, ctx.exec)?;
        Some(pi_bound_order(a.d, a.beta, a.mu, a.order, &table)?)
    } else {
        None
    };
    let report = EnumerateReport {
        d: a.d,
        beta: a.beta,
        mu: a.mu,
        m: a.m,
        order: a.order,
        abs_total: top.abs_total,
        signed_drift: top.signed_drift,
        cumulative_abs_total: cumulative,
        bound,
        within_bound: bound.map(|b| cumulative <= b),
        entries: a.entries.then(|| top.value_by_displacement.clone()),
    };
    match bound {
        Some(b) => eprintln!("sum_(m'<={}) |pi^({})| = {cumulative:.6e} vs bound {b:.6e}", a.m, a.order),
        None => eprintln!("sum_(m'<={}) |pi^({})| = {cumulative:.6e} (no bound below d = 6)", a.m, a.order),
    }
    let cfg = json!({"subcommand": "enumerate", "d": a.d, "m": a.m, "N": a.order, "beta": a.beta, "mu": a.mu});
    let (out, format) = ctx.emitter(cfg, "enumerate", Format::Json);
    match format {
        Format::Json => out.json(&report)?,
        Format::Csv => out.csv(&[EnumerateReport { entries: None, ..report }])?,
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct CoupledRun {
    run: usize,
    seed: u64,
    blocks: usize,
    omega_end: i64,
    nu_end: i64,
    final_gap: i64,
    min_gap: i64,
    dominated: bool,
    exact_draws: usize,
}

#[derive(Serialize)]
struct CoupleReport {
    runs: Vec<CoupledRun>,
    all_dominated: bool,
    /// Average nu block increment over all runs.
    nu_block_mean: f64,
    /// Exact mean of the full-cookie three-step law.
    exact_block_mean: f64,
    beta_star: Option<BetaStar>,
}

pub fn couple(ctx: &Context, a: &CoupleArgs) -> Result<(), CliError> {
    let params = WalkParams::new(a.d, a.beta, a.mu)?;
    let pairs = map_indexed(ctx.exec, a.runs, |r| run_coupled(&params, a.blocks, derive_seed(a.seed, r as u64)));
    let mut runs = Vec::with_capacity(a.runs);
    let mut nu_total = 0i64;
    for (r, pair) in pairs.into_iter().enumerate() {
        let pair = pair?;
        let gaps = pair.gaps();
        let nu_end: i64 = pair.nu_blocks.iter().map(|&x| i64::from(x)).sum();
        nu_total += nu_end;
        runs.push(CoupledRun {
            run: r,
            seed: pair.coupling_seed,
            blocks: pair.n_blocks(),
            omega_end: pair.omega_path.first_coord_end(),
            nu_end,
            final_gap: *gaps.last().expect("gap at 0"),
            min_gap: gaps.iter().copied().min().expect("gap at 0"),
            dominated: pair.is_dominated(),
            exact_draws: pair.exact_draws,
        });
    }
    let report = CoupleReport {
        all_dominated: runs.iter().all(|r| r.dominated),
        nu_block_mean: nu_total as f64 / (a.runs * a.blocks).max(1) as f64,
        exact_block_mean: erwd::coupling::full_cookie_mean(a.d, a.beta, a.mu)?,
        beta_star: if a.mu > 0.0 { Some(beta_star_bound(a.d, a.mu)?) } else { None },
        runs,
    };
    eprintln!(
        "{} runs, domination {}; nu block mean {:.6} (exact {:.6})",
        a.runs,
        if report.all_dominated { "held" } else { "FAILED" },
        report.nu_block_mean,
        report.exact_block_mean
    );
    let cfg = json!({"subcommand": "couple", "d": a.d, "beta": a.beta, "mu": a.mu, "blocks": a.blocks, "runs": a.runs, "seed": a.seed});
    let (out, format) = ctx.emitter(cfg, "couple", Format::Json);
    match format {
        Format::Json => out.json(&report)?,
        Format::Csv => out.csv(&report.runs)?,
    }
    Ok(())
}
