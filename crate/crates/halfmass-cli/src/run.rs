//! Subcommand implementations.

use crate::config::{parse_schedule, ConfigFile};
use crate::output::{write_rows, Format, Row};
use crate::CommonArgs;
use clap::Args;
use halfmass::harness::{self, run_validation, Schedule, Tolerances};
use halfmass::mass::{self, Functional};
use halfmass::metric::{GraphSpec, MetricField, Profile};
use halfmass::{Error, Result};
use rayon::prelude::*;
use std::io::Write;

/// Metric family selection flags; file values fill the gaps.
#[derive(Args, Clone, Debug, Default)]
pub struct MetricArgs {
    /// Family name: flat | half-schwarzschild | conformal | conformal-bump | graph.
    #[arg(long)]
    metric: Option<String>,

    /// Ambient dimension (default 3).
    #[arg(long)]
    dim: Option<usize>,

    /// Mass parameter of half-schwarzschild.
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,

    /// Amplitude of the conformal and graph families.
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,

    /// Decay rate of the conformal families.
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,

    /// Bump height for conformal-bump.
    #[arg(long, allow_negative_numbers = true)]
    bump_height: Option<f64>,

    /// Bump center radius for conformal-bump.
    #[arg(long, allow_negative_numbers = true)]
    bump_center: Option<f64>,

    /// Bump half-width for conformal-bump.
    #[arg(long, allow_negative_numbers = true)]
    bump_width: Option<f64>,
}

impl MetricArgs {
    fn resolve(&self, file: &ConfigFile) -> Result<(MetricField, Vec<(String, String)>)> {
        let family = self
            .metric
            .clone()
            .or_else(|| file.get("metric.family").map(str::to_string))
            .ok_or_else(|| Error::config("metric.family", "no metric family selected"))?;
        let dim = match self.dim {
            Some(d) => d,
            None => file.get_usize("metric.dim")?.unwrap_or(3),
        };
        let mut params = file.metric_params()?;
        for (key, value) in [
            ("m", self.m),
            ("a", self.a),
            ("tau", self.tau),
            ("bump_height", self.bump_height),
            ("bump_center", self.bump_center),
            ("bump_width", self.bump_width),
        ] {
            if let Some(v) = value {
                params.insert(key.to_string(), v);
            }
        }
        let field = MetricField::from_name(&family, dim, &params)?;
        let mut resolved = vec![
            ("metric.family".to_string(), family),
            ("metric.dim".to_string(), dim.to_string()),
        ];
        for (key, value) in &params {
            resolved.push((format!("metric.{key}"), value.to_string()));
        }
        Ok((field, resolved))
    }
}

fn load_config(common: &CommonArgs) -> Result<ConfigFile> {
    match &common.config {
        Some(path) => ConfigFile::load(path),
        None => Ok(ConfigFile::default()),
    }
}

fn resolve_format(common: &CommonArgs, file: &ConfigFile) -> Result<Format> {
    let name = common
        .format
        .clone()
        .or_else(|| file.get("output.format").map(str::to_string))
        .unwrap_or_else(|| "csv".to_string());
    Format::from_name(&name)
}

fn resolve_order(common: &CommonArgs, file: &ConfigFile, dim: usize) -> Result<usize> {
    Ok(match common.order {
        Some(o) => o,
        None => file
            .get_usize("run.order")?
            .unwrap_or_else(|| halfmass::quadrature::default_order(dim)),
    })
}

fn resolve_functionals(flag: &Option<Vec<String>>, file: &ConfigFile) -> Result<Vec<Functional>> {
    let names: Vec<String> = match flag {
        Some(list) => list.clone(),
        None => match file.get("run.functionals") {
            Some(raw) => raw.split(',').map(|s| s.trim().to_string()).collect(),
            None => vec!["adm-flux".to_string()],
        },
    };
    let mut out = Vec::new();
    for name in names {
        if name == "all" {
            out.extend([
                Functional::AdmFlux,
                Functional::AdmTensor,
                Functional::HawkingDisk,
                Functional::HawkingGeneral,
                Functional::IsoMass,
            ]);
        } else {
            out.push(Functional::from_name(&name)?);
        }
    }
    Ok(out)
}

fn resolve_schedule(flag: &Option<String>, file: &ConfigFile) -> Result<Schedule> {
    let raw = flag
        .clone()
        .or_else(|| file.get("run.r").map(str::to_string))
        .ok_or_else(|| Error::config("run.r", "no radius or schedule given"))?;
    parse_schedule(&raw)
}

fn emit(
    common: &CommonArgs,
    format: Format,
    resolved: &[(String, String)],
    rows: &[Row],
    trailer: &[String],
) -> Result<bool> {
    let mut buffer: Vec<u8> = Vec::new();
    write_rows(&mut buffer, format, resolved, rows)
        .map_err(|e| Error::config("output", e.to_string()))?;
    if format == Format::Csv {
        for line in trailer {
            buffer.extend_from_slice(format!("# {line}\n").as_bytes());
        }
    }
    match &common.out {
        Some(path) => std::fs::write(path, &buffer)
            .map_err(|e| Error::config("output.path", format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(&buffer)
            .map_err(|e| Error::config("output", e.to_string()))?,
    }
    Ok(true)
}

/// Evaluate the jobs in parallel, preserving the deterministic row order.
fn run_jobs(field: &MetricField, jobs: &[(Functional, f64)], order: usize) -> Result<Vec<Row>> {
    let metric = field.family_name();
    let params = field.params_display();
    jobs.par_iter()
        .map(|(functional, r)| {
            mass::evaluate(field, *functional, *r, order)
                .map(|report| Row::from_report(metric, &params, &report))
        })
        .collect()
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    metric: MetricArgs,
    /// Functionals to evaluate (comma separated; `all` expands to the five
    /// mass functionals).
    #[arg(long, value_delimiter = ',')]
    functional: Option<Vec<String>>,
    /// Radius, or `min:max:count` schedule.
    #[arg(long)]
    r: Option<String>,
}

pub fn evaluate(args: EvaluateArgs) -> Result<bool> {
    let file = load_config(&args.common)?;
    let (field, mut resolved) = args.metric.resolve(&file)?;
    let functionals = resolve_functionals(&args.functional, &file)?;
    let schedule = resolve_schedule(&args.r, &file)?;
    let order = resolve_order(&args.common, &file, field.dimension())?;
    let format = resolve_format(&args.common, &file)?;

    let config = harness::RunConfig {
        field,
        functionals,
        schedule,
        order,
    };
    config.validate()?;
    push_run_entries(&mut resolved, &config, format);
    let rows = run_jobs(&config.field, &config.jobs(), order)?;
    emit(&args.common, format, &resolved, &rows, &[])
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    metric: MetricArgs,
    /// Functionals to evaluate (comma separated).
    #[arg(long, value_delimiter = ',')]
    functional: Option<Vec<String>>,
    /// Radius schedule `min:max:count` with count >= 3.
    #[arg(long)]
    r: Option<String>,
}

pub fn converge(args: ConvergeArgs) -> Result<bool> {
    let file = load_config(&args.common)?;
    let (field, mut resolved) = args.metric.resolve(&file)?;
    let functionals = resolve_functionals(&args.functional, &file)?;
    let schedule = resolve_schedule(&args.r, &file)?;
    if schedule.count < 3 {
        return Err(Error::config(
            "run.r",
            format!(
                "rate fitting needs at least 3 radii, got {}",
                schedule.count
            ),
        ));
    }
    let order = resolve_order(&args.common, &file, field.dimension())?;
    let format = resolve_format(&args.common, &file)?;

    let config = harness::RunConfig {
        field,
        functionals: functionals.clone(),
        schedule,
        order,
    };
    config.validate()?;
    push_run_entries(&mut resolved, &config, format);
    let rows = run_jobs(&config.field, &config.jobs(), order)?;

    let radii = config.schedule.radii();
    let mut trailer = Vec::new();
    for (k, functional) in functionals.iter().enumerate() {
        let data: Vec<(f64, f64)> = rows[k * radii.len()..(k + 1) * radii.len()]
            .iter()
            .map(|row| (row.r, row.value))
            .collect();
        let fit = harness::rate_fit(&data)?;
        let rate = fit.rate.map(|p| format!("{p}")).unwrap_or_default();
        let flags = fit
            .flags
            .iter()
            .map(|f| format!("{f:?}"))
            .collect::<Vec<_>>()
            .join("+");
        trailer.push(format!(
            "fit functional={functional} limit={} rate={rate} residual={} uncertainty={} flags={flags}",
            fit.limit, fit.residual_norm, fit.uncertainty
        ));
    }
    emit(&args.common, format, &resolved, &rows, &trailer)
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Profile amplitude.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    a: f64,
    /// Profile shape.
    #[arg(long, default_value = "smoothed", value_parser = ["smoothed", "inverse-radius", "constant"])]
    profile: String,
    /// Base dimension of the graph (the field lives in base_dim + 1).
    #[arg(long, default_value_t = 3)]
    base_dim: usize,
    /// Radius schedule `rho` or `min:max:count`.
    #[arg(long)]
    rho: String,
}

pub fn graph(args: GraphArgs) -> Result<bool> {
    let file = load_config(&args.common)?;
    let profile = match args.profile.as_str() {
        "smoothed" => Profile::SmoothedInverseRadius { amplitude: args.a },
        "inverse-radius" => Profile::InverseRadius { amplitude: args.a },
        "constant" => Profile::Constant { level: args.a },
        other => {
            return Err(Error::config(
                "profile",
                format!("unknown profile `{other}`"),
            ))
        }
    };
    let spec = GraphSpec::new(args.base_dim, profile)?;
    let field = MetricField::graph(spec)?;
    let schedule = parse_schedule(&args.rho)?;
    let order = resolve_order(&args.common, &file, field.dimension())?;
    let format = resolve_format(&args.common, &file)?;

    let resolved = vec![
        ("metric.family".to_string(), "graph".to_string()),
        ("metric.base_dim".to_string(), args.base_dim.to_string()),
        ("metric.a".to_string(), args.a.to_string()),
        ("metric.profile".to_string(), args.profile.clone()),
        ("run.rho".to_string(), args.rho.clone()),
        ("run.order".to_string(), order.to_string()),
    ];
    let metric = field.family_name();
    let params = field.params_display();
    let rows: Vec<Row> = schedule
        .radii()
        .par_iter()
        .map(|&rho| {
            mass::graph_mass_report(&field, rho, order)
                .map(|report| Row::from_report(metric, &params, &report))
        })
        .collect::<Result<_>>()?;
    emit(&args.common, format, &resolved, &rows, &[])
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    metric: MetricArgs,
    /// Override: absolute bound for the flat-zero suite.
    #[arg(long)]
    tol_flat_zero: Option<f64>,
    /// Override: absolute bound for the half-Schwarzschild exact oracles.
    #[arg(long)]
    tol_schwarzschild: Option<f64>,
    /// Override: flux/tensor agreement bound at r = 100.
    #[arg(long)]
    tol_flux_tensor: Option<f64>,
    /// Override: disk vs general Hawking agreement bound.
    #[arg(long)]
    tol_hawking_gap: Option<f64>,
    /// Override: relative bound for the integrated-Bianchi residual.
    #[arg(long)]
    tol_bianchi: Option<f64>,
    /// Override: tolerance around the expected decay slopes.
    #[arg(long)]
    tol_slope: Option<f64>,
}

fn resolve_tolerances(args: &ValidateArgs, file: &ConfigFile) -> Result<Tolerances> {
    let mut tol = Tolerances::default();
    let pick = |flag: Option<f64>, key: &str, slot: &mut f64| -> Result<()> {
        if let Some(v) = flag {
            *slot = v;
        } else if let Some(v) = file.get_f64(key)? {
            *slot = v;
        }
        Ok(())
    };
    pick(
        args.tol_flat_zero,
        "tolerances.flat_zero",
        &mut tol.flat_zero,
    )?;
    pick(
        args.tol_schwarzschild,
        "tolerances.schwarzschild_exact",
        &mut tol.schwarzschild_exact,
    )?;
    pick(
        args.tol_flux_tensor,
        "tolerances.flux_tensor_gap",
        &mut tol.flux_tensor_gap,
    )?;
    pick(
        args.tol_hawking_gap,
        "tolerances.hawking_forms_gap",
        &mut tol.hawking_forms_gap,
    )?;
    pick(
        args.tol_bianchi,
        "tolerances.bianchi_relative",
        &mut tol.bianchi_relative,
    )?;
    pick(args.tol_slope, "tolerances.slope", &mut tol.slope)?;
    Ok(tol)
}

/// Stock fields exercised when no metric is selected.
fn stock_fields() -> Result<Vec<MetricField>> {
    Ok(vec![
        MetricField::flat(3)?,
        MetricField::half_schwarzschild(3, 1.0)?,
        MetricField::conformal_perturbation(3, 2.0, 1.0)?,
        MetricField::conformal_bump(3, 1.0, 1.0, halfmass::metric::BumpSpec::new(0.5, 5.0, 2.0)?)?,
        MetricField::graph(GraphSpec::new(
            3,
            Profile::SmoothedInverseRadius { amplitude: 0.5 },
        )?)?,
    ])
}

pub fn validate(args: ValidateArgs) -> Result<bool> {
    let file = load_config(&args.common)?;
    let tol = resolve_tolerances(&args, &file)?;
    let fields = if args.metric.metric.is_some() || file.get("metric.family").is_some() {
        vec![args.metric.resolve(&file)?.0]
    } else {
        stock_fields()?
    };

    let mut all_pass = true;
    let mut out = std::io::stdout().lock();
    for field in &fields {
        let order = resolve_order(&args.common, &file, field.dimension())?;
        let report = run_validation(field, order, &tol)?;
        for check in &report.checks {
            let verdict = if check.pass { "PASS" } else { "FAIL" };
            let bound = check.bound_display();
            let bound = if bound.is_empty() {
                String::new()
            } else {
                format!(" [{bound}]")
            };
            writeln!(
                out,
                "{verdict} [{}] {}: {:.6e}{bound}",
                field.family_name(),
                check.name,
                check.measured
            )
            .map_err(|e| Error::config("output", e.to_string()))?;
            all_pass &= check.pass;
        }
    }
    writeln!(
        out,
        "{}",
        if all_pass {
            "validation: all checks passed"
        } else {
            "validation: FAILURES present"
        }
    )
    .map_err(|e| Error::config("output", e.to_string()))?;
    Ok(all_pass)
}

fn push_run_entries(
    resolved: &mut Vec<(String, String)>,
    config: &harness::RunConfig,
    format: Format,
) {
    resolved.push((
        "run.functionals".to_string(),
        config
            .functionals
            .iter()
            .map(|f| f.name())
            .collect::<Vec<_>>()
            .join(","),
    ));
    resolved.push((
        "run.r".to_string(),
        format!(
            "{}:{}:{}",
            config.schedule.r_min, config.schedule.r_max, config.schedule.count
        ),
    ));
    resolved.push(("run.order".to_string(), config.order.to_string()));
    resolved.push((
        "output.format".to_string(),
        match format {
            Format::Csv => "csv".to_string(),
            Format::Jsonl => "jsonl".to_string(),
        },
    ));
}

pub fn print_metrics() {
    println!("available metric families:");
    println!("  flat                 Euclidean half-space; all masses vanish");
    println!("  half-schwarzschild   params: m (> 0); dim n >= 3");
    println!("  conformal            params: a (> -1), tau (> (n-2)/2)");
    println!("  conformal-bump       conformal plus bump_height/bump_center/bump_width");
    println!("  graph                boundary graph of a/sqrt(1+rho^2); dim = base + 1");
}
