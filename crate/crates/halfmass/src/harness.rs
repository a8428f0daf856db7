//! Batch evaluation: radius schedules, convergence fits, decay-slope
//! measurements and the validation suite.

use crate::curvature::{curvature_from_jet, linearized_ricci};
use crate::frames::{boundary_frame, edge_conormals, outward_normal};
use crate::linalg;
use crate::mass::{self, Functional, MassReport};
use crate::metric::{Family, MetricField, Profile};
use crate::quadrature::{self, equator_rule, hemisphere_rule, measure_ratio};
use crate::{unit_sphere_measure, Error, Result};

/// Geometric radius schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
}

impl Schedule {
    pub fn new(r_min: f64, r_max: f64, count: usize) -> Result<Self> {
        let s = Schedule {
            r_min,
            r_max,
            count,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn single(r: f64) -> Result<Self> {
        Schedule::new(r, r, 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 1.0) {
            return Err(Error::config(
                "schedule.r_min",
                format!("must exceed 1, got {}", self.r_min),
            ));
        }
        if self.count == 0 {
            return Err(Error::config("schedule.count", "must be positive"));
        }
        if self.count > 1 && !(self.r_max > self.r_min) {
            return Err(Error::config(
                "schedule.r_max",
                format!(
                    "must exceed r_min = {} for a {}-point schedule, got {}",
                    self.r_min, self.count, self.r_max
                ),
            ));
        }
        Ok(())
    }

    /// The radii, geometrically spaced and strictly increasing.
    pub fn radii(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.r_min];
        }
        let q = (self.r_max / self.r_min).powf(1.0 / (self.count as f64 - 1.0));
        (0..self.count)
            .map(|k| self.r_min * q.powi(k as i32))
            .collect()
    }
}

/// A full batch-run request.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub field: MetricField,
    pub functionals: Vec<Functional>,
    pub schedule: Schedule,
    pub order: usize,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        if self.functionals.is_empty() {
            return Err(Error::config("functionals", "at least one is required"));
        }
        if self.order < 4 {
            return Err(Error::config(
                "order",
                format!("quadrature order must be at least 4, got {}", self.order),
            ));
        }
        Ok(())
    }

    /// The evaluation jobs in output order: functionals in the order given,
    /// radii increasing within each.
    pub fn jobs(&self) -> Vec<(Functional, f64)> {
        let radii = self.schedule.radii();
        let mut out = Vec::with_capacity(self.functionals.len() * radii.len());
        for f in &self.functionals {
            for r in &radii {
                out.push((*f, *r));
            }
        }
        out
    }
}

/// One report per (functional, radius), in deterministic row order. Rows are
/// independent of each other, so callers may also evaluate the jobs from
/// [`RunConfig::jobs`] in parallel and keep this ordering.
pub fn mass_sequence(config: &RunConfig) -> Result<Vec<MassReport>> {
    config.validate()?;
    config
        .jobs()
        .into_iter()
        .map(|(functional, r)| mass::evaluate(&config.field, functional, r, config.order))
        .collect()
}

/// Flags attached to a convergence fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitFlag {
    /// Successive differences are at rounding level; the column is constant.
    BelowNoiseFloor,
    /// The tail differences change sign; the power-law model is doubtful.
    NonMonotoneTail,
}

/// Power-law convergence fit `m(r) = limit + C r^{-rate}`.
#[derive(Debug, Clone)]
pub struct ConvergenceFit {
    pub limit: f64,
    /// Fitted rate exponent; `None` when the column sits at the noise floor.
    pub rate: Option<f64>,
    /// RMS residual of the log-log rate fit.
    pub residual_norm: f64,
    /// Spread of the limit across extrapolation subsequences.
    pub uncertainty: f64,
    pub flags: Vec<FitFlag>,
    /// The fitted data as (radius, value) rows.
    pub rows: Vec<(f64, f64)>,
}

/// Richardson extrapolation on the last three points of a geometric radius
/// column, plus a least-squares rate fit of `log |m(r) - limit|` against
/// `log r`.
pub fn rate_fit(rows: &[(f64, f64)]) -> Result<ConvergenceFit> {
    if rows.len() < 3 {
        return Err(Error::config(
            "rate_fit",
            format!("needs at least 3 radii, got {}", rows.len()),
        ));
    }
    let scale = rows.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    let floor = 1e-12 * scale.max(1e-12);

    let richardson = |triple: &[(f64, f64)]| -> (f64, Option<f64>, Vec<FitFlag>) {
        let (r1, m1) = triple[0];
        let (r2, m2) = triple[1];
        let (r3, m3) = triple[2];
        let q = ((r2 / r1) * (r3 / r2)).sqrt();
        let d1 = m2 - m1;
        let d2 = m3 - m2;
        if d1.abs() <= floor || d2.abs() <= floor {
            return (m3, None, vec![FitFlag::BelowNoiseFloor]);
        }
        if d1 / d2 <= 0.0 {
            return (m3, None, vec![FitFlag::NonMonotoneTail]);
        }
        let p = (d1 / d2).ln() / q.ln();
        let limit = m3 + d2 / (q.powf(p) - 1.0);
        (limit, Some(p), vec![])
    };

    let (limit, richardson_rate, mut flags) = richardson(&rows[rows.len() - 3..]);
    let uncertainty = if rows.len() >= 4 {
        let (prev, _, _) = richardson(&rows[rows.len() - 4..rows.len() - 1]);
        (limit - prev).abs()
    } else {
        (rows[rows.len() - 1].1 - rows[rows.len() - 2].1).abs()
    };

    // Least-squares slope of log |m - limit| vs log r over usable points.
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(_, v)| (v - limit).abs() > floor)
        .map(|(r, v)| (r.ln(), (v - limit).abs().ln()))
        .collect();
    let (rate, residual_norm) = if usable.len() >= 2 && richardson_rate.is_some() {
        let (slope, rms) = least_squares_line(&usable);
        (Some(-slope), rms)
    } else {
        (richardson_rate, 0.0)
    };

    if rate.is_none() && flags.is_empty() {
        flags.push(FitFlag::BelowNoiseFloor);
    }

    Ok(ConvergenceFit {
        limit,
        rate,
        residual_norm,
        uncertainty,
        flags,
        rows: rows.to_vec(),
    })
}

/// Slope and RMS residual of the least-squares line through `(x, y)` points.
fn least_squares_line(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|(x, _)| x).sum();
    let sy: f64 = points.iter().map(|(_, y)| y).sum();
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let rms = (points
        .iter()
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, rms)
}

/// Log-log slope of `|value|` against radius; `None` when the column is
/// essentially zero.
pub fn fit_log_slope(rows: &[(f64, f64)]) -> Option<f64> {
    let scale = rows.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    if scale <= 1e-13 {
        return None;
    }
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(_, v)| v.abs() > 1e-13 * scale)
        .map(|(r, v)| (r.ln(), v.abs().ln()))
        .collect();
    if usable.len() < 2 {
        return None;
    }
    Some(least_squares_line(&usable).0)
}

/// Largest `|f(node, jet)|` over the hemisphere rule at radius `r`.
pub fn sup_over_hemisphere<F>(field: &MetricField, r: f64, order: usize, mut f: F) -> Result<f64>
where
    F: FnMut(&quadrature::QuadratureNode, &crate::metric::MetricJet) -> Result<f64>,
{
    let rule = hemisphere_rule(field.dimension(), r, order)?;
    let mut sup: f64 = 0.0;
    for node in &rule.nodes {
        let jet = field.jet(&node.position)?;
        sup = sup.max(f(node, &jet)?.abs());
    }
    Ok(sup)
}

/// Largest `|f(node, jet)|` over the equator rule at radius `r`.
pub fn sup_over_equator<F>(field: &MetricField, r: f64, order: usize, mut f: F) -> Result<f64>
where
    F: FnMut(&quadrature::QuadratureNode, &crate::metric::MetricJet) -> Result<f64>,
{
    let rule = equator_rule(field.dimension(), r, order)?;
    let mut sup: f64 = 0.0;
    for node in &rule.nodes {
        let jet = field.jet(&node.position)?;
        sup = sup.max(f(node, &jet)?.abs());
    }
    Ok(sup)
}

/// How a validation check compares its measured number against the bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CheckKind {
    /// `|measured| <= bound`
    AbsoluteBound { bound: f64 },
    /// log-log slope within `tolerance` of `target`
    SlopeNear { target: f64, tolerance: f64 },
    /// log-log slope at most `target + tolerance` (decay at least this fast)
    SlopeAtMost { target: f64, tolerance: f64 },
}

/// One validation check outcome.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub kind: CheckKind,
    pub pass: bool,
}

impl Check {
    fn absolute(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            kind: CheckKind::AbsoluteBound { bound },
            pass: measured.abs() <= bound,
        }
    }

    fn slope_near(
        name: impl Into<String>,
        slope: Option<f64>,
        target: f64,
        tolerance: f64,
    ) -> Self {
        let measured = slope.unwrap_or(f64::NAN);
        Check {
            name: name.into(),
            measured,
            kind: CheckKind::SlopeNear { target, tolerance },
            pass: slope
                .map(|s| (s - target).abs() <= tolerance)
                .unwrap_or(false),
        }
    }

    fn slope_at_most(
        name: impl Into<String>,
        slope: Option<f64>,
        target: f64,
        tolerance: f64,
    ) -> Self {
        let measured = slope.unwrap_or(f64::NAN);
        Check {
            name: name.into(),
            measured,
            kind: CheckKind::SlopeAtMost { target, tolerance },
            // an identically-zero column decays faster than any rate
            pass: slope.map(|s| s <= target + tolerance).unwrap_or(true),
        }
    }

    pub fn bound_display(&self) -> String {
        match self.kind {
            CheckKind::AbsoluteBound { bound } => format!("|.| <= {bound:.1e}"),
            CheckKind::SlopeNear { target, tolerance } => {
                format!("target {target} ± {tolerance}")
            }
            CheckKind::SlopeAtMost { target, tolerance } => {
                format!("at most {}", target + tolerance)
            }
        }
    }
}

/// Tolerances for the validation suite.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub flat_zero: f64,
    pub schwarzschild_exact: f64,
    pub flux_tensor_gap: f64,
    pub hawking_forms_gap: f64,
    pub bianchi_relative: f64,
    pub slope: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            flat_zero: 1e-8,
            schwarzschild_exact: 1e-8,
            flux_tensor_gap: 0.02,
            hawking_forms_gap: 1e-6,
            bianchi_relative: 1e-4,
            slope: 0.2,
        }
    }
}

/// Outcome of the validation suite.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Decay-slope radii used by the validation suite.
fn slope_radii() -> Vec<f64> {
    vec![16.0, 32.0, 64.0, 128.0, 256.0]
}

fn slope_rows<F>(radii: &[f64], mut f: F) -> Result<Vec<(f64, f64)>>
where
    F: FnMut(f64) -> Result<f64>,
{
    radii.iter().map(|&r| Ok((r, f(r)?))).collect()
}

/// Run the checks applicable to the given field.
///
/// Families exercise different parts of the suite: the flat field pins the
/// all-zero baseline, half-Schwarzschild the exact oracles, the conformal
/// family the decay rates and the Bianchi identity, graph fields the
/// boundary geometry.
pub fn run_validation(
    field: &MetricField,
    order: usize,
    tol: &Tolerances,
) -> Result<ValidationReport> {
    let mut checks = Vec::new();
    match field.family() {
        Family::FlatHalfSpace => validate_flat(field, order, tol, &mut checks)?,
        Family::HalfSchwarzschild { .. } => validate_schwarzschild(field, order, tol, &mut checks)?,
        Family::ConformalPerturbation { .. } => validate_conformal(field, order, tol, &mut checks)?,
        Family::ConformalBump { .. } => validate_bump(field, order, tol, &mut checks)?,
        Family::Graph(_) => validate_graph(field, order, tol, &mut checks)?,
    }
    Ok(ValidationReport { checks })
}

fn validate_flat(
    field: &MetricField,
    order: usize,
    tol: &Tolerances,
    checks: &mut Vec<Check>,
) -> Result<()> {
    for r in [10.0, 100.0] {
        for functional in [
            Functional::AdmFlux,
            Functional::AdmTensor,
            Functional::HawkingDisk,
            Functional::HawkingGeneral,
            Functional::IsoMass,
        ] {
            let report = mass::evaluate(field, functional, r, order)?;
            checks.push(Check::absolute(
                format!("flat-zero {functional} r={r}"),
                report.value,
                tol.flat_zero,
            ));
        }
        let bianchi = mass::bianchi_check(field, r, order.min(16))?;
        checks.push(Check::absolute(
            format!("flat-zero bianchi r={r}"),
            bianchi.residual,
            tol.flat_zero,
        ));
    }
    Ok(())
}

fn validate_schwarzschild(
    field: &MetricField,
    order: usize,
    tol: &Tolerances,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let m = match field.family() {
        Family::HalfSchwarzschild { mass } => *mass,
        _ => unreachable!(),
    };
    let rmin = field.exclusion_radius();
    for r in [2.0, 10.0, 100.0] {
        if r <= rmin.max(1.0) {
            continue;
        }
        let disk = mass::hawking_disk(field, r, order)?;
        checks.push(Check::absolute(
            format!("schwarzschild hawking-disk exactness r={r}"),
            disk.value - m,
            tol.schwarzschild_exact,
        ));
        let flux = mass::adm_flux(field, r, order)?;
        let closed = m * (1.0 + m / (2.0 * r)).powi(3);
        checks.push(Check::absolute(
            format!("schwarzschild flux closed form r={r}"),
            flux.value - closed,
            tol.schwarzschild_exact,
        ));
        let general = mass::hawking_general(field, r, order)?;
        checks.push(Check::absolute(
            format!("schwarzschild hawking forms agreement r={r}"),
            general.value - disk.value,
            tol.hawking_forms_gap,
        ));
    }
    let flux = mass::adm_flux(field, 100.0, order)?.value;
    let tensor = mass::adm_tensor(field, 100.0, order)?.value;
    checks.push(Check::absolute(
        "schwarzschild flux/tensor agreement r=100",
        flux - tensor,
        tol.flux_tensor_gap,
    ));
    let bianchi = mass::bianchi_check_annulus(field, 2.0, 20.0, order.min(24))?;
    checks.push(Check::absolute(
        "schwarzschild bianchi annulus [2,20] relative residual",
        bianchi.residual / bianchi.lhs.abs().max(1e-6),
        tol.bianchi_relative,
    ));
    // measure comparison decays like 1/r
    let rows = slope_rows(&slope_radii(), |r| {
        Ok(quadrature::area(field, r, 12)?.value / (0.5 * unit_sphere_measure(2) * r * r) - 1.0)
    })?;
    checks.push(Check::slope_near(
        "schwarzschild area-ratio decay",
        fit_log_slope(&rows),
        -1.0,
        tol.slope,
    ));
    Ok(())
}

fn validate_conformal(
    field: &MetricField,
    order: usize,
    tol: &Tolerances,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let tau = field.tau();
    let n = field.dimension();
    let radii = slope_radii();

    // metric decay: sigma, dg, d2g
    let decay = field.decay_report(&radii, 64)?;
    let sigma_rows: Vec<(f64, f64)> = decay.rows.iter().map(|r| (r.r, r.sup_sigma)).collect();
    let dg_rows: Vec<(f64, f64)> = decay.rows.iter().map(|r| (r.r, r.sup_dg)).collect();
    let d2g_rows: Vec<(f64, f64)> = decay.rows.iter().map(|r| (r.r, r.sup_d2g)).collect();
    checks.push(Check::slope_near(
        "conformal |sigma| decay",
        fit_log_slope(&sigma_rows),
        -tau,
        tol.slope,
    ));
    checks.push(Check::slope_near(
        "conformal |dg| decay",
        fit_log_slope(&dg_rows),
        -(1.0 + tau),
        tol.slope,
    ));
    checks.push(Check::slope_near(
        "conformal |d2g| decay",
        fit_log_slope(&d2g_rows),
        -(2.0 + tau),
        tol.slope,
    ));

    // measure ratios on the hemisphere and the equator
    let rows = slope_rows(&radii, |r| {
        sup_over_hemisphere(field, r, 8, |node, jet| Ok(measure_ratio(jet, node)? - 1.0))
    })?;
    checks.push(Check::slope_near(
        "conformal hemisphere measure ratio",
        fit_log_slope(&rows),
        -tau,
        tol.slope,
    ));
    let rows = slope_rows(&radii, |r| {
        sup_over_equator(field, r, 8, |node, jet| Ok(measure_ratio(jet, node)? - 1.0))
    })?;
    checks.push(Check::slope_near(
        "conformal equator measure ratio",
        fit_log_slope(&rows),
        -tau,
        tol.slope,
    ));

    // frame comparisons: nu, theta, mu
    let rows = slope_rows(&radii, |r| {
        sup_over_hemisphere(field, r, 8, |node, jet| {
            let nu = outward_normal(jet)?;
            let nu_bar: Vec<f64> = node.position.iter().map(|v| v / r).collect();
            Ok(linalg::norm(&linalg::sub(&nu, &nu_bar)))
        })
    })?;
    checks.push(Check::slope_near(
        "conformal |nu - nu_euclid| decay",
        fit_log_slope(&rows),
        -tau,
        tol.slope,
    ));
    let rows = slope_rows(&radii, |r| {
        sup_over_equator(field, r, 8, |node, _| {
            let (theta, _) = edge_conormals(field, &node.position)?;
            let bar: Vec<f64> = node.position.iter().map(|v| v / r).collect();
            Ok(linalg::norm(&linalg::sub(&theta, &bar)))
        })
    })?;
    checks.push(Check::slope_near(
        "conformal |theta - theta_euclid| decay",
        fit_log_slope(&rows),
        -tau,
        tol.slope,
    ));
    let rows = slope_rows(&radii, |r| {
        sup_over_equator(field, r, 8, |node, _| {
            let bf = boundary_frame(field, &node.position)?;
            let mut down = vec![0.0; n];
            down[0] = -1.0;
            Ok(linalg::norm(&linalg::sub(&bf.normal, &down)))
        })
    })?;
    checks.push(Check::slope_near(
        "conformal |mu + e1| decay",
        fit_log_slope(&rows),
        -tau,
        tol.slope,
    ));

    // position vs scaled metric normal (constant for tau = 1)
    let rows = slope_rows(&radii, |r| {
        sup_over_hemisphere(field, r, 8, |node, jet| {
            let nu = outward_normal(jet)?;
            let scaled: Vec<f64> = nu.iter().map(|v| v * r).collect();
            Ok(linalg::norm(&linalg::sub(&node.position, &scaled)))
        })
    })?;
    checks.push(Check::slope_near(
        "conformal |X - r nu| growth",
        fit_log_slope(&rows),
        1.0 - tau,
        tol.slope,
    ));

    // areal-radius comparison
    let rows = slope_rows(&radii, |r| {
        let a = quadrature::area(field, r, 12)?.value;
        Ok((2.0 * a / unit_sphere_measure(n - 1)).powf(1.0 / (n as f64 - 1.0)) / r - 1.0)
    })?;
    checks.push(Check::slope_near(
        "conformal areal-radius ratio decay",
        fit_log_slope(&rows),
        -tau,
        tol.slope,
    ));

    // Theta diagnostic
    let rows = slope_rows(&radii, |r| Ok(quadrature::area(field, r, 12)?.theta))?;
    checks.push(Check::slope_near(
        "conformal Theta decay",
        fit_log_slope(&rows),
        -tau,
        tol.slope,
    ));

    // Ricci linearization residual decays at twice the rate
    let rows = slope_rows(&radii, |r| {
        sup_over_hemisphere(field, r, 6, |_, jet| {
            let pack = curvature_from_jet(jet)?;
            let mut worst: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((pack.ricci.get(i, j) - linearized_ricci(jet, i, j)).abs());
                }
            }
            Ok(worst)
        })
    })?;
    checks.push(Check::slope_near(
        "conformal Ricci linearization residual",
        fit_log_slope(&rows),
        -(2.0 + 2.0 * tau),
        tol.slope,
    ));

    // integrated Bianchi identity
    let bianchi = mass::bianchi_check(field, 20.0, order.min(16))?;
    checks.push(Check::absolute(
        "conformal bianchi relative residual r=20",
        bianchi.residual / bianchi.lhs.abs().max(1e-6),
        tol.bianchi_relative,
    ));

    // flux vs tensor agreement
    let flux = mass::adm_flux(field, 100.0, order)?.value;
    let tensor = mass::adm_tensor(field, 100.0, order)?.value;
    checks.push(Check::absolute(
        "conformal flux/tensor agreement r=100",
        flux - tensor,
        tol.flux_tensor_gap,
    ));
    Ok(())
}

fn validate_bump(
    field: &MetricField,
    order: usize,
    tol: &Tolerances,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let (amplitude, tau, support) = match field.family() {
        Family::ConformalBump {
            amplitude,
            tau,
            bump,
        } => (*amplitude, *tau, bump.support_outer()),
        _ => unreachable!(),
    };
    let plain = MetricField::conformal_perturbation(field.dimension(), amplitude, tau)?;
    let r = (1.5 * support).max(support + 1.0);
    let with_bump = mass::adm_flux(field, r, order)?.value;
    let without = mass::adm_flux(&plain, r, order)?.value;
    checks.push(Check::absolute(
        format!("bump locality of the flux at r={r}"),
        with_bump - without,
        0.0,
    ));
    // The bump's curvature must cancel out of the volume term; resolving
    // that cancellation needs a full complement of radial Gauss nodes.
    let bianchi = mass::bianchi_check(field, (2.0 * support).max(20.0), order.max(32))?;
    checks.push(Check::absolute(
        "bump bianchi relative residual",
        bianchi.residual / bianchi.lhs.abs().max(1e-6),
        tol.bianchi_relative,
    ));
    Ok(())
}

fn validate_graph(
    field: &MetricField,
    order: usize,
    tol: &Tolerances,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let spec = match field.family() {
        Family::Graph(spec) => spec.clone(),
        _ => unreachable!(),
    };
    let tau = field.tau();
    let base = spec.base_dim as f64;
    let radii = slope_radii();

    // boundary second fundamental form decays like rho^{-n}
    let rows = slope_rows(&radii, |r| {
        sup_over_equator(field, r, 6, |node, _| {
            let bf = boundary_frame(field, &node.position)?;
            let mut worst: f64 = 0.0;
            for a in 0..spec.base_dim {
                for b in 0..spec.base_dim {
                    worst = worst.max(bf.second_form.get(a, b).abs());
                }
            }
            Ok(worst)
        })
    })?;
    checks.push(Check::slope_near(
        "graph |A| boundary decay",
        fit_log_slope(&rows),
        -base,
        tol.slope,
    ));

    // boundary mean curvature decays at least that fast (faster for
    // near-harmonic profiles, where the trace nearly cancels)
    let rows = slope_rows(&radii, |r| {
        sup_over_equator(field, r, 6, |node, _| {
            Ok(boundary_frame(field, &node.position)?.mean_curvature)
        })
    })?;
    checks.push(Check::slope_at_most(
        "graph |H| boundary decay",
        fit_log_slope(&rows),
        -(1.0 + tau),
        tol.slope,
    ));

    // contact cosine decays like rho^{-tau}
    let rows = slope_rows(&radii, |r| {
        sup_over_equator(field, r, 6, |node, jet| {
            let (theta, mu) = edge_conormals(field, &node.position)?;
            Ok(jet.inner(&theta, &mu))
        })
    })?;
    checks.push(Check::slope_near(
        "graph contact cosine decay",
        fit_log_slope(&rows),
        -tau,
        tol.slope,
    ));

    // induced metric is flat: Ricci vanishes identically
    let ricci_sup = sup_over_hemisphere(field, 20.0, 6, |_, jet| {
        let pack = curvature_from_jet(jet)?;
        let mut worst: f64 = 0.0;
        for i in 0..field.dimension() {
            for j in 0..field.dimension() {
                worst = worst.max(pack.ricci.get(i, j).abs());
            }
        }
        Ok(worst)
    })?;
    checks.push(Check::absolute(
        "graph interior flatness (|Ricci| at r=20)",
        ricci_sup,
        1e-6,
    ));

    // graph mass approaches the profile's tail coefficient
    if let Profile::SmoothedInverseRadius { amplitude }
    | Profile::SmoothedWithBump { amplitude, .. } = spec.profile
    {
        let expect = -(base - 1.0) * unit_sphere_measure(spec.base_dim - 1) * amplitude;
        let value = mass::graph_mass(&spec, 300.0, order.min(16))?;
        checks.push(Check::absolute(
            "graph mass tail limit at rho=300",
            (value - expect) / expect.abs().max(1e-12),
            1e-4,
        ));
    }
    Ok(())
}
