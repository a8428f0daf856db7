//! Mass functionals on coordinate hemispheres.
//!
//! All functionals are normalized so that the half-Schwarzschild family with
//! parameter `m` evaluates to `m`:
//!
//! * the flux form integrates `(g_ij,j - g_jj,i) ν̄^i` over the hemisphere
//!   plus the conormal correction `g_1a x^a/r` over the equator, both with
//!   Euclidean normal and measure, scaled by `b_n = 1/((n-1) ω_{n-1})`;
//! * the tensor form integrates `G(X, ν)` over the hemisphere plus
//!   `(A - Hg)(X, ϑ)` over the equator, fully metric quantities, scaled by
//!   `-c_n` with `c_n = 2/((n-2)(n-1) ω_{n-1})`;
//! * the Hawking mass of the hemisphere disk and its general-dimension
//!   sibling built from the intrinsic curvature through the traced Gauss
//!   identity;
//! * the isoperimetric mass built from the hemisphere area and enclosed
//!   volume;
//! * the boundary-graph mass `(n-1) lim ∫ ∂_ρ u`;
//! * an integrated-Bianchi closure test for radially conformal fields.
//!
//! Here `ω_{n-1}` is the full unit-sphere measure. The Euler characteristic
//! recorded for disk-type surfaces is 1.

use crate::curvature::{curvature_from_jet, require_conformal_killing};
use crate::frames::boundary_christoffel;
use crate::frames::{
    boundary_frame, edge_conormals, edge_frame, outward_normal, surface_frame_from_jet,
};
use crate::metric::{Family, GraphSpec, MetricField};
use crate::quadrature::{
    area, equator_rule, field_grading_depth, half_ball_shell_rule_graded, hemisphere_rule_graded,
    surface_integral, volume_between, Measure,
};
use crate::{unit_sphere_measure, Error, Result};
use std::f64::consts::PI;

/// Default base radius for the volume constant of the isoperimetric mass.
pub const VOLUME_BASE_RADIUS: f64 = 2.0;

/// Default contact-cosine threshold for the disk Hawking mass.
pub const CONTACT_THRESHOLD: f64 = 1e-3;

/// `b_n = 1 / ((n-1) ω_{n-1})`, the flux normalization.
pub fn flux_normalization(n: usize) -> f64 {
    1.0 / ((n as f64 - 1.0) * unit_sphere_measure(n - 1))
}

/// `c_n = 2 / ((n-2)(n-1) ω_{n-1})`, the tensor-form normalization.
pub fn tensor_normalization(n: usize) -> f64 {
    2.0 / ((n as f64 - 2.0) * (n as f64 - 1.0) * unit_sphere_measure(n - 1))
}

/// The mass expressions this crate evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Functional {
    AdmFlux,
    AdmTensor,
    HawkingDisk,
    HawkingGeneral,
    IsoMass,
    GraphMass,
    Bianchi,
}

impl Functional {
    pub const ALL: [Functional; 7] = [
        Functional::AdmFlux,
        Functional::AdmTensor,
        Functional::HawkingDisk,
        Functional::HawkingGeneral,
        Functional::IsoMass,
        Functional::GraphMass,
        Functional::Bianchi,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Functional::AdmFlux => "adm-flux",
            Functional::AdmTensor => "adm-tensor",
            Functional::HawkingDisk => "hawking-disk",
            Functional::HawkingGeneral => "hawking-general",
            Functional::IsoMass => "iso-mass",
            Functional::GraphMass => "graph-mass",
            Functional::Bianchi => "bianchi",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::config("functional", format!("unknown functional `{name}`")))
    }
}

impl std::fmt::Display for Functional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One mass evaluation at one radius.
#[derive(Debug, Clone)]
pub struct MassReport {
    pub functional: Functional,
    pub r: f64,
    pub value: f64,
    /// Metric area of the hemisphere (or sphere, for the graph mass).
    pub area: f64,
    /// Enclosed volume, where the functional uses one.
    pub volume: Option<f64>,
    /// Relative first-order area perturbation diagnostic.
    pub theta: f64,
    pub order: usize,
    /// Euler characteristic of the surface, where meaningful (disk: 1).
    pub chi: Option<i32>,
    /// Flux normalization `b_n` for the field's dimension.
    pub flux_constant: f64,
    /// Tensor normalization `c_n` for the field's dimension.
    pub tensor_constant: f64,
    pub warnings: Vec<String>,
}

impl MassReport {
    fn new(functional: Functional, n: usize, r: f64, order: usize, value: f64) -> Self {
        MassReport {
            functional,
            r,
            value,
            area: f64::NAN,
            volume: None,
            theta: f64::NAN,
            order,
            chi: None,
            flux_constant: flux_normalization(n),
            tensor_constant: tensor_normalization(n),
            warnings: Vec::new(),
        }
    }
}

fn require_outer_radius(field: &MetricField, r: f64) -> Result<()> {
    if !(r > 1.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            message: format!("mass functionals are evaluated at r > 1, got {r}"),
        });
    }
    if r <= field.exclusion_radius() {
        return Err(Error::InvalidParameter {
            name: "r",
            message: format!(
                "radius {r} inside the field's excluded core {}",
                field.exclusion_radius()
            ),
        });
    }
    Ok(())
}

fn attach_area(report: &mut MassReport, field: &MetricField, r: f64, order: usize) -> Result<()> {
    let a = area(field, r, order)?;
    report.area = a.value;
    report.theta = a.theta;
    Ok(())
}

/// Flux form of the ADM mass at radius `r`.
pub fn adm_flux(field: &MetricField, r: f64, order: usize) -> Result<MassReport> {
    require_outer_radius(field, r)?;
    let n = field.dimension();
    let hemi = hemisphere_rule_graded(n, r, order, field_grading_depth(field, r))?;
    let flux = surface_integral(field, &hemi, Measure::Euclidean, |node, jet| {
        let mut s = 0.0;
        for i in 0..n {
            let mut u = 0.0;
            for j in 0..n {
                u += jet.dg(i, j, j) - jet.dg(j, j, i);
            }
            s += u * node.position[i] / r;
        }
        Ok(s)
    })?;
    let eq = equator_rule(n, r, order)?;
    let edge = surface_integral(field, &eq, Measure::Euclidean, |node, jet| {
        let mut s = 0.0;
        for a in 1..n {
            s += jet.g(0, a) * node.position[a] / r;
        }
        Ok(s)
    })?;
    let value = flux_normalization(n) * (flux + edge);
    let mut report = MassReport::new(Functional::AdmFlux, n, r, order, value);
    attach_area(&mut report, field, r, order)?;
    Ok(report)
}

/// Tensor form of the ADM mass at radius `r`: Einstein tensor flux over the
/// hemisphere plus the boundary second-fundamental-form correction over the
/// equator, all quantities under the metric.
pub fn adm_tensor(field: &MetricField, r: f64, order: usize) -> Result<MassReport> {
    require_outer_radius(field, r)?;
    let n = field.dimension();
    let hemi = hemisphere_rule_graded(n, r, order, field_grading_depth(field, r))?;
    let bulk = surface_integral(field, &hemi, Measure::Metric, |node, jet| {
        let pack = curvature_from_jet(jet)?;
        let nu = outward_normal(jet)?;
        Ok(pack.einstein_bilinear(&node.position, &nu))
    })?;
    let eq = equator_rule(n, r, order)?;
    let edge = surface_integral(field, &eq, Measure::Metric, |node, jet| {
        let bf = boundary_frame(field, &node.position)?;
        let (theta, _) = edge_conormals(field, &node.position)?;
        let mut s = 0.0;
        for a in 1..n {
            for b in 1..n {
                let coeff = bf.second_form.get(a - 1, b - 1) - bf.mean_curvature * jet.g(a, b);
                s += coeff * node.position[a] * theta[b];
            }
        }
        Ok(s)
    })?;
    let value = -tensor_normalization(n) * (bulk + edge);
    let mut report = MassReport::new(Functional::AdmTensor, n, r, order, value);
    attach_area(&mut report, field, r, order)?;
    Ok(report)
}

/// Hawking mass of the hemisphere disk (three dimensions):
/// `sqrt(|Σ|/8π) (1 - (1/8π) ∫ H²)`.
pub fn hawking_disk(field: &MetricField, r: f64, order: usize) -> Result<MassReport> {
    hawking_disk_with(field, r, order, CONTACT_THRESHOLD)
}

/// Disk Hawking mass with an explicit orthogonality threshold. The formula
/// assumes the surface meets the boundary orthogonally; when the measured
/// contact cosine exceeds the threshold the value is still produced, with a
/// warning attached.
pub fn hawking_disk_with(
    field: &MetricField,
    r: f64,
    order: usize,
    contact_threshold: f64,
) -> Result<MassReport> {
    require_outer_radius(field, r)?;
    let n = field.dimension();
    if n != 3 {
        return Err(Error::UnsupportedDimension {
            required: "3 (disk Hawking mass)".into(),
            actual: n,
        });
    }
    let a = area(field, r, order)?;
    let hemi = hemisphere_rule_graded(n, r, order, field_grading_depth(field, r))?;
    let h2 = surface_integral(field, &hemi, Measure::Metric, |_, jet| {
        let frame = surface_frame_from_jet(jet)?;
        Ok(frame.mean_curvature * frame.mean_curvature)
    })?;
    let value = (a.value / (8.0 * PI)).sqrt() * (1.0 - h2 / (8.0 * PI));

    let mut report = MassReport::new(Functional::HawkingDisk, n, r, order, value);
    report.area = a.value;
    report.theta = a.theta;
    report.chi = Some(1);

    let contact = max_contact_cosine(field, r, order.min(16))?;
    if contact.abs() > contact_threshold {
        report.warnings.push(format!(
            "surface meets the boundary at contact cosine {contact:.3e} (threshold {contact_threshold:.1e}); \
             the disk formula assumes an orthogonal intersection"
        ));
    }
    Ok(report)
}

/// Largest contact cosine over a sample of equator points.
fn max_contact_cosine(field: &MetricField, r: f64, order: usize) -> Result<f64> {
    let n = field.dimension();
    let eq = equator_rule(n, r, order.max(4))?;
    let mut worst: f64 = 0.0;
    for node in eq.nodes.iter().step_by((eq.nodes.len() / 8).max(1)) {
        let jet = field.jet(&node.position)?;
        let (theta, mu) = edge_conormals(field, &node.position)?;
        let c = jet.inner(&theta, &mu);
        if c.abs() > worst.abs() {
            worst = c;
        }
    }
    Ok(worst)
}

/// General-dimension Hawking-type mass of the hemisphere, built from the
/// intrinsic scalar curvature via the traced Gauss identity
/// `S = H² - |A|² - 2 G(ν,ν)` and the edge mean curvatures:
///
/// `(c_n/2) (2|Σ|/ω_{n-1})^{1/(n-1)} [ ∫_Σ (S - (n-2)/(n-1) H²)
///   + 2 ∫_∂Σ (H_{∂Σ,Σ} - <ϑ,μ'> H_{∂Σ,∂M}) ]`.
///
/// The prefactor `c_n/2 = 1/((n-2)(n-1)ω_{n-1})` is pinned by the
/// half-Schwarzschild family, on which the expression equals `m` exactly at
/// every radius and agrees with the disk form in three dimensions. The sign
/// of the contact term goes with this crate's frame orientations (`ϑ` and
/// `μ'` both outward), under which the pointwise expansion of the tensor
/// form's edge integrand reads
/// `(A - Hg)(X, ϑ) = -r (H_{∂Σ,Σ} - <ϑ,μ'> H_{∂Σ,∂M}) + O(r^{-1-2τ})`;
/// the boundary-graph family, whose contact cosine does not vanish, pins it
/// against the flux limit.
pub fn hawking_general(field: &MetricField, r: f64, order: usize) -> Result<MassReport> {
    require_outer_radius(field, r)?;
    let n = field.dimension();
    let nf = n as f64;
    let a = area(field, r, order)?;

    let hemi = hemisphere_rule_graded(n, r, order, field_grading_depth(field, r))?;
    let bulk = surface_integral(field, &hemi, Measure::Metric, |_, jet| {
        let frame = surface_frame_from_jet(jet)?;
        let pack = curvature_from_jet(jet)?;
        let h = frame.mean_curvature;
        let s = h * h
            - frame.second_form_norm2
            - 2.0 * pack.einstein_bilinear(&frame.normal, &frame.normal);
        Ok(s - (nf - 2.0) / (nf - 1.0) * h * h)
    })?;

    let eq = equator_rule(n, r, order)?;
    let edge = surface_integral(field, &eq, Measure::Metric, |node, _| {
        let frame = edge_frame(field, &node.position)?;
        Ok(frame.mean_curvature_in_surface
            - frame.contact_cosine * frame.mean_curvature_in_boundary)
    })?;

    let radius_factor = (2.0 * a.value / unit_sphere_measure(n - 1)).powf(1.0 / (nf - 1.0));
    let value = 0.5 * tensor_normalization(n) * radius_factor * (bulk + 2.0 * edge);

    let mut report = MassReport::new(Functional::HawkingGeneral, n, r, order, value);
    report.area = a.value;
    report.theta = a.theta;
    report.chi = Some(1);
    Ok(report)
}

/// Isoperimetric mass with the default volume base.
pub fn iso_mass(field: &MetricField, r: f64, order: usize) -> Result<MassReport> {
    let v0 = euclidean_half_ball_volume(VOLUME_BASE_RADIUS);
    iso_mass_with_base(field, r, order, VOLUME_BASE_RADIUS, v0)
}

/// Euclidean half-ball volume `(2π/3) r³`, the documented volume constant.
pub fn euclidean_half_ball_volume(r: f64) -> f64 {
    2.0 * PI / 3.0 * r.powi(3)
}

/// Isoperimetric mass `(2/𝒜) (V - sqrt(2) 𝒜^{3/2} / (6 sqrt(π)))` of the
/// hemisphere, with `V(r) = v0 + ∫_{r0}^{r}` by the coarea formula. The
/// additive volume constant only shifts the value by `2 (v0 - V_true(r0))/𝒜`,
/// which vanishes in the limit.
pub fn iso_mass_with_base(
    field: &MetricField,
    r: f64,
    order: usize,
    base_radius: f64,
    base_volume: f64,
) -> Result<MassReport> {
    require_outer_radius(field, r)?;
    let n = field.dimension();
    if n != 3 {
        return Err(Error::UnsupportedDimension {
            required: "3 (isoperimetric mass)".into(),
            actual: n,
        });
    }
    let a = area(field, r, order)?;
    let volume = base_volume + volume_between(field, base_radius, r, order)?;
    let value = 2.0 / a.value * (volume - 2f64.sqrt() * a.value.powf(1.5) / (6.0 * PI.sqrt()));
    let mut report = MassReport::new(Functional::IsoMass, n, r, order, value);
    report.area = a.value;
    report.theta = a.theta;
    report.volume = Some(volume);
    report.chi = Some(1);
    Ok(report)
}

/// Boundary-graph mass `(n-1) ∫_{∂B_ρ} ∂_ρ u dθ̄` over the Euclidean sphere
/// of radius `ρ` in the base coordinates (`n` the base dimension).
pub fn graph_mass(spec: &GraphSpec, rho: f64, order: usize) -> Result<f64> {
    if !(rho >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "rho",
            message: format!("graph mass is evaluated at rho >= 1, got {rho}"),
        });
    }
    let ambient = spec.base_dim + 1;
    // The equator of the ambient half-space at radius rho is exactly the
    // base sphere ∂B_ρ.
    let rule = equator_rule(ambient, rho, order)?;
    let mut total = crate::kahan::KahanSum::new();
    for node in &rule.nodes {
        let base = &node.position[1..];
        let du = spec.profile.gradient(base);
        let radial: f64 = du.iter().zip(base).map(|(d, x)| d * x / rho).sum();
        total.add(radial * node.weight);
    }
    Ok((spec.base_dim as f64 - 1.0) * total.value())
}

/// Graph mass wrapped in a report row (the `area` column carries the
/// Euclidean sphere measure).
pub fn graph_mass_report(field: &MetricField, rho: f64, order: usize) -> Result<MassReport> {
    let spec = match field.family() {
        Family::Graph(spec) => spec,
        _ => {
            return Err(Error::InvalidParameter {
                name: "field",
                message: "graph mass needs a graph metric field".into(),
            })
        }
    };
    let value = graph_mass(spec, rho, order)?;
    let n = field.dimension();
    let mut report = MassReport::new(Functional::GraphMass, n, rho, order, value);
    report.area = unit_sphere_measure(spec.base_dim - 1) * rho.powi((spec.base_dim - 1) as i32);
    report.theta = 0.0;
    // The boundary-localized formula assumes the profile's derivatives decay
    // like rho^{1-n} and rho^{-n}; flag a profile that visibly violates it.
    let near = spec.asymptotics_report(&[rho.max(2.0)]);
    let far = spec.asymptotics_report(&[4.0 * rho.max(2.0)]);
    if far.0 > 2.0 * near.0.max(1e-12) || far.1 > 2.0 * near.1.max(1e-12) {
        report.warnings.push(format!(
            "profile decay diagnostics grow with radius \
             (rho^(n-1)|u'| {:.3e} -> {:.3e}); the graph mass formula \
             assumes they stay bounded",
            near.0, far.0
        ));
    }
    Ok(report)
}

/// Result of the integrated-Bianchi closure test.
#[derive(Debug, Clone, Copy)]
pub struct BianchiReport {
    /// `∫_{∂Π}(A - Hg)(X, ϑ) + ∫_{Σ⁺} G(X, ν)`
    pub lhs: f64,
    /// `-(n-2)/(2n) ∫_Ω R div X - (n-2)/(n-1) ∫_Π H div_Π X`
    pub rhs: f64,
    pub residual: f64,
    /// Conformal-Killing residual of the position field (sampled).
    pub killing_residual: f64,
}

const KILLING_THRESHOLD: f64 = 1e-8;

fn killing_residual_sample(field: &MetricField, r: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let probes: [Vec<f64>; 3] = {
        let n = field.dimension();
        let mut inner = vec![0.0; n];
        inner[0] = 0.6 * r;
        inner[1] = 0.3 * r;
        let mut bdry = vec![0.0; n];
        bdry[1] = 0.8 * r;
        let mut diag = vec![r / (n as f64).sqrt(); n];
        diag[0] = diag[0].abs();
        [inner, bdry, diag]
    };
    for p in &probes {
        worst = worst.max(crate::curvature::conformal_killing_residual(field, p)?);
    }
    Ok(worst)
}

/// Integrated Bianchi identity over the half ball `D_r⁺`, valid when the
/// position field is conformal Killing for the metric (radially conformal
/// families). Errors out otherwise rather than reporting a meaningless
/// residual.
pub fn bianchi_check(field: &MetricField, r: f64, order: usize) -> Result<BianchiReport> {
    let n = field.dimension();
    if !field.is_radially_conformal() {
        return Err(Error::InvalidParameter {
            name: "field",
            message: "integrated Bianchi test needs a radially conformal family".into(),
        });
    }
    let killing = killing_residual_sample(field, r)?;
    {
        let mut probe = vec![0.0; n];
        probe[1] = 0.7 * r;
        probe[0] = 0.2 * r;
        require_conformal_killing(field, &probe, KILLING_THRESHOLD)?;
    }

    let lhs = tensor_flux_unscaled(field, r, order)?;
    let rhs = bianchi_rhs(field, 0.0, r, order)?;
    Ok(BianchiReport {
        lhs,
        rhs,
        residual: lhs - rhs,
        killing_residual: killing,
    })
}

/// Same identity over the half-annulus `{r0 <= |x| <= r}`: the inner
/// hemisphere and inner equator enter with reversed orientation.
pub fn bianchi_check_annulus(
    field: &MetricField,
    r0: f64,
    r: f64,
    order: usize,
) -> Result<BianchiReport> {
    if !(r0 > 0.0) || r0 >= r {
        return Err(Error::InvalidParameter {
            name: "r0",
            message: format!("needs 0 < r0 < r, got {r0} vs {r}"),
        });
    }
    if !field.is_radially_conformal() {
        return Err(Error::InvalidParameter {
            name: "field",
            message: "integrated Bianchi test needs a radially conformal family".into(),
        });
    }
    let killing = killing_residual_sample(field, r)?;
    let lhs = tensor_flux_unscaled(field, r, order)? - tensor_flux_unscaled(field, r0, order)?;
    let rhs = bianchi_rhs(field, r0, r, order)?;
    Ok(BianchiReport {
        lhs,
        rhs,
        residual: lhs - rhs,
        killing_residual: killing,
    })
}

/// `∫_{∂Σ_r}(A - Hg)(X, ϑ) dθ_g + ∫_{Σ_r⁺} G(X, ν) dσ_g` without the mass
/// normalization: the shared surface side of the tensor mass and of the
/// integrated Bianchi identity.
fn tensor_flux_unscaled(field: &MetricField, r: f64, order: usize) -> Result<f64> {
    let n = field.dimension();
    let hemi = hemisphere_rule_graded(n, r, order, field_grading_depth(field, r))?;
    let bulk = surface_integral(field, &hemi, Measure::Metric, |node, jet| {
        let pack = curvature_from_jet(jet)?;
        let nu = outward_normal(jet)?;
        Ok(pack.einstein_bilinear(&node.position, &nu))
    })?;
    let eq = equator_rule(n, r, order)?;
    let edge = surface_integral(field, &eq, Measure::Metric, |node, jet| {
        let bf = boundary_frame(field, &node.position)?;
        let (theta, _) = edge_conormals(field, &node.position)?;
        let mut s = 0.0;
        for a in 1..n {
            for b in 1..n {
                let coeff = bf.second_form.get(a - 1, b - 1) - bf.mean_curvature * jet.g(a, b);
                s += coeff * node.position[a] * theta[b];
            }
        }
        Ok(s)
    })?;
    Ok(bulk + edge)
}

fn bianchi_rhs(field: &MetricField, r0: f64, r: f64, order: usize) -> Result<f64> {
    let n = field.dimension();
    let nf = n as f64;
    let ball = half_ball_shell_rule_graded(n, r0, r, order, field_grading_depth(field, r))?;
    let volume_term = surface_integral(field, &ball, Measure::Metric, |node, jet| {
        let pack = curvature_from_jet(jet)?;
        // div X = n + Γ^i_ik x^k
        let mut div = nf;
        for i in 0..n {
            for k in 0..n {
                div += pack.gamma.get(i, i, k) * node.position[k];
            }
        }
        Ok(pack.scalar * div)
    })?;

    let disk_term = {
        let disk = crate::quadrature::boundary_strip_rule(n, r0, r, order)?;
        surface_integral(field, &disk, Measure::Metric, |node, jet| {
            let bf = boundary_frame(field, &node.position)?;
            let bgamma = boundary_christoffel(jet)?;
            // div_Π X over the boundary plane
            let mut div = nf - 1.0;
            for a in 0..n - 1 {
                for b in 0..n - 1 {
                    div += bgamma.get(a, a, b) * node.position[b + 1];
                }
            }
            Ok(bf.mean_curvature * div)
        })?
    };

    Ok(-(nf - 2.0) / (2.0 * nf) * volume_term - (nf - 2.0) / (nf - 1.0) * disk_term)
}

/// Bianchi residual wrapped in a report row for the batch driver.
pub fn bianchi_report(field: &MetricField, r: f64, order: usize) -> Result<MassReport> {
    let check = bianchi_check(field, r, order)?;
    let n = field.dimension();
    let mut report = MassReport::new(Functional::Bianchi, n, r, order, check.residual);
    attach_area(&mut report, field, r, order)?;
    report.warnings.push(format!(
        "lhs={:.6e} rhs={:.6e} killing_residual={:.2e}",
        check.lhs, check.rhs, check.killing_residual
    ));
    Ok(report)
}

/// Evaluate any functional at one radius.
pub fn evaluate(
    field: &MetricField,
    functional: Functional,
    r: f64,
    order: usize,
) -> Result<MassReport> {
    match functional {
        Functional::AdmFlux => adm_flux(field, r, order),
        Functional::AdmTensor => adm_tensor(field, r, order),
        Functional::HawkingDisk => hawking_disk(field, r, order),
        Functional::HawkingGeneral => hawking_general(field, r, order),
        Functional::IsoMass => iso_mass(field, r, order),
        Functional::GraphMass => graph_mass_report(field, r, order),
        Functional::Bianchi => bianchi_report(field, r, order),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{BumpSpec, GraphSpec, MetricField, Profile};
    use approx::assert_relative_eq;

    const ORDER: usize = 24;

    #[test]
    fn flat_masses_vanish() {
        let f = MetricField::flat(3).unwrap();
        for functional in [
            Functional::AdmFlux,
            Functional::AdmTensor,
            Functional::HawkingDisk,
            Functional::HawkingGeneral,
            Functional::IsoMass,
        ] {
            let report = evaluate(&f, functional, 10.0, ORDER).unwrap();
            assert!(
                report.value.abs() < 1e-8,
                "{functional} = {} on flat space",
                report.value
            );
        }
        let check = bianchi_check(&f, 10.0, 12).unwrap();
        assert!(check.lhs.abs() < 1e-10);
        assert!(check.rhs.abs() < 1e-10);
    }

    #[test]
    fn half_schwarzschild_flux_closed_form() {
        // b_3 normalization pins adm_flux(r) = m (1 + m/2r)^3 exactly.
        let f = MetricField::half_schwarzschild(3, 1.0).unwrap();
        for (r, expect) in [(2.0, 1.953125), (10.0, 1.157625), (100.0, 1.015075125)] {
            let report = adm_flux(&f, r, ORDER).unwrap();
            assert_relative_eq!(report.value, expect, epsilon = 1e-10);
        }
    }

    #[test]
    fn conformal_flux_closed_form() {
        // psi = 1 + a (1+r^2)^{-1/2}: flux integrand -(n-1) psi'(r) exactly,
        // so the mass is (a/2) r^3 (1+r^2)^{-3/2}.
        let a = 2.0;
        let f = MetricField::conformal_perturbation(3, a, 1.0).unwrap();
        for r in [20.0, 500.0] {
            let report = adm_flux(&f, r, ORDER).unwrap();
            let expect = a / 2.0 * r.powi(3) * (1.0 + r * r).powf(-1.5);
            assert_relative_eq!(report.value, expect, epsilon = 1e-10);
        }
        // tail value approaches a/2 = 1
        let report = adm_flux(&f, 500.0, ORDER).unwrap();
        assert_relative_eq!(report.value, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn half_schwarzschild_tensor_form_is_exact() {
        // G(X, nu) integrates to the mass with no radius dependence at all.
        let f = MetricField::half_schwarzschild(3, 1.0).unwrap();
        for r in [2.0, 10.0, 100.0] {
            let report = adm_tensor(&f, r, ORDER).unwrap();
            assert_relative_eq!(report.value, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn conformal_tensor_gap_matches_expansion() {
        // adm_flux - adm_tensor = (3/8) a^2 / r + O(r^{-2})
        let a = 2.0;
        let f = MetricField::conformal_perturbation(3, a, 1.0).unwrap();
        let gap = |r: f64| {
            adm_flux(&f, r, ORDER).unwrap().value - adm_tensor(&f, r, ORDER).unwrap().value
        };
        let g100 = gap(100.0);
        let g200 = gap(200.0);
        assert_relative_eq!(g100, 0.375 * a * a / 100.0, epsilon = 5e-4);
        // first-order rate: the gap halves when the radius doubles
        assert_relative_eq!(g100 / g200, 2.0, epsilon = 0.05);
    }

    #[test]
    fn hawking_disk_is_radius_independent_on_schwarzschild() {
        let f = MetricField::half_schwarzschild(3, 1.0).unwrap();
        for r in [2.0, 10.0, 100.0] {
            let report = hawking_disk(&f, r, ORDER).unwrap();
            assert_relative_eq!(report.value, 1.0, epsilon = 1e-9);
            assert_eq!(report.chi, Some(1));
            assert!(report.warnings.is_empty());
        }
    }

    #[test]
    fn hawking_general_matches_disk_in_three_dimensions() {
        let f = MetricField::half_schwarzschild(3, 1.0).unwrap();
        for r in [2.0, 10.0] {
            let disk = hawking_disk(&f, r, ORDER).unwrap().value;
            let general = hawking_general(&f, r, ORDER).unwrap().value;
            assert!(
                (disk - general).abs() < 1e-6,
                "disk {disk} vs general {general} at r={r}"
            );
        }
    }

    #[test]
    fn hawking_general_dimension_four() {
        let f = MetricField::half_schwarzschild(4, 1.0).unwrap();
        let report = hawking_general(&f, 10.0, 16).unwrap();
        assert_relative_eq!(report.value, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn iso_mass_approaches_the_mass() {
        let f = MetricField::half_schwarzschild(3, 1.0).unwrap();
        let report = iso_mass(&f, 100.0, 16).unwrap();
        // iso(r) = m + 3 m^2 / r + O(log r / r^2)
        assert_relative_eq!(report.value, 1.03, epsilon = 5e-3);
    }

    #[test]
    fn iso_mass_volume_base_shift_identity() {
        let f = MetricField::half_schwarzschild(3, 1.0).unwrap();
        let r = 20.0;
        let v0 = euclidean_half_ball_volume(VOLUME_BASE_RADIUS);
        let shift = 3.7;
        let a = iso_mass_with_base(&f, r, 12, VOLUME_BASE_RADIUS, v0).unwrap();
        let b = iso_mass_with_base(&f, r, 12, VOLUME_BASE_RADIUS, v0 + shift).unwrap();
        assert_relative_eq!(b.value - a.value, 2.0 * shift / a.area, epsilon = 1e-12);
    }

    #[test]
    fn graph_mass_oracles() {
        // constant profile
        let spec = GraphSpec::new(3, Profile::Constant { level: 2.0 }).unwrap();
        assert_eq!(graph_mass(&spec, 5.0, 12).unwrap(), 0.0);

        // u = a/|X|: (n-1) * 4 pi rho^2 * (-a/rho^2) = -8 pi a at every rho
        let a = -1.0 / (8.0 * PI);
        let spec = GraphSpec::new(3, Profile::InverseRadius { amplitude: a }).unwrap();
        for rho in [1.5, 50.0] {
            assert_relative_eq!(graph_mass(&spec, rho, 12).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn graph_mass_ignores_compact_bumps_beyond_their_support() {
        let a = 0.4;
        let plain = GraphSpec::new(3, Profile::SmoothedInverseRadius { amplitude: a }).unwrap();
        let bumped = GraphSpec::new(
            3,
            Profile::SmoothedWithBump {
                amplitude: a,
                bump: BumpSpec::new(0.8, 5.0, 2.0).unwrap(),
            },
        )
        .unwrap();
        let rho = 12.0; // beyond the support radius 7
        let v1 = graph_mass(&plain, rho, 16).unwrap();
        let v2 = graph_mass(&bumped, rho, 16).unwrap();
        assert_eq!(v1, v2);
    }

    #[test]
    fn flux_is_local_to_the_evaluation_sphere() {
        // A compactly supported interior bump cannot change the flux.
        let plain = MetricField::conformal_perturbation(3, 1.0, 1.0).unwrap();
        let bumped =
            MetricField::conformal_bump(3, 1.0, 1.0, BumpSpec::new(0.5, 5.0, 2.0).unwrap())
                .unwrap();
        let r = 10.0; // outside the bump support [3, 7]
        let a = adm_flux(&plain, r, 12).unwrap().value;
        let b = adm_flux(&bumped, r, 12).unwrap().value;
        assert_eq!(a, b);
    }

    #[test]
    fn bianchi_identity_closes_on_conformal_fields() {
        let f = MetricField::conformal_perturbation(3, 1.0, 1.0).unwrap();
        let check = bianchi_check(&f, 20.0, 16).unwrap();
        assert!(
            check.residual.abs() <= 1e-4 * check.lhs.abs().max(1e-6),
            "lhs {} rhs {} residual {}",
            check.lhs,
            check.rhs,
            check.residual
        );
        assert!(check.killing_residual < 1e-12);
    }

    #[test]
    fn bianchi_identity_closes_on_annuli() {
        let f = MetricField::half_schwarzschild(3, 1.0).unwrap();
        let check = bianchi_check_annulus(&f, 2.0, 20.0, 16).unwrap();
        assert!(
            check.residual.abs() <= 1e-4 * check.lhs.abs().max(1e-6),
            "lhs {} rhs {} residual {}",
            check.lhs,
            check.rhs,
            check.residual
        );
    }

    #[test]
    fn bianchi_rejects_non_conformal_fields() {
        let f = MetricField::graph(
            GraphSpec::new(3, Profile::SmoothedInverseRadius { amplitude: 0.5 }).unwrap(),
        )
        .unwrap();
        assert!(bianchi_check(&f, 10.0, 8).is_err());
    }

    #[test]
    fn scaling_covariance_at_lambda_two() {
        // Pulling the metric back along x -> 2x doubles the half-Schwarzschild
        // parameter, and each mass at the doubled radius doubles with it.
        let f1 = MetricField::half_schwarzschild(3, 1.0).unwrap();
        let f2 = MetricField::half_schwarzschild(3, 2.0).unwrap();
        for r in [5.0, 20.0] {
            let flux1 = adm_flux(&f1, r, ORDER).unwrap().value;
            let flux2 = adm_flux(&f2, 2.0 * r, ORDER).unwrap().value;
            assert_relative_eq!(flux2, 2.0 * flux1, epsilon = 1e-10);
            let hd1 = hawking_disk(&f1, r, ORDER).unwrap().value;
            let hd2 = hawking_disk(&f2, 2.0 * r, ORDER).unwrap().value;
            assert_relative_eq!(hd2, 2.0 * hd1, epsilon = 1e-9);
            let t1 = adm_tensor(&f1, r, ORDER).unwrap().value;
            let t2 = adm_tensor(&f2, 2.0 * r, ORDER).unwrap().value;
            assert_relative_eq!(t2, 2.0 * t1, epsilon = 1e-9);
        }
        let scale = 2.0f64;
        let i1 = iso_mass_with_base(&f1, 50.0, 12, 2.0, euclidean_half_ball_volume(2.0))
            .unwrap()
            .value;
        let i2 = iso_mass_with_base(
            &f2,
            100.0,
            12,
            4.0,
            scale.powi(3) * euclidean_half_ball_volume(2.0),
        )
        .unwrap()
        .value;
        assert_relative_eq!(i2, 2.0 * i1, epsilon = 1e-8);
    }

    #[test]
    fn hawking_disk_warns_on_non_orthogonal_contact() {
        // A three-dimensional graph field (base dimension 2) has a visibly
        // tilted edge at moderate radius.
        let f = MetricField::graph(
            GraphSpec::new(2, Profile::SmoothedInverseRadius { amplitude: 2.0 }).unwrap(),
        )
        .unwrap();
        let report = hawking_disk(&f, 3.0, 12).unwrap();
        assert!(
            !report.warnings.is_empty(),
            "expected a contact warning, value {}",
            report.value
        );
    }
}
