//! Model metric fields on the coordinate half-space `{x1 >= 0}`.
//!
//! A [`MetricField`] is one of a closed registry of families, each defined in
//! dimension `n >= 3` and approaching the Euclidean metric like `r^-tau` for
//! a family-specific decay rate `tau > (n-2)/2`. Fields are immutable and all
//! evaluation is pure, so values can be queried from many threads at once.
//!
//! Evaluation produces a [`MetricJet`]: the components `g_ij`, their first
//! and second partial derivatives, and the deviation `sigma_ij = g_ij -
//! delta_ij` at a point. Closed-form families carry analytic jets; a
//! finite-difference fallback with one-sided stencils at the boundary face is
//! available for every family (and is how graph metrics obtain second
//! derivatives).

use crate::linalg::SquareMatrix;
use crate::{Error, Result};

mod fd;

pub use fd::StepPolicy;

/// Pointwise metric data consumed by all curvature code.
///
/// Index layout is row-major: `dg[(i*n + j)*n + k] = g_ij,k` and similarly
/// for `d2g`.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub n: usize,
    pub point: Vec<f64>,
    g: Vec<f64>,
    dg: Vec<f64>,
    d2g: Vec<f64>,
}

impl MetricJet {
    fn zeros(n: usize, point: Vec<f64>) -> Self {
        MetricJet {
            n,
            point,
            g: vec![0.0; n * n],
            dg: vec![0.0; n * n * n],
            d2g: vec![0.0; n * n * n * n],
        }
    }

    #[inline]
    pub fn g(&self, i: usize, j: usize) -> f64 {
        self.g[i * self.n + j]
    }

    /// `g_ij,k`
    #[inline]
    pub fn dg(&self, i: usize, j: usize, k: usize) -> f64 {
        self.dg[(i * self.n + j) * self.n + k]
    }

    /// `g_ij,kl`
    #[inline]
    pub fn d2g(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.d2g[((i * self.n + j) * self.n + k) * self.n + l]
    }

    /// `sigma_ij = g_ij - delta_ij`, exactly.
    #[inline]
    pub fn sigma(&self, i: usize, j: usize) -> f64 {
        self.g(i, j) - if i == j { 1.0 } else { 0.0 }
    }

    pub fn matrix(&self) -> SquareMatrix {
        SquareMatrix {
            n: self.n,
            data: self.g.clone(),
        }
    }

    /// Inverse metric, failing on loss of positive definiteness.
    pub fn inverse(&self) -> Result<SquareMatrix> {
        self.matrix()
            .inverse_spd()
            .ok_or_else(|| Error::SingularMetric {
                point: self.point.clone(),
            })
    }

    /// Metric inner product of coordinate vectors.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.g(i, j) * u[i] * v[j];
            }
        }
        s
    }

    #[inline]
    fn set_g(&mut self, i: usize, j: usize, v: f64) {
        self.g[i * self.n + j] = v;
    }

    #[inline]
    fn set_dg(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.dg[(i * self.n + j) * self.n + k] = v;
    }

    #[inline]
    fn set_d2g(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        self.d2g[((i * self.n + j) * self.n + k) * self.n + l] = v;
    }
}

/// Compactly supported radial bump `height * (1 - t^2)^8` with
/// `t = (rho - center)/width`, zero outside `|t| < 1`.
///
/// The eighth power makes the junction C^7, so integrands built from two
/// metric derivatives stay C^5 across the support edges and panel-based
/// Gauss quadrature keeps converging at high order.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpSpec {
    pub height: f64,
    pub center: f64,
    pub width: f64,
}

impl BumpSpec {
    pub fn new(height: f64, center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidParameter {
                name: "bump.width",
                message: format!("must be positive, got {width}"),
            });
        }
        if center <= width {
            return Err(Error::InvalidParameter {
                name: "bump.center",
                message: format!(
                    "support must stay away from the origin (center {center} <= width {width})"
                ),
            });
        }
        Ok(BumpSpec {
            height,
            center,
            width,
        })
    }

    pub fn support_outer(&self) -> f64 {
        self.center + self.width
    }

    /// Value and first two radial derivatives at radius `rho`.
    fn radial(&self, rho: f64) -> (f64, f64, f64) {
        let t = (rho - self.center) / self.width;
        if t.abs() >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let s = 1.0 - t * t;
        let s2 = s * s;
        let s6 = s2 * s2 * s2;
        let b = s6 * s2;
        let db = -16.0 * t * s6 * s;
        let d2b = 16.0 * s6 * (15.0 * t * t - 1.0);
        let w = self.width;
        (
            self.height * b,
            self.height * db / w,
            self.height * d2b / (w * w),
        )
    }
}

/// Graph profile `u` over the base coordinates, with gradient and Hessian.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Constant {
        level: f64,
    },
    /// `u = amplitude / |X|`; singular at the origin, so fields built on it
    /// refuse evaluation at small base radius.
    InverseRadius {
        amplitude: f64,
    },
    /// `u = amplitude / sqrt(1 + |X|^2)`; same tail, smooth everywhere.
    SmoothedInverseRadius {
        amplitude: f64,
    },
    /// Smoothed profile plus a compactly supported radial bump.
    SmoothedWithBump {
        amplitude: f64,
        bump: BumpSpec,
    },
}

impl Profile {
    /// Radius below which evaluation is refused.
    fn min_radius(&self) -> f64 {
        match self {
            Profile::InverseRadius { .. } => 0.25,
            _ => 0.0,
        }
    }

    /// `(u, du/drho, d2u/drho2)` as functions of the base radius.
    fn radial(&self, rho: f64) -> (f64, f64, f64) {
        match self {
            Profile::Constant { level } => (*level, 0.0, 0.0),
            Profile::InverseRadius { amplitude } => {
                let a = *amplitude;
                (a / rho, -a / (rho * rho), 2.0 * a / (rho * rho * rho))
            }
            Profile::SmoothedInverseRadius { amplitude } => {
                let a = *amplitude;
                let q = 1.0 + rho * rho;
                (
                    a * q.powf(-0.5),
                    -a * rho * q.powf(-1.5),
                    a * (2.0 * rho * rho - 1.0) * q.powf(-2.5),
                )
            }
            Profile::SmoothedWithBump { amplitude, bump } => {
                let (u, du, d2u) = Profile::SmoothedInverseRadius {
                    amplitude: *amplitude,
                }
                .radial(rho);
                let (b, db, d2b) = bump.radial(rho);
                (u + b, du + db, d2u + d2b)
            }
        }
    }

    pub fn value(&self, base: &[f64]) -> f64 {
        self.radial(radius(base)).0
    }

    pub fn gradient(&self, base: &[f64]) -> Vec<f64> {
        let rho = radius(base);
        let (_, du, _) = self.radial(rho);
        base.iter().map(|xa| du * xa / rho).collect()
    }

    pub fn hessian(&self, base: &[f64]) -> Vec<f64> {
        let m = base.len();
        let rho = radius(base);
        let (_, du, d2u) = self.radial(rho);
        let mut h = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                let rad = d2u * base[a] * base[b] / (rho * rho);
                let tan =
                    du / rho * (if a == b { 1.0 } else { 0.0 } - base[a] * base[b] / (rho * rho));
                h[a * m + b] = rad + tan;
            }
        }
        h
    }

    /// Radial derivative `d_rho u` on the sphere of radius `rho`.
    pub fn radial_derivative(&self, rho: f64) -> f64 {
        self.radial(rho).1
    }
}

/// Boundary-graph construction: the manifold is the region above the graph
/// of `u` in flat space, pulled back to the half-space `{x1 >= 0}` through
/// the vertical taper `v` with `v(0) = 1`. The field dimension is
/// `base_dim + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpec {
    pub base_dim: usize,
    pub profile: Profile,
}

impl GraphSpec {
    pub fn new(base_dim: usize, profile: Profile) -> Result<Self> {
        if base_dim < 2 {
            return Err(Error::InvalidParameter {
                name: "base_dim",
                message: format!("graph base dimension must be >= 2, got {base_dim}"),
            });
        }
        Ok(GraphSpec { base_dim, profile })
    }

    /// Profile-decay diagnostics: suprema of `rho^{n-1} |du/drho|` and
    /// `rho^n |d2u/drho2|` over the given radii. Admissible profiles keep
    /// both bounded; a growing report means the boundary-localized mass
    /// formula is being applied outside its hypotheses.
    pub fn asymptotics_report(&self, radii: &[f64]) -> (f64, f64) {
        let n = self.base_dim as f64;
        let mut first: f64 = 0.0;
        let mut second: f64 = 0.0;
        for &rho in radii {
            let (_, du, d2u) = self.profile.radial(rho);
            first = first.max(rho.powf(n - 1.0) * du.abs());
            second = second.max(rho.powf(n) * d2u.abs());
        }
        (first, second)
    }

    /// Taper `v(t) = (1 + t^2)^((1-n)/2)` and its first three derivatives.
    ///
    /// Any taper with `v(0) = 1` and the profile's decay works; this choice
    /// keeps the boundary-localized mass independent of the taper.
    fn taper(&self, t: f64) -> (f64, f64, f64) {
        let p = (1.0 - self.base_dim as f64) / 2.0;
        let q = 1.0 + t * t;
        let v = q.powf(p);
        let dv = 2.0 * p * t * q.powf(p - 1.0);
        let d2v = 2.0 * p * q.powf(p - 2.0) * (q + 2.0 * (p - 1.0) * t * t);
        (v, dv, d2v)
    }
}

/// The closed family registry.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Euclidean half-space; every mass functional vanishes.
    FlatHalfSpace,
    /// `g_ij = (1 + m / (2 r^{n-2}))^{4/(n-2)} delta_ij`, scalar flat with
    /// totally geodesic boundary; mass parameter `m > 0`.
    HalfSchwarzschild { mass: f64 },
    /// `g_ij = psi(r) delta_ij` with `psi = 1 + a (1 + r^2)^{-tau/2}`,
    /// smooth at the origin with tail `1 + a r^-tau`.
    ConformalPerturbation { amplitude: f64, tau: f64 },
    /// Conformal perturbation plus a compactly supported radial bump; used
    /// to exercise locality of the flux integrals.
    ConformalBump {
        amplitude: f64,
        tau: f64,
        bump: BumpSpec,
    },
    /// Metric induced by the graph construction of [`GraphSpec`].
    Graph(GraphSpec),
}

/// How derivatives in jets are produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivMode {
    /// Closed-form derivatives where available (graph metrics differentiate
    /// their analytic first derivatives once numerically).
    Analytic,
    /// Finite differences of the metric components.
    FiniteDifference {
        policy: StepPolicy,
        richardson: bool,
    },
}

/// A model metric on the coordinate half-space.
#[derive(Debug, Clone)]
pub struct MetricField {
    n: usize,
    tau: f64,
    family: Family,
    mode: DerivMode,
}

fn radius(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

impl MetricField {
    pub fn flat(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(MetricField {
            n,
            tau: f64::INFINITY,
            family: Family::FlatHalfSpace,
            mode: DerivMode::Analytic,
        })
    }

    pub fn half_schwarzschild(n: usize, mass: f64) -> Result<Self> {
        check_dim(n)?;
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter {
                name: "mass",
                message: format!("must be positive, got {mass}"),
            });
        }
        Ok(MetricField {
            n,
            tau: (n - 2) as f64,
            family: Family::HalfSchwarzschild { mass },
            mode: DerivMode::Analytic,
        })
    }

    pub fn conformal_perturbation(n: usize, amplitude: f64, tau: f64) -> Result<Self> {
        check_dim(n)?;
        if !(amplitude > -1.0) {
            return Err(Error::InvalidParameter {
                name: "amplitude",
                message: format!("must exceed -1 so the metric stays positive, got {amplitude}"),
            });
        }
        if !(tau > (n as f64 - 2.0) / 2.0) {
            return Err(Error::InvalidParameter {
                name: "tau",
                message: format!(
                    "decay rate must exceed (n-2)/2 = {}, got {tau}",
                    (n as f64 - 2.0) / 2.0
                ),
            });
        }
        Ok(MetricField {
            n,
            tau,
            family: Family::ConformalPerturbation { amplitude, tau },
            mode: DerivMode::Analytic,
        })
    }

    pub fn conformal_bump(n: usize, amplitude: f64, tau: f64, bump: BumpSpec) -> Result<Self> {
        let base = Self::conformal_perturbation(n, amplitude, tau)?;
        if bump.height <= -1.0 {
            return Err(Error::InvalidParameter {
                name: "bump.height",
                message: "must exceed -1 so the metric stays positive".into(),
            });
        }
        Ok(MetricField {
            family: Family::ConformalBump {
                amplitude,
                tau,
                bump,
            },
            ..base
        })
    }

    pub fn graph(spec: GraphSpec) -> Result<Self> {
        let n = spec.base_dim + 1;
        check_dim(n)?;
        Ok(MetricField {
            n,
            tau: (spec.base_dim - 1) as f64,
            family: Family::Graph(spec),
            mode: DerivMode::Analytic,
        })
    }

    /// Instantiate a family by registry name, as used by configuration files.
    ///
    /// Known names: `flat`, `half-schwarzschild`, `conformal`,
    /// `conformal-bump`, `graph`.
    pub fn from_name(
        name: &str,
        dim: usize,
        params: &std::collections::BTreeMap<String, f64>,
    ) -> Result<Self> {
        let get =
            |key: &str, default: Option<f64>| -> Result<f64> {
                params.get(key).copied().or(default).ok_or_else(|| {
                    Error::config(key, format!("missing parameter for family `{name}`"))
                })
            };
        match name {
            "flat" => Self::flat(dim),
            "half-schwarzschild" => Self::half_schwarzschild(dim, get("m", Some(1.0))?),
            "conformal" => {
                Self::conformal_perturbation(dim, get("a", Some(1.0))?, get("tau", Some(1.0))?)
            }
            "conformal-bump" => Self::conformal_bump(
                dim,
                get("a", Some(1.0))?,
                get("tau", Some(1.0))?,
                BumpSpec::new(
                    get("bump_height", Some(0.5))?,
                    get("bump_center", Some(5.0))?,
                    get("bump_width", Some(2.0))?,
                )?,
            ),
            "graph" => {
                let amplitude = get("a", Some(1.0))?;
                let base = dim.checked_sub(1).filter(|b| *b >= 2).ok_or_else(|| {
                    Error::config("dim", "graph fields need dim >= 3 (base dimension dim - 1)")
                })?;
                Self::graph(GraphSpec::new(
                    base,
                    Profile::SmoothedInverseRadius { amplitude },
                )?)
            }
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }

    pub fn with_deriv_mode(mut self, mode: DerivMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Nominal decay rate of the family (infinite for the flat field).
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Registry name of the family.
    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::FlatHalfSpace => "flat",
            Family::HalfSchwarzschild { .. } => "half-schwarzschild",
            Family::ConformalPerturbation { .. } => "conformal",
            Family::ConformalBump { .. } => "conformal-bump",
            Family::Graph(_) => "graph",
        }
    }

    /// Family parameters in a stable display form, e.g. `m=1`.
    pub fn params_display(&self) -> String {
        match &self.family {
            Family::FlatHalfSpace => String::new(),
            Family::HalfSchwarzschild { mass } => format!("m={mass}"),
            Family::ConformalPerturbation { amplitude, tau } => format!("a={amplitude};tau={tau}"),
            Family::ConformalBump {
                amplitude,
                tau,
                bump,
            } => format!(
                "a={amplitude};tau={tau};bump={}@{}±{}",
                bump.height, bump.center, bump.width
            ),
            Family::Graph(spec) => match &spec.profile {
                Profile::Constant { level } => format!("u=const({level})"),
                Profile::InverseRadius { amplitude } => format!("u={amplitude}/rho"),
                Profile::SmoothedInverseRadius { amplitude } => {
                    format!("u={amplitude}/sqrt(1+rho^2)")
                }
                Profile::SmoothedWithBump { amplitude, bump } => format!(
                    "u={amplitude}/sqrt(1+rho^2)+bump={}@{}±{}",
                    bump.height, bump.center, bump.width
                ),
            },
        }
    }

    /// Smallest coordinate radius at which the field may be evaluated.
    pub fn exclusion_radius(&self) -> f64 {
        match &self.family {
            Family::HalfSchwarzschild { mass } => {
                // Minimal surface of the slice; the metric continues inward
                // but the model is only meant outside it.
                (mass / 2.0).powf(1.0 / (self.n as f64 - 2.0))
            }
            _ => 0.0,
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::InvalidParameter {
                name: "point",
                message: format!("expected {} coordinates, got {}", self.n, x.len()),
            });
        }
        if x[0] < 0.0 {
            return Err(Error::OutsideDomain {
                point: x.to_vec(),
                message: "first coordinate must be nonnegative".into(),
            });
        }
        let r = radius(x);
        let rmin = self.exclusion_radius();
        if r <= rmin {
            return Err(Error::OutsideDomain {
                point: x.to_vec(),
                message: format!("radius {r} inside excluded core (needs r > {rmin})"),
            });
        }
        if let Family::Graph(spec) = &self.family {
            let base_r = radius(&x[1..]);
            if base_r < spec.profile.min_radius() {
                return Err(Error::OutsideDomain {
                    point: x.to_vec(),
                    message: format!(
                        "base radius {base_r} below the profile's minimum {}",
                        spec.profile.min_radius()
                    ),
                });
            }
        }
        Ok(())
    }

    /// Raw metric components at a point, row-major `n x n`.
    pub fn components(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        Ok(self.components_unchecked(x))
    }

    fn components_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        match &self.family {
            Family::FlatHalfSpace => SquareMatrix::identity(n).data,
            Family::HalfSchwarzschild { .. }
            | Family::ConformalPerturbation { .. }
            | Family::ConformalBump { .. } => {
                let (w, _, _) = self.conformal_factor(radius(x));
                let mut g = vec![0.0; n * n];
                for i in 0..n {
                    g[i * n + i] = w;
                }
                g
            }
            Family::Graph(spec) => graph_components(spec, x),
        }
    }

    /// Conformal factor `w(r)` and two radial derivatives for the radially
    /// conformal families.
    fn conformal_factor(&self, r: f64) -> (f64, f64, f64) {
        match &self.family {
            Family::FlatHalfSpace => (1.0, 0.0, 0.0),
            Family::HalfSchwarzschild { mass } => {
                let nf = self.n as f64;
                let p = 4.0 / (nf - 2.0);
                let phi = 1.0 + mass / 2.0 * r.powf(2.0 - nf);
                let dphi = -(nf - 2.0) * mass / 2.0 * r.powf(1.0 - nf);
                let d2phi = (nf - 2.0) * (nf - 1.0) * mass / 2.0 * r.powf(-nf);
                let w = phi.powf(p);
                let dw = p * phi.powf(p - 1.0) * dphi;
                let d2w =
                    p * (p - 1.0) * phi.powf(p - 2.0) * dphi * dphi + p * phi.powf(p - 1.0) * d2phi;
                (w, dw, d2w)
            }
            Family::ConformalPerturbation { amplitude, tau } => conformal_psi(*amplitude, *tau, r),
            Family::ConformalBump {
                amplitude,
                tau,
                bump,
            } => {
                let (w, dw, d2w) = conformal_psi(*amplitude, *tau, r);
                let (b, db, d2b) = bump.radial(r);
                (w + b, dw + db, d2w + d2b)
            }
            Family::Graph(_) => unreachable!("graph metrics are not radially conformal"),
        }
    }

    pub fn is_radially_conformal(&self) -> bool {
        !matches!(self.family, Family::Graph(_))
    }

    /// Evaluate the jet at `x` according to the field's derivative mode.
    pub fn jet(&self, x: &[f64]) -> Result<MetricJet> {
        self.check_point(x)?;
        match self.mode {
            DerivMode::Analytic => Ok(self.analytic_jet(x)),
            DerivMode::FiniteDifference { policy, richardson } => {
                fd::fd_jet(self, x, policy, richardson)
            }
        }
    }

    /// Finite-difference jet with an explicit uniform step.
    pub fn fd_jet(&self, x: &[f64], step: f64) -> Result<MetricJet> {
        self.check_point(x)?;
        fd::fd_jet(self, x, StepPolicy::Fixed(step), false)
    }

    /// Finite-difference jet from one Richardson refinement (step halved once).
    pub fn fd_jet_richardson(&self, x: &[f64], step: f64) -> Result<MetricJet> {
        self.check_point(x)?;
        fd::fd_jet(self, x, StepPolicy::Fixed(step), true)
    }

    fn analytic_jet(&self, x: &[f64]) -> MetricJet {
        match &self.family {
            Family::FlatHalfSpace => {
                let mut jet = MetricJet::zeros(self.n, x.to_vec());
                for i in 0..self.n {
                    jet.set_g(i, i, 1.0);
                }
                jet
            }
            Family::HalfSchwarzschild { .. }
            | Family::ConformalPerturbation { .. }
            | Family::ConformalBump { .. } => {
                let r = radius(x);
                let (w, dw, d2w) = self.conformal_factor(r);
                radial_conformal_jet(self.n, x, r, w, dw, d2w)
            }
            Family::Graph(spec) => graph_jet(self, spec, x),
        }
    }

    /// Definition-style decay diagnostics: per-shell suprema of
    /// `|sigma|`, `|dg|` and `|d2g|` over sample points, plus the suprema of
    /// `r^tau |sigma|`, `r^(1+tau) |dg|`, `r^(2+tau) |d2g|` across shells.
    pub fn decay_report(&self, radii: &[f64], samples_per_shell: usize) -> Result<DecayReport> {
        let mut rows = Vec::with_capacity(radii.len());
        let tau = self.tau;
        let mut sup = [0.0f64; 3];
        for &r in radii {
            let mut shell = [0.0f64; 3];
            for x in sample_shell(self.n, r, samples_per_shell) {
                let jet = self.jet(&x)?;
                for i in 0..self.n {
                    for j in 0..self.n {
                        shell[0] = shell[0].max(jet.sigma(i, j).abs());
                        for k in 0..self.n {
                            shell[1] = shell[1].max(jet.dg(i, j, k).abs());
                            for l in 0..self.n {
                                shell[2] = shell[2].max(jet.d2g(i, j, k, l).abs());
                            }
                        }
                    }
                }
            }
            if tau.is_finite() {
                sup[0] = sup[0].max(r.powf(tau) * shell[0]);
                sup[1] = sup[1].max(r.powf(1.0 + tau) * shell[1]);
                sup[2] = sup[2].max(r.powf(2.0 + tau) * shell[2]);
            }
            rows.push(DecayRow {
                r,
                sup_sigma: shell[0],
                sup_dg: shell[1],
                sup_d2g: shell[2],
            });
        }
        Ok(DecayReport {
            tau,
            weighted_sup_sigma: sup[0],
            weighted_sup_dg: sup[1],
            weighted_sup_d2g: sup[2],
            rows,
        })
    }
}

/// Per-shell decay data.
#[derive(Debug, Clone)]
pub struct DecayRow {
    pub r: f64,
    pub sup_sigma: f64,
    pub sup_dg: f64,
    pub sup_d2g: f64,
}

/// Output of [`MetricField::decay_report`].
#[derive(Debug, Clone)]
pub struct DecayReport {
    pub tau: f64,
    pub weighted_sup_sigma: f64,
    pub weighted_sup_dg: f64,
    pub weighted_sup_d2g: f64,
    pub rows: Vec<DecayRow>,
}

fn check_dim(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParameter {
            name: "dimension",
            message: format!("fields are defined for n >= 3, got {n}"),
        });
    }
    Ok(())
}

fn conformal_psi(a: f64, tau: f64, r: f64) -> (f64, f64, f64) {
    let q = 1.0 + r * r;
    let w = 1.0 + a * q.powf(-tau / 2.0);
    let dw = -a * tau * r * q.powf(-tau / 2.0 - 1.0);
    let d2w = -a * tau * q.powf(-tau / 2.0 - 2.0) * (1.0 - (tau + 1.0) * r * r);
    (w, dw, d2w)
}

/// Assemble the jet of `g_ij = w(r) delta_ij` from radial derivatives of `w`.
fn radial_conformal_jet(n: usize, x: &[f64], r: f64, w: f64, dw: f64, d2w: f64) -> MetricJet {
    let mut jet = MetricJet::zeros(n, x.to_vec());
    let dir: Vec<f64> = x.iter().map(|xi| xi / r).collect();
    for i in 0..n {
        jet.set_g(i, i, w);
        for k in 0..n {
            jet.set_dg(i, i, k, dw * dir[k]);
            for l in 0..n {
                let delta = if k == l { 1.0 } else { 0.0 };
                // dir[k] * dir[l] commutes bitwise, keeping g_ij,kl = g_ij,lk
                let p = dir[k] * dir[l];
                let v = d2w * p + dw / r * (delta - p);
                jet.set_d2g(i, i, k, l, v);
            }
        }
    }
    jet
}

/// Components of the graph-induced metric at `x = (x0, X)`.
fn graph_components(spec: &GraphSpec, x: &[f64]) -> Vec<f64> {
    let n = spec.base_dim + 1;
    let base = &x[1..];
    let u = spec.profile.value(base);
    let du = spec.profile.gradient(base);
    let (v, dv, _) = spec.taper(x[0]);
    let mut g = vec![0.0; n * n];
    let c = 1.0 + u * dv;
    g[0] = c * c;
    for a in 0..spec.base_dim {
        g[a + 1] = c * v * du[a];
        g[(a + 1) * n] = g[a + 1];
        for b in 0..spec.base_dim {
            g[(a + 1) * n + (b + 1)] = if a == b { 1.0 } else { 0.0 } + v * v * (du[a] * du[b]);
        }
    }
    g
}

/// Analytic first derivatives of the graph metric; the profile Hessian is
/// the highest derivative required.
fn graph_first_derivatives(spec: &GraphSpec, x: &[f64]) -> Vec<f64> {
    let m = spec.base_dim;
    let n = m + 1;
    let base = &x[1..];
    let u = spec.profile.value(base);
    let du = spec.profile.gradient(base);
    let hu = spec.profile.hessian(base);
    let (v, dv, d2v) = spec.taper(x[0]);
    let c = 1.0 + u * dv;

    let mut dg = vec![0.0; n * n * n];
    let mut set = |i: usize, j: usize, k: usize, val: f64| {
        dg[(i * n + j) * n + k] = val;
        dg[(j * n + i) * n + k] = val;
    };

    // d g_00
    set(0, 0, 0, 2.0 * c * u * d2v);
    for cc in 0..m {
        set(0, 0, cc + 1, 2.0 * c * du[cc] * dv);
    }
    // d g_0a
    for a in 0..m {
        set(0, a + 1, 0, (u * v * d2v + c * dv) * du[a]);
        for cc in 0..m {
            let val = du[cc] * dv * v * du[a] + c * v * hu[a * m + cc];
            set(0, a + 1, cc + 1, val);
        }
    }
    // d g_ab, filled on a <= b and mirrored so the index symmetry is exact
    for a in 0..m {
        for b in a..m {
            let idx = |i: usize, j: usize| hu[i * m + j];
            let v0 = 2.0 * v * dv * (du[a] * du[b]);
            dg[((a + 1) * n + (b + 1)) * n] = v0;
            dg[((b + 1) * n + (a + 1)) * n] = v0;
            for cc in 0..m {
                let val = v * v * (idx(a, cc) * du[b] + du[a] * idx(b, cc));
                dg[((a + 1) * n + (b + 1)) * n + cc + 1] = val;
                dg[((b + 1) * n + (a + 1)) * n + cc + 1] = val;
            }
        }
    }
    dg
}

/// Graph jets: exact components and first derivatives, second derivatives by
/// one central (or boundary one-sided) difference of the first derivatives.
fn graph_jet(field: &MetricField, spec: &GraphSpec, x: &[f64]) -> MetricJet {
    let n = field.n;
    let mut jet = MetricJet::zeros(n, x.to_vec());
    jet.g = graph_components(spec, x);
    jet.dg = graph_first_derivatives(spec, x);

    let h = f64::EPSILON.powf(1.0 / 3.0) * radius(x).max(1.0);
    let mut raw = vec![0.0; n * n * n * n];
    for l in 0..n {
        let one_sided = l == 0 && x[0] < 2.0 * h;
        let column = |shift: f64| {
            let mut y = x.to_vec();
            y[l] += shift;
            graph_first_derivatives(spec, &y)
        };
        let d: Vec<f64> = if one_sided {
            let f0 = jet.dg.clone();
            let f1 = column(h);
            let f2 = column(2.0 * h);
            (0..f0.len())
                .map(|idx| (-3.0 * f0[idx] + 4.0 * f1[idx] - f2[idx]) / (2.0 * h))
                .collect()
        } else {
            let fp = column(h);
            let fm = column(-h);
            (0..fp.len())
                .map(|idx| (fp[idx] - fm[idx]) / (2.0 * h))
                .collect()
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    raw[((i * n + j) * n + k) * n + l] = d[(i * n + j) * n + k];
                }
            }
        }
    }
    // Symmetrize the mixed pair: both orders approximate the same quantity.
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let a = raw[((i * n + j) * n + k) * n + l];
                    let b = raw[((i * n + j) * n + l) * n + k];
                    jet.set_d2g(i, j, k, l, 0.5 * (a + b));
                }
            }
        }
    }
    jet
}

/// Deterministic low-discrepancy-ish sample of the hemisphere shell `|x| = r`.
fn sample_shell(n: usize, r: f64, count: usize) -> Vec<Vec<f64>> {
    let mut points = Vec::with_capacity(count);
    // Golden-angle style sweep, pushed slightly off the boundary and pole.
    let golden = 0.618_033_988_749_894_9_f64;
    for k in 0..count {
        let t = (k as f64 + 0.5) / count as f64;
        // polar angle in (0, pi/2)
        let theta = t * std::f64::consts::FRAC_PI_2 * 0.98 + 0.01;
        let mut x = vec![0.0; n];
        x[0] = r * theta.cos();
        // distribute the remaining direction on S^{n-2}
        let mut phase = (k as f64 * golden).fract() * std::f64::consts::TAU;
        let mut remaining = r * theta.sin();
        for i in 1..n - 1 {
            x[i] = remaining * phase.cos();
            remaining *= phase.sin().abs().max(1e-3);
            phase = (phase * golden + 1.0).rem_euclid(std::f64::consts::TAU);
        }
        x[n - 1] = remaining;
        // renormalize to the shell
        let s = radius(&x);
        for xi in x.iter_mut() {
            *xi *= r / s;
        }
        x[0] = x[0].abs();
        points.push(x);
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn flat_jet_is_trivial() {
        let f = MetricField::flat(3).unwrap();
        let jet = f.jet(&[1.0, 0.0, 0.0]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(jet.g(i, j), if i == j { 1.0 } else { 0.0 });
                for k in 0..3 {
                    assert_eq!(jet.dg(i, j, k), 0.0);
                }
            }
        }
    }

    #[test]
    fn half_schwarzschild_components_at_r2() {
        // (1 + 1/(2*2))^4 = 1.25^4 = 2.44140625
        let f = MetricField::half_schwarzschild(3, 1.0).unwrap();
        let jet = f.jet(&[0.0, 2.0, 0.0]).unwrap();
        assert_relative_eq!(jet.g(0, 0), 2.44140625, epsilon = 1e-15);
        assert_relative_eq!(jet.g(1, 1), 2.44140625, epsilon = 1e-15);
        assert_eq!(jet.g(0, 1), 0.0);
    }

    #[test]
    fn half_schwarzschild_radial_derivative_oracle() {
        // d/dr (1 + 1/(2r))^4 at r=2 equals 4 * 1.25^3 * (-1/8) = -0.9765625,
        // so g_11,2 at x = (0, 2, 0) is that value times x_2/r = 1.
        let f = MetricField::half_schwarzschild(3, 1.0).unwrap();
        let jet = f.jet(&[0.0, 2.0, 0.0]).unwrap();
        assert_relative_eq!(jet.dg(0, 0, 1), -0.9765625, epsilon = 1e-13);
    }

    #[test]
    fn conformal_tail_scales_like_a_over_r() {
        let f = MetricField::conformal_perturbation(3, 2.0, 1.0).unwrap();
        let r = 1.0e6;
        let jet = f.jet(&[0.0, r, 0.0]).unwrap();
        for i in 0..3 {
            assert_relative_eq!(jet.sigma(i, i) * r, 2.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn graph_boundary_components_match_profile_gradient() {
        // At x0 = 0 the taper has v = 1 and v' = 0, so g_0a = d_a u exactly.
        let spec = GraphSpec::new(3, Profile::SmoothedInverseRadius { amplitude: 0.7 }).unwrap();
        let f = MetricField::graph(spec.clone()).unwrap();
        let x = [0.0, 1.5, -0.3, 2.0];
        let jet = f.jet(&x).unwrap();
        let du = spec.profile.gradient(&x[1..]);
        for a in 0..3 {
            assert_relative_eq!(jet.g(0, a + 1), du[a], epsilon = 1e-14);
        }
        assert_relative_eq!(jet.g(0, 0), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn reflection_symmetry_on_the_boundary() {
        for f in [
            MetricField::half_schwarzschild(3, 1.0).unwrap(),
            MetricField::conformal_perturbation(3, 0.5, 1.5).unwrap(),
        ] {
            let jet = f.jet(&[0.0, 3.0, 1.0]).unwrap();
            for a in 1..3 {
                assert_eq!(jet.g(0, a), 0.0);
            }
        }
    }

    #[test]
    fn jet_symmetries_hold() {
        let f = MetricField::graph(
            GraphSpec::new(3, Profile::SmoothedInverseRadius { amplitude: 0.4 }).unwrap(),
        )
        .unwrap();
        let jet = f.jet(&[0.7, 2.0, 1.0, -0.5]).unwrap();
        let n = 4;
        for i in 0..n {
            for j in 0..n {
                assert_eq!(jet.g(i, j), jet.g(j, i));
                for k in 0..n {
                    assert_eq!(jet.dg(i, j, k), jet.dg(j, i, k));
                    for l in 0..n {
                        assert_eq!(jet.d2g(i, j, k, l), jet.d2g(i, j, l, k));
                    }
                }
            }
        }
    }

    #[test]
    fn excluded_core_is_reported() {
        let f = MetricField::half_schwarzschild(3, 1.0).unwrap();
        let err = f.jet(&[0.0, 0.3, 0.0]).unwrap_err();
        assert!(matches!(err, Error::OutsideDomain { .. }));
    }

    #[test]
    fn decay_report_is_bounded_for_conformal() {
        let f = MetricField::conformal_perturbation(3, 2.0, 1.0).unwrap();
        let report = f.decay_report(&[10.0, 20.0, 40.0, 80.0], 40).unwrap();
        // sigma ~ 2/r so r^tau |sigma| should hover near 2.
        assert!(report.weighted_sup_sigma < 4.0);
        assert!(report.weighted_sup_dg < 8.0);
        assert!(report.weighted_sup_d2g < 24.0);
    }

    #[test]
    fn graph_profile_asymptotics_stay_bounded() {
        let radii = [4.0, 16.0, 64.0, 256.0];
        for profile in [
            Profile::InverseRadius { amplitude: 2.0 },
            Profile::SmoothedInverseRadius { amplitude: 2.0 },
        ] {
            let spec = GraphSpec::new(3, profile).unwrap();
            let (first, second) = spec.asymptotics_report(&radii);
            assert!(first <= 2.5, "rho^2 |u'| = {first}");
            assert!(second <= 8.0, "rho^3 |u''| = {second}");
        }
    }

    #[test]
    fn bump_support_is_compact() {
        let bump = BumpSpec::new(0.5, 5.0, 2.0).unwrap();
        assert_eq!(bump.radial(7.1).0, 0.0);
        assert_eq!(bump.radial(2.9).0, 0.0);
        assert!(bump.radial(5.0).0 > 0.0);
    }
}
