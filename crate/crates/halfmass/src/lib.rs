//! Numerical evaluation of mass functionals on asymptotically flat manifolds
//! with a non-compact boundary.
//!
//! The manifolds are modeled on the coordinate half-space `{x1 >= 0}` of
//! dimension `n >= 3`, carrying a Riemannian metric that approaches the
//! Euclidean metric at a rate `r^-tau`. The crate provides
//!
//! * a small registry of model metric families ([`metric`]),
//! * pointwise curvature and the geometric frames of the boundary, of
//!   coordinate hemispheres and of their equatorial edges ([`curvature`],
//!   [`frames`]),
//! * deterministic quadrature over hemispheres, equators, boundary disks and
//!   half balls ([`quadrature`]),
//! * the mass functionals themselves — flux and tensor forms of the ADM mass,
//!   Hawking mass with boundary, isoperimetric mass, a graph-boundary mass,
//!   and an integrated Bianchi closure test ([`mass`]),
//! * a batch harness with radius schedules, convergence-rate fitting and a
//!   validation suite ([`harness`]).
//!
//! ```
//! use halfmass::metric::MetricField;
//! use halfmass::mass;
//!
//! let g = MetricField::half_schwarzschild(3, 1.0).unwrap();
//! let report = mass::adm_flux(&g, 100.0, 32).unwrap();
//! // The flux form on this family equals m (1 + m/2r)^3 at radius r.
//! assert!((report.value - 1.015075125).abs() < 1e-10);
//! ```

// Index loops mirror the tensor index algebra; `!(x > y)` in validations
// rejects NaN parameters, which the suggested `x <= y` would let through.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod frames;
pub mod harness;
pub mod kahan;
pub mod linalg;
pub mod mass;
pub mod metric;
pub mod quadrature;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Surface measure of the unit sphere `S^k` in `R^{k+1}`.
///
/// `S^0` is two points, `S^1` the unit circle, `S^2` the unit 2-sphere.
pub fn unit_sphere_measure(k: usize) -> f64 {
    use std::f64::consts::PI;
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        k => 2.0 * PI / (k as f64 - 1.0) * unit_sphere_measure(k - 2),
    }
}

// The guide's code samples compile and run with the test suite.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }
    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(metrics, "../../../book/src/metrics.md");
    chapter!(curvature, "../../../book/src/curvature.md");
    chapter!(quadrature, "../../../book/src/quadrature.md");
    chapter!(masses, "../../../book/src/masses.md");
    chapter!(harness, "../../../book/src/harness.md");
}
