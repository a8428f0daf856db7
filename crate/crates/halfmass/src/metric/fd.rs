//! Finite-difference jets.
//!
//! Central second-order stencils in directions tangent to the boundary,
//! one-sided second-order stencils in the `x1` direction whenever the
//! centered stencil would leave the half-space. An optional Richardson pass
//! halves the step once and combines the two jets for fourth-order accuracy.

use super::{MetricField, MetricJet};
use crate::{Error, Result};

/// Step selection for finite differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepPolicy {
    /// `eps^(1/3) * max(1, |x|)` for first derivatives and
    /// `eps^(1/4) * max(1, |x|)` for second derivatives; the usual
    /// truncation/roundoff balance for second-order stencils.
    Scaled,
    /// One fixed step for everything.
    Fixed(f64),
}

impl StepPolicy {
    fn steps(self, scale: f64) -> Result<(f64, f64)> {
        let (h1, h2) = match self {
            StepPolicy::Scaled => (
                f64::EPSILON.powf(1.0 / 3.0) * scale,
                f64::EPSILON.powf(1.0 / 4.0) * scale,
            ),
            StepPolicy::Fixed(h) => (h, h),
        };
        for h in [h1, h2] {
            if !(h > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "step",
                    message: format!("finite-difference step must be positive, got {h}"),
                });
            }
            if h < 8.0 * f64::EPSILON * scale {
                return Err(Error::StepUnderflow { step: h, scale });
            }
        }
        Ok((h1, h2))
    }
}

pub(super) fn fd_jet(
    field: &MetricField,
    x: &[f64],
    policy: StepPolicy,
    richardson: bool,
) -> Result<MetricJet> {
    let scale = crate::linalg::norm(x).max(1.0);
    let (h1, h2) = policy.steps(scale)?;
    let coarse = fd_jet_step(field, x, h1, h2)?;
    if !richardson {
        return Ok(coarse);
    }
    let fine = fd_jet_step(field, x, h1 / 2.0, h2 / 2.0)?;
    let mut jet = fine.clone();
    for (out, (f, c)) in jet.dg.iter_mut().zip(fine.dg.iter().zip(coarse.dg.iter())) {
        *out = (4.0 * f - c) / 3.0;
    }
    for (out, (f, c)) in jet
        .d2g
        .iter_mut()
        .zip(fine.d2g.iter().zip(coarse.d2g.iter()))
    {
        *out = (4.0 * f - c) / 3.0;
    }
    Ok(jet)
}

fn fd_jet_step(field: &MetricField, x: &[f64], h1: f64, h2: f64) -> Result<MetricJet> {
    let n = field.dimension();
    let eval = |y: &[f64]| -> Result<Vec<f64>> { field.components(y) };

    let mut jet = MetricJet::zeros(n, x.to_vec());
    jet.g = eval(x)?;

    // First derivatives.
    for k in 0..n {
        let d = diff1(&eval, x, k, h1, one_sided(x, k, h1))?;
        for i in 0..n {
            for j in 0..n {
                jet.set_dg(i, j, k, d[i * n + j]);
            }
        }
    }

    // Second derivatives, k <= l then mirrored.
    for k in 0..n {
        for l in k..n {
            let d = if k == l {
                diff2_pure(&eval, x, k, h2, one_sided(x, k, h2))?
            } else {
                // Nested first-derivative stencils.
                let inner = |y: &[f64]| diff1(&eval, y, l, h2, one_sided(y, l, h2));
                diff1_generic(&inner, x, k, h2, one_sided(x, k, h2))?
            };
            for i in 0..n {
                for j in 0..n {
                    jet.set_d2g(i, j, k, l, d[i * n + j]);
                    jet.set_d2g(i, j, l, k, d[i * n + j]);
                }
            }
        }
    }
    Ok(jet)
}

/// The `x1` direction switches to one-sided stencils near the boundary face.
fn one_sided(x: &[f64], dir: usize, h: f64) -> bool {
    dir == 0 && x[0] < 2.0 * h
}

fn shifted(x: &[f64], dir: usize, delta: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[dir] += delta;
    y
}

fn diff1(
    eval: &impl Fn(&[f64]) -> Result<Vec<f64>>,
    x: &[f64],
    dir: usize,
    h: f64,
    one_sided: bool,
) -> Result<Vec<f64>> {
    diff1_generic(eval, x, dir, h, one_sided)
}

/// Second-order first derivative of a vector-valued function.
fn diff1_generic(
    eval: &impl Fn(&[f64]) -> Result<Vec<f64>>,
    x: &[f64],
    dir: usize,
    h: f64,
    one_sided: bool,
) -> Result<Vec<f64>> {
    if one_sided {
        let f0 = eval(x)?;
        let f1 = eval(&shifted(x, dir, h))?;
        let f2 = eval(&shifted(x, dir, 2.0 * h))?;
        Ok((0..f0.len())
            .map(|i| (-3.0 * f0[i] + 4.0 * f1[i] - f2[i]) / (2.0 * h))
            .collect())
    } else {
        let fp = eval(&shifted(x, dir, h))?;
        let fm = eval(&shifted(x, dir, -h))?;
        Ok((0..fp.len()).map(|i| (fp[i] - fm[i]) / (2.0 * h)).collect())
    }
}

/// Second-order pure second derivative.
fn diff2_pure(
    eval: &impl Fn(&[f64]) -> Result<Vec<f64>>,
    x: &[f64],
    dir: usize,
    h: f64,
    one_sided: bool,
) -> Result<Vec<f64>> {
    if one_sided {
        let f0 = eval(x)?;
        let f1 = eval(&shifted(x, dir, h))?;
        let f2 = eval(&shifted(x, dir, 2.0 * h))?;
        let f3 = eval(&shifted(x, dir, 3.0 * h))?;
        Ok((0..f0.len())
            .map(|i| (2.0 * f0[i] - 5.0 * f1[i] + 4.0 * f2[i] - f3[i]) / (h * h))
            .collect())
    } else {
        let f0 = eval(x)?;
        let fp = eval(&shifted(x, dir, h))?;
        let fm = eval(&shifted(x, dir, -h))?;
        Ok((0..f0.len())
            .map(|i| (fp[i] - 2.0 * f0[i] + fm[i]) / (h * h))
            .collect())
    }
}
