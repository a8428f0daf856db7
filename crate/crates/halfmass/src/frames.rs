//! Geometric frames of the boundary plane, the coordinate hemispheres and
//! their equatorial edges.
//!
//! Conventions: normals are outward and g-unit; the mean curvature of a
//! round sphere in flat space is positive; the boundary second fundamental
//! form is `A_ab = (g^{11})^{-1/2} Γ^1_ab`, which makes the totally geodesic
//! plane of the reflection-symmetric families come out exactly zero.

use crate::curvature::{christoffel, Christoffel};
use crate::linalg::{self, SquareMatrix};
use crate::metric::{MetricField, MetricJet};
use crate::{Error, Result};

/// Frame of the boundary `∂M = {x1 = 0}` inside `M`.
#[derive(Debug, Clone)]
pub struct BoundaryFrame {
    pub point: Vec<f64>,
    /// Outward g-unit normal `μ` (approaches `-∂_1`).
    pub normal: Vec<f64>,
    /// Induced metric `h_ab`, indices running over the tangential directions.
    pub induced: SquareMatrix,
    /// Second fundamental form `A_ab`.
    pub second_form: SquareMatrix,
    /// Mean curvature `H = h^{ab} A_ab`.
    pub mean_curvature: f64,
}

/// Frame of the coordinate hemisphere `Σ_r^+ = {|x| = r}` inside `M`.
#[derive(Debug, Clone)]
pub struct SurfaceFrame {
    pub point: Vec<f64>,
    pub r: f64,
    /// Outward g-unit normal `ν`.
    pub normal: Vec<f64>,
    /// Euclidean-orthonormal tangent basis of the coordinate sphere.
    pub tangents: Vec<Vec<f64>>,
    /// Induced metric on the tangent basis.
    pub induced: SquareMatrix,
    /// Second fundamental form on the tangent basis, `A(e, f) = g(∇_e ν, f)`.
    pub second_form: SquareMatrix,
    /// `H_{Σ,M}`, the induced-metric trace of the second fundamental form.
    pub mean_curvature: f64,
    /// `|A|^2` with indices raised by the induced metric.
    pub second_form_norm2: f64,
}

/// Frame of the equatorial edge `∂Σ_r = {|x| = r, x1 = 0}`.
#[derive(Debug, Clone)]
pub struct EdgeFrame {
    pub point: Vec<f64>,
    /// `ϑ`: outward g-unit conormal of the edge inside the boundary plane.
    pub conormal_boundary: Vec<f64>,
    /// `μ'`: outward g-unit conormal of the edge inside the hemisphere.
    pub conormal_surface: Vec<f64>,
    /// Mean curvature of the edge inside the hemisphere (w.r.t. `μ'`).
    pub mean_curvature_in_surface: f64,
    /// Mean curvature of the edge inside the boundary plane (w.r.t. `ϑ`).
    pub mean_curvature_in_boundary: f64,
    /// Contact cosine `g(ϑ, μ')`; zero means orthogonal intersection.
    pub contact_cosine: f64,
}

fn degenerate(point: &[f64], message: &str) -> Error {
    Error::DegenerateFrame {
        point: point.to_vec(),
        message: message.into(),
    }
}

/// Boundary frame at a point of `{x1 = 0}`.
pub fn boundary_frame(field: &MetricField, y: &[f64]) -> Result<BoundaryFrame> {
    let n = field.dimension();
    if y[0] != 0.0 {
        return Err(Error::OutsideDomain {
            point: y.to_vec(),
            message: "boundary frame needs x1 = 0".into(),
        });
    }
    let jet = field.jet(y)?;
    let inv = jet.inverse()?;
    let gamma = christoffel(&jet)?;

    let g00 = inv.get(0, 0);
    let normal: Vec<f64> = (0..n).map(|i| -inv.get(0, i) / g00.sqrt()).collect();

    let induced = SquareMatrix::from_fn(n - 1, |a, b| jet.g(a + 1, b + 1));
    let second_form = SquareMatrix::from_fn(n - 1, |a, b| gamma.get(0, a + 1, b + 1) / g00.sqrt());
    let hinv = induced
        .inverse_spd()
        .ok_or_else(|| degenerate(y, "induced boundary metric not positive definite"))?;
    let mut mean = 0.0;
    for a in 0..n - 1 {
        for b in 0..n - 1 {
            mean += hinv.get(a, b) * second_form.get(a, b);
        }
    }
    Ok(BoundaryFrame {
        point: y.to_vec(),
        normal,
        induced,
        second_form,
        mean_curvature: mean,
    })
}

/// Asymptotic boundary mean curvature `½ (2 g_1a,a - g_aa,1)`; the difference
/// to the exact value decays at twice the metric rate.
pub fn boundary_mean_curvature_linearized(jet: &MetricJet) -> f64 {
    let n = jet.n;
    let mut s = 0.0;
    for a in 1..n {
        s += 2.0 * jet.dg(0, a, a) - jet.dg(a, a, 0);
    }
    0.5 * s
}

/// The unnormalized g-gradient of the coordinate radius and its derivatives,
/// used to differentiate the hemisphere normal field analytically.
struct NormalField<'a> {
    jet: &'a MetricJet,
    inv: SquareMatrix,
    w: Vec<f64>,
    length: f64,
}

impl<'a> NormalField<'a> {
    fn new(jet: &'a MetricJet) -> Result<Self> {
        let n = jet.n;
        let inv = jet.inverse()?;
        let w: Vec<f64> = (0..n)
            .map(|k| (0..n).map(|j| inv.get(k, j) * jet.point[j]).sum())
            .collect();
        let mut len2 = 0.0;
        for k in 0..n {
            for l in 0..n {
                len2 += jet.g(k, l) * w[k] * w[l];
            }
        }
        Ok(NormalField {
            jet,
            inv,
            w,
            length: len2.sqrt(),
        })
    }

    fn unit(&self) -> Vec<f64> {
        self.w.iter().map(|v| v / self.length).collect()
    }

    /// `∂_i w^k` with `w^k = g^{kj} x_j`, using `∂ g^{-1} = -g^{-1} ∂g g^{-1}`.
    fn dw(&self, i: usize, k: usize) -> f64 {
        let n = self.jet.n;
        let mut s = self.inv.get(k, i);
        for a in 0..n {
            for b in 0..n {
                s -= self.inv.get(k, a) * self.jet.dg(a, b, i) * self.w[b];
            }
        }
        s
    }

    /// `∂_i ν^k` of the unit normal field `ν = w / |w|_g`.
    fn derivative(&self, i: usize, k: usize) -> f64 {
        let n = self.jet.n;
        // ∂_i W, W^2 = g_ab w^a w^b
        let mut dlen = 0.0;
        for a in 0..n {
            for b in 0..n {
                dlen += self.jet.dg(a, b, i) * self.w[a] * self.w[b]
                    + 2.0 * self.jet.g(a, b) * self.w[b] * self.dw(i, a);
            }
        }
        dlen /= 2.0 * self.length;
        self.dw(i, k) / self.length - self.w[k] * dlen / (self.length * self.length)
    }
}

/// Outward g-unit normal of the coordinate sphere through the jet's point.
pub fn outward_normal(jet: &MetricJet) -> Result<Vec<f64>> {
    Ok(NormalField::new(jet)?.unit())
}

/// Hemisphere frame at a point with `|x| = r`.
pub fn surface_frame(field: &MetricField, x: &[f64]) -> Result<SurfaceFrame> {
    surface_frame_from_jet(&field.jet(x)?)
}

/// Hemisphere frame from an already-evaluated jet.
pub fn surface_frame_from_jet(jet: &MetricJet) -> Result<SurfaceFrame> {
    let n = jet.n;
    let x = &jet.point;
    let r = linalg::norm(x);
    let gamma = christoffel(jet)?;
    let nf = NormalField::new(jet)?;
    let normal = nf.unit();

    let tangents = linalg::orthogonal_complement(x);
    let induced = SquareMatrix::from_fn(n - 1, |a, b| jet.inner(&tangents[a], &tangents[b]));
    let qinv = induced
        .inverse_spd()
        .ok_or_else(|| degenerate(x, "induced hemisphere metric not positive definite"))?;

    // A(e, f) = g(∇_e ν, f) with ∇_e ν from the analytic normal field.
    let mut second = SquareMatrix::zeros(n - 1);
    for a in 0..n - 1 {
        // (∇_{t_a} ν)^k
        let mut cov = vec![0.0; n];
        for k in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                s += tangents[a][i] * nf.derivative(i, k);
                for j in 0..n {
                    s += gamma.get(k, i, j) * tangents[a][i] * normal[j];
                }
            }
            cov[k] = s;
        }
        for b in 0..n - 1 {
            second.set(a, b, jet.inner(&cov, &tangents[b]));
        }
    }
    for a in 0..n - 1 {
        for b in 0..a {
            let avg = 0.5 * (second.get(a, b) + second.get(b, a));
            second.set(a, b, avg);
            second.set(b, a, avg);
        }
    }

    let mut mean = 0.0;
    let mut norm2 = 0.0;
    for a in 0..n - 1 {
        for b in 0..n - 1 {
            mean += qinv.get(a, b) * second.get(a, b);
            for c in 0..n - 1 {
                for d in 0..n - 1 {
                    norm2 += qinv.get(a, c) * qinv.get(b, d) * second.get(a, b) * second.get(c, d);
                }
            }
        }
    }

    Ok(SurfaceFrame {
        point: x.to_vec(),
        r,
        normal,
        tangents,
        induced,
        second_form: second,
        mean_curvature: mean,
        second_form_norm2: norm2,
    })
}

/// The two conormal fields along the edge, from metric components alone:
/// `ϑ` (outward in the boundary plane) and `μ'` (outward in the hemisphere).
///
/// Both are independent of the tangent basis used for the Gram–Schmidt
/// projection, hence smooth along the edge.
pub fn edge_conormals(field: &MetricField, q: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = field.dimension();
    let g = SquareMatrix {
        n,
        data: field.components(q)?,
    };
    // Tangent space of the edge: first coordinate zero, orthogonal to q.
    let tau: Vec<Vec<f64>> = linalg::orthogonal_complement(&q[1..])
        .into_iter()
        .map(|t| {
            let mut full = Vec::with_capacity(n);
            full.push(0.0);
            full.extend(t);
            full
        })
        .collect();
    let basis = linalg::orthonormalize_g(&g, &tau)
        .ok_or_else(|| degenerate(q, "edge tangent space degenerates"))?;

    let r = linalg::norm(q);
    let radial: Vec<f64> = q.iter().map(|v| v / r).collect();
    let mut theta = linalg::gram_schmidt_g(&g, &radial, &basis)
        .ok_or_else(|| degenerate(q, "radial direction lies in the edge tangent space"))?;
    if linalg::dot(&theta, q) < 0.0 {
        theta = linalg::scale(&theta, -1.0);
    }

    let mut down = vec![0.0; n];
    down[0] = -1.0;
    let mut mu_prime = linalg::gram_schmidt_g(&g, &down, &basis)
        .ok_or_else(|| degenerate(q, "vertical direction lies in the edge tangent space"))?;
    if mu_prime[0] > 0.0 {
        mu_prime = linalg::scale(&mu_prime, -1.0);
    }
    Ok((theta, mu_prime))
}

/// Edge frame at a point with `x1 = 0` and `|x| = r`.
pub fn edge_frame(field: &MetricField, x: &[f64]) -> Result<EdgeFrame> {
    let n = field.dimension();
    if x[0] != 0.0 {
        return Err(Error::OutsideDomain {
            point: x.to_vec(),
            message: "edge frame needs x1 = 0".into(),
        });
    }
    let r = linalg::norm(x);
    let jet = field.jet(x)?;
    let gamma = christoffel(&jet)?;
    let g = jet.matrix();

    let tau: Vec<Vec<f64>> = linalg::orthogonal_complement(&x[1..])
        .into_iter()
        .map(|t| {
            let mut full = Vec::with_capacity(n);
            full.push(0.0);
            full.extend(t);
            full
        })
        .collect();
    let basis = linalg::orthonormalize_g(&g, &tau)
        .ok_or_else(|| degenerate(x, "edge tangent space degenerates"))?;
    let (theta, mu_prime) = edge_conormals(field, x)?;

    // Directional derivatives of the conormal fields along edge curves
    // gamma_B(t) = r * normalize(x + t tau_B), whose velocity at t = 0 is
    // exactly tau_B.
    let h = 1e-5 * r;
    let mut dtheta = Vec::with_capacity(tau.len());
    let mut dmu = Vec::with_capacity(tau.len());
    for t in &tau {
        let shift = |sign: f64| -> Result<(Vec<f64>, Vec<f64>)> {
            let mut y: Vec<f64> = x.iter().zip(t).map(|(xi, ti)| xi + sign * h * ti).collect();
            y[0] = 0.0;
            let scale = r / linalg::norm(&y);
            for v in y.iter_mut() {
                *v *= scale;
            }
            edge_conormals(field, &y)
        };
        let (tp, mp) = shift(1.0)?;
        let (tm, mm) = shift(-1.0)?;
        dtheta.push(
            tp.iter()
                .zip(&tm)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect::<Vec<f64>>(),
        );
        dmu.push(
            mp.iter()
                .zip(&mm)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect::<Vec<f64>>(),
        );
    }

    // Trace of g(∇_e V, e) over the g-orthonormal edge basis. Each basis
    // vector is a combination of the tau directions, so its directional
    // derivative combines the precomputed columns.
    let trace_with = |field_value: &[f64], dfield: &[Vec<f64>]| -> f64 {
        let mut total = 0.0;
        for e in &basis {
            let coeffs: Vec<f64> = tau.iter().map(|t| linalg::dot(e, t)).collect();
            let mut cov = vec![0.0; n];
            for k in 0..n {
                let mut s = 0.0;
                for (c, dcol) in coeffs.iter().zip(dfield) {
                    s += c * dcol[k];
                }
                for i in 0..n {
                    for j in 0..n {
                        s += gamma.get(k, i, j) * e[i] * field_value[j];
                    }
                }
                cov[k] = s;
            }
            total += jet.inner(&cov, e);
        }
        total
    };

    let mean_in_boundary = trace_with(&theta, &dtheta);
    let mean_in_surface = trace_with(&mu_prime, &dmu);
    let contact = jet.inner(&theta, &mu_prime);

    Ok(EdgeFrame {
        point: x.to_vec(),
        conormal_boundary: theta,
        conormal_surface: mu_prime,
        mean_curvature_in_surface: mean_in_surface,
        mean_curvature_in_boundary: mean_in_boundary,
        contact_cosine: contact,
    })
}

/// Christoffel symbols of the induced boundary metric `h_ab`, from the
/// tangential block of the jet (valid on `{x1 = 0}`).
pub fn boundary_christoffel(jet: &MetricJet) -> Result<Christoffel> {
    let n = jet.n;
    let h = SquareMatrix::from_fn(n - 1, |a, b| jet.g(a + 1, b + 1));
    let hinv = h.inverse_spd().ok_or_else(|| Error::SingularMetric {
        point: jet.point.clone(),
    })?;
    let mut data = vec![0.0; (n - 1) * (n - 1) * (n - 1)];
    for k in 0..n - 1 {
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let mut s = 0.0;
                for l in 0..n - 1 {
                    s += hinv.get(k, l)
                        * (jet.dg(l + 1, i + 1, j + 1) + jet.dg(l + 1, j + 1, i + 1)
                            - jet.dg(i + 1, j + 1, l + 1));
                }
                data[(k * (n - 1) + i) * (n - 1) + j] = 0.5 * s;
            }
        }
    }
    Ok(Christoffel::from_raw(n - 1, data))
}
