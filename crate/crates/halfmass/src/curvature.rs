//! Christoffel symbols and curvature from metric jets.
//!
//! Ricci curvature is assembled exactly from the jet: the derivative of the
//! Christoffel symbols only needs `g`, `dg` and `d2g`, so no third
//! derivatives of the metric are ever required.

use crate::linalg::SquareMatrix;
use crate::metric::{MetricField, MetricJet};
use crate::{Error, Result};

/// Christoffel symbols of the second kind, `gamma[k][i][j] = Γ^k_ij`.
#[derive(Debug, Clone)]
pub struct Christoffel {
    pub n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn from_raw(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n * n);
        Christoffel { n, data }
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }
}

/// `Γ^k_ij = ½ g^{kl} (g_li,j + g_lj,i - g_ij,l)`.
pub fn christoffel(jet: &MetricJet) -> Result<Christoffel> {
    let n = jet.n;
    let inv = jet.inverse()?;
    let mut data = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += inv.get(k, l) * (jet.dg(l, i, j) + jet.dg(l, j, i) - jet.dg(i, j, l));
                }
                data[(k * n + i) * n + j] = 0.5 * s;
            }
        }
    }
    Ok(Christoffel { n, data })
}

/// Pointwise curvature: Christoffel symbols, Ricci, scalar and Einstein
/// tensor `G = Rc - ½ R g`.
#[derive(Debug, Clone)]
pub struct CurvaturePack {
    pub n: usize,
    pub point: Vec<f64>,
    pub gamma: Christoffel,
    pub ricci: SquareMatrix,
    pub scalar: f64,
    pub einstein: SquareMatrix,
}

impl CurvaturePack {
    pub fn einstein_bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        self.einstein.bilinear(u, v)
    }
}

/// Curvature from a jet.
pub fn curvature_from_jet(jet: &MetricJet) -> Result<CurvaturePack> {
    let n = jet.n;
    let inv = jet.inverse()?;
    let gamma = christoffel(jet)?;

    // dGamma[k][i][j][m] = ∂_m Γ^k_ij, assembled from the inverse-metric
    // derivative ∂_m g^{kl} = -g^{ka} g^{lb} g_ab,m and the second
    // derivatives in the jet.
    let mut dinv = vec![0.0; n * n * n];
    for k in 0..n {
        for l in 0..n {
            for m in 0..n {
                let mut s = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        s -= inv.get(k, a) * inv.get(l, b) * jet.dg(a, b, m);
                    }
                }
                dinv[(k * n + l) * n + m] = s;
            }
        }
    }
    let dgamma = |k: usize, i: usize, j: usize, m: usize| -> f64 {
        let mut s = 0.0;
        for l in 0..n {
            let bracket = jet.dg(l, i, j) + jet.dg(l, j, i) - jet.dg(i, j, l);
            let dbracket = jet.d2g(l, i, j, m) + jet.d2g(l, j, i, m) - jet.d2g(i, j, l, m);
            s += dinv[(k * n + l) * n + m] * bracket + inv.get(k, l) * dbracket;
        }
        0.5 * s
    };

    // Rc_ij = ∂_k Γ^k_ij - ∂_i Γ^k_kj + Γ^k_km Γ^m_ij - Γ^k_im Γ^m_kj
    let mut ricci = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += dgamma(k, i, j, k) - dgamma(k, k, j, i);
                for m in 0..n {
                    s += gamma.get(k, k, m) * gamma.get(m, i, j)
                        - gamma.get(k, i, m) * gamma.get(m, k, j);
                }
            }
            ricci.set(i, j, s);
        }
    }
    // enforce exact symmetry against roundoff
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (ricci.get(i, j) + ricci.get(j, i));
            ricci.set(i, j, avg);
            ricci.set(j, i, avg);
        }
    }

    let mut scalar = 0.0;
    for i in 0..n {
        for j in 0..n {
            scalar += inv.get(i, j) * ricci.get(i, j);
        }
    }

    let einstein = SquareMatrix::from_fn(n, |i, j| ricci.get(i, j) - 0.5 * scalar * jet.g(i, j));

    Ok(CurvaturePack {
        n,
        point: jet.point.clone(),
        gamma,
        ricci,
        scalar,
        einstein,
    })
}

/// Curvature of a field at a point.
pub fn curvature_at(field: &MetricField, x: &[f64]) -> Result<CurvaturePack> {
    curvature_from_jet(&field.jet(x)?)
}

/// Leading asymptotic form `2 Rc_ij ≈ g_ki,kj + g_kj,ki - g_ij,kk - g_kk,ij`;
/// the difference to the exact Ricci decays at twice the metric rate.
pub fn linearized_ricci(jet: &MetricJet, i: usize, j: usize) -> f64 {
    let n = jet.n;
    let mut s = 0.0;
    for k in 0..n {
        s += jet.d2g(k, i, k, j) + jet.d2g(k, j, k, i) - jet.d2g(i, j, k, k) - jet.d2g(k, k, i, j);
    }
    0.5 * s
}

/// Covariant divergence `(div G)_j = g^{ik} ∇_i G_kj` of the Einstein tensor,
/// with `∂ G` taken by one extra central-difference layer of step `h`
/// (one-sided at the boundary face). Contracted Bianchi says this vanishes;
/// the returned vector measures how well the discrete chain closes.
pub fn einstein_divergence(field: &MetricField, x: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = field.dimension();
    let center = curvature_at(field, x)?;
    let jet = field.jet(x)?;
    let inv = jet.inverse()?;

    let pack_at = |y: &[f64]| curvature_at(field, y);
    let mut deinstein = vec![0.0; n * n * n]; // [k][j][i] = ∂_i G_kj
    for i in 0..n {
        let one_sided = i == 0 && x[0] < 2.0 * h;
        let (a, b, scale) = if one_sided {
            let mut xp = x.to_vec();
            xp[i] += h;
            let mut xpp = x.to_vec();
            xpp[i] += 2.0 * h;
            (pack_at(&xp)?, pack_at(&xpp)?, 1.0)
        } else {
            let mut xp = x.to_vec();
            xp[i] += h;
            let mut xm = x.to_vec();
            xm[i] -= h;
            (pack_at(&xp)?, pack_at(&xm)?, 0.0)
        };
        for k in 0..n {
            for j in 0..n {
                let d = if scale == 1.0 {
                    (-3.0 * center.einstein.get(k, j) + 4.0 * a.einstein.get(k, j)
                        - b.einstein.get(k, j))
                        / (2.0 * h)
                } else {
                    (a.einstein.get(k, j) - b.einstein.get(k, j)) / (2.0 * h)
                };
                deinstein[(k * n + j) * n + i] = d;
            }
        }
    }

    let mut div = vec![0.0; n];
    for j in 0..n {
        let mut s = 0.0;
        for i in 0..n {
            for k in 0..n {
                let mut cov = deinstein[(k * n + j) * n + i];
                for m in 0..n {
                    cov -= center.gamma.get(m, i, k) * center.einstein.get(m, j)
                        + center.gamma.get(m, i, j) * center.einstein.get(k, m);
                }
                s += inv.get(i, k) * cov;
            }
        }
        div[j] = s;
    }
    Ok(div)
}

/// Largest absolute Einstein-tensor entry, a convenient curvature scale.
pub fn einstein_scale(pack: &CurvaturePack) -> f64 {
    pack.einstein
        .data
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max)
}

/// Residual of the position field `X = x^i ∂_i` being conformal Killing:
/// the largest entry of `L_X g - (2/n) div X g`, relative to `|g|`.
pub fn conformal_killing_residual(field: &MetricField, x: &[f64]) -> Result<f64> {
    let n = field.dimension();
    let jet = field.jet(x)?;
    let gamma = christoffel(&jet)?;
    // div X = ∂_i x^i + Γ^i_ik x^k
    let mut divx = n as f64;
    for i in 0..n {
        for k in 0..n {
            divx += gamma.get(i, i, k) * x[k];
        }
    }
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            // (L_X g)_ij = x^k g_ij,k + g_kj ∂_i x^k + g_ik ∂_j x^k
            let mut lie = 2.0 * jet.g(i, j);
            for k in 0..n {
                lie += x[k] * jet.dg(i, j, k);
            }
            let residual = lie - 2.0 / n as f64 * divx * jet.g(i, j);
            worst = worst.max(residual.abs());
            scale = scale.max(jet.g(i, j).abs());
        }
    }
    Ok(worst / scale)
}

/// Checked variant returning an error when the residual exceeds `threshold`.
pub fn require_conformal_killing(field: &MetricField, x: &[f64], threshold: f64) -> Result<()> {
    let residual = conformal_killing_residual(field, x)?;
    if residual > threshold {
        return Err(Error::ConformalKillingViolation {
            residual,
            threshold,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{GraphSpec, MetricField, Profile};
    use approx::assert_relative_eq;

    #[test]
    fn flat_curvature_vanishes() {
        let f = MetricField::flat(3).unwrap();
        let pack = curvature_at(&f, &[1.0, 2.0, 0.5]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(pack.ricci.get(i, j), 0.0);
                assert_eq!(pack.einstein.get(i, j), 0.0);
                for k in 0..3 {
                    assert_eq!(pack.gamma.get(k, i, j), 0.0);
                }
            }
        }
        assert_eq!(pack.scalar, 0.0);
    }

    #[test]
    fn conformal_christoffel_hand_formula() {
        // g = psi δ has Γ^k_ij = (δ_ik ψ_j + δ_jk ψ_i - δ_ij ψ_k) / (2 ψ).
        let a = 0.8;
        let tau = 1.0;
        let f = MetricField::conformal_perturbation(3, a, tau).unwrap();
        for x in [[1.0, 2.0, -0.5], [0.0, 3.0, 1.0], [2.5, 0.1, 0.7]] {
            let jet = f.jet(&x).unwrap();
            let gamma = christoffel(&jet).unwrap();
            let r = (x.iter().map(|v| v * v).sum::<f64>()).sqrt();
            let q = 1.0 + r * r;
            let psi = 1.0 + a * q.powf(-tau / 2.0);
            let dpsi = -a * tau * q.powf(-tau / 2.0 - 1.0); // times r x_k / r = x_k
            let grad: Vec<f64> = x.iter().map(|xi| dpsi * xi).collect();
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                        let expect = (d(i, k) * grad[j] + d(j, k) * grad[i] - d(i, j) * grad[k])
                            / (2.0 * psi);
                        assert_relative_eq!(gamma.get(k, i, j), expect, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn christoffel_is_symmetric() {
        let f = MetricField::graph(
            GraphSpec::new(3, Profile::SmoothedInverseRadius { amplitude: 0.6 }).unwrap(),
        )
        .unwrap();
        let jet = f.jet(&[0.5, 2.0, 1.0, -1.5]).unwrap();
        let gamma = christoffel(&jet).unwrap();
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(gamma.get(k, i, j), gamma.get(k, j, i));
                }
            }
        }
    }

    #[test]
    fn half_schwarzschild_is_scalar_flat() {
        let f = MetricField::half_schwarzschild(3, 1.0).unwrap();
        for x in [[0.0, 2.0, 0.0], [1.0, 1.0, 1.0], [3.0, -4.0, 0.5]] {
            let pack = curvature_at(&f, &x).unwrap();
            assert!(
                pack.scalar.abs() < 1e-10,
                "scalar curvature {} at {:?}",
                pack.scalar,
                x
            );
        }
    }

    #[test]
    fn trace_identity_holds() {
        // g^{ij} G_ij = (1 - n/2) R
        let f = MetricField::conformal_perturbation(4, 1.5, 1.2).unwrap();
        let x = [1.0, 2.0, 0.5, -1.0];
        let jet = f.jet(&x).unwrap();
        let inv = jet.inverse().unwrap();
        let pack = curvature_at(&f, &x).unwrap();
        let mut trace = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                trace += inv.get(i, j) * pack.einstein.get(i, j);
            }
        }
        assert_relative_eq!(
            trace,
            -1.0 * pack.scalar,
            epsilon = 1e-12 * pack.scalar.abs()
        );
    }

    #[test]
    fn graph_interior_is_flat() {
        // The graph metric is induced from a flat region, so Ricci vanishes.
        let f = MetricField::graph(
            GraphSpec::new(3, Profile::SmoothedInverseRadius { amplitude: 0.5 }).unwrap(),
        )
        .unwrap();
        for x in [[0.0, 2.0, 1.0, 0.5], [1.5, 1.0, -2.0, 0.3]] {
            let pack = curvature_at(&f, &x).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert!(
                        pack.ricci.get(i, j).abs() < 1e-6,
                        "Ricci {} at {:?}",
                        pack.ricci.get(i, j),
                        x
                    );
                }
            }
        }
    }

    #[test]
    fn linearized_ricci_tracks_exact_ricci() {
        let f = MetricField::conformal_perturbation(3, 1.0, 1.0).unwrap();
        let x = [0.0, 60.0, 0.0];
        let jet = f.jet(&x).unwrap();
        let pack = curvature_at(&f, &x).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let lin = linearized_ricci(&jet, i, j);
                // difference is quadratic in the perturbation
                assert!((pack.ricci.get(i, j) - lin).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn einstein_divergence_is_small() {
        let f = MetricField::conformal_perturbation(3, 1.0, 1.0).unwrap();
        for x in [[2.0, 3.0, 1.0], [0.0, 5.0, 2.0]] {
            let pack = curvature_at(&f, &x).unwrap();
            let scale = einstein_scale(&pack).max(1e-12);
            let div = einstein_divergence(&f, &x, 1e-4).unwrap();
            for component in &div {
                assert!(
                    component.abs() <= 1e-4 * scale,
                    "divergence {component} vs scale {scale} at {x:?}"
                );
            }
        }
    }

    #[test]
    fn position_field_conformal_killing_classification() {
        let conformal = MetricField::conformal_perturbation(3, 1.0, 1.0).unwrap();
        let res = conformal_killing_residual(&conformal, &[1.0, 2.0, 2.0]).unwrap();
        assert!(res < 1e-12);

        let graph = MetricField::graph(
            GraphSpec::new(3, Profile::SmoothedInverseRadius { amplitude: 0.8 }).unwrap(),
        )
        .unwrap();
        let res = conformal_killing_residual(&graph, &[1.0, 2.0, 2.0, 0.0]).unwrap();
        assert!(res > 1e-6);
        assert!(require_conformal_killing(&graph, &[1.0, 2.0, 2.0, 0.0], 1e-8).is_err());
    }
}
