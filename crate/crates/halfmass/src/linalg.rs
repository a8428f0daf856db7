//! Small dense linear algebra for metric components.
//!
//! Dimensions are tiny (n <= 6), so everything is flat `Vec<f64>` in
//! row-major order with no attempt at clever blocking.

/// Row-major `n x n` matrix view helpers.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Cholesky factor `L` with `L L^T = self`, or `None` if the matrix is
    /// not (numerically) symmetric positive definite.
    pub fn cholesky(&self) -> Option<SquareMatrix> {
        let n = self.n;
        let mut l = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return None;
                    }
                    l.set(i, j, s.sqrt());
                } else {
                    l.set(i, j, s / l.get(j, j));
                }
            }
        }
        Some(l)
    }

    /// Determinant via Cholesky; requires positive definiteness.
    pub fn det_spd(&self) -> Option<f64> {
        let l = self.cholesky()?;
        let mut d = 1.0;
        for i in 0..self.n {
            d *= l.get(i, i);
        }
        Some(d * d)
    }

    /// Inverse via Cholesky; requires positive definiteness.
    pub fn inverse_spd(&self) -> Option<SquareMatrix> {
        let n = self.n;
        let l = self.cholesky()?;
        let mut inv = SquareMatrix::zeros(n);
        // Solve L L^T x = e_j column by column.
        let mut y = vec![0.0; n];
        for j in 0..n {
            for i in 0..n {
                let mut s = if i == j { 1.0 } else { 0.0 };
                for k in 0..i {
                    s -= l.get(i, k) * y[k];
                }
                y[i] = s / l.get(i, i);
            }
            for i in (0..n).rev() {
                let mut s = y[i];
                for k in i + 1..n {
                    s -= l.get(k, i) * inv.get(k, j);
                }
                inv.set(i, j, s / l.get(i, i));
            }
        }
        Some(inv)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += self.get(i, j) * v[j];
            }
            out[i] = s;
        }
        out
    }

    /// Bilinear form `u^T M v`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += u[i] * self.get(i, j) * v[j];
            }
        }
        s
    }
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

pub fn scale(u: &[f64], s: f64) -> Vec<f64> {
    u.iter().map(|a| a * s).collect()
}

pub fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn sub(u: &[f64], v: &[f64]) -> Vec<f64> {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

/// Orthonormal basis of the Euclidean orthogonal complement of `x`.
///
/// Built from the Householder reflection that maps `x/|x|` to a coordinate
/// axis; the images of the remaining axes span the complement. Deterministic
/// and well conditioned for every nonzero `x`.
pub fn orthogonal_complement(x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let r = norm(x);
    assert!(r > 0.0, "orthogonal_complement of the zero vector");
    let u = scale(x, 1.0 / r);
    // Axis most aligned with u, sign chosen to avoid cancellation.
    let (axis, _) = u
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .unwrap();
    let sign = if u[axis] >= 0.0 { 1.0 } else { -1.0 };
    // Householder vector w = u + sign*e_axis, reflection H = I - 2 w w^T/|w|^2.
    let mut w = u.clone();
    w[axis] += sign;
    let wn2 = dot(&w, &w);
    let mut basis = Vec::with_capacity(n - 1);
    for k in 0..n {
        if k == axis {
            continue;
        }
        // H e_k
        let coeff = 2.0 * w[k] / wn2;
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        axpy(&mut v, -coeff, &w);
        basis.push(v);
    }
    basis
}

/// Gram–Schmidt step: make `v` g-orthogonal to the (g-orthonormal) `basis`,
/// then g-normalize. Returns `None` when the residual is negligibly small.
pub fn gram_schmidt_g(g: &SquareMatrix, v: &[f64], basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    let mut w = v.to_vec();
    for b in basis {
        let c = g.bilinear(&w, b);
        axpy(&mut w, -c, b);
    }
    let nrm2 = g.bilinear(&w, &w);
    if nrm2 <= 1e-24 * g.bilinear(v, v).max(1.0) {
        return None;
    }
    Some(scale(&w, 1.0 / nrm2.sqrt()))
}

/// g-orthonormalize a list of independent vectors in place (modified GS).
pub fn orthonormalize_g(g: &SquareMatrix, vectors: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let e = gram_schmidt_g(g, v, &out)?;
        out.push(e);
    }
    Some(out)
}
