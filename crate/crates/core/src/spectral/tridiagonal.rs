//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson shifts) and
//! inverse iteration for selected eigenvectors.

use crate::error::{Error, Result};
use crate::operator::DirichletOperator1D;

const MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTridiagonal {
    /// Main diagonal, length `n`.
    pub diag: Vec<f64>,
    /// Off-diagonal `S[i][i+1] = S[i+1][i]`, length `n - 1`.
    pub off: Vec<f64>,
}

impl SymmetricTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Precondition(format!(
                "tridiagonal with {} diagonal and {} off-diagonal entries",
                diag.len(),
                off.len()
            )));
        }
        Ok(SymmetricTridiagonal { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.off[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }
}

/// Similarity transform `S = W^{1/2} A W^{-1/2}` of the weighted Dirichlet
/// operator into a Euclidean-symmetric tridiagonal matrix.
pub fn symmetrize(op: &DirichletOperator1D) -> SymmetricTridiagonal {
    let w = op.weight();
    let off = (0..op.size().saturating_sub(1))
        .map(|r| op.sup()[r] * (w[r] / w[r + 1]).sqrt())
        .collect();
    SymmetricTridiagonal {
        diag: op.diag().to_vec(),
        off,
    }
}

/// Eigen-decomposition with eigenvalues ascending; `vectors[k]` is the
/// unit-norm eigenvector of `values[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

pub fn eigen_symmetric_tridiagonal(s: &SymmetricTridiagonal) -> Result<TridiagonalEigen> {
    let n = s.len();
    let mut vectors: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut d = s.diag.clone();
    let mut e = s.off.clone();
    e.push(0.0);
    implicit_ql(&mut d, &mut e, Some(&mut vectors))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order
        .into_iter()
        .map(|i| std::mem::take(&mut vectors[i]))
        .collect();
    Ok(TridiagonalEigen { values, vectors })
}

/// All eigenvalues, ascending, without vectors. Quadratic cost.
pub fn eigenvalues_symmetric_tridiagonal(s: &SymmetricTridiagonal) -> Result<Vec<f64>> {
    let mut d = s.diag.clone();
    let mut e = s.off.clone();
    e.push(0.0);
    implicit_ql(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// The `k` smallest eigenpairs: eigenvalues by QL, vectors by inverse
/// iteration with re-orthogonalisation.
pub fn lowest_eigenpairs(s: &SymmetricTridiagonal, k: usize) -> Result<TridiagonalEigen> {
    let all = eigenvalues_symmetric_tridiagonal(s)?;
    let k = k.min(all.len());
    let scale = s.norm().max(f64::MIN_POSITIVE);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    for &lambda in &all[..k] {
        let v = inverse_iteration(s, lambda, scale, &vectors)?;
        vectors.push(v);
    }
    Ok(TridiagonalEigen {
        values: all[..k].to_vec(),
        vectors,
    })
}

fn inverse_iteration(
    s: &SymmetricTridiagonal,
    lambda: f64,
    scale: f64,
    previous: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let n = s.len();
    let lu = PivotedTridiagonalLu::factor(s, lambda, scale * f64::EPSILON);
    // Deterministic, generic start vector.
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.1 * ((i * 7 + 3) % 11) as f64)
        .collect();
    for _ in 0..4 {
        lu.solve(&mut x);
        for p in previous {
            let dot: f64 = p.iter().zip(&x).map(|(a, b)| a * b).sum();
            x.iter_mut().zip(p).for_each(|(xi, pi)| *xi -= dot * pi);
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Numerical("inverse iteration broke down".into()));
        }
        x.iter_mut().for_each(|v| *v /= norm);
    }
    Ok(x)
}

/// LU factors of `S - shift·I` with partial pivoting.
struct PivotedTridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedTridiagonalLu {
    fn factor(s: &SymmetricTridiagonal, shift: f64, tiny: f64) -> Self {
        let n = s.len();
        let mut dl = s.off.clone();
        let mut d: Vec<f64> = s.diag.iter().map(|v| v - shift).collect();
        let mut du = s.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if let Some(last) = d.last_mut() {
            if *last == 0.0 {
                *last = tiny;
            }
        }
        PivotedTridiagonalLu {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            if i + 1 < n {
                acc -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                acc -= self.du2[i] * b[i + 2];
            }
            b[i] = acc / self.d[i];
        }
    }
}

/// Implicit QL on `(d, e)` where `e[i]` couples `d[i]` and `d[i+1]` and
/// `e[n-1] = 0`. Rotations are accumulated into `z` when given.
fn implicit_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Vec<Vec<f64>>>) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::Numerical(format!(
                    "QL iteration did not converge for eigenvalue {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    let (left, right) = z.split_at_mut(i + 1);
                    let (zi, zi1) = (&mut left[i], &mut right[0]);
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let t = *b;
                        *b = s * *a + c * t;
                        *a = c * *a - s * t;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
