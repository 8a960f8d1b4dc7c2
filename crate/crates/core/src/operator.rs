//! The one-dimensional Dirichlet operator `A = -(·)^{∇Δ}` on a grid.
//!
//! Boundary values are eliminated, so the operator acts on the interior
//! points `1..m` only. Row `i` reads
//!
//! ```text
//!   (Au)_i = [ (u_i - u_{i-1})/ν_i - (u_{i+1} - u_i)/μ_i ] / w_i
//! ```
//!
//! with `w_i` the grid weight (equal to `μ_i` on discrete time scales), so
//! `diag(w)·A` is the symmetric stiffness matrix and `A` is self-adjoint in
//! the weighted inner product.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::timescale::{Grid, GridFunction};

/// Relative size a boundary value may have before `apply` rejects it.
const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletOperator1D {
    grid: Arc<Grid>,
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    weight: Vec<f64>,
}

/// Assembles the Dirichlet operator; needs at least one interior point.
pub fn assemble(grid: Arc<Grid>) -> Result<DirichletOperator1D> {
    if grid.len() < 3 {
        return Err(Error::EmptyInterior);
    }
    let n = grid.interior_len();
    let mut sub = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    let mut sup = Vec::with_capacity(n);
    let mut weight = Vec::with_capacity(n);
    for i in grid.interior() {
        let (mu, nu, w) = (grid.mu(i), grid.nu(i), grid.weights()[i]);
        sub.push(-1.0 / (nu * w));
        diag.push((1.0 / mu + 1.0 / nu) / w);
        sup.push(-1.0 / (mu * w));
        weight.push(w);
    }
    Ok(DirichletOperator1D {
        grid,
        sub,
        diag,
        sup,
        weight,
    })
}

impl DirichletOperator1D {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Coupling of interior row `r` to its left neighbour (the boundary for `r = 0`).
    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Coupling of interior row `r` to its right neighbour (the boundary for the last row).
    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    /// Weights of the interior points.
    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    /// `A` applied to a vector of interior values.
    pub fn apply_interior(&self, x: &[f64]) -> Vec<f64> {
        let n = self.size();
        debug_assert_eq!(x.len(), n);
        (0..n)
            .map(|r| {
                let mut acc = self.diag[r] * x[r];
                if r > 0 {
                    acc += self.sub[r] * x[r - 1];
                }
                if r + 1 < n {
                    acc += self.sup[r] * x[r + 1];
                }
                acc
            })
            .collect()
    }

    /// Applies `A` to a function vanishing on the boundary.
    pub fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        self.check_grid(u)?;
        let vals = u.values();
        let scale = vals.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let (ua, ub) = (vals[0], vals[vals.len() - 1]);
        if ua.abs() > BOUNDARY_TOL * scale || ub.abs() > BOUNDARY_TOL * scale {
            return Err(Error::Precondition(format!(
                "boundary values must vanish, got u(a) = {ua}, u(b) = {ub}"
            )));
        }
        let inner = self.apply_interior(u.interior());
        GridFunction::from_interior(self.grid.clone(), &inner)
    }

    fn check_grid(&self, u: &GridFunction) -> Result<()> {
        if Arc::ptr_eq(u.grid(), &self.grid) || **u.grid() == *self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Solves `(A + diag(shift)) x = rhs` on the interior by elimination.
    /// Returns `None` when a pivot vanishes.
    pub fn solve_shifted(&self, shift: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
        let diag: Vec<f64> = self.diag.iter().zip(shift).map(|(d, s)| d + s).collect();
        thomas(&self.sub, &diag, &self.sup, rhs)
    }

    /// Quadratic form `⟨Ay, y⟩` computed as the ∇-energy `Σ (y^∇)² ν`.
    pub fn energy(&self, y: &GridFunction) -> f64 {
        let g = &self.grid;
        y.values()
            .windows(2)
            .zip(g.gaps())
            .map(|(w, &h)| {
                let d = (w[1] - w[0]) / h;
                d * d * h
            })
            .sum()
    }
}

/// Tridiagonal elimination; `sub[0]` and `sup[n-1]` are ignored.
pub(crate) fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return None;
    }
    c[0] = if n > 1 { sup[0] / pivot } else { 0.0 };
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - sub[i] * c[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return None;
        }
        c[i] = if i + 1 < n { sup[i] / pivot } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

/// `Σ u_i v_i w_i` with the grid weights.
pub fn weighted_inner(u: &GridFunction, v: &GridFunction) -> Result<f64> {
    if !u.same_grid(v) {
        return Err(Error::GridMismatch);
    }
    Ok(u.values()
        .iter()
        .zip(v.values())
        .zip(u.grid().weights())
        .map(|((a, b), w)| a * b * w)
        .sum())
}

pub fn weighted_norm(u: &GridFunction) -> f64 {
    u.values()
        .iter()
        .zip(u.grid().weights())
        .map(|(a, w)| a * a * w)
        .sum::<f64>()
        .sqrt()
}

/// Green's function of the Dirichlet problem on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenKernel {
    pub a: f64,
    pub b: f64,
}

impl GreenKernel {
    pub fn new(a: f64, b: f64) -> Self {
        GreenKernel { a, b }
    }

    pub fn eval(&self, t: f64, s: f64) -> f64 {
        let (a, b) = (self.a, self.b);
        if t <= s {
            (t - a) * (b - s) / (b - a)
        } else {
            (s - a) * (b - t) / (b - a)
        }
    }

    /// Upper bound `(b - a)/4`, attained on the diagonal at the midpoint.
    pub fn max_value(&self) -> f64 {
        (self.b - self.a) / 4.0
    }
}

/// `A⁻¹f` as the weighted quadrature `y_i = Σ_j G(t_i, t_j) f_j w_j`.
///
/// The kernel is piecewise linear with a unit slope jump on the diagonal, so
/// this quadrature inverts the grid operator exactly. Cost is quadratic in
/// the number of points.
pub fn green_inverse(op: &DirichletOperator1D, f: &GridFunction) -> Result<GridFunction> {
    op.check_grid(f)?;
    let grid = op.grid();
    let kernel = GreenKernel::new(grid.a(), grid.b());
    let pts = grid.points();
    let w = grid.weights();
    let fv = f.values();
    let mut y = vec![0.0; grid.len()];
    for i in grid.interior() {
        y[i] = pts
            .iter()
            .zip(fv)
            .zip(w)
            .map(|((&s, &fj), &wj)| kernel.eval(pts[i], s) * fj * wj)
            .sum();
    }
    GridFunction::new(grid.clone(), y)
}

/// Solves `Au = f` (interior values of `f`) with Dirichlet zeros by elimination.
pub fn tridiag_solve(op: &DirichletOperator1D, f: &GridFunction) -> Result<GridFunction> {
    op.check_grid(f)?;
    let x = thomas(&op.sub, &op.diag, &op.sup, f.interior())
        .expect("Dirichlet operator is positive definite; a zero pivot means a bad assembly");
    GridFunction::from_interior(op.grid().clone(), &x)
}
