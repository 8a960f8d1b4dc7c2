//! Eigenpairs of the Dirichlet problem.
//!
//! Two independent routes produce one-dimensional eigenvalues: the grid
//! operator's symmetric tridiagonal eigensolve ([`spectrum_1d`]) and exact
//! shooting on the time scale itself ([`shooting::eigen_shooting`]). They are
//! exposed behind [`EigenRoute`] so callers can pick one by name.

pub mod shooting;
pub mod tensor;
pub mod tridiagonal;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::operator::{assemble, weighted_inner};
use crate::timescale::{Grid, GridFunction, MeshParams, TimeScale};

pub use shooting::{eigen_shooting, shoot};
pub use tensor::{tensor_spectrum, TensorEntry, TensorSpectrum};
pub use tridiagonal::{eigen_symmetric_tridiagonal, symmetrize, SymmetricTridiagonal};

/// Above this many interior points, partial spectra use inverse iteration
/// instead of a full QL decomposition with vectors.
const FULL_DECOMPOSITION_LIMIT: usize = 400;

/// Eigenvalues and weight-orthonormal eigenfunctions on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    grid: Arc<Grid>,
    eigenvalues: Vec<f64>,
    eigenfunctions: Vec<GridFunction>,
}

impl Spectrum1D {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenfunctions(&self) -> &[GridFunction] {
        &self.eigenfunctions
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// True when every interior mode is present.
    pub fn is_complete(&self) -> bool {
        self.len() == self.grid.interior_len()
    }

    /// Interior values of mode `k` (0-based).
    pub(crate) fn mode_interior(&self, k: usize) -> &[f64] {
        self.eigenfunctions[k].interior()
    }
}

/// Eigenpairs of the grid operator: all of them, or the `modes` smallest.
pub fn spectrum_1d(grid: impl Into<Arc<Grid>>, modes: Option<usize>) -> Result<Spectrum1D> {
    let grid = grid.into();
    let op = assemble(grid.clone())?;
    let s = symmetrize(&op);
    let n = s.len();
    let k = modes.unwrap_or(n).min(n);
    if k == 0 {
        return Err(Error::Precondition(
            "at least one mode must be requested".into(),
        ));
    }
    let eig = if k == n || n <= FULL_DECOMPOSITION_LIMIT {
        let mut full = eigen_symmetric_tridiagonal(&s)?;
        full.values.truncate(k);
        full.vectors.truncate(k);
        full
    } else {
        tridiagonal::lowest_eigenpairs(&s, k)?
    };

    let w = op.weight();
    let eigenfunctions = eig
        .vectors
        .into_iter()
        .map(|v| {
            let mut phi: Vec<f64> = v.iter().zip(w).map(|(x, wi)| x / wi.sqrt()).collect();
            fix_sign(&mut phi);
            GridFunction::from_interior(grid.clone(), &phi)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum1D {
        grid,
        eigenvalues: eig.values,
        eigenfunctions,
    })
}

/// First clearly nonzero component positive.
fn fix_sign(phi: &mut [f64]) {
    let scale = phi.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if let Some(&first) = phi.iter().find(|v| v.abs() > 1e-8 * scale) {
        if first < 0.0 {
            phi.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// Coefficients `c_k = ⟨f, φ_k⟩`.
pub fn expand(spec: &Spectrum1D, f: &GridFunction) -> Result<Vec<f64>> {
    spec.eigenfunctions
        .iter()
        .map(|phi| weighted_inner(f, phi))
        .collect()
}

/// `Σ c_k φ_k`.
pub fn reconstruct(spec: &Spectrum1D, coeffs: &[f64]) -> Result<GridFunction> {
    if coeffs.len() != spec.len() {
        return Err(Error::Precondition(format!(
            "{} coefficients for {} modes",
            coeffs.len(),
            spec.len()
        )));
    }
    let mut values = vec![0.0; spec.grid.len()];
    for (c, phi) in coeffs.iter().zip(&spec.eigenfunctions) {
        values
            .iter_mut()
            .zip(phi.values())
            .for_each(|(v, p)| *v += c * p);
    }
    GridFunction::new(spec.grid.clone(), values)
}

/// `Σ_i 4/(b_i - a_i)²`, a lower bound on the first eigenvalue of the
/// product domain.
pub fn lambda1_lower_bound(axes: &[TimeScale]) -> f64 {
    axes.iter().map(|t| 4.0 / (t.width() * t.width())).sum()
}

/// Same bound from grid extents.
pub fn lambda1_lower_bound_grids(axes: &[Arc<Grid>]) -> f64 {
    axes.iter().map(|g| 4.0 / (g.width() * g.width())).sum()
}

/// A way of computing the lowest eigenvalues of a one-dimensional time scale.
pub trait EigenRoute: Send + Sync {
    fn name(&self) -> &'static str;

    fn eigenvalues(&self, ts: &TimeScale, count: usize) -> Result<Vec<f64>>;
}

/// Discretize, assemble, and eigensolve the grid operator.
#[derive(Debug, Clone)]
pub struct MatrixRoute {
    pub mesh: MeshParams,
}

impl EigenRoute for MatrixRoute {
    fn name(&self) -> &'static str {
        "matrix"
    }

    fn eigenvalues(&self, ts: &TimeScale, count: usize) -> Result<Vec<f64>> {
        let grid = ts.discretize(&self.mesh)?;
        let op = assemble(Arc::new(grid))?;
        let mut values = tridiagonal::eigenvalues_symmetric_tridiagonal(&symmetrize(&op))?;
        values.truncate(count);
        Ok(values)
    }
}

/// Exact shooting; no mesh involved.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShootingRoute;

impl EigenRoute for ShootingRoute {
    fn name(&self) -> &'static str {
        "shooting"
    }

    fn eigenvalues(&self, ts: &TimeScale, count: usize) -> Result<Vec<f64>> {
        eigen_shooting(ts, count)
    }
}

pub const EIGEN_ROUTES: &[&str] = &["matrix", "shooting"];

/// Looks up an eigenvalue route by name. `mesh` is used by mesh-based routes.
pub fn eigen_route(name: &str, mesh: &MeshParams) -> Result<Box<dyn EigenRoute>> {
    match name {
        "matrix" => Ok(Box::new(MatrixRoute { mesh: mesh.clone() })),
        "shooting" => Ok(Box::new(ShootingRoute)),
        _ => Err(Error::UnknownStrategy {
            kind: "eigenvalue route",
            name: name.to_string(),
            available: EIGEN_ROUTES.join(", "),
        }),
    }
}
