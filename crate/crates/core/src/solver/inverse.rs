//! Realizations of `A⁻¹` on interior vectors.

use std::sync::Arc;

use super::Discretization;
use crate::error::{Error, Result};
use crate::operator::{assemble, thomas, DirichletOperator1D, GreenKernel};
use crate::product::ProductFunction;
use crate::spectral::tensor::{forward_transform, inverse_transform};
use crate::spectral::{spectrum_1d, Spectrum1D};
use crate::timescale::Grid;

pub trait LinearInverse: Send + Sync {
    fn name(&self) -> &'static str;

    /// Interior solution of `Ax = rhs` with Dirichlet zeros.
    fn solve(&self, rhs: &[f64]) -> Vec<f64>;
}

/// Kronecker-sum diagonalization: transform to the tensor eigenbasis one
/// axis at a time, divide by `Σ λ_{p_i}`, transform back.
#[derive(Debug, Clone)]
pub struct SpectralInverse {
    spectra: Vec<Spectrum1D>,
    shape: Vec<usize>,
    denominators: Vec<f64>,
}

impl SpectralInverse {
    pub fn new(axes: &[Arc<Grid>]) -> Result<Self> {
        let spectra = axes
            .iter()
            .map(|g| spectrum_1d(g.clone(), None))
            .collect::<Result<Vec<_>>>()?;
        Self::from_spectra(spectra)
    }

    pub fn from_spectra(spectra: Vec<Spectrum1D>) -> Result<Self> {
        if spectra.is_empty() || !spectra.iter().all(Spectrum1D::is_complete) {
            return Err(Error::Precondition(
                "the spectral inverse needs every interior mode on every axis".into(),
            ));
        }
        let shape: Vec<usize> = spectra.iter().map(Spectrum1D::len).collect();
        let denominators = spectra.iter().fold(vec![0.0], |acc, s| {
            acc.iter()
                .flat_map(|&a| s.eigenvalues().iter().map(move |&l| a + l))
                .collect()
        });
        Ok(SpectralInverse {
            spectra,
            shape,
            denominators,
        })
    }

    pub fn spectra(&self) -> &[Spectrum1D] {
        &self.spectra
    }
}

impl LinearInverse for SpectralInverse {
    fn name(&self) -> &'static str {
        "spectral"
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut c = forward_transform(&self.spectra, rhs, &self.shape);
        c.iter_mut()
            .zip(&self.denominators)
            .for_each(|(v, d)| *v /= d);
        inverse_transform(&self.spectra, &c, &self.shape)
    }
}

/// `A⁻¹f` on the product grid from complete per-axis spectra.
pub fn spectral_inverse(spectra: &[Spectrum1D], f: &ProductFunction) -> Result<ProductFunction> {
    let inv = SpectralInverse::from_spectra(spectra.to_vec())?;
    let grids: Vec<Arc<Grid>> = spectra.iter().map(|s| s.grid().clone()).collect();
    if f.grid().axes() != grids.as_slice() {
        return Err(Error::GridMismatch);
    }
    ProductFunction::from_interior(f.grid().clone(), &inv.solve(&f.interior_values()))
}

/// Direct elimination; one axis only.
#[derive(Debug, Clone)]
pub struct TridiagonalInverse {
    op: DirichletOperator1D,
}

impl TridiagonalInverse {
    pub fn new(grid: Arc<Grid>) -> Result<Self> {
        Ok(TridiagonalInverse {
            op: assemble(grid)?,
        })
    }
}

impl LinearInverse for TridiagonalInverse {
    fn name(&self) -> &'static str {
        "tridiagonal"
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        thomas(self.op.sub(), self.op.diag(), self.op.sup(), rhs)
            .expect("Dirichlet operator is positive definite")
    }
}

/// Weighted Green's-kernel quadrature; one axis only, quadratic cost.
#[derive(Debug, Clone)]
pub struct GreenInverse {
    grid: Arc<Grid>,
}

impl GreenInverse {
    pub fn new(grid: Arc<Grid>) -> Self {
        GreenInverse { grid }
    }
}

impl LinearInverse for GreenInverse {
    fn name(&self) -> &'static str {
        "green"
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let kernel = GreenKernel::new(g.a(), g.b());
        let pts = &g.points()[1..g.len() - 1];
        let w = &g.weights()[1..g.len() - 1];
        pts.iter()
            .map(|&t| {
                pts.iter()
                    .zip(rhs)
                    .zip(w)
                    .map(|((&s, f), wj)| kernel.eval(t, s) * f * wj)
                    .sum()
            })
            .collect()
    }
}

pub const LINEAR_INVERSES: &[&str] = &["auto", "spectral", "tridiagonal", "green"];

/// Looks up an inverse by name. "auto" is elimination in 1D and the
/// spectral inverse otherwise.
pub fn linear_inverse(name: &str, disc: &Discretization) -> Result<Box<dyn LinearInverse>> {
    let axes = disc.grid().axes();
    let one_axis = |kind: &str| {
        if axes.len() == 1 {
            Ok(axes[0].clone())
        } else {
            Err(Error::Precondition(format!(
                "the {kind} inverse handles one axis only"
            )))
        }
    };
    match name {
        "auto" if axes.len() == 1 => Ok(Box::new(TridiagonalInverse::new(axes[0].clone())?)),
        "auto" | "spectral" => Ok(Box::new(SpectralInverse::new(axes)?)),
        "tridiagonal" => Ok(Box::new(TridiagonalInverse::new(one_axis(name)?)?)),
        "green" => Ok(Box::new(GreenInverse::new(one_axis(name)?))),
        _ => Err(Error::UnknownStrategy {
            kind: "linear inverse",
            name: name.to_string(),
            available: LINEAR_INVERSES.join(", "),
        }),
    }
}
