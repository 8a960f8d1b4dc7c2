//! Nonlinear Dirichlet problems `Au + F(u) = 0` on product domains.
//!
//! `A` is the n-dimensional operator `-Δ_T` and `F` the Nemytskii operator
//! of the nonlinearity. Solution methods implement [`Method`] and are looked
//! up by name with [`method`]; linear solves with `A` go through a
//! [`LinearInverse`] chosen the same way.

mod dense;
mod enumerate;
mod homotopy;
mod inverse;
mod picard;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::nonlinearity::{estimate_lipschitz, nemytskii_interior, Expression, GrowthHypotheses};
use crate::product::{interior_norm, ProductFunction, ProductGrid, ProductOperator};
use crate::spectral::{lambda1_lower_bound_grids, spectrum_1d};
use crate::timescale::{MeshParams, TimeScale};

pub use dense::solve_dense;
pub use enumerate::{enumerate_small, Enumeration, ENUMERATION_MAX_UNKNOWNS};
pub use homotopy::homotopy_solve;
pub use inverse::{
    linear_inverse, spectral_inverse, GreenInverse, LinearInverse, SpectralInverse,
    TridiagonalInverse, LINEAR_INVERSES,
};
pub use picard::picard_solve;

pub const MAX_DIMENSION: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    Zero,
    /// Same value at every interior point.
    Constant(f64),
    /// Interior values in row-major order.
    Values(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub step_tol: f64,
    pub residual_tol: f64,
    pub max_iter: usize,
    pub homotopy_steps: usize,
    pub initial_guess: InitialGuess,
    /// Let the sampled Lipschitz estimate stand in for a declared `L`.
    pub accept_estimated_lipschitz: bool,
    /// Run even when the declared hypotheses rule the method out.
    pub force: bool,
    /// Half-width of the search box for enumeration and Lipschitz sampling.
    pub box_size: f64,
    /// Starts per unknown for enumeration.
    pub density: usize,
    /// Name of the [`LinearInverse`]; "auto" picks one by dimension.
    pub inverse: String,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            step_tol: 1e-10,
            residual_tol: 1e-8,
            max_iter: 10_000,
            homotopy_steps: 20,
            initial_guess: InitialGuess::Zero,
            accept_estimated_lipschitz: false,
            force: false,
            box_size: 10.0,
            density: 41,
            inverse: "auto".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub axes: Vec<TimeScale>,
    pub mesh: MeshParams,
    pub f: Expression,
    pub hypotheses: GrowthHypotheses,
    pub config: SolverConfig,
}

impl Problem {
    pub fn new(axes: Vec<TimeScale>, mesh: MeshParams, f: Expression) -> Result<Self> {
        let p = Problem {
            axes,
            mesh,
            f,
            hypotheses: GrowthHypotheses::default(),
            config: SolverConfig::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_hypotheses(mut self, h: GrowthHypotheses) -> Result<Self> {
        h.validate()?;
        self.hypotheses = h;
        Ok(self)
    }

    pub fn with_config(mut self, config: SolverConfig) -> Self {
        self.config = config;
        self
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > MAX_DIMENSION {
            return Err(Error::Precondition(format!(
                "between 1 and {MAX_DIMENSION} axes supported, got {}",
                self.axes.len()
            )));
        }
        self.f.check_dimension(self.dim())?;
        self.hypotheses.validate()
    }

    pub fn discretize(&self) -> Result<Discretization> {
        self.validate()?;
        let grids = self
            .axes
            .iter()
            .map(|ts| ts.discretize(&self.mesh).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        Discretization::new(Arc::new(ProductGrid::new(grids)?))
    }

    /// `|Ω| = Π (b_i - a_i)`.
    pub fn volume(&self) -> f64 {
        self.axes.iter().map(TimeScale::width).product()
    }
}

/// Everything about the grid problem that does not depend on `f`.
#[derive(Debug, Clone)]
pub struct Discretization {
    grid: Arc<ProductGrid>,
    op: ProductOperator,
    coords: Vec<Vec<f64>>,
    weights: Vec<f64>,
    lambda1: f64,
    lambda1_lower_bound: f64,
}

impl Discretization {
    pub fn new(grid: Arc<ProductGrid>) -> Result<Self> {
        let lambda1 = grid
            .axes()
            .iter()
            .map(|g| spectrum_1d(g.clone(), Some(1)).map(|s| s.lambda1()))
            .sum::<Result<f64>>()?;
        Ok(Discretization {
            op: ProductOperator::new(grid.clone())?,
            coords: grid.interior_coords(),
            weights: grid.interior_weights(),
            lambda1,
            lambda1_lower_bound: lambda1_lower_bound_grids(grid.axes()),
            grid,
        })
    }

    pub fn grid(&self) -> &Arc<ProductGrid> {
        &self.grid
    }

    pub fn operator(&self) -> &ProductOperator {
        &self.op
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Smallest eigenvalue of the grid operator.
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda1_lower_bound(&self) -> f64 {
        self.lambda1_lower_bound
    }

    pub fn unknowns(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        interior_norm(&self.weights, x)
    }

    /// Interior `Au + τF(u)`.
    pub fn defect(&self, f: &Expression, u: &[f64], tau: f64) -> Result<Vec<f64>> {
        let fu = nemytskii_interior(f, &self.coords, u)?;
        Ok(self
            .op
            .apply_interior(u)
            .into_iter()
            .zip(fu)
            .map(|(a, b)| a + tau * b)
            .collect())
    }

    /// `‖Au + F(u)‖` over interior values, by direct operator application.
    pub fn residual_interior(&self, f: &Expression, u: &[f64]) -> Result<f64> {
        Ok(self.norm(&self.defect(f, u, 1.0)?))
    }

    pub fn initial(&self, guess: &InitialGuess) -> Result<Vec<f64>> {
        let n = self.unknowns();
        match guess {
            InitialGuess::Zero => Ok(vec![0.0; n]),
            InitialGuess::Constant(c) => Ok(vec![*c; n]),
            InitialGuess::Values(v) if v.len() == n => Ok(v.clone()),
            InitialGuess::Values(v) => Err(Error::Precondition(format!(
                "initial guess has {} values for {n} interior points",
                v.len()
            ))),
        }
    }

    /// Inverse named in `config`, resolving "auto".
    pub fn inverse(&self, name: &str) -> Result<Box<dyn LinearInverse>> {
        linear_inverse(name, self)
    }
}

/// `‖Au + F(u)‖` for `u` on the problem's product grid.
pub fn residual(p: &Problem, u: &ProductFunction) -> Result<f64> {
    let disc = p.discretize()?;
    if **u.grid() != **disc.grid() {
        return Err(Error::GridMismatch);
    }
    let scale = u.values().iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    if u.max_boundary_abs() > 1e-12 * scale {
        return Err(Error::Precondition("boundary values must vanish".into()));
    }
    disc.residual_interior(&p.f, &u.interior_values())
}

/// `sqrt(C|Ω| / (λ₁ - α))`.
pub fn apriori_radius(lambda1: f64, alpha: f64, c_bound: f64, volume: f64) -> Result<f64> {
    if alpha >= lambda1 {
        return Err(Error::Hypothesis(format!(
            "alpha = {alpha} must be below lambda1 = {lambda1}"
        )));
    }
    if c_bound < 0.0 || volume < 0.0 {
        return Err(Error::Precondition(
            "C and the volume must be non-negative".into(),
        ));
    }
    Ok((c_bound * volume / (lambda1 - alpha)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    NonContraction,
    MaxIterations,
    Diverged,
    NoRealSolutionSuspected,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::NonContraction => "non_contraction",
            Status::MaxIterations => "max_iterations",
            Status::Diverged => "diverged",
            Status::NoRealSolutionSuspected => "no_real_solution_suspected",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub u: ProductFunction,
    pub residual: f64,
    pub status: Status,
    pub iterations: usize,
    /// Largest observed ratio of successive step norms.
    pub contraction_ratio: Option<f64>,
    pub lambda1: f64,
    pub lambda1_lower_bound: f64,
    pub apriori_radius: Option<f64>,
    /// The Lipschitz constant used and whether it was only sampled.
    pub lipschitz: Option<(f64, bool)>,
    pub non_uniqueness_risk: bool,
    /// Last homotopy parameter at which the corrector succeeded.
    pub last_tau: Option<f64>,
    pub message: Option<String>,
}

impl Solution {
    fn new(disc: &Discretization, u: &[f64], residual: f64, status: Status) -> Result<Self> {
        Ok(Solution {
            u: ProductFunction::from_interior(disc.grid().clone(), u)?,
            residual,
            status,
            iterations: 0,
            contraction_ratio: None,
            lambda1: disc.lambda1(),
            lambda1_lower_bound: disc.lambda1_lower_bound(),
            apriori_radius: None,
            lipschitz: None,
            non_uniqueness_risk: false,
            last_tau: None,
            message: None,
        })
    }

    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}

/// `L < λ₁` with a margin for the rounding error in the computed `λ₁`, so
/// that a declared `L = λ₁` is never taken as a contraction.
pub(crate) fn is_contraction(l: f64, lambda1: f64) -> bool {
    l < lambda1 * (1.0 - 1e-10)
}

/// Declared `L`; else 0 when `f` ignores `u`; else the sampled estimate when
/// the config accepts it.
pub(crate) fn resolve_lipschitz(p: &Problem, disc: &Discretization) -> Result<Option<(f64, bool)>> {
    if let Some(l) = p.hypotheses.lipschitz {
        return Ok(Some((l, false)));
    }
    if !p.f.depends_on_u() {
        return Ok(Some((0.0, false)));
    }
    if !p.config.accept_estimated_lipschitz {
        return Ok(None);
    }
    let b = p.config.box_size;
    let l = estimate_lipschitz(&p.f, disc.grid(), (-b, b), 201)?;
    Ok(Some((l, true)))
}

/// Outcome of a [`Method`] run.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub method: &'static str,
    pub status: Status,
    pub solutions: Vec<Solution>,
    /// Polished end points of all enumeration starts; empty for other methods.
    pub candidates: Vec<Vec<f64>>,
}

pub trait Method: Send + Sync {
    fn name(&self) -> &'static str;

    fn run(&self, p: &Problem) -> Result<Report>;
}

fn single(method: &'static str, s: Solution) -> Report {
    Report {
        method,
        status: s.status,
        solutions: vec![s],
        candidates: Vec::new(),
    }
}

pub struct Picard;

impl Method for Picard {
    fn name(&self) -> &'static str {
        "picard"
    }

    fn run(&self, p: &Problem) -> Result<Report> {
        picard_solve(p).map(|s| single(self.name(), s))
    }
}

pub struct Homotopy;

impl Method for Homotopy {
    fn name(&self) -> &'static str {
        "homotopy"
    }

    fn run(&self, p: &Problem) -> Result<Report> {
        homotopy_solve(p).map(|s| single(self.name(), s))
    }
}

pub struct Enumerate;

impl Method for Enumerate {
    fn name(&self) -> &'static str {
        "enumerate"
    }

    fn run(&self, p: &Problem) -> Result<Report> {
        let e = enumerate_small(p, p.config.box_size, p.config.density)?;
        Ok(Report {
            method: self.name(),
            status: e.status,
            solutions: e.solutions,
            candidates: e.candidates,
        })
    }
}

pub const METHODS: &[&str] = &["picard", "homotopy", "enumerate"];

pub fn method(name: &str) -> Result<Box<dyn Method>> {
    match name {
        "picard" => Ok(Box::new(Picard)),
        "homotopy" => Ok(Box::new(Homotopy)),
        "enumerate" => Ok(Box::new(Enumerate)),
        _ => Err(Error::UnknownStrategy {
            kind: "solver method",
            name: name.to_string(),
            available: METHODS.join(", "),
        }),
    }
}
