//! Elliptic Dirichlet boundary value problems on products of time scales.
//!
//! A time scale is a closed subset of the real line; here it is a finite union
//! of closed intervals and isolated points, so a single domain can mix
//! continuous and discrete behaviour. The crate solves
//!
//! ```text
//!   -Δ_T u + f(x, u) = 0   in Ω = Π (a_i, b_i) ∩ T_i,
//!                u = 0     on ∂Ω,
//! ```
//!
//! where `Δ_T` is the sum over axes of the mixed backward/forward second
//! derivative `u^{∇Δ}`.
//!
//! The layers, bottom-up:
//!
//! - [`timescale`]: time scales, jump operators, discretization into a
//!   [`Grid`](timescale::Grid), and Δ/∇ calculus on grid functions.
//! - [`operator`]: the one-dimensional Dirichlet operator, its weighted inner
//!   product, the Green's-function inverse and a direct tridiagonal solve.
//! - [`spectral`]: eigenpairs by a symmetric tridiagonal eigensolver and by
//!   exact shooting, tensor-product spectra and eigenfunction expansions.
//! - [`product`]: grids and grid functions on the n-dimensional product domain.
//! - [`nonlinearity`]: the expression language for `f`, the Nemytskii operator
//!   and hypothesis checks.
//! - [`solver`]: contraction (Picard) iteration, homotopy continuation, a
//!   small-system enumerator, and the registry that selects among them.
//!
//! ```
//! use tselliptic::timescale::{MeshParams, TimeScale};
//! use tselliptic::spectral::spectrum_1d;
//!
//! let ts: TimeScale = "0,1,2,3".parse().unwrap();
//! let grid = ts.discretize(&MeshParams::default()).unwrap();
//! let spec = spectrum_1d(grid, None).unwrap();
//! assert!((spec.eigenvalues()[0] - 1.0).abs() < 1e-12);
//! assert!((spec.eigenvalues()[1] - 3.0).abs() < 1e-12);
//! ```

pub mod error;
pub mod nonlinearity;
pub mod operator;
pub mod product;
pub mod solver;
pub mod spectral;
pub mod timescale;

pub use error::{Error, Result};
