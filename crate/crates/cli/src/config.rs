//! JSON run configuration.
//!
//! ```json
//! {
//!   "axes": ["[0,1],2,3"],
//!   "mesh": { "h": 0.001 },
//!   "f": "C + c1*u",
//!   "bindings": { "C": 1, "c1": 0.5 },
//!   "hypotheses": { "L": 0.5, "alpha": 0.5, "C": 1 },
//!   "solver": { "method": "picard", "residual_tol": 1e-10 },
//!   "output": { "dir": "out", "formats": ["json", "csv"] }
//! }
//! ```
//!
//! Unknown keys are rejected at every level.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use tselliptic::nonlinearity::{Expression, GrowthHypotheses, ParseError};
use tselliptic::solver::{InitialGuess, Problem, SolverConfig};
use tselliptic::spectral::spectrum_1d;
use tselliptic::timescale::{MeshParams, TimeScale};

use crate::output::Format;
use crate::Failure;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub axes: Vec<String>,
    pub mesh: Option<MeshConfig>,
    pub f: Option<String>,
    #[serde(default)]
    pub bindings: BTreeMap<String, f64>,
    #[serde(default)]
    pub hypotheses: HypothesesConfig,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Exactly one of the three keys.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub h: Option<f64>,
    pub subdivisions: Option<usize>,
    pub counts: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesesConfig {
    #[serde(rename = "L")]
    pub lipschitz: Option<f64>,
    pub alpha: Option<f64>,
    #[serde(rename = "C")]
    pub c_bound: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GuessConfig {
    Constant(f64),
    Values(Vec<f64>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub method: Option<String>,
    pub step_tol: Option<f64>,
    pub residual_tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub homotopy_steps: Option<usize>,
    pub initial_guess: Option<GuessConfig>,
    #[serde(rename = "box")]
    pub box_size: Option<f64>,
    pub density: Option<usize>,
    pub inverse: Option<String>,
    pub accept_estimated_lipschitz: Option<bool>,
    pub force: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
    }

    pub fn time_scales(&self) -> Result<Vec<TimeScale>, Failure> {
        if self.axes.is_empty() {
            return Err(Failure::Config(
                "no domain: give `axes` in the config or --domain".into(),
            ));
        }
        self.axes
            .iter()
            .map(|s| {
                s.parse::<TimeScale>()
                    .map_err(|e| Failure::Config(format!("axis \"{s}\": {e}")))
            })
            .collect()
    }

    pub fn mesh_params(&self) -> Result<MeshParams, Failure> {
        let Some(m) = &self.mesh else {
            return Ok(MeshParams::default());
        };
        match (m.h, m.subdivisions, &m.counts) {
            (Some(h), None, None) => Ok(MeshParams::Step(h)),
            (None, Some(n), None) => Ok(MeshParams::Subdivisions(n)),
            (None, None, Some(c)) => Ok(MeshParams::PerInterval(c.clone())),
            _ => Err(Failure::Config(
                "mesh takes exactly one of `h`, `subdivisions`, `counts`".into(),
            )),
        }
    }

    /// Parses `f`. An unbound `lambda1` is bound to the first eigenvalue of
    /// the discretized domain.
    pub fn expression(&self) -> Result<Expression, Failure> {
        let text = self
            .f
            .as_deref()
            .ok_or_else(|| Failure::Config("no nonlinearity: give `f` or --f".into()))?;
        let bad = |e: ParseError| Failure::Config(format!("f = \"{text}\": {e}"));
        match Expression::parse_with(text, &self.bindings) {
            Err(ParseError::UnknownIdentifier { ref name, .. }) if name == "lambda1" => {
                let mut bindings = self.bindings.clone();
                bindings.insert("lambda1".into(), self.lambda1()?);
                Expression::parse_with(text, &bindings).map_err(bad)
            }
            r => r.map_err(bad),
        }
    }

    fn lambda1(&self) -> Result<f64, Failure> {
        let mesh = self.mesh_params()?;
        self.time_scales()?
            .iter()
            .map(|ts| {
                let g = ts.discretize(&mesh)?;
                Ok(spectrum_1d(Arc::new(g), Some(1))?.lambda1())
            })
            .sum::<tselliptic::Result<f64>>()
            .map_err(Failure::from_core)
    }

    pub fn problem(&self) -> Result<Problem, Failure> {
        let h = &self.hypotheses;
        let hyp = GrowthHypotheses {
            lipschitz: h.lipschitz,
            alpha: h.alpha,
            c_bound: h.c_bound,
        };
        let p = Problem::new(self.time_scales()?, self.mesh_params()?, self.expression()?)
            .and_then(|p| p.with_hypotheses(hyp))
            .map_err(Failure::from_core)?;
        Ok(p.with_config(self.solver_config()))
    }

    pub fn solver_config(&self) -> SolverConfig {
        let s = &self.solver;
        let d = SolverConfig::default();
        SolverConfig {
            step_tol: s.step_tol.unwrap_or(d.step_tol),
            residual_tol: s.residual_tol.unwrap_or(d.residual_tol),
            max_iter: s.max_iter.unwrap_or(d.max_iter),
            homotopy_steps: s.homotopy_steps.unwrap_or(d.homotopy_steps),
            initial_guess: match &s.initial_guess {
                None => InitialGuess::Zero,
                Some(GuessConfig::Constant(c)) => InitialGuess::Constant(*c),
                Some(GuessConfig::Values(v)) => InitialGuess::Values(v.clone()),
            },
            accept_estimated_lipschitz: s
                .accept_estimated_lipschitz
                .unwrap_or(d.accept_estimated_lipschitz),
            force: s.force.unwrap_or(d.force),
            box_size: s.box_size.unwrap_or(d.box_size),
            density: s.density.unwrap_or(d.density),
            inverse: s.inverse.clone().unwrap_or(d.inverse),
        }
    }

    pub fn method(&self) -> &str {
        self.solver.method.as_deref().unwrap_or("picard")
    }
}
