//! The nonlinearity `f(x, u)`: expressions, the Nemytskii operator
//! `(Fu)(x) = f(x, u(x))` and sampled checks of the growth hypotheses.

mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::product::{ProductFunction, ProductGrid};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => {
                *offset
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of negative value {0}")]
    SqrtOfNegative(f64),
    #[error("x{index} referenced in a {dim}-dimensional domain")]
    MissingCoordinate { index: usize, dim: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    U,
    /// 1-based coordinate index.
    X(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Abs,
    Sqrt,
}

impl UnaryOp {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "exp" => UnaryOp::Exp,
            "abs" => UnaryOp::Abs,
            "sqrt" => UnaryOp::Sqrt,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Exp => "exp",
            UnaryOp::Abs => "abs",
            UnaryOp::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(Var),
    Unary(UnaryOp, Box<Node>),
    Binary(BinaryOp, Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
}

impl Node {
    fn eval(&self, x: &[f64], u: f64) -> Result<f64, EvalError> {
        Ok(match self {
            Node::Const(c) => *c,
            Node::Var(Var::U) => u,
            Node::Var(Var::X(k)) => *x.get(k - 1).ok_or(EvalError::MissingCoordinate {
                index: *k,
                dim: x.len(),
            })?,
            Node::Unary(op, arg) => {
                let a = arg.eval(x, u)?;
                match op {
                    UnaryOp::Neg => -a,
                    UnaryOp::Sin => a.sin(),
                    UnaryOp::Cos => a.cos(),
                    UnaryOp::Exp => a.exp(),
                    UnaryOp::Abs => a.abs(),
                    UnaryOp::Sqrt if a < 0.0 => return Err(EvalError::SqrtOfNegative(a)),
                    UnaryOp::Sqrt => a.sqrt(),
                }
            }
            Node::Binary(op, lhs, rhs) => {
                let (l, r) = (lhs.eval(x, u)?, rhs.eval(x, u)?);
                match op {
                    BinaryOp::Add => l + r,
                    BinaryOp::Sub => l - r,
                    BinaryOp::Mul => l * r,
                    BinaryOp::Div if r == 0.0 => return Err(EvalError::DivisionByZero),
                    BinaryOp::Div => l / r,
                }
            }
            Node::Pow(base, n) => {
                let b = base.eval(x, u)?;
                if *n < 0 && b == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                b.powi(*n)
            }
        })
    }

    fn visit(&self, f: &mut impl FnMut(&Node)) {
        f(self);
        match self {
            Node::Unary(_, a) | Node::Pow(a, _) => a.visit(f),
            Node::Binary(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
            Node::Const(_) | Node::Var(_) => {}
        }
    }
}

/// A parsed nonlinearity `f(x1, …, xn, u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
}

impl Expression {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        Self::parse_with(text, &BTreeMap::new())
    }

    /// Parses with named parameters substituted as constants.
    pub fn parse_with(text: &str, bindings: &BTreeMap<String, f64>) -> Result<Self, ParseError> {
        parse::parse(text, bindings).map(|root| Expression { root })
    }

    pub fn from_node(root: Node) -> Self {
        Expression { root }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn eval(&self, x: &[f64], u: f64) -> Result<f64, EvalError> {
        self.root.eval(x, u)
    }

    /// Highest coordinate index referenced, 0 if `f` does not depend on `x`.
    pub fn max_axis(&self) -> usize {
        let mut m = 0;
        self.root.visit(&mut |n| {
            if let Node::Var(Var::X(k)) = n {
                m = m.max(*k);
            }
        });
        m
    }

    pub fn depends_on_u(&self) -> bool {
        let mut found = false;
        self.root
            .visit(&mut |n| found |= matches!(n, Node::Var(Var::U)));
        found
    }

    pub fn check_dimension(&self, dim: usize) -> Result<()> {
        match self.max_axis() {
            k if k > dim => Err(Error::Precondition(
                EvalError::MissingCoordinate { index: k, dim }.to_string(),
            )),
            _ => Ok(()),
        }
    }

    /// Central-difference `∂f/∂u`.
    pub fn du(&self, x: &[f64], u: f64) -> Result<f64, EvalError> {
        let h = FD_STEP * u.abs().max(1.0);
        Ok((self.eval(x, u + h)? - self.eval(x, u - h)?) / (2.0 * h))
    }
}

impl FromStr for Expression {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        Expression::parse(s)
    }
}

/// Canonical form; parsing it back yields the same tree.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        parse::write_node(f, &self.root)
    }
}

const FD_STEP: f64 = 1e-6;

/// Values of `f(x, u(x))` at every point of the closed product grid.
pub fn nemytskii(e: &Expression, u: &ProductFunction) -> Result<ProductFunction> {
    let grid = u.grid();
    e.check_dimension(grid.dim())?;
    let values = (0..grid.len())
        .map(|k| {
            let x = grid.coords(&grid.multi_index(k));
            e.eval(&x, u.values()[k])
                .map_err(|source| Error::EvalAt { point: x, source })
        })
        .collect::<Result<Vec<_>>>()?;
    ProductFunction::new(grid.clone(), values)
}

/// `f(x_k, u_k)` over paired interior coordinates and values.
pub fn nemytskii_interior(e: &Expression, coords: &[Vec<f64>], u: &[f64]) -> Result<Vec<f64>> {
    coords
        .iter()
        .zip(u)
        .map(|(x, &v)| {
            e.eval(x, v).map_err(|source| Error::EvalAt {
                point: x.clone(),
                source,
            })
        })
        .collect()
}

/// Constants of the two growth regimes; absent entries are unknown.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GrowthHypotheses {
    /// `|f(x,η) - f(x,γ)| ≤ L|η - γ|`.
    pub lipschitz: Option<f64>,
    /// `f(x,η)η ≤ αη² + C`.
    pub alpha: Option<f64>,
    pub c_bound: Option<f64>,
}

impl GrowthHypotheses {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, v: f64| {
            Error::Hypothesis(format!("{name} must be finite and non-negative, got {v}"))
        };
        if let Some(l) = self.lipschitz {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(bad("L", l));
            }
        }
        if let Some(c) = self.c_bound {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(bad("C", c));
            }
        }
        if let Some(a) = self.alpha {
            if !a.is_finite() {
                return Err(Error::Hypothesis(format!("alpha must be finite, got {a}")));
            }
        }
        Ok(())
    }
}

const MAX_SAMPLE_POINTS: usize = 256;

/// Interior points of `domain`, thinned to at most a few hundred by a fixed stride.
pub fn sample_points(domain: &ProductGrid) -> Vec<Vec<f64>> {
    let all = domain.interior_coords();
    let stride = all.len().div_ceil(MAX_SAMPLE_POINTS).max(1);
    all.into_iter().step_by(stride).collect()
}

fn sample_range(u_range: (f64, f64), samples: usize) -> Result<Vec<f64>> {
    let (lo, hi) = u_range;
    if samples < 2 || lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::Precondition(format!(
            "need samples >= 2 and lo < hi, got {samples} on [{lo}, {hi}]"
        )));
    }
    let n = (samples - 1) as f64;
    Ok((0..samples)
        .map(|j| {
            let s = j as f64 / n;
            (1.0 - s) * lo + s * hi
        })
        .collect())
}

/// Largest sampled `|∂f/∂u|`. A lower estimate of `L`, not a certificate.
pub fn estimate_lipschitz(
    e: &Expression,
    domain: &ProductGrid,
    u_range: (f64, f64),
    samples: usize,
) -> Result<f64> {
    let etas = sample_range(u_range, samples)?;
    let mut best: f64 = 0.0;
    for x in sample_points(domain) {
        for &eta in &etas {
            let d = e.du(&x, eta).map_err(|source| Error::EvalAt {
                point: x.clone(),
                source,
            })?;
            best = best.max(d.abs());
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub enum OneSidedCheck {
    Pass,
    Fail {
        x: Vec<f64>,
        eta: f64,
        lhs: f64,
        rhs: f64,
    },
}

impl OneSidedCheck {
    pub fn passed(&self) -> bool {
        matches!(self, OneSidedCheck::Pass)
    }
}

/// Samples `f(x,η)η ≤ αη² + C`; reports the first violation found.
pub fn check_one_sided(
    e: &Expression,
    domain: &ProductGrid,
    alpha: f64,
    c_bound: f64,
    u_range: (f64, f64),
    samples: usize,
) -> Result<OneSidedCheck> {
    let etas = sample_range(u_range, samples)?;
    for x in sample_points(domain) {
        for &eta in &etas {
            let f = e.eval(&x, eta).map_err(|source| Error::EvalAt {
                point: x.clone(),
                source,
            })?;
            let lhs = f * eta;
            let rhs = alpha * eta * eta + c_bound;
            if lhs > rhs + 1e-12 * rhs.abs().max(1.0) {
                return Ok(OneSidedCheck::Fail { x, eta, lhs, rhs });
            }
        }
    }
    Ok(OneSidedCheck::Pass)
}
