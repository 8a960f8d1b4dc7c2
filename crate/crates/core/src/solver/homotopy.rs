//! Continuation in `τ` from `u = 0` at `τ = 0` to `Au + F(u) = 0` at `τ = 1`.
//!
//! Each step solves `Au + τF(u) = 0`, warm-started from the previous `τ`,
//! first by damped fixed-point iteration `u ← A⁻¹(-τF(u))` and then, if
//! that stalls, by Newton's method on the grid system.

use super::{
    apriori_radius, is_contraction, resolve_lipschitz, solve_dense, Discretization, LinearInverse,
    Problem, Solution, Status,
};
use crate::error::{Error, Result};
use crate::nonlinearity::{nemytskii_interior, Expression};
use crate::operator::thomas;

const FIXED_POINT_ITERS: usize = 200;
const NEWTON_ITERS: usize = 60;
/// Largest system handed to the dense Newton solve in more than one dimension.
const DENSE_NEWTON_LIMIT: usize = 1500;
const RADIUS_SLACK: f64 = 1.1;

/// Residual-certified solution via continuation. Existence only; a flag
/// records when uniqueness is not guaranteed.
pub fn homotopy_solve(p: &Problem) -> Result<Solution> {
    let disc = p.discretize()?;
    let cfg = &p.config;
    let lambda1 = disc.lambda1();
    let radius = match (p.hypotheses.alpha, p.hypotheses.c_bound) {
        (Some(alpha), Some(c)) => match apriori_radius(lambda1, alpha, c, p.volume()) {
            Ok(r) => Some(r),
            Err(_) if cfg.force => None,
            Err(e) => return Err(e),
        },
        _ if cfg.force => None,
        _ => {
            return Err(Error::Hypothesis(
                "homotopy needs alpha and C of the one-sided growth bound".into(),
            ))
        }
    };
    let lipschitz = resolve_lipschitz(p, &disc)?;
    let inverse = disc.inverse(&cfg.inverse)?;
    let steps = cfg.homotopy_steps.max(1);

    let within = |u: &[f64]| match radius {
        Some(r) => disc.norm(u) <= (RADIUS_SLACK * r * r).sqrt() + 1e-12,
        None => true,
    };

    let mut u = disc.initial(&cfg.initial_guess)?;
    let mut iterations = 0;
    let mut last_tau = 0.0;
    let mut failure = None;
    for j in 1..=steps {
        let tau = j as f64 / steps as f64;
        match correct(&disc, &p.f, inverse.as_ref(), &u, tau, cfg.residual_tol) {
            Ok((next, its)) => {
                iterations += its;
                if !within(&next) {
                    failure = Some(format!(
                        "corrector left the a priori ball at tau = {tau}: |u| = {}",
                        disc.norm(&next)
                    ));
                    break;
                }
                u = next;
                last_tau = tau;
            }
            Err(its) => {
                iterations += its;
                failure = Some(format!("corrector failed at tau = {tau}"));
                break;
            }
        }
    }

    let res = disc.residual_interior(&p.f, &u)?;
    let status = if failure.is_none() && res <= cfg.residual_tol {
        Status::Converged
    } else {
        Status::MaxIterations
    };
    let mut s = Solution::new(&disc, &u, res, status)?;
    s.iterations = iterations;
    s.apriori_radius = radius;
    s.lipschitz = lipschitz;
    s.non_uniqueness_risk = !matches!(lipschitz, Some((l, _)) if is_contraction(l, lambda1));
    s.last_tau = Some(last_tau);
    s.message = failure;
    Ok(s)
}

/// Solves `Au + τF(u) = 0` from `start`. `Err` carries the iterations spent.
fn correct(
    disc: &Discretization,
    f: &Expression,
    inverse: &dyn LinearInverse,
    start: &[f64],
    tau: f64,
    tol: f64,
) -> std::result::Result<(Vec<f64>, usize), usize> {
    let defect_norm = |u: &[f64]| {
        disc.defect(f, u, tau)
            .map(|d| disc.norm(&d))
            .unwrap_or(f64::INFINITY)
    };
    let mut u = start.to_vec();
    let mut res = defect_norm(&u);
    if res <= tol {
        return Ok((u, 0));
    }

    let mut theta = 1.0;
    let mut its = 0;
    while its < FIXED_POINT_ITERS && theta > 1e-3 {
        its += 1;
        let Ok(fu) = nemytskii_interior(f, disc.coords(), &u) else {
            break;
        };
        let rhs: Vec<f64> = fu.iter().map(|v| -tau * v).collect();
        let g = inverse.solve(&rhs);
        let trial: Vec<f64> = u
            .iter()
            .zip(&g)
            .map(|(a, b)| (1.0 - theta) * a + theta * b)
            .collect();
        let r = defect_norm(&trial);
        if r < res {
            u = trial;
            res = r;
            if res <= tol {
                return Ok((u, its));
            }
        } else {
            theta *= 0.5;
        }
    }

    for _ in 0..NEWTON_ITERS {
        its += 1;
        let Ok(d) = disc.defect(f, &u, tau) else {
            return Err(its);
        };
        let Some(delta) = newton_step(disc, f, &u, tau, &d) else {
            return Err(its);
        };
        let mut step = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, b)| a + step * b).collect();
            let r = defect_norm(&trial);
            if r < res {
                u = trial;
                res = r;
                break;
            }
            step *= 0.5;
            if step < 1e-6 {
                return Err(its);
            }
        }
        if res <= tol {
            return Ok((u, its));
        }
    }
    Err(its)
}

/// `δ` with `(A + τ diag(∂f/∂u)) δ = -d`.
fn newton_step(
    disc: &Discretization,
    f: &Expression,
    u: &[f64],
    tau: f64,
    d: &[f64],
) -> Option<Vec<f64>> {
    let shift = disc
        .coords()
        .iter()
        .zip(u)
        .map(|(x, &v)| f.du(x, v).map(|s| tau * s))
        .collect::<std::result::Result<Vec<_>, _>>()
        .ok()?;
    let rhs: Vec<f64> = d.iter().map(|v| -v).collect();
    let axes = disc.operator().axes();
    if axes.len() == 1 {
        let op = &axes[0];
        let diag: Vec<f64> = op.diag().iter().zip(&shift).map(|(a, s)| a + s).collect();
        return thomas(op.sub(), &diag, op.sup(), &rhs);
    }
    if u.len() > DENSE_NEWTON_LIMIT {
        return None;
    }
    let mut m = disc.operator().dense();
    for (i, s) in shift.iter().enumerate() {
        m[i][i] += s;
    }
    solve_dense(m, rhs)
}
