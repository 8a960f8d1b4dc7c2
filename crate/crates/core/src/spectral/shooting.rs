//! Exact shooting for the Dirichlet eigenproblem on a time scale.
//!
//! The state `(y, y^∇)` starts at `(0, 1)` in `a` and is carried to `b`
//! without discretization: intervals use the closed-form solution of
//! `y'' = -λy`, jumps use the recurrence
//! `v⁺ = v - μλy`, `y⁺ = y + μv⁺`. Eigenvalues are the zeros of `y(b; λ)`.

use crate::error::{Error, Result};
use crate::timescale::{Segment, TimeScale};

/// Below this `|λ|` intervals are propagated with the Taylor limit.
const SMALL_LAMBDA: f64 = 1e-8;
const SCAN_STEP_CAP: usize = 2_000_000;
const STEPS_PER_HALF_WAVE: f64 = 64.0;

/// `(y, v)` after an interval of length `tau` of `y'' = -λy`.
fn propagate_interval(y: f64, v: f64, lambda: f64, tau: f64) -> (f64, f64) {
    if lambda.abs() < SMALL_LAMBDA {
        let t2 = tau * tau;
        let y1 = y + v * tau - lambda * (y * t2 / 2.0 + v * t2 * tau / 6.0);
        let v1 = v - lambda * (y * tau + v * t2 / 2.0);
        (y1, v1)
    } else if lambda > 0.0 {
        let k = lambda.sqrt();
        let (s, c) = (k * tau).sin_cos();
        (y * c + v * s / k, -y * k * s + v * c)
    } else {
        let k = (-lambda).sqrt();
        let (s, c) = ((k * tau).sinh(), (k * tau).cosh());
        (y * c + v * s / k, y * k * s + v * c)
    }
}

/// `y(b; λ)` for the initial data `y(a) = 0`, `y^∇ = 1`.
pub fn shoot(ts: &TimeScale, lambda: f64) -> f64 {
    let (mut y, mut v) = (0.0_f64, 1.0_f64);
    let segs = ts.segments();
    for (k, seg) in segs.iter().enumerate() {
        if let Segment::Interval { lo, hi } = *seg {
            (y, v) = propagate_interval(y, v, lambda, hi - lo);
        }
        if let Some(next) = segs.get(k + 1) {
            let mu = next.start() - seg.end();
            v -= mu * lambda * y;
            y += mu * v;
        }
    }
    y
}

/// First `k` eigenvalues as sign changes of [`shoot`], refined by bisection.
///
/// The scan runs in `s = √λ` with a step fine enough to resolve every
/// half-wave of the continuous parts, starting below the lower bound
/// `4/(b - a)²`. On purely discrete scales it stops at a Gershgorin bound.
pub fn eigen_shooting(ts: &TimeScale, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::Precondition(
            "at least one eigenvalue must be requested".into(),
        ));
    }
    let width = ts.width();
    let ds = std::f64::consts::PI / (STEPS_PER_HALF_WAVE * width);
    let ceiling = if ts.is_discrete() {
        Some(discrete_spectral_bound(ts) * 1.01)
    } else {
        None
    };

    let mut roots = Vec::with_capacity(k);
    let mut s_prev = (0.5 * 4.0 / (width * width)).sqrt();
    let mut f_prev = shoot(ts, s_prev * s_prev);
    if f_prev == 0.0 {
        roots.push(s_prev * s_prev);
    }
    let mut steps = 0;
    while roots.len() < k {
        steps += 1;
        if steps > SCAN_STEP_CAP {
            break;
        }
        let s = s_prev + ds;
        let lambda = s * s;
        if ceiling.is_some_and(|c| lambda > c) {
            break;
        }
        let f = shoot(ts, lambda);
        if f == 0.0 {
            roots.push(lambda);
        } else if f_prev != 0.0 && f.signum() != f_prev.signum() {
            roots.push(bisect(ts, s_prev * s_prev, lambda, f_prev));
        }
        s_prev = s;
        f_prev = f;
    }
    if roots.len() < k {
        return Err(Error::InsufficientRoots {
            found: roots.len(),
            wanted: k,
        });
    }
    Ok(roots)
}

fn bisect(ts: &TimeScale, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let sign_lo = f_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = shoot(ts, mid);
        if f == 0.0 {
            return mid;
        }
        if f.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Upper bound on the spectrum of a discrete scale (max absolute row sum
/// of the Dirichlet operator).
fn discrete_spectral_bound(ts: &TimeScale) -> f64 {
    let pts: Vec<f64> = ts.segments().iter().map(Segment::start).collect();
    (1..pts.len() - 1)
        .map(|i| {
            let mu = pts[i + 1] - pts[i];
            let nu = pts[i] - pts[i - 1];
            2.0 * (1.0 / (mu * mu) + 1.0 / (mu * nu))
        })
        .fold(0.0, f64::max)
}
