//! Brute-force root search for grid systems with at most three unknowns.

use std::collections::HashSet;

use super::{solve_dense, Discretization, Problem, Solution, Status};
use crate::error::{Error, Result};
use crate::nonlinearity::Expression;

pub const ENUMERATION_MAX_UNKNOWNS: usize = 3;
/// Total start budget; the per-unknown density is lowered to fit.
const MAX_STARTS: usize = 1_000_000;
const NEWTON_ITERS: usize = 60;
const POLISH_ITERS: usize = 4;
const DEDUP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    pub status: Status,
    /// Distinct roots inside the box, sorted lexicographically.
    pub solutions: Vec<Solution>,
    /// Distinct end points of all starts, converged or not.
    pub candidates: Vec<Vec<f64>>,
    pub starts: usize,
}

struct System<'a> {
    disc: &'a Discretization,
    f: &'a Expression,
    a: Vec<Vec<f64>>,
}

impl System<'_> {
    /// `Au + F(u)` and a scale for its rounding error.
    fn eval(&self, u: &[f64]) -> Option<(Vec<f64>, f64)> {
        let mut scale: f64 = 1.0;
        let g = self
            .a
            .iter()
            .zip(self.disc.coords())
            .zip(u)
            .map(|((row, x), &ui)| {
                let au: f64 = row.iter().zip(u).map(|(r, v)| r * v).sum();
                let fu = self.f.eval(x, ui).ok()?;
                scale = scale.max(au.abs()).max(fu.abs());
                Some(au + fu)
            })
            .collect::<Option<Vec<_>>>()?;
        g.iter().all(|v| v.is_finite()).then_some((g, scale))
    }

    fn jacobian(&self, u: &[f64]) -> Option<Vec<Vec<f64>>> {
        let mut j = self.a.clone();
        for (i, (x, &v)) in self.disc.coords().iter().zip(u).enumerate() {
            j[i][i] += self.f.du(x, v).ok()?;
        }
        Some(j)
    }

    /// Damped Newton from `start`; returns the end point and whether it is a root.
    fn newton(&self, start: Vec<f64>, iters: usize, limit: f64) -> (Vec<f64>, bool) {
        let mut u = start;
        let Some((mut g, mut scale)) = self.eval(&u) else {
            return (u, false);
        };
        let mut gn = norm(&g);
        for _ in 0..iters {
            if gn <= 1e-11 * scale {
                return (u, true);
            }
            let Some(j) = self.jacobian(&u) else { break };
            let Some(delta) = solve_dense(j, g.iter().map(|v| -v).collect()) else {
                break;
            };
            let mut step = 1.0;
            let mut accepted = false;
            while step > 1e-4 {
                let trial: Vec<f64> = u.iter().zip(&delta).map(|(a, d)| a + step * d).collect();
                if let Some((gt, st)) = self.eval(&trial) {
                    let tn = norm(&gt);
                    if tn < (1.0 - 1e-4 * step) * gn {
                        (u, g, gn, scale) = (trial, gt, tn, st);
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted || u.iter().any(|v| v.abs() > limit) {
                break;
            }
        }
        let root = gn <= 1e-11 * scale;
        (u, root)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|j| {
            let s = j as f64 / (n - 1) as f64;
            (1.0 - s) * lo + s * hi
        })
        .collect()
}

/// Multi-start Newton over `[-box, box]^d` with `density` starts per
/// unknown (reduced if the total would exceed a million).
pub fn enumerate_small(p: &Problem, box_size: f64, density: usize) -> Result<Enumeration> {
    let disc = p.discretize()?;
    let d = disc.unknowns();
    if d > ENUMERATION_MAX_UNKNOWNS {
        return Err(Error::Precondition(format!(
            "enumeration handles at most {ENUMERATION_MAX_UNKNOWNS} unknowns, the grid has {d}"
        )));
    }
    if box_size.is_nan() || box_size <= 0.0 || density == 0 {
        return Err(Error::Precondition(
            "box must be positive and density at least 1".into(),
        ));
    }
    let mut per_axis = density;
    while per_axis > 1
        && per_axis
            .checked_pow(d as u32)
            .is_none_or(|t| t > MAX_STARTS)
    {
        per_axis -= 1;
    }
    let sys = System {
        disc: &disc,
        f: &p.f,
        a: disc.operator().dense(),
    };
    let axis = linspace(-box_size, box_size, per_axis);
    let starts = per_axis.pow(d as u32);

    let mut roots: Vec<Vec<f64>> = Vec::new();
    let mut seen = HashSet::new();
    let mut candidates = Vec::new();
    for k in 0..starts {
        let mut rem = k;
        let start: Vec<f64> = (0..d)
            .map(|_| {
                let v = axis[rem % per_axis];
                rem /= per_axis;
                v
            })
            .collect();
        let (end, root) = sys.newton(start, NEWTON_ITERS, 10.0 * box_size);
        if end.iter().all(|v| v.is_finite()) {
            let key: Vec<i64> = end.iter().map(|v| (v / DEDUP_TOL).round() as i64).collect();
            if seen.insert(key) {
                candidates.push(end.clone());
            }
        }
        let inside = end.iter().all(|v| v.abs() <= box_size * (1.0 + 1e-9));
        if root && inside && !roots.iter().any(|r| max_diff(r, &end) <= DEDUP_TOL) {
            roots.push(end);
        }
    }

    roots = roots
        .into_iter()
        .map(|r| sys.newton(r.clone(), POLISH_ITERS, f64::INFINITY).0)
        .collect();
    roots.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let solutions = roots
        .iter()
        .map(|r| {
            let res = disc.residual_interior(&p.f, r)?;
            let mut s = Solution::new(&disc, r, res, Status::Converged)?;
            s.non_uniqueness_risk = roots.len() > 1;
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let status = if solutions.is_empty() {
        Status::NoRealSolutionSuspected
    } else {
        Status::Converged
    };
    Ok(Enumeration {
        status,
        solutions,
        candidates,
        starts,
    })
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[cfg(test)]
mod tests {
    use super::super::tests::problem;
    use super::*;

    #[test]
    fn linear_growth_has_single_root() {
        let e = enumerate_small(&problem(&["0,1,2,3"], "2*u"), 10.0, 21).unwrap();
        assert_eq!(e.status, Status::Converged);
        assert_eq!(e.solutions.len(), 1);
        assert!(e.solutions[0].u.values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn quadratic_without_real_roots() {
        let e = enumerate_small(&problem(&["0,1,2,3"], "1+u^2"), 100.0, 41).unwrap();
        assert_eq!(e.status, Status::NoRealSolutionSuspected);
        assert!(e.solutions.is_empty());
        assert!(!e.candidates.is_empty());
    }

    #[test]
    fn single_unknown_quadratic() {
        // 3/2·u + u² - 1 = 0 on {4,6,7}: roots 1/2 and -2.
        let e = enumerate_small(&problem(&["4,6,7"], "u^2 - 1"), 5.0, 11).unwrap();
        let roots: Vec<f64> = e
            .solutions
            .iter()
            .map(|s| s.u.interior_values()[0])
            .collect();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] + 2.0).abs() < 1e-12 && (roots[1] - 0.5).abs() < 1e-12);
        assert!(e.solutions.iter().all(|s| s.non_uniqueness_risk));
    }

    #[test]
    fn too_many_unknowns() {
        assert!(enumerate_small(&problem(&["0,1,2,3,4,5"], "u"), 1.0, 3).is_err());
    }
}
