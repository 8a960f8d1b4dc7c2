use super::{is_contraction, resolve_lipschitz, Problem, Solution, Status};
use crate::error::{Error, Result};
use crate::nonlinearity::nemytskii_interior;

/// Growth of the step norm over the first step that counts as divergence.
const DIVERGENCE_FACTOR: f64 = 1e6;

/// Fixed-point iteration `u ← A⁻¹(-F(u))`.
///
/// Needs a Lipschitz constant, declared or accepted from sampling. When
/// `L/λ₁ ≥ 1` it returns [`Status::NonContraction`] without iterating,
/// unless the config forces a run.
pub fn picard_solve(p: &Problem) -> Result<Solution> {
    let disc = p.discretize()?;
    let cfg = &p.config;
    let lipschitz = resolve_lipschitz(p, &disc)?;
    let Some((l, _)) = lipschitz else {
        return Err(Error::Hypothesis(
            "picard needs a Lipschitz constant: declare L or accept the sampled estimate".into(),
        ));
    };
    let lambda1 = disc.lambda1();
    let mut u = disc.initial(&cfg.initial_guess)?;

    let finish =
        |u: &[f64], status: Status, iterations: usize, ratio: Option<f64>, msg: Option<String>| {
            let res = disc.residual_interior(&p.f, u).unwrap_or(f64::INFINITY);
            let mut s = Solution::new(&disc, u, res, status)?;
            s.iterations = iterations;
            s.contraction_ratio = ratio;
            s.lipschitz = lipschitz;
            s.non_uniqueness_risk = !is_contraction(l, lambda1);
            s.message = msg;
            Ok(s)
        };

    if !is_contraction(l, lambda1) && !cfg.force {
        let msg = format!(
            "L = {l} is not below lambda1 = {lambda1}; the map is not a certified contraction"
        );
        return finish(&u, Status::NonContraction, 0, None, Some(msg));
    }

    let inverse = disc.inverse(&cfg.inverse)?;
    let mut first_step = None;
    let mut prev_step: Option<f64> = None;
    let mut ratio: Option<f64> = None;
    for k in 1..=cfg.max_iter {
        let rhs: Vec<f64> = nemytskii_interior(&p.f, disc.coords(), &u)?
            .into_iter()
            .map(|v| -v)
            .collect();
        let next = inverse.solve(&rhs);
        let diff: Vec<f64> = next.iter().zip(&u).map(|(a, b)| a - b).collect();
        let step = disc.norm(&diff);
        u = next;
        let size = disc.norm(&u);

        if !step.is_finite()
            || step > DIVERGENCE_FACTOR * first_step.unwrap_or(f64::INFINITY).max(1e-300)
        {
            return finish(
                &u,
                Status::Diverged,
                k,
                ratio,
                Some("step norm blew up".into()),
            );
        }
        first_step.get_or_insert(step);
        // Below this, step norms are dominated by rounding and their ratios are noise.
        let noise = 1e-9 * (1.0 + size);
        if let Some(prev) = prev_step {
            if prev > noise && step > noise {
                let r = step / prev;
                ratio = Some(ratio.map_or(r, |m: f64| m.max(r)));
            }
        }
        prev_step = Some(step);

        let res = disc.residual_interior(&p.f, &u)?;
        if res <= cfg.residual_tol {
            return finish(&u, Status::Converged, k, Some(ratio.unwrap_or(0.0)), None);
        }
        if step <= cfg.step_tol * (1.0 + size) {
            let msg = format!("steps stalled with residual {res:e} above tolerance");
            return finish(&u, Status::MaxIterations, k, ratio, Some(msg));
        }
    }
    finish(&u, Status::MaxIterations, cfg.max_iter, ratio, None)
}

#[cfg(test)]
mod tests {
    use super::super::tests::problem;
    use super::*;
    use crate::nonlinearity::GrowthHypotheses;

    fn with_l(p: Problem, l: f64) -> Problem {
        p.with_hypotheses(GrowthHypotheses {
            lipschitz: Some(l),
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn constant_source_two_dimensions() {
        let p = with_l(problem(&["0,1,2,3", "0,1,2,3"], "1"), 0.0);
        let s = picard_solve(&p).unwrap();
        assert_eq!(s.status, Status::Converged);
        assert_eq!(s.iterations, 1);
        assert!(s.residual <= 1e-12);
        assert!(s
            .u
            .interior_values()
            .iter()
            .all(|v| (v + 0.5).abs() < 1e-14));
        assert_eq!(s.u.max_boundary_abs(), 0.0);
    }

    #[test]
    fn position_dependent_source() {
        let p = with_l(problem(&["0,1,2,3"], "3*x1 - 1"), 0.0);
        let s = picard_solve(&p).unwrap();
        let (g1, g2) = (2.0, 5.0);
        let u = s.u.interior_values();
        assert!((u[0] - (-2.0 * g1 - g2) / 3.0).abs() < 1e-14);
        assert!((u[1] - (-g1 - 2.0 * g2) / 3.0).abs() < 1e-14);
    }

    #[test]
    fn linear_contraction_ratio() {
        let p = with_l(problem(&["[0,1],2,3"], "0.5*u + 1"), 0.5);
        let s = picard_solve(&p).unwrap();
        assert_eq!(s.status, Status::Converged);
        let bound = 0.5 / s.lambda1;
        let r = s.contraction_ratio.unwrap();
        assert!(r > 0.0 && r <= bound + 1e-6, "{r} vs {bound}");
    }

    #[test]
    fn refuses_without_contraction() {
        let p = with_l(problem(&["0,1,2,3"], "-u"), 1.0);
        let s = picard_solve(&p).unwrap();
        assert_eq!(s.status, Status::NonContraction);
        assert_eq!(s.iterations, 0);
        assert!(s.non_uniqueness_risk);
        assert!(picard_solve(&problem(&["0,1,2,3"], "u")).is_err());
    }

    #[test]
    fn forced_divergence_is_reported() {
        let mut p = with_l(problem(&["0,1,2,3"], "-3*u + 1"), 3.0);
        p.config.force = true;
        let s = picard_solve(&p).unwrap();
        assert_eq!(s.status, Status::Diverged);
    }

    #[test]
    fn estimated_lipschitz_when_accepted() {
        let mut p = problem(&["0,1,2,3"], "0.25*sin(u) + 1");
        p.config.accept_estimated_lipschitz = true;
        let s = picard_solve(&p).unwrap();
        assert_eq!(s.status, Status::Converged);
        let (l, estimated) = s.lipschitz.unwrap();
        assert!(estimated && (l - 0.25).abs() < 1e-6);
    }

    #[test]
    fn source_without_u_needs_no_declared_constant() {
        let s = picard_solve(&problem(&["0,1,2,3"], "1")).unwrap();
        assert_eq!(s.status, Status::Converged);
        assert_eq!(s.lipschitz, Some((0.0, false)));
    }
}
