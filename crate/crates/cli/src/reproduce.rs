//! Canned scenarios with stored expected values.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde_json::json;
use tselliptic::nonlinearity::{Expression, GrowthHypotheses};
use tselliptic::product::{ProductGrid, ProductOperator};
use tselliptic::solver::{enumerate_small, homotopy_solve, picard_solve, Problem, Status};
use tselliptic::spectral::{eigen_route, spectrum_1d, tensor_spectrum};
use tselliptic::timescale::{MeshParams, TimeScale};
use tselliptic::Result;

use crate::output::{num, Artifacts, Table};

pub struct Check {
    pub scenario: &'static str,
    pub item: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

struct Checks {
    scenario: &'static str,
    items: Vec<Check>,
}

impl Checks {
    fn add(&mut self, item: &str, expected: String, observed: String, pass: bool) {
        self.items.push(Check {
            scenario: self.scenario,
            item: item.into(),
            expected,
            observed,
            pass,
        });
    }

    fn near(&mut self, item: &str, expected: f64, observed: f64, tol: f64) {
        let pass = (observed - expected).abs() <= tol;
        self.add(
            item,
            format!("{} ± {tol:.0e}", short(expected)),
            num(observed),
            pass,
        );
    }

    fn at_most(&mut self, item: &str, bound: f64, observed: f64) {
        self.add(
            item,
            format!("<= {bound:.0e}"),
            num(observed),
            observed <= bound,
        );
    }

    fn at_least(&mut self, item: &str, bound: f64, observed: f64) {
        self.add(
            item,
            format!(">= {bound}"),
            num(observed),
            observed >= bound,
        );
    }

    fn positive(&mut self, item: &str, observed: f64) {
        self.add(item, "> 0".into(), num(observed), observed > 0.0);
    }

    fn equals<T: PartialEq + ToString>(&mut self, item: &str, expected: T, observed: T) {
        let pass = expected == observed;
        self.add(item, expected.to_string(), observed.to_string(), pass);
    }
}

fn short(v: f64) -> String {
    format!("{v:.12}")
        .trim_end_matches('0')
        .trim_end_matches('.')
        .to_string()
}

fn ts(s: &str) -> TimeScale {
    s.parse().expect("scenario literals are valid")
}

fn problem(axes: &[&str], mesh: MeshParams, f: &str, h: GrowthHypotheses) -> Result<Problem> {
    Problem::new(axes.iter().map(|s| ts(s)).collect(), mesh, f.parse()?)?.with_hypotheses(h)
}

fn lipschitz(l: f64) -> GrowthHypotheses {
    GrowthHypotheses {
        lipschitz: Some(l),
        ..Default::default()
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

const UNIT: &str = "0,1,2,3";
const HYBRID: &str = "[0,1],2,3";

fn table_1(c: &mut Checks) -> Result<()> {
    let shoot = eigen_route("shooting", &MeshParams::default())?;
    let fine = eigen_route("matrix", &MeshParams::Step(1e-3))?;
    let exact = PI * PI / 9.0;
    c.near(
        "[0,3] lambda1, shooting",
        exact,
        shoot.eigenvalues(&ts("[0,3]"), 1)?[0],
        1e-9,
    );
    c.near(
        "[0,3] lambda1, matrix h=1e-3",
        exact,
        fine.eigenvalues(&ts("[0,3]"), 1)?[0],
        1e-4,
    );
    c.near(
        "{0,1,2,3} lambda1, shooting",
        1.0,
        shoot.eigenvalues(&ts(UNIT), 1)?[0],
        0.0,
    );
    c.near(
        "{0,1,2,3} lambda1, matrix",
        1.0,
        fine.eigenvalues(&ts(UNIT), 1)?[0],
        1e-14,
    );
    let hybrid = ts(HYBRID);
    let hs = shoot.eigenvalues(&hybrid, 1)?[0];
    c.near("[0,1]+{2,3} lambda1, shooting", 0.840, hs, 1e-3);
    c.near(
        "[0,1]+{2,3} lambda1, matrix h=1e-3",
        0.840,
        fine.eigenvalues(&hybrid, 1)?[0],
        1e-3,
    );
    let errors = [0.1, 0.05, 0.025, 0.0125]
        .iter()
        .map(|&h| {
            Ok(
                (eigen_route("matrix", &MeshParams::Step(h))?.eigenvalues(&hybrid, 1)?[0] - hs)
                    .abs(),
            )
        })
        .collect::<Result<Vec<f64>>>()?;
    let order = errors
        .windows(2)
        .map(|w| (w[0] / w[1]).log2())
        .fold(f64::INFINITY, f64::min);
    c.at_least("[0,1]+{2,3} matrix convergence order", 1.9, order);
    Ok(())
}

fn ex_7_1(c: &mut Checks) -> Result<()> {
    let g = Arc::new(ts(UNIT).discretize(&MeshParams::default())?);
    let s = spectrum_1d(g, None)?;
    let t = tensor_spectrum(vec![s.clone(), s], 4)?;
    for (k, (&e, o)) in [2.0, 4.0, 4.0, 6.0].iter().zip(t.eigenvalues()).enumerate() {
        c.near(&format!("eigenvalue {}", k + 1), e, o, 1e-10);
    }
    let p = problem(&[UNIT, UNIT], MeshParams::default(), "1", lipschitz(0.0))?;
    let sol = picard_solve(&p)?;
    c.equals("picard status, f = 1", "converged", sol.status.as_str());
    c.at_most("picard residual", 1e-10, sol.residual);
    let dev = max_abs_diff(&sol.u.interior_values(), &[-0.5; 4]);
    c.at_most("max |u + 1/2| over the four points", 1e-12, dev);
    Ok(())
}

fn ex_7_2(c: &mut Checks) -> Result<()> {
    let ev = eigen_route("shooting", &MeshParams::default())?.eigenvalues(&ts(HYBRID), 3)?;
    for (k, e) in [0.840, 2.600, 11.907].into_iter().enumerate() {
        c.near(&format!("lambda{}", k + 1), e, ev[k], 1e-3);
    }

    let p = problem(&[HYBRID], MeshParams::Step(1e-3), "1", lipschitz(0.0))?;
    let s = picard_solve(&p)?;
    let g = s.u.grid().axes()[0].clone();
    let mut dev: f64 = 0.0;
    let mut u2 = f64::NAN;
    for (i, &t) in g.points().iter().enumerate() {
        if t <= 1.0 {
            dev = dev.max((s.u.values()[i] - (3.0 * t * t - 11.0 * t) / 6.0).abs());
        } else if t == 2.0 {
            u2 = s.u.values()[i];
        }
    }
    c.equals("linear solve status, f = 1", "converged", s.status.as_str());
    c.at_most("max |u - (3t^2 - 11t)/6| on [0,1]", 5e-5, dev);
    c.near("u(2)", -7.0 / 6.0, u2, 5e-5);

    // Resonant family u = A sin(√λ₁ t) on [0,1]: the first eigenfunction.
    let grid = Arc::new(ts(HYBRID).discretize(&MeshParams::Step(1e-3))?);
    let spec = spectrum_1d(grid.clone(), Some(1))?;
    let phi = spec.eigenfunctions()[0].values();
    let at = |t: f64| phi[grid.nearest(t)];
    let amplitude = at(1.0) / spec.lambda1().sqrt().sin();
    c.near("resonant family u(2)/A", 0.684, at(2.0) / amplitude, 1e-3);
    Ok(())
}

fn ex_7_3(c: &mut Checks) -> Result<()> {
    let constant = 1.0;
    let bindings: BTreeMap<String, f64> = [("C".to_string(), constant)].into();
    let p = Problem::new(
        vec![ts(UNIT)],
        MeshParams::default(),
        Expression::parse_with("C", &bindings)?,
    )?
    .with_hypotheses(lipschitz(0.0))?;
    let s = picard_solve(&p)?;
    let u = s.u.interior_values();
    c.near("u1", -constant, u[0], 1e-12);
    c.near("u2", -constant, u[1], 1e-12);
    c.at_most("residual", 1e-12, s.residual);
    Ok(())
}

fn ex_7_4(c: &mut Checks) -> Result<()> {
    // g(x) = 3x - 1, so g1 = 2, g2 = 5.
    let (g1, g2) = (2.0, 5.0);
    let s = picard_solve(&problem(
        &[UNIT],
        MeshParams::default(),
        "3*x1 - 1",
        lipschitz(0.0),
    )?)?;
    let u = s.u.interior_values();
    c.near("u1 = (-2 g1 - g2)/3", (-2.0 * g1 - g2) / 3.0, u[0], 1e-12);
    c.near("u2 = (-g1 - 2 g2)/3", (-g1 - 2.0 * g2) / 3.0, u[1], 1e-12);
    c.at_most("residual", 1e-12, s.residual);
    Ok(())
}

fn ex_7_5(c: &mut Checks) -> Result<()> {
    let h = GrowthHypotheses {
        lipschitz: Some(2.0),
        alpha: Some(0.5),
        c_bound: Some(0.0),
    };
    let p = problem(&[UNIT], MeshParams::default(), "-2*u", h)?;
    c.equals(
        "picard with L = 2",
        "non_contraction",
        picard_solve(&p)?.status.as_str(),
    );
    let s = homotopy_solve(&p)?;
    c.equals("homotopy status", "converged", s.status.as_str());
    c.at_most(
        "max |u|",
        1e-12,
        max_abs_diff(&s.u.interior_values(), &[0.0, 0.0]),
    );
    c.at_most("residual", 1e-12, s.residual);
    Ok(())
}

fn ex_7_6(c: &mut Checks) -> Result<()> {
    let p = problem(&[UNIT], MeshParams::default(), "2*u", lipschitz(2.0))?;
    c.equals(
        "picard with L = 2",
        "non_contraction",
        picard_solve(&p)?.status.as_str(),
    );
    let e = enumerate_small(&p, 10.0, 41)?;
    c.equals("solutions found by enumeration", 1, e.solutions.len());
    if let Some(s) = e.solutions.first() {
        c.at_most(
            "max |u|",
            1e-12,
            max_abs_diff(&s.u.interior_values(), &[0.0, 0.0]),
        );
        c.at_most("residual", 1e-12, s.residual);
    }
    Ok(())
}

fn ex_7_7(c: &mut Checks) -> Result<()> {
    let h = GrowthHypotheses {
        lipschitz: Some(1.0),
        alpha: Some(0.0),
        c_bound: Some(0.0),
    };
    let p = problem(&[UNIT], MeshParams::default(), "-u", h)?;
    let pic = picard_solve(&p)?;
    c.equals(
        "picard with L = lambda1",
        "non_contraction",
        pic.status.as_str(),
    );
    c.equals("picard iterations", 0, pic.iterations);
    let hom = homotopy_solve(&p)?;
    c.equals("homotopy status", "converged", hom.status.as_str());
    c.at_most("homotopy residual", 1e-8, hom.residual);
    c.equals("non-uniqueness flagged", true, hom.non_uniqueness_risk);
    let disc = p.discretize()?;
    let family = [-3.0, 0.5, 1.7]
        .iter()
        .map(|&t| disc.residual_interior(&p.f, &[t, t]))
        .collect::<Result<Vec<_>>>()?;
    c.at_most(
        "residual along u1 = u2",
        1e-14,
        family.into_iter().fold(0.0, f64::max),
    );
    Ok(())
}

fn ex_7_8(c: &mut Checks) -> Result<()> {
    let p = problem(
        &[UNIT],
        MeshParams::default(),
        "1 + u^2",
        Default::default(),
    )?;
    let e = enumerate_small(&p, 100.0, 400)?;
    c.equals(
        "enumeration status",
        Status::NoRealSolutionSuspected.as_str(),
        e.status.as_str(),
    );
    c.equals("solutions found", 0, e.solutions.len());
    let quartic = |u: f64| u.powi(4) + 4.0 * u.powi(3) + 8.0 * u * u + 7.0 * u + 4.0;
    let min_q = e
        .candidates
        .iter()
        .map(|x| quartic(x[0]))
        .fold(f64::INFINITY, f64::min);
    c.positive("reduced quartic at candidates", min_q);
    Ok(())
}

fn ex_7_9(c: &mut Checks) -> Result<()> {
    let axes = [UNIT, "5,7,10", "4,6,7"];
    let grids = axes
        .iter()
        .map(|s| Ok(Arc::new(ts(s).discretize(&MeshParams::default())?)))
        .collect::<Result<Vec<_>>>()?;
    let op = ProductOperator::new(Arc::new(ProductGrid::new(grids.clone())?))?;
    c.near(
        "diagonal coefficient",
        34.0 / 9.0,
        op.diagonal_at(&[1, 1, 1]),
        1e-12,
    );
    let lambda1: f64 = grids
        .iter()
        .map(|g| Ok(spectrum_1d(g.clone(), Some(1))?.lambda1()))
        .sum::<Result<f64>>()?;
    c.near("lambda1", 25.0 / 9.0, lambda1, 1e-12);

    let e = enumerate_small(
        &problem(&axes, MeshParams::default(), "u^2", Default::default())?,
        20.0,
        400,
    )?;
    c.equals("solutions for f = u^2", 4, e.solutions.len());
    let r = 301f64.sqrt();
    let k = 34.0 / 9.0;
    for (name, u1) in [
        ("0", 0.0),
        ("-25/9", -25.0 / 9.0),
        ("(-43+sqrt301)/18", (-43.0 + r) / 18.0),
        ("(-43-sqrt301)/18", (-43.0 - r) / 18.0),
    ] {
        let expected = [u1, k * u1 + u1 * u1];
        let dist = e
            .solutions
            .iter()
            .map(|s| max_abs_diff(&s.u.interior_values(), &expected))
            .fold(f64::INFINITY, f64::min);
        c.at_most(&format!("solution with u1 = {name}"), 1e-9, dist);
    }
    let none = enumerate_small(
        &problem(
            &axes,
            MeshParams::default(),
            "1 + 2*u^2",
            Default::default(),
        )?,
        20.0,
        400,
    )?;
    c.equals("solutions for f = 1 + 2u^2", 0, none.solutions.len());
    Ok(())
}

type Scenario = fn(&mut Checks) -> Result<()>;

const SCENARIOS: &[(&str, Scenario)] = &[
    ("table-1", table_1),
    ("ex-7.1", ex_7_1),
    ("ex-7.2", ex_7_2),
    ("ex-7.3", ex_7_3),
    ("ex-7.4", ex_7_4),
    ("ex-7.5", ex_7_5),
    ("ex-7.6", ex_7_6),
    ("ex-7.7", ex_7_7),
    ("ex-7.8", ex_7_8),
    ("ex-7.9", ex_7_9),
];

pub fn ids() -> Vec<&'static str> {
    SCENARIOS.iter().map(|(id, _)| *id).collect()
}

/// Runs one scenario, or all of them for "all". `None` for an unknown id.
pub fn run(id: &str) -> Option<Vec<Check>> {
    let selected: Vec<_> = SCENARIOS
        .iter()
        .filter(|(name, _)| id == "all" || *name == id)
        .collect();
    if selected.is_empty() {
        return None;
    }
    let mut out = Vec::new();
    for (name, f) in selected {
        let mut c = Checks {
            scenario: name,
            items: Vec::new(),
        };
        if let Err(e) = f(&mut c) {
            c.add("scenario ran", "ok".into(), e.to_string(), false);
        }
        out.extend(c.items);
    }
    Some(out)
}

fn text_table(checks: &[Check]) -> String {
    let head = ["scenario", "item", "expected", "observed", "result"];
    let rows: Vec<[&str; 5]> = checks
        .iter()
        .map(|c| {
            [
                c.scenario,
                c.item.as_str(),
                c.expected.as_str(),
                c.observed.as_str(),
                if c.pass { "PASS" } else { "FAIL" },
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..5)
        .map(|j| {
            rows.iter()
                .map(|r| r[j].chars().count())
                .chain([head[j].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |r: [&str; 5]| {
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(s, &w)| format!("{s:<w$}"))
            .collect();
        cells.join("  ").trim_end().to_string() + "\n"
    };
    let mut s = line(head);
    for r in rows {
        s.push_str(&line(r));
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    s.push_str(&format!(
        "{} of {} checks passed\n",
        checks.len() - failed,
        checks.len()
    ));
    s
}

pub fn artifacts(checks: &[Check]) -> Artifacts {
    let mut table = Table::new(["scenario", "item", "expected", "observed", "pass"]);
    for c in checks {
        table.push(vec![
            c.scenario.into(),
            c.item.clone(),
            c.expected.clone(),
            c.observed.clone(),
            c.pass.to_string(),
        ]);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let json = json!({
        "checks": checks.iter().map(|c| json!({
            "scenario": c.scenario,
            "item": c.item,
            "expected": c.expected,
            "observed": c.observed,
            "pass": c.pass,
        })).collect::<Vec<_>>(),
        "passed": checks.len() - failed,
        "failed": failed,
    });
    Artifacts {
        json_name: "reproduce",
        json,
        csv_name: "reproduce",
        table,
        extra: Vec::new(),
        plot: None,
        summary: Vec::new(),
        json_always: false,
        text: Some(text_table(checks)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_discrete_scenario_passes() {
        for id in ["ex-7.1", "ex-7.3", "ex-7.4", "ex-7.5", "ex-7.6", "ex-7.7"] {
            let checks = run(id).unwrap();
            assert!(!checks.is_empty());
            for c in &checks {
                assert!(c.pass, "{id} {}: {} vs {}", c.item, c.expected, c.observed);
            }
        }
    }

    #[test]
    fn unknown_scenario() {
        assert!(run("ex-8.1").is_none());
    }

    #[test]
    fn near_with_zero_tolerance_needs_equality() {
        let mut c = Checks {
            scenario: "t",
            items: Vec::new(),
        };
        c.near("a", 1.0, 1.0, 0.0);
        c.near("b", 1.0, 1.0 + f64::EPSILON, 0.0);
        c.near("c", 1.0, f64::NAN, 1.0);
        assert!(c.items[0].pass && !c.items[1].pass && !c.items[2].pass);
    }
}
