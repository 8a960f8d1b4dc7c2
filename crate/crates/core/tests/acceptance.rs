//! One line per acceptance criterion, at the stated tolerances.
//!
//! Runs without the test harness, so the table is always printed; exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{grid, random_grid, random_product, random_timescale, random_vec, ts};
use tselliptic::nonlinearity::{Expression, GrowthHypotheses};
use tselliptic::operator::{assemble, green_inverse, weighted_inner, weighted_norm};
use tselliptic::product::{interior_inner, interior_norm, ProductGrid, ProductOperator};
use tselliptic::solver::{
    enumerate_small, homotopy_solve, linear_inverse, picard_solve, Discretization, Problem, Status,
};
use tselliptic::spectral::{
    eigen_route, expand, lambda1_lower_bound_grids, spectrum_1d, tensor_spectrum,
};
use tselliptic::timescale::{
    delta_derivative, delta_integral, nabla_derivative, nabla_integral, GridFunction, MeshParams,
};

type Outcome = (bool, String);

fn problem(axes: &[&str], mesh: MeshParams, f: &str, h: GrowthHypotheses) -> Problem {
    Problem::new(
        axes.iter().map(|s| ts(s)).collect(),
        mesh,
        f.parse().unwrap(),
    )
    .unwrap()
    .with_hypotheses(h)
    .unwrap()
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

/// Discrete sine eigenvalues of the unit grid on four points.
fn unit_grid_eigenvalues() -> [f64; 2] {
    [1, 2].map(|k| 4.0 * (PI * k as f64 / 6.0).sin().powi(2))
}

fn ac1() -> Outcome {
    let expected = unit_grid_eigenvalues();
    let t = ts("0,1,2,3");
    let m = eigen_route("matrix", &MeshParams::default())
        .unwrap()
        .eigenvalues(&t, 2)
        .unwrap();
    let s = eigen_route("shooting", &MeshParams::default())
        .unwrap()
        .eigenvalues(&t, 2)
        .unwrap();
    let err = max_abs_diff(&m, &expected).max(max_abs_diff(&s, &expected));
    (
        err <= 1e-10,
        format!("matrix {m:?}, shooting {s:?}, max error {err:.1e}"),
    )
}

/// Root of the hybrid characteristic function near `guess`, by bisection on
/// `(λ²-3λ+1) sin√λ + (2-λ)√λ cos√λ`.
fn hybrid_root(lo: f64, hi: f64) -> f64 {
    let g = |l: f64| {
        let r = l.sqrt();
        (l * l - 3.0 * l + 1.0) * r.sin() + (2.0 - l) * r * r.cos()
    };
    let (mut a, mut b) = (lo, hi);
    assert!(g(a) * g(b) < 0.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if g(a) * g(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

fn ac2() -> Outcome {
    let shoot = eigen_route("shooting", &MeshParams::default()).unwrap();
    let fine = eigen_route("matrix", &MeshParams::Step(1e-3)).unwrap();
    let exact = PI * PI / 9.0;
    let cont_s = shoot.eigenvalues(&ts("[0,3]"), 1).unwrap()[0];
    let cont_m = fine.eigenvalues(&ts("[0,3]"), 1).unwrap()[0];
    let disc = shoot.eigenvalues(&ts("0,1,2,3"), 1).unwrap()[0];
    let disc_m = fine.eigenvalues(&ts("0,1,2,3"), 1).unwrap()[0];
    let hybrid = ts("[0,1],2,3");
    let hyb_s = shoot.eigenvalues(&hybrid, 1).unwrap()[0];

    let hs = [0.25, 0.125, 0.0625, 0.03125, 0.015625];
    let errors: Vec<f64> = hs
        .iter()
        .map(|&h| {
            let m = eigen_route("matrix", &MeshParams::Step(h)).unwrap();
            (m.eigenvalues(&hybrid, 1).unwrap()[0] - hyb_s).abs()
        })
        .collect();
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);

    let pass = (cont_s - exact).abs() <= 1e-9
        && (cont_m - exact).abs() <= 1e-4
        && disc == 1.0
        && (disc_m - 1.0).abs() <= 1e-14
        && (hyb_s - 0.840).abs() <= 1e-3
        && min_order >= 1.9;
    (
        pass,
        format!(
            "[0,3]: shooting err {:.1e}, matrix(h=1e-3) err {:.1e}; {{0,1,2,3}}: {disc} / {disc_m}; hybrid {hyb_s:.10}; \
             matrix orders {:?}",
            (cont_s - exact).abs(),
            (cont_m - exact).abs(),
            orders.iter().map(|o| (o * 100.0).round() / 100.0).collect::<Vec<_>>()
        ),
    )
}

fn ac3() -> Outcome {
    let ev = eigen_route("shooting", &MeshParams::default())
        .unwrap()
        .eigenvalues(&ts("[0,1],2,3"), 3)
        .unwrap();
    let printed = [2.600, 11.907];
    let closed = [hybrid_root(2.0, 3.0), hybrid_root(11.0, 12.5)];
    let err_printed = max_abs_diff(&ev[1..], &printed);
    let err_closed = max_abs_diff(&ev[1..], &closed);
    (
        err_printed <= 1e-3 && err_closed <= 1e-9,
        format!(
            "λ2 = {:.10}, λ3 = {:.10}; vs printed {err_printed:.1e}, vs characteristic equation {err_closed:.1e}",
            ev[1], ev[2]
        ),
    )
}

fn ac4() -> Outcome {
    let g = grid("0,1,2,3", 1.0);
    let spec = spectrum_1d(g.clone(), None).unwrap();
    let t = tensor_spectrum(vec![spec.clone(), spec], 4).unwrap();
    let [l1, l2] = unit_grid_eigenvalues();
    let expected = [l1 + l1, l1 + l2, l2 + l1, l2 + l2];
    let ev_err = max_abs_diff(&t.eigenvalues(), &expected);

    let p = problem(
        &["0,1,2,3", "0,1,2,3"],
        MeshParams::default(),
        "1",
        lipschitz(0.0),
    );
    let s = picard_solve(&p).unwrap();
    let u_err =
        s.u.interior_values()
            .iter()
            .fold(0.0_f64, |m, v| m.max((v + 0.5).abs()));
    let pass = ev_err <= 1e-10 && s.converged() && s.residual <= 1e-10 && u_err <= 1e-12;
    (
        pass,
        format!(
            "eigenvalues {:?} (err {ev_err:.1e}); picard {} in {} step(s), residual {:.1e}, |u + 1/2| {u_err:.1e}",
            t.eigenvalues(),
            s.status,
            s.iterations,
            s.residual
        ),
    )
}

fn ac5() -> Outcome {
    let p = problem(&["[0,1],2,3"], MeshParams::Step(1e-3), "1", lipschitz(0.0));
    let s = picard_solve(&p).unwrap();
    let g = s.u.grid().axes()[0].clone();
    let mut dev: f64 = 0.0;
    for (i, &t) in g.points().iter().enumerate() {
        let exact = if t <= 1.0 {
            (3.0 * t * t - 11.0 * t) / 6.0
        } else if t == 2.0 {
            -7.0 / 6.0
        } else {
            continue;
        };
        dev = dev.max((s.u.values()[i] - exact).abs());
    }
    (
        s.converged() && dev <= 5e-5,
        format!(
            "{} points, max deviation {dev:.1e}, status {}",
            g.len(),
            s.status
        ),
    )
}

fn ac6() -> Outcome {
    let d = MeshParams::default;
    let mut lines = Vec::new();
    let mut pass = true;
    let mut record = |name: &str, u: Vec<f64>, expected: [f64; 2], res: f64, ok: bool| {
        let err = max_abs_diff(&u, &expected);
        let good = ok && err <= 1e-12 && res <= 1e-12;
        pass &= good;
        lines.push(format!("{name} u={u:?} res={res:.0e}"));
    };

    let c = 1.0;
    let s = picard_solve(&problem(&["0,1,2,3"], d(), "1", lipschitz(0.0))).unwrap();
    record(
        "ex-7.3",
        s.u.interior_values(),
        [-c, -c],
        s.residual,
        s.converged(),
    );

    let (g1, g2) = (2.0, 5.0);
    let s = picard_solve(&problem(&["0,1,2,3"], d(), "3*x1 - 1", lipschitz(0.0))).unwrap();
    record(
        "ex-7.4",
        s.u.interior_values(),
        [(-2.0 * g1 - g2) / 3.0, (-g1 - 2.0 * g2) / 3.0],
        s.residual,
        s.converged(),
    );

    let h = GrowthHypotheses {
        lipschitz: Some(2.0),
        alpha: Some(0.5),
        c_bound: Some(0.0),
    };
    let s = homotopy_solve(&problem(&["0,1,2,3"], d(), "-2*u", h)).unwrap();
    record(
        "ex-7.5",
        s.u.interior_values(),
        [0.0, 0.0],
        s.residual,
        s.converged(),
    );

    let e = enumerate_small(
        &problem(&["0,1,2,3"], d(), "2*u", Default::default()),
        10.0,
        41,
    )
    .unwrap();
    let only = e.solutions.len() == 1;
    let s = &e.solutions[0];
    record(
        "ex-7.6",
        s.u.interior_values(),
        [0.0, 0.0],
        s.residual,
        only && s.converged(),
    );
    (pass, lines.join("; "))
}

fn ac7() -> Outcome {
    let p = problem(
        &["0,1,2,3"],
        MeshParams::default(),
        "1+u^2",
        Default::default(),
    );
    let e = enumerate_small(&p, 100.0, 400).unwrap();
    let quartic = |u: f64| u.powi(4) + 4.0 * u.powi(3) + 8.0 * u * u + 7.0 * u + 4.0;
    let min_q = e
        .candidates
        .iter()
        .map(|c| quartic(c[0]))
        .fold(f64::INFINITY, f64::min);
    let pass = e.solutions.is_empty()
        && e.status == Status::NoRealSolutionSuspected
        && !e.candidates.is_empty()
        && min_q > 0.0;
    (
        pass,
        format!(
            "{} starts, {} solutions, status {}; quartic min over {} candidates = {min_q:.4}",
            e.starts,
            e.solutions.len(),
            e.status,
            e.candidates.len()
        ),
    )
}

fn ac8() -> Outcome {
    let axes = ["0,1,2,3", "5,7,10", "4,6,7"];
    let pg = Arc::new(ProductGrid::new(axes.iter().map(|s| grid(s, 1.0)).collect()).unwrap());
    let op = ProductOperator::new(pg).unwrap();
    let diag = op.diagonal_at(&[1, 1, 1]);
    let diag_ok = (diag - 34.0 / 9.0).abs() <= 1e-12;

    let p = problem(&axes, MeshParams::default(), "u^2", Default::default());
    let e = enumerate_small(&p, 20.0, 400).unwrap();
    let r = 301f64.sqrt();
    let u1s = [0.0, -25.0 / 9.0, (-43.0 + r) / 18.0, (-43.0 - r) / 18.0];
    // Each closed-form pair must satisfy the grid system; then match the enumerator.
    let k = 34.0 / 9.0;
    let oracle: Vec<[f64; 2]> = u1s.iter().map(|&u1| [u1, k * u1 + u1 * u1]).collect();
    let oracle_ok = oracle
        .iter()
        .all(|&[u1, u2]| (k * u2 - u1 + u2 * u2).abs() <= 1e-12);
    let matched = e.solutions.len() == 4
        && oracle.iter().all(|o| {
            e.solutions
                .iter()
                .any(|s| max_abs_diff(&s.u.interior_values(), o) <= 1e-9)
        });
    let has_zero = e
        .solutions
        .iter()
        .any(|s| s.u.interior_values().iter().all(|v| v.abs() <= 1e-12));

    let p = problem(
        &axes,
        MeshParams::default(),
        "1 + 2*u^2",
        Default::default(),
    );
    let none = enumerate_small(&p, 20.0, 400).unwrap();
    let pass = diag_ok && oracle_ok && matched && has_zero && none.solutions.is_empty();
    (
        pass,
        format!(
            "diagonal {diag:.15}; u^2: {} solutions (closed form matched: {matched}); 1+2u^2: {} solutions",
            e.solutions.len(),
            none.solutions.len()
        ),
    )
}

const CASES: usize = 100;

fn ac9() -> Outcome {
    let mut failures: Vec<String> = Vec::new();
    let mut fail =
        |what: &str, case: usize, detail: String| failures.push(format!("{what}#{case}: {detail}"));

    // Self-adjointness and positivity.
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11);
    for case in 0..CASES {
        let g = random_grid(&mut rng);
        let op = assemble(g.clone()).unwrap();
        let n = g.interior_len();
        let u = GridFunction::from_interior(g.clone(), &random_vec(&mut rng, n)).unwrap();
        let v = GridFunction::from_interior(g.clone(), &random_vec(&mut rng, n)).unwrap();
        let auv = weighted_inner(&op.apply(&u).unwrap(), &v).unwrap();
        let uav = weighted_inner(&u, &op.apply(&v).unwrap()).unwrap();
        let auu = weighted_inner(&op.apply(&u).unwrap(), &u).unwrap();
        let scale = auv.abs().max(uav.abs()).max(1.0);
        if (auv - uav).abs() > 1e-10 * scale || auu <= 0.0 {
            fail("symmetry", case, format!("{auv} vs {uav}, <Au,u> = {auu}"));
        }
    }

    // Green's inverse against the operator.
    let mut rng = ChaCha8Rng::seed_from_u64(0xB22);
    for case in 0..CASES {
        let g = random_grid(&mut rng);
        let op = assemble(g.clone()).unwrap();
        let f = GridFunction::from_interior(g.clone(), &random_vec(&mut rng, g.interior_len()))
            .unwrap();
        let y = green_inverse(&op, &f).unwrap();
        let back = op.apply(&y).unwrap();
        let d1 = max_abs_diff(back.values(), f.values());
        let y2 = green_inverse(&op, &op.apply(&f).unwrap()).unwrap();
        let d2 = max_abs_diff(y2.values(), f.values());
        let scale = y.values().iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        if d1 > 1e-10 * scale * op.diag().iter().cloned().fold(1.0, f64::max) || d2 > 1e-10 {
            fail(
                "green",
                case,
                format!("A G f - f = {d1:.1e}, G A f - f = {d2:.1e}"),
            );
        }
    }

    // Parseval.
    let mut rng = ChaCha8Rng::seed_from_u64(0xC33);
    for case in 0..CASES {
        let g = random_grid(&mut rng);
        let spec = spectrum_1d(g.clone(), None).unwrap();
        let f = GridFunction::from_interior(g.clone(), &random_vec(&mut rng, g.interior_len()))
            .unwrap();
        let c = expand(&spec, &f).unwrap();
        let lhs: f64 = c.iter().map(|x| x * x).sum();
        let rhs = weighted_norm(&f).powi(2);
        if (lhs - rhs).abs() > 1e-9 * rhs {
            fail("parseval", case, format!("{lhs} vs {rhs}"));
        }
    }

    // λ₁ bound, inverse bound, energy inequality and contraction on product domains.
    let mut rng = ChaCha8Rng::seed_from_u64(0xD44);
    for case in 0..CASES {
        let pg = random_product(&mut rng, 3);
        let disc = Discretization::new(pg.clone()).unwrap();
        let lambda1 = disc.lambda1();
        let bound = lambda1_lower_bound_grids(pg.axes());
        if lambda1 < bound * (1.0 - 1e-12) {
            fail("lambda1-bound", case, format!("{lambda1} < {bound}"));
        }
        let inv = linear_inverse("spectral", &disc).unwrap();
        let w = disc.weights();
        let n = disc.unknowns();
        let f = random_vec(&mut rng, n);
        let x = inv.solve(&f);
        if interior_norm(w, &x) > interior_norm(w, &f) / lambda1 + 1e-10 {
            fail(
                "inverse-bound",
                case,
                format!(
                    "{} > {}",
                    interior_norm(w, &x),
                    interior_norm(w, &f) / lambda1
                ),
            );
        }
        let u = random_vec(&mut rng, n);
        let energy = interior_inner(w, &disc.operator().apply_interior(&u), &u);
        let floor = lambda1 * interior_norm(w, &u).powi(2);
        if energy < floor - 1e-10 * floor.max(1.0) {
            fail("energy", case, format!("{energy} < {floor}"));
        }
        let c = rand::Rng::gen_range(&mut rng, 0.0..0.95) * lambda1;
        let v = random_vec(&mut rng, n);
        let gu = inv.solve(&u.iter().map(|x| c * x).collect::<Vec<_>>());
        let gv = inv.solve(&v.iter().map(|x| c * x).collect::<Vec<_>>());
        let d_out: Vec<f64> = gu.iter().zip(&gv).map(|(a, b)| a - b).collect();
        let d_in: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
        if interior_norm(w, &d_out) > c / lambda1 * interior_norm(w, &d_in) + 1e-10 {
            fail("contraction", case, format!("c/λ₁ = {}", c / lambda1));
        }
    }

    // Observed Picard ratio for linear f.
    let mut rng = ChaCha8Rng::seed_from_u64(0xE55);
    for case in 0..CASES {
        let (base, lambda1) = loop {
            let dim = rand::Rng::gen_range(&mut rng, 1..=2);
            let axes: Vec<_> = (0..dim).map(|_| random_timescale(&mut rng)).collect();
            let mesh = MeshParams::Step(rand::Rng::gen_range(&mut rng, 0.15..0.5));
            let base = Problem::new(axes, mesh, Expression::parse("1").unwrap()).unwrap();
            if let Ok(d) = base.discretize() {
                break (base, d.lambda1());
            }
        };
        let c = rand::Rng::gen_range(&mut rng, 0.05..0.9) * lambda1;
        let f = Expression::parse(&format!("1 - {c}*u")).unwrap();
        let p = Problem { f, ..base }.with_hypotheses(lipschitz(c)).unwrap();
        let s = picard_solve(&p).unwrap();
        let bound = c / s.lambda1;
        match s.contraction_ratio {
            Some(r) if s.converged() && r <= bound + 1e-6 => {}
            r => fail(
                "picard-ratio",
                case,
                format!("{:?} vs {bound}, {}", r, s.status),
            ),
        }
    }

    // Summation by parts on random grids.
    let mut rng = ChaCha8Rng::seed_from_u64(0xF66);
    for case in 0..CASES {
        let g = random_grid(&mut rng);
        let m = g.len();
        let f = GridFunction::new(g.clone(), random_vec(&mut rng, m)).unwrap();
        let h = GridFunction::new(g.clone(), random_vec(&mut rng, m)).unwrap();
        let (fv, hv) = (f.values(), h.values());
        let prod = |d: Vec<Option<f64>>, other: &[f64]| {
            let vals = d
                .iter()
                .zip(other)
                .map(|(a, b)| a.unwrap_or(0.0) * b)
                .collect();
            GridFunction::new(g.clone(), vals).unwrap()
        };
        let boundary = fv[m - 1] * hv[m - 1] - fv[0] * hv[0];
        let lhs = delta_integral(&prod(delta_derivative(&f), hv));
        let rhs = boundary - nabla_integral(&prod(nabla_derivative(&h), fv));
        let lhs2 = nabla_integral(&prod(nabla_derivative(&f), hv));
        let rhs2 = boundary - delta_integral(&prod(delta_derivative(&h), fv));
        let scale = lhs.abs().max(rhs.abs()).max(boundary.abs()).max(1.0);
        if (lhs - rhs).abs() > 1e-12 * scale || (lhs2 - rhs2).abs() > 1e-12 * scale {
            fail("sbp", case, format!("{lhs} vs {rhs}; {lhs2} vs {rhs2}"));
        }
    }

    let pass = failures.is_empty();
    let detail = if pass {
        format!("8 properties x {CASES} seeded cases")
    } else {
        failures.join("; ")
    };
    (pass, detail)
}

fn ac10() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    let hybrid = ts("[0,1],2,3");
    let lambda1 = spectrum_1d(
        Arc::new(hybrid.discretize(&MeshParams::Step(0.05)).unwrap()),
        Some(1),
    )
    .unwrap()
    .lambda1();
    for (axis, mesh, l1) in [
        ("0,1,2,3", MeshParams::default(), 1.0),
        ("[0,1],2,3", MeshParams::Step(0.05), lambda1),
    ] {
        let bindings: BTreeMap<String, f64> = [("lambda1".to_string(), l1)].into();
        let f = Expression::parse_with("-lambda1*u", &bindings).unwrap();
        let h = GrowthHypotheses {
            lipschitz: Some(l1),
            alpha: Some(0.0),
            c_bound: Some(0.0),
        };
        let p = Problem::new(vec![ts(axis)], mesh, f)
            .unwrap()
            .with_hypotheses(h)
            .unwrap();
        let pic = picard_solve(&p).unwrap();
        let hom = homotopy_solve(&p).unwrap();
        let ok = pic.status == Status::NonContraction
            && pic.iterations == 0
            && hom.converged()
            && hom.residual <= 1e-8
            && hom.non_uniqueness_risk;
        pass &= ok;
        lines.push(format!(
            "{axis}: picard {}, homotopy {} residual {:.0e} non-uniqueness flagged {}",
            pic.status, hom.status, hom.residual, hom.non_uniqueness_risk
        ));
    }
    (pass, lines.join("; "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("discrete spectrum by matrix and shooting", ac1),
        ("first eigenvalues of the three comparison scales", ac2),
        ("hybrid higher modes", ac3),
        ("two-dimensional spectrum and constant source", ac4),
        ("hybrid linear solve at h = 1e-3", ac5),
        ("worked discrete solutions", ac6),
        ("nonexistence for 1 + u^2", ac7),
        ("three-dimensional coefficient and root count", ac8),
        ("randomized property suites", ac9),
        ("resonance handling", ac10),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = run();
        println!(
            "{} AC{:<2} {name}: {detail}",
            if pass { "PASS" } else { "FAIL" },
            k + 1
        );
        if !pass {
            failed.push(k + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
