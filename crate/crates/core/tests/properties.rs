mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tselliptic::nonlinearity::{nemytskii_interior, BinaryOp, Expression, Node, UnaryOp, Var};
use tselliptic::solver::{linear_inverse, Discretization};
use tselliptic::timescale::{
    delta_derivative, delta_integral, nabla_derivative, nabla_integral, GridFunction, TimeScale,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn leaf() -> impl Strategy<Value = Node> {
    prop_oneof![
        (-50.0..50.0f64).prop_map(Node::Const),
        (0u32..1000).prop_map(|n| Node::Const(n as f64 / 8.0)),
        Just(Node::Var(Var::U)),
        (1usize..=3).prop_map(|k| Node::Var(Var::X(k))),
    ]
}

fn node() -> impl Strategy<Value = Node> {
    leaf().prop_recursive(5, 40, 2, |inner| {
        let unary = prop_oneof![
            Just(UnaryOp::Neg),
            Just(UnaryOp::Sin),
            Just(UnaryOp::Cos),
            Just(UnaryOp::Exp),
            Just(UnaryOp::Abs),
            Just(UnaryOp::Sqrt),
        ];
        let binary = prop_oneof![
            Just(BinaryOp::Add),
            Just(BinaryOp::Sub),
            Just(BinaryOp::Mul),
            Just(BinaryOp::Div),
        ];
        prop_oneof![
            (unary, inner.clone()).prop_map(|(op, a)| Node::Unary(op, Box::new(a))),
            (binary, inner.clone(), inner.clone()).prop_map(|(op, l, r)| Node::Binary(
                op,
                Box::new(l),
                Box::new(r)
            )),
            (inner, -3i32..=4).prop_map(|(b, n)| Node::Pow(Box::new(b), n)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn expression_print_parse_round_trip(root in node()) {
        let e = Expression::from_node(root);
        let text = e.to_string();
        let back: Expression = text.parse().unwrap();
        prop_assert_eq!(&back, &e, "printed as {}", text);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn expression_evaluates_like_its_tree(root in node(), u in -3.0..3.0f64) {
        let e = Expression::from_node(root);
        let back: Expression = e.to_string().parse().unwrap();
        let x = [0.3, -1.1, 2.0];
        match (e.eval(&x, u), back.eval(&x, u)) {
            (Ok(a), Ok(b)) => prop_assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn timescale_literal_round_trip(seed in any::<u64>()) {
        let ts = common::random_timescale(&mut rng(seed));
        let back: TimeScale = ts.to_string().parse().unwrap();
        prop_assert_eq!(back, ts);
    }

    #[test]
    fn summation_by_parts(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = common::random_grid(&mut r);
        let n = g.len();
        let u = GridFunction::new(g.clone(), common::random_vec(&mut r, n)).unwrap();
        let v = GridFunction::new(g.clone(), common::random_vec(&mut r, n)).unwrap();
        let (uv, vv) = (u.values(), v.values());
        let boundary = uv[n - 1] * vv[n - 1] - uv[0] * vv[0];

        // Δ form: ∫ u^Δ v = [uv] - ∫ u^σ v^Δ over [a, b).
        let ud = delta_derivative(&u);
        let vd = delta_derivative(&v);
        let lhs: Vec<f64> = (0..n).map(|i| ud[i].map_or(0.0, |d| d * vv[i])).collect();
        let rhs: Vec<f64> = (0..n)
            .map(|i| vd[i].map_or(0.0, |d| uv[(i + 1).min(n - 1)] * d))
            .collect();
        let l = delta_integral(&GridFunction::new(g.clone(), lhs).unwrap());
        let s = delta_integral(&GridFunction::new(g.clone(), rhs).unwrap());
        prop_assert!((l - (boundary - s)).abs() <= 1e-12 * (1.0 + boundary.abs() + s.abs()) * n as f64);

        // ∇ form: ∫ u^∇ v = [uv] - ∫ u^ρ v^∇ over (a, b].
        let un = nabla_derivative(&u);
        let vn = nabla_derivative(&v);
        let lhs: Vec<f64> = (0..n).map(|i| un[i].map_or(0.0, |d| d * vv[i])).collect();
        let rhs: Vec<f64> = (0..n)
            .map(|i| vn[i].map_or(0.0, |d| uv[i.saturating_sub(1)] * d))
            .collect();
        let l = nabla_integral(&GridFunction::new(g.clone(), lhs).unwrap());
        let s = nabla_integral(&GridFunction::new(g, rhs).unwrap());
        prop_assert!((l - (boundary - s)).abs() <= 1e-12 * (1.0 + boundary.abs() + s.abs()) * n as f64);
    }

    #[test]
    fn nemytskii_transfers_lipschitz_constant(seed in any::<u64>(), c in -5.0..5.0f64) {
        let mut r = rng(seed);
        let grid = common::random_product(&mut r, 3);
        let d = Discretization::new(grid).unwrap();
        let e = Expression::parse(&format!("({c})*u + sin(x1)")).unwrap();
        let n = d.unknowns();
        let u = common::random_vec(&mut r, n);
        let v = common::random_vec(&mut r, n);
        let fu = nemytskii_interior(&e, d.coords(), &u).unwrap();
        let fv = nemytskii_interior(&e, d.coords(), &v).unwrap();
        let df: Vec<f64> = fu.iter().zip(&fv).map(|(a, b)| a - b).collect();
        let dx: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
        prop_assert!(d.norm(&df) <= c.abs() * d.norm(&dx) * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn inverse_norm_bounded_by_first_eigenvalue(seed in any::<u64>()) {
        let mut r = rng(seed);
        let grid = common::random_product(&mut r, 2);
        let d = Discretization::new(grid).unwrap();
        let f = common::random_vec(&mut r, d.unknowns());
        let x = linear_inverse("auto", &d).unwrap().solve(&f);
        prop_assert!(d.norm(&x) <= d.norm(&f) / d.lambda1() * (1.0 + 1e-9));
    }
}

#[test]
fn negative_literals_fold_only_without_power() {
    let e: Expression = "-2*u".parse().unwrap();
    assert_eq!(
        e.root(),
        &Node::Binary(
            BinaryOp::Mul,
            Box::new(Node::Const(-2.0)),
            Box::new(Node::Var(Var::U))
        )
    );
    let e: Expression = "-2^2".parse().unwrap();
    assert_eq!(e.eval(&[], 0.0).unwrap(), -4.0);
    let e: Expression = "(-2)^2".parse().unwrap();
    assert_eq!(e.eval(&[], 0.0).unwrap(), 4.0);
}
