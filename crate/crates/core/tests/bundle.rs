use lyalg::algebra::{derivations, example_3dim, is_automorphism, matrix_from_flat, meson};
use lyalg::bundle::{
    bundle_cohomology, check_cocycle, circle_bundle, der_bundle_dims, eval_transition, parse_expr, BinOp, BundleSpec,
    CocycleCheck, Coefficients, EvalMode, Evaluated, Expr, Func,
};
use lyalg::cohomology::{cohomology_report, DEFAULT_SIZE_CAP};
use lyalg::linalg::{qf, Matrix, Rational};
use lyalg::representation::Representation;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn exact(b: &BundleSpec, from: &str, to: &str, pt: &[Rational]) -> Matrix {
    let t = b.transition(from, to).unwrap();
    match eval_transition(b, t, pt, EvalMode::Exact).unwrap() {
        Evaluated::Exact(m) => m,
        Evaluated::Float(_) => unreachable!(),
    }
}

fn with_diagonals(first: &str, rest: &str, first_inv: &str, rest_inv: &str) -> BundleSpec {
    let mut b = circle_bundle(example_3dim());
    for (t, (x, y)) in b.transitions.iter_mut().zip([(first, rest), (first_inv, rest_inv)]) {
        for (r, row) in t.matrix.iter_mut().enumerate() {
            row[r] = parse_expr(if r == 0 { x } else { y }).unwrap();
        }
    }
    b
}

#[test]
fn product_bundle_matches_single_fibre() {
    for fiber in [example_3dim(), meson(2)] {
        let b = BundleSpec::product(fiber.clone(), vec![vec![qf(0, 1)], vec![qf(3, 2)]], vec!["t".into()]).unwrap();
        assert!(check_cocycle(&b, EvalMode::Exact).unwrap().passed());
        let r = Representation::adjoint(&fiber).unwrap();
        for p in [0, 1] {
            let single = cohomology_report(&fiber, &r, p, DEFAULT_SIZE_CAP).unwrap();
            let rep = bundle_cohomology(&b, p, Coefficients::Adjoint, EvalMode::Exact, DEFAULT_SIZE_CAP).unwrap();
            assert!(rep.constant);
            for (_, c) in &rep.points {
                assert_eq!(c, &single);
            }
        }
    }
}

#[test]
fn circle_transitions_commute_with_both_brackets() {
    let b = circle_bundle(example_3dim());
    assert!(check_cocycle(&b, EvalMode::Exact).unwrap().passed());
    let a = &b.fiber;
    let unit = |i: usize| (0..3).map(|k| qf((k == i) as i64, 1)).collect::<Vec<_>>();
    for t in &b.transitions {
        for pt in &t.samples {
            let g = exact(&b, &t.from, &t.to, pt);
            assert!(is_automorphism(&g, a).unwrap());
            for i in 0..3 {
                for j in 0..3 {
                    let (gi, gj) = (g.mul_vec(&unit(i)), g.mul_vec(&unit(j)));
                    assert_eq!(g.mul_vec(&a.bracket(&unit(i), &unit(j))), a.bracket(&gi, &gj));
                    for k in 0..3 {
                        let gk = g.mul_vec(&unit(k));
                        assert_eq!(
                            g.mul_vec(&a.triple(&unit(i), &unit(j), &unit(k))),
                            a.triple(&gi, &gj, &gk)
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn circle_transitions_are_mutually_inverse() {
    let b = circle_bundle(example_3dim());
    let t = b.transition("U1", "U2").unwrap();
    for k in 0..t.samples.len() {
        let (from, to) = t.sample_pair(k);
        let prod = &exact(&b, "U1", "U2", from) * &exact(&b, "U2", "U1", to);
        assert_eq!(prod, Matrix::identity(3));
    }
}

#[test]
fn derivations_survive_conjugation() {
    let b = circle_bundle(example_3dim());
    let der = derivations(&b.fiber).unwrap();
    let rep = der_bundle_dims(&b, EvalMode::Exact).unwrap();
    assert!(rep.passed());
    assert!(rep.points.iter().all(|(_, n)| *n == der.dim()));
    for t in &b.transitions {
        for pt in &t.samples {
            let s = exact(&b, &t.from, &t.to, pt);
            let inv = s.inverse().unwrap();
            for v in der.vectors() {
                let c = &(&s * &matrix_from_flat(3, v)) * &inv;
                assert!(der.contains(&lyalg::algebra::flatten_matrix(&c)));
            }
        }
    }
}

#[test]
fn float_mode_agrees_on_circle_bundle() {
    let b = circle_bundle(example_3dim());
    let rep = check_cocycle(&b, EvalMode::float()).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures.first());
}

fn rational() -> impl Strategy<Value = Rational> {
    (-7i64..=7, 1i64..=4).prop_map(|(n, d)| qf(n, d))
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        rational().prop_map(Expr::Num),
        Just(Expr::Var("t".into())),
        Just(Expr::Var("s".into())),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Bin(BinOp::Add, Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Bin(BinOp::Sub, Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Bin(BinOp::Mul, Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Bin(BinOp::Div, Box::new(a), Box::new(b))),
            (inner.clone(), -3i64..=3).prop_map(|(a, n)| Expr::Bin(BinOp::Pow, Box::new(a), Box::new(Expr::num(n)))),
            inner.clone().prop_map(|e| Expr::Call(Func::Cos, Box::new(e))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn display_reparses_to_an_equivalent_expression(e in expr(), t in rational(), s in rational()) {
        let coords = vec!["t".to_string(), "s".to_string()];
        let shown = e.to_string();
        let back = parse_expr(&shown).unwrap();
        let pt = [t, s];
        prop_assert_eq!(e.eval_exact(&coords, &pt), back.eval_exact(&coords, &pt), "{}", shown);
        prop_assert_eq!(back.to_string(), shown);
    }

    #[test]
    fn exact_and_float_evaluation_agree(e in expr(), t in rational(), s in rational()) {
        let coords = vec!["t".to_string(), "s".to_string()];
        if let Ok(q) = e.eval_exact(&coords, &[t.clone(), s.clone()]) {
            let x = q.to_f64().unwrap();
            let pt = [t.to_f64().unwrap(), s.to_f64().unwrap()];
            if let Ok(y) = e.eval_float(&coords, &pt) {
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{}: {} vs {}", e, x, y);
            }
        }
    }

    #[test]
    fn scaling_the_fibre_pair_glues(n in 1i64..=9, m in 1i64..=9, sign in prop::bool::ANY) {
        // diag(1, λ, λ) preserves both brackets of the 3dim fibre; diag(μ, 1, 1) does not
        let lam = if sign { -n } else { n };
        let ok = with_diagonals("1", &format!("{lam}/{m}"), "1", &format!("{m}/({lam})"));
        prop_assert!(check_cocycle(&ok, EvalMode::Exact).unwrap().passed());
        prop_assume!(lam != m);
        let bad = with_diagonals(&format!("{lam}/{m}"), "1", &format!("{m}/({lam})"), "1");
        let rep = check_cocycle(&bad, EvalMode::Exact).unwrap();
        prop_assert!(rep.failures_of(CocycleCheck::Automorphism).count() > 0);
    }
}
