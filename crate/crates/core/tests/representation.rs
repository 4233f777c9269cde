use lyalg::algebra::{abelian, cross_product_lie, example_3dim, meson, LyAlgebra};
use lyalg::cohomology::CochainPair;
use lyalg::linalg::{qf, Rational};
use lyalg::representation::{check_representation, check_rlyb7, semidirect, twisted_semidirect, Representation};
use proptest::prelude::*;

fn corpus() -> Vec<LyAlgebra> {
    vec![example_3dim(), meson(2), meson(3), cross_product_lie(), abelian(2)]
}

#[derive(Clone, Debug)]
enum Bump {
    None,
    Rho(usize),
    D(usize, usize),
    Theta(usize, usize),
}

fn bump() -> impl Strategy<Value = (Bump, usize, usize, Rational)> {
    let op = prop_oneof![
        Just(Bump::None),
        (0usize..3).prop_map(Bump::Rho),
        (0usize..3, 0usize..3).prop_map(|(i, j)| Bump::D(i, j)),
        (0usize..3, 0usize..3).prop_map(|(i, j)| Bump::Theta(i, j)),
    ];
    let amount = (-3i64..=3, 1i64..=3).prop_filter_map("nonzero", |(n, d)| (n != 0).then(|| qf(n, d)));
    (op, 0usize..3, 0usize..3, amount)
}

fn perturbed(a: &LyAlgebra, (op, row, col, x): &(Bump, usize, usize, Rational)) -> Representation {
    let mut r = Representation::adjoint(a).unwrap();
    let d = a.dim();
    let (row, col) = (row % d, col % d);
    let m = match *op {
        Bump::None => return r,
        Bump::Rho(i) => r.rho_mut(i % d),
        Bump::D(i, j) => r.d_op_mut(i % d, j % d),
        Bump::Theta(i, j) => r.theta_mut(i % d, j % d),
    };
    *m.entry_mut(row, col) += x;
    r
}

#[test]
fn adjoint_is_a_representation_across_corpus() {
    for a in corpus() {
        let r = Representation::adjoint(&a).unwrap();
        assert!(check_representation(&a, &r).unwrap().is_valid(), "{}", a.name());
        assert!(check_rlyb7(&a, &r).unwrap());
    }
}

#[test]
fn zero_twist_is_the_semidirect_product() {
    for a in corpus() {
        let d = a.dim();
        for r in [Representation::adjoint(&a).unwrap(), Representation::trivial(&a, 2)] {
            let e = r.module_dim();
            let plain = semidirect(&a, &r).unwrap();
            let twisted = twisted_semidirect(&a, &r, &CochainPair::zero(1, d, e)).unwrap();
            assert_eq!(plain.binary(), twisted.binary());
            assert_eq!(plain.ternary(), twisted.ternary());
        }
    }
}

#[test]
fn trivial_module_product_is_direct_sum() {
    let a = example_3dim();
    let p = semidirect(&a, &Representation::trivial(&a, 2)).unwrap();
    assert_eq!(p.dim(), 5);
    assert!(p.check_axioms().is_empty());
    for i in 0..5 {
        for j in 0..5 {
            let v = p.binary().get(i, j);
            if i >= 3 || j >= 3 {
                assert!(v.iter().all(|x| *x == qf(0, 1)));
            } else {
                assert_eq!(&v[..3], a.binary().get(i, j));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn representation_valid_iff_semidirect_valid(which in 0usize..5, b in bump()) {
        let a = &corpus()[which];
        let r = perturbed(a, &b);
        let rep_ok = check_representation(a, &r).unwrap().is_valid();
        let prod_ok = semidirect(a, &r).unwrap().check_axioms().is_empty();
        prop_assert_eq!(rep_ok, prod_ok, "{} {:?}", a.name(), b);
        if rep_ok {
            prop_assert!(check_rlyb7(a, &r).unwrap());
        }
    }
}
