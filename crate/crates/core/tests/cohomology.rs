use lyalg::algebra::{abelian, cross_product_lie, derivations, example_3dim, meson, Axiom};
use lyalg::cohomology::*;
use lyalg::linalg::{kernel_basis, q, Matrix, Rational, SubspaceBasis};
use lyalg::representation::{check_representation, semidirect, twisted_semidirect, Representation};
use lyalg::LyAlgebra;
use proptest::prelude::*;

fn corpus() -> Vec<(LyAlgebra, Representation)> {
    let mut out = Vec::new();
    for a in [example_3dim(), meson(2), meson(3), cross_product_lie()] {
        let r = Representation::adjoint(&a).unwrap();
        out.push((a.clone(), r));
        out.push((a.clone(), Representation::trivial(&a, 2)));
    }
    out
}

fn all_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

fn defect_vector(p: &LyAlgebra) -> Vec<Rational> {
    let mut v = Vec::new();
    for ax in Axiom::ALL {
        for t in all_tuples(p.dim(), ax.arity()) {
            v.extend(p.axiom_defect(ax, &t));
        }
    }
    v
}

/// Twists `τ` for which the twisted semi-direct product satisfies every
/// identity, computed from the identities alone. Defects are linear in `τ`
/// because the module is an abelian ideal.
fn valid_twists(a: &LyAlgebra, r: &Representation) -> SubspaceBasis {
    let (d, e) = (a.dim(), r.module_dim());
    let n = pair_space_dim(1, d, e);
    let base = defect_vector(&semidirect(a, r).unwrap());
    assert!(base.iter().all(|x| *x == q(0)));
    let columns: Vec<Vec<Rational>> = (0..n)
        .map(|idx| defect_vector(&twisted_semidirect(a, r, &unit_pair(1, d, e, idx)).unwrap()))
        .collect();
    let rows: Vec<Vec<Rational>> = (0..columns[0].len())
        .map(|i| columns.iter().map(|c| c[i].clone()).collect::<Vec<_>>())
        .filter(|row| row.iter().any(|x| *x != q(0)))
        .collect();
    let row_space = SubspaceBasis::new(n, rows);
    if row_space.dim() == 0 {
        return SubspaceBasis::full(n);
    }
    kernel_basis(&Matrix::from_rows(row_space.vectors().to_vec()).unwrap())
}

fn same_subspace(x: &SubspaceBasis, y: &SubspaceBasis) -> bool {
    x.contains_subspace(y) && y.contains_subspace(x)
}

#[test]
fn cocycles_are_exactly_the_valid_twists() {
    let cases = [
        (example_3dim(), true),
        (meson(2), true),
        (abelian(2), false),
        (example_3dim(), false),
    ];
    for (a, adjoint) in cases {
        let r = if adjoint {
            Representation::adjoint(&a).unwrap()
        } else {
            Representation::trivial(&a, 1)
        };
        let oracle = valid_twists(&a, &r);
        let z = h23(&a, &r).unwrap().z;
        assert!(same_subspace(&oracle, &z), "{} adjoint={adjoint}", a.name());
    }
}

/// Module part of an identity defect of the twisted product, at algebra arguments.
fn module_defect(p: &LyAlgebra, d: usize, ax: Axiom, t: &[usize]) -> Vec<Rational> {
    p.axiom_defect(ax, t)[d..].to_vec()
}

fn sample_twist(d: usize, e: usize, seed: i64) -> CochainPair {
    let n = pair_space_dim(1, d, e);
    let v: Vec<Rational> = (0..n as i64).map(|i| q((i * 7 + seed * 3) % 5 - 2)).collect();
    CochainPair::from_vector(1, d, e, &v).unwrap()
}

/// δ and δ* read off the identities of the twisted product, term by term:
/// δ*_I from LY3, δ*_II from LY4, δ_I from LY5, δ_II from LY6.
fn coboundaries_match_identity_defects(a: &LyAlgebra, r: &Representation, signs: DeltaStarSigns, seed: i64) -> bool {
    let (d, e) = (a.dim(), r.module_dim());
    let tau = sample_twist(d, e, seed);
    let p = twisted_semidirect(a, r, &tau).unwrap();
    let v = tau.to_vector();
    let star = delta_star_matrix_with_signs(a, r, signs).unwrap().mul_vec(&v);
    let s1 = delta_star_i_shape(d, e);
    let s2 = delta_star_ii_shape(d, e);
    let n1 = s1.len();
    let star_i = Cochain::from_coeffs(s1, star[..n1].to_vec()).unwrap();
    let star_ii = Cochain::from_coeffs(s2, star[n1..].to_vec()).unwrap();
    let dt = delta(a, r, &tau).unwrap();
    let checks: [(Axiom, &Cochain); 4] = [
        (Axiom::Ly3, &star_i),
        (Axiom::Ly4, &star_ii),
        (Axiom::Ly5, dt.f()),
        (Axiom::Ly6, dt.g()),
    ];
    checks.iter().all(|(ax, c)| {
        all_tuples(d, ax.arity())
            .iter()
            .all(|t| module_defect(&p, d, *ax, t) == c.eval(t))
    })
}

#[test]
fn coboundaries_are_identity_defects_of_twisted_products() {
    for (a, r) in corpus() {
        for seed in 0..2 {
            assert!(
                coboundaries_match_identity_defects(&a, &r, DeltaStarSigns::STANDARD, seed),
                "{}",
                a.name()
            );
        }
    }
}

#[test]
fn delta_star_signs_are_forced() {
    let patterns: Vec<DeltaStarSigns> = (0..64u32)
        .map(|m| DeltaStarSigns {
            rho: [m & 1 != 0, m & 2 != 0, m & 4 != 0],
            theta: [m & 8 != 0, m & 16 != 0, m & 32 != 0],
        })
        .collect();
    let annihilating: Vec<DeltaStarSigns> = patterns
        .iter()
        .copied()
        .filter(|&s| {
            corpus().iter().all(|(a, r)| {
                let ds = delta_star_matrix_with_signs(a, r, s).unwrap();
                (&ds * &delta_zero_matrix(a, r).unwrap()).is_zero()
            })
        })
        .collect();
    assert!(annihilating.contains(&DeltaStarSigns::STANDARD));
    let a = cross_product_lie();
    let r = Representation::adjoint(&a).unwrap();
    let exact: Vec<DeltaStarSigns> = annihilating
        .into_iter()
        .filter(|&s| coboundaries_match_identity_defects(&a, &r, s, 1))
        .collect();
    assert_eq!(exact, vec![DeltaStarSigns::STANDARD]);
}

#[test]
fn coboundary_squares_vanish_on_corpus() {
    for (a, r) in corpus() {
        let d0 = delta_zero_matrix(&a, &r).unwrap();
        let d1 = delta_matrix(&a, &r, 1).unwrap();
        let d2 = delta_matrix(&a, &r, 2).unwrap();
        assert!((&d1 * &d0).is_zero(), "{}", a.name());
        assert!((&delta_star_matrix(&a, &r).unwrap() * &d0).is_zero(), "{}", a.name());
        assert!((&d2 * &d1).is_zero(), "{}", a.name());
    }
    let a = meson(2);
    let r = Representation::adjoint(&a).unwrap();
    let d3 = delta_matrix(&a, &r, 3).unwrap();
    assert!((&d3 * &delta_matrix(&a, &r, 2).unwrap()).is_zero());
}

#[test]
fn coboundary_square_vanishes_on_semidirect_module() {
    let a = example_3dim();
    let r = Representation::adjoint(&a).unwrap();
    let big = semidirect(&a, &r).unwrap();
    let rb = Representation::trivial(&big, 1);
    assert!(check_representation(&big, &rb).unwrap().is_valid());
    let d1 = delta_matrix(&big, &rb, 1).unwrap();
    assert!((&d1 * &delta_zero_matrix(&big, &rb).unwrap()).is_zero());
}

#[test]
fn first_cohomology_is_derivations_for_adjoint() {
    for a in [example_3dim(), meson(2), meson(3), cross_product_lie(), abelian(2)] {
        let r = Representation::adjoint(&a).unwrap();
        assert_eq!(h1(&a, &r).unwrap().0, derivations(&a).unwrap().dim(), "{}", a.name());
    }
}

#[test]
fn abelian_trivial_groups() {
    let a = abelian(2);
    let r = Representation::trivial(&a, 1);
    let rep = cohomology_report(&a, &r, 1, DEFAULT_SIZE_CAP).unwrap();
    assert_eq!((rep.dim_z, rep.dim_b, rep.dim_h), (3, 0, 3));
    assert!(rep.delta_squared_zero);
    let rep = cohomology_report(&a, &r, 0, DEFAULT_SIZE_CAP).unwrap();
    assert_eq!(rep.dim_h, 2);
}

#[test]
fn coboundaries_twist_to_isomorphic_products() {
    // τ = δf twists g ⋉ V into an algebra isomorphic to g ⋉ V via x + u ↦ x + u − f(x).
    let a = example_3dim();
    let r = Representation::adjoint(&a).unwrap();
    let f = Matrix::from_i64(&[&[1, 0, 2], &[0, -1, 0], &[3, 1, 1]]);
    let tau = delta_zero(&a, &r, &f).unwrap();
    let twisted = twisted_semidirect(&a, &r, &tau).unwrap();
    let plain = semidirect(&a, &r).unwrap();
    let phi = Matrix::from_fn(6, 6, |i, j| {
        if i == j {
            q(1)
        } else if i >= 3 && j < 3 {
            -f.get(i - 3, j).clone()
        } else {
            q(0)
        }
    });
    let ok_forward = lyalg::algebra::is_homomorphism(&phi, &twisted, &plain).unwrap();
    let psi = phi.inverse().unwrap();
    let ok_backward = lyalg::algebra::is_homomorphism(&psi, &twisted, &plain).unwrap();
    assert!(ok_forward || ok_backward);
    assert!(twisted.is_valid());
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-3i64..=3).prop_map(q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn delta_of_delta_is_zero(coeffs in prop::collection::vec(small_rational(), 36), which in 0usize..4) {
        let a = [example_3dim(), meson(3), cross_product_lie(), example_3dim()][which].clone();
        let r = if which == 3 { Representation::trivial(&a, 3) } else { Representation::adjoint(&a).unwrap() };
        let c = CochainPair::from_vector(1, 3, 3, &coeffs).unwrap();
        let dc = delta(&a, &r, &c).unwrap();
        prop_assert!(delta(&a, &r, &dc).unwrap().is_zero());
    }

    #[test]
    fn coboundaries_are_cocycles(entries in prop::collection::vec(small_rational(), 9), which in 0usize..3) {
        let a = [example_3dim(), meson(3), cross_product_lie()][which].clone();
        let r = Representation::adjoint(&a).unwrap();
        let f = Matrix::from_fn(3, 3, |i, j| entries[3 * i + j].clone());
        let tau = delta_zero(&a, &r, &f).unwrap();
        prop_assert!(is_23_cocycle(&a, &r, &tau).unwrap());
        let (s1, s2) = delta_star(&a, &r, &tau).unwrap();
        prop_assert!(s1.is_zero() && s2.is_zero());
        prop_assert!(twisted_semidirect(&a, &r, &tau).unwrap().is_valid());
    }

    #[test]
    fn cochains_vanish_on_repeated_pairs(coeffs in prop::collection::vec(small_rational(), 27), x in 0usize..3, y in 0usize..3, z in 0usize..3) {
        let g = Cochain::from_coeffs(CochainShape::degree(3, 3, 3), coeffs).unwrap();
        prop_assert!(g.eval(&[x, x, y]).iter().all(|v| *v == q(0)));
        let lhs = g.eval(&[x, y, z]);
        let rhs = g.eval(&[y, x, z]);
        prop_assert!(lhs.iter().zip(&rhs).all(|(u, v)| u + v == q(0)));
    }
}
