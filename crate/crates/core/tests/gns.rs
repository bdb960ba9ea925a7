mod common;

use common::random_mat;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use surfhom_core::fusion::builtin;
use surfhom_core::gluing::{build_a_p, parse_pattern, DEFAULT_CAP};
use surfhom_core::gns::{gns, realize_inclusion, weighted_inner_identity_check, GroundAlgebra, RealizationDatum, State};
use surfhom_core::linalg::{c, re, CMat};
use surfhom_core::reflection::build_reflection_algebra;
use surfhom_core::Error;

/// `ω(E_ij) = ρ_ji` for the density matrix `ρ`.
fn density_state(rho: &CMat) -> State {
    let n = rho.nrows();
    State::new((0..n * n).map(|k| rho[(k % n, k / n)]).collect())
}

fn random_density(seed: u64, n: usize, rank: usize) -> CMat {
    let mut rng = StdRng::seed_from_u64(seed);
    let b = random_mat(&mut rng, n, rank);
    let rho = &b * b.adjoint();
    let t = rho.trace();
    rho / t
}

fn check_gns(b: &GroundAlgebra, w: &State) -> surfhom_core::gns::Gns {
    let g = gns(b, w).unwrap();
    assert!(g.cyclic_residual < 1e-8, "{}", g.cyclic_residual);
    assert!(g.homomorphism_residual < 1e-8, "{}", g.homomorphism_residual);
    assert!(g.star_residual < 1e-8, "{}", g.star_residual);
    assert_eq!(g.gram_rank + g.kernel_dim, b.dim());
    assert_eq!(g.pi.len(), b.dim());
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn gns_of_density_states(seed in any::<u64>(), n in 1usize..4, rank in 1usize..4) {
        let rank = rank.min(n);
        let b = GroundAlgebra::matrix_algebra(n);
        let w = density_state(&random_density(seed, n, rank));
        prop_assert!(w.validate(&b).pass);
        let g = check_gns(&b, &w);
        prop_assert_eq!(g.gram_rank, n * rank);
        prop_assert_eq!(g.faithful_state, rank == n);
        // M_n is simple, so every nonzero representation is faithful
        prop_assert!(g.faithful_representation);
    }
}

#[test]
fn gns_on_reflection_ground_algebras() {
    for name in common::FIXTURES {
        let d = builtin(name).unwrap();
        let f = build_reflection_algebra(&d).unwrap();
        let b = GroundAlgebra::from_algebra(&d, &f.algebra);
        let tr = State::normalized_trace(&b);
        assert!(tr.validate(&b).pass, "{name}");
        let g = check_gns(&b, &tr);
        assert!(g.faithful_state && g.faithful_representation && g.iff_holds, "{name}");
        let e = check_gns(&b, &State::new(f.counit.clone()));
        assert_eq!(e.gram_rank, 1, "{name}");
        assert!(e.iff_holds, "{name}");
    }
}

#[test]
fn faithfulness_examples() {
    let g = check_gns(&GroundAlgebra::scalars(), &State::new(vec![re(1.0)]));
    assert!(g.faithful_state && g.iff_holds);

    let m2 = GroundAlgebra::matrix_algebra(2);
    let g = check_gns(&m2, &State::normalized_trace(&m2));
    assert!(g.faithful_state && g.faithful_representation);
    let mut pure = CMat::zeros(2, 2);
    pure[(0, 0)] = re(1.0);
    let g = check_gns(&m2, &density_state(&pure));
    assert_eq!((g.gram_rank, g.kernel_dim, g.representation_kernel), (2, 2, 0));
    assert!(!g.faithful_state && g.faithful_representation && !g.iff_holds);

    let d = builtin("ising").unwrap();
    let f = build_reflection_algebra(&d).unwrap();
    let b = GroundAlgebra::from_algebra(&d, &f.algebra);
    let g = check_gns(&b, &State::new(f.counit.clone()));
    assert_eq!((g.gram_rank, g.kernel_dim, g.representation_kernel), (1, 2, 2));
    assert!(!g.faithful_state && g.iff_holds);
}

#[test]
fn negative_state_is_rejected() {
    let m2 = GroundAlgebra::matrix_algebra(2);
    let mut bad = CMat::zeros(2, 2);
    bad[(0, 0)] = re(2.0);
    bad[(1, 1)] = re(-1.0);
    let w = density_state(&bad);
    assert!(!w.validate(&m2).pass);
    assert!(matches!(gns(&m2, &w), Err(Error::NonPositiveState(_))));
    let skew = State::new(vec![re(0.5), c(0.0, 1.0), re(0.0), re(0.5)]);
    assert!(!skew.validate(&m2).pass);
}

#[test]
fn inclusion_is_a_conditional_expectation() {
    let mut rng = StdRng::seed_from_u64(5);
    let torus = parse_pattern("1 2 1' 2'").unwrap();
    for name in ["trivial", "pointed:2:0"] {
        let d = builtin(name).unwrap();
        let phi = RealizationDatum::for_category(&d).unwrap();
        assert!(phi.validate(&d).pass, "{name}");
        let f = build_reflection_algebra(&d).unwrap();
        let a_p = build_a_p(&torus, &d, DEFAULT_CAP).unwrap();
        for a in [&f.algebra, &a_p] {
            let b = GroundAlgebra::from_algebra(&d, a);
            let tr = State::normalized_trace(&b);
            let inc = realize_inclusion(&d, a, &tr, &phi, 50, &mut rng).unwrap();
            assert!(inc.report.pass, "{name}: {:?}", inc.report);
            for check in ["unital", "idempotent", "onto_base", "bimodular", "kadison", "positive"] {
                assert!(inc.report.get(check).unwrap().pass, "{name} {check}");
            }
            assert!(inc.faithful_state && inc.faithful_expectation && inc.iff_holds, "{name}");
            let x: Vec<_> = (0..inc.realized.algebra.dim()).map(|k| c(k as f64, 1.0)).collect();
            let ex = inc.apply(&x);
            assert_eq!(ex.len(), inc.base.dim());
            let back = inc.apply(&inc.embed(&ex));
            for (p, q) in ex.iter().zip(&back) {
                assert!((p - q).norm() < 1e-9);
            }
        }
    }
    // the counit is not faithful on F(1) over Z/2, and neither is E
    let d = builtin("pointed:2:0").unwrap();
    let phi = RealizationDatum::for_category(&d).unwrap();
    let f = build_reflection_algebra(&d).unwrap();
    let inc = realize_inclusion(&d, &f.algebra, &State::new(f.counit.clone()), &phi, 20, &mut rng).unwrap();
    assert!(inc.report.pass);
    assert!(!inc.faithful_state && !inc.faithful_expectation && inc.iff_holds);
    assert_eq!(inc.state_nullity, 1);
}

#[test]
fn weighted_inner_identity() {
    let mut rng = StdRng::seed_from_u64(9);
    let torus = parse_pattern("1 2 1' 2'").unwrap();
    for name in ["trivial", "pointed:2:0"] {
        let d = builtin(name).unwrap();
        let phi = RealizationDatum::for_category(&d).unwrap();
        let f = build_reflection_algebra(&d).unwrap();
        let a_p = build_a_p(&torus, &d, DEFAULT_CAP).unwrap();
        for a in [&f.algebra, &a_p] {
            let b = GroundAlgebra::from_algebra(&d, a);
            for w in [State::normalized_trace(&b), State::new(f.counit.clone())] {
                if w.values.len() != b.dim() {
                    continue;
                }
                let r = weighted_inner_identity_check(&d, a, &w, &phi, 100, &mut rng).unwrap();
                assert!(r.pass, "{name}: {r:?}");
            }
        }
    }
}

#[test]
fn realizations_are_only_shipped_where_finite() {
    for name in ["fib", "ising", "pointed:3:1/3"] {
        let d = builtin(name).unwrap();
        assert!(RealizationDatum::for_category(&d).is_err(), "{name}");
    }
    assert!(RealizationDatum::trivial(&builtin("fib").unwrap()).is_err());
    let d = builtin("pointed:4:0").unwrap();
    let phi = RealizationDatum::regular(&d).unwrap();
    assert_eq!(phi.dims, vec![4; 4]);
    assert_eq!(phi.base_algebra(&d).commutativity_residual(), 0.0);
}
