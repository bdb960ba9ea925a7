mod common;

use common::{gauss_rank, random_obj, FIXTURES};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use surfhom_core::algebra::{
    associativity_residual, braided_tensor, braided_tensor_dims, check_cstar_algebra, module_residual,
    relative_tensor, relative_tensor_maps, verify_yd, AlgebraObject, HalfBraiding, ModuleObject, Side,
};
use surfhom_core::category::compose;
use surfhom_core::fusion::builtin;
use surfhom_core::linalg::{c, re};
use surfhom_core::reflection::build_reflection_algebra;
use surfhom_core::{FusionData, Obj};

/// Counts tree basis vectors `(i, j) -> k` with fibers by brute enumeration.
fn enumerate_tensor_fiber(d: &FusionData, a: &[usize], b: &[usize], k: usize) -> usize {
    let mut count = 0;
    for i in 0..d.rank() {
        for j in 0..d.rank() {
            for kk in d.channels(i, j) {
                if kk == k {
                    for _ in 0..a[i] {
                        for _ in 0..b[j] {
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    count
}

/// Coequalizer dimension per fiber from the dense difference matrix.
fn dense_coequalizer_dims(d: &FusionData, x: &ModuleObject, a: &AlgebraObject, y: &ModuleObject) -> Vec<usize> {
    let (_, tgt, f1, f2) = relative_tensor_maps(d, x, a, y).unwrap();
    let diff = f1.sub(&f2).unwrap();
    (0..d.rank())
        .map(|k| {
            let t = tgt.mult(k);
            match diff.block(k) {
                Some(m) => t - gauss_rank(m, 1e-9),
                None => t,
            }
        })
        .collect()
}

#[test]
fn unit_algebra_passes() {
    for name in FIXTURES {
        let d = builtin(name).unwrap();
        let a = AlgebraObject::unit_algebra(&d);
        let r = check_cstar_algebra(&d, &a);
        assert!(r.pass, "{name}: {r:?}");
        let y = verify_yd(&d, &a, &HalfBraiding::identity(&d, &a)).unwrap();
        assert!(y.pass, "{name}: {y:?}");
    }
}

#[test]
fn group_algebras_are_cstar() {
    for name in ["pointed:2:0", "pointed:3:1/3", "pointed:4:1/4"] {
        let d = builtin(name).unwrap();
        let a = AlgebraObject::group_algebra(&d).unwrap();
        let r = check_cstar_algebra(&d, &a);
        assert!(r.pass, "{name}: {r:?}");
    }
    assert!(AlgebraObject::group_algebra(&builtin("fib").unwrap()).is_err());
}

#[test]
fn reflection_algebra_is_cstar_and_yd() {
    for name in FIXTURES {
        let d = builtin(name).unwrap();
        let f = build_reflection_algebra(&d).unwrap();
        let r = check_cstar_algebra(&d, &f.algebra);
        assert!(r.pass, "{name}: {r:?}");
        let y = verify_yd(&d, &f.algebra, &f.half_braiding).unwrap();
        assert!(y.pass, "{name}: {y:?}");
    }
}

#[test]
fn identity_half_braiding_fails_on_non_pointed() {
    for name in ["fib", "ising"] {
        let d = builtin(name).unwrap();
        let f = build_reflection_algebra(&d).unwrap();
        let y = verify_yd(&d, &f.algebra, &HalfBraiding::identity(&d, &f.algebra)).unwrap();
        assert!(!y.pass, "{name}");
        assert!(y.residual("yd_equation") > 0.1, "{name}: {y:?}");
    }
}

#[test]
fn scaled_star_fails() {
    let d = builtin("fib").unwrap();
    let f = build_reflection_algebra(&d).unwrap();
    let bad = f.algebra.with_star_scaled(re(2.0));
    let r = check_cstar_algebra(&d, &bad);
    assert!(!r.pass);
    assert!(r.residual("star_involution") > 0.5, "{r:?}");
    let phase = f.algebra.with_star_scaled(c(0.0, 1.0));
    assert!(!check_cstar_algebra(&d, &phase).pass);
}

#[test]
fn braided_tensor_dims_match_enumeration() {
    for name in FIXTURES {
        let d = builtin(name).unwrap();
        let f = build_reflection_algebra(&d).unwrap().algebra;
        let u = AlgebraObject::unit_algebra(&d);
        for (a, b) in [(&f, &f), (&f, &u), (&u, &f)] {
            let dims = braided_tensor_dims(&d, a, b);
            for k in 0..d.rank() {
                assert_eq!(dims[k], enumerate_tensor_fiber(&d, &a.fibers, &b.fibers, k), "{name}");
            }
            let t = braided_tensor(&d, a, b).unwrap();
            assert_eq!(t.fibers, dims, "{name}");
        }
        assert_eq!(braided_tensor(&d, &f, &u).unwrap().fibers, f.fibers);
    }
    let ising = builtin("ising").unwrap();
    let f = build_reflection_algebra(&ising).unwrap().algebra;
    assert_eq!(braided_tensor_dims(&ising, &f, &f)[ising.unit()], 10);
}

#[test]
fn braided_tensor_is_cstar() {
    for name in ["trivial", "fib", "ising", "pointed:3:1/3"] {
        let d = builtin(name).unwrap();
        let f = build_reflection_algebra(&d).unwrap().algebra;
        let t = braided_tensor(&d, &f, &f).unwrap();
        let r = check_cstar_algebra(&d, &t);
        assert!(r.pass, "{name}: {r:?}");
    }
    for name in ["pointed:2:0", "pointed:4:1/4"] {
        let d = builtin(name).unwrap();
        let g = AlgebraObject::group_algebra(&d).unwrap();
        let t = braided_tensor(&d, &g, &g).unwrap();
        assert!(associativity_residual(&d, &t).unwrap() < 1e-9, "{name}");
        assert_eq!(t.fibers, vec![d.rank(); d.rank()]);
    }
}

#[test]
fn regular_and_free_modules() {
    for name in FIXTURES {
        let d = builtin(name).unwrap();
        let f = build_reflection_algebra(&d).unwrap().algebra;
        let right = ModuleObject::regular(&f, Side::Right);
        let left = ModuleObject::regular(&f, Side::Left);
        assert!(module_residual(&d, &f, &right).unwrap() < 1e-9, "{name}");
        assert!(module_residual(&d, &f, &left).unwrap() < 1e-9, "{name}");

        // A ⊗_A A ≅ A
        let (obj, q) = relative_tensor(&d, &right, &f, &left).unwrap();
        assert_eq!(obj.dims(d.rank()), f.fibers, "{name}");
        let (_, _, f1, f2) = relative_tensor_maps(&d, &right, &f, &left).unwrap();
        let e = compose(&q, &f1).unwrap().distance(&compose(&q, &f2).unwrap());
        assert!(e < 1e-9, "{name}: {e}");

        // (W ⊗ A) ⊗_A A ≅ W ⊗ A
        let mut rng = StdRng::seed_from_u64(7);
        let w = random_obj(&mut rng, d.rank(), 2);
        let free = ModuleObject::free_right(&d, &f, &w).unwrap();
        assert!(module_residual(&d, &f, &free).unwrap() < 1e-9, "{name}");
        let (obj, _) = relative_tensor(&d, &free, &f, &left).unwrap();
        assert_eq!(obj.dims(d.rank()), free.fibers, "{name}");
    }
}

#[test]
fn free_module_over_character_recovers_w() {
    let d = builtin("fib").unwrap();
    let refl = build_reflection_algebra(&d).unwrap();
    let f = &refl.algebra;
    let chi: Vec<_> = refl.counit.clone();
    let eps = ModuleObject::character(&d, f, &chi);
    assert!(module_residual(&d, f, &eps).unwrap() < 1e-9);
    for w in [Obj::simple(0), Obj::simple(1), Obj::from_pairs([(0, 2), (1, 1)])] {
        let free = ModuleObject::free_right(&d, f, &w).unwrap();
        let (obj, _) = relative_tensor(&d, &free, f, &eps).unwrap();
        assert_eq!(obj.dims(d.rank()), w.dims(d.rank()));
    }
}

#[test]
fn relative_tensor_matches_dense_oracle() {
    // the unit object is not a ℂ[Z/2]-module: g acts by zero but g·g = 1
    let d = builtin("pointed:2:0").unwrap();
    let g = AlgebraObject::group_algebra(&d).unwrap();
    let right = ModuleObject::regular(&g, Side::Right);
    let triv = ModuleObject::character(&d, &g, &[re(1.0)]);
    assert!(module_residual(&d, &g, &triv).unwrap() > 0.5);
    let (obj, _) = relative_tensor(&d, &right, &g, &triv).unwrap();
    assert_eq!(obj.dims(2), dense_coequalizer_dims(&d, &right, &g, &triv));
    assert_eq!(obj.dims(2), vec![0, 0]);

    // ε-twisted F over Z/2: F ⊗_F ε is the unit
    let refl = build_reflection_algebra(&d).unwrap();
    let eps = ModuleObject::character(&d, &refl.algebra, &refl.counit);
    assert!(module_residual(&d, &refl.algebra, &eps).unwrap() < 1e-9);
    let reg = ModuleObject::regular(&refl.algebra, Side::Right);
    let (obj, _) = relative_tensor(&d, &reg, &refl.algebra, &eps).unwrap();
    assert_eq!(obj.dims(2), vec![1, 0]);
    assert_eq!(obj.dims(2), dense_coequalizer_dims(&d, &reg, &refl.algebra, &eps));

    let mut rng = StdRng::seed_from_u64(11);
    for name in FIXTURES {
        let d = builtin(name).unwrap();
        let refl = build_reflection_algebra(&d).unwrap();
        let f = &refl.algebra;
        let eps = ModuleObject::character(&d, f, &refl.counit);
        let left = ModuleObject::regular(f, Side::Left);
        for _ in 0..3 {
            let w = random_obj(&mut rng, d.rank(), 2);
            let free = ModuleObject::free_right(&d, f, &w).unwrap();
            for y in [&eps, &left] {
                let (obj, _) = relative_tensor(&d, &free, f, y).unwrap();
                assert_eq!(obj.dims(d.rank()), dense_coequalizer_dims(&d, &free, f, y), "{name}");
            }
        }
    }
}

#[test]
fn relative_tensor_rejects_sides() {
    let d = builtin("fib").unwrap();
    let f = build_reflection_algebra(&d).unwrap().algebra;
    let right = ModuleObject::regular(&f, Side::Right);
    assert!(relative_tensor(&d, &right, &f, &right).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn braided_tensor_dims_are_symmetric(fix in 0usize..FIXTURES.len(), seed in any::<u64>()) {
        let d = builtin(FIXTURES[fix]).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random_obj(&mut rng, d.rank(), 3).dims(d.rank());
        let b = random_obj(&mut rng, d.rank(), 3).dims(d.rank());
        let mk = |fibers: Vec<usize>| {
            let mut x = AlgebraObject::unit_algebra(&d);
            x.fibers = fibers;
            x
        };
        let (x, y) = (mk(a.clone()), mk(b.clone()));
        let ab = braided_tensor_dims(&d, &x, &y);
        prop_assert_eq!(&ab, &braided_tensor_dims(&d, &y, &x));
        let total: usize = ab.iter().sum();
        let expect: usize = (0..d.rank())
            .map(|k| enumerate_tensor_fiber(&d, &a, &b, k))
            .sum();
        prop_assert_eq!(total, expect);
    }
}
