use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use twohol::complex::TwoComplex;
use twohol::gauge::{apply_gauge, GaugeParam};
use twohol::group;
use twohol::holonomy::{enumerate_fake_flat, is_fake_flat};
use twohol::io::CrossedModuleFile;
use twohol::ribbon::{gallery, identity_cylinder};
use twohol::scalar::Cyclotomic;
use twohol::selftest::corruptions;
use twohol::wilson::{compose_states, evaluate, Normalization, WilsonState};

fn cyclotomic(order: u64) -> impl Strategy<Value = Cyclotomic> {
    prop::collection::vec((-4i64..5, 1i64..4), order as usize).prop_map(move |c| {
        Cyclotomic::from_parts(
            order,
            c.into_iter()
                .map(|(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
                .collect(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn crossed_module_identities(k in 0usize..5, a in 0usize..64, b in 0usize..64, x in 0usize..64) {
        let (_, cm) = group::samples().swap_remove(k);
        let (g, h) = (cm.base(), cm.fiber());
        let (a, b, x) = (a % h.order(), b % h.order(), x % g.order());
        prop_assert_eq!(cm.t(h.mul(a, b)), g.mul(cm.t(a), cm.t(b)));
        prop_assert_eq!(cm.t(cm.act(x, a)), g.mul(g.mul(x, cm.t(a)), g.inv(x)));
        prop_assert_eq!(cm.act(cm.t(a), b), h.mul(h.mul(a, b), h.inv(a)));
    }

    #[test]
    fn corrupted_tables_keep_their_verdict_after_serde(k in 0usize..5, pick in any::<prop::sample::Index>()) {
        let (_, cm) = group::samples().swap_remove(k);
        let all = corruptions(&CrossedModuleFile::from_cm(&cm));
        prop_assume!(!all.is_empty());
        let c = &all[pick.index(all.len())];
        let back: CrossedModuleFile = serde_json::from_str(&serde_json::to_string(c).unwrap()).unwrap();
        prop_assert_eq!(&back, c);
        let verdict = |f: &CrossedModuleFile| f.to_cm().map(|x| x.validate().len()).ok();
        prop_assert_eq!(verdict(&back), verdict(c));
    }

    #[test]
    fn cyclotomic_ring_laws(a in cyclotomic(4), b in cyclotomic(4), c in cyclotomic(4)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
    }

    #[test]
    fn gauge_preserves_fake_flatness(k in 0usize..5, pick in any::<prop::sample::Index>(), seed in prop::collection::vec(0usize..64, 16)) {
        let (_, cm) = group::samples().swap_remove(k);
        let c = TwoComplex::square();
        let (_, it) = enumerate_fake_flat(&cm, &c, &vec![None; c.edges().len()]).unwrap();
        let all: Vec<_> = it.collect();
        let d = &all[pick.index(all.len())];
        let z = GaugeParam {
            vertices: (0..c.n_vertices()).map(|v| seed[v] % cm.base().order()).collect(),
            edges: (0..c.edges().len()).map(|e| seed[8 + e] % cm.fiber().order()).collect(),
        };
        let moved = apply_gauge(&cm, &c, &z, d).unwrap();
        prop_assert!(is_fake_flat(&cm, &c, &moved).unwrap());
    }

    #[test]
    fn ribbon_daggers_and_state_serde(pick in any::<prop::sample::Index>(), k in 0usize..3) {
        let cm = [group::cm_02(), group::cm_id2(), group::cm_triv()][k].clone();
        let all = gallery();
        let (_, r) = &all[pick.index(all.len())];
        prop_assert!(r.dagger1().dagger1().is_isomorphic(r));
        prop_assert!(r.dagger2().dagger2().is_isomorphic(r));
        prop_assert_eq!(r.source().reversed().reversed(), r.source().clone());
        let s = evaluate(&cm, r, None).unwrap();
        let back: WilsonState = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn identity_cylinder_is_a_unit(pick in any::<prop::sample::Index>()) {
        let cm = group::cm_02();
        let norm = Normalization::for_cm(&cm);
        let all: Vec<_> = gallery().into_iter().filter(|(_, r)| r.target().vertices > 0 && r.target().vertices <= 3).collect();
        let (_, r) = &all[pick.index(all.len())];
        let s = evaluate(&cm, r, None).unwrap();
        let id = evaluate(&cm, &identity_cylinder(r.target()).unwrap(), None).unwrap();
        prop_assert_eq!(compose_states(&norm, &cm, &s, &id).unwrap().forget_markings(), s.forget_markings());
    }
}
