use twohol::complex::TwoComplex;
use twohol::gauge::{self, GaugeParam, Support};
use twohol::group::{self, CrossedModule};
use twohol::holonomy::{self, Decoration};

/// Every decoration, fake-flat or not.
fn all_decorations(cm: &CrossedModule, c: &TwoComplex) -> Vec<Decoration> {
    let ne = c.edges().len();
    let nf = c.faces().len();
    let (g, h) = (cm.base().order(), cm.fiber().order());
    let total = g.pow(ne as u32) * h.pow(nf as u32);
    (0..total)
        .map(|mut k| {
            let edges = (0..ne)
                .map(|_| {
                    let x = k % g;
                    k /= g;
                    x
                })
                .collect();
            let faces = (0..nf)
                .map(|_| {
                    let x = k % h;
                    k /= h;
                    x
                })
                .collect();
            Decoration { edges, faces }
        })
        .collect()
}

/// Fake-flatness read straight off the oriented boundary cycle.
fn oracle_flat(cm: &CrossedModule, c: &TwoComplex, d: &Decoration) -> bool {
    let g = cm.base();
    (0..c.faces().len()).all(|f| {
        let w = holonomy::face_cycle(c, f).iter().fold(0, |acc, &(e, fwd)| {
            g.mul(acc, if fwd { d.edges[e] } else { g.inv(d.edges[e]) })
        });
        cm.t(d.faces[f]) == w
    })
}

#[test]
fn counts_match_brute_force() {
    for (name, cm) in group::samples() {
        for c in [TwoComplex::triangle(), TwoComplex::square()] {
            let brute = all_decorations(&cm, &c)
                .iter()
                .filter(|d| oracle_flat(&cm, &c, d))
                .count();
            let fixed = vec![None; c.edges().len()];
            let (n, it) = holonomy::enumerate_fake_flat(&cm, &c, &fixed).unwrap();
            let listed: Vec<_> = it.collect();
            assert_eq!(n, brute.into(), "{name}");
            assert_eq!(listed.len(), brute, "{name}");
            assert!(listed
                .windows(2)
                .all(|w| (&w[0].edges, &w[0].faces) < (&w[1].edges, &w[1].faces)
                    || w[0].edges < w[1].edges));
            assert!(listed.iter().all(|d| oracle_flat(&cm, &c, d)));
        }
    }
}

fn random_params(cm: &CrossedModule, c: &TwoComplex, seed: u64, n: usize) -> Vec<GaugeParam> {
    let mut s = seed;
    let mut next = |m: usize| {
        s = s
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((s >> 33) as usize) % m
    };
    (0..n)
        .map(|_| GaugeParam {
            vertices: (0..c.n_vertices())
                .map(|_| next(cm.base().order()))
                .collect(),
            edges: (0..c.edges().len())
                .map(|_| next(cm.fiber().order()))
                .collect(),
        })
        .collect()
}

#[test]
fn gauge_is_an_action_preserving_flatness() {
    for (name, cm) in group::samples() {
        let c = TwoComplex::square();
        let fixed = vec![None; c.edges().len()];
        let decs: Vec<_> = holonomy::enumerate_fake_flat(&cm, &c, &fixed)
            .unwrap()
            .1
            .take(200)
            .collect();
        let zs = random_params(&cm, &c, 7, 12);
        for d in &decs {
            assert_eq!(
                &gauge::apply_gauge(&cm, &c, &GaugeParam::identity(&c), d).unwrap(),
                d
            );
            for z in &zs {
                let d1 = gauge::apply_gauge(&cm, &c, z, d).unwrap();
                assert!(oracle_flat(&cm, &c, &d1), "{name}");
                for z2 in zs.iter().take(4) {
                    let lhs =
                        gauge::apply_gauge(&cm, &c, &gauge::compose(&cm, &c, z, z2), d).unwrap();
                    let rhs = gauge::apply_gauge(&cm, &c, z2, &d1).unwrap();
                    assert_eq!(lhs, rhs, "{name}");
                }
                let back = gauge::apply_gauge(&cm, &c, &gauge::inverse(&cm, &c, z), &d1).unwrap();
                assert_eq!(&back, d);
            }
        }
    }
}

#[test]
fn internal_invariance_square() {
    for (name, cm) in group::samples() {
        let c = TwoComplex::square();
        let sp = c.make_unbroken().unwrap();
        let fixed = vec![None; c.edges().len()];
        let dd: Vec<_> = holonomy::enumerate_fake_flat(&cm, &sp.complex, &fixed)
            .unwrap()
            .1
            .collect();
        for d in &dd {
            assert!(
                gauge::check_internal_invariance(&cm, &sp, d).unwrap(),
                "{name} {d:?}"
            );
        }
    }
}

#[test]
fn internal_invariance_all_interior() {
    // the fiber part is invariant under gauge on every interior edge
    for (name, cm) in group::samples() {
        let c = TwoComplex::square();
        let sp = c.make_unbroken().unwrap();
        let support = Support::interior(&sp.complex);
        let fixed = vec![None; c.edges().len()];
        for d in holonomy::enumerate_fake_flat(&cm, &sp.complex, &fixed)
            .unwrap()
            .1
        {
            let b = holonomy::total_surface_holonomy(&cm, &sp, &d).unwrap();
            for z in support.parameters(&cm, &sp.complex) {
                let d2 = gauge::apply_gauge(&cm, &sp.complex, &z, &d).unwrap();
                let b2 = holonomy::total_surface_holonomy(&cm, &sp, &d2).unwrap();
                assert_eq!(b.h, b2.h, "{name}");
            }
        }
    }
}
