use rand::Rng;

use lca_heart::corpus::{random_fg_morphism, random_morphism, random_orders, rng, symbol_table, SymbolUse};
use lca_heart::elca::{ElcaGroup, ElcaMorphism};
use lca_heart::fgab::{FgAbGroup, FgAbMorphism};
use lca_heart::heart::ObjectMorphism;
use lca_heart::pga::{theta, theta_inverse, theta_morphism, theta_round_trip_certificate, weak_dual_dc, PgaGroup, PgaMorphism};
use lca_heart::scalars::Atom;

const CIRCLE: SymbolUse = SymbolUse { lattice_to_circle: true, lattice_to_line: false, line_to_circle: false };

fn random_precompact(r: &mut impl Rng, atoms: &[Atom]) -> PgaGroup {
    loop {
        let d = FgAbGroup::from_orders(r.gen_range(0..=2), &random_orders(r, 1, &[2, 3, 4]));
        let ambient = ElcaGroup::with_orders(0, 0, r.gen_range(0..=2), &random_orders(r, 1, &[2, 3, 4, 6]));
        let emb = random_morphism(r, &ElcaGroup::discrete(&d), &ambient, atoms, CIRCLE);
        if let Ok(p) = PgaGroup::new(d, ambient, emb) {
            return p;
        }
    }
}

#[test]
fn theta_preserves_identities() {
    let (_, atoms) = symbol_table(2);
    let mut r = rng(41);
    for _ in 0..50 {
        let p = random_precompact(&mut r, &atoms);
        let id = theta_morphism(&PgaMorphism::identity(&p).unwrap()).unwrap();
        assert_eq!(id, ObjectMorphism::identity(&theta(&p).unwrap()));
    }
}

#[test]
fn theta_preserves_composition() {
    let (_, atoms) = symbol_table(2);
    let mut r = rng(42);
    let mut checked = 0;
    for _ in 0..400 {
        let p = random_precompact(&mut r, &atoms);
        let lift = |m: FgAbMorphism| PgaMorphism::new(&p, &p, m).ok();
        let (Some(f), Some(g)) = (
            lift(random_fg_morphism(&mut r, &p.group().clone(), &p.group().clone())),
            lift(random_fg_morphism(&mut r, &p.group().clone(), &p.group().clone())),
        ) else {
            continue;
        };
        let gf = g.compose(&f).unwrap();
        let lhs = theta_morphism(&gf).unwrap();
        let rhs = theta_morphism(&g).unwrap().compose(&theta_morphism(&f).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        checked += 1;
    }
    assert!(checked >= 50, "only {checked} continuous pairs");
}

#[test]
fn round_trips_through_theta() {
    let (_, atoms) = symbol_table(2);
    let mut r = rng(43);
    for _ in 0..50 {
        let p = random_precompact(&mut r, &atoms);
        let o = theta(&p).unwrap();
        assert!(o.is_ghost().unwrap());
        assert_eq!(theta_inverse(&o).unwrap().group(), p.group());
        let (back, cert) = theta_round_trip_certificate(&o).unwrap();
        cert.validate(&back, &o).unwrap();
    }
}

#[test]
fn weak_dual_of_circle_rotation() {
    let (_, atoms) = symbol_table(1);
    let emb = ElcaMorphism::from_rows(
        ElcaGroup::lattice(1),
        ElcaGroup::torus(1),
        vec![vec![lca_heart::scalars::Scalar::atom(atoms[0])]],
    )
    .unwrap();
    let p = PgaGroup::new(FgAbGroup::free(1), ElcaGroup::torus(1), emb).unwrap();
    let d = weak_dual_dc(&p).unwrap();
    assert_eq!(d.group(), &FgAbGroup::free(1));
    assert!(d.classify().unwrap().precompact);
}
