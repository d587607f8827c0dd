use rand::Rng;

use lca_heart::corpus::{random_group, random_morphism, rng, symbol_table, SymbolUse};
use lca_heart::elca::is_iso;
use lca_heart::heart::{
    heart_dual, normalize_dc, roof_equal, roof_is_zero, BicartesianCertificate, HeartObject, Roof,
};
use lca_heart::scalars::Atom;

const CIRCLE: SymbolUse = SymbolUse { lattice_to_circle: true, lattice_to_line: false, line_to_circle: false };

fn random_ghost(r: &mut impl Rng, atoms: &[Atom]) -> HeartObject {
    loop {
        let upper = random_group(r, 2, 1);
        let lower = random_group(r, 2, 1);
        if let Ok(o) = HeartObject::new(random_morphism(r, &upper, &lower, atoms, CIRCLE)) {
            if o.is_ghost().unwrap() {
                return o;
            }
        }
    }
}

#[test]
fn normal_forms_are_certified_and_stable() {
    let (_, atoms) = symbol_table(2);
    let mut r = rng(31);
    for _ in 0..100 {
        let o = random_ghost(&mut r, &atoms);
        let form = normalize_dc(&o).unwrap();
        assert!(form.object.is_dc());
        form.certificate.validate(&o, &form.object).unwrap();
        let again = normalize_dc(&form.object).unwrap();
        assert_eq!(again.object, form.object);
        assert!(again.certificate.is_empty());
    }
}

#[test]
fn duality_is_an_involution_on_ghosts() {
    let (_, atoms) = symbol_table(2);
    let mut r = rng(32);
    for _ in 0..100 {
        let o = random_ghost(&mut r, &atoms);
        let d = heart_dual(&o).unwrap();
        assert!(d.is_ghost().unwrap());
        assert_eq!(heart_dual(&d).unwrap(), o);
    }
}

#[test]
fn json_round_trips() {
    let (table, atoms) = symbol_table(2);
    let mut r = rng(33);
    for _ in 0..50 {
        let o = random_ghost(&mut r, &atoms);
        assert_eq!(HeartObject::from_json(&o.to_json(&table), &table).unwrap(), o);
        let form = normalize_dc(&o).unwrap();
        let cert = BicartesianCertificate::from_json(&form.certificate.to_json(&table), &table).unwrap();
        assert_eq!(cert, form.certificate);
        let roof = Roof::identity(&o);
        let back = Roof::from_json(&roof.to_json(&table), &table).unwrap();
        back.validate().unwrap();
        assert_eq!(back, roof);
    }
}

#[test]
fn identity_roofs() {
    let (_, atoms) = symbol_table(2);
    let mut r = rng(34);
    for _ in 0..50 {
        let o = random_ghost(&mut r, &atoms);
        let id = Roof::identity(&o);
        assert!(roof_equal(&id, &id).unwrap());
        // isomorphisms are zero objects
        assert_eq!(roof_is_zero(&id).unwrap(), is_iso(o.differential()));
    }
}
