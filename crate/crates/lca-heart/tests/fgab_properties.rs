use lca_heart::corpus::{random_fg_group, random_fg_morphism, random_int_matrix, rng};
use lca_heart::fgab::{FgAbMorphism, fg_cokernel, fg_image, fg_is_isomorphic, fg_kernel, smith_normal_form, FgAbGroup};
use lca_heart::linalg::{is_unimodular, IMat};
use lca_heart::oracle::brute_finite_check;
use lca_heart::scalars::int;
use num_traits::Zero;
use proptest::prelude::*;

proptest! {
    #[test]
    fn smith_form_reconstructs(rows in 1usize..5, cols in 1usize..5, seed in any::<u64>()) {
        let m = random_int_matrix(&mut rng(seed), rows, cols, 9);
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.u.mul(&m).mul(&s.v), s.d.clone());
        prop_assert!(is_unimodular(&s.u) && is_unimodular(&s.v));
        prop_assert_eq!(s.u_inv.mul(&s.d).mul(&s.v_inv), m);
        let diag = s.diagonal();
        prop_assert!(diag.windows(2).all(|w| w[0].is_zero() && w[1].is_zero() || !w[0].is_zero() && (&w[1] % &w[0]).is_zero()));
    }
}

#[test]
fn finite_maps_match_enumeration() {
    let mut r = rng(22);
    for k in 0..100 {
        let g = random_fg_group(&mut r, 0, 144);
        let h = random_fg_group(&mut r, 0, 144);
        let f = random_fg_morphism(&mut r, &g, &h);
        let rep = brute_finite_check(&format!("case {k}"), &f).unwrap();
        assert!(rep.passed(), "{}", rep.witness);
    }
}

fn kills(f: &FgAbMorphism) -> bool {
    (0..f.source.ngens()).all(|j| {
        let mut e = vec![int(0); f.source.ngens()];
        e[j] = int(1);
        f.apply(&e).iter().all(|x| x.is_zero())
    })
}

#[test]
fn kernel_image_cokernel_orders() {
    let mut r = rng(23);
    for _ in 0..100 {
        let g = random_fg_group(&mut r, 0, 96);
        let h = random_fg_group(&mut r, 0, 96);
        let f = random_fg_morphism(&mut r, &g, &h);
        let (k, inc) = fg_kernel(&f);
        let (c, proj) = fg_cokernel(&f);
        let im = fg_image(&f);
        assert_eq!(k.order().unwrap() * im.order().unwrap(), g.order().unwrap());
        assert_eq!(c.order().unwrap() * im.order().unwrap(), h.order().unwrap());
        assert!(kills(&f.compose(&inc).unwrap()));
        assert!(kills(&proj.compose(&f).unwrap()));
    }
}

#[test]
fn infinite_kernels() {
    // Z^3 -> Z^2 of rank 2 has kernel Z and cokernel given by the minors
    let m = IMat::from_rows(vec![vec![int(2), int(4), int(6)], vec![int(0), int(6), int(3)]], 3);
    let f = FgAbMorphism::new(FgAbGroup::free(3), FgAbGroup::free(2), m).unwrap();
    assert_eq!(fg_kernel(&f).0, FgAbGroup::free(1));
    assert!(fg_is_isomorphic(&fg_cokernel(&f).0, &FgAbGroup::from_orders(0, &[int(3), int(2)])));
}
