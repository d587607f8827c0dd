//! Rewriting a ghost into discrete-compact form.
//!
//! The pipeline runs four reductions on the object and then two of them on
//! its dual:
//!
//! 1. quotient the compact part `T^c + F` of the upper group together with
//!    its image;
//! 2. restrict to the preimage of the non-lattice part of the lower group,
//!    which removes the lattice summand of the lower group;
//! 3. quotient the real subspace of the upper group on which the
//!    differential is injective into the vector part, together with its
//!    image;
//! 4. quotient a lattice `E` of the upper group whose image is a full
//!    lattice of the vector part of the lower group.
//!
//! Afterwards the lower group is compact and the upper group is `R^n + D`.
//! When `n > 0`, step 4 on the dual object removes the vector part and a
//! final dualization returns to the original side. Every step records a
//! square in the certificate.

use num_traits::Zero;

use super::{BicartesianCertificate, Direction, HeartObject};
use crate::elca::{cokernel, coordinate_inclusion, factor, kernel, lift, ElcaGroup, ElcaMorphism, SquareData};
use crate::error::{Error, Result};
use crate::fgab::integer_kernel;
use crate::linalg::{clear_row_denominators, rank_q, rref, IMat, QMat, SMat};
use crate::scalars::{Atom, Rat, Scalar};

/// A discrete-compact object and a chain from the input to it.
#[derive(Clone, Debug)]
pub struct DcForm {
    pub object: HeartObject,
    pub certificate: BicartesianCertificate,
}

pub fn normalize_dc(o: &HeartObject) -> Result<DcForm> {
    if !o.is_ghost()? {
        return Err(Error::NotGhost);
    }
    let mut cert = BicartesianCertificate::empty();
    if o.is_dc() {
        return Ok(DcForm { object: o.clone(), certificate: cert });
    }
    let mut cur = o.clone();
    for step in [quotient_compact_upper, restrict_off_lattice, quotient_vector_image, quotient_full_lattice] {
        if let Some((next, square, dir)) = step(&cur)? {
            cert.push(square, dir);
            cur = next;
        }
    }
    if !cur.upper().is_discrete() {
        let dual = HeartObject::new(cur.differential().dual())?;
        let mut dual_cert = BicartesianCertificate::empty();
        let mut d = dual;
        for step in [quotient_vector_image, quotient_full_lattice] {
            if let Some((next, square, dir)) = step(&d)? {
                dual_cert.push(square, dir);
                d = next;
            }
        }
        cert.extend(dual_cert.dual());
        cur = HeartObject::new(d.differential().dual())?;
    }
    if !cur.is_dc() {
        return Err(Error::Internal(format!("normalization ended at [{} -> {}]", cur.upper(), cur.lower())));
    }
    Ok(DcForm { object: cur, certificate: cert })
}

type Step = Option<(HeartObject, SquareData, Direction)>;

/// Quotients `sub` from the upper group and `x(sub)` from the lower group.
fn quotient_by(o: &HeartObject, sub: &ElcaMorphism) -> Result<(HeartObject, SquareData, Direction)> {
    let x = o.differential();
    let p_upper = cokernel(sub)?;
    let p_lower = cokernel(&x.compose(sub)?)?;
    let x_new = factor(&p_lower.compose(x)?, &p_upper)?;
    let next = HeartObject::new(x_new.clone())?;
    let sq = SquareData::new(x.clone(), x_new, p_upper, p_lower)?;
    Ok((next, sq, Direction::Forward))
}

fn quotient_compact_upper(o: &HeartObject) -> Result<Step> {
    let g = o.upper();
    let coords: Vec<usize> = g.t_range().chain(g.f_range()).collect();
    if coords.is_empty() {
        return Ok(None);
    }
    let c = ElcaGroup::new(0, 0, g.torus_rank, g.torsion.clone())?;
    let inc = coordinate_inclusion(&c, g, &coords)?;
    quotient_by(o, &inc).map(Some)
}

fn restrict_off_lattice(o: &HeartObject) -> Result<Step> {
    let h = o.lower();
    if h.lattice_rank == 0 {
        return Ok(None);
    }
    let x = o.differential();
    let lattice = ElcaGroup::lattice(h.lattice_rank);
    let mut w = SMat::zeros(h.lattice_rank, h.dim());
    for (k, i) in h.z_range().enumerate() {
        w.set(k, i, Scalar::one());
    }
    let w = ElcaMorphism::new(h.clone(), lattice, w)?;
    let upper_inc = kernel(&w.compose(x)?)?;
    let rest = ElcaGroup::new(h.vector_rank, 0, h.torus_rank, h.torsion.clone())?;
    let coords: Vec<usize> = h.r_range().chain(h.t_range()).chain(h.f_range()).collect();
    let lower_inc = coordinate_inclusion(&rest, h, &coords)?;
    let x_new = lift(&x.compose(&upper_inc)?, &lower_inc)?;
    let next = HeartObject::new(x_new.clone())?;
    let sq = SquareData::new(x_new, x.clone(), upper_inc, lower_inc)?;
    Ok(Some((next, sq, Direction::Inverted)))
}

fn quotient_vector_image(o: &HeartObject) -> Result<Step> {
    let (g, h, x) = (o.upper(), o.lower(), o.differential());
    if g.vector_rank == 0 || h.vector_rank == 0 {
        return Ok(None);
    }
    let block = QMat::from_fn(h.vector_rank, g.vector_rank, |i, j| {
        x.entry(i, j).as_rational().expect("vector entries are rational")
    });
    if rank_q(&block) == 0 {
        return Ok(None);
    }
    let mut reduced = block.clone();
    let pivots = rref(&mut reduced);
    let sub = ElcaGroup::reals(pivots.len());
    let inc = coordinate_inclusion(&sub, g, &pivots)?;
    quotient_by(o, &inc).map(Some)
}

/// Integer combinations of the lattice generators of the upper group whose
/// image in the vector part of the lower group is rational, as columns.
fn rational_lattice(o: &HeartObject) -> Result<(IMat, QMat)> {
    let (g, h, x) = (o.upper(), o.lower(), o.differential());
    let zs: Vec<usize> = g.z_range().collect();
    let mut atoms: Vec<Atom> = Vec::new();
    for i in h.r_range() {
        for &j in &zs {
            atoms.extend(x.entry(i, j).atoms().filter(|a| !a.is_one()));
        }
    }
    atoms.sort();
    atoms.dedup();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for i in h.r_range() {
        for a in &atoms {
            rows.push(zs.iter().map(|&j| x.entry(i, j).coeff(*a)).collect());
        }
    }
    let basis = if rows.is_empty() {
        IMat::identity(zs.len())
    } else {
        let (m, _) = clear_row_denominators(&QMat::from_rows(rows, zs.len()));
        integer_kernel(&m)
    };
    let images = QMat::from_fn(h.vector_rank, basis.cols(), |i, k| {
        (0..zs.len()).fold(Rat::zero(), |acc, l| {
            acc + x.entry(i, zs[l]).rational_part() * Rat::from(basis.get(l, k).clone())
        })
    });
    Ok((basis, images))
}

fn quotient_full_lattice(o: &HeartObject) -> Result<Step> {
    let (g, h) = (o.upper(), o.lower());
    let m = h.vector_rank;
    if m == 0 {
        return Ok(None);
    }
    if h.lattice_rank != 0 {
        return Err(Error::Internal("lattice quotient needs a lower group without lattice part".into()));
    }
    let (basis, images) = rational_lattice(o)?;
    let mut chosen: Vec<usize> = Vec::new();
    for k in 0..basis.cols() {
        let mut cols = chosen.clone();
        cols.push(k);
        if rank_q(&images.select_cols(&cols)) == cols.len() {
            chosen = cols;
        }
        if chosen.len() == m {
            break;
        }
    }
    if chosen.len() < m {
        return Err(Error::Unrepresentable(
            "no lattice of the upper group maps onto a lattice of the vector part with rational coordinates".into(),
        ));
    }
    let mut emb = SMat::zeros(g.dim(), m);
    for (c, &k) in chosen.iter().enumerate() {
        for (l, j) in g.z_range().enumerate() {
            emb.set(j, c, Scalar::from_int(basis.get(l, k)));
        }
    }
    let inc = ElcaMorphism::new(ElcaGroup::lattice(m), g.clone(), emb)?;
    quotient_by(o, &inc).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elca::int_rows;
    use crate::scalars::{int, rat, SymbolTable};

    fn table() -> (SymbolTable, Scalar, Scalar) {
        let mut t = SymbolTable::new();
        let a = Scalar::atom(t.declare("alpha", Some(std::f64::consts::SQRT_2)).unwrap());
        let b = Scalar::atom(t.declare("beta", Some(std::f64::consts::PI - 3.0)).unwrap());
        (t, a, b)
    }

    fn check(o: &HeartObject) -> DcForm {
        let f = normalize_dc(o).unwrap();
        assert!(f.object.is_dc());
        assert!(f.object.is_ghost().unwrap());
        f.certificate.validate(o, &f.object).unwrap();
        for r in f.certificate.kernel_matching_reports().unwrap() {
            assert!(r.holds(), "{r:?}");
        }
        let again = normalize_dc(&f.object).unwrap();
        assert_eq!(again.object, f.object);
        assert!(again.certificate.is_empty());
        f
    }

    #[test]
    fn dc_input_is_unchanged() {
        let (_, a, _) = table();
        let o = HeartObject::new(
            ElcaMorphism::from_rows(ElcaGroup::lattice(1), ElcaGroup::torus(1), vec![vec![a]]).unwrap(),
        )
        .unwrap();
        let f = check(&o);
        assert_eq!(f.object, o);
    }

    #[test]
    fn dense_lattice_in_line() {
        let (_, a, _) = table();
        let x = ElcaMorphism::from_rows(ElcaGroup::lattice(2), ElcaGroup::reals(1), vec![vec![Scalar::one(), a.clone()]])
            .unwrap();
        let o = HeartObject::new(x).unwrap();
        let f = check(&o);
        let expected =
            ElcaMorphism::from_rows(ElcaGroup::lattice(1), ElcaGroup::torus(1), vec![vec![a]]).unwrap();
        assert_eq!(f.object.differential(), &expected);
        assert_eq!(f.certificate.len(), 1);
    }

    #[test]
    fn mixed_line_and_circle() {
        let (_, a, b) = table();
        let x = ElcaMorphism::from_rows(
            ElcaGroup::lattice(2),
            ElcaGroup::new(1, 0, 1, vec![]).unwrap(),
            vec![vec![Scalar::one(), a.clone()], vec![Scalar::zero(), b.clone()]],
        )
        .unwrap();
        let o = HeartObject::new(x).unwrap();
        assert!(o.is_ghost().unwrap());
        let f = check(&o);
        assert_eq!(f.object.upper(), &ElcaGroup::lattice(1));
        assert_eq!(f.object.lower(), &ElcaGroup::torus(2));
    }

    #[test]
    fn not_ghost() {
        let (_, a, _) = table();
        let x = ElcaMorphism::from_rows(
            ElcaGroup::lattice(1),
            ElcaGroup::new(1, 0, 1, vec![]).unwrap(),
            vec![vec![Scalar::one()], vec![a]],
        )
        .unwrap();
        let o = HeartObject::new(x).unwrap();
        assert!(matches!(normalize_dc(&o), Err(Error::NotGhost)));
    }

    #[test]
    fn compact_upper_and_lattice_lower() {
        let (_, a, _) = table();
        // [Z + T + Z/2 -> Z + T + T]: the lattice of the lower group is hit
        // by the first generator, the compact part maps identically.
        let g = ElcaGroup::with_orders(0, 1, 1, &[int(2)]);
        let h = ElcaGroup::new(0, 1, 2, vec![]).unwrap();
        let x = ElcaMorphism::from_rows(
            g,
            h,
            vec![
                vec![Scalar::one(), Scalar::zero(), Scalar::zero()],
                vec![a, Scalar::zero(), Scalar::from_rat(rat(1, 2))],
                vec![Scalar::zero(), Scalar::one(), Scalar::zero()],
            ],
        )
        .unwrap();
        let o = HeartObject::new(x).unwrap();
        if o.is_ghost().unwrap() {
            check(&o);
        }
    }

    #[test]
    fn vector_upper_is_quotiented() {
        let (_, a, _) = table();
        // [R + Z^2 -> R^2]: (t, m, n) -> (t + m, a n + m)
        let g = ElcaGroup::new(1, 2, 0, vec![]).unwrap();
        let h = ElcaGroup::reals(2);
        let x = ElcaMorphism::from_rows(
            g,
            h,
            vec![
                vec![Scalar::one(), Scalar::one(), Scalar::zero()],
                vec![Scalar::zero(), Scalar::one(), a],
            ],
        )
        .unwrap();
        let o = HeartObject::new(x).unwrap();
        assert!(o.is_ghost().unwrap());
        check(&o);
    }

    #[test]
    fn dense_line_in_torus_uses_dual() {
        let (_, a, _) = table();
        let x = ElcaMorphism::from_rows(ElcaGroup::reals(1), ElcaGroup::torus(2), vec![vec![Scalar::one()], vec![a.clone()]])
            .unwrap();
        let o = HeartObject::new(x).unwrap();
        assert!(o.is_ghost().unwrap());
        let f = check(&o);
        assert_eq!(f.object.upper(), &ElcaGroup::lattice(1));
        assert_eq!(f.object.lower(), &ElcaGroup::torus(1));
        assert!(f.certificate.squares.iter().any(|s| s.direction == Direction::Inverted));
    }

    #[test]
    fn lattice_rows() {
        let x = ElcaMorphism::from_rows(ElcaGroup::lattice(1), ElcaGroup::lattice(1), int_rows(&[&[1]])).unwrap();
        let o = HeartObject::new(x).unwrap();
        let f = check(&o);
        assert!(f.object.is_zero());
    }
}
