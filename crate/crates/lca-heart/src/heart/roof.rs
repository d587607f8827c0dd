//! Left roofs `source <- apex -> target` whose left leg is witnessed by
//! bicartesian squares.

use serde_json::{json, Value};

use super::homs::{Builder, Unknown};
use super::{BicartesianCertificate, Direction, HeartObject, ObjectMorphism};
use crate::elca::{cokernel, coordinate_inclusion, factor, kernel, lift, pairing, pullback, ElcaGroup, ElcaMorphism};
use crate::error::{Error, Result};
use crate::linalg::SMat;
use crate::scalars::{Scalar, SymbolTable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Roof {
    pub source: HeartObject,
    pub apex: HeartObject,
    pub target: HeartObject,
    pub left: ObjectMorphism,
    pub certificate: BicartesianCertificate,
    pub right: ObjectMorphism,
}

impl Roof {
    /// Validates both legs and the certificate of the left leg.
    pub fn new(
        source: HeartObject,
        apex: HeartObject,
        target: HeartObject,
        left: ObjectMorphism,
        certificate: BicartesianCertificate,
        right: ObjectMorphism,
    ) -> Result<Self> {
        let r = Roof { source, apex, target, left, certificate, right };
        r.validate()?;
        Ok(r)
    }

    /// The roof `o <- o -> o` of identities.
    pub fn identity(o: &HeartObject) -> Self {
        Roof {
            source: o.clone(),
            apex: o.clone(),
            target: o.clone(),
            left: ObjectMorphism::identity(o),
            certificate: BicartesianCertificate::empty(),
            right: ObjectMorphism::identity(o),
        }
    }

    /// A roof whose left leg is a single bicartesian square.
    pub fn from_square_leg(
        source: &HeartObject,
        apex: &HeartObject,
        target: &HeartObject,
        left: ObjectMorphism,
        right: ObjectMorphism,
    ) -> Result<Self> {
        let mut cert = BicartesianCertificate::empty();
        cert.push(left.square(apex, source)?, Direction::Forward);
        Roof::new(source.clone(), apex.clone(), target.clone(), left, cert, right)
    }

    pub fn validate(&self) -> Result<()> {
        ObjectMorphism::new(&self.apex, &self.source, self.left.upper.clone(), self.left.lower.clone())?;
        ObjectMorphism::new(&self.apex, &self.target, self.right.upper.clone(), self.right.lower.clone())?;
        self.certificate.validate(&self.apex, &self.source)?;
        // The forward chain must compose to the left leg.
        let mut composite = ObjectMorphism::identity(&self.apex);
        for (k, cs) in self.certificate.squares.iter().enumerate() {
            if cs.direction != Direction::Forward {
                return Err(Error::InvalidCertificate {
                    square: k,
                    reason: "the left leg must be witnessed by forward squares".into(),
                });
            }
            let step = ObjectMorphism { upper: cs.square.left.clone(), lower: cs.square.right.clone() };
            composite = step.compose(&composite)?;
        }
        if composite != self.left {
            return Err(Error::InvalidCertificate {
                square: self.certificate.len(),
                reason: "the squares do not compose to the left leg".into(),
            });
        }
        Ok(())
    }

    pub fn to_json(&self, table: &SymbolTable) -> Value {
        json!({
            "source": self.source.to_json(table),
            "apex": self.apex.to_json(table),
            "target": self.target.to_json(table),
            "left": self.left.to_json(table),
            "certificate": self.certificate.to_json(table),
            "right": self.right.to_json(table),
        })
    }

    pub fn from_json(v: &Value, table: &SymbolTable) -> Result<Self> {
        let get = |k: &str| v.get(k).ok_or_else(|| Error::Json(format!("roof needs `{k}`")));
        let source = HeartObject::from_json(get("source")?, table)?;
        let apex = HeartObject::from_json(get("apex")?, table)?;
        let target = HeartObject::from_json(get("target")?, table)?;
        let left = ObjectMorphism::from_json(get("left")?, table, &apex, &source)?;
        let right = ObjectMorphism::from_json(get("right")?, table, &apex, &target)?;
        let certificate = BicartesianCertificate::from_json(get("certificate")?, table)?;
        Roof::new(source, apex, target, left, certificate, right)
    }
}

/// One rewriting of the apex: a levelwise map between the old and the new
/// apex, pointing from the old one to the new one when `Forward`.
#[derive(Clone, Debug)]
pub struct ApexStep {
    pub comparison: ObjectMorphism,
    pub direction: Direction,
}

#[derive(Clone, Debug)]
pub struct NormalizedRoof {
    pub roof: Roof,
    pub steps: Vec<ApexStep>,
}

struct Legs {
    apex: HeartObject,
    left: ObjectMorphism,
    right: ObjectMorphism,
}

/// Quotients `sub` from the upper level of the apex and its image from the
/// lower level. Both legs must vanish on `sub`.
fn quotient_apex(legs: &Legs, sub: &ElcaMorphism) -> Result<(Legs, ApexStep)> {
    let z = legs.apex.differential();
    let image = z.compose(sub)?;
    for leg in [&legs.left, &legs.right] {
        if !leg.upper.compose(sub)?.is_zero() || !leg.lower.compose(&image)?.is_zero() {
            return Err(Error::Precondition("a leg does not vanish on the subgroup being removed".into()));
        }
    }
    let p_upper = cokernel(sub)?;
    let p_lower = cokernel(&image)?;
    let apex = HeartObject::new(factor(&p_lower.compose(z)?, &p_upper)?)?;
    let through = |leg: &ObjectMorphism| -> Result<ObjectMorphism> {
        Ok(ObjectMorphism { upper: factor(&leg.upper, &p_upper)?, lower: factor(&leg.lower, &p_lower)? })
    };
    let step = ApexStep { comparison: ObjectMorphism { upper: p_upper.clone(), lower: p_lower.clone() }, direction: Direction::Forward };
    Ok((Legs { left: through(&legs.left)?, right: through(&legs.right)?, apex }, step))
}

fn drop_vector_upper(legs: &Legs) -> Result<Option<(Legs, ApexStep)>> {
    let g = legs.apex.upper();
    if g.vector_rank == 0 {
        return Ok(None);
    }
    let sub = coordinate_inclusion(&ElcaGroup::reals(g.vector_rank), g, &g.r_range().collect::<Vec<_>>())?;
    quotient_apex(legs, &sub).map(Some)
}

/// Removes the finite-index subgroup of the compact open part of the upper
/// level on which both legs vanish.
fn drop_compact_upper(legs: &Legs) -> Result<Option<(Legs, ApexStep)>> {
    let g = legs.apex.upper();
    let coords: Vec<usize> = g.t_range().chain(g.f_range()).collect();
    if coords.is_empty() {
        return Ok(None);
    }
    let c = ElcaGroup::new(0, 0, g.torus_rank, g.torsion.clone())?;
    let inc = coordinate_inclusion(&c, g, &coords)?;
    let (_, both) = pairing(&[legs.left.upper.compose(&inc)?, legs.right.upper.compose(&inc)?])?;
    let shrink = kernel(&both)?;
    if shrink.source().is_trivial() {
        return Ok(None);
    }
    quotient_apex(legs, &inc.compose(&shrink)?).map(Some)
}

/// Restricts to the preimage of the non-lattice part of the lower level.
fn restrict_lower(legs: &Legs) -> Result<Option<(Legs, ApexStep)>> {
    let h = legs.apex.lower();
    if h.lattice_rank == 0 {
        return Ok(None);
    }
    let z = legs.apex.differential();
    let mut w = SMat::zeros(h.lattice_rank, h.dim());
    for (k, i) in h.z_range().enumerate() {
        w.set(k, i, Scalar::one());
    }
    let w = ElcaMorphism::new(h.clone(), ElcaGroup::lattice(h.lattice_rank), w)?;
    let upper_inc = kernel(&w.compose(z)?)?;
    let rest = ElcaGroup::new(h.vector_rank, 0, h.torus_rank, h.torsion.clone())?;
    let coords: Vec<usize> = h.r_range().chain(h.t_range()).chain(h.f_range()).collect();
    let lower_inc = coordinate_inclusion(&rest, h, &coords)?;
    let apex = HeartObject::new(lift(&z.compose(&upper_inc)?, &lower_inc)?)?;
    let inc = ObjectMorphism { upper: upper_inc, lower: lower_inc };
    let legs_new = Legs { left: legs.left.compose(&inc)?, right: legs.right.compose(&inc)?, apex };
    Ok(Some((legs_new, ApexStep { comparison: inc, direction: Direction::Inverted })))
}

/// Rewrites the apex to have a discrete upper group and no lattice summand
/// in the lower group, keeping both endpoints. A zero right leg stays zero.
pub fn normalize_roof(r: &Roof) -> Result<NormalizedRoof> {
    r.validate()?;
    for end in [&r.source, &r.target] {
        if !end.is_dcg() || !end.is_ghost()? {
            return Err(Error::Precondition("roof endpoints must be ghosts with discrete upper groups".into()));
        }
    }
    let mut legs = Legs { apex: r.apex.clone(), left: r.left.clone(), right: r.right.clone() };
    let mut steps = Vec::new();
    for step in [drop_vector_upper, drop_compact_upper, restrict_lower] {
        if let Some((next, s)) = step(&legs)? {
            legs = next;
            steps.push(s);
        }
    }
    if steps.is_empty() {
        return Ok(NormalizedRoof { roof: r.clone(), steps });
    }
    let roof = Roof::from_square_leg(&r.source, &legs.apex, &r.target, legs.left, legs.right)?;
    Ok(NormalizedRoof { roof, steps })
}

/// Whether the right leg is null-homotopic, i.e. there is `δ` from the lower
/// level of the apex to the upper level of the target with `v' = δ ∘ z` and
/// `v = y ∘ δ`. Always sound; complete for normalized roofs between
/// discrete-compact objects.
pub fn roof_is_zero(r: &Roof) -> Result<bool> {
    leg_is_null_homotopic(&r.apex, &r.target, &r.right)
}

fn leg_is_null_homotopic(apex: &HeartObject, target: &HeartObject, v: &ObjectMorphism) -> Result<bool> {
    if v.is_zero() {
        return Ok(true);
    }
    match homotopy_exists(apex, target, v, false) {
        Err(Error::Unrepresentable(_)) => homotopy_exists(apex, target, v, true),
        other => other,
    }
}

fn homotopy_exists(apex: &HeartObject, target: &HeartObject, v: &ObjectMorphism, discrete_only: bool) -> Result<bool> {
    let mut b = Builder::new(Unknown::new(apex.lower(), target.upper(), discrete_only));
    b.impose(None, Some(apex.differential()), &v.upper)?;
    b.impose(Some(target.differential()), None, &v.lower)?;
    Ok(b.solve()?.is_some())
}

/// Equality of roofs with the same endpoints, through a common refinement
/// of the two left legs.
pub fn roof_equal(r1: &Roof, r2: &Roof) -> Result<bool> {
    if r1.source != r2.source || r1.target != r2.target {
        return Err(Error::Shape("roofs have different endpoints".into()));
    }
    r1.validate()?;
    r2.validate()?;
    if r1.apex == r2.apex && r1.left == r2.left {
        return leg_is_null_homotopic(&r1.apex, &r1.target, &r1.right.sub(&r2.right)?);
    }
    // A left leg that factors through the other one.
    for (a, b) in [(r1, r2), (r2, r1)] {
        if let Some(t) = factor_leg(&b.left, &a.left, &b.apex, &a.apex)? {
            let diff = a.right.compose(&t)?.sub(&b.right)?;
            if leg_is_null_homotopic(&b.apex, &b.target, &diff)? {
                return Ok(true);
            }
        }
    }
    let pu = pullback(&r1.left.upper, &r2.left.upper)?;
    let pl = pullback(&r1.left.lower, &r2.left.lower)?;
    let (_, into_sum) = pairing(&[
        r1.apex.differential().compose(&pu.to_first)?,
        r2.apex.differential().compose(&pu.to_second)?,
    ])?;
    let (_, embedding) = pairing(&[pl.to_first.clone(), pl.to_second.clone()])?;
    let d = lift(&into_sum, &embedding)?;
    let apex = match HeartObject::new(d) {
        Ok(o) => o,
        Err(Error::NotMonic { .. }) => return Err(Error::RefinementNotGhost),
        Err(e) => return Err(e),
    };
    let first = ObjectMorphism { upper: pu.to_first.clone(), lower: pl.to_first.clone() };
    let second = ObjectMorphism { upper: pu.to_second.clone(), lower: pl.to_second.clone() };
    let diff = r1.right.compose(&first)?.sub(&r2.right.compose(&second)?)?;
    leg_is_null_homotopic(&apex, &r1.target, &diff)
}

/// A levelwise `t: from -> onto` with `along ∘ t = leg`, if one exists.
fn factor_leg(
    leg: &ObjectMorphism,
    along: &ObjectMorphism,
    from: &HeartObject,
    onto: &HeartObject,
) -> Result<Option<ObjectMorphism>> {
    let upper = match lift(&leg.upper, &along.upper) {
        Ok(u) => u,
        Err(Error::NoLift(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let lower = match lift(&leg.lower, &along.lower) {
        Ok(l) => l,
        Err(Error::NoLift(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    match ObjectMorphism::new(from, onto, upper, lower) {
        Ok(t) => Ok(Some(t)),
        Err(Error::NonCommuting) => Ok(None),
        Err(e) => Err(e),
    }
}
