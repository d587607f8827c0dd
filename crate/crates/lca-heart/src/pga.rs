//! Precompactly generated groups presented as a finitely generated group
//! `D` with an injective map into an elementary group. The topology on `D`
//! is the subspace topology.

use serde_json::{json, Value};

use crate::elca::{
    closure_of_image, cokernel, factor, is_iso, kernel, lift, ElcaGroup, ElcaMorphism,
};
use crate::error::{Error, Result};
use crate::fgab::{fg_cokernel, fg_kernel, FgAbGroup, FgAbMorphism};
use crate::heart::homs::{Builder, Unknown};
use crate::heart::{heart_dual, BicartesianCertificate, Direction, HeartObject, ObjectMorphism};
use crate::scalars::SymbolTable;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PgaGroup {
    group: FgAbGroup,
    ambient: ElcaGroup,
    embedding: ElcaMorphism,
}

/// The closure of the image with the dense map from `D` and the inclusion
/// into the ambient group.
#[derive(Clone, Debug)]
pub struct Completion {
    pub group: ElcaGroup,
    pub dense: ElcaMorphism,
    pub inclusion: ElcaMorphism,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PgaClassification {
    pub precompact: bool,
    pub locally_precompact: bool,
    pub precompactly_generated: bool,
}

impl PgaGroup {
    pub fn new(group: FgAbGroup, ambient: ElcaGroup, embedding: ElcaMorphism) -> Result<Self> {
        if embedding.source() != &ElcaGroup::discrete(&group) || embedding.target() != &ambient {
            return Err(Error::Shape(format!("embedding must map {group} into {ambient}")));
        }
        let k = kernel(&embedding)?;
        if !k.source().is_trivial() {
            return Err(Error::NotMonic { kernel: Box::new(k) });
        }
        Ok(PgaGroup { group, ambient, embedding })
    }

    /// A finitely generated group with the discrete topology.
    pub fn discrete(group: &FgAbGroup) -> Self {
        let g = ElcaGroup::discrete(group);
        PgaGroup { group: group.clone(), ambient: g.clone(), embedding: ElcaMorphism::identity(&g) }
    }

    pub fn group(&self) -> &FgAbGroup {
        &self.group
    }

    pub fn ambient(&self) -> &ElcaGroup {
        &self.ambient
    }

    pub fn embedding(&self) -> &ElcaMorphism {
        &self.embedding
    }

    pub fn completion(&self) -> Result<Completion> {
        let inclusion = closure_of_image(&self.embedding)?;
        let dense = lift(&self.embedding, &inclusion)?;
        Ok(Completion { group: inclusion.source().clone(), dense, inclusion })
    }

    pub fn classify(&self) -> Result<PgaClassification> {
        let precompact = self.completion()?.group.is_compact();
        Ok(PgaClassification { precompact, locally_precompact: true, precompactly_generated: true })
    }

    pub fn to_json(&self, table: &SymbolTable) -> Value {
        json!({ "D": self.group.to_json(), "ambient": self.ambient.to_json(), "iota": self.embedding.to_json(table) })
    }

    pub fn from_json(v: &Value, table: &SymbolTable) -> Result<Self> {
        let get = |k: &str| v.get(k).ok_or_else(|| Error::Json(format!("pga group needs `{k}`")));
        let group = FgAbGroup::from_json(get("D")?)?;
        let ambient = ElcaGroup::from_json(get("ambient")?)?;
        let embedding = ElcaMorphism::from_json(get("iota")?, table)?;
        Self::new(group, ambient, embedding)
    }
}

/// A homomorphism of the underlying groups together with its continuous
/// extension to the completions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PgaMorphism {
    pub source: PgaGroup,
    pub target: PgaGroup,
    pub map: FgAbMorphism,
    pub completed: ElcaMorphism,
}

impl PgaMorphism {
    /// Solves for the extension to completions; fails with `NoLift` when the
    /// map is not continuous for the subspace topologies.
    pub fn new(source: &PgaGroup, target: &PgaGroup, map: FgAbMorphism) -> Result<Self> {
        if map.source != source.group || map.target != target.group {
            return Err(Error::Shape("underlying map does not fit the groups".into()));
        }
        let cs = source.completion()?;
        let ct = target.completion()?;
        let rhs = ct.dense.compose(&ElcaMorphism::from_discrete(&map))?;
        let mut b = Builder::new(Unknown::new(&cs.group, &ct.group, false));
        b.impose(None, Some(&cs.dense), &rhs)?;
        let completed = b
            .particular()?
            .ok_or_else(|| Error::NoLift("the map does not extend continuously to the completions".into()))?;
        if completed.compose(&cs.dense)? != rhs {
            return Err(Error::Internal("extension does not restrict to the given map".into()));
        }
        Ok(PgaMorphism { source: source.clone(), target: target.clone(), map, completed })
    }

    pub fn identity(p: &PgaGroup) -> Result<Self> {
        Self::new(p, p, FgAbMorphism::identity(&p.group))
    }

    pub fn compose(&self, first: &PgaMorphism) -> Result<PgaMorphism> {
        PgaMorphism::new(&first.source, &self.target, self.map.compose(&first.map)?)
    }
}

pub fn theta(p: &PgaGroup) -> Result<HeartObject> {
    HeartObject::new(p.completion()?.dense)
}

pub fn theta_morphism(f: &PgaMorphism) -> Result<ObjectMorphism> {
    let (s, t) = (theta(&f.source)?, theta(&f.target)?);
    ObjectMorphism::new(&s, &t, ElcaMorphism::from_discrete(&f.map), f.completed.clone())
}

pub fn theta_inverse(o: &HeartObject) -> Result<PgaGroup> {
    let d = o.upper().discrete_part().ok_or(Error::UpperNotDiscrete)?;
    PgaGroup::new(d, o.lower().clone(), o.differential().clone())
}

/// The chain from `theta(theta_inverse(o))` back to a ghost `o`.
pub fn theta_round_trip_certificate(o: &HeartObject) -> Result<(HeartObject, BicartesianCertificate)> {
    if !o.is_ghost()? {
        return Err(Error::NotGhost);
    }
    let p = theta_inverse(o)?;
    let back = theta(&p)?;
    let c = p.completion()?;
    let leg = ObjectMorphism::new(&back, o, ElcaMorphism::identity(o.upper()), c.inclusion)?;
    let mut cert = BicartesianCertificate::empty();
    cert.push(leg.square(&back, o)?, Direction::Forward);
    Ok((back, cert))
}

/// The map from `theta_inverse(theta(p))` to `p` that is the identity on
/// the underlying group.
pub fn theta_round_trip_morphism(p: &PgaGroup) -> Result<PgaMorphism> {
    let q = theta_inverse(&theta(p)?)?;
    PgaMorphism::new(&q, p, FgAbMorphism::identity(&p.group))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkKind {
    /// Admissible epic with finitely generated discrete kernel.
    Epic,
    /// Admissible monic with finitely generated discrete cokernel.
    Monic,
}

#[derive(Clone, Debug)]
pub struct IsogenyLink {
    pub morphism: PgaMorphism,
    pub kind: LinkKind,
    pub kernel: FgAbGroup,
    pub cokernel: FgAbGroup,
}

#[derive(Clone, Debug)]
pub struct LatticeIsogenyWitness {
    pub links: Vec<IsogenyLink>,
}

/// Strictness data of a morphism.
struct Strictness {
    kernel_discrete: bool,
    image_closed: bool,
    open_onto_image: bool,
    cokernel_discrete: bool,
}

fn strictness(f: &PgaMorphism) -> Result<Strictness> {
    let cs = f.source.completion()?;
    let ct = f.target.completion()?;
    let fd = ElcaMorphism::from_discrete(&f.map);
    let (_, k) = fg_kernel(&f.map);
    let k = ElcaMorphism::from_discrete(&k);
    // closure of the kernel inside the completion of the source
    let kernel_closure = closure_of_image(&cs.dense.compose(&k)?)?;
    let kernel_discrete = kernel_closure.source().is_discrete();
    // closure of the image inside the completion of the target
    let image = closure_of_image(&ct.dense.compose(&fd)?)?;
    let to_quotient = cokernel(&image)?;
    let meets = kernel(&to_quotient.compose(&ct.dense)?)?;
    let image_closed = cokernel(&lift(&fd, &meets)?)?.target().is_trivial();
    let cokernel_discrete = to_quotient.target().is_discrete();
    let q = cokernel(&kernel_closure)?;
    let onto = lift(&f.completed, &image)?;
    let open_onto_image = is_iso(&factor(&onto, &q)?);
    Ok(Strictness { kernel_discrete, image_closed, open_onto_image, cokernel_discrete })
}

impl LatticeIsogenyWitness {
    /// Rechecks every link.
    pub fn validate(&self) -> Result<()> {
        for (k, l) in self.links.iter().enumerate() {
            let bad = |reason: &str| Error::InvalidCertificate { square: k, reason: reason.into() };
            let s = strictness(&l.morphism)?;
            if !(s.kernel_discrete && s.image_closed && s.open_onto_image && s.cokernel_discrete) {
                return Err(bad("link is not strict with discrete kernel and cokernel"));
            }
            let (kg, _) = fg_kernel(&l.morphism.map);
            let (cg, _) = fg_cokernel(&l.morphism.map);
            if kg != l.kernel || cg != l.cokernel {
                return Err(bad("recorded kernel or cokernel is wrong"));
            }
            let ok = match l.kind {
                LinkKind::Epic => cg.is_trivial(),
                LinkKind::Monic => kg.is_trivial(),
            };
            if !ok {
                return Err(bad("link kind does not match"));
            }
            if k > 0 && self.links[k - 1].morphism.target != l.morphism.source {
                return Err(bad("links do not compose"));
            }
        }
        Ok(())
    }

    /// Whether all kernels and cokernels are finite.
    pub fn is_finite(&self) -> bool {
        self.links.iter().all(|l| l.kernel.is_finite() && l.cokernel.is_finite())
    }
}

/// A witness exists iff `f` is strict with discrete kernel and cokernel; it
/// factors `f` as an admissible epic onto the image followed by the
/// inclusion of the image.
pub fn is_lattice_isogeny(f: &PgaMorphism) -> Result<Option<LatticeIsogenyWitness>> {
    let s = strictness(f)?;
    if !(s.kernel_discrete && s.image_closed && s.open_onto_image && s.cokernel_discrete) {
        return Ok(None);
    }
    let (coker, proj) = fg_cokernel(&f.map);
    let (img, inc) = fg_kernel(&proj);
    let image = PgaGroup::new(
        img.clone(),
        f.target.ambient.clone(),
        f.target.embedding.compose(&ElcaMorphism::from_discrete(&inc))?,
    )?;
    let onto = lift(&ElcaMorphism::from_discrete(&f.map), &ElcaMorphism::from_discrete(&inc))?
        .discrete_part()
        .ok_or_else(|| Error::Internal("lift between discrete groups".into()))?;
    let (ker, _) = fg_kernel(&f.map);
    let epic = PgaMorphism::new(&f.source, &image, onto)?;
    let monic = PgaMorphism::new(&image, &f.target, inc)?;
    let links = vec![
        IsogenyLink { morphism: epic, kind: LinkKind::Epic, kernel: ker, cokernel: FgAbGroup::zero() },
        IsogenyLink { morphism: monic, kind: LinkKind::Monic, kernel: FgAbGroup::zero(), cokernel: coker },
    ];
    let w = LatticeIsogenyWitness { links };
    w.validate()?;
    Ok(Some(w))
}

/// `theta_inverse(heart_dual(theta(p)))` for precompact `p`.
pub fn weak_dual_dc(p: &PgaGroup) -> Result<PgaGroup> {
    if !p.classify()?.precompact {
        return Err(Error::NotPrecompact);
    }
    theta_inverse(&heart_dual(&theta(p)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{int, Scalar};

    fn alpha() -> (SymbolTable, Scalar) {
        let mut t = SymbolTable::new();
        let a = Scalar::atom(t.declare("alpha", Some(std::f64::consts::SQRT_2)).unwrap());
        (t, a)
    }

    fn dense_circle(a: &Scalar) -> PgaGroup {
        let x = ElcaMorphism::from_rows(ElcaGroup::lattice(1), ElcaGroup::torus(1), vec![vec![a.clone()]]).unwrap();
        PgaGroup::new(FgAbGroup::free(1), ElcaGroup::torus(1), x).unwrap()
    }

    fn dense_line(a: &Scalar) -> PgaGroup {
        let x = ElcaMorphism::from_rows(ElcaGroup::lattice(2), ElcaGroup::reals(1), vec![vec![Scalar::one(), a.clone()]])
            .unwrap();
        PgaGroup::new(FgAbGroup::free(2), ElcaGroup::reals(1), x).unwrap()
    }

    #[test]
    fn completions() {
        let (_, a) = alpha();
        assert_eq!(dense_circle(&a).completion().unwrap().group, ElcaGroup::torus(1));
        assert_eq!(dense_line(&a).completion().unwrap().group, ElcaGroup::reals(1));
        let lattice = PgaGroup::new(
            FgAbGroup::free(1),
            ElcaGroup::reals(1),
            ElcaMorphism::from_rows(ElcaGroup::lattice(1), ElcaGroup::reals(1), vec![vec![Scalar::one()]]).unwrap(),
        )
        .unwrap();
        assert_eq!(lattice.completion().unwrap().group, ElcaGroup::lattice(1));
    }

    #[test]
    fn classification() {
        let (_, a) = alpha();
        assert!(dense_circle(&a).classify().unwrap().precompact);
        assert!(!dense_line(&a).classify().unwrap().precompact);
        assert!(!PgaGroup::discrete(&FgAbGroup::free(1)).classify().unwrap().precompact);
        assert!(PgaGroup::discrete(&FgAbGroup::from_orders(0, &[int(5)])).classify().unwrap().precompact);
    }

    #[test]
    fn theta_examples() {
        let (_, a) = alpha();
        let o = theta(&dense_circle(&a)).unwrap();
        assert!(o.is_dc() && o.is_ghost().unwrap());
        let o = theta(&dense_line(&a)).unwrap();
        assert!(o.is_dcg() && !o.is_dc());
        let f = theta(&PgaGroup::discrete(&FgAbGroup::from_orders(0, &[int(4)]))).unwrap();
        assert!(f.is_ghost().unwrap());
    }

    #[test]
    fn reduction_mod_one_is_an_isogeny() {
        let (_, a) = alpha();
        let f = FgAbMorphism::new(FgAbGroup::free(2), FgAbGroup::free(1), crate::linalg::IMat::from_rows(vec![vec![int(0), int(1)]], 2))
            .unwrap();
        let m = PgaMorphism::new(&dense_line(&a), &dense_circle(&a), f).unwrap();
        let w = is_lattice_isogeny(&m).unwrap().expect("strict");
        assert_eq!(w.links[0].kernel, FgAbGroup::free(1));
        assert!(w.links[1].cokernel.is_trivial());
    }

    #[test]
    fn dense_inclusion_is_not_strict() {
        let (_, a) = alpha();
        let z = PgaGroup::discrete(&FgAbGroup::free(1));
        let m = PgaMorphism::new(&z, &dense_circle(&a), FgAbMorphism::identity(&FgAbGroup::free(1))).unwrap();
        assert!(is_lattice_isogeny(&m).unwrap().is_none());
        // the other direction is not continuous
        let back = PgaMorphism::new(&dense_circle(&a), &z, FgAbMorphism::identity(&FgAbGroup::free(1)));
        assert!(matches!(back, Err(Error::NoLift(_))));
    }

    #[test]
    fn round_trips() {
        let (_, a) = alpha();
        for p in [dense_circle(&a), dense_line(&a)] {
            let f = theta_round_trip_morphism(&p).unwrap();
            let w = is_lattice_isogeny(&f).unwrap().unwrap();
            w.validate().unwrap();
            let o = theta(&p).unwrap();
            let (back, cert) = theta_round_trip_certificate(&o).unwrap();
            cert.validate(&back, &o).unwrap();
        }
    }

    #[test]
    fn weak_duals() {
        let (_, a) = alpha();
        let p = dense_circle(&a);
        assert_eq!(weak_dual_dc(&p).unwrap(), p);
        let f = PgaGroup::discrete(&FgAbGroup::from_orders(0, &[int(6)]));
        assert_eq!(weak_dual_dc(&f).unwrap().group(), &FgAbGroup::from_orders(0, &[int(6)]));
        assert!(matches!(weak_dual_dc(&dense_line(&a)), Err(Error::NotPrecompact)));
    }
}
