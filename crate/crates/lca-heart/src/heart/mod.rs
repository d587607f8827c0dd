//! Objects of the left heart: two-term complexes `[X' -> X]` in degrees one
//! and zero whose differential is monic, together with levelwise morphisms,
//! chains of bicartesian squares, roofs and the normal forms built from them.
//!
//! An object is a ghost when its differential is also epic. Every object is
//! an extension of a classical group `[0 -> G]` by a ghost, see
//! [`decompose`].

mod certificate;
pub(crate) mod homs;
mod normalize;
mod roof;

use serde_json::{json, Value};

pub use certificate::{kernel_matching, BicartesianCertificate, CertSquare, Direction, KernelMatchReport};
pub use homs::{torsion_free_homs, HomSolutions};
pub use normalize::{normalize_dc, DcForm};
pub use roof::{normalize_roof, roof_equal, roof_is_zero, ApexStep, NormalizedRoof, Roof};

use crate::elca::{classify_morphism, closure_of_image, cokernel, kernel, lift, ElcaGroup, ElcaMorphism, SquareData};
use crate::error::{Error, Result};
use crate::scalars::SymbolTable;

/// A monic complex `upper -> lower`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeartObject {
    differential: ElcaMorphism,
}

impl HeartObject {
    /// Validates that `x` is monic.
    pub fn new(x: ElcaMorphism) -> Result<Self> {
        let k = kernel(&x)?;
        if !k.source().is_trivial() {
            return Err(Error::NotMonic { kernel: Box::new(k) });
        }
        Ok(HeartObject { differential: x })
    }

    pub fn make(upper: &ElcaGroup, lower: &ElcaGroup, x: ElcaMorphism) -> Result<Self> {
        if x.source() != upper || x.target() != lower {
            return Err(Error::Shape(format!(
                "differential {} -> {} does not match levels {upper} and {lower}",
                x.source(),
                x.target()
            )));
        }
        Self::new(x)
    }

    /// `[0 -> g]`.
    pub fn classical(g: &ElcaGroup) -> Self {
        HeartObject { differential: ElcaMorphism::zero(&ElcaGroup::zero(), g) }
    }

    pub fn upper(&self) -> &ElcaGroup {
        self.differential.source()
    }

    pub fn lower(&self) -> &ElcaGroup {
        self.differential.target()
    }

    pub fn differential(&self) -> &ElcaMorphism {
        &self.differential
    }

    pub fn is_ghost(&self) -> Result<bool> {
        Ok(cokernel(&self.differential)?.target().is_trivial())
    }

    pub fn is_zero(&self) -> bool {
        self.upper().is_trivial() && self.lower().is_trivial()
    }

    /// Discrete upper group and compact lower group.
    pub fn is_dc(&self) -> bool {
        self.upper().is_discrete() && self.lower().is_compact()
    }

    /// Discrete upper group; every elementary group is compactly generated.
    pub fn is_dcg(&self) -> bool {
        self.upper().is_discrete()
    }

    pub fn render(&self, table: &SymbolTable) -> String {
        format!("[{} -> {}] x = {}", self.upper(), self.lower(), render_matrix(&self.differential, table))
    }

    pub fn to_json(&self, table: &SymbolTable) -> Value {
        json!({ "differential": self.differential.to_json(table) })
    }

    pub fn from_json(v: &Value, table: &SymbolTable) -> Result<Self> {
        let x = v.get("differential").ok_or_else(|| Error::Json("heart object needs `differential`".into()))?;
        Self::new(ElcaMorphism::from_json(x, table)?)
    }
}

pub(crate) fn render_matrix(f: &ElcaMorphism, table: &SymbolTable) -> String {
    let m = f.matrix();
    let rows: Vec<String> = (0..m.rows())
        .map(|i| m.row(i).iter().map(|s| s.render(table)).collect::<Vec<_>>().join(", "))
        .map(|r| format!("[{r}]"))
        .collect();
    format!("[{}]", rows.join(", "))
}

/// A levelwise morphism of complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectMorphism {
    pub upper: ElcaMorphism,
    pub lower: ElcaMorphism,
}

impl ObjectMorphism {
    /// Checks shapes and that the two levels commute with the differentials.
    pub fn new(source: &HeartObject, target: &HeartObject, upper: ElcaMorphism, lower: ElcaMorphism) -> Result<Self> {
        if upper.source() != source.upper()
            || upper.target() != target.upper()
            || lower.source() != source.lower()
            || lower.target() != target.lower()
        {
            return Err(Error::Shape("levelwise maps do not fit the objects".into()));
        }
        let f = ObjectMorphism { upper, lower };
        if !f.square(source, target)?.commutes()? {
            return Err(Error::NonCommuting);
        }
        Ok(f)
    }

    pub fn identity(o: &HeartObject) -> Self {
        ObjectMorphism { upper: ElcaMorphism::identity(o.upper()), lower: ElcaMorphism::identity(o.lower()) }
    }

    pub fn zero(source: &HeartObject, target: &HeartObject) -> Self {
        ObjectMorphism {
            upper: ElcaMorphism::zero(source.upper(), target.upper()),
            lower: ElcaMorphism::zero(source.lower(), target.lower()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.upper.is_zero() && self.lower.is_zero()
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ObjectMorphism) -> Result<ObjectMorphism> {
        Ok(ObjectMorphism { upper: self.upper.compose(&first.upper)?, lower: self.lower.compose(&first.lower)? })
    }

    pub fn sub(&self, other: &ObjectMorphism) -> Result<ObjectMorphism> {
        Ok(ObjectMorphism { upper: self.upper.sub(&other.upper)?, lower: self.lower.sub(&other.lower)? })
    }

    /// The square with the source differential on top.
    pub fn square(&self, source: &HeartObject, target: &HeartObject) -> Result<SquareData> {
        SquareData::new(
            source.differential().clone(),
            target.differential().clone(),
            self.upper.clone(),
            self.lower.clone(),
        )
    }

    pub fn to_json(&self, table: &SymbolTable) -> Value {
        json!({ "upper": self.upper.to_json(table), "lower": self.lower.to_json(table) })
    }

    pub fn from_json(v: &Value, table: &SymbolTable, source: &HeartObject, target: &HeartObject) -> Result<Self> {
        let get = |k: &str| v.get(k).ok_or_else(|| Error::Json(format!("levelwise morphism needs `{k}`")));
        let upper = ElcaMorphism::from_json(get("upper")?, table)?;
        let lower = ElcaMorphism::from_json(get("lower")?, table)?;
        Self::new(source, target, upper, lower)
    }
}

/// The torsion part `[X' -> closure]`, the classical quotient and the maps
/// relating them.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub torsion: HeartObject,
    pub cotorsion: ElcaGroup,
    /// The closure of the image, embedded in the lower group.
    pub gluing: ElcaMorphism,
    /// The lower group onto the cotorsion part.
    pub projection: ElcaMorphism,
}

pub fn decompose(o: &HeartObject) -> Result<Decomposition> {
    let x = o.differential();
    let gluing = closure_of_image(x)?;
    let torsion = HeartObject::new(lift(x, &gluing)?)?;
    let projection = cokernel(x)?;
    Ok(Decomposition { torsion, cotorsion: projection.target().clone(), gluing, projection })
}

/// Duality on objects: ghosts go to `[X^ -> X'^]`, classical objects
/// `[0 -> G]` (and any object with admissible monic differential, which is
/// isomorphic to one) go to `[0 -> (X / X')^]`.
pub fn heart_dual(o: &HeartObject) -> Result<HeartObject> {
    if o.is_ghost()? {
        return HeartObject::new(o.differential().dual());
    }
    if classify_morphism(o.differential())?.admissible_monic {
        let g = cokernel(o.differential())?.target().dual();
        return Ok(HeartObject::classical(&g));
    }
    Err(Error::OutsideLeftHeart(
        "duality is only computed for ghosts and objects with admissible monic differential".into(),
    ))
}
