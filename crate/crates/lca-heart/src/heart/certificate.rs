//! Chains of bicartesian squares connecting heart objects.
//!
//! Each square is a levelwise morphism between two objects, drawn with the
//! source differential on top. A forward square points from the current
//! object of the chain to the next one, an inverted square points back.

use serde_json::{json, Value};

use super::HeartObject;
use crate::elca::{cokernel, is_bicartesian, kernel, ElcaGroup, ElcaMorphism, SquareData};
use crate::error::{Error, Result};
use crate::scalars::SymbolTable;

const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Inverted,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Forward => Direction::Inverted,
            Direction::Inverted => Direction::Forward,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Inverted => "inverted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertSquare {
    pub square: SquareData,
    pub direction: Direction,
}

impl CertSquare {
    /// The differentials at the start and at the end of this link.
    fn ends(&self) -> (&ElcaMorphism, &ElcaMorphism) {
        match self.direction {
            Direction::Forward => (&self.square.top, &self.square.bottom),
            Direction::Inverted => (&self.square.bottom, &self.square.top),
        }
    }

    /// The square between the dual objects; arrows reverse.
    pub fn dual(&self) -> CertSquare {
        let sq = &self.square;
        CertSquare {
            square: SquareData {
                top: sq.bottom.dual(),
                bottom: sq.top.dual(),
                left: sq.right.dual(),
                right: sq.left.dual(),
            },
            direction: self.direction.flip(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BicartesianCertificate {
    pub squares: Vec<CertSquare>,
}

impl BicartesianCertificate {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    pub fn push(&mut self, square: SquareData, direction: Direction) {
        self.squares.push(CertSquare { square, direction });
    }

    pub fn extend(&mut self, other: BicartesianCertificate) {
        self.squares.extend(other.squares);
    }

    /// The chain between the dual objects, in the same order.
    pub fn dual(&self) -> BicartesianCertificate {
        BicartesianCertificate { squares: self.squares.iter().map(CertSquare::dual).collect() }
    }

    /// Checks the chain square by square, starting at `from` and ending at
    /// `to`.
    pub fn validate(&self, from: &HeartObject, to: &HeartObject) -> Result<()> {
        let mut current = from.differential().clone();
        for (k, cs) in self.squares.iter().enumerate() {
            let bad = |reason: String| Error::InvalidCertificate { square: k, reason };
            let (start, end) = cs.ends();
            if *start != current {
                return Err(bad("does not start at the object reached so far".into()));
            }
            for row in [&cs.square.top, &cs.square.bottom] {
                match HeartObject::new(row.clone()) {
                    Ok(_) => {}
                    Err(Error::NotMonic { kernel }) => {
                        return Err(bad(format!("row is not monic, kernel {}", kernel.source())))
                    }
                    Err(e) => return Err(bad(e.to_string())),
                }
            }
            match is_bicartesian(&cs.square) {
                Ok(true) => {}
                Ok(false) => return Err(bad("square is not bicartesian".into())),
                Err(Error::NonCommuting) => return Err(bad("square does not commute".into())),
                Err(e) => return Err(bad(e.to_string())),
            }
            current = end.clone();
        }
        if current != *to.differential() {
            return Err(Error::InvalidCertificate {
                square: self.squares.len(),
                reason: "chain ends at a different object".into(),
            });
        }
        Ok(())
    }

    /// Kernel and cokernel comparison for every square whose rows have
    /// discrete upper groups.
    pub fn kernel_matching_reports(&self) -> Result<Vec<KernelMatchReport>> {
        let mut out = Vec::new();
        for (k, cs) in self.squares.iter().enumerate() {
            if let Some(mut r) = kernel_matching(&cs.square)? {
                r.square = k;
                out.push(r);
            }
        }
        Ok(out)
    }

    pub fn to_json(&self, table: &SymbolTable) -> Value {
        let squares: Vec<Value> = self
            .squares
            .iter()
            .map(|cs| {
                json!({
                    "direction": cs.direction.name(),
                    "top": cs.square.top.to_json(table),
                    "bottom": cs.square.bottom.to_json(table),
                    "left": cs.square.left.to_json(table),
                    "right": cs.square.right.to_json(table),
                })
            })
            .collect();
        json!({ "version": SCHEMA_VERSION, "squares": squares })
    }

    /// Parses the chain; shapes are checked here, everything else by
    /// [`BicartesianCertificate::validate`].
    pub fn from_json(v: &Value, table: &SymbolTable) -> Result<Self> {
        if v.get("version").and_then(Value::as_u64) != Some(SCHEMA_VERSION) {
            return Err(Error::Json(format!("certificate schema version must be {SCHEMA_VERSION}")));
        }
        let squares = v
            .get("squares")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Json("certificate needs a `squares` list".into()))?;
        let mut out = BicartesianCertificate::empty();
        for (k, s) in squares.iter().enumerate() {
            let get = |name: &str| {
                s.get(name)
                    .ok_or_else(|| Error::Json(format!("square {k} needs `{name}`")))
                    .and_then(|m| ElcaMorphism::from_json(m, table))
            };
            let direction = match s.get("direction").and_then(Value::as_str) {
                Some("forward") => Direction::Forward,
                Some("inverted") => Direction::Inverted,
                _ => return Err(Error::Json(format!("square {k} needs a direction"))),
            };
            let square = SquareData::new(get("top")?, get("bottom")?, get("left")?, get("right")?)?;
            out.push(square, direction);
        }
        Ok(out)
    }
}

/// Kernels and cokernels of the two vertical maps of a square whose rows
/// both have discrete upper groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelMatchReport {
    pub square: usize,
    pub kernels: (ElcaGroup, ElcaGroup),
    pub cokernels: (ElcaGroup, ElcaGroup),
    /// Both rows have compact lower groups.
    pub compact_rows: bool,
}

impl KernelMatchReport {
    /// Kernels agree, cokernels agree, and all four are finitely generated
    /// discrete (finite when both rows have compact lower groups).
    pub fn holds(&self) -> bool {
        let groups = [&self.kernels.0, &self.kernels.1, &self.cokernels.0, &self.cokernels.1];
        let small = if self.compact_rows {
            groups.iter().all(|g| g.is_finite())
        } else {
            groups.iter().all(|g| g.is_discrete())
        };
        self.kernels.0 == self.kernels.1 && self.cokernels.0 == self.cokernels.1 && small
    }
}

/// `None` when one of the rows has a non-discrete upper group.
pub fn kernel_matching(sq: &SquareData) -> Result<Option<KernelMatchReport>> {
    let rows = [&sq.top, &sq.bottom];
    if !rows.iter().all(|r| r.source().is_discrete()) {
        return Ok(None);
    }
    let compact_rows = rows.iter().all(|r| r.target().is_compact());
    let ker = |f: &ElcaMorphism| -> Result<ElcaGroup> { Ok(kernel(f)?.source().clone()) };
    let coker = |f: &ElcaMorphism| -> Result<ElcaGroup> { Ok(cokernel(f)?.target().clone()) };
    Ok(Some(KernelMatchReport {
        square: 0,
        kernels: (ker(&sq.left)?, ker(&sq.right)?),
        cokernels: (coker(&sq.left)?, coker(&sq.right)?),
        compact_rows,
    }))
}
