//! Elementary locally compact abelian groups `R^a + Z^b + T^c + F` and their
//! continuous homomorphisms.
//!
//! A morphism is a dense scalar matrix whose rows are target coordinates and
//! whose columns are source coordinates, both ordered `[R, Z, T, F]`. Each
//! entry is normalized according to the pair of coordinate kinds it connects:
//!
//! | target \ source | R          | Z              | T       | F (order d)       |
//! |-----------------|------------|----------------|---------|-------------------|
//! | R               | rational   | scalar         | 0       | 0                 |
//! | Z               | 0          | integer        | 0       | 0                 |
//! | T               | scalar     | scalar mod 1   | integer | `k/d` mod 1       |
//! | F (order e)     | 0          | integer mod e  | 0       | integer mod e     |
//!
//! Every other entry is a structural zero.

mod ops;
mod solve;

use std::fmt;

use num_integer::Integer;
use serde_json::{json, Map, Value};

pub use ops::*;
pub use solve::{solve_mixed, MixedSolution, MixedSystem};

use crate::error::{Error, Result};
use crate::fgab::{parse_int_list, FgAbGroup, FgAbMorphism};
use crate::linalg::{IMat, SMat};
use crate::scalars::{frac, rat_int, Int, Scalar, SymbolTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    R,
    Z,
    T,
    F,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ElcaGroup {
    pub vector_rank: usize,
    pub lattice_rank: usize,
    pub torus_rank: usize,
    pub torsion: Vec<Int>,
}

impl ElcaGroup {
    /// Validated constructor; `torsion` must already be a divisibility chain
    /// of integers at least 2.
    pub fn new(vector_rank: usize, lattice_rank: usize, torus_rank: usize, torsion: Vec<Int>) -> Result<Self> {
        FgAbGroup::new(0, torsion.clone())?;
        Ok(ElcaGroup { vector_rank, lattice_rank, torus_rank, torsion })
    }

    /// Accepts arbitrary finite orders and canonicalizes them.
    pub fn with_orders(vector_rank: usize, lattice_rank: usize, torus_rank: usize, orders: &[Int]) -> Self {
        ElcaGroup {
            vector_rank,
            lattice_rank,
            torus_rank,
            torsion: FgAbGroup::from_orders(0, orders).invariant_factors,
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn reals(n: usize) -> Self {
        ElcaGroup { vector_rank: n, ..Self::default() }
    }

    pub fn lattice(n: usize) -> Self {
        ElcaGroup { lattice_rank: n, ..Self::default() }
    }

    pub fn torus(n: usize) -> Self {
        ElcaGroup { torus_rank: n, ..Self::default() }
    }

    pub fn finite(orders: &[Int]) -> Self {
        Self::with_orders(0, 0, 0, orders)
    }

    /// The discrete group with the given finitely generated underlying group.
    pub fn discrete(g: &FgAbGroup) -> Self {
        ElcaGroup { lattice_rank: g.free_rank, torsion: g.invariant_factors.clone(), ..Self::default() }
    }

    /// Underlying finitely generated group of a discrete group.
    pub fn discrete_part(&self) -> Option<FgAbGroup> {
        self.is_discrete()
            .then(|| FgAbGroup { free_rank: self.lattice_rank, invariant_factors: self.torsion.clone() })
    }

    pub fn dim(&self) -> usize {
        self.vector_rank + self.lattice_rank + self.torus_rank + self.torsion.len()
    }

    pub fn r_range(&self) -> std::ops::Range<usize> {
        0..self.vector_rank
    }

    pub fn z_range(&self) -> std::ops::Range<usize> {
        let s = self.vector_rank;
        s..s + self.lattice_rank
    }

    pub fn t_range(&self) -> std::ops::Range<usize> {
        let s = self.vector_rank + self.lattice_rank;
        s..s + self.torus_rank
    }

    pub fn f_range(&self) -> std::ops::Range<usize> {
        let s = self.vector_rank + self.lattice_rank + self.torus_rank;
        s..s + self.torsion.len()
    }

    pub fn kind(&self, i: usize) -> Kind {
        if i < self.vector_rank {
            Kind::R
        } else if i < self.vector_rank + self.lattice_rank {
            Kind::Z
        } else if i < self.vector_rank + self.lattice_rank + self.torus_rank {
            Kind::T
        } else {
            Kind::F
        }
    }

    /// Order of the generator at coordinate `i`, if it is a torsion coordinate.
    pub fn order(&self, i: usize) -> Option<&Int> {
        let s = self.f_range().start;
        if i >= s {
            self.torsion.get(i - s)
        } else {
            None
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_compact(&self) -> bool {
        self.vector_rank == 0 && self.lattice_rank == 0
    }

    pub fn is_discrete(&self) -> bool {
        self.vector_rank == 0 && self.torus_rank == 0
    }

    pub fn is_connected(&self) -> bool {
        self.lattice_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_vector_free(&self) -> bool {
        self.vector_rank == 0
    }

    pub fn is_finite(&self) -> bool {
        self.vector_rank == 0 && self.lattice_rank == 0 && self.torus_rank == 0
    }

    pub fn dual(&self) -> ElcaGroup {
        ElcaGroup {
            vector_rank: self.vector_rank,
            lattice_rank: self.torus_rank,
            torus_rank: self.lattice_rank,
            torsion: self.torsion.clone(),
        }
    }

    /// Position of coordinate `i` of `self` in the dual group's coordinates.
    fn dual_index(&self, i: usize) -> usize {
        let (a, b, c) = (self.vector_rank, self.lattice_rank, self.torus_rank);
        match self.kind(i) {
            Kind::R => i,
            // Z coordinates become T coordinates, which follow the c lattice ones.
            Kind::Z => a + c + (i - a),
            Kind::T => a + (i - a - b),
            Kind::F => i,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "R": self.vector_rank,
            "Z": self.lattice_rank,
            "T": self.torus_rank,
            "F": self.torsion.iter().map(|d| Value::String(d.to_string())).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let rank = |k: &str| -> Result<usize> {
            match v.get(k) {
                None => Ok(0),
                Some(x) => x
                    .as_u64()
                    .map(|n| n as usize)
                    .ok_or_else(|| Error::Json(format!("group field `{k}` must be a nonnegative integer"))),
            }
        };
        let torsion = match v.get("F") {
            None => vec![],
            some => parse_int_list(some)?,
        };
        ElcaGroup::new(rank("R")?, rank("Z")?, rank("T")?, torsion)
    }
}

impl fmt::Display for ElcaGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, n) in [("R", self.vector_rank), ("Z", self.lattice_rank), ("T", self.torus_rank)] {
            match n {
                0 => {}
                1 => parts.push(name.to_string()),
                n => parts.push(format!("{name}^{n}")),
            }
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Normalizes one matrix entry connecting source kind `col` to target kind
/// `row`.
fn normalize_entry(target: &ElcaGroup, i: usize, source: &ElcaGroup, j: usize, s: &Scalar) -> Result<Scalar> {
    let bad = |what: &str| Error::Entry(format!("entry ({i},{j}) = {s}: {what}"));
    match (target.kind(i), source.kind(j)) {
        (Kind::R, Kind::R) => {
            if !s.is_rational() {
                return Err(bad("R -> R entries must be rational"));
            }
            Ok(s.clone())
        }
        (Kind::R, Kind::Z) | (Kind::T, Kind::R) => Ok(s.clone()),
        (Kind::Z, Kind::Z) | (Kind::T, Kind::T) => {
            if !s.is_integer() {
                return Err(bad("entry must be an integer"));
            }
            Ok(s.clone())
        }
        (Kind::T, Kind::Z) => Ok(s.circle_reduce().into_scalar()),
        (Kind::T, Kind::F) => {
            let d = source.order(j).expect("torsion coordinate");
            let q = s.as_rational().ok_or_else(|| bad("F -> T entries must be rational"))?;
            if !(q.clone() * rat_int(d)).is_integer() {
                return Err(bad("F -> T entry must have denominator dividing the source order"));
            }
            Ok(Scalar::from_rat(frac(&q)))
        }
        (Kind::F, Kind::Z) => {
            let e = target.order(i).expect("torsion coordinate");
            let m = s.as_integer().ok_or_else(|| bad("entry must be an integer"))?;
            Ok(Scalar::from_int(&m.mod_floor(e)))
        }
        (Kind::F, Kind::F) => {
            let e = target.order(i).expect("torsion coordinate");
            let d = source.order(j).expect("torsion coordinate");
            let m = s.as_integer().ok_or_else(|| bad("entry must be an integer"))?.mod_floor(e);
            if !(&m * d).is_multiple_of(e) {
                return Err(bad("image order does not divide source order"));
            }
            Ok(Scalar::from_int(&m))
        }
        _ => {
            if !s.is_zero() {
                return Err(bad("structural zero block"));
            }
            Ok(Scalar::zero())
        }
    }
}

/// A continuous homomorphism between elementary groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElcaMorphism {
    source: ElcaGroup,
    target: ElcaGroup,
    matrix: SMat,
}

impl ElcaMorphism {
    pub fn new(source: ElcaGroup, target: ElcaGroup, matrix: SMat) -> Result<Self> {
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(Error::Shape(format!(
                "matrix is {}x{}, but {} -> {} needs {}x{}",
                matrix.rows(),
                matrix.cols(),
                source,
                target,
                target.dim(),
                source.dim()
            )));
        }
        let mut m = matrix;
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = normalize_entry(&target, i, &source, j, m.get(i, j))?;
                m.set(i, j, v);
            }
        }
        Ok(ElcaMorphism { source, target, matrix: m })
    }

    pub fn from_rows(source: ElcaGroup, target: ElcaGroup, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        if rows.len() != target.dim() || rows.iter().any(|r| r.len() != source.dim()) {
            return Err(Error::Shape(format!("entries do not fit {source} -> {target}")));
        }
        let cols = source.dim();
        Self::new(source, target, SMat::from_rows(rows, cols))
    }

    pub fn identity(g: &ElcaGroup) -> Self {
        ElcaMorphism { source: g.clone(), target: g.clone(), matrix: scalar_identity(g.dim()) }
    }

    pub fn zero(source: &ElcaGroup, target: &ElcaGroup) -> Self {
        ElcaMorphism { source: source.clone(), target: target.clone(), matrix: SMat::zeros(target.dim(), source.dim()) }
    }

    pub fn source(&self) -> &ElcaGroup {
        &self.source
    }

    pub fn target(&self) -> &ElcaGroup {
        &self.target
    }

    pub fn matrix(&self) -> &SMat {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> &Scalar {
        self.matrix.get(i, j)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// Column of the image of source generator `j`.
    pub fn column(&self, j: usize) -> Vec<Scalar> {
        self.matrix.col(j)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ElcaMorphism) -> Result<ElcaMorphism> {
        if first.target != self.source {
            return Err(Error::Shape(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.source, self.target, first.source, first.target
            )));
        }
        let (n, k, m) = (self.target.dim(), self.source.dim(), first.source.dim());
        let mut out = SMat::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                let pairs = (0..k).map(|l| (self.matrix.get(i, l), first.matrix.get(l, j)));
                out.set(i, j, Scalar::dot(pairs.filter(|(a, b)| !a.is_zero() && !b.is_zero()))?);
            }
        }
        ElcaMorphism::new(first.source.clone(), self.target.clone(), out)
    }

    pub fn add(&self, other: &ElcaMorphism) -> Result<ElcaMorphism> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Shape("sum of morphisms with different shapes".into()));
        }
        let m = SMat::from_fn(self.matrix.rows(), self.matrix.cols(), |i, j| {
            self.matrix.get(i, j).add(other.matrix.get(i, j))
        });
        ElcaMorphism::new(self.source.clone(), self.target.clone(), m)
    }

    pub fn neg(&self) -> ElcaMorphism {
        let m = self.matrix.map(Scalar::neg);
        ElcaMorphism::new(self.source.clone(), self.target.clone(), m).expect("negation preserves validity")
    }

    pub fn sub(&self, other: &ElcaMorphism) -> Result<ElcaMorphism> {
        self.add(&other.neg())
    }

    pub fn scale_int(&self, n: &Int) -> ElcaMorphism {
        let m = self.matrix.map(|s| s.scale_int(n));
        ElcaMorphism::new(self.source.clone(), self.target.clone(), m).expect("integer multiples preserve validity")
    }

    /// The Pontryagin dual `target^ -> source^`.
    pub fn dual(&self) -> ElcaMorphism {
        let (g, h) = (&self.source, &self.target);
        let (gd, hd) = (g.dual(), h.dual());
        let mut m = SMat::zeros(gd.dim(), hd.dim());
        for i in 0..h.dim() {
            for j in 0..g.dim() {
                let s = self.matrix.get(i, j);
                if s.is_zero() {
                    continue;
                }
                let v = match (h.kind(i), g.kind(j)) {
                    (Kind::F, Kind::Z) => {
                        let e = h.order(i).unwrap();
                        Scalar::from_rat(s.rational_part() / rat_int(e))
                    }
                    (Kind::T, Kind::F) => {
                        let d = g.order(j).unwrap();
                        Scalar::from_rat(s.rational_part() * rat_int(d))
                    }
                    (Kind::F, Kind::F) => {
                        let e = h.order(i).unwrap();
                        let d = g.order(j).unwrap();
                        Scalar::from_rat(s.rational_part() * rat_int(d) / rat_int(e))
                    }
                    _ => s.clone(),
                };
                m.set(g.dual_index(j), h.dual_index(i), v);
            }
        }
        ElcaMorphism::new(hd, gd, m).expect("dual of a valid morphism is valid")
    }

    /// Restriction of the underlying map to the discrete data of discrete
    /// groups.
    pub fn discrete_part(&self) -> Option<FgAbMorphism> {
        let s = self.source.discrete_part()?;
        let t = self.target.discrete_part()?;
        let m = IMat::from_fn(self.matrix.rows(), self.matrix.cols(), |i, j| {
            self.matrix.get(i, j).as_integer().expect("discrete entries are integers")
        });
        FgAbMorphism::new(s, t, m).ok()
    }

    pub fn from_discrete(f: &FgAbMorphism) -> ElcaMorphism {
        let m = f.matrix.map(Scalar::from_int);
        ElcaMorphism::new(ElcaGroup::discrete(&f.source), ElcaGroup::discrete(&f.target), m)
            .expect("fg morphisms are valid discrete morphisms")
    }

    /// Applies the morphism to a discrete-coordinate integer vector of the
    /// source (only meaningful on the `Z` and `F` coordinates).
    pub fn apply_scalars(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        let mut out = vec![Scalar::zero(); self.target.dim()];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, xj) in x.iter().enumerate() {
                let a = self.matrix.get(i, j);
                if !a.is_zero() && !xj.is_zero() {
                    *o = o.add(&a.mul(xj)?);
                }
            }
        }
        reduce_element(&self.target, &mut out);
        Ok(out)
    }

    pub fn render(&self, table: &SymbolTable) -> String {
        let rows: Vec<String> = (0..self.matrix.rows())
            .map(|i| {
                let r: Vec<String> = self.matrix.row(i).iter().map(|s| s.render(table)).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        format!("{} -> {} = [{}]", self.source, self.target, rows.join(", "))
    }

    pub fn to_json(&self, table: &SymbolTable) -> Value {
        let mut blocks = Map::new();
        let (g, h) = (&self.source, &self.target);
        let ranges = |x: &ElcaGroup| {
            [("R", x.r_range()), ("Z", x.z_range()), ("T", x.t_range()), ("F", x.f_range())]
        };
        for (sn, sr) in ranges(g) {
            for (tn, tr) in ranges(h) {
                if sr.is_empty() || tr.is_empty() {
                    continue;
                }
                let rows: Vec<Value> = tr
                    .clone()
                    .map(|i| Value::Array(sr.clone().map(|j| self.matrix.get(i, j).to_json(table)).collect()))
                    .collect();
                if self.matrix.select_rows(&tr.clone().collect::<Vec<_>>())
                    .select_cols(&sr.clone().collect::<Vec<_>>())
                    .is_zero()
                {
                    continue;
                }
                blocks.insert(format!("{sn}{tn}"), Value::Array(rows));
            }
        }
        json!({ "source": g.to_json(), "target": h.to_json(), "blocks": blocks })
    }

    pub fn from_json(v: &Value, table: &SymbolTable) -> Result<Self> {
        let g = ElcaGroup::from_json(v.get("source").ok_or_else(|| Error::Json("morphism needs `source`".into()))?)?;
        let h = ElcaGroup::from_json(v.get("target").ok_or_else(|| Error::Json("morphism needs `target`".into()))?)?;
        let mut m = SMat::zeros(h.dim(), g.dim());
        let empty = Map::new();
        let blocks = match v.get("blocks") {
            None => &empty,
            Some(b) => b.as_object().ok_or_else(|| Error::Json("`blocks` must be an object".into()))?,
        };
        let range = |x: &ElcaGroup, c: char| match c {
            'R' => Some(x.r_range()),
            'Z' => Some(x.z_range()),
            'T' => Some(x.t_range()),
            'F' => Some(x.f_range()),
            _ => None,
        };
        for (name, rows) in blocks {
            let cs: Vec<char> = name.chars().collect();
            let (sr, tr) = match cs.as_slice() {
                [a, b] => (range(&g, *a), range(&h, *b)),
                _ => (None, None),
            };
            let (Some(sr), Some(tr)) = (sr, tr) else {
                return Err(Error::Json(format!("unknown block `{name}`")));
            };
            let rows = rows.as_array().ok_or_else(|| Error::Json(format!("block `{name}` must be a list")))?;
            if rows.len() != tr.len() {
                return Err(Error::Json(format!("block `{name}` has the wrong number of rows")));
            }
            for (i, row) in tr.clone().zip(rows) {
                let row = row.as_array().ok_or_else(|| Error::Json(format!("block `{name}` rows must be lists")))?;
                if row.len() != sr.len() {
                    return Err(Error::Json(format!("block `{name}` has the wrong number of columns")));
                }
                for (j, x) in sr.clone().zip(row) {
                    m.set(i, j, Scalar::from_json(x, table)?);
                }
            }
        }
        ElcaMorphism::new(g, h, m)
    }
}

pub fn scalar_identity(n: usize) -> SMat {
    SMat::from_fn(n, n, |i, j| if i == j { Scalar::one() } else { Scalar::zero() })
}

/// Reduces the `T` and `F` coordinates of an element.
pub fn reduce_element(g: &ElcaGroup, x: &mut [Scalar]) {
    for i in g.t_range() {
        x[i] = x[i].circle_reduce().into_scalar();
    }
    for i in g.f_range() {
        let d = g.order(i).unwrap();
        if let Some(n) = x[i].as_integer() {
            x[i] = Scalar::from_int(&n.mod_floor(d));
        }
    }
}

/// A direct sum with its canonical injections and projections.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub group: ElcaGroup,
    pub injections: Vec<ElcaMorphism>,
    pub projections: Vec<ElcaMorphism>,
}

pub fn direct_sum(groups: &[ElcaGroup]) -> DirectSum {
    let a: usize = groups.iter().map(|g| g.vector_rank).sum();
    let b: usize = groups.iter().map(|g| g.lattice_rank).sum();
    let c: usize = groups.iter().map(|g| g.torus_rank).sum();
    let orders: Vec<Int> = groups.iter().flat_map(|g| g.torsion.iter().cloned()).collect();
    let mut rel = IMat::zeros(orders.len(), orders.len());
    for (i, d) in orders.iter().enumerate() {
        rel.set(i, i, d.clone());
    }
    let canon = FgAbGroup::canonicalize(orders.len(), &rel);
    let sum = ElcaGroup { vector_rank: a, lattice_rank: b, torus_rank: c, torsion: canon.group.invariant_factors };
    let mut injections = Vec::new();
    let mut projections = Vec::new();
    let (mut oa, mut ob, mut oc, mut of) = (0, 0, 0, 0);
    for g in groups {
        let mut inj = SMat::zeros(sum.dim(), g.dim());
        let mut proj = SMat::zeros(g.dim(), sum.dim());
        let pairs = [
            (g.r_range(), sum.r_range().start + oa),
            (g.z_range(), sum.z_range().start + ob),
            (g.t_range(), sum.t_range().start + oc),
        ];
        for (range, start) in pairs {
            for (k, j) in range.enumerate() {
                inj.set(start + k, j, Scalar::one());
                proj.set(j, start + k, Scalar::one());
            }
        }
        for (k, j) in g.f_range().enumerate() {
            let raw = of + k;
            for (ci, i) in sum.f_range().enumerate() {
                inj.set(i, j, Scalar::from_int(canon.to.get(ci, raw)));
                proj.set(j, i, Scalar::from_int(canon.from.get(raw, ci)));
            }
        }
        injections.push(ElcaMorphism::new(g.clone(), sum.clone(), inj).expect("direct sum injection"));
        projections.push(ElcaMorphism::new(sum.clone(), g.clone(), proj).expect("direct sum projection"));
        oa += g.vector_rank;
        ob += g.lattice_rank;
        oc += g.torus_rank;
        of += g.torsion.len();
    }
    DirectSum { group: sum, injections, projections }
}

/// `x ↦ (f_1 x, ..., f_n x)` into the direct sum of the targets.
pub fn pairing(maps: &[ElcaMorphism]) -> Result<(DirectSum, ElcaMorphism)> {
    let source = maps.first().ok_or_else(|| Error::Shape("empty pairing".into()))?.source.clone();
    let ds = direct_sum(&maps.iter().map(|f| f.target.clone()).collect::<Vec<_>>());
    let mut acc = ElcaMorphism::zero(&source, &ds.group);
    for (f, inj) in maps.iter().zip(&ds.injections) {
        acc = acc.add(&inj.compose(f)?)?;
    }
    Ok((ds, acc))
}

/// `(x_1, ..., x_n) ↦ sum f_i x_i` from the direct sum of the sources.
pub fn copairing(maps: &[ElcaMorphism]) -> Result<(DirectSum, ElcaMorphism)> {
    let target = maps.first().ok_or_else(|| Error::Shape("empty copairing".into()))?.target.clone();
    let ds = direct_sum(&maps.iter().map(|f| f.source.clone()).collect::<Vec<_>>());
    let mut acc = ElcaMorphism::zero(&ds.group, &target);
    for (f, pr) in maps.iter().zip(&ds.projections) {
        acc = acc.add(&f.compose(pr)?)?;
    }
    Ok((ds, acc))
}

/// `f_1 ⊕ ... ⊕ f_n` between the direct sums of sources and targets.
pub fn block_diagonal(maps: &[ElcaMorphism]) -> Result<(DirectSum, DirectSum, ElcaMorphism)> {
    let src = direct_sum(&maps.iter().map(|f| f.source.clone()).collect::<Vec<_>>());
    let tgt = direct_sum(&maps.iter().map(|f| f.target.clone()).collect::<Vec<_>>());
    let mut acc = ElcaMorphism::zero(&src.group, &tgt.group);
    for (k, f) in maps.iter().enumerate() {
        acc = acc.add(&tgt.injections[k].compose(&f.compose(&src.projections[k])?)?)?;
    }
    Ok((src, tgt, acc))
}

/// Convenience constructor for scalar matrices from small integers.
pub fn int_rows(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
    rows.iter().map(|r| r.iter().map(|&x| Scalar::from_i64(x)).collect()).collect()
}

impl ElcaGroup {
    /// True when `self` and `other` have equal canonical data.
    pub fn same_type(&self, other: &ElcaGroup) -> bool {
        self == other
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{int, rat, SymbolTable};

    fn alpha() -> (SymbolTable, Scalar) {
        let mut t = SymbolTable::new();
        let a = t.declare("a", Some(std::f64::consts::SQRT_2)).unwrap();
        (t, Scalar::atom(a))
    }

    #[test]
    fn groups_and_duals() {
        let g = ElcaGroup::new(2, 3, 1, vec![int(4)]).unwrap();
        assert_eq!(g.dual(), ElcaGroup::new(2, 1, 3, vec![int(4)]).unwrap());
        assert_eq!(ElcaGroup::torus(1).dual(), ElcaGroup::lattice(1));
        assert_eq!(g.to_string(), "R^2 + Z^3 + T + Z/4");
        assert_eq!(ElcaGroup::finite(&[int(4), int(6)]).torsion, vec![int(2), int(12)]);
        assert_eq!(ElcaGroup::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn composition_examples() {
        let (_, a) = alpha();
        let (z, t) = (ElcaGroup::lattice(1), ElcaGroup::torus(1));
        let f = ElcaMorphism::from_rows(z.clone(), t.clone(), vec![vec![a.clone()]]).unwrap();
        let two = ElcaMorphism::from_rows(t.clone(), t.clone(), int_rows(&[&[2]])).unwrap();
        let c = two.compose(&f).unwrap();
        assert_eq!(c.entry(0, 0), &a.scale_int(&int(2)));
        let r = ElcaGroup::reals(1);
        let g = ElcaMorphism::from_rows(z.clone(), r.clone(), vec![vec![Scalar::from_rat(rat(2, 3))]]).unwrap();
        let h = ElcaMorphism::from_rows(r, t, vec![vec![Scalar::from_rat(rat(1, 2))]]).unwrap();
        assert_eq!(h.compose(&g).unwrap().entry(0, 0), &Scalar::from_rat(rat(1, 3)));
    }

    #[test]
    fn structural_zeros_rejected() {
        let e = ElcaMorphism::from_rows(ElcaGroup::reals(1), ElcaGroup::lattice(1), int_rows(&[&[1]]));
        assert!(matches!(e, Err(Error::Entry(_))));
        let e = ElcaMorphism::from_rows(ElcaGroup::finite(&[int(2)]), ElcaGroup::torus(1), vec![vec![Scalar::from_rat(rat(1, 3))]]);
        assert!(e.is_err());
    }

    #[test]
    fn dual_involution_with_torsion() {
        let g = ElcaGroup::new(1, 1, 1, vec![int(6)]).unwrap();
        let h = ElcaGroup::new(1, 1, 1, vec![int(4)]).unwrap();
        let (_, a) = alpha();
        let mut m = SMat::zeros(4, 4);
        m.set(0, 0, Scalar::from_rat(rat(1, 2)));
        m.set(0, 1, a.clone());
        m.set(1, 1, Scalar::from_i64(3));
        m.set(2, 0, Scalar::from_rat(rat(1, 3)));
        m.set(2, 1, a.scale_int(&int(2)));
        m.set(2, 2, Scalar::from_i64(-1));
        m.set(2, 3, Scalar::from_rat(rat(1, 6)));
        m.set(3, 1, Scalar::from_i64(3));
        m.set(3, 3, Scalar::from_i64(2));
        let f = ElcaMorphism::new(g, h, m).unwrap();
        assert_eq!(f.dual().dual(), f);
    }

    #[test]
    fn direct_sum_merges_torsion() {
        let ds = direct_sum(&[ElcaGroup::finite(&[int(4)]), ElcaGroup::finite(&[int(6)])]);
        assert_eq!(ds.group.torsion, vec![int(2), int(12)]);
        for k in 0..2 {
            let id = ds.projections[k].compose(&ds.injections[k]).unwrap();
            assert_eq!(id, ElcaMorphism::identity(&ds.projections[k].target));
        }
        let back = ds.injections[0]
            .compose(&ds.projections[0])
            .unwrap()
            .add(&ds.injections[1].compose(&ds.projections[1]).unwrap())
            .unwrap();
        assert_eq!(back, ElcaMorphism::identity(&ds.group));
    }
}
