//! Finitely generated abelian groups, presented canonically by Smith normal
//! form.
//!
//! Canonical coordinates list the free generators first and then the torsion
//! generators with orders `d_1 | d_2 | ...`.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::IMat;
use crate::scalars::{int, Int};

/// `u * m * v = d` with `u`, `v` unimodular and `d` diagonal, nonnegative,
/// with each diagonal entry dividing the next.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IMat,
    pub d: IMat,
    pub v: IMat,
    pub u_inv: IMat,
    pub v_inv: IMat,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

struct SnfWork {
    d: IMat,
    u: IMat,
    u_inv: IMat,
    v: IMat,
    v_inv: IMat,
}

impl SnfWork {
    // row_i += q * row_j
    fn add_row(&mut self, i: usize, j: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for m in [&mut self.d, &mut self.u] {
            for c in 0..m.cols() {
                let v = m.get(i, c) + q * m.get(j, c);
                m.set(i, c, v);
            }
        }
        // inverse: column j -= q * column i
        for r in 0..self.u_inv.rows() {
            let v = self.u_inv.get(r, j) - q * self.u_inv.get(r, i);
            self.u_inv.set(r, j, v);
        }
    }

    // col_i += q * col_j
    fn add_col(&mut self, i: usize, j: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for m in [&mut self.d, &mut self.v] {
            for r in 0..m.rows() {
                let v = m.get(r, i) + q * m.get(r, j);
                m.set(r, i, v);
            }
        }
        // inverse: row j -= q * row i
        for c in 0..self.v_inv.cols() {
            let v = self.v_inv.get(j, c) - q * self.v_inv.get(i, c);
            self.v_inv.set(j, c, v);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.d.cols() {
            let v = -self.d.get(i, c).clone();
            self.d.set(i, c, v);
        }
        for c in 0..self.u.cols() {
            let v = -self.u.get(i, c).clone();
            self.u.set(i, c, v);
        }
        for r in 0..self.u_inv.rows() {
            let v = -self.u_inv.get(r, i).clone();
            self.u_inv.set(r, i, v);
        }
    }

    /// Smallest nonzero absolute value in the trailing block; ties go to the
    /// lowest row, then the lowest column.
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.d.rows() {
            for j in t..self.d.cols() {
                let x = self.d.get(i, j);
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.d.get(bi, bj).abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

pub fn smith_normal_form(m: &IMat) -> Snf {
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = SnfWork {
        d: m.clone(),
        u: IMat::identity(rows),
        u_inv: IMat::identity(rows),
        v: IMat::identity(cols),
        v_inv: IMat::identity(cols),
    };
    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = w.pivot(t) else {
                break;
            };
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            let p = w.d.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                let q = w.d.get(i, t).div_floor(&p);
                w.add_row(i, t, &-q);
                clean &= w.d.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                let q = w.d.get(t, j).div_floor(&p);
                w.add_col(j, t, &-q);
                clean &= w.d.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !w.d.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => w.add_row(t, i, &Int::one()),
                None => break,
            }
        }
        if w.d.get(t, t).is_negative() {
            w.negate_row(t);
        }
    }
    Snf { u: w.u, d: w.d, v: w.v, u_inv: w.u_inv, v_inv: w.v_inv }
}

/// Basis (as columns) of the lattice spanned by the columns of `gens`.
pub fn lattice_basis(gens: &IMat) -> IMat {
    let snf = smith_normal_form(gens);
    let r = snf.rank();
    let mv = gens.mul(&snf.v);
    mv.select_cols(&(0..r).collect::<Vec<_>>())
}

/// Basis (as columns) of the integer kernel `{x : m x = 0}`.
pub fn integer_kernel(m: &IMat) -> IMat {
    let snf = smith_normal_form(m);
    let r = snf.rank();
    snf.v.select_cols(&(r..m.cols()).collect::<Vec<_>>())
}

/// Solves `m x = b` over the integers. Returns a particular solution and a
/// kernel basis, or `None` if there is no integer solution.
pub fn integer_solve(m: &IMat, b: &[Int]) -> Option<(Vec<Int>, IMat)> {
    let snf = smith_normal_form(m);
    let r = snf.rank();
    let ub = snf.u.mul_vec(b);
    let diag = snf.diagonal();
    let mut y = vec![Int::zero(); m.cols()];
    for (i, val) in ub.iter().enumerate() {
        if i < r {
            if !val.is_multiple_of(&diag[i]) {
                return None;
            }
            y[i] = val / &diag[i];
        } else if !val.is_zero() {
            return None;
        }
    }
    let x = snf.v.mul_vec(&y);
    Some((x, snf.v.select_cols(&(r..m.cols()).collect::<Vec<_>>())))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FgAbGroup {
    pub free_rank: usize,
    pub invariant_factors: Vec<Int>,
}

/// Canonical form of a presented group with the coordinate changes in both
/// directions: `to` maps presentation coordinates to canonical ones, `from`
/// maps canonical generators back.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub group: FgAbGroup,
    pub to: IMat,
    pub from: IMat,
}

impl FgAbGroup {
    pub fn new(free_rank: usize, invariant_factors: Vec<Int>) -> Result<Self> {
        let g = FgAbGroup { free_rank, invariant_factors };
        for (i, d) in g.invariant_factors.iter().enumerate() {
            if d < &int(2) {
                return Err(Error::Shape(format!("invariant factor {d} must be at least 2")));
            }
            if i > 0 && !d.is_multiple_of(&g.invariant_factors[i - 1]) {
                return Err(Error::Shape("invariant factors must form a divisibility chain".into()));
            }
        }
        Ok(g)
    }

    pub fn zero() -> Self {
        FgAbGroup { free_rank: 0, invariant_factors: vec![] }
    }

    pub fn free(n: usize) -> Self {
        FgAbGroup { free_rank: n, invariant_factors: vec![] }
    }

    /// Canonical form of `Z^free ⊕ ⊕ Z/orders[i]` for arbitrary orders.
    pub fn from_orders(free_rank: usize, orders: &[Int]) -> Self {
        let n = free_rank + orders.len();
        let mut rel = IMat::zeros(n, orders.len());
        for (i, d) in orders.iter().enumerate() {
            rel.set(free_rank + i, i, d.clone());
        }
        Self::canonicalize(n, &rel).group
    }

    /// Canonical form of `Z^n / (column span of rel)`.
    pub fn canonicalize(n: usize, rel: &IMat) -> Canonical {
        assert_eq!(rel.rows(), n);
        let snf = smith_normal_form(rel);
        let diag = snf.diagonal();
        let mut free = Vec::new();
        let mut tors = Vec::new();
        for i in 0..n {
            match diag.get(i) {
                Some(d) if d.is_one() => {}
                Some(d) if !d.is_zero() => tors.push(i),
                _ => free.push(i),
            }
        }
        let order: Vec<usize> = free.iter().chain(tors.iter()).copied().collect();
        let group = FgAbGroup {
            free_rank: free.len(),
            invariant_factors: tors.iter().map(|&i| diag[i].clone()).collect(),
        };
        let mut to = snf.u.select_rows(&order);
        for (k, &i) in tors.iter().enumerate() {
            let row = free.len() + k;
            for c in 0..to.cols() {
                let v = to.get(row, c).mod_floor(&diag[i]);
                to.set(row, c, v);
            }
        }
        let from = snf.u_inv.select_cols(&order);
        Canonical { group, to, from }
    }

    pub fn ngens(&self) -> usize {
        self.free_rank + self.invariant_factors.len()
    }

    /// Order of generator `i` (`None` for free generators).
    pub fn gen_order(&self, i: usize) -> Option<&Int> {
        if i < self.free_rank {
            None
        } else {
            self.invariant_factors.get(i - self.free_rank)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.ngens() == 0
    }

    pub fn order(&self) -> Option<Int> {
        self.is_finite().then(|| self.invariant_factors.iter().fold(Int::one(), |a, d| a * d))
    }

    /// Relation matrix on the canonical generators.
    pub fn relations(&self) -> IMat {
        let n = self.ngens();
        let k = self.invariant_factors.len();
        let mut rel = IMat::zeros(n, k);
        for (i, d) in self.invariant_factors.iter().enumerate() {
            rel.set(self.free_rank + i, i, d.clone());
        }
        rel
    }

    /// Reduces an element's torsion coordinates.
    pub fn reduce(&self, x: &mut [Int]) {
        for (i, d) in self.invariant_factors.iter().enumerate() {
            let v = x[self.free_rank + i].mod_floor(d);
            x[self.free_rank + i] = v;
        }
    }

    /// All elements of a finite group, in lexicographic order.
    pub fn elements(&self) -> Result<Vec<Vec<Int>>> {
        let order = self.order().ok_or_else(|| Error::OrderBound("group is infinite".into()))?;
        if order > int(10_000) {
            return Err(Error::OrderBound(format!("order {order} exceeds 10^4")));
        }
        let mut out = vec![vec![]];
        for d in &self.invariant_factors {
            let d = d.to_i64().unwrap_or(0);
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..d).map(move |k| {
                        let mut p = prefix.clone();
                        p.push(int(k));
                        p
                    })
                })
                .collect();
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rank": self.free_rank,
            "torsion": self.invariant_factors.iter().map(|d| Value::String(d.to_string())).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let rank = v
            .get("rank")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Json("fg group needs `rank`".into()))?;
        let tors = parse_int_list(v.get("torsion"))?;
        FgAbGroup::new(rank as usize, tors)
    }
}

pub(crate) fn parse_int_list(v: Option<&Value>) -> Result<Vec<Int>> {
    let arr = v.and_then(Value::as_array).ok_or_else(|| Error::Json("expected an integer list".into()))?;
    arr.iter()
        .map(|x| match x {
            Value::Number(n) => n.as_i64().map(int).ok_or_else(|| Error::Json("bad integer".into())),
            Value::String(s) => s.parse::<Int>().map_err(|_| Error::Json(format!("bad integer `{s}`"))),
            _ => Err(Error::Json("bad integer".into())),
        })
        .collect()
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            n => parts.push(format!("Z^{n}")),
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// A homomorphism given by its matrix on canonical generators (target rows,
/// source columns).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FgAbMorphism {
    pub source: FgAbGroup,
    pub target: FgAbGroup,
    pub matrix: IMat,
}

impl FgAbMorphism {
    pub fn new(source: FgAbGroup, target: FgAbGroup, matrix: IMat) -> Result<Self> {
        if matrix.rows() != target.ngens() || matrix.cols() != source.ngens() {
            return Err(Error::Shape(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.ngens(),
                source.ngens()
            )));
        }
        let mut matrix = matrix;
        for i in 0..target.invariant_factors.len() {
            let r = target.free_rank + i;
            for c in 0..matrix.cols() {
                let v = matrix.get(r, c).mod_floor(&target.invariant_factors[i]);
                matrix.set(r, c, v);
            }
        }
        for j in 0..source.invariant_factors.len() {
            let c = source.free_rank + j;
            let d = &source.invariant_factors[j];
            for r in 0..target.ngens() {
                let x = matrix.get(r, c) * d;
                let ok = match target.gen_order(r) {
                    None => x.is_zero(),
                    Some(e) => x.is_multiple_of(e),
                };
                if !ok {
                    return Err(Error::Entry(format!(
                        "generator of order {d} cannot map to entry {} in row {r}",
                        matrix.get(r, c)
                    )));
                }
            }
        }
        Ok(FgAbMorphism { source, target, matrix })
    }

    pub fn identity(g: &FgAbGroup) -> Self {
        FgAbMorphism { source: g.clone(), target: g.clone(), matrix: IMat::identity(g.ngens()) }
    }

    pub fn zero(source: &FgAbGroup, target: &FgAbGroup) -> Self {
        FgAbMorphism {
            source: source.clone(),
            target: target.clone(),
            matrix: IMat::zeros(target.ngens(), source.ngens()),
        }
    }

    pub fn compose(&self, first: &FgAbMorphism) -> Result<FgAbMorphism> {
        if first.target != self.source {
            return Err(Error::Shape("composition of incompatible fg morphisms".into()));
        }
        FgAbMorphism::new(first.source.clone(), self.target.clone(), self.matrix.mul(&first.matrix))
    }

    pub fn apply(&self, x: &[Int]) -> Vec<Int> {
        let mut y = self.matrix.mul_vec(x);
        self.target.reduce(&mut y);
        y
    }
}

/// Kernel with its injective embedding.
pub fn fg_kernel(f: &FgAbMorphism) -> (FgAbGroup, FgAbMorphism) {
    let (g, h) = (&f.source, &f.target);
    let rel_h = h.relations();
    let a = f.matrix.hstack(&rel_h);
    let ker = integer_kernel(&a);
    let gens = ker.select_rows(&(0..g.ngens()).collect::<Vec<_>>());
    // The solution lattice contains the relations of the source.
    let basis = lattice_basis(&gens);
    let r = basis.cols();
    let rel_g = g.relations();
    let mut coords = IMat::zeros(r, rel_g.cols());
    for c in 0..rel_g.cols() {
        let (x, _) = integer_solve(&basis, &rel_g.col(c)).expect("relations lie in the kernel lattice");
        for (i, v) in x.into_iter().enumerate() {
            coords.set(i, c, v);
        }
    }
    let canon = FgAbGroup::canonicalize(r, &coords);
    let emb = basis.mul(&canon.from);
    let iota = FgAbMorphism::new(canon.group.clone(), g.clone(), emb).expect("kernel embedding respects relations");
    (canon.group, iota)
}

/// Cokernel with its surjective projection.
pub fn fg_cokernel(f: &FgAbMorphism) -> (FgAbGroup, FgAbMorphism) {
    let h = &f.target;
    let rel = f.matrix.hstack(&h.relations());
    let canon = FgAbGroup::canonicalize(h.ngens(), &rel);
    let proj = FgAbMorphism::new(h.clone(), canon.group.clone(), canon.to).expect("projection respects relations");
    (canon.group, proj)
}

/// The image `f(G)` as an abstract group.
pub fn fg_image(f: &FgAbMorphism) -> FgAbGroup {
    let (_, iota) = fg_kernel(f);
    let rel = iota.matrix.hstack(&f.source.relations());
    FgAbGroup::canonicalize(f.source.ngens(), &rel).group
}

pub fn fg_is_isomorphic(g: &FgAbGroup, h: &FgAbGroup) -> bool {
    g == h
}
