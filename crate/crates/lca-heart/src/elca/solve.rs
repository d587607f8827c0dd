//! Linear systems with real and integer unknowns and scalar coefficients.
//!
//! Each row reads `sum_j a_j y_j + sum_k b_k u_k = c` with real unknowns `y`
//! and integer unknowns `u`. Real unknowns are eliminated first; the rows that
//! are left only involve integers and split into one rational system per atom,
//! which is solved over `Z` by Smith normal form.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fgab::integer_solve;
use crate::linalg::{rref, IMat, QMat, SMat};
use crate::scalars::{rat_int, Atom, Int, Rat, Scalar};

#[derive(Clone, Debug)]
pub struct Row {
    pub real: Vec<Scalar>,
    pub int: Vec<Scalar>,
    pub rhs: Scalar,
}

#[derive(Clone, Debug, Default)]
pub struct MixedSystem {
    pub n_real: usize,
    pub n_int: usize,
    pub rows: Vec<Row>,
}

/// All solutions: `u = u0 + L λ` for `λ ∈ Z^l` and
/// `y = y0 + N v + Y u` for `v ∈ R^p`, where `v` are the values of the free
/// real unknowns.
#[derive(Clone, Debug)]
pub struct MixedSolution {
    pub free_reals: Vec<usize>,
    pub real_const: Vec<Scalar>,
    pub real_free: SMat,
    pub real_int: SMat,
    pub int_particular: Vec<Int>,
    pub int_lattice: IMat,
}

impl MixedSystem {
    pub fn new(n_real: usize, n_int: usize) -> Self {
        MixedSystem { n_real, n_int, rows: vec![] }
    }

    pub fn push(&mut self, real: Vec<Scalar>, int: Vec<Scalar>, rhs: Scalar) {
        assert_eq!(real.len(), self.n_real);
        assert_eq!(int.len(), self.n_int);
        self.rows.push(Row { real, int, rhs });
    }
}

impl MixedSolution {
    /// Real values for given free-real values and integer values.
    pub fn reals(&self, v: &[Scalar], u: &[Int]) -> Result<Vec<Scalar>> {
        let mut y = self.real_const.clone();
        for (i, yi) in y.iter_mut().enumerate() {
            for (k, vk) in v.iter().enumerate() {
                let a = self.real_free.get(i, k);
                if !a.is_zero() && !vk.is_zero() {
                    *yi = yi.add(&a.mul(vk)?);
                }
            }
            for (k, uk) in u.iter().enumerate() {
                *yi = yi.add(&self.real_int.get(i, k).scale_int(uk));
            }
        }
        Ok(y)
    }

    pub fn ints(&self, lambda: &[Int]) -> Vec<Int> {
        let mut u = self.int_particular.clone();
        for (i, ui) in u.iter_mut().enumerate() {
            for (k, l) in lambda.iter().enumerate() {
                *ui += self.int_lattice.get(i, k) * l;
            }
        }
        u
    }
}

fn row_mul(s: &Scalar, row: &Row) -> Result<Row> {
    let m = |v: &Scalar| s.mul(v);
    Ok(Row {
        real: row.real.iter().map(m).collect::<Result<_>>()?,
        int: row.int.iter().map(m).collect::<Result<_>>()?,
        rhs: s.mul(&row.rhs)?,
    })
}

fn row_sub(a: &Row, b: &Row) -> Row {
    Row {
        real: a.real.iter().zip(&b.real).map(|(x, y)| x.sub(y)).collect(),
        int: a.int.iter().zip(&b.int).map(|(x, y)| x.sub(y)).collect(),
        rhs: a.rhs.sub(&b.rhs),
    }
}

/// `row := row - row[j] * pivot`, where `pivot` has coefficient 1 at real `j`.
fn eliminate(row: &Row, pivot: &Row, j: usize) -> Result<Row> {
    let c = row.real[j].clone();
    if c.is_zero() {
        return Ok(row.clone());
    }
    let scaled = row_mul(&c, pivot).map_err(|_| unrepresentable())?;
    let mut out = row_sub(row, &scaled);
    out.real[j] = Scalar::zero();
    Ok(out)
}

fn unrepresentable() -> Error {
    Error::Unrepresentable("solving requires multiplying two independent symbols".into())
}

struct Layout {
    atoms: Vec<Atom>,
    n_real: usize,
    n_int: usize,
}

impl Layout {
    fn new(rows: &[Row], n_real: usize, n_int: usize) -> Self {
        let mut atoms = vec![Atom::ONE];
        for r in rows {
            for s in r.real.iter().chain(&r.int).chain(std::iter::once(&r.rhs)) {
                atoms.extend(s.atoms());
            }
        }
        atoms.sort();
        atoms.dedup();
        Layout { atoms, n_real, n_int }
    }

    fn n_sym(&self) -> usize {
        self.atoms.len() - 1
    }

    fn width(&self) -> usize {
        self.atoms.len() * (self.n_real + self.n_int + 1)
    }

    // Column order: symbolic real parts, rational real parts, integer parts,
    // right-hand side.
    fn real_col(&self, a: usize, j: usize) -> usize {
        if a == 0 {
            self.n_sym() * self.n_real + j
        } else {
            (a - 1) * self.n_real + j
        }
    }

    fn int_col(&self, a: usize, k: usize) -> usize {
        self.atoms.len() * self.n_real + a * self.n_int + k
    }

    fn rhs_col(&self, a: usize) -> usize {
        self.atoms.len() * (self.n_real + self.n_int) + a
    }

    fn expand(&self, r: &Row) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.width()];
        for (a, atom) in self.atoms.iter().enumerate() {
            for j in 0..self.n_real {
                out[self.real_col(a, j)] = r.real[j].coeff(*atom);
            }
            for k in 0..self.n_int {
                out[self.int_col(a, k)] = r.int[k].coeff(*atom);
            }
            out[self.rhs_col(a)] = r.rhs.coeff(*atom);
        }
        out
    }

    fn collapse(&self, v: &[Rat]) -> Row {
        let build = |f: &dyn Fn(usize) -> usize| {
            Scalar::linear_combine(
                &self.atoms.iter().enumerate().map(|(a, atom)| (v[f(a)].clone(), Scalar::atom(*atom))).collect::<Vec<_>>(),
            )
        };
        Row {
            real: (0..self.n_real).map(|j| build(&|a| self.real_col(a, j))).collect(),
            int: (0..self.n_int).map(|k| build(&|a| self.int_col(a, k))).collect(),
            rhs: build(&|a| self.rhs_col(a)),
        }
    }
}

enum Reduced {
    Inconsistent,
    Rows(Vec<Row>),
}

/// Rational row reduction of the per-atom expansion.
fn reduce(rows: &[Row], n_real: usize, n_int: usize) -> Reduced {
    let layout = Layout::new(rows, n_real, n_int);
    let mut m = QMat::from_rows(rows.iter().map(|r| layout.expand(r)).collect(), layout.width());
    let pivots = rref(&mut m);
    let rhs_start = layout.rhs_col(0);
    if pivots.iter().any(|&p| p >= rhs_start) {
        return Reduced::Inconsistent;
    }
    Reduced::Rows((0..pivots.len()).map(|i| layout.collapse(m.row(i))).collect())
}

fn has_reals(r: &Row) -> bool {
    r.real.iter().any(|s| !s.is_zero())
}

fn rational_reals(r: &Row) -> bool {
    r.real.iter().all(Scalar::is_rational)
}

/// Solves the system. `Ok(None)` means there is no solution.
pub fn solve_mixed(sys: &MixedSystem) -> Result<Option<MixedSolution>> {
    let (nr, ni) = (sys.n_real, sys.n_int);
    let mut work: Vec<Row> = sys.rows.clone();
    // Rows solved for a real unknown with possibly symbolic coefficients.
    let mut aside: Vec<(usize, Row)> = Vec::new();
    loop {
        let rows = match reduce(&work, nr, ni) {
            Reduced::Inconsistent => return Ok(None),
            Reduced::Rows(r) => r,
        };
        let pick = rows.iter().position(|r| has_reals(r) && !rational_reals(r));
        let Some(pi) = pick else {
            work = rows;
            break;
        };
        let mut row = rows[pi].clone();
        // Substitute rows solved with rational real coefficients.
        for other in rows.iter().filter(|r| has_reals(r) && rational_reals(r)) {
            let j = other.real.iter().position(|s| !s.is_zero()).unwrap();
            if !row.real[j].is_zero() {
                let lead = other.real[j].as_rational().unwrap();
                let normalized = row_mul(&Scalar::from_rat(lead.recip()), other)?;
                row = eliminate(&row, &normalized, j)?;
            }
        }
        let mut rest: Vec<Row> = rows.into_iter().enumerate().filter(|(i, _)| *i != pi).map(|(_, r)| r).collect();
        if has_reals(&row) {
            let j = (0..nr)
                .find(|&j| row.real[j].is_rational() && !row.real[j].is_zero())
                .or_else(|| (0..nr).find(|&j| row.real[j].monomial_inverse().is_some()))
                .ok_or_else(|| Error::Unrepresentable("a real unknown has a non-monomial symbolic coefficient".into()))?;
            let inv = row.real[j].monomial_inverse().unwrap();
            let pivot = row_mul(&inv, &row).map_err(|_| unrepresentable())?;
            for r in rest.iter_mut() {
                *r = eliminate(r, &pivot, j)?;
            }
            for (_, r) in aside.iter_mut() {
                *r = eliminate(r, &pivot, j)?;
            }
            aside.push((j, pivot));
        } else {
            rest.push(row);
        }
        work = rest;
    }

    // Integer part.
    let int_rows: Vec<&Row> = work.iter().filter(|r| !has_reals(r)).collect();
    let layout = Layout::new(&work, nr, ni);
    let mut irows: Vec<Vec<Int>> = Vec::new();
    let mut irhs: Vec<Int> = Vec::new();
    for r in &int_rows {
        for atom in &layout.atoms {
            let coeffs: Vec<Rat> = r.int.iter().map(|s| s.coeff(*atom)).collect();
            let c = r.rhs.coeff(*atom);
            if coeffs.iter().all(Zero::is_zero) && c.is_zero() {
                continue;
            }
            let l = coeffs.iter().chain(std::iter::once(&c)).fold(Int::one(), |acc, q| num_integer::lcm(acc, q.denom().clone()));
            let scale = rat_int(&l);
            irows.push(coeffs.iter().map(|q| (q * &scale).to_integer()).collect());
            irhs.push((c * &scale).to_integer());
        }
    }
    let imat = IMat::from_rows(irows, ni);
    let Some((u0, lattice)) = integer_solve(&imat, &irhs) else {
        return Ok(None);
    };

    // Real part: rows with rational real coefficients plus the rows set aside.
    let mut solved: Vec<(usize, Row)> = Vec::new();
    for r in work.iter().filter(|r| has_reals(r)) {
        let j = r.real.iter().position(|s| !s.is_zero()).unwrap();
        let lead = r.real[j].as_rational().unwrap();
        solved.push((j, row_mul(&Scalar::from_rat(lead.recip()), r)?));
    }
    // Rows set aside may still mention unknowns pivoted later by rational rows.
    for (j, r) in aside.iter() {
        let mut r = r.clone();
        for (k, p) in &solved {
            r = eliminate(&r, p, *k)?;
        }
        solved.push((*j, r));
    }
    let pivots: Vec<usize> = solved.iter().map(|(j, _)| *j).collect();
    let free_reals: Vec<usize> = (0..nr).filter(|j| !pivots.contains(j)).collect();
    let mut real_const = vec![Scalar::zero(); nr];
    let mut real_free = SMat::zeros(nr, free_reals.len());
    let mut real_int = SMat::zeros(nr, ni);
    for (k, &j) in free_reals.iter().enumerate() {
        real_free.set(j, k, Scalar::one());
    }
    for (j, r) in &solved {
        for (k, &f) in free_reals.iter().enumerate() {
            real_free.set(*j, k, r.real[f].neg());
        }
        for (k, p) in pivots.iter().enumerate() {
            if p != j && !r.real[*p].is_zero() {
                return Err(Error::Internal(format!("real pivot {p} still present in row for {k}")));
            }
        }
        for k in 0..ni {
            real_int.set(*j, k, r.int[k].neg());
        }
        real_const[*j] = r.rhs.clone();
    }
    Ok(Some(MixedSolution { free_reals, real_const, real_free, real_int, int_particular: u0, int_lattice: lattice }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{int, rat, SymbolTable};

    fn s(n: i64) -> Scalar {
        Scalar::from_i64(n)
    }

    fn check(sys: &MixedSystem, sol: &MixedSolution, v: &[Scalar], lambda: &[Int]) {
        let u = sol.ints(lambda);
        let y = sol.reals(v, &u).unwrap();
        for r in &sys.rows {
            let mut acc = Scalar::zero();
            for (a, x) in r.real.iter().zip(&y) {
                acc = acc.add(&a.mul(x).unwrap());
            }
            for (b, x) in r.int.iter().zip(&u) {
                acc = acc.add(&b.scale_int(x));
            }
            assert_eq!(acc, r.rhs);
        }
    }

    #[test]
    fn circle_constraint() {
        // x/2 + n/3 - z = 0
        let mut sys = MixedSystem::new(1, 2);
        sys.push(vec![Scalar::from_rat(rat(1, 2))], vec![Scalar::from_rat(rat(1, 3)), s(-1)], s(0));
        let sol = solve_mixed(&sys).unwrap().unwrap();
        assert!(sol.free_reals.is_empty());
        assert_eq!(sol.int_lattice.cols(), 2);
        check(&sys, &sol, &[], &[int(1), int(0)]);
        check(&sys, &sol, &[], &[int(-3), int(7)]);
    }

    #[test]
    fn symbolic_splits_per_atom() {
        let mut t = SymbolTable::new();
        let a = Scalar::atom(t.declare("a", None).unwrap());
        // a*n - z = 0 forces n = z = 0
        let mut sys = MixedSystem::new(0, 2);
        sys.push(vec![], vec![a.clone(), s(-1)], s(0));
        let sol = solve_mixed(&sys).unwrap().unwrap();
        assert_eq!(sol.int_lattice.cols(), 0);
        // x + a*n = 0 with real x
        let mut sys = MixedSystem::new(1, 1);
        sys.push(vec![s(1)], vec![a.clone()], s(0));
        let sol = solve_mixed(&sys).unwrap().unwrap();
        assert_eq!(sol.real_int.get(0, 0), &a.neg());
        check(&sys, &sol, &[], &[int(5)]);
    }

    #[test]
    fn reciprocal_normalization() {
        let mut t = SymbolTable::new();
        let a = Scalar::atom(t.declare("a", None).unwrap());
        let b = Scalar::atom(t.declare_reciprocal("b", "a").unwrap());
        // a*x - z = 0, x real
        let mut sys = MixedSystem::new(1, 1);
        sys.push(vec![a.clone()], vec![s(-1)], s(0));
        let sol = solve_mixed(&sys).unwrap().unwrap();
        assert_eq!(sol.real_int.get(0, 0), &b);
        check(&sys, &sol, &[], &[int(3)]);
    }

    #[test]
    fn inconsistent() {
        let mut sys = MixedSystem::new(0, 1);
        sys.push(vec![], vec![s(2)], s(1));
        assert!(solve_mixed(&sys).unwrap().is_none());
        let mut sys = MixedSystem::new(1, 0);
        sys.push(vec![s(1)], vec![], s(1));
        sys.push(vec![s(2)], vec![], s(3));
        assert!(solve_mixed(&sys).unwrap().is_none());
    }
}
