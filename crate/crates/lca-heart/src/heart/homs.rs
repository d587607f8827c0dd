//! Linear systems whose unknowns are the entries of a morphism.
//!
//! An unknown morphism `U: G -> H` contributes one unknown per entry that is
//! not a structural zero: real unknowns for entries that may take any real
//! value, integer unknowns for the others. Equations `L ∘ U ∘ R = B` are
//! imposed entrywise, with an integer slack wherever the entry of the
//! composite is only defined modulo 1 or modulo a finite order.

use num_traits::One;

use super::HeartObject;
use crate::elca::{solve_mixed, ElcaGroup, ElcaMorphism, Kind, MixedSolution, MixedSystem};
use crate::error::{Error, Result};
use crate::linalg::SMat;
use crate::scalars::{rat_int, Int, Rat, Scalar};

#[derive(Clone, Debug)]
pub(crate) struct Var {
    row: usize,
    col: usize,
    real: bool,
    /// The entry is `scale` times the unknown.
    scale: Rat,
}

#[derive(Clone, Debug)]
pub(crate) struct Unknown {
    source: ElcaGroup,
    target: ElcaGroup,
    vars: Vec<Var>,
}

impl Unknown {
    /// All entries of a morphism `source -> target`; with `discrete_only`
    /// only entries between `Z` and `F` coordinates are unknown.
    pub(crate) fn new(source: &ElcaGroup, target: &ElcaGroup, discrete_only: bool) -> Self {
        let mut vars = Vec::new();
        for i in 0..target.dim() {
            for j in 0..source.dim() {
                let (real, scale) = match (target.kind(i), source.kind(j)) {
                    (Kind::R, Kind::R) | (Kind::R, Kind::Z) | (Kind::T, Kind::R) | (Kind::T, Kind::Z) => {
                        (true, Rat::one())
                    }
                    (Kind::Z, Kind::Z) | (Kind::T, Kind::T) | (Kind::F, Kind::Z) => (false, Rat::one()),
                    (Kind::T, Kind::F) => (false, Rat::one() / rat_int(source.order(j).unwrap())),
                    (Kind::F, Kind::F) => {
                        let e = target.order(i).unwrap();
                        let d = source.order(j).unwrap();
                        (false, rat_int(&(e / num_integer::gcd(e.clone(), d.clone()))))
                    }
                    _ => continue,
                };
                let discrete = matches!(target.kind(i), Kind::Z | Kind::F) && matches!(source.kind(j), Kind::Z | Kind::F);
                if discrete_only && !discrete {
                    continue;
                }
                vars.push(Var { row: i, col: j, real, scale });
            }
        }
        Unknown { source: source.clone(), target: target.clone(), vars }
    }

    fn n_real(&self) -> usize {
        self.vars.iter().filter(|v| v.real).count()
    }

    fn n_int(&self) -> usize {
        self.vars.len() - self.n_real()
    }

    /// Index of each variable among the real or among the integer unknowns.
    fn slots(&self) -> Vec<usize> {
        let (mut r, mut i) = (0, 0);
        self.vars
            .iter()
            .map(|v| {
                let s = if v.real { &mut r } else { &mut i };
                *s += 1;
                *s - 1
            })
            .collect()
    }

    /// The raw entry matrix for given unknown values.
    fn matrix(&self, reals: &[Scalar], ints: &[Int]) -> SMat {
        let slots = self.slots();
        let mut m = SMat::zeros(self.target.dim(), self.source.dim());
        for (v, s) in self.vars.iter().zip(slots) {
            let val = if v.real { reals[s].scale(&v.scale) } else { Scalar::from_rat(rat_int(&ints[s]) * &v.scale) };
            m.set(v.row, v.col, val);
        }
        m
    }
}

/// Whether an entry from a coordinate of kind `src` to coordinate `i` of
/// `tgt` is only defined modulo something, and modulo what.
fn modulus(tgt: &ElcaGroup, i: usize, src: Kind) -> Option<Rat> {
    if !matches!(src, Kind::Z | Kind::F) {
        return None;
    }
    match tgt.kind(i) {
        Kind::T => Some(Rat::one()),
        Kind::F => Some(rat_int(tgt.order(i).unwrap())),
        _ => None,
    }
}

struct Equation {
    real: Vec<Scalar>,
    int: Vec<Scalar>,
    modulus: Option<Rat>,
    rhs: Scalar,
}

/// Collects equations in the unknowns of a single morphism.
pub(crate) struct Builder {
    unknown: Unknown,
    equations: Vec<Equation>,
}

impl Builder {
    pub(crate) fn new(unknown: Unknown) -> Self {
        Builder { unknown, equations: Vec::new() }
    }

    /// Imposes `left ∘ U ∘ right = rhs`; `None` stands for an identity.
    pub(crate) fn impose(
        &mut self,
        left: Option<&ElcaMorphism>,
        right: Option<&ElcaMorphism>,
        rhs: &ElcaMorphism,
    ) -> Result<()> {
        let u = &self.unknown;
        let rows = left.map_or(u.target.dim(), |l| l.target().dim());
        let cols = right.map_or(u.source.dim(), |r| r.source().dim());
        if rhs.target().dim() != rows || rhs.source().dim() != cols {
            return Err(Error::Shape("equation sides have different shapes".into()));
        }
        let l_entry = |i: usize, a: usize| match left {
            Some(l) => l.entry(i, a).clone(),
            None if i == a => Scalar::one(),
            None => Scalar::zero(),
        };
        let r_entry = |b: usize, j: usize| match right {
            Some(r) => r.entry(b, j).clone(),
            None if b == j => Scalar::one(),
            None => Scalar::zero(),
        };
        let slots = u.slots();
        let (nr, ni) = (u.n_real(), u.n_int());
        for i in 0..rows {
            for j in 0..cols {
                let mut real = vec![Scalar::zero(); nr];
                let mut int = vec![Scalar::zero(); ni];
                for (v, &s) in u.vars.iter().zip(&slots) {
                    let a = l_entry(i, v.row);
                    let b = r_entry(v.col, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    let c = a.mul(&b).map_err(|_| unrepresentable())?.scale(&v.scale);
                    let slot = if v.real { &mut real[s] } else { &mut int[s] };
                    *slot = slot.add(&c);
                }
                let modulus = modulus(rhs.target(), i, rhs.source().kind(j));
                self.equations.push(Equation { real, int, modulus, rhs: rhs.entry(i, j).clone() });
            }
        }
        Ok(())
    }

    pub(crate) fn solve(&self) -> Result<Option<(MixedSolution, usize)>> {
        let u = &self.unknown;
        let slacks: Vec<usize> = (0..self.equations.len()).filter(|&k| self.equations[k].modulus.is_some()).collect();
        let n_int = u.n_int() + slacks.len();
        let mut sys = MixedSystem::new(u.n_real(), n_int);
        for (k, eq) in self.equations.iter().enumerate() {
            let mut int = eq.int.clone();
            int.resize(n_int, Scalar::zero());
            if let Some(m) = &eq.modulus {
                let pos = u.n_int() + slacks.iter().position(|&s| s == k).unwrap();
                int[pos] = Scalar::from_rat(-m.clone());
            }
            sys.push(eq.real.clone(), int, eq.rhs.clone());
        }
        Ok(solve_mixed(&sys)?.map(|s| (s, u.n_int())))
    }

    pub(crate) fn unknown(&self) -> &Unknown {
        &self.unknown
    }

    /// The solution with all free parameters set to zero.
    pub(crate) fn particular(&self) -> Result<Option<ElcaMorphism>> {
        let Some((sol, n_vars)) = self.solve()? else {
            return Ok(None);
        };
        let u = &self.unknown;
        let ints = sol.ints(&vec![Int::from(0); sol.int_lattice.cols()]);
        let reals = sol.reals(&vec![Scalar::zero(); sol.free_reals.len()], &ints)?;
        ElcaMorphism::new(u.source.clone(), u.target.clone(), u.matrix(&reals, &ints[..n_vars])).map(Some)
    }
}

fn unrepresentable() -> Error {
    Error::Unrepresentable("the equations multiply two independent symbols".into())
}

/// All levelwise morphisms from an object to `[0 -> y]`, that is all lower
/// maps `g` with `g ∘ x = 0`, as an affine family.
#[derive(Clone, Debug)]
pub struct HomSolutions {
    /// One solution.
    pub particular: ElcaMorphism,
    /// Raw entry matrices of the real directions; any real multiple may be
    /// added.
    pub real_directions: Vec<SMat>,
    /// Integer directions.
    pub lattice_directions: Vec<ElcaMorphism>,
}

impl HomSolutions {
    /// True when the zero morphism is the only solution.
    pub fn is_trivial(&self) -> bool {
        self.particular.is_zero()
            && self.real_directions.iter().all(SMat::is_zero)
            && self.lattice_directions.iter().all(ElcaMorphism::is_zero)
    }
}

pub fn torsion_free_homs(o: &HeartObject, y: &ElcaGroup) -> Result<HomSolutions> {
    let mut b = Builder::new(Unknown::new(o.lower(), y, false));
    b.impose(None, Some(o.differential()), &ElcaMorphism::zero(o.upper(), y))?;
    let (sol, n_vars) = b.solve()?.ok_or_else(|| Error::Internal("the zero morphism is always a solution".into()))?;
    let u = b.unknown();
    let morphism = |reals: &[Scalar], ints: &[Int]| ElcaMorphism::new(o.lower().clone(), y.clone(), u.matrix(reals, &ints[..n_vars]));
    let particular = b.particular()?.expect("solvable system");
    let mut real_directions = Vec::new();
    for k in 0..sol.free_reals.len() {
        let reals = sol.real_free.col(k);
        real_directions.push(u.matrix(&reals, &vec![Int::from(0); n_vars]));
    }
    let mut lattice_directions = Vec::new();
    for k in 0..sol.int_lattice.cols() {
        let ints = sol.int_lattice.col(k);
        let reals: Vec<Scalar> = (0..sol.real_int.rows())
            .map(|i| {
                (0..ints.len()).fold(Scalar::zero(), |acc, l| acc.add(&sol.real_int.get(i, l).scale_int(&ints[l])))
            })
            .collect();
        lattice_directions.push(morphism(&reals, &ints)?);
    }
    Ok(HomSolutions { particular, real_directions, lattice_directions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{int, SymbolTable};

    #[test]
    fn ghost_has_no_maps_to_classical_objects() {
        let mut t = SymbolTable::new();
        let a = Scalar::atom(t.declare("a", Some(std::f64::consts::SQRT_2)).unwrap());
        let o = HeartObject::new(
            ElcaMorphism::from_rows(ElcaGroup::lattice(1), ElcaGroup::torus(1), vec![vec![a]]).unwrap(),
        )
        .unwrap();
        for y in [ElcaGroup::torus(1), ElcaGroup::reals(1), ElcaGroup::with_orders(1, 1, 1, &[int(6)])] {
            let h = torsion_free_homs(&o, &y).unwrap();
            assert!(h.is_trivial(), "{y}");
        }
    }

    #[test]
    fn classical_object_has_maps() {
        let o = HeartObject::classical(&ElcaGroup::torus(1));
        let h = torsion_free_homs(&o, &ElcaGroup::torus(1)).unwrap();
        assert!(!h.is_trivial());
        let o = HeartObject::classical(&ElcaGroup::finite(&[int(4)]));
        let h = torsion_free_homs(&o, &ElcaGroup::torus(1)).unwrap();
        assert_eq!(h.lattice_directions.len(), 1);
        assert_eq!(h.lattice_directions[0].entry(0, 0).as_rational().map(|q| q.denom().clone()), Some(int(4)));
    }
}
