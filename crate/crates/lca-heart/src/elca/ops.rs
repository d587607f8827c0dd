//! Kernels, cokernels, closures, lifts and the predicates built on them.

use num_traits::{One, Signed, Zero};

use super::solve::{solve_mixed, MixedSolution, MixedSystem};
use super::{copairing, direct_sum, pairing, ElcaGroup, ElcaMorphism, Kind};
use crate::error::{Error, Result};
use crate::fgab::{fg_kernel, integer_solve, smith_normal_form, FgAbGroup, FgAbMorphism};
use crate::linalg::{det_q, rank_q, IMat, QMat, SMat};
use crate::scalars::{rat_int, Int, Rat, Scalar};

/// Unknowns used to describe preimages under `f`: real lifts of the `R` and
/// `T` coordinates of the source, integer values of its `Z` and `F`
/// coordinates, and integer slack for the `T` and `F` coordinates of the
/// target.
struct Preimage<'a> {
    f: &'a ElcaMorphism,
}

impl<'a> Preimage<'a> {
    fn n_real(&self) -> usize {
        let g = self.f.source();
        g.vector_rank + g.torus_rank
    }

    fn n_int(&self) -> usize {
        let (g, h) = (self.f.source(), self.f.target());
        g.lattice_rank + g.torsion.len() + h.torus_rank + h.torsion.len()
    }

    /// Index of source coordinate `j` among the real or integer unknowns.
    fn slot(&self, j: usize) -> (bool, usize) {
        let g = self.f.source();
        match g.kind(j) {
            Kind::R => (true, j),
            Kind::T => (true, g.vector_rank + (j - g.t_range().start)),
            Kind::Z => (false, j - g.z_range().start),
            Kind::F => (false, g.lattice_rank + (j - g.f_range().start)),
        }
    }

    fn slack(&self, i: usize) -> Option<usize> {
        let (g, h) = (self.f.source(), self.f.target());
        let base = g.lattice_rank + g.torsion.len();
        match h.kind(i) {
            Kind::T => Some(base + (i - h.t_range().start)),
            Kind::F => Some(base + h.torus_rank + (i - h.f_range().start)),
            _ => None,
        }
    }

    /// The system `f(x) = rhs` (with `T` and `F` coordinates lifted).
    fn system(&self, rhs: &[Scalar]) -> MixedSystem {
        let (g, h) = (self.f.source(), self.f.target());
        let mut sys = MixedSystem::new(self.n_real(), self.n_int());
        for i in 0..h.dim() {
            let mut real = vec![Scalar::zero(); self.n_real()];
            let mut int = vec![Scalar::zero(); self.n_int()];
            for j in 0..g.dim() {
                let (is_real, k) = self.slot(j);
                if is_real {
                    real[k] = self.f.entry(i, j).clone();
                } else {
                    int[k] = self.f.entry(i, j).clone();
                }
            }
            if let Some(k) = self.slack(i) {
                int[k] = match h.order(i) {
                    Some(e) => Scalar::from_int(&-e.clone()),
                    None => Scalar::from_i64(-1),
                };
            }
            sys.push(real, int, rhs[i].clone());
        }
        sys
    }

    /// Source element described by real and integer unknowns.
    fn element(&self, y: &[Scalar], u: &[Int]) -> Vec<Scalar> {
        let g = self.f.source();
        (0..g.dim())
            .map(|j| match self.slot(j) {
                (true, k) => y[k].clone(),
                (false, k) => Scalar::from_int(&u[k]),
            })
            .collect()
    }
}

fn internal(msg: &str) -> Error {
    Error::Internal(msg.to_string())
}

fn to_int(s: &Scalar, what: &str) -> Result<Int> {
    s.as_integer().ok_or_else(|| internal(what))
}

/// Builds a morphism column by column, turning entry failures into
/// `Unrepresentable`.
fn from_columns(source: &ElcaGroup, target: &ElcaGroup, cols: Vec<Vec<Scalar>>) -> Result<ElcaMorphism> {
    let m = SMat::from_cols(cols, target.dim());
    ElcaMorphism::new(source.clone(), target.clone(), m).map_err(|e| match e {
        Error::Entry(msg) => Error::Unrepresentable(msg),
        other => other,
    })
}

/// The kernel of `f` as a closed subgroup, given by its embedding.
pub fn kernel(f: &ElcaMorphism) -> Result<ElcaMorphism> {
    let (g, h) = (f.source(), f.target());
    let pre = Preimage { f };
    let sys = pre.system(&vec![Scalar::zero(); h.dim()]);
    let sol = solve_mixed(&sys)?.ok_or_else(|| internal("homogeneous system without solution"))?;
    let p = sol.free_reals.len();
    let l = sol.int_lattice.cols();

    // Trivial lifts: shifting a T coordinate by 1 or an F coordinate by its order.
    let mut lifts: Vec<(Vec<Scalar>, Vec<Int>)> = Vec::new();
    for j in g.t_range().chain(g.f_range()) {
        let mult = g.order(j).cloned().unwrap_or_else(Int::one);
        let mut y = vec![Scalar::zero(); pre.n_real()];
        let mut u = vec![Int::zero(); pre.n_int()];
        match pre.slot(j) {
            (true, k) => y[k] = Scalar::one(),
            (false, k) => u[k] = mult.clone(),
        }
        for i in h.t_range().chain(h.f_range()) {
            let v = f.entry(i, j).scale_int(&mult);
            let v = match h.order(i) {
                Some(e) => v.scale(&(Rat::one() / rat_int(e))),
                None => v,
            };
            u[pre.slack(i).unwrap()] = to_int(&v, "trivial lift slack is not integral")?;
        }
        lifts.push((y, u));
    }
    let m = lifts.len();
    let mut vpart = IMat::zeros(p, m);
    let mut zpart = IMat::zeros(l, m);
    for (c, (y, u)) in lifts.iter().enumerate() {
        for (k, &fr) in sol.free_reals.iter().enumerate() {
            vpart.set(k, c, to_int(&y[fr], "trivial lift has non-integral real part")?);
        }
        let (lam, rest) = integer_solve(&sol.int_lattice, u).ok_or_else(|| internal("trivial lift outside the solution lattice"))?;
        if rest.cols() != 0 {
            return Err(internal("solution lattice basis is not independent"));
        }
        for (k, x) in lam.into_iter().enumerate() {
            zpart.set(k, c, x);
        }
    }

    let snf = smith_normal_form(&zpart);
    let r = snf.rank();
    let diag = snf.diagonal();
    let vp = vpart.mul(&snf.v);
    let torus_cols: Vec<usize> = (r..m).collect();
    let s = torus_cols.len();
    // Complete the torus lattice basis to a basis of R^p.
    let mut basis: Vec<Vec<Rat>> = torus_cols.iter().map(|&c| vp.col(c).iter().map(rat_int).collect()).collect();
    let mut complement = Vec::new();
    for k in 0..p {
        let mut e = vec![Rat::zero(); p];
        e[k] = Rat::one();
        let mut trial = basis.clone();
        trial.push(e.clone());
        if rank_q(&QMat::from_cols(trial.clone(), p)) == trial.len() {
            basis = trial;
            complement.push(e);
        }
    }
    if basis.len() != p {
        return Err(internal("failed to complete the torus lattice"));
    }

    let torsion_idx: Vec<usize> = (0..r).filter(|&i| !diag[i].is_one()).collect();
    let kgroup = ElcaGroup {
        vector_rank: p - s,
        lattice_rank: l - r,
        torus_rank: s,
        torsion: torsion_idx.iter().map(|&i| diag[i].clone()).collect(),
    };

    let element = |v: &[Rat], lam_prime: Option<usize>| -> Result<Vec<Scalar>> {
        let lam: Vec<Int> = match lam_prime {
            Some(i) => snf.u_inv.col(i),
            None => vec![Int::zero(); l],
        };
        let u = sol.ints(&lam);
        let vs: Vec<Scalar> = v.iter().map(|q| Scalar::from_rat(q.clone())).collect();
        let y = sol.reals(&vs, &u)?;
        Ok(pre.element(&y, &u))
    };

    let zero_v = vec![Rat::zero(); p];
    let mut cols = Vec::new();
    for v in &complement {
        cols.push(element(v, None)?);
    }
    for i in r..l {
        // Sign convention: the first nonzero coordinate is positive.
        let mut col = element(&zero_v, Some(i))?;
        let lead = col.iter().find(|x| !x.is_zero()).and_then(|x| x.terms().next().map(|(_, q)| q.is_negative()));
        if lead == Some(true) {
            col = col.iter().map(Scalar::neg).collect();
        }
        cols.push(col);
    }
    for b in basis.iter().take(s) {
        cols.push(element(b, None)?);
    }
    for &i in &torsion_idx {
        let v: Vec<Rat> = vp.col(i).iter().map(|x| rat_int(x) / rat_int(&diag[i])).collect();
        cols.push(element(&v, Some(i))?);
    }
    let iota = from_columns(&kgroup, g, cols)?;
    let check = f.compose(&iota).map_err(|_| Error::Unrepresentable("kernel check needs a symbol product".into()))?;
    if !check.is_zero() {
        return Err(internal("kernel embedding does not compose to zero"));
    }
    Ok(iota)
}

/// `Y / closure(f(X))` with its projection, computed as the dual of the
/// kernel of the dual.
pub fn cokernel(f: &ElcaMorphism) -> Result<ElcaMorphism> {
    Ok(kernel(&f.dual())?.dual())
}

/// The closure of the image of `f` with its embedding into the target.
pub fn closure_of_image(f: &ElcaMorphism) -> Result<ElcaMorphism> {
    let annihilator = kernel(&f.dual())?;
    kernel(&annihilator.dual())
}

/// `X / ker f` with its projection.
pub fn coimage(f: &ElcaMorphism) -> Result<ElcaMorphism> {
    cokernel(&kernel(f)?)
}

/// Preimage of `h` under `f`, if one exists.
pub fn preimage(f: &ElcaMorphism, h: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    let pre = Preimage { f };
    let sol: Option<MixedSolution> = solve_mixed(&pre.system(h))?;
    let Some(sol) = sol else {
        return Ok(None);
    };
    let u = sol.int_particular.clone();
    let v = vec![Scalar::zero(); sol.free_reals.len()];
    let y = sol.reals(&v, &u)?;
    Ok(Some(pre.element(&y, &u)))
}

/// `g` with `e ∘ g = f`, for `e` injective.
pub fn lift(f: &ElcaMorphism, e: &ElcaMorphism) -> Result<ElcaMorphism> {
    if f.target() != e.target() {
        return Err(Error::Shape("lift needs a common target".into()));
    }
    let (a, k, h) = (f.source(), e.source(), e.target());
    let no_lift = |j: usize| Error::NoLift(format!("generator {j} of {a} has no preimage in {k}"));
    let mut cols = Vec::new();
    for j in 0..a.dim() {
        let col = f.column(j);
        match a.kind(j) {
            Kind::Z | Kind::F => cols.push(preimage(e, &col)?.ok_or_else(|| no_lift(j))?),
            Kind::R => {
                // Velocity of the one-parameter subgroup.
                let nr = k.vector_rank + k.torus_rank;
                let mut sys = MixedSystem::new(nr, 0);
                for i in h.r_range().chain(h.t_range()) {
                    let mut real = vec![Scalar::zero(); nr];
                    for (slot, jk) in k.r_range().chain(k.t_range()).enumerate() {
                        real[slot] = e.entry(i, jk).clone();
                    }
                    sys.push(real, vec![], col[i].clone());
                }
                let sol = solve_mixed(&sys)?.ok_or_else(|| no_lift(j))?;
                let v = vec![Scalar::zero(); sol.free_reals.len()];
                let y = sol.reals(&v, &[])?;
                let mut out = vec![Scalar::zero(); k.dim()];
                for (slot, jk) in k.r_range().chain(k.t_range()).enumerate() {
                    out[jk] = y[slot].clone();
                }
                cols.push(out);
            }
            Kind::T => {
                let tt = IMat::from_fn(h.torus_rank, k.torus_rank, |i, c| {
                    e.entry(h.t_range().start + i, k.t_range().start + c).as_integer().unwrap()
                });
                let rhs: Vec<Int> = h.t_range().map(|i| col[i].as_integer().unwrap()).collect();
                let (tau, _) = integer_solve(&tt, &rhs).ok_or_else(|| no_lift(j))?;
                let mut out = vec![Scalar::zero(); k.dim()];
                for (c, x) in tau.iter().enumerate() {
                    out[k.t_range().start + c] = Scalar::from_int(x);
                }
                cols.push(out);
            }
        }
    }
    let g = from_columns(a, k, cols).map_err(|err| match err {
        Error::Unrepresentable(m) => Error::NoLift(m),
        other => other,
    })?;
    if e.compose(&g)? != *f {
        return Err(Error::NoLift("lifted map does not reproduce the original".into()));
    }
    Ok(g)
}

/// `h` with `h ∘ p = f`, for `p` an admissible epic.
pub fn factor(f: &ElcaMorphism, p: &ElcaMorphism) -> Result<ElcaMorphism> {
    if f.source() != p.source() {
        return Err(Error::Shape("factorization needs a common source".into()));
    }
    Ok(lift(&f.dual(), &p.dual())?.dual())
}

fn block_int(f: &ElcaMorphism, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> IMat {
    let (r0, c0) = (rows.start, cols.start);
    IMat::from_fn(rows.len(), cols.len(), |i, j| f.entry(r0 + i, c0 + j).as_integer().unwrap())
}

/// True iff `f` is an isomorphism of topological groups.
pub fn is_iso(f: &ElcaMorphism) -> bool {
    let (g, h) = (f.source(), f.target());
    if g != h {
        return false;
    }
    let rr = QMat::from_fn(g.vector_rank, g.vector_rank, |i, j| f.entry(i, j).as_rational().unwrap());
    if det_q(&rr).is_zero() {
        return false;
    }
    for (rows, cols) in [(h.z_range(), g.z_range()), (h.t_range(), g.t_range())] {
        let m = block_int(f, rows, cols);
        if !crate::linalg::det_int(&m).abs().is_one() {
            return false;
        }
    }
    let fin = FgAbGroup { free_rank: 0, invariant_factors: g.torsion.clone() };
    let ff = block_int(f, h.f_range(), g.f_range());
    match FgAbMorphism::new(fin.clone(), fin, ff) {
        Ok(m) => fg_kernel(&m).0.is_trivial(),
        Err(_) => false,
    }
}

/// Inverse of an isomorphism.
pub fn inverse(f: &ElcaMorphism) -> Result<ElcaMorphism> {
    if !is_iso(f) {
        return Err(Error::Precondition("morphism is not an isomorphism".into()));
    }
    lift(&ElcaMorphism::identity(f.target()), f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MorphismClassification {
    pub monic: bool,
    pub epic: bool,
    pub admissible: bool,
    pub admissible_monic: bool,
    pub admissible_epic: bool,
}

/// The factorization `f = image ∘ comparison ∘ coimage`.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub coimage: ElcaMorphism,
    pub comparison: ElcaMorphism,
    pub image: ElcaMorphism,
}

pub fn canonical_factorization(f: &ElcaMorphism) -> Result<Factorization> {
    let image = closure_of_image(f)?;
    let coim = coimage(f)?;
    let onto_image = lift(f, &image)?;
    let comparison = factor(&onto_image, &coim)?;
    Ok(Factorization { coimage: coim, comparison, image })
}

pub fn classify_morphism(f: &ElcaMorphism) -> Result<MorphismClassification> {
    let monic = kernel(f)?.source().is_trivial();
    let epic = cokernel(f)?.target().is_trivial();
    let fact = canonical_factorization(f)?;
    let admissible = is_iso(&fact.comparison);
    Ok(MorphismClassification {
        monic,
        epic,
        admissible,
        admissible_monic: admissible && monic,
        admissible_epic: admissible && epic,
    })
}

/// A pullback `P` with its maps to the two factors.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub to_first: ElcaMorphism,
    pub to_second: ElcaMorphism,
}

impl Pullback {
    pub fn group(&self) -> &ElcaGroup {
        self.to_first.source()
    }
}

pub fn pullback(f: &ElcaMorphism, g: &ElcaMorphism) -> Result<Pullback> {
    if f.target() != g.target() {
        return Err(Error::Shape("pullback needs a common target".into()));
    }
    let (ds, diff) = copairing(&[f.clone(), g.neg()])?;
    let iota = kernel(&diff)?;
    Ok(Pullback { to_first: ds.projections[0].compose(&iota)?, to_second: ds.projections[1].compose(&iota)? })
}

/// A pushout with the maps from the two factors.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub from_first: ElcaMorphism,
    pub from_second: ElcaMorphism,
}

pub fn pushout(f: &ElcaMorphism, g: &ElcaMorphism) -> Result<Pushout> {
    if f.source() != g.source() {
        return Err(Error::Shape("pushout needs a common source".into()));
    }
    let (ds, diff) = pairing(&[f.clone(), g.neg()])?;
    let q = cokernel(&diff)?;
    Ok(Pushout { from_first: q.compose(&ds.injections[0])?, from_second: q.compose(&ds.injections[1])? })
}

/// A commutative square
///
/// ```text
///   A --top--> B
///   |          |
///  left      right
///   v          v
///   C -bottom> D
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareData {
    pub top: ElcaMorphism,
    pub bottom: ElcaMorphism,
    pub left: ElcaMorphism,
    pub right: ElcaMorphism,
}

impl SquareData {
    pub fn new(top: ElcaMorphism, bottom: ElcaMorphism, left: ElcaMorphism, right: ElcaMorphism) -> Result<Self> {
        let sq = SquareData { top, bottom, left, right };
        sq.check_shape()?;
        Ok(sq)
    }

    fn check_shape(&self) -> Result<()> {
        let ok = self.top.source() == self.left.source()
            && self.top.target() == self.right.source()
            && self.left.target() == self.bottom.source()
            && self.right.target() == self.bottom.target();
        if ok {
            Ok(())
        } else {
            Err(Error::Shape("square maps do not fit together".into()))
        }
    }

    pub fn commutes(&self) -> Result<bool> {
        self.check_shape()?;
        Ok(self.bottom.compose(&self.left)? == self.right.compose(&self.top)?)
    }

    /// The Pontryagin dual square (rows become columns).
    pub fn dual(&self) -> SquareData {
        SquareData {
            top: self.right.dual(),
            left: self.bottom.dual(),
            right: self.top.dual(),
            bottom: self.left.dual(),
        }
    }
}

fn is_pullback_square(sq: &SquareData) -> Result<bool> {
    let (ds, diff) = copairing(&[sq.right.clone(), sq.bottom.neg()])?;
    let iota = kernel(&diff)?;
    let (pds, into_sum) = pairing(&[sq.top.clone(), sq.left.clone()])?;
    if pds.group != ds.group {
        return Err(internal("direct sums disagree"));
    }
    let comparison = lift(&into_sum, &iota)?;
    Ok(is_iso(&comparison))
}

pub fn is_bicartesian(sq: &SquareData) -> Result<bool> {
    if !sq.commutes()? {
        return Err(Error::NonCommuting);
    }
    Ok(is_pullback_square(sq)? && is_pullback_square(&sq.dual())?)
}

/// Direct sum of groups, exposed for callers that only need the group.
pub fn sum_group(groups: &[ElcaGroup]) -> ElcaGroup {
    direct_sum(groups).group
}

/// Inclusion `g ⊆ g` of the listed coordinates as a subgroup: rows select
/// coordinates of the ambient group.
pub fn coordinate_inclusion(sub: &ElcaGroup, ambient: &ElcaGroup, coords: &[usize]) -> Result<ElcaMorphism> {
    let mut m = SMat::zeros(ambient.dim(), sub.dim());
    for (j, &i) in coords.iter().enumerate() {
        m.set(i, j, Scalar::one());
    }
    ElcaMorphism::new(sub.clone(), ambient.clone(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elca::int_rows;
    use crate::scalars::{int, rat, SymbolTable};

    fn sym() -> (SymbolTable, Scalar, Scalar) {
        let mut t = SymbolTable::new();
        let a = Scalar::atom(t.declare("a", Some(std::f64::consts::SQRT_2)).unwrap());
        let b = Scalar::atom(t.declare("b", Some(std::f64::consts::PI - 3.0)).unwrap());
        (t, a, b)
    }

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_rat(rat(n, d))
    }

    #[test]
    fn kernel_of_rational_rotation() {
        let f = ElcaMorphism::from_rows(ElcaGroup::lattice(1), ElcaGroup::torus(1), vec![vec![q(2, 5)]]).unwrap();
        let k = kernel(&f).unwrap();
        assert_eq!(k.source(), &ElcaGroup::lattice(1));
        assert_eq!(k.entry(0, 0), &Scalar::from_i64(5));
    }

    #[test]
    fn kernel_of_irrational_rotation_is_zero() {
        let (_, a, _) = sym();
        let f = ElcaMorphism::from_rows(ElcaGroup::lattice(1), ElcaGroup::torus(1), vec![vec![a]]).unwrap();
        assert!(kernel(&f).unwrap().source().is_trivial());
    }

    #[test]
    fn kernel_of_mixed_circle_map() {
        let g = ElcaGroup::new(1, 1, 0, vec![]).unwrap();
        let f = ElcaMorphism::from_rows(g, ElcaGroup::torus(1), vec![vec![q(1, 2), q(1, 3)]]).unwrap();
        let k = kernel(&f).unwrap();
        assert_eq!(k.source(), &ElcaGroup::lattice(2));
    }

    #[test]
    fn closures() {
        let (_, a, _) = sym();
        let f = ElcaMorphism::from_rows(ElcaGroup::lattice(1), ElcaGroup::torus(1), vec![vec![a.clone()]]).unwrap();
        assert_eq!(closure_of_image(&f).unwrap().source(), &ElcaGroup::torus(1));
        let f = ElcaMorphism::from_rows(ElcaGroup::lattice(1), ElcaGroup::torus(1), vec![vec![q(1, 3)]]).unwrap();
        assert_eq!(closure_of_image(&f).unwrap().source(), &ElcaGroup::finite(&[int(3)]));
        let f = ElcaMorphism::from_rows(
            ElcaGroup::lattice(1),
            ElcaGroup::torus(2),
            vec![vec![a.clone()], vec![a.scale_int(&int(2)).add(&q(1, 2))]],
        )
        .unwrap();
        let c = closure_of_image(&f).unwrap();
        assert_eq!(c.source(), &ElcaGroup::new(0, 0, 1, vec![int(2)]).unwrap());
    }

    #[test]
    fn cokernels_of_line_examples() {
        let (_, a, _) = sym();
        let rt = ElcaGroup::new(1, 0, 1, vec![]).unwrap();
        let z = ElcaGroup::lattice(1);
        let f = ElcaMorphism::from_rows(z.clone(), rt.clone(), vec![vec![Scalar::one()], vec![a.clone()]]).unwrap();
        assert_eq!(cokernel(&f).unwrap().target(), &ElcaGroup::torus(2));
        let f = ElcaMorphism::from_rows(z.clone(), rt.clone(), vec![vec![Scalar::zero()], vec![a.clone()]]).unwrap();
        assert_eq!(cokernel(&f).unwrap().target(), &ElcaGroup::reals(1));
        let f = ElcaMorphism::from_rows(z, rt.clone(), vec![vec![Scalar::zero()], vec![q(1, 5)]]).unwrap();
        assert_eq!(cokernel(&f).unwrap().target(), &rt);
    }

    #[test]
    fn classifications() {
        let (_, a, _) = sym();
        let z = ElcaGroup::lattice(1);
        let f = ElcaMorphism::from_rows(z.clone(), ElcaGroup::torus(1), vec![vec![a.clone()]]).unwrap();
        let c = classify_morphism(&f).unwrap();
        assert!(c.monic && c.epic && !c.admissible);
        let rt = ElcaGroup::new(1, 0, 1, vec![]).unwrap();
        let f = ElcaMorphism::from_rows(z, rt, vec![vec![Scalar::one()], vec![a]]).unwrap();
        assert!(classify_morphism(&f).unwrap().admissible_monic);
        let t = ElcaGroup::torus(1);
        let f = ElcaMorphism::from_rows(t.clone(), t, int_rows(&[&[3]])).unwrap();
        let c = classify_morphism(&f).unwrap();
        assert!(c.admissible_epic && !c.monic);
        assert_eq!(kernel(&f).unwrap().source(), &ElcaGroup::finite(&[int(3)]));
    }

    #[test]
    fn pullbacks() {
        let z = ElcaGroup::lattice(1);
        let f = ElcaMorphism::from_rows(z.clone(), z.clone(), int_rows(&[&[5]])).unwrap();
        let g = ElcaMorphism::from_rows(z.clone(), z.clone(), int_rows(&[&[3]])).unwrap();
        let p = pullback(&f, &g).unwrap();
        assert_eq!(p.group(), &z);
        assert_eq!(f.compose(&p.to_first).unwrap(), g.compose(&p.to_second).unwrap());
        let pz = pullback(&ElcaMorphism::zero(&ElcaGroup::zero(), &z), &f).unwrap();
        assert!(pz.group().is_trivial());
    }

    #[test]
    fn bicartesian_examples() {
        let z = ElcaGroup::lattice(1);
        let id = ElcaMorphism::identity(&z);
        let two = ElcaMorphism::from_rows(z.clone(), z.clone(), int_rows(&[&[2]])).unwrap();
        let sq = SquareData::new(two.clone(), two.clone(), id.clone(), id.clone()).unwrap();
        assert!(is_bicartesian(&sq).unwrap());
        let sq = SquareData::new(two, id.clone(), id.clone(), id).unwrap();
        assert!(matches!(is_bicartesian(&sq), Err(Error::NonCommuting)));
    }

    #[test]
    fn lifts_and_inverses() {
        let g = ElcaGroup::new(1, 1, 1, vec![int(4)]).unwrap();
        let (_, a, _) = sym();
        let mut m = crate::elca::scalar_identity(4);
        m.set(0, 1, a.clone());
        m.set(2, 0, q(1, 2));
        m.set(2, 3, q(1, 4));
        m.set(3, 1, Scalar::from_i64(2));
        let f = ElcaMorphism::new(g.clone(), g.clone(), m).unwrap();
        assert!(is_iso(&f));
        let inv = inverse(&f).unwrap();
        assert_eq!(f.compose(&inv).unwrap(), ElcaMorphism::identity(&g));
        assert_eq!(inv.compose(&f).unwrap(), ElcaMorphism::identity(&g));
    }
}
