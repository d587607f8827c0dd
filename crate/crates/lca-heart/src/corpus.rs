//! Seeded generators for groups, morphisms and heart objects used by the
//! property suites and the acceptance run.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elca::{ElcaGroup, ElcaMorphism, Kind};
use crate::fgab::{FgAbGroup, FgAbMorphism};
use crate::linalg::{IMat, SMat};
use crate::scalars::{int, rat, Atom, Int, Scalar, SymbolTable};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Which entry kinds may carry symbolic values.
#[derive(Clone, Copy, Debug, Default)]
pub struct SymbolUse {
    pub lattice_to_circle: bool,
    pub lattice_to_line: bool,
    pub line_to_circle: bool,
}

/// A symbol table with `n` symbols whose shadows are cube roots of small
/// primes reduced mod 1, so that they are far from rationals with small
/// denominators.
pub fn symbol_table(n: usize) -> (SymbolTable, Vec<Atom>) {
    let mut t = SymbolTable::new();
    let primes = [2.0f64, 3.0, 5.0, 7.0, 11.0, 13.0];
    let mut atoms = Vec::new();
    for (i, p) in primes.iter().take(n).enumerate() {
        let name = format!("s{}", i + 1);
        atoms.push(t.declare(&name, Some(p.cbrt())).expect("fresh symbol"));
    }
    (t, atoms)
}

pub fn random_int_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64) -> IMat {
    IMat::from_fn(rows, cols, |_, _| int(rng.gen_range(-bound..=bound)))
}

pub fn random_orders(rng: &mut impl Rng, max_len: usize, choices: &[i64]) -> Vec<Int> {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| int(*choices.choose(rng).unwrap())).collect()
}

pub fn random_group(rng: &mut impl Rng, max_rank: usize, max_torsion: usize) -> ElcaGroup {
    let a = rng.gen_range(0..=max_rank);
    let b = rng.gen_range(0..=max_rank);
    let c = rng.gen_range(0..=max_rank);
    let orders = random_orders(rng, max_torsion, &[2, 3, 4, 6, 8, 9]);
    ElcaGroup::with_orders(a, b, c, &orders)
}

fn small_rational(rng: &mut impl Rng) -> Scalar {
    let n = rng.gen_range(-4..=4);
    let d = *[1, 1, 2, 3].choose(rng).unwrap();
    Scalar::from_rat(rat(n, d))
}

fn symbolic(rng: &mut impl Rng, atoms: &[Atom]) -> Scalar {
    let mut s = small_rational(rng);
    if let Some(a) = atoms.choose(rng) {
        let c = rng.gen_range(-2..=2);
        s = s.add(&Scalar::term(*a, rat(c, 1)));
    }
    s
}

/// A random valid morphism `g -> h`.
pub fn random_morphism(rng: &mut impl Rng, g: &ElcaGroup, h: &ElcaGroup, atoms: &[Atom], syms: SymbolUse) -> ElcaMorphism {
    let mut m = SMat::zeros(h.dim(), g.dim());
    for i in 0..h.dim() {
        for j in 0..g.dim() {
            if rng.gen_bool(0.35) {
                continue;
            }
            let v = match (h.kind(i), g.kind(j)) {
                (Kind::R, Kind::R) => small_rational(rng),
                (Kind::R, Kind::Z) if syms.lattice_to_line => symbolic(rng, atoms),
                (Kind::R, Kind::Z) => small_rational(rng),
                (Kind::T, Kind::R) if syms.line_to_circle => symbolic(rng, atoms),
                (Kind::T, Kind::R) => small_rational(rng),
                (Kind::T, Kind::Z) if syms.lattice_to_circle => symbolic(rng, atoms),
                (Kind::T, Kind::Z) => small_rational(rng),
                (Kind::Z, Kind::Z) | (Kind::T, Kind::T) => Scalar::from_i64(rng.gen_range(-3..=3)),
                (Kind::T, Kind::F) => {
                    let d = g.order(j).unwrap();
                    let d64: i64 = d.try_into().unwrap();
                    Scalar::from_rat(rat(rng.gen_range(0..d64), d64))
                }
                (Kind::F, Kind::Z) => {
                    let e: i64 = h.order(i).unwrap().try_into().unwrap();
                    Scalar::from_i64(rng.gen_range(0..e))
                }
                (Kind::F, Kind::F) => {
                    let e: i64 = h.order(i).unwrap().try_into().unwrap();
                    let d: i64 = g.order(j).unwrap().try_into().unwrap();
                    let step = e / num_integer::gcd(e, d);
                    Scalar::from_i64(step * rng.gen_range(0..e / step))
                }
                _ => Scalar::zero(),
            };
            m.set(i, j, v);
        }
    }
    ElcaMorphism::new(g.clone(), h.clone(), m).expect("generated entries are valid")
}

pub fn random_fg_group(rng: &mut impl Rng, max_free: usize, max_order: i64) -> FgAbGroup {
    let free = rng.gen_range(0..=max_free);
    let mut orders = Vec::new();
    let mut total = 1i64;
    for _ in 0..3 {
        let d = rng.gen_range(2..=12);
        if total * d > max_order {
            break;
        }
        if rng.gen_bool(0.7) {
            orders.push(int(d));
            total *= d;
        }
    }
    FgAbGroup::from_orders(free, &orders)
}

/// A random valid homomorphism between finitely generated groups.
pub fn random_fg_morphism(rng: &mut impl Rng, g: &FgAbGroup, h: &FgAbGroup) -> FgAbMorphism {
    let mut m = IMat::zeros(h.ngens(), g.ngens());
    for i in 0..h.ngens() {
        for j in 0..g.ngens() {
            let v = match (h.gen_order(i), g.gen_order(j)) {
                (None, None) => int(rng.gen_range(-4..=4)),
                (None, Some(_)) => int(0),
                (Some(e), None) => int(rng.gen_range(0..i64::try_from(e).unwrap())),
                (Some(e), Some(d)) => {
                    let e: i64 = e.try_into().unwrap();
                    let d: i64 = d.try_into().unwrap();
                    let step = e / num_integer::gcd(e, d);
                    int(step * rng.gen_range(0..e / step))
                }
            };
            m.set(i, j, v);
        }
    }
    FgAbMorphism::new(g.clone(), h.clone(), m).expect("generated fg morphism is valid")
}
