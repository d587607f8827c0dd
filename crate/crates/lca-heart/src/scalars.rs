//! Exact scalars: rational combinations of `1` and declared symbols.
//!
//! A declared symbol may also be registered as the reciprocal of an earlier
//! one; the only product of two symbolic atoms that is defined is the product
//! of a symbol with its reciprocal.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(n: i64) -> Int {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: &Int) -> Rat {
    BigRational::from_integer(n.clone())
}

/// Reduces a rational into `[0, 1)`.
pub fn frac(q: &Rat) -> Rat {
    q - q.floor()
}

/// One basis element of the scalar space: the unit, a symbol, or a symbol's
/// reciprocal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub id: u32,
    pub inverse: bool,
}

impl Atom {
    pub const ONE: Atom = Atom { id: 0, inverse: false };

    pub fn symbol(id: u32) -> Atom {
        Atom { id, inverse: false }
    }

    pub fn is_one(self) -> bool {
        self.id == 0
    }

    pub fn reciprocal(self) -> Atom {
        if self.is_one() {
            self
        } else {
            Atom { id: self.id, inverse: !self.inverse }
        }
    }

    fn mul(self, other: Atom) -> Option<Atom> {
        if self.is_one() {
            Some(other)
        } else if other.is_one() {
            Some(self)
        } else if self.id == other.id && self.inverse != other.inverse {
            Some(Atom::ONE)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
pub struct SymbolEntry {
    pub name: String,
    pub atom: Atom,
    pub shadow: Option<f64>,
}

/// Declared symbols. Index 0 of the atom space is the rational unit and never
/// appears here.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    entries: Vec<SymbolEntry>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[SymbolEntry] {
        &self.entries
    }

    fn check_name(&self, name: &str, shadow: Option<f64>) -> Result<()> {
        let valid = name.chars().next().is_some_and(|c| c.is_ascii_lowercase())
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(Error::Symbol(format!("invalid symbol name `{name}`")));
        }
        if self.lookup(name).is_some() {
            return Err(Error::Symbol(format!("symbol `{name}` already declared")));
        }
        if let Some(s) = shadow {
            if s == 0.0 || !s.is_finite() {
                return Err(Error::Symbol(format!("shadow of `{name}` must be finite and nonzero")));
            }
            if self.entries.iter().any(|e| e.shadow == Some(s)) {
                return Err(Error::Symbol(format!("shadow of `{name}` duplicates another symbol")));
            }
        }
        Ok(())
    }

    /// Declares a fresh symbol, assumed Q-linearly independent of `1` and of
    /// every earlier symbol.
    pub fn declare(&mut self, name: &str, shadow: Option<f64>) -> Result<Atom> {
        self.check_name(name, shadow)?;
        let id = self.entries.iter().map(|e| e.atom.id).max().unwrap_or(0) + 1;
        let atom = Atom::symbol(id);
        self.entries.push(SymbolEntry { name: name.to_string(), atom, shadow });
        Ok(atom)
    }

    /// Declares `name` as the reciprocal of the already declared `of`.
    pub fn declare_reciprocal(&mut self, name: &str, of: &str) -> Result<Atom> {
        let base = self
            .lookup(of)
            .ok_or_else(|| Error::Symbol(format!("unknown symbol `{of}`")))?;
        if base.inverse {
            return Err(Error::Symbol(format!("`{of}` is itself a reciprocal")));
        }
        if self.entries.iter().any(|e| e.atom == base.reciprocal()) {
            return Err(Error::Symbol(format!("reciprocal of `{of}` already declared")));
        }
        let shadow = self.shadow(base).map(|s| 1.0 / s);
        self.check_name(name, shadow)?;
        let atom = base.reciprocal();
        self.entries.push(SymbolEntry { name: name.to_string(), atom, shadow });
        Ok(atom)
    }

    pub fn lookup(&self, name: &str) -> Option<Atom> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.atom)
    }

    pub fn name(&self, atom: Atom) -> Option<&str> {
        self.entries.iter().find(|e| e.atom == atom).map(|e| e.name.as_str())
    }

    pub fn shadow(&self, atom: Atom) -> Option<f64> {
        if atom.is_one() {
            return Some(1.0);
        }
        self.entries.iter().find(|e| e.atom == atom).and_then(|e| e.shadow)
    }

    /// Name of the reciprocal partner if one was declared.
    pub fn reciprocal_of(&self, atom: Atom) -> Option<&str> {
        if atom.inverse {
            self.name(atom.reciprocal())
        } else {
            None
        }
    }
}

/// An exact real number `q0 + sum q_i * atom_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar {
    coeffs: BTreeMap<Atom, Rat>,
}

impl Scalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rat(Rat::one())
    }

    pub fn from_rat(q: Rat) -> Self {
        Self::term(Atom::ONE, q)
    }

    pub fn from_int(n: &Int) -> Self {
        Self::from_rat(rat_int(n))
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_rat(rat(n, 1))
    }

    pub fn term(atom: Atom, q: Rat) -> Self {
        let mut coeffs = BTreeMap::new();
        if !q.is_zero() {
            coeffs.insert(atom, q);
        }
        Scalar { coeffs }
    }

    pub fn atom(atom: Atom) -> Self {
        Self::term(atom, Rat::one())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.keys().all(|a| a.is_one())
    }

    pub fn is_integer(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_integer())
    }

    pub fn as_rational(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(self.rational_part())
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<Int> {
        self.as_rational().filter(|q| q.is_integer()).map(|q| q.to_integer())
    }

    pub fn rational_part(&self) -> Rat {
        self.coeff(Atom::ONE)
    }

    pub fn coeff(&self, atom: Atom) -> Rat {
        self.coeffs.get(&atom).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Atom, &Rat)> {
        self.coeffs.iter()
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.coeffs.keys().copied()
    }

    /// The symbolic part (everything but the rational coefficient).
    pub fn symbolic_part(&self) -> Scalar {
        let mut s = self.clone();
        s.coeffs.remove(&Atom::ONE);
        s
    }

    fn add_term(&mut self, atom: Atom, q: &Rat) {
        if q.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(atom).or_insert_with(Rat::zero);
        *entry += q;
        if entry.is_zero() {
            self.coeffs.remove(&atom);
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (a, q) in &other.coeffs {
            out.add_term(*a, q);
        }
        out
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (a, q) in &other.coeffs {
            out.add_term(*a, &-q);
        }
        out
    }

    pub fn neg(&self) -> Scalar {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, q: &Rat) -> Scalar {
        if q.is_zero() {
            return Scalar::zero();
        }
        Scalar { coeffs: self.coeffs.iter().map(|(a, c)| (*a, c * q)).collect() }
    }

    pub fn scale_int(&self, n: &Int) -> Scalar {
        self.scale(&rat_int(n))
    }

    /// Product of two scalars. Fails when two symbolic atoms that are not
    /// reciprocal partners would have to be multiplied.
    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        let mut out = Scalar::zero();
        for (a, p) in &self.coeffs {
            for (b, q) in &other.coeffs {
                let c = a.mul(*b).ok_or(Error::SymbolProduct)?;
                out.add_term(c, &(p * q));
            }
        }
        Ok(out)
    }

    /// `sum a_k * b_k`, expanded over monomials in the symbols so that
    /// products of symbols may cancel. Fails when a product survives.
    pub fn dot<'a>(pairs: impl IntoIterator<Item = (&'a Scalar, &'a Scalar)>) -> Result<Scalar> {
        let mut poly: BTreeMap<Vec<(u32, i32)>, Rat> = BTreeMap::new();
        for (x, y) in pairs {
            for (a, p) in &x.coeffs {
                for (b, q) in &y.coeffs {
                    let mut mono: Vec<(u32, i32)> = Vec::new();
                    for atom in [a, b] {
                        if atom.is_one() {
                            continue;
                        }
                        let e = if atom.inverse { -1 } else { 1 };
                        match mono.iter_mut().find(|(id, _)| *id == atom.id) {
                            Some(slot) => slot.1 += e,
                            None => mono.push((atom.id, e)),
                        }
                    }
                    mono.retain(|&(_, e)| e != 0);
                    mono.sort_unstable();
                    let c = poly.entry(mono).or_insert_with(Rat::zero);
                    *c += p * q;
                }
            }
        }
        let mut out = Scalar::zero();
        for (mono, q) in poly {
            match mono.as_slice() {
                _ if q.is_zero() => {}
                [] => out.add_term(Atom::ONE, &q),
                [(id, e)] if e.abs() == 1 => out.add_term(Atom { id: *id, inverse: *e < 0 }, &q),
                _ => return Err(Error::SymbolProduct),
            }
        }
        Ok(out)
    }

    /// `1 / self` when it is a single rational multiple of one atom.
    pub fn monomial_inverse(&self) -> Option<Scalar> {
        if self.coeffs.len() != 1 {
            return None;
        }
        let (a, q) = self.coeffs.iter().next()?;
        Some(Scalar::term(a.reciprocal(), q.recip()))
    }

    /// Canonical combination `sum q_i * s_i`.
    pub fn linear_combine(terms: &[(Rat, Scalar)]) -> Scalar {
        let mut out = Scalar::zero();
        for (q, s) in terms {
            for (a, c) in &s.coeffs {
                out.add_term(*a, &(q * c));
            }
        }
        out
    }

    /// Rational part reduced into `[0, 1)`; symbolic part unchanged.
    pub fn circle_reduce(&self) -> CircleScalar {
        CircleScalar::new(self.clone())
    }

    pub fn shadow_eval(&self, table: &SymbolTable) -> Result<f64> {
        let mut total = 0.0;
        for (a, q) in &self.coeffs {
            let s = table.shadow(*a).ok_or_else(|| {
                Error::MissingShadow(table.name(*a).unwrap_or("?").to_string())
            })?;
            total += rat_to_f64(q) * s;
        }
        Ok(total)
    }

    /// Least common denominator of all coefficients.
    pub fn denominator_lcm(&self) -> Int {
        self.coeffs.values().fold(Int::one(), |acc, q| acc.lcm(q.denom()))
    }

    pub fn render(&self, table: &SymbolTable) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        // Symbols first in declaration order, rational part last.
        let mut terms: Vec<(&Atom, &Rat)> = self.coeffs.iter().filter(|(a, _)| !a.is_one()).collect();
        terms.extend(self.coeffs.get_key_value(&Atom::ONE));
        for (i, (a, q)) in terms.into_iter().enumerate() {
            let neg = q.is_negative();
            let mag = q.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if a.is_one() {
                out.push_str(&render_rat(&mag));
            } else {
                let name = table.name(*a).map(str::to_string).unwrap_or_else(|| format!("s{}", a.id));
                if mag.is_one() {
                    out.push_str(&name);
                } else {
                    out.push_str(&format!("{}*{}", render_rat(&mag), name));
                }
            }
        }
        out
    }

    pub fn to_json(&self, table: &SymbolTable) -> Value {
        let mut coeffs = Map::new();
        for (a, q) in &self.coeffs {
            let key = if a.is_one() {
                "0".to_string()
            } else {
                table.name(*a).map(str::to_string).unwrap_or_else(|| format!("s{}", a.id))
            };
            coeffs.insert(key, Value::String(render_rat(q)));
        }
        json!({ "coeffs": coeffs })
    }

    pub fn from_json(v: &Value, table: &SymbolTable) -> Result<Scalar> {
        let obj = v
            .get("coeffs")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Json("scalar needs a `coeffs` object".into()))?;
        let mut out = Scalar::zero();
        for (k, q) in obj {
            let atom = if k == "0" {
                Atom::ONE
            } else {
                table.lookup(k).ok_or_else(|| Error::Json(format!("unknown symbol `{k}`")))?
            };
            let q = q
                .as_str()
                .and_then(parse_rat)
                .ok_or_else(|| Error::Json(format!("bad rational for `{k}`")))?;
            out.add_term(atom, &q);
        }
        Ok(out)
    }
}

impl std::ops::Add for Scalar {
    type Output = Scalar;
    fn add(self, other: Scalar) -> Scalar {
        Scalar::add(&self, &other)
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::default()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&SymbolTable::new()))
    }
}

/// An element of `T = R/Z` given by a scalar representative with rational part
/// in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CircleScalar {
    value: Scalar,
}

impl CircleScalar {
    pub fn new(mut s: Scalar) -> Self {
        let r = s.rational_part();
        let reduced = frac(&r);
        if reduced != r {
            s.coeffs.remove(&Atom::ONE);
            s.add_term(Atom::ONE, &reduced);
        }
        CircleScalar { value: s }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn value(&self) -> &Scalar {
        &self.value
    }

    pub fn into_scalar(self) -> Scalar {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn add(&self, other: &CircleScalar) -> CircleScalar {
        CircleScalar::new(self.value.add(&other.value))
    }

    pub fn sub(&self, other: &CircleScalar) -> CircleScalar {
        CircleScalar::new(self.value.sub(&other.value))
    }

    pub fn scale_int(&self, n: &Int) -> CircleScalar {
        CircleScalar::new(self.value.scale_int(n))
    }
}

pub fn rat_to_f64(q: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => q.to_f64().unwrap_or(f64::NAN),
    }
}

pub fn render_rat(q: &Rat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `n` or `n/d` with optional sign.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: Int = n.trim().parse().ok()?;
            let d: Int = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rat::new(n, d))
            }
        }
        None => s.parse::<Int>().ok().map(Rat::from_integer),
    }
}
