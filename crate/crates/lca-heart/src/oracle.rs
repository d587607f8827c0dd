//! Independent checks: exhaustive enumeration of finite groups, shadow
//! sampling of closures in tori, and double duals.
//!
//! Shadow checks are statistical and never feed back into the exact
//! procedures.

use std::collections::{BTreeSet, HashMap};

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::corpus::{random_group, random_morphism, SymbolUse};
use crate::elca::{closure_of_image, cokernel, kernel, ElcaGroup, ElcaMorphism, Kind};
use crate::error::{Error, Result};
use crate::fgab::{fg_cokernel, fg_image, fg_kernel, FgAbGroup, FgAbMorphism};
use crate::scalars::{Atom, Int, SymbolTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug)]
pub struct CaseReport {
    pub case_id: String,
    pub status: Status,
    pub witness: Value,
}

impl CaseReport {
    fn new(case_id: &str, failures: Vec<String>, mut witness: Value) -> Self {
        let status = if failures.is_empty() { Status::Pass } else { Status::Fail };
        if !failures.is_empty() {
            witness["mismatches"] = json!(failures);
        }
        CaseReport { case_id: case_id.to_string(), status, witness }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> Value {
        let status = match self.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
        };
        json!({ "case-id": self.case_id, "status": status, "witness": self.witness })
    }
}

pub fn report_json(cases: &[CaseReport]) -> Value {
    Value::Array(cases.iter().map(CaseReport::to_json).collect())
}

type Element = Vec<Int>;

fn element_order(g: &FgAbGroup, x: &[Int]) -> Int {
    x.iter().enumerate().fold(Int::from(1), |acc, (i, v)| {
        let d = g.gen_order(i).expect("finite group");
        acc.lcm(&(d / v.gcd(d)))
    })
}

/// Number of elements of each order in a subset of `g`.
fn order_profile<'a>(g: &FgAbGroup, xs: impl Iterator<Item = &'a Element>) -> BTreeSet<(Int, usize)> {
    let mut counts: HashMap<Int, usize> = HashMap::new();
    for x in xs {
        *counts.entry(element_order(g, x)).or_default() += 1;
    }
    counts.into_iter().collect()
}

fn image_set(f: &FgAbMorphism) -> Result<BTreeSet<Element>> {
    Ok(f.source.elements()?.iter().map(|x| f.apply(x)).collect())
}

fn kernel_set(f: &FgAbMorphism) -> Result<BTreeSet<Element>> {
    Ok(f.source.elements()?.into_iter().filter(|x| f.apply(x).iter().all(Zero::is_zero)).collect())
}

struct Expected {
    kernel: BTreeSet<Element>,
    image: BTreeSet<Element>,
}

fn check_embedding(name: &str, e: &FgAbMorphism, expected: &BTreeSet<Element>, out: &mut Vec<String>) -> Result<()> {
    let img = image_set(e)?;
    if &img != expected {
        out.push(format!("{name}: embedded set differs from enumeration"));
    }
    if img.len() != e.source.elements()?.len() {
        out.push(format!("{name}: embedding is not injective"));
    }
    Ok(())
}

fn check_projection(name: &str, p: &FgAbMorphism, expected_kernel: &BTreeSet<Element>, out: &mut Vec<String>) -> Result<()> {
    if &kernel_set(p)? != expected_kernel {
        out.push(format!("{name}: kernel of projection differs from the image"));
    }
    if image_set(p)?.len() != p.target.elements()?.len() {
        out.push(format!("{name}: projection is not onto"));
    }
    Ok(())
}

fn enumerate(f: &FgAbMorphism) -> Result<Expected> {
    Ok(Expected { kernel: kernel_set(f)?, image: image_set(f)? })
}

fn finite_witness(f: &FgAbMorphism, e: &Expected) -> Value {
    json!({
        "source_order": f.source.order().map(|n| n.to_string()),
        "target_order": f.target.order().map(|n| n.to_string()),
        "kernel_size": e.kernel.len(),
        "image_size": e.image.len(),
    })
}

/// Recomputes kernel, image and cokernel of a map between finite groups by
/// enumeration and compares them with the Smith-form results.
pub fn brute_finite_check(case_id: &str, f: &FgAbMorphism) -> Result<CaseReport> {
    let e = enumerate(f)?;
    let mut out = Vec::new();
    let (_, iota) = fg_kernel(f);
    check_embedding("kernel", &iota, &e.kernel, &mut out)?;
    let (_, proj) = fg_cokernel(f);
    check_projection("cokernel", &proj, &e.image, &mut out)?;
    let img = fg_image(f);
    let expected = order_profile(&f.target, e.image.iter());
    let got = order_profile(&img, img.elements()?.iter());
    if expected != got {
        out.push("image: isomorphism type differs from enumeration".into());
    }
    Ok(CaseReport::new(case_id, out, finite_witness(f, &e)))
}

/// The same check for the kernel, cokernel and closed image of a morphism
/// between finite elementary groups.
pub fn brute_elca_finite_check(case_id: &str, f: &ElcaMorphism) -> Result<CaseReport> {
    let fd = f
        .discrete_part()
        .filter(|d| d.source.is_finite() && d.target.is_finite())
        .ok_or_else(|| Error::OrderBound("both groups must be finite".into()))?;
    let e = enumerate(&fd)?;
    let mut out = Vec::new();
    let discrete = |m: ElcaMorphism| {
        m.discrete_part().ok_or_else(|| Error::Internal("finite groups have discrete subquotients".into()))
    };
    check_embedding("kernel", &discrete(kernel(f)?)?, &e.kernel, &mut out)?;
    check_projection("cokernel", &discrete(cokernel(f)?)?, &e.image, &mut out)?;
    check_embedding("closure", &discrete(closure_of_image(f)?)?, &e.image, &mut out)?;
    Ok(CaseReport::new(case_id, out, finite_witness(&fd, &e)))
}

/// A point of a shadow of a product of lines and circles.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowPoint {
    pub coordinates: Vec<f64>,
}

impl ShadowPoint {
    /// Reduces the circle coordinates into `[0, 1)`.
    pub fn new(g: &ElcaGroup, mut coordinates: Vec<f64>) -> Self {
        for i in g.t_range() {
            coordinates[i] = wrap(coordinates[i]);
        }
        ShadowPoint { coordinates }
    }
}

fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 - 1e-12 {
        0.0
    } else {
        r
    }
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn shadow_matrix(f: &ElcaMorphism, table: &SymbolTable) -> Result<Vec<Vec<f64>>> {
    (0..f.target().dim())
        .map(|i| (0..f.source().dim()).map(|j| f.entry(i, j).shadow_eval(table)).collect())
        .collect()
}

/// Grid of cells of side `h` on the torus holding sample indices.
struct CellIndex {
    h: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl CellIndex {
    fn cells_per_side(&self) -> i64 {
        (1.0 / self.h).ceil() as i64
    }

    fn cell(&self, p: &[f64]) -> Vec<i64> {
        let n = self.cells_per_side();
        p.iter().map(|x| ((x / self.h).floor() as i64).rem_euclid(n)).collect()
    }

    fn build(h: f64, points: &[Vec<f64>]) -> Self {
        let mut idx = CellIndex { h, cells: HashMap::new() };
        for (k, p) in points.iter().enumerate() {
            let c = idx.cell(p);
            idx.cells.entry(c).or_default().push(k);
        }
        idx
    }

    fn near(&self, points: &[Vec<f64>], q: &[f64], tol: f64) -> bool {
        let n = self.cells_per_side();
        let base = self.cell(q);
        let dim = q.len();
        for offset in 0..3usize.pow(dim as u32) {
            let mut c = base.clone();
            let mut o = offset;
            for ci in c.iter_mut() {
                *ci = (*ci + (o % 3) as i64 - 1).rem_euclid(n);
                o /= 3;
            }
            if let Some(ks) = self.cells.get(&c) {
                let hit = ks.iter().any(|&k| {
                    points[k].iter().zip(q).all(|(a, b)| circle_distance(*a, *b) <= tol)
                });
                if hit {
                    return true;
                }
            }
        }
        false
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ShadowParams {
    pub samples: usize,
    pub eps: f64,
}

impl Default for ShadowParams {
    fn default() -> Self {
        ShadowParams { samples: 10_000, eps: 1e-3 }
    }
}

/// Audits a claimed closure `claimed: S -> T^c` of the image of
/// `f: D -> T^c` with `D` discrete. Every sampled multiple must satisfy the
/// annihilator equations of `S` up to `eps`, and every point of a grid on
/// `S` must be within the grid spacing of a sample. The grid spacing is
/// `eps` when `S` has dimension at most one and is coarsened to
/// `2 * samples^(-1/d)` for dimension `d` above that.
pub fn shadow_density_check(
    case_id: &str,
    f: &ElcaMorphism,
    claimed: &ElcaMorphism,
    table: &SymbolTable,
    params: ShadowParams,
    rng: &mut impl Rng,
) -> Result<CaseReport> {
    let ambient = f.target();
    if !f.source().is_discrete() || ambient.dim() != ambient.torus_rank {
        return Err(Error::Precondition("shadow audit needs a discrete source and a torus target".into()));
    }
    let s = claimed.source();
    if claimed.target() != ambient || !s.is_compact() {
        return Err(Error::Precondition("claimed closure must be a compact subgroup of the target".into()));
    }
    let c = ambient.dim();
    let gens = shadow_matrix(f, table)?;
    let n = params.samples;
    let mut samples = Vec::with_capacity(n);
    for step in 1..=n {
        let mut coeffs = vec![step as f64];
        for _ in 1..f.source().dim() {
            coeffs.push(rng.gen_range(-(n as i64)..=n as i64) as f64);
        }
        let p: Vec<f64> = (0..c).map(|i| wrap(coeffs.iter().enumerate().map(|(j, a)| a * gens[i][j]).sum())).collect();
        samples.push(p);
    }

    // membership through characters vanishing on the claimed subgroup
    let ann = kernel(&claimed.dual())?;
    let mut characters = Vec::new();
    for k in 0..ann.source().dim() {
        let chi: Vec<f64> = (0..c)
            .map(|i| ann.entry(i, k).as_rational().and_then(|q| q.to_f64()).unwrap_or(f64::NAN))
            .collect();
        let norm: f64 = chi.iter().map(|x| x.abs()).sum();
        if norm > 0.0 {
            characters.push((chi, norm));
        }
    }
    let mut max_residual = 0.0f64;
    for p in &samples {
        for (chi, norm) in &characters {
            let v: f64 = chi.iter().zip(p).map(|(a, b)| a * b).sum();
            max_residual = max_residual.max((v - v.round()).abs() / norm);
        }
    }

    // grid on the claimed subgroup
    let sh = shadow_matrix(claimed, table)?;
    let d = s.torus_rank;
    let spacing = if d <= 1 { params.eps } else { params.eps.max(2.0 * (n as f64).powf(-1.0 / d as f64)) };
    let steps: Vec<usize> = s
        .t_range()
        .map(|j| {
            let len = (0..c).map(|i| sh[i][j].abs()).fold(0.0, f64::max).max(1.0);
            (len / spacing).ceil() as usize
        })
        .collect();
    let torsion: Vec<(usize, i64)> =
        s.f_range().map(|j| (j, s.order(j).and_then(|o| o.to_i64()).unwrap_or(1))).collect();
    let finite_count: i64 = torsion.iter().map(|(_, o)| o).product();
    let grid_count: usize = steps.iter().product::<usize>() * finite_count as usize;
    if grid_count > 5_000_000 {
        return Err(Error::Precondition(format!("grid of {grid_count} points is too large")));
    }
    let index = CellIndex::build(spacing, &samples);
    let mut uncovered = 0usize;
    let mut first_gap = None;
    for g in 0..grid_count {
        let mut rest = g;
        let mut q = vec![0.0; c];
        for (k, j) in s.t_range().enumerate() {
            let theta = (rest % steps[k]) as f64 / steps[k] as f64;
            rest /= steps[k];
            for (i, qi) in q.iter_mut().enumerate() {
                *qi += theta * sh[i][j];
            }
        }
        for &(j, o) in &torsion {
            let m = (rest as i64 % o) as f64;
            rest /= o as usize;
            for (i, qi) in q.iter_mut().enumerate() {
                *qi += m * sh[i][j];
            }
        }
        let q: Vec<f64> = q.into_iter().map(wrap).collect();
        if !index.near(&samples, &q, spacing) {
            uncovered += 1;
            first_gap.get_or_insert(q);
        }
    }

    let mut out = Vec::new();
    if max_residual > params.eps {
        out.push(format!("a sample leaves the claimed subgroup by {max_residual:e}"));
    }
    if uncovered > 0 {
        out.push(format!("{uncovered} of {grid_count} grid points have no nearby sample"));
    }
    let witness = json!({
        "samples": n,
        "eps": params.eps,
        "grid_spacing": spacing,
        "grid_points": grid_count,
        "max_residual": max_residual,
        "uncovered": uncovered,
        "first_gap": first_gap,
    });
    Ok(CaseReport::new(case_id, out, witness))
}

/// Checks that dualizing twice returns the group and, for random morphisms
/// out of it, each morphism.
pub fn double_dual_check(
    case_id: &str,
    g: &ElcaGroup,
    trials: usize,
    atoms: &[Atom],
    rng: &mut impl Rng,
) -> Result<CaseReport> {
    let mut out = Vec::new();
    if &g.dual().dual() != g {
        out.push("group differs from its double dual".into());
    }
    let syms = SymbolUse { lattice_to_circle: true, lattice_to_line: true, line_to_circle: true };
    for t in 0..trials {
        let h = random_group(rng, 2, 2);
        let f = random_morphism(rng, g, &h, atoms, syms);
        if f.dual().dual() != f {
            out.push(format!("trial {t}: morphism differs from its double dual"));
        }
    }
    let kinds: Vec<&str> = (0..g.dim())
        .map(|i| match g.kind(i) {
            Kind::R => "R",
            Kind::Z => "Z",
            Kind::T => "T",
            Kind::F => "F",
        })
        .collect();
    Ok(CaseReport::new(case_id, out, json!({ "group": g.to_string(), "coordinates": kinds, "trials": trials })))
}
