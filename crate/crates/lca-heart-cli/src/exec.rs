//! Evaluation of parsed commands against a session.

use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use lca_heart::corpus::rng;
use lca_heart::elca::{
    classify_morphism, closure_of_image, cokernel, is_bicartesian, kernel, pullback, ElcaGroup, ElcaMorphism,
    SquareData,
};
use lca_heart::fgab::FgAbMorphism;
use lca_heart::heart::{
    decompose, heart_dual, normalize_dc, normalize_roof, roof_equal, roof_is_zero, BicartesianCertificate,
    HeartObject, ObjectMorphism, Roof,
};
use lca_heart::linalg::IMat;
use lca_heart::oracle::{brute_elca_finite_check, double_dual_check, shadow_density_check, CaseReport, ShadowParams};
use lca_heart::pga::{
    is_lattice_isogeny, theta, theta_inverse, theta_round_trip_certificate, weak_dual_dc, LinkKind, PgaGroup,
    PgaMorphism,
};
use lca_heart::scalars::{Atom, SymbolTable};
use lca_heart::Error;

use crate::parse::{parse_command, Command, Expr, Op, Oracle, ParseError};
use crate::session::{render_pga, LoadError, Session, Value};

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub json: bool,
    pub seed: u64,
    pub check_certificates: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { json: false, seed: 0, check_certificates: false }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{message}")]
    Engine { message: String, error: Error },
    #[error("`{0}` is not bound")]
    Unbound(String),
    #[error("`{name}` is a {found}, expected {expected}")]
    Kind { name: String, expected: &'static str, found: &'static str },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Load(#[from] LoadError),
}

impl CliError {
    fn engine(error: Error, table: &SymbolTable) -> Self {
        let message = match &error {
            Error::NotMonic { kernel } => format!("{error}; kernel embedding {}", kernel.render(table)),
            _ => error.to_string(),
        };
        CliError::Engine { message, error }
    }

    /// 2 for internal invariant failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine { error, .. } if error.is_internal() => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> Json {
        let kind = match self {
            CliError::Parse(_) => "parse",
            CliError::Engine { error, .. } if error.is_internal() => "internal",
            CliError::Engine { .. } => "precondition",
            CliError::Unbound(_) | CliError::Kind { .. } | CliError::Usage(_) => "usage",
            CliError::Load(_) => "load",
        };
        let mut v = json!({ "kind": kind, "message": self.to_string() });
        if let CliError::Parse(p) = self {
            v["column"] = json!(p.pos + 1);
            v["expected"] = json!(p.expected);
        }
        v
    }
}

type CResult<T> = Result<T, CliError>;

/// Text lines and the JSON form of one command's result.
#[derive(Clone, Debug, Default)]
pub struct Output {
    pub lines: Vec<String>,
    pub json: Json,
}

impl Output {
    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn field(&mut self, key: &str, v: Json) {
        if !self.json.is_object() {
            self.json = json!({});
        }
        self.json[key] = v;
    }

    fn flag(&mut self, key: &str, b: bool) {
        self.line(format!("{key}: {b}"));
        self.field(key, json!(b));
    }
}

pub struct Executor {
    pub session: Session,
    pub options: Options,
    rng: ChaCha8Rng,
}

impl Executor {
    pub fn new(session: Session, options: Options) -> Self {
        let rng = rng(options.seed);
        Executor { session, options, rng }
    }

    fn table(&self) -> &SymbolTable {
        &self.session.table
    }

    fn lift<T>(&self, r: lca_heart::Result<T>) -> CResult<T> {
        r.map_err(|e| CliError::engine(e, self.table()))
    }

    fn fetch(&self, name: &str) -> CResult<&Value> {
        self.session.get(name).ok_or_else(|| CliError::Unbound(name.to_string()))
    }

    fn wrong(&self, name: &str, expected: &'static str) -> CliError {
        match self.fetch(name) {
            Ok(v) => CliError::Kind { name: name.to_string(), expected, found: v.kind() },
            Err(e) => e,
        }
    }

    fn group(&self, name: &str) -> CResult<ElcaGroup> {
        match self.fetch(name)? {
            Value::Group(g) => Ok(g.clone()),
            _ => Err(self.wrong(name, "group")),
        }
    }

    fn morphism(&self, name: &str) -> CResult<ElcaMorphism> {
        match self.fetch(name)? {
            Value::Morphism(f) => Ok(f.clone()),
            _ => Err(self.wrong(name, "morphism")),
        }
    }

    fn object(&self, name: &str) -> CResult<HeartObject> {
        match self.fetch(name)? {
            Value::Object(o) => Ok(o.clone()),
            _ => Err(self.wrong(name, "object")),
        }
    }

    fn pga(&self, name: &str) -> CResult<PgaGroup> {
        match self.fetch(name)? {
            Value::Pga(p) => Ok(p.clone()),
            _ => Err(self.wrong(name, "pga")),
        }
    }

    fn roof(&self, name: &str) -> CResult<Roof> {
        match self.fetch(name)? {
            Value::Roof(r) => Ok(r.clone()),
            _ => Err(self.wrong(name, "roof")),
        }
    }

    /// Runs one line and records it in the history when it succeeds.
    pub fn run_line(&mut self, line: &str) -> CResult<Output> {
        let cmd = parse_command(line, &self.session)?;
        let out = self.execute(cmd)?;
        if !line.trim().is_empty() && !line.trim_start().starts_with('#') {
            self.session.record(line.trim());
        }
        Ok(out)
    }

    pub fn execute(&mut self, cmd: Command) -> CResult<Output> {
        let mut out = Output::default();
        match cmd {
            Command::Empty => {}
            Command::Symbol { name, shadow } => {
                let r = self.session.table.declare(&name, shadow).map(|_| ());
                self.lift(r)?;
                let text = shadow.map_or_else(|| "no shadow".to_string(), |s| format!("shadow {s}"));
                out.line(format!("symbol {name} ({text})"));
                out.field("symbol", json!(name));
                out.field("shadow", json!(shadow));
            }
            Command::Reciprocal { name, of } => {
                let r = self.session.table.declare_reciprocal(&name, &of).map(|_| ());
                self.lift(r)?;
                out.line(format!("symbol {name} = 1/{of}"));
                out.field("symbol", json!(name));
                out.field("reciprocal_of", json!(of));
            }
            Command::Let { name, expr } => {
                let v = self.eval(expr, &mut out)?;
                let v = v.ok_or_else(|| CliError::Usage("this command has no value to bind".into()))?;
                out.line(format!("{name} = {}", v.render(self.table())));
                out.field("bound", json!(name));
                out.field("kind", json!(v.kind()));
                out.field("value", v.to_json(self.table()));
                self.session.bind(&name, v);
            }
            Command::Query(op, args) => {
                self.query(op, &args, &mut out)?;
            }
            Command::Check { oracle, target, trials } => self.check(oracle, &target, trials, &mut out)?,
        }
        Ok(out)
    }

    fn eval(&mut self, expr: Expr, out: &mut Output) -> CResult<Option<Value>> {
        Ok(Some(match expr {
            Expr::Name(n) => self.fetch(&n)?.clone(),
            Expr::Group(g) => Value::Group(g),
            Expr::Morphism(f) => Value::Morphism(f),
            Expr::Object(inner) => {
                let x = match self.eval(*inner, out)? {
                    Some(Value::Morphism(f)) => f,
                    _ => return Err(CliError::Usage("an object is built from a morphism".into())),
                };
                Value::Object(self.lift(HeartObject::new(x))?)
            }
            Expr::Classical(g) => Value::Object(HeartObject::classical(&g)),
            Expr::Pga(inner) => {
                let x = match self.eval(*inner, out)? {
                    Some(Value::Morphism(f)) => f,
                    _ => return Err(CliError::Usage("a pga group is built from a morphism".into())),
                };
                let d = x
                    .source()
                    .discrete_part()
                    .ok_or_else(|| CliError::Usage("a pga group needs a discrete source".into()))?;
                let target = x.target().clone();
                Value::Pga(self.lift(PgaGroup::new(d, target, x))?)
            }
            Expr::PgaMap { source, target, matrix } => {
                let (s, t) = (self.pga(&source)?, self.pga(&target)?);
                let cols = s.group().ngens();
                if matrix.len() != t.group().ngens() || matrix.iter().any(|r| r.len() != cols) {
                    return Err(CliError::Usage(format!(
                        "matrix must have {} rows of {cols} entries",
                        t.group().ngens()
                    )));
                }
                let m = IMat::from_rows(matrix, cols);
                let map = self.lift(FgAbMorphism::new(s.group().clone(), t.group().clone(), m))?;
                Value::PgaMap(self.lift(PgaMorphism::new(&s, &t, map))?)
            }
            Expr::IdentityRoof(o) => Value::Roof(Roof::identity(&self.object(&o)?)),
            Expr::Roof { source, apex, target, legs } => {
                let (s, a, t) = (self.object(&source)?, self.object(&apex)?, self.object(&target)?);
                let m: Vec<ElcaMorphism> = legs.iter().map(|n| self.morphism(n)).collect::<CResult<_>>()?;
                let left = self.lift(ObjectMorphism::new(&a, &s, m[0].clone(), m[1].clone()))?;
                let right = self.lift(ObjectMorphism::new(&a, &t, m[2].clone(), m[3].clone()))?;
                Value::Roof(self.lift(Roof::from_square_leg(&s, &a, &t, left, right))?)
            }
            Expr::Query(op, args) => return self.query(op, &args, out),
        }))
    }

    fn emit_certificate(
        &mut self,
        from: HeartObject,
        to: HeartObject,
        cert: BicartesianCertificate,
        out: &mut Output,
    ) -> CResult<()> {
        let n = cert.len();
        let id = self.session.add_certificate(from, to, cert);
        out.line(format!("certificate {id}, {}", squares(n)));
        out.field("certificate", json!({ "id": id, "squares": n }));
        if self.options.check_certificates {
            let c = self.session.certificate(&id).expect("just stored");
            let internal = |e: Error| Error::Internal(format!("emitted certificate {id} does not validate: {e}"));
            self.lift(c.validate().map_err(internal))?;
            let reports = self.lift(c.certificate.kernel_matching_reports())?;
            if reports.iter().any(|r| !r.holds()) {
                return Err(CliError::engine(
                    Error::Internal(format!("certificate {id} fails the kernel and cokernel comparison")),
                    self.table(),
                ));
            }
            out.line(format!("certificate {id}: valid"));
            out.field("certificate_checked", json!(true));
        }
        Ok(())
    }

    fn query(&mut self, op: Op, args: &[String], out: &mut Output) -> CResult<Option<Value>> {
        let arg = |k: usize| args[k].as_str();
        let t = self.session.table.clone();
        let table = &t;
        let value = match op {
            Op::Show => {
                let v = self.fetch(arg(0))?.clone();
                out.line(format!("{}: {}", v.kind(), v.render(table)));
                out.field("kind", json!(v.kind()));
                out.field("value", v.to_json(table));
                None
            }
            Op::Kernel | Op::Coker | Op::Closure => {
                let f = self.morphism(arg(0))?;
                let (name, m, group) = match op {
                    Op::Kernel => {
                        let e = self.lift(kernel(&f))?;
                        ("kernel", e.clone(), e.source().clone())
                    }
                    Op::Coker => {
                        let p = self.lift(cokernel(&f))?;
                        ("cokernel", p.clone(), p.target().clone())
                    }
                    _ => {
                        let e = self.lift(closure_of_image(&f))?;
                        ("closure", e.clone(), e.source().clone())
                    }
                };
                let map_name = if op == Op::Coker { "projection" } else { "embedding" };
                out.line(format!("{name}: {group}"));
                out.line(format!("{map_name}: {}", m.render(table)));
                out.field(name, group.to_json());
                out.field(map_name, m.to_json(table));
                Some(Value::Morphism(m))
            }
            Op::Classify => {
                match self.fetch(arg(0))?.clone() {
                    Value::Morphism(f) => {
                        let c = self.lift(classify_morphism(&f))?;
                        out.flag("monic", c.monic);
                        out.flag("epic", c.epic);
                        out.flag("admissible", c.admissible);
                        out.flag("admissible_monic", c.admissible_monic);
                        out.flag("admissible_epic", c.admissible_epic);
                    }
                    Value::Group(g) => {
                        out.flag("compact", g.is_compact());
                        out.flag("discrete", g.is_discrete());
                        out.flag("connected", g.is_connected());
                    }
                    Value::Object(o) => {
                        out.flag("ghost", self.lift(o.is_ghost())?);
                        out.flag("zero", o.is_zero());
                        out.flag("dc", o.is_dc());
                        out.flag("dcg", o.is_dcg());
                    }
                    Value::Pga(p) => {
                        let c = self.lift(p.classify())?;
                        out.flag("precompact", c.precompact);
                        out.flag("locally_precompact", c.locally_precompact);
                        out.flag("precompactly_generated", c.precompactly_generated);
                    }
                    v => {
                        return Err(CliError::Kind { name: arg(0).into(), expected: "group, morphism, object or pga", found: v.kind() })
                    }
                }
                None
            }
            Op::Dual => {
                let v = match self.fetch(arg(0))?.clone() {
                    Value::Group(g) => Value::Group(g.dual()),
                    Value::Morphism(f) => Value::Morphism(f.dual()),
                    Value::Object(o) => Value::Object(self.lift(heart_dual(&o))?),
                    v => return Err(CliError::Kind { name: arg(0).into(), expected: "group, morphism or object", found: v.kind() }),
                };
                out.line(format!("dual: {}", v.render(table)));
                out.field("dual", v.to_json(table));
                Some(v)
            }
            Op::Pullback => {
                let (f, g) = (self.morphism(arg(0))?, self.morphism(arg(1))?);
                let p = self.lift(pullback(&f, &g))?;
                out.line(format!("pullback: {}", p.group()));
                out.line(format!("to first: {}", p.to_first.render(table)));
                out.line(format!("to second: {}", p.to_second.render(table)));
                out.field("pullback", p.group().to_json());
                out.field("to_first", p.to_first.to_json(table));
                out.field("to_second", p.to_second.to_json(table));
                Some(Value::Group(p.group().clone()))
            }
            Op::Bicartesian => {
                let m: Vec<ElcaMorphism> = args.iter().map(|n| self.morphism(n)).collect::<CResult<_>>()?;
                let sq = self.lift(SquareData::new(m[0].clone(), m[1].clone(), m[2].clone(), m[3].clone()))?;
                let b = self.lift(is_bicartesian(&sq))?;
                out.flag("bicartesian", b);
                None
            }
            Op::Ghost => {
                let o = self.object(arg(0))?;
                out.flag("ghost", self.lift(o.is_ghost())?);
                None
            }
            Op::Decompose => {
                let o = self.object(arg(0))?;
                let d = self.lift(decompose(&o))?;
                out.line(format!("torsion: {}", d.torsion.render(table)));
                out.line(format!("cotorsion: {}", d.cotorsion));
                out.line(format!("projection: {}", d.projection.render(table)));
                out.field("torsion", d.torsion.to_json(table));
                out.field("cotorsion", d.cotorsion.to_json());
                out.field("projection", d.projection.to_json(table));
                Some(Value::Object(d.torsion))
            }
            Op::Normalize => match self.fetch(arg(0))?.clone() {
                Value::Object(o) => {
                    let f = self.lift(normalize_dc(&o))?;
                    out.line(format!("normal form: {}", f.object.render(table)));
                    out.field("normal_form", f.object.to_json(table));
                    self.emit_certificate(o, f.object.clone(), f.certificate, out)?;
                    Some(Value::Object(f.object))
                }
                Value::Roof(r) => {
                    let n = self.lift(normalize_roof(&r))?;
                    out.line(format!("apex: {}", n.roof.apex.render(table)));
                    out.line(format!("apex steps: {}", n.steps.len()));
                    out.line(format!("left leg certificate, {}", squares(n.roof.certificate.len())));
                    out.field("apex", n.roof.apex.to_json(table));
                    out.field("apex_steps", json!(n.steps.len()));
                    Some(Value::Roof(n.roof))
                }
                v => return Err(CliError::Kind { name: arg(0).into(), expected: "object or roof", found: v.kind() }),
            },
            Op::Theta => {
                let p = self.pga(arg(0))?;
                let o = self.lift(theta(&p))?;
                out.line(format!("theta: {}", o.render(table)));
                out.field("theta", o.to_json(table));
                Some(Value::Object(o))
            }
            Op::ThetaInv => {
                let o = self.object(arg(0))?;
                let p = self.lift(theta_inverse(&o))?;
                out.line(format!("pga: {}", render_pga(&p, table)));
                out.field("pga", p.to_json(table));
                if self.lift(o.is_ghost())? {
                    let (back, cert) = self.lift(theta_round_trip_certificate(&o))?;
                    self.emit_certificate(back, o, cert, out)?;
                }
                Some(Value::Pga(p))
            }
            Op::Completion => {
                let p = self.pga(arg(0))?;
                let c = self.lift(p.completion())?;
                out.line(format!("completion: {}", c.group));
                out.line(format!("dense map: {}", c.dense.render(table)));
                out.line(format!("inclusion: {}", c.inclusion.render(table)));
                out.field("completion", c.group.to_json());
                out.field("dense", c.dense.to_json(table));
                out.field("inclusion", c.inclusion.to_json(table));
                Some(Value::Group(c.group))
            }
            Op::Precompact => {
                let p = self.pga(arg(0))?;
                out.flag("precompact", self.lift(p.classify())?.precompact);
                None
            }
            Op::Isogeny => {
                let f = match self.fetch(arg(0))? {
                    Value::PgaMap(f) => f.clone(),
                    _ => return Err(self.wrong(arg(0), "pgamor")),
                };
                let w = self.lift(is_lattice_isogeny(&f))?;
                out.flag("isogeny", w.is_some());
                if let Some(w) = w {
                    let mut links = Vec::new();
                    for (k, l) in w.links.iter().enumerate() {
                        let kind = match l.kind {
                            LinkKind::Epic => "epic",
                            LinkKind::Monic => "monic",
                        };
                        out.line(format!("link {}: {kind}, kernel {}, cokernel {}", k + 1, l.kernel, l.cokernel));
                        links.push(json!({ "kind": kind, "kernel": l.kernel.to_json(), "cokernel": l.cokernel.to_json() }));
                    }
                    out.field("links", json!(links));
                }
                None
            }
            Op::WeakDual => {
                let p = self.pga(arg(0))?;
                let d = self.lift(weak_dual_dc(&p))?;
                out.line(format!("weak dual: {}", render_pga(&d, table)));
                out.field("weak_dual", d.to_json(table));
                Some(Value::Pga(d))
            }
            Op::RoofZero => {
                let r = self.roof(arg(0))?;
                out.flag("zero", self.lift(roof_is_zero(&r))?);
                None
            }
            Op::RoofEq => {
                let (r, s) = (self.roof(arg(0))?, self.roof(arg(1))?);
                out.flag("equal", self.lift(roof_equal(&r, &s))?);
                None
            }
        };
        Ok(value)
    }

    fn check(&mut self, oracle: Oracle, target: &str, trials: Option<usize>, out: &mut Output) -> CResult<()> {
        let table = self.session.table.clone();
        let report: CaseReport = match oracle {
            Oracle::Finite => {
                let f = self.morphism(target)?;
                self.lift(brute_elca_finite_check(target, &f))?
            }
            Oracle::Shadow => {
                let f = self.morphism(target)?;
                let cl = self.lift(closure_of_image(&f))?;
                let params = ShadowParams { samples: trials.unwrap_or(10_000), ..ShadowParams::default() };
                let r = shadow_density_check(target, &f, &cl, &table, params, &mut self.rng);
                self.lift(r)?
            }
            Oracle::Dual => {
                let g = self.group(target)?;
                let atoms: Vec<Atom> = table.entries().iter().map(|e| e.atom).collect();
                let r = double_dual_check(target, &g, trials.unwrap_or(20), &atoms, &mut self.rng);
                self.lift(r)?
            }
        };
        let status = if report.passed() { "pass" } else { "fail" };
        out.line(format!("check {target}: {status}"));
        out.field("report", json!([report.to_json()]));
        Ok(())
    }
}

pub(crate) fn squares(n: usize) -> String {
    if n == 1 {
        "1 square".to_string()
    } else {
        format!("{n} squares")
    }
}

/// Runs a script line by line. User errors are reported and skipped; an
/// internal failure stops the run. Returns the printed text and the exit
/// code.
pub fn run_script<'a>(exec: &mut Executor, lines: impl IntoIterator<Item = &'a str>) -> (String, i32) {
    let mut text = String::new();
    let mut code = 0;
    for (k, line) in lines.into_iter().enumerate() {
        let result = exec.run_line(line);
        if exec.options.json {
            let v = match &result {
                Ok(o) => json!({ "line": k + 1, "command": line.trim(), "ok": true, "result": o.json }),
                Err(e) => json!({ "line": k + 1, "command": line.trim(), "ok": false, "error": e.to_json() }),
            };
            if result.is_err() || !line.trim().is_empty() {
                text.push_str(&v.to_string());
                text.push('\n');
            }
        } else {
            match &result {
                Ok(o) => {
                    for l in &o.lines {
                        text.push_str(l);
                        text.push('\n');
                    }
                }
                Err(e) => text.push_str(&format!("error (line {}): {e}\n", k + 1)),
            }
        }
        if let Err(e) = result {
            code = code.max(e.exit_code());
            if e.exit_code() == 2 {
                break;
            }
        }
    }
    (text, code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(lines: &[&str]) -> (String, i32) {
        let mut e = Executor::new(Session::new(), Options::default());
        run_script(&mut e, lines.iter().copied())
    }

    #[test]
    fn ghost_query() {
        let (out, code) = run(&["symbol a 1.41421356", "obj X : Z -> T = [[a]]", "ghost? X"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.ends_with("ghost: true\n"), "{out}");
    }

    #[test]
    fn rational_differential_is_rejected() {
        let (out, code) = run(&["obj X : Z -> T = [[2/5]]"]);
        assert_eq!(code, 1);
        assert!(out.contains("not monic") && out.contains("Z -> Z = [[5]]"), "{out}");
    }

    #[test]
    fn normalize_prints_certificate() {
        let (out, code) = run(&["symbol a 1.41421356", "obj G : Z^2 -> R = [[1, a]]", "normalize G"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("normal form: [Z -> T] x = [[a]]"), "{out}");
        assert!(out.contains("certificate c1"), "{out}");
    }

    #[test]
    fn decompose_classical() {
        let (out, _) = run(&["obj O = classical T", "decompose O"]);
        assert!(out.contains("torsion: [0 -> 0]") && out.contains("cotorsion: T"), "{out}");
    }

    #[test]
    fn unbound_names_are_user_errors() {
        let (out, code) = run(&["ghost? Q"]);
        assert_eq!(code, 1);
        assert!(out.contains("`Q` is not bound"));
    }
}
