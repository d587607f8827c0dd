//! Named bindings, emitted certificates and their JSON file format.

use serde_json::{json, Map, Value as Json};

use lca_heart::elca::{ElcaGroup, ElcaMorphism};
use lca_heart::fgab::FgAbMorphism;
use lca_heart::heart::{BicartesianCertificate, HeartObject, Roof};
use lca_heart::linalg::IMat;
use lca_heart::pga::{PgaGroup, PgaMorphism};
use lca_heart::scalars::{Int, SymbolTable};
use lca_heart::Error;

use crate::parse::Env;

pub const SESSION_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Group(ElcaGroup),
    Morphism(ElcaMorphism),
    Object(HeartObject),
    Pga(PgaGroup),
    PgaMap(PgaMorphism),
    Roof(Roof),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Group(_) => "group",
            Value::Morphism(_) => "morphism",
            Value::Object(_) => "object",
            Value::Pga(_) => "pga",
            Value::PgaMap(_) => "pgamor",
            Value::Roof(_) => "roof",
        }
    }

    pub fn render(&self, table: &SymbolTable) -> String {
        match self {
            Value::Group(g) => g.to_string(),
            Value::Morphism(f) => f.render(table),
            Value::Object(o) => o.render(table),
            Value::Pga(p) => render_pga(p, table),
            Value::PgaMap(f) => format!(
                "{} -> {} = {}; completed {}",
                f.source.group(),
                f.target.group(),
                render_int_matrix(&f.map.matrix),
                f.completed.render(table)
            ),
            Value::Roof(r) => format!(
                "{} <- {} -> {}, {}",
                r.source.render(table),
                r.apex.render(table),
                r.target.render(table),
                crate::exec::squares(r.certificate.len())
            ),
        }
    }

    pub fn to_json(&self, table: &SymbolTable) -> Json {
        match self {
            Value::Group(g) => g.to_json(),
            Value::Morphism(f) => f.to_json(table),
            Value::Object(o) => o.to_json(table),
            Value::Pga(p) => p.to_json(table),
            Value::PgaMap(f) => json!({
                "source": f.source.to_json(table),
                "target": f.target.to_json(table),
                "map": int_matrix_json(&f.map.matrix),
            }),
            Value::Roof(r) => r.to_json(table),
        }
    }

    pub fn from_json(kind: &str, v: &Json, table: &SymbolTable) -> lca_heart::Result<Value> {
        Ok(match kind {
            "group" => Value::Group(ElcaGroup::from_json(v)?),
            "morphism" => Value::Morphism(ElcaMorphism::from_json(v, table)?),
            "object" => Value::Object(HeartObject::from_json(v, table)?),
            "pga" => Value::Pga(PgaGroup::from_json(v, table)?),
            "pgamor" => {
                let get = |k: &str| v.get(k).ok_or_else(|| Error::Json(format!("pga morphism needs `{k}`")));
                let source = PgaGroup::from_json(get("source")?, table)?;
                let target = PgaGroup::from_json(get("target")?, table)?;
                let m = int_matrix_from_json(get("map")?, source.group().ngens())?;
                let map = FgAbMorphism::new(source.group().clone(), target.group().clone(), m)?;
                Value::PgaMap(PgaMorphism::new(&source, &target, map)?)
            }
            "roof" => Value::Roof(Roof::from_json(v, table)?),
            other => return Err(Error::Json(format!("unknown binding kind `{other}`"))),
        })
    }
}

pub fn render_pga(p: &PgaGroup, table: &SymbolTable) -> String {
    format!("{} in {} via {}", p.group(), p.ambient(), p.embedding().render(table))
}

pub fn render_int_matrix(m: &IMat) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| format!("[{}]", m.row(i).iter().map(Int::to_string).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

fn int_matrix_json(m: &IMat) -> Json {
    Json::Array((0..m.rows()).map(|i| Json::Array(m.row(i).iter().map(|x| Json::String(x.to_string())).collect())).collect())
}

fn int_matrix_from_json(v: &Json, cols: usize) -> lca_heart::Result<IMat> {
    let bad = || Error::Json("integer matrix must be a list of rows of integer strings".into());
    let rows = v.as_array().ok_or_else(bad)?;
    let mut out = Vec::new();
    for r in rows {
        let r = r.as_array().ok_or_else(bad)?;
        let r: Option<Vec<Int>> = r.iter().map(|x| x.as_str().and_then(|s| s.parse().ok())).collect();
        let r = r.ok_or_else(bad)?;
        if r.len() != cols {
            return Err(bad());
        }
        out.push(r);
    }
    Ok(IMat::from_rows(out, cols))
}

/// A chain of squares from one object to another.
#[derive(Clone, Debug)]
pub struct StoredCertificate {
    pub id: String,
    pub from: HeartObject,
    pub to: HeartObject,
    pub certificate: BicartesianCertificate,
}

impl StoredCertificate {
    pub fn validate(&self) -> lca_heart::Result<()> {
        self.certificate.validate(&self.from, &self.to)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Session {
    pub table: SymbolTable,
    bindings: Vec<(String, Value)>,
    certificates: Vec<StoredCertificate>,
    history: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("session file is not valid JSON: {0}")]
    Syntax(String),
    #[error("unsupported session version {0}")]
    Version(String),
    #[error("malformed session: {0}")]
    Schema(String),
    #[error("symbol `{name}`: {source}")]
    Symbol { name: String, source: Error },
    #[error("binding `{name}`: {source}")]
    Binding { name: String, source: Error },
    #[error("certificate {id}: {source}")]
    Certificate { id: String, source: Error },
}

impl Env for Session {
    fn symbols(&self) -> &SymbolTable {
        &self.table
    }

    fn group(&self, name: &str) -> Option<ElcaGroup> {
        match self.get(name) {
            Some(Value::Group(g)) => Some(g.clone()),
            _ => None,
        }
    }

    fn is_bound(&self, name: &str) -> bool {
        self.get(name).is_some()
    }
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// Binds or rebinds a name; a rebound name keeps its position.
    pub fn bind(&mut self, name: &str, v: Value) {
        match self.bindings.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = v,
            None => self.bindings.push((name.to_string(), v)),
        }
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.bindings.iter().map(|(n, v)| (n.as_str(), v))
    }

    pub fn certificates(&self) -> &[StoredCertificate] {
        &self.certificates
    }

    pub fn add_certificate(&mut self, from: HeartObject, to: HeartObject, certificate: BicartesianCertificate) -> String {
        let id = format!("c{}", self.certificates.len() + 1);
        self.certificates.push(StoredCertificate { id: id.clone(), from, to, certificate });
        id
    }

    pub fn certificate(&self, id: &str) -> Option<&StoredCertificate> {
        self.certificates.iter().find(|c| c.id == id)
    }

    pub fn record(&mut self, line: &str) {
        self.history.push(line.to_string());
    }

    pub fn history(&self) -> &[String] {
        &self.history
    }

    pub fn to_json(&self) -> Json {
        let t = &self.table;
        let symbols: Vec<Json> = t
            .entries()
            .iter()
            .map(|e| {
                let mut m = Map::new();
                m.insert("name".into(), json!(e.name));
                match t.reciprocal_of(e.atom) {
                    Some(of) => {
                        m.insert("reciprocal_of".into(), json!(of));
                    }
                    None => {
                        if let Some(s) = e.shadow {
                            m.insert("shadow".into(), json!(s));
                        }
                    }
                }
                Json::Object(m)
            })
            .collect();
        let bindings: Vec<Json> = self
            .bindings
            .iter()
            .map(|(n, v)| json!({ "name": n, "kind": v.kind(), "value": v.to_json(t) }))
            .collect();
        let certificates: Vec<Json> = self
            .certificates
            .iter()
            .map(|c| {
                json!({
                    "id": c.id,
                    "from": c.from.to_json(t),
                    "to": c.to.to_json(t),
                    "chain": c.certificate.to_json(t),
                })
            })
            .collect();
        json!({
            "version": SESSION_VERSION,
            "symbols": symbols,
            "bindings": bindings,
            "certificates": certificates,
            "history": self.history,
        })
    }

    pub fn save_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("session serializes");
        s.push('\n');
        s
    }

    /// Parses and revalidates every symbol, binding and certificate.
    pub fn load_str(text: &str) -> Result<Session, LoadError> {
        let v: Json = serde_json::from_str(text).map_err(|e| LoadError::Syntax(e.to_string()))?;
        match v.get("version").and_then(Json::as_u64) {
            Some(SESSION_VERSION) => {}
            other => {
                return Err(LoadError::Version(other.map_or_else(|| "missing".to_string(), |n| n.to_string())))
            }
        }
        let list = |k: &str| -> Result<Vec<Json>, LoadError> {
            match v.get(k) {
                None => Ok(Vec::new()),
                Some(Json::Array(a)) => Ok(a.clone()),
                Some(_) => Err(LoadError::Schema(format!("`{k}` must be a list"))),
            }
        };
        let field = |e: &Json, k: &str, what: &str| -> Result<String, LoadError> {
            e.get(k)
                .and_then(Json::as_str)
                .map(str::to_string)
                .ok_or_else(|| LoadError::Schema(format!("{what} needs a string `{k}`")))
        };
        let mut s = Session::new();
        for e in list("symbols")? {
            let name = field(&e, "name", "symbol")?;
            let r = match e.get("reciprocal_of").and_then(Json::as_str) {
                Some(of) => s.table.declare_reciprocal(&name, of),
                None => s.table.declare(&name, e.get("shadow").and_then(Json::as_f64)),
            };
            r.map_err(|source| LoadError::Symbol { name: name.clone(), source })?;
        }
        for e in list("bindings")? {
            let name = field(&e, "name", "binding")?;
            let kind = field(&e, "kind", "binding")?;
            let value = e.get("value").ok_or_else(|| LoadError::Schema(format!("binding `{name}` needs a value")))?;
            let value =
                Value::from_json(&kind, value, &s.table).map_err(|source| LoadError::Binding { name: name.clone(), source })?;
            if let Value::Roof(r) = &value {
                r.validate().map_err(|source| LoadError::Binding { name: name.clone(), source })?;
            }
            s.bind(&name, value);
        }
        for e in list("certificates")? {
            let id = field(&e, "id", "certificate")?;
            let wrap = |source: Error| LoadError::Certificate { id: id.clone(), source };
            let obj = |k: &str| -> Result<HeartObject, LoadError> {
                let x = e.get(k).ok_or_else(|| LoadError::Schema(format!("certificate {id} needs `{k}`")))?;
                HeartObject::from_json(x, &s.table).map_err(wrap)
            };
            let (from, to) = (obj("from")?, obj("to")?);
            let chain = e.get("chain").ok_or_else(|| LoadError::Schema(format!("certificate {id} needs `chain`")))?;
            let certificate = BicartesianCertificate::from_json(chain, &s.table).map_err(wrap)?;
            let c = StoredCertificate { id: id.clone(), from, to, certificate };
            c.validate().map_err(wrap)?;
            s.certificates.push(c);
        }
        for h in list("history")? {
            let h = h.as_str().ok_or_else(|| LoadError::Schema("history entries must be strings".into()))?;
            s.history.push(h.to_string());
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_round_trip() {
        let s = Session::new();
        let a = s.save_string();
        assert_eq!(Session::load_str(&a).unwrap().save_string(), a);
    }

    #[test]
    fn version_is_checked() {
        assert!(matches!(Session::load_str(r#"{"version":2}"#), Err(LoadError::Version(_))));
        assert!(matches!(Session::load_str("{"), Err(LoadError::Syntax(_))));
    }
}
