#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;

use lca_heart::corpus::{random_group, random_morphism, rng, symbol_table, SymbolUse};
use lca_heart::scalars::{rat, Scalar, SymbolTable};
use lca_heart_cli::{parse_command, parse_group, parse_morphism, parse_scalar, run_script, Executor, Options, Session, Symbols};

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn golden_script() -> String {
    std::fs::read_to_string(golden_dir().join("session.lcah")).expect("golden script")
}

pub fn golden_expected() -> String {
    std::fs::read_to_string(golden_dir().join("session.out")).expect("golden output")
}

pub fn golden_options() -> Options {
    Options { json: false, seed: 0, check_certificates: true }
}

/// Runs the golden script in a fresh session.
pub fn run_golden() -> (Executor, String, i32) {
    let script = golden_script();
    let mut exec = Executor::new(Session::new(), golden_options());
    let (text, code) = run_script(&mut exec, script.lines());
    (exec, text, code)
}

fn spaced(rng: &mut impl Rng, parts: &[String], sep: &str) -> String {
    let mut out = String::new();
    for (k, p) in parts.iter().enumerate() {
        if k > 0 {
            let pad = |r: &mut dyn rand::RngCore| if r.gen_bool(0.5) { " " } else { "" };
            out.push_str(pad(rng));
            out.push_str(sep);
            out.push_str(pad(rng));
        }
        out.push_str(p);
    }
    out
}

pub fn random_group_text(rng: &mut impl Rng) -> String {
    if rng.gen_bool(0.05) {
        return "0".into();
    }
    let n = rng.gen_range(1..=5);
    let terms: Vec<String> = (0..n)
        .map(|_| match rng.gen_range(0..7) {
            0 => "R".to_string(),
            1 => format!("R^{}", rng.gen_range(0..4)),
            2 => "Z".to_string(),
            3 => format!("Z^{}", rng.gen_range(0..4)),
            4 => "T".to_string(),
            5 => format!("T^{}", rng.gen_range(0..4)),
            _ => format!("Z/{}", rng.gen_range(1..13)),
        })
        .collect();
    spaced(rng, &terms, "+")
}

/// Scalar text over symbols `s1`, `s2` with the value it denotes.
pub fn random_scalar_text(rng: &mut impl Rng, table: &SymbolTable) -> (String, Scalar) {
    let names = ["s1", "s2"];
    let n = rng.gen_range(1..=4);
    let mut text = String::new();
    let mut value = Scalar::zero();
    for k in 0..n {
        let neg = rng.gen_bool(0.4);
        if k == 0 {
            if neg {
                text.push('-');
            }
        } else {
            text.push_str(if neg { " - " } else { " + " });
        }
        let num = rng.gen_range(0..20);
        let den = rng.gen_range(1..7);
        let q = if rng.gen_bool(0.5) { rat(num, 1) } else { rat(num, den) };
        let qtext = if *q.denom() == 1.into() { q.numer().to_string() } else { format!("{}/{}", num, den) };
        let name = *names.choose(rng).unwrap();
        let atom = Scalar::atom(table.lookup(name).unwrap());
        let (t, v) = match rng.gen_range(0..3) {
            0 => (qtext, Scalar::from_rat(q)),
            1 => (format!("{qtext}*{name}"), atom.scale(&q)),
            _ => (name.to_string(), atom),
        };
        text.push_str(&t);
        value = if neg { value.sub(&v) } else { value.add(&v) };
    }
    (text, value)
}

/// Renders a morphism with randomized spacing.
fn jitter(rng: &mut impl Rng, text: &str) -> String {
    let mut out = String::new();
    for ch in text.chars() {
        if ch == ' ' {
            out.push_str(["", " ", "  "].choose(rng).unwrap());
        } else {
            out.push(ch);
        }
    }
    out
}

/// Mutations of a valid line: deletions, insertions and truncations.
pub fn mutate(rng: &mut impl Rng, line: &str) -> String {
    let alphabet: Vec<char> = "RZT0123456789/+-*^[](),:=<>?#. abxyz_".chars().collect();
    let mut chars: Vec<char> = line.chars().collect();
    for _ in 0..rng.gen_range(1..4) {
        match rng.gen_range(0..4) {
            0 if !chars.is_empty() => {
                let i = rng.gen_range(0..chars.len());
                chars.remove(i);
            }
            1 => {
                let i = rng.gen_range(0..=chars.len());
                chars.insert(i, *alphabet.choose(rng).unwrap());
            }
            2 if !chars.is_empty() => {
                let i = rng.gen_range(0..chars.len());
                chars.truncate(i);
            }
            _ => {
                let n = rng.gen_range(0..12);
                chars = (0..n).map(|_| *alphabet.choose(rng).unwrap()).collect();
            }
        }
    }
    chars.into_iter().collect()
}

#[derive(Debug, Default)]
pub struct FuzzSummary {
    pub inputs: usize,
    pub round_trips: usize,
    pub failures: Vec<String>,
}

/// `n` generated inputs: a quarter each of groups, scalars, morphism
/// literals and mutated command lines. Grammar-generated inputs must parse
/// and reparse from their rendering to an equal value; mutated lines must
/// not panic.
pub fn parser_fuzz(n: usize, seed: u64) -> FuzzSummary {
    let mut r = rng(seed);
    let (table, atoms) = symbol_table(2);
    let env = Symbols(&table);
    let lines: Vec<String> = golden_script().lines().map(str::to_string).collect();
    let mut session = Session::new();
    {
        let mut exec = Executor::new(Session::new(), Options::default());
        let _ = run_script(&mut exec, lines.iter().map(String::as_str));
        std::mem::swap(&mut session, &mut exec.session);
    }
    let syms = SymbolUse { lattice_to_circle: true, lattice_to_line: true, line_to_circle: true };
    let mut s = FuzzSummary::default();
    for k in 0..n {
        s.inputs += 1;
        match k % 4 {
            0 => {
                let t = random_group_text(&mut r);
                match parse_group(&t, &env) {
                    Ok(g) => match parse_group(&g.to_string(), &env) {
                        Ok(h) if h == g => s.round_trips += 1,
                        other => s.failures.push(format!("group `{t}` reparsed as {other:?}")),
                    },
                    Err(e) => s.failures.push(format!("group `{t}`: {e}")),
                }
            }
            1 => {
                let (t, v) = random_scalar_text(&mut r, &table);
                match parse_scalar(&t, &env) {
                    Ok(x) if x == v => match parse_scalar(&x.render(&table), &env) {
                        Ok(y) if y == x => s.round_trips += 1,
                        other => s.failures.push(format!("scalar `{t}` reparsed as {other:?}")),
                    },
                    other => s.failures.push(format!("scalar `{t}` parsed as {other:?}")),
                }
            }
            2 => {
                let g = random_group(&mut r, 2, 1);
                let h = random_group(&mut r, 2, 1);
                let f = random_morphism(&mut r, &g, &h, &atoms, syms);
                let t = jitter(&mut r, &f.render(&table));
                match parse_morphism(&t, &env) {
                    Ok(x) if x == f => match parse_morphism(&x.render(&table), &env) {
                        Ok(y) if y == x => s.round_trips += 1,
                        other => s.failures.push(format!("morphism `{t}` reparsed as {other:?}")),
                    },
                    other => s.failures.push(format!("morphism `{t}` parsed as {other:?}")),
                }
            }
            _ => {
                let base = lines.choose(&mut r).unwrap();
                let t = mutate(&mut r, base);
                let _ = parse_command(&t, &session);
            }
        }
    }
    s
}
