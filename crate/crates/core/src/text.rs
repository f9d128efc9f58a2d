//! S-expression text format for words and signed expressions.
//!
//! A summand line reads `+1 (sgn (da1*db2) (dc3)) (* (g a 1) (E (g a 2) (g b 1)))`.

use crate::error::HgaError;
use crate::gens::{var_name, var_sort_key, GenId, Letter};
use crate::lin::{Key, Lin, Term};
use crate::pre::Pre;
use crate::sign::SignId;

/// Serializes a sign key as a sorted monomial list.
pub fn sign_text(s: SignId) -> String {
    let p = s.poly();
    let mut monos: Vec<Vec<usize>> = p.monomials();
    for m in monos.iter_mut() {
        m.sort_by_key(|&v| var_sort_key(v));
    }
    monos.sort_by_key(|m| m.iter().map(|&v| var_sort_key(v)).collect::<Vec<_>>());
    let mut out = String::from("(sgn");
    for m in monos {
        out.push_str(" (");
        out.push_str(&m.iter().map(|&v| var_name(v)).collect::<Vec<_>>().join("*"));
        out.push(')');
    }
    out.push(')');
    out
}

pub fn term_text<K: Key + std::fmt::Display>(t: &Term<K>) -> String {
    format!("{:+} {} {}", t.coeff, sign_text(t.sign), t.key)
}

/// One summand per line, sorted by text.
pub fn dump<K: Key + std::fmt::Display>(e: &Lin<K>) -> String {
    let mut lines: Vec<String> = e.iter().map(|t| term_text(&t)).collect();
    lines.sort();
    let mut s = lines.join("\n");
    if !s.is_empty() {
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
enum Sx {
    Atom(String),
    List(Vec<Sx>),
}

fn tokenize(s: &str) -> Vec<String> {
    s.replace('(', " ( ").replace(')', " ) ").split_whitespace().map(str::to_owned).collect()
}

fn read(tokens: &[String], pos: &mut usize) -> Result<Sx, HgaError> {
    let tok = tokens.get(*pos).ok_or_else(|| HgaError::Parse("unexpected end of input".into()))?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sx::List(items));
                    }
                    Some(_) => items.push(read(tokens, pos)?),
                    None => return Err(HgaError::Parse("unbalanced parenthesis".into())),
                }
            }
        }
        ")" => Err(HgaError::Parse("unexpected `)`".into())),
        t => Ok(Sx::Atom(t.to_owned())),
    }
}

fn perr(msg: impl Into<String>) -> HgaError {
    HgaError::Parse(msg.into())
}

fn gen_of(items: &[Sx]) -> Result<GenId, HgaError> {
    match items {
        [Sx::Atom(g), Sx::Atom(l), Sx::Atom(i)] if g == "g" => {
            let letter = Letter::parse(l).ok_or_else(|| perr(format!("unknown letter `{l}`")))?;
            let idx: u32 = i.parse().map_err(|_| perr(format!("bad index `{i}`")))?;
            if idx == 0 {
                return Err(perr("generator indices are positive"));
            }
            Ok(GenId::lookup(letter, idx).unwrap_or_else(|| GenId::get(letter, idx)))
        }
        _ => Err(perr("expected (g letter index)")),
    }
}

fn list(sx: &Sx) -> Result<&[Sx], HgaError> {
    match sx {
        Sx::List(v) => Ok(v),
        Sx::Atom(a) => Err(perr(format!("expected a list, got `{a}`"))),
    }
}

fn to_pre(sx: &Sx) -> Result<Pre, HgaError> {
    match sx {
        Sx::Atom(a) if a == "1" => Ok(Pre::One),
        Sx::Atom(a) => Err(perr(format!("unexpected atom `{a}`"))),
        Sx::List(items) => {
            let head = match items.first() {
                Some(Sx::Atom(h)) => h.as_str(),
                _ => return Err(perr("empty or headless list")),
            };
            match head {
                "g" => Ok(Pre::Gen(gen_of(items)?)),
                "d" => match items.get(1) {
                    Some(Sx::List(g)) if items.len() == 2 => Ok(Pre::D(gen_of(g)?)),
                    _ => Err(perr("expected (d (g letter index))")),
                },
                "*" => Ok(Pre::Mul(items[1..].iter().map(to_pre).collect::<Result<_, _>>()?)),
                "E" => {
                    let h = items.get(1).ok_or_else(|| perr("E needs a head"))?;
                    let args = items[2..].iter().map(to_pre).collect::<Result<_, _>>()?;
                    Ok(Pre::E(Box::new(to_pre(h)?), args))
                }
                "F" => {
                    if items.len() != 5 {
                        return Err(perr("expected (F k l (a...) (b...))"));
                    }
                    let num = |s: &Sx| match s {
                        Sx::Atom(x) => x.parse::<usize>().map_err(|_| perr("bad arity")),
                        _ => Err(perr("bad arity")),
                    };
                    let (k, l) = (num(&items[1])?, num(&items[2])?);
                    let a: Vec<Pre> = list(&items[3])?.iter().map(to_pre).collect::<Result<_, _>>()?;
                    let b: Vec<Pre> = list(&items[4])?.iter().map(to_pre).collect::<Result<_, _>>()?;
                    if a.len() != k {
                        return Err(HgaError::Arity { expected: k, got: a.len() });
                    }
                    if b.len() != l {
                        return Err(HgaError::Arity { expected: l, got: b.len() });
                    }
                    Ok(Pre::F(a, b))
                }
                h => Err(perr(format!("unknown operator `{h}`"))),
            }
        }
    }
}

/// Parses one (possibly non-canonical) word.
pub fn parse_pre(s: &str) -> Result<Pre, HgaError> {
    let toks = tokenize(s);
    let mut pos = 0;
    let sx = read(&toks, &mut pos)?;
    if pos != toks.len() {
        return Err(perr("trailing input"));
    }
    to_pre(&sx)
}

/// Parses a word and normalizes it.
pub fn parse_expr(s: &str) -> Result<crate::lin::Expr, HgaError> {
    parse_pre(s)?.normalize()
}
