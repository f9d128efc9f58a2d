#![allow(dead_code)]

use std::collections::HashMap;

use hga_core::family::{gen_tuples, Family};
use hga_core::ks::{e, f, prod, var, TWord, Template};
use hga_core::lin::{from_tup, Expr};
use hga_core::maps::ha;
use hga_core::text::dump;
use hga_core::WordId;

pub const PHI: &str = include_str!("../fixtures/phi.txt");
pub const HA: &str = include_str!("../fixtures/ha.txt");
pub const HC: &str = include_str!("../fixtures/hc.txt");

pub struct Fixture {
    pub n: usize,
    pub terms: Vec<(bool, TWord, Option<[Vec<usize>; 3]>)>,
}

struct P<'a> {
    s: &'a [u8],
    i: usize,
    slots: usize,
}

impl P<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i] == b' ' {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) {
        assert_eq!(self.peek(), Some(c), "at {} in {:?}", self.i, std::str::from_utf8(self.s));
        self.i += 1;
    }

    fn num(&mut self) -> usize {
        let st = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[st..self.i]).unwrap().parse().unwrap()
    }

    fn list(&mut self, stop: &[u8]) -> Vec<TWord> {
        let mut v = vec![self.word()];
        while self.peek() == Some(b',') {
            self.eat(b',');
            v.push(self.word());
        }
        assert!(stop.contains(&self.peek().unwrap()));
        v
    }

    fn word(&mut self) -> TWord {
        let mut parts = Vec::new();
        loop {
            match self.peek() {
                Some(c @ (b'a' | b'b' | b'c')) => {
                    self.i += 1;
                    let k = self.num();
                    parts.push(var(self.slots * (k - 1) + (c - b'a') as usize));
                }
                Some(b'E') => {
                    self.i += 1;
                    self.num();
                    self.eat(b'(');
                    let h = self.word();
                    self.eat(b';');
                    let args = self.list(b")");
                    self.eat(b')');
                    parts.push(e(h, args));
                }
                Some(b'F') => {
                    self.i += 1;
                    self.num();
                    self.eat(b'(');
                    let a = self.list(b";");
                    self.eat(b';');
                    let b = self.list(b")");
                    self.eat(b')');
                    parts.push(f(a, b));
                }
                _ => return prod(parts),
            }
        }
    }
}

fn jset(s: &str) -> Vec<usize> {
    s.split(',').map(str::trim).filter(|t| *t != "-").map(|t| t.parse().unwrap()).collect()
}

pub fn load(text: &str, slots: usize) -> Vec<Fixture> {
    let mut out: Vec<Fixture> = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        if let Some(n) = line.strip_prefix("n ") {
            out.push(Fixture { n: n.parse().unwrap(), terms: Vec::new() });
            continue;
        }
        let mut cols = line.split('|');
        let body = cols.next().unwrap();
        let neg = body.starts_with('-');
        let mut p = P { s: &body.as_bytes()[1..], i: 0, slots };
        let w = p.word();
        assert_eq!(p.peek(), None, "trailing input in {line}");
        let j: Vec<Vec<usize>> = cols.map(jset).collect();
        let j = (j.len() == 3).then(|| [j[0].clone(), j[1].clone(), j[2].clone()]);
        out.last_mut().expect("`n` line first").terms.push((neg, w, j));
    }
    out
}

pub fn inputs(fam: &dyn Family, n: usize) -> Vec<WordId> {
    gen_tuples(n, fam.in_slots()).iter().flat_map(|t| t.as_slice().to_vec()).collect()
}

pub fn instantiate(t: &Template, ins: &[WordId]) -> Expr {
    Expr::from_terms(t.instantiate(ins))
}

/// Compares every component listed in `text` with the family.
pub fn check_family(fam: &dyn Family, text: &str) -> Result<usize, String> {
    let fx = load(text, fam.in_slots());
    let mut seen = 0;
    for c in fx {
        let ins = inputs(fam, c.n);
        let mut want = Expr::zero();
        for (neg, w, _) in &c.terms {
            want = &want + &instantiate(&Template::new(w.clone(), *neg), &ins);
        }
        if want.len() != c.terms.len() {
            return Err(format!("duplicate fixture terms at n={}", c.n));
        }
        let got = from_tup(&fam.eval(c.n, &gen_tuples(c.n, fam.in_slots())));
        if dump(&got) != dump(&want) {
            return Err(format!("{} at n={}:\n{}\n{}", fam.name(), c.n, dump(&got), dump(&want)));
        }
        seen += c.terms.len();
    }
    Ok(seen)
}

/// Checks the J-sets of the listed `h^a_(3)` summands; returns how many matched.
pub fn check_ha3_j_sets() -> Result<usize, String> {
    let fam = ha::ha();
    let ins = inputs(fam.as_ref(), 3);
    let key = |t: &Template| {
        let e = instantiate(t, &ins);
        assert_eq!(e.len(), 1);
        e.terms()[0].key
    };
    let mut ours = HashMap::new();
    for t in ha::terms(3) {
        let j = t.j_sets();
        ours.insert(key(&t.template()), [j.ja, j.jb, j.jc]);
    }
    let fx = load(HA, 3);
    let three = fx.iter().find(|c| c.n == 3).ok_or("no n = 3 block")?;
    if three.terms.len() != ours.len() {
        return Err(format!("{} listed, {} generated", three.terms.len(), ours.len()));
    }
    for (neg, w, j) in &three.terms {
        let k = key(&Template::new(w.clone(), *neg));
        if ours.get(&k) != j.as_ref() {
            return Err(format!("J-sets differ on {w:?}"));
        }
    }
    Ok(three.terms.len())
}

/// The fixture for the reverse orientation: `a` and `b` exchanged.
pub fn swapped(text: &str) -> String {
    text.chars()
        .map(|c| match c {
            'a' => 'b',
            'b' => 'a',
            c => c,
        })
        .collect()
}
