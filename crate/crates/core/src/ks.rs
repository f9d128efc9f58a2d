//! Expressions written at "≐" level.
//!
//! A template is a word over numbered variables and operation symbols.  Its
//! value on concrete inputs is the literal expression times `(−1)^κ`, where κ
//! is the Koszul sign of moving every symbol from the reference order
//! (operations in written order, then variables by number) to the written
//! order.

use crate::lin::Term;
use crate::normal::{e_terms, f_terms, mul_terms, word_term, Terms};
use crate::sign::{koszul, Affine, SignId, SignPoly};
use crate::word::WordId;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TNode {
    Var(u16),
    /// `E_k(head; args)`; the head may be any word.
    E(TWord, Vec<TWord>),
    /// `F_kl(a; b)`.
    F(Vec<TWord>, Vec<TWord>),
}

pub type TWord = Vec<TNode>;

pub fn var(i: usize) -> TWord {
    vec![TNode::Var(i as u16)]
}

pub fn e(head: TWord, args: Vec<TWord>) -> TWord {
    if args.is_empty() {
        return head;
    }
    vec![TNode::E(head, args)]
}

pub fn f(a: Vec<TWord>, b: Vec<TWord>) -> TWord {
    vec![TNode::F(a, b)]
}

pub fn prod(parts: impl IntoIterator<Item = TWord>) -> TWord {
    parts.into_iter().flatten().collect()
}

#[derive(Clone, Copy, Debug)]
enum Sym {
    Op(bool),
    Var(u16),
}

/// A template with its symbol sequence precomputed.
#[derive(Clone, Debug)]
pub struct Template {
    pub word: TWord,
    /// Constant sign factor in front of the ≐-expression.
    pub neg: bool,
    seq: Vec<Sym>,
    nvars: usize,
}

fn walk(w: &TWord, seq: &mut Vec<Sym>) {
    for n in w {
        match n {
            TNode::Var(i) => seq.push(Sym::Var(*i)),
            TNode::E(h, args) => {
                seq.push(Sym::Op(args.len() % 2 == 1));
                walk(h, seq);
                for a in args {
                    walk(a, seq);
                }
            }
            TNode::F(a, b) => {
                seq.push(Sym::Op((a.len() + b.len()) % 2 == 1));
                for x in a.iter().chain(b) {
                    walk(x, seq);
                }
            }
        }
    }
}

impl Template {
    pub fn new(word: TWord, neg: bool) -> Template {
        let mut seq = Vec::new();
        walk(&word, &mut seq);
        let nvars = seq
            .iter()
            .filter_map(|s| match s {
                Sym::Var(i) => Some(*i as usize + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        Template { word, neg, seq, nvars }
    }

    /// Variables in written order.
    pub fn vars(&self) -> Vec<usize> {
        self.seq
            .iter()
            .filter_map(|s| match s {
                Sym::Var(i) => Some(*i as usize),
                _ => None,
            })
            .collect()
    }

    /// Total operation degree (sum of arities) in the template.
    pub fn op_arity(&self) -> usize {
        fn go(w: &TWord) -> usize {
            w.iter()
                .map(|n| match n {
                    TNode::Var(_) => 0,
                    TNode::E(h, a) => a.len() + go(h) + a.iter().map(go).sum::<usize>(),
                    TNode::F(a, b) => a.len() + b.len() + a.iter().chain(b).map(go).sum::<usize>(),
                })
                .sum()
        }
        go(&self.word)
    }

    /// Sign exponent κ for inputs of the given degrees, constant `neg` included.
    pub fn sign(&self, degs: &[Affine]) -> SignPoly {
        let nops = self.seq.iter().filter(|s| matches!(s, Sym::Op(_))).count() as u32;
        let mut op_rank = 0u32;
        let written: Vec<(u32, Affine)> = self
            .seq
            .iter()
            .map(|s| match *s {
                Sym::Op(p) => {
                    op_rank += 1;
                    (op_rank - 1, Affine::konst(p))
                }
                Sym::Var(i) => (nops + i as u32, degs[i as usize]),
            })
            .collect();
        let mut p = koszul(&written);
        p.add_const(self.neg);
        p
    }

    /// The same sign for a fixed parity assignment of the variables,
    /// computed by bubble-sorting the symbols.
    pub fn sign_numeric(&self, parity: &dyn Fn(usize) -> bool) -> bool {
        let nops = self.seq.iter().filter(|s| matches!(s, Sym::Op(_))).count() as u32;
        let mut op_rank = 0u32;
        let written: Vec<(u32, bool)> = self
            .seq
            .iter()
            .map(|s| match *s {
                Sym::Op(p) => {
                    op_rank += 1;
                    (op_rank - 1, p)
                }
                Sym::Var(i) => (nops + i as u32, parity(i as usize)),
            })
            .collect();
        crate::sign::koszul_numeric(&written) ^ self.neg
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Value on single-word inputs.
    pub fn instantiate(&self, inputs: &[WordId]) -> Terms {
        assert!(inputs.len() >= self.nvars, "template needs {} inputs", self.nvars);
        let degs: Vec<Affine> = inputs.iter().map(|w| w.deg()).collect();
        let (c, s) = SignId::intern(self.sign(&degs));
        eval(&self.word, inputs).into_iter().map(|t| t.twist_id(c, s)).collect()
    }

    /// Multilinear value on inputs given as term lists.
    pub fn instantiate_terms(&self, inputs: &[&[Term<WordId>]]) -> Terms {
        let mut out = Vec::new();
        crate::normal::for_each_choice(inputs, &mut |picked: &[Term<WordId>]| {
            let ws: Vec<WordId> = picked.iter().map(|t| t.key).collect();
            let mut sign = SignId::ZERO;
            let mut coeff = 1;
            for t in picked {
                sign = sign.add(t.sign);
                coeff *= t.coeff;
            }
            for t in self.instantiate(&ws) {
                out.push(Term { key: t.key, sign: t.sign.add(sign), coeff: t.coeff * coeff });
            }
        });
        out
    }
}

fn eval(w: &TWord, inputs: &[WordId]) -> Terms {
    let mut acc: Terms = vec![word_term(WordId::ONE)];
    for n in w {
        let piece = match n {
            TNode::Var(i) => vec![word_term(inputs[*i as usize])],
            TNode::E(h, args) => {
                let hv = eval(h, inputs);
                let av: Vec<Terms> = args.iter().map(|a| eval(a, inputs)).collect();
                let refs: Vec<&[Term<WordId>]> = av.iter().map(|v| v.as_slice()).collect();
                e_terms(&hv, &refs)
            }
            TNode::F(a, b) => {
                let av: Vec<Terms> = a.iter().map(|x| eval(x, inputs)).collect();
                let bv: Vec<Terms> = b.iter().map(|x| eval(x, inputs)).collect();
                let ar: Vec<&[Term<WordId>]> = av.iter().map(|v| v.as_slice()).collect();
                let br: Vec<&[Term<WordId>]> = bv.iter().map(|v| v.as_slice()).collect();
                f_terms(&ar, &br)
            }
        };
        if piece.is_empty() {
            return Vec::new();
        }
        acc = mul_terms(&acc, &piece);
    }
    acc
}

/// The word as a template over generators of the formal tuples, variable
/// number `(index − 1)·slots + slot`.  `None` if it contains F or a
/// non-generator atom.
pub fn template_of_word(w: WordId, slots: usize) -> Option<(TWord, Vec<Affine>)> {
    use crate::word::{Atom, Factor};
    let mut degs = Vec::new();
    fn go(w: WordId, slots: usize, degs: &mut Vec<Affine>) -> Option<TWord> {
        let mut out = Vec::new();
        for f in w.factors().iter() {
            match f {
                Factor::Atom(Atom::Gen(g)) => out.extend(gen_var(*g, slots, degs)?),
                Factor::E(Atom::Gen(g), args) => {
                    let h = gen_var(*g, slots, degs)?;
                    let xs = args.iter().map(|a| go(*a, slots, degs)).collect::<Option<Vec<_>>>()?;
                    out.extend(e(h, xs));
                }
                _ => return None,
            }
        }
        Some(out)
    }
    fn gen_var(g: crate::gens::GenId, slots: usize, degs: &mut Vec<Affine>) -> Option<TWord> {
        let info = g.info();
        let s = (0..slots).find(|&s| crate::gens::Letter::slot(s) == info.letter)?;
        let v = (info.index as usize - 1) * slots + s;
        if degs.len() <= v {
            degs.resize(v + 1, Affine::ZERO);
        }
        degs[v] = g.deg();
        Some(var(v))
    }
    let tw = go(w, slots, &mut degs)?;
    Some((tw, degs))
}

/// Reads the constant ≐-sign of a normalized term over formal tuple
/// generators: the term equals `(−1)^ε ≐[word]`.
pub fn ks_exponent(t: &Term<WordId>, slots: usize) -> Option<bool> {
    let (tw, degs) = template_of_word(t.key, slots)?;
    let mut p = Template::new(tw, false).sign(&degs);
    p.add_poly(&t.sign.poly());
    p.add_const(t.coeff < 0);
    p.is_const().then_some(p.c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sign::koszul_numeric;

    #[test]
    fn sign_matches_bubble_sort() {
        // b1 E_2(a; b2, b3)
        let t = Template::new(prod([var(1), e(var(0), vec![var(2), var(3)])]), false);
        let degs: Vec<Affine> = (0..4).map(Affine::var).collect();
        let p = t.sign(&degs);
        for s in 0..16u64 {
            let seq = [(1 + 1u32, (s >> 1) & 1 == 1), (0, false), (1, s & 1 == 1), (3, (s >> 2) & 1 == 1), (4, (s >> 3) & 1 == 1)];
            assert_eq!(p.eval(s), koszul_numeric(&seq));
        }
    }
}
