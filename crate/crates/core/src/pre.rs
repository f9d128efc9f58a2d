//! Pre-normal expression trees: arbitrary nesting, including products and
//! E-terms in E-head position.

use crate::error::HgaError;
use crate::gens::GenId;
use crate::lin::{Expr, Term};
use crate::normal::{e_terms, f_terms, mul_terms, word_term, Terms};
use crate::word::{Atom, WordId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pre {
    One,
    Gen(GenId),
    D(GenId),
    Mul(Vec<Pre>),
    E(Box<Pre>, Vec<Pre>),
    F(Vec<Pre>, Vec<Pre>),
    Sum(Vec<(i64, Pre)>),
}

impl Pre {
    fn has_f(&self) -> bool {
        match self {
            Pre::One | Pre::Gen(_) | Pre::D(_) => false,
            Pre::F(..) => true,
            Pre::Mul(v) => v.iter().any(Pre::has_f),
            Pre::E(h, a) => h.has_f() || a.iter().any(Pre::has_f),
            Pre::Sum(v) => v.iter().any(|(_, p)| p.has_f()),
        }
    }

    /// Rejects F-operations inside the head of an E-operation with k ≥ 1.
    pub fn validate(&self) -> Result<(), HgaError> {
        match self {
            Pre::One | Pre::Gen(_) | Pre::D(_) => Ok(()),
            Pre::Mul(v) => v.iter().try_for_each(Pre::validate),
            Pre::F(a, b) => a.iter().chain(b).try_for_each(Pre::validate),
            Pre::Sum(v) => v.iter().try_for_each(|(_, p)| p.validate()),
            Pre::E(h, a) => {
                if !a.is_empty() && h.has_f() {
                    return Err(HgaError::FInHead);
                }
                h.validate()?;
                a.iter().try_for_each(Pre::validate)
            }
        }
    }

    fn eval(&self) -> Result<Terms, HgaError> {
        Ok(match self {
            Pre::One => vec![word_term(WordId::ONE)],
            Pre::Gen(g) => vec![word_term(WordId::gen(*g))],
            Pre::D(g) => vec![word_term(WordId::atom(Atom::D(*g)))],
            Pre::Mul(v) => {
                let mut acc = vec![word_term(WordId::ONE)];
                for p in v {
                    acc = mul_terms(&acc, &p.eval()?);
                }
                acc
            }
            Pre::E(h, a) => {
                let hv = h.eval()?;
                let av = a.iter().map(Pre::eval).collect::<Result<Vec<_>, _>>()?;
                let refs: Vec<&[Term<WordId>]> = av.iter().map(|v| v.as_slice()).collect();
                e_terms(&hv, &refs)
            }
            Pre::F(a, b) => {
                if a.is_empty() || b.is_empty() {
                    return Err(HgaError::Arity { expected: 1, got: 0 });
                }
                let av = a.iter().map(Pre::eval).collect::<Result<Vec<_>, _>>()?;
                let bv = b.iter().map(Pre::eval).collect::<Result<Vec<_>, _>>()?;
                let ar: Vec<&[Term<WordId>]> = av.iter().map(|v| v.as_slice()).collect();
                let br: Vec<&[Term<WordId>]> = bv.iter().map(|v| v.as_slice()).collect();
                f_terms(&ar, &br)
            }
            Pre::Sum(v) => {
                let mut out = Vec::new();
                for (c, p) in v {
                    out.extend(p.eval()?.into_iter().map(|t| t.scaled(*c)));
                }
                out
            }
        })
    }

    /// Expands into the canonical basis.
    pub fn normalize(&self) -> Result<Expr, HgaError> {
        self.validate()?;
        Ok(Expr::from_terms(self.eval()?))
    }
}
