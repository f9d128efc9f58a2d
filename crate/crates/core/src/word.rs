//! Canonical words: ordered products of factors, interned globally.

use std::fmt;
use std::sync::{Arc, LazyLock};

use parking_lot::RwLock;
use rustc_hash::FxHashMap;

use crate::gens::GenId;
use crate::sign::Affine;

/// A generator or the formal differential of one.  Only atoms may head an
/// E-operation in canonical form.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Atom {
    Gen(GenId),
    D(GenId),
}

impl Atom {
    pub fn deg(self) -> Affine {
        match self {
            Atom::Gen(g) => g.deg(),
            Atom::D(g) => g.deg() + Affine::ONE,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Factor {
    Atom(Atom),
    /// `E_k(head; args)` with `k = args.len() ≥ 1`.
    E(Atom, Box<[WordId]>),
    /// `F_kl(args[..k]; args[k..])`.
    F(u16, Box<[WordId]>),
}

impl Factor {
    pub fn deg(&self) -> Affine {
        match self {
            Factor::Atom(a) => a.deg(),
            Factor::E(h, args) => {
                Affine::from_int(args.len() as i64) + h.deg() + args.iter().map(|w| w.deg()).sum()
            }
            Factor::F(_, args) => {
                Affine::from_int(args.len() as i64) + args.iter().map(|w| w.deg()).sum()
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Default)]
pub struct WordId(pub u32);

struct Table {
    words: Vec<Arc<[Factor]>>,
    degs: Vec<Affine>,
    index: FxHashMap<Arc<[Factor]>, u32>,
}

static TABLE: LazyLock<RwLock<Table>> = LazyLock::new(|| {
    let unit: Arc<[Factor]> = Arc::from(Vec::new());
    let mut index = FxHashMap::default();
    index.insert(unit.clone(), 0);
    RwLock::new(Table { words: vec![unit], degs: vec![Affine::ZERO], index })
});

/// Number of distinct words interned so far.
pub fn interned_count() -> usize {
    TABLE.read().words.len()
}

impl WordId {
    /// The empty word, i.e. the unit.
    pub const ONE: WordId = WordId(0);

    pub fn intern(factors: Vec<Factor>) -> WordId {
        if factors.is_empty() {
            return WordId::ONE;
        }
        if let Some(&id) = TABLE.read().index.get(factors.as_slice()) {
            return WordId(id);
        }
        let deg = factors.iter().map(|f| f.deg()).sum();
        let mut t = TABLE.write();
        if let Some(&id) = t.index.get(factors.as_slice()) {
            return WordId(id);
        }
        let id = t.words.len() as u32;
        let f: Arc<[Factor]> = Arc::from(factors);
        t.words.push(f.clone());
        t.degs.push(deg);
        t.index.insert(f, id);
        WordId(id)
    }

    pub fn gen(g: GenId) -> WordId {
        WordId::intern(vec![Factor::Atom(Atom::Gen(g))])
    }

    pub fn atom(a: Atom) -> WordId {
        WordId::intern(vec![Factor::Atom(a)])
    }

    pub fn factor(f: Factor) -> WordId {
        WordId::intern(vec![f])
    }

    pub fn factors(self) -> Arc<[Factor]> {
        TABLE.read().words[self.0 as usize].clone()
    }

    pub fn deg(self) -> Affine {
        TABLE.read().degs[self.0 as usize]
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.factors().len()
    }

    pub fn concat(self, o: WordId) -> WordId {
        if self.is_one() {
            return o;
        }
        if o.is_one() {
            return self;
        }
        let mut v: Vec<Factor> = self.factors().to_vec();
        v.extend(o.factors().iter().cloned());
        WordId::intern(v)
    }

    pub fn concat_all(ws: &[WordId]) -> WordId {
        let mut v = Vec::new();
        for w in ws {
            v.extend(w.factors().iter().cloned());
        }
        WordId::intern(v)
    }

    /// Splits into the first factor and the remaining word.
    pub fn split_first(self) -> Option<(WordId, WordId)> {
        let f = self.factors();
        if f.is_empty() {
            return None;
        }
        Some((WordId::factor(f[0].clone()), WordId::intern(f[1..].to_vec())))
    }

    /// Whether the word contains a formal differential symbol anywhere.
    pub fn has_dsym(self) -> bool {
        self.factors().iter().any(|f| match f {
            Factor::Atom(Atom::D(_)) => true,
            Factor::Atom(Atom::Gen(_)) => false,
            Factor::E(h, args) => matches!(h, Atom::D(_)) || args.iter().any(|w| w.has_dsym()),
            Factor::F(_, args) => args.iter().any(|w| w.has_dsym()),
        })
    }

    pub fn has_f(self) -> bool {
        self.factors().iter().any(|f| match f {
            Factor::Atom(_) => false,
            Factor::E(_, args) => args.iter().any(|w| w.has_f()),
            Factor::F(..) => true,
        })
    }

    /// Generators in written order (heads and arguments, depth first).
    pub fn generators(self) -> Vec<GenId> {
        let mut out = Vec::new();
        self.collect_gens(&mut out);
        out
    }

    fn collect_gens(self, out: &mut Vec<GenId>) {
        for f in self.factors().iter() {
            match f {
                Factor::Atom(Atom::Gen(g)) | Factor::Atom(Atom::D(g)) => out.push(*g),
                Factor::E(h, args) => {
                    match h {
                        Atom::Gen(g) | Atom::D(g) => out.push(*g),
                    }
                    for a in args.iter() {
                        a.collect_gens(out);
                    }
                }
                Factor::F(_, args) => {
                    for a in args.iter() {
                        a.collect_gens(out);
                    }
                }
            }
        }
    }

    /// Total operation degree Σ arities of all E and F operations.
    pub fn op_degree(self) -> usize {
        self.factors()
            .iter()
            .map(|f| match f {
                Factor::Atom(_) => 0,
                Factor::E(_, args) | Factor::F(_, args) => {
                    args.len() + args.iter().map(|w| w.op_degree()).sum::<usize>()
                }
            })
            .sum()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Gen(g) => write!(f, "{g}"),
            Atom::D(g) => write!(f, "(d {g})"),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Atom(a) => write!(f, "{a}"),
            Factor::E(h, args) => {
                write!(f, "(E {h}")?;
                for a in args.iter() {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
            Factor::F(k, args) => {
                let k = *k as usize;
                write!(f, "(F {} {} (", k, args.len() - k)?;
                for (i, a) in args[..k].iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ") (")?;
                for (i, a) in args[k..].iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, "))")
            }
        }
    }
}

impl fmt::Display for WordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fs = self.factors();
        match fs.len() {
            0 => write!(f, "1"),
            1 => write!(f, "{}", fs[0]),
            _ => {
                write!(f, "(*")?;
                for x in fs.iter() {
                    write!(f, " {x}")?;
                }
                write!(f, ")")
            }
        }
    }
}
