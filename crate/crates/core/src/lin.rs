//! Signed linear combinations keyed by (word, sign polynomial).

use std::fmt;
use std::hash::Hash;

use rustc_hash::FxHashMap;

use crate::sign::{Affine, SignId, SignPoly};
use crate::word::WordId;

pub trait Key: Copy + Eq + Hash + Send + Sync + fmt::Debug + 'static {}
impl<T: Copy + Eq + Hash + Send + Sync + fmt::Debug + 'static> Key for T {}

/// One summand `coeff · (−1)^{sign} · key`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Term<K> {
    pub key: K,
    pub sign: SignId,
    pub coeff: i64,
}

impl<K: Key> Term<K> {
    pub fn new(key: K, coeff: i64) -> Term<K> {
        Term { key, sign: SignId::ZERO, coeff }
    }

    /// Multiplies by `(−1)^p`.
    pub fn twist(self, p: &SignPoly) -> Term<K> {
        let (c, sign) = self.sign.add_poly(p);
        Term { key: self.key, sign, coeff: if c { -self.coeff } else { self.coeff } }
    }

    pub fn twist_id(self, c: bool, s: SignId) -> Term<K> {
        Term { key: self.key, sign: self.sign.add(s), coeff: if c { -self.coeff } else { self.coeff } }
    }

    pub fn scaled(self, k: i64) -> Term<K> {
        Term { coeff: self.coeff * k, ..self }
    }
}

/// A finite map `(key, sign) → nonzero integer`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lin<K: Key> {
    map: FxHashMap<(K, SignId), i64>,
}

pub type Expr = Lin<WordId>;

impl<K: Key> Default for Lin<K> {
    fn default() -> Lin<K> {
        Lin::zero()
    }
}

impl<K: Key> Lin<K> {
    pub fn zero() -> Lin<K> {
        Lin { map: FxHashMap::default() }
    }

    pub fn from_key(k: K) -> Lin<K> {
        let mut l = Lin::zero();
        l.add(Term::new(k, 1));
        l
    }

    pub fn from_terms<I: IntoIterator<Item = Term<K>>>(it: I) -> Lin<K> {
        let mut l = Lin::zero();
        l.extend(it);
        l
    }

    pub fn is_zero(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn add(&mut self, t: Term<K>) {
        if t.coeff == 0 {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.map.entry((t.key, t.sign)) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += t.coeff;
                if *e.get() == 0 {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(t.coeff);
            }
        }
    }

    pub fn extend<I: IntoIterator<Item = Term<K>>>(&mut self, it: I) {
        for t in it {
            self.add(t);
        }
    }

    pub fn add_scaled(&mut self, o: &Lin<K>, k: i64) {
        for t in o.iter() {
            self.add(t.scaled(k));
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Term<K>> + '_ {
        self.map.iter().map(|(&(key, sign), &coeff)| Term { key, sign, coeff })
    }

    pub fn terms(&self) -> Vec<Term<K>> {
        self.iter().collect()
    }

    pub fn neg(&self) -> Lin<K> {
        Lin { map: self.map.iter().map(|(k, v)| (*k, -v)).collect() }
    }

    pub fn coeff(&self, key: K, sign: SignId) -> i64 {
        self.map.get(&(key, sign)).copied().unwrap_or(0)
    }

    /// Sum of absolute coefficients, i.e. the number of unit summands.
    pub fn weight(&self) -> u64 {
        self.map.values().map(|v| v.unsigned_abs()).sum()
    }

    pub fn map_keys<L: Key>(&self, f: impl Fn(K) -> L) -> Lin<L> {
        Lin::from_terms(self.iter().map(|t| Term { key: f(t.key), sign: t.sign, coeff: t.coeff }))
    }
}

impl<K: Key> std::ops::Sub for &Lin<K> {
    type Output = Lin<K>;
    fn sub(self, o: &Lin<K>) -> Lin<K> {
        let mut r = self.clone();
        r.add_scaled(o, -1);
        r
    }
}

impl<K: Key> std::ops::Add for &Lin<K> {
    type Output = Lin<K>;
    fn add(self, o: &Lin<K>) -> Lin<K> {
        let mut r = self.clone();
        r.add_scaled(o, 1);
        r
    }
}

/// A tensor of up to three words, the key type of tuple-valued families.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Tup {
    len: u8,
    w: [WordId; 3],
}

impl Tup {
    pub fn new(ws: &[WordId]) -> Tup {
        assert!(!ws.is_empty() && ws.len() <= 3, "tuples have 1 to 3 slots");
        let mut w = [WordId::ONE; 3];
        w[..ws.len()].copy_from_slice(ws);
        Tup { len: ws.len() as u8, w }
    }

    pub fn one(slots: usize) -> Tup {
        Tup::new(&vec![WordId::ONE; slots])
    }

    pub fn single(w: WordId) -> Tup {
        Tup::new(&[w])
    }

    pub fn slots(&self) -> usize {
        self.len as usize
    }

    pub fn get(&self, i: usize) -> WordId {
        self.w[i]
    }

    pub fn as_slice(&self) -> &[WordId] {
        &self.w[..self.len as usize]
    }

    pub fn deg(&self) -> Affine {
        self.as_slice().iter().map(|w| w.deg()).sum()
    }

    pub fn is_one(&self) -> bool {
        self.as_slice().iter().all(|w| w.is_one())
    }

    /// Slotwise product `(u_1⊗…)(v_1⊗…)` together with its Koszul sign
    /// Σ_{i>j} |u_i||v_j|.
    pub fn mul(&self, o: &Tup) -> (Tup, SignPoly) {
        assert_eq!(self.len, o.len);
        let n = self.slots();
        let mut p = SignPoly::zero();
        let mut w = [WordId::ONE; 3];
        for i in 0..n {
            w[i] = self.w[i].concat(o.w[i]);
            let mut before = Affine::ZERO;
            for j in 0..i {
                before += o.w[j].deg();
            }
            p.add_product(self.w[i].deg(), before);
        }
        (Tup { len: self.len, w }, p)
    }

    /// Concatenation of tensor factors: `(u_1⊗…⊗u_p)⊗(v_1⊗…⊗v_q)`.
    pub fn join(&self, o: &Tup) -> Tup {
        let mut v = self.as_slice().to_vec();
        v.extend_from_slice(o.as_slice());
        Tup::new(&v)
    }
}

impl fmt::Display for Tup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 1 {
            return write!(f, "{}", self.w[0]);
        }
        write!(f, "(tensor")?;
        for w in self.as_slice() {
            write!(f, " {w}")?;
        }
        write!(f, ")")
    }
}

/// Converts an element expression into single-slot tuples.
pub fn to_tup(e: &Expr) -> Lin<Tup> {
    e.map_keys(Tup::single)
}

/// Converts single-slot tuples back into an element expression.
pub fn from_tup(e: &Lin<Tup>) -> Expr {
    e.map_keys(|t| {
        debug_assert_eq!(t.slots(), 1);
        t.get(0)
    })
}
