//! Quadratic sign exponents over GF(2).
//!
//! A sign exponent is a polynomial in the degree-parity variables of the
//! generators, with at most pairwise products (x² = x).  Polynomials used as
//! expression keys are interned and carry no constant term; the constant is
//! folded into the integer coefficient.

use std::sync::{Arc, LazyLock};

use parking_lot::{Mutex, RwLock};
use rustc_hash::FxHashMap;

/// Maximum number of distinct parity variables.
pub const MAX_VARS: usize = 64;

/// An affine form `c + Σ x_i` over GF(2); used for degrees.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Affine {
    pub c: bool,
    pub mask: u64,
}

impl Affine {
    pub const ZERO: Affine = Affine { c: false, mask: 0 };
    pub const ONE: Affine = Affine { c: true, mask: 0 };

    pub fn konst(c: bool) -> Affine {
        Affine { c, mask: 0 }
    }

    pub fn from_int(k: i64) -> Affine {
        Affine::konst(k.rem_euclid(2) == 1)
    }

    pub fn var(v: u8) -> Affine {
        Affine { c: false, mask: 1u64 << v }
    }

    pub fn is_const(self) -> bool {
        self.mask == 0
    }

    /// `k · self` for an integer `k`.
    pub fn times(self, k: i64) -> Affine {
        if k.rem_euclid(2) == 1 {
            self
        } else {
            Affine::ZERO
        }
    }

    pub fn eval(self, assign: u64) -> bool {
        self.c ^ ((self.mask & assign).count_ones() & 1 == 1)
    }
}

impl std::ops::Add for Affine {
    type Output = Affine;
    fn add(self, o: Affine) -> Affine {
        Affine { c: self.c ^ o.c, mask: self.mask ^ o.mask }
    }
}

impl std::ops::AddAssign for Affine {
    fn add_assign(&mut self, o: Affine) {
        self.c ^= o.c;
        self.mask ^= o.mask;
    }
}

impl std::iter::Sum for Affine {
    fn sum<I: Iterator<Item = Affine>>(iter: I) -> Affine {
        iter.fold(Affine::ZERO, |a, b| a + b)
    }
}

/// A quadratic polynomial over GF(2).
///
/// `quad[i]` holds bit `j` (with `j > i`) for the monomial `x_i x_j`.
/// Trailing zero rows are trimmed so that equal polynomials compare equal.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct SignPoly {
    pub c: bool,
    pub lin: u64,
    quad: Vec<u64>,
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

impl SignPoly {
    pub fn zero() -> SignPoly {
        SignPoly::default()
    }

    pub fn konst(c: bool) -> SignPoly {
        SignPoly { c, ..Default::default() }
    }

    pub fn from_affine(a: Affine) -> SignPoly {
        SignPoly { c: a.c, lin: a.mask, quad: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        !self.c && self.lin == 0 && self.quad.is_empty()
    }

    pub fn is_const(&self) -> bool {
        self.lin == 0 && self.quad.is_empty()
    }

    fn toggle_pair(&mut self, i: usize, j: usize) {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        if self.quad.len() <= i {
            self.quad.resize(i + 1, 0);
        }
        self.quad[i] ^= 1u64 << j;
    }

    fn trim(&mut self) {
        while self.quad.last() == Some(&0) {
            self.quad.pop();
        }
    }

    pub fn add_const(&mut self, c: bool) {
        self.c ^= c;
    }

    pub fn add_affine(&mut self, a: Affine) {
        self.c ^= a.c;
        self.lin ^= a.mask;
    }

    /// Adds the product `a · b` of two affine forms.
    pub fn add_product(&mut self, a: Affine, b: Affine) {
        if a.c && b.c {
            self.c ^= true;
        }
        if a.c {
            self.lin ^= b.mask;
        }
        if b.c {
            self.lin ^= a.mask;
        }
        if a.mask == 0 || b.mask == 0 {
            return;
        }
        for i in bits(a.mask) {
            for j in bits(b.mask) {
                if i == j {
                    self.lin ^= 1u64 << i;
                } else {
                    self.toggle_pair(i, j);
                }
            }
        }
        self.trim();
    }

    pub fn add_poly(&mut self, o: &SignPoly) {
        self.c ^= o.c;
        self.lin ^= o.lin;
        if self.quad.len() < o.quad.len() {
            self.quad.resize(o.quad.len(), 0);
        }
        for (r, q) in self.quad.iter_mut().zip(&o.quad) {
            *r ^= q;
        }
        self.trim();
    }

    /// Evaluates at the parity assignment whose bit `i` is the value of `x_i`.
    pub fn eval(&self, assign: u64) -> bool {
        let mut v = self.c ^ ((self.lin & assign).count_ones() & 1 == 1);
        for (i, row) in self.quad.iter().enumerate() {
            if assign >> i & 1 == 1 {
                v ^= (row & assign).count_ones() & 1 == 1;
            }
        }
        v
    }

    /// Variables that occur in some monomial.
    pub fn support(&self) -> u64 {
        let mut m = self.lin;
        for (i, row) in self.quad.iter().enumerate() {
            if *row != 0 {
                m |= (1u64 << i) | row;
            }
        }
        m
    }

    /// Monomials as sorted variable lists (constant excluded).
    pub fn monomials(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = bits(self.lin).map(|i| vec![i]).collect();
        for (i, row) in self.quad.iter().enumerate() {
            out.extend(bits(*row).map(|j| vec![i, j]));
        }
        out
    }

    /// Splits off the constant term.
    pub fn split_const(mut self) -> (bool, SignPoly) {
        let c = self.c;
        self.c = false;
        (c, self)
    }
}

/// Interned identifier of a constant-free sign polynomial.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Default)]
pub struct SignId(pub u32);

struct Table {
    polys: Vec<Arc<SignPoly>>,
    index: FxHashMap<Arc<SignPoly>, u32>,
}

static TABLE: LazyLock<RwLock<Table>> = LazyLock::new(|| {
    let zero = Arc::new(SignPoly::zero());
    let mut index = FxHashMap::default();
    index.insert(zero.clone(), 0);
    RwLock::new(Table { polys: vec![zero], index })
});

static XOR_MEMO: LazyLock<Mutex<FxHashMap<(u32, u32), u32>>> =
    LazyLock::new(|| Mutex::new(FxHashMap::default()));

impl SignId {
    pub const ZERO: SignId = SignId(0);

    /// Interns a polynomial, returning its constant term separately.
    pub fn intern(p: SignPoly) -> (bool, SignId) {
        let (c, p) = p.split_const();
        if p.is_zero() {
            return (c, SignId::ZERO);
        }
        if let Some(&id) = TABLE.read().index.get(&p) {
            return (c, SignId(id));
        }
        let mut t = TABLE.write();
        if let Some(&id) = t.index.get(&p) {
            return (c, SignId(id));
        }
        let id = t.polys.len() as u32;
        let p = Arc::new(p);
        t.polys.push(p.clone());
        t.index.insert(p, id);
        (c, SignId(id))
    }

    pub fn poly(self) -> Arc<SignPoly> {
        TABLE.read().polys[self.0 as usize].clone()
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Sum of two interned polynomials.  The result of adding two
    /// constant-free polynomials is constant-free.
    pub fn add(self, o: SignId) -> SignId {
        if self.0 == 0 {
            return o;
        }
        if o.0 == 0 {
            return self;
        }
        if self == o {
            return SignId::ZERO;
        }
        let key = if self.0 < o.0 { (self.0, o.0) } else { (o.0, self.0) };
        if let Some(&r) = XOR_MEMO.lock().get(&key) {
            return SignId(r);
        }
        let mut p = (*self.poly()).clone();
        p.add_poly(&o.poly());
        let (_, id) = SignId::intern(p);
        XOR_MEMO.lock().insert(key, id.0);
        id
    }

    /// Adds a polynomial that may have a constant term; returns the constant.
    pub fn add_poly(self, p: &SignPoly) -> (bool, SignId) {
        if p.is_const() {
            return (p.c, self);
        }
        let (c, id) = SignId::intern(p.clone());
        (c, self.add(id))
    }
}

/// Sign of a reordering of graded symbols.
///
/// `written` lists the symbols in their written order as `(rank, degree)`,
/// where `rank` is the position in the reference order.  The result is the
/// exponent Σ deg(u)·deg(v) over all inverted pairs.
pub fn koszul(written: &[(u32, Affine)]) -> SignPoly {
    let mut p = SignPoly::zero();
    for i in 0..written.len() {
        let (ri, di) = written[i];
        if di == Affine::ZERO {
            continue;
        }
        for &(rj, dj) in &written[i + 1..] {
            if ri > rj {
                p.add_product(di, dj);
            }
        }
    }
    p
}

/// Numeric counterpart of [`koszul`] for a fixed parity assignment, computed
/// by bubble-sorting the symbols.  Used as an independent oracle.
pub fn koszul_numeric(written: &[(u32, bool)]) -> bool {
    let mut v: Vec<(u32, bool)> = written.to_vec();
    let mut sign = false;
    let n = v.len();
    for i in 0..n {
        for j in 0..n - 1 - i {
            if v[j].0 > v[j + 1].0 {
                sign ^= v[j].1 && v[j + 1].1;
                v.swap(j, j + 1);
            }
        }
    }
    sign
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_uses_idempotent_squares() {
        let x = Affine::var(3);
        let mut p = SignPoly::zero();
        p.add_product(x, x);
        assert_eq!(p, SignPoly::from_affine(x));
    }

    #[test]
    fn product_matches_pointwise_evaluation() {
        let a = Affine { c: true, mask: 0b1011 };
        let b = Affine { c: false, mask: 0b0110 };
        let mut p = SignPoly::zero();
        p.add_product(a, b);
        for s in 0..16u64 {
            assert_eq!(p.eval(s), a.eval(s) && b.eval(s));
        }
    }

    #[test]
    fn interning_folds_constant() {
        let mut p = SignPoly::konst(true);
        p.add_affine(Affine::var(1));
        let (c, id) = SignId::intern(p);
        assert!(c);
        assert!(!id.poly().c);
        assert_eq!(id.add(id), SignId::ZERO);
    }

    #[test]
    fn koszul_agrees_with_bubble_sort() {
        let degs = [Affine::var(0), Affine::ONE, Affine::var(1), Affine::var(2)];
        let written = [(2u32, degs[2]), (0, degs[0]), (3, degs[3]), (1, degs[1])];
        let p = koszul(&written);
        for s in 0..8u64 {
            let num: Vec<(u32, bool)> = written.iter().map(|&(r, d)| (r, d.eval(s))).collect();
            assert_eq!(p.eval(s), koszul_numeric(&num));
        }
    }
}
