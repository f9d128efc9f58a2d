//! Formal generators and their degree-parity variables.

use std::fmt;
use std::sync::{Arc, LazyLock};

use parking_lot::RwLock;
use rustc_hash::FxHashMap;

use crate::error::HgaError;
use crate::lin::Expr;
use crate::sign::{Affine, MAX_VARS};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
    C,
    X,
    Aux,
}

impl Letter {
    pub fn name(self) -> &'static str {
        match self {
            Letter::A => "a",
            Letter::B => "b",
            Letter::C => "c",
            Letter::X => "x",
            Letter::Aux => "aux",
        }
    }

    pub fn parse(s: &str) -> Option<Letter> {
        Some(match s {
            "a" => Letter::A,
            "b" => Letter::B,
            "c" => Letter::C,
            "x" => Letter::X,
            "aux" => Letter::Aux,
            _ => return None,
        })
    }

    /// Letter for tensor slot `s` of an input tuple.
    pub fn slot(s: usize) -> Letter {
        [Letter::A, Letter::B, Letter::C][s]
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Parity {
    Var(u8),
    Even,
}

#[derive(Clone, Debug)]
pub enum DiffBinding {
    Zero,
    Formal,
    Bound(Expr),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct GenId(pub u32);

#[derive(Debug)]
pub struct GenInfo {
    pub letter: Letter,
    pub index: u32,
    pub parity: Parity,
}

struct Registry {
    gens: Vec<Arc<GenInfo>>,
    by_name: FxHashMap<(Letter, u32), GenId>,
    by_var: Vec<GenId>,
    bindings: FxHashMap<GenId, DiffBinding>,
}

static REGISTRY: LazyLock<RwLock<Registry>> = LazyLock::new(|| {
    RwLock::new(Registry {
        gens: Vec::new(),
        by_name: FxHashMap::default(),
        by_var: Vec::new(),
        bindings: FxHashMap::default(),
    })
});

impl GenId {
    /// The generator `letter_index` with its own parity variable, creating it
    /// on first use.
    pub fn get(letter: Letter, index: u32) -> GenId {
        GenId::try_get(letter, index, false).expect("generator registry")
    }

    /// An even-degree generator; no parity variable is allocated.
    pub fn even(letter: Letter, index: u32) -> GenId {
        GenId::try_get(letter, index, true).expect("generator registry")
    }

    pub fn try_get(letter: Letter, index: u32, even: bool) -> Result<GenId, HgaError> {
        if let Some(&g) = REGISTRY.read().by_name.get(&(letter, index)) {
            let p = g.info().parity;
            if (p == Parity::Even) != even {
                return Err(HgaError::GeneratorConflict(format!("{}{}", letter.name(), index)));
            }
            return Ok(g);
        }
        let mut r = REGISTRY.write();
        if let Some(&g) = r.by_name.get(&(letter, index)) {
            return Ok(g);
        }
        let parity = if even {
            Parity::Even
        } else {
            if r.by_var.len() >= MAX_VARS {
                return Err(HgaError::TooManyVariables);
            }
            Parity::Var(r.by_var.len() as u8)
        };
        let id = GenId(r.gens.len() as u32);
        r.gens.push(Arc::new(GenInfo { letter, index, parity }));
        r.by_name.insert((letter, index), id);
        if !even {
            r.by_var.push(id);
        }
        Ok(id)
    }

    /// An already registered generator.
    pub fn lookup(letter: Letter, index: u32) -> Option<GenId> {
        REGISTRY.read().by_name.get(&(letter, index)).copied()
    }

    pub fn info(self) -> Arc<GenInfo> {
        REGISTRY.read().gens[self.0 as usize].clone()
    }

    pub fn deg(self) -> Affine {
        match self.info().parity {
            Parity::Var(v) => Affine::var(v),
            Parity::Even => Affine::ZERO,
        }
    }

    pub fn binding(self) -> DiffBinding {
        REGISTRY.read().bindings.get(&self).cloned().unwrap_or(DiffBinding::Formal)
    }

    /// Sets the differential binding; bound expressions must be normalized.
    pub fn bind(self, b: DiffBinding) {
        REGISTRY.write().bindings.insert(self, b);
    }

    /// Generator owning parity variable `v`.
    pub fn of_var(v: usize) -> Option<GenId> {
        REGISTRY.read().by_var.get(v).copied()
    }

    pub fn name(self) -> String {
        let i = self.info();
        format!("{}{}", i.letter.name(), i.index)
    }
}

impl fmt::Display for GenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = self.info();
        write!(f, "(g {} {})", i.letter.name(), i.index)
    }
}

/// Name of a parity variable in the text format, e.g. `da1`.
pub fn var_name(v: usize) -> String {
    match GenId::of_var(v) {
        Some(g) => format!("d{}", g.name()),
        None => format!("dv{v}"),
    }
}

/// Sort key of a parity variable: by generator letter and index.
pub fn var_sort_key(v: usize) -> (Letter, u32) {
    match GenId::of_var(v) {
        Some(g) => {
            let i = g.info();
            (i.letter, i.index)
        }
        None => (Letter::Aux, u32::MAX),
    }
}
