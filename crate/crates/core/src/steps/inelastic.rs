//! Matter clumps and radiation: `Dr`, `Dl` and their rule table.
//!
//! A clump is a vertex holding both layer-1 particles. `Dr` rewrites the
//! layer-1/2 bits of the vertex behind each clump's port `b` through a
//! permutation of 4-bit states `(a1, b1, a2, b2)`; `Dl` does the mirror image
//! on the vertex behind port `a`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Configuration, Vertex};
use crate::names::Label;

/// State `(a1, b1, a2, b2)` packed as `a1 | b1 << 1 | a2 << 2 | b2 << 3`.
pub type Local = u8;

pub fn pack(t: [u8; 4]) -> Local {
    t[0] | t[1] << 1 | t[2] << 2 | t[3] << 3
}

pub fn unpack(s: Local) -> [u8; 4] {
    [s & 1, s >> 1 & 1, s >> 2 & 1, s >> 3 & 1]
}

fn local<L: Label>(v: &Vertex<L>) -> Local {
    (v.a & 1) | (v.b & 1) << 1 | (v.a >> 1 & 1) << 2 | (v.b >> 1 & 1) << 3
}

fn with_local<L: Label>(v: &Vertex<L>, s: Local) -> Vertex<L> {
    let a = (v.a & !0b11) | (s & 1) | (s >> 2 & 1) << 1;
    let b = (v.b & !0b11) | (s >> 1 & 1) | (s >> 3 & 1) << 1;
    Vertex::new(v.name.clone(), a, b)
}

/// Port swap on a local state.
pub fn mirror(s: Local) -> Local {
    (s & 0b0101) << 1 | (s & 0b1010) >> 1
}

fn is_clump<L: Label>(v: &Vertex<L>) -> bool {
    v.a & v.b & 1 == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Guard {
    /// The rewritten vertex is the neighbour of a clump.
    #[default]
    Clump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub from: [u8; 4],
    pub to: [u8; 4],
}

/// A map on the 16 local states; unlisted states are fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTable {
    guard: Guard,
    forward: [Local; 16],
    backward: [Local; 16],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    #[serde(default)]
    guard: Guard,
    entries: Vec<Entry>,
}

const DEFAULT_CYCLES: [[[u8; 4]; 4]; 2] = [
    [[0, 1, 0, 0], [1, 0, 0, 0], [1, 0, 1, 0], [0, 1, 0, 1]],
    [[0, 1, 1, 0], [1, 0, 0, 1], [1, 0, 1, 1], [0, 1, 1, 1]],
];

impl Default for RuleTable {
    /// Reflection, emission, capture and absorption as two 4-cycles.
    fn default() -> Self {
        let entries: Vec<Entry> =
            DEFAULT_CYCLES.iter().flat_map(|c| (0..4).map(move |i| Entry { from: c[i], to: c[(i + 1) % 4] })).collect();
        Self::new(Guard::Clump, &entries).expect("default table is a permutation")
    }
}

impl RuleTable {
    /// Checked constructor: the table must be a permutation of the states it
    /// mentions and must not touch clump states.
    pub fn new(guard: Guard, entries: &[Entry]) -> Result<Self> {
        let t = Self::unchecked(guard, entries)?;
        for s in 0..16u8 {
            if s & 0b11 == 0b11 && t.forward[s as usize] != s {
                return Err(Error::RuleTable(format!("entry rewrites the clump state {:?}", unpack(s))));
            }
            if t.forward[s as usize] & 0b11 == 0b11 && t.forward[s as usize] != s {
                return Err(Error::RuleTable(format!("entry produces a clump from {:?}", unpack(s))));
            }
        }
        let mut hit = [false; 16];
        for s in 0..16 {
            let img = t.forward[s] as usize;
            if hit[img] {
                return Err(Error::RuleTable(format!("two states map to {:?}", unpack(img as u8))));
            }
            hit[img] = true;
        }
        Ok(t)
    }

    /// Builds a table without the permutation check, for certifying tables
    /// that may be broken. Entries must still be well-formed and each state may
    /// appear at most once as a source.
    pub fn unchecked(guard: Guard, entries: &[Entry]) -> Result<Self> {
        let mut forward: [Local; 16] = std::array::from_fn(|s| s as u8);
        let mut set = [false; 16];
        for e in entries {
            if e.from.iter().chain(&e.to).any(|&b| b > 1) {
                return Err(Error::RuleTable(format!("bits must be 0 or 1 in {e:?}")));
            }
            let f = pack(e.from) as usize;
            if set[f] {
                return Err(Error::RuleTable(format!("state {:?} listed twice", e.from)));
            }
            set[f] = true;
            forward[f] = pack(e.to);
        }
        let mut backward: [Local; 16] = std::array::from_fn(|s| s as u8);
        for s in 0..16 {
            backward[forward[s] as usize] = s as u8;
        }
        Ok(Self { guard, forward, backward })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TableDoc = serde_json::from_str(text)?;
        Self::new(doc.guard, &doc.entries)
    }

    pub fn to_json(&self) -> String {
        let doc = TableDoc { guard: self.guard, entries: self.entries() };
        serde_json::to_string_pretty(&doc).expect("table serializes")
    }

    pub fn guard(&self) -> Guard {
        self.guard
    }

    pub fn entries(&self) -> Vec<Entry> {
        (0..16u8)
            .filter(|&s| self.forward[s as usize] != s)
            .map(|s| Entry { from: unpack(s), to: unpack(self.forward[s as usize]) })
            .collect()
    }

    pub fn map(&self, s: Local) -> Local {
        self.forward[s as usize]
    }

    pub fn unmap(&self, s: Local) -> Local {
        self.backward[s as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Vertex behind the clump's port `b`.
    Right,
    /// Vertex behind the clump's port `a`.
    Left,
}

/// Applies the table (or its inverse) next to every clump on one side.
pub fn step_d<L: Label>(x: &Configuration<L>, table: &RuleTable, side: Side, inverse: bool) -> Configuration<L> {
    let v = x.vertices();
    let n = v.len();
    if n < 2 {
        return x.clone();
    }
    let mut out: Vec<Vertex<L>> = v.to_vec();
    for i in 0..n {
        if !is_clump(&v[i]) {
            continue;
        }
        let j = match side {
            Side::Right => (i + 1) % n,
            Side::Left => (i + n - 1) % n,
        };
        let s = local(&v[j]);
        let f = |s| if inverse { table.unmap(s) } else { table.map(s) };
        let t = match side {
            Side::Right => f(s),
            Side::Left => mirror(f(mirror(s))),
        };
        if t != s {
            out[j] = with_local(&v[j], t);
        }
    }
    Configuration::from_parts(x.layers(), out)
}
