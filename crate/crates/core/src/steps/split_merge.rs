//! Vertex splitting and merging on a crossing: the engine behind `I`, `I2`
//! and `I3`.
//!
//! Each active layer has an orientation. In the normal orientation a vertex
//! holding both particles of the layer splits into `u.l` (all port-`a` bits)
//! and `u.r` (all port-`b` bits), and a pair `(u, v)` with `v` behind `u`'s
//! port `b`, where `u` carries only port-`a` bits, `v` only port-`b` bits and
//! the active layer is set on both, merges back. The mirrored orientation
//! exchanges the roles of the two ports.

use crate::graph::{Configuration, Vertex};
use crate::names::{Label, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Normal,
    Mirrored,
}

#[derive(Debug, Clone, Copy)]
pub struct Active {
    pub layer: usize,
    pub orientation: Orientation,
    /// Layers that must be empty on both ports of every pattern vertex.
    pub guard: u8,
}

#[derive(Debug, Clone, Copy)]
pub struct SplitMerge<'a> {
    pub actives: &'a [Active],
    /// Layers that must also be empty on the two vertices flanking a pattern.
    pub outer_guard: u8,
}

#[derive(Clone, Copy)]
enum Act {
    Keep,
    Split(Orientation),
    Merge(Orientation),
}

fn orient<L: Label>(v: &Vertex<L>, o: Orientation) -> (u8, u8) {
    match o {
        Orientation::Normal => (v.a, v.b),
        Orientation::Mirrored => (v.b, v.a),
    }
}

fn unorient(x: u8, y: u8, o: Orientation) -> (u8, u8) {
    match o {
        Orientation::Normal => (x, y),
        Orientation::Mirrored => (y, x),
    }
}

fn clear<L: Label>(v: &Vertex<L>, mask: u8) -> bool {
    (v.a | v.b) & mask == 0
}

impl SplitMerge<'_> {
    fn splits<L: Label>(&self, act: &Active, v: &Vertex<L>) -> bool {
        let k = 1u8 << (act.layer - 1);
        let (x, y) = orient(v, act.orientation);
        x & k != 0 && y & k != 0 && clear(v, act.guard)
    }

    fn merges<L: Label>(&self, act: &Active, u: &Vertex<L>, v: &Vertex<L>) -> bool {
        let k = 1u8 << (act.layer - 1);
        let (xu, yu) = orient(u, act.orientation);
        let (xv, yv) = orient(v, act.orientation);
        xu & k != 0 && yu == 0 && xv == 0 && yv & k != 0 && clear(u, act.guard) && clear(v, act.guard)
    }

    pub fn apply<L: Label>(&self, x: &Configuration<L>) -> Configuration<L> {
        let v = x.vertices();
        let n = v.len();
        let flank_ok = |lo: usize, hi: usize| {
            self.outer_guard == 0 || (clear(&v[lo], self.outer_guard) && clear(&v[hi], self.outer_guard))
        };
        let mut acts = vec![Act::Keep; n];
        let mut changed = false;
        for i in 0..n {
            let next = (i + 1) % n;
            let prev = (i + n - 1) % n;
            for act in self.actives {
                if self.splits(act, &v[i]) && flank_ok(prev, next) {
                    acts[i] = Act::Split(act.orientation);
                    changed = true;
                    break;
                }
                if n > 1 && self.merges(act, &v[i], &v[next]) && flank_ok(prev, (next + 1) % n) {
                    acts[i] = Act::Merge(act.orientation);
                    changed = true;
                    break;
                }
            }
        }
        if !changed {
            return x.clone();
        }
        let wrap = n > 1 && matches!(acts[n - 1], Act::Merge(_));
        let mut out = Vec::with_capacity(n + n / 2);
        let mut i = usize::from(wrap);
        while i < n {
            match acts[i] {
                Act::Keep => out.push(v[i].clone()),
                Act::Split(o) => {
                    let (xs, ys) = orient(&v[i], o);
                    let (la, lb) = unorient(xs, 0, o);
                    let (ra, rb) = unorient(0, ys, o);
                    out.push(Vertex::new(v[i].name.child(Side::L), la, lb));
                    out.push(Vertex::new(v[i].name.child(Side::R), ra, rb));
                }
                Act::Merge(o) => {
                    let w = &v[(i + 1) % n];
                    let (xu, _) = orient(&v[i], o);
                    let (_, yw) = orient(w, o);
                    let (a, b) = unorient(xu, yw, o);
                    out.push(Vertex::new(v[i].name.join(&w.name), a, b));
                    i += 1;
                }
            }
            i += 1;
        }
        Configuration::from_parts(x.layers(), out)
    }
}

pub(crate) const L1: u8 = 0b001;
pub(crate) const L2: u8 = 0b010;

pub(crate) const I_ACTIVES: [Active; 1] = [Active { layer: 1, orientation: Orientation::Normal, guard: 0 }];

/// Layer 1 as in `I`, layer 2 in the mirrored orientation; each requires the
/// other layer to be empty on its pattern vertices.
pub(crate) const I2_ACTIVES: [Active; 2] = [
    Active { layer: 1, orientation: Orientation::Normal, guard: L2 },
    Active { layer: 2, orientation: Orientation::Mirrored, guard: L1 },
];

pub(crate) const I3_ACTIVES: [Active; 1] = [Active { layer: 3, orientation: Orientation::Normal, guard: L1 | L2 }];

pub fn step_i<L: Label>(x: &Configuration<L>) -> Configuration<L> {
    SplitMerge { actives: &I_ACTIVES, outer_guard: 0 }.apply(x)
}

pub fn step_i2<L: Label>(x: &Configuration<L>) -> Configuration<L> {
    SplitMerge { actives: &I2_ACTIVES, outer_guard: 0 }.apply(x)
}

/// `flanks`: also require the two neighbouring vertices to be free of layers
/// 1 and 2.
pub fn step_i3<L: Label>(x: &Configuration<L>, flanks: bool) -> Configuration<L> {
    let outer_guard = if flanks { L1 | L2 } else { 0 };
    SplitMerge { actives: &I3_ACTIVES, outer_guard }.apply(x)
}
