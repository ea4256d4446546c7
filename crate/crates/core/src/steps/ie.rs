//! Pair creation: a layer-1 crossing exchanged with four single particles.
//!
//! Vertex states (both masks over all layers):
//! `C` = `(a=1, b=1)`, `A` = `(a=1, b=0)`, `B` = `(a=0, b=1)`.
//! A block is an adjacent `B A` pair. A `C` whose two neighbours are neither
//! `C` nor in a block splits into `u.ll:B u.lr:A u.rl:B u.rr:A`. A maximal run
//! of exactly two consecutive blocks merges back into one `C` when neither
//! neighbour of the run is a `C`. A run covering the whole circle is left
//! alone.

use crate::graph::{Configuration, Vertex};
use crate::names::{Label, Path};

const C: (u8, u8) = (1, 1);
const A: (u8, u8) = (1, 0);
const B: (u8, u8) = (0, 1);

fn state<L: Label>(v: &Vertex<L>) -> (u8, u8) {
    (v.a, v.b)
}

pub fn step_ie<L: Label>(x: &Configuration<L>) -> Configuration<L> {
    let v = x.vertices();
    let n = v.len();
    let st: Vec<(u8, u8)> = v.iter().map(state).collect();
    // block_start[i]: vertices i, i+1 form a block.
    let block_start: Vec<bool> = (0..n).map(|i| n > 1 && st[i] == B && st[(i + 1) % n] == A).collect();
    let mut in_block = vec![false; n];
    for i in 0..n {
        if block_start[i] {
            in_block[i] = true;
            in_block[(i + 1) % n] = true;
        }
    }
    let plain = |i: usize| !in_block[i] && st[i] != C;

    let mut split = vec![false; n];
    let mut merge_at: Vec<usize> = Vec::new();
    for i in 0..n {
        if n > 1 && st[i] == C && plain((i + n - 1) % n) && plain((i + 1) % n) {
            split[i] = true;
        }
    }
    if in_block.iter().any(|&b| !b) {
        // Walk maximal runs starting after a non-block vertex.
        let start = in_block.iter().position(|&b| !b).unwrap_or(0);
        let mut i = (start + 1) % n;
        let mut seen = 0;
        while seen < n {
            if block_start[i] {
                let first = i;
                let mut blocks = 0;
                while block_start[i] {
                    blocks += 1;
                    i = (i + 2) % n;
                    seen += 2;
                }
                let before = (first + n - 1) % n;
                if blocks == 2 && st[before] != C && st[i] != C {
                    merge_at.push(first);
                }
            } else {
                i = (i + 1) % n;
                seen += 1;
            }
        }
    }
    if merge_at.is_empty() && !split.iter().any(|&s| s) {
        return x.clone();
    }

    let mut consumed = vec![false; n];
    let mut merged_here: Vec<Option<Vertex<L>>> = vec![None; n];
    for &f in &merge_at {
        let idx: Vec<usize> = (0..4).map(|d| (f + d) % n).collect();
        let left = v[idx[0]].name.join(&v[idx[1]].name);
        let right = v[idx[2]].name.join(&v[idx[3]].name);
        // The merged vertex takes the slot of the run's last vertex so a run
        // wrapping past the end keeps the remaining order intact.
        for &j in &idx[..3] {
            consumed[j] = true;
        }
        merged_here[idx[3]] = Some(Vertex::new(left.join(&right), 1, 1));
    }
    let mut out = Vec::with_capacity(n + 3 * split.len());
    for i in 0..n {
        if consumed[i] {
            continue;
        }
        if let Some(m) = merged_here[i].take() {
            out.push(m);
        } else if split[i] {
            for (path, (a, b)) in [("ll", B), ("lr", A), ("rl", B), ("rr", A)] {
                let p: Path = path.parse().expect("static path");
                out.push(Vertex::new(v[i].name.descend(&p), a, b));
            }
        } else {
            out.push(v[i].clone());
        }
    }
    Configuration::from_parts(x.layers(), out)
}
