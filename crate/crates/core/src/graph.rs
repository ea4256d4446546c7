//! Circular named graphs.
//!
//! A configuration is a cyclic sequence of vertices. Port `b` of
//! `vertices[j]` is linked to port `a` of `vertices[j + 1 mod k]`, so edges are
//! implicit and every port is used exactly once. Each port carries `layers`
//! occupation bits; layer `i` (1-based) lives in bit `i - 1` of the masks.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::names::{Anon, Label, Name, Path};

pub const MAX_LAYERS: usize = 8;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vertex<L = Name> {
    pub name: L,
    pub a: u8,
    pub b: u8,
}

impl<L: Label> Vertex<L> {
    pub fn new(name: L, a: u8, b: u8) -> Self {
        Self { name, a, b }
    }

    pub fn empty(name: L) -> Self {
        Self { name, a: 0, b: 0 }
    }

    /// Bit of port `a` on `layer` (1-based).
    pub fn a(&self, layer: usize) -> bool {
        (self.a >> (layer - 1)) & 1 == 1
    }

    pub fn b(&self, layer: usize) -> bool {
        (self.b >> (layer - 1)) & 1 == 1
    }

    pub fn set_a(&mut self, layer: usize, on: bool) {
        set_bit(&mut self.a, layer, on);
    }

    pub fn set_b(&mut self, layer: usize, on: bool) {
        set_bit(&mut self.b, layer, on);
    }

    pub fn particles(&self) -> u32 {
        self.a.count_ones() + self.b.count_ones()
    }

    /// Bits packed as `a | b << 8`.
    pub fn bits(&self) -> u16 {
        u16::from(self.a) | u16::from(self.b) << 8
    }
}

fn set_bit(mask: &mut u8, layer: usize, on: bool) {
    let m = 1u8 << (layer - 1);
    if on {
        *mask |= m;
    } else {
        *mask &= !m;
    }
}

impl<L: Label> fmt::Debug for Vertex<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:(a={:b},b={:b})", self.name, self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Empty,
    LayerCount(usize),
    BitsOutOfRange { index: usize },
    Overlap { first: usize, second: usize, first_name: String, second_name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "a circle needs at least one vertex"),
            Violation::LayerCount(n) => write!(f, "layer count {n} outside 1..={MAX_LAYERS}"),
            Violation::BitsOutOfRange { index } => {
                write!(f, "vertex {index} has bits set above the layer count")
            }
            Violation::Overlap { first, second, first_name, second_name } => {
                write!(f, "vertices {first} ({first_name}) and {second} ({second_name}) have a common descendant")
            }
        }
    }
}

/// A circle of named vertices.
#[derive(Clone)]
pub struct Configuration<L = Name> {
    layers: usize,
    vertices: Vec<Vertex<L>>,
}

impl<L: Label> Configuration<L> {
    /// Builds without checking for overlapping names; steps use this since they
    /// preserve validity.
    pub fn from_parts(layers: usize, vertices: Vec<Vertex<L>>) -> Self {
        debug_assert!(!vertices.is_empty());
        Self { layers, vertices }
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex<L>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Vertex<L> {
        &self.vertices[i]
    }

    pub fn into_vertices(self) -> Vec<Vertex<L>> {
        self.vertices
    }

    pub fn layer_mask(&self) -> u8 {
        ((1u16 << self.layers) - 1) as u8
    }

    /// Index of the neighbour reached through port `b` of vertex `i`.
    pub fn b_side(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    /// Index of the neighbour reached through port `a` of vertex `i`.
    pub fn a_side(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    /// Same circle listed from a different starting vertex.
    pub fn rotated(&self, by: usize) -> Self {
        let mut v = self.vertices.clone();
        if !v.is_empty() {
            let k = v.len();
            v.rotate_left(by % k);
        }
        Self::from_parts(self.layers, v)
    }

    /// Spatial reflection: reverse the cyclic order, exchange the two ports of
    /// every vertex and mirror every name.
    pub fn reflected(&self) -> Self {
        let v = self.vertices.iter().rev().map(|x| Vertex::new(x.name.mirror(), x.b, x.a)).collect();
        Self::from_parts(self.layers, v)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.vertices.is_empty() {
            out.push(Violation::Empty);
        }
        if self.layers == 0 || self.layers > MAX_LAYERS {
            out.push(Violation::LayerCount(self.layers));
            return out;
        }
        let mask = self.layer_mask();
        for (i, v) in self.vertices.iter().enumerate() {
            if v.a & !mask != 0 || v.b & !mask != 0 {
                out.push(Violation::BitsOutOfRange { index: i });
            }
        }
        out.extend(self.overlaps());
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Overlap check via a sweep over the sorted leaf intervals: an interval
    /// overlaps an earlier one iff the earlier one is a prefix still open on
    /// the stack.
    fn overlaps(&self) -> Vec<Violation> {
        let mut leaves: Vec<(u64, &Path, usize)> = Vec::with_capacity(self.vertices.len() * 2);
        for (i, v) in self.vertices.iter().enumerate() {
            v.name.visit_leaves(&mut |l| leaves.push((l.key, &l.path, i)));
        }
        leaves.sort_unstable_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.cmp(y.1)));
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut stack: Vec<(u64, &Path, usize)> = Vec::new();
        for &(key, path, owner) in &leaves {
            while let Some(&(k, p, _)) = stack.last() {
                if k == key && p.is_prefix_of(path) {
                    break;
                }
                stack.pop();
            }
            for &(_, _, other) in &stack {
                if other != owner {
                    pairs.push((other.min(owner), other.max(owner)));
                }
            }
            stack.push((key, path, owner));
        }
        pairs.sort_unstable();
        pairs.dedup();
        pairs
            .into_iter()
            .map(|(first, second)| Violation::Overlap {
                first,
                second,
                first_name: self.vertices[first].name.to_string(),
                second_name: self.vertices[second].name.to_string(),
            })
            .collect()
    }

    pub fn window(&self, center: usize, radius: usize) -> Window {
        Window::new(self.len(), center, radius)
    }

    /// Total number of set bits.
    pub fn particles(&self) -> u64 {
        self.vertices.iter().map(|v| u64::from(v.particles())).sum()
    }

    /// Equal as named graphs: same vertices with the same bits in the same
    /// cyclic order, wherever the listing starts.
    pub fn same_graph(&self, other: &Self) -> bool {
        if self.layers != other.layers || self.len() != other.len() {
            return false;
        }
        let k = self.len();
        let first = &self.vertices[0];
        (0..k)
            .filter(|&j| other.vertices[j] == *first)
            .any(|j| (0..k).all(|i| self.vertices[i] == other.vertices[(i + j) % k]))
    }

    /// Equal up to renaming and rotation: same layer count, size and bits.
    pub fn obs_equal(&self, other: &Self) -> bool {
        if self.layers != other.layers || self.len() != other.len() {
            return false;
        }
        let hay: Vec<u16> = self.vertices.iter().map(Vertex::<L>::bits).collect();
        let needle: Vec<u16> = other.vertices.iter().map(Vertex::<L>::bits).collect();
        contains_rotation(&hay, &needle)
    }

    /// `obs_equal`, optionally also accepting the spatial reflection of `other`.
    pub fn obs_equal_with(&self, other: &Self, allow_reflection: bool) -> bool {
        self.obs_equal(other) || (allow_reflection && self.obs_equal(&other.reflected()))
    }

    /// Lexicographically least rotation of the bit sequence; a canonical key
    /// for `obs_equal` classes.
    pub fn bit_key(&self) -> (usize, Vec<u16>) {
        let bits: Vec<u16> = self.vertices.iter().map(Vertex::<L>::bits).collect();
        (self.layers, least_rotation(&bits))
    }
}

impl Configuration {
    /// Builds and validates.
    pub fn new(layers: usize, vertices: Vec<Vertex>) -> Result<Self> {
        let c = Self { layers, vertices };
        let v = c.validate();
        if v.is_empty() {
            Ok(c)
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// Fresh keys `0..k` with the given `(a, b)` masks.
    pub fn fresh(layers: usize, bits: &[(u8, u8)]) -> Self {
        let vertices = bits.iter().enumerate().map(|(i, &(a, b))| Vertex::new(Name::key(i as u64), a, b)).collect();
        Self::from_parts(layers, vertices)
    }

    /// The same circle with names forgotten.
    pub fn anonymize(&self) -> Configuration<Anon> {
        let vertices = self.vertices.iter().map(|v| Vertex::new(Anon, v.a, v.b)).collect();
        Configuration::from_parts(self.layers, vertices)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GraphDoc::from(self)).expect("graph document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDoc = serde_json::from_str(text)?;
        doc.into_config()
    }
}

/// Exact equality of named graphs (rotation-insensitive).
impl<L: Label> PartialEq for Configuration<L> {
    fn eq(&self, other: &Self) -> bool {
        self.same_graph(other)
    }
}

impl<L: Label + Eq> Eq for Configuration<L> {}

impl<L: Label> fmt::Debug for Configuration<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}{:?}", self.layers, self.vertices)
    }
}

impl<L: Label> fmt::Display for Configuration<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:(", v.name)?;
            for l in 1..=self.layers {
                write!(f, "{}", u8::from(v.a(l)))?;
            }
            write!(f, ",")?;
            for l in 1..=self.layers {
                write!(f, "{}", u8::from(v.b(l)))?;
            }
            write!(f, ")")?;
        }
        write!(f, "]")
    }
}

fn contains_rotation(hay: &[u16], needle: &[u16]) -> bool {
    let k = needle.len();
    if k != hay.len() {
        return false;
    }
    if k == 0 {
        return true;
    }
    // KMP over hay+hay.
    let mut fail = vec![0usize; k];
    let mut j = 0;
    for i in 1..k {
        while j > 0 && needle[i] != needle[j] {
            j = fail[j - 1];
        }
        if needle[i] == needle[j] {
            j += 1;
        }
        fail[i] = j;
    }
    j = 0;
    for i in 0..2 * k - 1 {
        let c = hay[i % k];
        while j > 0 && c != needle[j] {
            j = fail[j - 1];
        }
        if c == needle[j] {
            j += 1;
            if j == k {
                return true;
            }
        }
    }
    false
}

fn least_rotation(s: &[u16]) -> Vec<u16> {
    let k = s.len();
    let best = (0..k).min_by(|&x, &y| (0..k).map(|i| s[(x + i) % k]).cmp((0..k).map(|i| s[(y + i) % k]))).unwrap_or(0);
    (0..k).map(|i| s[(best + i) % k]).collect()
}

/// Disk of radius `r` around a vertex: `min(2r + 1, k)` consecutive vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub center: usize,
    pub radius: usize,
    pub start: usize,
    pub len: usize,
    ring: usize,
}

impl Window {
    pub fn new(ring: usize, center: usize, radius: usize) -> Self {
        assert!(center < ring, "window center {center} outside circle of size {ring}");
        if 2 * radius + 1 >= ring {
            return Self { center, radius, start: 0, len: ring, ring };
        }
        Self { center, radius, start: (center + ring - radius) % ring, len: 2 * radius + 1, ring }
    }

    pub fn is_whole(&self) -> bool {
        self.len == self.ring
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).map(move |i| (self.start + i) % self.ring)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    #[default]
    None,
    /// At least one layer-1 particle on each port.
    OneOfEach,
}

const REJECTION_BUDGET: usize = 10_000;

/// Seeded random configuration with fresh keys `0..size`.
///
/// The generator is ChaCha8 seeded with `seed_from_u64(seed)`. Bits are drawn
/// vertex by vertex, layer by layer, port `a` before port `b`; each draw takes
/// one `u64`, and the bit is set iff its top 53 bits are below
/// `round(density * 2^53)`. Rejected draws continue the same stream.
pub fn random_config(
    size: usize,
    layers: usize,
    density: f64,
    seed: u64,
    constraint: Constraint,
) -> Result<Configuration> {
    if size == 0 {
        return Err(Error::Domain("random configuration needs size >= 1".into()));
    }
    if layers == 0 || layers > MAX_LAYERS {
        return Err(Error::Domain(format!("layer count {layers} outside 1..={MAX_LAYERS}")));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Domain(format!("density {density} outside [0, 1]")));
    }
    let threshold = (density * (1u64 << 53) as f64).round() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = move || (rng.next_u64() >> 11) < threshold;
    for _ in 0..REJECTION_BUDGET {
        let mut vertices = Vec::with_capacity(size);
        for i in 0..size {
            let mut v = Vertex::empty(Name::key(i as u64));
            for layer in 1..=layers {
                v.set_a(layer, draw());
                v.set_b(layer, draw());
            }
            vertices.push(v);
        }
        let ok = match constraint {
            Constraint::None => true,
            Constraint::OneOfEach => vertices.iter().any(|v| v.a(1)) && vertices.iter().any(|v| v.b(1)),
        };
        if ok {
            return Ok(Configuration::from_parts(layers, vertices));
        }
        if threshold == 0 {
            break;
        }
    }
    Err(Error::RejectionBudget(REJECTION_BUDGET))
}

/// On-disk graph document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub layers: usize,
    pub vertices: Vec<VertexDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub name: String,
    pub a: Vec<u8>,
    pub b: Vec<u8>,
}

impl From<&Configuration> for GraphDoc {
    fn from(c: &Configuration) -> Self {
        let bits = |mask: u8| (1..=c.layers).map(|l| (mask >> (l - 1)) & 1).collect();
        GraphDoc {
            layers: c.layers,
            vertices: c
                .vertices
                .iter()
                .map(|v| VertexDoc { name: v.name.to_string(), a: bits(v.a), b: bits(v.b) })
                .collect(),
        }
    }
}

impl GraphDoc {
    pub fn into_config(self) -> Result<Configuration> {
        if self.layers == 0 || self.layers > MAX_LAYERS {
            return Err(Error::Invalid(vec![Violation::LayerCount(self.layers)]));
        }
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.into_iter().enumerate() {
            let name: Name = v
                .name
                .parse()
                .map_err(|e: ParseError| ParseError::new(e.position, format!("vertex {i} name: {}", e.message)))?;
            let pack = |bits: &[u8], port: &str| -> Result<u8> {
                if bits.len() != self.layers {
                    return Err(Error::Domain(format!(
                        "vertex {i} port {port}: expected {} bits, found {}",
                        self.layers,
                        bits.len()
                    )));
                }
                bits.iter().enumerate().try_fold(0u8, |m, (l, &bit)| match bit {
                    0 => Ok(m),
                    1 => Ok(m | 1 << l),
                    _ => Err(Error::Domain(format!("vertex {i} port {port}: bit {bit} is not 0/1"))),
                })
            };
            let a = pack(&v.a, "a")?;
            let b = pack(&v.b, "b")?;
            vertices.push(Vertex::new(name, a, b));
        }
        Configuration::new(self.layers, vertices)
    }
}
