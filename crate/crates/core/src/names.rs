//! Vertex names: a small term algebra in which a vertex `u` may split into
//! `u.l` and `u.r` and later merge back into `u.l v u.r = u`.
//!
//! Terms are built from integer keys, suffixes `u.t` with `t` a word over
//! `{l, r}`, and joins `(u v w)`, subject to
//!
//! ```text
//! (u v w).l = u    (u v w).r = w    u.ε = u    u.l v u.r = u
//! ```
//!
//! [`Name`] always holds the canonical form, in which none of those rewrites
//! applies. In canonical form a suffix can only sit on a key (a suffix on a
//! join always collapses), so a canonical name is either a [`Leaf`] `k.t` or a
//! join of two canonical names that is not of the shape `w.tl v w.tr`.
//! Canonical names are equal iff they are structurally equal.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::ParseError;

/// One letter of a suffix word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }

    fn as_char(self) -> char {
        match self {
            Side::L => 'l',
            Side::R => 'r',
        }
    }
}

/// A word over `{l, r}`, packed one bit per letter (`l` = 0, `r` = 1).
///
/// Words up to 128 letters live inline.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Path {
    len: u32,
    words: SmallVec<[u64; 2]>,
}

impl Path {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> Side {
        debug_assert!(i < self.len());
        if (self.words[i / 64] >> (i % 64)) & 1 == 1 {
            Side::R
        } else {
            Side::L
        }
    }

    pub fn push(&mut self, side: Side) {
        let i = self.len as usize;
        if i.is_multiple_of(64) {
            self.words.push(0);
        }
        if side == Side::R {
            self.words[i / 64] |= 1 << (i % 64);
        }
        self.len += 1;
    }

    /// Removes and returns the last letter.
    pub fn pop(&mut self) -> Option<Side> {
        if self.len == 0 {
            return None;
        }
        let i = self.len as usize - 1;
        let side = self.get(i);
        self.words[i / 64] &= !(1 << (i % 64));
        self.len -= 1;
        if i.is_multiple_of(64) {
            self.words.pop();
        }
        Some(side)
    }

    pub fn last(&self) -> Option<Side> {
        self.len().checked_sub(1).map(|i| self.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = Side> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn with(&self, side: Side) -> Path {
        let mut p = self.clone();
        p.push(side);
        p
    }

    pub fn concat(&self, other: &Path) -> Path {
        let mut p = self.clone();
        for s in other.iter() {
            p.push(s);
        }
        p
    }

    pub fn mirrored(&self) -> Path {
        self.iter().map(Side::flip).collect()
    }

    /// True when `self` is a prefix of `other` (the dyadic interval of
    /// `other` lies inside that of `self`).
    pub fn is_prefix_of(&self, other: &Path) -> bool {
        self.len <= other.len && self.first_difference(other).is_none_or(|i| i >= self.len())
    }

    /// Index of the first differing letter among the first
    /// `min(self.len, other.len)` letters.
    fn first_difference(&self, other: &Path) -> Option<usize> {
        let n = self.len().min(other.len());
        for (w, (a, b)) in self.words.iter().zip(other.words.iter()).enumerate() {
            let x = a ^ b;
            if x != 0 {
                let i = w * 64 + x.trailing_zeros() as usize;
                return (i < n).then_some(i);
            }
            if (w + 1) * 64 >= n {
                return None;
            }
        }
        None
    }

    /// `(m, d)` such that the dyadic interval is `[m / 2^d, (m + 1) / 2^d)`.
    /// Only meaningful for `d <= 127`.
    pub fn dyadic(&self) -> (u128, u32) {
        let m = self.iter().fold(0u128, |acc, s| (acc << 1) | u128::from(s == Side::R));
        (m, self.len)
    }
}

impl FromIterator<Side> for Path {
    fn from_iter<I: IntoIterator<Item = Side>>(iter: I) -> Self {
        let mut p = Path::empty();
        for s in iter {
            p.push(s);
        }
        p
    }
}

/// Interval order: by left endpoint, containing interval first.
impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.first_difference(other) {
            Some(i) => self.get(i).cmp(&other.get(i)),
            None => self.len.cmp(&other.len),
        }
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.iter() {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Path {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                'l' => Ok(Side::L),
                'r' => Ok(Side::R),
                _ => Err(ParseError::new(i, format!("expected 'l' or 'r', found {c:?}"))),
            })
            .collect()
    }
}

/// A key with a (possibly empty) suffix word: `k.t`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Leaf {
    pub key: u64,
    pub path: Path,
}

/// A vertex name in canonical form.
#[derive(Clone, Eq)]
pub enum Name {
    Leaf(Leaf),
    Join(Arc<(Name, Name)>),
}

impl PartialEq for Name {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Name::Leaf(a), Name::Leaf(b)) => a == b,
            (Name::Join(a), Name::Join(b)) => Arc::ptr_eq(a, b) || **a == **b,
            _ => false,
        }
    }
}

impl Hash for Name {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Name::Leaf(leaf) => {
                0u8.hash(state);
                leaf.hash(state);
            }
            Name::Join(parts) => {
                1u8.hash(state);
                parts.0.hash(state);
                parts.1.hash(state);
            }
        }
    }
}

impl Name {
    pub fn key(key: u64) -> Name {
        Name::Leaf(Leaf { key, path: Path::empty() })
    }

    pub fn leaf(key: u64, path: Path) -> Name {
        Name::Leaf(Leaf { key, path })
    }

    pub fn is_join(&self) -> bool {
        matches!(self, Name::Join(_))
    }

    /// Canonical form of `self.side`. A join collapses to its component.
    pub fn child(&self, side: Side) -> Name {
        match self {
            Name::Leaf(leaf) => Name::Leaf(Leaf { key: leaf.key, path: leaf.path.with(side) }),
            Name::Join(parts) => match side {
                Side::L => parts.0.clone(),
                Side::R => parts.1.clone(),
            },
        }
    }

    /// Canonical form of `self.t` for a whole word `t`.
    pub fn descend(&self, path: &Path) -> Name {
        let mut cur = self.clone();
        for (i, side) in path.iter().enumerate() {
            if let Name::Leaf(leaf) = &cur {
                let mut rest = leaf.path.clone();
                for s in path.iter().skip(i) {
                    rest.push(s);
                }
                return Name::leaf(leaf.key, rest);
            }
            cur = cur.child(side);
        }
        cur
    }

    /// Canonical form of `self v other`. Only `w.tl v w.tr` collapses (to
    /// `w.t`); the mirrored order `w.tr v w.tl` does not.
    pub fn join(&self, other: &Name) -> Name {
        if let (Name::Leaf(a), Name::Leaf(b)) = (self, other) {
            if a.key == b.key
                && a.path.len() == b.path.len()
                && a.path.last() == Some(Side::L)
                && b.path.last() == Some(Side::R)
            {
                let n = a.path.len() - 1;
                if (0..n).all(|i| a.path.get(i) == b.path.get(i)) {
                    let mut p = a.path.clone();
                    p.pop();
                    return Name::leaf(a.key, p);
                }
            }
        }
        Name::Join(Arc::new((self.clone(), other.clone())))
    }

    /// Swaps `l`/`r` everywhere, including the order of join components.
    /// An involution; keys are fixed.
    pub fn mirror(&self) -> Name {
        match self {
            Name::Leaf(leaf) => Name::leaf(leaf.key, leaf.path.mirrored()),
            Name::Join(parts) => parts.1.mirror().join(&parts.0.mirror()),
        }
    }

    /// Key reached by always descending into the left component.
    pub fn leftmost_key(&self) -> u64 {
        let mut cur = self;
        loop {
            match cur {
                Name::Leaf(leaf) => return leaf.key,
                Name::Join(parts) => cur = &parts.0,
            }
        }
    }

    /// Visits every leaf `k.t` of the join tree, left to right.
    pub fn for_each_leaf<'a>(&'a self, f: &mut impl FnMut(&'a Leaf)) {
        match self {
            Name::Leaf(leaf) => f(leaf),
            Name::Join(parts) => {
                parts.0.for_each_leaf(f);
                parts.1.for_each_leaf(f);
            }
        }
    }

    pub fn leaves(&self) -> Vec<&Leaf> {
        let mut out = Vec::new();
        self.for_each_leaf(&mut |l| out.push(l));
        out
    }

    pub fn interval_set(&self) -> IntervalSet {
        let mut set = IntervalSet::default();
        self.for_each_leaf(&mut |l| set.insert(l.key, l.path.clone()));
        set
    }

    /// True iff some descendant `self.t` equals some descendant `other.t'`.
    pub fn shares_descendant(&self, other: &Name) -> bool {
        self.interval_set().overlaps(&other.interval_set())
    }

    /// Number of leaves plus joins.
    pub fn size(&self) -> usize {
        match self {
            Name::Leaf(_) => 1,
            Name::Join(parts) => 1 + parts.0.size() + parts.1.size(),
        }
    }

    pub fn to_term(&self) -> Term {
        match self {
            Name::Leaf(leaf) if leaf.path.is_empty() => Term::Key(leaf.key),
            Name::Leaf(leaf) => Term::Suffix(Box::new(Term::Key(leaf.key)), leaf.path.clone()),
            Name::Join(parts) => Term::Join(Box::new(parts.0.to_term()), Box::new(parts.1.to_term())),
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Name::Leaf(leaf) if leaf.path.is_empty() => write!(f, "{}", leaf.key),
            Name::Leaf(leaf) => write!(f, "{}.{}", leaf.key, leaf.path),
            Name::Join(parts) => write!(f, "({}v{})", parts.0, parts.1),
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Name {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(normalize(&s.parse::<Term>()?))
    }
}

/// What a vertex carries as its identity. Steps only need these operations,
/// so they run unchanged on [`Name`]s or on [`Anon`] vertices.
pub trait Label: Clone + PartialEq + fmt::Display + fmt::Debug {
    fn child(&self, side: Side) -> Self;
    fn join(&self, other: &Self) -> Self;
    fn descend(&self, path: &Path) -> Self;
    fn mirror(&self) -> Self;
    fn leftmost_key(&self) -> Option<u64>;
    /// Every leaf `k.t` of the name; nothing for anonymous vertices.
    fn visit_leaves<'a>(&'a self, f: &mut dyn FnMut(&'a Leaf));
}

impl Label for Name {
    fn child(&self, side: Side) -> Self {
        Name::child(self, side)
    }

    fn join(&self, other: &Self) -> Self {
        Name::join(self, other)
    }

    fn descend(&self, path: &Path) -> Self {
        Name::descend(self, path)
    }

    fn mirror(&self) -> Self {
        Name::mirror(self)
    }

    fn leftmost_key(&self) -> Option<u64> {
        Some(Name::leftmost_key(self))
    }

    fn visit_leaves<'a>(&'a self, f: &mut dyn FnMut(&'a Leaf)) {
        self.for_each_leaf(&mut |l| f(l));
    }
}

/// No identity at all: configurations compared up to renaming. Much cheaper
/// for long runs that only look at bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Anon;

impl fmt::Display for Anon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_")
    }
}

impl Label for Anon {
    fn child(&self, _: Side) -> Self {
        Anon
    }

    fn join(&self, _: &Self) -> Self {
        Anon
    }

    fn descend(&self, _: &Path) -> Self {
        Anon
    }

    fn mirror(&self) -> Self {
        Anon
    }

    fn leftmost_key(&self) -> Option<u64> {
        None
    }

    fn visit_leaves<'a>(&'a self, _: &mut dyn FnMut(&'a Leaf)) {}
}

/// A term over the grammar `c | u.t | (u v w)`, not necessarily canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Key(u64),
    Suffix(Box<Term>, Path),
    Join(Box<Term>, Box<Term>),
}

impl Term {
    pub fn suffix(self, path: &str) -> Term {
        Term::Suffix(Box::new(self), path.parse().expect("path over {l, r}"))
    }

    pub fn join(self, other: Term) -> Term {
        Term::Join(Box::new(self), Box::new(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Key(k) => write!(f, "{k}"),
            Term::Suffix(base, path) if path.is_empty() => write!(f, "{base}."),
            Term::Suffix(base, path) => write!(f, "{base}.{path}"),
            Term::Join(a, b) => write!(f, "({a}v{b})"),
        }
    }
}

/// Canonical form of an arbitrary term.
pub fn normalize(term: &Term) -> Name {
    match term {
        Term::Key(k) => Name::key(*k),
        Term::Suffix(base, path) => normalize(base).descend(path),
        Term::Join(a, b) => normalize(a).join(&normalize(b)),
    }
}

impl FromStr for Term {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = TermParser { src: s.as_bytes(), pos: 0 };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input after name"));
        }
        Ok(t)
    }
}

struct TermParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl TermParser<'_> {
    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.pos, msg)
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut t = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let a = self.term()?;
                if self.peek() != Some(b'v') {
                    return Err(self.error("expected 'v' inside join"));
                }
                self.pos += 1;
                let b = self.term()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')' closing join"));
                }
                self.pos += 1;
                Term::Join(Box::new(a), Box::new(b))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                let key = digits.parse::<u64>().map_err(|e| ParseError::new(start, format!("bad key: {e}")))?;
                Term::Key(key)
            }
            Some(c) => return Err(self.error(format!("unexpected {:?}", c as char))),
            None => return Err(self.error("unexpected end of name")),
        };
        while self.peek() == Some(b'.') {
            self.pos += 1;
            let start = self.pos;
            let mut path = Path::empty();
            while let Some(&c) = self.src.get(self.pos) {
                match c {
                    b'l' => path.push(Side::L),
                    b'r' => path.push(Side::R),
                    _ => break,
                }
                self.pos += 1;
            }
            if path.is_empty() {
                return Err(ParseError::new(start, "expected a nonempty word over {l, r} after '.'"));
            }
            t = Term::Suffix(Box::new(t), path);
        }
        Ok(t)
    }
}

/// Dyadic subintervals of `[0, 1)` per key, each written as the suffix word
/// that selects it (`l` = left half, `r` = right half).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalSet {
    by_key: BTreeMap<u64, Vec<Path>>,
}

impl IntervalSet {
    pub fn insert(&mut self, key: u64, path: Path) {
        let v = self.by_key.entry(key).or_default();
        if let Err(i) = v.binary_search(&path) {
            v.insert(i, path);
        }
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = self.clone();
        for (k, paths) in &other.by_key {
            for p in paths {
                out.insert(*k, p.clone());
            }
        }
        out
    }

    pub fn overlaps(&self, other: &IntervalSet) -> bool {
        self.by_key.iter().any(|(k, mine)| {
            other.by_key.get(k).is_some_and(|theirs| {
                mine.iter().any(|p| theirs.iter().any(|q| p.is_prefix_of(q) || q.is_prefix_of(p)))
            })
        })
    }

    /// Total measure covered, summed over keys (intervals assumed disjoint).
    pub fn measure(&self) -> f64 {
        self.by_key.values().flatten().map(|p| 0.5f64.powi(p.len() as i32)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Path)> {
        self.by_key.iter().flat_map(|(k, v)| v.iter().map(move |p| (*k, p)))
    }

    pub fn keys(&self) -> impl Iterator<Item = u64> + '_ {
        self.by_key.keys().copied()
    }

    /// Intervals as exact `(key, m, d)` triples meaning `[m/2^d, (m+1)/2^d)`.
    pub fn dyadic(&self) -> Vec<(u64, u128, u32)> {
        self.iter()
            .map(|(k, p)| {
                let (m, d) = p.dyadic();
                (k, m, d)
            })
            .collect()
    }
}
