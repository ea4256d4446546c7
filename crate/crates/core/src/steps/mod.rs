//! Local reversible dynamics on circles and their composition.

mod ie;
mod inelastic;
mod shift;
mod split_merge;

use std::fmt;
use std::str::FromStr;

pub use ie::step_ie;
pub use inelastic::{step_d, Entry, Guard, Local, RuleTable, Side as ClumpSide};
pub use shift::{sqrt_tau, sqrt_tau_inv, tau, tau_inv, Drift};
pub use split_merge::{step_i, step_i2, step_i3};

use crate::error::{Error, ParseError, Result};
use crate::graph::{Configuration, Vertex};
use crate::names::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StepKind {
    SqrtTau,
    Tau,
    I,
    I2,
    I3,
    Ie,
    F,
    T,
    R,
    Dr,
    Dl,
}

impl StepKind {
    pub const ALL: [StepKind; 11] = [
        StepKind::SqrtTau,
        StepKind::Tau,
        StepKind::I,
        StepKind::I2,
        StepKind::I3,
        StepKind::Ie,
        StepKind::F,
        StepKind::T,
        StepKind::R,
        StepKind::Dr,
        StepKind::Dl,
    ];

    pub fn token(self) -> &'static str {
        match self {
            StepKind::SqrtTau => "sqrt_tau",
            StepKind::Tau => "tau",
            StepKind::I => "I",
            StepKind::I2 => "I2",
            StepKind::I3 => "I3",
            StepKind::Ie => "Ie",
            StepKind::F => "F",
            StepKind::T => "T",
            StepKind::R => "R",
            StepKind::Dr => "Dr",
            StepKind::Dl => "Dl",
        }
    }

    pub fn min_layers(self) -> usize {
        match self {
            StepKind::I2 | StepKind::R | StepKind::Dr | StepKind::Dl => 2,
            StepKind::I3 => 3,
            _ => 1,
        }
    }

    pub fn is_involution(self) -> bool {
        !matches!(self, StepKind::SqrtTau | StepKind::Tau | StepKind::Dr | StepKind::Dl)
    }
}

/// A step kind, possibly inverted. Inverting an involution is a no-op.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub kind: StepKind,
    pub inverse: bool,
}

impl Step {
    pub fn new(kind: StepKind) -> Self {
        Self { kind, inverse: false }
    }

    pub fn inverse(self) -> Self {
        if self.kind.is_involution() {
            self
        } else {
            Self { kind: self.kind, inverse: !self.inverse }
        }
    }
}

impl From<StepKind> for Step {
    fn from(kind: StepKind) -> Self {
        Step::new(kind)
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.token(), if self.inverse { "^-1" } else { "" })
    }
}

/// Model conventions shared by all steps of a run.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Rules {
    pub drift: Drift,
    pub table: RuleTable,
    /// `I3` also requires the two flanking vertices to be free of layers 1-2.
    pub i3_flanks: bool,
}

/// Time reversal: exchange the two ports of every vertex.
pub fn step_t<L: Label>(x: &Configuration<L>) -> Configuration<L> {
    map_vertices(x, |v| (v.b, v.a))
}

/// Complement every bit.
pub fn step_f<L: Label>(x: &Configuration<L>) -> Configuration<L> {
    let m = x.layer_mask();
    map_vertices(x, |v| (!v.a & m, !v.b & m))
}

/// Exchange `a1 <-> b2` and `a2 <-> b1` on every vertex.
pub fn step_r<L: Label>(x: &Configuration<L>) -> Configuration<L> {
    map_vertices(x, |v| {
        let a = (v.a & !0b11) | (v.b >> 1 & 1) | (v.b & 1) << 1;
        let b = (v.b & !0b11) | (v.a >> 1 & 1) | (v.a & 1) << 1;
        (a, b)
    })
}

fn map_vertices<L: Label>(x: &Configuration<L>, f: impl Fn(&Vertex<L>) -> (u8, u8)) -> Configuration<L> {
    let out = x
        .vertices()
        .iter()
        .map(|v| {
            let (a, b) = f(v);
            Vertex::new(v.name.clone(), a, b)
        })
        .collect();
    Configuration::from_parts(x.layers(), out)
}

/// Applies one step. The caller guarantees the layer requirement.
pub fn apply_step<L: Label>(x: &Configuration<L>, step: Step, rules: &Rules) -> Configuration<L> {
    use StepKind::*;
    match (step.kind, step.inverse) {
        (SqrtTau, false) => sqrt_tau(x, rules.drift),
        (SqrtTau, true) => sqrt_tau_inv(x, rules.drift),
        (Tau, false) => tau(x, rules.drift),
        (Tau, true) => tau_inv(x, rules.drift),
        (I, _) => step_i(x),
        (I2, _) => step_i2(x),
        (I3, _) => step_i3(x, rules.i3_flanks),
        (Ie, _) => step_ie(x),
        (F, _) => step_f(x),
        (T, _) => step_t(x),
        (R, _) => step_r(x),
        (Dr, inv) => step_d(x, &rules.table, ClumpSide::Right, inv),
        (Dl, inv) => step_d(x, &rules.table, ClumpSide::Left, inv),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Forward,
    Backward,
}

/// A composition of steps written in operator order: the rightmost step acts
/// first, so `sqrt_tau,I` applies `I` and then `sqrt_tau`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dynamics {
    steps: Vec<Step>,
}

impl Dynamics {
    pub fn new(steps: Vec<Step>) -> Self {
        Self { steps }
    }

    pub fn of(kinds: &[StepKind]) -> Self {
        Self { steps: kinds.iter().map(|&k| Step::new(k)).collect() }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn inverse(&self) -> Self {
        Self { steps: self.steps.iter().rev().map(|s| s.inverse()).collect() }
    }

    pub fn directed(&self, direction: Direction) -> Self {
        match direction {
            Direction::Forward => self.clone(),
            Direction::Backward => self.inverse(),
        }
    }

    pub fn min_layers(&self) -> usize {
        self.steps.iter().map(|s| s.kind.min_layers()).max().unwrap_or(1)
    }

    pub fn check_layers(&self, layers: usize) -> Result<()> {
        match self.steps.iter().find(|s| s.kind.min_layers() > layers) {
            Some(s) => {
                Err(Error::Layers { step: s.kind.token().to_string(), required: s.kind.min_layers(), actual: layers })
            }
            None => Ok(()),
        }
    }

    /// One application of the whole composition.
    pub fn step<L: Label>(&self, x: &Configuration<L>, rules: &Rules) -> Configuration<L> {
        let mut cur = x.clone();
        for &s in self.steps.iter().rev() {
            cur = apply_step(&cur, s, rules);
        }
        cur
    }

    /// `count` applications.
    pub fn apply<L: Label>(&self, x: &Configuration<L>, count: usize, rules: &Rules) -> Result<Configuration<L>> {
        self.check_layers(x.layers())?;
        let mut cur = x.clone();
        for _ in 0..count {
            cur = self.step(&cur, rules);
        }
        Ok(cur)
    }
}

impl fmt::Display for Dynamics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Step {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let (body, inverse) = match s.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (s, false),
        };
        let kind = StepKind::ALL
            .into_iter()
            .find(|k| k.token() == body)
            .ok_or_else(|| ParseError::new(0, format!("unknown step '{body}'")))?;
        let step = Step::new(kind);
        Ok(if inverse { step.inverse() } else { step })
    }
}

impl FromStr for Dynamics {
    type Err = ParseError;

    /// Comma-separated tokens; `D` stands for `Dl,Dr`.
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let mut steps = Vec::new();
        let mut pos = 0;
        for raw in s.split(',') {
            let tok = raw.trim();
            let at = pos + (raw.len() - raw.trim_start().len());
            match tok {
                "" => return Err(ParseError::new(at, "empty step token")),
                "D" => steps.extend([Step::new(StepKind::Dl), Step::new(StepKind::Dr)]),
                "D^-1" => steps.extend([Step::new(StepKind::Dr).inverse(), Step::new(StepKind::Dl).inverse()]),
                _ => steps.push(tok.parse().map_err(|e: ParseError| ParseError::new(at, e.message))?),
            }
            pos += raw.len() + 1;
        }
        Ok(Self { steps })
    }
}
