//! Exhaustive and sampled certification of steps: bijectivity, time symmetry
//! and conservation laws.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Configuration;
use crate::observables::{energy, particle_count, Energy, Port};
use crate::steps::{apply_step, Dynamics, Rules, Step, StepKind};

/// Upper limit on enumerated states.
pub const STATE_BUDGET: u128 = 10_000_000;

const MAX_COUNTEREXAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub kind: String,
    pub configs: Vec<String>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertReport {
    pub subject: String,
    pub domain: String,
    pub checked: u64,
    pub verdict: Verdict,
    pub counterexamples: Vec<Counterexample>,
}

impl CertReport {
    fn new(subject: impl Into<String>, domain: impl Into<String>) -> Self {
        Self {
            subject: subject.into(),
            domain: domain.into(),
            checked: 0,
            verdict: Verdict::Pass,
            counterexamples: Vec::new(),
        }
    }

    fn fail(&mut self, kind: &str, configs: &[&Configuration], detail: impl Into<String>) {
        self.verdict = Verdict::Fail;
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(Counterexample {
                kind: kind.to_string(),
                configs: configs.iter().map(|c| c.to_string()).collect(),
                detail: detail.into(),
            });
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for CertReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        };
        writeln!(f, "{verdict} {} over {} ({} cases)", self.subject, self.domain, self.checked)?;
        for c in &self.counterexamples {
            writeln!(f, "  {}: {}", c.kind, c.detail)?;
            for x in &c.configs {
                writeln!(f, "    {x}")?;
            }
        }
        Ok(())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Number of circles of length `k` over `q` states up to rotation.
pub fn necklace_count(k: usize, q: u128) -> u128 {
    let total: u128 = (1..=k).map(|i| q.pow(gcd(i, k) as u32)).sum();
    total / k as u128
}

/// States per vertex on `layers` layers.
fn alphabet(layers: usize) -> u128 {
    1u128 << (2 * layers)
}

pub fn state_count(max_size: usize, layers: usize, canonical: bool) -> u128 {
    let q = alphabet(layers);
    (1..=max_size)
        .map(|k| if canonical { necklace_count(k, q) } else { q.saturating_pow(k as u32) })
        .fold(0u128, u128::saturating_add)
}

/// Calls `f` with every sequence of length `k` over `0..q` that is the least
/// of its rotations (Fredricksen-Kessler-Maiorana).
fn for_each_necklace(k: usize, q: u32, f: &mut impl FnMut(&[u32])) {
    let mut a = vec![0u32; k + 1];
    f(&a[1..]);
    loop {
        let mut i = k;
        while i > 0 && a[i] == q - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        a[i] += 1;
        for j in i + 1..=k {
            a[j] = a[j - i];
        }
        if k.is_multiple_of(i) {
            f(&a[1..]);
        }
    }
}

fn for_each_word(k: usize, q: u32, f: &mut impl FnMut(&[u32])) {
    let mut a = vec![0u32; k];
    loop {
        f(&a);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            a[i] += 1;
            if a[i] < q {
                break;
            }
            a[i] = 0;
        }
    }
}

fn full_alphabet(layers: usize) -> Vec<(u8, u8)> {
    let m = (1u16 << layers) as u8;
    (0..m).flat_map(|b| (0..m).map(move |a| (a, b))).collect()
}

/// Per-vertex states for checking `I3` with layers 1-2 folded to "empty" or
/// "occupied". `I3` never modifies a vertex holding layer-1/2 bits and only
/// tests whether such bits are present, so one occupied representative per
/// layer-3 state covers every occupied content.
pub fn i3_folded_alphabet() -> Vec<(u8, u8)> {
    let mut out = Vec::new();
    for occupied in [0u8, 1] {
        for b3 in [0u8, 4] {
            for a3 in [0u8, 4] {
                out.push((a3 | occupied, b3));
            }
        }
    }
    out
}

fn decode(word: &[u32], alphabet: &[(u8, u8)], layers: usize) -> Configuration {
    let bits: Vec<(u8, u8)> = word.iter().map(|&s| alphabet[s as usize]).collect();
    Configuration::fresh(layers, &bits)
}

/// Every circle with fresh keys of size `1..=max_size`, one per rotation
/// class when `canonical`.
pub fn enumerate(max_size: usize, layers: usize, canonical: bool, f: impl FnMut(Configuration)) -> Result<()> {
    enumerate_over(max_size, layers, &full_alphabet(layers), canonical, f)
}

/// As [`enumerate`], with vertex states drawn from `alphabet`.
pub fn enumerate_over(
    max_size: usize,
    layers: usize,
    alphabet: &[(u8, u8)],
    canonical: bool,
    mut f: impl FnMut(Configuration),
) -> Result<()> {
    let q = alphabet.len() as u128;
    let states = (1..=max_size)
        .map(|k| if canonical { necklace_count(k, q) } else { q.saturating_pow(k as u32) })
        .fold(0u128, u128::saturating_add);
    if states > STATE_BUDGET {
        return Err(Error::EnumerationBudget { states, budget: STATE_BUDGET });
    }
    for k in 1..=max_size {
        let mut emit = |w: &[u32]| f(decode(w, alphabet, layers));
        if canonical {
            for_each_necklace(k, q as u32, &mut emit);
        } else {
            for_each_word(k, q as u32, &mut emit);
        }
    }
    Ok(())
}

fn bit_key(c: &Configuration) -> Vec<u8> {
    let (_, bits) = c.bit_key();
    bits.iter().flat_map(|b| b.to_le_bytes()).collect()
}

/// Image key for the non-canonical check: the named graph listed from its
/// least vertex name.
fn named_key(c: &Configuration) -> Vec<u8> {
    let names: Vec<String> = c.vertices().iter().map(|v| v.name.to_string()).collect();
    let start = (0..names.len()).min_by(|&i, &j| names[i].cmp(&names[j])).unwrap_or(0);
    c.rotated(start).to_string().into_bytes()
}

/// Applies `d` once, enumerates its domain and checks that no two inputs
/// share an image, that every image is valid and that the inverse maps each
/// image back to its input exactly.
pub fn check_bijective(
    d: &Dynamics,
    max_size: usize,
    layers: usize,
    rules: &Rules,
    canonical: bool,
) -> Result<CertReport> {
    check_bijective_over(d, max_size, layers, &full_alphabet(layers), rules, canonical)
}

/// As [`check_bijective`], over circles whose vertex states come from `alphabet`.
pub fn check_bijective_over(
    d: &Dynamics,
    max_size: usize,
    layers: usize,
    alphabet: &[(u8, u8)],
    rules: &Rules,
    canonical: bool,
) -> Result<CertReport> {
    d.check_layers(layers)?;
    let full = alphabet.len() == 1 << (2 * layers);
    let domain = format!(
        "all circles of size 1..={max_size} on {layers} layer(s){}{}",
        if full { String::new() } else { format!(" over {} vertex states", alphabet.len()) },
        if canonical { ", up to rotation" } else { "" }
    );
    let mut report = CertReport::new(d.to_string(), domain);
    let inv = d.inverse();
    // Image key -> input bits, kept compact for large enumerations.
    let mut seen: HashMap<Vec<u8>, Vec<(u8, u8)>> = HashMap::new();
    enumerate_over(max_size, layers, alphabet, canonical, |x| {
        report.checked += 1;
        let y = d.step(&x, rules);
        if !y.is_valid() {
            report.fail("invalid image", &[&x, &y], "image violates name disjointness");
        }
        let back = inv.step(&y, rules);
        if back != x {
            report.fail("inverse", &[&x, &y, &back], "inverse does not restore the input");
        }
        let key = if canonical { bit_key(&y) } else { named_key(&y) };
        if let Some(prev) = seen.get(&key) {
            let prev = Configuration::fresh(layers, prev);
            report.fail("collision", &[&prev, &x, &y], "two inputs share an image");
        } else {
            seen.insert(key, x.vertices().iter().map(|v| (v.a, v.b)).collect());
        }
    })?;
    Ok(report)
}

pub fn check_step_bijective(kind: StepKind, max_size: usize, layers: usize, rules: &Rules) -> Result<CertReport> {
    check_bijective(&Dynamics::new(vec![Step::new(kind)]), max_size, layers, rules, true)
}

/// Checks `t t = id` and `(t f t) f = id` on every sample, comparing bits up
/// to rotation (and reflection when allowed).
pub fn check_time_symmetry(
    f: &Dynamics,
    t: &Dynamics,
    sample: &[Configuration],
    rules: &Rules,
    allow_reflection: bool,
) -> CertReport {
    let mut report = CertReport::new(
        format!("time symmetry of {f} under {}", if t.steps().is_empty() { "id".into() } else { t.to_string() }),
        format!("{} sample configurations", sample.len()),
    );
    for x in sample {
        report.checked += 1;
        let tt = t.step(&t.step(x, rules), rules);
        if !x.obs_equal_with(&tt, allow_reflection) {
            report.fail("involution", &[x, &tt], "T T differs from the identity");
            continue;
        }
        let fx = f.step(x, rules);
        let back = t.step(&f.step(&t.step(&fx, rules), rules), rules);
        if !x.obs_equal_with(&back, allow_reflection) {
            report.fail("reversal", &[x, &back], "T f T f differs from the identity");
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    E,
    EPrime,
    Particles,
}

fn quantity(x: &Configuration, q: Quantity) -> Result<i64> {
    Ok(match q {
        Quantity::E => energy(x, Energy::E)?,
        Quantity::EPrime => energy(x, Energy::EPrime)?,
        Quantity::Particles => particle_count(x, None, Port::Both) as i64,
    })
}

/// Tracks `q` along `steps` applications of `d`. When `q` is `E` and the
/// last step applied is `sqrt_tau`, the configuration just before it must
/// carry the same value of `E'`.
pub fn check_conservation(
    x: &Configuration,
    d: &Dynamics,
    steps: usize,
    q: Quantity,
    rules: &Rules,
) -> Result<CertReport> {
    d.check_layers(x.layers())?;
    let mut report = CertReport::new(
        format!("conservation of {q:?} under {d}"),
        format!("{steps} steps from a size-{} configuration", x.len()),
    );
    let start = quantity(x, q)?;
    let half = q == Quantity::E && d.steps().first() == Some(&Step::new(StepKind::SqrtTau));
    let mut cur = x.clone();
    for n in 1..=steps {
        report.checked += 1;
        let mut next = cur.clone();
        for (i, &s) in d.steps().iter().enumerate().rev() {
            if i == 0 && half {
                let e = energy(&next, Energy::EPrime)?;
                if e != start {
                    report.fail("half step", &[&cur], format!("step {n}: E' = {e} before sqrt_tau, expected {start}"));
                    return Ok(report);
                }
            }
            next = apply_step(&next, s, rules);
        }
        let v = quantity(&next, q)?;
        if v != start {
            report.fail("drift", &[&cur, &next], format!("step {n}: {q:?} = {v}, expected {start}"));
            return Ok(report);
        }
        cur = next;
    }
    Ok(report)
}

/// Exhaustively checks `E'(D X) = E(X)` and `E(sqrt_tau Y) = E'(Y)` on
/// two-layer circles of size up to `max_size`.
fn energy_case(x: &Configuration, d: &Dynamics, rules: &Rules, report: &mut CertReport) -> Result<()> {
    let e = energy(x, Energy::E)?;
    let y = d.step(x, rules);
    let ep = energy(&y, Energy::EPrime)?;
    if ep != e {
        report.fail("D", &[x, &y], format!("E = {e}, E'(D X) = {ep}"));
    }
    let epx = energy(x, Energy::EPrime)?;
    let z = crate::steps::sqrt_tau(x, rules.drift);
    let ez = energy(&z, Energy::E)?;
    if ez != epx {
        report.fail("sqrt_tau", &[x, &z], format!("E'(Y) = {epx}, E(sqrt_tau Y) = {ez}"));
    }
    Ok(())
}

pub fn check_energy_laws(max_size: usize, rules: &Rules) -> Result<CertReport> {
    let d: Dynamics = Dynamics::of(&[StepKind::Dl, StepKind::Dr]);
    let mut report = CertReport::new(
        "E'(D X) = E(X) and E(sqrt_tau Y) = E'(Y)",
        format!("all two-layer circles of size 1..={max_size}, up to rotation"),
    );
    let mut result = Ok(());
    enumerate(max_size, 2, true, |x| {
        if result.is_err() {
            return;
        }
        report.checked += 1;
        result = energy_case(&x, &d, rules, &mut report);
    })?;
    result?;
    Ok(report)
}
