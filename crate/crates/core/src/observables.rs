//! Scalar measurements: particle counts, entropies, energy, merger census.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, ParseError, Result};
use crate::graph::{Configuration, Vertex};
use crate::names::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Port {
    Both,
    A,
    B,
}

/// Set bits on `layer` (all layers when `None`) and `port`.
pub fn particle_count<L: Label>(x: &Configuration<L>, layer: Option<usize>, port: Port) -> u64 {
    let mask = match layer {
        Some(l) => 1u8 << (l - 1),
        None => x.layer_mask(),
    };
    x.vertices()
        .iter()
        .map(|v| {
            let a = (v.a & mask).count_ones();
            let b = (v.b & mask).count_ones();
            u64::from(match port {
                Port::Both => a + b,
                Port::A => a,
                Port::B => b,
            })
        })
        .sum()
}

/// How microstates of a region with `m` vertices and `p` particles are
/// counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyVariant {
    /// `ln C(2 n m, p)`: every port-layer slot is a place for a particle.
    #[default]
    Slots,
    /// `ln C(m, p)`: one place per vertex; undefined when `p > m`.
    Literal,
}

impl FromStr for EntropyVariant {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        match s {
            "slots" => Ok(Self::Slots),
            "literal" => Ok(Self::Literal),
            _ => Err(ParseError::new(0, format!("unknown entropy variant '{s}'"))),
        }
    }
}

/// Entropy of a region of `m` vertices holding `p` particles.
pub fn region_entropy(layers: usize, m: usize, p: u64, variant: EntropyVariant) -> Result<f64> {
    let places = match variant {
        EntropyVariant::Slots => 2 * layers as u64 * m as u64,
        EntropyVariant::Literal => m as u64,
    };
    if p > places {
        return Err(Error::Domain(format!("{p} particles do not fit in {places} places ({variant:?} entropy)")));
    }
    if p == 0 || p == places {
        return Ok(0.0);
    }
    Ok(ln_binomial(places, p))
}

pub fn entropy_global<L: Label>(x: &Configuration<L>, variant: EntropyVariant) -> Result<f64> {
    region_entropy(x.layers(), x.len(), x.particles(), variant)
}

/// Window entropies for every center, in index order.
pub fn window_entropies<L: Label>(x: &Configuration<L>, r: usize, variant: EntropyVariant) -> Result<Vec<f64>> {
    let k = x.len();
    let counts: Vec<u64> = x.vertices().iter().map(|v| u64::from(v.particles())).collect();
    if 2 * r + 1 >= k {
        let s = entropy_global(x, variant)?;
        return Ok(vec![s; k]);
    }
    // Prefix sums over the doubled circle.
    let mut pre = Vec::with_capacity(2 * k + 1);
    pre.push(0u64);
    for i in 0..2 * k {
        pre.push(pre[i] + counts[i % k]);
    }
    let w = 2 * r + 1;
    (0..k)
        .map(|c| {
            let start = (c + k - r) % k;
            let p = pre[start + w] - pre[start];
            region_entropy(x.layers(), w, p, variant)
        })
        .collect()
}

/// Sum of window entropies of radius `r` over all centers.
pub fn entropy_local_sum<L: Label>(x: &Configuration<L>, r: usize, variant: EntropyVariant) -> Result<f64> {
    Ok(window_entropies(x, r, variant)?.iter().sum())
}

/// Average window entropy of radius `r`.
pub fn entropy_local_avg<L: Label>(x: &Configuration<L>, r: usize, variant: EntropyVariant) -> Result<f64> {
    Ok(entropy_local_sum(x, r, variant)? / x.len() as f64)
}

/// Radius `ceil(rho * |V|)`.
pub fn variable_radius<L: Label>(x: &Configuration<L>, rho: f64) -> usize {
    (rho * x.len() as f64).ceil() as usize
}

pub fn entropy_variable_radius<L: Label>(x: &Configuration<L>, rho: f64, variant: EntropyVariant) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!("radius fraction {rho} outside [0, 1]")));
    }
    entropy_local_avg(x, variable_radius(x, rho), variant)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NameNorm {
    /// Divide by the number of vertices.
    #[default]
    PerVertex,
    /// Divide by the number of parts.
    PerPart,
}

/// Entropy of the parts obtained by grouping vertices by the leftmost key of
/// their names.
pub fn entropy_name_local<L: Label>(x: &Configuration<L>, variant: EntropyVariant, norm: NameNorm) -> Result<f64> {
    let mut parts: BTreeMap<u64, (usize, u64)> = BTreeMap::new();
    for v in x.vertices() {
        let key =
            v.name.leftmost_key().ok_or_else(|| Error::Domain("name-local entropy needs named vertices".into()))?;
        let e = parts.entry(key).or_default();
        e.0 += 1;
        e.1 += u64::from(v.particles());
    }
    let mut total = 0.0;
    for &(m, p) in parts.values() {
        total += region_entropy(x.layers(), m, p, variant)?;
    }
    let denom = match norm {
        NameNorm::PerVertex => x.len(),
        NameNorm::PerPart => parts.len(),
    };
    Ok(total / denom as f64)
}

/// The provable bound `(2r + 1) p ln(2n(2r + 1)) / |V|` on the average window
/// entropy.
pub fn local_entropy_bound<L: Label>(x: &Configuration<L>, r: usize) -> f64 {
    let w = (2 * r + 1) as f64;
    w * x.particles() as f64 * (2.0 * x.layers() as f64 * w).ln() / x.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Energy {
    E,
    EPrime,
}

fn clump<L: Label>(v: &Vertex<L>) -> i64 {
    i64::from(v.a & v.b & 1)
}

/// Matter particles facing a clump through the opposite port, minus
/// radiation particles. `EPrime` looks through the same port instead.
pub fn energy<L: Label>(x: &Configuration<L>, which: Energy) -> Result<i64> {
    if x.layers() < 2 {
        return Err(Error::Layers { step: "energy".into(), required: 2, actual: x.layers() });
    }
    let v = x.vertices();
    let k = v.len();
    let mut e = 0i64;
    for i in 0..k {
        let u = &v[i];
        let next = clump(&v[(i + 1) % k]);
        let prev = clump(&v[(i + k - 1) % k]);
        let (a1, b1) = (i64::from(u.a & 1), i64::from(u.b & 1));
        e += match which {
            Energy::E => a1 * next + b1 * prev,
            Energy::EPrime => a1 * prev + b1 * next,
        };
        e -= i64::from(u.a >> 1 & 1) + i64::from(u.b >> 1 & 1);
    }
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergerCensus {
    pub n_f: u64,
    pub d_f: Option<u64>,
}

/// Merger patterns on layer 1 and the distance from the closest one to a
/// particle travelling towards it.
///
/// A pattern is an adjacent pair `(u, v)`, `v` behind `u`'s port `b`, with
/// `a1(u) = b1(v) = 1` and `b1(u) = a1(v) = 0`. Port-`a` particles travel
/// towards lower indices and port-`b` particles towards higher ones, so a
/// pattern is approached by port-`a` particles from above and port-`b`
/// particles from below. The distance is the number of vertices strictly
/// between the particle and the pattern; the pattern's own particles count
/// once they have gone round the circle.
pub fn merger_census<L: Label>(x: &Configuration<L>) -> MergerCensus {
    let v = x.vertices();
    let k = v.len();
    let a1: Vec<bool> = v.iter().map(|w| w.a & 1 == 1).collect();
    let b1: Vec<bool> = v.iter().map(|w| w.b & 1 == 1).collect();
    let patterns: Vec<usize> = (0..k)
        .filter(|&i| {
            let j = (i + 1) % k;
            k > 1 && a1[i] && !b1[i] && !a1[j] && b1[j]
        })
        .collect();
    if patterns.is_empty() {
        return MergerCensus { n_f: 0, d_f: None };
    }
    // next_a[i]: steps from i up to the first port-a particle; prev_b likewise downwards.
    let far = u64::MAX;
    let mut next_a = vec![far; k];
    let mut run = far;
    for i in (0..2 * k).rev() {
        run = if a1[i % k] { 0 } else { run.saturating_add(1) };
        if i < k {
            next_a[i] = run;
        }
    }
    let mut prev_b = vec![far; k];
    run = far;
    for i in 0..2 * k {
        run = if b1[i % k] { 0 } else { run.saturating_add(1) };
        if i >= k {
            prev_b[i - k] = run;
        }
    }
    let d =
        patterns.iter().map(|&i| next_a[(i + 2) % k].min(prev_b[(i + k - 1) % k])).min().expect("at least one pattern");
    MergerCensus { n_f: patterns.len() as u64, d_f: Some(d) }
}

/// A named scalar that can be recorded along a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    Size,
    PTotal,
    PA,
    PB,
    PLayer(usize),
    SGlobal,
    SLocalAvg(usize),
    SLocalSum(usize),
    SVarRho(f64),
    SName,
    E,
    EPrime,
    NF,
    DF,
}

impl Observable {
    /// Key patterns, for help text.
    pub const KEYS: [&'static str; 14] = [
        "size",
        "p_total",
        "p_a",
        "p_b",
        "p_layer{j}",
        "S_global",
        "S_local_avg_r{r}",
        "S_local_sum_r{r}",
        "S_var_rho{rho}",
        "S_name",
        "E",
        "Eprime",
        "n_f",
        "d_f",
    ];

    pub fn min_layers(self) -> usize {
        match self {
            Observable::E | Observable::EPrime => 2,
            Observable::PLayer(j) => j,
            _ => 1,
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Size => write!(f, "size"),
            Observable::PTotal => write!(f, "p_total"),
            Observable::PA => write!(f, "p_a"),
            Observable::PB => write!(f, "p_b"),
            Observable::PLayer(j) => write!(f, "p_layer{j}"),
            Observable::SGlobal => write!(f, "S_global"),
            Observable::SLocalAvg(r) => write!(f, "S_local_avg_r{r}"),
            Observable::SLocalSum(r) => write!(f, "S_local_sum_r{r}"),
            Observable::SVarRho(rho) => write!(f, "S_var_rho{rho}"),
            Observable::SName => write!(f, "S_name"),
            Observable::E => write!(f, "E"),
            Observable::EPrime => write!(f, "Eprime"),
            Observable::NF => write!(f, "n_f"),
            Observable::DF => write!(f, "d_f"),
        }
    }
}

impl FromStr for Observable {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let bad = || ParseError::new(0, format!("unknown observable '{s}'"));
        let num = |rest: &str| rest.parse::<usize>().map_err(|_| bad());
        Ok(match s {
            "size" => Observable::Size,
            "p_total" => Observable::PTotal,
            "p_a" => Observable::PA,
            "p_b" => Observable::PB,
            "S_global" => Observable::SGlobal,
            "S_name" => Observable::SName,
            "E" => Observable::E,
            "Eprime" => Observable::EPrime,
            "n_f" => Observable::NF,
            "d_f" => Observable::DF,
            _ => {
                if let Some(j) = s.strip_prefix("p_layer") {
                    let j = num(j)?;
                    if j == 0 {
                        return Err(bad());
                    }
                    Observable::PLayer(j)
                } else if let Some(r) = s.strip_prefix("S_local_avg_r") {
                    Observable::SLocalAvg(num(r)?)
                } else if let Some(r) = s.strip_prefix("S_local_sum_r") {
                    Observable::SLocalSum(num(r)?)
                } else if let Some(rho) = s.strip_prefix("S_var_rho") {
                    let rho: f64 = rho.parse().map_err(|_| bad())?;
                    if !(0.0..=1.0).contains(&rho) {
                        return Err(bad());
                    }
                    Observable::SVarRho(rho)
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

/// Parses a comma-separated list of observable keys.
pub fn parse_keys(s: &str) -> Result<Vec<Observable>, ParseError> {
    s.split(',').map(|k| k.trim().parse()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Missing,
}

impl Value {
    pub fn as_f64(self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(i as f64),
            Value::Real(r) => Some(r),
            Value::Missing => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(r) => write!(f, "{r}"),
            Value::Missing => Ok(()),
        }
    }
}

/// Measurement settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Meter {
    pub variant: EntropyVariant,
    pub name_norm: NameNorm,
}

impl Meter {
    pub fn measure<L: Label>(&self, x: &Configuration<L>, o: Observable) -> Result<Value> {
        let int = |n: u64| Value::Int(n as i64);
        Ok(match o {
            Observable::Size => int(x.len() as u64),
            Observable::PTotal => int(x.particles()),
            Observable::PA => int(particle_count(x, None, Port::A)),
            Observable::PB => int(particle_count(x, None, Port::B)),
            Observable::PLayer(j) => {
                if j > x.layers() {
                    return Err(Error::Domain(format!("no layer {j} in a {}-layer configuration", x.layers())));
                }
                int(particle_count(x, Some(j), Port::Both))
            }
            Observable::SGlobal => Value::Real(entropy_global(x, self.variant)?),
            Observable::SLocalAvg(r) => Value::Real(entropy_local_avg(x, r, self.variant)?),
            Observable::SLocalSum(r) => Value::Real(entropy_local_sum(x, r, self.variant)?),
            Observable::SVarRho(rho) => Value::Real(entropy_variable_radius(x, rho, self.variant)?),
            Observable::SName => Value::Real(entropy_name_local(x, self.variant, self.name_norm)?),
            Observable::E => Value::Int(energy(x, Energy::E)?),
            Observable::EPrime => Value::Int(energy(x, Energy::EPrime)?),
            Observable::NF => int(merger_census(x).n_f),
            Observable::DF => merger_census(x).d_f.map_or(Value::Missing, int),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{random_config, Constraint};
    use crate::names::Name;

    const EPS: f64 = 1e-9;

    #[test]
    fn counts() {
        let x = Configuration::fresh(1, &[(1, 0), (1, 1)]);
        assert_eq!(particle_count(&x, None, Port::Both), 3);
        assert_eq!(particle_count(&x, None, Port::A), 2);
        assert_eq!(particle_count(&x, Some(1), Port::B), 1);
        assert_eq!(particle_count(&Configuration::fresh(2, &[(0, 0); 3]), None, Port::Both), 0);
    }

    #[test]
    fn global_entropy_examples() {
        let x = Configuration::fresh(1, &[(1, 0), (0, 1), (0, 0)]);
        assert!((entropy_global(&x, EntropyVariant::Literal).unwrap() - 3f64.ln()).abs() < EPS);
        assert!((entropy_global(&x, EntropyVariant::Slots).unwrap() - 15f64.ln()).abs() < EPS);
        let empty = Configuration::fresh(1, &[(0, 0); 3]);
        assert_eq!(entropy_global(&empty, EntropyVariant::Literal).unwrap(), 0.0);
        let crowded = Configuration::fresh(1, &[(1, 1), (1, 0)]);
        assert!(matches!(entropy_global(&crowded, EntropyVariant::Literal), Err(Error::Domain(_))));
    }

    #[test]
    fn local_entropy_examples() {
        let x = Configuration::fresh(1, &[(1, 0), (0, 0), (0, 0), (0, 0)]);
        let avg = entropy_local_avg(&x, 1, EntropyVariant::Slots).unwrap();
        assert!((avg - 3.0 * 6f64.ln() / 4.0).abs() < EPS);
        let sum = entropy_local_sum(&x, 1, EntropyVariant::Slots).unwrap();
        assert!((sum - 3.0 * 6f64.ln()).abs() < EPS);
        let small = Configuration::fresh(1, &[(1, 0), (0, 1), (0, 0)]);
        let g = entropy_global(&small, EntropyVariant::Slots).unwrap();
        assert!((entropy_local_avg(&small, 1, EntropyVariant::Slots).unwrap() - g).abs() < EPS);
        assert!((entropy_variable_radius(&small, 0.5, EntropyVariant::Slots).unwrap() - g).abs() < EPS);
    }

    #[test]
    fn name_local_entropy() {
        let x = Configuration::fresh(1, &[(1, 0), (0, 0), (0, 1)]);
        let single = entropy_local_avg(&x, 0, EntropyVariant::Slots).unwrap();
        let s = entropy_name_local(&x, EntropyVariant::Slots, NameNorm::PerVertex).unwrap();
        assert!((s - single).abs() < EPS);
        let split = Configuration::from_parts(
            1,
            vec![
                Vertex::new(Name::key(0), 0, 0),
                Vertex::new("1.l".parse().unwrap(), 1, 0),
                Vertex::new("1.r".parse().unwrap(), 0, 1),
                Vertex::new(Name::key(2), 0, 0),
            ],
        );
        let s = entropy_name_local(&split, EntropyVariant::Slots, NameNorm::PerVertex).unwrap();
        assert!((s - 6f64.ln() / 4.0).abs() < EPS);
        let s = entropy_name_local(&split, EntropyVariant::Slots, NameNorm::PerPart).unwrap();
        assert!((s - 6f64.ln() / 3.0).abs() < EPS);
    }

    #[test]
    fn energy_examples() {
        let x = Configuration::fresh(2, &[(1, 0), (1, 1)]);
        assert_eq!(energy(&x, Energy::E).unwrap(), 1);
        let rad = Configuration::fresh(2, &[(2, 0), (0, 0)]);
        assert_eq!(energy(&rad, Energy::E).unwrap(), -1);
        assert_eq!(energy(&Configuration::fresh(2, &[(1, 0), (0, 0), (0, 1)]), Energy::E).unwrap(), 0);
        assert!(energy(&Configuration::fresh(1, &[(0, 0)]), Energy::E).is_err());
    }

    #[test]
    fn census_examples() {
        let x = Configuration::fresh(1, &[(1, 0), (0, 1), (0, 0)]);
        assert_eq!(merger_census(&x), MergerCensus { n_f: 1, d_f: Some(1) });
        let none = Configuration::fresh(1, &[(0, 0); 4]);
        assert_eq!(merger_census(&none), MergerCensus { n_f: 0, d_f: None });
        // A port-b particle two vertices below the pattern.
        let y = Configuration::fresh(1, &[(0, 1), (0, 0), (0, 0), (1, 0), (0, 1), (0, 0), (0, 0), (0, 0)]);
        assert_eq!(merger_census(&y), MergerCensus { n_f: 1, d_f: Some(2) });
    }

    #[test]
    fn keys_round_trip() {
        for k in ["size", "p_layer2", "S_local_avg_r5", "S_local_sum_r0", "S_var_rho0.05", "d_f", "Eprime"] {
            assert_eq!(k.parse::<Observable>().unwrap().to_string(), k);
        }
        assert!("p_layer0".parse::<Observable>().is_err());
        assert!("S_var_rho2".parse::<Observable>().is_err());
        assert!("bogus".parse::<Observable>().is_err());
    }

    #[test]
    fn bound_holds_on_random_input() {
        for seed in 0..200 {
            let x = random_config(1 + seed as usize % 60, 1 + seed as usize % 3, 0.3, seed, Constraint::None).unwrap();
            for r in [0, 1, 3, 7] {
                let s = entropy_local_avg(&x, r, EntropyVariant::Slots).unwrap();
                assert!(s <= local_entropy_bound(&x, r) + EPS);
            }
        }
    }
}
