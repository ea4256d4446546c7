//! Half steps and full steps of free propagation.

use crate::graph::{Configuration, Vertex};
use crate::names::{Label, Side};

/// Direction in which particles travel under `sqrt_tau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Drift {
    /// A particle on port `a` hops to the neighbour behind port `a`; port `b`
    /// likewise. The new vertex on edge `(u, v)` copies port `a` from `v` and
    /// port `b` from `u`.
    #[default]
    AlongPort,
    /// The mirror convention: the new vertex on edge `(u, v)` copies port `a`
    /// from `u` and port `b` from `v`.
    AgainstPort,
}

impl Drift {
    pub fn flip(self) -> Drift {
        match self {
            Drift::AlongPort => Drift::AgainstPort,
            Drift::AgainstPort => Drift::AlongPort,
        }
    }
}

fn edge_vertex<L: Label>(u: &Vertex<L>, v: &Vertex<L>, a_from_v: bool) -> Vertex<L> {
    let name = u.name.child(Side::R).join(&v.name.child(Side::L));
    if a_from_v {
        Vertex::new(name, v.a, u.b)
    } else {
        Vertex::new(name, u.a, v.b)
    }
}

/// One vertex per edge `(vertices[j], vertices[j + 1])`, placed at index `j`.
pub fn sqrt_tau<L: Label>(x: &Configuration<L>, drift: Drift) -> Configuration<L> {
    let v = x.vertices();
    let k = v.len();
    let along = drift == Drift::AlongPort;
    let out = (0..k).map(|j| edge_vertex(&v[j], &v[(j + 1) % k], along)).collect();
    Configuration::from_parts(x.layers(), out)
}

/// Exact inverse of [`sqrt_tau`]: one vertex per edge
/// `(vertices[j - 1], vertices[j])`, placed at index `j`, with the opposite
/// copy rule.
pub fn sqrt_tau_inv<L: Label>(x: &Configuration<L>, drift: Drift) -> Configuration<L> {
    let v = x.vertices();
    let k = v.len();
    let along = drift == Drift::AlongPort;
    let out = (0..k).map(|j| edge_vertex(&v[(j + k - 1) % k], &v[j], !along)).collect();
    Configuration::from_parts(x.layers(), out)
}

/// Both ports advance one vertex; names stay put.
pub fn tau<L: Label>(x: &Configuration<L>, drift: Drift) -> Configuration<L> {
    let v = x.vertices();
    let k = v.len();
    let (a_src, b_src) = match drift {
        Drift::AlongPort => (1, k - 1),
        Drift::AgainstPort => (k - 1, 1),
    };
    let out = (0..k).map(|j| Vertex::new(v[j].name.clone(), v[(j + a_src) % k].a, v[(j + b_src) % k].b)).collect();
    Configuration::from_parts(x.layers(), out)
}

pub fn tau_inv<L: Label>(x: &Configuration<L>, drift: Drift) -> Configuration<L> {
    tau(x, drift.flip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{random_config, Constraint};

    fn bits(c: &Configuration) -> Vec<(u8, u8)> {
        c.vertices().iter().map(|v| (v.a, v.b)).collect()
    }

    fn names(c: &Configuration) -> Vec<String> {
        c.vertices().iter().map(|v| v.name.to_string()).collect()
    }

    #[test]
    fn sqrt_tau_against_port_example() {
        let x = Configuration::fresh(1, &[(1, 0), (0, 0), (0, 1)]);
        let y = sqrt_tau(&x, Drift::AgainstPort);
        assert_eq!(names(&y), ["(0.rv1.l)", "(1.rv2.l)", "(2.rv0.l)"]);
        assert_eq!(bits(&y), [(1, 0), (0, 1), (0, 0)]);
        assert_eq!(sqrt_tau_inv(&y, Drift::AgainstPort).vertices(), x.vertices());
    }

    #[test]
    fn sqrt_tau_along_port_example() {
        let x = Configuration::fresh(1, &[(1, 0), (0, 0), (0, 1)]);
        let y = sqrt_tau(&x, Drift::AlongPort);
        assert_eq!(bits(&y), [(0, 0), (0, 0), (1, 1)]);
        assert_eq!(sqrt_tau_inv(&y, Drift::AlongPort).vertices(), x.vertices());
    }

    #[test]
    fn self_loop() {
        let x = Configuration::fresh(1, &[(1, 1)]);
        for drift in [Drift::AlongPort, Drift::AgainstPort] {
            let y = sqrt_tau(&x, drift);
            assert_eq!(names(&y), ["(0.rv0.l)"]);
            assert_eq!(bits(&y), [(1, 1)]);
            assert_eq!(sqrt_tau_inv(&y, drift).vertices(), x.vertices());
        }
    }

    #[test]
    fn tau_example() {
        let x = Configuration::fresh(1, &[(1, 0), (0, 0), (0, 1)]);
        assert_eq!(bits(&tau(&x, Drift::AgainstPort)), [(0, 0), (1, 1), (0, 0)]);
        assert_eq!(bits(&tau(&x, Drift::AlongPort)), [(0, 1), (0, 0), (1, 0)]);
        let mut y = x.clone();
        for _ in 0..3 {
            y = tau(&y, Drift::AlongPort);
        }
        assert!(y.obs_equal(&x));
    }

    #[test]
    fn two_half_steps_make_a_step() {
        for seed in 0..50 {
            let x = random_config(1 + seed as usize % 20, 2, 0.5, seed, Constraint::None).unwrap();
            for drift in [Drift::AlongPort, Drift::AgainstPort] {
                let twice = sqrt_tau(&sqrt_tau(&x, drift), drift);
                assert!(twice.obs_equal(&tau(&x, drift)));
                assert_eq!(tau_inv(&tau(&x, drift), drift).vertices(), x.vertices());
            }
        }
    }
}
