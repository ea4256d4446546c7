use janus_core::graph::{random_config, Constraint};
use janus_core::names::{normalize, Path, Side, Term};
use janus_core::observables::{entropy_local_avg, entropy_local_sum, local_entropy_bound, EntropyVariant};
use janus_core::steps::{apply_step, Drift, Rules};
use janus_core::{Configuration, Dynamics, Name, Step, StepKind};
use proptest::prelude::*;

fn path() -> impl Strategy<Value = Path> {
    prop::collection::vec(prop::bool::ANY, 0..4).prop_map(|bits| {
        let mut p = Path::empty();
        for b in bits {
            p.push(if b { Side::R } else { Side::L });
        }
        p
    })
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = (0u64..4).prop_map(Term::Key);
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), path()).prop_map(|(t, p)| Term::Suffix(Box::new(t), p)),
            (inner.clone(), inner).prop_map(|(a, b)| a.join(b)),
        ]
    })
}

fn config(layers: usize) -> impl Strategy<Value = Configuration> {
    (1usize..24, 0.0f64..=1.0, any::<u64>())
        .prop_map(move |(n, q, seed)| random_config(n, layers, q, seed, Constraint::None).unwrap())
}

fn kind() -> impl Strategy<Value = StepKind> {
    prop::sample::select(StepKind::ALL.to_vec())
}

fn rules() -> impl Strategy<Value = Rules> {
    (prop::bool::ANY, prop::bool::ANY).prop_map(|(against, flanks)| Rules {
        drift: if against { Drift::AgainstPort } else { Drift::AlongPort },
        i3_flanks: flanks,
        ..Rules::default()
    })
}

proptest! {
    #[test]
    fn name_display_parses_back(t in term()) {
        let n = normalize(&t);
        let back: Name = n.to_string().parse().unwrap();
        prop_assert_eq!(back, n);
    }

    #[test]
    fn normal_form_is_fixed(t in term()) {
        let n = normalize(&t);
        prop_assert_eq!(normalize(&n.to_term()), n);
    }

    #[test]
    fn halves_join_back(t in term()) {
        let n = normalize(&t);
        prop_assert_eq!(n.child(Side::L).join(&n.child(Side::R)), n);
    }

    #[test]
    fn mirror_is_involution(t in term()) {
        let n = normalize(&t);
        prop_assert_eq!(n.mirror().mirror(), n);
    }

    #[test]
    fn descend_composes(t in term(), p in path(), q in path()) {
        let n = normalize(&t);
        prop_assert_eq!(n.descend(&p).descend(&q), n.descend(&p.concat(&q)));
    }

    #[test]
    fn json_round_trip(x in config(2)) {
        let y = Configuration::from_json(&x.to_json()).unwrap();
        prop_assert!(x.same_graph(&y));
    }

    #[test]
    fn rotation_and_reflection(x in config(1), k in 0usize..30) {
        prop_assert!(x.rotated(k).same_graph(&x));
        prop_assert!(x.reflected().reflected().same_graph(&x));
        prop_assert!(x.rotated(k).obs_equal(&x));
    }

    #[test]
    fn every_step_inverts(x in config(3), k in kind(), rules in rules()) {
        let s = Step::new(k);
        let y = apply_step(&x, s, &rules);
        prop_assert!(y.is_valid(), "{} image invalid: {}", k.token(), y);
        let back = apply_step(&y, s.inverse(), &rules);
        prop_assert!(back.same_graph(&x), "{}: {} -> {} -> {}", k.token(), x, y, back);
        if k.is_involution() {
            prop_assert!(apply_step(&y, s, &rules).same_graph(&x));
        }
    }

    #[test]
    fn dynamics_round_trip(x in config(3), ks in prop::collection::vec(kind(), 1..4), n in 0usize..12) {
        let d = Dynamics::of(&ks);
        let rules = Rules::default();
        let y = d.apply(&x, n, &rules).unwrap();
        prop_assert!(d.inverse().apply(&y, n, &rules).unwrap().same_graph(&x));
    }

    #[test]
    fn particles_conserved(x in config(3), k in kind()) {
        prop_assume!(!matches!(k, StepKind::F | StepKind::Ie | StepKind::Dr | StepKind::Dl));
        let y = apply_step(&x, Step::new(k), &Rules::default());
        prop_assert_eq!(y.particles(), x.particles());
    }

    #[test]
    fn local_entropy_bounded(x in config(2), r in 0usize..8) {
        let avg = entropy_local_avg(&x, r, EntropyVariant::Slots).unwrap();
        prop_assert!(avg <= local_entropy_bound(&x, r) + 1e-9);
        let sum = entropy_local_sum(&x, r, EntropyVariant::Slots).unwrap();
        prop_assert_eq!(avg, sum / x.len() as f64);
    }
}
