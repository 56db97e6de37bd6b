use delchan_core::linalg::Matrix;
use delchan_core::metrics::kl_rate_m2;
use delchan_core::{
    deletion_transform, entropy_rate_m2, m2_deletion_transform, transmit, Alphabet, ChannelConfig,
    M2Params, MachineKind, Pfsa, StateDistribution,
};
use proptest::prelude::*;

fn alphabet(k: usize) -> Alphabet {
    Alphabet::new((0..k).map(|i| i.to_string())).unwrap()
}

/// Deterministic machines with 1..=5 states and 2..=3 symbols, all emission
/// probabilities positive, kept only when strongly connected.
fn deterministic_machine() -> impl Strategy<Value = Pfsa> {
    (1usize..=5, 2usize..=3)
        .prop_flat_map(|(m, k)| {
            (
                Just(k),
                prop::collection::vec(prop::collection::vec(0..m, k), m),
                prop::collection::vec(prop::collection::vec(0.05f64..1.0, k), m),
            )
        })
        .prop_filter_map("not strongly connected", |(k, succ, w)| {
            let emission: Vec<Vec<f64>> = w
                .iter()
                .map(|r| {
                    let s: f64 = r.iter().sum();
                    r.iter().map(|v| v / s).collect()
                })
                .collect();
            let g = Pfsa::from_transitions(alphabet(k), &succ, &emission).ok()?;
            g.is_strongly_connected().then_some(g)
        })
}

/// Generalized machines with dense positive Γ, hence strongly connected.
fn generalized_machine() -> impl Strategy<Value = Pfsa> {
    (1usize..=4, 2usize..=3)
        .prop_flat_map(|(m, k)| (Just((m, k)), prop::collection::vec(0.01f64..1.0, m * m * k)))
        .prop_map(|((m, k), w)| {
            let mut gamma = vec![Matrix::zeros(m, m); k];
            for s in 0..m {
                let row = &w[s * m * k..(s + 1) * m * k];
                let total: f64 = row.iter().sum();
                for x in 0..k {
                    for t in 0..m {
                        gamma[x][(s, t)] = row[x * m + t] / total;
                    }
                }
            }
            Pfsa::new(alphabet(k), gamma, MachineKind::Generalized).unwrap()
        })
}

fn any_machine() -> impl Strategy<Value = Pfsa> {
    prop_oneof![deterministic_machine(), generalized_machine()]
}

fn m2() -> impl Strategy<Value = M2Params> {
    (0.01f64..0.99, 0.01f64..0.99).prop_map(|(mu, nu)| M2Params::new(mu, nu).unwrap())
}

fn distribution(m: usize) -> impl Strategy<Value = StateDistribution> {
    prop::collection::vec(0.0f64..1.0, m).prop_filter_map("all zero", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-3).then(|| StateDistribution::new(w.iter().map(|v| v / s).collect()).unwrap())
    })
}

fn machine_and_distribution() -> impl Strategy<Value = (Pfsa, StateDistribution)> {
    any_machine().prop_flat_map(|g| {
        let m = g.num_states();
        (Just(g), distribution(m))
    })
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn step_probabilities_sum_to_one((g, p) in machine_and_distribution()) {
        let mut total = 0.0;
        for x in 0..g.num_symbols() {
            if let Ok((prob, next)) = g.likelihood_step(&p, x) {
                total += prob;
                let s: f64 = next.probs().iter().sum();
                prop_assert!((s - 1.0).abs() <= 1e-12);
                prop_assert!(next.probs().iter().all(|&v| v >= 0.0));
            }
        }
        prop_assert!((total - 1.0).abs() <= 1e-12, "{}", total);
    }

    #[test]
    fn stationary_is_a_fixed_point(g in any_machine()) {
        let p = g.stationary_distribution().unwrap();
        let pm = g.state_to_state();
        let mut v = pm.left_mul(p.probs());
        prop_assert!(l1(&v, p.probs()) <= 1e-12);
        for _ in 0..10 {
            v = pm.left_mul(&v);
        }
        prop_assert!(l1(&v, p.probs()) <= 1e-12);
        let power = g.stationary_by_power_iteration(20_000);
        prop_assert!(l1(&power, p.probs()) <= 1e-8);
    }

    #[test]
    fn deterministic_steps_keep_point_masses(
        g in deterministic_machine(),
        start in 0usize..5,
        seq in prop::collection::vec(0usize..2, 1..30),
    ) {
        let mut p = StateDistribution::point_mass(g.num_states(), start % g.num_states());
        for x in seq {
            let (_, next) = g.likelihood_step(&p, x).unwrap();
            prop_assert!(next.is_point_mass());
            p = next;
        }
    }

    #[test]
    fn m2_steps_land_on_emitted_state(params in m2(), p in distribution(2), x in 0usize..2) {
        let (_, next) = params.machine().likelihood_step(&p, x).unwrap();
        prop_assert_eq!(next, StateDistribution::point_mass(2, x));
    }

    #[test]
    fn json_round_trip_is_exact(g in any_machine()) {
        prop_assert_eq!(Pfsa::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn deletion_preserves_stationary_and_marginal(g in any_machine(), delta in 0.0f64..0.95) {
        let t = deletion_transform(&g, delta).unwrap();
        let (a, b) = (g.stationary_distribution().unwrap(), t.stationary_distribution().unwrap());
        prop_assert!(l1(a.probs(), b.probs()) <= 1e-10);
        prop_assert!(l1(&g.symbol_marginal().unwrap(), &t.symbol_marginal().unwrap()) <= 1e-10);
    }

    #[test]
    fn m2_is_closed_under_deletion(params in m2(), delta in 0.0f64..0.99) {
        let t = deletion_transform(&params.machine(), delta).unwrap();
        for x in 0..2 {
            let gx = t.gamma(x);
            for col in 0..2 {
                if col != x {
                    prop_assert!((0..2).all(|row| gx[(row, col)] == 0.0));
                }
            }
        }
        let closed = m2_deletion_transform(params, delta).unwrap();
        let via_matrix = M2Params::from_machine(&t).unwrap();
        prop_assert!((closed.mu - via_matrix.mu).abs() <= 1e-12);
        prop_assert!((closed.nu - via_matrix.nu).abs() <= 1e-12);
    }

    #[test]
    fn eigenvalue_map(params in m2(), delta in 0.0f64..0.99) {
        let lambda = params.mu - params.nu;
        let t = m2_deletion_transform(params, delta).unwrap();
        let expected = lambda * (1.0 - delta) / (1.0 - delta * lambda);
        prop_assert!((t.mu - t.nu - expected).abs() <= 1e-10);
    }

    #[test]
    fn transmit_yields_a_subsequence(
        x in prop::collection::vec(0usize..3, 0..200),
        delta in 0.0f64..0.99,
        seed in any::<u64>(),
    ) {
        let y = transmit(&x, ChannelConfig::new(delta).unwrap(), seed);
        let mut it = x.iter();
        prop_assert!(y.iter().all(|s| it.any(|v| v == s)));
        prop_assert_eq!(y, transmit(&x, ChannelConfig::new(delta).unwrap(), seed));
    }

    #[test]
    fn kl_is_nonnegative_and_zero_only_on_identity(a in m2(), b in m2()) {
        let d = kl_rate_m2(a, b);
        prop_assert!(d >= 0.0);
        prop_assert_eq!(kl_rate_m2(a, a), 0.0);
        if (a.mu - b.mu).abs() > 1e-6 || (a.nu - b.nu).abs() > 1e-6 {
            prop_assert!(d > 0.0);
        }
        let general = delchan_core::kl_rate(&a.machine(), &b.machine()).unwrap();
        prop_assert!((general - d).abs() <= 1e-12);
    }

    #[test]
    fn entropy_rises_with_deletion(params in m2(), d1 in 0.0f64..0.9, step in 0.01f64..0.09) {
        prop_assume!((params.mu - params.nu).abs() >= 0.05);
        let h = |d| entropy_rate_m2(m2_deletion_transform(params, d).unwrap());
        prop_assert!(h(d1 + step) > h(d1));
    }
}
