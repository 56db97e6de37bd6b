//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use delchan_core::reference::{bernoulli, four_state_machine, m2_machine, three_state_cycle};
use delchan_core::{
    block_entropy, deletion_transform, design_codebook, entropy_rate, entropy_rate_m2, kl_block, kl_rate_m2,
    m2_deletion_transform, sync_composition, transmit_until, Alphabet, ChannelConfig, Codebook, DesignConfig,
    M2Params, Pfsa, StateDistribution,
};
use delchan_harness::pool;
use delchan_harness::table::{mean_error_at, tamper_row};
use delchan_harness::{decoding_experiment, tamper_experiment, DecodingExperimentConfig, ResultTable, TamperExperimentConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_m2(rng: &mut ChaCha8Rng) -> M2Params {
    M2Params::new(rng.gen_range(0.01..0.99), rng.gen_range(0.01..0.99)).unwrap()
}

fn within_budget(start: Instant, budget: Duration) -> (bool, String) {
    let elapsed = start.elapsed();
    (elapsed < budget, format!("{:.1}s of {}s", elapsed.as_secs_f64(), budget.as_secs()))
}

fn entropy_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = random_m2(&mut rng);
        let g = p.machine();
        let rate = entropy_rate_m2(p);
        let mut prev = block_entropy(&g, 1).unwrap();
        for n in 2..=16 {
            let h = block_entropy(&g, n).unwrap();
            worst = worst.max((h - prev - rate).abs());
            prev = h;
        }
    }
    let (fast, time) = within_budget(start, Duration::from_secs(30));
    outcome(worst <= 1e-12 && fast, format!("max |H_n - H_(n-1) - H| = {worst:.2e} (tol 1e-12), {time}"))
}

fn kl_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (a, b) = (random_m2(&mut rng), random_m2(&mut rng));
        let (ga, gb) = (a.machine(), b.machine());
        let rate = kl_rate_m2(a, b);
        let mut prev = kl_block(&ga, &gb, 1).unwrap();
        for n in 2..=14 {
            let d = kl_block(&ga, &gb, n).unwrap();
            worst = worst.max((d - prev - rate).abs());
            prev = d;
        }
    }
    let (fast, time) = within_budget(start, Duration::from_secs(60));
    outcome(worst <= 1e-12 && fast, format!("max |D_n - D_(n-1) - D| = {worst:.2e} (tol 1e-12), {time}"))
}

fn general_convergence() -> Outcome {
    let g = four_state_machine();
    let diff = block_entropy(&g, 16).unwrap() - block_entropy(&g, 15).unwrap();
    let dev = (diff - entropy_rate(&g).unwrap()).abs();
    outcome(dev <= 1e-6, format!("|H_16 - H_15 - H| = {dev:.2e} (tol 1e-6)"))
}

fn sequence_probability(g: &Pfsa, p0: &StateDistribution, seq: &[usize]) -> f64 {
    let mut p = p0.clone();
    let mut total = 1.0;
    for &x in seq {
        let Ok((prob, next)) = g.likelihood_step(&p, x) else {
            return 0.0;
        };
        total *= prob;
        p = next;
    }
    total
}

fn composition_equivalence() -> Outcome {
    let pairs = [
        (m2_machine(0.3, 0.6), m2_machine(0.8, 0.25)),
        (four_state_machine(), m2_machine(0.4, 0.7)),
        (m2_machine(0.2, 0.9), four_state_machine()),
        (four_state_machine(), three_state_cycle([0.2, 0.5, 0.7])),
        (three_state_cycle([0.6, 0.3, 0.9]), bernoulli(0.35)),
    ];
    let (mut seq_dev, mut marginal_dev) = (0.0f64, 0.0f64);
    for (g1, g2) in &pairs {
        let comp = sync_composition(g1, g2).unwrap();
        let pc = comp.composed.stationary_distribution().unwrap();
        let p1 = g1.stationary_distribution().unwrap();
        for s in 0..g1.num_states() {
            let mass: f64 = comp.partners_of(s).map(|i| pc.probs()[i]).sum();
            marginal_dev = marginal_dev.max((mass - p1.probs()[s]).abs());
        }
        for n in 1..=8 {
            for bits in 0..1usize << n {
                let x: Vec<usize> = (0..n).map(|i| (bits >> i) & 1).collect();
                let d = sequence_probability(&comp.composed, &pc, &x) - sequence_probability(g1, &p1, &x);
                seq_dev = seq_dev.max(d.abs());
            }
        }
    }
    outcome(
        seq_dev <= 1e-12 && marginal_dev <= 1e-10,
        format!("sequence dev {seq_dev:.2e} (tol 1e-12), marginal dev {marginal_dev:.2e} (tol 1e-10)"),
    )
}

fn deletion_transform_correctness() -> Outcome {
    let p = M2Params::new(0.3, 0.6).unwrap();
    let g = p.machine();
    let delta = 0.25;
    let t = deletion_transform(&g, delta).unwrap();
    let source = g.realization(ChaCha8Rng::seed_from_u64(50)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let y = transmit_until(source, 1_000_000, ChannelConfig::new(delta).unwrap(), &mut rng).output;
    let mut counts = [[0usize; 2]; 2];
    for w in y.windows(2) {
        counts[w[0]][w[1]] += 1;
    }
    let p0 = t.stationary_distribution().unwrap();
    let mut worst = 0.0f64;
    for (prev, row) in counts.iter().enumerate() {
        let (_, after) = t.likelihood_step(&p0, prev).unwrap();
        let total = (row[0] + row[1]) as f64;
        for (x, &c) in row.iter().enumerate() {
            let (expected, _) = t.likelihood_step(&after, x).unwrap();
            worst = worst.max((c as f64 / total - expected).abs());
        }
    }
    let closed = m2_deletion_transform(p, delta).unwrap();
    let matrix = M2Params::from_machine(&t).unwrap();
    let path_dev = (closed.mu - matrix.mu).abs().max((closed.nu - matrix.nu).abs());
    let value_dev = (closed.mu - 0.34884).abs().max((closed.nu - 0.55814).abs());
    outcome(
        y.len() == 1_000_000 && worst <= 0.005 && path_dev <= 1e-5 && value_dev <= 1e-5,
        format!(
            "bigram dev {worst:.4} (tol 0.005), closed form ({:.5}, {:.5}) vs matrix path dev {path_dev:.1e}",
            closed.mu, closed.nu
        ),
    )
}

fn stationary_preservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let m = rng.gen_range(2..=6);
        let successor: Vec<Vec<usize>> = (0..m).map(|s| vec![(s + 1) % m, rng.gen_range(0..m)]).collect();
        let emission: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                let q = rng.gen_range(0.05..0.95);
                vec![q, 1.0 - q]
            })
            .collect();
        let g = Pfsa::from_transitions(Alphabet::binary(), &successor, &emission).unwrap();
        let p = g.stationary_distribution().unwrap();
        let marginal = g.symbol_marginal().unwrap();
        for delta in [0.1, 0.25, 0.5, 0.75] {
            let t = deletion_transform(&g, delta).unwrap();
            let pt = t.stationary_distribution().unwrap();
            for (a, b) in p.probs().iter().zip(pt.probs()) {
                worst = worst.max((a - b).abs());
            }
            for (a, b) in marginal.iter().zip(t.symbol_marginal().unwrap()) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    outcome(worst <= 1e-10, format!("max deviation {worst:.2e} (tol 1e-10)"))
}

fn entropy_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut machines = Vec::new();
    while machines.len() < 81 {
        let p = random_m2(&mut rng);
        if (p.mu - p.nu).abs() >= 0.05 {
            machines.push(p);
        }
    }
    let mut violations = 0;
    let mut smallest_step = f64::INFINITY;
    for p in &machines {
        let h: Vec<f64> = (0..10)
            .map(|d| entropy_rate_m2(m2_deletion_transform(*p, d as f64 / 10.0).unwrap()))
            .collect();
        for w in h.windows(2) {
            smallest_step = smallest_step.min(w[1] - w[0]);
            if w[1].is_nan() || w[1] <= w[0] {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("{violations} non-increasing steps, smallest increase {smallest_step:.2e}"))
}

fn likelihood_convergence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for i in 0..5 {
        let (a, b) = (random_m2(&mut rng), random_m2(&mut rng));
        let x = a.machine().generate(100_000, 800 + i).unwrap();
        let l = b.machine().negative_log_likelihood_rate(&x).unwrap();
        worst = worst.max((l - entropy_rate_m2(a) - kl_rate_m2(a, b)).abs());
    }
    outcome(worst <= 0.02, format!("max |L - H - D| = {worst:.4} bits (tol 0.02)"))
}

fn decoding_config(book: &Codebook) -> DecodingExperimentConfig {
    DecodingExperimentConfig {
        delta: book.design_delta(),
        lengths: vec![50, 100, 150, 200],
        trials: 100,
        reruns: 1,
        seed: 0,
        ..Default::default()
    }
}

fn decoding_experiment_check(book: &Codebook) -> (Outcome, String) {
    let start = Instant::now();
    let table = decoding_experiment(book, &decoding_config(book)).unwrap();
    let ResultTable::Decoding(rows) = &table else { unreachable!() };
    let e50 = mean_error_at(rows, 50).unwrap();
    let e200 = mean_error_at(rows, 200).unwrap();
    let (fast, time) = within_budget(start, Duration::from_secs(300));
    (
        outcome(
            e200 <= 0.05 && e200 < e50 && fast,
            format!("error(50) = {e50:.3}, error(200) = {e200:.3} (tol 0.05), 1000 trials per length, {time}"),
        ),
        table.to_csv(),
    )
}

fn tamper_config() -> TamperExperimentConfig {
    TamperExperimentConfig {
        delta: 0.2,
        delta_tampered: 0.3,
        eta: 0.1,
        k: 200,
        test_sets: 50,
        seed: 0,
        assignment_seed: 0,
        ..Default::default()
    }
}

fn tamper_experiment_check(book: &Codebook) -> (Outcome, String) {
    let start = Instant::now();
    let cfg = tamper_config();
    let table = tamper_experiment(book, &cfg).unwrap();
    let ResultTable::Tamper(rows) = &table else { unreachable!() };
    let at = |n, e| tamper_row(rows, n, e).unwrap().combined_rate;
    let endpoint = at(200, 0.15);
    let trend: Vec<String> = cfg.epsilons.iter().map(|&e| format!("{:.2}>{:.2}", at(50, e), at(200, e))).collect();
    let decreasing = cfg.epsilons.iter().all(|&e| at(50, e) > at(200, e));
    let (fast, time) = within_budget(start, Duration::from_secs(600));
    (
        outcome(
            endpoint <= 0.10 && decreasing && fast,
            format!(
                "combined(200, eps=.15) = {endpoint:.2} (tol 0.10); combined(50) > combined(200) per eps: [{}]; {time}",
                trend.join(" ")
            ),
        ),
        table.to_csv(),
    )
}

fn main() {
    let book = design_codebook(&DesignConfig::default()).unwrap();
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "entropy rate vs block-entropy oracle", entropy_oracle()),
        (2, "KL rate vs block-divergence oracle", kl_oracle()),
        (3, "general machine entropy convergence", general_convergence()),
        (4, "synchronous composition equivalence", composition_equivalence()),
        (5, "deletion transform matches channel output", deletion_transform_correctness()),
        (6, "stationary and marginal preservation", stationary_preservation()),
        (7, "entropy strictly increases with deletion", entropy_monotonicity()),
        (8, "log-likelihood convergence", likelihood_convergence()),
    ];
    let (decoding, decoding_csv) = decoding_experiment_check(&book);
    results.push((9, "decoding error experiment", decoding));
    let (tamper, tamper_csv) = tamper_experiment_check(&book);
    results.push((10, "tamper detection experiment", tamper));

    // same master seed, different worker count
    let (again_decoding, again_tamper) = pool::install(1, || {
        (
            decoding_experiment(&book, &decoding_config(&book)).unwrap().to_csv(),
            tamper_experiment(&book, &tamper_config()).unwrap().to_csv(),
        )
    })
    .unwrap();
    let identical = again_decoding == decoding_csv && again_tamper == tamper_csv;
    results.push((
        11,
        "experiment CSV is reproducible",
        outcome(
            identical,
            format!("{} + {} bytes, rerun on one worker identical: {identical}", decoding_csv.len(), tamper_csv.len()),
        ),
    ));

    let mut failed = 0;
    for (id, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{id:>2}] {name}: {}", o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
