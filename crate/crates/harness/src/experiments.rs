//! Decoding-error, tamper-detection and parameter-scan experiments.
//!
//! Trials run in parallel on the current rayon pool. Each trial draws its
//! randomness from seeds derived from its coordinates, and results are
//! collected in coordinate order, so tables do not depend on the number of
//! worker threads.

use delchan_core::{
    design_codebook, kl_rate_m2, m2_deletion_transform, transmit, transmit_until, Assessment,
    ChannelConfig, Codebook, Decoder, DesignConfig, M2Params, SymbolSequence, TamperDetector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{
    read_json, DecodingExperimentConfig, LengthMode, ScanConfig, TamperExperimentConfig, SCAN_LOW,
};
use crate::error::Result;
use crate::seeds::{derive_seed, Stream};
use crate::table::{DecodingRow, ResultTable, ScanRow, TamperRow};

/// Loads the codebook named in `cfg` and runs [`decoding_experiment`].
pub fn run_decoding_experiment(cfg: &DecodingExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let book: Codebook = read_json(&cfg.codebook)?;
    decoding_experiment(&book, cfg)
}

/// Decoding error per (length, message).
///
/// The channel deletes with `cfg.delta`; the decoder assumes the codebook's
/// design `δ`. A received sequence that cannot be decoded (empty, or
/// impossible under every machine) counts as an error.
pub fn decoding_experiment(book: &Codebook, cfg: &DecodingExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let channel = ChannelConfig::new(cfg.delta)?;
    let messages = book.len();
    let mut errors = vec![0usize; cfg.lengths.len() * messages];
    for rerun in 0..cfg.reruns {
        let book = if cfg.resample_codebook {
            design_codebook(&DesignConfig {
                num_messages: messages,
                seed: derive_seed(cfg.seed, Stream::Codebook, &[rerun as u64]),
                design_delta: book.design_delta(),
                ..cfg.design.clone()
            })?
        } else {
            book.clone()
        };
        let decoder = Decoder::new(&book);
        let machines = (0..messages).map(|m| book.machine(m)).collect::<delchan_core::Result<Vec<_>>>()?;
        let cells: Vec<usize> = (0..cfg.lengths.len() * messages)
            .into_par_iter()
            .map(|cell| {
                let (li, m) = (cell / messages, cell % messages);
                let n = cfg.lengths[li];
                (0..cfg.trials)
                    .filter(|&t| {
                        let coords = [rerun as u64, m as u64, n as u64, t as u64];
                        let src = derive_seed(cfg.seed, Stream::Source, &coords);
                        let ch = derive_seed(cfg.seed, Stream::Channel, &coords);
                        let y = match cfg.length_mode {
                            LengthMode::Observed => {
                                let source = machines[m]
                                    .realization(ChaCha8Rng::seed_from_u64(src))
                                    .expect("codebook machines are strongly connected");
                                let mut rng = ChaCha8Rng::seed_from_u64(ch);
                                transmit_until(source, n, channel, &mut rng).output
                            }
                            LengthMode::Input => {
                                let x = machines[m].generate(n, src).expect("strongly connected");
                                transmit(&x, channel, ch)
                            }
                        };
                        decoded_wrong(&decoder, &y, m)
                    })
                    .count()
            })
            .collect();
        for (total, e) in errors.iter_mut().zip(cells) {
            *total += e;
        }
    }
    let denom = (cfg.trials * cfg.reruns) as f64;
    let rows = cfg
        .lengths
        .iter()
        .enumerate()
        .flat_map(|(li, &length)| {
            let errors = &errors;
            (0..messages).map(move |message| DecodingRow {
                length,
                message,
                error_rate: errors[li * messages + message] as f64 / denom,
                reruns: cfg.reruns,
            })
        })
        .collect();
    Ok(ResultTable::Decoding(rows))
}

fn decoded_wrong(decoder: &Decoder, y: &SymbolSequence, message: usize) -> bool {
    match decoder.decode(y) {
        Ok(r) => r.message != message,
        Err(_) => true,
    }
}

/// Loads the codebook named in `cfg` and runs [`tamper_experiment`].
pub fn run_tamper_experiment(cfg: &TamperExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let book: Codebook = read_json(&cfg.codebook)?;
    tamper_experiment(&book, cfg)
}

/// Which test sets are tampered, drawn from `assignment_seed` unless forced.
pub fn tamper_assignment(cfg: &TamperExperimentConfig) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.assignment_seed);
    (0..cfg.test_sets)
        .map(|_| {
            let coin = rng.gen_bool(0.5);
            cfg.force_tampered.unwrap_or(coin)
        })
        .collect()
}

/// Miss, false-alarm and combined rates per (length, ε).
///
/// Rates are counts over all test sets, so the combined rate is the overall
/// misclassification rate and equals the sum of the other two.
pub fn tamper_experiment(book: &Codebook, cfg: &TamperExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let detector = TamperDetector::new(book, cfg.delta, cfg.eta)?;
    let clean = ChannelConfig::new(cfg.delta)?;
    let tampered_channel = ChannelConfig::new(cfg.delta_tampered)?;
    let machines = (0..book.len()).map(|m| book.machine(m)).collect::<delchan_core::Result<Vec<_>>>()?;
    let assignment = tamper_assignment(cfg);
    let mut rows = Vec::with_capacity(cfg.lengths.len() * cfg.epsilons.len());
    for &n in &cfg.lengths {
        let assessed: Vec<Assessment> = (0..cfg.test_sets * cfg.k)
            .into_par_iter()
            .map(|idx| {
                let (set, i) = (idx / cfg.k, idx % cfg.k);
                let channel = if assignment[set] { tampered_channel } else { clean };
                let coords = [set as u64, n as u64, i as u64];
                let g = &machines[i % machines.len()];
                let src = derive_seed(cfg.seed, Stream::Source, &coords);
                let ch = derive_seed(cfg.seed, Stream::Channel, &coords);
                let y = match cfg.length_mode {
                    LengthMode::Observed => {
                        let source = g
                            .realization(ChaCha8Rng::seed_from_u64(src))
                            .expect("codebook machines are strongly connected");
                        transmit_until(source, n, channel, &mut ChaCha8Rng::seed_from_u64(ch)).output
                    }
                    LengthMode::Input => transmit(&g.generate(n, src).expect("strongly connected"), channel, ch),
                };
                match detector.assess(&y) {
                    // nothing survived the channel; excluded from the vote
                    Err(delchan_core::Error::EmptySequence) => Ok(Assessment {
                        decoded: None,
                        excess: f64::NAN,
                    }),
                    other => other,
                }
            })
            .collect::<delchan_core::Result<_>>()?;
        for &epsilon in &cfg.epsilons {
            let (mut misses, mut false_alarms) = (0usize, 0usize);
            for (set, chunk) in assessed.chunks(cfg.k).enumerate() {
                let flagged = detector.vote(chunk, epsilon, cfg.mode)?.tampered;
                match (assignment[set], flagged) {
                    (true, false) => misses += 1,
                    (false, true) => false_alarms += 1,
                    _ => {}
                }
            }
            let sets = cfg.test_sets as f64;
            rows.push(TamperRow {
                length: n,
                epsilon,
                miss_rate: misses as f64 / sets,
                false_alarm_rate: false_alarms as f64 / sets,
                combined_rate: (misses + false_alarms) as f64 / sets,
            });
        }
    }
    Ok(ResultTable::Tamper(rows))
}

/// `(μ(δ), ν(δ))` and `D((.5,.5) ‖ g_(μ,ν)(δ))` over a square grid on
/// `[0.01, 0.99]²` for each `δ`.
pub fn run_param_scan(cfg: &ScanConfig) -> Result<ResultTable> {
    let points = cfg.points()?;
    let fair = M2Params::new(0.5, 0.5)?;
    let grid: Vec<f64> = (0..points).map(|i| SCAN_LOW + i as f64 * cfg.step).collect();
    let mut rows = Vec::with_capacity(cfg.deltas.len() * points * points);
    for &delta in &cfg.deltas {
        for &mu in &grid {
            for &nu in &grid {
                let t = m2_deletion_transform(M2Params::new(mu, nu)?, delta)?;
                rows.push(ScanRow {
                    delta,
                    mu,
                    nu,
                    mu_delta: t.mu,
                    nu_delta: t.nu,
                    kl: kl_rate_m2(fair, t),
                });
            }
        }
    }
    Ok(ResultTable::Scan(rows))
}
