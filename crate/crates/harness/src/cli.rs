//! Command-line interface.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use delchan_core::{
    design_codebook, encode, transmit, transmit_until, Alphabet, ChannelConfig, Codebook, Decoder, DesignConfig,
    SymbolSequence, TamperDetector, VoteMode,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{read_json, DecodingExperimentConfig, LengthMode, ScanConfig, TamperExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::experiments::{run_decoding_experiment, run_param_scan, run_tamper_experiment};
use crate::info::report_file;
use crate::pool;
use crate::seeds::{derive_seed, Stream};
use crate::seqio::{encode_sequences, read_sequences, SequenceFormat};

#[derive(Debug, Parser)]
#[command(name = "pfsa-delchan", version, about = "Message coding with finite-state sources over deletion channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Design a codebook by hill climbing and print it as JSON.
    Design(DesignArgs),
    /// Emit channel inputs for messages of a codebook.
    Encode(EncodeArgs),
    /// Pass sequences through a deletion channel.
    Channel(ChannelArgs),
    /// Decode received sequences; prints one CSV row per sequence.
    Decode(DecodeArgs),
    /// Test a batch of received sequences for increased deletion.
    Detect(DetectArgs),
    /// Summarize a machine or codebook file.
    Info(InfoArgs),
    /// Decoding error against observed length.
    ExpDecode(ExpDecodeArgs),
    /// Tamper-detection error rates.
    ExpTamper(ExpTamperArgs),
    /// Deletion-transform scan over the two-state parameter square.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Normalized,
    Strict,
}

impl From<ModeArg> for VoteMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Normalized => VoteMode::Normalized,
            ModeArg::Strict => VoteMode::Strict,
        }
    }
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long, default_value_t = 10)]
    pub messages: usize,
    #[arg(long, default_value_t = 0.01)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Parameter bounds as LO,HI.
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.95])]
    pub bounds: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,
    /// Minimum |mu - nu| at initialization.
    #[arg(long, default_value_t = 0.2)]
    pub margin: f64,
    /// Deletion probability stored in the codebook.
    #[arg(long, default_value_t = 0.2)]
    pub design_delta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub codebook: PathBuf,
    /// Message index; repeat for several sequences.
    #[arg(long, required = true)]
    pub message: Vec<usize>,
    #[arg(long)]
    pub length: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SequenceFormat::Text)]
    pub format: SequenceFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stop each sequence once this many symbols survive.
    #[arg(long)]
    pub target: Option<usize>,
    #[arg(long, value_enum, default_value_t = SequenceFormat::Text)]
    pub format: SequenceFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub codebook: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    /// Deletion probability assumed by the decoder; defaults to the
    /// codebook's design value.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = SequenceFormat::Text)]
    pub format: SequenceFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub codebook: PathBuf,
    /// Sequence file or directory of sequence files.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.15)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Normalized)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = SequenceFormat::Text)]
    pub format: SequenceFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    pub path: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
}

#[derive(Debug, Args)]
pub struct ExpDecodeArgs {
    /// JSON config; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub codebook: Option<PathBuf>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub reruns: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub length_mode: Option<LengthMode>,
    #[arg(long)]
    pub resample_codebook: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExpTamperArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub codebook: Option<PathBuf>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub delta_tampered: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub test_sets: Option<usize>,
    #[arg(long)]
    pub assignment_seed: Option<u64>,
    /// Mark every test set tampered (true) or clean (false).
    #[arg(long)]
    pub force_tampered: Option<bool>,
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    pub length_mode: Option<LengthMode>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub deltas: Option<Vec<f64>>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| HarnessError::io(path, e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| HarnessError::io("<stdout>", e)),
    }
}

fn load_codebook(path: &Path) -> Result<Codebook> {
    read_json(path)
}

/// Seed of the `i`-th sequence produced by `encode` with base seed `seed`.
pub fn encode_seed(seed: u64, i: usize) -> u64 {
    derive_seed(seed, Stream::Source, &[i as u64])
}

/// Seed of the channel applied to the `i`-th sequence by `channel`.
pub fn channel_seed(seed: u64, i: usize) -> u64 {
    derive_seed(seed, Stream::Channel, &[i as u64])
}

pub fn run(cli: Cli) -> Result<()> {
    let threads = pool::thread_count()?;
    pool::install(threads, move || dispatch(cli.command))?
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Design(a) => {
            let [lo, hi] = a.bounds[..] else {
                return Err(HarnessError::Config(format!("--bounds takes LO,HI, got {} values", a.bounds.len())));
            };
            let cfg = DesignConfig {
                num_messages: a.messages,
                step_sigma: a.sigma,
                margin: a.margin,
                bounds: (lo, hi),
                max_iters: a.max_iters,
                seed: a.seed,
                design_delta: a.design_delta,
            };
            let book = design_codebook(&cfg)?;
            log::info!("objective {:.6}", delchan_core::objective(&book));
            emit(a.out.as_deref(), format!("{}\n", book.to_json()).as_bytes())
        }
        Command::Encode(a) => {
            let book = load_codebook(&a.codebook)?;
            let seqs = a
                .message
                .iter()
                .enumerate()
                .map(|(i, &m)| encode(&book, m, a.length, encode_seed(a.seed, i)))
                .collect::<delchan_core::Result<Vec<_>>>()?;
            emit(a.out.as_deref(), &encode_sequences(&seqs, &Alphabet::binary(), a.format)?)
        }
        Command::Channel(a) => {
            let cfg = ChannelConfig::new(a.delta)?;
            let alphabet = Alphabet::binary();
            let inputs = read_sequences(&a.input, &alphabet, a.format)?;
            let outputs: Vec<SymbolSequence> = inputs
                .iter()
                .enumerate()
                .map(|(i, x)| match a.target {
                    Some(target) => {
                        let mut rng = ChaCha8Rng::seed_from_u64(channel_seed(a.seed, i));
                        transmit_until(x.iter().copied(), target, cfg, &mut rng).output
                    }
                    None => transmit(x, cfg, channel_seed(a.seed, i)),
                })
                .collect();
            emit(a.out.as_deref(), &encode_sequences(&outputs, &alphabet, a.format)?)
        }
        Command::Decode(a) => {
            let book = load_codebook(&a.codebook)?;
            let decoder = Decoder::for_delta(&book, a.delta.unwrap_or(book.design_delta()))?;
            let seqs = read_sequences(&a.input, &Alphabet::binary(), a.format)?;
            emit(a.out.as_deref(), decode_csv(&decoder, book.len(), &seqs).as_bytes())
        }
        Command::Detect(a) => {
            let book = load_codebook(&a.codebook)?;
            let delta = a.delta.unwrap_or(book.design_delta());
            let params = delchan_core::DetectionParams::new(delta, a.eta, a.epsilon, a.mode.into())?;
            let seqs = read_sequences(&a.input, &Alphabet::binary(), a.format)?;
            if seqs.is_empty() {
                return Err(HarnessError::Config("no sequences to test".into()));
            }
            let detector = TamperDetector::new(&book, params.delta, params.eta)?;
            let assessed = seqs
                .iter()
                .map(|s| match detector.assess(s) {
                    Err(delchan_core::Error::EmptySequence) => Ok(delchan_core::Assessment {
                        decoded: None,
                        excess: f64::NAN,
                    }),
                    other => other,
                })
                .collect::<delchan_core::Result<Vec<_>>>()?;
            let verdict = detector.vote(&assessed, params.epsilon, params.mode)?;
            let mut out = format!(
                "tampered: {}\nvote_fraction: {:.6}\nindex,decoded,excess,voted\n",
                verdict.tampered, verdict.vote_fraction
            );
            for (i, v) in verdict.per_sequence.iter().enumerate() {
                match v.decoded {
                    Some(d) => out.push_str(&format!("{i},{d},{:.6},{}\n", v.excess, v.voted)),
                    None => out.push_str(&format!("{i},,,false\n")),
                }
            }
            emit(a.out.as_deref(), out.as_bytes())
        }
        Command::Info(a) => emit(None, report_file(&a.path, a.delta)?.as_bytes()),
        Command::ExpDecode(a) => {
            let mut cfg: DecodingExperimentConfig = match &a.config {
                Some(p) => read_json(p)?,
                None => DecodingExperimentConfig::default(),
            };
            set(&mut cfg.codebook, a.codebook);
            set(&mut cfg.delta, a.delta);
            set(&mut cfg.lengths, a.lengths);
            set(&mut cfg.trials, a.trials);
            set(&mut cfg.reruns, a.reruns);
            set(&mut cfg.seed, a.seed);
            set(&mut cfg.length_mode, a.length_mode);
            cfg.resample_codebook |= a.resample_codebook;
            let table = run_decoding_experiment(&cfg)?;
            emit(a.out.as_deref(), table.to_csv().as_bytes())
        }
        Command::ExpTamper(a) => {
            let mut cfg: TamperExperimentConfig = match &a.config {
                Some(p) => read_json(p)?,
                None => TamperExperimentConfig::default(),
            };
            set(&mut cfg.codebook, a.codebook);
            set(&mut cfg.delta, a.delta);
            set(&mut cfg.delta_tampered, a.delta_tampered);
            set(&mut cfg.eta, a.eta);
            set(&mut cfg.epsilons, a.epsilons);
            set(&mut cfg.k, a.k);
            set(&mut cfg.test_sets, a.test_sets);
            set(&mut cfg.assignment_seed, a.assignment_seed);
            if a.force_tampered.is_some() {
                cfg.force_tampered = a.force_tampered;
            }
            set(&mut cfg.lengths, a.lengths);
            set(&mut cfg.length_mode, a.length_mode);
            set(&mut cfg.seed, a.seed);
            set(&mut cfg.mode, a.mode.map(VoteMode::from));
            let table = run_tamper_experiment(&cfg)?;
            emit(a.out.as_deref(), table.to_csv().as_bytes())
        }
        Command::Scan(a) => {
            let mut cfg: ScanConfig = match &a.config {
                Some(p) => read_json(p)?,
                None => ScanConfig::default(),
            };
            set(&mut cfg.deltas, a.deltas);
            set(&mut cfg.step, a.step);
            emit(a.out.as_deref(), run_param_scan(&cfg)?.to_csv().as_bytes())
        }
    }
}

fn set<T>(field: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *field = v;
    }
}

/// `index,message,score_0,…` per sequence; undecodable sequences leave the
/// message column empty.
pub fn decode_csv(decoder: &Decoder, messages: usize, seqs: &[SymbolSequence]) -> String {
    let mut out = String::from("index,message");
    for m in 0..messages {
        out.push_str(&format!(",score_{m}"));
    }
    out.push('\n');
    for (i, s) in seqs.iter().enumerate() {
        out.push_str(&i.to_string());
        match decoder.decode(s) {
            Ok(r) => {
                out.push_str(&format!(",{}", r.message));
                for v in &r.scores {
                    out.push_str(&format!(",{v:.6}"));
                }
            }
            Err(e) => {
                log::warn!("sequence {i}: {e}");
                out.push(',');
                out.push_str(&",".repeat(messages));
            }
        }
        out.push('\n');
    }
    out
}
