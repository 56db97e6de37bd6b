//! Sequence files.
//!
//! Text files hold one sequence per line over the alphabet labels. Binary
//! files hold a single sequence, one byte per symbol index. A directory is
//! read file by file in name order.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use delchan_core::{Alphabet, SymbolSequence};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum SequenceFormat {
    #[default]
    Text,
    Binary,
}

pub fn read_sequences(path: &Path, alphabet: &Alphabet, format: SequenceFormat) -> Result<Vec<SymbolSequence>> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| HarnessError::io(path, e))?
            .map(|entry| entry.map(|e| e.path()).map_err(|e| HarnessError::io(path, e)))
            .collect::<Result<_>>()?;
        files.retain(|p| p.is_file());
        files.sort();
        let mut all = Vec::new();
        for f in files {
            all.extend(read_file(&f, alphabet, format)?);
        }
        Ok(all)
    } else {
        read_file(path, alphabet, format)
    }
}

fn read_file(path: &Path, alphabet: &Alphabet, format: SequenceFormat) -> Result<Vec<SymbolSequence>> {
    let bytes = std::fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    match format {
        SequenceFormat::Text => {
            let text = String::from_utf8(bytes).map_err(|_| HarnessError::Parse {
                path: path.to_path_buf(),
                message: "not valid UTF-8".into(),
            })?;
            parse_text(&text, alphabet).map_err(|message| HarnessError::Parse {
                path: path.to_path_buf(),
                message,
            })
        }
        SequenceFormat::Binary => {
            let seq = SymbolSequence::new(bytes.into_iter().map(usize::from).collect(), alphabet.len())
                .map_err(|e| HarnessError::Parse {
                    path: path.to_path_buf(),
                    message: e.to_string(),
                })?;
            Ok(vec![seq])
        }
    }
}

/// One sequence per line; a blank line is an empty sequence.
pub fn parse_text(text: &str, alphabet: &Alphabet) -> std::result::Result<Vec<SymbolSequence>, String> {
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            alphabet
                .parse_sequence(line.trim_end_matches('\r'))
                .map_err(|e| format!("line {}: {e}", i + 1))
        })
        .collect()
}

pub fn format_text(seqs: &[SymbolSequence], alphabet: &Alphabet) -> String {
    let mut out = String::new();
    for s in seqs {
        out.push_str(&alphabet.format_sequence(s));
        out.push('\n');
    }
    out
}

/// Serialized form of `seqs`; binary output holds exactly one sequence.
pub fn encode_sequences(seqs: &[SymbolSequence], alphabet: &Alphabet, format: SequenceFormat) -> Result<Vec<u8>> {
    match format {
        SequenceFormat::Text => Ok(format_text(seqs, alphabet).into_bytes()),
        SequenceFormat::Binary => {
            if seqs.len() != 1 || alphabet.len() > 256 {
                return Err(HarnessError::Config(
                    "binary output holds one sequence over at most 256 symbols".into(),
                ));
            }
            Ok(seqs[0].iter().map(|&s| s as u8).collect())
        }
    }
}

pub fn write_sequences(path: &Path, seqs: &[SymbolSequence], alphabet: &Alphabet, format: SequenceFormat) -> Result<()> {
    let bytes = encode_sequences(seqs, alphabet, format)?;
    std::fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}
