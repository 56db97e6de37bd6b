//! Plain-text summaries of a machine or codebook file.

use std::fmt::Write;
use std::path::Path;

use delchan_core::{
    deletion_transform, entropy_rate, entropy_rate_m2, kl_rate_m2, m2_deletion_transform, ChannelConfig,
    Codebook, M2Params, Pfsa,
};

use crate::error::{HarnessError, Result};

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(",")
}

pub fn machine_report(g: &Pfsa, delta: f64) -> Result<String> {
    ChannelConfig::new(delta)?;
    let mut out = String::new();
    let kind = serde_json::to_value(g.kind()).expect("kind serializes");
    writeln!(out, "kind: {}", kind.as_str().unwrap_or_default()).unwrap();
    writeln!(out, "states: {}", g.num_states()).unwrap();
    writeln!(out, "alphabet: {}", g.alphabet().labels().join(",")).unwrap();
    writeln!(out, "stationary: {}", join(g.stationary_distribution()?.probs())).unwrap();
    writeln!(out, "symbol_marginal: {}", join(&g.symbol_marginal()?)).unwrap();
    writeln!(out, "entropy_rate: {:.6}", entropy_rate(g)?).unwrap();
    writeln!(out, "delta: {delta}").unwrap();
    match M2Params::from_machine(g) {
        Some(p) => {
            let t = m2_deletion_transform(p, delta)?;
            writeln!(out, "entropy_rate_delta: {:.6}", entropy_rate_m2(t)).unwrap();
            writeln!(out, "mu: {:.6}\nnu: {:.6}", p.mu, p.nu).unwrap();
            writeln!(out, "mu_delta: {:.6}\nnu_delta: {:.6}", t.mu, t.nu).unwrap();
        }
        None => {
            let t = deletion_transform(g, delta)?;
            writeln!(out, "entropy_rate_delta: {:.6}", entropy_rate(&t)?).unwrap();
        }
    }
    Ok(out)
}

pub fn codebook_report(book: &Codebook, delta: f64) -> Result<String> {
    let transformed: Vec<M2Params> = book
        .machines()
        .iter()
        .map(|&p| m2_deletion_transform(p, delta))
        .collect::<delchan_core::Result<_>>()?;
    let mut out = String::new();
    writeln!(out, "design_delta: {}", book.design_delta()).unwrap();
    writeln!(out, "delta: {delta}").unwrap();
    writeln!(out, "message,mu,nu,mu_delta,nu_delta,stationary_0,entropy_rate,entropy_rate_delta").unwrap();
    for (m, (p, t)) in book.machines().iter().zip(&transformed).enumerate() {
        writeln!(
            out,
            "{m},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            p.mu,
            p.nu,
            t.mu,
            t.nu,
            p.stationary_zero(),
            entropy_rate_m2(*p),
            entropy_rate_m2(*t)
        )
        .unwrap();
    }
    writeln!(out, "kl_delta (row i, column j: D(g_i(delta) || g_j(delta)))").unwrap();
    let header: Vec<String> = (0..book.len()).map(|j| j.to_string()).collect();
    writeln!(out, ",{}", header.join(",")).unwrap();
    for (i, a) in transformed.iter().enumerate() {
        let row: Vec<f64> = transformed.iter().map(|b| kl_rate_m2(*a, *b)).collect();
        writeln!(out, "{i},{}", join(&row)).unwrap();
    }
    Ok(out)
}

/// Reports on a codebook (a JSON object with `machines`) or a machine.
pub fn report_file(path: &Path, delta: f64) -> Result<String> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let parse_error = |message: String| HarnessError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| parse_error(e.to_string()))?;
    if value.get("machines").is_some() {
        let book = Codebook::from_json(&text).map_err(|e| parse_error(e.to_string()))?;
        codebook_report(&book, delta)
    } else {
        let g = Pfsa::from_json(&text).map_err(|e| parse_error(e.to_string()))?;
        machine_report(&g, delta)
    }
}
