use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use causalq_core::sim::NoiseModel;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn noise_label(noise: Option<NoiseModel>) -> String {
    match noise {
        Some(n) => format!("{},{}", n.p1, n.p3),
        None => "none".into(),
    }
}

/// `# key=value` lines opening every CSV table.
pub fn provenance(seed: Option<u64>, shots: Option<u64>, noise: Option<NoiseModel>) -> String {
    let mut out = format!("# causalq {VERSION}\n");
    let opt = |v: Option<u64>| v.map_or("none".to_string(), |v| v.to_string());
    let _ = writeln!(
        out,
        "# seed={} shots={} noise={}",
        opt(seed),
        opt(shots),
        noise_label(noise)
    );
    out
}

/// Probabilities print at fixed precision so repeated runs are byte-identical.
pub fn fmt_prob(p: f64) -> String {
    format!("{p:.10}")
}

pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .context("writing to stdout")?;
            out.flush().context("flushing stdout")
        }
    }
}

pub fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}
