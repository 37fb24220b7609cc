use anyhow::Result;
use causalq_core::sim::{
    build_switch_circuit, sample_shots, simulate_exact, target_given_control, Counts, NoiseModel,
    OutcomeDistribution,
};
use serde::Serialize;

use crate::output::{emit, fmt_prob, provenance, to_json, VERSION};
use crate::{Format, SimulateArgs};

#[derive(Serialize)]
struct ExactJson<'a> {
    #[serde(flatten)]
    distribution: &'a OutcomeDistribution,
    conditional: [Option<[f64; 2]>; 2],
    noise: Option<NoiseModel>,
    version: &'static str,
}

#[derive(Serialize)]
struct CountsJson<'a> {
    #[serde(flatten)]
    counts: &'a Counts,
    conditional: [Option<[f64; 2]>; 2],
    noise: Option<NoiseModel>,
    version: &'static str,
}

/// `control,target,probability` rows of `P(target | control)`.
fn conditional_csv(cond: &[Option<[f64; 2]>; 2]) -> String {
    let mut out = String::from("control,target,probability\n");
    for (c, row) in cond.iter().enumerate() {
        for t in 0..2 {
            let p = row.map_or("NA".to_string(), |r| fmt_prob(r[t]));
            out.push_str(&format!("{c},{t},{p}\n"));
        }
    }
    out
}

fn text_table(labels: &[String], values: &[String], cond: &[Option<[f64; 2]>; 2]) -> String {
    let mut out = String::from("outcome (control,target)\n");
    for (l, v) in labels.iter().zip(values) {
        out.push_str(&format!("  {l}  {v}\n"));
    }
    out.push_str("P(target | control)\n");
    for (c, row) in cond.iter().enumerate() {
        match row {
            Some(r) => out.push_str(&format!(
                "  c={c}  t=0: {}  t=1: {}\n",
                fmt_prob(r[0]),
                fmt_prob(r[1])
            )),
            None => out.push_str(&format!("  c={c}  undefined\n")),
        }
    }
    out
}

pub fn run(a: SimulateArgs) -> Result<u8> {
    let noise = if a.ideal { None } else { a.noise };
    let circuit = build_switch_circuit(noise);
    let exact = simulate_exact(&circuit)?;
    let text = if a.exact {
        let cond = target_given_control(&exact.joint_control_target()?);
        match a.format {
            Format::Json => to_json(&ExactJson {
                distribution: &exact,
                conditional: cond,
                noise,
                version: VERSION,
            })?,
            Format::Csv => {
                let mut out = provenance(None, None, noise);
                out.push_str("label,probability\n");
                for (l, p) in exact.labels.iter().zip(&exact.probs) {
                    out.push_str(&format!("{l},{}\n", fmt_prob(*p)));
                }
                out.push('\n');
                out.push_str(&conditional_csv(&cond));
                out
            }
            Format::Text => {
                let values: Vec<String> = exact.probs.iter().map(|p| fmt_prob(*p)).collect();
                text_table(&exact.labels, &values, &cond)
            }
        }
    } else {
        let counts = sample_shots(&exact, a.shots, a.seed.seed)?;
        let cond = counts.conditional()?;
        match a.format {
            Format::Json => to_json(&CountsJson {
                counts: &counts,
                conditional: cond,
                noise,
                version: VERSION,
            })?,
            Format::Csv => {
                let mut out = provenance(Some(a.seed.seed), Some(a.shots), noise);
                out.push_str("label,count\n");
                for (l, c) in counts.labels.iter().zip(&counts.counts) {
                    out.push_str(&format!("{l},{c}\n"));
                }
                out.push('\n');
                out.push_str(&conditional_csv(&cond));
                out
            }
            Format::Text => {
                let values: Vec<String> = counts.counts.iter().map(u64::to_string).collect();
                text_table(&counts.labels, &values, &cond)
            }
        }
    };
    emit(&text, a.output.as_deref())?;
    Ok(0)
}
