use anyhow::{Context, Result};
use causalq_core::diagnostics::{
    emit_report, preset, CausalScenario, DiagnosticReport, Mode, Rule, ScenarioFile,
};

use crate::output::{emit, to_json};
use crate::{DiagnoseArgs, Format, EXIT_VIOLATION};

/// Scenarios run when none is named.
pub const CANONICAL_SUITE: [&str; 4] = [
    "switch-coherent",
    "switch-decohered",
    "fixed-order-ab",
    "fixed-order-ba",
];

fn load_scenario_file(path: &std::path::Path) -> Result<CausalScenario> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: ScenarioFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing scenario file {}", path.display()))?;
    file.into_scenario()
        .with_context(|| format!("invalid scenario in {}", path.display()))
}

pub fn run(a: DiagnoseArgs) -> Result<u8> {
    let scenarios = match (&a.scenario, &a.scenario_file) {
        (Some(name), _) => vec![preset(name)?],
        (None, Some(path)) => vec![load_scenario_file(path)?],
        (None, None) => CANONICAL_SUITE
            .iter()
            .map(|n| preset(n))
            .collect::<Result<_, _>>()?,
    };
    let rules = a
        .rules
        .iter()
        .map(|r| Rule::parse(r))
        .collect::<Result<Vec<_>, _>>()?;
    let mode = match a.shots {
        Some(shots) => Mode::Sampled {
            shots,
            seed: a.seed.seed,
            delta: a.delta,
        },
        None => Mode::Exact,
    };
    let reports = scenarios
        .iter()
        .map(|s| {
            emit_report(s, &rules, mode, a.noise).with_context(|| format!("scenario `{}`", s.name))
        })
        .collect::<Result<Vec<DiagnosticReport>>>()?;
    let text = match a.format {
        Format::Json if reports.len() == 1 => to_json(&reports[0])?,
        Format::Json => to_json(&reports)?,
        Format::Text => reports
            .iter()
            .map(DiagnosticReport::to_text)
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Csv => {
            let mut out = String::from("scenario,rule,control,quantity,threshold,verdict\n");
            for r in &reports {
                for c in &r.checks {
                    let num = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:e}"));
                    out.push_str(&format!(
                        "{},{:?},{},{},{},{}\n",
                        r.scenario,
                        c.rule,
                        c.context.as_deref().unwrap_or(""),
                        num(c.quantity),
                        num(c.threshold),
                        c.verdict.as_str()
                    ));
                }
            }
            out
        }
    };
    emit(&text, a.output.as_deref())?;
    Ok(if reports.iter().any(DiagnosticReport::has_violation) {
        EXIT_VIOLATION
    } else {
        0
    })
}
