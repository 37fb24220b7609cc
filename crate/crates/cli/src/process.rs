use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use causalq_core::channels::unitary_channel;
use causalq_core::gates::{named_state, named_unitary};
use causalq_core::process::{
    born_probability, effect_on, fixed_order_process, identity_effect, switch_process_matrix,
    validate_process, CausalOrder, ProcessMatrix, A_I, A_O, B_I, B_O, CONTROL, FUTURE,
};
use causalq_core::tensor::{ComplexMatrix, LabeledOperator, MatrixJson, SpaceLabel};
use serde::Serialize;

use crate::output::{emit, to_json};
use crate::{ProcessCommand, EXIT_VIOLATION};

fn state(name: &str) -> Result<ComplexMatrix> {
    named_state(name).ok_or_else(|| anyhow!("unknown state `{name}`"))
}

fn unitary(name: &str) -> Result<ComplexMatrix> {
    named_unitary(name).ok_or_else(|| anyhow!("unknown gate `{name}`"))
}

fn load(path: &Path) -> Result<ProcessMatrix> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let j: MatrixJson = serde_json::from_str(&text)
        .with_context(|| format!("malformed matrix file {}", path.display()))?;
    ProcessMatrix::from_json(&j)
        .with_context(|| format!("invalid process matrix in {}", path.display()))
}

fn write_process(w: &ProcessMatrix, output: Option<&Path>) -> Result<()> {
    emit(&to_json(&w.to_json())?, output)
}

/// Operators for `contract`: control and future effects, and gates for A and B.
/// Parties without an entry apply the identity channel; `F` and `C` default to the identity effect.
fn effects_for(w: &ProcessMatrix, specs: &[String]) -> Result<Vec<LabeledOperator>> {
    let mut control = None;
    let mut future = None;
    let mut gate_a = None;
    let mut gate_b = None;
    for spec in specs.iter().filter(|s| !s.trim().is_empty()) {
        let (k, v) = spec
            .split_once('=')
            .ok_or_else(|| anyhow!("effect `{spec}` is not of the form key=value"))?;
        let slot = match k.trim() {
            "c" | "C" => &mut control,
            "Ob" | "F" => &mut future,
            "A" => &mut gate_a,
            "B" => &mut gate_b,
            other => bail!("unknown effect key `{other}`; expected c, Ob, A or B"),
        };
        if slot.replace(v.trim().to_string()).is_some() {
            bail!("effect key `{k}` given twice");
        }
    }
    let names = w.names();
    let has = |n: &str| names.contains(&n);
    let effect = |space: &str, v: &Option<String>| -> Result<LabeledOperator> {
        let label = w
            .labeled()
            .space(space)
            .cloned()
            .unwrap_or_else(|| SpaceLabel::qubit(space));
        match v.as_deref() {
            None | Some("identity") | Some("i") => Ok(identity_effect(&label)),
            Some(s) => Ok(effect_on(&state(s)?, &label)?),
        }
    };
    let mut out = Vec::new();
    for (party, input, output, gate) in [("A", A_I, A_O, &gate_a), ("B", B_I, B_O, &gate_b)] {
        match (has(input) && has(output), gate) {
            (true, g) => {
                let u = unitary(g.as_deref().unwrap_or("identity"))?;
                let j = unitary_channel(&u)?.with_spaces(input, output)?;
                out.push(j.to_labeled());
            }
            (false, Some(_)) => bail!("process has no party {party}"),
            (false, None) => {}
        }
    }
    if has(FUTURE) {
        out.push(effect(FUTURE, &future)?);
    } else if future.is_some() {
        bail!("process has no future space {FUTURE}");
    }
    if has(CONTROL) {
        out.push(effect(CONTROL, &control)?);
    } else if control.is_some() {
        bail!("process has no control space {CONTROL}");
    }
    Ok(out)
}

#[derive(Serialize)]
struct Contraction {
    probability: f64,
    effects: Vec<String>,
}

pub fn run(cmd: ProcessCommand) -> Result<u8> {
    match cmd {
        ProcessCommand::BuildSwitch {
            control,
            target,
            output,
        } => {
            let w = switch_process_matrix(&state(&control)?, &state(&target)?)?;
            write_process(&w, output.as_deref())?;
            Ok(0)
        }
        ProcessCommand::BuildFixed {
            order,
            target,
            output,
        } => {
            let order = match order.to_ascii_lowercase().as_str() {
                "ab" | "a<b" => CausalOrder::AB,
                "ba" | "b<a" => CausalOrder::BA,
                other => bail!("unknown order `{other}`; expected ab or ba"),
            };
            let w = fixed_order_process(&state(&target)?, order)?;
            write_process(&w, output.as_deref())?;
            Ok(0)
        }
        ProcessCommand::Validate { file, tol } => {
            let w = load(&file)?;
            let v = validate_process(&w, tol);
            emit(&to_json(&v)?, None)?;
            Ok(if v.is_valid() { 0 } else { EXIT_VIOLATION })
        }
        ProcessCommand::Contract { file, effects } => {
            let w = load(&file)?;
            let ops = effects_for(&w, &effects)?;
            let probability = born_probability(&w, &ops)?;
            emit(
                &to_json(&Contraction {
                    probability,
                    effects,
                })?,
                None,
            )?;
            Ok(0)
        }
    }
}
