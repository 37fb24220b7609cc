use serde::{Deserialize, Serialize};

use crate::channels::Instrument;
use crate::error::{Error, Result};
use crate::gates;
use crate::process::{CausalOrder, InterventionSite, OutcomeSite, SwitchScenario, Wiring};
use crate::sim::{Circuit, NoiseModel};
use crate::tensor::{ComplexMatrix, SpaceLabel};

/// How the control qubit enters the declared model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlRole {
    /// Prepared in superposition and measured in any basis.
    Coherent,
    /// Treated as a classical variable selecting the order.
    Classical,
    /// No control: a definite order.
    Absent,
}

/// The causal claims a scenario is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeclaredStructure {
    /// Gates the insensitivity check: only meaningful when A is declared not to reach B.
    pub a_influences_b: bool,
    /// Gates the observe/do equivalence at A.
    pub a_parentless: bool,
    pub control_role: ControlRole,
}

/// Observing A with an instrument versus forcing it with `do(σ)`.
#[derive(Clone, Debug)]
pub struct InterventionPair {
    pub observe: Instrument,
    pub do_state: ComplexMatrix,
}

#[derive(Clone, Debug)]
pub enum Generator {
    /// Exact conditionals from process matrices and the Born rule.
    Process(SwitchScenario),
    /// A measured circuit with control and target bits; only the control-conditioned target
    /// distributions are available.
    Circuit(Circuit),
}

#[derive(Clone, Debug)]
pub struct CausalScenario {
    pub name: String,
    pub generator: Generator,
    pub declared: DeclaredStructure,
    /// Required by the observe/do checks; circuit scenarios carry none.
    pub intervention_pair: Option<InterventionPair>,
}

pub const PRESET_NAMES: [&str; 5] = [
    "switch-coherent",
    "switch-decohered",
    "null-identical-arms",
    "fixed-order-ab",
    "fixed-order-ba",
];

fn z_instrument(space: &str) -> Instrument {
    Instrument::computational(SpaceLabel::qubit(space))
}

fn switch_base(control: ComplexMatrix) -> SwitchScenario {
    SwitchScenario {
        channel_a: vec![gates::h()],
        channel_b: vec![gates::x()],
        target_prep: gates::plus(),
        wiring: Wiring::Switch {
            control_prep: control,
        },
        site: InterventionSite::TargetInput,
        outcome_effects: gates::z_basis(),
        outcome_site: OutcomeSite::Future,
        noise: None,
    }
}

fn fixed_base(order: CausalOrder) -> SwitchScenario {
    SwitchScenario {
        channel_a: vec![gates::h()],
        channel_b: vec![gates::x()],
        target_prep: gates::ket0(),
        wiring: Wiring::Fixed(order),
        site: InterventionSite::AtA,
        outcome_effects: gates::z_basis(),
        outcome_site: OutcomeSite::AfterB,
        noise: None,
    }
}

const SWITCH_DECLARED: DeclaredStructure = DeclaredStructure {
    a_influences_b: true,
    a_parentless: false,
    control_role: ControlRole::Coherent,
};

/// One of the canonical scenarios in `PRESET_NAMES`.
pub fn preset(name: &str) -> Result<CausalScenario> {
    let pair = |observe: Instrument| {
        Some(InterventionPair {
            observe,
            do_state: gates::ket0(),
        })
    };
    let (generator, declared, intervention_pair) = match name {
        "switch-coherent" => (
            Generator::Process(switch_base(gates::plus())),
            SWITCH_DECLARED,
            pair(z_instrument("T")),
        ),
        "switch-decohered" => (
            Generator::Process(switch_base(gates::maximally_mixed(2))),
            DeclaredStructure {
                control_role: ControlRole::Classical,
                ..SWITCH_DECLARED
            },
            pair(z_instrument("T")),
        ),
        "null-identical-arms" => {
            // Measures Z and always re-prepares |0⟩: the same channel as do(|0⟩⟨0|).
            let observe = Instrument::new(
                gates::z_basis(),
                vec![gates::ket0(), gates::ket0()],
                SpaceLabel::qubit("T"),
            )?;
            (
                Generator::Process(switch_base(gates::plus())),
                SWITCH_DECLARED,
                pair(observe),
            )
        }
        "fixed-order-ab" => (
            Generator::Process(fixed_base(CausalOrder::AB)),
            DeclaredStructure {
                a_influences_b: true,
                a_parentless: true,
                control_role: ControlRole::Absent,
            },
            pair(z_instrument("A")),
        ),
        "fixed-order-ba" => (
            Generator::Process(fixed_base(CausalOrder::BA)),
            DeclaredStructure {
                a_influences_b: false,
                a_parentless: false,
                control_role: ControlRole::Absent,
            },
            pair(z_instrument("A")),
        ),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "unknown scenario `{name}`; expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(CausalScenario {
        name: name.to_string(),
        generator,
        declared,
        intervention_pair,
    })
}

impl CausalScenario {
    /// Copy with the noise model replaced. Circuit generators are rebuilt by the caller.
    pub fn with_noise(&self, noise: Option<NoiseModel>) -> Result<Self> {
        let mut out = self.clone();
        match &mut out.generator {
            Generator::Process(s) => s.noise = noise,
            Generator::Circuit(_) if noise.is_some() => {
                return Err(Error::InvalidArgument(
                    "noise for circuit scenarios is part of the circuit".into(),
                ))
            }
            Generator::Circuit(_) => {}
        }
        Ok(out)
    }

    pub fn has_control(&self) -> bool {
        match &self.generator {
            Generator::Process(s) => s.control_prep().is_some(),
            Generator::Circuit(c) => c.control_qubit.is_some(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.generator {
            Generator::Process(s) => {
                s.validate()?;
                if let Some(p) = &self.intervention_pair {
                    if p.observe.space().dim != 2 || p.do_state.rows() != 2 {
                        return Err(Error::InvalidArgument(
                            "intervention pair must act on a qubit".into(),
                        ));
                    }
                }
                Ok(())
            }
            Generator::Circuit(c) => {
                c.validate()?;
                if c.bit_roles.is_none() {
                    return Err(Error::InvalidCircuit(
                        "circuit scenario needs control and target bit roles".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Serialized form of a custom process scenario.
///
/// Channels and states are named (`h`, `x`, `y`, `z`, `i`; `0`, `1`, `+`, `-`, `mixed`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    /// `switch`, `A<B` or `B<A`.
    pub wiring: String,
    /// Control preparation; switch wiring only.
    #[serde(default)]
    pub control: Option<String>,
    pub channel_a: String,
    pub channel_b: String,
    pub target: String,
    pub site: InterventionSite,
    pub outcome_site: OutcomeSite,
    /// `z` or `x`.
    #[serde(default = "default_basis")]
    pub outcome_basis: String,
    /// Basis measured by the observe arm (`z` or `x`).
    #[serde(default = "default_basis")]
    pub observe_basis: String,
    /// States re-prepared per observe outcome; defaults to the measured basis states.
    #[serde(default)]
    pub observe_outputs: Option<Vec<String>>,
    pub do_state: String,
    pub declared: DeclaredStructure,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
}

fn default_basis() -> String {
    "z".into()
}

fn basis(name: &str) -> Result<Vec<ComplexMatrix>> {
    match name.to_ascii_lowercase().as_str() {
        "z" => Ok(gates::z_basis()),
        "x" => Ok(gates::x_basis()),
        _ => Err(Error::InvalidArgument(format!("unknown basis `{name}`"))),
    }
}

fn state(name: &str) -> Result<ComplexMatrix> {
    gates::named_state(name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown state `{name}`")))
}

fn unitary(name: &str) -> Result<ComplexMatrix> {
    gates::named_unitary(name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown gate `{name}`")))
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<CausalScenario> {
        let wiring = match (self.wiring.as_str(), &self.control) {
            ("switch", Some(c)) => Wiring::Switch {
                control_prep: state(c)?,
            },
            ("switch", None) => return Err(Error::MissingControl),
            ("A<B", None) => Wiring::Fixed(CausalOrder::AB),
            ("B<A", None) => Wiring::Fixed(CausalOrder::BA),
            ("A<B" | "B<A", Some(_)) => {
                return Err(Error::InvalidArgument(
                    "fixed-order wiring takes no control".into(),
                ))
            }
            (w, _) => return Err(Error::InvalidArgument(format!("unknown wiring `{w}`"))),
        };
        let measured = basis(&self.observe_basis)?;
        let outputs = match &self.observe_outputs {
            Some(names) => names.iter().map(|n| state(n)).collect::<Result<Vec<_>>>()?,
            None => measured.clone(),
        };
        let observe = Instrument::new(measured, outputs, SpaceLabel::qubit("A"))?;
        let scenario = CausalScenario {
            name: self.name,
            generator: Generator::Process(SwitchScenario {
                channel_a: vec![unitary(&self.channel_a)?],
                channel_b: vec![unitary(&self.channel_b)?],
                target_prep: state(&self.target)?,
                wiring,
                site: self.site,
                outcome_effects: basis(&self.outcome_basis)?,
                outcome_site: self.outcome_site,
                noise: self.noise,
            }),
            declared: self.declared,
            intervention_pair: Some(InterventionPair {
                observe,
                do_state: state(&self.do_state)?,
            }),
        };
        scenario.validate()?;
        Ok(scenario)
    }
}
