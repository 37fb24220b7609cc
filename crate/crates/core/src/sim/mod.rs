//! Gate-level simulation of the switch circuit: statevector, density matrix and seeded sampling.

mod circuit;
mod noise;
mod sampling;
mod simulate;
mod switch;

pub use circuit::{bit_labels, decohered_control_variant, BitRoles, Circuit, Gate, Op};
pub use noise::NoiseModel;
pub use sampling::{sample_shots, sample_shots_chunked, Counts, DEFAULT_CHUNK};
pub use simulate::{
    simulate_density, simulate_exact, simulate_statevector, target_given_control,
    OutcomeDistribution,
};
pub use switch::{
    build_switch_circuit, build_switch_circuit_with, conditional_tv, run_switch_experiment, SwitchRun,
    ControlPreparation, ANCILLA_QUBIT, CONTROL_QUBIT, SWITCH_BIT_ROLES, TARGET_QUBIT,
};
