//! Process matrices, the generalized Born rule, link products, fixed-order processes and
//! the quantum switch in both supermap and process-matrix form.

mod builders;
mod matrix;
mod scenario;

pub use builders::{
    fixed_order_process, party_spaces, switch_process_matrix, switch_supermap, CausalOrder, A_I,
    A_O, B_I, B_O, FUTURE,
};
pub use matrix::{
    born_probability, contract, effect_on, identity_effect, interference_norm, link_product,
    parties, validate_process, ProcessMatrix, ProcessValidation, CONTROL, VALIDATION_TRIALS,
};
pub use scenario::{
    born_joint, supermap_joint, Arm, InterventionSite, OutcomeSite, Resolved, SwitchScenario,
    Wiring,
};
