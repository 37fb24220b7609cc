//! Channels in Choi form, Kraus conversion, instruments and interventions.

mod choi;
mod instrument;

pub(crate) use choi::validate_state;
pub use choi::{
    apply_channel, apply_kraus, choi_from_kraus, compose, conditional_state, depolarizing,
    depolarizing_kraus, do_intervention, is_cptp, kraus_channel, kraus_completeness_error,
    kraus_from_choi, unitary_channel, ChoiKind, ChoiOperator, CptpVerdict, KRAUS_CUTOFF,
};
pub use instrument::{apply_instrument, validate_povm, Branch, Instrument, InstrumentJson};
