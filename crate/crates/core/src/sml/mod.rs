//! Zero sets of linear recurrences over `F_{p^s}(t)`: finite fields, the
//! perfect closure, sequences, and the kernel automaton of `{n : a_n = 0}`.

mod closure;
mod field;
mod sequence;
mod zeros;

pub use closure::PerfectClosureElem;
pub use field::{Field, Poly, MAX_FIELD_SIZE};
pub use sequence::{
    closed_form_from_recurrence, cross_validate, cross_validate_backward, ClosedFormSequence, LinearRecurrence,
    SequenceInput, ITERATION_BUDGET,
};
pub use zeros::{
    analyze_zero_set, brute_force_mismatch, digits_lsd, progression_dfa, row_reduce, zero_set_automaton,
    zero_set_bidirectional, zero_set_kernel, KernelState, ZeroSetKernel, ZeroSetReport, MAX_PROGRESSION_MODULUS,
    SML_STATE_CAP,
};
