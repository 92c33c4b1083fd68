//! Ladder-operator series of the field factors, their second-order ordered
//! forms, truncated Fock-space operators and the norm-based truncation engine.

pub mod ladder;
pub mod ordered;
pub mod series;
pub mod truncation;

pub use crate::special::hermite;
pub use ladder::{ladder_monomial_matrix, position_matrix, truncated_position_norm, FockSpace};
pub use ordered::{ordered_p1_forms, OrderedForm};
pub use series::{
    a1_terms, a2_terms, b0_terms, b1_terms, b2_terms, closed_form, evaluate, terms, Caps, FunctionId,
    SeriesTerm, Sign,
};
pub use truncation::{
    beam_function_set, fractional_contribution, heating_scenarios, truncation_report, FunctionTerms,
    HeatingHypotheses, NormCache, Scenario, TruncationPolicy, TruncationReport,
};
