//! Exponent arithmetic of the differentiability bootstrap, order estimation
//! from computed solutions, and ratio checks of the local estimates.
//!
//! All estimate checks strip the unspecified constants and report
//! `lhs / rhs` per step size; boundedness, refinement stability and
//! homogeneity of those ratios are what can be tested.

mod embedding;
mod estimates;
mod limits;
mod order;
mod scheme;

pub use embedding::{besov_trend, embedding_terms, verify_besov_embedding, EmbeddingTerms, HeatDecay};
pub use estimates::{
    iteration_trace, m_gamma, verify_caccioppoli, verify_improvement, LocalSetup, Trace, TraceStage,
};
pub use limits::{
    bbm_closed_form, bbm_limit, p_laplace_reference, s_sweep_to_plaplacian, BbmRow, BbmTable, SweepFamily,
    SweepRow, SweepTable,
};
pub use order::{estimate_order, RegularityReport};
pub use scheme::{classify_regime, gamma_closed_form, robust_constant_regime, Regime, RegularityScheme};
