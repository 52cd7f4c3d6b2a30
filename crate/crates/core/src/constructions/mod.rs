//! Approximation functions built by the two constructions.

mod psi;
pub mod spectrum;
pub mod theorem2;

pub use psi::{
    psi_prime_transform, real_prime_psi, theorem1_psi, theorem1_stage_indices, theorem2_psi, PsiRule, ZeroOneLevel,
};
pub use spectrum::{greedy_expansion, spectrum_membership, spectrum_value, Expansion, Membership, SpectrumDigits};
pub use theorem2::{theorem2_tables, Case2Tables, CaseId, LevelTable, RulePart, Witness};
