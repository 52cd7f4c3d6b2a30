//! Exact finite-stage computations for p-adic Duffin–Schaeffer sets.

pub mod ball_set;
pub mod constructions;
pub mod ds_sets;
pub mod error;
pub mod number_theory;
pub mod padic;
pub mod rational;
pub mod verification;

pub use ball_set::BallSet;
pub use error::{Error, Result};
pub use rational::Rational;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/balls.md")]
    mod balls {}
    #[doc = include_str!("../../../book/src/ball-sets.md")]
    mod ball_sets {}
    #[doc = include_str!("../../../book/src/stage-sets.md")]
    mod stage_sets {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/targets.md")]
    mod targets {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
