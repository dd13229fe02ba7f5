//! Qualitative analysis of synchronizing objectives in Markov decision
//! processes.
//!
//! The engine decides sure, almost-sure and limit-sure winning as well as
//! positive and bounded winning for the always, eventually, weakly and
//! strongly synchronizing modes, synthesizes witness strategies, evaluates
//! the isolation bounds exactly and checks verdicts against brute-force
//! oracles.

pub mod adversarial;
pub mod bounds;
pub mod classic;
pub mod corpus;
pub mod limits;
pub mod mdp;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod region;
pub mod strategy;
pub mod support;
pub mod verdict;

pub use limits::{GuardError, Limits};
pub use mdp::{Dist, Mdp, ModelError};
pub use model::{parse_model, Model};
pub use rational::Rational;
pub use strategy::StrategySpec;
pub use support::SupportSet;
pub use verdict::{ModeQuery, SyncMode, Verdict, WinMode};

/// Decides one query with the matching engine.
pub fn decide(
    m: &Mdp,
    sync: SyncMode,
    win: WinMode,
    target: &SupportSet,
    initial: &SupportSet,
    limits: &Limits,
) -> Result<Verdict, GuardError> {
    match win {
        WinMode::Sure => classic::decide_sure(m, sync, target, initial, limits),
        WinMode::AlmostSure => classic::decide_almost_sure(m, sync, target, initial, limits),
        WinMode::LimitSure => classic::decide_limit_sure(m, sync, target, initial, limits),
        WinMode::Positive => adversarial::decide_positive(m, sync, target, initial, limits),
        WinMode::Bounded => adversarial::decide_bounded(m, sync, target, initial, limits),
    }
}
