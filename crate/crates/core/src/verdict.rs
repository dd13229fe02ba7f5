//! Queries, verdicts and their certificates.

use std::fmt;
use std::str::FromStr;

use crate::bounds::BoundCert;
use crate::strategy::StrategySpec;
use crate::support::SupportSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SyncMode {
    Always,
    Eventually,
    Weakly,
    Strongly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WinMode {
    Sure,
    AlmostSure,
    LimitSure,
    Positive,
    Bounded,
}

impl SyncMode {
    pub const ALL: [SyncMode; 4] = [
        SyncMode::Always,
        SyncMode::Eventually,
        SyncMode::Weakly,
        SyncMode::Strongly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SyncMode::Always => "always",
            SyncMode::Eventually => "eventually",
            SyncMode::Weakly => "weakly",
            SyncMode::Strongly => "strongly",
        }
    }
}

impl WinMode {
    pub const ALL: [WinMode; 5] = [
        WinMode::Sure,
        WinMode::AlmostSure,
        WinMode::LimitSure,
        WinMode::Positive,
        WinMode::Bounded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WinMode::Sure => "sure",
            WinMode::AlmostSure => "almost-sure",
            WinMode::LimitSure => "limit-sure",
            WinMode::Positive => "positive",
            WinMode::Bounded => "bounded",
        }
    }

    pub fn is_adversarial(self) -> bool {
        matches!(self, WinMode::Positive | WinMode::Bounded)
    }
}

impl fmt::Display for SyncMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for WinMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SyncMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SyncMode::ALL
            .into_iter()
            .find(|m| m.name() == s || (s == "event" && *m == SyncMode::Eventually))
            .ok_or_else(|| format!("unknown synchronizing mode {s:?}"))
    }
}

impl FromStr for WinMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let alias = match s {
            "almost" | "as" => "almost-sure",
            "limit" | "ls" => "limit-sure",
            "pos" => "positive",
            "bound" => "bounded",
            other => other,
        };
        WinMode::ALL
            .into_iter()
            .find(|m| m.name() == alias)
            .ok_or_else(|| format!("unknown winning mode {s:?}"))
    }
}

/// A membership question: is `initial` winning for `sync`/`win` in `target`?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeQuery {
    pub sync: SyncMode,
    pub win: WinMode,
    pub target: SupportSet,
    pub initial: SupportSet,
}

impl ModeQuery {
    pub fn new(sync: SyncMode, win: WinMode, target: SupportSet, initial: SupportSet) -> Self {
        assert!(!initial.is_empty(), "initial support must be nonempty");
        assert_eq!(target.width(), initial.width());
        Self {
            sync,
            win,
            target,
            initial,
        }
    }
}

/// How a limit-sure eventually verdict was reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LimitRoute {
    /// Already sure winning: `s0 ⊆ Pre^k(T)`.
    Sure { k: usize },
    /// `s0 × {phase}` is almost-sure winning for `◇(R × {0})` in `M × [r]`;
    /// `region` is that almost-sure region in the product.
    Phase { phase: usize, region: SupportSet },
    /// Neither route applies.
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// `s0 ⊆ Pre^k(T)`.
    SureEventually { k: usize },
    /// `S ⊆ T`, `S ⊆ Pre^r(S)`, `s0 ⊆ Pre^k(S)`.
    SureWeakly { set: SupportSet, k: usize, r: usize },
    /// Predecessor lasso data `Pre^k(T) = Pre^{k+r}(T) = R` and the route taken.
    LimitSureEventually {
        k: usize,
        r: usize,
        repeating: SupportSet,
        route: LimitRoute,
        /// States `q` of the initial support with `{q}` itself not winning.
        failing_states: SupportSet,
    },
    /// `s0 ∈ win_lim^event(T')` and `T' ∈ win_lim^event(Pre(T'))`.
    AlmostSureWeakly { subset: SupportSet },
    /// Almost-sure eventually as the union of its two sub-regions.
    AlmostSureEventually {
        sure: Option<usize>,
        weakly: Option<SupportSet>,
    },
    /// Sure safety region of `T`.
    Always { safety_region: SupportSet },
    /// Safety region `S` of `T` and the sure (or almost-sure) region of `◇S`.
    Strongly {
        safety_region: SupportSet,
        reach_region: SupportSet,
    },
}

/// Lemma-6 style conditions computed on the uniform-strategy support lasso.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdvVerdictDetail {
    /// Every support `S_i` meets `T`.
    pub condition1: bool,
    /// Every loop support meets `Ε ∩ T`.
    pub condition2: bool,
    /// Smallest `i` with `S_i ∩ T = ∅`, when condition (1) fails.
    pub failing_index1: Option<usize>,
    /// Smallest loop index `i ≥ ℓ` with `S_i ∩ Ε ∩ T = ∅`, when condition (2) fails.
    pub failing_index2: Option<usize>,
    pub loop_start: usize,
    pub period: usize,
    pub switch_point: usize,
    /// For positive weakly: the reachable-and-self-reaching graph test,
    /// reported alongside the lasso answer.
    pub graph_test: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub query: ModeQuery,
    pub answer: bool,
    pub certificate: Option<Certificate>,
    pub strategy: Option<StrategySpec>,
    pub detail: Option<AdvVerdictDetail>,
    pub bounds: Vec<BoundCert>,
}

impl Verdict {
    pub(crate) fn new(query: &ModeQuery, answer: bool) -> Self {
        Self {
            query: query.clone(),
            answer,
            certificate: None,
            strategy: None,
            detail: None,
            bounds: Vec::new(),
        }
    }

    pub(crate) fn with_certificate(mut self, c: Certificate) -> Self {
        self.certificate = Some(c);
        self
    }

    pub(crate) fn with_strategy(mut self, s: StrategySpec) -> Self {
        self.strategy = Some(s);
        self
    }
}
