//! Trajectories of the quote under explicit words or the switching law.

mod derived;
mod lattice;
mod replay;
mod simulate;
mod verify;

use serde::{Deserialize, Serialize};

use crate::domain::{Quote, TraderType};
use crate::regions::RegionLabels;

pub use derived::{derived_processes, eps_value_set, DerivedError, DerivedProcesses};
pub use lattice::{reachable_lattice, Lattice};
pub use replay::{constant_type_limit, replay, replay_constant, replay_exact, ExactReplay};
pub use simulate::{
    monte_carlo, regime_start, simulate, simulate_stream, trajectory_rng, walk, StabilitySummary, WalkStep,
};
pub use verify::{verify_proposition, Budget, Check, Proposition, VerificationReport, VerifyError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub t: u64,
    pub quote: Quote,
    /// Type whose trade produced this quote; `None` at `t = 0`.
    pub trader: Option<TraderType>,
    pub labels: RegionLabels,
}

/// First clipped step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crash {
    pub t: u64,
    pub quote: Quote,
}

/// Visited quotes from `t = 0`; when the path crashed, the last step is the
/// clipped boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub steps: Vec<Step>,
    pub crash: Option<Crash>,
    pub seed: u64,
}

impl Trajectory {
    pub fn last_quote(&self) -> Option<Quote> {
        self.steps.last().map(|s| s.quote)
    }

    pub fn crashed(&self) -> bool {
        self.crash.is_some()
    }
}
