use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::Quote;

use super::Trajectory;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivedError {
    #[error("trajectory crashed at t = {0}")]
    Crashed(u64),
    #[error("trajectory has no states")]
    Empty,
}

/// Processes read off a trajectory observed in pairs of periods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedProcesses {
    /// `D*_t = D_{2t}` together with the original time `2t`.
    pub even_states: Vec<(u64, Quote)>,
    /// `eps_t = m(D*_{t+1}) - m(D*_t)`; `D*_{t+1} = D*_t + eps_t (1, 1)` when spreads agree.
    pub eps: Vec<f64>,
    /// `eta_t = s_{t+1} / s_t` over every period.
    pub eta: Vec<f64>,
}

impl DerivedProcesses {
    /// `eta_{2t} eta_{2t+1}` for every complete pair.
    pub fn eta_pair_products(&self) -> Vec<f64> {
        self.eta.chunks_exact(2).map(|p| p[0] * p[1]).collect()
    }
}

pub fn derived_processes(traj: &Trajectory) -> Result<DerivedProcesses, DerivedError> {
    if let Some(c) = traj.crash {
        return Err(DerivedError::Crashed(c.t));
    }
    if traj.steps.is_empty() {
        return Err(DerivedError::Empty);
    }
    let even_states: Vec<(u64, Quote)> = traj.steps.iter().step_by(2).map(|s| (s.t, s.quote)).collect();
    let eps = even_states.windows(2).map(|w| w[1].1.mid() - w[0].1.mid()).collect();
    let eta = traj.steps.windows(2).map(|w| w[1].quote.spread() / w[0].quote.spread()).collect();
    Ok(DerivedProcesses { even_states, eps, eta })
}

/// `{-alpha s, -alpha s/(1+alpha), alpha s/(1+alpha), alpha s}`
pub fn eps_value_set(alpha: f64, s: f64) -> [f64; 4] {
    let small = alpha * s / (1.0 + alpha);
    let large = alpha * s;
    [-large, -small, small, large]
}
