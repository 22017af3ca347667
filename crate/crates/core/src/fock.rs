//! Coherent-state amplitudes and the sector-decomposed system state.
//!
//! The initial condition puts both two-level systems in their ground states
//! and the field in a coherent state, so the basis vector `|-, g-, N>` of
//! sector `n = N - 2` starts with amplitude `q_N` and everything else with
//! zero.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{sector_dim, ModelParams, SectorPolicy};

/// Largest discarded coherent-state weight tolerated by [`initial_state`].
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Truncated coherent-state expansion `q_n = exp(-|a|^2/2) a^n / sqrt(n!)`.
#[derive(Debug, Clone)]
pub struct CoherentAmplitudes {
    pub alpha: Complex64,
    /// Amplitudes `q_0..=q_n_max`.
    pub q: Vec<Complex64>,
    /// Weight beyond the truncation: `1 - sum |q_n|^2`, clamped at zero.
    pub tail_mass: f64,
}

/// Coherent amplitudes via the stable ratio recurrence
/// `q_{n+1} = q_n * alpha / sqrt(n + 1)`.
pub fn coherent_amplitudes(alpha: Complex64, n_max: usize) -> CoherentAmplitudes {
    let mut q = Vec::with_capacity(n_max + 1);
    q.push(Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0));
    for n in 0..n_max {
        let next = q[n] * alpha / ((n + 1) as f64).sqrt();
        q.push(next);
    }
    let mass: f64 = q.iter().map(|z| z.norm_sqr()).sum();
    CoherentAmplitudes {
        alpha,
        q,
        tail_mass: (1.0 - mass).max(0.0),
    }
}

/// Complex amplitudes of every sector at one scaled time.
#[derive(Debug, Clone)]
pub struct SystemState {
    /// Scaled time `tau = rate * t`.
    pub tau: f64,
    /// Sector index -> amplitude vector of that block's dimension.
    pub sectors: BTreeMap<i32, Vec<Complex64>>,
    pub policy: SectorPolicy,
}

impl SystemState {
    /// Squared norm of one sector's amplitude vector.
    pub fn sector_norm(&self, sector: i32) -> f64 {
        self.sectors
            .get(&sector)
            .map(|v| v.iter().map(|z| z.norm_sqr()).sum())
            .unwrap_or(0.0)
    }
}

/// Assemble the ground-ground coherent initial state at `tau = 0`.
///
/// Under [`SectorPolicy::Ansatz`] the two lowest sectors are absent and the
/// state keeps the resulting norm deficit `|q_0|^2 + |q_1|^2`.
pub fn initial_state(mp: &ModelParams) -> Result<SystemState> {
    mp.validate()?;
    let amps = coherent_amplitudes(mp.alpha, mp.n_max);
    if amps.tail_mass > TAIL_TOLERANCE {
        return Err(Error::InvalidParams(format!(
            "n_max = {} truncates {:.3e} of the coherent-state weight for |alpha| = {}; \
             increase n_max (auto selection would use {})",
            mp.n_max,
            amps.tail_mass,
            mp.alpha.norm(),
            ModelParams::auto_n_max(mp.alpha),
        )));
    }
    let mut sectors = BTreeMap::new();
    for sector in mp.sector_range() {
        let mut v = vec![Complex64::new(0.0, 0.0); sector_dim(sector)];
        v[0] = amps.q[(sector + 2) as usize];
        sectors.insert(sector, v);
    }
    let state = SystemState {
        tau: 0.0,
        sectors,
        policy: mp.sectors,
    };
    if mp.sectors == SectorPolicy::Ansatz && total_norm(&state) == 0.0 {
        return Err(Error::InvalidParams(
            "the ansatz truncation carries no amplitude for this initial condition \
             (all coherent weight sits in the dropped low sectors)"
                .into(),
        ));
    }
    Ok(state)
}

/// Total squared norm over all sectors and components.
pub fn total_norm(s: &SystemState) -> f64 {
    s.sectors.values().flatten().map(|z| z.norm_sqr()).sum()
}

/// Expectation of the conserved excitation number: sector `n` carries
/// `n + 2` excitations (zero for the lowest sector).
pub fn excitation_expectation(s: &SystemState) -> f64 {
    s.sectors
        .iter()
        .map(|(n, v)| (n + 2) as f64 * v.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum()
}
