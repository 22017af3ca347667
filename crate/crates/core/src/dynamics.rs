//! Time evolution of a sector-decomposed state.
//!
//! Two production solvers and one brute-force reference path:
//!
//! * [`evolve_exact`] - closed-form spectral propagator per block, exact up to
//!   roundoff at any time,
//! * [`evolve_rk4`] - fixed-step fourth-order Runge-Kutta integration of the
//!   same blocks, used to cross-check the spectral route,
//! * [`dense_oracle`] - full-space propagation over the flattened basis with
//!   the Hamiltonian assembled from operator rules (see [`crate::oracle`]),
//!   sharing nothing with the block construction beyond the primitive
//!   eigensolver.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::SystemState;
use crate::linalg::{sym_eigen, DMat};
use crate::model::{build_block, ModelParams};
use crate::oracle;

/// Hard cap on the flattened dimension accepted by [`dense_oracle`].
pub const DENSE_DIM_LIMIT: usize = 10_000;

/// Spectral decomposition of one sector's block Hamiltonian.
#[derive(Debug, Clone)]
pub struct BlockSpectral {
    pub sector: i32,
    pub eigenvalues: Vec<f64>,
    /// Orthogonal matrix whose column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: DMat,
}

/// Cached spectral data for every sector plus the sampling grid.
#[derive(Debug, Clone)]
pub struct EvolutionPlan {
    blocks: BTreeMap<i32, BlockSpectral>,
    params: ModelParams,
    sample_times: Vec<f64>,
}

impl EvolutionPlan {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn sample_times(&self) -> &[f64] {
        &self.sample_times
    }

    pub fn blocks(&self) -> &BTreeMap<i32, BlockSpectral> {
        &self.blocks
    }

    pub fn spectral(&self, sector: i32) -> Option<&BlockSpectral> {
        self.blocks.get(&sector)
    }
}

/// Decompose every sector of `mp` and cache the results together with a
/// strictly increasing sampling grid that starts at zero.
pub fn plan(mp: &ModelParams, sample_times: &[f64]) -> Result<EvolutionPlan> {
    mp.validate()?;
    if sample_times.is_empty() {
        return Err(Error::InvalidParams(
            "sample times must not be empty".into(),
        ));
    }
    if sample_times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParams("sample times must be finite".into()));
    }
    if sample_times[0] != 0.0 {
        return Err(Error::InvalidParams(format!(
            "sample times must start at 0, got {}",
            sample_times[0]
        )));
    }
    if sample_times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams(
            "sample times must be strictly increasing".into(),
        ));
    }
    let mut blocks = BTreeMap::new();
    for sector in mp.sector_range() {
        let block = build_block(sector, mp)?;
        let eig = sym_eigen(block.matrix())?;
        blocks.insert(
            sector,
            BlockSpectral {
                sector,
                eigenvalues: eig.values,
                eigenvectors: eig.vectors,
            },
        );
    }
    Ok(EvolutionPlan {
        blocks,
        params: *mp,
        sample_times: sample_times.to_vec(),
    })
}

fn check_sectors_match(s: &SystemState, plan: &EvolutionPlan) -> Result<()> {
    if s.sectors.len() != plan.blocks.len()
        || s.sectors.keys().any(|n| !plan.blocks.contains_key(n))
    {
        return Err(Error::SectorMismatch(format!(
            "state covers sectors {:?} but the plan covers {:?}",
            s.sectors.keys().collect::<Vec<_>>(),
            plan.blocks.keys().collect::<Vec<_>>()
        )));
    }
    Ok(())
}

/// Propagate by `tau` through the spectral decomposition:
/// `amps(tau) = V exp(-i L tau) V^T amps(0)` per sector.
///
/// Negative `tau` runs the reversed evolution (conjugated phases).
pub fn evolve_exact(s0: &SystemState, plan: &EvolutionPlan, tau: f64) -> Result<SystemState> {
    if !tau.is_finite() {
        return Err(Error::InvalidParams(format!(
            "tau must be finite, got {tau}"
        )));
    }
    check_sectors_match(s0, plan)?;
    if tau == 0.0 {
        // keep zero-time propagation an exact identity
        return Ok(s0.clone());
    }
    let mut sectors = BTreeMap::new();
    for (&n, amps) in &s0.sectors {
        let spec = plan.spectral(n).expect("sector checked above");
        let d = amps.len();
        if d != spec.eigenvalues.len() {
            return Err(Error::SectorMismatch(format!(
                "sector {n} has {d} amplitudes but the block is {}-dimensional",
                spec.eigenvalues.len()
            )));
        }
        let v = &spec.eigenvectors;
        let mut modal = vec![Complex64::new(0.0, 0.0); d];
        for k in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..d {
                acc += amps[i] * v.get(i, k);
            }
            modal[k] = acc * Complex64::from_polar(1.0, -spec.eigenvalues[k] * tau);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for i in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d {
                acc += modal[k] * v.get(i, k);
            }
            out[i] = acc;
        }
        sectors.insert(n, out);
    }
    Ok(SystemState {
        tau: s0.tau + tau,
        sectors,
        policy: s0.policy,
    })
}

#[inline]
fn times_minus_i(z: Complex64) -> Complex64 {
    Complex64::new(z.im, -z.re)
}

/// One classic RK4 step of `dB/dtau = -i H B` on a single sector.
fn rk4_step(h: &DMat, v: &mut [Complex64], dt: f64, scratch: &mut [Vec<Complex64>]) {
    let d = v.len();
    let (k1, rest) = scratch.split_at_mut(1);
    let (k2, rest) = rest.split_at_mut(1);
    let (k3, rest) = rest.split_at_mut(1);
    let (k4, tmp) = rest.split_at_mut(1);
    let (k1, k2, k3, k4, tmp) = (&mut k1[0], &mut k2[0], &mut k3[0], &mut k4[0], &mut tmp[0]);

    h.mul_complex(v, k1);
    k1.iter_mut().for_each(|z| *z = times_minus_i(*z));
    for i in 0..d {
        tmp[i] = v[i] + k1[i] * (dt / 2.0);
    }
    h.mul_complex(tmp, k2);
    k2.iter_mut().for_each(|z| *z = times_minus_i(*z));
    for i in 0..d {
        tmp[i] = v[i] + k2[i] * (dt / 2.0);
    }
    h.mul_complex(tmp, k3);
    k3.iter_mut().for_each(|z| *z = times_minus_i(*z));
    for i in 0..d {
        tmp[i] = v[i] + k3[i] * dt;
    }
    h.mul_complex(tmp, k4);
    k4.iter_mut().for_each(|z| *z = times_minus_i(*z));
    for i in 0..d {
        v[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
    }
}

/// Integrate forward by `tau` with fixed step `dt`; the final partial step is
/// shortened so the result lands exactly on the requested time.
pub fn evolve_rk4(s0: &SystemState, mp: &ModelParams, tau: f64, dt: f64) -> Result<SystemState> {
    mp.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "tau must be nonnegative, got {tau}"
        )));
    }
    let full_steps = (tau / dt).floor() as u64;
    let remainder = tau - full_steps as f64 * dt;

    let mut sectors = BTreeMap::new();
    for (&n, amps) in &s0.sectors {
        let block = build_block(n, mp)?;
        if block.dim() != amps.len() {
            return Err(Error::SectorMismatch(format!(
                "sector {n} has {} amplitudes but the block is {}-dimensional",
                amps.len(),
                block.dim()
            )));
        }
        let mut v = amps.clone();
        let mut scratch = vec![vec![Complex64::new(0.0, 0.0); v.len()]; 5];
        for _ in 0..full_steps {
            rk4_step(block.matrix(), &mut v, dt, &mut scratch);
        }
        if remainder > 0.0 {
            rk4_step(block.matrix(), &mut v, remainder, &mut scratch);
        }
        sectors.insert(n, v);
    }
    Ok(SystemState {
        tau: s0.tau + tau,
        sectors,
        policy: s0.policy,
    })
}

/// Brute-force reference propagation: flatten the state, assemble the full
/// Hamiltonian from operator rules on the labelled basis, diagonalize it as
/// one dense matrix, propagate, and map back to sectors.
pub fn dense_oracle(s0: &SystemState, mp: &ModelParams, tau: f64) -> Result<SystemState> {
    mp.validate()?;
    if !tau.is_finite() {
        return Err(Error::InvalidParams(format!(
            "tau must be finite, got {tau}"
        )));
    }
    let (labels, amps) = oracle::flatten(s0)?;
    let dim = labels.len();
    if dim > DENSE_DIM_LIMIT {
        return Err(Error::DimensionLimit {
            dim,
            limit: DENSE_DIM_LIMIT,
        });
    }
    let h = oracle::assemble_dense(&labels, mp);
    let eig = sym_eigen(&h)?;
    let v = &eig.vectors;
    let mut modal = vec![Complex64::new(0.0, 0.0); dim];
    for k in 0..dim {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            acc += amps[i] * v.get(i, k);
        }
        modal[k] = acc * Complex64::from_polar(1.0, -eig.values[k] * tau);
    }
    let mut flat = vec![Complex64::new(0.0, 0.0); dim];
    for i in 0..dim {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..dim {
            acc += modal[k] * v.get(i, k);
        }
        flat[i] = acc;
    }
    let mut out = s0.clone();
    out.tau = s0.tau + tau;
    let mut cursor = 0;
    for v in out.sectors.values_mut() {
        for slot in v.iter_mut() {
            *slot = flat[cursor];
            cursor += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{initial_state, total_norm};
    use crate::model::SectorPolicy;
    use approx::assert_abs_diff_eq;

    fn model(lambda1: f64, lambda2: f64, omega: f64, alpha: f64) -> ModelParams {
        ModelParams::with_auto_n_max(
            lambda1,
            lambda2,
            omega,
            Complex64::new(alpha, 0.0),
            SectorPolicy::Full,
        )
        .unwrap()
    }

    fn max_diff(a: &SystemState, b: &SystemState) -> f64 {
        let mut worst = 0.0f64;
        for (n, va) in &a.sectors {
            let vb = &b.sectors[n];
            for (x, y) in va.iter().zip(vb.iter()) {
                worst = worst.max((x - y).norm());
            }
        }
        worst
    }

    #[test]
    fn plan_validates_the_grid() {
        let mp = model(0.3, 0.3, 0.2, 3.0);
        assert!(plan(&mp, &[]).is_err());
        assert!(plan(&mp, &[1.0, 2.0]).is_err());
        assert!(plan(&mp, &[0.0, 1.0, 1.0]).is_err());
        assert!(plan(&mp, &[0.0, 1.0, 2.0]).is_ok());
    }

    #[test]
    fn decoupled_block_eigenvalues_are_the_detunings() {
        let mp = model(0.0, 0.0, 0.2, 3.0);
        let pl = plan(&mp, &[0.0]).unwrap();
        let vals = &pl.spectral(0).unwrap().eigenvalues;
        assert_abs_diff_eq!(vals[0], -0.4, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[2], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[3], 0.4, epsilon = 1e-14);
    }

    #[test]
    fn isolated_ladder_eigenvalues_split_into_pairs() {
        // with lambda2 = 0 and omega = 0 the block decouples into two 2x2
        // exchange couplings with strengths a(0) and b(0)
        let mp = model(0.3, 0.0, 0.0, 3.0);
        let pl = plan(&mp, &[0.0]).unwrap();
        let vals = &pl.spectral(0).unwrap().eigenvalues;
        let a0 = 0.5196152422706632;
        let b0 = 0.4242640687119285;
        assert_abs_diff_eq!(vals[0], -a0, epsilon = 1e-13);
        assert_abs_diff_eq!(vals[1], -b0, epsilon = 1e-13);
        assert_abs_diff_eq!(vals[2], b0, epsilon = 1e-13);
        assert_abs_diff_eq!(vals[3], a0, epsilon = 1e-13);
    }

    #[test]
    fn eigenvalues_sum_to_zero() {
        let mp = model(0.7, 0.4, 0.3, 3.0);
        let pl = plan(&mp, &[0.0]).unwrap();
        for spec in pl.blocks().values() {
            let sum: f64 = spec.eigenvalues.iter().sum();
            assert_abs_diff_eq!(sum, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_time_is_the_identity() {
        let mp = model(0.3, 0.3, 0.2, 3.0);
        let s0 = initial_state(&mp).unwrap();
        let pl = plan(&mp, &[0.0]).unwrap();
        let s = evolve_exact(&s0, &pl, 0.0).unwrap();
        assert_eq!(max_diff(&s0, &s), 0.0);
        let r = evolve_rk4(&s0, &mp, 0.0, 1e-3).unwrap();
        assert_eq!(max_diff(&s0, &r), 0.0);
    }

    #[test]
    fn decoupled_evolution_is_pure_phase() {
        let mp = model(0.0, 0.0, 0.2, 3.0);
        let s0 = initial_state(&mp).unwrap();
        let pl = plan(&mp, &[0.0]).unwrap();
        let s = evolve_exact(&s0, &pl, 7.3).unwrap();
        for (n, v) in &s.sectors {
            for (a, b) in v.iter().zip(s0.sectors[n].iter()) {
                assert_abs_diff_eq!(a.norm(), b.norm(), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn frozen_sector_amplitudes_at_unit_time() {
        // cross-implementation anchor for the full pipeline
        let mp = model(0.3, 0.3, 0.2, 3.0);
        let s0 = initial_state(&mp).unwrap();
        let pl = plan(&mp, &[0.0]).unwrap();
        let s = evolve_exact(&s0, &pl, 1.0).unwrap();
        let v = &s.sectors[&0];
        let expect = [
            Complex64::new(0.0509732291646333, 0.023541150909006964),
            Complex64::new(0.006720581525837911, -0.030580852082284726),
            Complex64::new(0.005487331837692689, -0.024969161167042016),
            Complex64::new(-0.014550485823950035, 0.0),
        ];
        for (a, e) in v.iter().zip(expect.iter()) {
            assert!((a - e).norm() < 1e-10, "got {a}, expected {e}");
        }
    }

    #[test]
    fn unitarity_and_sector_norm_conservation() {
        let mp = model(0.3, 0.3, 0.2, 3.0);
        let s0 = initial_state(&mp).unwrap();
        let pl = plan(&mp, &[0.0]).unwrap();
        for tau in [0.5, 13.0, 57.0, 100.0] {
            let s = evolve_exact(&s0, &pl, tau).unwrap();
            assert_abs_diff_eq!(total_norm(&s), total_norm(&s0), epsilon = 1e-10);
            for n in s0.sectors.keys() {
                assert_abs_diff_eq!(s.sector_norm(*n), s0.sector_norm(*n), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn group_property_and_reversibility() {
        let mp = model(0.3, 0.3, 0.2, 3.0);
        let s0 = initial_state(&mp).unwrap();
        let pl = plan(&mp, &[0.0]).unwrap();
        let one = evolve_exact(&s0, &pl, 11.0).unwrap();
        let two = evolve_exact(&one, &pl, 6.5).unwrap();
        let direct = evolve_exact(&s0, &pl, 17.5).unwrap();
        assert!(max_diff(&two, &direct) < 1e-9);
        let back = evolve_exact(&one, &pl, -11.0).unwrap();
        assert!(max_diff(&back, &s0) < 1e-9);
    }

    #[test]
    fn rk4_tracks_the_exact_propagator() {
        let mp = model(0.3, 0.3, 0.2, 2.0);
        let s0 = initial_state(&mp).unwrap();
        let pl = plan(&mp, &[0.0]).unwrap();
        let exact = evolve_exact(&s0, &pl, 10.0).unwrap();
        let approx = evolve_rk4(&s0, &mp, 10.0, 0.01).unwrap();
        assert!(max_diff(&exact, &approx) < 1e-6);
        assert_abs_diff_eq!(total_norm(&approx), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn rk4_partial_step_lands_on_target() {
        let mp = model(0.3, 0.3, 0.2, 2.0);
        let s0 = initial_state(&mp).unwrap();
        let pl = plan(&mp, &[0.0]).unwrap();
        // tau is not a multiple of dt
        let exact = evolve_exact(&s0, &pl, 1.2345).unwrap();
        let approx = evolve_rk4(&s0, &mp, 1.2345, 0.01).unwrap();
        assert!(max_diff(&exact, &approx) < 1e-8);
    }

    #[test]
    fn rk4_rejects_bad_steps() {
        let mp = model(0.3, 0.3, 0.2, 2.0);
        let s0 = initial_state(&mp).unwrap();
        assert!(evolve_rk4(&s0, &mp, 1.0, 0.0).is_err());
        assert!(evolve_rk4(&s0, &mp, -1.0, 0.1).is_err());
    }

    #[test]
    fn mismatched_sector_sets_are_rejected() {
        let mp = model(0.3, 0.3, 0.2, 3.0);
        let s0 = initial_state(&mp).unwrap();
        let ansatz = ModelParams {
            sectors: SectorPolicy::Ansatz,
            ..mp
        };
        let pl = plan(&ansatz, &[0.0]).unwrap();
        assert!(matches!(
            evolve_exact(&s0, &pl, 1.0),
            Err(Error::SectorMismatch(_))
        ));
    }

    #[test]
    fn dense_oracle_agrees_with_the_block_propagator() {
        let mp = model(0.3, 0.3, 0.2, 2.0);
        let s0 = initial_state(&mp).unwrap();
        let pl = plan(&mp, &[0.0]).unwrap();
        for tau in [1.0, 20.0] {
            let fast = evolve_exact(&s0, &pl, tau).unwrap();
            let slow = dense_oracle(&s0, &mp, tau).unwrap();
            assert!(max_diff(&fast, &slow) < 1e-8);
            assert_abs_diff_eq!(total_norm(&slow), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn dense_oracle_rejects_huge_flattened_bases() {
        // 3 + 4 + 4 * 2599 components, just past the guard
        let mp = ModelParams::new(
            0.3,
            0.3,
            0.2,
            Complex64::new(3.0, 0.0),
            2601,
            SectorPolicy::Full,
        )
        .unwrap();
        let s0 = initial_state(&mp).unwrap();
        assert!(matches!(
            dense_oracle(&s0, &mp, 1.0),
            Err(Error::DimensionLimit { .. })
        ));
    }
}
