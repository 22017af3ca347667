//! Model parameters and per-sector block Hamiltonians.
//!
//! The total excitation number is conserved, so the Hamiltonian decomposes
//! into independent blocks: one 4x4 block per sector index `n >= -1` over the
//! basis
//!
//! ```text
//! (|-, g-, n+2>, |+, g-, n+3>, |-, g+, n+1>, |+, g+, n+2>)
//! ```
//!
//! (Dirac spinor, isospin, photon number), and a single 3x3 block at `n = -2`
//! where the third basis state would need -1 photons and drops out. All
//! couplings and the level splitting are dimensionless, expressed in units of
//! the overall interaction rate that also scales time.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::DMat;

/// Which excitation sectors a state covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorPolicy {
    /// Every sector reachable from the initial condition, including the
    /// one- and zero-excitation blocks at `n = -1` and `n = -2`.
    Full,
    /// Ansatz truncation that starts the ladder at `n = 0`, dropping the two
    /// lowest sectors. The missing coherent-state weight is kept as a norm
    /// deficit instead of being renormalized away.
    Ansatz,
}

/// Laboratory-frame inputs in natural units (`c = hbar = 1`).
#[derive(Debug, Clone, Copy)]
pub struct PhysicalParams {
    /// Rest mass of the oscillator particle (energy units).
    pub mass: f64,
    /// Harmonic oscillator frequency (energy units).
    pub omega: f64,
    /// Dimensionless cyclotron ratio `eB / (2 m c omega)`; the oscillator
    /// construction needs `1 + xi > 0`.
    pub xi: f64,
    /// Isospin-field coupling strength (energy units, nonnegative).
    pub chi: f64,
    /// Rest energy `m c^2`; coincides with `mass` in natural units.
    pub rest_energy: f64,
    /// Isospin level splitting; the solvable regime requires it to equal
    /// `rest_energy`.
    pub gamma: f64,
}

/// Dimensionless simulation inputs.
#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    /// Oscillator-photon coupling (pairs spinor raising with photon creation).
    pub lambda1: f64,
    /// Isospin-photon coupling (pairs isospin raising with photon annihilation).
    pub lambda2: f64,
    /// Common level-splitting parameter of the two two-level systems.
    pub omega: f64,
    /// Coherent amplitude of the initial field; mean photon number `|alpha|^2`.
    pub alpha: Complex64,
    /// Photon truncation index: coherent amplitudes `q_0..q_n_max` are kept.
    pub n_max: usize,
    pub sectors: SectorPolicy,
}

impl ModelParams {
    pub fn new(
        lambda1: f64,
        lambda2: f64,
        omega: f64,
        alpha: Complex64,
        n_max: usize,
        sectors: SectorPolicy,
    ) -> Result<Self> {
        let mp = ModelParams {
            lambda1,
            lambda2,
            omega,
            alpha,
            n_max,
            sectors,
        };
        mp.validate()?;
        Ok(mp)
    }

    /// Like [`ModelParams::new`] with the truncation chosen by
    /// [`ModelParams::auto_n_max`].
    pub fn with_auto_n_max(
        lambda1: f64,
        lambda2: f64,
        omega: f64,
        alpha: Complex64,
        sectors: SectorPolicy,
    ) -> Result<Self> {
        Self::new(
            lambda1,
            lambda2,
            omega,
            alpha,
            Self::auto_n_max(alpha),
            sectors,
        )
    }

    /// Truncation index that keeps the discarded coherent-state weight below
    /// 1e-12: mean photon number plus roughly eight standard deviations, with
    /// a small constant margin. Evaluates to 40 for `|alpha| = 3`.
    pub fn auto_n_max(alpha: Complex64) -> usize {
        let a = alpha.norm();
        let guess = (a * a + 8.0 * a).ceil() as usize + 7;
        guess.max(30)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda1 >= 0.0 && self.lambda1.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "lambda1 must be a nonnegative coupling magnitude, got {}",
                self.lambda1
            )));
        }
        if !(self.lambda2 >= 0.0 && self.lambda2.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "lambda2 must be a nonnegative coupling magnitude, got {}",
                self.lambda2
            )));
        }
        if !self.omega.is_finite() {
            return Err(Error::InvalidParams(format!(
                "omega must be finite, got {}",
                self.omega
            )));
        }
        if !self.alpha.re.is_finite() || !self.alpha.im.is_finite() {
            return Err(Error::InvalidParams("alpha must be finite".into()));
        }
        Ok(())
    }

    /// Sector indices covered by this parameter set, in ascending order.
    pub fn sector_range(&self) -> Vec<i32> {
        let lo = match self.sectors {
            SectorPolicy::Full => -2,
            SectorPolicy::Ansatz => 0,
        };
        (lo..=self.n_max as i32 - 2).collect()
    }
}

/// The real symmetric matrix that generates one sector's dynamics.
#[derive(Debug, Clone)]
pub struct BlockHamiltonian {
    sector: i32,
    matrix: DMat,
}

impl BlockHamiltonian {
    pub fn sector(&self) -> i32 {
        self.sector
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &DMat {
        &self.matrix
    }
}

/// Number of basis states in sector `n`: 3 at `n = -2`, otherwise 4.
pub fn sector_dim(sector: i32) -> usize {
    if sector == -2 {
        3
    } else {
        4
    }
}

fn coupling(strength: f64, sector: i32, offset: i32) -> f64 {
    strength * ((sector + offset) as f64).sqrt()
}

/// Build the block Hamiltonian of sector `n`.
///
/// For `n >= -1` the 4x4 matrix has diagonal `(-2w, 0, 0, 2w)` and couplings
/// `a = l1 sqrt(n+3)` at (1,2), `d = l2 sqrt(n+2)` at (1,3), `c = l2 sqrt(n+3)`
/// at (2,4), `b = l1 sqrt(n+2)` at (3,4); entries (1,4) and (2,3) vanish
/// because the interaction flips one two-level system at a time. At `n = -2`
/// the missing basis state leaves a 3x3 matrix with diagonal `(-2w, 0, 2w)`
/// and couplings `l1` at (1,2) and `l2` at (2,3).
pub fn build_block(sector: i32, mp: &ModelParams) -> Result<BlockHamiltonian> {
    mp.validate()?;
    if sector < -2 {
        return Err(Error::InvalidParams(format!(
            "sector index {sector} below the lowest excitation sector (-2)"
        )));
    }
    if mp.sectors == SectorPolicy::Ansatz && sector < 0 {
        return Err(Error::InvalidParams(format!(
            "sector index {sector} is outside the ansatz range (n >= 0)"
        )));
    }
    let two_omega = 2.0 * mp.omega;
    let matrix = if sector == -2 {
        let mut m = DMat::zeros(3);
        m.set(0, 0, -two_omega);
        m.set(2, 2, two_omega);
        m.set_sym(0, 1, coupling(mp.lambda1, sector, 3));
        m.set_sym(1, 2, coupling(mp.lambda2, sector, 3));
        m
    } else {
        let a = coupling(mp.lambda1, sector, 3);
        let b = coupling(mp.lambda1, sector, 2);
        let c = coupling(mp.lambda2, sector, 3);
        let d = coupling(mp.lambda2, sector, 2);
        let mut m = DMat::zeros(4);
        m.set(0, 0, -two_omega);
        m.set(3, 3, two_omega);
        m.set_sym(0, 1, a);
        m.set_sym(0, 2, d);
        m.set_sym(1, 3, c);
        m.set_sym(2, 3, b);
        m
    };
    Ok(BlockHamiltonian { sector, matrix })
}

/// Map laboratory inputs onto the dimensionless couplings.
///
/// The shifted oscillator frequency is `omega (1 + xi)`, the oscillator-photon
/// rate is `eta = 2 sqrt(rest_energy * shifted)`, and everything is expressed
/// in units of the overall rate `eta * sqrt(rest_energy * omega)` that also
/// scales time. The coherent amplitude defaults to zero; set `alpha` (and
/// usually `n_max`) before running a simulation.
pub fn derive_model_params(p: &PhysicalParams) -> Result<ModelParams> {
    if !(p.mass > 0.0 && p.mass.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "mass must be positive, got {}",
            p.mass
        )));
    }
    if !(p.omega > 0.0 && p.omega.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "oscillator frequency must be positive, got {}",
            p.omega
        )));
    }
    if !(1.0 + p.xi > 0.0) {
        return Err(Error::InvalidParams(format!(
            "invalid frequency regime: 1 + xi = {} must be positive",
            1.0 + p.xi
        )));
    }
    if !(p.chi >= 0.0 && p.chi.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "isospin coupling must be a nonnegative magnitude, got {}",
            p.chi
        )));
    }
    if !(p.rest_energy > 0.0 && p.rest_energy.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "rest energy must be positive, got {}",
            p.rest_energy
        )));
    }
    if p.gamma != p.rest_energy {
        return Err(Error::InvalidParams(format!(
            "the solvable regime requires gamma = rest energy (got {} and {})",
            p.gamma, p.rest_energy
        )));
    }
    let shifted = p.omega * (1.0 + p.xi);
    let eta = 2.0 * (p.rest_energy * shifted).sqrt();
    let rate = eta * (p.rest_energy * p.omega).sqrt();
    ModelParams::new(
        (2.0 * (1.0 + p.xi).sqrt() / eta) / rate,
        (p.chi / (eta * (p.rest_energy * p.omega).sqrt())) / rate,
        p.rest_energy / rate,
        Complex64::new(0.0, 0.0),
        ModelParams::auto_n_max(Complex64::new(0.0, 0.0)),
        SectorPolicy::Full,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn params(lambda1: f64, lambda2: f64, omega: f64) -> ModelParams {
        ModelParams::new(
            lambda1,
            lambda2,
            omega,
            Complex64::new(3.0, 0.0),
            40,
            SectorPolicy::Full,
        )
        .unwrap()
    }

    #[test]
    fn derive_reference_couplings() {
        // m = 1, omega = 1, xi = 0, chi = 0: eta = 2, rate = 2
        let p = PhysicalParams {
            mass: 1.0,
            omega: 1.0,
            xi: 0.0,
            chi: 0.0,
            rest_energy: 1.0,
            gamma: 1.0,
        };
        let mp = derive_model_params(&p).unwrap();
        assert_abs_diff_eq!(mp.lambda1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(mp.lambda2, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mp.omega, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn derive_isospin_coupling() {
        let p = PhysicalParams {
            mass: 1.0,
            omega: 1.0,
            xi: 0.0,
            chi: 2.0,
            rest_energy: 1.0,
            gamma: 1.0,
        };
        let mp = derive_model_params(&p).unwrap();
        assert_abs_diff_eq!(mp.lambda2, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn derive_rejects_bad_regimes() {
        let base = PhysicalParams {
            mass: 1.0,
            omega: 1.0,
            xi: 0.0,
            chi: 0.0,
            rest_energy: 1.0,
            gamma: 1.0,
        };
        assert!(derive_model_params(&PhysicalParams { xi: -1.5, ..base }).is_err());
        assert!(derive_model_params(&PhysicalParams { xi: -1.0, ..base }).is_err());
        assert!(derive_model_params(&PhysicalParams { mass: 0.0, ..base }).is_err());
        assert!(derive_model_params(&PhysicalParams {
            omega: -2.0,
            ..base
        })
        .is_err());
        assert!(derive_model_params(&PhysicalParams { gamma: 0.5, ..base }).is_err());
    }

    #[test]
    fn block_reference_entries() {
        let b = build_block(0, &params(0.3, 0.3, 0.2)).unwrap();
        let m = b.matrix();
        assert_eq!(b.dim(), 4);
        assert_eq!(m.get(0, 0), -0.4);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.get(2, 2), 0.0);
        assert_eq!(m.get(3, 3), 0.4);
        assert_abs_diff_eq!(m.get(0, 1), 0.5196152422706632, epsilon = 1e-15);
        assert_abs_diff_eq!(m.get(2, 3), 0.4242640687119285, epsilon = 1e-15);
        assert_abs_diff_eq!(m.get(1, 3), 0.5196152422706632, epsilon = 1e-15);
        assert_abs_diff_eq!(m.get(0, 2), 0.4242640687119285, epsilon = 1e-15);
        assert_eq!(m.get(0, 3), 0.0);
        assert_eq!(m.get(1, 2), 0.0);
    }

    #[test]
    fn lowest_sector_is_three_dimensional() {
        let b = build_block(-2, &params(0.3, 0.3, 0.2)).unwrap();
        let m = b.matrix();
        assert_eq!(b.dim(), 3);
        assert_eq!(m.get(0, 0), -0.4);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.get(2, 2), 0.4);
        assert_abs_diff_eq!(m.get(0, 1), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(m.get(1, 2), 0.3, epsilon = 1e-15);
        assert_eq!(m.get(0, 2), 0.0);
    }

    #[test]
    fn decoupled_block_is_diagonal() {
        let b = build_block(5, &params(0.0, 0.0, 0.2)).unwrap();
        let m = b.matrix();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(m.get(i, j), 0.0);
                }
            }
        }
        assert_eq!(m.get(0, 0), -0.4);
        assert_eq!(m.get(3, 3), 0.4);
    }

    #[test]
    fn sector_below_lowest_is_rejected() {
        assert!(build_block(-3, &params(0.3, 0.3, 0.2)).is_err());
    }

    #[test]
    fn ansatz_rejects_low_sectors() {
        let mp = ModelParams::new(
            0.3,
            0.3,
            0.2,
            Complex64::new(3.0, 0.0),
            40,
            SectorPolicy::Ansatz,
        )
        .unwrap();
        assert!(build_block(-1, &mp).is_err());
        assert!(build_block(0, &mp).is_ok());
    }

    #[test]
    fn negative_couplings_are_rejected() {
        assert!(ModelParams::new(
            -0.1,
            0.3,
            0.2,
            Complex64::new(3.0, 0.0),
            40,
            SectorPolicy::Full
        )
        .is_err());
    }

    #[test]
    fn auto_n_max_reference_points() {
        assert_eq!(ModelParams::auto_n_max(Complex64::new(3.0, 0.0)), 40);
        assert_eq!(ModelParams::auto_n_max(Complex64::new(0.0, 0.0)), 30);
    }

    proptest! {
        #[test]
        fn blocks_are_symmetric_traceless_and_sparse(
            sector in -2i32..=60,
            lambda1 in 0.0f64..2.0,
            lambda2 in 0.0f64..2.0,
            omega in 0.0f64..1.0,
        ) {
            let mp = ModelParams::new(
                lambda1, lambda2, omega,
                Complex64::new(3.0, 0.0), 80, SectorPolicy::Full,
            ).unwrap();
            let b = build_block(sector, &mp).unwrap();
            let m = b.matrix();
            prop_assert_eq!(m.asymmetry(), 0.0);
            let trace: f64 = (0..b.dim()).map(|i| m.get(i, i)).sum();
            prop_assert_eq!(trace, 0.0);
            if b.dim() == 4 {
                prop_assert_eq!(m.get(0, 3), 0.0);
                prop_assert_eq!(m.get(1, 2), 0.0);
            }
        }

        #[test]
        fn coupling_ladder_identities(sector in -1i32..=60) {
            let mp = params(0.7, 0.4, 0.2);
            let here = build_block(sector, &mp).unwrap();
            // b(n) = a(n-1) and d(n) = c(n-1), read off the matrix entries
            let (a_here, d_here) = (here.matrix().get(0, 1), here.matrix().get(0, 2));
            let (b_here, c_here) = (here.matrix().get(2, 3), here.matrix().get(1, 3));
            let below = build_block(sector - 1, &mp).unwrap();
            let (a_below, c_below) = if below.dim() == 4 {
                (below.matrix().get(0, 1), below.matrix().get(1, 3))
            } else {
                (below.matrix().get(0, 1), below.matrix().get(1, 2))
            };
            prop_assert_eq!(b_here, a_below);
            prop_assert_eq!(d_here, c_below);
            // strictly increasing couplings at fixed positive strengths
            prop_assert!(a_here > a_below);
            prop_assert!(c_here > c_below);
        }
    }
}
