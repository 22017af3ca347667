//! Reduced density matrices and the four statistical observables: isospin
//! entanglement entropy, two-particle concurrence, population inversion of the
//! isospin, and the normalized second-order photon correlation.
//!
//! Sums over sectors use photon-number bookkeeping: within sector `n` the four
//! components carry `n+2, n+3, n+1, n+2` photons, and the 3-dimensional lowest
//! sector maps onto virtual components `(B1, B2, -, B4)` with `B3 = 0`. When a
//! state carries a norm deficit (ansatz truncation), observables are computed
//! from the density normalized by its trace so they stay probabilistic.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{excitation_expectation, total_norm, SystemState};

/// Clamp tolerance for reduced-density eigenvalues slightly outside `[0, 1]`.
const EIGEN_CLAMP: f64 = 1e-10;
/// Tolerance for a roundoff-negative concurrence radicand.
const RADICAND_CLAMP: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Isospin reduced density `[[ee, eg], [ge, gg]]` with `ge = conj(eg)`.
/// Its trace equals the squared norm of the source state.
#[derive(Debug, Clone, Copy)]
pub struct IsospinDensity {
    pub rho_ee: f64,
    pub rho_gg: f64,
    pub rho_eg: Complex64,
}

impl IsospinDensity {
    pub fn trace(&self) -> f64 {
        self.rho_ee + self.rho_gg
    }
}

/// Two-particle reduced density over `(|-g->, |+g->, |-g+>, |+g+>)`.
#[derive(Debug, Clone)]
pub struct PairDensity {
    m: [[Complex64; 4]; 4],
}

impl PairDensity {
    pub fn from_matrix(m: [[Complex64; 4]; 4]) -> Self {
        PairDensity { m }
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[i][j]
    }

    pub fn matrix(&self) -> &[[Complex64; 4]; 4] {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.m[i][i].re).sum()
    }

    /// `Tr rho^2`, real for Hermitian input.
    pub fn trace_sq(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                acc += (self.m[i][j] * self.m[j][i]).re;
            }
        }
        acc
    }
}

/// One sampled row of the time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRecord {
    pub tau: f64,
    /// Isospin entanglement entropy, in nats (bounded by ln 2).
    pub entropy: f64,
    /// Mixedness-style concurrence of the pair density (bounded by sqrt(3/2)).
    pub concurrence: f64,
    /// Isospin population inversion in [-1, 1].
    pub inversion: f64,
    /// Normalized second-order photon correlation.
    pub g2: f64,
    pub norm: f64,
    pub excitation: f64,
}

/// Virtual `(B1, B2, B3, B4)` view of a sector's amplitudes.
fn virtual_components(amps: &[Complex64]) -> [Complex64; 4] {
    match amps.len() {
        3 => [amps[0], amps[1], ZERO, amps[2]],
        4 => [amps[0], amps[1], amps[2], amps[3]],
        d => unreachable!("sector dimension {d}"),
    }
}

/// Trace out the oscillator and the field.
///
/// Populations sum `|B|^2` by isospin label; the coherence pairs components
/// whose Dirac spinor and photon number agree, which picks the neighbour
/// sector: `eg += B3(n+1) conj(B1(n)) + B4(n+1) conj(B2(n))`.
pub fn isospin_density(s: &SystemState) -> IsospinDensity {
    let mut ee = 0.0;
    let mut gg = 0.0;
    let mut eg = ZERO;
    for (&n, amps) in &s.sectors {
        let b = virtual_components(amps);
        gg += b[0].norm_sqr() + b[1].norm_sqr();
        ee += b[2].norm_sqr() + b[3].norm_sqr();
        if let Some(up) = s.sectors.get(&(n + 1)) {
            let u = virtual_components(up);
            eg += u[2] * b[0].conj() + u[3] * b[1].conj();
        }
    }
    IsospinDensity {
        rho_ee: ee,
        rho_gg: gg,
        rho_eg: eg,
    }
}

/// Trace out the field only. Each off-diagonal entry pairs the components
/// whose photon numbers coincide, which fixes the sector offsets.
pub fn pair_density(s: &SystemState) -> PairDensity {
    let mut m = [[ZERO; 4]; 4];
    for (&n, amps) in &s.sectors {
        let b = virtual_components(amps);
        for i in 0..4 {
            m[i][i] += Complex64::new(b[i].norm_sqr(), 0.0);
        }
        // pairings within reach of the two neighbouring sectors
        m[0][3] += b[0] * b[3].conj();
        if let Some(up) = s.sectors.get(&(n + 1)) {
            let u = virtual_components(up);
            m[0][1] += u[0] * b[1].conj();
            m[0][2] += b[0] * u[2].conj();
            m[1][3] += b[1] * u[3].conj();
            m[2][3] += u[2] * b[3].conj();
        }
        if let Some(up2) = s.sectors.get(&(n + 2)) {
            let u = virtual_components(up2);
            m[1][2] += b[1] * u[2].conj();
        }
    }
    for i in 0..4 {
        for j in 0..i {
            m[i][j] = m[j][i].conj();
        }
    }
    PairDensity { m }
}

fn x_ln_x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Von Neumann entropy of the (trace-normalized) isospin density, computed
/// from its Bloch vector: the eigenvalues are `1/2 (1 +- |r|)`.
pub fn entropy(d: &IsospinDensity) -> Result<f64> {
    let t = d.trace();
    if !(t > 0.0) {
        return Err(Error::InvalidDensity(format!("nonpositive trace {t}")));
    }
    let sx = 2.0 * d.rho_eg.re / t;
    let sy = 2.0 * d.rho_eg.im / t;
    let sz = (d.rho_ee - d.rho_gg) / t;
    let r = (sx * sx + sy * sy + sz * sz).sqrt();
    let lo = 0.5 - 0.5 * r;
    let hi = 0.5 + 0.5 * r;
    if lo < -EIGEN_CLAMP || hi > 1.0 + EIGEN_CLAMP {
        return Err(Error::InvalidDensity(format!(
            "eigenvalues ({lo}, {hi}) outside [0, 1] beyond tolerance"
        )));
    }
    let s = -x_ln_x(lo.clamp(0.0, 1.0)) - x_ln_x(hi.clamp(0.0, 1.0));
    Ok(if s == 0.0 { 0.0 } else { s })
}

/// Concurrence-style entanglement measure of the (trace-normalized) pair
/// density: `sqrt(2 sum_{i != j} (rho_ii rho_jj - rho_ij rho_ji))`.
pub fn concurrence(d: &PairDensity) -> Result<f64> {
    let t = d.trace();
    if !(t > 0.0) {
        return Err(Error::InvalidDensity(format!("nonpositive trace {t}")));
    }
    let radicand = concurrence_radicand(d) / (t * t);
    if radicand < -RADICAND_CLAMP {
        return Err(Error::InvalidDensity(format!(
            "negative concurrence radicand {radicand}"
        )));
    }
    Ok((2.0 * radicand.max(0.0)).sqrt())
}

/// The double sum `sum_{i != j} (rho_ii rho_jj - rho_ij rho_ji)` on the raw
/// (unnormalized) entries; algebraically equal to `(Tr rho)^2 - Tr rho^2`.
fn concurrence_radicand(d: &PairDensity) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                acc += d.m[i][i].re * d.m[j][j].re - (d.m[i][j] * d.m[j][i]).re;
            }
        }
    }
    acc
}

/// Population inversion `ee - gg` of the trace-normalized isospin density.
pub fn inversion(d: &IsospinDensity) -> f64 {
    let t = d.trace();
    if t > 0.0 {
        (d.rho_ee - d.rho_gg) / t
    } else {
        d.rho_ee - d.rho_gg
    }
}

/// Normalized second-order correlation `<n(n-1)> / <n>^2` of the field.
///
/// Photon weights per component are `n+2, n+3, n+1, n+2` (and `0, 1, 0` on the
/// lowest sector, which its virtual components reproduce). Undefined when the
/// state has no photon support.
pub fn g2(s: &SystemState) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    let norm = total_norm(s);
    for (&n, amps) in &s.sectors {
        let b = virtual_components(amps);
        let photons = [
            (n + 2) as f64,
            (n + 3) as f64,
            (n + 1) as f64,
            (n + 2) as f64,
        ];
        for (p, z) in photons.iter().zip(b.iter()) {
            let w = z.norm_sqr();
            num += p * (p - 1.0) * w;
            den += p * w;
        }
    }
    if !(den > 0.0) {
        return Err(Error::UndefinedObservable(
            "g2 needs a positive mean photon number".into(),
        ));
    }
    Ok(num * norm / (den * den))
}

/// Bundle every observable of one state into a single record.
pub fn record(s: &SystemState) -> Result<ObservableRecord> {
    let iso = isospin_density(s);
    let pair = pair_density(s);
    Ok(ObservableRecord {
        tau: s.tau,
        entropy: entropy(&iso)?,
        concurrence: concurrence(&pair)?,
        inversion: inversion(&iso),
        g2: g2(s)?,
        norm: total_norm(s),
        excitation: excitation_expectation(s),
    })
}
