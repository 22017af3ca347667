//! Brute-force reference paths on the flattened, explicitly labelled basis.
//!
//! Everything here works from the quantum numbers of each basis state (Dirac
//! spinor, isospin, photon count) and deliberately avoids the per-sector
//! coefficient formulas and the photon-matched bookkeeping used by the
//! production code, so agreement between the two routes is meaningful.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::SystemState;
use crate::linalg::DMat;
use crate::model::ModelParams;

/// Quantum numbers of one flattened basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisLabel {
    pub dirac_excited: bool,
    pub isospin_excited: bool,
    pub photons: u32,
}

/// Labels of sector `n` in component order.
pub fn sector_labels(sector: i32) -> Result<Vec<BasisLabel>> {
    if sector < -2 {
        return Err(Error::InvalidParams(format!(
            "sector index {sector} below the lowest excitation sector (-2)"
        )));
    }
    let l = |d: bool, i: bool, p: i32| BasisLabel {
        dirac_excited: d,
        isospin_excited: i,
        photons: p as u32,
    };
    Ok(if sector == -2 {
        vec![l(false, false, 0), l(true, false, 1), l(true, true, 0)]
    } else {
        vec![
            l(false, false, sector + 2),
            l(true, false, sector + 3),
            l(false, true, sector + 1),
            l(true, true, sector + 2),
        ]
    })
}

/// Flatten a state into parallel label and amplitude vectors, sectors in
/// ascending order, components in block order.
pub fn flatten(s: &SystemState) -> Result<(Vec<BasisLabel>, Vec<Complex64>)> {
    let mut labels = Vec::new();
    let mut amps = Vec::new();
    for (&n, v) in &s.sectors {
        let ls = sector_labels(n)?;
        if ls.len() != v.len() {
            return Err(Error::SectorMismatch(format!(
                "sector {n} holds {} amplitudes but has {} basis states",
                v.len(),
                ls.len()
            )));
        }
        labels.extend(ls);
        amps.extend_from_slice(v);
    }
    Ok((labels, amps))
}

fn sign(excited: bool) -> f64 {
    if excited {
        1.0
    } else {
        -1.0
    }
}

/// Matrix element `<bra|H|ket>` from the operator rules: the oscillator
/// coupling raises the Dirac spinor while creating a photon, the isospin
/// coupling raises the isospin while annihilating one, and the splitting term
/// is diagonal in both two-level systems.
pub fn matrix_element(bra: &BasisLabel, ket: &BasisLabel, mp: &ModelParams) -> f64 {
    if bra == ket {
        return mp.omega * (sign(bra.dirac_excited) + sign(bra.isospin_excited));
    }
    if bra.isospin_excited == ket.isospin_excited && bra.dirac_excited != ket.dirac_excited {
        if bra.dirac_excited && bra.photons == ket.photons + 1 {
            return mp.lambda1 * ((ket.photons + 1) as f64).sqrt();
        }
        if ket.dirac_excited && ket.photons == bra.photons + 1 {
            return mp.lambda1 * ((bra.photons + 1) as f64).sqrt();
        }
    }
    if bra.dirac_excited == ket.dirac_excited && bra.isospin_excited != ket.isospin_excited {
        if bra.isospin_excited && bra.photons + 1 == ket.photons {
            return mp.lambda2 * (ket.photons as f64).sqrt();
        }
        if ket.isospin_excited && ket.photons + 1 == bra.photons {
            return mp.lambda2 * (bra.photons as f64).sqrt();
        }
    }
    0.0
}

/// Assemble the dense Hamiltonian over a flattened basis.
pub fn assemble_dense(labels: &[BasisLabel], mp: &ModelParams) -> DMat {
    let dim = labels.len();
    let mut h = DMat::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            h.set(i, j, matrix_element(&labels[i], &labels[j], mp));
        }
    }
    h
}

/// Isospin reduced density by explicit index summation over the full pure
/// state: entry `[a][b]` pairs amplitudes whose Dirac spinor and photon count
/// agree, with index 0 = excited, 1 = ground.
pub fn isospin_density_flat(labels: &[BasisLabel], amps: &[Complex64]) -> [[Complex64; 2]; 2] {
    let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..labels.len() {
        for j in 0..labels.len() {
            if labels[i].dirac_excited == labels[j].dirac_excited
                && labels[i].photons == labels[j].photons
            {
                let a = usize::from(!labels[i].isospin_excited);
                let b = usize::from(!labels[j].isospin_excited);
                rho[a][b] += amps[i] * amps[j].conj();
            }
        }
    }
    rho
}

/// Two-particle reduced density by explicit index summation, over the basis
/// `(|-g->, |+g->, |-g+>, |+g+>)`.
pub fn pair_density_flat(labels: &[BasisLabel], amps: &[Complex64]) -> [[Complex64; 4]; 4] {
    let idx = |l: &BasisLabel| usize::from(l.dirac_excited) + 2 * usize::from(l.isospin_excited);
    let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..labels.len() {
        for j in 0..labels.len() {
            if labels[i].photons == labels[j].photons {
                rho[idx(&labels[i])][idx(&labels[j])] += amps[i] * amps[j].conj();
            }
        }
    }
    rho
}

/// Photon-number moments read directly off the labels.
#[derive(Debug, Clone, Copy)]
pub struct PhotonMoments {
    pub norm: f64,
    /// `sum N |amp|^2`
    pub mean: f64,
    /// `sum N (N - 1) |amp|^2`
    pub second_factorial: f64,
}

pub fn photon_moments_flat(labels: &[BasisLabel], amps: &[Complex64]) -> PhotonMoments {
    let mut m = PhotonMoments {
        norm: 0.0,
        mean: 0.0,
        second_factorial: 0.0,
    };
    for (l, a) in labels.iter().zip(amps.iter()) {
        let p = a.norm_sqr();
        let n = l.photons as f64;
        m.norm += p;
        m.mean += n * p;
        m.second_factorial += n * (n - 1.0) * p;
    }
    m
}
