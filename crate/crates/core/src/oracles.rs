//! Closed-form energy relations: rotational energy from kinetic angular
//! momentum, and the Landau spectrum it corresponds to.

use serde::{Deserialize, Serialize};

use crate::dynamics::{energy_2d, orbit_state, CyclotronOrbit, PhysicalParams};
use crate::error::{Error, Result};

/// How the azimuthal-index term of the Landau energy is read. Carried into
/// every report that contains Landau energies.
pub const LANDAU_INTERPRETATION: &str =
    "E(n, l) = (n + (|l| + l)/2 + 1/2) hbar omega_c; l is the azimuthal quantum number, not the mass";

/// `(n, l)`: radial and azimuthal quantum numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LandauIndex {
    pub n: u32,
    pub l: i32,
}

impl LandauIndex {
    pub fn new(n: u32, l: i32) -> Self {
        Self { n, l }
    }

    /// `n + (|l| + l)/2 + 1/2`, the energy in units of `hbar omega_c`.
    pub fn energy_quanta(&self) -> f64 {
        self.n as f64 + 0.5 * (self.l.unsigned_abs() as f64 + self.l as f64) + 0.5
    }
}

/// `E = (1/2) omega_c L_kin`.
pub fn energy_from_kinetic_lz(l_kin: f64, params: &PhysicalParams) -> f64 {
    0.5 * params.omega_c() * l_kin
}

pub fn landau_energy(idx: LandauIndex, params: &PhysicalParams) -> f64 {
    idx.energy_quanta() * params.hbar() * params.omega_c()
}

/// Kinetic angular momentum implied by a Landau energy, `2 E / omega_c`.
pub fn landau_kinetic_lz(idx: LandauIndex, params: &PhysicalParams) -> Result<f64> {
    let w = params.omega_c();
    if w == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(2.0 * landau_energy(idx, params) / w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandauLevel {
    pub n: u32,
    pub l: i32,
    pub energy: f64,
    /// Energy in units of `hbar omega_c`.
    pub quanta: f64,
}

/// Levels for `n in 0..=n_max`, `l in -l_max..=l_max`, `n`-major.
pub fn landau_table(params: &PhysicalParams, n_max: u32, l_max: u32) -> Vec<LandauLevel> {
    let l_max = l_max as i32;
    (0..=n_max)
        .flat_map(|n| (-l_max..=l_max).map(move |l| LandauIndex::new(n, l)))
        .map(|idx| LandauLevel {
            n: idx.n,
            l: idx.l,
            energy: landau_energy(idx, params),
            quanta: idx.energy_quanta(),
        })
        .collect()
}

/// Centered classical orbit whose kinetic angular momentum `m omega_c R^2`
/// equals `(2n + 2l + 1) hbar`, for `l >= 0` and positive `omega_c`.
pub fn corresponding_orbit(idx: LandauIndex, params: &PhysicalParams) -> Result<CyclotronOrbit> {
    let w = params.omega_c();
    if w == 0.0 {
        return Err(Error::ZeroField);
    }
    if w < 0.0 {
        return Err(Error::Validation(
            "classical-quantum correspondence needs a positive cyclotron frequency".into(),
        ));
    }
    if idx.l < 0 {
        return Err(Error::Validation(format!(
            "correspondence is defined for l >= 0, got l = {}",
            idx.l
        )));
    }
    let l_kin = (2 * idx.n as i64 + 2 * idx.l as i64 + 1) as f64 * params.hbar();
    let radius = (l_kin / (params.mass() * w)).sqrt();
    CyclotronOrbit::new(0.0, 0.0, radius, 0.0)
}

/// `|E_classical - E_landau|` for the corresponding centered orbit.
pub fn classical_quantum_gap(idx: LandauIndex, params: &PhysicalParams) -> Result<f64> {
    let orbit = corresponding_orbit(idx, params)?;
    let classical = energy_2d(&orbit_state(&orbit, params, 0.0), params);
    Ok((classical - landau_energy(idx, params)).abs())
}
