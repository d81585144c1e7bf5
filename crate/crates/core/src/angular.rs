//! Canonical, kinetic and diamagnetic angular momenta about the coordinate
//! origin, in the symmetric gauge `A = (B/2)(-y, x)`.
//!
//! The three are tied by `kinetic = canonical + diamagnetic`, where the
//! diamagnetic term is `(m omega_c / 2) rho^2`. Only the canonical part is
//! conserved; the kinetic part oscillates whenever the orbit center is off
//! the origin.

use serde::{Deserialize, Serialize};

use crate::dynamics::{orbit_state, CyclotronOrbit, ParticleState, PhysicalParams};

/// Default relative band for deciding `R == R_cen`.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

/// Sign of the canonical angular momentum of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitCategory {
    /// `R > R_cen`: the orbit encloses the origin.
    Positive,
    /// `R == R_cen`: the orbit passes through the origin.
    Zero,
    /// `R < R_cen`: the origin lies outside the orbit.
    Negative,
}

impl OrbitCategory {
    pub fn label(&self) -> &'static str {
        match self {
            OrbitCategory::Positive => "positive",
            OrbitCategory::Zero => "zero",
            OrbitCategory::Negative => "negative",
        }
    }
}

impl std::fmt::Display for OrbitCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularMomentumBreakdown {
    pub canonical: f64,
    pub diamagnetic: f64,
    pub kinetic: f64,
}

/// `m (x vy - y vx) + (e B / 2)(x^2 + y^2)`.
pub fn canonical_lz(state: &ParticleState, params: &PhysicalParams) -> f64 {
    params.mass() * (state.x * state.vy - state.y * state.vx)
        + 0.5 * params.charge() * params.field() * state.rho_sq()
}

/// `m (x vy - y vx)`; gauge invariant.
pub fn kinetic_lz(state: &ParticleState, params: &PhysicalParams) -> f64 {
    params.mass() * (state.x * state.vy - state.y * state.vx)
}

/// `(m omega_c / 2)(x^2 + y^2)`.
pub fn diamagnetic_lz(state: &ParticleState, params: &PhysicalParams) -> f64 {
    0.5 * params.mass() * params.omega_c() * state.rho_sq()
}

pub fn breakdown(state: &ParticleState, params: &PhysicalParams) -> AngularMomentumBreakdown {
    AngularMomentumBreakdown {
        canonical: canonical_lz(state, params),
        diamagnetic: diamagnetic_lz(state, params),
        kinetic: kinetic_lz(state, params),
    }
}

/// Canonical angular momentum of an orbit, `(m/2) omega_c (R^2 - R_cen^2)`.
/// Constant in time.
pub fn orbit_canonical_lz(orbit: &CyclotronOrbit, params: &PhysicalParams) -> f64 {
    let r = orbit.radius();
    let r_cen_sq = orbit.x0() * orbit.x0() + orbit.y0() * orbit.y0();
    0.5 * params.mass() * params.omega_c() * (r * r - r_cen_sq)
}

/// Classify by comparing `R` with `R_cen`. The zero band is relative:
/// `|R - R_cen| <= tol * max(R, R_cen, 1)`.
pub fn classify_orbit(orbit: &CyclotronOrbit, tol: f64) -> OrbitCategory {
    let (r, r_cen) = (orbit.radius(), orbit.r_cen());
    let scale = r.max(r_cen).max(1.0);
    if (r - r_cen).abs() <= tol * scale {
        OrbitCategory::Zero
    } else if r > r_cen {
        OrbitCategory::Positive
    } else {
        OrbitCategory::Negative
    }
}

/// Closed-form kinetic angular momentum along an orbit,
/// `m w R^2 + m w R R_cen cos(w t + theta - alpha)` with `alpha` the center azimuth.
pub fn predicted_kinetic_lz(orbit: &CyclotronOrbit, params: &PhysicalParams, t: f64) -> f64 {
    let (m, w) = (params.mass(), params.omega_c());
    let r = orbit.radius();
    let phase = w * t + orbit.theta() - orbit.center_azimuth();
    m * w * r * r + m * w * r * orbit.r_cen() * phase.cos()
}

/// Time average of the kinetic angular momentum over one period, `m w R^2`.
pub fn mean_kinetic_lz(orbit: &CyclotronOrbit, params: &PhysicalParams) -> f64 {
    let r = orbit.radius();
    params.mass() * params.omega_c() * r * r
}

/// Kinetic angular momentum of the exact state at `t`, evaluated directly.
pub fn orbit_kinetic_lz(orbit: &CyclotronOrbit, params: &PhysicalParams, t: f64) -> f64 {
    kinetic_lz(&orbit_state(orbit, params, t), params)
}
