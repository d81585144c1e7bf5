//! Circulation of electrons about the vortex axis: winding of a single orbit
//! around the origin, and radial profiles of the azimuthal current.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::angular::{classify_orbit, OrbitCategory, DEFAULT_CLASSIFY_TOL};
use crate::dynamics::{orbit_state, CyclotronOrbit, ParticleState, PhysicalParams};
use crate::ensemble::VortexEnsemble;
use crate::error::{Error, Result};

/// Net azimuth swept about the origin during one cyclotron period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub delta_phi: f64,
    pub mean_omega: f64,
    /// Circulating current per electron, `mean_omega / 2 pi`.
    pub i_c: f64,
}

/// Bisection depth used to resolve fast azimuth sweeps near the origin.
const MAX_REFINE_DEPTH: u32 = 60;

/// Wrap an angle difference into `(-pi, pi]`.
pub fn wrap_angle(d: f64) -> f64 {
    let w = d.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Unwrap the azimuth of `orbit_state` over one period starting at `t = 0`.
///
/// Orbits that pass through the origin (`R == R_cen` within the default
/// classification band) have an azimuth that jumps by `pi` at the passage.
/// The jump is dropped; what remains is the smooth sweep at half the
/// cyclotron rate, giving `delta_phi = pi * sign(omega_c)`. This is the
/// average of the two one-sided limits `R -> R_cen` (`2 pi` and `0`).
pub fn winding_angle(
    orbit: &CyclotronOrbit,
    params: &PhysicalParams,
    n_samples: usize,
) -> Result<WindingResult> {
    let period = params.period().ok_or(Error::ZeroField)?;
    if n_samples < 8 {
        return Err(Error::Validation(format!("n_samples must be at least 8, got {n_samples}")));
    }
    let scale = orbit.radius().max(orbit.r_cen());
    if scale == 0.0 {
        return Err(Error::Degenerate(
            "orbit of zero radius at the origin has no azimuth".into(),
        ));
    }
    let through_origin = classify_orbit(orbit, DEFAULT_CLASSIFY_TOL) == OrbitCategory::Zero;
    let origin_eps = 1e-12 * scale;

    let dt = period / n_samples as f64;
    let state = |t: f64| orbit_state(orbit, params, t);
    let mut delta_phi = 0.0;
    let mut prev: Option<ParticleState> = None;
    for k in 0..=n_samples {
        let s = state(k as f64 * dt);
        if s.rho_sq().sqrt() <= origin_eps {
            // Azimuth undefined exactly at the origin; bridge over the sample.
            continue;
        }
        if let Some(p) = prev {
            let d = wrap_angle(azimuth(&s) - azimuth(&p));
            delta_phi += if through_origin {
                if d.abs() > 0.5 * PI {
                    d - PI * d.signum()
                } else {
                    d
                }
            } else {
                refine(&state, &p, &s, d, 0)
            };
        }
        prev = Some(s);
    }
    let mean_omega = delta_phi / period;
    Ok(WindingResult {
        delta_phi,
        mean_omega,
        i_c: mean_omega / TAU,
    })
}

fn azimuth(s: &ParticleState) -> f64 {
    s.y.atan2(s.x)
}

/// Split a step whose wrapped increment is large until each piece is
/// unambiguous.
fn refine(
    state: &impl Fn(f64) -> ParticleState,
    a: &ParticleState,
    b: &ParticleState,
    d: f64,
    depth: u32,
) -> f64 {
    if d.abs() <= 0.5 * PI || depth >= MAX_REFINE_DEPTH {
        return d;
    }
    let mid = state(0.5 * (a.t + b.t));
    let d1 = wrap_angle(azimuth(&mid) - azimuth(a));
    let d2 = wrap_angle(azimuth(b) - azimuth(&mid));
    refine(state, a, &mid, d1, depth + 1) + refine(state, &mid, b, d2, depth + 1)
}

/// Unwrapped azimuth change along an arbitrary sampled path.
pub fn unwrapped_azimuth_change(states: &[ParticleState]) -> f64 {
    states
        .windows(2)
        .map(|w| wrap_angle(azimuth(&w[1]) - azimuth(&w[0])))
        .sum()
}

/// Azimuthal current binned in equal-width radial shells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub bin_edges: Vec<f64>,
    /// Sum of `v . phi_hat` over bin members divided by the total number of
    /// samples: the mean azimuthal velocity weighted by the bin's share.
    pub j_phi: Vec<f64>,
    pub counts: Vec<usize>,
    /// Indices of bins that received no samples (their `j_phi` is 0).
    pub empty_bins: Vec<usize>,
}

impl RadialProfile {
    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        0.5 * (self.bin_edges[i] + self.bin_edges[i + 1])
    }

    /// Plain mean of `v . phi_hat` over a bin's members, if any.
    pub fn mean_v_phi(&self, i: usize) -> Option<f64> {
        let total: usize = self.counts.iter().sum();
        (self.counts[i] > 0).then(|| self.j_phi[i] * total as f64 / self.counts[i] as f64)
    }

    /// Number of sign flips of `j_phi` across nonempty bins, inner to outer.
    pub fn sign_changes(&self) -> usize {
        let signs: Vec<f64> = self
            .j_phi
            .iter()
            .zip(&self.counts)
            .filter(|(j, &c)| c > 0 && **j != 0.0)
            .map(|(j, _)| j.signum())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// First and last nonempty bins.
    pub fn occupied_range(&self) -> Option<(usize, usize)> {
        let first = self.counts.iter().position(|&c| c > 0)?;
        let last = self.counts.iter().rposition(|&c| c > 0)?;
        Some((first, last))
    }
}

/// Azimuthal component `(x vy - y vx) / rho`; zero at the origin.
pub fn azimuthal_velocity(s: &ParticleState, origin_eps: f64) -> f64 {
    let rho = s.rho_sq().sqrt();
    if rho <= origin_eps {
        0.0
    } else {
        (s.x * s.vy - s.y * s.vx) / rho
    }
}

/// Bin every electron at `t_samples` equally spaced times over one period
/// into `n_bins` shells spanning `[max(0, R_cen - R), R_cen + R]`.
pub fn current_profile(
    ensemble: &VortexEnsemble,
    n_bins: usize,
    t_samples: usize,
) -> Result<RadialProfile> {
    if n_bins < 4 {
        return Err(Error::Validation(format!("n_bins must be at least 4, got {n_bins}")));
    }
    if t_samples == 0 {
        return Err(Error::Validation("t_samples must be at least 1".into()));
    }
    let (r, r_cen) = (ensemble.radius(), ensemble.r_cen());
    let lo = (r_cen - r).max(0.0);
    let hi = r_cen + r;
    let width = (hi - lo) / n_bins as f64;
    let bin_edges: Vec<f64> = (0..=n_bins)
        .map(|i| if i == n_bins { hi } else { lo + width * i as f64 })
        .collect();

    const EDGE_EPS: f64 = 1e-12;
    let origin_eps = 1e-12 * hi;
    // Zero field: the electrons sit still, a single snapshot suffices.
    let period = ensemble.params().period().unwrap_or(0.0);

    let mut sums = vec![0.0; n_bins];
    let mut counts = vec![0usize; n_bins];
    let mut total = 0usize;
    for m in 0..t_samples {
        let t = period * m as f64 / t_samples as f64;
        for s in ensemble.states(t) {
            let rho = s.rho_sq().sqrt();
            if rho < lo - EDGE_EPS * hi.max(1.0) || rho > hi + EDGE_EPS * hi.max(1.0) {
                return Err(Error::Degenerate(format!(
                    "electron at radius {rho} outside the annulus [{lo}, {hi}]"
                )));
            }
            let idx = if width > 0.0 {
                (((rho - lo) / width).floor().max(0.0) as usize).min(n_bins - 1)
            } else {
                0
            };
            sums[idx] += azimuthal_velocity(&s, origin_eps);
            counts[idx] += 1;
            total += 1;
        }
    }
    let j_phi = sums.iter().map(|s| s / total as f64).collect();
    let empty_bins = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == 0)
        .map(|(i, _)| i)
        .collect();
    Ok(RadialProfile {
        bin_edges,
        j_phi,
        counts,
        empty_bins,
    })
}

/// Azimuthal velocity at the inner and outer edges of the annulus, from the
/// exact velocity field `v = omega_c z_hat x (r - r_center)`.
pub fn edge_azimuthal_speed(ensemble: &VortexEnsemble) -> (f64, f64) {
    let w = ensemble.params().omega_c();
    let (r, r_cen) = (ensemble.radius(), ensemble.r_cen());
    // On the ray through a center the inner edge point is at signed distance
    // R_cen - R; its velocity is -w R phi_hat, which flips sign relative to the
    // local azimuthal direction when the point lies across the origin.
    let outer = w * r;
    let inner = if r >= r_cen { w * r } else { -w * r };
    (inner, outer)
}
