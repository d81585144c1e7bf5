//! The `verify` suite: every closed-form prediction checked against direct
//! numerical evaluation, collected into a serializable report.
//!
//! Checks run sequentially in a fixed order. A check that cannot be
//! evaluated for the configured parameters (zero field, for instance)
//! is reported with status `error` and counts as a failure.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::angular::{
    breakdown, canonical_lz, classify_orbit, orbit_canonical_lz, orbit_kinetic_lz,
    predicted_kinetic_lz, OrbitCategory,
};
use crate::config::RunConfig;
use crate::currents::{current_profile, edge_azimuthal_speed, winding_angle};
use crate::dynamics::{
    analytic_trajectory, energy_2d, hamiltonian_cartesian, integrate_lorentz, orbit_state,
    rho_squared_ode_residual, CyclotronOrbit, Method, ParticleState, PhysicalParams, Trajectory,
};
use crate::ensemble::{
    build_vortex, energy_per_electron, kinetic_lz_series, parallel_axis, time_averaged_kinetic_lz,
    PhaseMode, VortexEnsemble,
};
use crate::error::{Error, Result};
use crate::oracles::{classical_quantum_gap, landau_energy, LandauIndex, LANDAU_INTERPRETATION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    /// Worst observed deviation; `None` when the check could not run.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub omega_c: f64,
    pub seed: u64,
    pub landau_interpretation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub passed: bool,
    pub checks: Vec<Check>,
    pub metadata: ReportMetadata,
}

impl Report {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status != CheckStatus::Pass)
    }
}

/// Measured outcome of one check body.
struct Outcome {
    residual: f64,
    tolerance: f64,
    detail: String,
}

impl Outcome {
    fn new(residual: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            residual,
            tolerance,
            detail: detail.into(),
        }
    }
}

fn record(checks: &mut Vec<Check>, name: &str, tolerance: f64, result: Result<Outcome>) {
    let check = match result {
        Ok(o) if o.residual.is_finite() => Check {
            name: name.into(),
            status: if o.residual <= o.tolerance {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            residual: Some(o.residual),
            tolerance: o.tolerance,
            detail: o.detail,
        },
        Ok(o) => Check {
            name: name.into(),
            status: CheckStatus::Fail,
            residual: None,
            tolerance: o.tolerance,
            detail: format!("non-finite residual; {}", o.detail),
        },
        Err(e) => Check {
            name: name.into(),
            status: CheckStatus::Error,
            residual: None,
            tolerance,
            detail: format!("{e:?}: {e}"),
        },
    };
    checks.push(check);
}

/// Orbits representative of the three canonical angular momentum signs,
/// as `(expected category, R, R_cen)`.
pub const CATEGORY_ORBITS: [(OrbitCategory, f64, f64); 3] = [
    (OrbitCategory::Positive, 2.0, 1.0),
    (OrbitCategory::Zero, 1.0, 1.0),
    (OrbitCategory::Negative, 1.0, 2.0),
];

fn category_orbit(r: f64, r_cen: f64) -> CyclotronOrbit {
    CyclotronOrbit::new(r_cen, 0.0, r, 0.0).expect("category orbits are valid")
}

fn period(params: &PhysicalParams) -> Result<f64> {
    params.period().ok_or(Error::ZeroField)
}

/// Largest position error of a trajectory against the exact orbit.
pub fn max_position_error(traj: &Trajectory, orbit: &CyclotronOrbit, params: &PhysicalParams) -> f64 {
    traj.states()
        .iter()
        .map(|s| {
            let e = orbit_state(orbit, params, s.t);
            (s.x - e.x).hypot(s.y - e.y)
        })
        .fold(0.0, f64::max)
}

/// rk4 over one period with `steps` steps; returns the max position error.
pub fn rk4_period_error(orbit: &CyclotronOrbit, params: &PhysicalParams, steps: usize) -> Result<f64> {
    let t = period(params)?;
    let start = orbit_state(orbit, params, 0.0);
    let traj = integrate_lorentz(&start, params, t / steps as f64, steps, Method::Rk4)?;
    Ok(max_position_error(&traj, orbit, params))
}

/// Spread `max - min` of a quantity along a trajectory.
pub fn drift(traj: &Trajectory, f: impl Fn(&ParticleState) -> f64) -> f64 {
    let (lo, hi) = traj
        .states()
        .iter()
        .map(f)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    hi - lo
}

fn random_state(rng: &mut ChaCha8Rng) -> ParticleState {
    ParticleState::new(
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
        0.0,
    )
}

fn random_orbit(rng: &mut ChaCha8Rng) -> CyclotronOrbit {
    CyclotronOrbit::new(
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(0.0..3.0),
        rng.gen_range(0.0..TAU),
    )
    .expect("random orbit is valid")
}

fn ensembles(config: &RunConfig) -> Result<Vec<(String, VortexEnsemble)>> {
    config
        .cases
        .iter()
        .map(|c| Ok((c.label.clone(), c.geometry.build(config.params)?)))
        .collect()
}

/// Run the full catalogue of checks for `config`.
pub fn verify_all(config: &RunConfig) -> Report {
    let p = config.params;
    let a = &config.analysis;
    let g = &config.geometry;
    let mut checks = Vec::new();
    let config_orbit = CyclotronOrbit::new(g.r_cen, 0.0, g.radius, g.global_phase);

    record(&mut checks, "rk4_accuracy", 1e-8, (|| {
        let orbit = config_orbit.clone()?;
        let err = rk4_period_error(&orbit, &p, a.rk4_steps_per_period)?;
        Ok(Outcome::new(
            err,
            1e-8 * orbit.radius(),
            format!("max position error over one period, dt = T/{}", a.rk4_steps_per_period),
        ))
    })());

    record(&mut checks, "rk4_convergence_order", 4.0, (|| {
        let orbit = config_orbit.clone()?;
        let errs = [128, 256, 512]
            .into_iter()
            .map(|n| rk4_period_error(&orbit, &p, n))
            .collect::<Result<Vec<_>>>()?;
        let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
        let worst = ratios.iter().map(|r| (r - 16.0).abs()).fold(0.0, f64::max);
        Ok(Outcome::new(
            worst,
            4.0,
            format!("error ratios under dt halving {ratios:?}; expected within [12, 20]"),
        ))
    })());

    record(&mut checks, "canonical_lz_conservation_analytic", 1e-12, (|| {
        let orbit = config_orbit.clone()?;
        let t = period(&p)?;
        let traj = analytic_trajectory(&orbit, &p, 0.0, t / 1024.0, 10 * 1024)?;
        Ok(Outcome::new(
            drift(&traj, |s| canonical_lz(s, &p)),
            1e-12 * orbit_scale(&orbit, &p),
            "spread of canonical L_z over 10 periods of the exact orbit",
        ))
    })());

    record(&mut checks, "canonical_lz_conservation_rk4", 1e-8, (|| {
        let orbit = config_orbit.clone()?;
        let t = period(&p)?;
        let start = orbit_state(&orbit, &p, 0.0);
        let traj = integrate_lorentz(&start, &p, t / 1024.0, 10 * 1024, Method::Rk4)?;
        Ok(Outcome::new(
            drift(&traj, |s| canonical_lz(s, &p)),
            1e-8 * orbit_scale(&orbit, &p),
            "spread of canonical L_z over 10 periods, rk4 at T/1024",
        ))
    })());

    record(&mut checks, "boris_speed_conservation", 1e-10, (|| {
        let orbit = config_orbit.clone()?;
        let t = period(&p)?;
        let start = orbit_state(&orbit, &p, 0.0);
        let traj = integrate_lorentz(&start, &p, t / 1024.0, 10 * 1024, Method::Boris)?;
        Ok(Outcome::new(
            drift(&traj, |s| s.speed()),
            1e-10 * start.speed().max(1.0),
            "spread of speed over 10 periods, boris at T/1024",
        ))
    })());

    record(&mut checks, "free_streaming", 1e-12, (|| {
        let free = p.with_field(0.0)?;
        let start = ParticleState::new(0.0, 0.0, 1.0, 0.0, 0.0);
        let mut worst: f64 = 0.0;
        for method in [Method::Rk4, Method::Boris] {
            let end = *integrate_lorentz(&start, &free, 0.01, 100, method)?.last();
            worst = worst.max((end.x - 1.0).abs()).max(end.y.abs());
        }
        Ok(Outcome::new(worst, 1e-12, "zero field, unit speed for unit time"))
    })());

    record(&mut checks, "gauge_consistency", 1e-12, {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let mut worst: f64 = 0.0;
        for _ in 0..10 * a.random_checks {
            let s = random_state(&mut rng);
            let w = p.omega_c();
            let scale = 1.0 + energy_2d(&s, &p) + p.mass() * w * w * s.rho_sq();
            worst = worst.max((hamiltonian_cartesian(&s, &p) - energy_2d(&s, &p)).abs() / scale);
        }
        Ok(Outcome::new(worst, 1e-12, "relative |H - (m/2) v^2| over random states"))
    });

    record(&mut checks, "angular_momentum_identity", 1e-12, {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed.wrapping_add(1));
        let mut worst: f64 = 0.0;
        for _ in 0..10 * a.random_checks {
            let s = random_state(&mut rng);
            let b = breakdown(&s, &p);
            let scale = 1.0 + b.kinetic.abs() + b.diamagnetic.abs();
            worst = worst.max((b.kinetic - b.canonical - b.diamagnetic).abs() / scale);
        }
        Ok(Outcome::new(worst, 1e-12, "relative |L_kin - L_z - L_dia| over random states"))
    });

    record(&mut checks, "rho_squared_ode", 1e-6, (|| {
        let t = period(&p)?;
        let mut worst: f64 = 0.0;
        for (_, r, r_cen) in CATEGORY_ORBITS {
            let orbit = category_orbit(r, r_cen);
            for k in 0..100 {
                let res = rho_squared_ode_residual(&orbit, &p, t * k as f64 / 100.0, a.fd_step)?;
                worst = worst.max(res);
            }
        }
        Ok(Outcome::new(
            worst,
            1e-6,
            format!("finite-difference residual, fd_step = {}", a.fd_step),
        ))
    })());

    record(&mut checks, "orbit_classification", 0.0, {
        let misses = CATEGORY_ORBITS
            .iter()
            .filter(|(cat, r, r_cen)| classify_orbit(&category_orbit(*r, *r_cen), a.classify_tol) != *cat)
            .count();
        Ok(Outcome::new(misses as f64, 0.0, "misclassified category orbits"))
    });

    record(&mut checks, "canonical_lz_closed_form", 1e-10, (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed.wrapping_add(2));
        let mut worst: f64 = 0.0;
        let mut sign_mismatch = 0;
        for _ in 0..a.random_checks {
            let orbit = random_orbit(&mut rng);
            let t = rng.gen_range(0.0..20.0);
            let closed = orbit_canonical_lz(&orbit, &p);
            let direct = canonical_lz(&orbit_state(&orbit, &p, t), &p);
            worst = worst.max((closed - direct).abs());
            let cat = classify_orbit(&orbit, a.classify_tol);
            let expect = match cat {
                OrbitCategory::Positive => closed * p.omega_c() > 0.0,
                OrbitCategory::Negative => closed * p.omega_c() < 0.0,
                OrbitCategory::Zero => true,
            };
            if !expect && p.omega_c() != 0.0 {
                sign_mismatch += 1;
            }
        }
        if sign_mismatch > 0 {
            return Ok(Outcome::new(
                f64::INFINITY,
                1e-10,
                format!("{sign_mismatch} orbits whose L_z sign disagrees with their category"),
            ));
        }
        Ok(Outcome::new(worst, 1e-10, "closed-form vs direct canonical L_z, random orbits"))
    })());

    record(&mut checks, "winding_frequencies", 1e-9, (|| {
        let w = p.omega_c();
        let expected = [w, 0.5 * w, 0.0];
        let mut worst: f64 = 0.0;
        let mut measured = Vec::new();
        for ((_, r, r_cen), want) in CATEGORY_ORBITS.iter().zip(expected) {
            let res = winding_angle(&category_orbit(*r, *r_cen), &p, a.n_samples)?;
            worst = worst.max((res.mean_omega - want).abs());
            measured.push(res.mean_omega);
        }
        Ok(Outcome::new(
            worst,
            1e-9 * w.abs().max(1.0),
            format!("mean azimuthal frequency {measured:?} vs [w, w/2, 0]"),
        ))
    })());

    record(&mut checks, "kinetic_lz_cosine_form", 1e-12, (|| {
        let orbit = config_orbit.clone()?;
        let t = period(&p)?;
        let worst = (0..100)
            .map(|k| {
                let tk = t * k as f64 / 100.0;
                (orbit_kinetic_lz(&orbit, &p, tk) - predicted_kinetic_lz(&orbit, &p, tk)).abs()
            })
            .fold(0.0, f64::max);
        Ok(Outcome::new(
            worst,
            1e-12 * orbit_scale(&orbit, &p),
            "direct kinetic L_z vs constant-plus-cosine form",
        ))
    })());

    record(&mut checks, "uniform_vortex_constancy", 1e-12, (|| {
        let t = period(&p)?;
        let n_per_orbit = match g.phase_mode {
            PhaseMode::Uniform { n_per_orbit } => n_per_orbit,
            _ => 16,
        };
        let v = build_vortex(p, g.radius, g.r_cen, g.n_orbits, PhaseMode::Uniform { n_per_orbit }, 0.0)?;
        let rho_target = g.radius * g.radius + g.r_cen * g.r_cen;
        let l_target = v.kinetic_lz_offset();
        let mut worst: f64 = 0.0;
        for k in 0..32 {
            let o = v.observe(t * k as f64 / 32.0);
            worst = worst
                .max((o.mean_rho_sq - rho_target).abs())
                .max((o.mean_kinetic_lz - l_target).abs())
                .max((o.mean_canonical_lz - v.canonical_lz()).abs());
        }
        Ok(Outcome::new(
            worst,
            1e-12 * rho_target.max(1.0) * p.mass() * p.omega_c().abs().max(1.0),
            "uniform vortex: <rho^2>, <L_kin>, <L_z> constant at 32 times",
        ))
    })());

    record(&mut checks, "aligned_vortex_cosine_law", 1e-12, (|| {
        let t = period(&p)?;
        let v = build_vortex(p, g.radius, g.r_cen, g.n_orbits.max(2), PhaseMode::Aligned, 0.0)?;
        let grid: Vec<f64> = (0..=64).map(|k| 2.0 * t * k as f64 / 64.0).collect();
        let series = kinetic_lz_series(&v, &grid)?;
        let offset = v.kinetic_lz_offset();
        let l0 = series.values[0];
        let worst = series
            .iter()
            .map(|(tk, l)| (l - (offset + (l0 - offset) * (p.omega_c() * tk).cos())).abs())
            .fold(0.0, f64::max);
        Ok(Outcome::new(
            worst,
            1e-12 * l0.abs().max(1.0),
            "aligned vortex <L_kin>(t) vs L~ + (L(0) - L~) cos(w t)",
        ))
    })());

    record(&mut checks, "ensemble_cosine_law", 1e-10, (|| {
        let t = period(&p)?;
        let mut worst: f64 = 0.0;
        for (_, v) in ensembles(config)? {
            let law = v.kinetic_lz_cosine_law();
            for k in 0..64 {
                let tk = 2.0 * t * k as f64 / 64.0;
                worst = worst.max((v.observe(tk).mean_kinetic_lz - law.eval(tk)).abs());
            }
        }
        Ok(Outcome::new(worst, 1e-10, "configured vortices fit L~ + A cos(w t + d)"))
    })());

    record(&mut checks, "parallel_axis", 1e-12, (|| {
        let t = period(&p)?;
        let mut worst: f64 = 0.0;
        for (_, v) in ensembles(config)? {
            for k in 0..32 {
                let tk = t * k as f64 / 32.0;
                let split = parallel_axis(&v, tk);
                let total = p.mass() * v.observe(tk).mean_rho_sq;
                worst = worst.max((split.own + split.transfer - total).abs() / total.max(1.0));
            }
        }
        Ok(Outcome::new(worst, 1e-12, "own + transfer vs m <rho^2> at 32 times"))
    })());

    record(&mut checks, "energy_per_electron", 1e-12, (|| {
        period(&p)?;
        let mut worst: f64 = 0.0;
        let mut all = ensembles(config)?;
        all.push((
            "aligned".into(),
            build_vortex(p, g.radius, g.r_cen, g.n_orbits, PhaseMode::Aligned, 0.0)?,
        ));
        for (_, v) in &all {
            let e = energy_per_electron(v);
            let from_l = 0.5 * p.omega_c() * time_averaged_kinetic_lz(v, 32);
            worst = worst.max((e - from_l).abs() / e.max(1.0));
        }
        Ok(Outcome::new(worst, 1e-12, "E_e vs (w/2) time-averaged <L_kin>"))
    })());

    record(&mut checks, "landau_spectrum", 0.0, (|| {
        let w = p.omega_c();
        if w == 0.0 {
            return Err(Error::ZeroField);
        }
        let table = [((0, 0), 0.5), ((0, 1), 1.5), ((0, -1), 0.5), ((1, 0), 1.5)];
        let worst = table
            .iter()
            .map(|&((n, l), want)| {
                (landau_energy(LandauIndex::new(n, l), &p) / (p.hbar() * w) - want).abs()
            })
            .fold(0.0, f64::max);
        Ok(Outcome::new(worst, 0.0, "E(n, l) in units of hbar w"))
    })());

    record(&mut checks, "classical_quantum_correspondence", 1e-12, (|| {
        let mut worst: f64 = 0.0;
        for n in 0..3 {
            for l in 0..3 {
                let idx = LandauIndex::new(n, l);
                let scale = landau_energy(idx, &p).abs().max(1.0);
                worst = worst.max(classical_quantum_gap(idx, &p)? / scale);
            }
        }
        Ok(Outcome::new(worst, 1e-12, "centered orbit with m w R^2 = (2n + 2l + 1) hbar"))
    })());

    record(&mut checks, "current_profile_structure", 0.0, (|| {
        period(&p)?;
        let w = p.omega_c();
        let mut problems = Vec::new();
        for (cat, r, r_cen) in CATEGORY_ORBITS {
            let n_per_orbit = if cat == OrbitCategory::Zero { 64 } else { 16 };
            let v = build_vortex(p, r, r_cen, 8, PhaseMode::Uniform { n_per_orbit }, 0.0)?;
            let prof = current_profile(&v, a.n_bins, a.t_samples)?;
            let (first, last) = prof
                .occupied_range()
                .ok_or_else(|| Error::Degenerate("empty profile".into()))?;
            let ok = match cat {
                OrbitCategory::Positive => prof
                    .j_phi
                    .iter()
                    .zip(&prof.counts)
                    .all(|(j, &c)| c == 0 || j * w > 0.0),
                OrbitCategory::Zero => {
                    prof.j_phi[first].abs() < 0.15 * prof.j_phi[last].abs()
                }
                OrbitCategory::Negative => {
                    prof.j_phi[first] * w < 0.0
                        && prof.j_phi[last] * w > 0.0
                        && prof.sign_changes() == 1
                }
            };
            if !ok {
                problems.push(cat.label());
            }
        }
        Ok(Outcome::new(
            problems.len() as f64,
            0.0,
            format!("categories with unexpected profile shape: {problems:?}"),
        ))
    })());

    record(&mut checks, "edge_azimuthal_speed", 1e-12, (|| {
        let w = p.omega_c();
        let mut worst: f64 = 0.0;
        for (cat, r, r_cen) in CATEGORY_ORBITS {
            let v = build_vortex(p, r, r_cen, 4, PhaseMode::Uniform { n_per_orbit: 4 }, 0.0)?;
            let (inner, outer) = edge_azimuthal_speed(&v);
            let inner_sign = if cat == OrbitCategory::Negative { -1.0 } else { 1.0 };
            worst = worst
                .max((outer - w * r).abs())
                .max((inner - inner_sign * w * r).abs());
        }
        Ok(Outcome::new(worst, 1e-12, "edge speeds R|w| with category signs"))
    })());

    let passed = checks.iter().all(|c| c.status == CheckStatus::Pass);
    Report {
        passed,
        checks,
        metadata: ReportMetadata {
            omega_c: p.omega_c(),
            seed: a.seed,
            landau_interpretation: LANDAU_INTERPRETATION.into(),
        },
    }
}

/// Magnitude of angular momenta on an orbit, for relative tolerances.
fn orbit_scale(orbit: &CyclotronOrbit, params: &PhysicalParams) -> f64 {
    let reach = orbit.radius() + orbit.r_cen();
    (params.mass() * params.omega_c().abs() * reach * reach).max(1.0)
}
