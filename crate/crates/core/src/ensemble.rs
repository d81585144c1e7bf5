//! Classical electron vortices: rotationally arranged cyclotron orbits that
//! all carry the same canonical angular momentum, populated with
//! non-interacting electrons.
//!
//! Orbit centers sit at azimuths `2 pi k / n_orbits` on a circle of radius
//! `R_cen`. Averages are taken per electron, summed sequentially in electron
//! order so that repeated runs agree bit for bit.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::angular::{canonical_lz, diamagnetic_lz, kinetic_lz, orbit_canonical_lz};
use crate::dynamics::{orbit_state, CyclotronOrbit, ParticleState, PhysicalParams};
use crate::error::{Error, Result};

/// How electrons are placed on each orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseMode {
    /// `n_per_orbit` electrons at equally spaced phases.
    Uniform { n_per_orbit: usize },
    /// One electron per orbit, starting at the point farthest from the origin.
    Aligned,
    /// Phases listed per orbit (absolute, before `global_phase` is added).
    Explicit { phases: Vec<Vec<f64>> },
    /// `n_per_orbit` electrons at seeded uniformly random phases.
    Random { n_per_orbit: usize, seed: u64 },
}

/// One electron: the index of the orbit it rides on, and that orbit with
/// the electron's own initial phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Electron {
    pub orbit_index: usize,
    pub path: CyclotronOrbit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VortexEnsemble {
    params: PhysicalParams,
    radius: f64,
    r_cen: f64,
    orbits: Vec<CyclotronOrbit>,
    electrons: Vec<Electron>,
    phase_mode: PhaseMode,
    global_phase: f64,
}

/// Per-electron averages at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleObservables {
    pub t: f64,
    pub mean_rho_sq: f64,
    pub mean_kinetic_lz: f64,
    pub mean_canonical_lz: f64,
    pub mean_diamagnetic_lz: f64,
    pub com_x: f64,
    pub com_y: f64,
    pub inertia_per_electron: f64,
}

/// Moment of inertia per electron about the z-axis, split into the part
/// about the center of mass and the center-of-mass transfer term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InertiaSplit {
    pub own: f64,
    pub transfer: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t.iter().copied().zip(self.values.iter().copied())
    }
}

/// `offset + amplitude * cos(omega_c t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineLaw {
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub omega: f64,
}

impl CosineLaw {
    pub fn eval(&self, t: f64) -> f64 {
        self.offset + self.amplitude * (self.omega * t + self.phase).cos()
    }
}

/// Construct a vortex of `n_orbits` orbits of radius `radius` whose centers lie
/// at distance `r_cen` from the origin.
pub fn build_vortex(
    params: PhysicalParams,
    radius: f64,
    r_cen: f64,
    n_orbits: usize,
    phase_mode: PhaseMode,
    global_phase: f64,
) -> Result<VortexEnsemble> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Validation(format!("R must be positive, got {radius}")));
    }
    if !(r_cen.is_finite() && r_cen >= 0.0) {
        return Err(Error::Validation(format!("R_cen must be nonnegative, got {r_cen}")));
    }
    if n_orbits == 0 {
        return Err(Error::Validation("n_orbits must be at least 1".into()));
    }
    if !global_phase.is_finite() {
        return Err(Error::Validation("global_phase must be finite".into()));
    }
    match &phase_mode {
        PhaseMode::Uniform { n_per_orbit } if *n_per_orbit < 2 => {
            return Err(Error::BadDistribution(format!(
                "uniform mode needs at least 2 electrons per orbit, got {n_per_orbit}"
            )));
        }
        PhaseMode::Random { n_per_orbit, .. } if *n_per_orbit == 0 => {
            return Err(Error::BadDistribution(
                "random mode needs at least 1 electron per orbit".into(),
            ));
        }
        PhaseMode::Explicit { phases } => {
            if phases.len() != n_orbits {
                return Err(Error::BadDistribution(format!(
                    "explicit phases given for {} orbits, expected {n_orbits}",
                    phases.len()
                )));
            }
            if phases.iter().any(|p| p.is_empty()) {
                return Err(Error::BadDistribution("every orbit needs at least one phase".into()));
            }
            if phases.iter().flatten().any(|p| !p.is_finite()) {
                return Err(Error::BadDistribution("explicit phases must be finite".into()));
            }
        }
        _ => {}
    }

    let orbits = (0..n_orbits)
        .map(|k| CyclotronOrbit::polar(r_cen, center_azimuth(k, n_orbits), radius, 0.0))
        .collect::<Result<Vec<_>>>()?;

    let mut rng = match &phase_mode {
        PhaseMode::Random { seed, .. } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut electrons = Vec::new();
    for (k, orbit) in orbits.iter().enumerate() {
        let alpha = center_azimuth(k, n_orbits);
        let phases: Vec<f64> = match &phase_mode {
            PhaseMode::Uniform { n_per_orbit } => (0..*n_per_orbit)
                .map(|j| alpha + TAU * j as f64 / *n_per_orbit as f64)
                .collect(),
            PhaseMode::Aligned => vec![alpha],
            PhaseMode::Explicit { phases } => phases[k].clone(),
            PhaseMode::Random { n_per_orbit, .. } => {
                let rng = rng.as_mut().expect("random mode carries an rng");
                (0..*n_per_orbit).map(|_| rng.gen_range(0.0..TAU)).collect()
            }
        };
        for phase in phases {
            let path = CyclotronOrbit::new(orbit.x0(), orbit.y0(), radius, phase + global_phase)?;
            electrons.push(Electron {
                orbit_index: k,
                path,
            });
        }
    }

    let reference = orbit_canonical_lz(&orbits[0], &params);
    let spread = orbits
        .iter()
        .map(|o| (orbit_canonical_lz(o, &params) - reference).abs())
        .fold(0.0, f64::max);
    if spread > 1e-12 * reference.abs().max(1.0) {
        return Err(Error::Degenerate(format!(
            "orbits disagree on canonical L_z by {spread:e}"
        )));
    }

    Ok(VortexEnsemble {
        params,
        radius,
        r_cen,
        orbits,
        electrons,
        phase_mode,
        global_phase,
    })
}

fn center_azimuth(k: usize, n_orbits: usize) -> f64 {
    TAU * k as f64 / n_orbits as f64
}

impl VortexEnsemble {
    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn r_cen(&self) -> f64 {
        self.r_cen
    }

    pub fn n_orbits(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbits(&self) -> &[CyclotronOrbit] {
        &self.orbits
    }

    pub fn electrons(&self) -> &[Electron] {
        &self.electrons
    }

    pub fn n_electrons(&self) -> usize {
        self.electrons.len()
    }

    pub fn phase_mode(&self) -> &PhaseMode {
        &self.phase_mode
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    /// Canonical angular momentum shared by every orbit.
    pub fn canonical_lz(&self) -> f64 {
        orbit_canonical_lz(&self.orbits[0], &self.params)
    }

    /// Constant part of the kinetic angular momentum, `m omega_c R^2`.
    pub fn kinetic_lz_offset(&self) -> f64 {
        self.params.mass() * self.params.omega_c() * self.radius * self.radius
    }

    /// One state per electron at time `t`, in electron order.
    pub fn states(&self, t: f64) -> Vec<ParticleState> {
        ensemble_states(self, t)
    }

    /// Per-electron averages at time `t`.
    pub fn observe(&self, t: f64) -> EnsembleObservables {
        observe(self, t)
    }

    /// Exact form of the mean kinetic angular momentum as a function of time.
    ///
    /// Each electron contributes `m w R R_cen cos(w t + theta - alpha)`; the
    /// ensemble sum of those phasors gives one amplitude and phase.
    pub fn kinetic_lz_cosine_law(&self) -> CosineLaw {
        let (m, w) = (self.params.mass(), self.params.omega_c());
        let (mut re, mut im) = (0.0, 0.0);
        for e in &self.electrons {
            let delta = e.path.theta() - e.path.center_azimuth();
            let weight = e.path.r_cen();
            re += weight * delta.cos();
            im += weight * delta.sin();
        }
        let n = self.electrons.len() as f64;
        let scale = m * w * self.radius / n;
        CosineLaw {
            offset: self.kinetic_lz_offset(),
            amplitude: scale * re.hypot(im),
            phase: im.atan2(re),
            omega: w,
        }
    }
}

pub fn ensemble_states(ensemble: &VortexEnsemble, t: f64) -> Vec<ParticleState> {
    ensemble
        .electrons
        .iter()
        .map(|e| orbit_state(&e.path, &ensemble.params, t))
        .collect()
}

pub fn observe(ensemble: &VortexEnsemble, t: f64) -> EnsembleObservables {
    let p = &ensemble.params;
    let states = ensemble_states(ensemble, t);
    let n = states.len() as f64;
    let mut acc = [0.0f64; 6];
    for s in &states {
        acc[0] += s.rho_sq();
        acc[1] += kinetic_lz(s, p);
        acc[2] += canonical_lz(s, p);
        acc[3] += diamagnetic_lz(s, p);
        acc[4] += s.x;
        acc[5] += s.y;
    }
    let [rho_sq, kin, can, dia, cx, cy] = acc.map(|v| v / n);
    EnsembleObservables {
        t,
        mean_rho_sq: rho_sq,
        mean_kinetic_lz: kin,
        mean_canonical_lz: can,
        mean_diamagnetic_lz: dia,
        com_x: cx,
        com_y: cy,
        inertia_per_electron: p.mass() * rho_sq,
    }
}

/// Mean kinetic angular momentum sampled on `t_grid`.
pub fn kinetic_lz_series(ensemble: &VortexEnsemble, t_grid: &[f64]) -> Result<TimeSeries> {
    if t_grid.is_empty() {
        return Err(Error::Validation("time grid must be nonempty".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Validation("time grid must be finite and strictly increasing".into()));
    }
    let values = t_grid
        .iter()
        .map(|&t| observe(ensemble, t).mean_kinetic_lz)
        .collect();
    Ok(TimeSeries {
        t: t_grid.to_vec(),
        values,
    })
}

/// Mean kinetic energy per electron, `(m/2) <v^2>`.
pub fn energy_per_electron(ensemble: &VortexEnsemble) -> f64 {
    let m = ensemble.params.mass();
    let states = ensemble_states(ensemble, 0.0);
    let sum: f64 = states.iter().map(|s| s.vx * s.vx + s.vy * s.vy).sum();
    0.5 * m * sum / states.len() as f64
}

/// Time average of the mean kinetic angular momentum over one cyclotron
/// period, by an equally weighted `n_samples`-point rule. The rule is exact
/// for the pure first harmonic once `n_samples >= 2`.
pub fn time_averaged_kinetic_lz(ensemble: &VortexEnsemble, n_samples: usize) -> f64 {
    let Some(period) = ensemble.params.period() else {
        return observe(ensemble, 0.0).mean_kinetic_lz;
    };
    let n = n_samples.max(2);
    let sum: f64 = (0..n)
        .map(|k| observe(ensemble, period * k as f64 / n as f64).mean_kinetic_lz)
        .sum();
    sum / n as f64
}

/// Split `m <rho^2>` into the inertia about the center of mass and the
/// transfer term `m |r_com|^2`.
pub fn parallel_axis(ensemble: &VortexEnsemble, t: f64) -> InertiaSplit {
    let m = ensemble.params.mass();
    let states = ensemble_states(ensemble, t);
    let n = states.len() as f64;
    let (sx, sy) = states
        .iter()
        .fold((0.0, 0.0), |(ax, ay), s| (ax + s.x, ay + s.y));
    let (cx, cy) = (sx / n, sy / n);
    let spread: f64 = states
        .iter()
        .map(|s| (s.x - cx).powi(2) + (s.y - cy).powi(2))
        .sum();
    let own = m * spread / n;
    let transfer = m * (cx * cx + cy * cy);
    InertiaSplit {
        own,
        transfer,
        total: own + transfer,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params() -> PhysicalParams {
        PhysicalParams::default()
    }

    fn uniform(n: usize) -> PhaseMode {
        PhaseMode::Uniform { n_per_orbit: n }
    }

    #[test]
    fn build_examples() {
        let v = build_vortex(params(), 2.0, 1.0, 8, uniform(16), 0.0).unwrap();
        assert_eq!(v.n_electrons(), 128);
        for o in v.orbits() {
            assert!((orbit_canonical_lz(o, &params()) - 1.5).abs() < 1e-12);
        }

        let v = build_vortex(params(), 1.0, 1.0, 8, uniform(16), 0.0).unwrap();
        for o in v.orbits() {
            assert!(orbit_canonical_lz(o, &params()).abs() < 1e-12);
        }

        let v = build_vortex(params(), 1.0, 2.0, 12, PhaseMode::Aligned, 0.0).unwrap();
        assert_eq!(v.n_electrons(), 12);
        for s in v.states(0.0) {
            assert!((s.rho_sq().sqrt() - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn build_rejects_bad_inputs() {
        let err = build_vortex(params(), 1.0, 2.0, 8, uniform(1), 0.0).unwrap_err();
        assert!(matches!(err, Error::BadDistribution(_)));
        assert!(build_vortex(params(), 0.0, 2.0, 8, uniform(4), 0.0).is_err());
        assert!(build_vortex(params(), 1.0, -2.0, 8, uniform(4), 0.0).is_err());
        assert!(build_vortex(params(), 1.0, 2.0, 0, uniform(4), 0.0).is_err());
        let short = PhaseMode::Explicit {
            phases: vec![vec![0.0]],
        };
        assert!(matches!(
            build_vortex(params(), 1.0, 2.0, 2, short, 0.0),
            Err(Error::BadDistribution(_))
        ));
        let empty = PhaseMode::Explicit {
            phases: vec![vec![0.0], vec![]],
        };
        assert!(build_vortex(params(), 1.0, 2.0, 2, empty, 0.0).is_err());
    }

    #[test]
    fn aligned_states_at_half_period() {
        let v = build_vortex(params(), 1.0, 2.0, 12, PhaseMode::Aligned, 0.0).unwrap();
        for s in ensemble_states(&v, PI) {
            assert!((s.rho_sq().sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_radii_distribution_is_time_invariant() {
        let v = build_vortex(params(), 1.0, 2.0, 4, uniform(8), 0.0).unwrap();
        let sorted = |t: f64| {
            let mut r: Vec<f64> = v.states(t).iter().map(|s| s.rho_sq()).collect();
            r.sort_by(f64::total_cmp);
            r
        };
        let a = sorted(0.0);
        // A shift by one phase step permutes electrons within each orbit.
        let b = sorted(TAU / 8.0);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn observe_examples() {
        let v = build_vortex(params(), 1.0, 2.0, 8, uniform(16), 0.0).unwrap();
        for t in [0.0, 0.7, 2.9, 11.0] {
            let o = v.observe(t);
            assert!((o.mean_rho_sq - 5.0).abs() < 1e-12);
            assert!((o.mean_kinetic_lz - 1.0).abs() < 1e-12);
        }

        let a = build_vortex(params(), 1.0, 2.0, 12, PhaseMode::Aligned, 0.0).unwrap();
        let o = a.observe(0.0);
        assert!((o.mean_rho_sq - 9.0).abs() < 1e-12);
        assert!((o.mean_kinetic_lz - 3.0).abs() < 1e-12);
        let o = a.observe(PI);
        assert!((o.mean_rho_sq - 1.0).abs() < 1e-12);
        assert!((o.mean_kinetic_lz + 1.0).abs() < 1e-12);
    }

    #[test]
    fn observables_identity() {
        let v = build_vortex(params(), 1.3, 0.4, 5, uniform(7), 0.2).unwrap();
        let o = v.observe(1.234);
        assert!((o.mean_kinetic_lz - o.mean_canonical_lz - o.mean_diamagnetic_lz).abs() < 1e-12);
        assert_eq!(o.inertia_per_electron, o.mean_rho_sq);
    }

    #[test]
    fn series_examples() {
        let grid: Vec<f64> = (0..64).map(|k| k as f64 * 0.1).collect();
        let aligned = build_vortex(params(), 1.0, 2.0, 12, PhaseMode::Aligned, 0.0).unwrap();
        let s = kinetic_lz_series(&aligned, &grid).unwrap();
        for (t, l) in s.iter() {
            assert!((l - (1.0 + 2.0 * t.cos())).abs() < 1e-12);
        }

        let uni = build_vortex(params(), 1.0, 2.0, 8, uniform(16), 0.0).unwrap();
        for (_, l) in kinetic_lz_series(&uni, &grid).unwrap().iter() {
            assert!((l - 1.0).abs() < 1e-12);
        }

        let centered = build_vortex(params(), 1.5, 0.0, 3, PhaseMode::Aligned, 0.0).unwrap();
        for (_, l) in kinetic_lz_series(&centered, &grid).unwrap().iter() {
            assert!((l - 2.25).abs() < 1e-12);
        }
    }

    #[test]
    fn series_rejects_bad_grid() {
        let v = build_vortex(params(), 1.0, 2.0, 2, PhaseMode::Aligned, 0.0).unwrap();
        assert!(kinetic_lz_series(&v, &[]).is_err());
        assert!(kinetic_lz_series(&v, &[0.0, 0.0]).is_err());
        assert!(kinetic_lz_series(&v, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn energy_examples() {
        let one = build_vortex(params(), 1.0, 2.0, 8, uniform(16), 0.0).unwrap();
        assert!((energy_per_electron(&one) - 0.5).abs() < 1e-12);
        let two = build_vortex(params(), 2.0, 1.0, 8, uniform(16), 0.0).unwrap();
        assert!((energy_per_electron(&two) - 2.0).abs() < 1e-12);
        let avg = time_averaged_kinetic_lz(&one, 32);
        assert!((energy_per_electron(&one) - 0.5 * params().omega_c() * avg).abs() < 1e-12);
    }

    #[test]
    fn parallel_axis_examples() {
        let uni = build_vortex(params(), 1.0, 2.0, 8, uniform(16), 0.0).unwrap();
        let split = parallel_axis(&uni, 0.37);
        assert!((split.total - 5.0).abs() < 1e-12);
        assert!((split.own - 5.0).abs() < 1e-12);
        assert!(split.transfer.abs() < 1e-12);

        let aligned = build_vortex(params(), 1.0, 2.0, 12, PhaseMode::Aligned, 0.0).unwrap();
        for t in [0.0, 1.0, PI, 4.0] {
            let split = parallel_axis(&aligned, t);
            assert!(split.transfer < 1e-24);
            assert!((split.total - (5.0 + 4.0 * t.cos())).abs() < 1e-12);
        }

        let single = build_vortex(
            params(),
            1.0,
            2.0,
            1,
            PhaseMode::Explicit {
                phases: vec![vec![0.3]],
            },
            0.0,
        )
        .unwrap();
        for t in [0.0, 0.8, 2.2] {
            let split = parallel_axis(&single, t);
            let rho_sq = single.states(t)[0].rho_sq();
            assert_eq!(split.own, 0.0);
            assert!((split.transfer - rho_sq).abs() < 1e-12);
        }
    }

    #[test]
    fn cosine_law_of_aligned_vortex() {
        let v = build_vortex(params(), 1.0, 2.0, 12, PhaseMode::Aligned, 0.0).unwrap();
        let law = v.kinetic_lz_cosine_law();
        assert!((law.offset - 1.0).abs() < 1e-15);
        assert!((law.amplitude - 2.0).abs() < 1e-12);
        assert!(law.phase.abs() < 1e-12);
    }

    #[test]
    fn random_mode_is_seeded() {
        let mode = PhaseMode::Random {
            n_per_orbit: 10,
            seed: 7,
        };
        let a = build_vortex(params(), 1.0, 2.0, 4, mode.clone(), 0.0).unwrap();
        let b = build_vortex(params(), 1.0, 2.0, 4, mode, 0.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_electrons(), 40);
    }
}
