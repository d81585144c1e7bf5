//! Planar motion of a single charge in a uniform magnetic field along +z.
//!
//! The exact solution is a circle of radius `R` about a fixed center,
//! traversed at the signed cyclotron frequency `omega_c = -charge * field / mass`.
//! Positive `omega_c` means counter-clockwise rotation seen from +z.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::angular::orbit_canonical_lz;
use crate::error::{Error, Result};

/// Physical constants of the run, in simulation units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    mass: f64,
    charge: f64,
    field: f64,
    hbar: f64,
}

impl Default for PhysicalParams {
    /// Electron convention with unit field: `omega_c = 1`.
    fn default() -> Self {
        Self {
            mass: 1.0,
            charge: -1.0,
            field: 1.0,
            hbar: 1.0,
        }
    }
}

impl PhysicalParams {
    pub fn new(mass: f64, charge: f64, field: f64, hbar: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParams(format!("mass must be positive, got {mass}")));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParams(format!("hbar must be positive, got {hbar}")));
        }
        if !charge.is_finite() || !field.is_finite() {
            return Err(Error::InvalidParams("charge and field must be finite".into()));
        }
        Ok(Self {
            mass,
            charge,
            field,
            hbar,
        })
    }

    /// Same charge, mass and hbar with a different field strength.
    pub fn with_field(self, field: f64) -> Result<Self> {
        Self::new(self.mass, self.charge, field, self.hbar)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn charge(&self) -> f64 {
        self.charge
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Signed cyclotron frequency `-charge * field / mass`.
    pub fn omega_c(&self) -> f64 {
        cyclotron_frequency(self)
    }

    /// Cyclotron period `2 pi / |omega_c|`, or `None` at zero field.
    pub fn period(&self) -> Option<f64> {
        let w = self.omega_c();
        (w != 0.0).then(|| TAU / w.abs())
    }
}

pub fn cyclotron_frequency(params: &PhysicalParams) -> f64 {
    // Adding 0.0 folds a negative zero (charge * 0 field) into +0.
    -params.charge * params.field / params.mass + 0.0
}

/// Position and velocity in the xy-plane at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub t: f64,
}

impl ParticleState {
    pub fn new(x: f64, y: f64, vx: f64, vy: f64, t: f64) -> Self {
        Self { x, y, vx, vy, t }
    }

    pub fn at_rest(x: f64, y: f64) -> Self {
        Self::new(x, y, 0.0, 0.0, 0.0)
    }

    pub fn speed(&self) -> f64 {
        self.vx.hypot(self.vy)
    }

    pub fn rho_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn is_finite(&self) -> bool {
        [self.x, self.y, self.vx, self.vy, self.t]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Circle of radius `R` about `(x0, y0)`; `theta` is the phase at `t = 0`
/// measured from the +x direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CyclotronOrbit {
    x0: f64,
    y0: f64,
    radius: f64,
    theta: f64,
}

impl CyclotronOrbit {
    pub fn new(x0: f64, y0: f64, radius: f64, theta: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "orbit radius must be nonnegative, got {radius}"
            )));
        }
        if !(x0.is_finite() && y0.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidParams("orbit center and phase must be finite".into()));
        }
        Ok(Self {
            x0,
            y0,
            radius,
            theta,
        })
    }

    /// Orbit whose center sits at distance `r_cen` and azimuth `alpha` from the origin.
    pub fn polar(r_cen: f64, alpha: f64, radius: f64, theta: f64) -> Result<Self> {
        if !(r_cen.is_finite() && r_cen >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "center distance must be nonnegative, got {r_cen}"
            )));
        }
        Self::new(r_cen * alpha.cos(), r_cen * alpha.sin(), radius, theta)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Distance from the coordinate origin to the orbit center.
    pub fn r_cen(&self) -> f64 {
        self.x0.hypot(self.y0)
    }

    /// Azimuth of the orbit center (0 for a centered orbit).
    pub fn center_azimuth(&self) -> f64 {
        self.y0.atan2(self.x0)
    }

    /// Same circle and phase, shifted so its center moves by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            x0: self.x0 + dx,
            y0: self.y0 + dy,
            ..*self
        }
    }
}

/// Evaluate the exact cyclotron solution at time `t`.
pub fn orbit_state(orbit: &CyclotronOrbit, params: &PhysicalParams, t: f64) -> ParticleState {
    let w = params.omega_c();
    let (s, c) = (w * t + orbit.theta).sin_cos();
    let r = orbit.radius;
    ParticleState {
        x: orbit.x0 + r * c,
        y: orbit.y0 + r * s,
        vx: -r * w * s,
        vy: r * w * c,
        t,
    }
}

/// Recover the orbit that passes through `state` at time `state.t`.
pub fn orbit_from_state(state: &ParticleState, params: &PhysicalParams) -> Result<CyclotronOrbit> {
    let w = params.omega_c();
    if w == 0.0 {
        return Err(Error::ZeroField);
    }
    let x0 = state.x - state.vy / w;
    let y0 = state.y + state.vx / w;
    let radius = state.speed() / w.abs();
    // Phase at time t is atan2(y - y0, x - x0); shift back to t = 0.
    let phase_now = if radius > 0.0 {
        (state.y - y0).atan2(state.x - x0)
    } else {
        0.0
    };
    let theta = (phase_now - w * state.t).rem_euclid(TAU);
    CyclotronOrbit::new(x0, y0, radius, theta)
}

/// Squared distance from the origin, `rho^2(t)`, in closed form.
pub fn rho_squared(orbit: &CyclotronOrbit, params: &PhysicalParams, t: f64) -> f64 {
    let (s, c) = (params.omega_c() * t + orbit.theta).sin_cos();
    let (x0, y0, r) = (orbit.x0, orbit.y0, orbit.radius);
    x0 * x0 + y0 * y0 + r * r + 2.0 * x0 * r * c + 2.0 * y0 * r * s
}

/// Kinetic energy of motion on an orbit, `(1/2) m R^2 omega_c^2`.
pub fn orbit_energy(orbit: &CyclotronOrbit, params: &PhysicalParams) -> f64 {
    let w = params.omega_c();
    0.5 * params.mass * orbit.radius * orbit.radius * w * w
}

/// Absolute mismatch between the finite-difference second derivative of
/// `rho^2` and the right-hand side `-w^2 rho^2 - 2 (w/m) L_z + (4/m) E`.
pub fn rho_squared_ode_residual(
    orbit: &CyclotronOrbit,
    params: &PhysicalParams,
    t: f64,
    fd_step: f64,
) -> Result<f64> {
    if !(fd_step.is_finite() && fd_step > 0.0) {
        return Err(Error::InvalidStep(fd_step));
    }
    let f = |t| rho_squared(orbit, params, t);
    let lhs = (f(t + fd_step) - 2.0 * f(t) + f(t - fd_step)) / (fd_step * fd_step);

    let (m, w) = (params.mass, params.omega_c());
    let lz = orbit_canonical_lz(orbit, params);
    let energy = orbit_energy(orbit, params);
    let rhs = -w * w * f(t) - 2.0 * (w / m) * lz + (4.0 / m) * energy;
    Ok((lhs - rhs).abs())
}

/// Kinetic energy `(m/2)(vx^2 + vy^2)` of the planar motion.
pub fn energy_2d(state: &ParticleState, params: &PhysicalParams) -> f64 {
    0.5 * params.mass * (state.vx * state.vx + state.vy * state.vy)
}

/// Hamiltonian written with symmetric-gauge canonical momenta,
/// `p^2/2m + (w/2) L_z + (m/8) w^2 (x^2 + y^2)`.
///
/// Algebraically identical to [`energy_2d`]; kept as an independent
/// evaluation route for gauge-consistency checks.
pub fn hamiltonian_cartesian(state: &ParticleState, params: &PhysicalParams) -> f64 {
    let (m, e, b) = (params.mass, params.charge, params.field);
    let w = params.omega_c();
    let (ax, ay) = (-0.5 * b * state.y, 0.5 * b * state.x);
    let px = m * state.vx + e * ax;
    let py = m * state.vy + e * ay;
    let lz = state.x * py - state.y * px;
    (px * px + py * py) / (2.0 * m) + 0.5 * w * lz + m / 8.0 * w * w * state.rho_sq()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Rk4,
    Boris,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "analytic" => Ok(Method::Analytic),
            "rk4" => Ok(Method::Rk4),
            "boris" => Ok(Method::Boris),
            other => Err(format!("unknown method `{other}` (expected analytic, rk4 or boris)")),
        }
    }
}

/// Time-ordered samples of a single particle.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    states: Vec<ParticleState>,
    method: Method,
}

impl Trajectory {
    pub fn new(states: Vec<ParticleState>, method: Method) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Validation("trajectory must contain at least one state".into()));
        }
        if states.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::Validation("trajectory times must be strictly increasing".into()));
        }
        Ok(Self { states, method })
    }

    pub fn states(&self) -> &[ParticleState] {
        &self.states
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn first(&self) -> &ParticleState {
        &self.states[0]
    }

    pub fn last(&self) -> &ParticleState {
        &self.states[self.states.len() - 1]
    }
}

/// Sample the exact solution at `t0 + k * dt` for `k = 0..=n_steps`.
pub fn analytic_trajectory(
    orbit: &CyclotronOrbit,
    params: &PhysicalParams,
    t0: f64,
    dt: f64,
    n_steps: usize,
) -> Result<Trajectory> {
    check_step(dt, n_steps)?;
    let states = (0..=n_steps)
        .map(|k| orbit_state(orbit, params, t0 + k as f64 * dt))
        .collect();
    Trajectory::new(states, Method::Analytic)
}

fn check_step(dt: f64, n_steps: usize) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidStep(dt));
    }
    if n_steps == 0 {
        return Err(Error::Validation("n_steps must be at least 1".into()));
    }
    Ok(())
}

/// Numerically integrate `m dv/dt = e v x B` from `initial`.
///
/// Returns `n_steps + 1` states. `Method::Analytic` is accepted and
/// delegates to the exact propagator (requires nonzero field).
pub fn integrate_lorentz(
    initial: &ParticleState,
    params: &PhysicalParams,
    dt: f64,
    n_steps: usize,
    method: Method,
) -> Result<Trajectory> {
    check_step(dt, n_steps)?;
    if !initial.is_finite() {
        return Err(Error::InvalidParams("initial state must be finite".into()));
    }
    let w = params.omega_c();
    let t0 = initial.t;
    if method == Method::Analytic {
        let orbit = orbit_from_state(initial, params)?;
        return analytic_trajectory(&orbit, params, t0, dt, n_steps);
    }
    let mut states = Vec::with_capacity(n_steps + 1);
    states.push(*initial);

    match method {
        Method::Analytic => unreachable!(),
        Method::Rk4 => {
            let mut s = [initial.x, initial.y, initial.vx, initial.vy];
            for k in 1..=n_steps {
                s = rk4_step(s, w, dt);
                states.push(ParticleState::new(s[0], s[1], s[2], s[3], t0 + k as f64 * dt));
            }
        }
        Method::Boris => {
            // Leapfrog: positions at integer steps, velocities staggered by
            // half a step and resynchronised for output.
            let (mut x, mut y) = (initial.x, initial.y);
            let (mut ux, mut uy) = boris_rotate(initial.vx, initial.vy, w, -0.5 * dt);
            for k in 1..=n_steps {
                (ux, uy) = boris_rotate(ux, uy, w, dt);
                x += dt * ux;
                y += dt * uy;
                let (vx, vy) = boris_rotate(ux, uy, w, 0.5 * dt);
                states.push(ParticleState::new(x, y, vx, vy, t0 + k as f64 * dt));
            }
        }
    }
    Trajectory::new(states, method)
}

fn lorentz_rhs(s: [f64; 4], w: f64) -> [f64; 4] {
    // dv/dt = (e/m) v x B = w * z_hat x v
    [s[2], s[3], -w * s[3], w * s[2]]
}

fn rk4_step(s: [f64; 4], w: f64, h: f64) -> [f64; 4] {
    let add = |a: [f64; 4], b: [f64; 4], f: f64| std::array::from_fn(|i| a[i] + f * b[i]);
    let k1 = lorentz_rhs(s, w);
    let k2 = lorentz_rhs(add(s, k1, 0.5 * h), w);
    let k3 = lorentz_rhs(add(s, k2, 0.5 * h), w);
    let k4 = lorentz_rhs(add(s, k3, h), w);
    std::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Boris velocity rotation over a step `h` (which may be negative).
fn boris_rotate(vx: f64, vy: f64, w: f64, h: f64) -> (f64, f64) {
    // t = (q B / m) h / 2 along z; q B / m = -w.
    let t = -w * 0.5 * h;
    let s = 2.0 * t / (1.0 + t * t);
    // v' = v + v x t, v+ = v + v' x s, with (a x c z_hat) = (a_y c, -a_x c).
    let px = vx + vy * t;
    let py = vy - vx * t;
    (vx + py * s, vy - px * s)
}
