//! Subcommand execution and file emission for the command-line front end.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::angular::{breakdown, classify_orbit};
use crate::config::{Case, RunConfig};
use crate::currents::{current_profile, edge_azimuthal_speed};
use crate::dynamics::{
    energy_2d, integrate_lorentz, orbit_state, CyclotronOrbit, Method, ParticleState,
};
use crate::ensemble::parallel_axis;
use crate::error::{Error, Result};
use crate::oracles::{landau_table, LandauLevel, LANDAU_INTERPRETATION};
use crate::verify::{verify_all, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Orbit,
    Vortex,
    Field,
    Landau,
    Verify,
}

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct OrbitRow {
    pub case: String,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub rho_sq: f64,
    #[serde(rename = "Lz")]
    pub lz: f64,
    #[serde(rename = "Lkin")]
    pub lkin: f64,
    #[serde(rename = "Ldia")]
    pub ldia: f64,
    pub energy: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct VortexRow {
    pub t: f64,
    pub mean_rho_sq: f64,
    #[serde(rename = "Lkin_mean")]
    pub lkin_mean: f64,
    #[serde(rename = "Lz_mean")]
    pub lz_mean: f64,
    #[serde(rename = "Ldia_mean")]
    pub ldia_mean: f64,
    pub com_x: f64,
    pub com_y: f64,
    pub inertia_own: f64,
    pub inertia_transfer: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ProfileRow {
    pub bin: usize,
    pub r_lo: f64,
    pub r_hi: f64,
    pub count: usize,
    pub j_phi: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct LandauReport {
    pub interpretation: String,
    pub hbar: f64,
    pub omega_c: f64,
    pub levels: Vec<LandauLevel>,
}

/// Edge speeds written alongside each profile.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct EdgeSpeeds {
    pub case: String,
    pub inner: f64,
    pub outer: f64,
}

pub fn run(cmd: Subcommand, config: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let mut files = Vec::new();
    let mut exit_code = EXIT_OK;
    match cmd {
        Subcommand::Orbit => {
            let path = out_dir.join("orbit.csv");
            let mut rows = Vec::new();
            for case in &config.cases {
                rows.extend(orbit_rows(case, config)?);
            }
            write_csv(&path, &rows)?;
            files.push(path);
        }
        Subcommand::Vortex => {
            for case in &config.cases {
                let path = out_dir.join(case_file("vortex", case, config));
                write_csv(&path, &vortex_rows(case, config)?)?;
                files.push(path);
            }
        }
        Subcommand::Field => {
            let mut edges = Vec::new();
            for case in &config.cases {
                let ensemble = case.geometry.build(config.params)?;
                let prof = current_profile(&ensemble, config.analysis.n_bins, config.analysis.t_samples)?;
                let rows: Vec<ProfileRow> = (0..prof.n_bins())
                    .map(|i| ProfileRow {
                        bin: i,
                        r_lo: prof.bin_edges[i],
                        r_hi: prof.bin_edges[i + 1],
                        count: prof.counts[i],
                        j_phi: prof.j_phi[i],
                    })
                    .collect();
                let path = out_dir.join(case_file("profile", case, config));
                write_csv(&path, &rows)?;
                files.push(path);
                let (inner, outer) = edge_azimuthal_speed(&ensemble);
                edges.push(EdgeSpeeds {
                    case: case.label.clone(),
                    inner,
                    outer,
                });
            }
            let path = out_dir.join("edges.json");
            write_json(&path, &edges)?;
            files.push(path);
        }
        Subcommand::Landau => {
            let p = &config.params;
            let report = LandauReport {
                interpretation: LANDAU_INTERPRETATION.into(),
                hbar: p.hbar(),
                omega_c: p.omega_c(),
                levels: landau_table(p, config.analysis.landau_n_max, config.analysis.landau_l_max),
            };
            let path = out_dir.join("landau.json");
            write_json(&path, &report)?;
            files.push(path);
        }
        Subcommand::Verify => {
            let report: Report = verify_all(config);
            if !report.passed {
                exit_code = EXIT_VERIFY_FAILED;
            }
            let path = out_dir.join("verify.json");
            write_json(&path, &report)?;
            files.push(path);
        }
    }
    Ok(RunOutcome { exit_code, files })
}

fn case_file(stem: &str, case: &Case, config: &RunConfig) -> String {
    if config.cases.len() == 1 {
        format!("{stem}.csv")
    } else {
        format!("{stem}-{}.csv", case.label)
    }
}

/// Orbit for a single-orbit run: center on +x at `R_cen`, phase `global_phase`.
pub fn case_orbit(case: &Case) -> Result<CyclotronOrbit> {
    let g = &case.geometry;
    CyclotronOrbit::new(g.r_cen, 0.0, g.radius, g.global_phase)
}

fn orbit_rows(case: &Case, config: &RunConfig) -> Result<Vec<OrbitRow>> {
    let p = &config.params;
    let orbit = case_orbit(case)?;
    let time = &config.time;
    let states: Vec<ParticleState> = match time.method {
        Method::Analytic => {
            if p.omega_c() == 0.0 {
                return Err(Error::ZeroField);
            }
            time.grid().into_iter().map(|t| orbit_state(&orbit, p, t)).collect()
        }
        method => {
            let start = orbit_state(&orbit, p, 0.0);
            integrate_lorentz(&start, p, time.dt(), time.n_steps, method)?
                .states()
                .to_vec()
        }
    };
    let label = if config.scenario.is_some() {
        case.label.clone()
    } else {
        classify_orbit(&orbit, config.analysis.classify_tol).label().to_string()
    };
    Ok(states
        .iter()
        .map(|s| {
            let b = breakdown(s, p);
            OrbitRow {
                case: label.clone(),
                t: s.t,
                x: s.x,
                y: s.y,
                vx: s.vx,
                vy: s.vy,
                rho_sq: s.rho_sq(),
                lz: b.canonical,
                lkin: b.kinetic,
                ldia: b.diamagnetic,
                energy: energy_2d(s, p),
            }
        })
        .collect())
}

fn vortex_rows(case: &Case, config: &RunConfig) -> Result<Vec<VortexRow>> {
    let ensemble = case.geometry.build(config.params)?;
    Ok(config
        .time
        .grid()
        .into_iter()
        .map(|t| {
            let o = ensemble.observe(t);
            let split = parallel_axis(&ensemble, t);
            VortexRow {
                t,
                mean_rho_sq: o.mean_rho_sq,
                lkin_mean: o.mean_kinetic_lz,
                lz_mean: o.mean_canonical_lz,
                ldia_mean: o.mean_diamagnetic_lz,
                com_x: o.com_x,
                com_y: o.com_y,
                inertia_own: split.own,
                inertia_transfer: split.transfer,
            }
        })
        .collect())
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(path, e))
}
