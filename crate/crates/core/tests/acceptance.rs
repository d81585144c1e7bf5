//! Acceptance criteria 1 to 11. Run with `--nocapture` to see one line per
//! criterion.

use std::f64::consts::TAU;
use std::fs;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cyclovortex::angular::{
    canonical_lz, classify_orbit, orbit_canonical_lz, OrbitCategory, DEFAULT_CLASSIFY_TOL,
};
use cyclovortex::config::{parse_config, RunConfig};
use cyclovortex::currents::{current_profile, edge_azimuthal_speed, winding_angle};
use cyclovortex::dynamics::{
    analytic_trajectory, integrate_lorentz, orbit_state, rho_squared, rho_squared_ode_residual,
    CyclotronOrbit, Method, PhysicalParams,
};
use cyclovortex::ensemble::{
    build_vortex, energy_per_electron, parallel_axis, time_averaged_kinetic_lz, PhaseMode,
};
use cyclovortex::oracles::{classical_quantum_gap, landau_table, LandauIndex};
use cyclovortex::verify::{drift, max_position_error, rk4_period_error};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn defaults() -> PhysicalParams {
    PhysicalParams::default()
}

fn preset(name: &str) -> RunConfig {
    parse_config(&format!("scenario = {name}")).unwrap()
}

fn integrator_fidelity() -> Outcome {
    let p = defaults();
    let mut worst = 0.0f64;
    for (r, r_cen) in [(2.0, 1.0), (1.0, 1.0), (1.0, 2.0)] {
        let orbit = CyclotronOrbit::new(r_cen, 0.0, r, 0.0).unwrap();
        let e = rk4_period_error(&orbit, &p, 1024).unwrap();
        worst = worst.max(e / r);
    }
    ensure(worst < 1e-8, format!("max error / R = {worst:.3e}"))?;
    let orbit = CyclotronOrbit::new(2.0, 0.0, 1.0, 0.0).unwrap();
    let errs: Vec<f64> = [256, 512, 1024]
        .iter()
        .map(|&n| rk4_period_error(&orbit, &p, n).unwrap())
        .collect();
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    ensure(
        ratios.iter().all(|r| (12.0..=20.0).contains(r)),
        format!("max error / R = {worst:.3e}, halving ratios {:.3} {:.3}", ratios[0], ratios[1]),
    )
}

fn conservation() -> Outcome {
    let p = defaults();
    let period = p.period().unwrap();
    let dt = period / 1024.0;
    let n = 10 * 1024;
    let orbit = CyclotronOrbit::new(2.0, 0.0, 1.0, 0.3).unwrap();
    let start = orbit_state(&orbit, &p, 0.0);
    let lz = |s: &_| canonical_lz(s, &p);
    let analytic = drift(&analytic_trajectory(&orbit, &p, 0.0, dt, n).unwrap(), lz);
    let rk4 = drift(&integrate_lorentz(&start, &p, dt, n, Method::Rk4).unwrap(), lz);
    let boris_traj = integrate_lorentz(&start, &p, dt, n, Method::Boris).unwrap();
    let boris = drift(&boris_traj, |s| s.speed());
    ensure(
        analytic < 1e-12 && rk4 < 1e-8 && boris < 1e-10,
        format!("L_z drift analytic {analytic:.2e}, rk4 {rk4:.2e}; boris speed drift {boris:.2e}"),
    )
}

fn rho_squared_equation() -> Outcome {
    let p = defaults();
    let orbit = CyclotronOrbit::new(2.0, 0.0, 1.0, 0.0).unwrap();
    let h = 1e-4;
    let mut worst = 0.0f64;
    let mut worst_closed = 0.0f64;
    for k in 0..100 {
        let t = TAU * k as f64 / 100.0;
        worst = worst.max(rho_squared_ode_residual(&orbit, &p, t, h).unwrap());
        let f = |t| rho_squared(&orbit, &p, t);
        let lhs = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
        worst_closed = worst_closed.max((lhs + 4.0 * t.cos()).abs());
    }
    ensure(
        worst < 1e-6 && worst_closed < 1e-6,
        format!("residual {worst:.2e}, |LHS + 4 cos t| {worst_closed:.2e}"),
    )
}

fn classification() -> Outcome {
    let p = defaults();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let orbit = CyclotronOrbit::new(
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(0.0..5.0),
            rng.gen_range(0.0..TAU),
        )
        .unwrap();
        let t = rng.gen_range(0.0..50.0);
        let direct = canonical_lz(&orbit_state(&orbit, &p, t), &p);
        worst = worst.max((orbit_canonical_lz(&orbit, &p) - direct).abs());
    }
    let cats: Vec<OrbitCategory> = [(2.0, 1.0), (1.0, 1.0), (1.0, 2.0)]
        .iter()
        .map(|&(r, c)| classify_orbit(&CyclotronOrbit::new(c, 0.0, r, 0.0).unwrap(), DEFAULT_CLASSIFY_TOL))
        .collect();
    let want = [OrbitCategory::Positive, OrbitCategory::Zero, OrbitCategory::Negative];
    ensure(
        worst < 1e-10 && cats == want,
        format!("closed form vs direct {worst:.2e} over 1000 orbits; categories {cats:?}"),
    )
}

fn winding() -> Outcome {
    let p = defaults();
    let w = p.omega_c();
    let mut got = Vec::new();
    let mut worst = 0.0f64;
    for ((r, r_cen), want) in [(2.0, 1.0), (1.0, 1.0), (1.0, 2.0)].into_iter().zip([w, w / 2.0, 0.0]) {
        let orbit = CyclotronOrbit::new(r_cen, 0.0, r, 0.0).unwrap();
        let res = winding_angle(&orbit, &p, 4096).map_err(|e| e.to_string())?;
        worst = worst.max((res.mean_omega - want).abs());
        got.push(res.mean_omega);
    }
    ensure(worst < 1e-9, format!("mean omega {got:?}, worst deviation {worst:.2e}"))
}

fn classical_analog() -> Outcome {
    let fig3 = preset("fig3");
    let ens = fig3.cases[0].geometry.build(fig3.params).unwrap();
    let mut worst3 = 0.0f64;
    for t in fig3.time.grid() {
        worst3 = worst3.max((ens.observe(t).mean_kinetic_lz - (1.0 + 2.0 * t.cos())).abs());
    }
    let fig2 = preset("fig2");
    let mut worst2 = 0.0f64;
    for case in &fig2.cases {
        let ens = case.geometry.build(fig2.params).unwrap();
        let p = fig2.params;
        let want = p.mass() * p.omega_c() * ens.radius().powi(2);
        for t in fig2.time.grid() {
            worst2 = worst2.max((ens.observe(t).mean_kinetic_lz - want).abs());
        }
    }
    ensure(
        worst3 < 1e-12 && worst2 < 1e-12,
        format!("fig3 vs 1 + 2cos t {worst3:.2e}; fig2 vs m w R^2 {worst2:.2e}"),
    )
}

fn moment_of_inertia() -> Outcome {
    let p = defaults();
    let m = p.mass();
    let times: Vec<f64> = (0..32).map(|k| TAU * k as f64 / 32.0).collect();
    let mut worst_rho = 0.0f64;
    let mut worst_split = 0.0f64;
    for (r, r_cen) in [(2.0, 1.0), (1.0, 1.0), (1.0, 2.0)] {
        let ens = build_vortex(p, r, r_cen, 8, PhaseMode::Uniform { n_per_orbit: 16 }, 0.0).unwrap();
        for &t in &times {
            let o = ens.observe(t);
            worst_rho = worst_rho.max((o.mean_rho_sq - (r * r + r_cen * r_cen)).abs());
            let s = parallel_axis(&ens, t);
            worst_split = worst_split.max((s.own + s.transfer - m * o.mean_rho_sq).abs());
        }
    }
    let single = build_vortex(p, 1.0, 2.0, 1, PhaseMode::Aligned, 0.4).unwrap();
    let mut worst_single = 0.0f64;
    for &t in &times {
        let rho_sq = single.states(t)[0].rho_sq();
        let s = parallel_axis(&single, t);
        worst_single = worst_single.max((s.transfer - m * rho_sq).abs()).max(s.own.abs());
    }
    ensure(
        worst_rho < 1e-12 && worst_split < 1e-12 && worst_single < 1e-12,
        format!(
            "<rho^2> {worst_rho:.2e}, own + transfer {worst_split:.2e}, single electron {worst_single:.2e}"
        ),
    )
}

fn energy_relation() -> Outcome {
    let mut worst = 0.0f64;
    let mut n = 0;
    for name in ["fig1", "fig2", "fig3"] {
        let cfg = preset(name);
        for case in &cfg.cases {
            let ens = case.geometry.build(cfg.params).unwrap();
            let want = 0.5 * cfg.params.omega_c() * time_averaged_kinetic_lz(&ens, 64);
            worst = worst.max((energy_per_electron(&ens) - want).abs());
            n += 1;
        }
    }
    ensure(worst < 1e-12, format!("{n} preset ensembles, worst {worst:.2e}"))
}

fn landau() -> Outcome {
    let p = defaults();
    let table = landau_table(&p, 1, 1);
    let lookup = |n: u32, l: i32| table.iter().find(|e| e.n == n && e.l == l).map(|e| e.energy);
    let want = [((0, 0), 0.5), ((0, 1), 1.5), ((0, -1), 0.5), ((1, 0), 1.5)];
    let exact = want.iter().all(|&((n, l), e)| lookup(n, l) == Some(e));
    let mut gap = 0.0f64;
    for n in 0..3 {
        for l in 0..3 {
            let g = classical_quantum_gap(LandauIndex::new(n, l), &p).map_err(|e| e.to_string())?;
            gap = gap.max(g.abs());
        }
    }
    ensure(exact && gap < 1e-12, format!("table exact: {exact}; correspondence gap {gap:.2e}"))
}

fn profile_structure() -> Outcome {
    let p = defaults();
    let w = p.omega_c();
    let mut notes = Vec::new();
    let mut ok = true;

    let pos = build_vortex(p, 2.0, 1.0, 8, PhaseMode::Uniform { n_per_orbit: 16 }, 0.0).unwrap();
    let prof = current_profile(&pos, 20, 32).unwrap();
    let co = (0..prof.n_bins())
        .filter(|&i| prof.counts[i] > 0)
        .all(|i| prof.j_phi[i] * w > 0.0);
    ok &= co;
    notes.push(format!("positive co-rotating: {co}"));

    let zero = build_vortex(p, 1.0, 1.0, 8, PhaseMode::Uniform { n_per_orbit: 64 }, 0.0).unwrap();
    let prof = current_profile(&zero, 20, 32).unwrap();
    let ratio = prof.j_phi[0].abs() / prof.j_phi[19].abs();
    ok &= ratio < 0.15;
    notes.push(format!("zero inner/outer {ratio:.4}"));

    let neg = build_vortex(p, 1.0, 2.0, 8, PhaseMode::Uniform { n_per_orbit: 16 }, 0.0).unwrap();
    let changes = current_profile(&neg, 20, 32).unwrap().sign_changes();
    ok &= changes == 1;
    notes.push(format!("negative sign changes {changes}"));

    let mut worst = 0.0f64;
    for ens in [&pos, &zero, &neg] {
        let (inner, outer) = edge_azimuthal_speed(ens);
        let want = ens.radius() * w.abs();
        worst = worst.max((inner.abs() - want).abs()).max((outer.abs() - want).abs());
    }
    ok &= worst < 1e-12;
    notes.push(format!("edge speed error {worst:.2e}"));
    ensure(ok, notes.join("; "))
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_cyclovortex");
    let run = |args: &[&str]| {
        let dir = tempfile::tempdir().unwrap();
        let status = Command::new(bin)
            .args(args)
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap()
            .status;
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        (status.code(), files)
    };
    let mut identical = true;
    for args in [
        &["orbit", "--set", "scenario=fig1"][..],
        &["vortex", "--set", "scenario=fig3"],
        &["field", "--set", "scenario=fig2"],
        &["landau"],
    ] {
        let (a, b) = (run(args), run(args));
        identical &= a == b && a.0 == Some(0) && !a.1.is_empty();
    }
    let verify = run(&["verify"]).0;
    ensure(
        identical && verify == Some(0),
        format!("byte-identical: {identical}; verify exit {verify:?}"),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 11] = [
        ("integrator fidelity", integrator_fidelity),
        ("conservation", conservation),
        ("rho^2 equation of motion", rho_squared_equation),
        ("orbit classification", classification),
        ("winding frequencies", winding),
        ("classical analog of L_kin", classical_analog),
        ("moment of inertia", moment_of_inertia),
        ("energy per electron", energy_relation),
        ("Landau spectrum", landau),
        ("current profile structure", profile_structure),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn rk4_matches_exact_orbit_over_one_period() {
    let p = defaults();
    let orbit = CyclotronOrbit::new(1.0, 0.0, 1.0, 0.0).unwrap();
    let dt = p.period().unwrap() / 1024.0;
    let traj = integrate_lorentz(&orbit_state(&orbit, &p, 0.0), &p, dt, 1024, Method::Rk4).unwrap();
    assert!(max_position_error(&traj, &orbit, &p) < 1e-8);
}
