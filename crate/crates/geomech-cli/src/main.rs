//! Command-line runner: beam simulations from a JSON configuration,
//! invariant verification suites and the n = 0 rigid-body demo.
//!
//! Exit codes: 0 success, 1 configuration error, 2 instability abort.

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use config::RunConfig;
use geomech::beam::{self, BeamError, BeamState};
use geomech::lie::{self, AlgebraElement, Vec3};
use geomech::verify::{run_suite, Suite};

#[derive(Parser)]
#[command(name = "geomech", about = "Covariant mechanics toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a beam simulation from a JSON configuration file.
    Simulate {
        /// Path to the JSON configuration.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named invariant suite and report per-check pass/fail.
    Verify {
        /// One of: lie, forms, jet, variational, beam, all.
        #[arg(long)]
        suite: String,
        /// Seed for the randomized samples.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Free rigid-body flow on SE(3): the beam system with the spatial
    /// terms switched off.
    #[command(name = "rigid-body")]
    RigidBody {
        /// Principal axis of the initial rotation (1, 2 or 3).
        #[arg(long, default_value_t = 1)]
        axis: usize,
        /// Number of integrator steps.
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Time step.
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate { config, out } => simulate(&config, &out),
        Command::Verify { suite, seed } => verify(&suite, seed),
        Command::RigidBody { axis, steps, dt } => rigid_body(axis, steps, dt),
    }
}

// ---------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------

#[derive(Serialize)]
struct ConvergenceRatios {
    /// Max conservation residual of a run at half resolution divided by
    /// the main run's; near 4 certifies second-order convergence.
    conservation: f64,
    compatibility: f64,
}

#[derive(Serialize)]
struct RunSummary {
    config: RunConfig,
    n_s: usize,
    steps: usize,
    dt: f64,
    ds: f64,
    final_time: f64,
    initial_energy: f64,
    final_energy: f64,
    energy_drift_rel: f64,
    max_conservation_residual: f64,
    max_compatibility_residual: f64,
    max_group_defect: f64,
    momentum_drift_rel: f64,
    convergence: Option<ConvergenceRatios>,
    wall_seconds: f64,
}

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

fn simulate(config_path: &Path, out_dir: &Path) -> ExitCode {
    // All configuration validation happens before any file is created.
    let text = match fs::read_to_string(config_path) {
        Ok(text) => text,
        Err(err) => {
            eprintln!("error: cannot read config {}: {err}", config_path.display());
            return ExitCode::from(1);
        }
    };
    let config: RunConfig = match serde_json::from_str(&text) {
        Ok(config) => config,
        Err(err) => {
            // serde_json reports line and column context
            eprintln!("error: invalid config {}: {err}", config_path.display());
            return ExitCode::from(1);
        }
    };
    let params = config.beam_params();
    if let Err(err) = params.validate() {
        eprintln!("error: invalid configuration: {err}");
        return ExitCode::from(1);
    }
    if let Err(err) = fs::create_dir_all(out_dir) {
        eprintln!("error: cannot create output directory {}: {err}", out_dir.display());
        return ExitCode::from(1);
    }

    let started = Instant::now();
    let eps0 = params.reference_strain;
    let state0 = beam::initial_with_strain(
        &params,
        config.initial_chi.profile(eps0),
        config.initial_eps.profile(eps0),
    );
    let (ek0, ep0) = beam::energy(&params, &state0);
    let e0 = ek0 + ep0;
    let p0 = beam::total_right_momentum(&params, &state0);
    let mut momentum_scale = p0.amax().max(1e-300);

    let mut series = String::new();
    series.push_str("t,s");
    for block in ["chi", "eps", "sigma_r", "pi_r"] {
        for k in 0..6 {
            series.push_str(&format!(",{block}_{k}"));
        }
    }
    series.push('\n');
    let mut diagnostics = String::new();
    diagnostics.push_str(
        "t,energy_kinetic,energy_potential,conservation_max,compatibility_max,group_defect",
    );
    for k in 0..6 {
        diagnostics.push_str(&format!(",momentum_{k}"));
    }
    diagnostics.push('\n');

    let record_series = |buf: &mut String, params: &beam::BeamParams, state: &BeamState| {
        let ds = params.ds();
        let (sigma_r, pi_r) = beam::spatial_momenta(params, state);
        for i in 0..params.n_s {
            buf.push_str(&fmt(state.t));
            buf.push(',');
            buf.push_str(&fmt(i as f64 * ds));
            let chi = state.chi[i].to_vector();
            let eps = state.eps[i].to_vector();
            let sr = sigma_r[i].to_vector();
            let pr = pi_r[i].to_vector();
            for v in chi.iter().chain(eps.iter()).chain(sr.iter()).chain(pr.iter()) {
                buf.push(',');
                buf.push_str(&fmt(*v));
            }
            buf.push('\n');
        }
    };

    record_series(&mut series, &params, &state0);

    let mut window: Vec<BeamState> = vec![state0];
    let mut max_conservation = 0.0_f64;
    let mut max_compatibility = 0.0_f64;
    let mut max_group_defect = 0.0_f64;
    let mut momentum_drift = 0.0_f64;
    let cap = 10.0 * e0;
    for k in 1..=config.steps {
        let next = match beam::step(&params, window.last().unwrap(), Some(cap)) {
            Ok(next) => next,
            Err(err @ BeamError::Unstable { .. }) => {
                eprintln!("error: {err}");
                return ExitCode::from(2);
            }
            Err(err) => {
                eprintln!("error: {err}");
                return ExitCode::from(1);
            }
        };
        window.push(next);
        if window.len() > 3 {
            window.remove(0);
        }
        let is_record = k % config.output_every == 0 || k == config.steps;
        if is_record {
            record_series(&mut series, &params, window.last().unwrap());
        }
        // diagnostics live on the middle of the rolling three-state window
        if config.verify_invariants && window.len() == 3 {
            let mid_index = k - 1;
            if mid_index % config.output_every == 0 {
                let report = beam::conservation_report(&params, &window, params.dt);
                let d = &report[0];
                max_conservation = max_conservation.max(d.conservation_max);
                max_compatibility = max_compatibility.max(d.compatibility_max);
                max_group_defect = max_group_defect.max(d.group_defect);
                momentum_scale = momentum_scale.max(d.momentum.amax());
                momentum_drift = momentum_drift.max((d.momentum - p0).amax());
                diagnostics.push_str(&fmt(d.t));
                for v in [
                    d.energy_kinetic,
                    d.energy_potential,
                    d.conservation_max,
                    d.compatibility_max,
                    d.group_defect,
                ] {
                    diagnostics.push(',');
                    diagnostics.push_str(&fmt(v));
                }
                for v in d.momentum.iter() {
                    diagnostics.push(',');
                    diagnostics.push_str(&fmt(*v));
                }
                diagnostics.push('\n');
            }
        }
    }

    let final_state = window.last().unwrap();
    let (ek, ep) = beam::energy(&params, final_state);
    let convergence = if config.verify_invariants && config.n_s >= 20 && config.steps >= 8 {
        coarse_residuals(&config).map(|(cons, comp)| ConvergenceRatios {
            conservation: cons / max_conservation.max(1e-300),
            compatibility: comp / max_compatibility.max(1e-300),
        })
    } else {
        None
    };
    let summary = RunSummary {
        n_s: params.n_s,
        steps: config.steps,
        dt: params.dt,
        ds: params.ds(),
        final_time: final_state.t,
        initial_energy: e0,
        final_energy: ek + ep,
        energy_drift_rel: (ek + ep - e0).abs() / e0.max(1e-300),
        max_conservation_residual: max_conservation,
        max_compatibility_residual: max_compatibility,
        max_group_defect,
        momentum_drift_rel: momentum_drift / momentum_scale,
        convergence,
        wall_seconds: started.elapsed().as_secs_f64(),
        config,
    };
    let finite = [
        summary.initial_energy,
        summary.final_energy,
        summary.energy_drift_rel,
        summary.max_conservation_residual,
        summary.max_compatibility_residual,
        summary.momentum_drift_rel,
    ]
    .iter()
    .all(|v| v.is_finite());
    if !finite {
        eprintln!("error: non-finite residuals in summary; run diverged");
        return ExitCode::from(2);
    }

    if let Err(err) = write_outputs(out_dir, &series, &diagnostics, &summary) {
        eprintln!("error: cannot write outputs: {err}");
        return ExitCode::from(1);
    }
    println!(
        "simulated {} steps to t = {:.6}; outputs in {}",
        config_echo_steps(&summary),
        summary.final_time,
        out_dir.display()
    );
    ExitCode::SUCCESS
}

fn config_echo_steps(summary: &RunSummary) -> usize {
    summary.steps
}

/// Shadow run at half the resolution (twice the spacing in both `s` and
/// `t`), reporting its worst conservation and compatibility residuals.
fn coarse_residuals(config: &RunConfig) -> Option<(f64, f64)> {
    let mut coarse = config.clone();
    coarse.n_s = config.n_s / 2;
    coarse.dt = config.dt * 2.0;
    coarse.steps = config.steps / 2;
    coarse.output_every = (config.output_every / 2).max(1);
    let params = coarse.beam_params();
    params.validate().ok()?;
    let eps0 = params.reference_strain;
    let state0 = beam::initial_with_strain(
        &params,
        coarse.initial_chi.profile(eps0),
        coarse.initial_eps.profile(eps0),
    );
    let (ek0, ep0) = beam::energy(&params, &state0);
    let cap = 10.0 * (ek0 + ep0);
    let mut window: Vec<BeamState> = vec![state0];
    let mut max_cons = 0.0_f64;
    let mut max_comp = 0.0_f64;
    for k in 1..=coarse.steps {
        let next = beam::step(&params, window.last().unwrap(), Some(cap)).ok()?;
        window.push(next);
        if window.len() > 3 {
            window.remove(0);
        }
        if window.len() == 3 && (k - 1) % coarse.output_every == 0 {
            let report = beam::conservation_report(&params, &window, params.dt);
            max_cons = max_cons.max(report[0].conservation_max);
            max_comp = max_comp.max(report[0].compatibility_max);
        }
    }
    Some((max_cons, max_comp))
}

fn write_outputs(
    out_dir: &Path,
    series: &str,
    diagnostics: &str,
    summary: &RunSummary,
) -> std::io::Result<()> {
    fs::write(out_dir.join("series.csv"), series)?;
    fs::write(out_dir.join("diagnostics.csv"), diagnostics)?;
    let json = serde_json::to_string_pretty(summary).expect("summary serializes");
    let mut file = fs::File::create(out_dir.join("summary.json"))?;
    file.write_all(json.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}

// ---------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------

fn verify(suite_name: &str, seed: u64) -> ExitCode {
    let Some(suite) = Suite::parse(suite_name) else {
        eprintln!(
            "error: unknown suite '{suite_name}' (expected lie, forms, jet, variational, beam or all)"
        );
        return ExitCode::from(1);
    };
    let checks = run_suite(suite, seed);
    let mut all_passed = true;
    for check in &checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status} {} — {}", check.name, check.detail);
        all_passed &= check.passed;
    }
    println!(
        "{} checks, {} failed",
        checks.len(),
        checks.iter().filter(|c| !c.passed).count()
    );
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

// ---------------------------------------------------------------------
// rigid-body demo
// ---------------------------------------------------------------------

#[derive(Serialize)]
struct RigidBodyReport {
    axis: usize,
    steps: usize,
    dt: f64,
    principal_velocity_drift: f64,
    energy_drift_rel: f64,
    casimir_drift_rel: f64,
    spatial_momentum_drift: f64,
}

fn rigid_body(axis: usize, steps: usize, dt: f64) -> ExitCode {
    if !(1..=3).contains(&axis) {
        eprintln!("error: axis must be 1, 2 or 3");
        return ExitCode::from(1);
    }
    let inertia = nalgebra::Matrix6::from_diagonal(&nalgebra::Vector6::new(
        3.0, 2.0, 1.0, 1.0, 1.0, 1.0,
    ));
    // principal-axis rotation: chi stays fixed
    let mut chi0_axis = Vec3::zeros();
    chi0_axis[axis - 1] = 0.9;
    let chi0 = AlgebraElement::new(chi0_axis, Vec3::zeros());
    let mut run = beam::RigidBodyRun { t: 0.0, h: lie::GroupElement::identity(), chi: chi0 };
    for _ in 0..steps {
        run = beam::rigid_body_step(&inertia, &run, dt);
    }
    let principal_drift = run.chi.sub(&chi0).norm();

    // generic tumbling run: energy, Casimir and spatial momentum
    let chi1 = AlgebraElement::new(Vec3::new(0.9, 0.5, -0.4), Vec3::new(0.1, 0.0, 0.2));
    let energy = |chi: &AlgebraElement| {
        let v = chi.to_vector();
        0.5 * (inertia * v).dot(&v)
    };
    let momentum = |run: &beam::RigidBodyRun| {
        lie::coadjoint_inv(
            &run.h,
            &lie::AlgebraCovector::from_slice((inertia * run.chi.to_vector()).as_slice()),
        )
        .to_vector()
    };
    let mut run = beam::RigidBodyRun { t: 0.0, h: lie::GroupElement::identity(), chi: chi1 };
    let e0 = energy(&run.chi);
    let casimir0 = lie::AlgebraCovector::from_slice((inertia * chi1.to_vector()).as_slice())
        .m
        .norm();
    let pi_r0 = momentum(&run);
    let mut energy_drift = 0.0_f64;
    let mut casimir_drift = 0.0_f64;
    let mut momentum_drift = 0.0_f64;
    for _ in 0..steps {
        run = beam::rigid_body_step(&inertia, &run, dt);
        energy_drift = energy_drift.max((energy(&run.chi) - e0).abs());
        let pi = lie::AlgebraCovector::from_slice((inertia * run.chi.to_vector()).as_slice());
        casimir_drift = casimir_drift.max((pi.m.norm() - casimir0).abs());
        momentum_drift = momentum_drift.max((momentum(&run) - pi_r0).amax());
    }
    let report = RigidBodyReport {
        axis,
        steps,
        dt,
        principal_velocity_drift: principal_drift,
        energy_drift_rel: energy_drift / e0,
        casimir_drift_rel: casimir_drift / casimir0,
        spatial_momentum_drift: momentum_drift,
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    ExitCode::SUCCESS
}
