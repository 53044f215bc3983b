//! Scenario execution: dispatch to the library, write CSV/JSON artifacts
//! plus a manifest with the resolved configuration.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use num_complex::Complex64 as C64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use iontrap::dynamics::{CouplingParams, PulseMode};
use iontrap::fockspace::{FockSpace, HybridState, InternalLevel};
use iontrap::protocols::{self, RegisterState};
use iontrap::signals;
use iontrap::spectroscopy;
use iontrap::tomography;
use iontrap::trapphysics;

use crate::config::{
    CatConfig, CngateConfig, CoolConfig, DensmatConfig, FlopConfig, RamseyCliConfig,
    RegisterConfig, RegisterOperation, Scenario, TrapConfig, WignerConfig,
};

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    version: &'static str,
    kind: &'static str,
    seed: u64,
    config_sha256: String,
    wall_time_s: f64,
    artifacts: &'a [String],
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| {
        format!("creating {}", path.display())
    })?))
}

/// Run a resolved scenario, writing artifacts into `out_dir`. Returns the
/// artifact list.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    let started = Instant::now();

    let mut artifacts = match scenario {
        Scenario::Trap(c) => run_trap(c, out_dir)?,
        Scenario::Cool(c) => run_cool(c, out_dir)?,
        Scenario::Flop(c) => run_flop(c, out_dir)?,
        Scenario::Cat(c) => run_cat(c, out_dir)?,
        Scenario::Wigner(c) => run_wigner(c, out_dir)?,
        Scenario::Densmat(c) => run_densmat(c, out_dir)?,
        Scenario::Cngate(c) => run_cngate(c, out_dir)?,
        Scenario::Register(c) => run_register(c, out_dir)?,
        Scenario::Ramsey(c) => run_ramsey(c, out_dir)?,
    };

    write_json(out_dir, "resolved_config.json", scenario)?;
    artifacts.push("resolved_config.json".to_string());

    let config_json = serde_json::to_vec(scenario)?;
    let config_sha256 = hex_digest(&config_json);
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        kind: scenario.kind().as_str(),
        seed: scenario.seed(),
        config_sha256,
        wall_time_s: started.elapsed().as_secs_f64(),
        artifacts: &artifacts,
    };
    write_json(out_dir, "manifest.json", &manifest)?;
    Ok(artifacts)
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

fn trap_params(c: &TrapConfig) -> Result<trapphysics::TrapParams> {
    Ok(trapphysics::TrapParams::with_q_x(
        c.q_x,
        2.0 * std::f64::consts::PI * c.drive_freq_hz,
        c.r_electrode_m,
        c.mass_kg,
        c.charge_c,
    )?)
}

#[derive(Debug, Serialize)]
struct TrapSummary {
    q_x: f64,
    secular_frequency_hz: f64,
    spectral_frequency_hz: f64,
    spectral_relative_error: f64,
    eq2_max_relative_deviation: f64,
    micromotion_ratio: f64,
    micromotion_ratio_expected: f64,
}

fn run_trap(c: &TrapConfig, dir: &Path) -> Result<Vec<String>> {
    let params = trap_params(c)?;
    let omega = trapphysics::secular_frequency(&params);
    let dt = 2.0 * std::f64::consts::PI
        / (c.steps_per_drive_period as f64 * params.omega_drive);
    let duration = c.secular_periods * 2.0 * std::f64::consts::PI / omega;
    let traj = trapphysics::integrate_trajectory(
        &params,
        c.x0_m,
        c.y0_m,
        (c.vx0_m_per_s, c.vy0_m_per_s),
        duration,
        dt,
    )?;

    let mut csv = create(dir, "trajectory.csv")?;
    traj.write_csv(&mut csv)?;

    let spectral = trapphysics::spectral_secular_frequency(&traj, &params)?;
    let summary = TrapSummary {
        q_x: trapphysics::q_parameter(&params),
        secular_frequency_hz: omega / (2.0 * std::f64::consts::PI),
        spectral_frequency_hz: spectral / (2.0 * std::f64::consts::PI),
        spectral_relative_error: (spectral - omega).abs() / omega,
        eq2_max_relative_deviation: trapphysics::compare_to_secular_approx(&traj, &params)?,
        micromotion_ratio: trapphysics::fit_micromotion_ratio(&traj, &params)?,
        micromotion_ratio_expected: trapphysics::q_parameter(&params) / 2.0,
    };
    write_json(dir, "trap_summary.json", &summary)?;
    Ok(vec!["trajectory.csv".into(), "trap_summary.json".into()])
}

#[derive(Debug, Serialize)]
struct CoolSummary {
    p0_final: f64,
    n_bar_final: f64,
}

fn run_cool(c: &CoolConfig, dir: &Path) -> Result<Vec<String>> {
    let space = FockSpace::new(c.n_max)?;
    let coupling = CouplingParams::new(c.g, c.eta, 1.0, 0.0)?;
    let rho0 = protocols::thermal_state(c.n_bar, space)?;
    let mode: PulseMode = c.mode.into();

    let mut csv = create(dir, "cooling.csv")?;
    writeln!(csv, "cycle,p0,n_bar")?;
    writeln!(
        csv,
        "0,{:.11e},{:.11e}",
        rho0.populations()[0],
        rho0.mean_n()
    )?;
    let mut last = (rho0.populations()[0], rho0.mean_n());
    for cycle in 1..=c.cycles {
        let rho = protocols::sideband_cool(&rho0, &coupling, cycle, mode)?;
        last = (rho.populations()[0], rho.mean_n());
        writeln!(csv, "{cycle},{:.11e},{:.11e}", last.0, last.1)?;
    }
    write_json(
        dir,
        "cooling_summary.json",
        &CoolSummary {
            p0_final: last.0,
            n_bar_final: last.1,
        },
    )?;
    Ok(vec!["cooling.csv".into(), "cooling_summary.json".into()])
}

#[derive(Debug, Serialize)]
struct PopulationsReport {
    p_n: Vec<f64>,
    stderr: Vec<f64>,
    raw: Vec<f64>,
    residual_norm: f64,
    condition: f64,
    poisson_n_bar: f64,
    poisson_stderr: f64,
    true_mean: f64,
}

fn run_flop(c: &FlopConfig, dir: &Path) -> Result<Vec<String>> {
    let space = FockSpace::new(c.n_max)?;
    let coupling = CouplingParams::new(c.g, c.eta, 1.0, 0.0)?;
    let mode: PulseMode = c.mode.into();
    // trim the population vector to the blue-sideband ladder (n+1 must stay
    // in the space) and drop the negligible tail
    let mut p_n = c.state.populations(space)?;
    p_n.truncate(c.n_max.saturating_sub(1));
    while p_n.len() > 1 && *p_n.last().unwrap() < 1e-12 {
        p_n.pop();
    }
    let total: f64 = p_n.iter().sum();
    if total <= 0.0 {
        anyhow::bail!("state has no population below n_max - 1");
    }
    p_n.iter_mut().for_each(|p| *p /= total);
    let true_mean: f64 = p_n.iter().enumerate().map(|(n, p)| n as f64 * p).sum();

    let tau_max = if c.tau_max > 0.0 {
        c.tau_max
    } else {
        1.25 * signals::nonlinear_rephasing_time(&coupling)
    };
    let grid: Vec<f64> = (0..c.tau_points)
        .map(|i| tau_max * i as f64 / (c.tau_points - 1) as f64)
        .collect();

    let clean = signals::synthesize_signal(
        &p_n,
        &coupling,
        c.gamma0,
        c.decay_exponent,
        &grid,
        mode,
        space,
    )?;
    let signal = if c.shots > 0 {
        signals::sample_signal(&clean, c.shots, c.seed)?
    } else {
        clean
    };

    let mut csv = create(dir, "signal.csv")?;
    signal.write_csv(&mut csv)?;
    write_json(dir, "signal_meta.json", signal.metadata())?;

    let est = signals::invert_populations(
        &signal,
        c.n_max_fit,
        &coupling,
        c.gamma0,
        c.decay_exponent,
        mode,
        space,
    )?;
    let (n_bar, n_bar_err) = signals::fit_poissonian(&est.p_n, None)?;
    write_json(
        dir,
        "populations.json",
        &PopulationsReport {
            p_n: est.p_n,
            stderr: est.stderr,
            raw: est.raw,
            residual_norm: est.residual_norm,
            condition: est.condition,
            poisson_n_bar: n_bar,
            poisson_stderr: n_bar_err,
            true_mean,
        },
    )?;
    Ok(vec![
        "signal.csv".into(),
        "signal_meta.json".into(),
        "populations.json".into(),
    ])
}

#[derive(Debug, Serialize)]
struct CatSummary {
    visibility: f64,
    expected_overlap: f64,
    fidelity_to_ideal: f64,
}

fn run_cat(c: &CatConfig, dir: &Path) -> Result<Vec<String>> {
    let space = FockSpace::new(c.n_max)?;
    let coupling = CouplingParams::new(c.g, c.eta, 1.0, 0.0)?;
    let mode: PulseMode = c.mode.into();
    let a1 = C64::new(c.alpha1_re, c.alpha1_im);
    let a2 = C64::new(c.alpha2_re, c.alpha2_im);
    let cat = protocols::prepare_cat(a1, a2, c.phi, &coupling, mode, space)?;
    let ideal = protocols::ideal_cat(a1, a2, c.phi, space)?;

    let mut csv = create(dir, "interference.csv")?;
    writeln!(csv, "probe_phase,p_down")?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..c.probe_points {
        let phase = 2.0 * std::f64::consts::PI * i as f64 / c.probe_points as f64;
        let p = protocols::cat_interference(&cat, phase, &coupling, mode)?;
        lo = lo.min(p);
        hi = hi.max(p);
        writeln!(csv, "{phase:.11e},{p:.11e}")?;
    }
    write_json(
        dir,
        "cat_summary.json",
        &CatSummary {
            visibility: (hi - lo) / (hi + lo),
            expected_overlap: (-(a1 - a2).norm_sqr() / 2.0).exp(),
            fidelity_to_ideal: cat.overlap(&ideal)?,
        },
    )?;
    Ok(vec!["interference.csv".into(), "cat_summary.json".into()])
}

fn run_wigner(c: &WignerConfig, dir: &Path) -> Result<Vec<String>> {
    let space = FockSpace::new(c.n_max)?;
    let rho = c.state.density_matrix(space)?;
    let grid = tomography::PhaseSpaceGrid::new(c.radii.clone(), c.phases_per_radius)?;

    let mut csv = create(dir, "wigner.csv")?;
    writeln!(csv, "re_alpha,im_alpha,w")?;
    if c.include_origin {
        let q = tomography::displaced_populations(&rho, C64::ZERO)?;
        let w = tomography::wigner(&q);
        writeln!(csv, "{:.11e},{:.11e},{:.11e}", 0.0, 0.0, w)?;
    }
    for (alpha, w) in tomography::wigner_map(&rho, &grid)? {
        writeln!(csv, "{:.11e},{:.11e},{:.11e}", alpha.re, alpha.im, w)?;
    }
    Ok(vec!["wigner.csv".into()])
}

#[derive(Debug, Serialize)]
struct DensityMatrixReport {
    n_fit: usize,
    /// Row-major [re, im] pairs.
    elements: Vec<[f64; 2]>,
    residual: f64,
    condition_number: f64,
    eigenvalues: Vec<f64>,
    shots: usize,
}

fn run_densmat(c: &DensmatConfig, dir: &Path) -> Result<Vec<String>> {
    use rand::SeedableRng;
    let space = FockSpace::new(c.n_max)?;
    let rho = c.state.density_matrix(space)?;
    let grid = tomography::PhaseSpaceGrid::new(c.radii.clone(), c.phases_per_radius)?;
    let mut data = tomography::synthesize_tomography_data(&rho, &grid)?;
    if c.shots > 0 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(c.seed);
        data = data
            .iter()
            .map(|q| tomography::sample_displaced_populations(q, c.shots, &mut rng))
            .collect::<iontrap::Result<Vec<_>>>()?;
    }
    let rec = tomography::reconstruct_density_matrix(&data, c.n_fit, space)?;

    let dim = rec.dim();
    let mut elements = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let v = rec.matrix()[(i, j)];
            elements.push([v.re, v.im]);
        }
    }
    write_json(
        dir,
        "density_matrix.json",
        &DensityMatrixReport {
            n_fit: c.n_fit,
            elements,
            residual: rec.residual_norm,
            condition_number: rec.condition,
            eigenvalues: rec.eigenvalues.clone(),
            shots: c.shots,
        },
    )?;
    Ok(vec!["density_matrix.json".into()])
}

#[derive(Debug, Serialize)]
struct TruthTableRow {
    input: String,
    output: String,
    fidelity: f64,
}

#[derive(Debug, Serialize)]
struct CngateReport {
    truth_table: Vec<TruthTableRow>,
    superposition_phase_overlap: f64,
}

fn run_cngate(c: &CngateConfig, dir: &Path) -> Result<Vec<String>> {
    let space = FockSpace::new(c.n_max)?;
    let coupling = CouplingParams::new(c.g, c.eta, 1.0, 0.0)?;
    let mode: PulseMode = c.mode.into();

    use InternalLevel::{Down, Up};
    let cases = [
        ((Down, 0), (Down, 0), "|0>|down>", "|0>|down>"),
        ((Up, 0), (Up, 0), "|0>|up>", "|0>|up>"),
        ((Down, 1), (Up, 1), "|1>|down>", "|1>|up>"),
        ((Up, 1), (Down, 1), "|1>|up>", "|1>|down>"),
    ];
    let mut truth_table = Vec::new();
    for ((l_in, n_in), (l_out, n_out), name_in, name_out) in cases {
        let input = HybridState::basis(l_in, n_in, space)?;
        let out = protocols::cn_gate(&input, &coupling, mode)?;
        let target = HybridState::basis(l_out, n_out, space)?;
        truth_table.push(TruthTableRow {
            input: name_in.to_string(),
            output: name_out.to_string(),
            fidelity: out.overlap(&target)?,
        });
    }

    // superposition input pins the overall phase factor
    let mut amps = nalgebra::DMatrix::zeros(space.dim(), 3);
    amps[(0, 0)] = C64::new(0.5, 0.0);
    amps[(0, 1)] = C64::new(0.5, 0.0);
    amps[(1, 0)] = C64::new(0.5, 0.0);
    amps[(1, 1)] = C64::new(0.5, 0.0);
    let input = HybridState::from_amplitudes(amps)?;
    let out = protocols::cn_gate(&input, &coupling, mode)?;
    let expected = [
        (Down, 0, 0.5),
        (Up, 0, 0.5),
        (Down, 1, 0.5),
        (Up, 1, 0.5),
    ];
    let mut ip = C64::ZERO;
    for (level, n, amp) in expected {
        // CN swaps the n = 1 internal amplitudes; with equal inputs the
        // target equals the input
        ip += C64::new(amp, 0.0).conj() * out.amplitude(level, n);
    }
    let report = CngateReport {
        truth_table,
        superposition_phase_overlap: ip.re,
    };
    write_json(dir, "cngate.json", &report)?;
    Ok(vec!["cngate.json".into()])
}

#[derive(Debug, Serialize)]
struct RegisterCnReport {
    mappings: Vec<TruthTableRow>,
    max_com_excitation: f64,
}

#[derive(Debug, Serialize)]
struct GhzReport {
    n_ions: usize,
    fidelity_to_ideal: f64,
    sigma_z_marginals: Vec<f64>,
    com_excitation: f64,
}

fn run_register(c: &RegisterConfig, dir: &Path) -> Result<Vec<String>> {
    let space = FockSpace::new(c.n_max)?;
    let coupling = CouplingParams::new(c.g, c.eta, 1.0, 0.0)?;
    let mode: PulseMode = c.mode.into();

    match c.operation {
        RegisterOperation::Cn => {
            use InternalLevel::{Down, Up};
            let configs = [
                ([Down, Down], [Down, Down], "dd", "dd"),
                ([Down, Up], [Down, Up], "du", "du"),
                ([Up, Down], [Up, Up], "ud", "uu"),
                ([Up, Up], [Up, Down], "uu", "ud"),
            ];
            let mut mappings = Vec::new();
            let mut max_com: f64 = 0.0;
            for (input, expected, name_in, name_out) in configs {
                let mut levels_in = vec![Down; c.n_ions];
                let mut levels_out = vec![Down; c.n_ions];
                levels_in[c.control_ion] = input[0];
                levels_in[c.target_ion] = input[1];
                levels_out[c.control_ion] = expected[0];
                levels_out[c.target_ion] = expected[1];
                let st = RegisterState::basis(&levels_in, 0, space)?;
                let out = protocols::cn_between_ions(
                    &st,
                    c.control_ion,
                    c.target_ion,
                    &coupling,
                    mode,
                )?;
                let target = RegisterState::basis(&levels_out, 0, space)?;
                mappings.push(TruthTableRow {
                    input: name_in.to_string(),
                    output: name_out.to_string(),
                    fidelity: out.overlap(&target)?,
                });
                max_com = max_com.max(out.com_excitation());
            }
            write_json(
                dir,
                "register.json",
                &RegisterCnReport {
                    mappings,
                    max_com_excitation: max_com,
                },
            )?;
        }
        RegisterOperation::Ghz => {
            let st = protocols::prepare_ghz(c.n_ions, c.ghz_phi, &coupling, mode, space)?;
            let ideal = protocols::ideal_ghz(c.n_ions, c.ghz_phi, space)?;
            let marginals = (0..c.n_ions).map(|i| st.sigma_z_expectation(i)).collect();
            write_json(
                dir,
                "register.json",
                &GhzReport {
                    n_ions: c.n_ions,
                    fidelity_to_ideal: st.overlap(&ideal)?,
                    sigma_z_marginals: marginals,
                    com_excitation: st.com_excitation(),
                },
            )?;
        }
    }
    Ok(vec!["register.json".into()])
}

fn run_ramsey(c: &RamseyCliConfig, dir: &Path) -> Result<Vec<String>> {
    let detuning = c
        .detuning
        .unwrap_or_else(|| spectroscopy::optimal_detuning(c.mode, c.n_ions, c.t_ramsey));
    let cfg = spectroscopy::RamseyConfig::new(
        c.n_ions,
        detuning,
        0.0,
        c.t_ramsey,
        c.mode,
        c.shots,
        c.seed,
    )?;
    let estimate = spectroscopy::monte_carlo_clock(&cfg)?;
    write_json(dir, "ramsey.json", &estimate)?;
    Ok(vec!["ramsey.json".into()])
}
