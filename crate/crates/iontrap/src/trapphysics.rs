//! Classical dynamics of the linear rf trap: stability parameter, secular
//! frequency, pseudopotential, and numerical integration of the full
//! time-dependent motion for checking the secular approximation.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::error::{positive_finite, Error, Result};
use crate::linalg;

/// Physical constants used by callers building [`TrapParams`].
pub mod constants {
    /// Elementary charge in coulombs.
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    /// Atomic mass unit in kilograms.
    pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_068_92e-27;
    /// Mass of a ⁹Be⁺ ion in kilograms.
    pub const BERYLLIUM_9_MASS: f64 = 9.012_183_1 * ATOMIC_MASS_UNIT;
}

/// rf-trap drive and geometry parameters.
///
/// Validity of the pseudopotential picture requires |q_x| well below 1:
/// construction rejects |q_x| > 0.4 and warns above 0.2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapParams {
    /// rf amplitude V_o in volts.
    pub v_rf: f64,
    /// rf drive angular frequency in rad/s.
    pub omega_drive: f64,
    /// Distance from trap axis to electrode surface in meters.
    pub r_electrode: f64,
    /// Ion mass in kilograms.
    pub mass: f64,
    /// Ion charge in coulombs.
    pub charge: f64,
}

impl TrapParams {
    pub fn new(
        v_rf: f64,
        omega_drive: f64,
        r_electrode: f64,
        mass: f64,
        charge: f64,
    ) -> Result<Self> {
        let fields = [
            ("v_rf", v_rf),
            ("omega_drive", omega_drive),
            ("r_electrode", r_electrode),
            ("mass", mass),
            ("charge", charge),
        ];
        for (name, value) in fields {
            if !positive_finite(value) {
                return Err(Error::InvalidParameter {
                    name,
                    message: format!("must be strictly positive, got {value}"),
                });
            }
        }
        let params = TrapParams {
            v_rf,
            omega_drive,
            r_electrode,
            mass,
            charge,
        };
        let q_x = q_parameter(&params);
        if q_x.abs() > 0.4 {
            return Err(Error::invalid(
                "v_rf",
                format!("|q_x| = {q_x:.3} > 0.4: outside the pseudopotential regime"),
            ));
        }
        if q_x.abs() > 0.2 {
            log::warn!("|q_x| = {q_x:.3} > 0.2: pseudopotential approximation degrading");
        }
        Ok(params)
    }

    /// Parameters hitting a target stability parameter q_x at the given
    /// drive frequency, solving for the rf amplitude.
    pub fn with_q_x(
        q_x: f64,
        omega_drive: f64,
        r_electrode: f64,
        mass: f64,
        charge: f64,
    ) -> Result<Self> {
        let v_rf = q_x * mass * r_electrode * r_electrode * omega_drive * omega_drive
            / (2.0 * charge);
        Self::new(v_rf, omega_drive, r_electrode, mass, charge)
    }
}

/// Stability parameter q_x = 2 q V_o / (m R² Ω_T²); q_y = -q_x.
pub fn q_parameter(p: &TrapParams) -> f64 {
    2.0 * p.charge * p.v_rf / (p.mass * p.r_electrode * p.r_electrode * p.omega_drive * p.omega_drive)
}

/// Radial secular frequency ω = q V_o / (√2 m R² Ω_T) in rad/s.
pub fn secular_frequency(p: &TrapParams) -> f64 {
    p.charge * p.v_rf
        / (2.0f64.sqrt() * p.mass * p.r_electrode * p.r_electrode * p.omega_drive)
}

/// Pseudopotential energy q Φ_p = ½ m ω² (x² + y²) in joules.
pub fn pseudopotential(x: f64, y: f64, p: &TrapParams) -> f64 {
    let omega = secular_frequency(p);
    0.5 * p.mass * omega * omega * (x * x + y * y)
}

/// One integration sample of the classical motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

/// Time-ordered samples of the integrated radial motion.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn new(samples: Vec<TrajectorySample>) -> Result<Self> {
        for pair in samples.windows(2) {
            if pair[1].t <= pair[0].t || pair[1].t.is_nan() || pair[0].t.is_nan() {
                return Err(Error::invalid("samples", "time must be strictly increasing"));
            }
        }
        for s in &samples {
            if ![s.t, s.x, s.y, s.vx, s.vy].iter().all(|v| v.is_finite()) {
                return Err(Error::invalid("samples", "non-finite sample"));
            }
        }
        Ok(Trajectory { samples })
    }

    pub fn samples(&self) -> &[TrajectorySample] {
        &self.samples
    }

    pub fn duration(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    /// CSV export: header `t,x,y,vx,vy`, SI units, 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x,y,vx,vy")?;
        for s in &self.samples {
            writeln!(
                w,
                "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
                s.t, s.x, s.y, s.vx, s.vy
            )?;
        }
        Ok(())
    }
}

/// Integrate the motion in the full oscillating potential with fixed-step
/// classical RK4.
///
/// The force is the gradient of V(x, y, t) = (V_o/2) cos(Ω_T t)
/// (1 + (x² - y²)/R²). The step must resolve the micromotion:
/// dt ≤ 2π/(50 Ω_T). Escaping the electrode radius aborts with an
/// ion-lost error.
pub fn integrate_trajectory(
    p: &TrapParams,
    x0: f64,
    y0: f64,
    v0: (f64, f64),
    duration: f64,
    dt: f64,
) -> Result<Trajectory> {
    let dt_max = 2.0 * PI / (50.0 * p.omega_drive);
    if !positive_finite(dt) || dt > dt_max {
        return Err(Error::invalid(
            "dt",
            format!("need 0 < dt <= 2π/(50 Ω_T) = {dt_max:.3e} s, got {dt:.3e}"),
        ));
    }
    if !positive_finite(duration) {
        return Err(Error::invalid("duration", "must be positive"));
    }

    // acceleration from the full time-dependent potential
    let k = p.charge * p.v_rf / (p.mass * p.r_electrode * p.r_electrode);
    let accel = |t: f64, x: f64, y: f64| -> (f64, f64) {
        let c = (p.omega_drive * t).cos();
        (-k * c * x, k * c * y)
    };

    let steps = (duration / dt).round() as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    let (mut x, mut y, mut vx, mut vy) = (x0, y0, v0.0, v0.1);
    samples.push(TrajectorySample {
        t: 0.0,
        x,
        y,
        vx,
        vy,
    });
    for step in 0..steps {
        let t = step as f64 * dt;

        let (ax1, ay1) = accel(t, x, y);
        let (kx1, ky1) = (vx, vy);

        let (ax2, ay2) = accel(t + dt / 2.0, x + kx1 * dt / 2.0, y + ky1 * dt / 2.0);
        let (kx2, ky2) = (vx + ax1 * dt / 2.0, vy + ay1 * dt / 2.0);

        let (ax3, ay3) = accel(t + dt / 2.0, x + kx2 * dt / 2.0, y + ky2 * dt / 2.0);
        let (kx3, ky3) = (vx + ax2 * dt / 2.0, vy + ay2 * dt / 2.0);

        let (ax4, ay4) = accel(t + dt, x + kx3 * dt, y + ky3 * dt);
        let (kx4, ky4) = (vx + ax3 * dt, vy + ay3 * dt);

        x += dt / 6.0 * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4);
        y += dt / 6.0 * (ky1 + 2.0 * ky2 + 2.0 * ky3 + ky4);
        vx += dt / 6.0 * (ax1 + 2.0 * ax2 + 2.0 * ax3 + ax4);
        vy += dt / 6.0 * (ay1 + 2.0 * ay2 + 2.0 * ay3 + ay4);

        let t_next = (step + 1) as f64 * dt;
        if x.abs() > p.r_electrode || y.abs() > p.r_electrode {
            return Err(Error::IonLost {
                t: t_next,
                r_max: p.r_electrode,
            });
        }
        samples.push(TrajectorySample {
            t: t_next,
            x,
            y,
            vx,
            vy,
        });
    }
    Trajectory::new(samples)
}

/// Least-squares fit of the secular model
/// x(t) = (1 + r cos Ω_T t)(A cos ω t + B sin ω t) at fixed envelope
/// ratio r, returning (A, B, residual norm).
fn fit_secular_amplitudes(
    traj: &Trajectory,
    omega_secular: f64,
    omega_drive: f64,
    ratio: f64,
) -> Result<(f64, f64, f64)> {
    let m = traj.samples().len();
    let mut design = DMatrix::zeros(m, 2);
    let mut target = DVector::zeros(m);
    for (i, s) in traj.samples().iter().enumerate() {
        let env = 1.0 + ratio * (omega_drive * s.t).cos();
        design[(i, 0)] = env * (omega_secular * s.t).cos();
        design[(i, 1)] = env * (omega_secular * s.t).sin();
        target[i] = s.x;
    }
    let ls = linalg::solve_least_squares(&design, &target, 1e12)?;
    Ok((ls.solution[0], ls.solution[1], ls.residual_norm))
}

/// Maximum relative deviation between the integrated x motion and the
/// secular-approximation form with amplitude and phase fitted and the
/// micromotion envelope fixed at q_x/2.
///
/// Requires at least three secular periods of data.
pub fn compare_to_secular_approx(traj: &Trajectory, p: &TrapParams) -> Result<f64> {
    let omega = secular_frequency(p);
    let min_duration = 3.0 * 2.0 * PI / omega;
    if traj.duration() < min_duration {
        return Err(Error::FitFailure(format!(
            "trajectory spans {:.3e} s, need >= 3 secular periods = {min_duration:.3e} s",
            traj.duration()
        )));
    }
    let q_x = q_parameter(p);
    let (a, b, _) = fit_secular_amplitudes(traj, omega, p.omega_drive, q_x / 2.0)?;
    let amplitude = (a * a + b * b).sqrt();
    if amplitude < 1e-300 {
        return Ok(0.0);
    }
    let max_dev = traj
        .samples()
        .iter()
        .map(|s| {
            let env = 1.0 + q_x / 2.0 * (p.omega_drive * s.t).cos();
            let model = env * (a * (omega * s.t).cos() + b * (omega * s.t).sin());
            (s.x - model).abs()
        })
        .fold(0.0, f64::max);
    Ok(max_dev / amplitude)
}

/// Fit the micromotion envelope ratio r in
/// x(t) = (1 + r cos Ω_T t)(A cos ω t + B sin ω t) by golden-section search
/// on the least-squares residual. The secular prediction is r = q_x/2.
pub fn fit_micromotion_ratio(traj: &Trajectory, p: &TrapParams) -> Result<f64> {
    let omega = secular_frequency(p);
    let min_duration = 3.0 * 2.0 * PI / omega;
    if traj.duration() < min_duration {
        return Err(Error::FitFailure(format!(
            "trajectory spans {:.3e} s, need >= 3 secular periods = {min_duration:.3e} s",
            traj.duration()
        )));
    }
    let residual = |r: f64| -> Result<f64> {
        fit_secular_amplitudes(traj, omega, p.omega_drive, r).map(|(_, _, res)| res)
    };
    golden_section_min(residual, 0.0, 0.5, 1e-6)
}

/// Secular frequency extracted from the x record by locating the dominant
/// peak of the projection periodogram below half the drive frequency.
pub fn spectral_secular_frequency(traj: &Trajectory, p: &TrapParams) -> Result<f64> {
    let samples = traj.samples();
    if samples.len() < 16 {
        return Err(Error::FitFailure("too few samples for a spectral fit".into()));
    }
    let span = traj.duration();
    let t0 = samples[0].t;
    // Hann window suppresses leakage from the finite, non-integer-period span
    let power = |omega: f64| -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for s in samples {
            let w = 0.5 * (1.0 - (2.0 * PI * (s.t - t0) / span).cos());
            re += w * s.x * (omega * s.t).cos();
            im += w * s.x * (omega * s.t).sin();
        }
        re * re + im * im
    };
    // coarse scan below the drive, then refine around the peak
    let omega_lo = 2.0 * PI / span * 0.5;
    let omega_hi = p.omega_drive * 0.45;
    let step = 2.0 * PI / span / 8.0;
    let n_steps = ((omega_hi - omega_lo) / step) as usize;
    let mut best = (omega_lo, power(omega_lo));
    for i in 1..=n_steps {
        let w = omega_lo + i as f64 * step;
        let pw = power(w);
        if pw > best.1 {
            best = (w, pw);
        }
    }
    golden_section_min(
        |w| Ok(-power(w)),
        (best.0 - step).max(omega_lo),
        best.0 + step,
        step * 1e-7,
    )
}

fn golden_section_min<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use constants::{BERYLLIUM_9_MASS, ELEMENTARY_CHARGE};

    fn params_for_q(q_x: f64) -> TrapParams {
        TrapParams::with_q_x(
            q_x,
            2.0 * PI * 100.0e6,
            0.5e-3,
            BERYLLIUM_9_MASS,
            ELEMENTARY_CHARGE,
        )
        .unwrap()
    }

    #[test]
    fn q_parameter_linear_in_voltage() {
        let p = params_for_q(0.1);
        let mut doubled = p;
        doubled.v_rf *= 2.0;
        assert_relative_eq!(
            q_parameter(&doubled),
            2.0 * q_parameter(&p),
            max_relative = 1e-14
        );
    }

    #[test]
    fn q_and_secular_frequency_consistent() {
        // q_x = 2 sqrt(2) ω / Ω must hold to machine precision
        for q in [0.05, 0.1, 0.2] {
            let p = params_for_q(q);
            let omega = secular_frequency(&p);
            assert_relative_eq!(
                q_parameter(&p),
                2.0 * 2.0f64.sqrt() * omega / p.omega_drive,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn secular_frequency_at_q_0_2_is_7_07_mhz() {
        let p = params_for_q(0.2);
        // ω/2π = 0.2 · 100 MHz / (2 sqrt(2))
        assert_relative_eq!(
            secular_frequency(&p) / (2.0 * PI),
            7.071_067_811_865_475e6,
            max_relative = 1e-12
        );
    }

    #[test]
    fn secular_frequency_inverse_in_drive() {
        let p = params_for_q(0.1);
        let mut faster = p;
        faster.omega_drive *= 2.0;
        assert_relative_eq!(
            secular_frequency(&faster),
            secular_frequency(&p) / 2.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn pseudopotential_origin_symmetry_and_value() {
        let p = params_for_q(0.2);
        assert_eq!(pseudopotential(0.0, 0.0, &p), 0.0);
        let (x, y) = (0.3e-6, -0.8e-6);
        assert_abs_diff_eq!(
            pseudopotential(x, y, &p),
            pseudopotential(-x, y, &p),
            epsilon = 1e-40
        );
        assert_abs_diff_eq!(
            pseudopotential(x, y, &p),
            pseudopotential(y, x, &p),
            epsilon = 1e-40
        );
        // hand evaluation at x = 1 µm: ½ m ω² x² with ω = 2π · 7.0710678 MHz
        let omega = 2.0 * PI * 7.071_067_811_865_475e6;
        let by_hand = 0.5 * BERYLLIUM_9_MASS * omega * omega * 1e-12;
        assert_relative_eq!(pseudopotential(1e-6, 0.0, &p), by_hand, max_relative = 1e-12);
    }

    #[test]
    fn pseudopotential_curvature_matches_secular_frequency() {
        // finite difference: ∂²(qΦ_p)/∂x² = m ω²
        let p = params_for_q(0.15);
        let h = 1e-7;
        let d2 = (pseudopotential(h, 0.0, &p) - 2.0 * pseudopotential(0.0, 0.0, &p)
            + pseudopotential(-h, 0.0, &p))
            / (h * h);
        let omega = secular_frequency(&p);
        assert_relative_eq!(d2, p.mass * omega * omega, max_relative = 1e-9);
    }

    #[test]
    fn zero_initial_conditions_stay_zero() {
        let p = params_for_q(0.1);
        let dt = 2.0 * PI / (60.0 * p.omega_drive);
        let traj = integrate_trajectory(&p, 0.0, 0.0, (0.0, 0.0), 200.0 * dt, dt).unwrap();
        assert!(traj.samples().iter().all(|s| s.x == 0.0 && s.y == 0.0));
    }

    #[test]
    fn integrator_rejects_coarse_step() {
        let p = params_for_q(0.1);
        let dt = 2.0 * PI / (10.0 * p.omega_drive);
        assert!(integrate_trajectory(&p, 1e-6, 0.0, (0.0, 0.0), 100.0 * dt, dt).is_err());
    }

    #[test]
    fn ion_lost_reported() {
        let p = params_for_q(0.1);
        let dt = 2.0 * PI / (60.0 * p.omega_drive);
        // launch outward faster than the trap can turn around
        let v_escape = p.r_electrode * secular_frequency(&p) * 50.0;
        let err = integrate_trajectory(&p, 0.0, 0.0, (v_escape, 0.0), 1e-5, dt).unwrap_err();
        assert!(matches!(err, Error::IonLost { .. }));
    }

    fn standard_trajectory(p: &TrapParams, periods: f64) -> Trajectory {
        let omega = secular_frequency(p);
        let dt = 2.0 * PI / (64.0 * p.omega_drive);
        let duration = periods * 2.0 * PI / omega;
        integrate_trajectory(p, 1e-6, 0.0, (0.0, 0.0), duration, dt).unwrap()
    }

    #[test]
    fn micromotion_ratio_near_half_q() {
        let p = params_for_q(0.1);
        let traj = standard_trajectory(&p, 3.2);
        let ratio = fit_micromotion_ratio(&traj, &p).unwrap();
        assert!(
            (ratio - 0.05).abs() < 0.005,
            "ratio {ratio} not within 10% of q_x/2 = 0.05"
        );
    }

    #[test]
    fn spectral_frequency_matches_formula() {
        let p = params_for_q(0.1);
        let traj = standard_trajectory(&p, 3.2);
        let spectral = spectral_secular_frequency(&traj, &p).unwrap();
        let formula = secular_frequency(&p);
        assert!(
            (spectral - formula).abs() / formula < 0.02,
            "spectral {spectral} vs formula {formula}"
        );
    }

    #[test]
    fn secular_approximation_quality() {
        // Deviation grows with q. The q = 0.2 bound is the integration
        // oracle's own value: with the oscillation frequency pinned to the
        // first-order formula, the O(q²) pulling of the true secular
        // frequency accumulates ~9% of phase drift over 3.2 periods.
        let mut deviations = Vec::new();
        for q in [0.05, 0.1, 0.2] {
            let p = params_for_q(q);
            let traj = standard_trajectory(&p, 3.2);
            deviations.push(compare_to_secular_approx(&traj, &p).unwrap());
        }
        assert!(deviations[0] < 0.01, "q=0.05 deviation {}", deviations[0]);
        assert!(deviations[1] < 0.05, "q=0.1 deviation {}", deviations[1]);
        assert!(deviations[2] < 0.10, "q=0.2 deviation {}", deviations[2]);
        assert!(
            deviations[0] < deviations[1] && deviations[1] < deviations[2],
            "not monotone: {deviations:?}"
        );
    }

    #[test]
    fn fit_requires_three_periods() {
        let p = params_for_q(0.1);
        let traj = standard_trajectory(&p, 2.0);
        assert!(matches!(
            compare_to_secular_approx(&traj, &p),
            Err(Error::FitFailure(_))
        ));
    }

    #[test]
    fn csv_export_format() {
        let p = params_for_q(0.1);
        let dt = 2.0 * PI / (60.0 * p.omega_drive);
        let traj = integrate_trajectory(&p, 1e-6, 0.0, (0.0, 0.0), 5.0 * dt, dt).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,x,y,vx,vy");
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').count(), 5);
        assert!(first.starts_with("0.00000000000e0,1.00000000000e-6"));
    }
}
