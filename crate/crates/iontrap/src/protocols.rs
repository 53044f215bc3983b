//! Composite experimental procedures: sideband cooling, cat-state
//! preparation and interference, the single-ion CN gate, the two-ion
//! register gate built on the shared COM mode, and GHZ preparation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::dynamics::{
    self, CouplingParams, PulseMode, PulseSpec, Transition,
};
use crate::error::{nonnegative_finite, positive_finite, Error, Result};
use crate::fockspace::{
    coherent_amplitudes, FockSpace, HybridState, InternalLevel, MotionalDensityMatrix,
    TRUNCATION_TOL,
};

/// Cooling-stage bookkeeping: where Doppler cooling leaves the ion and how
/// many sideband cycles follow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingParams {
    /// Mean thermal occupation after Doppler cooling.
    pub n_bar_doppler: f64,
    /// Number of sideband-cooling cycles.
    pub cycles: usize,
    /// Radiative linewidth γ in rad/s.
    pub gamma_linewidth: f64,
    /// Trap frequency in rad/s.
    pub omega_x: f64,
}

impl CoolingParams {
    pub fn new(n_bar_doppler: f64, cycles: usize, gamma_linewidth: f64, omega_x: f64) -> Result<Self> {
        if !nonnegative_finite(n_bar_doppler) {
            return Err(Error::invalid("n_bar_doppler", "must be >= 0"));
        }
        if !nonnegative_finite(gamma_linewidth) {
            return Err(Error::invalid("gamma_linewidth", "must be >= 0"));
        }
        if !positive_finite(omega_x) {
            return Err(Error::invalid("omega_x", "must be > 0"));
        }
        Ok(CoolingParams {
            n_bar_doppler,
            cycles,
            gamma_linewidth,
            omega_x,
        })
    }

    /// The resolved-sideband limit (γ/2ω_x)² for these parameters.
    pub fn sideband_limit(&self) -> f64 {
        let r = self.gamma_linewidth / (2.0 * self.omega_x);
        r * r
    }

    /// The thermal state Doppler cooling leaves behind.
    pub fn doppler_state(&self, space: FockSpace) -> Result<MotionalDensityMatrix> {
        thermal_state(self.n_bar_doppler, space)
    }

    /// Run the full sequence: Doppler endpoint, then the configured number
    /// of sideband cycles.
    pub fn run(
        &self,
        c: &CouplingParams,
        mode: PulseMode,
        space: FockSpace,
    ) -> Result<MotionalDensityMatrix> {
        let rho = self.doppler_state(space)?;
        sideband_cool(&rho, c, self.cycles, mode)
    }
}

/// Resolved-sideband cooling limit <n>_min = (γ/2ω_x)².
pub fn sideband_cooling_limit(gamma: f64, omega_x: f64) -> Result<f64> {
    if !nonnegative_finite(gamma) {
        return Err(Error::invalid("gamma", "must be >= 0"));
    }
    if !positive_finite(omega_x) {
        return Err(Error::invalid("omega_x", "must be > 0"));
    }
    let r = gamma / (2.0 * omega_x);
    Ok(r * r)
}

/// Thermal (geometric) motional state P_n = n̄ⁿ/(n̄+1)^{n+1}, renormalized on
/// the retained space. Errors if the truncated tail exceeds tolerance.
pub fn thermal_state(n_bar: f64, space: FockSpace) -> Result<MotionalDensityMatrix> {
    if !nonnegative_finite(n_bar) {
        return Err(Error::invalid("n_bar", "must be >= 0"));
    }
    let d = space.dim();
    let mut diag = DVector::zeros(d);
    if n_bar == 0.0 {
        diag[0] = 1.0;
    } else {
        let ratio = n_bar / (n_bar + 1.0);
        let tail = ratio.powi(d as i32);
        if tail > TRUNCATION_TOL {
            return Err(Error::Truncation {
                n_max: space.n_max(),
                tail,
                tolerance: TRUNCATION_TOL,
            });
        }
        let mut p = 1.0 / (n_bar + 1.0);
        for n in 0..d {
            diag[n] = p;
            p *= ratio;
        }
        let total: f64 = diag.iter().sum();
        diag /= total;
    }
    let m = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::new(diag[i], 0.0)
        } else {
            C64::ZERO
        }
    });
    MotionalDensityMatrix::new(m)
}

/// Density matrix over the full internal ⊗ motional space, indexed
/// `level.index() * (n_max+1) + n`. Cooling needs this because repumping is
/// incoherent.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridDensityMatrix {
    m: DMatrix<C64>,
    n_max: usize,
}

impl HybridDensityMatrix {
    /// Embed a motional density matrix at a definite internal level.
    pub fn from_motional(level: InternalLevel, rho: &MotionalDensityMatrix) -> Self {
        let d = rho.dim();
        let mut m = DMatrix::zeros(3 * d, 3 * d);
        let base = level.index() * d;
        for i in 0..d {
            for j in 0..d {
                m[(base + i, base + j)] = rho.element(i, j);
            }
        }
        HybridDensityMatrix { m, n_max: d - 1 }
    }

    pub fn from_pure(state: &HybridState) -> Self {
        let d = state.dim();
        let mut v = DVector::zeros(3 * d);
        for level in crate::fockspace::LEVELS {
            for n in 0..d {
                v[level.index() * d + n] = state.amplitude(level, n);
            }
        }
        let m = DMatrix::from_fn(3 * d, 3 * d, |i, j| v[i] * v[j].conj());
        HybridDensityMatrix { m, n_max: d - 1 }
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn apply_unitary(&mut self, u: &DMatrix<C64>) {
        self.m = u * &self.m * u.adjoint();
    }

    /// Population of one internal level.
    pub fn level_population(&self, level: InternalLevel) -> f64 {
        let d = self.dim();
        let base = level.index() * d;
        (0..d).map(|n| self.m[(base + n, base + n)].re).sum()
    }

    /// Motional populations traced over internal levels.
    pub fn motional_populations(&self) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|n| (0..3).map(|l| self.m[(l * d + n, l * d + n)].re).sum())
            .collect()
    }

    /// Partial trace over the internal level.
    pub fn motional_trace(&self) -> MotionalDensityMatrix {
        let d = self.dim();
        let mut rho = DMatrix::zeros(d, d);
        for l in 0..3 {
            for i in 0..d {
                for j in 0..d {
                    rho[(i, j)] += self.m[(l * d + i, l * d + j)];
                }
            }
        }
        // hermitize away accumulated roundoff and pin the trace
        let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
        let trace: f64 = (0..d).map(|i| rho[(i, i)].re).sum();
        MotionalDensityMatrix::from_matrix_unchecked(rho / C64::new(trace, 0.0))
    }

    /// Coherence element between (level_i, n_i) and (level_j, n_j).
    pub fn element(
        &self,
        level_i: InternalLevel,
        n_i: usize,
        level_j: InternalLevel,
        n_j: usize,
    ) -> C64 {
        let d = self.dim();
        self.m[(level_i.index() * d + n_i, level_j.index() * d + n_j)]
    }
}

/// Incoherent repump: all population in |up> is optically pumped to |down>
/// at the same n, erasing every coherence involving |up> while leaving the
/// motional factor untouched (recoil-free idealization).
///
/// Kraus form: K₀ = projector on the non-up subspace,
/// K₁ = Σ_n |down,n><up,n|.
pub fn repump(rho: &HybridDensityMatrix) -> HybridDensityMatrix {
    let d = rho.dim();
    let total = 3 * d;
    let up = InternalLevel::Up.index();
    let down = InternalLevel::Down.index();

    let mut k0 = DMatrix::<C64>::zeros(total, total);
    for l in 0..3 {
        if l == up {
            continue;
        }
        for n in 0..d {
            k0[(l * d + n, l * d + n)] = C64::ONE;
        }
    }
    let mut k1 = DMatrix::<C64>::zeros(total, total);
    for n in 0..d {
        k1[(down * d + n, up * d + n)] = C64::ONE;
    }
    let m = &k0 * &rho.m * k0.adjoint() + &k1 * &rho.m * k1.adjoint();
    HybridDensityMatrix { m, n_max: rho.n_max }
}

/// Resolved-sideband cooling: `cycles` repetitions of a red-sideband π pulse
/// (angle referenced to the n = 1 level, the dominant one after Doppler
/// cooling) followed by an incoherent repump. Input is the motional state
/// with the internal state in |down>.
pub fn sideband_cool(
    rho_in: &MotionalDensityMatrix,
    c: &CouplingParams,
    cycles: usize,
    mode: PulseMode,
) -> Result<MotionalDensityMatrix> {
    let space = FockSpace::new(rho_in.n_max())?;
    let pulse = PulseSpec::single_ion(Transition::RedSideband, PI, 0.0);
    let u = dynamics::pulse_unitary(&pulse, c, mode, space);
    let mut hybrid = HybridDensityMatrix::from_motional(InternalLevel::Down, rho_in);
    for _ in 0..cycles {
        hybrid.apply_unitary(&u);
        hybrid = repump(&hybrid);
    }
    Ok(hybrid.motional_trace())
}

/// The ideal target of the cat sequence:
/// (|down>|alpha1> + e^{iφ}|up>|alpha2>)/√2.
pub fn ideal_cat(
    alpha1: C64,
    alpha2: C64,
    phi: f64,
    space: FockSpace,
) -> Result<HybridState> {
    let a1 = coherent_amplitudes(alpha1, space)?;
    let a2 = coherent_amplitudes(alpha2, space)?;
    let mut amps = DMatrix::zeros(space.dim(), 3);
    let w = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let phase = C64::from_polar(1.0, phi);
    for n in 0..space.dim() {
        amps[(n, InternalLevel::Down.index())] = w * a1[n];
        amps[(n, InternalLevel::Up.index())] = w * phase * a2[n];
    }
    HybridState::from_amplitudes(amps)
}

/// Create the Schrödinger-cat state of two coherent branches entangled with
/// the internal qubit, starting from |down>|0>:
/// carrier π/2, displace the up branch by alpha1, carrier π (swapping the
/// branches), displace the up branch by alpha2.
///
/// Phases are chosen so the result is (|down>|alpha1> + e^{iφ}|up>|alpha2>)/√2
/// up to a global phase.
pub fn prepare_cat(
    alpha1: C64,
    alpha2: C64,
    phi: f64,
    c: &CouplingParams,
    mode: PulseMode,
    space: FockSpace,
) -> Result<HybridState> {
    let state = HybridState::basis(InternalLevel::Down, 0, space)?;
    let split = PulseSpec::single_ion(Transition::Carrier, FRAC_PI_2, phi + FRAC_PI_2);
    let state = dynamics::evolve_pulse(&state, &split, c, mode)?;
    let state = dynamics::spin_selective_displacement(&state, alpha1, InternalLevel::Up)?;
    let swap = PulseSpec::single_ion(Transition::Carrier, PI, phi);
    let state = dynamics::evolve_pulse(&state, &swap, c, mode)?;
    dynamics::spin_selective_displacement(&state, alpha2, InternalLevel::Up)
}

/// Close the interferometer: apply a carrier π/2 with the probe phase and
/// return the probability of finding the ion in |down>. Sweeping the probe
/// phase traces a fringe whose visibility is the branch overlap |<a1|a2>|.
pub fn cat_interference(
    state: &HybridState,
    probe_phase: f64,
    c: &CouplingParams,
    mode: PulseMode,
) -> Result<f64> {
    let probe = PulseSpec::single_ion(Transition::Carrier, FRAC_PI_2, probe_phase);
    let out = dynamics::evolve_pulse(state, &probe, c, mode)?;
    Ok(out.level_population(InternalLevel::Down))
}

/// Maximum allowed auxiliary-level population entering the CN gate.
pub const CN_AUX_TOL: f64 = 1e-9;

/// Single-ion controlled-NOT: motional {|0>,|1>} is the control, the
/// internal qubit the target. Carrier π/2 (phase -π/2), auxiliary 2π
/// (conditional sign flip of |up,1>), carrier π/2 (phase +π/2). The phase
/// choice makes the truth table exactly the textbook CN with overall phase 1.
pub fn cn_gate(state: &HybridState, c: &CouplingParams, mode: PulseMode) -> Result<HybridState> {
    let aux_pop = state.level_population(InternalLevel::Aux);
    if aux_pop > CN_AUX_TOL {
        return Err(Error::Precondition {
            message: "auxiliary level populated at CN input".into(),
            residual: aux_pop,
        });
    }
    let first = PulseSpec::single_ion(Transition::Carrier, FRAC_PI_2, -FRAC_PI_2);
    let flip = PulseSpec::single_ion(Transition::BlueSidebandAux, 2.0 * PI, 0.0);
    let last = PulseSpec::single_ion(Transition::Carrier, FRAC_PI_2, FRAC_PI_2);
    let state = dynamics::evolve_pulse(state, &first, c, mode)?;
    let state = dynamics::evolve_pulse(&state, &flip, c, mode)?;
    dynamics::evolve_pulse(&state, &last, c, mode)
}

/// Direction of the keyboard (spin ↔ COM motion) mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyboardDirection {
    /// Map ion m's internal superposition onto the COM mode (requires the
    /// COM in |0>).
    Encode,
    /// Map the COM superposition back onto ion m (requires ion m in |down>).
    Decode,
}

/// Residual population tolerance for register-gate preconditions.
pub const REGISTER_PRECONDITION_TOL: f64 = 1e-9;

/// Pure state of N three-level ions sharing one COM motional mode.
///
/// Basis index: `spin_index * (n_max+1) + n`, where `spin_index` encodes the
/// internal levels base 3 with ion 0 as the least-significant digit.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterState {
    amps: DVector<C64>,
    n_ions: usize,
    n_max: usize,
}

/// Desk-scale cap on the register size.
pub const MAX_IONS: usize = 6;

impl RegisterState {
    /// All ions in |down>, COM in |0>.
    pub fn ground(n_ions: usize, space: FockSpace) -> Result<Self> {
        if n_ions == 0 || n_ions > MAX_IONS {
            return Err(Error::invalid(
                "n_ions",
                format!("must be 1..={MAX_IONS}, got {n_ions}"),
            ));
        }
        let dim = 3usize.pow(n_ions as u32) * space.dim();
        let mut amps = DVector::zeros(dim);
        amps[0] = C64::ONE;
        Ok(RegisterState {
            amps,
            n_ions,
            n_max: space.n_max(),
        })
    }

    /// Basis state with the given internal levels and COM occupation.
    pub fn basis(levels: &[InternalLevel], n: usize, space: FockSpace) -> Result<Self> {
        let mut state = Self::ground(levels.len(), space)?;
        if n > space.n_max() {
            return Err(Error::Headroom {
                required: n,
                n_max: space.n_max(),
            });
        }
        let mut spin_index = 0usize;
        for (ion, level) in levels.iter().enumerate() {
            spin_index += level.index() * 3usize.pow(ion as u32);
        }
        state.amps[0] = C64::ZERO;
        state.amps[spin_index * space.dim() + n] = C64::ONE;
        Ok(state)
    }

    pub fn n_ions(&self) -> usize {
        self.n_ions
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn space(&self) -> FockSpace {
        FockSpace::new(self.n_max).expect("valid space")
    }

    fn motional_dim(&self) -> usize {
        self.n_max + 1
    }

    fn spin_dim(&self) -> usize {
        3usize.pow(self.n_ions as u32)
    }

    fn digit(&self, spin_index: usize, ion: usize) -> usize {
        spin_index / 3usize.pow(ion as u32) % 3
    }

    fn with_digit(&self, spin_index: usize, ion: usize, level: usize) -> usize {
        let place = 3usize.pow(ion as u32);
        spin_index - self.digit(spin_index, ion) * place + level * place
    }

    pub fn amplitude(&self, levels: &[InternalLevel], n: usize) -> C64 {
        assert_eq!(levels.len(), self.n_ions);
        let mut spin_index = 0usize;
        for (ion, level) in levels.iter().enumerate() {
            spin_index += level.index() * 3usize.pow(ion as u32);
        }
        self.amps[spin_index * self.motional_dim() + n]
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn inner(&self, other: &RegisterState) -> Result<C64> {
        if self.n_ions != other.n_ions || self.n_max != other.n_max {
            return Err(Error::DimensionMismatch {
                left: self.amps.len(),
                right: other.amps.len(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn overlap(&self, other: &RegisterState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Population of one internal level on one ion.
    pub fn ion_level_population(&self, ion: usize, level: InternalLevel) -> f64 {
        let md = self.motional_dim();
        let mut total = 0.0;
        for s in 0..self.spin_dim() {
            if self.digit(s, ion) != level.index() {
                continue;
            }
            for n in 0..md {
                total += self.amps[s * md + n].norm_sqr();
            }
        }
        total
    }

    /// COM-mode populations, traced over all internal levels.
    pub fn com_populations(&self) -> Vec<f64> {
        let md = self.motional_dim();
        (0..md)
            .map(|n| {
                (0..self.spin_dim())
                    .map(|s| self.amps[s * md + n].norm_sqr())
                    .sum()
            })
            .collect()
    }

    /// Population outside the COM ground state.
    pub fn com_excitation(&self) -> f64 {
        1.0 - self.com_populations()[0]
    }

    /// <σ_z on one ion>, ignoring any auxiliary-level mass.
    pub fn sigma_z_expectation(&self, ion: usize) -> f64 {
        self.ion_level_population(ion, InternalLevel::Up)
            - self.ion_level_population(ion, InternalLevel::Down)
    }

    /// <∏_i σ_z,i> over all ions. Errors if the auxiliary level carries
    /// non-negligible population (σ_z is undefined there).
    pub fn sigma_z_product_expectation(&self) -> Result<f64> {
        let md = self.motional_dim();
        let mut aux_mass = 0.0;
        let mut expect = 0.0;
        for s in 0..self.spin_dim() {
            let mut sign = 1.0;
            let mut has_aux = false;
            for ion in 0..self.n_ions {
                match self.digit(s, ion) {
                    0 => sign = -sign,
                    1 => {}
                    _ => has_aux = true,
                }
            }
            let mass: f64 = (0..md).map(|n| self.amps[s * md + n].norm_sqr()).sum();
            if has_aux {
                aux_mass += mass;
            } else {
                expect += sign * mass;
            }
        }
        if aux_mass > 1e-6 {
            return Err(Error::Precondition {
                message: "auxiliary level populated at readout".into(),
                residual: aux_mass,
            });
        }
        Ok(expect)
    }

    /// Multiply the |down> and |up> amplitudes of one ion by the given
    /// phases (rotating-frame free precession). The auxiliary level is left
    /// untouched.
    pub fn apply_ion_phase(&mut self, ion: usize, phase_down: f64, phase_up: f64) {
        let md = self.motional_dim();
        let pd = C64::from_polar(1.0, phase_down);
        let pu = C64::from_polar(1.0, phase_up);
        for s in 0..self.spin_dim() {
            let factor = match self.digit(s, ion) {
                0 => pd,
                1 => pu,
                _ => continue,
            };
            for n in 0..md {
                self.amps[s * md + n] *= factor;
            }
        }
    }

    fn renormalize(&mut self) {
        let norm = self.amps.norm();
        if (norm - 1.0).abs() > f64::EPSILON {
            self.amps /= C64::new(norm, 0.0);
        }
    }
}

/// Apply a resonant pulse addressed to one ion of the register, coupling its
/// internal levels through the shared COM mode.
pub fn register_pulse(
    state: &RegisterState,
    ion: usize,
    transition: Transition,
    angle: f64,
    phase: f64,
    c: &CouplingParams,
    mode: PulseMode,
) -> Result<RegisterState> {
    if ion >= state.n_ions() {
        return Err(Error::invalid(
            "ion",
            format!("ion {ion} out of range for {} ions", state.n_ions()),
        ));
    }
    if !nonnegative_finite(angle) {
        return Err(Error::invalid("angle", "must be >= 0"));
    }
    let md = state.motional_dim();
    let pairs = dynamics::level_pairs(transition, md);
    let (rates, reference) = dynamics::pair_rates(transition, md, c.eta, mode);

    let mut out = state.clone();
    for (pair, rate) in pairs.iter().zip(rates.iter()) {
        let theta = angle * rate / reference;
        let rot = dynamics::pair_rotation(theta, phase);
        for s in 0..state.spin_dim() {
            if state.digit(s, ion) != pair.lo_level.index() {
                continue;
            }
            let s_hi = state.with_digit(s, ion, pair.hi_level.index());
            let i = s * md + pair.lo_n;
            let j = s_hi * md + pair.hi_n;
            let lo = out.amps[i];
            let hi = out.amps[j];
            out.amps[i] = rot[0][0] * lo + rot[0][1] * hi;
            out.amps[j] = rot[1][0] * lo + rot[1][1] * hi;
        }
    }
    Ok(out)
}

/// The "keyboard" operation: a red-sideband π pulse on ion m.
///
/// `Encode` maps (α|down> + β|up>)_m |0> to |down>_m (α|0> - e^{iφ} β|1>);
/// `Decode` (the same pulse with a π phase shift) inverts it exactly.
pub fn keyboard_map(
    state: &RegisterState,
    ion: usize,
    direction: KeyboardDirection,
    c: &CouplingParams,
    mode: PulseMode,
) -> Result<RegisterState> {
    match direction {
        KeyboardDirection::Encode => {
            let residual = state.com_excitation();
            if residual > REGISTER_PRECONDITION_TOL {
                return Err(Error::Precondition {
                    message: "keyboard encode requires the COM mode in |0>".into(),
                    residual,
                });
            }
        }
        KeyboardDirection::Decode => {
            let residual = 1.0 - state.ion_level_population(ion, InternalLevel::Down);
            if residual > REGISTER_PRECONDITION_TOL {
                return Err(Error::Precondition {
                    message: format!("keyboard decode requires ion {ion} in |down>"),
                    residual,
                });
            }
        }
    }
    let phase = match direction {
        KeyboardDirection::Encode => 0.0,
        KeyboardDirection::Decode => PI,
    };
    let mut out = register_pulse(state, ion, Transition::RedSideband, PI, phase, c, mode)?;
    out.renormalize();
    Ok(out)
}

/// Controlled-NOT between ions m (control) and k (target) through the COM
/// bus: encode ion m onto the COM mode, run the single-ion CN pulses on ion
/// k with the motional control, then decode the COM back onto ion m.
pub fn cn_between_ions(
    state: &RegisterState,
    m: usize,
    k: usize,
    c: &CouplingParams,
    mode: PulseMode,
) -> Result<RegisterState> {
    if m == k {
        return Err(Error::invalid("k", "control and target must differ"));
    }
    let residual = state.com_excitation();
    if residual > REGISTER_PRECONDITION_TOL {
        return Err(Error::Precondition {
            message: "register CN requires the COM mode in |0>".into(),
            residual,
        });
    }
    let state = keyboard_map(state, m, KeyboardDirection::Encode, c, mode)?;
    let state = register_pulse(&state, k, Transition::Carrier, FRAC_PI_2, -FRAC_PI_2, c, mode)?;
    let state = register_pulse(&state, k, Transition::BlueSidebandAux, 2.0 * PI, 0.0, c, mode)?;
    let state = register_pulse(&state, k, Transition::Carrier, FRAC_PI_2, FRAC_PI_2, c, mode)?;
    keyboard_map(&state, m, KeyboardDirection::Decode, c, mode)
}

/// Prepare the maximally entangled state
/// (|down...down> + e^{iφ}|up...up>)/√2 ⊗ |0>: a carrier π/2 on ion 0
/// followed by register CN gates from ion 0 to each other ion.
pub fn prepare_ghz(
    n_ions: usize,
    phi: f64,
    c: &CouplingParams,
    mode: PulseMode,
    space: FockSpace,
) -> Result<RegisterState> {
    if !(2..=MAX_IONS).contains(&n_ions) {
        return Err(Error::invalid(
            "n_ions",
            format!("must be 2..={MAX_IONS}, got {n_ions}"),
        ));
    }
    let state = RegisterState::ground(n_ions, space)?;
    let mut state = register_pulse(
        &state,
        0,
        Transition::Carrier,
        FRAC_PI_2,
        phi + FRAC_PI_2,
        c,
        mode,
    )?;
    for k in 1..n_ions {
        state = cn_between_ions(&state, 0, k, c, mode)?;
    }
    Ok(state)
}

/// The ideal GHZ state for fidelity checks.
pub fn ideal_ghz(n_ions: usize, phi: f64, space: FockSpace) -> Result<RegisterState> {
    let down = vec![InternalLevel::Down; n_ions];
    let up = vec![InternalLevel::Up; n_ions];
    let mut state = RegisterState::basis(&down, 0, space)?;
    let up_state = RegisterState::basis(&up, 0, space)?;
    let w = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let phase = C64::from_polar(1.0, phi);
    state.amps = state.amps * w + up_state.amps * (w * phase);
    Ok(state)
}
