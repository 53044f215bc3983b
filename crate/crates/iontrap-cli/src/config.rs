//! Scenario configuration: strict parsing (unknown keys rejected), defaults
//! resolved and echoed, TOML or JSON accepted.

use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use iontrap::fockspace::{coherent_amplitudes, FockSpace, MotionalDensityMatrix};
use iontrap::protocols::thermal_state;
use iontrap::trapphysics::constants;

/// Scenario kind; one CLI subcommand each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Trap,
    Cool,
    Flop,
    Cat,
    Wigner,
    Densmat,
    Cngate,
    Register,
    Ramsey,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Trap => "trap",
            ScenarioKind::Cool => "cool",
            ScenarioKind::Flop => "flop",
            ScenarioKind::Cat => "cat",
            ScenarioKind::Wigner => "wigner",
            ScenarioKind::Densmat => "densmat",
            ScenarioKind::Cngate => "cngate",
            ScenarioKind::Register => "register",
            ScenarioKind::Ramsey => "ramsey",
        }
    }
}

/// Rabi-frequency evaluation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseModeConfig {
    Exact,
    LambDicke,
}

impl From<PulseModeConfig> for iontrap::dynamics::PulseMode {
    fn from(m: PulseModeConfig) -> Self {
        match m {
            PulseModeConfig::Exact => iontrap::dynamics::PulseMode::Exact,
            PulseModeConfig::LambDicke => iontrap::dynamics::PulseMode::LambDicke,
        }
    }
}

/// Initial motional state for signal and tomography scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    /// Number state |n>.
    Fock { n: usize },
    /// Coherent state, by amplitude or by mean occupation (real alpha).
    Coherent {
        #[serde(default)]
        alpha_re: Option<f64>,
        #[serde(default)]
        alpha_im: Option<f64>,
        #[serde(default)]
        n_bar: Option<f64>,
    },
    /// Thermal (geometric) state.
    Thermal { n_bar: f64 },
    /// Σ c_n |n> over the listed [re, im] coefficients, renormalized.
    Superposition { coefficients: Vec<[f64; 2]> },
}

impl StateSpec {
    pub fn alpha(&self) -> Result<Option<C64>> {
        match self {
            StateSpec::Coherent {
                alpha_re,
                alpha_im,
                n_bar,
            } => match (alpha_re, alpha_im, n_bar) {
                (None, None, Some(nb)) => {
                    if *nb < 0.0 {
                        bail!("coherent state: n_bar must be >= 0");
                    }
                    Ok(Some(C64::new(nb.sqrt(), 0.0)))
                }
                (re, im, None) => Ok(Some(C64::new(re.unwrap_or(0.0), im.unwrap_or(0.0)))),
                _ => bail!("coherent state: give alpha_re/alpha_im or n_bar, not both"),
            },
            _ => Ok(None),
        }
    }

    /// Realize the spec as a density matrix on the given space.
    pub fn density_matrix(&self, space: FockSpace) -> Result<MotionalDensityMatrix> {
        match self {
            StateSpec::Fock { n } => {
                MotionalDensityMatrix::fock(*n, space).context("fock state")
            }
            StateSpec::Coherent { .. } => {
                let alpha = self.alpha()?.expect("coherent");
                let amps = coherent_amplitudes(alpha, space).context("coherent state")?;
                MotionalDensityMatrix::from_pure(&amps).context("coherent state")
            }
            StateSpec::Thermal { n_bar } => {
                thermal_state(*n_bar, space).context("thermal state")
            }
            StateSpec::Superposition { coefficients } => {
                if coefficients.is_empty() {
                    bail!("superposition: coefficients must be nonempty");
                }
                if coefficients.len() > space.dim() {
                    bail!(
                        "superposition: {} coefficients exceed n_max + 1 = {}",
                        coefficients.len(),
                        space.dim()
                    );
                }
                let mut v = nalgebra::DVector::zeros(space.dim());
                for (n, c) in coefficients.iter().enumerate() {
                    v[n] = C64::new(c[0], c[1]);
                }
                MotionalDensityMatrix::from_pure(&v).context("superposition state")
            }
        }
    }

    /// Number-state populations of the spec.
    pub fn populations(&self, space: FockSpace) -> Result<Vec<f64>> {
        Ok(self.density_matrix(space)?.populations())
    }
}

fn default_seed() -> u64 {
    0
}
fn default_eta() -> f64 {
    0.2
}
fn default_g() -> f64 {
    1.0
}
fn default_mode() -> PulseModeConfig {
    PulseModeConfig::Exact
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapConfig {
    pub kind: ScenarioKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "TrapConfig::default_q_x")]
    pub q_x: f64,
    /// rf drive frequency in Hz.
    #[serde(default = "TrapConfig::default_drive_freq_hz")]
    pub drive_freq_hz: f64,
    #[serde(default = "TrapConfig::default_r_electrode_m")]
    pub r_electrode_m: f64,
    #[serde(default = "TrapConfig::default_mass_kg")]
    pub mass_kg: f64,
    #[serde(default = "TrapConfig::default_charge_c")]
    pub charge_c: f64,
    #[serde(default = "TrapConfig::default_x0_m")]
    pub x0_m: f64,
    #[serde(default)]
    pub y0_m: f64,
    #[serde(default)]
    pub vx0_m_per_s: f64,
    #[serde(default)]
    pub vy0_m_per_s: f64,
    /// Trajectory length in secular periods.
    #[serde(default = "TrapConfig::default_secular_periods")]
    pub secular_periods: f64,
    #[serde(default = "TrapConfig::default_steps_per_drive_period")]
    pub steps_per_drive_period: usize,
}

impl TrapConfig {
    fn default_q_x() -> f64 {
        0.1
    }
    fn default_drive_freq_hz() -> f64 {
        100.0e6
    }
    fn default_r_electrode_m() -> f64 {
        0.5e-3
    }
    fn default_mass_kg() -> f64 {
        constants::BERYLLIUM_9_MASS
    }
    fn default_charge_c() -> f64 {
        constants::ELEMENTARY_CHARGE
    }
    fn default_x0_m() -> f64 {
        1.0e-6
    }
    fn default_secular_periods() -> f64 {
        3.2
    }
    fn default_steps_per_drive_period() -> usize {
        64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q_x > 0.0 && self.q_x <= 0.4) {
            bail!("q_x: must be in (0, 0.4], got {}", self.q_x);
        }
        if self.secular_periods < 3.0 {
            bail!("secular_periods: need >= 3 for the secular-model fit");
        }
        if self.steps_per_drive_period < 50 {
            bail!("steps_per_drive_period: need >= 50 to resolve micromotion");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoolConfig {
    pub kind: ScenarioKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "CoolConfig::default_n_bar")]
    pub n_bar: f64,
    #[serde(default = "CoolConfig::default_cycles")]
    pub cycles: usize,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(default = "CoolConfig::default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_mode")]
    pub mode: PulseModeConfig,
}

impl CoolConfig {
    fn default_n_bar() -> f64 {
        1.0
    }
    fn default_cycles() -> usize {
        5
    }
    fn default_n_max() -> usize {
        25
    }

    pub fn validate(&self) -> Result<()> {
        validate_coupling(self.eta, self.g)?;
        if self.n_bar < 0.0 {
            bail!("n_bar: must be >= 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlopConfig {
    pub kind: ScenarioKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "FlopConfig::default_state")]
    pub state: StateSpec,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(default = "FlopConfig::default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub gamma0: f64,
    #[serde(default)]
    pub decay_exponent: f64,
    /// Shots per point; 0 keeps the noiseless signal.
    #[serde(default = "FlopConfig::default_shots")]
    pub shots: usize,
    /// Signal span; 0 selects 1.25 x the rephasing time 2π/(gη²).
    #[serde(default)]
    pub tau_max: f64,
    #[serde(default = "FlopConfig::default_tau_points")]
    pub tau_points: usize,
    #[serde(default = "FlopConfig::default_n_max_fit")]
    pub n_max_fit: usize,
    #[serde(default = "default_mode")]
    pub mode: PulseModeConfig,
}

impl FlopConfig {
    fn default_state() -> StateSpec {
        StateSpec::Coherent {
            alpha_re: None,
            alpha_im: None,
            n_bar: Some(3.1),
        }
    }
    fn default_shots() -> usize {
        4000
    }
    fn default_n_max() -> usize {
        30
    }
    fn default_tau_points() -> usize {
        600
    }
    fn default_n_max_fit() -> usize {
        12
    }

    pub fn validate(&self) -> Result<()> {
        validate_coupling(self.eta, self.g)?;
        if self.gamma0 < 0.0 {
            bail!("gamma0: must be >= 0");
        }
        if self.tau_points < 2 {
            bail!("tau_points: need >= 2");
        }
        if self.n_max_fit + 1 >= self.n_max {
            bail!("n_max_fit: must be below n_max - 1 for the blue-sideband ladder");
        }
        self.state.alpha()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatConfig {
    pub kind: ScenarioKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "CatConfig::default_alpha1_re")]
    pub alpha1_re: f64,
    #[serde(default)]
    pub alpha1_im: f64,
    #[serde(default = "CatConfig::default_alpha2_re")]
    pub alpha2_re: f64,
    #[serde(default)]
    pub alpha2_im: f64,
    #[serde(default)]
    pub phi: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(default = "CatConfig::default_n_max")]
    pub n_max: usize,
    #[serde(default = "CatConfig::default_probe_points")]
    pub probe_points: usize,
    #[serde(default = "CatConfig::default_mode")]
    pub mode: PulseModeConfig,
}

impl CatConfig {
    fn default_alpha1_re() -> f64 {
        1.5
    }
    fn default_alpha2_re() -> f64 {
        -1.5
    }
    fn default_n_max() -> usize {
        30
    }
    fn default_probe_points() -> usize {
        64
    }
    fn default_mode() -> PulseModeConfig {
        PulseModeConfig::LambDicke
    }

    pub fn validate(&self) -> Result<()> {
        validate_coupling(self.eta, self.g)?;
        if self.probe_points < 4 {
            bail!("probe_points: need >= 4 for a visibility estimate");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerConfig {
    pub kind: ScenarioKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "WignerConfig::default_state")]
    pub state: StateSpec,
    #[serde(default = "WignerConfig::default_n_max")]
    pub n_max: usize,
    #[serde(default = "WignerConfig::default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "WignerConfig::default_phases")]
    pub phases_per_radius: usize,
    /// Include the α = 0 sample ahead of the grid.
    #[serde(default = "WignerConfig::default_include_origin")]
    pub include_origin: bool,
}

impl WignerConfig {
    fn default_state() -> StateSpec {
        StateSpec::Fock { n: 1 }
    }
    fn default_n_max() -> usize {
        30
    }
    fn default_radii() -> Vec<f64> {
        (1..=6).map(|i| 0.4 * i as f64).collect()
    }
    fn default_phases() -> usize {
        8
    }
    fn default_include_origin() -> bool {
        true
    }

    pub fn validate(&self) -> Result<()> {
        iontrap::tomography::PhaseSpaceGrid::new(self.radii.clone(), self.phases_per_radius)
            .map_err(|e| anyhow::anyhow!("grid: {e}"))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensmatConfig {
    pub kind: ScenarioKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "DensmatConfig::default_state")]
    pub state: StateSpec,
    #[serde(default = "DensmatConfig::default_n_max")]
    pub n_max: usize,
    #[serde(default = "DensmatConfig::default_n_fit")]
    pub n_fit: usize,
    #[serde(default = "WignerConfig::default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "WignerConfig::default_phases")]
    pub phases_per_radius: usize,
    /// Shots per displaced population; 0 keeps the exact values.
    #[serde(default)]
    pub shots: usize,
}

impl DensmatConfig {
    fn default_state() -> StateSpec {
        StateSpec::Superposition {
            coefficients: vec![
                [std::f64::consts::FRAC_1_SQRT_2, 0.0],
                [0.0, 0.0],
                [0.0, -std::f64::consts::FRAC_1_SQRT_2],
            ],
        }
    }
    fn default_n_max() -> usize {
        24
    }
    fn default_n_fit() -> usize {
        3
    }

    pub fn validate(&self) -> Result<()> {
        iontrap::tomography::PhaseSpaceGrid::new(self.radii.clone(), self.phases_per_radius)
            .map_err(|e| anyhow::anyhow!("grid: {e}"))?;
        if self.n_fit >= self.n_max {
            bail!("n_fit: must be below n_max");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CngateConfig {
    pub kind: ScenarioKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(default = "CngateConfig::default_n_max")]
    pub n_max: usize,
    #[serde(default = "CatConfig::default_mode")]
    pub mode: PulseModeConfig,
}

impl CngateConfig {
    fn default_n_max() -> usize {
        12
    }

    pub fn validate(&self) -> Result<()> {
        validate_coupling(self.eta, self.g)
    }
}

/// Which register demonstration to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegisterOperation {
    /// C_{m,k} mapping table on the computational basis.
    Cn,
    /// GHZ preparation via the CN chain.
    Ghz,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegisterConfig {
    pub kind: ScenarioKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "RegisterConfig::default_operation")]
    pub operation: RegisterOperation,
    #[serde(default = "RegisterConfig::default_n_ions")]
    pub n_ions: usize,
    #[serde(default)]
    pub control_ion: usize,
    #[serde(default = "RegisterConfig::default_target_ion")]
    pub target_ion: usize,
    #[serde(default)]
    pub ghz_phi: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(default = "RegisterConfig::default_n_max")]
    pub n_max: usize,
    #[serde(default = "CatConfig::default_mode")]
    pub mode: PulseModeConfig,
}

impl RegisterConfig {
    fn default_operation() -> RegisterOperation {
        RegisterOperation::Cn
    }
    fn default_n_ions() -> usize {
        2
    }
    fn default_target_ion() -> usize {
        1
    }
    fn default_n_max() -> usize {
        10
    }

    pub fn validate(&self) -> Result<()> {
        validate_coupling(self.eta, self.g)?;
        if self.n_ions < 2 || self.n_ions > iontrap::protocols::MAX_IONS {
            bail!(
                "n_ions: must be 2..={}, got {}",
                iontrap::protocols::MAX_IONS,
                self.n_ions
            );
        }
        if self.control_ion >= self.n_ions || self.target_ion >= self.n_ions {
            bail!("control_ion/target_ion: out of range for {} ions", self.n_ions);
        }
        if self.control_ion == self.target_ion {
            bail!("control_ion and target_ion must differ");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamseyCliConfig {
    pub kind: ScenarioKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "RamseyCliConfig::default_mode")]
    pub mode: iontrap::spectroscopy::RamseyMode,
    #[serde(default = "RamseyCliConfig::default_n_ions")]
    pub n_ions: usize,
    #[serde(default = "RamseyCliConfig::default_t_ramsey")]
    pub t_ramsey: f64,
    /// Detuning ω - ω_o in rad/s; when omitted the maximum-slope point is
    /// used.
    #[serde(default)]
    pub detuning: Option<f64>,
    #[serde(default = "RamseyCliConfig::default_shots")]
    pub shots: usize,
}

impl RamseyCliConfig {
    fn default_mode() -> iontrap::spectroscopy::RamseyMode {
        iontrap::spectroscopy::RamseyMode::Entangled
    }
    fn default_n_ions() -> usize {
        3
    }
    fn default_t_ramsey() -> f64 {
        1.0
    }
    fn default_shots() -> usize {
        10_000
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_ions == 0 {
            bail!("n_ions: must be >= 1");
        }
        if self.n_ions > iontrap::protocols::MAX_IONS {
            bail!(
                "n_ions: the simulated path supports at most {}",
                iontrap::protocols::MAX_IONS
            );
        }
        if self.t_ramsey <= 0.0 || self.t_ramsey.is_nan() {
            bail!("t_ramsey: must be > 0");
        }
        if self.shots == 0 {
            bail!("shots: must be >= 1");
        }
        Ok(())
    }
}

fn validate_coupling(eta: f64, g: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eta) {
        bail!("eta: must be in [0, 1), got {eta}");
    }
    if g <= 0.0 || g.is_nan() {
        bail!("g: must be > 0, got {g}");
    }
    Ok(())
}

/// A fully resolved scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Scenario {
    Trap(TrapConfig),
    Cool(CoolConfig),
    Flop(FlopConfig),
    Cat(CatConfig),
    Wigner(WignerConfig),
    Densmat(DensmatConfig),
    Cngate(CngateConfig),
    Register(RegisterConfig),
    Ramsey(RamseyCliConfig),
}

impl Scenario {
    pub fn kind(&self) -> ScenarioKind {
        match self {
            Scenario::Trap(c) => c.kind,
            Scenario::Cool(c) => c.kind,
            Scenario::Flop(c) => c.kind,
            Scenario::Cat(c) => c.kind,
            Scenario::Wigner(c) => c.kind,
            Scenario::Densmat(c) => c.kind,
            Scenario::Cngate(c) => c.kind,
            Scenario::Register(c) => c.kind,
            Scenario::Ramsey(c) => c.kind,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Scenario::Trap(c) => c.seed,
            Scenario::Cool(c) => c.seed,
            Scenario::Flop(c) => c.seed,
            Scenario::Cat(c) => c.seed,
            Scenario::Wigner(c) => c.seed,
            Scenario::Densmat(c) => c.seed,
            Scenario::Cngate(c) => c.seed,
            Scenario::Register(c) => c.seed,
            Scenario::Ramsey(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Scenario::Trap(c) => c.seed = seed,
            Scenario::Cool(c) => c.seed = seed,
            Scenario::Flop(c) => c.seed = seed,
            Scenario::Cat(c) => c.seed = seed,
            Scenario::Wigner(c) => c.seed = seed,
            Scenario::Densmat(c) => c.seed = seed,
            Scenario::Cngate(c) => c.seed = seed,
            Scenario::Register(c) => c.seed = seed,
            Scenario::Ramsey(c) => c.seed = seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Scenario::Trap(c) => c.validate(),
            Scenario::Cool(c) => c.validate(),
            Scenario::Flop(c) => c.validate(),
            Scenario::Cat(c) => c.validate(),
            Scenario::Wigner(c) => c.validate(),
            Scenario::Densmat(c) => c.validate(),
            Scenario::Cngate(c) => c.validate(),
            Scenario::Register(c) => c.validate(),
            Scenario::Ramsey(c) => c.validate(),
        }
    }
}

fn detect_kind(raw: &toml::Value) -> Result<ScenarioKind> {
    let kind = raw
        .get("kind")
        .and_then(|v| v.as_str())
        .context("config must carry a `kind` key naming the scenario")?;
    serde_json::from_value(serde_json::Value::String(kind.to_string()))
        .with_context(|| format!("unknown scenario kind `{kind}`"))
}

/// Load, strictly parse, and validate a scenario file (TOML, or JSON when
/// the extension is .json). The resolved scenario has every default filled
/// in.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let is_json = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("json"))
        .unwrap_or(false);

    let toml_value: toml::Value = if is_json {
        let json: serde_json::Value = serde_json::from_str(&text)
            .with_context(|| format!("parsing JSON {}", path.display()))?;
        let as_toml = toml::to_string(&json).context("converting JSON config")?;
        toml::from_str(&as_toml).context("converting JSON config")?
    } else {
        toml::from_str(&text).with_context(|| format!("parsing TOML {}", path.display()))?
    };

    let kind = detect_kind(&toml_value)?;
    let scenario = match kind {
        ScenarioKind::Trap => Scenario::Trap(toml_value.try_into()?),
        ScenarioKind::Cool => Scenario::Cool(toml_value.try_into()?),
        ScenarioKind::Flop => Scenario::Flop(toml_value.try_into()?),
        ScenarioKind::Cat => Scenario::Cat(toml_value.try_into()?),
        ScenarioKind::Wigner => Scenario::Wigner(toml_value.try_into()?),
        ScenarioKind::Densmat => Scenario::Densmat(toml_value.try_into()?),
        ScenarioKind::Cngate => Scenario::Cngate(toml_value.try_into()?),
        ScenarioKind::Register => Scenario::Register(toml_value.try_into()?),
        ScenarioKind::Ramsey => Scenario::Ramsey(toml_value.try_into()?),
    };
    scenario.validate()?;
    Ok(scenario)
}
