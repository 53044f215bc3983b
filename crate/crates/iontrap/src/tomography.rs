//! State reconstruction from coherently displaced populations: the
//! quasiprobability family F(α, s), Wigner sampling, and number-basis
//! density-matrix recovery by linear least squares.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fockspace::{displacement_matrix, FockSpace, MotionalDensityMatrix};
use crate::linalg;

/// Number-state populations of a coherently displaced state.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacedPopulations {
    alpha: C64,
    q: Vec<f64>,
}

impl DisplacedPopulations {
    pub fn new(alpha: C64, q: Vec<f64>) -> Result<Self> {
        if q.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::invalid("q", "entries must lie in [0, 1]"));
        }
        let total: f64 = q.iter().sum();
        if total > 1.0 + 1e-9 {
            return Err(Error::invalid(
                "q",
                format!("populations sum to {total} > 1"),
            ));
        }
        Ok(DisplacedPopulations { alpha, q })
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }
}

/// Phase-space sampling grid: each radius carries uniformly spaced phases on
/// [0, 2π).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceGrid {
    radii: Vec<f64>,
    phases_per_radius: usize,
}

impl PhaseSpaceGrid {
    pub fn new(radii: Vec<f64>, phases_per_radius: usize) -> Result<Self> {
        if radii.is_empty() || phases_per_radius == 0 {
            return Err(Error::invalid("grid", "radii and phases must be nonempty"));
        }
        for pair in radii.windows(2) {
            if pair[1] <= pair[0] || pair[1].is_nan() || pair[0].is_nan() {
                return Err(Error::invalid("radii", "must be strictly increasing"));
            }
        }
        if radii[0] <= 0.0 {
            return Err(Error::invalid("radii", "must be positive"));
        }
        Ok(PhaseSpaceGrid {
            radii,
            phases_per_radius,
        })
    }

    /// Radii {0.4, 0.8, ..., 2.4} with eight phases each.
    pub fn default_grid() -> Self {
        PhaseSpaceGrid {
            radii: (1..=6).map(|i| 0.4 * i as f64).collect(),
            phases_per_radius: 8,
        }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn phases_per_radius(&self) -> usize {
        self.phases_per_radius
    }

    /// Grid points ordered by radius, then phase.
    pub fn points(&self) -> Vec<C64> {
        let mut points = Vec::with_capacity(self.radii.len() * self.phases_per_radius);
        for &r in &self.radii {
            for k in 0..self.phases_per_radius {
                let phase = 2.0 * std::f64::consts::PI * k as f64 / self.phases_per_radius as f64;
                points.push(C64::from_polar(r, phase));
            }
        }
        points
    }
}

/// Populations Q_k = <k| D(-α) ρ D(-α)† |k> of the displaced state.
pub fn displaced_populations(
    rho: &MotionalDensityMatrix,
    alpha: C64,
) -> Result<DisplacedPopulations> {
    let space = FockSpace::new(rho.n_max())?;
    let d = displacement_matrix(-alpha, space)?;
    let displaced = &d * rho.matrix() * d.adjoint();
    let q: Vec<f64> = (0..rho.dim())
        .map(|k| {
            let v = displaced[(k, k)].re;
            if v < -1e-10 {
                v // caught below
            } else {
                v.max(0.0)
            }
        })
        .collect();
    if let Some(bad) = q.iter().find(|v| **v < 0.0) {
        return Err(Error::Inconsistent(format!(
            "negative displaced population {bad:.3e}"
        )));
    }
    DisplacedPopulations::new(alpha, q)
}

/// Largest order of the outer quasiprobability sum; f64 binomials stay
/// exact below this.
pub const MAX_QUASIPROBABILITY_ORDER: usize = 60;

/// Quasiprobability F(α, s) = (1/π) Σ_n [(s+1)/2]^n Σ_k (-1)^k C(n,k) Q_k,
/// summed to order `n_sum`. Returns the value and the magnitude of the last
/// retained n-shell as a truncation estimate.
pub fn quasiprobability(q: &DisplacedPopulations, s: f64, n_sum: usize) -> Result<(f64, f64)> {
    if !(-1.0..=0.0).contains(&s) {
        return Err(Error::invalid("s", format!("must be in [-1, 0], got {s}")));
    }
    if n_sum > MAX_QUASIPROBABILITY_ORDER {
        return Err(Error::invalid(
            "n_sum",
            format!("binomial accuracy requires n_sum <= {MAX_QUASIPROBABILITY_ORDER}"),
        ));
    }
    let base = (s + 1.0) / 2.0;
    let mut total = 0.0;
    let mut last_shell = 0.0;
    let mut binomials = vec![1.0f64]; // row n of Pascal's triangle
    let mut weight = 1.0; // base^n
    for n in 0..=n_sum {
        let inner: f64 = q
            .q
            .iter()
            .take(n + 1)
            .enumerate()
            .map(|(k, qk)| if k % 2 == 0 { binomials[k] * qk } else { -binomials[k] * qk })
            .sum();
        let shell = weight * inner / std::f64::consts::PI;
        total += shell;
        last_shell = shell.abs();
        // advance Pascal row and the geometric weight
        let mut next = vec![1.0; n + 2];
        for k in 1..=n {
            next[k] = binomials[k - 1] + binomials[k];
        }
        binomials = next;
        weight *= base;
        if base == 0.0 && n == 0 {
            break; // s = -1: single term
        }
    }
    Ok((total, last_shell))
}

/// Wigner value W(α) = (2/π) Σ_n (-1)^n Q_n(α) — the displaced parity.
pub fn wigner(q: &DisplacedPopulations) -> f64 {
    let parity: f64 = q
        .q
        .iter()
        .enumerate()
        .map(|(n, qn)| if n % 2 == 0 { *qn } else { -*qn })
        .sum();
    2.0 / std::f64::consts::PI * parity
}

/// Sample the Wigner function on a phase-space grid. Points come back in
/// grid order (radius-major, then phase).
pub fn wigner_map(
    rho: &MotionalDensityMatrix,
    grid: &PhaseSpaceGrid,
) -> Result<Vec<(C64, f64)>> {
    let points = grid.points();
    points
        .par_iter()
        .map(|&alpha| {
            let q = displaced_populations(rho, alpha)?;
            Ok((alpha, wigner(&q)))
        })
        .collect()
}

/// Binomially sample each displaced population from `shots` repetitions,
/// keeping the raw fractions (no renormalization).
pub fn sample_displaced_populations<R: Rng>(
    q: &DisplacedPopulations,
    shots: usize,
    rng: &mut R,
) -> Result<DisplacedPopulations> {
    if shots == 0 {
        return Err(Error::invalid("shots", "must be >= 1"));
    }
    let sampled: Vec<f64> = q
        .q
        .iter()
        .map(|&p| {
            let dist = Binomial::new(shots as u64, p.clamp(0.0, 1.0)).expect("p in [0,1]");
            dist.sample(rng) as f64 / shots as f64
        })
        .collect();
    // raw fractions may sum slightly above 1; that is expected noise, so
    // bypass the sum invariant and keep entries as measured
    Ok(DisplacedPopulations {
        alpha: q.alpha,
        q: sampled,
    })
}

/// Outcome of a least-squares density-matrix reconstruction.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    matrix: DMatrix<C64>,
    /// Eigenvalues of the reconstructed matrix, ascending. Negative entries
    /// are reported, not clipped.
    pub eigenvalues: Vec<f64>,
    pub residual_norm: f64,
    pub condition: f64,
}

impl Reconstruction {
    /// The reconstructed Hermitian, trace-1 matrix. May carry small negative
    /// eigenvalues when the data were noisy.
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Overlap <psi| rho |psi> with a pure reference state.
    pub fn overlap_with_pure(&self, psi: &DVector<C64>) -> Result<f64> {
        if psi.len() < self.dim() {
            return Err(Error::DimensionMismatch {
                left: psi.len(),
                right: self.dim(),
            });
        }
        let mut f = C64::ZERO;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                f += psi[i].conj() * self.matrix[(i, j)] * psi[j];
            }
        }
        Ok(f.re)
    }

    /// Validate into a [`MotionalDensityMatrix`]; fails if noise has pushed
    /// the matrix outside the density-matrix invariants.
    pub fn density_matrix(&self) -> Result<MotionalDensityMatrix> {
        MotionalDensityMatrix::new(self.matrix.clone())
    }
}

/// Reconstruct the number-basis density matrix (up to `n_fit`) from
/// displaced-population data by linear least squares on the Hermitian
/// parameterization (real diagonal, re/im upper triangle).
///
/// Q_k(α) = Σ_{j,l} ρ_{jl} <k|D(-α)|j> conj(<k|D(-α)|l>) is linear in ρ;
/// the trace is renormalized to 1 after the solve. Positivity is not
/// enforced; negative eigenvalues are reported in the result.
pub fn reconstruct_density_matrix(
    data: &[DisplacedPopulations],
    n_fit: usize,
    space: FockSpace,
) -> Result<Reconstruction> {
    let dim_fit = n_fit + 1;
    let params = dim_fit * dim_fit;
    let rows: usize = data.iter().map(|d| d.q.len()).sum();
    if rows < params {
        return Err(Error::FitFailure(format!(
            "{rows} data points cannot determine {params} parameters"
        )));
    }
    // grid coverage: at least two distinct radii and eight distinct phases
    let mut radii: Vec<f64> = data.iter().map(|d| d.alpha.norm()).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut phases: Vec<f64> = data
        .iter()
        .filter(|d| d.alpha.norm() > 1e-12)
        .map(|d| d.alpha.arg())
        .collect();
    phases.sort_by(f64::total_cmp);
    phases.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if radii.len() < 2 || phases.len() < 8 {
        return Err(Error::FitFailure(format!(
            "grid too sparse: {} radii, {} phases (need >= 2 and >= 8)",
            radii.len(),
            phases.len()
        )));
    }

    let mut design = DMatrix::zeros(rows, params);
    let mut target = DVector::zeros(rows);
    let mut row = 0usize;
    for d in data {
        let m = displacement_matrix(-d.alpha, space)?;
        for (k, &qk) in d.q.iter().enumerate() {
            target[row] = qk;
            // diagonal parameters
            for j in 0..dim_fit {
                design[(row, j)] = m[(k, j)].norm_sqr();
            }
            // off-diagonal parameters: ordered (j, l) pairs with j < l,
            // packed after the diagonal as (re, im) per pair
            let mut col = dim_fit;
            for j in 0..dim_fit {
                for l in (j + 1)..dim_fit {
                    let w = m[(k, j)] * m[(k, l)].conj();
                    design[(row, col)] = 2.0 * w.re;
                    design[(row, col + 1)] = -2.0 * w.im;
                    col += 2;
                }
            }
            row += 1;
        }
    }

    let ls = linalg::solve_least_squares(&design, &target, 1e10)?;

    let mut rho = DMatrix::zeros(dim_fit, dim_fit);
    for j in 0..dim_fit {
        rho[(j, j)] = C64::new(ls.solution[j], 0.0);
    }
    let mut col = dim_fit;
    for j in 0..dim_fit {
        for l in (j + 1)..dim_fit {
            let v = C64::new(ls.solution[col], ls.solution[col + 1]);
            rho[(j, l)] = v;
            rho[(l, j)] = v.conj();
            col += 2;
        }
    }
    let trace: f64 = (0..dim_fit).map(|j| rho[(j, j)].re).sum();
    if trace.abs() < 1e-12 {
        return Err(Error::FitFailure("reconstructed trace is zero".into()));
    }
    rho /= C64::new(trace, 0.0);

    let (vals, _) = linalg::hermitian_eigen(&rho);
    let mut eigenvalues: Vec<f64> = vals.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);

    Ok(Reconstruction {
        matrix: rho,
        eigenvalues,
        residual_norm: ls.residual_norm,
        condition: ls.condition,
    })
}

/// Synthesize noise-free displaced-population data for a state on a grid.
pub fn synthesize_tomography_data(
    rho: &MotionalDensityMatrix,
    grid: &PhaseSpaceGrid,
) -> Result<Vec<DisplacedPopulations>> {
    grid.points()
        .par_iter()
        .map(|&alpha| displaced_populations(rho, alpha))
        .collect()
}
