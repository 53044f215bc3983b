//! Hilbert-space foundation: the truncated harmonic oscillator, the
//! three-level internal system, hybrid states, and motional density matrices.
//!
//! Everything downstream (pulses, protocols, tomography) is built on the
//! types here. All constructors normalize; all operators act on the retained
//! space `n = 0..=n_max` only.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;

/// Norm and hermiticity tolerance for state-level invariants.
pub const NORM_TOL: f64 = 1e-10;
/// Probability mass allowed beyond the truncation boundary.
pub const TRUNCATION_TOL: f64 = 1e-6;
/// Levels below `n_max` that must stay essentially unpopulated.
pub const DEFAULT_HEADROOM: usize = 5;

/// Truncated oscillator space retaining `n = 0..=n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    n_max: usize,
}

impl FockSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::invalid("n_max", "must be >= 1"));
        }
        Ok(FockSpace { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Dimension of the retained motional space, `n_max + 1`.
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// Lowering operator: a|n> = sqrt(n)|n-1>, exact on the retained space.
    pub fn lowering(&self) -> DMatrix<C64> {
        let d = self.dim();
        let mut a = DMatrix::zeros(d, d);
        for n in 1..d {
            a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
        }
        a
    }

    /// Raising operator, the adjoint of [`Self::lowering`].
    pub fn raising(&self) -> DMatrix<C64> {
        self.lowering().adjoint()
    }

    /// Number operator a†a.
    pub fn number(&self) -> DMatrix<C64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(i as f64, 0.0)
            } else {
                C64::ZERO
            }
        })
    }
}

/// Internal electronic levels. `Down`/`Up` form the spin-1/2 qubit
/// (sigma_z = -1/+1); `Aux` is the auxiliary level used by the conditional
/// gate and carries no sigma_z eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InternalLevel {
    Down,
    Up,
    Aux,
}

/// All three levels, in storage order.
pub const LEVELS: [InternalLevel; 3] = [InternalLevel::Down, InternalLevel::Up, InternalLevel::Aux];

impl InternalLevel {
    pub fn index(self) -> usize {
        match self {
            InternalLevel::Down => 0,
            InternalLevel::Up => 1,
            InternalLevel::Aux => 2,
        }
    }

    /// sigma_z eigenvalue; `None` for the auxiliary level, which is excluded
    /// from spin-1/2 operations.
    pub fn sigma_z(self) -> Option<f64> {
        match self {
            InternalLevel::Down => Some(-1.0),
            InternalLevel::Up => Some(1.0),
            InternalLevel::Aux => None,
        }
    }
}

/// Pure state of the internal ⊗ motional system.
///
/// Amplitudes are stored as a `(n_max+1) x 3` matrix: row `n` is the Fock
/// level, column `l` the internal level (order Down, Up, Aux). The auxiliary
/// column is carried even when unused so gate code can index uniformly.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    amps: DMatrix<C64>,
    n_max: usize,
}

impl HybridState {
    /// Basis state |level>|n>.
    pub fn basis(level: InternalLevel, n: usize, space: FockSpace) -> Result<Self> {
        if n > space.n_max() {
            return Err(Error::Headroom {
                required: n,
                n_max: space.n_max(),
            });
        }
        let mut amps = DMatrix::zeros(space.dim(), 3);
        amps[(n, level.index())] = C64::ONE;
        Ok(HybridState {
            amps,
            n_max: space.n_max(),
        })
    }

    /// |level> ⊗ |alpha>, the coherent state embedded at one internal level.
    pub fn coherent(level: InternalLevel, alpha: C64, space: FockSpace) -> Result<Self> {
        let motional = coherent_amplitudes(alpha, space)?;
        Ok(Self::from_motional(level, &motional, space))
    }

    /// Embed a normalized motional amplitude vector at one internal level.
    pub fn from_motional(level: InternalLevel, motional: &DVector<C64>, space: FockSpace) -> Self {
        assert_eq!(motional.len(), space.dim(), "motional vector length");
        let mut amps = DMatrix::zeros(space.dim(), 3);
        amps.set_column(level.index(), motional);
        let mut state = HybridState {
            amps,
            n_max: space.n_max(),
        };
        state.renormalize();
        state
    }

    /// Build from a raw amplitude matrix (rows = Fock level, columns = internal
    /// level). Normalizes; errors on an all-zero input.
    pub fn from_amplitudes(amps: DMatrix<C64>) -> Result<Self> {
        if amps.ncols() != 3 || amps.nrows() < 2 {
            return Err(Error::invalid("amps", "expected (n_max+1) x 3 with n_max >= 1"));
        }
        let norm = amps.norm();
        if norm < 1e-300 {
            return Err(Error::invalid("amps", "zero state"));
        }
        let n_max = amps.nrows() - 1;
        let mut state = HybridState { amps, n_max };
        state.renormalize();
        Ok(state)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn space(&self) -> FockSpace {
        FockSpace { n_max: self.n_max }
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn amplitude(&self, level: InternalLevel, n: usize) -> C64 {
        self.amps[(n, level.index())]
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.amps
    }

    pub(crate) fn renormalize(&mut self) {
        let norm = self.amps.norm();
        if (norm - 1.0).abs() > f64::EPSILON {
            self.amps /= C64::new(norm, 0.0);
        }
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// <self|other>.
    pub fn inner(&self, other: &HybridState) -> Result<C64> {
        if self.n_max != other.n_max {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |<self|other>|².
    pub fn overlap(&self, other: &HybridState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Total population of one internal level.
    pub fn level_population(&self, level: InternalLevel) -> f64 {
        self.amps.column(level.index()).norm_squared()
    }

    /// P_n summed over internal levels.
    pub fn motional_populations(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|n| self.amps.row(n).iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }

    /// Mean motional occupation <n>.
    pub fn mean_n(&self) -> f64 {
        self.motional_populations()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// Motional amplitude vector of one internal level (not normalized).
    pub fn motional_branch(&self, level: InternalLevel) -> DVector<C64> {
        DVector::from(self.amps.column(level.index()))
    }

    /// Population in levels above `n_max - headroom`. The invariant keeps
    /// this below [`TRUNCATION_TOL`].
    pub fn tail_population(&self, headroom: usize) -> f64 {
        let start = self.n_max.saturating_sub(headroom) + 1;
        (start..=self.n_max)
            .map(|n| self.amps.row(n).iter().map(|a| a.norm_sqr()).sum::<f64>())
            .sum()
    }

    /// Log a warning if population has crept up against the truncation edge.
    pub(crate) fn warn_if_truncated(&self, context: &str) {
        let tail = self.tail_population(DEFAULT_HEADROOM);
        if tail > TRUNCATION_TOL {
            log::warn!(
                "{context}: population {tail:.3e} within {DEFAULT_HEADROOM} levels of n_max = {}",
                self.n_max
            );
        }
    }

    /// Trace out the internal level, producing the reduced motional density
    /// matrix.
    pub fn motional_density_matrix(&self) -> MotionalDensityMatrix {
        let d = self.dim();
        let mut rho = DMatrix::zeros(d, d);
        for l in 0..3 {
            let col = self.amps.column(l);
            for i in 0..d {
                for j in 0..d {
                    rho[(i, j)] += col[i] * col[j].conj();
                }
            }
        }
        MotionalDensityMatrix { elements: rho }
    }
}

/// Hermitian, unit-trace density matrix in the number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionalDensityMatrix {
    elements: DMatrix<C64>,
}

impl MotionalDensityMatrix {
    /// Validate and wrap a number-basis matrix: Hermitian and unit trace
    /// within 1e-10, diagonal real and >= -1e-10.
    pub fn new(elements: DMatrix<C64>) -> Result<Self> {
        if elements.nrows() != elements.ncols() {
            return Err(Error::DimensionMismatch {
                left: elements.nrows(),
                right: elements.ncols(),
            });
        }
        let d = elements.nrows();
        for i in 0..d {
            let diag = elements[(i, i)];
            if diag.im.abs() > NORM_TOL || diag.re < -NORM_TOL {
                return Err(Error::invalid(
                    "elements",
                    format!("diagonal entry {i} = {diag} not real nonnegative"),
                ));
            }
            for j in (i + 1)..d {
                let delta = elements[(i, j)] - elements[(j, i)].conj();
                if delta.norm() > NORM_TOL {
                    return Err(Error::invalid(
                        "elements",
                        format!("not Hermitian at ({i},{j}): asymmetry {:.3e}", delta.norm()),
                    ));
                }
            }
        }
        let trace: C64 = (0..d).map(|i| elements[(i, i)]).sum();
        if (trace.re - 1.0).abs() > NORM_TOL || trace.im.abs() > NORM_TOL {
            return Err(Error::invalid(
                "elements",
                format!("trace {trace} differs from 1"),
            ));
        }
        Ok(MotionalDensityMatrix { elements })
    }

    /// |psi><psi| for a motional amplitude vector (renormalized).
    pub fn from_pure(motional: &DVector<C64>) -> Result<Self> {
        let norm = motional.norm();
        if norm < 1e-300 {
            return Err(Error::invalid("motional", "zero vector"));
        }
        let psi = motional / C64::new(norm, 0.0);
        let d = psi.len();
        let elements = DMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj());
        Ok(MotionalDensityMatrix { elements })
    }

    /// Fock state |n><n|.
    pub fn fock(n: usize, space: FockSpace) -> Result<Self> {
        if n > space.n_max() {
            return Err(Error::Headroom {
                required: n,
                n_max: space.n_max(),
            });
        }
        let mut v = DVector::zeros(space.dim());
        v[n] = C64::ONE;
        Self::from_pure(&v)
    }

    /// Wrap without validation. Used internally where the construction
    /// guarantees the invariants.
    pub(crate) fn from_matrix_unchecked(elements: DMatrix<C64>) -> Self {
        MotionalDensityMatrix { elements }
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn n_max(&self) -> usize {
        self.dim() - 1
    }

    pub fn element(&self, i: usize, j: usize) -> C64 {
        self.elements[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.elements
    }

    /// Diagonal populations P_n.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.elements[(n, n)].re).collect()
    }

    pub fn mean_n(&self) -> f64 {
        self.populations()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// Tr(rho²).
    pub fn purity(&self) -> f64 {
        self.elements
            .iter()
            .zip(self.elements.transpose().iter())
            .map(|(a, b)| (a * b).re)
            .sum::<f64>()
    }
}

/// Number-basis amplitudes of the coherent state |alpha>: the amplitude on
/// |n> is exp(-|alpha|²/2) alphaⁿ/sqrt(n!), renormalized on the retained
/// space (the correction is bounded by the truncation tolerance).
pub fn coherent_amplitudes(alpha: C64, space: FockSpace) -> Result<DVector<C64>> {
    let nbar = alpha.norm_sqr();
    if nbar > space.n_max() as f64 / 3.0 {
        return Err(Error::invalid(
            "alpha",
            format!(
                "|alpha|² = {nbar:.3} exceeds n_max/3 = {:.3}",
                space.n_max() as f64 / 3.0
            ),
        ));
    }
    let d = space.dim();
    let mut amps = DVector::zeros(d);
    let prefactor = (-nbar / 2.0).exp();
    let mut term = C64::new(prefactor, 0.0);
    amps[0] = term;
    for n in 1..d {
        term *= alpha / C64::new((n as f64).sqrt(), 0.0);
        amps[n] = term;
    }
    let retained = amps.norm_squared();
    let tail = (1.0 - retained).max(0.0);
    if tail > TRUNCATION_TOL {
        return Err(Error::Truncation {
            n_max: space.n_max(),
            tail,
            tolerance: TRUNCATION_TOL,
        });
    }
    amps /= C64::new(retained.sqrt(), 0.0);
    Ok(amps)
}

/// Displacement operator D(alpha) = exp(alpha a† - alpha* a) on the retained
/// space, computed spectrally so it is unitary by construction. Column 0 is
/// the coherent state |alpha>.
pub fn displacement_matrix(alpha: C64, space: FockSpace) -> Result<DMatrix<C64>> {
    let nbar = alpha.norm_sqr();
    if nbar > space.n_max() as f64 / 3.0 {
        return Err(Error::invalid(
            "alpha",
            format!(
                "|alpha|² = {nbar:.3} exceeds n_max/3 = {:.3}",
                space.n_max() as f64 / 3.0
            ),
        ));
    }
    let a = space.lowering();
    let adag = space.raising();
    let generator = &adag * alpha - &a * alpha.conj();
    // generator is anti-Hermitian; exp(generator) = exp(i * (-i generator))
    let h = generator.map(|z| z * C64::new(0.0, -1.0));
    Ok(linalg::unitary_exp_i(&h))
}

/// Fidelity between density matrices. For a pure argument this is the usual
/// overlap <psi|rho|psi>; in general the Uhlmann form
/// (Tr sqrt(sqrt(a) b sqrt(a)))².
pub fn fidelity(a: &MotionalDensityMatrix, b: &MotionalDensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    const PURITY_TOL: f64 = 1e-6;
    let pure_overlap = |pure: &MotionalDensityMatrix, other: &MotionalDensityMatrix| -> f64 {
        let (vals, vecs) = linalg::hermitian_eigen(pure.matrix());
        let imax = vals.imax();
        let psi = vecs.column(imax);
        let mut f = C64::ZERO;
        for i in 0..pure.dim() {
            for j in 0..pure.dim() {
                f += psi[i].conj() * other.element(i, j) * psi[j];
            }
        }
        f.re.clamp(0.0, 1.0)
    };
    if (b.purity() - 1.0).abs() < PURITY_TOL {
        return Ok(pure_overlap(b, a));
    }
    if (a.purity() - 1.0).abs() < PURITY_TOL {
        return Ok(pure_overlap(a, b));
    }
    let sqrt_a = linalg::hermitian_sqrt(a.matrix());
    let inner = &sqrt_a * b.matrix() * &sqrt_a;
    // hermitize against roundoff before taking the square root
    let inner = (&inner + inner.adjoint()) * C64::new(0.5, 0.0);
    let (vals, _) = linalg::hermitian_eigen(&inner);
    let root_sum: f64 = vals.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}
