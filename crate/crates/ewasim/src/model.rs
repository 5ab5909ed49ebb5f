//! The block-structured system: a decaying subspace `A` with diagonal complex
//! energies, a Hermitian subspace `B`, and the coupling block `C` between
//! them. Basis ordering is `A` states first, then `B` states, so the full
//! Hamiltonian is `[[A, C], [C^H, B]]` with `A = diag(omega_n - i Gamma_n)`.
//!
//! In the two-level-`B` presets the `B` basis states are labelled `|1>` and
//! `|2>` (bare energies 0 and 1) and the `A` states `|3>`, `|4>`.

use crate::linalg::{C64, ComplexMatrix, ComplexVector};
use serde::{Deserialize, Serialize};

/// Hermiticity tolerance for the `B` block.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// A block non-Hermitian system. The `A` block is strictly diagonal by
/// construction: only its diagonal data (`omegas_a`, `gammas_a`) is stored,
/// so a non-diagonal `A` is unrepresentable.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSystem {
    pub dim_a: usize,
    pub dim_b: usize,
    /// Bare energies of the decaying levels (units of epsilon).
    pub omegas_a: Vec<f64>,
    /// Decay rates of the decaying levels, all non-negative.
    pub gammas_a: Vec<f64>,
    /// Hermitian block on `B`, including the internal coupling `g`.
    pub b_block: ComplexMatrix,
    /// Coupling block, `dim_a x dim_b`, entries `c_nm`.
    pub c_block: ComplexMatrix,
}

/// A single invariant violation found by [`BlockSystem::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonHermitianB { row: usize, col: usize, defect: f64 },
    NegativeGamma { index: usize, value: f64 },
    DimensionMismatch { what: String },
    NonFinite { what: String },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NonHermitianB { row, col, defect } => write!(
                f,
                "B is not Hermitian at ({row}, {col}): |B_ij - conj(B_ji)| = {defect:.3e}"
            ),
            Violation::NegativeGamma { index, value } => {
                write!(f, "decay rate Gamma_{index} is negative ({value})")
            }
            Violation::DimensionMismatch { what } => write!(f, "dimension mismatch: {what}"),
            Violation::NonFinite { what } => write!(f, "non-finite value in {what}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid system: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("p_A must lie in [0, 1], got {0}")]
    BadInitialWeight(f64),
    #[error("the (p_A, theta) initial form requires dim_B = 2, got dim_B = {0}")]
    BadInitialDims(usize),
    #[error("initial amplitude list has {got} entries, expected {expected}")]
    AmplitudeLength { got: usize, expected: usize },
    #[error("initial amplitudes have zero norm")]
    ZeroAmplitudes,
    #[error("non-finite initial-state parameter")]
    NonFiniteInitial,
    #[error("invalid time grid: {0}")]
    BadGrid(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl BlockSystem {
    /// Assemble a system, inferring dimensions from the field shapes.
    pub fn new(
        omegas_a: Vec<f64>,
        gammas_a: Vec<f64>,
        b_block: ComplexMatrix,
        c_block: ComplexMatrix,
    ) -> Self {
        Self {
            dim_a: omegas_a.len(),
            dim_b: b_block.rows(),
            omegas_a,
            gammas_a,
            b_block,
            c_block,
        }
    }

    pub fn dim_total(&self) -> usize {
        self.dim_a + self.dim_b
    }

    /// Collect every invariant violation; an empty list means the system is
    /// well-formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.dim_a == 0 || self.dim_b == 0 {
            out.push(Violation::DimensionMismatch {
                what: format!("dim_A = {} and dim_B = {} must be >= 1", self.dim_a, self.dim_b),
            });
        }
        if self.omegas_a.len() != self.dim_a {
            out.push(Violation::DimensionMismatch {
                what: format!(
                    "omegas_A has {} entries, expected dim_A = {}",
                    self.omegas_a.len(),
                    self.dim_a
                ),
            });
        }
        if self.gammas_a.len() != self.dim_a {
            out.push(Violation::DimensionMismatch {
                what: format!(
                    "gammas_A has {} entries, expected dim_A = {}",
                    self.gammas_a.len(),
                    self.dim_a
                ),
            });
        }
        if self.b_block.rows() != self.dim_b || self.b_block.cols() != self.dim_b {
            out.push(Violation::DimensionMismatch {
                what: format!(
                    "B is {}x{}, expected {}x{}",
                    self.b_block.rows(),
                    self.b_block.cols(),
                    self.dim_b,
                    self.dim_b
                ),
            });
        }
        if self.c_block.rows() != self.dim_a || self.c_block.cols() != self.dim_b {
            out.push(Violation::DimensionMismatch {
                what: format!(
                    "C is {}x{}, expected {}x{}",
                    self.c_block.rows(),
                    self.c_block.cols(),
                    self.dim_a,
                    self.dim_b
                ),
            });
        }
        if self.omegas_a.iter().any(|x| !x.is_finite()) {
            out.push(Violation::NonFinite { what: "omegas_A".into() });
        }
        if self.gammas_a.iter().any(|x| !x.is_finite()) {
            out.push(Violation::NonFinite { what: "gammas_A".into() });
        }
        if !self.b_block.all_finite() {
            out.push(Violation::NonFinite { what: "B".into() });
        }
        if !self.c_block.all_finite() {
            out.push(Violation::NonFinite { what: "C".into() });
        }
        for (index, &value) in self.gammas_a.iter().enumerate() {
            if value.is_finite() && value < 0.0 {
                out.push(Violation::NegativeGamma { index, value });
            }
        }
        if self.b_block.is_square() && self.b_block.all_finite() {
            for i in 0..self.b_block.rows() {
                for j in i..self.b_block.cols() {
                    let defect =
                        (self.b_block.get(i, j) - self.b_block.get(j, i).conj()).norm();
                    if defect > HERMITICITY_TOL {
                        out.push(Violation::NonHermitianB { row: i, col: j, defect });
                    }
                }
            }
        }
        out
    }

    /// `Ok(())` when [`Self::validate`] reports nothing.
    pub fn validated(&self) -> Result<(), ModelError> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ModelError::Invalid(violations))
        }
    }

    /// The diagonal `A` block, `diag(omega_n - i Gamma_n)`.
    pub fn a_block(&self) -> ComplexMatrix {
        let entries: Vec<C64> = self
            .omegas_a
            .iter()
            .zip(&self.gammas_a)
            .map(|(&w, &g)| C64::new(w, -g))
            .collect();
        ComplexMatrix::diagonal(&entries)
    }

    /// The uncoupled part `H_0 = diag(A, B)`.
    pub fn h0(&self) -> ComplexMatrix {
        let n = self.dim_total();
        let mut h = ComplexMatrix::zeros(n, n);
        h.set_block(0, 0, &self.a_block());
        h.set_block(self.dim_a, self.dim_a, &self.b_block);
        h
    }

    /// Full Hamiltonian `[[A, C], [C^H, B]]`. Fails on an invalid system.
    pub fn full_hamiltonian(&self) -> Result<ComplexMatrix, ModelError> {
        self.validated()?;
        let mut h = self.h0();
        h.set_block(0, self.dim_a, &self.c_block);
        h.set_block(self.dim_a, 0, &self.c_block.adjoint());
        Ok(h)
    }

    /// Diagonal 0/1 projector onto the `B` subspace.
    pub fn projector_b(&self) -> ComplexMatrix {
        let n = self.dim_total();
        ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j && i >= self.dim_a {
                C64::ONE
            } else {
                C64::ZERO
            }
        })
    }

    /// Smallest decay rate, if any level decays.
    pub fn min_gamma(&self) -> Option<f64> {
        self.gammas_a
            .iter()
            .copied()
            .filter(|g| *g > 0.0)
            .fold(None, |acc, g| Some(acc.map_or(g, |a: f64| a.min(g))))
    }

    pub fn max_gamma(&self) -> f64 {
        self.gammas_a.iter().copied().fold(0.0, f64::max)
    }
}

/// Initial-state description: either the two-parameter preset form
/// `p_A |3> + sqrt(1 - p_A) (cos(theta) |2> + sin(theta) |1>)` or an explicit
/// full-space amplitude list. Both are renormalized to unit norm.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    WeightAngle { p_a: f64, theta: f64 },
    Amplitudes(Vec<C64>),
}

/// Axis specification for a decay-rate sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: String,
    pub values: Vec<f64>,
}

/// A runnable simulation unit: system, initial state, time grid, and the
/// coarse-graining parameters used by the window-integral evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub system: BlockSystem,
    pub initial: InitialState,
    /// End of the time grid (units of 1/epsilon).
    pub t_max: f64,
    /// Number of grid steps; the grid has `n_steps + 1` points including 0.
    pub n_steps: usize,
    pub label: String,
    /// Coarse-graining window as a multiple of `1 / min Gamma`.
    pub delta_t_factor: f64,
    /// Simpson panel count for the window integrals.
    pub quadrature_n: usize,
    pub sweep: Option<SweepSpec>,
}

impl Scenario {
    /// Uniform grid `0, dt, ..., t_max` with `n_steps + 1` points.
    pub fn times(&self) -> Vec<f64> {
        let step = self.t_max / self.n_steps as f64;
        (0..=self.n_steps).map(|k| k as f64 * step).collect()
    }

    pub fn validated(&self) -> Result<(), ModelError> {
        self.system.validated()?;
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(ModelError::BadGrid(format!("t_max must be > 0, got {}", self.t_max)));
        }
        if self.n_steps < 2 {
            return Err(ModelError::BadGrid(format!(
                "n_steps must be >= 2, got {}",
                self.n_steps
            )));
        }
        Ok(())
    }

    /// Unit-norm initial state in the full `A + B` space.
    pub fn initial_state(&self) -> Result<ComplexVector, ModelError> {
        initial_state(&self.system, &self.initial)
    }
}

/// Build the unit-norm initial state for a system.
///
/// The preset form places `p_A` on the first `A` level, `sqrt(1-p_A) sin(theta)`
/// on `|1>` and `sqrt(1-p_A) cos(theta)` on `|2>`, then renormalizes: the raw
/// amplitudes have norm `sqrt(p_A^2 + 1 - p_A) != 1` for `p_A` strictly inside
/// (0, 1), and the fidelity functionals carry explicit normalization factors,
/// so overall scale is immaterial.
pub fn initial_state(sys: &BlockSystem, initial: &InitialState) -> Result<ComplexVector, ModelError> {
    sys.validated()?;
    let n = sys.dim_total();
    match initial {
        InitialState::WeightAngle { p_a, theta } => {
            if !(p_a.is_finite() && theta.is_finite()) {
                return Err(ModelError::NonFiniteInitial);
            }
            if !(0.0..=1.0).contains(p_a) {
                return Err(ModelError::BadInitialWeight(*p_a));
            }
            if sys.dim_b != 2 {
                return Err(ModelError::BadInitialDims(sys.dim_b));
            }
            let mut v = ComplexVector::zeros(n);
            let w = (1.0 - p_a).sqrt();
            v.set(0, C64::new(*p_a, 0.0));
            v.set(sys.dim_a, C64::new(w * theta.sin(), 0.0)); // |1>
            v.set(sys.dim_a + 1, C64::new(w * theta.cos(), 0.0)); // |2>
            Ok(v.normalized().expect("p_A in [0,1] gives a nonzero norm"))
        }
        InitialState::Amplitudes(amps) => {
            if amps.len() != n {
                return Err(ModelError::AmplitudeLength { got: amps.len(), expected: n });
            }
            let v = ComplexVector::new(amps.clone());
            if !v.all_finite() {
                return Err(ModelError::NonFiniteInitial);
            }
            v.normalized().ok_or(ModelError::ZeroAmplitudes)
        }
    }
}
