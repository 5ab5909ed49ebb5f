//! State propagation under a (generally non-Hermitian) Hamiltonian and the
//! closed-form upper bound on the decaying component.

use crate::ewa::{self, EwaError};
use crate::linalg::{C64, ComplexMatrix, ComplexVector, LinalgError, expm};
use crate::model::{BlockSystem, ModelError};

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Ewa(#[from] EwaError),
    #[error("invalid time grid: {0}")]
    BadTimes(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// A propagated state history with per-step norms. For full-space
/// trajectories `norms_a` and `norms_b` split the Euclidean norm across the
/// `A` and `B` blocks; `B`-subspace trajectories have `norms_a` identically
/// zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ComplexVector>,
    pub norms_full: Vec<f64>,
    pub norms_a: Vec<f64>,
    pub norms_b: Vec<f64>,
}

pub(crate) fn check_times(times: &[f64]) -> Result<(), DynamicsError> {
    if times.is_empty() {
        return Err(DynamicsError::BadTimes("time grid is empty".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(DynamicsError::BadTimes("non-finite time".into()));
    }
    if times[0] != 0.0 {
        return Err(DynamicsError::BadTimes(format!(
            "grid must start at 0, got {}",
            times[0]
        )));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DynamicsError::BadTimes(
            "times must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Propagate `psi0` to each grid time as `e^{-i H t} psi0`.
///
/// For a time-independent generator the per-interval propagators compose
/// exactly, so each interval reuses the previous matrix exponential whenever
/// the step repeats (the uniform-grid case costs a single `expm`).
/// `dim_a` tells the norm bookkeeping where the `A` block ends; pass 0 for
/// subspace trajectories.
pub fn evolve(
    h: &ComplexMatrix,
    psi0: &ComplexVector,
    times: &[f64],
    dim_a: usize,
) -> Result<Trajectory, DynamicsError> {
    h.ensure_square()?;
    h.ensure_finite()?;
    if h.rows() != psi0.dim() {
        return Err(DynamicsError::Dimension(format!(
            "H is {}x{} but the state has dimension {}",
            h.rows(),
            h.cols(),
            psi0.dim()
        )));
    }
    if dim_a > psi0.dim() {
        return Err(DynamicsError::Dimension(format!(
            "dim_a = {dim_a} exceeds the state dimension {}",
            psi0.dim()
        )));
    }
    check_times(times)?;

    let mut states = Vec::with_capacity(times.len());
    states.push(psi0.clone());
    let mut propagator: Option<(f64, ComplexMatrix)> = None;
    for k in 1..times.len() {
        let dt = times[k] - times[k - 1];
        let reuse = matches!(&propagator, Some((prev, _)) if (prev - dt).abs() <= 1e-12 * dt.max(*prev));
        if !reuse {
            let u = expm(&h.scale(C64::new(0.0, -dt)))?;
            propagator = Some((dt, u));
        }
        let (_, u) = propagator.as_ref().unwrap();
        let next = u.mul_vec(states.last().unwrap());
        states.push(next);
    }

    let norms_full: Vec<f64> = states.iter().map(|s| s.norm()).collect();
    let norms_a: Vec<f64> = states.iter().map(|s| s.segment(0, dim_a).norm()).collect();
    let norms_b: Vec<f64> = states
        .iter()
        .map(|s| s.segment(dim_a, s.dim() - dim_a).norm())
        .collect();
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        norms_full,
        norms_a,
        norms_b,
    })
}

/// Propagate a `B`-subspace state under the effective Hamiltonian
/// `B - i D_B`.
pub fn evolve_ewa(
    sys: &BlockSystem,
    psi_b0: &ComplexVector,
    times: &[f64],
) -> Result<Trajectory, DynamicsError> {
    if psi_b0.dim() != sys.dim_b {
        return Err(DynamicsError::Dimension(format!(
            "B-subspace state has dimension {}, expected dim_B = {}",
            psi_b0.dim(),
            sys.dim_b
        )));
    }
    let eff = ewa::hb_ewa(sys)?;
    evolve(&eff.matrix, psi_b0, times, 0)
}

/// Upper estimate for the norm of the decaying component at time `t`:
/// per decaying level
///
/// ```text
/// bound_n = e^{-Gamma_n t} |psi_A,n(0)|
///         + (1 - e^{-Gamma_n t}) / |Gamma_n + i omega_n| * sum_m |c_nm|
/// ```
///
/// combined across levels in Euclidean norm. `psi0` is the full-space initial
/// state; its first `dim_a` entries are the `A` amplitudes.
pub fn psi_a_bound(sys: &BlockSystem, psi0: &ComplexVector, t: f64) -> Result<f64, DynamicsError> {
    sys.validated()?;
    if psi0.dim() != sys.dim_total() {
        return Err(DynamicsError::Dimension(format!(
            "state has dimension {}, expected {}",
            psi0.dim(),
            sys.dim_total()
        )));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(DynamicsError::BadTimes(format!("t must be >= 0, got {t}")));
    }
    let mut sum_sq = 0.0;
    for n in 0..sys.dim_a {
        let gamma = sys.gammas_a[n];
        let omega = sys.omegas_a[n];
        let decay = (-gamma * t).exp();
        let row_sum: f64 = (0..sys.dim_b).map(|m| sys.c_block.get(n, m).norm()).sum();
        let denom = (gamma * gamma + omega * omega).sqrt();
        let driven = if denom < 1e-14 {
            // Gamma = omega = 0 limit of the driving integral.
            t * row_sum
        } else {
            (1.0 - decay) / denom * row_sum
        };
        let bound_n = decay * psi0.get(n).norm() + driven;
        sum_sq += bound_n * bound_n;
    }
    Ok(sum_sq.sqrt())
}
