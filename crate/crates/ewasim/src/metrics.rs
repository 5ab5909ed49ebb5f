//! The three fidelity functionals comparing exact and approximate dynamics.
//!
//! Writing `|e(t)> = e^{-iHt} |psi(0)>` for the exact full-space evolution,
//! `|w(t)> = e^{-i H_B^EWA t} P_B |psi(0)>` for the effective evolution of
//! the `B` components and `|u(t)> = e^{-iBt} P_B |psi(0)>` for the uncoupled
//! one, the functionals are
//!
//! ```text
//! F_EWA(t) = |<e(t)| P_B |w(t)>| / (||P_B e(t)|| * ||w(t)||)
//! F_Z(t)   = |<e(t)| P_B |u(t)>|
//! F_ZN(t)  = |<e(t)| P_B |u(t)>| / (||P_B e(t)|| * ||u(t)||)
//! ```
//!
//! The subspace operators act on the `B` components of the full initial
//! state, embedded back with zero `A` components. Normalization denominators
//! below [`DENOM_GUARD`] mark the value undefined for that time (flagged, not
//! clamped) so fully decayed regimes stay auditable.

use crate::dynamics::{self, DynamicsError, Trajectory};
use crate::ewa::EwaError;
use crate::linalg::{C64, ComplexMatrix, ComplexVector, LinalgError, expm};
use crate::model::{BlockSystem, ModelError};

/// Threshold under which a normalization factor counts as fully decayed.
pub const DENOM_GUARD: f64 = 1e-12;

/// Flag bit: the `F_EWA` denominator was guarded at this time.
pub const FLAG_EWA_UNDEFINED: u8 = 1;
/// Flag bit: the `F_ZN` denominator was guarded at this time.
pub const FLAG_ZN_UNDEFINED: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Ewa(#[from] EwaError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("initial state must have unit norm (got {0})")]
    NotUnitNorm(f64),
    #[error("time must be finite and >= 0, got {0}")]
    BadTime(f64),
    #[error("state fully decayed at t = {t}: normalization factor {factor:.3e} below guard")]
    FullyDecayed { t: f64, factor: f64 },
    #[error("trajectory grids do not match")]
    GridMismatch,
}

/// Per-time fidelity values over a grid. Entries whose normalization was
/// guarded hold `NaN` and carry the corresponding flag bit.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelitySeries {
    pub times: Vec<f64>,
    pub f_ewa: Vec<f64>,
    pub f_z: Vec<f64>,
    pub f_zn: Vec<f64>,
    pub flags: Vec<u8>,
}

impl FidelitySeries {
    /// Smallest unflagged value of a metric column; `NaN` when none remain.
    pub fn min_unflagged(&self, values: &[f64], flag_bit: u8) -> f64 {
        values
            .iter()
            .zip(&self.flags)
            .filter(|(_, f)| *f & flag_bit == 0)
            .map(|(v, _)| *v)
            .fold(f64::NAN, f64::min)
    }

    pub fn min_f_ewa(&self) -> f64 {
        self.min_unflagged(&self.f_ewa, FLAG_EWA_UNDEFINED)
    }

    pub fn min_f_z(&self) -> f64 {
        self.min_unflagged(&self.f_z, 0)
    }

    pub fn min_f_zn(&self) -> f64 {
        self.min_unflagged(&self.f_zn, FLAG_ZN_UNDEFINED)
    }
}

fn check_inputs(sys: &BlockSystem, psi0: &ComplexVector, t: f64) -> Result<(), MetricsError> {
    sys.validated()?;
    if psi0.dim() != sys.dim_total() {
        return Err(MetricsError::Dynamics(DynamicsError::Dimension(format!(
            "state has dimension {}, expected {}",
            psi0.dim(),
            sys.dim_total()
        ))));
    }
    let norm = psi0.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(MetricsError::NotUnitNorm(norm));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(MetricsError::BadTime(t));
    }
    Ok(())
}

fn propagate(h: &ComplexMatrix, v: &ComplexVector, t: f64) -> Result<ComplexVector, MetricsError> {
    let u = expm(&h.scale(C64::new(0.0, -t)))?;
    Ok(u.mul_vec(v))
}

/// Overlap of the `B` components of `full` with the subspace vector `sub`.
fn b_overlap(full: &ComplexVector, sub: &ComplexVector, dim_a: usize) -> C64 {
    full.segment(dim_a, sub.dim()).inner(sub)
}

/// Fidelity between exact and effective dynamics at a single time.
pub fn f_ewa(sys: &BlockSystem, psi0: &ComplexVector, t: f64) -> Result<f64, MetricsError> {
    check_inputs(sys, psi0, t)?;
    let exact = propagate(&sys.full_hamiltonian()?, psi0, t)?;
    let eff = crate::ewa::hb_ewa(sys)?;
    let psi_b0 = psi0.segment(sys.dim_a, sys.dim_b);
    let approx = propagate(&eff.matrix, &psi_b0, t)?;
    let d1 = exact.segment(sys.dim_a, sys.dim_b).norm();
    let d2 = approx.norm();
    let factor = d1.min(d2);
    if factor < DENOM_GUARD {
        return Err(MetricsError::FullyDecayed { t, factor });
    }
    Ok(b_overlap(&exact, &approx, sys.dim_a).norm() / (d1 * d2))
}

/// Unnormalized overlap between exact dynamics and the uncoupled `B`
/// evolution at a single time.
pub fn f_z(sys: &BlockSystem, psi0: &ComplexVector, t: f64) -> Result<f64, MetricsError> {
    check_inputs(sys, psi0, t)?;
    let exact = propagate(&sys.full_hamiltonian()?, psi0, t)?;
    let psi_b0 = psi0.segment(sys.dim_a, sys.dim_b);
    let bare = propagate(&sys.b_block, &psi_b0, t)?;
    Ok(b_overlap(&exact, &bare, sys.dim_a).norm())
}

/// Normalized variant of [`f_z`]. The second normalization factor equals the
/// norm of the projected initial state (the uncoupled evolution is unitary on
/// `B`), so it only matters when the initial state has weight in `A`.
pub fn f_zn(sys: &BlockSystem, psi0: &ComplexVector, t: f64) -> Result<f64, MetricsError> {
    check_inputs(sys, psi0, t)?;
    let exact = propagate(&sys.full_hamiltonian()?, psi0, t)?;
    let psi_b0 = psi0.segment(sys.dim_a, sys.dim_b);
    let bare = propagate(&sys.b_block, &psi_b0, t)?;
    let d1 = exact.segment(sys.dim_a, sys.dim_b).norm();
    let d2 = bare.norm();
    let factor = d1.min(d2);
    if factor < DENOM_GUARD {
        return Err(MetricsError::FullyDecayed { t, factor });
    }
    Ok(b_overlap(&exact, &bare, sys.dim_a).norm() / (d1 * d2))
}

/// Assemble all three series from precomputed trajectories sharing one grid:
/// the exact full-space trajectory, the effective `B`-subspace trajectory,
/// and the uncoupled `B` trajectory.
pub fn fidelity_series(
    sys: &BlockSystem,
    exact: &Trajectory,
    effective_b: &Trajectory,
    bare_b: &Trajectory,
) -> Result<FidelitySeries, MetricsError> {
    let n = exact.times.len();
    if effective_b.times.len() != n
        || bare_b.times.len() != n
        || exact
            .times
            .iter()
            .zip(effective_b.times.iter().zip(&bare_b.times))
            .any(|(a, (b, c))| a != b || a != c)
    {
        return Err(MetricsError::GridMismatch);
    }
    let dim_a = sys.dim_a;
    let mut out = FidelitySeries {
        times: exact.times.clone(),
        f_ewa: Vec::with_capacity(n),
        f_z: Vec::with_capacity(n),
        f_zn: Vec::with_capacity(n),
        flags: Vec::with_capacity(n),
    };
    for k in 0..n {
        let e = &exact.states[k];
        let w = &effective_b.states[k];
        let u = &bare_b.states[k];
        let d_exact = exact.norms_b[k];
        let mut flags = 0u8;

        let num_ewa = b_overlap(e, w, dim_a).norm();
        let d_w = w.norm();
        let fe = if d_exact.min(d_w) < DENOM_GUARD {
            flags |= FLAG_EWA_UNDEFINED;
            f64::NAN
        } else {
            num_ewa / (d_exact * d_w)
        };

        let num_z = b_overlap(e, u, dim_a).norm();
        let d_u = u.norm();
        let fzn = if d_exact.min(d_u) < DENOM_GUARD {
            flags |= FLAG_ZN_UNDEFINED;
            f64::NAN
        } else {
            num_z / (d_exact * d_u)
        };

        out.f_ewa.push(fe);
        out.f_z.push(num_z);
        out.f_zn.push(fzn);
        out.flags.push(flags);
    }
    Ok(out)
}

/// Convenience: run the three propagations for a system and assemble the
/// series in one call.
pub fn fidelity_series_for(
    sys: &BlockSystem,
    psi0: &ComplexVector,
    times: &[f64],
) -> Result<FidelitySeries, MetricsError> {
    let h = sys.full_hamiltonian()?;
    let exact = dynamics::evolve(&h, psi0, times, sys.dim_a)?;
    let psi_b0 = psi0.segment(sys.dim_a, sys.dim_b);
    let effective = dynamics::evolve_ewa(sys, &psi_b0, times)?;
    let bare = dynamics::evolve(&sys.b_block, &psi_b0, times, 0)?;
    fidelity_series(sys, &exact, &effective, &bare)
}
