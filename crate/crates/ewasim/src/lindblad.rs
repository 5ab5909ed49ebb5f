//! Master-equation cross-check on the enlarged space `A + B + G`.
//!
//! The decays of the `A` levels are realized as jump operators into ground
//! levels `G` at zero temperature. Projecting the Lindblad evolution onto
//! `A + B` yields a closed equation generated by the non-Hermitian
//! `H = P H_S P + H_I - (i/2) sum_ij gamma_ij X_ij^H X_ij`, which is what the
//! block system evolves with; the agreement of the two routes is exact up to
//! integrator tolerance and is exposed as [`equivalence_check`].
//!
//! Basis ordering on the enlarged space: `A` levels, then `B`, then `G`.

use crate::linalg::{C64, ComplexMatrix, ComplexVector, LinalgError, eigh, expm};
use crate::model::BlockSystem;

/// Hermiticity tolerance for Hamiltonians and density matrices.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Eigenvalue floor for positive semidefiniteness checks.
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Two integration passes must agree to this trace distance.
pub const STEP_AGREEMENT_TOL: f64 = 1e-9;
/// Base integrator step (units of 1/epsilon).
pub const BASE_STEP: f64 = 1e-3;
const MAX_HALVINGS: usize = 4;

#[derive(Debug, thiserror::Error)]
pub enum LindbladError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("system Hamiltonian is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("jump operator {index} violates the G<-A structure (defect {defect:.3e})")]
    BadJumpStructure { index: usize, defect: f64 },
    #[error("jump rate {index} is negative ({value})")]
    NegativeRate { index: usize, value: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not a density matrix: {0}")]
    InvalidDensity(String),
    #[error("interaction must be Hermitian with support only between A and B (defect {defect:.3e})")]
    BadInteraction { defect: f64 },
    #[error("initial state has support in G (weight {weight:.3e})")]
    SupportInG { weight: f64 },
    #[error("positivity violated at t = {t}: min eigenvalue {min_eig:.3e}")]
    Positivity { t: f64, min_eig: f64 },
    #[error(
        "step refinement did not reach {STEP_AGREEMENT_TOL:.0e} agreement after \
         {halvings} halvings (last delta {last_delta:.3e})"
    )]
    NoStepConvergence { halvings: usize, last_delta: f64 },
    #[error("invalid time grid: {0}")]
    BadTimes(String),
}

/// Zero-temperature Lindblad model on `A + B + G`: a Hermitian Hamiltonian
/// plus jump operators satisfying `X = P_G X P_A` with non-negative rates.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    pub dim_a: usize,
    pub dim_b: usize,
    pub dim_g: usize,
    h_s: ComplexMatrix,
    jumps: Vec<(ComplexMatrix, f64)>,
}

impl LindbladModel {
    pub fn new(
        dim_a: usize,
        dim_b: usize,
        dim_g: usize,
        h_s: ComplexMatrix,
        jumps: Vec<(ComplexMatrix, f64)>,
    ) -> Result<Self, LindbladError> {
        let n = dim_a + dim_b + dim_g;
        if h_s.rows() != n || h_s.cols() != n {
            return Err(LindbladError::Dimension(format!(
                "H_S is {}x{}, expected {n}x{n}",
                h_s.rows(),
                h_s.cols()
            )));
        }
        let defect = h_s.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(LindbladError::NotHermitian { defect });
        }
        for (index, (x, rate)) in jumps.iter().enumerate() {
            if x.rows() != n || x.cols() != n {
                return Err(LindbladError::Dimension(format!(
                    "jump {index} is {}x{}, expected {n}x{n}",
                    x.rows(),
                    x.cols()
                )));
            }
            if !rate.is_finite() || *rate < 0.0 {
                return Err(LindbladError::NegativeRate { index, value: *rate });
            }
            // X = P_G X P_A exactly: rows outside G and columns outside A
            // must vanish.
            let mut structure_defect = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    let inside = i >= dim_a + dim_b && j < dim_a;
                    if !inside {
                        structure_defect = structure_defect.max(x.get(i, j).norm());
                    }
                }
            }
            if structure_defect > 0.0 {
                return Err(LindbladError::BadJumpStructure {
                    index,
                    defect: structure_defect,
                });
            }
        }
        Ok(Self { dim_a, dim_b, dim_g, h_s, jumps })
    }

    pub fn dim_total(&self) -> usize {
        self.dim_a + self.dim_b + self.dim_g
    }

    pub fn dim_ab(&self) -> usize {
        self.dim_a + self.dim_b
    }

    pub fn h_s(&self) -> &ComplexMatrix {
        &self.h_s
    }

    pub fn jumps(&self) -> &[(ComplexMatrix, f64)] {
        &self.jumps
    }

    /// Minimal witness for a block system: the bare Hermitian Hamiltonian
    /// (interaction excluded) on `A + B + G` with one ground level and one
    /// jump `|g_n><a_n|` at rate `2 Gamma_n` per decaying level. Returns the
    /// model together with the interaction block to feed both evolution
    /// routes.
    pub fn from_block_system(sys: &BlockSystem) -> Result<(Self, ComplexMatrix), LindbladError> {
        sys.validated()
            .map_err(|e| LindbladError::Dimension(e.to_string()))?;
        let decaying: Vec<usize> = (0..sys.dim_a).filter(|&n| sys.gammas_a[n] > 0.0).collect();
        let dim_g = decaying.len();
        let n_ab = sys.dim_total();
        let n = n_ab + dim_g;

        let mut h_s = ComplexMatrix::zeros(n, n);
        for (i, &w) in sys.omegas_a.iter().enumerate() {
            h_s.set(i, i, C64::new(w, 0.0));
        }
        h_s.set_block(sys.dim_a, sys.dim_a, &sys.b_block);
        // G levels sit at zero energy; they receive population incoherently
        // and their bare energies never enter the reduced block.

        let mut jumps = Vec::with_capacity(dim_g);
        for (g_idx, &a_idx) in decaying.iter().enumerate() {
            let mut x = ComplexMatrix::zeros(n, n);
            x.set(n_ab + g_idx, a_idx, C64::ONE);
            jumps.push((x, 2.0 * sys.gammas_a[a_idx]));
        }

        let mut h_i = ComplexMatrix::zeros(n_ab, n_ab);
        h_i.set_block(0, sys.dim_a, &sys.c_block);
        h_i.set_block(sys.dim_a, 0, &sys.c_block.adjoint());

        let model = Self::new(sys.dim_a, sys.dim_b, dim_g, h_s, jumps)?;
        Ok((model, h_i))
    }

    fn with_interaction(&self, h_i_ab: &ComplexMatrix) -> Result<Self, LindbladError> {
        check_interaction(self, h_i_ab)?;
        let mut h_s = self.h_s.clone();
        for i in 0..self.dim_ab() {
            for j in 0..self.dim_ab() {
                let v = h_s.get(i, j) + h_i_ab.get(i, j);
                h_s.set(i, j, v);
            }
        }
        Ok(Self {
            h_s,
            ..self.clone()
        })
    }
}

fn check_interaction(model: &LindbladModel, h_i_ab: &ComplexMatrix) -> Result<(), LindbladError> {
    let n_ab = model.dim_ab();
    if h_i_ab.rows() != n_ab || h_i_ab.cols() != n_ab {
        return Err(LindbladError::Dimension(format!(
            "interaction is {}x{}, expected {n_ab}x{n_ab}",
            h_i_ab.rows(),
            h_i_ab.cols()
        )));
    }
    let mut defect = h_i_ab.hermiticity_defect();
    for i in 0..n_ab {
        for j in 0..n_ab {
            let both_a = i < model.dim_a && j < model.dim_a;
            let both_b = i >= model.dim_a && j >= model.dim_a;
            if both_a || both_b {
                defect = defect.max(h_i_ab.get(i, j).norm());
            }
        }
    }
    if defect > HERMITICITY_TOL {
        return Err(LindbladError::BadInteraction { defect });
    }
    Ok(())
}

/// A validated density matrix: Hermitian, positive semidefinite (to a small
/// eigenvalue floor), trace at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, LindbladError> {
        matrix
            .ensure_square()
            .map_err(|e| LindbladError::InvalidDensity(e.to_string()))?;
        matrix
            .ensure_finite()
            .map_err(|e| LindbladError::InvalidDensity(e.to_string()))?;
        let defect = matrix.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(LindbladError::InvalidDensity(format!(
                "Hermiticity defect {defect:.3e}"
            )));
        }
        let tr = matrix.trace();
        if tr.re > 1.0 + 1e-10 || tr.im.abs() > 1e-10 {
            return Err(LindbladError::InvalidDensity(format!(
                "trace {tr} exceeds 1"
            )));
        }
        let min_eig = eigh(&matrix)?.first().copied().unwrap_or(0.0);
        if min_eig < -POSITIVITY_TOL {
            return Err(LindbladError::InvalidDensity(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// `|psi><psi|` for a (normalized or decayed) pure state.
    pub fn from_pure(psi: &ComplexVector) -> Self {
        Self {
            matrix: psi.outer(psi),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

/// Right-hand side of the master equation:
/// `-i [H_S, rho] + sum_ij gamma_ij (X rho X^H - 1/2 {X^H X, rho})`.
pub fn lindblad_rhs(model: &LindbladModel, rho: &DensityMatrix) -> Result<ComplexMatrix, LindbladError> {
    if rho.dim() != model.dim_total() {
        return Err(LindbladError::Dimension(format!(
            "rho has dimension {}, expected {}",
            rho.dim(),
            model.dim_total()
        )));
    }
    Ok(rhs_raw(model, rho.matrix()))
}

fn rhs_raw(model: &LindbladModel, rho: &ComplexMatrix) -> ComplexMatrix {
    let h = &model.h_s;
    let mut out = h.mul(rho).sub(&rho.mul(h)).scale(-C64::i());
    for (x, rate) in &model.jumps {
        if *rate == 0.0 {
            continue;
        }
        let xr = x.mul(rho).mul(&x.adjoint());
        let xx = x.adjoint().mul(x);
        let anti = xx.mul(rho).add(&rho.mul(&xx)).scale(C64::new(0.5, 0.0));
        out = out.add(&xr.sub(&anti).scale(C64::new(*rate, 0.0)));
    }
    out
}

fn check_sample_times(times: &[f64]) -> Result<(), LindbladError> {
    if times.is_empty() {
        return Err(LindbladError::BadTimes("time grid is empty".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(LindbladError::BadTimes("non-finite time".into()));
    }
    if times[0] != 0.0 {
        return Err(LindbladError::BadTimes(format!(
            "grid must start at 0, got {}",
            times[0]
        )));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LindbladError::BadTimes("times must be strictly increasing".into()));
    }
    Ok(())
}

fn rk4_pass(
    model: &LindbladModel,
    rho0: &ComplexMatrix,
    times: &[f64],
    base_step: f64,
) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(times.len());
    let mut rho = rho0.clone();
    out.push(rho.clone());
    for w in times.windows(2) {
        let span = w[1] - w[0];
        let steps = (span / base_step).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for _ in 0..steps {
            let k1 = rhs_raw(model, &rho);
            let k2 = rhs_raw(model, &rho.add(&k1.scale(C64::new(h / 2.0, 0.0))));
            let k3 = rhs_raw(model, &rho.add(&k2.scale(C64::new(h / 2.0, 0.0))));
            let k4 = rhs_raw(model, &rho.add(&k3.scale(C64::new(h, 0.0))));
            let incr = k1
                .add(&k2.scale(C64::new(2.0, 0.0)))
                .add(&k3.scale(C64::new(2.0, 0.0)))
                .add(&k4)
                .scale(C64::new(h / 6.0, 0.0));
            rho = rho.add(&incr);
        }
        out.push(rho.clone());
    }
    out
}

/// Integrate the master equation over the sample grid with classical RK4.
///
/// The step starts at [`BASE_STEP`] (or finer when the grid spacing demands
/// it) and is halved until two consecutive passes agree to
/// [`STEP_AGREEMENT_TOL`] in trace distance at every sample. Positivity is
/// checked at the samples of the accepted pass.
pub fn integrate(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<Vec<DensityMatrix>, LindbladError> {
    if rho0.dim() != model.dim_total() {
        return Err(LindbladError::Dimension(format!(
            "rho0 has dimension {}, expected {}",
            rho0.dim(),
            model.dim_total()
        )));
    }
    check_sample_times(times)?;
    if times.len() == 1 {
        return Ok(vec![rho0.clone()]);
    }

    let mut step = BASE_STEP;
    let mut prev = rk4_pass(model, rho0.matrix(), times, step);
    let mut last_delta = f64::INFINITY;
    for _halving in 0..=MAX_HALVINGS {
        step /= 2.0;
        let fine = rk4_pass(model, rho0.matrix(), times, step);
        last_delta = prev
            .iter()
            .zip(&fine)
            .map(|(a, b)| trace_distance(a, b).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        prev = fine;
        if last_delta <= STEP_AGREEMENT_TOL {
            let mut out = Vec::with_capacity(times.len());
            for (rho, &t) in prev.iter().zip(times) {
                let min_eig = eigh(rho)?.first().copied().unwrap_or(0.0);
                if min_eig < -POSITIVITY_TOL {
                    return Err(LindbladError::Positivity { t, min_eig });
                }
                out.push(DensityMatrix { matrix: rho.clone() });
            }
            return Ok(out);
        }
    }
    Err(LindbladError::NoStepConvergence {
        halvings: MAX_HALVINGS,
        last_delta,
    })
}

/// The non-Hermitian generator of the projected dynamics:
/// `P (H_S + H_I) P - (i/2) sum gamma X^H X`, restricted to `A + B`. The
/// dissipative part lands on the `A` diagonal, giving `Gamma_n =
/// sum_ij gamma_ij (X^H X)_nn / 2`.
pub fn reduced_nhh(model: &LindbladModel, h_i_ab: &ComplexMatrix) -> Result<ComplexMatrix, LindbladError> {
    check_interaction(model, h_i_ab)?;
    let n_ab = model.dim_ab();
    let mut h = model.h_s.block(0, 0, n_ab, n_ab).add(h_i_ab);
    for (x, rate) in &model.jumps {
        if *rate == 0.0 {
            continue;
        }
        let xx = x.adjoint().mul(x);
        let half = C64::new(0.0, -rate / 2.0);
        for i in 0..n_ab {
            for j in 0..n_ab {
                let v = h.get(i, j) + half * xx.get(i, j);
                h.set(i, j, v);
            }
        }
    }
    Ok(h)
}

/// Evolve a density matrix under a non-Hermitian generator:
/// `rho(t) = e^{-iHt} rho(0) e^{+iH^H t}`.
pub fn nhh_density_evolve(
    h: &ComplexMatrix,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<Vec<DensityMatrix>, LindbladError> {
    h.ensure_square()?;
    if rho0.dim() != h.rows() {
        return Err(LindbladError::Dimension(format!(
            "rho0 has dimension {}, expected {}",
            rho0.dim(),
            h.rows()
        )));
    }
    check_sample_times(times)?;
    let mut out = Vec::with_capacity(times.len());
    out.push(rho0.clone());
    let mut rho = rho0.matrix().clone();
    let mut propagator: Option<(f64, ComplexMatrix)> = None;
    for k in 1..times.len() {
        let dt = times[k] - times[k - 1];
        let reuse = matches!(&propagator, Some((prev, _)) if (prev - dt).abs() <= 1e-12 * dt.max(*prev));
        if !reuse {
            let u = expm(&h.scale(C64::new(0.0, -dt)))?;
            propagator = Some((dt, u));
        }
        let (_, u) = propagator.as_ref().unwrap();
        rho = u.mul(&rho).mul(&u.adjoint());
        out.push(DensityMatrix { matrix: rho.clone() });
    }
    Ok(out)
}

/// Trace distance `1/2 ||a - b||_1` between two Hermitian matrices.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64, LindbladError> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(LindbladError::Dimension(
            "trace distance needs equal shapes".into(),
        ));
    }
    let diff = a.sub(b);
    let vals = eigh(&diff)?;
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

/// Maximum trace distance over the grid between (i) the master equation on
/// `A + B + G` projected onto `A + B` and (ii) the non-Hermitian evolution
/// generated by [`reduced_nhh`]. The reduction itself is exact, so the result
/// reflects integrator tolerance only.
pub fn equivalence_check(
    model: &LindbladModel,
    h_i_ab: &ComplexMatrix,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<f64, LindbladError> {
    let n = model.dim_total();
    let n_ab = model.dim_ab();
    if rho0.dim() != n {
        return Err(LindbladError::Dimension(format!(
            "rho0 has dimension {}, expected {n}",
            rho0.dim()
        )));
    }
    // Initial support must stay inside A + B.
    let mut weight = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i >= n_ab || j >= n_ab {
                weight = weight.max(rho0.matrix().get(i, j).norm());
            }
        }
    }
    if weight > 1e-12 {
        return Err(LindbladError::SupportInG { weight });
    }

    let augmented = model.with_interaction(h_i_ab)?;
    let lindblad_route = integrate(&augmented, rho0, times)?;

    let h_red = reduced_nhh(model, h_i_ab)?;
    let rho0_ab = DensityMatrix {
        matrix: rho0.matrix().block(0, 0, n_ab, n_ab),
    };
    let nhh_route = nhh_density_evolve(&h_red, &rho0_ab, times)?;

    let mut worst = 0.0f64;
    for (full, reduced) in lindblad_route.iter().zip(&nhh_route) {
        let projected = full.matrix().block(0, 0, n_ab, n_ab);
        worst = worst.max(trace_distance(&projected, reduced.matrix())?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn three_level(gamma3: f64, g: f64) -> BlockSystem {
        let b = ComplexMatrix::from_rows(vec![
            vec![C64::ZERO, c(g, 0.0)],
            vec![c(g, 0.0), C64::ONE],
        ])
        .unwrap();
        let cpl = ComplexMatrix::from_rows(vec![vec![c(0.5, 0.0), c(0.5, 0.0)]]).unwrap();
        BlockSystem::new(vec![0.0], vec![gamma3], b, cpl)
    }

    fn grid(t_max: f64, n: usize) -> Vec<f64> {
        let step = t_max / n as f64;
        (0..=n).map(|k| k as f64 * step).collect()
    }

    /// Two-level decay model |a> -> |g> at rate gamma, no B levels.
    fn decay_model(gamma: f64) -> LindbladModel {
        let h_s = ComplexMatrix::zeros(3, 3);
        let mut x = ComplexMatrix::zeros(3, 3);
        x.set(2, 0, C64::ONE); // |g><a|
        LindbladModel::new(1, 1, 1, h_s, vec![(x, gamma)]).unwrap()
    }

    #[test]
    fn rhs_without_jumps_is_commutator() {
        let mut h_s = ComplexMatrix::zeros(3, 3);
        h_s.set(0, 1, c(0.4, 0.1));
        h_s.set(1, 0, c(0.4, -0.1));
        h_s.set(2, 2, c(1.5, 0.0));
        let model = LindbladModel::new(1, 1, 1, h_s.clone(), vec![]).unwrap();
        let rho = DensityMatrix::from_pure(&ComplexVector::basis(3, 0));
        let rhs = lindblad_rhs(&model, &rho).unwrap();
        let expected = h_s
            .mul(rho.matrix())
            .sub(&rho.matrix().mul(&h_s))
            .scale(-C64::i());
        assert!(rhs.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn rhs_single_channel_decay() {
        // H = 0, X = |g><a|, rho = |a><a|  =>  rhs = gamma (|g><g| - |a><a|).
        let gamma = 0.7;
        let model = decay_model(gamma);
        let rho = DensityMatrix::from_pure(&ComplexVector::basis(3, 0));
        let rhs = lindblad_rhs(&model, &rho).unwrap();
        let mut expected = ComplexMatrix::zeros(3, 3);
        expected.set(0, 0, c(-gamma, 0.0));
        expected.set(2, 2, c(gamma, 0.0));
        assert!(rhs.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn rhs_is_traceless() {
        let (model, h_i) = LindbladModel::from_block_system(&three_level(2.0, 0.5)).unwrap();
        let model = model.with_interaction(&h_i).unwrap();
        // A mixed, fully supported state.
        let psi_a = ComplexVector::new(vec![c(0.6, 0.1), c(0.3, -0.2), c(0.5, 0.0), c(0.2, 0.4)])
            .normalized()
            .unwrap();
        let psi_b = ComplexVector::new(vec![c(0.1, 0.0), c(0.7, 0.3), c(0.2, -0.5), c(0.4, 0.0)])
            .normalized()
            .unwrap();
        let rho = psi_a
            .outer(&psi_a)
            .scale(c(0.5, 0.0))
            .add(&psi_b.outer(&psi_b).scale(c(0.5, 0.0)));
        let rhs = rhs_raw(&model, &rho);
        assert!(rhs.trace().norm() < 1e-12);
    }

    #[test]
    fn unitary_limit_preserves_trace() {
        let mut h_s = ComplexMatrix::zeros(3, 3);
        h_s.set(0, 1, c(0.5, 0.0));
        h_s.set(1, 0, c(0.5, 0.0));
        h_s.set(2, 2, c(0.3, 0.0));
        let model = LindbladModel::new(1, 1, 1, h_s, vec![]).unwrap();
        let rho0 = DensityMatrix::from_pure(&ComplexVector::basis(3, 0));
        let states = integrate(&model, &rho0, &grid(3.0, 6)).unwrap();
        for s in &states {
            assert!((s.trace() - 1.0).abs() < 1e-10);
            assert!(s.matrix().hermiticity_defect() < 1e-10);
        }
    }

    #[test]
    fn pure_decay_population_is_exponential() {
        let gamma = 1.1;
        let model = decay_model(gamma);
        let rho0 = DensityMatrix::from_pure(&ComplexVector::basis(3, 0));
        let times = grid(4.0, 8);
        let states = integrate(&model, &rho0, &times).unwrap();
        for (s, &t) in states.iter().zip(&times) {
            let pop = s.matrix().get(0, 0).re;
            assert!((pop - (-gamma * t).exp()).abs() < 1e-8, "t = {t}");
            // G population is the complement and never decreases.
            assert!((s.matrix().get(2, 2).re - (1.0 - (-gamma * t).exp())).abs() < 1e-8);
        }
    }

    #[test]
    fn g_population_is_monotone_and_integration_stays_physical() {
        let (model, h_i) = LindbladModel::from_block_system(&three_level(2.0, 0.5)).unwrap();
        let augmented = model.with_interaction(&h_i).unwrap();
        let psi0 = ComplexVector::basis(4, 2).embed(4, 0);
        let rho0 = DensityMatrix::from_pure(&psi0);
        let states = integrate(&augmented, &rho0, &grid(5.0, 20)).unwrap();
        let g_pop: Vec<f64> = states.iter().map(|s| s.matrix().get(3, 3).re).collect();
        for w in g_pop.windows(2) {
            assert!(w[1] >= w[0] - 1e-9);
        }
        // Trace and Hermiticity are preserved at every sample.
        for s in &states {
            assert!((s.trace() - 1.0).abs() < 1e-10);
            assert!(s.matrix().hermiticity_defect() < 1e-10);
        }
    }

    #[test]
    fn reduction_recovers_block_hamiltonian() {
        let sys = three_level(2.5, 0.5);
        let (model, h_i) = LindbladModel::from_block_system(&sys).unwrap();
        let h_red = reduced_nhh(&model, &h_i).unwrap();
        let h_sys = sys.full_hamiltonian().unwrap();
        assert!(h_red.max_abs_diff(&h_sys) < 1e-14);
    }

    #[test]
    fn reduction_rate_is_half_gamma_per_channel() {
        // One jump |g><a| at rate gamma adds -i gamma/2 |a><a|.
        let gamma = 1.4;
        let model = decay_model(gamma);
        let h_i = ComplexMatrix::zeros(2, 2);
        let h_red = reduced_nhh(&model, &h_i).unwrap();
        assert!((h_red.get(0, 0) - c(0.0, -gamma / 2.0)).norm() < 1e-15);
        // Two channels from the same level add their rates.
        let h_s = ComplexMatrix::zeros(4, 4);
        let mut x1 = ComplexMatrix::zeros(4, 4);
        x1.set(2, 0, C64::ONE);
        let mut x2 = ComplexMatrix::zeros(4, 4);
        x2.set(3, 0, C64::ONE);
        let model2 = LindbladModel::new(1, 1, 2, h_s, vec![(x1, 0.8), (x2, 0.6)]).unwrap();
        let h_red2 = reduced_nhh(&model2, &ComplexMatrix::zeros(2, 2)).unwrap();
        assert!((h_red2.get(0, 0) - c(0.0, -0.7)).norm() < 1e-15);
    }

    #[test]
    fn nhh_density_evolution_of_pure_state_stays_pure() {
        let sys = three_level(2.0, 0.5);
        let h = sys.full_hamiltonian().unwrap();
        let psi0 = ComplexVector::basis(3, 1);
        let rho0 = DensityMatrix::from_pure(&psi0);
        let times = grid(3.0, 6);
        let rhos = nhh_density_evolve(&h, &rho0, &times).unwrap();
        let traj = crate::dynamics::evolve(&h, &psi0, &times, 1).unwrap();
        for (rho, psi) in rhos.iter().zip(&traj.states) {
            assert!(rho.matrix().max_abs_diff(&psi.outer(psi)) < 1e-12);
        }
    }

    #[test]
    fn hermitian_generator_preserves_trace_under_nhh_evolution() {
        let mut h = ComplexMatrix::zeros(2, 2);
        h.set(0, 1, c(0.3, 0.0));
        h.set(1, 0, c(0.3, 0.0));
        let rho0 = DensityMatrix::from_pure(&ComplexVector::basis(2, 0));
        let rhos = nhh_density_evolve(&h, &rho0, &grid(5.0, 10)).unwrap();
        for rho in &rhos {
            assert!((rho.trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equivalence_for_closed_system_is_tight() {
        // gamma = 0 (no decaying levels), C = 0: both routes are the same
        // unitary evolution.
        let mut sys = three_level(0.0, 0.5);
        sys.c_block = ComplexMatrix::zeros(1, 2);
        let (model, h_i) = LindbladModel::from_block_system(&sys).unwrap();
        assert_eq!(model.dim_g, 0);
        let psi0 = ComplexVector::basis(3, 2);
        let rho0 = DensityMatrix::from_pure(&psi0);
        let d = equivalence_check(&model, &h_i, &rho0, &grid(2.0, 8)).unwrap();
        assert!(d < 1e-10, "distance {d:.3e}");
    }

    #[test]
    fn equivalence_on_reference_system() {
        let sys = three_level(2.0, 0.5);
        let (model, h_i) = LindbladModel::from_block_system(&sys).unwrap();
        let psi0 = ComplexVector::basis(4, 2); // |1> embedded in A+B+G
        let rho0 = DensityMatrix::from_pure(&psi0);
        let d = equivalence_check(&model, &h_i, &rho0, &grid(3.0, 12)).unwrap();
        assert!(d <= 1e-6, "distance {d:.3e}");
    }

    #[test]
    fn corrupted_reduction_is_detected() {
        // Halving the decay rates on the NHH side must produce a distance far
        // above the integrator tolerance.
        let sys = three_level(2.0, 0.5);
        let (model, h_i) = LindbladModel::from_block_system(&sys).unwrap();
        let mut halved = sys.clone();
        halved.gammas_a[0] *= 0.5;
        let h_bad = halved.full_hamiltonian().unwrap();

        let psi0 = ComplexVector::basis(4, 2);
        let rho0 = DensityMatrix::from_pure(&psi0);
        let times = grid(3.0, 12);
        let augmented = model.with_interaction(&h_i).unwrap();
        let lindblad_route = integrate(&augmented, &rho0, &times).unwrap();
        let nhh_route = nhh_density_evolve(
            &h_bad,
            &DensityMatrix {
                matrix: rho0.matrix().block(0, 0, 3, 3),
            },
            &times,
        )
        .unwrap();
        let mut worst = 0.0f64;
        for (full, red) in lindblad_route.iter().zip(&nhh_route) {
            let projected = full.matrix().block(0, 0, 3, 3);
            worst = worst.max(trace_distance(&projected, red.matrix()).unwrap());
        }
        assert!(worst > 1e-3, "distance {worst:.3e}");
    }

    #[test]
    fn initial_support_in_g_is_rejected() {
        let sys = three_level(2.0, 0.5);
        let (model, h_i) = LindbladModel::from_block_system(&sys).unwrap();
        let psi0 = ComplexVector::basis(4, 3); // the G level
        let rho0 = DensityMatrix::from_pure(&psi0);
        assert!(matches!(
            equivalence_check(&model, &h_i, &rho0, &[0.0, 1.0]),
            Err(LindbladError::SupportInG { .. })
        ));
    }

    #[test]
    fn jump_structure_violations_are_rejected() {
        let h_s = ComplexMatrix::zeros(3, 3);
        let mut x = ComplexMatrix::zeros(3, 3);
        x.set(0, 2, C64::ONE); // A <- G: wrong direction
        assert!(matches!(
            LindbladModel::new(1, 1, 1, h_s, vec![(x, 1.0)]),
            Err(LindbladError::BadJumpStructure { .. })
        ));
    }

    #[test]
    fn density_matrix_validation() {
        // Trace above one.
        let too_big = ComplexMatrix::diagonal(&[c(0.8, 0.0), c(0.5, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(too_big),
            Err(LindbladError::InvalidDensity(_))
        ));
        // Negative eigenvalue.
        let indefinite = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(-0.5, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(indefinite),
            Err(LindbladError::InvalidDensity(_))
        ));
        // A valid mixed state.
        let ok = ComplexMatrix::diagonal(&[c(0.5, 0.0), c(0.5, 0.0)]);
        assert!(DensityMatrix::new(ok).is_ok());
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states_is_one() {
        let a = DensityMatrix::from_pure(&ComplexVector::basis(2, 0));
        let b = DensityMatrix::from_pure(&ComplexVector::basis(2, 1));
        let d = trace_distance(a.matrix(), b.matrix()).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }
}
