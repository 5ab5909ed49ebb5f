//! Shared helpers for the integration suites: seeded random systems and the
//! independent Taylor-series exponential oracle.

use ewasim::linalg::{C64, ComplexMatrix, ComplexVector};
use ewasim::model::BlockSystem;
use rand::RngExt;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Order-30 Taylor series after scaling the one-norm below 0.5, then
/// repeated squaring. Independent of the production Pade path.
pub fn taylor_expm(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let mut s = 0u32;
    let mut norm = m.one_norm();
    while norm > 0.5 {
        norm /= 2.0;
        s += 1;
    }
    let a = m.scale(c(1.0 / 2f64.powi(s as i32), 0.0));
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=30u64 {
        term = term.mul(&a).scale(c(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
    }
    for _ in 0..s {
        sum = sum.mul(&sum);
    }
    sum
}

/// A random well-formed block system in the strong-decay regime
/// `min Gamma >= 10 * max |c_ij|`, with `dim_A` in {1, 2} and a two-level B.
/// Decay-rate spread is kept below 3x so a window with `min Gamma * dt = 30`
/// stays within the representability cap.
pub fn random_strong_decay_system(rng: &mut impl RngExt) -> BlockSystem {
    let dim_a = rng.random_range(1..=2usize);
    let c_scale = rng.random_range(0.05..0.5);
    let mut c_entries = Vec::new();
    let mut max_c: f64 = 0.0;
    for _ in 0..dim_a * 2 {
        let z = c(
            c_scale * rng.random_range(-0.7..0.7),
            c_scale * rng.random_range(-0.7..0.7),
        );
        max_c = max_c.max(z.norm());
        c_entries.push(z);
    }
    if max_c < 1e-3 * c_scale {
        c_entries[0] = c(c_scale * 0.5, 0.0);
        max_c = c_entries[0].norm();
    }
    let gammas: Vec<f64> = (0..dim_a)
        .map(|_| max_c * rng.random_range(10.0..30.0))
        .collect();
    let omegas: Vec<f64> = (0..dim_a).map(|_| rng.random_range(-0.5..0.5)).collect();
    let g = rng.random_range(0.0..0.6);
    let b1 = rng.random_range(0.0..1.0);
    let b2 = rng.random_range(0.0..1.0);
    let b = ComplexMatrix::from_rows(vec![
        vec![c(b1, 0.0), c(g, 0.0)],
        vec![c(g, 0.0), c(b2, 0.0)],
    ])
    .unwrap();
    let coupling = ComplexMatrix::from_fn(dim_a, 2, |i, j| c_entries[2 * i + j]);
    BlockSystem::new(omegas, gammas, b, coupling)
}

/// A random well-formed system with moderate decay rates, suited to the
/// master-equation cross-check (no strong-decay requirement).
pub fn random_moderate_system(rng: &mut impl RngExt) -> BlockSystem {
    let dim_a = rng.random_range(1..=2usize);
    let gammas: Vec<f64> = (0..dim_a).map(|_| rng.random_range(0.5..3.0)).collect();
    let omegas: Vec<f64> = (0..dim_a).map(|_| rng.random_range(-1.0..1.0)).collect();
    let g = rng.random_range(0.0..0.6);
    let b1 = rng.random_range(0.0..1.0);
    let b2 = rng.random_range(0.0..1.0);
    let b = ComplexMatrix::from_rows(vec![
        vec![c(b1, 0.0), c(g, 0.0)],
        vec![c(g, 0.0), c(b2, 0.0)],
    ])
    .unwrap();
    let coupling = ComplexMatrix::from_fn(dim_a, 2, |_, _| {
        c(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4))
    });
    BlockSystem::new(omegas, gammas, b, coupling)
}

/// A random unit state on the full space; `in_b_only` zeroes the A block.
pub fn random_unit_state(rng: &mut impl RngExt, dim: usize, dim_a: usize, in_b_only: bool) -> ComplexVector {
    loop {
        let mut data: Vec<C64> = (0..dim)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        if in_b_only {
            for z in data.iter_mut().take(dim_a) {
                *z = C64::ZERO;
            }
        }
        if let Some(v) = ComplexVector::new(data).normalized() {
            return v;
        }
    }
}

pub fn uniform_grid(t_max: f64, steps: usize) -> Vec<f64> {
    let dt = t_max / steps as f64;
    (0..=steps).map(|k| k as f64 * dt).collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0.ln()).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let num: f64 = points
        .iter()
        .map(|p| (p.0.ln() - mx) * (p.1.ln() - my))
        .sum();
    let den: f64 = points.iter().map(|p| (p.0.ln() - mx).powi(2)).sum();
    num / den
}
