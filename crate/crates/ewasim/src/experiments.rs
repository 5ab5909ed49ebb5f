//! Scenario presets, the scenario runner, and decay-rate sweeps.
//!
//! The presets cover the reference studies on three- and four-level systems:
//! a two-level `B` with bare energies (0, 1) and internal coupling `g`,
//! coupled to one or two decaying levels. Decay-rate sweeps scale every
//! `Gamma_n` by a common factor so fixed ratios (`Gamma_4 / Gamma_3`) are
//! preserved, and collect per-value fidelity summaries.

use crate::dynamics::{self, DynamicsError, Trajectory};
use crate::ewa::{self, EwaError};
use crate::linalg::{C64, ComplexMatrix};
use crate::metrics::{self, FidelitySeries, MetricsError};
use crate::model::{BlockSystem, InitialState, ModelError, Scenario, SweepSpec};
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ewa(#[from] EwaError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("unknown preset '{name}'; valid presets: {}", valid.join(", "))]
    UnknownPreset { name: String, valid: Vec<String> },
    #[error("invalid sweep: {0}")]
    BadSweep(String),
}

/// Everything one scenario produces: the exact full-space trajectory, the
/// effective and uncoupled `B` trajectories, the three fidelity series, and
/// the closed-form bound on the decaying component at each grid time.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub series: FidelitySeries,
    pub exact: Trajectory,
    pub effective_b: Trajectory,
    pub bare_b: Trajectory,
    pub psi_a_bound: Vec<f64>,
}

/// Per-axis-value summary of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummaryRow {
    pub axis_value: f64,
    pub min_f_ewa: f64,
    pub mean_f_ewa: f64,
    pub min_f_z: f64,
    pub mean_f_z: f64,
    pub min_f_zn: f64,
    pub mean_f_zn: f64,
    /// Largest entry modulus of the closed-form dressing at this axis value.
    pub max_db_entry: f64,
}

/// A completed sweep: one [`ScenarioRun`] per axis value, in axis order.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis_name: String,
    pub axis_values: Vec<f64>,
    pub runs: Vec<ScenarioRun>,
    pub summary: Vec<SweepSummaryRow>,
}

/// Run one scenario end to end.
pub fn run_scenario(sc: &Scenario) -> Result<ScenarioRun, ExperimentError> {
    sc.validated()?;
    let sys = &sc.system;
    let psi0 = sc.initial_state()?;
    let times = sc.times();

    let h = sys.full_hamiltonian()?;
    let exact = dynamics::evolve(&h, &psi0, &times, sys.dim_a)?;
    let psi_b0 = psi0.segment(sys.dim_a, sys.dim_b);
    let effective_b = dynamics::evolve_ewa(sys, &psi_b0, &times)?;
    let bare_b = dynamics::evolve(&sys.b_block, &psi_b0, &times, 0)?;
    let series = metrics::fidelity_series(sys, &exact, &effective_b, &bare_b)?;
    let psi_a_bound = times
        .iter()
        .map(|&t| dynamics::psi_a_bound(sys, &psi0, t))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(ScenarioRun {
        series,
        exact,
        effective_b,
        bare_b,
        psi_a_bound,
    })
}

fn mean_unflagged(values: &[f64], flags: &[u8], bit: u8) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for (v, f) in values.iter().zip(flags) {
        if f & bit == 0 {
            sum += v;
            count += 1;
        }
    }
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

fn summary_row(axis_value: f64, run: &ScenarioRun, max_db_entry: f64) -> SweepSummaryRow {
    let s = &run.series;
    SweepSummaryRow {
        axis_value,
        min_f_ewa: s.min_f_ewa(),
        mean_f_ewa: mean_unflagged(&s.f_ewa, &s.flags, metrics::FLAG_EWA_UNDEFINED),
        min_f_z: s.min_f_z(),
        mean_f_z: mean_unflagged(&s.f_z, &s.flags, 0),
        min_f_zn: s.min_f_zn(),
        mean_f_zn: mean_unflagged(&s.f_zn, &s.flags, metrics::FLAG_ZN_UNDEFINED),
        max_db_entry,
    }
}

/// Rescale the system so the leading decay rate equals `gamma3`, preserving
/// the ratios between decay rates.
pub fn with_leading_gamma(sys: &BlockSystem, gamma3: f64) -> Result<BlockSystem, ExperimentError> {
    let base = *sys
        .gammas_a
        .first()
        .ok_or_else(|| ExperimentError::BadSweep("system has no decaying levels".into()))?;
    if base <= 0.0 {
        return Err(ExperimentError::BadSweep(
            "the leading decay rate must be positive to anchor a sweep".into(),
        ));
    }
    let factor = gamma3 / base;
    let mut out = sys.clone();
    out.gammas_a = sys.gammas_a.iter().map(|g| g * factor).collect();
    Ok(out)
}

/// Run the scenario once per decay-rate value, in parallel, collecting the
/// results in axis order. Rates must be positive and strictly increasing.
pub fn gamma_sweep(sc: &Scenario, gammas: &[f64]) -> Result<SweepResult, ExperimentError> {
    sc.validated()?;
    if gammas.is_empty() {
        return Err(ExperimentError::BadSweep("no sweep values given".into()));
    }
    if gammas.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(ExperimentError::BadSweep(
            "sweep values must be positive and finite".into(),
        ));
    }
    if gammas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ExperimentError::BadSweep(
            "sweep values must be strictly increasing".into(),
        ));
    }

    let outcomes: Vec<(ScenarioRun, f64)> = gammas
        .par_iter()
        .map(|&g| {
            let system = with_leading_gamma(&sc.system, g)?;
            let max_db = ewa::db_ewa(&system)?.max_norm();
            let scenario = Scenario {
                system,
                ..sc.clone()
            };
            let run = run_scenario(&scenario)?;
            Ok::<_, ExperimentError>((run, max_db))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let summary = gammas
        .iter()
        .zip(&outcomes)
        .map(|(&g, (run, max_db))| summary_row(g, run, *max_db))
        .collect();
    let runs = outcomes.into_iter().map(|(run, _)| run).collect();
    Ok(SweepResult {
        axis_name: sc
            .sweep
            .as_ref()
            .map(|s| s.axis.clone())
            .unwrap_or_else(|| "Gamma3_over_eps".into()),
        axis_values: gammas.to_vec(),
        runs,
        summary,
    })
}

/// Names of the built-in presets.
pub fn preset_names() -> &'static [&'static str] {
    &["fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig4"]
}

fn two_level_b(g: f64) -> ComplexMatrix {
    ComplexMatrix::from_rows(vec![
        vec![C64::ZERO, C64::new(g, 0.0)],
        vec![C64::new(g, 0.0), C64::ONE],
    ])
    .expect("2x2 block")
}

fn three_level_system(gamma3: f64, g: f64) -> BlockSystem {
    let coupling = ComplexMatrix::from_rows(vec![vec![C64::new(0.5, 0.0), C64::new(0.5, 0.0)]])
        .expect("1x2 block");
    BlockSystem::new(vec![0.0], vec![gamma3], two_level_b(g), coupling)
}

fn four_level_system(gamma3: f64, g: f64) -> BlockSystem {
    let coupling = ComplexMatrix::from_rows(vec![
        vec![C64::new(0.5, 0.0), C64::new(0.5, 0.0)],
        vec![C64::new(0.4, 0.0), C64::new(0.4, 0.0)],
    ])
    .expect("2x2 block");
    BlockSystem::new(
        vec![0.0, 0.0],
        vec![gamma3, 1.2 * gamma3],
        two_level_b(g),
        coupling,
    )
}

fn scenario(
    label: &str,
    system: BlockSystem,
    p_a: f64,
    theta: f64,
    sweep_values: Vec<f64>,
) -> Scenario {
    Scenario {
        system,
        initial: InitialState::WeightAngle { p_a, theta },
        t_max: 20.0,
        n_steps: 400,
        label: label.to_string(),
        delta_t_factor: 30.0,
        quadrature_n: 2000,
        sweep: Some(SweepSpec {
            axis: "Gamma3_over_eps".into(),
            values: sweep_values,
        }),
    }
}

/// Look up a built-in scenario. The effective-dynamics studies (`fig2*`,
/// `fig3*`) carry the decay-rate grid {0.1, 1, 3, 5} with base rate 5; the
/// Zeno study (`fig4`) carries {2, 5, 10, 100} with base rate 100.
pub fn preset(name: &str) -> Result<Scenario, ExperimentError> {
    let fig2_sweep = vec![0.1, 1.0, 3.0, 5.0];
    let pi = std::f64::consts::PI;
    match name {
        "fig2a" => Ok(scenario("fig2a", three_level_system(5.0, 0.5), 0.0, 0.0, fig2_sweep)),
        "fig2b" => Ok(scenario(
            "fig2b",
            three_level_system(5.0, 0.5),
            0.0,
            pi / 4.0,
            fig2_sweep,
        )),
        "fig2c" => Ok(scenario(
            "fig2c",
            three_level_system(5.0, 0.25),
            0.0,
            0.0,
            fig2_sweep,
        )),
        "fig2d" => Ok(scenario(
            "fig2d",
            three_level_system(5.0, 0.25),
            0.25,
            pi / 4.0,
            fig2_sweep,
        )),
        "fig3a" => Ok(scenario("fig3a", four_level_system(5.0, 0.5), 0.0, 0.0, fig2_sweep)),
        "fig3b" => Ok(scenario(
            "fig3b",
            four_level_system(5.0, 0.5),
            0.1,
            pi / 3.0,
            fig2_sweep,
        )),
        "fig4" => Ok(scenario(
            "fig4",
            three_level_system(100.0, 0.5),
            0.0,
            0.0,
            vec![2.0, 5.0, 10.0, 100.0],
        )),
        _ => Err(ExperimentError::UnknownPreset {
            name: name.to_string(),
            valid: preset_names().iter().map(|s| s.to_string()).collect(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_parameters_match_reference_values() {
        let fig2c = preset("fig2c").unwrap();
        assert!((fig2c.system.b_block.get(0, 1).re - 0.25).abs() < 1e-15);
        match fig2c.initial {
            InitialState::WeightAngle { p_a, theta } => {
                assert_eq!(p_a, 0.0);
                assert_eq!(theta, 0.0);
            }
            _ => panic!("expected the two-parameter form"),
        }

        let fig2d = preset("fig2d").unwrap();
        match fig2d.initial {
            InitialState::WeightAngle { p_a, theta } => {
                assert_eq!(p_a, 0.25);
                assert!((theta - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
            }
            _ => panic!("expected the two-parameter form"),
        }
        assert!((fig2d.system.b_block.get(0, 1).re - 0.25).abs() < 1e-15);

        let fig3b = preset("fig3b").unwrap();
        assert_eq!(fig3b.system.dim_a, 2);
        assert!((fig3b.system.c_block.get(1, 0).re - 0.4).abs() < 1e-15);
        assert!((fig3b.system.gammas_a[1] / fig3b.system.gammas_a[0] - 1.2).abs() < 1e-12);

        let fig4 = preset("fig4").unwrap();
        let psi0 = fig4.initial_state().unwrap();
        // |psi(0)> = |2>, no coupling to a fourth level.
        assert!((psi0.get(2) - C64::ONE).norm() < 1e-15);
        assert_eq!(fig4.system.dim_a, 1);
        assert_eq!(fig4.sweep.as_ref().unwrap().values, vec![2.0, 5.0, 10.0, 100.0]);
    }

    #[test]
    fn unknown_preset_lists_valid_names() {
        match preset("fig9") {
            Err(ExperimentError::UnknownPreset { valid, .. }) => {
                assert_eq!(valid.len(), preset_names().len());
            }
            other => panic!("expected UnknownPreset, got {other:?}"),
        }
    }

    #[test]
    fn reference_scenario_keeps_high_fidelity() {
        let run = run_scenario(&preset("fig2a").unwrap()).unwrap();
        assert!(run.series.min_f_ewa() >= 0.99);
        assert_eq!(run.series.times.len(), 401);
        // Bound column dominates the exact A norm.
        for (k, &b) in run.psi_a_bound.iter().enumerate() {
            assert!(run.exact.norms_a[k] <= b + 1e-12);
        }
    }

    #[test]
    fn decoupled_scenario_gives_unit_fidelities() {
        let mut sc = preset("fig2a").unwrap();
        sc.system.c_block = ComplexMatrix::zeros(1, 2);
        let run = run_scenario(&sc).unwrap();
        for k in 0..run.series.times.len() {
            assert!((run.series.f_ewa[k] - 1.0).abs() < 1e-9);
            assert!((run.series.f_z[k] - 1.0).abs() < 1e-9);
            assert!((run.series.f_zn[k] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn four_level_scenario_produces_clean_series() {
        let run = run_scenario(&preset("fig3b").unwrap()).unwrap();
        assert!(run.series.flags.iter().all(|&f| f == 0));
        assert!(run.series.f_ewa.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn runs_are_deterministic() {
        let sc = preset("fig2b").unwrap();
        let a = run_scenario(&sc).unwrap();
        let b = run_scenario(&sc).unwrap();
        assert_eq!(a.series.f_ewa, b.series.f_ewa);
        assert_eq!(a.series.f_zn, b.series.f_zn);
        assert_eq!(a.psi_a_bound, b.psi_a_bound);
        let s1 = gamma_sweep(&sc, &[1.0, 5.0]).unwrap();
        let s2 = gamma_sweep(&sc, &[1.0, 5.0]).unwrap();
        for (x, y) in s1.summary.iter().zip(&s2.summary) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn single_element_sweep_equals_run_scenario() {
        let sc = preset("fig2a").unwrap();
        let sweep = gamma_sweep(&sc, &[5.0]).unwrap();
        let run = run_scenario(&sc).unwrap();
        assert_eq!(sweep.runs.len(), 1);
        assert_eq!(sweep.runs[0].series.f_ewa, run.series.f_ewa);
    }

    #[test]
    fn sweep_summary_matches_series_minima() {
        let sc = preset("fig4").unwrap();
        let sweep = gamma_sweep(&sc, &[2.0, 10.0]).unwrap();
        for (row, run) in sweep.summary.iter().zip(&sweep.runs) {
            assert_eq!(row.min_f_zn, run.series.min_f_zn());
            assert_eq!(row.min_f_ewa, run.series.min_f_ewa());
        }
    }

    #[test]
    fn sweep_preserves_gamma_ratios() {
        let sc = preset("fig3a").unwrap();
        let sweep = gamma_sweep(&sc, &[1.0, 3.0]).unwrap();
        assert_eq!(sweep.axis_values, vec![1.0, 3.0]);
        // Gamma_4 / Gamma_3 = 1.2 is preserved along the axis; check through
        // the bound column which depends on the rates.
        let sys1 = with_leading_gamma(&sc.system, 1.0).unwrap();
        assert!((sys1.gammas_a[1] - 1.2).abs() < 1e-12);
    }

    #[test]
    fn invalid_sweeps_are_rejected() {
        let sc = preset("fig2a").unwrap();
        assert!(matches!(
            gamma_sweep(&sc, &[]),
            Err(ExperimentError::BadSweep(_))
        ));
        assert!(matches!(
            gamma_sweep(&sc, &[1.0, 1.0]),
            Err(ExperimentError::BadSweep(_))
        ));
        assert!(matches!(
            gamma_sweep(&sc, &[-1.0, 2.0]),
            Err(ExperimentError::BadSweep(_))
        ));
    }

    #[test]
    fn nonzero_bare_energies_keep_qualitative_orderings() {
        // Re-run the Zeno study with omega_3 = 0.7: the minimum normalized
        // fidelity still increases with the decay rate, and the effective
        // description still beats the small-rate regime.
        let mut sc = preset("fig4").unwrap();
        sc.system.omegas_a = vec![0.7];
        let sweep = gamma_sweep(&sc, &[2.0, 5.0, 10.0, 100.0]).unwrap();
        let mins: Vec<f64> = sweep.summary.iter().map(|r| r.min_f_zn).collect();
        for w in mins.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "ordering broken: {mins:?}");
        }

        let mut fig2 = preset("fig2a").unwrap();
        fig2.system.omegas_a = vec![0.7];
        let sweep2 = gamma_sweep(&fig2, &[0.1, 5.0]).unwrap();
        assert!(sweep2.summary[1].min_f_ewa > sweep2.summary[0].min_f_ewa);
        assert!(sweep2.summary[1].min_f_ewa >= 0.98);
    }
}
