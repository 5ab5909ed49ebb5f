//! The scenario file format: a single strict JSON document. Complex numbers
//! are two-element `[re, im]` arrays; matrices are row-major lists of pairs.
//! All quantities are dimensionless multiples of epsilon (times of
//! 1/epsilon).

use crate::linalg::{C64, ComplexMatrix};
use crate::model::{BlockSystem, InitialState, Scenario, SweepSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub system: SystemFile,
    pub initial: InitialFile,
    pub grid: GridFile,
    #[serde(default)]
    pub ewa: EwaFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    #[serde(rename = "dim_A")]
    pub dim_a: usize,
    #[serde(rename = "dim_B")]
    pub dim_b: usize,
    #[serde(rename = "omegas_A")]
    pub omegas_a: Vec<f64>,
    #[serde(rename = "gammas_A")]
    pub gammas_a: Vec<f64>,
    /// Row-major `dim_B x dim_B` complex pairs.
    #[serde(rename = "B")]
    pub b: Vec<[f64; 2]>,
    /// Row-major `dim_A x dim_B` complex pairs.
    #[serde(rename = "C")]
    pub c: Vec<[f64; 2]>,
}

/// Either the `(p_A, theta)` preset form or an explicit amplitude list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialFile {
    #[serde(rename = "p_A", default, skip_serializing_if = "Option::is_none")]
    pub p_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub t_max: f64,
    pub n_steps: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EwaFile {
    #[serde(default = "default_delta_t_factor")]
    pub delta_t_factor: f64,
    #[serde(default = "default_quadrature_n")]
    pub quadrature_n: usize,
}

fn default_delta_t_factor() -> f64 {
    30.0
}

fn default_quadrature_n() -> usize {
    2000
}

impl Default for EwaFile {
    fn default() -> Self {
        Self {
            delta_t_factor: default_delta_t_factor(),
            quadrature_n: default_quadrature_n(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub axis: String,
    pub values: Vec<f64>,
}

fn pairs_to_matrix(
    pairs: &[[f64; 2]],
    rows: usize,
    cols: usize,
    field: &str,
) -> Result<ComplexMatrix, String> {
    if pairs.len() != rows * cols {
        return Err(format!(
            "{field} has {} entries, expected {rows}x{cols} = {}",
            pairs.len(),
            rows * cols
        ));
    }
    Ok(ComplexMatrix::new(
        rows,
        cols,
        pairs.iter().map(|[re, im]| C64::new(*re, *im)).collect(),
    ))
}

fn matrix_to_pairs(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    m.data().iter().map(|z| [z.re, z.im]).collect()
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = String;

    fn try_from(file: ScenarioFile) -> Result<Self, String> {
        let sf = &file.system;
        let b = pairs_to_matrix(&sf.b, sf.dim_b, sf.dim_b, "system.B")?;
        let c = pairs_to_matrix(&sf.c, sf.dim_a, sf.dim_b, "system.C")?;
        let system = BlockSystem {
            dim_a: sf.dim_a,
            dim_b: sf.dim_b,
            omegas_a: sf.omegas_a.clone(),
            gammas_a: sf.gammas_a.clone(),
            b_block: b,
            c_block: c,
        };
        let initial = match (&file.initial.amplitudes, file.initial.p_a, file.initial.theta) {
            (Some(amps), None, None) => InitialState::Amplitudes(
                amps.iter().map(|[re, im]| C64::new(*re, *im)).collect(),
            ),
            (None, Some(p_a), Some(theta)) => InitialState::WeightAngle { p_a, theta },
            _ => {
                return Err(
                    "initial must provide either both p_A and theta, or amplitudes".into(),
                )
            }
        };
        Ok(Scenario {
            system,
            initial,
            t_max: file.grid.t_max,
            n_steps: file.grid.n_steps,
            label: file.label.unwrap_or_default(),
            delta_t_factor: file.ewa.delta_t_factor,
            quadrature_n: file.ewa.quadrature_n,
            sweep: file.sweep.map(|s| SweepSpec {
                axis: s.axis,
                values: s.values,
            }),
        })
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(sc: &Scenario) -> Self {
        let initial = match &sc.initial {
            InitialState::WeightAngle { p_a, theta } => InitialFile {
                p_a: Some(*p_a),
                theta: Some(*theta),
                amplitudes: None,
            },
            InitialState::Amplitudes(amps) => InitialFile {
                p_a: None,
                theta: None,
                amplitudes: Some(amps.iter().map(|z| [z.re, z.im]).collect()),
            },
        };
        ScenarioFile {
            system: SystemFile {
                dim_a: sc.system.dim_a,
                dim_b: sc.system.dim_b,
                omegas_a: sc.system.omegas_a.clone(),
                gammas_a: sc.system.gammas_a.clone(),
                b: matrix_to_pairs(&sc.system.b_block),
                c: matrix_to_pairs(&sc.system.c_block),
            },
            initial,
            grid: GridFile {
                t_max: sc.t_max,
                n_steps: sc.n_steps,
            },
            ewa: EwaFile {
                delta_t_factor: sc.delta_t_factor,
                quadrature_n: sc.quadrature_n,
            },
            sweep: sc.sweep.clone().map(|s| SweepFile {
                axis: s.axis,
                values: s.values,
            }),
            label: if sc.label.is_empty() {
                None
            } else {
                Some(sc.label.clone())
            },
        }
    }
}

/// Serialize a scenario to the canonical file form.
pub fn scenario_to_json(sc: &Scenario) -> String {
    serde_json::to_string_pretty(&ScenarioFile::from(sc)).expect("scenario serialization")
}
