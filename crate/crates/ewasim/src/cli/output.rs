//! Deterministic CSV and JSON emission.
//!
//! Floats are printed with `{:.15e}` (16 significant digits), so identical
//! inputs produce byte-identical files. Fidelity values whose normalization
//! was guarded print as `NaN` in CSV and `null` in JSON, with the `flags`
//! column telling which metric was affected.

use crate::experiments::{ScenarioRun, SweepResult};
use serde::Serialize;
use std::io::{self, Write};

/// CSV column order for a scenario run.
pub const SERIES_HEADER: &str = "t,f_ewa,f_z,f_zn,norm_full,norm_A,norm_B,psiA_bound,flags";

fn fmt(x: f64) -> String {
    format!("{x:.15e}")
}

/// One row per grid time, fixed column order.
pub fn write_series_csv(w: &mut (impl Write + ?Sized), run: &ScenarioRun) -> io::Result<()> {
    writeln!(w, "{SERIES_HEADER}")?;
    let s = &run.series;
    for k in 0..s.times.len() {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            fmt(s.times[k]),
            fmt(s.f_ewa[k]),
            fmt(s.f_z[k]),
            fmt(s.f_zn[k]),
            fmt(run.exact.norms_full[k]),
            fmt(run.exact.norms_a[k]),
            fmt(run.exact.norms_b[k]),
            fmt(run.psi_a_bound[k]),
            s.flags[k],
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SeriesDoc<'a> {
    label: &'a str,
    times: &'a [f64],
    f_ewa: &'a [f64],
    f_z: &'a [f64],
    f_zn: &'a [f64],
    norm_full: &'a [f64],
    #[serde(rename = "norm_A")]
    norm_a: &'a [f64],
    #[serde(rename = "norm_B")]
    norm_b: &'a [f64],
    #[serde(rename = "psiA_bound")]
    psi_a_bound: &'a [f64],
    flags: &'a [u8],
}

pub fn write_series_json(w: &mut (impl Write + ?Sized), label: &str, run: &ScenarioRun) -> io::Result<()> {
    let doc = SeriesDoc {
        label,
        times: &run.series.times,
        f_ewa: &run.series.f_ewa,
        f_z: &run.series.f_z,
        f_zn: &run.series.f_zn,
        norm_full: &run.exact.norms_full,
        norm_a: &run.exact.norms_a,
        norm_b: &run.exact.norms_b,
        psi_a_bound: &run.psi_a_bound,
        flags: &run.series.flags,
    };
    serde_json::to_writer_pretty(&mut *w, &doc)?;
    writeln!(w)
}

/// Summary CSV for a sweep: one row per axis value.
pub fn write_sweep_summary_csv(w: &mut (impl Write + ?Sized), sweep: &SweepResult) -> io::Result<()> {
    writeln!(w, "axis_value,min_f_ewa,min_f_zn,max_dB_entry")?;
    for row in &sweep.summary {
        writeln!(
            w,
            "{},{},{},{}",
            row.axis_value,
            fmt(row.min_f_ewa),
            fmt(row.min_f_zn),
            fmt(row.max_db_entry),
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepSummaryDoc<'a> {
    axis_name: &'a str,
    axis_values: &'a [f64],
    min_f_ewa: Vec<f64>,
    mean_f_ewa: Vec<f64>,
    min_f_z: Vec<f64>,
    mean_f_z: Vec<f64>,
    min_f_zn: Vec<f64>,
    mean_f_zn: Vec<f64>,
    #[serde(rename = "max_dB_entry")]
    max_db_entry: Vec<f64>,
}

pub fn write_sweep_summary_json(w: &mut (impl Write + ?Sized), sweep: &SweepResult) -> io::Result<()> {
    let doc = SweepSummaryDoc {
        axis_name: &sweep.axis_name,
        axis_values: &sweep.axis_values,
        min_f_ewa: sweep.summary.iter().map(|r| r.min_f_ewa).collect(),
        mean_f_ewa: sweep.summary.iter().map(|r| r.mean_f_ewa).collect(),
        min_f_z: sweep.summary.iter().map(|r| r.min_f_z).collect(),
        mean_f_z: sweep.summary.iter().map(|r| r.mean_f_z).collect(),
        min_f_zn: sweep.summary.iter().map(|r| r.min_f_zn).collect(),
        mean_f_zn: sweep.summary.iter().map(|r| r.mean_f_zn).collect(),
        max_db_entry: sweep.summary.iter().map(|r| r.max_db_entry).collect(),
    };
    serde_json::to_writer_pretty(&mut *w, &doc)?;
    writeln!(w)
}

/// Bound-vs-exact columns for the `bound` subcommand.
pub fn write_bound_csv(w: &mut (impl Write + ?Sized), run: &ScenarioRun) -> io::Result<()> {
    writeln!(w, "t,norm_A,psiA_bound")?;
    for k in 0..run.series.times.len() {
        writeln!(
            w,
            "{},{},{}",
            fmt(run.series.times[k]),
            fmt(run.exact.norms_a[k]),
            fmt(run.psi_a_bound[k]),
        )?;
    }
    Ok(())
}

/// Axis values formatted the way sweep file names embed them ("2", "0.1").
pub fn axis_value_label(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{preset, run_scenario};

    #[test]
    fn csv_is_deterministic_and_row_counted() {
        let run = run_scenario(&preset("fig2a").unwrap()).unwrap();
        let mut a = Vec::new();
        write_series_csv(&mut a, &run).unwrap();
        let mut b = Vec::new();
        write_series_csv(&mut b, &run).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.lines().count(), 402); // header + 401 rows
        assert!(text.starts_with(SERIES_HEADER));
    }

    #[test]
    fn axis_labels_are_compact() {
        assert_eq!(axis_value_label(2.0), "2");
        assert_eq!(axis_value_label(0.1), "0.1");
        assert_eq!(axis_value_label(100.0), "100");
    }
}
