//! Frozen CSV layouts. Columns are append-only; `docs/csv_schema.md` in the
//! repository describes each one.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::obstruction::{ObstructionReport, PairReport, Verdict};

pub const PAIR_REPORT_COLUMNS: &[&str] = &[
    "j",
    "k",
    "theta",
    "defect",
    "branch_theta",
    "branch_source",
    "exel_rhs",
    "trace_condition_residual",
    "rieffel_rank",
    "bott_index",
    "exel_lhs",
    "dim",
    "monomial_deviation",
    "verdict",
    "notes",
];

pub const EXEL_CASE_COLUMNS: &[&str] = &[
    "index",
    "p",
    "q",
    "multiplicity",
    "dim",
    "noise",
    "defect",
    "lhs",
    "rhs",
    "abs_diff",
    "quantization_residue",
    "status",
    "reason",
];

pub const COUNTEREXAMPLE_COLUMNS: &[&str] = &[
    "n",
    "bott_index",
    "spectral_gap",
    "commutator_12",
    "commutator_13",
    "commutator_23",
    "defect_12",
    "defect_13",
    "defect_23",
    "exel_12",
    "exel_13",
    "exel_23",
    "note",
];

pub const OBJECTIVE_TRACE_COLUMNS: &[&str] = &["iteration", "objective"];

pub const CALIBRATION_COLUMNS: &[&str] = &["noise", "defect", "idempotency"];

/// Flat row of a pair report, in `PAIR_REPORT_COLUMNS` order.
#[derive(Clone, Debug, Serialize)]
pub struct PairReportRow {
    pub j: usize,
    pub k: usize,
    pub theta: f64,
    pub defect: f64,
    pub branch_theta: Option<f64>,
    pub branch_source: Option<crate::obstruction::report::BranchSource>,
    pub exel_rhs: Option<f64>,
    pub trace_condition_residual: Option<f64>,
    pub rieffel_rank: Option<usize>,
    pub bott_index: Option<i64>,
    pub exel_lhs: Option<f64>,
    pub dim: usize,
    pub monomial_deviation: f64,
    pub verdict: Verdict,
    pub notes: String,
}

impl PairReportRow {
    fn new(report: &ObstructionReport, p: &PairReport) -> Self {
        Self {
            j: p.j,
            k: p.k,
            theta: p.theta,
            defect: p.defect,
            branch_theta: p.branch_theta,
            branch_source: p.branch_source,
            exel_rhs: p.exel_rhs,
            trace_condition_residual: p.trace_condition_residual,
            rieffel_rank: p.rieffel_rank,
            bott_index: p.bott_index,
            exel_lhs: p.exel_lhs,
            dim: report.dim,
            monomial_deviation: report.monomial_deviation,
            verdict: report.verdict,
            notes: p.notes.join("; "),
        }
    }
}

#[derive(Serialize)]
struct TraceRow {
    iteration: usize,
    objective: f64,
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

/// Writes `rows` under a header that must equal `columns`.
pub fn write_rows<W: Write, T: Serialize>(out: W, columns: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(columns).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_report_csv<W: Write>(out: W, report: &ObstructionReport) -> Result<()> {
    let rows: Vec<PairReportRow> = report
        .per_pair
        .iter()
        .map(|p| PairReportRow::new(report, p))
        .collect();
    write_rows(out, PAIR_REPORT_COLUMNS, &rows)
}

pub fn write_trace_csv<W: Write>(out: W, trace: &[f64]) -> Result<()> {
    let rows: Vec<TraceRow> = trace
        .iter()
        .enumerate()
        .map(|(iteration, &objective)| TraceRow {
            iteration,
            objective,
        })
        .collect();
    write_rows(out, OBJECTIVE_TRACE_COLUMNS, &rows)
}
