use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use rotlab_core::experiments::schema::{
    write_report_csv, write_rows, write_trace_csv, CALIBRATION_COLUMNS, COUNTEREXAMPLE_COLUMNS,
    EXEL_CASE_COLUMNS,
};
use rotlab_core::experiments::{
    counterexample_sweep, exel_suite as run_exel_suite, gap_calibration, CalibrationConfig,
    ExelSuiteConfig,
};
use rotlab_core::matrix_io::{read_matrix, write_matrix};
use rotlab_core::obstruction::{defect, obstruction_report, Verdict};
use rotlab_core::reps::{rational_pair_rep, rational_torus3_rep};
use rotlab_core::search::planted::plant_instance;
use rotlab_core::search::repair::{repair_outcome, SearchConfig};
use rotlab_core::{PhaseMatrix, RationalPhase, UnitaryTuple};
use serde::Serialize;

use crate::output::{create, out_dir, parse_theta, theta_from, tolerances, write_json};
use crate::GlobalOpts;

#[derive(Args, Debug)]
pub struct RepArgs {
    /// θ = p/q for a pair.
    #[arg(long, conflicts_with = "torus3", required_unless_present = "torus3")]
    pair: Option<RationalPhase>,
    /// θ₁₂,θ₁₃,θ₂₃ as rationals for a triple.
    #[arg(long)]
    torus3: Option<String>,
    #[arg(long, default_value_t = 1)]
    mult: usize,
}

#[derive(Serialize)]
struct Manifest {
    n: usize,
    dim: usize,
    multiplicity: usize,
    theta: Vec<Vec<f64>>,
    defect: f64,
    files: Vec<String>,
}

fn write_tuple(dir: &std::path::Path, prefix: &str, tuple: &UnitaryTuple) -> Result<Vec<String>> {
    let mut files = Vec::new();
    for (j, m) in tuple.matrices().iter().enumerate() {
        let name = format!("{prefix}{}.json", j + 1);
        write_matrix(&dir.join(&name), m).with_context(|| format!("writing {name}"))?;
        files.push(name);
    }
    Ok(files)
}

pub fn rep(global: &GlobalOpts, a: RepArgs) -> Result<u8> {
    let tol = tolerances(global)?;
    let dir = out_dir(global)?;
    if a.mult == 0 {
        bail!("--mult must be at least 1");
    }
    let (theta, tuple) = match (a.pair, a.torus3.as_deref()) {
        (Some(t), None) => (
            PhaseMatrix::rational(2, &[t])?,
            rational_pair_rep(t, a.mult),
        ),
        (None, Some(s)) => {
            let theta = parse_theta(s)?;
            if theta.n() != 3 {
                bail!("--torus3 needs exactly three phases");
            }
            let tuple = rational_torus3_rep(&theta, a.mult)?;
            (theta, tuple)
        }
        _ => bail!("give exactly one of --pair or --torus3"),
    };
    let files = write_tuple(dir, "v", &tuple)?;
    std::fs::write(dir.join("theta.json"), theta.to_json())?;
    let manifest = Manifest {
        n: theta.n(),
        dim: tuple.dim(),
        multiplicity: a.mult,
        theta: theta.rows().to_vec(),
        defect: defect(&theta, &tuple)?.max,
        files,
    };
    write_json(dir, "manifest.json", &tol, &manifest)?;
    println!(
        "wrote {} matrices of size {} (defect {:.3e})",
        theta.n(),
        tuple.dim(),
        manifest.defect
    );
    Ok(0)
}

#[derive(Args, Debug)]
pub struct TupleInput {
    /// Upper triangle of Θ, comma separated (rationals keep exact data).
    #[arg(long)]
    theta: Option<String>,
    /// Θ as PhaseMatrix JSON.
    #[arg(long)]
    theta_file: Option<PathBuf>,
    /// One Matrix JSON file per unitary, in order.
    #[arg(long, num_args = 1..)]
    matrices: Vec<PathBuf>,
}

impl TupleInput {
    fn theta(&self) -> Result<PhaseMatrix> {
        theta_from(self.theta.as_deref(), self.theta_file.as_deref())
    }

    fn tuple(&self, tol: &rotlab_core::Tolerances) -> Result<UnitaryTuple> {
        if self.matrices.is_empty() {
            bail!("--matrices is required");
        }
        let mats = self
            .matrices
            .iter()
            .map(|p| read_matrix(p).with_context(|| format!("reading {}", p.display())))
            .collect::<Result<Vec<_>>>()?;
        Ok(UnitaryTuple::new(mats, tol)?)
    }
}

#[derive(Args, Debug)]
pub struct ObstructArgs {
    #[command(flatten)]
    input: TupleInput,
    /// Monomial degree bound; defaults to the tolerance config.
    #[arg(long)]
    n_monomial: Option<u32>,
    /// Certification threshold; defaults to the tolerance config.
    #[arg(long)]
    delta_cert: Option<f64>,
}

pub fn obstruct(global: &GlobalOpts, a: ObstructArgs) -> Result<u8> {
    let tol = tolerances(global)?;
    let theta = a.input.theta()?;
    let tuple = a.input.tuple(&tol)?;
    let report = obstruction_report(
        &theta,
        &tuple,
        a.n_monomial.unwrap_or(tol.n_monomial),
        a.delta_cert.unwrap_or(tol.delta_cert),
        &tol,
    )?;
    let dir = out_dir(global)?;
    if global.format.json() {
        write_json(dir, "report.json", &tol, &report)?;
    }
    if global.format.csv() {
        write_report_csv(create(dir, "report.csv")?, &report)?;
    }
    println!(
        "verdict: {:?} (max defect {:.3e})",
        report.verdict, report.defect_max
    );
    Ok(match report.verdict {
        Verdict::Unobstructed => 0,
        Verdict::Obstructed => 2,
        Verdict::Indeterminate => 3,
    })
}

#[derive(Args, Debug)]
pub struct ExelSuiteArgs {
    #[arg(long, default_value_t = 200)]
    cases: usize,
    #[arg(long, default_value_t = 2)]
    q_min: u64,
    #[arg(long, default_value_t = 12)]
    q_max: u64,
    #[arg(long, default_value_t = 4)]
    max_mult: usize,
    #[arg(long, default_value_t = 1e-6)]
    noise_min: f64,
    #[arg(long, default_value_t = 1e-2)]
    noise_max: f64,
    /// Every k-th case is exact (0 disables).
    #[arg(long, default_value_t = 10)]
    zero_noise_every: usize,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
}

pub fn exel_suite(global: &GlobalOpts, a: ExelSuiteArgs) -> Result<u8> {
    let tol = tolerances(global)?;
    let cfg = ExelSuiteConfig {
        q_min: a.q_min,
        q_max: a.q_max,
        max_multiplicity: a.max_mult,
        noise_min: a.noise_min,
        noise_max: a.noise_max,
        zero_noise_every: a.zero_noise_every,
        target_cases: a.cases,
        max_attempts: a.cases.saturating_mul(10).max(100),
        tolerance: a.tolerance,
        seed: global.seed,
    };
    let summary = run_exel_suite(&cfg, &tol)?;
    let dir = out_dir(global)?;
    if global.format.json() {
        write_json(dir, "exel_suite.json", &tol, &summary)?;
    }
    if global.format.csv() {
        write_rows(
            create(dir, "exel_cases.csv")?,
            EXEL_CASE_COLUMNS,
            &summary.cases,
        )?;
    }
    println!(
        "{} validated, {} skipped, {} failed; max |lhs - rhs| = {:.3e}",
        summary.validated, summary.skipped, summary.failed, summary.max_abs_diff
    );
    Ok(if summary.passed { 0 } else { 1 })
}

#[derive(Args, Debug)]
pub struct RepairArgs {
    #[command(flatten)]
    input: TupleInput,
    /// Instead of reading matrices, plant an instance with this noise (rational Θ only).
    #[arg(long, conflicts_with = "matrices")]
    plant_noise: Option<f64>,
    #[arg(long, default_value_t = 1)]
    mult: usize,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    defect_target: Option<f64>,
}

pub fn repair(global: &GlobalOpts, a: RepairArgs) -> Result<u8> {
    let tol = tolerances(global)?;
    let theta = a.input.theta()?;
    let tuple = match a.plant_noise {
        Some(noise) => plant_instance(&theta, a.mult, noise, global.seed)?.tuple,
        None => a.input.tuple(&tol)?,
    };
    let defaults = SearchConfig::default();
    let cfg = SearchConfig {
        mu: a.mu.unwrap_or(defaults.mu),
        max_iters: a.max_iters.unwrap_or(defaults.max_iters),
        defect_target: a.defect_target.unwrap_or(defaults.defect_target),
        seed: global.seed,
        ..defaults
    };
    let result = repair_outcome(&theta, &tuple, &cfg)?;
    let dir = out_dir(global)?;
    if global.format.json() {
        write_json(dir, "repair.json", &tol, &result)?;
        write_tuple(dir, "repaired", &result.repaired)?;
    }
    if global.format.csv() {
        write_trace_csv(create(dir, "objective_trace.csv")?, &result.objective_trace)?;
    }
    println!(
        "converged: {} after {} iterations; defect {:.3e}, distance moved {:.3e}",
        result.converged, result.iterations, result.final_defect, result.distance_moved
    );
    Ok(0)
}

#[derive(Args, Debug)]
pub struct CounterexampleArgs {
    #[arg(long, default_value_t = 2)]
    n_min: usize,
    #[arg(long, default_value_t = 50)]
    n_max: usize,
}

pub fn counterexample(global: &GlobalOpts, a: CounterexampleArgs) -> Result<u8> {
    let tol = tolerances(global)?;
    let rows = counterexample_sweep(a.n_min, a.n_max, &tol)?;
    let dir = out_dir(global)?;
    if global.format.json() {
        write_json(dir, "counterexample.json", &tol, &rows)?;
    }
    if global.format.csv() {
        write_rows(
            create(dir, "counterexample.csv")?,
            COUNTEREXAMPLE_COLUMNS,
            &rows,
        )?;
    }
    let indices: Vec<String> = rows
        .iter()
        .map(|r| r.bott_index.map_or("-".to_string(), |b| b.to_string()))
        .collect();
    println!(
        "index by n = {}..{}: {}",
        a.n_min,
        a.n_max,
        indices.join(" ")
    );
    Ok(0)
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    #[arg(long)]
    theta: RationalPhase,
    #[arg(long, default_value_t = 1)]
    mult: usize,
    /// Comma-separated noise levels; a default grid from 1.5 down to 1e-10 otherwise.
    #[arg(long, value_delimiter = ',')]
    noise: Vec<f64>,
}

pub fn calibrate(global: &GlobalOpts, a: CalibrateArgs) -> Result<u8> {
    let tol = tolerances(global)?;
    let mut cfg = CalibrationConfig::new(a.theta, a.mult, global.seed);
    if !a.noise.is_empty() {
        cfg.noise_grid = a.noise;
    }
    let table = gap_calibration(&cfg, &tol)?;
    let dir = out_dir(global)?;
    if global.format.json() {
        write_json(dir, "calibration.json", &tol, &table)?;
    }
    if global.format.csv() {
        write_rows(
            create(dir, "calibration.csv")?,
            CALIBRATION_COLUMNS,
            &table.rows,
        )?;
    }
    match table.threshold {
        Some(t) => println!("‖e² − e‖ < 1/4 for every sampled defect ≤ {t:.3e}"),
        None => println!("no sampled defect kept ‖e² − e‖ below 1/4"),
    }
    Ok(0)
}
