//! Subcommand implementations; the binary only parses arguments and maps
//! results to exit codes.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use chidenn_td::alloc::measure_peak;
use chidenn_td::grid::GridField;
use chidenn_td::oracles::{
    dense_galerkin_2d, energy_norm_error, fdm_storage_bytes, rel_l2_error, solve_diffusion_fdm3d, solve_poisson_grid2d,
    AnalyticGradient, FdmConfig, GradientField, GridGradient,
};
use chidenn_td::problem::{
    diffusion_spacetime_problem, manufactured_poisson_gradient, manufactured_poisson_problem, poisson2d_problem,
    DiffusionConstants, DiffusionSign,
};
use chidenn_td::separated::SeparatedSolution;
use chidenn_td::solver::{solve, SolveTrace, SweepPhase};
use chidenn_td::{Grid, Hyperparams, Problem, Solution};

use crate::config::{variant_name, ConfigError, LoadKind, ProblemId, ReferenceKind, RunConfig};

pub const SOLUTION_FILE: &str = "solution.chtd";
pub const TRACE_FILE: &str = "trace.csv";
pub const METADATA_FILE: &str = "metadata.txt";
pub const STUDY_FILE: &str = "convergence.csv";
pub const BENCHMARK_FILE: &str = "benchmark.csv";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] chidenn_td::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Process exit codes.
pub mod exit {
    pub const CONVERGED: i32 = 0;
    pub const NOT_CONVERGED: i32 = 2;
    pub const CONFIG_ERROR: i32 = 3;
    pub const RUNTIME_ERROR: i32 = 4;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG_ERROR,
            _ => exit::RUNTIME_ERROR,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

pub fn build_problem(cfg: &RunConfig) -> CliResult<Problem> {
    build_problem_with(cfg, &cfg.n_elem, cfg.hyper)
}

fn build_problem_with(cfg: &RunConfig, n_elem: &[usize], hyper: Hyperparams<f64>) -> CliResult<Problem> {
    Ok(match cfg.problem {
        ProblemId::Poisson2d => {
            let n = [n_elem[0], n_elem[1]];
            match cfg.load {
                LoadKind::Gaussian => poisson2d_problem(n, hyper)?,
                LoadKind::Manufactured => manufactured_poisson_problem(n, hyper)?,
            }
        }
        ProblemId::Diffusion4d => {
            let sign = if cfg.verbatim_sign {
                DiffusionSign::Verbatim
            } else {
                DiffusionSign::Corrected
            };
            let n = [n_elem[0], n_elem[1], n_elem[2], n_elem[3]];
            diffusion_spacetime_problem(n, hyper, &DiffusionConstants::default(), sign)?
        }
    })
}

/// Gradient reference for Poisson energy errors.
pub fn poisson_reference(cfg: &RunConfig, kind: ReferenceKind, problem: &Problem) -> CliResult<Box<dyn GradientField>> {
    Ok(match kind {
        ReferenceKind::Exact => Box::new(AnalyticGradient(manufactured_poisson_gradient)),
        ReferenceKind::Grid => {
            let source = problem.source.clone();
            let field = solve_poisson_grid2d(cfg.reference_points, 0.0, 10.0, |x, y| source.eval(&[x, y]))?;
            Box::new(GridGradient::new(&field)?)
        }
        ReferenceKind::Dense => Box::new(GridGradient::new(&dense_galerkin_2d(problem, None)?)?),
        ReferenceKind::None => unreachable!("callers skip the none reference"),
    })
}

/// Separated solution at `t_end` on the FDM grid of the same points per axis.
pub fn final_time_field(sol: &Solution, coords: &[Vec<f64>]) -> CliResult<Grid> {
    let t_end = sol.dims()[3].mesh.x_max();
    let mut samples = coords.to_vec();
    samples.push(vec![t_end]);
    let g = sol.evaluate_grid(&samples)?;
    Ok(GridField::new("td", coords.to_vec(), g.values)?.with_axis_labels(&["x", "y", "z"]))
}

fn fdm_config(cfg: &RunConfig, points: usize) -> FdmConfig {
    let mut f = FdmConfig::new(points);
    f.safety = cfg.fdm_safety;
    f.memory_guard = cfg.fdm_memory_guard;
    f.snapshot_stride = (cfg.fdm_snapshot_stride > 0).then_some(cfg.fdm_snapshot_stride);
    f.sampling = cfg.fdm_sampling;
    f
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub converged: bool,
    pub trace: SolveTrace,
    pub files: Vec<PathBuf>,
    /// `(name, value)` error metrics against the configured reference.
    pub metrics: Vec<(String, f64)>,
}

impl SolveReport {
    pub fn exit_code(&self) -> i32 {
        if self.converged {
            exit::CONVERGED
        } else {
            exit::NOT_CONVERGED
        }
    }
}

pub fn write_trace_csv(trace: &SolveTrace, labels: &[&str], w: impl Write) -> CliResult<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["sweep".to_string(), "phase".into(), "change".into()];
    header.extend(labels.iter().map(|l| format!("residual_{l}")));
    header.push("wall_seconds".into());
    out.write_record(&header)?;
    for (i, s) in trace.sweeps.iter().enumerate() {
        let phase = match s.phase {
            SweepPhase::AllRanks => "all".to_string(),
            SweepPhase::Rank(m) => format!("rank{m}"),
        };
        let mut row = vec![(i + 1).to_string(), phase, fmt(s.change)];
        row.extend(s.residuals.iter().map(|&r| fmt(r)));
        row.push(fmt(s.wall_seconds));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

fn write_metadata(path: &Path, cfg: &RunConfig, command: &str, results: &[(String, String)]) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# chtd {} {}", env!("CARGO_PKG_VERSION"), command)?;
    writeln!(w, "# library chidenn-td {}", env!("CARGO_PKG_VERSION"))?;
    for (k, v) in cfg.to_pairs() {
        writeln!(w, "{k} = {v}")?;
    }
    for (k, v) in results {
        writeln!(w, "# result {k} = {v}")?;
    }
    w.flush()?;
    Ok(())
}

/// Solves once and writes the solution, the sweep trace and the metadata.
pub fn run_solve(cfg: &RunConfig) -> CliResult<SolveReport> {
    fs::create_dir_all(&cfg.output_dir)?;
    let problem = build_problem(cfg)?;
    let clock = Instant::now();
    let (result, peak) = measure_peak(|| solve(&problem, &cfg.solver));
    let (sol, trace) = result?;
    let wall = clock.elapsed().as_secs_f64();
    let solution_path = cfg.output_dir.join(SOLUTION_FILE);
    sol.export(&solution_path)?;
    let labels: Vec<&str> = problem.dims.iter().map(|d| d.label.as_str()).collect();
    let trace_path = cfg.output_dir.join(TRACE_FILE);
    write_trace_csv(&trace, &labels, BufWriter::new(File::create(&trace_path)?))?;

    let mut metrics = Vec::new();
    match (cfg.problem, cfg.reference) {
        (_, ReferenceKind::None) => {}
        (ProblemId::Poisson2d, kind) => {
            let r = poisson_reference(cfg, kind, &problem)?;
            metrics.push(("energy_error".to_string(), energy_norm_error(&sol, r.as_ref())?));
        }
        (ProblemId::Diffusion4d, _) => {
            let points = spatial_points(cfg)?;
            let fdm = solve_diffusion_fdm3d(&fdm_config(cfg, points), &problem.source)?;
            let td = final_time_field(&sol, &fdm.field.coords)?;
            metrics.push(("rel_l2_vs_fdm".to_string(), rel_l2_error(&td, &fdm.field)?.value));
        }
    }
    let mut results = vec![
        ("converged".to_string(), trace.converged.to_string()),
        ("sweeps".to_string(), trace.sweeps.len().to_string()),
        (
            "final_change".to_string(),
            trace.final_change().map_or("none".into(), fmt),
        ),
        (
            "retired_ranks".to_string(),
            trace.retired.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
        ),
        ("storage_bytes".to_string(), sol.storage_bytes().to_string()),
        ("peak_tracked_bytes".to_string(), peak.to_string()),
        ("wall_seconds".to_string(), fmt(wall)),
    ];
    results.extend(metrics.iter().map(|(k, v)| (k.clone(), fmt(*v))));
    let meta_path = cfg.output_dir.join(METADATA_FILE);
    write_metadata(&meta_path, cfg, "solve", &results)?;
    Ok(SolveReport {
        converged: trace.converged,
        trace,
        files: vec![solution_path, trace_path, meta_path],
        metrics,
    })
}

fn spatial_points(cfg: &RunConfig) -> CliResult<usize> {
    let n = cfg.n_elem[0];
    if cfg.n_elem[1] != n || cfg.n_elem[2] != n {
        return Err(ConfigError::Key {
            key: "n_elem".into(),
            reason: "the FDM comparison needs equal spatial element counts".into(),
        }
        .into());
    }
    Ok(n + 1)
}

/// One row of the convergence study.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyRow {
    pub grid: usize,
    pub variant: String,
    pub rank: usize,
    pub status: String,
    pub converged: bool,
    pub sweeps: usize,
    pub energy_error: f64,
    pub wall_seconds: f64,
    pub storage_bytes: u64,
}

pub const STUDY_COLUMNS: [&str; 9] = [
    "grid",
    "variant",
    "rank",
    "status",
    "converged",
    "sweeps",
    "energy_error",
    "wall_seconds",
    "storage_bytes",
];

/// Energy error for every (grid, variant, rank) on the Poisson problem.
/// Solver failures become rows with an error status.
pub fn run_convergence_study(cfg: &RunConfig) -> CliResult<Vec<StudyRow>> {
    if cfg.problem != ProblemId::Poisson2d {
        return Err(ConfigError::Key {
            key: "problem".into(),
            reason: "the convergence study runs on poisson2d".into(),
        }
        .into());
    }
    let kind = match (cfg.reference, cfg.load) {
        (ReferenceKind::None, LoadKind::Manufactured) => ReferenceKind::Exact,
        (ReferenceKind::None, LoadKind::Gaussian) => ReferenceKind::Grid,
        (k, _) => k,
    };
    // grid and exact references do not depend on the mesh
    let shared = match kind {
        ReferenceKind::Dense => None,
        k => Some(poisson_reference(cfg, k, &build_problem(cfg)?)?),
    };
    let mut rows = Vec::new();
    for &grid in &cfg.grids {
        for hyper in &cfg.variants {
            let problem = build_problem_with(cfg, &[grid, grid], *hyper).map_err(|e| e.to_string());
            let dense = match (&problem, kind) {
                (Ok(p), ReferenceKind::Dense) => Some(poisson_reference(cfg, kind, p).map_err(|e| e.to_string())),
                _ => None,
            };
            for &rank in &cfg.ranks {
                let mut solver = cfg.solver.clone();
                solver.rank = rank;
                let clock = Instant::now();
                let outcome = problem.clone().and_then(|problem| {
                    let (sol, trace) = solve(&problem, &solver).map_err(|e| e.to_string())?;
                    let reference: &dyn GradientField = match (&shared, &dense) {
                        (Some(r), _) => r.as_ref(),
                        (None, Some(Ok(r))) => r.as_ref(),
                        (None, Some(Err(e))) => return Err(format!("dense reference failed: {e}")),
                        (None, None) => unreachable!("one reference is always built"),
                    };
                    let err = energy_norm_error(&sol, reference).map_err(|e| e.to_string())?;
                    Ok((err, trace, sol.storage_bytes()))
                });
                let wall_seconds = clock.elapsed().as_secs_f64();
                let variant = variant_name(hyper);
                rows.push(match outcome {
                    Ok((err, trace, bytes)) => StudyRow {
                        grid,
                        variant,
                        rank,
                        status: if trace.converged { "ok" } else { "not converged" }.into(),
                        converged: trace.converged,
                        sweeps: trace.sweeps.len(),
                        energy_error: err,
                        wall_seconds,
                        storage_bytes: bytes,
                    },
                    Err(e) => StudyRow {
                        grid,
                        variant,
                        rank,
                        status: format!("error: {e}"),
                        converged: false,
                        sweeps: 0,
                        energy_error: f64::NAN,
                        wall_seconds,
                        storage_bytes: 0,
                    },
                });
                log::info!(
                    "grid {grid} {} rank {rank}: {}",
                    variant_name(hyper),
                    rows.last().expect("row").status
                );
            }
        }
    }
    fs::create_dir_all(&cfg.output_dir)?;
    let mut w = csv::Writer::from_path(cfg.output_dir.join(STUDY_FILE))?;
    w.write_record(STUDY_COLUMNS)?;
    for r in &rows {
        w.write_record([
            r.grid.to_string(),
            r.variant.clone(),
            r.rank.to_string(),
            r.status.clone(),
            r.converged.to_string(),
            r.sweeps.to_string(),
            fmt(r.energy_error),
            fmt(r.wall_seconds),
            r.storage_bytes.to_string(),
        ])?;
    }
    w.flush()?;
    write_metadata(
        &cfg.output_dir.join(METADATA_FILE),
        cfg,
        "convergence-study",
        &[("reference_used".into(), kind.name().into())],
    )?;
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchMethod {
    Td,
    Fdm,
    Dense,
}

impl BenchMethod {
    pub fn name(self) -> &'static str {
        match self {
            BenchMethod::Td => "TD",
            BenchMethod::Fdm => "FDM",
            BenchMethod::Dense => "DENSE",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub method: BenchMethod,
    pub points_per_axis: usize,
    pub grid: String,
    pub status: String,
    pub wall_seconds: f64,
    /// Peak bytes seen by the allocation counters (0 when not installed).
    pub peak_bytes: u64,
    pub storage_bytes: u64,
    pub rel_l2_td_vs_fdm: f64,
}

pub const BENCH_COLUMNS: [&str; 8] = [
    "method",
    "points_per_axis",
    "grid",
    "status",
    "wall_seconds",
    "peak_bytes",
    "storage_bytes",
    "rel_l2_td_vs_fdm",
];

/// Space-time TD against explicit FDM for each per-axis size.
pub fn run_benchmark(cfg: &RunConfig) -> CliResult<Vec<BenchRecord>> {
    if cfg.problem != ProblemId::Diffusion4d {
        return Err(ConfigError::Key {
            key: "problem".into(),
            reason: "the benchmark runs on diffusion4d".into(),
        }
        .into());
    }
    let mut records = Vec::new();
    for &points in &cfg.sizes {
        let ne = points - 1;
        let nt = cfg.time_elements.unwrap_or(2 * ne);
        let problem = build_problem_with(cfg, &[ne, ne, ne, nt], cfg.hyper)?;
        let clock = Instant::now();
        let (td, td_peak) = measure_peak(|| solve(&problem, &cfg.solver));
        let td_wall = clock.elapsed().as_secs_f64();
        let mut td_record = BenchRecord {
            method: BenchMethod::Td,
            points_per_axis: points,
            grid: format!("{points}^3 x {}", nt + 1),
            status: String::new(),
            wall_seconds: td_wall,
            peak_bytes: td_peak as u64,
            storage_bytes: 0,
            rel_l2_td_vs_fdm: f64::NAN,
        };
        let td = match td {
            Ok((sol, trace)) => {
                td_record.status = if trace.converged { "ok" } else { "not converged" }.into();
                td_record.storage_bytes = sol.storage_bytes();
                Some(sol)
            }
            Err(e) => {
                td_record.status = format!("error: {e}");
                None
            }
        };

        let fcfg = fdm_config(cfg, points);
        let mut fdm_record = BenchRecord {
            method: BenchMethod::Fdm,
            points_per_axis: points,
            grid: format!("{points}^3"),
            status: String::new(),
            wall_seconds: f64::NAN,
            peak_bytes: 0,
            storage_bytes: 0,
            rel_l2_td_vs_fdm: f64::NAN,
        };
        match fcfg.validate() {
            Err(chidenn_td::Error::MemoryGuard { .. }) => fdm_record.status = "skipped: memory guard".into(),
            Err(e) => fdm_record.status = format!("error: {e}"),
            Ok(()) => {
                let clock = Instant::now();
                let (fdm, peak) = measure_peak(|| solve_diffusion_fdm3d(&fcfg, &problem.source));
                fdm_record.wall_seconds = clock.elapsed().as_secs_f64();
                fdm_record.peak_bytes = peak as u64;
                match fdm {
                    Ok(r) => {
                        fdm_record.status = "ok".into();
                        fdm_record.grid = format!("{points}^3 x {} steps", r.steps);
                        fdm_record.storage_bytes = fdm_storage_bytes(points, r.snapshots.len().max(1));
                        if let Some(sol) = &td {
                            let field = final_time_field(sol, &r.field.coords)?;
                            let e = rel_l2_error(&field, &r.field)?.value;
                            td_record.rel_l2_td_vs_fdm = e;
                            fdm_record.rel_l2_td_vs_fdm = e;
                        }
                    }
                    Err(e) => fdm_record.status = format!("error: {e}"),
                }
            }
        }
        log::info!(
            "size {points}: TD {} ({:.3} s), FDM {}",
            td_record.status,
            td_record.wall_seconds,
            fdm_record.status
        );
        records.push(td_record);
        records.push(fdm_record);
    }
    fs::create_dir_all(&cfg.output_dir)?;
    let mut w = csv::Writer::from_path(cfg.output_dir.join(BENCHMARK_FILE))?;
    w.write_record(BENCH_COLUMNS)?;
    for r in &records {
        w.write_record([
            r.method.name().to_string(),
            r.points_per_axis.to_string(),
            r.grid.clone(),
            r.status.clone(),
            fmt(r.wall_seconds),
            r.peak_bytes.to_string(),
            r.storage_bytes.to_string(),
            fmt(r.rel_l2_td_vs_fdm),
        ])?;
    }
    w.flush()?;
    write_metadata(&cfg.output_dir.join(METADATA_FILE), cfg, "benchmark", &[])?;
    Ok(records)
}

/// Computes the configured full-grid reference and writes it as CSV and raw
/// tensor. Returns the written paths.
pub fn run_reference(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let problem = build_problem(cfg)?;
    let field = match (cfg.problem, cfg.reference) {
        (ProblemId::Poisson2d, ReferenceKind::Dense) => dense_galerkin_2d(&problem, None)?,
        (ProblemId::Poisson2d, _) => {
            let source = problem.source.clone();
            solve_poisson_grid2d(cfg.reference_points, 0.0, 10.0, |x, y| source.eval(&[x, y]))?
        }
        (ProblemId::Diffusion4d, _) => {
            solve_diffusion_fdm3d(&fdm_config(cfg, spatial_points(cfg)?), &problem.source)?.field
        }
    };
    fs::create_dir_all(&cfg.output_dir)?;
    let csv_path = cfg.output_dir.join("reference.csv");
    field.write_csv(BufWriter::new(File::create(&csv_path)?))?;
    let raw_path = cfg.output_dir.join("reference.chgf");
    field.write_raw(&raw_path)?;
    Ok(vec![csv_path, raw_path])
}

/// Human-readable summary of a CHTD1 file.
pub fn inspect(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path)?;
    let sol = SeparatedSolution::<f64>::from_bytes(&bytes)?;
    let mut out = String::new();
    out.push_str(&format!("file: {}\n", path.display()));
    out.push_str(&format!("format: CHTD version 1, {} bytes\n", bytes.len()));
    out.push_str(&format!("dimensions: {}\nrank: {}\n", sol.dim_count(), sol.rank()));
    for d in sol.dims() {
        let h = &d.hyper;
        out.push_str(&format!(
            "  {}: [{:e}, {:e}] n_elem={} kind={} s={} a={:e} p={} constrained={:?}\n",
            d.label,
            d.mesh.x_min(),
            d.mesh.x_max(),
            d.mesh.n_elem(),
            crate::config::kind_name(h.kind),
            h.s,
            h.a,
            h.p,
            d.constraints.constrained()
        ));
    }
    out.push_str(&format!("storage_bytes: {}\n", sol.storage_bytes()));
    out.push_str(&format!("live ranks: {:?}\n", sol.live_ranks()));
    Ok(out)
}
