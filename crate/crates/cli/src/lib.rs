//! Experiment orchestration behind the `rumorgame` binary.

pub mod config;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use rumorgame::emergence::{build_initiated_graph, build_regular_graph, run_emergence};
use rumorgame::engine::Simulation;
use rumorgame::nash::{self, EquilibriumProfile, VERIFY_TOL};
use rumorgame::{PayoffMatrix, SelectionRule};

use config::{ConfigError, ExperimentKind, GraphKind, RunConfig};
use output::{write_atomic, Table};

/// Reference exponent of the emergent degree distribution.
pub const REFERENCE_EXPONENT: f64 = -1.86;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] rumorgame::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("matrix file: {0}")]
    Matrix(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(name);
    write_atomic(&path, bytes).map_err(io_err(&path))
}

/// JSON game description for the `solve` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub row_payoffs: Vec<Vec<f64>>,
    pub col_payoffs: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &PayoffMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            row_payoffs: m.row_grid(),
            col_payoffs: m.col_grid(),
        }
    }
}

pub fn parse_matrix(text: &str) -> Result<PayoffMatrix> {
    let f: MatrixFile = serde_json::from_str(text).map_err(|e| CliError::Matrix(e.to_string()))?;
    let m = PayoffMatrix::from_grids(&f.row_payoffs, &f.col_payoffs)?;
    if (m.rows(), m.cols()) != (f.rows, f.cols) {
        return Err(CliError::Matrix(format!(
            "declared {}x{} but payoffs are {}x{}",
            f.rows,
            f.cols,
            m.rows(),
            m.cols()
        )));
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub equilibria: Vec<EquilibriumProfile>,
    pub selected: EquilibriumProfile,
}

pub fn solve_matrix(m: &PayoffMatrix, rule: SelectionRule) -> Result<SolveReport> {
    let equilibria = nash::enumerate_equilibria(m, VERIFY_TOL)?;
    let selected = nash::select_equilibrium(&equilibria, m, rule)?;
    Ok(SolveReport { equilibria, selected })
}

fn fmt_probs(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
    format!("({})", parts.join(", "))
}

pub fn describe_profile(p: &EquilibriumProfile) -> String {
    format!(
        "row {} col {} payoffs ({}, {})",
        fmt_probs(p.sigma_row.probabilities()),
        fmt_probs(p.sigma_col.probabilities()),
        p.payoff_row,
        p.payoff_col
    )
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    experiment: ExperimentKind,
    files: &'a [&'a str],
}

fn write_manifest(dir: &Path, cfg: &RunConfig, files: &[&str]) -> Result<()> {
    write(dir, "config.json", cfg.to_json().as_bytes())?;
    let m = Manifest {
        schema_version: output::SCHEMA_VERSION,
        experiment: cfg.kind,
        files,
    };
    let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
    write(dir, "manifest.json", text.as_bytes())
}

/// Runs the dissemination experiment; returns the summary line.
pub fn run_disseminate(cfg: &RunConfig, out: &Path) -> Result<String> {
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut sim = Simulation::new(cfg.population_spec())?;
    let mut events = cfg.events.then(|| Table::new(&output::EVENT_HEADER));
    let mut game = 0u64;
    let series = sim.run(cfg.total_games, cfg.snapshot_interval, cfg.n_bins, |ev| {
        game += 1;
        if let Some(t) = events.as_mut() {
            output::event_row(t, game, ev);
        }
    })?;
    let mut files = vec!["knowledge_hist.csv"];
    write(
        out,
        "knowledge_hist.csv",
        &output::knowledge_table(&series).into_bytes(),
    )?;
    if let Some(t) = events {
        write(out, "events.csv", &t.into_bytes())?;
        files.push("events.csv");
    }
    write_manifest(out, cfg, &files)?;
    let last = series.last().expect("series includes the initial snapshot");
    Ok(format!(
        "final mean k {:.6} at time {} after {} games",
        last.mean_k, last.time, last.games
    ))
}

/// Runs the emergence experiment; returns the summary line.
pub fn run_emerge(cfg: &RunConfig, out: &Path) -> Result<String> {
    fs::create_dir_all(out).map_err(io_err(out))?;
    let graph = match cfg.graph {
        GraphKind::Regular => build_regular_graph(cfg.n_actors, cfg.degree, cfg.seed)?,
        GraphKind::Initiated => build_initiated_graph(cfg.n_actors, cfg.degree, cfg.seed)?,
    };
    info!("built graph with {} edges", graph.edge_count());
    let reports = run_emergence(&graph, &cfg.population_spec(), &cfg.emergence)?;
    let e = &cfg.emergence;
    write(
        out,
        "degree_hist.csv",
        &output::degree_table(&graph.degree_histogram(), &reports).into_bytes(),
    )?;
    write(
        out,
        "fit.csv",
        &output::fit_table(&reports, e.fit_min, e.fit_max).into_bytes(),
    )?;
    write(
        out,
        "edges.csv",
        &output::edge_table(&reports, e.prune_rule).into_bytes(),
    )?;
    write_manifest(out, cfg, &["degree_hist.csv", "fit.csv", "edges.csv"])?;

    let mut counts = vec![graph.edge_count().to_string()];
    counts.extend(reports.iter().map(|r| r.graph.edge_count().to_string()));
    let exponent = match reports.first().and_then(|r| r.fit) {
        Some(f) => format!("{:.4}", f.exponent),
        None => "n/a".to_string(),
    };
    Ok(format!(
        "iteration-1 exponent {exponent} over [{}, {}] (reference {REFERENCE_EXPONENT}); edges {}",
        e.fit_min,
        e.fit_max,
        counts.join(" -> ")
    ))
}

/// Runs the workflow selected by `cfg.kind`.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<String> {
    match cfg.kind {
        ExperimentKind::Disseminate => run_disseminate(cfg, out),
        ExperimentKind::Emerge => run_emerge(cfg, out),
        ExperimentKind::Solve => Err(CliError::Config(ConfigError::Invalid {
            field: "experiment".into(),
            constraint: "solve takes a matrix file, not a run config".into(),
        })),
    }
}

/// Runs `count` replications in parallel; replication `i` uses seed
/// `cfg.seed + i` and writes to `out/rep_i`.
pub fn run_replications(cfg: &RunConfig, out: &Path, count: usize) -> Result<Vec<String>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..count)
            .map(|i| {
                let mut c = cfg.clone();
                c.seed = cfg.seed.wrapping_add(i as u64);
                let dir = out.join(format!("rep_{i}"));
                s.spawn(move || run(&c, &dir))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("replication thread panicked"))
            .collect()
    })
}
