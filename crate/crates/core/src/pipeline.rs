//! End-to-end runs: snapshots, parallel collapse, core tower, equivalent
//! filtration, diagram.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::collapse::{core, RetractionMap};
use crate::complex::{ComplexError, ComplexMatrix, ComplexStats, DEFAULT_EXPANSION_CAP};
use crate::persistence::{compute_persistence, snapshot_filtration, PersistenceDiagram, PersistenceError};
use crate::rips::{rips_snapshot, DistanceMatrix, SnapshotSchedule};
use crate::tower::{assemble_core_tower, tower_to_filtration, Tower, TowerError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
}

impl PipelineError {
    /// True when a full expansion hit the configured cap.
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(
            self,
            PipelineError::Tower(TowerError::Complex(ComplexError::ExpansionTooLarge { .. }))
                | PipelineError::Persistence(PersistenceError::Complex(ComplexError::ExpansionTooLarge { .. }))
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    pub workers: usize,
    /// When false, the snapshots are expanded and reduced without collapse.
    pub collapse: bool,
    pub cap: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            workers: 1,
            collapse: true,
            cap: DEFAULT_EXPANSION_CAP,
        }
    }
}

/// Sizes of one snapshot before and after collapse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotStats {
    pub grade: f64,
    pub before: ComplexStats,
    pub after: ComplexStats,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    /// Longest single collapse across workers.
    pub collapse_max: Duration,
    /// Tower assembly plus conversion to a filtration.
    pub assembly: Duration,
    pub reduction: Duration,
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub diagram: PersistenceDiagram,
    /// Present only for collapsed runs.
    pub tower: Option<Tower>,
    /// Number of cells in the filtration that was reduced.
    pub filtration_size: usize,
    pub stats: Vec<SnapshotStats>,
    pub timings: Timings,
}

struct SnapshotResult {
    input: ComplexMatrix,
    core: ComplexMatrix,
    retraction: RetractionMap,
    elapsed: Duration,
}

/// Runs the pipeline on snapshots produced by `build(k)` for each grade.
///
/// Snapshots are built and collapsed on a pool of `options.workers` threads;
/// everything after that is sequential and consumes results in snapshot
/// order, so output does not depend on the worker count.
pub fn run_snapshots<F>(build: F, grades: &[f64], options: PipelineOptions) -> Result<PipelineRun, PipelineError>
where
    F: Fn(usize) -> ComplexMatrix + Sync,
{
    if options.workers == 0 {
        return Err(PipelineError::NoWorkers);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| PipelineError::Pool(e.to_string()))?;
    let collapse = options.collapse;
    let results: Vec<SnapshotResult> = pool.install(|| {
        (0..grades.len())
            .into_par_iter()
            .map(|k| {
                let input = build(k);
                let start = Instant::now();
                let (core_m, retraction) = if collapse {
                    let c = core(&input);
                    (c.core, c.retraction)
                } else {
                    (input.clone(), RetractionMap::identity(input.vertices()))
                };
                SnapshotResult {
                    input,
                    core: core_m,
                    retraction,
                    elapsed: start.elapsed(),
                }
            })
            .collect()
    });

    let stats = results
        .iter()
        .zip(grades)
        .map(|(r, &grade)| SnapshotStats {
            grade,
            before: r.input.stats(),
            after: r.core.stats(),
        })
        .collect();
    let mut timings = Timings {
        collapse_max: results.iter().map(|r| r.elapsed).max().unwrap_or_default(),
        ..Default::default()
    };

    let start = Instant::now();
    let (filtration, tower) = if collapse {
        let cores: Vec<ComplexMatrix> = results.iter().map(|r| r.core.clone()).collect();
        let retractions: Vec<RetractionMap> = results.into_iter().map(|r| r.retraction).collect();
        let tower = assemble_core_tower(&cores, &retractions, grades, options.cap)?;
        (tower_to_filtration(&tower)?, Some(tower))
    } else {
        let inputs: Vec<ComplexMatrix> = results.into_iter().map(|r| r.input).collect();
        (snapshot_filtration(&inputs, grades, options.cap)?, None)
    };
    timings.assembly = start.elapsed();

    let start = Instant::now();
    let diagram = compute_persistence(&filtration)?;
    timings.reduction = start.elapsed();

    Ok(PipelineRun {
        diagram,
        tower,
        filtration_size: filtration.len(),
        stats,
        timings,
    })
}

/// Rips snapshot pipeline on a distance matrix.
pub fn run_pipeline(
    d: &DistanceMatrix,
    schedule: &SnapshotSchedule,
    options: PipelineOptions,
) -> Result<PipelineRun, PipelineError> {
    let grades = schedule.grades();
    run_snapshots(|k| rips_snapshot(d, grades[k]), grades, options)
}

/// Both pipelines on the same input, for comparison.
pub struct Comparison {
    pub collapsed: PipelineRun,
    pub oracle: PipelineRun,
}

impl Comparison {
    /// Dimensions present in either diagram.
    pub fn dimensions(&self) -> Vec<usize> {
        let max = self
            .collapsed
            .diagram
            .max_dim()
            .into_iter()
            .chain(self.oracle.diagram.max_dim())
            .max()
            .unwrap_or(0);
        (0..=max).collect()
    }

    /// Multiset equality of the two diagrams in dimension `dim`.
    pub fn equal_in(&self, dim: usize) -> bool {
        self.collapsed.diagram.in_dim(dim).eq(self.oracle.diagram.in_dim(dim))
    }

    pub fn bottleneck(&self, dim: usize) -> f64 {
        crate::persistence::bottleneck_distance(&self.collapsed.diagram, &self.oracle.diagram, dim)
    }
}

pub fn compare_pipelines(
    d: &DistanceMatrix,
    schedule: &SnapshotSchedule,
    options: PipelineOptions,
) -> Result<Comparison, PipelineError> {
    let collapsed = run_pipeline(
        d,
        schedule,
        PipelineOptions {
            collapse: true,
            ..options
        },
    )?;
    let oracle = run_pipeline(
        d,
        schedule,
        PipelineOptions {
            collapse: false,
            ..options
        },
    )?;
    Ok(Comparison { collapsed, oracle })
}
