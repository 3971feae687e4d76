//! Strong collapse of a complex to its core.
//!
//! The collapse works on the vertex/maximal-simplex matrix only. A row is
//! dominated when its column set is contained in another row's, which is
//! exactly the case where the vertex is dominated in the complex. Removing
//! rows can make columns non-maximal; those are removed in turn, which can
//! expose new dominated rows. Candidate queues keep the work proportional to
//! what actually changed.

use std::cell::Cell;
use std::collections::VecDeque;

use thiserror::Error;

use crate::complex::{ComplexMatrix, Simplex, VertexId};
use crate::sorted::{is_subset, remove_sorted};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CollapseError {
    #[error("trace replay failed at event {index}: {reason}")]
    InvalidReplay { index: usize, reason: String },
}

/// Vertex map from a complex onto its core. Every vertex maps to a fixed
/// point, so the map is idempotent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetractionMap {
    sources: Vec<VertexId>,
    targets: Vec<VertexId>,
}

impl RetractionMap {
    pub fn identity(vertices: &[VertexId]) -> Self {
        RetractionMap {
            sources: vertices.to_vec(),
            targets: vertices.to_vec(),
        }
    }

    /// Builds a map from `(source, target)` pairs. Sources must be distinct.
    pub fn from_pairs(mut pairs: Vec<(VertexId, VertexId)>) -> Self {
        pairs.sort_unstable();
        let (sources, targets) = pairs.into_iter().unzip();
        RetractionMap { sources, targets }
    }

    pub fn get(&self, v: VertexId) -> Option<VertexId> {
        self.sources.binary_search(&v).ok().map(|i| self.targets[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.sources.iter().copied().zip(self.targets.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.sources == self.targets
    }

    pub fn fixed_points(&self) -> Vec<VertexId> {
        self.iter().filter(|(s, t)| s == t).map(|(s, _)| s).collect()
    }

    /// Image of a simplex, or `None` if some vertex is outside the domain.
    pub fn apply(&self, s: &Simplex) -> Option<Simplex> {
        let mut image = s.vertices().iter().map(|&v| self.get(v)).collect::<Option<Vec<_>>>()?;
        image.sort_unstable();
        image.dedup();
        Some(Simplex::from_sorted(image))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollapseEvent {
    /// A vertex removed because its row is contained in the dominating row.
    Row { dominated: VertexId, dominating: VertexId },
    /// A maximal simplex removed because it is contained in another column.
    /// Ids are column indices of the input matrix.
    Column { dominated: usize, dominating: usize },
}

/// Ordered log of every removal, sufficient to replay the collapse.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CollapseTrace {
    pub events: Vec<CollapseEvent>,
    /// Number of row and column phases run.
    pub rounds: usize,
}

impl CollapseTrace {
    pub fn removed_rows(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.events.iter().filter_map(|e| match *e {
            CollapseEvent::Row { dominated, dominating } => Some((dominated, dominating)),
            _ => None,
        })
    }

    pub fn removed_columns(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.events.iter().filter_map(|e| match *e {
            CollapseEvent::Column { dominated, dominating } => Some((dominated, dominating)),
            _ => None,
        })
    }
}

/// Subset tests performed, per phase.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CollapseWork {
    pub row_phase_tests: Vec<usize>,
    pub column_phase_tests: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Collapse {
    pub core: ComplexMatrix,
    pub retraction: RetractionMap,
    pub trace: CollapseTrace,
    pub work: CollapseWork,
}

/// Mutable copy of a [`ComplexMatrix`] with row and column deletion.
///
/// Column ids are the input's column indices and are never reused; deleted
/// rows and columns stay addressable but are no longer live.
#[derive(Debug, Clone)]
pub struct CollapseMatrix {
    vertices: Vec<VertexId>,
    rows: Vec<Vec<u32>>,
    cols: Vec<Vec<u32>>,
    row_live: Vec<bool>,
    col_live: Vec<bool>,
    subset_tests: Cell<usize>,
}

impl CollapseMatrix {
    pub fn new(m: &ComplexMatrix) -> Self {
        CollapseMatrix {
            vertices: m.vertices().to_vec(),
            rows: m.row_indices().to_vec(),
            cols: m.col_indices().to_vec(),
            row_live: vec![true; m.num_vertices()],
            col_live: vec![true; m.num_columns()],
            subset_tests: Cell::new(0),
        }
    }

    fn row_index(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn is_row_live(&self, v: VertexId) -> bool {
        self.row_index(v).is_some_and(|r| self.row_live[r])
    }

    pub fn is_column_live(&self, c: usize) -> bool {
        self.col_live.get(c).copied().unwrap_or(false)
    }

    /// Live vertices of column `c`.
    pub fn column_vertices(&self, c: usize) -> Vec<VertexId> {
        self.cols[c].iter().map(|&r| self.vertices[r as usize]).collect()
    }

    fn subset(&self, a: &[u32], b: &[u32]) -> bool {
        self.subset_tests.set(self.subset_tests.get() + 1);
        is_subset(a, b)
    }

    /// `w` dominates `v` when `v`'s columns are a subset of `w`'s; between
    /// equal rows only the smaller id dominates.
    fn dominating_row_of(&self, r: usize) -> Option<usize> {
        let row = &self.rows[r];
        let first = *row.first()? as usize;
        self.cols[first]
            .iter()
            .map(|&w| w as usize)
            .filter(|&w| w != r)
            .find(|&w| {
                let other = &self.rows[w];
                (row.len() < other.len() || w < r) && self.subset(row, other)
            })
    }

    fn dominating_column_of(&self, c: usize) -> Option<usize> {
        let col = &self.cols[c];
        let first = *col.first()? as usize;
        self.rows[first]
            .iter()
            .map(|&s| s as usize)
            .filter(|&s| s != c)
            .find(|&s| {
                let other = &self.cols[s];
                (col.len() < other.len() || s < c) && self.subset(col, other)
            })
    }

    /// Smallest-id live vertex dominating `v`, looking only at the rows of
    /// `v`'s first live column. `v` must be live.
    pub fn find_dominating_row(&self, v: VertexId) -> Option<VertexId> {
        let r = self.row_index(v).filter(|&r| self.row_live[r])?;
        self.dominating_row_of(r).map(|w| self.vertices[w])
    }

    /// Smallest-id live column containing column `c`, looking only at the
    /// columns of `c`'s first live row. `c` must be live.
    pub fn find_dominating_column(&self, c: usize) -> Option<usize> {
        if !self.is_column_live(c) {
            return None;
        }
        self.dominating_column_of(c)
    }

    fn remove_row_index(&mut self, r: usize) -> Vec<u32> {
        self.row_live[r] = false;
        let cols = std::mem::take(&mut self.rows[r]);
        for &c in &cols {
            remove_sorted(&mut self.cols[c as usize], &(r as u32));
        }
        cols
    }

    fn remove_column_index(&mut self, c: usize) -> Vec<u32> {
        self.col_live[c] = false;
        let rows = std::mem::take(&mut self.cols[c]);
        for &r in &rows {
            remove_sorted(&mut self.rows[r as usize], &(c as u32));
        }
        rows
    }

    /// Deletes a live vertex row.
    pub fn remove_row(&mut self, v: VertexId) {
        if let Some(r) = self.row_index(v).filter(|&r| self.row_live[r]) {
            self.remove_row_index(r);
        }
    }

    /// Deletes a live column.
    pub fn remove_column(&mut self, c: usize) {
        if self.is_column_live(c) {
            self.remove_column_index(c);
        }
    }

    /// Live part as a fresh matrix; surviving columns keep their relative
    /// order.
    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_maximal_columns(
            (0..self.cols.len())
                .filter(|&c| self.col_live[c])
                .map(|c| self.column_vertices(c)),
        )
    }

    fn take_subset_tests(&self) -> usize {
        self.subset_tests.replace(0)
    }
}

fn push_unique(queue: &mut VecDeque<usize>, queued: &mut [bool], items: &[u32]) {
    for &x in items {
        let x = x as usize;
        if !queued[x] {
            queued[x] = true;
            queue.push_back(x);
        }
    }
}

/// Strong-collapses `m` to its core.
///
/// All rows are queued in increasing vertex order, then row and column
/// phases alternate until a phase leaves the other queue empty. Queues are
/// FIFO; items removed in one phase enqueue their incident lines, in
/// increasing order, for the next phase.
pub fn core(m: &ComplexMatrix) -> Collapse {
    let mut work_m = CollapseMatrix::new(m);
    let nrows = m.num_vertices();
    let ncols = m.num_columns();

    let mut row_queue: VecDeque<usize> = (0..nrows).collect();
    let mut row_queued = vec![true; nrows];
    let mut col_queue: VecDeque<usize> = VecDeque::new();
    let mut col_queued = vec![false; ncols];

    let mut trace = CollapseTrace::default();
    let mut work = CollapseWork::default();
    // dominator of each removed row, by row index
    let mut parent: Vec<usize> = (0..nrows).collect();
    let mut removal_order: Vec<usize> = Vec::new();

    loop {
        trace.rounds += 1;
        while let Some(r) = row_queue.pop_front() {
            row_queued[r] = false;
            if !work_m.row_live[r] {
                continue;
            }
            if let Some(w) = work_m.dominating_row_of(r) {
                let cols = work_m.remove_row_index(r);
                parent[r] = w;
                removal_order.push(r);
                trace.events.push(CollapseEvent::Row {
                    dominated: work_m.vertices[r],
                    dominating: work_m.vertices[w],
                });
                push_unique(&mut col_queue, &mut col_queued, &cols);
            }
        }
        work.row_phase_tests.push(work_m.take_subset_tests());
        if col_queue.is_empty() {
            break;
        }

        trace.rounds += 1;
        while let Some(c) = col_queue.pop_front() {
            col_queued[c] = false;
            if !work_m.col_live[c] {
                continue;
            }
            if let Some(s) = work_m.dominating_column_of(c) {
                let rows = work_m.remove_column_index(c);
                trace.events.push(CollapseEvent::Column {
                    dominated: c,
                    dominating: s,
                });
                push_unique(&mut row_queue, &mut row_queued, &rows);
            }
        }
        work.column_phase_tests.push(work_m.take_subset_tests());
        if row_queue.is_empty() {
            break;
        }
    }

    // Compose: a dominator removed later already has its final target.
    let mut target: Vec<usize> = (0..nrows).collect();
    for &r in removal_order.iter().rev() {
        target[r] = target[parent[r]];
    }
    let retraction = RetractionMap {
        sources: m.vertices().to_vec(),
        targets: target.iter().map(|&t| m.vertices()[t]).collect(),
    };

    Collapse {
        core: work_m.to_matrix(),
        retraction,
        trace,
        work,
    }
}

/// Re-applies a recorded collapse to `input`, checking every removal is a
/// genuine domination at that point.
pub fn replay(input: &ComplexMatrix, trace: &CollapseTrace) -> Result<ComplexMatrix, CollapseError> {
    let mut m = CollapseMatrix::new(input);
    for (index, event) in trace.events.iter().enumerate() {
        let fail = |reason: String| CollapseError::InvalidReplay { index, reason };
        match *event {
            CollapseEvent::Row { dominated, dominating } => {
                let (Some(a), Some(b)) = (m.row_index(dominated), m.row_index(dominating)) else {
                    return Err(fail("unknown vertex".into()));
                };
                if !m.row_live[a] || !m.row_live[b] || a == b {
                    return Err(fail(format!("vertex {dominated} or {dominating} not live")));
                }
                if !is_subset(&m.rows[a], &m.rows[b]) {
                    return Err(fail(format!("{dominating} does not dominate {dominated}")));
                }
                m.remove_row_index(a);
            }
            CollapseEvent::Column { dominated, dominating } => {
                if !m.is_column_live(dominated) || !m.is_column_live(dominating) || dominated == dominating {
                    return Err(fail(format!("column {dominated} or {dominating} not live")));
                }
                if !is_subset(&m.cols[dominated], &m.cols[dominating]) {
                    return Err(fail(format!("column {dominating} does not contain {dominated}")));
                }
                m.remove_column_index(dominated);
            }
        }
    }
    Ok(m.to_matrix())
}

/// Incidence matrix of the nerve, with the vertex labels of the input that
/// index its columns.
///
/// Vertices of `matrix` are the input's column indices; column `k` of
/// `matrix` comes from input vertex `labels[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nerve {
    pub matrix: ComplexMatrix,
    pub labels: Vec<VertexId>,
}

/// Drops every row contained in another row (keeping the smallest id among
/// equal rows) and transposes.
pub fn nerve_step(m: &ComplexMatrix) -> Nerve {
    let work_m = CollapseMatrix::new(m);
    let survivors: Vec<usize> = (0..m.num_vertices())
        .filter(|&r| work_m.dominating_row_of(r).is_none())
        .collect();
    let matrix = ComplexMatrix::from_maximal_columns(
        survivors
            .iter()
            .map(|&r| m.row_indices()[r].iter().map(|&c| c as VertexId).collect()),
    );
    Nerve {
        matrix,
        labels: survivors.iter().map(|&r| m.vertices()[r]).collect(),
    }
}

/// Two nerve steps, relabeled back into the input's vertex ids. The result is
/// a full subcomplex of the input.
pub fn nerve_square(m: &ComplexMatrix) -> ComplexMatrix {
    let first = nerve_step(m);
    let second = nerve_step(&first.matrix);
    ComplexMatrix::from_maximal_columns(second.matrix.maximal_simplices().into_iter().map(|s| {
        let mut v: Vec<VertexId> = s.vertices().iter().map(|&k| first.labels[k as usize]).collect();
        v.sort_unstable();
        v
    }))
}
