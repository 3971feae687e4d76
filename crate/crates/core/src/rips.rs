//! Vietoris-Rips snapshots from a distance matrix.
//!
//! A snapshot at scale `t` is the clique complex of the graph joining points
//! at distance `<= t`; only its maximal cliques are materialized.

use thiserror::Error;

use crate::complex::{ComplexMatrix, Simplex, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RipsError {
    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("no points")]
    NoPoints,
    #[error("invalid distance matrix: {0}")]
    InvalidDistances(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
}

/// Symmetric matrix of pairwise distances with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds from a row-major `n x n` buffer, validating symmetry, a zero
    /// diagonal and finite non-negative entries.
    pub fn from_full(n: usize, data: Vec<f64>) -> Result<Self, RipsError> {
        if n == 0 {
            return Err(RipsError::NoPoints);
        }
        if data.len() != n * n {
            return Err(RipsError::InvalidDistances(format!(
                "expected {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(RipsError::InvalidDistances(format!("d({i},{i}) is not zero")));
            }
            for j in 0..i {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if !a.is_finite() || a < 0.0 {
                    return Err(RipsError::InvalidDistances(format!(
                        "d({i},{j}) = {a} is negative or not finite"
                    )));
                }
                if a != b {
                    return Err(RipsError::InvalidDistances(format!(
                        "d({i},{j}) = {a} but d({j},{i}) = {b}"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    /// Builds from lower-triangular rows: row `i` holds `d(i,0) .. d(i,i-1)`.
    pub fn from_lower_triangular(rows: &[Vec<f64>]) -> Result<Self, RipsError> {
        let n = rows.len();
        if n == 0 {
            return Err(RipsError::NoPoints);
        }
        let mut data = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != i {
                return Err(RipsError::InvalidDistances(format!(
                    "row {i} has {} entries, expected {i}",
                    row.len()
                )));
            }
            for (j, &d) in row.iter().enumerate() {
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Self::from_full(n, data)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn max_distance(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest off-diagonal entry that is strictly positive.
    pub fn min_positive_distance(&self) -> Option<f64> {
        self.data.iter().copied().filter(|&d| d > 0.0).min_by(f64::total_cmp)
    }

    /// Rows of the lower triangle, the inverse of
    /// [`from_lower_triangular`](Self::from_lower_triangular).
    pub fn lower_triangular_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..i).map(|j| self.get(i, j)).collect()).collect()
    }
}

/// Euclidean distances between points of equal dimension.
pub fn pairwise_distances(points: &[Vec<f64>]) -> Result<DistanceMatrix, RipsError> {
    let first = points.first().ok_or(RipsError::NoPoints)?;
    let dim = first.len();
    if let Some((index, p)) = points.iter().enumerate().find(|(_, p)| p.len() != dim) {
        return Err(RipsError::DimensionMismatch {
            index,
            expected: dim,
            found: p.len(),
        });
    }
    let n = points.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..i {
            let d = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    DistanceMatrix::from_full(n, data)
}

/// Increasing list of snapshot scales.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSchedule {
    grades: Vec<f64>,
}

impl SnapshotSchedule {
    /// `start, start + step, ...` up to `end`. The end bound is tested with a
    /// half-step slack so accumulated rounding cannot drop the last grade.
    pub fn uniform(start: f64, step: f64, end: f64) -> Result<Self, RipsError> {
        if !(start.is_finite() && step.is_finite() && end.is_finite()) {
            return Err(RipsError::InvalidSchedule("non-finite bound".into()));
        }
        if step <= 0.0 {
            return Err(RipsError::InvalidSchedule(format!("step {step} must be positive")));
        }
        if end < start {
            return Err(RipsError::InvalidSchedule(format!("end {end} is below start {start}")));
        }
        let mut grades = Vec::new();
        let mut k = 0u64;
        loop {
            let g = start + k as f64 * step;
            if g > end + step / 2.0 {
                break;
            }
            grades.push(g);
            k += 1;
        }
        Ok(SnapshotSchedule { grades })
    }

    /// Explicit grades; must be non-empty, finite, non-negative and strictly
    /// increasing.
    pub fn from_grades(grades: Vec<f64>) -> Result<Self, RipsError> {
        if grades.is_empty() {
            return Err(RipsError::InvalidSchedule("no grades".into()));
        }
        if grades.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(RipsError::InvalidSchedule(
                "grades must be finite and non-negative".into(),
            ));
        }
        if grades.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RipsError::InvalidSchedule("grades must be strictly increasing".into()));
        }
        Ok(SnapshotSchedule { grades })
    }

    pub fn grades(&self) -> &[f64] {
        &self.grades
    }

    pub fn len(&self) -> usize {
        self.grades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grades.is_empty()
    }
}

/// Graph joining vertices at distance `<= t`, as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodGraph {
    adjacency: Vec<Vec<u32>>,
}

impl NeighborhoodGraph {
    pub fn new(d: &DistanceMatrix, t: f64) -> Self {
        let n = d.len();
        let adjacency = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && d.get(i, j) <= t)
                    .map(|j| j as u32)
                    .collect()
            })
            .collect();
        NeighborhoodGraph { adjacency }
    }

    pub fn from_adjacency(adjacency: Vec<Vec<u32>>) -> Self {
        NeighborhoodGraph { adjacency }
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&(v as u32)).is_ok()
    }

    /// Vertex order by repeatedly removing a vertex of minimum remaining
    /// degree (ties by id).
    fn degeneracy_order(&self) -> Vec<usize> {
        let n = self.num_vertices();
        let mut degree: Vec<usize> = self.adjacency.iter().map(Vec::len).collect();
        let mut removed = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for _ in 0..n {
            let v = (0..n)
                .filter(|&v| !removed[v])
                .min_by_key(|&v| (degree[v], v))
                .expect("vertex left");
            removed[v] = true;
            order.push(v);
            for &u in &self.adjacency[v] {
                if !removed[u as usize] {
                    degree[u as usize] -= 1;
                }
            }
        }
        order
    }

    /// All maximal cliques, each sorted, the list sorted lexicographically.
    /// Isolated vertices are reported as singleton cliques.
    pub fn maximal_cliques(&self) -> Vec<Vec<u32>> {
        let order = self.degeneracy_order();
        let mut position = vec![0usize; order.len()];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let mut out = Vec::new();
        for &v in &order {
            let (later, earlier): (Vec<u32>, Vec<u32>) = self.adjacency[v]
                .iter()
                .partition(|&&u| position[u as usize] > position[v]);
            let mut clique = vec![v as u32];
            self.expand(&mut clique, later, earlier, &mut out);
        }
        for c in &mut out {
            c.sort_unstable();
        }
        out.sort();
        out
    }

    /// Bron-Kerbosch step with the pivot maximizing `|P ∩ N(u)|` over
    /// `P ∪ X`. `candidates` and `excluded` are sorted.
    fn expand(&self, clique: &mut Vec<u32>, candidates: Vec<u32>, mut excluded: Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if candidates.is_empty() {
            if excluded.is_empty() {
                out.push(clique.clone());
            }
            return;
        }
        let pivot = candidates
            .iter()
            .chain(excluded.iter())
            .copied()
            .max_by_key(|&u| {
                (
                    intersection_len(&candidates, self.neighbors(u as usize)),
                    std::cmp::Reverse(u),
                )
            })
            .expect("non-empty");
        let pivot_nbrs = self.neighbors(pivot as usize);
        let branch: Vec<u32> = candidates
            .iter()
            .copied()
            .filter(|u| pivot_nbrs.binary_search(u).is_err())
            .collect();
        let mut candidates = candidates;
        for u in branch {
            let nbrs = self.neighbors(u as usize);
            clique.push(u);
            self.expand(clique, intersect(&candidates, nbrs), intersect(&excluded, nbrs), out);
            clique.pop();
            crate::sorted::remove_sorted(&mut candidates, &u);
            let pos = excluded.binary_search(&u).unwrap_or_else(|p| p);
            excluded.insert(pos, u);
        }
    }
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Maximal simplices of the Rips complex at scale `t`, all `n` vertices
/// included.
pub fn rips_snapshot(d: &DistanceMatrix, t: f64) -> ComplexMatrix {
    let cliques = NeighborhoodGraph::new(d, t).maximal_cliques();
    let simplices: Vec<Simplex> = cliques
        .into_iter()
        .map(|c| Simplex::from_sorted(c.into_iter().map(|v| v as VertexId).collect()))
        .collect();
    ComplexMatrix::from_simplex_list(&simplices).expect("at least one vertex")
}

/// One snapshot per grade, in order.
pub fn rips_snapshots(d: &DistanceMatrix, schedule: &SnapshotSchedule) -> Vec<ComplexMatrix> {
    schedule.grades().iter().map(|&t| rips_snapshot(d, t)).collect()
}
