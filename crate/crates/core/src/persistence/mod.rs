//! Persistence diagrams by boundary-matrix reduction over GF(2).

mod bottleneck;

pub use bottleneck::bottleneck_distance;

use std::collections::HashMap;

use thiserror::Error;

use crate::complex::{ComplexError, ComplexMatrix, Simplex};
use crate::filtration::Filtration;
use crate::rips::{rips_snapshot, DistanceMatrix, SnapshotSchedule};
use crate::sorted::symmetric_difference;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PersistenceError {
    #[error("filtration cell {index} has a face that does not precede it")]
    NotDownwardClosed { index: usize },
    #[error("filtration cell {index} is repeated")]
    DuplicateCell { index: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// One interval. `death` is `f64::INFINITY` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn length(&self) -> f64 {
        self.death - self.birth
    }
}

/// Multiset of intervals, kept sorted by (dim, birth, death).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PersistenceDiagram {
    pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    pub fn new(mut pairs: Vec<PersistencePair>) -> Self {
        pairs.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
        PersistenceDiagram { pairs }
    }

    pub fn pairs(&self) -> &[PersistencePair] {
        &self.pairs
    }

    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &PersistencePair> + '_ {
        self.pairs.iter().filter(move |p| p.dim == dim)
    }

    /// Largest dimension with at least one interval.
    pub fn max_dim(&self) -> Option<usize> {
        self.pairs.iter().map(|p| p.dim).max()
    }

    /// Number of essential classes per dimension, up to `max_dim`.
    pub fn essential_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_dim().map_or(0, |d| d + 1)];
        for p in self.pairs.iter().filter(|p| p.is_essential()) {
            counts[p.dim] += 1;
        }
        counts
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReductionOptions {
    /// Process dimensions top-down and zero out columns known to be
    /// paired as creators.
    pub clearing: bool,
    /// Keep pairs with birth equal to death.
    pub keep_zero_length: bool,
}

/// Diagram of `f` with default options.
pub fn compute_persistence(f: &Filtration) -> Result<PersistenceDiagram, PersistenceError> {
    compute_persistence_with(f, ReductionOptions::default())
}

/// Reduces the boundary matrix of `f` left to right.
///
/// Cells are ordered by (grade, dimension, vertices), with the input position
/// as the last tie-break. Errors name the input position of the offending
/// cell.
pub fn compute_persistence_with(
    f: &Filtration,
    options: ReductionOptions,
) -> Result<PersistenceDiagram, PersistenceError> {
    let cells = f.cells();
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by(|&a, &b| {
        let (sa, ga) = &cells[a];
        let (sb, gb) = &cells[b];
        ga.total_cmp(gb).then_with(|| sa.dim_lex_cmp(sb)).then(a.cmp(&b))
    });
    reduce_in_order(cells, &order, options)
}

/// Reduction with the cell order given explicitly by `order`, a permutation
/// of positions into `cells`.
fn reduce_in_order(
    cells: &[(Simplex, f64)],
    order: &[usize],
    options: ReductionOptions,
) -> Result<PersistenceDiagram, PersistenceError> {
    let mut index: HashMap<&Simplex, usize> = HashMap::with_capacity(cells.len());
    for (pos, &orig) in order.iter().enumerate() {
        if index.insert(&cells[orig].0, pos).is_some() {
            return Err(PersistenceError::DuplicateCell { index: orig });
        }
    }

    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
    for (pos, &orig) in order.iter().enumerate() {
        let mut col = Vec::with_capacity(cells[orig].0.len());
        for face in cells[orig].0.facets() {
            match index.get(&face) {
                Some(&fp) if fp < pos && cells[order[fp]].1 <= cells[orig].1 => col.push(fp),
                _ => return Err(PersistenceError::NotDownwardClosed { index: orig }),
            }
        }
        col.sort_unstable();
        columns.push(col);
    }

    let dims: Vec<usize> = order.iter().map(|&o| cells[o].0.dimension()).collect();
    let grades: Vec<f64> = order.iter().map(|&o| cells[o].1).collect();
    let n = columns.len();
    let mut pivot_of_low: Vec<Option<usize>> = vec![None; n];
    let mut is_low = vec![false; n];

    let mut reduce = |j: usize, columns: &mut Vec<Vec<usize>>, is_low: &mut Vec<bool>| {
        while let Some(&low) = columns[j].last() {
            match pivot_of_low[low] {
                Some(k) => {
                    let sum = symmetric_difference(&columns[j], &columns[k]);
                    columns[j] = sum;
                }
                None => {
                    pivot_of_low[low] = Some(j);
                    is_low[low] = true;
                    break;
                }
            }
        }
    };

    if options.clearing {
        let max_dim = dims.iter().copied().max().unwrap_or(0);
        let mut cleared = vec![false; n];
        for dim in (1..=max_dim).rev() {
            for j in (0..n).filter(|&j| dims[j] == dim) {
                if cleared[j] {
                    columns[j].clear();
                    continue;
                }
                reduce(j, &mut columns, &mut is_low);
                if let Some(&low) = columns[j].last() {
                    cleared[low] = true;
                }
            }
        }
    } else {
        for j in 0..n {
            reduce(j, &mut columns, &mut is_low);
        }
    }

    let mut pairs = Vec::new();
    for j in 0..n {
        if let Some(&low) = columns[j].last() {
            let pair = PersistencePair {
                dim: dims[low],
                birth: grades[low],
                death: grades[j],
            };
            if options.keep_zero_length || pair.birth < pair.death {
                pairs.push(pair);
            }
        } else if !is_low[j] {
            pairs.push(PersistencePair {
                dim: dims[j],
                birth: grades[j],
                death: f64::INFINITY,
            });
        }
    }
    Ok(PersistenceDiagram::new(pairs))
}

/// Betti numbers over GF(2), indices `0..=dim`.
pub fn betti_numbers(m: &ComplexMatrix, cap: usize) -> Result<Vec<usize>, PersistenceError> {
    let simplices = m.expand_all_simplices(cap)?;
    let f = Filtration::from_cells(simplices.into_iter().map(|s| (s, 0.0)).collect());
    let diagram = compute_persistence(&f)?;
    let mut betti = diagram.essential_counts();
    betti.resize(m.dimension() + 1, 0);
    Ok(betti)
}

/// Uncollapsed snapshot filtration: every simplex of every snapshot, graded
/// by the first snapshot containing it.
pub fn snapshot_filtration(
    snapshots: &[ComplexMatrix],
    grades: &[f64],
    cap: usize,
) -> Result<Filtration, PersistenceError> {
    let mut first_grade: HashMap<Simplex, f64> = HashMap::new();
    for (snapshot, &grade) in snapshots.iter().zip(grades) {
        for s in snapshot.expand_all_simplices(cap)? {
            first_grade.entry(s).or_insert(grade);
        }
        if first_grade.len() > cap {
            return Err(ComplexError::ExpansionTooLarge {
                projected: first_grade.len(),
                cap,
            }
            .into());
        }
    }
    let mut cells: Vec<(Simplex, f64)> = first_grade.into_iter().collect();
    cells.sort_by(|(sa, ga), (sb, gb)| ga.total_cmp(gb).then_with(|| sa.dim_lex_cmp(sb)));
    Ok(Filtration::from_cells(cells))
}

/// Reference diagram: Rips snapshots expanded in full, no collapse.
pub fn oracle_pipeline(
    d: &DistanceMatrix,
    schedule: &SnapshotSchedule,
    cap: usize,
) -> Result<PersistenceDiagram, PersistenceError> {
    let snapshots: Vec<ComplexMatrix> = schedule.grades().iter().map(|&t| rips_snapshot(d, t)).collect();
    compute_persistence(&snapshot_filtration(&snapshots, schedule.grades(), cap)?)
}
