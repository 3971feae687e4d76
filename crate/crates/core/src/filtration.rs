//! Graded cell sequences fed to the persistence reduction.

use crate::complex::Simplex;

/// Simplices with grades, in insertion order. Every face of a cell should
/// appear before it with a grade no larger than the cell's.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Filtration {
    cells: Vec<(Simplex, f64)>,
}

impl Filtration {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_cells(cells: Vec<(Simplex, f64)>) -> Self {
        Filtration { cells }
    }

    pub fn push(&mut self, simplex: Simplex, grade: f64) {
        self.cells.push((simplex, grade));
    }

    pub fn cells(&self) -> &[(Simplex, f64)] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Index of the first cell that breaks the prefix invariants: a face
    /// missing from the prefix, a repeated cell, or a decreasing grade.
    pub fn first_violation(&self) -> Option<usize> {
        let mut seen = std::collections::HashSet::with_capacity(self.cells.len());
        let mut last = f64::NEG_INFINITY;
        for (i, (s, g)) in self.cells.iter().enumerate() {
            if *g < last || !s.facets().all(|f| seen.contains(&f)) || !seen.insert(s.clone()) {
                return Some(i);
            }
            last = *g;
        }
        None
    }
}
