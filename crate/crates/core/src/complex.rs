//! Simplicial complexes stored as the sparse incidence matrix between
//! vertices and maximal simplices.
//!
//! A [`ComplexMatrix`] never stores non-maximal simplices. Rows are vertices
//! (kept in increasing id order) and columns are maximal simplices, numbered
//! by first appearance in the input. Both directions are sorted index lists,
//! so subset tests are merge scans.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::sorted::is_subset;

/// Vertex label. Stable across all snapshots of one pipeline run.
pub type VertexId = u32;

/// Default cap on the number of simplices a full expansion may produce.
pub const DEFAULT_EXPANSION_CAP: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("empty complex")]
    Empty,
    #[error("invalid simplex: {0}")]
    InvalidSimplex(String),
    #[error("expansion too large: projected {projected} simplices exceeds cap {cap}")]
    ExpansionTooLarge { projected: usize, cap: usize },
}

/// A non-empty, strictly increasing list of vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<VertexId>);

impl Simplex {
    /// Builds a simplex from vertices in any order. Rejects empty input and
    /// repeated vertices.
    pub fn new(mut vertices: Vec<VertexId>) -> Result<Self, ComplexError> {
        if vertices.is_empty() {
            return Err(ComplexError::InvalidSimplex("no vertices".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(ComplexError::InvalidSimplex(format!("repeated vertex in {vertices:?}")));
        }
        Ok(Simplex(vertices))
    }

    /// Caller guarantees the list is non-empty and strictly increasing.
    pub(crate) fn from_sorted(vertices: Vec<VertexId>) -> Self {
        debug_assert!(!vertices.is_empty());
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(vertices)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn into_vertices(self) -> Vec<VertexId> {
        self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len() - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Codimension-one faces, each obtained by dropping one vertex. Empty for
    /// a vertex.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |skip| {
            Simplex(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            )
        })
    }

    /// All non-empty faces, the simplex itself included.
    pub fn faces(&self) -> Vec<Simplex> {
        subsets_of(&self.0)
    }

    /// Ordering used throughout for emitted simplex lists: dimension first,
    /// then lexicographic on the vertex lists.
    pub fn dim_lex_cmp(&self, other: &Simplex) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn subsets_of(vertices: &[VertexId]) -> Vec<Simplex> {
    let k = vertices.len();
    assert!(k < 64, "simplex too large to enumerate faces");
    let mut out = Vec::with_capacity((1usize << k) - 1);
    for mask in 1u64..(1u64 << k) {
        let face: Vec<VertexId> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| vertices[i]).collect();
        out.push(Simplex(face));
    }
    out
}

/// Sizes governing the collapse cost: vertex count `v`, maximal-simplex count
/// `m`, dimension `d` and the largest row length `gamma0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexStats {
    pub v: usize,
    pub m: usize,
    pub d: usize,
    pub gamma0: usize,
}

/// Vertex by maximal-simplex incidence matrix.
///
/// Invariants: every row and column is non-empty, a vertex appears in a column
/// iff the column appears in the vertex's row, and no column is a subset of
/// another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexMatrix {
    vertices: Vec<VertexId>,
    /// Per row: sorted column indices.
    rows: Vec<Vec<u32>>,
    /// Per column: sorted row indices.
    cols: Vec<Vec<u32>>,
}

impl ComplexMatrix {
    /// Canonicalizes a list of simplices: duplicates and simplices contained in
    /// another one are dropped, survivors keep their first-appearance order.
    pub fn from_simplex_list(simplices: &[Simplex]) -> Result<Self, ComplexError> {
        if simplices.is_empty() {
            return Err(ComplexError::Empty);
        }
        let mut seen = HashSet::with_capacity(simplices.len());
        let mut unique: Vec<(usize, &Simplex)> = Vec::with_capacity(simplices.len());
        for (i, s) in simplices.iter().enumerate() {
            if seen.insert(s) {
                unique.push((i, s));
            }
        }

        // Larger simplices first, so a candidate only needs checking against
        // already accepted ones.
        let mut by_size = unique.clone();
        by_size.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));
        let mut accepted: Vec<(usize, &Simplex)> = Vec::new();
        let mut incidence: std::collections::HashMap<VertexId, Vec<usize>> = std::collections::HashMap::new();
        for (order, s) in by_size {
            let shortest = s
                .vertices()
                .iter()
                .map(|v| incidence.get(v).map_or(&[][..], |l| l.as_slice()))
                .min_by_key(|l| l.len())
                .unwrap_or(&[]);
            let absorbed = shortest
                .iter()
                .any(|&a| is_subset(s.vertices(), accepted[a].1.vertices()));
            if absorbed {
                continue;
            }
            let idx = accepted.len();
            for &v in s.vertices() {
                incidence.entry(v).or_default().push(idx);
            }
            accepted.push((order, s));
        }
        accepted.sort_by_key(|&(order, _)| order);
        Ok(Self::from_maximal_columns(
            accepted.into_iter().map(|(_, s)| s.vertices().to_vec()),
        ))
    }

    /// Builds the matrix from columns already known to be pairwise
    /// incomparable. Column order is preserved.
    pub(crate) fn from_maximal_columns<I>(columns: I) -> Self
    where
        I: IntoIterator<Item = Vec<VertexId>>,
    {
        let columns: Vec<Vec<VertexId>> = columns.into_iter().collect();
        let mut vertices: Vec<VertexId> = columns.iter().flatten().copied().collect();
        vertices.sort_unstable();
        vertices.dedup();
        let mut rows = vec![Vec::new(); vertices.len()];
        let mut cols = Vec::with_capacity(columns.len());
        for (c, col) in columns.iter().enumerate() {
            let mut idx: Vec<u32> = col
                .iter()
                .map(|v| vertices.binary_search(v).expect("vertex indexed") as u32)
                .collect();
            idx.sort_unstable();
            for &r in &idx {
                rows[r as usize].push(c as u32);
            }
            cols.push(idx);
        }
        ComplexMatrix { vertices, rows, cols }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_columns(&self) -> usize {
        self.cols.len()
    }

    pub(crate) fn row_indices(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub(crate) fn col_indices(&self) -> &[Vec<u32>] {
        &self.cols
    }

    /// Vertex set of column `c`.
    pub fn column(&self, c: usize) -> Simplex {
        Simplex::from_sorted(self.cols[c].iter().map(|&r| self.vertices[r as usize]).collect())
    }

    /// Columns incident to vertex `v`, or `None` if `v` is not a vertex.
    pub fn row(&self, v: VertexId) -> Option<&[u32]> {
        self.vertices.binary_search(&v).ok().map(|r| self.rows[r].as_slice())
    }

    /// Maximal simplices in column order.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        (0..self.cols.len()).map(|c| self.column(c)).collect()
    }

    /// Maximal simplices in (dimension, lexicographic) order; independent of
    /// column numbering.
    pub fn canonical_simplices(&self) -> Vec<Simplex> {
        let mut s = self.maximal_simplices();
        s.sort_by(Simplex::dim_lex_cmp);
        s
    }

    /// True when both matrices describe the same complex, regardless of column
    /// numbering.
    pub fn same_complex(&self, other: &ComplexMatrix) -> bool {
        self.vertices == other.vertices && self.canonical_simplices() == other.canonical_simplices()
    }

    pub fn stats(&self) -> ComplexStats {
        ComplexStats {
            v: self.vertices.len(),
            m: self.cols.len(),
            d: self.cols.iter().map(Vec::len).max().unwrap_or(1) - 1,
            gamma0: self.rows.iter().map(Vec::len).max().unwrap_or(0),
        }
    }

    pub fn dimension(&self) -> usize {
        self.stats().d
    }

    /// True iff `s` is a face of some maximal simplex.
    pub fn contains_simplex(&self, s: &Simplex) -> bool {
        let Some(first) = self.row(s.vertices()[0]) else {
            return false;
        };
        first
            .iter()
            .any(|&c| is_subset(s.vertices(), self.column(c as usize).vertices()))
    }

    /// Upper bound on the number of simplices produced by
    /// [`expand_all_simplices`](Self::expand_all_simplices): the sum over
    /// columns of `2^k - 1`, saturating.
    pub fn projected_expansion_size(&self) -> usize {
        self.cols
            .iter()
            .map(|c| {
                if c.len() >= usize::BITS as usize - 1 {
                    usize::MAX
                } else {
                    (1usize << c.len()) - 1
                }
            })
            .fold(0usize, usize::saturating_add)
    }

    /// Every simplex of the complex, each once, in (dimension, lexicographic)
    /// order. Refuses when the projected count exceeds `cap`.
    pub fn expand_all_simplices(&self, cap: usize) -> Result<Vec<Simplex>, ComplexError> {
        let projected = self.projected_expansion_size();
        if projected > cap {
            return Err(ComplexError::ExpansionTooLarge { projected, cap });
        }
        let mut all: HashSet<Simplex> = HashSet::with_capacity(projected);
        for c in 0..self.cols.len() {
            all.extend(subsets_of(self.column(c).vertices()));
        }
        let mut out: Vec<Simplex> = all.into_iter().collect();
        out.sort_by(Simplex::dim_lex_cmp);
        Ok(out)
    }
}
