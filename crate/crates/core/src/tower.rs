//! Core towers and their conversion to filtrations.
//!
//! Consecutive cores are linked by `r_{j+1}` restricted to core `j`, written
//! as elementary vertex contractions followed by inclusions. The tower is then
//! turned into a filtration by coning: contracting `u` onto `v` adds the cone
//! `v * St(u)` and retires `u`, which leaves the persistence unchanged.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::collapse::RetractionMap;
use crate::complex::{ComplexError, ComplexMatrix, Simplex, VertexId};
use crate::filtration::Filtration;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TowerError {
    #[error("got {cores} cores, {retractions} retractions and {grades} grades")]
    LengthMismatch {
        cores: usize,
        retractions: usize,
        grades: usize,
    },
    #[error("grades must be strictly increasing")]
    GradesNotIncreasing,
    #[error("snapshot {snapshot}: vertex {vertex} of the previous core is not in the retraction domain")]
    NotNested { snapshot: usize, vertex: VertexId },
    #[error("snapshot {snapshot}: retraction image {simplex} is not a simplex of the core")]
    NotSimplicial { snapshot: usize, simplex: Simplex },
    #[error("op {index}: {reason}")]
    InvalidOp { index: usize, reason: String },
    #[error("op {index}: unknown vertex {vertex}")]
    UnknownVertex { index: usize, vertex: VertexId },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpKind {
    Include(Simplex),
    /// Vertex map sending `from` to `to`, identity elsewhere.
    Contract {
        from: VertexId,
        to: VertexId,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryOp {
    pub kind: OpKind,
    pub grade: f64,
}

impl ElementaryOp {
    pub fn include(simplex: Simplex, grade: f64) -> Self {
        ElementaryOp {
            kind: OpKind::Include(simplex),
            grade,
        }
    }

    pub fn contract(from: VertexId, to: VertexId, grade: f64) -> Self {
        ElementaryOp {
            kind: OpKind::Contract { from, to },
            grade,
        }
    }
}

/// Sequence of elementary operations starting from the empty complex.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tower {
    ops: Vec<ElementaryOp>,
}

/// Simplices of the current complex while a tower is replayed.
#[derive(Debug, Clone, Default)]
struct ComplexState {
    simplices: HashSet<Simplex>,
}

impl ComplexState {
    fn has_vertex(&self, v: VertexId) -> bool {
        self.simplices.contains(&Simplex::from_sorted(vec![v]))
    }

    fn live_vertices(&self) -> Vec<VertexId> {
        let mut v: Vec<VertexId> = self
            .simplices
            .iter()
            .filter(|s| s.len() == 1)
            .map(|s| s.vertices()[0])
            .collect();
        v.sort_unstable();
        v
    }

    fn contract(&mut self, from: VertexId, to: VertexId) {
        let star: Vec<Simplex> = self.simplices.iter().filter(|s| s.contains(from)).cloned().collect();
        for s in star {
            self.simplices.remove(&s);
            let mut image: Vec<VertexId> = s.vertices().iter().map(|&x| if x == from { to } else { x }).collect();
            image.sort_unstable();
            image.dedup();
            self.simplices.insert(Simplex::from_sorted(image));
        }
    }
}

impl Tower {
    pub fn new(ops: Vec<ElementaryOp>) -> Self {
        Tower { ops }
    }

    pub fn ops(&self) -> &[ElementaryOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Replays the tower, checking that grades never decrease, every
    /// inclusion adds a new simplex whose facets are present, and every
    /// contraction acts on two live vertices. Returns the final complex's
    /// simplices in (dimension, lexicographic) order.
    pub fn validate(&self) -> Result<Vec<Simplex>, TowerError> {
        let mut state = ComplexState::default();
        let mut last = f64::NEG_INFINITY;
        for (index, op) in self.ops.iter().enumerate() {
            if op.grade < last {
                return Err(TowerError::InvalidOp {
                    index,
                    reason: "grade decreases".into(),
                });
            }
            last = op.grade;
            match &op.kind {
                OpKind::Include(s) => {
                    if state.simplices.contains(s) {
                        return Err(TowerError::InvalidOp {
                            index,
                            reason: format!("{s} already present"),
                        });
                    }
                    if let Some(f) = s.facets().find(|f| !state.simplices.contains(f)) {
                        return Err(TowerError::InvalidOp {
                            index,
                            reason: format!("facet {f} of {s} missing"),
                        });
                    }
                    state.simplices.insert(s.clone());
                }
                &OpKind::Contract { from, to } => {
                    for v in [from, to] {
                        if !state.has_vertex(v) {
                            return Err(TowerError::UnknownVertex { index, vertex: v });
                        }
                    }
                    if from == to {
                        return Err(TowerError::InvalidOp {
                            index,
                            reason: "contraction onto itself".into(),
                        });
                    }
                    state.contract(from, to);
                }
            }
        }
        let mut out: Vec<Simplex> = state.simplices.into_iter().collect();
        out.sort_by(Simplex::dim_lex_cmp);
        Ok(out)
    }
}

/// Chains the cores of nested snapshots into a tower.
///
/// Core 0 is included whole at `grades[0]`. For each later snapshot, any
/// contraction target not yet live is included first, then every live vertex
/// `u` with `r(u) != u` is contracted onto `r(u)` in increasing `u`, then the
/// simplices of the new core that are still missing are included in
/// (dimension, lexicographic) order.
pub fn assemble_core_tower(
    cores: &[ComplexMatrix],
    retractions: &[RetractionMap],
    grades: &[f64],
    cap: usize,
) -> Result<Tower, TowerError> {
    if cores.len() != retractions.len() || cores.len() != grades.len() {
        return Err(TowerError::LengthMismatch {
            cores: cores.len(),
            retractions: retractions.len(),
            grades: grades.len(),
        });
    }
    if grades.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TowerError::GradesNotIncreasing);
    }

    let mut ops = Vec::new();
    let mut state = ComplexState::default();
    for (j, ((core, r), &grade)) in cores.iter().zip(retractions).zip(grades).enumerate() {
        let target: HashSet<Simplex> = core.expand_all_simplices(cap)?.into_iter().collect();

        let mut moves = Vec::new();
        for u in state.live_vertices() {
            let t = r.get(u).ok_or(TowerError::NotNested { snapshot: j, vertex: u })?;
            if t != u {
                moves.push((u, t));
            }
        }
        let mut new_targets: Vec<VertexId> = moves
            .iter()
            .map(|&(_, t)| t)
            .filter(|&t| !state.has_vertex(t))
            .collect();
        new_targets.sort_unstable();
        new_targets.dedup();
        for t in new_targets {
            let s = Simplex::from_sorted(vec![t]);
            state.simplices.insert(s.clone());
            ops.push(ElementaryOp::include(s, grade));
        }
        for (u, t) in moves {
            state.contract(u, t);
            ops.push(ElementaryOp::contract(u, t, grade));
        }

        if let Some(bad) = state.simplices.iter().find(|s| !target.contains(*s)) {
            return Err(TowerError::NotSimplicial {
                snapshot: j,
                simplex: bad.clone(),
            });
        }

        let mut missing: Vec<Simplex> = target.into_iter().filter(|s| !state.simplices.contains(s)).collect();
        missing.sort_by(Simplex::dim_lex_cmp);
        for s in missing {
            state.simplices.insert(s.clone());
            ops.push(ElementaryOp::include(s, grade));
        }
    }
    Ok(Tower { ops })
}

/// Converts a tower to a filtration with the same persistence.
///
/// Tower labels are mapped to filtration vertices. An inclusion adds the
/// mapped simplex and any missing faces. A contraction of `u` onto `v` adds
/// `σ ∪ {v}` with its faces for every current simplex `σ` containing `u`,
/// then retires `u`'s filtration vertex. A label included again after being
/// contracted gets a fresh filtration vertex; a retired label used inside a
/// larger inclusion is resolved through its contraction targets.
pub fn tower_to_filtration(tower: &Tower) -> Result<Filtration, TowerError> {
    let mut conv = Coning::default();
    for (index, op) in tower.ops().iter().enumerate() {
        match &op.kind {
            OpKind::Include(s) => conv.include(index, s, op.grade)?,
            &OpKind::Contract { from, to } => conv.contract(index, from, to, op.grade)?,
        }
    }
    Ok(conv.filtration)
}

#[derive(Debug, Default)]
struct Coning {
    live: HashMap<VertexId, VertexId>,
    retired: HashMap<VertexId, VertexId>,
    next_id: VertexId,
    present: HashSet<Simplex>,
    /// Image of the tower's current complex, in filtration vertices.
    active: HashSet<Simplex>,
    filtration: Filtration,
}

impl Coning {
    fn resolve(&self, index: usize, label: VertexId) -> Result<VertexId, TowerError> {
        let mut l = label;
        let mut hops = 0;
        loop {
            if let Some(&id) = self.live.get(&l) {
                return Ok(id);
            }
            match self.retired.get(&l) {
                Some(&next) if hops <= self.retired.len() => {
                    l = next;
                    hops += 1;
                }
                _ => return Err(TowerError::UnknownVertex { index, vertex: label }),
            }
        }
    }

    /// Appends every not-yet-present face of the given simplices, in
    /// (dimension, lexicographic) order.
    fn add_closure(&mut self, simplices: &[Simplex], grade: f64) {
        let mut new: Vec<Simplex> = simplices
            .iter()
            .flat_map(Simplex::faces)
            .filter(|f| !self.present.contains(f))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        new.sort_by(Simplex::dim_lex_cmp);
        for f in new {
            self.present.insert(f.clone());
            self.filtration.push(f, grade);
        }
    }

    fn include(&mut self, index: usize, s: &Simplex, grade: f64) -> Result<(), TowerError> {
        let mapped = if s.len() == 1 && !self.live.contains_key(&s.vertices()[0]) {
            let label = s.vertices()[0];
            let id = self.next_id;
            self.next_id += 1;
            self.retired.remove(&label);
            self.live.insert(label, id);
            Simplex::from_sorted(vec![id])
        } else {
            let mut ids = s
                .vertices()
                .iter()
                .map(|&l| self.resolve(index, l))
                .collect::<Result<Vec<_>, _>>()?;
            ids.sort_unstable();
            ids.dedup();
            Simplex::from_sorted(ids)
        };
        self.add_closure(std::slice::from_ref(&mapped), grade);
        self.active.extend(mapped.faces());
        Ok(())
    }

    fn contract(&mut self, index: usize, from: VertexId, to: VertexId, grade: f64) -> Result<(), TowerError> {
        let fu = *self
            .live
            .get(&from)
            .ok_or(TowerError::UnknownVertex { index, vertex: from })?;
        let fv = *self
            .live
            .get(&to)
            .ok_or(TowerError::UnknownVertex { index, vertex: to })?;
        if fu == fv {
            return Err(TowerError::InvalidOp {
                index,
                reason: "contraction onto itself".into(),
            });
        }
        let star: Vec<Simplex> = self.active.iter().filter(|s| s.contains(fu)).cloned().collect();
        let with = |s: &Simplex, drop: Option<VertexId>| {
            let mut v: Vec<VertexId> = s.vertices().iter().copied().filter(|&x| Some(x) != drop).collect();
            if !v.contains(&fv) {
                v.push(fv);
            }
            v.sort_unstable();
            Simplex::from_sorted(v)
        };
        let cones: Vec<Simplex> = star.iter().map(|s| with(s, None)).collect();
        self.add_closure(&cones, grade);
        for s in &star {
            self.active.remove(s);
        }
        for s in &star {
            self.active.insert(with(s, Some(fu)));
        }
        self.live.remove(&from);
        self.retired.insert(from, to);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collapse::core;
    use crate::complex::DEFAULT_EXPANSION_CAP;
    use crate::persistence::{compute_persistence, PersistencePair};
    use crate::rips::{pairwise_distances, rips_snapshots, SnapshotSchedule};
    use crate::testing::simplex;

    fn triangle_core() -> ComplexMatrix {
        ComplexMatrix::from_simplex_list(&[simplex(&[1, 4]), simplex(&[1, 3]), simplex(&[3, 4])]).unwrap()
    }

    #[test]
    fn single_snapshot_tower() {
        let c = triangle_core();
        let r = RetractionMap::identity(c.vertices());
        let t = assemble_core_tower(&[c], &[r], &[0.0], DEFAULT_EXPANSION_CAP).unwrap();
        let expected: Vec<ElementaryOp> = [&[1][..], &[3], &[4], &[1, 3], &[1, 4], &[3, 4]]
            .iter()
            .map(|v| ElementaryOp::include(simplex(v), 0.0))
            .collect();
        assert_eq!(t.ops(), expected.as_slice());
        assert!(t.validate().is_ok());
    }

    #[test]
    fn identical_snapshots_add_nothing() {
        let c = triangle_core();
        let r = RetractionMap::identity(c.vertices());
        let t = assemble_core_tower(&[c.clone(), c], &[r.clone(), r], &[0.0, 1.0], DEFAULT_EXPANSION_CAP).unwrap();
        assert_eq!(t.len(), 6);
    }

    #[test]
    fn unit_square_tower() {
        let d = pairwise_distances(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let sched = SnapshotSchedule::uniform(0.5, 0.5, 1.5).unwrap();
        let collapsed: Vec<_> = rips_snapshots(&d, &sched).iter().map(core).collect();
        assert_eq!(collapsed[2].core.vertices(), &[0]);
        let cores: Vec<_> = collapsed.iter().map(|c| c.core.clone()).collect();
        let rs: Vec<_> = collapsed.iter().map(|c| c.retraction.clone()).collect();
        let t = assemble_core_tower(&cores, &rs, sched.grades(), DEFAULT_EXPANSION_CAP).unwrap();
        let tail: Vec<&ElementaryOp> = t.ops().iter().filter(|op| op.grade == 1.5).collect();
        assert_eq!(
            tail,
            vec![
                &ElementaryOp::contract(1, 0, 1.5),
                &ElementaryOp::contract(2, 0, 1.5),
                &ElementaryOp::contract(3, 0, 1.5)
            ]
        );
        assert_eq!(t.validate().unwrap(), vec![simplex(&[0])]);

        let f = tower_to_filtration(&t).unwrap();
        assert_eq!(f.first_violation(), None);
        let pd = compute_persistence(&f).unwrap();
        let h1: Vec<_> = pd.in_dim(1).copied().collect();
        assert_eq!(
            h1,
            vec![PersistencePair {
                dim: 1,
                birth: 1.0,
                death: 1.5
            }]
        );
    }

    #[test]
    fn includes_only_tower_keeps_cells() {
        let ops: Vec<ElementaryOp> = [(&[0][..], 0.0), (&[1], 0.0), (&[0, 1], 0.5), (&[2], 1.0)]
            .iter()
            .map(|&(v, g)| ElementaryOp::include(simplex(v), g))
            .collect();
        let f = tower_to_filtration(&Tower::new(ops)).unwrap();
        let cells: Vec<(Vec<VertexId>, f64)> = f.cells().iter().map(|(s, g)| (s.vertices().to_vec(), *g)).collect();
        assert_eq!(
            cells,
            vec![(vec![0], 0.0), (vec![1], 0.0), (vec![0, 1], 0.5), (vec![2], 1.0)]
        );
    }

    #[test]
    fn contracting_an_edge() {
        let t = Tower::new(vec![
            ElementaryOp::include(simplex(&[0]), 0.0),
            ElementaryOp::include(simplex(&[1]), 0.0),
            ElementaryOp::include(simplex(&[0, 1]), 0.0),
            ElementaryOp::contract(0, 1, 1.0),
        ]);
        let f = tower_to_filtration(&t).unwrap();
        assert_eq!(f.len(), 3);
        let pd = compute_persistence(&f).unwrap();
        assert_eq!(
            pd.pairs(),
            &[PersistencePair {
                dim: 0,
                birth: 0.0,
                death: f64::INFINITY
            }]
        );
    }

    #[test]
    fn contraction_merges_components() {
        // two points merged by a contraction at grade 1
        let t = Tower::new(vec![
            ElementaryOp::include(simplex(&[0]), 0.0),
            ElementaryOp::include(simplex(&[1]), 0.0),
            ElementaryOp::contract(1, 0, 1.0),
        ]);
        let pd = compute_persistence(&tower_to_filtration(&t).unwrap()).unwrap();
        assert_eq!(
            pd.pairs(),
            &[
                PersistencePair {
                    dim: 0,
                    birth: 0.0,
                    death: 1.0
                },
                PersistencePair {
                    dim: 0,
                    birth: 0.0,
                    death: f64::INFINITY
                }
            ]
        );
    }

    #[test]
    fn relabeled_vertex_is_fresh() {
        // 1 is contracted away, then a new vertex labeled 1 appears
        let t = Tower::new(vec![
            ElementaryOp::include(simplex(&[0]), 0.0),
            ElementaryOp::include(simplex(&[1]), 0.0),
            ElementaryOp::contract(1, 0, 1.0),
            ElementaryOp::include(simplex(&[1]), 2.0),
        ]);
        assert!(t.validate().is_ok());
        let pd = compute_persistence(&tower_to_filtration(&t).unwrap()).unwrap();
        assert_eq!(pd.essential_counts(), vec![2]);
    }

    #[test]
    fn unknown_contraction_rejected() {
        let t = Tower::new(vec![
            ElementaryOp::include(simplex(&[0]), 0.0),
            ElementaryOp::contract(5, 0, 1.0),
        ]);
        assert_eq!(
            tower_to_filtration(&t),
            Err(TowerError::UnknownVertex { index: 1, vertex: 5 })
        );
        assert!(t.validate().is_err());
    }

    #[test]
    fn assembly_input_checks() {
        let c = triangle_core();
        let r = RetractionMap::identity(c.vertices());
        assert!(matches!(
            assemble_core_tower(std::slice::from_ref(&c), &[], &[0.0], DEFAULT_EXPANSION_CAP),
            Err(TowerError::LengthMismatch { .. })
        ));
        assert_eq!(
            assemble_core_tower(
                &[c.clone(), c.clone()],
                &[r.clone(), r.clone()],
                &[1.0, 1.0],
                DEFAULT_EXPANSION_CAP
            ),
            Err(TowerError::GradesNotIncreasing)
        );
        // a retraction that does not cover the previous core
        let other = RetractionMap::identity(&[1, 3]);
        let small = ComplexMatrix::from_simplex_list(&[simplex(&[1, 3])]).unwrap();
        assert_eq!(
            assemble_core_tower(&[c, small], &[r, other], &[0.0, 1.0], DEFAULT_EXPANSION_CAP),
            Err(TowerError::NotNested { snapshot: 1, vertex: 4 })
        );
    }
}
