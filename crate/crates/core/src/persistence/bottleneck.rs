//! Bottleneck distance between persistence diagrams.

use std::collections::VecDeque;

use super::PersistenceDiagram;

/// Bottleneck distance between the dimension-`dim` parts of two diagrams.
///
/// Finite points may be matched to each other or to the diagonal; essential
/// points only to essential points. Returns infinity when the essential counts
/// differ.
pub fn bottleneck_distance(a: &PersistenceDiagram, b: &PersistenceDiagram, dim: usize) -> f64 {
    let split = |d: &PersistenceDiagram| {
        let mut finite = Vec::new();
        let mut essential = Vec::new();
        for p in d.in_dim(dim) {
            if p.is_essential() {
                essential.push(p.birth);
            } else {
                finite.push((p.birth, p.death));
            }
        }
        essential.sort_by(f64::total_cmp);
        (finite, essential)
    };
    let (fa, ea) = split(a);
    let (fb, eb) = split(b);
    if ea.len() != eb.len() {
        return f64::INFINITY;
    }
    // on a line, matching in sorted order minimizes the largest shift
    let essential = ea.iter().zip(&eb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    essential.max(finite_bottleneck(&fa, &fb))
}

/// Cost matrix of the usual reduction to a square assignment: left side is
/// `a` followed by diagonal copies of `b`, right side is `b` followed by
/// diagonal copies of `a`. `None` marks a forbidden pair.
fn augmented_costs(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<Vec<Option<f64>>> {
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let mut cost = vec![vec![None; n]; n];
    for i in 0..na {
        for j in 0..nb {
            cost[i][j] = Some((a[i].0 - b[j].0).abs().max((a[i].1 - b[j].1).abs()));
        }
        cost[i][nb + i] = Some((a[i].1 - a[i].0) / 2.0);
    }
    for j in 0..nb {
        cost[na + j][j] = Some((b[j].1 - b[j].0) / 2.0);
        for i in 0..na {
            cost[na + j][nb + i] = Some(0.0);
        }
    }
    cost
}

fn finite_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let n = a.len() + b.len();
    if n == 0 {
        return 0.0;
    }
    let cost = augmented_costs(a, b);
    let mut radii: Vec<f64> = cost.iter().flatten().flatten().copied().collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();

    // smallest candidate radius admitting a perfect matching
    let (mut lo, mut hi) = (0, radii.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_perfect_matching(&cost, radii[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    radii[lo]
}

fn has_perfect_matching(cost: &[Vec<Option<f64>>], radius: f64) -> bool {
    let adjacency: Vec<Vec<usize>> = cost
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| c.is_some_and(|c| c <= radius))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    hopcroft_karp(&adjacency, cost.len()) == cost.len()
}

/// Size of a maximum matching in a bipartite graph given by left-side
/// adjacency lists.
pub(crate) fn hopcroft_karp(adjacency: &[Vec<usize>], right_size: usize) -> usize {
    const FREE: usize = usize::MAX;
    let left_size = adjacency.len();
    let mut match_left = vec![FREE; left_size];
    let mut match_right = vec![FREE; right_size];
    let mut layer = vec![0usize; left_size];
    let mut matched = 0;

    loop {
        // BFS from free left vertices builds layers
        let mut queue = VecDeque::new();
        for u in 0..left_size {
            if match_left[u] == FREE {
                layer[u] = 0;
                queue.push_back(u);
            } else {
                layer[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u] {
                let w = match_right[v];
                if w == FREE {
                    found = true;
                } else if layer[w] == usize::MAX {
                    layer[w] = layer[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return matched;
        }

        fn augment(
            u: usize,
            adjacency: &[Vec<usize>],
            layer: &mut [usize],
            match_left: &mut [usize],
            match_right: &mut [usize],
        ) -> bool {
            for &v in &adjacency[u] {
                let w = match_right[v];
                if w == usize::MAX
                    || (layer[w] == layer[u] + 1 && augment(w, adjacency, layer, match_left, match_right))
                {
                    match_left[u] = v;
                    match_right[v] = u;
                    return true;
                }
            }
            layer[u] = usize::MAX;
            false
        }

        for u in 0..left_size {
            if match_left[u] == FREE && augment(u, adjacency, &mut layer, &mut match_left, &mut match_right) {
                matched += 1;
            }
        }
    }
}
