#![allow(dead_code)]

use std::collections::HashMap;

use rand::Rng;
use sctower::filtration::Filtration;
use sctower::persistence::{PersistenceDiagram, PersistencePair};
use sctower::rips::DistanceMatrix;
use sctower::{ComplexMatrix, Simplex};

pub fn random_points<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| vec![rng.gen(), rng.gen()]).collect()
}

/// Random complex on at most `max_vertices` vertices, generated by up to 15
/// random simplices of 1 to 5 vertices.
pub fn random_complex<R: Rng>(rng: &mut R, max_vertices: u32) -> ComplexMatrix {
    let n = rng.gen_range(1..=max_vertices);
    let count = rng.gen_range(1..=15);
    let simplices: Vec<Simplex> = (0..count)
        .map(|_| {
            let size = rng.gen_range(1..=5.min(n));
            let mut v: Vec<u32> = (0..n).collect();
            for i in 0..size as usize {
                let j = rng.gen_range(i..v.len());
                v.swap(i, j);
            }
            v.truncate(size as usize);
            Simplex::new(v).unwrap()
        })
        .collect();
    ComplexMatrix::from_simplex_list(&simplices).unwrap()
}

/// Every subset of the points with diameter at most `end`, graded by its
/// diameter.
pub fn exact_rips_filtration(d: &DistanceMatrix, end: f64) -> Filtration {
    let n = d.len();
    assert!(n <= 16);
    let mut cells = Vec::new();
    for mask in 1u32..(1 << n) {
        let v: Vec<u32> = (0..n as u32).filter(|&i| mask & (1 << i) != 0).collect();
        let mut diam = 0.0f64;
        for (a, &i) in v.iter().enumerate() {
            for &j in &v[a + 1..] {
                diam = diam.max(d.get(i as usize, j as usize));
            }
        }
        if diam <= end {
            cells.push((Simplex::new(v).unwrap(), diam));
        }
    }
    Filtration::from_cells(cells)
}

fn rank(vectors: &[u128]) -> usize {
    let mut pivots: HashMap<u32, u128> = HashMap::new();
    let mut r = 0;
    for &v in vectors {
        let mut v = v;
        while v != 0 {
            let top = 127 - v.leading_zeros();
            match pivots.get(&top) {
                Some(&p) => v ^= p,
                None => {
                    pivots.insert(top, v);
                    r += 1;
                    break;
                }
            }
        }
    }
    r
}

/// Cycle space basis of the chains on `cells`.
fn cycles(cells: &[usize], boundary: &[u128]) -> Vec<u128> {
    let mut pivots: HashMap<u32, (u128, u128)> = HashMap::new();
    let mut basis = Vec::new();
    for &c in cells {
        let (mut b, mut chain) = (boundary[c], 1u128 << c);
        loop {
            if b == 0 {
                basis.push(chain);
                break;
            }
            let top = 127 - b.leading_zeros();
            match pivots.get(&top) {
                Some(&(pb, pc)) => {
                    b ^= pb;
                    chain ^= pc;
                }
                None => {
                    pivots.insert(top, (b, chain));
                    break;
                }
            }
        }
    }
    basis
}

/// Diagram from the rank invariant: the multiplicity of `[g_i, g_j)` is
/// `b(i,j-1) - b(i,j) - b(i-1,j-1) + b(i-1,j)` where `b(i,j)` is the rank of
/// `H(K_i) -> H(K_j)` over GF(2). Independent of any matrix reduction order.
pub fn rank_invariant_diagram(f: &Filtration) -> PersistenceDiagram {
    let cells = f.cells();
    assert!(cells.len() <= 128, "oracle handles at most 128 cells");
    let index: HashMap<&Simplex, usize> = cells.iter().enumerate().map(|(i, (s, _))| (s, i)).collect();
    let boundary: Vec<u128> = cells
        .iter()
        .map(|(s, _)| {
            if s.len() == 1 {
                return 0;
            }
            s.facets().fold(0u128, |acc, t| acc | 1u128 << index[&t])
        })
        .collect();

    let mut grades: Vec<f64> = cells.iter().map(|c| c.1).collect();
    grades.sort_by(f64::total_cmp);
    grades.dedup();
    let levels = grades.len();
    let level = |g: f64| grades.iter().position(|&x| x == g).unwrap();
    let max_dim = cells.iter().map(|(s, _)| s.dimension()).max().unwrap_or(0);

    let mut pairs = Vec::new();
    for k in 0..=max_dim {
        let upto = |dim: usize, l: usize| -> Vec<usize> {
            (0..cells.len())
                .filter(|&c| cells[c].0.dimension() == dim && level(cells[c].1) <= l)
                .collect()
        };
        let z: Vec<Vec<u128>> = (0..levels).map(|i| cycles(&upto(k, i), &boundary)).collect();
        let b: Vec<Vec<u128>> = (0..levels)
            .map(|j| upto(k + 1, j).iter().map(|&c| boundary[c]).collect())
            .collect();
        let beta = |i: isize, j: usize| -> i64 {
            if i < 0 {
                return 0;
            }
            let i = i as usize;
            let joint: Vec<u128> = z[i].iter().chain(&b[j]).copied().collect();
            (rank(&joint) - rank(&b[j])) as i64
        };
        for i in 0..levels {
            let ii = i as isize;
            for j in i + 1..levels {
                let mult = beta(ii, j - 1) - beta(ii, j) - beta(ii - 1, j - 1) + beta(ii - 1, j);
                assert!(mult >= 0);
                for _ in 0..mult {
                    pairs.push(PersistencePair {
                        dim: k,
                        birth: grades[i],
                        death: grades[j],
                    });
                }
            }
            let essential = beta(ii, levels - 1) - beta(ii - 1, levels - 1);
            for _ in 0..essential {
                pairs.push(PersistencePair {
                    dim: k,
                    birth: grades[i],
                    death: f64::INFINITY,
                });
            }
        }
    }
    PersistenceDiagram::new(pairs)
}
