//! Fixtures shared by unit tests.

use rand::Rng;

use crate::complex::{ComplexMatrix, Simplex, VertexId};

/// The six-vertex worked example: a..f are 0..5, columns
/// {b,c}, {b,e}, {a,b,d}, {d,e}, {e,f}.
pub fn six_vertex() -> ComplexMatrix {
    let cols: [&[VertexId]; 5] = [&[1, 2], &[1, 4], &[0, 1, 3], &[3, 4], &[4, 5]];
    ComplexMatrix::from_simplex_list(
        &cols
            .iter()
            .map(|c| Simplex::new(c.to_vec()).unwrap())
            .collect::<Vec<_>>(),
    )
    .unwrap()
}

pub fn simplex(v: &[VertexId]) -> Simplex {
    Simplex::new(v.to_vec()).unwrap()
}

/// `count` random non-empty subsets of `0..n`, each of size at most 4.
pub fn random_simplices<R: Rng>(rng: &mut R, n: u32, count: usize) -> Vec<Simplex> {
    (0..count)
        .map(|_| {
            let size = rng.gen_range(1..=4.min(n as usize));
            let mut v: Vec<VertexId> = Vec::with_capacity(size);
            while v.len() < size {
                let x = rng.gen_range(0..n);
                if !v.contains(&x) {
                    v.push(x);
                }
            }
            Simplex::new(v).unwrap()
        })
        .collect()
}
