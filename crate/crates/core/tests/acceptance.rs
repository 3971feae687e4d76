//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::{exact_rips_filtration, random_complex, random_points};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sctower::collapse::{nerve_square, replay, CollapseEvent, CollapseTrace};
use sctower::io::{write_diagram, write_stats_csv, write_tower};
use sctower::persistence::{betti_numbers, bottleneck_distance, compute_persistence};
use sctower::pipeline::{compare_pipelines, run_pipeline, PipelineOptions, SnapshotStats};
use sctower::rips::{pairwise_distances, SnapshotSchedule};
use sctower::{core, nerve_step, ComplexMatrix, Simplex, DEFAULT_EXPANSION_CAP};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn simplex(v: &[u32]) -> Simplex {
    Simplex::new(v.to_vec()).unwrap()
}

fn columns(m: &ComplexMatrix) -> Vec<Vec<u32>> {
    m.maximal_simplices().into_iter().map(Simplex::into_vertices).collect()
}

fn six_vertex() -> ComplexMatrix {
    let s = [[1, 2].as_slice(), &[1, 4], &[0, 1, 3], &[3, 4], &[4, 5]];
    ComplexMatrix::from_simplex_list(&s.iter().map(|v| simplex(v)).collect::<Vec<_>>()).unwrap()
}

fn worked_example() -> Outcome {
    let m = six_vertex();
    let start = Instant::now();
    let c = core(&m);
    let elapsed = start.elapsed();
    let n = nerve_step(&m);
    // rows s1..s5 of the nerve become vertices 0..4, columns are b, d, e
    let core_ok = c.core.vertices() == [1, 3, 4] && columns(&c.core) == vec![vec![1, 4], vec![1, 3], vec![3, 4]];
    let nerve_ok = n.labels == [1, 3, 4]
        && n.matrix.vertices() == [0, 1, 2, 3, 4]
        && columns(&n.matrix) == vec![vec![0, 1, 2], vec![2, 3], vec![1, 3, 4]];
    let fast = elapsed < Duration::from_millis(1);
    outcome(
        core_ok && nerve_ok && fast,
        format!("core {core_ok}, nerve {nerve_ok}, core time {elapsed:?} (< 1 ms)"),
    )
}

fn schedule_of(start: f64, end: f64, snapshots: usize) -> SnapshotSchedule {
    SnapshotSchedule::uniform(start, (end - start) / (snapshots - 1) as f64, end).unwrap()
}

fn module_equality(stats: &mut Vec<SnapshotStats>) -> Outcome {
    let started = Instant::now();
    let mut clouds = 0;
    let mut failures = Vec::new();
    for n in [10, 15, 20, 25, 30] {
        for seed in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * n as u64 + seed);
            let d = pairwise_distances(&random_points(&mut rng, n)).unwrap();
            let snapshots = rng.gen_range(5..=40);
            let sched = schedule_of(rng.gen_range(0.02..0.1), rng.gen_range(0.25..0.4), snapshots);
            assert_eq!(sched.len(), snapshots);
            let cmp = compare_pipelines(&d, &sched, PipelineOptions::default()).unwrap();
            if !cmp.dimensions().iter().all(|&k| cmp.equal_in(k)) {
                failures.push(format!("n={n} seed={seed}"));
            }
            stats.extend(cmp.collapsed.stats.iter().chain(&cmp.oracle.stats));
            clouds += 1;
        }
    }
    let elapsed = started.elapsed();
    outcome(
        failures.is_empty() && elapsed < Duration::from_secs(120),
        format!("{clouds} clouds, unequal: {failures:?}, {elapsed:.1?} (< 2 min)"),
    )
}

fn approximation(stats: &mut Vec<SnapshotStats>) -> Outcome {
    let started = Instant::now();
    let mut worst_ratio: f64 = 0.0;
    let mut failures = Vec::new();
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
        let n = rng.gen_range(4..=12);
        let d = pairwise_distances(&random_points(&mut rng, n)).unwrap();
        let step = rng.gen_range(0.02..0.1);
        let start = step * rng.gen_range(0.2..1.0);
        let end = rng.gen_range(0.4..1.0);
        let sched = SnapshotSchedule::uniform(start, step, end).unwrap();
        let run = run_pipeline(&d, &sched, PipelineOptions::default()).unwrap();
        stats.extend(&run.stats);
        let last = sched.grades()[sched.len() - 1];
        let exact = compute_persistence(&exact_rips_filtration(&d, last)).unwrap();
        let dims = run.diagram.max_dim().max(exact.max_dim()).unwrap_or(0);
        for k in 0..=dims {
            let b = bottleneck_distance(&run.diagram, &exact, k);
            worst_ratio = worst_ratio.max(b / step);
            if b > step {
                failures.push(format!("seed={seed} dim={k} bottleneck={b} step={step}"));
            }
        }
    }
    let elapsed = started.elapsed();
    outcome(
        failures.is_empty() && elapsed < Duration::from_secs(60),
        format!("20 clouds, max bottleneck/step {worst_ratio:.3}, violations {failures:?}, {elapsed:.1?} (< 1 min)"),
    )
}

fn corpus() -> Vec<ComplexMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(4000);
    (0..120).map(|_| random_complex(&mut rng, 12)).collect()
}

/// Betti numbers without the zeros above the top nonzero degree.
fn homology(k: &ComplexMatrix) -> Vec<usize> {
    let mut b = betti_numbers(k, DEFAULT_EXPANSION_CAP).unwrap();
    while b.last() == Some(&0) {
        b.pop();
    }
    b
}

fn homotopy(corpus: &[ComplexMatrix]) -> Outcome {
    let started = Instant::now();
    let bad = corpus.iter().filter(|k| homology(k) != homology(&core(k).core)).count();
    let elapsed = started.elapsed();
    outcome(
        bad == 0 && elapsed < Duration::from_secs(30),
        format!(
            "{} complexes, {bad} with differing Betti numbers, {elapsed:.1?} (< 30 s)",
            corpus.len()
        ),
    )
}

fn union(a: &Simplex, b: &Simplex) -> Simplex {
    let mut v = a.vertices().to_vec();
    v.extend_from_slice(b.vertices());
    v.sort_unstable();
    v.dedup();
    Simplex::new(v).unwrap()
}

/// Checks `sigma ∪ r(sigma)` against the input complex for the composed
/// retraction, and separately for each single vertex removal against the
/// complex it is applied to.
fn contiguity(corpus: &[ComplexMatrix]) -> Outcome {
    let mut composed_bad = 0;
    let mut first_bad = None;
    let mut elementary_bad = 0;
    for k in corpus {
        let c = core(k);
        let violation = k.maximal_simplices().into_iter().find(|s| {
            let image = c.retraction.apply(s).unwrap();
            !k.contains_simplex(&union(s, &image))
        });
        if let Some(s) = violation {
            composed_bad += 1;
            first_bad.get_or_insert_with(|| (columns(k), s));
        }
        for (i, e) in c.trace.events.iter().enumerate() {
            let CollapseEvent::Row { dominated, dominating } = *e else {
                continue;
            };
            let prefix = CollapseTrace {
                events: c.trace.events[..i].to_vec(),
                ..Default::default()
            };
            let current = replay(k, &prefix).unwrap();
            let ok = current
                .maximal_simplices()
                .iter()
                .all(|s| !s.contains(dominated) || current.contains_simplex(&union(s, &simplex(&[dominating]))));
            if !ok {
                elementary_bad += 1;
            }
        }
    }
    let example = first_bad.map_or(String::new(), |(cols, s)| format!(", e.g. {s} in {cols:?}"));
    outcome(
        composed_bad == 0,
        format!(
            "composed retraction violates it on {composed_bad} of {} complexes{example}; \
             single vertex removals violate it {elementary_bad} times",
            corpus.len()
        ),
    )
}

fn idempotence(corpus: &[ComplexMatrix]) -> Outcome {
    let mut bad = 0;
    for k in corpus {
        let c = core(k).core;
        let again = core(&c);
        let stable = again.core == c && again.trace.events.is_empty();
        if !stable || !nerve_square(&c).same_complex(&c) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{} complexes, {bad} failures", corpus.len()))
}

fn monotonicity(stats: &[SnapshotStats]) -> Outcome {
    let bad = stats
        .iter()
        .filter(|s| s.after.m > s.before.m || s.after.d > s.before.d)
        .count();
    outcome(
        bad == 0 && !stats.is_empty(),
        format!("{} snapshots, {bad} with growth", stats.len()),
    )
}

fn determinism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8000);
    let d = pairwise_distances(&random_points(&mut rng, 40)).unwrap();
    let sched = SnapshotSchedule::uniform(0.02, 0.02, 0.3).unwrap();
    let files: Vec<[String; 3]> = [1, 2, 8]
        .iter()
        .map(|&workers| {
            let run = run_pipeline(
                &d,
                &sched,
                PipelineOptions {
                    workers,
                    ..Default::default()
                },
            )
            .unwrap();
            [
                write_diagram(&run.diagram),
                write_tower(run.tower.as_ref().unwrap()),
                write_stats_csv(&run.stats),
            ]
        })
        .collect();
    let same = files[0] == files[1] && files[0] == files[2];
    outcome(same, format!("workers 1, 2, 8 identical: {same}"))
}

fn circle() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9000);
    let points: Vec<Vec<f64>> = (0..100)
        .map(|_| {
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            vec![a.cos(), a.sin()]
        })
        .collect();
    let d = pairwise_distances(&points).unwrap();
    let sched = SnapshotSchedule::uniform(0.1, 0.005, 0.5).unwrap();
    let collapsed = run_pipeline(&d, &sched, PipelineOptions::default()).unwrap();
    let full = run_pipeline(
        &d,
        &sched,
        PipelineOptions {
            collapse: false,
            ..Default::default()
        },
    )
    .unwrap();
    let long = collapsed.diagram.in_dim(1).filter(|p| p.length() > 0.2).count();
    let factor = full.filtration_size as f64 / collapsed.filtration_size as f64;
    let elapsed = started.elapsed();
    outcome(
        long == 1 && factor >= 10.0 && elapsed < Duration::from_secs(300),
        format!(
            "{} snapshots, long H1 intervals {long}, cells {} vs {} (factor {factor:.1}, >= 10), {elapsed:.1?} (< 5 min)",
            sched.len(),
            collapsed.filtration_size,
            full.filtration_size
        ),
    )
}

fn main() {
    let corpus = corpus();
    let mut stats = Vec::new();
    let criteria: Vec<(&str, Outcome)> = vec![
        ("1 worked example", worked_example()),
        ("2 collapsed equals uncollapsed", module_equality(&mut stats)),
        ("3 snapshot approximation", approximation(&mut stats)),
        ("4 homotopy preservation", homotopy(&corpus)),
        ("5 contiguity of composed retraction", contiguity(&corpus)),
        ("6 idempotence and minimality", idempotence(&corpus)),
        ("7 size monotonicity", monotonicity(&stats)),
        ("8 determinism across workers", determinism()),
        ("9 circle", circle()),
    ];
    let mut failed = 0;
    for (name, o) in &criteria {
        println!(
            "criterion {name}: {} ({})",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
