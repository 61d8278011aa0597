//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wordsketch::hash::{encode_point, eval_single};
use wordsketch::matrix::{
    matmul_rect, matmul_recursive, matmul_schoolbook, packed_inner_block, PackedKernelSpec,
};
use wordsketch::{
    l2_estimate, l2_estimate_with, BitMatrix, BitVector, BufferedSketch, Combiner, FieldSpec,
    HashFamilySpec, HashSeed, KernelKind, OpCounts, SketchConfig, SketchState, UpdateRecord,
};

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

fn random_signed(rng: &mut ChaCha8Rng, n: u64) -> UpdateRecord {
    let mut d = rng.random_range(-1000..=1000);
    if d == 0 {
        d = 1;
    }
    UpdateRecord::new(rng.random_range(0..n), d)
}

/// 100 streams of 10^4 signed updates, batch engine against naive engine.
fn batch_naive_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA1);
    let (ks, ts, bs) = ([2, 4, 16], [32, 64], [8, 64]);
    let mut mismatches = 0;
    for run in 0..100usize {
        let k = ks[run % 3];
        let t = ts[(run / 3) % 2];
        let b = bs[(run / 6) % 2];
        let kernel = KernelKind::ALL[run % 2];
        let leaf = [1, 2, 32][(run / 2) % 3];
        let cfg = SketchConfig::new(k, 2, t, b, rng.random())
            .with_kernel(kernel)
            .with_leaf_tiles(leaf);
        let mut naive = SketchState::new(cfg.clone()).unwrap();
        let mut batch = SketchState::new(cfg).unwrap();
        let stream: Vec<_> = (0..10_000)
            .map(|_| random_signed(&mut rng, 1 << 40))
            .collect();
        for &u in &stream {
            naive.naive_update(u);
        }
        for chunk in stream.chunks(b) {
            batch.batch_update(chunk).unwrap();
        }
        if naive.counters_snapshot() != batch.counters_snapshot() {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{mismatches}/100 streams differ"))
}

/// 10 runs of 10^6 updates through the buffered engine, queried every 10^3.
fn deamortized_bound() -> Outcome {
    let mut worst = (0u64, 0u64);
    let (mut bad_queries, mut overruns, mut over_quantum) = (0, 0, 0);
    let runs: Vec<_> = (0..10u64)
        .map(|run| {
            std::thread::spawn(move || {
                let mut rng = ChaCha8Rng::seed_from_u64(0xB2 + run);
                let cfg = SketchConfig::new(4, 2, 32, 64, rng.random());
                let mut oracle = SketchState::new(cfg.clone()).unwrap();
                let mut s = BufferedSketch::new(cfg).unwrap();
                let (mut bad, mut overrun) = (0, 0);
                for i in 1..=1_000_000u32 {
                    let u = random_signed(&mut rng, 1 << 20);
                    oracle.naive_update(u);
                    if s.buffered_update(u).is_err() {
                        overrun += 1;
                    }
                    if i % 1000 == 0 && s.counters_snapshot() != oracle.counters_snapshot() {
                        bad += 1;
                    }
                }
                (bad, overrun, s.step_accounting())
            })
        })
        .collect();
    for h in runs {
        let (bad, overrun, r) = h.join().unwrap();
        bad_queries += bad;
        overruns += overrun;
        if r.max_steps_per_update > r.quantum {
            over_quantum += 1;
        }
        if r.max_steps_per_update * worst.1.max(1) >= worst.0 * r.quantum.max(1) {
            worst = (r.max_steps_per_update, r.quantum);
        }
    }
    outcome(
        bad_queries == 0 && overruns == 0 && over_quantum == 0,
        format!(
            "{bad_queries} mismatched queries, {overruns} overruns, {over_quantum} runs over quantum; worst max_steps/quantum = {}/{}",
            worst.0, worst.1
        ),
    )
}

/// 200 random products, recursive and rectangular against schoolbook.
fn matmul_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let kernels: Vec<_> = KernelKind::ALL.iter().map(|k| k.build()).collect();
    let mut failures = 0;
    for i in 0..200 {
        let (m, r, n) = match i % 4 {
            0 => {
                let d = rng.random_range(8..=256);
                (d, d, d)
            }
            1 => {
                let w = [8, 16, 32, 64][rng.random_range(0..4)];
                let b = [8, 64][rng.random_range(0..2)];
                (w, b, w)
            }
            _ => (
                rng.random_range(8..=256),
                rng.random_range(8..=256),
                rng.random_range(8..=256),
            ),
        };
        let a = BitMatrix::random(m, r, &mut rng);
        let b = BitMatrix::random(r, n, &mut rng);
        let want = matmul_schoolbook(&a, &b).unwrap();
        for kernel in &kernels {
            if matmul_recursive(&a, &b, kernel.as_ref()).unwrap() != want {
                failures += 1;
            }
            if matmul_rect(&a, &b, kernel.as_ref()).unwrap() != want {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("{failures}/800 products differ"))
}

/// `s(v)` and `s^r(w)` for vectors that fit one word.
fn spread(v: &[bool], w: &[bool], g: u32) -> (u64, u64) {
    let d = v.len();
    let sv = (0..d).map(|t| (v[t] as u64) << (g as usize * t)).sum();
    let sw = (0..d)
        .map(|t| (w[t] as u64) << (g as usize * (d - 1 - t)))
        .sum();
    (sv, sw)
}

/// 10^4 random vector pairs through the packed kernel, plus the worked example.
fn packed_fidelity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD4);
    let mut failures = 0;
    for _ in 0..10_000 {
        let d = rng.random_range(1..=32);
        let v: Vec<bool> = (0..d).map(|_| rng.random()).collect();
        let w: Vec<bool> = (0..d).map(|_| rng.random()).collect();
        let spec = PackedKernelSpec::binary(1, d, 1).unwrap();
        let vm = BitMatrix::from_fn(1, d, |_, c| v[c]);
        let wm = BitMatrix::from_fn(d, 1, |r, _| w[r]);
        let got = packed_inner_block(&vm, &wm, spec).unwrap().get(0, 0);
        let dot = v.iter().zip(&w).filter(|(a, b)| **a && **b).count() as u64;
        if got != dot {
            failures += 1;
        }
    }
    let (v, w) = ([true, false, true], [true, true, true]);
    let (sv, sw) = spread(&v, &w, 4);
    let product = sv * sw;
    let middle = (product >> (4 * 2)) & 0xF;
    let spec = PackedKernelSpec::new(1, 3, 1, 4, 2048).unwrap();
    let got = packed_inner_block(
        &BitMatrix::from_text("101").unwrap(),
        &BitMatrix::from_text("1\n1\n1").unwrap(),
        spec,
    )
    .unwrap()
    .get(0, 0);
    let example = product == 70161 && middle == 2 && got == 2;
    outcome(
        failures == 0 && example,
        format!("{failures}/10000 pairs wrong; worked example product {product}, middle slot {middle}, kernel {got}"),
    )
}

/// Every 2-bit output pattern over all 2^16 seeds, for 50 key pairs.
fn pairwise_independence() -> Outcome {
    let spec = HashFamilySpec::new(2, 2, FieldSpec::standard(8).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xE5);
    let seeds: Vec<HashSeed> = (0..1u64 << 16)
        .map(|s| HashSeed::new(BitVector::from_words(16, vec![s]).unwrap(), &spec).unwrap())
        .collect();
    let mut bad = 0;
    for _ in 0..50 {
        let u1 = rng.random_range(0..256u64);
        let mut u2 = rng.random_range(0..256u64);
        while u2 == u1 {
            u2 = rng.random_range(0..256u64);
        }
        let mut counts = [0u32; 4];
        for s in &seeds {
            let p = eval_single(s, u1, &spec) as usize | (eval_single(s, u2, &spec) as usize) << 1;
            counts[p] += 1;
        }
        if counts != [1 << 14; 4] {
            bad += 1;
        }
    }
    outcome(
        bad == 0,
        format!("{bad}/50 pairs not uniform over 2^16 seeds"),
    )
}

fn f2_rank(mut rows: Vec<Vec<u64>>) -> usize {
    let bits = rows.first().map_or(0, |r| r.len() * 64);
    let mut rank = 0;
    for col in 0..bits {
        let (w, b) = (col / 64, col % 64);
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][w] >> b & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && rows[i][w] >> b & 1 == 1 {
                let pivot = rows[rank].clone();
                rows[i].iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
            }
        }
        rank += 1;
    }
    rank
}

/// 10^3 tuples of c <= 4 distinct keys at W = 8; g-vectors have rank c.
fn vandermonde_rank() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF6);
    let field = FieldSpec::standard(8).unwrap();
    let mut bad = 0;
    for i in 0..1000 {
        let c = 2 + i % 3;
        let spec = HashFamilySpec::new(c, 2, field.clone()).unwrap();
        let mut keys: Vec<u64> = (0..256).collect();
        keys.shuffle(&mut rng);
        let rows: Vec<Vec<u64>> = keys[..c]
            .iter()
            .map(|&u| encode_point(u, &spec).words().to_vec())
            .collect();
        if f2_rank(rows) != c {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{bad}/1000 tuples rank-deficient"))
}

/// Nonnegative streams, k = 32, T = 32: estimates within [nu_u, nu_u + 0.1 |nu|_1].
fn point_query_guarantee() -> Outcome {
    let n = 10_000u64;
    let (mut failures, mut worst) = (0, 0f64);
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x107 + seed);
        let mut s = BufferedSketch::new(SketchConfig::new(32, 2, 32, 64, rng.random())).unwrap();
        let mut nu = vec![0i64; n as usize];
        // a few planted heavy keys on top of uniform mass
        for _ in 0..100_000 {
            let u = if rng.random_bool(0.1) {
                rng.random_range(0..10)
            } else {
                rng.random_range(0..n)
            };
            let d = rng.random_range(1..=19);
            nu[u as usize] += d;
            s.buffered_update(UpdateRecord::new(u, d)).unwrap();
        }
        let l1: i64 = nu.iter().sum();
        for _ in 0..1000 {
            let u = rng.random_range(0..n);
            let est = s.point_query(u).value;
            let err = (est - nu[u as usize]) as f64 / l1 as f64;
            worst = worst.max(err);
            if est < nu[u as usize] || 10 * (est - nu[u as usize]) > l1 {
                failures += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!("{failures}/10000 estimates outside the band; worst overcount {worst:.4} |nu|_1"),
    )
}

/// 100 trials at T = 128, k = 2: estimate within [0.5, 2] of |nu|_2^2.
fn l2_estimation() -> Outcome {
    let n = 10_000u64;
    let (mut ok, mut lo, mut hi) = (0, f64::MAX, 0f64);
    let mut plain_ok = 0;
    for trial in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x208 + trial);
        let mut s = SketchState::new(SketchConfig::new(2, 4, 128, 256, rng.random())).unwrap();
        let mut nu = vec![0i64; n as usize];
        let stream: Vec<_> = (0..n)
            .map(|u| UpdateRecord::new(u, if rng.random() { 1 } else { -1 }))
            .collect();
        for upd in &stream {
            nu[upd.u as usize] += upd.delta;
        }
        for chunk in stream.chunks(256) {
            s.batch_update(chunk).unwrap();
        }
        let truth: i64 = nu.iter().map(|v| v * v).sum();
        let r = l2_estimate(&s).unwrap().value as f64 / truth as f64;
        lo = lo.min(r);
        hi = hi.max(r);
        if (0.5..=2.0).contains(&r) {
            ok += 1;
        }
        let plain = l2_estimate_with(&s, Combiner::Median).unwrap().value as f64 / truth as f64;
        if (0.5..=2.0).contains(&plain) {
            plain_ok += 1;
        }
    }
    outcome(
        ok >= 99,
        format!(
            "{ok}/100 trials in band; ratio range [{lo:.3}, {hi:.3}]; plain median of rows {plain_ok}/100"
        ),
    )
}

/// Counted word operations per update, batch against naive, T = 256, B = 256, k = 2.
fn cost_scaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x309);
    let stream: Vec<_> = (0..4096)
        .map(|_| random_signed(&mut rng, 1 << 40))
        .collect();
    let per_update = |kernel: KernelKind| {
        let cfg = SketchConfig::new(2, 2, 256, 256, 7).with_kernel(kernel);
        let mut naive = SketchState::new(cfg.clone()).unwrap();
        let mut batch = SketchState::new(cfg).unwrap();
        let (mut n_ops, mut b_ops) = (OpCounts::default(), OpCounts::default());
        for &u in &stream {
            naive.naive_update_counted(u, &mut n_ops);
        }
        for chunk in stream.chunks(256) {
            batch.batch_update_counted(chunk, &mut b_ops).unwrap();
        }
        assert_eq!(naive.counters_snapshot(), batch.counters_snapshot());
        let len = stream.len() as f64;
        (n_ops.steps() as f64 / len, b_ops.steps() as f64 / len)
    };
    let (naive, batch) = per_update(KernelKind::WordMm);
    let (_, packed) = per_update(KernelKind::Packed);
    outcome(
        batch < naive,
        format!(
            "naive {naive:.1} steps/update, batch {batch:.1} (ratio {:.3}); packed base kernel {packed:.1} (ratio {:.3})",
            batch / naive,
            packed / naive
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 9] = [
        (
            "1 batch/naive equivalence",
            batch_naive_equivalence,
            Some(Duration::from_secs(120)),
        ),
        (
            "2 deamortized correctness and bound",
            deamortized_bound,
            Some(Duration::from_secs(300)),
        ),
        ("3 matmul oracle equivalence", matmul_equivalence, None),
        ("4 packed kernel fidelity", packed_fidelity, None),
        (
            "5 exhaustive pairwise independence",
            pairwise_independence,
            Some(Duration::from_secs(60)),
        ),
        ("6 Vandermonde rank", vandermonde_rank, None),
        ("7 point-query guarantee", point_query_guarantee, None),
        ("8 l2 estimation", l2_estimation, None),
        ("9 cost-model scaling", cost_scaling, None),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let mut out = run();
        let took = start.elapsed();
        if let Some(limit) = limit {
            if took > limit {
                out.pass = false;
                out.detail += &format!("; over the {}s limit", limit.as_secs());
            }
        }
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} criterion {name}: {} [{:.1}s]",
            out.detail,
            took.as_secs_f64()
        );
        failed += !out.pass as usize;
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
