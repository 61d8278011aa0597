use criterion::{BenchmarkId, Criterion, Throughput};
use wordsketch::{BufferedSketch, SketchConfig, SketchState};
use wordsketch_bench::signed_stream;

pub fn bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("update");
    g.sample_size(10);
    let stream = signed_stream(4096, 1);
    g.throughput(Throughput::Elements(stream.len() as u64));
    for (t, b) in [(64usize, 64usize), (256, 256)] {
        let cfg = SketchConfig::new(2, 2, t, b, 9);
        let id = format!("T{t}_B{b}");
        g.bench_function(BenchmarkId::new("naive", &id), |bch| {
            bch.iter(|| {
                let mut s = SketchState::new(cfg.clone()).unwrap();
                stream.iter().for_each(|&u| s.naive_update(u));
                s
            })
        });
        g.bench_function(BenchmarkId::new("batch", &id), |bch| {
            bch.iter(|| {
                let mut s = SketchState::new(cfg.clone()).unwrap();
                for chunk in stream.chunks(b) {
                    s.batch_update(chunk).unwrap();
                }
                s
            })
        });
        g.bench_function(BenchmarkId::new("buffered", &id), |bch| {
            bch.iter(|| {
                let mut s = BufferedSketch::new(cfg.clone()).unwrap();
                stream.iter().for_each(|&u| s.buffered_update(u).unwrap());
                s.counters_snapshot()
            })
        });
    }
    g.finish();
}
