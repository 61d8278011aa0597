//! Engine runs, cross-checks and reports.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use wordsketch::{
    point_query, BufferedSketch, Counters, OpCounts, SketchConfig, SketchState, UpdateRecord,
};

use crate::BenchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// One update at a time, `T log k` hash evaluations each.
    Naive,
    /// Buffer `B` updates, then flush them in one go.
    Batch,
    /// Double-buffered with the flush spread over later updates.
    Buffered,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Naive, Engine::Batch, Engine::Buffered];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Naive => "naive",
            Engine::Batch => "batch",
            Engine::Buffered => "buffered",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| BenchError::InvalidSpec(format!("unknown engine {s:?}")))
    }
}

/// Point-query error against the exact vector, over the periodic queries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QueryErrors {
    pub queries: u64,
    pub mean_abs_error: f64,
    pub max_abs_error: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineReport {
    pub engine: Engine,
    /// Most counted steps any single update cost.
    pub max_update_steps: u64,
    pub mean_update_steps: f64,
    pub total_update_steps: u64,
    /// Steps of the largest flush; zero for the naive engine.
    pub flush_steps: u64,
    /// Per-update step budget of the buffered engine.
    pub quantum: Option<u64>,
    pub query_errors: QueryErrors,
    /// Wall clock; the one field that varies between identical runs.
    pub wall_ns: u64,
}

/// Valid only when `counters_match` holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: SketchConfig,
    pub stream_length: usize,
    pub query_every: usize,
    pub engines: Vec<EngineReport>,
    pub counters_match: bool,
}

impl BenchReport {
    pub fn engine(&self, e: Engine) -> Option<&EngineReport> {
        self.engines.iter().find(|r| r.engine == e)
    }
}

/// Updates between periodic point queries.
pub const DEFAULT_QUERY_EVERY: usize = 1000;

struct Tally {
    max: u64,
    total: u64,
    abs_err: u128,
    max_err: u64,
    queries: u64,
}

impl Tally {
    fn new() -> Self {
        Tally {
            max: 0,
            total: 0,
            abs_err: 0,
            max_err: 0,
            queries: 0,
        }
    }

    fn update(&mut self, steps: u64) {
        self.max = self.max.max(steps);
        self.total += steps;
    }

    fn query(&mut self, est: i64, truth: i64) {
        let e = est.abs_diff(truth);
        self.abs_err += e as u128;
        self.max_err = self.max_err.max(e);
        self.queries += 1;
    }

    fn report(
        &self,
        engine: Engine,
        len: usize,
        flush_steps: u64,
        quantum: Option<u64>,
        wall_ns: u64,
    ) -> EngineReport {
        EngineReport {
            engine,
            max_update_steps: self.max,
            mean_update_steps: if len == 0 {
                0.0
            } else {
                self.total as f64 / len as f64
            },
            total_update_steps: self.total,
            flush_steps,
            quantum,
            query_errors: QueryErrors {
                queries: self.queries,
                mean_abs_error: if self.queries == 0 {
                    0.0
                } else {
                    self.abs_err as f64 / self.queries as f64
                },
                max_abs_error: self.max_err,
            },
            wall_ns,
        }
    }
}

/// Exact vector, for query errors.
struct Truth(HashMap<u64, i64>);

impl Truth {
    fn get(&self, u: u64) -> i64 {
        self.0.get(&u).copied().unwrap_or(0)
    }
}

fn run_engine(
    engine: Engine,
    stream: &[UpdateRecord],
    config: &SketchConfig,
    query_every: usize,
) -> Result<(EngineReport, Counters), BenchError> {
    let start = Instant::now();
    let mut tally = Tally::new();
    let mut truth = Truth(HashMap::new());
    let due = |i: usize| query_every > 0 && (i + 1).is_multiple_of(query_every);
    let (flush_steps, quantum, counters) = match engine {
        Engine::Naive => {
            let mut s = SketchState::new(config.clone())?;
            for (i, &upd) in stream.iter().enumerate() {
                let mut ops = OpCounts::default();
                s.naive_update_counted(upd, &mut ops);
                tally.update(ops.steps());
                *truth.0.entry(upd.u).or_default() += upd.delta;
                if due(i) {
                    tally.query(point_query(&s, upd.u).value, truth.get(upd.u));
                }
            }
            (0, None, s.counters_snapshot())
        }
        Engine::Batch => {
            let mut s = SketchState::new(config.clone())?;
            let mut buf = Vec::with_capacity(config.b);
            let mut largest = 0;
            for (i, &upd) in stream.iter().enumerate() {
                buf.push(upd);
                *truth.0.entry(upd.u).or_default() += upd.delta;
                if buf.len() == config.b {
                    let mut ops = OpCounts::default();
                    s.batch_update_counted(&buf, &mut ops)?;
                    buf.clear();
                    largest = largest.max(ops.steps());
                    tally.update(ops.steps());
                } else {
                    tally.update(0);
                }
                if due(i) {
                    // queries flush the partial buffer outside the update count
                    s.batch_update(&buf)?;
                    buf.clear();
                    tally.query(point_query(&s, upd.u).value, truth.get(upd.u));
                }
            }
            s.batch_update(&buf)?;
            (largest, None, s.counters_snapshot())
        }
        Engine::Buffered => {
            let mut s = BufferedSketch::new(config.clone())?;
            for (i, &upd) in stream.iter().enumerate() {
                s.buffered_update(upd)?;
                tally.update(s.last_update_steps());
                *truth.0.entry(upd.u).or_default() += upd.delta;
                if due(i) {
                    tally.query(s.point_query(upd.u).value, truth.get(upd.u));
                }
            }
            let counters = s.counters_snapshot();
            let r = s.step_accounting();
            (r.flush_total_steps, Some(r.quantum), counters)
        }
    };
    let wall_ns = start.elapsed().as_nanos() as u64;
    Ok((
        tally.report(engine, stream.len(), flush_steps, quantum, wall_ns),
        counters,
    ))
}

/// Runs each engine over `stream` and cross-checks their final counters.
pub fn run_bench(
    stream: &[UpdateRecord],
    config: &SketchConfig,
    engines: &[Engine],
    query_every: usize,
) -> Result<BenchReport, BenchError> {
    config.validate()?;
    if engines.is_empty() {
        return Err(BenchError::InvalidSpec("no engines selected".into()));
    }
    let mut reports = Vec::new();
    let mut finals: Vec<Counters> = Vec::new();
    for &e in engines {
        let (r, c) = run_engine(e, stream, config, query_every)?;
        reports.push(r);
        finals.push(c);
    }
    Ok(BenchReport {
        config: config.clone(),
        stream_length: stream.len(),
        query_every,
        engines: reports,
        counters_match: finals.windows(2).all(|w| w[0] == w[1]),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(BenchError::InvalidSpec(format!("unknown format {s:?}"))),
        }
    }
}

pub const CSV_HEADER: [&str; 5] = ["engine", "max_steps", "mean_steps", "wall_ns", "match"];

pub fn render_report(report: &BenchReport, format: ReportFormat) -> Result<String, BenchError> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER)?;
            for r in &report.engines {
                w.write_record([
                    r.engine.name().to_string(),
                    r.max_update_steps.to_string(),
                    format!("{:.3}", r.mean_update_steps),
                    r.wall_ns.to_string(),
                    report.counters_match.to_string(),
                ])?;
            }
            let bytes = w.into_inner().map_err(|e| BenchError::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

pub fn emit_report(
    report: &BenchReport,
    format: ReportFormat,
    path: &Path,
) -> Result<(), BenchError> {
    std::fs::write(path, render_report(report, format)?)?;
    Ok(())
}
