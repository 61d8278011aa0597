//! Worst-case update time by double buffering.
//!
//! Updates go to the active buffer. When it fills, the buffers swap and a
//! flush of the full one starts in the background; every later update resumes
//! that flush for at most `quantum` counted steps. A query first finishes any
//! running flush, then flushes whatever sits in the active buffer.

use serde::{Deserialize, Serialize};

use crate::cost::OpCounts;
use crate::error::{Error, Result};
use crate::flush::FlushJob;
use crate::sketch::{Counters, SketchConfig, SketchState, UpdateRecord};

/// Step accounting for a [`BufferedSketch`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    pub quantum: u64,
    /// Most background steps spent inside any one update.
    pub max_steps_per_update: u64,
    /// Most steps any single flush took in total.
    pub flush_total_steps: u64,
    pub flushes: u64,
    /// Most steps any one query spent finishing flushes.
    #[serde(skip)]
    pub max_query_steps: u64,
}

impl StepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Cost profile of a full-buffer flush, measured by a dry run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlushProfile {
    pub total_steps: u64,
    pub max_chunk_steps: u64,
    pub chunks: u64,
}

impl FlushProfile {
    /// Dry-runs one flush of `B` synthetic updates on a scratch state.
    pub fn measure(config: &SketchConfig) -> Result<Self> {
        let mut scratch = SketchState::new(config.clone())?;
        let batch: Vec<UpdateRecord> = (0..config.b as u64)
            .map(|u| UpdateRecord::new(u, 1))
            .collect();
        let mut job = FlushJob::new(&scratch, &batch);
        let mut profile = FlushProfile {
            total_steps: 0,
            max_chunk_steps: 0,
            chunks: 0,
        };
        loop {
            let mut ops = OpCounts::default();
            let done = job.step(&mut scratch, &mut ops);
            profile.total_steps += ops.steps();
            profile.max_chunk_steps = profile.max_chunk_steps.max(ops.steps());
            profile.chunks += 1;
            if done {
                return Ok(profile);
            }
        }
    }

    /// `ceil(2 F / B)`, raised when needed so that `B` resumes always finish a
    /// flush even though each resume stops one chunk early.
    pub fn quantum(&self, b: usize) -> u64 {
        let b = b as u64;
        let base = (2 * self.total_steps).div_ceil(b);
        base.max(self.total_steps.div_ceil(b) + self.max_chunk_steps)
    }
}

#[derive(Debug)]
struct Running {
    job: FlushJob,
    buffer: usize,
    steps: u64,
}

#[derive(Debug)]
pub struct BufferedSketch {
    state: SketchState,
    bufs: [Vec<UpdateRecord>; 2],
    active: usize,
    running: Option<Running>,
    quantum: u64,
    max_chunk: u64,
    profile: FlushProfile,
    report: StepReport,
    last_update_steps: u64,
}

impl BufferedSketch {
    /// Calibrates the quantum with one dry-run flush.
    pub fn new(config: SketchConfig) -> Result<Self> {
        let profile = FlushProfile::measure(&config)?;
        let quantum = profile.quantum(config.b);
        Self::with_profile(config, profile, quantum)
    }

    /// Uses an explicit quantum instead of the calibrated one.
    pub fn with_quantum(config: SketchConfig, quantum: u64) -> Result<Self> {
        let profile = FlushProfile::measure(&config)?;
        Self::with_profile(config, profile, quantum)
    }

    fn with_profile(config: SketchConfig, profile: FlushProfile, quantum: u64) -> Result<Self> {
        let b = config.b;
        Ok(BufferedSketch {
            state: SketchState::new(config)?,
            bufs: [Vec::with_capacity(b), Vec::with_capacity(b)],
            active: 0,
            running: None,
            quantum,
            max_chunk: profile.max_chunk_steps,
            profile,
            report: StepReport {
                quantum,
                ..StepReport::default()
            },
            last_update_steps: 0,
        })
    }

    pub fn config(&self) -> &SketchConfig {
        self.state.config()
    }

    pub fn quantum(&self) -> u64 {
        self.quantum
    }

    pub fn profile(&self) -> FlushProfile {
        self.profile
    }

    pub fn active(&self) -> usize {
        self.active
    }

    pub fn buffer_len(&self, which: usize) -> usize {
        self.bufs[which].len()
    }

    pub fn flush_pending(&self) -> bool {
        self.running.is_some()
    }

    /// Background steps spent by the most recent update.
    pub fn last_update_steps(&self) -> u64 {
        self.last_update_steps
    }

    pub fn step_accounting(&self) -> StepReport {
        self.report
    }

    /// Appends `upd`, swaps buffers when the active one fills, and resumes
    /// the background flush for at most `quantum` steps.
    pub fn buffered_update(&mut self, upd: UpdateRecord) -> Result<()> {
        let b = self.state.config.b;
        self.bufs[self.active].push(upd);
        if self.bufs[self.active].len() == b {
            if let Some(r) = &self.running {
                return Err(Error::FlushOverrun {
                    remaining: self.profile.total_steps.saturating_sub(r.steps),
                    quantum: self.quantum,
                });
            }
            let full = self.active;
            self.active = 1 - full;
            self.running = Some(Running {
                job: FlushJob::new(&self.state, &self.bufs[full]),
                buffer: full,
                steps: 0,
            });
            self.report.flushes += 1;
        }
        let used = self.resume(self.quantum);
        self.last_update_steps = used;
        self.report.max_steps_per_update = self.report.max_steps_per_update.max(used);
        Ok(())
    }

    /// Runs whole chunks while one more chunk is sure to fit in `budget`.
    fn resume(&mut self, budget: u64) -> u64 {
        let Some(r) = self.running.as_mut() else {
            return 0;
        };
        let mut used = 0u64;
        let mut done = r.job.is_done();
        while !done && used + self.max_chunk <= budget {
            let mut ops = OpCounts::default();
            done = r.job.step(&mut self.state, &mut ops);
            used += ops.steps();
        }
        r.steps += used;
        if done {
            self.finish_running();
        }
        used
    }

    fn finish_running(&mut self) {
        if let Some(r) = self.running.take() {
            debug_assert!(r.job.is_done());
            self.bufs[r.buffer].clear();
            self.report.flush_total_steps = self.report.flush_total_steps.max(r.steps);
        }
    }

    fn drain(&mut self) -> u64 {
        let mut used = 0;
        if let Some(r) = self.running.as_mut() {
            let mut ops = OpCounts::default();
            while !r.job.step(&mut self.state, &mut ops) {}
            r.steps += ops.steps();
            used += ops.steps();
            self.finish_running();
        }
        used
    }

    /// Brings the sketch fully up to date, then evaluates `q` on it.
    pub fn buffered_query<R>(&mut self, q: impl FnOnce(&SketchState) -> R) -> R {
        let mut used = self.drain();
        if !self.bufs[self.active].is_empty() {
            let full = self.active;
            self.active = 1 - full;
            self.running = Some(Running {
                job: FlushJob::new(&self.state, &self.bufs[full]),
                buffer: full,
                steps: 0,
            });
            self.report.flushes += 1;
            used += self.drain();
        }
        self.report.max_query_steps = self.report.max_query_steps.max(used);
        q(&self.state)
    }

    pub fn counters_snapshot(&mut self) -> Counters {
        self.buffered_query(|s| s.counters_snapshot())
    }

    /// The sketch state without applying buffered updates.
    pub fn state_unflushed(&self) -> &SketchState {
        &self.state
    }
}
