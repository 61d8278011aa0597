//! `lin-skt(k, c, T)`: `T` rows of `k` bucket sums, each row partitioning keys
//! with its own `c`-wise independent bucket hash.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bits::Permutation;
use crate::cost::OpCounts;
use crate::error::{Error, Result};
use crate::flush::FlushJob;
use crate::gf2::{word_mask, FieldSpec};
use crate::hash::{encode_point_counted, BucketSeedSet, HashFamilySpec, MAX_BUCKETS};
use crate::matrix::{sign_extend, BaseKernel, KernelKind, TileGrid};

/// Default cap on the number of rows `T`.
pub const MAX_ROWS: usize = 512;

/// Default leaf size, in tiles per side, of the product recursion inside a
/// flush. Blocks up to this size are multiplied tile by tile, which is
/// cheaper in counted steps than recursing at desk-scale dimensions.
pub const DEFAULT_LEAF_TILES: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SketchConfig {
    /// Buckets per row, a power of two.
    pub k: usize,
    /// Independence of the bucket hashes.
    pub c: usize,
    /// Rows.
    #[serde(rename = "T")]
    pub t: usize,
    /// Word size; counters are kept modulo `2^W`.
    #[serde(rename = "W")]
    pub w: u32,
    /// Batch and buffer size.
    #[serde(rename = "B")]
    pub b: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub kernel: KernelKind,
    #[serde(default = "default_leaf")]
    pub leaf_tiles: usize,
}

fn default_leaf() -> usize {
    DEFAULT_LEAF_TILES
}

impl SketchConfig {
    /// `W = 64`, the default kernel and leaf.
    pub fn new(k: usize, c: usize, t: usize, b: usize, master_seed: u64) -> Self {
        SketchConfig {
            k,
            c,
            t,
            w: 64,
            b,
            master_seed,
            kernel: KernelKind::default(),
            leaf_tiles: DEFAULT_LEAF_TILES,
        }
    }

    pub fn with_kernel(mut self, kernel: KernelKind) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn with_leaf_tiles(mut self, leaf_tiles: usize) -> Self {
        self.leaf_tiles = leaf_tiles;
        self
    }

    pub fn with_width(mut self, w: u32) -> Self {
        self.w = w;
        self
    }

    /// Buffer size `round(W^theta)`, clamped to `[1, T W]`.
    pub fn buffer_for_theta(w: u32, t: usize, theta: f64) -> usize {
        let b = (w as f64).powf(theta).round() as usize;
        b.clamp(1, t * w as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.k.is_power_of_two() || self.k > MAX_BUCKETS {
            return Err(Error::InvalidConfig(format!(
                "k = {} must be a power of two at most {MAX_BUCKETS}",
                self.k
            )));
        }
        if self.t == 0 || self.t > MAX_ROWS {
            return Err(Error::InvalidConfig(format!(
                "T = {} not in 1..={MAX_ROWS}",
                self.t
            )));
        }
        if self.b == 0 || self.b > self.t * self.w as usize {
            return Err(Error::InvalidConfig(format!(
                "B = {} not in 1..={}",
                self.b,
                self.t * self.w as usize
            )));
        }
        if !self.leaf_tiles.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "leaf size {} must be a power of two",
                self.leaf_tiles
            )));
        }
        self.hash_spec().map(|_| ())
    }

    pub fn field(&self) -> Result<FieldSpec> {
        FieldSpec::standard(self.w)
    }

    pub fn hash_spec(&self) -> Result<HashFamilySpec> {
        HashFamilySpec::new(self.c, self.k, self.field()?)
    }
}

/// A stream update `(u, delta)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UpdateRecord {
    pub u: u64,
    pub delta: i64,
}

impl UpdateRecord {
    pub fn new(u: u64, delta: i64) -> Self {
        UpdateRecord { u, delta }
    }
}

/// An immutable copy of the `T x k` counters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Counters {
    rows: usize,
    k: usize,
    width: u32,
    data: Vec<u64>,
}

impl Counters {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Counter `(row, bucket)` as a signed `W`-bit value.
    pub fn get(&self, row: usize, bucket: usize) -> i64 {
        sign_extend(self.data[row * self.k + bucket], self.width)
    }

    /// Raw words, row-major.
    pub fn raw(&self) -> &[u64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&c| c == 0)
    }
}

/// Counters, seeds and the precomputed pieces of the batch path.
#[derive(Clone, Debug)]
pub struct SketchState {
    pub(crate) config: SketchConfig,
    pub(crate) seeds: BucketSeedSet,
    pub(crate) counters: Vec<u64>,
    pub(crate) kernel: Arc<dyn BaseKernel>,
    pub(crate) seed_grid: Arc<TileGrid>,
    pub(crate) layout: Arc<Permutation>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    config: SketchConfig,
}

const FORMAT: &str = "wordsketch-state-v1";

impl SketchState {
    pub fn new(config: SketchConfig) -> Result<Self> {
        config.validate()?;
        let seeds = BucketSeedSet::generate(config.hash_spec()?, config.t, config.master_seed);
        let seed_grid = Arc::new(seeds.seed_grid());
        Ok(SketchState {
            counters: vec![0; config.t * config.k],
            kernel: config.kernel.build(),
            layout: Arc::new(Permutation::bucket_major_to_row_major(config.k, config.t)),
            seed_grid,
            seeds,
            config,
        })
    }

    pub fn config(&self) -> &SketchConfig {
        &self.config
    }

    pub fn seeds(&self) -> &BucketSeedSet {
        &self.seeds
    }

    pub fn kernel(&self) -> &dyn BaseKernel {
        self.kernel.as_ref()
    }

    pub fn bucket_of(&self, u: u64, row: usize) -> usize {
        self.seeds.bucket_of(u, row)
    }

    /// Counter `(row, bucket)` as a signed `W`-bit value.
    pub fn counter(&self, row: usize, bucket: usize) -> i64 {
        sign_extend(self.counters[row * self.config.k + bucket], self.config.w)
    }

    pub fn counters_snapshot(&self) -> Counters {
        Counters {
            rows: self.config.t,
            k: self.config.k,
            width: self.config.w,
            data: self.counters.clone(),
        }
    }

    /// Adds `delta` to bucket `bucket_of(u, j)` of every row `j`.
    pub fn naive_update(&mut self, upd: UpdateRecord) {
        self.naive_update_counted(upd, &mut OpCounts::default());
    }

    pub fn naive_update_counted(&mut self, upd: UpdateRecord, ops: &mut OpCounts) {
        let spec = self.seeds.spec();
        let g = encode_point_counted(upd.u, spec, ops);
        let mask = word_mask(self.config.w);
        let d = upd.delta as u64;
        let k = self.config.k;
        for j in 0..self.config.t {
            let b = self.seeds.bucket_of_encoded(&g, j, ops);
            let c = &mut self.counters[j * k + b];
            *c = c.wrapping_add(d) & mask;
        }
        ops.touch(2 * self.config.t as u64);
        ops.alu(2 * self.config.t as u64);
    }

    /// Applies up to `B` updates through the batched matrix pipeline.
    pub fn batch_update(&mut self, batch: &[UpdateRecord]) -> Result<()> {
        self.batch_update_counted(batch, &mut OpCounts::default())
    }

    pub fn batch_update_counted(
        &mut self,
        batch: &[UpdateRecord],
        ops: &mut OpCounts,
    ) -> Result<()> {
        if batch.len() > self.config.b {
            return Err(Error::BatchTooLarge {
                len: batch.len(),
                cap: self.config.b,
            });
        }
        let mut job = FlushJob::new(self, batch);
        while !job.step(self, ops) {}
        Ok(())
    }

    /// JSON header line followed by the counters as little-endian words.
    pub fn to_bytes(&self) -> Vec<u8> {
        let header = Header {
            format: FORMAT.into(),
            config: self.config.clone(),
        };
        let mut out = serde_json::to_vec(&header).expect("header serializes");
        out.push(b'\n');
        for c in &self.counters {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let nl = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| Error::Parse("missing state header".into()))?;
        let header: Header =
            serde_json::from_slice(&bytes[..nl]).map_err(|e| Error::Parse(e.to_string()))?;
        if header.format != FORMAT {
            return Err(Error::Parse(format!(
                "unknown state format {:?}",
                header.format
            )));
        }
        let mut state = SketchState::new(header.config)?;
        let body = &bytes[nl + 1..];
        if body.len() != 8 * state.counters.len() {
            return Err(Error::Parse(format!(
                "counter dump has {} bytes, expected {}",
                body.len(),
                8 * state.counters.len()
            )));
        }
        let mask = word_mask(state.config.w);
        for (c, chunk) in state.counters.iter_mut().zip(body.chunks_exact(8)) {
            let v = u64::from_le_bytes(chunk.try_into().expect("8 bytes"));
            if v & !mask != 0 {
                return Err(Error::Parse(format!("counter {v:#x} exceeds W bits")));
            }
            *c = v;
        }
        Ok(state)
    }
}
