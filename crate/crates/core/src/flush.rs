//! One batch applied to a sketch as a sequence of bounded chunks.
//!
//! Phases: encode keys, lay out `X`, hash product `H = S X`, indicator tiles,
//! the integer product against the deltas, and the counter add. Every chunk's
//! cost depends only on the batch length and the configuration, never on the
//! keys or deltas.

use crate::bits::BitVector;
use crate::cost::OpCounts;
use crate::hash::encode_point_counted;
use crate::matrix::tile::transpose8;
use crate::matrix::{rect_side_tiles, TileGrid, TiledProduct, ZProduct};
use crate::sketch::{SketchState, UpdateRecord};

/// Counters added per commit chunk.
const COMMIT_CHUNK: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Encode { i: usize },
    LayoutX { tile: usize },
    Hash,
    Indicate { tile: usize },
    Product,
    Commit { pos: usize },
    Done,
}

#[derive(Debug)]
pub(crate) struct FlushJob {
    keys: Vec<u64>,
    deltas: Vec<u64>,
    phase: Phase,
    encoded: Vec<BitVector>,
    x: TileGrid,
    hash: Option<TiledProduct>,
    h: Option<TileGrid>,
    ind: TileGrid,
    z: Option<ZProduct>,
    out: Vec<u64>,
    padded_rows: usize,
}

impl FlushJob {
    pub fn new(state: &SketchState, batch: &[UpdateRecord]) -> Self {
        let cfg = &state.config;
        let n = batch.len();
        let padded_rows = cfg.t.next_multiple_of(8);
        let seed_bits = state.seeds.spec().seed_bits();
        FlushJob {
            keys: batch.iter().map(|r| r.u).collect(),
            deltas: batch.iter().map(|r| r.delta as u64).collect(),
            phase: if n == 0 {
                Phase::Done
            } else {
                Phase::Encode { i: 0 }
            },
            encoded: Vec::with_capacity(n),
            x: TileGrid::zeros(seed_bits, n),
            hash: None,
            h: None,
            ind: TileGrid::zeros(cfg.k * padded_rows, n),
            z: None,
            out: Vec::new(),
            padded_rows,
        }
    }

    pub fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }

    /// Runs one chunk; returns `true` once the counters hold the batch.
    pub fn step(&mut self, state: &mut SketchState, ops: &mut OpCounts) -> bool {
        let kernel = state.kernel.clone();
        let kernel = kernel.as_ref();
        match self.phase {
            Phase::Done => return true,
            Phase::Encode { i } => {
                let g = encode_point_counted(self.keys[i], state.seeds.spec(), ops);
                self.encoded.push(g);
                self.phase = if i + 1 < self.keys.len() {
                    Phase::Encode { i: i + 1 }
                } else {
                    Phase::LayoutX { tile: 0 }
                };
            }
            Phase::LayoutX { tile } => {
                // tile (p, q): row r is bit 8p + r of g(u) for keys 8q..8q+8
                let (p, q) = (tile / self.x.tile_cols(), tile % self.x.tile_cols());
                let mut by_key = 0u64;
                for c in 0..8 {
                    if let Some(g) = self.encoded.get(8 * q + c) {
                        let byte = (g.words()[p / 8] >> (8 * (p % 8))) & 0xFF;
                        by_key |= byte << (8 * c);
                    }
                }
                ops.touch(9);
                ops.alu(3 * 8);
                self.x.set_tile(p, q, transpose8(by_key, ops));
                self.phase = if tile + 1 < self.x.tile_rows() * self.x.tile_cols() {
                    Phase::LayoutX { tile: tile + 1 }
                } else {
                    let s = &state.seed_grid;
                    let side = rect_side_tiles(s.rows(), s.cols(), self.x.cols());
                    self.hash = Some(
                        TiledProduct::new(s, &self.x, side, state.config.leaf_tiles)
                            .expect("seed and key dimensions agree"),
                    );
                    Phase::Hash
                };
            }
            Phase::Hash => {
                let job = self.hash.as_mut().expect("hash phase has a product");
                if job.step(&state.seed_grid, &self.x, kernel, ops) {
                    self.h = self.hash.take().map(|j| j.into_output());
                    self.phase = Phase::Indicate { tile: 0 };
                }
            }
            Phase::Indicate { tile } => {
                let cols = self.ind.tile_cols();
                let (row_tile, q) = (tile / cols, tile % cols);
                let per_bucket = self.padded_rows / 8;
                let (b, jt) = (row_tile / per_bucket, row_tile % per_bucket);
                let h = self.h.as_ref().expect("hash output present");
                let log_k = state.seeds.spec().log_k();
                let mut acc = u64::MAX;
                for t in 0..log_k {
                    let bits = h.tile(t * per_bucket + jt, q);
                    acc &= if (b >> t) & 1 == 1 { bits } else { !bits };
                }
                ops.touch(log_k as u64 + 1);
                ops.alu(2 * log_k as u64);
                self.ind.set_tile(row_tile, q, acc);
                self.phase = if tile + 1 < self.ind.tile_rows() * cols {
                    Phase::Indicate { tile: tile + 1 }
                } else {
                    self.z = Some(
                        ZProduct::new(&self.ind, std::mem::take(&mut self.deltas), state.config.w)
                            .expect("one delta per key"),
                    );
                    Phase::Product
                };
            }
            Phase::Product => {
                let z = self.z.as_mut().expect("product phase has a job");
                if z.step(&self.ind, kernel, ops) {
                    self.out = self.z.take().map(|z| z.into_output()).unwrap_or_default();
                    self.phase = Phase::Commit { pos: 0 };
                }
            }
            Phase::Commit { pos } => {
                // out is bucket-major over padded rows; counters are row-major
                let (k, t) = (state.config.k, state.config.t);
                let end = (pos + COMMIT_CHUNK).min(k * t);
                let mask = crate::gf2::word_mask(state.config.w);
                for i in pos..end {
                    let src = state.layout.source(i);
                    let (b, j) = (src / t, src % t);
                    let v = self.out[b * self.padded_rows + j];
                    let c = &mut state.counters[i];
                    *c = c.wrapping_add(v) & mask;
                }
                ops.touch(3 * (end - pos) as u64);
                ops.alu(3 * (end - pos) as u64);
                self.phase = if end < k * t {
                    Phase::Commit { pos: end }
                } else {
                    Phase::Done
                };
            }
        }
        self.phase == Phase::Done
    }
}
