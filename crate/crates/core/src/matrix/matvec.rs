//! Binary matrix times a vector of `W`-bit integers.
//!
//! The vector is expanded into the bit matrix `Vb` (`Vb[j][t]` = bit `t` of
//! `v[j]`), the integer product `C = A * Vb` is formed tile by tile with the
//! base kernel, and each output is recombined as `sum_t 2^t C[i][t]` modulo
//! `2^W`. Column tile `s` of `Vb` is simply byte `s` of eight consecutive
//! entries, so the expansion needs no transposition.

use super::kernel::BaseKernel;
use super::rect::TileGrid;
use super::{BitMatrix, IntVector};
use crate::cost::OpCounts;
use crate::error::{ensure_dim, Result};
use crate::gf2::word_mask;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Expand { kb: usize },
    Product { idx: usize },
    Done,
}

/// A resumable `A * v`; each [`step`](Self::step) is one key block of the
/// expansion or one `(row tile, byte column)` pair of the product.
#[derive(Debug)]
pub(crate) struct ZProduct {
    width: u32,
    row_tiles: usize,
    key_tiles: usize,
    byte_cols: usize,
    v: Vec<u64>,
    vb: Vec<u64>,
    out: Vec<u64>,
    phase: Phase,
}

impl ZProduct {
    pub fn new(a: &TileGrid, v: Vec<u64>, width: u32) -> Result<Self> {
        ensure_dim("matvec vector length", a.cols(), v.len())?;
        let key_tiles = a.tile_cols();
        let byte_cols = (width as usize).div_ceil(8);
        let phase = if a.rows() == 0 {
            Phase::Done
        } else if key_tiles == 0 {
            Phase::Product { idx: 0 }
        } else {
            Phase::Expand { kb: 0 }
        };
        Ok(ZProduct {
            width,
            row_tiles: a.tile_rows(),
            key_tiles,
            byte_cols,
            v,
            vb: vec![0; key_tiles * byte_cols],
            out: vec![0; a.rows()],
            phase,
        })
    }

    pub fn into_output(self) -> Vec<u64> {
        self.out
    }

    pub fn step(&mut self, a: &TileGrid, kernel: &dyn BaseKernel, ops: &mut OpCounts) -> bool {
        match self.phase {
            Phase::Done => return true,
            Phase::Expand { kb } => {
                let lo = 8 * kb;
                let hi = (lo + 8).min(self.v.len());
                for s in 0..self.byte_cols {
                    let mut tile = 0u64;
                    for (r, &x) in self.v[lo..hi].iter().enumerate() {
                        tile |= ((x >> (8 * s)) & 0xFF) << (8 * r);
                    }
                    self.vb[kb * self.byte_cols + s] = tile;
                }
                let bc = self.byte_cols as u64;
                ops.touch(8 + bc);
                ops.alu(3 * 8 * bc);
                self.phase = if kb + 1 < self.key_tiles {
                    Phase::Expand { kb: kb + 1 }
                } else {
                    Phase::Product { idx: 0 }
                };
            }
            Phase::Product { idx } => {
                let (it, s) = (idx / self.byte_cols, idx % self.byte_cols);
                let mut acc = [0u32; 64];
                for kb in 0..self.key_tiles {
                    kernel.tile_mul_z(
                        a.tile(it, kb),
                        self.vb[kb * self.byte_cols + s],
                        &mut acc,
                        ops,
                    );
                }
                ops.touch(2 * self.key_tiles as u64);
                let rows = (self.out.len() - 8 * it).min(8);
                for r in 0..rows {
                    let mut sum = 0u64;
                    for c in 0..8 {
                        let t = 8 * s + c;
                        if t < 64 {
                            sum = sum.wrapping_add((acc[8 * r + c] as u64) << t);
                        }
                    }
                    let o = &mut self.out[8 * it + r];
                    *o = o.wrapping_add(sum) & word_mask(self.width);
                }
                ops.alu(2 * 8 * rows as u64 + rows as u64);
                ops.touch(2 * rows as u64);
                self.phase = if idx + 1 < self.row_tiles * self.byte_cols {
                    Phase::Product { idx: idx + 1 }
                } else {
                    Phase::Done
                };
            }
        }
        self.phase == Phase::Done
    }
}

/// `A * v` over the integers modulo `2^W`.
pub fn matvec_wide(a: &BitMatrix, v: &IntVector, kernel: &dyn BaseKernel) -> Result<IntVector> {
    matvec_wide_counted(a, v, kernel, &mut OpCounts::default())
}

pub fn matvec_wide_counted(
    a: &BitMatrix,
    v: &IntVector,
    kernel: &dyn BaseKernel,
    ops: &mut OpCounts,
) -> Result<IntVector> {
    ensure_dim("matvec vector length", a.cols(), v.len())?;
    let grid = TileGrid::from_matrix(a, ops);
    let mut job = ZProduct::new(&grid, v.entries().to_vec(), v.width())?;
    while !job.step(&grid, kernel, ops) {}
    IntVector::new(v.width(), job.into_output())
}
