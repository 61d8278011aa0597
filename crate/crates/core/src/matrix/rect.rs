//! Tile grids and the blocked, resumable product behind every `F_2` multiply.

use std::sync::Arc;

use super::kernel::BaseKernel;
use super::strassen::StrassenPlan;
use super::tile::{gather_tile, scatter_tile_xor, unmorton};
use super::BitMatrix;
use crate::cost::OpCounts;
use crate::error::{ensure_dim, Error, Result};

/// Chunk size, in tiles, for copies in and out of the Morton arena.
const COPY_CHUNK: usize = 64;

/// A bit matrix stored as a row-major grid of 8x8 tiles. Entries outside
/// `rows x cols` are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct TileGrid {
    rows: usize,
    cols: usize,
    tr: usize,
    tc: usize,
    tiles: Vec<u64>,
}

impl TileGrid {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let (tr, tc) = (rows.div_ceil(8), cols.div_ceil(8));
        TileGrid {
            rows,
            cols,
            tr,
            tc,
            tiles: vec![0; tr * tc],
        }
    }

    pub fn from_matrix(m: &BitMatrix, ops: &mut OpCounts) -> Self {
        let mut g = TileGrid::zeros(m.rows(), m.cols());
        for i in 0..g.tr {
            for j in 0..g.tc {
                g.tiles[i * g.tc + j] = gather_tile(m, 8 * i, 8 * j, ops);
            }
        }
        g
    }

    pub fn to_matrix(&self, ops: &mut OpCounts) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows, self.cols);
        for i in 0..self.tr {
            for j in 0..self.tc {
                scatter_tile_xor(&mut m, 8 * i, 8 * j, self.tiles[i * self.tc + j], ops);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn tile_rows(&self) -> usize {
        self.tr
    }

    pub fn tile_cols(&self) -> usize {
        self.tc
    }

    #[inline]
    pub fn tile(&self, i: usize, j: usize) -> u64 {
        if i < self.tr && j < self.tc {
            self.tiles[i * self.tc + j]
        } else {
            0
        }
    }

    #[inline]
    pub fn set_tile(&mut self, i: usize, j: usize, t: u64) {
        self.tiles[i * self.tc + j] = t;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    /// One output tile per chunk, straight from the grids.
    Direct {
        tile: usize,
    },
    ZeroC,
    Load {
        bj: usize,
        pos: usize,
    },
    Plan {
        bj: usize,
        ip: usize,
    },
    Store {
        pos: usize,
    },
    Done,
}

/// `A * B` over `F_2`, computed one bounded chunk per [`step`](Self::step).
///
/// The operands are cut into square blocks of `side` tiles. Each block
/// product runs the cached rank-7 plan, except when a block is no larger
/// than the leaf, in which case output tiles are formed directly.
#[derive(Debug)]
pub(crate) struct TiledProduct {
    side: usize,
    grid: (usize, usize, usize),
    block: (usize, usize),
    plan: Option<Arc<StrassenPlan>>,
    arena: Vec<u64>,
    phase: Phase,
    out: TileGrid,
}

impl TiledProduct {
    pub fn new(a: &TileGrid, b: &TileGrid, side: usize, leaf: usize) -> Result<Self> {
        ensure_dim("tiled product inner", a.cols, b.rows)?;
        if !side.is_power_of_two() || !leaf.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "block side {side} and leaf {leaf} must be powers of two"
            )));
        }
        let out = TileGrid::zeros(a.rows, b.cols);
        let grid = (
            a.tr.div_ceil(side),
            a.tc.div_ceil(side),
            b.tc.div_ceil(side),
        );
        let (plan, phase) = if side <= leaf {
            (None, Phase::Direct { tile: 0 })
        } else {
            (Some(StrassenPlan::cached(side, leaf)), Phase::ZeroC)
        };
        let arena = vec![0; plan.as_ref().map_or(0, |p| p.arena_len())];
        let mut job = TiledProduct {
            side,
            grid,
            block: (0, 0),
            plan,
            arena,
            phase,
            out,
        };
        if job.out.tiles.is_empty() {
            job.phase = Phase::Done;
        }
        Ok(job)
    }

    #[cfg(test)]
    pub fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }

    pub fn into_output(self) -> TileGrid {
        self.out
    }

    /// Runs one chunk; returns `true` once the product is complete.
    pub fn step(
        &mut self,
        a: &TileGrid,
        b: &TileGrid,
        kernel: &dyn BaseKernel,
        ops: &mut OpCounts,
    ) -> bool {
        let n = self.side;
        let n2 = n * n;
        match self.phase {
            Phase::Done => return true,
            Phase::Direct { tile } => {
                let (i, k) = (tile / self.out.tc, tile % self.out.tc);
                let mut acc = 0u64;
                for j in 0..a.tc {
                    acc ^= kernel.tile_mul(a.tile(i, j), b.tile(j, k), ops);
                }
                self.out.tiles[tile] = acc;
                ops.touch(2 * a.tc as u64 + 1);
                ops.alu(a.tc as u64);
                self.phase = if tile + 1 == self.out.tiles.len() {
                    Phase::Done
                } else {
                    Phase::Direct { tile: tile + 1 }
                };
            }
            Phase::ZeroC => {
                self.arena[2 * n2..3 * n2].fill(0);
                ops.touch(n2 as u64);
                self.phase = Phase::Load { bj: 0, pos: 0 };
            }
            Phase::Load { bj, pos } => {
                let (bi, bk) = self.block;
                let end = (pos + COPY_CHUNK).min(2 * n2);
                for p in pos..end {
                    let (tr, tc) = unmorton(p % n2);
                    self.arena[p] = if p < n2 {
                        a.tile(bi * n + tr, bj * n + tc)
                    } else {
                        b.tile(bj * n + tr, bk * n + tc)
                    };
                }
                ops.touch(2 * (end - pos) as u64);
                ops.alu((end - pos) as u64);
                self.phase = if end == 2 * n2 {
                    Phase::Plan { bj, ip: 0 }
                } else {
                    Phase::Load { bj, pos: end }
                };
            }
            Phase::Plan { bj, ip } => {
                let plan = self.plan.as_ref().expect("blocked phase has a plan");
                plan.exec(ip, &mut self.arena, kernel, ops);
                self.phase = if ip + 1 < plan.len() {
                    Phase::Plan { bj, ip: ip + 1 }
                } else if bj + 1 < self.grid.1 {
                    Phase::Load { bj: bj + 1, pos: 0 }
                } else {
                    Phase::Store { pos: 0 }
                };
            }
            Phase::Store { pos } => {
                let (bi, bk) = self.block;
                let end = (pos + COPY_CHUNK).min(n2);
                for z in pos..end {
                    let (tr, tc) = unmorton(z);
                    let (i, k) = (bi * n + tr, bk * n + tc);
                    if i < self.out.tr && k < self.out.tc {
                        self.out.tiles[i * self.out.tc + k] = self.arena[2 * n2 + z];
                    }
                }
                ops.touch(2 * (end - pos) as u64);
                ops.alu((end - pos) as u64);
                if end < n2 {
                    self.phase = Phase::Store { pos: end };
                } else if bk + 1 < self.grid.2 {
                    self.block = (bi, bk + 1);
                    self.phase = Phase::ZeroC;
                } else if bi + 1 < self.grid.0 {
                    self.block = (bi + 1, 0);
                    self.phase = Phase::ZeroC;
                } else {
                    self.phase = Phase::Done;
                }
            }
        }
        self.phase == Phase::Done
    }

    pub fn run(&mut self, a: &TileGrid, b: &TileGrid, kernel: &dyn BaseKernel, ops: &mut OpCounts) {
        while !self.step(a, b, kernel, ops) {}
    }
}

/// Block side, in tiles, used for an `m x r` by `r x n` product: the smallest
/// dimension rounded up to a power of two.
pub(crate) fn rect_side_tiles(m: usize, r: usize, n: usize) -> usize {
    m.min(r).min(n).max(1).div_ceil(8).next_power_of_two()
}

/// `A * B` over `F_2` with blocks sized by the smallest dimension, each block
/// product by the rank-7 recursion down to single tiles.
pub fn matmul_rect(a: &BitMatrix, b: &BitMatrix, kernel: &dyn BaseKernel) -> Result<BitMatrix> {
    matmul_rect_counted(a, b, kernel, 1, &mut OpCounts::default())
}

pub fn matmul_rect_counted(
    a: &BitMatrix,
    b: &BitMatrix,
    kernel: &dyn BaseKernel,
    leaf_tiles: usize,
    ops: &mut OpCounts,
) -> Result<BitMatrix> {
    ensure_dim("matmul_rect inner", a.cols(), b.rows())?;
    let side = rect_side_tiles(a.rows(), a.cols(), b.cols());
    let ga = TileGrid::from_matrix(a, ops);
    let gb = TileGrid::from_matrix(b, ops);
    let mut job = TiledProduct::new(&ga, &gb, side, leaf_tiles.max(1))?;
    job.run(&ga, &gb, kernel, ops);
    Ok(job.into_output().to_matrix(ops))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::kernel::KernelKind;
    use crate::matrix::{matmul_recursive, matmul_schoolbook};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let m = BitMatrix::random(19, 70, &mut rng);
        let g = TileGrid::from_matrix(&m, &mut OpCounts::default());
        assert_eq!((g.tile_rows(), g.tile_cols()), (3, 9));
        assert_eq!(g.to_matrix(&mut OpCounts::default()), m);
    }

    #[test]
    fn wide_thin_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        for kind in KernelKind::ALL {
            let k = kind.build();
            for &(m, r, n) in &[
                (64, 8, 64),
                (64, 64, 64),
                (40, 3, 17),
                (8, 200, 8),
                (130, 64, 66),
            ] {
                let a = BitMatrix::random(m, r, &mut rng);
                let b = BitMatrix::random(r, n, &mut rng);
                assert_eq!(
                    matmul_rect(&a, &b, k.as_ref()).unwrap(),
                    matmul_schoolbook(&a, &b).unwrap()
                );
            }
        }
    }

    #[test]
    fn single_block_matches_recursive() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let k = KernelKind::WordMm.build();
        let a = BitMatrix::random(64, 64, &mut rng);
        let b = BitMatrix::random(64, 64, &mut rng);
        let mut o1 = OpCounts::ZERO;
        let mut o2 = OpCounts::ZERO;
        let r = matmul_rect_counted(&a, &b, k.as_ref(), 1, &mut o1).unwrap();
        let s = crate::matrix::matmul_recursive_counted(&a, &b, k.as_ref(), 1, &mut o2).unwrap();
        assert_eq!(r, s);
        assert_eq!(o1, o2);
        assert_eq!(r, matmul_recursive(&a, &b, k.as_ref()).unwrap());
    }

    #[test]
    fn zero_and_empty() {
        let k = KernelKind::Packed.build();
        let mut rng = ChaCha8Rng::seed_from_u64(74);
        let b = BitMatrix::random(24, 40, &mut rng);
        assert!(matmul_rect(&BitMatrix::zeros(16, 24), &b, k.as_ref())
            .unwrap()
            .is_zero());
        let e = matmul_rect(&BitMatrix::zeros(0, 24), &b, k.as_ref()).unwrap();
        assert_eq!((e.rows(), e.cols()), (0, 40));
    }

    #[test]
    fn resumable_steps_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(75);
        let k = KernelKind::WordMm.build();
        let a = BitMatrix::random(96, 64, &mut rng);
        let b = BitMatrix::random(64, 128, &mut rng);
        let ga = TileGrid::from_matrix(&a, &mut OpCounts::default());
        let gb = TileGrid::from_matrix(&b, &mut OpCounts::default());
        let mut job = TiledProduct::new(&ga, &gb, 8, 1).unwrap();
        let mut steps = 0;
        let mut worst = 0;
        while !job.is_done() {
            let mut ops = OpCounts::ZERO;
            job.step(&ga, &gb, k.as_ref(), &mut ops);
            worst = worst.max(ops.steps());
            steps += 1;
        }
        assert!(steps > 100);
        assert!(worst < 1000, "chunk of {worst} steps");
        let c = job.into_output().to_matrix(&mut OpCounts::default());
        assert_eq!(c, matmul_schoolbook(&a, &b).unwrap());
    }
}
