//! Strassen's rank-7 recursion over `F_2`, compiled to a flat instruction list.
//!
//! Operands live in one arena of Morton-ordered tiles: `A` at `0`, `B` at
//! `n^2`, `C` at `2 n^2` and scratch after that, where `n` is the block side
//! in tiles. Running the plan XORs `A * B` into `C`. Because the plan is a
//! plain list, a caller can stop after any instruction and resume later.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::kernel::BaseKernel;
use super::rect::{TileGrid, TiledProduct};
use super::BitMatrix;
use crate::cost::OpCounts;
use crate::error::{ensure_dim, Result};

/// Longest XOR run emitted as one instruction.
const MAX_RUN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Instr {
    /// `dst = a ^ b` over `len` tiles.
    Add {
        dst: usize,
        a: usize,
        b: usize,
        len: usize,
    },
    /// `dst ^= src` over `len` tiles.
    Acc {
        dst: usize,
        src: usize,
        len: usize,
    },
    Zero {
        dst: usize,
        len: usize,
    },
    /// `dst ^= a * b` by tile schoolbook on `side x side` Morton blocks.
    Leaf {
        dst: usize,
        a: usize,
        b: usize,
        side: usize,
    },
}

/// The compiled recursion for one block side.
#[derive(Debug)]
pub struct StrassenPlan {
    side_tiles: usize,
    leaf_tiles: usize,
    arena_len: usize,
    instrs: Vec<Instr>,
}

// per-product operand quadrants (11, 12, 21, 22 = 0..4) and target C quadrants
const PRODUCTS: [(&[usize], &[usize], &[usize]); 7] = [
    (&[0, 3], &[0, 3], &[0, 3]),
    (&[2, 3], &[0], &[2, 3]),
    (&[0], &[1, 3], &[1, 3]),
    (&[3], &[2, 0], &[0, 2]),
    (&[0, 1], &[3], &[0, 1]),
    (&[2, 0], &[0, 1], &[3]),
    (&[1, 3], &[2, 3], &[0]),
];

type PlanCache = HashMap<(usize, usize), Arc<StrassenPlan>>;

impl StrassenPlan {
    /// Plan for a block of `side_tiles` tiles per side; both sides must be
    /// powers of two. Blocks of at most `leaf_tiles` are multiplied directly.
    pub fn new(side_tiles: usize, leaf_tiles: usize) -> Self {
        assert!(side_tiles.is_power_of_two() && leaf_tiles.is_power_of_two());
        let n2 = side_tiles * side_tiles;
        let mut b = Builder {
            instrs: Vec::new(),
            high_water: 3 * n2,
            leaf: leaf_tiles,
        };
        b.gen(0, n2, 2 * n2, side_tiles, 3 * n2);
        StrassenPlan {
            side_tiles,
            leaf_tiles,
            arena_len: b.high_water,
            instrs: b.instrs,
        }
    }

    /// Shared plan from a process-wide cache.
    pub fn cached(side_tiles: usize, leaf_tiles: usize) -> Arc<StrassenPlan> {
        static CACHE: OnceLock<Mutex<PlanCache>> = OnceLock::new();
        let leaf_tiles = leaf_tiles.min(side_tiles);
        let mut map = CACHE
            .get_or_init(Default::default)
            .lock()
            .unwrap_or_else(|e| e.into_inner());
        map.entry((side_tiles, leaf_tiles))
            .or_insert_with(|| Arc::new(StrassenPlan::new(side_tiles, leaf_tiles)))
            .clone()
    }

    pub fn side_tiles(&self) -> usize {
        self.side_tiles
    }

    pub fn leaf_tiles(&self) -> usize {
        self.leaf_tiles
    }

    pub fn arena_len(&self) -> usize {
        self.arena_len
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    /// Number of leaf multiplications.
    pub fn leaf_count(&self) -> usize {
        self.instrs
            .iter()
            .filter(|i| matches!(i, Instr::Leaf { .. }))
            .count()
    }

    /// Runs instruction `ip` against `arena`.
    #[inline]
    pub(crate) fn exec(
        &self,
        ip: usize,
        arena: &mut [u64],
        kernel: &dyn BaseKernel,
        ops: &mut OpCounts,
    ) {
        match self.instrs[ip] {
            Instr::Add { dst, a, b, len } => {
                for i in 0..len {
                    arena[dst + i] = arena[a + i] ^ arena[b + i];
                }
                ops.alu(len as u64);
                ops.touch(3 * len as u64);
            }
            Instr::Acc { dst, src, len } => {
                for i in 0..len {
                    arena[dst + i] ^= arena[src + i];
                }
                ops.alu(len as u64);
                ops.touch(3 * len as u64);
            }
            Instr::Zero { dst, len } => {
                arena[dst..dst + len].fill(0);
                ops.touch(len as u64);
            }
            Instr::Leaf { dst, a, b, side } => leaf_mul(arena, dst, a, b, side, kernel, ops),
        }
    }
}

fn leaf_mul(
    arena: &mut [u64],
    dst: usize,
    a: usize,
    b: usize,
    side: usize,
    kernel: &dyn BaseKernel,
    ops: &mut OpCounts,
) {
    use super::tile::morton;
    for r in 0..side {
        for c in 0..side {
            let mut acc = 0u64;
            for t in 0..side {
                acc ^= kernel.tile_mul(arena[a + morton(r, t)], arena[b + morton(t, c)], ops);
            }
            arena[dst + morton(r, c)] ^= acc;
        }
    }
    let cube = (side * side * side) as u64;
    let sq = (side * side) as u64;
    ops.touch(2 * cube + 2 * sq);
    ops.alu(cube + sq);
}

struct Builder {
    instrs: Vec<Instr>,
    high_water: usize,
    leaf: usize,
}

impl Builder {
    fn add(&mut self, dst: usize, a: usize, b: usize, len: usize) {
        for s in (0..len).step_by(MAX_RUN) {
            let l = MAX_RUN.min(len - s);
            self.instrs.push(Instr::Add {
                dst: dst + s,
                a: a + s,
                b: b + s,
                len: l,
            });
        }
    }

    fn acc(&mut self, dst: usize, src: usize, len: usize) {
        for s in (0..len).step_by(MAX_RUN) {
            let l = MAX_RUN.min(len - s);
            self.instrs.push(Instr::Acc {
                dst: dst + s,
                src: src + s,
                len: l,
            });
        }
    }

    fn zero(&mut self, dst: usize, len: usize) {
        for s in (0..len).step_by(MAX_RUN) {
            self.instrs.push(Instr::Zero {
                dst: dst + s,
                len: MAX_RUN.min(len - s),
            });
        }
    }

    /// Emits `C ^= A * B` for blocks of side `n` tiles with scratch from `tmp`.
    fn gen(&mut self, a: usize, b: usize, c: usize, n: usize, tmp: usize) {
        if n <= self.leaf {
            self.instrs.push(Instr::Leaf {
                dst: c,
                a,
                b,
                side: n,
            });
            return;
        }
        let q = n * n / 4;
        for (qa, qb, qc) in PRODUCTS {
            let mut next = tmp;
            let mut operand = |base: usize, quads: &[usize], this: &mut Builder| -> usize {
                if let [only] = quads {
                    base + only * q
                } else {
                    let at = next;
                    next += q;
                    this.add(at, base + quads[0] * q, base + quads[1] * q, q);
                    at
                }
            };
            let ta = operand(a, qa, self);
            let tb = operand(b, qb, self);
            if let [only] = qc {
                self.high_water = self.high_water.max(next);
                self.gen(ta, tb, c + only * q, n / 2, next);
            } else {
                let m = next;
                next += q;
                self.high_water = self.high_water.max(next);
                self.zero(m, q);
                self.gen(ta, tb, m, n / 2, next);
                for &t in qc {
                    self.acc(c + t * q, m, q);
                }
            }
        }
    }
}

/// Tiles per side of the square block a product of these dimensions is
/// padded to: the next power of two, at least one tile.
pub(crate) fn padded_side_tiles(dims: &[usize]) -> usize {
    let max = dims.iter().copied().max().unwrap_or(0).max(1);
    max.div_ceil(8).next_power_of_two()
}

/// `A * B` over `F_2` by the padded rank-7 recursion down to single tiles.
pub fn matmul_recursive(
    a: &BitMatrix,
    b: &BitMatrix,
    kernel: &dyn BaseKernel,
) -> Result<BitMatrix> {
    matmul_recursive_counted(a, b, kernel, 1, &mut OpCounts::default())
}

/// As [`matmul_recursive`], stopping the recursion at blocks of
/// `leaf_tiles` tiles per side, which are multiplied tile by tile.
pub fn matmul_recursive_counted(
    a: &BitMatrix,
    b: &BitMatrix,
    kernel: &dyn BaseKernel,
    leaf_tiles: usize,
    ops: &mut OpCounts,
) -> Result<BitMatrix> {
    ensure_dim("matmul_recursive inner", a.cols(), b.rows())?;
    let side = padded_side_tiles(&[a.rows(), a.cols(), b.cols()]);
    let ga = TileGrid::from_matrix(a, ops);
    let gb = TileGrid::from_matrix(b, ops);
    let mut job = TiledProduct::new(&ga, &gb, side, leaf_tiles.max(1))?;
    while !job.step(&ga, &gb, kernel, ops) {}
    Ok(job.into_output().to_matrix(ops))
}
