//! 8x8 bit tiles and Morton-ordered square blocks.

use super::BitMatrix;
use crate::cost::OpCounts;

/// Transpose of an 8x8 tile (entry `(r, c)` at bit `8r + c`).
#[inline]
pub(crate) fn transpose8(mut x: u64, ops: &mut OpCounts) -> u64 {
    let t = (x ^ (x >> 7)) & 0x00AA_00AA_00AA_00AA;
    x ^= t ^ (t << 7);
    let t = (x ^ (x >> 14)) & 0x0000_CCCC_0000_CCCC;
    x ^= t ^ (t << 14);
    let t = (x ^ (x >> 28)) & 0x0000_0000_F0F0_F0F0;
    x ^= t ^ (t << 28);
    ops.alu(18);
    x
}

/// Morton index of tile `(tr, tc)`: row bits above column bits at each level,
/// so quadrants come in the order top-left, top-right, bottom-left,
/// bottom-right.
#[inline]
pub(crate) fn morton(tr: usize, tc: usize) -> usize {
    let mut z = 0;
    let mut b = 0;
    while (tr >> b) != 0 || (tc >> b) != 0 {
        z |= ((tr >> b) & 1) << (2 * b + 1);
        z |= ((tc >> b) & 1) << (2 * b);
        b += 1;
    }
    z
}

#[inline]
pub(crate) fn unmorton(z: usize) -> (usize, usize) {
    let (mut tr, mut tc) = (0, 0);
    let mut b = 0;
    while (z >> (2 * b)) != 0 {
        tr |= ((z >> (2 * b + 1)) & 1) << b;
        tc |= ((z >> (2 * b)) & 1) << b;
        b += 1;
    }
    (tr, tc)
}

/// Reads the 8x8 tile whose top-left corner is `(row0, col0)`; entries
/// outside the matrix read as zero. `col0` must be a multiple of 8.
#[inline]
pub(crate) fn gather_tile(m: &BitMatrix, row0: usize, col0: usize, ops: &mut OpCounts) -> u64 {
    debug_assert_eq!(col0 % 8, 0);
    let mut tile = 0u64;
    if col0 < m.cols() {
        let (w, sh) = (col0 / 64, col0 % 64);
        for r in 0..8 {
            let row = row0 + r;
            if row < m.rows() {
                let byte = (m.row(row)[w] >> sh) & 0xFF;
                tile |= byte << (8 * r);
            }
        }
    }
    ops.touch(9);
    ops.alu(24);
    tile
}

/// XORs a tile into the matrix at `(row0, col0)`, dropping entries that fall
/// outside it.
#[inline]
pub(crate) fn scatter_tile_xor(
    m: &mut BitMatrix,
    row0: usize,
    col0: usize,
    tile: u64,
    ops: &mut OpCounts,
) {
    debug_assert_eq!(col0 % 8, 0);
    ops.touch(17);
    ops.alu(32);
    if tile == 0 || col0 >= m.cols() {
        return;
    }
    let keep = m.cols() - col0;
    let col_mask = if keep >= 8 { 0xFF } else { (1u64 << keep) - 1 };
    let (w, sh) = (col0 / 64, col0 % 64);
    for r in 0..8 {
        let row = row0 + r;
        if row >= m.rows() {
            break;
        }
        let byte = (tile >> (8 * r)) & col_mask;
        m.row_mut(row)[w] ^= byte << sh;
    }
}
