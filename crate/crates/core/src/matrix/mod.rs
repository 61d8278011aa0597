//! Bit-packed matrices over `F_2` and the word-level multiplication kernels.
//!
//! A [`BitMatrix`] is row-major with a stride of `ceil(cols / 64)` words per
//! row. The fast products work on 8x8 tiles (one `u64` per tile, entry
//! `(r, c)` at bit `8r + c`) laid out in Morton order so that every quadrant
//! of a square block is a contiguous run of words.

mod kernel;
mod matvec;
mod packed;
mod rect;
mod strassen;
pub(crate) mod tile;

use rand::Rng;

use crate::cost::OpCounts;
use crate::error::{ensure_dim, Error, Result};
use crate::gf2::word_mask;

pub use kernel::{BaseKernel, KernelKind, PackedKernel, WordMmKernel};
pub(crate) use matvec::ZProduct;
pub use matvec::{matvec_wide, matvec_wide_counted};
pub use packed::{min_slot_bits, packed_inner_block, packed_inner_block_counted, PackedKernelSpec};
pub use rect::{matmul_rect, matmul_rect_counted};
pub(crate) use rect::{rect_side_tiles, TileGrid, TiledProduct};
pub use strassen::{matmul_recursive, matmul_recursive_counted, StrassenPlan};

/// A dense matrix over `F_2`, packed 64 entries per word along each row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = BitMatrix::zeros(rows, cols);
        for w in m.data.iter_mut() {
            *w = rng.random();
        }
        m.clear_padding();
        m
    }

    /// Builds a matrix from row words; bits beyond `cols` are cleared.
    pub fn from_row_words(rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        let stride = cols.div_ceil(64);
        ensure_dim("bit matrix words", rows * stride, data.len())?;
        let mut m = BitMatrix {
            rows,
            cols,
            stride,
            data,
        };
        m.clear_padding();
        Ok(m)
    }

    fn clear_padding(&mut self) {
        if !self.cols.is_multiple_of(64) {
            let mask = (1u64 << (self.cols % 64)) - 1;
            for r in 0..self.rows {
                self.data[r * self.stride + self.stride - 1] &= mask;
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Words per row.
    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / 64];
        let m = 1u64 << (c % 64);
        if bit {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    pub fn xor_assign(&mut self, other: &BitMatrix) -> Result<()> {
        ensure_dim("xor rows", self.rows, other.rows)?;
        ensure_dim("xor cols", self.cols, other.cols)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a ^= b;
        }
        Ok(())
    }

    /// Fixture text form: one line per row of `0`/`1` characters.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.rows * (self.cols + 1));
        for r in 0..self.rows {
            for c in 0..self.cols {
                s.push(if self.get(r, c) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<BitMatrix> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let cols = lines.first().map_or(0, |l| l.len());
        let mut m = BitMatrix::zeros(lines.len(), cols);
        for (r, line) in lines.iter().enumerate() {
            if line.len() != cols {
                return Err(Error::Parse(format!(
                    "row {r} has {} columns, expected {cols}",
                    line.len()
                )));
            }
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(r, c, true),
                    other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
                }
            }
        }
        Ok(m)
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        f.write_str(&self.to_text())
    }
}

/// A vector of `W`-bit two's-complement integers, stored as masked words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntVector {
    width: u32,
    entries: Vec<u64>,
}

impl IntVector {
    pub fn new(width: u32, entries: Vec<u64>) -> Result<Self> {
        if !(1..=64).contains(&width) {
            return Err(Error::InvalidConfig(format!("integer width {width}")));
        }
        let mask = word_mask(width);
        Ok(IntVector {
            width,
            entries: entries.into_iter().map(|e| e & mask).collect(),
        })
    }

    pub fn from_signed(width: u32, entries: &[i64]) -> Result<Self> {
        IntVector::new(width, entries.iter().map(|&e| e as u64).collect())
    }

    pub fn zeros(width: u32, len: usize) -> Result<Self> {
        IntVector::new(width, vec![0; len])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    /// Entry `i` sign-extended from `W` bits.
    pub fn signed(&self, i: usize) -> i64 {
        sign_extend(self.entries[i], self.width)
    }

    /// Entry-wise sum modulo `2^W`.
    pub fn wrapping_add(&self, other: &IntVector) -> Result<IntVector> {
        ensure_dim("vector add", self.len(), other.len())?;
        IntVector::new(
            self.width,
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.wrapping_add(*b))
                .collect(),
        )
    }
}

pub(crate) fn sign_extend(v: u64, width: u32) -> i64 {
    if width >= 64 {
        v as i64
    } else {
        let shift = 64 - width;
        ((v << shift) as i64) >> shift
    }
}

/// A dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }
}

/// Product over `F_2`, one row at a time: row `i` of the result is the XOR of
/// the rows `j` of `b` selected by the set bits of row `i` of `a`.
pub fn matmul_schoolbook(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
    matmul_schoolbook_counted(a, b, &mut OpCounts::default())
}

pub fn matmul_schoolbook_counted(
    a: &BitMatrix,
    b: &BitMatrix,
    ops: &mut OpCounts,
) -> Result<BitMatrix> {
    ensure_dim("matmul inner dimension", a.cols, b.rows)?;
    let mut c = BitMatrix::zeros(a.rows, b.cols);
    let stride = c.stride;
    for i in 0..a.rows {
        let out = &mut c.data[i * stride..(i + 1) * stride];
        for j in 0..a.cols {
            ops.alu(2);
            if a.get(i, j) {
                for (o, w) in out.iter_mut().zip(b.row(j)) {
                    *o ^= w;
                }
                ops.alu(stride as u64);
                ops.touch(3 * stride as u64);
            }
        }
    }
    Ok(c)
}
