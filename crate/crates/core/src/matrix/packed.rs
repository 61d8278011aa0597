//! The packed-word block kernel.
//!
//! A `d_a x d_b` by `d_b x d_c` product of 0/1 matrices is computed with one
//! wide integer multiplication. Row `v` of the left operand is spread into
//! `g`-bit slots as `s(v) = sum_t 2^(g t) v[t]`, column `w` of the right
//! operand into reversed slots `s^r(w) = sum_t 2^(g (d_b - 1 - t)) w[t]`.
//! Their integer product is a run of `2 d_b - 1` slots whose middle slot
//! `P(d_b - 1)` is the inner product `<v, w>`. Concatenating all rows with
//! zero gaps on one side and all columns with wider gaps on the other makes a
//! single product hold every `<v_i, w_j>` in disjoint slots.

use std::cell::RefCell;

use super::{BitMatrix, IntMatrix};
use crate::cost::OpCounts;
use crate::error::{ensure_dim, Error, Result};

/// Default bound on `d_a * d_b * d_c * g`.
pub const DEFAULT_SLOT_BUDGET: usize = 2048;

/// Shape and slot width of the packed kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PackedKernelSpec {
    pub d_a: usize,
    pub d_b: usize,
    pub d_c: usize,
    /// Bits per slot.
    pub g: u32,
    pub slot_budget: usize,
}

/// `ceil(log2(2 * d_b * max_entry))`.
pub fn min_slot_bits(d_b: usize, max_entry: u64) -> u32 {
    let bound = 2 * d_b as u64 * max_entry.max(1);
    64 - (bound - 1).leading_zeros()
}

impl PackedKernelSpec {
    pub fn new(d_a: usize, d_b: usize, d_c: usize, g: u32, slot_budget: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 || d_c == 0 {
            return Err(Error::InvalidKernel("dimensions must be positive".into()));
        }
        if d_b > 64 {
            return Err(Error::InvalidKernel(format!(
                "d_b = {d_b} exceeds one word"
            )));
        }
        let need = min_slot_bits(d_b, 1);
        if g < need || g > 32 {
            return Err(Error::InvalidKernel(format!(
                "slot width {g} outside [{need}, 32] for d_b = {d_b}"
            )));
        }
        let bits = d_a * d_b * d_c * g as usize;
        if bits > slot_budget {
            return Err(Error::SlotBudget {
                needed: bits,
                budget: slot_budget,
            });
        }
        Ok(PackedKernelSpec {
            d_a,
            d_b,
            d_c,
            g,
            slot_budget,
        })
    }

    /// The smallest legal slot width for 0/1 entries, default budget.
    pub fn binary(d_a: usize, d_b: usize, d_c: usize) -> Result<Self> {
        PackedKernelSpec::new(d_a, d_b, d_c, min_slot_bits(d_b, 1), DEFAULT_SLOT_BUDGET)
    }

    /// Bits between consecutive row blocks on the left: `2 g d_b`.
    pub fn row_block_bits(&self) -> usize {
        2 * self.g as usize * self.d_b
    }

    /// Bits between consecutive column blocks on the right: `2 g d_b d_a + g d_b`.
    pub fn col_block_bits(&self) -> usize {
        self.row_block_bits() * self.d_a + self.g as usize * self.d_b
    }

    /// Bit offset of `P(d_b - 1)` for the pair `(i, j)` in the product.
    pub fn slot_offset(&self, i: usize, j: usize) -> usize {
        i * self.row_block_bits() + j * self.col_block_bits() + self.g as usize * (self.d_b - 1)
    }
}

/// Precomputed structure of one packed product.
#[derive(Clone, Debug)]
pub(crate) struct PackedLayout {
    pub spec: PackedKernelSpec,
    x_limbs: usize,
    y_limbs: usize,
    // limbs that can be nonzero, fixed by the shape alone
    x_live: Vec<usize>,
    y_live: Vec<usize>,
    out_limbs: usize,
    spread: [u64; 256],
}

fn live_limbs(starts: impl Iterator<Item = usize>, width: usize, total: usize) -> Vec<usize> {
    let mut live = vec![false; total];
    for s in starts {
        live[s / 64..=(s + width - 1) / 64].fill(true);
    }
    live.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i)
        .collect()
}

impl PackedLayout {
    pub fn new(spec: PackedKernelSpec) -> Self {
        let g = spec.g as usize;
        let seg = g * spec.d_b;
        let x_bits = spec.row_block_bits() * spec.d_a;
        let y_bits = spec.col_block_bits() * spec.d_c;
        let x_limbs = x_bits.div_ceil(64);
        let y_limbs = y_bits.div_ceil(64);
        let x_live = live_limbs(
            (0..spec.d_a).map(|i| i * spec.row_block_bits()),
            seg,
            x_limbs,
        );
        let y_live = live_limbs(
            (0..spec.d_c).map(|j| j * spec.col_block_bits()),
            seg,
            y_limbs,
        );
        let last = spec.slot_offset(spec.d_a - 1, spec.d_c - 1) + g;
        let out_limbs = last.div_ceil(64);
        let mut spread = [0u64; 256];
        if g <= 8 {
            for (byte, s) in spread.iter_mut().enumerate() {
                for t in 0..8 {
                    if (byte >> t) & 1 == 1 {
                        *s |= 1 << (g * t);
                    }
                }
            }
        }
        PackedLayout {
            spec,
            x_limbs,
            y_limbs,
            x_live,
            y_live,
            out_limbs,
            spread,
        }
    }

    /// ORs `s(bits)` (low `d_b` bits, slot `t` at `g t`) into `limbs` at `offset`.
    fn place_spread(&self, limbs: &mut [u64], offset: usize, bits: u64, ops: &mut OpCounts) {
        let g = self.spec.g as usize;
        let d_b = self.spec.d_b;
        if g <= 8 {
            for byte_idx in 0..d_b.div_ceil(8) {
                let byte = ((bits >> (8 * byte_idx)) & 0xFF) as usize;
                let v = self.spread[byte];
                or_at(limbs, offset + 8 * g * byte_idx, v);
                ops.touch(1);
                ops.alu(5);
            }
        } else {
            for t in 0..d_b {
                or_at(limbs, offset + g * t, (bits >> t) & 1);
                ops.alu(4);
            }
        }
    }

    /// `out[i * out_stride + j] += <rows[i], cols[j]>` over the integers,
    /// reading the low `d_b` bits of each operand word.
    pub fn multiply(
        &self,
        rows: &[u64],
        cols: &[u64],
        out: &mut [u32],
        out_stride: usize,
        ops: &mut OpCounts,
    ) {
        let spec = &self.spec;
        debug_assert_eq!(rows.len(), spec.d_a);
        debug_assert_eq!(cols.len(), spec.d_c);
        let d_b = spec.d_b;
        let g = spec.g as usize;
        let operand_mask = if d_b == 64 {
            u64::MAX
        } else {
            (1u64 << d_b) - 1
        };
        SCRATCH.with(|cell| {
            let mut s = cell.borrow_mut();
            let Scratch { x, y, col, prod } = &mut *s;
            x.clear();
            x.resize(self.x_limbs, 0);
            y.clear();
            y.resize(self.y_limbs, 0);
            for (i, &r) in rows.iter().enumerate() {
                self.place_spread(x, i * spec.row_block_bits(), r & operand_mask, ops);
            }
            for (j, &c) in cols.iter().enumerate() {
                // reverse the d_b operand bits so that slot t holds w[d_b - 1 - t]
                let rev = (c & operand_mask).reverse_bits() >> (64 - d_b);
                ops.alu(3);
                self.place_spread(y, j * spec.col_block_bits(), rev, ops);
            }
            ops.touch(rows.len() as u64 + cols.len() as u64);

            prod.clear();
            if self.x_limbs == 1 && self.y_limbs == 1 {
                let p = x[0] as u128 * y[0] as u128;
                ops.mul(1);
                prod.push(p as u64);
                prod.push((p >> 64) as u64);
            } else {
                // product scanning: column sums of the 128-bit partial products
                col.clear();
                col.resize(self.x_limbs + self.y_limbs + 1, 0);
                for &i in &self.x_live {
                    let xi = x[i] as u128;
                    for &j in &self.y_live {
                        let p = xi * y[j] as u128;
                        col[i + j] += p as u64 as u128;
                        col[i + j + 1] += p >> 64;
                    }
                }
                let pairs = (self.x_live.len() * self.y_live.len()) as u64;
                ops.mul(pairs);
                ops.alu(2 * pairs);
                let mut carry = 0u128;
                for &c in &col[..self.out_limbs] {
                    let t = c + carry;
                    prod.push(t as u64);
                    carry = t >> 64;
                }
                ops.alu(2 * self.out_limbs as u64);
            }
            prod.resize(self.out_limbs.max(2) + 1, 0);

            let slot_mask = (1u64 << g) - 1;
            for i in 0..spec.d_a {
                for j in 0..spec.d_c {
                    let v = read_bits(prod, spec.slot_offset(i, j)) & slot_mask;
                    out[i * out_stride + j] += v as u32;
                }
            }
            let outs = (spec.d_a * spec.d_c) as u64;
            ops.alu(4 * outs);
            ops.touch(2 * outs);
        });
    }
}

#[derive(Default)]
struct Scratch {
    x: Vec<u64>,
    y: Vec<u64>,
    col: Vec<u128>,
    prod: Vec<u64>,
}

thread_local! {
    static SCRATCH: RefCell<Scratch> = RefCell::new(Scratch::default());
}

#[inline]
fn or_at(limbs: &mut [u64], offset: usize, v: u64) {
    let (w, b) = (offset / 64, offset % 64);
    limbs[w] |= v << b;
    if b != 0 && w + 1 < limbs.len() {
        limbs[w + 1] |= v >> (64 - b);
    }
}

#[inline]
fn read_bits(limbs: &[u64], offset: usize) -> u64 {
    let (w, b) = (offset / 64, offset % 64);
    let lo = limbs[w] >> b;
    if b == 0 {
        lo
    } else {
        lo | limbs.get(w + 1).map_or(0, |h| h << (64 - b))
    }
}

/// Integer product `V * Wm` of 0/1 blocks by one wide multiplication.
pub fn packed_inner_block(
    v: &BitMatrix,
    w: &BitMatrix,
    spec: PackedKernelSpec,
) -> Result<IntMatrix> {
    packed_inner_block_counted(v, w, spec, &mut OpCounts::default())
}

pub fn packed_inner_block_counted(
    v: &BitMatrix,
    w: &BitMatrix,
    spec: PackedKernelSpec,
    ops: &mut OpCounts,
) -> Result<IntMatrix> {
    let spec = PackedKernelSpec::new(spec.d_a, spec.d_b, spec.d_c, spec.g, spec.slot_budget)?;
    ensure_dim("packed kernel rows", spec.d_a, v.rows())?;
    ensure_dim("packed kernel inner", spec.d_b, v.cols())?;
    ensure_dim("packed kernel inner", spec.d_b, w.rows())?;
    ensure_dim("packed kernel cols", spec.d_c, w.cols())?;
    let rows: Vec<u64> = (0..spec.d_a).map(|i| v.row(i)[0]).collect();
    let cols: Vec<u64> = (0..spec.d_c)
        .map(|j| (0..spec.d_b).fold(0u64, |acc, t| acc | (w.get(t, j) as u64) << t))
        .collect();
    let mut out = vec![0u32; spec.d_a * spec.d_c];
    PackedLayout::new(spec).multiply(&rows, &cols, &mut out, spec.d_c, ops);
    let mut m = IntMatrix::zeros(spec.d_a, spec.d_c);
    for i in 0..spec.d_a {
        for j in 0..spec.d_c {
            m.set(i, j, out[i * spec.d_c + j] as u64);
        }
    }
    Ok(m)
}
