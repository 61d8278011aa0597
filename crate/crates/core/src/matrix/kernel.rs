//! Base-case kernels on 8x8 tiles.
//!
//! Every product in this crate bottoms out in two tile operations: the `F_2`
//! product of two 8x8 tiles and the integer product of two 8x8 0/1 tiles
//! accumulated into 64 counters. A [`BaseKernel`] supplies both and charges
//! its own cost.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::packed::{PackedKernelSpec, PackedLayout};
use super::tile::transpose8;
use crate::cost::OpCounts;
use crate::error::{Error, Result};

pub trait BaseKernel: Send + Sync + fmt::Debug {
    fn kind(&self) -> KernelKind;

    /// Product over `F_2` of two tiles (entry `(r, c)` at bit `8r + c`).
    fn tile_mul(&self, a: u64, b: u64, ops: &mut OpCounts) -> u64;

    /// `acc[8r + c] += sum_t a[r][t] * b[t][c]` over the integers.
    fn tile_mul_z(&self, a: u64, b: u64, acc: &mut [u32; 64], ops: &mut OpCounts);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    /// One wide integer multiplication per tile pair.
    Packed,
    /// A simulated word-matrix instruction: one step per tile pair.
    #[default]
    WordMm,
}

impl KernelKind {
    pub const ALL: [KernelKind; 2] = [KernelKind::Packed, KernelKind::WordMm];

    pub fn build(self) -> Arc<dyn BaseKernel> {
        match self {
            KernelKind::Packed => Arc::new(PackedKernel::new()),
            KernelKind::WordMm => Arc::new(WordMmKernel),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Packed => "packed",
            KernelKind::WordMm => "word-mm",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "packed" => Ok(KernelKind::Packed),
            "word-mm" | "wordmm" => Ok(KernelKind::WordMm),
            other => Err(Error::Parse(format!("unknown kernel {other:?}"))),
        }
    }
}

/// Tile products through [`PackedLayout`] with `d_a = d_b = d_c = 8`.
#[derive(Debug)]
pub struct PackedKernel {
    layout: PackedLayout,
}

impl PackedKernel {
    pub fn new() -> Self {
        let spec = PackedKernelSpec::binary(8, 8, 8).expect("8x8x8 fits the default budget");
        PackedKernel {
            layout: PackedLayout::new(spec),
        }
    }

    pub fn spec(&self) -> PackedKernelSpec {
        self.layout.spec
    }

    fn operands(a: u64, b: u64, ops: &mut OpCounts) -> ([u64; 8], [u64; 8]) {
        let bt = transpose8(b, ops);
        let mut rows = [0u64; 8];
        let mut cols = [0u64; 8];
        for i in 0..8 {
            rows[i] = (a >> (8 * i)) & 0xFF;
            cols[i] = (bt >> (8 * i)) & 0xFF;
        }
        ops.alu(32);
        (rows, cols)
    }
}

impl Default for PackedKernel {
    fn default() -> Self {
        PackedKernel::new()
    }
}

impl BaseKernel for PackedKernel {
    fn kind(&self) -> KernelKind {
        KernelKind::Packed
    }

    fn tile_mul(&self, a: u64, b: u64, ops: &mut OpCounts) -> u64 {
        let mut acc = [0u32; 64];
        self.tile_mul_z(a, b, &mut acc, ops);
        let mut out = 0u64;
        for (i, &v) in acc.iter().enumerate() {
            out |= ((v & 1) as u64) << i;
        }
        ops.alu(2 * 64);
        out
    }

    fn tile_mul_z(&self, a: u64, b: u64, acc: &mut [u32; 64], ops: &mut OpCounts) {
        let (rows, cols) = Self::operands(a, b, ops);
        self.layout.multiply(&rows, &cols, acc, 8, ops);
    }
}

/// The word-matrix instruction: a tile times a tile in one step, with the
/// integer form accumulating into a register-resident tile of counters.
#[derive(Debug, Clone, Copy, Default)]
pub struct WordMmKernel;

const LOW_BITS: u64 = 0x0101_0101_0101_0101;

impl BaseKernel for WordMmKernel {
    fn kind(&self) -> KernelKind {
        KernelKind::WordMm
    }

    #[inline]
    fn tile_mul(&self, a: u64, b: u64, ops: &mut OpCounts) -> u64 {
        ops.mul(1);
        let mut out = 0u64;
        for t in 0..8 {
            let sel = ((a >> t) & LOW_BITS) * 0xFF;
            let brow = ((b >> (8 * t)) & 0xFF) * LOW_BITS;
            out ^= sel & brow;
        }
        out
    }

    #[inline]
    fn tile_mul_z(&self, a: u64, b: u64, acc: &mut [u32; 64], ops: &mut OpCounts) {
        ops.mul(1);
        if a == 0 || b == 0 {
            return;
        }
        let bt = transpose8(b, &mut OpCounts::default());
        for r in 0..8 {
            let row = (a >> (8 * r)) & 0xFF;
            if row == 0 {
                continue;
            }
            let spread = row * LOW_BITS;
            let hits = spread & bt;
            for c in 0..8 {
                acc[8 * r + c] += ((hits >> (8 * c)) & 0xFF).count_ones();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bit(x: u64, r: usize, c: usize) -> u32 {
        ((x >> (8 * r + c)) & 1) as u32
    }

    fn z_oracle(a: u64, b: u64) -> [u32; 64] {
        let mut out = [0u32; 64];
        for r in 0..8 {
            for c in 0..8 {
                out[8 * r + c] = (0..8).map(|t| bit(a, r, t) * bit(b, t, c)).sum();
            }
        }
        out
    }

    #[test]
    fn kernels_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for kind in KernelKind::ALL {
            let k = kind.build();
            for _ in 0..500 {
                let a: u64 = rng.random();
                let b: u64 = rng.random();
                let want = z_oracle(a, b);
                let mut acc = [3u32; 64];
                k.tile_mul_z(a, b, &mut acc, &mut OpCounts::default());
                for i in 0..64 {
                    assert_eq!(acc[i], want[i] + 3, "{kind}");
                }
                let f2 = k.tile_mul(a, b, &mut OpCounts::default());
                for i in 0..64 {
                    assert_eq!(((f2 >> i) & 1) as u32, want[i] & 1, "{kind}");
                }
            }
        }
    }

    #[test]
    fn kind_text() {
        for kind in KernelKind::ALL {
            assert_eq!(kind.name().parse::<KernelKind>().unwrap(), kind);
            assert_eq!(kind.build().kind(), kind);
        }
        assert!("strassen".parse::<KernelKind>().is_err());
        assert_eq!(
            serde_json::to_string(&KernelKind::WordMm).unwrap(),
            "\"word-mm\""
        );
    }
}
