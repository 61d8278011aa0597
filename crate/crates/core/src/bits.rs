//! Packed bit strings and fixed permutations of bit positions.

use serde::{Deserialize, Serialize};

use crate::cost::OpCounts;
use crate::error::{ensure_dim, Error, Result};

/// A fixed-length bit string packed little-endian into 64-bit words. Bits past
/// `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_words(len: usize, mut words: Vec<u64>) -> Result<Self> {
        ensure_dim("bit vector words", len.div_ceil(64), words.len())?;
        if !len.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        Ok(BitVector { len, words })
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let m = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Inner product over `F_2`.
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        let acc = self
            .words
            .iter()
            .zip(&other.words)
            .fold(0u64, |acc, (a, b)| acc ^ (a & b));
        acc.count_ones() & 1 == 1
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        write!(f, "BitVector({s})")
    }
}

/// A permutation `pi` of `0..n`, applied to sequences as `out[i] = x[pi(i)]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    map: Vec<u32>,
}

impl Permutation {
    pub fn new(map: Vec<u32>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &p in &map {
            let p = p as usize;
            if p >= n || seen[p] {
                return Err(Error::InvalidConfig(format!(
                    "not a permutation of 0..{n}: repeated or out-of-range {p}"
                )));
            }
            seen[p] = true;
        }
        Ok(Permutation { map })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n as u32).collect(),
        }
    }

    /// Bit reversal on `n` positions.
    pub fn reversal(n: usize) -> Self {
        Permutation {
            map: (0..n as u32).rev().collect(),
        }
    }

    /// Maps a flat index `j*k + b` to `b*t + j`.
    ///
    /// Applied to a bucket-major sequence (index `b*t + j`) this yields the
    /// row-major layout (index `j*k + b`).
    pub fn bucket_major_to_row_major(k: usize, t: usize) -> Self {
        let map = (0..k * t)
            .map(|flat| {
                let (j, b) = (flat / k, flat % k);
                (b * t + j) as u32
            })
            .collect();
        Permutation { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn source(&self, i: usize) -> usize {
        self.map[i] as usize
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.map.len()];
        for (i, &p) in self.map.iter().enumerate() {
            inv[p as usize] = i as u32;
        }
        Permutation { map: inv }
    }

    /// Permutes a word sequence: `out[i] = x[pi(i)]`.
    pub fn apply<T: Copy>(&self, x: &[T], ops: &mut OpCounts) -> Result<Vec<T>> {
        ensure_dim("permutation input", self.map.len(), x.len())?;
        ops.touch(2 * x.len() as u64);
        Ok(self.map.iter().map(|&p| x[p as usize]).collect())
    }
}

/// Permutes the bits of `x`: output bit `i` is input bit `pi(i)`.
///
/// The permutation is fixed ahead of time, so it is compiled into runs of
/// consecutive positions that move together; each run is one shift-and-mask
/// of a source word into a destination word.
pub fn permute_bits(x: &BitVector, pi: &Permutation) -> Result<BitVector> {
    let mut ops = OpCounts::ZERO;
    permute_bits_counted(x, pi, &mut ops)
}

pub fn permute_bits_counted(
    x: &BitVector,
    pi: &Permutation,
    ops: &mut OpCounts,
) -> Result<BitVector> {
    ensure_dim("permute_bits", pi.len(), x.len())?;
    let mut out = BitVector::zeros(x.len());
    let mut i = 0;
    let n = x.len();
    while i < n {
        let src = pi.source(i);
        // extend the run while source and destination stay consecutive and
        // inside a single word on both sides
        let mut len = 1;
        while i + len < n
            && pi.source(i + len) == src + len
            && (i + len) % 64 != 0
            && !(src + len).is_multiple_of(64)
        {
            len += 1;
        }
        let mask = if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        let chunk = (x.words[src / 64] >> (src % 64)) & mask;
        out.words[i / 64] |= chunk << (i % 64);
        ops.touch(2);
        ops.alu(4);
        i += len;
    }
    Ok(out)
}
