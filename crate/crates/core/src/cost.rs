//! Word-operation cost model.
//!
//! Every kernel in the crate reports the word-level work it performs into an
//! [`OpCounts`]. Counters are passed down by `&mut` and owned by the caller, so
//! two concurrent invocations never share one.

use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

/// Counted word operations.
///
/// `mults` are widening word multiplies (or one word-matrix product on a
/// word RAM with a matrix instruction), `xors` are single-word ALU operations
/// (xor, and, add, shift, popcount), and `words_touched` are word loads and
/// stores of operand data.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub mults: u64,
    pub xors: u64,
    pub words_touched: u64,
}

impl OpCounts {
    pub const ZERO: OpCounts = OpCounts {
        mults: 0,
        xors: 0,
        words_touched: 0,
    };

    pub const fn new(mults: u64, xors: u64, words_touched: u64) -> Self {
        OpCounts {
            mults,
            xors,
            words_touched,
        }
    }

    /// Total steps: the sum of all three categories.
    pub const fn steps(&self) -> u64 {
        self.mults + self.xors + self.words_touched
    }

    #[inline]
    pub fn mul(&mut self, n: u64) {
        self.mults += n;
    }

    #[inline]
    pub fn alu(&mut self, n: u64) {
        self.xors += n;
    }

    #[inline]
    pub fn touch(&mut self, n: u64) {
        self.words_touched += n;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("counts serialize")
    }
}

impl Add for OpCounts {
    type Output = OpCounts;
    fn add(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            mults: self.mults + rhs.mults,
            xors: self.xors + rhs.xors,
            words_touched: self.words_touched + rhs.words_touched,
        }
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, rhs: OpCounts) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for OpCounts {
    fn sum<I: Iterator<Item = OpCounts>>(iter: I) -> OpCounts {
        iter.fold(OpCounts::ZERO, |a, b| a + b)
    }
}
