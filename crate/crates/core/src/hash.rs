//! The `c`-wise independent family `h_s(u) = <s, g(u)>` over `GF(2^W)`, where
//! `g(u) = (1, u, u^2, ..., u^(c-1))`.
//!
//! `g(u)` is laid out as `c` blocks of `W` bits, block `i` holding `u^i` at
//! bits `[iW, (i+1)W)` with the coefficient of `z^t` at offset `t`. A bucket
//! index in `[k]` takes `log2 k` independent seeds, one per output bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::cost::OpCounts;
use crate::error::{Error, Result};
use crate::gf2::FieldSpec;
use crate::matrix::{matmul_rect, BaseKernel, BitMatrix, TileGrid};

/// Largest supported bucket count.
pub const MAX_BUCKETS: usize = 256;
/// Largest number of seeds in one batch evaluation.
pub const MAX_BATCH_SEEDS: usize = 1 << 13;
/// Largest number of keys in one batch evaluation.
pub const MAX_BATCH_KEYS: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashFamilySpec {
    c: usize,
    k: usize,
    field: FieldSpec,
}

impl HashFamilySpec {
    pub fn new(c: usize, k: usize, field: FieldSpec) -> Result<Self> {
        if c < 2 {
            return Err(Error::InvalidConfig(format!(
                "independence c = {c} must be at least 2"
            )));
        }
        if c > 64 {
            return Err(Error::InvalidConfig(format!(
                "independence c = {c} is not a small constant"
            )));
        }
        if !k.is_power_of_two() || k > MAX_BUCKETS {
            return Err(Error::InvalidConfig(format!(
                "bucket count k = {k} must be a power of two at most {MAX_BUCKETS}"
            )));
        }
        Ok(HashFamilySpec { c, k, field })
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn log_k(&self) -> usize {
        self.k.trailing_zeros() as usize
    }

    pub fn width(&self) -> u32 {
        self.field.width()
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// `c * W`.
    pub fn seed_bits(&self) -> usize {
        self.c * self.field.width() as usize
    }
}

/// A seed `s` in `F_2^(cW)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HashSeed {
    bits: BitVector,
}

impl HashSeed {
    pub fn new(bits: BitVector, spec: &HashFamilySpec) -> Result<Self> {
        if bits.len() != spec.seed_bits() {
            return Err(Error::DimensionMismatch {
                context: "hash seed length",
                expected: spec.seed_bits(),
                found: bits.len(),
            });
        }
        Ok(HashSeed { bits })
    }

    pub fn zero(spec: &HashFamilySpec) -> Self {
        HashSeed {
            bits: BitVector::zeros(spec.seed_bits()),
        }
    }

    pub fn random<R: Rng + ?Sized>(spec: &HashFamilySpec, rng: &mut R) -> Self {
        let n = spec.seed_bits();
        let words = (0..n.div_ceil(64)).map(|_| rng.random()).collect();
        HashSeed {
            bits: BitVector::from_words(n, words).expect("word count matches"),
        }
    }

    pub fn bits(&self) -> &BitVector {
        &self.bits
    }
}

/// `g(u)` as a `cW`-bit string. Keys are taken modulo `2^W`.
pub fn encode_point(u: u64, spec: &HashFamilySpec) -> BitVector {
    encode_point_counted(u, spec, &mut OpCounts::default())
}

pub fn encode_point_counted(u: u64, spec: &HashFamilySpec, ops: &mut OpCounts) -> BitVector {
    let field = spec.field();
    let w = field.width() as usize;
    let u = u & field.mask();
    let mut words = vec![0u64; spec.seed_bits().div_ceil(64)];
    let mut power = 1u64;
    for i in 0..spec.c() {
        if i == 1 {
            power = u;
        } else if i > 1 {
            power = field.mul_words(power, u);
            *ops += field.mul_cost();
        }
        or_bits(&mut words, i * w, power);
    }
    ops.touch(spec.c() as u64);
    ops.alu(2 * spec.c() as u64);
    BitVector::from_words(spec.seed_bits(), words).expect("length unchanged")
}

fn or_bits(words: &mut [u64], offset: usize, v: u64) {
    let (i, b) = (offset / 64, offset % 64);
    words[i] |= v << b;
    if b != 0 && i + 1 < words.len() {
        words[i + 1] |= v >> (64 - b);
    }
}

/// Parity of `s & x` with its counted cost.
#[inline]
fn dot_counted(s: &BitVector, x: &BitVector, ops: &mut OpCounts) -> bool {
    let n = s.words().len() as u64;
    ops.touch(n);
    ops.alu(2 * n + 1);
    s.dot(x)
}

/// `h_s(u)`.
pub fn eval_single(s: &HashSeed, u: u64, spec: &HashFamilySpec) -> bool {
    s.bits.dot(&encode_point(u, spec))
}

/// `out[j][i] = h_{seeds[j]}(keys[i])`, computed as the `F_2` product of the
/// seed rows `S` and the encoded key columns `X`.
pub fn batch_eval(
    seeds: &[HashSeed],
    keys: &[u64],
    spec: &HashFamilySpec,
    kernel: &dyn BaseKernel,
) -> Result<BitMatrix> {
    if seeds.len() > MAX_BATCH_SEEDS {
        return Err(Error::BatchTooLarge {
            len: seeds.len(),
            cap: MAX_BATCH_SEEDS,
        });
    }
    if keys.len() > MAX_BATCH_KEYS {
        return Err(Error::BatchTooLarge {
            len: keys.len(),
            cap: MAX_BATCH_KEYS,
        });
    }
    let n = spec.seed_bits();
    for s in seeds {
        if s.bits.len() != n {
            return Err(Error::DimensionMismatch {
                context: "hash seed length",
                expected: n,
                found: s.bits.len(),
            });
        }
    }
    let stride = n.div_ceil(64);
    let mut s_words = Vec::with_capacity(seeds.len() * stride);
    for s in seeds {
        s_words.extend_from_slice(s.bits.words());
    }
    let s_mat = BitMatrix::from_row_words(seeds.len(), n, s_words)?;
    let mut x_mat = BitMatrix::zeros(n, keys.len());
    for (i, &u) in keys.iter().enumerate() {
        let g = encode_point(u, spec);
        for t in 0..n {
            if g.get(t) {
                x_mat.set(t, i, true);
            }
        }
    }
    matmul_rect(&s_mat, &x_mat, kernel)
}

/// The seeds of a `lin-skt` instance: `T` rows of `log2 k` seeds each, all
/// drawn from one master seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BucketSeedSet {
    spec: HashFamilySpec,
    rows: usize,
    master_seed: u64,
    seeds: Vec<HashSeed>,
}

/// Everything needed to regenerate a [`BucketSeedSet`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSetFixture {
    pub master_seed: u64,
    pub c: usize,
    pub k: usize,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "W")]
    pub w: u32,
    pub field: String,
}

impl BucketSeedSet {
    pub fn generate(spec: HashFamilySpec, rows: usize, master_seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
        let seeds = (0..rows * spec.log_k())
            .map(|_| HashSeed::random(&spec, &mut rng))
            .collect();
        BucketSeedSet {
            spec,
            rows,
            master_seed,
            seeds,
        }
    }

    /// Builds a set from explicit seeds, ordered row-major by `(row, bit)`.
    pub fn from_seeds(spec: HashFamilySpec, rows: usize, seeds: Vec<HashSeed>) -> Result<Self> {
        if seeds.len() != rows * spec.log_k() {
            return Err(Error::DimensionMismatch {
                context: "bucket seed count",
                expected: rows * spec.log_k(),
                found: seeds.len(),
            });
        }
        for s in &seeds {
            HashSeed::new(s.bits.clone(), &spec)?;
        }
        Ok(BucketSeedSet {
            spec,
            rows,
            master_seed: 0,
            seeds,
        })
    }

    pub fn spec(&self) -> &HashFamilySpec {
        &self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn seed(&self, row: usize, bit: usize) -> &HashSeed {
        &self.seeds[row * self.spec.log_k() + bit]
    }

    /// Bucket of `u` in sketch row `row`: bit `t` is `h_{seed(row, t)}(u)`.
    pub fn bucket_of(&self, u: u64, row: usize) -> usize {
        self.bucket_of_encoded(&encode_point(u, &self.spec), row, &mut OpCounts::default())
    }

    pub(crate) fn bucket_of_encoded(&self, g: &BitVector, row: usize, ops: &mut OpCounts) -> usize {
        let mut b = 0;
        for t in 0..self.spec.log_k() {
            b |= (dot_counted(&self.seed(row, t).bits, g, ops) as usize) << t;
        }
        if self.spec.log_k() > 1 {
            ops.alu(2 * self.spec.log_k() as u64);
        }
        b
    }

    /// The seed matrix as tiles, rows ordered `t * padded_rows + row` so each
    /// output bit owns whole tile rows.
    pub(crate) fn seed_grid(&self) -> TileGrid {
        let padded = self.rows.next_multiple_of(8);
        let n = self.spec.seed_bits();
        let stride = n.div_ceil(64);
        let mut words = vec![0u64; self.spec.log_k() * padded * stride];
        for row in 0..self.rows {
            for t in 0..self.spec.log_k() {
                let at = (t * padded + row) * stride;
                words[at..at + stride].copy_from_slice(self.seed(row, t).bits.words());
            }
        }
        let m =
            BitMatrix::from_row_words(self.spec.log_k() * padded, n, words).expect("sized above");
        TileGrid::from_matrix(&m, &mut OpCounts::default())
    }

    pub fn fixture(&self) -> SeedSetFixture {
        SeedSetFixture {
            master_seed: self.master_seed,
            c: self.spec.c(),
            k: self.spec.k(),
            t: self.rows,
            w: self.spec.width(),
            field: self.spec.field().to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.fixture()).expect("fixture serializes")
    }

    pub fn from_fixture(f: &SeedSetFixture) -> Result<Self> {
        let field: FieldSpec = f.field.parse()?;
        if field.width() != f.w {
            return Err(Error::InvalidConfig(format!(
                "fixture width {} disagrees with field {}",
                f.w, f.field
            )));
        }
        Ok(BucketSeedSet::generate(
            HashFamilySpec::new(f.c, f.k, field)?,
            f.t,
            f.master_seed,
        ))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: SeedSetFixture = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        BucketSeedSet::from_fixture(&f)
    }
}
