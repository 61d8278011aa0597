//! Linear sketches over turnstile streams with batched, word-parallel updates.
//!
//! A [`SketchState`] holds `T` rows of `k` bucket counters, each row hashed by
//! `log2 k` seeds of a `c`-wise independent family over GF(2^W). Updates apply
//! one at a time ([`SketchState::naive_update`]) or as a batch through F_2
//! matrix products ([`SketchState::batch_update`]). [`BufferedSketch`] spreads
//! each batch over the following updates so no single update exceeds a fixed
//! step quantum.

pub mod apps;
pub mod bits;
pub mod cost;
pub mod deamortize;
pub mod error;
mod flush;
pub mod gf2;
pub mod hash;
pub mod matrix;
pub mod sketch;

pub use apps::{l2_estimate, l2_estimate_with, point_query, Combiner, L2Estimate, PointEstimate};
pub use bits::{BitVector, Permutation};
pub use cost::OpCounts;
pub use deamortize::{BufferedSketch, FlushProfile, StepReport};
pub use error::{Error, Result};
pub use gf2::{FieldSpec, Gf2Poly, GfElem};
pub use hash::{BucketSeedSet, HashFamilySpec, HashSeed};
pub use matrix::{BitMatrix, IntMatrix, IntVector, KernelKind};
pub use sketch::{Counters, SketchConfig, SketchState, UpdateRecord};
