//! Synthetic turnstile streams and the binary stream file format.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution as _, Zipf};
use serde::{Deserialize, Serialize};
use wordsketch::UpdateRecord;

use crate::BenchError;

/// Largest delta magnitude the generator emits.
pub const MAX_DELTA: i64 = 16;

/// Bytes per record: key then delta, both little-endian.
pub const RECORD_BYTES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KeyDistribution {
    Uniform,
    Zipf {
        s: f64,
    },
    /// A fraction `mass` of updates goes to keys `0..h`, the rest uniform.
    PlantedHeavy {
        h: u64,
        mass: f64,
    },
}

impl fmt::Display for KeyDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KeyDistribution::Uniform => write!(f, "uniform"),
            KeyDistribution::Zipf { s } => write!(f, "zipf:{s}"),
            KeyDistribution::PlantedHeavy { h, mass } => write!(f, "planted:{h}:{mass}"),
        }
    }
}

impl FromStr for KeyDistribution {
    type Err = BenchError;

    /// `uniform`, `zipf:S` or `planted:H:MASS`.
    fn from_str(s: &str) -> Result<Self, BenchError> {
        let bad = || BenchError::InvalidSpec(format!("unknown distribution {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.parse::<f64>().map_err(|_| bad());
        match parts.as_slice() {
            ["uniform"] => Ok(KeyDistribution::Uniform),
            ["zipf", e] => Ok(KeyDistribution::Zipf { s: num(e)? }),
            ["planted", h, m] => Ok(KeyDistribution::PlantedHeavy {
                h: h.parse().map_err(|_| bad())?,
                mass: num(m)?,
            }),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaMode {
    #[default]
    Nonneg,
    Signed,
    /// Positive inserts, each later cancelled by a matching delete with
    /// probability 1/2; every prefix is nonnegative.
    InsertDelete,
}

impl fmt::Display for DeltaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeltaMode::Nonneg => "nonneg",
            DeltaMode::Signed => "signed",
            DeltaMode::InsertDelete => "insert-delete",
        })
    }
}

impl FromStr for DeltaMode {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "nonneg" => Ok(DeltaMode::Nonneg),
            "signed" => Ok(DeltaMode::Signed),
            "insert-delete" => Ok(DeltaMode::InsertDelete),
            _ => Err(BenchError::InvalidSpec(format!("unknown delta mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamSpec {
    /// Keys are drawn from `0..n`.
    pub n: u64,
    pub length: usize,
    pub distribution: KeyDistribution,
    pub delta_mode: DeltaMode,
    pub seed: u64,
}

impl StreamSpec {
    pub fn new(n: u64, length: usize, distribution: KeyDistribution, seed: u64) -> Self {
        StreamSpec {
            n,
            length,
            distribution,
            delta_mode: DeltaMode::default(),
            seed,
        }
    }

    pub fn with_delta_mode(mut self, mode: DeltaMode) -> Self {
        self.delta_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.n == 0 {
            return Err(BenchError::InvalidSpec(
                "universe size n must be positive".into(),
            ));
        }
        match self.distribution {
            KeyDistribution::Uniform => Ok(()),
            KeyDistribution::Zipf { s } if s.is_finite() && s > 0.0 => Ok(()),
            KeyDistribution::Zipf { s } => Err(BenchError::InvalidSpec(format!(
                "zipf exponent {s} must be positive"
            ))),
            KeyDistribution::PlantedHeavy { h, mass } => {
                if h == 0 || h > self.n || !(0.0..=1.0).contains(&mass) {
                    Err(BenchError::InvalidSpec(format!(
                        "planted-heavy needs 1 <= h <= n and mass in [0, 1], got h = {h}, mass = {mass}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }
}

struct KeySampler {
    n: u64,
    dist: KeyDistribution,
    zipf: Option<Zipf<f64>>,
}

impl KeySampler {
    fn new(spec: &StreamSpec) -> Result<Self, BenchError> {
        let zipf = match spec.distribution {
            KeyDistribution::Zipf { s } => Some(
                Zipf::new(spec.n as f64, s).map_err(|e| BenchError::InvalidSpec(e.to_string()))?,
            ),
            _ => None,
        };
        Ok(KeySampler {
            n: spec.n,
            dist: spec.distribution,
            zipf,
        })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        match self.dist {
            KeyDistribution::Uniform => rng.random_range(0..self.n),
            // rank r maps to key r - 1
            KeyDistribution::Zipf { .. } => {
                let r = self.zipf.as_ref().expect("zipf sampler").sample(rng) as u64;
                r.clamp(1, self.n) - 1
            }
            KeyDistribution::PlantedHeavy { h, mass } => {
                if rng.random_bool(mass) {
                    rng.random_range(0..h)
                } else {
                    rng.random_range(0..self.n)
                }
            }
        }
    }
}

/// Deterministic in `spec`.
pub fn generate_stream(spec: &StreamSpec) -> Result<Vec<UpdateRecord>, BenchError> {
    spec.validate()?;
    let sampler = KeySampler::new(spec)?;
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.length);
    let mut live: Vec<UpdateRecord> = Vec::new();
    while out.len() < spec.length {
        let upd = match spec.delta_mode {
            DeltaMode::Nonneg => {
                UpdateRecord::new(sampler.sample(&mut rng), rng.random_range(1..=MAX_DELTA))
            }
            DeltaMode::Signed => {
                let d = rng.random_range(1..=MAX_DELTA);
                let d = if rng.random() { d } else { -d };
                UpdateRecord::new(sampler.sample(&mut rng), d)
            }
            DeltaMode::InsertDelete => {
                if !live.is_empty() && rng.random_bool(0.5) {
                    let i = rng.random_range(0..live.len());
                    let ins = live.swap_remove(i);
                    UpdateRecord::new(ins.u, -ins.delta)
                } else {
                    let ins = UpdateRecord::new(
                        sampler.sample(&mut rng),
                        rng.random_range(1..=MAX_DELTA),
                    );
                    live.push(ins);
                    ins
                }
            }
        };
        out.push(upd);
    }
    Ok(out)
}

pub fn write_stream<W: Write>(mut w: W, stream: &[UpdateRecord]) -> Result<(), BenchError> {
    let mut buf = Vec::with_capacity(stream.len() * RECORD_BYTES);
    for r in stream {
        buf.extend_from_slice(&r.u.to_le_bytes());
        buf.extend_from_slice(&r.delta.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_stream<R: Read>(mut r: R) -> Result<Vec<UpdateRecord>, BenchError> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    if buf.len() % RECORD_BYTES != 0 {
        return Err(BenchError::InvalidSpec(format!(
            "stream file length {} is not a multiple of {RECORD_BYTES}",
            buf.len()
        )));
    }
    Ok(buf
        .chunks_exact(RECORD_BYTES)
        .map(|c| {
            let u = u64::from_le_bytes(c[..8].try_into().unwrap());
            let d = i64::from_le_bytes(c[8..].try_into().unwrap());
            UpdateRecord::new(u, d)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_deterministic() {
        let spec = StreamSpec::new(100, 0, KeyDistribution::Uniform, 1);
        assert!(generate_stream(&spec).unwrap().is_empty());
        let spec = StreamSpec::new(1000, 500, KeyDistribution::Zipf { s: 1.3 }, 9)
            .with_delta_mode(DeltaMode::Signed);
        assert_eq!(
            generate_stream(&spec).unwrap(),
            generate_stream(&spec).unwrap()
        );
        let other = StreamSpec {
            seed: 10,
            ..spec.clone()
        };
        assert_ne!(
            generate_stream(&spec).unwrap(),
            generate_stream(&other).unwrap()
        );
    }

    #[test]
    fn zipf_tail_matches_analytic() {
        let (n, s) = (10_000u64, 1.1);
        let spec = StreamSpec::new(n, 100_000, KeyDistribution::Zipf { s }, 5);
        let mut freq = vec![0u64; n as usize];
        for r in generate_stream(&spec).unwrap() {
            freq[r.u as usize] += 1;
        }
        let weights: Vec<f64> = (1..=n).map(|r| (r as f64).powf(-s)).collect();
        let total: f64 = weights.iter().sum();
        for cut in [1usize, 10, 100, 1000] {
            let want = weights[cut..].iter().sum::<f64>() / total;
            let got = freq[cut..].iter().sum::<u64>() as f64 / spec.length as f64;
            assert!(
                (got - want).abs() <= 0.1 * want,
                "tail past {cut}: {got} vs {want}"
            );
        }
        for rank in [1usize, 2, 5, 10] {
            let want = weights[rank - 1] / total;
            let got = freq[rank - 1] as f64 / spec.length as f64;
            assert!(
                (got - want).abs() <= 0.1 * want,
                "rank {rank}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn delta_modes() {
        let base = StreamSpec::new(50, 2000, KeyDistribution::Uniform, 3);
        let nonneg = generate_stream(&base).unwrap();
        assert!(nonneg
            .iter()
            .all(|r| (1..=MAX_DELTA).contains(&r.delta) && r.u < 50));
        let signed = generate_stream(&base.clone().with_delta_mode(DeltaMode::Signed)).unwrap();
        assert!(signed.iter().any(|r| r.delta < 0) && signed.iter().all(|r| r.delta != 0));
        let id = generate_stream(&base.with_delta_mode(DeltaMode::InsertDelete)).unwrap();
        let mut nu = [0i64; 50];
        for r in &id {
            nu[r.u as usize] += r.delta;
            assert!(nu[r.u as usize] >= 0);
        }
        assert!(id.iter().any(|r| r.delta < 0));
    }

    #[test]
    fn planted_mass() {
        let spec = StreamSpec::new(
            100_000,
            20_000,
            KeyDistribution::PlantedHeavy { h: 4, mass: 0.5 },
            8,
        );
        let heavy = generate_stream(&spec)
            .unwrap()
            .iter()
            .filter(|r| r.u < 4)
            .count();
        assert!((9_500..=10_500).contains(&heavy), "{heavy}");
    }

    #[test]
    fn spec_validation_and_parsing() {
        let bad = [
            StreamSpec::new(0, 1, KeyDistribution::Uniform, 0),
            StreamSpec::new(10, 1, KeyDistribution::Zipf { s: 0.0 }, 0),
            StreamSpec::new(10, 1, KeyDistribution::PlantedHeavy { h: 11, mass: 0.5 }, 0),
            StreamSpec::new(10, 1, KeyDistribution::PlantedHeavy { h: 1, mass: 1.5 }, 0),
        ];
        for spec in bad {
            assert!(matches!(
                generate_stream(&spec),
                Err(BenchError::InvalidSpec(_))
            ));
        }
        for text in ["uniform", "zipf:1.1", "planted:8:0.25"] {
            assert_eq!(text.parse::<KeyDistribution>().unwrap().to_string(), text);
        }
        assert!("zipf".parse::<KeyDistribution>().is_err());
        assert!("planted:x:1".parse::<KeyDistribution>().is_err());
        assert_eq!(
            "insert-delete".parse::<DeltaMode>().unwrap(),
            DeltaMode::InsertDelete
        );
    }

    #[test]
    fn file_roundtrip() {
        let stream = vec![
            UpdateRecord::new(1, -1),
            UpdateRecord::new(u64::MAX, i64::MIN),
        ];
        let mut bytes = Vec::new();
        write_stream(&mut bytes, &stream).unwrap();
        assert_eq!(bytes.len(), 32);
        assert_eq!(
            &bytes[..16],
            &[1, 0, 0, 0, 0, 0, 0, 0, 255, 255, 255, 255, 255, 255, 255, 255]
        );
        assert_eq!(read_stream(bytes.as_slice()).unwrap(), stream);
        assert!(read_stream(&bytes[..20]).is_err());
    }
}
