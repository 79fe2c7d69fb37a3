//! Event-level simulation of photon pairs: path sampling, Franson
//! post-selection, outcome sampling from the active phase law, and count
//! accumulation.
//!
//! Reproducibility contract: a batch is split into fixed chunks of
//! `chunk_size` events, and the generator for chunk `k` of stream `s` is
//! seeded by a fixed mixing function of `(master_seed, s, k)`. Chunk tallies
//! are merged with plain counter addition, which is associative and
//! commutative, so the result is bitwise identical for any worker count and
//! any scheduling order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::joint_probabilities;

/// Seeding policy for reproducible parallel batches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RngPolicy {
    pub master_seed: u64,
    #[serde(default = "default_chunk_size")]
    pub chunk_size: u64,
}

fn default_chunk_size() -> u64 {
    65_536
}

impl Default for RngPolicy {
    fn default() -> Self {
        RngPolicy { master_seed: 0, chunk_size: default_chunk_size() }
    }
}

impl RngPolicy {
    pub fn new(master_seed: u64) -> Self {
        RngPolicy { master_seed, chunk_size: default_chunk_size() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.chunk_size == 0 {
            return Err(Error::invalid_config("rng.chunk_size", "must be at least 1"));
        }
        Ok(())
    }
}

/// Optional detector imperfections, both disabled by default so the ideal
/// phase law is the exact sampling law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorModel {
    /// Per-photon detection probability; a coincidence survives with
    /// probability `efficiency^2`.
    pub efficiency: f64,
    /// Probability per pair slot of an accidental coincidence with
    /// uncorrelated outcomes.
    pub dark_count_prob: f64,
}

impl Default for DetectorModel {
    fn default() -> Self {
        DetectorModel { efficiency: 1.0, dark_count_prob: 0.0 }
    }
}

impl DetectorModel {
    pub fn validate(&self) -> Result<()> {
        if self.efficiency.is_nan() || self.efficiency <= 0.0 || self.efficiency > 1.0 {
            return Err(Error::invalid_config("detector.efficiency", "must lie in (0, 1]"));
        }
        if !(0.0..1.0).contains(&self.dark_count_prob) {
            return Err(Error::invalid_config("detector.dark_count_prob", "must lie in [0, 1)"));
        }
        Ok(())
    }

    fn is_ideal(&self) -> bool {
        self.efficiency == 1.0 && self.dark_count_prob == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhotonPath {
    Short,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    fn flipped(self) -> Outcome {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

/// One simulated pair. Outcomes are present exactly when the pair survived
/// post-selection (both photons took the short path or both the long one);
/// mismatched pairs are discarded without outcome assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairEvent {
    pub path_a: PhotonPath,
    pub path_b: PhotonPath,
    pub outcomes: Option<(Outcome, Outcome)>,
}

impl PairEvent {
    pub fn postselected(&self) -> bool {
        self.path_a == self.path_b
    }
}

/// Aggregated coincidence counts.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub n_pairs: u64,
    pub n_postselected: u64,
    pub n_same: u64,
    pub n_diff: u64,
}

impl Tally {
    /// Componentwise sum; associative and commutative, and the only
    /// synchronization point between workers.
    pub fn merge(self, other: Tally) -> Tally {
        Tally {
            n_pairs: self.n_pairs + other.n_pairs,
            n_postselected: self.n_postselected + other.n_postselected,
            n_same: self.n_same + other.n_same,
            n_diff: self.n_diff + other.n_diff,
        }
    }

    pub fn p_same(&self) -> Result<f64> {
        if self.n_postselected == 0 {
            return Err(Error::EmptyTally);
        }
        Ok(self.n_same as f64 / self.n_postselected as f64)
    }

    pub fn is_consistent(&self) -> bool {
        self.n_same + self.n_diff == self.n_postselected && self.n_postselected <= self.n_pairs
    }
}

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fixed mixing function from (master seed, stream, chunk index) to a
/// 256-bit generator seed. Changing any input decorrelates the stream.
fn chunk_seed(master_seed: u64, stream: u64, chunk: u64) -> [u8; 32] {
    let s1 = mix(master_seed ^ GAMMA ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    let mut state = mix(s1 ^ chunk.wrapping_mul(GAMMA));
    let mut seed = [0u8; 32];
    for word in seed.chunks_exact_mut(8) {
        state = state.wrapping_add(GAMMA);
        word.copy_from_slice(&mix(state).to_le_bytes());
    }
    seed
}

/// Sample one ideal pair: each photon takes the short or long path with
/// probability 1/2; path-matched pairs get outcomes with
/// `P(a=b) = p_same` and uniform single-detector marginals.
pub fn sample_pair_event<R: Rng + ?Sized>(rng: &mut R, p_same: f64) -> PairEvent {
    let bits: u64 = rng.random();
    let path_a = if bits & 1 == 0 { PhotonPath::Short } else { PhotonPath::Long };
    let path_b = if bits & 2 == 0 { PhotonPath::Short } else { PhotonPath::Long };
    let outcomes = if path_a == path_b {
        let u: f64 = rng.random();
        let a = if bits & 4 == 0 { Outcome::Plus } else { Outcome::Minus };
        let b = if u < p_same { a } else { a.flipped() };
        Some((a, b))
    } else {
        None
    };
    PairEvent { path_a, path_b, outcomes }
}

fn simulate_chunk(events: u64, p_same: f64, seed: [u8; 32], detector: &DetectorModel) -> Tally {
    let mut rng = ChaCha8Rng::from_seed(seed);
    let mut tally = Tally::default();
    let ideal = detector.is_ideal();
    let pair_survival = detector.efficiency * detector.efficiency;
    for _ in 0..events {
        if !ideal && detector.dark_count_prob > 0.0 {
            let u_dark: f64 = rng.random();
            if u_dark < detector.dark_count_prob {
                // accidental coincidence, uncorrelated outcomes
                let bits: u64 = rng.random();
                tally.n_pairs += 1;
                tally.n_postselected += 1;
                if bits & 1 == 0 {
                    tally.n_same += 1;
                } else {
                    tally.n_diff += 1;
                }
                continue;
            }
        }
        let bits: u64 = rng.random();
        tally.n_pairs += 1;
        if (bits & 1) == ((bits >> 1) & 1) {
            if !ideal && pair_survival < 1.0 {
                let u_eff: f64 = rng.random();
                if u_eff >= pair_survival {
                    continue; // coincidence lost to detection inefficiency
                }
            }
            tally.n_postselected += 1;
            let u: f64 = rng.random();
            if u < p_same {
                tally.n_same += 1;
            } else {
                tally.n_diff += 1;
            }
        }
    }
    tally
}

/// Simulate `n` pairs at total phase `phi` on stream 0.
pub fn simulate_batch(n: u64, phi: f64, policy: &RngPolicy) -> Tally {
    simulate_batch_detailed(n, phi, policy, 0, &DetectorModel::default())
}

/// Simulate on an explicit stream so that independent campaign points draw
/// from disjoint generator families under one master seed.
pub fn simulate_batch_stream(n: u64, phi: f64, policy: &RngPolicy, stream: u64) -> Tally {
    simulate_batch_detailed(n, phi, policy, stream, &DetectorModel::default())
}

pub fn simulate_batch_detailed(
    n: u64,
    phi: f64,
    policy: &RngPolicy,
    stream: u64,
    detector: &DetectorModel,
) -> Tally {
    let p_same = joint_probabilities(phi).p_same();
    let chunk_size = policy.chunk_size.max(1);
    let n_chunks = n.div_ceil(chunk_size);
    (0..n_chunks)
        .into_par_iter()
        .map(|k| {
            let lo = k * chunk_size;
            let hi = (lo + chunk_size).min(n);
            simulate_chunk(hi - lo, p_same, chunk_seed(policy.master_seed, stream, k), detector)
        })
        .reduce(Tally::default, Tally::merge)
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn tally_strategy() -> impl Strategy<Value = Tally> {
        (0u64..1u64 << 40, 0u64..1u64 << 40, 0u64..1u64 << 40, 0u64..1u64 << 40).prop_map(
            |(a, b, c, d)| Tally { n_pairs: a, n_postselected: b, n_same: c, n_diff: d },
        )
    }

    proptest! {
        #[test]
        fn merge_is_associative_and_commutative(
            t1 in tally_strategy(),
            t2 in tally_strategy(),
            t3 in tally_strategy(),
        ) {
            prop_assert_eq!(t1.merge(t2).merge(t3), t1.merge(t2.merge(t3)));
            prop_assert_eq!(t1.merge(t2), t2.merge(t1));
        }

        #[test]
        fn simulated_tallies_are_internally_consistent(seed in 0u64..500, n in 0u64..5000) {
            let t = simulate_batch(n, 0.913, &RngPolicy { master_seed: seed, chunk_size: 257 });
            prop_assert!(t.is_consistent());
            prop_assert_eq!(t.n_pairs, n);
        }
    }
}
