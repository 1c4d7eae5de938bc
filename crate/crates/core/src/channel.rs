//! A seeded multishot subspace channel and a brute-force minimum-distance
//! decoder for flag codes.
//!
//! Each codeword subspace is sent as a generator matrix; the channel
//! scrambles it by a random invertible left factor, drops a configured
//! number of rows (erasures), and adjoins the basis of a random subspace
//! (additive errors).  The decoder returns the codeword whose flag is
//! closest, in the sum-of-subspace-distances metric, to the received
//! sequence.  All randomness comes from a ChaCha8 stream seeded
//! explicitly, so every transmission and every simulation is reproducible
//! bit for bit.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::flags::{Flag, FlagCode};
use crate::galois::FieldTower;
use crate::matspace::{random_invertible, Matrix, Subspace};
use crate::{Error, Result};

/// Per-shot noise configuration plus the seed that fixes the random
/// stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelConfig {
    erasures: Vec<usize>,
    error_dims: Vec<usize>,
    seed: u64,
}

impl ChannelConfig {
    /// Per-shot erasure counts and error dimensions, one entry per shot.
    pub fn new(erasures: Vec<usize>, error_dims: Vec<usize>, seed: u64) -> Result<ChannelConfig> {
        if erasures.is_empty() || erasures.len() != error_dims.len() {
            return Err(Error::BadInput(format!(
                "need matching nonempty noise vectors, got {} erasure and {} error entries",
                erasures.len(),
                error_dims.len()
            )));
        }
        Ok(ChannelConfig { erasures, error_dims, seed })
    }

    /// The same erasure count and error dimension on every shot.
    pub fn uniform(
        shots: usize,
        erasures: usize,
        error_dim: usize,
        seed: u64,
    ) -> Result<ChannelConfig> {
        ChannelConfig::new(vec![erasures; shots], vec![error_dim; shots], seed)
    }

    /// No noise at all.
    pub fn noiseless(shots: usize, seed: u64) -> Result<ChannelConfig> {
        ChannelConfig::uniform(shots, 0, 0, seed)
    }

    /// Noise on a single shot, all others clean.
    pub fn single_shot(
        shots: usize,
        shot: usize,
        erasures: usize,
        error_dim: usize,
        seed: u64,
    ) -> Result<ChannelConfig> {
        if shot >= shots {
            return Err(Error::BadInput(format!("shot {shot} out of range for {shots} shots")));
        }
        let mut cfg = ChannelConfig::noiseless(shots, seed)?;
        cfg.erasures[shot] = erasures;
        cfg.error_dims[shot] = error_dim;
        Ok(cfg)
    }

    pub fn shots(&self) -> usize {
        self.erasures.len()
    }

    pub fn erasures(&self) -> &[usize] {
        &self.erasures
    }

    pub fn error_dims(&self) -> &[usize] {
        &self.error_dims
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> ChannelConfig {
        ChannelConfig { seed, ..self.clone() }
    }

    /// A configuration fits a flag when it has one entry per subspace,
    /// each erasure count is strictly below the subspace dimension (at
    /// least one row always survives), and each error dimension fits in
    /// the ambient space.
    pub fn validate_for(&self, flag: &Flag) -> Result<()> {
        if self.erasures.len() != flag.len() {
            return Err(Error::BadInput(format!(
                "configuration covers {} shots but the flag has {} subspaces",
                self.erasures.len(),
                flag.len()
            )));
        }
        for (i, s) in flag.subspaces().iter().enumerate() {
            if self.erasures[i] >= s.dim() {
                return Err(Error::BadInput(format!(
                    "{} erasures would wipe out shot {i} of dimension {}",
                    self.erasures[i],
                    s.dim()
                )));
            }
            if self.error_dims[i] > flag.ambient() {
                return Err(Error::BadInput(format!(
                    "error dimension {} exceeds the ambient dimension {}",
                    self.error_dims[i],
                    flag.ambient()
                )));
            }
        }
        Ok(())
    }
}

/// The receiver's view: one subspace per shot, with no constraint on the
/// dimensions (noise breaks the type vector).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceivedWord {
    level: usize,
    n: usize,
    shots: Vec<Subspace>,
}

impl ReceivedWord {
    pub fn new(shots: Vec<Subspace>) -> Result<ReceivedWord> {
        let Some(first) = shots.first() else {
            return Err(Error::BadInput("a received word needs at least one shot".to_string()));
        };
        let (level, n) = (first.level(), first.ambient());
        for s in &shots {
            if s.level() != level {
                return Err(Error::WrongLevel { expected: level, got: s.level() });
            }
            if s.ambient() != n {
                return Err(Error::AmbientMismatch(n, s.ambient()));
            }
        }
        Ok(ReceivedWord { level, n, shots })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.shots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shots(&self) -> &[Subspace] {
        &self.shots
    }
}

/// Uniformly random subspace of the given dimension, by rejection on the
/// generating matrix.
fn random_subspace(
    tower: &FieldTower,
    level: usize,
    n: usize,
    dim: usize,
    rng: &mut impl Rng,
) -> Subspace {
    let size = tower.size(level);
    loop {
        let mut m = Matrix::zero(level, dim, n);
        for i in 0..dim {
            for j in 0..n {
                m.set_raw(i, j, rng.gen_range(0..size));
            }
        }
        if m.rank(tower) == dim {
            return Subspace::from_matrix(tower, &m);
        }
    }
}

fn transmit_with_rng(
    tower: &FieldTower,
    flag: &Flag,
    cfg: &ChannelConfig,
    rng: &mut ChaCha8Rng,
) -> Result<ReceivedWord> {
    cfg.validate_for(flag)?;
    let (level, n) = (flag.level(), flag.ambient());
    let mut shots = Vec::with_capacity(flag.len());
    for (i, s) in flag.subspaces().iter().enumerate() {
        let scramble = random_invertible(tower, level, s.dim(), rng);
        let mut rows = scramble.mul(tower, s.matrix()).to_rows();
        rows.truncate(s.dim() - cfg.erasures[i]);
        if cfg.error_dims[i] > 0 {
            let noise = random_subspace(tower, level, n, cfg.error_dims[i], rng);
            rows.extend(noise.matrix().to_rows());
        }
        shots.push(Subspace::from_matrix(tower, &Matrix::from_rows(tower, level, &rows)?));
    }
    ReceivedWord::new(shots)
}

/// Send a flag through the channel.  The output is fully determined by
/// the configuration (including its seed).
pub fn transmit(tower: &FieldTower, flag: &Flag, cfg: &ChannelConfig) -> Result<ReceivedWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    transmit_with_rng(tower, flag, cfg, &mut rng)
}

/// Brute-force minimum-distance decoding: the codeword minimizing the sum
/// of per-shot subspace distances, ties broken by the code's canonical
/// order.  Also returns the achieved distance.
pub fn decode<'a>(
    tower: &FieldTower,
    code: &'a FlagCode,
    received: &ReceivedWord,
) -> Result<(&'a Flag, u64)> {
    if received.len() != code.type_vec().len() {
        return Err(Error::BadInput(format!(
            "received word has {} shots but the code sends {}",
            received.len(),
            code.type_vec().len()
        )));
    }
    if received.ambient() != code.ambient() {
        return Err(Error::AmbientMismatch(code.ambient(), received.ambient()));
    }
    if received.level() != code.level() {
        return Err(Error::WrongLevel { expected: code.level(), got: received.level() });
    }
    let mut best: Option<(&Flag, u64)> = None;
    for f in code.flags() {
        let mut total = 0;
        for (fs, rs) in f.subspaces().iter().zip(received.shots()) {
            total += fs.distance(tower, rs)?;
        }
        if best.is_none_or(|(_, b)| total < b) {
            best = Some((f, total));
        }
    }
    Ok(best.expect("a flag code is never empty"))
}

/// One simulation trial; `sent` and `decoded` index into the code's
/// canonically sorted flag list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub sent: usize,
    pub decoded: usize,
    pub success: bool,
    pub distance: u64,
}

/// Aggregate outcome of a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
}

/// Full simulation output: one record per trial plus the summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub records: Vec<TrialRecord>,
    pub summary: SimulationSummary,
}

/// Monte-Carlo over the code: each trial draws a uniform codeword and a
/// fresh channel use, with the trial's seed being the configuration seed
/// plus the trial index, so runs are reproducible and trivially
/// partitionable.
pub fn simulate(
    tower: &FieldTower,
    code: &FlagCode,
    cfg: &ChannelConfig,
    trials: usize,
) -> Result<Simulation> {
    if trials == 0 {
        return Err(Error::BadInput("need at least one trial".to_string()));
    }
    let mut records = Vec::with_capacity(trials);
    let mut successes = 0;
    for trial in 0..trials {
        let seed = cfg.seed.wrapping_add(trial as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sent = rng.gen_range(0..code.size());
        let received = transmit_with_rng(tower, &code.flags()[sent], cfg, &mut rng)?;
        let (decoded_flag, distance) = decode(tower, code, &received)?;
        let decoded = code
            .flags()
            .binary_search(decoded_flag)
            .expect("decoder returns a member of the code");
        let success = decoded == sent;
        successes += usize::from(success);
        records.push(TrialRecord { trial, seed, sent, decoded, success, distance });
    }
    Ok(Simulation {
        records,
        summary: SimulationSummary {
            trials,
            successes,
            success_rate: successes as f64 / trials as f64,
        },
    })
}
