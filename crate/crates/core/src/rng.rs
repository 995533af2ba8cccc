//! Deterministic random substreams.
//!
//! Every trial gets a 64-bit trial seed derived from the master seed and
//! the (point, trial) counter pair. Within a trial, each (stream kind,
//! user) pair owns an independent ChaCha8 stream keyed by the trial seed:
//!
//! ```text
//! trial_seed = ChaCha8(seed_from_u64(master), stream = point_id,
//!                      word_pos = 2 * trial).next_u64()
//! substream  = ChaCha8(seed_from_u64(trial_seed),
//!                      stream = (kind << 32) | user)
//! ```
//!
//! Adding users or sweep points never perturbs the draws of existing ones.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Purpose tag of a substream; the discriminant is part of the stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u32)]
pub enum StreamKind {
    TxRis = 0,
    RisRx = 1,
    TxRisEstimate = 2,
    RisRxEstimate = 3,
    Search = 4,
}

/// Derives the seed of one (point, trial) cell of a sweep.
pub fn trial_seed(master: u64, point_id: u64, trial: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(point_id);
    rng.set_word_pos(u128::from(trial) * 2);
    rng.next_u64()
}

/// Substream factory for one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialStreams {
    seed: u64,
}

impl TrialStreams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `user` is 1-based; 0 is reserved for streams not tied to a user.
    pub fn stream(&self, kind: StreamKind, user: u32) -> SimRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((u64::from(kind as u32) << 32) | u64::from(user));
        rng
    }
}
