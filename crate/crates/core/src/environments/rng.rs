use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Counter-based randomness for one trial.
///
/// Draws for `(round, expert)` come from a ChaCha8 keystream keyed by
/// `(seed, trial)`, with the round as stream id and the expert selecting a
/// disjoint 2^32-word window. No state is carried between rounds, so any
/// round can be regenerated in isolation and trials can run in any order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub trial: u64,
}

impl RngStream {
    pub fn new(seed: u64, trial: u64) -> Self {
        RngStream { seed, trial }
    }

    /// Generator positioned for round `t`; call [`RoundRng::expert`] to pick
    /// the expert window.
    pub fn round(&self, t: u64) -> RoundRng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.trial.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(t);
        RoundRng { rng }
    }
}

pub struct RoundRng {
    rng: ChaCha8Rng,
}

impl RoundRng {
    pub fn expert(&mut self, i: usize) -> &mut ChaCha8Rng {
        self.rng.set_word_pos((i as u128) << 32);
        &mut self.rng
    }
}
