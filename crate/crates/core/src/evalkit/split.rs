use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Seeded shuffle of the shape ids, split into `round(ratio·n)` train and the rest test.
/// Callers pass base-shape ids so all patterns of a shape share a side.
pub fn split_dataset<S: Clone + Ord>(ids: &[S], ratio: f64, seed: u64) -> Result<(Vec<S>, Vec<S>)> {
    if ids.is_empty() {
        return Err(Error::Precondition("empty manifest".into()));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Precondition(format!("split ratio {ratio} not in (0, 1)")));
    }
    let mut shuffled = ids.to_vec();
    shuffled.sort();
    shuffled.dedup();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = (ratio * shuffled.len() as f64).round() as usize;
    let test = shuffled.split_off(n_train.min(shuffled.len()));
    Ok((shuffled, test))
}
