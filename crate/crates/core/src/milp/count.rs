//! Number of ways to serve every cold stream from exactly one hot stream.

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("no hot streams to serve {0} cold streams")]
    NoHotStreams(u32),
}

/// `n^m` one-hot assignments of `m` cold streams to `n` hot streams.
pub fn count_configurations(n: u32, m: u32) -> Result<BigUint, CountError> {
    if n == 0 && m > 0 {
        return Err(CountError::NoHotStreams(m));
    }
    Ok(BigUint::from(n).pow(m))
}
