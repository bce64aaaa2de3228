use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Number of distinct single-elimination brackets on `n` teams (a power of
/// two), ignoring left/right order: `prod_{i=1}^{n/2} C(2i, 2) / 2^(n/2 - 1)`.
pub fn bracket_count(n: usize) -> Result<BigUint> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Invalid(format!(
            "bracket size must be a power of two >= 2, got {n}"
        )));
    }
    let half = n / 2;
    let mut num = BigUint::from(1u32);
    for i in 1..=half as u64 {
        // C(2i, 2) = i (2i - 1)
        num *= BigUint::from(i * (2 * i - 1));
    }
    Ok(num >> (half - 1))
}
