use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Binomial coefficient C(n, k); zero when k > n.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // Exact at every step: acc is C(n, i) before this update.
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// C(n, k) as u64 when it fits.
pub fn binomial_u64(n: u64, k: u64) -> Option<u64> {
    u64::try_from(binomial(n, k)).ok()
}
