//! Small combinatorial helpers shared by the operator modules.

use num_bigint::BigInt;

/// Binomial coefficient `C(n, k)` in big integers (exact for all
/// inputs; powers and right-inverse tables overflow `u64` well before
/// the sizes used in practice).
pub(crate) fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}
