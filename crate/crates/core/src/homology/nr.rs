//! The coefficient bound `n₀^{4n·n₀ⁿ} · max|a|` for fillings of a bounding
//! cycle in an `n`-dimensional complex with `n₀` vertices.

use num_bigint::BigInt;
use num_traits::{One, Pow};

/// Exponents above this are not expanded into exact integers.
const EXACT_EXPONENT_LIMIT: u64 = 1 << 20;

/// `log₂(n₀^{4n·n₀ⁿ} · max_coeff)`. Saturates to `+∞` when the exponent
/// itself overflows `f64`.
pub fn nr_coefficient_bound(n0: u64, n: u64, max_coeff: u64) -> f64 {
    assert!(n0 >= 1 && n >= 1, "n0 and n must be positive");
    let lg = (n0 as f64).log2();
    let max_term = (max_coeff.max(1) as f64).log2();
    if n0 == 1 {
        return max_term;
    }
    // 4n·n₀ⁿ·log₂n₀, computed in log space so huge n stays finite when possible
    let log_exp = (4.0 * n as f64).log2() + n as f64 * lg + lg.log2();
    if log_exp > 1000.0 {
        return f64::INFINITY;
    }
    log_exp.exp2() + max_term
}

/// The same bound as an exact integer, or `None` when the exponent exceeds
/// 2²⁰ (the value would have more than a million bits per unit of `log₂n₀`).
pub fn nr_coefficient_bound_exact(n0: u64, n: u64, max_coeff: u64) -> Option<BigInt> {
    assert!(n0 >= 1 && n >= 1, "n0 and n must be positive");
    let mut e: u64 = 4u64.checked_mul(n)?;
    for _ in 0..n {
        e = e.checked_mul(n0)?;
    }
    if n0 > 1 && e > EXACT_EXPONENT_LIMIT {
        return None;
    }
    let base = BigInt::from(n0);
    let p: BigInt = if n0 == 1 { BigInt::one() } else { Pow::pow(&base, e) };
    Some(p * BigInt::from(max_coeff))
}

/// `log₂(L · Ñ^{4Ñ^{Ñ+1}})`: the 2-simplex count for a cycle of `L` edges in
/// a nerve of dimension and vertex count at most `Ñ`.
pub fn nr_term_count_bound(l: u64, n_tilde: u64) -> f64 {
    nr_coefficient_bound(n_tilde, n_tilde, l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(nr_coefficient_bound(1, 1, 1), 0.0);
        let b = nr_coefficient_bound(3, 2, 1);
        assert!((b - 72.0 * 3f64.log2()).abs() < 1e-9);
        assert!((b - 114.1).abs() < 0.05);
        let b = nr_coefficient_bound(2, 4, 5);
        assert!((b - (256.0 + 5f64.log2())).abs() < 1e-9);
    }

    #[test]
    fn exact_agrees_with_log() {
        for (n0, n, m) in [(3, 2, 1), (2, 4, 5), (2, 1, 7), (4, 2, 3)] {
            let exact = nr_coefficient_bound_exact(n0, n, m).unwrap();
            let lg = exact.bits() as f64 - 1.0;
            let approx = nr_coefficient_bound(n0, n, m);
            assert!((approx - lg).abs() < 1.0, "{n0} {n} {m}: {approx} vs {lg}");
        }
        assert_eq!(nr_coefficient_bound_exact(3, 2, 1).unwrap(), Pow::pow(&BigInt::from(3), 72u64));
    }
}
