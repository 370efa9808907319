use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Rational;

fn cache() -> &'static RwLock<HashMap<(i64, i64), BigInt>> {
    static CACHE: OnceLock<RwLock<HashMap<(i64, i64), BigInt>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// C(n, k) extended by zero outside `0 <= k <= n`.
pub fn binomial_int(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    if k == 0 {
        return BigInt::one();
    }
    if let Some(v) = cache().read().unwrap().get(&(n, k)) {
        return v.clone();
    }
    // multiplicative formula; each partial product is itself a binomial, so the division is exact
    let mut acc = BigInt::one();
    for i in 1..=k {
        acc = acc * BigInt::from(n - k + i) / BigInt::from(i);
    }
    cache().write().unwrap().insert((n, k), acc.clone());
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: i64, k: i64) -> Rational {
    Rational::from_integer(binomial_int(n, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Pascal-triangle rows built by addition only.
    fn pascal(rows: usize) -> Vec<Vec<BigInt>> {
        let mut t: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
        for n in 1..rows {
            let prev = &t[n - 1];
            let mut row = vec![BigInt::one(); n + 1];
            for k in 1..n {
                row[k] = &prev[k - 1] + &prev[k];
            }
            t.push(row);
        }
        t
    }

    #[test]
    fn small_values() {
        assert_eq!(binomial(3, 2), Rational::from_integer(3.into()));
        assert_eq!(binomial(2, -1), Rational::zero());
        assert_eq!(binomial(-2, 1), Rational::zero());
        assert_eq!(binomial(2, 3), Rational::zero());
    }

    #[test]
    fn matches_pascal_triangle() {
        let t = pascal(41);
        for (n, row) in t.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                assert_eq!(&binomial_int(n as i64, k as i64), v, "C({n},{k})");
            }
        }
        // C(2j+1, j+1) at j = 11
        assert_eq!(t[23][12], BigInt::from(1_352_078));
        assert_eq!(binomial_int(23, 12), BigInt::from(1_352_078));
    }

    #[test]
    fn row_sums_are_powers_of_two() {
        for n in 0..64i64 {
            let s: BigInt = (0..=n).map(|k| binomial_int(n, k)).sum();
            assert_eq!(s, BigInt::one() << n);
        }
    }

    proptest! {
        #[test]
        fn pascal_rule_with_zero_extension(n in -5i64..60, k in -5i64..65) {
            // the only failure of the zero-extended recurrence is at C(0, 0)
            prop_assume!(!(n == 0 && k == 0));
            let rhs = binomial_int(n - 1, k - 1) + binomial_int(n - 1, k);
            prop_assert_eq!(binomial_int(n, k), rhs);
        }
    }

    #[test]
    fn concurrent_access() {
        let pick = |t: i64| (0..200).map(move |n| (n, (n / 2 + t) % (n + 1)));
        let handles: Vec<_> = (0..8)
            .map(|t| std::thread::spawn(move || pick(t).map(|(n, k)| binomial_int(n, k)).collect::<Vec<_>>()))
            .collect();
        for (t, h) in handles.into_iter().enumerate() {
            let got = h.join().unwrap();
            let again: Vec<_> = pick(t as i64).map(|(n, k)| binomial_int(n, k)).collect();
            assert_eq!(got, again);
        }
        assert_eq!(binomial_int(100, 50).to_string(), "100891344545564193334812497256");
    }
}
