//! Small exact combinatorics helpers shared by the cloning and Fock modules.

/// Binomial coefficient as exact unsigned arithmetic.
///
/// Panics on overflow; desk-scale inputs (n of a few hundred, small k) stay
/// far below the u128 limit.
pub fn binomial_exact(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u128)
            .expect("binomial_exact overflow");
        acc /= (i + 1) as u128;
    }
    acc
}

/// Binomial coefficient as f64, exact whenever the value fits in 2^53.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let v = binomial_exact(n, k);
    if v <= (1u128 << 53) {
        v as f64
    } else {
        // Multiplicative form keeps relative error at a few ulps.
        let k = k.min(n - k);
        (0..k).fold(1.0_f64, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }
}

/// Exact equality of two fractions a/b == c/d with b, d > 0.
pub fn fractions_equal(a: i128, b: i128, c: i128, d: i128) -> bool {
    assert!(b > 0 && d > 0);
    a * d == c * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binomial_exact(0, 0), 1);
        assert_eq!(binomial_exact(5, 2), 10);
        assert_eq!(binomial_exact(10, 10), 1);
        assert_eq!(binomial_exact(10, 11), 0);
        assert_eq!(binomial(404, 3), 10_908_404.0);
    }

    #[test]
    fn hockey_stick() {
        // sum_{i=0..l} C(m+i, m) = C(m+l+1, l)
        for m in 0..6u64 {
            for l in 0..6u64 {
                let lhs: u128 = (0..=l).map(|i| binomial_exact(m + i, m)).sum();
                assert_eq!(lhs, binomial_exact(m + l + 1, l));
            }
        }
    }

    #[test]
    fn fraction_compare() {
        assert!(fractions_equal(5, 6, 10, 12));
        assert!(!fractions_equal(5, 6, 5, 8));
    }
}
