//! Small integer helpers shared by the order and cusp computations.

use num_integer::Integer;

use crate::Exponent;

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Positive divisors of `n >= 1`, ascending.
pub(crate) fn divisors(n: i64) -> Vec<i64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub(crate) fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `(prime, exponent)` pairs of `n >= 1`.
pub(crate) fn factorize(mut n: i64) -> Vec<(i64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// p-adic valuation of a nonzero integer.
pub(crate) fn nu(p: i64, mut n: i64) -> u32 {
    assert!(n != 0, "valuation of zero");
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    k
}

/// Second periodic Bernoulli polynomial `{x}^2 - {x} + 1/6`.
pub fn p2(x: Exponent) -> Exponent {
    let frac = x - x.floor();
    frac * frac - frac + Exponent::new(1, 6)
}

pub(crate) fn is_zero_mod(x: Exponent, m: i64) -> bool {
    (x / Exponent::from_integer(m)).is_integer()
}
