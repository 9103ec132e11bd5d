//! Exact integer and modular arithmetic.
//!
//! Everything works on `i128`/`u64` values. Moduli handed to the modular
//! helpers must stay below 2^62 so that a product of two reduced residues
//! fits in an `i128` without overflow.

mod primes;
mod residues;

pub use primes::{factorize, is_prime, primes_up_to, Factorization};
pub use residues::{
    kth_power_residues, kth_root_mod, unit_kth_power_in_zp, unit_kth_root_zp, unit_power_precision,
    ResidueTable,
};

use crate::error::{invalid, Error, Result};

/// Largest modulus accepted by [`mul_mod`] and [`pow_mod`].
pub const MAX_MODULUS: i128 = 1 << 62;

/// Extended Euclid: returns `(g, u, v)` with `g = gcd(a, b) > 0` and
/// `u*a + v*b = g`.
pub fn egcd(a: i128, b: i128) -> Result<(i128, i128, i128)> {
    if a == 0 && b == 0 {
        return invalid("egcd(0, 0) is undefined");
    }
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        Ok((-old_r, -old_s, -old_t))
    } else {
        Ok((old_r, old_s, old_t))
    }
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i128, n: i128) -> Result<i8> {
    if n <= 0 || n % 2 == 0 {
        return invalid(format!("jacobi symbol needs odd positive modulus, got {n}"));
    }
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// Splits `n = p^e * cofactor` with `p` not dividing the cofactor.
pub fn valuation(n: i128, p: u64) -> Result<(u32, i128)> {
    if n == 0 {
        return invalid("valuation of 0 is infinite");
    }
    if p < 2 {
        return invalid(format!("valuation base must be prime, got {p}"));
    }
    let p = p as i128;
    let (mut e, mut m) = (0u32, n);
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    Ok((e, m))
}

/// `v_p(n)`, with the zero case mapped to `u32::MAX`.
pub(crate) fn val_or_inf(n: i128, p: u64) -> u32 {
    valuation(n, p).map(|(e, _)| e).unwrap_or(u32::MAX)
}

/// Product of the distinct primes dividing `n`; `radical(±1) = 1`.
pub fn radical(n: i128) -> Result<i128> {
    if n == 0 {
        return invalid("radical of 0 is undefined");
    }
    let f = factorize(n)?;
    Ok(f.primes().map(|p| p as i128).product())
}

/// Exact `x` with `x^k = n`, if one exists. For even `k` the nonnegative root
/// is returned.
pub fn integer_kth_root(n: i128, k: u32) -> Option<i128> {
    if k == 0 {
        return None;
    }
    if k == 1 {
        return Some(n);
    }
    if n < 0 {
        if k % 2 == 0 {
            return None;
        }
        return integer_kth_root(-n, k).map(|r| -r);
    }
    if n < 2 {
        return Some(n);
    }
    let guess = (n as f64).powf(1.0 / k as f64).round() as i128;
    for cand in guess.saturating_sub(2).max(0)..=guess + 2 {
        match checked_pow(cand, k) {
            Some(v) if v == n => return Some(cand),
            _ => {}
        }
    }
    None
}

pub fn checked_pow(base: i128, exp: u32) -> Option<i128> {
    base.checked_pow(exp)
}

/// `p^e` as an `i128`, failing on overflow or when the result exceeds
/// [`MAX_MODULUS`].
pub fn prime_power(p: u64, e: u32) -> Result<i128> {
    match (p as i128).checked_pow(e) {
        Some(m) if m <= MAX_MODULUS => Ok(m),
        _ => Err(Error::Overflow(format!(
            "{p}^{e} exceeds the modulus range"
        ))),
    }
}

#[inline]
pub fn mul_mod(a: i128, b: i128, m: i128) -> i128 {
    debug_assert!(m > 0 && m <= MAX_MODULUS);
    (a.rem_euclid(m) * b.rem_euclid(m)).rem_euclid(m)
}

pub fn pow_mod(base: i128, mut exp: u64, m: i128) -> i128 {
    if m == 1 {
        return 0;
    }
    let mut b = base.rem_euclid(m);
    let mut acc = 1i128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let (g, u, _) = egcd(a.rem_euclid(m), m).ok()?;
    (g == 1).then(|| u.rem_euclid(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn egcd_examples() {
        assert_eq!(egcd(240, 46).unwrap(), (2, -9, 47));
        assert_eq!(egcd(7, 0).unwrap(), (7, 1, 0));
        assert_eq!(egcd(7, 3).unwrap(), (1, 1, -2));
        assert!(egcd(0, 0).is_err());
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(2, 7).unwrap(), 1);
        assert_eq!(jacobi(3, 7).unwrap(), -1);
        assert_eq!(jacobi(6, 3).unwrap(), 0);
        assert!(jacobi(3, 8).is_err());
        assert!(jacobi(3, -7).is_err());
        assert_eq!(jacobi(5, 1).unwrap(), 1);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(48, 2).unwrap(), (4, 3));
        assert_eq!(valuation(5, 7).unwrap(), (0, 5));
        assert_eq!(valuation(-54, 3).unwrap(), (3, -2));
        assert!(valuation(0, 3).is_err());
    }

    #[test]
    fn radical_examples() {
        assert_eq!(radical(360).unwrap(), 30);
        assert_eq!(radical(1).unwrap(), 1);
        assert_eq!(radical(-1).unwrap(), 1);
        assert_eq!(radical(128).unwrap(), 2);
        assert!(radical(0).is_err());
    }

    #[test]
    fn kth_root_examples() {
        assert_eq!(integer_kth_root(729, 3), Some(9));
        assert_eq!(integer_kth_root(80, 4), None);
        assert_eq!(integer_kth_root(-27, 3), Some(-3));
        assert_eq!(integer_kth_root(-16, 4), None);
        assert_eq!(integer_kth_root(0, 5), Some(0));
        assert_eq!(integer_kth_root(1 << 100, 4), Some(1 << 25));
        assert_eq!(integer_kth_root((1 << 100) + 1, 4), None);
    }

    /// Legendre symbol by enumerating squares.
    fn legendre_oracle(a: i128, p: i128) -> i8 {
        let a = a.rem_euclid(p);
        if a == 0 {
            return 0;
        }
        if (1..p).any(|x| x * x % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn jacobi_matches_square_enumeration_below_500() {
        for p in primes_up_to(500).into_iter().filter(|&p| p > 2) {
            let p = p as i128;
            for a in 0..p {
                assert_eq!(jacobi(a, p).unwrap(), legendre_oracle(a, p), "({a}/{p})");
            }
        }
    }

    proptest! {
        #[test]
        fn egcd_identity(a in -1_000_000_000i128..1_000_000_000, b in -1_000_000_000i128..1_000_000_000) {
            prop_assume!(a != 0 || b != 0);
            let (g, u, v) = egcd(a, b).unwrap();
            prop_assert!(g > 0);
            prop_assert_eq!(u * a + v * b, g);
            prop_assert_eq!(a % g, 0);
            prop_assert_eq!(b % g, 0);
        }

        #[test]
        fn jacobi_multiplicative(a in -5000i128..5000, b in -5000i128..5000, n in 0i128..2000, m in 0i128..2000) {
            let n = 2 * n + 1;
            let m = 2 * m + 1;
            prop_assert_eq!(jacobi(a * b, n).unwrap(), jacobi(a, n).unwrap() * jacobi(b, n).unwrap());
            prop_assert_eq!(jacobi(a, n * m).unwrap(), jacobi(a, n).unwrap() * jacobi(a, m).unwrap());
        }

        #[test]
        fn quadratic_reciprocity(m in 1i128..5000, n in 1i128..5000) {
            let (m, n) = (2 * m + 1, 2 * n + 1);
            prop_assume!(gcd(m, n) == 1);
            let lhs = jacobi(m, n).unwrap() * jacobi(n, m).unwrap();
            let rhs = if (m - 1) / 2 % 2 == 1 && (n - 1) / 2 % 2 == 1 { -1 } else { 1 };
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn radical_multiplicative(m in 1i128..200_000, n in 1i128..200_000) {
            prop_assume!(gcd(m, n) == 1);
            prop_assert_eq!(radical(m * n).unwrap(), radical(m).unwrap() * radical(n).unwrap());
        }

        #[test]
        fn integer_root_roundtrip(x in -100_000i128..100_000, k in 1u32..7) {
            let n = x.pow(k);
            let r = integer_kth_root(n, k).unwrap();
            prop_assert_eq!(r.pow(k), n);
        }
    }
}
