//! Primality testing, sieving and factorization.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Bases that make Miller-Rabin deterministic for every `n < 2^64`.
const MR_BASES_64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Additional bases used above 2^64, where the test is probabilistic with
/// error at most 4^-24 per composite.
const MR_BASES_WIDE: [u64; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;
const RHO_ITERATIONS: u64 = 1 << 22;

/// Prime factorization as an ordered map from prime to exponent.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
#[serde(transparent)]
pub struct Factorization {
    factors: BTreeMap<u64, u32>,
}

impl Factorization {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a factorization from explicit pairs. Zero exponents are dropped;
    /// non-prime keys are rejected.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u32)>) -> Result<Self> {
        let mut f = Self::new();
        for (p, e) in pairs {
            if !is_prime(p as i128) {
                return Err(Error::InvalidInput(format!("{p} is not prime")));
            }
            f.insert(p, e);
        }
        Ok(f)
    }

    pub(crate) fn insert(&mut self, p: u64, e: u32) {
        if e > 0 {
            *self.factors.entry(p).or_insert(0) += e;
        }
    }

    pub fn exponent(&self, p: u64) -> u32 {
        self.factors.get(&p).copied().unwrap_or(0)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.factors.iter().map(|(&p, &e)| (p, e))
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The product, or `None` if it does not fit in a `u128`.
    pub fn value(&self) -> Option<u128> {
        self.iter().try_fold(1u128, |acc, (p, e)| {
            acc.checked_mul((p as u128).checked_pow(e)?)
        })
    }

    /// log10 of the product; usable when [`Self::value`] overflows.
    pub fn log10(&self) -> f64 {
        self.iter()
            .map(|(p, e)| e as f64 * (p as f64).log10())
            .sum()
    }
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

pub fn is_prime(n: i128) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u128;
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    if n <= u64::MAX as u128 {
        return MR_BASES_64
            .iter()
            .all(|&a| miller_rabin_round(n, a as u128, mul_mod_u128_narrow));
    }
    // Wide inputs: trial division to the budget, then probabilistic rounds.
    let mut d = 41u128;
    while d <= TRIAL_DIVISION_LIMIT as u128 && d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    MR_BASES_WIDE
        .iter()
        .all(|&a| miller_rabin_round(n, a as u128, mul_mod_u128_wide))
}

fn mul_mod_u128_narrow(a: u128, b: u128, m: u128) -> u128 {
    a * b % m
}

/// Overflow-free modular product for moduli up to 2^127.
fn mul_mod_u128_wide(mut a: u128, mut b: u128, m: u128) -> u128 {
    a %= m;
    b %= m;
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod(acc, a, m);
        }
        a = add_mod(a, a, m);
        b >>= 1;
    }
    acc
}

fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

fn pow_mod_with(mut b: u128, mut e: u128, m: u128, mul: fn(u128, u128, u128) -> u128) -> u128 {
    let mut acc = 1u128 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, b, m);
        }
        b = mul(b, b, m);
        e >>= 1;
    }
    acc
}

fn miller_rabin_round(n: u128, a: u128, mul: fn(u128, u128, u128) -> u128) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod_with(a, d, n, mul);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Factors `|n|` by trial division up to 10^6, then Brent's variant of
/// Pollard rho on the remaining cofactor.
pub fn factorize(n: i128) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::InvalidInput("cannot factor 0".into()));
    }
    let mut m = n.unsigned_abs();
    let mut f = Factorization::new();
    let mut d = 2u128;
    while d <= TRIAL_DIVISION_LIMIT as u128 && d * d <= m {
        if m % d == 0 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            f.insert(d as u64, e);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        split_large(m, &mut f, n)?;
    }
    Ok(f)
}

fn split_large(m: u128, f: &mut Factorization, original: i128) -> Result<()> {
    if is_prime(m as i128) {
        if m > u64::MAX as u128 {
            return Err(Error::FactorizationBudget(original));
        }
        f.insert(m as u64, 1);
        return Ok(());
    }
    let d = pollard_brent(m).ok_or(Error::FactorizationBudget(original))?;
    split_large(d, f, original)?;
    split_large(m / d, f, original)
}

fn pollard_brent(n: u128) -> Option<u128> {
    let mul: fn(u128, u128, u128) -> u128 = if n <= u64::MAX as u128 {
        mul_mod_u128_narrow
    } else {
        mul_mod_u128_wide
    };
    for c in 1..20u128 {
        let step = |x: u128| add_mod(mul(x, x, n), c, n);
        let (mut y, mut r, mut q) = (2u128, 1u64, 1u128);
        let (mut x, mut ys);
        let mut g;
        let mut iters = 0u64;
        loop {
            x = y;
            for _ in 0..r {
                y = step(y);
            }
            let mut k = 0;
            loop {
                ys = y;
                let batch = 128.min(r - k);
                for _ in 0..batch {
                    y = step(y);
                    q = mul(q, x.abs_diff(y), n);
                }
                g = gcd_u128(q, n);
                k += batch;
                iters += batch;
                if k >= r || g != 1 {
                    break;
                }
            }
            r *= 2;
            if g != 1 || iters > RHO_ITERATIONS {
                break;
            }
        }
        if g == n {
            loop {
                ys = step(ys);
                g = gcd_u128(x.abs_diff(ys), n);
                if g != 1 {
                    break;
                }
            }
        }
        if g != 1 && g != n {
            return Some(g);
        }
    }
    None
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
