//! k-th power residues modulo a prime and p-adic unit k-th powers.

use super::{gcd, is_prime, pow_mod, prime_power, valuation};
use crate::error::{invalid, Result};

/// Membership table of `{x^k mod p : 0 <= x < p}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueTable {
    modulus: u64,
    degree: u32,
    members: Vec<bool>,
}

impl ResidueTable {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn contains(&self, x: i128) -> bool {
        self.members[x.rem_euclid(self.modulus as i128) as usize]
    }

    /// Number of distinct k-th powers, including 0.
    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| i as u64)
    }
}

pub fn kth_power_residues(p: u64, k: u32) -> Result<ResidueTable> {
    if !is_prime(p as i128) {
        return invalid(format!("{p} is not prime"));
    }
    let mut members = vec![false; p as usize];
    for x in 0..p {
        members[pow_mod(x as i128, k as u64, p as i128) as usize] = true;
    }
    Ok(ResidueTable {
        modulus: p,
        degree: k,
        members,
    })
}

/// Some `x` with `x^k ≡ a (mod p)`, or `None` when `a` is not a k-th power.
///
/// When `gcd(k, p-1) = 1` the unique root `a^(k^-1 mod p-1)` is returned;
/// otherwise the smallest positive root.
pub fn kth_root_mod(a: i128, k: u32, p: u64) -> Result<Option<u64>> {
    if k == 0 {
        return invalid("degree must be positive");
    }
    let pm = p as i128;
    if a.rem_euclid(pm) == 0 {
        return invalid(format!("{p} divides {a}"));
    }
    let a = a.rem_euclid(pm);
    if p == 2 {
        return Ok(Some(1));
    }
    let g = gcd(k as i128, pm - 1);
    if pow_mod(a, ((pm - 1) / g) as u64, pm) != 1 {
        return Ok(None);
    }
    if g == 1 {
        let inv = super::inv_mod(k as i128, pm - 1).expect("k is invertible mod p-1");
        return Ok(Some(pow_mod(a, inv as u64, pm) as u64));
    }
    Ok((1..p).find(|&x| pow_mod(x as i128, k as u64, pm) == a))
}

/// Exponent `e` such that being a k-th power of a unit in `Z_p` is decided
/// modulo `p^e`: `2α+1` for odd `p` and `2α+3` for `p = 2`, with
/// `α = v_p(k)`.
pub fn unit_power_precision(k: u32, p: u64) -> u32 {
    let alpha = valuation(k as i128, p).map(|(e, _)| e).unwrap_or(0);
    if p == 2 {
        2 * alpha + 3
    } else {
        2 * alpha + 1
    }
}

/// A unit `x` with `x^k ≡ u (mod p^e)`, `e` from [`unit_power_precision`].
/// Every such residue lifts to an exact k-th root in `Z_p`.
pub fn unit_kth_root_zp(u: i128, k: u32, p: u64) -> Result<Option<i128>> {
    if k == 0 {
        return invalid("degree must be positive");
    }
    if u.rem_euclid(p as i128) == 0 {
        return invalid(format!("{p} divides {u}; not a unit"));
    }
    let e = unit_power_precision(k, p);
    if e == 1 && p != 2 {
        return Ok(kth_root_mod(u, k, p)?.map(|x| x as i128));
    }
    let m = prime_power(p, e)?;
    let target = u.rem_euclid(m);
    let pm = p as i128;
    Ok((1..m)
        .filter(|x| x % pm != 0)
        .find(|&x| pow_mod(x, k as u64, m) == target))
}

/// Whether `u` (a p-adic unit) is the k-th power of a unit in `Z_p`.
pub fn unit_kth_power_in_zp(u: i128, k: u32, p: u64) -> Result<bool> {
    if k == 0 {
        return invalid("degree must be positive");
    }
    let pm = p as i128;
    if u.rem_euclid(pm) == 0 {
        return invalid(format!("{p} divides {u}; not a unit"));
    }
    if p != 2 && (k as u64) % p != 0 {
        let g = gcd(k as i128, pm - 1);
        return Ok(pow_mod(u, ((pm - 1) / g) as u64, pm) == 1);
    }
    Ok(unit_kth_root_zp(u, k, p)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{jacobi, primes_up_to};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn residue_table_examples() {
        let t = kth_power_residues(7, 3).unwrap();
        assert_eq!(t.iter().collect::<Vec<_>>(), vec![0, 1, 6]);
        let t = kth_power_residues(5, 2).unwrap();
        assert_eq!(t.iter().collect::<Vec<_>>(), vec![0, 1, 4]);
        let t = kth_power_residues(13, 1).unwrap();
        assert_eq!(t.len(), 13);
        assert!(kth_power_residues(15, 2).is_err());
    }

    #[test]
    fn residue_table_size_formula() {
        for p in primes_up_to(1000) {
            for k in 1..=12u32 {
                let t = kth_power_residues(p, k).unwrap();
                let expected = 1 + (p - 1) / gcd(k as i128, p as i128 - 1) as u64;
                assert_eq!(t.len() as u64, expected, "p={p} k={k}");
                assert!(t.contains(0) && t.contains(1));
            }
        }
    }

    #[test]
    fn kth_root_mod_examples() {
        assert_eq!(kth_root_mod(3, 6, 11).unwrap(), Some(3));
        assert_eq!(kth_root_mod(5, 3, 11).unwrap(), Some(3));
        assert_eq!(kth_root_mod(1, 4, 13).unwrap(), Some(1));
        assert_eq!(kth_root_mod(2, 2, 5).unwrap(), None);
        assert!(kth_root_mod(22, 3, 11).is_err());
    }

    #[test]
    fn kth_root_exists_under_residue_hypotheses() {
        // p odd, p ≡ -1 mod k, (a/p) = 1 always admits a k-th root.
        for p in primes_up_to(500).into_iter().filter(|&p| p > 2) {
            for k in 1..=12u32 {
                if (p + 1) % k as u64 != 0 {
                    continue;
                }
                for a in 1..p as i128 {
                    if jacobi(a, p as i128).unwrap() == 1 {
                        let x = kth_root_mod(a, k, p).unwrap().expect("root must exist");
                        assert_eq!(pow_mod(x as i128, k as u64, p as i128), a);
                    }
                }
            }
        }
    }

    #[test]
    fn unit_power_examples() {
        assert!(unit_kth_power_in_zp(17, 2, 2).unwrap());
        assert!(!unit_kth_power_in_zp(3, 2, 2).unwrap());
        assert!(unit_kth_power_in_zp(2, 3, 5).unwrap());
        assert!(unit_kth_power_in_zp(10, 3, 5).is_err());
        assert_eq!(unit_power_precision(4, 2), 7);
        assert_eq!(unit_power_precision(3, 3), 3);
        assert_eq!(unit_power_precision(3, 7), 1);
    }

    /// Is `u` a k-th power of a unit modulo `p^exp`, by enumeration.
    fn power_mod_oracle(u: i128, k: u32, p: u64, exp: u32) -> bool {
        let m = (p as i128).pow(exp);
        let t = u.rem_euclid(m);
        (1..m).any(|x| x % p as i128 != 0 && pow_mod(x, k as u64, m) == t)
    }

    #[test]
    fn unit_power_agrees_with_higher_precision_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in primes_up_to(50) {
            for k in 1..=8u32 {
                let alpha = valuation(k as i128, p).unwrap().0;
                let exp = 2 * alpha + 3;
                if (p as f64).powi(exp as i32) > 3.0e5 {
                    continue;
                }
                for _ in 0..12 {
                    let mut u: i128 = rng.gen_range(-10_000..10_000);
                    if u % p as i128 == 0 {
                        u += 1;
                    }
                    assert_eq!(
                        unit_kth_power_in_zp(u, k, p).unwrap(),
                        power_mod_oracle(u, k, p, exp),
                        "u={u} k={k} p={p}"
                    );
                }
            }
        }
    }
}
