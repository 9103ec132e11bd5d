#![allow(dead_code)]

use std::collections::HashMap;

use hasse_core::localsolve::{completeness_exponent, hensel_witness_valid, Equation, ThueEquation};

fn pow_mod(x: i128, k: u32, m: i128) -> i128 {
    let mut acc = 1i128;
    for _ in 0..k {
        acc = acc * x % m;
    }
    acc
}

/// Whether `a x^k + b y^k = 1` has a point modulo `p^(2 n0 + 1)` that is a
/// valid Hensel witness, by enumerating every residue pair. The pairs are
/// joined on `b y^k` so the cost is linear in the modulus.
pub fn thue_witness_oracle(a: i64, b: i64, k: u32, p: u64) -> bool {
    let eq: Equation = ThueEquation::new(a, b, k).unwrap().into();
    let exp = completeness_exponent(&eq, p).unwrap();
    let m = (p as i128).pow(exp);
    assert!(m <= 50_000_000, "oracle modulus {m} too large");
    let mut by_value: HashMap<i128, Vec<i64>> = HashMap::new();
    for y in 0..m {
        let v = (b as i128).rem_euclid(m) * pow_mod(y, k, m) % m;
        by_value.entry(v).or_default().push(y as i64);
    }
    for x in 0..m {
        let need = (1 - (a as i128).rem_euclid(m) * pow_mod(x, k, m) % m).rem_euclid(m);
        if let Some(ys) = by_value.get(&need) {
            if ys
                .iter()
                .any(|&y| hensel_witness_valid(&eq, &[x as i64, y], p).is_some())
            {
                return true;
            }
        }
    }
    false
}

pub fn nonzero(rng: &mut impl rand::Rng, bound: i64) -> i64 {
    loop {
        let v = rng.gen_range(-bound..=bound);
        if v != 0 {
            return v;
        }
    }
}
