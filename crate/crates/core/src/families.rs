//! Prime pairs `q x^k - r y^k = 1` and triples `q x^k - r y^k ∓ s z^k = 0`
//! that are everywhere locally soluble.
//!
//! Candidates are primes `≡ -1` modulo [`default_modulus`]. That congruence
//! alone does not settle every small prime, so every emitted family is
//! run through [`certify`] and only passing ones are kept.

use serde::Serialize;

use crate::arith::{is_prime, jacobi, primes_up_to, valuation, Factorization};
use crate::error::{invalid, Error, Result};
use crate::localsolve::{
    certify_with, lemma_threshold, Equation, FermatEquation, SearchOptions, SolubilityCertificate,
    ThueEquation,
};
use crate::par::{try_map, Parallelism};

fn check_degree(k: u32) -> Result<()> {
    if k < 3 {
        return invalid(format!("degree must be at least 3, got {k}"));
    }
    Ok(())
}

fn alpha(k: u32, p: u64) -> u32 {
    valuation(k as i128, p).map(|(e, _)| e).unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PaperModulus {
    pub k: u32,
    pub value: Factorization,
}

/// `∏_{p <= k^2 (k+1)^2} p^(2 α_p + 2)` with `p^α_p || k`, kept factored.
pub fn paper_modulus(k: u32) -> Result<PaperModulus> {
    check_degree(k)?;
    let value = Factorization::from_pairs(
        primes_up_to(lemma_threshold(k))
            .into_iter()
            .map(|p| (p, 2 * alpha(k, p) + 2)),
    )?;
    Ok(PaperModulus { k, value })
}

/// `lcm(4, ∏_{p | k} p^(2 α_p + 1))`.
pub fn default_modulus(k: u32) -> Result<u64> {
    check_degree(k)?;
    let mut m: u64 = 1;
    for p in crate::arith::factorize(k as i128)?.primes() {
        let e = 2 * alpha(k, p) + 1;
        m = p
            .checked_pow(e)
            .and_then(|v| m.checked_mul(v))
            .ok_or_else(|| Error::Overflow(format!("default modulus for k = {k}")))?;
    }
    let v2 = m.trailing_zeros();
    if v2 < 2 {
        m <<= 2 - v2;
    }
    Ok(m)
}

fn check_modulus(modulus: u64) -> Result<()> {
    if modulus == 0 || modulus % 4 != 0 {
        return invalid(format!(
            "modulus must be a positive multiple of 4, got {modulus}"
        ));
    }
    Ok(())
}

/// Primes `<= limit` that are `≡ -1 (mod modulus)`, ascending.
pub fn candidate_primes(modulus: u64, limit: u64) -> Result<Vec<u64>> {
    if modulus == 0 {
        return invalid("modulus must be positive");
    }
    let mut out = Vec::new();
    let mut n = modulus - 1;
    while n <= limit {
        if is_prime(n as i128) {
            out.push(n);
        }
        n = match n.checked_add(modulus) {
            Some(v) => v,
            None => break,
        };
    }
    Ok(out)
}

fn check_3_mod_4(ps: &[u64]) -> Result<()> {
    for (i, &p) in ps.iter().enumerate() {
        if !is_prime(p as i128) || p % 4 != 3 {
            return invalid(format!("{p} is not a prime ≡ 3 mod 4"));
        }
        if ps[..i].contains(&p) {
            return invalid(format!("{p} repeated"));
        }
    }
    Ok(())
}

/// Orders two distinct primes `≡ 3 mod 4` as `(q, r)` with `(q/r) = 1`.
pub fn orient_pair(p1: u64, p2: u64) -> Result<(u64, u64)> {
    check_3_mod_4(&[p1, p2])?;
    if jacobi(p1 as i128, p2 as i128)? == 1 {
        Ok((p1, p2))
    } else {
        Ok((p2, p1))
    }
}

/// Smallest index `i` with `(p_i/p_j) = (p_i/p_k)` for the other two
/// indices, or `None`.
pub fn is_good_triple(p1: u64, p2: u64, p3: u64) -> Result<Option<usize>> {
    let ps = [p1, p2, p3];
    check_3_mod_4(&ps)?;
    for i in 0..3 {
        let others: Vec<u64> = (0..3).filter(|&j| j != i).map(|j| ps[j]).collect();
        if jacobi(ps[i] as i128, others[0] as i128)? == jacobi(ps[i] as i128, others[1] as i128)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignCase {
    /// `(-rs/q) = (qs/r) = 1`; equation `q x^k - r y^k - s z^k = 0`.
    Alt1,
    /// `(-rs/q) = (qs/r) = -1`; equation `q x^k - r y^k + s z^k = 0`.
    Alt2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyPair {
    pub q: u64,
    pub r: u64,
    pub k: u32,
    pub modulus: u64,
    pub equation: ThueEquation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SolubilityCertificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyTriple {
    pub q: u64,
    pub r: u64,
    pub s: u64,
    pub k: u32,
    pub modulus: u64,
    pub sign_case: SignCase,
    pub equation: FermatEquation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SolubilityCertificate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamOptions {
    pub parallelism: Parallelism,
    pub search: SearchOptions,
    pub attach_certificates: bool,
}

impl Default for StreamOptions {
    fn default() -> Self {
        Self {
            parallelism: Parallelism::Parallel,
            search: SearchOptions::default(),
            attach_certificates: false,
        }
    }
}

/// Output of a bounded generator: what was found, and how much was asked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyRun<T> {
    pub items: Vec<T>,
    pub requested: usize,
}

impl<T> FamilyRun<T> {
    pub fn is_complete(&self) -> bool {
        self.items.len() >= self.requested
    }

    /// The items, or [`Error::Exhausted`] if fewer than requested were found.
    pub fn complete(self) -> Result<Vec<T>> {
        if self.is_complete() {
            Ok(self.items)
        } else {
            Err(Error::Exhausted {
                requested: self.requested,
                found: self.items.len(),
            })
        }
    }
}

const BATCH: usize = 64;

/// Certifies candidates in batches, keeping candidate order, until `count`
/// have passed.
fn certified_stream<C, T>(
    candidates: impl Iterator<Item = C>,
    count: usize,
    opts: &StreamOptions,
    build: impl Fn(&C) -> (Equation, T) + Sync + Send,
    attach: impl Fn(&mut T, SolubilityCertificate),
) -> Result<FamilyRun<T>>
where
    C: Sync + Send,
    T: Send,
{
    let mut items = Vec::new();
    let mut candidates = candidates.peekable();
    while items.len() < count && candidates.peek().is_some() {
        let batch: Vec<C> = candidates.by_ref().take(BATCH).collect();
        let checked = try_map(opts.parallelism, &batch, |c| {
            let (eq, item) = build(c);
            certify_with(&eq, &opts.search).map(|cert| (item, cert))
        })?;
        for (mut item, cert) in checked {
            if items.len() == count {
                break;
            }
            if cert.everywhere {
                if opts.attach_certificates {
                    attach(&mut item, cert);
                }
                items.push(item);
            }
        }
    }
    Ok(FamilyRun {
        items,
        requested: count,
    })
}

/// Candidate primes above the local threshold for `k`.
fn stream_primes(k: u32, modulus: u64, prime_limit: u64) -> Result<Vec<u64>> {
    check_degree(k)?;
    check_modulus(modulus)?;
    let t = lemma_threshold(k);
    Ok(candidate_primes(modulus, prime_limit)?
        .into_iter()
        .filter(|&p| p > t)
        .collect())
}

pub fn pair_stream(
    k: u32,
    modulus: u64,
    prime_limit: u64,
    count: usize,
) -> Result<FamilyRun<FamilyPair>> {
    pair_stream_with(k, modulus, prime_limit, count, &StreamOptions::default())
}

/// Pairs in order of their larger prime, then their smaller one.
pub fn pair_stream_with(
    k: u32,
    modulus: u64,
    prime_limit: u64,
    count: usize,
    opts: &StreamOptions,
) -> Result<FamilyRun<FamilyPair>> {
    let primes = stream_primes(k, modulus, prime_limit)?;
    let mut oriented = Vec::new();
    for j in 0..primes.len() {
        for i in 0..j {
            oriented.push(orient_pair(primes[i], primes[j])?);
        }
    }
    certified_stream(
        oriented.into_iter(),
        count,
        opts,
        |&(q, r)| {
            let equation = ThueEquation {
                a: q as i64,
                b: -(r as i64),
                k,
            };
            (
                equation.into(),
                FamilyPair {
                    q,
                    r,
                    k,
                    modulus,
                    equation,
                    certificate: None,
                },
            )
        },
        |item, cert| item.certificate = Some(cert),
    )
}

/// Labels a triple: `s` at the smallest good index, `q < r` the others,
/// and the sign case from `(-rs/q)`, which always equals `(qs/r)`.
pub fn label_triple(p1: u64, p2: u64, p3: u64) -> Result<Option<(u64, u64, u64, SignCase)>> {
    let ps = [p1, p2, p3];
    let Some(i) = is_good_triple(p1, p2, p3)? else {
        return Ok(None);
    };
    let s = ps[i];
    let mut rest: Vec<u64> = (0..3).filter(|&j| j != i).map(|j| ps[j]).collect();
    rest.sort_unstable();
    let (q, r) = (rest[0], rest[1]);
    let lhs = jacobi(-((r as i128) * (s as i128)), q as i128)?;
    let rhs = jacobi((q as i128) * (s as i128), r as i128)?;
    debug_assert_eq!(lhs, rhs);
    let case = if lhs == 1 {
        SignCase::Alt1
    } else {
        SignCase::Alt2
    };
    Ok(Some((q, r, s, case)))
}

pub fn triple_stream(
    k: u32,
    modulus: u64,
    prime_limit: u64,
    count: usize,
) -> Result<FamilyRun<FamilyTriple>> {
    triple_stream_with(k, modulus, prime_limit, count, &StreamOptions::default())
}

/// Triples in order of their largest prime, then the middle, then the
/// smallest.
pub fn triple_stream_with(
    k: u32,
    modulus: u64,
    prime_limit: u64,
    count: usize,
    opts: &StreamOptions,
) -> Result<FamilyRun<FamilyTriple>> {
    let primes = stream_primes(k, modulus, prime_limit)?;
    let mut labelled = Vec::new();
    for l in 0..primes.len() {
        for j in 0..l {
            for i in 0..j {
                if let Some(t) = label_triple(primes[i], primes[j], primes[l])? {
                    labelled.push(t);
                }
            }
        }
    }
    certified_stream(
        labelled.into_iter(),
        count,
        opts,
        |&(q, r, s, sign_case)| {
            let c = match sign_case {
                SignCase::Alt1 => -(s as i64),
                SignCase::Alt2 => s as i64,
            };
            let equation = FermatEquation {
                a: q as i64,
                b: -(r as i64),
                c,
                k,
            };
            let item = FamilyTriple {
                q,
                r,
                s,
                k,
                modulus,
                sign_case,
                equation,
                certificate: None,
            };
            (equation.into(), item)
        },
        |item, cert| item.certificate = Some(cert),
    )
}
