//! Solubility over the reals and over every `Z_p`, with certificates.

mod cache;
mod equation;
mod search;
mod witness;

use serde::{Deserialize, Serialize};

pub use cache::{VerdictCache, CACHE_FORMAT_VERSION};
pub use equation::{Equation, FermatEquation, ThueEquation};
pub use witness::{hensel_witness_valid, HenselWitness};

use crate::arith::{factorize, gcd, is_prime, primes_up_to, val_or_inf};
use crate::error::{invalid, Error, Result};
use equation::DiagonalForm;
use search::Counter;

/// Hard cap on candidate evaluations per `(equation, prime)`.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// `k^2 (k+1)^2`: above this bound a prime not dividing `k` or any
/// coefficient always admits a nonsingular zero modulo `p`.
pub fn lemma_threshold(k: u32) -> u64 {
    let k = k as u64;
    k * k * (k + 1) * (k + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Shortcuts where they apply, residue search otherwise.
    #[default]
    Auto,
    /// Residue search at every prime, no shortcuts.
    ResidueSearch,
    /// Level-by-level enumeration of all residue points modulo
    /// `p^(2 n0 + 1)`, no shortcuts.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub strategy: Strategy,
    pub budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            strategy: Strategy::Auto,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    AutomaticLargePrime,
    SurjectivityShortcut,
    ResidueSearch,
    ExhaustiveHensel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalVerdict {
    pub p: u64,
    pub soluble: bool,
    pub method: Method,
    pub witness: Option<HenselWitness>,
    /// The p-power whose residues were searched. For residue search this is
    /// the largest `p^(β+e)` over the unit cases; for exhaustive search
    /// `p^(2 n0 + 1)`.
    pub search_modulus: u64,
}

/// Everywhere-local solubility proof object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolubilityCertificate {
    pub equation: Equation,
    pub real: bool,
    pub threshold: u64,
    pub primes: Vec<LocalVerdict>,
    pub everywhere: bool,
}

pub fn real_soluble(eq: &Equation) -> bool {
    if eq.k() % 2 == 1 {
        return true;
    }
    let c = eq.coefficients();
    match eq {
        Equation::Thue(_) => c.iter().any(|&x| x > 0),
        Equation::Fermat(_) => !(c.iter().all(|&x| x > 0) || c.iter().all(|&x| x < 0)),
    }
}

/// The primes at which local solubility is not automatic: every prime up to
/// [`lemma_threshold`] and every prime dividing a coefficient.
pub fn prime_checklist(eq: &Equation) -> Result<Vec<u64>> {
    let mut primes = primes_up_to(lemma_threshold(eq.k()));
    for c in eq.coefficients() {
        primes.extend(factorize(c as i128)?.primes());
    }
    primes.sort_unstable();
    primes.dedup();
    Ok(primes)
}

fn coefficient_product_divisible(eq: &Equation, p: u64) -> bool {
    eq.coefficients()
        .iter()
        .any(|&c| c as i128 % p as i128 == 0)
}

/// The shortcut that settles `p` without search, if any. Both shortcuts
/// always answer "soluble".
pub(crate) fn shortcut(eq: &Equation, p: u64) -> Option<Method> {
    let k = eq.k();
    if (k as u64) % p == 0 || coefficient_product_divisible(eq, p) {
        return None;
    }
    if p > lemma_threshold(k) {
        return Some(Method::AutomaticLargePrime);
    }
    if p != 2 && gcd(k as i128, p as i128 - 1) <= 2 {
        return Some(Method::SurjectivityShortcut);
    }
    None
}

fn search_form(eq: &Equation, p: u64) -> Result<(DiagonalForm, Option<search::Normalized>)> {
    let form = eq.form();
    if eq.is_homogeneous() {
        let norm = search::normalize(&form, p)?;
        Ok((norm.form.clone(), Some(norm)))
    } else {
        Ok((form, None))
    }
}

fn to_witness(point: Vec<i128>, eq: &Equation, p: u64) -> Result<HenselWitness> {
    let point = point
        .into_iter()
        .map(|x| i64::try_from(x).map_err(|_| Error::Overflow(format!("witness coordinate {x}"))))
        .collect::<Result<Vec<i64>>>()?;
    let n = hensel_witness_valid(eq, &point, p).ok_or_else(|| {
        Error::InvalidInput(format!(
            "internal: constructed witness {point:?} invalid at p = {p}"
        ))
    })?;
    Ok(HenselWitness { point, n })
}

/// Decides solubility of `eq` in `Z_p` (Thue) or nontrivial solubility in
/// `Q_p` (Fermat), returning a replayable verdict.
pub fn local_verdict(eq: &Equation, p: u64, opts: &SearchOptions) -> Result<LocalVerdict> {
    eq.validate()?;
    if !is_prime(p as i128) {
        return invalid(format!("{p} is not prime"));
    }
    let original = eq.form();
    let (form, norm) = search_form(eq, p)?;
    let mut counter = Counter::new(opts.budget, p);
    let lift = |pt: Vec<i128>| -> Result<HenselWitness> {
        let pt = match &norm {
            Some(norm) => search::denormalize_witness(&original, norm, &pt, p)?,
            None => pt,
        };
        to_witness(pt, eq, p)
    };

    if opts.strategy == Strategy::Exhaustive {
        let exponent = 2 * search::completeness_n0(&form, p) + 1;
        let modulus = crate::arith::prime_power(p, exponent)?;
        let found = search::exhaustive_witness(&form, p, exponent, &mut counter)?;
        return Ok(LocalVerdict {
            p,
            soluble: found.is_some(),
            method: Method::ExhaustiveHensel,
            witness: found.map(lift).transpose()?,
            search_modulus: modulus as u64,
        });
    }

    let method = match (opts.strategy, shortcut(eq, p)) {
        (Strategy::Auto, Some(m)) => m,
        _ => Method::ResidueSearch,
    };
    let outcome = search::residue_search(&form, p, &mut counter)?;
    if method != Method::ResidueSearch && outcome.hit.is_none() {
        return Err(Error::InvalidInput(format!(
            "internal: shortcut at p = {p} contradicted by residue search for {eq}"
        )));
    }
    let witness = match outcome.hit {
        Some(hit) => Some(lift(search::witness_from_hit(&form, &hit, p)?)?),
        None => None,
    };
    Ok(LocalVerdict {
        p,
        soluble: witness.is_some(),
        method,
        witness,
        search_modulus: outcome.modulus as u64,
    })
}

/// Boolean local decision without witness construction; what the census
/// caches.
pub(crate) fn decide_local(eq: &Equation, p: u64, budget: u64) -> Result<bool> {
    if shortcut(eq, p).is_some() {
        return Ok(true);
    }
    let (form, _) = search_form(eq, p)?;
    let mut counter = Counter::new(budget, p);
    Ok(search::residue_search(&form, p, &mut counter)?
        .hit
        .is_some())
}

pub fn thue_local(eq: &ThueEquation, p: u64, budget: u64) -> Result<LocalVerdict> {
    local_verdict(
        &(*eq).into(),
        p,
        &SearchOptions {
            budget,
            ..Default::default()
        },
    )
}

pub fn fermat_local(eq: &FermatEquation, p: u64, budget: u64) -> Result<LocalVerdict> {
    local_verdict(
        &(*eq).into(),
        p,
        &SearchOptions {
            budget,
            ..Default::default()
        },
    )
}

/// Searches every primitive residue point modulo `p^exponent` and returns
/// the first (lexicographically) valid Hensel witness, if any. With
/// `exponent = 2 n0 + 1` this is the complete exhaustive decision; smaller
/// exponents give a partial search. Fermat equations are searched in the
/// normalized coordinates, so the witness is returned only when the
/// normalization is trivial or the witness can be carried back.
pub fn exhaustive_witness_search(
    eq: &Equation,
    p: u64,
    exponent: u32,
    budget: u64,
) -> Result<Option<HenselWitness>> {
    eq.validate()?;
    if !is_prime(p as i128) {
        return invalid(format!("{p} is not prime"));
    }
    let original = eq.form();
    let (form, norm) = search_form(eq, p)?;
    let mut counter = Counter::new(budget, p);
    let Some(pt) = search::exhaustive_witness(&form, p, exponent, &mut counter)? else {
        return Ok(None);
    };
    let pt = match &norm {
        Some(norm) => search::denormalize_witness(&original, norm, &pt, p)?,
        None => pt,
    };
    to_witness(pt, eq, p).map(Some)
}

/// `2 n0 + 1`, the exponent at which residue searches are complete.
pub fn completeness_exponent(eq: &Equation, p: u64) -> Result<u32> {
    let (form, _) = search_form(eq, p)?;
    Ok(2 * search::completeness_n0(&form, p) + 1)
}

pub fn certify(eq: &Equation) -> Result<SolubilityCertificate> {
    certify_with(eq, &SearchOptions::default())
}

pub fn certify_with(eq: &Equation, opts: &SearchOptions) -> Result<SolubilityCertificate> {
    eq.validate()?;
    let primes = prime_checklist(eq)?
        .into_iter()
        .map(|p| local_verdict(eq, p, opts))
        .collect::<Result<Vec<_>>>()?;
    let real = real_soluble(eq);
    let everywhere = real && primes.iter().all(|v| v.soluble);
    Ok(SolubilityCertificate {
        equation: *eq,
        real,
        threshold: lemma_threshold(eq.k()),
        primes,
        everywhere,
    })
}

impl SolubilityCertificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cert: Self = serde_json::from_str(s)?;
        cert.equation.validate()?;
        Ok(cert)
    }

    /// The first failing verdict, if any.
    pub fn failing_prime(&self) -> Option<u64> {
        self.primes.iter().find(|v| !v.soluble).map(|v| v.p)
    }

    /// Re-checks the certificate without trusting any search: real
    /// solubility, coverage of the prime checklist, every witness, and the
    /// aggregate flag.
    pub fn replay(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.real != real_soluble(&self.equation) {
            return bad("real solubility flag is wrong".into());
        }
        if self.threshold != lemma_threshold(self.equation.k()) {
            return bad("threshold is wrong".into());
        }
        let listed: Vec<u64> = self.primes.iter().map(|v| v.p).collect();
        if listed != prime_checklist(&self.equation)? {
            return bad("prime list does not match the checklist".into());
        }
        for v in &self.primes {
            match (&v.witness, v.soluble) {
                (Some(w), true) => {
                    if hensel_witness_valid(&self.equation, &w.point, v.p) != Some(w.n) {
                        return bad(format!("witness at p = {} does not replay", v.p));
                    }
                }
                (None, false) => {}
                _ => return bad(format!("verdict at p = {} is inconsistent", v.p)),
            }
        }
        if self.everywhere != (self.real && self.primes.iter().all(|v| v.soluble)) {
            return bad("aggregate flag is wrong".into());
        }
        Ok(())
    }
}

/// `v_p` of every coefficient, for diagnostics.
pub fn coefficient_valuations(eq: &Equation, p: u64) -> Vec<u32> {
    eq.coefficients()
        .iter()
        .map(|&c| val_or_inf(c as i128, p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thue(a: i64, b: i64, k: u32) -> Equation {
        ThueEquation::new(a, b, k).unwrap().into()
    }

    fn fermat(a: i64, b: i64, c: i64, k: u32) -> Equation {
        FermatEquation::new(a, b, c, k).unwrap().into()
    }

    #[test]
    fn thue_local_examples() {
        let v = local_verdict(&thue(431, -107, 3), 3, &SearchOptions::default()).unwrap();
        assert!(v.soluble);
        assert!(hensel_witness_valid(&thue(431, -107, 3), &v.witness.unwrap().point, 3).is_some());
        let v = thue_local(&ThueEquation::new(431, -107, 3).unwrap(), 3, DEFAULT_BUDGET).unwrap();
        let ex = local_verdict(
            &thue(431, -107, 3),
            3,
            &SearchOptions {
                strategy: Strategy::Exhaustive,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(ex.witness.as_ref().unwrap().point, vec![0, 1]);
        assert_eq!(ex.witness.unwrap().n, 1);
        assert!(v.soluble);

        let v = thue_local(&ThueEquation::new(23, -11, 3).unwrap(), 3, DEFAULT_BUDGET).unwrap();
        assert!(!v.soluble);
        assert!(v.witness.is_none());

        let v = thue_local(&ThueEquation::new(2, 151, 3).unwrap(), 151, DEFAULT_BUDGET).unwrap();
        assert!(!v.soluble);
        assert_eq!(v.method, Method::ResidueSearch);
    }

    #[test]
    fn cube_residue_oracle_for_151() {
        // 2 is not a cube mod 151: its order is 15, and 3 does not divide 150/15.
        let cubes: std::collections::HashSet<i128> =
            (1..151i128).map(|x| x * x % 151 * x % 151).collect();
        assert!(!cubes.contains(&2));
        let inv2 = 76; // 2 * 76 = 152
        assert!(!cubes.contains(&inv2));
    }

    #[test]
    fn fermat_local_examples() {
        let selmer = fermat(3, 4, 5, 3);
        let v = local_verdict(&selmer, 3, &SearchOptions::default()).unwrap();
        assert!(v.soluble);
        assert_eq!(hensel_witness_valid(&selmer, &[0, 1, 4], 3), Some(1));

        let quartic = fermat(1, 1, 1, 4);
        assert!(
            !local_verdict(&quartic, 2, &SearchOptions::default())
                .unwrap()
                .soluble
        );
        let ex = SearchOptions {
            strategy: Strategy::Exhaustive,
            ..Default::default()
        };
        assert!(!local_verdict(&quartic, 2, &ex).unwrap().soluble);

        let trivial = fermat(1, -1, 1, 3);
        for p in primes_up_to(60) {
            assert!(
                local_verdict(&trivial, p, &SearchOptions::default())
                    .unwrap()
                    .soluble
            );
        }
    }

    #[test]
    fn real_solubility() {
        assert!(!real_soluble(&thue(-1, -1, 4)));
        assert!(real_soluble(&thue(-1, -1, 3)));
        assert!(real_soluble(&thue(-1, 2, 4)));
        assert!(!real_soluble(&fermat(1, 1, 1, 6)));
        assert!(!real_soluble(&fermat(-1, -2, -1, 6)));
        assert!(real_soluble(&fermat(1, 1, -1, 6)));
        assert!(real_soluble(&fermat(1, 1, 1, 3)));
    }

    #[test]
    fn checklist_examples() {
        let c = prime_checklist(&thue(2, 151, 3)).unwrap();
        assert_eq!(c.len(), 35);
        assert_eq!(*c.last().unwrap(), 151);
        assert_eq!(prime_checklist(&thue(1, 1, 3)).unwrap().len(), 34);
        assert_eq!(prime_checklist(&thue(1, -1, 4)).unwrap().len(), 78);
        assert_eq!(lemma_threshold(3), 144);
    }

    #[test]
    fn certify_examples() {
        let cert = certify(&fermat(3, 4, 5, 3)).unwrap();
        assert!(cert.everywhere);
        assert_eq!(cert.primes.len(), 34);
        cert.replay().unwrap();

        let cert = certify(&thue(2, 151, 3)).unwrap();
        assert!(!cert.everywhere);
        let at151 = cert.primes.iter().find(|v| v.p == 151).unwrap();
        assert!(!at151.soluble);
        // 1 is not of the form 2x^3 + 151y^3 modulo 27 either
        assert_eq!(cert.failing_prime(), Some(3));
        cert.replay().unwrap();

        assert!(certify(&thue(1, 1, 3)).unwrap().everywhere);
    }

    #[test]
    fn certificate_json_shape() {
        let cert = certify(&thue(1, 1, 3)).unwrap();
        let json = cert.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["equation"], serde_json::json!({"a": 1, "b": 1, "k": 3}));
        assert_eq!(v["threshold"], 144);
        assert_eq!(v["primes"][0]["p"], 2);
        assert!(v["primes"][0]["witness"]["point"].is_array());
        let pos: Vec<usize> = [
            "\"equation\"",
            "\"real\"",
            "\"threshold\"",
            "\"primes\"",
            "\"everywhere\"",
        ]
        .iter()
        .map(|k| json.find(k).unwrap())
        .collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        let back = SolubilityCertificate::from_json(&json).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.to_json().unwrap(), json);

        let f = certify(&fermat(1, -1, 1, 3)).unwrap();
        let back = SolubilityCertificate::from_json(&f.to_json().unwrap()).unwrap();
        assert!(matches!(back.equation, Equation::Fermat(_)));
    }

    #[test]
    fn tampered_certificate_fails_replay() {
        let mut cert = certify(&fermat(3, 4, 5, 3)).unwrap();
        cert.primes[1].witness.as_mut().unwrap().point[0] += 1;
        assert!(cert.replay().is_err());
        let mut cert = certify(&thue(1, 1, 3)).unwrap();
        cert.primes.pop();
        assert!(cert.replay().is_err());
    }

    #[test]
    fn surjectivity_shortcut_needs_p_coprime_to_k() {
        // gcd(3, 3-1) = 1 but 3 | k: no shortcut, and the equation is insoluble.
        assert_eq!(shortcut(&thue(23, -11, 3), 3), None);
        assert_eq!(
            shortcut(&thue(23, -11, 3), 5),
            Some(Method::SurjectivityShortcut)
        );
        assert_eq!(
            shortcut(&thue(23, -11, 3), 149),
            Some(Method::AutomaticLargePrime)
        );
        assert_eq!(shortcut(&thue(23, -11, 3), 7), None);
    }

    #[test]
    fn invalid_inputs() {
        assert!(ThueEquation::new(0, 1, 3).is_err());
        assert!(ThueEquation::new(1, 1, 2).is_err());
        assert!(FermatEquation::new(1, 0, 1, 3).is_err());
        assert!(local_verdict(&thue(1, 1, 3), 9, &SearchOptions::default()).is_err());
    }

    #[test]
    fn budget_error_reports_prime() {
        let opts = SearchOptions {
            strategy: Strategy::Exhaustive,
            budget: 100,
        };
        match local_verdict(&thue(1, 1, 4), 97, &opts) {
            Err(Error::BudgetExceeded { p, .. }) => assert_eq!(p, 97),
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
