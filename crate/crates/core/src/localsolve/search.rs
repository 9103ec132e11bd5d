//! p-adic search strategies.
//!
//! Completeness rests on one observation. Every `Z_p` zero of a Thue form
//! has a unit coordinate (otherwise `1 ≡ 0 mod p`), and after coefficient
//! normalization every primitive zero of a Fermat form has a unit
//! coordinate. The gradient component at that coordinate has valuation at
//! most `n0 = v_p(k) + (coefficient valuations)`, so the reduction of the
//! zero modulo `p^(2 n0 + 1)` is already a Hensel witness. Searching
//! residues to that precision therefore decides solubility exactly.
//!
//! * Residue search ("strategy B") fixes which coordinate is a unit,
//!   enumerates one other coordinate modulo `p^(β+e)` and asks whether the
//!   remaining unit cofactor is a k-th power in `Z_p`.
//! * Exhaustive search ("strategy A") walks every primitive residue point
//!   modulo `p^(2 n0 + 1)` level by level, pruning points that already fail
//!   the congruence at a lower level.

use super::equation::DiagonalForm;
use super::witness::{form_witness_valid, lift_unit_root, lift_witness};
use crate::arith::{
    gcd, inv_mod, mul_mod, pow_mod, prime_power, unit_kth_root_zp, unit_power_precision,
    val_or_inf, valuation,
};
use crate::error::{Error, Result};

/// Candidate-evaluation budget for one `(equation, prime)` decision.
pub(crate) struct Counter {
    used: u64,
    budget: u64,
    p: u64,
}

impl Counter {
    pub fn new(budget: u64, p: u64) -> Self {
        Self { used: 0, budget, p }
    }

    fn tick(&mut self, n: u64, modulus: i128) -> Result<()> {
        self.used = self.used.saturating_add(n);
        if self.used > self.budget {
            return Err(Error::BudgetExceeded {
                p: self.p,
                modulus: modulus as u128,
                evaluated: self.used,
            });
        }
        Ok(())
    }
}

/// Decides membership in the unit k-th powers of `Z_p` for residues modulo
/// `p^e`.
enum UnitPowers {
    Euler { p: i128, exp: u64 },
    Table { m: i128, members: Vec<bool> },
}

impl UnitPowers {
    fn new(k: u32, p: u64) -> Result<Self> {
        let pm = p as i128;
        if p != 2 && (k as u64) % p != 0 {
            let g = gcd(k as i128, pm - 1);
            return Ok(UnitPowers::Euler {
                p: pm,
                exp: ((pm - 1) / g) as u64,
            });
        }
        let m = prime_power(p, unit_power_precision(k, p))?;
        let mut members = vec![false; m as usize];
        for x in (1..m).filter(|x| x % pm != 0) {
            members[pow_mod(x, k as u64, m) as usize] = true;
        }
        Ok(UnitPowers::Table { m, members })
    }

    fn contains(&self, u: i128) -> bool {
        match self {
            UnitPowers::Euler { p, exp } => pow_mod(u, *exp, *p) == 1,
            UnitPowers::Table { m, members } => members[u.rem_euclid(*m) as usize],
        }
    }
}

/// One case of the residue search: solve `a U^k + b V^k = t` in `Z_p` with
/// `U` a unit, by enumerating `V`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct UnitCase {
    pub unit_idx: usize,
    pub free_idx: usize,
    /// Coordinate pinned to 1 (homogeneous forms only).
    pub pinned_idx: Option<usize>,
    pub a: i128,
    pub b: i128,
    pub t: i128,
}

/// The unit cases covering every relevant zero of `form`.
pub(crate) fn unit_cases(form: &DiagonalForm) -> Vec<UnitCase> {
    let c = &form.coeffs;
    if form.is_homogeneous() {
        // After normalization a primitive zero has two unit coordinates.
        vec![
            UnitCase {
                unit_idx: 1,
                free_idx: 2,
                pinned_idx: Some(0),
                a: c[1],
                b: c[2],
                t: -c[0],
            },
            UnitCase {
                unit_idx: 2,
                free_idx: 1,
                pinned_idx: Some(0),
                a: c[2],
                b: c[1],
                t: -c[0],
            },
            UnitCase {
                unit_idx: 2,
                free_idx: 0,
                pinned_idx: Some(1),
                a: c[2],
                b: c[0],
                t: -c[1],
            },
        ]
    } else {
        let t = -form.constant;
        vec![
            UnitCase {
                unit_idx: 0,
                free_idx: 1,
                pinned_idx: None,
                a: c[0],
                b: c[1],
                t,
            },
            UnitCase {
                unit_idx: 1,
                free_idx: 0,
                pinned_idx: None,
                a: c[1],
                b: c[0],
                t,
            },
        ]
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ResidueHit {
    pub case: UnitCase,
    pub free: i128,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ResidueOutcome {
    pub hit: Option<ResidueHit>,
    /// Largest modulus enumerated over all cases.
    pub modulus: i128,
}

pub(crate) fn residue_search(
    form: &DiagonalForm,
    p: u64,
    counter: &mut Counter,
) -> Result<ResidueOutcome> {
    let powers = UnitPowers::new(form.k, p)?;
    let mut modulus = 1;
    for case in unit_cases(form) {
        let (free, m) = unit_case_search(&case, form.k, p, &powers, counter)?;
        modulus = modulus.max(m);
        if let Some(free) = free {
            return Ok(ResidueOutcome {
                hit: Some(ResidueHit { case, free }),
                modulus,
            });
        }
    }
    Ok(ResidueOutcome { hit: None, modulus })
}

/// Smallest `V` modulo `p^(β+e)` for which `(t - b V^k) / a` is a unit k-th
/// power, with `β = v_p(a)`.
fn unit_case_search(
    case: &UnitCase,
    k: u32,
    p: u64,
    powers: &UnitPowers,
    counter: &mut Counter,
) -> Result<(Option<i128>, i128)> {
    let (beta, a_unit) = valuation(case.a, p)?;
    let e = unit_power_precision(k, p);
    let full = prime_power(p, beta + e)?;
    let pe = prime_power(p, e)?;
    let pb = prime_power(p, beta)?;
    let pm = p as i128;
    let inv_a = inv_mod(a_unit, pe).expect("unit part is invertible");
    let residual =
        |v: i128, m: i128| (case.t - mul_mod(case.b, pow_mod(v, k as u64, m), m)).rem_euclid(m);

    // residues of V modulo p^beta with t - b V^k ≡ 0 (mod p^beta)
    let mut level = vec![0i128];
    let mut m = 1i128;
    for _ in 0..beta {
        let next = m * pm;
        counter.tick(level.len() as u64 * p, next)?;
        level = level
            .iter()
            .flat_map(|&v| (0..pm).map(move |d| v + d * m))
            .filter(|&w| residual(w, next) == 0)
            .collect();
        m = next;
        if level.is_empty() {
            return Ok((None, full));
        }
    }

    let test = |v: i128| {
        let w = residual(v, full);
        let c = w / pb;
        c % pm != 0 && powers.contains(mul_mod(c, inv_a, pe))
    };
    if beta == 0 {
        for v in 0..pe {
            counter.tick(1, full)?;
            if test(v) {
                return Ok((Some(v), full));
            }
        }
        return Ok((None, full));
    }
    counter.tick(level.len() as u64 * pe as u64, full)?;
    let mut cands: Vec<i128> = level
        .iter()
        .flat_map(|&v| (0..pe).map(move |d| v + d * pb))
        .collect();
    cands.sort_unstable();
    Ok((cands.into_iter().find(|&v| test(v)), full))
}

/// Builds a Hensel witness from a residue-search hit by lifting the unit
/// coordinate far enough that the congruence holds modulo `p^(2n+1)`.
pub(crate) fn witness_from_hit(form: &DiagonalForm, hit: &ResidueHit, p: u64) -> Result<Vec<i128>> {
    let k = form.k;
    let case = hit.case;
    let (beta, a_unit) = valuation(case.a, p)?;
    let alpha = val_or_inf(k as i128, p);
    let precision = (2 * alpha + beta + 1).max(unit_power_precision(k, p));
    let mp = prime_power(p, precision)?;
    let wide = prime_power(p, precision + beta)?;
    let pb = prime_power(p, beta)?;
    let w = (case.t - mul_mod(case.b, pow_mod(hit.free, k as u64, wide), wide)).rem_euclid(wide);
    let target = mul_mod(w / pb, inv_mod(a_unit, mp).expect("unit"), mp);
    let u0 = unit_kth_root_zp(target, k, p)?.ok_or_else(|| {
        Error::InvalidInput(format!("internal: residue hit at p = {p} has no unit root"))
    })?;
    let u = lift_unit_root(target, k, p, u0, precision)?;
    let mut point = vec![0i128; form.coeffs.len()];
    point[case.unit_idx] = u;
    point[case.free_idx] = hit.free;
    if let Some(i) = case.pinned_idx {
        point[i] = 1;
    }
    Ok(point)
}

/// Every primitive residue point modulo `p^exponent` with `f ≡ 0`, sorted.
/// Homogeneous forms are enumerated up to unit scaling: the first unit
/// coordinate is pinned to 1.
pub(crate) fn exhaustive_points(
    form: &DiagonalForm,
    p: u64,
    exponent: u32,
    counter: &mut Counter,
) -> Result<Vec<Vec<i128>>> {
    let dim = form.coeffs.len();
    let pm = p as i128;
    // (point, pinned coordinate)
    let mut nodes: Vec<(Vec<i128>, Option<usize>)> = Vec::new();
    if exponent == 0 {
        return Ok(vec![]);
    }
    if form.is_homogeneous() {
        for pin in 0..dim {
            let free = dim - pin - 1;
            let count = (pm as u64).pow(free as u32);
            counter.tick(count, pm)?;
            for idx in 0..count {
                let mut pt = vec![0i128; dim];
                pt[pin] = 1;
                let mut r = idx as i128;
                for slot in pt.iter_mut().skip(pin + 1) {
                    *slot = r % pm;
                    r /= pm;
                }
                if form.eval_mod(&pt, pm) == 0 {
                    nodes.push((pt, Some(pin)));
                }
            }
        }
    } else {
        let count = (pm as u64).pow(dim as u32);
        counter.tick(count, pm)?;
        for idx in 0..count {
            let mut r = idx as i128;
            let pt: Vec<i128> = (0..dim)
                .map(|_| {
                    let d = r % pm;
                    r /= pm;
                    d
                })
                .collect();
            if pt.iter().any(|x| x % pm != 0) && form.eval_mod(&pt, pm) == 0 {
                nodes.push((pt, None));
            }
        }
    }
    let mut m = pm;
    for j in 1..exponent {
        let next = prime_power(p, j + 1)?;
        let mut lifted = Vec::new();
        for (pt, pin) in &nodes {
            let free: Vec<usize> = (0..dim).filter(|&i| Some(i) != *pin).collect();
            let count = (pm as u64).pow(free.len() as u32);
            counter.tick(count, next)?;
            for idx in 0..count {
                let mut q = pt.clone();
                let mut r = idx as i128;
                for &i in &free {
                    q[i] += (r % pm) * m;
                    r /= pm;
                }
                if form.eval_mod(&q, next) == 0 {
                    lifted.push((q, *pin));
                }
            }
        }
        nodes = lifted;
        m = next;
        if nodes.is_empty() {
            break;
        }
    }
    let mut out: Vec<Vec<i128>> = nodes.into_iter().map(|(pt, _)| pt).collect();
    out.sort();
    Ok(out)
}

/// First valid witness among the exhaustive points modulo `p^exponent`.
pub(crate) fn exhaustive_witness(
    form: &DiagonalForm,
    p: u64,
    exponent: u32,
    counter: &mut Counter,
) -> Result<Option<Vec<i128>>> {
    Ok(exhaustive_points(form, p, exponent, counter)?
        .into_iter()
        .find(|pt| form_witness_valid(form, pt, p).is_some()))
}

/// The completeness exponent `n0 = v_p(k) + sum or max of coefficient
/// valuations`: additive for the inhomogeneous form, the maximum for a
/// normalized homogeneous one.
pub(crate) fn completeness_n0(form: &DiagonalForm, p: u64) -> u32 {
    let alpha = val_or_inf(form.k as i128, p);
    let vals = form.coeffs.iter().map(|&c| val_or_inf(c, p));
    if form.is_homogeneous() {
        alpha + vals.max().unwrap_or(0)
    } else {
        alpha + vals.sum::<u32>()
    }
}

/// A homogeneous form rescaled over `Q_p` so that every coefficient
/// valuation lies in `[0, k)` and at least one is zero.
#[derive(Debug, Clone)]
pub(crate) struct Normalized {
    pub form: DiagonalForm,
    /// `x_i = X_i * p^(max_shift - shift_i)` maps normalized to original.
    pub shifts: Vec<u32>,
    pub common: u32,
}

impl Normalized {
    pub fn is_identity(&self) -> bool {
        self.common == 0 && self.shifts.iter().all(|&s| s == 0)
    }
}

pub(crate) fn normalize(form: &DiagonalForm, p: u64) -> Result<Normalized> {
    let k = form.k;
    let mut shifts = Vec::new();
    let mut reduced = Vec::new();
    for &c in &form.coeffs {
        let (v, unit) = valuation(c, p)?;
        shifts.push(v / k);
        reduced.push((v % k, unit));
    }
    let common = reduced.iter().map(|&(r, _)| r).min().unwrap_or(0);
    let coeffs = reduced
        .iter()
        .map(|&(r, unit)| Ok(unit * prime_power(p, r - common)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Normalized {
        form: DiagonalForm {
            coeffs,
            constant: 0,
            k,
        },
        shifts,
        common,
    })
}

/// Carries a witness for the normalized form back to the original form.
pub(crate) fn denormalize_witness(
    original: &DiagonalForm,
    norm: &Normalized,
    point: &[i128],
    p: u64,
) -> Result<Vec<i128>> {
    if norm.is_identity() {
        return Ok(point.to_vec());
    }
    let n = form_witness_valid(&norm.form, point, p)
        .ok_or_else(|| Error::InvalidInput("internal: invalid normalized witness".into()))?;
    let max_shift = *norm.shifts.iter().max().unwrap_or(&0);
    let overflow = || Error::Overflow(format!("witness coordinates at p = {p} exceed 62 bits"));
    let mut precision = 2 * n + 1 + original.k * max_shift + norm.common;
    loop {
        let lifted = lift_witness(&norm.form, point, p, precision)?;
        let mut pt = lifted
            .iter()
            .zip(&norm.shifts)
            .map(|(&x, &s)| {
                prime_power(p, max_shift - s)
                    .ok()
                    .and_then(|f| x.checked_mul(f))
                    .ok_or_else(overflow)
            })
            .collect::<Result<Vec<i128>>>()?;
        let common = pt.iter().map(|&x| val_or_inf(x, p)).min().unwrap_or(0);
        let scale = prime_power(p, common)?;
        pt.iter_mut().for_each(|x| *x /= scale);
        if pt.iter().all(|x| x.unsigned_abs() < (1u128 << 62))
            && form_witness_valid(original, &pt, p).is_some()
        {
            return Ok(pt);
        }
        precision *= 2;
        prime_power(p, precision).map_err(|_| overflow())?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localsolve::{FermatEquation, ThueEquation};

    fn form(a: i64, b: i64, k: u32) -> DiagonalForm {
        crate::localsolve::Equation::from(ThueEquation::new(a, b, k).unwrap()).form()
    }

    fn fermat(a: i64, b: i64, c: i64, k: u32) -> DiagonalForm {
        crate::localsolve::Equation::from(FermatEquation::new(a, b, c, k).unwrap()).form()
    }

    #[test]
    fn residue_search_finds_ramified_witness() {
        let f = form(431, -107, 3);
        let mut c = Counter::new(1 << 30, 3);
        let out = residue_search(&f, 3, &mut c).unwrap();
        let hit = out.hit.unwrap();
        let w = witness_from_hit(&f, &hit, 3).unwrap();
        assert!(form_witness_valid(&f, &w, 3).is_some());
    }

    #[test]
    fn exhaustive_matches_brute_force_enumeration() {
        // all residue pairs mod 27 for 23x^3 - 11y^3 = 1: none solve it
        let f = form(23, -11, 3);
        let mut c = Counter::new(1 << 30, 3);
        assert!(exhaustive_points(&f, 3, 3, &mut c).unwrap().is_empty());
        let brute = (0..27)
            .flat_map(|x| (0..27).map(move |y| vec![x, y]))
            .filter(|pt| f.eval_mod(pt, 27) == 0)
            .count();
        assert_eq!(brute, 0);

        let f = form(2, 3, 3);
        let mut c = Counter::new(1 << 30, 5);
        let pts = exhaustive_points(&f, 5, 2, &mut c).unwrap();
        let brute: Vec<Vec<i128>> = (0..25)
            .flat_map(|x| (0..25).map(move |y| vec![x, y]))
            .filter(|pt| f.eval_mod(pt, 25) == 0)
            .collect();
        assert_eq!(pts, brute);
    }

    #[test]
    fn normalization_reduces_valuations() {
        let f = fermat(16, 4, 1, 3);
        let n = normalize(&f, 2).unwrap();
        assert_eq!(n.form.coeffs, vec![2, 4, 1]);
        assert_eq!(n.shifts, vec![1, 0, 0]);
        let f = fermat(4, 12, 8, 3);
        let n = normalize(&f, 2).unwrap();
        assert_eq!(n.form.coeffs, vec![4, 12, 1]);
        assert_eq!(n.shifts, vec![0, 0, 1]);
        assert_eq!(n.common, 0);
        let f = fermat(2, 6, 10, 3);
        let n = normalize(&f, 2).unwrap();
        assert_eq!(n.form.coeffs, vec![1, 3, 5]);
        assert_eq!(n.common, 1);
    }

    #[test]
    fn budget_is_enforced() {
        let f = form(1, 1, 4);
        let mut c = Counter::new(10, 13);
        assert!(matches!(
            exhaustive_points(&f, 13, 1, &mut c),
            Err(Error::BudgetExceeded { p: 13, .. })
        ));
    }
}
