//! Hensel witnesses: a residue point `x` and an integer `n` with
//! `f(x) ≡ 0 (mod p^(2n+1))` and `p^n || ∇f(x)`. Such a point lifts to an
//! exact zero in `Z_p` congruent to `x` modulo `p^(n+1)`.

use serde::{Deserialize, Serialize};

use super::equation::{DiagonalForm, Equation};
use crate::arith::{inv_mod, is_prime, mul_mod, pow_mod, prime_power, val_or_inf, valuation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HenselWitness {
    pub point: Vec<i64>,
    pub n: u32,
}

/// Returns the gradient valuation `n` if `point` is a valid Hensel witness
/// for `eq` at `p`, and `None` otherwise. Witnesses for homogeneous
/// equations must also have a coordinate that is a unit mod `p`.
pub fn hensel_witness_valid(eq: &Equation, point: &[i64], p: u64) -> Option<u32> {
    let point: Vec<i128> = point.iter().map(|&x| x as i128).collect();
    form_witness_valid(&eq.form(), &point, p)
}

pub(crate) fn form_witness_valid(form: &DiagonalForm, point: &[i128], p: u64) -> Option<u32> {
    if point.len() != form.coeffs.len() || !is_prime(p as i128) {
        return None;
    }
    let pm = p as i128;
    if form.is_homogeneous() && point.iter().all(|x| x % pm == 0) {
        return None;
    }
    let n = gradient_valuation(form, point, p)?;
    let m = prime_power(p, 2 * n + 1).ok()?;
    (form.eval_mod(point, m) == 0).then_some(n)
}

/// `min_i v_p(k c_i x_i^(k-1))`, or `None` if the gradient vanishes.
pub(crate) fn gradient_valuation(form: &DiagonalForm, point: &[i128], p: u64) -> Option<u32> {
    let vk = val_or_inf(form.k as i128, p);
    form.coeffs
        .iter()
        .zip(point)
        .filter(|(&c, &x)| c != 0 && x != 0)
        .map(|(&c, &x)| vk + val_or_inf(c, p) + (form.k - 1) * val_or_inf(x, p))
        .min()
}

/// Raises the precision of a valid witness by Newton iteration on the
/// coordinate that realises the gradient valuation, until
/// `f(point) ≡ 0 (mod p^precision)`.
pub(crate) fn lift_witness(
    form: &DiagonalForm,
    point: &[i128],
    p: u64,
    precision: u32,
) -> Result<Vec<i128>> {
    let n = form_witness_valid(form, point, p)
        .ok_or_else(|| Error::InvalidInput("cannot lift an invalid witness".into()))?;
    let vk = val_or_inf(form.k as i128, p);
    let idx = (0..point.len())
        .find(|&i| {
            let (c, x) = (form.coeffs[i], point[i]);
            c != 0 && x != 0 && vk + val_or_inf(c, p) + (form.k - 1) * val_or_inf(x, p) == n
        })
        .expect("gradient valuation is attained");
    let m = prime_power(p, precision)?;
    let wide = prime_power(p, precision + n)?;
    let pn = prime_power(p, n)?;
    let mut pt: Vec<i128> = point.iter().map(|x| x.rem_euclid(m)).collect();
    for _ in 0..128 {
        let r = form.eval_mod(&pt, m);
        if r == 0 {
            return Ok(pt);
        }
        // derivative k c x^(k-1), exact modulo p^(precision+n), divided by p^n
        let d = mul_mod(
            mul_mod(form.k as i128, form.coeffs[idx], wide),
            pow_mod(pt[idx], (form.k - 1) as u64, wide),
            wide,
        );
        let d_unit = (d / pn).rem_euclid(m);
        let f_wide = form.eval_mod(&pt, wide);
        let r_shift = (f_wide / pn).rem_euclid(m);
        let inv = inv_mod(d_unit, m).expect("derivative unit part is invertible");
        pt[idx] = (pt[idx] - mul_mod(r_shift, inv, m)).rem_euclid(m);
    }
    Err(Error::Overflow("Newton lifting failed to converge".into()))
}

/// Lifts a unit `u0` with `u0^k ≡ t (mod p^e)` (e from
/// `unit_power_precision`) to a root modulo `p^precision`.
pub(crate) fn lift_unit_root(t: i128, k: u32, p: u64, u0: i128, precision: u32) -> Result<i128> {
    let form = DiagonalForm {
        coeffs: vec![1],
        constant: -t,
        k,
    };
    let alpha = valuation(k as i128, p).map(|(e, _)| e).unwrap_or(0);
    let start = crate::arith::unit_power_precision(k, p);
    let m0 = prime_power(p, start)?;
    debug_assert_eq!(form.eval_mod(&[u0], m0), 0);
    // u0 is a witness with n = alpha
    debug_assert_eq!(form_witness_valid(&form, &[u0], p), Some(alpha));
    let lifted = lift_witness(&form, &[u0], p, precision.max(start))?;
    Ok(lifted[0])
}
