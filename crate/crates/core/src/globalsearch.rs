//! Integer solutions: bounded search, solution-major enumeration of Thue
//! coefficient pairs, the lattice of Fermat coefficients through a fixed
//! point, and abc quality.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::arith::{checked_pow, egcd, factorize, gcd, integer_kth_root};
use crate::error::{invalid, Error, Result};
use crate::localsolve::{Equation, FermatEquation, ThueEquation};

fn overflow(what: impl Into<String>) -> Error {
    Error::Overflow(what.into())
}

fn pow(base: i64, k: u32) -> Result<i128> {
    checked_pow(base as i128, k).ok_or_else(|| overflow(format!("{base}^{k}")))
}

/// Search bound for the variables of an equation with coefficients of size
/// at most `h`. Emptiness at this bound is conditional on abc and on the
/// choice of `slack`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeightBound {
    pub k: u32,
    #[serde(rename = "H")]
    pub h: u64,
    pub slack: f64,
    #[serde(rename = "B")]
    pub b: u64,
}

/// Smallest integer `B >= 1` with `B >= slack * h^(num/den)`.
///
/// Integral `slack` is handled exactly by comparing `B^den` with
/// `slack^den h^num`; otherwise a floating estimate is corrected by one
/// step in either direction.
pub(crate) fn scaled_root_ceil(slack: f64, h: u64, num: u32, den: u32) -> Result<u64> {
    if !slack.is_finite() || slack < 1.0 {
        return invalid(format!("slack must be a finite number >= 1, got {slack}"));
    }
    if h == 0 || den == 0 {
        return invalid("height and root index must be positive");
    }
    let estimate = (slack * (h as f64).powf(num as f64 / den as f64))
        .ceil()
        .max(1.0);
    if estimate > 1e15 {
        return Err(overflow(format!("bound {estimate:e} is too large")));
    }
    let mut b = estimate as u64;
    if slack.fract() == 0.0 {
        let s = slack as i128;
        let rhs = checked_pow(s, den)
            .and_then(|sd| checked_pow(h as i128, num).and_then(|hn| sd.checked_mul(hn)));
        if let Some(rhs) = rhs {
            let ok = |b: u64| checked_pow(b as i128, den).is_none_or(|v| v >= rhs);
            while !ok(b) {
                b += 1;
            }
            while b > 1 && ok(b - 1) {
                b -= 1;
            }
        }
    }
    Ok(b.max(1))
}

pub fn height_bound(k: u32, h: u64, slack: f64) -> Result<HeightBound> {
    if k < 3 {
        return invalid(format!("degree must be at least 3, got {k}"));
    }
    let b = scaled_root_ceil(slack, h, 1, k - 2)?;
    Ok(HeightBound { k, h, slack, b })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalSolution {
    pub equation: Equation,
    pub point: Vec<i64>,
    pub primitive: bool,
}

/// The values `y` with `y^k = q`.
fn kth_roots(q: i128, k: u32) -> Vec<i128> {
    match integer_kth_root(q, k) {
        Some(0) => vec![0],
        Some(r) if k % 2 == 0 => vec![-r, r],
        Some(r) => vec![r],
        None => vec![],
    }
}

/// Every `(x, y)` with `|x|, |y| <= bound` and `a x^k + b y^k = 1`,
/// sorted lexicographically.
pub fn thue_solutions(eq: &ThueEquation, bound: u64) -> Result<Vec<GlobalSolution>> {
    let bound = i64::try_from(bound).map_err(|_| overflow("bound"))?;
    pow(bound, eq.k)?;
    // loop over the variable whose coefficient is larger, so fewer
    // cofactors are divisible
    let swap = eq.a.unsigned_abs() < eq.b.unsigned_abs();
    let (outer, inner) = if swap { (eq.b, eq.a) } else { (eq.a, eq.b) };
    let mut out = Vec::new();
    for u in -bound..=bound {
        let r = 1 - outer as i128 * pow(u, eq.k)?;
        if r % inner as i128 != 0 {
            continue;
        }
        for v in kth_roots(r / inner as i128, eq.k) {
            if v.abs() <= bound as i128 {
                let v = v as i64;
                out.push(if swap { [v, u] } else { [u, v] });
            }
        }
    }
    out.sort_unstable();
    let equation = Equation::Thue(*eq);
    Ok(out
        .into_iter()
        .map(|pt| {
            assert_eq!(
                eq.a as i128 * pow(pt[0], eq.k).unwrap() + eq.b as i128 * pow(pt[1], eq.k).unwrap(),
                1
            );
            GlobalSolution {
                equation,
                point: pt.to_vec(),
                primitive: true,
            }
        })
        .collect())
}

/// `[lo, hi]` bounds on `t` for `|c0 + t d| <= h` (`d != 0`).
fn affine_range(c0: i128, d: i128, h: i128) -> (i128, i128) {
    let (lo, hi) = ((-h - c0), (h - c0));
    if d > 0 {
        (
            lo.div_euclid(d) + i128::from(lo.rem_euclid(d) != 0),
            hi.div_euclid(d),
        )
    } else {
        let d = -d;
        (
            (-hi).div_euclid(d) + i128::from((-hi).rem_euclid(d) != 0),
            (-lo).div_euclid(d),
        )
    }
}

/// Every `(a, b)` with `0 < |a|, |b| <= h` and `a x^k + b y^k = 1`, sorted.
pub fn pairs_on_line(x: i64, y: i64, k: u32, h: u64) -> Result<Vec<(i64, i64)>> {
    if x == 0 && y == 0 {
        return invalid("pairs_on_line needs (x, y) != (0, 0)");
    }
    let (xk, yk) = (pow(x, k)?, pow(y, k)?);
    let (g, u, v) = egcd(xk, yk)?;
    if g != 1 {
        return Ok(vec![]);
    }
    let h = h.min(i64::MAX as u64) as i128;
    let mut out = Vec::new();
    if yk == 0 || xk == 0 {
        // the vanishing side leaves its coefficient free
        let forced = if yk == 0 { xk } else { yk };
        for free in (-h..=h).filter(|&f| f != 0) {
            out.push(if yk == 0 {
                (forced, free)
            } else {
                (free, forced)
            });
        }
    } else {
        // a = u + t y^k, b = v - t x^k
        let (lo_a, hi_a) = affine_range(u, yk, h);
        let (lo_b, hi_b) = affine_range(v, -xk, h);
        for t in lo_a.max(lo_b)..=hi_a.min(hi_b) {
            let (a, b) = (u + t * yk, v - t * xk);
            if a != 0 && b != 0 {
                out.push((a, b));
            }
        }
    }
    out.sort_unstable();
    Ok(out.into_iter().map(|(a, b)| (a as i64, b as i64)).collect())
}

/// Integral basis of `{(a, b, c) : a x^k + b y^k + c z^k = 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientLattice {
    pub xyz: [i64; 3],
    pub k: u32,
    pub basis: [[i128; 3]; 2],
    pub determinant: f64,
}

fn first_nonzero_positive(v: [i128; 3]) -> [i128; 3] {
    match v.iter().find(|&&c| c != 0) {
        Some(&c) if c < 0 => v.map(|c| -c),
        _ => v,
    }
}

fn dot(a: &[i128; 3], b: &[i128; 3]) -> i128 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn coefficient_lattice(x: i64, y: i64, z: i64, k: u32) -> Result<CoefficientLattice> {
    if x == 0 && y == 0 && z == 0 {
        return invalid("coefficient_lattice needs a nonzero point");
    }
    if gcd(gcd(x as i128, y as i128), z as i128) != 1 {
        return invalid(format!("({x}, {y}, {z}) is not primitive"));
    }
    let (xk, yk, zk) = (pow(x, k)?, pow(y, k)?, pow(z, k)?);
    let basis = if xk == 0 && yk == 0 {
        [[1, 0, 0], [0, 1, 0]]
    } else {
        let (g, u, w) = egcd(xk, yk)?;
        [
            first_nonzero_positive([yk / g, -xk / g, 0]),
            first_nonzero_positive([-u * zk, -w * zk, g]),
        ]
    };
    let determinant = [xk, yk, zk]
        .iter()
        .map(|&v| (v as f64).powi(2))
        .sum::<f64>()
        .sqrt();
    for v in &basis {
        debug_assert_eq!(v[0] * xk + v[1] * yk + v[2] * zk, 0);
    }
    Ok(CoefficientLattice {
        xyz: [x, y, z],
        k,
        basis,
        determinant,
    })
}

impl CoefficientLattice {
    /// Lagrange-reduced copy of the basis, shortest vector first.
    pub fn reduced_basis(&self) -> [[i128; 3]; 2] {
        let [mut v1, mut v2] = self.basis;
        loop {
            if dot(&v2, &v2) < dot(&v1, &v1) {
                std::mem::swap(&mut v1, &mut v2);
            }
            let n1 = dot(&v1, &v1);
            let d = dot(&v1, &v2);
            // nearest integer to d / n1
            let mu = (2 * d + n1).div_euclid(2 * n1);
            if mu == 0 {
                return [v1, v2];
            }
            for i in 0..3 {
                v2[i] -= mu * v1[i];
            }
        }
    }

    /// Lattice points with every coordinate nonzero and at most `h` in
    /// absolute value, sorted.
    pub fn points_in_box(&self, h: u64) -> Vec<[i64; 3]> {
        let [v1, v2] = self.reduced_basis();
        let h = h as i128;
        // a reduced basis has angle at least 60 degrees, so
        // |s v1 + t v2|^2 >= (s^2 |v1|^2 + t^2 |v2|^2) / 2 and |s| <= sqrt(6) h / |v1|
        let span =
            |v: &[i128; 3]| ((6.0 * (h * h) as f64 / dot(v, v) as f64).sqrt().floor() as i128) + 1;
        let (s_max, t_max) = (span(&v1), span(&v2));
        let mut out = Vec::new();
        for s in -s_max..=s_max {
            for t in -t_max..=t_max {
                let p = [0, 1, 2].map(|i| s * v1[i] + t * v2[i]);
                if p.iter().all(|&c| c != 0 && c.abs() <= h) {
                    out.push(p.map(|c| c as i64));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Primitive nonzero `(x, y, z)` with coordinates at most `bound` in
/// absolute value. Odd degree: one point per `±` pair, first nonzero
/// coordinate positive. Even degree: coordinates nonnegative.
pub fn fermat_solutions(eq: &FermatEquation, bound: u64) -> Result<Vec<GlobalSolution>> {
    let bound = i64::try_from(bound).map_err(|_| overflow("bound"))?;
    pow(bound, eq.k)?;
    let k = eq.k;
    let mut found = BTreeSet::new();
    for x in -bound..=bound {
        let ax = eq.a as i128 * pow(x, k)?;
        for y in -bound..=bound {
            let r = -(ax + eq.b as i128 * pow(y, k)?);
            if r % eq.c as i128 != 0 {
                continue;
            }
            for z in kth_roots(r / eq.c as i128, k) {
                if z.abs() > bound as i128 {
                    continue;
                }
                let pt = [x, y, z as i64];
                if pt == [0, 0, 0] || gcd(gcd(x as i128, y as i128), z) != 1 {
                    continue;
                }
                let canon = if k % 2 == 0 {
                    pt.map(|c| c.abs())
                } else {
                    match pt.iter().find(|&&c| c != 0) {
                        Some(&c) if c < 0 => pt.map(|c| -c),
                        _ => pt,
                    }
                };
                found.insert(canon);
            }
        }
    }
    let equation = Equation::Fermat(*eq);
    Ok(found
        .into_iter()
        .map(|pt| {
            let v: i128 = [eq.a, eq.b, eq.c]
                .iter()
                .zip(pt)
                .map(|(&c, x)| c as i128 * pow(x, k).unwrap())
                .sum();
            assert_eq!(v, 0);
            GlobalSolution {
                equation,
                point: pt.to_vec(),
                primitive: true,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbcTriple {
    pub u: i128,
    pub v: i128,
    pub w: i128,
    pub radical_value: u128,
    pub quality: f64,
}

/// Quality `log max(|u|,|v|,|w|) / log rad(uvw)` after dividing out the
/// common factor.
pub fn abc_quality(u: i128, v: i128, w: i128) -> Result<AbcTriple> {
    if u == 0 || v == 0 || w == 0 {
        return invalid("abc triple entries must be nonzero");
    }
    if u.checked_add(v).and_then(|s| s.checked_add(w)) != Some(0) {
        return invalid(format!("{u} + {v} + {w} != 0"));
    }
    let g = gcd(gcd(u, v), w);
    let (u, v, w) = (u / g, v / g, w / g);
    let mut primes = BTreeSet::new();
    for n in [u, v, w] {
        primes.extend(factorize(n)?.primes());
    }
    let radical_value = primes
        .into_iter()
        .try_fold(1u128, |acc, p| acc.checked_mul(p as u128))
        .ok_or_else(|| overflow("radical"))?;
    let max = u.abs().max(v.abs()).max(w.abs());
    let quality = (max as f64).ln() / (radical_value as f64).ln();
    Ok(AbcTriple {
        u,
        v,
        w,
        radical_value,
        quality,
    })
}
