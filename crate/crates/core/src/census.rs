//! Counting locally and globally soluble equations in coefficient boxes,
//! dyadic quadruple counts, and export.
//!
//! Each census runs one sweep at the largest `H` and reads every row off
//! it: a pair is counted at `H` when its height is at most `H` and, for the
//! global count, when it has a solution within the bound for that `H`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arith::{checked_pow, gcd, inv_mod};
use crate::error::{invalid, Error, Result};
use crate::globalsearch::{coefficient_lattice, height_bound, pairs_on_line, scaled_root_ceil};
use crate::localsolve::{Equation, FermatEquation, ThueEquation, VerdictCache, DEFAULT_BUDGET};
use crate::par::{try_map, Parallelism};

pub const CSV_HEADER: &str = "H,k,loc,glob,bound_B,ratio,conditional";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    #[serde(rename = "H")]
    pub h: u64,
    pub k: u32,
    pub loc_count: u64,
    pub glob_count: u64,
    #[serde(rename = "bound_B")]
    pub glob_bound_b: u64,
    /// `glob / loc`, or 0 when nothing is locally soluble.
    pub ratio: f64,
    /// Global counts only cover solutions within `bound_B`.
    pub conditional: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensusOptions {
    pub slack: f64,
    pub parallelism: Parallelism,
    pub coprime_only: bool,
    pub budget: u64,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            slack: 4.0,
            parallelism: Parallelism::Parallel,
            coprime_only: false,
            budget: DEFAULT_BUDGET,
        }
    }
}

fn check_heights(k: u32, hs: &[u64]) -> Result<()> {
    if k < 3 {
        return invalid(format!("degree must be at least 3, got {k}"));
    }
    if hs.is_empty() || hs[0] == 0 || hs.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("H list must be nonempty, positive and strictly ascending");
    }
    if hs[hs.len() - 1] > i64::MAX as u64 / 4 {
        return invalid("H too large");
    }
    Ok(())
}

fn height(coeffs: &[i64]) -> u64 {
    coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
}

fn coprime(coeffs: &[i64]) -> bool {
    coeffs.iter().fold(0i128, |g, &c| gcd(g, c as i128)) == 1
}

fn census_error(what: String, e: Error) -> Error {
    Error::Census {
        context: what,
        source: Box::new(e),
    }
}

/// Assembles rows from per-item heights. `glob` holds, for each globally
/// soluble item, its height and the height of its smallest solution.
fn rows(
    k: u32,
    hs: &[u64],
    bounds: &[u64],
    loc_heights: &[u64],
    glob: &HashMap<Vec<i64>, (u64, u64)>,
) -> Vec<CensusRow> {
    hs.iter()
        .zip(bounds)
        .map(|(&h, &b)| {
            let loc_count = loc_heights.iter().filter(|&&ht| ht <= h).count() as u64;
            let glob_count = glob
                .values()
                .filter(|&&(ht, sol)| ht <= h && sol <= b)
                .count() as u64;
            let ratio = if loc_count == 0 {
                0.0
            } else {
                glob_count as f64 / loc_count as f64
            };
            CensusRow {
                h,
                k,
                loc_count,
                glob_count,
                glob_bound_b: b,
                ratio,
                conditional: true,
            }
        })
        .collect()
}

fn nonzero_range(h: u64) -> Vec<i64> {
    let h = h as i64;
    (-h..=h).filter(|&v| v != 0).collect()
}

pub fn thue_census(k: u32, hs: &[u64], slack: f64) -> Result<Vec<CensusRow>> {
    let opts = CensusOptions {
        slack,
        ..Default::default()
    };
    thue_census_with(k, hs, &opts, &VerdictCache::new())
}

/// Counts `(a, b)` with `0 < |a|, |b| <= H` whose Thue equation is
/// everywhere locally soluble, and those with an integer solution of height
/// at most `height_bound(k, H, slack)`.
pub fn thue_census_with(
    k: u32,
    hs: &[u64],
    opts: &CensusOptions,
    cache: &VerdictCache,
) -> Result<Vec<CensusRow>> {
    check_heights(k, hs)?;
    let bounds = hs
        .iter()
        .map(|&h| height_bound(k, h, opts.slack).map(|hb| hb.b))
        .collect::<Result<Vec<_>>>()?;
    let h_max = hs[hs.len() - 1];
    let coeffs = nonzero_range(h_max);

    let loc = try_map(opts.parallelism, &coeffs, |&a| {
        let mut heights = Vec::new();
        for &b in &coeffs {
            if opts.coprime_only && !coprime(&[a, b]) {
                continue;
            }
            let eq: Equation = ThueEquation::new(a, b, k)?.into();
            let ok = cache
                .everywhere_soluble(&eq, opts.budget)
                .map_err(|e| census_error(format!("a = {a}, b = {b}"), e))?;
            if ok {
                heights.push(height(&[a, b]));
            }
        }
        Ok::<_, Error>(heights)
    })?;
    let loc_heights: Vec<u64> = loc.into_iter().flatten().collect();

    let b_max = bounds[bounds.len() - 1] as i64;
    let xs: Vec<i64> = (-b_max..=b_max).collect();
    let per_x = try_map(opts.parallelism, &xs, |&x| {
        let mut found = Vec::new();
        for y in -b_max..=b_max {
            if x == 0 && y == 0 {
                continue;
            }
            let sol = height(&[x, y]);
            for (a, b) in pairs_on_line(x, y, k, h_max)? {
                if !opts.coprime_only || coprime(&[a, b]) {
                    found.push((vec![a, b], sol));
                }
            }
        }
        Ok::<_, Error>(found)
    })?;
    let glob = min_solution_heights(per_x.into_iter().flatten());
    Ok(rows(k, hs, &bounds, &loc_heights, &glob))
}

fn min_solution_heights(
    found: impl Iterator<Item = (Vec<i64>, u64)>,
) -> HashMap<Vec<i64>, (u64, u64)> {
    let mut glob: HashMap<Vec<i64>, (u64, u64)> = HashMap::new();
    for (coeffs, sol) in found {
        let ht = height(&coeffs);
        glob.entry(coeffs)
            .and_modify(|e| e.1 = e.1.min(sol))
            .or_insert((ht, sol));
    }
    glob
}

/// Variable bound for the Fermat census: `ceil(slack H^(2/(k-3)))`. The
/// exponent is undefined at `k = 3`; there the `k = 4` exponent 2 is used.
pub fn fermat_bound(k: u32, h: u64, slack: f64) -> Result<u64> {
    if k < 3 {
        return invalid(format!("degree must be at least 3, got {k}"));
    }
    let den = (k - 3).max(1);
    scaled_root_ceil(slack, h, 2, den)
}

pub fn fermat_census(k: u32, hs: &[u64], slack: f64) -> Result<Vec<CensusRow>> {
    let opts = CensusOptions {
        slack,
        ..Default::default()
    };
    fermat_census_with(k, hs, &opts, &VerdictCache::new())
}

/// Counts `(a, b, c)` with `0 < |a|, |b|, |c| <= H` whose equation has
/// nontrivial solutions everywhere locally, and those with a primitive
/// integer zero of height at most [`fermat_bound`].
pub fn fermat_census_with(
    k: u32,
    hs: &[u64],
    opts: &CensusOptions,
    cache: &VerdictCache,
) -> Result<Vec<CensusRow>> {
    check_heights(k, hs)?;
    let bounds = hs
        .iter()
        .map(|&h| fermat_bound(k, h, opts.slack))
        .collect::<Result<Vec<_>>>()?;
    let h_max = hs[hs.len() - 1];
    let coeffs = nonzero_range(h_max);
    let positive: Vec<i64> = coeffs.iter().copied().filter(|&a| a > 0).collect();

    // (a, b, c) and (-a, -b, -c) give the same equation
    let loc = try_map(opts.parallelism, &positive, |&a| {
        let mut heights = Vec::new();
        for &b in &coeffs {
            for &c in &coeffs {
                if opts.coprime_only && !coprime(&[a, b, c]) {
                    continue;
                }
                let eq: Equation = FermatEquation::new(a, b, c, k)?.into();
                let ok = cache
                    .everywhere_soluble(&eq, opts.budget)
                    .map_err(|e| census_error(format!("a = {a}, b = {b}, c = {c}"), e))?;
                if ok {
                    let ht = height(&[a, b, c]);
                    heights.extend([ht, ht]);
                }
            }
        }
        Ok::<_, Error>(heights)
    })?;
    let loc_heights: Vec<u64> = loc.into_iter().flatten().collect();

    let b_max = bounds[bounds.len() - 1] as i64;
    // one point per class under the sign changes that fix x^k
    let lo = if k % 2 == 0 { 0 } else { -b_max };
    let xs: Vec<i64> = (0..=b_max).collect();
    let per_x = try_map(opts.parallelism, &xs, |&x| {
        let mut found = Vec::new();
        let ys: Vec<i64> = if x == 0 && k % 2 == 1 {
            (0..=b_max).collect()
        } else {
            (lo..=b_max).collect()
        };
        for &y in &ys {
            let z_lo = if k % 2 == 1 && x == 0 && y == 0 {
                1
            } else {
                lo
            };
            for z in z_lo..=b_max {
                if gcd(gcd(x as i128, y as i128), z as i128) != 1 {
                    continue;
                }
                let sol = height(&[x, y, z]);
                for pt in coefficient_lattice(x, y, z, k)?.points_in_box(h_max) {
                    if !opts.coprime_only || coprime(&pt) {
                        found.push((pt.to_vec(), sol));
                    }
                }
            }
        }
        Ok::<_, Error>(found)
    })?;
    let glob = min_solution_heights(per_x.into_iter().flatten());
    Ok(rows(k, hs, &bounds, &loc_heights, &glob))
}

/// The box `X < x <= 2X`, `Y < y <= 2Y`, `Z < b y^k <= 2Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicBox {
    #[serde(rename = "X")]
    pub x: u64,
    #[serde(rename = "Y")]
    pub y: u64,
    #[serde(rename = "Z")]
    pub z: u64,
    pub k: u32,
}

/// Number of `(a, b, x, y)` of positive integers in the box with
/// `a x^k - b y^k = 1`.
pub fn quadruple_count(bx: &DyadicBox) -> Result<u64> {
    if bx.x == 0 || bx.y == 0 || bx.z == 0 || bx.k == 0 {
        return invalid("box sides and degree must be positive");
    }
    let too_big = || Error::Overflow(format!("box {bx:?}"));
    let z = bx.z as i128;
    let mut count = 0u64;
    for x in bx.x + 1..=2 * bx.x {
        let xk = checked_pow(x as i128, bx.k).ok_or_else(too_big)?;
        for y in bx.y + 1..=2 * bx.y {
            if gcd(x as i128, y as i128) != 1 {
                continue;
            }
            let yk = checked_pow(y as i128, bx.k).ok_or_else(too_big)?;
            // 1 + b y^k ≡ 0 (mod x^k)
            let b0 = (-inv_mod(yk, xk).expect("coprime")).rem_euclid(xk);
            let (lo, hi) = (z / yk + 1, 2 * z / yk);
            if hi < lo {
                continue;
            }
            let first = lo + (b0 - lo).rem_euclid(xk);
            if first <= hi {
                count += ((hi - first) / xk + 1) as u64;
            }
        }
    }
    Ok(count)
}

fn fmt_ratio(r: f64) -> String {
    format!("{r:.6}")
}

/// Header line plus one line per row.
pub fn rows_to_csv(rows: &[CensusRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.h,
            r.k,
            r.loc_count,
            r.glob_count,
            r.glob_bound_b,
            fmt_ratio(r.ratio),
            r.conditional
        );
    }
    out
}

pub fn rows_to_json(rows: &[CensusRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)?)
}

/// Two whitespace-separated columns, `H ratio`, for plotting tools.
pub fn rows_to_plot_data(rows: &[CensusRow]) -> String {
    let mut out = String::from("# H ratio\n");
    for r in rows {
        let _ = writeln!(out, "{} {}", r.h, fmt_ratio(r.ratio));
    }
    out
}

/// Writes `text` to `path`, reporting the path on failure.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
