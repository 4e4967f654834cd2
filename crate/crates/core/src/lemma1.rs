//! Brute-force laboratory for the fourth moment
//!
//! `H_{a,b} = sum_{y=1}^{p-1} | sum_{gcd(x, p-1) = 1} e_p(a lambda^x + b lambda^(x y)) |^4`
//!
//! and the congruence count `T_d`: the number of
//! `(x1, x2, x3, x4, y) in [1, t_d]^5` with
//!
//! ```text
//! l^x1 + l^x2 = l^x3 + l^x4            (mod p)
//! l^(x1 y) + l^(x2 y) = l^(x3 y) + l^(x4 y)  (mod p)
//! ```
//!
//! where `l = lambda^d` has order `t_d = (p-1)/d`. Orthogonality of additive
//! characters turns the full `(alpha, beta)` fourth moment into exactly
//! `p^2 T_d`, which is checked here both ways.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainReport, ChainStep};
use crate::error::{Error, Result};
use crate::expsum::{reduce, sum_f64, CompensatedSum, ComplexVal, RootTable};
use crate::numtheory::{gcd, mul_reduced, PrimeContext};

/// Exhaustive `T_d` counts are refused above this `t_d` (`t_d^5 <= 2^30`).
pub const TD_MAX_T: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaContext {
    pub p: u64,
    pub lambda: u64,
    pub d: u64,
    pub t_d: u64,
    pub lambda_d: u64,
}

impl LambdaContext {
    pub fn new(ctx: &PrimeContext, lambda: u64, d: u64) -> Result<Self> {
        let p = ctx.p();
        let lambda = ctx.require_primitive_root(lambda)?;
        if d == 0 || !(p - 1).is_multiple_of(d) {
            return Err(Error::Invalid(format!(
                "d = {d} does not divide p - 1 = {}",
                p - 1
            )));
        }
        let t_d = (p - 1) / d;
        let lambda_d = crate::numtheory::pow_mod(lambda, d, p);
        debug_assert_eq!(ctx.order_of(lambda_d), t_d);
        Ok(Self {
            p,
            lambda,
            d,
            t_d,
            lambda_d,
        })
    }

    /// One context per divisor `d | p - 1`, ascending in `d`.
    pub fn all_divisors(ctx: &PrimeContext, lambda: u64) -> Result<Vec<Self>> {
        ctx.pm1()
            .divisors()
            .into_iter()
            .map(|d| Self::new(ctx, lambda, d))
            .collect()
    }

    /// `lambda_d^k` for `k in [0, t_d - 1]`.
    fn powers(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.t_d as usize);
        let mut v = 1u64;
        for _ in 0..self.t_d {
            out.push(v);
            v = mul_reduced(v, self.lambda_d, self.p);
        }
        out
    }

    fn guard(&self) -> Result<()> {
        if self.t_d > TD_MAX_T {
            Err(Error::CountTooLarge {
                t_d: self.t_d,
                limit: TD_MAX_T,
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TdCount {
    pub ctx: LambdaContext,
    pub count: u64,
}

impl TdCount {
    /// Tuples with `{x1, x2} = {x3, x4}` as multisets, for every `y`.
    pub fn diagonal_lower_bound(&self) -> u64 {
        let t = self.ctx.t_d;
        t * (2 * t * t - t)
    }

    pub fn trivial_upper_bound(&self) -> u64 {
        self.ctx.t_d.pow(5)
    }

    pub fn within_bracket(&self) -> bool {
        (self.diagonal_lower_bound()..=self.trivial_upper_bound()).contains(&self.count)
    }
}

fn check_coefficients(p: u64, a: i64, b: i64) -> Result<(u64, u64)> {
    let (a, b) = (reduce(a, p), reduce(b, p));
    if a == 0 && b == 0 {
        return Err(Error::Hypothesis(format!(
            "a and b must not both be divisible by p = {p}"
        )));
    }
    Ok((a, b))
}

fn lambda_powers(ctx: &PrimeContext, lambda: u64) -> Vec<u64> {
    let p = ctx.p();
    let mut out = Vec::with_capacity(p as usize - 1);
    let mut v = 1u64;
    for _ in 0..p - 1 {
        out.push(v);
        v = mul_reduced(v, lambda, p);
    }
    out
}

/// Inner sum over `x` coprime to `p - 1` for one `y`.
fn h_inner(pw: &[u64], units: &[u64], a: u64, b: u64, y: u64, table: &RootTable) -> ComplexVal {
    let p = table.p();
    let m = p - 1;
    units
        .iter()
        .map(|&x| {
            let k = mul_reduced(a, pw[x as usize % pw.len()], p)
                + mul_reduced(b, pw[(x * y % m) as usize], p);
            table.at(k % p)
        })
        .collect::<CompensatedSum>()
        .value()
}

pub fn h_ab(ctx: &PrimeContext, lambda: u64, a: i64, b: i64, table: &RootTable) -> Result<f64> {
    let p = ctx.p();
    table.check(p)?;
    let lambda = ctx.require_primitive_root(lambda)?;
    let (a, b) = check_coefficients(p, a, b)?;
    let pw = lambda_powers(ctx, lambda);
    let units = ctx.unit_exponents();
    let per_y: Vec<f64> = (1..p)
        .into_par_iter()
        .map(|y| h_inner(&pw, &units, a, b, y, table).norm_sqr().powi(2))
        .collect();
    Ok(sum_f64(per_y))
}

/// Range of `y` in the per-divisor fourth moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YRange {
    /// `y in [1, p-1]`, as in `H_{a,b}` itself.
    Full,
    /// `y in [1, t_d]`, one period of `y -> lambda_d^(x y)`.
    Period,
}

/// `S_d(y) = sum_{x=1}^{t_d} e_p(a lambda_d^x + b lambda_d^(x y))`.
fn s_d(lc: &LambdaContext, pw: &[u64], a: u64, b: u64, y: u64, table: &RootTable) -> ComplexVal {
    let (p, t) = (lc.p, lc.t_d);
    (1..=t)
        .map(|x| {
            let k = mul_reduced(a, pw[(x % t) as usize], p)
                + mul_reduced(b, pw[(x * (y % t) % t) as usize], p);
            table.at(k % p)
        })
        .collect::<CompensatedSum>()
        .value()
}

/// `sum_y |S_d(y)|^4` over the chosen range of `y`.
pub fn d_moment(
    lc: &LambdaContext,
    a: i64,
    b: i64,
    range: YRange,
    table: &RootTable,
) -> Result<f64> {
    table.check(lc.p)?;
    let (a, b) = check_coefficients(lc.p, a, b)?;
    let pw = lc.powers();
    let ys = match range {
        YRange::Full => lc.p - 1,
        YRange::Period => lc.t_d,
    };
    Ok(sum_f64(
        (1..=ys).map(|y| s_d(lc, &pw, a, b, y, table).norm_sqr().powi(2)),
    ))
}

/// `sum_{y=1}^{t_d} sum_{alpha, beta = 0}^{p-1} |sum_{x=1}^{t_d} e_p(alpha l^x + beta l^(x y))|^4`.
pub fn alpha_beta_moment(lc: &LambdaContext, table: &RootTable) -> Result<f64> {
    table.check(lc.p)?;
    let p = lc.p;
    let pw = lc.powers();
    let per_y: Vec<f64> = (1..=lc.t_d)
        .into_par_iter()
        .map(|y| {
            sum_f64((0..p * p).map(|ab| s_d(lc, &pw, ab / p, ab % p, y, table).norm_sqr().powi(2)))
        })
        .collect();
    Ok(sum_f64(per_y))
}

/// Exact `T_d`. For each `y` the pairs `(x1, x2)` are bucketed by
/// `(l^x1 + l^x2, l^(x1 y) + l^(x2 y))`; solutions are ordered pairs of
/// pairs in the same bucket.
pub fn count_td(lc: &LambdaContext) -> Result<TdCount> {
    lc.guard()?;
    let (p, t) = (lc.p, lc.t_d);
    let pw = lc.powers();
    let count = (1..=t)
        .into_par_iter()
        .map(|y| {
            let mut buckets: HashMap<(u64, u64), u64> = HashMap::new();
            for x1 in 1..=t {
                for x2 in 1..=t {
                    let s1 = (pw[(x1 % t) as usize] + pw[(x2 % t) as usize]) % p;
                    let s2 = (pw[(x1 * y % t) as usize] + pw[(x2 * y % t) as usize]) % p;
                    *buckets.entry((s1, s2)).or_default() += 1;
                }
            }
            buckets.values().map(|c| c * c).sum::<u64>()
        })
        .sum();
    Ok(TdCount { ctx: *lc, count })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityCheck {
    /// Real part of the full character sum.
    pub lhs: f64,
    pub lhs_imag: f64,
    /// `p^2 T_d`.
    pub rhs: f64,
}

impl OrthogonalityCheck {
    pub fn holds(&self, rel_tol: f64) -> bool {
        (self.lhs - self.rhs).abs() <= rel_tol * self.rhs && self.lhs_imag.abs() <= 1e-6
    }
}

/// Evaluates
/// `sum_{alpha,beta} sum_{y,x1..x4} e_p(alpha A + beta B)` as
/// `sum_{y,x1..x4} G(A) G(B)` with `G(r) = sum_alpha e_p(alpha r)` summed
/// numerically, and compares with `p^2 T_d`.
pub fn orthogonality_identity(lc: &LambdaContext, table: &RootTable) -> Result<OrthogonalityCheck> {
    lc.guard()?;
    table.check(lc.p)?;
    let (p, t) = (lc.p, lc.t_d);
    let geometric: Vec<ComplexVal> = (0..p)
        .map(|r| {
            (0..p)
                .map(|alpha| table.at(alpha * r % p))
                .collect::<CompensatedSum>()
                .value()
        })
        .collect();
    let pw = lc.powers();
    let at = |k: u64| pw[(k % t) as usize];
    let per_y: Vec<ComplexVal> = (1..=t)
        .into_par_iter()
        .map(|y| {
            let mut acc = CompensatedSum::new();
            for x1 in 1..=t {
                for x2 in 1..=t {
                    let s1 = at(x1) + at(x2);
                    let s2 = at(x1 * y) + at(x2 * y);
                    for x3 in 1..=t {
                        for x4 in 1..=t {
                            let r1 = (s1 + 2 * p - at(x3) - at(x4)) % p;
                            let r2 = (s2 + 2 * p - at(x3 * y) - at(x4 * y)) % p;
                            acc.add(geometric[r1 as usize] * geometric[r2 as usize]);
                        }
                    }
                }
            }
            acc.value()
        })
        .collect();
    let lhs: CompensatedSum = per_y.into_iter().collect();
    let lhs = lhs.value();
    let count = count_td(lc)?.count;
    Ok(OrthogonalityCheck {
        lhs: lhs.re,
        lhs_imag: lhs.im,
        rhs: (p * p) as f64 * count as f64,
    })
}

/// `T_d / (t_d^(14/3) / p)`; reported, never asserted.
pub fn td_ratio(lc: &LambdaContext) -> Result<f64> {
    let c = count_td(lc)?;
    Ok(ratio_of(&c))
}

pub(crate) fn ratio_of(c: &TdCount) -> f64 {
    let t = c.ctx.t_d as f64;
    c.count as f64 / (t.powf(14.0 / 3.0) / c.ctx.p as f64)
}

/// Numeric trace of the bound on `H_{a,b}`: Möbius expansion of the
/// coprimality condition, triangle and Hölder over divisors, the `y`-period
/// collapse, the shift majorant, and the orthogonality identity.
pub fn h_chain_check(
    ctx: &PrimeContext,
    lambda: u64,
    a: i64,
    b: i64,
    table: &RootTable,
) -> Result<ChainReport> {
    let p = ctx.p();
    table.check(p)?;
    let lambda = ctx.require_primitive_root(lambda)?;
    let (ar, br) = check_coefficients(p, a, b)?;
    let lcs = LambdaContext::all_divisors(ctx, lambda)?;
    for lc in &lcs {
        lc.guard()?;
    }
    let m = p - 1;
    let pw = lambda_powers(ctx, lambda);
    let units = ctx.unit_exponents();
    let divisors = ctx.pm1().divisors();
    let sigma0 = divisors.len() as f64;
    let mut report = ChainReport::new(format!("p={p} lambda={lambda} a={ar} b={br}"));

    // per y: restricted sum, Möbius expansion, and the divisor sums S_d(y)
    let mut mobius_err = 0.0f64;
    let mut triangle = Vec::with_capacity(m as usize);
    let mut restricted4 = Vec::with_capacity(m as usize);
    let powers: Vec<Vec<u64>> = lcs.iter().map(LambdaContext::powers).collect();
    for y in 1..=m {
        let restricted = h_inner(&pw, &units, ar, br, y, table);
        let s: Vec<ComplexVal> = lcs
            .iter()
            .zip(&powers)
            .map(|(lc, pwd)| s_d(lc, pwd, ar, br, y, table))
            .collect();
        let expanded: CompensatedSum = divisors
            .iter()
            .zip(&s)
            .map(|(&d, &z)| z * crate::numtheory::mobius(d) as f64)
            .collect();
        mobius_err = mobius_err.max((expanded.value() - restricted).norm());
        triangle.push(sum_f64(s.iter().map(|z| z.norm())).powi(4));
        restricted4.push(restricted.norm_sqr().powi(2));
    }
    let h = sum_f64(restricted4);
    report.push(ChainStep::eq("mobius_expansion", mobius_err, 0.0));
    let tri = sum_f64(triangle);
    report.push(ChainStep::le("divisor_triangle", h, tri));

    let mut full_moments = Vec::new();
    let mut majorants = Vec::new();
    for lc in &lcs {
        let full = d_moment(lc, a, b, YRange::Full, table)?;
        let period = d_moment(lc, a, b, YRange::Period, table)?;
        let ab = alpha_beta_moment(lc, table)?;
        let td = count_td(lc)?.count as f64;
        let (d, t) = (lc.d as f64, lc.t_d as f64);
        let pp = (p * p) as f64;
        report.push(ChainStep::eq(
            format!("period_collapse[d={}]", lc.d),
            full,
            d * period,
        ));
        report.push(ChainStep::le(
            format!("shift_majorant[d={}]", lc.d),
            d * period,
            d / t * ab,
        ));
        report.push(ChainStep::eq(
            format!("orthogonality[d={}]", lc.d),
            d / t * ab,
            d / t * pp * td,
        ));
        full_moments.push(full);
        majorants.push(d / t * pp * td);
    }
    let holder_rhs = sigma0.powi(3) * sum_f64(full_moments);
    report.push(ChainStep::le("divisor_holder", tri, holder_rhs));
    report.push(ChainStep::le(
        "h_total",
        h,
        sigma0.powi(3) * sum_f64(majorants),
    ));
    Ok(report)
}

/// `H_{a,b}` is unchanged when `lambda` is replaced by `lambda^v` with
/// `gcd(v, p-1) = 1`: the substitution only permutes the coprime `x`.
pub fn reindexed_lambda(ctx: &PrimeContext, lambda: u64, v: u64) -> Result<u64> {
    if gcd(v, ctx.p() - 1) != 1 {
        return Err(Error::Invalid(format!("v = {v} not coprime to p - 1")));
    }
    Ok(crate::numtheory::pow_mod(lambda, v, ctx.p()))
}
