//! Incomplete sums over an interval `I` of `x` and their completion.
//!
//! `S(I) = sum_{gcd(u, p-1) = 1} sum_{x in I} e_p(a x + b g0^(u x) + sum_i b_i g_i^x)`
//!
//! The sharp indicator of `I` is written with additive characters,
//! `[x in I] = (1/p) sum_{y in I} sum_{k=1}^{p} e_p(k (y - x))`, which gives
//!
//! `S(I) = (1/p) sum_{k=1}^{p} G_I(k) C(k)`, `G_I(k) = sum_{y in I} e_p(k y)`,
//!
//! with `C(k)` the complete sum whose linear coefficient is `a - k`. For each
//! `u` the whole family `C_u(k)`, `k in [0, p-1]`, is one discrete Fourier
//! transform of the complete-sum terms.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::averaged::{AvgSpec, UParamKernel};
use crate::error::{Error, Result};
use crate::expsum::{sum_f64, CompensatedSum, ComplexVal, RootTable};
use crate::numtheory::PrimeContext;

const U_CHUNK: usize = 64;

/// Inclusive integer interval inside `[1, p-1]`, possibly empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    bounds: Option<(u64, u64)>,
}

impl Interval {
    pub fn new(lo: u64, hi: u64, p: u64) -> Result<Self> {
        if lo < 1 || hi > p - 1 || lo > hi {
            return Err(Error::Invalid(format!(
                "interval [{lo}, {hi}] not inside [1, {}]",
                p - 1
            )));
        }
        Ok(Self {
            bounds: Some((lo, hi)),
        })
    }

    pub const fn empty() -> Self {
        Self { bounds: None }
    }

    pub fn full(p: u64) -> Self {
        Self {
            bounds: Some((1, p - 1)),
        }
    }

    pub fn bounds(&self) -> Option<(u64, u64)> {
        self.bounds
    }

    pub fn len(&self) -> u64 {
        self.bounds.map_or(0, |(lo, hi)| hi - lo + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_none()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.bounds.is_some_and(|(lo, hi)| (lo..=hi).contains(&x))
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> {
        let (lo, hi) = self.bounds.unwrap_or((1, 0));
        lo..=hi
    }

    fn fits(&self, p: u64) -> Result<()> {
        match self.bounds {
            Some((_, hi)) if hi > p - 1 => Err(Error::Invalid(format!(
                "interval ends at {hi}, beyond p - 1 = {}",
                p - 1
            ))),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.bounds {
            Some((lo, hi)) => write!(f, "[{lo},{hi}]"),
            None => f.write_str("[]"),
        }
    }
}

/// `(1/p) sum_{y in I} sum_{k=1}^{p} e_p(k (y - x))`, real part.
pub fn indicator(x: u64, interval: &Interval, table: &RootTable) -> f64 {
    let p = table.p();
    let acc: CompensatedSum = interval
        .iter()
        .flat_map(|y| (1..=p).map(move |k| (y, k)))
        .map(|(y, k)| table.e(k as i64 * (y as i64 - x as i64)))
        .collect();
    acc.value().re / p as f64
}

/// Indicator evaluation with the inner `k`-sums `D(delta) = sum_{k=1}^{p}
/// e_p(k delta)` tabulated once per modulus.
#[derive(Debug, Clone)]
pub struct IndicatorKernel {
    p: u64,
    kernel: Vec<f64>,
}

impl IndicatorKernel {
    pub fn new(table: &RootTable) -> Self {
        let p = table.p();
        let kernel = (0..p)
            .map(|delta| {
                (1..=p)
                    .map(|k| table.at(k * delta % p))
                    .collect::<CompensatedSum>()
                    .value()
                    .re
            })
            .collect();
        Self { p, kernel }
    }

    pub fn eval(&self, x: u64, interval: &Interval) -> f64 {
        let p = self.p;
        sum_f64(
            interval
                .iter()
                .map(|y| self.kernel[((y + p - x % p) % p) as usize]),
        ) / p as f64
    }
}

/// `G_I(k) = sum_{y in I} e_p(k y)`.
pub fn geometric_sum(k: i64, interval: &Interval, table: &RootTable) -> ComplexVal {
    interval
        .iter()
        .map(|y| table.e(k * y as i64))
        .collect::<CompensatedSum>()
        .value()
}

/// Distance from `k/p` to the nearest integer.
pub fn nearest_integer_distance(k: i64, p: u64) -> f64 {
    let r = k.rem_euclid(p as i64) as u64;
    r.min(p - r) as f64 / p as f64
}

/// `min(|I|, 1 / (2 ||k/p||))`, an upper bound for `|G_I(k)|`.
pub fn geometric_tail_bound(k: i64, interval: &Interval, p: u64) -> Result<f64> {
    if k.rem_euclid(p as i64) == 0 {
        return Err(Error::Invalid(format!("k = {k} is divisible by p = {p}")));
    }
    let tail = 1.0 / (2.0 * nearest_integer_distance(k, p));
    Ok((interval.len() as f64).min(tail))
}

/// `(1/p) sum_{k=1}^{p-1} 1 / (2 ||k/p||)`.
pub fn harmonic_factor(p: u64) -> f64 {
    sum_f64((1..p as i64).map(|k| 1.0 / (2.0 * nearest_integer_distance(k, p)))) / p as f64
}

/// `(|e_p(k) - 1|, 4 ||k/p||)` for every `k in [1, p-1]`; the first
/// component should dominate.
pub fn sinus_inequality(p: u64) -> Vec<(f64, f64)> {
    (1..p as i64)
        .map(|k| {
            let ang = std::f64::consts::PI * k as f64 / p as f64;
            (2.0 * ang.sin().abs(), 4.0 * nearest_integer_distance(k, p))
        })
        .collect()
}

/// `S(I)` by the direct double loop over `u` and `x in I`.
pub fn eval_incomplete_direct(
    spec: &AvgSpec,
    interval: &Interval,
    ctx: &PrimeContext,
    table: &RootTable,
) -> Result<ComplexVal> {
    interval.fits(spec.p())?;
    let full = spec.with_range(spec.p() - 1)?;
    let kernel = UParamKernel::new(&full, ctx, table)?;
    let Some((lo, hi)) = interval.bounds() else {
        return Ok(ComplexVal::new(0.0, 0.0));
    };
    let inner: Vec<ComplexVal> = ctx
        .unit_exponents()
        .par_iter()
        .map(|&u| kernel.inner_range(u, lo, hi))
        .collect();
    Ok(inner.into_iter().collect::<CompensatedSum>().value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompletionReport {
    /// `S(I)` from the direct double loop.
    pub direct: ComplexVal,
    /// `S(I)` rebuilt from the complete sums `C(k)`.
    pub completed: ComplexVal,
    /// `(1/p) sum_{k=1}^{p-1} |G_I(k)| sum_u |C_u(k)|`.
    pub per_k_bound_sum: f64,
    /// `(|I|/p) sum_u |C_u(0)|`, the `k = p` term.
    pub main_term_bound: f64,
    /// `max_k sum_u |C_u(k)|`.
    pub complete_max: f64,
}

impl CompletionReport {
    pub fn identity_error(&self) -> f64 {
        (self.direct - self.completed).norm()
    }

    pub fn identity_holds(&self, tol: f64) -> bool {
        self.identity_error() <= tol * self.direct.norm().max(1.0)
    }

    pub fn majorization_holds(&self, abs_tol: f64) -> bool {
        self.direct.norm() <= self.per_k_bound_sum + self.main_term_bound + abs_tol
    }
}

/// Per-`k` aggregates over `u` of the complete sums `C_u(k)`.
struct CompleteSpectra {
    /// `C(k) = sum_u C_u(k)`.
    total: Vec<ComplexVal>,
    /// `sum_u |C_u(k)|`.
    abs_total: Vec<f64>,
}

fn complete_spectra(
    spec: &AvgSpec,
    ctx: &PrimeContext,
    table: &RootTable,
) -> Result<CompleteSpectra> {
    let p = spec.p();
    let full = spec.with_range(p - 1)?;
    let kernel = UParamKernel::new(&full, ctx, table)?;
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_forward(p as usize);
    let us = ctx.unit_exponents();
    let n = p as usize;
    let mut total = vec![CompensatedSum::new(); n];
    let mut abs_total = vec![(0.0f64, 0.0f64); n];
    for chunk in us.chunks(U_CHUNK) {
        let spectra: Vec<Vec<ComplexVal>> = chunk
            .par_iter()
            .map(|&u| {
                let mut buf = vec![ComplexVal::new(0.0, 0.0); n];
                for (x, slot) in buf.iter_mut().enumerate().skip(1) {
                    *slot = table.at(kernel.phase(u, x as u64));
                }
                fft.process(&mut buf);
                buf
            })
            .collect();
        for s in &spectra {
            for k in 0..n {
                total[k].add(s[k]);
                let (sum, comp) = &mut abs_total[k];
                // plain Neumaier step on the magnitudes
                let v = s[k].norm();
                let t = *sum + v;
                *comp += if sum.abs() >= v {
                    (*sum - t) + v
                } else {
                    (v - t) + *sum
                };
                *sum = t;
            }
        }
    }
    Ok(CompleteSpectra {
        total: total.iter().map(CompensatedSum::value).collect(),
        abs_total: abs_total.iter().map(|(s, c)| s + c).collect(),
    })
}

/// `S(I)` through the completion identity, with the two majorant pieces.
pub fn eval_incomplete_completed(
    spec: &AvgSpec,
    interval: &Interval,
    ctx: &PrimeContext,
    table: &RootTable,
) -> Result<CompletionReport> {
    let p = spec.p();
    interval.fits(p)?;
    let direct = eval_incomplete_direct(spec, interval, ctx, table)?;
    let spectra = complete_spectra(spec, ctx, table)?;
    let geo: Vec<ComplexVal> = (0..p as i64)
        .into_par_iter()
        .map(|k| geometric_sum(k, interval, table))
        .collect();
    let pf = p as f64;
    // index 0 stands for k = p
    let completed: CompensatedSum = (0..p as usize).map(|k| geo[k] * spectra.total[k]).collect();
    let per_k = sum_f64((1..p as usize).map(|k| geo[k].norm() * spectra.abs_total[k])) / pf;
    let main = interval.len() as f64 * spectra.abs_total[0] / pf;
    let complete_max = spectra.abs_total.iter().copied().fold(0.0, f64::max);
    Ok(CompletionReport {
        direct,
        completed: completed.value() / pf,
        per_k_bound_sum: per_k,
        main_term_bound: main,
        complete_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinalBound {
    /// `|S(I)|`.
    pub lhs: f64,
    /// `max_k sum_u |C_u(k)| * (harmonic_factor(p) + |I|/p)`.
    pub rhs: f64,
    pub harmonic: f64,
}

impl FinalBound {
    pub fn holds(&self, abs_tol: f64) -> bool {
        self.lhs <= self.rhs + abs_tol
    }
}

pub fn final_bound_check(
    spec: &AvgSpec,
    interval: &Interval,
    ctx: &PrimeContext,
    table: &RootTable,
) -> Result<FinalBound> {
    let report = eval_incomplete_completed(spec, interval, ctx, table)?;
    Ok(final_bound_from(&report, interval.len(), spec.p()))
}

pub fn final_bound_from(report: &CompletionReport, len: u64, p: u64) -> FinalBound {
    let harmonic = harmonic_factor(p);
    FinalBound {
        lhs: report.direct.norm(),
        rhs: report.complete_max * (harmonic + len as f64 / p as f64),
        harmonic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(p: u64) -> (PrimeContext, RootTable) {
        (PrimeContext::new(p).unwrap(), RootTable::new(p).unwrap())
    }

    #[test]
    fn interval_basics() {
        let i = Interval::new(2, 5, 7).unwrap();
        assert_eq!(i.len(), 4);
        assert!(i.contains(2) && i.contains(5) && !i.contains(6));
        assert!(Interval::new(0, 3, 7).is_err());
        assert!(Interval::new(3, 7, 7).is_err());
        assert!(Interval::new(4, 3, 7).is_err());
        assert_eq!(Interval::empty().len(), 0);
        assert_eq!(Interval::empty().iter().count(), 0);
    }

    #[test]
    fn indicator_examples() {
        let (_, t) = setup(7);
        let i = Interval::new(2, 5, 7).unwrap();
        assert!((indicator(3, &i, &t) - 1.0).abs() < 1e-12);
        assert!(indicator(6, &i, &t).abs() < 1e-12);
        assert!((indicator(2, &i, &t) - 1.0).abs() < 1e-12);
        let k = IndicatorKernel::new(&t);
        for x in 1..7 {
            assert!((k.eval(x, &i) - indicator(x, &i, &t)).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_bound_examples() {
        let (_, t) = setup(5);
        let i = Interval::new(1, 2, 5).unwrap();
        assert_eq!(geometric_tail_bound(1, &i, 5).unwrap(), 2.0);
        assert_eq!(geometric_tail_bound(2, &i, 5).unwrap(), 1.25);
        assert!((geometric_sum(1, &i, &t).norm() - 1.618_033_988_749_895).abs() < 1e-12);
        assert!((geometric_sum(2, &i, &t).norm() - 0.618_033_988_749_895).abs() < 1e-12);
        assert!(geometric_tail_bound(5, &i, 5).is_err());
    }

    #[test]
    fn full_interval_geometric_sums_are_minus_one() {
        let (_, t) = setup(31);
        let full = Interval::full(31);
        for k in 1..31 {
            assert!((geometric_sum(k, &full, &t) + 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn harmonic_factor_closed_form() {
        // equals the harmonic number H_{(p-1)/2}
        for p in [3u64, 5, 101, 997] {
            let h: f64 = (1..=(p - 1) / 2).map(|k| 1.0 / k as f64).sum();
            assert!((harmonic_factor(p) - h).abs() < 1e-12);
        }
        assert!(harmonic_factor(101) <= 3.0 + (101f64).ln());
    }

    #[test]
    fn sinus_inequality_holds() {
        for p in [3u64, 31, 101, 1009] {
            assert!(sinus_inequality(p).iter().all(|(l, r)| l + 1e-15 >= *r));
        }
    }

    #[test]
    fn completion_small() {
        let (ctx, t) = setup(11);
        let spec = AvgSpec::new(&ctx, 10, 1, 1, &[(1, 2)]).unwrap();
        let i = Interval::new(3, 7, 11).unwrap();
        let r = eval_incomplete_completed(&spec, &i, &ctx, &t).unwrap();
        assert!(r.identity_holds(1e-10), "{r:?}");
        assert!(r.majorization_holds(1e-9));
        // brute force straight from the definition
        let mut want = ComplexVal::new(0.0, 0.0);
        for g in ctx.primitive_roots() {
            for x in 3..=7u64 {
                let k =
                    x + crate::numtheory::pow_mod(g, x, 11) + crate::numtheory::pow_mod(2, x, 11);
                want += t.at(k % 11);
            }
        }
        assert!((r.direct - want).norm() < 1e-12);
    }

    #[test]
    fn empty_and_full_intervals() {
        let (ctx, t) = setup(13);
        let spec = AvgSpec::new(&ctx, 12, 2, 3, &[(5, 2)]).unwrap();
        let e = eval_incomplete_completed(&spec, &Interval::empty(), &ctx, &t).unwrap();
        assert_eq!(e.direct, ComplexVal::new(0.0, 0.0));
        assert!(e.completed.norm() < 1e-12);
        let full = Interval::full(13);
        let r = eval_incomplete_completed(&spec, &full, &ctx, &t).unwrap();
        let avg = crate::averaged::eval_avg_direct(&spec, &ctx, &t).unwrap();
        assert!((r.direct - avg.value * ctx.phi_pm1() as f64).norm() < 1e-10);
        assert!(r.identity_holds(1e-10));
        let fb = final_bound_from(&r, 12, 13);
        assert!(fb.lhs <= r.complete_max + 1e-12);
        assert!(fb.holds(1e-6));
    }
}
