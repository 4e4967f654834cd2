//! Scans over primes: exhaustive checks of the explicit bound for
//! `S_N(a, b, g)`, Stoneham-type maxima, and seeded maxima of the averaged
//! sum feeding the exponent fit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::averaged::{eval_avg_u_param, AvgSpec};
use crate::error::Result;
use crate::expsum::{eval_prefix_sums, RootTable, SumSpec};
use crate::numtheory::{is_prime, next_prime, pow_mod, PrimeContext};
use crate::report::{mordell_rhs, ScanRecord};

pub const AVG_QUANTITY: &str = "avg_complete";
pub const STONEHAM_QUANTITY: &str = "stoneham";

/// Deterministic generator for one prime of one scan.
pub fn rng_for(seed: u64, p: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(p);
    rng
}

/// Draws `(a, b, [(b1, g1)])` with `a` uniform mod `p`, `b, b1` uniform units
/// and `g1` a uniform primitive root.
pub fn draw_avg_spec(ctx: &PrimeContext, units: &[u64], rng: &mut ChaCha8Rng) -> Result<AvgSpec> {
    let p = ctx.p();
    let a = rng.gen_range(0..p) as i64;
    let b = rng.gen_range(1..p) as i64;
    let b1 = rng.gen_range(1..p) as i64;
    let u = units[rng.gen_range(0..units.len())];
    let g1 = pow_mod(ctx.g0(), u, p);
    AvgSpec::new(ctx, p - 1, a, b, &[(b1, g1)])
}

/// Largest `|S_bar|` over `samples` seeded complete-sum specs at `p`.
pub fn scan_prime(p: u64, samples: u64, seed: u64) -> Result<ScanRecord> {
    let ctx = PrimeContext::new(p)?;
    let table = RootTable::new(p)?;
    let units = ctx.unit_exponents();
    let mut rng = rng_for(seed, p);
    let mut max_abs = 0.0f64;
    for _ in 0..samples {
        let spec = draw_avg_spec(&ctx, &units, &mut rng)?;
        let r = eval_avg_u_param(&spec, &ctx, &table)?;
        max_abs = max_abs.max(r.value.norm());
    }
    Ok(ScanRecord::new(p, AVG_QUANTITY, max_abs, samples, seed))
}

pub fn scan_primes(primes: &[u64], samples: u64, seed: u64) -> Result<Vec<ScanRecord>> {
    primes
        .iter()
        .map(|&p| scan_prime(p, samples, seed))
        .collect()
}

/// `count` primes spread geometrically over `[lo, hi]`: the least prime at
/// or above each of `lo (hi/lo)^(i/(count-1))` (the greatest prime at or
/// below it when that would leave the range), deduplicated.
pub fn log_spaced_primes(lo: u64, hi: u64, count: usize) -> Vec<u64> {
    if count == 0 || lo > hi {
        return Vec::new();
    }
    let ratio = hi as f64 / lo as f64;
    let mut out: Vec<u64> = (0..count)
        .filter_map(|i| {
            let t = if count == 1 {
                0.0
            } else {
                i as f64 / (count - 1) as f64
            };
            let x = ((lo as f64 * ratio.powf(t)).round() as u64).clamp(lo, hi);
            let up = next_prime(x);
            if up <= hi {
                Some(up)
            } else {
                (lo..=x).rev().find(|&q| is_prime(q))
            }
        })
        .collect();
    out.dedup();
    out
}

/// The worst case of `|S_N(a, b, g)|` at one prime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MordellWorst {
    pub p: u64,
    pub max_abs: f64,
    pub a: u64,
    pub b: u64,
    pub g: u64,
    pub n: u64,
    pub rhs: f64,
    /// Number of `(a, b, g, N)` cases examined.
    pub cases: u64,
}

impl MordellWorst {
    pub fn holds(&self) -> bool {
        self.max_abs < self.rhs
    }
}

/// Every `(a, b)` with `p` dividing neither, every primitive root `g`, every
/// `N in [1, p-1]`, via one prefix-sum pass per `(a, b, g)`.
pub fn mordell_exhaustive(p: u64) -> Result<MordellWorst> {
    let ctx = PrimeContext::new(p)?;
    let table = RootTable::new(p)?;
    let roots = ctx.primitive_roots();
    let per_a: Vec<MordellWorst> = (1..p)
        .into_par_iter()
        .map(|a| -> Result<MordellWorst> {
            let mut worst = MordellWorst {
                p,
                max_abs: -1.0,
                a,
                b: 0,
                g: 0,
                n: 0,
                rhs: mordell_rhs(p),
                cases: 0,
            };
            for b in 1..p {
                for &g in &roots {
                    let spec = SumSpec::new(&ctx, p - 1, a as i64, &[(b as i64, g)])?;
                    for (i, s) in eval_prefix_sums(&spec, &table)?.iter().enumerate() {
                        let v = s.norm();
                        if v > worst.max_abs {
                            worst = MordellWorst {
                                max_abs: v,
                                b,
                                g,
                                n: i as u64 + 1,
                                ..worst
                            };
                        }
                    }
                    worst.cases += p - 1;
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let cases = per_a.iter().map(|w| w.cases).sum();
    let mut best = per_a[0];
    for w in &per_a[1..] {
        if w.max_abs > best.max_abs {
            best = *w;
        }
    }
    best.cases = cases;
    Ok(best)
}

/// `max_{b in bs, N} |sum_{x=1}^{N} e_p(b g0^x)|`.
pub fn stoneham_max(ctx: &PrimeContext, table: &RootTable, bs: &[u64]) -> Result<f64> {
    let p = ctx.p();
    let maxima: Vec<f64> = bs
        .par_iter()
        .map(|&b| -> Result<f64> {
            let spec = SumSpec::new(ctx, p - 1, 0, &[(b as i64, ctx.g0())])?;
            Ok(eval_prefix_sums(&spec, table)?
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    Ok(maxima.into_iter().fold(0.0, f64::max))
}
