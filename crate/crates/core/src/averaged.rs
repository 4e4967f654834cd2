//! The sum averaged over every primitive root `g` in one slot:
//!
//! `S_bar = (1/phi(p-1)) sum_g sum_{x=1}^{N} e_p(a x + b g^x + sum_i b_i g_i^x)`
//!
//! Two evaluation routes are provided. [`eval_avg_direct`] walks the
//! enumerated primitive roots. [`eval_avg_u_param`] writes `g = g0^u` with
//! `gcd(u, p-1) = 1` and reads `b g0^(u x)` from a single table indexed by
//! `u x mod (p-1)`, so the inner loop is integer adds and one root lookup.
//!
//! Outer sums are computed per `u` (or per `g`) in parallel, collected in
//! index order, and reduced sequentially, so results do not depend on the
//! number of worker threads.

use rayon::prelude::*;

use crate::chain::{ChainReport, ChainStep};
use crate::error::{Error, Result};
use crate::expsum::{reduce, sum_f64, CompensatedSum, ComplexVal, Phases, RootTable, Term};
use crate::numtheory::{mul_reduced, PrimeContext};

/// Largest prime accepted by [`check_chain`]; its `(p-1)^2 phi(p-1)` tables
/// are built exhaustively.
pub const CHAIN_MAX_P: u64 = 500;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvgSpec {
    p: u64,
    n: u64,
    a: u64,
    b: u64,
    fixed: Vec<Term>,
}

impl AvgSpec {
    /// `b` is the coefficient of the averaged primitive root and must be a
    /// unit; `fixed` holds `(b_i, g_i)` pairs with `g_i` primitive.
    pub fn new(ctx: &PrimeContext, n: u64, a: i64, b: i64, fixed: &[(i64, u64)]) -> Result<Self> {
        let p = ctx.p();
        if n == 0 || n > p - 1 {
            return Err(Error::Invalid(format!(
                "range N = {n} not in [1, {}]",
                p - 1
            )));
        }
        let b_red = reduce(b, p);
        if b_red == 0 {
            return Err(Error::Hypothesis(format!(
                "averaged coefficient b = {b} must be coprime to p = {p}"
            )));
        }
        let fixed = fixed
            .iter()
            .map(|&(bi, gi)| {
                let g = ctx.require_primitive_root(gi)?;
                let b = reduce(bi, p);
                Ok(Term {
                    b,
                    g,
                    b_vanishes: b == 0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            p,
            n,
            a: reduce(a, p),
            b: b_red,
            fixed,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn fixed(&self) -> &[Term] {
        &self.fixed
    }

    pub fn with_a(&self, a: u64) -> Self {
        Self {
            a: a % self.p,
            ..self.clone()
        }
    }

    pub fn with_range(&self, n: u64) -> Result<Self> {
        if n == 0 || n > self.p - 1 {
            return Err(Error::Invalid(format!(
                "range N = {n} not in [1, {}]",
                self.p - 1
            )));
        }
        Ok(Self { n, ..self.clone() })
    }

    /// `a = 0` together with every fixed coefficient vanishing. Permitted,
    /// but reported: only the averaged term carries any phase.
    pub fn is_degenerate(&self) -> bool {
        self.a == 0 && self.fixed.iter().all(|t| t.b_vanishes)
    }

    /// Phases of the non-averaged part `a x + sum_i b_i g_i^x` for `x >= 1`.
    pub fn fixed_phases(&self) -> Phases {
        Phases::new(self.p, self.a, &self.fixed)
    }

    fn check(&self, ctx: &PrimeContext, table: &RootTable) -> Result<()> {
        for p in [ctx.p(), table.p()] {
            if p != self.p {
                return Err(Error::ModulusMismatch {
                    expected: self.p,
                    found: p,
                });
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for AvgSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "p={} N={} a={} b={}", self.p, self.n, self.a, self.b)?;
        for t in &self.fixed {
            write!(f, " {}:{}", t.b, t.g)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvgResult {
    /// The average `S_bar`.
    pub value: ComplexVal,
    /// `Sigma_N = sum_u |inner_u|`.
    pub sigma_n: f64,
    pub phi_pm1: u64,
}

impl AvgResult {
    fn from_inner(inner: &[ComplexVal], phi_pm1: u64) -> Self {
        let total: CompensatedSum = inner.iter().copied().collect();
        let sigma_n = sum_f64(inner.iter().map(|z| z.norm()));
        Self {
            value: total.value() / phi_pm1 as f64,
            sigma_n,
            phi_pm1,
        }
    }
}

/// Precomputed tables for the `u`-parameterized inner sums
/// `inner_u = sum_{x=1}^{N} e_p(c_x + b g0^(u x))` where `c_x` is the fixed
/// phase.
#[derive(Debug, Clone)]
pub struct UParamKernel<'t> {
    table: &'t RootTable,
    p: u32,
    m: u32,
    /// `b g0^t mod p` for `t in [0, p-2]`.
    averaged: Vec<u32>,
    /// `c_x` for `x in [1, N]`, stored at index `x - 1`.
    fixed: Vec<u32>,
}

const BLOCK: usize = 32;

impl<'t> UParamKernel<'t> {
    pub fn new(spec: &AvgSpec, ctx: &PrimeContext, table: &'t RootTable) -> Result<Self> {
        spec.check(ctx, table)?;
        let p = spec.p;
        let m = p - 1;
        let mut averaged = Vec::with_capacity(m as usize);
        let mut v = spec.b;
        for _ in 0..m {
            averaged.push(v as u32);
            v = mul_reduced(v, ctx.g0(), p);
        }
        let fixed = spec
            .fixed_phases()
            .take(spec.n as usize)
            .map(|c| c as u32)
            .collect();
        Ok(Self {
            table,
            p: p as u32,
            m: m as u32,
            averaged,
            fixed,
        })
    }

    /// Phase of the term at `x` (1-based) for exponent `u`.
    #[inline]
    pub fn phase(&self, u: u64, x: u64) -> u64 {
        let idx = (u % self.m as u64) * (x % self.m as u64) % self.m as u64;
        let s = self.fixed[x as usize - 1] as u64 + self.averaged[idx as usize] as u64;
        s % self.p as u64
    }

    pub fn inner(&self, u: u64) -> ComplexVal {
        self.inner_range(u, 1, self.fixed.len() as u64)
    }

    /// Inner sum restricted to `x in [lo, hi]`, `1 <= lo`, `hi <= N`. Empty
    /// when `lo > hi`.
    pub fn inner_range(&self, u: u64, lo: u64, hi: u64) -> ComplexVal {
        let (p, m) = (self.p, self.m);
        let mut acc = CompensatedSum::new();
        if lo > hi {
            return acc.value();
        }
        let step = (u % m as u64) as u32;
        let mut idx = ((u % m as u64) * ((lo - 1) % m as u64) % m as u64) as u32;
        let roots = self.table.as_slice();
        // short plain blocks folded into the compensated total
        for block in self.fixed[lo as usize - 1..hi as usize].chunks(BLOCK) {
            let mut part = ComplexVal::new(0.0, 0.0);
            for &c in block {
                idx += step;
                if idx >= m {
                    idx -= m;
                }
                let mut k = c + self.averaged[idx as usize];
                if k >= p {
                    k -= p;
                }
                part += roots[k as usize];
            }
            acc.add(part);
        }
        acc.value()
    }

    /// Inner sums for every `u` in `us`, in the same order.
    pub fn inner_all(&self, us: &[u64]) -> Vec<ComplexVal> {
        us.par_iter().map(|&u| self.inner(u)).collect()
    }
}

pub fn eval_avg_direct(spec: &AvgSpec, ctx: &PrimeContext, table: &RootTable) -> Result<AvgResult> {
    spec.check(ctx, table)?;
    let roots = ctx.primitive_roots();
    let inner: Vec<ComplexVal> = roots
        .par_iter()
        .map(|&g| {
            let mut terms = Vec::with_capacity(spec.fixed.len() + 1);
            terms.push(Term {
                b: spec.b,
                g,
                b_vanishes: false,
            });
            terms.extend_from_slice(&spec.fixed);
            let acc: CompensatedSum = Phases::new(spec.p, spec.a, &terms)
                .take(spec.n as usize)
                .map(|k| table.at(k))
                .collect();
            acc.value()
        })
        .collect();
    Ok(AvgResult::from_inner(&inner, ctx.phi_pm1()))
}

pub fn eval_avg_u_param(
    spec: &AvgSpec,
    ctx: &PrimeContext,
    table: &RootTable,
) -> Result<AvgResult> {
    let kernel = UParamKernel::new(spec, ctx, table)?;
    let inner = kernel.inner_all(&ctx.unit_exponents());
    Ok(AvgResult::from_inner(&inner, ctx.phi_pm1()))
}

/// The `u`-parameterized sum restricted to the given exponents, normalized
/// by `phi(p-1)` as in the full average. With `us = [1]` this is the single
/// sum at `g = g0` divided by `phi(p-1)`.
pub fn eval_avg_u_subset(
    spec: &AvgSpec,
    ctx: &PrimeContext,
    table: &RootTable,
    us: &[u64],
) -> Result<AvgResult> {
    let kernel = UParamKernel::new(spec, ctx, table)?;
    let inner = kernel.inner_all(us);
    Ok(AvgResult::from_inner(&inner, ctx.phi_pm1()))
}

/// Numeric trace of the complete-sum chain: Cauchy-Schwarz, expansion of the
/// square, the triangle inequality, Hölder, and the final `p^10` majorant
/// with the outer variable running over all nonzero residues.
pub fn check_chain(spec: &AvgSpec, ctx: &PrimeContext, table: &RootTable) -> Result<ChainReport> {
    let p = spec.p;
    let m = p - 1;
    if spec.n != m {
        return Err(Error::Invalid(format!(
            "chain applies to complete sums: N = {} but p - 1 = {m}",
            spec.n
        )));
    }
    if p > CHAIN_MAX_P {
        return Err(Error::OutOfRange {
            n: p,
            range: "chain checks for p <= 500",
        });
    }
    let kernel = UParamKernel::new(spec, ctx, table)?;
    let us = ctx.unit_exponents();
    let phi = ctx.phi_pm1() as f64;
    let inner = kernel.inner_all(&us);
    let sigma = sum_f64(inner.iter().map(|z| z.norm()));
    let sum_sq = sum_f64(inner.iter().map(|z| z.norm_sqr()));

    let mi = m as usize;
    let averaged = &kernel.averaged;
    // U(x, y) = sum_u e_p(b (g0^(u x) - g0^(u y))), x, y in [1, m], stored
    // at [(x - 1) m + (y - 1)]
    let u_table: Vec<ComplexVal> = (0..mi * mi)
        .into_par_iter()
        .map(|i| {
            let (x, y) = (i as u64 / m + 1, i as u64 % m + 1);
            us.iter()
                .map(|&u| {
                    let hx = averaged[(u * x % m) as usize] as u64;
                    let hy = averaged[(u * y % m) as usize] as u64;
                    table.at((hx + p - hy) % p)
                })
                .collect::<CompensatedSum>()
                .value()
        })
        .collect();
    let u_at = |x: u64, y: u64| u_table[((x - 1) * m + (y - 1)) as usize];

    // sum_{x,y} F(x) conj(F(y)) U(x, y) with F(x) = e_p(a x + fixed(x))
    let f: Vec<ComplexVal> = spec.fixed_phases().take(mi).map(|k| table.at(k)).collect();
    let expanded: CompensatedSum = (1..=m)
        .flat_map(|x| (1..=m).map(move |y| (x, y)))
        .map(|(x, y)| f[x as usize - 1] * f[y as usize - 1].conj() * u_at(x, y))
        .collect();

    let sum_abs_u = sum_f64(u_table.iter().map(|z| z.norm()));
    let sum_u4 = sum_f64(u_table.iter().map(|z| z.norm_sqr().powi(2)));
    let sum_u4_substituted = sum_f64((1..=m).flat_map(|x| (1..=m).map(move |y| (x, y))).map(
        |(x, y)| {
            let xy = x * y % m;
            let xy = if xy == 0 { m } else { xy };
            u_at(x, xy).norm_sqr().powi(2)
        },
    ));

    // V(lambda, y) = sum_u e_p(b (lambda^u - lambda^(u y))), lambda over all
    // residues 1..=p-1
    let b = spec.b;
    let v4: Vec<f64> = (1..=m)
        .into_par_iter()
        .map(|lambda| {
            let mut pw = Vec::with_capacity(mi);
            let mut v = 1u64;
            for _ in 0..m {
                pw.push(v);
                v = mul_reduced(v, lambda, p);
            }
            sum_f64((1..=m).map(|y| {
                us.iter()
                    .map(|&u| {
                        let d = pw[(u % m) as usize] + p - pw[(u * y % m) as usize];
                        table.at(mul_reduced(b, d % p, p))
                    })
                    .collect::<CompensatedSum>()
                    .value()
                    .norm_sqr()
                    .powi(2)
            }))
        })
        .collect();
    let sum_v4 = sum_f64(v4);

    let pairs = (m * m) as f64;
    let sigma8 = sigma.powi(8);
    let mut report = ChainReport::new(spec.to_string());
    report.push(ChainStep::le("cauchy_schwarz", sigma * sigma, phi * sum_sq));
    report.push(ChainStep::eq(
        "expand_square",
        phi * sum_sq,
        phi * expanded.value().re,
    ));
    report.push(ChainStep::le("triangle", phi * sum_sq, phi * sum_abs_u));
    report.push(ChainStep::le(
        "eighth_power",
        sigma8,
        phi.powi(4) * sum_abs_u.powi(4),
    ));
    report.push(ChainStep::le(
        "holder",
        phi.powi(4) * sum_abs_u.powi(4),
        phi.powi(4) * pairs.powi(3) * sum_u4,
    ));
    report.push(ChainStep::eq(
        "lambda_substitution",
        sum_u4_substituted,
        sum_v4,
    ));
    report.push(ChainStep::le(
        "p10_majorant",
        sigma8,
        (p as f64).powi(10) * sum_v4,
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::pow_mod;

    fn setup(p: u64) -> (PrimeContext, RootTable) {
        (PrimeContext::new(p).unwrap(), RootTable::new(p).unwrap())
    }

    #[test]
    fn full_period_average_is_minus_one() {
        for p in crate::numtheory::primes_in(3, 101) {
            let (ctx, t) = setup(p);
            for b in [1, 2, p as i64 - 1] {
                let spec = AvgSpec::new(&ctx, p - 1, 0, b, &[]).unwrap();
                for r in [
                    eval_avg_direct(&spec, &ctx, &t).unwrap(),
                    eval_avg_u_param(&spec, &ctx, &t).unwrap(),
                ] {
                    assert!((r.value + 1.0).norm() < 1e-10, "p={p} b={b}");
                }
            }
        }
    }

    #[test]
    fn worked_example_p7() {
        let (ctx, t) = setup(7);
        let spec = AvgSpec::new(&ctx, 6, 0, 1, &[(1, 3)]).unwrap();
        let d = eval_avg_direct(&spec, &ctx, &t).unwrap();
        let u = eval_avg_u_param(&spec, &ctx, &t).unwrap();
        // mpmath reference at 30 digits
        let expected = 0.524_458_669_761_152_7;
        assert!((d.value.re - expected).abs() < 1e-12);
        assert!(d.value.im.abs() < 1e-12);
        assert!((u.value - d.value).norm() < 1e-12);
        assert_eq!(d.phi_pm1, 2);
    }

    #[test]
    fn restricted_to_u1_is_single_sum() {
        let (ctx, t) = setup(31);
        let spec = AvgSpec::new(&ctx, 20, 4, 7, &[(2, 3)]).unwrap();
        let r = eval_avg_u_subset(&spec, &ctx, &t, &[1]).unwrap();
        let single = crate::expsum::SumSpec::new(&ctx, 20, 4, &[(7, ctx.g0()), (2, 3)]).unwrap();
        let s = crate::expsum::eval_sum(&single, &t).unwrap();
        assert!((r.value * ctx.phi_pm1() as f64 - s).norm() < 1e-12);
    }

    #[test]
    fn kernel_phase_matches_pow() {
        let (ctx, t) = setup(23);
        let spec = AvgSpec::new(&ctx, 22, 3, 5, &[(2, 5)]).unwrap();
        let k = UParamKernel::new(&spec, &ctx, &t).unwrap();
        for u in ctx.unit_exponents() {
            for x in 1..=22 {
                let want = (3 * x + 5 * pow_mod(ctx.g0(), u * x, 23) + 2 * pow_mod(5, x, 23)) % 23;
                assert_eq!(k.phase(u, x), want);
            }
        }
    }

    #[test]
    fn hypothesis_and_flags() {
        let (ctx, _) = setup(11);
        assert!(matches!(
            AvgSpec::new(&ctx, 10, 1, 22, &[]),
            Err(Error::Hypothesis(_))
        ));
        assert!(AvgSpec::new(&ctx, 10, 1, 1, &[(1, 3)]).is_err());
        assert!(AvgSpec::new(&ctx, 10, 0, 1, &[(11, 2)])
            .unwrap()
            .is_degenerate());
        assert!(!AvgSpec::new(&ctx, 10, 0, 1, &[(1, 2)])
            .unwrap()
            .is_degenerate());
    }

    #[test]
    fn chain_values_p5() {
        let (ctx, t) = setup(5);
        let spec = AvgSpec::new(&ctx, 4, 0, 1, &[(1, 2)]).unwrap();
        let r = check_chain(&spec, &ctx, &t).unwrap();
        assert!(r.holds(1e-8), "{r:?}");
        // mpmath reference values
        let cs = r.step("cauchy_schwarz").unwrap();
        assert!((cs.lhs - 1.909_830_056_250_525_8).abs() < 1e-12);
        assert!((cs.rhs - 2.291_796_067_500_631).abs() < 1e-12);
        let tri = r.step("triangle").unwrap();
        assert!((tri.rhs - 52.360_679_774_997_9).abs() < 1e-10);
        let e8 = r.step("eighth_power").unwrap();
        assert!((e8.lhs - 13.303_897_657_630_117).abs() < 1e-10);
        assert!((e8.rhs / 7_516_594.202_199_647 - 1.0).abs() < 1e-12);
        let h = r.step("holder").unwrap();
        assert!((h.rhs / 9_904_102.558_760_836 - 1.0).abs() < 1e-12);
        let maj = r.step("p10_majorant").unwrap();
        assert!((maj.rhs / 1_833_087_929.028_314 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chain_rejects_incomplete_sums() {
        let (ctx, t) = setup(7);
        let spec = AvgSpec::new(&ctx, 5, 0, 1, &[]).unwrap();
        assert!(check_chain(&spec, &ctx, &t).is_err());
    }
}
