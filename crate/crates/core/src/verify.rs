//! Verification suites behind `mordell verify`. Each suite returns one line
//! per check; failing lines carry every parameter needed to reproduce them.

use rand::Rng;

use crate::averaged::{check_chain, AvgSpec};
use crate::completion::{
    eval_incomplete_completed, final_bound_from, geometric_sum, geometric_tail_bound,
    harmonic_factor, sinus_inequality, IndicatorKernel, Interval,
};
use crate::error::Result;
use crate::expsum::RootTable;
use crate::lemma1::{count_td, h_chain_check, orthogonality_identity, LambdaContext};
use crate::numtheory::{primes_in, PrimeContext};
use crate::report::{ChainRow, CompletionRow, TdRow};
use crate::scan::{mordell_exhaustive, rng_for};
use crate::tolerances;

#[derive(Debug, Default, Clone)]
pub struct SuiteOutcome {
    pub lines: Vec<String>,
    pub failures: usize,
}

impl SuiteOutcome {
    fn record(&mut self, ok: bool, line: String) {
        if !ok {
            self.failures += 1;
        }
        self.lines
            .push(format!("{} {line}", if ok { "PASS" } else { "FAIL" }));
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Explicit bound `|S_N(a, b, g)| < 2 sqrt(p) ln p + 2 sqrt(p) + 1`, all
/// parameters, every odd prime up to `pmax`.
pub fn verify_mordell(pmax: u64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::default();
    for p in primes_in(3, pmax) {
        let w = mordell_exhaustive(p)?;
        out.record(
            w.holds(),
            format!(
                "mordell p={} cases={} max={:.12} at a={} b={} g={} N={} rhs={:.12}",
                p, w.cases, w.max_abs, w.a, w.b, w.g, w.n, w.rhs
            ),
        );
    }
    Ok(out)
}

/// Exhaustive coefficient grid for the complete-sum chain at one prime:
/// `a in [0, p)`, `b in [1, p)`, one fixed term `(b1, g1)` with
/// `b1 in [0, p)` and `g1` any primitive root.
pub fn chain_grid(p: u64, rel_tol: f64) -> Result<(usize, Vec<ChainRow>, f64)> {
    let ctx = PrimeContext::new(p)?;
    let table = RootTable::new(p)?;
    let roots = ctx.primitive_roots();
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut min_slack = f64::INFINITY;
    for a in 0..p as i64 {
        for b in 1..p as i64 {
            for b1 in 0..p as i64 {
                for &g1 in &roots {
                    let spec = AvgSpec::new(&ctx, p - 1, a, b, &[(b1, g1)])?;
                    let report = check_chain(&spec, &ctx, &table)?;
                    checked += 1;
                    min_slack = min_slack.min(report.min_slack());
                    if !report.holds(rel_tol) {
                        failures.extend(
                            ChainRow::from_report(&report)
                                .into_iter()
                                .filter(|r| r.slack < -rel_tol),
                        );
                    }
                }
            }
        }
    }
    Ok((checked, failures, min_slack))
}

pub fn verify_chain(primes: &[u64], rel_tol: f64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::default();
    for &p in primes {
        let (checked, failures, min_slack) = chain_grid(p, rel_tol)?;
        out.record(
            failures.is_empty(),
            format!("chain p={p} specs={checked} min_slack={min_slack:.6e}"),
        );
        for f in failures {
            out.record(
                false,
                format!(
                    "chain {} step={} lhs={:e} rhs={:e}",
                    f.context, f.label, f.lhs, f.rhs
                ),
            );
        }
    }
    Ok(out)
}

/// `T_d` rows for every primitive `lambda` and every `d | p - 1`.
pub fn td_table(p: u64) -> Result<Vec<TdRow>> {
    let ctx = PrimeContext::new(p)?;
    let mut rows = Vec::new();
    for lambda in ctx.primitive_roots() {
        for lc in LambdaContext::all_divisors(&ctx, lambda)? {
            rows.push(TdRow::from(&count_td(&lc)?));
        }
    }
    Ok(rows)
}

pub fn verify_lemma1(primes: &[u64], rel_tol: f64) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::default();
    for &p in primes {
        let ctx = PrimeContext::new(p)?;
        let table = RootTable::new(p)?;
        for lambda in ctx.primitive_roots() {
            for lc in LambdaContext::all_divisors(&ctx, lambda)? {
                let o = orthogonality_identity(&lc, &table)?;
                let c = count_td(&lc)?;
                out.record(
                    o.holds(tolerances::ORTHOGONALITY_REL) && c.within_bracket(),
                    format!(
                        "lemma1 p={p} lambda={lambda} d={} t_d={} T_d={} lhs={:.6} imag={:.1e} rhs={:.1}",
                        lc.d, lc.t_d, c.count, o.lhs, o.lhs_imag, o.rhs
                    ),
                );
            }
            let mut worst = f64::INFINITY;
            let mut bad = Vec::new();
            for a in 0..p as i64 {
                for b in 0..p as i64 {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    let r = h_chain_check(&ctx, lambda, a, b, &table)?;
                    worst = worst.min(r.min_slack());
                    bad.extend(r.failures(rel_tol).map(|s| {
                        format!(
                            "{} step={} lhs={:e} rhs={:e}",
                            r.context, s.label, s.lhs, s.rhs
                        )
                    }));
                }
            }
            out.record(
                bad.is_empty(),
                format!("lemma1-chain p={p} lambda={lambda} min_slack={worst:.6e}"),
            );
            for line in bad {
                out.record(false, line);
            }
        }
    }
    Ok(out)
}

/// Seeded `(spec, interval)` draw for the completion suite.
pub fn draw_completion_case(ctx: &PrimeContext, rng: &mut impl Rng) -> Result<(AvgSpec, Interval)> {
    let p = ctx.p();
    let units = ctx.unit_exponents();
    let a = rng.gen_range(0..p) as i64;
    let b = rng.gen_range(1..p) as i64;
    let b1 = rng.gen_range(0..p) as i64;
    let g1 = crate::numtheory::pow_mod(ctx.g0(), units[rng.gen_range(0..units.len())], p);
    let spec = AvgSpec::new(ctx, p - 1, a, b, &[(b1, g1)])?;
    let (x, y) = (rng.gen_range(1..p), rng.gen_range(1..p));
    let interval = Interval::new(x.min(y), x.max(y), p)?;
    Ok((spec, interval))
}

/// Completion identity and majorants on `trials` seeded cases at `p`.
pub fn completion_trials(p: u64, trials: u64, seed: u64) -> Result<Vec<(CompletionRow, bool)>> {
    let ctx = PrimeContext::new(p)?;
    let table = RootTable::new(p)?;
    let mut rng = rng_for(seed, p);
    let mut rows = Vec::new();
    for _ in 0..trials {
        let (spec, interval) = draw_completion_case(&ctx, &mut rng)?;
        let r = eval_incomplete_completed(&spec, &interval, &ctx, &table)?;
        let fb = final_bound_from(&r, interval.len(), p);
        let ok = r.identity_holds(tolerances::COMPLETION)
            && r.majorization_holds(tolerances::MAJORANT_ABS)
            && fb.holds(tolerances::MAJORANT_ABS);
        rows.push((
            CompletionRow {
                spec: spec.to_string(),
                interval: interval.to_string(),
                direct_re: r.direct.re,
                direct_im: r.direct.im,
                completed_re: r.completed.re,
                completed_im: r.completed.im,
                per_k_bound_sum: r.per_k_bound_sum,
                main_term_bound: r.main_term_bound,
                final_rhs: fb.rhs,
            },
            ok,
        ));
    }
    Ok(rows)
}

/// Largest deviation of the indicator from `{0, 1}` over every `x` and every
/// interval (including the empty one) at `p`.
pub fn indicator_max_error(p: u64) -> Result<f64> {
    let table = RootTable::new(p)?;
    let kernel = IndicatorKernel::new(&table);
    let mut worst = 0.0f64;
    let mut intervals = vec![Interval::empty()];
    for lo in 1..p {
        for hi in lo..p {
            intervals.push(Interval::new(lo, hi, p)?);
        }
    }
    for i in &intervals {
        for x in 1..p {
            let want = if i.contains(x) { 1.0 } else { 0.0 };
            worst = worst.max((kernel.eval(x, i) - want).abs());
        }
    }
    Ok(worst)
}

/// Worst ratio `|G_I(k)| / min(|I|, 1/(2||k/p||))` over all `k` and
/// `trials` seeded intervals (values above 1 are violations).
pub fn tail_bound_worst(p: u64, trials: u64, seed: u64) -> Result<f64> {
    let table = RootTable::new(p)?;
    let mut rng = rng_for(seed, p);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let (x, y) = (rng.gen_range(1..p), rng.gen_range(1..p));
        let i = Interval::new(x.min(y), x.max(y), p)?;
        for k in 1..p as i64 {
            let actual = geometric_sum(k, &i, &table).norm();
            let bound = geometric_tail_bound(k, &i, p)?;
            worst = worst.max(actual / bound);
        }
    }
    Ok(worst)
}

pub fn verify_completion(
    p: u64,
    trials: u64,
    seed: u64,
    pmax_indicator: u64,
) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::default();
    for (i, (row, ok)) in completion_trials(p, trials, seed)?.into_iter().enumerate() {
        let err = ((row.direct_re - row.completed_re).powi(2)
            + (row.direct_im - row.completed_im).powi(2))
        .sqrt();
        out.record(
            ok,
            format!(
                "completion p={p} seed={seed} trial={i} {} I={} err={err:.3e} |S(I)|={:.6} bound={:.6}",
                row.spec,
                row.interval,
                row.direct_re.hypot(row.direct_im),
                row.final_rhs
            ),
        );
    }
    for q in primes_in(3, pmax_indicator) {
        let e = indicator_max_error(q)?;
        out.record(
            e <= tolerances::INDICATOR,
            format!("indicator p={q} max_err={e:.3e}"),
        );
    }
    let tail = tail_bound_worst(p, 20, seed)?;
    out.record(
        tail <= 1.0,
        format!("tail-bound p={p} worst_ratio={tail:.6}"),
    );
    let sinus_ok = sinus_inequality(p).iter().all(|(l, r)| *l + 1e-15 >= *r);
    out.record(sinus_ok, format!("sinus p={p}"));
    let h = harmonic_factor(p);
    let cap = 3.0 + (p as f64).ln();
    out.record(
        h <= cap,
        format!("harmonic p={p} factor={h:.12} cap={cap:.12}"),
    );
    Ok(out)
}
