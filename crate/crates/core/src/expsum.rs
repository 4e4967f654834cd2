//! The additive character `e_p(t) = exp(2 pi i t / p)` and the single
//! Mordell-type sum `S_N(a, b, g) = sum_{x=1}^{N} e_p(a x + sum_i b_i g_i^x)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numtheory::{mul_reduced, PrimeContext};

pub type ComplexVal = Complex64;

/// Largest modulus for which a full root table is built (16 bytes per entry).
pub const ROOT_TABLE_MAX_P: u64 = 1 << 24;

/// Neumaier-compensated accumulator for complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: f64,
    im: f64,
    c_re: f64,
    c_im: f64,
}

#[inline(always)]
fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    *comp += if sum.abs() >= x.abs() {
        (*sum - t) + x
    } else {
        (x - t) + *sum
    };
    *sum = t;
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline(always)]
    pub fn add(&mut self, z: ComplexVal) {
        neumaier(&mut self.re, &mut self.c_re, z.re);
        neumaier(&mut self.im, &mut self.c_im, z.im);
    }

    #[inline]
    pub fn value(&self) -> ComplexVal {
        ComplexVal::new(self.re + self.c_re, self.im + self.c_im)
    }
}

impl FromIterator<ComplexVal> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = ComplexVal>>(iter: I) -> Self {
        let mut acc = Self::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Compensated sum of reals.
pub fn sum_f64<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for x in iter {
        neumaier(&mut s, &mut c, x);
    }
    s + c
}

/// `e_p(k)` for every `k in [0, p-1]`, each entry computed from its own angle.
#[derive(Debug, Clone)]
pub struct RootTable {
    p: u64,
    roots: Vec<ComplexVal>,
}

impl RootTable {
    pub fn new(p: u64) -> Result<Self> {
        if p.is_multiple_of(2) {
            return Err(Error::EvenModulus(p));
        }
        if p > ROOT_TABLE_MAX_P {
            return Err(Error::OutOfRange {
                n: p,
                range: "root tables for p <= 2^24",
            });
        }
        // PrimeContext performs the primality check and names a factor.
        PrimeContext::new(p)?;
        Ok(Self::new_unchecked(p))
    }

    pub(crate) fn new_unchecked(p: u64) -> Self {
        let step = std::f64::consts::TAU / p as f64;
        let roots = (0..p)
            .map(|k| {
                if k == 0 {
                    ComplexVal::new(1.0, 0.0)
                } else {
                    // symmetric angle in (-pi, pi] keeps the argument small
                    let j = if 2 * k > p {
                        k as f64 - p as f64
                    } else {
                        k as f64
                    };
                    let (s, c) = (j * step).sin_cos();
                    ComplexVal::new(c, s)
                }
            })
            .collect();
        Self { p, roots }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `e_p(k)` for a reduced residue `k`.
    #[inline(always)]
    pub fn at(&self, k: u64) -> ComplexVal {
        self.roots[k as usize]
    }

    /// `e_p(k)` for any integer `k`.
    pub fn e(&self, k: i64) -> ComplexVal {
        self.roots[k.rem_euclid(self.p as i64) as usize]
    }

    pub fn as_slice(&self) -> &[ComplexVal] {
        &self.roots
    }

    pub(crate) fn check(&self, p: u64) -> Result<()> {
        if self.p == p {
            Ok(())
        } else {
            Err(Error::ModulusMismatch {
                expected: p,
                found: self.p,
            })
        }
    }
}

/// One exponential term `b * g^x` of a sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub b: u64,
    pub g: u64,
    /// `p | b` as given at construction.
    pub b_vanishes: bool,
}

/// Everything needed to evaluate one sum `S_N(a, b, g)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumSpec {
    p: u64,
    n: u64,
    a: u64,
    terms: Vec<Term>,
}

pub(crate) fn reduce(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

impl SumSpec {
    /// `terms` are `(b_i, g_i)` pairs; each `g_i` must be a primitive root.
    pub fn new(ctx: &PrimeContext, n: u64, a: i64, terms: &[(i64, u64)]) -> Result<Self> {
        let p = ctx.p();
        if n == 0 || n > p - 1 {
            return Err(Error::Invalid(format!(
                "range N = {n} not in [1, {}]",
                p - 1
            )));
        }
        let terms = terms
            .iter()
            .map(|&(b, g)| {
                let g = ctx.require_primitive_root(g)?;
                let b = reduce(b, p);
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
            terms,
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

    pub fn terms(&self) -> &[Term] {
        &self.terms
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

    /// Phase residues `a x + sum_i b_i g_i^x mod p` for `x = 1, 2, ...`.
    pub fn phases(&self) -> Phases {
        Phases::new(self.p, self.a, &self.terms)
    }
}

/// Walks the phase of a sum one step of `x` at a time: the linear part by
/// addition, each `b_i g_i^x` by one modular multiplication.
#[derive(Debug, Clone)]
pub struct Phases {
    p: u64,
    a: u64,
    linear: u64,
    // (g_i, b_i g_i^(x-1))
    state: Vec<(u64, u64)>,
}

impl Phases {
    pub(crate) fn new(p: u64, a: u64, terms: &[Term]) -> Self {
        Self {
            p,
            a,
            linear: 0,
            state: terms.iter().map(|t| (t.g, t.b)).collect(),
        }
    }
}

impl Iterator for Phases {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        let p = self.p;
        self.linear += self.a;
        if self.linear >= p {
            self.linear -= p;
        }
        let mut phase = self.linear;
        for (g, bg) in self.state.iter_mut() {
            *bg = mul_reduced(*bg, *g, p);
            phase += *bg;
            if phase >= p {
                phase -= p;
            }
        }
        Some(phase)
    }
}

pub fn eval_sum(spec: &SumSpec, table: &RootTable) -> Result<ComplexVal> {
    table.check(spec.p)?;
    let acc: CompensatedSum = spec
        .phases()
        .take(spec.n as usize)
        .map(|k| table.at(k))
        .collect();
    let value = acc.value();
    debug_assert!(value.norm() <= spec.n as f64 + 1e-9);
    Ok(value)
}

/// Entry `N - 1` is `S_N` for every `N in [1, spec.n]`.
pub fn eval_prefix_sums(spec: &SumSpec, table: &RootTable) -> Result<Vec<ComplexVal>> {
    table.check(spec.p)?;
    let mut acc = CompensatedSum::new();
    Ok(spec
        .phases()
        .take(spec.n as usize)
        .map(|k| {
            acc.add(table.at(k));
            acc.value()
        })
        .collect())
}

/// `S_N(a, b, g) = sum_{x=1}^{N} e_p(a x + b g^x)` with `p` dividing
/// neither `a` nor `b`.
pub fn eval_mordell_sum(
    ctx: &PrimeContext,
    a: i64,
    b: i64,
    g: u64,
    n: u64,
    table: &RootTable,
) -> Result<ComplexVal> {
    let p = ctx.p();
    if reduce(a, p) == 0 || reduce(b, p) == 0 {
        return Err(Error::Hypothesis(format!(
            "p = {p} must divide neither a = {a} nor b = {b}"
        )));
    }
    let spec = SumSpec::new(ctx, n, a, &[(b, g)])?;
    eval_sum(&spec, table)
}
