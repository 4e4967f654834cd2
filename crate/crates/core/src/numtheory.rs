//! Integer substrate: modular arithmetic, factorization, multiplicative
//! functions and primitive roots.
//!
//! Factorization uses trial division up to 10^6 followed by Brent's variant
//! of Pollard's rho on whatever cofactor remains. Primality is decided by
//! Miller-Rabin with the first twelve primes as witnesses, which is exact for
//! every 64-bit input.

use crate::error::{Error, Result};

const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Largest accepted input to [`factorize`].
pub const FACTORIZE_MAX: u64 = (1 << 63) - 1;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    mul_reduced(a % m, b % m, m)
}

/// `a * b mod m` for `a, b < m`.
#[inline(always)]
pub(crate) fn mul_reduced(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        a * b % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

/// `base^exp mod m`, result in `[0, m-1]`.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    assert!(m >= 2, "pow_mod: modulus must be at least 2");
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_reduced(result, b, m);
        }
        b = mul_reduced(b, b, m);
        exp >>= 1;
    }
    result
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &MR_WITNESSES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// Primes in `[lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&n| is_prime(n)).collect()
}

/// A positive integer together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(q, _)| q)
    }

    /// Product of `prime^exponent`, computed with overflow checks.
    pub fn multiply_back(&self) -> Option<u64> {
        self.factors
            .iter()
            .try_fold(1u64, |acc, &(q, e)| acc.checked_mul(q.checked_pow(e)?))
    }

    /// All positive divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(q, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= q;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    pub fn divisor_count(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    pub fn divisor_sum(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(q, e)| {
                let q = q as u128;
                (0..=e).map(|k| q.pow(k)).sum::<u128>()
            })
            .product()
    }

    pub fn mobius(&self) -> i8 {
        if self.factors.iter().any(|&(_, e)| e > 1) {
            0
        } else if self.factors.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn euler_phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(q, e)| (q - 1) * q.pow(e - 1))
            .product()
    }

    /// `sum_{d | n} d^r`.
    pub fn sigma(&self, r: f64) -> f64 {
        self.divisors().iter().map(|&d| (d as f64).powf(r)).sum()
    }
}

pub fn factorize(n: u64) -> Result<FactoredInteger> {
    if n == 0 {
        return Err(Error::Zero);
    }
    if n > FACTORIZE_MAX {
        return Err(Error::OutOfRange {
            n,
            range: "[1, 2^63)",
        });
    }
    let mut primes = Vec::new();
    let mut rest = n;
    for q in [2u64, 3] {
        while rest.is_multiple_of(q) {
            primes.push(q);
            rest /= q;
        }
    }
    let mut d = 5u64;
    while d <= TRIAL_DIVISION_LIMIT && d * d <= rest {
        for q in [d, d + 2] {
            while rest.is_multiple_of(q) {
                primes.push(q);
                rest /= q;
            }
        }
        d += 6;
    }
    if rest > 1 {
        split_into(rest, &mut primes);
    }
    primes.sort_unstable();

    let mut factors: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match factors.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => factors.push((q, 1)),
        }
    }
    Ok(FactoredInteger { n, factors })
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let f = pollard_brent(n);
    split_into(f, out);
    split_into(n / f, out);
}

/// Nontrivial factor of an odd composite `n` with no prime factor below the
/// trial division limit (or any odd composite; it still terminates).
fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    const BATCH: u64 = 128;
    for c in 1u64.. {
        let step = |y: u64| (mul_mod(y, y, n) + c) % n;
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = step(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = step(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = step(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("pollard_brent exhausted constants")
}

/// Möbius function. Panics on `n = 0`.
pub fn mobius(n: u64) -> i8 {
    factorize(n).expect("mobius: n >= 1").mobius()
}

/// `sigma_r(n) = sum_{d | n} d^r` as a float. Panics on `n = 0`.
pub fn sigma_r(n: u64, r: f64) -> f64 {
    factorize(n).expect("sigma_r: n >= 1").sigma(r)
}

/// Exact `sigma_0(n)`.
pub fn divisor_count(n: u64) -> u64 {
    factorize(n).expect("divisor_count: n >= 1").divisor_count()
}

/// Exact `sigma_1(n)`.
pub fn divisor_sum(n: u64) -> u128 {
    factorize(n).expect("divisor_sum: n >= 1").divisor_sum()
}

/// Euler's totient. Panics on `n = 0`.
pub fn euler_phi(n: u64) -> u64 {
    factorize(n).expect("euler_phi: n >= 1").euler_phi()
}

/// Multiplicative order of `g` modulo `m`, given the factorization of the
/// group exponent `order_bound` (any multiple of the true order).
pub fn multiplicative_order(g: u64, m: u64, order_bound: &FactoredInteger) -> u64 {
    let mut order = order_bound.n();
    for &(q, e) in order_bound.factors() {
        for _ in 0..e {
            if pow_mod(g, order / q, m) == 1 {
                order /= q;
            } else {
                break;
            }
        }
    }
    order
}

/// An odd prime `p` with everything the sums need precomputed: the
/// factorization of `p - 1`, `phi(p - 1)` and the least primitive root.
#[derive(Debug, Clone)]
pub struct PrimeContext {
    p: u64,
    pm1: FactoredInteger,
    phi_pm1: u64,
    g0: u64,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 {
            return Err(Error::OutOfRange {
                n: p,
                range: "odd primes p >= 3",
            });
        }
        if p.is_multiple_of(2) {
            return Err(Error::EvenModulus(p));
        }
        if !is_prime(p) {
            let factor = factorize(p)?.factors()[0].0;
            return Err(Error::NotPrime { n: p, factor });
        }
        let pm1 = factorize(p - 1)?;
        let phi_pm1 = pm1.euler_phi();
        let g0 = (2..p)
            .find(|&g| Self::generates(g, p, &pm1))
            .expect("every prime has a primitive root");
        Ok(Self {
            p,
            pm1,
            phi_pm1,
            g0,
        })
    }

    fn generates(g: u64, p: u64, pm1: &FactoredInteger) -> bool {
        pm1.primes().all(|q| pow_mod(g, (p - 1) / q, p) != 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn pm1(&self) -> &FactoredInteger {
        &self.pm1
    }

    pub fn phi_pm1(&self) -> u64 {
        self.phi_pm1
    }

    /// Least primitive root.
    pub fn g0(&self) -> u64 {
        self.g0
    }

    pub fn is_primitive_root(&self, g: u64) -> Result<bool> {
        if g.is_multiple_of(self.p) {
            return Err(Error::ZeroResidue(g));
        }
        Ok(Self::generates(g % self.p, self.p, &self.pm1))
    }

    pub fn require_primitive_root(&self, g: u64) -> Result<u64> {
        if self.is_primitive_root(g)? {
            Ok(g % self.p)
        } else {
            Err(Error::NotPrimitiveRoot { g, p: self.p })
        }
    }

    /// Exponents `u in [1, p-1]` with `gcd(u, p-1) = 1`, ascending.
    pub fn unit_exponents(&self) -> Vec<u64> {
        let m = self.p - 1;
        (1..=m).filter(|&u| gcd(u, m) == 1).collect()
    }

    /// All `phi(p-1)` primitive roots, ascending.
    pub fn primitive_roots(&self) -> Vec<u64> {
        let mut roots: Vec<u64> = self
            .unit_exponents()
            .into_iter()
            .map(|u| pow_mod(self.g0, u, self.p))
            .collect();
        roots.sort_unstable();
        roots
    }

    pub fn order_of(&self, g: u64) -> u64 {
        multiplicative_order(g, self.p, &self.pm1)
    }
}
