//! Brute-force oracles for the integration tests. Nothing here calls into
//! the library: angles come from `sin_cos` on fresh reductions, powers from
//! repeated multiplication, primes from a sieve.

#![allow(dead_code)]

use num_complex::Complex64;

pub fn sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn odd_primes_upto(n: u64) -> Vec<u64> {
    sieve(n).into_iter().filter(|&p| p > 2).collect()
}

pub fn power(g: u64, e: u64, p: u64) -> u64 {
    let mut r = 1u128;
    let (mut base, mut e) = (g as u128 % p as u128, e);
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    r as u64
}

pub fn order(g: u64, p: u64) -> u64 {
    let mut v = g % p;
    let mut k = 1;
    while v != 1 {
        v = v * g % p;
        k += 1;
    }
    k
}

pub fn primitive_roots(p: u64) -> Vec<u64> {
    (1..p).filter(|&g| order(g, p) == p - 1).collect()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn ep(k: u64, p: u64) -> Complex64 {
    let (s, c) = (std::f64::consts::TAU * (k % p) as f64 / p as f64).sin_cos();
    Complex64::new(c, s)
}

/// `sum_{x in xs} e_p(a x + sum_i b_i g_i^x)`.
pub fn sum_over(p: u64, a: u64, terms: &[(u64, u64)], xs: impl Iterator<Item = u64>) -> Complex64 {
    xs.map(|x| {
        let mut k = a % p * (x % p) % p;
        for &(b, g) in terms {
            k = (k + b % p * power(g, x, p)) % p;
        }
        ep(k, p)
    })
    .sum()
}

/// `sum_{g primitive} sum_{x in xs} e_p(a x + b g^x + fixed)`.
pub fn sum_over_roots(
    p: u64,
    xs: std::ops::RangeInclusive<u64>,
    a: u64,
    b: u64,
    fixed: &[(u64, u64)],
) -> Complex64 {
    primitive_roots(p)
        .into_iter()
        .map(|g| {
            let mut terms = vec![(b, g)];
            terms.extend_from_slice(fixed);
            sum_over(p, a, &terms, xs.clone())
        })
        .sum()
}

/// [`sum_over_roots`] divided by the number of primitive roots.
pub fn avg_over_roots(
    p: u64,
    xs: std::ops::RangeInclusive<u64>,
    a: u64,
    b: u64,
    fixed: &[(u64, u64)],
) -> Complex64 {
    sum_over_roots(p, xs, a, b, fixed) / primitive_roots(p).len() as f64
}

/// Five-variable count of `(y, x1..x4) in [1, t]^5` with
/// `l^x1 + l^x2 = l^x3 + l^x4` and `l^(x1 y) + l^(x2 y) = l^(x3 y) + l^(x4 y)`
/// mod `p`, where `l = lambda^d` and `t = (p-1)/d`.
pub fn brute_td(p: u64, lambda: u64, d: u64) -> u64 {
    let t = (p - 1) / d;
    let l = power(lambda, d, p);
    let mut count = 0;
    for y in 1..=t {
        for x1 in 1..=t {
            for x2 in 1..=t {
                for x3 in 1..=t {
                    for x4 in 1..=t {
                        let lin = (power(l, x1, p) + power(l, x2, p)) % p
                            == (power(l, x3, p) + power(l, x4, p)) % p;
                        let tw = (power(l, x1 * y, p) + power(l, x2 * y, p)) % p
                            == (power(l, x3 * y, p) + power(l, x4 * y, p)) % p;
                        if lin && tw {
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    count
}

/// `sum_{y=1}^{p-1} |sum_{x <= p-1, gcd(x, p-1) = 1} e_p(a lambda^x + b lambda^(x y))|^4`.
pub fn brute_h(p: u64, lambda: u64, a: u64, b: u64) -> f64 {
    (1..p)
        .map(|y| {
            let s: Complex64 = (1..p)
                .filter(|&x| gcd(x, p - 1) == 1)
                .map(|x| ep(a * power(lambda, x, p) + b * power(lambda, x * y, p), p))
                .sum();
            s.norm_sqr().powi(2)
        })
        .sum()
}

/// `|sum_{y=lo}^{hi} e_p(k y)|` by direct summation.
pub fn brute_geometric(p: u64, k: u64, lo: u64, hi: u64) -> f64 {
    (lo..=hi)
        .map(|y| ep(k * y % p, p))
        .sum::<Complex64>()
        .norm()
}
