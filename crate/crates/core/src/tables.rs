//! Exact integer and rational tables: Bernoulli numbers, generalized
//! Bernoulli numbers for the quadratic character mod 4, central factorial
//! numbers, and divisor sums.
//!
//! Everything here is exact arithmetic over `BigInt`/`BigRational`; these
//! tables feed the series decompositions and the Eisenstein expansions.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::sync::Mutex;

use crate::Q;

/// The quadratic Dirichlet character mod 4: `1` on `1 mod 4`, `-1` on
/// `3 mod 4`, `0` on even integers.
pub fn chi4(n: i64) -> i64 {
    match n.rem_euclid(4) {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// Tangent numbers `T_1..=T_n` (coefficients of `tan x = Σ T_k x^{2k-1}/(2k-1)!`),
/// computed by the classical in-place integer triangle. All-integer arithmetic,
/// no rational intermediates.
fn tangent_numbers(n: usize) -> Vec<BigInt> {
    if n == 0 {
        return Vec::new();
    }
    let mut t: Vec<BigInt> = Vec::with_capacity(n + 1);
    t.push(BigInt::zero()); // index 0 unused
    t.push(BigInt::one());
    for k in 2..=n {
        let prev = t[k - 1].clone();
        t.push(BigInt::from(k as u64 - 1) * prev);
    }
    for k in 2..=n {
        for j in k..=n {
            let a = BigInt::from((j - k) as u64) * &t[j - 1];
            let b = BigInt::from((j - k + 2) as u64) * &t[j];
            t[j] = a + b;
        }
    }
    t.remove(0);
    t
}

/// Bernoulli number `B_n` (convention `B_1 = -1/2`).
///
/// Even indices are computed from tangent numbers:
/// `|B_{2m}| = 2m * T_m / (2^{2m}(2^{2m}-1))` with sign `(-1)^{m+1}`.
/// Supported up to `n = 600`; results are cached.
pub fn bernoulli(n: usize) -> Q {
    assert!(n <= 600, "bernoulli: index {n} out of supported range");
    if n == 0 {
        return Q::one();
    }
    if n == 1 {
        return Q::new(BigInt::from(-1), BigInt::from(2));
    }
    if n % 2 == 1 {
        return Q::zero();
    }
    static CACHE: Mutex<Option<(usize, Vec<Q>)>> = Mutex::new(None);
    let mut guard = CACHE.lock().unwrap();
    let m = n / 2;
    let need_refill = match &*guard {
        Some((len, _)) => *len < m,
        None => true,
    };
    if need_refill {
        let cap = m.max(64);
        let tang = tangent_numbers(cap);
        let mut vals = Vec::with_capacity(cap);
        for k in 1..=cap {
            let two_pow = BigInt::one() << (2 * k);
            let den = &two_pow * (&two_pow - BigInt::one());
            let num = BigInt::from(2 * k as u64) * &tang[k - 1];
            let mut b = Q::new(num, den);
            if k % 2 == 0 {
                b = -b;
            }
            vals.push(b);
        }
        *guard = Some((cap, vals));
    }
    guard.as_ref().unwrap().1[m - 1].clone()
}

/// Bernoulli polynomial `B_k(x) = Σ_j C(k,j) B_j x^{k-j}`, evaluated at a rational.
fn bernoulli_poly_at(k: usize, x: &Q) -> Q {
    let mut acc = Q::zero();
    let mut binom = BigInt::one();
    // iterate j = 0..=k with C(k, j)
    for j in 0..=k {
        if j > 0 {
            binom = &binom * BigInt::from((k - j + 1) as u64) / BigInt::from(j as u64);
        }
        let bj = bernoulli(j);
        if !bj.is_zero() {
            let xpow = crate::q_pow(x, (k - j) as i64);
            acc += Q::from(binom.clone()) * bj * xpow;
        }
    }
    acc
}

/// Generalized Bernoulli number `B_{k,χ}` for the quadratic character mod 4,
/// via `B_{k,χ} = f^{k-1} Σ_{a=1}^{f} χ(a) B_k(a/f)` with `f = 4`.
pub fn bernoulli_chi4(k: usize) -> Q {
    let f = BigInt::from(4);
    let mut acc = Q::zero();
    for a in 1..=4i64 {
        let c = chi4(a);
        if c == 0 {
            continue;
        }
        let x = Q::new(BigInt::from(a), f.clone());
        let v = bernoulli_poly_at(k, &x);
        acc += if c > 0 { v } else { -v };
    }
    let scale = Q::from(crate::int_pow(&f, (k as i64) - 1));
    acc * scale
}

/// Central factorial numbers of even index: coefficients `t(2n, 2k)` for
/// `k = 1..=n` in `x² Π_{j=1}^{n-1} (x² - j²) = Σ_k t(2n,2k) x^{2k}`.
pub fn central_factorial_even(n: usize) -> Vec<BigInt> {
    assert!(n >= 1);
    // polynomial in u = x², starting from u itself
    let mut poly: Vec<BigInt> = vec![BigInt::zero(), BigInt::one()]; // u
    for j in 1..n {
        let j2 = BigInt::from((j * j) as u64);
        // poly *= (u - j²)
        let mut next = vec![BigInt::zero(); poly.len() + 1];
        for (d, c) in poly.iter().enumerate() {
            next[d + 1] += c;
            next[d] -= c * &j2;
        }
        poly = next;
    }
    // u^k coefficient = t(2n, 2k); degrees 1..=n
    poly.drain(0..1);
    poly
}

/// Central factorial numbers of odd index: coefficients `t(2n+1, 2k+1)` for
/// `k = 0..=n` in `x Π_{j=1}^{n} (x² - (2j-1)²/4) = Σ_k t(2n+1,2k+1) x^{2k+1}`.
pub fn central_factorial_odd(n: usize) -> Vec<Q> {
    let mut poly: Vec<Q> = vec![Q::one()]; // constant 1 in u = x²
    for j in 1..=n {
        let odd = BigInt::from((2 * j - 1) as u64);
        let sq = Q::new(&odd * &odd, BigInt::from(4));
        let mut next = vec![Q::zero(); poly.len() + 1];
        for (d, c) in poly.iter().enumerate() {
            next[d + 1] += c;
            next[d] -= c * &sq;
        }
        poly = next;
    }
    poly
}

/// Memoized central factorial lookup `t(2n, 2k)` as a rational (0 outside range).
pub fn t_even(n: usize, k: usize) -> Q {
    static CACHE: Mutex<Option<HashMap<usize, Vec<BigInt>>>> = Mutex::new(None);
    if k < 1 || k > n {
        return Q::zero();
    }
    let mut guard = CACHE.lock().unwrap();
    let map = guard.get_or_insert_with(HashMap::new);
    let row = map
        .entry(n)
        .or_insert_with(|| central_factorial_even(n));
    Q::from(row[k - 1].clone())
}

/// Memoized central factorial lookup `t(2n+1, 2k+1)` (0 outside range).
pub fn t_odd(n: usize, k: usize) -> Q {
    static CACHE: Mutex<Option<HashMap<usize, Vec<Q>>>> = Mutex::new(None);
    if k > n {
        return Q::zero();
    }
    let mut guard = CACHE.lock().unwrap();
    let map = guard.get_or_insert_with(HashMap::new);
    let row = map.entry(n).or_insert_with(|| central_factorial_odd(n));
    row[k].clone()
}

/// All divisors of `n` (unordered).
fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out
}

/// Divisor power sum `σ_k(n) = Σ_{d|n} d^k` (and `σ_0` for `k = 0`).
pub fn sigma(k: u32, n: u64) -> BigInt {
    let mut acc = BigInt::zero();
    for d in divisors(n) {
        acc += crate::int_pow(&BigInt::from(d), k as i64);
    }
    acc
}

/// Generalized divisor sum `σ_{k}^{ψ,φ}(n) = Σ_{m|n} ψ(n/m) φ(m) m^{k}`,
/// where each character is either trivial (`false`) or χ mod 4 (`true`).
pub fn sigma_twisted(k: u32, n: u64, psi_is_chi4: bool, phi_is_chi4: bool) -> BigInt {
    let mut acc = BigInt::zero();
    for m in divisors(n) {
        let psi_v = if psi_is_chi4 { chi4((n / m) as i64) } else { 1 };
        let phi_v = if phi_is_chi4 { chi4(m as i64) } else { 1 };
        match psi_v * phi_v {
            0 => {}
            s => {
                let term = crate::int_pow(&BigInt::from(m), k as i64);
                acc += if s > 0 { term } else { -term };
            }
        }
    }
    acc
}

/// Factorial as `BigInt`.
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i as u64);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{Signed, ToPrimitive};

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn bernoulli_small_values() {
        assert_eq!(bernoulli(0), Q::one());
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(2), q(1, 6));
        assert_eq!(bernoulli(4), q(-1, 30));
        assert_eq!(bernoulli(6), q(1, 42));
        assert_eq!(bernoulli(8), q(-1, 30));
        assert_eq!(bernoulli(10), q(5, 66));
        assert_eq!(bernoulli(12), q(-691, 2730));
        assert_eq!(bernoulli(14), q(7, 6));
        assert_eq!(bernoulli(3), Q::zero());
    }

    #[test]
    fn bernoulli_matches_defining_recurrence() {
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0 for m ≥ 1, an independent check on
        // the tangent-number route.
        for m in 1..=60usize {
            let mut acc = Q::zero();
            let mut binom = BigInt::one(); // C(m+1, 0)
            for j in 0..=m {
                if j > 0 {
                    binom = &binom * BigInt::from((m + 2 - j) as u64) / BigInt::from(j as u64);
                }
                acc += Q::from(binom.clone()) * bernoulli(j);
            }
            assert!(acc.is_zero(), "recurrence fails at m={m}");
        }
    }

    #[test]
    fn bernoulli_large_index_supported() {
        // Upper end of the supported range: sign (-1)^{m+1} with m = 300.
        let b = bernoulli(600);
        assert!(b.is_negative());
    }

    #[test]
    fn bernoulli_sign_pattern() {
        for m in 1..=20usize {
            let b = bernoulli(2 * m);
            assert_eq!(b.is_positive(), m % 2 == 1, "sign at 2m={}", 2 * m);
        }
    }

    #[test]
    fn bernoulli_chi4_values() {
        assert_eq!(bernoulli_chi4(1), q(-1, 2));
        assert_eq!(bernoulli_chi4(3), q(3, 2));
        assert_eq!(bernoulli_chi4(5), q(-25, 2));
        assert_eq!(bernoulli_chi4(7), q(427, 2));
        assert_eq!(bernoulli_chi4(9), q(-12465, 2));
        // even indices vanish for the odd character
        assert_eq!(bernoulli_chi4(2), Q::zero());
        assert_eq!(bernoulli_chi4(4), Q::zero());
    }

    #[test]
    fn central_factorial_examples() {
        // x²(x²-1)(x²-4)(x²-9) = x⁸ - 14x⁶ + 49x⁴ - 36x²
        let row = central_factorial_even(4);
        let as_i64: Vec<i64> = row.iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(as_i64, vec![-36, 49, -14, 1]);
        // t(3,1) = -1/4
        assert_eq!(t_odd(1, 0), q(-1, 4));
        assert_eq!(t_odd(1, 1), Q::one());
        // t(2,2) = 1 (bare x²)
        assert_eq!(t_even(1, 1), Q::one());
    }

    #[test]
    fn central_factorial_even_vanishing() {
        // Σ_r t(2s,2r) m^{2r-1} = 0 for 1 ≤ m ≤ s-1 (the defining roots).
        for s in 2..=12usize {
            for m in 1..(s as i64) {
                let mut acc = Q::zero();
                for r in 1..=s {
                    acc += t_even(s, r) * Q::from(crate::int_pow(&BigInt::from(m), 2 * r as i64 - 1));
                }
                assert!(acc.is_zero(), "vanishing fails at s={s}, m={m}");
            }
        }
    }

    #[test]
    fn central_factorial_odd_scaled_integrality() {
        // 4^m t(2s+1, 2s-2m+1) is an integer for 0 ≤ m ≤ s, s ≤ 10.
        for s in 1..=10usize {
            for m in 0..=s {
                let val = t_odd(s, s - m) * Q::from(crate::int_pow(&BigInt::from(4), m as i64));
                assert!(val.is_integer(), "4^{m} t({},{}) not integral", 2 * s + 1, 2 * (s - m) + 1);
            }
        }
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(1, 6), BigInt::from(12));
        assert_eq!(sigma(3, 1), BigInt::from(1));
        assert_eq!(sigma(3, 2), BigInt::from(9));
        assert_eq!(sigma(3, 3), BigInt::from(28));
        assert_eq!(sigma(3, 4), BigInt::from(73));
        assert_eq!(sigma(0, 12), BigInt::from(6));
    }

    #[test]
    fn sigma_twisted_values() {
        // σ_0^{1,χ}(5) = Σ_{m|5} χ(m) = χ(1) + χ(5) = 2
        assert_eq!(sigma_twisted(0, 5, false, true), BigInt::from(2));
        // σ_0^{1,χ}(n) for n = 1..5 → 1, 1, 0, 1, 2
        let want = [1i64, 1, 0, 1, 2];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(sigma_twisted(0, n as u64 + 1, false, true), BigInt::from(*w));
        }
        // symmetric at k = 0: σ_0^{χ,1} = σ_0^{1,χ}
        for n in 1..=40u64 {
            assert_eq!(
                sigma_twisted(0, n, false, true),
                sigma_twisted(0, n, true, false)
            );
        }
        // σ_2^{1,χ}(3): χ(3)·9·... wait: ψ=1, φ=χ: Σ χ(m)m²: m=1: 1, m=3: -9 → -8
        assert_eq!(sigma_twisted(2, 3, false, true), BigInt::from(-8));
    }

    #[test]
    fn chi4_character() {
        assert_eq!(chi4(1), 1);
        assert_eq!(chi4(3), -1);
        assert_eq!(chi4(2), 0);
        assert_eq!(chi4(-1), -1); // -1 ≡ 3 mod 4
        assert_eq!(chi4(5), 1);
        // multiplicativity on a grid
        for a in 1..20i64 {
            for b in 1..20i64 {
                assert_eq!(chi4(a * b), chi4(a) * chi4(b));
            }
        }
    }

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(7), BigInt::from(5040));
    }
}
