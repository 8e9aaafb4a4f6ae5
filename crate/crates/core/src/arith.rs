//! Exact arithmetic and the elementary number-theoretic functions.
//!
//! Rationals are [`num_rational::BigRational`], which is always kept in
//! lowest terms with a positive denominator. Everything in this module is
//! integer-only; there is no floating point anywhere.

use std::fmt;
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, reduced, with positive denominator.
pub type BigRat = num_rational::BigRational;

/// Builds `num/den` from machine integers. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> BigRat {
    BigRat::new(BigInt::from(num), BigInt::from(den))
}

/// Renders a rational as `"num/den"`, or `"num"` when it is an integer.
pub fn format_rat(r: &BigRat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A prime number, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub const TWO: Prime = Prime(2);

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The p-adic valuation of a rational: finite, or infinite for zero.
///
/// `Finite(_) < Infinite`, so comparisons against lower bounds treat the
/// valuation of zero as satisfying every bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// `self ≥ bound`, with `Infinite` above every finite bound.
    pub fn at_least(self, bound: i64) -> bool {
        self >= Valuation::Finite(bound)
    }

    /// Shifts by an integer; infinity absorbs the shift.
    pub fn offset(self, k: i64) -> Valuation {
        match self {
            Valuation::Finite(v) => Valuation::Finite(v + k),
            Valuation::Infinite => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => v.fmt(f),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn int_valuation(p: Prime, x: &BigInt) -> u64 {
    debug_assert!(!x.is_zero());
    if p.0 == 2 {
        return x.trailing_zeros().unwrap_or(0);
    }
    let mut m = x.magnitude().clone();
    let p_big = BigUint::from(p.0);
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p_big);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// ϑ_p(r) for an already-validated prime.
pub fn valuation(p: Prime, r: &BigRat) -> Valuation {
    if r.is_zero() {
        return Valuation::Infinite;
    }
    let num = int_valuation(p, r.numer()) as i64;
    let den = int_valuation(p, r.denom()) as i64;
    Valuation::Finite(num - den)
}

/// ϑ_p(r), rejecting a non-prime `p`.
pub fn valuation_p(p: u64, r: &BigRat) -> Result<Valuation> {
    Ok(valuation(Prime::new(p)?, r))
}

/// Sum of the base-`p` digits of `n`.
pub fn digit_sum_p(p: u64, mut n: u64) -> u64 {
    assert!(p >= 2, "digit base must be at least 2");
    let mut s = 0;
    while n > 0 {
        s += n % p;
        n /= p;
    }
    s
}

/// ϑ_p(n!) by Legendre's formula `(n − s_p(n)) / (p − 1)`.
pub fn legendre_valuation(p: Prime, n: u64) -> u64 {
    let p = p.0;
    let diff = n - digit_sum_p(p, n);
    assert_eq!(
        diff % (p - 1),
        0,
        "n - s_p(n) not divisible by p - 1 (p = {p}, n = {n})"
    );
    diff / (p - 1)
}

/// ϑ_p(lcm(1..n)) = ⌊log_p n⌋, by comparing powers of p against n.
pub fn lcm_valuation(p: Prime, n: u64) -> u32 {
    assert!(n >= 1, "lcm_valuation needs n >= 1");
    let mut e = 0;
    let mut pow: u64 = p.0;
    while pow <= n {
        e += 1;
        match pow.checked_mul(p.0) {
            Some(next) => pow = next,
            None => break,
        }
    }
    e
}

/// lcm(1, 2, ..., n); 1 for n = 0.
pub fn lcm_upto(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc.lcm(&BigInt::from(k)))
}

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// 1·3·5⋯(2n−1) = (2n)! / (2ⁿ n!).
pub fn double_factorial_odd(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * (2 * k - 1))
}

/// Cache of exact harmonic numbers H_0, H_1, ... that extends on demand.
///
/// Reads take a shared lock, so one table can be handed to a worker pool;
/// extending it first with [`HarmonicTable::extend_to`] keeps the workers
/// from contending on the write lock.
#[derive(Debug)]
pub struct HarmonicTable {
    entries: RwLock<Vec<BigRat>>,
}

impl Default for HarmonicTable {
    fn default() -> Self {
        Self::new()
    }
}

impl HarmonicTable {
    pub fn new() -> Self {
        HarmonicTable {
            entries: RwLock::new(vec![BigRat::zero()]),
        }
    }

    pub fn with_max(n: usize) -> Self {
        let t = Self::new();
        t.extend_to(n);
        t
    }

    /// Largest index currently cached.
    pub fn max_index(&self) -> usize {
        self.entries.read().unwrap().len() - 1
    }

    pub fn extend_to(&self, n: usize) {
        if n <= self.max_index() {
            return;
        }
        let mut entries = self.entries.write().unwrap();
        while entries.len() <= n {
            let k = entries.len();
            let step = BigRat::new(BigInt::one(), BigInt::from(k));
            let next = &entries[k - 1] + &step;
            debug_assert_eq!(&next - &entries[k - 1], step, "telescoping broken at {k}");
            entries.push(next);
        }
    }

    /// Exact H_n, extending the table if needed.
    pub fn harmonic(&self, n: usize) -> BigRat {
        self.extend_to(n);
        self.entries.read().unwrap()[n].clone()
    }
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &w in &WITNESSES {
        let mut x = pow_mod(w, d, n);
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

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Converts an integer-valued rational to `i64` if it fits.
pub fn rat_to_i64(r: &BigRat) -> Option<i64> {
    if r.is_integer() {
        r.numer().to_i64()
    } else {
        None
    }
}

/// `true` when `r` is a positive integer.
pub fn is_positive_integer(r: &BigRat) -> bool {
    r.is_integer() && r.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    /// Oracle: strip factors of p from numerator and denominator separately.
    fn valuation_by_division(p: i64, num: i64, den: i64) -> i64 {
        let (mut x, mut y, mut v) = (num, den, 0);
        while x % p == 0 {
            x /= p;
            v += 1;
        }
        while y % p == 0 {
            y /= p;
            v -= 1;
        }
        v
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation_p(2, &rat(8, 1)).unwrap(), Valuation::Finite(3));
        assert_eq!(valuation_p(3, &rat(1, 1)).unwrap(), Valuation::Finite(0));
        let oracle = valuation_by_division(2, 208, 9);
        assert_eq!(oracle, 4);
        assert_eq!(
            valuation_p(2, &rat(208, 9)).unwrap(),
            Valuation::Finite(oracle)
        );
        assert_eq!(valuation_p(5, &rat(3, 50)).unwrap(), Valuation::Finite(-2));
        assert_eq!(valuation_p(7, &rat(-49, 3)).unwrap(), Valuation::Finite(2));
    }

    #[test]
    fn valuation_of_zero_is_infinite() {
        assert_eq!(
            valuation_p(5, &BigRat::zero()).unwrap(),
            Valuation::Infinite
        );
        assert!(Valuation::Infinite.at_least(i64::MAX));
        assert!(Valuation::Finite(3) < Valuation::Infinite);
    }

    #[test]
    fn valuation_rejects_composite() {
        assert!(matches!(
            valuation_p(4, &rat(8, 1)),
            Err(Error::NotPrime(4))
        ));
        assert!(matches!(
            valuation_p(1, &rat(8, 1)),
            Err(Error::NotPrime(1))
        ));
    }

    #[test]
    fn digit_sums() {
        assert_eq!(digit_sum_p(2, 8), 1);
        assert_eq!(digit_sum_p(2, 7), 3);
        // 17 = 122 in base 3
        assert_eq!(digit_sum_p(3, 17), 5);
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(int_valuation(p(2), &factorial(4)), 3);
        assert_eq!(legendre_valuation(p(2), 4), 3);
        assert_eq!(legendre_valuation(p(2), 1), 0);
        assert_eq!(25 / 5 + 25 / 25, 6);
        assert_eq!(legendre_valuation(p(5), 25), 6);
    }

    #[test]
    fn lcm_valuation_examples() {
        assert_eq!(lcm_valuation(p(2), 4), 2);
        assert_eq!(lcm_valuation(p(2), 7), 2);
        assert_eq!(int_valuation(p(3), &lcm_upto(100)), 4);
        assert_eq!(lcm_valuation(p(3), 100), 4);
        assert_eq!(lcm_valuation(p(2), u64::MAX), 63);
        assert_eq!(lcm_valuation(p(2), 1), 0);
    }

    #[test]
    fn lcm_valuation_at_powers_of_two() {
        for e in 1..63 {
            let pow = 1u64 << e;
            assert_eq!(lcm_valuation(p(2), pow), e);
            assert_eq!(lcm_valuation(p(2), pow - 1), e - 1);
        }
    }

    #[test]
    fn harmonic_examples() {
        let t = HarmonicTable::new();
        assert_eq!(t.harmonic(0), BigRat::zero());
        assert_eq!(t.harmonic(1), BigRat::one());
        assert_eq!(t.harmonic(3), rat(1, 1) + rat(1, 2) + rat(1, 3));
        assert_eq!(t.harmonic(3), rat(11, 6));
        assert_eq!(t.max_index(), 3);
        t.extend_to(2);
        assert_eq!(t.max_index(), 3);
    }

    #[test]
    fn harmonic_telescopes() {
        let t = HarmonicTable::with_max(60);
        for k in 1..=60 {
            assert_eq!(t.harmonic(k) - t.harmonic(k - 1), rat(1, k as i64));
        }
    }

    #[test]
    fn double_factorial_examples() {
        assert_eq!(double_factorial_odd(1), BigInt::from(1));
        for n in 1..30u64 {
            let via_factorials = factorial(2 * n) / (BigInt::from(2).pow(n as u32) * factorial(n));
            assert_eq!(double_factorial_odd(n), via_factorials);
        }
        assert_eq!(double_factorial_odd(3), BigInt::from(720 / 48));
        assert_eq!(double_factorial_odd(4), BigInt::from(40320 / 384));
    }

    fn trial_division(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(!is_prime(91));
        for n in 0..20_000 {
            assert_eq!(is_prime(n), trial_division(n), "n = {n}");
        }
        assert!(is_prime(18_446_744_073_709_551_557));
        // strong pseudoprime to bases 2..=37 below 2^64 would be caught; Carmichael checks
        assert!(!is_prime(3_215_031_751));
        assert!(!is_prime(3_825_123_056_546_413_051));
        assert!(!is_prime(u64::MAX));
    }

    #[test]
    fn formatting() {
        assert_eq!(format_rat(&rat(31, 4)), "31/4");
        assert_eq!(format_rat(&rat(52, 1)), "52");
        assert_eq!(format_rat(&rat(-6, 4)), "-3/2");
        assert_eq!(Valuation::Infinite.to_string(), "inf");
    }
}
