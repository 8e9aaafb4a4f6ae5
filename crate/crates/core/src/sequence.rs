//! The sequences
//!
//! ```text
//! u_n = (n!)²/4ⁿ · Σ_{k=1}^{n} (2 + k·H_{k−1}) · 2^k / k²
//! v_n = ((2n)!)²/4ⁿ · Σ_{k=1}^{n} (2 + (n+k)·H_{n+k−1}) / ((n+k)² · 2^{n−k})
//! ```
//!
//! each computed along two independent routes, plus the bit-counting
//! inequality `2·(s₂(n) + ⌊log₂ n⌋) ≤ n + 1` that makes `u_n` integral for
//! `n ≥ 8`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::arith::{
    digit_sum_p, double_factorial_odd, factorial, lcm_valuation, legendre_valuation, valuation,
    BigRat, HarmonicTable, Prime, Valuation,
};
use crate::error::{Error, Result};

/// Indices where `u_n` is not an integer.
pub const EXCEPTIONAL: [u64; 3] = [3, 5, 7];

pub fn is_exceptional(n: u64) -> bool {
    EXCEPTIONAL.contains(&n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Direct,
    Recurrence,
    Identity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequencePoint {
    pub n: u64,
    pub value: BigRat,
    pub is_integer: bool,
    pub route: Route,
}

impl SequencePoint {
    fn new(n: u64, value: BigRat, route: Route) -> Self {
        SequencePoint {
            n,
            is_integer: value.is_integer(),
            value,
            route,
        }
    }
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e as usize
}

fn require_positive(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::NTooSmall { n, min: 1 })
    } else {
        Ok(())
    }
}

/// `Σ_{k=1}^{n} (2 + k·H_{k−1}) · 2^k / k²`.
pub fn corollary_sum(n: u64, table: &HarmonicTable) -> BigRat {
    table.extend_to(n as usize);
    let mut total = BigRat::zero();
    for k in 1..=n {
        let kb = BigInt::from(k);
        let inner = table.harmonic(k as usize - 1) * &kb + BigInt::from(2);
        total += inner * BigRat::new(pow2(k), &kb * &kb);
    }
    total
}

/// `u_n` straight from its defining sum.
pub fn u_direct(n: u64, table: &HarmonicTable) -> Result<SequencePoint> {
    require_positive(n)?;
    let f = factorial(n);
    let value = corollary_sum(n, table) * BigRat::new(&f * &f, pow2(2 * n));
    Ok(SequencePoint::new(n, value, Route::Direct))
}

/// `u_0, ..., u_{n_max}` via `u_n = (n²/4)·u_{n−1} + ((n−1)!²/2ⁿ)·(2 + n·H_{n−1})`.
pub fn u_recurrence_upto(n_max: u64, table: &HarmonicTable) -> Vec<SequencePoint> {
    table.extend_to(n_max as usize);
    let mut out = Vec::with_capacity(n_max as usize + 1);
    let mut u = BigRat::zero();
    let mut fact = BigInt::one(); // (n−1)!
    out.push(SequencePoint::new(0, u.clone(), Route::Recurrence));
    for n in 1..=n_max {
        let nb = BigInt::from(n);
        let forcing = BigRat::new(&fact * &fact, pow2(n))
            * (table.harmonic(n as usize - 1) * &nb + BigInt::from(2));
        u = u * BigRat::new(&nb * &nb, BigInt::from(4)) + forcing;
        fact *= &nb;
        out.push(SequencePoint::new(n, u.clone(), Route::Recurrence));
    }
    out
}

pub fn u_recurrence(n: u64, table: &HarmonicTable) -> SequencePoint {
    u_recurrence_upto(n, table).pop().expect("nonempty")
}

/// The valuation chain for `n ≥ 8`:
/// `ϑ₂(u_n) = 2(n − s₂(n)) − 2n + ϑ₂(Σ) ≥ n + 1 − 2(s₂(n) + ⌊log₂ n⌋) ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationChain {
    /// ϑ₂(u_n) read off the exact value.
    pub valuation: Valuation,
    /// ϑ₂(u_n) assembled from Legendre's formula and ϑ₂ of the sum.
    pub via_legendre: Valuation,
    pub lower_bound: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem2Check {
    pub point: SequencePoint,
    /// Positive integer outside {3, 5, 7}; non-integer inside.
    pub pass: bool,
    pub chain: Option<ValuationChain>,
}

pub fn theorem2_check(n: u64, table: &HarmonicTable) -> Result<Theorem2Check> {
    require_positive(n)?;
    let sum = corollary_sum(n, table);
    let f = factorial(n);
    let value = &sum * BigRat::new(&f * &f, pow2(2 * n));
    let point = SequencePoint::new(n, value, Route::Direct);

    let shape_ok = if is_exceptional(n) {
        !point.is_integer
    } else {
        point.is_integer && point.value.is_positive()
    };

    let chain = (n >= 8).then(|| {
        let two = Prime::TWO;
        let legendre = legendre_valuation(two, n) as i64;
        let via_legendre = valuation(two, &sum).offset(2 * legendre - 2 * n as i64);
        let lower_bound =
            n as i64 + 1 - 2 * (digit_sum_p(2, n) as i64 + lcm_valuation(two, n) as i64);
        let exact = valuation(two, &point.value);
        ValuationChain {
            valuation: exact,
            via_legendre,
            lower_bound,
            holds: exact == via_legendre && exact.at_least(lower_bound) && lower_bound >= 0,
        }
    });
    let pass = shape_ok && chain.as_ref().is_none_or(|c| c.holds);
    Ok(Theorem2Check { point, pass, chain })
}

/// `v_n` straight from its defining sum.
pub fn v_direct(n: u64, table: &HarmonicTable) -> Result<SequencePoint> {
    require_positive(n)?;
    table.extend_to(2 * n as usize);
    let mut total = BigRat::zero();
    for k in 1..=n {
        let m = BigInt::from(n + k);
        let numer = table.harmonic((n + k - 1) as usize) * &m + BigInt::from(2);
        total += numer / (&m * &m * pow2(n - k));
    }
    let f = factorial(2 * n);
    let value = total * BigRat::new(&f * &f, pow2(2 * n));
    Ok(SequencePoint::new(n, value, Route::Direct))
}

/// `v_n = u_{2n} − ((2n−1)!!)²·u_n`.
pub fn v_identity(n: u64, table: &HarmonicTable) -> Result<SequencePoint> {
    let u_2n = u_direct(2 * n, table)?.value;
    let u_n = u_direct(n, table)?.value;
    let d = double_factorial_odd(n);
    let value = u_2n - u_n * BigRat::from_integer(&d * &d);
    Ok(SequencePoint::new(n, value, Route::Identity))
}

/// `n²(2n−1)²/4`, the recurrence multiplier for `v`.
fn v_multiplier(n: u64) -> BigRat {
    let m = BigInt::from(n) * BigInt::from(2 * n - 1);
    BigRat::new(&m * &m, BigInt::from(4))
}

/// `K_n = v_n − (n²(2n−1)²/4)·v_{n−1}` with `v_0 = 0`.
pub fn k_defect(n: u64, table: &HarmonicTable) -> Result<BigRat> {
    let v_n = v_direct(n, table)?.value;
    let v_prev = if n == 1 {
        BigRat::zero()
    } else {
        v_direct(n - 1, table)?.value
    };
    Ok(v_n - v_multiplier(n) * v_prev)
}

/// `K_1..=K_{n_max}` from a list `v_0, v_1, ..., v_{n_max}`.
pub fn k_defects_from(v: &[BigRat]) -> Vec<BigRat> {
    v.windows(2)
        .enumerate()
        .map(|(i, w)| &w[1] - v_multiplier(i as u64 + 1) * &w[0])
        .collect()
}

/// One row of the bit-counting inequality, in doubled integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lemma1Record {
    pub n: u64,
    /// s₂(n) + ⌊log₂ n⌋
    pub lhs: u64,
    /// n + 1
    pub rhs_doubled: u64,
    /// 2·lhs ≤ n + 1
    pub holds: bool,
}

/// Panics for `n = 0`.
pub fn lemma1_record(n: u64) -> Lemma1Record {
    assert!(n >= 1, "lemma1_record needs n >= 1");
    let lhs = n.count_ones() as u64 + (63 - n.leading_zeros() as u64);
    let rhs_doubled = n + 1;
    Lemma1Record {
        n,
        lhs,
        rhs_doubled,
        holds: 2 * lhs <= rhs_doubled,
    }
}

/// Records for `1..=n_max`; errors on the first failure at `n ≥ 8`.
pub fn lemma1_scan(n_max: u64) -> Result<Vec<Lemma1Record>> {
    require_positive(n_max)?;
    let records: Vec<Lemma1Record> = (1..=n_max).into_par_iter().map(lemma1_record).collect();
    if let Some(bad) = records.iter().find(|r| r.n >= 8 && !r.holds) {
        return Err(Error::Lemma1Counterexample {
            n: bad.n,
            lhs_doubled: 2 * bad.lhs,
        });
    }
    Ok(records)
}
