//! Truncated formal power series over exact rationals.
//!
//! The main client is the vanishing argument for
//!
//! ```text
//! R_n(X) = Σ_{k=1}^{n} (X/a)^k / k² + Σ_{k=1}^{n} (X/(X−a))^k / k² + Σ_{k=1}^{n} H_{k−1}/k · (X/a)^k
//! ```
//!
//! which agrees with `Li₂(X/a) + Li₂(X/(X−a)) + ½·log²(1 − X/a)` up to degree
//! `n` and therefore has no terms of degree `≤ n`. Clearing the denominators
//! `aⁿ (X−a)ⁿ lcm(1..n)²` and dividing out `X^{n+1}` leaves an integer
//! polynomial `U_n`, see [`extract_un`].

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{format_rat, lcm_upto, BigRat};
use crate::error::{Error, Result};

/// Default number of leading `U_n` coefficients recovered by [`extract_un`].
pub const DEFAULT_EXTRA_ORDER: usize = 5;

/// A power series known modulo `X^{order+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<BigRat>,
}

impl TruncSeries {
    pub fn zero(order: usize) -> Self {
        TruncSeries {
            coeffs: vec![BigRat::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(BigRat::one(), 0, order)
    }

    /// `c·X^degree`; zero if `degree > order`.
    pub fn monomial(c: BigRat, degree: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if degree <= order {
            s.coeffs[degree] = c;
        }
        s
    }

    /// The series `X`.
    pub fn x(order: usize) -> Self {
        Self::monomial(BigRat::one(), 1, order)
    }

    /// Takes `coeffs` as the low-order terms, padding with zeros or dropping
    /// anything above `order`.
    pub fn from_coeffs(mut coeffs: Vec<BigRat>, order: usize) -> Self {
        coeffs.resize(order + 1, BigRat::zero());
        TruncSeries { coeffs }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> BigRat) -> Self {
        TruncSeries {
            coeffs: (0..=order).map(f).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    pub fn coeff(&self, degree: usize) -> &BigRat {
        &self.coeffs[degree]
    }

    /// Drops every term above `order`. Panics if `order > self.order()`.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(
            order <= self.order(),
            "cannot raise precision by truncating"
        );
        TruncSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &BigRat) -> Self {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// `self += c·other` over the common precision.
    pub fn add_scaled(&mut self, other: &TruncSeries, c: &BigRat) {
        let order = self.order().min(other.order());
        self.coeffs.truncate(order + 1);
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !y.is_zero() {
                *x += y * c;
            }
        }
    }

    /// `self^k` by repeated squaring, truncating after every product.
    pub fn pow(&self, mut k: u32) -> Self {
        let mut acc = Self::one(self.order());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse. `None` if the constant term is zero.
    pub fn inverse(&self) -> Option<Self> {
        let c0 = self.coeffs[0].clone();
        if c0.is_zero() {
            return None;
        }
        let c0_inv = c0.recip();
        let mut inv: Vec<BigRat> = Vec::with_capacity(self.coeffs.len());
        inv.push(c0_inv.clone());
        for m in 1..=self.order() {
            let mut acc = BigRat::zero();
            for j in 1..=m {
                if !self.coeffs[j].is_zero() {
                    acc += &self.coeffs[j] * &inv[m - j];
                }
            }
            inv.push(-acc * &c0_inv);
        }
        Some(TruncSeries { coeffs: inv })
    }

    /// `self(inner)` by Horner's rule. Requires `inner` to have no constant
    /// term; the result has the smaller of the two precisions.
    pub fn compose(&self, inner: &TruncSeries) -> Option<Self> {
        if !inner.coeffs[0].is_zero() {
            return None;
        }
        let order = self.order().min(inner.order());
        let inner = inner.truncate(order);
        let mut acc = Self::zero(order);
        for c in self.coeffs.iter().rev() {
            acc = &acc * &inner;
            acc.coeffs[0] += c;
        }
        Some(acc)
    }
}

impl Add for &TruncSeries {
    type Output = TruncSeries;

    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        let mut out = self.clone();
        out.add_scaled(rhs, &BigRat::one());
        out
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;

    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        let mut out = self.clone();
        out.add_scaled(rhs, &-BigRat::one());
        out
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;

    fn neg(self) -> TruncSeries {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;

    /// Cauchy product truncated at the smaller precision.
    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        let order = self.order().min(rhs.order());
        let mut out = TruncSeries::zero(order);
        for (i, x) in self.coeffs[..=order].iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.coeffs[..=order - i].iter().enumerate() {
                if !y.is_zero() {
                    out.coeffs[i + j] += x * y;
                }
            }
        }
        out
    }
}

fn check_a(a: i64) -> Result<()> {
    if a == 0 {
        Err(Error::ZeroA)
    } else {
        Ok(())
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::NTooSmall { n, min: 1 })
    } else {
        Ok(())
    }
}

/// `X/(X − a)` to the given order: coefficient `−a^{−m}` at `X^m`, `m ≥ 1`.
pub fn geometric_frac_series(a: i64, order: usize) -> Result<TruncSeries> {
    check_a(a)?;
    let a_inv = BigRat::new(BigInt::one(), BigInt::from(a));
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(BigRat::zero());
    let mut pow = BigRat::one();
    for _ in 1..=order {
        pow *= &a_inv;
        coeffs.push(-pow.clone());
    }
    Ok(TruncSeries { coeffs })
}

/// Truncated `Li₂(X) = Σ X^k / k²`.
pub fn li2_series(order: usize) -> TruncSeries {
    TruncSeries::from_fn(order, |k| {
        if k == 0 {
            BigRat::zero()
        } else {
            let k = BigInt::from(k);
            BigRat::new(BigInt::one(), &k * &k)
        }
    })
}

/// Truncated `−log(1 − X) = Σ X^k / k`.
pub fn neg_log_one_minus(order: usize) -> TruncSeries {
    TruncSeries::from_fn(order, |k| {
        if k == 0 {
            BigRat::zero()
        } else {
            BigRat::new(BigInt::one(), BigInt::from(k))
        }
    })
}

/// Truncated `½·log²(1 − X) = Σ H_{k−1}/k · X^k`, written down coefficientwise.
pub fn half_log_squared(order: usize) -> TruncSeries {
    let mut h = BigRat::zero(); // H_{k-1}
    TruncSeries::from_fn(order, |k| {
        if k == 0 {
            return BigRat::zero();
        }
        let c = &h / BigInt::from(k);
        h += BigRat::new(BigInt::one(), BigInt::from(k));
        c
    })
}

/// Incrementally builds `R_1, R_2, ...` for a fixed `a`, each held to a
/// common precision `order`.
///
/// Going from `R_{n−1}` to `R_n` costs one series product (the next power of
/// `X/(X−a)`); the powers of `X/a` are monomials.
#[derive(Debug, Clone)]
pub struct RnExpansion {
    a: i64,
    n: u64,
    a_inv: BigRat,
    /// `X/(X−a)`
    frac: TruncSeries,
    /// `(X/(X−a))^n`
    frac_pow: TruncSeries,
    /// `a^{−n}`
    a_inv_pow: BigRat,
    /// `H_{n}` after the n-th step
    harmonic: BigRat,
    rn: TruncSeries,
}

impl RnExpansion {
    pub fn new(a: i64, order: usize) -> Result<Self> {
        let frac = geometric_frac_series(a, order)?;
        Ok(RnExpansion {
            a,
            n: 0,
            a_inv: BigRat::new(BigInt::one(), BigInt::from(a)),
            frac_pow: TruncSeries::one(order),
            frac,
            a_inv_pow: BigRat::one(),
            harmonic: BigRat::zero(),
            rn: TruncSeries::zero(order),
        })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    /// Index of the sum currently held; 0 before the first `advance`.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn order(&self) -> usize {
        self.rn.order()
    }

    /// `R_n` to the expansion's precision.
    pub fn series(&self) -> &TruncSeries {
        &self.rn
    }

    /// Adds the `k = n + 1` terms of all three sums.
    pub fn advance(&mut self) -> &TruncSeries {
        let k = self.n + 1;
        let k_big = BigInt::from(k);
        let k_sq = BigRat::from_integer(&k_big * &k_big);

        self.a_inv_pow *= &self.a_inv;
        self.frac_pow = &self.frac_pow * &self.frac;

        // (X/a)^k · (1/k² + H_{k−1}/k)
        let mono = (k_sq.recip() + &self.harmonic / &k_big) * &self.a_inv_pow;
        let degree = k as usize;
        if degree <= self.order() {
            self.rn.coeffs[degree] += mono;
        }
        self.rn.add_scaled(&self.frac_pow, &k_sq.recip());

        self.harmonic += BigRat::new(BigInt::one(), k_big);
        self.n = k;
        &self.rn
    }

    pub fn advance_to(&mut self, n: u64) -> &TruncSeries {
        while self.n < n {
            self.advance();
        }
        &self.rn
    }
}

/// `R_n(X)` truncated at `order`.
pub fn build_rn_to_order(a: i64, n: u64, order: usize) -> Result<TruncSeries> {
    check_n(n)?;
    let mut exp = RnExpansion::new(a, order)?;
    exp.advance_to(n);
    Ok(exp.rn)
}

/// `R_n(X)` truncated at degree `n`.
pub fn build_rn(a: i64, n: u64) -> Result<TruncSeries> {
    build_rn_to_order(a, n, n as usize)
}

/// First degree `≤ n` where `series` is nonzero, if any.
pub fn first_nonvanishing(series: &TruncSeries, n: u64) -> Option<usize> {
    let top = (n as usize).min(series.order());
    series.coeffs[..=top].iter().position(|c| !c.is_zero())
}

/// `true` iff `R_n` has no terms of degree `0..=n`.
pub fn vanishing_order_check(a: i64, n: u64) -> Result<bool> {
    let rn = build_rn(a, n)?;
    Ok(first_nonvanishing(&rn, n).is_none())
}

/// The integer polynomial `U_n`, or as much of it as the precision allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClearedNumerator {
    coeffs: Vec<BigInt>,
    shift: usize,
}

impl ClearedNumerator {
    /// Fails with the index of the first non-integer coefficient.
    pub fn new(coeffs: &[BigRat], shift: usize) -> std::result::Result<Self, usize> {
        let coeffs = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(i)
                }
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(ClearedNumerator { coeffs, shift })
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Power of `X` that was divided out (`n + 1`).
    pub fn shift(&self) -> usize {
        self.shift
    }
}

/// Multiplies `R_n` (held to some order `N > n`) by `aⁿ (X−a)ⁿ lcm(1..n)²`,
/// checks that degrees `0..=n` vanish and returns the coefficients of
/// degrees `n+1..=N` divided by `X^{n+1}`.
pub fn clear_denominators(a: i64, n: u64, rn: &TruncSeries) -> Result<ClearedNumerator> {
    check_a(a)?;
    check_n(n)?;
    let order = rn.order();
    let lcm = lcm_upto(n);
    let scale = BigInt::from(a).pow(n as u32) * &lcm * &lcm;
    let linear = TruncSeries::from_coeffs(
        vec![BigRat::from_integer(BigInt::from(-a)), BigRat::one()],
        order,
    );
    let multiplier = linear.pow(n as u32).scale(&BigRat::from_integer(scale));
    let product = rn * &multiplier;

    if let Some(degree) = first_nonvanishing(&product, n) {
        return Err(Error::VanishingFailed {
            a,
            n,
            degree,
            value: format_rat(product.coeff(degree)),
        });
    }
    let shift = n as usize + 1;
    let tail = product.coeffs.get(shift..).unwrap_or(&[]);
    ClearedNumerator::new(tail, shift).map_err(|index| Error::NonIntegerCoefficient {
        a,
        n,
        index,
        value: format_rat(&tail[index]),
    })
}

/// The first `extra_order` coefficients of `U_n`.
pub fn extract_un(a: i64, n: u64, extra_order: usize) -> Result<ClearedNumerator> {
    if extra_order == 0 {
        return Err(Error::Invalid("extra_order must be positive".into()));
    }
    let rn = build_rn_to_order(a, n, n as usize + extra_order)?;
    clear_denominators(a, n, &rn)
}

/// `Li₂(X) + Li₂(X/(X−1)) + ½·log²(1−X) ≡ 0 (mod X^{n+1})`.
///
/// Shares nothing with [`RnExpansion`]: `X/(X−1)` comes from a series
/// inverse and `Li₂` is composed with it by Horner's rule.
pub fn functional_equation_check(n: u64) -> Result<bool> {
    check_n(n)?;
    let order = n as usize;
    let x = TruncSeries::x(order);
    let x_minus_one = &x - &TruncSeries::one(order);
    let frac = &x * &x_minus_one.inverse().expect("constant term is -1");
    let li2 = li2_series(order);
    let li2_frac = li2.compose(&frac).expect("X/(X-1) has no constant term");
    let total = &(&li2 + &li2_frac) + &half_log_squared(order);
    Ok(total.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn rats(v: &[(i64, i64)]) -> Vec<BigRat> {
        v.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn geometric_examples() {
        let s = geometric_frac_series(1, 3).unwrap();
        assert_eq!(
            s.coeffs(),
            rats(&[(0, 1), (-1, 1), (-1, 1), (-1, 1)]).as_slice()
        );
        let s = geometric_frac_series(2, 2).unwrap();
        assert_eq!(s.coeffs(), rats(&[(0, 1), (-1, 2), (-1, 4)]).as_slice());
        let s = geometric_frac_series(-1, 2).unwrap();
        assert_eq!(s.coeffs(), rats(&[(0, 1), (1, 1), (-1, 1)]).as_slice());
        assert_eq!(geometric_frac_series(0, 2), Err(Error::ZeroA));
    }

    #[test]
    fn geometric_times_linear_is_x() {
        for a in [-7, -2, -1, 1, 2, 3, 10] {
            for order in 1..12 {
                let g = geometric_frac_series(a, order).unwrap();
                let linear = TruncSeries::from_coeffs(vec![rat(-a, 1), rat(1, 1)], order);
                assert_eq!(
                    &g * &linear,
                    TruncSeries::x(order),
                    "a = {a}, order = {order}"
                );
            }
        }
    }

    #[test]
    fn inverse_and_compose() {
        let order = 8;
        let one_minus_x = TruncSeries::from_coeffs(vec![rat(1, 1), rat(-1, 1)], order);
        let inv = one_minus_x.inverse().unwrap();
        assert!(inv.coeffs().iter().all(|c| *c == rat(1, 1)));
        assert!(TruncSeries::x(order).inverse().is_none());

        // (1 + t)^2 at t = X + X^2
        let outer = TruncSeries::from_coeffs(rats(&[(1, 1), (2, 1), (1, 1)]), order);
        let inner = TruncSeries::from_coeffs(rats(&[(0, 1), (1, 1), (1, 1)]), order);
        let composed = outer.compose(&inner).unwrap();
        let expected =
            TruncSeries::from_coeffs(rats(&[(1, 1), (2, 1), (3, 1), (2, 1), (1, 1)]), order);
        assert_eq!(composed, expected);
        assert!(outer.compose(&TruncSeries::one(order)).is_none());
    }

    #[test]
    fn pow_by_squaring_matches_repeated_product() {
        let s = TruncSeries::from_coeffs(rats(&[(1, 2), (-3, 1), (2, 7)]), 9);
        let mut naive = TruncSeries::one(9);
        for k in 0..13u32 {
            assert_eq!(s.pow(k), naive, "k = {k}");
            naive = &naive * &s;
        }
    }

    #[test]
    fn rn_small_cases() {
        let r = build_rn(1, 1).unwrap();
        assert_eq!(r.order(), 1);
        assert!(r.is_zero());
        assert!(build_rn(1, 20).unwrap().is_zero());
        assert!(build_rn(3, 15).unwrap().is_zero());
        assert_eq!(build_rn(0, 3), Err(Error::ZeroA));
        assert!(matches!(build_rn(1, 0), Err(Error::NTooSmall { .. })));
    }

    /// Coefficient of `X^m` in `R_n`, from `(X/(X−a))^k = (−1/a)^k X^k (1 − X/a)^{−k}`:
    /// the `k`-th power contributes `(−1)^k C(m−1, k−1) / a^m`.
    fn rn_coeff_closed_form(a: i64, n: u64, m: u64) -> BigRat {
        let a_m = BigRat::from_integer(BigInt::from(a).pow(m as u32));
        let mut c = BigRat::zero();
        if m <= n && m >= 1 {
            let h: BigRat = (1..m as i64).map(|j| rat(1, j)).sum();
            c += (rat(1, (m * m) as i64) + h / BigInt::from(m)) / &a_m;
        }
        let mut binom = BigInt::one(); // C(m−1, k−1)
        for k in 1..=n.min(m) {
            if k > 1 {
                binom = binom * BigInt::from(m - k + 1) / BigInt::from(k - 1);
            }
            let sign = if k % 2 == 0 { 1 } else { -1 };
            c += BigRat::from_integer(&binom * sign) / BigInt::from(k * k) / &a_m;
        }
        c
    }

    #[test]
    fn rn_matches_closed_form_coefficients() {
        for (a, n) in [(1, 20), (3, 15), (-2, 9), (10, 6)] {
            let order = n as usize + 6;
            let rn = build_rn_to_order(a, n, order).unwrap();
            for m in 0..=order as u64 {
                assert_eq!(
                    rn.coeff(m as usize),
                    &rn_coeff_closed_form(a, n, m),
                    "a = {a}, n = {n}, m = {m}"
                );
            }
        }
    }

    #[test]
    fn vanishing_examples() {
        assert!(vanishing_order_check(1, 5).unwrap());
        assert!(vanishing_order_check(2, 50).unwrap());
        assert!(vanishing_order_check(-7, 30).unwrap());
    }

    #[test]
    fn vanishing_stops_at_degree_n() {
        // R_n is not identically zero: the first surviving term sits at n + 1.
        for a in [1, 2, -3] {
            for n in 1..12 {
                let r = build_rn_to_order(a, n, n as usize + 3).unwrap();
                assert_eq!(r.valuation(), Some(n as usize + 1), "a = {a}, n = {n}");
            }
        }
    }

    // Frozen from a sympy computation of the full rational function
    // R_n(X)·aⁿ(X−a)ⁿ·lcm(1..n)² / X^{n+1}.
    #[test]
    fn un_golden_values() {
        assert_eq!(extract_un(1, 1, 1).unwrap().coeffs(), ints(&[1]).as_slice());
        assert_eq!(
            extract_un(1, 3, 3).unwrap().coeffs(),
            ints(&[21, -39, 22]).as_slice()
        );
        let u = extract_un(2, 10, 5).unwrap();
        assert_eq!(u.shift(), 11);
        assert_eq!(
            u.coeffs(),
            ints(&[-865751040, 4044848640, -8138565120, 9559601280, -7219520256]).as_slice()
        );
        assert_eq!(
            extract_un(2, 10, 12).unwrap().coeffs(),
            ints(&[
                -865751040,
                4044848640,
                -8138565120,
                9559601280,
                -7219520256,
                3635574000,
                -1220785200,
                263587100,
                -33208000,
                1860012,
                0,
                0
            ])
            .as_slice()
        );
        assert_eq!(
            extract_un(3, 4, 4).unwrap().coeffs(),
            ints(&[-1620, 1854, -636, 75]).as_slice()
        );
        assert_eq!(
            extract_un(-7, 5, 5).unwrap().coeffs(),
            ints(&[3769570, 2054570, 453985, 44415, 1644]).as_slice()
        );
    }

    #[test]
    fn extract_rejects_bad_input() {
        assert_eq!(extract_un(0, 3, 2), Err(Error::ZeroA));
        assert!(matches!(extract_un(1, 3, 0), Err(Error::Invalid(_))));
    }

    #[test]
    fn clear_denominators_reports_broken_series() {
        let mut rn = build_rn_to_order(2, 4, 8).unwrap();
        rn.coeffs[3] = rat(1, 5);
        assert!(matches!(
            clear_denominators(2, 4, &rn),
            Err(Error::VanishingFailed { degree: 3, .. })
        ));
        let mut rn = build_rn_to_order(2, 4, 8).unwrap();
        rn.coeffs[6] += rat(1, 1_000_003);
        assert!(matches!(
            clear_denominators(2, 4, &rn),
            Err(Error::NonIntegerCoefficient { index: 1, .. })
        ));
    }

    #[test]
    fn functional_equation_examples() {
        assert!(functional_equation_check(1).unwrap());
        assert!(functional_equation_check(10).unwrap());
        assert!(functional_equation_check(64).unwrap());
    }

    #[test]
    fn half_log_squared_two_ways() {
        let order = 40;
        let l = neg_log_one_minus(order);
        let squared_half = (&l * &l).scale(&rat(1, 2));
        assert_eq!(squared_half, half_log_squared(order));
    }

    #[test]
    fn expansion_agrees_with_fresh_builds() {
        let mut exp = RnExpansion::new(5, 12).unwrap();
        for n in 1..=10 {
            let incremental = exp.advance().clone();
            assert_eq!(exp.n(), n);
            assert_eq!(incremental, build_rn_to_order(5, n, 12).unwrap());
        }
    }
}
