//! The central sums
//!
//! ```text
//! S(p, a, n) = Σ_{k=1}^{n} (1/a^k + 1/(p−a)^k + k·H_{k−1}/a^k) · p^k / k²
//! ```
//!
//! and the lower bound `ϑ_p(S(p, a, n)) ≥ n + 1 − 2⌊log_p n⌋`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{lcm_valuation, valuation, BigRat, HarmonicTable, Prime, Valuation};
use crate::error::{Error, Result};

/// Checks that `(p, a)` is admissible: `p ∤ a` and `p − a ≠ 0`.
pub fn validate_pair(p: Prime, a: i64) -> Result<()> {
    let pv = p.get() as i128;
    if a == 0 || (a as i128) % pv == 0 {
        return Err(Error::AMultipleOfP { p: p.get(), a });
    }
    if pv - a as i128 == 0 {
        return Err(Error::ZeroComplement { p: p.get(), a });
    }
    Ok(())
}

/// Running value of `S(p, a, n)`, advanced one index at a time.
#[derive(Debug, Clone)]
pub struct CentralSumState<'h> {
    p: Prime,
    a: i64,
    n: u64,
    partial_sum: BigRat,
    p_pow: BigInt,
    a_pow: BigInt,
    pa_pow: BigInt,
    a_big: BigInt,
    pa_big: BigInt,
    harmonic: &'h HarmonicTable,
}

impl<'h> CentralSumState<'h> {
    /// State at `n = 0` (empty sum).
    pub fn new(p: Prime, a: i64, harmonic: &'h HarmonicTable) -> Result<Self> {
        validate_pair(p, a)?;
        let pa = p.get() as i128 - a as i128;
        Ok(CentralSumState {
            p,
            a,
            n: 0,
            partial_sum: BigRat::zero(),
            p_pow: BigInt::one(),
            a_pow: BigInt::one(),
            pa_pow: BigInt::one(),
            a_big: BigInt::from(a),
            pa_big: BigInt::from(pa),
            harmonic,
        })
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn sum(&self) -> &BigRat {
        &self.partial_sum
    }

    /// Adds the term `k = n + 1`.
    pub fn advance(&mut self) -> &BigRat {
        let k = self.n + 1;
        self.p_pow *= self.p.get();
        self.a_pow *= &self.a_big;
        self.pa_pow *= &self.pa_big;

        let k_big = BigInt::from(k);
        let h = self.harmonic.harmonic((k - 1) as usize);
        // 1/a^k + 1/(p−a)^k + k·H_{k−1}/a^k
        //   = ((p−a)^k + a^k + k·H_{k−1}·(p−a)^k) / (a^k (p−a)^k)
        let inner = BigRat::new(&self.pa_pow + &self.a_pow, &self.a_pow * &self.pa_pow)
            + h * &k_big / &self.a_pow;
        let weight = BigRat::new(self.p_pow.clone(), &k_big * &k_big);
        self.partial_sum += inner * weight;
        self.n = k;
        &self.partial_sum
    }
}

/// Exact `S(p, a, n)`.
pub fn central_sum(p: Prime, a: i64, n: u64) -> Result<BigRat> {
    if n == 0 {
        return Err(Error::NTooSmall { n, min: 1 });
    }
    let table = HarmonicTable::with_max(n as usize);
    let mut state = CentralSumState::new(p, a, &table)?;
    for _ in 0..n {
        state.advance();
    }
    Ok(state.partial_sum)
}

/// `n + 1 − 2⌊log_p n⌋`.
pub fn theorem1_bound(p: Prime, n: u64) -> i64 {
    n as i64 + 1 - 2 * lcm_valuation(p, n) as i64
}

/// Exact valuation of one central sum against its lower bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    pub p: u64,
    pub a: i64,
    pub n: u64,
    pub exact_valuation: Valuation,
    pub bound: i64,
    /// `exact_valuation − bound`; infinite when the sum vanishes.
    pub gap: Valuation,
    pub pass: bool,
}

impl TheoremReport {
    pub fn new(p: Prime, a: i64, n: u64, sum: &BigRat) -> Self {
        let exact_valuation = valuation(p, sum);
        let bound = theorem1_bound(p, n);
        TheoremReport {
            p: p.get(),
            a,
            n,
            exact_valuation,
            bound,
            gap: exact_valuation.offset(-bound),
            pass: exact_valuation.at_least(bound),
        }
    }
}

pub fn theorem1_check(p: Prime, a: i64, n: u64) -> Result<TheoremReport> {
    let sum = central_sum(p, a, n)?;
    Ok(TheoremReport::new(p, a, n, &sum))
}

/// The `(p, a) = (2, 1)` case: `Σ (2 + k·H_{k−1})·2^k / k²`.
pub fn corollary1_check(n: u64) -> Result<TheoremReport> {
    theorem1_check(Prime::TWO, 1, n)
}

/// Distribution of `gap` over a sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GapSummary {
    pub min: Option<i64>,
    pub histogram: BTreeMap<i64, usize>,
    pub infinite: usize,
    pub equality_cases: usize,
}

impl GapSummary {
    pub fn from_reports<'a>(reports: impl IntoIterator<Item = &'a TheoremReport>) -> Self {
        let mut s = GapSummary::default();
        for r in reports {
            match r.gap {
                Valuation::Finite(g) => {
                    *s.histogram.entry(g).or_default() += 1;
                    s.min = Some(s.min.map_or(g, |m| m.min(g)));
                    if g == 0 {
                        s.equality_cases += 1;
                    }
                }
                Valuation::Infinite => s.infinite += 1,
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepOutcome {
    /// Sorted by `(p, a, n)`.
    pub reports: Vec<TheoremReport>,
    /// Pairs dropped because `p | a`.
    pub skipped: Vec<(u64, i64)>,
    pub gaps: GapSummary,
}

impl SweepOutcome {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn first_failure(&self) -> Option<&TheoremReport> {
        self.reports.iter().find(|r| !r.pass)
    }
}

/// Reports for every admissible `(p, a)` and `n = 1..=n_max`.
///
/// Each pair runs its own [`CentralSumState`] on the current rayon pool;
/// the merged output is sorted, so it does not depend on scheduling.
pub fn sweep_theorem1(primes: &[Prime], a_values: &[i64], n_max: u64) -> Result<SweepOutcome> {
    if n_max == 0 {
        return Err(Error::NTooSmall { n: n_max, min: 1 });
    }
    let mut primes = primes.to_vec();
    primes.sort();
    primes.dedup();
    let mut a_values = a_values.to_vec();
    a_values.sort();
    a_values.dedup();

    let mut pairs = Vec::new();
    let mut skipped = Vec::new();
    for &p in &primes {
        for &a in &a_values {
            match validate_pair(p, a) {
                Ok(()) => pairs.push((p, a)),
                Err(_) => skipped.push((p.get(), a)),
            }
        }
    }

    let table = HarmonicTable::with_max(n_max as usize);
    let mut reports: Vec<TheoremReport> = pairs
        .par_iter()
        .flat_map_iter(|&(p, a)| {
            let mut state = CentralSumState::new(p, a, &table).expect("pair validated");
            (1..=n_max)
                .map(|n| {
                    let sum = state.advance();
                    TheoremReport::new(p, a, n, sum)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    reports.sort_by_key(|r| (r.p, r.a, r.n));

    let gaps = GapSummary::from_reports(&reports);
    Ok(SweepOutcome {
        reports,
        skipped,
        gaps,
    })
}
