use dilog_padic::arith::{valuation, BigRat, HarmonicTable, Prime, Valuation};
use dilog_padic::series::{geometric_frac_series, vanishing_order_check, TruncSeries};
use dilog_padic::theorem::{central_sum, CentralSumState};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 97]).prop_map(|p| Prime::new(p).unwrap())
}

fn nonzero_rat() -> impl Strategy<Value = BigRat> {
    (
        (-100_000i64..100_000).prop_filter("nonzero", |x| *x != 0),
        1i64..100_000,
    )
        .prop_map(|(n, d)| BigRat::new(BigInt::from(n), BigInt::from(d)))
}

fn series(order: usize) -> impl Strategy<Value = TruncSeries> {
    prop::collection::vec((-20i64..20, 1i64..9), order + 1).prop_map(move |cs| {
        let coeffs = cs
            .into_iter()
            .map(|(n, d)| BigRat::new(BigInt::from(n), BigInt::from(d)))
            .collect();
        TruncSeries::from_coeffs(coeffs, order)
    })
}

proptest! {
    #[test]
    fn valuation_shifts_by_powers(p in prime(), r in nonzero_rat(), k in -12i32..12) {
        let pk = BigRat::from_integer(BigInt::from(p.get())).pow(k);
        prop_assert_eq!(valuation(p, &(&r * pk)), valuation(p, &r).offset(k as i64));
    }

    #[test]
    fn valuation_is_additive(p in prime(), r in nonzero_rat(), s in nonzero_rat()) {
        let (vr, vs) = (valuation(p, &r).finite().unwrap(), valuation(p, &s).finite().unwrap());
        prop_assert_eq!(valuation(p, &(&r * &s)), Valuation::Finite(vr + vs));
    }

    #[test]
    fn valuation_is_ultrametric(p in prime(), r in nonzero_rat(), s in nonzero_rat()) {
        let sum = &r + &s;
        prop_assume!(!sum.is_zero());
        let lower = valuation(p, &r).min(valuation(p, &s));
        prop_assert!(valuation(p, &sum) >= lower);
    }

    #[test]
    fn truncated_product_is_prefix_of_longer_product(f in series(8), g in series(8)) {
        let short = &f * &g;
        let long = &TruncSeries::from_coeffs(f.coeffs().to_vec(), 16)
            * &TruncSeries::from_coeffs(g.coeffs().to_vec(), 16);
        prop_assert_eq!(short, long.truncate(8));
    }

    #[test]
    fn geometric_series_inverts_linear_factor(a in (-50i64..50).prop_filter("nonzero", |a| *a != 0), order in 1usize..20) {
        let g = geometric_frac_series(a, order).unwrap();
        let linear = TruncSeries::from_coeffs(
            vec![BigRat::from_integer(BigInt::from(-a)), BigRat::from_integer(BigInt::from(1))],
            order,
        );
        prop_assert_eq!(&g * &linear, TruncSeries::x(order));
    }

    #[test]
    fn rn_vanishes(a in (-30i64..30).prop_filter("nonzero", |a| *a != 0), n in 1u64..25) {
        prop_assert!(vanishing_order_check(a, n).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn incremental_sum_matches_recomputation(
        p in prime(),
        a in -10i64..=10,
        n in 1u64..=120,
    ) {
        prop_assume!(a != 0 && a % p.get() as i64 != 0);
        let table = HarmonicTable::new();
        let mut state = CentralSumState::new(p, a, &table).unwrap();
        for _ in 0..n {
            state.advance();
        }
        prop_assert_eq!(state.sum(), &central_sum(p, a, n).unwrap());
    }
}

#[test]
fn all_summands_positive_for_two_one() {
    let table = HarmonicTable::new();
    let mut state = CentralSumState::new(Prime::TWO, 1, &table).unwrap();
    let mut prev = BigRat::zero();
    for _ in 0..100 {
        let next = state.advance().clone();
        assert!(next > prev);
        prev = next;
    }
}
