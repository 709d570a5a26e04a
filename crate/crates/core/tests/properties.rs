use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;

use sturmian_core::cf_engine::{complement_cf, convergents, enclose_theta, expand_rational, Rational};
use sturmian_core::complexity::repetitive_formula;
use sturmian_core::numeric::power_sum;
use sturmian_core::spectral::{
    d_ultra, materialized_pair, spectral_indices_bruteforce, ClosedSpec, Variant, WeightSpec,
};
use sturmian_core::words::{
    branching_profile_bruteforce, branching_profile_closed, certified_prefix_len, factors_unchecked,
    involution_eta, mechanical_prefix, x_limit_prefix, y_limit_prefix, LimitSource, DEFAULT_WORD_BUDGET,
};
use sturmian_core::{BinaryWord, ContinuedFraction, Verdict};

fn entries(len: std::ops::Range<usize>, max: u64) -> impl Strategy<Value = ContinuedFraction> {
    (2..=max, prop::collection::vec(1..=max, len)).prop_map(|(first, mut rest)| {
        rest.insert(0, first);
        ContinuedFraction::explicit(&rest).unwrap()
    })
}

fn word(len: std::ops::Range<usize>) -> impl Strategy<Value = BinaryWord> {
    prop::collection::vec(0u8..2, len).prop_map(|v| BinaryWord::from_symbols(v).unwrap())
}

proptest! {
    #[test]
    fn eta_is_an_involution(w in word(0..64)) {
        let once = involution_eta(&w);
        prop_assert_eq!(involution_eta(&once), w.clone());
        prop_assert!(w.symbols().iter().zip(once.symbols()).all(|(a, b)| a != b));
    }

    #[test]
    fn convergent_determinant_is_a_unit(cf in entries(1..40, 1000)) {
        let t = convergents(&cf);
        prop_assert!(t.check_invariants(&cf).is_ok());
        for n in 1..=cf.len() {
            let lhs = BigInt::from(t.p[n].clone()) * BigInt::from(t.q[n - 1].clone());
            let rhs = BigInt::from(t.p[n - 1].clone()) * BigInt::from(t.q[n].clone());
            let det = lhs - rhs;
            let want = if n % 2 == 0 { BigInt::from(-1) } else { BigInt::one() };
            prop_assert_eq!(det, want);
        }
    }

    #[test]
    fn rational_expansion_reproduces_the_rational(num in 1u64..1_000_000, extra in 1u64..1_000_000) {
        let den = num + extra;
        let cf = expand_rational(&BigUint::from(num), &BigUint::from(den), 200).unwrap();
        let t = convergents(&cf);
        let n = cf.len();
        let g = num_integer::gcd(num, den);
        prop_assert_eq!(&t.p[n], &BigUint::from(num / g));
        prop_assert_eq!(&t.q[n], &BigUint::from(den / g));
    }

    #[test]
    fn enclosures_nest(cf in entries(4..30, 50)) {
        for d in 1..cf.len() - 1 {
            let outer = enclose_theta(&cf, d - 1).unwrap();
            let inner = enclose_theta(&cf, d).unwrap();
            prop_assert!(outer.lower <= inner.lower && inner.upper <= outer.upper);
            prop_assert!(inner.width() < outer.width());
        }
        let e = enclose_theta(&cf, 0).unwrap();
        prop_assert!(e.lower >= Rational::from_u64(0, 1) && e.upper <= Rational::from_u64(1, 2));
    }

    #[test]
    fn complement_is_an_involution_and_shifts_denominators(cf in entries(2..30, 30)) {
        let comp = complement_cf(&cf).unwrap();
        let back = complement_cf(&comp).unwrap();
        prop_assert_eq!(back.entries(), cf.entries());
        let (t, tc) = (convergents(&cf), convergents(&comp));
        for n in 1..tc.q.len() {
            prop_assert_eq!(&tc.q[n], &t.q[n - 1]);
        }
    }

    #[test]
    fn repetitive_function_increases(cf in entries(12..20, 6)) {
        let mut prev = BigUint::from(0u32);
        for n in 1..200u64 {
            let r = repetitive_formula(&cf, n).unwrap();
            prop_assert!(r > prev);
            prop_assert!(r >= BigUint::from(2 * n + 1));
            prev = r;
        }
    }

    #[test]
    fn rotation_words_are_balanced(cf in entries(10..20, 8), n in 1usize..30) {
        let w = mechanical_prefix(&cf, 600, DEFAULT_WORD_BUDGET).unwrap();
        let ones: Vec<usize> = w.symbols().windows(n).map(|s| s.iter().filter(|&&b| b == 1).count()).collect();
        let (lo, hi) = (ones.iter().min().unwrap(), ones.iter().max().unwrap());
        prop_assert!(hi - lo <= 1);
    }

    #[test]
    fn factor_complexity_is_n_plus_one(cf in entries(10..20, 5), n in 0usize..40) {
        let len = certified_prefix_len(&cf, n).unwrap().to_usize().unwrap();
        let w = mechanical_prefix(&cf, len, DEFAULT_WORD_BUDGET).unwrap();
        let slice = factors_unchecked(&w, n).unwrap();
        prop_assert_eq!(slice.factors.len(), n + 1);
        prop_assert_eq!(slice.eta().eta(), slice);
    }

    #[test]
    fn limit_words_differ_only_in_their_first_two_symbols(cf in entries(8..16, 6)) {
        let x = x_limit_prefix(&cf, 300, DEFAULT_WORD_BUDGET).unwrap();
        let y = y_limit_prefix(&cf, 300, DEFAULT_WORD_BUDGET).unwrap();
        prop_assert_eq!(x.prefix(2).to_string(), "01");
        prop_assert_eq!(y.prefix(2).to_string(), "10");
        prop_assert_eq!(x.shift(2), y.shift(2));
    }

    #[test]
    fn ultrametric_strong_triangle(u in word(1..40), v in word(1..40), w in word(1..40), t in 0.1f64..3.0) {
        let ws = WeightSpec::new(t).unwrap();
        if let (Ok(uv), Ok(vw), Ok(uw)) = (d_ultra(&u, &v, &ws), d_ultra(&v, &w, &ws), d_ultra(&u, &w, &ws)) {
            prop_assert!(uw <= uv.max(vw));
            prop_assert_eq!(uv, d_ultra(&v, &u, &ws).unwrap());
        }
    }

    #[test]
    fn power_sums_match_direct_summation(q in 1u64..50, b in -20i64..20, from in 1u64..5, len in 0u64..400, t in 0.2f64..3.0) {
        prop_assume!(from as i64 * q as i64 + b > 0);
        let to = from + len;
        let got = power_sum(&BigUint::from(q), &BigInt::from(b), &BigUint::from(from), &BigUint::from(to), t);
        let want: f64 = (from..=to).map(|l| ((l * q) as f64 + b as f64).powf(-t)).sum();
        prop_assert!((got.ln.exp() / want - 1.0).abs() < 1e-10);
    }

    #[test]
    fn verdict_mirroring_is_an_involution(i in 0usize..4) {
        let v = [Verdict::Vanishing, Verdict::BoundedPositive, Verdict::Divergent, Verdict::Inconclusive][i];
        prop_assert_eq!(v.mirrored().mirrored(), v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn branching_profiles_match_on_random_slopes(cf in entries(14..22, 5)) {
        let bound = 400;
        let len = certified_prefix_len(&cf, bound).unwrap().to_usize().unwrap();
        for source in [LimitSource::XLimit, LimitSource::YLimit] {
            let prefix = match source {
                LimitSource::XLimit => x_limit_prefix(&cf, len, DEFAULT_WORD_BUDGET).unwrap(),
                LimitSource::YLimit => y_limit_prefix(&cf, len, DEFAULT_WORD_BUDGET).unwrap(),
            };
            let brute = branching_profile_bruteforce(&prefix, bound as u64, &cf, source).unwrap();
            prop_assert_eq!(brute, branching_profile_closed(&cf, bound as u64, source).unwrap());
        }
    }

    #[test]
    fn closed_spectral_indices_match_on_random_slopes(cf in entries(14..22, 5), m in 0usize..3, pick in 0u64..1000) {
        let t = convergents(&cf);
        let horizon = 300;
        let lang_len = certified_prefix_len(&cf, horizon).unwrap().to_usize().unwrap();
        let language = x_limit_prefix(&cf, lang_len, DEFAULT_WORD_BUDGET).unwrap();
        let a = cf.level_entry(m + 2).unwrap().to_u64().unwrap();
        for v in [Variant::Unshifted { m: m + 1 }, Variant::Shifted { m, j: BigUint::from(1 + pick % a) }] {
            let spec = ClosedSpec::new(&cf, &t, &v).unwrap();
            prop_assume!(spec.lcp < BigUint::from(horizon as u64));
            let (x, y) = materialized_pair(&cf, &v, horizon + 1, DEFAULT_WORD_BUDGET).unwrap();
            let brute: Vec<u64> = spectral_indices_bruteforce(&x, &y, horizon, &language)
                .unwrap()
                .into_iter()
                .map(|n| n as u64)
                .collect();
            prop_assert_eq!(brute, spec.indices_up_to(&cf, &t, horizon as u64).unwrap(), "{:?}", v);
        }
    }
}
