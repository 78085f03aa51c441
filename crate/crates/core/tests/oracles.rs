use num_bigint::BigInt;
use proptest::prelude::*;
use regpart::partitions::{
    colored_counts, gf_colored, gf_regular, regular_counts, verify_regular_oracle, ColoredSpec, RegularitySpec,
};
use regpart::{EtaQuotient, QSeries, Ring, Status};

// Partitions into allowed parts, built one part size at a time from
// explicit multiplicities.
fn by_multiplicity(n_max: usize, allowed: impl Fn(usize) -> bool) -> Vec<u64> {
    let mut t = vec![0u64; n_max + 1];
    t[0] = 1;
    for part in (1..=n_max).filter(|&k| allowed(k)) {
        let prev = t.clone();
        for (n, slot) in t.iter_mut().enumerate() {
            *slot = (0..=n / part).map(|m| prev[n - m * part]).sum();
        }
    }
    t
}

#[test]
fn regular_generating_functions_match_counts_to_200() {
    for v in [&[3u64, 8][..], &[4, 7], &[4, 9], &[3, 5, 8]] {
        let spec = RegularitySpec::new(v).unwrap();
        let r = verify_regular_oracle(&spec, 200).unwrap();
        assert_eq!((r.status(), r.checks_run), (Status::Pass, 201), "{spec}");
    }
}

#[test]
fn counts_match_multiplicity_tables() {
    for v in [&[3u64, 8][..], &[4, 9], &[3, 5, 8]] {
        let spec = RegularitySpec::new(v).unwrap();
        let want = by_multiplicity(120, |k| spec.allows(k as u64));
        let got = regular_counts(120, &spec);
        for n in 0..=120 {
            assert_eq!(got[n], want[n].into(), "{spec} n={n}");
        }
    }
}

#[test]
fn colored_generating_functions_match_counts_to_150() {
    for v in [&[(3u64, 1u32), (5, 1)][..], &[(1, 1), (15, 1)], &[(1, 1), (3, 1), (5, 1), (15, 1)]] {
        let spec = ColoredSpec::new(v).unwrap();
        let gf = gf_colored(&spec, 150, None).unwrap();
        let dp = colored_counts(150, &spec);
        for n in 0..=150 {
            assert_eq!(gf.int_coeff(n), BigInt::from(dp[n].clone()), "{spec} n={n}");
        }
    }
}

#[test]
fn modular_mode_agrees_with_reduced_exact() {
    let spec = RegularitySpec::new(&[4, 9]).unwrap();
    let exact = gf_regular(&spec, 807, None).unwrap();
    for m in [2u64, 8, 9, 12] {
        let modular = gf_regular(&spec, 807, Some(m)).unwrap();
        assert_eq!(exact.reduce_mod(m).unwrap(), modular, "mod {m}");
    }
}

fn quotient() -> impl Strategy<Value = EtaQuotient> {
    prop::collection::vec((1usize..12, -3i32..4), 1..5).prop_map(|t| EtaQuotient::from_terms(&t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compile_is_the_product_of_factors(eq in quotient()) {
        let n = 120;
        let compiled = eq.compile(n, None).unwrap();
        let mut prod = QSeries::one(n, Ring::Integer);
        for (s, e) in eq.terms() {
            let f = regpart::eta_series(s, n);
            let f = if e < 0 { f.invert().unwrap().pow(-e as u32).unwrap() } else { f.pow(e as u32).unwrap() };
            prod = prod.mul(&f).unwrap();
        }
        prop_assert_eq!(compiled, prod);
    }

    #[test]
    fn quotient_times_inverse_is_one(eq in quotient(), m in 2u64..50) {
        let n = 150;
        let a = eq.compile(n, Some(m)).unwrap();
        let b = eq.inverse().compile(n, Some(m)).unwrap();
        prop_assert_eq!(a.mul(&b).unwrap(), QSeries::one(n, Ring::Mod(m)));
    }
}
