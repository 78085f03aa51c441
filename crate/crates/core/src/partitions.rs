//! Partition counting oracles and the eta-quotient generating functions they
//! cross-check.
//!
//! The counting functions here never touch [`QSeries`](crate::QSeries): they
//! run the classic "coins in increasing order" dynamic program, which is the
//! bounded-largest-part table `T(n, k) = T(n, k-1) + T(n-k, k)` with the
//! `k` axis collapsed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use log::warn;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::eta::EtaQuotient;
use crate::qseries::{QSeries, Result};
use crate::report::{Failure, VerificationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("forbidden divisor {0} must be at least 2")]
    DivisorTooSmall(u64),
    #[error("colour scale and multiplicity must be positive (got {0}^{1})")]
    BadColour(u64, u32),
}

/// Forbidden divisors of an `l`-, `(l,k)`- or `(l,k,r)`-regular partition.
/// The empty set gives unrestricted partitions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegularitySpec {
    forbidden: BTreeSet<u64>,
}

impl RegularitySpec {
    /// Non-coprime divisors are allowed (the counts stay well defined) but
    /// logged.
    pub fn new(forbidden: &[u64]) -> std::result::Result<Self, SpecError> {
        if let Some(&d) = forbidden.iter().find(|&&d| d < 2) {
            return Err(SpecError::DivisorTooSmall(d));
        }
        let forbidden: BTreeSet<u64> = forbidden.iter().copied().collect();
        let v: Vec<u64> = forbidden.iter().copied().collect();
        for (i, a) in v.iter().enumerate() {
            for b in &v[i + 1..] {
                if a.gcd(b) != 1 {
                    warn!("regularity divisors {a} and {b} are not coprime");
                }
            }
        }
        Ok(RegularitySpec { forbidden })
    }

    pub fn unrestricted() -> Self {
        RegularitySpec {
            forbidden: BTreeSet::new(),
        }
    }

    pub fn forbidden(&self) -> impl Iterator<Item = u64> + '_ {
        self.forbidden.iter().copied()
    }

    pub fn allows(&self, part: u64) -> bool {
        self.forbidden.iter().all(|d| part % d != 0)
    }

    /// Inclusion-exclusion over subsets `S` of the forbidden set: the product
    /// of `f_{lcm S}^{(-1)^{|S|+1}}`. For `{l,k}` this is
    /// `f_l f_k / (f_1 f_{lk})`; for three pairwise coprime divisors the
    /// full-lcm factor lands in the numerator.
    pub fn eta_quotient(&self) -> EtaQuotient {
        let v: Vec<u64> = self.forbidden.iter().copied().collect();
        let mut eq = EtaQuotient::new();
        for mask in 0u32..(1 << v.len()) {
            let lcm = v
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .fold(1u64, |acc, (_, d)| acc.lcm(d));
            let exp = if mask.count_ones() % 2 == 0 { -1 } else { 1 };
            eq.insert(lcm as usize, exp);
        }
        eq
    }
}

impl fmt::Display for RegularitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.forbidden.iter().map(u64::to_string).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

/// Coloured parts: scale `c` with multiplicity `s` stands for `1/f_c^s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredSpec {
    parts: BTreeMap<u64, u32>,
}

impl ColoredSpec {
    pub fn new(parts: &[(u64, u32)]) -> std::result::Result<Self, SpecError> {
        let mut map = BTreeMap::new();
        for &(c, s) in parts {
            if c == 0 || s == 0 {
                return Err(SpecError::BadColour(c, s));
            }
            *map.entry(c).or_insert(0) += s;
        }
        Ok(ColoredSpec { parts: map })
    }

    pub fn parts(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.parts.iter().map(|(&c, &s)| (c, s))
    }

    pub fn eta_quotient(&self) -> EtaQuotient {
        let mut eq = EtaQuotient::new();
        for (c, s) in self.parts() {
            eq.insert(c as usize, -(s as i32));
        }
        eq
    }
}

impl fmt::Display for ColoredSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.parts().map(|(c, s)| format!("{c}^{s}")).collect();
        write!(f, "{}", v.join(","))
    }
}

/// Adds one "coin" of value `part`: `table[n] += table[n - part]`.
fn add_part(table: &mut [BigUint], part: usize) {
    for n in part..table.len() {
        let (lo, hi) = table.split_at_mut(n);
        hi[0] += &lo[n - part];
    }
}

/// `b(0..=n_max)` for the given regularity condition.
pub fn regular_counts(n_max: usize, spec: &RegularitySpec) -> Vec<BigUint> {
    let mut table = vec![BigUint::zero(); n_max + 1];
    table[0] = BigUint::one();
    for part in 1..=n_max {
        if spec.allows(part as u64) {
            add_part(&mut table, part);
        }
    }
    table
}

/// Number of partitions of `n` with no part divisible by a forbidden divisor.
pub fn count_regular(n: usize, spec: &RegularitySpec) -> BigUint {
    regular_counts(n, spec).pop().unwrap()
}

/// Counts of partitions into coloured parts: every multiple of scale `c` is
/// available in `s` distinguishable colours. Each colour is one more pass
/// of the single-colour table.
pub fn colored_counts(n_max: usize, spec: &ColoredSpec) -> Vec<BigUint> {
    let mut table = vec![BigUint::zero(); n_max + 1];
    table[0] = BigUint::one();
    for (c, s) in spec.parts() {
        let c = c as usize;
        for _ in 0..s {
            let mut part = c;
            while part <= n_max {
                add_part(&mut table, part);
                part += c;
            }
        }
    }
    table
}

pub fn count_colored(n: usize, spec: &ColoredSpec) -> BigUint {
    colored_counts(n, spec).pop().unwrap()
}

/// Generating function of the regular partitions as a compiled eta quotient.
pub fn gf_regular(spec: &RegularitySpec, order: usize, modulus: Option<u64>) -> Result<QSeries> {
    spec.eta_quotient().compile(order, modulus)
}

pub fn gf_colored(spec: &ColoredSpec, order: usize, modulus: Option<u64>) -> Result<QSeries> {
    spec.eta_quotient().compile(order, modulus)
}

fn compare(id: String, gf: &QSeries, dp: &[BigUint]) -> VerificationReport {
    let mut report = VerificationReport::new(id, "oracle");
    report.note("n_max", dp.len() - 1);
    for (n, want) in dp.iter().enumerate() {
        let got = gf.int_coeff(n);
        let ok = got == BigInt::from(want.clone());
        report.check(ok, || Failure::new(&[("n", n.to_string())], n, format!("{got} vs {want}")));
    }
    report
}

/// Eta-quotient expansion against the counting table, `n <= n_max`.
pub fn verify_regular_oracle(spec: &RegularitySpec, n_max: usize) -> Result<VerificationReport> {
    let gf = gf_regular(spec, n_max, None)?;
    let name = spec.forbidden().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
    let mut r = compare(format!("oracle:{name}"), &gf, &regular_counts(n_max, spec));
    r.note("eta", spec.eta_quotient());
    Ok(r)
}

pub fn verify_colored_oracle(spec: &ColoredSpec, n_max: usize) -> Result<VerificationReport> {
    let gf = gf_colored(spec, n_max, None)?;
    let mut r = compare(format!("oracle:{spec}"), &gf, &colored_counts(n_max, spec));
    r.note("eta", spec.eta_quotient());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: &[u64]) -> RegularitySpec {
        RegularitySpec::new(v).unwrap()
    }

    // Explicit enumeration of partitions as non-increasing part lists.
    fn enumerate(n: u64, max: u64, ok: &dyn Fn(u64) -> bool) -> u64 {
        if n == 0 {
            return 1;
        }
        (1..=max.min(n))
            .filter(|&p| ok(p))
            .map(|p| enumerate(n - p, p, ok))
            .sum()
    }

    #[test]
    fn regular_examples() {
        assert_eq!(count_regular(7, &spec(&[4, 9])), 12u32.into());
        assert_eq!(count_regular(4, &spec(&[3, 8])), 4u32.into());
        for s in [spec(&[3, 8]), spec(&[4, 9]), spec(&[3, 5, 8]), RegularitySpec::unrestricted()] {
            assert_eq!(count_regular(0, &s), 1u32.into());
        }
    }

    #[test]
    fn dp_matches_explicit_enumeration() {
        for s in [spec(&[3, 8]), spec(&[4, 7]), spec(&[3, 5, 8])] {
            let counts = regular_counts(30, &s);
            for n in 0..=30u64 {
                let want = enumerate(n, n, &|p| s.allows(p));
                assert_eq!(counts[n as usize], want.into(), "{s} n={n}");
            }
        }
    }

    #[test]
    fn colored_examples() {
        let p = ColoredSpec::new(&[(1, 1)]).unwrap();
        assert_eq!(count_colored(5, &p), 7u32.into());
        let c35 = ColoredSpec::new(&[(3, 1), (5, 1)]).unwrap();
        assert_eq!(count_colored(3, &c35), 1u32.into());
        assert_eq!(count_colored(0, &c35), 1u32.into());
        // Two colours of 1: partitions of 2 are 2, 1a1a, 1a1b, 1b1b.
        let two = ColoredSpec::new(&[(1, 2)]).unwrap();
        assert_eq!(count_colored(2, &two), 5u32.into());
    }

    #[test]
    fn bad_specs_are_rejected() {
        assert_eq!(RegularitySpec::new(&[1, 3]), Err(SpecError::DivisorTooSmall(1)));
        assert!(ColoredSpec::new(&[(0, 1)]).is_err());
        assert!(ColoredSpec::new(&[(2, 0)]).is_err());
        // Not coprime: allowed, only warned about.
        assert!(RegularitySpec::new(&[4, 6]).is_ok());
    }

    #[test]
    fn inclusion_exclusion_quotients() {
        assert_eq!(spec(&[3, 8]).eta_quotient().to_string(), "1:-1,3:1,8:1,24:-1");
        assert_eq!(
            spec(&[3, 5, 8]).eta_quotient().to_string(),
            "1:-1,3:1,5:1,8:1,15:-1,24:-1,40:-1,120:1"
        );
        assert_eq!(spec(&[7]).eta_quotient().to_string(), "1:-1,7:1");
    }

    #[test]
    fn gf_examples() {
        let v = gf_regular(&spec(&[3, 8]), 5, None).unwrap();
        assert_eq!(v.to_i64_vec().unwrap(), vec![1, 1, 2, 2, 4, 5]);
        let v = gf_regular(&spec(&[3, 5, 8]), 4, None).unwrap();
        assert_eq!(v.to_i64_vec().unwrap(), vec![1, 1, 2, 2, 4]);
        for l in 2..8 {
            assert_eq!(gf_regular(&spec(&[l]), 10, None).unwrap().int_coeff(0), BigInt::one());
        }
    }

    #[test]
    fn non_coprime_spec_still_matches() {
        let s = spec(&[4, 6]);
        let gf = gf_regular(&s, 80, None).unwrap();
        let dp = regular_counts(80, &s);
        for n in 0..=80 {
            assert_eq!(gf.int_coeff(n), BigInt::from(dp[n].clone()));
        }
    }

    #[test]
    fn oracle_reports() {
        let r = verify_regular_oracle(&spec(&[3, 8]), 60).unwrap();
        assert_eq!((r.id.as_str(), r.checks_run), ("oracle:3,8", 61));
        assert_eq!(r.status(), crate::Status::Pass);
        let c = ColoredSpec::new(&[(3, 1), (5, 1)]).unwrap();
        let r = verify_colored_oracle(&c, 40).unwrap();
        assert_eq!(r.id, "oracle:3^1,5^1");
        assert_eq!(r.status(), crate::Status::Pass);
    }

    #[test]
    fn sandwich() {
        let p = regular_counts(150, &RegularitySpec::unrestricted());
        let b3 = regular_counts(150, &spec(&[3]));
        let b38 = regular_counts(150, &spec(&[3, 8]));
        let b358 = regular_counts(150, &spec(&[3, 5, 8]));
        for n in 0..=150 {
            assert!(b358[n] <= b38[n] && b38[n] <= b3[n] && b3[n] <= p[n], "n={n}");
        }
    }
}
