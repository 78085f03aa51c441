//! Coefficient lookup for named counting functions and raw eta quotients.

use regpart::congruences::Target;
use regpart::partitions::RegularitySpec;
use regpart::{EtaQuotient, QSeries, Ring, SeriesError};

/// `p`, `b` (`f1^2 f3`), `a` (`f1^6 f3`), `b_3_5_8_printed`, or
/// `b_l_k_...` for the partitions with no part divisible by any of `l, k, ...`.
pub fn family_eta(name: &str) -> Option<EtaQuotient> {
    match name {
        "p" => Some(EtaQuotient::from_terms(&[(1, -1)])),
        "b" => Some(EtaQuotient::from_terms(&[(1, 2), (3, 1)])),
        "a" => Some(EtaQuotient::from_terms(&[(1, 6), (3, 1)])),
        "b_3_5_8_printed" => Some(Target::b358_printed().eta),
        _ => {
            let rest = name.strip_prefix("b_")?;
            let v: Option<Vec<u64>> = rest.split('_').map(|d| d.parse().ok()).collect();
            RegularitySpec::new(&v?).ok().map(|s| s.eta_quotient())
        }
    }
}

pub const FAMILY_NAMES: &str = "p, a, b, b_3_5_8_printed, b_<l>_<k>[_<r>...]";

/// `(n, coefficient)` rows for `lo..=hi`.
pub fn coefficients(
    eta: &EtaQuotient,
    lo: usize,
    hi: usize,
    modulus: Option<u64>,
) -> Result<Vec<(usize, String)>, SeriesError> {
    let ring = Ring::from_modulus(modulus)?;
    let s: QSeries = eta.compile_in(hi, ring)?;
    Ok((lo..=hi).map(|n| (n, s.coeff(n).expect("within order").to_string())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(name: &str, n: usize, m: Option<u64>) -> String {
        coefficients(&family_eta(name).unwrap(), n, n, m).unwrap()[0].1.clone()
    }

    #[test]
    fn examples() {
        assert_eq!(one("b_4_9", 7, None), "12");
        assert_eq!(one("b", 10, None), "0");
        assert_eq!(one("p", 5, None), "7");
        assert_eq!(one("b_4_9", 7, Some(8)), "4");
        assert_eq!(one("p", 100, None), "190569292");
    }

    #[test]
    fn names() {
        assert!(family_eta("b_3_8").is_some());
        assert!(family_eta("b_1").is_none());
        assert!(family_eta("q").is_none());
        assert!(family_eta("b_").is_none());
    }
}
