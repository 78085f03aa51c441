//! Eta quotients `prod_i f_i^{e_i}` with `f_i = (q^i; q^i)_inf`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::qseries::{eta_series_in, QSeries, Result, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EtaParseError {
    #[error("malformed eta term {0:?}; expected scale:exponent")]
    Malformed(String),
    #[error("eta scale must be positive")]
    ZeroScale,
}

/// Finite product of eta factors. Scales are distinct and exponents nonzero;
/// inserting a factor that cancels removes it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EtaQuotient {
    terms: BTreeMap<usize, i32>,
}

impl EtaQuotient {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: &[(usize, i32)]) -> Self {
        let mut eq = Self::new();
        for &(scale, exp) in terms {
            eq.insert(scale, exp);
        }
        eq
    }

    /// Multiplies in `f_scale^exp`.
    pub fn insert(&mut self, scale: usize, exp: i32) {
        assert!(scale >= 1, "eta scale must be positive");
        let e = self.terms.entry(scale).or_insert(0);
        *e += exp;
        if *e == 0 {
            self.terms.remove(&scale);
        }
    }

    pub fn with(mut self, scale: usize, exp: i32) -> Self {
        self.insert(scale, exp);
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, i32)> + '_ {
        self.terms.iter().map(|(&s, &e)| (s, e))
    }

    pub fn exponent(&self, scale: usize) -> i32 {
        self.terms.get(&scale).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_scale(&self) -> usize {
        self.terms.keys().next_back().copied().unwrap_or(1)
    }

    pub fn mul(&self, other: &EtaQuotient) -> EtaQuotient {
        let mut out = self.clone();
        for (s, e) in other.terms() {
            out.insert(s, e);
        }
        out
    }

    pub fn inverse(&self) -> EtaQuotient {
        EtaQuotient {
            terms: self.terms.iter().map(|(&s, &e)| (s, -e)).collect(),
        }
    }

    /// The quotient under `q -> q^m`: every scale multiplied by `m`.
    pub fn scaled(&self, m: usize) -> EtaQuotient {
        EtaQuotient {
            terms: self.terms.iter().map(|(&s, &e)| (s * m, e)).collect(),
        }
    }

    /// Divides every scale by `m`, if all are divisible.
    pub fn unscaled(&self, m: usize) -> Option<EtaQuotient> {
        self.terms
            .keys()
            .all(|s| s % m == 0)
            .then(|| EtaQuotient {
                terms: self.terms.iter().map(|(&s, &e)| (s / m, e)).collect(),
            })
    }

    /// Expands to order `N`, reduced mod `modulus` when given.
    pub fn compile(&self, order: usize, modulus: Option<u64>) -> Result<QSeries> {
        self.compile_in(order, Ring::from_modulus(modulus)?)
    }

    /// Positive exponents multiply by the sparse eta series, negative ones
    /// divide by it; no dense convolution is ever needed.
    pub fn compile_in(&self, order: usize, ring: Ring) -> Result<QSeries> {
        let mut acc = QSeries::one(order, ring);
        for (scale, exp) in self.terms() {
            if scale > order {
                continue;
            }
            let f = eta_series_in(scale, order, ring);
            for _ in 0..exp.unsigned_abs() {
                acc = if exp > 0 { acc.mul(&f)? } else { acc.div(&f)? };
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(s, e)| format!("{s}:{e}"))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Parses `scale:exp,scale:exp,...`, e.g. `4:1,9:1,1:-1,36:-1`.
impl FromStr for EtaQuotient {
    type Err = EtaParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut eq = EtaQuotient::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (scale, exp) = part
                .split_once(':')
                .ok_or_else(|| EtaParseError::Malformed(part.to_string()))?;
            let scale: usize = scale
                .trim()
                .parse()
                .map_err(|_| EtaParseError::Malformed(part.to_string()))?;
            let exp: i32 = exp
                .trim()
                .parse()
                .map_err(|_| EtaParseError::Malformed(part.to_string()))?;
            if scale == 0 {
                return Err(EtaParseError::ZeroScale);
            }
            eq.insert(scale, exp);
        }
        Ok(eq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::eta_series;

    #[test]
    fn compile_regular_3_8() {
        let eq = EtaQuotient::from_terms(&[(3, 1), (8, 1), (1, -1), (24, -1)]);
        assert_eq!(eq.compile(5, None).unwrap().to_i64_vec().unwrap(), vec![1, 1, 2, 2, 4, 5]);
    }

    #[test]
    fn compile_single_factor() {
        let eq = EtaQuotient::from_terms(&[(1, 1)]);
        assert_eq!(eq.compile(30, None).unwrap(), eta_series(1, 30));
    }

    #[test]
    fn b_of_ten_vanishes() {
        let b = EtaQuotient::from_terms(&[(1, 2), (3, 1)]).compile(10, None).unwrap();
        assert_eq!(b.int_coeff(10), 0.into());
        assert_eq!(b.int_coeff(5), 3.into());
    }

    #[test]
    fn modular_compile_matches_reduction() {
        let eq: EtaQuotient = "4:1,9:1,1:-1,36:-1".parse().unwrap();
        let exact = eq.compile(300, None).unwrap();
        for m in [2, 8, 9, 12] {
            assert_eq!(eq.compile(300, Some(m)).unwrap(), exact.reduce_mod(m).unwrap());
        }
    }

    #[test]
    fn insert_cancels() {
        let eq = EtaQuotient::from_terms(&[(2, 3), (2, -3), (5, 1)]);
        assert_eq!(eq.terms().collect::<Vec<_>>(), vec![(5, 1)]);
        assert_eq!(eq.mul(&eq.inverse()), EtaQuotient::new());
    }

    #[test]
    fn parse_and_display() {
        let eq: EtaQuotient = "1:-1, 4:1".parse().unwrap();
        assert_eq!(eq.to_string(), "1:-1,4:1");
        assert!("1".parse::<EtaQuotient>().is_err());
        assert!("0:1".parse::<EtaQuotient>().is_err());
        assert!("x:1".parse::<EtaQuotient>().is_err());
    }

    #[test]
    fn scaling_matches_series_substitution() {
        let eq = EtaQuotient::from_terms(&[(1, -2), (3, 1)]);
        let lhs = eq.scaled(2).compile(100, None).unwrap();
        let rhs = eq.compile(50, None).unwrap().scale_q(2).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(eq.scaled(4).unscaled(4), Some(eq.clone()));
        assert_eq!(eq.unscaled(2), None);
    }
}
