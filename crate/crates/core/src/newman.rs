//! Newman's three-term recurrence for the coefficients of `f_1^r f_Q^s`,
//! the Legendre symbol, and the `omega(p)` invariants that pick the branch
//! of the congruence families.
//!
//! With `eps = (r+s)/2`, `Delta = (r + sQ)(p^2-1)/24` and
//! `theta = (-1)^{1/2-eps} 2 Q^s`, the coefficients satisfy
//!
//! ```text
//! c(n p^2 + Delta) - gamma_n c(n) + p^{2 eps - 2} c((n - Delta)/p^2) = 0,
//! gamma_n = K - (theta/p) p^{eps - 3/2} ((n - Delta)/p)
//! ```
//!
//! where `K` is a constant. Setting `n = 0` solves for it:
//! `K = c(Delta) + (theta/p) p^{eps-3/2} (-Delta/p)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::eta::EtaQuotient;
use crate::qseries::{QSeries, SeriesError};
use crate::report::{Failure, VerificationReport};
use crate::theta::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NewmanError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(i64),
    #[error("r and s must be nonzero")]
    ZeroExponent,
    #[error("r + s = {0} must be odd")]
    Parity(i64),
    #[error("r + s = {0} must be at least 3 so the p-powers are integral")]
    WeightTooSmall(i64),
    #[error("the two primes must differ")]
    SamePrime,
    #[error("Delta = (r + sQ)(p^2 - 1)/24 is not an integer for r={r}, s={s}, Q={qp}, p={p}")]
    NonIntegralDelta { r: i64, s: i64, qp: u64, p: u64 },
    #[error("series of order {have} too short, need {need}")]
    TooShort { have: usize, need: usize },
    #[error("series must be exact and start with c(0) = 1")]
    BadSeries,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

pub type Result<T> = std::result::Result<T, NewmanError>;

/// `(a/p)` by Euler's criterion; `a` is reduced mod `p` first.
pub fn legendre(a: i64, p: u64) -> Result<i8> {
    if p < 3 || !is_prime(p) {
        return Err(NewmanError::NotOddPrime(p as i64));
    }
    Ok(legendre_unchecked(&BigInt::from(a), p))
}

fn legendre_unchecked(a: &BigInt, p: u64) -> i8 {
    let pb = BigInt::from(p);
    let r = a.mod_floor(&pb);
    if r.is_zero() {
        return 0;
    }
    let e = r.modpow(&BigInt::from((p - 1) / 2), &pb);
    if e.is_one() {
        1
    } else {
        -1
    }
}

/// Parameters `(r, s, Q, p)` and the quantities derived from them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewmanParams {
    pub r: i64,
    pub s: i64,
    pub qp: u64,
    pub p: u64,
    /// `2 eps = r + s`, odd.
    pub two_eps: i64,
    /// `24 t = r + sQ`.
    pub t_times_24: i64,
    pub delta: u64,
    /// Sign of `theta`, `(-1)^{(1 - r - s)/2}`.
    pub theta_sign: i8,
}

impl NewmanParams {
    /// `eps - 3/2`, an integer.
    pub fn half_power(&self) -> u32 {
        ((self.two_eps - 3) / 2) as u32
    }

    /// `2 eps - 2`.
    pub fn full_power(&self) -> u32 {
        (self.two_eps - 2) as u32
    }

    /// `theta = (-1)^{1/2-eps} 2 Q^s`, when `s >= 0`.
    pub fn theta(&self) -> Option<BigInt> {
        (self.s >= 0).then(|| BigInt::from(self.theta_sign) * 2 * BigInt::from(self.qp).pow(self.s as u32))
    }

    /// `(theta/p)`; for negative `s`, `Q^s` has the same symbol as `Q^{|s|}`.
    pub fn theta_symbol(&self) -> i8 {
        let base = legendre_unchecked(&BigInt::from(2 * self.theta_sign as i64), self.p);
        let q = legendre_unchecked(&BigInt::from(self.qp), self.p);
        base * q.pow(self.s.unsigned_abs() as u32)
    }

    /// The product `f_1^r f_Q^s` whose coefficients obey the recurrence.
    pub fn eta_quotient(&self) -> EtaQuotient {
        EtaQuotient::from_terms(&[(1, self.r as i32), (self.qp as usize, self.s as i32)])
    }

    /// `(theta/p) p^{eps-3/2}`, the weight of the Legendre twist.
    fn twist(&self) -> BigInt {
        BigInt::from(self.theta_symbol()) * BigInt::from(self.p).pow(self.half_power())
    }
}

pub fn newman_params(r: i64, s: i64, qp: u64, p: u64) -> Result<NewmanParams> {
    if r == 0 || s == 0 {
        return Err(NewmanError::ZeroExponent);
    }
    if (r + s).rem_euclid(2) != 1 {
        return Err(NewmanError::Parity(r + s));
    }
    if r + s < 3 {
        return Err(NewmanError::WeightTooSmall(r + s));
    }
    for x in [qp, p] {
        if x < 2 || !is_prime(x) {
            return Err(NewmanError::NotOddPrime(x as i64));
        }
    }
    if p == 2 {
        return Err(NewmanError::NotOddPrime(2));
    }
    if p == qp {
        return Err(NewmanError::SamePrime);
    }
    let t24 = r + s * qp as i64;
    let num = t24 as i128 * (p as i128 * p as i128 - 1);
    if num % 24 != 0 || num < 0 {
        return Err(NewmanError::NonIntegralDelta { r, s, qp, p });
    }
    let theta_sign = if ((1 - r - s) / 2).rem_euclid(2) == 0 { 1 } else { -1 };
    Ok(NewmanParams {
        r,
        s,
        qp,
        p,
        two_eps: r + s,
        t_times_24: t24,
        delta: (num / 24) as u64,
        theta_sign,
    })
}

/// The two instantiations used by the congruence families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NewmanSeries {
    /// `b(n)`: coefficients of `f_1^2 f_3`.
    B,
    /// `a(n)`: coefficients of `f_1^6 f_3`.
    A,
}

impl NewmanSeries {
    pub fn exponents(self) -> (i64, i64, u64) {
        match self {
            NewmanSeries::B => (2, 1, 3),
            NewmanSeries::A => (6, 1, 3),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NewmanSeries::B => "b",
            NewmanSeries::A => "a",
        }
    }

    pub fn params(self, p: u64) -> Result<NewmanParams> {
        let (r, s, qp) = self.exponents();
        newman_params(r, s, qp, p)
    }
}

fn exact_coeffs(coeffs: &QSeries) -> Result<&[BigInt]> {
    let c = coeffs.exact_coeffs().ok_or(NewmanError::BadSeries)?;
    if !c[0].is_one() {
        return Err(NewmanError::BadSeries);
    }
    Ok(c)
}

/// `K = p^{2 eps - 2} c`, recovered from the `n = 0` case.
pub fn solve_constant(coeffs: &QSeries, params: &NewmanParams) -> Result<BigInt> {
    let c = exact_coeffs(coeffs)?;
    let d = params.delta as usize;
    if coeffs.order() < d {
        return Err(NewmanError::TooShort {
            have: coeffs.order(),
            need: d,
        });
    }
    let neg_delta = -BigInt::from(params.delta);
    Ok(&c[d] + params.twist() * legendre_unchecked(&neg_delta, params.p))
}

/// Checks the recurrence for `0 <= n <= n_max`, with `c(x) = 0` whenever
/// `x` is negative or not an integer.
pub fn verify_recurrence(
    coeffs: &QSeries,
    params: &NewmanParams,
    n_max: usize,
) -> Result<VerificationReport> {
    let c = exact_coeffs(coeffs)?;
    let p2 = (params.p * params.p) as usize;
    let d = params.delta as usize;
    let need = n_max * p2 + d;
    if coeffs.order() < need {
        return Err(NewmanError::TooShort {
            have: coeffs.order(),
            need,
        });
    }
    let k = solve_constant(coeffs, params)?;
    let twist = params.twist();
    let tail = BigInt::from(params.p).pow(params.full_power());
    let mut report = VerificationReport::new(
        format!("newman:{},{},{},{}", params.r, params.s, params.qp, params.p),
        "newman",
    );
    report.note("K", &k);
    report.note("delta", d);
    report.note("n_max", n_max);
    for n in 0..=n_max {
        let shifted = BigInt::from(n as i64 - d as i64);
        let gamma = &k - &twist * legendre_unchecked(&shifted, params.p);
        let back = if n >= d && (n - d) % p2 == 0 {
            c[(n - d) / p2].clone()
        } else {
            BigInt::zero()
        };
        let residual = &c[n * p2 + d] - gamma * &c[n] + &tail * back;
        report.check(residual.is_zero(), || {
            Failure::new(&[("n", n.to_string())], n * p2 + d, residual.to_string())
        });
    }
    Ok(report)
}

/// Largest `n` with `n p^2 + Delta <= order`.
pub fn max_recurrence_n(params: &NewmanParams, order: usize) -> Option<usize> {
    let d = params.delta as usize;
    (order >= d).then(|| (order - d) / (params.p * params.p) as usize)
}

/// `omega(p) = K mod M` for the chosen series.
pub fn omega(series: NewmanSeries, p: u64, modulus: u64) -> Result<u64> {
    let k = omega_exact(series, p)?;
    Ok(k.mod_floor(&BigInt::from(modulus)).to_u64().unwrap())
}

/// The integer `omega(p)` itself.
pub fn omega_exact(series: NewmanSeries, p: u64) -> Result<BigInt> {
    let params = series.params(p)?;
    let coeffs = params.eta_quotient().compile(params.delta as usize, None)?;
    solve_constant(&coeffs, &params)
}
