//! Truncated formal power series in `q` with exact or modular coefficients.
//!
//! A [`QSeries`] stores the coefficients of `q^0 ..= q^N` where `N` is the
//! series' order. Coefficients live either in the integers (arbitrary
//! precision) or in `Z/MZ` with residues kept in `[0, M)`. Binary
//! operations truncate to the smaller operand order and refuse to mix rings.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Largest modulus accepted in residue mode; keeps every product of two
/// residues inside a `u64`.
pub const MAX_MODULUS: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("coefficient ring mismatch: {0} vs {1}")]
    RingMismatch(Ring, Ring),
    #[error("constant term {0} is not a unit in {1}")]
    NonUnitConstant(String, Ring),
    #[error("modulus {0} out of range (need 2 <= M <= 2^32)")]
    BadModulus(u64),
    #[error("reduce_mod needs an integer series, got {0}")]
    AlreadyReduced(Ring),
    #[error("section q^({modulus}n+{residue}) invalid for series of order {order}")]
    BadSection {
        modulus: usize,
        residue: usize,
        order: usize,
    },
    #[error("scale factor must be positive")]
    ZeroScale,
}

pub type Result<T> = std::result::Result<T, SeriesError>;

/// Coefficient ring of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Integer,
    Mod(u64),
}

impl Ring {
    pub fn modulus(self) -> Option<u64> {
        match self {
            Ring::Integer => None,
            Ring::Mod(m) => Some(m),
        }
    }

    pub fn from_modulus(modulus: Option<u64>) -> Result<Ring> {
        match modulus {
            None => Ok(Ring::Integer),
            Some(m) if (2..=MAX_MODULUS).contains(&m) => Ok(Ring::Mod(m)),
            Some(m) => Err(SeriesError::BadModulus(m)),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integer => write!(f, "Z"),
            Ring::Mod(m) => write!(f, "Z/{m}Z"),
        }
    }
}

/// A single coefficient, tagged with its ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coefficient {
    Exact(BigInt),
    Residue { value: u64, modulus: u64 },
}

impl Coefficient {
    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Exact(v) => v.is_zero(),
            Coefficient::Residue { value, .. } => *value == 0,
        }
    }

    /// The integer value (the canonical residue in modular mode).
    pub fn to_bigint(&self) -> BigInt {
        match self {
            Coefficient::Exact(v) => v.clone(),
            Coefficient::Residue { value, .. } => BigInt::from(*value),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Exact(v) => write!(f, "{v}"),
            Coefficient::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Coeffs {
    Exact(Vec<BigInt>),
    Residue { modulus: u64, values: Vec<u64> },
}

/// Truncated power series `c_0 + c_1 q + ... + c_N q^N + O(q^{N+1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Coeffs,
}

fn reduce_i64(v: i64, m: u64) -> u64 {
    (v as i128).rem_euclid(m as i128) as u64
}

fn reduce_bigint(v: &BigInt, m: u64) -> u64 {
    v.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits u64")
}

fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(m as i128) as u64)
}

/// Sparse representation of a series: `(exponent, coefficient)` for the
/// nonzero terms, in increasing exponent order.
fn support_exact(v: &[BigInt]) -> Vec<(usize, &BigInt)> {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
}

fn support_residue(v: &[u64]) -> Vec<(usize, u64)> {
    v.iter()
        .copied()
        .enumerate()
        .filter(|&(_, c)| c != 0)
        .collect()
}

/// Operands with at most this many nonzero terms take the sparse product path.
fn sparse_threshold(order: usize) -> usize {
    2 * ((order as f64).sqrt() as usize) + 8
}

impl QSeries {
    pub fn zero(order: usize, ring: Ring) -> QSeries {
        let coeffs = match ring {
            Ring::Integer => Coeffs::Exact(vec![BigInt::zero(); order + 1]),
            Ring::Mod(m) => Coeffs::Residue {
                modulus: m,
                values: vec![0; order + 1],
            },
        };
        QSeries { coeffs }
    }

    pub fn one(order: usize, ring: Ring) -> QSeries {
        Self::monomial(1, 0, order, ring)
    }

    /// `c * q^exponent` at the given order (zero when `exponent > order`).
    pub fn monomial(c: i64, exponent: usize, order: usize, ring: Ring) -> QSeries {
        let mut s = Self::zero(order, ring);
        if exponent <= order {
            s.add_at(exponent, c);
        }
        s
    }

    pub fn from_ints(values: &[i64]) -> QSeries {
        assert!(!values.is_empty(), "a series needs at least the constant term");
        QSeries {
            coeffs: Coeffs::Exact(values.iter().map(|&v| BigInt::from(v)).collect()),
        }
    }

    pub fn from_bigints(values: Vec<BigInt>) -> QSeries {
        assert!(!values.is_empty(), "a series needs at least the constant term");
        QSeries {
            coeffs: Coeffs::Exact(values),
        }
    }

    /// Residue-mode series; inputs are reduced into `[0, M)`.
    pub fn from_residues(modulus: u64, values: &[i64]) -> Result<QSeries> {
        assert!(!values.is_empty(), "a series needs at least the constant term");
        let ring = Ring::from_modulus(Some(modulus))?;
        let m = ring.modulus().unwrap();
        Ok(QSeries {
            coeffs: Coeffs::Residue {
                modulus: m,
                values: values.iter().map(|&v| reduce_i64(v, m)).collect(),
            },
        })
    }

    pub fn order(&self) -> usize {
        self.len() - 1
    }

    fn len(&self) -> usize {
        match &self.coeffs {
            Coeffs::Exact(v) => v.len(),
            Coeffs::Residue { values, .. } => values.len(),
        }
    }

    pub fn ring(&self) -> Ring {
        match &self.coeffs {
            Coeffs::Exact(_) => Ring::Integer,
            Coeffs::Residue { modulus, .. } => Ring::Mod(*modulus),
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        self.ring().modulus()
    }

    /// Coefficient of `q^n`, or `None` beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Option<Coefficient> {
        match &self.coeffs {
            Coeffs::Exact(v) => v.get(n).cloned().map(Coefficient::Exact),
            Coeffs::Residue { modulus, values } => values.get(n).map(|&value| {
                Coefficient::Residue {
                    value,
                    modulus: *modulus,
                }
            }),
        }
    }

    /// Coefficient as an integer (the canonical residue in modular mode).
    /// Panics beyond the order.
    pub fn int_coeff(&self, n: usize) -> BigInt {
        match &self.coeffs {
            Coeffs::Exact(v) => v[n].clone(),
            Coeffs::Residue { values, .. } => BigInt::from(values[n]),
        }
    }

    /// Coefficient of `q^n` reduced mod `m`, for either ring. In residue mode
    /// `m` must divide the series modulus.
    pub fn residue_at(&self, n: usize, m: u64) -> u64 {
        match &self.coeffs {
            Coeffs::Exact(v) => reduce_bigint(&v[n], m),
            Coeffs::Residue { modulus, values } => {
                debug_assert_eq!(modulus % m, 0);
                values[n] % m
            }
        }
    }

    pub fn exact_coeffs(&self) -> Option<&[BigInt]> {
        match &self.coeffs {
            Coeffs::Exact(v) => Some(v),
            Coeffs::Residue { .. } => None,
        }
    }

    pub fn residues(&self) -> Option<&[u64]> {
        match &self.coeffs {
            Coeffs::Exact(_) => None,
            Coeffs::Residue { values, .. } => Some(values),
        }
    }

    /// Coefficients as `i64`; `None` if any overflows.
    pub fn to_i64_vec(&self) -> Option<Vec<i64>> {
        match &self.coeffs {
            Coeffs::Exact(v) => v.iter().map(|c| c.to_i64()).collect(),
            Coeffs::Residue { values, .. } => values.iter().map(|&c| i64::try_from(c).ok()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.coeffs {
            Coeffs::Exact(v) => v.iter().all(Zero::is_zero),
            Coeffs::Residue { values, .. } => values.iter().all(|&c| c == 0),
        }
    }

    /// Exponents carrying a nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        match &self.coeffs {
            Coeffs::Exact(v) => support_exact(v).into_iter().map(|(i, _)| i).collect(),
            Coeffs::Residue { values, .. } => {
                support_residue(values).into_iter().map(|(i, _)| i).collect()
            }
        }
    }

    pub fn nonzero_count(&self) -> usize {
        self.support().len()
    }

    /// Adds the integer `c` to the coefficient of `q^n` in place.
    pub(crate) fn add_at(&mut self, n: usize, c: i64) {
        match &mut self.coeffs {
            Coeffs::Exact(v) => v[n] += c,
            Coeffs::Residue { modulus, values } => {
                values[n] = (values[n] + reduce_i64(c, *modulus)) % *modulus
            }
        }
    }

    pub(crate) fn add_big_at(&mut self, n: usize, c: &BigInt) {
        match &mut self.coeffs {
            Coeffs::Exact(v) => v[n] += c,
            Coeffs::Residue { modulus, values } => {
                values[n] = (values[n] + reduce_bigint(c, *modulus)) % *modulus
            }
        }
    }

    pub fn truncate(&self, order: usize) -> QSeries {
        let keep = order.min(self.order()) + 1;
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(v[..keep].to_vec()),
            Coeffs::Residue { modulus, values } => Coeffs::Residue {
                modulus: *modulus,
                values: values[..keep].to_vec(),
            },
        };
        QSeries { coeffs }
    }

    fn check_ring(&self, other: &QSeries) -> Result<()> {
        if self.ring() == other.ring() {
            Ok(())
        } else {
            Err(SeriesError::RingMismatch(self.ring(), other.ring()))
        }
    }

    pub fn add(&self, other: &QSeries) -> Result<QSeries> {
        self.zip_with(other, |a, b| a + b, |a, b, m| (a + b) % m)
    }

    pub fn sub(&self, other: &QSeries) -> Result<QSeries> {
        self.zip_with(other, |a, b| a - b, |a, b, m| (a + m - b) % m)
    }

    fn zip_with(
        &self,
        other: &QSeries,
        exact: impl Fn(&BigInt, &BigInt) -> BigInt,
        residue: impl Fn(u64, u64, u64) -> u64,
    ) -> Result<QSeries> {
        self.check_ring(other)?;
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => {
                Coeffs::Exact(a.iter().zip(b).map(|(x, y)| exact(x, y)).collect())
            }
            (Coeffs::Residue { modulus, values: a }, Coeffs::Residue { values: b, .. }) => {
                Coeffs::Residue {
                    modulus: *modulus,
                    values: a.iter().zip(b).map(|(&x, &y)| residue(x, y, *modulus)).collect(),
                }
            }
            _ => unreachable!("ring checked"),
        };
        Ok(QSeries { coeffs })
    }

    pub fn neg(&self) -> QSeries {
        self.scale_coeffs(-1)
    }

    /// Multiplies every coefficient by the integer `k`.
    pub fn scale_coeffs(&self, k: i64) -> QSeries {
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(v.iter().map(|c| c * k).collect()),
            Coeffs::Residue { modulus, values } => {
                let k = reduce_i64(k, *modulus);
                Coeffs::Residue {
                    modulus: *modulus,
                    values: values.iter().map(|&c| c * k % modulus).collect(),
                }
            }
        };
        QSeries { coeffs }
    }

    /// Multiplies by `q^k`, keeping the order fixed.
    pub fn shift(&self, k: usize) -> QSeries {
        let mut out = QSeries::zero(self.order(), self.ring());
        match (&mut out.coeffs, &self.coeffs) {
            (Coeffs::Exact(o), Coeffs::Exact(v)) => {
                for n in k..o.len() {
                    o[n] = v[n - k].clone();
                }
            }
            (Coeffs::Residue { values: o, .. }, Coeffs::Residue { values: v, .. }) => {
                for n in k..o.len() {
                    o[n] = v[n - k];
                }
            }
            _ => unreachable!(),
        }
        out
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, other: &QSeries) -> Result<QSeries> {
        self.check_ring(other)?;
        let order = self.order().min(other.order());
        let (a, b) = (self.truncate(order), other.truncate(order));
        // Put the sparser factor first.
        let (a, b) = if a.nonzero_count() <= b.nonzero_count() {
            (a, b)
        } else {
            (b, a)
        };
        let sparse = a.nonzero_count() <= sparse_threshold(order);
        let coeffs = match (&a.coeffs, &b.coeffs) {
            (Coeffs::Exact(x), Coeffs::Exact(y)) => Coeffs::Exact(if sparse {
                mul_sparse_exact(x, y)
            } else {
                mul_dense_exact(x, y)
            }),
            (Coeffs::Residue { modulus, values: x }, Coeffs::Residue { values: y, .. }) => {
                Coeffs::Residue {
                    modulus: *modulus,
                    values: mul_sparse_residue(x, y, *modulus),
                }
            }
            _ => unreachable!(),
        };
        Ok(QSeries { coeffs })
    }

    pub fn pow(&self, e: u32) -> Result<QSeries> {
        let mut acc = QSeries::one(self.order(), self.ring());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Multiplicative inverse `y` with `x*y = 1 + O(q^{N+1})`.
    pub fn invert(&self) -> Result<QSeries> {
        QSeries::one(self.order(), self.ring()).div(self)
    }

    /// Solves `divisor * y = self` by the triangular recurrence
    /// `c_0 y_n = a_n - sum_{k>=1} c_k y_{n-k}`, visiting only the nonzero
    /// `c_k`. Truncated at the smaller order.
    pub fn div(&self, divisor: &QSeries) -> Result<QSeries> {
        self.check_ring(divisor)?;
        let order = self.order().min(divisor.order());
        let num = self.truncate(order);
        let den = divisor.truncate(order);
        let coeffs = match (&num.coeffs, &den.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(c)) => {
                let c0 = &c[0];
                if !(c0.is_one() || (-c0).is_one()) {
                    return Err(SeriesError::NonUnitConstant(c0.to_string(), Ring::Integer));
                }
                let negate = c0.is_negative();
                let taps: Vec<(usize, &BigInt)> =
                    support_exact(c).into_iter().filter(|&(k, _)| k > 0).collect();
                let mut y: Vec<BigInt> = Vec::with_capacity(a.len());
                for n in 0..a.len() {
                    let mut acc = a[n].clone();
                    for &(k, ck) in &taps {
                        if k > n {
                            break;
                        }
                        sub_product(&mut acc, ck, &y[n - k]);
                    }
                    if negate {
                        acc = -acc;
                    }
                    y.push(acc);
                }
                Coeffs::Exact(y)
            }
            (Coeffs::Residue { modulus, values: a }, Coeffs::Residue { values: c, .. }) => {
                let m = *modulus;
                let inv = inverse_mod(c[0], m).ok_or_else(|| {
                    SeriesError::NonUnitConstant(c[0].to_string(), Ring::Mod(m))
                })?;
                let taps: Vec<(usize, u64)> =
                    support_residue(c).into_iter().filter(|&(k, _)| k > 0).collect();
                let mut y: Vec<u64> = Vec::with_capacity(a.len());
                for n in 0..a.len() {
                    let mut acc = a[n];
                    for &(k, ck) in &taps {
                        if k > n {
                            break;
                        }
                        acc = (acc + m - ck * y[n - k] % m) % m;
                    }
                    y.push(acc * inv % m);
                }
                Coeffs::Residue {
                    modulus: m,
                    values: y,
                }
            }
            _ => unreachable!(),
        };
        Ok(QSeries { coeffs })
    }

    /// The section `sum_n coeff(m n + r) q^n`, of order `floor((N - r)/m)`.
    pub fn extract(&self, m: usize, r: usize) -> Result<QSeries> {
        if m == 0 || r >= m || r > self.order() {
            return Err(SeriesError::BadSection {
                modulus: m,
                residue: r,
                order: self.order(),
            });
        }
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(v.iter().skip(r).step_by(m).cloned().collect()),
            Coeffs::Residue { modulus, values } => Coeffs::Residue {
                modulus: *modulus,
                values: values.iter().skip(r).step_by(m).copied().collect(),
            },
        };
        Ok(QSeries { coeffs })
    }

    /// Substitutes `q -> q^m`; the result has order `m * N`.
    pub fn scale_q(&self, m: usize) -> Result<QSeries> {
        if m == 0 {
            return Err(SeriesError::ZeroScale);
        }
        let mut out = QSeries::zero(m * self.order(), self.ring());
        match (&mut out.coeffs, &self.coeffs) {
            (Coeffs::Exact(o), Coeffs::Exact(v)) => {
                for (n, c) in v.iter().enumerate() {
                    o[m * n] = c.clone();
                }
            }
            (Coeffs::Residue { values: o, .. }, Coeffs::Residue { values: v, .. }) => {
                for (n, &c) in v.iter().enumerate() {
                    o[m * n] = c;
                }
            }
            _ => unreachable!(),
        }
        Ok(out)
    }

    /// Reduces an integer series into `Z/MZ`.
    pub fn reduce_mod(&self, m: u64) -> Result<QSeries> {
        let ring = Ring::from_modulus(Some(m))?;
        match &self.coeffs {
            Coeffs::Exact(v) => Ok(QSeries {
                coeffs: Coeffs::Residue {
                    modulus: m,
                    values: v.iter().map(|c| reduce_bigint(c, m)).collect(),
                },
            }),
            Coeffs::Residue { .. } => Err(SeriesError::AlreadyReduced(ring)),
        }
    }
}

fn sub_product(acc: &mut BigInt, c: &BigInt, y: &BigInt) {
    if c.is_one() {
        *acc -= y;
    } else if (-c).is_one() {
        *acc += y;
    } else {
        *acc -= c * y;
    }
}

fn mul_sparse_exact(sparse: &[BigInt], dense: &[BigInt]) -> Vec<BigInt> {
    let n = dense.len();
    let mut out = vec![BigInt::zero(); n];
    for (k, c) in support_exact(sparse) {
        let unit = if c.is_one() {
            Some(true)
        } else if (-c).is_one() {
            Some(false)
        } else {
            None
        };
        for i in 0..n - k {
            let d = &dense[i];
            if d.is_zero() {
                continue;
            }
            match unit {
                Some(true) => out[i + k] += d,
                Some(false) => out[i + k] -= d,
                None => out[i + k] += c * d,
            }
        }
    }
    out
}

fn mul_dense_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len();
    (0..n)
        .map(|k| {
            let mut acc = BigInt::zero();
            for i in 0..=k {
                if !a[i].is_zero() && !b[k - i].is_zero() {
                    acc += &a[i] * &b[k - i];
                }
            }
            acc
        })
        .collect()
}

fn mul_sparse_residue(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    let n = b.len();
    let mut out = vec![0u64; n];
    for (k, c) in support_residue(a) {
        for i in 0..n - k {
            out[i + k] = (out[i + k] + c * b[i]) % m;
        }
    }
    out
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for n in 0..=self.order() {
            let c = self.coeff(n).unwrap();
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*q")?,
                _ => write!(f, "{c}*q^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)?;
        if let Ring::Mod(m) = self.ring() {
            write!(f, " (mod {m})")?;
        }
        Ok(())
    }
}

/// Exponents `k(3k-1)/2` for `k = 0, 1, -1, 2, -2, ...` paired with the
/// sign `(-1)^k`, up to `limit`.
pub fn pentagonal_terms(limit: usize) -> Vec<(usize, i64)> {
    let mut terms = vec![(0, 1)];
    for k in 1i64.. {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let lo = (k * (3 * k - 1) / 2) as usize;
        let hi = (k * (3 * k + 1) / 2) as usize;
        if lo > limit {
            break;
        }
        terms.push((lo, sign));
        if hi <= limit {
            terms.push((hi, sign));
        }
    }
    terms
}

/// `f_i = prod_{m>=1} (1 - q^{im})` to order `N`, by the pentagonal number
/// theorem.
pub fn eta_series(i: usize, order: usize) -> QSeries {
    eta_series_in(i, order, Ring::Integer)
}

pub fn eta_series_in(i: usize, order: usize, ring: Ring) -> QSeries {
    assert!(i >= 1, "eta scale must be positive");
    let mut s = QSeries::zero(order, ring);
    for (e, sign) in pentagonal_terms(order / i) {
        s.add_at(i * e, sign);
    }
    s
}

/// `(q^a; q^m)_inf = prod_{j>=0} (1 - q^{a + jm})` to order `N`.
pub fn pochhammer_series(a: usize, m: usize, order: usize) -> QSeries {
    pochhammer_series_in(a, m, order, Ring::Integer)
}

pub fn pochhammer_series_in(a: usize, m: usize, order: usize, ring: Ring) -> QSeries {
    assert!(a >= 1 && m >= 1, "pochhammer start and step must be positive");
    let mut s = QSeries::one(order, ring);
    let mut e = a;
    while e <= order {
        match &mut s.coeffs {
            Coeffs::Exact(v) => {
                for n in (e..=order).rev() {
                    let t = v[n - e].clone();
                    v[n] -= t;
                }
            }
            Coeffs::Residue { modulus, values } => {
                for n in (e..=order).rev() {
                    values[n] = (values[n] + *modulus - values[n - e]) % *modulus;
                }
            }
        }
        e += m;
    }
    s
}
