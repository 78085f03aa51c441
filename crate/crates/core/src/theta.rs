//! Ramanujan theta functions, the `p`-dissections of `f_1` and `f_1^3`, and
//! a catalog of fixed dissection identities checked coefficient by
//! coefficient.

use num_bigint::BigInt;
use thiserror::Error;

use crate::eta::EtaQuotient;
use crate::qseries::{pochhammer_series_in, QSeries, Ring, SeriesError};
use crate::report::{Failure, VerificationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThetaError {
    #[error("{0} must be a prime >= {1}")]
    BadPrime(u64, u64),
    #[error("theta exponents must be positive")]
    BadSpec,
    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),
    #[error("identity {id} needs order >= {min}, got {got}")]
    OrderTooLow { id: String, min: usize, got: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

pub type Result<T> = std::result::Result<T, ThetaError>;

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// `f(-q^alpha, -q^beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaSpec {
    pub alpha: u64,
    pub beta: u64,
}

impl ThetaSpec {
    pub fn new(alpha: u64, beta: u64) -> Result<Self> {
        if alpha == 0 || beta == 0 {
            return Err(ThetaError::BadSpec);
        }
        Ok(ThetaSpec { alpha, beta })
    }

    /// Exponent `alpha n(n+1)/2 + beta n(n-1)/2` of the `n`-th term.
    fn exponent(&self, n: i64) -> u64 {
        let (a, b) = (self.alpha as i128, self.beta as i128);
        let n = n as i128;
        (a * n * (n + 1) / 2 + b * n * (n - 1) / 2) as u64
    }
}

/// `sum_{n in Z} (-1)^n q^{alpha n(n+1)/2 + beta n(n-1)/2}` to order `N`.
pub fn theta_f(spec: ThetaSpec, order: usize) -> QSeries {
    theta_f_in(spec, order, Ring::Integer)
}

pub fn theta_f_in(spec: ThetaSpec, order: usize, ring: Ring) -> QSeries {
    let mut s = QSeries::zero(order, ring);
    // The exponent is increasing in n on both sides of [-1, 0].
    for dir in [1i64, -1] {
        let mut n = if dir == 1 { 0 } else { -1 };
        loop {
            let e = spec.exponent(n) as usize;
            if e > order {
                break;
            }
            s.add_at(e, if n.rem_euclid(2) == 0 { 1 } else { -1 });
            n += dir;
        }
    }
    s
}

/// `phi(q) = 1 + 2 sum_{n>=1} q^{n^2}`.
pub fn phi_series(order: usize) -> QSeries {
    let mut s = QSeries::zero(order, Ring::Integer);
    s.add_at(0, 1);
    for n in (1..).map(|n: usize| n * n).take_while(|&e| e <= order) {
        s.add_at(n, 2);
    }
    s
}

/// `psi(q) = sum_{n>=0} q^{n(n+1)/2}`.
pub fn psi_series(order: usize) -> QSeries {
    let mut s = QSeries::zero(order, Ring::Integer);
    for e in (0..).map(|n: usize| n * (n + 1) / 2).take_while(|&e| e <= order) {
        s.add_at(e, 1);
    }
    s
}

/// One summand of a `p`-dissection.
#[derive(Debug, Clone)]
pub struct DissectionTerm {
    /// Summation index, `None` for the distinguished `f_{p^2}` term.
    pub k: Option<i64>,
    /// Every exponent in `series` is congruent to this mod `p`.
    pub residue: u64,
    pub series: QSeries,
}

#[derive(Debug, Clone)]
pub struct PDissection {
    pub prime: u64,
    pub terms: Vec<DissectionTerm>,
}

impl PDissection {
    pub fn sum(&self) -> QSeries {
        let mut iter = self.terms.iter();
        let first = iter.next().expect("dissection has terms").series.clone();
        iter.fold(first, |acc, t| acc.add(&t.series).expect("same ring"))
    }

    pub fn distinguished(&self) -> &DissectionTerm {
        self.terms.iter().find(|t| t.k.is_none()).expect("distinguished term")
    }

    /// True when each term lives on its declared residue class.
    pub fn supports_respect_residues(&self) -> bool {
        let p = self.prime as usize;
        self.terms
            .iter()
            .all(|t| t.series.support().iter().all(|&e| (e % p) as u64 == t.residue))
    }

    /// True when no ordinary term shares the distinguished term's class.
    pub fn residues_avoid_distinguished(&self) -> bool {
        let d = self.distinguished().residue;
        self.terms.iter().filter(|t| t.k.is_some()).all(|t| t.residue != d)
    }
}

/// `(+-p - 1)/6`: the sign is chosen so the quotient is an integer.
fn pm_sixth(p: i64) -> i64 {
    if p % 6 == 1 {
        (p - 1) / 6
    } else {
        (-p - 1) / 6
    }
}

/// The `p`-dissection of `f_1` for primes `p >= 5`: `p - 1` theta-function
/// terms `(-1)^k q^{(3k^2+k)/2} f(-q^{(3p^2+(6k+1)p)/2}, -q^{(3p^2-(6k+1)p)/2})`
/// and the term `(-1)^{(+-p-1)/6} q^{(p^2-1)/24} f_{p^2}`.
pub fn p_dissect_f1(p: u64, order: usize) -> Result<PDissection> {
    if p < 5 || !is_prime(p) {
        return Err(ThetaError::BadPrime(p, 5));
    }
    let pi = p as i64;
    let half = (pi - 1) / 2;
    let skip = pm_sixth(pi);
    let mut terms = Vec::new();
    for k in -half..=half {
        if k == skip {
            continue;
        }
        let shift = ((3 * k * k + k) / 2) as usize;
        let alpha = ((3 * pi * pi + (6 * k + 1) * pi) / 2) as u64;
        let beta = ((3 * pi * pi - (6 * k + 1) * pi) / 2) as u64;
        let mut series = QSeries::zero(order, Ring::Integer);
        if shift <= order {
            let th = theta_f(ThetaSpec::new(alpha, beta)?, order - shift);
            let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
            for e in th.support() {
                series.add_big_at(e + shift, &(th.int_coeff(e) * sign));
            }
        }
        terms.push(DissectionTerm {
            k: Some(k),
            residue: (shift as u64) % p,
            series,
        });
    }
    let shift = ((p * p - 1) / 24) as usize;
    let sign = if skip.rem_euclid(2) == 0 { 1 } else { -1 };
    let f = EtaQuotient::from_terms(&[((p * p) as usize, 1)]).compile(order, None)?;
    terms.push(DissectionTerm {
        k: None,
        residue: (shift as u64) % p,
        series: f.shift(shift).scale_coeffs(sign),
    });
    Ok(PDissection { prime: p, terms })
}

/// The `p`-dissection of `f_1^3` for odd primes: for `k != (p-1)/2` the
/// terms `(-1)^k q^{k(k+1)/2} sum_{n>=0} (-1)^n (2pn+2k+1) q^{pn(pn+2k+1)/2}`,
/// and `p (-1)^{(p-1)/2} q^{(p^2-1)/8} f_{p^2}^3`.
pub fn p_dissect_f1_cubed(p: u64, order: usize) -> Result<PDissection> {
    if p < 3 || !is_prime(p) {
        return Err(ThetaError::BadPrime(p, 3));
    }
    let pi = p as i64;
    let mut terms = Vec::new();
    for k in 0..pi {
        if k == (pi - 1) / 2 {
            continue;
        }
        let shift = (k * (k + 1) / 2) as usize;
        let mut series = QSeries::zero(order, Ring::Integer);
        for n in 0i64.. {
            let e = shift + (pi * n * (pi * n + 2 * k + 1) / 2) as usize;
            if e > order {
                break;
            }
            let sign = if (n + k) % 2 == 0 { 1 } else { -1 };
            series.add_at(e, sign * (2 * pi * n + 2 * k + 1));
        }
        terms.push(DissectionTerm {
            k: Some(k),
            residue: (shift as u64) % p,
            series,
        });
    }
    let shift = ((p * p - 1) / 8) as usize;
    let sign = if ((pi - 1) / 2) % 2 == 0 { 1 } else { -1 };
    let f = EtaQuotient::from_terms(&[((p * p) as usize, 3)]).compile(order, None)?;
    terms.push(DissectionTerm {
        k: None,
        residue: (shift as u64) % p,
        series: f.shift(shift).scale_coeffs(sign * pi),
    });
    Ok(PDissection { prime: p, terms })
}

/// A factor of a product recipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    /// `f_i`
    Eta(usize),
    /// `(q^start; q^step)_inf`
    Pochhammer { start: usize, step: usize },
}

impl Factor {
    fn scale(&self) -> usize {
        match *self {
            Factor::Eta(i) => i,
            Factor::Pochhammer { step, .. } => step,
        }
    }

    fn unscaled(&self, m: usize) -> Option<Factor> {
        match *self {
            Factor::Eta(i) if i % m == 0 => Some(Factor::Eta(i / m)),
            Factor::Pochhammer { start, step } if start % m == 0 && step % m == 0 => {
                Some(Factor::Pochhammer {
                    start: start / m,
                    step: step / m,
                })
            }
            _ => None,
        }
    }

    fn series(&self, order: usize) -> QSeries {
        match *self {
            Factor::Eta(i) => crate::qseries::eta_series(i, order),
            Factor::Pochhammer { start, step } => {
                pochhammer_series_in(start, step, order, Ring::Integer)
            }
        }
    }
}

/// `coeff * q^shift * prod factor^exp`.
#[derive(Debug, Clone)]
pub struct Product {
    pub coeff: i64,
    pub shift: usize,
    pub factors: Vec<(Factor, i32)>,
}

impl Product {
    pub fn eta(coeff: i64, shift: usize, eq: &str) -> Product {
        let eq: EtaQuotient = eq.parse().expect("catalog quotient");
        Product {
            coeff,
            shift,
            factors: eq.terms().map(|(s, e)| (Factor::Eta(s), e)).collect(),
        }
    }

    fn max_scale(&self) -> usize {
        self.factors.iter().map(|(f, _)| f.scale()).max().unwrap_or(1)
    }

    pub fn compile(&self, order: usize) -> Result<QSeries> {
        let mut acc = QSeries::one(order, Ring::Integer);
        if self.shift > order {
            return Ok(QSeries::zero(order, Ring::Integer));
        }
        let inner = order - self.shift;
        acc = acc.truncate(inner);
        for (f, e) in &self.factors {
            let s = f.series(inner);
            for _ in 0..e.unsigned_abs() {
                acc = if *e > 0 { acc.mul(&s)? } else { acc.div(&s)? };
            }
        }
        let mut out = QSeries::zero(order, Ring::Integer);
        for n in acc.support() {
            out.add_big_at(n + self.shift, &(acc.int_coeff(n) * self.coeff));
        }
        Ok(out)
    }

    /// The same product under `q^m -> q`, dropping `q^residue`.
    fn unscaled(&self, m: usize, residue: usize) -> Option<Product> {
        let factors = self
            .factors
            .iter()
            .map(|(f, e)| f.unscaled(m).map(|g| (g, *e)))
            .collect::<Option<Vec<_>>>()?;
        Some(Product {
            coeff: self.coeff,
            shift: (self.shift - residue) / m,
            factors,
        })
    }
}

fn compile_sum(terms: &[Product], order: usize) -> Result<QSeries> {
    let mut acc = QSeries::zero(order, Ring::Integer);
    for t in terms {
        acc = acc.add(&t.compile(order)?)?;
    }
    Ok(acc)
}

/// How to build one side of an identity.
#[derive(Debug, Clone)]
pub enum Recipe {
    Sum(Vec<Product>),
    /// `sum_n [q^{m n + r}] base * q^n`.
    Section {
        base: EtaQuotient,
        modulus: usize,
        residue: usize,
    },
}

impl Recipe {
    pub fn compile(&self, order: usize) -> Result<QSeries> {
        match self {
            Recipe::Sum(terms) => compile_sum(terms, order),
            Recipe::Section {
                base,
                modulus,
                residue,
            } => {
                let full = base.compile(modulus * order + residue, None)?;
                Ok(full.extract(*modulus, *residue)?)
            }
        }
    }

    fn max_scale(&self) -> usize {
        match self {
            Recipe::Sum(terms) => terms.iter().map(Product::max_scale).max().unwrap_or(1),
            Recipe::Section { base, modulus, .. } => base.max_scale().max(*modulus),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IdentityRecord {
    pub id: &'static str,
    pub description: &'static str,
    pub lhs: Recipe,
    pub rhs: Recipe,
    /// When set, the right side is an `m`-dissection whose terms are series
    /// in `q^m` times `q^r`; the check also compares each section of the
    /// left side separately and rebuilds it from the sections.
    pub dissection: Option<usize>,
}

impl IdentityRecord {
    /// Orders below this compare too few coefficients of the coarsest
    /// factor to mean anything.
    pub fn min_order(&self) -> usize {
        let scale = self.lhs.max_scale().max(self.rhs.max_scale());
        (2 * scale).max(120)
    }
}

fn sum(terms: Vec<Product>) -> Recipe {
    Recipe::Sum(terms)
}

/// The eleven catalog identities.
pub fn catalog() -> Vec<IdentityRecord> {
    let poch = |start, step, e| (Factor::Pochhammer { start, step }, e);
    vec![
        IdentityRecord {
            id: "inv_f1_sq_2dissect",
            description: "1/f1^2 = f8^5/(f2^5 f16^2) + 2q f4^2 f16^2/(f2^5 f8)",
            lhs: sum(vec![Product::eta(1, 0, "1:-2")]),
            rhs: sum(vec![
                Product::eta(1, 0, "8:5,2:-5,16:-2"),
                Product::eta(2, 1, "4:2,16:2,2:-5,8:-1"),
            ]),
            dissection: Some(2),
        },
        IdentityRecord {
            id: "inv_f1_4th_2dissect",
            description: "1/f1^4 = f4^14/(f2^14 f8^4) + 4q f4^2 f8^4/f2^10",
            lhs: sum(vec![Product::eta(1, 0, "1:-4")]),
            rhs: sum(vec![
                Product::eta(1, 0, "4:14,2:-14,8:-4"),
                Product::eta(4, 1, "4:2,8:4,2:-10"),
            ]),
            dissection: Some(2),
        },
        IdentityRecord {
            id: "f3_over_f1_2dissect",
            description: "f3/f1 = f4 f6 f16 f24^2/(f2^2 f8 f12 f48) + q f6 f8^2 f48/(f2^2 f16 f24)",
            lhs: sum(vec![Product::eta(1, 0, "3:1,1:-1")]),
            rhs: sum(vec![
                Product::eta(1, 0, "4:1,6:1,16:1,24:2,2:-2,8:-1,12:-1,48:-1"),
                Product::eta(1, 1, "6:1,8:2,48:1,2:-2,16:-1,24:-1"),
            ]),
            dissection: Some(2),
        },
        IdentityRecord {
            id: "f5_over_f1_2dissect",
            description: "f5/f1 = f8 f20^2/(f2^2 f40) + q f4^3 f10 f40/(f2^3 f8 f20)",
            lhs: sum(vec![Product::eta(1, 0, "5:1,1:-1")]),
            rhs: sum(vec![
                Product::eta(1, 0, "8:1,20:2,2:-2,40:-1"),
                Product::eta(1, 1, "4:3,10:1,40:1,2:-3,8:-1,20:-1"),
            ]),
            dissection: Some(2),
        },
        IdentityRecord {
            id: "f9_over_f1_2dissect",
            description: "f9/f1 = f12^3 f18/(f2^2 f6 f36) + q f4^2 f6 f36/(f2^3 f12)",
            lhs: sum(vec![Product::eta(1, 0, "9:1,1:-1")]),
            rhs: sum(vec![
                Product::eta(1, 0, "12:3,18:1,2:-2,6:-1,36:-1"),
                Product::eta(1, 1, "4:2,6:1,36:1,2:-3,12:-1"),
            ]),
            dissection: Some(2),
        },
        IdentityRecord {
            id: "f3_over_f1_cubed_2dissect",
            description: "f3/f1^3 = f4^6 f6^3/(f2^9 f12^2) + 3q f4^2 f6 f12^2/f2^7",
            lhs: sum(vec![Product::eta(1, 0, "3:1,1:-3")]),
            rhs: sum(vec![
                Product::eta(1, 0, "4:6,6:3,2:-9,12:-2"),
                Product::eta(3, 1, "4:2,6:1,12:2,2:-7"),
            ]),
            dissection: Some(2),
        },
        IdentityRecord {
            id: "inv_f1f7_2dissect",
            description: "1/(f1 f7) = f16^2 f56^5/(f2^2 f8 f14^2 f28^2 f112^2) \
                          + q f4^2 f28^2/(f2^3 f14^3) \
                          + q^6 f8^5 f112^2/(f2^2 f4^2 f14^2 f16^2 f56)",
            lhs: sum(vec![Product::eta(1, 0, "1:-1,7:-1")]),
            rhs: sum(vec![
                Product::eta(1, 0, "16:2,56:5,2:-2,8:-1,14:-2,28:-2,112:-2"),
                Product::eta(1, 1, "4:2,28:2,2:-3,14:-3"),
                Product::eta(1, 6, "8:5,112:2,2:-2,4:-2,14:-2,16:-2,56:-1"),
            ]),
            dissection: Some(2),
        },
        IdentityRecord {
            id: "p_3_5_odd",
            description: "sum p_{3,5}(2n+1) q^n = q f2^2 f30^2/(f3^2 f5^2 f1 f15)",
            lhs: Recipe::Section {
                base: "3:-1,5:-1".parse().unwrap(),
                modulus: 2,
                residue: 1,
            },
            rhs: sum(vec![Product::eta(1, 1, "2:2,30:2,3:-2,5:-2,1:-1,15:-1")]),
            dissection: None,
        },
        IdentityRecord {
            id: "p_1_15_even",
            description: "sum p_{1,15}(2n) q^n = f6^2 f10^2/(f1^2 f3 f5 f15^2)",
            lhs: Recipe::Section {
                base: "1:-1,15:-1".parse().unwrap(),
                modulus: 2,
                residue: 0,
            },
            rhs: sum(vec![Product::eta(1, 0, "6:2,10:2,1:-2,3:-1,5:-1,15:-2")]),
            dissection: None,
        },
        IdentityRecord {
            id: "p_1_3_5_15_odd",
            description: "sum p_{1,3,5,15}(2n+1) q^n = f2 f6 f10 f30/(f1^2 f3^2 f5^2 f15^2) \
                          + 2q f2^2 f6^2 f10^2 f30^2/(f1^3 f3^3 f5^3 f15^3)",
            lhs: Recipe::Section {
                base: "1:-1,3:-1,5:-1,15:-1".parse().unwrap(),
                modulus: 2,
                residue: 1,
            },
            rhs: sum(vec![
                Product::eta(1, 0, "2:1,6:1,10:1,30:1,1:-2,3:-2,5:-2,15:-2"),
                Product::eta(2, 1, "2:2,6:2,10:2,30:2,1:-3,3:-3,5:-3,15:-3"),
            ]),
            dissection: None,
        },
        IdentityRecord {
            id: "euler_5dissect",
            description: "f1 = f25 (R^-1 - q - q^2 R), \
                          R = (q^5;q^25)(q^20;q^25)/((q^10;q^25)(q^15;q^25))",
            lhs: sum(vec![Product::eta(1, 0, "1:1")]),
            rhs: sum(vec![
                Product {
                    coeff: 1,
                    shift: 0,
                    factors: vec![
                        (Factor::Eta(25), 1),
                        poch(5, 25, -1),
                        poch(20, 25, -1),
                        poch(10, 25, 1),
                        poch(15, 25, 1),
                    ],
                },
                Product {
                    coeff: -1,
                    shift: 1,
                    factors: vec![(Factor::Eta(25), 1)],
                },
                Product {
                    coeff: -1,
                    shift: 2,
                    factors: vec![
                        (Factor::Eta(25), 1),
                        poch(5, 25, 1),
                        poch(20, 25, 1),
                        poch(10, 25, -1),
                        poch(15, 25, -1),
                    ],
                },
            ]),
            dissection: Some(5),
        },
    ]
}

pub fn lookup(id: &str) -> Option<IdentityRecord> {
    catalog().into_iter().find(|r| r.id == id)
}

fn compare(
    report: &mut VerificationReport,
    route: &str,
    lhs: &QSeries,
    rhs: &QSeries,
    index_map: impl Fn(usize) -> usize,
) {
    for n in 0..=lhs.order().min(rhs.order()) {
        let (a, b) = (lhs.int_coeff(n), rhs.int_coeff(n));
        report.check(a == b, || {
            Failure::new(&[("route", route.to_string())], index_map(n), format!("{a} != {b}"))
        });
    }
}

/// Compiles both sides to order `N` and compares them exactly. Dissections
/// are also checked section by section, and the left side is rebuilt from
/// the right side's sections via `scale_q`.
pub fn verify_identity(id: &str, order: usize) -> Result<VerificationReport> {
    let rec = lookup(id).ok_or_else(|| ThetaError::UnknownIdentity(id.to_string()))?;
    if order < rec.min_order() {
        return Err(ThetaError::OrderTooLow {
            id: id.to_string(),
            min: rec.min_order(),
            got: order,
        });
    }
    let mut report = VerificationReport::new(id, "identity");
    report.note("order", order);
    let lhs = rec.lhs.compile(order)?;
    let rhs = rec.rhs.compile(order)?;
    compare(&mut report, "direct", &lhs, &rhs, |n| n);

    if let (Some(m), Recipe::Sum(terms)) = (rec.dissection, &rec.rhs) {
        let mut rebuilt = QSeries::zero(order, Ring::Integer);
        for r in 0..m {
            let parts: Vec<Product> = terms
                .iter()
                .filter(|t| t.shift % m == r)
                .map(|t| t.unscaled(m, r).expect("dissection terms are series in q^m"))
                .collect();
            let sub_order = (order - r) / m;
            let section = compile_sum(&parts, sub_order)?;
            compare(
                &mut report,
                &format!("section {m}n+{r}"),
                &lhs.extract(m, r)?,
                &section,
                |n| m * n + r,
            );
            let spread = section.scale_q(m)?;
            for n in 0..=spread.order() {
                if n + r <= order {
                    rebuilt.add_big_at(n + r, &spread.int_coeff(n));
                }
            }
        }
        compare(&mut report, "rebuilt", &lhs, &rebuilt, |n| n);
    }
    Ok(report)
}

/// `phi(q) = f2^5/(f1^2 f4^2)` and `psi(q) = f2^2/f1`, the product forms of
/// the series definitions.
pub fn verify_triple_product(order: usize) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("jacobi:triple_product", "theta");
    report.note("order", order);
    let phi_prod = EtaQuotient::from_terms(&[(2, 5), (1, -2), (4, -2)]).compile(order, None)?;
    compare(&mut report, "phi", &phi_series(order), &phi_prod, |n| n);
    let psi_prod = EtaQuotient::from_terms(&[(2, 2), (1, -1)]).compile(order, None)?;
    compare(&mut report, "psi", &psi_series(order), &psi_prod, |n| n);
    let f1 = crate::qseries::eta_series(1, order);
    compare(&mut report, "f(-q,-q^2)", &theta_f(ThetaSpec::new(1, 2)?, order), &f1, |n| n);
    Ok(report)
}

/// Reconstruction and residue claims for one `p`-dissection.
pub fn verify_dissection(d: &PDissection, target: &QSeries, id: &str) -> VerificationReport {
    let mut report = VerificationReport::new(id, "dissection");
    report.note("prime", d.prime);
    report.note("order", target.order());
    compare(&mut report, "sum", &d.sum(), target, |n| n);
    let p = d.prime as usize;
    for t in &d.terms {
        let k = t.k.map_or("distinguished".to_string(), |k| k.to_string());
        for e in t.series.support() {
            report.check((e % p) as u64 == t.residue, || {
                Failure::new(&[("k", k.clone())], e, format!("off class {}", t.residue))
            });
        }
    }
    let dist = d.distinguished().residue;
    for t in d.terms.iter().filter(|t| t.k.is_some()) {
        report.check(t.residue != dist, || {
            Failure::new(&[("k", t.k.unwrap().to_string())], t.residue, "hits distinguished class")
        });
    }
    report
}

pub fn verify_f1_dissection(p: u64, order: usize) -> Result<VerificationReport> {
    let d = p_dissect_f1(p, order)?;
    let target = crate::qseries::eta_series(1, order);
    Ok(verify_dissection(&d, &target, &format!("dissect:f1:{p}")))
}

pub fn verify_f1_cubed_dissection(p: u64, order: usize) -> Result<VerificationReport> {
    let d = p_dissect_f1_cubed(p, order)?;
    let target = crate::qseries::eta_series(1, order).pow(3)?;
    Ok(verify_dissection(&d, &target, &format!("dissect:f1cubed:{p}")))
}

/// Coefficient of the distinguished term at its leading exponent.
pub fn distinguished_leading(d: &PDissection) -> (usize, BigInt) {
    let t = d.distinguished();
    let e = t.series.support()[0];
    (e, t.series.int_coeff(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::eta_series;

    #[test]
    fn theta_specialisations() {
        assert_eq!(theta_f(ThetaSpec::new(1, 2).unwrap(), 50), eta_series(1, 50));
        // f(-q,-q) = sum (-1)^n q^{n^2}: n and -n pair up.
        let s = theta_f(ThetaSpec::new(1, 1).unwrap(), 9).to_i64_vec().unwrap();
        assert_eq!(s, vec![1, -2, 0, 0, 2, 0, 0, 0, 0, -2]);
        let a = theta_f(ThetaSpec::new(2, 4).unwrap(), 40);
        let b = theta_f(ThetaSpec::new(1, 2).unwrap(), 20).scale_q(2).unwrap();
        assert_eq!(a, b);
        assert!(ThetaSpec::new(0, 1).is_err());
    }

    #[test]
    fn theta_is_symmetric() {
        for (a, b) in [(1, 2), (3, 7), (5, 11), (2, 9)] {
            assert_eq!(
                theta_f(ThetaSpec::new(a, b).unwrap(), 200),
                theta_f(ThetaSpec::new(b, a).unwrap(), 200)
            );
        }
    }

    #[test]
    fn phi_psi_examples() {
        assert_eq!(phi_series(5).to_i64_vec().unwrap(), vec![1, 2, 0, 0, 2, 0]);
        assert_eq!(psi_series(6).to_i64_vec().unwrap(), vec![1, 1, 0, 1, 0, 0, 1]);
        let prod = EtaQuotient::from_terms(&[(2, 5), (1, -2), (4, -2)]);
        assert_eq!(phi_series(100), prod.compile(100, None).unwrap());
    }

    #[test]
    fn triple_product_to_300() {
        assert_eq!(verify_triple_product(300).unwrap().status(), crate::Status::Pass);
    }

    #[test]
    fn f1_dissection_at_5_and_7() {
        let d = p_dissect_f1(5, 200).unwrap();
        assert_eq!(distinguished_leading(&d), (1, BigInt::from(-1)));
        assert_eq!(d.terms.len(), 5);
        assert_eq!(d.sum(), eta_series(1, 200));
        let d7 = p_dissect_f1(7, 200).unwrap();
        assert_eq!(d7.distinguished().residue, 2);
        assert!(d7.residues_avoid_distinguished());
        assert!(d7.supports_respect_residues());
    }

    #[test]
    fn f1_cubed_dissection_small_primes() {
        let d = p_dissect_f1_cubed(3, 100).unwrap();
        assert_eq!(distinguished_leading(&d), (1, BigInt::from(-3)));
        let d5 = p_dissect_f1_cubed(5, 100).unwrap();
        assert_eq!(d5.distinguished().residue, 3);
        assert!(d5.residues_avoid_distinguished());
        let cube = eta_series(1, 300).pow(3).unwrap();
        assert_eq!(p_dissect_f1_cubed(7, 300).unwrap().sum(), cube);
    }

    #[test]
    fn bad_primes_are_rejected() {
        assert!(matches!(p_dissect_f1(3, 10), Err(ThetaError::BadPrime(3, 5))));
        assert!(p_dissect_f1(9, 10).is_err());
        assert!(p_dissect_f1_cubed(2, 10).is_err());
        assert!(p_dissect_f1_cubed(15, 10).is_err());
    }

    #[test]
    fn catalog_has_eleven_distinct_entries() {
        let c = catalog();
        assert_eq!(c.len(), 11);
        let mut ids: Vec<_> = c.iter().map(|r| r.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 11);
        assert!(c.iter().all(|r| r.min_order() <= 400));
        assert_eq!(lookup("euler_5dissect").unwrap().min_order(), 120);
    }

    #[test]
    fn low_order_and_unknown_ids_fail_loudly() {
        assert!(matches!(
            verify_identity("euler_5dissect", 60),
            Err(ThetaError::OrderTooLow { min: 120, .. })
        ));
        assert!(matches!(
            verify_identity("nope", 400),
            Err(ThetaError::UnknownIdentity(_))
        ));
    }

    #[test]
    fn a_broken_identity_is_caught() {
        // 1/f1^2 with the 2q coefficient replaced by q.
        let lhs = sum(vec![Product::eta(1, 0, "1:-2")]).compile(200).unwrap();
        let rhs = sum(vec![
            Product::eta(1, 0, "8:5,2:-5,16:-2"),
            Product::eta(1, 1, "4:2,16:2,2:-5,8:-1"),
        ])
        .compile(200)
        .unwrap();
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn odd_section_of_p_1_15_is_not_the_quotient() {
        // The quotient is the even section; the odd one starts 1, 3, 7, 15.
        let odd = Recipe::Section {
            base: "1:-1,15:-1".parse().unwrap(),
            modulus: 2,
            residue: 1,
        }
        .compile(100)
        .unwrap();
        assert_eq!(odd.to_i64_vec().unwrap()[..4], [1, 3, 7, 15]);
        for shift in [0, 1] {
            let rhs = sum(vec![Product::eta(1, shift, "6:2,10:2,1:-2,3:-1,5:-1,15:-2")])
                .compile(100)
                .unwrap();
            assert_ne!(odd, rhs);
        }
    }

    #[test]
    fn identity_examples() {
        for id in ["inv_f1_sq_2dissect", "f5_over_f1_2dissect", "euler_5dissect"] {
            let r = verify_identity(id, 400).unwrap();
            assert_eq!(r.status(), crate::Status::Pass, "{id}: {:?}", r.failures);
        }
    }
}
