//! Registry of the congruence families for `b_{3,8}`, `b_{4,7}`, `b_{4,9}`
//! and `b_{3,5,8}`, and the sweeps that check them against generating
//! functions computed mod small moduli.
//!
//! Index expressions are evaluated in exact rational arithmetic. A point
//! whose index is not an integer is a finding in its own right and is
//! reported as a failure, never rounded.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

use crate::eta::EtaQuotient;
use crate::newman::{self, NewmanError, NewmanSeries};
use crate::partitions::RegularitySpec;
use crate::qseries::{QSeries, Ring, SeriesError};
pub use crate::report::{Failure, Status, VerificationReport};
use crate::theta::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CongruenceError {
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("family {id} is not a {expected} family")]
    WrongKind { id: String, expected: &'static str },
    #[error("family {id} needs series order {need}, cap is {cap}")]
    InsufficientOrder { id: String, need: usize, cap: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Newman(#[from] NewmanError),
}

pub type Result<T> = std::result::Result<T, CongruenceError>;

/// Default series order for modular sweeps.
pub const DEFAULT_ORDER_CAP: usize = 200_000;
pub const DEFAULT_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

/// A counting function, identified by its generating eta quotient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Target {
    pub name: String,
    pub eta: EtaQuotient,
}

impl Target {
    pub fn regular(forbidden: &[u64]) -> Target {
        let spec = RegularitySpec::new(forbidden).expect("valid divisors");
        let name = forbidden.iter().map(u64::to_string).collect::<Vec<_>>().join("_");
        Target {
            name: format!("b_{name}"),
            eta: spec.eta_quotient(),
        }
    }

    /// `f3 f5 f8 / (f1 f15 f24 f40 f120)`, the product the `b_{3,5,8}`
    /// families are stated for. The true `(3,5,8)`-regular count has
    /// `f120` in the numerator instead; the two differ from `q^120` on and
    /// the families only hold for this one.
    pub fn b358_printed() -> Target {
        Target {
            name: "b_3_5_8_printed".into(),
            eta: "3:1,5:1,8:1,1:-1,15:-1,24:-1,40:-1,120:-1".parse().unwrap(),
        }
    }

    pub fn newman(series: NewmanSeries) -> Target {
        let (r, s, qp) = series.exponents();
        Target {
            name: series.name().into(),
            eta: EtaQuotient::from_terms(&[(1, r as i32), (qp as usize, s as i32)]),
        }
    }
}

/// One point of a sweep grid. `p` and `j` are absent for families that do
/// not range over them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridPoint {
    pub n: u64,
    pub p: Option<u64>,
    pub j: Option<u64>,
}

impl GridPoint {
    fn p(&self) -> u64 {
        self.p.expect("family ranges over p")
    }

    fn j(&self) -> u64 {
        self.j.expect("family ranges over j")
    }

    fn params(&self, j_name: &str) -> Vec<(&'static str, String)> {
        let mut v = vec![("n", self.n.to_string())];
        if let Some(p) = self.p {
            v.push(("p", p.to_string()));
        }
        if let Some(j) = self.j {
            v.push((leak_name(j_name), j.to_string()));
        }
        v
    }
}

fn leak_name(name: &str) -> &'static str {
    match name {
        "k" => "k",
        "r" => "r",
        _ => "j",
    }
}

pub type IndexFn = fn(&GridPoint) -> BigRational;

/// Per-point or per-prime side conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hypothesis {
    /// `p` does not divide `a n + b`.
    PNotDividing { a: i64, b: i64 },
    /// `p = residue (mod modulus)`.
    PrimeCongruent { modulus: u64, residue: u64 },
    /// `omega(p) mod modulus` lies in `residues`.
    OmegaClass {
        series: NewmanSeries,
        modulus: u64,
        residues: &'static [u64],
    },
}

impl Hypothesis {
    fn is_per_prime(&self) -> bool {
        !matches!(self, Hypothesis::PNotDividing { .. })
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::PNotDividing { a, b } => match (a, b) {
                (1, 0) => write!(f, "p ∤ n"),
                _ => write!(f, "p ∤ {a}n+{b}"),
            },
            Hypothesis::PrimeCongruent { modulus, residue } => {
                write!(f, "p ≡ {residue} (mod {modulus})")
            }
            Hypothesis::OmegaClass {
                series,
                modulus,
                residues,
            } => write!(f, "omega_{}(p) mod {modulus} in {residues:?}", series.name()),
        }
    }
}

/// Values taken by the family's second parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JRange {
    None,
    Fixed(&'static [u64]),
    /// `0..=j_max`
    UpTo,
    /// `1..=p-1`
    BelowPrime,
}

#[derive(Debug, Clone)]
pub enum FamilyKind {
    /// `target(index) = 0 (mod M)`.
    Vanishing,
    /// `target(index) = multiplier * other(other_index) (mod M)`.
    Equivalence {
        other: Target,
        other_index: IndexFn,
        multiplier: i64,
    },
    /// `sum_n target(m n + r) q^n = multiplier * rhs (mod M)` as series.
    Series {
        section_modulus: usize,
        section_residue: usize,
        rhs: EtaQuotient,
        multiplier: i64,
    },
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Vanishing => "vanishing",
            FamilyKind::Equivalence { .. } => "equivalence",
            FamilyKind::Series { .. } => "series",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CongruenceFamily {
    pub id: &'static str,
    pub statement: &'static str,
    pub target: Target,
    pub modulus: u64,
    pub index: IndexFn,
    pub kind: FamilyKind,
    /// Smallest prime allowed, `None` when the family has no `p`.
    pub prime_bound: Option<u64>,
    pub j_range: JRange,
    pub j_name: &'static str,
    pub hypotheses: Vec<Hypothesis>,
    pub default_n_max: u64,
    pub default_j_max: u64,
}

fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

fn pw(p: u64, e: u64) -> BigInt {
    big(p).pow(e as u32)
}

fn int(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

fn frac(num: BigInt, den: i64) -> BigRational {
    BigRational::new(num, BigInt::from(den))
}

/// Exact decimal when the denominator is `2^a 5^b`, else `num/den`.
pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        return x.numer().to_string();
    }
    let mut den = x.denom().clone();
    let (two, five) = (big(2), big(5));
    let mut digits = 0u32;
    let (mut c2, mut c5) = (0u32, 0u32);
    while den.is_multiple_of(&two) {
        den /= &two;
        c2 += 1;
    }
    while den.is_multiple_of(&five) {
        den /= &five;
        c5 += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", x.numer(), x.denom());
    }
    digits += c2.max(c5);
    let scaled = (x * int(big(10).pow(digits))).to_integer();
    let neg = scaled.is_negative();
    let s = scaled.abs().to_string();
    let s = format!("{:0>width$}", s, width = digits as usize + 1);
    let (ip, fp) = s.split_at(s.len() - digits as usize);
    format!("{}{ip}.{fp}", if neg { "-" } else { "" })
}

/// Every family asserted for the four counting functions.
pub fn registry() -> Vec<CongruenceFamily> {
    let b38 = Target::regular(&[3, 8]);
    let b47 = Target::regular(&[4, 7]);
    let b49 = Target::regular(&[4, 9]);
    let b358 = Target::b358_printed();
    let omega_b_even = Hypothesis::OmegaClass {
        series: NewmanSeries::B,
        modulus: 2,
        residues: &[0],
    };
    let omega_b_odd = Hypothesis::OmegaClass {
        series: NewmanSeries::B,
        modulus: 2,
        residues: &[1],
    };
    let omega_a_zero = Hypothesis::OmegaClass {
        series: NewmanSeries::A,
        modulus: 8,
        residues: &[0],
    };
    let omega_a_odd = Hypothesis::OmegaClass {
        series: NewmanSeries::A,
        modulus: 8,
        residues: &[1, 3, 5, 7],
    };
    let p_nmid_n = Hypothesis::PNotDividing { a: 1, b: 0 };
    let base = |id, statement, target: &Target, modulus, index: IndexFn| CongruenceFamily {
        id,
        statement,
        target: target.clone(),
        modulus,
        index,
        kind: FamilyKind::Vanishing,
        prime_bound: None,
        j_range: JRange::None,
        j_name: "j",
        hypotheses: vec![],
        default_n_max: 100,
        default_j_max: 1,
    };
    let b358_80n51: IndexFn = |pt| int(80 * big(pt.n) + 51);

    vec![
        CongruenceFamily {
            prime_bound: Some(5),
            j_range: JRange::UpTo,
            hypotheses: vec![omega_b_even, p_nmid_n.clone()],
            default_n_max: 1000,
            ..base(
                "T1.1.i",
                "b_{3,8}(2p^{4j+3}n + 5p^{4j+4}/12 + 7/12) = 0 (mod 2) if omega(p) even, p ∤ n",
                &b38,
                2,
                |pt| {
                    let (p, j) = (pt.p(), pt.j());
                    int(2 * pw(p, 4 * j + 3) * pt.n) + frac(5 * pw(p, 4 * j + 4), 12) + frac(big(7), 12)
                },
            )
        },
        CongruenceFamily {
            prime_bound: Some(5),
            j_range: JRange::UpTo,
            hypotheses: vec![omega_b_odd.clone(), Hypothesis::PNotDividing { a: 24, b: 5 }],
            default_n_max: 1000,
            ..base(
                "T1.1.ii.a",
                "b_{3,8}(2p^{6j+2}n + 5p^{6j+2}/12 + 7/12) = 0 (mod 2) if omega(p) odd, p ∤ 24n+5",
                &b38,
                2,
                |pt| {
                    let (p, j) = (pt.p(), pt.j());
                    int(2 * pw(p, 6 * j + 2) * pt.n) + frac(5 * pw(p, 6 * j + 2), 12) + frac(big(7), 12)
                },
            )
        },
        CongruenceFamily {
            prime_bound: Some(5),
            j_range: JRange::UpTo,
            hypotheses: vec![omega_b_odd, p_nmid_n.clone()],
            default_n_max: 1000,
            ..base(
                "T1.1.ii.b",
                "b_{3,8}(2p^{6j+5}n + 5p^{6j+6}/12 + 7/12) = 0 (mod 2) if omega(p) odd, p ∤ n",
                &b38,
                2,
                |pt| {
                    let (p, j) = (pt.p(), pt.j());
                    int(2 * pw(p, 6 * j + 5) * pt.n) + frac(5 * pw(p, 6 * j + 6), 12) + frac(big(7), 12)
                },
            )
        },
        CongruenceFamily {
            j_range: JRange::Fixed(&[1, 2, 3, 4, 5, 6]),
            default_n_max: 500,
            ..base(
                "T1.2.i",
                "b_{4,7}(14(7n+j)+13) = 0 (mod 2), j = 1..6",
                &b47,
                2,
                |pt| int(14 * (7 * big(pt.n) + pt.j()) + 13),
            )
        },
        CongruenceFamily {
            prime_bound: Some(3),
            kind: FamilyKind::Equivalence {
                other: b47.clone(),
                other_index: |pt| int(98 * big(pt.n) + 13),
                multiplier: 1,
            },
            ..base(
                "T1.2.ii",
                "b_{4,7}(98p^2n + (98p^2+6)/8) = b_{4,7}(98n+13) (mod 2)",
                &b47,
                2,
                |pt| {
                    let p = pt.p();
                    int(98 * pw(p, 2) * pt.n) + frac(98 * pw(p, 2) + 6, 8)
                },
            )
        },
        CongruenceFamily {
            prime_bound: Some(3),
            j_range: JRange::BelowPrime,
            default_n_max: 20,
            ..base(
                "T1.2.iii-printed",
                "b_{4,7}(98p^2n + (49p(p+6j)+3)/4) = 0 (mod 2), j = 1..p-1 (as printed)",
                &b47,
                2,
                |pt| {
                    let (p, j) = (pt.p(), pt.j());
                    int(98 * pw(p, 2) * pt.n) + frac(49 * big(p) * (big(p) + 6 * j) + 3, 4)
                },
            )
        },
        CongruenceFamily {
            prime_bound: Some(3),
            j_range: JRange::BelowPrime,
            default_n_max: 20,
            ..base(
                "T1.2.iii-corrected",
                "b_{4,7}(98p^2n + (49p(p+8j)+3)/4) = 0 (mod 2), j = 1..p-1",
                &b47,
                2,
                |pt| {
                    let (p, j) = (pt.p(), pt.j());
                    int(98 * pw(p, 2) * pt.n) + frac(49 * big(p) * (big(p) + 8 * j) + 3, 4)
                },
            )
        },
        base("T1.3.i", "b_{4,9}(8n+7) = 0 (mod 12)", &b49, 12, |pt| int(8 * big(pt.n) + 7)),
        base("T1.3.ii", "b_{4,9}(16n+15) = 0 (mod 8)", &b49, 8, |pt| int(16 * big(pt.n) + 15)),
        CongruenceFamily {
            kind: FamilyKind::Equivalence {
                other: Target::newman(NewmanSeries::A),
                other_index: |pt| int(big(pt.n)),
                multiplier: 4,
            },
            default_n_max: 150,
            ..base(
                "T1.3.iii",
                "b_{4,9}(16n+7) = 4 a(n) (mod 8), a(n) the coefficients of f1^6 f3",
                &b49,
                8,
                |pt| int(16 * big(pt.n) + 7),
            )
        },
        CongruenceFamily {
            kind: FamilyKind::Equivalence {
                other: b49.clone(),
                other_index: |pt| int(16 * big(pt.n) + 15),
                multiplier: 5,
            },
            ..base(
                "T1.3.iv",
                "b_{4,9}(32n+29) = 5 b_{4,9}(16n+15) (mod 9)",
                &b49,
                9,
                |pt| int(32 * big(pt.n) + 29),
            )
        },
        CongruenceFamily {
            prime_bound: Some(5),
            j_range: JRange::UpTo,
            j_name: "k",
            hypotheses: vec![omega_a_zero, p_nmid_n.clone()],
            default_n_max: 1000,
            ..base(
                "T1.4.i",
                "b_{4,9}(16p^{4k+3}n + 6p^{4k+4} + 1) = 0 (mod 8) if omega(p) = 0 (mod 8), p ∤ n",
                &b49,
                8,
                |pt| {
                    let (p, k) = (pt.p(), pt.j());
                    int(16 * pw(p, 4 * k + 3) * pt.n + 6 * pw(p, 4 * k + 4) + 1)
                },
            )
        },
        CongruenceFamily {
            prime_bound: Some(5),
            j_range: JRange::UpTo,
            j_name: "k",
            hypotheses: vec![
                Hypothesis::PrimeCongruent {
                    modulus: 8,
                    residue: 1,
                },
                omega_a_odd.clone(),
                Hypothesis::PNotDividing { a: 8, b: 3 },
            ],
            default_n_max: 1000,
            ..base(
                "T1.4.ii.a",
                "b_{4,9}(16p^{6k+2}n + 6p^{6k+2} + 1) = 0 (mod 8) if p = 1 (mod 8), omega(p) odd, p ∤ 8n+3",
                &b49,
                8,
                |pt| {
                    let (p, k) = (pt.p(), pt.j());
                    int(16 * pw(p, 6 * k + 2) * pt.n + 6 * pw(p, 6 * k + 2) + 1)
                },
            )
        },
        CongruenceFamily {
            prime_bound: Some(5),
            j_range: JRange::UpTo,
            j_name: "k",
            hypotheses: vec![
                Hypothesis::PrimeCongruent {
                    modulus: 8,
                    residue: 1,
                },
                omega_a_odd,
                p_nmid_n,
            ],
            default_n_max: 1000,
            ..base(
                "T1.4.ii.b",
                "b_{4,9}(16p^{6k+5}n + 6p^{6k+6} + 1) = 0 (mod 8) if p = 1 (mod 8), omega(p) odd, p ∤ n",
                &b49,
                8,
                |pt| {
                    let (p, k) = (pt.p(), pt.j());
                    int(16 * pw(p, 6 * k + 5) * pt.n + 6 * pw(p, 6 * k + 6) + 1)
                },
            )
        },
        CongruenceFamily {
            j_range: JRange::Fixed(&[2, 4]),
            ..base(
                "T1.5.i",
                "b_{3,5,8}(16(5n+j)+3) = 0 (mod 2), j in {2,4}",
                &b358,
                2,
                |pt| int(16 * (5 * big(pt.n) + pt.j()) + 3),
            )
        },
        CongruenceFamily {
            j_range: JRange::Fixed(&[2, 4]),
            ..base(
                "T1.5.ii",
                "b_{3,5,8}(80(5n+j)+51) = 0 (mod 2), j in {2,4}",
                &b358,
                2,
                |pt| int(80 * (5 * big(pt.n) + pt.j()) + 51),
            )
        },
        CongruenceFamily {
            j_range: JRange::Fixed(&[1, 3]),
            default_n_max: 20,
            ..base(
                "T1.5.iii",
                "b_{3,5,8}(400(5n+j)+291) = 0 (mod 2), j in {1,3}",
                &b358,
                2,
                |pt| int(400 * (5 * big(pt.n) + pt.j()) + 291),
            )
        },
        CongruenceFamily {
            kind: FamilyKind::Equivalence {
                other: b358.clone(),
                other_index: b358_80n51,
                multiplier: 1,
            },
            default_n_max: 20,
            ..base(
                "T1.5.iv",
                "b_{3,5,8}(2000n+1091) = b_{3,5,8}(80n+51) (mod 2)",
                &b358,
                2,
                |pt| int(2000 * big(pt.n) + 1091),
            )
        },
        CongruenceFamily {
            kind: FamilyKind::Equivalence {
                other: b358.clone(),
                other_index: b358_80n51,
                multiplier: 1,
            },
            j_range: JRange::UpTo,
            j_name: "k",
            default_n_max: 20,
            ..base(
                "T1.6",
                "b_{3,5,8}(16·5^{2k+1}n + (26·5^{2k+1}+23)/3) = b_{3,5,8}(80n+51) (mod 2)",
                &b358,
                2,
                |pt| {
                    let k = pt.j();
                    int(16 * pw(5, 2 * k + 1) * pt.n) + frac(26 * pw(5, 2 * k + 1) + 23, 3)
                },
            )
        },
        CongruenceFamily {
            j_range: JRange::Fixed(&[0, 1, 2, 4, 5, 6]),
            j_name: "r",
            default_n_max: 200,
            ..base(
                "R1",
                "b_{3,8}(686n + 98r + 21) = 0 (mod 2), r in {0,1,2,4,5,6}",
                &b38,
                2,
                |pt| int(686 * big(pt.n) + 98 * big(pt.j()) + 21),
            )
        },
        CongruenceFamily {
            kind: FamilyKind::Series {
                section_modulus: 2,
                section_residue: 1,
                rhs: "1:2,3:1".parse().unwrap(),
                multiplier: 1,
            },
            default_n_max: 150,
            ..base(
                "S1",
                "sum b_{3,8}(2n+1) q^n = f1^2 f3 (mod 2)",
                &b38,
                2,
                |pt| int(2 * big(pt.n) + 1),
            )
        },
        CongruenceFamily {
            kind: FamilyKind::Series {
                section_modulus: 16,
                section_residue: 7,
                rhs: "1:6,3:1".parse().unwrap(),
                multiplier: 4,
            },
            default_n_max: 150,
            ..base(
                "S2",
                "sum b_{4,9}(16n+7) q^n = 4 f1^6 f3 (mod 8)",
                &b49,
                8,
                |pt| int(16 * big(pt.n) + 7),
            )
        },
    ]
}

pub fn lookup(id: &str) -> Result<CongruenceFamily> {
    registry()
        .into_iter()
        .find(|f| f.id == id)
        .ok_or_else(|| CongruenceError::UnknownFamily(id.to_string()))
}

/// Grid bounds for a sweep. `None` fields fall back to the family defaults.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub n_max: Option<u64>,
    pub j_max: Option<u64>,
    pub primes: Vec<u64>,
    pub order_cap: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_max: None,
            j_max: None,
            primes: DEFAULT_PRIMES.to_vec(),
            order_cap: DEFAULT_ORDER_CAP,
        }
    }
}

type CacheSlot = Arc<Mutex<Option<Arc<QSeries>>>>;

/// Series keyed by `(eta quotient, ring)`, holding the largest order
/// computed so far. Entries are published whole behind an `Arc`; the
/// per-key lock keeps two sweeps from expanding the same product at once.
#[derive(Debug, Default)]
pub struct SeriesCache {
    slots: Mutex<HashMap<(EtaQuotient, Ring), CacheSlot>>,
}

impl SeriesCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// A series of order at least `order`.
    pub fn get(&self, eta: &EtaQuotient, order: usize, ring: Ring) -> Result<Arc<QSeries>> {
        let slot = {
            let mut slots = self.slots.lock().unwrap();
            slots.entry((eta.clone(), ring)).or_default().clone()
        };
        let mut guard = slot.lock().unwrap();
        if let Some(s) = guard.as_ref() {
            if s.order() >= order {
                return Ok(s.clone());
            }
        }
        let s = Arc::new(eta.compile_in(order, ring)?);
        *guard = Some(s.clone());
        Ok(s)
    }
}

/// Values the per-prime hypotheses look at.
fn omega_note(series: NewmanSeries, p: u64, modulus: u64) -> Result<(BigInt, u64)> {
    let w = newman::omega_exact(series, p)?;
    let r = w.mod_floor(&big(modulus)).to_u64().unwrap();
    Ok((w, r))
}

/// Whether prime `p` passes the family's per-prime hypotheses.
pub fn prime_admissible(family: &CongruenceFamily, p: u64) -> Result<bool> {
    for h in family.hypotheses.iter().filter(|h| h.is_per_prime()) {
        let ok = match h {
            Hypothesis::PrimeCongruent { modulus, residue } => p % modulus == *residue,
            Hypothesis::OmegaClass {
                series,
                modulus,
                residues,
            } => residues.contains(&newman::omega(*series, p, *modulus)?),
            Hypothesis::PNotDividing { .. } => true,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn admissible_primes(family: &CongruenceFamily, primes: &[u64]) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for &p in primes {
        if family.prime_bound.is_some_and(|b| p >= b) && is_prime(p) && prime_admissible(family, p)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// Whether `n` passes the per-point hypotheses at prime `p`.
pub fn point_admissible(family: &CongruenceFamily, n: u64, p: Option<u64>) -> bool {
    family.hypotheses.iter().all(|h| match (h, p) {
        (Hypothesis::PNotDividing { a, b }, Some(p)) => {
            (*a as i128 * n as i128 + *b as i128).rem_euclid(p as i128) != 0
        }
        _ => true,
    })
}

fn j_values(family: &CongruenceFamily, p: Option<u64>, j_max: u64) -> Vec<Option<u64>> {
    match &family.j_range {
        JRange::None => vec![None],
        JRange::Fixed(v) => v.iter().map(|&j| Some(j)).collect(),
        JRange::UpTo => (0..=j_max).map(Some).collect(),
        JRange::BelowPrime => (1..p.expect("j < p needs a prime")).map(Some).collect(),
    }
}

/// The `(p, j)` pairs of the grid, with only the prime-bound filter applied.
fn statement_grid(family: &CongruenceFamily, primes: &[u64], j_max: u64) -> Vec<(Option<u64>, Option<u64>)> {
    let ps: Vec<Option<u64>> = match family.prime_bound {
        None => vec![None],
        Some(b) => primes.iter().copied().filter(|&p| p >= b && is_prime(p)).map(Some).collect(),
    };
    ps.into_iter()
        .flat_map(|p| j_values(family, p, j_max).into_iter().map(move |j| (p, j)))
        .collect()
}

/// Index expressions have the form `A n + B`; both are integral iff the
/// values at `n = 0` and `n = 1` are. Returns the first non-integral value.
fn non_integral(index: IndexFn, p: Option<u64>, j: Option<u64>) -> Option<(u64, BigRational)> {
    [0u64, 1].into_iter().find_map(|n| {
        let v = index(&GridPoint { n, p, j });
        (!v.is_integer()).then_some((n, v))
    })
}

/// Evaluates every index expression of the family over the `(p, j)` grid
/// and reports the non-integral ones. Side conditions on `omega` and on `n`
/// are ignored: integrality is a property of the statement.
pub fn integrality_audit(family: &CongruenceFamily, primes: &[u64], j_max: u64) -> VerificationReport {
    let mut report = VerificationReport::new(family.id, "integrality");
    let mut fns = vec![family.index];
    if let FamilyKind::Equivalence { other_index, .. } = &family.kind {
        fns.push(*other_index);
    }
    for (p, j) in statement_grid(family, primes, j_max) {
        for f in &fns {
            let bad = non_integral(*f, p, j);
            report.check(bad.is_none(), || {
                let (n, v) = bad.clone().unwrap();
                let pt = GridPoint { n, p, j };
                Failure::new(&pt.params(family.j_name), format_rational(&v), "non-integer")
            });
        }
    }
    report
}

/// Runs sweeps against a shared series cache.
#[derive(Debug, Default)]
pub struct Sweeper {
    cache: SeriesCache,
}

struct Point {
    at: GridPoint,
    index: usize,
    other: Option<usize>,
}

fn to_index(v: &BigRational) -> Option<usize> {
    v.to_integer().to_usize()
}

impl Sweeper {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cache(&self) -> &SeriesCache {
        &self.cache
    }

    /// Dispatches on the family kind.
    pub fn run(&self, family: &CongruenceFamily, config: &SweepConfig) -> Result<VerificationReport> {
        match family.kind {
            FamilyKind::Vanishing => self.sweep_vanishing(family, config),
            FamilyKind::Equivalence { .. } => self.sweep_equivalence(family, config),
            FamilyKind::Series { .. } => {
                let terms = config.n_max.unwrap_or(family.default_n_max) as usize;
                self.sweep_series_congruence(family, terms, config.order_cap)
            }
        }
    }

    pub fn sweep_vanishing(&self, family: &CongruenceFamily, config: &SweepConfig) -> Result<VerificationReport> {
        if !matches!(family.kind, FamilyKind::Vanishing) {
            return Err(CongruenceError::WrongKind {
                id: family.id.into(),
                expected: "vanishing",
            });
        }
        self.sweep_points(family, config)
    }

    pub fn sweep_equivalence(&self, family: &CongruenceFamily, config: &SweepConfig) -> Result<VerificationReport> {
        if !matches!(family.kind, FamilyKind::Equivalence { .. }) {
            return Err(CongruenceError::WrongKind {
                id: family.id.into(),
                expected: "equivalence",
            });
        }
        self.sweep_points(family, config)
    }

    fn sweep_points(&self, family: &CongruenceFamily, config: &SweepConfig) -> Result<VerificationReport> {
        let n_max = config.n_max.unwrap_or(family.default_n_max);
        let j_max = config.j_max.unwrap_or(family.default_j_max);
        let cap = config.order_cap;
        let mut report = VerificationReport::new(family.id, family.kind.name());
        report.note("target", format!("{} = {}", family.target.name, family.target.eta));
        report.note("modulus", family.modulus);
        report.note("n_max", n_max);

        // Per-prime hypotheses, with the omega table kept for the report.
        let mut primes_used = Vec::new();
        if family.prime_bound.is_some() {
            let grid_primes: Vec<u64> = config
                .primes
                .iter()
                .copied()
                .filter(|&p| family.prime_bound.is_some_and(|b| p >= b) && is_prime(p))
                .collect();
            for &p in &grid_primes {
                for h in &family.hypotheses {
                    if let Hypothesis::OmegaClass { series, modulus, .. } = h {
                        let (w, r) = omega_note(*series, p, *modulus)?;
                        report.note(
                            format!("omega_{}({p})", series.name()),
                            format!("{w} = {r} mod {modulus}"),
                        );
                    }
                }
                if prime_admissible(family, p)? {
                    primes_used.push(p);
                } else {
                    report.note(format!("excluded_prime({p})"), "hypotheses fail");
                }
            }
            report.note(
                "primes",
                primes_used.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
            );
        }
        if !matches!(family.j_range, JRange::None) {
            report.note("j_name", family.j_name);
            report.note("j_max", j_max);
        }

        let other_index = match &family.kind {
            FamilyKind::Equivalence { other_index, .. } => Some(*other_index),
            _ => None,
        };
        let prime_list: Vec<Option<u64>> = if family.prime_bound.is_some() {
            primes_used.iter().map(|&p| Some(p)).collect()
        } else {
            vec![None]
        };

        let mut points = Vec::new();
        let (mut excluded, mut out_of_range) = (0u64, 0u64);
        for &p in &prime_list {
            for j in j_values(family, p, j_max) {
                let bad = non_integral(family.index, p, j)
                    .or_else(|| other_index.and_then(|f| non_integral(f, p, j)));
                if let Some((n, v)) = bad {
                    let pt = GridPoint { n, p, j };
                    report.fail(Failure::new(&pt.params(family.j_name), format_rational(&v), "non-integer"));
                    continue;
                }
                for n in 0..=n_max {
                    if !point_admissible(family, n, p) {
                        excluded += 1;
                        continue;
                    }
                    let at = GridPoint { n, p, j };
                    let index = to_index(&(family.index)(&at));
                    let other = other_index.map(|f| to_index(&f(&at)));
                    match (index, other) {
                        (Some(i), None) if i <= cap => points.push(Point { at, index: i, other: None }),
                        (Some(i), Some(Some(o))) if i <= cap && o <= cap => {
                            points.push(Point { at, index: i, other: Some(o) })
                        }
                        _ => out_of_range += 1,
                    }
                }
            }
        }
        report.note("excluded_by_hypothesis", excluded);
        report.note("out_of_range", out_of_range);
        if out_of_range > 0 {
            report.note("order_cap", cap);
        }
        if points.is_empty() {
            return Ok(report);
        }

        let ring = Ring::Mod(family.modulus);
        let need = points.iter().map(|p| p.index).max().unwrap();
        let series = self.cache.get(&family.target.eta, need, ring)?;
        report.note("series_order", need);
        let m = family.modulus;
        match &family.kind {
            FamilyKind::Equivalence { other, multiplier, .. } => {
                let need2 = points.iter().filter_map(|p| p.other).max().unwrap();
                let series2 = self.cache.get(&other.eta, need2, ring)?;
                let k = (*multiplier).rem_euclid(m as i64) as u64;
                for pt in &points {
                    let o = pt.other.unwrap();
                    let lhs = series.residue_at(pt.index, m);
                    let rhs = k * series2.residue_at(o, m) % m;
                    report.check(lhs == rhs, || {
                        Failure::new(
                            &pt.at.params(family.j_name),
                            format!("{}~{}", pt.index, o),
                            format!("{lhs} vs {rhs}"),
                        )
                    });
                }
            }
            _ => {
                for pt in &points {
                    let r = series.residue_at(pt.index, m);
                    report.check(r == 0, || Failure::new(&pt.at.params(family.j_name), pt.index, r));
                }
            }
        }
        Ok(report)
    }

    /// Extracts `sum_n target(m n + r) q^n` for `n < terms` and compares it
    /// with `multiplier * rhs`, both mod the family modulus.
    pub fn sweep_series_congruence(
        &self,
        family: &CongruenceFamily,
        terms: usize,
        order_cap: usize,
    ) -> Result<VerificationReport> {
        let FamilyKind::Series {
            section_modulus: sm,
            section_residue: sr,
            rhs,
            multiplier,
        } = &family.kind
        else {
            return Err(CongruenceError::WrongKind {
                id: family.id.into(),
                expected: "series",
            });
        };
        let mut report = VerificationReport::new(family.id, "series");
        if terms == 0 {
            return Ok(report);
        }
        let need = sm * (terms - 1) + sr;
        if need > order_cap {
            return Err(CongruenceError::InsufficientOrder {
                id: family.id.into(),
                need,
                cap: order_cap,
            });
        }
        let ring = Ring::Mod(family.modulus);
        let full = self.cache.get(&family.target.eta, need, ring)?;
        let lhs = full.truncate(need).extract(*sm, *sr)?;
        let rhs = rhs.compile_in(terms - 1, ring)?.scale_coeffs(*multiplier);
        report.note("target", format!("{} = {}", family.target.name, family.target.eta));
        report.note("modulus", family.modulus);
        report.note("terms", terms);
        for n in 0..terms {
            let (a, b) = (lhs.residue_at(n, family.modulus), rhs.residue_at(n, family.modulus));
            report.check(a == b, || {
                Failure::new(&[("n", n.to_string())], sm * n + sr, format!("{a} vs {b}"))
            });
        }
        Ok(report)
    }
}
