//! Local data of global rational inputs: factorisation, residue classes at
//! odd primes, and the finite exceptional prime set of a generator list.
//!
//! The base field is Q throughout. An input is kept fully factored; all
//! residue computations reduce the unit part of alpha = u * p^r modulo p
//! and use Euler-criterion exponentiations, plus a primitive root when the
//! discrete log mod 4 is needed. Inputs are user-scale rationals, not a
//! factoring workload: numerators and denominators above a configurable
//! bit bound are rejected, and so are prime factors beyond 63 bits.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factor_u64, is_prime, mul_mod, pow_mod, smallest_primitive_root};
use crate::class_group::{ClassGroupElement, ResidueSize};
use crate::tables::UnitKind;
use crate::{Error, Result};

/// Default cap on numerator/denominator size, in bits.
pub const DEFAULT_INPUT_BITS: u32 = 128;

/// A nonzero rational in fully factored form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalInput {
    value: BigRational,
    negative: bool,
    /// prime -> exponent; positive for the numerator, negative for the
    /// denominator (the value is kept reduced, so signs never mix per prime)
    factors: BTreeMap<u64, i64>,
}

impl RationalInput {
    pub fn new(value: BigRational) -> Result<Self> {
        RationalInput::with_bit_bound(value, DEFAULT_INPUT_BITS)
    }

    pub fn with_bit_bound(value: BigRational, max_bits: u32) -> Result<Self> {
        if value.is_zero() {
            return Err(Error::ZeroInput);
        }
        let numer = value.numer().magnitude().clone();
        let denom = value.denom().magnitude().clone();
        if numer.bits() > max_bits as u64 || denom.bits() > max_bits as u64 {
            return Err(Error::InputTooLarge { limit: max_bits });
        }
        let mut factors = BTreeMap::new();
        for (p, e) in factor_big(&numer)? {
            factors.insert(p, e as i64);
        }
        for (p, e) in factor_big(&denom)? {
            factors.insert(p, -(e as i64));
        }
        Ok(RationalInput {
            negative: value.is_negative(),
            value,
            factors,
        })
    }

    pub fn from_integer(n: i64) -> Result<Self> {
        RationalInput::new(BigRational::from(BigInt::from(n)))
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn factors(&self) -> &BTreeMap<u64, i64> {
        &self.factors
    }

    /// v_p(alpha); zero for primes outside the support.
    pub fn valuation(&self, p: u64) -> i64 {
        self.factors.get(&p).copied().unwrap_or(0)
    }

    /// True iff alpha is a fourth power in Q*.
    pub fn is_fourth_power(&self) -> bool {
        !self.negative && self.factors.values().all(|e| e % 4 == 0)
    }

    /// The unit part u = alpha * p^(-r) reduced modulo the odd prime p.
    fn unit_residue(&self, p: u64) -> u64 {
        let mut u = if self.negative { p - 1 } else { 1 };
        for (&q, &e) in &self.factors {
            if q == p {
                continue;
            }
            let exp = e.rem_euclid(p as i64 - 1) as u64;
            u = mul_mod(u, pow_mod(q % p, exp, p), p);
        }
        u
    }

    /// Fourth-power status of the unit part of alpha at an odd prime,
    /// by Euler-criterion exponentiations.
    pub fn unit_kind(&self, p: u64) -> Result<UnitKind> {
        check_odd_prime(p)?;
        let u = self.unit_residue(p);
        if pow_mod(u, (p - 1) / 2, p) != 1 {
            return Ok(UnitKind::Nonsquare);
        }
        if p % 4 == 1 && pow_mod(u, (p - 1) / 4, p) != 1 {
            return Ok(UnitKind::SquareNotFourth);
        }
        Ok(UnitKind::FourthPower)
    }

    /// The class of alpha in Q_p*/Q_p*^4 with pi = p, under the convention
    /// that the smallest primitive root of p maps to discrete log 1.
    pub fn local_class(&self, p: u64) -> Result<ClassGroupElement> {
        check_odd_prime(p)?;
        let z = cached_primitive_root(p)?;
        self.local_class_with_root(p, z)
    }

    /// Same as [`local_class`](Self::local_class) for an explicit generator
    /// choice; masses must not depend on which primitive root is used.
    pub fn local_class_with_root(&self, p: u64, z: u64) -> Result<ClassGroupElement> {
        check_odd_prime(p)?;
        let q = ResidueSize::new(p)?;
        let r = self.valuation(p).rem_euclid(4) as u8;
        let u = self.unit_residue(p);
        let c = if q.unit_quotient_order() == 2 {
            if pow_mod(u, (p - 1) / 2, p) == 1 {
                0
            } else {
                1
            }
        } else {
            // compare u^((p-1)/4) against powers of i = z^((p-1)/4)
            let i = pow_mod(z, (p - 1) / 4, p);
            let t = pow_mod(u, (p - 1) / 4, p);
            let mut power = 1u64;
            let mut c = None;
            for k in 0u8..4 {
                if power == t {
                    c = Some(k);
                    break;
                }
                power = mul_mod(power, i, p);
            }
            c.expect("u^((p-1)/4) is a fourth root of unity")
        };
        Ok(ClassGroupElement { v: r, c })
    }
}

impl std::fmt::Display for RationalInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.value.denom().is_one() {
            write!(f, "{}", self.value.numer())
        } else {
            write!(f, "{}/{}", self.value.numer(), self.value.denom())
        }
    }
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::EvenPrime);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

/// The primes where the generator list fails to be locally unconditional:
/// odd p with 4 not dividing some v_p(alpha_i), together with p = 2 and
/// the archimedean place, which are always exceptional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalSet {
    odd_primes: BTreeSet<u64>,
}

impl ExceptionalSet {
    pub fn of_generators(generators: &[RationalInput]) -> ExceptionalSet {
        let mut odd_primes = BTreeSet::new();
        for alpha in generators {
            for (&p, &e) in alpha.factors() {
                if p != 2 && e % 4 != 0 {
                    odd_primes.insert(p);
                }
            }
        }
        ExceptionalSet { odd_primes }
    }

    /// The odd members, ascending. The set always also contains p = 2 and
    /// the archimedean place; those are implicit.
    pub fn odd_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.odd_primes.iter().copied()
    }

    pub fn contains(&self, p: u64) -> bool {
        p == 2 || self.odd_primes.contains(&p)
    }

    pub fn includes_archimedean(&self) -> bool {
        true
    }
}

impl std::fmt::Display for ExceptionalSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{2")?;
        for p in &self.odd_primes {
            write!(f, ", {p}")?;
        }
        write!(f, ", oo}}")
    }
}

fn cached_primitive_root(p: u64) -> Result<u64> {
    static CACHE: Mutex<BTreeMap<u64, u64>> = Mutex::new(BTreeMap::new());
    let mut cache = CACHE.lock().expect("primitive root cache poisoned");
    if let Some(&z) = cache.get(&p) {
        return Ok(z);
    }
    let z = smallest_primitive_root(p)?;
    cache.insert(p, z);
    Ok(z)
}

/// Factor a positive big integer whose prime factors all fit in 63 bits.
///
/// Trial division by small primes first; any remaining cofactor must fit
/// in u64 (then certified and split there), otherwise the input is out of
/// scope for this calculator.
fn factor_big(n: &BigUint) -> Result<BTreeMap<u64, u32>> {
    let mut out = BTreeMap::new();
    if n.is_one() {
        return Ok(out);
    }
    let mut rest = n.clone();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let pb = BigUint::from(p);
        while (&rest % &pb).is_zero() {
            *out.entry(p).or_insert(0) += 1;
            rest /= &pb;
        }
    }
    match rest.to_u64() {
        Some(m) => {
            if m > 1 {
                if m >= 1 << 63 {
                    return Err(Error::FactorOutOfScope(n.to_string()));
                }
                for (p, e) in factor_u64(m) {
                    *out.entry(p).or_insert(0) += e;
                }
            }
            Ok(out)
        }
        None => {
            // beyond u64: keep trial-dividing a while, then give up cleanly
            let mut d = 49u64;
            while d < (1 << 20) && rest.bits() > 63 {
                let db = BigUint::from(d);
                while (&rest % &db).is_zero() {
                    // d survived trial division below, so it is prime
                    *out.entry(d).or_insert(0) += 1;
                    rest /= &db;
                }
                d += 2;
            }
            match rest.to_u64() {
                Some(m) if m > 1 && m < 1 << 63 => {
                    for (p, e) in factor_u64(m) {
                        *out.entry(p).or_insert(0) += e;
                    }
                    Ok(out)
                }
                Some(1) => Ok(out),
                _ => Err(Error::FactorOutOfScope(n.to_string())),
            }
        }
    }
}
