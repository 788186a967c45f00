//! Global densities and proportions as Euler products over the places of Q.
//!
//! The density of S4-quartic fields whose norm group contains a finitely
//! generated subgroup is (1/2) times the product of local masses over all
//! places; the proportion relative to all S4-quartic fields is the product
//! of mass ratios. Factors at the archimedean place, at 2, at primes in
//! the exceptional set, and at every odd prime up to the cutoff B are
//! exact rationals; the omitted factors beyond B are bracketed:
//!
//! * each omitted proportion factor lies in [1 - 1/p^2, 1], and
//!   -log(1-x) <= 2x for x <= 1/2 gives log of the tail in [-2/B, 0],
//!   so the tail lies in [1 - 2/B, 1];
//! * each omitted unconditional mass lies in (1, 1 + 1/p^2), so their
//!   product lies in (1, exp(1/B)) and exp(x) <= 1/(1-x) bounds the
//!   absolute-density tail inside [1 - 2/B, B/(B-1)].
//!
//! Both use sum over p > B of 1/p^2 < sum over n > B of 1/n^2 < 1/B.
//!
//! The exact finite part is accumulated as an unreduced rational through a
//! balanced product tree in ascending-prime order, making outputs
//! bit-reproducible; value and absolute error come from outward-rounded
//! 128-bit dyadic brackets around it.

use std::collections::BTreeSet;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;

use crate::class_group::ResidueSize;
use crate::interval::Interval;
use crate::localize::{ExceptionalSet, RationalInput};
use crate::sieve::PrimeSieve;
use crate::tables::{
    archimedean_mass, dyadic_mass, odd_mass, reduce_dyadic_class, unconditional_mass,
    ArchimedeanClass, DyadicMassKey, OddMassKey, UnitKind,
};
use crate::{Error, Mass, Result};

/// A numerical value with a rigorous absolute error bound, together with
/// the exact rational product of all explicitly computed factors.
///
/// The true limit lies in [value - abs_error, value + abs_error]; the
/// error covers the Euler-product tail, any unresolved dyadic interval,
/// and all rounding. `finite_part` is kept unreduced (its factors can
/// number in the tens of thousands), but it is an exact rational.
#[derive(Debug, Clone)]
pub struct DensityEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub finite_part: BigRational,
    pub cutoff: u64,
}

impl DensityEstimate {
    fn exact_one(cutoff: u64) -> DensityEstimate {
        DensityEstimate {
            value: 1.0,
            abs_error: 0.0,
            finite_part: BigRational::one(),
            cutoff,
        }
    }
}

/// A two-sided bound on a local mass at p = 2 when the static table cannot
/// resolve a multi-generator condition exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassInterval {
    lower: Mass,
    upper: Mass,
}

impl MassInterval {
    pub fn new(lower: Mass, upper: Mass) -> Result<MassInterval> {
        if lower > upper || lower.as_ratio() < &trivial_dyadic_mass() {
            return Err(Error::InvalidInterval);
        }
        Ok(MassInterval { lower, upper })
    }

    pub fn lower(&self) -> &Mass {
        &self.lower
    }

    pub fn upper(&self) -> &Mass {
        &self.upper
    }
}

/// Local mass at p = 2 of a generator list: exact when the joint class
/// group condition is generated by a single class, else an interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DyadicLocalMass {
    Exact(Mass),
    Range(MassInterval),
}

/// Exact per-place factors behind a [`DensityEstimate`], for reporting.
#[derive(Debug, Clone)]
pub struct PlaceBreakdown {
    /// Factor at the real place of Q.
    pub archimedean: BigRational,
    /// Exact factor at 2, or the [lower, upper] bounds used.
    pub dyadic: DyadicFactor,
    /// Exact factors at the exceptional odd primes, ascending.
    pub exceptional_odd: Vec<(u64, BigRational)>,
}

#[derive(Debug, Clone)]
pub enum DyadicFactor {
    Exact(BigRational),
    Interval {
        lower: BigRational,
        upper: BigRational,
    },
}

/// Trivial-symbol mass at q = 2: the unconditional lower bound 11/16 for
/// every dyadic mass.
fn trivial_dyadic_mass() -> BigRational {
    BigRational::new(BigInt::from(11), BigInt::from(16))
}

/// m_{alpha,p} / m_{1,p} at an odd prime, for a single generator.
/// Equals 1 whenever v_p(alpha) = 0 mod 4 and the unit part is a fourth
/// power (a square when p = 3 mod 4).
pub fn ratio_factor(alpha: &RationalInput, p: u64) -> Result<BigRational> {
    let q = ResidueSize::new(p)?;
    let r = alpha.valuation(p).rem_euclid(4) as u8;
    let kind = alpha.unit_kind(p)?;
    if r == 0 && kind == UnitKind::FourthPower {
        return Ok(BigRational::one());
    }
    let mass = odd_mass(OddMassKey {
        q,
        r_mod_4: r,
        unit_kind: kind,
    })?;
    Ok(mass.into_ratio() / unconditional_mass(p).into_ratio())
}

/// Mass of the joint condition "every generator is a norm" at an odd
/// prime, through the enumeration oracle on the generators' classes.
pub fn subgroup_local_mass_odd(p: u64, generators: &[RationalInput]) -> Result<Mass> {
    let q = ResidueSize::new(p)?;
    let mut classes = Vec::with_capacity(generators.len().max(1));
    for alpha in generators {
        classes.push(alpha.local_class(p)?);
    }
    if classes.is_empty() {
        classes.push(crate::class_group::ClassGroupElement::IDENTITY);
    }
    crate::algebra::oracle_local_mass(q, &classes)
}

/// Local mass at p = 2 of a generator list, from the static table.
///
/// The classes of the generators in Q_2*/Q_2*^4 = Z/4 x (Z/16)* generate a
/// subgroup; if one generator's class already generates it, its table
/// entry is the exact answer. Otherwise the mass is bounded below by the
/// trivial-symbol mass 11/16 and above by the best single generator.
pub fn dyadic_subgroup_mass(generators: &[RationalInput]) -> Result<DyadicLocalMass> {
    let mut keys = Vec::with_capacity(generators.len());
    for alpha in generators {
        keys.push(reduce_dyadic_class(alpha.value())?);
    }
    keys.retain(|k| (k.r_mod_4, k.u_mod_16) != (0, 1));
    if keys.is_empty() {
        return Ok(DyadicLocalMass::Exact(unconditional_mass(2)));
    }
    let joint = dyadic_span(&keys);
    for key in &keys {
        if dyadic_span(std::slice::from_ref(key)) == joint {
            return Ok(DyadicLocalMass::Exact(dyadic_mass(*key)));
        }
    }
    let upper = keys
        .iter()
        .map(|&k| dyadic_mass(k))
        .min()
        .expect("nonempty");
    let lower = Mass::new(trivial_dyadic_mass()).expect("positive");
    Ok(DyadicLocalMass::Range(MassInterval::new(lower, upper)?))
}

/// Subgroup of Z/4 x (Z/16)* generated by the given classes.
fn dyadic_span(keys: &[DyadicMassKey]) -> BTreeSet<(u8, u8)> {
    let mut span = BTreeSet::from([(0u8, 1u8)]);
    let mut frontier: Vec<(u8, u8)> = vec![(0, 1)];
    while let Some((r, u)) = frontier.pop() {
        for k in keys {
            let next = (
                (r + k.r_mod_4) % 4,
                (u as u16 * k.u_mod_16 as u16 % 16) as u8,
            );
            if span.insert(next) {
                frontier.push(next);
            }
        }
    }
    span
}

/// Proportion of S4-quartic fields whose norm group contains all the
/// generators: the Euler product of mass ratios over every place, with
/// factors beyond the cutoff bracketed as documented at module level.
pub fn proportion(
    generators: &[RationalInput],
    cutoff: u64,
    cache_path: Option<&Path>,
) -> Result<(DensityEstimate, PlaceBreakdown)> {
    if cutoff < 100 {
        return Err(Error::CutoffTooSmall(cutoff));
    }
    // fourth powers in Q* are norms at every place: drop them, and if
    // nothing remains every factor is exactly 1
    let active: Vec<&RationalInput> = generators.iter().filter(|a| !a.is_fourth_power()).collect();
    if active.is_empty() {
        return Ok((
            DensityEstimate::exact_one(cutoff),
            PlaceBreakdown {
                archimedean: BigRational::one(),
                dyadic: DyadicFactor::Exact(BigRational::one()),
                exceptional_odd: Vec::new(),
            },
        ));
    }
    let active: Vec<RationalInput> = active.into_iter().cloned().collect();

    // archimedean ratio: (7/24)/(5/12) when some generator is negative
    let archimedean = if active.iter().any(|a| a.is_negative()) {
        archimedean_mass(ArchimedeanClass::RealNegative).into_ratio()
            / archimedean_mass(ArchimedeanClass::RealPositive).into_ratio()
    } else {
        BigRational::one()
    };

    // dyadic ratio: mass at 2 divided by m_{1,2} = 17/16
    let m12 = unconditional_mass(2).into_ratio();
    let (dyadic_factor, dyadic_interval) = match dyadic_subgroup_mass(&active)? {
        DyadicLocalMass::Exact(m) => (DyadicFactor::Exact(m.into_ratio() / &m12), None),
        DyadicLocalMass::Range(range) => {
            let lower = range.lower().as_ratio() / &m12;
            let upper = range.upper().as_ratio() / &m12;
            (
                DyadicFactor::Interval {
                    lower: lower.clone(),
                    upper: upper.clone(),
                },
                Some(Interval::from_ratio_pair(&lower, &upper)),
            )
        }
    };

    let exceptional = ExceptionalSet::of_generators(&active);
    let mut exceptional_odd = Vec::new();
    for p in exceptional.odd_primes() {
        let mass = subgroup_local_mass_odd(p, &active)?;
        exceptional_odd.push((p, mass.into_ratio() / unconditional_mass(p).into_ratio()));
    }

    let mut product = RationalProduct::new();
    product.push(&archimedean);
    if let DyadicFactor::Exact(f) = &dyadic_factor {
        product.push(f);
    }
    for (_, f) in &exceptional_odd {
        product.push(f);
    }

    // sieved odd primes outside the exceptional set: all valuations are
    // 0 mod 4 there, so the joint condition is the hardest unit kind
    let sieve = PrimeSieve::new(cutoff, cache_path);
    for p in sieve.primes(None).skip(1) {
        if exceptional.contains(p) {
            continue;
        }
        if let Some(kind) = joint_unit_kind(&active, p)? {
            let q = ResidueSize::new(p)?;
            let mass = odd_mass(OddMassKey {
                q,
                r_mod_4: 0,
                unit_kind: kind,
            })?;
            product.push(&(mass.into_ratio() / unconditional_mass(p).into_ratio()));
        }
    }

    let finite_part = product.finish();
    // omitted factors lie in [1 - 1/p^2, 1]; fold [1 - 2/B, 1] outward
    let tail = tail_bracket_proportion(cutoff);
    let mut bracket = Interval::from_ratio(&finite_part) * tail;
    if let Some(iv) = dyadic_interval {
        bracket = bracket * iv;
    }
    let (value, abs_error) = bracket.value_and_error();
    Ok((
        DensityEstimate {
            value,
            abs_error,
            finite_part,
            cutoff,
        },
        PlaceBreakdown {
            archimedean,
            dyadic: dyadic_factor,
            exceptional_odd,
        },
    ))
}

/// Density of S4-quartic fields (per unit of bounded discriminant) whose
/// norm group contains all the generators: (1/2) times the product of
/// local masses, the residue of zeta_Q at 1 being 1.
pub fn absolute_density(
    generators: &[RationalInput],
    cutoff: u64,
    cache_path: Option<&Path>,
) -> Result<(DensityEstimate, PlaceBreakdown)> {
    if cutoff < 100 {
        return Err(Error::CutoffTooSmall(cutoff));
    }
    let active: Vec<RationalInput> = generators
        .iter()
        .filter(|a| !a.is_fourth_power())
        .cloned()
        .collect();

    let archimedean = if active.iter().any(|a| a.is_negative()) {
        archimedean_mass(ArchimedeanClass::RealNegative).into_ratio()
    } else {
        archimedean_mass(ArchimedeanClass::RealPositive).into_ratio()
    };

    let (dyadic_factor, dyadic_interval) = match dyadic_subgroup_mass(&active)? {
        DyadicLocalMass::Exact(m) => (DyadicFactor::Exact(m.into_ratio()), None),
        DyadicLocalMass::Range(range) => {
            let lower = range.lower().as_ratio().clone();
            let upper = range.upper().as_ratio().clone();
            (
                DyadicFactor::Interval {
                    lower: lower.clone(),
                    upper: upper.clone(),
                },
                Some(Interval::from_ratio_pair(&lower, &upper)),
            )
        }
    };

    let exceptional = ExceptionalSet::of_generators(&active);
    let mut exceptional_odd = Vec::new();
    for p in exceptional.odd_primes() {
        let mass = subgroup_local_mass_odd(p, &active)?;
        exceptional_odd.push((p, mass.into_ratio()));
    }

    let mut product = RationalProduct::new();
    product.push(&BigRational::new(BigInt::one(), BigInt::from(2)));
    product.push(&archimedean);
    if let DyadicFactor::Exact(f) = &dyadic_factor {
        product.push(f);
    }
    for (_, f) in &exceptional_odd {
        product.push(f);
    }

    let sieve = PrimeSieve::new(cutoff, cache_path);
    for p in sieve.primes(None).skip(1) {
        if exceptional.contains(p) {
            continue;
        }
        let q = ResidueSize::new(p)?;
        let kind = joint_unit_kind(&active, p)?.unwrap_or(UnitKind::FourthPower);
        let mass = odd_mass(OddMassKey {
            q,
            r_mod_4: 0,
            unit_kind: kind,
        })?;
        product.push(mass.as_ratio());
    }

    let finite_part = product.finish();
    // omitted masses are m_{1,p} * (ratio in [1 - 1/p^2, 1]) with
    // m_{1,p} in (1, 1 + 1/p^2): bracket the tail by [1 - 2/B, B/(B-1)]
    let tail = tail_bracket_absolute(cutoff);
    let mut bracket = Interval::from_ratio(&finite_part) * tail;
    if let Some(iv) = dyadic_interval {
        bracket = bracket * iv;
    }
    let (value, abs_error) = bracket.value_and_error();
    Ok((
        DensityEstimate {
            value,
            abs_error,
            finite_part,
            cutoff,
        },
        PlaceBreakdown {
            archimedean,
            dyadic: dyadic_factor,
            exceptional_odd,
        },
    ))
}

/// An a priori finite upper bound for the density of fields admitting
/// alpha as a norm, as an exact rational:
///
///   (1/2) * Z * prod over p in S of m_{alpha,p},
///
/// where S = {2, oo} plus the odd primes with 4 not dividing v_p(alpha),
/// and Z = 1645/1000 overestimates zeta_S(2) <= zeta(2) = pi^2/6, which
/// bounds the product of the remaining masses (each < 1 + 1/p^2).
pub fn density_upper_bound(alpha: &RationalInput) -> Result<BigRational> {
    let zeta2_over = BigRational::new(BigInt::from(1645), BigInt::from(1000));
    let arch = if alpha.is_negative() {
        archimedean_mass(ArchimedeanClass::RealNegative)
    } else {
        archimedean_mass(ArchimedeanClass::RealPositive)
    };
    let dyadic = dyadic_mass(reduce_dyadic_class(alpha.value())?);
    let mut bound = BigRational::new(BigInt::one(), BigInt::from(2))
        * zeta2_over
        * arch.into_ratio()
        * dyadic.into_ratio();
    let gens = [alpha.clone()];
    for p in ExceptionalSet::of_generators(&gens).odd_primes() {
        bound *= subgroup_local_mass_odd(p, &gens)?.into_ratio();
    }
    Ok(bound)
}

/// The hardest unit kind among the generators at a non-exceptional odd
/// prime; None means every generator is a local fourth power (factor 1).
fn joint_unit_kind(generators: &[RationalInput], p: u64) -> Result<Option<UnitKind>> {
    let mut joint = None;
    for alpha in generators {
        let kind = alpha.unit_kind(p)?;
        joint = match (joint, kind) {
            (_, UnitKind::Nonsquare) => return Ok(Some(UnitKind::Nonsquare)),
            (None | Some(UnitKind::FourthPower), k) => Some(k),
            (Some(j), UnitKind::FourthPower) => Some(j),
            (Some(j), UnitKind::SquareNotFourth) => Some(j.max_hardness(UnitKind::SquareNotFourth)),
        };
    }
    Ok(match joint {
        Some(UnitKind::FourthPower) | None => None,
        other => other,
    })
}

impl UnitKind {
    fn max_hardness(self, other: UnitKind) -> UnitKind {
        use UnitKind::*;
        match (self, other) {
            (Nonsquare, _) | (_, Nonsquare) => Nonsquare,
            (SquareNotFourth, _) | (_, SquareNotFourth) => SquareNotFourth,
            _ => FourthPower,
        }
    }
}

/// Tail bracket [1 - 2/B, 1] for the proportion product.
fn tail_bracket_proportion(cutoff: u64) -> Interval {
    let lo = BigRational::new(BigInt::from(cutoff - 2), BigInt::from(cutoff));
    Interval::from_ratio_pair(&lo, &BigRational::one())
}

/// Tail bracket [1 - 2/B, B/(B-1)] for the absolute-density product.
fn tail_bracket_absolute(cutoff: u64) -> Interval {
    let lo = BigRational::new(BigInt::from(cutoff - 2), BigInt::from(cutoff));
    let hi = BigRational::new(BigInt::from(cutoff), BigInt::from(cutoff - 1));
    Interval::from_ratio_pair(&lo, &hi)
}

/// Product of positive rationals, kept unreduced and multiplied through a
/// balanced tree; insertion order fixes the tree, so results are
/// bit-reproducible.
struct RationalProduct {
    nums: Vec<BigUint>,
    dens: Vec<BigUint>,
}

impl RationalProduct {
    fn new() -> RationalProduct {
        RationalProduct {
            nums: Vec::new(),
            dens: Vec::new(),
        }
    }

    fn push(&mut self, factor: &BigRational) {
        if factor.is_one() {
            return;
        }
        self.nums.push(factor.numer().magnitude().clone());
        self.dens.push(factor.denom().magnitude().clone());
    }

    fn finish(self) -> BigRational {
        BigRational::new_raw(
            BigInt::from(product_tree(self.nums)),
            BigInt::from(product_tree(self.dens)),
        )
    }
}

fn product_tree(mut items: Vec<BigUint>) -> BigUint {
    if items.is_empty() {
        return BigUint::one();
    }
    while items.len() > 1 {
        items = items
            .chunks(2)
            .map(|pair| {
                if pair.len() == 2 {
                    &pair[0] * &pair[1]
                } else {
                    pair[0].clone()
                }
            })
            .collect();
    }
    items.pop().expect("nonempty")
}
