//! Exact local masses of quartic étale algebras with prescribed norms, and
//! the density of S4-quartic extensions of Q whose norm groups contain a
//! given element or finitely generated subgroup.
//!
//! The library has two independent routes to every tame local mass:
//!
//! * closed-form tables ([`tables`]), keyed by the valuation of alpha mod 4
//!   and the fourth-power status of its unit part; and
//! * a brute-force oracle ([`algebra`]) that enumerates all quartic étale
//!   algebras over the local field, computes each norm group inside the
//!   finite quotient k*/k*^4, and sums discriminant- and automorphism-
//!   weighted counts directly.
//!
//! The two routes agree as exact rationals; `verify` in the CLI and the
//! acceptance test suite sweep this agreement over all odd primes up to a
//! bound. On top of the local layer, [`density`] assembles Euler products
//! over all places of Q with rigorous tail bounds.
//!
//! ```
//! use quartic_norms::{
//!     oracle_local_mass, odd_mass, ClassGroupElement, OddMassKey, ResidueSize, UnitKind,
//! };
//!
//! // mass of "fourth powers are norms" at residue size 5, both ways
//! let q = ResidueSize::new(5)?;
//! let table = odd_mass(OddMassKey { q, r_mod_4: 0, unit_kind: UnitKind::FourthPower })?;
//! let oracle = oracle_local_mass(q, &[ClassGroupElement { v: 0, c: 0 }])?;
//! assert_eq!(table.as_ratio(), oracle.as_ratio());
//! assert_eq!(table.to_string(), "644/625");
//! # Ok::<(), quartic_norms::Error>(())
//! ```

pub mod algebra;
pub mod arith;
pub mod class_group;
pub mod density;
pub mod interval;
pub mod localize;
pub mod sieve;
pub mod symbol;
pub mod tables;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error as ThisError;

pub use algebra::{enumerate_tame_algebras, oracle_local_mass, TameEtaleAlgebra};
pub use class_group::{ClassGroupElement, NormGroup, ResidueSize};
pub use density::{DensityEstimate, MassInterval};
pub use localize::{ExceptionalSet, RationalInput};
pub use symbol::{all_quartic_symbols, trivial_symbols, SplittingSymbol};
pub use tables::{archimedean_mass, dyadic_mass, odd_mass, DyadicMassKey, OddMassKey, UnitKind};

/// A discriminant- and automorphism-weighted count of étale algebras.
/// Always an exact nonnegative rational; denominators are never approximated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Mass(BigRational);

impl Mass {
    pub fn new(value: BigRational) -> Result<Self> {
        if value < BigRational::zero() {
            return Err(Error::NegativeMass);
        }
        Ok(Mass(value))
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        crate::interval::ratio_to_f64(&self.0)
    }
}

impl std::fmt::Display for Mass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("residue size must be an odd integer >= 3, got {0}")]
    InvalidResidueSize(u64),
    #[error("class ({v}, {c}) out of range for Z/4 x Z/{g}")]
    ClassOutOfRange { v: u8, c: u8, g: u8 },
    #[error("class list must be nonempty; pass [(0, 0)] for the trivial subgroup")]
    EmptyClassList,
    #[error("mass must be nonnegative")]
    NegativeMass,
    #[error("mass interval must satisfy 11/16 <= lower <= upper")]
    InvalidInterval,
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("place p = 2 is not odd; use the dyadic table instead")]
    EvenPrime,
    #[error("square-not-fourth unit class is empty when q = 3 mod 4")]
    EmptyUnitClass,
    #[error("numerator or denominator exceeds the {limit}-bit input bound")]
    InputTooLarge { limit: u32 },
    #[error("could not certify a prime factorisation of {0}; input out of scope")]
    FactorOutOfScope(String),
    #[error("Euler product cutoff must be at least 100, got {0}")]
    CutoffTooSmall(u64),
    #[error("invalid table data: {0}")]
    TableData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
