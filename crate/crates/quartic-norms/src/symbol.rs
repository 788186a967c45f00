//! Splitting symbols (f1^e1 ... fr^er) of quartic étale algebras.
//!
//! A symbol records the inertia degrees f and ramification indices e of the
//! components of an étale algebra, up to permutation. For degree 4 there are
//! exactly eleven symbols. Six of them force the norm group to be all of
//! k* (the "trivial" symbols); (1^2 1^2), (2^2) and (1^4) are overramified.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::class_group::ResidueSize;
use crate::Mass;

/// One component part: inertia degree `f` with ramification index `e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolPart {
    pub f: u8,
    pub e: u8,
}

/// A quartic splitting symbol in canonical form: parts sorted descending by
/// e, then f, so (2 1^2) and (1^2 2) compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SplittingSymbol {
    parts: Vec<SymbolPart>,
}

impl SplittingSymbol {
    /// Build a symbol from (f, e) pairs, canonicalising the order.
    ///
    /// Panics if the total degree sum(e*f) is not 4; the panic is tolerable
    /// because every construction site uses literal parts.
    pub fn new(parts: &[(u8, u8)]) -> Self {
        let degree: u32 = parts.iter().map(|&(f, e)| f as u32 * e as u32).sum();
        assert_eq!(degree, 4, "splitting symbol must have total degree 4");
        let mut parts: Vec<SymbolPart> = parts.iter().map(|&(f, e)| SymbolPart { f, e }).collect();
        parts.sort_by_key(|p| std::cmp::Reverse((p.e, p.f)));
        SplittingSymbol { parts }
    }

    pub fn parts(&self) -> &[SymbolPart] {
        &self.parts
    }

    /// The exponent of q in the tame discriminant: sum of f*(e-1).
    pub fn disc_exponent(&self) -> u32 {
        self.parts
            .iter()
            .map(|p| p.f as u32 * (p.e as u32 - 1))
            .sum()
    }

    /// #Aut(sigma) = (prod of f) * #(permutations fixing the part multiset).
    pub fn aut_count(&self) -> u64 {
        let f_product: u64 = self.parts.iter().map(|p| p.f as u64).product();
        let mut perms = 1u64;
        let mut i = 0;
        while i < self.parts.len() {
            let mut run = 1u64;
            while i + (run as usize) < self.parts.len()
                && self.parts[i + run as usize] == self.parts[i]
            {
                run += 1;
            }
            perms *= (1..=run).product::<u64>();
            i += run as usize;
        }
        f_product * perms
    }

    /// Pre-mass of the full symbol class: 1 / (q^disc_exponent * #Aut).
    pub fn pre_mass(&self, q: ResidueSize) -> Mass {
        let qq = BigInt::from(q.get());
        let den = qq.pow(self.disc_exponent()) * BigInt::from(self.aut_count());
        Mass::new(BigRational::new(BigInt::from(1), den)).expect("positive")
    }

    /// Trivial symbols have full norm group for every algebra.
    pub fn is_trivial(&self) -> bool {
        let key: Vec<(u8, u8)> = self.parts.iter().map(|p| (p.f, p.e)).collect();
        !(self.is_overramified() || key == [(2, 1), (2, 1)] || key == [(4, 1)])
    }

    /// Overramified: (1^2 1^2), (2^2), (1^4).
    pub fn is_overramified(&self) -> bool {
        let key: Vec<(u8, u8)> = self.parts.iter().map(|p| (p.f, p.e)).collect();
        key == [(1, 2), (1, 2)] || key == [(2, 2)] || key == [(1, 4)]
    }
}

impl fmt::Display for SplittingSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if p.e == 1 {
                write!(f, "{}", p.f)?;
            } else {
                write!(f, "{}^{}", p.f, p.e)?;
            }
        }
        write!(f, ")")
    }
}

/// Literal constructors for the eleven quartic symbols.
pub mod symbols {
    use super::SplittingSymbol;

    pub fn s1111() -> SplittingSymbol {
        SplittingSymbol::new(&[(1, 1), (1, 1), (1, 1), (1, 1)])
    }
    pub fn s112() -> SplittingSymbol {
        SplittingSymbol::new(&[(1, 1), (1, 1), (2, 1)])
    }
    pub fn s13() -> SplittingSymbol {
        SplittingSymbol::new(&[(1, 1), (3, 1)])
    }
    pub fn s22() -> SplittingSymbol {
        SplittingSymbol::new(&[(2, 1), (2, 1)])
    }
    pub fn s4() -> SplittingSymbol {
        SplittingSymbol::new(&[(4, 1)])
    }
    pub fn s1_2_11() -> SplittingSymbol {
        SplittingSymbol::new(&[(1, 2), (1, 1), (1, 1)])
    }
    pub fn s1_2_2() -> SplittingSymbol {
        SplittingSymbol::new(&[(1, 2), (2, 1)])
    }
    pub fn s1_2_1_2() -> SplittingSymbol {
        SplittingSymbol::new(&[(1, 2), (1, 2)])
    }
    pub fn s2_2() -> SplittingSymbol {
        SplittingSymbol::new(&[(2, 2)])
    }
    pub fn s1_3_1() -> SplittingSymbol {
        SplittingSymbol::new(&[(1, 3), (1, 1)])
    }
    pub fn s1_4() -> SplittingSymbol {
        SplittingSymbol::new(&[(1, 4)])
    }
}

/// The eleven canonical quartic symbols, in a fixed deterministic order:
/// unramified first, then by increasing discriminant exponent.
pub fn all_quartic_symbols() -> Vec<SplittingSymbol> {
    vec![
        symbols::s1111(),
        symbols::s112(),
        symbols::s13(),
        symbols::s22(),
        symbols::s4(),
        symbols::s1_2_11(),
        symbols::s1_2_2(),
        symbols::s1_2_1_2(),
        symbols::s2_2(),
        symbols::s1_3_1(),
        symbols::s1_4(),
    ]
}

/// The six trivial symbols, whose algebras always have full norm group.
pub fn trivial_symbols() -> Vec<SplittingSymbol> {
    all_quartic_symbols()
        .into_iter()
        .filter(|s| s.is_trivial())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn there_are_eleven_symbols() {
        let all = all_quartic_symbols();
        assert_eq!(all.len(), 11);
        let mut dedup = all.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 11);
    }

    #[test]
    fn permutation_identification() {
        // (2 1^2) = (1^2 2)
        assert_eq!(
            SplittingSymbol::new(&[(2, 1), (1, 2)]),
            SplittingSymbol::new(&[(1, 2), (2, 1)])
        );
        assert_eq!(
            SplittingSymbol::new(&[(1, 1), (2, 1), (1, 1)]),
            symbols::s112()
        );
    }

    #[test]
    fn trivial_subset() {
        let triv = trivial_symbols();
        assert_eq!(triv.len(), 6);
        for s in [
            symbols::s1111(),
            symbols::s112(),
            symbols::s13(),
            symbols::s1_2_11(),
            symbols::s1_3_1(),
            symbols::s1_2_2(),
        ] {
            assert!(triv.contains(&s), "{s} should be trivial");
        }
        assert!(!symbols::s22().is_trivial());
        assert!(!symbols::s4().is_trivial());
        assert!(!symbols::s1_4().is_trivial());
    }

    #[test]
    fn disc_exponents() {
        assert_eq!(symbols::s1111().disc_exponent(), 0);
        assert_eq!(symbols::s1_4().disc_exponent(), 3);
        assert_eq!(symbols::s2_2().disc_exponent(), 2);
        assert_eq!(symbols::s1_2_11().disc_exponent(), 1);
        assert_eq!(symbols::s1_3_1().disc_exponent(), 2);
    }

    #[test]
    fn aut_counts() {
        assert_eq!(symbols::s1111().aut_count(), 24);
        assert_eq!(symbols::s22().aut_count(), 8);
        assert_eq!(symbols::s112().aut_count(), 4);
        assert_eq!(symbols::s13().aut_count(), 3);
        assert_eq!(symbols::s4().aut_count(), 4);
        assert_eq!(symbols::s1_2_11().aut_count(), 2);
        assert_eq!(symbols::s1_2_2().aut_count(), 2);
        assert_eq!(symbols::s1_2_1_2().aut_count(), 2);
        assert_eq!(symbols::s2_2().aut_count(), 2);
        assert_eq!(symbols::s1_3_1().aut_count(), 1);
        assert_eq!(symbols::s1_4().aut_count(), 1);
    }

    #[test]
    fn pre_mass_table() {
        let q5 = ResidueSize::new(5).unwrap();
        assert_eq!(symbols::s13().pre_mass(q5).as_ratio(), &rat(1, 3));
        assert_eq!(symbols::s1_4().pre_mass(q5).as_ratio(), &rat(1, 125));
        assert_eq!(symbols::s1_2_1_2().pre_mass(q5).as_ratio(), &rat(1, 50));
        assert_eq!(symbols::s1111().pre_mass(q5).as_ratio(), &rat(1, 24));
    }

    #[test]
    fn pre_mass_sum_identity() {
        // sum over the 11 symbols = (q^3 + q^2 + 2q + 1) / q^3
        for q in (3u64..40).step_by(2) {
            let rs = ResidueSize::new(q).unwrap();
            let total: BigRational = all_quartic_symbols()
                .iter()
                .map(|s| s.pre_mass(rs).as_ratio().clone())
                .sum();
            let q = BigInt::from(q);
            let expect = BigRational::new(q.pow(3) + q.pow(2) + 2 * &q + 1, q.pow(3));
            assert_eq!(total, expect);
        }
    }

    #[test]
    fn trivial_pre_mass_identity() {
        // (5q^2 + 8q + 8) / (8q^2)
        for q in (3u64..40).step_by(2) {
            let rs = ResidueSize::new(q).unwrap();
            let total: BigRational = trivial_symbols()
                .iter()
                .map(|s| s.pre_mass(rs).as_ratio().clone())
                .sum();
            let q = BigInt::from(q);
            let expect = BigRational::new(5 * q.pow(2) + 8 * &q + 8, 8 * q.pow(2));
            assert_eq!(total, expect);
        }
    }
}
