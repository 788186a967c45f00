//! The finite group G_q = k*/k*^4 for a local field with odd residue size q.
//!
//! For odd q, every 1-unit is a fourth power (Hensel on x^4 - a, derivative
//! 4a a unit), so k*/k*^4 is generated by a uniformiser pi and a Teichmüller
//! generator zeta of the residue units. Writing g = gcd(4, q-1), this gives
//!
//! ```text
//! G_q  ~=  Z/4 x Z/g,    u * pi^r  |->  (r mod 4, dlog_zeta(u) mod g)
//! ```
//!
//! Quartic norm groups always contain k*^4 (their quotient is abelian of
//! order dividing 4), so membership of alpha in a norm group is decided
//! entirely inside G_q. Subgroups have at most 16 elements and are kept
//! fully materialised as bitmasks.

use std::fmt;

use crate::{Error, Result};

/// Residue field size of a local field: an odd integer >= 3.
///
/// Only odd prime powers are mathematically meaningful; the formulas depend
/// on q and q mod 4 alone, so any odd integer is accepted here and the CLI
/// restricts to primes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueSize(u64);

impl ResidueSize {
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 || q.is_multiple_of(2) {
            return Err(Error::InvalidResidueSize(q));
        }
        Ok(ResidueSize(q))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// g = gcd(4, q-1), i.e. 4 when q = 1 mod 4 and 2 when q = 3 mod 4.
    #[inline]
    pub fn unit_quotient_order(self) -> u8 {
        if self.0 % 4 == 1 {
            4
        } else {
            2
        }
    }

    /// Discrete log of -1 = zeta^((q-1)/2), reduced mod g.
    #[inline]
    pub fn dlog_minus_one(self) -> u8 {
        (((self.0 - 1) / 2) % self.unit_quotient_order() as u64) as u8
    }
}

impl fmt::Display for ResidueSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The class of alpha = u * pi^r in G_q: valuation mod 4 and the discrete
/// log of the unit part mod g, under the convention zeta |-> 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassGroupElement {
    pub v: u8,
    pub c: u8,
}

impl ClassGroupElement {
    pub const IDENTITY: ClassGroupElement = ClassGroupElement { v: 0, c: 0 };

    /// Reduce arbitrary integers into the canonical range for this group.
    pub fn reduce(v: i64, c: i64, q: ResidueSize) -> Self {
        let g = q.unit_quotient_order() as i64;
        ClassGroupElement {
            v: v.rem_euclid(4) as u8,
            c: c.rem_euclid(g) as u8,
        }
    }
}

impl fmt::Display for ClassGroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.v, self.c)
    }
}

/// A subgroup of G_q, materialised as a bitmask over the 4g elements.
///
/// Bit v*g + c stands for the element (v, c).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormGroup {
    q: ResidueSize,
    generators: Vec<ClassGroupElement>,
    mask: u16,
}

impl NormGroup {
    /// Subgroup generated by the given elements.
    pub fn generated_by(q: ResidueSize, generators: &[ClassGroupElement]) -> Result<Self> {
        let g = q.unit_quotient_order();
        for x in generators {
            if x.v >= 4 || x.c >= g {
                return Err(Error::ClassOutOfRange { v: x.v, c: x.c, g });
            }
        }
        let mut mask: u16 = 1; // identity bit (0, 0)
                               // close under addition of generators; the group has <= 16 elements
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..4u8 {
                for c in 0..g {
                    if mask & (1 << (v * g + c)) == 0 {
                        continue;
                    }
                    for gen in generators {
                        let nv = (v + gen.v) % 4;
                        let nc = (c + gen.c) % g;
                        let bit = 1u16 << (nv * g + nc);
                        if mask & bit == 0 {
                            mask |= bit;
                            changed = true;
                        }
                    }
                }
            }
        }
        Ok(NormGroup {
            q,
            generators: generators.to_vec(),
            mask,
        })
    }

    /// The trivial subgroup {(0,0)}.
    pub fn trivial(q: ResidueSize) -> Self {
        NormGroup::generated_by(q, &[]).expect("trivial subgroup")
    }

    /// The full group Z/4 x Z/g.
    pub fn full(q: ResidueSize) -> Self {
        NormGroup::generated_by(
            q,
            &[
                ClassGroupElement { v: 1, c: 0 },
                ClassGroupElement { v: 0, c: 1 },
            ],
        )
        .expect("full group")
    }

    #[inline]
    pub fn residue_size(&self) -> ResidueSize {
        self.q
    }

    pub fn generators(&self) -> &[ClassGroupElement] {
        &self.generators
    }

    #[inline]
    pub fn contains(&self, x: ClassGroupElement) -> bool {
        let g = self.q.unit_quotient_order();
        x.v < 4 && x.c < g && self.mask & (1 << (x.v * g + x.c)) != 0
    }

    pub fn contains_all(&self, xs: &[ClassGroupElement]) -> bool {
        xs.iter().all(|&x| self.contains(x))
    }

    pub fn order(&self) -> u32 {
        self.mask.count_ones()
    }

    /// Index in Z/4 x Z/g; divides 4 for every quartic norm group.
    pub fn index(&self) -> u32 {
        4 * self.q.unit_quotient_order() as u32 / self.order()
    }

    pub fn is_full(&self) -> bool {
        self.order() == 4 * self.q.unit_quotient_order() as u32
    }

    /// Subgroup generated by the union of the two groups' generators.
    pub fn join(&self, other: &NormGroup) -> NormGroup {
        debug_assert_eq!(self.q, other.q);
        let mut gens = self.generators.clone();
        gens.extend_from_slice(&other.generators);
        NormGroup::generated_by(self.q, &gens).expect("generators already validated")
    }

    pub fn elements(&self) -> Vec<ClassGroupElement> {
        let g = self.q.unit_quotient_order();
        let mut out = Vec::with_capacity(self.order() as usize);
        for v in 0..4u8 {
            for c in 0..g {
                if self.mask & (1 << (v * g + c)) != 0 {
                    out.push(ClassGroupElement { v, c });
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: u64) -> ResidueSize {
        ResidueSize::new(n).unwrap()
    }

    #[test]
    fn residue_size_validation() {
        assert!(ResidueSize::new(2).is_err());
        assert!(ResidueSize::new(1).is_err());
        assert!(ResidueSize::new(4).is_err());
        assert_eq!(q(5).unit_quotient_order(), 4);
        assert_eq!(q(7).unit_quotient_order(), 2);
        // -1 = zeta^2 mod fourth powers at q=5, trivial at q=17 (8 = 0 mod 4)
        assert_eq!(q(5).dlog_minus_one(), 2);
        assert_eq!(q(17).dlog_minus_one(), 0);
        assert_eq!(q(7).dlog_minus_one(), 1);
    }

    #[test]
    fn subgroup_closure_and_membership() {
        let g22 = NormGroup::generated_by(
            q(5),
            &[
                ClassGroupElement { v: 0, c: 1 },
                ClassGroupElement { v: 2, c: 0 },
            ],
        )
        .unwrap();
        // units free, valuation even: order 8, index 2
        assert_eq!(g22.order(), 8);
        assert_eq!(g22.index(), 2);
        assert!(g22.contains(ClassGroupElement { v: 2, c: 3 }));
        assert!(!g22.contains(ClassGroupElement { v: 1, c: 0 }));

        let g4 = NormGroup::generated_by(q(5), &[ClassGroupElement { v: 0, c: 1 }]).unwrap();
        assert_eq!(g4.index(), 4);
        assert!(!g4.contains(ClassGroupElement { v: 2, c: 0 }));
    }

    #[test]
    fn join_of_ramified_quadratics_is_full() {
        // <(0,2),(1,h)> join <(0,2),(1,h+1)> = everything
        let h = q(5).dlog_minus_one();
        let a = NormGroup::generated_by(
            q(5),
            &[
                ClassGroupElement { v: 0, c: 2 },
                ClassGroupElement { v: 1, c: h },
            ],
        )
        .unwrap();
        let b = NormGroup::generated_by(
            q(5),
            &[
                ClassGroupElement { v: 0, c: 2 },
                ClassGroupElement {
                    v: 1,
                    c: (h + 1) % 4,
                },
            ],
        )
        .unwrap();
        assert_eq!(a.index(), 2);
        assert_eq!(b.index(), 2);
        assert!(a.join(&b).is_full());
    }

    #[test]
    fn reduce_handles_negative_valuations() {
        let x = ClassGroupElement::reduce(-1, -1, q(5));
        assert_eq!(x, ClassGroupElement { v: 3, c: 3 });
        let y = ClassGroupElement::reduce(-4, 6, q(7));
        assert_eq!(y, ClassGroupElement { v: 0, c: 0 });
    }
}
