//! Closed-form local masses.
//!
//! For odd residue size q, the mass of "alpha = u*pi^r is a norm" depends
//! only on r mod 4 and on the fourth-power status of the unit u; the two
//! tables below (q = 1 mod 4 and q = 3 mod 4) give the exact rationals.
//! At the place p = 2 of Q, the 32 masses for representatives 2^r*u of
//! Q_2*/Q_2*^4 ship as static data in `data/dyadic_masses.txt`; they are
//! ground truth and are never recomputed here. Archimedean masses take one
//! of three constant values.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::class_group::ResidueSize;
use crate::{Error, Mass, Result};

/// Fourth-power status of the unit part of alpha in the residue field.
///
/// For q = 3 mod 4 every square is a fourth power, so `FourthPower` is the
/// class of all squares and `SquareNotFourth` is empty (and rejected).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitKind {
    FourthPower,
    SquareNotFourth,
    Nonsquare,
}

impl UnitKind {
    /// Canonical discrete-log representative of the kind in Z/g.
    pub fn representative_class(self, q: ResidueSize) -> u8 {
        match (self, q.unit_quotient_order()) {
            (UnitKind::FourthPower, _) => 0,
            (UnitKind::SquareNotFourth, _) => 2,
            (UnitKind::Nonsquare, _) => 1,
        }
    }

    /// The kind of the discrete-log class c in Z/g.
    pub fn of_class(c: u8, q: ResidueSize) -> UnitKind {
        let g = q.unit_quotient_order();
        match c % g {
            0 => UnitKind::FourthPower,
            2 => UnitKind::SquareNotFourth,
            _ => UnitKind::Nonsquare,
        }
    }

    /// Display name; for q = 3 mod 4 the fourth-power class reads "square".
    pub fn label(self, q: ResidueSize) -> &'static str {
        match (self, q.get() % 4) {
            (UnitKind::FourthPower, 1) => "fourth-power",
            (UnitKind::FourthPower, _) => "square",
            (UnitKind::SquareNotFourth, _) => "square-not-fourth",
            (UnitKind::Nonsquare, _) => "nonsquare",
        }
    }
}

/// Lookup key for the odd-residue tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OddMassKey {
    pub q: ResidueSize,
    pub r_mod_4: u8,
    pub unit_kind: UnitKind,
}

/// Mass of a single norm condition at an odd place, from the closed-form
/// tables. Rejects the empty square-not-fourth class when q = 3 mod 4.
pub fn odd_mass(key: OddMassKey) -> Result<Mass> {
    let q = BigInt::from(key.q.get());
    let one_mod_4 = key.q.get() % 4 == 1;
    if !one_mod_4 && key.unit_kind == UnitKind::SquareNotFourth {
        return Err(Error::EmptyUnitClass);
    }
    let q2 = q.pow(2);
    let q3 = q.pow(3);
    let q4 = q.pow(4);
    let (numer, denom): (BigInt, BigInt) = match (one_mod_4, key.unit_kind, key.r_mod_4 % 4) {
        // q = 1 mod 4
        (true, UnitKind::FourthPower, 0) => (&q3 + &q2 + 2 * &q + 1, q4.clone()),
        (true, UnitKind::SquareNotFourth, 0) => (&q2 + &q + 2, q3.clone()),
        (true, UnitKind::Nonsquare, 0) => (4 * &q2 + 4 * &q + 5, 4 * &q3),
        (true, UnitKind::FourthPower | UnitKind::SquareNotFourth, 2) => {
            ((&q2 + &q + 2) * (3 * &q + 1), 4 * &q4)
        }
        (true, UnitKind::Nonsquare, 2) => (3 * &q2 + 4 * &q + 6, 4 * &q3),
        (true, _, _) => (5 * &q3 + 8 * &q2 + 11 * &q + 2, 8 * &q4),
        // q = 3 mod 4
        (false, UnitKind::FourthPower, 0) => (&q3 + &q2 + 2 * &q + 1, q4.clone()),
        (false, UnitKind::Nonsquare, 0) => (4 * &q2 + 4 * &q + 5, 4 * &q3),
        (false, UnitKind::FourthPower, 2) => (3 * &q3 + 4 * &q2 + 7 * &q + 4, 4 * &q4),
        (false, UnitKind::Nonsquare, 2) => (3 * &q2 + 4 * &q + 6, 4 * &q3),
        (false, _, _) => (5 * &q3 + 8 * &q2 + 11 * &q + 4, 8 * &q4),
    };
    Mass::new(BigRational::new(numer * (&q - 1), denom))
}

/// Mass of the trivial condition (alpha a fourth power) at residue size q:
/// (q^3 + q^2 + 2q + 1)(q - 1) / q^4. Valid at q = 2 as well, giving 17/16.
pub fn unconditional_mass(q: u64) -> Mass {
    let q = BigInt::from(q);
    let numer = (q.pow(3) + q.pow(2) + 2 * &q + 1) * (&q - 1);
    Mass::new(BigRational::new(numer, q.pow(4))).expect("positive")
}

/// Lookup key for the masses at p = 2: alpha = 2^r * u with u odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicMassKey {
    pub r_mod_4: u8,
    pub u_mod_16: u8,
}

impl fmt::Display for DyadicMassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(r={}, u={})", self.r_mod_4, self.u_mod_16)
    }
}

const DYADIC_DATA: &str = include_str!("../data/dyadic_masses.txt");

/// FNV-1a over the parsed entries; guards the static table against edits.
const DYADIC_CHECKSUM: u64 = 0x1d23_bd7f_7c8d_760f;

fn fnv1a(words: impl IntoIterator<Item = u64>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in words {
        for byte in w.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

fn parse_dyadic_table() -> Result<Vec<(u8, u8, u64, u64)>> {
    let mut entries = Vec::with_capacity(32);
    for line in DYADIC_DATA.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::TableData(format!("expected 4 fields: {line:?}")));
        }
        let r: u8 = fields[0]
            .parse()
            .map_err(|_| Error::TableData(format!("bad r: {line:?}")))?;
        let u: u8 = fields[1]
            .parse()
            .map_err(|_| Error::TableData(format!("bad u: {line:?}")))?;
        let num: u64 = fields[2]
            .parse()
            .map_err(|_| Error::TableData(format!("bad numerator: {line:?}")))?;
        let den: u64 = fields[3]
            .parse()
            .map_err(|_| Error::TableData(format!("bad denominator: {line:?}")))?;
        if r >= 4 || u.is_multiple_of(2) || u >= 16 || den == 0 {
            return Err(Error::TableData(format!("key out of range: {line:?}")));
        }
        entries.push((r, u, num, den));
    }
    if entries.len() != 32 {
        return Err(Error::TableData(format!(
            "expected 32 entries, found {}",
            entries.len()
        )));
    }
    let checksum = fnv1a(
        entries
            .iter()
            .flat_map(|&(r, u, n, d)| [r as u64, u as u64, n, d]),
    );
    if checksum != DYADIC_CHECKSUM {
        return Err(Error::TableData(format!(
            "checksum mismatch: {checksum:#018x}"
        )));
    }
    Ok(entries)
}

fn dyadic_table() -> &'static [(u8, u8, u64, u64)] {
    static TABLE: OnceLock<Vec<(u8, u8, u64, u64)>> = OnceLock::new();
    TABLE.get_or_init(|| parse_dyadic_table().expect("embedded table is valid"))
}

/// All 32 dyadic table entries in (r, u) order.
pub fn dyadic_table_entries() -> Vec<(DyadicMassKey, Mass)> {
    dyadic_table()
        .iter()
        .map(|&(r, u, n, d)| {
            (
                DyadicMassKey {
                    r_mod_4: r,
                    u_mod_16: u,
                },
                Mass::new(BigRational::new(BigInt::from(n), BigInt::from(d))).expect("positive"),
            )
        })
        .collect()
}

/// Mass of a single norm condition at p = 2, from the static table.
pub fn dyadic_mass(key: DyadicMassKey) -> Mass {
    let r = key.r_mod_4 % 4;
    let u = key.u_mod_16 % 16;
    let (_, _, n, d) = *dyadic_table()
        .iter()
        .find(|&&(tr, tu, _, _)| tr == r && tu == u)
        .unwrap_or_else(|| panic!("no dyadic entry for r={r}, u={u}; u must be odd"));
    Mass::new(BigRational::new(BigInt::from(n), BigInt::from(d))).expect("positive")
}

/// The class of a nonzero rational in Q_2*/Q_2*^4, as a table key.
///
/// Units congruent to 1 mod 16 are fourth powers in Q_2, so the odd part
/// mod 16 (negative values folded in) determines the class.
pub fn reduce_dyadic_class(alpha: &BigRational) -> Result<DyadicMassKey> {
    if alpha.is_zero() {
        return Err(Error::ZeroInput);
    }
    let numer = alpha.numer().magnitude();
    let denom = alpha.denom().magnitude();
    let vn = numer.trailing_zeros().expect("nonzero");
    let vd = denom.trailing_zeros().expect("nonzero");
    let r = (vn as i64 - vd as i64).rem_euclid(4) as u8;
    let n16 = ((numer >> vn) % BigUint::from(16u32)).to_u64_digits();
    let d16 = ((denom >> vd) % BigUint::from(16u32)).to_u64_digits();
    let n16 = n16.first().copied().unwrap_or(0);
    let d16 = d16.first().copied().unwrap_or(0);
    let d_inv = (1..16).find(|k| (d16 * k) % 16 == 1).expect("odd unit");
    let mut u = (n16 * d_inv) % 16;
    if alpha.is_negative() {
        u = (u * 15) % 16;
    }
    Ok(DyadicMassKey {
        r_mod_4: r,
        u_mod_16: u as u8,
    })
}

/// Archimedean places of Q (or any number field) seen by a norm condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchimedeanClass {
    /// Real embedding with f(alpha) > 0.
    RealPositive,
    /// Real embedding with f(alpha) < 0.
    RealNegative,
    /// Complex place; every alpha is a norm.
    Complex,
}

/// Archimedean mass: 5/12, 7/24 or 1/24.
pub fn archimedean_mass(class: ArchimedeanClass) -> Mass {
    let (n, d) = match class {
        ArchimedeanClass::RealPositive => (5, 12),
        ArchimedeanClass::RealNegative => (7, 24),
        ArchimedeanClass::Complex => (1, 24),
    };
    Mass::new(BigRational::new(BigInt::from(n), BigInt::from(d))).expect("positive")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn rs(q: u64) -> ResidueSize {
        ResidueSize::new(q).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn key(q: u64, r: u8, kind: UnitKind) -> OddMassKey {
        OddMassKey {
            q: rs(q),
            r_mod_4: r,
            unit_kind: kind,
        }
    }

    #[test]
    fn odd_mass_spot_values() {
        assert_eq!(
            odd_mass(key(5, 0, UnitKind::FourthPower))
                .unwrap()
                .as_ratio(),
            &rat(644, 625)
        );
        // q=3, nonsquare, r=0: (4*9+12+5)*2 / (4*27) = 53/54
        assert_eq!(
            odd_mass(key(3, 0, UnitKind::Nonsquare)).unwrap().as_ratio(),
            &rat(53, 54)
        );
        // q=7, square, r=1: (5*343+8*49+77+4)*6 / (8*2401) = 1641/2401
        assert_eq!(
            odd_mass(key(7, 1, UnitKind::FourthPower))
                .unwrap()
                .as_ratio(),
            &rat(1641, 2401)
        );
        assert_eq!(
            odd_mass(key(5, 0, UnitKind::Nonsquare)).unwrap().as_ratio(),
            &rat(1, 1)
        );
    }

    #[test]
    fn odd_mass_rejects_empty_class() {
        assert!(odd_mass(key(7, 0, UnitKind::SquareNotFourth)).is_err());
        assert!(odd_mass(key(7, 0, UnitKind::FourthPower)).is_ok());
    }

    #[test]
    fn columns_one_and_three_agree() {
        for q in [3u64, 5, 7, 13, 17, 31] {
            for kind in [
                UnitKind::FourthPower,
                UnitKind::SquareNotFourth,
                UnitKind::Nonsquare,
            ] {
                if q % 4 == 3 && kind == UnitKind::SquareNotFourth {
                    continue;
                }
                assert_eq!(
                    odd_mass(key(q, 1, kind)).unwrap(),
                    odd_mass(key(q, 3, kind)).unwrap()
                );
            }
        }
    }

    #[test]
    fn valuation_zero_masses_below_inverse_square_bound() {
        // every mass with 4 | r is < 1 + 1/q^2
        for q in (3u64..60).step_by(2).filter(|&q| crate::arith::is_prime(q)) {
            let bound = rat(1, 1) + BigRational::new(BigInt::one(), BigInt::from(q * q));
            for kind in [
                UnitKind::FourthPower,
                UnitKind::SquareNotFourth,
                UnitKind::Nonsquare,
            ] {
                if q % 4 == 3 && kind == UnitKind::SquareNotFourth {
                    continue;
                }
                let m = odd_mass(key(q, 0, kind)).unwrap();
                assert!(m.as_ratio() < &bound, "q={q} {kind:?}");
            }
        }
    }

    #[test]
    fn dyadic_pinned_values() {
        let m = |r, u| {
            dyadic_mass(DyadicMassKey {
                r_mod_4: r,
                u_mod_16: u,
            })
        };
        assert_eq!(m(0, 1).as_ratio(), &rat(17, 16));
        assert_eq!(m(1, 1).as_ratio(), &rat(6523, 8192));
        assert_eq!(m(2, 7).as_ratio(), &rat(3679, 4096));
        assert_eq!(m(0, 9).as_ratio(), &rat(2175, 2048));
        assert_eq!(m(3, 15).as_ratio(), &rat(6523, 8192));
    }

    #[test]
    fn dyadic_table_shape() {
        let entries = dyadic_table_entries();
        assert_eq!(entries.len(), 32);
        // columns r=1 and r=3 are constant 6523/8192
        for (k, m) in &entries {
            if k.r_mod_4 % 2 == 1 {
                assert_eq!(m.as_ratio(), &rat(6523, 8192));
            }
        }
    }

    #[test]
    fn unconditional_mass_extends_to_two() {
        assert_eq!(unconditional_mass(2).as_ratio(), &rat(17, 16));
        assert_eq!(
            unconditional_mass(5).as_ratio(),
            odd_mass(key(5, 0, UnitKind::FourthPower))
                .unwrap()
                .as_ratio()
        );
    }

    #[test]
    fn reduce_dyadic_classes() {
        let red = |n: i64, d: i64| reduce_dyadic_class(&rat(n, d)).unwrap();
        assert_eq!(
            red(2, 1),
            DyadicMassKey {
                r_mod_4: 1,
                u_mod_16: 1
            }
        );
        assert_eq!(
            red(48, 1),
            DyadicMassKey {
                r_mod_4: 0,
                u_mod_16: 3
            }
        );
        assert_eq!(
            red(-1, 1),
            DyadicMassKey {
                r_mod_4: 0,
                u_mod_16: 15
            }
        );
        assert_eq!(
            red(1, 2),
            DyadicMassKey {
                r_mod_4: 3,
                u_mod_16: 1
            }
        );
        assert_eq!(
            red(3, 5),
            DyadicMassKey {
                r_mod_4: 0,
                u_mod_16: 7
            }
        );
        assert!(reduce_dyadic_class(&rat(0, 1)).is_err());
    }

    #[test]
    fn archimedean_values() {
        assert_eq!(
            archimedean_mass(ArchimedeanClass::RealPositive).as_ratio(),
            &rat(5, 12)
        );
        assert_eq!(
            archimedean_mass(ArchimedeanClass::RealNegative).as_ratio(),
            &rat(7, 24)
        );
        assert_eq!(
            archimedean_mass(ArchimedeanClass::Complex).as_ratio(),
            &rat(1, 24)
        );
    }
}
