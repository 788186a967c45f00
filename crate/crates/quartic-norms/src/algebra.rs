//! Enumeration of quartic étale algebras over a local field with odd
//! residue size q, their norm groups, and mass computation by direct
//! summation. This is the brute-force oracle against which the closed-form
//! tables are checked.
//!
//! Tame extensions of the base field are classified by (e, f, j): the
//! unramified extension of degree f, extended by an e-th root of
//! zeta_{q^f - 1}^j * pi. For quartic algebras the component shapes are
//! (1, f), (e, 1) and (2, 2), and j runs over gcd(e, q^f - 1) values
//! (the Frobenius identification j ~ qj is trivial for all these shapes).

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::class_group::{ClassGroupElement, NormGroup, ResidueSize};
use crate::symbol::{all_quartic_symbols, SplittingSymbol};
use crate::{Error, Mass, Result};

/// One component field of an étale algebra: ramification index `e`,
/// inertia degree `f`, and the root-of-unity twist `j` of its uniformiser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Component {
    pub e: u8,
    pub f: u8,
    pub j: u8,
}

impl Component {
    /// Number of isomorphism classes with this (e, f) shape over the base.
    fn class_count(e: u8, f: u8, q: ResidueSize) -> u8 {
        match (e, f) {
            (1, _) => 1,
            (_, 1) => gcd(e as u64, q.get() - 1) as u8,
            (2, 2) => 2, // gcd(2, q^2 - 1) with q odd
            _ => unreachable!("no other shapes occur in degree <= 4"),
        }
    }

    /// Automorphism count of the component field over the base.
    ///
    /// Unramified extensions are cyclic of degree f. A totally ramified tame
    /// extension of degree e has one automorphism per e-th root of unity in
    /// the residue field. The mixed shape (2,2) is abelian of degree 4.
    fn aut_count(self, q: ResidueSize) -> u64 {
        match (self.e, self.f) {
            (1, f) => f as u64,
            (e, 1) => gcd(e as u64, q.get() - 1),
            (2, 2) => 4,
            _ => unreachable!(),
        }
    }

    /// Image of the component's norm group in G_q = Z/4 x Z/g.
    ///
    /// Unramified degree f: all units are norms, and the uniformiser's norm
    /// has valuation f, giving <(0,1), (f,0)>.
    ///
    /// Totally ramified degree e with twist j: unit norms are e-th powers of
    /// Teichmüller representatives (1-units are norms and die in G_q), and
    /// the root x of X^e - zeta^j pi has norm (-1)^(e+1) zeta^j pi, giving
    /// <(0, e), (1, j + [e even]*(q-1)/2)>.
    ///
    /// Shape (2,2): unit norms are squares and zeta^j pi^2 is a norm,
    /// giving <(0, 2), (2, j)>.
    fn norm_group(self, q: ResidueSize) -> NormGroup {
        let g = q.unit_quotient_order();
        let gens = match (self.e, self.f) {
            (1, f) => vec![
                ClassGroupElement { v: 0, c: 1 },
                ClassGroupElement { v: f % 4, c: 0 },
            ],
            (e, 1) => {
                let minus = if e % 2 == 0 { q.dlog_minus_one() } else { 0 };
                vec![
                    ClassGroupElement { v: 0, c: e % g },
                    ClassGroupElement {
                        v: 1,
                        c: (self.j + minus) % g,
                    },
                ]
            }
            (2, 2) => vec![
                ClassGroupElement { v: 0, c: 2 % g },
                ClassGroupElement {
                    v: 2,
                    c: self.j % g,
                },
            ],
            _ => unreachable!(),
        };
        NormGroup::generated_by(q, &gens).expect("component generators in range")
    }
}

/// A quartic étale algebra over the local field with residue size q,
/// as an unordered product of component fields.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TameEtaleAlgebra {
    q: ResidueSize,
    components: Vec<Component>,
}

impl TameEtaleAlgebra {
    pub fn residue_size(&self) -> ResidueSize {
        self.q
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn symbol(&self) -> SplittingSymbol {
        let parts: Vec<(u8, u8)> = self.components.iter().map(|c| (c.f, c.e)).collect();
        SplittingSymbol::new(&parts)
    }

    /// Exponent of q in the discriminant: sum of f*(e-1) over components.
    pub fn disc_exponent(&self) -> u32 {
        self.components
            .iter()
            .map(|c| c.f as u32 * (c.e as u32 - 1))
            .sum()
    }

    /// #Aut over the base: product of component automorphism counts times
    /// the permutations of identical components.
    pub fn aut_count(&self) -> u64 {
        let mut aut: u64 = self
            .components
            .iter()
            .map(|c| c.aut_count(self.q))
            .product();
        let mut i = 0;
        while i < self.components.len() {
            let mut run = 1u64;
            while i + (run as usize) < self.components.len()
                && self.components[i + run as usize] == self.components[i]
            {
                run += 1;
            }
            aut *= (1..=run).product::<u64>();
            i += run as usize;
        }
        aut
    }

    /// Norm group of the product algebra: the join of component norm groups.
    pub fn norm_group(&self) -> NormGroup {
        let mut group = NormGroup::trivial(self.q);
        for c in &self.components {
            group = group.join(&c.norm_group(self.q));
        }
        group
    }

    /// This algebra's summand in a pre-mass: 1 / (q^disc * #Aut).
    pub fn pre_mass(&self) -> Mass {
        let q = BigInt::from(self.q.get());
        let den = q.pow(self.disc_exponent()) * BigInt::from(self.aut_count());
        Mass::new(BigRational::new(BigInt::from(1), den)).expect("positive")
    }
}

/// All isomorphism classes of quartic étale algebras with the given symbol,
/// duplicate-free and in a deterministic order.
pub fn enumerate_tame_algebras(q: ResidueSize, symbol: &SplittingSymbol) -> Vec<TameEtaleAlgebra> {
    // group the symbol's parts by shape, with multiplicity
    let mut shapes: Vec<((u8, u8), u8)> = Vec::new();
    for p in symbol.parts() {
        match shapes.iter_mut().find(|(s, _)| *s == (p.e, p.f)) {
            Some((_, m)) => *m += 1,
            None => shapes.push(((p.e, p.f), 1)),
        }
    }

    // for each shape, the multisets of j-values of the given multiplicity
    let mut per_shape: Vec<Vec<Vec<Component>>> = Vec::new();
    for &((e, f), mult) in &shapes {
        let n = Component::class_count(e, f, q);
        per_shape.push(
            multisets(n, mult)
                .into_iter()
                .map(|js| js.into_iter().map(|j| Component { e, f, j }).collect())
                .collect(),
        );
    }

    // cartesian product across shapes
    let mut algebras = vec![Vec::new()];
    for options in per_shape {
        let mut next = Vec::with_capacity(algebras.len() * options.len());
        for base in &algebras {
            for opt in &options {
                let mut comps: Vec<Component> = base.clone();
                comps.extend_from_slice(opt);
                next.push(comps);
            }
        }
        algebras = next;
    }

    algebras
        .into_iter()
        .map(|mut components| {
            // unordered products are identified by sorted component keys:
            // descending (e, f) to match symbol order, ascending j within
            components.sort_by(|a, b| (b.e, b.f).cmp(&(a.e, a.f)).then(a.j.cmp(&b.j)));
            TameEtaleAlgebra { q, components }
        })
        .collect()
}

/// All quartic étale algebras over the field, across the eleven symbols.
pub fn all_tame_algebras(q: ResidueSize) -> Vec<TameEtaleAlgebra> {
    all_quartic_symbols()
        .iter()
        .flat_map(|s| enumerate_tame_algebras(q, s))
        .collect()
}

/// Mass of the set of algebras whose norm group contains every given class,
/// computed by direct enumeration:
///
///   (q-1)/q * sum over qualifying L of 1 / (q^disc(L) * #Aut(L)).
///
/// The subgroup generated by `classes` is the set of norm conditions; the
/// empty subgroup is passed as [(0, 0)].
pub fn oracle_local_mass(q: ResidueSize, classes: &[ClassGroupElement]) -> Result<Mass> {
    if classes.is_empty() {
        return Err(Error::EmptyClassList);
    }
    let g = q.unit_quotient_order();
    for x in classes {
        if x.v >= 4 || x.c >= g {
            return Err(Error::ClassOutOfRange { v: x.v, c: x.c, g });
        }
    }
    let mut pre = BigRational::new(BigInt::from(0), BigInt::from(1));
    for algebra in all_tame_algebras(q) {
        if algebra.norm_group().contains_all(classes) {
            pre += algebra.pre_mass().as_ratio();
        }
    }
    let qi = BigInt::from(q.get());
    let finite_factor = BigRational::new(&qi - 1, qi);
    Mass::new(finite_factor * pre)
}

fn gcd(a: u64, b: u64) -> u64 {
    crate::arith::gcd_u64(a, b)
}

/// Multisets of `mult` values drawn from 0..n, each as a sorted vector.
fn multisets(n: u8, mult: u8) -> Vec<Vec<u8>> {
    fn rec(n: u8, mult: u8, start: u8, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if mult == 0 {
            out.push(prefix.clone());
            return;
        }
        for j in start..n {
            prefix.push(j);
            rec(n, mult - 1, j, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, mult, 0, &mut Vec::new(), &mut out);
    out
}
