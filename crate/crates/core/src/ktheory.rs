//! The Grothendieck group of the principal block in its Verma and simple
//! bases, the Weyl-group shadow of the braid action, and GK strata.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polyengine::MPoly;
use crate::rootsys::{LieType, RootDatum};
use crate::weylkl::{invert_unitriangular, simple_to_verma_matrix, KLTable, WeylGroup};
use crate::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Verma,
    Simple,
}

/// A class in K0, indexed by Weyl group elements (as indices into the
/// block's group). Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct K0Class {
    pub basis: Basis,
    coeffs: BTreeMap<usize, Q>,
}

impl K0Class {
    pub fn zero(basis: Basis) -> Self {
        K0Class {
            basis,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn basis_vector(basis: Basis, w: usize) -> Self {
        Self::from_terms(basis, [(w, Q::one())])
    }

    pub fn from_terms(basis: Basis, terms: impl IntoIterator<Item = (usize, Q)>) -> Self {
        let mut c = Self::zero(basis);
        for (w, x) in terms {
            c.add_term(w, x);
        }
        c
    }

    pub fn from_ints(basis: Basis, terms: &[(usize, i64)]) -> Self {
        Self::from_terms(basis, terms.iter().map(|&(w, x)| (w, Q::from_integer(x.into()))))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, w: usize) -> Q {
        self.coeffs.get(&w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Q)> {
        self.coeffs.iter().map(|(&w, x)| (w, x))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    fn add_term(&mut self, w: usize, x: Q) {
        if x.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(w).or_insert_with(Q::zero);
        *entry += x;
        if entry.is_zero() {
            self.coeffs.remove(&w);
        }
    }

    fn check_basis(&self, other: &K0Class) {
        assert_eq!(self.basis, other.basis, "adding classes in different bases");
    }

    pub fn add(&self, other: &K0Class) -> K0Class {
        self.check_basis(other);
        let mut out = self.clone();
        for (w, x) in other.terms() {
            out.add_term(w, x.clone());
        }
        out
    }

    pub fn sub(&self, other: &K0Class) -> K0Class {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> K0Class {
        K0Class::from_terms(self.basis, self.terms().map(|(w, x)| (w, x * c)))
    }

    pub fn neg(&self) -> K0Class {
        self.scale(&-Q::one())
    }

    /// Renders as e.g. `D(s2s1) - D(s1s2s1)`, in index order.
    pub fn render(&self, group: &WeylGroup) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let tag = match self.basis {
            Basis::Verma => "D",
            Basis::Simple => "L",
        };
        let mut out = String::new();
        for (k, (w, x)) in self.terms().enumerate() {
            let neg = x < &Q::zero();
            let abs = if neg { -x } else { x.clone() };
            match (k, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if !abs.is_one() {
                out.push_str(&format!("{abs}*"));
            }
            out.push_str(&format!("{tag}({})", group.name(w)));
        }
        out
    }
}

/// GK dimension of each simple, and the simples grouped by GK dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GKStratification {
    pub gk_of_simple: Vec<usize>,
    pub strata: BTreeMap<usize, BTreeSet<usize>>,
}

impl GKStratification {
    pub fn from_gk(gk_of_simple: Vec<usize>) -> Self {
        let mut strata: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (w, &d) in gk_of_simple.iter().enumerate() {
            strata.entry(d).or_default().insert(w);
        }
        GKStratification { gk_of_simple, strata }
    }

    pub fn stratum(&self, d: usize) -> Vec<usize> {
        self.strata
            .get(&d)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default()
    }

    /// Nonempty strata, in increasing order.
    pub fn dims(&self) -> Vec<usize> {
        self.strata.keys().copied().collect()
    }
}

/// Everything computed once per Lie type: root datum, Weyl group, KL table,
/// basis-change matrices and the GK stratification.
#[derive(Debug)]
pub struct Block {
    pub rd: RootDatum,
    pub group: WeylGroup,
    pub kl: KLTable,
    simple_to_verma: Vec<Vec<i64>>,
    verma_to_simple: Vec<Vec<i64>>,
    /// Simple-root coordinates of `w(rho)`, one row per element.
    pub(crate) rho_orbit: Vec<Vec<Q>>,
    /// `ell_w(m) = <w(lambda + rho), rho_check>` as a linear polynomial in m.
    pub(crate) ell: Vec<MPoly>,
    pub(crate) ell_powers: Vec<OnceLock<Vec<MPoly>>>,
    /// Positive-degree invariant differential operators up to degree `|roots+|`.
    pub(crate) invariants: OnceLock<Vec<MPoly>>,
    strata: GKStratification,
}

impl Block {
    pub fn new(t: LieType) -> Result<Self> {
        let rd = RootDatum::new(t)?;
        let group = WeylGroup::new(&rd);
        let kl = KLTable::compute(&group);
        Self::assemble(rd, group, kl)
    }

    /// Builds a block from a previously computed KL table.
    pub fn with_kl(t: LieType, kl: KLTable) -> Result<Self> {
        let rd = RootDatum::new(t)?;
        let group = WeylGroup::new(&rd);
        if kl.lie_type != t {
            return Err(Error::IncompleteCache(t));
        }
        Self::assemble(rd, group, kl)
    }

    fn assemble(rd: RootDatum, group: WeylGroup, kl: KLTable) -> Result<Self> {
        let simple_to_verma = simple_to_verma_matrix(&group, &kl)?;
        let verma_to_simple = invert_unitriangular(&simple_to_verma);
        let rho_orbit = (0..group.order())
            .map(|w| rd.act(group.elem(w), &rd.rho).alpha)
            .collect();
        let ell = crate::charge::ell_forms(&rd, &group);
        let ell_powers = (0..=rd.n_pos).map(|_| OnceLock::new()).collect();
        let mut block = Block {
            rd,
            group,
            kl,
            simple_to_verma,
            verma_to_simple,
            rho_orbit,
            ell,
            ell_powers,
            invariants: OnceLock::new(),
            strata: GKStratification::from_gk(Vec::new()),
        };
        block.strata = gk_stratify(&block);
        Ok(block)
    }

    pub fn lie_type(&self) -> LieType {
        self.rd.lie_type
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn rank(&self) -> usize {
        self.rd.rank()
    }

    pub fn n_pos(&self) -> usize {
        self.rd.n_pos
    }

    pub fn strata(&self) -> &GKStratification {
        &self.strata
    }

    pub fn gk_of_simple(&self, w: usize) -> usize {
        self.strata.gk_of_simple[w]
    }

    pub fn simple_to_verma(&self) -> &[Vec<i64>] {
        &self.simple_to_verma
    }

    pub fn verma_to_simple(&self) -> &[Vec<i64>] {
        &self.verma_to_simple
    }

    pub fn name(&self, w: usize) -> String {
        self.group.name(w)
    }

    /// `ell_w^k` for every `w`, computed once per exponent.
    pub(crate) fn ell_powers(&self, k: usize) -> &[MPoly] {
        self.ell_powers[k].get_or_init(|| self.ell.iter().map(|l| l.pow(k as u32)).collect())
    }
}

/// `[L(w.0)]` in the Verma basis.
pub fn class_of_simple(block: &Block, w: usize) -> K0Class {
    let row = &block.simple_to_verma[w];
    K0Class::from_terms(
        Basis::Verma,
        row.iter().enumerate().map(|(y, &a)| (y, Q::from_integer(a.into()))),
    )
}

/// Whether `w` is the minimal-length representative of its coset `W_I w`.
pub fn is_minimal_coset_rep(group: &WeylGroup, subset: &[usize], w: usize) -> bool {
    subset.iter().all(|&i| !group.is_left_descent(w, i))
}

/// `[Delta_I(w.0)] = sum_{y in W_I} (-1)^{l(y)} [Delta(y w . 0)]`.
pub fn class_of_parabolic_verma(block: &Block, subset: &[usize], w: usize) -> Result<K0Class> {
    let group = &block.group;
    if let Some(&bad) = subset.iter().find(|&&i| i >= block.rank()) {
        return Err(Error::DimensionMismatch {
            expected: block.rank(),
            got: bad + 1,
        });
    }
    if !is_minimal_coset_rep(group, subset, w) {
        return Err(Error::InvalidCosetRepresentative(group.name(w)));
    }
    Ok(K0Class::from_terms(
        Basis::Verma,
        group
            .parabolic_subgroup(subset)
            .into_iter()
            .map(|y| (group.multiply(y, w), Q::from_integer(group.sign(y).into()))),
    ))
}

pub fn change_basis(block: &Block, c: &K0Class, target: Basis) -> K0Class {
    if c.basis == target {
        return c.clone();
    }
    let matrix = match c.basis {
        Basis::Simple => &block.simple_to_verma,
        Basis::Verma => &block.verma_to_simple,
    };
    let mut out = K0Class::zero(target);
    for (w, x) in c.terms() {
        for (y, &a) in matrix[w].iter().enumerate() {
            if a != 0 {
                out.add_term(y, x * Q::from_integer(a.into()));
            }
        }
    }
    out
}

/// The K0 shadow of the braid element with Weyl image `y`: `[Delta(w)] -> [Delta(w y)]`.
pub fn weyl_act_k0(block: &Block, y: usize, c: &K0Class) -> K0Class {
    let verma = change_basis(block, c, Basis::Verma);
    K0Class::from_terms(
        Basis::Verma,
        verma.terms().map(|(w, x)| (block.group.multiply(w, y), x.clone())),
    )
}

pub fn gk_stratify(block: &Block) -> GKStratification {
    let gk = (0..block.order())
        .map(|w| crate::charge::gk_dimension(block, &class_of_simple(block, w)).expect("simple classes are nonzero"))
        .collect();
    GKStratification::from_gk(gk)
}

/// Image in the stratum-`d` subquotient: the simple-basis coefficients of
/// GK dimension exactly `d`.
pub fn project_to_stratum(block: &Block, c: &K0Class, d: usize) -> Result<K0Class> {
    let simple = change_basis(block, c, Basis::Simple);
    if let Some(w) = simple.support().find(|&w| block.gk_of_simple(w) > d) {
        return Err(Error::StratumViolation {
            simple: block.name(w),
            gk: block.gk_of_simple(w),
            d,
        });
    }
    Ok(K0Class::from_terms(
        Basis::Simple,
        simple
            .terms()
            .filter(|&(w, _)| block.gk_of_simple(w) == d)
            .map(|(w, x)| (w, x.clone())),
    ))
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Verma => "verma",
            Basis::Simple => "simple",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::sync::OnceLock as Lazy;

    fn a2() -> &'static Block {
        static B: Lazy<Block> = Lazy::new();
        B.get_or_init(|| Block::new("A2".parse().unwrap()).unwrap())
    }

    fn b2() -> &'static Block {
        static B: Lazy<Block> = Lazy::new();
        B.get_or_init(|| Block::new("B2".parse().unwrap()).unwrap())
    }

    fn idx(b: &Block, s: &str) -> usize {
        b.group.parse(s).unwrap()
    }

    fn cls(b: &Block, basis: Basis, terms: &[(&str, i64)]) -> K0Class {
        K0Class::from_terms(basis, terms.iter().map(|&(s, x)| (idx(b, s), crate::q(x, 1))))
    }

    #[test]
    fn simple_classes() {
        let b = a2();
        assert_eq!(
            class_of_simple(b, idx(b, "s1s2s1")),
            cls(b, Basis::Verma, &[("s1s2s1", 1)])
        );
        assert_eq!(
            class_of_simple(b, idx(b, "s2s1")),
            cls(b, Basis::Verma, &[("s2s1", 1), ("s1s2s1", -1)])
        );
        let a1 = Block::new("A1".parse().unwrap()).unwrap();
        assert_eq!(class_of_simple(&a1, 0), cls(&a1, Basis::Verma, &[("e", 1), ("s1", -1)]));
    }

    #[test]
    fn parabolic_vermas() {
        let b = a2();
        assert_eq!(
            class_of_parabolic_verma(b, &[0], idx(b, "s2")).unwrap(),
            cls(b, Basis::Verma, &[("s2", 1), ("s1s2", -1)])
        );
        for w in 0..b.order() {
            assert_eq!(
                class_of_parabolic_verma(b, &[], w).unwrap(),
                K0Class::basis_vector(Basis::Verma, w)
            );
        }
        let full = class_of_parabolic_verma(b, &[0, 1], 0).unwrap();
        for w in 0..b.order() {
            assert_eq!(full.coeff(w), crate::q(b.group.sign(w), 1));
        }
        assert!(matches!(
            class_of_parabolic_verma(b, &[0], idx(b, "s1")),
            Err(Error::InvalidCosetRepresentative(_))
        ));
        // Delta_{p1}(s2) = L(s2) + L(s2s1)
        let expected = class_of_simple(b, idx(b, "s2")).add(&class_of_simple(b, idx(b, "s2s1")));
        assert_eq!(class_of_parabolic_verma(b, &[0], idx(b, "s2")).unwrap(), expected);
    }

    #[test]
    fn basis_change_examples() {
        let b = a2();
        let l = cls(b, Basis::Verma, &[("s2s1", 1), ("s1s2s1", -1)]);
        assert_eq!(
            change_basis(b, &l, Basis::Simple),
            cls(b, Basis::Simple, &[("s2s1", 1)])
        );
        assert!(change_basis(b, &K0Class::zero(Basis::Verma), Basis::Simple).is_zero());
        let delta_e = change_basis(b, &K0Class::basis_vector(Basis::Verma, 0), Basis::Simple);
        for w in 0..6 {
            assert_eq!(delta_e.coeff(w), crate::q(1, 1));
        }
    }

    #[test]
    fn weyl_action_examples() {
        let b = a2();
        let s2 = idx(b, "s2");
        for w in 0..b.order() {
            let moved = weyl_act_k0(b, s2, &K0Class::basis_vector(Basis::Verma, w));
            assert_eq!(moved, K0Class::basis_vector(Basis::Verma, b.group.multiply(w, s2)));
        }
        let l = class_of_simple(b, idx(b, "s2s1"));
        assert_eq!(weyl_act_k0(b, 0, &l), l);
        assert_eq!(weyl_act_k0(b, s2, &l), l.neg());
        let moved = weyl_act_k0(b, s2, &class_of_simple(b, s2));
        assert_eq!(
            moved,
            cls(b, Basis::Verma, &[("e", 1), ("s1", -1), ("s1s2s1", -1), ("s2s1", 1)])
        );
        assert_eq!(
            change_basis(b, &moved, Basis::Simple),
            cls(b, Basis::Simple, &[("e", 1), ("s2", 1), ("s2s1", 1)])
        );
    }

    #[test]
    fn strata() {
        let b = a2();
        let s = b.strata();
        assert_eq!(s.stratum(0), vec![0]);
        assert!(s.stratum(1).is_empty());
        let two: BTreeSet<usize> = ["s1", "s2", "s1s2", "s2s1"].iter().map(|x| idx(b, x)).collect();
        assert_eq!(s.strata[&2], two);
        assert_eq!(s.stratum(3), vec![b.group.longest()]);
        let a1 = Block::new("A1".parse().unwrap()).unwrap();
        assert_eq!(a1.strata().gk_of_simple, vec![0, 1]);
        let b2 = b2();
        assert_eq!(b2.strata().gk_of_simple.len(), 8);
        assert_eq!(b2.gk_of_simple(0), 0);
        assert_eq!(b2.gk_of_simple(b2.group.longest()), 4);
    }

    #[test]
    fn projections() {
        let b = a2();
        let delta_e = K0Class::basis_vector(Basis::Verma, 0);
        let p = project_to_stratum(b, &change_basis(b, &delta_e, Basis::Simple), 2);
        assert!(matches!(p, Err(Error::StratumViolation { gk: 3, .. })));
        let four = cls(
            b,
            Basis::Simple,
            &[("s1", 1), ("s2", 1), ("s1s2", 1), ("s2s1", 1), ("e", 1)],
        );
        assert_eq!(
            project_to_stratum(b, &four, 2).unwrap(),
            cls(b, Basis::Simple, &[("s1", 1), ("s2", 1), ("s1s2", 1), ("s2s1", 1)])
        );
        assert!(project_to_stratum(b, &cls(b, Basis::Simple, &[("e", 1)]), 2)
            .unwrap()
            .is_zero());
        let moved = weyl_act_k0(b, idx(b, "s2"), &class_of_simple(b, idx(b, "s2")));
        assert_eq!(
            project_to_stratum(b, &moved, 2).unwrap(),
            cls(b, Basis::Simple, &[("s2", 1), ("s2s1", 1)])
        );
    }

    fn shadow_lemmas(b: &Block) {
        let g = &b.group;
        for w in 0..b.order() {
            let l = class_of_simple(b, w);
            let d = b.gk_of_simple(w);
            for i in 0..b.rank() {
                let s = g.simple(i);
                let moved = weyl_act_k0(b, s, &l);
                let ws = g.multiply(w, s);
                if g.length(ws) > g.length(w) {
                    assert_eq!(moved, l.neg(), "{} under s{}", g.name(w), i + 1);
                } else {
                    let p = project_to_stratum(b, &moved, d).unwrap();
                    let rest = p.sub(&change_basis(b, &l, Basis::Simple));
                    for v in rest.support() {
                        assert!(g.length(g.multiply(v, s)) > g.length(v));
                    }
                }
            }
        }
    }

    #[test]
    fn shadow_lemmas_small_types() {
        shadow_lemmas(a2());
        shadow_lemmas(b2());
        shadow_lemmas(&Block::new("G2".parse().unwrap()).unwrap());
        shadow_lemmas(&Block::new("A3".parse().unwrap()).unwrap());
    }

    proptest! {
        #[test]
        fn action_is_a_group_action(y in 0usize..8, z in 0usize..8, w in 0usize..8, coeffs in prop::collection::vec(-3i64..4, 8)) {
            let b = b2();
            let c = K0Class::from_terms(Basis::Simple, coeffs.iter().enumerate().map(|(k, &x)| (k, crate::q(x, 1))));
            let lhs = weyl_act_k0(b, z, &weyl_act_k0(b, y, &c));
            prop_assert_eq!(lhs, weyl_act_k0(b, b.group.multiply(y, z), &c));
            let s = b.group.simple(w % 2);
            prop_assert_eq!(weyl_act_k0(b, s, &weyl_act_k0(b, s, &c)), change_basis(b, &c, Basis::Verma));
            let round = change_basis(b, &change_basis(b, &c, Basis::Verma), Basis::Simple);
            prop_assert_eq!(round, c);
        }

        #[test]
        fn action_respects_strata(y in 0usize..8, w in 0usize..8) {
            let b = b2();
            let d = b.gk_of_simple(w);
            let moved = weyl_act_k0(b, y, &class_of_simple(b, w));
            prop_assert!(project_to_stratum(b, &moved, d).is_ok());
        }
    }
}
