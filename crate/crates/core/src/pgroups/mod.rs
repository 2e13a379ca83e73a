//! Finite p-groups for odd `p`, materialized as elements `0..order` with a
//! multiplication law. Element `0` is always the identity.
//!
//! Small groups carry a full Cayley table; larger ones keep the law as a
//! closure over their parents. Every subgroup operation enumerates
//! elements, so groups are refused above a materialization limit.

mod construct;
mod families;
mod iso;
mod minimal;
mod text;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::laurent::check_prime;

pub use construct::{build_a1d_via_gd, central_marker, central_product, central_product_canonical, direct_product};
pub use families::{make_group, AndElement, FamilyKind, HndElement};
pub use iso::{burnside_action_check, find_isomorphism, is_isomorphic, Automorphism, BurnsideReport};
pub use minimal::{
    check_abcd, classify_minimal, is_minimal_nonabelian, minimal_by_central_quotients, minimal_nonabelian_quotient,
    AbcdReport, ClassifyResult, MinimalQuotient,
};
pub use text::GroupDescriptor;

/// Default cap on the order of a materialized group.
pub const DEFAULT_LIMIT: usize = 10_000;

/// Groups up to this order store their full Cayley table.
const TABLE_MAX: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("p = {0} must be an odd prime")]
    BadPrime(u64),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("group order {order} exceeds the materialization limit {limit}")]
    LimitExceeded { order: u128, limit: usize },
    #[error("order {0} is not a power of an odd prime")]
    NotPGroup(usize),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("invalid central subgroup: {0}")]
    InvalidCentralSubgroup(String),
    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("m = {m} is not prime to p = {p}")]
    NotCoprime { m: u64, p: u32 },
    #[error("group is abelian")]
    Abelian,
    #[error("group is not minimal nonabelian")]
    NotMinimal,
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("cannot parse group: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GroupError>;

type MulFn = dyn Fn(u32, u32) -> u32 + Send + Sync;

#[derive(Clone)]
enum Law {
    Table(Arc<[u32]>),
    Func(Arc<MulFn>),
}

/// A materialized finite p-group.
#[derive(Clone)]
pub struct PGroup {
    p: u32,
    order: usize,
    law: Law,
    inverse: Arc<[u32]>,
    element_orders: Arc<[u32]>,
    generators: Vec<u32>,
    generator_names: Vec<String>,
    name: String,
}

impl fmt::Debug for PGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PGroup")
            .field("name", &self.name)
            .field("p", &self.p)
            .field("order", &self.order)
            .field("generators", &self.generator_names)
            .finish()
    }
}

/// `log_p n` when `n` is a power of `p`.
pub fn log_p(n: usize, p: u32) -> Option<u32> {
    let (mut n, mut k) = (n, 0);
    while n > 1 {
        if n % p as usize != 0 {
            return None;
        }
        n /= p as usize;
        k += 1;
    }
    (n == 1).then_some(k)
}

pub(crate) fn check_odd_prime(p: u32) -> Result<()> {
    check_prime(p).map_err(|_| GroupError::BadPrime(p.into()))
}

/// `p^e` checked against the limit.
pub(crate) fn checked_order(p: u32, e: u32, limit: usize) -> Result<usize> {
    let order = (p as u128).checked_pow(e).unwrap_or(u128::MAX);
    if order > limit as u128 {
        return Err(GroupError::LimitExceeded { order, limit });
    }
    Ok(order as usize)
}

impl PGroup {
    /// Materializes the group `0..order` under `mul`. `0` must be the identity
    /// and `generators` must generate.
    pub(crate) fn from_law<F>(
        p: u32,
        order: usize,
        mul: F,
        generators: Vec<u32>,
        generator_names: Vec<String>,
        name: String,
        limit: usize,
    ) -> Result<Self>
    where
        F: Fn(u32, u32) -> u32 + Send + Sync + 'static,
    {
        if order > limit {
            return Err(GroupError::LimitExceeded { order: order as u128, limit });
        }
        if log_p(order, p).is_none() {
            return Err(GroupError::NotPGroup(order));
        }
        let law = if order <= TABLE_MAX {
            let n = order as u32;
            let table: Vec<u32> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| mul(a, b)).collect();
            Law::Table(table.into())
        } else {
            Law::Func(Arc::new(mul))
        };
        Self::from_parts(p, order, law, generators, generator_names, name)
    }

    fn from_parts(
        p: u32,
        order: usize,
        law: Law,
        generators: Vec<u32>,
        generator_names: Vec<String>,
        name: String,
    ) -> Result<Self> {
        debug_assert_eq!(generators.len(), generator_names.len());
        let mut g = PGroup {
            p,
            order,
            law,
            inverse: Arc::from(Vec::new()),
            element_orders: Arc::from(Vec::new()),
            generators,
            generator_names,
            name,
        };
        let mut inverse = vec![0u32; order];
        let mut orders = vec![0u32; order];
        for x in 0..order as u32 {
            let (mut prev, mut cur, mut k) = (0u32, x, 1u32);
            while cur != 0 {
                prev = cur;
                cur = g.mul(cur, x);
                k += 1;
                if k as usize > order {
                    return Err(GroupError::Internal(format!("element {x} has no finite order")));
                }
            }
            orders[x as usize] = k;
            inverse[x as usize] = if x == 0 { 0 } else { prev };
        }
        g.inverse = inverse.into();
        g.element_orders = orders.into();
        if g.generate(&g.generators).order() != order {
            return Err(GroupError::Internal(format!("generators of {} do not generate", g.name)));
        }
        Ok(g)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `log_p |G|`.
    pub fn log_order(&self) -> u32 {
        log_p(self.order, self.p).expect("order is a power of p")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The generators the group was built from; possibly redundant.
    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.law {
            Law::Table(t) => t[a as usize * self.order + b as usize],
            Law::Func(f) => f(a, b),
        }
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    /// `a^e` for any integer `e`.
    pub fn pow(&self, a: u32, e: i64) -> u32 {
        let ord = self.element_orders[a as usize] as i64;
        let mut e = e.rem_euclid(ord);
        let (mut base, mut acc) = (a, 0u32);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: u32) -> u32 {
        self.element_orders[a as usize]
    }

    pub fn exponent(&self) -> u32 {
        self.element_orders.iter().copied().max().unwrap_or(1)
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    pub fn commutator(&self, a: u32, b: u32) -> u32 {
        let ab = self.mul(a, b);
        self.mul(self.mul(ab, self.inv(a)), self.inv(b))
    }

    /// `g a g⁻¹`.
    pub fn conjugate(&self, a: u32, g: u32) -> u32 {
        self.mul(self.mul(g, a), self.inv(g))
    }

    pub fn is_abelian(&self) -> bool {
        let gens = &self.generators;
        gens.iter().enumerate().all(|(i, &a)| gens[i + 1..].iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.order as u32
    }

    /// The subgroup generated by `gens`.
    pub fn generate(&self, gens: &[u32]) -> Subgroup {
        self.generate_from(&[0], gens)
    }

    /// Closure of the subgroup `base` (listed in full) under right
    /// multiplication by `gens`.
    fn generate_from(&self, base: &[u32], gens: &[u32]) -> Subgroup {
        let mut mask = vec![0u64; self.order.div_ceil(64)];
        let mut elements = Vec::with_capacity(base.len().max(1));
        for &x in base {
            if !bit(&mask, x) {
                set_bit(&mut mask, x);
                elements.push(x);
            }
        }
        let gens: Vec<u32> = gens.iter().copied().filter(|&g| g != 0).collect();
        let mut i = 0;
        while i < elements.len() {
            let x = elements[i];
            for &g in &gens {
                let y = self.mul(x, g);
                if !bit(&mask, y) {
                    set_bit(&mut mask, y);
                    elements.push(y);
                }
            }
            i += 1;
        }
        let mut generators: Vec<u32> = Vec::new();
        for g in gens {
            if !generators.contains(&g) {
                generators.push(g);
            }
        }
        Subgroup::from_parts(elements, mask, generators)
    }

    /// The subgroup generated by `sub` and `extra`.
    pub fn join(&self, sub: &Subgroup, extra: &[u32]) -> Subgroup {
        let mut gens = sub.generators.clone();
        gens.extend(extra.iter().copied().filter(|&g| g != 0 && !sub.contains(g)));
        let mut out = self.generate_from(&sub.elements, &gens);
        out.generators = gens;
        out
    }

    /// The smallest normal subgroup containing `gens`.
    pub fn normal_closure(&self, gens: &[u32]) -> Subgroup {
        let mut sub = self.generate(gens);
        loop {
            let mut extra = Vec::new();
            for &s in &sub.generators {
                for &g in &self.generators {
                    let c = self.conjugate(s, g);
                    if !sub.contains(c) && !extra.contains(&c) {
                        extra.push(c);
                    }
                }
            }
            if extra.is_empty() {
                return sub;
            }
            sub = self.join(&sub, &extra);
        }
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        self.generate(&[])
    }

    pub fn whole(&self) -> Subgroup {
        self.generate(&self.generators)
    }

    pub fn is_central(&self, a: u32) -> bool {
        self.generators.iter().all(|&g| self.mul(a, g) == self.mul(g, a))
    }

    pub fn center(&self) -> Subgroup {
        let central: Vec<u32> = self.elements().filter(|&a| self.is_central(a)).collect();
        self.generate(&central).minimize_generators(self)
    }

    /// `[G, G]`, the normal closure of the commutators of generators.
    pub fn commutator_subgroup(&self) -> Subgroup {
        let gens = &self.generators;
        let mut comms = Vec::new();
        for (i, &a) in gens.iter().enumerate() {
            for &b in &gens[i + 1..] {
                let c = self.commutator(a, b);
                if c != 0 && !comms.contains(&c) {
                    comms.push(c);
                }
            }
        }
        self.normal_closure(&comms)
    }

    /// `Φ(G) = G^p [G, G]`.
    pub fn frattini(&self) -> Subgroup {
        let comm = self.commutator_subgroup();
        let mut powers: Vec<u32> = self.elements().map(|x| self.pow(x, self.p as i64)).collect();
        powers.sort_unstable();
        powers.dedup();
        self.join(&comm, &powers).minimize_generators(self)
    }

    /// `log_p |G/Φ(G)|`, the minimal number of generators.
    pub fn rank(&self) -> u32 {
        log_p(self.order / self.frattini().order(), self.p).expect("index is a power of p")
    }

    /// A minimal generating set, chosen greedily modulo `Φ(G)`.
    pub fn burnside_basis(&self) -> Vec<u32> {
        let mut span = self.frattini();
        let mut basis = Vec::new();
        for x in self.elements() {
            if span.order() == self.order {
                break;
            }
            if !span.contains(x) {
                span = self.join(&span, &[x]);
                basis.push(x);
            }
        }
        basis
    }

    pub fn basics(&self) -> GroupBasics {
        let frattini = self.frattini();
        GroupBasics {
            order: self.order,
            center: self.center(),
            commutator_subgroup: self.commutator_subgroup(),
            rank: log_p(self.order / frattini.order(), self.p).expect("index is a power of p"),
            frattini,
            exponent: self.exponent(),
        }
    }

    pub fn is_normal(&self, sub: &Subgroup) -> bool {
        sub.generators.iter().all(|&s| self.generators.iter().all(|&g| sub.contains(self.conjugate(s, g))))
    }

    /// The subgroup `sub` as a group in its own right, with its elements
    /// relabelled in increasing order.
    pub fn subgroup_group(&self, sub: &Subgroup, name: impl Into<String>) -> Result<Self> {
        let parent = self.clone();
        let elements: Arc<[u32]> = sub.elements.clone().into();
        let mut index = vec![u32::MAX; self.order];
        for (i, &x) in elements.iter().enumerate() {
            index[x as usize] = i as u32;
        }
        let gens: Vec<u32> = sub.generators.iter().map(|&g| index[g as usize]).collect();
        let names = (1..=gens.len()).map(|i| format!("s{i}")).collect();
        let index: Arc<[u32]> = index.into();
        let elems = elements.clone();
        PGroup::from_law(
            self.p,
            elements.len(),
            move |a, b| index[parent.mul(elems[a as usize], elems[b as usize]) as usize],
            gens,
            names,
            name.into(),
            usize::MAX,
        )
    }

    /// `G/N` for a normal subgroup `N`. Cosets are numbered by their
    /// smallest element's first appearance.
    pub fn quotient(&self, normal: &Subgroup, name: impl Into<String>) -> Result<Self> {
        if !self.is_normal(normal) {
            return Err(GroupError::NotNormal);
        }
        let mut coset = vec![u32::MAX; self.order];
        let mut reps = Vec::with_capacity(self.order / normal.order());
        for g in self.elements() {
            if coset[g as usize] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(g);
            for &n in &normal.elements {
                coset[self.mul(g, n) as usize] = id;
            }
        }
        let gens: Vec<u32> = self.generators.iter().map(|&g| coset[g as usize]).collect();
        let (gens, names): (Vec<u32>, Vec<String>) = gens
            .into_iter()
            .zip(self.generator_names.iter().cloned())
            .filter(|&(g, _)| g != 0)
            .fold((Vec::new(), Vec::new()), |(mut gs, mut ns), (g, n)| {
                if !gs.contains(&g) {
                    gs.push(g);
                    ns.push(n);
                }
                (gs, ns)
            });
        let parent = self.clone();
        let coset: Arc<[u32]> = coset.into();
        let reps: Arc<[u32]> = reps.into();
        let order = reps.len();
        PGroup::from_law(
            self.p,
            order,
            move |a, b| coset[parent.mul(reps[a as usize], reps[b as usize]) as usize],
            gens,
            names,
            name.into(),
            usize::MAX,
        )
    }

    /// Resolves a generator by `g<k>` (1-based) or by name.
    pub fn generator_by_name(&self, token: &str) -> Option<u32> {
        if let Some(k) = token.strip_prefix('g').and_then(|k| k.parse::<usize>().ok()) {
            return (1..=self.generators.len()).contains(&k).then(|| self.generators[k - 1]);
        }
        self.generator_names.iter().position(|n| n == token).map(|i| self.generators[i])
    }

    /// Parses a word such as `g1*g2^-1` or `x1^2*z`; `e` and `1` denote the identity.
    pub fn parse_word(&self, word: &str) -> Result<u32> {
        let word = word.trim();
        if word.is_empty() {
            return Err(GroupError::Parse("empty word".into()));
        }
        let mut acc = 0u32;
        for factor in word.split('*') {
            let factor = factor.trim();
            let (base, exp) = match factor.split_once('^') {
                Some((b, e)) => {
                    let e: i64 =
                        e.trim().parse().map_err(|_| GroupError::Parse(format!("bad exponent in {factor:?}")))?;
                    (b.trim(), e)
                }
                None => (factor, 1),
            };
            let g = match base {
                "e" | "1" => 0,
                _ => self
                    .generator_by_name(base)
                    .ok_or_else(|| GroupError::Parse(format!("unknown generator {base:?}")))?,
            };
            acc = self.mul(acc, self.pow(g, exp));
        }
        Ok(acc)
    }
}

/// Order, center, commutator subgroup, Frattini subgroup, rank and exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupBasics {
    pub order: usize,
    pub center: Subgroup,
    pub commutator_subgroup: Subgroup,
    pub frattini: Subgroup,
    pub rank: u32,
    pub exponent: u32,
}

/// A subgroup as a sorted element list plus a membership bitset.
#[derive(Debug, Clone)]
pub struct Subgroup {
    elements: Vec<u32>,
    mask: Vec<u64>,
    generators: Vec<u32>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.mask == other.mask
    }
}

impl Eq for Subgroup {}

impl std::hash::Hash for Subgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.mask.hash(state);
    }
}

impl Subgroup {
    fn from_parts(mut elements: Vec<u32>, mask: Vec<u64>, generators: Vec<u32>) -> Self {
        elements.sort_unstable();
        Subgroup { elements, mask, generators }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: u32) -> bool {
        bit(&self.mask, x)
    }

    /// Sorted elements; the identity `0` comes first.
    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.mask.iter().zip(&other.mask).all(|(a, b)| a & !b == 0)
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// Is the subgroup cyclic, i.e. does it contain an element of full order?
    pub fn is_cyclic(&self, g: &PGroup) -> bool {
        self.elements.iter().any(|&x| g.element_order(x) as usize == self.order())
    }

    /// Drops generators that are already in the span of earlier ones.
    fn minimize_generators(mut self, g: &PGroup) -> Self {
        let mut kept = Vec::new();
        let mut span = g.trivial_subgroup();
        for &x in &self.generators {
            if !span.contains(x) {
                span = g.join(&span, &[x]);
                kept.push(x);
            }
            if span.order() == self.order() {
                break;
            }
        }
        self.generators = kept;
        self
    }
}

#[inline]
fn bit(mask: &[u64], x: u32) -> bool {
    mask[(x >> 6) as usize] >> (x & 63) & 1 == 1
}

#[inline]
fn set_bit(mask: &mut [u64], x: u32) {
    mask[(x >> 6) as usize] |= 1 << (x & 63);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(p: u32, d: u32) -> PGroup {
        make_group(FamilyKind::H, p, 0, d, DEFAULT_LIMIT).unwrap()
    }

    #[test]
    fn log_p_detects_powers() {
        assert_eq!(log_p(243, 3), Some(5));
        assert_eq!(log_p(1, 5), Some(0));
        assert_eq!(log_p(18, 3), None);
    }

    #[test]
    fn cyclic_basics() {
        let g = cyclic(3, 2);
        let b = g.basics();
        assert_eq!(b.order, 9);
        assert_eq!(b.center.order(), 9);
        assert!(b.commutator_subgroup.is_trivial());
        assert_eq!(b.frattini.order(), 3);
        assert_eq!(b.rank, 1);
        assert_eq!(b.exponent, 9);
    }

    #[test]
    fn powers_and_inverses() {
        let g = cyclic(5, 2);
        let z = g.generators()[0];
        assert_eq!(g.element_order(z), 25);
        assert_eq!(g.pow(z, 25), 0);
        assert_eq!(g.mul(z, g.inv(z)), 0);
        assert_eq!(g.pow(z, -1), g.inv(z));
    }

    #[test]
    fn quotient_of_cyclic() {
        let g = cyclic(3, 2);
        let z = g.generators()[0];
        let n = g.generate(&[g.pow(z, 3)]);
        let q = g.quotient(&n, "C_3").unwrap();
        assert_eq!(q.order(), 3);
        assert_eq!(q.exponent(), 3);
    }

    #[test]
    fn words_resolve_generators() {
        let g = make_group(FamilyKind::H, 3, 1, 1, DEFAULT_LIMIT).unwrap();
        let y = g.parse_word("y1").unwrap();
        assert_eq!(g.parse_word("g2").unwrap(), y);
        assert_eq!(g.parse_word("y1^-1").unwrap(), g.inv(y));
        assert_eq!(g.parse_word("x1*x1^-1").unwrap(), 0);
        assert_eq!(g.parse_word("e").unwrap(), 0);
        assert!(g.parse_word("w").is_err());
        assert!(g.parse_word("g4").is_err());
    }

    #[test]
    fn subgroup_group_relabels() {
        let g = make_group(FamilyKind::H, 3, 1, 1, DEFAULT_LIMIT).unwrap();
        let z = g.center();
        let zg = g.subgroup_group(&z, "Z").unwrap();
        assert_eq!(zg.order(), 3);
        assert!(zg.is_abelian());
    }
}
