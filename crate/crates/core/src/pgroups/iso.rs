//! Isomorphism by backtracking over images of a Burnside basis, and
//! automorphisms given by generator images.

use std::collections::BTreeMap;

use super::{GroupError, PGroup, Result, Subgroup};

const UNSET: u32 = u32::MAX;

/// Extends `gens[i] ↦ imgs[i]` to a homomorphism on `⟨gens⟩`, or `None` if
/// the assignment violates a relation. Entries outside `⟨gens⟩` stay `UNSET`.
fn extend_hom(g: &PGroup, gens: &[u32], h: &PGroup, imgs: &[u32], map: &mut Vec<u32>) -> bool {
    map.clear();
    map.resize(g.order(), UNSET);
    map[0] = 0;
    let mut queue = vec![0u32];
    let mut i = 0;
    while i < queue.len() {
        let x = queue[i];
        let fx = map[x as usize];
        for (&s, &t) in gens.iter().zip(imgs) {
            let y = g.mul(x, s) as usize;
            let fy = h.mul(fx, t);
            if map[y] == UNSET {
                map[y] = fy;
                queue.push(y as u32);
            } else if map[y] != fy {
                return false;
            }
        }
        i += 1;
    }
    true
}

/// Isomorphism-invariant data attached to each element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Signature {
    order: u32,
    centralizer: u32,
    central: bool,
    in_frattini: bool,
    in_commutator: bool,
    power_order: u32,
    power_centralizer: u32,
}

struct Profile {
    sigs: Vec<Signature>,
    histogram: BTreeMap<Signature, usize>,
    frattini: Subgroup,
    summary: (usize, u32, usize, usize, usize),
}

fn profile(g: &PGroup) -> Profile {
    let center = g.center();
    let frattini = g.frattini();
    let comm = g.commutator_subgroup();
    let centralizer: Vec<u32> =
        g.elements().map(|x| g.elements().filter(|&y| g.mul(x, y) == g.mul(y, x)).count() as u32).collect();
    let sigs: Vec<Signature> = g
        .elements()
        .map(|x| {
            let xp = g.pow(x, g.prime() as i64);
            Signature {
                order: g.element_order(x),
                centralizer: centralizer[x as usize],
                central: center.contains(x),
                in_frattini: frattini.contains(x),
                in_commutator: comm.contains(x),
                power_order: g.element_order(xp),
                power_centralizer: centralizer[xp as usize],
            }
        })
        .collect();
    let mut histogram = BTreeMap::new();
    for s in &sigs {
        *histogram.entry(*s).or_insert(0) += 1;
    }
    let summary = (g.order(), g.exponent(), center.order(), comm.order(), frattini.order());
    Profile { sigs, histogram, frattini, summary }
}

/// An isomorphism `G → H` as the image of every element, if one exists.
pub fn find_isomorphism(g: &PGroup, h: &PGroup) -> Result<Option<Vec<u32>>> {
    if g.prime() != h.prime() || g.order() != h.order() {
        return Ok(None);
    }
    let (pg, ph) = (profile(g), profile(h));
    if pg.summary != ph.summary || pg.histogram != ph.histogram {
        return Ok(None);
    }
    let basis = g.burnside_basis();
    let candidates: Vec<Vec<u32>> =
        basis.iter().map(|&x| h.elements().filter(|&y| ph.sigs[y as usize] == pg.sigs[x as usize]).collect()).collect();
    let mut search = Search { g, h, basis: &basis, candidates: &candidates, imgs: Vec::new(), map: Vec::new() };
    Ok(search.run(ph.frattini).then_some(search.map))
}

struct Search<'a> {
    g: &'a PGroup,
    h: &'a PGroup,
    basis: &'a [u32],
    candidates: &'a [Vec<u32>],
    imgs: Vec<u32>,
    map: Vec<u32>,
}

impl Search<'_> {
    /// Depth-first search; images of a basis must stay independent modulo
    /// `Φ(H)` so that the final map is onto.
    fn run(&mut self, span: Subgroup) -> bool {
        let depth = self.imgs.len();
        if depth == self.basis.len() {
            return extend_hom(self.g, self.basis, self.h, &self.imgs, &mut self.map);
        }
        for &y in &self.candidates[depth] {
            if span.contains(y) {
                continue;
            }
            self.imgs.push(y);
            if extend_hom(self.g, &self.basis[..=depth], self.h, &self.imgs, &mut self.map) {
                let next = self.h.join(&span, &[y]);
                if self.run(next) {
                    return true;
                }
            }
            self.imgs.pop();
        }
        false
    }
}

pub fn is_isomorphic(g: &PGroup, h: &PGroup) -> Result<bool> {
    Ok(find_isomorphism(g, h)?.is_some())
}

/// An automorphism stored as the image of every element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    images: Vec<u32>,
}

impl Automorphism {
    pub fn identity(g: &PGroup) -> Self {
        Automorphism { images: g.elements().collect() }
    }

    /// The automorphism sending `g.generators()[i]` to `imgs[i]`.
    pub fn from_generator_images(g: &PGroup, imgs: &[u32]) -> Result<Self> {
        if imgs.len() != g.generators().len() {
            return Err(GroupError::NotAutomorphism(format!(
                "{} images for {} generators",
                imgs.len(),
                g.generators().len()
            )));
        }
        if let Some(&bad) = imgs.iter().find(|&&y| y as usize >= g.order()) {
            return Err(GroupError::NotAutomorphism(format!("image {bad} is not an element")));
        }
        let mut map = Vec::new();
        if !extend_hom(g, g.generators(), g, imgs, &mut map) {
            return Err(GroupError::NotAutomorphism("generator images violate a relation".into()));
        }
        let mut hit = vec![false; g.order()];
        for &y in &map {
            if std::mem::replace(&mut hit[y as usize], true) {
                return Err(GroupError::NotAutomorphism("map is not injective".into()));
            }
        }
        Ok(Automorphism { images: map })
    }

    /// Parses comma-separated generator-image words such as `g1,g2^-1,g3^-1`.
    pub fn parse(g: &PGroup, text: &str) -> Result<Self> {
        let imgs = text.split(',').map(|w| g.parse_word(w)).collect::<Result<Vec<_>>>()?;
        Self::from_generator_images(g, &imgs)
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Automorphism { images: other.images.iter().map(|&x| self.images[x as usize]).collect() }
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Automorphism { images: (0..self.images.len() as u32).collect() };
        for _ in 0..e {
            acc = self.compose(&acc);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn order(&self) -> u64 {
        let mut acc = self.clone();
        let mut k = 1;
        while !acc.is_identity() {
            acc = self.compose(&acc);
            k += 1;
        }
        k
    }
}

/// Whether an automorphism moves `P` and whether it moves `P/Φ(P)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BurnsideReport {
    pub nontrivial_on_p: bool,
    pub nontrivial_on_frattini_quotient: bool,
}

/// For an automorphism of order prime to `p`, acting trivially on `P` and on
/// `P/Φ(P)` are equivalent; a disagreement is reported as an error.
pub fn burnside_action_check(g: &PGroup, alpha: &Automorphism, m: u64) -> Result<BurnsideReport> {
    if m == 0 || m.is_multiple_of(g.prime() as u64) {
        return Err(GroupError::NotCoprime { m, p: g.prime() });
    }
    if alpha.images.len() != g.order() {
        return Err(GroupError::NotAutomorphism("automorphism of a different group".into()));
    }
    if !alpha.pow(m).is_identity() {
        return Err(GroupError::NotAutomorphism(format!("order {} does not divide m = {m}", alpha.order())));
    }
    let frattini = g.frattini();
    let nontrivial_on_p = g.generators().iter().any(|&x| alpha.apply(x) != x);
    let nontrivial_on_frattini_quotient =
        g.generators().iter().any(|&x| !frattini.contains(g.mul(alpha.apply(x), g.inv(x))));
    if nontrivial_on_p != nontrivial_on_frattini_quotient {
        return Err(GroupError::Internal(format!(
            "action of order {} is {} on the group but {} on its Frattini quotient",
            alpha.order(),
            if nontrivial_on_p { "nontrivial" } else { "trivial" },
            if nontrivial_on_frattini_quotient { "nontrivial" } else { "trivial" },
        )));
    }
    Ok(BurnsideReport { nontrivial_on_p, nontrivial_on_frattini_quotient })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgroups::{direct_product, make_group, FamilyKind, DEFAULT_LIMIT};

    fn grp(kind: FamilyKind, n: u32, d: u32) -> PGroup {
        make_group(kind, 3, n, d, DEFAULT_LIMIT).unwrap()
    }

    #[test]
    fn heisenberg_versus_metacyclic() {
        let (h, a) = (grp(FamilyKind::H, 1, 1), grp(FamilyKind::A, 1, 1));
        assert!(!is_isomorphic(&h, &a).unwrap());
        assert!(is_isomorphic(&h, &h).unwrap());
        assert!(is_isomorphic(&a, &a).unwrap());
    }

    #[test]
    fn found_isomorphism_is_a_bijective_homomorphism() {
        let c3 = grp(FamilyKind::H, 0, 1);
        let c9 = grp(FamilyKind::H, 0, 2);
        let g = direct_product(&c9, &c3, DEFAULT_LIMIT).unwrap();
        let h = direct_product(&c3, &c9, DEFAULT_LIMIT).unwrap();
        let f = find_isomorphism(&g, &h).unwrap().unwrap();
        for x in g.elements() {
            for y in g.elements() {
                assert_eq!(f[g.mul(x, y) as usize], h.mul(f[x as usize], f[y as usize]));
            }
        }
        let mut sorted = f.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, h.elements().collect::<Vec<_>>());
    }

    #[test]
    fn abelian_invariants_separate() {
        let c3 = grp(FamilyKind::H, 0, 1);
        let c9 = grp(FamilyKind::H, 0, 2);
        let e = direct_product(&c3, &c3, DEFAULT_LIMIT).unwrap();
        assert!(!is_isomorphic(&c9, &e).unwrap());
    }

    #[test]
    fn automorphism_parsing() {
        let h = grp(FamilyKind::H, 1, 1);
        let alpha = Automorphism::parse(&h, "g1,g2^-1,g3^-1").unwrap();
        assert_eq!(alpha.order(), 2);
        assert!(Automorphism::parse(&h, "g1,g2,g3^-1").is_err());
        assert!(Automorphism::parse(&h, "g1,g1,g3").is_err());
        assert!(Automorphism::parse(&h, "g1,g2").is_err());
    }

    #[test]
    fn burnside_examples() {
        let c3 = grp(FamilyKind::H, 0, 1);
        let e = direct_product(&c3, &c3, DEFAULT_LIMIT).unwrap();
        let inv = Automorphism::parse(&e, "g1^-1,g2^-1").unwrap();
        let r = burnside_action_check(&e, &inv, 2).unwrap();
        assert!(r.nontrivial_on_p && r.nontrivial_on_frattini_quotient);

        let c9 = grp(FamilyKind::H, 0, 2);
        let r = burnside_action_check(&c9, &Automorphism::identity(&c9), 2).unwrap();
        assert!(!r.nontrivial_on_p && !r.nontrivial_on_frattini_quotient);

        let h = grp(FamilyKind::H, 1, 1);
        let alpha = Automorphism::parse(&h, "x1,y1^-1,z^-1").unwrap();
        let r = burnside_action_check(&h, &alpha, 2).unwrap();
        assert!(r.nontrivial_on_p && r.nontrivial_on_frattini_quotient);

        assert!(matches!(burnside_action_check(&h, &alpha, 3), Err(GroupError::NotCoprime { .. })));
        assert!(matches!(burnside_action_check(&h, &alpha, 5), Err(GroupError::NotAutomorphism(_))));
    }
}
