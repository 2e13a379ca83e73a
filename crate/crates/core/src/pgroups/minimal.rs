//! Recognition and classification of minimal nonabelian p-groups, and the
//! search for a minimal nonabelian quotient.
//!
//! A nonabelian p-group `G` is minimal nonabelian when every proper quotient
//! is abelian. For odd `p` this is equivalent to:
//!
//! 1. `G` has class 2;
//! 2. `Z(G)` is cyclic of order `p^d`;
//! 3. `[G,G]` is the subgroup of order `p` in `Z(G)`;
//! 4. `G/Z(G)` is elementary abelian of rank `2n` and the commutator pairing
//!    on it is a nondegenerate alternating form over `F_p`.
//!
//! Such a group is `H(n,d)` when every `p`-th power lies in `Z(G)^p`, and
//! `A(n,d)` otherwise.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use super::{log_p, FamilyKind, GroupError, PGroup, Result, Subgroup};

/// Per-condition outcome of the four-condition test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbcdReport {
    pub class_two: bool,
    pub cyclic_center: bool,
    pub commutator_in_socle: bool,
    pub nondegenerate_form: bool,
    /// Half the rank of `G/Z(G)`, when it is elementary abelian of even rank.
    pub n: Option<u32>,
    /// `log_p |Z(G)|`.
    pub d: u32,
}

impl AbcdReport {
    pub fn all(&self) -> bool {
        self.class_two && self.cyclic_center && self.commutator_in_socle && self.nondegenerate_form
    }
}

impl fmt::Display for AbcdReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(i) class two: {}\n(ii) cyclic center: {}\n(iii) commutator subgroup of order p in center: {}\n(iv) nondegenerate commutator form: {}",
            self.class_two, self.cyclic_center, self.commutator_in_socle, self.nondegenerate_form
        )?;
        if let Some(n) = self.n {
            write!(f, "\nn={n} d={}", self.d)?;
        }
        Ok(())
    }
}

pub fn check_abcd(g: &PGroup) -> AbcdReport {
    let p = g.prime();
    let center = g.center();
    let comm = g.commutator_subgroup();
    let d = log_p(center.order(), p).expect("center of a p-group");
    let class_two = !comm.is_trivial() && comm.is_subgroup_of(&center);
    let cyclic_center = !center.is_trivial() && center.is_cyclic(g);
    let commutator_in_socle = comm.order() == p as usize && comm.is_subgroup_of(&center) && center.is_cyclic(g);
    let (nondegenerate_form, n) = symplectic_check(g, &center, &comm);
    AbcdReport { class_two, cyclic_center, commutator_in_socle, nondegenerate_form, n, d }
}

/// Condition (iv) and the value of `n`.
fn symplectic_check(g: &PGroup, center: &Subgroup, comm: &Subgroup) -> (bool, Option<u32>) {
    let p = g.prime();
    let quotient_abelian =
        g.generators().iter().all(|&a| g.generators().iter().all(|&b| center.contains(g.commutator(a, b))));
    let exponent_p = g.elements().all(|x| center.contains(g.pow(x, p as i64)));
    if !quotient_abelian || !exponent_p {
        return (false, None);
    }
    let rank = log_p(g.order() / center.order(), p).expect("index is a power of p");
    let n = rank.is_multiple_of(2).then_some(rank / 2);
    if comm.order() != p as usize {
        return (false, n);
    }
    let w = comm.elements()[1];
    let powers: Vec<u32> = (0..p).map(|k| g.pow(w, k as i64)).collect();
    let dlog = |x: u32| powers.iter().position(|&y| y == x).map(|k| k as u64);

    let mut basis = Vec::new();
    let mut span = center.clone();
    for x in g.elements() {
        if !span.contains(x) {
            span = g.join(&span, &[x]);
            basis.push(x);
        }
    }
    let k = basis.len();
    let mut gram = vec![vec![0u64; k]; k];
    for i in 0..k {
        for j in 0..k {
            match dlog(g.commutator(basis[i], basis[j])) {
                Some(v) => gram[i][j] = v,
                None => return (false, n),
            }
        }
    }
    let full = rank_mod_p(gram, p as u64) == k;
    (full && n.is_some(), n)
}

fn rank_mod_p(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_multiple_of(p)) else { continue };
        m.swap(rank, pivot);
        let inv = crate::laurent::inv_mod(m[rank][col] as u32, p as u32) as u64;
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Minimal nonabelian by two independent tests; a disagreement is an error.
pub fn is_minimal_nonabelian(g: &PGroup) -> Result<bool> {
    let by_quotients = minimal_by_central_quotients(g);
    let by_conditions = check_abcd(g).all();
    if by_quotients != by_conditions {
        return Err(GroupError::Internal(format!(
            "{}: quotient test says {by_quotients}, four-condition test says {by_conditions}",
            g.name()
        )));
    }
    Ok(by_quotients)
}

/// Every nontrivial normal subgroup contains a central subgroup of order
/// `p`, so it suffices that `[G,G]` lies in each of those.
pub fn minimal_by_central_quotients(g: &PGroup) -> bool {
    if g.is_abelian() {
        return false;
    }
    let p = g.prime();
    let comm = g.commutator_subgroup();
    let center = g.center();
    center.elements().iter().filter(|&&z| g.element_order(z) == p).all(|&z| comm.is_subgroup_of(&g.generate(&[z])))
}

/// Kind and parameters of a minimal nonabelian group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassifyResult {
    pub kind: FamilyKind,
    pub n: u32,
    pub d: u32,
}

impl fmt::Display for ClassifyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} n={} d={}", self.kind, self.n, self.d)
    }
}

pub fn classify_minimal(g: &PGroup) -> Result<ClassifyResult> {
    if !is_minimal_nonabelian(g)? {
        return Err(GroupError::NotMinimal);
    }
    let p = g.prime() as i64;
    let center = g.center();
    let d = log_p(center.order(), g.prime()).expect("center of a p-group");
    let n = (g.log_order() - d) / 2;
    let zp: HashSet<u32> = center.elements().iter().map(|&z| g.pow(z, p)).collect();
    let kind = if g.elements().all(|x| zp.contains(&g.pow(x, p))) { FamilyKind::H } else { FamilyKind::A };
    Ok(ClassifyResult { kind, n, d })
}

/// A normal subgroup with minimal nonabelian quotient.
#[derive(Debug, Clone)]
pub struct MinimalQuotient {
    pub kernel: Subgroup,
    pub quotient: PGroup,
    pub class: ClassifyResult,
}

impl PGroup {
    /// All normal subgroups, ordered by decreasing order and then by sorted
    /// element list.
    pub fn normal_subgroups(&self) -> Vec<Subgroup> {
        let trivial = self.trivial_subgroup();
        let mut seen: HashSet<Subgroup> = HashSet::from([trivial.clone()]);
        let mut queue = VecDeque::from([trivial]);
        let mut all = Vec::new();
        while let Some(n) = queue.pop_front() {
            // Each covering normal subgroup is N⟨g⟩ with gN central of order p in G/N.
            let mut covered = vec![false; self.order];
            for g in self.elements() {
                if n.contains(g) || covered[g as usize] {
                    continue;
                }
                if !n.contains(self.pow(g, self.p as i64)) {
                    continue;
                }
                if !self.generators.iter().all(|&s| n.contains(self.commutator(g, s))) {
                    continue;
                }
                let m = self.join(&n, &[g]);
                for &x in m.elements() {
                    covered[x as usize] = true;
                }
                if seen.insert(m.clone()) {
                    queue.push_back(m);
                }
            }
            all.push(n);
        }
        all.sort_by(|a, b| b.order().cmp(&a.order()).then_with(|| a.elements().cmp(b.elements())));
        all
    }
}

/// The largest normal `N` (first in the fixed order) with `G/N` minimal
/// nonabelian.
pub fn minimal_nonabelian_quotient(g: &PGroup) -> Result<MinimalQuotient> {
    if g.is_abelian() {
        return Err(GroupError::Abelian);
    }
    let comm = g.commutator_subgroup();
    let min_index = (g.prime() as usize).pow(3);
    for n in g.normal_subgroups() {
        if g.order() / n.order() < min_index || comm.is_subgroup_of(&n) {
            continue;
        }
        let q = g.quotient(&n, format!("{}/N", g.name()))?;
        if is_minimal_nonabelian(&q)? {
            let class = classify_minimal(&q)?;
            let quotient = q.with_name(format!("{}({},{})", class.kind, class.n, class.d));
            return Ok(MinimalQuotient { kernel: n, quotient, class });
        }
    }
    Err(GroupError::Internal(format!("{} has no minimal nonabelian quotient", g.name())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgroups::{build_a1d_via_gd, direct_product, make_group, DEFAULT_LIMIT};

    fn grp(kind: FamilyKind, n: u32, d: u32) -> PGroup {
        make_group(kind, 3, n, d, DEFAULT_LIMIT).unwrap()
    }

    #[test]
    fn heisenberg_basics() {
        let b = grp(FamilyKind::H, 1, 1).basics();
        assert_eq!(b.center.order(), 3);
        assert_eq!(b.commutator_subgroup.order(), 3);
        assert_eq!(b.rank, 2);
    }

    #[test]
    fn metacyclic_center() {
        let g = grp(FamilyKind::A, 1, 2);
        assert_eq!(g.order(), 81);
        let z = g.center();
        assert_eq!(z.order(), 9);
        assert!(z.is_cyclic(&g));
    }

    #[test]
    fn abcd_examples() {
        let r = check_abcd(&grp(FamilyKind::H, 2, 1));
        assert!(r.all());
        assert_eq!((r.n, r.d), (Some(2), 1));

        let hc = direct_product(&grp(FamilyKind::H, 1, 1), &grp(FamilyKind::H, 0, 1), DEFAULT_LIMIT).unwrap();
        assert!(!check_abcd(&hc).cyclic_center);

        let e = direct_product(&grp(FamilyKind::H, 0, 1), &grp(FamilyKind::H, 0, 1), DEFAULT_LIMIT).unwrap();
        let r = check_abcd(&e);
        assert!(!r.commutator_in_socle && !r.all());
    }

    #[test]
    fn minimality_examples() {
        assert!(is_minimal_nonabelian(&grp(FamilyKind::H, 1, 1)).unwrap());
        let hc = direct_product(&grp(FamilyKind::H, 1, 1), &grp(FamilyKind::H, 0, 1), DEFAULT_LIMIT).unwrap();
        assert!(!is_minimal_nonabelian(&hc).unwrap());
        assert!(!is_minimal_nonabelian(&grp(FamilyKind::H, 0, 2)).unwrap());
    }

    #[test]
    fn classification_round_trips() {
        let c = classify_minimal(&grp(FamilyKind::H, 2, 2)).unwrap();
        assert_eq!(c, ClassifyResult { kind: FamilyKind::H, n: 2, d: 2 });
        let c = classify_minimal(&grp(FamilyKind::A, 1, 2)).unwrap();
        assert_eq!(c, ClassifyResult { kind: FamilyKind::A, n: 1, d: 2 });
        let c = classify_minimal(&build_a1d_via_gd(3, 1, DEFAULT_LIMIT).unwrap()).unwrap();
        assert_eq!(c, ClassifyResult { kind: FamilyKind::A, n: 1, d: 1 });
        assert_eq!(classify_minimal(&grp(FamilyKind::H, 0, 1)), Err(GroupError::NotMinimal));
    }

    #[test]
    fn normal_subgroups_of_heisenberg() {
        // 1, Z, the four maximal subgroups, G.
        let subs = grp(FamilyKind::H, 1, 1).normal_subgroups();
        let orders: Vec<usize> = subs.iter().map(Subgroup::order).collect();
        assert_eq!(orders, vec![27, 9, 9, 9, 9, 3, 1]);
    }

    #[test]
    fn minimal_quotients() {
        let hc = direct_product(&grp(FamilyKind::H, 1, 1), &grp(FamilyKind::H, 0, 1), DEFAULT_LIMIT).unwrap();
        let mq = minimal_nonabelian_quotient(&hc).unwrap();
        assert_eq!(mq.class, ClassifyResult { kind: FamilyKind::H, n: 1, d: 1 });
        assert_eq!(mq.kernel.order(), 3);

        let mq = minimal_nonabelian_quotient(&grp(FamilyKind::H, 1, 1)).unwrap();
        assert!(mq.kernel.is_trivial());

        let mq = minimal_nonabelian_quotient(&grp(FamilyKind::H, 2, 1)).unwrap();
        assert!(mq.kernel.is_trivial());
        assert_eq!(mq.class, ClassifyResult { kind: FamilyKind::H, n: 2, d: 1 });

        assert_eq!(minimal_nonabelian_quotient(&grp(FamilyKind::H, 0, 2)).unwrap_err(), GroupError::Abelian);
    }

    #[test]
    fn power_identity_in_class_two() {
        for g in
            [grp(FamilyKind::H, 1, 1), grp(FamilyKind::A, 1, 1), grp(FamilyKind::H, 1, 2), grp(FamilyKind::A, 1, 2)]
        {
            let p = g.prime() as i64;
            for x in g.elements() {
                for y in g.elements() {
                    let c = g.commutator(x, y);
                    let rhs = g.mul(g.mul(g.pow(x, p), g.pow(y, p)), g.pow(c, -(p * (p - 1) / 2)));
                    assert_eq!(g.pow(g.mul(x, y), p), rhs);
                }
            }
        }
    }
}
