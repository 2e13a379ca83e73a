//! Direct products, central products and the `A(1,d)` construction as a
//! quotient of a subgroup of `H(1,1) × C_{p^{d+1}}`.

use super::{check_odd_prime, make_group, FamilyKind, GroupError, PGroup, Result};

/// `G × H`, with `(g, h)` stored as `g·|H| + h`.
pub fn direct_product(g: &PGroup, h: &PGroup, limit: usize) -> Result<PGroup> {
    if g.prime() != h.prime() {
        return Err(GroupError::InvalidParameters(format!("primes differ: {} and {}", g.prime(), h.prime())));
    }
    let order = (g.order() as u128) * (h.order() as u128);
    if order > limit as u128 {
        return Err(GroupError::LimitExceeded { order, limit });
    }
    let m = h.order() as u32;
    let gens = g.generators().iter().map(|&x| x * m).chain(h.generators().iter().copied()).collect();
    let names = g
        .generator_names()
        .iter()
        .map(|n| format!("{n}.1"))
        .chain(h.generator_names().iter().map(|n| format!("{n}.2")))
        .collect();
    let (gl, hl) = (g.clone(), h.clone());
    PGroup::from_law(
        g.prime(),
        order as usize,
        move |a, b| gl.mul(a / m, b / m) * m + hl.mul(a % m, b % m),
        gens,
        names,
        format!("{} x {}", factor_name(g), factor_name(h)),
        limit,
    )
}

fn factor_name(g: &PGroup) -> String {
    if g.name().contains(' ') {
        format!("({})", g.name())
    } else {
        g.name().to_string()
    }
}

/// The canonical central element of order `p`: the first nontrivial
/// commutator of generators, or for abelian groups with cyclic center the
/// element of order `p` in it.
pub fn central_marker(g: &PGroup) -> Result<u32> {
    let gens = g.generators();
    let marker = gens
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| gens[i + 1..].iter().map(move |&b| (a, b)))
        .map(|(a, b)| g.commutator(a, b))
        .find(|&c| c != 0);
    let w = match marker {
        Some(c) => c,
        None => {
            let z = g.center();
            let top = z
                .elements()
                .iter()
                .copied()
                .find(|&x| g.element_order(x) as usize == z.order())
                .filter(|_| !z.is_trivial())
                .ok_or_else(|| GroupError::InvalidCentralSubgroup(format!("{} has no cyclic center", g.name())))?;
            g.pow(top, (z.order() / g.prime() as usize) as i64)
        }
    };
    if g.element_order(w) != g.prime() || !g.is_central(w) {
        return Err(GroupError::InvalidCentralSubgroup(format!("marker of {} is not central of order p", g.name())));
    }
    Ok(w)
}

/// `(N1 × N2)/⟨(b1, b2)⟩` for central `b1, b2` of order `p`.
pub fn central_product(n1: &PGroup, n2: &PGroup, b: (u32, u32), limit: usize) -> Result<PGroup> {
    for (g, x) in [(n1, b.0), (n2, b.1)] {
        if !g.is_central(x) {
            return Err(GroupError::InvalidCentralSubgroup(format!("{x} is not central in {}", g.name())));
        }
        if g.element_order(x) != g.prime() {
            return Err(GroupError::InvalidCentralSubgroup(format!(
                "{x} has order {} in {}; both factors must meet B trivially",
                g.element_order(x),
                g.name()
            )));
        }
    }
    let prod = direct_product(n1, n2, limit)?;
    let gen = b.0 * n2.order() as u32 + b.1;
    let sub = prod.generate(&[gen]);
    let name = format!("{} o {}", factor_name(n1), factor_name(n2));
    prod.quotient(&sub, name)
}

/// The central product identifying the canonical markers `w1` and `w2⁻¹`.
pub fn central_product_canonical(n1: &PGroup, n2: &PGroup, limit: usize) -> Result<PGroup> {
    let w1 = central_marker(n1)?;
    let w2 = central_marker(n2)?;
    central_product(n1, n2, (w1, n2.inv(w2)), limit)
}

/// `⟨x w, y, z⟩ ≤ H(1,1) × C_{p^{d+1}}` modulo `⟨w^{p^d} z⁻¹⟩`, a group of
/// order `p^{2+d}`.
pub fn build_a1d_via_gd(p: u32, d: u32, limit: usize) -> Result<PGroup> {
    check_odd_prime(p)?;
    if d == 0 {
        return Err(GroupError::InvalidParameters("d must be at least 1".into()));
    }
    let h = make_group(FamilyKind::H, p, 1, 1, limit)?;
    let c = make_group(FamilyKind::H, p, 0, d + 1, limit)?;
    let amb = direct_product(&h, &c, limit)?;
    let word = |s: &str| amb.parse_word(s);
    let (xw, y, z) = (word("x1.1*z.2")?, word("y1.1")?, word("z.1")?);
    let gd = amb.generate(&[xw, y, z]);
    let expected = (p as usize).pow(3 + d);
    if gd.order() != expected {
        return Err(GroupError::Internal(format!("|G_d| = {} but expected {expected}", gd.order())));
    }
    let kernel_gen = amb.mul(amb.pow(word("z.2")?, (p as i64).pow(d)), amb.inv(z));
    let gd_group = amb.subgroup_group(&gd, format!("G_{d}"))?;
    let local = gd
        .elements()
        .binary_search(&kernel_gen)
        .map_err(|_| GroupError::Internal("kernel generator outside G_d".into()))?;
    let kernel = gd_group.generate(&[local as u32]);
    let mut q = gd_group.quotient(&kernel, format!("Gbar_{d}"))?;
    if q.order() != (p as usize).pow(2 + d) {
        return Err(GroupError::Internal(format!("|Gbar_d| = {}", q.order())));
    }
    let names = ["xw", "y", "z"].iter().take(q.generators.len()).map(|s| s.to_string()).collect();
    q.generator_names = names;
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgroups::{is_isomorphic, DEFAULT_LIMIT};

    fn grp(kind: FamilyKind, n: u32, d: u32) -> PGroup {
        make_group(kind, 3, n, d, DEFAULT_LIMIT).unwrap()
    }

    #[test]
    fn product_orders_and_centers() {
        let h = grp(FamilyKind::H, 1, 1);
        let c = grp(FamilyKind::H, 0, 1);
        let g = direct_product(&h, &c, DEFAULT_LIMIT).unwrap();
        assert_eq!(g.order(), 81);
        assert_eq!(g.center().order(), 9);
        assert!(!g.center().is_cyclic(&g));
        assert_eq!(g.name(), "H(1,1) x C_3");
    }

    #[test]
    fn heisenberg_central_square() {
        let h = grp(FamilyKind::H, 1, 1);
        let cp = central_product_canonical(&h, &h, DEFAULT_LIMIT).unwrap();
        assert_eq!(cp.order(), 243);
        assert!(is_isomorphic(&cp, &grp(FamilyKind::H, 2, 1)).unwrap());
    }

    #[test]
    fn cyclic_times_heisenberg() {
        let c = grp(FamilyKind::H, 0, 2);
        let h = grp(FamilyKind::H, 1, 1);
        let cp = central_product_canonical(&c, &h, DEFAULT_LIMIT).unwrap();
        assert!(is_isomorphic(&cp, &grp(FamilyKind::H, 1, 2)).unwrap());
    }

    #[test]
    fn gd_quotient_is_metacyclic() {
        let q = build_a1d_via_gd(3, 1, DEFAULT_LIMIT).unwrap();
        assert_eq!(q.order(), 27);
        assert!(is_isomorphic(&q, &grp(FamilyKind::A, 1, 1)).unwrap());
        assert!(!is_isomorphic(&q, &grp(FamilyKind::H, 1, 1)).unwrap());
    }

    #[test]
    fn bad_central_subgroup() {
        let h = grp(FamilyKind::H, 1, 1);
        let x = h.parse_word("x1").unwrap();
        let z = h.parse_word("z").unwrap();
        assert!(matches!(central_product(&h, &h, (x, z), DEFAULT_LIMIT), Err(GroupError::InvalidCentralSubgroup(_))));
        assert!(matches!(central_product(&h, &h, (z, 0), DEFAULT_LIMIT), Err(GroupError::InvalidCentralSubgroup(_))));
    }
}
