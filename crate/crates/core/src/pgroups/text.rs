//! Group descriptors such as `kind=H p=3 n=2 d=1 * kind=C p=3 d=1` and
//! whitespace-separated Cayley tables.
//!
//! Descriptor terms are `kind=H|A p n d`, `kind=C p d` (cyclic of order
//! `p^d`) and `kind=Gd p d`. Terms combine left to right with ` * ` (direct
//! product) and ` o ` (central product on the canonical markers).

use std::fmt;
use std::str::FromStr;

use super::{
    build_a1d_via_gd, central_product_canonical, direct_product, log_p, make_group, FamilyKind, GroupError, PGroup,
    Result,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupDescriptor {
    Family { kind: FamilyKind, p: u32, n: u32, d: u32 },
    Cyclic { p: u32, d: u32 },
    Gd { p: u32, d: u32 },
    Product(Box<GroupDescriptor>, Box<GroupDescriptor>),
    Central(Box<GroupDescriptor>, Box<GroupDescriptor>),
}

impl GroupDescriptor {
    pub fn build(&self, limit: usize) -> Result<PGroup> {
        match self {
            GroupDescriptor::Family { kind, p, n, d } => make_group(*kind, *p, *n, *d, limit),
            GroupDescriptor::Cyclic { p, d } => make_group(FamilyKind::H, *p, 0, *d, limit),
            GroupDescriptor::Gd { p, d } => build_a1d_via_gd(*p, *d, limit),
            GroupDescriptor::Product(a, b) => direct_product(&a.build(limit)?, &b.build(limit)?, limit),
            GroupDescriptor::Central(a, b) => central_product_canonical(&a.build(limit)?, &b.build(limit)?, limit),
        }
    }

    fn parse_term(term: &str) -> Result<Self> {
        let mut fields = std::collections::BTreeMap::new();
        for tok in term.split_whitespace() {
            let (k, v) =
                tok.split_once('=').ok_or_else(|| GroupError::Parse(format!("expected key=value, found {tok:?}")))?;
            if fields.insert(k, v).is_some() {
                return Err(GroupError::Parse(format!("duplicate key {k:?}")));
            }
        }
        let kind = *fields.get("kind").ok_or_else(|| GroupError::Parse(format!("missing kind= in {term:?}")))?;
        fields.remove("kind");
        let mut take = |k: &str| -> Result<u32> {
            let v = fields.remove(k).ok_or_else(|| GroupError::Parse(format!("missing {k}= in {term:?}")))?;
            v.parse().map_err(|_| GroupError::Parse(format!("bad value {v:?} for {k}")))
        };
        let out = match kind {
            "H" | "A" => {
                let kind = if kind == "H" { FamilyKind::H } else { FamilyKind::A };
                GroupDescriptor::Family { kind, p: take("p")?, n: take("n")?, d: take("d")? }
            }
            "C" => GroupDescriptor::Cyclic { p: take("p")?, d: take("d")? },
            "Gd" => GroupDescriptor::Gd { p: take("p")?, d: take("d")? },
            other => return Err(GroupError::Parse(format!("unknown kind {other:?}"))),
        };
        if let Some(k) = fields.keys().next() {
            return Err(GroupError::Parse(format!("unexpected key {k:?}")));
        }
        Ok(out)
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::Family { kind, p, n, d } => write!(f, "kind={kind} p={p} n={n} d={d}"),
            GroupDescriptor::Cyclic { p, d } => write!(f, "kind=C p={p} d={d}"),
            GroupDescriptor::Gd { p, d } => write!(f, "kind=Gd p={p} d={d}"),
            GroupDescriptor::Product(a, b) => write!(f, "{a} * {b}"),
            GroupDescriptor::Central(a, b) => write!(f, "{a} o {b}"),
        }
    }
}

impl FromStr for GroupDescriptor {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self> {
        let mut acc: Option<GroupDescriptor> = None;
        let mut pending: Option<&str> = None;
        let mut term = String::new();
        let flush = |term: &mut String, acc: &mut Option<GroupDescriptor>, op: Option<&str>| -> Result<()> {
            let t = Self::parse_term(term.trim())?;
            term.clear();
            *acc = Some(match (acc.take(), op) {
                (None, _) => t,
                (Some(a), Some("*")) => GroupDescriptor::Product(Box::new(a), Box::new(t)),
                (Some(a), _) => GroupDescriptor::Central(Box::new(a), Box::new(t)),
            });
            Ok(())
        };
        for tok in s.split_whitespace() {
            if tok == "*" || tok == "o" {
                if term.trim().is_empty() {
                    return Err(GroupError::Parse(format!("operator {tok:?} without a left operand")));
                }
                flush(&mut term, &mut acc, pending)?;
                pending = Some(tok);
            } else {
                term.push_str(tok);
                term.push(' ');
            }
        }
        if term.trim().is_empty() {
            return Err(GroupError::Parse("empty descriptor or dangling operator".into()));
        }
        flush(&mut term, &mut acc, pending)?;
        Ok(acc.expect("at least one term"))
    }
}

impl PGroup {
    /// Reads an `N × N` table of element indices in `0..N`. The identity is
    /// relabelled to `0` and associativity is checked against a generating
    /// set.
    pub fn from_cayley_table(text: &str, limit: usize) -> Result<Self> {
        let rows: Vec<Vec<u32>> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<u32>().map_err(|_| GroupError::Parse(format!("bad entry {t:?}"))))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let n = rows.len();
        if n == 0 {
            return Err(GroupError::Parse("empty table".into()));
        }
        if n > limit {
            return Err(GroupError::LimitExceeded { order: n as u128, limit });
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(GroupError::Parse(format!("row {i} has {} entries, expected {n}", r.len())));
        }
        let mut seen = vec![false; n];
        for (i, r) in rows.iter().enumerate() {
            seen.iter_mut().for_each(|s| *s = false);
            for &x in r {
                if x as usize >= n || std::mem::replace(&mut seen[x as usize], true) {
                    return Err(GroupError::Parse(format!("row {i} is not a permutation of 0..{n}")));
                }
            }
        }
        for j in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            if rows.iter().any(|r| std::mem::replace(&mut seen[r[j] as usize], true)) {
                return Err(GroupError::Parse(format!("column {j} is not a permutation of 0..{n}")));
            }
        }
        let e = (0..n).find(|&e| (0..n).all(|x| rows[e][x] as usize == x && rows[x][e] as usize == x));
        let e = e.ok_or_else(|| GroupError::Parse("table has no identity".into()))?;
        let p = (3..=n as u32).find(|&q| n.is_multiple_of(q as usize)).filter(|_| n > 1);
        let p = match p {
            Some(p) if log_p(n, p).is_some() && p % 2 == 1 => p,
            _ => return Err(GroupError::NotPGroup(n)),
        };
        // Swap labels 0 and e.
        let relabel = |x: u32| -> u32 {
            match x as usize {
                0 => e as u32,
                y if y == e => 0,
                _ => x,
            }
        };
        let table: Vec<u32> = (0..n as u32)
            .flat_map(|a| (0..n as u32).map(move |b| (a, b)))
            .map(|(a, b)| relabel(rows[relabel(a) as usize][relabel(b) as usize]))
            .collect();
        let mul = |a: u32, b: u32| table[a as usize * n + b as usize];

        let mut gens = Vec::new();
        let mut span = vec![false; n];
        span[0] = true;
        for x in 0..n as u32 {
            if !span[x as usize] {
                gens.push(x);
                span = closure(n, &gens, mul);
            }
        }
        // Light's test: (x s) y = x (s y) for all x, y and generators s.
        for &s in &gens {
            for x in 0..n as u32 {
                let xs = mul(x, s);
                for y in 0..n as u32 {
                    if mul(xs, y) != mul(x, mul(s, y)) {
                        return Err(GroupError::Parse(format!("table is not associative at ({x}, {s}, {y})")));
                    }
                }
            }
        }
        let names = (1..=gens.len()).map(|i| format!("g{i}")).collect();
        let table: std::sync::Arc<[u32]> = table.into();
        PGroup::from_parts(p, n, super::Law::Table(table), gens, names, format!("table of order {n}"))
    }

    /// The Cayley table in the format read by [`PGroup::from_cayley_table`].
    pub fn cayley_table_text(&self) -> String {
        let width = (self.order.saturating_sub(1)).to_string().len();
        let mut out = String::new();
        for a in self.elements() {
            let row: Vec<String> = self.elements().map(|b| format!("{:>width$}", self.mul(a, b))).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

fn closure(n: usize, gens: &[u32], mul: impl Fn(u32, u32) -> u32) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut list = vec![0u32];
    let mut i = 0;
    while i < list.len() {
        for &g in gens {
            let y = mul(list[i], g);
            if !seen[y as usize] {
                seen[y as usize] = true;
                list.push(y);
            }
        }
        i += 1;
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgroups::{is_isomorphic, DEFAULT_LIMIT};

    #[test]
    fn descriptor_round_trip() {
        for s in [
            "kind=H p=3 n=2 d=1",
            "kind=A p=5 n=1 d=2",
            "kind=Gd p=3 d=1",
            "kind=H p=3 n=1 d=1 * kind=C p=3 d=1",
            "kind=H p=3 n=1 d=1 o kind=H p=3 n=1 d=1",
        ] {
            let d: GroupDescriptor = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
    }

    #[test]
    fn descriptor_errors() {
        for s in [
            "",
            "kind=H p=3 n=1",
            "kind=Q p=3 d=1",
            "kind=C p=3 d=1 *",
            "* kind=C p=3 d=1",
            "kind=C p=3 d=1 e=2",
            "kind=C p=x d=1",
        ] {
            assert!(s.parse::<GroupDescriptor>().is_err(), "{s:?}");
        }
    }

    #[test]
    fn descriptor_builds() {
        let g =
            "kind=H p=3 n=1 d=1 o kind=H p=3 n=1 d=1".parse::<GroupDescriptor>().unwrap().build(DEFAULT_LIMIT).unwrap();
        let h = "kind=H p=3 n=2 d=1".parse::<GroupDescriptor>().unwrap().build(DEFAULT_LIMIT).unwrap();
        assert!(is_isomorphic(&g, &h).unwrap());
    }

    #[test]
    fn table_round_trip() {
        let h = make_group(FamilyKind::H, 3, 1, 1, DEFAULT_LIMIT).unwrap();
        let t = PGroup::from_cayley_table(&h.cayley_table_text(), DEFAULT_LIMIT).unwrap();
        assert_eq!(t.order(), 27);
        assert!(is_isomorphic(&h, &t).unwrap());
    }

    #[test]
    fn table_with_moved_identity() {
        // C_3 with identity labelled 2.
        let t = PGroup::from_cayley_table("1 2 0\n2 0 1\n0 1 2\n", DEFAULT_LIMIT).unwrap();
        assert_eq!(t.order(), 3);
        assert_eq!(t.exponent(), 3);
    }

    #[test]
    fn table_errors() {
        assert!(matches!(PGroup::from_cayley_table("0 1\n1 0\n", DEFAULT_LIMIT), Err(GroupError::NotPGroup(2))));
        assert!(PGroup::from_cayley_table("0 1 2\n1 1 0\n2 0 1\n", DEFAULT_LIMIT).is_err());
        assert!(PGroup::from_cayley_table("0 1 2\n1 2 0\n", DEFAULT_LIMIT).is_err());
        assert!(PGroup::from_cayley_table("0 1 x\n1 2 0\n2 0 1\n", DEFAULT_LIMIT).is_err());
        assert!(matches!(PGroup::from_cayley_table("0 1 2\n1 2 0\n2 0 1\n", 2), Err(GroupError::LimitExceeded { .. })));
    }

    #[test]
    fn nonassociative_latin_square_is_rejected() {
        // A loop of order 5 with identity 0 that is not a group.
        let t = "0 1 2 3 4\n1 0 3 4 2\n2 4 0 1 3\n3 2 4 0 1\n4 3 1 2 0\n";
        assert!(matches!(PGroup::from_cayley_table(t, DEFAULT_LIMIT), Err(GroupError::Parse(_))));
    }
}
