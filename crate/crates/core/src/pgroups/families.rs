//! The two families of minimal nonabelian p-groups in normal form.
//!
//! `H(n,d)`: generators `x_i, y_i` of order `p` and `z` of order `p^d`,
//! all commuting except `[x_i, y_i] = z^{p^{d-1}}`. `H(0,d)` is `C_{p^d}`.
//!
//! `A(n,d)`: the same with `x_1^p = z`, so `x_1` has order `p^{d+1}`.
//!
//! An element `x^a y^b z^c` is stored as exponent vectors. Collection uses
//! `y^b x^{a'} = x^{a'} y^b z^{-p^{d-1} a'·b}`.

use std::fmt;

use super::{check_odd_prime, checked_order, GroupError, PGroup, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    H,
    A,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::H => "H",
            FamilyKind::A => "A",
        })
    }
}

/// `x^a y^b z^c` in `H(n,d)`: `a, b` mod `p`, `c` mod `p^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HndElement {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub c: u64,
}

/// `x^a y^b` in `A(n,d)`: `a_1` mod `p^{d+1}`, the rest mod `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AndElement {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

fn dot(u: &[u64], v: &[u64], m: u64) -> u64 {
    u.iter().zip(v).fold(0, |acc, (x, y)| (acc + x * y) % m)
}

fn add_vec(u: &[u64], v: &[u64], m: u64) -> Vec<u64> {
    u.iter().zip(v).map(|(x, y)| (x + y) % m).collect()
}

impl HndElement {
    pub fn identity(n: usize) -> Self {
        HndElement { a: vec![0; n], b: vec![0; n], c: 0 }
    }

    pub fn mul(&self, other: &Self, p: u64, d: u32) -> Self {
        let pd = p.pow(d);
        let corr = p.pow(d - 1) * dot(&other.a, &self.b, p) % pd;
        HndElement {
            a: add_vec(&self.a, &other.a, p),
            b: add_vec(&self.b, &other.b, p),
            c: (self.c + other.c + pd - corr) % pd,
        }
    }

    /// Index with digits `a_1..a_n, b_1..b_n, c` from most to least significant.
    fn encode(&self, p: u64, d: u32) -> u32 {
        let mut idx = 0u64;
        for &x in self.a.iter().chain(&self.b) {
            idx = idx * p + x;
        }
        (idx * p.pow(d) + self.c) as u32
    }

    fn decode(idx: u32, n: usize, p: u64, d: u32) -> Self {
        let pd = p.pow(d);
        let mut idx = idx as u64;
        let c = idx % pd;
        idx /= pd;
        let mut digits = vec![0; 2 * n];
        for slot in digits.iter_mut().rev() {
            *slot = idx % p;
            idx /= p;
        }
        let b = digits.split_off(n);
        HndElement { a: digits, b, c }
    }
}

impl AndElement {
    pub fn identity(n: usize) -> Self {
        AndElement { a: vec![0; n], b: vec![0; n] }
    }

    pub fn mul(&self, other: &Self, p: u64, d: u32) -> Self {
        let top = p.pow(d + 1);
        let corr = p.pow(d) * dot(&other.a, &self.b, p) % top;
        let mut a = add_vec(&self.a, &other.a, p);
        a[0] = (self.a[0] + other.a[0] + top - corr) % top;
        AndElement { a, b: add_vec(&self.b, &other.b, p) }
    }

    /// Index with digits `a_1` (mod `p^{d+1}`), `a_2..a_n`, `b_1..b_n`.
    fn encode(&self, p: u64) -> u32 {
        let mut idx = self.a[0];
        for &x in self.a[1..].iter().chain(&self.b) {
            idx = idx * p + x;
        }
        idx as u32
    }

    fn decode(idx: u32, n: usize, p: u64) -> Self {
        let mut idx = idx as u64;
        let mut digits = vec![0; 2 * n - 1];
        for slot in digits.iter_mut().rev() {
            *slot = idx % p;
            idx /= p;
        }
        let mut a = vec![idx];
        let b = digits.split_off(n - 1);
        a.extend(digits);
        AndElement { a, b }
    }
}

/// Materializes `H(n,d)` (with `H(0,d) = C_{p^d}`) or `A(n,d)`.
pub fn make_group(kind: FamilyKind, p: u32, n: u32, d: u32, limit: usize) -> Result<PGroup> {
    check_odd_prime(p)?;
    if d == 0 {
        return Err(GroupError::InvalidParameters("d must be at least 1".into()));
    }
    if kind == FamilyKind::A && n == 0 {
        return Err(GroupError::InvalidParameters("A(n,d) requires n >= 1".into()));
    }
    let order = checked_order(p, 2 * n + d, limit)?;
    let (n, pu) = (n as usize, p as u64);
    let xs = (1..=n).map(|i| format!("x{i}"));
    let ys = (1..=n).map(|i| format!("y{i}"));
    match kind {
        FamilyKind::H => {
            let unit = |slot: usize| {
                let mut e = HndElement::identity(n);
                match slot {
                    s if s < n => e.a[s] = 1,
                    s if s < 2 * n => e.b[s - n] = 1,
                    _ => e.c = 1,
                }
                e.encode(pu, d)
            };
            let gens = (0..=2 * n).map(unit).collect();
            let names = xs.chain(ys).chain(["z".to_string()]).collect();
            let name = if n == 0 { format!("C_{}", pu.pow(d)) } else { format!("H({n},{d})") };
            PGroup::from_law(
                p,
                order,
                move |u, v| HndElement::decode(u, n, pu, d).mul(&HndElement::decode(v, n, pu, d), pu, d).encode(pu, d),
                gens,
                names,
                name,
                limit,
            )
        }
        FamilyKind::A => {
            let unit = |slot: usize| {
                let mut e = AndElement::identity(n);
                match slot {
                    s if s < n => e.a[s] = 1,
                    s => e.b[s - n] = 1,
                }
                e.encode(pu)
            };
            let gens = (0..2 * n).map(unit).collect();
            let names = xs.chain(ys).collect();
            PGroup::from_law(
                p,
                order,
                move |u, v| AndElement::decode(u, n, pu).mul(&AndElement::decode(v, n, pu), pu, d).encode(pu),
                gens,
                names,
                format!("A({n},{d})"),
                limit,
            )
        }
    }
}
