use std::sync::OnceLock;

use proptest::prelude::*;
use ramforge::pgroups::{
    classify_minimal, is_isomorphic, make_group, minimal_nonabelian_quotient, FamilyKind, GroupDescriptor, GroupError,
    PGroup, DEFAULT_LIMIT,
};

fn build(desc: &str) -> PGroup {
    desc.parse::<GroupDescriptor>().unwrap().build(DEFAULT_LIMIT).unwrap()
}

#[test]
fn cayley_tables_round_trip() {
    for desc in ["kind=H p=3 n=1 d=1", "kind=A p=3 n=1 d=1", "kind=H p=3 n=1 d=1 * kind=C p=3 d=1", "kind=Gd p=3 d=1"] {
        let g = build(desc);
        let back = PGroup::from_cayley_table(&g.cayley_table_text(), DEFAULT_LIMIT).unwrap();
        assert_eq!(back.order(), g.order());
        assert!(is_isomorphic(&g, &back).unwrap(), "{desc}");
    }
}

#[test]
fn table_input_feeds_minimal_quotient() {
    let g = build("kind=H p=3 n=1 d=1 * kind=C p=3 d=1");
    let from_table = PGroup::from_cayley_table(&g.cayley_table_text(), DEFAULT_LIMIT).unwrap();
    let q = minimal_nonabelian_quotient(&from_table).unwrap();
    assert_eq!(q.kernel.order(), 3);
    assert_eq!(q.class.to_string(), "H n=1 d=1");
    assert!(is_isomorphic(&q.quotient, &build("kind=H p=3 n=1 d=1")).unwrap());
}

#[test]
fn descriptors_round_trip() {
    for text in ["kind=H p=5 n=2 d=1", "kind=C p=3 d=2 * kind=A p=3 n=1 d=1", "kind=H p=3 n=1 d=1 o kind=H p=3 n=1 d=1"]
    {
        let d: GroupDescriptor = text.parse().unwrap();
        assert_eq!(d.to_string(), text);
    }
    assert!(matches!("kind=Q p=3".parse::<GroupDescriptor>(), Err(GroupError::Parse(_))));
}

#[test]
fn malformed_tables_are_rejected() {
    assert!(PGroup::from_cayley_table("0 1\n1 1\n", DEFAULT_LIMIT).is_err());
    assert!(PGroup::from_cayley_table("0 1 2 3\n1 0 3 2\n2 3 0 1\n3 2 1 0\n", DEFAULT_LIMIT).is_err());
}

#[test]
fn heisenberg_and_metacyclic_differ() {
    for d in 1..=2 {
        let h = make_group(FamilyKind::H, 3, 1, d, DEFAULT_LIMIT).unwrap();
        let a = make_group(FamilyKind::A, 3, 1, d, DEFAULT_LIMIT).unwrap();
        assert!(!is_isomorphic(&h, &a).unwrap());
        assert_eq!(classify_minimal(&a).unwrap().kind, FamilyKind::A);
    }
}

fn h22() -> &'static PGroup {
    static G: OnceLock<PGroup> = OnceLock::new();
    G.get_or_init(|| make_group(FamilyKind::H, 3, 2, 2, DEFAULT_LIMIT).unwrap())
}

fn word() -> impl Strategy<Value = String> {
    prop::collection::vec((prop::sample::select(vec!["x1", "x2", "y1", "y2", "z"]), -4i64..5), 1..5)
        .prop_map(|parts| parts.iter().map(|(g, e)| format!("{g}^{e}")).collect::<Vec<_>>().join("*"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// In H(2,2): (uv)^-1 = v^-1 u^-1, x^|G| = 1, and commutators are central.
    #[test]
    fn word_arithmetic(u in word(), v in word()) {
        let g = h22();
        let (x, y) = (g.parse_word(&u).unwrap(), g.parse_word(&v).unwrap());
        prop_assert_eq!(g.inv(g.mul(x, y)), g.mul(g.inv(y), g.inv(x)));
        prop_assert_eq!(g.pow(x, g.order() as i64), 0);
        prop_assert!(g.is_central(g.commutator(x, y)));
    }
}
