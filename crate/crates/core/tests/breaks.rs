use proptest::prelude::*;
use ramforge::ramcalc::{fact1_resolve, BreakMultiset, Rational};

fn lower() -> impl Strategy<Value = BreakMultiset> {
    (
        prop::sample::select(vec![1u64, 2, 4]),
        prop::sample::select(vec![3u64, 5]),
        1i64..30,
        prop::collection::vec(0i64..40, 0..6),
    )
        .prop_map(|(m, p, first, gaps)| {
            let mut breaks = vec![first];
            for g in gaps {
                breaks.push(breaks.last().unwrap() + g);
            }
            BreakMultiset::lower(m, p, breaks).unwrap()
        })
}

fn upper_p3() -> impl Strategy<Value = BreakMultiset> {
    lower()
        .prop_filter("m = 1, p = 3", |l| l.tame_degree() == 1 && l.prime() == 3)
        .prop_map(|l| l.lower_to_upper().unwrap())
}

proptest! {
    #[test]
    fn herbrand_round_trip(l in lower()) {
        prop_assert_eq!(l.lower_to_upper().unwrap().upper_to_lower().unwrap(), l);
    }

    #[test]
    fn upper_breaks_are_nondecreasing_with_first_b1_over_m(l in lower()) {
        let u = l.lower_to_upper().unwrap();
        prop_assert!(u.breaks().windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(u.breaks()[0], l.breaks()[0] / Rational::from_integer(l.tame_degree() as i64));
    }

    #[test]
    fn fact1_tops_match_lower_breaks(base in upper_p3(), du in 1i64..30, dv in 1i64..30) {
        let top = base.max().unwrap();
        let u = top + Rational::new(du, 3);
        let v = u + Rational::new(dv, 3);
        prop_assume!(!base.contains(u) && !base.contains(v));
        if let Ok(r) = fact1_resolve(&base, u, v) {
            prop_assert_eq!(r.distinguished_top, r.lower_v);
            prop_assert_eq!(r.others_top, r.lower_u);
            prop_assert!(r.lower_u <= r.lower_v);
            prop_assert!(r.distinguished_upper.contains(u) && r.others_upper.contains(v));
        }
    }
}

#[test]
fn compose_is_commutative_on_disjoint_inputs() {
    let a: BreakMultiset = "upper m=1 p=3 : 1, 4".parse().unwrap();
    let b: BreakMultiset = "upper m=1 p=3 : 5, 8, 29/3".parse().unwrap();
    assert_eq!(a.compose_disjoint(&b).unwrap(), b.compose_disjoint(&a).unwrap());
    assert!(a.compose_disjoint(&a).is_err());
}
