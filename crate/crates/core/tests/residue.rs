use dashu_int::{IBig, UBig};
use flocksim::residue::{canonical_tree, degree_recurrence, oplus, ResidueError, SparsePoly, DEFAULT_EXPONENT_BITS};
use proptest::prelude::*;

const B: usize = DEFAULT_EXPONENT_BITS;

#[test]
fn canonical_levels_one_to_five() {
    let expected = degree_recurrence(5, B).unwrap();
    assert_eq!(expected[4], UBig::from(2059u32) + (UBig::ONE << 2059));
    for k in 1..=5u32 {
        let p = canonical_tree(k).unwrap().eval(B).unwrap();
        assert_eq!(p.len(), 1, "level {k} is not a monomial");
        let (e, c) = p.terms().next().unwrap();
        assert_eq!(*e, expected[k as usize - 1]);
        assert_eq!(c.clone() * c.clone(), IBig::from(1u64 << (2 * (k - 1))));
    }
}

#[test]
fn level_six_hits_the_budget() {
    let err = canonical_tree(6).unwrap().eval(B).unwrap_err();
    assert!(matches!(err, ResidueError::Overflow { .. }));
    assert!(err.to_string().contains("2060-bit"));
}

fn arb_poly() -> impl Strategy<Value = SparsePoly> {
    prop::collection::vec((0u32..12, -3i64..=3), 0..4).prop_map(|terms| {
        terms.into_iter().fold(SparsePoly::zero(), |acc, (e, c)| acc.add(&SparsePoly::monomial(c, e)))
    })
}

proptest! {
    #[test]
    fn degree_bound(p in arb_poly(), q in arb_poly()) {
        let r = oplus(&p, &q, B).unwrap();
        let swapped = oplus(&q, &p, B).unwrap();
        prop_assert_eq!(r.degree().ok(), swapped.degree().ok());
        let diff = p.sub(&q);
        if let Ok(h) = diff.low_degree() {
            let jump = UBig::ONE << usize::try_from(h).unwrap();
            let top = p.degree().ok().into_iter().chain(q.degree().ok()).max().cloned().unwrap_or(UBig::ZERO);
            let d = r.degree().unwrap().clone();
            prop_assert!(d <= &top + &jump);
            let shifted = diff.degree().unwrap() + &jump;
            let sum = p.add(&q);
            match sum.degree().ok() {
                Some(s) if *s == shifted => {}
                Some(s) => prop_assert_eq!(d, s.clone().max(shifted)),
                None => prop_assert_eq!(d, shifted),
            }
        }
    }
}
