mod common;

use charge_lab::{
    almost_disjoint_family, cc_predicate, quasi_disjoint_census, ratio, tail_sequence, Branch, Charge, ChargeFamily,
    ElementSequence, EpSet, Member, Rational, SetDescriptor, Universe,
};
use common::*;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

/// Codes of the first `len` prefixes of the word, as exact integers.
fn big_codes(b: &Branch, len: usize) -> Vec<BigInt> {
    let mut c = BigInt::from(1);
    let mut out = vec![c.clone()];
    for m in 0..len {
        c = c * 2 + u8::from(b.bit(m));
        out.push(c.clone());
    }
    out
}

/// Membership of an arbitrarily large integer in `s`.
fn contains_big(s: &EpSet, c: &BigInt) -> bool {
    match c.to_usize() {
        Some(k) if k < s.prefix_len() => s.contains(k),
        _ => {
            let p = s.period();
            let r = (c % p).to_usize().unwrap();
            s.contains(s.prefix_len() + (r + p - s.prefix_len() % p) % p)
        }
    }
}

fn arb_branch() -> impl Strategy<Value = Branch> {
    (prop::collection::vec(any::<bool>(), 0..4), prop::collection::vec(any::<bool>(), 1..6))
        .prop_map(|(p, q)| Branch::new(p, q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn infinite_meets_match_exact_codes(b in arb_branch(), s in arb_set()) {
        // beyond the transient of the (word position, residue) automaton,
        // hits recur within every window of its size
        let codes = big_codes(&b, 300);
        let late = codes[150..].iter().any(|c| contains_big(&s, c));
        prop_assert_eq!(b.meets_infinitely(&s), late);
    }

    #[test]
    fn branches_round_trip_and_contain_their_codes(b in arb_branch()) {
        prop_assert_eq!(b.to_string().parse::<Branch>().unwrap(), b.clone());
        for c in big_codes(&b, 18) {
            prop_assert!(b.contains(c.to_usize().unwrap()));
        }
        prop_assert_eq!(b.elements_below(1 << 19).len(), 19);
    }

    #[test]
    fn census_respects_the_counting_bound(
        chosen in prop::collection::btree_set(0usize..16, 0..6),
        residues in prop::collection::btree_set(0usize..6, 0..4),
        points in prop::collection::btree_set(0usize..30, 0..3),
        nu in arb_charge(),
        e in 1i64..6,
    ) {
        let branches = almost_disjoint_family(16).unwrap();
        let mut family: Vec<Member> = chosen.iter().map(|&i| Member::BranchTail(branches[i].clone())).collect();
        for &r in &residues {
            family.push(tail_sequence(&SetDescriptor::Set(EpSet::residue_class(r, 6).unwrap())).unwrap());
        }
        for &x in &points {
            family.push(Member::Sequence(ElementSequence::constant(EpSet::singleton(Universe::Naturals, x).unwrap())));
        }
        // keep a pairwise quasi-disjoint subfamily
        let mut kept: Vec<Member> = Vec::new();
        for m in family {
            if kept.iter().all(|k| k.quasi_disjoint(&m).unwrap()) {
                kept.push(m);
            }
        }
        let eps = ratio(1, e);
        let report = quasi_disjoint_census(&kept, &nu, &eps).unwrap();
        let mut total = Rational::zero();
        for (i, m) in kept.iter().enumerate() {
            let v = match m {
                Member::Sequence(s) => brute_limsup(&nu, s),
                Member::BranchTail(_) => Rational::zero(),
            };
            prop_assert_eq!(&report.values[i], &v);
            prop_assert_eq!(report.heavy.contains(&i), v >= eps);
            total += v;
        }
        prop_assert_eq!(&report.total, &total);
        prop_assert!(total <= nu.norm());
        let floor = (nu.norm() / &eps).floor().to_integer();
        prop_assert_eq!(&report.bound, &floor);
        prop_assert!(BigInt::from(report.heavy.len()) <= floor);
    }

    #[test]
    fn cc_predicate_matches_evaluation(
        members in prop::collection::vec(arb_finite_charge(8), 1..4),
        assignment in prop::collection::vec(0usize..4, 8),
    ) {
        let elements: Vec<EpSet> = (0..4)
            .map(|c| EpSet::from_bits((0..8).map(|p| assignment[p] == c).collect()))
            .filter(|e| !e.is_empty())
            .collect();
        let expected = elements.iter().all(|a| members.iter().any(|m| !brute_eval(m, a).is_zero()));
        prop_assert_eq!(cc_predicate(&elements, &ChargeFamily::Finite(members)).unwrap(), expected);
    }
}

#[test]
fn almost_disjoint_intersections_by_enumeration() {
    for k in 1..=16 {
        let family = almost_disjoint_family(k).unwrap();
        let listed: Vec<Vec<usize>> = family.iter().map(|b| b.elements_below(1 << 22)).collect();
        for i in 0..k {
            for j in i + 1..k {
                let common = listed[i].iter().filter(|x| listed[j].contains(x)).count();
                assert_eq!(common, i + 1);
                assert_eq!(family[i].intersection_size(&family[j]), Some(common));
                assert!(!family[i].contains(*listed[j].last().unwrap()));
            }
        }
    }
    assert!(almost_disjoint_family(0).is_err());
    assert!(almost_disjoint_family(65).is_err());
}

#[test]
fn overlapping_members_are_rejected() {
    let b: Branch = "branch=(01)".parse().unwrap();
    let odd_tail = tail_sequence(&SetDescriptor::Set(EpSet::residue_class(1, 4).unwrap())).unwrap();
    let nu = Charge::density(ratio(1, 1), EpSet::naturals()).unwrap();
    assert!(quasi_disjoint_census(&[Member::BranchTail(b), odd_tail], &nu, &ratio(1, 2)).is_err());
    assert!(tail_sequence(&SetDescriptor::Set(EpSet::finite(Universe::Naturals, &[3]).unwrap())).is_err());
}
