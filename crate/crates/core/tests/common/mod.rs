//! Strategies and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use charge_lab::seq::CoordinateRule;
use charge_lab::{ratio, Charge, ElementSequence, EpSet, Rational, Universe};
use num_traits::Zero;
use proptest::prelude::*;

pub const N: Universe = Universe::Naturals;

/// Membership by prefix bits, then `pattern[k mod len]`.
pub fn set_from_parts(prefix: &[bool], pattern: &[bool]) -> EpSet {
    let (p, per) = (prefix.len(), pattern.len());
    EpSet::from_fn(N, p, per, |k| if k < p { prefix[k] } else { pattern[k % per] }).unwrap()
}

pub fn arb_set() -> impl Strategy<Value = EpSet> {
    (prop::collection::vec(any::<bool>(), 0..6), prop::collection::vec(any::<bool>(), 1..7))
        .prop_map(|(a, b)| set_from_parts(&a, &b))
}

pub fn arb_infinite_set() -> impl Strategy<Value = EpSet> {
    (prop::collection::vec(any::<bool>(), 0..4), prop::collection::vec(any::<bool>(), 1..7), 0usize..6).prop_map(
        |(a, mut b, i)| {
            let len = b.len();
            b[i % len] = true;
            set_from_parts(&a, &b)
        },
    )
}

pub fn arb_weight() -> impl Strategy<Value = Rational> {
    (1i64..6, 1i64..5).prop_map(|(p, q)| ratio(p, q))
}

pub fn arb_charge() -> impl Strategy<Value = Charge> {
    (
        prop::collection::vec((0usize..12, arb_weight()), 0..3),
        prop::collection::vec((arb_weight(), arb_infinite_set()), 0..3),
    )
        .prop_map(|(atoms, dens)| Charge::new(N, atoms, dens).unwrap())
}

pub fn arb_bits(n: usize) -> impl Strategy<Value = EpSet> {
    prop::collection::vec(any::<bool>(), n).prop_map(EpSet::from_bits)
}

/// Atoms with weights in {0, 1/2, 1, 2} on a finite universe.
pub fn arb_finite_charge(n: usize) -> impl Strategy<Value = Charge> {
    prop::collection::vec(0u8..4, n).prop_map(move |w| {
        let weights = [ratio(0, 1), ratio(1, 2), ratio(1, 1), ratio(2, 1)];
        Charge::new(Universe::Finite(n), w.iter().enumerate().map(|(p, &i)| (p, weights[i as usize].clone())), [])
            .unwrap()
    })
}

pub fn arb_rule() -> impl Strategy<Value = CoordinateRule> {
    prop_oneof![
        arb_set().prop_map(CoordinateRule::constant),
        (arb_set(), arb_set()).prop_map(|(l, r)| CoordinateRule::split(l, r).unwrap()),
        (arb_set(), arb_set(), arb_set(), arb_set())
            .prop_map(|(l, a, b, r)| CoordinateRule::new(l, vec![a, b], r).unwrap()),
    ]
}

pub fn arb_sequence() -> impl Strategy<Value = ElementSequence> {
    (prop::collection::vec(arb_set(), 0..3), prop::collection::vec(arb_rule(), 1..3))
        .prop_map(|(p, r)| ElementSequence::from_rules(p, r).unwrap())
}

/// Density of `a ∩ c` by counting over `period(a) · period(c)` points past
/// both prefixes.
pub fn brute_overlap(a: &EpSet, c: &EpSet) -> Rational {
    let l = a.period() * c.period();
    let start = a.prefix_len().max(c.prefix_len());
    let count = (start..start + l).filter(|&k| a.contains(k) && c.contains(k)).count();
    ratio(count as i64, l as i64)
}

/// `μ(a)` from the atom map and the density components, by counting.
pub fn brute_eval(m: &Charge, a: &EpSet) -> Rational {
    let mut v: Rational = m.atoms().iter().filter(|(p, _)| a.contains(**p)).map(|(_, w)| w).sum();
    if let Universe::Naturals = a.universe() {
        for c in m.densities() {
            v += c.coefficient() * brute_overlap(a, c.carrier());
        }
    }
    v
}

/// `max_{n ∈ [from, from + period)} m(σ(n))` by evaluating coordinates.
pub fn brute_limsup(m: &Charge, s: &ElementSequence) -> Rational {
    let from = s.prefix_len() + m.max_atom().map_or(0, |x| x + 1) + 2 * s.window() + 2 * s.period() + 8;
    let mut best = Rational::zero();
    for n in from..from + s.period() {
        best = best.max(brute_eval(m, &s.coordinate(n).unwrap()));
    }
    best
}

/// All subsets of a finite universe of `n` points.
pub fn all_subsets(n: usize) -> Vec<EpSet> {
    (0u32..1 << n).map(|mask| EpSet::from_bits((0..n).map(|i| mask & (1 << i) != 0).collect())).collect()
}
