//! Inputs shared by the benchmarks.

use charge_lab::{ratio, Branch, Charge, ElementSequence, EpSet, Member, Universe};

/// The residue classes `{k : k ≡ r mod m}` for `r < m`.
pub fn residue_classes(modulus: usize) -> Vec<EpSet> {
    (0..modulus).map(|r| EpSet::residue_class(r, modulus).expect("modulus ≥ 1")).collect()
}

/// A set with a `prefix_len`-bit prefix and a sparse pattern of the given period.
pub fn sparse_set(prefix_len: usize, period: usize) -> EpSet {
    EpSet::from_fn(Universe::Naturals, prefix_len, period, |k| k % 3 == 0 || k % period == 1).expect("period ≥ 1")
}

/// Atoms on the first `atoms` points plus one density component per
/// residue class mod `modulus`, with distinct weights.
pub fn mixed_charge(atoms: usize, modulus: usize) -> Charge {
    let atom_list = (0..atoms).map(|p| (p, ratio(1, p as i64 + 2)));
    let dens = residue_classes(modulus).into_iter().enumerate().map(|(r, c)| (ratio(r as i64 + 1, 7), c));
    Charge::new(Universe::Naturals, atom_list, dens).expect("valid charge")
}

/// Alternating between two sets, after a short prefix.
pub fn alternating_sequence(a: &EpSet, b: &EpSet) -> ElementSequence {
    ElementSequence::from_coordinates(vec![EpSet::naturals()], vec![a.clone(), b.clone()]).expect("same universe")
}

/// Tails of `k` almost disjoint branches followed by the tails of the
/// residue classes mod 4 that avoid all of them.
pub fn census_family(branches: &[Branch]) -> Vec<Member> {
    let mut family: Vec<Member> = branches.iter().cloned().map(Member::BranchTail).collect();
    for class in residue_classes(4) {
        if branches.iter().all(|b| !b.meets_infinitely(&class)) {
            family.push(Member::Sequence(ElementSequence::tails(&class)));
        }
    }
    family
}
