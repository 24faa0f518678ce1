//! Seeded generators and brute-force oracles over the library types.

use charge_lab::seq::CoordinateRule;
use charge_lab::{ratio, Charge, ElementSequence, EpSet, Rational, Universe};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const N: Universe = Universe::Naturals;

pub fn zero() -> Rational {
    ratio(0, 1)
}

pub fn random_set(rng: &mut ChaCha8Rng) -> EpSet {
    let p = rng.gen_range(0..6);
    let prefix: Vec<bool> = (0..p).map(|_| rng.gen_bool(0.5)).collect();
    let per = rng.gen_range(1..7);
    let pattern: Vec<bool> = (0..per).map(|_| rng.gen_bool(0.5)).collect();
    EpSet::from_fn(N, p, per, |k| if k < p { prefix[k] } else { pattern[k % per] }).unwrap()
}

pub fn random_infinite_set(rng: &mut ChaCha8Rng) -> EpSet {
    loop {
        let s = random_set(rng);
        if s.is_infinite() {
            return s;
        }
    }
}

pub fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> EpSet {
    EpSet::from_bits((0..n).map(|_| rng.gen_bool(0.5)).collect())
}

pub fn random_weight(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(1..6), rng.gen_range(1..5))
}

pub fn random_charge(rng: &mut ChaCha8Rng) -> Charge {
    let atoms: Vec<(usize, Rational)> =
        (0..rng.gen_range(0..4)).map(|_| (rng.gen_range(0..12), random_weight(rng))).collect();
    let dens: Vec<(Rational, EpSet)> =
        (0..rng.gen_range(0..3)).map(|_| (random_weight(rng), random_infinite_set(rng))).collect();
    Charge::new(N, atoms, dens).unwrap()
}

pub fn random_nonzero_charge(rng: &mut ChaCha8Rng) -> Charge {
    loop {
        let m = random_charge(rng);
        if !m.is_zero() {
            return m;
        }
    }
}

/// Atoms with weights in {0, 1/2, 1, 2}, so null sets are common.
pub fn random_finite_charge(rng: &mut ChaCha8Rng, n: usize) -> Charge {
    let weights = [ratio(0, 1), ratio(1, 2), ratio(1, 1), ratio(2, 1)];
    Charge::new(Universe::Finite(n), (0..n).map(|p| (p, weights[rng.gen_range(0..4)].clone())), []).unwrap()
}

pub fn random_rule(rng: &mut ChaCha8Rng) -> CoordinateRule {
    match rng.gen_range(0..3) {
        0 => CoordinateRule::constant(random_set(rng)),
        1 => CoordinateRule::split(random_set(rng), random_set(rng)).unwrap(),
        _ => CoordinateRule::new(random_set(rng), vec![random_set(rng), random_set(rng)], random_set(rng)).unwrap(),
    }
}

pub fn random_sequence(rng: &mut ChaCha8Rng) -> ElementSequence {
    let prefix = (0..rng.gen_range(0..3)).map(|_| random_set(rng)).collect();
    let rules = (0..rng.gen_range(1..3)).map(|_| random_rule(rng)).collect();
    ElementSequence::from_rules(prefix, rules).unwrap()
}

/// Density of `a ∩ c` by counting one joint period past both prefixes.
pub fn brute_overlap(a: &EpSet, c: &EpSet) -> Rational {
    let l = a.period() * c.period();
    let start = a.prefix_len().max(c.prefix_len());
    let count = (start..start + l).filter(|&k| a.contains(k) && c.contains(k)).count();
    ratio(count as i64, l as i64)
}

pub fn brute_eval(m: &Charge, a: &EpSet) -> Rational {
    let mut v: Rational = m.atoms().iter().filter(|(p, _)| a.contains(**p)).map(|(_, w)| w).sum();
    if a.universe() == N {
        for c in m.densities() {
            v += c.coefficient() * brute_overlap(a, c.carrier());
        }
    }
    v
}

/// Coordinates far enough out that every phase shows its eventual value.
pub fn far_indices(m: &Charge, s: &ElementSequence) -> std::ops::Range<usize> {
    let from = s.prefix_len() + m.max_atom().map_or(0, |x| x + 1) + 2 * s.window() + 2 * s.period() + 8;
    from..from + s.period()
}

pub fn brute_limsup(m: &Charge, s: &ElementSequence) -> Rational {
    far_indices(m, s).map(|n| brute_eval(m, &s.coordinate(n).unwrap())).max().unwrap_or_else(zero)
}

pub fn all_subsets(n: usize) -> Vec<EpSet> {
    (0u32..1 << n).map(|mask| EpSet::from_bits((0..n).map(|i| mask & (1 << i) != 0).collect())).collect()
}

/// Whether `a ⊆ b`, by membership over a horizon covering both structures.
pub fn brute_subset(a: &EpSet, b: &EpSet) -> bool {
    let horizon = match a.universe() {
        Universe::Finite(n) => n,
        Universe::Naturals => a.prefix_len().max(b.prefix_len()) + a.period() * b.period(),
    };
    (0..horizon).all(|k| !a.contains(k) || b.contains(k))
}
