//! Finite Boolean subalgebras generated by at most four sets.

use crate::epset::{EpSet, Universe};
use crate::{Error, Result};

pub const MAX_GENERATORS: usize = 4;

/// The Boolean subalgebra generated by a short list of sets, with every
/// element materialized. Elements are unions of the atoms of the partition
/// cut out by the generators; element `i` is the union of the atoms whose
/// bits are set in `masks[i]`.
#[derive(Clone, Debug)]
pub struct FiniteSubalgebra {
    universe: Universe,
    generators: Vec<EpSet>,
    atoms: Vec<EpSet>,
    elements: Vec<EpSet>,
    masks: Vec<u32>,
}

impl FiniteSubalgebra {
    /// Generates over the universe of the first generator (ℕ when empty).
    pub fn generate(generators: &[EpSet]) -> Result<FiniteSubalgebra> {
        let universe = generators.first().map_or(Universe::Naturals, |g| g.universe());
        FiniteSubalgebra::generate_in(universe, generators)
    }

    pub fn generate_in(universe: Universe, generators: &[EpSet]) -> Result<FiniteSubalgebra> {
        if generators.len() > MAX_GENERATORS {
            return Err(Error::TooManyGenerators { given: generators.len(), max: MAX_GENERATORS });
        }
        for g in generators {
            universe.check(g.universe())?;
        }
        let mut atoms = Vec::new();
        for signs in 0u32..(1 << generators.len()) {
            let mut atom = EpSet::full(universe);
            for (i, g) in generators.iter().enumerate() {
                atom = if signs & (1 << i) != 0 { atom.meet(g)? } else { atom.difference(g)? };
            }
            if !atom.is_empty() {
                atoms.push(atom);
            }
        }
        let mut elements = Vec::with_capacity(1 << atoms.len());
        let mut masks = Vec::with_capacity(1 << atoms.len());
        for mask in 0u32..(1 << atoms.len()) {
            let mut e = EpSet::empty(universe);
            for (j, a) in atoms.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    e = e.join(a)?;
                }
            }
            elements.push(e);
            masks.push(mask);
        }
        Ok(FiniteSubalgebra { universe, generators: generators.to_vec(), atoms, elements, masks })
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn generators(&self) -> &[EpSet] {
        &self.generators
    }

    pub fn atoms(&self) -> &[EpSet] {
        &self.atoms
    }

    pub fn elements(&self) -> &[EpSet] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Number of atoms below element `index`.
    pub fn atom_count(&self, index: usize) -> usize {
        self.masks[index].count_ones() as usize
    }

    pub fn index_of(&self, set: &EpSet) -> Option<usize> {
        self.elements.iter().position(|e| e == set)
    }

    pub fn contains(&self, set: &EpSet) -> bool {
        self.index_of(set).is_some()
    }

    /// Index of `a ∖ b` for two element indices.
    pub fn difference_index(&self, a: usize, b: usize) -> usize {
        let mask = self.masks[a] & !self.masks[b];
        // masks enumerate 0..2^atoms in order, so the mask is the index
        mask as usize
    }

    /// Whether element `a` is below element `b`.
    pub fn is_below(&self, a: usize, b: usize) -> bool {
        self.masks[a] & !self.masks[b] == 0
    }

    pub fn zero_index(&self) -> usize {
        0
    }

    pub fn one_index(&self) -> usize {
        self.elements.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// Closure of a list of sets under meet, join and complement by fixpoint
    /// iteration, independent of the atom construction.
    fn closure(universe: Universe, gens: &[EpSet]) -> BTreeSet<EpSet> {
        let mut set: BTreeSet<EpSet> = gens.iter().cloned().collect();
        set.insert(EpSet::empty(universe));
        set.insert(EpSet::full(universe));
        loop {
            let items: Vec<EpSet> = set.iter().cloned().collect();
            let mut next = set.clone();
            for a in &items {
                next.insert(a.complement());
                for b in &items {
                    next.insert(a.meet(b).unwrap());
                    next.insert(a.join(b).unwrap());
                }
            }
            if next.len() == set.len() {
                return set;
            }
            set = next;
        }
    }

    #[test]
    fn trivial_algebra() {
        let a = FiniteSubalgebra::generate(&[]).unwrap();
        assert_eq!(a.elements(), &[EpSet::empty(Universe::Naturals), EpSet::naturals()]);
    }

    #[test]
    fn one_generator() {
        let a = FiniteSubalgebra::generate(&[EpSet::evens()]).unwrap();
        let got: BTreeSet<EpSet> = a.elements().iter().cloned().collect();
        let want: BTreeSet<EpSet> =
            [EpSet::empty(Universe::Naturals), EpSet::evens(), EpSet::odds(), EpSet::naturals()].into_iter().collect();
        assert_eq!(got, want);
    }

    #[test]
    fn evens_and_multiples_of_three() {
        let gens = [EpSet::evens(), EpSet::multiples(3).unwrap()];
        let a = FiniteSubalgebra::generate(&gens).unwrap();
        assert_eq!(a.atoms().len(), 4);
        assert_eq!(a.len(), 16);
        let got: BTreeSet<EpSet> = a.elements().iter().cloned().collect();
        assert_eq!(got, closure(Universe::Naturals, &gens));
    }

    #[test]
    fn closure_of_elements_is_idempotent() {
        let gens =
            [EpSet::evens(), EpSet::tail(Universe::Naturals, 3), EpSet::finite(Universe::Naturals, &[0, 5]).unwrap()];
        let a = FiniteSubalgebra::generate(&gens).unwrap();
        let elems: BTreeSet<EpSet> = a.elements().iter().cloned().collect();
        assert_eq!(elems.len(), a.len());
        let items: Vec<EpSet> = elems.iter().cloned().collect();
        assert_eq!(closure(Universe::Naturals, &items), elems);
    }

    #[test]
    fn too_many_generators() {
        let g = vec![EpSet::evens(); 5];
        assert_eq!(FiniteSubalgebra::generate(&g).unwrap_err(), Error::TooManyGenerators { given: 5, max: 4 });
    }

    #[test]
    fn index_helpers() {
        let u = Universe::Finite(3);
        let gens: Vec<EpSet> = (0..3).map(|p| EpSet::singleton(u, p).unwrap()).collect();
        let a = FiniteSubalgebra::generate(&gens).unwrap();
        assert_eq!(a.len(), 8);
        let x = a.index_of(&EpSet::finite(u, &[0, 1]).unwrap()).unwrap();
        let y = a.index_of(&EpSet::finite(u, &[1]).unwrap()).unwrap();
        assert_eq!(a.elements()[a.difference_index(x, y)], EpSet::finite(u, &[0]).unwrap());
        assert!(a.is_below(y, x));
        assert_eq!(a.atom_count(x), 2);
        assert!(a.elements()[a.one_index()].is_full());
    }
}
