//! Control measures, orthogonal subfamilies, separating elements and
//! singular witness sequences.

use num_traits::{One, Zero};

use crate::charge::{is_absolutely_continuous, is_singular, Charge, ChargeFamily};
use crate::epset::{EpSet, Universe};
use crate::rational::{inverse_power_of_two, power_of_two, Rational};
use crate::seq::{limsup_functional, CoordinateRule, ElementSequence};
use crate::subalgebra::FiniteSubalgebra;
use crate::{Error, Result};

/// One summand `coefficient · μ_member` of a control measure; `position`
/// is the 1-based place of the member in the series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlTerm {
    pub member: usize,
    pub position: usize,
    pub coefficient: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlMeasure {
    pub measure: Charge,
    pub terms: Vec<ControlTerm>,
}

impl ControlMeasure {
    /// `2^n (1 + ‖μ_n‖)`, the factor with `μ_n ≤ factor · μ₀`.
    pub fn modulus(&self, member: &Charge, position: usize) -> Rational {
        power_of_two(position) * (Rational::one() + member.norm())
    }
}

/// `μ₀ = Σ_n 2^-n μ_n / (1 + ‖μ_n‖)` with `n` running over the positions
/// `1, 2, …` of `ordering` (the input order when `None`). The result
/// depends on the ordering.
pub fn control_measure(family: &[Charge], ordering: Option<&[usize]>) -> Result<ControlMeasure> {
    let universe = family.first().map_or(Universe::Naturals, Charge::universe);
    let order: Vec<usize> = match ordering {
        Some(o) => {
            let mut seen = vec![false; family.len()];
            for &i in o {
                if i >= family.len() || std::mem::replace(&mut seen[i], true) {
                    return Err(Error::Precondition(format!("ordering is not a permutation of 0..{}", family.len())));
                }
            }
            if o.len() != family.len() {
                return Err(Error::Precondition(format!("ordering is not a permutation of 0..{}", family.len())));
            }
            o.to_vec()
        }
        None => (0..family.len()).collect(),
    };
    let mut measure = Charge::zero(universe);
    let mut terms = Vec::with_capacity(order.len());
    for (pos, &member) in order.iter().enumerate() {
        let mu = &family[member];
        universe.check(mu.universe())?;
        let position = pos + 1;
        let coefficient = inverse_power_of_two(position) / (Rational::one() + mu.norm());
        measure = measure.add(&mu.scale(&coefficient)?)?;
        terms.push(ControlTerm { member, position, coefficient });
    }
    Ok(ControlMeasure { measure, terms })
}

/// Greedy maximal pairwise-singular subfamily, in input order. Returns
/// member indices.
pub fn maximal_orthogonal_subfamily(family: &[Charge]) -> Result<Vec<usize>> {
    if let Some(i) = family.iter().position(Charge::is_zero) {
        return Err(Error::Precondition(format!("member {i} is the zero charge")));
    }
    let mut chosen: Vec<usize> = Vec::new();
    for (i, mu) in family.iter().enumerate() {
        let mut orthogonal = true;
        for &j in &chosen {
            if !is_singular(mu, &family[j])? {
                orthogonal = false;
                break;
            }
        }
        if orthogonal {
            chosen.push(i);
        }
    }
    Ok(chosen)
}

/// The smallest `x₀ ∈ F` (by atom count, then element index) with
/// `x ∖ x₀ ∉ G` for every `x ∈ G`. Requires `G` nonempty, `G ⊆ F`,
/// `0 ∉ F` and `F` upward closed; violations name the offending element.
pub fn find_separating_element(
    algebra: &FiniteSubalgebra,
    in_f: impl Fn(&EpSet) -> bool,
    in_g: impl Fn(&EpSet) -> bool,
) -> Result<usize> {
    let elements = algebra.elements();
    let f: Vec<bool> = elements.iter().map(&in_f).collect();
    let g: Vec<bool> = elements.iter().map(&in_g).collect();
    if f[algebra.zero_index()] {
        return Err(Error::Precondition("F contains the zero element".into()));
    }
    if !g.iter().any(|&b| b) {
        return Err(Error::Precondition("G is empty".into()));
    }
    if let Some(i) = (0..elements.len()).find(|&i| g[i] && !f[i]) {
        return Err(Error::Precondition(format!("element {{{}}} is in G but not in F", elements[i])));
    }
    for x in (0..elements.len()).filter(|&x| f[x]) {
        if let Some(y) = (0..elements.len()).find(|&y| algebra.is_below(x, y) && !f[y]) {
            return Err(Error::Precondition(format!(
                "F is not upward closed: {{{}}} is in F but {{{}}} is not",
                elements[x], elements[y]
            )));
        }
    }
    let mut candidates: Vec<usize> = (0..elements.len()).filter(|&i| f[i]).collect();
    candidates.sort_by_key(|&i| (algebra.atom_count(i), i));
    candidates
        .into_iter()
        .find(|&c| (0..elements.len()).filter(|&x| g[x]).all(|x| !g[algebra.difference_index(x, c)]))
        .ok_or_else(|| Error::Internal("no separating element although the unit lies in F".into()))
}

/// A decreasing sequence carrying almost all of ν in the limit while every
/// family member has limit zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularWitness {
    pub sequence: ElementSequence,
    /// `lim_n ν(τ(n))`.
    pub nu_limit: Rational,
    /// `sup_μ lim_n μ(τ(n))` over the family.
    pub family_limit: Rational,
}

/// Builds τ for a charge ν singular to every family member. Atoms of ν are
/// kept; ν's density support loses the family's atoms (a finite list) or,
/// for point masses on `S`, the points of `S` already passed by the index.
pub fn singular_witness_sequence(nu: &Charge, family: &ChargeFamily, t: &Rational) -> Result<SingularWitness> {
    if *t <= Rational::zero() || *t >= Rational::one() {
        return Err(Error::Precondition("t must lie strictly between 0 and 1".into()));
    }
    let u = nu.universe();
    let sequence = match family {
        ChargeFamily::Finite(list) => {
            for (i, mu) in list.iter().enumerate() {
                u.check(mu.universe())?;
                if !is_singular(mu, nu)? {
                    return Err(Error::NotSingular { member: i });
                }
            }
            let mut family_atoms = EpSet::empty(u);
            for mu in list {
                family_atoms = family_atoms.join(&mu.atom_support())?;
            }
            let keep = nu.atom_support().join(&nu.density_support().difference(&family_atoms)?)?;
            ElementSequence::constant(keep)
        }
        ChargeFamily::PointMasses(support) => {
            u.check(support.universe())?;
            if let Some(&x) = nu.atoms().keys().find(|&&x| support.contains(x)) {
                return Err(Error::NotSingular { member: x });
            }
            let atoms = nu.atom_support();
            let dens = nu.density_support();
            let left = atoms.join(&dens.difference(support)?)?;
            let right = atoms.join(&dens)?;
            ElementSequence::from_rules(vec![], vec![CoordinateRule::split(left, right)?])?
        }
    };
    let nu_limit = limsup_functional(nu, &sequence)?;
    let family_limit = family.sup_limsup(&sequence)?;
    Ok(SingularWitness { sequence, nu_limit, family_limit })
}

/// Whether every member is absolutely continuous with respect to `mu0`.
pub fn dominates_all(mu0: &Charge, family: &[Charge]) -> Result<bool> {
    for mu in family {
        if !is_absolutely_continuous(mu, mu0)?.holds() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const N: Universe = Universe::Naturals;

    fn density_on(set: EpSet, c: Rational) -> Charge {
        Charge::density(c, set).unwrap()
    }

    #[test]
    fn control_examples() {
        let m1 = density_on(EpSet::naturals(), ratio(1, 1));
        let m2 = density_on(EpSet::naturals(), ratio(3, 1));
        let c = control_measure(&[m1.clone(), m2.clone()], None).unwrap();
        assert_eq!(c.terms[0].coefficient, ratio(1, 4));
        assert_eq!(c.terms[1].coefficient, ratio(1, 16));
        let want = m1.scale(&ratio(1, 4)).unwrap().add(&m2.scale(&ratio(1, 16)).unwrap()).unwrap();
        assert_eq!(c.measure, want);
        assert!(dominates_all(&c.measure, &[m1.clone(), m2]).unwrap());

        let single = control_measure(std::slice::from_ref(&m1), None).unwrap();
        assert_eq!(single.measure, m1.scale(&ratio(1, 4)).unwrap());
        assert!(control_measure(&[], None).unwrap().measure.is_zero());
        assert!(control_measure(std::slice::from_ref(&m1), Some(&[1])).is_err());
        assert!(control_measure(&[m1.clone(), m1], Some(&[0, 0])).is_err());
    }

    #[test]
    fn control_ordering_matters() {
        let a = Charge::point_mass(N, 0).unwrap();
        let b = Charge::point_mass(N, 1).unwrap();
        let x = control_measure(&[a.clone(), b.clone()], Some(&[0, 1])).unwrap();
        let y = control_measure(&[a, b], Some(&[1, 0])).unwrap();
        assert_ne!(x.measure, y.measure);
        assert_eq!(y.terms[0].member, 1);
    }

    #[test]
    fn orthogonal_examples() {
        let d0 = Charge::point_mass(N, 0).unwrap();
        let d1 = Charge::point_mass(N, 1).unwrap();
        let both = d0.add(&d1).unwrap();
        assert_eq!(maximal_orthogonal_subfamily(&[d0.clone(), d1.clone(), both]).unwrap(), vec![0, 1]);
        assert_eq!(maximal_orthogonal_subfamily(std::slice::from_ref(&d0)).unwrap(), vec![0]);
        assert!(maximal_orthogonal_subfamily(&[d0, Charge::zero(N)]).is_err());
    }

    fn finite3() -> FiniteSubalgebra {
        let u = Universe::Finite(3);
        let gens: Vec<EpSet> = (0..3).map(|p| EpSet::singleton(u, p).unwrap()).collect();
        FiniteSubalgebra::generate(&gens).unwrap()
    }

    fn count(a: &EpSet) -> usize {
        a.cardinality().unwrap()
    }

    #[test]
    fn separator_examples() {
        let alg = finite3();
        // points 0, 1, 2 stand for 1, 2, 3
        let big = |a: &EpSet| count(a) >= 2;
        let x0 = find_separating_element(&alg, big, big).unwrap();
        assert_eq!(alg.elements()[x0], EpSet::finite(Universe::Finite(3), &[0, 1]).unwrap());
        let has0 = |a: &EpSet| a.contains(0);
        let x0 = find_separating_element(&alg, has0, has0).unwrap();
        assert_eq!(alg.elements()[x0], EpSet::singleton(Universe::Finite(3), 0).unwrap());
        let top = |a: &EpSet| a.is_full();
        assert_eq!(find_separating_element(&alg, top, top).unwrap(), alg.one_index());
    }

    #[test]
    fn separator_preconditions() {
        let alg = finite3();
        let any = |_: &EpSet| true;
        assert!(find_separating_element(&alg, any, any).is_err());
        let none = |_: &EpSet| false;
        let big = |a: &EpSet| count(a) >= 2;
        assert!(find_separating_element(&alg, big, none).is_err());
        let exactly_two = |a: &EpSet| count(a) == 2;
        assert!(find_separating_element(&alg, exactly_two, exactly_two).is_err());
        let small = |a: &EpSet| count(a) == 3;
        assert!(find_separating_element(&alg, small, big).is_err());
    }

    #[test]
    fn singular_witness_examples() {
        let d = density_on(EpSet::naturals(), ratio(1, 1));
        let zero =
            singular_witness_sequence(&Charge::zero(N), &ChargeFamily::Finite(vec![d.clone()]), &ratio(1, 2)).unwrap();
        assert!(zero.sequence.is_zero());

        let delta = Charge::point_mass(N, 0).unwrap();
        let w = singular_witness_sequence(&delta, &ChargeFamily::Finite(vec![d.clone()]), &ratio(1, 2)).unwrap();
        assert_eq!(w.sequence, ElementSequence::constant(EpSet::singleton(N, 0).unwrap()));
        assert_eq!(w.nu_limit, ratio(1, 1));
        assert_eq!(w.family_limit, ratio(0, 1));

        let evens = density_on(EpSet::evens(), ratio(1, 1));
        let odds = density_on(EpSet::odds(), ratio(1, 1));
        let w = singular_witness_sequence(&evens, &ChargeFamily::Finite(vec![odds]), &ratio(1, 3)).unwrap();
        assert_eq!(w.sequence, ElementSequence::constant(EpSet::evens()));

        assert_eq!(
            singular_witness_sequence(&d, &ChargeFamily::Finite(vec![delta, d.clone()]), &ratio(1, 2)).unwrap_err(),
            Error::NotSingular { member: 1 }
        );
        assert!(singular_witness_sequence(&d, &ChargeFamily::Finite(vec![]), &ratio(1, 1)).is_err());
    }

    #[test]
    fn singular_witness_point_masses() {
        let nu = density_on(EpSet::naturals(), ratio(1, 1)).add(&Charge::point_mass(N, 1).unwrap()).unwrap();
        let fam = ChargeFamily::point_masses(EpSet::evens()).unwrap();
        let w = singular_witness_sequence(&nu, &fam, &ratio(1, 2)).unwrap();
        assert!(w.sequence.is_decreasing().unwrap());
        assert_eq!(w.nu_limit, nu.norm());
        assert_eq!(w.family_limit, ratio(0, 1));
        let bad = Charge::point_mass(N, 4).unwrap();
        assert_eq!(singular_witness_sequence(&bad, &fam, &ratio(1, 2)).unwrap_err(), Error::NotSingular { member: 4 });
    }
}
