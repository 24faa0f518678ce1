//! Nonnegative charges: finitely many point masses plus finitely many
//! density components `c · d(· ∩ C)` with `C` an eventually periodic set.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};

use crate::epset::{checked_lcm, EpSet, Universe};
use crate::rational::{format_rational, integer, parse_rational, Rational};
use crate::seq::{limsup_functional, ElementSequence};
use crate::text::{fields, split_top, strip_delimited};
use crate::{Error, Result};

/// `coefficient · d(· ∩ carrier)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DensityComponent {
    coefficient: Rational,
    carrier: EpSet,
}

impl DensityComponent {
    pub fn coefficient(&self) -> &Rational {
        &self.coefficient
    }

    pub fn carrier(&self) -> &EpSet {
        &self.carrier
    }
}

/// A charge in canonical form: no zero atoms, and density components that
/// are the level sets of the periodic weight `r ↦ Σ c_j [r ∈ C_j]`, with
/// distinct positive coefficients and prefix-free carriers, sorted by
/// coefficient. Equal charges therefore have equal structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Charge {
    universe: Universe,
    atoms: BTreeMap<usize, Rational>,
    densities: Vec<DensityComponent>,
}

impl Charge {
    pub fn zero(universe: Universe) -> Charge {
        Charge { universe, atoms: BTreeMap::new(), densities: vec![] }
    }

    /// The Dirac mass at `point`.
    pub fn point_mass(universe: Universe, point: usize) -> Result<Charge> {
        Charge::atom(universe, point, integer(1))
    }

    pub fn atom(universe: Universe, point: usize, weight: Rational) -> Result<Charge> {
        Charge::new(universe, [(point, weight)], [])
    }

    /// `coefficient · d(· ∩ carrier)` over ℕ.
    pub fn density(coefficient: Rational, carrier: EpSet) -> Result<Charge> {
        Charge::new(carrier.universe(), [], [(coefficient, carrier)])
    }

    /// Sums the given atoms and density components. Repeated points add up.
    pub fn new(
        universe: Universe,
        atoms: impl IntoIterator<Item = (usize, Rational)>,
        densities: impl IntoIterator<Item = (Rational, EpSet)>,
    ) -> Result<Charge> {
        let mut atom_map: BTreeMap<usize, Rational> = BTreeMap::new();
        for (point, weight) in atoms {
            if weight.is_negative() {
                return Err(Error::Invariant(format!("negative weight {} at point {point}", format_rational(&weight))));
            }
            if !universe.contains_point(point) {
                return Err(Error::Invariant(format!("atom {point} lies outside the universe {universe}")));
            }
            *atom_map.entry(point).or_insert_with(Rational::zero) += weight;
        }
        atom_map.retain(|_, w| !w.is_zero());
        let mut components = Vec::new();
        for (coefficient, carrier) in densities {
            universe.check(carrier.universe())?;
            if coefficient.is_negative() {
                return Err(Error::Invariant(format!(
                    "negative density coefficient {}",
                    format_rational(&coefficient)
                )));
            }
            if universe != Universe::Naturals {
                return Err(Error::Invariant("density components need the universe ℕ".into()));
            }
            if carrier.is_finite() {
                return Err(Error::Invariant(format!("density carrier {carrier} is finite")));
            }
            components.push(DensityComponent { coefficient, carrier: carrier.pattern_only() });
        }
        Ok(Charge { universe, atoms: atom_map, densities: level_sets(&components)? })
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn atoms(&self) -> &BTreeMap<usize, Rational> {
        &self.atoms
    }

    pub fn densities(&self) -> &[DensityComponent] {
        &self.densities
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.densities.is_empty()
    }

    pub fn max_atom(&self) -> Option<usize> {
        self.atoms.keys().next_back().copied()
    }

    pub fn atom_weight(&self, point: usize) -> Rational {
        self.atoms.get(&point).cloned().unwrap_or_else(Rational::zero)
    }

    /// The points carrying positive weight.
    pub fn atom_support(&self) -> EpSet {
        let points: Vec<usize> = self.atoms.keys().copied().collect();
        EpSet::finite(self.universe, &points).expect("atoms lie in the universe")
    }

    /// Union of the density carriers (prefix-free).
    pub fn density_support(&self) -> EpSet {
        self.densities
            .iter()
            .try_fold(EpSet::empty(self.universe), |acc, c| acc.join(&c.carrier))
            .expect("carriers share the weight function's period")
    }

    /// Mass of the atoms lying in `a`.
    pub fn atomic_mass(&self, a: &EpSet) -> Result<Rational> {
        self.universe.check(a.universe())?;
        Ok(self.atoms.iter().filter(|(p, _)| a.contains(**p)).map(|(_, w)| w).sum())
    }

    /// Mass of the density components on `a`.
    pub fn density_mass(&self, a: &EpSet) -> Result<Rational> {
        self.universe.check(a.universe())?;
        let mut total = Rational::zero();
        for c in &self.densities {
            total += &c.coefficient * a.overlap_density(&c.carrier)?;
        }
        Ok(total)
    }

    pub fn evaluate(&self, a: &EpSet) -> Result<Rational> {
        Ok(self.density_mass(a)? + self.atomic_mass(a)?)
    }

    /// `‖μ‖ = μ(1)`.
    pub fn norm(&self) -> Rational {
        self.evaluate(&EpSet::full(self.universe)).expect("same universe")
    }

    pub fn add(&self, other: &Charge) -> Result<Charge> {
        self.universe.check(other.universe)?;
        Charge::new(
            self.universe,
            self.atoms.iter().chain(&other.atoms).map(|(p, w)| (*p, w.clone())),
            self.components().chain(other.components()),
        )
    }

    pub fn scale(&self, factor: &Rational) -> Result<Charge> {
        Charge::new(
            self.universe,
            self.atoms.iter().map(|(p, w)| (*p, w * factor)),
            self.densities.iter().map(|c| (&c.coefficient * factor, c.carrier.clone())),
        )
    }

    /// `h ↦ μ(h ∩ a)`.
    pub fn restrict(&self, a: &EpSet) -> Result<Charge> {
        self.restrict_parts(a, a)
    }

    /// Atoms restricted to `atoms_on`, densities to `densities_on`.
    fn restrict_parts(&self, atoms_on: &EpSet, densities_on: &EpSet) -> Result<Charge> {
        self.universe.check(atoms_on.universe())?;
        self.universe.check(densities_on.universe())?;
        let mut densities = Vec::new();
        for c in &self.densities {
            let carrier = c.carrier.meet(densities_on)?;
            if carrier.is_infinite() {
                densities.push((c.coefficient.clone(), carrier));
            }
        }
        Charge::new(
            self.universe,
            self.atoms.iter().filter(|(p, _)| atoms_on.contains(**p)).map(|(p, w)| (*p, w.clone())),
            densities,
        )
    }

    fn components(&self) -> impl Iterator<Item = (Rational, EpSet)> + '_ {
        self.densities.iter().map(|c| (c.coefficient.clone(), c.carrier.clone()))
    }

    /// `λ(h) = lim_n μ(σ(n) ∩ h)` for a decreasing σ. Eventually the atoms
    /// seen are those in the left set of the rule and the density mass is
    /// that of its right set; the sequence is decreasing, so every phase gives
    /// the same limit.
    pub fn limit_along_decreasing(&self, sigma: &ElementSequence) -> Result<Charge> {
        self.universe.check(sigma.universe())?;
        sigma.require_decreasing()?;
        let rule = &sigma.rules()[0];
        self.restrict_parts(rule.left(), rule.right())
    }
}

/// Splits the weight function of `components` into level sets.
fn level_sets(components: &[DensityComponent]) -> Result<Vec<DensityComponent>> {
    if components.is_empty() {
        return Ok(vec![]);
    }
    let period = components.iter().try_fold(1, |acc, c| checked_lcm(acc, c.carrier.period()))?;
    let mut levels: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
    for r in 0..period {
        let weight: Rational = components.iter().filter(|c| c.carrier.pattern_at(r)).map(|c| &c.coefficient).sum();
        if !weight.is_zero() {
            levels.entry(weight).or_default().push(r);
        }
    }
    levels
        .into_iter()
        .map(|(coefficient, residues)| {
            Ok(DensityComponent { coefficient, carrier: EpSet::periodic(period, &residues)? })
        })
        .collect()
}

impl fmt::Display for Charge {
    /// `[universe=<n>;]atoms=<point:weight,…>;densities=<coeff@{set},…>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Universe::Finite(n) = self.universe {
            write!(f, "universe={n};")?;
        }
        let atoms: Vec<String> = self.atoms.iter().map(|(p, w)| format!("{p}:{}", format_rational(w))).collect();
        let densities: Vec<String> =
            self.densities.iter().map(|c| format!("{}@{{{}}}", format_rational(&c.coefficient), c.carrier)).collect();
        write!(f, "atoms={};densities={}", atoms.join(","), densities.join(","))
    }
}

impl FromStr for Charge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Charge> {
        let (mut universe, mut atoms, mut densities) = (None, None, None);
        for (key, value) in fields(s)? {
            let slot = match key {
                "universe" => &mut universe,
                "atoms" => &mut atoms,
                "densities" => &mut densities,
                other => return Err(Error::Parse(format!("unknown charge field `{other}`"))),
            };
            if slot.replace(value).is_some() {
                return Err(Error::Parse(format!("duplicate charge field `{key}`")));
            }
        }
        let universe = match universe {
            None => Universe::Naturals,
            Some(n) => Universe::Finite(n.parse().map_err(|_| Error::Parse(format!("invalid universe size `{n}`")))?),
        };
        let mut atom_list = Vec::new();
        for entry in split_top(atoms.unwrap_or(""), ',')?.into_iter().map(str::trim).filter(|e| !e.is_empty()) {
            let (p, w) =
                entry.split_once(':').ok_or_else(|| Error::Parse(format!("expected point:weight, got `{entry}`")))?;
            let p = p.trim().parse().map_err(|_| Error::Parse(format!("invalid point `{p}`")))?;
            atom_list.push((p, parse_rational(w)?));
        }
        let mut density_list = Vec::new();
        for entry in split_top(densities.unwrap_or(""), ',')?.into_iter().map(str::trim).filter(|e| !e.is_empty()) {
            let (c, set) =
                entry.split_once('@').ok_or_else(|| Error::Parse(format!("expected coeff@{{set}}, got `{entry}`")))?;
            let set = if set.trim().starts_with('{') { strip_delimited(set, '{', '}')? } else { set };
            density_list.push((parse_rational(c)?, set.parse()?));
        }
        Charge::new(universe, atom_list, density_list)
    }
}

/// A family of charges: an explicit list, or the point masses on an
/// infinite set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChargeFamily {
    Finite(Vec<Charge>),
    PointMasses(EpSet),
}

impl ChargeFamily {
    pub fn point_masses(support: EpSet) -> Result<ChargeFamily> {
        if support.is_finite() {
            return Err(Error::Invariant(format!("point-mass support {support} must be infinite")));
        }
        Ok(ChargeFamily::PointMasses(support))
    }

    pub fn universe(&self) -> Option<Universe> {
        match self {
            ChargeFamily::Finite(list) => list.first().map(Charge::universe),
            ChargeFamily::PointMasses(s) => Some(s.universe()),
        }
    }

    fn check(&self, universe: Universe) -> Result<()> {
        match self {
            ChargeFamily::Finite(list) => list.iter().try_for_each(|m| m.universe().check(universe)),
            ChargeFamily::PointMasses(s) => s.universe().check(universe),
        }
    }

    /// `sup_μ μ(a)`.
    pub fn sup_evaluate(&self, a: &EpSet) -> Result<Rational> {
        self.check(a.universe())?;
        match self {
            ChargeFamily::Finite(list) => {
                let mut best = Rational::zero();
                for m in list {
                    best = best.max(m.evaluate(a)?);
                }
                Ok(best)
            }
            ChargeFamily::PointMasses(s) => Ok(integer(usize::from(!a.is_disjoint(s)?))),
        }
    }

    /// `sup_μ ‖μ‖`.
    pub fn norm_bound(&self) -> Rational {
        match self {
            ChargeFamily::Finite(list) => list.iter().map(Charge::norm).max().unwrap_or_else(Rational::zero),
            ChargeFamily::PointMasses(_) => integer(1),
        }
    }

    /// `sup_μ limsup_n μ(σ(n))`.
    pub fn sup_limsup(&self, sigma: &ElementSequence) -> Result<Rational> {
        self.check(sigma.universe())?;
        match self {
            ChargeFamily::Finite(list) => {
                let mut best = Rational::zero();
                for m in list {
                    best = best.max(limsup_functional(m, sigma)?);
                }
                Ok(best)
            }
            ChargeFamily::PointMasses(s) => {
                for rule in sigma.rules() {
                    if !rule.left().is_disjoint(s)? {
                        return Ok(integer(1));
                    }
                }
                Ok(Rational::zero())
            }
        }
    }

    /// `limsup_n sup_μ μ(σ(n))`. For a finite list the eventual values are
    /// constant in each phase, so this equals [`ChargeFamily::sup_limsup`].
    pub fn limsup_of_sup(&self, sigma: &ElementSequence) -> Result<Rational> {
        match self {
            ChargeFamily::Finite(_) => self.sup_limsup(sigma),
            ChargeFamily::PointMasses(s) => {
                s.universe().check(sigma.universe())?;
                let l = sigma.period();
                let w = sigma.window() as i64;
                for (phi, rule) in sigma.rules().iter().enumerate() {
                    if !rule.left().is_disjoint(s)? || rule.right().meet(s)?.is_infinite() {
                        return Ok(integer(1));
                    }
                    for (i, set) in rule.window().iter().enumerate() {
                        let residue = (phi as i64 + i as i64 - w).rem_euclid(l as i64) as usize;
                        if set.meet(s)?.meet(&EpSet::residue_class(residue, l)?)?.is_infinite() {
                            return Ok(integer(1));
                        }
                    }
                }
                Ok(Rational::zero())
            }
        }
    }
}

/// A sequence `a_n` with `ν(a_n) → 0` while `μ(a_n) ≥ eps` for all `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonDominationWitness {
    pub sequence: ElementSequence,
    pub eps: Rational,
}

impl NonDominationWitness {
    /// Rechecks the witness with exact limits and infima.
    pub fn verify(&self, mu: &Charge, nu: &Charge) -> Result<bool> {
        Ok(self.eps.is_positive()
            && limsup_functional(nu, &self.sequence)?.is_zero()
            && self.sequence.infimum(mu)? >= self.eps)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AbsoluteContinuity {
    Holds,
    Fails(NonDominationWitness),
}

impl AbsoluteContinuity {
    pub fn holds(&self) -> bool {
        matches!(self, AbsoluteContinuity::Holds)
    }
}

/// `μ ≪ ν`: every μ-atom is a ν-atom and μ's density support lies inside
/// ν's. Failing atoms give a constant singleton witness; failing densities
/// give the tails of the uncovered part of μ's support.
pub fn is_absolutely_continuous(mu: &Charge, nu: &Charge) -> Result<AbsoluteContinuity> {
    mu.universe.check(nu.universe)?;
    if let Some((&x, w)) = mu.atoms.iter().find(|(p, _)| !nu.atoms.contains_key(p)) {
        let point = EpSet::singleton(mu.universe, x)?;
        return Ok(AbsoluteContinuity::Fails(NonDominationWitness {
            sequence: ElementSequence::constant(point),
            eps: w.clone(),
        }));
    }
    let uncovered = mu.density_support().difference(&nu.density_support())?;
    if uncovered.is_infinite() {
        let eps = mu.density_mass(&uncovered)?;
        return Ok(AbsoluteContinuity::Fails(NonDominationWitness {
            sequence: ElementSequence::tails(&uncovered),
            eps,
        }));
    }
    Ok(AbsoluteContinuity::Holds)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LebesgueDecomposition {
    pub absolutely_continuous: Charge,
    pub singular: Charge,
    /// `ν(witness) = 0` and the singular part vanishes off it.
    pub witness: EpSet,
}

pub fn lebesgue_decompose(mu: &Charge, nu: &Charge) -> Result<LebesgueDecomposition> {
    mu.universe.check(nu.universe)?;
    let nu_atoms = nu.atom_support();
    let nu_support = nu.density_support();
    let absolutely_continuous = mu.restrict_parts(&nu_atoms, &nu_support)?;
    let singular = mu.restrict_parts(&nu_atoms.complement(), &nu_support.complement())?;
    let witness = singular.atom_support().join(&singular.density_support())?.difference(&nu_atoms)?;
    Ok(LebesgueDecomposition { absolutely_continuous, singular, witness })
}

/// `μ ⊥ ν`: the absolutely continuous part of μ with respect to ν vanishes.
pub fn is_singular(mu: &Charge, nu: &Charge) -> Result<bool> {
    Ok(lebesgue_decompose(mu, nu)?.absolutely_continuous.is_zero())
}
