//! Inner measures, the ψ functional over disjoint sequences, uniform strong
//! additivity and the weak compactness verdict.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::charge::{Charge, ChargeFamily};
use crate::epset::{EpSet, Universe};
use crate::families::almost_disjoint_family;
use crate::rational::{format_rational, integer, Rational};
use crate::subalgebra::FiniteSubalgebra;
use crate::text::{split_list, strip_delimited};
use crate::{Error, Result};

/// A disjoint sequence `k ↦ υ(k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DisjointSeqGen {
    /// `υ(k) = {k}`.
    Singletons,
    /// `υ(k) = {wk, …, wk + w - 1}`.
    Blocks(usize),
    /// `υ(k) = {2^k, …, 2^(k+1) - 1}`.
    GeometricBlocks,
    /// `υ(k)` listed for `k < len`, empty afterwards.
    ExplicitFinite(Vec<EpSet>),
}

impl DisjointSeqGen {
    pub fn blocks(width: usize) -> Result<DisjointSeqGen> {
        if width == 0 {
            return Err(Error::Invariant("block width must be at least 1".into()));
        }
        Ok(DisjointSeqGen::Blocks(width))
    }

    pub fn explicit(sets: Vec<EpSet>) -> Result<DisjointSeqGen> {
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if !sets[i].is_disjoint(&sets[j])? {
                    return Err(Error::Invariant(format!("explicit coordinates {i} and {j} overlap")));
                }
            }
        }
        Ok(DisjointSeqGen::ExplicitFinite(sets))
    }

    /// `υ(k)` as a half-open interval, for the interval-shaped variants.
    pub fn interval(&self, k: usize) -> Option<(usize, usize)> {
        match self {
            DisjointSeqGen::Singletons => Some((k, k.checked_add(1)?)),
            DisjointSeqGen::Blocks(w) => {
                let lo = k.checked_mul(*w)?;
                Some((lo, lo.checked_add(*w)?))
            }
            DisjointSeqGen::GeometricBlocks => {
                let lo = 1usize.checked_shl(u32::try_from(k).ok()?)?;
                Some((lo, lo.saturating_mul(2)))
            }
            DisjointSeqGen::ExplicitFinite(_) => None,
        }
    }

    /// The index `k` with `p ∈ υ(k)`, if any.
    fn index_of(&self, p: usize) -> Option<usize> {
        match self {
            DisjointSeqGen::Singletons => Some(p),
            DisjointSeqGen::Blocks(w) => Some(p / w),
            DisjointSeqGen::GeometricBlocks => (p > 0).then(|| (usize::BITS - 1 - p.leading_zeros()) as usize),
            DisjointSeqGen::ExplicitFinite(sets) => sets.iter().position(|s| s.contains(p)),
        }
    }

    /// `υ(k)` materialized. Geometric blocks are only materialized while
    /// they stay small.
    pub fn coordinate(&self, universe: Universe, k: usize) -> Result<EpSet> {
        match self {
            DisjointSeqGen::ExplicitFinite(sets) => match sets.get(k) {
                Some(s) => {
                    universe.check(s.universe())?;
                    Ok(s.clone())
                }
                None => Ok(EpSet::empty(universe)),
            },
            _ => {
                let (lo, hi) = self.interval(k).ok_or_else(|| too_large(k))?;
                let hi = match universe {
                    Universe::Finite(n) => hi.min(n),
                    Universe::Naturals if hi > MATERIALIZE_LIMIT => return Err(too_large(k)),
                    Universe::Naturals => hi,
                };
                Ok(EpSet::interval(universe, lo.min(hi), hi))
            }
        }
    }

    /// `υ(E) = ⋃_{k ∈ E} υ(k)` where `E` is an index set over ℕ.
    pub fn union_over(&self, universe: Universe, indices: &EpSet) -> Result<EpSet> {
        Universe::Naturals.check(indices.universe())?;
        if let Universe::Finite(n) = universe {
            return EpSet::from_fn(universe, n, 1, |p| self.index_of(p).is_some_and(|k| indices.contains(k)));
        }
        match self {
            DisjointSeqGen::Singletons => Ok(indices.clone()),
            DisjointSeqGen::Blocks(w) => {
                let period = indices.period().checked_mul(*w).ok_or_else(|| too_large(indices.period()))?;
                EpSet::from_fn(universe, indices.prefix_len() * w, period, |p| indices.contains(p / w))
            }
            DisjointSeqGen::GeometricBlocks => {
                let elems = indices.elements().ok_or_else(|| {
                    Error::Precondition(
                        "geometric blocks over an infinite index set are not eventually periodic".into(),
                    )
                })?;
                let mut out = EpSet::empty(universe);
                for k in elems {
                    out = out.join(&self.coordinate(universe, k)?)?;
                }
                Ok(out)
            }
            DisjointSeqGen::ExplicitFinite(sets) => {
                let mut out = EpSet::empty(universe);
                for (k, s) in sets.iter().enumerate() {
                    if indices.contains(k) {
                        out = out.join(s)?;
                    }
                }
                Ok(out)
            }
        }
    }

    /// `sup_μ μ(υ(k))`, computed without materializing large intervals.
    pub fn sup_value(&self, family: &ChargeFamily, k: usize) -> Result<Rational> {
        let Some((lo, hi)) = self.interval(k) else {
            let u = family.universe().unwrap_or(Universe::Naturals);
            return match self {
                DisjointSeqGen::ExplicitFinite(_) => family.sup_evaluate(&self.coordinate(u, k)?),
                _ => Err(too_large(k)),
            };
        };
        match family {
            ChargeFamily::Finite(list) => {
                let mut best = Rational::zero();
                for m in list {
                    // finite intervals carry no density
                    let v: Rational = m.atoms().range(lo..hi).map(|(_, w)| w).sum();
                    best = best.max(v);
                }
                Ok(best)
            }
            ChargeFamily::PointMasses(s) => Ok(integer(usize::from(s.next_element(lo).is_some_and(|x| x < hi)))),
        }
    }
}

/// Largest interval end materialized over ℕ.
const MATERIALIZE_LIMIT: usize = 1 << 16;

fn too_large(k: usize) -> Error {
    Error::Precondition(format!("coordinate {k} of the disjoint sequence is too large to represent"))
}

impl fmt::Display for DisjointSeqGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DisjointSeqGen::Singletons => write!(f, "singletons"),
            DisjointSeqGen::Blocks(w) => write!(f, "blocks({w})"),
            DisjointSeqGen::GeometricBlocks => write!(f, "geometric"),
            DisjointSeqGen::ExplicitFinite(sets) => {
                write!(f, "explicit(")?;
                for (i, s) in sets.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{{{s}}}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for DisjointSeqGen {
    type Err = Error;

    /// `singletons`, `blocks(<w>)`, `geometric` or `explicit({set};…)`.
    fn from_str(s: &str) -> Result<DisjointSeqGen> {
        let s = s.trim();
        match s {
            "singletons" => return Ok(DisjointSeqGen::Singletons),
            "geometric" => return Ok(DisjointSeqGen::GeometricBlocks),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("blocks") {
            let w = strip_delimited(rest, '(', ')')?;
            let w = w.trim().parse().map_err(|_| Error::Parse(format!("invalid block width `{w}`")))?;
            return DisjointSeqGen::blocks(w);
        }
        if let Some(rest) = s.strip_prefix("explicit") {
            let sets = split_list(strip_delimited(rest, '(', ')')?)?
                .into_iter()
                .map(str::parse)
                .collect::<Result<Vec<EpSet>>>()?;
            return DisjointSeqGen::explicit(sets);
        }
        Err(Error::Parse(format!("unknown generator `{s}`")))
    }
}

/// `m_*(B)` relative to a finite subalgebra: the largest `m(A)` over
/// elements `A ⊆ B`.
pub fn inner_measure(m: &Charge, b: &EpSet, sub: &FiniteSubalgebra) -> Result<Rational> {
    m.universe().check(b.universe())?;
    m.universe().check(sub.universe())?;
    let mut best = Rational::zero();
    for a in sub.elements() {
        if a.is_subset(b)? {
            best = best.max(m.evaluate(a)?);
        }
    }
    Ok(best)
}

/// `ψ(E) = sup_μ μ(υ(E))`. For nonnegative charges the inner measure of a
/// represented set is its value.
pub fn psi_functional(family: &ChargeFamily, generator: &DisjointSeqGen, indices: &EpSet) -> Result<Rational> {
    let u = family.universe().unwrap_or(Universe::Naturals);
    family.sup_evaluate(&generator.union_over(u, indices)?)
}

/// For one generator: `sup_μ μ(υ(k)) = 0` for every `k ≥ vanishes_from`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorBound {
    pub generator: usize,
    pub vanishes_from: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UsaCertificate {
    pub bounds: Vec<GeneratorBound>,
}

impl UsaCertificate {
    /// Re-evaluates `sup_μ μ(υ(k))` at `probes` indices from each bound on.
    pub fn recheck(&self, family: &ChargeFamily, generators: &[DisjointSeqGen], probes: usize) -> Result<bool> {
        for b in &self.bounds {
            let g = &generators[b.generator];
            for k in b.vanishes_from..b.vanishes_from + probes {
                if g.interval(k).is_none() && !matches!(g, DisjointSeqGen::ExplicitFinite(_)) {
                    break; // beyond usize, nothing left to evaluate
                }
                if !g.sup_value(family, k)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// `sup_μ μ(υ(k)) ≥ eps` for every `k` in the infinite set `indices`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UsaWitness {
    pub generator: usize,
    pub indices: EpSet,
    pub eps: Rational,
}

impl UsaWitness {
    /// Checks the first `probes` indices by direct evaluation.
    pub fn verify(&self, family: &ChargeFamily, generators: &[DisjointSeqGen], probes: usize) -> Result<bool> {
        if self.indices.is_finite() || self.eps <= Rational::zero() {
            return Ok(false);
        }
        let g = &generators[self.generator];
        let mut k = 0;
        for _ in 0..probes {
            let Some(next) = self.indices.next_element(k) else { return Ok(false) };
            if g.interval(next).is_none() && !matches!(g, DisjointSeqGen::ExplicitFinite(_)) {
                break;
            }
            if g.sup_value(family, next)? < self.eps {
                return Ok(false);
            }
            k = next + 1;
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UsaVerdict {
    Pass(UsaCertificate),
    Fail(UsaWitness),
}

/// Uniform strong additivity along the given disjoint sequences. Finite
/// lists pass: the coordinates are eventually free of atoms and (being
/// finite, or absent) of density. Point masses on `S` fail along any
/// generator whose coordinates keep meeting `S`.
pub fn usa_test(family: &ChargeFamily, generators: &[DisjointSeqGen]) -> Result<UsaVerdict> {
    match family {
        ChargeFamily::Finite(list) => {
            let max_atom = list.iter().filter_map(Charge::max_atom).max();
            let bounds = generators
                .iter()
                .enumerate()
                .map(|(generator, g)| {
                    let vanishes_from = match g {
                        DisjointSeqGen::ExplicitFinite(sets) => sets.len(),
                        _ => max_atom.map_or(0, |x| g.index_of(x).map_or(0, |k| k + 1)),
                    };
                    GeneratorBound { generator, vanishes_from }
                })
                .collect();
            Ok(UsaVerdict::Pass(UsaCertificate { bounds }))
        }
        ChargeFamily::PointMasses(s) => {
            let mut bounds = Vec::new();
            for (generator, g) in generators.iter().enumerate() {
                let indices = match g {
                    DisjointSeqGen::ExplicitFinite(sets) => {
                        bounds.push(GeneratorBound { generator, vanishes_from: sets.len() });
                        continue;
                    }
                    DisjointSeqGen::Singletons => s.clone(),
                    DisjointSeqGen::Blocks(w) => {
                        let w = *w;
                        EpSet::from_fn(Universe::Naturals, s.prefix_len().div_ceil(w) + 1, s.period(), |k| {
                            (k * w..k * w + w).any(|p| s.contains(p))
                        })?
                    }
                    DisjointSeqGen::GeometricBlocks => {
                        let need = s.period().max(s.prefix_len());
                        let k0 = (0..).find(|&k| 1usize << k >= need).expect("fits in usize");
                        EpSet::tail(Universe::Naturals, k0)
                    }
                };
                return Ok(UsaVerdict::Fail(UsaWitness { generator, indices, eps: integer(1) }));
            }
            Ok(UsaVerdict::Pass(UsaCertificate { bounds }))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeakCompactnessVerdict {
    /// Not produced for the represented family variants, which are all norm
    /// bounded.
    NormUnbounded,
    NotUsa(UsaWitness),
    CompatibleWithWeakCompactness(UsaCertificate),
}

/// A norm bounded family is relatively weakly compact exactly when it is
/// uniformly strongly additive; the positive answer is relative to the
/// generators tried.
pub fn weak_compactness_check(family: &ChargeFamily, generators: &[DisjointSeqGen]) -> Result<WeakCompactnessVerdict> {
    Ok(match usa_test(family, generators)? {
        UsaVerdict::Fail(w) => WeakCompactnessVerdict::NotUsa(w),
        UsaVerdict::Pass(c) => WeakCompactnessVerdict::CompatibleWithWeakCompactness(c),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailSearch {
    /// Branch with the smallest value (lowest index on ties).
    pub branch: usize,
    pub value: Rational,
    pub values: Vec<Rational>,
}

/// Over the branches `B_0, …, B_{k-1}` of the almost disjoint family,
/// evaluates `limsup_n ψ(B_i ∩ [n, ∞))` and returns the smallest.
pub fn e0_tail_search(family: &ChargeFamily, generator: &DisjointSeqGen, k: usize) -> Result<TailSearch> {
    let branches = almost_disjoint_family(k)?;
    let values: Vec<Rational> = match family {
        ChargeFamily::Finite(list) => {
            if matches!(generator, DisjointSeqGen::GeometricBlocks) && list.iter().any(|m| !m.densities().is_empty()) {
                return Err(Error::Precondition("geometric blocks over a branch carry no natural density".into()));
            }
            // atoms are eventually passed; singletons and blocks over a
            // branch have density zero; explicit sequences end
            vec![Rational::zero(); k]
        }
        ChargeFamily::PointMasses(_) => {
            let hits = match usa_test(family, std::slice::from_ref(generator))? {
                UsaVerdict::Fail(w) => Some(w.indices),
                UsaVerdict::Pass(_) => None,
            };
            branches
                .iter()
                .map(|b| integer(usize::from(hits.as_ref().is_some_and(|h| b.meets_infinitely(h)))))
                .collect()
        }
    };
    let (branch, value) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(i, v)| (i, v.clone()))
        .expect("k ≥ 1");
    Ok(TailSearch { branch, value, values })
}

impl fmt::Display for UsaCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.bounds.iter().map(|b| format!("{}@{}", b.generator, b.vanishes_from)).collect();
        write!(f, "vanishes=[{}]", parts.join(","))
    }
}

impl fmt::Display for UsaWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "generator={};indices={{{}}};eps={}", self.generator, self.indices, format_rational(&self.eps))
    }
}

impl fmt::Display for UsaVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UsaVerdict::Pass(c) => write!(f, "verdict=pass;witness=none;certificate={c}"),
            UsaVerdict::Fail(w) => write!(f, "verdict=fail;witness={w}"),
        }
    }
}

impl fmt::Display for WeakCompactnessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeakCompactnessVerdict::NormUnbounded => write!(f, "verdict=norm-unbounded;witness=none"),
            WeakCompactnessVerdict::NotUsa(w) => write!(f, "verdict=not-usa;witness={w}"),
            WeakCompactnessVerdict::CompatibleWithWeakCompactness(c) => {
                write!(f, "verdict=compatible-with-weak-compactness;witness=none;certificate={c}")
            }
        }
    }
}
