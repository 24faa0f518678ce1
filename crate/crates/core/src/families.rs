//! Almost disjoint branch families, tail sequences, the quasi-disjoint
//! census and the countable chain predicate.
//!
//! A finite binary string `s` is coded as the integer whose binary expansion
//! is `1s`. A branch is the set of codes of all finite prefixes of an
//! infinite, eventually periodic word. Two distinct words share only the
//! prefixes up to their longest common prefix, so their branches meet in
//! `1 + lcp` points.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::charge::{Charge, ChargeFamily};
use crate::epset::{EpSet, Universe};
use crate::rational::{integer, Rational};
use crate::seq::{is_quasi_disjoint, limsup_functional, ElementSequence};
use crate::{Error, Result};

pub const MAX_FAMILY_SIZE: usize = 64;

/// The branch of the word `prefix · period^∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Branch {
    prefix: Vec<bool>,
    period: Vec<bool>,
}

impl Branch {
    pub fn new(prefix: Vec<bool>, period: Vec<bool>) -> Result<Branch> {
        if period.is_empty() {
            return Err(Error::Invariant("branch word needs a nonempty periodic part".into()));
        }
        Ok(Branch { prefix, period }.canonical())
    }

    /// Minimal period, then shortest prefix.
    fn canonical(mut self) -> Branch {
        let p = self.period.len();
        if let Some(d) =
            (1..=p).filter(|d| p.is_multiple_of(*d)).find(|&d| (0..p).all(|i| self.period[i] == self.period[i % d]))
        {
            self.period.truncate(d);
        }
        while let Some(&last) = self.prefix.last() {
            if last == *self.period.last().expect("nonempty") {
                self.prefix.pop();
                self.period.rotate_right(1);
            } else {
                break;
            }
        }
        self
    }

    /// Letter `m` of the word.
    pub fn bit(&self, m: usize) -> bool {
        match self.prefix.get(m) {
            Some(&b) => b,
            None => self.period[(m - self.prefix.len()) % self.period.len()],
        }
    }

    /// Code of the prefix of length `m`, if it fits in `usize`.
    pub fn code(&self, m: usize) -> Option<usize> {
        (0..m).try_fold(1usize, |c, i| c.checked_mul(2)?.checked_add(usize::from(self.bit(i))))
    }

    pub fn contains(&self, k: usize) -> bool {
        if k == 0 {
            return false;
        }
        let m = (usize::BITS - 1 - k.leading_zeros()) as usize;
        (0..m).all(|i| (k >> (m - 1 - i)) & 1 == usize::from(self.bit(i)))
    }

    /// Elements below `bound`, increasing.
    pub fn elements_below(&self, bound: usize) -> Vec<usize> {
        (0..).map_while(|m| self.code(m)).take_while(|&c| c < bound).collect()
    }

    /// Longest common prefix of the two words; `None` when the words agree.
    pub fn common_prefix(&self, other: &Branch) -> Option<usize> {
        let horizon = self.prefix.len().max(other.prefix.len()) + self.period.len() * other.period.len();
        (0..horizon).find(|&m| self.bit(m) != other.bit(m))
    }

    /// `|B ∩ B'|`, `None` when infinite (equal words).
    pub fn intersection_size(&self, other: &Branch) -> Option<usize> {
        self.common_prefix(other).map(|l| l + 1)
    }

    /// Whether `B ∩ s` is infinite. The pair (position in the periodic part,
    /// code mod the period of `s`) evolves deterministically, so the codes
    /// eventually cycle through a fixed set of residues.
    pub fn meets_infinitely(&self, s: &EpSet) -> bool {
        if s.universe() != Universe::Naturals || s.is_finite() {
            return false;
        }
        let p = s.period();
        let mut m = self.prefix.len();
        let mut c = (0..m).fold(1 % p, |c, i| (2 * c + usize::from(self.bit(i))) % p);
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let mut trail = Vec::new();
        loop {
            let state = ((m - self.prefix.len()) % self.period.len(), c);
            if let Some(&start) = seen.get(&state) {
                return trail[start..].iter().any(|&r| s.pattern_at(r));
            }
            seen.insert(state, trail.len());
            trail.push(c);
            c = (2 * c + usize::from(self.bit(m))) % p;
            m += 1;
        }
    }
}

fn bits(b: &[bool]) -> String {
    b.iter().map(|&x| if x { '1' } else { '0' }).collect()
}

fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Parse(format!("invalid bit `{c}` in `{s}`"))),
        })
        .collect()
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "branch={}({})", bits(&self.prefix), bits(&self.period))
    }
}

impl FromStr for Branch {
    type Err = Error;

    /// `branch=<prefix bits>(<period bits>)`.
    fn from_str(s: &str) -> Result<Branch> {
        let body =
            s.trim().strip_prefix("branch=").ok_or_else(|| Error::Parse(format!("expected `branch=…`, got `{s}`")))?;
        let (prefix, rest) =
            body.split_once('(').ok_or_else(|| Error::Parse(format!("expected `<prefix>(<period>)`, got `{body}`")))?;
        let period = rest.strip_suffix(')').ok_or_else(|| Error::Parse(format!("missing `)` in `{body}`")))?;
        Branch::new(parse_bits(prefix)?, parse_bits(period)?)
    }
}

/// `k` branches; branch `i` follows the word `(0^i 1)^∞`, so branches `i < j`
/// meet in `i + 1` points.
pub fn almost_disjoint_family(k: usize) -> Result<Vec<Branch>> {
    if k == 0 || k > MAX_FAMILY_SIZE {
        return Err(Error::Precondition(format!("family size {k} outside 1..={MAX_FAMILY_SIZE}")));
    }
    (0..k)
        .map(|i| {
            let mut period = vec![false; i];
            period.push(true);
            Branch::new(vec![], period)
        })
        .collect()
}

/// A set that can index a tail sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetDescriptor {
    Set(EpSet),
    Branch(Branch),
}

/// A decreasing sequence in a census: a represented sequence, or the tails
/// `B ∩ [n, ∞)` of a branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Member {
    Sequence(ElementSequence),
    BranchTail(Branch),
}

/// `n ↦ B ∩ {n, n+1, …}` for an infinite `B`.
pub fn tail_sequence(b: &SetDescriptor) -> Result<Member> {
    match b {
        SetDescriptor::Set(s) if s.is_finite() => {
            Err(Error::Precondition(format!("tail sequence of the finite set {{{s}}} vanishes eventually")))
        }
        SetDescriptor::Set(s) => Ok(Member::Sequence(ElementSequence::tails(s))),
        SetDescriptor::Branch(br) => Ok(Member::BranchTail(br.clone())),
    }
}

impl Member {
    pub fn universe(&self) -> Universe {
        match self {
            Member::Sequence(s) => s.universe(),
            Member::BranchTail(_) => Universe::Naturals,
        }
    }

    pub fn require_decreasing(&self) -> Result<()> {
        match self {
            Member::Sequence(s) => s.require_decreasing(),
            Member::BranchTail(_) => Ok(()),
        }
    }

    /// `limsup_n ν(σ(n))`. Branches have density zero and the atoms are
    /// eventually passed, so branch tails have limit zero.
    pub fn limsup(&self, nu: &Charge) -> Result<Rational> {
        match self {
            Member::Sequence(s) => limsup_functional(nu, s),
            Member::BranchTail(_) => {
                Universe::Naturals.check(nu.universe())?;
                Ok(Rational::zero())
            }
        }
    }

    pub fn quasi_disjoint(&self, other: &Member) -> Result<bool> {
        self.universe().check(other.universe())?;
        match (self, other) {
            (Member::Sequence(a), Member::Sequence(b)) => is_quasi_disjoint(a, b),
            (Member::BranchTail(a), Member::BranchTail(b)) => Ok(a.common_prefix(b).is_some()),
            (Member::BranchTail(b), Member::Sequence(s)) | (Member::Sequence(s), Member::BranchTail(b)) => {
                branch_sequence_quasi_disjoint(b, s)
            }
        }
    }
}

/// `σ(n) ∩ B ∩ [n, ∞)` is eventually empty unless, in some phase, the
/// right set meets `B` infinitely, or a window offset `d ≥ 0` keeps
/// hitting `B` at the points `n + d`.
fn branch_sequence_quasi_disjoint(b: &Branch, s: &ElementSequence) -> Result<bool> {
    let l = s.period();
    let w = s.window();
    for (phi, rule) in s.rules().iter().enumerate() {
        if b.meets_infinitely(rule.right()) {
            return Ok(false);
        }
        for d in 0..w {
            let set = &rule.window()[w + d];
            if b.meets_infinitely(&set.meet(&EpSet::residue_class((phi + d) % l, l)?)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusReport {
    /// Indices with `limsup ν(σ(n)) ≥ eps`.
    pub heavy: Vec<usize>,
    pub values: Vec<Rational>,
    pub total: Rational,
    pub norm: Rational,
    /// `floor(‖ν‖ / eps)`.
    pub bound: BigInt,
}

/// Counts the members of a pairwise quasi-disjoint decreasing family on
/// which ν keeps mass at least `eps`, and checks the counting bounds.
pub fn quasi_disjoint_census(family: &[Member], nu: &Charge, eps: &Rational) -> Result<CensusReport> {
    if *eps <= Rational::zero() {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    for m in family {
        nu.universe().check(m.universe())?;
        m.require_decreasing()?;
    }
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            if !family[i].quasi_disjoint(&family[j])? {
                return Err(Error::NotQuasiDisjoint { first: i, second: j });
            }
        }
    }
    let values: Vec<Rational> = family.iter().map(|m| m.limsup(nu)).collect::<Result<_>>()?;
    let heavy: Vec<usize> = (0..family.len()).filter(|&i| values[i] >= *eps).collect();
    let total: Rational = values.iter().sum();
    let norm = nu.norm();
    let q = &norm / eps;
    let bound = q.numer().div_floor(q.denom());
    if total > norm || BigInt::from(heavy.len()) > bound {
        return Err(Error::Internal(format!(
            "census bound violated: {} heavy members, total {}, norm {}",
            heavy.len(),
            crate::rational::format_rational(&total),
            crate::rational::format_rational(&norm)
        )));
    }
    Ok(CensusReport { heavy, values, total, norm, bound })
}

impl CensusReport {
    pub fn bound_as_usize(&self) -> Option<usize> {
        self.bound.to_usize()
    }
}

/// Every listed element gets positive mass from some family member.
/// Elements must be nonempty and pairwise disjoint.
pub fn cc_predicate(elements: &[EpSet], family: &ChargeFamily) -> Result<bool> {
    for (i, a) in elements.iter().enumerate() {
        if a.is_empty() {
            return Err(Error::Precondition(format!("element {i} is empty")));
        }
        for (j, b) in elements.iter().enumerate().skip(i + 1) {
            if !a.is_disjoint(b)? {
                return Err(Error::Precondition(format!("elements {i} and {j} overlap")));
            }
        }
    }
    for a in elements {
        if family.sup_evaluate(a)? <= integer(0) {
            return Ok(false);
        }
    }
    Ok(true)
}
