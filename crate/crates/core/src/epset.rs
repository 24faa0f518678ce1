//! Eventually periodic subsets of ℕ and subsets of finite universes.
//!
//! An [`EpSet`] over ℕ is stored as a finite membership prefix for
//! `0..prefix_len` and a residue pattern modulo `period` that decides
//! membership of every `k >= prefix_len` through `k mod period`. Residues are
//! absolute (`k mod period`, not `(k - prefix_len) mod period`), which keeps
//! binary operations a plain pointwise combination over the lcm period.
//!
//! Values are always canonical: the period is minimal and no trailing prefix
//! bit agrees with the periodic rule, so structural equality is set equality.

use std::cmp::max;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_integer::Integer;

use crate::rational::{integer, Rational};
use crate::{Error, Result};

/// Default bound on the period of any constructed set.
pub const DEFAULT_PERIOD_LIMIT: usize = 1_000_000;

/// Environment variable that overrides [`DEFAULT_PERIOD_LIMIT`].
pub const PERIOD_LIMIT_ENV: &str = "CHARGE_LAB_PERIOD_LIMIT";

/// The active period guard, read once from `CHARGE_LAB_PERIOD_LIMIT`.
pub fn period_limit() -> usize {
    static LIMIT: OnceLock<usize> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var(PERIOD_LIMIT_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v >= 1)
            .unwrap_or(DEFAULT_PERIOD_LIMIT)
    })
}

pub(crate) fn checked_lcm(a: usize, b: usize) -> Result<usize> {
    let l = a / a.gcd(&b) * b;
    let limit = period_limit();
    if l > limit {
        return Err(Error::PeriodLimit { period: l, limit });
    }
    Ok(l)
}

fn check_period(p: usize) -> Result<()> {
    let limit = period_limit();
    if p > limit {
        return Err(Error::PeriodLimit { period: p, limit });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Universe {
    Naturals,
    Finite(usize),
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Universe::Naturals => write!(f, "N"),
            Universe::Finite(n) => write!(f, "finite({n})"),
        }
    }
}

impl Universe {
    pub(crate) fn check(self, other: Universe) -> Result<()> {
        if self != other {
            return Err(Error::UniverseMismatch { left: self, right: other });
        }
        Ok(())
    }

    pub fn contains_point(self, k: usize) -> bool {
        match self {
            Universe::Naturals => true,
            Universe::Finite(n) => k < n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EpSet {
    universe: Universe,
    prefix: Vec<bool>,
    period: usize,
    pattern: Vec<bool>,
}

impl EpSet {
    pub fn empty(universe: Universe) -> EpSet {
        match universe {
            Universe::Naturals => EpSet { universe, prefix: vec![], period: 1, pattern: vec![false] },
            Universe::Finite(n) => EpSet::from_bits(vec![false; n]),
        }
    }

    pub fn full(universe: Universe) -> EpSet {
        match universe {
            Universe::Naturals => EpSet { universe, prefix: vec![], period: 1, pattern: vec![true] },
            Universe::Finite(n) => EpSet::from_bits(vec![true; n]),
        }
    }

    pub fn naturals() -> EpSet {
        EpSet::full(Universe::Naturals)
    }

    /// A subset of the finite universe `{0, …, bits.len()-1}`.
    pub fn from_bits(bits: Vec<bool>) -> EpSet {
        EpSet { universe: Universe::Finite(bits.len()), prefix: bits, period: 1, pattern: vec![false] }
    }

    /// Builds a set from a membership function. Over ℕ the function is
    /// sampled on `0..prefix_len` for the prefix and on one period starting at
    /// `prefix_len` for the pattern; over a finite universe it is sampled on
    /// every point.
    pub fn from_fn(universe: Universe, prefix_len: usize, period: usize, f: impl Fn(usize) -> bool) -> Result<EpSet> {
        match universe {
            Universe::Finite(n) => Ok(EpSet::from_bits((0..n).map(f).collect())),
            Universe::Naturals => {
                if period == 0 {
                    return Err(Error::Invariant("period must be at least 1".into()));
                }
                check_period(period)?;
                let prefix: Vec<bool> = (0..prefix_len).map(&f).collect();
                let mut pattern = vec![false; period];
                for k in prefix_len..prefix_len + period {
                    pattern[k % period] = f(k);
                }
                Ok(EpSet { universe, prefix, period, pattern }.canonical())
            }
        }
    }

    /// `{k : k mod period ∈ residues}` (no prefix).
    pub fn periodic(period: usize, residues: &[usize]) -> Result<EpSet> {
        if period == 0 {
            return Err(Error::Invariant("period must be at least 1".into()));
        }
        if let Some(&r) = residues.iter().find(|&&r| r >= period) {
            return Err(Error::Invariant(format!("residue {r} out of range for period {period}")));
        }
        EpSet::from_fn(Universe::Naturals, 0, period, |k| residues.contains(&(k % period)))
    }

    pub fn residue_class(residue: usize, modulus: usize) -> Result<EpSet> {
        EpSet::periodic(modulus, &[residue % modulus.max(1)])
    }

    pub fn multiples(m: usize) -> Result<EpSet> {
        EpSet::residue_class(0, m)
    }

    pub fn evens() -> EpSet {
        EpSet::periodic(2, &[0]).expect("period 2")
    }

    pub fn odds() -> EpSet {
        EpSet::periodic(2, &[1]).expect("period 2")
    }

    /// A finite set of points. Points outside a finite universe are rejected.
    pub fn finite(universe: Universe, points: &[usize]) -> Result<EpSet> {
        if let Some(&p) = points.iter().find(|&&p| !universe.contains_point(p)) {
            return Err(Error::Invariant(format!("point {p} outside universe {universe}")));
        }
        let len = points.iter().map(|&p| p + 1).max().unwrap_or(0);
        EpSet::from_fn(universe, len, 1, |k| k < len && points.contains(&k))
    }

    pub fn singleton(universe: Universe, point: usize) -> Result<EpSet> {
        EpSet::finite(universe, &[point])
    }

    /// `{lo, …, hi-1}` intersected with the universe.
    pub fn interval(universe: Universe, lo: usize, hi: usize) -> EpSet {
        EpSet::from_fn(universe, hi, 1, |k| lo <= k && k < hi).expect("period 1")
    }

    /// `{n, n+1, …}` intersected with the universe.
    pub fn tail(universe: Universe, n: usize) -> EpSet {
        EpSet::from_fn(universe, n, 1, |k| k >= n).expect("period 1")
    }

    /// `{0, …, n-1}` intersected with the universe.
    pub fn initial(universe: Universe, n: usize) -> EpSet {
        EpSet::interval(universe, 0, n)
    }

    fn canonical(mut self) -> EpSet {
        if let Universe::Finite(_) = self.universe {
            self.period = 1;
            self.pattern = vec![false];
            return self;
        }
        let p = self.period;
        if let Some(d) =
            (1..=p).filter(|d| p.is_multiple_of(*d)).find(|&d| (0..p).all(|r| self.pattern[r] == self.pattern[r % d]))
        {
            self.pattern.truncate(d);
            self.period = d;
        }
        while let Some(&last) = self.prefix.last() {
            let k = self.prefix.len() - 1;
            if last == self.pattern[k % self.period] {
                self.prefix.pop();
            } else {
                break;
            }
        }
        self
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn prefix_bits(&self) -> &[bool] {
        &self.prefix
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Residues `r < period` whose class is eventually contained in the set.
    pub fn pattern_residues(&self) -> Vec<usize> {
        (0..self.period).filter(|&r| self.pattern[r]).collect()
    }

    pub fn contains(&self, k: usize) -> bool {
        match self.prefix.get(k) {
            Some(&b) => b,
            None => self.pattern[k % self.period],
        }
    }

    /// Membership of `k` under the periodic rule alone, ignoring the prefix.
    pub fn pattern_at(&self, k: usize) -> bool {
        self.pattern[k % self.period]
    }

    pub fn is_empty(&self) -> bool {
        !self.prefix.iter().any(|&b| b) && !self.pattern.iter().any(|&b| b)
    }

    pub fn is_full(&self) -> bool {
        let pattern_full = match self.universe {
            Universe::Finite(_) => true,
            Universe::Naturals => self.pattern.iter().all(|&b| b),
        };
        self.prefix.iter().all(|&b| b) && pattern_full
    }

    pub fn is_finite(&self) -> bool {
        !self.pattern.iter().any(|&b| b)
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    /// Elements of a finite set in increasing order; `None` for infinite sets.
    pub fn elements(&self) -> Option<Vec<usize>> {
        if self.is_infinite() {
            return None;
        }
        Some((0..self.prefix.len()).filter(|&k| self.prefix[k]).collect())
    }

    /// Elements below `bound` in increasing order.
    pub fn elements_below(&self, bound: usize) -> impl Iterator<Item = usize> + '_ {
        let bound = match self.universe {
            Universe::Finite(n) => bound.min(n),
            Universe::Naturals => bound,
        };
        (0..bound).filter(move |&k| self.contains(k))
    }

    /// Number of elements of a finite set.
    pub fn cardinality(&self) -> Option<usize> {
        self.elements().map(|e| e.len())
    }

    /// The smallest element, if any.
    pub fn min_element(&self) -> Option<usize> {
        if let Some(k) = self.prefix.iter().position(|&b| b) {
            return Some(k);
        }
        let start = self.prefix.len();
        (start..start + self.period).find(|&k| self.pattern[k % self.period])
    }

    /// The smallest element `≥ from`, if any.
    pub fn next_element(&self, from: usize) -> Option<usize> {
        if let Some(k) = (from..self.prefix.len()).find(|&k| self.prefix[k]) {
            return Some(k);
        }
        if let Universe::Finite(_) = self.universe {
            return None;
        }
        let start = from.max(self.prefix.len());
        (start..start + self.period).find(|&k| self.pattern[k % self.period])
    }

    /// The set with the same periodic rule and no prefix exceptions. Equal to
    /// the original modulo a finite set; empty over a finite universe.
    pub fn pattern_only(&self) -> EpSet {
        EpSet {
            universe: self.universe,
            prefix: match self.universe {
                Universe::Naturals => vec![],
                Universe::Finite(n) => vec![false; n],
            },
            period: self.period,
            pattern: self.pattern.clone(),
        }
        .canonical()
    }

    pub fn combine(&self, other: &EpSet, op: impl Fn(bool, bool) -> bool) -> Result<EpSet> {
        self.universe.check(other.universe)?;
        match self.universe {
            Universe::Finite(_) => {
                Ok(EpSet::from_bits(self.prefix.iter().zip(&other.prefix).map(|(&a, &b)| op(a, b)).collect()))
            }
            Universe::Naturals => {
                let period = checked_lcm(self.period, other.period)?;
                let n = max(self.prefix.len(), other.prefix.len());
                let prefix = (0..n).map(|k| op(self.contains(k), other.contains(k))).collect();
                let pattern =
                    (0..period).map(|r| op(self.pattern[r % self.period], other.pattern[r % other.period])).collect();
                Ok(EpSet { universe: self.universe, prefix, period, pattern }.canonical())
            }
        }
    }

    pub fn meet(&self, other: &EpSet) -> Result<EpSet> {
        self.combine(other, |a, b| a && b)
    }

    pub fn join(&self, other: &EpSet) -> Result<EpSet> {
        self.combine(other, |a, b| a || b)
    }

    pub fn difference(&self, other: &EpSet) -> Result<EpSet> {
        self.combine(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &EpSet) -> Result<EpSet> {
        self.combine(other, |a, b| a != b)
    }

    pub fn complement(&self) -> EpSet {
        let pattern = match self.universe {
            Universe::Naturals => self.pattern.iter().map(|b| !b).collect(),
            Universe::Finite(_) => vec![false],
        };
        EpSet {
            universe: self.universe,
            prefix: self.prefix.iter().map(|b| !b).collect(),
            period: self.period,
            pattern,
        }
        .canonical()
    }

    pub fn is_subset(&self, other: &EpSet) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    pub fn is_disjoint(&self, other: &EpSet) -> Result<bool> {
        Ok(self.meet(other)?.is_empty())
    }

    /// Natural density `|pattern| / period`. Only defined over ℕ.
    pub fn natural_density(&self) -> Result<Rational> {
        if self.universe != Universe::Naturals {
            return Err(Error::UniverseMismatch { left: self.universe, right: Universe::Naturals });
        }
        Ok(self.pattern_density())
    }

    /// Density of the periodic rule; zero over finite universes.
    pub(crate) fn pattern_density(&self) -> Rational {
        if let Universe::Finite(_) = self.universe {
            return integer(0);
        }
        let count = self.pattern.iter().filter(|&&b| b).count();
        Rational::new(count.into(), self.period.into())
    }

    /// Density of `self ∩ other`, computed on the patterns alone.
    pub(crate) fn overlap_density(&self, other: &EpSet) -> Result<Rational> {
        self.universe.check(other.universe)?;
        if let Universe::Finite(_) = self.universe {
            return Ok(integer(0));
        }
        let l = checked_lcm(self.period, other.period)?;
        let count = (0..l).filter(|&r| self.pattern[r % self.period] && other.pattern[r % other.period]).count();
        Ok(Rational::new(count.into(), l.into()))
    }
}

fn bitstring(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Parse(format!("invalid bit `{c}` in `{s}`"))),
        })
        .collect()
}

impl fmt::Display for EpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.universe {
            Universe::Finite(_) => write!(f, "bits={}", bitstring(&self.prefix)),
            Universe::Naturals => {
                let residues: Vec<String> = self.pattern_residues().iter().map(|r| r.to_string()).collect();
                write!(f, "prefix={};period={};pattern={}", bitstring(&self.prefix), self.period, residues.join(","))
            }
        }
    }
}

impl FromStr for EpSet {
    type Err = Error;

    /// Accepts `bits=<bitstring>` or `prefix=<bits>;period=<p>;pattern=<residues>`,
    /// optionally wrapped in braces.
    fn from_str(s: &str) -> Result<EpSet> {
        let mut s = s.trim();
        if let Some(inner) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            s = inner.trim();
        }
        if let Some(bits) = s.strip_prefix("bits=") {
            return Ok(EpSet::from_bits(parse_bits(bits.trim())?));
        }
        let (mut prefix, mut period, mut pattern) = (None, None, None);
        for field in s.split(';') {
            let (key, value) =
                field.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got `{field}`")))?;
            let value = value.trim();
            let slot = match key.trim() {
                "prefix" => &mut prefix,
                "period" => &mut period,
                "pattern" => &mut pattern,
                other => return Err(Error::Parse(format!("unknown set field `{other}`"))),
            };
            if slot.replace(value).is_some() {
                return Err(Error::Parse(format!("duplicate set field `{}`", key.trim())));
            }
        }
        let missing = |name: &str| Error::Parse(format!("missing set field `{name}`"));
        let prefix = parse_bits(prefix.ok_or_else(|| missing("prefix"))?)?;
        let period: usize =
            period.ok_or_else(|| missing("period"))?.parse().map_err(|_| Error::Parse("invalid period".into()))?;
        if period == 0 {
            return Err(Error::Invariant("period must be at least 1".into()));
        }
        check_period(period)?;
        let mut bits = vec![false; period];
        let pattern = pattern.ok_or_else(|| missing("pattern"))?;
        for r in pattern.split(',').map(str::trim).filter(|r| !r.is_empty()) {
            let r: usize = r.parse().map_err(|_| Error::Parse(format!("invalid residue `{r}`")))?;
            if r >= period {
                return Err(Error::Invariant(format!("residue {r} out of range for period {period}")));
            }
            bits[r] = true;
        }
        Ok(EpSet { universe: Universe::Naturals, prefix, period, pattern: bits }.canonical())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn disjoint_and_complementary_residues() {
        assert!(EpSet::evens().meet(&EpSet::odds()).unwrap().is_empty());
        assert_eq!(EpSet::evens().join(&EpSet::odds()).unwrap(), EpSet::naturals());
    }

    #[test]
    fn multiples_of_four_minus_six() {
        let d = EpSet::multiples(4).unwrap().difference(&EpSet::multiples(6).unwrap()).unwrap();
        // residues 0..11: in 4ℤ and not in 6ℤ
        let expected: Vec<usize> = (0..12).filter(|r| r % 4 == 0 && r % 6 != 0).collect();
        assert_eq!(expected, vec![4, 8]);
        assert_eq!(d.period(), 12);
        assert_eq!(d.pattern_residues(), expected);
        assert_eq!(d.prefix_len(), 0);
    }

    #[test]
    fn densities() {
        assert_eq!(EpSet::evens().natural_density().unwrap(), ratio(1, 2));
        let with_one = EpSet::evens().join(&EpSet::singleton(Universe::Naturals, 1).unwrap()).unwrap();
        assert_eq!(with_one.natural_density().unwrap(), ratio(1, 2));
        assert_eq!(with_one.prefix_len(), 2);
        let p = EpSet::periodic(12, &[0, 4, 8]).unwrap();
        assert_eq!(p.period(), 4);
        assert_eq!(p.natural_density().unwrap(), ratio(1, 4));
        assert!(EpSet::from_bits(vec![true]).natural_density().is_err());
    }

    #[test]
    fn canonical_prefix_and_period() {
        let s: EpSet = "prefix=1010;period=4;pattern=0,2".parse().unwrap();
        assert_eq!(s, EpSet::evens());
        let t: EpSet = "prefix=0;period=1;pattern=0".parse().unwrap();
        assert_eq!(t, EpSet::tail(Universe::Naturals, 1));
        assert_eq!(t.to_string(), "prefix=0;period=1;pattern=0");
    }

    #[test]
    fn finite_sets() {
        let f = EpSet::finite(Universe::Naturals, &[3, 1]).unwrap();
        assert!(f.is_finite());
        assert_eq!(f.elements().unwrap(), vec![1, 3]);
        assert_eq!(f.period(), 1);
        assert!(EpSet::evens().is_infinite());
        assert_eq!(EpSet::evens().elements(), None);
        assert_eq!(EpSet::tail(Universe::Naturals, 5).min_element(), Some(5));
    }

    #[test]
    fn finite_universe() {
        let u = Universe::Finite(4);
        let a = EpSet::finite(u, &[0, 2]).unwrap();
        assert_eq!(a.complement(), EpSet::finite(u, &[1, 3]).unwrap());
        assert_eq!(a.to_string(), "bits=1010");
        assert_eq!("bits=1010".parse::<EpSet>().unwrap(), a);
        assert!(EpSet::finite(u, &[4]).is_err());
        assert!(!a.contains(7));
    }

    #[test]
    fn universe_mismatch() {
        let a = EpSet::from_bits(vec![true, false]);
        assert!(matches!(a.meet(&EpSet::evens()), Err(Error::UniverseMismatch { .. })));
    }

    #[test]
    fn period_guard() {
        let a = EpSet::residue_class(0, 999_983).unwrap();
        let b = EpSet::residue_class(0, 999_979).unwrap();
        assert!(matches!(a.meet(&b), Err(Error::PeriodLimit { .. })));
    }

    #[test]
    fn text_errors() {
        assert!("prefix=0;period=0;pattern=".parse::<EpSet>().is_err());
        assert!("prefix=0;period=2;pattern=2".parse::<EpSet>().is_err());
        assert!("prefix=2;period=2;pattern=".parse::<EpSet>().is_err());
        assert!("prefix=;period=2".parse::<EpSet>().is_err());
        assert_eq!("{prefix=;period=2;pattern=1}".parse::<EpSet>().unwrap(), EpSet::odds());
    }
}
