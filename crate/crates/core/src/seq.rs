//! Sequences of algebra elements, the quotient modulo finitely many
//! coordinates, and the constructions that live on them.
//!
//! A sequence is stored as explicit coordinates for `n < N` and, for
//! `n >= N`, a periodic list of [`CoordinateRule`]s indexed by the absolute
//! phase `n mod L`. A rule does not give coordinate `n` as a fixed set:
//! it splits the points `k` by their offset `k - n` into a left region
//! (`k < n - w`), `2w` window offsets, and a right region (`k >= n + w`), each
//! with its own eventually periodic set. Constant sequences use the same set
//! everywhere; tail sequences `B ∩ [n, ∞)` use an empty left set; cumulative
//! unions and intersections need the window.
//!
//! Sequences are kept canonical. The periodic rules are in the normal form of
//! the quotient class (left sets exact, right and window sets modulo finite
//! sets, minimal window, minimal period) and the explicit prefix is as short
//! as possible, so two sequences are equal exactly when their structures are.

use std::cmp::max;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::charge::Charge;
use crate::epset::{checked_lcm, EpSet, Universe};
use crate::rational::{inverse_power_of_two, Rational};
use crate::text::{fields, split_list, strip_delimited};
use crate::{Error, Result};

/// How coordinate `n` is formed from the offsets `k - n` of its points.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoordinateRule {
    left: EpSet,
    window: Vec<EpSet>,
    right: EpSet,
}

impl CoordinateRule {
    /// Coordinate `n` is `a` for every `n`.
    pub fn constant(a: EpSet) -> CoordinateRule {
        CoordinateRule { left: a.clone(), window: vec![], right: a }
    }

    /// Coordinate `n` is `(left ∩ [0, n)) ∪ (right ∩ [n, ∞))`.
    pub fn split(left: EpSet, right: EpSet) -> Result<CoordinateRule> {
        CoordinateRule::new(left, vec![], right)
    }

    /// `window` holds the sets for offsets `-w..w`, so its length must be even.
    pub fn new(left: EpSet, window: Vec<EpSet>, right: EpSet) -> Result<CoordinateRule> {
        if !window.len().is_multiple_of(2) {
            return Err(Error::Invariant("window must have an even number of offsets".into()));
        }
        left.universe().check(right.universe())?;
        for s in &window {
            left.universe().check(s.universe())?;
        }
        Ok(CoordinateRule { left, window, right })
    }

    pub fn left(&self) -> &EpSet {
        &self.left
    }

    pub fn right(&self) -> &EpSet {
        &self.right
    }

    /// Sets for offsets `-w..w` in order.
    pub fn window(&self) -> &[EpSet] {
        &self.window
    }

    fn universe(&self) -> Universe {
        self.left.universe()
    }

    fn sets(&self) -> impl Iterator<Item = &EpSet> {
        std::iter::once(&self.left).chain(self.window.iter()).chain(std::iter::once(&self.right))
    }

    fn class_set(&self, w: usize, offset: i64) -> &EpSet {
        let w = w as i64;
        if offset < -w {
            &self.left
        } else if offset >= w {
            &self.right
        } else {
            &self.window[(offset + w) as usize]
        }
    }

    fn contains(&self, w: usize, k: usize, n: usize) -> bool {
        self.class_set(w, k as i64 - n as i64).contains(k)
    }

    fn coordinate(&self, w: usize, n: usize) -> Result<EpSet> {
        let period = checked_lcm(self.left.period(), self.right.period())?;
        let prefix = n + w + max(self.left.prefix_len(), self.right.prefix_len());
        EpSet::from_fn(self.universe(), prefix, period, |k| self.contains(w, k, n))
    }

    fn widen(&self, w_old: usize, w_new: usize) -> CoordinateRule {
        let window = (-(w_new as i64)..w_new as i64).map(|d| self.class_set(w_old, d).clone()).collect();
        CoordinateRule { left: self.left.clone(), window, right: self.right.clone() }
    }

    fn zip_with(&self, other: &CoordinateRule, op: &impl Fn(bool, bool) -> bool) -> Result<CoordinateRule> {
        Ok(CoordinateRule {
            left: self.left.combine(&other.left, op)?,
            window: self.window.iter().zip(&other.window).map(|(a, b)| a.combine(b, op)).collect::<Result<_>>()?,
            right: self.right.combine(&other.right, op)?,
        })
    }

    fn write_text(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.window.is_empty() && self.left == self.right {
            return write!(f, "{{{}}}", self.left);
        }
        write!(f, "split(")?;
        for s in self.sets().collect::<Vec<_>>().iter().take(self.window.len() + 1) {
            write!(f, "{{{s}}};")?;
        }
        write!(f, "{{{}}})", self.right)
    }

    fn parse(s: &str) -> Result<(CoordinateRule, usize)> {
        let s = s.trim();
        if s.starts_with('{') {
            let set: EpSet = s.parse()?;
            return Ok((CoordinateRule::constant(set), 0));
        }
        let body = s
            .strip_prefix("split")
            .ok_or_else(|| Error::Parse(format!("expected `{{set}}` or `split(…)`, got `{s}`")))?;
        let entries = split_list(strip_delimited(body, '(', ')')?)?;
        if entries.len() < 2 || entries.len() % 2 != 0 {
            return Err(Error::Parse(format!("split rule needs an even number (≥ 2) of sets, got {}", entries.len())));
        }
        let sets: Vec<EpSet> = entries.iter().map(|e| e.parse()).collect::<Result<_>>()?;
        let w = (sets.len() - 2) / 2;
        let left = sets[0].clone();
        let right = sets[sets.len() - 1].clone();
        let window = sets[1..sets.len() - 1].to_vec();
        Ok((CoordinateRule::new(left, window, right)?, w))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// An eventually periodic sequence of elements of one algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElementSequence {
    universe: Universe,
    prefix: Vec<EpSet>,
    /// Indexed by absolute phase `n mod rules.len()`.
    rules: Vec<CoordinateRule>,
    window: usize,
}

impl ElementSequence {
    pub fn constant(a: EpSet) -> ElementSequence {
        ElementSequence { universe: a.universe(), prefix: vec![], rules: vec![CoordinateRule::constant(a)], window: 0 }
    }

    pub fn zero(universe: Universe) -> ElementSequence {
        ElementSequence::constant(EpSet::empty(universe))
    }

    pub fn unit(universe: Universe) -> ElementSequence {
        ElementSequence::constant(EpSet::full(universe))
    }

    /// `n ↦ b ∩ {n, n+1, …}`.
    pub fn tails(b: &EpSet) -> ElementSequence {
        let raw = ElementSequence {
            universe: b.universe(),
            prefix: vec![],
            rules: vec![CoordinateRule { left: EpSet::empty(b.universe()), window: vec![], right: b.clone() }],
            window: 0,
        };
        raw.canonical().expect("tail sequences stay within the operand's period")
    }

    /// Explicit coordinates for `n < prefix.len()`, then `period[(n - N) mod len]`.
    pub fn from_coordinates(prefix: Vec<EpSet>, period: Vec<EpSet>) -> Result<ElementSequence> {
        let rules = period.into_iter().map(CoordinateRule::constant).collect();
        ElementSequence::from_rules(prefix, rules)
    }

    /// Explicit coordinates for `n < prefix.len()`, then `rules[(n - N) mod len]`.
    /// Rules with narrower windows are widened to the widest one.
    pub fn from_rules(prefix: Vec<EpSet>, rules: Vec<CoordinateRule>) -> Result<ElementSequence> {
        if rules.is_empty() {
            return Err(Error::Invariant("a sequence needs at least one periodic rule".into()));
        }
        let universe = rules[0].universe();
        for s in prefix.iter().chain(rules.iter().flat_map(|r| r.sets())) {
            universe.check(s.universe())?;
        }
        let w = rules.iter().map(|r| r.window.len() / 2).max().unwrap_or(0);
        let l = rules.len();
        let n = prefix.len();
        let mut abs = vec![None; l];
        for (i, r) in rules.iter().enumerate() {
            abs[(n + i) % l] = Some(r.widen(r.window.len() / 2, w));
        }
        let rules = abs.into_iter().map(|r| r.expect("every phase assigned")).collect();
        ElementSequence { universe, prefix, rules, window: w }.canonical()
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    /// Number of explicit leading coordinates.
    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn prefix(&self) -> &[EpSet] {
        &self.prefix
    }

    pub fn period(&self) -> usize {
        self.rules.len()
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Rules indexed by absolute phase `n mod period`.
    pub fn rules(&self) -> &[CoordinateRule] {
        &self.rules
    }

    pub fn rule_for(&self, n: usize) -> &CoordinateRule {
        &self.rules[n % self.rules.len()]
    }

    pub fn contains(&self, k: usize, n: usize) -> bool {
        match self.prefix.get(n) {
            Some(c) => c.contains(k),
            None => self.rule_for(n).contains(self.window, k, n),
        }
    }

    pub fn coordinate(&self, n: usize) -> Result<EpSet> {
        match self.prefix.get(n) {
            Some(c) => Ok(c.clone()),
            None => self.rule_for(n).coordinate(self.window, n),
        }
    }

    /// The coordinates `0..n`.
    pub fn coordinates(&self, n: usize) -> Result<Vec<EpSet>> {
        (0..n).map(|i| self.coordinate(i)).collect()
    }

    fn all_sets(&self) -> impl Iterator<Item = &EpSet> {
        self.prefix.iter().chain(self.rules.iter().flat_map(|r| r.sets()))
    }

    fn max_set_prefix(&self) -> usize {
        self.all_sets().map(|s| s.prefix_len()).max().unwrap_or(0)
    }

    fn set_period_lcm(&self) -> Result<usize> {
        self.all_sets().try_fold(self.rules.len(), |acc, s| checked_lcm(acc, s.period()))
    }

    fn aligned(&self, n: usize, l: usize, w: usize) -> Result<ElementSequence> {
        debug_assert!(n >= self.prefix.len() && l.is_multiple_of(self.rules.len()) && w >= self.window);
        Ok(ElementSequence {
            universe: self.universe,
            prefix: self.coordinates(n)?,
            rules: (0..l).map(|phi| self.rules[phi % self.rules.len()].widen(self.window, w)).collect(),
            window: w,
        })
    }

    /// Pointwise combination of two sequences.
    pub fn zip_with(&self, other: &ElementSequence, op: impl Fn(bool, bool) -> bool) -> Result<ElementSequence> {
        self.universe.check(other.universe)?;
        let n = max(self.prefix.len(), other.prefix.len());
        let l = checked_lcm(self.rules.len(), other.rules.len())?;
        let w = max(self.window, other.window);
        let a = self.aligned(n, l, w)?;
        let b = other.aligned(n, l, w)?;
        let prefix = a.prefix.iter().zip(&b.prefix).map(|(x, y)| x.combine(y, &op)).collect::<Result<_>>()?;
        let rules = a.rules.iter().zip(&b.rules).map(|(x, y)| x.zip_with(y, &op)).collect::<Result<_>>()?;
        ElementSequence { universe: self.universe, prefix, rules, window: w }.canonical()
    }

    pub fn meet(&self, other: &ElementSequence) -> Result<ElementSequence> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn join(&self, other: &ElementSequence) -> Result<ElementSequence> {
        self.zip_with(other, |a, b| a || b)
    }

    /// The pointwise difference `σ ∼ τ`.
    pub fn difference(&self, other: &ElementSequence) -> Result<ElementSequence> {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &ElementSequence) -> Result<ElementSequence> {
        self.zip_with(other, |a, b| a != b)
    }

    pub fn complement(&self) -> Result<ElementSequence> {
        ElementSequence::unit(self.universe).difference(self)
    }

    /// Whether every coordinate is empty.
    pub fn is_zero(&self) -> bool {
        *self == ElementSequence::zero(self.universe)
    }

    /// `n ↦ σ(n + 1)`.
    pub fn shifted(&self) -> Result<ElementSequence> {
        let l = self.rules.len();
        let w = self.window;
        let prefix = if self.prefix.is_empty() { vec![] } else { self.prefix[1..].to_vec() };
        let rules = (0..l)
            .map(|phi| {
                let old = &self.rules[(phi + 1) % l];
                // offset e = k - n relative to n is offset e - 1 relative to n + 1
                let window = (-(w as i64) - 1..w as i64 + 1).map(|e| old.class_set(w, e - 1).clone()).collect();
                CoordinateRule { left: old.left.clone(), window, right: old.right.clone() }
            })
            .collect();
        ElementSequence { universe: self.universe, prefix, rules, window: w + 1 }.canonical()
    }

    /// Whether `σ(n + 1) ⊆ σ(n)` for every `n`.
    pub fn is_decreasing(&self) -> Result<bool> {
        Ok(self.shifted()?.difference(self)?.is_zero())
    }

    pub fn is_increasing(&self) -> Result<bool> {
        Ok(self.difference(&self.shifted()?)?.is_zero())
    }

    /// Rejects non-decreasing sequences with the first offending index.
    pub fn require_decreasing(&self) -> Result<()> {
        let gap = self.shifted()?.difference(self)?;
        if gap.is_zero() {
            return Ok(());
        }
        let bound = gap.prefix.len() + gap.rules.len() * (gap.max_set_prefix() + 2 * gap.window + 2);
        for n in 0..=bound {
            if !gap.coordinate(n)?.is_empty() {
                return Err(Error::NotDecreasing { index: n + 1, previous: n });
            }
        }
        Err(Error::NotDecreasing { index: gap.prefix.len() + 1, previous: gap.prefix.len() })
    }

    /// First index from which `m(σ(n))` equals the per-phase eventual value.
    pub fn stable_index(&self, m: &Charge) -> usize {
        let after_atoms = m.max_atom().map_or(0, |x| x + self.window + 1);
        max(self.prefix.len(), after_atoms)
    }

    /// The constant value of `m(σ(n))` for large `n` in phase `phase`.
    pub fn eventual_value(&self, m: &Charge, phase: usize) -> Result<Rational> {
        self.universe.check(m.universe())?;
        let rule = &self.rules[phase % self.rules.len()];
        Ok(m.density_mass(&rule.right)? + m.atomic_mass(&rule.left)?)
    }

    /// Eventual values for every phase, indexed by absolute phase.
    pub fn eventual_values(&self, m: &Charge) -> Result<Vec<Rational>> {
        (0..self.rules.len()).map(|phi| self.eventual_value(m, phi)).collect()
    }

    /// `m(σ(n))` for `n < count`.
    pub fn values(&self, m: &Charge, count: usize) -> Result<Vec<Rational>> {
        (0..count).map(|n| m.evaluate(&self.coordinate(n)?)).collect()
    }

    /// `inf_n m(σ(n))`, exact.
    pub fn infimum(&self, m: &Charge) -> Result<Rational> {
        let stable = self.stable_index(m);
        let mut best: Option<Rational> = None;
        for v in self.values(m, stable)?.into_iter().chain(self.eventual_values(m)?) {
            best = Some(match best {
                Some(b) if b <= v => b,
                _ => v,
            });
        }
        Ok(best.unwrap_or_else(Rational::zero))
    }

    /// Pointwise cumulative union (or intersection) `n ↦ ⋃_{start ≤ j ≤ n} σ(j)`.
    /// Coordinates before `start` are the identity of the operation (empty for
    /// unions, the unit for intersections).
    pub fn cumulative(&self, start: usize, union: bool) -> Result<ElementSequence> {
        let u = self.universe;
        let l = self.rules.len();
        let s0 = max(start, self.prefix.len());
        let n1 = s0 + l;
        let w1 = self.window + l;
        let p = self.set_period_lcm()?;
        let b = self.max_set_prefix() + n1 + 2 * w1 + 2 * l + 2;
        let identity = !union;
        let oracle = |k: usize, n: usize| -> bool {
            if n < start {
                return identity;
            }
            if union {
                (start..=n).any(|j| self.contains(k, j))
            } else {
                (start..=n).all(|j| self.contains(k, j))
            }
        };

        let mut prefix = Vec::with_capacity(n1);
        let mut acc = if union { EpSet::empty(u) } else { EpSet::full(u) };
        for n in 0..n1 {
            if n >= start {
                let c = self.coordinate(n)?;
                acc = if union { acc.join(&c)? } else { acc.meet(&c)? };
            }
            prefix.push(acc.clone());
        }

        let first_in_phase = |lo: usize, phi: usize| lo + (phi + l - lo % l) % l;
        let mut rules = Vec::with_capacity(l);
        for phi in 0..l {
            let n_phi = first_in_phase(n1, phi);
            let left = EpSet::from_fn(u, b, p, |k| oracle(k, first_in_phase(max(n1, k + w1 + 1), phi)))?;
            let right = EpSet::from_fn(u, b, p, |k| k >= n_phi + w1 && oracle(k, n_phi))?;
            let window = (-(w1 as i64)..w1 as i64)
                .map(|d| {
                    EpSet::from_fn(u, b, p, |k| {
                        let n = k as i64 - d;
                        n >= n_phi as i64 && (n as usize) % l == phi && oracle(k, n as usize)
                    })
                })
                .collect::<Result<_>>()?;
            rules.push(CoordinateRule { left, window, right });
        }
        ElementSequence { universe: u, prefix, rules, window: w1 }.canonical()
    }

    /// Replaces the first coordinates with `coords`.
    pub fn with_leading(&self, coords: Vec<EpSet>) -> Result<ElementSequence> {
        for c in &coords {
            self.universe.check(c.universe())?;
        }
        let n = max(self.prefix.len(), coords.len());
        let mut a = self.aligned(n, self.rules.len(), self.window)?;
        for (i, c) in coords.into_iter().enumerate() {
            a.prefix[i] = c;
        }
        a.canonical()
    }

    fn canonical(self) -> Result<ElementSequence> {
        let (rules, w) = quotient_normal(self.universe, &self.rules, self.window)?;
        let normal = ElementSequence { universe: self.universe, prefix: vec![], rules, window: w };
        let horizon = self.prefix.len()
            + self.max_set_prefix()
            + 2 * self.window
            + 2 * max(self.rules.len(), normal.rules.len())
            + 1;
        let mut keep = 0;
        for n in (0..horizon).rev() {
            if self.coordinate(n)? != normal.coordinate(n)? {
                keep = n + 1;
                break;
            }
        }
        Ok(ElementSequence { prefix: self.coordinates(keep)?, ..normal })
    }

    fn relative_rules(&self) -> Vec<&CoordinateRule> {
        let l = self.rules.len();
        (0..l).map(|i| &self.rules[(self.prefix.len() + i) % l]).collect()
    }
}

/// Normal form of the periodic part: left sets exact, right sets reduced to
/// their pattern (or to the left set when the two agree modulo finite
/// sets), window sets reduced to their pattern on the residue class where
/// they are consulted, then minimal window and minimal period.
fn quotient_normal(universe: Universe, rules: &[CoordinateRule], w: usize) -> Result<(Vec<CoordinateRule>, usize)> {
    let l = rules.len();
    let mut rules: Vec<CoordinateRule> =
        rules.iter().enumerate().map(|(phi, r)| normalize_rule(universe, r, w, phi, l)).collect::<Result<_>>()?;

    let mut w = w;
    while w > 0 && mergeable(universe, &rules, w)? {
        for r in &mut rules {
            r.window.remove(0);
            r.window.pop();
        }
        w -= 1;
    }

    let mut l = l;
    for d in (1..l).filter(|d| l.is_multiple_of(*d)) {
        let fits = (0..l).all(|phi| rules[phi].left == rules[phi % d].left && rules[phi].right == rules[phi % d].right);
        if fits {
            let mut reduced: Vec<CoordinateRule> = rules[..d].to_vec();
            for phi in d..l {
                for i in 0..2 * w {
                    reduced[phi % d].window[i] = reduced[phi % d].window[i].join(&rules[phi].window[i])?;
                }
            }
            rules = reduced;
            l = d;
            break;
        }
    }
    debug_assert_eq!(rules.len(), l);
    Ok((rules, w))
}

fn residue_set(universe: Universe, r: i64, l: usize) -> Result<EpSet> {
    let r = r.rem_euclid(l as i64) as usize;
    match universe {
        Universe::Naturals => EpSet::residue_class(r, l),
        Universe::Finite(_) => Ok(EpSet::empty(universe)),
    }
}

fn normalize_rule(universe: Universe, r: &CoordinateRule, w: usize, phi: usize, l: usize) -> Result<CoordinateRule> {
    let right_pattern = r.right.pattern_only();
    let right = if r.left.pattern_only() == right_pattern { r.left.clone() } else { right_pattern };
    let window = (0..2 * w)
        .map(|i| {
            let d = i as i64 - w as i64;
            r.window[i].pattern_only().meet(&residue_set(universe, phi as i64 + d, l)?)
        })
        .collect::<Result<_>>()?;
    Ok(CoordinateRule { left: r.left.clone(), window, right })
}

fn agrees_on_residue(universe: Universe, a: &EpSet, b: &EpSet, r: i64, l: usize) -> Result<bool> {
    if let Universe::Finite(_) = universe {
        return Ok(true);
    }
    Ok(a.symmetric_difference(b)?.meet(&residue_set(universe, r, l)?)?.is_finite())
}

fn mergeable(universe: Universe, rules: &[CoordinateRule], w: usize) -> Result<bool> {
    let l = rules.len();
    for (phi, r) in rules.iter().enumerate() {
        let phi = phi as i64;
        if !agrees_on_residue(universe, &r.left, &r.window[0], phi - w as i64, l)?
            || !agrees_on_residue(universe, &r.right, &r.window[2 * w - 1], phi + w as i64 - 1, l)?
        {
            return Ok(false);
        }
    }
    Ok(true)
}

impl fmt::Display for ElementSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "prefix=[")?;
        for (i, c) in self.prefix.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{{{c}}}")?;
        }
        write!(f, "];period=[")?;
        for (i, r) in self.relative_rules().into_iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            r.write_text(f)?;
        }
        write!(f, "]")
    }
}

impl FromStr for ElementSequence {
    type Err = Error;

    /// `prefix=[{set};…];period=[rule;…]` where a rule is `{set}` or
    /// `split({left};{window…};{right})`.
    fn from_str(s: &str) -> Result<ElementSequence> {
        let (mut prefix, mut period) = (None, None);
        for (key, value) in fields(s)? {
            let slot = match key {
                "prefix" => &mut prefix,
                "period" => &mut period,
                other => return Err(Error::Parse(format!("unknown sequence field `{other}`"))),
            };
            if slot.replace(value).is_some() {
                return Err(Error::Parse(format!("duplicate sequence field `{key}`")));
            }
        }
        let prefix = prefix.ok_or_else(|| Error::Parse("missing sequence field `prefix`".into()))?;
        let period = period.ok_or_else(|| Error::Parse("missing sequence field `period`".into()))?;
        let prefix: Vec<EpSet> =
            split_list(strip_delimited(prefix, '[', ']')?)?.into_iter().map(str::parse).collect::<Result<_>>()?;
        let rules: Vec<CoordinateRule> = split_list(strip_delimited(period, '[', ']')?)?
            .into_iter()
            .map(|r| CoordinateRule::parse(r).map(|(rule, _)| rule))
            .collect::<Result<_>>()?;
        ElementSequence::from_rules(prefix, rules)
    }
}

/// The class of a sequence modulo sequences with finitely many non-empty
/// coordinates. Structural equality decides equality of classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuotientSeq {
    universe: Universe,
    rules: Vec<CoordinateRule>,
    window: usize,
}

impl QuotientSeq {
    pub fn of(s: &ElementSequence) -> QuotientSeq {
        // canonical sequences already carry the normal-form rules
        QuotientSeq { universe: s.universe, rules: s.rules.clone(), window: s.window }
    }

    /// A representative with no explicit prefix.
    pub fn representative(&self) -> ElementSequence {
        ElementSequence { universe: self.universe, prefix: vec![], rules: self.rules.clone(), window: self.window }
            .canonical()
            .expect("normal-form rules are already within the period guard")
    }

    pub fn is_zero(&self) -> bool {
        *self == QuotientSeq::of(&ElementSequence::zero(self.universe))
    }

    pub fn period(&self) -> usize {
        self.rules.len()
    }

    pub fn meet(&self, other: &QuotientSeq) -> Result<QuotientSeq> {
        Ok(QuotientSeq::of(&self.representative().meet(&other.representative())?))
    }

    pub fn join(&self, other: &QuotientSeq) -> Result<QuotientSeq> {
        Ok(QuotientSeq::of(&self.representative().join(&other.representative())?))
    }

    pub fn difference(&self, other: &QuotientSeq) -> Result<QuotientSeq> {
        Ok(QuotientSeq::of(&self.representative().difference(&other.representative())?))
    }

    /// `m̄(σ̄) = limsup_n m(σ(n))`.
    pub fn limsup(&self, m: &Charge) -> Result<Rational> {
        limsup_functional(m, &self.representative())
    }
}

/// `limsup_n m(σ(n))`, exact: the maximum of the per-phase eventual values.
pub fn limsup_functional(m: &Charge, s: &ElementSequence) -> Result<Rational> {
    Ok(s.eventual_values(m)?.into_iter().max().unwrap_or_else(Rational::zero))
}

/// Whether `s ∧ t` has only finitely many non-empty coordinates.
pub fn is_quasi_disjoint(s: &ElementSequence, t: &ElementSequence) -> Result<bool> {
    Ok(QuotientSeq::of(&s.meet(t)?).is_zero())
}

/// Upper and lower bounds modulo finite coordinates for a finite family:
/// `upper(n) = ⋃_{j ≤ n} σ_j(n)` and `lower(n) = ⋂_{j ≤ n} σ_j(n)`.
pub fn bounds_mod_finite(family: &[ElementSequence]) -> Result<(ElementSequence, ElementSequence)> {
    let (first, rest) = family.split_first().ok_or_else(|| Error::Precondition("bounds of an empty family".into()))?;
    let mut upper = first.clone();
    let mut lower = first.clone();
    for s in rest {
        upper = upper.join(s)?;
        lower = lower.meet(s)?;
    }
    let head = family.len() - 1;
    let mut up = Vec::with_capacity(head);
    let mut low = Vec::with_capacity(head);
    for n in 0..head {
        let mut u = first.coordinate(n)?;
        let mut l = u.clone();
        for s in &family[1..=n] {
            let c = s.coordinate(n)?;
            u = u.join(&c)?;
            l = l.meet(&c)?;
        }
        up.push(u);
        low.push(l);
    }
    Ok((upper.with_leading(up)?, lower.with_leading(low)?))
}

/// Sequences with an exponential rate of ν-convergence. For eventually
/// periodic data `sup_{k>n} ν(σ(n) △ σ(k))` is eventually periodic in `n`,
/// so `2^n` times it tends to zero exactly when it is eventually zero, i.e.
/// when σ is eventually ν-constant. Returns the failing `(n, k, mass)` if any.
pub fn exp_rate_witness(s: &ElementSequence, nu: &Charge) -> Result<Option<(usize, usize, Rational)>> {
    s.universe.check(nu.universe())?;
    let l = s.rules.len();
    let stable = s.stable_index(nu);
    for phi in 0..l {
        for psi in 0..l {
            let (a, b) = (&s.rules[phi], &s.rules[psi]);
            let mass = nu.density_mass(&a.right.symmetric_difference(&b.right)?)?
                + nu.atomic_mass(&a.left.symmetric_difference(&b.left)?)?;
            if !mass.is_zero() {
                let n = stable + (phi + l - stable % l) % l;
                let k = n + 1 + (psi + l - (n + 1) % l) % l;
                let mass = nu.evaluate(&s.coordinate(n)?.symmetric_difference(&s.coordinate(k)?)?)?;
                return Ok(Some((n, k, mass)));
            }
        }
    }
    Ok(None)
}

pub fn exp_rate_membership(s: &ElementSequence, nu: &Charge) -> Result<bool> {
    Ok(exp_rate_witness(s, nu)?.is_none())
}

/// Output of [`sandwich`]: `lower ≤ σ ≤ upper` from `start` on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sandwich {
    pub lower: ElementSequence,
    pub upper: ElementSequence,
    pub start: usize,
}

/// `sup_{k ≥ n} ν(σ(n) △ σ(k))`, exact.
fn oscillation_from(s: &ElementSequence, nu: &Charge, n: usize, stable: usize) -> Result<Rational> {
    let cn = s.coordinate(n)?;
    let mut best = Rational::zero();
    for k in n..max(stable, n) {
        best = max(best, nu.evaluate(&cn.symmetric_difference(&s.coordinate(k)?)?)?);
    }
    for r in &s.rules {
        let v = nu.density_mass(&cn.symmetric_difference(&r.right)?)?
            + nu.atomic_mass(&cn.symmetric_difference(&r.left)?)?;
        best = max(best, v);
    }
    Ok(best)
}

/// Sandwiches σ between a decreasing `lower` and an increasing `upper`
/// whose ν-limits are within `eps` of ν̄(σ̄). The start index `N` is the
/// least one with `2^-N < eps/2` and `sup_{k ≥ n ≥ N} ν(σ(n) △ σ(k)) < 2^-n`.
pub fn sandwich(s: &ElementSequence, nu: &Charge, eps: &Rational) -> Result<Sandwich> {
    if *eps <= Rational::zero() {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    if let Some((n, k, mass)) = exp_rate_witness(s, nu)? {
        return Err(Error::RateHypothesis { n, k, mass: crate::rational::format_rational(&mass) });
    }
    let half = eps / Rational::from_integer(2.into());
    let mut start = 0;
    while inverse_power_of_two(start) >= half {
        start += 1;
    }
    let stable = s.stable_index(nu);
    for n in (start..stable).rev() {
        if oscillation_from(s, nu, n, stable)? >= inverse_power_of_two(n) {
            start = n + 1;
            break;
        }
    }
    Ok(Sandwich { lower: s.cumulative(start, false)?, upper: s.cumulative(start, true)?, start })
}

/// Cumulative unions (increasing) or intersections (decreasing) from 0.
pub fn make_monotone(s: &ElementSequence, direction: Direction) -> Result<ElementSequence> {
    s.cumulative(0, direction == Direction::Increasing)
}
