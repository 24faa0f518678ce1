//! Exact finitely additive measures ("charges") on representable Boolean
//! algebras.
//!
//! The algebras are concrete: subsets of a finite universe `{0, …, n-1}`, or
//! eventually periodic subsets of ℕ. Every quantity the crate produces is an
//! exact rational, so the classical statements about domination, Lebesgue
//! decomposition, the sequence algebra modulo finite sets and uniform strong
//! additivity can be checked with equality rather than tolerances.
//!
//! Module map:
//!
//! * [`epset`] and [`subalgebra`]: algebra elements and finite subalgebras.
//! * [`charge`]: charges, evaluation, absolute continuity, decomposition.
//! * [`domination`]: control measures, orthogonal subfamilies, separators,
//!   singular witness sequences.
//! * [`seq`]: element sequences, the quotient modulo finite coordinates, the
//!   limsup functional and the sandwich construction.
//! * [`families`]: almost disjoint branch families, tail sequences, the
//!   quasi-disjoint census and the countable chain predicate.
//! * [`compactness`]: inner measures, the ψ functional, uniform strong
//!   additivity and the weak compactness verdict.

pub mod charge;
pub mod compactness;
pub mod domination;
pub mod epset;
pub mod families;
pub mod rational;
pub mod seq;
pub mod subalgebra;

mod error;
mod text;

pub use charge::{
    is_absolutely_continuous, is_singular, lebesgue_decompose, AbsoluteContinuity, Charge, ChargeFamily,
    DensityComponent, LebesgueDecomposition, NonDominationWitness,
};
pub use compactness::{
    e0_tail_search, inner_measure, psi_functional, usa_test, weak_compactness_check, DisjointSeqGen, UsaVerdict,
    WeakCompactnessVerdict,
};
pub use domination::{
    control_measure, find_separating_element, maximal_orthogonal_subfamily, singular_witness_sequence, ControlMeasure,
    SingularWitness,
};
pub use epset::{period_limit, EpSet, Universe};
pub use error::{Error, Result};
pub use families::{
    almost_disjoint_family, cc_predicate, quasi_disjoint_census, tail_sequence, Branch, CensusReport, Member,
    SetDescriptor,
};
pub use rational::{format_rational, parse_rational, ratio, Rational};
pub use seq::{
    bounds_mod_finite, exp_rate_membership, limsup_functional, make_monotone, sandwich, Direction, ElementSequence,
    QuotientSeq, Sandwich,
};
pub use subalgebra::FiniteSubalgebra;
