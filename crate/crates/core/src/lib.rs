//! Proofs and counter-proofs for alternating pushdown systems.
//!
//! The pipeline, starting from a rule system `I`:
//!
//! * [`saturation`] closes `I` under composition with introduction rules,
//!   giving `I'`, and extracts the automaton `A` (the introduction rules of
//!   `I'`), ranks, cut elimination and lifting of automaton proofs back to `I`.
//! * [`complement`] specialises conclusions to the basis `{P(eps), P(a x)}`
//!   and builds cross-product complements, yielding the signed systems `I_J`
//!   and `A_B`.
//! * [`decide`] decides provability in `A` and produces finite proofs of
//!   `⊢ A` or finite certificates of `⊬ A` in `A_B`; a Kleene-iteration
//!   oracle is kept for cross-checking.
//! * [`counterproof`] turns a finite certificate into a depth-bounded prefix
//!   of the possibly infinite counter-proof in `I_J`.

pub mod complement;
pub mod counterproof;
pub mod decide;
pub mod par;
pub mod pipeline;
pub mod proof;
pub mod random;
pub mod rule;
pub mod saturation;
pub mod syntax;
pub mod system;
pub mod text;

#[cfg(test)]
mod testutil;

pub use complement::{complement, complementation, hat, SignedSystem};
pub use counterproof::{combinatorial_select, CounterProofPrefix, UnfoldContext};
pub use decide::{kleene, DecisionSession, Verdict};
pub use par::Exec;
pub use pipeline::Pipeline;
pub use proof::{check_proof, CheckMode, Marker, Polarity, Proof, Sequent};
pub use rule::{classify_rule, compose_rule, simplify_rule, Rule, RuleClass, RuleId};
pub use saturation::{saturate, SaturatedSystem};
pub use syntax::{Atom, Binding, Pattern, Signature, Symbol, Tail, Word};
pub use system::System;
pub use text::{parse_atom, parse_rules, parse_system, print_system};
