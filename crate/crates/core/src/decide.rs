//! Deciding provability in an automaton, with witnesses on both sides.
//!
//! In an automaton every premise of a rule instance has a shorter word than
//! its conclusion, so backward proof search terminates. An atom with no
//! proof in the automaton has a finite refutation in the complement of the
//! automaton, which is an automaton as well.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::complement::SignedSystem;
use crate::par::Exec;
use crate::proof::{Proof, Sequent};
use crate::rule::RuleId;
use crate::syntax::{Atom, Binding};
use crate::system::System;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Verdict {
    Provable,
    Refutable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Provable => "provable",
            Verdict::Refutable => "refutable",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error("rule {0} is not an introduction rule")]
    NotAutomaton(RuleId),
    #[error("{0} is refutable, so it has no proof")]
    NotProvable(Atom),
    #[error("{0} is provable, so it has no refutation")]
    NotRefutable(Atom),
    #[error("no complement rule refutes {0}")]
    NoRefutation(Atom),
}

/// Memoized decision procedure over an automaton `A` and its signed
/// complementation `A_B`.
pub struct DecisionSession<'a> {
    automaton: &'a System,
    signed: &'a SignedSystem,
    memo: HashMap<Atom, Verdict>,
    /// Rule instance used for each provable atom.
    witness: HashMap<Atom, (RuleId, Binding, Vec<Atom>)>,
    proofs: HashMap<Atom, Proof>,
    refutations: HashMap<Atom, Proof>,
}

impl<'a> DecisionSession<'a> {
    pub fn new(automaton: &'a System, signed: &'a SignedSystem) -> Result<Self, DecideError> {
        if let Some(r) = automaton.non_introduction_rules().next() {
            return Err(DecideError::NotAutomaton(r.id().clone()));
        }
        if let Some(r) = signed.negative().non_introduction_rules().next() {
            return Err(DecideError::NotAutomaton(r.id().clone()));
        }
        Ok(DecisionSession {
            automaton,
            signed,
            memo: HashMap::new(),
            witness: HashMap::new(),
            proofs: HashMap::new(),
            refutations: HashMap::new(),
        })
    }

    pub fn automaton(&self) -> &'a System {
        self.automaton
    }

    pub fn signed(&self) -> &'a SignedSystem {
        self.signed
    }

    /// Provable iff some rule instance concludes `atom` with all premises
    /// provable. Terminates because premises are strictly shorter.
    pub fn decide(&mut self, atom: &Atom) -> Verdict {
        if let Some(&v) = self.memo.get(atom) {
            return v;
        }
        let mut verdict = Verdict::Refutable;
        for inst in self.automaton.rule_instances_concluding(atom) {
            if inst
                .premises
                .iter()
                .all(|p| self.decide(p) == Verdict::Provable)
            {
                self.witness.insert(
                    atom.clone(),
                    (inst.rule.id().clone(), inst.binding, inst.premises),
                );
                verdict = Verdict::Provable;
                break;
            }
        }
        self.memo.insert(atom.clone(), verdict);
        verdict
    }

    /// Finite proof of `⊢ atom` in the automaton, from the first successful
    /// rule instance at every node.
    pub fn prove(&mut self, atom: &Atom) -> Result<Proof, DecideError> {
        if let Some(p) = self.proofs.get(atom) {
            return Ok(p.clone());
        }
        if self.decide(atom) != Verdict::Provable {
            return Err(DecideError::NotProvable(atom.clone()));
        }
        let (rule, binding, premises) = self.witness[atom].clone();
        let children = premises
            .iter()
            .map(|p| self.prove(p))
            .collect::<Result<Vec<_>, _>>()?;
        let proof = Proof::node(Sequent::proved(atom.clone()), rule, binding, children);
        self.proofs.insert(atom.clone(), proof.clone());
        Ok(proof)
    }

    /// Finite proof of `⊬ atom` in the negative side of `A_B`, from the first
    /// complement rule instance whose premises are all refutable.
    pub fn refute(&mut self, atom: &Atom) -> Result<Proof, DecideError> {
        if let Some(p) = self.refutations.get(atom) {
            return Ok(p.clone());
        }
        if self.decide(atom) != Verdict::Refutable {
            return Err(DecideError::NotRefutable(atom.clone()));
        }
        let negative = self.signed.negative();
        let chosen = negative
            .rule_instances_concluding(atom)
            .into_iter()
            .find(|inst| {
                inst.premises
                    .iter()
                    .all(|p| self.decide(p) == Verdict::Refutable)
            })
            .ok_or_else(|| DecideError::NoRefutation(atom.clone()))?;
        let children = chosen
            .premises
            .iter()
            .map(|p| self.refute(p))
            .collect::<Result<Vec<_>, _>>()?;
        let proof = Proof::node(
            Sequent::refuted(atom.clone()),
            chosen.rule.id().clone(),
            chosen.binding,
            children,
        );
        self.refutations.insert(atom.clone(), proof.clone());
        Ok(proof)
    }

    /// Number of atoms decided so far.
    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

/// Decides a batch of atoms. Work is split into chunks, each with its own
/// session, so the result does not depend on `exec`.
pub fn decide_all(
    automaton: &System,
    signed: &SignedSystem,
    atoms: &[Atom],
    exec: Exec,
) -> Result<Vec<Verdict>, DecideError> {
    DecisionSession::new(automaton, signed)?;
    Ok(exec.map_chunks(atoms, 32, |chunk| {
        let mut sess = DecisionSession::new(automaton, signed).expect("checked above");
        chunk.iter().map(|a| sess.decide(a)).collect()
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KleeneResult {
    pub set: BTreeSet<Atom>,
    /// A further step would not change `set`.
    pub stabilized: bool,
    /// Every suffix of a universe atom's word, under the same predicate, is
    /// also in the universe. Without this the result may miss atoms.
    pub suffix_closed: bool,
}

/// Iterates `X := F(X) ∩ U` from the empty set, at most `steps` times,
/// where `F(X)` holds the conclusions of rule instances with all premises
/// in `X`.
pub fn kleene(system: &System, universe: &[Atom], steps: usize, exec: Exec) -> KleeneResult {
    let members: BTreeSet<&Atom> = universe.iter().collect();
    let suffix_closed = universe.iter().all(|a| {
        a.word
            .suffixes()
            .all(|w| members.contains(&Atom::new(a.predicate.clone(), w)))
    });
    let mut set: BTreeSet<Atom> = BTreeSet::new();
    let mut stabilized = false;
    for _ in 0..steps {
        let hits = exec.map(universe, |a| {
            system
                .rule_instances_concluding(a)
                .iter()
                .any(|inst| inst.premises.iter().all(|p| set.contains(p)))
        });
        let next: BTreeSet<Atom> = universe
            .iter()
            .zip(hits)
            .filter(|(_, hit)| *hit)
            .map(|(a, _)| a.clone())
            .collect();
        if next == set {
            stabilized = true;
            break;
        }
        set = next;
    }
    KleeneResult {
        set,
        stabilized,
        suffix_closed,
    }
}
