//! From finite refutations in `A_B` to counter-proofs in `I_J`.
//!
//! For a refutable atom `A` and any rule instance of `I` concluding `A`,
//! some premise is refutable as well, and a refutation of it in `A_B` can be
//! computed from the refutation of `A` by induction on the rank of the rule.
//! Picking such a premise for every rule concluding `A` gives a selection,
//! hence a rule of the complement `J` concluding `⊬ A`; repeating on the
//! premises unfolds a possibly infinite proof in `I_J`, cut here at a depth
//! bound.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::complement::hatted_instance;
use crate::decide::{DecideError, DecisionSession, Verdict};
use crate::par::Exec;
use crate::pipeline::Pipeline;
use crate::proof::{Proof, Sequent};
use crate::rule::{compose_rule, ComposeError, Provenance, Rule, RuleId, Selection};
use crate::syntax::Atom;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CounterProofError {
    #[error("no family meets every set of {0} tuples")]
    Precondition(usize),
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error("rule {rule} does not conclude {atom}")]
    NoInstance { rule: RuleId, atom: Atom },
    #[error("unknown rule {0}")]
    UnknownRule(RuleId),
    #[error("composition of {0} is missing from the saturated system")]
    MissingComposition(RuleId),
    #[error("composed rule {0} has unexpected premises at {1}")]
    CompositionMismatch(RuleId, Atom),
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error("no positive rule {0} for the split of {1} at {2}")]
    MissingSplit(String, RuleId, Atom),
    #[error("selection for {0} matches no complement rule")]
    NoComplementRule(Atom),
    #[error("no premise of {0} is refutable at {1}")]
    NoRefutablePremise(RuleId, Atom),
    #[error("rule {0} has no origin in the original system")]
    MissingOrigin(RuleId),
    #[error("selection work limit of {0} tuples exceeded")]
    WorkLimit(usize),
}

/// Index of a family all of whose sets meet `w`, given that every union of
/// one set per family meets `w`. Follows the induction on the number of
/// families: if the first `n - 1` families already satisfy the hypothesis,
/// recurse on them, otherwise the last family is the answer. This yields the
/// smallest such index. Indices are 0-based.
pub fn combinatorial_select<T: Ord>(
    families: &[Vec<BTreeSet<T>>],
    w: &BTreeSet<T>,
) -> Result<usize, CounterProofError> {
    let hits = |s: &BTreeSet<T>| s.iter().any(|x| w.contains(x));
    // Some union misses `w` iff every family has a set missing `w`.
    let hypothesis = |n: usize| families[..n].iter().any(|f| f.iter().all(hits));
    let n = families.len();
    if n == 0 || !hypothesis(n) {
        return Err(CounterProofError::Precondition(n));
    }
    let mut l = n;
    while l > 1 && hypothesis(l - 1) {
        l -= 1;
    }
    let found = l - 1;
    assert!(
        families[found].iter().all(hits),
        "combinatorial selection postcondition"
    );
    Ok(found)
}

/// A refutable premise of a rule instance and its refutation in `A_B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selected {
    pub index: usize,
    pub atom: Atom,
    pub refutation: Proof,
}

/// A branch whose sequent already occurs on the path from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopNote {
    pub path: Vec<usize>,
    /// Depth of the nearest ancestor with the same sequent (root = 0).
    pub ancestor: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterProofPrefix {
    pub proof: Proof,
    pub loops: Vec<LoopNote>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selector {
    /// Rank induction driven by the refutation of the conclusion.
    Efficient,
    /// First premise the decision procedure marks refutable.
    Naive,
}

pub const DEFAULT_WORK_LIMIT: usize = 1_000_000;

pub struct UnfoldContext<'a> {
    pipeline: &'a Pipeline,
    session: DecisionSession<'a>,
    memo: HashMap<(RuleId, Atom), Selected>,
    work: usize,
    work_limit: usize,
}

impl<'a> UnfoldContext<'a> {
    pub fn new(pipeline: &'a Pipeline) -> Self {
        UnfoldContext {
            pipeline,
            session: pipeline.session(),
            memo: HashMap::new(),
            work: 0,
            work_limit: DEFAULT_WORK_LIMIT,
        }
    }

    pub fn with_work_limit(mut self, limit: usize) -> Self {
        self.work_limit = limit;
        self
    }

    pub fn pipeline(&self) -> &'a Pipeline {
        self.pipeline
    }

    pub fn session(&mut self) -> &mut DecisionSession<'a> {
        &mut self.session
    }

    fn rule(&self, id: &RuleId) -> Result<&'a Rule, CounterProofError> {
        self.pipeline
            .saturated
            .rules()
            .rule(id)
            .ok_or_else(|| CounterProofError::UnknownRule(id.clone()))
    }

    fn require_refutable(&mut self, atom: &Atom) -> Result<(), CounterProofError> {
        match self.session.decide(atom) {
            Verdict::Refutable => Ok(()),
            Verdict::Provable => Err(DecideError::NotRefutable(atom.clone()).into()),
        }
    }

    /// For a rule `rule` of the saturated system concluding the refutable
    /// atom `atom`, a premise of that instance with its refutation in `A_B`.
    pub fn select_refutable_premise(
        &mut self,
        rule: &RuleId,
        atom: &Atom,
    ) -> Result<Selected, CounterProofError> {
        let key = (rule.clone(), atom.clone());
        if let Some(s) = self.memo.get(&key) {
            return Ok(s.clone());
        }
        self.require_refutable(atom)?;
        let g = self.rule(rule)?;
        let (_, premises) = g
            .premises_for(atom)
            .ok_or_else(|| CounterProofError::NoInstance {
                rule: rule.clone(),
                atom: atom.clone(),
            })?;
        let selected = if g.is_intro() {
            self.select_intro(g, atom, &premises)?
        } else {
            self.select_by_rank(g, atom, &premises)?
        };
        self.memo.insert(key, selected.clone());
        Ok(selected)
    }

    /// Rank 0: the refutation of `atom` ends with a complement rule whose
    /// selection names a premise of `g`.
    fn select_intro(
        &mut self,
        g: &Rule,
        atom: &Atom,
        premises: &[Atom],
    ) -> Result<Selected, CounterProofError> {
        let a_b = &self.pipeline.automaton_signed;
        let cert = self.session.refute(atom)?;
        let root = cert.rule.clone().expect("refutations are complete");
        let h = hatted_instance(a_b.positive(), g, atom).ok_or_else(|| {
            CounterProofError::MissingSplit("automaton".into(), g.id().clone(), atom.clone())
        })?;
        let (_, h_premises) =
            h.premises_for(atom)
                .ok_or_else(|| CounterProofError::NoInstance {
                    rule: h.id().clone(),
                    atom: atom.clone(),
                })?;
        let selection = a_b
            .selections(&root)
            .first()
            .ok_or_else(|| CounterProofError::NoComplementRule(atom.clone()))?;
        let &(_, j) = selection
            .iter()
            .find(|(id, _)| id == h.id())
            .ok_or_else(|| CounterProofError::NoComplementRule(atom.clone()))?;
        let chosen = &h_premises[j];
        let index = premises
            .iter()
            .position(|p| p == chosen)
            .expect("split keeps premises");
        let refutation = cert
            .children
            .iter()
            .find(|c| c.atom() == chosen)
            .cloned()
            .expect("selected premise is a premise of the certificate root");
        Ok(Selected {
            index,
            atom: chosen.clone(),
            refutation,
        })
    }

    /// Rank > 0: recurse on the compositions of `g` with the introduction
    /// rules proving its major premises, then pick a family.
    fn select_by_rank(
        &mut self,
        g: &Rule,
        atom: &Atom,
        premises: &[Atom],
    ) -> Result<Selected, CounterProofError> {
        let sys = self.pipeline.saturated.rules();
        // Per premise: (part rule, premise set of its instance).
        let mut families: Vec<Vec<(Option<&'a Rule>, BTreeSet<Atom>)>> =
            Vec::with_capacity(premises.len());
        for (i, c) in premises.iter().enumerate() {
            if !g.major().contains(&i) {
                families.push(vec![(None, BTreeSet::from([c.clone()]))]);
                continue;
            }
            let intros: Vec<_> = self
                .pipeline
                .saturated
                .rules()
                .rule_instances_concluding(c)
                .into_iter()
                .filter(|inst| inst.rule.is_intro())
                .map(|inst| {
                    let rule: &'a Rule = self.rule(inst.rule.id()).expect("same system");
                    (
                        Some(rule),
                        inst.premises.into_iter().collect::<BTreeSet<_>>(),
                    )
                })
                .collect();
            if intros.is_empty() {
                // Nothing in the automaton concludes this premise.
                let refutation = self.session.refute(c)?;
                return Ok(Selected {
                    index: i,
                    atom: c.clone(),
                    refutation,
                });
            }
            families.push(intros);
        }

        let mut w: BTreeSet<Atom> = BTreeSet::new();
        let mut proofs: HashMap<Atom, Proof> = HashMap::new();
        let mut idx = vec![0usize; families.len()];
        loop {
            self.work += 1;
            if self.work > self.work_limit {
                return Err(CounterProofError::WorkLimit(self.work_limit));
            }
            let parts: Vec<Option<&Rule>> =
                families.iter().zip(&idx).map(|(f, &j)| f[j].0).collect();
            let composed = compose_rule("?", g, &parts)?;
            let h = sys
                .find_structural(&composed)
                .ok_or_else(|| CounterProofError::MissingComposition(g.id().clone()))?;
            let union: BTreeSet<Atom> = families
                .iter()
                .zip(&idx)
                .flat_map(|(f, &j)| f[j].1.iter().cloned())
                .collect();
            let (_, h_premises) =
                h.premises_for(atom)
                    .ok_or_else(|| CounterProofError::NoInstance {
                        rule: h.id().clone(),
                        atom: atom.clone(),
                    })?;
            if h_premises.iter().cloned().collect::<BTreeSet<_>>() != union {
                return Err(CounterProofError::CompositionMismatch(
                    h.id().clone(),
                    atom.clone(),
                ));
            }
            let k = self.select_refutable_premise(&h.id().clone(), atom)?;
            proofs.entry(k.atom.clone()).or_insert(k.refutation);
            w.insert(k.atom);

            let mut pos = idx.len();
            let done = loop {
                if pos == 0 {
                    break true;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < families[pos].len() {
                    break false;
                }
                idx[pos] = 0;
            };
            if done {
                break;
            }
        }

        let sets: Vec<Vec<BTreeSet<Atom>>> = families
            .iter()
            .map(|f| f.iter().map(|(_, s)| s.clone()).collect())
            .collect();
        let l = combinatorial_select(&sets, &w)?;
        let c_l = &premises[l];
        if !g.major().contains(&l) {
            let refutation = proofs[c_l].clone();
            return Ok(Selected {
                index: l,
                atom: c_l.clone(),
                refutation,
            });
        }
        let refutation = self.assemble(c_l, &w, &proofs)?;
        Ok(Selected {
            index: l,
            atom: c_l.clone(),
            refutation,
        })
    }

    /// Refutation of `atom` from refutations of atoms in `w`, one of which
    /// occurs among the premises of every automaton rule concluding `atom`.
    fn assemble(
        &self,
        atom: &Atom,
        w: &BTreeSet<Atom>,
        proofs: &HashMap<Atom, Proof>,
    ) -> Result<Proof, CounterProofError> {
        let a_b = &self.pipeline.automaton_signed;
        let b = crate::complement::basis_of(atom);
        let mut selection: Selection = Vec::new();
        for h in a_b
            .positive()
            .rules_concluding_predicate(&atom.predicate)
            .filter(|r| *r.conclusion() == b)
        {
            let (_, ps) = h
                .premises_for(atom)
                .ok_or_else(|| CounterProofError::NoInstance {
                    rule: h.id().clone(),
                    atom: atom.clone(),
                })?;
            let j = ps
                .iter()
                .position(|p| w.contains(p))
                .ok_or_else(|| CounterProofError::NoComplementRule(atom.clone()))?;
            selection.push((h.id().clone(), j));
        }
        let rule = a_b
            .rule_for_selection(&b, &selection)
            .ok_or_else(|| CounterProofError::NoComplementRule(atom.clone()))?;
        let (binding, ps) =
            rule.premises_for(atom)
                .ok_or_else(|| CounterProofError::NoInstance {
                    rule: rule.id().clone(),
                    atom: atom.clone(),
                })?;
        let children = ps.iter().map(|p| proofs[p].clone()).collect();
        Ok(Proof::node(
            Sequent::refuted(atom.clone()),
            rule.id().clone(),
            binding,
            children,
        ))
    }

    /// The first premise the decision procedure marks refutable.
    pub fn select_refutable_premise_naive(
        &mut self,
        rule: &RuleId,
        atom: &Atom,
    ) -> Result<Selected, CounterProofError> {
        self.require_refutable(atom)?;
        let g = self.rule(rule)?;
        let (_, premises) = g
            .premises_for(atom)
            .ok_or_else(|| CounterProofError::NoInstance {
                rule: rule.clone(),
                atom: atom.clone(),
            })?;
        for (index, c) in premises.iter().enumerate() {
            if self.session.decide(c) == Verdict::Refutable {
                let refutation = self.session.refute(c)?;
                return Ok(Selected {
                    index,
                    atom: c.clone(),
                    refutation,
                });
            }
        }
        Err(CounterProofError::NoRefutablePremise(
            rule.clone(),
            atom.clone(),
        ))
    }

    fn select(
        &mut self,
        selector: Selector,
        rule: &RuleId,
        atom: &Atom,
    ) -> Result<Selected, CounterProofError> {
        match selector {
            Selector::Efficient => self.select_refutable_premise(rule, atom),
            Selector::Naive => self.select_refutable_premise_naive(rule, atom),
        }
    }

    /// The complement rule instance of `I_J` concluding `⊬ atom`: its rule,
    /// binding and premises.
    pub fn complement_step(
        &mut self,
        selector: Selector,
        atom: &Atom,
    ) -> Result<(RuleId, crate::syntax::Binding, Vec<Atom>), CounterProofError> {
        let i_j = &self.pipeline.original_signed;
        let mut selection: Selection = Vec::new();
        for inst in i_j.positive().rule_instances_concluding(atom) {
            let origin = match inst.rule.provenance() {
                Provenance::Hatted { origin } => origin.clone(),
                _ => return Err(CounterProofError::MissingOrigin(inst.rule.id().clone())),
            };
            let chosen = self.select(selector, &origin, atom)?;
            let j = inst
                .premises
                .iter()
                .position(|p| *p == chosen.atom)
                .ok_or_else(|| {
                    CounterProofError::MissingSplit("original".into(), origin.clone(), atom.clone())
                })?;
            selection.push((inst.rule.id().clone(), j));
        }
        let rule = i_j
            .rule_for_selection(&crate::complement::basis_of(atom), &selection)
            .ok_or_else(|| CounterProofError::NoComplementRule(atom.clone()))?;
        let (binding, premises) =
            rule.premises_for(atom)
                .ok_or_else(|| CounterProofError::NoInstance {
                    rule: rule.id().clone(),
                    atom: atom.clone(),
                })?;
        Ok((rule.id().clone(), binding, premises))
    }

    /// Prefix of depth `depth` of the counter-proof of `⊬ atom` in `I_J`.
    /// Nodes at the frontier are unexpanded; `depth = 0` gives a single
    /// unexpanded root.
    pub fn unfold(
        &mut self,
        atom: &Atom,
        depth: usize,
    ) -> Result<CounterProofPrefix, CounterProofError> {
        self.unfold_with(Selector::Efficient, atom, depth)
    }

    pub fn unfold_naive(
        &mut self,
        atom: &Atom,
        depth: usize,
    ) -> Result<CounterProofPrefix, CounterProofError> {
        self.unfold_with(Selector::Naive, atom, depth)
    }

    pub fn unfold_with(
        &mut self,
        selector: Selector,
        atom: &Atom,
        depth: usize,
    ) -> Result<CounterProofPrefix, CounterProofError> {
        self.require_refutable(atom)?;
        let mut loops = Vec::new();
        let mut path = Vec::new();
        let mut ancestors = Vec::new();
        let proof =
            self.unfold_node(selector, atom, depth, &mut path, &mut ancestors, &mut loops)?;
        Ok(CounterProofPrefix { proof, loops })
    }

    fn unfold_node(
        &mut self,
        selector: Selector,
        atom: &Atom,
        depth: usize,
        path: &mut Vec<usize>,
        ancestors: &mut Vec<Atom>,
        loops: &mut Vec<LoopNote>,
    ) -> Result<Proof, CounterProofError> {
        if let Some(ancestor) = ancestors.iter().rposition(|a| a == atom) {
            loops.push(LoopNote {
                path: path.clone(),
                ancestor,
            });
        }
        if depth == 0 {
            return Ok(Proof::unexpanded(Sequent::refuted(atom.clone())));
        }
        let (rule, binding, premises) = self.complement_step(selector, atom)?;
        ancestors.push(atom.clone());
        let mut children = Vec::with_capacity(premises.len());
        for (i, p) in premises.iter().enumerate() {
            path.push(i);
            children.push(self.unfold_node(selector, p, depth - 1, path, ancestors, loops)?);
            path.pop();
        }
        ancestors.pop();
        Ok(Proof::node(
            Sequent::refuted(atom.clone()),
            rule,
            binding,
            children,
        ))
    }
}

/// Unfolds several atoms, each with a fresh context.
pub fn unfold_all(
    pipeline: &Pipeline,
    atoms: &[Atom],
    depth: usize,
    exec: Exec,
) -> Vec<Result<CounterProofPrefix, CounterProofError>> {
    exec.map(atoms, |a| UnfoldContext::new(pipeline).unfold(a, depth))
}
