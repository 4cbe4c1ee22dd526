//! Finite rule sets indexed by id, by structure and by conclusion predicate.

use std::collections::HashMap;

use thiserror::Error;

use crate::rule::{Rule, RuleClass, RuleId, RuleKey};
use crate::syntax::{Atom, Binding, Predicate, Signature, SignatureError, Tail};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("duplicate rule id {0}")]
    DuplicateId(RuleId),
    #[error("rule {0} is structurally equal to rule {1}")]
    DuplicateRule(RuleId, RuleId),
    #[error("rule {0} has duplicate premises")]
    NotSimplified(RuleId),
    #[error("rule {0}: {1}")]
    Signature(RuleId, SignatureError),
}

/// Status flags. Shape flags are recomputed from the rules; `saturated` is
/// set by the saturation procedure only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SystemFlags {
    pub aps_shaped: bool,
    pub hatted: bool,
    pub saturated: bool,
    pub automaton: bool,
}

#[derive(Clone, Debug)]
pub struct System {
    signature: Signature,
    rules: Vec<Rule>,
    by_id: HashMap<RuleId, usize>,
    by_key: HashMap<RuleKey, usize>,
    by_predicate: HashMap<Predicate, Vec<usize>>,
    saturated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inserted {
    Added(usize),
    /// A structurally equal rule with this id was already there.
    Existing(RuleId),
}

/// A closed instance of a rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance<'a> {
    pub rule: &'a Rule,
    pub binding: Binding,
    pub premises: Vec<Atom>,
}

impl System {
    pub fn empty(signature: Signature) -> Self {
        System {
            signature,
            rules: Vec::new(),
            by_id: HashMap::new(),
            by_key: HashMap::new(),
            by_predicate: HashMap::new(),
            saturated: false,
        }
    }

    /// Builds a system; structurally equal rules are an error.
    pub fn new(
        signature: Signature,
        rules: impl IntoIterator<Item = Rule>,
    ) -> Result<Self, SystemError> {
        let mut sys = System::empty(signature);
        for rule in rules {
            if let Inserted::Existing(existing) = sys.insert(rule.clone())? {
                return Err(SystemError::DuplicateRule(rule.id().clone(), existing));
            }
        }
        Ok(sys)
    }

    /// Inserts a rule unless a structurally equal one is already present.
    pub fn insert(&mut self, rule: Rule) -> Result<Inserted, SystemError> {
        if self.by_id.contains_key(rule.id()) {
            return Err(SystemError::DuplicateId(rule.id().clone()));
        }
        if !rule.is_simplified() {
            return Err(SystemError::NotSimplified(rule.id().clone()));
        }
        for p in std::iter::once(rule.conclusion()).chain(rule.premises()) {
            self.signature
                .check_pattern(p)
                .map_err(|e| SystemError::Signature(rule.id().clone(), e))?;
        }
        let key = rule.key();
        if let Some(&idx) = self.by_key.get(&key) {
            return Ok(Inserted::Existing(self.rules[idx].id().clone()));
        }
        let idx = self.rules.len();
        self.by_id.insert(rule.id().clone(), idx);
        self.by_key.insert(key, idx);
        self.by_predicate
            .entry(rule.conclusion().predicate.clone())
            .or_default()
            .push(idx);
        self.rules.push(rule);
        Ok(Inserted::Added(idx))
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rule(&self, id: &RuleId) -> Option<&Rule> {
        self.by_id.get(id).map(|&i| &self.rules[i])
    }

    /// Structural lookup, up to premise order.
    pub fn find_structural(&self, rule: &Rule) -> Option<&Rule> {
        self.by_key.get(&rule.key()).map(|&i| &self.rules[i])
    }

    pub fn contains_structural(&self, rule: &Rule) -> bool {
        self.by_key.contains_key(&rule.key())
    }

    pub fn rules_concluding_predicate(&self, p: &Predicate) -> impl Iterator<Item = &Rule> {
        self.by_predicate
            .get(p)
            .into_iter()
            .flatten()
            .map(|&i| &self.rules[i])
    }

    pub fn mark_saturated(&mut self) {
        self.saturated = true;
    }

    pub fn flags(&self) -> SystemFlags {
        SystemFlags {
            aps_shaped: self.rules.iter().all(Rule::is_aps_shaped),
            hatted: self.rules.iter().all(|r| {
                let c = r.conclusion();
                match c.tail {
                    Tail::Var => c.prefix.len() == 1,
                    Tail::Ground => c.prefix.is_empty(),
                }
            }),
            saturated: self.saturated,
            automaton: self.rules.iter().all(Rule::is_intro),
        }
    }

    /// Every rule instance concluding `atom`, in system order. The result is
    /// finite since a rule has at most one binding for a given conclusion.
    pub fn rule_instances_concluding(&self, atom: &Atom) -> Vec<RuleInstance<'_>> {
        self.rules_concluding_predicate(&atom.predicate)
            .filter_map(|rule| {
                rule.premises_for(atom)
                    .map(|(binding, premises)| RuleInstance {
                        rule,
                        binding,
                        premises,
                    })
            })
            .collect()
    }

    pub fn introduction_rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(|r| r.is_intro())
    }

    pub fn non_introduction_rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(|r| !r.is_intro())
    }

    /// Counts of rules per class, for reporting.
    pub fn class_counts(&self) -> Vec<(RuleClass, usize)> {
        let mut counts: Vec<(RuleClass, usize)> = Vec::new();
        for r in &self.rules {
            match counts.iter_mut().find(|(c, _)| *c == r.class()) {
                Some((_, n)) => *n += 1,
                None => counts.push((r.class(), 1)),
            }
        }
        counts.sort();
        counts
    }
}
