//! Saturation of an alternating pushdown system.
//!
//! Saturation adds, for every non-introduction rule `g` and every choice of
//! introduction rules for its major premises, the simplified composition of
//! `g` with those rules. The introduction rules of the saturated system form
//! an automaton equivalent to the input, and every proof in the saturated
//! system can be rewritten into one that uses introduction rules only.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::proof::{Proof, Sequent};
use crate::rule::{compose_rule, ComposeError, Provenance, Rule, RuleId};
use crate::syntax::Atom;
use crate::system::{Inserted, System, SystemError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SaturationError {
    #[error("rule {0} is not an alternating pushdown rule")]
    NotAps(RuleId),
    #[error("saturation stopped after {0} rules")]
    Limit(usize),
    #[error("saturation produced {0}, which is outside the pushdown templates")]
    ShapeEscape(String),
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("composition chain revisits rule {0}")]
    RankCycle(RuleId),
    #[error("composition of {0} is missing from the saturated system")]
    MissingComposition(RuleId),
    #[error("unknown rule {0}")]
    UnknownRule(RuleId),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProofTransformError {
    #[error("unknown rule {0}")]
    UnknownRule(RuleId),
    #[error("composition of {0} is missing from the saturated system")]
    MissingComposition(RuleId),
    #[error("rule {0} has no provenance leading back to the base system")]
    MissingProvenance(RuleId),
    #[error("rule {rule} does not conclude {atom}")]
    Mismatch { rule: RuleId, atom: Atom },
    #[error("no subproof for premise {0}")]
    MissingSubproof(Atom),
    #[error(transparent)]
    Compose(#[from] ComposeError),
}

#[derive(Clone, Copy, Debug)]
pub struct SaturationOptions {
    /// Abort once the saturated system has more rules than this.
    pub max_rules: usize,
}

impl Default for SaturationOptions {
    fn default() -> Self {
        SaturationOptions { max_rules: 100_000 }
    }
}

/// A base system `I` together with its saturation `I'` and the rank of every
/// rule of `I'`.
#[derive(Clone, Debug)]
pub struct SaturatedSystem {
    base: System,
    rules: System,
    ranks: BTreeMap<RuleId, usize>,
}

impl SaturatedSystem {
    pub fn base(&self) -> &System {
        &self.base
    }

    pub fn rules(&self) -> &System {
        &self.rules
    }

    pub fn rank_table(&self) -> &BTreeMap<RuleId, usize> {
        &self.ranks
    }

    /// Rules added by saturation, in the order they were found.
    pub fn added(&self) -> impl Iterator<Item = &Rule> {
        self.rules
            .rules()
            .iter()
            .filter(|r| self.base.rule(r.id()).is_none())
    }

    pub fn rank(&self, id: &RuleId) -> Result<usize, SaturationError> {
        self.ranks
            .get(id)
            .copied()
            .ok_or_else(|| SaturationError::UnknownRule(id.clone()))
    }
}

/// Choices of introduction rules for the major premises of `g`, identity
/// elsewhere. With `fixed`, position `fixed.0` is restricted to `fixed.1`.
fn part_choices<'a>(
    system: &'a System,
    g: &Rule,
    fixed: Option<(usize, &'a Rule)>,
) -> Vec<Vec<Option<&'a Rule>>> {
    let mut choices: Vec<Vec<Option<&'a Rule>>> = vec![Vec::new()];
    for (i, premise) in g.premises().iter().enumerate() {
        let options: Vec<Option<&Rule>> = if !g.major().contains(&i) {
            vec![None]
        } else if let Some((pos, f)) = fixed.filter(|(pos, _)| *pos == i) {
            debug_assert_eq!(pos, i);
            vec![Some(f)]
        } else {
            system
                .rules_concluding_predicate(&premise.predicate)
                .filter(|f| f.is_intro() && crate::syntax::unify(premise, f.conclusion()).is_some())
                .map(Some)
                .collect()
        };
        if options.is_empty() {
            return Vec::new();
        }
        choices = choices
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(*o);
                    v
                })
            })
            .collect();
    }
    choices
}

/// All simplified compositions of `g`'s major premises with introduction
/// rules of `system`. The returned rules carry a placeholder id.
pub fn major_compositions(system: &System, g: &Rule) -> Vec<Rule> {
    compositions_inner(system, g, None)
}

fn compositions_inner(system: &System, g: &Rule, fixed: Option<(usize, &Rule)>) -> Vec<Rule> {
    if g.is_intro() {
        return Vec::new();
    }
    part_choices(system, g, fixed)
        .into_iter()
        .filter_map(|parts| compose_rule("?", g, &parts).ok())
        .collect()
}

pub fn saturate(system: &System) -> Result<SaturatedSystem, SaturationError> {
    saturate_with(system, SaturationOptions::default())
}

/// Worklist saturation. Every rule is processed once after it is added: a
/// non-introduction rule is composed with all current introduction rules, a
/// new introduction rule is plugged into every major position it fits.
pub fn saturate_with(
    system: &System,
    opts: SaturationOptions,
) -> Result<SaturatedSystem, SaturationError> {
    if let Some(r) = system.rules().iter().find(|r| !r.is_aps_shaped()) {
        return Err(SaturationError::NotAps(r.id().clone()));
    }
    let mut sat = system.clone();
    let mut queue: VecDeque<usize> = (0..sat.len()).collect();
    let mut fresh = 0usize;
    while let Some(idx) = queue.pop_front() {
        let rule = sat.rules()[idx].clone();
        let found: Vec<Rule> = if !rule.is_intro() {
            compositions_inner(&sat, &rule, None)
        } else {
            let mut out = Vec::new();
            for g in sat.non_introduction_rules() {
                for &pos in g.major() {
                    if g.premises()[pos].predicate == rule.conclusion().predicate {
                        out.extend(compositions_inner(&sat, g, Some((pos, &rule))));
                    }
                }
            }
            out
        };
        for h in found {
            if sat.contains_structural(&h) {
                continue;
            }
            if !h.is_aps_shaped() {
                return Err(SaturationError::ShapeEscape(h.to_string()));
            }
            fresh += 1;
            if let Inserted::Added(i) = sat.insert(h.with_id(format!("s{fresh}")))? {
                queue.push_back(i);
            }
            if sat.len() > opts.max_rules {
                return Err(SaturationError::Limit(opts.max_rules));
            }
        }
    }
    sat.mark_saturated();
    let ranks = compute_ranks(&sat)?;
    Ok(SaturatedSystem {
        base: system.clone(),
        rules: sat,
        ranks,
    })
}

fn compute_ranks(system: &System) -> Result<BTreeMap<RuleId, usize>, SaturationError> {
    fn visit(
        system: &System,
        rule: &Rule,
        memo: &mut HashMap<RuleId, usize>,
        on_stack: &mut HashSet<RuleId>,
    ) -> Result<usize, SaturationError> {
        if rule.is_intro() {
            return Ok(0);
        }
        if let Some(&r) = memo.get(rule.id()) {
            return Ok(r);
        }
        if !on_stack.insert(rule.id().clone()) {
            return Err(SaturationError::RankCycle(rule.id().clone()));
        }
        let mut best = 0;
        for h in major_compositions(system, rule) {
            let target = system
                .find_structural(&h)
                .ok_or_else(|| SaturationError::MissingComposition(rule.id().clone()))?;
            if !target.is_intro() {
                best = best.max(visit(system, target, memo, on_stack)?);
            }
        }
        on_stack.remove(rule.id());
        memo.insert(rule.id().clone(), best + 1);
        Ok(best + 1)
    }

    let mut memo = HashMap::new();
    let mut on_stack = HashSet::new();
    let mut table = BTreeMap::new();
    for rule in system.rules() {
        let r = visit(system, rule, &mut memo, &mut on_stack)?;
        table.insert(rule.id().clone(), r);
    }
    Ok(table)
}

/// Rank of a rule: 0 for introduction rules, otherwise one more than the
/// largest rank among its non-introduction compositions.
pub fn rank(ss: &SaturatedSystem, id: &RuleId) -> Result<usize, SaturationError> {
    ss.rank(id)
}

/// The introduction rules of the saturated system.
pub fn extract_automaton(ss: &SaturatedSystem) -> System {
    System::new(
        ss.rules.signature().clone(),
        ss.rules.introduction_rules().cloned(),
    )
    .expect("subset of a valid system")
}

/// Checks the closure property: every composition of a non-introduction
/// rule with introduction rules is present. Returns the missing ones.
pub fn missing_compositions(system: &System) -> Vec<(RuleId, Rule)> {
    let mut missing = Vec::new();
    for g in system.non_introduction_rules() {
        for h in major_compositions(system, g) {
            if !system.contains_structural(&h) {
                missing.push((g.id().clone(), h));
            }
        }
    }
    missing
}

fn is_intro_ended(system: &System, proof: &Proof) -> bool {
    proof
        .rule
        .as_ref()
        .and_then(|id| system.rule(id))
        .is_some_and(Rule::is_intro)
}

/// Path to the first cut in pre-order: a node whose rule is not an
/// introduction rule and whose major premises are all proved by subproofs
/// ending with introduction rules.
pub fn find_cut(system: &System, proof: &Proof) -> Option<Vec<usize>> {
    let mut found = None;
    proof.walk(&mut |path, node| {
        if found.is_some() {
            return;
        }
        let Some(rule) = node.rule.as_ref().and_then(|id| system.rule(id)) else {
            return;
        };
        if rule.is_intro() || node.children.len() != rule.premises().len() {
            return;
        }
        if rule
            .major()
            .iter()
            .all(|&i| is_intro_ended(system, &node.children[i]))
        {
            found = Some(path.to_vec());
        }
    });
    found
}

/// Rewrites a proof in the saturated system into a cut-free one with the
/// same conclusion, replacing each cut by the composed rule.
pub fn eliminate_cuts(ss: &SaturatedSystem, proof: &Proof) -> Result<Proof, ProofTransformError> {
    let children = proof
        .children
        .iter()
        .map(|c| eliminate_cuts(ss, c))
        .collect::<Result<Vec<_>, _>>()?;
    let mut node = Proof {
        children,
        ..proof.clone()
    };
    while let Some(rule) = node.rule.as_ref().and_then(|id| ss.rules.rule(id)) {
        if rule.is_intro() {
            break;
        }
        node = contract(ss, rule, node)?;
    }
    Ok(node)
}

/// Replaces a cut (all subproofs already cut-free) by one node of the
/// composed rule.
fn contract(ss: &SaturatedSystem, g: &Rule, node: Proof) -> Result<Proof, ProofTransformError> {
    let sys = &ss.rules;
    let mut parts: Vec<Option<&Rule>> = Vec::with_capacity(node.children.len());
    let mut pool: Vec<Proof> = Vec::new();
    for (i, child) in node.children.into_iter().enumerate() {
        if g.major().contains(&i) {
            let id = child
                .rule
                .clone()
                .ok_or_else(|| ProofTransformError::MissingSubproof(child.sequent.atom.clone()))?;
            let f = sys.rule(&id).ok_or(ProofTransformError::UnknownRule(id))?;
            parts.push(Some(f));
            pool.extend(child.children);
        } else {
            parts.push(None);
            pool.push(child);
        }
    }
    let composed = compose_rule("?", g, &parts)?;
    let h = sys
        .find_structural(&composed)
        .ok_or_else(|| ProofTransformError::MissingComposition(g.id().clone()))?;
    let sequent = node.sequent;
    let atom = &sequent.atom;
    let (binding, premises) =
        h.premises_for(atom)
            .ok_or_else(|| ProofTransformError::Mismatch {
                rule: h.id().clone(),
                atom: atom.clone(),
            })?;
    let children = premises
        .iter()
        .map(|p| {
            pool.iter()
                .find(|c| c.sequent.atom == *p)
                .cloned()
                .ok_or_else(|| ProofTransformError::MissingSubproof(p.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Proof::node(sequent, h.id().clone(), binding, children))
}

/// Turns a proof in the automaton into a proof in the base system by
/// replaying the composition history of every derived rule.
pub fn lift_proof(ss: &SaturatedSystem, proof: &Proof) -> Result<Proof, ProofTransformError> {
    let children = proof
        .children
        .iter()
        .map(|c| lift_proof(ss, c))
        .collect::<Result<Vec<_>, _>>()?;
    let id = proof
        .rule
        .as_ref()
        .ok_or_else(|| ProofTransformError::MissingSubproof(proof.sequent.atom.clone()))?;
    rebuild(ss, id, &proof.sequent.atom, children)
}

fn rebuild(
    ss: &SaturatedSystem,
    id: &RuleId,
    atom: &Atom,
    children: Vec<Proof>,
) -> Result<Proof, ProofTransformError> {
    let rule = ss
        .rules
        .rule(id)
        .ok_or_else(|| ProofTransformError::UnknownRule(id.clone()))?;
    let binding_for = |r: &Rule, a: &Atom| {
        r.premises_for(a)
            .ok_or_else(|| ProofTransformError::Mismatch {
                rule: r.id().clone(),
                atom: a.clone(),
            })
    };
    match rule.provenance() {
        Provenance::Primitive if ss.base.rule(id).is_some() => {
            let (binding, _) = binding_for(rule, atom)?;
            Ok(Proof::node(
                Sequent::proved(atom.clone()),
                id.clone(),
                binding,
                children,
            ))
        }
        Provenance::Composed(c) => {
            let g = ss
                .rules
                .rule(&c.base)
                .ok_or_else(|| ProofTransformError::UnknownRule(c.base.clone()))?;
            let (_, g_premises) = binding_for(g, atom)?;
            let mut k = 0;
            let mut take = || {
                let idx = c.premise_map[k];
                k += 1;
                children[idx].clone()
            };
            let mut subs = Vec::with_capacity(c.parts.len());
            for (i, part) in c.parts.iter().enumerate() {
                match part {
                    None => subs.push(take()),
                    Some(fid) => {
                        let f = ss
                            .rules
                            .rule(fid)
                            .ok_or_else(|| ProofTransformError::UnknownRule(fid.clone()))?;
                        let f_children = (0..f.premises().len()).map(|_| take()).collect();
                        subs.push(rebuild(ss, fid, &g_premises[i], f_children)?);
                    }
                }
            }
            rebuild(ss, &c.base, atom, subs)
        }
        _ => Err(ProofTransformError::MissingProvenance(id.clone())),
    }
}
