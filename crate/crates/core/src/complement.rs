//! Hatting, cross-product complements and signed complementations.
//!
//! The conclusion basis of a signature holds `P(eps)` and `P(a x)` for every
//! predicate `P` and symbol `a`; every closed atom is an instance of exactly
//! one basis pattern. A hatted system only concludes basis patterns, so the
//! rules able to conclude a given atom are exactly the rules with that
//! atom's basis pattern as conclusion. The complement then has, for each
//! basis pattern, one rule per way of picking one premise from each of
//! those rules.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::par::Exec;
use crate::proof::{Lookup, Polarity, ProofSystem};
use crate::rule::{simplify_rule, Provenance, Rule, RuleId, RuleKey, Selection};
use crate::syntax::{Atom, Pattern, Signature, Subst, Tail, Word};
use crate::system::{Inserted, System, SystemError};

/// Default bound on the complement rules generated for one basis pattern.
pub const DEFAULT_LIMIT: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplementError {
    #[error("rule {0} concludes {1}, which cannot be split over the basis")]
    NotHattable(RuleId, Pattern),
    #[error("rule {0} concludes {1}, which is not a basis pattern")]
    NotHatted(RuleId, Pattern),
    #[error("complement of {pattern} would have {count} rules (limit {limit})")]
    TooLarge {
        pattern: Pattern,
        count: u128,
        limit: usize,
    },
    #[error(transparent)]
    System(#[from] SystemError),
}

/// The conclusion basis in deterministic order: per predicate, `P(eps)`
/// first, then `P(a x)` in symbol order.
pub fn basis(signature: &Signature) -> Vec<Pattern> {
    let mut out = Vec::new();
    for p in signature.predicates() {
        out.push(Pattern::ground(p.clone(), Word::empty()));
        for a in signature.symbols() {
            out.push(Pattern::var(p.clone(), Word::from_symbols(vec![a.clone()])));
        }
    }
    out
}

/// The basis pattern an atom is an instance of.
pub fn basis_of(atom: &Atom) -> Pattern {
    match atom.word.symbols().first() {
        None => Pattern::ground(atom.predicate.clone(), Word::empty()),
        Some(a) => Pattern::var(atom.predicate.clone(), Word::from_symbols(vec![a.clone()])),
    }
}

fn in_basis(p: &Pattern) -> bool {
    match p.tail {
        Tail::Var => p.prefix.len() == 1,
        Tail::Ground => p.prefix.is_empty(),
    }
}

/// Equivalent system whose conclusions are all basis patterns. A rule
/// concluding `P(x)` becomes one rule for `x := eps` (id suffix `@eps`) and
/// one for each `x := a x` (id suffix `@a`). Every output rule records its
/// origin.
pub fn hat(system: &System) -> Result<System, ComplementError> {
    let mut out = System::empty(system.signature().clone());
    let mut add = |rule: Rule| -> Result<(), ComplementError> {
        // Two origins may specialise to the same rule; keeping one is enough.
        let _: Inserted = out.insert(rule)?;
        Ok(())
    };
    for rule in system.rules() {
        let origin = Provenance::Hatted {
            origin: rule.id().clone(),
        };
        let c = rule.conclusion();
        if in_basis(c) {
            add(rule.with_provenance(origin))?;
            continue;
        }
        if c.tail == Tail::Ground || !c.prefix.is_empty() {
            return Err(ComplementError::NotHattable(rule.id().clone(), c.clone()));
        }
        let mut substs = vec![("eps".to_string(), Subst::Close(Word::empty()))];
        for a in system.signature().symbols() {
            substs.push((
                a.to_string(),
                Subst::Extend(Word::from_symbols(vec![a.clone()])),
            ));
        }
        for (suffix, s) in substs {
            let (conclusion, premises) = rule.substitute(&s);
            let split = Rule::new(
                format!("{}@{suffix}", rule.id()),
                conclusion,
                premises,
                origin.clone(),
            )
            .expect("substitution keeps tails consistent");
            add(simplify_rule(&split))?;
        }
    }
    Ok(out)
}

/// The split of `origin` that concludes `atom`'s basis pattern, as stored
/// in `hatted = hat(system)`. The stored rule may carry another origin when
/// two splits coincide.
pub fn hatted_instance<'a>(hatted: &'a System, origin: &Rule, atom: &Atom) -> Option<&'a Rule> {
    origin.match_conclusion(atom)?;
    if in_basis(origin.conclusion()) {
        return hatted.find_structural(origin);
    }
    let s = match atom.word.symbols().first() {
        None => Subst::Close(Word::empty()),
        Some(a) => Subst::Extend(Word::from_symbols(vec![a.clone()])),
    };
    let (conclusion, premises) = origin.substitute(&s);
    let split = Rule::new("?", conclusion, premises, Provenance::Primitive).ok()?;
    hatted.find_structural(&simplify_rule(&split))
}

/// Premises of one complement rule and every selection that yields them.
type Group = (Vec<Pattern>, Vec<Selection>);

/// Complement rules for one basis pattern, in emission order, each with all
/// selections that simplify to it.
fn complement_group(
    conclusion: &Pattern,
    positives: &[&Rule],
    limit: usize,
) -> Result<Vec<Group>, ComplementError> {
    if positives.iter().any(|r| r.premises().is_empty()) {
        return Ok(Vec::new());
    }
    let count = positives
        .iter()
        .map(|r| r.premises().len() as u128)
        .try_fold(1u128, |acc, m| acc.checked_mul(m))
        .unwrap_or(u128::MAX);
    if count > limit as u128 {
        return Err(ComplementError::TooLarge {
            pattern: conclusion.clone(),
            count,
            limit,
        });
    }
    let mut groups: Vec<Group> = Vec::new();
    let mut seen: HashMap<RuleKey, usize> = HashMap::new();
    // Odometer over index tuples, last position fastest.
    let mut idx = vec![0usize; positives.len()];
    loop {
        let premises: Vec<Pattern> = positives
            .iter()
            .zip(&idx)
            .map(|(r, &j)| r.premises()[j].clone())
            .collect();
        let (premises, _) = crate::rule::dedup_premises(&premises);
        let selection: Selection = positives
            .iter()
            .zip(&idx)
            .map(|(r, &j)| (r.id().clone(), j))
            .collect();
        let key = RuleKey {
            conclusion: conclusion.clone(),
            premises: premises.iter().cloned().collect(),
        };
        match seen.get(&key) {
            Some(&i) => groups[i].1.push(selection),
            None => {
                seen.insert(key, groups.len());
                groups.push((premises, vec![selection]));
            }
        }
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return Ok(groups);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < positives[pos].premises().len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Cross-product complement of a hatted system. Rules are numbered `c1`,
/// `c2`, ... in basis order.
pub fn complement(system: &System) -> Result<System, ComplementError> {
    complement_with(system, DEFAULT_LIMIT, Exec::default())
}

pub fn complement_with(
    system: &System,
    limit: usize,
    exec: Exec,
) -> Result<System, ComplementError> {
    if let Some(r) = system.rules().iter().find(|r| !in_basis(r.conclusion())) {
        return Err(ComplementError::NotHatted(
            r.id().clone(),
            r.conclusion().clone(),
        ));
    }
    let patterns = basis(system.signature());
    let groups = exec.map(&patterns, |b| {
        let positives: Vec<&Rule> = system
            .rules_concluding_predicate(&b.predicate)
            .filter(|r| r.conclusion() == b)
            .collect();
        complement_group(b, &positives, limit)
    });
    let mut out = System::empty(system.signature().clone());
    let mut n = 0;
    for (b, group) in patterns.iter().zip(groups) {
        for (premises, selections) in group? {
            n += 1;
            let rule = Rule::new(
                format!("c{n}"),
                b.clone(),
                premises,
                Provenance::Selected(Arc::new(selections)),
            )
            .expect("premises share the conclusion's tail");
            out.insert(rule)?;
        }
    }
    Ok(out)
}

/// A positive system deriving `⊢` sequents and a negative one deriving `⊬`
/// sequents, with the negative rules indexed by the selections they realise.
#[derive(Clone, Debug)]
pub struct SignedSystem {
    positive: System,
    negative: System,
    by_selection: HashMap<(Pattern, Selection), RuleId>,
}

impl SignedSystem {
    pub fn new(positive: System, negative: System) -> Self {
        let mut by_selection = HashMap::new();
        for r in negative.rules() {
            if let Provenance::Selected(sels) = r.provenance() {
                for s in sels.iter() {
                    by_selection.insert((r.conclusion().clone(), s.clone()), r.id().clone());
                }
            }
        }
        SignedSystem {
            positive,
            negative,
            by_selection,
        }
    }

    pub fn positive(&self) -> &System {
        &self.positive
    }

    pub fn negative(&self) -> &System {
        &self.negative
    }

    /// The negative rule concluding the basis pattern `conclusion` obtained
    /// from this selection, if any.
    pub fn rule_for_selection(&self, conclusion: &Pattern, selection: &Selection) -> Option<&Rule> {
        self.by_selection
            .get(&(conclusion.clone(), selection.clone()))
            .and_then(|id| self.negative.rule(id))
    }

    /// Selections recorded for a negative rule; empty for unknown ids.
    pub fn selections(&self, id: &RuleId) -> &[Selection] {
        match self.negative.rule(id).map(Rule::provenance) {
            Some(Provenance::Selected(sels)) => sels,
            _ => &[],
        }
    }
}

impl ProofSystem for SignedSystem {
    fn signature(&self) -> &Signature {
        self.positive.signature()
    }

    fn lookup(&self, polarity: Polarity, id: &RuleId) -> Lookup<'_> {
        let (same, other) = match polarity {
            Polarity::Proved => (&self.positive, &self.negative),
            Polarity::Refuted => (&self.negative, &self.positive),
        };
        match (same.rule(id), other.rule(id)) {
            (Some(r), _) => Lookup::Found(r),
            (None, Some(_)) => Lookup::WrongPolarity,
            (None, None) => Lookup::Unknown,
        }
    }
}

/// Hats `system` and pairs it with its complement.
pub fn complementation(system: &System) -> Result<SignedSystem, ComplementError> {
    complementation_with(system, DEFAULT_LIMIT, Exec::default())
}

pub fn complementation_with(
    system: &System,
    limit: usize,
    exec: Exec,
) -> Result<SignedSystem, ComplementError> {
    let positive = hat(system)?;
    let negative = complement_with(&positive, limit, exec)?;
    Ok(SignedSystem::new(positive, negative))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{ex1_automaton, EX1};
    use crate::text::{parse_system, print_system};

    #[test]
    fn basis_partitions_atoms() {
        let sys = parse_system(EX1).unwrap();
        let b = basis(sys.signature());
        assert_eq!(b.len(), 7 * 2);
        for atom in sys.signature().atoms_up_to(3) {
            let hits: Vec<_> = b.iter().filter(|p| p.match_atom(&atom).is_some()).collect();
            assert_eq!(hits, vec![&basis_of(&atom)]);
        }
    }

    #[test]
    fn hat_of_example_has_eleven_rules() {
        let sys = parse_system(EX1).unwrap();
        let h = hat(&sys).unwrap();
        assert_eq!(h.len(), 11, "{}", print_system(&h));
        let text = print_system(&h);
        for line in [
            "T(eps).",
            "T(a x).",
            "Q(eps) <- P(a).",
            "Q(a x) <- P(a a x).",
            "P(eps) <- S(eps).",
        ] {
            assert!(text.lines().any(|l| l == line), "missing {line} in\n{text}");
        }
        assert!(h.flags().hatted);
        assert_eq!(hat(&h).unwrap().len(), 11);
    }

    #[test]
    fn hat_rejects_long_conclusions() {
        let sys = crate::text::parse_rules("Q(a a x) <- U(x).").unwrap();
        assert!(matches!(hat(&sys), Err(ComplementError::NotHattable(..))));
    }

    #[test]
    fn complement_of_example_automaton() {
        let auto = ex1_automaton();
        let signed = complementation(&auto).unwrap();
        let neg = signed.negative();
        let text = print_system(neg);
        assert_eq!(neg.len(), 15, "{text}");
        let p_ax: Vec<_> = neg
            .rules()
            .iter()
            .filter(|r| r.conclusion().to_string() == "P(a x)")
            .map(|r| r.to_string())
            .collect();
        assert_eq!(
            p_ax,
            vec![
                "P(a x) <- U(x), V(x).",
                "P(a x) <- U(x), T(x).",
                "P(a x) <- T(x), V(x).",
                "P(a x) <- T(x)."
            ]
        );
        assert!(neg.rules_concluding_predicate(&"T".into()).next().is_none());
        assert!(neg.rules().iter().all(Rule::is_intro));
        let t_sel = neg
            .rules()
            .iter()
            .find(|r| r.to_string() == "P(a x) <- T(x).")
            .unwrap();
        assert_eq!(signed.selections(t_sel.id()).len(), 1);
    }

    #[test]
    fn complement_contains_reference_rule() {
        let signed = complementation(&parse_system(EX1).unwrap()).unwrap();
        let expected = crate::text::parse_rules("Q(a x) <- P(a a x), U(x), V(x).").unwrap();
        assert!(
            signed.negative().contains_structural(&expected.rules()[0]),
            "{}",
            print_system(signed.negative())
        );
    }

    #[test]
    fn complement_limit() {
        let sys = parse_system("P(x) <- A(x), B(x).\nP(x) <- A(x), B(x), C(x).").unwrap();
        let h = hat(&sys).unwrap();
        assert!(matches!(
            complement_with(&h, 5, Exec::Sequential),
            Err(ComplementError::TooLarge { count: 6, .. })
        ));
        assert!(complement_with(&h, 6, Exec::Sequential).is_ok());
        assert!(matches!(
            complement(&sys),
            Err(ComplementError::NotHatted(..))
        ));
    }

    #[test]
    fn selection_index_round_trip() {
        let signed = complementation(&parse_system(EX1).unwrap()).unwrap();
        for r in signed.negative().rules() {
            for s in signed.selections(r.id()) {
                assert_eq!(
                    signed.rule_for_selection(r.conclusion(), s).unwrap().id(),
                    r.id()
                );
            }
        }
    }
}
