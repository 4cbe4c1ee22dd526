//! Inference rules over one-variable patterns.
//!
//! A rule concludes a pattern from an ordered list of premise patterns that
//! all share the same variable. Rules are classified by shape into the five
//! alternating-pushdown templates (plus a catch-all for derived rules) and
//! carry a flag telling whether they are introduction rules for the
//! word-length order.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{unify, Atom, Binding, InstantiateError, Pattern, Subst, Tail};

/// Stable rule identifier, unique within a system.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleId(Arc<str>);

impl RuleId {
    pub fn new(id: &str) -> Self {
        RuleId(Arc::from(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for RuleId {
    fn from(id: &str) -> Self {
        RuleId::new(id)
    }
}

impl From<String> for RuleId {
    fn from(id: String) -> Self {
        RuleId(Arc::from(id))
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum RuleClass {
    /// `P_1(x) ... P_n(x) / Q(a x)`, n >= 0, or any other introduction rule.
    Intro,
    /// `P_1(a x) P_2(x) ... P_n(x) / Q(x)`, n >= 1.
    Elim,
    /// `P_1(x) ... P_n(x) / Q(x)`, n >= 1.
    Neutral,
    /// `/ Q(x)`
    Arbitrary,
    /// `/ Q(eps)`
    Empty,
    /// Produced by composition or hatting, not an introduction rule, and not
    /// one of the templates above.
    DerivedNonIntro,
}

/// One choice of premise per positive rule: `(positive rule, premise index)`,
/// listed in the order of the positive rules sharing the conclusion.
pub type Selection = Vec<(RuleId, usize)>;

/// Record of how a derived rule was obtained by composition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Composition {
    pub base: RuleId,
    /// One entry per premise of `base`: the rule plugged in there, or `None`
    /// for the identity.
    pub parts: Vec<Option<RuleId>>,
    /// Position of every premise of the unsimplified composition (the
    /// concatenation of the parts' premises) in the simplified rule.
    pub premise_map: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub enum Provenance {
    #[default]
    Primitive,
    Composed(Arc<Composition>),
    /// Instance of `origin` specialising its conclusion to the basis.
    Hatted {
        origin: RuleId,
    },
    /// Complement rule; every selection that simplifies to this rule.
    Selected(Arc<Vec<Selection>>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule {0}: ground conclusion with a premise that mentions the variable")]
    UnboundVariable(RuleId),
    #[error("rule {0}: conclusion has a variable but premise {1} is ground")]
    MixedTails(RuleId, usize),
    #[error(transparent)]
    Instantiate(#[from] InstantiateError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComposeError {
    #[error("expected {expected} parts, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("premise {index} of {base} does not unify with the conclusion of {part}")]
    NoUnifier {
        base: RuleId,
        index: usize,
        part: RuleId,
    },
    #[error(transparent)]
    Rule(#[from] RuleError),
}

/// Structural identity of a rule: conclusion and the set of premises.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RuleKey {
    pub conclusion: Pattern,
    pub premises: BTreeSet<Pattern>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rule {
    id: RuleId,
    conclusion: Pattern,
    premises: Vec<Pattern>,
    class: RuleClass,
    intro: bool,
    major: Vec<usize>,
    provenance: Provenance,
}

/// Decides the introduction test on patterns: every instance's premises are
/// strictly shorter than its conclusion.
fn introduction_test(conclusion: &Pattern, premises: &[Pattern]) -> bool {
    let clen = conclusion.prefix.len();
    premises.iter().all(|p| match (conclusion.tail, p.tail) {
        (Tail::Var, Tail::Var) => p.prefix.len() < clen,
        (Tail::Var, Tail::Ground) => p.prefix.len() < clen,
        (Tail::Ground, Tail::Ground) => p.prefix.len() < clen,
        // rejected by validation
        (Tail::Ground, Tail::Var) => false,
    })
}

fn template_class(conclusion: &Pattern, premises: &[Pattern]) -> Option<RuleClass> {
    let all_var = |ps: &[Pattern]| {
        ps.iter()
            .all(|p| p.tail == Tail::Var && p.prefix.is_empty())
    };
    match (conclusion.tail, conclusion.prefix.len()) {
        (Tail::Var, 1) if all_var(premises) => Some(RuleClass::Intro),
        (Tail::Var, 0) => {
            if premises.is_empty() {
                Some(RuleClass::Arbitrary)
            } else if all_var(premises) {
                Some(RuleClass::Neutral)
            } else if premises[0].tail == Tail::Var
                && premises[0].prefix.len() == 1
                && all_var(&premises[1..])
            {
                Some(RuleClass::Elim)
            } else {
                None
            }
        }
        (Tail::Ground, 0) if premises.is_empty() => Some(RuleClass::Empty),
        _ => None,
    }
}

fn validate(id: &RuleId, conclusion: &Pattern, premises: &[Pattern]) -> Result<(), RuleError> {
    for (i, p) in premises.iter().enumerate() {
        match (conclusion.tail, p.tail) {
            (Tail::Ground, Tail::Var) => return Err(RuleError::UnboundVariable(id.clone())),
            (Tail::Var, Tail::Ground) => return Err(RuleError::MixedTails(id.clone(), i)),
            _ => {}
        }
    }
    Ok(())
}

/// Removes duplicate premises, keeping first occurrences. Returns the kept
/// premises and, for every input position, its position in the output.
pub fn dedup_premises(premises: &[Pattern]) -> (Vec<Pattern>, Vec<usize>) {
    let mut kept: Vec<Pattern> = Vec::with_capacity(premises.len());
    let mut seen: HashMap<&Pattern, usize> = HashMap::new();
    let mut map = Vec::with_capacity(premises.len());
    for p in premises {
        let pos = *seen.entry(p).or_insert_with(|| {
            kept.push(p.clone());
            kept.len() - 1
        });
        map.push(pos);
    }
    (kept, map)
}

impl Rule {
    /// Builds a rule; class, introduction flag and major premises are
    /// computed from the shape.
    pub fn new(
        id: impl Into<RuleId>,
        conclusion: Pattern,
        premises: Vec<Pattern>,
        provenance: Provenance,
    ) -> Result<Rule, RuleError> {
        let id = id.into();
        validate(&id, &conclusion, &premises)?;
        let (class, intro) = classify_shape(&conclusion, &premises);
        let major = default_major(class, premises.len());
        Ok(Rule {
            id,
            conclusion,
            premises,
            class,
            intro,
            major,
            provenance,
        })
    }

    pub fn id(&self) -> &RuleId {
        &self.id
    }

    pub fn conclusion(&self) -> &Pattern {
        &self.conclusion
    }

    pub fn premises(&self) -> &[Pattern] {
        &self.premises
    }

    pub fn class(&self) -> RuleClass {
        self.class
    }

    pub fn is_intro(&self) -> bool {
        self.intro
    }

    /// Positions of the major premises; empty for introduction rules.
    pub fn major(&self) -> &[usize] {
        &self.major
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_id(&self, id: impl Into<RuleId>) -> Rule {
        Rule {
            id: id.into(),
            ..self.clone()
        }
    }

    pub fn with_provenance(&self, provenance: Provenance) -> Rule {
        Rule {
            provenance,
            ..self.clone()
        }
    }

    pub fn is_ground(&self) -> bool {
        self.conclusion.is_ground()
    }

    /// True if the rule matches one of the five alternating-pushdown templates.
    pub fn is_aps_shaped(&self) -> bool {
        template_class(&self.conclusion, &self.premises).is_some()
    }

    pub fn is_simplified(&self) -> bool {
        dedup_premises(&self.premises).0.len() == self.premises.len()
    }

    pub fn key(&self) -> RuleKey {
        RuleKey {
            conclusion: self.conclusion.clone(),
            premises: self.premises.iter().cloned().collect(),
        }
    }

    pub fn match_conclusion(&self, atom: &Atom) -> Option<Binding> {
        self.conclusion.match_atom(atom)
    }

    /// Closed instance of the rule: conclusion and premise atoms.
    pub fn instance(&self, binding: &Binding) -> Result<(Atom, Vec<Atom>), RuleError> {
        let conclusion = self.conclusion.instantiate(binding)?;
        let premises = self
            .premises
            .iter()
            .map(|p| p.instantiate(binding))
            .collect::<Result<_, _>>()?;
        Ok((conclusion, premises))
    }

    /// Premise atoms of the instance concluding `atom`, if the rule applies.
    pub fn premises_for(&self, atom: &Atom) -> Option<(Binding, Vec<Atom>)> {
        let binding = self.match_conclusion(atom)?;
        let premises = self
            .premises
            .iter()
            .map(|p| p.instantiate(&binding))
            .collect::<Result<_, _>>()
            .ok()?;
        Some((binding, premises))
    }

    /// Applies a substitution to every pattern of the rule.
    pub fn substitute(&self, subst: &Subst) -> (Pattern, Vec<Pattern>) {
        (
            self.conclusion.substitute(subst),
            self.premises.iter().map(|p| p.substitute(subst)).collect(),
        )
    }
}

fn classify_shape(conclusion: &Pattern, premises: &[Pattern]) -> (RuleClass, bool) {
    let intro = introduction_test(conclusion, premises);
    let class = template_class(conclusion, premises).unwrap_or(if intro {
        RuleClass::Intro
    } else {
        RuleClass::DerivedNonIntro
    });
    (class, intro)
}

fn default_major(class: RuleClass, n: usize) -> Vec<usize> {
    match class {
        RuleClass::Intro | RuleClass::Arbitrary | RuleClass::Empty => Vec::new(),
        RuleClass::Elim => vec![0],
        RuleClass::Neutral | RuleClass::DerivedNonIntro => (0..n).collect(),
    }
}

/// Class of a rule and whether it passes the introduction test.
pub fn classify_rule(rule: &Rule) -> (RuleClass, bool) {
    (rule.class, rule.intro)
}

/// Removes duplicate premises (first occurrence wins) and remaps the major
/// positions. Idempotent.
pub fn simplify_rule(rule: &Rule) -> Rule {
    let (premises, map) = dedup_premises(&rule.premises);
    if premises.len() == rule.premises.len() {
        return rule.clone();
    }
    let mut major: Vec<usize> = rule.major.iter().map(|&i| map[i]).collect();
    major.sort_unstable();
    major.dedup();
    Rule {
        premises,
        major,
        ..rule.clone()
    }
}

/// Composes `base` with one rule (or the identity) per premise and simplifies.
///
/// The result's conclusion is `base`'s conclusion under the most general
/// unifier; its premises are the instantiated premises of the plugged rules,
/// in order, with identity positions keeping `base`'s premise.
pub fn compose_rule(
    id: impl Into<RuleId>,
    base: &Rule,
    parts: &[Option<&Rule>],
) -> Result<Rule, ComposeError> {
    if parts.len() != base.premises.len() {
        return Err(ComposeError::Arity {
            expected: base.premises.len(),
            got: parts.len(),
        });
    }
    // Running substitution for base's variable and, per position, the pieces
    // contributed so far. All of them share one variable.
    let mut base_subst = Subst::identity();
    let mut pieces: Vec<Option<Vec<Pattern>>> = vec![None; parts.len()];
    for (i, part) in parts.iter().enumerate() {
        let Some(f) = part else { continue };
        let premise = base.premises[i].substitute(&base_subst);
        let (on_base, on_part) =
            unify(&premise, &f.conclusion).ok_or_else(|| ComposeError::NoUnifier {
                base: base.id.clone(),
                index: i,
                part: f.id.clone(),
            })?;
        if !on_base.is_identity() {
            for piece in pieces.iter_mut().flatten() {
                for p in piece.iter_mut() {
                    *p = p.substitute(&on_base);
                }
            }
            base_subst = base_subst.then(&on_base);
        }
        pieces[i] = Some(f.premises.iter().map(|p| p.substitute(&on_part)).collect());
    }

    let conclusion = base.conclusion.substitute(&base_subst);
    let mut flat = Vec::new();
    let mut from_major = Vec::new();
    for (i, piece) in pieces.into_iter().enumerate() {
        let is_major = base.major.contains(&i);
        match piece {
            Some(ps) => {
                from_major.extend(std::iter::repeat_n(is_major, ps.len()));
                flat.extend(ps);
            }
            None => {
                from_major.push(is_major);
                flat.push(base.premises[i].substitute(&base_subst));
            }
        }
    }
    let (premises, premise_map) = dedup_premises(&flat);
    let provenance = Provenance::Composed(Arc::new(Composition {
        base: base.id.clone(),
        parts: parts.iter().map(|p| p.map(|f| f.id.clone())).collect(),
        premise_map: premise_map.clone(),
    }));
    let mut rule = Rule::new(id, conclusion, premises, provenance)?;
    if rule.class == RuleClass::DerivedNonIntro {
        let mut major: Vec<usize> = premise_map
            .iter()
            .zip(&from_major)
            .filter(|(_, m)| **m)
            .map(|(&pos, _)| pos)
            .collect();
        major.sort_unstable();
        major.dedup();
        if !major.is_empty() {
            rule.major = major;
        }
    }
    Ok(rule)
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.conclusion)?;
        if !self.premises.is_empty() {
            f.write_str(" <- ")?;
            for (i, p) in self.premises.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{p}")?;
            }
        }
        f.write_str(".")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Word;

    fn v(p: &str, prefix: &str) -> Pattern {
        Pattern::var(p, Word::parse(prefix))
    }

    fn g(p: &str, word: &str) -> Pattern {
        Pattern::ground(p, Word::parse(word))
    }

    fn rule(id: &str, c: Pattern, ps: Vec<Pattern>) -> Rule {
        Rule::new(id, c, ps, Provenance::Primitive).unwrap()
    }

    #[test]
    fn classify_templates() {
        let r = rule("r", v("Q", "a"), vec![v("U", "")]);
        assert_eq!(classify_rule(&r), (RuleClass::Intro, true));
        let r = rule("r", v("Q", ""), vec![v("P", "a")]);
        assert_eq!(classify_rule(&r), (RuleClass::Elim, false));
        assert_eq!(r.major(), &[0]);
        let r = rule("r", v("T", ""), vec![]);
        assert_eq!(classify_rule(&r), (RuleClass::Arbitrary, true));
        let r = rule("r", v("P", ""), vec![v("Q", ""), v("R", "")]);
        assert_eq!(classify_rule(&r), (RuleClass::Neutral, false));
        assert_eq!(r.major(), &[0, 1]);
        let r = rule("r", g("Q", ""), vec![]);
        assert_eq!(classify_rule(&r), (RuleClass::Empty, true));
        let r = rule("r", v("Q", "a"), vec![]);
        assert_eq!(classify_rule(&r), (RuleClass::Intro, true));
    }

    #[test]
    fn classify_derived_shapes() {
        // hatted elimination: Q(a x) <- P(a a x)
        let r = rule("r", v("Q", "a"), vec![v("P", "a a")]);
        assert_eq!(classify_rule(&r), (RuleClass::DerivedNonIntro, false));
        // Q(eps) <- P(a)
        let r = rule("r", g("Q", ""), vec![g("P", "a")]);
        assert_eq!(classify_rule(&r), (RuleClass::DerivedNonIntro, false));
        // R(a) <- T(eps) is an introduction rule outside the templates
        let r = rule("r", g("R", "a"), vec![g("T", "")]);
        assert_eq!(classify_rule(&r), (RuleClass::Intro, true));
        // P(a a x) <- U(x) is one too
        let r = rule("r", v("P", "a a"), vec![v("U", "")]);
        assert_eq!(classify_rule(&r), (RuleClass::Intro, true));
        assert!(!r.is_aps_shaped());
    }

    #[test]
    fn rejects_second_variable() {
        assert!(matches!(
            Rule::new("r", g("Q", ""), vec![v("P", "")], Provenance::Primitive),
            Err(RuleError::UnboundVariable(_))
        ));
        assert!(matches!(
            Rule::new("r", v("Q", ""), vec![g("P", "")], Provenance::Primitive),
            Err(RuleError::MixedTails(_, 0))
        ));
    }

    #[test]
    fn simplify_examples() {
        let r = rule("r", v("Q", ""), vec![v("P", ""), v("P", "")]);
        let s = simplify_rule(&r);
        assert_eq!(s.premises(), &[v("P", "")]);
        assert_eq!(s.major(), &[0]);
        assert_eq!(simplify_rule(&s), s);
        let r = rule("r", v("P", "a"), vec![v("T", ""), v("T", "")]);
        assert_eq!(simplify_rule(&r).premises(), &[v("T", "")]);
    }

    #[test]
    fn compose_neutral_with_intros() {
        let base = rule("g", v("P", ""), vec![v("Q", ""), v("R", "")]);
        let f1 = rule("f1", v("Q", "a"), vec![v("U", "")]);
        let f2 = rule("f2", v("R", "a"), vec![v("T", "")]);
        let h = compose_rule("h", &base, &[Some(&f1), Some(&f2)]).unwrap();
        assert_eq!(h.conclusion(), &v("P", "a"));
        assert_eq!(h.premises(), &[v("U", ""), v("T", "")]);
        assert!(h.is_intro());
    }

    #[test]
    fn compose_elim_with_intro() {
        let base = rule("g", v("Q", ""), vec![v("P", "a")]);
        let f = rule("f", v("P", "a"), vec![v("U", ""), v("T", "")]);
        let h = compose_rule("h", &base, &[Some(&f)]).unwrap();
        assert_eq!(h.to_string(), "Q(x) <- U(x), T(x).");
        assert_eq!(h.class(), RuleClass::Neutral);
        assert_eq!(h.major(), &[0, 1]);
    }

    #[test]
    fn compose_elim_with_arbitrary_collapses() {
        let base = rule("g", v("B", ""), vec![v("A", "a")]);
        let f = rule("f", v("A", ""), vec![]);
        let h = compose_rule("h", &base, &[Some(&f)]).unwrap();
        assert_eq!(h.to_string(), "B(x).");
        assert_eq!(h.class(), RuleClass::Arbitrary);
    }

    #[test]
    fn compose_identity_is_simplify() {
        let base = rule("g", v("Q", ""), vec![v("P", ""), v("P", "")]);
        let h = compose_rule("h", &base, &[None, None]).unwrap();
        assert_eq!(h.key(), simplify_rule(&base).key());
        assert_eq!(h.premises(), simplify_rule(&base).premises());
    }

    #[test]
    fn compose_clash() {
        let base = rule("g", v("Q", ""), vec![v("P", "b")]);
        let f = rule("f", v("P", "a"), vec![]);
        assert!(matches!(
            compose_rule("h", &base, &[Some(&f)]),
            Err(ComposeError::NoUnifier { index: 0, .. })
        ));
    }

    #[test]
    fn compose_grounds_everything() {
        // P(x) <- Q(x), R(x) with Q(eps) <- and R(x) <-
        let base = rule("g", v("P", ""), vec![v("Q", ""), v("R", "")]);
        let f1 = rule("f1", g("Q", ""), vec![]);
        let f2 = rule("f2", v("R", ""), vec![]);
        let h = compose_rule("h", &base, &[Some(&f1), Some(&f2)]).unwrap();
        assert_eq!(h.to_string(), "P(eps).");
        assert_eq!(h.class(), RuleClass::Empty);
        // order of specialisation does not matter
        let h2 = compose_rule("h", &base, &[None, Some(&f2)]).unwrap();
        assert_eq!(h2.to_string(), "P(x) <- Q(x).");
    }

    #[test]
    fn compose_later_position_specialises_earlier_pieces() {
        // P(x) <- Q(x), R(x) with Q(y) <- U(y) (neutral-ish) then R(a y) <- T(y)
        let base = rule("g", v("P", ""), vec![v("Q", ""), v("R", "")]);
        let f1 = rule("f1", v("Q", ""), vec![v("U", "")]);
        let f2 = rule("f2", v("R", "a"), vec![v("T", "")]);
        let h = compose_rule("h", &base, &[Some(&f1), Some(&f2)]).unwrap();
        assert_eq!(h.to_string(), "P(a x) <- U(a x), T(x).");
    }
}
