//! Closed atoms, one-variable patterns and the signature they live over.
//!
//! Every atom has the shape `P(w)` where `P` is a unary predicate and `w` is a
//! finite word of unary stack symbols. A [`Pattern`] is the schema `P(u x)` or
//! the closed atom `P(u)`; a rule never mentions more than one variable, so the
//! variable itself is implicit and always printed as `x`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Name of a unary predicate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate(Arc<str>);

/// Name of a unary function (stack) symbol.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

macro_rules! name_impls {
    ($ty:ident) => {
        impl $ty {
            pub fn new(name: &str) -> Self {
                $ty(Arc::from(name))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $ty {
            fn from(name: &str) -> Self {
                $ty::new(name)
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

name_impls!(Predicate);
name_impls!(Symbol);

/// A finite stack word. The empty word is printed as `eps`.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_symbols(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    /// Parses a whitespace separated list of symbol names; `eps` or an empty
    /// string is the empty word.
    pub fn parse(text: &str) -> Self {
        Word(
            text.split_whitespace()
                .filter(|s| *s != "eps")
                .map(Symbol::new)
                .collect(),
        )
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        out.extend(other.0.iter().cloned());
        Word(out)
    }

    pub fn push_front(&self, sym: Symbol) -> Word {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.push(sym);
        out.extend(self.0.iter().cloned());
        Word(out)
    }

    /// If `self = prefix · rest`, returns `rest`.
    pub fn strip_prefix(&self, prefix: &Word) -> Option<Word> {
        self.0
            .strip_prefix(prefix.0.as_slice())
            .map(|rest| Word(rest.to_vec()))
    }

    /// All suffixes, longest first (the word itself, then down to `eps`).
    pub fn suffixes(&self) -> impl Iterator<Item = Word> + '_ {
        (0..=self.0.len()).map(move |i| Word(self.0[i..].to_vec()))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("eps");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A closed proposition `P(w)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: Predicate,
    pub word: Word,
}

impl Atom {
    pub fn new(predicate: impl Into<Predicate>, word: Word) -> Self {
        Atom {
            predicate: predicate.into(),
            word,
        }
    }

    /// Shorthand used throughout the tests: `Atom::parse_simple("P", "a a")`.
    pub fn parse_simple(predicate: &str, word: &str) -> Self {
        Atom::new(predicate, Word::parse(word))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.predicate, self.word)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The end of a pattern's argument: the shared variable or the end of the word.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Tail {
    Var,
    Ground,
}

/// `P(u x)` when the tail is [`Tail::Var`], the closed atom `P(u)` otherwise.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    pub predicate: Predicate,
    pub prefix: Word,
    pub tail: Tail,
}

/// What the rule variable is bound to in one rule instance.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Binding {
    /// The rule is closed; nothing to bind.
    Ground,
    /// `x := w`.
    Suffix(Word),
}

impl Binding {
    pub fn word(&self) -> Option<&Word> {
        match self {
            Binding::Ground => None,
            Binding::Suffix(w) => Some(w),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstantiateError {
    #[error("pattern {0} has a variable but the binding is ground")]
    GroundBindingForVar(Pattern),
}

impl Pattern {
    pub fn var(predicate: impl Into<Predicate>, prefix: Word) -> Self {
        Pattern {
            predicate: predicate.into(),
            prefix,
            tail: Tail::Var,
        }
    }

    pub fn ground(predicate: impl Into<Predicate>, word: Word) -> Self {
        Pattern {
            predicate: predicate.into(),
            prefix: word,
            tail: Tail::Ground,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.tail == Tail::Ground
    }

    /// Matches the pattern against a closed atom and returns the binding.
    pub fn match_atom(&self, atom: &Atom) -> Option<Binding> {
        if self.predicate != atom.predicate {
            return None;
        }
        match self.tail {
            Tail::Var => atom.word.strip_prefix(&self.prefix).map(Binding::Suffix),
            Tail::Ground => (self.prefix == atom.word).then_some(Binding::Ground),
        }
    }

    /// Closes the pattern under a binding. A ground pattern ignores the
    /// binding and yields its own word.
    pub fn instantiate(&self, binding: &Binding) -> Result<Atom, InstantiateError> {
        match (self.tail, binding) {
            (Tail::Ground, _) => Ok(Atom::new(self.predicate.clone(), self.prefix.clone())),
            (Tail::Var, Binding::Suffix(w)) => {
                Ok(Atom::new(self.predicate.clone(), self.prefix.concat(w)))
            }
            (Tail::Var, Binding::Ground) => {
                Err(InstantiateError::GroundBindingForVar(self.clone()))
            }
        }
    }

    /// Applies a substitution for the shared variable.
    pub fn substitute(&self, subst: &Subst) -> Pattern {
        match (self.tail, subst) {
            (Tail::Ground, _) => self.clone(),
            (Tail::Var, Subst::Extend(w)) => {
                Pattern::var(self.predicate.clone(), self.prefix.concat(w))
            }
            (Tail::Var, Subst::Close(w)) => {
                Pattern::ground(self.predicate.clone(), self.prefix.concat(w))
            }
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        match self.tail {
            Tail::Ground => write!(f, "{}", self.prefix)?,
            Tail::Var => {
                for s in self.prefix.symbols() {
                    write!(f, "{s} ")?;
                }
                f.write_str("x")?;
            }
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Substitution for the single rule variable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Subst {
    /// `x := w x`
    Extend(Word),
    /// `x := w`
    Close(Word),
}

impl Subst {
    pub fn identity() -> Self {
        Subst::Extend(Word::empty())
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Subst::Extend(w) if w.is_empty())
    }

    /// `self` followed by `next`: `(x ↦ u x) ; (x ↦ v x) = x ↦ u v x`.
    pub fn then(&self, next: &Subst) -> Subst {
        match (self, next) {
            (Subst::Close(_), _) => self.clone(),
            (Subst::Extend(u), Subst::Extend(v)) => Subst::Extend(u.concat(v)),
            (Subst::Extend(u), Subst::Close(v)) => Subst::Close(u.concat(v)),
        }
    }
}

/// Most general unifier of two patterns whose variables are distinct.
///
/// Returns the substitution for the left pattern's variable and the one for
/// the right pattern's variable; after applying them both sides are equal and
/// share a single variable.
pub fn unify(left: &Pattern, right: &Pattern) -> Option<(Subst, Subst)> {
    if left.predicate != right.predicate {
        return None;
    }
    let (u, v) = (&left.prefix, &right.prefix);
    match (left.tail, right.tail) {
        (Tail::Var, Tail::Var) => {
            if let Some(rest) = v.strip_prefix(u) {
                Some((Subst::Extend(rest), Subst::identity()))
            } else {
                u.strip_prefix(v)
                    .map(|rest| (Subst::identity(), Subst::Extend(rest)))
            }
        }
        (Tail::Var, Tail::Ground) => v
            .strip_prefix(u)
            .map(|rest| (Subst::Close(rest), Subst::identity())),
        (Tail::Ground, Tail::Var) => u
            .strip_prefix(v)
            .map(|rest| (Subst::identity(), Subst::Close(rest))),
        (Tail::Ground, Tail::Ground) => (u == v).then(|| (Subst::identity(), Subst::identity())),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("name `{0}` is not of the form [A-Za-z0-9_]+")]
    BadName(String),
    #[error("name `{0}` is used both as a predicate and as a symbol")]
    Overlap(String),
    #[error("`{0}` is reserved")]
    Reserved(String),
    #[error("signature has no predicates")]
    NoPredicates,
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
}

/// The finite language: predicate names and stack symbol names.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Signature {
    predicates: BTreeSet<Predicate>,
    symbols: BTreeSet<Symbol>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Signature {
    pub fn new(
        predicates: impl IntoIterator<Item = Predicate>,
        symbols: impl IntoIterator<Item = Symbol>,
    ) -> Result<Self, SignatureError> {
        let predicates: BTreeSet<_> = predicates.into_iter().collect();
        let symbols: BTreeSet<_> = symbols.into_iter().collect();
        if predicates.is_empty() {
            return Err(SignatureError::NoPredicates);
        }
        for name in predicates
            .iter()
            .map(Predicate::as_str)
            .chain(symbols.iter().map(Symbol::as_str))
        {
            if !valid_name(name) {
                return Err(SignatureError::BadName(name.to_string()));
            }
        }
        for s in &symbols {
            if s.as_str() == "x" || s.as_str() == "eps" {
                return Err(SignatureError::Reserved(s.to_string()));
            }
            if predicates.contains(&Predicate::new(s.as_str())) {
                return Err(SignatureError::Overlap(s.to_string()));
            }
        }
        Ok(Signature {
            predicates,
            symbols,
        })
    }

    /// Convenience constructor from string slices.
    pub fn from_names(predicates: &[&str], symbols: &[&str]) -> Result<Self, SignatureError> {
        Signature::new(
            predicates.iter().map(|p| Predicate::new(p)),
            symbols.iter().map(|s| Symbol::new(s)),
        )
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Predicate> {
        self.predicates.iter()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter()
    }

    pub fn num_symbols(&self) -> usize {
        self.symbols.len()
    }

    pub fn has_predicate(&self, p: &Predicate) -> bool {
        self.predicates.contains(p)
    }

    pub fn has_symbol(&self, s: &Symbol) -> bool {
        self.symbols.contains(s)
    }

    pub fn check_word(&self, w: &Word) -> Result<(), SignatureError> {
        match w.symbols().iter().find(|s| !self.has_symbol(s)) {
            Some(s) => Err(SignatureError::UnknownSymbol(s.to_string())),
            None => Ok(()),
        }
    }

    pub fn check_atom(&self, a: &Atom) -> Result<(), SignatureError> {
        if !self.has_predicate(&a.predicate) {
            return Err(SignatureError::UnknownPredicate(a.predicate.to_string()));
        }
        self.check_word(&a.word)
    }

    pub fn check_pattern(&self, p: &Pattern) -> Result<(), SignatureError> {
        if !self.has_predicate(&p.predicate) {
            return Err(SignatureError::UnknownPredicate(p.predicate.to_string()));
        }
        self.check_word(&p.prefix)
    }

    /// Every word over the symbols of length at most `max_len`, shortest
    /// first, lexicographic within a length.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for s in &self.symbols {
                    next.push(w.concat(&Word::from_symbols(vec![s.clone()])));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    /// All atoms with words of length at most `max_len`. The set is closed
    /// under taking suffixes.
    pub fn atoms_up_to(&self, max_len: usize) -> Vec<Atom> {
        let words = self.words_up_to(max_len);
        self.predicates
            .iter()
            .flat_map(|p| words.iter().map(move |w| Atom::new(p.clone(), w.clone())))
            .collect()
    }
}
