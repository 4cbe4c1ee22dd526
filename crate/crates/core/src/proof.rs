//! Proof trees over signed sequents and the independent proof checker.

use std::fmt;

use thiserror::Error;

use crate::rule::{Rule, RuleId};
use crate::syntax::{Atom, Binding, Signature, SignatureError, Tail};
use crate::system::System;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Polarity {
    /// `⊢ A`
    Proved,
    /// `⊬ A`
    Refuted,
}

impl Polarity {
    pub fn symbol(self) -> &'static str {
        match self {
            Polarity::Proved => "⊢",
            Polarity::Refuted => "⊬",
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub polarity: Polarity,
    pub atom: Atom,
}

impl Sequent {
    pub fn proved(atom: Atom) -> Self {
        Sequent {
            polarity: Polarity::Proved,
            atom,
        }
    }

    pub fn refuted(atom: Atom) -> Self {
        Sequent {
            polarity: Polarity::Refuted,
            atom,
        }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.polarity.symbol(), self.atom)
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Marker {
    Expanded,
    /// Frontier of a depth-bounded unfolding; carries no rule and no children.
    Unexpanded,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Proof {
    pub sequent: Sequent,
    pub rule: Option<RuleId>,
    pub binding: Binding,
    pub children: Vec<Proof>,
    pub marker: Marker,
}

impl Proof {
    pub fn node(sequent: Sequent, rule: RuleId, binding: Binding, children: Vec<Proof>) -> Self {
        Proof {
            sequent,
            rule: Some(rule),
            binding,
            children,
            marker: Marker::Expanded,
        }
    }

    pub fn unexpanded(sequent: Sequent) -> Self {
        Proof {
            sequent,
            rule: None,
            binding: Binding::Ground,
            children: Vec::new(),
            marker: Marker::Unexpanded,
        }
    }

    pub fn atom(&self) -> &Atom {
        &self.sequent.atom
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Proof::size).sum::<usize>()
    }

    /// Height, counting a single node as 1.
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Proof::depth).max().unwrap_or(0)
    }

    pub fn is_complete(&self) -> bool {
        self.marker == Marker::Expanded && self.children.iter().all(Proof::is_complete)
    }

    pub fn at(&self, path: &[usize]) -> Option<&Proof> {
        path.iter().try_fold(self, |node, &i| node.children.get(i))
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Proof> {
        path.iter()
            .try_fold(self, |node, &i| node.children.get_mut(i))
    }

    /// Pre-order walk with paths.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&[usize], &'a Proof)) {
        fn go<'a>(
            node: &'a Proof,
            path: &mut Vec<usize>,
            visit: &mut impl FnMut(&[usize], &'a Proof),
        ) {
            visit(path, node);
            for (i, c) in node.children.iter().enumerate() {
                path.push(i);
                go(c, path, visit);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), visit)
    }

    /// Cuts the tree at `depth` edges below the root; nodes at that depth
    /// become unexpanded.
    pub fn truncate(&self, depth: usize) -> Proof {
        if self.marker == Marker::Unexpanded {
            return self.clone();
        }
        if depth == 0 {
            return Proof::unexpanded(self.sequent.clone());
        }
        Proof {
            children: self
                .children
                .iter()
                .map(|c| c.truncate(depth - 1))
                .collect(),
            ..self.clone()
        }
    }

    /// Indented text rendering.
    pub fn render_tree(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, indent: usize) {
        use std::fmt::Write;
        let _ = write!(out, "{:width$}{}", "", self.sequent, width = indent * 2);
        match (&self.rule, self.marker) {
            (_, Marker::Unexpanded) => out.push_str("  ..."),
            (Some(r), _) => {
                let _ = write!(out, "  [{r}");
                if let Binding::Suffix(w) = &self.binding {
                    let _ = write!(out, "; x := {w}");
                }
                out.push(']');
            }
            (None, _) => out.push_str("  [?]"),
        }
        out.push('\n');
        for c in &self.children {
            c.render_into(out, indent + 1);
        }
    }
}

/// Something proofs can be checked against.
pub trait ProofSystem {
    fn signature(&self) -> &Signature;
    /// The rule with this id that derives sequents of this polarity.
    fn lookup(&self, polarity: Polarity, id: &RuleId) -> Lookup<'_>;
}

pub enum Lookup<'a> {
    Found(&'a Rule),
    Unknown,
    WrongPolarity,
}

impl ProofSystem for System {
    fn signature(&self) -> &Signature {
        System::signature(self)
    }

    fn lookup(&self, polarity: Polarity, id: &RuleId) -> Lookup<'_> {
        match (polarity, self.rule(id)) {
            (_, None) => Lookup::Unknown,
            (Polarity::Proved, Some(r)) => Lookup::Found(r),
            (Polarity::Refuted, Some(_)) => Lookup::WrongPolarity,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CheckMode {
    /// Every node must be expanded: a finite proof.
    Complete,
    /// Unexpanded leaves are allowed: a prefix of a possibly infinite proof.
    Prefix,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckErrorKind {
    #[error("unknown rule {0}")]
    UnknownRule(RuleId),
    #[error("rule {0} does not derive sequents of this polarity")]
    PolarityMismatch(RuleId),
    #[error("child polarity differs from its parent")]
    ChildPolarity,
    #[error("expanded node without a rule")]
    MissingRule,
    #[error("unexpanded node in a finite proof")]
    Unexpanded,
    #[error("unexpanded node carries a rule or children")]
    MalformedUnexpanded,
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("binding does not fit the rule {0}")]
    BadBinding(RuleId),
    #[error("rule {rule} instantiated with the binding concludes {expected}, not {found}")]
    WrongConclusion {
        rule: RuleId,
        expected: Atom,
        found: Atom,
    },
    #[error("rule {rule} requires premises {expected:?}, found {found:?}")]
    WrongPremises {
        rule: RuleId,
        expected: Vec<Atom>,
        found: Vec<Atom>,
    },
}

/// A failed check: the path (child indices from the root) to the first
/// offending node in pre-order, and why.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("at {path:?}: {kind}")]
pub struct CheckError {
    pub path: Vec<usize>,
    pub kind: CheckErrorKind,
}

/// Checks every expanded node against `system`.
pub fn check_proof(
    system: &dyn ProofSystem,
    proof: &Proof,
    mode: CheckMode,
) -> Result<(), CheckError> {
    let mut path = Vec::new();
    check_node(system, proof, mode, &mut path)
}

fn check_node(
    system: &dyn ProofSystem,
    node: &Proof,
    mode: CheckMode,
    path: &mut Vec<usize>,
) -> Result<(), CheckError> {
    let fail = |path: &Vec<usize>, kind: CheckErrorKind| CheckError {
        path: path.clone(),
        kind,
    };
    system
        .signature()
        .check_atom(&node.sequent.atom)
        .map_err(|e| fail(path, e.into()))?;
    if node.marker == Marker::Unexpanded {
        if mode == CheckMode::Complete {
            return Err(fail(path, CheckErrorKind::Unexpanded));
        }
        if node.rule.is_some() || !node.children.is_empty() || node.binding != Binding::Ground {
            return Err(fail(path, CheckErrorKind::MalformedUnexpanded));
        }
        return Ok(());
    }
    let id = node
        .rule
        .as_ref()
        .ok_or_else(|| fail(path, CheckErrorKind::MissingRule))?;
    let rule = match system.lookup(node.sequent.polarity, id) {
        Lookup::Found(r) => r,
        Lookup::Unknown => return Err(fail(path, CheckErrorKind::UnknownRule(id.clone()))),
        Lookup::WrongPolarity => {
            return Err(fail(path, CheckErrorKind::PolarityMismatch(id.clone())))
        }
    };
    let binding_fits = matches!(
        (rule.conclusion().tail, &node.binding),
        (Tail::Var, Binding::Suffix(_)) | (Tail::Ground, Binding::Ground)
    );
    if !binding_fits {
        return Err(fail(path, CheckErrorKind::BadBinding(id.clone())));
    }
    let (conclusion, premises) = rule
        .instance(&node.binding)
        .map_err(|_| fail(path, CheckErrorKind::BadBinding(id.clone())))?;
    if conclusion != node.sequent.atom {
        return Err(fail(
            path,
            CheckErrorKind::WrongConclusion {
                rule: id.clone(),
                expected: conclusion,
                found: node.sequent.atom.clone(),
            },
        ));
    }
    let found: Vec<Atom> = node
        .children
        .iter()
        .map(|c| c.sequent.atom.clone())
        .collect();
    if premises != found {
        return Err(fail(
            path,
            CheckErrorKind::WrongPremises {
                rule: id.clone(),
                expected: premises,
                found,
            },
        ));
    }
    for (i, child) in node.children.iter().enumerate() {
        path.push(i);
        if child.sequent.polarity != node.sequent.polarity {
            return Err(fail(path, CheckErrorKind::ChildPolarity));
        }
        check_node(system, child, mode, path)?;
        path.pop();
    }
    Ok(())
}
