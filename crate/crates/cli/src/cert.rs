//! Certificate files: JSON encoding, system hashes and DOT export.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use coproof_core::proof::{Lookup, ProofSystem};
use coproof_core::syntax::{Predicate, Tail};
use coproof_core::{
    Atom, Binding, Marker, Polarity, Proof, RuleId, Sequent, SignedSystem, Symbol, System, Word,
};

/// The system a certificate is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Proofs in the automaton.
    Automaton,
    /// Proofs in the original system.
    Original,
    /// Finite refutations in the complementation of the automaton.
    AutomatonComplementation,
    /// Counter-proof prefixes in the complementation of the original system.
    OriginalComplementation,
}

impl Kind {
    pub const ALL: [Kind; 4] = [
        Kind::Automaton,
        Kind::Original,
        Kind::AutomatonComplementation,
        Kind::OriginalComplementation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Automaton => "automaton",
            Kind::Original => "original",
            Kind::AutomatonComplementation => "automaton-complementation",
            Kind::OriginalComplementation => "original-complementation",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum PolarityField {
    Proved,
    Refuted,
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum MarkerField {
    Expanded,
    Unexpanded,
}

/// One sequent. Fields are declared in sorted order so the JSON keys are
/// sorted. Unexpanded nodes have an empty rule id.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub binding: Vec<String>,
    pub children: Vec<Node>,
    pub marker: MarkerField,
    pub polarity: PolarityField,
    pub predicate: String,
    pub rule: String,
    pub word: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub root: Node,
    pub system_hash: String,
}

impl Certificate {
    pub fn new(proof: &Proof, system_hash: String) -> Self {
        Certificate {
            root: encode(proof),
            system_hash,
        }
    }

    /// Pretty JSON with a trailing newline; byte-stable for equal inputs.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificates serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn symbols(w: &Word) -> Vec<String> {
    w.symbols().iter().map(|s| s.as_str().to_string()).collect()
}

pub fn encode(proof: &Proof) -> Node {
    Node {
        binding: match &proof.binding {
            Binding::Ground => Vec::new(),
            Binding::Suffix(w) => symbols(w),
        },
        children: proof.children.iter().map(encode).collect(),
        marker: match proof.marker {
            Marker::Expanded => MarkerField::Expanded,
            Marker::Unexpanded => MarkerField::Unexpanded,
        },
        polarity: match proof.sequent.polarity {
            Polarity::Proved => PolarityField::Proved,
            Polarity::Refuted => PolarityField::Refuted,
        },
        predicate: proof.atom().predicate.as_str().to_string(),
        rule: proof
            .rule
            .as_ref()
            .map(|r| r.as_str().to_string())
            .unwrap_or_default(),
        word: symbols(&proof.atom().word),
    }
}

/// Rebuilds a proof. JSON bindings do not say whether a rule is ground, so
/// the rule is looked up in `system`: a nonempty binding for a ground or
/// unknown rule decodes to a suffix binding, which the checker rejects.
pub fn decode(node: &Node, system: &dyn ProofSystem) -> Proof {
    let word = |syms: &[String]| Word::from_symbols(syms.iter().map(|s| Symbol::new(s)).collect());
    let polarity = match node.polarity {
        PolarityField::Proved => Polarity::Proved,
        PolarityField::Refuted => Polarity::Refuted,
    };
    let atom = Atom::new(Predicate::new(&node.predicate), word(&node.word));
    let sequent = match polarity {
        Polarity::Proved => Sequent::proved(atom),
        Polarity::Refuted => Sequent::refuted(atom),
    };
    let rule = (!node.rule.is_empty()).then(|| RuleId::new(&node.rule));
    let variable = rule.as_ref().is_some_and(|id| {
        matches!(system.lookup(polarity, id), Lookup::Found(r) if r.conclusion().tail == Tail::Var)
    });
    let binding = if variable || !node.binding.is_empty() {
        Binding::Suffix(word(&node.binding))
    } else {
        Binding::Ground
    };
    Proof {
        sequent,
        rule,
        binding,
        children: node.children.iter().map(|c| decode(c, system)).collect(),
        marker: match node.marker {
            MarkerField::Expanded => Marker::Expanded,
            MarkerField::Unexpanded => Marker::Unexpanded,
        },
    }
}

fn canonical_rules(out: &mut String, system: &System) {
    for r in system.rules() {
        let _ = writeln!(out, "{}: {r}", r.id());
    }
}

/// Text the system hash is computed from: the kind, the signature, and every
/// rule with its id. Ids are part of it because certificates name rules.
pub fn canonical_text(kind: Kind, system: &System) -> String {
    let mut out = format!("{kind}\n");
    let preds: Vec<&str> = system
        .signature()
        .predicates()
        .map(|p| p.as_str())
        .collect();
    let syms: Vec<&str> = system.signature().symbols().map(|s| s.as_str()).collect();
    let _ = writeln!(out, "predicates: {}", preds.join(" "));
    let _ = writeln!(out, "symbols: {}", syms.join(" "));
    canonical_rules(&mut out, system);
    out
}

pub fn canonical_signed_text(kind: Kind, signed: &SignedSystem) -> String {
    let mut out = canonical_text(kind, signed.positive());
    out.push_str("negative:\n");
    canonical_rules(&mut out, signed.negative());
    out
}

pub fn hash_text(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering: one node per sequent in pre-order, edges in child
/// order, then dashed edges from repeated sequents back to their ancestor.
pub fn to_dot(proof: &Proof, loops: &[(Vec<usize>, usize)]) -> String {
    let mut out = String::from("digraph proof {\n  node [shape=box, fontname=monospace];\n");
    let mut ids: Vec<Vec<usize>> = Vec::new();
    let mut edges = String::new();
    proof.walk(&mut |path, node| {
        let n = ids.len();
        let rule = match (&node.rule, node.marker) {
            (_, Marker::Unexpanded) => "...".to_string(),
            (Some(r), _) => r.to_string(),
            (None, _) => "?".to_string(),
        };
        let _ = writeln!(
            out,
            "  n{n} [label=\"{}\\n{}\"];",
            dot_escape(&node.sequent.to_string()),
            dot_escape(&rule)
        );
        if let Some((_, parent)) = path.split_last() {
            let p = ids
                .iter()
                .position(|q| q == parent)
                .expect("pre-order visits parents first");
            let _ = writeln!(edges, "  n{p} -> n{n};");
        }
        ids.push(path.to_vec());
    });
    out.push_str(&edges);
    for (path, ancestor) in loops {
        let from = ids.iter().position(|q| q == path);
        let to = ids.iter().position(|q| q.as_slice() == &path[..*ancestor]);
        if let (Some(f), Some(t)) = (from, to) {
            let _ = writeln!(out, "  n{f} -> n{t} [style=dashed, constraint=false];");
        }
    }
    out.push_str("}\n");
    out
}
