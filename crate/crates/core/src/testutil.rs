//! Shared fixtures for unit tests.

use crate::syntax::Signature;
use crate::system::System;
use crate::text::{parse_system, parse_with, ParseOptions};

pub const EX1: &str = "Q(a x) <- U(x).\nQ(a x) <- V(x).\nR(a x) <- T(x).\nT(x).\n\
                       P(x) <- Q(x), R(x).\nP(x) <- S(x).\nQ(x) <- P(a x).\n";

pub const EX1_AUTOMATON: &str = "P(a x) <- U(x), T(x).\nP(a x) <- V(x), T(x).\nQ(a x) <- U(x).\n\
                                 Q(a x) <- V(x).\nR(a x) <- T(x).\nT(x).\n";

pub fn ex1() -> System {
    parse_system(EX1).unwrap()
}

pub fn ex1_signature() -> Signature {
    Signature::from_names(&["P", "Q", "R", "S", "T", "U", "V"], &["a"]).unwrap()
}

/// The automaton, over the signature of the original system.
pub fn ex1_automaton() -> System {
    parse_with(
        EX1_AUTOMATON,
        &ParseOptions {
            require_aps: true,
            signature: Some(ex1_signature()),
        },
    )
    .unwrap()
}
