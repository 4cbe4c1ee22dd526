#![allow(dead_code)]

use coproof_core::syntax::Signature;
use coproof_core::text::{parse_with, ParseOptions};
use coproof_core::{parse_system, System};

pub const EX1: &str = "\
Q(a x) <- U(x).
Q(a x) <- V(x).
R(a x) <- T(x).
T(x).
P(x) <- Q(x), R(x).
P(x) <- S(x).
Q(x) <- P(a x).
";

/// The complement of the original system, as written generically.
pub const EX1_COMPLEMENT: &str = "\
P(x) <- Q(x), S(x).
P(x) <- R(x), S(x).
Q(eps) <- P(a).
Q(a x) <- P(a a x), U(x), V(x).
R(eps).
R(a x) <- T(x).
S(x).
U(x).
V(x).
";

pub const EX1_AUTOMATON: &str = "\
P(a x) <- U(x), T(x).
P(a x) <- V(x), T(x).
Q(a x) <- U(x).
Q(a x) <- V(x).
R(a x) <- T(x).
T(x).
";

/// The complement of the automaton, as written generically.
pub const EX1_AUTOMATON_COMPLEMENT: &str = "\
P(a x) <- U(x), V(x).
P(a x) <- U(x), T(x).
P(a x) <- T(x), V(x).
P(a x) <- T(x).
P(eps).
Q(a x) <- U(x), V(x).
Q(eps).
R(a x) <- T(x).
R(eps).
S(x).
U(x).
V(x).
";

pub fn signature() -> Signature {
    Signature::from_names(&["P", "Q", "R", "S", "T", "U", "V"], &["a"]).unwrap()
}

pub fn ex1() -> System {
    parse_system(EX1).unwrap()
}

/// Parses rules over the example signature without the template check.
pub fn over_signature(text: &str) -> System {
    parse_with(
        text,
        &ParseOptions {
            require_aps: false,
            signature: Some(signature()),
        },
    )
    .unwrap()
}
