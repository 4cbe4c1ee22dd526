use std::collections::BTreeSet;

use proptest::prelude::*;

use coproof_core::proof::{check_proof, CheckMode, Proof, Sequent};
use coproof_core::random::{random_aps, seeded, ApsShape};
use coproof_core::rule::Provenance;
use coproof_core::saturation::major_compositions;
use coproof_core::syntax::{Atom, Binding, Pattern, Word};
use coproof_core::{simplify_rule, Rule, Tail};

fn word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::sample::select(vec!["a", "b"]), 0..=max)
        .prop_map(|s| Word::parse(&s.join(" ")))
}

fn pred() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["P", "Q", "R"])
}

fn pattern(ground: bool) -> impl Strategy<Value = Pattern> {
    (pred(), word(2)).prop_map(move |(p, w)| {
        if ground {
            Pattern::ground(p, w)
        } else {
            Pattern::var(p, w)
        }
    })
}

/// A well-formed rule: all tails agree.
fn rule() -> impl Strategy<Value = Rule> {
    any::<bool>().prop_flat_map(|ground| {
        (
            pattern(ground),
            prop::collection::vec(pattern(ground), 0..4),
        )
            .prop_map(|(c, ps)| Rule::new("r", c, ps, Provenance::Primitive).unwrap())
    })
}

fn binding_for(rule: &Rule, w: Word) -> Binding {
    match rule.conclusion().tail {
        Tail::Var => Binding::Suffix(w),
        Tail::Ground => Binding::Ground,
    }
}

proptest! {
    #[test]
    fn match_then_instantiate(p in pattern(false), g in pattern(true), a in (pred(), word(4))) {
        let atom = Atom::new(a.0, a.1);
        for pat in [p, g] {
            if let Some(b) = pat.match_atom(&atom) {
                prop_assert_eq!(pat.instantiate(&b).unwrap(), atom.clone());
            }
        }
    }

    #[test]
    fn instantiate_then_match(p in pattern(false), w in word(3)) {
        let b = Binding::Suffix(w);
        let atom = p.instantiate(&b).unwrap();
        prop_assert_eq!(p.match_atom(&atom), Some(b));
    }

    #[test]
    fn simplification_keeps_instances(r in rule(), w in word(3)) {
        // Duplicate every premise, then simplify.
        let doubled: Vec<Pattern> = r.premises().iter().chain(r.premises()).cloned().collect();
        let noisy = Rule::new("n", r.conclusion().clone(), doubled, Provenance::Primitive).unwrap();
        let clean = simplify_rule(&noisy);
        prop_assert!(clean.is_simplified());
        prop_assert_eq!(simplify_rule(&clean).clone(), clean.clone());
        let b = binding_for(&r, w);
        let (c1, p1) = noisy.instance(&b).unwrap();
        let (c2, p2) = clean.instance(&b).unwrap();
        prop_assert_eq!(c1, c2);
        let s1: BTreeSet<Atom> = p1.into_iter().collect();
        let s2: BTreeSet<Atom> = p2.into_iter().collect();
        prop_assert_eq!(s1, s2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn introduction_flag_is_sound(r in rule(), w in word(4)) {
        if r.is_intro() {
            let (c, ps) = r.instance(&binding_for(&r, w)).unwrap();
            for p in ps {
                prop_assert!(p.word.len() < c.word.len(), "{} from {}", c, p);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compositions_are_derivable(seed in any::<u64>(), w in word(3)) {
        let sys = random_aps(&mut seeded(seed), ApsShape::default());
        let w = Word::from_symbols(
            w.symbols().iter().filter(|s| sys.signature().has_symbol(s)).cloned().collect(),
        );
        for g in sys.non_introduction_rules() {
            for h in major_compositions(&sys, g) {
                let Provenance::Composed(c) = h.provenance() else { panic!("composed") };
                let (atom, premises) = h.instance(&binding_for(&h, w.clone())).unwrap();
                // g over the plugged rules, with every premise of h left open.
                let (gb, g_premises) = g.premises_for(&atom).expect("composition concludes the instance");
                let mut leaves = BTreeSet::new();
                let children = g_premises
                    .iter()
                    .zip(&c.parts)
                    .map(|(ci, part)| match part {
                        None => {
                            leaves.insert(ci.clone());
                            Proof::unexpanded(Sequent::proved(ci.clone()))
                        }
                        Some(fid) => {
                            let f = sys.rule(fid).unwrap();
                            let (fb, fp) = f.premises_for(ci).expect("part concludes the premise");
                            let kids = fp
                                .iter()
                                .map(|a| {
                                    leaves.insert(a.clone());
                                    Proof::unexpanded(Sequent::proved(a.clone()))
                                })
                                .collect();
                            Proof::node(Sequent::proved(ci.clone()), fid.clone(), fb, kids)
                        }
                    })
                    .collect();
                let pf = Proof::node(Sequent::proved(atom.clone()), g.id().clone(), gb, children);
                prop_assert!(check_proof(&sys, &pf, CheckMode::Prefix).is_ok());
                prop_assert_eq!(leaves, premises.into_iter().collect::<BTreeSet<_>>());
            }
        }
    }

    #[test]
    fn backward_enumeration_finds_forward_instances(seed in any::<u64>(), w in word(3), pick in any::<prop::sample::Index>()) {
        let sys = random_aps(&mut seeded(seed), ApsShape::default());
        let w = Word::from_symbols(
            w.symbols().iter().filter(|s| sys.signature().has_symbol(s)).cloned().collect(),
        );
        let r = pick.get(sys.rules());
        let b = binding_for(r, w);
        let (atom, premises) = r.instance(&b).unwrap();
        let found = sys.rule_instances_concluding(&atom);
        prop_assert!(found.iter().any(|i| i.rule.id() == r.id() && i.binding == b && i.premises == premises));
    }
}
