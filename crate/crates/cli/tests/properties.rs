mod common;

use proptest::prelude::*;
use rand::Rng;

use coproof_cli::cert::{decode, encode, Certificate};
use coproof_cli::{certificate, certify, unfold, verify, Kind, Validity};
use coproof_core::random::{random_aps, random_atom, seeded, ApsShape, ProofSampler};
use coproof_core::{parse_system, print_system, Pipeline, Verdict};

fn names(pl: &Pipeline) -> (Vec<String>, Vec<String>) {
    let sig = pl.original().signature();
    let mut preds: Vec<String> = sig.predicates().map(|p| p.to_string()).collect();
    preds.push("Nope".into());
    let syms: Vec<String> = sig.symbols().map(|s| s.to_string()).collect();
    (preds, syms)
}

/// Whether `cert` is byte for byte what `certify` or `unfold` print for its
/// root atom.
fn is_command_output(pl: &Pipeline, cert: &Certificate) -> bool {
    let root = decode(&cert.root, pl.original());
    let atom = root.atom();
    if pl.original().signature().check_atom(atom).is_err() {
        return false;
    }
    let mut outputs = Vec::new();
    for lift in [false, true] {
        if let Ok((kind, proof)) = certify(pl, atom, lift) {
            outputs.push(certificate(pl, kind, &proof));
        }
    }
    for depth in 0..=root.depth() + 1 {
        for naive in [false, true] {
            if let Ok(cp) = unfold(pl, atom, depth, naive) {
                outputs.push(certificate(pl, Kind::OriginalComplementation, &cp.proof));
            }
        }
    }
    outputs.iter().any(|o| o.to_json() == cert.to_json())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let sys = random_aps(&mut seeded(seed), ApsShape::default());
        let text = print_system(&sys);
        let back = parse_system(&text).unwrap();
        prop_assert_eq!(print_system(&back), text);
        for (a, b) in sys.rules().iter().zip(back.rules()) {
            prop_assert_eq!(a.id(), b.id());
            prop_assert_eq!(a.key(), b.key());
            prop_assert_eq!(a.class(), b.class());
        }
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let sys = random_aps(&mut rng, ApsShape::default());
        let sampler = ProofSampler::new(&sys, 3, 5);
        if let Some(pf) = sampler.sample(&mut rng) {
            let cert = Certificate::new(&pf, "00".into());
            let json = cert.to_json();
            let back = Certificate::from_json(&json).unwrap();
            prop_assert_eq!(back.to_json(), json);
            prop_assert_eq!(decode(&back.root, &sys), pf.clone());
            prop_assert_eq!(encode(&pf), back.root);
        }
    }

    #[test]
    fn verify_accepts_outputs_and_rejects_mutations(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let sys = random_aps(&mut rng, ApsShape::default());
        let pl = Pipeline::build(&sys).unwrap();
        let (preds, syms) = names(&pl);
        let ids = common::rule_ids(&pl);
        for _ in 0..4 {
            let atom = random_atom(&mut rng, sys.signature(), 3);
            let lift = rng.gen_bool(0.5);
            let (kind, proof) = certify(&pl, &atom, lift).unwrap();
            let mut certs = vec![certificate(&pl, kind, &proof)];
            if pl.session().decide(&atom) == Verdict::Refutable {
                let cp = unfold(&pl, &atom, rng.gen_range(0..5), rng.gen_bool(0.5)).unwrap();
                certs.push(certificate(&pl, Kind::OriginalComplementation, &cp.proof));
            }
            for cert in certs {
                prop_assert!(matches!(verify(&pl, &cert), Validity::Valid(_)));
                for _ in 0..5 {
                    let (m, field) = common::mutate(&mut rng, &cert, &preds, &syms, &ids);
                    // A mutant may only pass if it is itself an output, as
                    // when the atom of a lone unexpanded root changes.
                    let accepted = matches!(verify(&pl, &m), Validity::Valid(_));
                    prop_assert_eq!(
                        accepted,
                        is_command_output(&pl, &m),
                        "mutated {}:\n{}", field, m.to_json()
                    );
                }
            }
        }
    }
}
