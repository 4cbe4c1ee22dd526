#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use coproof_cli::cert::{Certificate, MarkerField, Node, PolarityField};
use coproof_core::Pipeline;

pub const EX1: &str = include_str!("../../fixtures/ex1.aps");

/// Every rule id of every system derived from the pipeline, plus the empty
/// id of unexpanded nodes.
pub fn rule_ids(pl: &Pipeline) -> Vec<String> {
    let systems = [
        pl.saturated.rules(),
        pl.automaton_signed.positive(),
        pl.automaton_signed.negative(),
        pl.original_signed.positive(),
        pl.original_signed.negative(),
    ];
    let mut ids: Vec<String> = systems
        .iter()
        .flat_map(|s| s.rules().iter().map(|r| r.id().to_string()))
        .collect();
    ids.push(String::new());
    ids.sort();
    ids.dedup();
    ids
}

fn nodes_mut(node: &mut Node) -> Vec<*mut Node> {
    let mut out = vec![node as *mut Node];
    for c in &mut node.children {
        out.extend(nodes_mut(c));
    }
    out
}

fn tweak_word<R: Rng>(rng: &mut R, w: &mut Vec<String>, symbols: &[String]) {
    match rng.gen_range(0..3) {
        0 => w.push(symbols.choose(rng).unwrap().clone()),
        1 if !w.is_empty() => {
            w.pop();
        }
        _ if !w.is_empty() => {
            let i = rng.gen_range(0..w.len());
            w[i] = format!("{}z", w[i]);
        }
        _ => w.push(symbols.choose(rng).unwrap().clone()),
    }
}

/// Changes one field of one node, or the hash, so the JSON differs.
pub fn mutate<R: Rng>(
    rng: &mut R,
    cert: &Certificate,
    predicates: &[String],
    symbols: &[String],
    ids: &[String],
) -> (Certificate, &'static str) {
    loop {
        let mut m = cert.clone();
        let field;
        if rng.gen_range(0..12) == 0 {
            field = "system_hash";
            let i = rng.gen_range(0..m.system_hash.len());
            let mut bytes = m.system_hash.into_bytes();
            bytes[i] = if bytes[i] == b'0' { b'1' } else { b'0' };
            m.system_hash = String::from_utf8(bytes).unwrap();
        } else {
            let targets = nodes_mut(&mut m.root);
            // SAFETY: the pointers come from disjoint nodes of `m.root`, and
            // only one is dereferenced.
            let node = unsafe { &mut **targets.choose(rng).unwrap() };
            match rng.gen_range(0..9) {
                0 => {
                    field = "polarity";
                    node.polarity = match node.polarity {
                        PolarityField::Proved => PolarityField::Refuted,
                        PolarityField::Refuted => PolarityField::Proved,
                    };
                }
                1 => {
                    field = "predicate";
                    node.predicate = predicates.choose(rng).unwrap().clone();
                }
                2 => {
                    field = "word";
                    tweak_word(rng, &mut node.word, symbols);
                }
                3 => {
                    field = "rule";
                    node.rule = ids.choose(rng).unwrap().clone();
                }
                4 => {
                    field = "binding";
                    tweak_word(rng, &mut node.binding, symbols);
                }
                5 => {
                    field = "marker";
                    node.marker = match node.marker {
                        MarkerField::Expanded => MarkerField::Unexpanded,
                        MarkerField::Unexpanded => MarkerField::Expanded,
                    };
                }
                6 if !node.children.is_empty() => {
                    field = "children (drop)";
                    let i = rng.gen_range(0..node.children.len());
                    node.children.remove(i);
                }
                7 if !node.children.is_empty() => {
                    field = "children (duplicate)";
                    let i = rng.gen_range(0..node.children.len());
                    let c = node.children[i].clone();
                    node.children.insert(i, c);
                }
                8 if node.children.len() > 1 => {
                    field = "children (swap)";
                    let i = rng.gen_range(0..node.children.len());
                    let j = rng.gen_range(0..node.children.len());
                    node.children.swap(i, j);
                }
                _ => continue,
            }
        }
        if m != *cert {
            return (m, field);
        }
    }
}
