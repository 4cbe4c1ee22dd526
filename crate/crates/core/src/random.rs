//! Seeded generators for random systems, atoms and proofs.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decide::kleene;
use crate::par::Exec;
use crate::proof::{Proof, Sequent};
use crate::rule::{Provenance, Rule};
use crate::syntax::{Atom, Pattern, Predicate, Signature, Symbol, Word};
use crate::system::{Inserted, System};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug)]
pub struct ApsShape {
    pub max_predicates: usize,
    pub max_symbols: usize,
    pub max_rules: usize,
    /// Largest number of premises of a generated rule.
    pub max_premises: usize,
}

impl Default for ApsShape {
    fn default() -> Self {
        ApsShape {
            max_predicates: 6,
            max_symbols: 2,
            max_rules: 10,
            max_premises: 3,
        }
    }
}

/// A random alternating pushdown system. Predicates are `P0`, `P1`, ...,
/// symbols `a`, `b`, .... Templates with premises are drawn more often than
/// axioms. Rules that would repeat an earlier one are dropped.
pub fn random_aps<R: Rng + ?Sized>(rng: &mut R, shape: ApsShape) -> System {
    let np = rng.gen_range(1..=shape.max_predicates.max(1));
    let ns = rng.gen_range(1..=shape.max_symbols.max(1));
    let preds: Vec<Predicate> = (0..np).map(|i| Predicate::new(&format!("P{i}"))).collect();
    let syms: Vec<Symbol> = (0..ns)
        .map(|i| Symbol::new(&((b'a' + i as u8) as char).to_string()))
        .collect();
    let signature = Signature::new(preds.clone(), syms.clone()).expect("distinct generated names");
    let mut system = System::empty(signature);
    let nr = rng.gen_range(1..=shape.max_rules.max(1));

    let pick_pred = |rng: &mut R| preds.choose(rng).expect("nonempty").clone();
    let sym_word =
        |rng: &mut R| Word::from_symbols(vec![syms.choose(rng).expect("nonempty").clone()]);
    let var_premises = |rng: &mut R, n: usize| -> Vec<Pattern> {
        let mut out: Vec<Pattern> = Vec::new();
        for _ in 0..n {
            let p = Pattern::var(pick_pred(rng), Word::empty());
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    };

    let mut n = 0;
    for _ in 0..nr {
        let arity = rng.gen_range(0..=shape.max_premises);
        let (conclusion, premises) = match rng.gen_range(0..10) {
            0..=3 => (
                Pattern::var(pick_pred(rng), sym_word(rng)),
                var_premises(rng, arity),
            ),
            4..=6 => {
                let mut ps = vec![Pattern::var(pick_pred(rng), sym_word(rng))];
                ps.extend(var_premises(rng, arity.saturating_sub(1)));
                (Pattern::var(pick_pred(rng), Word::empty()), ps)
            }
            7 => (
                Pattern::var(pick_pred(rng), Word::empty()),
                var_premises(rng, arity.max(1)),
            ),
            8 => (Pattern::var(pick_pred(rng), Word::empty()), Vec::new()),
            _ => (Pattern::ground(pick_pred(rng), Word::empty()), Vec::new()),
        };
        let rule = Rule::new(
            format!("r{}", n + 1),
            conclusion,
            premises,
            Provenance::Primitive,
        )
        .expect("generated rules are well formed");
        debug_assert!(rule.is_aps_shaped(), "{rule}");
        if let Ok(Inserted::Added(_)) = system.insert(rule) {
            n += 1;
        }
    }
    system
}

/// A random closed atom with a word of length at most `max_len`.
pub fn random_atom<R: Rng + ?Sized>(rng: &mut R, signature: &Signature, max_len: usize) -> Atom {
    let preds: Vec<&Predicate> = signature.predicates().collect();
    let syms: Vec<&Symbol> = signature.symbols().collect();
    let len = if syms.is_empty() {
        0
    } else {
        rng.gen_range(0..=max_len)
    };
    let word = Word::from_symbols(
        (0..len)
            .map(|_| (*syms.choose(rng).expect("nonempty")).clone())
            .collect(),
    );
    Atom::new((*preds.choose(rng).expect("nonempty")).clone(), word)
}

/// Samples finite proofs in a system. Atoms are drawn from those derivable
/// within `max_depth` steps inside a bounded universe, a uniformly chosen
/// step first. Each node picks a random rule instance whose premises can
/// still be proved within the remaining depth, preferring instances with
/// premises over axioms, so proofs have depth at most `max_depth`.
pub struct ProofSampler<'a> {
    system: &'a System,
    /// First Kleene step deriving each atom.
    level: HashMap<Atom, usize>,
    atoms: Vec<Atom>,
    by_level: Vec<Vec<Atom>>,
    max_depth: usize,
}

impl<'a> ProofSampler<'a> {
    pub fn new(system: &'a System, max_word_len: usize, max_depth: usize) -> Self {
        let universe = system.signature().atoms_up_to(max_word_len);
        let mut level = HashMap::new();
        for steps in 1..=max_depth {
            let r = kleene(system, &universe, steps, Exec::Sequential);
            for a in r.set {
                level.entry(a).or_insert(steps);
            }
            if r.stabilized {
                break;
            }
        }
        let mut atoms: Vec<Atom> = level.keys().cloned().collect();
        atoms.sort();
        let mut by_level: Vec<Vec<Atom>> = vec![Vec::new(); max_depth + 1];
        for a in &atoms {
            by_level[level[a]].push(a.clone());
        }
        by_level.retain(|l| !l.is_empty());
        ProofSampler {
            system,
            level,
            atoms,
            by_level,
            max_depth,
        }
    }

    pub fn provable_atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Proof> {
        let atom = self.by_level.choose(rng)?.choose(rng)?;
        self.prove(rng, atom)
    }

    /// A random proof of `atom` of depth at most `max_depth`, if the
    /// sampler knows `atom` to be derivable.
    pub fn prove<R: Rng + ?Sized>(&self, rng: &mut R, atom: &Atom) -> Option<Proof> {
        self.level
            .contains_key(atom)
            .then(|| self.prove_within(rng, atom, self.max_depth))
    }

    fn prove_within<R: Rng + ?Sized>(&self, rng: &mut R, atom: &Atom, budget: usize) -> Proof {
        let options: Vec<_> = self
            .system
            .rule_instances_concluding(atom)
            .into_iter()
            .filter(|inst| {
                inst.premises
                    .iter()
                    .all(|p| self.level.get(p).is_some_and(|&l| l < budget))
            })
            .collect();
        let inner: Vec<_> = options.iter().filter(|i| !i.premises.is_empty()).collect();
        let inst = match inner.choose(rng) {
            Some(i) if rng.gen_bool(0.8) => *i,
            _ => options
                .choose(rng)
                .expect("level bounds the remaining depth"),
        };
        let children = inst
            .premises
            .iter()
            .map(|p| self.prove_within(rng, p, budget - 1))
            .collect();
        Proof::node(
            Sequent::proved(atom.clone()),
            inst.rule.id().clone(),
            inst.binding.clone(),
            children,
        )
    }
}
