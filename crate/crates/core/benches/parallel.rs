use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use coproof_core::complement::complement_with;
use coproof_core::counterproof::unfold_all;
use coproof_core::decide::decide_all;
use coproof_core::random::{random_aps, seeded, ApsShape};
use coproof_core::{hat, kleene, parse_system, Exec, Pipeline, System, Verdict};

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

const EXAMPLE: &str = "\
Q(a x) <- U(x).
Q(a x) <- V(x).
R(a x) <- T(x).
T(x).
P(x) <- Q(x), R(x).
P(x) <- S(x).
Q(x) <- P(a x).
";

fn workload() -> System {
    let shape = ApsShape {
        max_predicates: 8,
        max_symbols: 3,
        max_rules: 24,
        max_premises: 3,
    };
    // Pick the seed with the largest automaton complement among a few.
    (0..32)
        .map(|s| random_aps(&mut seeded(s), shape))
        .filter_map(|sys| {
            Pipeline::build(&sys)
                .ok()
                .map(|pl| (pl.automaton_signed.negative().len(), sys))
        })
        .max_by_key(|(n, _)| *n)
        .map(|(_, sys)| sys)
        .expect("some seed builds")
}

fn bench(c: &mut Criterion) {
    let sys = workload();
    let pl = Pipeline::build(&sys).unwrap();
    let universe = sys.signature().atoms_up_to(5);

    let mut g = c.benchmark_group("kleene");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| kleene(&pl.automaton, &universe, 64, e))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("decide_all");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| decide_all(&pl.automaton, &pl.automaton_signed, &universe, e).unwrap())
        });
    }
    g.finish();

    let hatted = hat(&pl.automaton).unwrap();
    let mut g = c.benchmark_group("complement");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| complement_with(&hatted, 1_000_000, e).unwrap())
        });
    }
    g.finish();

    let ex = Pipeline::build(&parse_system(EXAMPLE).unwrap()).unwrap();
    let mut sess = ex.session();
    let refutable: Vec<_> = ex
        .original()
        .signature()
        .atoms_up_to(6)
        .into_iter()
        .filter(|a| sess.decide(a) == Verdict::Refutable)
        .collect();
    let mut g = c.benchmark_group("unfold_all");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| unfold_all(&ex, &refutable, 6, e))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
