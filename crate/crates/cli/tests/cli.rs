use std::path::PathBuf;
use std::process::{Command, Output};

use coproof_cli::cert::{Certificate, MarkerField};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn coproof(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coproof"))
        .args(args)
        .output()
        .unwrap()
}

fn ex1() -> String {
    fixture("ex1.aps").to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn decide_exit_codes() {
    let o = coproof(&["decide", &ex1(), "P(a)"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "refutable\n");
    let o = coproof(&["decide", &ex1(), "R(a a)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "provable\n");
    for bad in ["P(a x)", "P(a", "Z(a)", "P(b)"] {
        let o = coproof(&["decide", &ex1(), bad]);
        assert_eq!(o.status.code(), Some(2), "{bad}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn malformed_files_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (text, needle) in [
        ("Q(a x) <- Q(a x).\n", "1:1"),
        ("P(x) <- Q(x), Q(x).\n", "1:15"),
        ("T(x).\nT(x).\n", "2:1"),
        ("P(x) <- \n", "2:1"),
    ] {
        let path = dir.path().join("bad.aps");
        std::fs::write(&path, text).unwrap();
        let o = coproof(&["check", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        let msg = String::from_utf8(o.stderr).unwrap();
        assert!(msg.contains(needle), "{text}: {msg}");
    }
    let o = coproof(&["check", "/no/such/file.aps"]);
    assert_eq!(o.status.code(), Some(2));
    let o = coproof(&["check", &ex1()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn certify_golden_and_stable() {
    let a = coproof(&["certify", &ex1(), "P(a)"]);
    let b = coproof(&["certify", &ex1(), "P(a)"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let cert = Certificate::from_json(&stdout(&a)).unwrap();
    let leaves: Vec<(&str, usize)> = cert
        .root
        .children
        .iter()
        .map(|c| (c.predicate.as_str(), c.word.len()))
        .collect();
    assert_eq!(leaves, vec![("U", 0), ("V", 0)]);
    assert!(cert.root.children.iter().all(|c| c.children.is_empty()));
    // Keys come out sorted.
    let text = stdout(&a);
    let keys: Vec<usize> = [
        "\"binding\"",
        "\"children\"",
        "\"marker\"",
        "\"polarity\"",
        "\"predicate\"",
        "\"rule\"",
        "\"word\"",
    ]
    .iter()
    .map(|k| text.find(k).unwrap())
    .collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
    assert!(text.find("\"root\"").unwrap() < text.find("\"system_hash\"").unwrap());
}

#[test]
fn verify_round_trip_and_rejections() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, bytes: &[u8]| {
        let p = dir.path().join(name);
        std::fs::write(&p, bytes).unwrap();
        p.to_string_lossy().into_owned()
    };
    let outputs = [
        coproof(&["certify", &ex1(), "P(a)"]),
        coproof(&["certify", &ex1(), "R(a a)"]),
        coproof(&["certify", &ex1(), "T(a)", "--lift"]),
        coproof(&["unfold", &ex1(), "P(a)", "--depth", "5"]),
        coproof(&["unfold", &ex1(), "Q(a a)", "--depth", "3", "--naive"]),
    ];
    for (i, o) in outputs.iter().enumerate() {
        let path = write(&format!("c{i}.json"), &o.stdout);
        let v = coproof(&["verify", &ex1(), &path]);
        assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    }

    let other = write("other.aps", b"T(x).\nR(a x) <- T(x).\n");
    let golden = write("golden.json", &outputs[0].stdout);
    let v = coproof(&["verify", &other, &golden]);
    assert_eq!(v.status.code(), Some(1));
    assert!(stdout(&v).contains("hash"));

    let mut cert = Certificate::from_json(&stdout(&outputs[0])).unwrap();
    cert.root.children.swap(0, 1);
    let swapped = write("swapped.json", cert.to_json().as_bytes());
    assert_eq!(
        coproof(&["verify", &ex1(), &swapped]).status.code(),
        Some(1)
    );

    let garbage = write("garbage.json", b"{\"root\": 3}");
    assert_eq!(
        coproof(&["verify", &ex1(), &garbage]).status.code(),
        Some(2)
    );
    let extra = stdout(&outputs[0]).replacen("\"root\"", "\"extra\": 1, \"root\"", 1);
    let extra = write("extra.json", extra.as_bytes());
    assert_eq!(coproof(&["verify", &ex1(), &extra]).status.code(), Some(2));
}

#[test]
fn unfold_outputs() {
    let o = coproof(&["unfold", &ex1(), "P(a)", "--depth", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let cert = Certificate::from_json(&stdout(&o)).unwrap();
    assert_eq!(cert.root.marker, MarkerField::Unexpanded);
    assert!(cert.root.children.is_empty() && cert.root.rule.is_empty());

    let o = coproof(&["unfold", &ex1(), "P(a)", "--depth", "2", "--format", "dot"]);
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph proof {"));
    assert_eq!(dot.matches("label=").count(), 6);
    let edges: Vec<&str> = dot.lines().filter(|l| l.contains("->")).collect();
    assert_eq!(
        edges,
        vec![
            "  n0 -> n1;",
            "  n1 -> n2;",
            "  n1 -> n3;",
            "  n1 -> n4;",
            "  n0 -> n5;"
        ]
    );

    let o = coproof(&["unfold", &ex1(), "P(a)", "--depth", "1", "--format", "tree"]);
    assert_eq!(
        stdout(&o),
        "⊬ P(a)  [c3; x := eps]\n  ⊬ Q(a)  ...\n  ⊬ S(a)  ...\n"
    );

    let o = coproof(&["unfold", &ex1(), "R(a)", "--depth", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = coproof(&["unfold", &ex1(), "P(a)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn printing_commands() {
    let o = coproof(&["saturate", &ex1()]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 11);
    assert!(text.contains("P(x) <- Q(x), R(x).  # r5 rank 1"));
    let o = coproof(&["automaton", &ex1()]);
    assert_eq!(stdout(&o).lines().count(), 6);
    let o = coproof(&["complement", &ex1()]);
    assert_eq!(stdout(&o).lines().count(), 15);
    let o = coproof(&["complement", &ex1(), "--of", "original"]);
    assert_eq!(stdout(&o).lines().count(), 14);
    let o = coproof(&["complement", &ex1(), "--of", "nothing"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(coproof(&["--help"]).status.code(), Some(0));
}
