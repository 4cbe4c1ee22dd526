//! Command-line front end for alternating pushdown systems: rule files,
//! decisions, certificates in JSON, tree or DOT form, and independent
//! certificate verification.

pub mod cert;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use coproof_core::counterproof::{CounterProofError, Selector};
use coproof_core::pipeline::PipelineError;
use coproof_core::proof::{CheckError, ProofSystem};
use coproof_core::rule::Provenance;
use coproof_core::saturation::{lift_proof, ProofTransformError};
use coproof_core::syntax::SignatureError;
use coproof_core::text::{print_system_annotated, ParseError};
use coproof_core::{
    check_proof, parse_atom, parse_system, Atom, CheckMode, CounterProofPrefix, Pipeline, Polarity,
    Proof, System, UnfoldContext, Verdict,
};

pub use cert::{Certificate, Kind};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("atom: {0}")]
    Atom(ParseError),
    #[error("atom: {0}")]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    CounterProof(#[from] CounterProofError),
    #[error("lifting: {0}")]
    Lift(#[from] ProofTransformError),
    #[error("certificate: {0}")]
    Json(#[from] serde_json::Error),
}

pub fn load_system(path: &Path) -> Result<System, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_system(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a closed atom and checks it against the system's signature.
pub fn load_atom(system: &System, text: &str) -> Result<Atom, CliError> {
    let atom = parse_atom(text).map_err(CliError::Atom)?;
    system.signature().check_atom(&atom)?;
    Ok(atom)
}

pub fn system_hash(pipeline: &Pipeline, kind: Kind) -> String {
    let text = match kind {
        Kind::Automaton => cert::canonical_text(kind, &pipeline.automaton),
        Kind::Original => cert::canonical_text(kind, pipeline.original()),
        Kind::AutomatonComplementation => {
            cert::canonical_signed_text(kind, &pipeline.automaton_signed)
        }
        Kind::OriginalComplementation => {
            cert::canonical_signed_text(kind, &pipeline.original_signed)
        }
    };
    cert::hash_text(&text)
}

fn proof_system(pipeline: &Pipeline, kind: Kind) -> &dyn ProofSystem {
    match kind {
        Kind::Automaton => &pipeline.automaton,
        Kind::Original => pipeline.original(),
        Kind::AutomatonComplementation => &pipeline.automaton_signed,
        Kind::OriginalComplementation => &pipeline.original_signed,
    }
}

/// The finite certificate for `atom`: a proof in the automaton (or, with
/// `lift`, in the original system) if it is provable, otherwise a
/// refutation in the complementation of the automaton.
pub fn certify(pipeline: &Pipeline, atom: &Atom, lift: bool) -> Result<(Kind, Proof), CliError> {
    let mut sess = pipeline.session();
    Ok(match sess.decide(atom) {
        Verdict::Provable => {
            let proof = sess.prove(atom).map_err(CounterProofError::from)?;
            if lift {
                (Kind::Original, lift_proof(&pipeline.saturated, &proof)?)
            } else {
                (Kind::Automaton, proof)
            }
        }
        Verdict::Refutable => (
            Kind::AutomatonComplementation,
            sess.refute(atom).map_err(CounterProofError::from)?,
        ),
    })
}

pub fn unfold(
    pipeline: &Pipeline,
    atom: &Atom,
    depth: usize,
    naive: bool,
) -> Result<CounterProofPrefix, CliError> {
    let selector = if naive {
        Selector::Naive
    } else {
        Selector::Efficient
    };
    Ok(UnfoldContext::new(pipeline).unfold_with(selector, atom, depth)?)
}

pub fn certificate(pipeline: &Pipeline, kind: Kind, proof: &Proof) -> Certificate {
    Certificate::new(proof, system_hash(pipeline, kind))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid(Kind),
    Invalid(String),
}

/// Checks a certificate against the system it claims to be about. The hash
/// selects the kind; the proof must then pass the checker, every refuted
/// atom of a counter-proof prefix must be refutable, and the certificate
/// must be the one `certify` or `unfold` produces for its root.
pub fn verify(pipeline: &Pipeline, cert: &Certificate) -> Validity {
    let Some(kind) = Kind::ALL
        .into_iter()
        .find(|&k| system_hash(pipeline, k) == cert.system_hash)
    else {
        return Validity::Invalid("system hash matches no system derived from this file".into());
    };
    let system = proof_system(pipeline, kind);
    let proof = cert::decode(&cert.root, system);
    let mode = match kind {
        Kind::OriginalComplementation => CheckMode::Prefix,
        _ => CheckMode::Complete,
    };
    if let Err(e) = check_proof(system, &proof, mode) {
        return Validity::Invalid(describe(e));
    }
    let expected_polarity = match kind {
        Kind::Automaton | Kind::Original => Polarity::Proved,
        _ => Polarity::Refuted,
    };
    if proof.sequent.polarity != expected_polarity {
        return Validity::Invalid(format!(
            "a {kind} certificate must have a {} root",
            expected_polarity.symbol()
        ));
    }
    let mut sess = pipeline.session();
    if kind == Kind::OriginalComplementation {
        let mut provable = None;
        proof.walk(&mut |path, node| {
            if provable.is_none() && sess.decide(node.atom()) == Verdict::Provable {
                provable = Some(format!("at {path:?}: {} is provable", node.atom()));
            }
        });
        if let Some(msg) = provable {
            return Validity::Invalid(msg);
        }
    }
    if canonical(pipeline, kind, &proof) {
        Validity::Valid(kind)
    } else {
        Validity::Invalid(format!(
            "valid {kind} proof, but not the certificate produced for its root"
        ))
    }
}

fn describe(e: CheckError) -> String {
    format!("check failed {e}")
}

fn canonical(pipeline: &Pipeline, kind: Kind, proof: &Proof) -> bool {
    let atom = proof.atom();
    if kind == Kind::OriginalComplementation {
        // An unfold to depth d has height d edges, or fewer if every branch
        // ends in an axiom.
        let height = proof.depth() - 1;
        return [height, height + 1].into_iter().any(|d| {
            [false, true]
                .into_iter()
                .any(|naive| unfold(pipeline, atom, d, naive).is_ok_and(|cp| cp.proof == *proof))
        });
    }
    certify(pipeline, atom, kind == Kind::Original).is_ok_and(|(k, p)| k == kind && p == *proof)
}

#[derive(Parser, Debug)]
#[command(
    name = "coproof",
    version,
    about = "Decide, certify and unfold alternating pushdown systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tree,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Of {
    Automaton,
    Original,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a rule file.
    Check { file: PathBuf },
    /// Print the saturated system with provenance comments.
    Saturate { file: PathBuf },
    /// Print the automaton: the introduction rules of the saturated system.
    Automaton { file: PathBuf },
    /// Print the complement of the automaton or of the original system.
    Complement {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "automaton")]
        of: Of,
    },
    /// Decide an atom; exit 0 if provable, 1 if refutable.
    Decide { file: PathBuf, atom: String },
    /// Emit a finite proof or refutation of an atom.
    Certify {
        file: PathBuf,
        atom: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Give proofs in the original system instead of the automaton.
        #[arg(long)]
        lift: bool,
    },
    /// Unfold the counter-proof of a refutable atom to a depth bound.
    Unfold {
        file: PathBuf,
        atom: String,
        #[arg(long)]
        depth: usize,
        /// Select premises with the decision procedure instead of by rank.
        #[arg(long)]
        naive: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Re-check a certificate; exit 0 if valid, 1 if invalid.
    Verify { file: PathBuf, cert: PathBuf },
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status: 0 success, 1 a negative answer, 2 an error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn render(
    format: Format,
    proof: &Proof,
    cert: impl FnOnce() -> Certificate,
    loops: &[(Vec<usize>, usize)],
) -> String {
    match format {
        Format::Json => cert().to_json(),
        Format::Tree => proof.render_tree(),
        Format::Dot => cert::to_dot(proof, loops),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Check { file } => {
            let sys = load_system(&file)?;
            let counts: Vec<String> = sys
                .class_counts()
                .into_iter()
                .map(|(c, n)| format!("{c:?} {n}").to_lowercase())
                .collect();
            emit(
                out,
                &format!("ok: {} rules ({})\n", sys.len(), counts.join(", ")),
            )?;
            Ok(0)
        }
        Command::Saturate { file } => {
            let pl = Pipeline::build(&load_system(&file)?)?;
            let ss = &pl.saturated;
            let text = print_system_annotated(ss.rules(), |r| {
                let rank = ss
                    .rank(r.id())
                    .map(|n| n.to_string())
                    .unwrap_or_else(|_| "?".into());
                let origin = match r.provenance() {
                    Provenance::Composed(c) => {
                        let parts: Vec<String> = c
                            .parts
                            .iter()
                            .enumerate()
                            .filter_map(|(i, p)| p.as_ref().map(|p| format!("{p} at {}", i + 1)))
                            .collect();
                        format!(", {} with {}", c.base, parts.join(", "))
                    }
                    _ => String::new(),
                };
                Some(format!("{} rank {rank}{origin}", r.id()))
            });
            emit(out, &text)?;
            Ok(0)
        }
        Command::Automaton { file } => {
            let pl = Pipeline::build(&load_system(&file)?)?;
            emit(
                out,
                &print_system_annotated(&pl.automaton, |r| Some(r.id().to_string())),
            )?;
            Ok(0)
        }
        Command::Complement { file, of } => {
            let pl = Pipeline::build(&load_system(&file)?)?;
            let signed = match of {
                Of::Automaton => &pl.automaton_signed,
                Of::Original => &pl.original_signed,
            };
            let text = print_system_annotated(signed.negative(), |r| {
                let n = signed.selections(r.id()).len();
                Some(format!(
                    "{} from {n} selection{}",
                    r.id(),
                    if n == 1 { "" } else { "s" }
                ))
            });
            emit(out, &text)?;
            Ok(0)
        }
        Command::Decide { file, atom } => {
            let sys = load_system(&file)?;
            let atom = load_atom(&sys, &atom)?;
            let pl = Pipeline::build(&sys)?;
            let verdict = pl.session().decide(&atom);
            emit(out, &format!("{verdict}\n"))?;
            Ok(match verdict {
                Verdict::Provable => 0,
                Verdict::Refutable => 1,
            })
        }
        Command::Certify {
            file,
            atom,
            format,
            lift,
        } => {
            let sys = load_system(&file)?;
            let atom = load_atom(&sys, &atom)?;
            let pl = Pipeline::build(&sys)?;
            let (kind, proof) = certify(&pl, &atom, lift)?;
            if lift && kind == Kind::AutomatonComplementation {
                let _ = writeln!(
                    err,
                    "note: {atom} is refutable; --lift applies to proofs only"
                );
            }
            emit(
                out,
                &render(format, &proof, || certificate(&pl, kind, &proof), &[]),
            )?;
            Ok(0)
        }
        Command::Unfold {
            file,
            atom,
            depth,
            naive,
            format,
        } => {
            let sys = load_system(&file)?;
            let atom = load_atom(&sys, &atom)?;
            let pl = Pipeline::build(&sys)?;
            let cp = unfold(&pl, &atom, depth, naive)?;
            let loops: Vec<(Vec<usize>, usize)> = cp
                .loops
                .iter()
                .map(|l| (l.path.clone(), l.ancestor))
                .collect();
            let mut text = render(
                format,
                &cp.proof,
                || certificate(&pl, Kind::OriginalComplementation, &cp.proof),
                &loops,
            );
            if format == Format::Tree {
                for l in &cp.loops {
                    text.push_str(&format!(
                        "loop: {:?} repeats the sequent at depth {}\n",
                        l.path, l.ancestor
                    ));
                }
            }
            emit(out, &text)?;
            Ok(0)
        }
        Command::Verify { file, cert } => {
            let pl = Pipeline::build(&load_system(&file)?)?;
            let text = std::fs::read_to_string(&cert)
                .map_err(|source| CliError::Io { path: cert, source })?;
            let c = Certificate::from_json(&text)?;
            match verify(&pl, &c) {
                Validity::Valid(kind) => {
                    emit(out, &format!("valid {kind} certificate\n"))?;
                    Ok(0)
                }
                Validity::Invalid(why) => {
                    emit(out, &format!("invalid: {why}\n"))?;
                    Ok(1)
                }
            }
        }
    }
}
