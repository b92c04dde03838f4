//! Command dispatch. Checks exit 0 on pass and 1 on failure or refusal;
//! builds print their output documents and exit 0.

use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use confsym::bialgebra::{
    algebra_from_coproduct, build_double, check_asi, check_frobenius, coproduct_from_algebra, induced_matched_pair,
    AsiMode,
};
use confsym::ybe::{check_o_operator, check_rota_baxter, classify_r, coboundary_coproduct, solution_from_o_operator};
use confsym::{semidirect, Bimodule, ConformalAlgebra, Error, Verdict};
use serde_json::{json, Value};

use crate::document::{emit_documents, parse_documents, Document, MapDoc};
use crate::error::{CliError, CliResult};
use crate::registry;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "confsym", version, about = "Exact checks and constructions for finite associative conformal algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify a family of identities; exit 0 on pass, 1 on failure.
    Check {
        #[arg(value_enum)]
        what: CheckWhat,
        /// Characterisation used by `check asi`.
        #[arg(long, value_enum, default_value_t = Mode::Full)]
        mode: Mode,
        #[command(flatten)]
        io: Inputs,
    },
    /// Report antisymmetry, qw1, cybe and thq3 for an r-matrix.
    Classify {
        #[arg(value_enum)]
        what: ClassifyWhat,
        #[command(flatten)]
        io: Inputs,
    },
    /// Construct a new structure and print it as a document.
    Build {
        #[arg(value_enum)]
        what: BuildWhat,
        #[command(flatten)]
        io: Inputs,
    },
    /// Builtin example structures.
    Examples {
        #[command(subcommand)]
        cmd: ExamplesCmd,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CheckWhat {
    Assoc,
    Coassoc,
    Frobenius,
    Bimodule,
    MatchedPair,
    Asi,
    Dendriform,
    OOperator,
    RotaBaxter,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ClassifyWhat {
    R,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BuildWhat {
    DualCoproduct,
    DualAlgebra,
    Double,
    Semidirect,
    Coboundary,
    SolutionFromOOperator,
    CanonicalSolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Full,
    Reduced,
}

#[derive(Debug, Subcommand)]
pub enum ExamplesCmd {
    /// List the builtin examples.
    List,
    /// Print the documents of a builtin example, e.g. `podd(L^3)`.
    Show { name: String },
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Document files (a single document or an array of them); `-` reads stdin.
    pub inputs: Vec<PathBuf>,
    /// Emit verdicts as JSON.
    #[arg(long)]
    pub json: bool,
    /// An r-matrix document.
    #[arg(long = "r", value_name = "FILE")]
    pub r: Option<PathBuf>,
    /// A bilinear form document.
    #[arg(long, value_name = "FILE")]
    pub form: Option<PathBuf>,
    /// A bimodule document.
    #[arg(long, value_name = "FILE")]
    pub bimodule: Option<PathBuf>,
    /// A module map document.
    #[arg(long, value_name = "FILE")]
    pub map: Option<PathBuf>,
}

/// Exit code and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_PASS,
            stdout,
            stderr: String::new(),
        }
    }
}

/// Runs one command line (including the program name).
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            return if code == EXIT_PASS {
                Outcome::ok(text)
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| execute(&cli.command, stdin)));
    match result {
        Ok(Ok(outcome)) => outcome,
        Ok(Err(e)) => Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            Outcome {
                code: EXIT_INTERNAL,
                stdout: String::new(),
                stderr: format!("internal error: {msg}\n"),
            }
        }
    }
}

fn execute(cmd: &Command, stdin: &mut dyn Read) -> CliResult<Outcome> {
    match cmd {
        Command::Check { what, mode, io } => {
            let pool = Pool::load(io, stdin)?;
            check(*what, *mode, &pool, io.json)
        }
        Command::Classify { what: ClassifyWhat::R, io } => {
            let pool = Pool::load(io, stdin)?;
            let a = pool.algebra()?;
            let r = pool.rmatrix()?;
            let c = classify_r(&a, &r)?;
            let parts = [
                ("antisymmetry", &c.antisymmetric),
                ("qw1", &c.qw1),
                ("cybe", &c.cybe),
                ("thq3", &c.thq3),
            ];
            Ok(report(&c.combined(), &parts, io.json))
        }
        Command::Build { what, io } => {
            let pool = Pool::load(io, stdin)?;
            build(*what, &pool, io.json)
        }
        Command::Examples { cmd: ExamplesCmd::List } => {
            let mut out = String::new();
            for (name, desc) in registry::EXAMPLES {
                out.push_str(&format!("{name:<11} {desc}\n"));
            }
            Ok(Outcome::ok(out))
        }
        Command::Examples {
            cmd: ExamplesCmd::Show { name },
        } => Ok(Outcome::ok(pretty(&emit_documents(&registry::lookup(name)?)))),
    }
}

fn check(what: CheckWhat, mode: Mode, pool: &Pool, as_json: bool) -> CliResult<Outcome> {
    let v = match what {
        CheckWhat::Assoc => pool.algebra()?.check_associativity(),
        CheckWhat::Coassoc => pool.coproduct()?.check_coassociativity(),
        CheckWhat::Frobenius => {
            let v = check_frobenius(&pool.algebra()?, &pool.form()?)?;
            let parts = ["symmetry", "invariance", "nondegeneracy"].map(|id| (id, v.only(id)));
            let parts: Vec<(&str, &Verdict)> = parts.iter().map(|(id, v)| (*id, v)).collect();
            return Ok(report(&v, &parts, as_json));
        }
        CheckWhat::Bimodule => pool.bimodule()?.check(),
        CheckWhat::MatchedPair => {
            if let Some(doc) = pool.find(|d| matches!(d, Document::MatchedPair(_))) {
                let Document::MatchedPair(mp) = doc else { unreachable!() };
                let algebras = pool.all_algebras();
                let [a, b] = algebras.as_slice() else {
                    return Err(CliError::input(
                        "check matched-pair",
                        format!("expected two conformal_algebra documents (A then B), found {}", algebras.len()),
                    ));
                };
                mp.resolve(a, b)?.check()
            } else {
                induced_matched_pair(&pool.algebra()?, &pool.coproduct()?)?.check()
            }
        }
        CheckWhat::Asi => {
            let mode = match mode {
                Mode::Full => AsiMode::Full,
                Mode::Reduced => AsiMode::Reduced,
            };
            match check_asi(&pool.algebra()?, &pool.coproduct()?, mode) {
                Err(e @ Error::Refused { .. }) => return Ok(refusal(&e, as_json)),
                other => other?,
            }
        }
        CheckWhat::Dendriform => pool.dendriform()?.check(),
        CheckWhat::OOperator => {
            let bm = pool.bimodule()?;
            match check_o_operator(&pool.map()?.at_zero(), &bm) {
                Err(e @ Error::Refused { .. }) => return Ok(refusal(&e, as_json)),
                other => other?,
            }
        }
        CheckWhat::RotaBaxter => check_rota_baxter(&pool.map()?.at_zero(), &pool.algebra()?)?,
    };
    Ok(report(&v, &[], as_json))
}

fn build(what: BuildWhat, pool: &Pool, as_json: bool) -> CliResult<Outcome> {
    let built: CliResult<Vec<Document>> = (|| {
        Ok(match what {
            BuildWhat::DualCoproduct => vec![Document::Coproduct(coproduct_from_algebra(&pool.algebra()?))],
            BuildWhat::DualAlgebra => vec![Document::Algebra(algebra_from_coproduct(&pool.coproduct()?))],
            BuildWhat::Double => {
                let d = build_double(&pool.algebra()?, &pool.coproduct()?)?;
                vec![
                    Document::Algebra(d.algebra),
                    Document::Form(d.form),
                    Document::Coproduct(d.coproduct),
                    Document::RMatrix(d.r),
                ]
            }
            BuildWhat::Semidirect => vec![Document::Algebra(semidirect(&pool.bimodule()?)?)],
            BuildWhat::Coboundary => {
                vec![Document::Coproduct(coboundary_coproduct(&pool.algebra()?, &pool.rmatrix()?)?)]
            }
            BuildWhat::SolutionFromOOperator => {
                let s = solution_from_o_operator(&pool.bimodule()?, &pool.map()?.conformal())?;
                vec![Document::Algebra(s.algebra), Document::RMatrix(s.r)]
            }
            BuildWhat::CanonicalSolution => {
                let s = pool.dendriform()?.canonical_solution()?;
                vec![Document::Algebra(s.algebra), Document::RMatrix(s.r)]
            }
        })
    })();
    match built {
        Ok(docs) => Ok(Outcome::ok(pretty(&emit_documents(&docs)))),
        Err(CliError::Core(e @ Error::Refused { .. })) => Ok(refusal(&e, as_json)),
        Err(e) => Err(e),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialise");
    s.push('\n');
    s
}

fn counterexamples_json(v: &Verdict) -> Value {
    Value::Array(
        v.counterexamples
            .iter()
            .map(|c| {
                json!({
                    "identity": c.identity,
                    "indices": c.indices,
                    "component": c.component,
                    "residual": c.residual.to_string(),
                })
            })
            .collect(),
    )
}

fn report(v: &Verdict, parts: &[(&str, &Verdict)], as_json: bool) -> Outcome {
    let code = if v.passed() { EXIT_PASS } else { EXIT_FAIL };
    let stdout = if as_json {
        let mut out = json!({"pass": v.passed()});
        if !parts.is_empty() {
            out["parts"] = parts.iter().map(|(id, p)| ((*id).to_owned(), Value::Bool(p.passed()))).collect();
        }
        out["counterexamples"] = counterexamples_json(v);
        pretty(&out)
    } else {
        let mut s = String::new();
        for (id, p) in parts {
            s.push_str(&format!("{id}: {}\n", if p.passed() { "pass" } else { "fail" }));
        }
        s.push_str(&format!("{v}"));
        if !s.ends_with('\n') {
            s.push('\n');
        }
        s
    };
    Outcome {
        code,
        stdout,
        stderr: String::new(),
    }
}

fn refusal(e: &Error, as_json: bool) -> Outcome {
    let Error::Refused { precondition, verdict } = e else {
        unreachable!("only refusals reach here")
    };
    let stdout = if as_json {
        pretty(&json!({
            "pass": false,
            "refused": precondition,
            "counterexamples": counterexamples_json(verdict),
        }))
    } else {
        format!("refused: {precondition} does not hold\n{verdict}\n")
    };
    Outcome {
        code: EXIT_FAIL,
        stdout,
        stderr: String::new(),
    }
}

/// Every document supplied on the command line, positional or by flag.
struct Pool {
    docs: Vec<Document>,
}

impl Pool {
    fn load(io: &Inputs, stdin: &mut dyn Read) -> CliResult<Pool> {
        let mut docs = Vec::new();
        let mut used_stdin = false;
        for path in &io.inputs {
            docs.extend(read_docs(path, stdin, &mut used_stdin)?);
        }
        let flagged = [
            (&io.r, "--r", "rmatrix"),
            (&io.form, "--form", "form"),
            (&io.bimodule, "--bimodule", "bimodule"),
            (&io.map, "--map", "module_map"),
        ];
        for (path, flag, kind) in flagged {
            let Some(path) = path else { continue };
            let found = read_docs(path, stdin, &mut used_stdin)?;
            if let Some(d) = found.iter().find(|d| d.kind() != kind) {
                return Err(CliError::input(
                    flag,
                    format!("expected {kind} documents, found a {} document", d.kind()),
                ));
            }
            docs.extend(found);
        }
        Ok(Pool { docs })
    }

    fn find(&self, pred: impl Fn(&Document) -> bool) -> Option<&Document> {
        self.docs.iter().find(|d| pred(d))
    }

    fn one<'a, T>(&'a self, kind: &str, pick: impl Fn(&'a Document) -> Option<&'a T>) -> CliResult<&'a T> {
        let found: Vec<&T> = self.docs.iter().filter_map(pick).collect();
        match found.as_slice() {
            [one] => Ok(one),
            [] => Err(CliError::input("inputs", format!("missing a {kind} document"))),
            many => Err(CliError::input(
                "inputs",
                format!("expected one {kind} document, found {}", many.len()),
            )),
        }
    }

    fn all_algebras(&self) -> Vec<ConformalAlgebra> {
        self.docs
            .iter()
            .filter_map(|d| match d {
                Document::Algebra(a) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }

    fn algebra(&self) -> CliResult<ConformalAlgebra> {
        self.one("conformal_algebra", |d| match d {
            Document::Algebra(a) => Some(a),
            _ => None,
        })
        .cloned()
    }

    fn coproduct(&self) -> CliResult<confsym::bialgebra::Coproduct> {
        self.one("coproduct", |d| match d {
            Document::Coproduct(c) => Some(c),
            _ => None,
        })
        .cloned()
    }

    fn form(&self) -> CliResult<confsym::bialgebra::BilinearForm> {
        self.one("form", |d| match d {
            Document::Form(f) => Some(f),
            _ => None,
        })
        .cloned()
    }

    fn rmatrix(&self) -> CliResult<confsym::TensorElement> {
        self.one("rmatrix", |d| match d {
            Document::RMatrix(r) => Some(r),
            _ => None,
        })
        .cloned()
    }

    fn map(&self) -> CliResult<MapDoc> {
        self.one("module_map", |d| match d {
            Document::Map(m) => Some(m),
            _ => None,
        })
        .cloned()
    }

    fn dendriform(&self) -> CliResult<confsym::DendriformAlgebra> {
        self.one("dendriform", |d| match d {
            Document::Dendriform(x) => Some(x),
            _ => None,
        })
        .cloned()
    }

    fn bimodule(&self) -> CliResult<Bimodule> {
        let doc = self.one("bimodule", |d| match d {
            Document::Bimodule(b) => Some(b),
            _ => None,
        })?;
        doc.resolve(&self.algebra()?)
    }
}

fn read_docs(path: &Path, stdin: &mut dyn Read, used_stdin: &mut bool) -> CliResult<Vec<Document>> {
    let shown = path.display().to_string();
    let src = if shown == "-" {
        if std::mem::replace(used_stdin, true) {
            return Err(CliError::input("-", "standard input can only be read once"));
        }
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(|source| CliError::Io {
            path: "<stdin>".into(),
            source,
        })?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|source| CliError::Io { path: shown.clone(), source })?
    };
    parse_documents(&src).map_err(|e| e.within(&shown))
}
