use clap::{Parser, Subcommand, ValueEnum};
use posinf::acceptance;
use posinf::enum_ops::{apply, load_operator};
use posinf::family::Tri;
use posinf::forcing::{build_generic, force_transform, Condition, ForceConfig, Forcer, GuardMode};
use posinf::formula::syntax::{parse, print, Registry};
use posinf::formula::{NFormula, TFormula, Vocabulary};
use posinf::linorder::sigma2_agreement;
use posinf::nformula::SetOracle;
use posinf::pullback::pullback;
use posinf::semantics::{evaluate_budgeted, evaluate_catalog_stable, evaluate_finite, evaluate_growing, witness, Cutoff, Model, Witness};
use posinf::structures::{diagram_bit, load_structure, AtomCodec, Catalog, DiagramStream, Presentation};
use posinf::{Error, Result};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "posinf", version, about = "Positive infinitary formulas, forcing and pullbacks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// τ-formula over `=`, `!=`, `Le`
    T,
    /// N-formula over `TRUE`, `FALSE`, `D(n)`
    N,
}

#[derive(Clone, Copy, ValueEnum)]
enum Guards {
    Literal,
    Occurring,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print its canonical form.
    Parse {
        #[arg(long)]
        formula: PathBuf,
        /// Formula kind; defaults from the extension (`.nf` is N, else T).
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Print the dual normal form.
    Neg {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the tag and level.
    Classify {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Decide whether a condition forces an N-formula.
    ForceCheck {
        /// Catalog tag (`fin(3)`, `omega`, …) or structure JSON file.
        #[arg(long)]
        structure: String,
        /// Comma-separated distinct elements.
        #[arg(long, default_value = "")]
        condition: String,
        #[arg(long)]
        formula: PathBuf,
        /// Step budget on infinite structures.
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        /// Also build a generic enumeration from the condition deciding the
        /// formula and write its stages and decisions here.
        #[arg(long)]
        generic_trace: Option<PathBuf>,
    },
    /// Print `Force_f(x_0, …, x_{m-1})`.
    ForceTransform {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long, value_enum, default_value = "literal")]
        guards: Guards,
    },
    /// Apply an enumeration operator to a diagram or a finite set, one JSON
    /// line per output atom.
    OpApply {
        #[arg(long)]
        op: PathBuf,
        /// Structure whose diagram is the input.
        #[arg(long, conflicts_with = "set")]
        structure: Option<String>,
        /// Comma-separated finite input set.
        #[arg(long)]
        set: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
    /// Pull a sentence back along an enumeration operator.
    Pullback {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        sentence: PathBuf,
        /// Print a JSON report with the stage trace instead of the sentence.
        #[arg(long)]
        json: bool,
    },
    /// Truth of a sentence in a structure.
    Eval {
        #[arg(long)]
        structure: String,
        #[arg(long)]
        formula: PathBuf,
        /// Three-valued search over the enumerated diagram with this budget.
        #[arg(long)]
        budget: Option<u64>,
        /// Print a JSON report with a witness trace.
        #[arg(long)]
        json: bool,
    },
    /// Run an experiment and write its JSON report.
    Experiment {
        #[command(subcommand)]
        which: Experiment,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Run only this criterion.
        #[arg(long)]
        only: Option<u32>,
    },
}

#[derive(Subcommand)]
enum Experiment {
    /// Σ2 sentences on tilde(ω) and tilde(ω*), with an ω/ω* control.
    Sigma2Agreement {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn kind_of(path: &Path, kind: Option<Kind>) -> Kind {
    kind.unwrap_or(match path.extension().and_then(|e| e.to_str()) {
        Some("nf") => Kind::N,
        _ => Kind::T,
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn tformula(path: &Path) -> Result<TFormula> {
    parse(&read(path)?, &Vocabulary::linear_order(), None)
}

fn nformula(path: &Path) -> Result<NFormula> {
    parse(&read(path)?, &Vocabulary::equality(), Some(&Registry::with_builtins()))
}

fn elements(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Io(format!("not an element: `{t}`"))))
        .collect()
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

/// Runs a subcommand; `Ok(false)` reports a failed check (exit 1).
fn run(cmd: Command) -> Result<bool> {
    let lo = Vocabulary::linear_order();
    match cmd {
        Command::Parse { formula, kind } => {
            let text = match kind_of(&formula, kind) {
                Kind::T => print(&tformula(&formula)?, &lo),
                Kind::N => print(&nformula(&formula)?, &Vocabulary::equality()),
            };
            emit(&text, None)?;
        }
        Command::Neg { formula, kind, out } => {
            let text = match kind_of(&formula, kind) {
                Kind::T => print(&tformula(&formula)?.neg()?, &lo),
                Kind::N => print(&nformula(&formula)?.neg()?, &Vocabulary::equality()),
            };
            emit(&text, out.as_deref())?;
        }
        Command::Classify { formula, kind } => {
            let (tag, level) = match kind_of(&formula, kind) {
                Kind::T => tformula(&formula)?.classify()?,
                Kind::N => nformula(&formula)?.classify()?,
            };
            emit(&format!("{tag} {level}"), None)?;
        }
        Command::ForceCheck {
            structure,
            condition,
            formula,
            budget,
            generic_trace,
        } => {
            let p = load_structure(&structure)?;
            let a = p.as_structure().ok_or(Error::UndecidablePresentation)?;
            let codec = AtomCodec::shared(a.vocabulary());
            let f = nformula(&formula)?;
            let cond = Condition::new(elements(&condition)?)?;
            let forcer = Forcer::new(a, &codec);
            let verdict = match a.size() {
                Some(_) => Tri::from_bool(forcer.forces(&cond, &f)?),
                None => forcer.forces_budgeted(&cond, &f, budget),
            };
            if let Some(path) = generic_trace {
                let g = build_generic(a, &codec, &cond, std::slice::from_ref(&f))?;
                let report = json!({"schema_version": SCHEMA_VERSION, "generic": g});
                emit(&pretty(&report), Some(&path))?;
            }
            emit(&verdict.to_string(), None)?;
        }
        Command::ForceTransform { formula, m, guards } => {
            let mut cfg = ForceConfig::new(AtomCodec::linear_order());
            cfg.guards = match guards {
                Guards::Literal => GuardMode::Literal,
                Guards::Occurring => GuardMode::Occurring,
            };
            emit(&print(&force_transform(&nformula(&formula)?, m, &cfg)?, &lo), None)?;
        }
        Command::OpApply {
            op,
            structure,
            set,
            budget,
        } => {
            let g = load_operator(&op.to_string_lossy())?;
            let input = match (structure, set) {
                (Some(s), None) => oracle(&load_structure(&s)?)?,
                (None, Some(s)) => SetOracle::finite(elements(&s)?),
                _ => return Err(Error::Io("give --structure or --set".into())),
            };
            for o in apply(&g, &input, budget) {
                println!("{}", json!({"atom": o.atom, "witness": o.witness}));
            }
        }
        Command::Pullback { op, sentence, json } => {
            let g = load_operator(&op.to_string_lossy())?;
            let s = tformula(&sentence)?;
            let r = pullback(&g, &s)?;
            let text = print(&r.sentence, g.source.as_ref().unwrap_or(&lo));
            if json {
                let report = json!({
                    "schema_version": SCHEMA_VERSION,
                    "operator": g.label,
                    "input": print(&s, &lo),
                    "sentence": text,
                    "class": r.class,
                    "stages": r.stages,
                });
                emit(&pretty(&report), None)?;
            } else {
                emit(&text, None)?;
            }
        }
        Command::Eval {
            structure,
            formula,
            budget,
            json,
        } => {
            let f = tformula(&formula)?;
            let (value, method, wit) = eval(&load_structure(&structure)?, &f, budget)?;
            if json {
                let report = json!({
                    "schema_version": SCHEMA_VERSION,
                    "structure": structure,
                    "formula": print(&f, &lo),
                    "value": value,
                    "method": method,
                    "witness": wit,
                });
                emit(&pretty(&report), None)?;
            } else {
                emit(&value.to_string(), None)?;
            }
        }
        Command::Experiment {
            which: Experiment::Sigma2Agreement { n, seed, out },
        } => {
            let rep = sigma2_agreement(n, seed)?;
            let text = serde_json::to_string_pretty(&rep)?;
            emit(&text, out.as_deref())?;
            eprintln!(
                "{} samples: {} disagreements on tilde orders, {} on the control",
                n, rep.tilde.disagreements, rep.control.disagreements
            );
            return Ok(rep.passed());
        }
        Command::Selftest { only } => {
            let results = match only {
                Some(id) => vec![acceptance::run_one(id).ok_or_else(|| Error::Io(format!("no criterion {id}")))?],
                None => acceptance::run_all(),
            };
            for r in &results {
                println!("{}", r.line());
            }
            return Ok(results.iter().all(|r| r.passed));
        }
    }
    Ok(true)
}

fn oracle(p: &Presentation) -> Result<SetOracle> {
    Ok(match p {
        Presentation::Stream(s) => SetOracle::Enumerated(s.codes.clone()),
        _ => {
            let s: Arc<dyn posinf::structures::Structure> = match p {
                Presentation::Table(t) => t.clone(),
                Presentation::Catalog(c) => Arc::new(c.clone()),
                Presentation::Stream(_) => unreachable!(),
            };
            let codec = AtomCodec::shared(s.vocabulary());
            SetOracle::Decidable(Arc::new(move |n| diagram_bit(&*s, &codec, n)))
        }
    })
}

fn eval(p: &Presentation, f: &TFormula, budget: Option<u64>) -> Result<(Tri, &'static str, Option<Witness>)> {
    if let Some(b) = budget {
        let stream = match p {
            Presentation::Stream(s) => s.clone(),
            Presentation::Table(t) => DiagramStream::of("table", t.clone()),
            Presentation::Catalog(c) => DiagramStream::of(c.to_string(), Arc::new(c.clone())),
        };
        return Ok((evaluate_budgeted(&stream, f, b)?, "budgeted", None));
    }
    match p {
        Presentation::Stream(s) => Ok((evaluate_budgeted(s, f, 100_000)?, "budgeted", None)),
        Presentation::Table(t) => {
            let v = evaluate_finite(&**t, f, &Default::default())?;
            let w = if f.is_finitary() { witness(Model::Finite(&**t), f)? } else { None };
            Ok((Tri::from_bool(v), "exact", w))
        }
        Presentation::Catalog(c) => catalog_eval(c, f),
    }
}

fn catalog_eval(c: &Catalog, f: &TFormula) -> Result<(Tri, &'static str, Option<Witness>)> {
    if !f.is_finitary() {
        let g = evaluate_growing(c, f, Cutoff::truncated(2, 2, 8), 3)?;
        let v = if g.stable { Tri::from_bool(g.value) } else { Tri::Unknown };
        return Ok((v, "truncated", None));
    }
    let (v, stable) = evaluate_catalog_stable(c, f)?;
    if !stable {
        return Ok((Tri::Unknown, "cutoff", None));
    }
    Ok((Tri::from_bool(v), "cutoff", witness(Model::Catalog(c, 1), f)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
