//! `semlearn`: batch front end for the separability engine.
//!
//! Exit codes: 0 separable (or holds / done), 1 not separable (or fails),
//! 2 inconclusive, 3 malformed input.

mod report;

use std::collections::BTreeSet;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use semlearn::automata::{accepts_lasso, nfa_separate, parity_separate, AutomatonError};
use semlearn::ctl::{ctl_signature, CtlLogic};
use semlearn::dag::FormulaDag;
use semlearn::engine::{learn, size_bound, Logic, Outcome, Sample};
use semlearn::io::{
    parse_json, read_json, to_json_string, AutomatonJson, Fragment, KripkeJson, LassoJson, LoadedModels, LogicKind,
    SampleFile,
};
use semlearn::kripke::{KripkeStructure, NonBlockingKripke, DEFAULT_ACTION};
use semlearn::ltl::{ltl_signature, LassoWord, LtlLogic};
use semlearn::ltlp::{ltlp_signature, translate_lx, LtlpLogic};
use semlearn::ml::{ml_signature, ModalLogic};
use semlearn::oracle::{enumerate_min_formula, OracleOutcome};
use semlearn::random::{random_kripke, random_lasso, random_nonblocking, rng, DEFAULT_SEED};
use semlearn::samples::{box_gadget_sample, diamond_gadget_sample, gen_prime_sample, Lattice};
use semlearn::signature::LogicSignature;
use semlearn::syntax::{parse, render};

use report::{Format, Report};

const MALFORMED: u8 = 3;
const KEYWORDS: [&str; 14] = ["X", "F", "G", "U", "A", "E", "EX", "AX", "EF", "AF", "EG", "AG", "inject", "eps"];

#[derive(Parser)]
#[command(name = "semlearn", version, about = "Separating formulas for samples of positive and negative models")]
struct Cli {
    /// Output style; a `RESULT` line always ends the output.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct LogicOpts {
    /// Overrides the logic named in the sample file (ml, ltl-words, ctl, ltlp).
    #[arg(long)]
    logic: Option<String>,
    /// Comma-separated operator names, or `full`; overrides the sample file.
    #[arg(long)]
    fragment: Option<String>,
    /// Largest counting threshold for ML diamonds.
    #[arg(long)]
    max_k: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide separability and print a witness.
    Learn {
        sample: PathBuf,
        #[command(flatten)]
        opts: LogicOpts,
        /// Ceiling on closure entries.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Check one formula on one model.
    Modelcheck {
        model: PathBuf,
        formula: String,
        #[arg(long)]
        logic: String,
        #[arg(long)]
        max_k: Option<usize>,
        /// Extra propositions for the signature.
        #[arg(long, value_delimiter = ',')]
        props: Vec<String>,
    },
    /// Print the size bound of a sample.
    Bound {
        sample: PathBuf,
        #[command(flatten)]
        opts: LogicOpts,
    },
    /// Separate automata by a finite word or a lasso.
    SeparateWords {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long = "pos", num_args = 1.., required = true)]
        positives: Vec<PathBuf>,
        #[arg(long = "neg", num_args = 0..)]
        negatives: Vec<PathBuf>,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Write a sample file.
    GenSample(GenArgs),
    /// Smallest separating formula by enumeration.
    Oracle {
        sample: PathBuf,
        #[command(flatten)]
        opts: LogicOpts,
        /// Largest tree size tried; defaults to the size bound.
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Rewrite an X-only LTL formula into the path-quantifier-free fragment.
    TranslateLx {
        formula: String,
        #[arg(long, value_delimiter = ',')]
        props: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Nfa,
    Parity,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Prime,
    BoxGadget,
    DiamondGadget,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    And,
    Or,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: GenKind,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Variant::And)]
    variant: Variant,
    #[arg(long, default_value_t = 0)]
    j: usize,
    /// NFA file for the gadget samples.
    #[arg(long)]
    automaton: Option<PathBuf>,
    /// Initial state indices for the gadget samples.
    #[arg(long, value_delimiter = ',')]
    z: Vec<usize>,
    /// Logic of a random sample.
    #[arg(long, default_value = "ml")]
    logic: String,
    #[arg(long, default_value_t = 3)]
    states: usize,
    #[arg(long, default_value_t = 2)]
    positives: usize,
    #[arg(long, default_value_t = 2)]
    negatives: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

/// Input problem, reported with exit code 3.
struct Malformed(String);

impl<E: Display> From<E> for Malformed {
    fn from(e: E) -> Self {
        Malformed(e.to_string())
    }
}

type Run = Result<(Report, u8), Malformed>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { MALFORMED } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = match cli.command {
        Command::Learn { sample, opts, budget } => cmd_learn(&sample, &opts, budget),
        Command::Modelcheck {
            model,
            formula,
            logic,
            max_k,
            props,
        } => cmd_modelcheck(&model, &formula, &logic, max_k, &props),
        Command::Bound { sample, opts } => cmd_bound(&sample, &opts),
        Command::SeparateWords {
            mode,
            positives,
            negatives,
            budget,
        } => cmd_separate_words(mode, &positives, &negatives, budget),
        Command::GenSample(args) => cmd_gen_sample(&args, cli.format),
        Command::Oracle { sample, opts, cap } => cmd_oracle(&sample, &opts, cap),
        Command::TranslateLx { formula, props } => cmd_translate_lx(&formula, &props),
    };
    match out {
        Ok((report, code)) => {
            print!("{}", report.render(cli.format));
            ExitCode::from(code)
        }
        Err(Malformed(msg)) => {
            eprintln!("error: {}", msg);
            println!("RESULT error={}", serde_json::Value::String(msg));
            ExitCode::from(MALFORMED)
        }
    }
}

/// A sample with its logic built over the union of the models' vocabularies.
enum Loaded {
    Ml(ModalLogic, Sample<KripkeStructure>),
    Ltl(LtlLogic, Sample<LassoWord>),
    Ctl(CtlLogic, Sample<NonBlockingKripke>),
    Ltlp(LtlpLogic, Sample<NonBlockingKripke>),
}

macro_rules! with_logic {
    ($loaded:expr, |$l:ident, $s:ident| $body:expr) => {
        match $loaded {
            Loaded::Ml($l, $s) => $body,
            Loaded::Ltl($l, $s) => $body,
            Loaded::Ctl($l, $s) => $body,
            Loaded::Ltlp($l, $s) => $body,
        }
    };
}

struct SampleInput {
    kind: LogicKind,
    fragment: Fragment,
    loaded: Loaded,
    budget: Option<usize>,
}

fn parse_logic(name: &str) -> Result<LogicKind, Malformed> {
    LogicKind::parse(name).ok_or_else(|| Malformed(format!("unknown logic `{}` (ml, ltl-words, ctl, ltlp)", name)))
}

fn parse_fragment(text: &str) -> Fragment {
    if text.trim() == "full" {
        Fragment::full()
    } else {
        Fragment::Ops(text.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
    }
}

fn union<'a>(lists: impl IntoIterator<Item = &'a [String]>, extra: &[String]) -> Vec<String> {
    let mut all: BTreeSet<String> = lists.into_iter().flatten().cloned().collect();
    all.extend(extra.iter().cloned());
    all.into_iter().collect()
}

fn nonblocking(ks: Vec<KripkeStructure>) -> Result<Vec<NonBlockingKripke>, Malformed> {
    ks.into_iter().map(|k| k.validate_nonblocking().map_err(Malformed::from)).collect()
}

fn load_sample(path: &Path, opts: &LogicOpts) -> Result<SampleInput, Malformed> {
    let file: SampleFile = read_json(path)?;
    let kind = match &opts.logic {
        Some(l) => parse_logic(l)?,
        None => file.logic,
    };
    let file = SampleFile { logic: kind, ..file };
    let fragment = opts.fragment.as_deref().map(parse_fragment).unwrap_or_else(|| file.fragment.clone());
    let max_k = opts.max_k.or(file.options.max_k);
    let base = path.parent().unwrap_or(Path::new("."));
    let extra = &file.options.props;
    let loaded = match (kind, file.load_models(base)?) {
        (LogicKind::LtlWords, LoadedModels::Words(p, n)) => {
            let mut props: BTreeSet<String> = p.iter().chain(&n).flat_map(|w| w.props()).collect();
            props.extend(extra.iter().cloned());
            let props: Vec<String> = props.into_iter().collect();
            if props.is_empty() {
                return Err(Malformed("sample words mention no proposition; list one under options.props".into()));
            }
            Loaded::Ltl(ltl_signature(&props, file.options.duals)?, Sample::new(p, n))
        }
        (_, LoadedModels::Kripke(p, n)) => {
            let props = union(p.iter().chain(&n).map(|k| k.props()), extra);
            if props.is_empty() {
                return Err(Malformed("sample structures carry no proposition; list one under options.props".into()));
            }
            match kind {
                LogicKind::Ml => {
                    let actions = union(p.iter().chain(&n).map(|k| k.actions()), &[]);
                    let k = max_k.unwrap_or_else(|| p.iter().chain(&n).map(|m| m.state_count()).max().unwrap_or(1));
                    Loaded::Ml(ml_signature(&props, &actions, k.max(1))?, Sample::new(p, n))
                }
                LogicKind::Ctl => Loaded::Ctl(ctl_signature(&props)?, Sample::new(nonblocking(p)?, nonblocking(n)?)),
                _ => Loaded::Ltlp(ltlp_signature(&props)?, Sample::new(nonblocking(p)?, nonblocking(n)?)),
            }
        }
        (_, LoadedModels::Words(..)) => unreachable!("word models only load for word logics"),
    };
    Ok(SampleInput {
        kind,
        fragment,
        loaded,
        budget: file.options.budget,
    })
}

fn fragment_signature(full: &LogicSignature, fragment: &Fragment) -> Result<LogicSignature, Malformed> {
    Ok(match fragment.ops()? {
        None => full.clone(),
        Some(ops) => full.restrict_fragment(ops)?,
    })
}

fn cmd_learn(path: &Path, opts: &LogicOpts, budget: Option<usize>) -> Run {
    let input = load_sample(path, opts)?;
    let budget = budget.or(input.budget);
    let mut r = Report::new();
    r.field("logic", input.kind.name());
    let code = with_logic!(&input.loaded, |logic, sample| {
        let frag = fragment_signature(logic.signature(), &input.fragment)?;
        let report = learn(logic, &frag, sample, budget)?;
        let code = match report.outcome {
            Outcome::Separable {
                formula,
                dag_size,
                tree_size,
            } => {
                r.field("verdict", "separable")
                    .field("formula", render(&report.dag, formula))
                    .field("dag_size", dag_size)
                    .field("tree_size", tree_size);
                0
            }
            Outcome::NotSeparable => {
                r.field("verdict", "not-separable");
                1
            }
            Outcome::Inconclusive => {
                r.field("verdict", "inconclusive");
                2
            }
        };
        r.field("bound", report.bound.to_string())
            .field("entries", report.entries)
            .field("rounds", report.rounds)
            .field("time_ms", report.elapsed.as_millis() as u64);
        code
    });
    Ok((r, code))
}

fn cmd_bound(path: &Path, opts: &LogicOpts) -> Run {
    let input = load_sample(path, opts)?;
    let mut r = Report::new();
    let (bound, models) = with_logic!(&input.loaded, |logic, sample| (size_bound(logic, sample), sample.len()));
    r.line(format!("logic: {}", input.kind.name()))
        .line(format!("models: {}", models))
        .field("bound", bound.to_string())
        .summarize(&["bound"]);
    Ok((r, 0))
}

fn cmd_oracle(path: &Path, opts: &LogicOpts, cap: Option<u64>) -> Run {
    let input = load_sample(path, opts)?;
    let mut r = Report::new();
    r.field("logic", input.kind.name());
    let code = with_logic!(&input.loaded, |logic, sample| {
        let frag = fragment_signature(logic.signature(), &input.fragment)?;
        let cap = cap.unwrap_or_else(|| {
            let digits = size_bound(logic, sample).to_u64_digits();
            if digits.len() > 1 {
                u64::MAX
            } else {
                digits.first().copied().unwrap_or(0).max(1)
            }
        });
        let report = enumerate_min_formula(logic, &frag, sample, cap);
        match report.outcome {
            OracleOutcome::Separable {
                formula,
                tree_size,
                dag_size,
            } => {
                r.field("verdict", "separable")
                    .field("formula", render(&report.dag, formula))
                    .field("tree_size", tree_size)
                    .field("dag_size", dag_size);
                0
            }
            OracleOutcome::Exhausted { tuples, max_size } => {
                r.field("verdict", "not-separable").field("tuples", tuples).field("max_size", max_size);
                1
            }
            OracleOutcome::CapExceeded { cap, tuples } => {
                r.field("verdict", "cap-exceeded").field("cap", cap).field("tuples", tuples);
                2
            }
        }
    });
    Ok((r, code))
}

/// Propositions, actions and the largest diamond threshold mentioned in formula text.
fn scan_formula(text: &str) -> (Vec<String>, Vec<String>, usize) {
    let cs: Vec<char> = text.chars().collect();
    let ident = |i: usize| -> (String, usize) {
        let mut j = i;
        while j < cs.len() && (cs[j].is_ascii_alphanumeric() || cs[j] == '_') {
            j += 1;
        }
        (cs[i..j].iter().collect(), j)
    };
    let (mut props, mut actions, mut max_k) = (BTreeSet::new(), BTreeSet::new(), 0usize);
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if (c == '[' || c == '<') && i + 1 < cs.len() && (cs[i + 1].is_ascii_alphabetic() || cs[i + 1] == '_') {
            let (a, j) = ident(i + 1);
            actions.insert(a);
            i = j;
            if c == '<' && cs.get(i) == Some(&'>') && cs.get(i + 1) == Some(&'>') && cs.get(i + 2) == Some(&'=') {
                let mut k = i + 3;
                while k < cs.len() && cs[k].is_ascii_digit() {
                    k += 1;
                }
                let n: String = cs[i + 3..k].iter().collect();
                max_k = max_k.max(n.parse().unwrap_or(0));
                i = k;
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let (w, j) = ident(i);
            if !KEYWORDS.contains(&w.as_str()) {
                props.insert(w);
            }
            i = j;
        } else {
            i += 1;
        }
    }
    (props.into_iter().collect(), actions.into_iter().collect(), max_k)
}

fn parse_formula(dag: &mut FormulaDag, text: &str) -> Result<semlearn::dag::FormulaId, Malformed> {
    parse(dag, text).map_err(|e| Malformed(format!("formula, line 1: {}", e)))
}

fn check<L: Logic>(logic: &L, model: &L::Model, text: &str) -> Result<bool, Malformed> {
    let mut dag = FormulaDag::new(logic.signature().clone());
    let f = parse_formula(&mut dag, text)?;
    Ok(logic.model_check(model, &dag, f))
}

fn cmd_modelcheck(path: &Path, formula: &str, logic: &str, max_k: Option<usize>, extra: &[String]) -> Run {
    let kind = parse_logic(logic)?;
    let (mut props, actions, k) = scan_formula(formula);
    props.extend(extra.iter().cloned());
    let holds = if kind.uses_words() {
        let w = read_json::<LassoJson>(path)?.to_model()?;
        let mut duals = false;
        let mut base: BTreeSet<String> = w.props();
        for p in props {
            match p.strip_suffix("_bar") {
                Some(b) => {
                    duals = true;
                    base.insert(b.to_string());
                }
                None => {
                    base.insert(p);
                }
            }
        }
        if base.is_empty() {
            base.insert("p".into());
        }
        let base: Vec<String> = base.into_iter().collect();
        check(&ltl_signature(&base, duals)?, &w, formula)?
    } else {
        let m = read_json::<KripkeJson>(path)?.to_model()?;
        let mut props = union([m.props()], &props);
        if props.is_empty() {
            props.push("p".into());
        }
        match kind {
            LogicKind::Ml => {
                let mut acts = union([m.actions()], &actions);
                if acts.is_empty() {
                    acts.push(DEFAULT_ACTION.into());
                }
                let k = max_k.unwrap_or(0).max(k).max(m.state_count()).max(1);
                check(&ml_signature(&props, &acts, k)?, &m, formula)?
            }
            LogicKind::Ctl => check(&ctl_signature(&props)?, &m.validate_nonblocking()?, formula)?,
            _ => check(&ltlp_signature(&props)?, &m.validate_nonblocking()?, formula)?,
        }
    };
    let mut r = Report::new();
    r.field("logic", kind.name()).field("formula", formula.trim()).field("holds", holds);
    Ok((r, if holds { 0 } else { 1 }))
}

fn words(w: &[String]) -> String {
    w.join(" ")
}

fn cmd_separate_words(mode: Mode, pos: &[PathBuf], neg: &[PathBuf], budget: Option<usize>) -> Run {
    let load = |ps: &[PathBuf]| -> Result<Vec<AutomatonJson>, Malformed> {
        ps.iter().map(|p| read_json::<AutomatonJson>(p).map_err(Malformed::from)).collect()
    };
    let (pj, nj) = (load(pos)?, load(neg)?);
    let mut r = Report::new();
    let inconclusive = |r: &mut Report| {
        r.field("verdict", "inconclusive");
        2
    };
    let code = match mode {
        Mode::Nfa => {
            let p = pj.iter().map(|a| a.to_nfa()).collect::<Result<Vec<_>, _>>()?;
            let n = nj.iter().map(|a| a.to_nfa()).collect::<Result<Vec<_>, _>>()?;
            match nfa_separate(&p, &n, budget) {
                Err(AutomatonError::BudgetExceeded) => inconclusive(&mut r),
                Err(e) => return Err(e.into()),
                Ok(sep) => {
                    let code = match &sep.word {
                        Some(w) => {
                            let ok = p.iter().map(|a| a.accepts(w)).chain(n.iter().map(|a| a.accepts(w).map(|b| !b)));
                            let verified = ok.collect::<Result<Vec<bool>, _>>()?.into_iter().all(|b| b);
                            r.field("verdict", "separable")
                                .field("word", words(w))
                                .field("length", w.len())
                                .field("verified", verified);
                            0
                        }
                        None => {
                            r.field("verdict", "not-separable");
                            1
                        }
                    };
                    r.field("bound", sep.bound.to_string()).field("entries", sep.entries);
                    code
                }
            }
        }
        Mode::Parity => {
            let p = pj.iter().map(|a| a.to_parity()).collect::<Result<Vec<_>, _>>()?;
            let n = nj.iter().map(|a| a.to_parity()).collect::<Result<Vec<_>, _>>()?;
            match parity_separate(&p, &n, budget) {
                Err(AutomatonError::BudgetExceeded) => inconclusive(&mut r),
                Err(e) => return Err(e.into()),
                Ok(sep) => {
                    let code = match &sep.lasso {
                        Some((u, v)) => {
                            let mut verified = true;
                            for a in &p {
                                verified &= accepts_lasso(a, u, v)?;
                            }
                            for a in &n {
                                verified &= !accepts_lasso(a, u, v)?;
                            }
                            r.field("verdict", "separable")
                                .field("prefix", words(u))
                                .field("loop", words(v))
                                .field("verified", verified);
                            0
                        }
                        None => {
                            r.field("verdict", "not-separable");
                            1
                        }
                    };
                    r.field("n", sep.n)
                        .field("k", sep.k)
                        .field("prefix_entries", sep.prefix_entries)
                        .field("period_entries", sep.period_entries);
                    code
                }
            }
        }
    };
    Ok((r, code))
}

fn cmd_gen_sample(args: &GenArgs, format: Format) -> Run {
    let mut r = Report::new();
    let file = match args.kind {
        GenKind::Prime => {
            let variant = match args.variant {
                Variant::And => Lattice::And,
                Variant::Or => Lattice::Or,
            };
            let s = gen_prime_sample(args.n, variant, args.j)?;
            let ops = ["x", "y", variant.token(), "X", "F", "G"].iter().map(|o| o.to_string()).collect();
            r.field("kind", "prime").field("n", args.n).field("j", args.j).field("variant", variant.token());
            SampleFile::from_words(Fragment::Ops(ops), &s.positives, &s.negatives)
        }
        GenKind::BoxGadget | GenKind::DiamondGadget => {
            let path = args
                .automaton
                .as_ref()
                .ok_or_else(|| Malformed("gadget samples need --automaton".into()))?;
            let a = read_json::<AutomatonJson>(path)?.to_nfa()?;
            let z = if args.z.is_empty() { a.initial().to_vec() } else { args.z.clone() };
            let (name, s) = match args.kind {
                GenKind::BoxGadget => ("box-gadget", box_gadget_sample(&a, &z)?),
                _ => ("diamond-gadget", diamond_gadget_sample(&a, &z)?),
            };
            r.field("kind", name);
            SampleFile::from_kripke(LogicKind::Ml, Fragment::full(), &s.positives, &s.negatives)
        }
        GenKind::Random => {
            let kind = parse_logic(&args.logic)?;
            if args.states == 0 {
                return Err(Malformed("--states must be positive".into()));
            }
            let mut g = rng(args.seed);
            let total = args.positives + args.negatives;
            r.field("kind", "random").field("seed", args.seed);
            match kind {
                LogicKind::LtlWords => {
                    let ws: Vec<LassoWord> = (0..total).map(|_| random_lasso(&mut g, &["p", "q"], args.states)).collect();
                    let (p, n) = ws.split_at(args.positives);
                    SampleFile::from_words(Fragment::full(), p, n)
                }
                LogicKind::Ml => {
                    let ks: Vec<KripkeStructure> = (0..total)
                        .map(|_| random_kripke(&mut g, args.states, &["p", "q"], &["a", "b"], 0.4, false))
                        .collect();
                    let (p, n) = ks.split_at(args.positives);
                    SampleFile::from_kripke(kind, Fragment::full(), p, n)
                }
                _ => {
                    let ks: Vec<KripkeStructure> = (0..total)
                        .map(|_| random_nonblocking(&mut g, args.states, &["p", "q"], 0.4).into_inner())
                        .collect();
                    let (p, n) = ks.split_at(args.positives);
                    SampleFile::from_kripke(kind, Fragment::full(), p, n)
                }
            }
        }
    };
    let text = to_json_string(&file);
    // what a reader gets back must be what was written
    let again: SampleFile = parse_json(&text, "generated sample")?;
    debug_assert_eq!(again, file);
    r.field("logic", file.logic.name())
        .field("positives", file.positives.len())
        .field("negatives", file.negatives.len());
    match &args.out {
        Some(path) => {
            std::fs::write(path, format!("{}\n", text)).map_err(|e| Malformed(format!("{}: {}", path.display(), e)))?;
            r.field("file", path.display().to_string());
        }
        None => {
            if format == Format::Text {
                r.line(text);
            } else {
                r.field("sample", serde_json::to_value(&file)?);
            }
        }
    }
    Ok((r, 0))
}

fn cmd_translate_lx(formula: &str, extra: &[String]) -> Run {
    let (mut props, _, _) = scan_formula(formula);
    props.extend(extra.iter().cloned());
    props.sort();
    props.dedup();
    if props.is_empty() {
        return Err(Malformed("formula mentions no proposition".into()));
    }
    let src = ltl_signature(&props, false)?;
    let mut sdag = FormulaDag::new(src.signature().clone());
    let f = parse_formula(&mut sdag, formula)?;
    let dst = ltlp_signature(&props)?;
    let mut ddag = FormulaDag::new(dst.signature().clone());
    let g = translate_lx(&src, &sdag, f, &mut ddag)?;
    let text = render(&ddag, g);
    let mut r = Report::new();
    r.line(text.clone())
        .field("formula", text)
        .field("dag_size", ddag.dag_size(g)?)
        .summarize(&["formula"]);
    Ok((r, 0))
}
