//! Command-line front end: parse a program, infer its effect or coeffect
//! judgment, evaluate it under an indexed-monad instance, dump the full
//! derivation as JSON, or run the law harness.
//!
//! Exit codes: 0 on success, 1 on analysis errors (parse, inference,
//! evaluation — with a diagnostic), 2 on usage errors (bad flags, missing
//! files, malformed inputs). All JSON output is deterministic: objects are
//! emitted in sorted key order and the law harness derives every sampling
//! decision from the `--seed`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use idxeff::coeffects::{infer_coeffect, CoeffectJudgment};
use idxeff::effects::EffectJudgment;
use idxeff::gen::default_signature;
use idxeff::harness::{
    check_fiber_not_monad, check_indexed_comonad_laws, check_indexed_monad_laws,
    check_unindexed_partiality_no_counit, default_value_types, Budget, LawReport,
    LawVerdict,
};
use idxeff::semantics::instance_for;
use idxeff::{
    default_algebra, eval_program, infer_effect, make_partiality_instance, parse,
    pretty, pretty_type, BaseTy, InstanceKind, ProgramInputs, Scalar, SemValue,
    Signature,
};

// ============================================================================
// Command line
// ============================================================================

#[derive(Parser)]
#[command(
    name = "idxeff",
    version,
    about = "Effect and coeffect analysis over indexed monad and comonad semantics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Infer the type and effect of a program: Γ ⊢ e : τ, F
    Check(AnalyzeArgs),
    /// Infer the liveness demand of a pure program, with its let table
    Coeffect(AnalyzeArgs),
    /// Type-check, compile, and run a closed program
    Eval(EvalArgs),
    /// Emit the full effect derivation, with ι insertion sites, as JSON
    Annotate(AnalyzeArgs),
    /// Run the law harness
    Laws(LawsArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Program file; `-` or absent reads stdin
    file: Option<PathBuf>,
    /// reader | memory | trace | identity (default: inferred from the
    /// program's declarations)
    #[arg(long)]
    instance: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Args)]
struct EvalArgs {
    /// Program file; `-` or absent reads stdin
    file: Option<PathBuf>,
    /// reader | memory | trace | identity (default: inferred from the
    /// program's declarations)
    #[arg(long)]
    instance: Option<String>,
    /// JSON inputs file: {"env": {"p": 3}, "store": {"r": 0}}
    #[arg(long)]
    inputs: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Args)]
struct LawsArgs {
    /// reader | memory | trace | identity | partiality | all
    #[arg(long, default_value = "all")]
    instance: String,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Per-law evaluation budget
    #[arg(long)]
    budget: Option<u64>,
    /// Seed for every sampling decision in the harness
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

// ============================================================================
// Error plumbing
// ============================================================================

/// Everything that can go wrong, split by exit code.
enum CmdError {
    /// Exit 2: the invocation itself is wrong.
    Usage(String),
    /// Exit 1: the program or its inputs fail analysis.
    Analysis(String),
    /// Exit 1 with no extra diagnostic: the command already printed a full
    /// report (e.g. `laws` listing violations) and only the code matters.
    Reported,
}

impl CmdError {
    fn code(&self) -> u8 {
        match self {
            CmdError::Usage(_) => 2,
            CmdError::Analysis(_) | CmdError::Reported => 1,
        }
    }

    fn message(&self) -> Option<&str> {
        match self {
            CmdError::Usage(m) | CmdError::Analysis(m) => Some(m),
            CmdError::Reported => None,
        }
    }
}

fn analysis<E: std::fmt::Display>(e: E) -> CmdError {
    CmdError::Analysis(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match &cli.command {
        Command::Check(a) | Command::Coeffect(a) | Command::Annotate(a) => a.format,
        Command::Eval(a) => a.format,
        Command::Laws(a) => a.format,
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(msg) = e.message() {
                match format {
                    Format::Human => eprintln!("error: {msg}"),
                    Format::Json => {
                        let v = json!({ "error": msg });
                        println!("{}", to_pretty(&v));
                    }
                }
            }
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(), CmdError> {
    match command {
        Command::Check(args) => cmd_check(args),
        Command::Coeffect(args) => cmd_coeffect(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Annotate(args) => cmd_annotate(args),
        Command::Laws(args) => cmd_laws(args),
    }
}

// ============================================================================
// Shared front matter
// ============================================================================

fn read_program(file: &Option<PathBuf>) -> Result<String, CmdError> {
    match file {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p)
            .map_err(|e| CmdError::Usage(format!("cannot read {}: {e}", p.display()))),
        _ => {
            let mut src = String::new();
            std::io::stdin()
                .read_to_string(&mut src)
                .map_err(|e| CmdError::Usage(format!("cannot read stdin: {e}")))?;
            Ok(src)
        }
    }
}

/// Picks the instance: an explicit `--instance` wins; otherwise the
/// program's declarations decide (params → reader, regions → memory, tags →
/// trace, none → identity). Mixed declarations need an explicit choice.
fn resolve_instance(
    arg: &Option<String>,
    sig: &Signature,
) -> Result<InstanceKind, CmdError> {
    if let Some(name) = arg {
        return InstanceKind::parse(name)
            .ok_or_else(|| CmdError::Usage(format!("unknown instance `{name}`")));
    }
    let mut kinds = Vec::new();
    if !sig.params.is_empty() {
        kinds.push(InstanceKind::Reader);
    }
    if !sig.regions.is_empty() {
        kinds.push(InstanceKind::Memory);
    }
    if !sig.tags.is_empty() {
        kinds.push(InstanceKind::Trace);
    }
    match kinds.as_slice() {
        [] => Ok(InstanceKind::Identity),
        [one] => Ok(*one),
        _ => Err(CmdError::Usage(
            "program declares several effect namespaces; pass --instance".to_string(),
        )),
    }
}

fn front(
    file: &Option<PathBuf>,
    instance: &Option<String>,
) -> Result<(Signature, idxeff::Term, InstanceKind), CmdError> {
    let src = read_program(file)?;
    let (sig, term) = parse(&src).map_err(analysis)?;
    let kind = resolve_instance(instance, &sig)?;
    Ok((sig, term, kind))
}

fn infer(
    sig: &Signature,
    kind: InstanceKind,
    term: &idxeff::Term,
) -> Result<EffectJudgment, CmdError> {
    let alg = default_algebra(kind, sig);
    infer_effect(sig, &alg, &BTreeMap::new(), term).map_err(analysis)
}

// ============================================================================
// JSON schema
// ============================================================================

/// Stable pretty printer: serde_json's default map is ordered, so output is
/// byte-deterministic for golden files.
fn to_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON serialization cannot fail")
}

fn scalar_json(s: &Scalar) -> Value {
    match s {
        Scalar::Unit => json!("unit"),
        Scalar::Bool(b) => json!(b),
        Scalar::IntMod(k, _) => json!(k),
    }
}

fn value_json(v: &SemValue) -> Value {
    if let Some(s) = v.as_scalar() {
        return scalar_json(&s);
    }
    match v {
        SemValue::Pair(a, b) => json!([value_json(a), value_json(b)]),
        other => json!(idxeff::value::render_value(other)),
    }
}

fn index_json(ix: &idxeff::Index) -> Value {
    json!(ix.token_strings())
}

fn judgment_json(j: &EffectJudgment) -> Value {
    let ctx: Map<String, Value> = j
        .ctx
        .iter()
        .map(|(x, ty)| (x.clone(), json!(pretty_type(ty))))
        .collect();
    let coercions: Vec<Value> = j
        .coercions
        .iter()
        .map(|c| {
            json!({
                "from": index_json(&c.from),
                "to": index_json(&c.to),
                "site": c.site,
            })
        })
        .collect();
    let children: Vec<Value> = j.children.iter().map(judgment_json).collect();
    json!({
        "rule": j.rule,
        "term": pretty(&j.term),
        "ctx": Value::Object(ctx),
        "ty": pretty_type(&j.ty),
        "effect": index_json(&j.effect),
        "coercions": coercions,
        "children": children,
    })
}

// ============================================================================
// check
// ============================================================================

fn cmd_check(args: AnalyzeArgs) -> Result<(), CmdError> {
    let (sig, term, kind) = front(&args.file, &args.instance)?;
    let j = infer(&sig, kind, &term)?;
    match args.format {
        Format::Human => {
            println!("⊢ {} : {}, {}", pretty(&term), pretty_type(&j.ty), j.effect.render());
        }
        Format::Json => {
            let v = json!({
                "instance": kind.name(),
                "term": pretty(&term),
                "ty": pretty_type(&j.ty),
                "effect": index_json(&j.effect),
            });
            println!("{}", to_pretty(&v));
        }
    }
    Ok(())
}

// ============================================================================
// coeffect
// ============================================================================

fn liveness_json(j: &CoeffectJudgment) -> Value {
    let lets: Map<String, Value> =
        j.lets.iter().map(|(k, live)| (k.clone(), json!(live))).collect();
    Value::Object(lets)
}

fn cmd_coeffect(args: AnalyzeArgs) -> Result<(), CmdError> {
    let (sig, term, _) = front(&args.file, &args.instance)?;
    let j = infer_coeffect(&sig, &Vec::new(), &term).map_err(analysis)?;
    match args.format {
        Format::Human => {
            println!("? {} ⊢ {} : {}", j.demand.render(), pretty(&term), j.ty);
            if j.lets.is_empty() {
                println!("lets: none");
            } else {
                println!("lets:");
                for (key, live) in &j.lets {
                    let verdict = if *live { "live" } else { "dead" };
                    println!("  {key}: {verdict}");
                }
            }
        }
        Format::Json => {
            let v = json!({
                "term": pretty(&term),
                "ty": j.ty.to_string(),
                "demand": j.demand.render(),
                "lets": liveness_json(&j),
            });
            println!("{}", to_pretty(&v));
        }
    }
    Ok(())
}

// ============================================================================
// eval
// ============================================================================

/// Reads `{"env": {...}, "store": {...}}`, converting JSON scalars against
/// the declared base of each name: numbers for `intN`, booleans for `bool`,
/// the string `"unit"` for `unit`.
fn load_inputs(
    path: &Option<PathBuf>,
    sig: &Signature,
) -> Result<ProgramInputs, CmdError> {
    let Some(path) = path else {
        return Ok(ProgramInputs::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CmdError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CmdError::Usage(format!("{}: {e}", path.display())))?;
    let section = |key: &str,
                   decls: &BTreeMap<String, BaseTy>|
     -> Result<BTreeMap<String, Scalar>, CmdError> {
        let mut out = BTreeMap::new();
        let Some(obj) = v.get(key) else {
            return Ok(out);
        };
        let Some(obj) = obj.as_object() else {
            return Err(CmdError::Usage(format!("inputs `{key}` must be an object")));
        };
        for (name, raw) in obj {
            let Some(base) = decls.get(name) else {
                return Err(CmdError::Analysis(format!(
                    "inputs name `{name}` is not declared by the program"
                )));
            };
            let scalar = match (base, raw) {
                (BaseTy::Unit, Value::String(s)) if s == "unit" => Scalar::Unit,
                (BaseTy::Bool, Value::Bool(b)) => Scalar::Bool(*b),
                (BaseTy::IntMod(m), Value::Number(n)) => {
                    let k = n.as_i64().ok_or_else(|| {
                        CmdError::Usage(format!("inputs `{name}`: not an integer"))
                    })?;
                    Scalar::int_mod(k, *m)
                }
                _ => {
                    return Err(CmdError::Usage(format!(
                        "inputs `{name}`: expected a {base} value, got {raw}"
                    )))
                }
            };
            out.insert(name.clone(), scalar);
        }
        Ok(out)
    };
    Ok(ProgramInputs {
        env: section("env", &sig.params)?,
        store: section("store", &sig.regions)?,
    })
}

fn cmd_eval(args: EvalArgs) -> Result<(), CmdError> {
    let (sig, term, kind) = front(&args.file, &args.instance)?;
    let inputs = load_inputs(&args.inputs, &sig)?;
    let report = eval_program(kind, &sig, &term, &inputs).map_err(analysis)?;
    match args.format {
        Format::Human => {
            println!("value: {}", idxeff::value::render_value(&report.value));
            println!("effect: {}", report.effect.render());
            if kind == InstanceKind::Memory {
                let writes: Vec<String> = report
                    .writes
                    .iter()
                    .map(|(r, s)| format!("{r} = {s}"))
                    .collect();
                println!("writes: {{{}}}", writes.join(", "));
            }
            if kind == InstanceKind::Trace {
                let trace: Vec<String> = report
                    .trace
                    .iter()
                    .map(|(t, s)| format!("out {t} {s}"))
                    .collect();
                println!("trace: [{}]", trace.join(", "));
            }
            if let Some(demand) = &report.coeffect {
                println!("demand: {}", demand.render());
                for (key, live) in &report.liveness {
                    let verdict = if *live { "live" } else { "dead" };
                    let count = report.counters.get(key).copied().unwrap_or(0);
                    println!("  {key}: {verdict}, evaluated {count}x");
                }
            }
        }
        Format::Json => {
            let mut obj = Map::new();
            obj.insert("value".to_string(), value_json(&report.value));
            obj.insert("effect".to_string(), index_json(&report.effect));
            if kind == InstanceKind::Memory {
                let writes: Map<String, Value> = report
                    .writes
                    .iter()
                    .map(|(r, s)| (r.clone(), scalar_json(s)))
                    .collect();
                obj.insert("writes".to_string(), Value::Object(writes));
            }
            if kind == InstanceKind::Trace {
                let trace: Vec<Value> = report
                    .trace
                    .iter()
                    .map(|(t, s)| json!([t, scalar_json(s)]))
                    .collect();
                obj.insert("trace".to_string(), json!(trace));
            }
            if let Some(demand) = &report.coeffect {
                obj.insert("demand".to_string(), json!(demand.render()));
                let lets: Map<String, Value> = report
                    .liveness
                    .iter()
                    .map(|(k, live)| (k.clone(), json!(live)))
                    .collect();
                obj.insert("lets".to_string(), Value::Object(lets));
                let counters: Map<String, Value> = report
                    .counters
                    .iter()
                    .map(|(k, n)| (k.clone(), json!(n)))
                    .collect();
                obj.insert("counters".to_string(), Value::Object(counters));
            }
            println!("{}", to_pretty(&Value::Object(obj)));
        }
    }
    Ok(())
}

// ============================================================================
// annotate
// ============================================================================

fn cmd_annotate(args: AnalyzeArgs) -> Result<(), CmdError> {
    let (sig, term, kind) = front(&args.file, &args.instance)?;
    let j = infer(&sig, kind, &term)?;
    // Re-validate before printing: replay the derivation bottom-up and require
    // the recomputed annotations to coincide with the inferred ones.
    let alg = default_algebra(kind, &sig);
    idxeff::verify_derivation(&sig, &alg, &j).map_err(analysis)?;
    let v = json!({
        "instance": kind.name(),
        "program": idxeff::pretty_program(&sig, &term),
        "derivation": judgment_json(&j),
    });
    match args.format {
        // The derivation tree is JSON-native; human mode prints the same
        // document.
        Format::Human | Format::Json => println!("{}", to_pretty(&v)),
    }
    Ok(())
}

// ============================================================================
// laws
// ============================================================================

fn verdict_json(r: &LawReport) -> Value {
    match &r.verdict {
        LawVerdict::Pass { cases } => json!({
            "law": r.law,
            "verdict": "pass",
            "cases": cases,
        }),
        LawVerdict::SampledPass { cases } => json!({
            "law": r.law,
            "verdict": "sampled-pass",
            "cases": cases,
        }),
        LawVerdict::Fail { counterexample } => json!({
            "law": r.law,
            "verdict": "fail",
            "counterexample": counterexample,
        }),
        LawVerdict::BudgetExceeded => json!({
            "law": r.law,
            "verdict": "budget-exceeded",
        }),
        LawVerdict::Inapplicable { reason } => json!({
            "law": r.law,
            "verdict": "inapplicable",
            "reason": reason,
        }),
    }
}

fn monad_suite(kind: InstanceKind, budget: &Budget) -> Vec<LawReport> {
    let sig = default_signature(kind);
    let inst = instance_for(kind, &sig);
    check_indexed_monad_laws(&inst, &default_value_types(), budget)
}

fn cmd_laws(args: LawsArgs) -> Result<(), CmdError> {
    let mut budget = Budget::default();
    if let Some(evals) = args.budget {
        budget.evals = evals;
    }
    if let Some(seed) = args.seed {
        budget.seed = seed;
    }

    let mut suites: Vec<(String, Vec<LawReport>)> = Vec::new();
    match args.instance.as_str() {
        "all" => {
            for kind in [
                InstanceKind::Reader,
                InstanceKind::Memory,
                InstanceKind::Trace,
                InstanceKind::Identity,
            ] {
                suites.push((kind.name().to_string(), monad_suite(kind, &budget)));
            }
            suites.push((
                "partiality".to_string(),
                check_indexed_comonad_laws(
                    &make_partiality_instance(),
                    &default_value_types(),
                    &budget,
                ),
            ));
            suites.push((
                "negative".to_string(),
                vec![check_fiber_not_monad(), check_unindexed_partiality_no_counit()],
            ));
        }
        "partiality" => {
            suites.push((
                "partiality".to_string(),
                check_indexed_comonad_laws(
                    &make_partiality_instance(),
                    &default_value_types(),
                    &budget,
                ),
            ));
        }
        other => {
            let kind = InstanceKind::parse(other).ok_or_else(|| {
                CmdError::Usage(format!("unknown instance `{other}`"))
            })?;
            suites.push((kind.name().to_string(), monad_suite(kind, &budget)));
        }
    }

    let all_ok = suites
        .iter()
        .all(|(_, reports)| reports.iter().all(|r| r.ok()));
    match args.format {
        Format::Human => {
            for (name, reports) in &suites {
                println!("== {name} ==");
                for r in reports {
                    println!("{r}");
                }
            }
        }
        Format::Json => {
            let mut obj = Map::new();
            for (name, reports) in &suites {
                let list: Vec<Value> = reports.iter().map(verdict_json).collect();
                obj.insert(name.clone(), json!(list));
            }
            println!("{}", to_pretty(&Value::Object(obj)));
        }
    }
    if all_ok {
        Ok(())
    } else {
        // The report above already names every violation; exit 1 without a
        // second diagnostic so JSON output stays a single document.
        Err(CmdError::Reported)
    }
}
