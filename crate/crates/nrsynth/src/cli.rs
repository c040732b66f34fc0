//! Command-line front end: file-format dispatch, subcommand plumbing and the
//! randomized/exhaustive validation harness.
//!
//! Every subcommand is deterministic given `--seed` and its input files, and
//! exits with one of four codes: `0` on success, `1` on semantic rejection
//! (failed proof check, type error, oracle mismatch), `2` on parse or input
//! errors, `3` when an enumeration or translation budget is exceeded.
//!
//! The report goes to standard output as `key: value` lines, or as a single
//! JSON object under `--json`.  Artifacts (expressions, formulas,
//! interpretations) are printed in the s-expression surface syntax of
//! [`crate::sexpr`], or as nested JSON arrays with `--emit json`.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::calculus::{check_proof, elaborate_admissible, CheckError, CheckedProof};
use crate::interp::{interp_to_nrc, nrc_to_interp, Interp, InterpError};
use crate::interpolate::{contract_violations, interpolate, InterpolateError, Partition};
use crate::kernel::{typecheck_formula, Formula, ObjType, TypeContext};
use crate::monadic::{
    convert_expr, convert_inv_expr, depth_of, im_convert_formula, im_convert_formula_literal,
    monadic_type,
};
use crate::nrc::{compile_verify, eval_nrc, eval_nrc_typed, typecheck_nrc, NrcExpr};
use crate::sexpr::{
    parse_delta0, parse_interp, parse_nrc, parse_problem, parse_proof, parse_sexp, parse_type,
    print_formula, print_interp, print_nrc, value_from_json, value_to_json, ParseError,
    ProblemSource, ProofSource, Sexp, SexpKind,
};
use crate::synth::{synthesize_from_functionality, SynthError, SynthesisProblem};
use crate::values::{
    enumerate_valuations, eval_delta0, sample_formula, sample_value, Valuation, ValueError,
    C0, ENUM_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmitFormat {
    Sexpr,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "nrsynth", version, about = "Proof checking and program synthesis for nested relational transformations", long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every randomized harness.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Atom universe for enumeration and sampling.
    #[arg(long, global = true, value_delimiter = ',', default_value = "a,b,c")]
    pub universe: Vec<String>,
    /// Number of randomized trials.
    #[arg(long, global = true, default_value_t = 1000)]
    pub trials: usize,
    /// Validation mode for oracle checks.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Sampled)]
    pub mode: Mode,
    /// Machine-readable JSON report on standard output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Artifact syntax for expressions, formulas and interpretations.
    #[arg(long, global = true, value_enum, default_value_t = EmitFormat::Sexpr)]
    pub emit: EmitFormat,
    /// Reject emitted NRC expressions that use the `Get` extraction.
    #[arg(long, global = true)]
    pub no_get: bool,
    /// Use the literal containment form of the pair-image predicate in
    /// `convert-monadic` (kept for comparison; rejects proper pairs).
    #[arg(long, global = true)]
    pub strict_paper: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate any supported file (.d0 .nrc .proof .itp .prob .json).
    Check { file: PathBuf },
    /// Check a .proof file and report derivation statistics.
    Prove { file: PathBuf },
    /// Synthesize an NRC expression from a .prob functionality problem.
    Synth { file: PathBuf },
    /// Evaluate a .nrc expression on a .json input valuation.
    Eval {
        file: PathBuf,
        /// JSON input: an object of variable bindings, or a single value
        /// bound to the unique free variable.
        #[arg(long)]
        input: PathBuf,
    },
    /// Compile a .d0 formula to its Verify expression and validate it
    /// against the semantic truth oracle.
    VerifyCompile { file: PathBuf },
    /// Translate a .nrc expression into a Δ0 interpretation (.itp).
    ToInterp {
        file: PathBuf,
        /// Name of the expression's input variable.
        #[arg(long, default_value = "x")]
        var: String,
        /// Type of the input variable, as an s-expression.
        #[arg(long = "type")]
        ty: String,
    },
    /// Compile a .itp interpretation back to an NRC expression.
    FromInterp {
        file: PathBuf,
        /// Input variable of the emitted expression.
        #[arg(long, default_value = "x")]
        var: String,
    },
    /// Emit the monadic conversion expressions and image predicate for a type.
    ConvertMonadic {
        /// The object type to reduce, as an s-expression.
        #[arg(long = "type")]
        ty: String,
    },
    /// Interpolate a partitioned .proof derivation and check the contract.
    InterpBoolean {
        file: PathBuf,
        /// Θ indices assigned to the left part.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        theta_left: Vec<usize>,
        /// Γ indices assigned to the left part.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        gamma_left: Vec<usize>,
    },
    /// Randomized oracle equivalence harness for the Verify compiler.
    FuzzFunctional {},
}

/// A failed run: exit code plus diagnostic.
#[derive(Debug)]
pub struct Fail {
    pub code: i32,
    pub msg: String,
}

impl Fail {
    fn semantic(msg: impl Into<String>) -> Fail {
        Fail {
            code: 1,
            msg: msg.into(),
        }
    }
    fn parse(msg: impl Into<String>) -> Fail {
        Fail {
            code: 2,
            msg: msg.into(),
        }
    }
    fn budget(msg: impl Into<String>) -> Fail {
        Fail {
            code: 3,
            msg: msg.into(),
        }
    }
}

impl From<ParseError> for Fail {
    fn from(e: ParseError) -> Fail {
        Fail::parse(e.to_string())
    }
}

impl From<CheckError> for Fail {
    fn from(e: CheckError) -> Fail {
        Fail::semantic(e.to_string())
    }
}

impl From<ValueError> for Fail {
    fn from(e: ValueError) -> Fail {
        match e {
            ValueError::BudgetExceeded { .. } => Fail::budget(e.to_string()),
            _ => Fail::semantic(e.to_string()),
        }
    }
}

impl From<InterpError> for Fail {
    fn from(e: InterpError) -> Fail {
        match e {
            InterpError::SizeBudgetExceeded { .. } | InterpError::EvalBudget => {
                Fail::budget(e.to_string())
            }
            InterpError::Value(v) => v.into(),
            _ => Fail::semantic(e.to_string()),
        }
    }
}

impl From<SynthError> for Fail {
    fn from(e: SynthError) -> Fail {
        Fail::semantic(e.to_string())
    }
}

impl From<InterpolateError> for Fail {
    fn from(e: InterpolateError) -> Fail {
        Fail::semantic(e.to_string())
    }
}

/// The report is an ordered list of key/value pairs; text mode prints them
/// in order, JSON mode wraps them in one object.
type Report = Vec<(&'static str, serde_json::Value)>;

/// Run a parsed invocation and return the process exit code, printing the
/// report (or the diagnostic) as a side effect.
pub fn run(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok(report) => {
            emit_report(cli, &report);
            0
        }
        Err(fail) => {
            if cli.json {
                let obj = serde_json::json!({ "error": fail.msg, "code": fail.code });
                println!("{obj}");
            } else {
                eprintln!("error: {}", fail.msg);
            }
            fail.code
        }
    }
}

fn emit_report(cli: &Cli, report: &Report) {
    if cli.json {
        let mut obj = serde_json::Map::new();
        for (k, v) in report {
            obj.insert((*k).to_string(), v.clone());
        }
        println!("{}", serde_json::Value::Object(obj));
    } else {
        for (k, v) in report {
            match v {
                // `eval` prints the bare canonical JSON value.
                _ if *k == "value" => println!("{v}"),
                serde_json::Value::String(s) => println!("{k}: {s}"),
                other => println!("{k}: {other}"),
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Report, Fail> {
    validate_universe(&cli.universe)?;
    match &cli.command {
        Command::Check { file } => cmd_check(file),
        Command::Prove { file } => cmd_prove(file),
        Command::Synth { file } => cmd_synth(cli, file),
        Command::Eval { file, input } => cmd_eval(cli, file, input),
        Command::VerifyCompile { file } => cmd_verify_compile(cli, file),
        Command::ToInterp { file, var, ty } => cmd_to_interp(cli, file, var, ty),
        Command::FromInterp { file, var } => cmd_from_interp(cli, file, var),
        Command::ConvertMonadic { ty } => cmd_convert_monadic(cli, ty),
        Command::InterpBoolean {
            file,
            theta_left,
            gamma_left,
        } => cmd_interp_boolean(cli, file, theta_left, gamma_left),
        Command::FuzzFunctional {} => cmd_fuzz_functional(cli),
    }
}

fn validate_universe(universe: &[String]) -> Result<(), Fail> {
    if universe.is_empty() {
        return Err(Fail::parse("the atom universe must be nonempty"));
    }
    let distinct: BTreeSet<&String> = universe.iter().collect();
    if distinct.len() != universe.len() {
        return Err(Fail::parse("the atom universe has duplicate names"));
    }
    if universe.iter().any(|a| a == C0) {
        return Err(Fail::parse(format!(
            "the atom `{C0}` is reserved for the default constant"
        )));
    }
    Ok(())
}

fn read_file(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path)
        .map_err(|e| Fail::parse(format!("cannot read {}: {e}", path.display())))
}

fn extension(path: &Path) -> &str {
    path.extension().and_then(|e| e.to_str()).unwrap_or("")
}

/// Render an s-expression artifact per `--emit`: the raw surface string, or
/// the same tree as nested JSON arrays.
fn artifact(cli: &Cli, sexpr: &str) -> serde_json::Value {
    match cli.emit {
        EmitFormat::Sexpr => serde_json::Value::String(sexpr.trim_end().to_string()),
        EmitFormat::Json => {
            let parsed = parse_sexp(sexpr).expect("printed artifacts re-parse");
            sexp_to_json(&parsed)
        }
    }
}

fn sexp_to_json(s: &Sexp) -> serde_json::Value {
    match &s.kind {
        SexpKind::Sym(sym) => serde_json::Value::String(sym.clone()),
        SexpKind::List(items) => {
            serde_json::Value::Array(items.iter().map(sexp_to_json).collect())
        }
    }
}

fn contains_get(e: &NrcExpr) -> bool {
    match e {
        NrcExpr::GetE(_) => true,
        NrcExpr::Var(_) | NrcExpr::UnitE | NrcExpr::EmptyE(_) => false,
        NrcExpr::ProjE(_, a) | NrcExpr::SingletonE(a) => contains_get(a),
        NrcExpr::PairE(a, b)
        | NrcExpr::BigUnionE(_, a, b)
        | NrcExpr::UnionE(a, b)
        | NrcExpr::DiffE(a, b) => contains_get(a) || contains_get(b),
    }
}

fn enforce_no_get(cli: &Cli, e: &NrcExpr) -> Result<(), Fail> {
    if cli.no_get && contains_get(e) {
        return Err(Fail::semantic(
            "the emitted expression uses `Get`, which `--no-get` forbids",
        ));
    }
    Ok(())
}

fn parse_type_arg(text: &str) -> Result<ObjType, Fail> {
    Ok(parse_type(&parse_sexp(text)?)?)
}

/// Resolve a `.prob` file into a synthesis problem, loading a referenced
/// proof file relative to the problem's directory.
fn load_problem(path: &Path) -> Result<SynthesisProblem, Fail> {
    let src: ProblemSource = parse_problem(&read_file(path)?)?;
    let proof = match src.proof {
        ProofSource::Inline(node) => node,
        ProofSource::File(rel) => {
            let proof_path = path.parent().unwrap_or(Path::new(".")).join(rel);
            let (_, node) = parse_proof(&read_file(&proof_path)?)?;
            node
        }
    };
    Ok(SynthesisProblem {
        ctx: src.ctx,
        sigma: src.sigma,
        input_var: src.input_var,
        output_var: src.output_var,
        aux_vars: src.aux_vars,
        proof,
    })
}

fn proof_stats(proof: &CheckedProof) -> Report {
    vec![
        ("nodes", proof.nodes.into()),
        ("max-sequent-size", proof.max_sequent_size.into()),
        ("core-only", proof.core_only.into()),
    ]
}

fn cmd_check(file: &Path) -> Result<Report, Fail> {
    let mut report: Report = vec![("kind", extension(file).into())];
    match extension(file) {
        "d0" => {
            let (ctx, f) = parse_delta0(&read_file(file)?)?;
            typecheck_formula(&ctx, &f).map_err(|e| Fail::semantic(e.to_string()))?;
            report.push(("vars", ctx.len().into()));
            report.push(("size", formula_size(&f).into()));
        }
        "nrc" => {
            let e = parse_nrc(&parse_sexp(&read_file(file)?)?)?;
            let fv: Vec<serde_json::Value> = e
                .free_vars()
                .into_iter()
                .map(serde_json::Value::String)
                .collect();
            report.push(("size", e.size().into()));
            report.push(("free-vars", fv.into()));
        }
        "proof" => {
            let (ctx, node) = parse_proof(&read_file(file)?)?;
            let proof = check_proof(&ctx, &node)?;
            report.extend(proof_stats(&proof));
        }
        "itp" => {
            let i = parse_interp(&read_file(file)?)?;
            let i = Interp::new(i.input_type, i.output_type, i.sorts, i.out)
                .map_err(Fail::from)?;
            report.push(("sorts", i.sorts.len().into()));
        }
        "prob" => {
            let p = load_problem(file)?;
            let result = synthesize_from_functionality(&p)?;
            report.push(("proof-nodes", result.proof_nodes.into()));
            report.push(("synthesizes", true.into()));
        }
        "json" => {
            let v: serde_json::Value = serde_json::from_str(&read_file(file)?)
                .map_err(|e| Fail::parse(e.to_string()))?;
            value_from_json(&v)?;
        }
        other => {
            return Err(Fail::parse(format!(
                "unsupported file extension `.{other}`"
            )))
        }
    }
    report.push(("status", "ok".into()));
    Ok(report)
}

fn formula_size(f: &Formula) -> usize {
    match f {
        Formula::EqU(..) | Formula::NeqU(..) | Formula::Top | Formula::Bot => 1,
        Formula::And(a, b) | Formula::Or(a, b) => 1 + formula_size(a) + formula_size(b),
        Formula::ForallIn(_, _, _, a) | Formula::ExistsIn(_, _, _, a) => 1 + formula_size(a),
    }
}

fn cmd_prove(file: &Path) -> Result<Report, Fail> {
    let (ctx, node) = parse_proof(&read_file(file)?)?;
    let proof = check_proof(&ctx, &node)?;
    let mut report = vec![(
        "conclusion",
        serde_json::Value::String(proof.root.conclusion.to_string()),
    )];
    report.extend(proof_stats(&proof));
    report.push(("status", "ok".into()));
    Ok(report)
}

fn cmd_synth(cli: &Cli, file: &Path) -> Result<Report, Fail> {
    let p = load_problem(file)?;
    let result = synthesize_from_functionality(&p)?;
    enforce_no_get(cli, &result.expr)?;
    Ok(vec![
        ("expr", artifact(cli, &print_nrc(&result.expr))),
        ("expr-size", result.expr_size.into()),
        ("proof-nodes", result.proof_nodes.into()),
        ("max-sequent-size", result.max_sequent_size.into()),
        ("status", "ok".into()),
    ])
}

fn cmd_eval(cli: &Cli, file: &Path, input: &Path) -> Result<Report, Fail> {
    let e = parse_nrc(&parse_sexp(&read_file(file)?)?)?;
    enforce_no_get(cli, &e)?;
    let raw: serde_json::Value =
        serde_json::from_str(&read_file(input)?).map_err(|err| Fail::parse(err.to_string()))?;
    let mut env = Valuation::new(cli.universe.clone());
    match &raw {
        serde_json::Value::Object(bindings) => {
            for (name, v) in bindings {
                env = env.bind(name.clone(), value_from_json(v)?);
            }
        }
        other => {
            let fv = e.free_vars();
            if fv.len() != 1 {
                return Err(Fail::parse(format!(
                    "a bare input value needs exactly one free variable, found {:?}",
                    fv
                )));
            }
            let name = fv.into_iter().next().unwrap();
            env = env.bind(name, value_from_json(other)?);
        }
    }
    let out = eval_nrc(&e, &env).map_err(Fail::from)?;
    Ok(vec![("value", value_to_json(&out))])
}

fn cmd_verify_compile(cli: &Cli, file: &Path) -> Result<Report, Fail> {
    let (ctx, f) = parse_delta0(&read_file(file)?)?;
    typecheck_formula(&ctx, &f).map_err(|e| Fail::semantic(e.to_string()))?;
    let verify = compile_verify(&f);
    enforce_no_get(cli, &verify)?;
    typecheck_nrc(&ctx, &verify).map_err(|e| Fail::semantic(e.to_string()))?;
    let (checked, mismatches) = oracle_compare(cli, &ctx, &f, &verify)?;
    let mut report = vec![
        ("expr", artifact(cli, &print_nrc(&verify))),
        ("checked", checked.into()),
        ("mismatches", mismatches.into()),
    ];
    if mismatches > 0 {
        emit_report(cli, &report);
        return Err(Fail::semantic(format!(
            "Verify disagrees with the truth oracle on {mismatches} valuation(s)"
        )));
    }
    report.push(("status", "ok".into()));
    Ok(report)
}

/// Compare `Verify(f)` against the semantic oracle over the context, either
/// exhaustively (within the enumeration cap) or on sampled valuations.
fn oracle_compare(
    cli: &Cli,
    ctx: &TypeContext,
    f: &Formula,
    verify: &NrcExpr,
) -> Result<(usize, usize), Fail> {
    let valuations: Vec<Valuation> = match cli.mode {
        Mode::Exhaustive => enumerate_valuations(ctx, &cli.universe, ENUM_CAP)?,
        Mode::Sampled => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            (0..cli.trials)
                .map(|_| {
                    let mut v = Valuation::new(cli.universe.clone());
                    for (name, ty) in ctx {
                        v = v.bind(name.clone(), sample_value(ty, &cli.universe, &mut rng));
                    }
                    v
                })
                .collect()
        }
    };
    let mut mismatches = 0usize;
    for v in &valuations {
        let truth = eval_delta0(f, v).map_err(Fail::from)?;
        let compiled = eval_nrc_typed(verify, ctx, v).map_err(Fail::from)?;
        if bool_of(&compiled) != Some(truth) {
            mismatches += 1;
        }
    }
    Ok((valuations.len(), mismatches))
}

/// Read a Boolean out of a `Set(Unit)` value.
fn bool_of(v: &crate::values::Value) -> Option<bool> {
    match v {
        crate::values::Value::SetV(xs) => Some(!xs.is_empty()),
        _ => None,
    }
}

fn cmd_to_interp(cli: &Cli, file: &Path, var: &str, ty: &str) -> Result<Report, Fail> {
    let e = parse_nrc(&parse_sexp(&read_file(file)?)?)?;
    let input_ty = parse_type_arg(ty)?;
    let ctx: TypeContext = [(var.to_string(), input_ty.clone())].into_iter().collect();
    typecheck_nrc(&ctx, &e).map_err(|err| Fail::semantic(err.to_string()))?;
    let i = nrc_to_interp(var, &input_ty, &e)?;
    Ok(vec![
        ("interp", artifact(cli, &print_interp(&i))),
        ("sorts", i.sorts.len().into()),
        ("status", "ok".into()),
    ])
}

fn cmd_from_interp(cli: &Cli, file: &Path, var: &str) -> Result<Report, Fail> {
    let raw = parse_interp(&read_file(file)?)?;
    let i = Interp::new(raw.input_type, raw.output_type, raw.sorts, raw.out)
        .map_err(Fail::from)?;
    let e = interp_to_nrc(&i, var)?;
    enforce_no_get(cli, &e)?;
    Ok(vec![
        ("expr", artifact(cli, &print_nrc(&e))),
        ("expr-size", e.size().into()),
        ("status", "ok".into()),
    ])
}

fn cmd_convert_monadic(cli: &Cli, ty: &str) -> Result<Report, Fail> {
    let t = parse_type_arg(ty)?;
    let depth = depth_of(&t);
    let convert = convert_expr(&t);
    let convert_inv = convert_inv_expr(&t);
    let image = if cli.strict_paper {
        im_convert_formula_literal(&t)
    } else {
        im_convert_formula(&t)
    };
    Ok(vec![
        ("depth", depth.into()),
        (
            "monadic-type",
            serde_json::Value::String(monadic_type(depth).to_string()),
        ),
        ("convert", artifact(cli, &print_nrc(&convert))),
        ("convert-inv", artifact(cli, &print_nrc(&convert_inv))),
        ("image", artifact(cli, &print_formula(&image))),
        ("status", "ok".into()),
    ])
}

fn cmd_interp_boolean(
    cli: &Cli,
    file: &Path,
    theta_left: &[usize],
    gamma_left: &[usize],
) -> Result<Report, Fail> {
    let (ctx, node) = parse_proof(&read_file(file)?)?;
    let proof = check_proof(&ctx, &node)?;
    let core = elaborate_admissible(&proof)?;
    let part = Partition::from_left_indices(&core.root.conclusion, theta_left, gamma_left);
    let interp = interpolate(&core, &part)?;
    let mut report = vec![(
        "interpolant",
        artifact(cli, &print_formula(&interp.formula)),
    )];
    match contract_violations(
        &core.ctx,
        &core.root.conclusion,
        &part,
        &interp.formula,
        &cli.universe,
        ENUM_CAP,
    ) {
        Ok(violations) => {
            report.push(("contract-checked", true.into()));
            report.push(("violations", violations.len().into()));
            if !violations.is_empty() {
                emit_report(cli, &report);
                return Err(Fail::semantic(format!(
                    "interpolation contract violated on {} valuation(s): {}",
                    violations.len(),
                    violations[0]
                )));
            }
        }
        Err(ValueError::BudgetExceeded { .. }) if cli.mode == Mode::Sampled => {
            report.push(("contract-checked", false.into()));
        }
        Err(e) => return Err(e.into()),
    }
    report.push(("status", "ok".into()));
    Ok(report)
}

fn cmd_fuzz_functional(cli: &Cli) -> Result<Report, Fail> {
    let ctx: TypeContext = match cli.mode {
        // Exhaustive mode enumerates every valuation per formula; keep the
        // context small enough for the product space to stay tractable.
        Mode::Exhaustive => [
            ("x".to_string(), ObjType::U),
            ("s".to_string(), ObjType::set(ObjType::U)),
        ]
        .into_iter()
        .collect(),
        Mode::Sampled => [
            ("x".to_string(), ObjType::U),
            ("s".to_string(), ObjType::set(ObjType::U)),
            (
                "r".to_string(),
                ObjType::set(ObjType::prod(ObjType::U, ObjType::U)),
            ),
        ]
        .into_iter()
        .collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut checked = 0usize;
    let mut mismatches = 0usize;
    for _ in 0..cli.trials {
        let f = sample_formula(&ctx, 3, &mut rng);
        let verify = compile_verify(&f);
        let valuations: Vec<Valuation> = match cli.mode {
            Mode::Exhaustive => enumerate_valuations(&ctx, &cli.universe, ENUM_CAP)?,
            Mode::Sampled => {
                let mut v = Valuation::new(cli.universe.clone());
                for (name, ty) in &ctx {
                    v = v.bind(name.clone(), sample_value(ty, &cli.universe, &mut rng));
                }
                vec![v]
            }
        };
        for v in &valuations {
            let truth = eval_delta0(&f, v).map_err(Fail::from)?;
            let compiled = eval_nrc_typed(&verify, &ctx, v).map_err(Fail::from)?;
            if bool_of(&compiled) != Some(truth) {
                mismatches += 1;
            }
            checked += 1;
        }
    }
    let report = vec![
        ("trials", cli.trials.into()),
        ("checked", checked.into()),
        ("mismatches", mismatches.into()),
    ];
    if mismatches > 0 {
        emit_report(cli, &report);
        return Err(Fail::semantic(format!(
            "Verify disagrees with the truth oracle on {mismatches} case(s)"
        )));
    }
    let mut report = report;
    report.push(("status", "ok".into()));
    Ok(report)
}
