//! `fauto`: spanning sets, F-set automata, sparse languages and zero sets of
//! recurrences from the command line.
//!
//! Exit codes: 0 ok, 2 bad input or failed precondition, 3 inconclusive,
//! 4 verification mismatch, 5 cap exceeded.

use std::fmt::Write as _;
use std::io::{Read, Write as _};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use fauto::automata::{contains, enumerate_elements};
use fauto::fset::{normalize, to_pnormal, Compiler, CycleStrategy, FSetExpr, FSetOracle};
use fauto::json::{elem_from_json, elem_to_json, endo_from_json, spanning_from_json, spanning_to_json};
use fauto::sml::{
    analyze_zero_set, brute_force_mismatch, cross_validate, cross_validate_backward, digits_lsd, zero_set_bidirectional,
    zero_set_kernel, LinearRecurrence, SequenceInput, SML_STATE_CAP,
};
use fauto::spanning::{default_spanning, expand_greedy, find_spanning, sigma_power, verify_spanning};
use fauto::sparse::{certify, decompose_sparse, growth_count};
use fauto::{Dfa, Endomorphism, Error, GroupElement, SpanningSet};

#[derive(Parser)]
#[command(name = "fauto", version, about = "F-automatic sets, sparse languages and zero sets of recurrences")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Spanning sets: search, axiom checks, expansions, powers.
    #[command(subcommand)]
    Span(SpanCmd),
    /// F-set expressions: compile, membership, enumeration, normal forms.
    #[command(subcommand)]
    Fset(FsetCmd),
    /// Sparseness of regular languages.
    #[command(subcommand)]
    Sparse(SparseCmd),
    /// Zero sets of linear recurrences over F_q(t).
    #[command(subcommand)]
    Sml(SmlCmd),
    /// Plain DFA utilities.
    #[command(subcommand)]
    Auto(AutoCmd),
}

/// The endomorphism and digit set to work over.
#[derive(Args, Clone)]
struct Base {
    /// Scalar (`4`) or integer matrix (`[[2,1],[0,2]]`) as JSON.
    #[arg(long, default_value = "4")]
    endo: String,
    /// Dimension for scalar endomorphisms (defaults to the input's).
    #[arg(long)]
    dim: Option<usize>,
    /// Spanning set JSON file (`{"r", "digits"}`); `-` reads stdin. Without
    /// it, `{-(k-1)..k-1}^d` is used for scalars `|k| >= 4` and a search runs
    /// otherwise.
    #[arg(long)]
    spanning: Option<String>,
}

#[derive(Subcommand)]
enum SpanCmd {
    /// Search for a spanning set.
    Find(Base),
    /// Check the five axioms.
    Verify {
        #[command(flatten)]
        base: Base,
        /// Digits as a JSON list, instead of --spanning.
        #[arg(long)]
        digits: Option<String>,
        /// The digits are checked against F^r.
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long)]
        json: bool,
    },
    /// Greedy expansion of a point, as a list of digits.
    Expand {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        x: String,
    },
    /// The spanning set for F^{rm}.
    Power {
        #[command(flatten)]
        base: Base,
        #[arg(long)]
        m: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Auto,
    Literal,
    Kernel,
}

#[derive(Args)]
struct ExprArgs {
    /// F-set expression such as `2+C(3;1)+H[5]`; `-` reads stdin.
    #[arg(long)]
    expr: String,
    #[command(flatten)]
    base: Base,
    #[arg(long, value_enum, default_value_t = Strategy::Auto)]
    strategy: Strategy,
    #[arg(long)]
    state_cap: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum FsetCmd {
    /// Compile to a saturated DFA.
    Compile {
        #[command(flatten)]
        args: ExprArgs,
        /// Compare with brute-force enumeration on the box of this radius.
        #[arg(long)]
        verify_bruteforce: Option<i64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Membership of one point.
    Member {
        #[command(flatten)]
        args: ExprArgs,
        #[arg(long)]
        x: String,
        #[arg(long)]
        verify_bruteforce: Option<i64>,
    },
    /// Elements with an accepted expansion of length at most --maxlen.
    Enumerate {
        #[command(flatten)]
        args: ExprArgs,
        #[arg(long)]
        maxlen: usize,
    },
    /// F-normal form with sparseness certificates.
    Normalize {
        #[command(flatten)]
        args: ExprArgs,
        #[arg(long)]
        verify_bruteforce: Option<i64>,
        /// Word length used when enumerating components for verification.
        #[arg(long, default_value_t = 12)]
        maxlen: usize,
    },
    /// p-normal form of a subset of Z (scalar F = p).
    Pnormal {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        verify_bruteforce: Option<i64>,
    },
}

#[derive(Subcommand)]
enum SparseCmd {
    /// Sparse verdict with degree, or a u{a,b}*v witness.
    Check {
        #[arg(long)]
        dfa: String,
        #[arg(long)]
        json: bool,
    },
    /// Decomposition into v_1 w_1* ... v_k w_k* v_{k+1} pieces.
    Decompose {
        #[arg(long)]
        dfa: String,
    },
    /// CSV of accepted words of length at most n.
    Growth {
        #[arg(long)]
        dfa: String,
        #[arg(long, default_value_t = 20)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum SmlCmd {
    /// DFA (least significant digit first) of {n >= 0 : a_n = 0}.
    Zeros {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        verify_bruteforce: Option<u64>,
        #[arg(long, default_value_t = SML_STATE_CAP)]
        state_cap: usize,
        /// Also the zero set of n < 0, by running the recurrence backwards.
        #[arg(long)]
        negative: bool,
    },
    /// Zeros up to --n by direct evaluation, cross-checking closed form and recurrence.
    Check {
        #[arg(long)]
        seq: String,
        #[arg(long, default_value_t = 1024)]
        n: u64,
    },
    /// Sparse verdict and arithmetic progressions of a zero set.
    Analyze {
        #[arg(long, conflicts_with = "dfa")]
        seq: Option<String>,
        #[arg(long)]
        dfa: Option<String>,
    },
}

#[derive(Subcommand)]
enum AutoCmd {
    /// Minimal DFA with canonical state numbering.
    Minimize {
        #[arg(long)]
        dfa: String,
    },
    /// Exit 0 iff the languages agree; otherwise print a shortest counterexample.
    Equiv {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Render as DOT (default) or canonical JSON.
    Export {
        #[arg(long)]
        dfa: String,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
}

enum Failure {
    Core(Error),
    Input(String),
    Mismatch(String),
    Inconclusive(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(Error::CapExceeded { .. }) => 5,
            Failure::Core(Error::Inconclusive(_)) | Failure::Inconclusive(_) => 3,
            Failure::Mismatch(_) => 4,
            Failure::Core(_) | Failure::Input(_) => 2,
        }
    }
}

type Out = Result<String, Failure>;

fn read_source(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::Input(format!("{arg}: {e}")))
    }
}

fn parse_json(text: &str, what: &str) -> Result<Value, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Input(format!("{what}: {e}")))
}

fn read_json(arg: &str) -> Result<Value, Failure> {
    parse_json(&read_source(arg)?, arg)
}

fn read_dfa(arg: &str) -> Result<Dfa, Failure> {
    Ok(Dfa::from_json(&read_json(arg)?)?)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn point_str(x: &GroupElement) -> String {
    let parts: Vec<String> = x.coords().iter().map(|c| c.to_string()).collect();
    if parts.len() == 1 {
        parts[0].clone()
    } else {
        format!("({})", parts.join(","))
    }
}

/// Digits of one-dimensional sets print as bare integers.
fn elem_json_flat(x: &GroupElement) -> Value {
    if x.dim() == 1 {
        fauto::json::int_to_json(&x.coords()[0])
    } else {
        elem_to_json(x)
    }
}

impl Base {
    fn endo(&self, dim: Option<usize>) -> Result<Endomorphism, Failure> {
        let v = parse_json(&self.endo, "--endo")?;
        let dim = self.dim.or(dim).unwrap_or(1);
        Ok(endo_from_json(&v, dim)?)
    }

    fn sigma(&self, dim: Option<usize>) -> Result<SpanningSet, Failure> {
        let f = self.endo(dim)?;
        if let Some(d) = dim {
            if f.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: f.dim() }.into());
            }
        }
        if let Some(path) = &self.spanning {
            return Ok(spanning_from_json(&read_json(path)?, &f)?);
        }
        if let Endomorphism::Scalar { k, dim } = &f {
            if let Ok(k) = i64::try_from(k) {
                if k.abs() >= 4 {
                    return Ok(default_spanning(k, *dim)?);
                }
            }
        }
        Ok(find_spanning(&f)?)
    }
}

fn spanning_doc(s: &SpanningSet) -> Value {
    let mut v = spanning_to_json(s);
    v["endo"] = fauto::json::endo_to_json(s.endo());
    v
}

fn run_span(cmd: SpanCmd) -> Out {
    match cmd {
        SpanCmd::Find(base) => Ok(pretty(&spanning_doc(&base.sigma(None)?))),
        SpanCmd::Verify { base, digits, r, json } => {
            let sigma = match digits {
                Some(text) => {
                    let ds = parse_json(&text, "--digits")?;
                    let ds = ds
                        .as_array()
                        .ok_or_else(|| Failure::Input("--digits must be a JSON list".into()))?
                        .iter()
                        .map(elem_from_json)
                        .collect::<Result<Vec<_>, _>>()?;
                    let dim = ds.first().map(GroupElement::dim);
                    SpanningSet::candidate(ds, base.endo(dim)?, r)?
                }
                None => base.sigma(None)?,
            };
            let report = verify_spanning(&sigma);
            let text = if json {
                let names = ["i", "ii", "iii", "iv", "v"];
                let entries: serde_json::Map<String, Value> = names
                    .iter()
                    .zip(report.statuses())
                    .map(|(n, s)| (n.to_string(), json!(s.to_string())))
                    .collect();
                pretty(&json!({"axioms": entries, "ok": report.all_pass()}))
            } else {
                report.to_string().trim_end().to_string()
            };
            if report.has_failure() {
                Err(Failure::Mismatch(text))
            } else if !report.all_pass() {
                Err(Failure::Inconclusive(text))
            } else {
                Ok(text)
            }
        }
        SpanCmd::Expand { base, x } => {
            let x = elem_from_json(&parse_json(&x, "--x")?)?;
            let sigma = base.sigma(Some(x.dim()))?;
            let word = expand_greedy(&sigma, &x)?;
            let digits: Vec<Value> = word.iter().map(|&i| elem_json_flat(sigma.digit(i))).collect();
            Ok(Value::Array(digits).to_string())
        }
        SpanCmd::Power { base, m } => {
            let sigma = base.sigma(None)?;
            Ok(pretty(&spanning_doc(&sigma_power(&sigma, m)?)))
        }
    }
}

struct Prepared {
    expr: FSetExpr,
    sigma: SpanningSet,
    compiler: Compiler,
}

fn prepare(args: &ExprArgs) -> Result<Prepared, Failure> {
    let text = if args.expr == "-" { read_source("-")? } else { args.expr.clone() };
    let expr = FSetExpr::parse(text.trim())?;
    let sigma = args.base.sigma(Some(expr.dim))?;
    let mut compiler = Compiler::new(&sigma)?;
    compiler.strategy = match args.strategy {
        Strategy::Auto => CycleStrategy::Auto,
        Strategy::Literal => CycleStrategy::Literal,
        Strategy::Kernel => CycleStrategy::Kernel,
    };
    if let Some(cap) = args.state_cap {
        compiler.state_cap = cap;
    }
    Ok(Prepared { expr, sigma, compiler })
}

/// Every point of the box `[-b, b]^d`, smallest sup-norm first.
fn box_points(dim: usize, b: i64) -> Vec<GroupElement> {
    let mut pts: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..dim {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (-b..=b).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    pts.sort_by_key(|p| (p.iter().map(|c| c.abs()).max().unwrap_or(0), p.clone()));
    pts.iter().map(|p| GroupElement::from_i64s(p)).collect()
}

fn check_box(
    bound: i64,
    dim: usize,
    mut expected: impl FnMut(&GroupElement) -> Result<bool, Failure>,
    mut got: impl FnMut(&GroupElement) -> Result<bool, Failure>,
) -> Result<(), Failure> {
    for x in box_points(dim, bound) {
        let (e, g) = (expected(&x)?, got(&x)?);
        if e != g {
            return Err(Failure::Mismatch(format!(
                "mismatch at {}: brute force says {e}, automaton says {g}",
                point_str(&x)
            )));
        }
    }
    Ok(())
}

fn run_fset(cmd: FsetCmd) -> Out {
    match cmd {
        FsetCmd::Compile { args, verify_bruteforce, format } => {
            let p = prepare(&args)?;
            let d = p.compiler.compile(&p.expr)?;
            if let Some(b) = verify_bruteforce {
                let oracle = FSetOracle::new(&p.expr, p.sigma.endo(), b)?;
                check_box(b, p.expr.dim, |x| Ok(oracle.contains(x)), |x| Ok(contains(&d, &p.sigma, x)?))?;
            }
            Ok(match format {
                Format::Json => pretty(&d.to_json()),
                Format::Dot => d.to_dot(),
            })
        }
        FsetCmd::Member { args, x, verify_bruteforce } => {
            let p = prepare(&args)?;
            let x = elem_from_json(&parse_json(&x, "--x")?)?;
            if x.dim() != p.expr.dim {
                return Err(Error::DimensionMismatch { expected: p.expr.dim, got: x.dim() }.into());
            }
            let d = p.compiler.compile(&p.expr)?;
            let member = contains(&d, &p.sigma, &x)?;
            if let Some(b) = verify_bruteforce {
                let norm = x
                    .to_i64s()
                    .and_then(|c| c.iter().map(|v| v.checked_abs()).max().flatten())
                    .ok_or_else(|| Failure::Input("point too large for brute force".into()))?;
                let oracle = FSetOracle::new(&p.expr, p.sigma.endo(), b.max(norm))?;
                if oracle.contains(&x) != member {
                    return Err(Failure::Mismatch(format!(
                        "mismatch at {}: brute force says {}, automaton says {member}",
                        point_str(&x),
                        !member
                    )));
                }
            }
            Ok(member.to_string())
        }
        FsetCmd::Enumerate { args, maxlen } => {
            let p = prepare(&args)?;
            let d = p.compiler.compile(&p.expr)?;
            let elems = enumerate_elements(&d, &p.sigma, maxlen)?;
            Ok(elems.iter().map(point_str).collect::<Vec<_>>().join(","))
        }
        FsetCmd::Normalize { args, verify_bruteforce, maxlen } => {
            let p = prepare(&args)?;
            let nf = normalize(&p.expr, &p.sigma)?;
            if let Some(b) = verify_bruteforce {
                let members = nf.members_in_box(b, maxlen)?;
                let d = p.compiler.compile(&p.expr)?;
                check_box(b, p.expr.dim, |x| Ok(contains(&d, &p.sigma, x)?), |x| Ok(members.contains(x)))?;
            }
            Ok(pretty(&nf.to_json()))
        }
        FsetCmd::Pnormal { expr, p, verify_bruteforce } => {
            let text = if expr == "-" { read_source("-")? } else { expr };
            let e = FSetExpr::parse(text.trim())?;
            let pn = to_pnormal(&e, p)?;
            if let Some(b) = verify_bruteforce {
                let f = Endomorphism::scalar(p as i64, 1)?;
                let oracle = FSetOracle::new(&e, &f, b)?;
                let got = pn.contains_in(&BigInt::from(-b), &BigInt::from(b))?;
                check_box(b, 1, |x| Ok(oracle.contains(x)), |x| Ok(got.contains(&x.coords()[0])))?;
            }
            Ok(pretty(&pn.to_json()))
        }
    }
}

fn word_str(w: &[usize]) -> String {
    format!("{w:?}")
}

fn run_sparse(cmd: SparseCmd) -> Out {
    match cmd {
        SparseCmd::Check { dfa, json } => {
            let d = read_dfa(&dfa)?;
            let cert = certify(&d)?;
            if json {
                return Ok(pretty(&cert.to_json()));
            }
            Ok(match (&cert.degree, &cert.witness) {
                (Some(k), _) if cert.sparse => format!("sparse, degree ≤ {k}"),
                (None, _) if cert.sparse => "sparse".to_string(),
                (_, Some(w)) => format!(
                    "not sparse; witness u={} a={} b={} v={}",
                    word_str(&w.u),
                    word_str(&w.a),
                    word_str(&w.b),
                    word_str(&w.v)
                ),
                _ => "not sparse".to_string(),
            })
        }
        SparseCmd::Decompose { dfa } => {
            let d = read_dfa(&dfa)?;
            Ok(pretty(&decompose_sparse(&d)?.to_json()))
        }
        SparseCmd::Growth { dfa, n } => {
            let d = read_dfa(&dfa)?;
            let mut out = String::from("n,words_up_to_n\n");
            for (i, c) in growth_count(&d, n).iter().enumerate() {
                writeln!(out, "{i},{c}").expect("string write");
            }
            Ok(out.trim_end().to_string())
        }
    }
}

fn run_sml(cmd: SmlCmd) -> Out {
    match cmd {
        SmlCmd::Zeros { seq, verify_bruteforce, state_cap, negative } => {
            let input = SequenceInput::from_json(&read_json(&seq)?)?;
            let cf = input.closed_form()?;
            let d = zero_set_kernel(&cf, state_cap)?.dfa.minimize();
            if let Some(n) = verify_bruteforce {
                if let Some(bad) = brute_force_mismatch(&d, &cf, n)? {
                    return Err(Failure::Mismatch(format!("mismatch at n = {bad}")));
                }
            }
            if !negative {
                return Ok(pretty(&d.to_json()));
            }
            let rec = match &input.recurrence {
                Some(r) => r.clone(),
                None => LinearRecurrence::from_closed_form(&cf),
            };
            let (pos, neg) = zero_set_bidirectional(&rec, Some(&cf))?;
            if let Some(n) = verify_bruteforce {
                let back = rec.values_backward(n)?;
                for (i, v) in back.iter().enumerate() {
                    let m = i as u64 + 1;
                    if neg.accepts(&digits_lsd(m, cf.field().p()))? != v.is_zero() {
                        return Err(Failure::Mismatch(format!("mismatch at n = -{m}")));
                    }
                }
            }
            Ok(pretty(&json!({"nonnegative": pos.to_json(), "negative": neg.to_json()})))
        }
        SmlCmd::Check { seq, n } => {
            let input = SequenceInput::from_json(&read_json(&seq)?)?;
            let cf = input.closed_form()?;
            let mut report = json!({});
            if let Some(rec) = &input.recurrence {
                if let Some(bad) = cross_validate(&cf, rec, n)? {
                    return Err(Failure::Mismatch(format!("closed form and recurrence differ at n = {bad}")));
                }
                if rec.coefficients()[0].is_zero() {
                    report["backward"] = json!(false);
                } else {
                    if let Some(bad) = cross_validate_backward(&cf, rec, n)? {
                        return Err(Failure::Mismatch(format!(
                            "closed form and recurrence differ at n = -{bad}"
                        )));
                    }
                    report["backward"] = json!(true);
                }
                report["crossValidated"] = json!(true);
            }
            let zeros: Vec<u64> = cf
                .values(n)?
                .iter()
                .enumerate()
                .filter(|(_, v)| v.is_zero())
                .map(|(i, _)| i as u64)
                .collect();
            let d = zero_set_kernel(&cf, SML_STATE_CAP)?.dfa.minimize();
            if let Some(bad) = brute_force_mismatch(&d, &cf, n)? {
                return Err(Failure::Mismatch(format!("automaton and evaluation differ at n = {bad}")));
            }
            report["n"] = json!(n);
            report["zeros"] = json!(zeros);
            report["automatonAgrees"] = json!(true);
            Ok(pretty(&report))
        }
        SmlCmd::Analyze { seq, dfa } => {
            let d = match (seq, dfa) {
                (Some(s), _) => {
                    let cf = SequenceInput::from_json(&read_json(&s)?)?.closed_form()?;
                    zero_set_kernel(&cf, SML_STATE_CAP)?.dfa.minimize()
                }
                (None, Some(d)) => read_dfa(&d)?,
                (None, None) => return Err(Failure::Input("need --seq or --dfa".into())),
            };
            Ok(pretty(&analyze_zero_set(&d)?.to_json()))
        }
    }
}

fn run_auto(cmd: AutoCmd) -> Out {
    match cmd {
        AutoCmd::Minimize { dfa } => Ok(pretty(&read_dfa(&dfa)?.minimize().to_json())),
        AutoCmd::Equiv { a, b } => {
            let (a, b) = (read_dfa(&a)?, read_dfa(&b)?);
            match a.counterexample(&b)? {
                None => Ok("equivalent".into()),
                Some(w) => Err(Failure::Mismatch(format!("not equivalent; counterexample {}", word_str(&w)))),
            }
        }
        AutoCmd::Export { dfa, format } => {
            let d = read_dfa(&dfa)?;
            Ok(match format {
                Format::Dot => d.to_dot(),
                Format::Json => pretty(&d.to_json()),
            })
        }
    }
}

/// Print, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.cmd {
        Cmd::Span(c) => run_span(c),
        Cmd::Fset(c) => run_fset(c),
        Cmd::Sparse(c) => run_sparse(c),
        Cmd::Sml(c) => run_sml(c),
        Cmd::Auto(c) => run_auto(c),
    };
    match out {
        Ok(text) => {
            emit(&text);
            ExitCode::SUCCESS
        }
        Err(f) => {
            let code = f.code();
            match f {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Input(m) => eprintln!("error: {m}"),
                Failure::Mismatch(m) | Failure::Inconclusive(m) => emit(&m),
            }
            ExitCode::from(code)
        }
    }
}
