//! Command-line front end.
//!
//! Instances are JSON files:
//!
//! ```json
//! { "q": 3, "n": 2, "S": [[0, 1], [1, 1]], "T": [[2, 0]] }
//! ```
//!
//! `T` may be omitted for commands that only read `S`. `verify` also reads `S_prime` and
//! `T_prime`. `check-sumfree` reads `S` and `T` as ordered lists paired by position.
//!
//! Every command prints a report: a human-readable summary, one line per checked
//! inequality with both sides evaluated, and a JSON block (`--json` prints only the JSON).
//! Exit codes: 0 ok, 1 a check failed, 2 invalid input, 3 refused by a resource cap.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::decompose::{
    choose_degree_from_table, decompose, degree_bound, verify_decomposition, Decomposition,
};
use crate::error::Error as CoreError;
use crate::field::{
    make_field, sumset, FieldVector, Limits, PointSet, Space, DEFAULT_ENUMERATION_CAP,
    DEFAULT_ORACLE_CAP,
};
use crate::monomial::{capset_bound_from_table, growth_estimate, CountTable};
use crate::verify::{
    check_capset_bound, check_sumfree_bound, greedy_decomposition, oracle_min_decomposition,
    OrderedPairFamily,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_CAP_REFUSED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "sumsets",
    version,
    about = "Exact sumset decompositions over F_q^n"
)]
pub struct Cli {
    /// Print only the JSON report
    #[arg(long, global = true)]
    pub json: bool,

    /// Refuse to enumerate F_q^n when q^n exceeds this
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,

    /// Refuse the exhaustive oracle when |S| + |T| exceeds this
    #[arg(long, global = true, default_value_t = DEFAULT_ORACLE_CAP)]
    pub oracle_cap: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monomial counts, the cap-set bound M(F_q^n) and the best degree
    Bound {
        /// Field size, a prime
        #[arg(long)]
        q: u64,
        /// Dimension
        #[arg(long)]
        n: usize,
        /// Also print M(F_q^k)^(1/k) for k = 1..=N
        #[arg(long, value_name = "N")]
        growth: Option<usize>,
    },
    /// Build witnesses S', T' for an instance
    Decompose(InstanceArgs),
    /// Check supplied witnesses S_prime, T_prime against S, T
    Verify(InputArg),
    /// Find S' ⊆ S with S' + S = S + S
    Symmetric(InputArg),
    /// Check the cap-set bound for an AP-free S
    CheckCapset(InputArg),
    /// Check the bound for a multicolored sum-free family (S, T paired by position)
    CheckSumfree(InputArg),
    /// Exhaustive minimum, greedy, and constructed witnesses side by side
    Oracle(InstanceArgs),
    /// Seeded random instances, each decomposed and checked
    Trials(TrialArgs),
}

#[derive(Debug, Args)]
pub struct InputArg {
    /// JSON instance file
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// JSON instance file
    #[arg(long)]
    pub input: PathBuf,
    /// Degree override (default: the minimizing degree)
    #[arg(long)]
    pub d: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrialArgs {
    /// Field size, a prime
    #[arg(long)]
    pub q: u64,
    /// Dimension
    #[arg(long)]
    pub n: usize,
    /// Number of random pairs
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// ChaCha8 seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Inclusion probability of each point in S and in T
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Degree override for every trial
    #[arg(long)]
    pub d: Option<usize>,
    /// Also run the exhaustive oracle where |S| + |T| is within the oracle cap
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_cap_refusal() => EXIT_CAP_REFUSED,
            CliError::Core(e) if e.is_verification_failure() => EXIT_VERIFICATION_FAILED,
            _ => EXIT_INVALID_INPUT,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Validation(_) => "validation",
            CliError::Io { .. } => "io",
            CliError::Core(
                CoreError::InvariantViolated { .. } | CoreError::BoundViolated { .. },
            ) => "verification",
            CliError::Core(e) if e.is_cap_refusal() => "cap",
            CliError::Core(_) => "invalid_input",
        }
    }
}

/// On-disk instance format.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub q: u64,
    pub n: usize,
    #[serde(rename = "S")]
    pub s: Vec<Vec<u64>>,
    #[serde(rename = "T", default)]
    pub t: Vec<Vec<u64>>,
    #[serde(rename = "S_prime", default, skip_serializing_if = "Option::is_none")]
    pub s_prime: Option<Vec<Vec<u64>>>,
    #[serde(rename = "T_prime", default, skip_serializing_if = "Option::is_none")]
    pub t_prime: Option<Vec<Vec<u64>>>,
}

/// A validated instance. The lists keep file order; the sets are canonical.
#[derive(Debug, Clone)]
pub struct Instance {
    pub space: Space,
    pub s_list: Vec<FieldVector>,
    pub t_list: Vec<FieldVector>,
    pub s: PointSet,
    pub t: PointSet,
    pub s_prime: Option<PointSet>,
    pub t_prime: Option<PointSet>,
}

pub fn parse_instance(path: &Path) -> Result<Instance, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_instance_str(&text, &path.display().to_string())
}

pub fn parse_instance_str(text: &str, origin: &str) -> Result<Instance, CliError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    validate_instance(&file)
}

pub fn validate_instance(file: &InstanceFile) -> Result<Instance, CliError> {
    let field = make_field(file.q).map_err(|e| CliError::Validation(format!("q: {e}")))?;
    let space = Space::new(field, file.n);
    let list = |name: &str, tuples: &[Vec<u64>]| -> Result<Vec<FieldVector>, CliError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(tuples.len());
        for (i, tuple) in tuples.iter().enumerate() {
            if tuple.len() != file.n {
                return Err(CliError::Validation(format!(
                    "{name}[{i}]: expected {} coordinates, found {}",
                    file.n,
                    tuple.len()
                )));
            }
            if let Some(c) = tuple.iter().find(|&&c| c >= file.q) {
                return Err(CliError::Validation(format!(
                    "{name}[{i}]: coordinate {c} out of range [0, {})",
                    file.q
                )));
            }
            let v = space.vector(tuple.iter().map(|&c| c as u32).collect())?;
            if !seen.insert(v.clone()) {
                return Err(CliError::Validation(format!(
                    "{name}[{i}]: duplicate point {v}"
                )));
            }
            out.push(v);
        }
        Ok(out)
    };
    let s_list = list("S", &file.s)?;
    let t_list = list("T", &file.t)?;
    let optional =
        |name: &str, tuples: &Option<Vec<Vec<u64>>>| -> Result<Option<PointSet>, CliError> {
            tuples
                .as_ref()
                .map(|ts| Ok(PointSet::from_points(space, list(name, ts)?)?))
                .transpose()
        };
    Ok(Instance {
        space,
        s: PointSet::from_points(space, s_list.iter().cloned())?,
        t: PointSet::from_points(space, t_list.iter().cloned())?,
        s_prime: optional("S_prime", &file.s_prime)?,
        t_prime: optional("T_prime", &file.t_prime)?,
        s_list,
        t_list,
    })
}

/// One inequality (or equality) with both sides evaluated.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub lhs: String,
    pub relation: String,
    pub rhs: String,
    pub passed: bool,
}

impl Check {
    fn compare<T: PartialOrd + ToString>(name: &str, lhs: T, relation: &str, rhs: T) -> Self {
        let passed = match relation {
            "<=" => lhs <= rhs,
            ">=" => lhs >= rhs,
            "==" => lhs == rhs,
            "<" => lhs < rhs,
            _ => unreachable!("unknown relation {relation}"),
        };
        Check {
            name: name.to_string(),
            lhs: lhs.to_string(),
            relation: relation.to_string(),
            rhs: rhs.to_string(),
            passed,
        }
    }

    fn le<T: PartialOrd + ToString>(name: &str, lhs: T, rhs: T) -> Self {
        Check::compare(name, lhs, "<=", rhs)
    }

    fn ge<T: PartialOrd + ToString>(name: &str, lhs: T, rhs: T) -> Self {
        Check::compare(name, lhs, ">=", rhs)
    }

    fn holds(name: &str, what: &str, passed: bool) -> Self {
        Check {
            name: name.to_string(),
            lhs: what.to_string(),
            relation: "holds".to_string(),
            rhs: passed.to_string(),
            passed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_digest: String,
    pub outputs: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<Value>,
    pub timing_ms: f64,
}

/// Result of one invocation: exit code plus what would go to stdout and stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Body {
    inputs: Value,
    outputs: Value,
    summary: Vec<String>,
    checks: Vec<Check>,
}

/// Parses `argv` (program name first) and runs the command.
pub fn run_command<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID_INPUT
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    exit_code: code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    exit_code: code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let echo = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    run(&cli, &echo)
}

pub fn run(cli: &Cli, echo: &str) -> Outcome {
    let limits = Limits {
        enumeration_cap: cli.cap,
        oracle_cap: cli.oracle_cap,
    };
    let start = Instant::now();
    let result = match &cli.command {
        Command::Bound { q, n, growth } => cmd_bound(*q, *n, *growth),
        Command::Decompose(a) => cmd_decompose(a, &limits),
        Command::Verify(a) => cmd_verify(a),
        Command::Symmetric(a) => cmd_symmetric(a, &limits),
        Command::CheckCapset(a) => cmd_check_capset(a, &limits),
        Command::CheckSumfree(a) => cmd_check_sumfree(a, &limits),
        Command::Oracle(a) => cmd_oracle(a, &limits),
        Command::Trials(a) => cmd_trials(a, &limits),
    };
    let timing_ms = start.elapsed().as_secs_f64() * 1e3;

    let (report, summary, exit_code) = match result {
        Ok(body) => {
            let passed = body.checks.iter().all(|c| c.passed);
            let report = RunReport {
                command: echo.to_string(),
                inputs_digest: digest(&body.inputs),
                outputs: body.outputs,
                checks: body.checks,
                passed,
                error: None,
                timing_ms,
            };
            let code = if passed {
                EXIT_OK
            } else {
                EXIT_VERIFICATION_FAILED
            };
            (report, body.summary, code)
        }
        Err(err) => {
            let mut error = json!({ "kind": err.kind(), "message": err.to_string() });
            let mut checks = Vec::new();
            if let CliError::Core(CoreError::InvariantViolated { name, detail }) = &err {
                error["failed_invariant"] = json!(name);
                checks.push(Check::holds(name, detail, false));
            }
            if let CliError::Core(CoreError::BoundViolated { cover, bound }) = &err {
                error["failed_invariant"] = json!("line_cover_bound");
                checks.push(Check::le("line_cover_bound", *cover, *bound));
            }
            let report = RunReport {
                command: echo.to_string(),
                inputs_digest: String::new(),
                outputs: Value::Null,
                checks,
                passed: false,
                error: Some(error),
                timing_ms,
            };
            (report, vec![format!("error: {err}")], err.exit_code())
        }
    };

    let json_text = serde_json::to_string_pretty(&report).expect("report serializes");
    let stdout = if cli.json {
        json_text + "\n"
    } else {
        render_human(&report, &summary, &json_text)
    };
    let stderr = match &report.error {
        Some(e) => format!("sumsets: {}\n", e["message"].as_str().unwrap_or("error")),
        None => String::new(),
    };
    Outcome {
        exit_code,
        stdout,
        stderr,
    }
}

fn render_human(report: &RunReport, summary: &[String], json_text: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "sumsets {}", report.command);
    if !report.inputs_digest.is_empty() {
        let _ = writeln!(out, "inputs: {}", report.inputs_digest);
    }
    for line in summary {
        let _ = writeln!(out, "{line}");
    }
    if !report.checks.is_empty() {
        let width = report
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(0);
        let _ = writeln!(out, "checks:");
        for c in &report.checks {
            let _ = writeln!(
                out,
                "  {}  {:width$}  {} {} {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.lhs,
                c.relation,
                c.rhs,
            );
        }
    }
    let _ = writeln!(
        out,
        "result: {}",
        if report.passed { "ok" } else { "failed" }
    );
    let _ = writeln!(out, "time: {:.3} ms", report.timing_ms);
    let _ = writeln!(out, "--- json ---");
    out.push_str(json_text);
    out.push('\n');
    out
}

fn digest(inputs: &Value) -> String {
    let bytes = serde_json::to_vec(inputs).expect("inputs serialize");
    let hash = Sha256::digest(&bytes);
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

fn instance_inputs(inst: &Instance) -> Value {
    json!({
        "q": inst.space.q(),
        "n": inst.space.n(),
        "S": inst.s_list,
        "T": inst.t_list,
        "S_prime": inst.s_prime,
        "T_prime": inst.t_prime,
    })
}

fn fmt_set(s: &PointSet) -> String {
    let parts: Vec<String> = s.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

fn cmd_bound(q: u64, n: usize, growth: Option<usize>) -> Result<Body, CliError> {
    let field = make_field(q).map_err(|e| CliError::Validation(format!("q: {e}")))?;
    if n == 0 {
        return Err(CliError::Validation("n must be at least 1".into()));
    }
    let table = CountTable::new(field.q(), n);
    let capset = capset_bound_from_table(&table);
    let (best_d, best) = choose_degree_from_table(&table);

    let mut rows = Vec::with_capacity(table.max_degree() + 1);
    let mut summary = vec![
        format!("F_{q}^{n}: q^n = {}", table.total()),
        format!(
            "{:>5}  {:>20}  {:>20}  {:>20}",
            "d", "count", "m_d", "2m_(d/2)+q^n-m_d"
        ),
    ];
    for d in 0..=table.max_degree() {
        let at = degree_bound(&table, d);
        summary.push(format!(
            "{:>5}  {:>20}  {:>20}  {:>20}",
            d,
            table.counts()[d],
            table.m(d),
            at
        ));
        rows.push(json!({
            "d": d,
            "count": table.counts()[d].to_string(),
            "m_d": table.m(d).to_string(),
            "bound_at_d": at.to_string(),
        }));
    }
    summary.push(format!(
        "M(F_{q}^{n}) = 3 m_{} = {capset}",
        (q as usize - 1) * n / 3
    ));
    summary.push(format!("chosen d = {best_d}, bound = {best}"));

    let symmetric = (0..=table.max_degree())
        .all(|e| table.counts()[e] == table.counts()[table.max_degree() - e]);
    let mut checks = vec![
        Check::holds(
            "counts_symmetric",
            "counts[e] == counts[(q-1)n-e]",
            symmetric,
        ),
        Check::compare(
            "counts_total",
            table.m(table.max_degree()).clone(),
            "==",
            BigUint::from(q).pow(n as u32),
        ),
        Check::le("bound_le_capset_bound", best.clone(), capset.clone()),
    ];

    let mut outputs = json!({
        "q": q,
        "n": n,
        "q_pow_n": table.total().to_string(),
        "table": rows,
        "capset_bound": capset.to_string(),
        "chosen_d": best_d,
        "bound": best.to_string(),
    });

    if let Some(n_max) = growth {
        let points = growth_estimate(field.q(), n_max);
        summary.push("growth M(F_q^k)^(1/k):".into());
        let mut series = Vec::with_capacity(points.len());
        for p in &points {
            summary.push(format!("{:>5}  {}", p.n, p.root_decimal));
            series.push(json!({ "n": p.n, "M": p.bound.to_string(), "root": p.root_decimal }));
        }
        outputs["growth"] = Value::Array(series);
        if let Some(last) = points.last() {
            checks.push(Check::holds(
                "growth_root_below_q_at_n_max",
                &format!(
                    "M(F_q^{})^(1/{}) = {} < {q}",
                    last.n, last.n, last.root_decimal
                ),
                crate::monomial::root_below(&last.bound, last.n as u32, field.q(), 1),
            ));
        }
    }

    Ok(Body {
        inputs: json!({ "command": "bound", "q": q, "n": n, "growth": growth }),
        outputs,
        summary,
        checks,
    })
}

/// Every inequality in a decomposition certificate, re-evaluated from the certificate.
fn decomposition_checks(
    s: &PointSet,
    t: &PointSet,
    dec: &Decomposition,
) -> Result<Vec<Check>, CliError> {
    let c = &dec.certificate;
    let space = s.space();
    let pivot_sums: BTreeSet<FieldVector> = c
        .pivots
        .iter()
        .map(|(a, b)| space.add(a, b))
        .collect::<Result<_, _>>()?;
    Ok(vec![
        Check::holds(
            "coverage",
            "(S'+T) ∪ (S+T') == S+T",
            verify_decomposition(s, t, &dec.s_prime, &dec.t_prime)?,
        ),
        Check::ge("dim_v_lower_bound", c.dim_v as i64, c.dim_v_lower_bound),
        Check::compare(
            "pivots_distinct",
            c.pivots.iter().collect::<BTreeSet<_>>().len(),
            "==",
            c.dim_v,
        ),
        Check::compare("pivot_sums_distinct", pivot_sums.len(), "==", c.dim_v),
        Check::ge("pivot_sums_covered", c.pivot_sums_covered, c.dim_v),
        Check::le("cover_le_rank_bound", c.cover_size, c.rank_bound),
        Check::compare("cover_eq_matching", c.cover_size, "==", c.matching_size),
        Check::le(
            "uncovered_le_q_pow_n_minus_m_d",
            c.uncovered.len() as u64,
            c.q_pow_n - c.m_d,
        ),
        Check::le("witness_total_le_bound", dec.total() as u64, dec.bound),
    ])
}

fn decomposition_summary(dec: &Decomposition) -> Vec<String> {
    let c = &dec.certificate;
    vec![
        format!(
            "d = {}, bound 2*m_{} + q^n - m_d = 2*{} + {} - {} = {}",
            dec.d,
            dec.d / 2,
            c.m_half,
            c.q_pow_n,
            c.m_d,
            dec.bound
        ),
        format!(
            "|S+T| = {}, dim V = {} (lower bound {})",
            c.sumset_size, c.dim_v, c.dim_v_lower_bound
        ),
        format!(
            "line cover: {} rows + {} cols = {} (rank bound {})",
            c.s0.len(),
            c.t0.len(),
            c.cover_size,
            c.rank_bound
        ),
        format!(
            "uncovered sums W: {}, patch S_1: {}",
            c.uncovered.len(),
            c.s1.len()
        ),
        format!("S' = {}", fmt_set(&dec.s_prime)),
        format!("T' = {}", fmt_set(&dec.t_prime)),
        format!("|S'| + |T'| = {}", dec.total()),
    ]
}

fn cmd_decompose(args: &InstanceArgs, limits: &Limits) -> Result<Body, CliError> {
    let inst = parse_instance(&args.input)?;
    let dec = decompose(&inst.s, &inst.t, args.d, limits)?;
    let mut checks = decomposition_checks(&inst.s, &inst.t, &dec)?;
    if args.d.is_none() {
        let table = CountTable::new(inst.space.q(), inst.space.n());
        checks.push(Check::le(
            "bound_le_capset_bound",
            BigUint::from(dec.bound),
            capset_bound_from_table(&table),
        ));
    }
    let mut inputs = instance_inputs(&inst);
    inputs["command"] = json!("decompose");
    inputs["d"] = json!(args.d);
    Ok(Body {
        inputs,
        outputs: serde_json::to_value(&dec).expect("decomposition serializes"),
        summary: decomposition_summary(&dec),
        checks,
    })
}

fn cmd_verify(args: &InputArg) -> Result<Body, CliError> {
    let inst = parse_instance(&args.input)?;
    let (Some(sp), Some(tp)) = (&inst.s_prime, &inst.t_prime) else {
        return Err(CliError::Validation(
            "verify needs S_prime and T_prime in the instance".into(),
        ));
    };
    let ok = verify_decomposition(&inst.s, &inst.t, sp, tp)?;
    let mut inputs = instance_inputs(&inst);
    inputs["command"] = json!("verify");
    Ok(Body {
        inputs,
        outputs: json!({ "verified": ok, "witness_total": sp.len() + tp.len() }),
        summary: vec![format!("|S'| + |T'| = {}", sp.len() + tp.len())],
        checks: vec![
            Check::holds("s_prime_subset", "S' ⊆ S", sp.is_subset(&inst.s)),
            Check::holds("t_prime_subset", "T' ⊆ T", tp.is_subset(&inst.t)),
            Check::holds("coverage", "(S'+T) ∪ (S+T') == S+T", ok),
        ],
    })
}

fn cmd_symmetric(args: &InputArg, limits: &Limits) -> Result<Body, CliError> {
    let inst = parse_instance(&args.input)?;
    let dec = decompose(&inst.s, &inst.s, None, limits)?;
    let sub = dec.s_prime.union(&dec.t_prime)?;
    let full = sumset(&inst.s, &inst.s)?;
    let mut inputs = instance_inputs(&inst);
    inputs["command"] = json!("symmetric");
    Ok(Body {
        inputs,
        outputs: json!({ "s_prime": sub, "size": sub.len(), "bound": dec.bound, "d": dec.d }),
        summary: vec![
            format!("S' = {}", fmt_set(&sub)),
            format!("|S'| = {} of |S| = {}", sub.len(), inst.s.len()),
        ],
        checks: vec![
            Check::holds("s_prime_subset", "S' ⊆ S", sub.is_subset(&inst.s)),
            Check::holds(
                "symmetric_coverage",
                "S'+S == S+S",
                sumset(&sub, &inst.s)? == full,
            ),
            Check::le("size_le_bound", sub.len() as u64, dec.bound),
        ],
    })
}

fn cmd_check_capset(args: &InputArg, limits: &Limits) -> Result<Body, CliError> {
    let inst = parse_instance(&args.input)?;
    let report = check_capset_bound(&inst.s, limits)?;
    let mut checks = Vec::new();
    let mut summary = vec![format!(
        "|S| = {}, AP-free: {}, M(F_q^n) = {}",
        report.size, report.ap_free, report.bound
    )];
    if report.applicable {
        checks.push(Check::le(
            "size_le_capset_bound",
            BigUint::from(report.size),
            report.bound.parse::<BigUint>().expect("decimal"),
        ));
        checks.push(Check::holds(
            "symmetric_subset_is_whole",
            "symmetric_subset(S) == S",
            report.symmetric_subset_is_whole == Some(true),
        ));
        if let Some(fail) = report.proper_subsets_fail {
            checks.push(Check::holds(
                "proper_subsets_fail",
                "S'+S != S+S for all S' ⊊ S",
                fail,
            ));
        }
    } else {
        summary.push("not applicable: the bound concerns AP-free sets over odd q".into());
    }
    let mut inputs = instance_inputs(&inst);
    inputs["command"] = json!("check-capset");
    Ok(Body {
        inputs,
        outputs: serde_json::to_value(&report).expect("report serializes"),
        summary,
        checks,
    })
}

fn cmd_check_sumfree(args: &InputArg, limits: &Limits) -> Result<Body, CliError> {
    let inst = parse_instance(&args.input)?;
    let fam = OrderedPairFamily::new(inst.space, inst.s_list.clone(), inst.t_list.clone())?;
    let report = check_sumfree_bound(&fam, limits)?;
    let mut inputs = instance_inputs(&inst);
    inputs["command"] = json!("check-sumfree");
    Ok(Body {
        inputs,
        outputs: serde_json::to_value(&report).expect("report serializes"),
        summary: vec![format!(
            "N = {}, |S'| = {}, |T'| = {}, M(F_q^n) = {}",
            report.n, report.s_prime_size, report.t_prime_size, report.bound
        )],
        checks: vec![
            Check::le(
                "n_le_capset_bound",
                BigUint::from(report.n),
                report.bound.parse::<BigUint>().expect("decimal"),
            ),
            Check::holds(
                "indices_covered",
                "s_i ∈ S' or t_i ∈ T' for all i",
                report.all_indices_covered,
            ),
            Check::le(
                "n_le_witness_total",
                report.n,
                report.s_prime_size + report.t_prime_size,
            ),
        ],
    })
}

fn cmd_oracle(args: &InstanceArgs, limits: &Limits) -> Result<Body, CliError> {
    let inst = parse_instance(&args.input)?;
    let best = oracle_min_decomposition(&inst.s, &inst.t, limits)?;
    let (gs, gt) = greedy_decomposition(&inst.s, &inst.t)?;
    let dec = decompose(&inst.s, &inst.t, args.d, limits)?;
    let greedy_total = gs.len() + gt.len();
    let mut inputs = instance_inputs(&inst);
    inputs["command"] = json!("oracle");
    inputs["d"] = json!(args.d);
    Ok(Body {
        inputs,
        outputs: json!({
            "oracle": best,
            "greedy": { "s_prime": gs, "t_prime": gt, "total": greedy_total },
            "decomposition": dec,
        }),
        summary: vec![
            format!(
                "oracle minimum: {} (S' = {}, T' = {})",
                best.best_total,
                fmt_set(&best.best_s_prime),
                fmt_set(&best.best_t_prime)
            ),
            format!("greedy: {greedy_total}"),
            format!("constructed: {} (bound {})", dec.total(), dec.bound),
        ],
        checks: vec![
            Check::holds(
                "oracle_valid",
                "oracle witness covers S+T",
                verify_decomposition(&inst.s, &inst.t, &best.best_s_prime, &best.best_t_prime)?,
            ),
            Check::holds(
                "greedy_valid",
                "greedy witness covers S+T",
                verify_decomposition(&inst.s, &inst.t, &gs, &gt)?,
            ),
            Check::holds(
                "constructed_valid",
                "constructed witness covers S+T",
                verify_decomposition(&inst.s, &inst.t, &dec.s_prime, &dec.t_prime)?,
            ),
            Check::le("oracle_le_greedy", best.best_total, greedy_total),
            Check::le("oracle_le_constructed", best.best_total, dec.total()),
            Check::le("constructed_le_bound", dec.total() as u64, dec.bound),
        ],
    })
}

/// Per-trial row of a `trials` report.
#[derive(Debug, Clone, Serialize)]
struct TrialRecord {
    index: usize,
    s_size: usize,
    t_size: usize,
    sumset_size: usize,
    d: Option<usize>,
    dim_v: Option<usize>,
    dim_v_lower_bound: Option<i64>,
    cover_size: Option<usize>,
    rank_bound: Option<usize>,
    uncovered: Option<usize>,
    uncovered_limit: Option<u64>,
    total: Option<usize>,
    bound: Option<u64>,
    valid: bool,
    oracle_total: Option<usize>,
    error: Option<String>,
}

/// Draws `count` pairs `(S, T)`, each point included independently with probability `p`.
pub fn random_instances(
    space: Space,
    count: usize,
    seed: u64,
    p: f64,
    cap: u64,
) -> Result<Vec<(PointSet, PointSet)>, CoreError> {
    let points: Vec<FieldVector> = space.points(cap)?.collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        PointSet::from_points(space, points.iter().filter(|_| rng.gen_bool(p)).cloned())
    };
    (0..count)
        .map(|_| {
            let s = draw(&mut rng)?;
            let t = draw(&mut rng)?;
            Ok((s, t))
        })
        .collect()
}

fn cmd_trials(args: &TrialArgs, limits: &Limits) -> Result<Body, CliError> {
    let field = make_field(args.q).map_err(|e| CliError::Validation(format!("q: {e}")))?;
    if !(0.0..=1.0).contains(&args.p) {
        return Err(CliError::Validation(format!(
            "p = {} is not a probability",
            args.p
        )));
    }
    let space = Space::new(field, args.n);
    let instances = random_instances(space, args.count, args.seed, args.p, limits.enumeration_cap)?;

    let records: Vec<TrialRecord> = instances
        .par_iter()
        .enumerate()
        .map(|(index, (s, t))| run_trial(index, s, t, args, limits))
        .collect::<Result<_, _>>()?;

    let all = |f: &dyn Fn(&TrialRecord) -> bool| records.iter().all(f);
    let max_total = records.iter().filter_map(|r| r.total).max().unwrap_or(0);
    let max_bound = records.iter().filter_map(|r| r.bound).max().unwrap_or(0);
    let mut checks = vec![
        Check::holds(
            "all_trials_completed",
            "no trial raised an error",
            all(&|r| r.error.is_none()),
        ),
        Check::holds(
            "all_coverage",
            "every witness covers S+T",
            all(&|r| r.valid),
        ),
        Check::holds(
            "all_total_le_bound",
            "|S'|+|T'| <= bound on every trial",
            all(&|r| r.total.zip(r.bound).is_some_and(|(t, b)| t as u64 <= b)),
        ),
        Check::holds(
            "all_dim_v_lower_bound",
            "dim V >= m_d - q^n + |S+T| on every trial",
            all(&|r| {
                r.dim_v
                    .zip(r.dim_v_lower_bound)
                    .is_some_and(|(v, lb)| v as i64 >= lb)
            }),
        ),
        Check::holds(
            "all_cover_le_rank_bound",
            "cover <= 2 m_(d/2) on every trial",
            all(&|r| r.cover_size.zip(r.rank_bound).is_some_and(|(c, b)| c <= b)),
        ),
        Check::holds(
            "all_uncovered_le_limit",
            "|W| <= q^n - m_d on every trial",
            all(&|r| {
                r.uncovered
                    .zip(r.uncovered_limit)
                    .is_some_and(|(w, l)| w as u64 <= l)
            }),
        ),
    ];
    if args.oracle {
        checks.push(Check::holds(
            "oracle_le_constructed",
            "oracle minimum <= |S'|+|T'| where the oracle ran",
            all(&|r| match (r.oracle_total, r.total) {
                (Some(o), Some(t)) => o <= t,
                _ => true,
            }),
        ));
    }

    let mut summary = vec![
        format!(
            "F_{}^{}: {} trials, seed {}, p = {}",
            args.q, args.n, args.count, args.seed, args.p
        ),
        format!("max |S'|+|T'| = {max_total}, bound = {max_bound}"),
        format!(
            "{:>6} {:>4} {:>4} {:>6} {:>3} {:>6} {:>6} {:>4} {:>6}",
            "trial", "|S|", "|T|", "|S+T|", "d", "dimV", "cover", "|W|", "total"
        ),
    ];
    let show = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
    for r in &records {
        summary.push(format!(
            "{:>6} {:>4} {:>4} {:>6} {:>3} {:>6} {:>6} {:>4} {:>6}",
            r.index,
            r.s_size,
            r.t_size,
            r.sumset_size,
            show(r.d),
            show(r.dim_v),
            show(r.cover_size),
            show(r.uncovered),
            show(r.total),
        ));
    }

    Ok(Body {
        inputs: json!({
            "command": "trials",
            "q": args.q,
            "n": args.n,
            "count": args.count,
            "seed": args.seed,
            "p": args.p,
            "d": args.d,
            "oracle": args.oracle,
        }),
        outputs: json!({ "trials": records, "max_total": max_total, "bound": max_bound }),
        summary,
        checks,
    })
}

fn run_trial(
    index: usize,
    s: &PointSet,
    t: &PointSet,
    args: &TrialArgs,
    limits: &Limits,
) -> Result<TrialRecord, CliError> {
    let mut record = TrialRecord {
        index,
        s_size: s.len(),
        t_size: t.len(),
        sumset_size: sumset(s, t)?.len(),
        d: None,
        dim_v: None,
        dim_v_lower_bound: None,
        cover_size: None,
        rank_bound: None,
        uncovered: None,
        uncovered_limit: None,
        total: None,
        bound: None,
        valid: false,
        oracle_total: None,
        error: None,
    };
    match decompose(s, t, args.d, limits) {
        Ok(dec) => {
            let c = &dec.certificate;
            record.d = Some(dec.d);
            record.dim_v = Some(c.dim_v);
            record.dim_v_lower_bound = Some(c.dim_v_lower_bound);
            record.cover_size = Some(c.cover_size);
            record.rank_bound = Some(c.rank_bound);
            record.uncovered = Some(c.uncovered.len());
            record.uncovered_limit = Some(c.q_pow_n - c.m_d);
            record.total = Some(dec.total());
            record.bound = Some(dec.bound);
            record.valid = verify_decomposition(s, t, &dec.s_prime, &dec.t_prime)?;
        }
        Err(e) if e.is_verification_failure() => record.error = Some(e.to_string()),
        Err(e) => return Err(e.into()),
    }
    if args.oracle && s.len() + t.len() <= limits.oracle_cap {
        record.oracle_total = Some(oracle_min_decomposition(s, t, limits)?.best_total);
    }
    Ok(record)
}
