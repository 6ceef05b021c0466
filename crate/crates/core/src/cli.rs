//! The `wte` command line: `moment`, `cumulant`, `verify`, `census`, `clt`.
//!
//! Exit codes: 0 success, 1 other errors, 2 parse / unbound slot / unknown
//! family, 3 dimension mismatch, 4 oracle budget exceeded, 5 verification
//! mismatch.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::engine::{self, Kind, MomentResult, MomentSpec, TermReport};
use crate::error::{Error, Result};
use crate::expr::{self, Context, Gram, TraceWordAst};
use crate::gluing::Gluing;
use crate::matrix::Bindings;
use crate::oracle::{mc_oracle, wick_oracle};
use crate::perm::{enumerate_pairings, format_cycles, pairing_count};
use crate::scalar::{parse_rational, relative_close, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Expected value of the product of traces.
    Moment,
    /// Classical cumulant of the traces.
    Cumulant,
    /// Compare the engine with the Wick oracle, and with sampling when
    /// `--samples` is given.
    Verify,
    /// Count pairings by surface type.
    Census,
    /// N² times the covariance matrix of the traces, full and leading order.
    Clt,
}

#[derive(Clone, Debug, Args)]
pub struct RunConfig {
    /// Expression such as "E[ tr(X' D1 X D2) ]".
    #[arg(long, global = true, conflicts_with = "expr_file")]
    pub expr: Option<String>,
    /// File holding the expression.
    #[arg(long, global = true)]
    pub expr_file: Option<PathBuf>,
    /// Bindings file: lines `D1 = path/to/matrix.txt`, `D2 = I 3`, `D3 = D1`.
    #[arg(long, global = true)]
    pub bind: Option<PathBuf>,
    /// Columns of X; traces are normalized by N.
    #[arg(short = 'N', global = true, default_value_t = 2)]
    pub n: usize,
    /// Rows of X (defaults to N).
    #[arg(short = 'M', global = true)]
    pub m: Option<usize>,
    /// Crossing weight in [-1, 1].
    #[arg(long, global = true, default_value = "1")]
    pub q: String,
    /// Gram file: family names on the first line, then the matrix rows.
    #[arg(long, global = true)]
    pub gram: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo samples for `verify`.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Exact rational arithmetic; matrix entries must be integers.
    #[arg(long, global = true)]
    pub exact: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Include the per-pairing table.
    #[arg(long, global = true)]
    pub terms: bool,
    /// Families whose letters are Wigner matrices (X + Xᵀ)/2.
    #[arg(long, global = true, value_delimiter = ',')]
    pub wigner: Vec<String>,
}

#[derive(Debug, Parser)]
#[command(name = "wte", version, about = "Moments and cumulants of Gaussian trace words")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: RunConfig,
}

/// What a command produced: the rendered report, warnings for stderr, and the
/// exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub warnings: Vec<String>,
    pub status: i32,
}

/// Parses `args` (program name first) and runs the command, printing to the
/// standard streams. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli.command, &cli.config) {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", out.stdout);
            out.status
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one command on a dedicated thread pool of the configured size.
pub fn run(command: Command, config: &RunConfig) -> Result<Output> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        if t == 0 {
            return Err(Error::Input("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Input(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(command, config))
}

struct Prepared {
    ast: TraceWordAst,
    ctx: Context,
    warnings: Vec<String>,
}

fn prepare(config: &RunConfig) -> Result<Prepared> {
    let text = match (&config.expr, &config.expr_file) {
        (Some(e), _) => e.clone(),
        (None, Some(p)) => std::fs::read_to_string(p).map_err(|source| Error::Io {
            path: p.display().to_string(),
            source,
        })?,
        (None, None) => return Err(Error::Input("an expression is required (--expr or --expr-file)".into())),
    };
    let (ast, warnings) = expr::parse_with_warnings(&text)?;
    let mut ctx = Context::new(config.n, config.m.unwrap_or(config.n));
    ctx.q = parse_rational(&config.q)?;
    ctx.wigner = config.wigner.clone();
    if let Some(b) = &config.bind {
        ctx.bindings = Some(Bindings::load(b)?);
    }
    if let Some(g) = &config.gram {
        ctx.gram = Some(Gram::load(g)?);
    }
    Ok(Prepared { ast, ctx, warnings })
}

fn dispatch(command: Command, config: &RunConfig) -> Result<Output> {
    let mut prep = prepare(config)?;
    let mut warnings = std::mem::take(&mut prep.warnings);
    let wanted = match command {
        Command::Moment => Some(Kind::Moment),
        Command::Cumulant => Some(Kind::Cumulant),
        _ => None,
    };
    if let Some(k) = wanted {
        if k != prep.ast.kind {
            warnings.push(format!(
                "expression is written as a {} but the {} command was requested; computing the {}",
                kind_name(prep.ast.kind),
                kind_name(k),
                kind_name(k)
            ));
        }
    }
    let mut out = match command {
        Command::Moment => evaluate_cmd(&prep, config, Kind::Moment),
        Command::Cumulant => evaluate_cmd(&prep, config, Kind::Cumulant),
        Command::Verify => verify_cmd(&prep, config),
        Command::Census => census_cmd(&prep, config),
        Command::Clt => clt_cmd(&prep, config),
    }?;
    warnings.append(&mut out.warnings);
    out.warnings = warnings;
    Ok(out)
}

fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::Moment => "moment",
        Kind::Cumulant => "cumulant",
    }
}

fn exact_spec(prep: &Prepared, config: &RunConfig) -> Result<MomentSpec<Rational>> {
    let spec = expr::elaborate(&prep.ast, &prep.ctx)?;
    if config.exact && !spec.matrices.is_integer() {
        return Err(Error::Input(
            "--exact needs integer matrix entries; drop --exact for floating-point evaluation".into(),
        ));
    }
    Ok(spec)
}

fn num<T: Scalar>(x: &T) -> Value {
    if T::EXACT {
        Value::String(x.to_string())
    } else {
        json!(x.to_f64())
    }
}

fn show<T: Scalar>(x: &T) -> String {
    if T::EXACT {
        let f = x.to_f64();
        let s = x.to_string();
        if s.contains('/') {
            format!("{s} (≈ {f})")
        } else {
            s
        }
    } else {
        format!("{}", x.to_f64())
    }
}

fn evaluate_cmd(prep: &Prepared, config: &RunConfig, kind: Kind) -> Result<Output> {
    let spec = exact_spec(prep, config)?;
    if config.exact {
        let res = engine::evaluate_kind(&spec, kind)?;
        render_result(&prep.ast, &res, config)
    } else {
        let res = engine::evaluate_kind(&spec.to_f64(), kind)?;
        render_result(&prep.ast, &res, config)
    }
}

fn term_json<T: Scalar>(t: &TermReport<T>) -> Value {
    json!({
        "index": t.index,
        "variant": t.variant,
        "blocks": t.blocks,
        "crossings": t.crossings,
        "weight": num(&t.weight),
        "cycles": format_cycles(&t.cycles),
        "components": t.surface.components,
        "vertices": t.surface.vertices,
        "transitive": t.transitive,
        "order_exponent": t.order_exponent,
        "value": num(&t.value),
    })
}

fn pairing_string(blocks: &[(usize, usize)]) -> String {
    blocks.iter().map(|(a, b)| format!("({a},{b})")).collect()
}

fn surface_string<T>(t: &TermReport<T>) -> (String, String) {
    let kinds: Vec<String> = t.surface.components.iter().map(|c| c.kind.to_string()).collect();
    let chis: Vec<String> = t.surface.components.iter().map(|c| c.euler.to_string()).collect();
    (kinds.join("+"), chis.join(","))
}

fn csv_string(rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r)
            .map_err(|e| Error::Input(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Input(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn render_result<T: Scalar>(
    ast: &TraceWordAst,
    res: &MomentResult<T>,
    config: &RunConfig,
) -> Result<Output> {
    let stdout = match config.format {
        Format::Json => {
            let mut v = json!({
                "expression": ast.to_string(),
                "kind": res.kind,
                "mode": res.mode(),
                "n": res.n,
                "m": res.m,
                "letters": res.letters,
                "factors": res.factors,
                "terms_evaluated": res.terms.len(),
                "prefactor_exponent": res.prefactor_exponent,
                "value_tr": num(&res.total),
                "value_Tr": num(&res.unnormalized()),
                "fingerprint": res.fingerprint,
            });
            if config.terms {
                v["terms"] = Value::Array(res.terms.iter().map(term_json).collect());
            }
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Csv => {
            let mut rows = Vec::new();
            if config.terms {
                rows.push(
                    [
                        "index", "variant", "pairing", "crossings", "weight", "cycles", "surface",
                        "euler", "orientable", "transitive", "order_exponent", "value",
                    ]
                    .map(String::from)
                    .to_vec(),
                );
                for t in &res.terms {
                    let (kinds, chis) = surface_string(t);
                    rows.push(vec![
                        t.index.to_string(),
                        t.variant.to_string(),
                        pairing_string(&t.blocks),
                        t.crossings.to_string(),
                        t.weight.to_string(),
                        format_cycles(&t.cycles),
                        kinds,
                        chis,
                        t.surface.is_orientable().to_string(),
                        t.transitive.to_string(),
                        t.order_exponent.to_string(),
                        t.value.to_string(),
                    ]);
                }
            } else {
                rows.push(
                    ["kind", "mode", "n", "m", "letters", "factors", "prefactor_exponent", "value_tr", "value_Tr"]
                        .map(String::from)
                        .to_vec(),
                );
                rows.push(vec![
                    kind_name(res.kind).into(),
                    res.mode().into(),
                    res.n.to_string(),
                    res.m.to_string(),
                    res.letters.to_string(),
                    res.factors.to_string(),
                    res.prefactor_exponent.to_string(),
                    res.total.to_string(),
                    res.unnormalized().to_string(),
                ]);
            }
            csv_string(rows)?
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "expression   {ast}");
            let _ = writeln!(s, "kind         {}", kind_name(res.kind));
            let _ = writeln!(s, "mode         {}", res.mode());
            let _ = writeln!(s, "N, M         {}, {}", res.n, res.m);
            let _ = writeln!(s, "letters      {} in {} factor(s)", res.letters, res.factors);
            let _ = writeln!(s, "terms        {}", res.terms.len());
            let _ = writeln!(s, "prefactor    N^{}", res.prefactor_exponent);
            let _ = writeln!(s, "value (tr)   {}", show(&res.total));
            let _ = writeln!(s, "value (Tr)   {}", show(&res.unnormalized()));
            let _ = writeln!(s, "time         {:.3} ms", res.elapsed.as_secs_f64() * 1e3);
            if config.terms {
                let _ = writeln!(s);
                let _ = writeln!(
                    s,
                    "{:>6} {:>4} {:<24} {:>3} {:>10} {:<32} {:<20} {:>6} {:>5} {}",
                    "index", "var", "pairing", "cr", "weight", "cycles", "surface", "chi", "order", "value"
                );
                for t in &res.terms {
                    let (kinds, chis) = surface_string(t);
                    let _ = writeln!(
                        s,
                        "{:>6} {:>4} {:<24} {:>3} {:>10} {:<32} {:<20} {:>6} {:>5} {}",
                        t.index,
                        t.variant,
                        pairing_string(&t.blocks),
                        t.crossings,
                        t.weight.to_string(),
                        format_cycles(&t.cycles),
                        kinds,
                        chis,
                        t.order_exponent,
                        t.value
                    );
                }
            }
            s
        }
    };
    Ok(Output {
        stdout,
        warnings: Vec::new(),
        status: 0,
    })
}

struct Check {
    name: String,
    engine: String,
    reference: String,
    detail: String,
    pass: bool,
}

fn verify_cmd(prep: &Prepared, config: &RunConfig) -> Result<Output> {
    let spec = exact_spec(prep, config)?;
    let kind = prep.ast.kind;
    let mut checks = Vec::new();
    let engine_f64;
    if config.exact {
        let e = engine::evaluate_kind(&spec, kind)?.total;
        let w = wick_oracle(&spec, kind)?;
        engine_f64 = e.to_f64();
        checks.push(Check {
            name: "wick (exact)".into(),
            pass: e == w,
            detail: if e == w { "identical".into() } else { format!("difference {}", &e - &w) },
            engine: e.to_string(),
            reference: w.to_string(),
        });
    } else {
        let fs = spec.to_f64();
        let res = engine::evaluate_kind(&fs, kind)?;
        let w = wick_oracle(&fs, kind)?;
        let e = res.total;
        // scale by the term magnitudes so cancellations to zero compare sanely
        let magnitude = <f64 as Scalar>::sum(res.terms.iter().map(|t| t.value.abs()))
            * (res.n as f64).powi(res.prefactor_exponent as i32);
        let diff = (e - w).abs();
        let pass = relative_close(e, w, 1e-10) || diff <= 1e-10 * magnitude;
        engine_f64 = e;
        checks.push(Check {
            name: "wick (float)".into(),
            pass,
            detail: format!("|difference| {diff:e}, tolerance 1e-10 relative"),
            engine: e.to_string(),
            reference: w.to_string(),
        });
    }
    if let Some(samples) = config.samples {
        let rep = mc_oracle(&spec.to_f64(), kind, samples, config.seed)?;
        let z = rep.z_score(engine_f64);
        checks.push(Check {
            name: "monte carlo".into(),
            pass: z <= 5.0,
            detail: format!(
                "z = {z:.3} (estimate {} ± {}, {} samples, seed {})",
                rep.estimate, rep.std_error, rep.samples, rep.seed
            ),
            engine: engine_f64.to_string(),
            reference: rep.estimate.to_string(),
        });
    }
    let all = checks.iter().all(|c| c.pass);
    let stdout = match config.format {
        Format::Json => {
            let v = json!({
                "expression": prep.ast.to_string(),
                "mode": if config.exact { "exact" } else { "float" },
                "pass": all,
                "checks": checks.iter().map(|c| json!({
                    "oracle": c.name,
                    "engine": c.engine,
                    "reference": c.reference,
                    "detail": c.detail,
                    "pass": c.pass,
                })).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Csv => {
            let mut rows = vec![["oracle", "engine", "reference", "pass", "detail"]
                .map(String::from)
                .to_vec()];
            for c in &checks {
                rows.push(vec![
                    c.name.clone(),
                    c.engine.clone(),
                    c.reference.clone(),
                    c.pass.to_string(),
                    c.detail.clone(),
                ]);
            }
            csv_string(rows)?
        }
        Format::Text => {
            let mut s = format!("expression   {}\n", prep.ast);
            for c in &checks {
                let _ = writeln!(
                    s,
                    "{} {:<14} engine {}  reference {}  {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.engine,
                    c.reference,
                    c.detail
                );
            }
            s
        }
    };
    Ok(Output {
        stdout,
        warnings: Vec::new(),
        status: if all { 0 } else { Error::Mismatch(String::new()).exit_code() },
    })
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct CensusKey {
    order_exponent: std::cmp::Reverse<i64>,
    euler: Vec<i64>,
    orientable: bool,
    transitive: bool,
    crossings: usize,
}

fn census_cmd(prep: &Prepared, config: &RunConfig) -> Result<Output> {
    use rayon::prelude::*;
    let shape = expr::shape_of(&prep.ast)?;
    let m = shape.letters();
    let gluing = Gluing::new(&shape);
    let pairings: Vec<_> = enumerate_pairings(m).collect();
    let rows: Vec<(CensusKey, Value)> = pairings
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let g = gluing.glue(p)?;
            let key = CensusKey {
                order_exponent: std::cmp::Reverse(g.surface.order_exponent),
                euler: g.surface.euler_multiset(),
                orientable: g.surface.is_orientable(),
                transitive: g.surface.is_connected(),
                crossings: crate::perm::crossings(p),
            };
            let detail = json!({
                "index": i,
                "pairing": p.to_string(),
                "cycles": format_cycles(&g.particular),
                "components": g.surface.components,
                "order_exponent": g.surface.order_exponent,
                "crossings": key.crossings,
            });
            Ok((key, detail))
        })
        .collect::<Result<_>>()?;
    let mut groups: BTreeMap<CensusKey, usize> = BTreeMap::new();
    for (k, _) in &rows {
        *groups.entry(k.clone()).or_default() += 1;
    }
    let total = pairing_count(m);
    let stdout = match config.format {
        Format::Json => {
            let mut v = json!({
                "expression": prep.ast.to_string(),
                "letters": m,
                "factors": shape.factors(),
                "total": total,
                "groups": groups.iter().map(|(k, c)| json!({
                    "order_exponent": k.order_exponent.0,
                    "euler": k.euler,
                    "orientable": k.orientable,
                    "transitive": k.transitive,
                    "crossings": k.crossings,
                    "count": c,
                })).collect::<Vec<_>>(),
            });
            if config.terms {
                v["pairings"] = Value::Array(rows.into_iter().map(|(_, d)| d).collect());
            }
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Csv => {
            let mut out = vec![["order_exponent", "euler", "orientable", "transitive", "crossings", "count"]
                .map(String::from)
                .to_vec()];
            for (k, c) in &groups {
                out.push(vec![
                    k.order_exponent.0.to_string(),
                    k.euler.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
                    k.orientable.to_string(),
                    k.transitive.to_string(),
                    k.crossings.to_string(),
                    c.to_string(),
                ]);
            }
            csv_string(out)?
        }
        Format::Text => {
            let mut s = format!("expression   {}\n", prep.ast);
            let _ = writeln!(s, "pairings     {total}\n");
            let _ = writeln!(
                s,
                "{:>5} {:<12} {:>10} {:>10} {:>3} {:>8}",
                "order", "euler", "orientable", "transitive", "cr", "count"
            );
            for (k, c) in &groups {
                let chis: Vec<String> = k.euler.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(
                    s,
                    "{:>5} {:<12} {:>10} {:>10} {:>3} {:>8}",
                    k.order_exponent.0,
                    chis.join(","),
                    k.orientable,
                    k.transitive,
                    k.crossings,
                    c
                );
            }
            if config.terms {
                let _ = writeln!(s);
                for (_, d) in &rows {
                    let _ = writeln!(
                        s,
                        "{:>6} {:<24} {:<40} order {}",
                        d["index"], d["pairing"].as_str().unwrap_or(""), d["cycles"].as_str().unwrap_or(""), d["order_exponent"]
                    );
                }
            }
            s
        }
    };
    Ok(Output {
        stdout,
        warnings: Vec::new(),
        status: 0,
    })
}

fn clt_cmd(prep: &Prepared, config: &RunConfig) -> Result<Output> {
    let spec = exact_spec(prep, config)?;
    if config.exact {
        render_clt(prep, &engine::clt_report(&spec)?, config)
    } else {
        render_clt(prep, &engine::clt_report(&spec.to_f64())?, config)
    }
}

fn render_clt<T: Scalar>(
    prep: &Prepared,
    rep: &engine::CltReport<T>,
    config: &RunConfig,
) -> Result<Output> {
    let grid = |m: &Vec<Vec<T>>| -> Vec<Vec<Value>> {
        m.iter().map(|row| row.iter().map(num).collect()).collect()
    };
    let stdout = match config.format {
        Format::Json => {
            let v = json!({
                "expression": prep.ast.to_string(),
                "n": prep.ctx.n,
                "m": prep.ctx.m,
                "full": grid(&rep.full),
                "leading": grid(&rep.leading),
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Csv => {
            let mut rows = vec![["matrix", "k", "l", "value"].map(String::from).to_vec()];
            for (name, mat) in [("full", &rep.full), ("leading", &rep.leading)] {
                for (k, row) in mat.iter().enumerate() {
                    for (l, x) in row.iter().enumerate() {
                        rows.push(vec![name.into(), (k + 1).to_string(), (l + 1).to_string(), x.to_string()]);
                    }
                }
            }
            csv_string(rows)?
        }
        Format::Text => {
            let mut s = format!("expression   {}\n", prep.ast);
            for (name, mat) in [("N² k₂ (full)", &rep.full), ("N² k₂ (leading)", &rep.leading)] {
                let _ = writeln!(s, "\n{name}");
                for row in mat {
                    let cells: Vec<String> = row.iter().map(|x| format!("{:>14}", show(x))).collect();
                    let _ = writeln!(s, "{}", cells.join(" "));
                }
            }
            s
        }
    };
    Ok(Output {
        stdout,
        warnings: Vec::new(),
        status: 0,
    })
}
