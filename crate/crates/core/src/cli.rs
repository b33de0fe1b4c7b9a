//! Command-line front end. [`run`] does all the work so tests can drive it
//! without spawning a process.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 invalid parameters,
//! 3 internal error.

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::complexity::{BoundReport, CurveInput};
use crate::descent::{canonical_chain, chain_from_norms, descent_table, odd_p_factorization, quadratic_tower, DescentTable};
use crate::error::Error;
use crate::ff::{Field, FieldElement, Modulus, QUADRATIC_BASE_CAP};
use crate::selfcheck;
use crate::tower::{check_maximality, completed_tower, gs_tower, render_tower};

/// Worker threads for place counting; defaults to the available parallelism.
pub const WORKERS_ENV: &str = "TOWERDESCENT_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug, Clone)]
#[command(name = "towerdescent", version, about = "Descend Artin-Schreier extensions and the Garcia-Stichtenoth tower from F_{q^2} to F_q")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(clap::Args, Debug, Clone)]
pub struct FieldArgs {
    /// Characteristic.
    #[arg(long)]
    pub p: u64,
    /// Degree over F_p, so q = p^n.
    #[arg(long)]
    pub n: usize,
    /// Modulus coefficients c0,c1,...,1 in ascending order.
    #[arg(long)]
    pub modulus: Option<String>,
}

#[derive(clap::Args, Debug, Clone)]
pub struct ChainArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Odd p only: comma-separated exponents k, choosing the first basis
    /// elements as roots of T^2 + w^k.
    #[arg(long)]
    pub norms: Option<String>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Describe F_{p^n} and its log table.
    Field(FieldArgs),
    /// Descent table (P_i, M_i) and recursion constants W_j.
    Descend(ChainArgs),
    /// Equations of the completed (or plain) tower.
    Tower {
        #[command(flatten)]
        chain: ChainArgs,
        /// Number of levels.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Plain Garcia-Stichtenoth tower, without intermediate steps.
        #[arg(long)]
        plain: bool,
    },
    /// Genus, place counts and maximality of the first-stage curve G_{1,i}.
    Count {
        #[command(flatten)]
        chain: ChainArgs,
        /// Stage index, 1 <= i <= n.
        #[arg(long)]
        i: usize,
    },
    /// Bilinear complexity bounds for multiplication in F_{q^n}.
    Bound {
        #[arg(long)]
        q: u64,
        /// Extension degree.
        #[arg(long)]
        n: u64,
        /// Genus of a concrete curve (needs --n1 and --n2 as well).
        #[arg(long, requires_all = ["n1", "n2"])]
        g: Option<u64>,
        /// Degree-one places of the curve.
        #[arg(long, requires = "g")]
        n1: Option<u64>,
        /// Degree-two places of the curve.
        #[arg(long, requires = "g")]
        n2: Option<u64>,
        /// Do not assume a non-special divisor of degree g - 1 exists.
        #[arg(long)]
        no_nonspecial: bool,
    },
    /// Check the embedded golden tables and run the randomized suites.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Invalid(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(m) => Failure::Internal(m),
            e => Failure::Invalid(e.to_string()),
        }
    }
}

/// Parses and runs; diagnostics go to `err` as one line.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli) {
        Ok((text, code)) => {
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_INTERNAL;
            }
            code
        }
        Err(Failure::Invalid(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_INVALID
        }
        Err(Failure::Internal(m)) => {
            let _ = writeln!(err, "internal error: {m}");
            EXIT_INTERNAL
        }
    }
}

fn emit(format: Format, text: String, value: Value) -> String {
    match format {
        Format::Text => text,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("json values serialize");
            s.push('\n');
            s
        }
    }
}

fn dispatch(cli: &Cli) -> std::result::Result<(String, i32), Failure> {
    let fmt = cli.format;
    match &cli.command {
        Command::Field(args) => {
            let field = build_field(args)?;
            Ok((emit(fmt, field_text(&field), field_json(&field)), EXIT_OK))
        }
        Command::Descend(args) => {
            let table = build_table(args)?;
            let mut text = table.to_string();
            let mut value = table.to_json();
            if table.chain().p() != 2 {
                let factors = odd_p_factorization(table.chain().ambient())?;
                let rendered: Vec<String> = factors.iter().map(|f| format!("({f})")).collect();
                text.push_str(&format!("T^{} + T = {}\n", table.q(), rendered.join("")));
                value["factorization"] = json!(factors.iter().map(ToString::to_string).collect::<Vec<_>>());
            }
            Ok((emit(fmt, text, value), EXIT_OK))
        }
        Command::Tower { chain, depth, plain } => {
            let eqs = if *plain {
                if chain.norms.is_some() {
                    return Err(Failure::Invalid("--norms has no effect with --plain".into()));
                }
                let ambient = quadratic_tower_for(&chain.field)?;
                gs_tower(ambient.base().ok_or(Error::NotQuadraticTower)?, *depth)?
            } else {
                completed_tower(&build_table(chain)?, *depth)?
            };
            let value = json!({
                "plain": plain,
                "depth": depth,
                "equations": eqs.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
            });
            Ok((emit(fmt, render_tower(&eqs), value), EXIT_OK))
        }
        Command::Count { chain, i } => {
            let workers = workers()?;
            let table = build_table(chain)?;
            let stats = check_maximality(&table, *i, workers)?;
            Ok((emit(fmt, stats.to_string(), stats.to_json()), EXIT_OK))
        }
        Command::Bound { q, n, g, n1, n2, no_nonspecial } => {
            let curve = match (g, n1, n2) {
                (Some(g), Some(n1), Some(n2)) => {
                    let c = CurveInput::new(*q, *n, *g, *n1, *n2)?;
                    Some(if *no_nonspecial { c.with_nonspecial(false) } else { c })
                }
                _ => {
                    if *q == 0 || *n < 2 {
                        return Err(Failure::Invalid(format!("need a prime power q and n >= 2, got q = {q}, n = {n}")));
                    }
                    None
                }
            };
            let report = BoundReport::new(*q, *n, curve.as_ref())?;
            Ok((emit(fmt, report.to_string(), report.to_json()), EXIT_OK))
        }
        Command::Verify { seed } => {
            let checks = selfcheck::run_all(*seed)?;
            let failed = checks.iter().filter(|c| !c.ok).count();
            let mut text = String::new();
            for c in &checks {
                if c.ok {
                    text.push_str(&format!("ok   {}\n", c.label));
                } else {
                    text.push_str(&format!("FAIL {}: {}\n", c.label, c.detail));
                }
            }
            text.push_str(&format!("verify: {} checks, {failed} failed (seed {seed})\n", checks.len()));
            let value = json!({
                "seed": seed,
                "total": checks.len(),
                "failed": failed,
                "checks": checks.iter().map(|c| json!({ "label": c.label, "ok": c.ok, "detail": c.detail })).collect::<Vec<_>>(),
            });
            let code = if failed == 0 { EXIT_OK } else { EXIT_CHECK_FAILED };
            Ok((emit(fmt, text, value), code))
        }
    }
}

fn workers() -> std::result::Result<usize, Failure> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w >= 1 => Ok(w),
            _ => Err(Failure::Invalid(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

fn parse_list<T: std::str::FromStr>(what: &str, s: &str) -> std::result::Result<Vec<T>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| Failure::Invalid(format!("bad {what} entry {x:?}"))))
        .collect()
}

fn modulus(args: &FieldArgs) -> std::result::Result<Modulus, Failure> {
    Ok(match &args.modulus {
        Some(s) => Modulus::Explicit(parse_list("modulus", s)?),
        None => Modulus::Default,
    })
}

fn build_field(args: &FieldArgs) -> std::result::Result<Field, Failure> {
    Ok(Field::new(args.p, args.n, modulus(args)?)?)
}

fn quadratic_tower_for(args: &FieldArgs) -> std::result::Result<Field, Failure> {
    let q = (args.p as u128).checked_pow(args.n as u32).unwrap_or(u128::MAX);
    if q > QUADRATIC_BASE_CAP as u128 {
        return Err(Failure::Invalid(format!("q = {}^{} exceeds the limit {QUADRATIC_BASE_CAP} for F_q^2 arithmetic", args.p, args.n)));
    }
    Ok(quadratic_tower(args.p, args.n, modulus(args)?)?)
}

fn build_table(args: &ChainArgs) -> std::result::Result<DescentTable, Failure> {
    let ambient = quadratic_tower_for(&args.field)?;
    let chain = match &args.norms {
        Some(s) => {
            if args.field.p == 2 {
                return Err(Failure::Invalid("--norms applies to odd characteristic only".into()));
            }
            let base = ambient.base().ok_or(Error::NotQuadraticTower)?;
            let norms: Vec<FieldElement> = parse_list::<i64>("norms", s)?.into_iter().map(|k| base.gen_pow(k)).collect();
            chain_from_norms(&ambient, &norms)?
        }
        None => canonical_chain(&ambient)?,
    };
    Ok(descent_table(&chain)?)
}

/// Fields up to this size get a full log table.
const LOG_TABLE_LIMIT: u32 = 64;

fn field_text(k: &Field) -> String {
    let mut s = format!("{k}\n");
    s.push_str(&format!("size = {}\n", k.size()));
    s.push_str(&format!("generator = {}\n", k.generator_name()));
    s.push_str(&format!("indeterminate primitive = {}\n", k.indeterminate_is_primitive()));
    if k.size() <= LOG_TABLE_LIMIT {
        for e in (0..k.size() - 1).map(|i| k.gen_pow(i as i64)) {
            let log = e.discrete_log().expect("nonzero");
            s.push_str(&format!("w^{log} = {}\n", e.to_coord_string()));
        }
    } else {
        s.push_str(&format!("log table: {} entries\n", k.size() - 1));
    }
    s
}

fn field_json(k: &Field) -> Value {
    let table = (k.size() <= LOG_TABLE_LIMIT).then(|| {
        (0..k.size() - 1)
            .map(|i| json!({ "log": i, "coords": k.gen_pow(i as i64).prime_coords() }))
            .collect::<Vec<_>>()
    });
    json!({
        "p": k.p(),
        "n": k.absolute_degree(),
        "size": k.size(),
        "modulus": k.modulus_values(),
        "generator": k.generator_name(),
        "indeterminate_primitive": k.indeterminate_is_primitive(),
        "log_table": table,
    })
}
