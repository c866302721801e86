//! `etaprove` command-line front end.

mod suite;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use etaprove::cusps::CuspTable;
use etaprove::etaq::{expand_combination, expand_term, Term};
use etaprove::identities::SeedGroup;
use etaprove::prover::ProverOptions;
use etaprove::ranktheorems::{af_table, check_congruence, required_table_size, CongruenceFamily};
use etaprove::specfile::{bundled, parse_spec, IdentityBody, IdentitySpec, BUNDLED};
use etaprove::upalgebra::{certify_seed, seed_tables};
use etaprove::{Error, ExactSeries, Group, OrderReport};

#[derive(Parser)]
#[command(name = "etaprove", version, about = "Exact eta-quotient identity prover and rank parity toolkit")]
struct Cli {
    /// Expansion depth (q-terms); its meaning depends on the command.
    #[arg(long, global = true)]
    depth: Option<i64>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupKind {
    Gamma0,
    Gamma1,
}

#[derive(Subcommand)]
enum Command {
    /// q-expansion of an identity (spec file or bundled name) or of one quotient.
    Expand {
        target: Option<String>,
        /// Eta quotient factors, e.g. "1^2 10^4 2^-4 5^-2".
        #[arg(long, conflicts_with_all = ["target", "gen"], requires = "level")]
        eta: Option<String>,
        /// Generalized eta quotient factors, e.g. "5,1^5 5,2^-5".
        #[arg(long, conflicts_with = "target", requires = "level")]
        gen: Option<String>,
        #[arg(long)]
        level: Option<i64>,
    },
    /// Cusp representatives and widths.
    Cusps {
        level: i64,
        #[arg(long, value_enum, default_value_t = GroupKind::Gamma0)]
        group: GroupKind,
    },
    /// Orders of every term of an identity, or of one quotient, at all cusps.
    Orders {
        target: Option<String>,
        #[arg(long, conflicts_with_all = ["target", "gen"], requires = "level")]
        eta: Option<String>,
        #[arg(long, conflicts_with = "target", requires = "level")]
        gen: Option<String>,
        #[arg(long)]
        level: Option<i64>,
        #[arg(long, value_enum)]
        group: Option<GroupKind>,
    },
    /// Certify an identity with the valence formula.
    Prove {
        target: String,
        /// Refuse to expand past this depth.
        #[arg(long)]
        cap: Option<i64>,
    },
    /// Certify the ten seed identities of the U_5 recursion.
    Upcheck,
    /// Scan a rank parity congruence family.
    Congruence {
        /// mod5 or mod7.
        #[arg(long)]
        theorem: CongruenceFamily,
        #[arg(long)]
        alpha: u32,
        #[arg(long, default_value_t = 0)]
        nmin: i64,
        #[arg(long)]
        nmax: i64,
    },
    /// Run the full reproduction battery.
    Suite,
    /// List the bundled identity specs.
    List,
}

/// Exit codes: 0 success, 1 a check failed, 2 bad input.
enum Outcome {
    Ok,
    CheckFailed,
}

struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

fn load_spec(target: &str) -> Result<IdentitySpec, InputError> {
    let path = Path::new(target);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| InputError(format!("{target}: {e}")))?;
        return parse_spec(&text).map_err(|e| InputError(format!("{target}: {e}")));
    }
    bundled(target).ok_or_else(|| {
        let names: Vec<&str> = BUNDLED.iter().map(|(n, _)| *n).collect();
        InputError(format!("{target}: no such file or bundled spec (bundled: {})", names.join(", ")))
    })
}

fn parse_factors_term(eta: Option<&str>, gen: Option<&str>, level: i64) -> Result<Term, InputError> {
    let text = match (eta, gen) {
        (Some(e), None) => format!("group gamma0 {level}\nterm 1 eta {e}\n"),
        (None, Some(g)) => format!("group gamma1 {level}\nterm 1 gen {g}\n"),
        _ => return Err(InputError("give exactly one of a target, --eta or --gen".into())),
    };
    let spec = parse_spec(&text).map_err(|e| match e {
        // Report columns relative to the factor string.
        Error::Parse { line: 2, column, message } => {
            let prefix = if eta.is_some() { "term 1 eta ".len() } else { "term 1 gen ".len() };
            InputError(format!("column {}: {message}", column.saturating_sub(prefix)))
        }
        other => InputError(other.to_string()),
    })?;
    match spec.body {
        IdentityBody::Zero { terms, .. } => Ok(terms.terms()[0].term.clone()),
        IdentityBody::Up { .. } => unreachable!("factor specs are zero identities"),
    }
}

fn series_json(s: &ExactSeries) -> Value {
    json!({
        "grid": s.grid().to_string(),
        "lo": etaprove::Exponent::new(s.lo_numerator(), s.grid()).to_string(),
        "precision": s.prec().to_string(),
        "coefficients": s.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    })
}

fn group_of(kind: GroupKind, n: i64) -> Group {
    match kind {
        GroupKind::Gamma0 => Group::Gamma0(n),
        GroupKind::Gamma1 => Group::Gamma1(n),
    }
}

fn cmd_expand(
    target: Option<&str>,
    eta: Option<&str>,
    gen: Option<&str>,
    level: Option<i64>,
    depth: i64,
) -> Result<(Value, String, Outcome), InputError> {
    if let Some(t) = target {
        let spec = load_spec(t)?;
        return Ok(match &spec.body {
            IdentityBody::Zero { terms, .. } => {
                let s = expand_combination(terms, depth)?;
                let text = format!("{}: {s}\n", spec.name);
                (json!({"name": spec.name, "combination": series_json(&s)}), text, Outcome::Ok)
            }
            IdentityBody::Up { p, left, right } => {
                let g = expand_combination(left, p * depth)?.u_p(*p)?;
                let f = expand_combination(right, depth)?;
                let text = format!("{}:\nU_{p}(left) = {g}\nright = {f}\n", spec.name);
                (json!({"name": spec.name, "left_up": series_json(&g), "right": series_json(&f)}), text, Outcome::Ok)
            }
        });
    }
    let level = level.ok_or_else(|| InputError("--level is required with --eta/--gen".into()))?;
    let term = parse_factors_term(eta, gen, level)?;
    let s = expand_term(&term, depth);
    Ok((json!({"term": term.to_string(), "series": series_json(&s)}), format!("{s}\n"), Outcome::Ok))
}

fn cmd_cusps(level: i64, kind: GroupKind) -> Result<(Value, String, Outcome), InputError> {
    if level < 1 {
        return Err(InputError(format!("level must be positive, got {level}")));
    }
    let table = CuspTable::for_group(group_of(kind, level));
    let text: String = table.entries.iter().map(|e| format!("{}\twidth {}\n", e.cusp, e.width)).collect();
    Ok((serde_json::to_value(&table.entries).expect("serializable"), text, Outcome::Ok))
}

fn reports_for(terms: &etaprove::LinearCombination, table: &CuspTable, side: &str) -> Vec<OrderReport> {
    terms
        .terms()
        .iter()
        .enumerate()
        .map(|(i, t)| OrderReport::new(format!("{side}{}: {}", i, t.term), &t.term, table))
        .collect()
}

fn cmd_orders(
    target: Option<&str>,
    eta: Option<&str>,
    gen: Option<&str>,
    level: Option<i64>,
    group: Option<GroupKind>,
) -> Result<(Value, String, Outcome), InputError> {
    let reports = if let Some(t) = target {
        let spec = load_spec(t)?;
        match &spec.body {
            IdentityBody::Zero { group, terms } => reports_for(terms, &CuspTable::for_group(*group), "term "),
            IdentityBody::Up { p, left, right } => {
                let mut r = reports_for(left, &CuspTable::for_group(Group::Gamma0(p * right.level())), "left ");
                r.extend(reports_for(right, &CuspTable::for_group(Group::Gamma0(right.level())), "right "));
                r
            }
        }
    } else {
        let level = level.ok_or_else(|| InputError("--level is required with --eta/--gen".into()))?;
        let term = parse_factors_term(eta, gen, level)?;
        let default = if gen.is_some() { GroupKind::Gamma1 } else { GroupKind::Gamma0 };
        let table = CuspTable::for_group(group_of(group.unwrap_or(default), level));
        vec![OrderReport::new(term.to_string(), &term, &table)]
    };
    let mut text = String::new();
    for r in &reports {
        text.push_str(&format!("{} on {}\n", r.term, r.group));
        for row in &r.rows {
            text.push_str(&format!("  {}\twidth {}\tord {}\tORD {}\n", row.cusp, row.width, row.ord, row.big_ord));
        }
    }
    Ok((serde_json::to_value(&reports).expect("serializable"), text, Outcome::Ok))
}

fn cmd_prove(target: &str, depth: Option<i64>, cap: Option<i64>) -> Result<(Value, String, Outcome), InputError> {
    let spec = load_spec(target)?;
    let cert = spec.prove(ProverOptions { depth, cap })?;
    let outcome = if cert.is_proven() { Outcome::Ok } else { Outcome::CheckFailed };
    let text = format!(
        "{}: {}\nB = {}, required depth {}, verified to {}\n",
        spec.name,
        match &cert.verdict {
            etaprove::Verdict::Proven => "proven".to_string(),
            v => format!("{v:?}"),
        },
        cert.b,
        cert.required_depth,
        cert.verified_depth
    );
    Ok((serde_json::to_value(&cert).expect("serializable"), text, outcome))
}

#[derive(Serialize)]
struct SeedReport {
    group: String,
    k: i64,
    poly: String,
    #[serde(rename = "B")]
    b: Option<String>,
    series_terms: Option<i64>,
    status: String,
    error: Option<String>,
}

fn cmd_upcheck() -> Result<(Value, String, Outcome), InputError> {
    use rayon::prelude::*;
    let (gi, gii) = seed_tables();
    let jobs: Vec<(SeedGroup, i64, etaprove::TPoly)> = gi
        .into_iter()
        .map(|(k, p)| (SeedGroup::I, k, p))
        .chain(gii.into_iter().map(|(k, p)| (SeedGroup::II, k, p)))
        .collect();
    let reports: Vec<SeedReport> = jobs
        .par_iter()
        .map(|(g, k, p)| {
            let base = SeedReport {
                group: format!("{g:?}"),
                k: *k,
                poly: p.to_string(),
                b: None,
                series_terms: None,
                status: "failed".into(),
                error: None,
            };
            match certify_seed(*g, *k, p) {
                Ok(c) => SeedReport {
                    b: Some(c.certificate.b.to_string()),
                    series_terms: Some(c.series_terms),
                    status: "proven".into(),
                    ..base
                },
                Err(e) => SeedReport { error: Some(e.to_string()), ..base },
            }
        })
        .collect();
    let ok = reports.iter().all(|r| r.status == "proven");
    let text: String = reports
        .iter()
        .map(|r| format!("group {} k = {}: {} (B = {})\n", r.group, r.k, r.status, r.b.as_deref().unwrap_or("-")))
        .collect();
    let v = json!({"passed": ok, "checks": reports});
    Ok((v, text, if ok { Outcome::Ok } else { Outcome::CheckFailed }))
}

fn cmd_congruence(
    family: CongruenceFamily,
    alpha: u32,
    nmin: i64,
    nmax: i64,
) -> Result<(Value, String, Outcome), InputError> {
    if alpha < 3 {
        return Err(InputError(format!("alpha must be at least 3, got {alpha}")));
    }
    if nmin < 0 || nmax < nmin {
        return Err(InputError(format!("bad range {nmin}..={nmax}")));
    }
    let size = required_table_size(family, alpha, nmax);
    let table = af_table(size as usize);
    let r = check_congruence(family, alpha, (nmin, nmax), &table)?;
    let text = format!(
        "{} alpha = {} mod {}: n in {}..={}: {}\n",
        r.check,
        r.alpha,
        r.modulus,
        nmin,
        nmax,
        if r.passed() { "pass".to_string() } else { format!("{} failures", r.failures.len()) }
    );
    let outcome = if r.passed() { Outcome::Ok } else { Outcome::CheckFailed };
    Ok((serde_json::to_value(&r).expect("serializable"), text, outcome))
}

fn cmd_list() -> (Value, String, Outcome) {
    let names: Vec<&str> = BUNDLED.iter().map(|(n, _)| *n).collect();
    let text = names.iter().map(|n| format!("{n}\n")).collect();
    (json!(names), text, Outcome::Ok)
}

fn run(cli: Cli) -> Result<(Value, String, Outcome), InputError> {
    let depth = cli.depth;
    match &cli.command {
        Command::Expand { target, eta, gen, level } => {
            cmd_expand(target.as_deref(), eta.as_deref(), gen.as_deref(), *level, depth.unwrap_or(20))
        }
        Command::Cusps { level, group } => cmd_cusps(*level, *group),
        Command::Orders { target, eta, gen, level, group } => {
            cmd_orders(target.as_deref(), eta.as_deref(), gen.as_deref(), *level, *group)
        }
        Command::Prove { target, cap } => cmd_prove(target, depth, *cap),
        Command::Upcheck => cmd_upcheck(),
        Command::Congruence { theorem, alpha, nmin, nmax } => cmd_congruence(*theorem, *alpha, *nmin, *nmax),
        Command::Suite => Ok(suite::run(depth.unwrap_or(suite::DEFAULT_SERIES_DEPTH))),
        Command::List => Ok(cmd_list()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let format = cli.format;
    let out = cli.out.clone();
    match run(cli) {
        Ok((value, text, outcome)) => {
            let body = match format {
                Format::Json => serde_json::to_string_pretty(&value).expect("serializable") + "\n",
                Format::Text => text,
            };
            let written = match &out {
                Some(path) => fs::write(path, body.as_bytes()),
                None => std::io::stdout().lock().write_all(body.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            match outcome {
                Outcome::Ok => ExitCode::SUCCESS,
                Outcome::CheckFailed => ExitCode::from(1),
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
