use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use padic_frob::catalog::{build, dwork_congruence_check, p_lucas_check, SeriesSpec, SeriesSpecJson};
use padic_frob::dependence::{kolchin_scan, NamedSeries, ScanParams};
use padic_frob::frobenius::{
    antecedent_chain, frobenius_ratio_certificate, integrality_check, logderiv_certificate,
    period_ratio_certificate, ratio_certificate,
};
use padic_frob::{DiffOp, Error, Field, OperatorJson, Ramification, TruncSeries};

#[derive(Parser)]
#[command(name = "padic-frob", version, about = "p-adic Frobenius antecedents, congruence certificates and dependence scans")]
struct Cli {
    /// Emit JSON instead of an aligned table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Source {
    /// Catalog series: hyp:a1,a2,..  apery  bessel  exp  ffrak
    #[arg(long)]
    series: Option<String>,
    /// Operator JSON file; the series is its unit solution.
    #[arg(long, conflicts_with_all = ["series", "spec"])]
    operator: Option<PathBuf>,
    /// SeriesSpec JSON file.
    #[arg(long, conflicts_with = "series")]
    spec: Option<PathBuf>,
    #[arg(long)]
    prime: Option<u64>,
    #[arg(long, value_enum, default_value_t = Ram::Unramified)]
    ramification: Ram,
    /// Truncation order N.
    #[arg(long, default_value_t = 60)]
    order: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ram {
    Unramified,
    Dwork,
}

impl From<Ram> for Ramification {
    fn from(r: Ram) -> Self {
        match r {
            Ram::Unramified => Ramification::Unramified,
            Ram::Dwork => Ramification::DworkEisenstein,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum CertKind {
    /// D_m: f == D_m(z) Cartier(f)(z^p)
    D,
    /// Q_k: Q_k == Cartier^(kh)(f) / f
    Q,
    /// B_kh: f == B_kh(z) f(z^(p^(kh)))
    B,
}

#[derive(Subcommand)]
enum Command {
    /// Build a series and print its coefficients.
    Gen {
        #[command(flatten)]
        src: Source,
    },
    /// Valuations of f_1 .. f_(p^m - 1).
    CheckIntegrality {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 3)]
        level: u32,
    },
    /// f == F_(p-1)(z) f(z^p) mod p.
    CheckLucas {
        #[command(flatten)]
        src: Source,
    },
    /// f F_(s-1)(z^p) == F_s f(z^p) mod p^s.
    CheckDwork {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 1)]
        s: u32,
    },
    /// Frobenius antecedent chain L_1, ..., L_m with verified passage matrices.
    Antecedent {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 1)]
        levels: u32,
        /// Operator coefficients shown per level.
        #[arg(long, default_value_t = 4)]
        head: usize,
    },
    /// Rational congruence certificate D_m, Q_k or B_kh.
    CertifyRatio {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_enum, default_value_t = CertKind::D)]
        kind: CertKind,
        /// Level m for D_m.
        #[arg(long, default_value_t = 1)]
        level: i64,
        /// Period h; defaults to the catalog period.
        #[arg(long)]
        period: Option<u32>,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 8)]
        deg_bound: usize,
    },
    /// Rational R == f'/f mod pi^M.
    CertifyLogderiv {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 1)]
        level: i64,
        #[arg(long)]
        period: Option<u32>,
        #[arg(long, default_value_t = 8)]
        deg_bound: usize,
    },
    /// Multiplicative dependence scan over an exponent box.
    Scan {
        /// Repeat for each input series.
        #[arg(long, required_unless_present = "operator")]
        series: Vec<String>,
        #[arg(long)]
        operator: Vec<PathBuf>,
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum, default_value_t = Ram::Unramified)]
        ramification: Ram,
        #[arg(long, default_value_t = 60)]
        order: usize,
        #[arg(long, default_value_t = 2)]
        exp_bound: i64,
        #[arg(long, default_value_t = 2)]
        level: i64,
        #[arg(long, default_value_t = 8)]
        deg_bound: usize,
        /// Comma-separated derivative orders, one per input.
        #[arg(long, value_delimiter = ',')]
        derivatives: Option<Vec<usize>>,
    },
}

struct Loaded {
    id: String,
    series: TruncSeries,
    operator: Option<DiffOp>,
    period: usize,
    warnings: Vec<String>,
    request: Value,
}

fn field_of(prime: Option<u64>, ram: Ramification) -> Result<Field, Error> {
    let p = prime.ok_or_else(|| Error::BadParameters("--prime is required".into()))?;
    Field::new(p, ram)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_operator(path: &PathBuf, prime: Option<u64>, ram: Ramification, order: usize) -> Result<Loaded, Error> {
    let json: OperatorJson = read_json(path)?;
    let field = field_of(prime.or(json.p), json.ramification.unwrap_or(ram))?;
    let op = DiffOp::from_json(field, &json, order)?;
    let series = op.unit_solution(order)?;
    Ok(Loaded {
        id: path.display().to_string(),
        request: json!({"operator": json, "p": field.prime(), "ramification": field.ramification(), "N": order}),
        series,
        operator: Some(op),
        period: 1,
        warnings: Vec::new(),
    })
}

fn load_spec(spec: SeriesSpec) -> Result<Loaded, Error> {
    let built = build(&spec)?;
    Ok(Loaded {
        id: spec.kind.to_string(),
        request: serde_json::to_value(spec.to_json()).expect("serializable"),
        series: built.series,
        operator: built.operator,
        period: built.period,
        warnings: built.warnings,
    })
}

fn load(src: &Source) -> Result<Loaded, Error> {
    let ram = Ramification::from(src.ramification);
    if let Some(path) = &src.operator {
        return load_operator(path, src.prime, ram, src.order);
    }
    if let Some(path) = &src.spec {
        let json: SeriesSpecJson = read_json(path)?;
        return load_spec(SeriesSpec::from_json(&json)?);
    }
    let kind = src
        .series
        .as_deref()
        .ok_or_else(|| Error::BadParameters("one of --series, --spec, --operator is required".into()))?;
    load_spec(SeriesSpec::new(kind.parse()?, field_of(src.prime, ram)?, src.order))
}

fn require_operator(l: &Loaded) -> Result<&DiffOp, Error> {
    l.operator
        .as_ref()
        .ok_or_else(|| Error::BadParameters(format!("{} has no catalog operator", l.id)))
}

/// Result body and whether the requested verification passed.
fn run(cmd: &Command) -> Result<(Value, Value, bool), Error> {
    match cmd {
        Command::Gen { src } => {
            let l = load(src)?;
            let body = json!({
                "series": l.series.to_json(),
                "period": l.period,
                "has_operator": l.operator.is_some(),
                "warnings": l.warnings,
            });
            Ok((l.request, body, true))
        }
        Command::CheckIntegrality { src, level } => {
            let l = load(src)?;
            let r = integrality_check(&l.series, *level)?;
            let pass = r.pass;
            Ok((with(l.request, json!({"level": level})), to(&r), pass))
        }
        Command::CheckLucas { src } => {
            let l = load(src)?;
            let r = p_lucas_check(&l.series)?;
            let pass = r.pass;
            Ok((l.request, to(&r), pass))
        }
        Command::CheckDwork { src, s } => {
            let l = load(src)?;
            let r = dwork_congruence_check(&l.series, *s)?;
            let pass = r.pass;
            Ok((with(l.request, json!({"s": s})), to(&r), pass))
        }
        Command::Antecedent { src, levels, head } => {
            let l = load(src)?;
            let op = require_operator(&l)?;
            let chain = antecedent_chain(op, *levels, src.order)?;
            let reports: Vec<_> = chain.iter().map(|c| c.report(*head)).collect();
            Ok((with(l.request, json!({"levels": levels})), json!({ "levels": reports }), true))
        }
        Command::CertifyRatio {
            src,
            kind,
            level,
            period,
            k,
            deg_bound,
        } => {
            let l = load(src)?;
            let h = period.unwrap_or(l.period as u32);
            let cert = match kind {
                CertKind::D => ratio_certificate(&l.series, *level, *deg_bound)?,
                CertKind::Q => period_ratio_certificate(&l.series, h, *k, *deg_bound)?,
                CertKind::B => frobenius_ratio_certificate(&l.series, h, *k, *deg_bound)?,
            };
            let label = match kind {
                CertKind::D => "D_m",
                CertKind::Q => "Q_k",
                CertKind::B => "B_kh",
            };
            let req = with(l.request, json!({"kind": kind, "level": level, "period": h, "k": k, "deg_bound": deg_bound}));
            Ok((req, to(&cert.report(label)), true))
        }
        Command::CertifyLogderiv {
            src,
            level,
            period,
            deg_bound,
        } => {
            let l = load(src)?;
            let h = period.unwrap_or(l.period as u32);
            let cert = logderiv_certificate(&l.series, h, *level, *deg_bound)?;
            let req = with(l.request, json!({"level": level, "period": h, "deg_bound": deg_bound}));
            Ok((req, to(&cert.report("logderiv")), true))
        }
        Command::Scan {
            series,
            operator,
            prime,
            ramification,
            order,
            exp_bound,
            level,
            deg_bound,
            derivatives,
        } => {
            let ram = Ramification::from(*ramification);
            let field = Field::new(*prime, ram)?;
            let mut inputs = Vec::new();
            for s in series {
                // one extra coefficient per derivative keeps the common order at N
                let extra = derivatives.as_ref().and_then(|d| d.get(inputs.len())).copied().unwrap_or(0);
                let l = load_spec(SeriesSpec::new(s.parse()?, field, order + extra))?;
                inputs.push(NamedSeries { name: l.id, series: l.series });
            }
            for path in operator {
                let extra = derivatives.as_ref().and_then(|d| d.get(inputs.len())).copied().unwrap_or(0);
                let l = load_operator(path, Some(*prime), ram, order + extra)?;
                inputs.push(NamedSeries { name: l.id, series: l.series });
            }
            let params = ScanParams {
                exp_bound: *exp_bound,
                level: *level,
                deg_bound: *deg_bound,
                derivative_orders: derivatives.clone(),
            };
            let report = kolchin_scan(&inputs, &params)?;
            let req = json!({
                "series": series,
                "operator": operator.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
                "p": prime,
                "ramification": ram,
                "N": order,
            });
            Ok((req, to(&report), true))
        }
    }
}

fn to<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn with(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Gen { .. } => "gen",
        Command::CheckIntegrality { .. } => "check-integrality",
        Command::CheckLucas { .. } => "check-lucas",
        Command::CheckDwork { .. } => "check-dwork",
        Command::Antecedent { .. } => "antecedent",
        Command::CertifyRatio { .. } => "certify-ratio",
        Command::CertifyLogderiv { .. } => "certify-logderiv",
        Command::Scan { .. } => "scan",
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// Aligned `key  value` rows; nested objects and arrays of objects are indented.
fn table(v: &Value, indent: usize, out: &mut String) {
    let Value::Object(map) = v else {
        out.push_str(&format!("{:indent$}{}\n", "", scalar(v)));
        return;
    };
    let width = map.keys().map(String::len).max().unwrap_or(0);
    for (k, val) in map {
        match val {
            Value::Object(_) => {
                out.push_str(&format!("{:indent$}{k}\n", ""));
                table(val, indent + 2, out);
            }
            Value::Array(items) if items.iter().any(Value::is_object) => {
                out.push_str(&format!("{:indent$}{k}\n", ""));
                for (i, item) in items.iter().enumerate() {
                    out.push_str(&format!("{:w$}[{i}]\n", "", w = indent + 2));
                    table(item, indent + 4, out);
                }
            }
            _ => out.push_str(&format!("{:indent$}{k:<width$}  {}\n", "", scalar(val))),
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BadParameters(_) | Error::Parse(_) | Error::InvalidContext(_) | Error::BadContext(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("PADIC_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let command = name(&cli.command);
    match run(&cli.command) {
        Ok((request, result, pass)) => {
            let doc = json!({"command": command, "request": request, "pass": pass, "result": result});
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            } else {
                let mut out = String::new();
                table(&doc, 0, &mut out);
                print!("{out}");
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let code = exit_code(&e);
            if cli.json {
                let doc = json!({"command": command, "pass": false, "error": e.to_string()});
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            }
            eprintln!("padic-frob {command}: {e}");
            ExitCode::from(code)
        }
    }
}
