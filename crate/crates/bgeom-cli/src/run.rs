//! Command dispatch. Every invocation reads one surface file, runs one
//! engine operation and prints a single-line JSON report with sorted
//! keys: `{"command", "exact": true, "input_hash", "result"}` on
//! success, with `error: {code, message}` replacing `result` on failure.
//! Exit codes: 0 success, 1 domain error, 2 usage or parse error.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use bgeom::lattice::{DivisorClass, SurfaceModel};
use bgeom::pairs::{classify, discrepancies, pair_volume, PairClass};
use bgeom::positivity::{volume, zariski};
use bgeom::rat::{format_rat, is_zero, parse_rat, rint, Rat};
use bgeom::BoundInstance;

use crate::expr::parse_divisor;
use crate::surface_file::{Built, SurfaceFile};
use crate::CliError;

pub struct Output {
    pub code: i32,
    pub stdout: String,
}

struct Invocation {
    command: String,
    which: Option<String>,
    file: String,
    flags: BTreeMap<String, String>,
    strict: bool,
    birational: bool,
}

const VALUE_FLAGS: &[&str] = &[
    "-D", "-D1", "-D2", "-M", "-H", "-F", "--m0", "--delta", "--e",
];
const BOOL_FLAGS: &[&str] = &["--strict", "--birational"];

fn parse_args<S: AsRef<str>>(args: &[S]) -> Result<Invocation, CliError> {
    let mut positionals: Vec<String> = Vec::new();
    let mut flags = BTreeMap::new();
    let mut strict = false;
    let mut birational = false;
    let mut i = 0;
    while i < args.len() {
        let arg = args[i].as_ref();
        if VALUE_FLAGS.contains(&arg) {
            let value = args
                .get(i + 1)
                .ok_or_else(|| CliError::Usage(format!("flag `{arg}` requires a value")))?;
            flags.insert(arg.to_string(), value.as_ref().to_string());
            i += 2;
        } else if BOOL_FLAGS.contains(&arg) {
            match arg {
                "--strict" => strict = true,
                _ => birational = true,
            }
            i += 1;
        } else if arg.starts_with('-') && arg.len() > 1 {
            return Err(CliError::Usage(format!("unknown flag `{arg}`")));
        } else {
            positionals.push(arg.to_string());
            i += 1;
        }
    }
    let mut positionals = positionals.into_iter();
    let command = positionals
        .next()
        .ok_or_else(|| CliError::Usage(usage_text()))?;
    let which = if command == "bounds" {
        Some(positionals.next().ok_or_else(|| {
            CliError::Usage("bounds requires a proposition: hb, hm, m2 or hg".to_string())
        })?)
    } else {
        None
    };
    let file = positionals
        .next()
        .ok_or_else(|| CliError::Usage(format!("command `{command}` requires a surface file")))?;
    if let Some(extra) = positionals.next() {
        return Err(CliError::Usage(format!("unexpected argument `{extra}`")));
    }
    Ok(Invocation {
        command,
        which,
        file,
        flags,
        strict,
        birational,
    })
}

fn usage_text() -> String {
    "usage: bgeom <command> <file.json> [flags]\n\
     commands: check | intersect -D1 <expr> -D2 <expr> | zariski -D <expr> |\n\
     volume -D <expr> | pair-volume | discrepancies | classify [--strict] |\n\
     descend -M <expr> | bounds <hb|hm|m2|hg> [-H <expr>] [-F <expr>]\n\
     [--m0 <int>] [--delta <p/q>] [--e <p/q>] [--birational]"
        .to_string()
}

fn class_json(names: &[String], d: &DivisorClass) -> Value {
    let mut map = Map::new();
    for (name, coeff) in names.iter().zip(d.coeffs()) {
        if !is_zero(coeff) {
            map.insert(name.clone(), json!(format_rat(coeff)));
        }
    }
    Value::Object(map)
}

fn required_flag<'a>(inv: &'a Invocation, flag: &str) -> Result<&'a str, CliError> {
    inv.flags
        .get(flag)
        .map(|s| s.as_str())
        .ok_or_else(|| CliError::Usage(format!("`{}` requires the flag `{flag}`", inv.command)))
}

/// Splits `a*X + b*Y - Z` into signed (coefficient, name) terms.
fn split_terms(input: &str) -> Result<Vec<(Rat, String)>, CliError> {
    let mut terms = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for c in input.chars().chain(['+']) {
        if c == '+' || c == '-' {
            let t = current.trim();
            if !t.is_empty() {
                let (coeff, name) = match t.split_once('*') {
                    Some((c, n)) => (
                        parse_rat(c.trim()).map_err(CliError::Usage)?,
                        n.trim().to_string(),
                    ),
                    None => (rint(1), t.to_string()),
                };
                terms.push((if negative { -coeff } else { coeff }, name));
            } else if !terms.is_empty() || negative {
                return Err(CliError::Usage(format!("empty term in `{input}`")));
            }
            negative = c == '-';
            current.clear();
        } else {
            current.push(c);
        }
    }
    Ok(terms)
}

/// Parses a support expression — a nonnegative combination of tracked
/// curve names — into a coefficient map.
fn parse_support(model: &SurfaceModel, input: &str) -> Result<BTreeMap<String, Rat>, CliError> {
    let mut out: BTreeMap<String, Rat> = BTreeMap::new();
    for (coeff, name) in split_terms(input)? {
        if model.curve(&name).is_none() {
            return Err(CliError::Usage(format!(
                "support expressions use tracked curve names; `{name}` is not one"
            )));
        }
        let entry = out.entry(name).or_insert_with(|| rint(0));
        *entry = &*entry + &coeff;
    }
    for (name, coeff) in &out {
        if coeff < &rint(0) {
            return Err(CliError::Usage(format!(
                "support coefficient of `{name}` must be nonnegative"
            )));
        }
    }
    out.retain(|_, c| !is_zero(c));
    Ok(out)
}

fn dispatch(inv: &Invocation, file: &SurfaceFile, built: &Built) -> Result<Value, CliError> {
    let model = &built.model;
    match inv.command.as_str() {
        "check" => {
            let mut v = Map::new();
            v.insert("valid".into(), json!(true));
            v.insert("base".into(), json!(model.base().name()));
            v.insert("rank".into(), json!(model.rank()));
            v.insert("basis".into(), json!(model.basis_names()));
            v.insert(
                "tracked_curves".into(),
                json!(model
                    .curves()
                    .iter()
                    .map(|c| c.name.clone())
                    .collect::<Vec<_>>()),
            );
            if let Some(c) = &built.contraction {
                v.insert("contracted".into(), json!(c.contracted()));
                v.insert("log_resolution".into(), json!(c.is_log_resolution()));
            }
            v.insert("has_pair".into(), json!(file.pair.is_some()));
            Ok(Value::Object(v))
        }
        "intersect" => {
            let d1 = parse_divisor(model, required_flag(inv, "-D1")?)?;
            let d2 = parse_divisor(model, required_flag(inv, "-D2")?)?;
            let product = model.intersect(&d1, &d2)?;
            Ok(json!(format_rat(&product)))
        }
        "zariski" => {
            let d = parse_divisor(model, required_flag(inv, "-D")?)?;
            let z = zariski(model, &d)?;
            Ok(json!({
                "P": class_json(model.basis_names(), &z.p),
                "N": class_json(model.basis_names(), &z.n),
                "support": z.support,
            }))
        }
        "volume" => {
            let d = parse_divisor(model, required_flag(inv, "-D")?)?;
            let v = volume(model, &d)?;
            Ok(json!(format_rat(&v)))
        }
        "pair-volume" => {
            if file.pair.is_none() {
                return Err(CliError::domain(
                    "PreconditionUnmet",
                    "pair-volume requires a pair section",
                ));
            }
            let pair = file.gen_pair(built)?;
            let v = pair_volume(&pair)?;
            Ok(json!(format_rat(&v)))
        }
        "discrepancies" => {
            let contraction = built.contraction.as_ref().ok_or_else(|| {
                CliError::domain(
                    "PreconditionUnmet",
                    "discrepancies requires a contraction section",
                )
            })?;
            let pair = file.gen_pair(built)?;
            let values = discrepancies(contraction, pair.boundary(), pair.nef_part())?;
            let mut map = Map::new();
            for (name, a) in values {
                map.insert(name, json!(format_rat(&a)));
            }
            Ok(Value::Object(map))
        }
        "classify" => {
            let pair = file.gen_pair(built)?;
            let verdict = classify(&pair)?;
            if inv.strict && verdict == PairClass::NotGlc {
                return Err(CliError::domain(
                    "NotGlc",
                    "pair is not generalized log canonical (strict mode)",
                ));
            }
            Ok(json!({ "verdict": verdict.as_str() }))
        }
        "descend" => {
            let m = parse_divisor(model, required_flag(inv, "-M")?)?;
            let result = bgeom::descent::descend_nef(model, &m)?;
            Ok(json!({
                "blowup_count": result.blowup_count,
                "contracted": result.contractions_performed,
                "drop_bound": format_rat(&result.drop_bound),
                "m_prime": class_json(
                    result.intermediate_model.basis_names(),
                    &result.m_prime
                ),
                "rank": result.intermediate_model.rank(),
            }))
        }
        "bounds" => {
            if built.contraction.is_some() {
                return Err(CliError::domain(
                    "PreconditionUnmet",
                    "bounds evaluate on a smooth model; remove the contraction section",
                ));
            }
            let pair = file.gen_pair(built)?;
            let h = match inv.flags.get("-H") {
                Some(expr) => parse_divisor(model, expr)?,
                None => model.zero_divisor(),
            };
            let f_part = match inv.flags.get("-F") {
                Some(expr) => parse_support(model, expr)?,
                None => BTreeMap::new(),
            };
            let m0: u32 = inv
                .flags
                .get("--m0")
                .map(|v| v.parse())
                .transpose()
                .map_err(|_| CliError::Usage("--m0 must be a positive integer".to_string()))?
                .unwrap_or(1);
            let flag_rat = |key: &str, num: i64, den: i64| -> Result<Rat, CliError> {
                match inv.flags.get(key) {
                    Some(v) => parse_rat(v).map_err(CliError::Usage),
                    None => Ok(Rat::new(num.into(), den.into())),
                }
            };
            let delta = flag_rat("--delta", 1, 2)?;
            let e_param = flag_rat("--e", 1, 2)?;
            let instance = BoundInstance::new(
                model.clone(),
                pair.boundary().clone(),
                pair.nef_part().clone(),
                h,
                f_part,
                m0,
                delta,
                e_param,
                inv.birational,
            )?;
            let report = match inv.which.as_deref().unwrap_or("") {
                "hb" => bgeom::bounds::check_bound_hb(&instance)?,
                "hm" => bgeom::bounds::check_bound_hm(&instance)?,
                "m2" => bgeom::bounds::check_bound_m2(&instance)?,
                "hg" => bgeom::bounds::check_bound_hg(&instance)?,
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown bound `{other}` (expected hb, hm, m2 or hg)"
                    )))
                }
            };
            Ok(json!({
                "lhs": format_rat(&report.lhs),
                "rhs": format_rat(&report.rhs),
                "holds": report.holds,
            }))
        }
        other => Err(CliError::Usage(format!(
            "unknown command `{other}`\n{}",
            usage_text()
        ))),
    }
}

fn emit(command: Option<&str>, hash: Option<&str>, body: Result<Value, CliError>) -> Output {
    let mut map = Map::new();
    if let Some(c) = command {
        map.insert("command".into(), json!(c));
    }
    map.insert("exact".into(), json!(true));
    map.insert(
        "input_hash".into(),
        hash.map(|h| json!(h)).unwrap_or(Value::Null),
    );
    match body {
        Ok(result) => {
            map.insert("result".into(), result);
            Output {
                code: 0,
                stdout: Value::Object(map).to_string(),
            }
        }
        Err(e) => {
            map.insert(
                "error".into(),
                json!({ "code": e.code(), "message": e.message() }),
            );
            Output {
                code: e.exit_code(),
                stdout: Value::Object(map).to_string(),
            }
        }
    }
}

/// Runs one CLI invocation (arguments without the binary name) and
/// returns the exit code plus the JSON report.
pub fn run<S: AsRef<str>>(args: &[S]) -> Output {
    let inv = match parse_args(args) {
        Ok(inv) => inv,
        Err(e) => return emit(None, None, Err(e)),
    };
    let bytes = match std::fs::read(&inv.file) {
        Ok(b) => b,
        Err(io) => {
            return emit(
                Some(&inv.command),
                None,
                Err(CliError::Usage(format!("cannot read `{}`: {io}", inv.file))),
            )
        }
    };
    let hash = format!("sha256:{}", hex_digest(&bytes));
    let body = SurfaceFile::parse(&bytes).and_then(|file| {
        let built = file.build()?;
        dispatch(&inv, &file, &built)
    });
    emit(Some(&inv.command), Some(&hash), body)
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
