use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use tenstruct::generators::{generate, GenClass, GenSpec};
use tenstruct::p_analysis::DEFAULT_MAX_EVALS;
use tenstruct::structure::b_classify;
use tenstruct::{
    alpha_estimate, classify, definiteness_check, h_eigenpairs, p_classify, parse_tensor, row_norm_bound,
    tensor_to_json, z_eigenpairs, DenseTensor, EigenConfig, IndexSet, Operator, SearchConfig, Tolerance,
};

use crate::{Command, Format, KindArg, MethodArg, OpArg, SearchArgs};

pub const MAX_EVALS_VAR: &str = "TENSTRUCT_MAX_EVALS";

#[derive(Debug)]
pub enum CliError {
    Io { path: PathBuf, source: std::io::Error },
    Usage(String),
    Lib(tenstruct::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use tenstruct::Error as E;
        match self {
            CliError::Io { .. } | CliError::Usage(_) => 2,
            CliError::Lib(E::ResourceLimit { .. }) => 3,
            CliError::Lib(E::NonConvergence { .. } | E::InternalDisagreement(_)) => 1,
            CliError::Lib(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, source } if source.kind() == std::io::ErrorKind::NotFound => {
                write!(f, "file not found: {}", path.display())
            }
            CliError::Io { path, source } => write!(f, "cannot read {}: {source}", path.display()),
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Lib(e) => write!(f, "[{}] {e}", e.module()),
        }
    }
}

impl From<tenstruct::Error> for CliError {
    fn from(e: tenstruct::Error) -> Self {
        CliError::Lib(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read_tensor(path: &Path) -> Result<DenseTensor> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    Ok(parse_tensor(&text)?)
}

fn max_evals() -> Result<u64> {
    match std::env::var(MAX_EVALS_VAR) {
        Err(_) => Ok(DEFAULT_MAX_EVALS),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{MAX_EVALS_VAR} must be a non-negative integer, got {v:?}"))),
    }
}

fn search_config(args: &SearchArgs) -> Result<SearchConfig> {
    let cfg = match args.method {
        MethodArg::Grid => SearchConfig::grid(args.h),
        MethodArg::Multistart => SearchConfig::multistart(args.starts, args.iters, args.seed),
    }
    .with_max_evals(max_evals()?);
    cfg.validate()?;
    Ok(cfg)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Adds the toolkit version and the effective configuration to a report.
fn report(body: Value, config: Value) -> Value {
    let mut map = match body {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    map.insert("version".into(), Value::String(tenstruct::VERSION.into()));
    map.insert("config".into(), config);
    Value::Object(map)
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            if let Value::Object(map) = v {
                for (k, val) in map {
                    let shown = match val {
                        Value::String(t) => t.clone(),
                        other => other.to_string(),
                    };
                    s.push_str(&format!("{k}: {shown}\n"));
                }
            }
            s
        }
    }
}

pub fn run(cmd: &Command, format: Format) -> Result<String> {
    match cmd {
        Command::Classify { input, tol } => {
            let a = read_tensor(input)?;
            let tol = Tolerance::new(*tol)?;
            let mut body = to_value(&classify(&a, tol)?);
            body["b_class"] = to_value(&b_classify(&a, tol)?.class);
            body["row_norm_bound"] = to_value(&row_norm_bound(&a));
            Ok(render(&report(body, json!({ "tol": tol.eps() })), format))
        }
        Command::Alpha { input, op, search } => {
            let a = read_tensor(input)?;
            let cfg = search_config(search)?;
            let op = match op {
                OpArg::T => Operator::T,
                OpArg::F => Operator::F,
            };
            let est = alpha_estimate(&a, op, &cfg)?;
            let mut config = to_value(&cfg);
            config["op"] = to_value(&op);
            Ok(render(&report(to_value(&est), config), format))
        }
        Command::Pcheck { input, search } => {
            let a = read_tensor(input)?;
            let cfg = search_config(search)?;
            let verdict = p_classify(&a, &cfg)?;
            let mut body = to_value(&verdict);
            body["label"] = Value::String(verdict.label().into());
            Ok(render(&report(body, to_value(&cfg)), format))
        }
        Command::Eig { input, kind, starts, iters, seed, tol } => {
            let a = read_tensor(input)?;
            let cfg = EigenConfig { starts: *starts, iters: *iters, seed: *seed, tol: *tol, ..EigenConfig::default() };
            let set = match kind {
                KindArg::H => h_eigenpairs(&a, &cfg)?,
                KindArg::Z => z_eigenpairs(&a, &cfg)?,
            };
            let mut body = to_value(&set);
            body["definiteness"] = to_value(&definiteness_check(&a, &cfg)?);
            Ok(render(&report(body, to_value(&cfg)), format))
        }
        Command::Subtensor { input, indices } => {
            let a = read_tensor(input)?;
            let j = IndexSet::from_one_based(indices, a.dim())?;
            Ok(tensor_to_json(&a.principal_subtensor(&j)?))
        }
        Command::Gen { class, m, n, seed, count, scale, dir } => {
            let class = GenClass::parse(class).ok_or_else(|| {
                let names: Vec<&str> = GenClass::ALL.iter().map(|c| c.as_str()).collect();
                CliError::Usage(format!("unknown class {class:?}; expected one of {}", names.join(", ")))
            })?;
            std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
            let mut files = Vec::new();
            for k in 0..*count {
                let spec = GenSpec { m: *m, n: *n, class, seed: seed.wrapping_add(k), scale: *scale };
                let a = generate(&spec)?;
                let path = dir.join(spec.file_name());
                std::fs::write(&path, tensor_to_json(&a)).map_err(|source| CliError::Io { path: path.clone(), source })?;
                files.push(path.display().to_string());
            }
            let config = json!({ "class": class.as_str(), "m": m, "n": n, "seed": seed, "count": count, "scale": scale });
            Ok(render(&report(json!({ "files": files }), config), format))
        }
    }
}
