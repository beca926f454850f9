//! `--config FILE`: a JSON object keyed by flag names. Each key whose flag is
//! absent from the command line is appended as that flag, so flags win and clap
//! validates config values exactly like typed ones.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{ArgMatches, Command};
use serde_json::Value;

fn config_path(matches: &ArgMatches) -> Option<PathBuf> {
    let (_, sub) = matches.subcommand()?;
    sub.get_one::<PathBuf>("config").cloned()
}

fn render(key: &str, v: &Value) -> Result<Option<String>, String> {
    Ok(Some(match v {
        Value::Null => return Ok(None),
        Value::Bool(_) => unreachable!(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let parts: Result<Vec<String>, String> = items
                .iter()
                .map(|x| match x {
                    Value::Number(n) => Ok(n.to_string()),
                    Value::String(s) => Ok(s.clone()),
                    _ => Err(format!("config key `{key}`: arrays may hold only numbers and strings")),
                })
                .collect();
            parts?.join(",")
        }
        Value::Object(_) => return Err(format!("config key `{key}`: nested objects are not accepted")),
    }))
}

/// The argument vector with config entries appended, or `argv` unchanged when
/// there is no `--config`.
pub fn merged_argv(cmd: &Command, argv: Vec<OsString>, matches: &ArgMatches) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(matches) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    let json: Value = serde_json::from_str(&text).map_err(|e| format!("parsing {}: {e}", path.display()))?;
    let Value::Object(map) = json else {
        return Err(format!("{}: the config must be a JSON object", path.display()));
    };
    let (name, sub_matches) = matches.subcommand().expect("a subcommand is required");
    let sub = cmd.find_subcommand(name).expect("parsed subcommand exists");

    let mut out = argv;
    for (key, v) in &map {
        let flag = key.replace('_', "-");
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(flag.as_str())) else {
            return Err(format!("config key `{key}` is not a flag of `{name}`"));
        };
        if flag == "config" {
            return Err("config files cannot name another config".into());
        }
        let id = arg.get_id().as_str();
        if sub_matches.value_source(id) == Some(ValueSource::CommandLine) {
            continue;
        }
        match v {
            Value::Bool(true) => out.push(format!("--{flag}").into()),
            Value::Bool(false) => {}
            other => {
                if let Some(s) = render(key, other)? {
                    out.push(format!("--{flag}").into());
                    out.push(s.into());
                }
            }
        }
    }
    Ok(out)
}
