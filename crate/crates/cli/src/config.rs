//! Config files, presets and sidecars.
//!
//! A config file holds `flag = value` lines whose keys are the long flag
//! names. Keys before any section apply to every command that has that
//! flag; keys under `[param-plane]` etc. apply to that command only.
//! Values are spliced into the argument list ahead of the real flags, so a
//! flag given on the command line always wins; a preset's values go in
//! first of all.

use crate::CliError;
use clap::CommandFactory;
use ini::Ini;
use serde::Serialize;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

/// Named figure layouts: `(command, name, flags)`.
pub const PRESETS: &[(&str, &str, &[(&str, &str)])] = &[
    (
        "param-plane",
        "four-one-parameter-plane",
        &[("family", "general"), ("n", "4"), ("k", "1"), ("window", "-3.2,3.2,-3.2,3.2"), ("res", "1501x1501")],
    ),
    (
        "param-plane",
        "behl-parameter-plane",
        &[("family", "behl"), ("window", "-50,10,-15,15"), ("res", "3001x1501")],
    ),
    (
        "param-plane",
        "three-five-parameter-plane",
        &[("family", "general"), ("n", "3"), ("k", "5"), ("window", "-70,70,-70,70"), ("res", "1501x1501")],
    ),
    (
        "dyn-plane",
        "pole-holes-dynamical-plane",
        &[("a", "3"), ("n", "4"), ("k", "1"), ("window", "-1.1,1.1,-1.1,1.1"), ("res", "1501x1501")],
    ),
    (
        "dyn-plane",
        "attracting-one-dynamical-plane",
        &[("a", "1.6666666666666667"), ("n", "4"), ("k", "1"), ("window", "-1.2,2,-1.6,1.6"), ("res", "1501x1501")],
    ),
    (
        "dyn-plane",
        "small-basin-dynamical-plane",
        &[("a", "-10"), ("n", "3"), ("k", "5"), ("window", "-0.01,0.01,-0.01,0.01"), ("res", "1501x1501")],
    ),
    (
        "dyn-plane",
        "monomial-dynamical-plane",
        &[("a", "0"), ("n", "4"), ("k", "1"), ("window", "-2,2,-2,2"), ("res", "1501x1501")],
    ),
];

pub fn preset_names(command: &str) -> Vec<&'static str> {
    PRESETS.iter().filter(|p| p.0 == command).map(|p| p.1).collect()
}

/// Long flag names of a subcommand and whether each takes a value.
fn flags_of(command: &str) -> Option<Vec<(String, bool)>> {
    let root = crate::Cli::command();
    let sub = root.find_subcommand(command)?;
    Some(
        sub.get_arguments()
            .filter_map(|a| a.get_long().map(|l| (l.to_string(), a.get_action().takes_values())))
            .collect(),
    )
}

fn all_flags() -> BTreeSet<String> {
    crate::Cli::command()
        .get_subcommands()
        .flat_map(|s| s.get_arguments().filter_map(|a| a.get_long().map(str::to_string)).collect::<Vec<_>>())
        .collect()
}

/// Value of `--name` in raw arguments, in either `--name v` or `--name=v` form.
fn find_flag(args: &[String], name: &str) -> Option<String> {
    let long = format!("--{name}");
    let mut found = None;
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if *a == long {
            found = it.next().cloned();
        } else if let Some(v) = a.strip_prefix(&format!("{long}=")) {
            found = Some(v.to_string());
        }
    }
    found
}

fn to_args(command: &str, pairs: &[(String, String)], origin: &str) -> Result<Vec<String>, CliError> {
    let flags = flags_of(command).unwrap_or_default();
    let mut out = Vec::new();
    for (key, value) in pairs {
        let Some((_, takes_value)) = flags.iter().find(|(f, _)| f == key) else {
            return Err(CliError::Usage(format!("{origin}: `{key}` is not a flag of {command}")));
        };
        if *takes_value {
            out.push(format!("--{key}={value}"));
        } else {
            match value.as_str() {
                "true" | "yes" | "1" => out.push(format!("--{key}")),
                "false" | "no" | "0" => {}
                v => return Err(CliError::Usage(format!("{origin}: `{key}` expects true or false, got {v:?}"))),
            }
        }
    }
    Ok(out)
}

fn read_config(path: &Path, command: &str) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let ini = Ini::load_from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let own: BTreeSet<String> = flags_of(command).unwrap_or_default().into_iter().map(|f| f.0).collect();
    let known = all_flags();
    let mut pairs = Vec::new();
    for (section, props) in ini.iter() {
        match section {
            None => {
                for (k, v) in props.iter() {
                    if own.contains(k) {
                        pairs.push((k.to_string(), v.to_string()));
                    } else if !known.contains(k) {
                        return Err(CliError::Usage(format!("{}: unknown key `{k}`", path.display())));
                    }
                }
            }
            Some(s) if s == command => pairs.extend(props.iter().map(|(k, v)| (k.to_string(), v.to_string()))),
            Some(s) if flags_of(s).is_some() => {}
            Some(s) => return Err(CliError::Usage(format!("{}: unknown section [{s}]", path.display()))),
        }
    }
    // `config` inside a config file is meaningless; drop it
    pairs.retain(|(k, _)| k != "config");
    Ok(pairs)
}

/// Splices preset and config-file values in front of the user's flags.
pub fn expand_args(raw: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(command) = raw.get(1).filter(|c| !c.starts_with('-')).cloned() else {
        return Ok(raw);
    };
    if flags_of(&command).is_none() {
        return Ok(raw);
    }
    let user = &raw[2..];
    let from_file = match find_flag(user, "config") {
        Some(p) => {
            let path = PathBuf::from(&p);
            let pairs = read_config(&path, &command)?;
            (to_args(&command, &pairs, &p)?, pairs)
        }
        None => (Vec::new(), Vec::new()),
    };
    let preset = find_flag(user, "preset").or_else(|| {
        from_file.1.iter().rev().find(|(k, _)| k == "preset").map(|(_, v)| v.clone())
    });
    let mut preset_args = Vec::new();
    if let Some(name) = preset {
        let Some((_, _, flags)) = PRESETS.iter().find(|p| p.0 == command && p.1 == name) else {
            return Err(CliError::Usage(format!(
                "--preset: unknown preset {name:?} for {command}; available: {}",
                preset_names(&command).join(", ")
            )));
        };
        let pairs: Vec<(String, String)> = flags.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        preset_args = to_args(&command, &pairs, "preset")?;
    }
    let mut out = vec![raw[0].clone(), command];
    out.extend(preset_args);
    out.extend(from_file.0);
    out.extend(user.iter().cloned());
    Ok(out)
}

/// Writes `<output>.ini` holding the effective flags of `command`, in a
/// form that `--config` reads back.
pub fn write_sidecar(output: &Path, command: &str, args: &impl Serialize) -> Result<PathBuf, CliError> {
    let mut path = output.as_os_str().to_owned();
    path.push(".ini");
    let path = PathBuf::from(path);
    let value = serde_json::to_value(args).expect("arguments serialize");
    let mut ini = Ini::new();
    {
        let mut section = ini.with_section(Some(command));
        for (k, v) in flatten(&value) {
            if k != "config" {
                section.set(k, v);
            }
        }
    }
    ini.write_to_file(&path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn flatten(value: &serde_json::Value) -> Vec<(String, String)> {
    use serde_json::Value;
    let mut out = Vec::new();
    if let Value::Object(map) = value {
        for (k, v) in map {
            let key = k.replace('_', "-");
            let text = match v {
                Value::Null | Value::Bool(false) => continue,
                Value::Object(_) => {
                    out.extend(flatten(v));
                    continue;
                }
                Value::String(s) => s.clone(),
                Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(","),
                other => scalar(other),
            };
            out.push((key, text));
        }
    }
    out
}

fn scalar(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn last_flag_occurrence_is_found() {
        let a = argv(&["--n", "3", "--n=5", "--k", "2"]);
        assert_eq!(find_flag(&a, "n").as_deref(), Some("5"));
        assert_eq!(find_flag(&a, "k").as_deref(), Some("2"));
        assert_eq!(find_flag(&a, "res"), None);
    }

    #[test]
    fn preset_goes_first_and_flags_last() {
        let out = expand_args(argv(&["rootdyn", "dyn-plane", "--preset", "monomial-dynamical-plane", "--res", "9"])).unwrap();
        let res: Vec<&String> = out.iter().filter(|a| a.starts_with("--res")).collect();
        assert_eq!(res.len(), 2);
        assert_eq!(out.last().unwrap(), "9");
        assert!(out.contains(&"--a=0".to_string()));
    }

    #[test]
    fn presets_name_only_real_flags() {
        for (command, name, flags) in PRESETS {
            let known = flags_of(command).unwrap();
            for (k, _) in *flags {
                assert!(known.iter().any(|(f, _)| f == k), "{name}: {k}");
            }
        }
    }

    #[test]
    fn booleans_become_bare_flags() {
        let pairs = vec![
            ("json".to_string(), "true".to_string()),
            ("no-circle-projection".to_string(), "false".to_string()),
        ];
        assert_eq!(to_args("report", &pairs, "test").unwrap(), vec!["--json".to_string()]);
        let bad = vec![("json".to_string(), "maybe".to_string())];
        assert!(to_args("report", &bad, "test").is_err());
    }

    #[test]
    fn flatten_joins_arrays_and_skips_unset() {
        let v = serde_json::json!({"window": [-1.0, 1.0, -2.0, 2.0], "out": null, "json": false, "max_iter": 5, "escape": {"eps_zero": 1e-8}});
        let flat = flatten(&v);
        assert!(flat.contains(&("window".into(), "-1.0,1.0,-2.0,2.0".into())));
        assert!(flat.contains(&("max-iter".into(), "5".into())));
        assert!(flat.contains(&("eps-zero".into(), "1e-8".into())));
        assert!(!flat.iter().any(|(k, _)| k == "out" || k == "json"));
    }
}
