//! Experiment driver: configs in, self-describing reports out.

pub mod config;
pub mod report;
pub mod run;
pub mod suite;

use anyhow::{anyhow, bail, Result};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use sievelab::format::FormatError;

use config::{Command, ExperimentConfig};
use report::Report;

/// Exit code for malformed invocations, configs and input files. Kept apart
/// from 2, which means "hypotheses unmet".
pub const EXIT_USAGE: i32 = 64;

/// Runs one experiment. The returned report embeds the config with any
/// resolved construction parameters, so replaying it needs no extra files.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    let outcome = run::execute(config)?;
    let mut embedded = config.clone();
    if let (Command::Construct(args), Some(p)) = (&mut embedded.command, outcome.resolved) {
        args.resolved = Some(p);
    }
    Ok(Report::new(embedded, outcome.exit_code, outcome.result, outcome.elapsed_ms))
}

/// Accepts a config document, or a whole report whose `config` is replayed.
/// Errors carry the path of the offending field, including inside `command`.
pub fn config_from_json(text: &str) -> Result<ExperimentConfig> {
    let mut value: Value = serde_json::from_str(text)?;
    if value.get("schema").and_then(Value::as_str) == Some(report::REPORT_SCHEMA) {
        value = value.get("config").cloned().ok_or_else(|| anyhow!("at `config`: missing in report"))?;
    }
    let command = match value.as_object_mut().and_then(|o| o.remove("command")) {
        Some(c) => command_from_value(c)?,
        None => bail!("at `command`: missing field"),
    };
    // decode the rest against a placeholder command
    value["command"] = json!({ "subcommand": "suite", "corpus": "" });
    let mut cfg: ExperimentConfig = sievelab::format::from_json(&value.to_string())?;
    if cfg.schema != config::CONFIG_SCHEMA {
        bail!("at `schema`: `{}` where `{}` was expected", cfg.schema, config::CONFIG_SCHEMA);
    }
    cfg.command = command;
    Ok(cfg)
}

fn command_from_value(mut c: Value) -> Result<Command> {
    let tag = match c.as_object_mut().and_then(|o| o.remove("subcommand")) {
        Some(Value::String(t)) => t,
        _ => bail!("at `command.subcommand`: expected one of sieve, analyze, construct, verify, subset-sums, suite"),
    };
    fn args<T: DeserializeOwned>(c: &Value) -> Result<T> {
        sievelab::format::from_json(&c.to_string()).map_err(|e| match e {
            FormatError::Field { path, message } => anyhow!("at `command.{path}`: {message}"),
            other => other.into(),
        })
    }
    Ok(match tag.as_str() {
        "sieve" => Command::Sieve(args(&c)?),
        "analyze" => Command::Analyze(args(&c)?),
        "construct" => Command::Construct(args(&c)?),
        "verify" => Command::Verify(args(&c)?),
        "subset-sums" => Command::SubsetSums(args(&c)?),
        "suite" => Command::Suite(args(&c)?),
        other => bail!("at `command.subcommand`: unknown subcommand `{other}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use config::*;
    use std::path::PathBuf;

    #[test]
    fn configs_round_trip_through_json() {
        let commands = vec![
            Command::Sieve(SieveArgs { family: "f.json".into(), mode: SieveMode::Brute, set_out: None }),
            Command::Analyze(AnalyzeArgs { set: "1,2".into(), cover_kmax: 3, gap_rank: 2 }),
            Command::Construct(ConstructArgs {
                which: Which::Pell,
                params: None,
                resolved: Some(ConstructParams { n_max: Some(10), ..Default::default() }),
                out_dir: "out".into(),
            }),
            Command::Verify(VerifyArgs {
                family: "f.json".into(),
                theorem: sievelab::checkers::TheoremId::KapSieve,
                constants: None,
                set: None,
                predictions: Some("p.json".into()),
                options: CheckOptions { k: Some(2), p0: Some(101), ..Default::default() },
            }),
            Command::SubsetSums(SubsetSumArgs { set: "s.json".into(), p: 7, measure: None, scan: true, tau: Some(0.1) }),
            Command::Suite(SuiteArgs { corpus: PathBuf::from("corpus"), pin: false }),
        ];
        for c in commands {
            let cfg = ExperimentConfig::new(c, Some(3), 42);
            let text = serde_json::to_string(&cfg).unwrap();
            assert_eq!(config_from_json(&text).unwrap(), cfg, "{text}");
            let report = Report::new(cfg.clone(), 0, Value::Null, 1.0).to_json();
            assert_eq!(config_from_json(&report).unwrap(), cfg);
        }
    }

    #[test]
    fn config_errors() {
        let missing = config_from_json(r#"{"seed": 1}"#).unwrap_err().to_string();
        assert!(missing.contains("`command`"), "{missing}");
        let tag = config_from_json(r#"{"command": {"subcommand": "plot"}}"#).unwrap_err().to_string();
        assert!(tag.contains("unknown subcommand"), "{tag}");
        let schema = config_from_json(r#"{"schema": "v0", "command": {"subcommand": "suite", "corpus": "c"}}"#).unwrap_err().to_string();
        assert!(schema.contains("`schema`"), "{schema}");
        let seed = config_from_json(r#"{"seed": -1, "command": {"subcommand": "suite", "corpus": "c"}}"#).unwrap_err().to_string();
        assert!(seed.contains("`seed`"), "{seed}");
    }
}
