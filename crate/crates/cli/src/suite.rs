//! Corpus runs: every fixture directory holds a manifest naming a family, an
//! optional prediction sheet and set, and the theorem checks to run.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sievelab::checkers::{Conclusion, Constants, TheoremId};
use sievelab::format;
use sievelab::sieve_fast;

use crate::config::{CheckOptions, ConstructParams, SuiteArgs, Which};
use crate::run::{build_construction, load_family, load_set, read_text, run_check, write_text};

pub const FIXTURE_SCHEMA: &str = "sievelab/fixture/v1";
pub const MANIFEST: &str = "fixture.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub schema: String,
    pub description: String,
    /// Paths are relative to the fixture directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    /// Builds the family at run time instead of reading `family`; the
    /// construction's own prediction sheet is then evaluated as well.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construct: Option<Recipe>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predictions: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<Constants>,
    #[serde(default)]
    pub checks: Vec<FixtureCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recipe {
    pub which: Which,
    #[serde(default)]
    pub params: ConstructParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureCheck {
    pub theorem: TheoremId,
    pub expect_exit: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_conclusion: Option<Conclusion>,
    #[serde(default)]
    pub options: CheckOptions,
    /// Diagnostic values from an earlier run, compared as exact strings.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub pinned: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub fixture: String,
    /// A theorem id, or `predictions`.
    pub check: String,
    pub exit_code: Option<i32>,
    pub expected_exit: Option<i32>,
    pub conclusion: Option<Conclusion>,
    /// `|A|` for predictions rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    pub ratios: BTreeMap<String, String>,
    pub ok: bool,
    pub problems: Vec<String>,
}

impl SuiteRow {
    fn new(fixture: &str, check: &str) -> Self {
        SuiteRow {
            fixture: fixture.into(),
            check: check.into(),
            exit_code: None,
            expected_exit: None,
            conclusion: None,
            size: None,
            ratios: BTreeMap::new(),
            ok: true,
            problems: Vec::new(),
        }
    }

    fn problem(&mut self, msg: impl Into<String>) {
        self.ok = false;
        self.problems.push(msg.into());
    }
}

/// Fixture directories in name order.
pub fn fixture_dirs(corpus: &Path) -> Result<Vec<PathBuf>> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(corpus)
        .with_context(|| format!("cannot list corpus {}", corpus.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join(MANIFEST).is_file())
        .collect();
    dirs.sort();
    Ok(dirs)
}

pub fn load_fixture(dir: &Path) -> Result<Fixture> {
    let path = dir.join(MANIFEST);
    let f: Fixture = format::from_json(&read_text(&path)?).with_context(|| format!("in {}", path.display()))?;
    if f.schema != FIXTURE_SCHEMA {
        anyhow::bail!("{}: schema `{}` where `{FIXTURE_SCHEMA}` was expected", path.display(), f.schema);
    }
    if f.family.is_some() == f.construct.is_some() {
        anyhow::bail!("{}: give exactly one of `family` and `construct`", path.display());
    }
    Ok(f)
}

/// Rows for one fixture, plus the manifest with fresh pins when `pin` is set.
fn run_fixture(dir: &Path, pin: bool, seed: u64) -> (Vec<SuiteRow>, Option<Fixture>) {
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut fx = match load_fixture(dir) {
        Ok(f) => f,
        Err(e) => {
            let mut row = SuiteRow::new(&name, "load");
            row.problem(format!("{e:#}"));
            return (vec![row], None);
        }
    };
    let loaded = match (&fx.family, &fx.construct) {
        (Some(path), _) => load_family(&dir.join(path)).map(|f| (f, None)),
        (None, Some(r)) => build_construction(r.which, r.params.clone(), seed).map(|(out, _)| (out.family, Some(out.predicted))),
        (None, None) => unreachable!("checked on load"),
    };
    let (family, generated) = match loaded {
        Ok(f) => f,
        Err(e) => {
            let mut row = SuiteRow::new(&name, "load");
            row.problem(format!("{e:#}"));
            return (vec![row], None);
        }
    };
    let a = sieve_fast(&family, None).admissible;
    let mut rows = Vec::new();

    let sheets = generated.map(Ok).into_iter().chain(
        fx.predictions.iter().map(|pred| read_text(&dir.join(pred)).and_then(|t| Ok(format::predictions_from_json(&t)?))),
    );
    for sheet in sheets {
        let mut row = SuiteRow::new(&name, "predictions");
        row.size = Some(a.len());
        match sheet {
            Ok(p) => {
                for o in p.evaluate(&a) {
                    if !o.holds {
                        row.problem(format!("claim failed: {}", o.claim));
                    }
                }
            }
            Err(e) => row.problem(format!("{e:#}")),
        }
        rows.push(row);
    }

    let set = match fx.set.as_ref().map(|s| load_set(&dir.join(s).to_string_lossy())).transpose() {
        Ok(s) => s,
        Err(e) => {
            let mut row = SuiteRow::new(&name, "load");
            row.problem(format!("{e:#}"));
            rows.push(row);
            return (rows, None);
        }
    };
    let constants = fx.constants.unwrap_or_default();
    for check in fx.checks.iter_mut() {
        let mut row = SuiteRow::new(&name, check.theorem.as_str());
        row.expected_exit = Some(check.expect_exit);
        match run_check(&family, &a, set.as_ref(), check.theorem, &check.options, constants, seed) {
            Err(e) => row.problem(format!("{e:#}")),
            Ok(run) => {
                let v = run.verdict;
                let code = v.exit_code();
                row.exit_code = Some(code);
                row.conclusion = Some(v.conclusion);
                if code == 1 {
                    row.problem("conclusion failed under met hypotheses");
                }
                if code != check.expect_exit {
                    row.problem(format!("exit {code}, expected {}", check.expect_exit));
                }
                if let Some(c) = check.expect_conclusion {
                    if c != v.conclusion {
                        row.problem(format!("conclusion {:?}, expected {c:?}", v.conclusion));
                    }
                }
                let current: BTreeMap<String, String> =
                    v.diagnostics.iter().filter(|d| d.approx.is_some()).map(|d| (d.name.clone(), d.value.clone())).collect();
                if pin {
                    check.pinned = current.clone();
                } else {
                    for (k, want) in &check.pinned {
                        match current.get(k) {
                            Some(got) if got == want => {}
                            Some(got) => row.problem(format!("pinned `{k}` = {want}, now {got}")),
                            None => row.problem(format!("pinned `{k}` missing")),
                        }
                    }
                }
                row.ratios = current;
            }
        }
        rows.push(row);
    }
    (rows, pin.then_some(fx))
}

/// Fixed-width table of the rows, one line each.
pub fn render_table(rows: &[SuiteRow]) -> String {
    let mut out = format!("{:<28} {:<14} {:>4} {:>4} {:<9} {}\n", "fixture", "check", "exit", "want", "verdict", "status");
    for r in rows {
        let exit = r.exit_code.map(|c| c.to_string()).unwrap_or_else(|| "-".into());
        let want = r.expected_exit.map(|c| c.to_string()).unwrap_or_else(|| "-".into());
        let verdict = match r.conclusion {
            Some(Conclusion::Pass) => "pass",
            Some(Conclusion::Fail) => "fail",
            Some(Conclusion::Reported) => "reported",
            None => "-",
        };
        let status = if r.ok { "ok".to_string() } else { format!("MISMATCH: {}", r.problems.join("; ")) };
        out.push_str(&format!("{:<28} {:<14} {:>4} {:>4} {:<9} {}\n", r.fixture, r.check, exit, want, verdict, status));
    }
    out
}

pub fn run_suite(args: &SuiteArgs, seed: u64) -> Result<(Value, i32)> {
    let dirs = fixture_dirs(&args.corpus)?;
    let results = sievelab::par::map(&dirs, |d| run_fixture(d, args.pin, seed));
    let mut rows = Vec::new();
    for (dir, (r, updated)) in dirs.iter().zip(results) {
        if let Some(fx) = updated {
            let text = serde_json::to_string_pretty(&fx)? + "\n";
            write_text(&dir.join(MANIFEST), &text)?;
        }
        rows.extend(r);
    }
    let failures = rows.iter().filter(|r| !r.ok).count();
    Ok((
        json!({ "fixtures": dirs.len(), "rows": rows, "failures": failures }),
        if failures == 0 { 0 } else { 1 },
    ))
}
