//! Subcommand implementations. Each returns the report body and an exit code.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};
use sievelab::arith;
use sievelab::checkers::{self, Constants, KapOptions, TheoremId, TheoremVerdict};
use sievelab::constructions::{self as cons, ConstructionOutput, PredictionOutcome};
use sievelab::format::{self, parse_ratio};
use sievelab::structure::{additive_energy_mod, analyze, AnalyzeOptions};
use sievelab::subset_sums::{concentration_scan, default_threshold, subset_sum_profile, weighted_average};
use sievelab::{sieve_bruteforce, sieve_fast, ConstraintFamily, IntegerSet, ModProgression, PrimeModulus, ResidueConstraint};

use crate::config::*;
use crate::report::SetListing;
use crate::suite;

/// Report body, exit code, and wall time kept out of the reproducible part.
pub struct Outcome {
    pub result: Value,
    pub exit_code: i32,
    pub elapsed_ms: f64,
    /// `construct` records its resolved parameters here for the embedded config.
    pub resolved: Option<ConstructParams>,
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn load_family(path: &Path) -> Result<ConstraintFamily> {
    format::family_from_json(&read_text(path)?).with_context(|| format!("in family file {}", path.display()))
}

/// A set file path, or inline elements like `0,5,10` or `[0 5 10]`.
pub fn load_set(arg: &str) -> Result<IntegerSet> {
    let path = Path::new(arg);
    if path.is_file() {
        return format::set_from_json(&read_text(path)?).with_context(|| format!("in set file {arg}"));
    }
    let body = arg.trim().trim_start_matches('[').trim_end_matches(']');
    let elements = body
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| anyhow!("`{arg}` is neither a set file nor a list of integers")))
        .collect::<Result<Vec<u64>>>()?;
    Ok(IntegerSet::from_unsorted(elements))
}

fn ratio_arg(field: &str, text: &str) -> Result<Ratio<u64>> {
    parse_ratio(text).map_err(|e| anyhow!("{field}: {e}"))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

pub fn execute(config: &ExperimentConfig) -> Result<Outcome> {
    let clock = Instant::now();
    let workers = config.workers;
    let (result, exit_code, resolved) = sievelab::par::with_workers(workers, || -> Result<(Value, i32, Option<ConstructParams>)> {
        Ok(match &config.command {
            Command::Sieve(a) => (sieve(a, workers)?, 0, None),
            Command::Analyze(a) => (analyze_cmd(a)?, 0, None),
            Command::Construct(a) => {
                let (v, p) = construct(a, config.seed)?;
                (v, 0, Some(p))
            }
            Command::Verify(a) => {
                let (v, code) = verify(a, workers, config.seed)?;
                (v, code, None)
            }
            Command::SubsetSums(a) => (subset_sums(a)?, 0, None),
            Command::Suite(a) => {
                let (v, code) = suite::run_suite(a, config.seed)?;
                (v, code, None)
            }
        })
    })?;
    Ok(Outcome { result, exit_code, elapsed_ms: clock.elapsed().as_secs_f64() * 1e3, resolved })
}

fn sieve(args: &SieveArgs, workers: Option<usize>) -> Result<Value> {
    let f = load_family(&args.family)?;
    let res = match args.mode {
        SieveMode::Fast => sieve_fast(&f, workers),
        SieveMode::Brute => sieve_bruteforce(&f)?,
    };
    if let Some(out) = &args.set_out {
        write_text(out, &format::set_to_json(&res.admissible)?)?;
    }
    Ok(json!({
        "n_max": f.n_max(),
        "constraints": f.constraints().len(),
        "admissible": SetListing::new(&res.admissible),
        "stats": to_value(&res.stats),
    }))
}

fn analyze_cmd(args: &AnalyzeArgs) -> Result<Value> {
    let s = load_set(&args.set)?;
    let opts = AnalyzeOptions { cover_k_max: args.cover_kmax, gap_rank: args.gap_rank, ..AnalyzeOptions::default() };
    Ok(json!({ "set": SetListing::new(&s), "structure": to_value(&analyze(&s, opts)) }))
}

/// Fills per-construction defaults into `p` and builds the family.
pub fn build_construction(which: Which, mut p: ConstructParams, seed: u64) -> Result<(ConstructionOutput, ConstructParams)> {
    let eps_default = match which {
        Which::Pell => "1/20",
        Which::IntervalSieveSharp => "1/2",
        Which::KapSieveSmallP0 => "2/5",
        _ => "1/10",
    };
    let eps_text = p.epsilon.get_or_insert_with(|| eps_default.into()).clone();
    let eps = ratio_arg("epsilon", &eps_text)?;
    let need = |v: Option<u64>, name: &str| v.ok_or_else(|| anyhow!("params.{name} is required for this construction"));
    let out = match which {
        Which::IntervalSharp => {
            let n = *p.n_max.get_or_insert(1_000_000);
            let y = *p.y.get_or_insert(1000);
            cons::construct_interval_sharp(n, y, eps)?
        }
        Which::HalfPower => {
            let n = *p.n_max.get_or_insert(20_000);
            let y = *p.y.get_or_insert(10_000);
            let q1 = *p.q1.get_or_insert(7);
            let q2 = *p.q2.get_or_insert(1013);
            cons::construct_half_power_counterexample(n, y, q1, q2, eps)?
        }
        Which::ThinPrimes => cons::construct_thin_prime_counterexample(*p.n_max.get_or_insert(10_000), eps)?,
        Which::Flush => cons::construct_flush_progression(*p.n_max.get_or_insert(400), eps, seed)?,
        Which::Pell => cons::construct_pell_counterexample(*p.n_max.get_or_insert(200_000), eps)?,
        Which::KapNonunion => {
            let k = *p.k.get_or_insert(2);
            let y = *p.y.get_or_insert(10_000);
            let n = *p.n_max.get_or_insert(20_000);
            cons::construct_kap_nonunion(k, y, n, eps)?
        }
        Which::IntervalSieveSharp => {
            let n = *p.n_max.get_or_insert(5_000);
            let p0 = *p.p0.get_or_insert(101);
            let top = *p.y_high.get_or_insert_with(|| checkers::interval_sieve_top(n, eps));
            cons::construct_interval_sieve_sharp(n, p0, top, eps)?
        }
        Which::KapSieveSmallP0 => {
            let n = *p.n_max.get_or_insert(100_000);
            let top = *p.y_high.get_or_insert_with(|| checkers::kap_sieve_top(n, eps));
            cons::construct_kap_sieve_small_p0(n, top, eps)?
        }
        Which::Uniform => {
            let n = need(p.n_max, "n_max")?;
            let y = need(p.y, "y")?;
            let step = need(p.step, "step")?;
            let len = need(p.len, "len")?;
            let start = *p.start.get_or_insert(0);
            uniform_family(n, y, eps, ModProgression::new(start, step, len))?
        }
    };
    Ok((out, p))
}

fn uniform_family(n: u64, y: u64, eps: Ratio<u64>, ap: ModProgression) -> Result<ConstructionOutput> {
    let cs = arith::primes_between(y, 2 * y)
        .into_iter()
        .map(|p| ResidueConstraint::new(PrimeModulus::new(p).expect("prime"), vec![ap.into()]))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConstructionOutput {
        family: ConstraintFamily::new(n, eps, y, 2 * y, cs)?,
        predicted: Default::default(),
        notes: vec![format!("R_p = {{{} + {} j : j < {}}} at every prime in [{y}, {}]", ap.start, ap.step, ap.len, 2 * y)],
    })
}

fn construct(args: &ConstructArgs, seed: u64) -> Result<(Value, ConstructParams)> {
    let params = match (&args.resolved, &args.params) {
        (Some(r), _) => r.clone(),
        (None, Some(path)) => format::from_json(&read_text(path)?).with_context(|| format!("in params file {}", path.display()))?,
        (None, None) => ConstructParams::default(),
    };
    let (out, resolved) = build_construction(args.which, params, seed)?;
    let family_path = args.out_dir.join("family.json");
    let predictions_path = args.out_dir.join("predictions.json");
    write_text(&family_path, &format::family_to_json(&out.family)?)?;
    write_text(&predictions_path, &format::predictions_to_json(&out.predicted)?)?;
    Ok((
        json!({
            "which": args.which,
            "params": resolved,
            "constraints": out.family.constraints().len(),
            "files": { "family": family_path, "predictions": predictions_path },
            "notes": out.notes,
        }),
        resolved,
    ))
}

/// Resolved knobs plus the verdict for one theorem on one family.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRun {
    pub verdict: TheoremVerdict,
    pub options: CheckOptions,
}

fn reduce(num: u128, den: u128) -> Result<Ratio<u64>> {
    let g = num_integer::gcd(num, den).max(1);
    let (n, d) = (num / g, den / g);
    match (u64::try_from(n), u64::try_from(d)) {
        (Ok(n), Ok(d)) if d > 0 => Ok(Ratio::new(n, d)),
        _ => bail!("default delta {num}/{den} does not fit; pass --delta"),
    }
}

/// Largest `delta` with `E(S_p) >= delta |S_p|^3` at every prime of `[y, 2y]`.
fn energy_delta(s: &IntegerSet, f: &ConstraintFamily) -> Result<Ratio<u64>> {
    let mut best: Option<(u128, u128)> = None;
    for p in arith::primes_between(f.y_low(), 2 * f.y_low()) {
        let sp = s.reduce_mod(p).len() as u128;
        if sp == 0 {
            continue;
        }
        let cand = (additive_energy_mod(s, p, true), sp.pow(3));
        if best.is_none_or(|b| cand.0 * b.1 < b.0 * cand.1) {
            best = Some(cand);
        }
    }
    let (n, d) = best.unwrap_or((1, 1));
    reduce(n, d)
}

/// Largest `delta <= 1` with `|R_p| <= |S_p| / delta` at every constrained prime.
fn density_delta(s: &IntegerSet, f: &ConstraintFamily) -> Result<Ratio<u64>> {
    let mut best = (1u128, 1u128);
    for c in f.constraints() {
        let (sp, rp) = (s.reduce_mod(c.p()).len() as u128, c.residue_count() as u128);
        if rp > 0 && sp * best.1 < best.0 * rp {
            best = (sp, rp);
        }
    }
    if best.0 == 0 {
        bail!("S misses some R_p entirely; pass --delta");
    }
    reduce(best.0, best.1)
}

/// Runs `theorem` with defaults filled in: `k` from the widest residue set,
/// `p0` from the least prime, `delta` as the largest value meeting its clause.
pub fn run_check(
    f: &ConstraintFamily,
    a: &IntegerSet,
    s: Option<&IntegerSet>,
    theorem: TheoremId,
    opts: &CheckOptions,
    constants: Constants,
    seed: u64,
) -> Result<CheckRun> {
    let mut o = opts.clone();
    let s = s.unwrap_or(a);
    let widest = f.constraints().iter().map(|c| c.parts().len()).max().unwrap_or(1).max(1);
    let least = f.primes().first().copied().unwrap_or(f.y_low());
    let verdict = match theorem {
        TheoremId::Main => checkers::check_main_theorem(f, a, constants)?,
        TheoremId::AllPrimes => checkers::check_all_primes_corollary(f, a, constants)?,
        TheoremId::Interval => checkers::check_interval_theorem(f, a, constants)?,
        TheoremId::Kap => {
            let k = *o.k.get_or_insert(widest);
            let relaxation = o.relaxation.as_deref().map(|r| ratio_arg("relaxation", r)).transpose()?;
            checkers::check_kap_theorem(f, a, KapOptions { k, relaxation }, constants)?
        }
        TheoremId::GcdLemma => {
            let trials = *o.trials.get_or_insert(1000);
            checkers::check_gcd_lemma(s, f, trials, seed, constants)?
        }
        TheoremId::Energy => {
            let delta = match &o.delta {
                Some(d) => ratio_arg("delta", d)?,
                None => energy_delta(s, f)?,
            };
            o.delta = Some(format::RatioText(delta).to_string());
            checkers::check_energy_theorem(s, f, delta, constants)?
        }
        TheoremId::InverseGap => {
            let delta = match &o.delta {
                Some(d) => ratio_arg("delta", d)?,
                None => density_delta(s, f)?,
            };
            o.delta = Some(format::RatioText(delta).to_string());
            let r = *o.rank.get_or_insert(1);
            checkers::check_inverse_gap_theorem(s, f, r, delta, constants)?
        }
        TheoremId::IntervalSieve => {
            let p0 = *o.p0.get_or_insert(least);
            checkers::check_interval_sieve_theorem(f, a, p0, constants)?
        }
        TheoremId::KapSieve => {
            let p0 = *o.p0.get_or_insert(least);
            let k = *o.k.get_or_insert(widest);
            checkers::check_kap_sieve_theorem(f, a, p0, k, constants)?
        }
    };
    Ok(CheckRun { verdict, options: o })
}

pub fn load_constants(path: Option<&PathBuf>) -> Result<Constants> {
    match path {
        None => Ok(Constants::default()),
        Some(p) => format::from_json(&read_text(p)?).with_context(|| format!("in constants file {}", p.display())),
    }
}

fn verify(args: &VerifyArgs, workers: Option<usize>, seed: u64) -> Result<(Value, i32)> {
    let f = load_family(&args.family)?;
    let constants = load_constants(args.constants.as_ref())?;
    let a = sieve_fast(&f, workers).admissible;
    let s = args.set.as_deref().map(load_set).transpose()?;
    let run = run_check(&f, &a, s.as_ref(), args.theorem, &args.options, constants, seed)?;
    let mut exit = run.verdict.exit_code();
    let outcomes: Option<Vec<PredictionOutcome>> = match &args.predictions {
        None => None,
        Some(path) => Some(
            format::predictions_from_json(&read_text(path)?)
                .with_context(|| format!("in predictions file {}", path.display()))?
                .evaluate(&a),
        ),
    };
    if exit == 0 && outcomes.as_ref().is_some_and(|o| o.iter().any(|c| !c.holds)) {
        exit = 1;
    }
    Ok((
        json!({
            "admissible": SetListing::new(&a),
            "options": run.options,
            "verdict": run.verdict,
            "predictions": outcomes,
        }),
        exit,
    ))
}

fn subset_sums(args: &SubsetSumArgs) -> Result<Value> {
    let pm = PrimeModulus::new(args.p).map_err(|e| anyhow!("--p: {e}"))?;
    let s = load_set(&args.set)?;
    let prof = subset_sum_profile(&s, pm);
    let (argmin, min, max) = prof.extremes();
    let mut out = json!({
        "p": args.p,
        "set_size": s.len(),
        "exact": prof.is_exact(),
        "normalized_min": min,
        "normalized_max": max,
        "argmin": argmin,
        "uniformity_deviation": prof.uniformity_deviation(),
    });
    if let Some(c) = prof.exact_counts() {
        out["min_count"] = json!(c[argmin as usize].to_string());
        out["max_count"] = json!(c.iter().max().map(|m| m.to_string()));
    }
    if let Some(path) = &args.measure {
        let mu = format::measure_from_json(&read_text(path)?, args.p).with_context(|| format!("in measure file {}", path.display()))?;
        let avg = weighted_average(&prof, &mu)?;
        out["weighted_average"] = json!(avg.to_string());
    }
    if args.scan {
        let tau = args.tau.unwrap_or_else(|| default_threshold(args.p));
        let scan = concentration_scan(&s, pm, tau)?;
        out["concentration"] = json!({
            "a": scan.a,
            "log_magnitude": scan.log_magnitude,
            "fraction": scan.fraction,
            "threshold": scan.threshold,
            "concentrated": scan.concentrated(),
        });
    }
    Ok(out)
}
