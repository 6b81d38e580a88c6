//! Hypothesis predicates and conclusion verifiers for the structure theorems,
//! plus the larger-sieve bound.
//!
//! Every real-valued clause is decided with certified enclosures. Constants the
//! theorems leave unspecified are [`Constants`] surrogates echoed in each
//! verdict; conclusions that depend on them are reported as ratios rather than
//! judged.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{self, cmp_scaled_pow, le_pow};
use crate::error::CheckError;
use crate::real::{certified_floor, decide, Decided, Real, PRECISION_LADDER};
use crate::sieve::{interval_scale, iterated_interval_localization};
use crate::structure::{
    additive_energy, additive_energy_mod, detect_ap, detect_interval, doubling, min_bottleneck_cover,
    search_low_rank_gap, IntervalShape, EXHAUSTIVE_COVER_LIMIT, GAP_SEARCH_LIMIT,
};
use crate::types::{ConstraintFamily, IntegerSet, ModProgression, ResidueConstraint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    Main,
    AllPrimes,
    Interval,
    Kap,
    GcdLemma,
    Energy,
    InverseGap,
    IntervalSieve,
    KapSieve,
}

impl TheoremId {
    pub const ALL: [TheoremId; 9] = [
        TheoremId::Main,
        TheoremId::AllPrimes,
        TheoremId::Interval,
        TheoremId::Kap,
        TheoremId::GcdLemma,
        TheoremId::Energy,
        TheoremId::InverseGap,
        TheoremId::IntervalSieve,
        TheoremId::KapSieve,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Main => "main",
            TheoremId::AllPrimes => "all-primes",
            TheoremId::Interval => "interval",
            TheoremId::Kap => "kap",
            TheoremId::GcdLemma => "gcd-lemma",
            TheoremId::Energy => "energy",
            TheoremId::InverseGap => "inverse-gap",
            TheoremId::IntervalSieve => "interval-sieve",
            TheoremId::KapSieve => "kap-sieve",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = CheckError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| CheckError::Input(format!("unknown theorem '{s}'")))
    }
}

/// Surrogates for constants the statements leave open. All default to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Constants {
    /// `C` in the prime-count and `y` lower-bound clauses.
    #[serde(with = "crate::format::ratio_str")]
    pub c: Ratio<u64>,
    /// `N_0(eps)`.
    pub n0: u64,
    /// Multiplier on `y^(1/2-eps)` for the lengths of the covering progressions.
    #[serde(with = "crate::format::ratio_str")]
    pub kap_length: Ratio<u64>,
}

impl Default for Constants {
    fn default() -> Self {
        Constants { c: Ratio::from_integer(1), n0: 1, kap_length: Ratio::from_integer(1) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Conclusion {
    Pass,
    Fail,
    /// The conclusion involves an unspecified constant; see the diagnostics.
    Reported,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub name: String,
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approx: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremVerdict {
    pub theorem: TheoremId,
    pub hypotheses_met: bool,
    pub clauses: Vec<Clause>,
    pub conclusion: Conclusion,
    pub conclusion_detail: String,
    pub diagnostics: Vec<Diagnostic>,
    pub constants: Constants,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl TheoremVerdict {
    fn new(theorem: TheoremId, constants: Constants) -> Self {
        TheoremVerdict {
            theorem,
            hypotheses_met: true,
            clauses: Vec::new(),
            conclusion: Conclusion::Reported,
            conclusion_detail: String::new(),
            diagnostics: Vec::new(),
            constants,
            notes: Vec::new(),
        }
    }

    fn clause(&mut self, name: &str, holds: bool, detail: impl Into<String>) {
        self.hypotheses_met &= holds;
        self.clauses.push(Clause { name: name.into(), holds, detail: detail.into() });
    }

    fn diag(&mut self, name: &str, value: impl fmt::Display, approx: Option<f64>) {
        self.diagnostics.push(Diagnostic { name: name.into(), value: value.to_string(), approx });
    }

    fn diag_real(&mut self, name: &str, r: &Real) {
        let (lo, hi) = r.f64_bounds();
        self.diag(name, format!("[{lo:.12e}, {hi:.12e}]"), Some(r.midpoint_f64()));
    }

    fn conclude(mut self, conclusion: Conclusion, detail: impl Into<String>) -> Self {
        self.conclusion = conclusion;
        self.conclusion_detail = detail.into();
        if conclusion == Conclusion::Fail && self.hypotheses_met {
            self.notes.push(
                "conclusion failed under met hypotheses; the hypotheses use surrogate constants, \
                 so this may reflect the surrogate choice rather than a counterexample"
                    .into(),
            );
        }
        self
    }

    /// 0: hypotheses met and conclusion passed or reported; 1: conclusion
    /// failed under met hypotheses; 2: hypotheses unmet.
    pub fn exit_code(&self) -> i32 {
        match (self.hypotheses_met, self.conclusion) {
            (false, _) => 2,
            (true, Conclusion::Fail) => 1,
            (true, _) => 0,
        }
    }
}

fn ln(n: u64, bits: u32) -> Real {
    Real::ln_uint(n.max(1), bits)
}

fn pow(base: u64, e: Ratio<u64>, bits: u32) -> Real {
    Real::uint_pow(base, e, bits)
}

fn approx_pow(base: u64, e: Ratio<u64>) -> f64 {
    (base as f64).powf(*e.numer() as f64 / *e.denom() as f64)
}

fn decided_le(d: Decided) -> bool {
    d.le()
}

fn eps_clause(v: &mut TheoremVerdict, eps: Ratio<u64>, upper: Ratio<u64>) {
    let ok = *eps.numer() > 0 && eps < upper;
    v.clause("epsilon range", ok, format!("eps = {eps} in (0, {upper})"));
}

fn n0_clause(v: &mut TheoremVerdict, n: u64) {
    let n0 = v.constants.n0;
    v.clause("N > N_0", n > n0, format!("N = {n}, N_0 surrogate = {n0}"));
}

/// All constrained primes lie in `[y, 2y]` with `y = y_low`.
fn dyadic_clause(v: &mut TheoremVerdict, f: &ConstraintFamily) -> u64 {
    let y = f.y_low();
    let outside: Vec<u64> = f.primes().into_iter().filter(|&p| p < y || p > 2 * y).take(5).collect();
    v.clause("primes in [y, 2y]", outside.is_empty(), format!("y = {y}; outside: {outside:?}"));
    y
}

fn single_parts(f: &ConstraintFamily, theorem: &'static str) -> Result<Vec<(u64, ModProgression)>, CheckError> {
    f.constraints()
        .iter()
        .map(|c| {
            let n = c.normalize().map_err(|e| CheckError::Input(e.to_string()))?;
            n.constraint.single_progression().map(|ap| (c.p(), *ap)).ok_or(CheckError::WrongTheorem {
                theorem,
                expected: format!("a single progression mod {}", c.p()),
            })
        })
        .collect()
}

/// `|R_p| - 1 <= p^e` for every prime; returns the offenders.
fn short_parts(parts: &[(u64, ModProgression)], e: Ratio<u64>) -> Vec<u64> {
    parts
        .iter()
        .filter(|(p, ap)| ap.len > 1 && !le_pow(ap.len - 1, *p, e))
        .map(|(p, _)| *p)
        .collect()
}

fn prime_count_clause(v: &mut TheoremVerdict, f: &ConstraintFamily, y: u64, coeff: Real, base: u64, e: Ratio<u64>) {
    // |P| log y >= coeff * base^e * log N
    let count = f.constraints().len() as u64;
    let n = f.n_max();
    let holds = decided_le(decide(|b| {
        (coeff.mul(&pow(base, e, b), b).mul(&ln(n, b), b), Real::uint(count).mul(&ln(y, b), b))
    }));
    let need = coeff.midpoint_f64() * approx_pow(base, e) * (n as f64).ln() / (y as f64).ln();
    v.clause("prime count", holds, format!("|P| = {count}, need >= {need:.3}"));
}

/// Hypotheses shared by the main theorem, its corollary and the gcd lemma.
fn main_hypotheses(v: &mut TheoremVerdict, f: &ConstraintFamily) -> Result<u64, CheckError> {
    let parts = single_parts(f, "main")?;
    let eps = f.epsilon();
    let n = f.n_max();
    eps_clause(v, eps, arith::half());
    n0_clause(v, n);
    let y = dyadic_clause(v, f);
    let two_eps = eps * 2;
    let c = Real::ratio(v.constants.c);
    // (4 C log N)^(1/(2 eps)) <= y  <=>  4 C log N <= y^(2 eps)
    let lower = decided_le(decide(|b| (Real::int(4).mul(&c, b).mul(&ln(n, b), b), pow(y, two_eps, b))));
    v.clause(
        "y lower bound",
        lower,
        format!("4C log N = {:.4}, y^(2 eps) = {:.4}", 4.0 * c.midpoint_f64() * (n as f64).ln(), approx_pow(y, two_eps)),
    );
    v.clause("y <= N", y <= n, format!("y = {y}, N = {n}"));
    if two_eps < arith::one() {
        prime_count_clause(v, f, y, c, y, arith::one() - two_eps);
    }
    let e = arith::half() - eps.min(arith::half());
    let long = short_parts(&parts, e);
    v.clause("|R_p| <= p^(1/2-eps) + 1", long.is_empty(), format!("violations at {:?}", &long[..long.len().min(5)]));
    Ok(y)
}

/// Progression structure of `A`: `Some(len)` when it is one.
fn ap_len(a: &IntegerSet) -> Option<u64> {
    detect_ap(a).map(|ap| ap.len)
}

pub fn check_main_theorem(f: &ConstraintFamily, a: &IntegerSet, constants: Constants) -> Result<TheoremVerdict, CheckError> {
    let mut v = TheoremVerdict::new(TheoremId::Main, constants);
    let y = main_hypotheses(&mut v, f)?;
    let e = arith::half() - f.epsilon().min(arith::half());
    let bound = arith::floor_pow(2 * y, e) + 1;
    v.diag("|A|", a.len(), None);
    v.diag("length bound floor((2y)^(1/2-eps)) + 1", bound, None);
    Ok(match detect_ap(a) {
        None => v.conclude(Conclusion::Fail, "A is not an arithmetic progression"),
        Some(ap) => {
            v.diag("progression", format!("start {} step {} length {}", ap.start, ap.step, ap.len), None);
            if ap.len <= bound {
                v.conclude(Conclusion::Pass, format!("A is a progression of length {} <= {bound}", ap.len))
            } else {
                v.conclude(Conclusion::Fail, format!("A is a progression of length {} > {bound}", ap.len))
            }
        }
    })
}

pub fn check_all_primes_corollary(
    f: &ConstraintFamily,
    a: &IntegerSet,
    constants: Constants,
) -> Result<TheoremVerdict, CheckError> {
    let mut v = TheoremVerdict::new(TheoremId::AllPrimes, constants);
    let y = main_hypotheses(&mut v, f)?;
    let missing: Vec<u64> = arith::primes_between(y, 2 * y).into_iter().filter(|&p| f.constraint_for(p).is_none()).collect();
    v.clause(
        "every prime in [y, 2y] constrained",
        missing.is_empty(),
        format!("{} missing, first {:?}", missing.len(), &missing[..missing.len().min(5)]),
    );
    let e = arith::half() - f.epsilon().min(arith::half());
    let ratio = a.len() as f64 / approx_pow(y, e);
    v.diag("|A| / y^(1/2-eps)", format!("{ratio:.6}"), Some(ratio));
    Ok(match ap_len(a) {
        None => v.conclude(Conclusion::Fail, "A is not an arithmetic progression"),
        Some(len) => v.conclude(
            Conclusion::Reported,
            format!("A is a progression of length {len}; ratio to y^(1/2-eps) is {ratio:.4}"),
        ),
    })
}

pub fn check_interval_theorem(f: &ConstraintFamily, a: &IntegerSet, constants: Constants) -> Result<TheoremVerdict, CheckError> {
    let mut v = TheoremVerdict::new(TheoremId::Interval, constants);
    let parts = single_parts(f, "interval")?;
    let eps = f.epsilon();
    let n = f.n_max();
    eps_clause(&mut v, eps, arith::one());
    n0_clause(&mut v, n);
    let y = dyadic_clause(&mut v, f);
    // (16 log N)^(1/eps) <= y  <=>  16 log N <= y^eps
    let lower = decided_le(decide(|b| (Real::int(16).mul(&ln(n, b), b), pow(y, eps, b))));
    v.clause(
        "y lower bound",
        lower,
        format!("16 log N = {:.4}, y^eps = {:.4}", 16.0 * (n as f64).ln(), approx_pow(y, eps)),
    );
    v.clause("y <= N", y <= n, format!("y = {y}, N = {n}"));
    let e = arith::one() - eps;
    // |P| >= 4 (2y)^(1-eps) log N / log y
    prime_count_clause(&mut v, f, y, Real::int(4), 2 * y, e);
    let not_interval: Vec<u64> = parts.iter().filter(|(_, ap)| ap.len > 1 && ap.step != 1).map(|(p, _)| *p).collect();
    v.clause("each I_p an interval", not_interval.is_empty(), format!("non-intervals at {:?}", &not_interval[..not_interval.len().min(5)]));
    let long = short_parts(&parts, e);
    v.clause("|I_p| <= p^(1-eps) + 1", long.is_empty(), format!("violations at {:?}", &long[..long.len().min(5)]));

    let Some(p0) = f.primes().first().copied() else {
        return Ok(v.conclude(Conclusion::Pass, "no constraints"));
    };
    let bound = arith::floor_pow(p0, e) + 1;
    v.diag("p_0", p0, None);
    v.diag("size bound floor(p_0^(1-eps)) + 1", bound, None);
    Ok(match detect_interval(a) {
        None => v.conclude(Conclusion::Fail, "A is not an interval"),
        Some(IntervalShape::Empty) => v.conclude(Conclusion::Pass, "A is empty"),
        Some(IntervalShape::Range(lo, hi)) => {
            let len = hi - lo + 1;
            if len <= bound {
                v.conclude(Conclusion::Pass, format!("A = [{lo}, {hi}] has {len} <= {bound} elements"))
            } else {
                v.conclude(Conclusion::Fail, format!("A = [{lo}, {hi}] has {len} > {bound} elements"))
            }
        }
    })
}

/// Whether `R_p` is a union of at most `k` progressions, each of length
/// (terms minus one) at most `p^e`.
fn k_short_parts(c: &ResidueConstraint, k: usize, e: Ratio<u64>) -> bool {
    let parts = c.parts();
    parts.len() <= k
        && parts
            .iter()
            .all(|part| part.as_progression().is_some_and(|ap| ap.len <= 1 || le_pow(ap.len - 1, c.p(), e)))
}

/// Relaxed form: constraints at `>= y^(1-eps+delta)` primes of `[y, 2y]`
/// instead of all of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KapOptions {
    pub k: usize,
    pub relaxation: Option<Ratio<u64>>,
}

pub fn check_kap_theorem(
    f: &ConstraintFamily,
    a: &IntegerSet,
    opts: KapOptions,
    constants: Constants,
) -> Result<TheoremVerdict, CheckError> {
    let k = opts.k;
    if k == 0 {
        return Err(CheckError::Input("k must be positive".into()));
    }
    let mut v = TheoremVerdict::new(TheoremId::Kap, constants);
    let eps = f.epsilon();
    let n = f.n_max();
    eps_clause(&mut v, eps, arith::half());
    n0_clause(&mut v, n);
    let y = dyadic_clause(&mut v, f);
    // (log N)^(1/eps) <= y  <=>  log N <= y^eps
    let lower = decided_le(decide(|b| (ln(n, b), pow(y, eps, b))));
    v.clause("y lower bound", lower, format!("log N = {:.4}, y^eps = {:.4}", (n as f64).ln(), approx_pow(y, eps)));
    v.clause("y <= N", y <= n, format!("y = {y}, N = {n}"));
    match opts.relaxation {
        None => {
            let missing = arith::primes_between(y, 2 * y).into_iter().filter(|&p| f.constraint_for(p).is_none()).count();
            v.clause("every prime in [y, 2y] constrained", missing == 0, format!("{missing} missing"));
        }
        Some(delta) => {
            let ok_delta = *delta.numer() > 0 && delta < eps;
            v.clause("relaxation delta in (0, eps)", ok_delta, format!("delta = {delta}"));
            let count = f.constraints().len() as u64;
            let e = arith::exp_sub(arith::one() + delta, eps).unwrap_or_default();
            let enough = BigUint::from(count).pow(*e.denom() as u32) >= BigUint::from(y).pow(*e.numer() as u32);
            v.clause("relaxed prime count", enough, format!("{count} primes, need >= y^({e})"));
        }
    }
    let e = arith::half() - eps.min(arith::half());
    let bad: Vec<u64> = f.constraints().iter().filter(|c| !k_short_parts(c, k, e)).map(|c| c.p()).take(5).collect();
    v.clause(
        "R_p a union of k short progressions",
        bad.is_empty(),
        format!("k = {k}, each of length <= p^(1/2-eps); violations at {bad:?}"),
    );

    let scale = approx_pow(y, e);
    let cap = certified_floor(|b| Real::ratio(v.constants.kap_length).mul(&pow(y, e, b), b))
        .and_then(|x| x.to_u64())
        .unwrap_or(0);
    v.diag("surrogate length cap", cap, None);
    if a.is_empty() {
        return Ok(v.conclude(Conclusion::Pass, "A is empty: zero progressions"));
    }
    if a.len() > EXHAUSTIVE_COVER_LIMIT {
        return Ok(v.conclude(
            Conclusion::Reported,
            format!("|A| = {} exceeds the exhaustive cover limit; cover lengths not measured", a.len()),
        ));
    }
    let (terms, cover) = min_bottleneck_cover(a, k).expect("nonempty small set");
    let bottleneck = terms - 1;
    let ratio = bottleneck as f64 / scale;
    v.diag("shortest k-cover: longest progression length", bottleneck, None);
    v.diag("longest / y^(1/2-eps)", format!("{ratio:.6}"), Some(ratio));
    v.diag(
        "cover",
        cover.aps.iter().map(|ap| format!("{}+{}j (j<{})", ap.start, ap.step, ap.len)).collect::<Vec<_>>().join(", "),
        None,
    );
    if k == 1 {
        v.diag("k = 1: A is a progression", detect_ap(a).is_some(), None);
    }
    Ok(v.conclude(
        Conclusion::Reported,
        format!(
            "A lies in {} progressions of length at most {bottleneck} each (ratio {ratio:.4}; within surrogate cap: {})",
            cover.k(),
            bottleneck <= cap
        ),
    ))
}

/// One sampled instance of the gcd inequality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcdSample {
    pub a: i128,
    pub b: i128,
    pub delta_sum: u64,
    pub ratio: u128,
}

/// Samples coefficient vectors with `sum |delta| + sum |eta| <= 10` over the
/// translate `S - min S` and tests `|a| / gcd(a, b) <= sum |delta| (2y)^(1/2-eps)`
/// exactly. Also runs every pair with one coefficient each.
pub fn check_gcd_lemma(
    s: &IntegerSet,
    f: &ConstraintFamily,
    trials: usize,
    seed: u64,
    constants: Constants,
) -> Result<TheoremVerdict, CheckError> {
    let mut v = TheoremVerdict::new(TheoremId::GcdLemma, constants);
    let y = main_hypotheses(&mut v, f)?;
    let e = arith::half() - f.epsilon().min(arith::half());
    let base = s.min().unwrap_or(0);
    let t: Vec<i128> = s.elements().iter().map(|&x| (x - base) as i128).collect();
    if t.len() < 2 {
        return Ok(v.conclude(Conclusion::Pass, "fewer than two elements"));
    }
    let violates = |a: i128, b: i128, dsum: u64| -> Option<GcdSample> {
        if a == 0 || dsum == 0 {
            return None;
        }
        let g = a.gcd(&b);
        let ratio = a.unsigned_abs() / g.unsigned_abs();
        let holds = cmp_scaled_pow(&BigUint::from(ratio), dsum, 2 * y, e) != std::cmp::Ordering::Greater;
        (!holds).then_some(GcdSample { a, b, delta_sum: dsum, ratio })
    };
    let mut violations = Vec::new();
    let mut checked = 0u64;
    if t.len() <= 100 {
        for &a in &t {
            for &b in &t {
                checked += 1;
                violations.extend(violates(a, b, 1));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let m = rng.gen_range(1..=5usize);
        let mut budget = 10i64;
        let (mut a, mut b, mut dsum) = (0i128, 0i128, 0u64);
        for _ in 0..m {
            let d = if budget > 0 { rng.gen_range(-budget.min(3)..=budget.min(3)) } else { 0 };
            budget -= d.abs();
            let h = if budget > 0 { rng.gen_range(-budget.min(3)..=budget.min(3)) } else { 0 };
            budget -= h.abs();
            a += d as i128 * t[rng.gen_range(0..t.len())];
            b += h as i128 * t[rng.gen_range(0..t.len())];
            dsum += d.unsigned_abs();
        }
        checked += 1;
        violations.extend(violates(a, b, dsum));
    }
    v.diag("instances checked", checked, None);
    v.diag("violations", violations.len(), None);
    if let Some(first) = violations.first() {
        v.diag("first violation", format!("a = {}, b = {}, sum|delta| = {}, a/gcd = {}", first.a, first.b, first.delta_sum, first.ratio), None);
    }
    v.notes.push(format!("sample seed {seed}, {trials} random trials"));
    Ok(if violations.is_empty() {
        v.conclude(Conclusion::Pass, format!("no violations in {checked} instances"))
    } else {
        v.conclude(Conclusion::Fail, format!("{} violations in {checked} instances", violations.len()))
    })
}

/// Larger-sieve upper bound on `|S|` for `S` in an interval of `interval_len`
/// integers with `|S mod p| <= size` at each listed prime.
#[derive(Clone, Debug, PartialEq)]
pub enum GallagherBound {
    /// Denominator `sum log p / |S_p| - log N` is not positive.
    Inapplicable,
    Bound(Real),
}

impl GallagherBound {
    pub fn lower(&self) -> Option<f64> {
        match self {
            GallagherBound::Inapplicable => None,
            GallagherBound::Bound(r) => Some(r.f64_bounds().0),
        }
    }

    pub fn upper(&self) -> Option<f64> {
        match self {
            GallagherBound::Inapplicable => None,
            GallagherBound::Bound(r) => Some(r.f64_bounds().1),
        }
    }
}

/// `(sum log p - log N) / (sum log p / |S_p| - log N)`.
pub fn gallagher_bound(interval_len: u64, sizes: &[(u64, u64)]) -> GallagherBound {
    if sizes.iter().any(|&(_, s)| s == 0) {
        return GallagherBound::Inapplicable;
    }
    for &bits in &PRECISION_LADDER {
        let work = bits + 16;
        let lnn = ln(interval_len, work);
        let mut total = Real::int(0);
        let mut weighted = Real::int(0);
        for &(p, size) in sizes {
            let l = ln(p, work);
            weighted = weighted.add(&l.div(&Real::uint(size), work).expect("positive size"));
            total = total.add(&l);
        }
        let den = weighted.sub(&lnn);
        let zero = Real::int(0);
        match den.try_cmp(&zero) {
            Some(std::cmp::Ordering::Greater) => {
                let num = total.sub(&lnn);
                return GallagherBound::Bound(num.div(&den, bits).expect("positive denominator"));
            }
            Some(_) => return GallagherBound::Inapplicable,
            None => continue,
        }
    }
    GallagherBound::Inapplicable
}

/// The bound for a family's admissible set, with `|R_p|` bounding `|A mod p|`
/// and `N + 1` integers in `[0, N]`.
pub fn gallagher_for_family(f: &ConstraintFamily) -> GallagherBound {
    let sizes: Vec<(u64, u64)> = f.constraints().iter().map(|c| (c.p(), c.residue_count())).collect();
    gallagher_bound(f.n_max() + 1, &sizes)
}

/// `(log N)^(2/(1-eps)) < y <= N`, shared by the energy and GAP theorems.
fn energy_range_clauses(v: &mut TheoremVerdict, f: &ConstraintFamily) -> (u64, Vec<u64>) {
    let eps = f.epsilon();
    let n = f.n_max();
    eps_clause(v, eps, arith::one());
    let y = f.y_low();
    let half_gap = (arith::one() - eps.min(arith::one())) / 2;
    // log N < y^((1-eps)/2)
    let strict = decide(|b| (ln(n, b), pow(y, half_gap, b))).lt();
    v.clause(
        "y lower bound",
        strict,
        format!("log N = {:.4}, y^((1-eps)/2) = {:.4}", (n as f64).ln(), approx_pow(y, half_gap)),
    );
    v.clause("y <= N", y <= n, format!("y = {y}, N = {n}"));
    (y, arith::primes_between(y, 2 * y))
}

pub fn check_energy_theorem(
    s: &IntegerSet,
    f: &ConstraintFamily,
    delta: Ratio<u64>,
    constants: Constants,
) -> Result<TheoremVerdict, CheckError> {
    if *delta.numer() == 0 {
        return Err(CheckError::Input("delta must be positive".into()));
    }
    let mut v = TheoremVerdict::new(TheoremId::Energy, constants);
    let eps = f.epsilon();
    let (y, primes) = energy_range_clauses(&mut v, f);
    let mut too_big = Vec::new();
    let mut low_energy = Vec::new();
    let mut reduced: Vec<(u64, u64, u128)> = Vec::with_capacity(primes.len());
    for &p in &primes {
        let sp = s.reduce_mod(p).len() as u64;
        let ep = additive_energy_mod(s, p, true);
        if sp > 0 && !le_pow(sp, p, eps) {
            too_big.push(p);
        }
        // E(S_p) >= delta |S_p|^3
        if ep * (*delta.denom() as u128) < (*delta.numer() as u128) * (sp as u128).pow(3) {
            low_energy.push(p);
        }
        reduced.push((p, sp, ep));
    }
    v.clause("|S_p| <= p^eps", too_big.is_empty(), format!("violations at {:?}", &too_big[..too_big.len().min(5)]));
    v.clause(
        "E(S_p) >= delta |S_p|^3",
        low_energy.is_empty(),
        format!("delta = {delta}; violations at {:?}", &low_energy[..low_energy.len().min(5)]),
    );

    let size = s.len() as u128;
    let energy = additive_energy(s);
    v.diag("|S|", size, None);
    v.diag("E(S)", energy, None);
    if size <= 1 {
        return Ok(v.conclude(Conclusion::Pass, "|S| <= 1"));
    }
    let ratio = energy as f64 * *delta.denom() as f64 / (*delta.numer() as f64 * (size as f64).powi(3));
    v.diag("E(S) / (delta |S|^3)", format!("{ratio:.6}"), Some(ratio));
    energy_diagnostics(&mut v, s, f.n_max(), y, &reduced, energy);
    if energy < size * size {
        return Ok(v.conclude(Conclusion::Fail, format!("E(S) = {energy} < |S|^2")));
    }
    Ok(v.conclude(Conclusion::Reported, format!("E(S) / (delta |S|^3) = {ratio:.4}")))
}

/// The intermediate inequalities of the energy argument, evaluated in floating point.
fn energy_diagnostics(v: &mut TheoremVerdict, s: &IntegerSet, n: u64, y: u64, reduced: &[(u64, u64, u128)], energy: u128) {
    let size = s.len() as f64;
    let quads = size.powi(4);
    let log_n = (n as f64).ln();
    // log form: sum over unequal-sum quadruples of log|a+b-c-d| against (|S|^4 - E) log 2N
    let mut hist: std::collections::BTreeMap<u64, u64> = std::collections::BTreeMap::new();
    for &a in s.elements() {
        for &b in s.elements() {
            *hist.entry(a + b).or_default() += 1;
        }
    }
    if hist.len() <= 4000 {
        let entries: Vec<(u64, u64)> = hist.into_iter().collect();
        let mut lhs = 0.0;
        for (i, &(x, rx)) in entries.iter().enumerate() {
            for &(z, rz) in &entries[i + 1..] {
                lhs += 2.0 * (rx * rz) as f64 * ((z - x) as f64).ln();
            }
        }
        let rhs = (quads - energy as f64) * ((2 * n) as f64).ln();
        if rhs > 0.0 {
            v.diag("log-product ratio (<= 1)", format!("{:.6}", lhs / rhs), Some(lhs / rhs));
        }
    }
    // fourth-power form: sum_p (E_p(S) - E(S)) log p against |S|^4 log N
    let primes: Vec<u64> = reduced.iter().map(|r| r.0).collect();
    let lower: f64 = primes
        .iter()
        .map(|&p| (additive_energy_mod(s, p, false) as f64 - energy as f64) * (p as f64).ln())
        .sum();
    v.diag("sum_p (E_p(S) - E(S)) log p / (|S|^4 log N)", format!("{:.6}", lower / (quads * log_n)), Some(lower / (quads * log_n)));
    // larger sieve applied to S itself
    let sizes: Vec<(u64, u64)> = reduced.iter().filter(|r| r.1 > 0).map(|r| (r.0, r.1)).collect();
    match gallagher_bound(n + 1, &sizes) {
        GallagherBound::Inapplicable => v.diag("larger-sieve bound", "inapplicable", None),
        GallagherBound::Bound(r) => v.diag_real("larger-sieve bound on |S|", &r),
    }
    // Hölder: (sum |S_p|^3 log p)(sum log p / |S_p|)^3 >= (sum log p)^4
    let cube: f64 = sizes.iter().map(|&(p, sp)| (sp as f64).powi(3) * (p as f64).ln()).sum();
    let inv: f64 = sizes.iter().map(|&(p, sp)| (p as f64).ln() / sp as f64).sum();
    let tot: f64 = sizes.iter().map(|&(p, _)| (p as f64).ln()).sum();
    if tot > 0.0 {
        let holder = cube * inv.powi(3) / tot.powi(4);
        v.diag("Hölder ratio (>= 1)", format!("{holder:.6}"), Some(holder));
        let y4 = (y as f64).powi(4) / inv.powi(3);
        v.diag("sum |S_p|^3 log p / (y^4 (sum log p/|S_p|)^-3)", format!("{:.6}", cube / y4), Some(cube / y4));
    }
}

/// Default budget factor: a GAP counts as found when `|Q| <= factor * |S'|`.
pub const GAP_FACTOR: u128 = 16;

/// Order in which elements leave the energy core, least additive participation first.
fn energy_peel_order(s: &[u64]) -> Vec<u64> {
    let mut left: Vec<u64> = s.to_vec();
    let mut order = Vec::with_capacity(s.len());
    while left.len() > 1 {
        let mut hist: std::collections::HashMap<u64, u64> = std::collections::HashMap::new();
        for &a in &left {
            for &b in &left {
                *hist.entry(a + b).or_default() += 1;
            }
        }
        // q(s) = sum_b r(s + b); ties remove the larger element
        let (idx, _) = left
            .iter()
            .enumerate()
            .map(|(i, &x)| (i, left.iter().map(|&b| hist[&(x + b)]).sum::<u64>()))
            .min_by(|(i, qi), (j, qj)| qi.cmp(qj).then(left[*j].cmp(&left[*i])))
            .unwrap();
        order.push(left.remove(idx));
    }
    order.extend(left);
    order
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyCore {
    pub subset: Vec<u64>,
    pub gap: Option<crate::types::GapDescription>,
}

/// Peels low-participation elements and returns the largest core (at most
/// 30 elements) that sits in a GAP of rank <= 2 with volume <= factor * size.
pub fn extract_energy_core(s: &IntegerSet, factor: u128) -> EnergyCore {
    let order = energy_peel_order(s.elements());
    let n = order.len();
    let top = n.min(GAP_SEARCH_LIMIT);
    let sizes: Vec<usize> = (1..=top).rev().filter(|&m| m <= 12 || m == top || m % 3 == 0).collect();
    for m in sizes {
        let subset = IntegerSet::from_unsorted(order[n - m..].to_vec());
        if let Some(gap) = search_low_rank_gap(&subset, 2, factor * m as u128) {
            return EnergyCore { subset: subset.elements().to_vec(), gap: Some(gap) };
        }
    }
    EnergyCore { subset: vec![], gap: None }
}

pub fn check_inverse_gap_theorem(
    s: &IntegerSet,
    f: &ConstraintFamily,
    r: usize,
    delta: Ratio<u64>,
    constants: Constants,
) -> Result<TheoremVerdict, CheckError> {
    if *delta.numer() == 0 || delta > arith::one() || r == 0 {
        return Err(CheckError::Input("need delta in (0, 1] and r >= 1".into()));
    }
    let mut v = TheoremVerdict::new(TheoremId::InverseGap, constants);
    let eps = f.epsilon();
    let (_, primes) = energy_range_clauses(&mut v, f);
    let (mut missing, mut not_gap, mut not_covering, mut too_large) = (0, Vec::new(), Vec::new(), Vec::new());
    for &p in &primes {
        let Some(c) = f.constraint_for(p) else {
            missing += 1;
            continue;
        };
        // a single progression is a rank-1 GAP mod p
        if c.normalize().ok().and_then(|n| n.constraint.single_progression().copied()).is_none() {
            not_gap.push(p);
        }
        let sp = s.reduce_mod(p);
        if !sp.iter().all(|&x| c.contains_residue(x)) {
            not_covering.push(p);
        }
        let rp = c.residue_count() as u128;
        let spn = sp.len() as u128;
        let (dn, dd) = (*delta.numer() as u128, *delta.denom() as u128);
        // |R_p| <= |S_p| / delta  and  |S_p| / delta <= p^eps
        let first = rp * dn <= spn * dd;
        let second = spn == 0
            || cmp_scaled_pow(&BigUint::from(spn * dd), *delta.numer(), p, eps) != std::cmp::Ordering::Greater;
        if !(first && second) {
            too_large.push(p);
        }
    }
    v.clause("every prime in [y, 2y] constrained", missing == 0, format!("{missing} missing"));
    v.clause(
        "R_p a GAP of rank <= r",
        not_gap.is_empty() && r >= 1,
        format!("r = {r}; only single progressions are recognised; others at {:?}", &not_gap[..not_gap.len().min(5)]),
    );
    v.clause("S_p inside R_p", not_covering.is_empty(), format!("violations at {:?}", &not_covering[..not_covering.len().min(5)]));
    v.clause(
        "|R_p| <= |S_p|/delta <= p^eps",
        too_large.is_empty(),
        format!("delta = {delta}; violations at {:?}", &too_large[..too_large.len().min(5)]),
    );
    if s.is_empty() {
        return Ok(v.conclude(Conclusion::Pass, "S is empty"));
    }
    v.diag("|S|", s.len(), None);
    v.diag("|S+S|", doubling(s), None);
    let core = extract_energy_core(s, GAP_FACTOR);
    let Some(gap) = core.gap else {
        return Ok(v.conclude(Conclusion::Reported, "no low-rank GAP within budget on any peeled core"));
    };
    let frac = core.subset.len() as f64 / s.len() as f64;
    let dens = gap.volume() as f64 / core.subset.len() as f64;
    v.diag("|S'| / |S|", format!("{}/{}", core.subset.len(), s.len()), Some(frac));
    v.diag("rank", gap.rank(), None);
    v.diag("|Q| / |S'|", format!("{}/{}", gap.volume(), core.subset.len()), Some(dens));
    v.diag("Q", &gap, None);
    Ok(v.conclude(
        Conclusion::Reported,
        format!("S' of size {} in a rank-{} GAP of volume {}", core.subset.len(), gap.rank(), gap.volume()),
    ))
}

/// `floor(2 (16 log N)^(1/eps))`, the top of the prime range of the interval sieve.
pub fn interval_sieve_top(n: u64, eps: Ratio<u64>) -> u64 {
    let inv = Ratio::new(*eps.denom(), *eps.numer());
    certified_floor(|b| Real::int(2).mul(&Real::int(16).mul(&ln(n, b), b).powr(&Real::ratio(inv), b).unwrap(), b))
        .and_then(|x| x.to_u64())
        .unwrap_or(u64::MAX)
}

/// `floor((log N)^(1/eps))`, the top of the prime range of the progression sieve.
pub fn kap_sieve_top(n: u64, eps: Ratio<u64>) -> u64 {
    let inv = Ratio::new(*eps.denom(), *eps.numer());
    certified_floor(|b| ln(n, b).powr(&Real::ratio(inv), b).unwrap())
        .and_then(|x| x.to_u64())
        .unwrap_or(u64::MAX)
}

fn coverage_clause(v: &mut TheoremVerdict, f: &ConstraintFamily, lo: u64, hi: u64) {
    if hi > 50_000_000 {
        v.clause("every prime in range constrained", false, format!("range [{lo}, {hi}] is beyond desk scale"));
        return;
    }
    let missing: Vec<u64> = arith::primes_between(lo, hi).into_iter().filter(|&p| f.constraint_for(p).is_none()).collect();
    v.clause(
        "every prime in range constrained",
        missing.is_empty(),
        format!("[{lo}, {hi}]: {} missing, first {:?}", missing.len(), &missing[..missing.len().min(5)]),
    );
    let extra = f.primes().into_iter().filter(|&p| p < lo || p > hi).count();
    if extra > 0 {
        v.notes.push(format!("{extra} constraints lie outside [{lo}, {hi}]; they only shrink A"));
    }
}

pub fn check_interval_sieve_theorem(
    f: &ConstraintFamily,
    a: &IntegerSet,
    p0: u64,
    constants: Constants,
) -> Result<TheoremVerdict, CheckError> {
    let mut v = TheoremVerdict::new(TheoremId::IntervalSieve, constants);
    let eps = f.epsilon();
    let n = f.n_max();
    eps_clause(&mut v, eps, arith::one());
    n0_clause(&mut v, n);
    v.clause("p_0 prime", arith::is_prime(p0), format!("p_0 = {p0}"));
    // p0 <= (16 log N)^(1/eps)  <=>  p0^eps <= 16 log N
    let ok = decided_le(decide(|b| (pow(p0, eps, b), Real::int(16).mul(&ln(n, b), b))));
    v.clause("p_0 <= (16 log N)^(1/eps)", ok, format!("(16 log N)^(1/eps) ~ {}", interval_scale(n, eps)));
    let top = interval_sieve_top(n, eps);
    coverage_clause(&mut v, f, p0, top);
    let e = arith::one() - eps;
    let bad: Vec<u64> = f
        .constraints()
        .iter()
        .filter(|c| {
            c.normalize()
                .ok()
                .and_then(|n| n.constraint.single_progression().copied())
                .is_none_or(|ap| (ap.len > 1 && ap.step != 1) || (ap.len > 1 && !le_pow(ap.len - 1, c.p(), e)))
        })
        .map(|c| c.p())
        .take(5)
        .collect();
    v.clause("I_p intervals with |I_p| <= p^(1-eps) + 1", bad.is_empty(), format!("violations at {bad:?}"));

    let bound_interval = arith::floor_pow(p0, e) + 1;
    let bound = bound_interval.max(v.constants.n0);
    v.diag("length bound max(floor(p_0^(1-eps)) + 1, N_0)", bound, None);
    if v.hypotheses_met && f.n_max() <= 100_000_000 {
        let loc = iterated_interval_localization(f, p0, v.constants.n0, None);
        v.diag("localization rounds", loc.rounds.len(), None);
        v.diag("localized interval", format!("{:?}", loc.interval), None);
        v.diag("localized interval contains A", loc.contains_admissible, None);
    }
    let Some((lo, hi)) = a.min().zip(a.max()) else {
        return Ok(v.conclude(Conclusion::Pass, "A is empty"));
    };
    let len = hi - lo + 1;
    Ok(if len <= bound {
        v.conclude(Conclusion::Pass, format!("A lies in [{lo}, {hi}] of length {len} <= {bound}"))
    } else {
        v.conclude(Conclusion::Fail, format!("A spans [{lo}, {hi}] of length {len} > {bound}"))
    })
}

pub fn check_kap_sieve_theorem(
    f: &ConstraintFamily,
    a: &IntegerSet,
    p0: u64,
    k: usize,
    constants: Constants,
) -> Result<TheoremVerdict, CheckError> {
    let mut v = TheoremVerdict::new(TheoremId::KapSieve, constants);
    let eps = f.epsilon();
    let n = f.n_max();
    eps_clause(&mut v, eps, arith::half());
    n0_clause(&mut v, n);
    // p0 <= (log N)^(1/eps) / 2  <=>  (2 p0)^eps <= log N
    let ok = decided_le(decide(|b| (pow(2 * p0, eps, b), ln(n, b))));
    v.clause("p_0 <= (log N)^(1/eps) / 2", ok, format!("p_0 = {p0}"));
    let top = kap_sieve_top(n, eps);
    let lo = if arith::is_prime(p0) { p0 } else { arith::next_prime(p0) };
    coverage_clause(&mut v, f, lo, top);
    let e = arith::half() - eps.min(arith::half());
    let bad: Vec<u64> = f.constraints().iter().filter(|c| !k_short_parts(c, k, e)).map(|c| c.p()).take(5).collect();
    v.clause("R_p a union of k short progressions", bad.is_empty(), format!("k = {k}; violations at {bad:?}"));
    let denom = (n as f64).ln().powf(*e.numer() as f64 / *e.denom() as f64) + approx_pow(p0, e);
    let ratio = a.len() as f64 / denom;
    v.diag("|A|", a.len(), None);
    v.diag("|A| / ((log N)^(1/2-eps) + p_0^(1/2-eps))", format!("{ratio:.6}"), Some(ratio));
    Ok(v.conclude(Conclusion::Reported, format!("|A| = {} against scale {denom:.4}: ratio {ratio:.4}", a.len())))
}

/// Both sieve variants on one family.
pub fn check_sieve_theorems(
    f: &ConstraintFamily,
    a: &IntegerSet,
    p0: u64,
    k: usize,
    constants: Constants,
) -> Result<Vec<TheoremVerdict>, CheckError> {
    Ok(vec![
        check_interval_sieve_theorem(f, a, p0, constants)?,
        check_kap_sieve_theorem(f, a, p0, k, constants)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::*;
    use crate::sieve::sieve_fast;
    use crate::types::PrimeModulus;

    fn sieve(f: &ConstraintFamily) -> IntegerSet {
        sieve_fast(f, None).admissible
    }

    #[test]
    fn theorem_ids_round_trip() {
        for t in TheoremId::ALL {
            assert_eq!(t.as_str().parse::<TheoremId>().unwrap(), t);
        }
        assert!("nope".parse::<TheoremId>().is_err());
    }

    #[test]
    fn main_theorem_on_sharp_instance() {
        let out = construct_interval_sharp(1_000_000, 1000, Ratio::new(2, 5)).unwrap();
        let a = sieve(&out.family);
        let v = check_main_theorem(&out.family, &a, Constants::default()).unwrap();
        assert!(v.hypotheses_met, "{:?}", v.clauses);
        assert_eq!(v.conclusion, Conclusion::Pass);
        assert_eq!(v.exit_code(), 0);
    }

    #[test]
    fn main_theorem_small_epsilon_fails_y_clause() {
        let out = construct_interval_sharp(1_000_000, 1000, Ratio::new(1, 10)).unwrap();
        let a = sieve(&out.family);
        let v = check_main_theorem(&out.family, &a, Constants::default()).unwrap();
        let y = v.clauses.iter().find(|c| c.name == "y lower bound").unwrap();
        assert!(!y.holds);
        assert_eq!(v.exit_code(), 2);
    }

    #[test]
    fn half_power_violates_size_clause() {
        let out = construct_half_power_counterexample(20_000, 10_000, 7, 1013, Ratio::new(1, 10)).unwrap();
        let a = sieve(&out.family);
        let v = check_main_theorem(&out.family, &a, Constants::default()).unwrap();
        let c = v.clauses.iter().find(|c| c.name.starts_with("|R_p|")).unwrap();
        assert!(!c.holds);
        assert_eq!(v.conclusion, Conclusion::Fail);
        assert_eq!(v.exit_code(), 2);
    }

    #[test]
    fn multi_part_is_wrong_theorem() {
        let out = construct_kap_nonunion(2, 10_000, 20_000, Ratio::new(1, 10)).unwrap();
        let a = sieve(&out.family);
        assert!(matches!(check_main_theorem(&out.family, &a, Constants::default()), Err(CheckError::WrongTheorem { .. })));
    }

    #[test]
    fn empty_set_passes_main() {
        let out = construct_interval_sharp(1_000_000, 1000, Ratio::new(2, 5)).unwrap();
        let v = check_main_theorem(&out.family, &IntegerSet::empty(1_000_000), Constants::default()).unwrap();
        assert_eq!(v.conclusion, Conclusion::Pass);
    }

    #[test]
    fn corollary_missing_prime() {
        let out = construct_interval_sharp(1_000_000, 1000, Ratio::new(2, 5)).unwrap();
        let a = sieve(&out.family);
        let v = check_all_primes_corollary(&out.family, &a, Constants::default()).unwrap();
        assert!(v.hypotheses_met);
        assert_eq!(v.conclusion, Conclusion::Reported);
        let trimmed = ConstraintFamily::new(
            out.family.n_max(),
            out.family.epsilon(),
            1000,
            2000,
            out.family.constraints()[1..].to_vec(),
        )
        .unwrap();
        let v = check_all_primes_corollary(&trimmed, &sieve(&trimmed), Constants::default()).unwrap();
        assert!(!v.hypotheses_met);
    }

    #[test]
    fn interval_theorem_sharp_example() {
        let eps = Ratio::new(1, 2);
        let n = 1_000_000u64;
        let y = 50_000u64;
        let cs: Vec<ResidueConstraint> = arith::primes_between(y, 2 * y)
            .into_iter()
            .map(|p| ResidueConstraint::single(PrimeModulus::new(p).unwrap(), ModProgression::interval(0, arith::floor_pow(p, eps))))
            .collect();
        let f = ConstraintFamily::new(n, eps, y, 2 * y, cs).unwrap();
        let a = sieve(&f);
        let v = check_interval_theorem(&f, &a, Constants::default()).unwrap();
        assert!(v.hypotheses_met, "{:?}", v.clauses);
        assert_eq!(v.conclusion, Conclusion::Pass, "{}", v.conclusion_detail);
        assert_eq!(a.len() as u64, arith::floor_pow(f.primes()[0], eps) + 1);
    }

    #[test]
    fn kap_theorem_reports_cover() {
        let out = construct_kap_nonunion(2, 10_000, 20_000, Ratio::new(1, 10)).unwrap();
        let a = sieve(&out.family);
        let v = check_kap_theorem(&out.family, &a, KapOptions { k: 2, relaxation: None }, Constants::default()).unwrap();
        assert!(v.clauses.iter().find(|c| c.name.starts_with("R_p")).unwrap().holds);
        assert_eq!(v.conclusion, Conclusion::Reported);
        let empty = check_kap_theorem(&out.family, &IntegerSet::empty(20_000), KapOptions { k: 2, relaxation: None }, Constants::default()).unwrap();
        assert_eq!(empty.conclusion, Conclusion::Pass);
    }

    #[test]
    fn gcd_lemma_on_sharp_instance() {
        let out = construct_interval_sharp(1_000_000, 1000, Ratio::new(2, 5)).unwrap();
        let a = sieve(&out.family);
        let v = check_gcd_lemma(&a, &out.family, 500, 1, Constants::default()).unwrap();
        assert_eq!(v.conclusion, Conclusion::Pass);
        // a progression {0, d, ..., L d} with L within the bound
        let s = IntegerSet::from_unsorted(vec![0, 7, 14]);
        let v = check_gcd_lemma(&s, &out.family, 200, 2, Constants::default()).unwrap();
        assert_eq!(v.conclusion, Conclusion::Pass);
    }

    #[test]
    fn gallagher_degenerate_cases() {
        assert_eq!(gallagher_bound(1000, &[(2, 2), (3, 3)]), GallagherBound::Inapplicable);
        let sizes: Vec<(u64, u64)> = arith::primes_between(100, 400).into_iter().map(|p| (p, 1)).collect();
        let b = gallagher_bound(1000, &sizes);
        let (lo, hi) = (b.lower().unwrap(), b.upper().unwrap());
        assert!(lo <= 1.0 && 1.0 <= hi && hi - lo < 1e-12);
    }

    #[test]
    fn energy_of_progression() {
        let out = construct_interval_sharp(1_000_000, 1000, Ratio::new(2, 5)).unwrap();
        let s = IntegerSet::from_unsorted((0..10).map(|j| 3 * j).collect());
        let v = check_energy_theorem(&s, &out.family, Ratio::new(1, 2), Constants::default()).unwrap();
        let ratio = v.diagnostics.iter().find(|d| d.name.starts_with("E(S) /")).unwrap().approx.unwrap();
        assert!(ratio >= 2.0 / 3.0 / 0.5 - 1e-9);
        assert_eq!(v.conclusion, Conclusion::Reported);
        let one = check_energy_theorem(&IntegerSet::from_unsorted(vec![5]), &out.family, Ratio::new(1, 2), Constants::default()).unwrap();
        assert_eq!(one.conclusion, Conclusion::Pass);
    }

    #[test]
    fn energy_core_of_gap_minus_point() {
        let mut elems: Vec<u64> = Vec::new();
        for n1 in 0..5 {
            for n2 in 0..3 {
                elems.push(5 * n1 + 21 * n2);
            }
        }
        elems.retain(|&x| x != 26);
        let core = extract_energy_core(&IntegerSet::from_unsorted(elems.clone()), GAP_FACTOR);
        assert_eq!(core.subset.len(), elems.len());
        assert!(core.gap.unwrap().volume() <= 15);
        let ap = IntegerSet::from_unsorted((0..8).map(|j| 4 + 9 * j).collect());
        let core = extract_energy_core(&ap, GAP_FACTOR);
        assert_eq!(core.subset.len(), 8);
        assert_eq!(core.gap.unwrap().rank(), 1);
    }

    #[test]
    fn sieve_theorems_on_remark_instances() {
        let eps = Ratio::new(1, 2);
        let n = 5000;
        let top = interval_sieve_top(n, eps);
        let out = construct_interval_sieve_sharp(n, 101, top, eps).unwrap();
        let a = sieve(&out.family);
        let v = check_interval_sieve_theorem(&out.family, &a, 101, Constants::default()).unwrap();
        assert!(v.hypotheses_met, "{:?}", v.clauses);
        assert_eq!(v.conclusion, Conclusion::Pass);
        let v = check_interval_sieve_theorem(&out.family, &IntegerSet::empty(n), 101, Constants::default()).unwrap();
        assert_eq!(v.conclusion, Conclusion::Pass);

        let eps = Ratio::new(2, 5);
        let n = 100_000;
        let out = construct_kap_sieve_small_p0(n, kap_sieve_top(n, eps), eps).unwrap();
        let a = sieve(&out.family);
        let v = check_kap_sieve_theorem(&out.family, &a, 2, 1, Constants::default()).unwrap();
        assert!(v.hypotheses_met, "{:?}", v.clauses);
        assert_eq!(v.conclusion, Conclusion::Reported);
    }

    #[test]
    fn verdict_round_trips_through_json() {
        let out = construct_interval_sharp(1_000_000, 1000, Ratio::new(2, 5)).unwrap();
        let a = sieve(&out.family);
        let v = check_all_primes_corollary(&out.family, &a, Constants::default()).unwrap();
        let text = serde_json::to_string(&v).unwrap();
        let back: TheoremVerdict = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
    }
}
