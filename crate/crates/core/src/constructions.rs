//! Generators for the sharpness examples: concrete constraint families paired
//! with claims about their admissible sets that a sieve run can confirm.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{self, floor_pow};
use crate::error::ConstructionError;
use crate::par;
use crate::real::{certified_floor, decide, Real};
use crate::structure::{detect_ap, minimal_ap_cover};
use crate::types::{ConstraintFamily, IntegerSet, ModProgression, ModQuadratic, PrimeModulus, ResidueConstraint, ResiduePart};

/// Checkable claims about the admissible set of a generated family.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predictions {
    /// The admissible set itself, when it is known exactly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<u64>,
    /// Excluded integers, each with a prime whose residue set rejects it.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub excluded: Vec<Exclusion>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub empty_ranges: Vec<(u64, u64)>,
    #[serde(default)]
    pub not_an_ap: bool,
    /// `A` fits in no progression with at most this many terms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub no_progression_of_length: Option<u64>,
    /// `A` is not a union of this many progressions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub not_union_of: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_size: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub n: u64,
    pub witness_prime: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionOutcome {
    pub claim: String,
    pub holds: bool,
}

impl Predictions {
    /// Evaluates every claim against a computed admissible set.
    pub fn evaluate(&self, a: &IntegerSet) -> Vec<PredictionOutcome> {
        let mut out = Vec::new();
        let mut push = |claim: String, holds: bool| out.push(PredictionOutcome { claim, holds });
        if let Some(exact) = &self.exact {
            push(format!("A equals the predicted set of size {}", exact.len()), a.elements() == exact.as_slice());
        }
        if !self.members.is_empty() {
            let missing: Vec<u64> = self.members.iter().copied().filter(|&n| !a.contains(n)).collect();
            push(format!("{} predicted members lie in A (missing {:?})", self.members.len(), missing), missing.is_empty());
        }
        if !self.excluded.is_empty() {
            let present: Vec<u64> = self.excluded.iter().map(|e| e.n).filter(|&n| a.contains(n)).collect();
            push(format!("{} predicted non-members avoid A (present {:?})", self.excluded.len(), present), present.is_empty());
        }
        for &(lo, hi) in &self.empty_ranges {
            let hit = a.elements().iter().any(|&n| lo <= n && n <= hi);
            push(format!("A ∩ [{lo}, {hi}] is empty"), !hit);
        }
        if self.not_an_ap {
            push("A is not an arithmetic progression".into(), detect_ap(a).is_none());
        }
        if let Some(len) = self.no_progression_of_length {
            let hull = progression_hull_len(a);
            push(format!("shortest progression containing A has {hull} > {len} terms"), hull > len as u128);
        }
        if let Some(k) = self.not_union_of {
            push(format!("A is not a union of {k} progressions"), minimal_ap_cover(a, k).is_none());
        }
        if let Some(m) = self.max_size {
            push(format!("|A| = {} <= {m}", a.len()), a.len() as u64 <= m);
        }
        out
    }
}

/// Terms in the shortest progression containing `A`: `(max - min)/g + 1`, `g`
/// the gcd of the differences.
pub fn progression_hull_len(a: &IntegerSet) -> u128 {
    match (a.min(), a.max()) {
        (Some(lo), Some(hi)) if hi > lo => {
            let g = a.elements().iter().fold(0u64, |g, &x| g.gcd(&(x - lo)));
            ((hi - lo) / g + 1) as u128
        }
        (Some(_), _) => 1,
        _ => 0,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionOutput {
    pub family: ConstraintFamily,
    pub predicted: Predictions,
    pub notes: Vec<String>,
}

fn pm(p: u64) -> PrimeModulus {
    PrimeModulus::new(p).expect("generated modulus is prime")
}

fn primes_in(lo: u64, hi: u64) -> Result<Vec<u64>, ConstructionError> {
    let ps = arith::primes_between(lo, hi);
    if ps.is_empty() {
        return Err(ConstructionError::NoPrime(lo, hi));
    }
    Ok(ps)
}

fn check_epsilon(eps: Ratio<u64>, below: Ratio<u64>) -> Result<(), ConstructionError> {
    if *eps.numer() == 0 || eps >= below {
        return Err(ConstructionError::Parameters(format!("epsilon {eps} must lie in (0, {below})")));
    }
    Ok(())
}

/// `R_p = [0, floor(p^(1/2-eps))]` for every prime in `[y, 2y]`; the admissible
/// set is `[0, floor(q^(1/2-eps))]` with `q` the least such prime.
pub fn construct_interval_sharp(n_max: u64, y: u64, eps: Ratio<u64>) -> Result<ConstructionOutput, ConstructionError> {
    check_epsilon(eps, arith::half())?;
    if y < 2 || y > n_max {
        return Err(ConstructionError::Parameters(format!("need 2 <= y <= N, got y = {y}, N = {n_max}")));
    }
    let exp = arith::half() - eps;
    let primes = primes_in(y, 2 * y)?;
    let constraints = primes
        .iter()
        .map(|&p| ResidueConstraint::single(pm(p), ModProgression::interval(0, floor_pow(p, exp))))
        .collect();
    let q = primes[0];
    let top = floor_pow(q, exp).min(n_max);
    Ok(ConstructionOutput {
        family: ConstraintFamily::new(n_max, eps, y, 2 * y, constraints)?,
        predicted: Predictions { exact: Some((0..=top).collect()), ..Default::default() },
        notes: vec![format!("q = {q}, floor(q^({exp})) = {top}")],
    })
}

/// Least `d in [1, p-1]` with `||q1 d / p|| < 1/sqrt(p)` and `||q2 d / p|| < 1/sqrt(p)`.
pub fn find_simultaneous_approx(p: u64, q1: u64, q2: u64) -> Result<u64, ConstructionError> {
    if !arith::is_prime(p) || q1 == 0 || q2 == 0 || q1 >= p || q2 >= p {
        return Err(ConstructionError::Parameters(format!("need prime p and 1 <= q1, q2 < p (p={p}, q1={q1}, q2={q2})")));
    }
    Ok(arith::simultaneous_small_multiplier(p, q1 as i128, q2 as i128).expect("pigeonhole"))
}

/// Residue sets of size `2 floor(sqrt p) + 1` chosen so that `0, q1, q2` are
/// admissible while the admissible set fits in no short progression.
pub fn construct_half_power_counterexample(
    n_max: u64,
    y: u64,
    q1: u64,
    q2: u64,
    eps: Ratio<u64>,
) -> Result<ConstructionOutput, ConstructionError> {
    if !arith::is_prime(q1) || !arith::is_prime(q2) {
        return Err(ConstructionError::Parameters("q1 and q2 must be prime".into()));
    }
    // q1 < y^(1/4) and y^(3/4) < q2 <= N
    if q1.pow(4) >= y || (q2 as u128).pow(4) <= (y as u128).pow(3) || q2 > n_max {
        return Err(ConstructionError::Parameters(format!(
            "need q1 < y^(1/4) and y^(3/4) < q2 <= N (y={y}, q1={q1}, q2={q2}, N={n_max})"
        )));
    }
    let primes: Vec<u64> = primes_in(y, 2 * y)?.into_iter().filter(|&p| p != q1 && p != q2).collect();
    let constraints = par::map(&primes, |&p| {
        let d = arith::simultaneous_small_multiplier(p, q1 as i128, q2 as i128).expect("pigeonhole");
        let e = arith::mod_inverse(d, p).expect("prime modulus");
        let r = arith::isqrt(p) as i64;
        ResidueConstraint::single(pm(p), ModProgression::symmetric(e, -r, r, p))
    });
    let hull = arith::isqrt(y);
    Ok(ConstructionOutput {
        family: ConstraintFamily::new(n_max, eps, y, 2 * y, constraints)?,
        predicted: Predictions {
            members: vec![0, q1, q2],
            not_an_ap: true,
            no_progression_of_length: Some(hull),
            ..Default::default()
        },
        notes: vec![format!("{} primes in [{y}, {}] excluding q1 = {q1}, q2 = {q2}", primes.len(), 2 * y)],
    })
}

/// Dyadic scale used for the window grid.
const WINDOW_BITS: u32 = 64;

/// Primes in `[N, 2N]` whose fraction `d_p/p` falls in one short window
/// `[x, x + N^(-1-2eps)/100]`, the window chosen to hold the most fractions.
pub fn construct_thin_prime_counterexample(n_max: u64, eps: Ratio<u64>) -> Result<ConstructionOutput, ConstructionError> {
    check_epsilon(eps, arith::half())?;
    if !(100..=1_000_000).contains(&n_max) {
        return Err(ConstructionError::Parameters(format!("N = {n_max} outside [100, 10^6]")));
    }
    let scale = BigInt::one() << WINDOW_BITS as usize;
    let dyadic = |r: &Real| -> BigInt { (r.lo() * BigRational::from_integer(scale.clone())).floor().to_integer() };
    // lo = N^(-1/2-eps)/20, width = N^(-1-2eps)/100, as dyadics with 2^-64 resolution
    let half_plus = arith::half() + eps;
    let base = Real::uint(n_max).powr(&Real::ratio(half_plus), 256).expect("positive");
    let inv = Real::int(1).div(&base, 256).expect("nonzero");
    let lo = dyadic(&inv.div(&Real::int(20), 256).unwrap());
    let hi = dyadic(&inv.div(&Real::int(10), 256).unwrap());
    let width = dyadic(&inv.mul(&inv, 256).div(&Real::int(100), 256).unwrap());
    if width <= BigInt::from(0) {
        return Err(ConstructionError::Parameters("window width underflows the dyadic grid".into()));
    }
    let lo = lo.to_i128().unwrap();
    let hi = hi.to_i128().unwrap();
    let width = width.to_i128().unwrap();
    let windows = ((hi - lo) + width - 1) / width;

    let primes = primes_in(n_max, 2 * n_max)?;
    // window indices whose closed range holds c/p
    let hits: Vec<Vec<(i128, u64, u64)>> = par::map(&primes, |&p| {
        let mut out = Vec::new();
        let p128 = p as i128;
        let c_lo = (lo * p128) >> WINDOW_BITS;
        for c in c_lo.max(1)..p128 {
            let pos = (c << WINDOW_BITS) - lo * p128; // (c/p - lo) scaled by 2^64 p
            if pos < 0 {
                continue;
            }
            if pos > windows * width * p128 {
                break;
            }
            let i = pos / (width * p128);
            if i < windows {
                out.push((i, p, c as u64));
            }
            if pos % (width * p128) == 0 && i > 0 {
                out.push((i - 1, p, c as u64));
            }
        }
        out
    });
    let mut counts = vec![0usize; windows as usize];
    for h in hits.iter().flatten() {
        counts[h.0 as usize] += 1;
    }
    // lowest index wins ties
    let (best, &count) = counts.iter().enumerate().rev().max_by_key(|&(_, c)| c).unwrap_or((0, &0));
    if count < 3 {
        return Err(ConstructionError::ScaleTooSmall { count, needed: 3 });
    }
    let exp = arith::half() - eps;
    let mut constraints = Vec::new();
    for &(i, p, d) in hits.iter().flatten() {
        if i as usize == best {
            let e = arith::mod_inverse(d, p).expect("prime modulus");
            constraints.push(ResidueConstraint::single(pm(p), ModProgression::new(0, e, floor_pow(p, exp) + 1)));
        }
    }
    let x_num = lo + best as i128 * width;
    // m = ceil(1/x) = ceil(2^64 / x_num)
    let m = ((1i128 << WINDOW_BITS) + x_num - 1) / x_num;
    let mut members = vec![0, 1, 2, 3, 4];
    if (m as u64) <= n_max {
        members.push(m as u64);
    }
    let y_low = constraints.iter().map(|c: &ResidueConstraint| c.p()).min().unwrap();
    let y_high = constraints.iter().map(|c| c.p()).max().unwrap();
    let family = ConstraintFamily::new(n_max, eps, y_low, y_high, constraints)?;
    let notes = vec![
        format!("window {best} of {windows} holds {count} fractions"),
        format!("x = {x_num} / 2^{WINDOW_BITS}, m = ceil(1/x) = {m}"),
    ];
    Ok(ConstructionOutput {
        family,
        predicted: Predictions {
            members,
            empty_ranges: vec![(20, 30)],
            not_an_ap: true,
            ..Default::default()
        },
        notes,
    })
}

/// Extended-Euclid pair `(a, d)` with `d D - a p = 1`, `0 <= a < D`, `0 <= d < p`.
pub fn flush_coefficients(d_modulus: u64, p: u64) -> Option<(u64, u64)> {
    let d = arith::mod_inverse(d_modulus % p, p)?;
    let a = (d as u128 * d_modulus as u128 - 1) / p as u128;
    Some((a as u64, d))
}

/// Least prime `D > 2 N^(1/2+eps)`.
pub fn flush_modulus(n_max: u64, eps: Ratio<u64>) -> u64 {
    let exp = arith::half() + eps;
    let (num, den) = (*exp.numer() as u32, *exp.denom() as u32);
    let target = BigUint::from(2u32).pow(den) * BigUint::from(n_max).pow(num);
    let mut d = floor_pow(n_max, exp).saturating_mul(2);
    while !(BigUint::from(d).pow(den) > target && arith::is_prime(d)) {
        d += 1;
    }
    d
}

/// The number of samples drawn for the non-membership claims.
pub const FLUSH_SAMPLES: usize = 50;

/// Residue sets making every multiple of a prime `D ~ 2 N^(1/2+eps)`
/// admissible, so `A` is a progression reaching nearly to `N`.
pub fn construct_flush_progression(n_max: u64, eps: Ratio<u64>, seed: u64) -> Result<ConstructionOutput, ConstructionError> {
    check_epsilon(eps, arith::half())?;
    if !(4..=1_000_000).contains(&n_max) {
        return Err(ConstructionError::Parameters(format!("N = {n_max} outside [4, 10^6]")));
    }
    let d_mod = flush_modulus(n_max, eps);
    let exp = arith::half() - eps;
    let primes = primes_in(n_max, 2 * n_max)?;
    let coeffs: Vec<(u64, u64, u64)> = primes
        .iter()
        .filter_map(|&p| flush_coefficients(d_mod, p).map(|(a, d)| (p, a, d)))
        .collect();
    let constraints: Vec<ResidueConstraint> = coeffs
        .iter()
        .map(|&(p, _, _)| {
            // e_p = d_p^{-1} = D mod p
            ResidueConstraint::single(pm(p), ModProgression::new(0, d_mod % p, floor_pow(p, exp) + 1))
        })
        .collect();
    let members: Vec<u64> = (0..=n_max / d_mod).map(|m| m * d_mod).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut excluded = Vec::new();
    let forbidden = |v: u64| [1, 2, 3].iter().any(|&t| v == t || v == d_mod - t);
    let mut attempts = 0;
    while excluded.len() < FLUSH_SAMPLES && attempts < 100 * FLUSH_SAMPLES {
        attempts += 1;
        let n = rng.gen_range(1..=n_max);
        let r = n % d_mod;
        if r == 0 || excluded.iter().any(|e: &Exclusion| e.n == n) {
            continue;
        }
        let witness = coeffs.iter().find(|&&(_, a, _)| !forbidden((r as u128 * a as u128 % d_mod as u128) as u64));
        if let Some(&(p, _, _)) = witness {
            excluded.push(Exclusion { n, witness_prime: p });
        }
    }
    excluded.sort_by_key(|e| e.n);
    Ok(ConstructionOutput {
        family: ConstraintFamily::new(n_max, eps, n_max, 2 * n_max, constraints)?,
        predicted: Predictions { members, excluded, ..Default::default() },
        notes: vec![format!("D = {d_mod}; {} primes; sample seed {seed}", coeffs.len())],
    })
}

/// Solutions `(n, m)` of `n^2 = 2 m^2 + 1` from the recurrence, `n <= n_limit`.
pub fn pell_solutions(n_limit: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let (mut n, mut m) = (1u128, 0u128);
    while n <= n_limit as u128 {
        out.push((n as u64, m as u64));
        (n, m) = (3 * n + 4 * m, 2 * n + 3 * m);
    }
    out
}

/// Quadratic residue sets: `{2m^2 + 1}` at the largest prime and `{n^2}`
/// elsewhere, so `A` consists of squares `n^2` with `n^2 - 2m^2 = 1`.
pub fn construct_pell_counterexample(n_max: u64, eps: Ratio<u64>) -> Result<ConstructionOutput, ConstructionError> {
    check_epsilon(eps, arith::half())?;
    let y = n_max / 2;
    if y < 100 {
        return Err(ConstructionError::Parameters(format!("need y = N/2 >= 100, got {y}")));
    }
    let exp = arith::half() - eps;
    let primes = primes_in(y, 2 * y)?;
    let p0 = *primes.last().unwrap();
    let q = primes[0];
    let constraints = primes
        .iter()
        .map(|&p| {
            let len = floor_pow(p, exp) + 1;
            let part = if p == p0 {
                ModQuadratic { coeff: 2, offset: 1, len }
            } else {
                ModQuadratic { coeff: 1, offset: 0, len }
            };
            ResidueConstraint::new(pm(p), vec![ResiduePart::Quadratic { quad: part }])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (n_cap, m_cap) = (floor_pow(q, exp), floor_pow(p0, exp));
    let exact: Vec<u64> = pell_solutions(n_cap)
        .into_iter()
        .filter(|&(n, m)| m <= m_cap && n * n <= n_max)
        .map(|(n, _)| n * n)
        .collect();
    let log2 = 64 - n_max.leading_zeros() as u64; // ceil-ish log2 bound
    Ok(ConstructionOutput {
        family: ConstraintFamily::new(n_max, eps, y, 2 * y, constraints)?,
        predicted: Predictions { exact: Some(exact), max_size: Some(2 * log2), ..Default::default() },
        notes: vec![format!("p0 = {p0}, q = {q}, n <= {n_cap}, m <= {m_cap}")],
    })
}

/// `L_1 = 5`, then each next term is the least integer `>= 4 L_i` coprime to
/// all earlier ones.
pub fn kap_multipliers(k: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(k);
    for i in 0..k {
        let mut l = if i == 0 { 5 } else { 4 * out[i - 1] };
        while out.iter().any(|&prev| prev.gcd(&l) != 1) {
            l += 1;
        }
        out.push(l);
    }
    out
}

/// Bands of `[y, 2y]`; in band `i` the residue set is the progression
/// `{0, L_i, ..., (prod_{r != i} L_r) L_i}` plus `{0, L_j, 2 L_j}` for each
/// `j != i`, `k` parts in all. `A` is the union of the triples and the full
/// product, which is not a union of `k` progressions.
pub fn construct_kap_nonunion(k: usize, y: u64, n_max: u64, eps: Ratio<u64>) -> Result<ConstructionOutput, ConstructionError> {
    if k < 2 {
        return Err(ConstructionError::Parameters("k must be at least 2".into()));
    }
    let band_exp = Ratio::new(1, k as u64);
    check_epsilon(eps, band_exp)?;
    let ls = kap_multipliers(k);
    let last = *ls.last().unwrap();
    // L_k < y^(1/k - eps)
    let bound_exp = band_exp - eps;
    if arith::cmp_scaled_pow(&BigUint::from(last), 1, y, bound_exp) != std::cmp::Ordering::Less {
        return Err(ConstructionError::Parameters(format!(
            "L_{k} = {last} is not below y^({bound_exp}) for y = {y}"
        )));
    }
    let product: u64 = ls.iter().product();
    if product > n_max {
        return Err(ConstructionError::Parameters(format!("product of multipliers {product} exceeds N = {n_max}")));
    }
    let primes = primes_in(y, 2 * y)?;
    let mut constraints = Vec::with_capacity(primes.len());
    for &p in &primes {
        // band i: (1 + (i-1)/k) y <= p <= (1 + i/k) y, boundary primes to the lower band
        let i = (1..=k as u64)
            .find(|&i| (p as u128) * (k as u128) <= (k as u128 + i as u128) * y as u128)
            .unwrap_or(k as u64) as usize;
        let li = ls[i - 1];
        let others: u64 = ls.iter().enumerate().filter(|&(j, _)| j != i - 1).map(|(_, &l)| l).product();
        // {0, L_i, ..., (prod_{r != i} L_r) L_i} absorbs {0, L_i, 2 L_i}: k parts in all
        let mut parts: Vec<ResiduePart> = vec![ModProgression::new(0, li % p, others + 1).into()];
        for (j, &l) in ls.iter().enumerate() {
            if j != i - 1 {
                parts.push(ModProgression::new(0, l % p, 3).into());
            }
        }
        constraints.push(ResidueConstraint::new(pm(p), parts)?);
    }
    let mut exact: Vec<u64> = ls.iter().flat_map(|&l| [0, l, 2 * l]).chain([product]).collect();
    exact.sort_unstable();
    exact.dedup();
    Ok(ConstructionOutput {
        family: ConstraintFamily::new(n_max, eps, y, 2 * y, constraints)?,
        predicted: Predictions { exact: Some(exact), not_union_of: Some(k), ..Default::default() },
        notes: vec![format!("L = {ls:?}")],
    })
}

/// Interval residue sets `[0, floor(p^(1-eps))]` for every prime from `p0` up
/// to `y_high`; `A` is `[0, floor(p0^(1-eps))]`.
pub fn construct_interval_sieve_sharp(
    n_max: u64,
    p0: u64,
    y_high: u64,
    eps: Ratio<u64>,
) -> Result<ConstructionOutput, ConstructionError> {
    check_epsilon(eps, arith::one())?;
    if !arith::is_prime(p0) || y_high < p0 {
        return Err(ConstructionError::Parameters(format!("need prime p0 <= y_high (p0={p0}, y_high={y_high})")));
    }
    let exp = arith::one() - eps;
    let primes = primes_in(p0, y_high)?;
    let constraints = primes
        .iter()
        .map(|&p| ResidueConstraint::single(pm(p), ModProgression::interval(0, floor_pow(p, exp))))
        .collect();
    let top = floor_pow(p0, exp).min(n_max);
    Ok(ConstructionOutput {
        family: ConstraintFamily::new(n_max, eps, p0, y_high, constraints)?,
        predicted: Predictions { exact: Some((0..=top).collect()), ..Default::default() },
        notes: vec![format!("A = [0, {top}] has {} elements", top + 1)],
    })
}

/// `A = {j P : 0 <= j <= (log N / 2)^(1/2-eps)}` with `P` the product of the
/// primes up to `log N / 2`: residue `{0}` at those primes and a short
/// progression of multiples of `P` at every larger prime up to `y_high`.
pub fn construct_kap_sieve_small_p0(n_max: u64, y_high: u64, eps: Ratio<u64>) -> Result<ConstructionOutput, ConstructionError> {
    check_epsilon(eps, arith::half())?;
    // primes p with p <= ln(N)/2, i.e. e^(2p) <= N
    let small: Vec<u64> = arith::primes_between(2, 64)
        .into_iter()
        .take_while(|&p| decide(|b| (Real::int(2 * p as i64).exp(b), Real::uint(n_max))).le())
        .collect();
    if small.is_empty() {
        return Err(ConstructionError::Parameters(format!("N = {n_max} too small: no prime below log(N)/2")));
    }
    let product = small.iter().try_fold(1u64, |acc, &p| acc.checked_mul(p)).ok_or_else(|| {
        ConstructionError::Parameters("primorial overflows".into())
    })?;
    let exp = arith::half() - eps;
    let j_max = certified_floor(|b| {
        let half_log = Real::ln_uint(n_max, b).div(&Real::int(2), b).unwrap();
        half_log.powr(&Real::ratio(exp), b).unwrap()
    })
    .and_then(|v| v.to_u64())
    .ok_or_else(|| ConstructionError::Parameters("undecidable floor".into()))?;
    let j_max = j_max.min(n_max / product);
    let largest_small = *small.last().unwrap();
    // some prime must exceed N / P so that j is pinned down
    let needed = (n_max / product + 1).max(largest_small + 1);
    let top = y_high.max(arith::next_prime(needed));
    let mut constraints = Vec::new();
    for p in arith::primes_between(2, top) {
        let part = if p <= largest_small {
            ModProgression::new(0, 0, 1)
        } else {
            ModProgression::new(0, product % p, j_max + 1)
        };
        constraints.push(ResidueConstraint::single(pm(p), part));
    }
    Ok(ConstructionOutput {
        family: ConstraintFamily::new(n_max, eps, 2, top, constraints)?,
        predicted: Predictions { exact: Some((0..=j_max).map(|j| j * product).collect()), ..Default::default() },
        notes: vec![format!("P = {product}, j <= {j_max}")],
    })
}
