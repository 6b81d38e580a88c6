//! Admissible-set computation.
//!
//! Three routes to the same set `A = {n in [0, N] : n mod p in R_p for all p}`:
//! a brute-force oracle, the production sieve that enumerates the lift of the
//! sparsest residue set and filters it, and the constructive intersection of a
//! short integer progression with a short residue progression.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{self, ext_gcd, least_abs_residue};
use crate::error::SieveError;
use crate::par;
use crate::real::{certified_floor, Real};
use crate::types::{ConstraintFamily, IntegerProgression, IntegerSet, ModProgression, ResidueConstraint, ResiduePart};

/// Largest `n_max` the brute-force oracle accepts.
pub const BRUTEFORCE_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveStats {
    pub candidates_generated: u64,
    pub constraints_applied: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveResult {
    pub admissible: IntegerSet,
    pub stats: SieveStats,
}

/// Membership test compiled from a constraint's structure.
#[derive(Clone, Debug)]
enum Membership {
    Nothing,
    Point(u64),
    /// `r in R_p` iff `(r - start) * step^{-1} mod p < len`.
    Progression { start: u64, inv_step: u64, len: u64 },
    Sorted(Vec<u64>),
}

#[derive(Clone, Debug)]
struct Compiled {
    p: u64,
    count: u64,
    test: Membership,
}

impl Compiled {
    fn new(c: &ResidueConstraint) -> Self {
        let p = c.p();
        let count = c.residue_count();
        let test = match c.normalize().map(|n| n.constraint) {
            Ok(n) => match n.parts() {
                [ResiduePart::Progression(ap)] => match (ap.len, ap.step) {
                    (0, _) => Membership::Nothing,
                    (_, 0) => Membership::Point(ap.start),
                    _ => Membership::Progression {
                        start: ap.start,
                        inv_step: arith::mod_inverse(ap.step, p).expect("prime modulus"),
                        len: ap.len,
                    },
                },
                _ => Membership::Sorted(n.residues()),
            },
            Err(_) => Membership::Sorted(c.residues()),
        };
        Compiled { p, count, test }
    }

    #[inline]
    fn admits(&self, n: u64) -> bool {
        let r = n % self.p;
        match &self.test {
            Membership::Nothing => false,
            Membership::Point(x) => r == *x,
            Membership::Progression { start, inv_step, len } => {
                let diff = (r + self.p - start) % self.p;
                ((diff as u128 * *inv_step as u128) % self.p as u128) < *len as u128
            }
            Membership::Sorted(rs) => rs.binary_search(&r).is_ok(),
        }
    }

    fn density_cmp(&self, other: &Compiled) -> Ordering {
        let a = self.count as u128 * other.p as u128;
        let b = other.count as u128 * self.p as u128;
        a.cmp(&b).then(self.p.cmp(&other.p))
    }
}

/// Direct transcription of the definition; the oracle for every faster path.
pub fn sieve_bruteforce(f: &ConstraintFamily) -> Result<SieveResult, SieveError> {
    if f.n_max() > BRUTEFORCE_LIMIT {
        return Err(SieveError::OracleTooLarge { n_max: f.n_max(), limit: BRUTEFORCE_LIMIT });
    }
    let clock = Instant::now();
    let tables: Vec<(u64, Vec<u64>)> = f.constraints().iter().map(|c| (c.p(), c.residues())).collect();
    let elements: Vec<u64> = (0..=f.n_max())
        .filter(|&n| tables.iter().all(|(p, rs)| rs.binary_search(&(n % p)).is_ok()))
        .collect();
    Ok(SieveResult {
        admissible: IntegerSet::from_sorted(elements, f.n_max()).expect("ascending scan"),
        stats: SieveStats {
            candidates_generated: f.n_max() + 1,
            constraints_applied: tables.len() as u64,
            elapsed: clock.elapsed(),
        },
    })
}

/// Production sieve. Candidates are the lift of the sparsest `R_p` to `[0, N]`,
/// filtered against the remaining constraints in increasing density.
/// Output does not depend on `workers`.
pub fn sieve_fast(f: &ConstraintFamily, workers: Option<usize>) -> SieveResult {
    let refs: Vec<&ResidueConstraint> = f.constraints().iter().collect();
    let clock = Instant::now();
    let (elements, candidates) = par::with_workers(workers, || sieve_window(&refs, 0, f.n_max()));
    SieveResult {
        admissible: IntegerSet::from_sorted(elements, f.n_max()).expect("sorted candidates"),
        stats: SieveStats {
            candidates_generated: candidates,
            constraints_applied: refs.len() as u64,
            elapsed: clock.elapsed(),
        },
    }
}

/// Admissible integers in `[lo, hi]` under `constraints`, with the candidate count.
pub(crate) fn sieve_window(constraints: &[&ResidueConstraint], lo: u64, hi: u64) -> (Vec<u64>, u64) {
    if lo > hi {
        return (Vec::new(), 0);
    }
    let mut compiled: Vec<Compiled> = constraints.iter().map(|c| Compiled::new(c)).collect();
    compiled.sort_by(|a, b| a.density_cmp(b));
    let candidates: Vec<u64> = match compiled.first() {
        None => (lo..=hi).collect(),
        Some(sparsest) => {
            let p = sparsest.p;
            let residues = match &sparsest.test {
                Membership::Sorted(rs) => rs.clone(),
                _ => {
                    let mut rs: Vec<u64> = (0..p).filter(|&r| sparsest.admits(r)).collect();
                    if rs.len() as u64 != sparsest.count {
                        rs = constraints.iter().find(|c| c.p() == p).unwrap().residues();
                    }
                    rs
                }
            };
            lift(&residues, p, lo, hi)
        }
    };
    let generated = candidates.len() as u64;
    let rest = if compiled.is_empty() { &compiled[..] } else { &compiled[1..] };
    let kept = par::filter(candidates, |&n| rest.iter().all(|c| c.admits(n)));
    (kept, generated)
}

/// All `n in [lo, hi]` with `n mod p` in the sorted `residues`, ascending.
fn lift(residues: &[u64], p: u64, lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut base = lo - lo % p;
    loop {
        for &r in residues {
            let n = base + r;
            if n > hi {
                return out;
            }
            if n >= lo {
                out.push(n);
            }
        }
        match base.checked_add(p) {
            Some(b) if b <= hi => base = b,
            _ => return out,
        }
    }
}

/// Generic `P ∩ {n : n mod p in R_p}` by filtering the progression's terms.
pub fn intersect_ap_generic(ap: &IntegerProgression, c: &ResidueConstraint) -> IntegerSetOrAp {
    let p = c.p() as i64;
    let rs = c.residues();
    let kept: Vec<i64> = ap
        .elements()
        .filter(|&x| rs.binary_search(&(x.rem_euclid(p) as u64)).is_ok())
        .collect();
    IntegerSetOrAp::from_terms(kept)
}

/// Terms of a filtered progression: an AP when they are equally spaced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntegerSetOrAp {
    Ap(IntegerProgression),
    Irregular(Vec<i64>),
}

impl IntegerSetOrAp {
    fn from_terms(terms: Vec<i64>) -> Self {
        match terms.len() {
            0 => IntegerSetOrAp::Ap(IntegerProgression::EMPTY),
            1 => IntegerSetOrAp::Ap(IntegerProgression::singleton(terms[0])),
            n => {
                let d = terms[1] - terms[0];
                if terms.windows(2).all(|w| w[1] - w[0] == d) {
                    IntegerSetOrAp::Ap(IntegerProgression::new(terms[0], d, n as u64))
                } else {
                    IntegerSetOrAp::Irregular(terms)
                }
            }
        }
    }
}

fn short_enough(count_minus_one: u64, p: u64) -> bool {
    // count_minus_one < sqrt(p)/10  <=>  100 * count_minus_one^2 < p
    100u128 * (count_minus_one as u128).pow(2) < p as u128
}

/// Constructive intersection of `P = {b, b+e, ..., b+ne}` with the integers whose
/// residue lies in the single progression `{a, a+d, ..., a+kd} mod p`, for
/// `n, k < sqrt(p)/10`. The result is always empty or an arithmetic progression.
///
/// A multiplier `x` with `||xe/p||, ||xd/p|| < 1/sqrt(p)` turns the congruence
/// `b + je = a + md (mod p)` into the exact linear equation `je' - md' = z`
/// over the index box, whose solutions form a progression in `j`.
pub fn intersect_ap_with_constraint(
    ap: &IntegerProgression,
    c: &ResidueConstraint,
) -> Result<IntegerProgression, SieveError> {
    let part = c
        .single_progression()
        .ok_or_else(|| SieveError::ShortIntersection("constraint is not a single progression".into()))?;
    let p = c.p();
    if part.len == 0 || ap.is_empty() {
        return Ok(IntegerProgression::EMPTY);
    }
    let n = ap.len - 1;
    let k = part.len - 1;
    if !short_enough(n, p) {
        return Err(SieveError::ShortIntersection(format!(
            "progression has {} terms, needs fewer than sqrt({p})/10 + 1",
            ap.len
        )));
    }
    if !short_enough(k, p) {
        return Err(SieveError::ShortIntersection(format!(
            "residue progression has {} terms, needs fewer than sqrt({p})/10 + 1",
            part.len
        )));
    }
    let residue_in = |x: i64| -> bool {
        let r = x.rem_euclid(p as i64) as u64;
        residue_in_progression(r, part, p)
    };
    let (b, e) = (ap.start as i128, ap.step as i128);
    if n == 0 || e.rem_euclid(p as i128) == 0 {
        // every term shares one residue
        return Ok(if residue_in(ap.start) { *ap } else { IntegerProgression::EMPTY });
    }
    let a = part.start as i128;
    let d = if k == 0 { 0 } else { part.step as i128 };
    let x = arith::simultaneous_small_multiplier(p, e, d).expect("pigeonhole multiplier exists for prime p");
    let x = x as i128;
    let e1 = least_abs_residue(x * e, p) as i128;
    let d1 = least_abs_residue(x * d, p) as i128;
    let z = least_abs_residue(x * (a - b), p) as i128;

    let (n, k) = (n as i128, k as i128);
    let j_range: Option<(i128, i128, i128)> = if d1 == 0 {
        // j*e1 = z, m unconstrained within [0, k]
        (z % e1 == 0 && (0..=n).contains(&(z / e1))).then(|| (z / e1, 0, 1))
    } else {
        let (g, u, v) = ext_gcd(e1, -d1);
        if z % g != 0 {
            None
        } else {
            let (j0, m0) = (u * (z / g), v * (z / g));
            // j = j0 + t*alpha, m = m0 - t*beta
            let alpha = -d1 / g;
            let beta = e1 / g;
            let (t1, t2) = t_window(j0, alpha, 0, n);
            let (t3, t4) = t_window(m0, -beta, 0, k);
            let (tl, th) = (t1.max(t3), t2.min(t4));
            (tl <= th).then(|| {
                let j_first = if alpha > 0 { j0 + tl * alpha } else { j0 + th * alpha };
                (j_first, th - tl, alpha.abs())
            })
        }
    };
    Ok(match j_range {
        None => IntegerProgression::EMPTY,
        Some((j_first, extra, j_step)) => IntegerProgression::new(
            (b + e * j_first) as i64,
            (e * j_step) as i64,
            (extra + 1) as u64,
        ),
    })
}

/// `t` with `lo <= offset + t*coef <= hi`, as a closed window.
fn t_window(offset: i128, coef: i128, lo: i128, hi: i128) -> (i128, i128) {
    debug_assert!(coef != 0);
    let (a, b) = ((lo - offset), (hi - offset));
    if coef > 0 {
        (div_ceil(a, coef), b.div_euclid(coef))
    } else {
        (div_ceil(-b, -coef), (-a).div_euclid(-coef))
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -((-a).div_euclid(b))
}

fn residue_in_progression(r: u64, part: &ModProgression, p: u64) -> bool {
    let (start, step) = (part.start % p, part.step % p);
    if part.len == 0 {
        return false;
    }
    if step == 0 {
        return r == start;
    }
    let inv = arith::mod_inverse(step, p).expect("prime modulus");
    let j = ((r + p - start) % p) as u128 * inv as u128 % p as u128;
    j < part.len as u128
}

/// Intersects a progression with every constraint of a family in turn, using
/// the constructive route where its length bounds hold and plain filtering
/// elsewhere. `None` if some intermediate intersection is not a progression.
pub fn intersect_ap_with_family(ap: &IntegerProgression, f: &ConstraintFamily) -> Option<IntegerProgression> {
    let mut current = *ap;
    for c in f.constraints() {
        current = match intersect_ap_with_constraint(&current, c) {
            Ok(next) => next,
            Err(_) => match intersect_ap_generic(&current, c) {
                IntegerSetOrAp::Ap(next) => next,
                IntegerSetOrAp::Irregular(_) => return None,
            },
        };
        if current.is_empty() {
            break;
        }
    }
    Some(current)
}

/// One pass of the shrinking-interval procedure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizationRound {
    pub y: u64,
    pub primes_used: usize,
    pub window: (u64, u64),
    pub hull: Option<(u64, u64)>,
    /// The admissible part of the window filled its hull.
    pub hull_is_interval: bool,
    pub final_round: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Localization {
    /// Closed interval containing `A`, or `None` when `A` is empty.
    pub interval: Option<(u64, u64)>,
    pub hypotheses_met: bool,
    pub issues: Vec<String>,
    pub rounds: Vec<LocalizationRound>,
    /// `A` (from the full sieve) lies inside `interval`.
    pub contains_admissible: bool,
}

/// `floor((16 ln x)^(1/eps))`, saturating at `u64::MAX`.
pub fn interval_scale(x: u64, eps: Ratio<u64>) -> u64 {
    if x <= 1 {
        return 0;
    }
    let inv = Ratio::new(*eps.denom(), *eps.numer());
    certified_floor(|bits| {
        let base = Real::int(16).mul(&Real::ln_uint(x, bits), bits);
        base.powr(&Real::ratio(inv), bits).expect("positive base")
    })
    .and_then(|v: BigInt| v.to_u64())
    .unwrap_or(u64::MAX)
}

/// Shrinks an interval around `A` for an all-interval family: at scale `l`
/// sieve the current window with the primes in `[y, 2y]`,
/// `y = (16 log l)^(1/eps)`, replace the window by the hull of the survivors,
/// and repeat until `l <= n0` or `y <= p0`; a last pass uses the primes in
/// `[p0, 2 p0]`.
pub fn iterated_interval_localization(f: &ConstraintFamily, p0: u64, n0: u64, workers: Option<usize>) -> Localization {
    let eps = f.epsilon();
    let mut issues = Vec::new();
    check_localization_hypotheses(f, p0, &mut issues);

    let mut window = (0u64, f.n_max());
    let mut rounds = Vec::new();
    let mut interval = Some(window);
    let mut force_final = false;
    loop {
        let span = window.1 - window.0;
        if span <= n0 && !rounds.is_empty() {
            break;
        }
        let scale = interval_scale(span.max(2), eps);
        let final_round = force_final || scale <= p0 || span <= n0;
        let y = if final_round { p0 } else { scale };
        let y2 = y.saturating_mul(2);
        let used: Vec<&ResidueConstraint> =
            f.constraints().iter().filter(|c| c.p() >= y && c.p() <= y2).collect();
        let (survivors, _) = par::with_workers(workers, || sieve_window(&used, window.0, window.1));
        let hull = survivors.first().zip(survivors.last()).map(|(&a, &b)| (a, b));
        let hull_is_interval = hull.is_none_or(|(a, b)| survivors.len() as u64 == b - a + 1);
        rounds.push(LocalizationRound {
            y,
            primes_used: used.len(),
            window,
            hull,
            hull_is_interval,
            final_round,
        });
        match hull {
            None => {
                interval = None;
                break;
            }
            Some(h) => {
                interval = Some(h);
                if final_round {
                    break;
                }
                if h == window {
                    force_final = true;
                }
                window = h;
            }
        }
    }

    let admissible = sieve_fast(f, workers).admissible;
    let contains_admissible = match interval {
        None => admissible.is_empty(),
        Some((a, b)) => admissible.elements().iter().all(|&n| a <= n && n <= b),
    };
    Localization { interval, hypotheses_met: issues.is_empty(), issues, rounds, contains_admissible }
}

fn check_localization_hypotheses(f: &ConstraintFamily, p0: u64, issues: &mut Vec<String>) {
    let eps = f.epsilon();
    if !arith::is_prime(p0) {
        issues.push(format!("p0 = {p0} is not prime"));
    }
    let scale = interval_scale(f.n_max().max(2), eps);
    if p0 > scale {
        issues.push(format!("p0 = {p0} exceeds (16 log N)^(1/eps) = {scale}"));
    }
    let one_minus = arith::one() - eps;
    for c in f.constraints() {
        let ok = c.normalize().ok().and_then(|n| n.constraint.single_progression().copied()).is_some_and(|ap| {
            (ap.step <= 1) && (ap.len <= 1 || arith::le_pow(ap.len - 1, c.p(), one_minus))
        });
        if !ok {
            issues.push(format!("constraint mod {} is not an interval of length <= p^(1-eps)+1", c.p()));
        }
    }
    let top = scale.saturating_mul(2);
    if top > f.y_high() {
        issues.push(format!(
            "constraints stop at {} but must cover every prime up to 2(16 log N)^(1/eps) = {top}",
            f.y_high()
        ));
    } else {
        let missing = arith::primes_between(p0, top).into_iter().filter(|&q| f.constraint_for(q).is_none()).count();
        if missing > 0 {
            issues.push(format!("{missing} primes in [{p0}, {top}] carry no constraint"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::PrimeModulus;
    use proptest::prelude::*;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn family(n: u64, cs: Vec<ResidueConstraint>) -> ConstraintFamily {
        let lo = cs.iter().map(|c| c.p()).min().unwrap_or(2);
        let hi = cs.iter().map(|c| c.p()).max().unwrap_or(2);
        ConstraintFamily::new(n, Ratio::new(1, 10), lo, hi, cs).unwrap()
    }

    fn elems(r: &SieveResult) -> Vec<u64> {
        r.admissible.elements().to_vec()
    }

    #[test]
    fn bruteforce_examples() {
        let f = family(4, vec![]);
        assert_eq!(elems(&sieve_bruteforce(&f).unwrap()), vec![0, 1, 2, 3, 4]);
        let f = family(30, vec![ResidueConstraint::single(pm(5), ModProgression::new(0, 0, 1))]);
        assert_eq!(elems(&sieve_bruteforce(&f).unwrap()), vec![0, 5, 10, 15, 20, 25, 30]);
        let f = family(
            100,
            vec![
                ResidueConstraint::single(pm(7), ModProgression::interval(1, 1)),
                ResidueConstraint::single(pm(11), ModProgression::new(3, 0, 1)),
            ],
        );
        assert_eq!(elems(&sieve_bruteforce(&f).unwrap()), vec![36, 58]);
    }

    #[test]
    fn bruteforce_refuses_large_instances() {
        let f = family(BRUTEFORCE_LIMIT + 1, vec![]);
        assert!(matches!(sieve_bruteforce(&f), Err(SieveError::OracleTooLarge { .. })));
    }

    #[test]
    fn fast_matches_examples_and_bounds_candidates() {
        let f = family(
            100,
            vec![
                ResidueConstraint::single(pm(7), ModProgression::interval(1, 1)),
                ResidueConstraint::single(pm(11), ModProgression::new(3, 0, 1)),
            ],
        );
        let r = sieve_fast(&f, None);
        assert_eq!(elems(&r), vec![36, 58]);
        // sparsest is p = 11 with one residue: at most 1 * (100/11 + 1) candidates
        assert!(r.stats.candidates_generated <= 100 / 11 + 1);
        let f = family(4, vec![]);
        assert_eq!(elems(&sieve_fast(&f, Some(2))), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn fast_matches_bruteforce_on_sparse_interval_family() {
        let eps_exp = Ratio::new(9, 10);
        let cs: Vec<ResidueConstraint> = arith::primes_between(1000, 2000)
            .into_iter()
            .map(|p| ResidueConstraint::single(pm(p), ModProgression::interval(0, arith::floor_pow(p, eps_exp))))
            .collect();
        let f = ConstraintFamily::new(1_000_000, Ratio::new(1, 10), 1000, 2000, cs).unwrap();
        let fast = sieve_fast(&f, None);
        let slow = sieve_bruteforce(&f).unwrap();
        assert_eq!(fast.admissible, slow.admissible);
        let sparsest = f
            .constraints()
            .iter()
            .map(|c| c.residue_count() * (f.n_max() / c.p() + 1))
            .min()
            .unwrap();
        assert!(fast.stats.candidates_generated <= sparsest);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let cs: Vec<ResidueConstraint> = arith::primes_between(100, 300)
            .into_iter()
            .map(|p| ResidueConstraint::single(pm(p), ModProgression::new(p / 3, 7, arith::isqrt(p) * 3)))
            .collect();
        let f = ConstraintFamily::new(200_000, Ratio::new(1, 10), 100, 300, cs).unwrap();
        let one = sieve_fast(&f, Some(1));
        let four = sieve_fast(&f, Some(4));
        assert_eq!(one.admissible, four.admissible);
    }

    #[test]
    fn short_intersection_examples() {
        let c = ResidueConstraint::single(pm(10_007), ModProgression::new(0, 7, 4));
        let got = intersect_ap_with_constraint(&IntegerProgression::new(0, 1, 10), &c).unwrap();
        assert_eq!(got, IntegerProgression::new(0, 7, 2));
        // p = 101 is below the length bound for ten terms; the generic route agrees.
        let c = ResidueConstraint::single(pm(101), ModProgression::new(0, 7, 4));
        let ten = IntegerProgression::new(0, 1, 10);
        assert!(intersect_ap_with_constraint(&ten, &c).is_err());
        assert_eq!(intersect_ap_generic(&ten, &c), IntegerSetOrAp::Ap(IntegerProgression::new(0, 7, 2)));

        let c = ResidueConstraint::single(pm(11), ModProgression::interval(1, 2));
        // {0,5,...,45} has 10 terms, too long for p = 11 under the literal bound
        let long = IntegerProgression::new(0, 5, 10);
        assert!(intersect_ap_with_constraint(&long, &c).is_err());
        assert_eq!(
            intersect_ap_generic(&long, &c),
            IntegerSetOrAp::Ap(IntegerProgression::new(25, 10, 3))
        );

        let c = ResidueConstraint::single(pm(10_007), ModProgression::new(0, 5, 3));
        let got = intersect_ap_with_constraint(&IntegerProgression::singleton(0), &c).unwrap();
        assert_eq!(got, IntegerProgression::singleton(0));
    }

    #[test]
    fn short_intersection_rejects_multi_part() {
        let c = ResidueConstraint::new(
            pm(101),
            vec![ModProgression::interval(0, 1).into(), ModProgression::interval(50, 1).into()],
        )
        .unwrap();
        assert!(intersect_ap_with_constraint(&IntegerProgression::new(0, 1, 2), &c).is_err());
    }

    #[test]
    fn localization_on_sharp_instance() {
        // A = {0..floor(p0^(1/2))} with eps = 1/2, N = 10^4.
        let eps = Ratio::new(1, 2);
        let n = 10_000u64;
        let top = 2 * interval_scale(n, eps);
        let cs: Vec<ResidueConstraint> = arith::primes_between(101, top)
            .into_iter()
            .map(|p| ResidueConstraint::single(pm(p), ModProgression::interval(0, arith::floor_pow(p, eps))))
            .collect();
        let f = ConstraintFamily::new(n, eps, 101, top, cs).unwrap();
        let loc = iterated_interval_localization(&f, 101, 1, None);
        assert!(loc.hypotheses_met, "{:?}", loc.issues);
        assert_eq!(loc.interval, Some((0, 10)));
        assert!(loc.contains_admissible);
    }

    #[test]
    fn localization_of_empty_set() {
        let eps = Ratio::new(1, 2);
        let cs = vec![
            ResidueConstraint::single(pm(101), ModProgression::new(0, 0, 1)),
            ResidueConstraint::single(pm(103), ModProgression::new(1, 0, 1)),
        ];
        let f = ConstraintFamily::new(5000, eps, 101, 103, cs).unwrap();
        let loc = iterated_interval_localization(&f, 101, 1, None);
        assert_eq!(loc.interval, None);
        assert!(loc.contains_admissible);
    }

    fn arb_short_instance() -> impl Strategy<Value = (IntegerProgression, ResidueConstraint)> {
        let primes = arith::primes_between(401, 10_000);
        proptest::sample::select(primes).prop_flat_map(|p| {
            let bound = (arith::isqrt(p) / 10).max(1); // n, k < sqrt(p)/10
            (
                -1000i64..1000,
                -500i64..500,
                1..=bound,
                0..p,
                0..p,
                1..=bound,
            )
                .prop_filter_map("bounds", move |(b, e, len, a, d, k1)| {
                    let ap = IntegerProgression::new(b, e, len);
                    if !short_enough(len - 1, p) || !short_enough(k1 - 1, p) {
                        return None;
                    }
                    Some((ap, ResidueConstraint::single(pm(p), ModProgression::new(a, d, k1))))
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn short_intersection_matches_filtering((ap, c) in arb_short_instance()) {
            let got = intersect_ap_with_constraint(&ap, &c).unwrap();
            let p = c.p() as i64;
            let rs = c.residues();
            let mut want: Vec<i64> = ap.elements().filter(|x| rs.binary_search(&(x.rem_euclid(p) as u64)).is_ok()).collect();
            want.sort_unstable();
            want.dedup();
            let mut have: Vec<i64> = got.elements().collect();
            have.sort_unstable();
            prop_assert_eq!(have, want);
        }
    }
}
