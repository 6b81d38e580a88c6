//! Subset sums modulo a prime: the exact counting function, its Riesz-product
//! Fourier expansion, measure-weighted averages and a short-progression
//! concentration scan.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::SubsetSumError;
use crate::par;
use crate::types::{IntegerSet, PrimeModulus};

/// Largest set whose counts are kept exactly (`2^64` fits in `u128`).
pub const EXACT_LIMIT: usize = 64;
/// Largest set accepted by [`verify_fourier_identity`].
pub const FOURIER_LIMIT: usize = 40;
/// Largest modulus accepted by the concentration scan.
pub const SCAN_LIMIT: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileCounts {
    /// `C(x)` exactly.
    Exact(Vec<u128>),
    /// `C(x) / 2^|S|` in floating point, for sets past [`EXACT_LIMIT`].
    Normalized(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetSumProfile {
    pub p: u64,
    pub set_size: usize,
    pub counts: ProfileCounts,
}

impl SubsetSumProfile {
    pub fn is_exact(&self) -> bool {
        matches!(self.counts, ProfileCounts::Exact(_))
    }

    pub fn exact_counts(&self) -> Option<&[u128]> {
        match &self.counts {
            ProfileCounts::Exact(c) => Some(c),
            ProfileCounts::Normalized(_) => None,
        }
    }

    /// `C(x) / 2^|S|` for every residue.
    pub fn normalized(&self) -> Vec<f64> {
        match &self.counts {
            ProfileCounts::Exact(c) => {
                let total = 2f64.powi(self.set_size as i32);
                c.iter().map(|&v| v as f64 / total).collect()
            }
            ProfileCounts::Normalized(v) => v.clone(),
        }
    }

    /// `max_x |C(x) - 2^|S|/p| / (2^|S|/p)`.
    pub fn uniformity_deviation(&self) -> f64 {
        let p = self.p as f64;
        self.normalized().iter().map(|&v| (v * p - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `(argmin, min, max)` of the normalized counts, lowest residue on ties.
    pub fn extremes(&self) -> (u64, f64, f64) {
        let v = self.normalized();
        let mut arg = 0;
        for (i, &x) in v.iter().enumerate() {
            if x < v[arg] {
                arg = i;
            }
        }
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (arg as u64, v[arg], max)
    }
}

/// Counts subsets of `S` by sum mod `p`: one cyclic shift-and-add per element.
pub fn subset_sum_profile(s: &IntegerSet, p: PrimeModulus) -> SubsetSumProfile {
    let p = p.get();
    let n = p as usize;
    let residues: Vec<usize> = s.elements().iter().map(|&x| (x % p) as usize).collect();
    let counts = if residues.len() <= EXACT_LIMIT {
        let mut c = vec![0u128; n];
        c[0] = 1;
        for &r in &residues {
            let prev = c.clone();
            for x in 0..n {
                c[(x + r) % n] += prev[x];
            }
        }
        ProfileCounts::Exact(c)
    } else {
        // each step halves: (C + shift C) / 2 keeps the total at 1
        let mut c = vec![0f64; n];
        c[0] = 1.0;
        for &r in &residues {
            let prev = c.clone();
            for v in c.iter_mut() {
                *v *= 0.5;
            }
            for x in 0..n {
                c[(x + r) % n] += 0.5 * prev[x];
            }
        }
        ProfileCounts::Normalized(c)
    };
    SubsetSumProfile { p, set_size: residues.len(), counts }
}

/// `R(a/p)` in log-polar form; `log_magnitude` is `-inf` on exact cancellation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszValue {
    pub log_magnitude: f64,
    /// In `(-pi, pi]`.
    pub phase: f64,
}

impl RieszValue {
    pub fn is_zero(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    /// `(re, im)` of `R / 2^shift`.
    pub fn scaled(&self, shift: usize) -> (f64, f64) {
        if self.is_zero() {
            return (0.0, 0.0);
        }
        let m = (self.log_magnitude - shift as f64 * std::f64::consts::LN_2).exp();
        (m * self.phase.cos(), m * self.phase.sin())
    }
}

fn wrap_phase(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y <= -PI {
        y += 2.0 * PI;
    } else if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// `prod_s (1 + e(s a / p))`. With `r = s a mod p` the factor is
/// `2 cos(pi r/p) e^{i pi r/p}`; the cosine is evaluated as
/// `sin(pi (p - 2r) / 2p)` to keep near-cancellations accurate.
pub fn riesz_product(s: &IntegerSet, a: u64, p: PrimeModulus) -> RieszValue {
    let p = p.get();
    let a = a % p;
    let mut log_mag = 0.0;
    let mut phase = 0.0;
    for &x in s.elements() {
        let r = ((x % p) as u128 * a as u128 % p as u128) as i64;
        let u = p as i64 - 2 * r;
        if u == 0 {
            return RieszValue { log_magnitude: f64::NEG_INFINITY, phase: 0.0 };
        }
        let c = (PI * u as f64 / (2.0 * p as f64)).sin();
        log_mag += (2.0 * c.abs()).ln();
        phase += PI * r as f64 / p as f64 + if c < 0.0 { PI } else { 0.0 };
    }
    RieszValue { log_magnitude: log_mag, phase: wrap_phase(phase) }
}

/// `max_x |C(x) - (1/p) sum_a e(-a x/p) R(a/p)| / 2^|S|`, the left side from
/// the exact profile.
pub fn verify_fourier_identity(s: &IntegerSet, p: PrimeModulus) -> Result<f64, SubsetSumError> {
    if s.len() > FOURIER_LIMIT {
        return Err(SubsetSumError::TooLarge { size: s.len(), limit: FOURIER_LIMIT });
    }
    let n = s.len();
    let pv = p.get();
    let lhs = subset_sum_profile(s, p).normalized();
    let riesz: Vec<(f64, f64)> = par::map_range(0..pv, |a| riesz_product(s, a, p).scaled(n));
    let deviations = par::map_range(0..pv, |x| {
        let (mut re, mut im) = (0.0, 0.0);
        for (a, &(rr, ri)) in riesz.iter().enumerate() {
            let t = -2.0 * PI * ((a as u128 * x as u128 % pv as u128) as f64) / pv as f64;
            let (c, si) = (t.cos(), t.sin());
            re += rr * c - ri * si;
            im += rr * si + ri * c;
        }
        let (re, im) = (re / pv as f64, im / pv as f64);
        (re - lhs[x as usize]).hypot(im)
    });
    Ok(deviations.into_iter().fold(0.0, f64::max))
}

/// Probability weights on `Z_p`, exact.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    weights: Vec<BigRational>,
}

impl Measure {
    pub fn new(weights: Vec<BigRational>) -> Result<Self, SubsetSumError> {
        let total: BigRational = weights.iter().sum();
        if weights.is_empty() || weights.iter().any(|w| w.is_negative()) || !total.is_one() {
            return Err(SubsetSumError::InvalidMeasure);
        }
        Ok(Measure { weights })
    }

    pub fn uniform(p: u64) -> Self {
        let w = BigRational::new(BigInt::one(), BigInt::from(p));
        Measure { weights: vec![w; p as usize] }
    }

    pub fn point(p: u64, x: u64) -> Self {
        let mut weights = vec![BigRational::zero(); p as usize];
        weights[(x % p) as usize] = BigRational::one();
        Measure { weights }
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }
}

/// `sum_x mu(x) C(x)`, exactly.
pub fn weighted_average(profile: &SubsetSumProfile, mu: &Measure) -> Result<BigRational, SubsetSumError> {
    let counts = profile.exact_counts().ok_or(SubsetSumError::NotExact(profile.set_size))?;
    if mu.weights.len() as u64 != profile.p {
        return Err(SubsetSumError::DimensionMismatch { got: mu.weights.len(), p: profile.p });
    }
    Ok(counts
        .iter()
        .zip(&mu.weights)
        .filter(|(_, w)| !w.is_zero())
        .map(|(&c, w)| w * BigRational::from_integer(BigInt::from(c)))
        .sum())
}

/// `1 / (4 ceil(sqrt p))`.
pub fn default_threshold(p: u64) -> f64 {
    let r = crate::arith::isqrt(p);
    let ceil = if r * r == p { r } else { r + 1 };
    1.0 / (4.0 * ceil as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationScan {
    /// Nonzero frequency maximizing `|R(a/p)|`, smallest on ties.
    pub a: u64,
    pub log_magnitude: f64,
    /// Share of `s` with `||s a / p|| < tau`.
    pub fraction: f64,
    pub threshold: f64,
}

impl ConcentrationScan {
    /// More than half of `S` sits near `0` under dilation by `a`. The cutoff
    /// is a convention; "most elements" has no sharper reading.
    pub fn concentrated(&self) -> bool {
        self.fraction > 0.5
    }
}

/// Scans every nonzero frequency for the largest Riesz product and measures
/// how much of `S` clusters near `0` under the maximizing dilation.
pub fn concentration_scan(s: &IntegerSet, p: PrimeModulus, tau: f64) -> Result<ConcentrationScan, SubsetSumError> {
    let pv = p.get();
    if pv > SCAN_LIMIT {
        return Err(SubsetSumError::TooLarge { size: pv as usize, limit: SCAN_LIMIT as usize });
    }
    let mags = par::map_range(1..pv, |a| riesz_product(s, a, p).log_magnitude);
    let mut best = 0;
    for (i, &m) in mags.iter().enumerate() {
        if m > mags[best] {
            best = i;
        }
    }
    let a = best as u64 + 1;
    let near = s
        .elements()
        .iter()
        .filter(|&&x| {
            let r = (x % pv) as u128 * a as u128 % pv as u128;
            (r.min(pv as u128 - r) as f64) < tau * pv as f64
        })
        .count();
    let fraction = if s.is_empty() { 0.0 } else { near as f64 / s.len() as f64 };
    Ok(ConcentrationScan { a, log_magnitude: mags[best], fraction, threshold: tau })
}

/// `(a, fraction)` when more than half of `S` is concentrated.
pub fn detect_ap_concentration(s: &IntegerSet, p: PrimeModulus, tau: f64) -> Result<Option<(u64, f64)>, SubsetSumError> {
    let scan = concentration_scan(s, p, tau)?;
    Ok(scan.concentrated().then_some((scan.a, scan.fraction)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith;
    use proptest::prelude::*;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn set(v: &[u64]) -> IntegerSet {
        IntegerSet::from_unsorted(v.to_vec())
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn profile_examples() {
        assert_eq!(subset_sum_profile(&set(&[]), pm(5)).exact_counts().unwrap(), &[1, 0, 0, 0, 0]);
        assert_eq!(subset_sum_profile(&set(&[1, 2]), pm(5)).exact_counts().unwrap(), &[1, 1, 1, 1, 0]);
        assert_eq!(subset_sum_profile(&set(&[1]), pm(2)).exact_counts().unwrap(), &[1, 1]);
    }

    #[test]
    fn profile_matches_enumeration() {
        let s = set(&[3, 8, 11, 20, 27, 31, 44]);
        let p = 13u64;
        let mut brute = vec![0u128; 13];
        for mask in 0u32..(1 << 7) {
            let sum: u64 = (0..7).filter(|i| mask >> i & 1 == 1).map(|i| s.elements()[i]).sum();
            brute[(sum % p) as usize] += 1;
        }
        assert_eq!(subset_sum_profile(&s, pm(p)).exact_counts().unwrap(), &brute[..]);
    }

    #[test]
    fn large_sets_fall_back_to_normalized() {
        let s = IntegerSet::from_unsorted((1..=100).collect());
        let prof = subset_sum_profile(&s, pm(7));
        assert!(!prof.is_exact());
        let total: f64 = prof.normalized().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(matches!(weighted_average(&prof, &Measure::uniform(7)), Err(SubsetSumError::NotExact(100))));
        // 2^64 still fits exactly
        let s = IntegerSet::from_unsorted((1..=64).collect());
        let c = subset_sum_profile(&s, pm(3));
        assert_eq!(c.exact_counts().unwrap().iter().sum::<u128>(), 1u128 << 64);
    }

    #[test]
    fn riesz_examples() {
        let s = set(&[4, 9, 15]);
        let r0 = riesz_product(&s, 0, pm(11));
        assert!((r0.log_magnitude - 3.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(r0.phase, 0.0);
        assert!(riesz_product(&set(&[1]), 1, pm(2)).is_zero());
        let r = riesz_product(&set(&[1, 2]), 1, pm(5));
        let expect = 4.0 * ((PI / 5.0).cos() * (2.0 * PI / 5.0).cos()).abs();
        assert!((r.log_magnitude.exp() - expect).abs() < 1e-12);
        // direct complex product
        let (mut re, mut im) = (1.0f64, 0.0f64);
        for s in [1.0, 2.0] {
            let t = 2.0 * PI * s / 5.0;
            let (fr, fi) = (1.0 + t.cos(), t.sin());
            (re, im) = (re * fr - im * fi, re * fi + im * fr);
        }
        let (gr, gi) = r.scaled(0);
        assert!((gr - re).abs() < 1e-12 && (gi - im).abs() < 1e-12);
    }

    #[test]
    fn fourier_identity_examples() {
        assert!(verify_fourier_identity(&set(&[]), pm(7)).unwrap() < 1e-15);
        assert!(verify_fourier_identity(&set(&[1, 2]), pm(5)).unwrap() <= 1e-12);
        let big = IntegerSet::from_unsorted((0..41).collect());
        assert!(matches!(verify_fourier_identity(&big, pm(5)), Err(SubsetSumError::TooLarge { .. })));
    }

    #[test]
    fn weighted_average_examples() {
        let s = set(&[1, 2]);
        let prof = subset_sum_profile(&s, pm(5));
        assert_eq!(weighted_average(&prof, &Measure::uniform(5)).unwrap(), ratio(4, 5));
        assert_eq!(weighted_average(&prof, &Measure::point(5, 3)).unwrap(), ratio(1, 1));
        let half = Measure::new(vec![ratio(1, 2), ratio(1, 2), ratio(0, 1), ratio(0, 1), ratio(0, 1)]).unwrap();
        assert_eq!(weighted_average(&prof, &half).unwrap(), ratio(1, 1));
        assert!(matches!(
            weighted_average(&prof, &Measure::uniform(7)),
            Err(SubsetSumError::DimensionMismatch { got: 7, p: 5 })
        ));
        assert!(Measure::new(vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(Measure::new(vec![ratio(3, 2), ratio(-1, 2)]).is_err());
    }

    #[test]
    fn concentration_on_dilated_interval() {
        let p = 1009;
        let a0 = 17;
        let inv = arith::mod_inverse(a0, p).unwrap();
        let s: Vec<u64> = (-7i64..=7).map(|j| (j.rem_euclid(p as i64) as u64) * inv % p + p).collect();
        let s = IntegerSet::from_unsorted(s);
        let (a, frac) = detect_ap_concentration(&s, pm(p), 0.01).unwrap().unwrap();
        assert!(a == a0 || a == p - a0, "a = {a}");
        assert!(frac >= 0.99);
    }

    #[test]
    fn no_concentration_on_full_residue_system() {
        for p in [11u64, 53, 101] {
            let s = IntegerSet::from_unsorted((0..p).collect());
            let tau = default_threshold(p);
            let scan = concentration_scan(&s, pm(p), tau).unwrap();
            assert!(!scan.concentrated());
            assert!((scan.fraction - (2.0 * (tau * p as f64).ceil() - 1.0) / p as f64).abs() < 1e-12);
            assert_eq!(detect_ap_concentration(&s, pm(p), 0.2).unwrap(), None);
        }
    }

    #[test]
    fn single_element_scan() {
        let s = set(&[3]);
        let scan = concentration_scan(&s, pm(31), default_threshold(31)).unwrap();
        // |2 cos(pi 3a/31)| peaks where 3a is nearest 0 mod 31
        assert_eq!(scan.a, arith::mod_inverse(3, 31).unwrap().min(31 - arith::mod_inverse(3, 31).unwrap()));
        assert!(scan.fraction == 0.0 || scan.fraction == 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn counts_total_two_to_the_size(v in proptest::collection::vec(0u64..10_000, 0..30), pi in 0usize..20) {
            let p = arith::primes_between(2, 100)[pi];
            let s = IntegerSet::from_unsorted(v);
            let prof = subset_sum_profile(&s, pm(p));
            prop_assert_eq!(prof.exact_counts().unwrap().iter().sum::<u128>(), 1u128 << s.len());
            let avg = weighted_average(&prof, &Measure::uniform(p)).unwrap();
            prop_assert_eq!(avg, BigRational::new(BigInt::from(1u128 << s.len()), BigInt::from(p)));
        }

        #[test]
        fn shifting_by_multiples_of_p_keeps_counts(v in proptest::collection::vec(0u64..1000, 1..15), i in 0usize..15, t in 1u64..5, pi in 0usize..20) {
            let p = arith::primes_between(2, 100)[pi];
            let s = IntegerSet::from_unsorted(v);
            let i = i % s.len();
            let mut moved = s.elements().to_vec();
            moved[i] += t * p;
            let shifted = IntegerSet::from_unsorted(moved);
            prop_assume!(shifted.len() == s.len());
            prop_assert_eq!(subset_sum_profile(&s, pm(p)), subset_sum_profile(&shifted, pm(p)));
        }
    }
}
