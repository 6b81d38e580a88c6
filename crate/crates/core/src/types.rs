//! Domain types: prime moduli, residue progressions, constraint families,
//! integer sets, and generalized arithmetic progressions.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::TypeError;

/// A prime modulus, checked with a deterministic primality test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self, TypeError> {
        if arith::is_prime(p) {
            Ok(PrimeModulus(p))
        } else {
            Err(TypeError::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl<'de> Deserialize<'de> for PrimeModulus {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let p = u64::deserialize(d)?;
        PrimeModulus::new(p).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `{start + j*step mod p : 0 <= j < len}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModProgression {
    pub start: u64,
    pub step: u64,
    pub len: u64,
}

impl ModProgression {
    pub fn new(start: u64, step: u64, len: u64) -> Self {
        ModProgression { start, step, len }
    }

    /// `{low, low+1, ..., low+width} mod p`.
    pub fn interval(low: u64, width: u64) -> Self {
        ModProgression { start: low, step: 1, len: width + 1 }
    }

    /// `{j*step : lo <= j <= hi} mod p` for a signed index window.
    pub fn symmetric(step: u64, lo: i64, hi: i64, p: u64) -> Self {
        let start = (lo as i128 * step as i128).rem_euclid(p as i128) as u64;
        ModProgression { start, step: step % p, len: (hi - lo + 1).max(0) as u64 }
    }

    fn elements(&self, p: u64) -> impl Iterator<Item = u64> + '_ {
        let (start, step) = (self.start % p, self.step % p);
        (0..self.len).map(move |j| ((start as u128 + j as u128 * step as u128) % p as u128) as u64)
    }
}

/// `{coeff*m^2 + offset mod p : 0 <= m < len}`: the image of a short interval
/// under a quadratic, used by the polynomial-progression construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModQuadratic {
    pub coeff: u64,
    pub offset: u64,
    pub len: u64,
}

/// One structured piece of a prescribed residue set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResiduePart {
    Progression(ModProgression),
    Quadratic { quad: ModQuadratic },
}

impl ResiduePart {
    pub fn len(&self) -> u64 {
        match self {
            ResiduePart::Progression(ap) => ap.len,
            ResiduePart::Quadratic { quad } => quad.len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_progression(&self) -> Option<&ModProgression> {
        match self {
            ResiduePart::Progression(ap) => Some(ap),
            ResiduePart::Quadratic { .. } => None,
        }
    }

    /// Whether the reduced residue `r` is in this part; progressions solve
    /// for the index with an inverse instead of enumerating.
    fn contains(&self, r: u64, p: u64) -> bool {
        match self {
            ResiduePart::Progression(ap) => {
                let (start, step) = (ap.start % p, ap.step % p);
                let diff = (r + p - start) % p;
                match arith::mod_inverse(step, p) {
                    Some(inv) => ((diff as u128 * inv as u128) % p as u128) < ap.len as u128,
                    None => ap.len > 0 && diff == 0,
                }
            }
            ResiduePart::Quadratic { .. } => self.residues(p).contains(&r),
        }
    }

    fn residues(&self, p: u64) -> Vec<u64> {
        match self {
            ResiduePart::Progression(ap) => ap.elements(p).collect(),
            ResiduePart::Quadratic { quad } => (0..quad.len)
                .map(|m| {
                    let sq = (m as u128 * m as u128) % p as u128;
                    ((quad.coeff as u128 % p as u128 * sq + quad.offset as u128) % p as u128) as u64
                })
                .collect(),
        }
    }
}

impl From<ModProgression> for ResiduePart {
    fn from(ap: ModProgression) -> Self {
        ResiduePart::Progression(ap)
    }
}

/// A prime and its prescribed residue set, a union of structured parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawConstraint")]
pub struct ResidueConstraint {
    p: PrimeModulus,
    parts: Vec<ResiduePart>,
}

#[derive(Deserialize)]
struct RawConstraint {
    p: PrimeModulus,
    parts: Vec<ResiduePart>,
}

impl TryFrom<RawConstraint> for ResidueConstraint {
    type Error = TypeError;
    fn try_from(raw: RawConstraint) -> Result<Self, TypeError> {
        ResidueConstraint::new(raw.p, raw.parts)
    }
}

/// Outcome of [`ResidueConstraint::normalize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub constraint: ResidueConstraint,
    /// Residues that appear in more than one part.
    pub overlapping: Vec<u64>,
}

impl ResidueConstraint {
    pub fn new(p: PrimeModulus, parts: Vec<ResiduePart>) -> Result<Self, TypeError> {
        if parts.is_empty() {
            return Err(TypeError::NoParts(p.get()));
        }
        let c = ResidueConstraint { p, parts };
        c.check_lengths()?;
        Ok(c)
    }

    pub fn single(p: PrimeModulus, part: impl Into<ResiduePart>) -> Self {
        Self::new(p, vec![part.into()]).expect("single part within bounds")
    }

    fn check_lengths(&self) -> Result<(), TypeError> {
        let p = self.p.get();
        for part in &self.parts {
            if let ResiduePart::Progression(ap) = part {
                if ap.len > p {
                    return Err(TypeError::MalformedConstraint {
                        p,
                        reason: format!("progression length {} exceeds modulus", ap.len),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn p(&self) -> u64 {
        self.p.get()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn parts(&self) -> &[ResiduePart] {
        &self.parts
    }

    /// The lone progression, if this constraint is a single progression part.
    pub fn single_progression(&self) -> Option<&ModProgression> {
        match self.parts.as_slice() {
            [ResiduePart::Progression(ap)] => Some(ap),
            _ => None,
        }
    }

    /// Canonical form: residues reduced mod p, zero steps collapsed to one
    /// element, length-one parts carry step 0, and each step is replaced by
    /// `p - step` (walking the progression backwards) when that is smaller.
    pub fn normalize(&self) -> Result<Normalized, TypeError> {
        self.check_lengths()?;
        let p = self.p.get();
        let parts = self
            .parts
            .iter()
            .map(|part| match *part {
                ResiduePart::Progression(ap) => ResiduePart::Progression(canonical_progression(ap, p)),
                ResiduePart::Quadratic { quad } => ResiduePart::Quadratic {
                    quad: ModQuadratic { coeff: quad.coeff % p, offset: quad.offset % p, len: quad.len },
                },
            })
            .collect::<Vec<_>>();
        let mut seen = BTreeSet::new();
        let mut overlapping = BTreeSet::new();
        for part in &parts {
            let mut own: Vec<u64> = part.residues(p);
            own.sort_unstable();
            own.dedup();
            for r in own {
                if !seen.insert(r) {
                    overlapping.insert(r);
                }
            }
        }
        Ok(Normalized {
            constraint: ResidueConstraint { p: self.p, parts },
            overlapping: overlapping.into_iter().collect(),
        })
    }

    /// Exact sorted residue set `R_p`.
    pub fn residues(&self) -> Vec<u64> {
        let p = self.p.get();
        let mut all: Vec<u64> = self.parts.iter().flat_map(|part| part.residues(p)).collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn residue_count(&self) -> u64 {
        self.residues().len() as u64
    }

    pub fn contains_residue(&self, r: u64) -> bool {
        let p = self.p.get();
        self.parts.iter().any(|part| part.contains(r % p, p))
    }
}

fn canonical_progression(ap: ModProgression, p: u64) -> ModProgression {
    let start = ap.start % p;
    let step = ap.step % p;
    if ap.len == 0 {
        return ModProgression { start: 0, step: 0, len: 0 };
    }
    if step == 0 || ap.len == 1 {
        return ModProgression { start, step: 0, len: 1 };
    }
    if step > p - step {
        let last = ((start as u128 + (ap.len - 1) as u128 * step as u128) % p as u128) as u64;
        ModProgression { start: last, step: p - step, len: ap.len }
    } else {
        ModProgression { start, step, len: ap.len }
    }
}

/// Sorted residues of a single constraint, after normalization.
pub fn enumerate_residues(c: &ResidueConstraint) -> Vec<u64> {
    c.residues()
}

pub fn normalize_constraint(c: &ResidueConstraint) -> Result<Normalized, TypeError> {
    c.normalize()
}

/// `N`, `eps`, the prime window `[y_low, y_high]`, and one constraint per prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintFamily {
    n_max: u64,
    epsilon: Ratio<u64>,
    y_low: u64,
    y_high: u64,
    constraints: Vec<ResidueConstraint>,
}

impl ConstraintFamily {
    pub fn new(
        n_max: u64,
        epsilon: Ratio<u64>,
        y_low: u64,
        y_high: u64,
        mut constraints: Vec<ResidueConstraint>,
    ) -> Result<Self, TypeError> {
        if epsilon.numer() == &0 || epsilon >= Ratio::from_integer(1) {
            return Err(TypeError::Epsilon(format!("{epsilon}")));
        }
        if y_low > y_high {
            return Err(TypeError::PrimeRange { y_low, y_high });
        }
        constraints.sort_by_key(|c| c.p());
        for w in constraints.windows(2) {
            if w[0].p() == w[1].p() {
                return Err(TypeError::DuplicatePrime(w[0].p()));
            }
        }
        if let Some(c) = constraints.iter().find(|c| c.p() < y_low || c.p() > y_high) {
            return Err(TypeError::PrimeOutsideRange { p: c.p(), y_low, y_high });
        }
        Ok(ConstraintFamily { n_max, epsilon, y_low, y_high, constraints })
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn epsilon(&self) -> Ratio<u64> {
        self.epsilon
    }

    pub fn y_low(&self) -> u64 {
        self.y_low
    }

    pub fn y_high(&self) -> u64 {
        self.y_high
    }

    pub fn constraints(&self) -> &[ResidueConstraint] {
        &self.constraints
    }

    pub fn primes(&self) -> Vec<u64> {
        self.constraints.iter().map(|c| c.p()).collect()
    }

    pub fn constraint_for(&self, p: u64) -> Option<&ResidueConstraint> {
        self.constraints
            .binary_search_by_key(&p, |c| c.p())
            .ok()
            .map(|i| &self.constraints[i])
    }

    /// Same family with one more constraint (the prime window widens if needed).
    pub fn with_constraint(&self, c: ResidueConstraint) -> Result<Self, TypeError> {
        let mut cs = self.constraints.clone();
        let (lo, hi) = (self.y_low.min(c.p()), self.y_high.max(c.p()));
        cs.push(c);
        ConstraintFamily::new(self.n_max, self.epsilon, lo, hi, cs)
    }

    /// Same family restricted to primes in `[lo, hi]`.
    pub fn restricted(&self, lo: u64, hi: u64) -> Self {
        let cs = self.constraints.iter().filter(|c| c.p() >= lo && c.p() <= hi).cloned().collect();
        ConstraintFamily { constraints: cs, ..self.clone() }
    }
}

/// A finite sorted set of distinct integers in `[0, n_max]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSet")]
pub struct IntegerSet {
    n_max: u64,
    elements: Vec<u64>,
}

#[derive(Deserialize)]
struct RawSet {
    n_max: u64,
    elements: Vec<u64>,
}

impl TryFrom<RawSet> for IntegerSet {
    type Error = TypeError;
    fn try_from(raw: RawSet) -> Result<Self, TypeError> {
        IntegerSet::from_sorted(raw.elements, raw.n_max)
    }
}

impl IntegerSet {
    pub fn from_sorted(elements: Vec<u64>, n_max: u64) -> Result<Self, TypeError> {
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TypeError::UnsortedSet);
        }
        if let Some(&last) = elements.last() {
            if last > n_max {
                return Err(TypeError::SetOutOfRange { value: last, n_max });
            }
        }
        Ok(IntegerSet { n_max, elements })
    }

    /// Sorts and dedups; `n_max` defaults to the largest element.
    pub fn from_unsorted(mut elements: Vec<u64>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        let n_max = elements.last().copied().unwrap_or(0);
        IntegerSet { n_max, elements }
    }

    pub fn empty(n_max: u64) -> Self {
        IntegerSet { n_max, elements: Vec::new() }
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.elements.binary_search(&n).is_ok()
    }

    pub fn min(&self) -> Option<u64> {
        self.elements.first().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.elements.last().copied()
    }

    pub fn is_subset_of(&self, other: &IntegerSet) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    /// Distinct residues mod `p`, sorted.
    pub fn reduce_mod(&self, p: u64) -> Vec<u64> {
        let mut r: Vec<u64> = self.elements.iter().map(|&x| x % p).collect();
        r.sort_unstable();
        r.dedup();
        r
    }

    /// `a*S + b` with a widened range.
    pub fn dilate_translate(&self, a: u64, b: u64) -> IntegerSet {
        let elements: Vec<u64> = self.elements.iter().map(|&x| a * x + b).collect();
        let n_max = a * self.n_max + b;
        IntegerSet { n_max, elements }
    }
}

/// One generator `v` of a GAP with index range `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GapGenerator {
    pub step: i64,
    pub lo: i64,
    pub hi: i64,
}

/// `{base + sum n_i v_i : lo_i <= n_i <= hi_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GapDescription {
    pub base: i64,
    pub generators: Vec<GapGenerator>,
}

impl GapDescription {
    pub fn new(base: i64, generators: Vec<GapGenerator>) -> Result<Self, TypeError> {
        if generators.iter().any(|g| g.lo > g.hi) {
            return Err(TypeError::GapRange);
        }
        Ok(GapDescription { base, generators })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Box volume `prod (hi_i - lo_i + 1)`; counts with multiplicity.
    pub fn volume(&self) -> u128 {
        self.generators
            .iter()
            .map(|g| (g.hi - g.lo + 1) as u128)
            .product()
    }

    /// Distinct elements, sorted.
    pub fn expand(&self) -> Vec<i64> {
        let mut out = vec![self.base];
        for g in &self.generators {
            let mut next = Vec::with_capacity(out.len() * (g.hi - g.lo + 1) as usize);
            for &x in &out {
                for n in g.lo..=g.hi {
                    next.push(x + n * g.step);
                }
            }
            next.sort_unstable();
            next.dedup();
            out = next;
        }
        out
    }
}

impl fmt::Display for GapDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        for g in &self.generators {
            write!(f, " + [{}..={}]*{}", g.lo, g.hi, g.step)?;
        }
        Ok(())
    }
}

/// A finite integer progression `{start + j*step : 0 <= j < len}`.
///
/// Canonical form: `len == 0` has `start = step = 0`; `len == 1` has `step = 0`;
/// otherwise `step >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerProgression {
    pub start: i64,
    pub step: i64,
    pub len: u64,
}

impl IntegerProgression {
    pub const EMPTY: IntegerProgression = IntegerProgression { start: 0, step: 0, len: 0 };

    /// Builds and canonicalizes; a negative step is flipped by starting from the last term.
    pub fn new(start: i64, step: i64, len: u64) -> Self {
        match len {
            0 => Self::EMPTY,
            1 => IntegerProgression { start, step: 0, len: 1 },
            _ if step == 0 => IntegerProgression { start, step: 0, len: 1 },
            _ if step < 0 => IntegerProgression { start: start + step * (len as i64 - 1), step: -step, len },
            _ => IntegerProgression { start, step, len },
        }
    }

    pub fn singleton(x: i64) -> Self {
        IntegerProgression { start: x, step: 0, len: 1 }
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn last(&self) -> Option<i64> {
        (self.len > 0).then(|| self.start + self.step * (self.len as i64 - 1))
    }

    pub fn elements(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.len).map(move |j| self.start + self.step * j as i64)
    }

    pub fn contains(&self, x: i64) -> bool {
        match self.len {
            0 => false,
            1 => x == self.start,
            _ => {
                let off = x - self.start;
                off >= 0 && off % self.step == 0 && ((off / self.step) as u64) < self.len
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: u64) -> PrimeModulus {
        PrimeModulus::new(n).unwrap()
    }

    #[test]
    fn prime_modulus_rejects_composites() {
        assert!(PrimeModulus::new(2).is_ok());
        assert!(matches!(PrimeModulus::new(91), Err(TypeError::NotPrime(91))));
        assert!(PrimeModulus::new(1).is_err());
    }

    #[test]
    fn normalize_examples() {
        let c = ResidueConstraint::single(p(5), ModProgression::new(3, 4, 2));
        let n = c.normalize().unwrap();
        assert_eq!(n.constraint.single_progression(), Some(&ModProgression::new(2, 1, 2)));
        assert_eq!(n.constraint.residues(), vec![2, 3]);

        let c = ResidueConstraint::single(p(7), ModProgression::new(0, 0, 5));
        let n = c.normalize().unwrap();
        assert_eq!(n.constraint.single_progression(), Some(&ModProgression::new(0, 0, 1)));

        let c = ResidueConstraint::new(
            p(11),
            vec![ModProgression::interval(0, 2).into(), ModProgression::interval(5, 1).into()],
        )
        .unwrap();
        let n = c.normalize().unwrap();
        assert_eq!(n.constraint, c);
        assert!(n.overlapping.is_empty());

        let c = ResidueConstraint::new(
            p(11),
            vec![ModProgression::interval(0, 2).into(), ModProgression::interval(2, 1).into()],
        )
        .unwrap();
        assert_eq!(c.normalize().unwrap().overlapping, vec![2]);
    }

    #[test]
    fn overlong_part_is_malformed() {
        let err = ResidueConstraint::new(p(5), vec![ModProgression::new(0, 1, 6).into()]).unwrap_err();
        assert!(matches!(err, TypeError::MalformedConstraint { p: 5, .. }));
        assert!(ResidueConstraint::new(p(5), vec![]).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let c = ResidueConstraint::single(p(13), ModProgression::new(1, 3, 4));
        assert_eq!(enumerate_residues(&c), vec![1, 4, 7, 10]);
        let c = ResidueConstraint::new(
            p(5),
            vec![ModProgression::interval(0, 1).into(), ModProgression::new(4, 0, 1).into()],
        )
        .unwrap();
        assert_eq!(enumerate_residues(&c), vec![0, 1, 4]);
        let c = ResidueConstraint::single(p(7), ModProgression::new(5, 3, 3));
        assert_eq!(enumerate_residues(&c), vec![1, 4, 5]);
    }

    #[test]
    fn quadratic_parts_enumerate() {
        let c = ResidueConstraint::single(
            p(101),
            ResiduePart::Quadratic { quad: ModQuadratic { coeff: 2, offset: 1, len: 4 } },
        );
        assert_eq!(c.residues(), vec![1, 3, 9, 19]);
    }

    #[test]
    fn family_validation() {
        let eps = Ratio::new(1, 10);
        let c = |q| ResidueConstraint::single(p(q), ModProgression::interval(0, 1));
        assert!(ConstraintFamily::new(10, eps, 5, 20, vec![c(7), c(5)]).is_ok());
        assert!(matches!(
            ConstraintFamily::new(10, eps, 5, 20, vec![c(7), c(7)]),
            Err(TypeError::DuplicatePrime(7))
        ));
        assert!(ConstraintFamily::new(10, eps, 5, 20, vec![c(23)]).is_err());
        assert!(ConstraintFamily::new(10, Ratio::new(0, 1), 5, 20, vec![]).is_err());
    }

    #[test]
    fn gap_expand_dedups() {
        let q = GapDescription::new(
            0,
            vec![GapGenerator { step: 1, lo: 0, hi: 2 }, GapGenerator { step: 2, lo: 0, hi: 1 }],
        )
        .unwrap();
        assert_eq!(q.volume(), 6);
        assert_eq!(q.expand(), vec![0, 1, 2, 3, 4]);
    }

    fn arb_constraint() -> impl Strategy<Value = ResidueConstraint> {
        let primes = crate::arith::primes_between(2, 10_000);
        (proptest::sample::select(primes), 1usize..4).prop_flat_map(|(q, k)| {
            let part = (0..q, 0..q, 0..=q.min(200)).prop_map(|(s, d, l)| ModProgression::new(s, d, l).into());
            proptest::collection::vec(part, k)
                .prop_map(move |parts| ResidueConstraint::new(PrimeModulus::new(q).unwrap(), parts).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn normalization_preserves_residues(c in arb_constraint()) {
            let n = c.normalize().unwrap();
            prop_assert_eq!(n.constraint.residues(), c.residues());
            prop_assert!(c.residue_count() <= c.p());
        }

        #[test]
        fn membership_agrees_with_enumeration(c in arb_constraint()) {
            let rs = c.residues();
            for r in 0..c.p() {
                prop_assert_eq!(c.contains_residue(r), rs.binary_search(&r).is_ok());
            }
        }
    }
}
