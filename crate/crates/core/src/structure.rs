//! Structural classification of finite integer sets: progressions, intervals,
//! covers by few progressions, additive energy, sumsets and low-rank GAPs.

use std::collections::HashMap;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::StructureError;
use crate::par;
use crate::types::{GapDescription, GapGenerator, IntegerProgression, IntegerSet};

/// Largest set handled by the exhaustive cover searches.
pub const EXHAUSTIVE_COVER_LIMIT: usize = 40;
pub const MAX_COVER_K: usize = 4;
/// Volume guard for expanding a GAP.
pub const GAP_VOLUME_LIMIT: u128 = 10_000_000;
pub const GAP_SEARCH_LIMIT: usize = 30;

/// `Some` iff `S` is an arithmetic progression; the witness starts at `min S`.
/// The empty set yields the empty progression.
pub fn detect_ap(s: &IntegerSet) -> Option<IntegerProgression> {
    let e = s.elements();
    match e.len() {
        0 => Some(IntegerProgression::EMPTY),
        1 => Some(IntegerProgression::singleton(e[0] as i64)),
        n => {
            let d = e[1] - e[0];
            e.windows(2)
                .all(|w| w[1] - w[0] == d)
                .then(|| IntegerProgression::new(e[0] as i64, d as i64, n as u64))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalShape {
    Empty,
    Range(u64, u64),
}

/// `Some` iff `S` is the full integer interval `[min S, max S]`.
pub fn detect_interval(s: &IntegerSet) -> Option<IntervalShape> {
    match (s.min(), s.max()) {
        (Some(lo), Some(hi)) => ((hi - lo + 1) as usize == s.len()).then_some(IntervalShape::Range(lo, hi)),
        _ => Some(IntervalShape::Empty),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApCover {
    pub aps: Vec<IntegerProgression>,
    /// `false` when the search was greedy and `k` may not be minimal.
    pub exhaustive: bool,
}

impl ApCover {
    pub fn k(&self) -> usize {
        self.aps.len()
    }

    /// Distinct elements of the union, sorted.
    pub fn union(&self) -> Vec<i64> {
        let mut all: Vec<i64> = self.aps.iter().flat_map(|a| a.elements().collect::<Vec<_>>()).collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn longest(&self) -> u64 {
        self.aps.iter().map(|a| a.len).max().unwrap_or(0)
    }
}

/// Bitmask over the (at most 64) elements of a small set.
type Mask = u64;

fn full_mask(n: usize) -> Mask {
    if n == 64 {
        Mask::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Longest run `{x + j d}` inside `S` through index `i`, as (first index, mask, len).
fn maximal_run(e: &[u64], index: &HashMap<u64, usize>, i: usize, d: u64) -> (u64, Mask, u64) {
    let mut first = e[i];
    while first >= d && index.contains_key(&(first - d)) {
        first -= d;
    }
    let (mut mask, mut len, mut x) = (0, 0, first);
    while let Some(&j) = index.get(&x) {
        mask |= 1 << j;
        len += 1;
        x += d;
    }
    (first, mask, len)
}

/// Smallest `k <= k_max` such that `S` is the union of `k` arithmetic
/// progressions, each a subset of `S`. Exhaustive for `|S| <= 40` and
/// `k_max <= 4`; otherwise a greedy cover flagged as such.
pub fn minimal_ap_cover(s: &IntegerSet, k_max: usize) -> Option<ApCover> {
    let e = s.elements();
    if e.is_empty() {
        return Some(ApCover { aps: vec![], exhaustive: true });
    }
    if e.len() > EXHAUSTIVE_COVER_LIMIT || k_max > MAX_COVER_K {
        let aps = greedy_union_cover(e);
        return (aps.len() <= k_max).then_some(ApCover { aps, exhaustive: false });
    }
    let index: HashMap<u64, usize> = e.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let full = full_mask(e.len());
    // candidates[i]: maximal runs through element i, one per step
    let candidates: Vec<Vec<(IntegerProgression, Mask)>> = (0..e.len())
        .map(|i| {
            let mut runs: Vec<(IntegerProgression, Mask)> = vec![(IntegerProgression::singleton(e[i] as i64), 1 << i)];
            let mut steps: Vec<u64> = e.iter().filter(|&&y| y != e[i]).map(|&y| y.abs_diff(e[i])).collect();
            steps.sort_unstable();
            steps.dedup();
            for d in steps {
                let (first, mask, len) = maximal_run(e, &index, i, d);
                if len >= 2 {
                    runs.push((IntegerProgression::new(first as i64, d as i64, len), mask));
                }
            }
            prune_dominated(runs)
        })
        .collect();
    (1..=k_max).find_map(|k| {
        let mut chosen = Vec::with_capacity(k);
        search_cover(&candidates, full, 0, k, &mut chosen).then_some(ApCover { aps: chosen, exhaustive: true })
    })
}

/// Keeps candidates whose mask is not strictly contained in another's; first wins on ties.
fn prune_dominated(mut runs: Vec<(IntegerProgression, Mask)>) -> Vec<(IntegerProgression, Mask)> {
    runs.sort_by_key(|(_, m)| std::cmp::Reverse(m.count_ones()));
    let mut kept: Vec<(IntegerProgression, Mask)> = Vec::new();
    for (ap, m) in runs {
        if !kept.iter().any(|(_, k)| k & m == m) {
            kept.push((ap, m));
        }
    }
    kept
}

fn search_cover(
    candidates: &[Vec<(IntegerProgression, Mask)>],
    full: Mask,
    covered: Mask,
    left: usize,
    chosen: &mut Vec<IntegerProgression>,
) -> bool {
    if covered == full {
        return true;
    }
    if left == 0 {
        return false;
    }
    let first = (!covered & full).trailing_zeros() as usize;
    let remaining = (!covered & full).count_ones();
    let best = candidates.iter().flatten().map(|(_, m)| (m & !covered).count_ones()).max().unwrap_or(1);
    if (best as usize) * left < remaining as usize {
        return false;
    }
    for (ap, m) in &candidates[first] {
        chosen.push(*ap);
        if search_cover(candidates, full, covered | m, left - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

fn greedy_union_cover(e: &[u64]) -> Vec<IntegerProgression> {
    let mut left: Vec<u64> = e.to_vec();
    let mut aps = Vec::new();
    while !left.is_empty() {
        let set: std::collections::HashSet<u64> = left.iter().copied().collect();
        let mut best = IntegerProgression::singleton(left[0] as i64);
        for (i, &x) in left.iter().enumerate() {
            for &y in &left[i + 1..] {
                let d = y - x;
                if x >= d && set.contains(&(x - d)) {
                    continue;
                }
                let mut len = 0;
                while set.contains(&(x + len * d)) {
                    len += 1;
                }
                if len > best.len {
                    best = IntegerProgression::new(x as i64, d as i64, len);
                }
            }
        }
        left.retain(|&x| !best.contains(x as i64));
        aps.push(best);
    }
    aps
}

/// Smallest `k <= k_max` such that `S` is contained in a union of `k`
/// progressions of at most `max_len` terms each (terms outside `S` allowed).
/// `None` when no such cover exists or `|S| > 40`.
pub fn minimal_containment_cover(s: &IntegerSet, k_max: usize, max_len: u64) -> Option<ApCover> {
    let e = s.elements();
    if e.is_empty() {
        return Some(ApCover { aps: vec![], exhaustive: true });
    }
    if e.len() > EXHAUSTIVE_COVER_LIMIT || max_len == 0 {
        return None;
    }
    let full = full_mask(e.len());
    (1..=k_max.min(e.len())).find_map(|k| {
        let mut chosen = Vec::with_capacity(k);
        containment_search(e, max_len, full, 0, k, &mut chosen).then_some(ApCover { aps: chosen, exhaustive: true })
    })
}

fn containment_search(
    e: &[u64],
    max_len: u64,
    full: Mask,
    covered: Mask,
    left: usize,
    chosen: &mut Vec<IntegerProgression>,
) -> bool {
    if covered == full {
        return true;
    }
    if left == 0 {
        return false;
    }
    // The progression covering the least uncovered element may start there.
    let i = (!covered & full).trailing_zeros() as usize;
    let x = e[i];
    let mut steps: Vec<u64> = Vec::new();
    for (j, &y) in e.iter().enumerate().skip(i + 1) {
        if covered & (1 << j) != 0 {
            continue;
        }
        steps.extend(steps_within(y - x, max_len));
    }
    steps.sort_unstable();
    steps.dedup();
    let mut options: Vec<(IntegerProgression, Mask)> = vec![(IntegerProgression::singleton(x as i64), 1 << i)];
    for d in steps {
        let last = x + d * (max_len - 1);
        let mask = e
            .iter()
            .enumerate()
            .filter(|&(_, &y)| y >= x && y <= last && (y - x).is_multiple_of(d))
            .fold(0, |m, (j, _)| m | (1 << j));
        let top = e.iter().rev().find(|&&y| y >= x && y <= last && (y - x).is_multiple_of(d)).copied().unwrap_or(x);
        options.push((IntegerProgression::new(x as i64, d as i64, (top - x) / d + 1), mask));
    }
    let options = prune_dominated(options.into_iter().map(|(a, m)| (a, m & !covered)).collect());
    let remaining = (!covered & full).count_ones() as u128;
    if (max_len as u128) * (left as u128) < remaining {
        return false;
    }
    for (ap, m) in options {
        chosen.push(ap);
        if containment_search(e, max_len, full, covered | m, left - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Steps `d | diff` with `diff / d < max_len`.
fn steps_within(diff: u64, max_len: u64) -> Vec<u64> {
    if max_len.saturating_mul(max_len) <= diff {
        return (1..max_len.min(diff + 1)).filter(|q| diff.is_multiple_of(*q)).map(|q| diff / q).collect();
    }
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= diff {
        if diff.is_multiple_of(d) {
            for c in [d, diff / d] {
                if diff / c < max_len {
                    out.push(c);
                }
            }
        }
        d += 1;
    }
    out
}

/// Least `L` such that `S` sits inside `k` progressions of at most `L` terms.
pub fn min_bottleneck_cover(s: &IntegerSet, k: usize) -> Option<(u64, ApCover)> {
    let (lo, hi) = (s.min()?, s.max()?);
    if s.len() > EXHAUSTIVE_COVER_LIMIT || k == 0 {
        return None;
    }
    let (mut a, mut b) = (1u64, hi - lo + 1);
    let mut best = minimal_containment_cover(s, k, b)?;
    while a < b {
        let mid = a + (b - a) / 2;
        match minimal_containment_cover(s, k, mid) {
            Some(c) => {
                b = mid;
                best = c;
            }
            None => a = mid + 1,
        }
    }
    Some((b, best))
}

/// Multiplicities `r(s)` of the sumset, as sorted `(sum, count)` pairs over ordered pairs.
fn sum_histogram(e: &[u64]) -> Vec<(u64, u64)> {
    let Some(&max) = e.last() else { return Vec::new() };
    if max <= (1 << 24) {
        let mut counts = vec![0u64; 2 * max as usize + 1];
        for (i, &a) in e.iter().enumerate() {
            counts[2 * a as usize] += 1;
            for &b in &e[i + 1..] {
                counts[(a + b) as usize] += 2;
            }
        }
        counts.into_iter().enumerate().filter(|&(_, c)| c > 0).map(|(s, c)| (s as u64, c)).collect()
    } else {
        let mut sums: Vec<u64> = Vec::with_capacity(e.len() * e.len());
        for &a in e {
            for &b in e {
                sums.push(a + b);
            }
        }
        sums.sort_unstable();
        let mut out: Vec<(u64, u64)> = Vec::new();
        for s in sums {
            match out.last_mut() {
                Some((t, c)) if *t == s => *c += 1,
                _ => out.push((s, 1)),
            }
        }
        out
    }
}

/// `E(S) = #{(a,b,c,d) in S^4 : a + b = c + d}`.
pub fn additive_energy(s: &IntegerSet) -> u128 {
    sum_histogram(s.elements()).iter().map(|&(_, r)| r as u128 * r as u128).sum()
}

fn modular_energy(e: &[u64], p: u64) -> u128 {
    let mut counts = vec![0u64; p as usize];
    for &a in e {
        for &b in e {
            counts[((a + b) % p) as usize] += 1;
        }
    }
    counts.iter().map(|&r| r as u128 * r as u128).sum()
}

/// Energy with sums compared mod `p`: over `S` itself, or over the set of
/// distinct residues `S mod p` when `reduce_first`.
pub fn additive_energy_mod(s: &IntegerSet, p: u64, reduce_first: bool) -> u128 {
    if reduce_first {
        modular_energy(&s.reduce_mod(p), p)
    } else {
        modular_energy(s.elements(), p)
    }
}

/// `|S + S|`.
pub fn doubling(s: &IntegerSet) -> u64 {
    sum_histogram(s.elements()).len() as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapContainment {
    pub contained: bool,
    /// `|S ∩ Q| / |Q|` with `|Q|` the number of distinct elements.
    pub density: Ratio<u64>,
    pub distinct: u64,
}

pub fn verify_gap_containment(s: &IntegerSet, q: &GapDescription) -> Result<GapContainment, StructureError> {
    let volume = q.volume();
    if volume > GAP_VOLUME_LIMIT {
        return Err(StructureError::GapTooLarge { volume, limit: GAP_VOLUME_LIMIT });
    }
    let expanded = q.expand();
    let hits = s.elements().iter().filter(|&&x| expanded.binary_search(&(x as i64)).is_ok()).count() as u64;
    let distinct = expanded.len() as u64;
    Ok(GapContainment {
        contained: hits == s.len() as u64,
        density: Ratio::new(hits, distinct.max(1)),
        distinct,
    })
}

/// Least-volume GAP of rank at most `r_max` (1 or 2) containing `S`, or `None`
/// when every such GAP exceeds `volume_budget`. Rank 2 ranges over generator
/// pairs taken from the difference set, with the second index range no longer
/// than the first generator's reduced size. Ties prefer lower rank, then the
/// smaller generators.
pub fn search_low_rank_gap(s: &IntegerSet, r_max: usize, volume_budget: u128) -> Option<GapDescription> {
    let e = s.elements();
    let &base = e.first()?;
    if e.len() == 1 {
        return Some(GapDescription { base: base as i64, generators: vec![] });
    }
    let t: Vec<u64> = e.iter().map(|&x| x - base).collect();
    let span = *t.last().unwrap();
    let g_all = t.iter().fold(0u64, |g, &x| g.gcd(&x));
    let rank1 = (span / g_all + 1) as u128;
    let mut best: Option<(u128, GapDescription)> = (rank1 <= volume_budget).then(|| {
        let gap = GapDescription {
            base: base as i64,
            generators: vec![GapGenerator { step: g_all as i64, lo: 0, hi: (span / g_all) as i64 }],
        };
        (rank1, gap)
    });
    if r_max >= 2 && e.len() <= GAP_SEARCH_LIMIT && best.as_ref().is_none_or(|(v, _)| *v > e.len() as u128) {
        let mut diffs: Vec<u64> = Vec::new();
        for (i, &a) in t.iter().enumerate() {
            for &b in &t[i + 1..] {
                diffs.push(b - a);
            }
        }
        diffs.sort_unstable();
        diffs.dedup();
        let found = par::map(&diffs, |&v1| {
            let mut local: Option<(u128, u64, u64, GapDescription)> = None;
            for &v2 in &diffs {
                if v2 == v1 || g_all % v1.gcd(&v2) != 0 {
                    continue;
                }
                if let Some((vol, gap)) = rank2_for_pair(&t, v1, v2) {
                    if local.as_ref().is_none_or(|(lv, ..)| vol < *lv) {
                        local = Some((vol, v1, v2, gap));
                    }
                }
            }
            local
        });
        let top = found.into_iter().flatten().min_by_key(|(vol, v1, v2, _)| (*vol, *v1, *v2));
        if let Some((vol, _, _, mut gap)) = top {
            if vol <= volume_budget && best.as_ref().is_none_or(|(bv, _)| vol < *bv) {
                gap.base += base as i64;
                best = Some((vol, gap));
            }
        }
    }
    best.map(|(_, g)| g)
}

/// Best GAP `{n1 v1 + n2 v2}` containing the shifted set `t` (with `0 in t`),
/// with the `n2` window no taller than `v1 / gcd(v1, v2)`.
fn rank2_for_pair(t: &[u64], v1: u64, v2: u64) -> Option<(u128, GapDescription)> {
    let g = v1.gcd(&v2);
    let (w1, w2) = ((v1 / g) as i128, (v2 / g) as i128);
    if w1 == 1 {
        return None;
    }
    let inv = crate::arith::mod_inverse((w2 % w1) as u64, w1 as u64)? as i128;
    let reduced: Vec<i128> = t.iter().map(|&x| (x / g) as i128).collect();
    let rho: Vec<i128> = reduced.iter().map(|&u| (u % w1) * inv % w1).collect();
    let mut starts = rho.clone();
    starts.sort_unstable();
    starts.dedup();
    let mut best: Option<(u128, GapDescription)> = None;
    for &m2 in &starts {
        let n2: Vec<i128> = rho.iter().map(|&r| m2 + (r - m2).rem_euclid(w1)).collect();
        let height = n2.iter().max().unwrap() - m2 + 1;
        if height == 1 {
            continue;
        }
        let n1: Vec<i128> = reduced.iter().zip(&n2).map(|(&u, &k)| (u - k * w2) / w1).collect();
        let (lo1, hi1) = (*n1.iter().min().unwrap(), *n1.iter().max().unwrap());
        let vol = (height * (hi1 - lo1 + 1)) as u128;
        if best.as_ref().is_none_or(|(b, _)| vol < *b) {
            let base = (lo1 * v1 as i128 + m2 * v2 as i128) as i64;
            let gap = GapDescription {
                base,
                generators: vec![
                    GapGenerator { step: v1 as i64, lo: 0, hi: (hi1 - lo1) as i64 },
                    GapGenerator { step: v2 as i64, lo: 0, hi: (height - 1) as i64 },
                ],
            };
            best = Some((vol, gap));
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub size: usize,
    pub ap: Option<IntegerProgression>,
    pub interval: Option<IntervalShape>,
    pub min_ap_cover: Option<ApCover>,
    pub gap_witness: Option<GapDescription>,
    pub energy: u128,
    pub doubling: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub cover_k_max: usize,
    pub gap_rank: usize,
    pub gap_budget: u128,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { cover_k_max: MAX_COVER_K, gap_rank: 2, gap_budget: GAP_VOLUME_LIMIT }
    }
}

pub fn analyze(s: &IntegerSet, opts: AnalyzeOptions) -> StructureReport {
    StructureReport {
        size: s.len(),
        ap: detect_ap(s),
        interval: detect_interval(s),
        min_ap_cover: minimal_ap_cover(s, opts.cover_k_max),
        gap_witness: search_low_rank_gap(s, opts.gap_rank, opts.gap_budget),
        energy: additive_energy(s),
        doubling: doubling(s),
    }
}
