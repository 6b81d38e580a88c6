//! Exact integer helpers: primality, prime enumeration, modular inverses,
//! and floors of rational powers computed without floating point.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &b in &MR_BASES {
        if n == b {
            return true;
        }
        if n.is_multiple_of(b) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// All primes in `[lo, hi]`, ascending. Segmented Eratosthenes over the window.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let lo = lo.max(2);
    let root = isqrt(hi);
    let mut small = vec![true; root as usize + 1];
    let mut base = Vec::new();
    for i in 2..=root as usize {
        if small[i] {
            base.push(i as u64);
            let mut j = i * i;
            while j <= root as usize {
                small[j] = false;
                j += i;
            }
        }
    }
    let width = (hi - lo + 1) as usize;
    let mut window = vec![true; width];
    for &q in &base {
        let mut start = (lo.div_ceil(q) * q).max(q * q);
        while start <= hi {
            window[(start - lo) as usize] = false;
            start += q;
        }
    }
    window
        .iter()
        .enumerate()
        .filter(|(_, &keep)| keep)
        .map(|(i, _)| lo + i as u64)
        .collect()
}

/// Least prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// Greatest prime `<= n`, if any.
pub fn prev_prime(n: u64) -> Option<u64> {
    (2..=n).rev().find(|&c| is_prime(c))
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 0 {
        return None;
    }
    let (g, x, _) = ext_gcd((a % m) as i128, m as i128);
    (g == 1).then(|| x.rem_euclid(m as i128) as u64)
}

/// Representative of `x mod p` in `(-p/2, p/2]`.
pub fn least_abs_residue(x: i128, p: u64) -> i64 {
    let r = x.rem_euclid(p as i128) as u64;
    if r > p / 2 {
        r as i64 - p as i64
    } else {
        r as i64
    }
}

/// Distance from `x` to the nearest multiple of `p`, i.e. `p * ||x/p||`.
pub fn dist_to_multiple(x: i128, p: u64) -> u64 {
    least_abs_residue(x, p).unsigned_abs()
}

/// `||x / p|| < 1/sqrt(p)`, decided as `dist^2 < p`.
pub fn below_inverse_sqrt(x: i128, p: u64) -> bool {
    let d = dist_to_multiple(x, p) as u128;
    d * d < p as u128
}

/// Least `x in [1, p-1]` with `||x*q1/p||, ||x*q2/p|| < 1/sqrt(p)`.
///
/// Exhaustive scan; the pigeonhole principle guarantees a hit for prime `p`.
pub fn simultaneous_small_multiplier(p: u64, q1: i128, q2: i128) -> Option<u64> {
    (1..p).find(|&x| below_inverse_sqrt(x as i128 * q1, p) && below_inverse_sqrt(x as i128 * q2, p))
}

/// Compares `x^den` with `c^den * base^num`, i.e. `x` against `c * base^(num/den)`.
pub fn cmp_scaled_pow(x: &BigUint, c: u64, base: u64, exp: Ratio<u64>) -> Ordering {
    let den = *exp.denom() as u32;
    let num = *exp.numer() as u32;
    let lhs = x.pow(den);
    let rhs = BigUint::from(c).pow(den) * BigUint::from(base).pow(num);
    lhs.cmp(&rhs)
}

/// `x <= base^exp`, exact.
pub fn le_pow(x: u64, base: u64, exp: Ratio<u64>) -> bool {
    cmp_scaled_pow(&BigUint::from(x), 1, base, exp) != Ordering::Greater
}

/// `floor(base^exp)` for a nonnegative rational exponent, by binary search on
/// `x^den <= base^num`.
pub fn floor_pow(base: u64, exp: Ratio<u64>) -> u64 {
    if exp.is_zero() || base <= 1 {
        return if base == 0 && !exp.is_zero() { 0 } else { 1 };
    }
    let den = *exp.denom() as u32;
    let num = *exp.numer() as u32;
    let target = BigUint::from(base).pow(num);
    // Upper bound from the float estimate, widened.
    let est = (base as f64).powf(num as f64 / den as f64);
    let mut hi: u64 = if est.is_finite() && est < 1.8e19 {
        (est * 1.01) as u64 + 2
    } else {
        u64::MAX
    };
    let mut lo: u64 = 0;
    while BigUint::from(hi).pow(den) <= target {
        if hi == u64::MAX {
            return hi;
        }
        lo = hi;
        hi = hi.saturating_mul(2);
    }
    // invariant: lo^den <= target < hi^den
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if BigUint::from(mid).pow(den) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Nonnegative `a - b` for exponents; `None` when negative.
pub fn exp_sub(a: Ratio<u64>, b: Ratio<u64>) -> Option<Ratio<u64>> {
    (a >= b).then(|| a - b)
}

pub fn half() -> Ratio<u64> {
    Ratio::new(1, 2)
}

pub fn one() -> Ratio<u64> {
    Ratio::one()
}

pub fn biguint_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..5000 {
            assert_eq!(is_prime(n), trial_division(n), "n = {n}");
        }
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn segmented_primes_agree() {
        let got = primes_between(990, 1100);
        let want: Vec<u64> = (990..=1100).filter(|&n| trial_division(n)).collect();
        assert_eq!(got, want);
        assert_eq!(primes_between(0, 10), vec![2, 3, 5, 7]);
        assert!(primes_between(24, 28).is_empty());
    }

    #[test]
    fn floors_of_rational_powers() {
        // 1009^(2/5) = 15.9...
        assert_eq!(floor_pow(1009, Ratio::new(2, 5)), 15);
        assert_eq!(floor_pow(97, Ratio::new(2, 5)), 6);
        assert_eq!(floor_pow(1024, Ratio::new(1, 2)), 32);
        assert_eq!(floor_pow(1023, Ratio::new(1, 2)), 31);
        assert_eq!(floor_pow(10, Ratio::new(3, 1)), 1000);
        assert_eq!(floor_pow(7, Ratio::new(0, 1)), 1);
        for p in [101u64, 997, 10_007, 99_991] {
            let r = floor_pow(p, Ratio::new(9, 20));
            assert!(le_pow(r, p, Ratio::new(9, 20)));
            assert!(!le_pow(r + 1, p, Ratio::new(9, 20)));
        }
    }

    #[test]
    fn inverses_and_residues() {
        assert_eq!(mod_inverse(7, 11), Some(8));
        assert_eq!(mod_inverse(6, 9), None);
        assert_eq!(least_abs_residue(9, 11), -2);
        assert_eq!(least_abs_residue(-3, 7), -3);
        assert_eq!(dist_to_multiple(2520, 101), 5);
        let (g, x, y) = ext_gcd(240, 46);
        assert_eq!(g, 2);
        assert_eq!(240 * x + 46 * y, 2);
    }

    #[test]
    fn simultaneous_multiplier_is_least() {
        assert_eq!(simultaneous_small_multiplier(101, 3, 5), Some(1));
        let d = simultaneous_small_multiplier(101, 30, 47).unwrap();
        assert!(d <= 84);
        assert!(below_inverse_sqrt(30 * d as i128, 101));
        assert!(below_inverse_sqrt(47 * d as i128, 101));
    }
}
