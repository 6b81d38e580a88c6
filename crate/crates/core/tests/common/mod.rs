#![allow(dead_code)]

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sievelab::arith::primes_between;
use sievelab::{ConstraintFamily, ModProgression, PrimeModulus, ResidueConstraint, ResiduePart};

/// A random residue set mod `p`: an interval, a progression, or a union of two or three.
pub fn random_constraint(rng: &mut ChaCha8Rng, p: u64) -> ResidueConstraint {
    let part = |rng: &mut ChaCha8Rng| -> ResiduePart {
        let start = rng.gen_range(0..p);
        let len = rng.gen_range(1..=p);
        if rng.gen_bool(0.5) {
            ModProgression::new(start, 1, len).into()
        } else {
            ModProgression::new(start, rng.gen_range(1..p.max(2)), len).into()
        }
    };
    let count = match rng.gen_range(0..3) {
        0 | 1 => 1,
        _ => rng.gen_range(2..=3),
    };
    let parts = (0..count).map(|_| part(rng)).collect();
    ResidueConstraint::new(PrimeModulus::new(p).unwrap(), parts).unwrap()
}

/// Up to `max_primes` distinct primes from `[lo, hi]`, each with a random residue set.
pub fn random_family(seed: u64, n_max: u64, lo: u64, hi: u64, max_primes: usize) -> ConstraintFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = primes_between(lo, hi);
    let k = rng.gen_range(1..=max_primes.min(pool.len()));
    let mut chosen: Vec<u64> = rand::seq::index::sample(&mut rng, pool.len(), k).into_iter().map(|i| pool[i]).collect();
    chosen.sort_unstable();
    let cs = chosen.iter().map(|&p| random_constraint(&mut rng, p)).collect();
    ConstraintFamily::new(n_max, Ratio::new(1, 4), lo, hi, cs).unwrap()
}

/// `#{(a, b, c, d) in S^4 : a + b = c + d}` by direct enumeration.
pub fn brute_energy(s: &[u64]) -> u128 {
    let mut count = 0;
    for &a in s {
        for &b in s {
            for &c in s {
                for &d in s {
                    if a + b == c + d {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}
