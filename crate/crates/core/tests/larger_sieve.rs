use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sievelab::arith::{floor_pow, primes_between};
use sievelab::checkers::{gallagher_bound, gallagher_for_family, GallagherBound};
use sievelab::constructions::*;
use sievelab::{sieve_fast, ConstraintFamily, ModProgression, PrimeModulus, ResidueConstraint};

#[test]
fn bound_matches_high_precision_reference() {
    // reference computed to 50 digits independently
    let digits = "55010412252325271531075211594690811206548111411891";
    let reference = BigRational::new(digits.parse::<BigInt>().unwrap(), BigInt::from(10).pow(49));
    let sizes: Vec<(u64, u64)> = primes_between(101, 199).into_iter().map(|p| (p, floor_pow(p, Ratio::new(3, 10)))).collect();
    let GallagherBound::Bound(b) = gallagher_bound(10_000, &sizes) else { panic!("applicable") };
    assert!(b.lo() <= &reference && &reference <= b.hi());
    let tolerance = BigRational::new(BigInt::from(1), BigInt::from(10).pow(15));
    assert!(b.width() < tolerance);
}

fn assert_sound(label: &str, f: &ConstraintFamily) -> bool {
    let a = sieve_fast(f, None).admissible;
    match gallagher_for_family(f) {
        GallagherBound::Inapplicable => false,
        GallagherBound::Bound(b) => {
            let (lo, _) = b.f64_bounds();
            assert!(a.len() as f64 <= lo, "{label}: |A| = {} > {lo}", a.len());
            true
        }
    }
}

#[test]
fn never_below_the_true_size_on_random_families() {
    let mut applicable = 0;
    for seed in 0..300u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_max = rng.gen_range(1_000..100_000);
        let lo = rng.gen_range(20..200);
        let hi = lo + rng.gen_range(50..400);
        let chosen: Vec<u64> = primes_between(lo, hi).into_iter().filter(|_| rng.gen_bool(0.7)).collect();
        let cs: Vec<ResidueConstraint> = chosen
            .into_iter()
            .map(|p| {
                let width = rng.gen_range(0..=floor_pow(p, Ratio::new(1, 2)));
                let step = if rng.gen_bool(0.5) { 1 } else { rng.gen_range(1..p) };
                ResidueConstraint::single(PrimeModulus::new(p).unwrap(), ModProgression::new(rng.gen_range(0..p), step, width + 1))
            })
            .collect();
        let f = ConstraintFamily::new(n_max, Ratio::new(1, 4), lo, hi, cs).unwrap();
        applicable += assert_sound(&format!("seed {seed}"), &f) as u32;
    }
    assert!(applicable > 100, "only {applicable} applicable instances");
}

#[test]
fn sound_on_constructions() {
    let fams = [
        construct_interval_sharp(1_000_000, 1000, Ratio::new(1, 10)).unwrap().family,
        construct_interval_sharp(1_000_000, 1000, Ratio::new(2, 5)).unwrap().family,
        construct_half_power_counterexample(20_000, 10_000, 7, 1013, Ratio::new(1, 10)).unwrap().family,
        construct_flush_progression(400, Ratio::new(1, 10), 1).unwrap().family,
        construct_pell_counterexample(200_000, Ratio::new(1, 20)).unwrap().family,
        construct_kap_nonunion(2, 10_000, 20_000, Ratio::new(1, 10)).unwrap().family,
    ];
    for (i, f) in fams.iter().enumerate() {
        assert_sound(&format!("construction {i}"), f);
    }
}

#[test]
fn inapplicable_when_sizes_are_large() {
    let sizes: Vec<(u64, u64)> = primes_between(100, 200).into_iter().map(|p| (p, p / 2)).collect();
    assert_eq!(gallagher_bound(1_000_000, &sizes), GallagherBound::Inapplicable);
}
