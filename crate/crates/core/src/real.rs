//! Certified real enclosures with outward dyadic rounding.
//!
//! Every value is an interval `[lo, hi]` of exact rationals guaranteed to
//! contain the true real. Comparisons escalate precision until the two
//! enclosures separate, which is how hypothesis clauses such as
//! `16 log N <= y^eps` are decided without float drift.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Precision ladder, in bits after the binary point.
pub const PRECISION_LADDER: [u32; 6] = [64, 128, 256, 512, 1024, 2048];

#[derive(Clone, Debug, PartialEq)]
pub struct Real {
    lo: BigRational,
    hi: BigRational,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn round_down(x: &BigRational, bits: u32) -> BigRational {
    let scaled = x.numer() * pow2(bits);
    let q = scaled.div_floor(x.denom());
    BigRational::new(q, pow2(bits))
}

fn round_up(x: &BigRational, bits: u32) -> BigRational {
    let scaled = x.numer() * pow2(bits);
    let q = scaled.div_ceil(x.denom());
    BigRational::new(q, pow2(bits))
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `2^k`-scaled reduction: returns `k` with `x / 2^k in [1, 2)`.
fn log2_floor(x: &BigRational) -> i64 {
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let mut k = nb - db;
    let two = rat(2);
    let scale = |k: i64| {
        if k >= 0 {
            BigRational::from_integer(pow2(k as u32))
        } else {
            BigRational::new(BigInt::one(), pow2((-k) as u32))
        }
    };
    while x < &scale(k) {
        k -= 1;
    }
    while x >= &(scale(k) * &two) {
        k += 1;
    }
    k
}

fn fixed(v: BigInt, work: u32) -> BigRational {
    BigRational::new(v, pow2(work))
}

/// Enclosure of `atanh(t) = sum t^(2j+1)/(2j+1)` for exact `0 <= t <= 1/3`,
/// summed in fixed point with `2^-work` resolution.
fn atanh_small(t: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let work = bits + 16;
    let (a, b) = (t.numer().clone(), t.denom().clone());
    let (a2, b2) = (&a * &a, &b * &b);
    let scaled = &a << work as usize;
    let mut pow_lo = scaled.div_floor(&b);
    let mut pow_hi = scaled.div_ceil(&b);
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut j: i64 = 0;
    while pow_hi.is_positive() {
        let denom = BigInt::from(2 * j + 1);
        sum_lo += pow_lo.div_floor(&denom);
        sum_hi += pow_hi.div_ceil(&denom);
        pow_lo = (&pow_lo * &a2).div_floor(&b2);
        pow_hi = (&pow_hi * &a2).div_ceil(&b2);
        j += 1;
        if pow_hi <= BigInt::one() {
            // Remaining terms sum to at most pow * 9/8 < 2 units.
            sum_hi += BigInt::from(2);
            break;
        }
    }
    (fixed(sum_lo, work), fixed(sum_hi, work))
}

fn ln2_bounds(bits: u32) -> (BigRational, BigRational) {
    let (lo, hi) = atanh_small(&BigRational::new(BigInt::one(), BigInt::from(3)), bits);
    (lo * rat(2), hi * rat(2))
}

/// Enclosure of `ln x` for an exact positive rational.
fn ln_point(x: &BigRational, bits: u32) -> (BigRational, BigRational) {
    assert!(x.is_positive(), "ln of non-positive value");
    let k = log2_floor(x);
    let m = if k >= 0 {
        x / BigRational::from_integer(pow2(k as u32))
    } else {
        x * BigRational::from_integer(pow2((-k) as u32))
    };
    let one = BigRational::one();
    let t = (&m - &one) / (&m + &one);
    let (a_lo, a_hi) = atanh_small(&t, bits + 8);
    let (l2_lo, l2_hi) = ln2_bounds(bits + 8 + 64 - (k.unsigned_abs().leading_zeros().min(64)));
    let kq = rat(k);
    let (klo, khi) = if k >= 0 {
        (&kq * &l2_lo, &kq * &l2_hi)
    } else {
        (&kq * &l2_hi, &kq * &l2_lo)
    };
    (
        round_down(&(klo + a_lo * rat(2)), bits),
        round_up(&(khi + a_hi * rat(2)), bits),
    )
}

/// Enclosure of `exp(q)` for an exact rational `q`.
fn exp_point(q: &BigRational, bits: u32) -> (BigRational, BigRational) {
    if q.is_negative() {
        let (lo, hi) = exp_point(&-q, bits + 8);
        let one = BigRational::one();
        return (round_down(&(&one / &hi), bits), round_up(&(&one / &lo), bits));
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut k: u32 = 0;
    let mut u = q.clone();
    while u > half {
        u /= rat(2);
        k += 1;
    }
    let work = bits + 2 * k + 32;
    let (n, d) = (u.numer().clone(), u.denom().clone());
    let unit = pow2(work);
    let mut term_lo = unit.clone();
    let mut term_hi = unit.clone();
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut j: i64 = 0;
    loop {
        sum_lo += &term_lo;
        sum_hi += &term_hi;
        j += 1;
        let dj = &d * BigInt::from(j);
        term_lo = (&term_lo * &n).div_floor(&dj);
        term_hi = (&term_hi * &n).div_ceil(&dj);
        if term_hi <= BigInt::one() {
            break;
        }
    }
    // Tail ratio is at most u/(j+1) <= 1/4, so twice the next term bounds it.
    sum_hi += &term_hi * BigInt::from(2);
    for _ in 0..k {
        sum_lo = (&sum_lo * &sum_lo) >> work as usize;
        sum_hi = (&sum_hi * &sum_hi + &unit - BigInt::one()) >> work as usize;
    }
    (round_down(&fixed(sum_lo, work), bits), round_up(&fixed(sum_hi, work), bits))
}

impl Real {
    pub fn exact(x: BigRational) -> Self {
        Real { lo: x.clone(), hi: x }
    }

    pub fn int(n: i64) -> Self {
        Self::exact(rat(n))
    }

    pub fn uint(n: u64) -> Self {
        Self::exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn big(n: &BigUint) -> Self {
        Self::exact(BigRational::from_integer(BigInt::from(n.clone())))
    }

    pub fn ratio(r: Ratio<u64>) -> Self {
        Self::exact(BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())))
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn add(&self, o: &Real) -> Real {
        Real { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Real) -> Real {
        Real { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn mul(&self, o: &Real, bits: u32) -> Real {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap();
        let hi = c.iter().max().unwrap();
        Real { lo: round_down(lo, bits), hi: round_up(hi, bits) }
    }

    /// `None` when the divisor enclosure contains zero.
    pub fn div(&self, o: &Real, bits: u32) -> Option<Real> {
        if !o.lo.is_positive() && !o.hi.is_negative() {
            return None;
        }
        let inv = Real { lo: BigRational::one() / &o.hi, hi: BigRational::one() / &o.lo };
        Some(self.mul(&inv, bits))
    }

    /// Natural log; `None` unless the enclosure is strictly positive.
    pub fn ln(&self, bits: u32) -> Option<Real> {
        if !self.lo.is_positive() {
            return None;
        }
        let (lo, _) = ln_point(&self.lo, bits);
        let (_, hi) = ln_point(&self.hi, bits);
        Some(Real { lo, hi })
    }

    pub fn exp(&self, bits: u32) -> Real {
        let (lo, _) = exp_point(&self.lo, bits);
        let (_, hi) = exp_point(&self.hi, bits);
        Real { lo, hi }
    }

    /// `self^e` for a positive base enclosure and rational exponent.
    pub fn powr(&self, e: &Real, bits: u32) -> Option<Real> {
        let l = self.ln(bits + 16)?;
        Some(l.mul(e, bits + 16).exp(bits))
    }

    pub fn ln_uint(n: u64, bits: u32) -> Real {
        Real::uint(n).ln(bits).expect("ln of zero")
    }

    /// `n^e` for an exact exponent.
    pub fn uint_pow(n: u64, e: Ratio<u64>, bits: u32) -> Real {
        if e.is_zero() {
            return Real::int(1);
        }
        Real::uint(n).powr(&Real::ratio(e), bits).expect("zero base")
    }

    /// Sign-definite comparison when the enclosures are disjoint.
    pub fn try_cmp(&self, o: &Real) -> Option<Ordering> {
        if self.hi < o.lo {
            Some(Ordering::Less)
        } else if self.lo > o.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && o.lo == o.hi && self.lo == o.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Outward float bounds.
    pub fn f64_bounds(&self) -> (f64, f64) {
        let lo = self.lo.to_f64().unwrap_or(f64::NEG_INFINITY);
        let hi = self.hi.to_f64().unwrap_or(f64::INFINITY);
        (lo.next_down(), hi.next_up())
    }

    pub fn midpoint_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / rat(2)).to_f64().unwrap_or(f64::NAN)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

/// Result of a certified comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decided {
    Ordered(Ordering),
    /// Enclosures still overlap at the top of the precision ladder; the two
    /// sides are treated as equal.
    Undecided,
}

impl Decided {
    pub fn ordering(self) -> Ordering {
        match self {
            Decided::Ordered(o) => o,
            Decided::Undecided => Ordering::Equal,
        }
    }

    pub fn le(self) -> bool {
        self.ordering() != Ordering::Greater
    }

    pub fn lt(self) -> bool {
        self.ordering() == Ordering::Less
    }
}

/// Compares two real expressions, rebuilding them at increasing precision
/// until their enclosures separate.
pub fn decide<F>(mut build: F) -> Decided
where
    F: FnMut(u32) -> (Real, Real),
{
    for &bits in &PRECISION_LADDER {
        let (a, b) = build(bits);
        if let Some(o) = a.try_cmp(&b) {
            return Decided::Ordered(o);
        }
    }
    Decided::Undecided
}

/// Certified `floor` of a real expression.
pub fn certified_floor<F>(mut build: F) -> Option<BigInt>
where
    F: FnMut(u32) -> Real,
{
    for &bits in &PRECISION_LADDER {
        let r = build(bits);
        let lo = r.lo.floor().to_integer();
        let hi = r.hi.floor().to_integer();
        if lo == hi {
            return Some(lo);
        }
    }
    None
}

/// Encloses an expression at a fixed working precision (for reporting).
pub fn enclose<F>(build: F) -> Real
where
    F: FnOnce(u32) -> Real,
{
    build(PRECISION_LADDER[1])
}
