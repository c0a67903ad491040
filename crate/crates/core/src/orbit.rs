//! Exact orbit arithmetic for `x ↦ qx mod 1`.
//!
//! Double precision loses one base-`q` digit of an orbit point per step, so
//! after about 30 steps of `×3` nothing is left. Points here are either exact
//! rationals (orbits stay exact forever) or binary fractions with a fixed
//! number of bits, where multiplication by `q` mod 1 is exact wrapping integer
//! arithmetic. A binary fraction with `B` bits tracks the orbit of the real
//! number it approximates for roughly `(B − guard)/log₂ q` steps; that is the
//! precision budget.

use alloc::string::String;
use alloc::vec::Vec;
use core::str::FromStr;

use rand::RngCore;

use crate::error::{Error, Result};

/// Bits of a standard orbit point.
pub const FIXED_BITS: u32 = 128;
/// Bits held back from the budget so phases stay accurate to about `2^-32`.
pub const GUARD_BITS: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitPoint {
    /// `v / 2^128`.
    Fixed(u128),
    /// Big-endian 64-bit limbs of a binary fraction, most significant first.
    Wide(Vec<u64>),
    /// `num / den` with `0 ≤ num < den`.
    Rational { num: u64, den: u64 },
}

impl OrbitPoint {
    /// Exact binary expansion of `x mod 1` (`f64` carries at most 53 bits).
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::invalid("orbit seed must be finite"));
        }
        let f = x - libm::floor(x);
        let f = if f >= 1.0 { 0.0 } else { f };
        if f == 0.0 {
            return Ok(OrbitPoint::Fixed(0));
        }
        let bits = f.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i32;
        let (mant, e) = if exp == 0 {
            (bits & ((1 << 52) - 1), -1074)
        } else {
            ((bits & ((1 << 52) - 1)) | (1 << 52), exp - 1075)
        };
        // f = mant · 2^e, so v = mant · 2^(e + 128).
        let shift = e + 128;
        let v = if shift >= 0 {
            (mant as u128) << shift
        } else if shift > -64 {
            (mant as u128) >> (-shift)
        } else {
            0
        };
        Ok(OrbitPoint::Fixed(v))
    }

    pub fn rational(num: i128, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::invalid("rational orbit point with zero denominator"));
        }
        let r = num.rem_euclid(den as i128) as u64;
        let g = gcd(r, den);
        Ok(OrbitPoint::Rational {
            num: r / g,
            den: den / g,
        })
    }

    /// Uniform 128-bit binary fraction.
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let hi = rng.next_u64() as u128;
        let lo = rng.next_u64() as u128;
        OrbitPoint::Fixed((hi << 64) | lo)
    }

    /// Uniform binary fraction with at least `bits` bits (rounded up to whole
    /// limbs, never fewer than 128).
    pub fn random_wide<R: RngCore + ?Sized>(rng: &mut R, bits: u32) -> Self {
        let limbs = (bits.max(FIXED_BITS) as usize).div_ceil(64);
        if limbs == 2 {
            return Self::random(rng);
        }
        OrbitPoint::Wide((0..limbs).map(|_| rng.next_u64()).collect())
    }

    /// Bits needed for `steps` iterations of `×q` on frequencies up to
    /// `max_freq` within the guard.
    pub fn bits_for(steps: usize, q: u64, max_freq: u64) -> u32 {
        let need = steps as f64 * libm::log2(q as f64) + libm::log2(max_freq.max(1) as f64);
        libm::ceil(need) as u32 + GUARD_BITS
    }

    /// `None` when the representation is exact.
    pub fn precision_bits(&self) -> Option<u32> {
        match self {
            OrbitPoint::Fixed(_) => Some(FIXED_BITS),
            OrbitPoint::Wide(l) => Some(64 * l.len() as u32),
            OrbitPoint::Rational { .. } => None,
        }
    }

    /// Largest number of steps for which phases of frequencies up to
    /// `max_freq` remain reliable. `None` means unlimited.
    pub fn step_budget(&self, q: u64, max_freq: u64) -> Option<usize> {
        let bits = self.precision_bits()?;
        Some(step_budget_for_bits(bits, q, max_freq))
    }

    pub fn check_budget(&self, q: u64, max_freq: u64, steps: usize) -> Result<()> {
        match self.step_budget(q, max_freq) {
            Some(budget) if steps > budget => Err(Error::PrecisionBudget {
                steps,
                budget,
                q,
                max_freq,
                bits: self.precision_bits().unwrap_or(0),
            }),
            _ => Ok(()),
        }
    }

    /// One application of `x ↦ qx mod 1`.
    pub fn step(&mut self, q: u64) {
        match self {
            OrbitPoint::Fixed(v) => *v = v.wrapping_mul(q as u128),
            OrbitPoint::Wide(limbs) => {
                let mut carry: u128 = 0;
                for l in limbs.iter_mut().rev() {
                    let t = *l as u128 * q as u128 + carry;
                    *l = t as u64;
                    carry = t >> 64;
                }
            }
            OrbitPoint::Rational { num, den } => {
                *num = ((*num as u128 * q as u128) % *den as u128) as u64;
            }
        }
    }

    pub fn stepped(&self, q: u64) -> Self {
        let mut p = self.clone();
        p.step(q);
        p
    }

    /// `n·x mod 1` rounded to `f64`.
    pub fn phase(&self, n: i64) -> f64 {
        match self {
            OrbitPoint::Fixed(v) => fixed_to_f64(v.wrapping_mul(n as i128 as u128)),
            OrbitPoint::Wide(limbs) => {
                let top = ((limbs[0] as u128) << 64) | limbs[1] as u128;
                fixed_to_f64(top.wrapping_mul(n as i128 as u128))
            }
            OrbitPoint::Rational { num, den } => {
                let d = *den as u128;
                let k = (n as i128).rem_euclid(d as i128) as u128;
                let r = (k * *num as u128) % d;
                r as f64 / d as f64
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.phase(1)
    }

    /// Upper 128 bits of a binary point; `None` for rationals.
    pub fn fixed_bits(&self) -> Option<u128> {
        match self {
            OrbitPoint::Fixed(v) => Some(*v),
            OrbitPoint::Wide(l) => Some(((l[0] as u128) << 64) | l[1] as u128),
            OrbitPoint::Rational { .. } => None,
        }
    }
}

pub fn step_budget_for_bits(bits: u32, q: u64, max_freq: u64) -> usize {
    let usable = bits as f64 - GUARD_BITS as f64 - libm::log2(max_freq.max(1) as f64);
    if usable <= 0.0 {
        return 0;
    }
    libm::floor(usable / libm::log2(q as f64)) as usize
}

/// Budget of a standard 128-bit point.
pub fn fixed_step_budget(q: u64, max_freq: u64) -> usize {
    step_budget_for_bits(FIXED_BITS, q, max_freq)
}

fn fixed_to_f64(v: u128) -> f64 {
    (v >> 75) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

impl core::fmt::Display for OrbitPoint {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OrbitPoint::Rational { num, den } => write!(f, "{num}/{den}"),
            _ => write!(f, "{}", self.to_f64()),
        }
    }
}

/// Accepts `p/q` or a plain decimal such as `0.37` (read as the exact
/// rational `37/100`), reduced mod 1.
impl FromStr for OrbitPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::invalid(alloc::format!("cannot parse point {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: i128 = p.trim().parse().map_err(|_| bad())?;
            let q: u64 = q.trim().parse().map_err(|_| bad())?;
            return OrbitPoint::rational(p, q);
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let frac_part = frac_part.trim_end_matches('0');
        if frac_part.len() > 18 {
            return Err(Error::invalid(alloc::format!(
                "point {s:?} has more than 18 decimal digits; use p/q"
            )));
        }
        let den = 10u64.pow(frac_part.len() as u32);
        let digits: String = if frac_part.is_empty() { String::from("0") } else { String::from(frac_part) };
        let num: i128 = digits.parse().map_err(|_| bad())?;
        OrbitPoint::rational(if neg { -num } else { num }, den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn from_f64_is_exact() {
        let p = OrbitPoint::from_f64(0.375).unwrap();
        assert_eq!(p, OrbitPoint::Fixed(3u128 << 125));
        assert_eq!(OrbitPoint::from_f64(-0.25).unwrap().to_f64(), 0.75);
        assert_eq!(OrbitPoint::from_f64(2.0).unwrap(), OrbitPoint::Fixed(0));
    }

    #[test]
    fn parse_decimal_and_fraction() {
        assert_eq!("0.37".parse::<OrbitPoint>().unwrap(), OrbitPoint::Rational { num: 37, den: 100 });
        assert_eq!("0.125".parse::<OrbitPoint>().unwrap(), OrbitPoint::Rational { num: 1, den: 8 });
        assert_eq!("3/8".parse::<OrbitPoint>().unwrap(), OrbitPoint::Rational { num: 3, den: 8 });
        assert_eq!("-1/3".parse::<OrbitPoint>().unwrap(), OrbitPoint::Rational { num: 2, den: 3 });
        assert!("abc".parse::<OrbitPoint>().is_err());
        assert!("1/0".parse::<OrbitPoint>().is_err());
    }

    #[test]
    fn rational_orbit_is_periodic() {
        let mut p = OrbitPoint::rational(1, 8).unwrap();
        p.step(3);
        assert_eq!(p, OrbitPoint::Rational { num: 3, den: 8 });
        p.step(3);
        assert_eq!(p, OrbitPoint::Rational { num: 1, den: 8 });
    }

    #[test]
    fn fixed_and_wide_agree() {
        let v: u128 = 0x0123_4567_89ab_cdef_fedc_ba98_7654_3210;
        let mut a = OrbitPoint::Fixed(v);
        let mut b = OrbitPoint::Wide(vec![(v >> 64) as u64, v as u64, 0, 0]);
        for _ in 0..40 {
            a.step(3);
            b.step(3);
            assert_eq!(a.fixed_bits(), b.fixed_bits());
        }
    }

    #[test]
    fn budget_is_sixty_for_base_three() {
        assert_eq!(fixed_step_budget(3, 1), 60);
        let p = OrbitPoint::Fixed(1);
        assert!(p.check_budget(3, 1, 60).is_ok());
        assert!(matches!(p.check_budget(3, 1, 61), Err(Error::PrecisionBudget { budget: 60, .. })));
        assert!(OrbitPoint::rational(1, 8).unwrap().check_budget(3, 1, 10_000).is_ok());
    }

    #[test]
    fn phase_of_negative_frequency() {
        let p = OrbitPoint::from_f64(0.25).unwrap();
        assert_eq!(p.phase(-1), 0.75);
        let r = OrbitPoint::rational(1, 3).unwrap();
        assert!((r.phase(-1) - 2.0 / 3.0).abs() < 1e-16);
    }
}
