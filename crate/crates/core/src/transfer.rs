//! The map `Tx = qx mod 1`, its Perron–Frobenius operator and the
//! martingale-difference decomposition of a trigonometric polynomial.
//!
//! On Fourier coefficients the transfer operator is decimation:
//! `(Lⁿf)^(k) = f̂(qⁿk)`. The conditional expectation onto `T⁻ᵏℬ` keeps the
//! frequencies divisible by `qᵏ`, and `d_k = Eᵏf − E^{k+1}f` keeps those with
//! `q`-adic valuation exactly `k`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::torusfn::{Interval, TorusFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpandingMap {
    q: u64,
}

impl ExpandingMap {
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidBase(q));
        }
        Ok(ExpandingMap { q })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn apply(&self, x: f64) -> f64 {
        let y = self.q as f64 * x;
        y - libm::floor(y)
    }

    /// `qⁿ` if it fits in an `i64`.
    pub fn power(&self, n: usize) -> Option<i64> {
        (self.q as i64).checked_pow(u32::try_from(n).ok()?)
    }

    /// Largest `i` with `qⁱ ≤ max_freq`; `None` for the zero spectrum.
    pub fn max_level(&self, max_freq: u64) -> Option<usize> {
        if max_freq == 0 {
            return None;
        }
        let mut i = 0;
        let mut p: u64 = 1;
        while let Some(next) = p.checked_mul(self.q) {
            if next > max_freq {
                break;
            }
            p = next;
            i += 1;
        }
        Some(i)
    }

    /// `Lⁿf` by decimation.
    pub fn perron_frobenius(&self, f: &TorusFunction, n: usize) -> TorusFunction {
        match self.power(n) {
            Some(p) => f.reindex(|m| (m % p == 0).then(|| m / p)),
            None => TorusFunction::new([(0, f.mean())]),
        }
    }

    /// `Lⁿf(x) = q⁻ⁿ Σ_j f((x + j)/qⁿ)` evaluated directly from preimages.
    pub fn preimage_sum(&self, f: &TorusFunction, n: usize, x: f64) -> Result<Complex64> {
        let p = self
            .power(n)
            .filter(|&p| p <= 1 << 24)
            .ok_or_else(|| Error::invalid("too many preimages for a direct sum"))?;
        let pf = p as f64;
        let s: Complex64 = (0..p).map(|j| f.evaluate((x + j as f64) / pf)).sum();
        Ok(s / pf)
    }

    /// `Eᵏf = E(f | T⁻ᵏℬ)`: frequencies divisible by `qᵏ`.
    pub fn conditional_expectation(&self, f: &TorusFunction, k: usize) -> TorusFunction {
        match self.power(k) {
            Some(p) => f.filter(|m| m % p == 0),
            None => TorusFunction::new([(0, f.mean())]),
        }
    }

    /// `d_i(f) = Eⁱf − E^{i+1}f`.
    pub fn martingale_difference(&self, f: &TorusFunction, i: usize) -> TorusFunction {
        let lo = self.power(i);
        let hi = self.power(i + 1);
        f.filter(|m| {
            m != 0
                && lo.is_some_and(|p| m % p == 0)
                && hi.map_or(true, |p| m % p != 0)
        })
    }

    /// `d_0, …, d_{i_max}`; every later difference vanishes.
    pub fn decomposition(&self, f: &TorusFunction) -> Vec<TorusFunction> {
        match self.max_level(f.max_freq()) {
            Some(top) => (0..=top).map(|i| self.martingale_difference(f, i)).collect(),
            None => Vec::new(),
        }
    }

    pub fn hypothesis_check(&self, f: &TorusFunction) -> HypothesisReport {
        let deltas: Vec<Interval> = self
            .decomposition(f)
            .iter()
            .map(|d| d.sup_norm())
            .collect();
        let profile = MartingaleProfile::from_deltas(deltas);
        let wiener = f.wiener_norm();
        let h1 = f.mean() == Complex64::new(0.0, 0.0);
        let h2 = profile.delta_star.is_finite()
            && profile.delta_star <= wiener * (1.0 + 1e-12) + 1e-300;
        HypothesisReport {
            profile,
            h1,
            h2,
            wiener,
        }
    }

    /// `‖Lⁿf‖∞` for `n = 0..=n_max` with a fitted exponential rate.
    pub fn decay_profile(&self, f: &TorusFunction, n_max: usize) -> Result<DecayProfile> {
        if f.mean() != Complex64::new(0.0, 0.0) {
            return Err(Error::precondition("decay profile needs a mean-zero function"));
        }
        let iterates: Vec<TorusFunction> =
            (0..=n_max + 1).map(|n| self.perron_frobenius(f, n)).collect();
        let sup: Vec<Interval> = iterates[..=n_max].iter().map(|g| g.sup_norm()).collect();
        let increments: Vec<Interval> = iterates
            .windows(2)
            .map(|w| w[0].sub(&w[1]).sup_norm())
            .collect();
        let tail_exact = iterates[n_max].is_zero();
        let sum_sup: f64 = sup.iter().map(|s| s.hi).sum();
        let sum_increments: f64 = increments.iter().map(|s| s.hi).sum();
        Ok(DecayProfile {
            decay_rate: fit_rate(&sup),
            sum_sup,
            sum_increments,
            tail_exact,
            summable: tail_exact && sum_sup.is_finite(),
            weak_pair: tail_exact && sum_increments.is_finite(),
            sup,
        })
    }
}

/// Least-squares slope of `−log ‖Lⁿf‖∞` over the nonzero entries.
fn fit_rate(sup: &[Interval]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = sup
        .iter()
        .enumerate()
        .filter(|(_, s)| s.hi > 0.0)
        .map(|(n, s)| (n as f64, libm::log(s.hi)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(-sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleProfile {
    /// `Δ(i) = ‖d_i‖∞` as sup-norm intervals.
    pub deltas: Vec<Interval>,
    /// `Σ Δ(i)` over the upper ends.
    pub delta_star: f64,
    /// `Σ Δ(i)²` over the upper ends.
    pub sigma_sq: f64,
    /// `d_i ≡ 0` for every `i` at or beyond this index.
    pub truncation_index: usize,
}

impl MartingaleProfile {
    pub fn from_deltas(deltas: Vec<Interval>) -> Self {
        let delta_star = deltas.iter().map(|d| d.hi).sum();
        let sigma_sq = deltas.iter().map(|d| d.hi * d.hi).sum();
        MartingaleProfile {
            truncation_index: deltas.len(),
            deltas,
            delta_star,
            sigma_sq,
        }
    }

    pub fn upper(&self) -> Vec<f64> {
        self.deltas.iter().map(|d| d.hi).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub profile: MartingaleProfile,
    /// `f̂(0) = 0`, so `Eᵏf` vanishes once `qᵏ` exceeds the spectrum.
    pub h1: bool,
    /// `Δ* < ∞`, certified through `Δ* ≤ ‖f‖_A`.
    pub h2: bool,
    pub wiener: f64,
}

impl HypothesisReport {
    pub fn holds(&self) -> bool {
        self.h1 && self.h2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayProfile {
    pub sup: Vec<Interval>,
    /// Fitted `r` in `‖Lⁿf‖∞ ≈ C e^{−rn}`.
    pub decay_rate: Option<f64>,
    pub sum_sup: f64,
    pub sum_increments: f64,
    /// `Lⁿf ≡ 0` at the end of the profile, so the sums above are complete.
    pub tail_exact: bool,
    /// `Σ‖Lⁿf‖∞ < ∞`, certified.
    pub summable: bool,
    /// `‖Lⁿf‖∞ → 0` and `Σ‖Lⁿf − L^{n+1}f‖∞ < ∞`, certified.
    pub weak_pair: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn two_cosines() -> TorusFunction {
        TorusFunction::cos(1, 1.0).add(&TorusFunction::cos(9, 0.5))
    }

    fn three() -> ExpandingMap {
        ExpandingMap::new(3).unwrap()
    }

    #[test]
    fn base_must_expand() {
        assert_eq!(ExpandingMap::new(1), Err(Error::InvalidBase(1)));
        assert!(ExpandingMap::new(2).is_ok());
    }

    #[test]
    fn decimation_examples() {
        let t = three();
        assert!(t.perron_frobenius(&TorusFunction::exp(1), 1).is_zero());
        let f = two_cosines();
        assert_eq!(t.perron_frobenius(&f, 0), f.reindex(Some));
        let l2 = t.perron_frobenius(&f, 2);
        assert!(l2.coeff_distance(&TorusFunction::cos(1, 0.5)) < 1e-16);
    }

    #[test]
    fn conditional_expectation_examples() {
        let t = three();
        let f = two_cosines();
        assert!(t.conditional_expectation(&f, 1).coeff_distance(&TorusFunction::cos(9, 0.5)) < 1e-16);
        assert!(t.conditional_expectation(&f, 0).coeff_distance(&f) == 0.0);
        assert!(t.conditional_expectation(&TorusFunction::exp(1), 1).is_zero());
    }

    #[test]
    fn martingale_difference_examples() {
        let t = three();
        let f = two_cosines();
        assert!(t.martingale_difference(&f, 0).coeff_distance(&TorusFunction::cos(1, 1.0)) == 0.0);
        assert!(t.martingale_difference(&f, 1).is_zero());
        assert!(t.martingale_difference(&f, 2).coeff_distance(&TorusFunction::cos(9, 0.5)) == 0.0);
        assert!(t.martingale_difference(&f, 3).is_zero());
        assert!(t.decomposition(&TorusFunction::constant(2.0)).is_empty());
    }

    #[test]
    fn hypothesis_examples() {
        let t = three();
        let r = t.hypothesis_check(&TorusFunction::cos(1, 1.0));
        assert!(r.h1 && r.h2);
        assert_eq!((r.profile.delta_star, r.profile.sigma_sq), (1.0, 1.0));

        assert!(!t.hypothesis_check(&TorusFunction::constant(1.0)).h1);

        let r = t.hypothesis_check(&two_cosines());
        assert_eq!(r.profile.upper(), vec![1.0, 0.0, 0.5]);
        assert!((r.profile.delta_star - 1.5).abs() < 1e-15);
        assert!((r.profile.sigma_sq - 1.25).abs() < 1e-15);
        assert_eq!(r.profile.truncation_index, 3);
    }

    #[test]
    fn decay_of_dyadic_ladder() {
        let t = three();
        let f = TorusFunction::new((0..=6).flat_map(|j| {
            let c = Complex64::new(libm::pow(2.0, -(j as f64)), 0.0);
            let k = 3i64.pow(j);
            [(k, c), (-k, c)]
        }));
        let p = t.decay_profile(&f, 8).unwrap();
        for n in 0..=8 {
            let exact: f64 = (n..=6).map(|j| 2.0 * libm::pow(2.0, -(j as f64))).sum();
            assert!((p.sup[n].lo - exact).abs() < 1e-12, "n = {n}");
        }
        let r = p.decay_rate.unwrap();
        let ln2 = core::f64::consts::LN_2;
        assert!(r >= ln2 && r <= 1.25 * ln2, "rate {r}");
        assert!(p.summable && p.weak_pair);
    }

    #[test]
    fn unit_frequency_dies_immediately() {
        let p = three().decay_profile(&TorusFunction::exp(1), 3).unwrap();
        let his: Vec<f64> = p.sup.iter().map(|s| s.hi).collect();
        assert_eq!(his, vec![1.0, 0.0, 0.0, 0.0]);
        assert!(p.summable);
        assert!(three().decay_profile(&TorusFunction::constant(1.0), 3).is_err());
    }
}
