//! Continuous water-filling: locating the active frequency set of a
//! water level and integrating the energy and capacity densities over it.

use crate::error::Result;
use crate::quadrature::{integrate, QuadratureOptions};
use crate::scalar::Real;
use crate::special_fn::{g_unchecked, planck_unchecked};
use crate::spectra::SpectralProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Density {
    /// Gauge-covariant and contravariant channels, `g(level) - g(floor)`.
    Entropy,
    /// Heterodyne output, `ln(level) - ln(N)`.
    Log,
}

#[derive(Clone, Copy)]
pub(crate) struct LevelProblem<'a, T> {
    pub profile: &'a SpectralProfile<T>,
    pub hbar: T,
    /// Use `|K|^2` from the profile; otherwise the gain is taken as 1.
    pub use_gain: bool,
    /// Add `|K|^2` to the noise floor (phase-conjugating channel).
    pub floor_adds_gain: bool,
    /// Bandpass model: level `1/(exp(theta/|K|^2) - 1)` and unit energy
    /// weight instead of `hbar w`.
    pub bandpass: bool,
    pub density: Density,
    /// `-1` evaluates the profile at `-w` (negative half-line).
    pub reflect: bool,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct RangeIntegrals<T> {
    pub energy: T,
    pub capacity: T,
    pub evaluations: usize,
    pub splits: Vec<T>,
    pub intervals: Vec<(T, T)>,
    /// Largest run of consecutive scan samples with zero noise inside the
    /// active set.
    pub zero_noise_run: usize,
    /// The active set reaches the right end of the range.
    pub open_right: bool,
}

impl<T: Real> LevelProblem<'_, T> {
    #[inline]
    fn at(&self, omega: T) -> T {
        if self.reflect {
            -omega
        } else {
            omega
        }
    }

    #[inline]
    fn gain2(&self, omega: T) -> T {
        let w = self.at(omega);
        if self.use_gain {
            let k = self.profile.k_abs(w);
            k * k
        } else if self.profile.contains(w) {
            T::one()
        } else {
            T::zero()
        }
    }

    #[inline]
    fn noise(&self, omega: T) -> T {
        self.profile.noise(self.at(omega))
    }

    /// Water level, floor and `|K|^2` at `omega`.
    #[inline]
    pub fn parts(&self, theta: T, omega: T) -> (T, T, T) {
        let g2 = self.gain2(omega);
        let n = self.noise(omega);
        let floor = if self.floor_adds_gain { n + g2 } else { n };
        if !(g2 > T::zero()) {
            return (T::zero(), floor, g2);
        }
        let arg = if self.bandpass {
            theta / g2
        } else {
            theta * self.hbar * omega.abs() / g2
        };
        let level = if arg > T::zero() {
            planck_unchecked(arg)
        } else {
            T::infinity()
        };
        (level, floor, g2)
    }

    #[inline]
    pub fn excess(&self, theta: T, omega: T) -> T {
        let (level, floor, _) = self.parts(theta, omega);
        level - floor
    }

    /// `weight * (level - floor)_+ / |K|^2 / 2pi`.
    #[inline]
    pub fn energy_density(&self, theta: T, omega: T) -> T {
        let (level, floor, g2) = self.parts(theta, omega);
        if !(level > floor) {
            return T::zero();
        }
        let weight = if self.bandpass {
            T::one()
        } else {
            self.hbar * omega.abs()
        };
        weight * (level - floor) / g2 / T::TAU()
    }

    #[inline]
    pub fn capacity_density(&self, theta: T, omega: T) -> T {
        let (level, floor, _) = self.parts(theta, omega);
        if !(level > floor) {
            return T::zero();
        }
        let d = match self.density {
            Density::Entropy => g_unchecked(level) - g_unchecked(floor),
            Density::Log => level.ln() - self.noise(omega).ln(),
        };
        d / T::TAU()
    }

    fn positive(&self, theta: T, omega: T) -> Option<bool> {
        let e = self.excess(theta, omega);
        if e.is_nan() {
            None
        } else {
            Some(e > T::zero())
        }
    }

    fn scan_points(&self, a: T, b: T, samples: usize) -> Vec<T> {
        let mut pts = Vec::with_capacity(samples + 80);
        let n = T::from_usize(samples).expect("sample count");
        for i in 0..=samples {
            pts.push(a + (b - a) * T::from_usize(i).expect("index") / n);
        }
        if a == T::zero() && b > T::zero() {
            // resolve structure close to the origin
            for j in 1..64 {
                let e = T::lit(-9.0 + 9.0 * j as f64 / 64.0);
                pts.push(b * T::lit(10.0).powf(e));
            }
        }
        for bp in self.profile.breakpoints() {
            let w = self.at(bp);
            if w > a && w < b {
                pts.push(w);
            }
        }
        pts.sort_by(|x, y| x.partial_cmp(y).expect("finite scan point"));
        pts.dedup();
        pts
    }

    fn crossing(&self, theta: T, mut lo: T, mut hi: T, lo_positive: bool) -> T {
        for _ in 0..200 {
            let mid = T::lit(0.5) * (lo + hi);
            if !(mid > lo && mid < hi) {
                break;
            }
            match self.positive(theta, mid) {
                Some(p) if p == lo_positive => lo = mid,
                Some(_) => hi = mid,
                None => lo = mid,
            }
        }
        T::lit(0.5) * (lo + hi)
    }

    /// Active set of the level `theta` on `[a, b]` (sample scan plus
    /// bisection on every sign change).
    pub fn active_set(&self, theta: T, a: T, b: T, samples: usize) -> (Vec<(T, T)>, Vec<T>, usize) {
        let pts = self.scan_points(a, b, samples);
        let mut signs: Vec<Option<bool>> = pts.iter().map(|&w| self.positive(theta, w)).collect();
        // endpoints where the level is undefined take their neighbour's sign
        for i in 1..signs.len() {
            if signs[i].is_none() {
                signs[i] = signs[i - 1];
            }
        }
        for i in (0..signs.len().saturating_sub(1)).rev() {
            if signs[i].is_none() {
                signs[i] = signs[i + 1];
            }
        }
        let signs: Vec<bool> = signs.into_iter().map(|s| s.unwrap_or(false)).collect();

        let mut intervals = Vec::new();
        let mut splits = Vec::new();
        let mut start = if signs[0] { Some(pts[0]) } else { None };
        let mut zero_run = 0;
        let mut worst_run = 0;
        for i in 0..pts.len() - 1 {
            if signs[i] && self.noise(pts[i]) == T::zero() {
                zero_run += 1;
                worst_run = worst_run.max(zero_run);
            } else {
                zero_run = 0;
            }
            if signs[i] != signs[i + 1] {
                let x = self.crossing(theta, pts[i], pts[i + 1], signs[i]);
                splits.push(x);
                if signs[i] {
                    intervals.push((start.take().expect("open interval"), x));
                } else {
                    start = Some(x);
                }
            }
        }
        if let Some(s) = start {
            intervals.push((s, pts[pts.len() - 1]));
        }
        (intervals, splits, worst_run)
    }

    /// Energy (and optionally capacity) integrals over the active set in
    /// `[a, b]`.
    pub fn integrate_range(
        &self,
        theta: T,
        a: T,
        b: T,
        samples: usize,
        with_capacity: bool,
        opts: &QuadratureOptions<T>,
    ) -> Result<RangeIntegrals<T>> {
        let (intervals, splits, zero_noise_run) = self.active_set(theta, a, b, samples);
        let mut out = RangeIntegrals {
            energy: T::zero(),
            capacity: T::zero(),
            evaluations: 0,
            splits,
            open_right: intervals.last().is_some_and(|&(_, hi)| hi >= b),
            intervals,
            zero_noise_run,
        };
        for &(lo, hi) in &out.intervals {
            let e = integrate(|w| self.energy_density(theta, w), lo, hi, opts)?;
            out.energy = out.energy + e.value;
            out.evaluations += e.evaluations;
            if with_capacity {
                let c = integrate(|w| self.capacity_density(theta, w), lo, hi, opts)?;
                out.capacity = out.capacity + c.value;
                out.evaluations += c.evaluations;
            }
        }
        Ok(out)
    }
}
