//! Kuhn–Tucker ("quantum water-filling") allocation of mean photon
//! numbers over independent gauge-covariant modes.
//!
//! For a Lagrange multiplier `theta`, mode `k` receives
//! `m_k = |K_k|^-2 (1/(exp(theta f_k) - 1) - N_k)_+` with
//! `f_k = hbar w_k / |K_k|^2`; `theta` is tuned so that the weighted energy
//! `sum_k weight * hbar w_k * m_k` matches the budget.

use crate::error::{CapacityError, Result};
use crate::scalar::Real;
use crate::spectra::{sample_profile, ModeGrid, SpectralProfile};
use crate::special_fn::{g_prime_unchecked, g_unchecked, planck_unchecked};

/// One independent mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec<T> {
    pub omega: T,
    pub k_abs: T,
    pub noise_n: T,
    pub hbar: T,
}

impl<T: Real> ModeSpec<T> {
    pub fn new(omega: T, k_abs: T, noise_n: T, hbar: T) -> Result<Self> {
        if !(omega.is_finite() && omega > T::zero()) {
            return Err(CapacityError::domain(format!("mode frequency must be positive, got {omega}")));
        }
        if !(k_abs.is_finite() && k_abs > T::zero()) {
            return Err(CapacityError::domain(format!("mode gain must be positive, got {k_abs}")));
        }
        if !(noise_n.is_finite() && noise_n >= T::zero()) {
            return Err(CapacityError::domain(format!("mode noise must be non-negative, got {noise_n}")));
        }
        if !(hbar.is_finite() && hbar > T::zero()) {
            return Err(CapacityError::domain(format!("hbar must be positive, got {hbar}")));
        }
        Ok(ModeSpec {
            omega,
            k_abs,
            noise_n,
            hbar,
        })
    }

    #[inline]
    pub fn gain2(&self) -> T {
        self.k_abs * self.k_abs
    }

    /// `hbar w / |K|^2`.
    #[inline]
    pub fn f(&self) -> T {
        self.hbar * self.omega / self.gain2()
    }

    /// Energy per photon, `hbar w`.
    #[inline]
    pub fn quantum(&self) -> T {
        self.hbar * self.omega
    }

    #[inline]
    fn level(&self, theta: T) -> T {
        planck_unchecked(theta * self.f())
    }

    #[inline]
    fn allocation(&self, theta: T) -> T {
        let level = self.level(theta);
        if level > self.noise_n {
            (level - self.noise_n) / self.gain2()
        } else {
            T::zero()
        }
    }
}

/// Result of [`waterfill_discrete`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaterfillSolution<T> {
    /// Lagrange multiplier; `+inf` for a zero budget.
    pub theta: T,
    pub allocations: Vec<T>,
    pub capacity: T,
    pub active: Vec<bool>,
    pub energy_used: T,
    pub weight: T,
}

impl<T: Real> WaterfillSolution<T> {
    /// `|K_k|^2 g'(|K_k|^2 m_k + N_k) - theta hbar w_k` per mode. Zero on
    /// active modes, non-positive on inactive ones.
    pub fn kt_residuals(&self, modes: &[ModeSpec<T>]) -> Vec<T> {
        modes
            .iter()
            .zip(&self.allocations)
            .map(|(m, &alloc)| {
                let out = m.gain2() * alloc + m.noise_n;
                let lhs = m.gain2() * g_prime_unchecked(out);
                if self.theta.is_infinite() {
                    return if lhs.is_infinite() { T::zero() } else { T::neg_infinity() };
                }
                lhs - self.theta * m.quantum()
            })
            .collect()
    }

    /// Largest KT violation, normalised per mode by `theta hbar w_k`:
    /// `|r_k|` on active modes and `max(r_k, 0)` on inactive ones.
    pub fn kt_violation(&self, modes: &[ModeSpec<T>]) -> T {
        self.kt_residuals(modes)
            .iter()
            .zip(modes)
            .zip(&self.active)
            .fold(T::zero(), |worst, ((&r, m), &active)| {
                let scale = if self.theta.is_finite() {
                    self.theta * m.quantum()
                } else {
                    T::one()
                };
                let v = if active { r.abs() } else { r.max(T::zero()) };
                worst.max(v / scale)
            })
    }
}

pub fn allocation_at_theta<T: Real>(modes: &[ModeSpec<T>], theta: T) -> Vec<T> {
    modes.iter().map(|m| m.allocation(theta)).collect()
}

pub fn total_energy<T: Real>(modes: &[ModeSpec<T>], theta: T, weight: T) -> T {
    modes
        .iter()
        .fold(T::zero(), |acc, m| acc + m.quantum() * m.allocation(theta))
        * weight
}

/// Default relative energy tolerance for [`solve_theta`].
pub fn default_tol<T: Real>() -> T {
    T::lit(1e-10).max(T::tol_floor())
}

/// Finds `theta` with `|total_energy(theta) - E| <= tol E` by bracketing
/// and bisection.
pub fn solve_theta<T: Real>(modes: &[ModeSpec<T>], energy: T, weight: T, tol: T) -> Result<T> {
    if modes.is_empty() {
        return Err(CapacityError::domain("need at least one mode"));
    }
    if !(energy.is_finite() && energy > T::zero()) {
        return Err(CapacityError::domain(format!("energy budget must be positive, got {energy}")));
    }
    if !(weight.is_finite() && weight > T::zero()) {
        return Err(CapacityError::domain(format!("mode weight must be positive, got {weight}")));
    }
    let tol = tol.max(T::tol_floor());
    bisect_theta(|theta| Ok(total_energy(modes, theta, weight)), energy, tol)
}

/// Shared bracketing/bisection on a map `theta -> energy` that is
/// continuous and strictly decreasing wherever it is positive.
pub(crate) fn bisect_theta<T: Real, F: FnMut(T) -> Result<T>>(mut energy_at: F, target: T, tol: T) -> Result<T> {
    let two = T::lit(2.0);
    let mut hi = T::one();
    let mut e_hi = energy_at(hi)?;
    let mut steps = 0;
    while e_hi >= target {
        hi = hi * two;
        e_hi = energy_at(hi)?;
        steps += 1;
        if steps > 4000 || hi.is_infinite() {
            return Err(CapacityError::Bracket(format!(
                "energy stays above {target} for theta up to {hi}"
            )));
        }
    }
    if (e_hi - target).abs() <= tol * target {
        return Ok(hi);
    }
    let mut lo = hi / two;
    let mut e_lo = energy_at(lo)?;
    steps = 0;
    while e_lo <= target {
        if (e_lo - target).abs() <= tol * target {
            return Ok(lo);
        }
        hi = lo;
        lo = lo / two;
        e_lo = energy_at(lo)?;
        steps += 1;
        if steps > 4000 || lo <= T::min_positive_value() || !e_lo.is_finite() {
            return Err(CapacityError::Bracket(format!(
                "energy {target} exceeds what is representable down to theta = {lo}"
            )));
        }
    }
    for _ in 0..400 {
        let mid = (lo * hi).sqrt();
        if !(mid > lo && mid < hi) {
            return Ok(mid);
        }
        let e_mid = energy_at(mid)?;
        if !e_mid.is_finite() {
            return Err(CapacityError::NonConvergence {
                message: format!("energy is not finite at theta = {mid}"),
                best: mid.to_f64_lossy(),
            });
        }
        if (e_mid - target).abs() <= tol * target {
            return Ok(mid);
        }
        if e_mid > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = (lo * hi).sqrt();
    Err(CapacityError::NonConvergence {
        message: "theta bisection exhausted its iteration budget".into(),
        best: mid.to_f64_lossy(),
    })
}

/// Optimal allocation, capacity and multiplier for a budget `energy`
/// (`energy = 0` gives the empty allocation).
pub fn waterfill_discrete<T: Real>(modes: &[ModeSpec<T>], energy: T, weight: T) -> Result<WaterfillSolution<T>> {
    waterfill_with_tol(modes, energy, weight, default_tol())
}

pub fn waterfill_with_tol<T: Real>(
    modes: &[ModeSpec<T>],
    energy: T,
    weight: T,
    tol: T,
) -> Result<WaterfillSolution<T>> {
    if energy == T::zero() {
        if modes.is_empty() {
            return Err(CapacityError::domain("need at least one mode"));
        }
        return Ok(WaterfillSolution {
            theta: T::infinity(),
            allocations: vec![T::zero(); modes.len()],
            capacity: T::zero(),
            active: vec![false; modes.len()],
            energy_used: T::zero(),
            weight,
        });
    }
    let theta = solve_theta(modes, energy, weight, tol)?;
    let allocations = allocation_at_theta(modes, theta);
    let active = allocations.iter().map(|&m| m > T::zero()).collect();
    let capacity = modes
        .iter()
        .zip(&allocations)
        .fold(T::zero(), |acc, (m, &alloc)| {
            acc + g_unchecked(m.gain2() * alloc + m.noise_n) - g_unchecked(m.noise_n)
        })
        * weight;
    let energy_used = modes
        .iter()
        .zip(&allocations)
        .fold(T::zero(), |acc, (m, &alloc)| acc + m.quantum() * alloc)
        * weight;
    Ok(WaterfillSolution {
        theta,
        allocations,
        capacity,
        active,
        energy_used,
        weight,
    })
}

/// Modes of a profile on a grid, with energy quantum `hbar w_k`.
pub fn modes_from_grid<T: Real>(profile: &SpectralProfile<T>, grid: &ModeGrid<T>, hbar: T) -> Result<Vec<ModeSpec<T>>> {
    sample_profile(profile, grid)?
        .into_iter()
        .map(|s| ModeSpec::new(s.omega, s.k_abs, s.noise, hbar))
        .collect()
}

/// Water-filling on the discretised family: weight `dw/2pi = 1/T` and
/// energy normalised per unit time. Returns the full solution; its
/// `capacity` is the rate `C_chi,T / T` in nats per second.
pub fn chi_rate_solution<T: Real>(
    profile: &SpectralProfile<T>,
    grid: &ModeGrid<T>,
    energy: T,
    hbar: T,
) -> Result<WaterfillSolution<T>> {
    let modes = modes_from_grid(profile, grid, hbar)?;
    waterfill_discrete(&modes, energy, grid.weight())
}

/// `C_chi,T / T` in nats per second.
pub fn chi_rate_t<T: Real>(profile: &SpectralProfile<T>, grid: &ModeGrid<T>, energy: T, hbar: T) -> Result<T> {
    Ok(chi_rate_solution(profile, grid, energy, hbar)?.capacity)
}
