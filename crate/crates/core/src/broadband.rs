//! Continuous-frequency capacity of stationary bosonic channels, the
//! Planck closed forms, the finite-horizon convergence harness and the
//! error-probability bounds of the random-coding argument.

use serde::{Deserialize, Serialize};

use crate::error::{CapacityError, Result};
use crate::levels::{Density, LevelProblem};
use crate::quadrature::{integrate, Integral, QuadratureOptions};
use crate::scalar::Real;
use crate::spectra::{make_grid, CutoffSchedule, ModeGrid, SpectralProfile};
use crate::special_fn::{g_unchecked, planck_unchecked, variance_f_unchecked};
use crate::waterfill::{bisect_theta, chi_rate_solution, default_tol, modes_from_grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BroadbandModel {
    /// Attenuator, amplifier or additive classical noise.
    GaugeCovariant,
    /// Phase-conjugating amplifier; the noise floor is `N + |K|^2`.
    GaugeContravariant,
    /// Classical signal with quantum Gaussian noise (gain ignored).
    ClassicalQuantum,
    /// Heterodyne detection of the output (gain ignored).
    QuantumClassical,
}

impl BroadbandModel {
    pub fn name(self) -> &'static str {
        match self {
            BroadbandModel::GaugeCovariant => "gauge-covariant",
            BroadbandModel::GaugeContravariant => "gauge-contravariant",
            BroadbandModel::ClassicalQuantum => "classical-quantum",
            BroadbandModel::QuantumClassical => "quantum-classical",
        }
    }

    fn uses_gain(self) -> bool {
        matches!(
            self,
            BroadbandModel::GaugeCovariant | BroadbandModel::GaugeContravariant
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BroadbandOptions<T> {
    /// Relative tolerance on the energy constraint.
    pub tol: T,
    pub quadrature: QuadratureOptions<T>,
    /// Uniform samples used to locate the active frequency set.
    pub scan_samples: usize,
    /// The integration range ends at `tail_factor * kappa^2 / (theta hbar)`,
    /// where the water level has dropped below `exp(-tail_factor)`.
    pub tail_factor: T,
}

impl<T: Real> Default for BroadbandOptions<T> {
    fn default() -> Self {
        BroadbandOptions {
            tol: default_tol(),
            quadrature: QuadratureOptions::default(),
            scan_samples: 2048,
            tail_factor: T::lit(60.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureReport<T> {
    pub evaluations: usize,
    /// Frequencies where the water level crosses the noise floor.
    pub split_points: Vec<T>,
    pub active_intervals: Vec<(T, T)>,
    /// Largest frequency included in the integrals.
    pub omega_max: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityResult<T> {
    /// Nats per second.
    pub capacity: T,
    /// Lagrange multiplier of the energy constraint (`inf` for `E = 0`).
    pub theta: T,
    pub model: BroadbandModel,
    pub energy: T,
    pub hbar: T,
    /// `|E(theta) - E| / E`.
    pub energy_residual: T,
    /// `pi kappa^2 / (6 hbar theta)` for gauge-covariant results.
    pub bound: Option<T>,
    pub quadrature: QuadratureReport<T>,
}

impl<T: Real> CapacityResult<T> {
    pub(crate) fn empty(model: BroadbandModel, hbar: T) -> Self {
        CapacityResult {
            capacity: T::zero(),
            theta: T::infinity(),
            model,
            energy: T::zero(),
            hbar,
            energy_residual: T::zero(),
            bound: None,
            quadrature: QuadratureReport {
                evaluations: 0,
                split_points: Vec::new(),
                active_intervals: Vec::new(),
                omega_max: T::zero(),
            },
        }
    }
}

fn check_positive<T: Real>(x: T, what: &str) -> Result<T> {
    if x.is_finite() && x > T::zero() {
        Ok(x)
    } else {
        Err(CapacityError::domain(format!("{what} must be positive, got {x}")))
    }
}

pub(crate) fn check_energy<T: Real>(energy: T) -> Result<T> {
    if energy.is_finite() && energy >= T::zero() {
        Ok(energy)
    } else {
        Err(CapacityError::domain(format!(
            "energy budget must be non-negative, got {energy}"
        )))
    }
}

pub fn capacity_broadband<T: Real>(
    profile: &SpectralProfile<T>,
    energy: T,
    model: BroadbandModel,
    hbar: T,
) -> Result<CapacityResult<T>> {
    capacity_broadband_with(profile, energy, model, hbar, &BroadbandOptions::default())
}

pub fn capacity_broadband_with<T: Real>(
    profile: &SpectralProfile<T>,
    energy: T,
    model: BroadbandModel,
    hbar: T,
    opts: &BroadbandOptions<T>,
) -> Result<CapacityResult<T>> {
    let hbar = check_positive(hbar, "hbar")?;
    let energy = check_energy(energy)?;
    if energy == T::zero() {
        return Ok(CapacityResult::empty(model, hbar));
    }
    let problem = LevelProblem {
        profile,
        hbar,
        use_gain: model.uses_gain(),
        floor_adds_gain: model == BroadbandModel::GaugeContravariant,
        bandpass: false,
        density: if model == BroadbandModel::QuantumClassical {
            Density::Log
        } else {
            Density::Entropy
        },
        reflect: false,
    };
    let kappa2 = if model.uses_gain() {
        profile.kappa() * profile.kappa()
    } else {
        T::one()
    };
    let omega_max = |theta: T| opts.tail_factor * kappa2 / (theta * hbar);
    let lo = profile.support().0.max(T::zero());
    let samples = opts.scan_samples.max(16);

    let theta = bisect_theta(
        |theta| {
            let r = problem.integrate_range(theta, lo, omega_max(theta), samples, false, &opts.quadrature)?;
            Ok(r.energy)
        },
        energy,
        opts.tol.max(T::tol_floor()),
    )?;
    let w_max = omega_max(theta);

    if model == BroadbandModel::QuantumClassical {
        let (_, _, zero_run) = problem.active_set(theta, lo, w_max, samples);
        if zero_run >= 2 {
            return Err(CapacityError::Unbounded(
                "noise vanishes on a set of positive measure where the heterodyne level is active".into(),
            ));
        }
    }

    let r = problem.integrate_range(theta, lo, w_max, samples, true, &opts.quadrature)?;
    if r.open_right {
        // the capacity density must have decayed by the end of the range
        let tail = problem.capacity_density(theta, w_max) * w_max;
        if !(tail <= T::lit(1e-10) * r.capacity.abs().max(T::min_positive_value())) {
            return Err(CapacityError::Unbounded(format!(
                "capacity integrand does not decay: density {} at w = {w_max}",
                problem.capacity_density(theta, w_max)
            )));
        }
    }
    let bound = (model == BroadbandModel::GaugeCovariant)
        .then(|| T::PI() * kappa2 / (T::lit(6.0) * hbar * theta));
    Ok(CapacityResult {
        capacity: r.capacity.max(T::zero()),
        theta,
        model,
        energy,
        hbar,
        energy_residual: (r.energy - energy).abs() / energy,
        bound,
        quadrature: QuadratureReport {
            evaluations: r.evaluations,
            split_points: r.splits,
            active_intervals: r.intervals,
            omega_max: w_max,
        },
    })
}

/// `int_0^inf hbar w / (exp(theta hbar w) - 1) dw/2pi = pi / (12 hbar theta^2)`.
pub fn planck_power<T: Real>(theta: T, hbar: T) -> Result<T> {
    let theta = check_positive(theta, "theta")?;
    let hbar = check_positive(hbar, "hbar")?;
    Ok(T::PI() / (T::lit(12.0) * hbar * theta * theta))
}

/// `int_0^inf g(1/(exp(theta hbar w) - 1)) dw/2pi = pi / (6 hbar theta)`.
pub fn planck_entropy_rate<T: Real>(theta: T, hbar: T) -> Result<T> {
    let theta = check_positive(theta, "theta")?;
    let hbar = check_positive(hbar, "hbar")?;
    Ok(T::PI() / (T::lit(6.0) * hbar * theta))
}

fn planck_quadrature<T: Real, F: Fn(T) -> T>(theta: T, hbar: T, density: F) -> Result<Integral<T>> {
    let theta = check_positive(theta, "theta")?;
    let hbar = check_positive(hbar, "hbar")?;
    let scale = (theta * hbar).recip();
    let opts = QuadratureOptions::default().with_rel_tol(T::lit(1e-13));
    // the logarithmic endpoint behaviour of g is confined to the first piece
    let head = integrate(&density, T::zero(), scale, &opts)?;
    let body = integrate(&density, scale, T::lit(90.0) * scale, &opts)?;
    Ok(Integral {
        value: head.value + body.value,
        error: head.error + body.error,
        evaluations: head.evaluations + body.evaluations,
        intervals: head.intervals + body.intervals,
    })
}

/// Quadrature of the Planck power integral.
pub fn planck_power_numeric<T: Real>(theta: T, hbar: T) -> Result<Integral<T>> {
    planck_quadrature(theta, hbar, |w: T| {
        hbar * w * planck_unchecked(theta * hbar * w) / T::TAU()
    })
}

/// Quadrature of the Planck entropy integral.
pub fn planck_entropy_rate_numeric<T: Real>(theta: T, hbar: T) -> Result<Integral<T>> {
    planck_quadrature(theta, hbar, |w: T| {
        g_unchecked(planck_unchecked(theta * hbar * w)) / T::TAU()
    })
}

/// `pi kappa^2 / (6 hbar theta)`; fails if `result` exceeds it.
pub fn capacity_upper_bound<T: Real>(result: &CapacityResult<T>, kappa: T, hbar: T) -> Result<T> {
    if result.model != BroadbandModel::GaugeCovariant {
        return Err(CapacityError::domain(format!(
            "the upper bound applies to gauge-covariant results, not {}",
            result.model.name()
        )));
    }
    let kappa = check_positive(kappa, "kappa")?;
    let hbar = check_positive(hbar, "hbar")?;
    if result.theta.is_infinite() {
        return Ok(T::zero());
    }
    let bound = T::PI() * kappa * kappa / (T::lit(6.0) * hbar * result.theta);
    let slack = T::lit(1e-9) * bound + T::tol_floor();
    if result.capacity > bound + slack {
        return Err(CapacityError::Invariant(format!(
            "capacity {} exceeds the bound {bound}",
            result.capacity
        )));
    }
    Ok(bound)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow<T> {
    pub horizon: T,
    pub modes: usize,
    pub cutoff: T,
    /// `C_chi,T / T`, nats per second.
    pub rate: T,
    pub theta: T,
    /// `|rate - reference|` when a reference capacity is known.
    pub gap: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTrace<T> {
    pub rows: Vec<TraceRow<T>>,
    /// The rate at the largest horizon.
    pub limit_estimate: T,
    /// Continuous-frequency capacity of the same profile.
    pub reference: Option<T>,
}

impl<T: Real> ConvergenceTrace<T> {
    pub fn gaps(&self) -> Vec<T> {
        self.rows.iter().filter_map(|r| r.gap).collect()
    }
}

/// Rates of the discretised channel along increasing horizons, compared
/// against the gauge-covariant broadband capacity.
pub fn convergence_trace<T: Real>(
    profile: &SpectralProfile<T>,
    energy: T,
    hbar: T,
    schedule: &CutoffSchedule<T>,
    horizons: &[T],
) -> Result<ConvergenceTrace<T>> {
    let reference = capacity_broadband(profile, energy, BroadbandModel::GaugeCovariant, hbar)?.capacity;
    convergence_trace_against(profile, energy, hbar, schedule, horizons, Some(reference))
}

pub fn convergence_trace_against<T: Real>(
    profile: &SpectralProfile<T>,
    energy: T,
    hbar: T,
    schedule: &CutoffSchedule<T>,
    horizons: &[T],
    reference: Option<T>,
) -> Result<ConvergenceTrace<T>> {
    if horizons.is_empty() {
        return Err(CapacityError::domain("need at least one horizon T"));
    }
    if horizons.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(CapacityError::domain("horizons must be strictly increasing"));
    }
    let energy = check_energy(energy)?;
    let mut rows = Vec::with_capacity(horizons.len());
    for &t in horizons {
        let grid = make_grid(t, schedule)?;
        let sol = chi_rate_solution(profile, &grid, energy, hbar)?;
        rows.push(TraceRow {
            horizon: t,
            modes: grid.mode_count(),
            cutoff: grid.cutoff(),
            rate: sol.capacity,
            theta: sol.theta,
            gap: reference.map(|c| (sol.capacity - c).abs()),
        });
    }
    let limit_estimate = rows.last().expect("non-empty").rate;
    Ok(ConvergenceTrace {
        rows,
        limit_estimate,
        reference,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBounds<T> {
    /// `sum_k F(N'_k) / (delta T)^2` with the output occupations.
    pub cheb_output: T,
    /// `sum_k F(N_k) / (delta T)^2`.
    pub cheb_vacuum: T,
    pub random_coding: T,
    /// `C_chi,T` in nats (rate times horizon).
    pub chi_capacity: T,
    /// Natural log of the number of codewords.
    pub log_codewords: T,
}

/// Bounds on the average decoding error for a random code of
/// `exp(log_codewords)` words (default `exp(R T)`) on the grid's modes.
pub fn error_probability_bounds<T: Real>(
    profile: &SpectralProfile<T>,
    grid: &ModeGrid<T>,
    energy: T,
    hbar: T,
    rate: T,
    delta: T,
    log_codewords: Option<T>,
) -> Result<ErrorBounds<T>> {
    let delta = check_positive(delta, "delta")?;
    if !(rate.is_finite() && rate >= T::zero()) {
        return Err(CapacityError::domain(format!("rate must be non-negative, got {rate}")));
    }
    let t = grid.horizon();
    let log_n = log_codewords.unwrap_or(rate * t);
    if !(log_n.is_finite() && log_n >= T::zero()) {
        return Err(CapacityError::domain(format!(
            "log codeword count must be non-negative, got {log_n}"
        )));
    }
    let modes = modes_from_grid(profile, grid, hbar)?;
    let sol = chi_rate_solution(profile, grid, energy, hbar)?;
    let scale = (delta * t).powi(2);
    let (mut out, mut vac) = (T::zero(), T::zero());
    for (m, &alloc) in modes.iter().zip(&sol.allocations) {
        vac = vac + variance_f_unchecked(m.noise_n);
        out = out + variance_f_unchecked(m.noise_n + m.gain2() * alloc);
    }
    let cheb_output = out / scale;
    let cheb_vacuum = vac / scale;
    let chi_capacity = sol.capacity * t;
    // 9 (N - 1) exp(-(C - 2 delta T)) evaluated in log space
    let coding = if log_n == T::zero() {
        T::zero()
    } else {
        let log_nm1 = if log_n > T::lit(30.0) {
            log_n + (-(-log_n).exp()).ln_1p()
        } else {
            log_n.exp_m1().ln()
        };
        T::lit(9.0) * (log_nm1 - chi_capacity + T::lit(2.0) * delta * t).exp()
    };
    Ok(ErrorBounds {
        cheb_output,
        cheb_vacuum,
        random_coding: T::lit(9.0) * cheb_output + cheb_vacuum + coding,
        chi_capacity,
        log_codewords: log_n,
    })
}
