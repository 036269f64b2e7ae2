//! Bandpass model over all real frequencies (no `hbar w` weighting) and
//! the rectangular-allocation probes that certify infinite capacity when
//! the noise decays and the gain does not.

use serde::{Deserialize, Serialize};

use crate::broadband::{check_energy, BroadbandModel, BroadbandOptions, CapacityResult, QuadratureReport};
use crate::error::{CapacityError, Result};
use crate::levels::{Density, LevelProblem, RangeIntegrals};
use crate::quadrature::{integrate_panels, QuadratureOptions};
use crate::scalar::Real;
use crate::spectra::{Domain, SpectralProfile};
use crate::special_fn::{g_prime_unchecked, g_unchecked};
use crate::waterfill::bisect_theta;

#[derive(Debug, Clone)]
pub struct BandpassProblem<T: Real> {
    pub profile: SpectralProfile<T>,
    pub energy: T,
    /// Carrier frequency `Omega`; only the probes use it, through `hbar Omega`.
    pub carrier: T,
    pub hbar: T,
}

impl<T: Real> BandpassProblem<T> {
    pub fn new(profile: SpectralProfile<T>, energy: T, carrier: T, hbar: T) -> Result<Self> {
        let energy = check_energy(energy)?;
        for (x, what) in [(carrier, "carrier frequency"), (hbar, "hbar")] {
            if !(x.is_finite() && x > T::zero()) {
                return Err(CapacityError::domain(format!("{what} must be positive, got {x}")));
            }
        }
        Ok(BandpassProblem {
            profile: profile.with_domain(Domain::FullLine),
            energy,
            carrier,
            hbar,
        })
    }

    /// `hbar Omega`.
    pub fn photon_energy(&self) -> T {
        self.hbar * self.carrier
    }
}

/// Panels double in width; this many panels reach far beyond any
/// physically meaningful frequency.
const MAX_PANELS: usize = 160;

struct Side<'a, T> {
    problem: LevelProblem<'a, T>,
    /// Finite end of the support on this side, if any.
    end: Option<T>,
}

fn integrate_side<T: Real>(
    side: &Side<'_, T>,
    theta: T,
    samples: usize,
    with_capacity: bool,
    opts: &QuadratureOptions<T>,
) -> Result<(RangeIntegrals<T>, T)> {
    if let Some(end) = side.end {
        if end <= T::zero() {
            return Ok((RangeIntegrals::default(), T::zero()));
        }
        let r = side.problem.integrate_range(theta, T::zero(), end, samples, with_capacity, opts)?;
        return Ok((r, end));
    }
    let mut total = RangeIntegrals::default();
    let tiny = T::lit(1e-16);
    let (mut lo, mut width) = (T::zero(), T::one());
    let mut quiet = 0;
    for _ in 0..MAX_PANELS {
        let hi = lo + width;
        let r = side.problem.integrate_range(theta, lo, hi, samples, with_capacity, opts)?;
        total.energy = total.energy + r.energy;
        total.capacity = total.capacity + r.capacity;
        total.evaluations += r.evaluations;
        total.splits.extend(r.splits);
        total.zero_noise_run = total.zero_noise_run.max(r.zero_noise_run);
        // merge intervals that continue across the panel boundary
        for iv in r.intervals {
            match total.intervals.last_mut() {
                Some(last) if last.1 == iv.0 => last.1 = iv.1,
                _ => total.intervals.push(iv),
            }
        }
        let small = r.energy <= tiny * total.energy && r.capacity.abs() <= tiny * total.capacity.abs();
        let settled = total.energy > T::zero() && small && !r.open_right;
        quiet = if settled { quiet + 1 } else { 0 };
        lo = hi;
        if quiet >= 3 {
            return Ok((total, lo));
        }
        width = width + width;
    }
    Err(CapacityError::Unbounded(format!(
        "the energy integral keeps growing up to |w| = {lo} at theta = {theta}: the noise decays while the gain \
         does not, so no finite water level exists and the capacity is infinite (see the rectangle probes)"
    )))
}

/// Capacity `int (g(Nbar_theta) - g(N))_+ dw/2pi` over the real line with
/// `Nbar_theta = 1/(exp(theta/|K|^2) - 1)` and energy
/// `int |K|^-2 (Nbar_theta - N)_+ dw/2pi = E`.
pub fn capacity_bandpass<T: Real>(p: &BandpassProblem<T>) -> Result<CapacityResult<T>> {
    capacity_bandpass_with(p, &BroadbandOptions::default())
}

pub fn capacity_bandpass_with<T: Real>(
    p: &BandpassProblem<T>,
    opts: &BroadbandOptions<T>,
) -> Result<CapacityResult<T>> {
    if p.energy == T::zero() {
        return Ok(CapacityResult::empty(BroadbandModel::GaugeCovariant, p.hbar));
    }
    let base = LevelProblem {
        profile: &p.profile,
        hbar: p.hbar,
        use_gain: true,
        floor_adds_gain: false,
        bandpass: true,
        density: Density::Entropy,
        reflect: false,
    };
    let (lo, hi) = p.profile.support();
    let finite = |x: T| x.is_finite().then_some(x);
    let mut sides = vec![(
        Side {
            problem: base,
            end: finite(hi),
        },
        T::one(),
    )];
    if p.profile.is_even() {
        sides[0].1 = T::lit(2.0);
    } else {
        sides.push((
            Side {
                problem: LevelProblem { reflect: true, ..base },
                end: finite(-lo),
            },
            T::one(),
        ));
    }
    let samples = opts.scan_samples.max(16);
    let q = &opts.quadrature;
    let theta = bisect_theta(
        |theta| {
            let mut e = T::zero();
            for (side, mult) in &sides {
                e = e + *mult * integrate_side(side, theta, samples, false, q)?.0.energy;
            }
            Ok(e)
        },
        p.energy,
        opts.tol.max(T::tol_floor()),
    )?;
    let (mut energy, mut capacity) = (T::zero(), T::zero());
    let mut report = QuadratureReport {
        evaluations: 0,
        split_points: Vec::new(),
        active_intervals: Vec::new(),
        omega_max: T::zero(),
    };
    for (side, mult) in &sides {
        let (r, reach) = integrate_side(side, theta, samples, true, q)?;
        energy = energy + *mult * r.energy;
        capacity = capacity + *mult * r.capacity;
        report.evaluations += r.evaluations;
        report.omega_max = report.omega_max.max(reach);
        let sign = if side.problem.reflect { -T::one() } else { T::one() };
        report.split_points.extend(r.splits.iter().map(|&w| sign * w));
        report
            .active_intervals
            .extend(r.intervals.iter().map(|&(a, b)| if side.problem.reflect { (-b, -a) } else { (a, b) }));
        if *mult > T::one() {
            report.split_points.extend(r.splits.iter().map(|&w| -w));
            report.active_intervals.extend(r.intervals.iter().map(|&(a, b)| (-b, -a)));
        }
    }
    report.split_points.sort_by(|a, b| a.partial_cmp(b).expect("finite split"));
    report.active_intervals.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite interval"));
    Ok(CapacityResult {
        capacity: capacity.max(T::zero()),
        theta,
        model: BroadbandModel::GaugeCovariant,
        energy: p.energy,
        hbar: p.hbar,
        energy_residual: (energy - p.energy).abs() / p.energy,
        bound: None,
        quadrature: report,
    })
}

/// Rectangle of a probe: either its width `w2 - w1` or its height `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeBand<T> {
    Width(T),
    Height(T),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeResult<T> {
    pub omega1: T,
    pub band: T,
    /// Photon number (quantum) or power density (classical) on the band.
    pub m: T,
    pub lower_bound: T,
    /// Capacity of the rectangular allocation, by quadrature. `None` when
    /// it is infinite (classical probe with vanishing noise).
    pub exact_rectangle_capacity: Option<T>,
}

fn check_probe_args<T: Real>(energy: T, omega1: T) -> Result<()> {
    if !(energy.is_finite() && energy > T::zero()) {
        return Err(CapacityError::domain(format!("probe energy must be positive, got {energy}")));
    }
    if !omega1.is_finite() {
        return Err(CapacityError::domain("probe start frequency must be finite"));
    }
    Ok(())
}

/// Resolves the rectangle: returns `(band, M)` with `M = scale / band`.
fn resolve_band<T: Real>(band: ProbeBand<T>, scale: T) -> Result<(T, T)> {
    let (b, m) = match band {
        ProbeBand::Width(w) => (w, scale / w),
        ProbeBand::Height(m) => (scale / m, m),
    };
    if !(b.is_finite() && b > T::zero() && m.is_finite() && m > T::zero()) {
        return Err(CapacityError::domain(format!(
            "probe rectangle must have positive finite width and height, got width {b}, height {m}"
        )));
    }
    Ok((b, m))
}

/// Checks that `N` does not increase on `[a, b]` (sampled on a mixed
/// linear/geometric grid).
fn check_decreasing<T: Real, N: Fn(T) -> T>(noise: &N, a: T, b: T) -> Result<()> {
    let mut pts: Vec<T> = (0..=256)
        .map(|i| a + (b - a) * T::lit(i as f64 / 256.0))
        .collect();
    let span = b - a;
    for j in 0..=128 {
        pts.push(a + span * T::lit(10.0).powf(T::lit(-12.0 + 12.0 * j as f64 / 128.0)));
    }
    pts.sort_by(|x, y| x.partial_cmp(y).expect("finite probe point"));
    let mut prev = noise(pts[0]);
    for &w in &pts[1..] {
        let n = noise(w);
        if !(n >= T::zero()) {
            return Err(CapacityError::domain(format!("noise must be non-negative, got {n} at w = {w}")));
        }
        if n > prev * (T::one() + T::lit(1e-12)) {
            return Err(CapacityError::domain(format!(
                "noise must be non-increasing on the probed band, but N({w}) = {n} > {prev}"
            )));
        }
        prev = n;
    }
    Ok(())
}

fn rectangle_integral<T: Real, F: FnMut(T) -> T>(f: F, a: T, band: T) -> Result<T> {
    let opts = QuadratureOptions::default().with_rel_tol(T::lit(1e-10));
    let w0 = band.min(T::one());
    let r = integrate_panels(f, a, Some(a + band), w0, T::zero(), 4096, &opts)?;
    Ok(r.value)
}

/// Quantum probe: photon density `M = 2 pi E / (hbar Omega band)` on
/// `[w1, w1 + band]`, lower bound `-(E / hbar Omega) ln(N(w1) + M)`.
pub fn infinite_capacity_probe_quantum<T: Real, N: Fn(T) -> T>(
    noise: N,
    energy: T,
    photon_energy: T,
    omega1: T,
    band: ProbeBand<T>,
) -> Result<ProbeResult<T>> {
    check_probe_args(energy, omega1)?;
    if !(photon_energy.is_finite() && photon_energy > T::zero()) {
        return Err(CapacityError::domain(format!("hbar Omega must be positive, got {photon_energy}")));
    }
    let (width, m) = resolve_band(band, T::TAU() * energy / photon_energy)?;
    check_decreasing(&noise, omega1, omega1 + width)?;
    let lower_bound = -(energy / photon_energy) * (noise(omega1) + m).ln();
    let exact = rectangle_integral(
        |w| {
            let n = noise(w);
            (g_unchecked(n + m) - g_unchecked(n)) / T::TAU()
        },
        omega1,
        width,
    )?;
    certify(exact, lower_bound)?;
    Ok(ProbeResult {
        omega1,
        band: width,
        m,
        lower_bound,
        exact_rectangle_capacity: Some(exact),
    })
}

/// Classical probe: power density `M = 2 pi E / band`, lower bound
/// `E / (2 (N(w1) + M))`.
pub fn infinite_capacity_probe_classical<T: Real, N: Fn(T) -> T>(
    noise: N,
    energy: T,
    omega1: T,
    band: ProbeBand<T>,
) -> Result<ProbeResult<T>> {
    check_probe_args(energy, omega1)?;
    let (width, m) = resolve_band(band, T::TAU() * energy)?;
    check_decreasing(&noise, omega1, omega1 + width)?;
    let half = T::lit(0.5);
    let lower_bound = half * energy / (noise(omega1) + m);
    let exact = if noise(omega1 + width) > T::zero() {
        let v = rectangle_integral(|w| half * (m / noise(w)).ln_1p() / T::TAU(), omega1, width)?;
        certify(v, lower_bound)?;
        Some(v)
    } else {
        None
    };
    Ok(ProbeResult {
        omega1,
        band: width,
        m,
        lower_bound,
        exact_rectangle_capacity: exact,
    })
}

fn certify<T: Real>(exact: T, bound: T) -> Result<()> {
    let slack = T::lit(1e-9) * bound.abs().max(T::one());
    if exact + slack < bound {
        return Err(CapacityError::Invariant(format!(
            "rectangle capacity {exact} fell below its lower bound {bound}"
        )));
    }
    Ok(())
}

/// A sequence of probes with increasing lower bounds: the constructive
/// certificate that the capacity is unbounded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceCertificate<T> {
    pub probes: Vec<ProbeResult<T>>,
    pub strictly_increasing: bool,
    /// Whether the last bound exceeds the caller's threshold.
    pub exceeds_threshold: bool,
}

pub fn divergence_certificate<T: Real>(probes: Vec<ProbeResult<T>>, threshold: T) -> DivergenceCertificate<T> {
    let strictly_increasing = probes.windows(2).all(|w| w[1].lower_bound > w[0].lower_bound);
    let exceeds_threshold = probes.last().is_some_and(|p| p.lower_bound > threshold);
    DivergenceCertificate {
        probes,
        strictly_increasing,
        exceeds_threshold,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConcaveFn {
    G,
    Log,
}

/// `phi(x + y) - phi(x) - phi'(x + y) y`; non-negative for concave `phi`.
pub fn concavity_gap<T: Real>(phi: ConcaveFn, x: T, y: T) -> T {
    let s = x + y;
    match phi {
        ConcaveFn::G => g_unchecked(s) - g_unchecked(x) - g_prime_unchecked(s) * y,
        ConcaveFn::Log => s.ln() - x.ln() - y / s,
    }
}

/// Checks `phi(x + y) - phi(x) >= phi'(x + y) y` with a `1e-12` slack.
/// Inputs outside the domain (`x, y < 0`, or `x = 0` for the logarithm)
/// return `false`.
pub fn concavity_lower_bound_check<T: Real>(phi: ConcaveFn, x: T, y: T) -> bool {
    if !(x >= T::zero() && y >= T::zero()) || (phi == ConcaveFn::Log && x == T::zero()) {
        return false;
    }
    if phi == ConcaveFn::G && x + y == T::zero() {
        return true;
    }
    let gap = concavity_gap(phi, x, y);
    gap >= -T::lit(1e-12) * (T::one() + y)
}
