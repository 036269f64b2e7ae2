//! Symplectic spectra of noise covariance forms: Williamson eigenvalues of
//! finite covariance matrices, the Nyström spectrum of a stationary
//! Hermitian kernel on `[0, T]`, and the two representations of the vacuum
//! inner product of test functions.
//!
//! Everything here uses the `hbar = 2` convention, in which the vacuum has
//! symplectic eigenvalue `1/2`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CapacityError, Result};
use crate::quadrature::{integrate, integrate_panels, QuadratureOptions};
use crate::spectra::{Domain, SpectralProfile};

/// Symplectic eigenvalue of the vacuum.
pub const VACUUM_FLOOR: f64 = 0.5;

/// Ordering of the canonical coordinates; fixes the standard `Delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    /// `(x1, p1, x2, p2, ...)`, `Delta = diag([[0, 1], [-1, 0]], ...)`.
    Xpxp,
    /// `(x1, ..., xn, p1, ..., pn)`, `Delta = [[0, I], [-I, 0]]`.
    Xxpp,
}

pub fn standard_form(modes: usize, ordering: Ordering) -> DMatrix<f64> {
    let n2 = 2 * modes;
    let mut d = DMatrix::zeros(n2, n2);
    for k in 0..modes {
        let (x, p) = match ordering {
            Ordering::Xpxp => (2 * k, 2 * k + 1),
            Ordering::Xxpp => (k, modes + k),
        };
        d[(x, p)] = 1.0;
        d[(p, x)] = -1.0;
    }
    d
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceForm {
    alpha: DMatrix<f64>,
    delta: DMatrix<f64>,
    delta_inv: DMatrix<f64>,
}

impl CovarianceForm {
    pub fn new(alpha: DMatrix<f64>, delta: DMatrix<f64>) -> Result<Self> {
        let n = alpha.nrows();
        if n == 0 || !n.is_multiple_of(2) || !alpha.is_square() || delta.shape() != (n, n) {
            return Err(CapacityError::domain(
                "alpha and delta must be square matrices of the same even size",
            ));
        }
        if alpha.iter().any(|v| !v.is_finite()) || delta.iter().any(|v| !v.is_finite()) {
            return Err(CapacityError::domain("covariance entries must be finite"));
        }
        let scale = alpha.norm().max(1.0);
        if (&alpha - alpha.transpose()).norm() > 1e-10 * scale {
            return Err(CapacityError::domain("alpha must be symmetric"));
        }
        if (&delta + delta.transpose()).norm() > 1e-12 * delta.norm().max(1.0) {
            return Err(CapacityError::domain("delta must be antisymmetric"));
        }
        let delta_inv = delta
            .clone()
            .try_inverse()
            .filter(|inv| inv.iter().all(|v| v.is_finite()))
            .ok_or_else(|| CapacityError::domain("delta is degenerate"))?;
        let cond = delta.norm() * delta_inv.norm();
        if cond > 1e12 {
            return Err(CapacityError::domain(format!("delta is numerically degenerate (condition {cond:.3e})")));
        }
        let alpha = (&alpha + alpha.transpose()) * 0.5;
        Ok(CovarianceForm {
            alpha,
            delta,
            delta_inv,
        })
    }

    pub fn standard(alpha: DMatrix<f64>, ordering: Ordering) -> Result<Self> {
        let modes = alpha.nrows() / 2;
        Self::new(alpha, standard_form(modes, ordering))
    }

    pub fn alpha(&self) -> &DMatrix<f64> {
        &self.alpha
    }

    pub fn delta(&self) -> &DMatrix<f64> {
        &self.delta
    }

    pub fn modes(&self) -> usize {
        self.alpha.nrows() / 2
    }

    /// Whether `alpha + (i/2) delta` is positive semidefinite.
    pub fn satisfies_state_condition(&self) -> bool {
        let n = self.alpha.nrows();
        let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(self.alpha[(i, j)], 0.5 * self.delta[(i, j)]));
        let min = m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        min >= -1e-10 * self.alpha.norm().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumSource {
    Matrix,
    Kernel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymplecticSpectrum {
    /// Descending.
    pub lambdas: Vec<f64>,
    pub source: SpectrumSource,
    pub floor: f64,
    /// `false` when the covariance violates the uncertainty relation; the
    /// spectrum is still reported.
    pub state_condition: bool,
}

impl SymplecticSpectrum {
    /// Number of eigenvalues within `rel` of `target`.
    pub fn count_near(&self, target: f64, rel: f64) -> usize {
        self.lambdas
            .iter()
            .filter(|&&l| (l - target).abs() <= rel * target.abs())
            .count()
    }
}

fn sort_desc(v: &mut [f64]) {
    v.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalue"));
}

/// Symplectic eigenvalues `lambda` of `[alpha - i lambda delta] f = 0`:
/// the moduli of the eigenvalues of `delta^-1 alpha`, one per `+-i lambda`
/// pair.
pub fn williamson_eigenvalues(cov: &CovarianceForm) -> Result<SymplecticSpectrum> {
    let n = cov.modes();
    let state_condition = cov.satisfies_state_condition();
    let sym = cov.alpha.clone().symmetric_eigen();
    let min_alpha = sym.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let mut lambdas: Vec<f64> = if min_alpha > 1e-12 * cov.alpha.norm() {
        // i alpha^1/2 delta^-1 alpha^1/2 is Hermitian and similar to
        // i delta^-1 alpha; its eigenvalues are +-lambda.
        let root = {
            let mut v = sym.eigenvectors.clone();
            for (j, &e) in sym.eigenvalues.iter().enumerate() {
                v.column_mut(j).scale_mut(e.sqrt());
            }
            v * sym.eigenvectors.transpose()
        };
        let a = &root * &cov.delta_inv * &root;
        let h = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            Complex64::new(0.0, 0.5 * (a[(i, j)] - a[(j, i)]))
        });
        let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        sort_desc(&mut vals);
        vals.truncate(n);
        vals
    } else {
        // singular alpha: fall back to the general eigensolver
        let m = &cov.delta_inv * &cov.alpha;
        let mut mods: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
        sort_desc(&mut mods);
        mods.into_iter().step_by(2).collect()
    };
    for l in &mut lambdas {
        *l = l.abs();
    }
    sort_desc(&mut lambdas);
    Ok(SymplecticSpectrum {
        lambdas,
        source: SpectrumSource::Matrix,
        floor: VACUUM_FLOOR,
        state_condition,
    })
}

/// Stationary kernel `beta(t - s)` sampled on the uniform grid
/// `t_i = i T/(n-1)`, `i = 0..n-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryKernel {
    horizon: f64,
    n: usize,
    /// `beta(j h)` for `j = -(n-1) ..= n-1`.
    lags: Vec<Complex64>,
}

const MIN_GRID: usize = 8;

impl StationaryKernel {
    fn check_grid(horizon: f64, n: usize) -> Result<f64> {
        if n < MIN_GRID {
            return Err(CapacityError::Kernel(format!("grid size must be at least {MIN_GRID}, got {n}")));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(CapacityError::Kernel(format!("horizon must be positive, got {horizon}")));
        }
        Ok(horizon / (n - 1) as f64)
    }

    /// Kernel from a function of the lag.
    pub fn from_fn<F: Fn(f64) -> Complex64>(beta: F, horizon: f64, n: usize) -> Result<Self> {
        let h = Self::check_grid(horizon, n)?;
        let m = n as i64 - 1;
        let lags = (-m..=m).map(|j| beta(j as f64 * h)).collect();
        Self::from_lags(lags, horizon, n)
    }

    /// Kernel from its lag samples `beta(j h)`, `j = -(n-1) ..= n-1`.
    pub fn from_lags(lags: Vec<Complex64>, horizon: f64, n: usize) -> Result<Self> {
        Self::check_grid(horizon, n)?;
        if lags.len() != 2 * n - 1 {
            return Err(CapacityError::Kernel(format!(
                "expected {} lag samples, got {}",
                2 * n - 1,
                lags.len()
            )));
        }
        if lags.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(CapacityError::Kernel("kernel values must be finite".into()));
        }
        let k = StationaryKernel { horizon, n, lags };
        k.check_hermitian()?;
        Ok(k)
    }

    /// Flat spectrum `N0` on `|w| <= W`: `beta(tau) = N0 sin(W tau)/(pi tau)`.
    pub fn flat_band(n0: f64, bandwidth: f64, horizon: f64, n: usize) -> Result<Self> {
        if !(n0.is_finite() && n0 >= 0.0 && bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(CapacityError::Kernel("flat band needs N0 >= 0 and W > 0".into()));
        }
        Self::from_fn(
            |tau| {
                let v = if tau == 0.0 {
                    n0 * bandwidth / std::f64::consts::PI
                } else {
                    n0 * (bandwidth * tau).sin() / (std::f64::consts::PI * tau)
                };
                Complex64::new(v, 0.0)
            },
            horizon,
            n,
        )
    }

    /// `beta(tau) = int e^{i w tau} N(w) dw/2pi` for the noise spectrum of
    /// `profile`, read on the whole real line.
    pub fn from_profile(profile: &SpectralProfile<f64>, horizon: f64, n: usize) -> Result<Self> {
        let h = Self::check_grid(horizon, n)?;
        let profile = profile.clone().with_domain(Domain::FullLine);
        let (lo, hi) = profile.support();
        let opts = QuadratureOptions::default().with_rel_tol(1e-11);
        let noise = |w: f64| profile.noise(w);
        let (lo, hi) = if lo.is_finite() && hi.is_finite() {
            (lo, hi)
        } else {
            // truncate where the remaining spectral mass is negligible
            let reach = |sign: f64| -> Result<f64> {
                let p = integrate_panels(|w| noise(sign * w), 0.0, None, 1.0, 1e-14, 200, &opts)?;
                if !p.converged {
                    return Err(CapacityError::Kernel(
                        "noise spectrum is not integrable; the kernel is not a function".into(),
                    ));
                }
                Ok(p.reached)
            };
            let l = if lo.is_finite() { lo } else { -reach(-1.0)? };
            let r = if hi.is_finite() { hi } else { reach(1.0)? };
            (l, r)
        };
        let mut cuts: Vec<f64> = profile
            .breakpoints()
            .into_iter()
            .filter(|&w| w > lo && w < hi)
            .collect();
        cuts.insert(0, lo);
        cuts.push(hi);
        let tau_max = horizon;
        // pieces short enough that cos/sin(w tau) oscillate a bounded number of times
        let piece = (std::f64::consts::PI / tau_max.max(1e-300)) * 8.0;
        let mut nodes = Vec::new();
        for w in cuts.windows(2) {
            let parts = (((w[1] - w[0]) / piece).ceil() as usize).clamp(1, 100_000);
            for k in 0..parts {
                nodes.push((
                    w[0] + (w[1] - w[0]) * k as f64 / parts as f64,
                    w[0] + (w[1] - w[0]) * (k + 1) as f64 / parts as f64,
                ));
            }
        }
        let tau2pi = std::f64::consts::TAU;
        let mut positive = Vec::with_capacity(n);
        for j in 0..n {
            let tau = j as f64 * h;
            let (mut re, mut im) = (0.0, 0.0);
            for &(a, b) in &nodes {
                re += integrate(|w| noise(w) * (w * tau).cos(), a, b, &opts)?.value;
                if j > 0 {
                    im += integrate(|w| noise(w) * (w * tau).sin(), a, b, &opts)?.value;
                }
            }
            positive.push(Complex64::new(re / tau2pi, im / tau2pi));
        }
        let mut lags: Vec<Complex64> = positive[1..].iter().rev().map(|z| z.conj()).collect();
        lags.extend(positive);
        Self::from_lags(lags, horizon, n)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> f64 {
        self.horizon / (self.n - 1) as f64
    }

    /// `beta(j h)` for `|j| < n`.
    pub fn lag(&self, j: i64) -> Complex64 {
        self.lags[(j + self.n as i64 - 1) as usize]
    }

    fn check_hermitian(&self) -> Result<()> {
        let scale = self.lags.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        let tol = 1e-10 * scale;
        let b0 = self.lag(0);
        if b0.im.abs() > tol || b0.re < -tol {
            return Err(CapacityError::Kernel(format!("beta(0) = {b0} must be real and non-negative")));
        }
        for j in 1..self.n as i64 {
            if (self.lag(-j) - self.lag(j).conj()).norm() > tol {
                return Err(CapacityError::Kernel(format!(
                    "kernel is not Hermitian at lag {j}: beta(-tau) != conj(beta(tau))"
                )));
            }
        }
        Ok(())
    }
}

/// Nyström eigenvalues of `int_0^T beta(t - s) f(s) ds = (lambda - 1/2) f(t)`
/// with trapezoid weights, returned as `lambda = mu + 1/2`.
pub fn kernel_symplectic_spectrum(k: &StationaryKernel) -> Result<SymplecticSpectrum> {
    let n = k.n;
    let h = k.step();
    let w: Vec<f64> = (0..n)
        .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h }.sqrt())
        .collect();
    let real = k.lags.iter().all(|z| z.im == 0.0);
    let mut mus: Vec<f64> = if real {
        let a = DMatrix::from_fn(n, n, |i, j| w[i] * k.lag(i as i64 - j as i64).re * w[j]);
        a.symmetric_eigenvalues().iter().copied().collect()
    } else {
        let a = DMatrix::from_fn(n, n, |i, j| k.lag(i as i64 - j as i64) * (w[i] * w[j]));
        a.symmetric_eigenvalues().iter().copied().collect()
    };
    sort_desc(&mut mus);
    let floor = VACUUM_FLOOR - 1e-10;
    let lambdas = mus.into_iter().map(|m| (m + VACUUM_FLOOR).max(floor)).collect();
    Ok(SymplecticSpectrum {
        lambdas,
        source: SpectrumSource::Kernel,
        floor: VACUUM_FLOOR,
        state_condition: true,
    })
}

/// A real test function sampled on `t_k = t0 + k dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0 && t0.is_finite()) {
            return Err(CapacityError::domain("time grid needs finite t0 and dt > 0"));
        }
        if values.len() < 16 {
            return Err(CapacityError::domain("test functions need at least 16 samples"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CapacityError::domain("test function samples must be finite"));
        }
        Ok(SampledFunction { t0, dt, values })
    }

    /// Samples `f` on `n` points spanning `[a, b]`.
    pub fn sample<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 || !(b > a) {
            return Err(CapacityError::domain("sampling needs b > a and n >= 2"));
        }
        let dt = (b - a) / (n - 1) as f64;
        Self::new(a, dt, (0..n).map(|k| f(a + k as f64 * dt)).collect())
    }

    fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// `f~(w) = int f(t) e^{i w t} dt`.
    pub fn fourier(&self, w: f64) -> Complex64 {
        let (mut re, mut im) = (0.0, 0.0);
        for (k, &v) in self.values.iter().enumerate() {
            if v != 0.0 {
                let (s, c) = (w * self.time(k)).sin_cos();
                re += v * c;
                im += v * s;
            }
        }
        Complex64::new(re * self.dt, im * self.dt)
    }

    fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VacuumForms {
    /// Symplectic form `Delta(f, g)`.
    pub delta: f64,
    /// Inner product `j(f, g)`.
    pub j: f64,
}

fn check_pair(f: &SampledFunction, g: &SampledFunction) -> Result<()> {
    if f.values.len() != g.values.len() || f.t0 != g.t0 || f.dt != g.dt {
        return Err(CapacityError::domain("test functions must share one time grid"));
    }
    for u in [f, g] {
        let m = u.max_abs();
        let ends = u.values[0].abs().max(u.values[u.values.len() - 1].abs());
        if ends > 1e-12 * m.max(1e-300) {
            return Err(CapacityError::domain(
                "test functions must vanish at both ends of the time grid",
            ));
        }
    }
    Ok(())
}

/// `Delta = pi^-1 Im int_0^inf w conj(f~) g~ dw` and the matching real
/// part `j`, by quadrature up to the grid's Nyquist frequency.
pub fn vacuum_form_frequency(f: &SampledFunction, g: &SampledFunction) -> Result<VacuumForms> {
    check_pair(f, g)?;
    let nyquist = std::f64::consts::PI / f.dt;
    let opts = QuadratureOptions::default().with_rel_tol(1e-11);
    for u in [f, g] {
        if u.max_abs() == 0.0 {
            continue;
        }
        let power = |w: f64| w * u.fourier(w).norm_sqr();
        let total = integrate(power, 0.0, nyquist, &opts)?.value;
        let high = integrate(power, 0.5 * nyquist, nyquist, &opts.with_abs_tol(1e-12 * total))?.value;
        if high > 1e-8 * total {
            return Err(CapacityError::domain(format!(
                "time grid too coarse: {:.2e} of the spectral weight lies above half the Nyquist frequency",
                high / total
            )));
        }
    }
    let opts = opts.with_abs_tol(1e-15 * f.max_abs() * g.max_abs());
    let re = integrate(
        |w| {
            let (a, b) = (f.fourier(w), g.fourier(w));
            w * (a.re * b.re + a.im * b.im)
        },
        0.0,
        nyquist,
        &opts,
    )?;
    let im = integrate(
        |w| {
            let (a, b) = (f.fourier(w), g.fourier(w));
            w * (a.re * b.im - a.im * b.re)
        },
        0.0,
        nyquist,
        &opts,
    )?;
    let pi = std::f64::consts::PI;
    Ok(VacuumForms {
        delta: im.value / pi,
        j: re.value / pi,
    })
}

/// `(2 pi)^-1 int int (g(t) - g(t-s)) (f(t) - f(t-s)) s^-2 ds dt`.
///
/// Shifts run over multiples of the grid step; the `s -> 0` limit of the
/// inner integral divided by `s^2` is extrapolated from the first two
/// shifts, and shifts beyond the grid span contribute `2 <f, g> / s^2`
/// exactly.
pub fn vacuum_form_slobodeckij(f: &SampledFunction, g: &SampledFunction) -> Result<f64> {
    check_pair(f, g)?;
    let n = f.values.len();
    let h = f.dt;
    let (fv, gv) = (&f.values, &g.values);
    let at = |v: &[f64], k: isize| -> f64 {
        if k < 0 || k as usize >= n {
            0.0
        } else {
            v[k as usize]
        }
    };
    // D(m h) = int (g(t) - g(t - m h)) (f(t) - f(t - m h)) dt
    let d = |m: usize| -> f64 {
        let m = m as isize;
        let mut acc = 0.0;
        for k in 0..(n as isize + m) {
            acc += (at(gv, k) - at(gv, k - m)) * (at(fv, k) - at(fv, k - m));
        }
        acc * h
    };
    let inner: f64 = fv.iter().zip(gv).map(|(a, b)| a * b).sum::<f64>() * h;
    let span = n;
    let mut values = Vec::with_capacity(span + 1);
    values.push(0.0);
    for m in 1..=span {
        let s = m as f64 * h;
        values.push(d(m) / (s * s));
    }
    values[0] = (4.0 * values[1] - values[2]) / 3.0;
    let s_end = span as f64 * h;
    let mut trap: f64 = values.iter().sum::<f64>() - 0.5 * (values[0] + values[span]);
    trap *= h;
    // endpoint corrections at s_end, where the integrand is 2c/s^2 (odd
    // derivatives vanish at s = 0 by symmetry)
    let c = inner;
    let d1 = -4.0 * c / s_end.powi(3);
    let d3 = -48.0 * c / s_end.powi(5);
    let corrected = trap - h * h / 12.0 * d1 + h.powi(4) / 720.0 * d3;
    let tail = 2.0 * c / s_end;
    Ok((corrected + tail) / std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bump(t: f64) -> f64 {
        if t.abs() < 1.0 {
            (-1.0 / (1.0 - t * t)).exp()
        } else {
            0.0
        }
    }

    #[test]
    fn vacuum_and_thermal_single_mode() {
        let vac = CovarianceForm::standard(DMatrix::identity(2, 2) * 0.5, Ordering::Xpxp).unwrap();
        let s = williamson_eigenvalues(&vac).unwrap();
        assert_relative_eq!(s.lambdas[0], 0.5, epsilon = 1e-14);
        assert!(s.state_condition);
        let th = CovarianceForm::standard(DMatrix::identity(2, 2) * 2.5, Ordering::Xpxp).unwrap();
        assert_relative_eq!(williamson_eigenvalues(&th).unwrap().lambdas[0], 2.5, epsilon = 1e-12);
    }

    #[test]
    fn sub_vacuum_flags_state_condition() {
        let c = CovarianceForm::standard(DMatrix::identity(2, 2) * 0.2, Ordering::Xpxp).unwrap();
        let s = williamson_eigenvalues(&c).unwrap();
        assert!(!s.state_condition);
        assert_relative_eq!(s.lambdas[0], 0.2, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_delta_is_rejected() {
        let err = CovarianceForm::new(DMatrix::identity(2, 2), DMatrix::zeros(2, 2)).unwrap_err();
        assert!(matches!(err, CapacityError::Domain(_)));
    }

    #[test]
    fn zero_kernel_is_vacuum() {
        let k = StationaryKernel::flat_band(0.0, 1.0, 5.0, 32).unwrap();
        let s = kernel_symplectic_spectrum(&k).unwrap();
        assert!(s.lambdas.iter().all(|&l| (l - 0.5).abs() <= 1e-10));
    }

    #[test]
    fn profile_kernel_matches_sinc() {
        let prof = SpectralProfile::band_limited_flat(1.0, 2.0, 0.0, 1.5).unwrap();
        let a = StationaryKernel::from_profile(&prof, 4.0, 16).unwrap();
        let b = StationaryKernel::flat_band(2.0, 1.5, 4.0, 16).unwrap();
        for j in -15..=15 {
            assert!((a.lag(j) - b.lag(j)).norm() < 1e-9, "lag {j}");
        }
    }

    #[test]
    fn non_hermitian_kernel_is_rejected() {
        let err = StationaryKernel::from_fn(|t| Complex64::new(0.0, t), 1.0, 8);
        assert!(err.is_ok());
        let bad = StationaryKernel::from_fn(|t| Complex64::new(t, 0.0), 1.0, 8).unwrap_err();
        assert!(matches!(bad, CapacityError::Kernel(_)));
    }

    #[test]
    fn delta_of_f_with_itself_is_zero() {
        let f = SampledFunction::sample(bump, -1.5, 1.5, 601).unwrap();
        let v = vacuum_form_frequency(&f, &f).unwrap();
        assert_eq!(v.delta, 0.0);
        assert!(v.j > 0.0);
    }

    #[test]
    fn zero_function_gives_zero() {
        let z = SampledFunction::new(0.0, 0.01, vec![0.0; 100]).unwrap();
        assert_eq!(vacuum_form_slobodeckij(&z, &z).unwrap(), 0.0);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let f = SampledFunction::sample(|t| bump(t * 20.0), -1.0, 1.0, 41).unwrap();
        assert!(vacuum_form_frequency(&f, &f).is_err());
    }
}
