//! Single-mode capacity formulas and the multimode gauge-covariant
//! chi-capacity with a quadratic energy constraint.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CapacityError, Result};
use crate::scalar::Real;
use crate::special_fn::{g_prime_unchecked, g_unchecked};

/// The six solvable single-mode models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingleModeModel {
    Attenuator,
    Amplifier,
    ClassicalNoise,
    ContravariantAmplifier,
    ClassicalQuantum,
    QuantumClassical,
}

/// A single-mode channel given by its model, gain `k` and noise
/// `N = <Z^dagger Z>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeChannel<T> {
    model: SingleModeModel,
    k: T,
    noise_n: T,
}

impl<T: Real> SingleModeChannel<T> {
    pub fn new(model: SingleModeModel, k: T, noise_n: T) -> Result<Self> {
        if !(noise_n.is_finite() && noise_n >= T::zero()) {
            return Err(CapacityError::domain(format!("noise N must be non-negative, got {noise_n}")));
        }
        if !k.is_finite() {
            return Err(CapacityError::domain("gain k must be finite"));
        }
        let ok = match model {
            SingleModeModel::Attenuator => k >= T::zero() && k <= T::one(),
            SingleModeModel::Amplifier => k >= T::one(),
            SingleModeModel::ClassicalNoise => k == T::one(),
            SingleModeModel::ContravariantAmplifier => k >= T::zero(),
            SingleModeModel::ClassicalQuantum | SingleModeModel::QuantumClassical => true,
        };
        if !ok {
            return Err(CapacityError::domain(format!("gain k = {k} is not allowed for {model:?}")));
        }
        Ok(SingleModeChannel { model, k, noise_n })
    }

    pub fn model(&self) -> SingleModeModel {
        self.model
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn noise(&self) -> T {
        self.noise_n
    }
}

/// Capacity in nats per use for signal energy `E = <X^dagger X>`.
pub fn capacity_single_mode<T: Real>(ch: &SingleModeChannel<T>, energy: T) -> Result<T> {
    if !(energy.is_finite() && energy >= T::zero()) {
        return Err(CapacityError::domain(format!("energy must be non-negative, got {energy}")));
    }
    let n = ch.noise_n;
    Ok(match ch.model {
        SingleModeModel::Attenuator
        | SingleModeModel::Amplifier
        | SingleModeModel::ClassicalNoise
        | SingleModeModel::ClassicalQuantum => g_unchecked(energy + n) - g_unchecked(n),
        SingleModeModel::ContravariantAmplifier => g_unchecked(energy + n) - g_unchecked(n + ch.k * ch.k),
        SingleModeModel::QuantumClassical => {
            if n == T::zero() {
                return Err(CapacityError::Unbounded(
                    "quantum-classical channel with N = 0 has unbounded capacity".into(),
                ));
            }
            (energy / n).ln_1p()
        }
    })
}

/// Shannon capacity `1/2 ln(1 + E/N)`, doubled for circular complex
/// signals.
pub fn classical_capacity<T: Real>(energy: T, noise: T, complex: bool) -> Result<T> {
    if !(noise.is_finite() && noise > T::zero()) {
        return Err(CapacityError::domain(format!("noise power must be positive, got {noise}")));
    }
    if !(energy.is_finite() && energy >= T::zero()) {
        return Err(CapacityError::domain(format!("energy must be non-negative, got {energy}")));
    }
    let c = (energy / noise).ln_1p();
    Ok(if complex { c } else { c / T::lit(2.0) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseRegime {
    Attenuator,
    ClassicalNoise,
    Amplifier,
}

/// Commutator coefficient `1 - |K|^2` of the added noise and its regime.
pub fn noise_operator_params<T: Real>(k_abs: T) -> Result<(T, NoiseRegime)> {
    if !(k_abs.is_finite() && k_abs > T::zero()) {
        return Err(CapacityError::domain(format!("|K| must be positive, got {k_abs}")));
    }
    let coeff = T::one() - k_abs * k_abs;
    let regime = if k_abs < T::one() {
        NoiseRegime::Attenuator
    } else if k_abs == T::one() {
        NoiseRegime::ClassicalNoise
    } else {
        NoiseRegime::Amplifier
    };
    Ok((coeff, regime))
}

pub type CMatrix = DMatrix<Complex64>;

/// An `s`-mode gauge-covariant channel with matrix parameters `K`, `mu`
/// and a Hermitian energy matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MultimodeChannel {
    k: CMatrix,
    mu: CMatrix,
    energy: CMatrix,
    // mu + (K*K - I)/2, the output noise matrix
    noise: CMatrix,
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn check_hermitian(m: &CMatrix, what: &str) -> Result<()> {
    let scale = m.norm().max(1.0);
    if (m - m.adjoint()).norm() > 1e-10 * scale {
        return Err(CapacityError::InvalidChannel(format!("{what} is not Hermitian")));
    }
    Ok(())
}

fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let e = hermitian_part(m).symmetric_eigen();
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

fn from_eigen(vals: &[f64], vecs: &CMatrix) -> CMatrix {
    let n = vals.len();
    let mut scaled = vecs.clone();
    for j in 0..n {
        for i in 0..n {
            scaled[(i, j)] *= vals[j];
        }
    }
    &scaled * vecs.adjoint()
}

fn clamped_spectrum(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let (vals, vecs) = eigh(m);
    let tol = 1e-12 * m.norm();
    let mut out = Vec::with_capacity(vals.len());
    for v in vals {
        if v < -tol {
            return Err(CapacityError::InvalidChannel(format!(
                "output covariance has eigenvalue {v} < 0"
            )));
        }
        out.push(v.max(0.0));
    }
    Ok((out, vecs))
}

/// `tr g(M)` for Hermitian `M`, eigenvalues in `[-tol, 0)` clamped to 0.
pub fn trace_g(m: &CMatrix) -> Result<f64> {
    Ok(clamped_spectrum(m)?.0.into_iter().map(g_unchecked).sum())
}

impl MultimodeChannel {
    pub fn new(k: CMatrix, mu: CMatrix, energy: CMatrix) -> Result<Self> {
        let s = k.nrows();
        if s == 0 || !k.is_square() || mu.shape() != (s, s) || energy.shape() != (s, s) {
            return Err(CapacityError::InvalidChannel("K, mu and energy must be s x s".into()));
        }
        check_hermitian(&mu, "mu")?;
        check_hermitian(&energy, "energy matrix")?;
        let (eps_vals, _) = eigh(&energy);
        if eps_vals.iter().any(|&v| v < -1e-12 * energy.norm()) {
            return Err(CapacityError::InvalidChannel("energy matrix is not PSD".into()));
        }
        let identity = CMatrix::identity(s, s);
        let noise = hermitian_part(&(&mu + (k.adjoint() * &k - identity) * Complex64::new(0.5, 0.0)));
        clamped_spectrum(&noise)?;
        Ok(MultimodeChannel { k, mu, energy, noise })
    }

    /// Independent modes `(k_j, N_j)` with diagonal energy matrix; uses
    /// `mu_jj = N_j + (1 - |k_j|^2)/2` so the output noise is `diag(N_j)`.
    pub fn diagonal(modes: &[(f64, f64)], energy_diag: &[f64]) -> Result<Self> {
        if modes.len() != energy_diag.len() {
            return Err(CapacityError::InvalidChannel("one energy weight per mode".into()));
        }
        let s = modes.len();
        let mut k = CMatrix::zeros(s, s);
        let mut mu = CMatrix::zeros(s, s);
        let mut eps = CMatrix::zeros(s, s);
        for (j, (&(kj, nj), &ej)) in modes.iter().zip(energy_diag).enumerate() {
            if nj < 0.0 {
                return Err(CapacityError::domain("noise must be non-negative"));
            }
            k[(j, j)] = Complex64::new(kj, 0.0);
            mu[(j, j)] = Complex64::new(nj + (1.0 - kj * kj) / 2.0, 0.0);
            eps[(j, j)] = Complex64::new(ej, 0.0);
        }
        Self::new(k, mu, eps)
    }

    pub fn modes(&self) -> usize {
        self.k.nrows()
    }

    pub fn k(&self) -> &CMatrix {
        &self.k
    }

    pub fn mu(&self) -> &CMatrix {
        &self.mu
    }

    pub fn energy_matrix(&self) -> &CMatrix {
        &self.energy
    }

    /// `mu + (K*K - I)/2`.
    pub fn output_noise(&self) -> &CMatrix {
        &self.noise
    }

    fn output(&self, nu: &CMatrix) -> CMatrix {
        hermitian_part(&(self.k.adjoint() * nu * &self.k + &self.noise))
    }

    /// `K g'(M) K*` at `M = K* nu K + noise`.
    fn gradient(&self, nu: &CMatrix) -> Result<CMatrix> {
        let (vals, vecs) = clamped_spectrum(&self.output(nu))?;
        let d: Vec<f64> = vals.iter().map(|&v| g_prime_unchecked(v.max(1e-300))).collect();
        let gp = from_eigen(&d, &vecs);
        Ok(hermitian_part(&(&self.k * gp * self.k.adjoint())))
    }
}

/// `tr g(K* nu K + noise) - tr g(noise)`.
pub fn chi_objective(ch: &MultimodeChannel, nu: &CMatrix) -> Result<f64> {
    if nu.shape() != (ch.modes(), ch.modes()) {
        return Err(CapacityError::domain("nu has the wrong shape"));
    }
    check_hermitian(nu, "nu")?;
    let (vals, _) = eigh(nu);
    if vals.iter().any(|&v| v < -1e-12 * nu.norm().max(1e-300)) {
        return Err(CapacityError::domain("nu must be positive semidefinite"));
    }
    Ok(trace_g(&ch.output(nu))? - trace_g(ch.output_noise())?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultimodeOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop when a step moves the iterate less than this (Frobenius norm,
    /// relative to the budget).
    pub step_tol: f64,
}

impl Default for MultimodeOptions {
    fn default() -> Self {
        MultimodeOptions {
            restarts: 8,
            seed: 0,
            max_iterations: 20_000,
            step_tol: 1e-13,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultimodeCapacity {
    pub value: f64,
    pub nu: CMatrix,
    pub iterations: usize,
    pub converged_restarts: usize,
}

/// Projects a Hermitian matrix onto `{X >= 0, tr X <= budget}`.
pub fn project_capped_psd(y: &CMatrix, budget: f64) -> CMatrix {
    let (vals, vecs) = eigh(y);
    let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    if clipped.iter().sum::<f64>() <= budget {
        return from_eigen(&clipped, &vecs);
    }
    // shift tau with sum (v - tau)_+ = budget
    let mut sorted = vals.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    let mut tau = 0.0;
    let mut acc = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        acc += v;
        let t = (acc - budget) / (i + 1) as f64;
        if i + 1 == sorted.len() || sorted[i + 1] <= t {
            tau = t;
            break;
        }
    }
    let shifted: Vec<f64> = vals.iter().map(|&v| (v - tau).max(0.0)).collect();
    from_eigen(&shifted, &vecs)
}

fn inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

fn random_start(rng: &mut ChaCha8Rng, s: usize, budget: f64) -> CMatrix {
    let mut a = CMatrix::zeros(s, s);
    for v in a.iter_mut() {
        *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let mut x = &a * a.adjoint() + CMatrix::identity(s, s) * Complex64::new(0.1, 0.0);
    let tr: f64 = (0..s).map(|i| x[(i, i)].re).sum();
    let fill = rng.gen_range(0.5..1.0);
    x *= Complex64::new(fill * budget / tr, 0.0);
    x
}

/// Maximises [`chi_objective`] over `nu >= 0` with `tr(nu eps) <= E` by
/// projected gradient ascent in whitened coordinates `X = eps^1/2 nu eps^1/2`.
pub fn chi_capacity_multimode(ch: &MultimodeChannel, energy: f64, opts: &MultimodeOptions) -> Result<MultimodeCapacity> {
    if !(energy.is_finite() && energy >= 0.0) {
        return Err(CapacityError::domain(format!("energy must be non-negative, got {energy}")));
    }
    let s = ch.modes();
    let (eps_vals, eps_vecs) = eigh(&ch.energy);
    if eps_vals.iter().any(|&v| v <= 0.0) {
        return Err(CapacityError::domain("energy matrix must be positive definite"));
    }
    if energy == 0.0 {
        return Ok(MultimodeCapacity {
            value: 0.0,
            nu: CMatrix::zeros(s, s),
            iterations: 0,
            converged_restarts: opts.restarts.max(1),
        });
    }
    let inv_sqrt: Vec<f64> = eps_vals.iter().map(|v| v.sqrt().recip()).collect();
    let whiten = from_eigen(&inv_sqrt, &eps_vecs);
    let to_nu = |x: &CMatrix| hermitian_part(&(&whiten * x * &whiten));
    let base = trace_g(ch.output_noise())?;
    let value_at = |x: &CMatrix| -> Result<f64> { Ok(trace_g(&ch.output(&to_nu(x)))? - base) };

    let mut best: Option<(f64, CMatrix)> = None;
    let mut iterations = 0;
    let mut converged_restarts = 0;
    for restart in 0..opts.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(restart as u64));
        let mut x = project_capped_psd(&random_start(&mut rng, s, energy), energy);
        let mut fx = value_at(&x)?;
        let mut step = energy.max(1e-3);
        let mut converged = false;
        let mut stalled = 0;
        for _ in 0..opts.max_iterations {
            iterations += 1;
            let grad = hermitian_part(&(&whiten * ch.gradient(&to_nu(&x))? * &whiten));
            let mut accepted = None;
            for _ in 0..200 {
                let cand = project_capped_psd(&(&x + &grad * Complex64::new(step, 0.0)), energy);
                let d = &cand - &x;
                let fc = value_at(&cand)?;
                let model = fx + inner(&grad, &d) - d.norm_squared() / (2.0 * step);
                if fc >= model - 1e-15 * fx.abs().max(1.0) {
                    accepted = Some((cand, fc, d.norm()));
                    break;
                }
                step *= 0.5;
            }
            let Some((cand, fc, moved)) = accepted else {
                break;
            };
            // the objective can be flat to rounding along coherence directions
            if fc - fx <= 4.0 * f64::EPSILON * fx.abs().max(1.0) {
                stalled += 1;
            } else {
                stalled = 0;
            }
            x = cand;
            fx = fc;
            if moved <= opts.step_tol * energy.max(1.0) || stalled >= 25 {
                converged = true;
                break;
            }
            step *= 1.5;
        }
        if converged {
            converged_restarts += 1;
        }
        if best.as_ref().is_none_or(|(b, _)| fx > *b) {
            best = Some((fx, x));
        }
    }
    let (value, x) = best.expect("at least one restart");
    if converged_restarts == 0 {
        return Err(CapacityError::NonConvergence {
            message: "projected gradient ascent hit its iteration budget on every restart".into(),
            best: value,
        });
    }
    Ok(MultimodeCapacity {
        value,
        nu: to_nu(&x),
        iterations,
        converged_restarts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn g(x: f64) -> f64 {
        g_unchecked(x)
    }

    #[test]
    fn single_mode_examples() {
        let att = SingleModeChannel::new(SingleModeModel::Attenuator, 0.5, 0.0).unwrap();
        assert_relative_eq!(capacity_single_mode(&att, 1.0).unwrap(), 2.0 * 2f64.ln(), max_relative = 1e-14);
        let contra = SingleModeChannel::new(SingleModeModel::ContravariantAmplifier, 1.0, 0.0).unwrap();
        assert_eq!(capacity_single_mode(&contra, 1.0).unwrap(), 0.0);
        let qc = SingleModeChannel::new(SingleModeModel::QuantumClassical, 1.0, 1.0).unwrap();
        assert_relative_eq!(capacity_single_mode(&qc, 3.0).unwrap(), 2.0 * 2f64.ln(), max_relative = 1e-14);
        let qc0 = SingleModeChannel::new(SingleModeModel::QuantumClassical, 1.0, 0.0).unwrap();
        assert!(matches!(capacity_single_mode(&qc0, 1.0), Err(CapacityError::Unbounded(_))));
    }

    #[test]
    fn gain_ranges_enforced() {
        assert!(SingleModeChannel::new(SingleModeModel::Attenuator, 1.2, 0.0).is_err());
        assert!(SingleModeChannel::new(SingleModeModel::Amplifier, 0.9, 0.0).is_err());
        assert!(SingleModeChannel::new(SingleModeModel::ClassicalNoise, 0.9, 0.0).is_err());
        assert!(SingleModeChannel::new(SingleModeModel::Amplifier, 2.0, -1.0).is_err());
    }

    #[test]
    fn shannon_examples() {
        assert_relative_eq!(classical_capacity(2.0, 2.0, false).unwrap(), 0.5 * 2f64.ln());
        assert_eq!(classical_capacity(0.0, 1.0, false).unwrap(), 0.0);
        assert_relative_eq!(classical_capacity(3.0, 1.0, true).unwrap(), 4f64.ln());
        assert!(classical_capacity(1.0, 0.0, false).is_err());
    }

    #[test]
    fn noise_regimes() {
        assert_eq!(noise_operator_params(1.0).unwrap(), (0.0, NoiseRegime::ClassicalNoise));
        let (c, r) = noise_operator_params(0.6).unwrap();
        assert_relative_eq!(c, 0.64, max_relative = 1e-14);
        assert_eq!(r, NoiseRegime::Attenuator);
        assert_eq!(noise_operator_params(2.0).unwrap(), (-3.0, NoiseRegime::Amplifier));
    }

    #[test]
    fn objective_reduces_to_single_mode() {
        let (k, n, m) = (0.7, 0.4, 1.3);
        let ch = MultimodeChannel::diagonal(&[(k, n)], &[1.0]).unwrap();
        let nu = CMatrix::from_element(1, 1, Complex64::new(m, 0.0));
        assert_relative_eq!(chi_objective(&ch, &nu).unwrap(), g(k * k * m + n) - g(n), max_relative = 1e-12);
        assert_eq!(chi_objective(&ch, &CMatrix::zeros(1, 1)).unwrap(), 0.0);
    }

    #[test]
    fn objective_additive_on_diagonal() {
        let ch = MultimodeChannel::diagonal(&[(0.8, 0.2), (1.4, 1.0)], &[1.0, 2.0]).unwrap();
        let mut nu = CMatrix::zeros(2, 2);
        nu[(0, 0)] = Complex64::new(0.5, 0.0);
        nu[(1, 1)] = Complex64::new(1.5, 0.0);
        let expect = (g(0.64 * 0.5 + 0.2) - g(0.2)) + (g(1.96 * 1.5 + 1.0) - g(1.0));
        assert_relative_eq!(chi_objective(&ch, &nu).unwrap(), expect, max_relative = 1e-12);
    }

    #[test]
    fn invalid_output_noise_rejected() {
        // attenuator with mu below the vacuum bound
        let k = CMatrix::from_element(1, 1, Complex64::new(0.5, 0.0));
        let mu = CMatrix::from_element(1, 1, Complex64::new(0.0, 0.0));
        let eps = CMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        assert!(matches!(MultimodeChannel::new(k, mu, eps), Err(CapacityError::InvalidChannel(_))));
    }

    #[test]
    fn projection_onto_capped_cone() {
        let mut y = CMatrix::zeros(2, 2);
        y[(0, 0)] = Complex64::new(3.0, 0.0);
        y[(1, 1)] = Complex64::new(-1.0, 0.0);
        let p = project_capped_psd(&y, 1.0);
        assert_relative_eq!(p[(0, 0)].re, 1.0, max_relative = 1e-12);
        assert!(p[(1, 1)].norm() < 1e-12);
        let q = project_capped_psd(&(CMatrix::identity(2, 2) * Complex64::new(0.2, 0.0)), 1.0);
        assert_relative_eq!(q[(0, 0)].re, 0.2, max_relative = 1e-12);
    }

    #[test]
    fn single_mode_capacity_from_optimizer() {
        let (k, n, e, eps) = (0.9, 0.3, 2.0, 1.5);
        let ch = MultimodeChannel::diagonal(&[(k, n)], &[eps]).unwrap();
        let r = chi_capacity_multimode(&ch, e, &MultimodeOptions::default()).unwrap();
        let att = SingleModeChannel::new(SingleModeModel::Attenuator, k, n).unwrap();
        let closed = capacity_single_mode(&att, k * k * e / eps).unwrap();
        assert!((r.value - closed).abs() < 1e-8);
    }
}
