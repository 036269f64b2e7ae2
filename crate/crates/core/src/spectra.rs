//! Frequency data of a channel: gain magnitude `|K(w)|`, noise photon
//! spectrum `N(w)`, cutoff schedules and the discrete mode grids built
//! from them.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{CapacityError, Result};
use crate::scalar::Real;
use crate::special_fn::planck_unchecked;

/// Frequency range a profile is declared on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    /// `w >= 0`, the broadband model.
    #[default]
    HalfLine,
    /// All real `w`, the bandpass model.
    FullLine,
}

type SpectrumFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
enum Shape<T> {
    Flat {
        gain: T,
        noise: T,
    },
    PlanckNoise {
        gain: T,
        theta_p: T,
        hbar: T,
    },
    ExponentialDecay {
        gain: T,
        n0: T,
        rate: T,
    },
    Rational {
        gain: T,
        n0: T,
        c: T,
        p: T,
    },
    BandLimitedFlat {
        gain: T,
        noise: T,
        center: T,
        half_width: T,
    },
    Tabulated {
        omega: Vec<T>,
        k_abs: Vec<T>,
        noise: Vec<T>,
        even: bool,
    },
    Custom {
        k_abs: SpectrumFn<T>,
        noise: SpectrumFn<T>,
        even: bool,
    },
}

/// Gain magnitude and noise spectrum of a stationary channel, together
/// with the uniform gain bound `kappa`. Immutable once built.
#[derive(Clone)]
pub struct SpectralProfile<T> {
    shape: Shape<T>,
    domain: Domain,
    rolloff: Option<T>,
    kappa: T,
}

impl<T: Real> fmt::Debug for SpectralProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralProfile")
            .field("kind", &self.kind_name())
            .field("domain", &self.domain)
            .field("kappa", &self.kappa)
            .field("rolloff", &self.rolloff)
            .finish()
    }
}

fn positive<T: Real>(x: T, what: &str) -> Result<T> {
    if x.is_finite() && x > T::zero() {
        Ok(x)
    } else {
        Err(CapacityError::domain(format!("{what} must be positive, got {x}")))
    }
}

fn nonneg<T: Real>(x: T, what: &str) -> Result<T> {
    if x.is_finite() && x >= T::zero() {
        Ok(x)
    } else {
        Err(CapacityError::domain(format!(
            "{what} must be non-negative, got {x}"
        )))
    }
}

impl<T: Real> SpectralProfile<T> {
    fn analytic(shape: Shape<T>, gain: T) -> Self {
        SpectralProfile {
            shape,
            domain: Domain::HalfLine,
            rolloff: None,
            kappa: gain,
        }
    }

    /// Constant gain and noise.
    pub fn flat(gain: T, noise: T) -> Result<Self> {
        let gain = positive(gain, "gain |K|")?;
        let noise = nonneg(noise, "noise N")?;
        Ok(Self::analytic(Shape::Flat { gain, noise }, gain))
    }

    /// Equilibrium noise `N(w) = 1/(exp(theta_p hbar w) - 1)`.
    pub fn planck_noise(theta_p: T, hbar: T, gain: T) -> Result<Self> {
        let gain = positive(gain, "gain |K|")?;
        let theta_p = positive(theta_p, "thetaP")?;
        let hbar = positive(hbar, "hbar")?;
        Ok(Self::analytic(
            Shape::PlanckNoise {
                gain,
                theta_p,
                hbar,
            },
            gain,
        ))
    }

    /// `N(w) = n0 exp(-rate |w|)`.
    pub fn exponential_decay(gain: T, n0: T, rate: T) -> Result<Self> {
        let gain = positive(gain, "gain |K|")?;
        let n0 = nonneg(n0, "N0")?;
        let rate = positive(rate, "rate")?;
        Ok(Self::analytic(Shape::ExponentialDecay { gain, n0, rate }, gain))
    }

    /// `N(w) = n0 / (c + |w|^p)`. With `c = 0` the noise is singular at
    /// the origin, which is only useful for tail probes.
    pub fn rational(gain: T, n0: T, c: T, p: T) -> Result<Self> {
        let gain = positive(gain, "gain |K|")?;
        let n0 = nonneg(n0, "N0")?;
        let c = nonneg(c, "c")?;
        let p = positive(p, "p")?;
        Ok(Self::analytic(Shape::Rational { gain, n0, c, p }, gain))
    }

    /// Gain and noise constant on `|w - center| <= half_width`, no
    /// transmission and no noise outside. Declared on the full line.
    pub fn band_limited_flat(gain: T, noise: T, center: T, half_width: T) -> Result<Self> {
        let gain = positive(gain, "gain |K|")?;
        let noise = nonneg(noise, "noise N")?;
        let half_width = positive(half_width, "half_width")?;
        if !center.is_finite() {
            return Err(CapacityError::domain("band center must be finite"));
        }
        let mut p = Self::analytic(
            Shape::BandLimitedFlat {
                gain,
                noise,
                center,
                half_width,
            },
            gain,
        );
        p.domain = Domain::FullLine;
        Ok(p)
    }

    /// Piecewise-linear profile through the given samples, constant beyond
    /// the first and last node. With `even`, the table describes `w >= 0`
    /// and is mirrored to negative frequencies.
    pub fn tabulated(
        omega: Vec<T>,
        k_abs: Vec<T>,
        noise: Vec<T>,
        domain: Domain,
        even: bool,
    ) -> Result<Self> {
        if omega.len() != k_abs.len() || omega.len() != noise.len() {
            return Err(CapacityError::Schema(format!(
                "tabulated columns differ in length: omega {}, K_abs {}, N {}",
                omega.len(),
                k_abs.len(),
                noise.len()
            )));
        }
        if omega.is_empty() {
            return Err(CapacityError::Schema("tabulated profile has no rows".into()));
        }
        if omega.iter().any(|w| !w.is_finite()) {
            return Err(CapacityError::domain("omega column must be finite"));
        }
        if omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CapacityError::domain(
                "omega column must be strictly increasing",
            ));
        }
        if even && omega[0] < T::zero() {
            return Err(CapacityError::domain(
                "an even table must start at omega >= 0",
            ));
        }
        for &k in &k_abs {
            positive(k, "gain |K| sample")?;
        }
        for &n in &noise {
            nonneg(n, "noise N sample")?;
        }
        let kappa = k_abs.iter().fold(T::zero(), |m, &k| m.max(k));
        Ok(SpectralProfile {
            shape: Shape::Tabulated {
                omega,
                k_abs,
                noise,
                even,
            },
            domain,
            rolloff: None,
            kappa,
        })
    }

    /// Profile from arbitrary continuous functions. `kappa` must bound the
    /// gain; it is not verified.
    pub fn custom<K, N>(k_abs: K, noise: N, kappa: T, domain: Domain, even: bool) -> Result<Self>
    where
        K: Fn(T) -> T + Send + Sync + 'static,
        N: Fn(T) -> T + Send + Sync + 'static,
    {
        let kappa = positive(kappa, "kappa")?;
        Ok(SpectralProfile {
            shape: Shape::Custom {
                k_abs: Arc::new(k_abs),
                noise: Arc::new(noise),
                even,
            },
            domain,
            rolloff: None,
            kappa,
        })
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    /// Multiplies the gain by `exp(-w^2 / (2 sigma^2))`.
    pub fn with_gain_rolloff(mut self, sigma: T) -> Result<Self> {
        self.rolloff = Some(positive(sigma, "gain_rolloff")?);
        Ok(self)
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn kind_name(&self) -> &'static str {
        match self.shape {
            Shape::Flat { .. } => "flat",
            Shape::PlanckNoise { .. } => "planck-noise",
            Shape::ExponentialDecay { .. } => "exponential-decay",
            Shape::Rational { .. } => "rational",
            Shape::BandLimitedFlat { .. } => "band-limited-flat",
            Shape::Tabulated { .. } => "tabulated",
            Shape::Custom { .. } => "custom",
        }
    }

    /// Whether `K` and `N` are symmetric under `w -> -w`.
    pub fn is_even(&self) -> bool {
        match &self.shape {
            Shape::BandLimitedFlat { center, .. } => *center == T::zero(),
            Shape::Tabulated { even, .. } | Shape::Custom { even, .. } => *even,
            _ => true,
        }
    }

    /// Frequencies where the gain is nonzero, clipped to the domain.
    pub fn support(&self) -> (T, T) {
        let (lo, hi) = match &self.shape {
            Shape::BandLimitedFlat {
                center, half_width, ..
            } => (*center - *half_width, *center + *half_width),
            _ => (T::neg_infinity(), T::infinity()),
        };
        match self.domain {
            Domain::HalfLine => (lo.max(T::zero()), hi),
            Domain::FullLine => (lo, hi),
        }
    }

    pub fn contains(&self, omega: T) -> bool {
        let (lo, hi) = self.support();
        omega >= lo && omega <= hi
    }

    fn rolloff_factor(&self, omega: T) -> T {
        match self.rolloff {
            Some(s) => (-(omega * omega) / (T::lit(2.0) * s * s)).exp(),
            None => T::one(),
        }
    }

    /// Gain magnitude `|K(w)|`; zero outside the support of band-limited
    /// profiles.
    pub fn k_abs(&self, omega: T) -> T {
        let base = match &self.shape {
            Shape::Flat { gain, .. }
            | Shape::PlanckNoise { gain, .. }
            | Shape::ExponentialDecay { gain, .. }
            | Shape::Rational { gain, .. } => *gain,
            Shape::BandLimitedFlat {
                gain,
                center,
                half_width,
                ..
            } => {
                if (omega - *center).abs() <= *half_width {
                    *gain
                } else {
                    T::zero()
                }
            }
            Shape::Tabulated {
                omega: w,
                k_abs,
                even,
                ..
            } => interpolate(w, k_abs, if *even { omega.abs() } else { omega }),
            Shape::Custom { k_abs, .. } => k_abs(omega),
        };
        base * self.rolloff_factor(omega)
    }

    /// Noise photon spectrum `N(w)`.
    pub fn noise(&self, omega: T) -> T {
        match &self.shape {
            Shape::Flat { noise, .. } => *noise,
            Shape::PlanckNoise { theta_p, hbar, .. } => {
                let x = *theta_p * *hbar * omega.abs();
                if x > T::zero() {
                    planck_unchecked(x)
                } else {
                    T::infinity()
                }
            }
            Shape::ExponentialDecay { n0, rate, .. } => *n0 * (-*rate * omega.abs()).exp(),
            Shape::Rational { n0, c, p, .. } => *n0 / (*c + omega.abs().powf(*p)),
            Shape::BandLimitedFlat {
                noise,
                center,
                half_width,
                ..
            } => {
                if (omega - *center).abs() <= *half_width {
                    *noise
                } else {
                    T::zero()
                }
            }
            Shape::Tabulated {
                omega: w,
                noise,
                even,
                ..
            } => interpolate(w, noise, if *even { omega.abs() } else { omega }),
            Shape::Custom { noise, .. } => noise(omega),
        }
    }

    /// Tabulated nodes (and band edges) where the profile has kinks.
    pub fn breakpoints(&self) -> Vec<T> {
        match &self.shape {
            Shape::Tabulated { omega, even, .. } => {
                let mut v = omega.clone();
                if *even {
                    v.extend(omega.iter().map(|&w| -w));
                    v.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
                    v.dedup();
                }
                v
            }
            Shape::BandLimitedFlat {
                center, half_width, ..
            } => vec![*center - *half_width, *center + *half_width],
            _ => Vec::new(),
        }
    }
}

fn interpolate<T: Real>(xs: &[T], ys: &[T], x: T) -> T {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = xs.partition_point(|&v| v <= x);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let (y0, y1) = (ys[i - 1], ys[i]);
    if x == x0 {
        return y0;
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Cutoff schedule `w_bar(T) = c T^alpha` with `0 < alpha < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSchedule<T> {
    pub c: T,
    pub alpha: T,
}

impl<T: Real> Default for CutoffSchedule<T> {
    fn default() -> Self {
        CutoffSchedule {
            c: T::one(),
            alpha: T::lit(0.5),
        }
    }
}

impl<T: Real> CutoffSchedule<T> {
    pub fn power_law(c: T, alpha: T) -> Result<Self> {
        let c = positive(c, "schedule constant c")?;
        if !(alpha > T::zero() && alpha < T::one()) {
            return Err(CapacityError::domain(format!(
                "schedule exponent must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(CutoffSchedule { c, alpha })
    }

    pub fn cutoff(&self, horizon: T) -> T {
        self.c * horizon.powf(self.alpha)
    }
}

/// Modes `w_k = 2 pi k / T`, `k = 1..s_T`, below the cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid<T> {
    horizon: T,
    cutoff: T,
    spacing: T,
    omegas: Vec<T>,
}

impl<T: Real> ModeGrid<T> {
    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn cutoff(&self) -> T {
        self.cutoff
    }

    /// `2 pi / T`.
    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn omegas(&self) -> &[T] {
        &self.omegas
    }

    pub fn mode_count(&self) -> usize {
        self.omegas.len()
    }

    /// Per-mode measure `dw / 2 pi = 1 / T`.
    pub fn weight(&self) -> T {
        self.spacing / T::TAU()
    }
}

/// Largest grid [`make_grid`] will materialise.
pub const MAX_MODES: usize = 50_000_000;

pub fn make_grid<T: Real>(horizon: T, schedule: &CutoffSchedule<T>) -> Result<ModeGrid<T>> {
    let horizon = positive(horizon, "observation time T")?;
    make_grid_with_cutoff(horizon, schedule.cutoff(horizon))
}

pub fn make_grid_with_cutoff<T: Real>(horizon: T, cutoff: T) -> Result<ModeGrid<T>> {
    let horizon = positive(horizon, "observation time T")?;
    let cutoff = positive(cutoff, "cutoff")?;
    let spacing = T::TAU() / horizon;
    let slack = T::one() + T::lit(8.0) * T::epsilon();
    let ratio = cutoff / spacing;
    if ratio > T::from_usize(MAX_MODES).expect("mode cap") {
        return Err(CapacityError::domain(format!(
            "grid would hold about {ratio} modes (limit {MAX_MODES}); shorten T or lower the cutoff"
        )));
    }
    let mut count = (ratio * slack).floor().to_usize().unwrap_or(0);
    while count > 0 && T::from_usize(count).expect("count") * spacing > cutoff * slack {
        count -= 1;
    }
    if count == 0 {
        return Err(CapacityError::domain(format!(
            "cutoff {cutoff} is below the first mode 2pi/T = {spacing}"
        )));
    }
    let omegas = (1..=count)
        .map(|k| T::from_usize(k).expect("mode index") * spacing)
        .collect();
    Ok(ModeGrid {
        horizon,
        cutoff,
        spacing,
        omegas,
    })
}

/// A profile evaluated at one mode frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSample<T> {
    pub omega: T,
    pub k_abs: T,
    pub noise: T,
}

pub fn sample_profile<T: Real>(
    profile: &SpectralProfile<T>,
    grid: &ModeGrid<T>,
) -> Result<Vec<ModeSample<T>>> {
    grid.omegas()
        .iter()
        .map(|&omega| {
            if !profile.contains(omega) {
                return Err(CapacityError::domain(format!(
                    "mode {omega} lies outside the profile support"
                )));
            }
            Ok(ModeSample {
                omega,
                k_abs: profile.k_abs(omega),
                noise: profile.noise(omega),
            })
        })
        .collect()
}

/// Profile document: `{"kind": ..., <parameters>}` plus the optional
/// shared keys `domain` and `gain_rolloff`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDocument {
    #[serde(flatten)]
    pub shape: ShapeDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain_rolloff: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn hbar_default() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ShapeDocument {
    Flat {
        #[serde(rename = "K", default = "one")]
        k: f64,
        #[serde(rename = "N", default)]
        n: f64,
    },
    PlanckNoise {
        #[serde(rename = "thetaP")]
        theta_p: f64,
        #[serde(default = "hbar_default")]
        hbar: f64,
        #[serde(rename = "K", default = "one")]
        k: f64,
    },
    ExponentialDecay {
        #[serde(rename = "K", default = "one")]
        k: f64,
        #[serde(rename = "N0", default = "one")]
        n0: f64,
        #[serde(default = "one")]
        rate: f64,
    },
    Rational {
        #[serde(rename = "K", default = "one")]
        k: f64,
        #[serde(rename = "N0", default = "one")]
        n0: f64,
        #[serde(default = "one")]
        c: f64,
        #[serde(default = "two")]
        p: f64,
    },
    BandLimitedFlat {
        #[serde(rename = "K", default = "one")]
        k: f64,
        #[serde(rename = "N", default)]
        n: f64,
        half_width: f64,
        #[serde(default)]
        center: f64,
    },
    Tabulated {
        omega: Vec<f64>,
        #[serde(rename = "K_abs")]
        k_abs: Vec<f64>,
        #[serde(rename = "N")]
        n: Vec<f64>,
        #[serde(default)]
        even: bool,
    },
}

fn two() -> f64 {
    2.0
}

impl ProfileDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CapacityError::Schema(e.to_string()))
    }

    /// Builds and validates the profile.
    pub fn to_profile<T: Real>(&self) -> Result<SpectralProfile<T>> {
        let c = T::lit;
        let mut profile = match &self.shape {
            ShapeDocument::Flat { k, n } => SpectralProfile::flat(c(*k), c(*n))?,
            ShapeDocument::PlanckNoise { theta_p, hbar, k } => {
                SpectralProfile::planck_noise(c(*theta_p), c(*hbar), c(*k))?
            }
            ShapeDocument::ExponentialDecay { k, n0, rate } => {
                SpectralProfile::exponential_decay(c(*k), c(*n0), c(*rate))?
            }
            ShapeDocument::Rational { k, n0, c: c0, p } => {
                SpectralProfile::rational(c(*k), c(*n0), c(*c0), c(*p))?
            }
            ShapeDocument::BandLimitedFlat {
                k,
                n,
                half_width,
                center,
            } => SpectralProfile::band_limited_flat(c(*k), c(*n), c(*center), c(*half_width))?,
            ShapeDocument::Tabulated { omega, k_abs, n, even } => SpectralProfile::tabulated(
                omega.iter().map(|&v| c(v)).collect(),
                k_abs.iter().map(|&v| c(v)).collect(),
                n.iter().map(|&v| c(v)).collect(),
                self.domain.unwrap_or_default(),
                *even,
            )?,
        };
        if let Some(d) = self.domain {
            profile = profile.with_domain(d);
        }
        if let Some(s) = self.gain_rolloff {
            profile = profile.with_gain_rolloff(c(s))?;
        }
        Ok(profile)
    }

    /// Precondition checks without building anything; empty means valid.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        let gain_msg = |k: f64| {
            format!("gain must be positive (0 < |K(w)| <= kappa is required), got K = {k}")
        };
        match &self.shape {
            ShapeDocument::Flat { k, n } => {
                if !(*k > 0.0) {
                    out.push(gain_msg(*k));
                }
                if !(*n >= 0.0) {
                    out.push(format!("noise must be non-negative, got N = {n}"));
                }
            }
            ShapeDocument::PlanckNoise { theta_p, hbar, k } => {
                if !(*k > 0.0) {
                    out.push(gain_msg(*k));
                }
                if !(*theta_p > 0.0) {
                    out.push(format!("thetaP must be positive, got {theta_p}"));
                }
                if !(*hbar > 0.0) {
                    out.push(format!("hbar must be positive, got {hbar}"));
                }
            }
            ShapeDocument::ExponentialDecay { k, n0, rate } => {
                if !(*k > 0.0) {
                    out.push(gain_msg(*k));
                }
                if !(*n0 >= 0.0) {
                    out.push(format!("N0 must be non-negative, got {n0}"));
                }
                if !(*rate > 0.0) {
                    out.push(format!("rate must be positive, got {rate}"));
                }
            }
            ShapeDocument::Rational { k, n0, c, p } => {
                if !(*k > 0.0) {
                    out.push(gain_msg(*k));
                }
                if !(*n0 >= 0.0) {
                    out.push(format!("N0 must be non-negative, got {n0}"));
                }
                if !(*c >= 0.0) {
                    out.push(format!("c must be non-negative, got {c}"));
                }
                if !(*p > 0.0) {
                    out.push(format!("p must be positive, got {p}"));
                }
            }
            ShapeDocument::BandLimitedFlat {
                k, n, half_width, ..
            } => {
                if !(*k > 0.0) {
                    out.push(gain_msg(*k));
                }
                if !(*n >= 0.0) {
                    out.push(format!("noise must be non-negative, got N = {n}"));
                }
                if !(*half_width > 0.0) {
                    out.push(format!("half_width must be positive, got {half_width}"));
                }
            }
            ShapeDocument::Tabulated { omega, k_abs, n, even } => {
                if omega.len() != k_abs.len() || omega.len() != n.len() {
                    out.push("omega, K_abs and N must have the same length".into());
                }
                if omega.is_empty() {
                    out.push("tabulated profile has no rows".into());
                }
                if omega.windows(2).any(|w| !(w[1] > w[0])) {
                    out.push("omega column must be strictly increasing".into());
                }
                if *even && omega.first().is_some_and(|&w| w < 0.0) {
                    out.push("an even table must start at omega >= 0".into());
                }
                if let Some(k) = k_abs.iter().find(|&&k| !(k > 0.0)) {
                    out.push(gain_msg(*k));
                }
                if let Some(v) = n.iter().find(|&&v| !(v >= 0.0)) {
                    out.push(format!("noise must be non-negative, got N = {v}"));
                }
            }
        }
        if let Some(s) = self.gain_rolloff {
            if !(s > 0.0) {
                out.push(format!("gain_rolloff must be positive, got {s}"));
            }
        }
        out
    }
}

/// Parses and validates a profile document.
pub fn load_profile<T: Real>(text: &str) -> Result<SpectralProfile<T>> {
    ProfileDocument::parse(text)?.to_profile()
}
