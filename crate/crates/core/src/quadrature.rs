//! Adaptive Gauss–Kronrod quadrature on finite intervals and on long or
//! semi-infinite ranges split into geometrically growing panels.
//!
//! The panel schedule and reduction order are fixed, so results are
//! bit-for-bit reproducible for a given integrand.

use crate::error::{CapacityError, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for QuadratureOptions<T> {
    fn default() -> Self {
        QuadratureOptions {
            abs_tol: T::zero(),
            rel_tol: T::lit(1e-12).max(T::tol_floor()),
            max_intervals: 4000,
        }
    }
}

impl<T: Real> QuadratureOptions<T> {
    pub fn with_rel_tol(mut self, rel: T) -> Self {
        self.rel_tol = rel.max(T::tol_floor());
        self
    }

    pub fn with_abs_tol(mut self, abs: T) -> Self {
        self.abs_tol = abs;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
    pub intervals: usize,
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

struct Rule<T> {
    value: T,
    error: T,
    abs: T,
}

fn kronrod15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Rule<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let f_center = f(center);

    let mut res_gauss = f_center * T::lit(WG[3]);
    let mut res_kronrod = f_center * T::lit(WGK[7]);
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];

    for j in 0..7 {
        let x = half_len * T::lit(XGK[j]);
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_kronrod = res_kronrod + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss = res_gauss + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = res_kronrod * half;
    let mut res_asc = T::lit(WGK[7]) * (f_center - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let abs_half = half_len.abs();
    let value = res_kronrod * half_len;
    let res_abs = res_abs * abs_half;
    let res_asc = res_asc * abs_half;
    let mut err = ((res_kronrod - res_gauss) * half_len).abs();

    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    if floor > err {
        err = floor;
    }

    Rule {
        value,
        error: err,
        abs: res_abs,
    }
}

/// Globally adaptive G7/K15 quadrature of `f` over `[a, b]`.
pub fn integrate<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    opts: &QuadratureOptions<T>,
) -> Result<Integral<T>> {
    if a == b {
        return Ok(Integral {
            value: T::zero(),
            error: T::zero(),
            evaluations: 0,
            intervals: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(CapacityError::domain("integrate needs finite limits"));
    }

    let first = kronrod15(&mut f, a, b);
    let mut evaluations = 15;
    let mut abs_total = first.abs;
    let mut segments = vec![Segment {
        a,
        b,
        value: first.value,
        error: first.error,
    }];

    loop {
        let value = segments.iter().fold(T::zero(), |s, seg| s + seg.value);
        let error = segments.iter().fold(T::zero(), |s, seg| s + seg.error);
        let target = opts
            .abs_tol
            .max(opts.rel_tol * value.abs())
            .max(T::lit(50.0) * T::epsilon() * abs_total);

        if !value.is_finite() || !error.is_finite() {
            return Err(CapacityError::Quadrature {
                a: a.to_f64_lossy(),
                b: b.to_f64_lossy(),
                value: value.to_f64_lossy(),
                error: error.to_f64_lossy(),
            });
        }
        if error <= target {
            return Ok(Integral {
                value,
                error,
                evaluations,
                intervals: segments.len(),
            });
        }
        if segments.len() >= opts.max_intervals {
            return Err(CapacityError::Quadrature {
                a: a.to_f64_lossy(),
                b: b.to_f64_lossy(),
                value: value.to_f64_lossy(),
                error: error.to_f64_lossy(),
            });
        }

        // bisect the segment with the largest error; ties go to the lowest index
        let mut worst = 0;
        for (i, seg) in segments.iter().enumerate() {
            if seg.error > segments[worst].error {
                worst = i;
            }
        }
        let seg = segments.swap_remove(worst);
        let mid = T::lit(0.5) * (seg.a + seg.b);
        if !(mid > seg.a.min(seg.b) && mid < seg.a.max(seg.b)) {
            // interval can no longer be split in this precision
            return Ok(Integral {
                value,
                error,
                evaluations,
                intervals: segments.len() + 1,
            });
        }
        let left = kronrod15(&mut f, seg.a, mid);
        let right = kronrod15(&mut f, mid, seg.b);
        evaluations += 30;
        abs_total = abs_total + left.abs + right.abs;
        segments.push(Segment {
            a: seg.a,
            b: mid,
            value: left.value,
            error: left.error,
        });
        segments.push(Segment {
            a: mid,
            b: seg.b,
            value: right.value,
            error: right.error,
        });
    }
}

/// Outcome of [`integrate_panels`].
#[derive(Debug, Clone, PartialEq)]
pub struct PanelIntegral<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
    /// Right end of the last panel that was integrated.
    pub reached: T,
    /// `true` when the panel contributions decayed below the stopping
    /// threshold (or the finite upper limit was reached).
    pub converged: bool,
}

/// Integrates `f` from `a` towards `b` (or `+inf` when `b` is `None`) on
/// panels of width `w0, 2 w0, 4 w0, ...`. Stops at `b`, or once three
/// consecutive panels each contribute less than `tail_rel` of the running
/// total, or after `max_panels` panels.
pub fn integrate_panels<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: Option<T>,
    w0: T,
    tail_rel: T,
    max_panels: usize,
    opts: &QuadratureOptions<T>,
) -> Result<PanelIntegral<T>> {
    let mut value = T::zero();
    let mut error = T::zero();
    let mut evaluations = 0;
    let mut lo = a;
    let mut width = w0;
    let mut quiet = 0;
    for _ in 0..max_panels {
        let mut hi = lo + width;
        let mut last = false;
        if let Some(end) = b {
            if hi >= end {
                hi = end;
                last = true;
            }
        }
        let panel = integrate(&mut f, lo, hi, opts)?;
        value = value + panel.value;
        error = error + panel.error;
        evaluations += panel.evaluations;
        lo = hi;
        if last {
            return Ok(PanelIntegral {
                value,
                error,
                evaluations,
                reached: lo,
                converged: true,
            });
        }
        if panel.value.abs() <= tail_rel * value.abs() {
            quiet += 1;
            if quiet >= 3 {
                return Ok(PanelIntegral {
                    value,
                    error,
                    evaluations,
                    reached: lo,
                    converged: true,
                });
            }
        } else {
            quiet = 0;
        }
        width = width + width;
    }
    Ok(PanelIntegral {
        value,
        error,
        evaluations,
        reached: lo,
        converged: false,
    })
}
