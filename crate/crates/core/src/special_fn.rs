//! Scalar special functions used by every capacity formula.
//!
//! Natural logarithms throughout; capacities come out in nats.

use crate::error::{CapacityError, Result};
use crate::scalar::Real;

/// A finite, non-negative real number (photon number, energy, ...).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct NonnegReal<T>(T);

impl<T: Real> NonnegReal<T> {
    pub fn new(value: T) -> Result<Self> {
        if value.is_finite() && value >= T::zero() {
            Ok(NonnegReal(value))
        } else {
            Err(CapacityError::domain(format!(
                "expected a finite non-negative value, got {value}"
            )))
        }
    }

    pub fn zero() -> Self {
        NonnegReal(T::zero())
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }
}

fn small_arg<T: Real>() -> T {
    T::lit(1e-8)
}

/// Entropy of a single-mode Gaussian thermal state with mean photon
/// number `n`: `(n+1) ln(n+1) - n ln n`, with `g(0) = 0`.
pub fn g<T: Real>(n: T) -> Result<T> {
    check_nonneg(n, "g")?;
    Ok(g_unchecked(n))
}

/// Derivative of [`g`], `ln(1 + 1/n)`; `+inf` at `n = 0`.
pub fn g_prime<T: Real>(n: T) -> Result<T> {
    check_nonneg(n, "g_prime")?;
    Ok(g_prime_unchecked(n))
}

/// Planck occupation `1 / (exp(theta * f) - 1)`.
pub fn planck_occupation<T: Real>(theta: T, f: T) -> Result<T> {
    let x = theta * f;
    if !(x > T::zero()) || x.is_nan() {
        return Err(CapacityError::domain(format!(
            "planck occupation needs theta*f > 0, got {x}"
        )));
    }
    Ok(planck_unchecked(x))
}

/// Per-mode variance of the log-likelihood of a thermal state,
/// `x (x+1) ln^2((x+1)/x)`. Bounded in `(0, 1)` on `x > 0`.
pub fn variance_f<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(CapacityError::domain(format!(
            "variance F needs x > 0, got {x}"
        )));
    }
    Ok(variance_f_unchecked(x))
}

#[inline]
pub fn positive_part<T: Real>(x: T) -> T {
    if x > T::zero() {
        x
    } else {
        T::zero()
    }
}

fn check_nonneg<T: Real>(n: T, what: &str) -> Result<()> {
    if n >= T::zero() && !n.is_nan() {
        Ok(())
    } else {
        Err(CapacityError::domain(format!(
            "{what} needs a non-negative argument, got {n}"
        )))
    }
}

/// `g` without the domain check. `n` must be non-negative.
#[inline]
pub(crate) fn g_unchecked<T: Real>(n: T) -> T {
    if n <= T::zero() {
        T::zero()
    } else if n.is_infinite() {
        n
    } else if n < small_arg() {
        // g(n) = n(1 - ln n) + n^2/2 + O(n^3)
        n * (T::one() - n.ln() + n / T::lit(2.0))
    } else {
        // ln(1+n) + n ln(1+1/n); both terms are well conditioned.
        n.ln_1p() + n * n.recip().ln_1p()
    }
}

#[inline]
pub(crate) fn g_prime_unchecked<T: Real>(n: T) -> T {
    if n <= T::zero() {
        T::infinity()
    } else if n < small_arg() {
        n.ln_1p() - n.ln()
    } else {
        n.recip().ln_1p()
    }
}

fn overflow_cutoff<T: Real>() -> T {
    let guard = T::max_value().ln() - T::lit(10.0);
    guard.min(T::lit(700.0))
}

/// `1/(e^x - 1)` for `x > 0`.
#[inline]
pub(crate) fn planck_unchecked<T: Real>(x: T) -> T {
    if x > overflow_cutoff() {
        (-x).exp()
    } else {
        x.exp_m1().recip()
    }
}

#[inline]
pub(crate) fn variance_f_unchecked<T: Real>(x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    let l = if x < small_arg() {
        x.ln_1p() - x.ln()
    } else {
        x.recip().ln_1p()
    };
    x * (x + T::one()) * l * l
}
