//! Floating-point helpers over `libm`, so the crate stays `no_std`.

/// Natural logarithm; `ln(0) = -inf`.
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// Exponential.
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

/// Square root.
#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// Absolute value.
#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Floor.
#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// Ceiling.
#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

/// Round half away from zero.
#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

/// `base^e`.
#[inline]
pub fn powf(base: f64, e: f64) -> f64 {
    libm::pow(base, e)
}

/// `2^-k` for a non-negative integer exponent.
#[inline]
pub fn pow2_neg(k: usize) -> f64 {
    libm::ldexp(1.0, -(k.min(2000) as i32))
}

/// `2^k` for a non-negative integer exponent.
#[inline]
pub fn pow2(k: usize) -> f64 {
    libm::ldexp(1.0, k.min(2000) as i32)
}

/// `log(e^a + e^b)` without overflow.
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::INFINITY {
        return hi;
    }
    hi + libm::log1p(libm::exp(lo - hi))
}

/// `log Σ e^{x_i}`; `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi.is_infinite() {
        return hi;
    }
    let s: f64 = xs.iter().map(|&x| libm::exp(x - hi)).sum();
    hi + libm::log(s)
}
