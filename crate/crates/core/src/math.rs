// Float helpers routed through libm so the crate stays no_std.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn hypot(a: f64, b: f64) -> f64 {
    libm::hypot(a, b)
}

/// `-p log2 p` with the `0 log 0 = 0` convention.
#[inline]
pub(crate) fn xlog2x(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * log2(p)
    }
}
