//! Float helpers routed through `libm` so results do not depend on the
//! platform's C math library.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn cbrt(x: f64) -> f64 {
    libm::cbrt(x)
}

/// Ceiling of a non-negative float as an integer count, saturating.
#[inline]
pub fn ceil_count(x: f64) -> u64 {
    if !(x > 0.0) {
        return 0;
    }
    let c = ceil(x);
    if c >= u64::MAX as f64 {
        u64::MAX
    } else {
        c as u64
    }
}

/// Smallest `m` with `m^3 >= n`.
pub fn icbrt_ceil(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut m = cbrt(n as f64) as u128;
    while m > 0 && m * m * m >= n {
        m -= 1;
    }
    while m * m * m < n {
        m += 1;
    }
    m
}

/// `ceil(c * x^(2/3))` computed exactly for integers: the smallest `m` with
/// `m^3 * den >= num` where `c^3 x^2 = num / den`.
pub fn ceil_two_thirds(c: u64, x: u64, den: u64) -> u64 {
    // smallest m with m^3 * den^2 >= c^3 * x^2  (i.e. m >= c * (x/den)^(2/3))
    let num = (c as u128).pow(3) * (x as u128).pow(2);
    let den2 = (den as u128).pow(2);
    let target = num.div_ceil(den2);
    let mut m = icbrt_ceil(target);
    // icbrt_ceil on the rounded-up quotient may overshoot by one
    while m > 0 && (m - 1).pow(3) * den2 >= num {
        m -= 1;
    }
    m as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_cube_roots() {
        assert_eq!(icbrt_ceil(0), 0);
        assert_eq!(icbrt_ceil(1), 1);
        assert_eq!(icbrt_ceil(8), 2);
        assert_eq!(icbrt_ceil(9), 3);
        assert_eq!(icbrt_ceil(27_000_000_000_000), 30_000);
    }

    #[test]
    fn two_thirds_powers() {
        // 4 * 1000^(2/3) = 400 exactly; float pow lands on 399.999...
        assert_eq!(ceil_two_thirds(4, 1000, 1), 400);
        // (14000/14)^(2/3) = 100
        assert_eq!(ceil_two_thirds(1, 14_000, 14), 100);
        assert_eq!(ceil_two_thirds(1, 100_000, 14), 371);
        for c in 1..8u64 {
            for x in [10u64, 99, 1000, 12345, 100_000] {
                let f = c as f64 * powf(x as f64, 2.0 / 3.0);
                let m = ceil_two_thirds(c, x, 1);
                assert!((m as f64 - f) < 1.0 + 1e-9 && (m as f64) >= f - 1e-9, "{c} {x}");
            }
        }
    }
}
