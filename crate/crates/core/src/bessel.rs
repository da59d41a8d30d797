//! Exponentially scaled modified Bessel function of the first kind, order zero.
//!
//! `i0_scaled(x) = exp(-|x|) I0(x)`. Kernel arguments reach 1e6 and beyond, so
//! the exponential is always folded into the caller's exponent.

use crate::real::Real;

/// Power series below this argument, asymptotic expansion above.
pub const SERIES_SWITCH: f64 = 15.0;

pub fn i0_scaled<T: Real>(x: T) -> T {
    let ax = x.abs();
    if ax <= T::lit(SERIES_SWITCH) {
        power_series(ax) * (-ax).exp()
    } else {
        asymptotic(ax)
    }
}

/// Unscaled `I0(x)`; overflows for `x > ~700` in `f64`.
pub fn i0<T: Real>(x: T) -> T {
    let ax = x.abs();
    if ax <= T::lit(SERIES_SWITCH) {
        power_series(ax)
    } else {
        asymptotic(ax) * ax.exp()
    }
}

// I0(x) = sum_k ((x/2)^(2k)) / (k!)^2, all terms positive
fn power_series<T: Real>(x: T) -> T {
    let y = x * x / T::lit(4.0);
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = 1usize;
    loop {
        let kf = T::count(k);
        term = term * y / (kf * kf);
        sum = sum + term;
        if term <= sum * T::epsilon() * T::lit(0.25) || k > 200 {
            break;
        }
        k += 1;
    }
    sum
}

// exp(-x) I0(x) ~ (2 pi x)^(-1/2) sum_k a_k x^-k, a_k = a_{k-1} (2k-1)^2 / (8k)
fn asymptotic<T: Real>(x: T) -> T {
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = 1usize;
    loop {
        let kf = T::count(k);
        let odd = T::lit(2.0) * kf - T::one();
        let next = term * odd * odd / (T::lit(8.0) * kf * x);
        // divergent series: stop at the smallest term
        if next >= term || next <= sum * T::epsilon() * T::lit(0.25) {
            break;
        }
        term = next;
        sum = sum + term;
        k += 1;
    }
    sum / (T::lit(2.0) * T::PI() * x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// exp(-x) I0(x) = (1/pi) int_0^pi exp(x (cos phi - 1)) dphi, by the
    /// trapezoidal rule (spectrally accurate for this periodic integrand),
    /// with compensated summation.
    fn oracle(x: f64, n: usize) -> f64 {
        let h = std::f64::consts::PI / n as f64;
        // cos(phi) - 1 = -2 sin^2(phi/2) avoids cancellation at small phi
        let f = |phi: f64| (-2.0 * x * (phi / 2.0).sin().powi(2)).exp();
        let mut s = 0.5 * (f(0.0) + f(std::f64::consts::PI));
        let mut c = 0.0;
        for i in 1..n {
            let y = f(i as f64 * h) - c;
            let t = s + y;
            c = (t - s) - y;
            s = t;
        }
        s * h / std::f64::consts::PI
    }

    #[test]
    fn matches_trapezoid_oracle_across_switch() {
        let xs = [
            0.0, 1e-8, 0.5, 1.0, 3.7, 10.0, 14.99, 15.0, 15.000001, 15.5, 20.0, 37.0, 100.0, 1e3,
            1e4, 1e5, 1e6, 3.3e6,
        ];
        for &x in &xs {
            let n = 4096usize.max((40.0 * f64::sqrt(x)) as usize);
            let want = oracle(x, n);
            let got = i0_scaled(x);
            let rel = ((got - want) / want).abs();
            assert!(rel < 1e-12, "x={x}: got {got}, want {want}, rel {rel}");
        }
    }

    #[test]
    fn known_values() {
        // I0(1) = 1.2660658777520084, I0(10) = 2815.716628466254
        assert!((i0(1.0f64) - 1.266_065_877_752_008_4).abs() < 1e-15);
        assert!((i0(10.0f64) / 2815.716628466254 - 1.0).abs() < 1e-14);
        assert_eq!(i0_scaled(0.0f64), 1.0);
        assert_eq!(i0_scaled(-3.0f64), i0_scaled(3.0f64));
    }

    #[test]
    fn continuous_at_switch() {
        let below = i0_scaled(SERIES_SWITCH * (1.0 - 1e-13));
        let above = i0_scaled(SERIES_SWITCH * (1.0 + 1e-13));
        assert!(((below - above) / below).abs() < 1e-12);
    }

    #[test]
    fn single_precision() {
        let v: f32 = i0_scaled(50.0f32);
        assert!(((v as f64) / i0_scaled(50.0f64) - 1.0).abs() < 1e-6);
    }
}
