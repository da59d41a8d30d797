//! Gauss–Legendre and adaptive Gauss–Kronrod integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::real::{ordered_sum, Real};

/// Nodes and weights of an n-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Computes the rule by Newton iteration on `P_n` (in `f64`).
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre {
            nodes: nodes.into_iter().map(T::lit).collect(),
            weights: weights.into_iter().map(T::lit).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Applies the rule on `[a, b]`.
    pub fn integrate<F: Fn(T) -> T>(&self, f: F, a: T, b: T) -> T {
        let two = T::lit(2.0);
        let mid = (a + b) / two;
        let half = (b - a) / two;
        let s = ordered_sum(
            self.nodes
                .iter()
                .zip(&self.weights)
                .map(|(&x, &w)| w * f(mid + half * x)),
        );
        s * half
    }

    /// Composite rule with `panels` equal sub-intervals.
    pub fn integrate_composite<F: Fn(T) -> T>(&self, f: &F, a: T, b: T, panels: usize) -> T {
        let h = (b - a) / T::count(panels);
        ordered_sum((0..panels).map(|p| {
            let lo = a + h * T::count(p);
            let hi = if p + 1 == panels { b } else { lo + h };
            self.integrate(f, lo, hi)
        }))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates on `[a, b]` with Gauss–Legendre of order `start_order`, doubling
/// the order until two successive results agree to `rel_tol`.
pub fn integrate_doubling<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    start_order: usize,
    rel_tol: T,
) -> Result<T> {
    let mut order = start_order.max(2);
    let mut prev = GaussLegendre::<T>::new(order).integrate(&f, a, b);
    while order < 512 {
        order *= 2;
        let next = GaussLegendre::<T>::new(order).integrate(&f, a, b);
        if !next.is_finite() {
            return Err(Error::NonFinite {
                context: "Gauss-Legendre integral",
            });
        }
        if (next - prev).abs() <= rel_tol * next.abs() || next == prev {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

/// Precomputed Gauss–Legendre rules at orders `base, 2 base, 4 base, ...`
/// for repeated per-cell integration.
#[derive(Debug, Clone)]
pub struct DoublingRules<T> {
    rules: Vec<GaussLegendre<T>>,
    rel_tol: T,
}

impl<T: Real> DoublingRules<T> {
    pub fn new(base: usize, levels: usize, rel_tol: T) -> Self {
        let rules = (0..levels.max(2))
            .map(|l| GaussLegendre::new(base << l))
            .collect();
        DoublingRules { rules, rel_tol }
    }

    /// Same contract as [`integrate_doubling`].
    pub fn integrate<F: Fn(T) -> T>(&self, f: F, a: T, b: T) -> Result<T> {
        match self.try_integrate(&f, a, b)? {
            Some(v) => Ok(v),
            None => Ok(self.rules[self.rules.len() - 1].integrate(&f, a, b)),
        }
    }

    /// `None` when the highest order still disagrees with its predecessor.
    pub fn try_integrate<F: Fn(T) -> T>(&self, f: F, a: T, b: T) -> Result<Option<T>> {
        let mut prev = self.rules[0].integrate(&f, a, b);
        for rule in &self.rules[1..] {
            let next = rule.integrate(&f, a, b);
            if !next.is_finite() {
                return Err(Error::NonFinite {
                    context: "cell integral",
                });
            }
            if (next - prev).abs() <= self.rel_tol * next.abs() || next == prev {
                return Ok(Some(next));
            }
            prev = next;
        }
        Ok(None)
    }
}

// Gauss-Kronrod 7/15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7/K15 panel: returns (Kronrod estimate, error estimate).
fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let two = T::lit(2.0);
    let c = (a + b) / two;
    let h = (b - a) / two;
    let fc = f(c);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = h * T::lit(XGK[j]);
        let s = f(c - dx) + f(c + dx);
        kron = kron + T::lit(WGK[j]) * s;
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            // deterministic tie-break on position
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive<T> {
    pub value: T,
    pub error: T,
    pub panels: usize,
}

/// Globally adaptive G7/K15 integration: bisects the panel with the largest
/// error estimate until the total error falls below `rel_tol * |I|`. Panels
/// narrower than `min_width` are not split further.
pub fn integrate_adaptive<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    rel_tol: T,
    min_width: T,
) -> Result<Adaptive<T>> {
    integrate_adaptive_split(f, &[a, b], rel_tol, min_width)
}

/// As [`integrate_adaptive`] but starting from the given breakpoints.
pub fn integrate_adaptive_split<T: Real, F: Fn(T) -> T>(
    f: F,
    breaks: &[T],
    rel_tol: T,
    min_width: T,
) -> Result<Adaptive<T>> {
    const MAX_PANELS: usize = 20_000;
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        let (value, error) = gk15(&f, w[0], w[1]);
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }
    let total = |h: &BinaryHeap<Panel<T>>| {
        let mut panels: Vec<&Panel<T>> = h.iter().collect();
        panels.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
        (
            ordered_sum(panels.iter().map(|p| p.value)),
            ordered_sum(panels.iter().map(|p| p.error)),
        )
    };
    let (mut value, mut error) = total(&heap);
    while error > rel_tol * value.abs() && heap.len() < MAX_PANELS {
        let worst = match heap.peek() {
            Some(p) if (p.b - p.a) > min_width => heap.pop().expect("peeked"),
            _ => break,
        };
        let mid = (worst.a + worst.b) / T::lit(2.0);
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        value = value - worst.value + (v1 + v2);
        error = error - worst.error + (e1 + e2);
    }
    let (value, error) = total(&heap);

    if !value.is_finite() {
        return Err(Error::NonFinite {
            context: "adaptive integral",
        });
    }
    Ok(Adaptive {
        value,
        error,
        panels: heap.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rules_integrate_polynomials_exactly() {
        for n in [1usize, 2, 5, 8, 16, 33] {
            let rule = GaussLegendre::<f64>::new(n);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "n={n}");
            let deg = 2 * n - 1;
            let exact = 1.0 / (deg as f64 + 1.0) * (1.0 - (-1.0f64).powi(deg as i32 + 1));
            let got = rule.integrate(|x| x.powi(deg as i32), -1.0, 1.0);
            assert!((got - exact).abs() < 1e-12, "n={n} {got} {exact}");
        }
    }

    #[test]
    fn doubling_converges_on_smooth_integrand() {
        let v = integrate_doubling(|x: f64| x.exp(), 0.0, 1.0, 8, 1e-12).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
        let rules = DoublingRules::new(8, 6, 1e-12);
        let v = rules.integrate(|x: f64| x.sin(), 0.0, 3.0).unwrap();
        assert!((v - (1.0 - 3f64.cos())).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        // int_eps^pi theta^-3 dtheta
        let eps = 1e-3;
        let exact = 0.5 * (1.0 / (eps * eps) - 1.0 / (std::f64::consts::PI.powi(2)));
        let r = integrate_adaptive(|t: f64| t.powi(-3), eps, std::f64::consts::PI, 1e-10, 1e-12)
            .unwrap();
        assert!(((r.value - exact) / exact).abs() < 1e-10, "{:?}", r);
    }

    #[test]
    fn adaptive_log_singular_endpoint() {
        // int_0^1 x ln x = -1/4 ; integrand -> 0 at the endpoint
        let r = integrate_adaptive(
            |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 },
            0.0,
            1.0,
            1e-10,
            1e-14,
        )
        .unwrap();
        assert!((r.value + 0.25).abs() < 1e-10);
    }

    #[test]
    fn composite_rule() {
        let rule = GaussLegendre::<f64>::new(4);
        let v = rule.integrate_composite(&|x: f64| (-x * x).exp(), -6.0, 6.0, 24);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }
}
