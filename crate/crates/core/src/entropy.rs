//! Shannon entropies of detector outcomes, in bits.
//!
//! Two estimators are provided for each geometry: the discrete entropy of the
//! cell probabilities, and the continuous (Jaynes) form with the invariant
//! measure set to a uniform density over the domain.

use rayon::prelude::*;

use crate::amplitudes::SpinChannel;
use crate::error::{Error, Result};
use crate::geometry::{
    channel_domain, pixel_count, ring_grid, ring_weight, solid_angle, AngularGrid, CellIntegrator,
};
use crate::kinematics::ScatterContext;
use crate::quadrature::integrate_adaptive_split;
use crate::real::{ordered_sum, Real};

/// Tolerance on `sum p = 1` accepted by [`ProbabilityVector::new`].
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Non-negative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector<T> {
    p: Vec<T>,
}

impl<T: Real> ProbabilityVector<T> {
    pub fn new(p: Vec<T>) -> Result<Self> {
        check_weights(&p)?;
        let sum = ordered_sum(p.iter().copied());
        if (sum - T::one()).abs() > T::lit(NORMALIZATION_TOL) {
            return Err(Error::NotNormalized { sum: sum.as_f64() });
        }
        Ok(ProbabilityVector { p })
    }

    /// Divides by the total. Fails if every weight is zero.
    pub fn from_weights(mut w: Vec<T>) -> Result<Self> {
        check_weights(&w)?;
        let sum = ordered_sum(w.iter().copied());
        if !(sum > T::zero()) {
            return Err(Error::NotNormalized { sum: sum.as_f64() });
        }
        for x in &mut w {
            *x = *x / sum;
        }
        Ok(ProbabilityVector { p: w })
    }

    pub fn as_slice(&self) -> &[T] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn into_inner(self) -> Vec<T> {
        self.p
    }
}

fn check_weights<T: Real>(w: &[T]) -> Result<()> {
    for &x in w {
        if !x.is_finite() {
            return Err(Error::NonFinite {
                context: "probability weight",
            });
        }
        if x < T::zero() {
            return Err(Error::domain("probability weight", ">= 0", x.as_f64()));
        }
    }
    Ok(())
}

/// `-sum p log2 p`, with `0 log 0 = 0`.
pub fn shannon_discrete<T: Real>(p: &ProbabilityVector<T>) -> T {
    // adding +0 turns a -0 from a single certain outcome into +0
    -ordered_sum(p.as_slice().iter().map(|&x| xlog2x(x))) + T::zero()
}

#[inline]
fn xlog2x<T: Real>(x: T) -> T {
    if x > T::zero() {
        x * x.log2()
    } else {
        T::zero()
    }
}

/// Unnormalized cell weights of every component of a channel on one grid.
#[derive(Debug, Clone)]
pub struct ChannelWeights<T> {
    pub channel: SpinChannel,
    pub grid: AngularGrid<T>,
    /// One vector per component, in cell order.
    pub components: Vec<Vec<T>>,
}

impl<T: Real> ChannelWeights<T> {
    pub fn compute(
        ctx: &ScatterContext<T>,
        channel: SpinChannel,
        grid: &AngularGrid<T>,
    ) -> Result<Self> {
        let integ = CellIntegrator::default();
        let components = channel
            .components()
            .iter()
            .map(|&c| integ.component_weights(grid, ctx.wave_number, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChannelWeights {
            channel,
            grid: *grid,
            components,
        })
    }

    pub fn total(&self) -> T {
        ordered_sum(self.components.iter().flat_map(|c| c.iter().copied()))
    }

    /// Jointly normalized weights of all components, concatenated.
    pub fn joint_probabilities(&self) -> Result<ProbabilityVector<T>> {
        let all: Vec<T> = self.components.iter().flatten().copied().collect();
        ProbabilityVector::from_weights(all)
    }

    /// Summed over components, per cell.
    pub fn cell_totals(&self) -> Vec<T> {
        (0..self.grid.n_cells)
            .map(|i| ordered_sum(self.components.iter().map(|c| c[i])))
            .collect()
    }
}

/// An entropy together with the grid size it was evaluated on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyValue<T> {
    pub bits: T,
    /// `bits` minus the channel's antisymmetrization bit.
    pub modified: T,
    /// Number of detector cells (rings or pixels).
    pub cells: u64,
}

impl<T: Real> EntropyValue<T> {
    fn with_offset(bits: T, channel: SpinChannel, cells: u64) -> Self {
        EntropyValue {
            bits,
            modified: bits - T::lit(channel.pauli_offset()),
            cells,
        }
    }
}

/// Discrete ring entropy: offset plus the Shannon entropy of all component
/// cell probabilities.
pub fn ring_entropy<T: Real>(
    ctx: &ScatterContext<T>,
    channel: SpinChannel,
) -> Result<EntropyValue<T>> {
    let grid = ring_grid(ctx, channel)?;
    ring_entropy_on(ctx, channel, &grid)
}

pub fn ring_entropy_on<T: Real>(
    ctx: &ScatterContext<T>,
    channel: SpinChannel,
    grid: &AngularGrid<T>,
) -> Result<EntropyValue<T>> {
    let w = ChannelWeights::compute(ctx, channel, grid)?;
    ring_entropy_from(&w)
}

pub fn ring_entropy_from<T: Real>(w: &ChannelWeights<T>) -> Result<EntropyValue<T>> {
    let p = w.joint_probabilities()?;
    let h = shannon_discrete(&p);
    Ok(EntropyValue::with_offset(
        T::lit(w.channel.pauli_offset()) + h,
        w.channel,
        w.grid.n_cells as u64,
    ))
}

/// Sphere entropy from pixels grouped by ring: all `m_i` pixels of ring `i`
/// share its probability equally, so `S = offset + sum P_i log2(m_i / P_i)`.
pub fn sphere_pixel_entropy<T: Real>(
    ctx: &ScatterContext<T>,
    channel: SpinChannel,
) -> Result<EntropyValue<T>> {
    let grid = ring_grid(ctx, channel)?;
    let w = ChannelWeights::compute(ctx, channel, &grid)?;
    sphere_pixel_entropy_from(ctx, &w)
}

pub fn sphere_pixel_entropy_from<T: Real>(
    ctx: &ScatterContext<T>,
    w: &ChannelWeights<T>,
) -> Result<EntropyValue<T>> {
    let total = w.total();
    if !(total > T::zero()) {
        return Err(Error::NotNormalized {
            sum: total.as_f64(),
        });
    }
    let grid = &w.grid;
    let log_m: Vec<T> = (0..grid.n_cells)
        .map(|i| ring_weight(grid.center(i), ctx.delta_theta).log2())
        .collect();
    let h = ordered_sum(w.components.iter().flat_map(|c| {
        c.iter().zip(&log_m).map(|(&x, &lm)| {
            let p = x / total;
            if p > T::zero() {
                p * (lm - p.log2())
            } else {
                T::zero()
            }
        })
    }));
    let (lo, hi) = channel_domain(ctx, w.channel);
    let pixels = pixel_count(solid_angle(lo, hi), ctx.delta_theta);
    Ok(EntropyValue::with_offset(
        T::lit(w.channel.pauli_offset()) + h,
        w.channel,
        pixels,
    ))
}

const JAYNES_REL_TOL: f64 = 1e-8;
const JAYNES_MIN_WIDTH: f64 = 1e-12;
const JAYNES_PIECES: usize = 24;

// geometric breakpoints resolve the 1/theta^3 forward peak
fn breakpoints<T: Real>(lo: T, hi: T) -> Vec<T> {
    let ratio = hi / lo;
    let mut b: Vec<T> = (0..=JAYNES_PIECES)
        .map(|j| lo * ratio.powf(T::count(j) / T::count(JAYNES_PIECES)))
        .collect();
    b[0] = lo;
    b[JAYNES_PIECES] = hi;
    b
}

// Z = sum_c int w_c and J = sum_c int w_c log2(scale(theta) w_c),
// where w_c = 2 pi p_c(theta) sin(theta).
fn jaynes_integrals<T: Real, S: Fn(T) -> T + Sync>(
    ctx: &ScatterContext<T>,
    channel: SpinChannel,
    scale: S,
) -> Result<(T, T)> {
    let (lo, hi) = channel_domain(ctx, channel);
    let breaks = breakpoints(lo, hi);
    let two_pi = T::lit(2.0) * T::PI();
    let k = ctx.wave_number;
    let tol = T::lit(JAYNES_REL_TOL);
    let min_w = T::lit(JAYNES_MIN_WIDTH);
    let mut z = T::zero();
    let mut j = T::zero();
    for &c in channel.components() {
        let w = |t: T| two_pi * c.density(t, k) * t.sin();
        z = z + integrate_adaptive_split(w, &breaks, tol, min_w)?.value;
        let wl = |t: T| {
            let x = w(t);
            if x > T::zero() {
                x * (scale(t) * x).log2()
            } else {
                T::zero()
            }
        };
        j = j + integrate_adaptive_split(wl, &breaks, tol, min_w)?.value;
    }
    if !(z > T::zero()) {
        return Err(Error::NotNormalized { sum: z.as_f64() });
    }
    Ok((z, j))
}

/// Continuous ring entropy with a uniform invariant measure on the domain of
/// length `lambda`: `S = offset - sum_c int P_c log2(lambda P_c) + log2 N`.
pub fn ring_entropy_jaynes<T: Real>(
    ctx: &ScatterContext<T>,
    channel: SpinChannel,
) -> Result<EntropyValue<T>> {
    let (lo, hi) = channel_domain(ctx, channel);
    let lambda = hi - lo;
    let n = ring_grid(ctx, channel)?.n_cells;
    let (z, j) = jaynes_integrals(ctx, channel, |_| lambda)?;
    // int P log2(lambda P) = J / Z - log2 Z
    let cross = j / z - z.log2();
    let bits = T::lit(channel.pauli_offset()) - cross + T::count(n).log2();
    Ok(EntropyValue::with_offset(bits, channel, n as u64))
}

/// Continuous sphere entropy with a uniform measure over the solid angle
/// `omega` of the domain: `S = offset - sum_c int P_c log2(omega p_c) + log2 M`.
///
/// Only meaningful when the pixel width is well below the cutoff angle.
pub fn sphere_entropy_jaynes<T: Real>(
    ctx: &ScatterContext<T>,
    channel: SpinChannel,
) -> Result<EntropyValue<T>> {
    let (lo, hi) = channel_domain(ctx, channel);
    let omega = solid_angle(lo, hi);
    let m = pixel_count(omega, ctx.delta_theta);
    if m == 0 {
        return Err(Error::TooFewCells {
            delta_theta: ctx.delta_theta.as_f64(),
            span: (hi - lo).as_f64(),
        });
    }
    let two_pi = T::lit(2.0) * T::PI();
    let (z, j) = jaynes_integrals(ctx, channel, |t: T| omega / (two_pi * t.sin()))?;
    let cross = j / z - z.log2();
    let m_t = T::from_u64(m).unwrap_or_else(T::infinity);
    let bits = T::lit(channel.pauli_offset()) - cross + m_t.log2();
    Ok(EntropyValue::with_offset(bits, channel, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Rings,
    Sphere,
}

impl std::str::FromStr for Geometry {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ring" | "rings" => Ok(Geometry::Rings),
            "sphere" => Ok(Geometry::Sphere),
            other => Err(format!("unknown geometry '{other}' (expected ring|sphere)")),
        }
    }
}

/// One row of an energy sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint<T> {
    pub energy_ev: T,
    pub epsilon: T,
    pub delta_theta: T,
    pub cells: u64,
    /// Discrete entropy (ring sum or ring-grouped pixel sum).
    pub discrete: T,
    pub modified: T,
    /// Continuous estimate on the same geometry.
    pub jaynes: T,
}

pub fn entropy_point<T: Real>(
    energy_ev: T,
    packet_nm: T,
    k_scale: T,
    channel: SpinChannel,
    geometry: Geometry,
) -> Result<SweepPoint<T>> {
    let ctx = ScatterContext::new(energy_ev, packet_nm, k_scale)?;
    let (discrete, jaynes) = match geometry {
        Geometry::Rings => (
            ring_entropy(&ctx, channel)?,
            ring_entropy_jaynes(&ctx, channel)?,
        ),
        Geometry::Sphere => (
            sphere_pixel_entropy(&ctx, channel)?,
            sphere_entropy_jaynes(&ctx, channel)?,
        ),
    };
    Ok(SweepPoint {
        energy_ev,
        epsilon: ctx.epsilon,
        delta_theta: ctx.delta_theta,
        cells: discrete.cells,
        discrete: discrete.bits,
        modified: discrete.modified,
        jaynes: jaynes.bits,
    })
}

/// Entropies over a list of energies, evaluated in parallel and returned in
/// input order. A failing energy yields an error row without stopping the rest.
pub fn sweep_energies<T: Real>(
    energies_ev: &[T],
    packet_nm: T,
    k_scale: T,
    channel: SpinChannel,
    geometry: Geometry,
) -> Vec<Result<SweepPoint<T>>> {
    energies_ev
        .par_iter()
        .map(|&e| entropy_point(e, packet_nm, k_scale, channel, geometry))
        .collect()
}

/// True when successive values never increase.
pub fn is_non_increasing<T: Real>(values: &[T]) -> bool {
    values.windows(2).all(|w| w[1] <= w[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::FULL_ENERGY_K_SCALE;
    use proptest::prelude::*;

    #[test]
    fn shannon_examples() {
        let u = ProbabilityVector::new(vec![0.25f64; 4]).unwrap();
        assert!((shannon_discrete(&u) - 2.0).abs() < 1e-15);
        let d = ProbabilityVector::new(vec![1.0f64, 0.0, 0.0]).unwrap();
        assert_eq!(shannon_discrete(&d), 0.0);
        assert!(shannon_discrete(&d).is_sign_positive());
        let h = ProbabilityVector::new(vec![0.5f64, 0.5]).unwrap();
        assert!((shannon_discrete(&h) - 1.0).abs() < 1e-15);
        let n = 1000;
        let big = ProbabilityVector::new(vec![1.0 / n as f64; n]).unwrap();
        assert!((shannon_discrete(&big) - (n as f64).log2()).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_vectors() {
        assert!(matches!(
            ProbabilityVector::new(vec![0.5f64, 0.4]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(ProbabilityVector::new(vec![1.5f64, -0.5]).is_err());
        assert!(ProbabilityVector::new(vec![f64::NAN, 1.0]).is_err());
        assert!(ProbabilityVector::<f64>::from_weights(vec![0.0, 0.0]).is_err());
        let p = ProbabilityVector::from_weights(vec![1.0f64, 3.0]).unwrap();
        assert_eq!(p.as_slice(), &[0.25, 0.75]);
    }

    #[test]
    fn single_precision_entropy() {
        let p = ProbabilityVector::new(vec![0.5f32, 0.25, 0.25]).unwrap();
        assert!((shannon_discrete(&p) - 1.5).abs() < 1e-6);
    }

    #[test]
    fn spinless_ring_entropy_at_reference_energies() {
        let cases = [(1.0, 3.5516), (100.0, 0.7420), (1e4, 0.02835)];
        for (e, want) in cases {
            let ctx = ScatterContext::new(e, 50.0, FULL_ENERGY_K_SCALE).unwrap();
            let s = ring_entropy(&ctx, SpinChannel::Spinless).unwrap();
            assert!(
                (s.bits - want).abs() < 2e-3 * want.max(1.0),
                "{e} eV: {}",
                s.bits
            );
            assert_eq!(s.modified, s.bits);
        }
    }

    #[test]
    fn distinguishable_matches_spinless() {
        let ctx = ScatterContext::new(20.0, 50.0, FULL_ENERGY_K_SCALE).unwrap();
        let a = ring_entropy(&ctx, SpinChannel::Spinless).unwrap();
        let b = ring_entropy(&ctx, SpinChannel::DistinguishableBySpinFilter).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_preserves_order_and_reports_errors() {
        let es = [1.0, 10.0, -1.0, 100.0];
        let rows = sweep_energies(&es, 50.0, 1.0, SpinChannel::Spinless, Geometry::Rings);
        assert_eq!(rows.len(), 4);
        assert!(rows[2].is_err());
        let ok: Vec<f64> = rows
            .iter()
            .filter_map(|r| r.as_ref().ok())
            .map(|p| p.discrete)
            .collect();
        assert_eq!(ok.len(), 3);
        assert!(is_non_increasing(&ok));
        for (r, e) in rows.iter().zip(es) {
            if let Ok(p) = r {
                assert_eq!(p.energy_ev, e);
            }
        }
    }

    #[test]
    fn sphere_pixel_entropy_exceeds_ring_entropy() {
        let ctx = ScatterContext::new(1.0, 50.0, FULL_ENERGY_K_SCALE).unwrap();
        let ring = ring_entropy(&ctx, SpinChannel::Spinless).unwrap();
        let sphere = sphere_pixel_entropy(&ctx, SpinChannel::Spinless).unwrap();
        assert!(sphere.bits > ring.bits + 3.0);
        assert!(sphere.bits <= (sphere.cells as f64).log2());
    }

    #[test]
    fn jaynes_ring_close_to_discrete_for_wide_cutoff() {
        let ctx = ScatterContext::new(1.0, 1000.0, FULL_ENERGY_K_SCALE).unwrap();
        let d = ring_entropy(&ctx, SpinChannel::Spinless).unwrap();
        let j = ring_entropy_jaynes(&ctx, SpinChannel::Spinless).unwrap();
        assert_eq!(d.cells, j.cells);
        assert!((d.bits - j.bits).abs() < 0.02, "{} {}", d.bits, j.bits);
    }

    #[test]
    fn geometry_parsing() {
        assert_eq!("ring".parse::<Geometry>().unwrap(), Geometry::Rings);
        assert_eq!("Sphere".parse::<Geometry>().unwrap(), Geometry::Sphere);
        assert!("cube".parse::<Geometry>().is_err());
    }

    proptest! {
        #[test]
        fn entropy_bounded_by_log_n(w in prop::collection::vec(0.0f64..1.0, 1..64)) {
            prop_assume!(w.iter().sum::<f64>() > 1e-9);
            let n = w.len() as f64;
            let p = ProbabilityVector::from_weights(w).unwrap();
            let h = shannon_discrete(&p);
            prop_assert!(h >= -1e-12);
            prop_assert!(h <= n.log2() + 1e-9);
        }

        #[test]
        fn entropy_permutation_invariant(w in prop::collection::vec(0.001f64..1.0, 2..32), seed in 0u64..1000) {
            let p = ProbabilityVector::from_weights(w.clone()).unwrap();
            let mut v = w;
            let r = (seed as usize) % v.len();
            v.rotate_left(r);
            v.reverse();
            let q = ProbabilityVector::from_weights(v).unwrap();
            prop_assert!((shannon_discrete(&p) - shannon_discrete(&q)).abs() < 1e-12);
        }
    }
}
