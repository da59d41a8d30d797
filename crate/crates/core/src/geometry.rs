//! Detector discretizations of the scattering sphere.
//!
//! Polar grids are uniform in theta. The first cell's lower edge sits on the
//! domain's lower bound and a trailing partial cell is dropped, so every cell
//! has the same width.

use rayon::prelude::*;

use crate::amplitudes::{Component, SpinChannel};
use crate::error::{Error, Result};
use crate::kinematics::ScatterContext;
use crate::quadrature::{integrate_adaptive, DoublingRules};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridKind {
    /// Azimuthal rings of width `delta_theta`.
    Rings,
    /// Square pixels of solid angle `delta_theta^2` covering the sphere.
    SpherePixels,
    /// Pixels along one meridian (fixed azimuth).
    Meridian,
    /// Azimuthal pixels on the half ring `theta = pi/2, 0 <= phi < pi`.
    EquatorRing,
}

/// A uniform one-dimensional detector grid. For `EquatorRing` the coordinate
/// is the azimuth; otherwise it is the polar angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularGrid<T> {
    pub kind: GridKind,
    pub theta_lo: T,
    pub theta_hi: T,
    pub n_cells: usize,
    /// Cell width. Equals the context pixel width except for fitted grids.
    pub delta_theta: T,
}

impl<T: Real> AngularGrid<T> {
    /// Cells of width exactly `width` starting at `lo`; the partial cell below
    /// `hi` is dropped.
    pub fn uniform(kind: GridKind, lo: T, hi: T, width: T) -> Result<Self> {
        let span = hi - lo;
        if !(span > T::zero()) {
            return Err(Error::domain("angular domain", "lo < hi", span.as_f64()));
        }
        if !(width > T::zero()) {
            return Err(Error::domain("pixel width", "> 0", width.as_f64()));
        }
        let n = cell_count(span, width);
        if n == 0 {
            return Err(Error::TooFewCells {
                delta_theta: width.as_f64(),
                span: span.as_f64(),
            });
        }
        Ok(AngularGrid {
            kind,
            theta_lo: lo,
            theta_hi: hi,
            n_cells: n,
            delta_theta: width,
        })
    }

    /// Same cell count as [`AngularGrid::uniform`], with the width stretched
    /// (by less than one part in `n`) so the cells tile `[lo, hi]` exactly.
    pub fn fitted(kind: GridKind, lo: T, hi: T, width: T) -> Result<Self> {
        let mut grid = Self::uniform(kind, lo, hi, width)?;
        grid.delta_theta = (hi - lo) / T::count(grid.n_cells);
        Ok(grid)
    }

    pub fn span(&self) -> T {
        self.theta_hi - self.theta_lo
    }

    /// Lower and upper edge of cell `i`.
    pub fn edges(&self, i: usize) -> (T, T) {
        let lo = self.theta_lo + self.delta_theta * T::count(i);
        let hi = if i + 1 == self.n_cells && self.covers_domain() {
            self.theta_hi
        } else {
            lo + self.delta_theta
        };
        (lo, hi)
    }

    pub fn center(&self, i: usize) -> T {
        let (a, b) = self.edges(i);
        (a + b) / T::lit(2.0)
    }

    /// Upper edge of the last cell.
    pub fn covered_hi(&self) -> T {
        if self.covers_domain() {
            self.theta_hi
        } else {
            self.theta_lo + self.delta_theta * T::count(self.n_cells)
        }
    }

    fn covers_domain(&self) -> bool {
        let tiled = self.delta_theta * T::count(self.n_cells);
        (tiled - self.span()).abs() <= self.span() * T::lit(1e-12)
    }

    /// The `count` consecutive cells starting at `start`, as a grid of their own.
    pub fn sub_grid(&self, start: usize, count: usize) -> Result<Self> {
        if count == 0 || start + count > self.n_cells {
            return Err(Error::EmptySelection);
        }
        let lo = self.edges(start).0;
        let hi = self.edges(start + count - 1).1;
        Ok(AngularGrid {
            kind: self.kind,
            theta_lo: lo,
            theta_hi: hi,
            n_cells: count,
            delta_theta: self.delta_theta,
        })
    }
}

// floor(span / width), guarding against an exact multiple landing one ulp low
fn cell_count<T: Real>(span: T, width: T) -> usize {
    let ratio = span / width;
    let rounded = ratio.round();
    let n = if (ratio - rounded).abs() <= ratio * T::lit(1e-12) {
        rounded
    } else {
        ratio.floor()
    };
    n.to_usize().unwrap_or(0)
}

/// Polar domain of a channel: `[eps, pi - eps]` for distinguishable
/// particles, the closed half shell `[eps, pi/2]` otherwise.
pub fn channel_domain<T: Real>(ctx: &ScatterContext<T>, channel: SpinChannel) -> (T, T) {
    if channel.is_half_shell() {
        (ctx.epsilon, T::FRAC_PI_2())
    } else {
        (ctx.epsilon, T::PI() - ctx.epsilon)
    }
}

/// Ring detectors of width `delta_theta` starting at the minimum angle.
pub fn ring_grid<T: Real>(ctx: &ScatterContext<T>, channel: SpinChannel) -> Result<AngularGrid<T>> {
    let (lo, hi) = channel_domain(ctx, channel);
    AngularGrid::uniform(GridKind::Rings, lo, hi, ctx.delta_theta)
}

/// Half-shell rings whose edges land on both `eps` and `pi/2`, so the top
/// cell borders the right angle. Post-selections near `pi/2` use this grid.
pub fn fitted_half_shell<T: Real>(ctx: &ScatterContext<T>) -> Result<AngularGrid<T>> {
    AngularGrid::fitted(
        GridKind::Rings,
        ctx.epsilon,
        T::FRAC_PI_2(),
        ctx.delta_theta,
    )
}

/// `N_r = floor(pi / delta_theta)` azimuthal pixels on the equator half ring.
pub fn equator_ring<T: Real>(delta_theta: T) -> Result<AngularGrid<T>> {
    AngularGrid::uniform(GridKind::EquatorRing, T::zero(), T::PI(), delta_theta)
}

/// Solid angle between polar angles `lo` and `hi`.
pub fn solid_angle<T: Real>(lo: T, hi: T) -> T {
    T::lit(2.0) * T::PI() * (lo.cos() - hi.cos())
}

/// `floor(solid_angle / delta_theta^2)`, the number of square pixels.
pub fn pixel_count<T: Real>(solid_angle: T, delta_theta: T) -> u64 {
    (solid_angle / (delta_theta * delta_theta))
        .floor()
        .to_u64()
        .unwrap_or(0)
}

/// Pixels covering the accessible sphere, `floor(4 pi cos(eps) / delta_theta^2)`.
pub fn sphere_pixel_count<T: Real>(ctx: &ScatterContext<T>) -> u64 {
    let omega = T::lit(4.0) * T::PI() * ctx.epsilon.cos();
    pixel_count(omega, ctx.delta_theta)
}

/// Number of square pixels in the ring at `theta`: `2 pi sin(theta) / delta_theta`.
pub fn ring_weight<T: Real>(theta: T, delta_theta: T) -> T {
    T::lit(2.0) * T::PI() * theta.sin() / delta_theta
}

/// Integrates `2 pi density(theta) sin(theta)` over each grid cell.
#[derive(Debug, Clone)]
pub struct CellIntegrator<T> {
    rules: DoublingRules<T>,
}

impl<T: Real> Default for CellIntegrator<T> {
    fn default() -> Self {
        // order 8, doubled up to 256, stable to 1e-10 relative
        CellIntegrator {
            rules: DoublingRules::new(8, 6, T::lit(1e-10)),
        }
    }
}

impl<T: Real> CellIntegrator<T> {
    pub fn integrate<F: Fn(T) -> T>(&self, density: F, lo: T, hi: T) -> Result<T> {
        let two_pi = T::lit(2.0) * T::PI();
        let integrand = |t: T| density(t) * t.sin();
        let v = match self.rules.try_integrate(&integrand, lo, hi)? {
            Some(v) => v,
            // strongly peaked cell (just above a tiny cutoff angle)
            None => integrate_adaptive(integrand, lo, hi, T::lit(1e-12), T::lit(1e-15))?.value,
        };
        if !v.is_finite() {
            return Err(Error::NonFinite {
                context: "cell probability",
            });
        }
        Ok(two_pi * v)
    }

    /// Cell integrals of one component over the whole grid, computed in
    /// parallel and returned in cell order.
    pub fn component_weights(
        &self,
        grid: &AngularGrid<T>,
        k: T,
        component: Component,
    ) -> Result<Vec<T>> {
        (0..grid.n_cells)
            .into_par_iter()
            .map(|i| {
                let (a, b) = grid.edges(i);
                self.integrate(|t| component.density(t, k), a, b)
            })
            .collect()
    }
}

/// Unnormalized probability `2 pi int p(theta) sin(theta) dtheta` of cell `i`.
pub fn cell_probability<T: Real>(
    grid: &AngularGrid<T>,
    i: usize,
    ctx: &ScatterContext<T>,
    channel: SpinChannel,
) -> Result<T> {
    if i >= grid.n_cells {
        return Err(Error::domain("cell index", "< n_cells", i as f64));
    }
    let (a, b) = grid.edges(i);
    let integrator = CellIntegrator::default();
    let mut total = T::zero();
    for c in channel.components() {
        total = total + integrator.integrate(|t| c.density(t, ctx.wave_number), a, b)?;
    }
    Ok(total)
}
