//! Spin-resolved Shannon entropies and post-selection.
//!
//! For indistinguishable electrons each detector cell contributes two
//! outcomes of equal weight (the detected electron and its partner), so the
//! entropy carries one extra bit: `S = 1 + H(w)`. The modified entropy drops it.

use rayon::prelude::*;

use crate::amplitudes::{Component, SpinChannel};
use crate::entropy::{shannon_discrete, ProbabilityVector};
use crate::error::{Error, Result};
use crate::geometry::{equator_ring, fitted_half_shell, ring_grid, AngularGrid, CellIntegrator};
use crate::kinematics::ScatterContext;
use crate::real::{ordered_sum, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinEntropyResult<T> {
    pub channel: SpinChannel,
    pub bits: T,
    /// `bits - 1` for the indistinguishable channels, `bits` otherwise.
    pub modified: T,
    pub grid: AngularGrid<T>,
    /// Set when the channel has no weight on the grid; `bits` is then reported as 0.
    pub zero_weight: bool,
}

impl<T: Real> SpinEntropyResult<T> {
    fn from_h(channel: SpinChannel, h: T, grid: AngularGrid<T>, zero_weight: bool) -> Self {
        let offset = T::lit(channel.pauli_offset());
        let bits = if zero_weight { T::zero() } else { offset + h };
        SpinEntropyResult {
            channel,
            bits,
            modified: if zero_weight {
                T::zero()
            } else {
                bits - offset
            },
            grid,
            zero_weight,
        }
    }
}

fn require_half_shell<T: Real>(ctx: &ScatterContext<T>, grid: &AngularGrid<T>) -> Result<()> {
    let tol = T::lit(1e-12);
    if grid.theta_lo < ctx.epsilon * (T::one() - tol) || grid.covered_hi() > T::FRAC_PI_2() + tol {
        return Err(Error::domain(
            "grid upper edge",
            "inside the half shell [eps, pi/2]",
            grid.covered_hi().as_f64(),
        ));
    }
    Ok(())
}

/// Parallel spins: `S = 1 + H(w)` with `w_i` the cell integrals of `|f - g|^2`.
pub fn entropy_parallel<T: Real>(
    ctx: &ScatterContext<T>,
    grid: &AngularGrid<T>,
) -> Result<SpinEntropyResult<T>> {
    require_half_shell(ctx, grid)?;
    let w = CellIntegrator::default().component_weights(
        grid,
        ctx.wave_number,
        Component::ParallelCombination,
    )?;
    if !(ordered_sum(w.iter().copied()) > T::zero()) {
        return Err(Error::ZeroWeight {
            channel: SpinChannel::Parallel.name(),
        });
    }
    let h = shannon_discrete(&ProbabilityVector::from_weights(w)?);
    Ok(SpinEntropyResult::from_h(
        SpinChannel::Parallel,
        h,
        *grid,
        false,
    ))
}

/// Antiparallel spins: `S = 1 + H(a, b)` over the jointly normalized `|f|^2`
/// and `|g|^2` cell integrals.
pub fn entropy_antiparallel<T: Real>(
    ctx: &ScatterContext<T>,
    grid: &AngularGrid<T>,
) -> Result<SpinEntropyResult<T>> {
    require_half_shell(ctx, grid)?;
    let integ = CellIntegrator::default();
    let mut w = integ.component_weights(grid, ctx.wave_number, Component::Direct)?;
    w.extend(integ.component_weights(grid, ctx.wave_number, Component::Exchange)?);
    if !(ordered_sum(w.iter().copied()) > T::zero()) {
        return Err(Error::ZeroWeight {
            channel: SpinChannel::Antiparallel.name(),
        });
    }
    let h = shannon_discrete(&ProbabilityVector::from_weights(w)?);
    Ok(SpinEntropyResult::from_h(
        SpinChannel::Antiparallel,
        h,
        *grid,
        false,
    ))
}

/// Antiparallel spins told apart by spin filters: the spinless entropy over
/// the full shell.
pub fn entropy_distinguishable<T: Real>(
    ctx: &ScatterContext<T>,
    grid: &AngularGrid<T>,
) -> Result<SpinEntropyResult<T>> {
    let w =
        CellIntegrator::default().component_weights(grid, ctx.wave_number, Component::Direct)?;
    let h = shannon_discrete(&ProbabilityVector::from_weights(w)?);
    Ok(SpinEntropyResult::from_h(
        SpinChannel::DistinguishableBySpinFilter,
        h,
        *grid,
        false,
    ))
}

/// The three channels on their natural ring grids at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinComparison<T> {
    pub energy_ev: T,
    pub spinless: T,
    pub parallel: SpinEntropyResult<T>,
    pub antiparallel: SpinEntropyResult<T>,
}

pub fn compare_channels<T: Real>(ctx: &ScatterContext<T>) -> Result<SpinComparison<T>> {
    let full = ring_grid(ctx, SpinChannel::Spinless)?;
    let half = ring_grid(ctx, SpinChannel::Parallel)?;
    Ok(SpinComparison {
        energy_ev: ctx.energy_ev(),
        spinless: entropy_distinguishable(ctx, &full)?.bits,
        parallel: entropy_parallel(ctx, &half)?,
        antiparallel: entropy_antiparallel(ctx, &half)?,
    })
}

/// Entropies of `n` equal-weight equator cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquatorEntropies<T> {
    pub cells: usize,
    pub parallel: T,
    pub parallel_modified: T,
    pub antiparallel: T,
    pub antiparallel_modified: T,
}

/// The amplitudes do not depend on the azimuth, so every equator cell has the
/// same weight; the antiparallel channel adds `f = g` as a second outcome per cell.
pub fn equator_entropies<T: Real>(cells: usize) -> Result<EquatorEntropies<T>> {
    if cells == 0 {
        return Err(Error::EmptySelection);
    }
    let par = ProbabilityVector::from_weights(vec![T::one(); cells])?;
    let ap = ProbabilityVector::from_weights(vec![T::one(); 2 * cells])?;
    let h_par = shannon_discrete(&par);
    let h_ap = shannon_discrete(&ap);
    Ok(EquatorEntropies {
        cells,
        parallel: T::one() + h_par,
        parallel_modified: h_par,
        antiparallel: T::one() + h_ap,
        antiparallel_modified: h_ap,
    })
}

/// Equator half ring with `floor(pi / delta_theta)` cells.
pub fn equator_for_width<T: Real>(delta_theta: T) -> Result<EquatorEntropies<T>> {
    equator_entropies(equator_ring(delta_theta)?.n_cells)
}

/// Cell weights of every component on the fitted half-shell grid, shared by
/// all post-selections at one context.
#[derive(Debug, Clone)]
pub struct PostSelection<T> {
    pub grid: AngularGrid<T>,
    direct: Vec<T>,
    exchange: Vec<T>,
    parallel: Vec<T>,
}

/// Entropies of one post-selected range, modified for the spin channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostSelectRow<T> {
    pub theta_r: T,
    pub cells: usize,
    pub spinless: T,
    pub parallel: T,
    pub antiparallel: T,
    /// `antiparallel - parallel`
    pub delta: T,
    pub parallel_zero_weight: bool,
}

impl<T: Real> PostSelection<T> {
    pub fn new(ctx: &ScatterContext<T>) -> Result<Self> {
        let grid = fitted_half_shell(ctx)?;
        let integ = CellIntegrator::default();
        let k = ctx.wave_number;
        Ok(PostSelection {
            grid,
            direct: integ.component_weights(&grid, k, Component::Direct)?,
            exchange: integ.component_weights(&grid, k, Component::Exchange)?,
            parallel: integ.component_weights(&grid, k, Component::ParallelCombination)?,
        })
    }

    /// Cells inside `[pi/2 - theta_r, pi/2]`.
    pub fn cells_for_range(&self, theta_r: T) -> Result<usize> {
        let span = self.grid.span();
        if !(theta_r > T::zero()) || theta_r > span * (T::one() + T::lit(1e-12)) {
            return Err(Error::domain(
                "theta_r",
                "in (0, pi/2 - eps]",
                theta_r.as_f64(),
            ));
        }
        let ratio = theta_r / self.grid.delta_theta;
        let n = (ratio * (T::one() + T::lit(1e-12))).floor();
        let n = n.to_usize().unwrap_or(0).min(self.grid.n_cells);
        if n == 0 {
            return Err(Error::EmptySelection);
        }
        Ok(n)
    }

    /// The `count` cells adjacent to `pi/2`.
    pub fn select_cells(&self, count: usize) -> Result<PostSelectRow<T>> {
        if count == 0 || count > self.grid.n_cells {
            return Err(Error::EmptySelection);
        }
        let r = (self.grid.n_cells - count)..self.grid.n_cells;
        let spinless = shannon_discrete(&ProbabilityVector::from_weights(
            self.direct[r.clone()].to_vec(),
        )?);
        let ap_w: Vec<T> = self.direct[r.clone()]
            .iter()
            .chain(&self.exchange[r.clone()])
            .copied()
            .collect();
        let ap_total = ordered_sum(ap_w.iter().copied());
        let antiparallel = shannon_discrete(&ProbabilityVector::from_weights(ap_w)?);
        let par_w = self.parallel[r].to_vec();
        let par_total = ordered_sum(par_w.iter().copied());
        let zero = !(par_total > ap_total * T::lit(1e-12));
        let parallel = if zero {
            T::zero()
        } else {
            shannon_discrete(&ProbabilityVector::from_weights(par_w)?)
        };
        Ok(PostSelectRow {
            theta_r: self.grid.delta_theta * T::count(count),
            cells: count,
            spinless,
            parallel,
            antiparallel,
            delta: antiparallel - parallel,
            parallel_zero_weight: zero,
        })
    }

    pub fn select_range(&self, theta_r: T) -> Result<PostSelectRow<T>> {
        let mut row = self.select_cells(self.cells_for_range(theta_r)?)?;
        row.theta_r = theta_r;
        Ok(row)
    }
}

/// Post-selected entropies for each `theta_r`, in input order. Rows fail
/// individually when their range holds no cell.
pub fn postselect_range_sweep<T: Real>(
    ctx: &ScatterContext<T>,
    theta_r: &[T],
) -> Result<Vec<Result<PostSelectRow<T>>>> {
    let sel = PostSelection::new(ctx)?;
    Ok(theta_r.par_iter().map(|&t| sel.select_range(t)).collect())
}
