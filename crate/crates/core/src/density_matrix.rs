//! Reduced density matrix of the scattered electron along one meridian.
//!
//! A Gaussian packet of momentum width `sigma_k` is scattered by the Coulomb
//! amplitude. Tracing out the partner's transverse momentum `q''` leaves, for
//! momentum transfers `q`, `q'` on the same meridian,
//!
//! ```text
//! rho(q, q') = 2 pi int q'' dq'' |f(q'')|^2
//!              exp(-(q^2 + q'^2)/4s^2 - q''^2/2s^2) I0((q + q') q'' / 2s^2)
//! ```
//!
//! with `s = sigma_k` and `|f(q'')|^2 = q''^-4`. The exponential is folded into
//! the scaled Bessel function, so the integrand is evaluated as
//! `exp(-(q - q')^2/8s^2 - (q'' - (q + q')/2)^2/2s^2) * i0_scaled(...)`.

use rayon::prelude::*;

use crate::bessel::i0_scaled;
use crate::eigen::{eigen_spectrum, SymmetricMatrix};
use crate::entropy::{shannon_discrete, ProbabilityVector};
use crate::error::{Error, Result};
use crate::geometry::{AngularGrid, GridKind};
use crate::kinematics::ScatterContext;
use crate::quadrature::DoublingRules;
use crate::real::{ordered_sum, Real};

/// Default cap on the number of meridian nodes.
pub const DEFAULT_GRID_CAP: usize = 4096;

/// Half width, in units of `sigma_k`, of the `q''` window around `(q + q')/2`.
pub const WINDOW_SIGMAS: f64 = 40.0;

/// Pairs whose Gaussian envelope `exp(-(q - q')^2 / 8 s^2)` is below `exp(-700)`
/// are set to zero.
pub const ENVELOPE_CUTOFF: f64 = 700.0;

const PANELS: usize = 8;

/// Evaluates matrix elements for one scattering context.
#[derive(Debug, Clone)]
pub struct Kernel<T> {
    sigma_k: T,
    q_lo: T,
    q_hi: T,
    rules: DoublingRules<T>,
}

impl<T: Real> Kernel<T> {
    /// `q''` runs over the accessible transfers `[K eps, 2K]`.
    pub fn new(ctx: &ScatterContext<T>) -> Self {
        Self::with_range(ctx.sigma_k, ctx.q_min(), T::lit(2.0) * ctx.wave_number)
    }

    pub fn with_range(sigma_k: T, q_lo: T, q_hi: T) -> Self {
        Kernel {
            sigma_k,
            q_lo,
            q_hi,
            rules: DoublingRules::new(16, 6, T::lit(1e-9)),
        }
    }

    /// `-(q - q')^2 / 8 sigma_k^2`, the log of the off-diagonal envelope.
    pub fn envelope_exponent(&self, q: T, qp: T) -> T {
        let d = (q - qp) / self.sigma_k;
        -d * d / T::lit(8.0)
    }

    pub fn element(&self, q: T, qp: T) -> Result<T> {
        let env = self.envelope_exponent(q, qp);
        if env < -T::lit(ENVELOPE_CUTOFF) {
            return Ok(T::zero());
        }
        let s2 = self.sigma_k * self.sigma_k;
        let center = (q + qp) / T::lit(2.0);
        let half = T::lit(WINDOW_SIGMAS) * self.sigma_k;
        let a = (center - half).max(self.q_lo);
        let b = (center + half).min(self.q_hi);
        if !(b > a) {
            return Ok(T::zero());
        }
        let sum = q + qp;
        let integrand = |u: T| {
            let x = (u - center) / self.sigma_k;
            let exponent = env - x * x / T::lit(2.0);
            let u3 = u * u * u;
            exponent.exp() * i0_scaled(sum * u / (T::lit(2.0) * s2)) / u3
        };
        let width = (b - a) / T::count(PANELS);
        let mut parts = Vec::with_capacity(PANELS);
        for p in 0..PANELS {
            let lo = a + width * T::count(p);
            let hi = if p + 1 == PANELS { b } else { lo + width };
            parts.push(self.rules.integrate(&integrand, lo, hi)?);
        }
        let v = T::lit(2.0) * T::PI() * ordered_sum(parts);
        if !v.is_finite() {
            return Err(Error::Overflow {
                exponent: env.as_f64(),
            });
        }
        Ok(v)
    }
}

/// Standalone matrix element; see [`Kernel::element`].
pub fn kernel_element<T: Real>(ctx: &ScatterContext<T>, q: T, qp: T) -> Result<T> {
    Kernel::new(ctx).element(q, qp)
}

/// Trace-normalized density matrix on meridian nodes.
#[derive(Debug, Clone)]
pub struct MeridianDensityMatrix<T> {
    pub grid: AngularGrid<T>,
    /// Node polar angles, one per row.
    pub thetas: Vec<T>,
    pub matrix: SymmetricMatrix<T>,
}

/// Builds the meridian density matrix on `n_grid` nodes.
///
/// Nodes sit at the centres of pixel-wide cells starting at `eps`, at most one
/// per ring of the full shell. Nyström weights `sqrt(sin t_i sin t_j)` carry the
/// measure `q dq = K^2 sin(theta) dtheta`, so the diagonal reproduces the ring
/// probabilities of a packet of the same width.
pub fn build_meridian_matrix<T: Real>(
    ctx: &ScatterContext<T>,
    n_grid: usize,
    grid_cap: usize,
) -> Result<MeridianDensityMatrix<T>> {
    if n_grid > grid_cap {
        return Err(Error::GridTooLarge {
            requested: n_grid,
            cap: grid_cap,
        });
    }
    if n_grid == 0 {
        return Err(Error::EmptySelection);
    }
    let full = AngularGrid::uniform(
        GridKind::Meridian,
        ctx.epsilon,
        T::PI() - ctx.epsilon,
        ctx.delta_theta,
    )?;
    let grid = full.sub_grid(0, n_grid.min(full.n_cells))?;
    let n = grid.n_cells;
    let thetas: Vec<T> = (0..n).map(|i| grid.center(i)).collect();
    let qs: Vec<T> = thetas.iter().map(|&t| ctx.momentum_transfer(t)).collect();
    let w: Vec<T> = thetas.iter().map(|t| t.sin().sqrt()).collect();
    let kernel = Kernel::new(ctx);

    // upper triangle row by row, stopping once the envelope vanishes
    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::new();
            for j in i..n {
                if kernel.envelope_exponent(qs[i], qs[j]) < -T::lit(ENVELOPE_CUTOFF) {
                    break;
                }
                row.push(w[i] * w[j] * kernel.element(qs[i], qs[j])?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut m = SymmetricMatrix::zeros(n);
    for (i, row) in rows.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            m.set(i, i + k, v);
            m.set(i + k, i, v);
        }
    }
    let tr = m.trace();
    if !(tr > T::zero()) {
        return Err(Error::NotNormalized { sum: tr.as_f64() });
    }
    m.scale(T::one() / tr);
    Ok(MeridianDensityMatrix {
        grid,
        thetas,
        matrix: m,
    })
}

/// Eigenvalues and entropies of a density matrix.
#[derive(Debug, Clone)]
pub struct VonNeumann<T> {
    /// Descending, clamped to be non-negative.
    pub spectrum: Vec<T>,
    pub entropy: T,
    /// Shannon entropy of the diagonal (the dephased state).
    pub diagonal_entropy: T,
    pub trace: T,
}

/// `-tr(rho log2 rho)` from the eigenvalues. Fails for asymmetric or
/// non-positive matrices and for traces away from one.
pub fn von_neumann_entropy<T: Real>(rho: &SymmetricMatrix<T>) -> Result<VonNeumann<T>> {
    let asym = rho.max_asymmetry();
    if asym > T::lit(1e-12) * rho.max_abs() {
        return Err(Error::NotSymmetric {
            asymmetry: asym.as_f64(),
        });
    }
    let trace = rho.trace();
    if (trace - T::one()).abs() > T::lit(1e-9) {
        return Err(Error::NotNormalized {
            sum: trace.as_f64(),
        });
    }
    let spectrum = eigen_spectrum(rho)?;
    let entropy = -ordered_sum(spectrum.iter().map(|&l| {
        if l > T::zero() {
            l * l.log2()
        } else {
            T::zero()
        }
    })) + T::zero();
    let diag: Vec<T> = (0..rho.dim())
        .map(|i| rho.get(i, i).max(T::zero()))
        .collect();
    let diagonal_entropy = shannon_discrete(&ProbabilityVector::from_weights(diag)?);
    Ok(VonNeumann {
        spectrum,
        entropy,
        diagonal_entropy,
        trace,
    })
}
