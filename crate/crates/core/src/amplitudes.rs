//! Direct and exchange Coulomb amplitudes on the energy shell.
//!
//! Amplitudes are real and unnormalized; each entropy routine normalizes its
//! own weights.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::real::Real;

/// Spin configuration of the colliding pair, selecting both the amplitude
/// combination and the angular domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinChannel {
    /// Distinguishable particles without spin; full shell.
    Spinless,
    /// Indistinguishable, parallel spins: `|f - g|^2` on the half shell.
    Parallel,
    /// Indistinguishable, antiparallel spins: `|f|^2` and `|g|^2` on the half shell.
    Antiparallel,
    /// Antiparallel spins separated by spin filters; behaves as `Spinless`.
    DistinguishableBySpinFilter,
}

impl SpinChannel {
    pub const ALL: [SpinChannel; 4] = [
        SpinChannel::Spinless,
        SpinChannel::Parallel,
        SpinChannel::Antiparallel,
        SpinChannel::DistinguishableBySpinFilter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpinChannel::Spinless => "spinless",
            SpinChannel::Parallel => "parallel",
            SpinChannel::Antiparallel => "antiparallel",
            SpinChannel::DistinguishableBySpinFilter => "distinguishable",
        }
    }

    /// Indistinguishable channels only sum over half the energy shell.
    pub fn is_half_shell(self) -> bool {
        matches!(self, SpinChannel::Parallel | SpinChannel::Antiparallel)
    }

    /// Entropy carried by antisymmetrization alone (one bit for the
    /// indistinguishable channels). Subtracting it gives the modified entropy.
    pub fn pauli_offset(self) -> f64 {
        if self.is_half_shell() {
            1.0
        } else {
            0.0
        }
    }

    /// The probability components whose cell weights enter the entropy as
    /// separate outcomes.
    pub fn components(self) -> &'static [Component] {
        match self {
            SpinChannel::Spinless | SpinChannel::DistinguishableBySpinFilter => {
                &[Component::Direct]
            }
            SpinChannel::Parallel => &[Component::ParallelCombination],
            SpinChannel::Antiparallel => &[Component::Direct, Component::Exchange],
        }
    }
}

impl fmt::Display for SpinChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpinChannel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "spinless" => Ok(SpinChannel::Spinless),
            "parallel" | "par" => Ok(SpinChannel::Parallel),
            "antiparallel" | "ap" => Ok(SpinChannel::Antiparallel),
            "distinguishable" => Ok(SpinChannel::DistinguishableBySpinFilter),
            other => Err(format!(
                "unknown channel '{other}' (expected spinless|parallel|antiparallel|distinguishable)"
            )),
        }
    }
}

/// One squared-amplitude density entering a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    /// `|f|^2`
    Direct,
    /// `|g|^2`
    Exchange,
    /// `|f - g|^2`
    ParallelCombination,
}

impl Component {
    /// Squared amplitude at `theta`, without domain checks. Callers stay
    /// strictly inside `(0, pi)`.
    #[inline]
    pub fn density<T: Real>(self, theta: T, k: T) -> T {
        let f = direct_unchecked(theta, k);
        let g = exchange_unchecked(theta, k);
        match self {
            Component::Direct => f * f,
            Component::Exchange => g * g,
            Component::ParallelCombination => {
                // f - g = cos(theta) / (K^2 sin^2 theta), no cancellation near pi/2
                let s = theta.sin();
                let d = theta.cos() / (k * k * s * s);
                d * d
            }
        }
    }
}

#[inline]
fn direct_unchecked<T: Real>(theta: T, k: T) -> T {
    let s = (theta / T::lit(2.0)).sin();
    T::one() / (T::lit(4.0) * k * k * s * s)
}

#[inline]
fn exchange_unchecked<T: Real>(theta: T, k: T) -> T {
    let c = (theta / T::lit(2.0)).cos();
    T::one() / (T::lit(4.0) * k * k * c * c)
}

/// Direct amplitude `f = 1 / (4 K^2 sin^2(theta/2))`.
pub fn direct_amplitude<T: Real>(theta: T, k: T) -> Result<T> {
    if !(theta > T::zero() && theta <= T::PI()) {
        return Err(Error::Singular {
            theta: theta.as_f64(),
        });
    }
    check_k(k)?;
    Ok(direct_unchecked(theta, k))
}

/// Exchange amplitude `g = 1 / (4 K^2 cos^2(theta/2))`, equal to `f(pi - theta)`.
pub fn exchange_amplitude<T: Real>(theta: T, k: T) -> Result<T> {
    if !(theta >= T::zero() && theta < T::PI()) {
        return Err(Error::Singular {
            theta: theta.as_f64(),
        });
    }
    check_k(k)?;
    Ok(exchange_unchecked(theta, k))
}

fn check_k<T: Real>(k: T) -> Result<()> {
    if k > T::zero() && k.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("wave number", "> 0", k.as_f64()))
    }
}

/// Both amplitudes at one angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair<T> {
    pub theta: T,
    pub direct: T,
    pub exchange: T,
}

impl<T: Real> AmplitudePair<T> {
    pub fn at(theta: T, k: T) -> Result<Self> {
        Ok(AmplitudePair {
            theta,
            direct: direct_amplitude(theta, k)?,
            exchange: exchange_amplitude(theta, k)?,
        })
    }
}

/// Unnormalized differential probability per unit solid angle for a channel.
pub fn differential_probability<T: Real>(theta: T, k: T, channel: SpinChannel) -> Result<T> {
    let upper = if channel.is_half_shell() {
        T::FRAC_PI_2()
    } else {
        T::PI()
    };
    let inside = theta > T::zero()
        && if channel.is_half_shell() {
            theta <= upper
        } else {
            theta < upper
        };
    if !inside {
        return Err(Error::domain(
            "theta",
            "inside the channel's angular domain",
            theta.as_f64(),
        ));
    }
    check_k(k)?;
    Ok(channel
        .components()
        .iter()
        .fold(T::zero(), |acc, c| acc + c.density(theta, k)))
}
