//! Centre-of-momentum kinematics and Gaussian packet parameters.

use crate::constants::{BOHR_NM, HARTREE_EV};
use crate::error::{Error, Result};
use crate::real::Real;

pub fn ev_to_hartree<T: Real>(energy_ev: T) -> Result<T> {
    if !(energy_ev > T::zero()) || !energy_ev.is_finite() {
        return Err(Error::domain("energy", "> 0 eV", energy_ev.as_f64()));
    }
    Ok(energy_ev / T::lit(HARTREE_EV))
}

pub fn hartree_to_ev<T: Real>(energy_ha: T) -> T {
    energy_ha * T::lit(HARTREE_EV)
}

pub fn nm_to_bohr<T: Real>(length_nm: T) -> Result<T> {
    if !(length_nm > T::zero()) || !length_nm.is_finite() {
        return Err(Error::domain(
            "packet extension",
            "> 0 nm",
            length_nm.as_f64(),
        ));
    }
    Ok(length_nm / T::lit(BOHR_NM))
}

/// Wave number of each electron for total CM kinetic energy `energy` (Hartree).
///
/// Each electron carries `E/2`, so nonrelativistically `K = sqrt(2 (E/2)) = sqrt(E)`
/// in atomic units. `k_scale` multiplies the result and is 1 by default.
pub fn wave_number<T: Real>(energy: T, k_scale: T) -> Result<T> {
    if !(energy > T::zero()) {
        return Err(Error::domain("energy", "> 0 Ha", energy.as_f64()));
    }
    if !(k_scale > T::zero()) || !k_scale.is_finite() {
        return Err(Error::domain("k_scale", "> 0", k_scale.as_f64()));
    }
    Ok(energy.sqrt() * k_scale)
}

/// Smallest scattering angle allowed by the limiting impact parameter,
/// `eps = 2 arccot(2 E b)` with arccot mapping `(0, inf)` onto `(0, pi/2)`.
pub fn min_scattering_angle<T: Real>(energy: T, impact: T) -> Result<T> {
    if !(energy > T::zero()) {
        return Err(Error::domain("energy", "> 0 Ha", energy.as_f64()));
    }
    if !(impact > T::zero()) {
        return Err(Error::domain(
            "impact parameter",
            "> 0 bohr",
            impact.as_f64(),
        ));
    }
    let two = T::lit(2.0);
    // arccot(x) = atan(1/x) on x > 0
    Ok(two * (T::one() / (two * energy * impact)).atan())
}

/// Scattering parameters shared by every entropy computation.
///
/// Lengths are in Bohr radii, wave numbers in inverse Bohr radii, energies in
/// Hartree and angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterContext<T> {
    /// Total kinetic energy of both electrons in the CM frame.
    pub energy: T,
    pub wave_number: T,
    /// Packet extension `L = 2 sigma`.
    pub packet: T,
    pub sigma: T,
    pub sigma_k: T,
    /// Limiting impact parameter `L / sqrt(2)`.
    pub impact: T,
    /// Minimum scattering angle.
    pub epsilon: T,
    /// Detector pixel width `2 / (K L)`.
    pub delta_theta: T,
}

impl<T: Real> ScatterContext<T> {
    /// Builds a context from atomic-unit inputs.
    pub fn from_atomic(energy: T, packet: T, k_scale: T) -> Result<Self> {
        if !(packet > T::zero()) || !packet.is_finite() {
            return Err(Error::domain(
                "packet extension",
                "> 0 bohr",
                packet.as_f64(),
            ));
        }
        let two = T::lit(2.0);
        let wave_number = wave_number(energy, k_scale)?;
        let sigma = packet / two;
        let sigma_k = T::one() / packet;
        let impact = packet / two.sqrt();
        let epsilon = min_scattering_angle(energy, impact)?;
        let delta_theta = two / (wave_number * packet);
        let ctx = ScatterContext {
            energy,
            wave_number,
            packet,
            sigma,
            sigma_k,
            impact,
            epsilon,
            delta_theta,
        };
        if !(ctx.epsilon > T::zero() && ctx.epsilon < T::FRAC_PI_2()) {
            return Err(Error::domain(
                "epsilon",
                "in (0, pi/2)",
                ctx.epsilon.as_f64(),
            ));
        }
        Ok(ctx)
    }

    /// Builds a context from laboratory units: energy in eV and packet extension in nm.
    pub fn new(energy_ev: T, packet_nm: T, k_scale: T) -> Result<Self> {
        Self::from_atomic(ev_to_hartree(energy_ev)?, nm_to_bohr(packet_nm)?, k_scale)
    }

    pub fn energy_ev(&self) -> T {
        hartree_to_ev(self.energy)
    }

    pub fn packet_nm(&self) -> T {
        self.packet * T::lit(BOHR_NM)
    }

    /// Momentum transfer on the energy shell, `q = 2 K sin(theta/2)`.
    pub fn momentum_transfer(&self, theta: T) -> T {
        let two = T::lit(2.0);
        two * self.wave_number * (theta / two).sin()
    }

    /// Smallest momentum transfer `K eps`.
    pub fn q_min(&self) -> T {
        self.wave_number * self.epsilon
    }

    /// `eps / delta_theta`: how many pixels fit below the cutoff angle. The
    /// ring entropy depends on the context almost only through this ratio.
    pub fn cutoff_ratio(&self) -> T {
        self.epsilon / self.delta_theta
    }
}

/// Convenience wrapper mirroring the CLI inputs, with `k_scale = 1`.
pub fn make_context(energy_ev: f64, packet_nm: f64) -> Result<ScatterContext<f64>> {
    ScatterContext::new(energy_ev, packet_nm, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::FULL_ENERGY_K_SCALE;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    #[test]
    fn hartree_conversion() {
        assert!((ev_to_hartree(27.211386245988f64).unwrap() - 1.0).abs() < 1e-15);
        assert!(ev_to_hartree(0.0).is_err());
        assert!(ev_to_hartree(-1.0).is_err());
        // 100 / 27.211386245988
        assert!((ev_to_hartree(100.0f64).unwrap() - 3.674932217565).abs() < 1e-11);
    }

    #[test]
    fn wave_number_examples() {
        assert_eq!(wave_number(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(wave_number(4.0, 1.0).unwrap(), 2.0);
        let k = wave_number(ev_to_hartree(100.0f64).unwrap(), 1.0).unwrap();
        assert!((k - 1.917011).abs() < 1e-6);
        assert!(wave_number(0.0, 1.0).is_err());
        assert!(wave_number(1.0, 0.0).is_err());
    }

    #[test]
    fn min_angle_examples() {
        // 2 E b = 1 -> 2 arccot(1) = pi/2
        assert!((min_scattering_angle(0.5, 1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!(min_scattering_angle(1e12, 1.0).unwrap() < 1e-11);
        let e = ev_to_hartree(100.0).unwrap();
        let b = nm_to_bohr(50.0).unwrap() / SQRT_2;
        assert!((b - 668.1).abs() < 0.1);
        let eps = min_scattering_angle(e, b).unwrap();
        assert!((eps - 4.0728e-4).abs() < 1e-7, "{eps}");
        assert!(min_scattering_angle(0.0, 1.0).is_err());
        assert!(min_scattering_angle(1.0, 0.0).is_err());
    }

    #[test]
    fn context_fields_recomputed_independently() {
        let ctx = make_context(1.0, 100.0).unwrap();
        let e: f64 = 1.0 / 27.211386245988;
        let l = 100.0 / 0.052917721;
        let k = e.sqrt();
        assert!((ctx.energy - e).abs() < 1e-16);
        assert!((ctx.packet - l).abs() < 1e-9);
        assert!((ctx.wave_number - k).abs() < 1e-15);
        assert!((ctx.sigma - l / 2.0).abs() < 1e-9);
        assert_eq!(ctx.sigma_k, 1.0 / ctx.packet);
        assert_eq!(ctx.impact, ctx.packet / SQRT_2);
        assert_eq!(ctx.delta_theta, 2.0 / (ctx.wave_number * ctx.packet));
        let eps = 2.0 * (1.0 / (2.0 * e * l / SQRT_2)).atan();
        assert!((ctx.epsilon - eps).abs() < 1e-15);
        assert!((ctx.energy_ev() - 1.0).abs() < 1e-14);
        assert!((ctx.packet_nm() - 100.0).abs() < 1e-10);
    }

    #[test]
    fn context_at_100_ev_50_nm() {
        let ctx = make_context(100.0, 50.0).unwrap();
        let k = (100.0f64 / 27.211386245988).sqrt();
        let l = 50.0 / 0.052917721;
        assert!((ctx.delta_theta - 2.0 / (k * l)).abs() < 1e-18);
        assert!((ctx.delta_theta - 1.10417e-3).abs() < 1e-8);
    }

    #[test]
    fn pixel_width_with_full_energy_scale() {
        // 5 eV: K = sqrt(2E) = 0.606229 a.u.
        let ctx = ScatterContext::new(5.0, 100.0, FULL_ENERGY_K_SCALE).unwrap();
        assert!(
            (ctx.delta_theta - 1.74585e-3).abs() < 1e-8,
            "{}",
            ctx.delta_theta
        );
        // a ten times wider packet gives 0.1746 mrad
        let wide = ScatterContext::new(5.0, 1000.0, FULL_ENERGY_K_SCALE).unwrap();
        assert!((wide.delta_theta - 1.74585e-4).abs() < 1e-9);
    }

    #[test]
    fn generic_over_f32() {
        let ctx = ScatterContext::<f32>::new(5.0, 100.0, 1.0).unwrap();
        let ctx64 = make_context(5.0, 100.0).unwrap();
        assert!(((ctx.delta_theta as f64) - ctx64.delta_theta).abs() / ctx64.delta_theta < 1e-5);
    }

    #[test]
    fn doubling_packet_halves_width_and_sigma_k() {
        let a = make_context(7.0, 80.0).unwrap();
        let b = make_context(7.0, 160.0).unwrap();
        assert!((b.delta_theta * 2.0 - a.delta_theta).abs() < 1e-18);
        assert!((b.sigma_k * 2.0 - a.sigma_k).abs() < 1e-18);
    }

    proptest! {
        #[test]
        fn ev_round_trip(x in 1e-6f64..1e9) {
            let back = hartree_to_ev(ev_to_hartree(x).unwrap());
            prop_assert!(((back - x) / x).abs() < 1e-12);
        }

        #[test]
        fn epsilon_decreases_with_energy(log_e in -1.0f64..5.0, step in 0.01f64..1.0) {
            let lo = make_context(10f64.powf(log_e), 100.0).unwrap();
            let hi = make_context(10f64.powf(log_e + step), 100.0).unwrap();
            prop_assert!(hi.epsilon < lo.epsilon);
        }

        #[test]
        fn invariants_hold(e in 0.5f64..1e5, l in 5.0f64..5000.0, ks in 0.1f64..20.0) {
            let ctx = ScatterContext::new(e, l, ks).unwrap();
            prop_assert!(ctx.wave_number > 0.0 && ctx.packet > 0.0);
            prop_assert!(ctx.epsilon > 0.0 && ctx.epsilon < FRAC_PI_2);
            prop_assert_eq!(ctx.sigma_k, 1.0 / ctx.packet);
            prop_assert!((ctx.sigma_k - 1.0 / (2.0 * ctx.sigma)).abs() <= 1e-15 * ctx.sigma_k);
            prop_assert_eq!(ctx.impact, ctx.packet / SQRT_2);
            prop_assert_eq!(ctx.delta_theta, 2.0 / (ctx.wave_number * ctx.packet));
        }
    }
}
