//! Independent numerical oracles for the library's integrals and solvers.

use escatter_core::constants::FULL_ENERGY_K_SCALE;
use escatter_core::density_matrix::Kernel;
use escatter_core::eigen::{symmetric_eigenvalues, SymmetricMatrix};
use escatter_core::entropy::{
    is_non_increasing, ring_entropy, ring_entropy_jaynes, sweep_energies,
};
use escatter_core::geometry::{cell_probability, ring_grid};
use escatter_core::{Context, Geometry, SpinChannel};
use proptest::prelude::*;
use std::f64::consts::PI;

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Diagonal element as the plain 2-D convolution of the Gaussian with
/// `|f|^2 = q''^-4`, integrated in polar coordinates without Bessel functions.
fn convolution_diagonal(q: f64, sigma: f64, q_lo: f64, q_hi: f64) -> f64 {
    let s2 = sigma * sigma;
    let a = (q - 12.0 * sigma).max(q_lo);
    let b = (q + 12.0 * sigma).min(q_hi);
    let radial = |u: f64| {
        let width = 12.0 / (q * u / s2).sqrt();
        let phi_max = width.min(PI);
        let angular = simpson(
            |phi: f64| {
                let half = (phi / 2.0).sin();
                (-((q - u) * (q - u) + 4.0 * q * u * half * half) / (2.0 * s2)).exp()
            },
            0.0,
            phi_max,
            400,
        );
        2.0 * angular * u.powi(-3)
    };
    simpson(radial, a, b, 2000)
}

#[test]
fn kernel_diagonal_matches_gaussian_convolution() {
    for (e, l) in [(5.0, 100.0), (1.0, 50.0), (100.0, 100.0)] {
        let ctx = Context::new(e, l, FULL_ENERGY_K_SCALE).unwrap();
        let kernel = Kernel::new(&ctx);
        for theta in [ctx.epsilon + 0.5 * ctx.delta_theta, 0.01, 0.2, 1.0, 2.5] {
            let q = ctx.momentum_transfer(theta);
            let got = kernel.element(q, q).unwrap();
            let want = convolution_diagonal(q, ctx.sigma_k, ctx.q_min(), 2.0 * ctx.wave_number);
            let rel = (got / want - 1.0).abs();
            assert!(rel < 1e-6, "E={e} theta={theta}: {got} vs {want} ({rel:e})");
        }
    }
}

// det(A - x I) by Gaussian elimination with partial pivoting
fn char_poly(a: &[Vec<f64>], x: f64) -> f64 {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for i in 0..n {
        m[i][i] -= x;
    }
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())
            .unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in (c + 1)..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    det
}

#[test]
fn eigenvalues_are_roots_of_characteristic_polynomial() {
    // distinct, well separated spectrum: roots bracketed between Gershgorin bounds
    let a = vec![
        vec![4.0, 1.0, 0.5, 0.0],
        vec![1.0, 3.0, 0.2, 0.1],
        vec![0.5, 0.2, 1.0, 0.3],
        vec![0.0, 0.1, 0.3, -2.0],
    ];
    let mut m = SymmetricMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            m.set(i, j, a[i][j]);
        }
    }
    let ev = symmetric_eigenvalues(&m).unwrap();
    for &x in &ev {
        // sign change across the computed root
        let h = 1e-9;
        assert!(char_poly(&a, x - h) * char_poly(&a, x + h) <= 0.0, "{x}");
    }
    let trace: f64 = ev.iter().sum();
    assert!((trace - 6.0).abs() < 1e-12);
}

#[test]
fn jaynes_tracks_discrete_for_many_rings() {
    let ctx = Context::new(1.0, 2000.0, FULL_ENERGY_K_SCALE).unwrap();
    for ch in [
        SpinChannel::Spinless,
        SpinChannel::Parallel,
        SpinChannel::Antiparallel,
    ] {
        let d = ring_entropy(&ctx, ch).unwrap();
        let j = ring_entropy_jaynes(&ctx, ch).unwrap();
        assert!(
            (d.bits - j.bits).abs() < 0.05,
            "{ch}: {} vs {}",
            d.bits,
            j.bits
        );
    }
}

#[test]
fn log_sweep_is_decreasing() {
    let es: Vec<f64> = (0..12).map(|i| 10f64.powf(i as f64 * 4.0 / 11.0)).collect();
    let rows = sweep_energies(&es, 50.0, 1.0, SpinChannel::Spinless, Geometry::Rings);
    let s: Vec<f64> = rows.into_iter().map(|r| r.unwrap().discrete).collect();
    assert!(is_non_increasing(&s));
    assert!(s.windows(2).all(|w| w[1] < w[0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cell_probability_matches_closed_form(e in 0.5f64..5e4, l in 20.0f64..500.0, frac in 0.0f64..1.0) {
        let ctx = Context::new(e, l, 1.0).unwrap();
        let g = ring_grid(&ctx, SpinChannel::Spinless).unwrap();
        let i = ((g.n_cells - 1) as f64 * frac * frac) as usize;
        let (a, b) = g.edges(i);
        let k = ctx.wave_number;
        // 2 pi int sin / (16 K^4 sin^4(t/2)) = -pi / (4 K^4 sin^2(t/2))
        let anti = |t: f64| -PI / (4.0 * k.powi(4) * (t / 2.0).sin().powi(2));
        let want = anti(b) - anti(a);
        let got = cell_probability(&g, i, &ctx, SpinChannel::Spinless).unwrap();
        prop_assert!((got / want - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ring_entropy_within_bounds(e in 0.5f64..1e4, l in 20.0f64..300.0) {
        let ctx = Context::new(e, l, 1.0).unwrap();
        for ch in [SpinChannel::Spinless, SpinChannel::Parallel, SpinChannel::Antiparallel] {
            let s = ring_entropy(&ctx, ch).unwrap();
            let components = ch.components().len() as f64;
            prop_assert!(s.modified >= 0.0);
            prop_assert!(s.modified <= (components * s.cells as f64).log2() + 1e-9);
            prop_assert_eq!(s.modified, s.bits - ch.pauli_offset());
        }
    }
}
