//! Independent oracles for propagators, textures and readout.

use aiii_quench::dynamics::{evolve_exact, time_averaged_texture, EvolutionMode, QuenchSpec, SpinTexture, TimeGrid};
use aiii_quench::model::{gamma3, h_field, HVector, ModelParams, Momentum};
use aiii_quench::nmr::readout_expectations;
use aiii_quench::qops::{evolve_closed_form, expectation, expm_hermitian, DensityMatrix4};
use aiii_quench::topology::extract_bis_mesh;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_h(rng: &mut ChaCha8Rng) -> HVector {
    let mut c = || rng.random_range(-7000.0..7000.0);
    HVector::new(c(), c(), c(), c())
}

#[test]
fn closed_form_matches_eigendecomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let h = random_h(&mut rng);
        let t = rng.random_range(0.0..5e-3);
        let closed = evolve_closed_form(&h, t);
        let oracle = expm_hermitian(&h.operator(), t).unwrap();
        worst = worst.max(closed.max_abs_diff(&oracle));
    }
    assert!(worst <= 1e-10, "max elementwise deviation {worst:e}");
}

#[test]
fn textures_follow_the_analytic_solution() {
    // <γ_i(t)> = −h_i h0 (1 − cos 2Et)/E² plus ±h_{2,1} sin(2Et)/E on γ1, γ2.
    let p = ModelParams::experimental(0.86);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let k = Momentum::new(
            rng.random_range(-3.1..3.1),
            rng.random_range(-3.1..3.1),
            rng.random_range(-3.1..3.1),
        );
        let t = rng.random_range(0.0..5e-3);
        let h = h_field(&p, &k);
        let e2 = h.e * h.e;
        let (c, s) = ((2.0 * h.e * t).cos(), (2.0 * h.e * t).sin());
        let expect = [
            -h.h1 * h.h0 * (1.0 - c) / e2 + h.h2 * s / h.e,
            -h.h2 * h.h0 * (1.0 - c) / e2 - h.h1 * s / h.e,
            -h.h3 * h.h0 * (1.0 - c) / e2,
        ];
        let got = SpinTexture::of_state(&evolve_exact(&p, &k, t)).to_array();
        for i in 0..3 {
            assert!((got[i] - expect[i]).abs() < 1e-12, "component {i}: {} vs {}", got[i], expect[i]);
        }
    }
}

#[test]
fn long_average_vanishes_on_the_bis() {
    for mz in [0.0, 1.3, -1.3] {
        let p = ModelParams::experimental(mz);
        let spec = QuenchSpec::new(p, EvolutionMode::Exact).with_times(TimeGrid::dense());
        let mesh = extract_bis_mesh(&p, 16).unwrap();
        for k in mesh.vertices.iter().step_by(7) {
            let t = time_averaged_texture(&spec, k).unwrap();
            assert!(t.max_abs() <= 1e-2, "m_z = {mz}: {t:?}");
        }
    }
}

#[test]
fn long_average_is_minus_h_h0_over_e2() {
    let p = ModelParams::experimental(1.3);
    let spec = QuenchSpec::new(p, EvolutionMode::Exact).with_times(TimeGrid::dense());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let k = Momentum::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let h = h_field(&p, &k);
        let got = time_averaged_texture(&spec, &k).unwrap().to_array();
        let e2 = h.e * h.e;
        let expect = [-h.h1 * h.h0 / e2, -h.h2 * h.h0 / e2, -h.h3 * h.h0 / e2];
        for i in 0..3 {
            assert!((got[i] - expect[i]).abs() < 1e-9);
        }
    }
}

fn random_density(rng: &mut ChaCha8Rng) -> DensityMatrix4 {
    let a: [[Complex64; 4]; 4] =
        std::array::from_fn(|_| std::array::from_fn(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
    let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                rho[i][j] += a[i][k] * a[j][k].conj();
            }
        }
    }
    let tr: f64 = (0..4).map(|i| rho[i][i].re).sum();
    for row in rho.iter_mut() {
        for x in row.iter_mut() {
            *x /= tr;
        }
    }
    for i in 0..4 {
        rho[i][i].im = 0.0;
        for j in 0..i {
            rho[j][i] = rho[i][j].conj();
        }
    }
    DensityMatrix4::new(rho).unwrap()
}

#[test]
fn gamma3_readout_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let rho = random_density(&mut rng);
        let direct = expectation(&gamma3(), &rho).unwrap();
        let peaks = readout_expectations(&rho);
        assert!((peaks.gamma3 - direct).abs() <= 1e-12);
        assert!((peaks.sigma_x1 - (peaks.m0x + peaks.m1x)).abs() <= 1e-15);
    }
}
