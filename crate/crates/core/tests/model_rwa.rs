mod common;

use std::f64::consts::PI;

use driven_ising::model::{
    bdg_hamiltonian, excitation_energy, fold_quasienergy, kinetic, resonance_wavevector,
    static_levels,
};
use driven_ising::rwa::{
    bogoliubov_angle, classify_phase, effective_couplings, floquet_mode, quasienergy_branches,
    quasienergy_dispersion, rwa_validity, Branch, EffectiveTheory, PhaseLabel,
};
use driven_ising::ModelParams;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn drive_units(j: f64, g0: f64, g1: f64, m: u32) -> ModelParams {
    ModelParams::in_drive_units(j, g0, g1, m).unwrap()
}

fn random_params(rng: &mut StdRng) -> ModelParams {
    let m = rng.gen_range(0..=4);
    let j = rng.gen_range(0.002..0.05);
    let g0 = f64::from(m) / 4.0 + rng.gen_range(-2.0..2.0) * j;
    ModelParams::new(j, g0, rng.gen_range(0.0..3.0), 1.0, m).unwrap()
}

fn to_complex(h: &driven_ising::model::BdgMatrix) -> [[Complex64; 2]; 2] {
    let c = |x: f64| Complex64::new(x, 0.0);
    [[c(h.h11), c(h.h12)], [c(h.h21), c(h.h22)]]
}

#[test]
fn bdg_is_hermitian_with_expected_static_spectrum() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..32 {
        let p = random_params(&mut rng);
        let k = rng.gen_range(1e-3..PI);
        let t = rng.gen_range(0.0..50.0);
        let h = bdg_hamiltonian(&p, k, t).unwrap();
        assert!(h.is_hermitian());
        let (vals, _) = common::eigh2(to_complex(&h));
        let own = h.eigenvalues();
        assert!((vals[0] - own[0]).abs() < 1e-14 && (vals[1] - own[1]).abs() < 1e-14);
        assert!((h.trace() + 2.0 * kinetic(&p, k)).abs() < 1e-14);

        let undriven = p.with_g1(0.0).unwrap();
        let h0 = bdg_hamiltonian(&undriven, k, t).unwrap().eigenvalues();
        let (hi, lo) = static_levels(&undriven, k);
        assert!((h0[0] - lo).abs() < 1e-14 && (h0[1] - hi).abs() < 1e-14);
        assert!((h0[1] - h0[0] - 2.0 * excitation_energy(&undriven, k)).abs() < 1e-14);
    }
}

#[test]
fn bdg_rejects_momenta_outside_half_zone() {
    let p = drive_units(0.01, 0.5, 1.0, 2);
    assert!(bdg_hamiltonian(&p, 0.0, 0.0).is_err());
    assert!(bdg_hamiltonian(&p, PI + 1e-9, 0.0).is_err());
    assert!(bdg_hamiltonian(&p, PI, 0.0).is_ok());
}

#[test]
fn resonance_momentum_closes_the_folded_gap() {
    let p = drive_units(0.01, 0.505, 0.0, 2);
    let k0 = resonance_wavevector(&p).unwrap().unwrap();
    let gap = 2.0 * excitation_energy(&p, k0);
    assert!((gap - 2.0).abs() <= 1e-10 * 2.0);
    let (hi, lo) = static_levels(&p, k0);
    let d = common::periodic_distance(fold_quasienergy(hi, 1.0), fold_quasienergy(lo, 1.0), 1.0);
    assert!(d < 1e-12);

    assert_eq!(resonance_wavevector(&drive_units(0.01, 0.3, 0.0, 2)).unwrap(), None);
    assert!(resonance_wavevector(&drive_units(0.01, 0.0, 0.0, 2)).is_err());
}

#[test]
fn phase_labels_at_reference_points() {
    let cases = [
        (0.515, PhaseLabel::Paramagnetic),
        (0.510, PhaseLabel::IsingCritical),
        (0.505, PhaseLabel::FerroZ),
    ];
    for (g0, want) in cases {
        assert_eq!(classify_phase(&drive_units(0.01, g0, 1.0, 2), 1e-6).unwrap(), want);
    }
    // Large detuning leaves the regime where the effective theory applies.
    assert_eq!(
        classify_phase(&drive_units(0.01, 0.7, 1.0, 2), 1e-6).unwrap(),
        PhaseLabel::OutsideRwaValidity
    );
    assert!(classify_phase(&drive_units(0.01, 0.5, 1.0, 2), 0.0).is_err());
}

#[test]
fn effective_couplings_recombine() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..32 {
        let p = random_params(&mut rng);
        let c = effective_couplings(&p).unwrap();
        assert!((c.jz + c.jy - p.j()).abs() < 1e-15);
        let gamma = p.parity_sign() * c.bessel_factor;
        assert!((c.jz - c.jy - p.j() * gamma).abs() < 1e-15);
        let want = common::bessel_integral(p.m() as i32, p.bessel_argument());
        assert!((c.bessel_factor - want).abs() < 1e-12);
    }
}

#[test]
fn angle_diagonalises_effective_hamiltonian() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..32 {
        let p = random_params(&mut rng);
        let theory = EffectiveTheory::new(&p).unwrap();
        let k = rng.gen_range(1e-3..PI);
        let h = theory.bdg(k);
        let phi = bogoliubov_angle(&p, k).unwrap();
        assert!(phi > -PI / 2.0 && phi <= PI / 2.0);
        let (vals, _) = common::eigh2(to_complex(&h));
        let upper = [phi.cos(), -phi.sin()];
        let hu = [
            h.h11 * upper[0] + h.h12 * upper[1],
            h.h21 * upper[0] + h.h22 * upper[1],
        ];
        let scale = vals[1].abs().max(1e-3);
        assert!((hu[0] - vals[1] * upper[0]).abs() < 1e-12 * scale);
        assert!((hu[1] - vals[1] * upper[1]).abs() < 1e-12 * scale);
        // half the splitting of the effective Nambu matrix is the dispersion
        assert!((vals[1] - vals[0] - 2.0 * quasienergy_dispersion(&p, k).unwrap()).abs() < 1e-13);
    }
}

#[test]
fn isotropic_limit_reproduces_static_dispersion() {
    // J_0(0) = 1: without drive and m = 0 the effective chain is the bare one.
    let p = drive_units(0.01, 0.004, 0.0, 0);
    for i in 1..=16 {
        let k = PI * f64::from(i) / 16.0;
        let eps = quasienergy_dispersion(&p, k).unwrap();
        assert!((eps - excitation_energy(&p, k)).abs() < 1e-15);
    }
}

#[test]
fn gap_closes_only_on_critical_lines() {
    let ferro = drive_units(0.01, 0.505, 1.0, 2);
    let min_gap = (1..2000)
        .map(|i| quasienergy_dispersion(&ferro, PI * f64::from(i) / 2000.0).unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!(min_gap > 1e-4);

    let critical = drive_units(0.01, 0.51, 1.0, 2);
    assert!(quasienergy_dispersion(&critical, 0.0).unwrap() < 1e-15);

    let z = common::bessel_zeros(2, 1)[0];
    let anisotropic = drive_units(0.01, 0.505, z / 4.0, 2);
    let k_star = (anisotropic.detuning() / anisotropic.j()).acos();
    assert!(quasienergy_dispersion(&anisotropic, k_star).unwrap() < 1e-14);
    assert_eq!(
        classify_phase(&anisotropic, 1e-6).unwrap(),
        PhaseLabel::AnisotropicCritical
    );
}

#[test]
fn validity_tracks_detuning_and_bessel_scale() {
    let v = rwa_validity(&drive_units(0.01, 0.505, 1.0, 2)).unwrap();
    assert!(v.valid && v.ratio < 0.02);
    let v = rwa_validity(&drive_units(0.01, 0.8, 1.0, 2)).unwrap();
    assert!(!v.valid && (v.ratio - 0.3).abs() < 1e-12);
}

#[test]
fn modes_are_orthonormal_and_periodic() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..32 {
        let p = random_params(&mut rng);
        let k = rng.gen_range(0.0..=PI);
        let t = rng.gen_range(0.0..40.0);
        let plus = floquet_mode(&p, k, Branch::Plus, t).unwrap();
        let minus = floquet_mode(&p, k, Branch::Minus, t).unwrap();
        assert!((plus.norm_sqr() - 1.0).abs() < 1e-14);
        assert!((minus.norm_sqr() - 1.0).abs() < 1e-14);
        assert!(plus.inner(&minus).norm() < 1e-14);
        let later = floquet_mode(&p, k, Branch::Plus, t + p.period()).unwrap();
        assert!((later.u - plus.u).norm() < 1e-12 && (later.v - plus.v).norm() < 1e-12);
    }
}

#[test]
fn folded_branches_lie_in_zone() {
    let mut rng = StdRng::seed_from_u64(9);
    for _ in 0..64 {
        let p = random_params(&mut rng);
        let k = rng.gen_range(0.0..=PI);
        let (a, b) = quasienergy_branches(&p, k).unwrap();
        for e in [a, b] {
            assert!((-0.5..0.5).contains(&e), "{e}");
        }
    }
}

proptest! {
    #[test]
    fn folding_is_idempotent_and_preserves_phase(x in -1e3f64..1e3, w in 0.1f64..10.0) {
        let f = fold_quasienergy(x, w);
        prop_assert!(f >= -0.5 * w && f < 0.5 * w);
        prop_assert_eq!(fold_quasienergy(f, w), f);
        let turns = (x - f) / w;
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn classification_is_scale_free(
        g0 in 0.49f64..0.52,
        g1 in 0.0f64..3.0,
        scale in 0.25f64..4.0,
    ) {
        let base = drive_units(0.01, g0, g1, 2);
        let scaled = ModelParams::new(0.01 * scale, g0 * scale, g1 * scale, scale, 2).unwrap();
        prop_assert_eq!(
            classify_phase(&base, 1e-6).unwrap(),
            classify_phase(&scaled, 1e-6).unwrap()
        );
    }

    #[test]
    fn dispersion_is_nonnegative_and_bounded(g0 in 0.0f64..1.0, g1 in 0.0f64..3.0, k in 0.0f64..PI) {
        let p = drive_units(0.01, g0, g1, 2);
        let e = quasienergy_dispersion(&p, k).unwrap();
        let bound = 2.0 * (p.detuning().abs() + p.j());
        prop_assert!(e >= 0.0 && e <= bound + 1e-15);
    }
}
