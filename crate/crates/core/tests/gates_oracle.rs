mod common;

use std::f64::consts::PI;

use common::*;
use floquet_core::gates::{build_gate, from_four_phases, swap_form, GateParams, SwapForm};
use floquet_core::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn as_mat(m: [[C64; 4]; 4]) -> Mat {
    m.iter().map(|r| r.to_vec()).collect()
}

fn random_params(rng: &mut impl Rng) -> GateParams {
    let mut a = || rng.random_range(-PI..PI);
    GateParams::new(a() * 1.5, a() * 1.5, a(), a(), a())
}

#[test]
fn closed_form_matches_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let p = random_params(&mut rng);
        let err = max_abs_diff(&as_mat(build_gate(&p).matrix()), &dense_gate(&p));
        assert!(err < 1e-12, "{p:?}: {err}");
    }
}

#[test]
fn swap_point_phases() {
    // J = Jz = pi, no disorder: kappa = pi/4 and xi = pi/2 - pi/4 = pi/4.
    let p = GateParams::clean(PI, PI);
    let oracle = dense_gate(&p);
    let f = swap_form(0.0, 0.0, 0.0, PI);
    for v in [f.kappa_plus, f.kappa_minus, f.xi_plus, f.xi_minus] {
        assert!((v - PI / 4.0).abs() < 1e-15);
    }
    assert!(max_abs_diff(&as_mat(f.gate().matrix()), &oracle) < 1e-12);
    assert!(max_abs_diff(&as_mat(build_gate(&p).matrix()), &oracle) < 1e-12);

    // Off-diagonal phase e^{-i pi/4}; a xi of 3pi/4 would be off by a factor i.
    let wrong = SwapForm { xi_plus: 3.0 * PI / 4.0, xi_minus: 3.0 * PI / 4.0, ..f };
    assert!(diff_up_to_phase(&as_mat(wrong.gate().matrix()), &oracle) > 0.5);
}

#[test]
fn swap_form_equals_gate_at_pi() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let mut p = random_params(&mut rng);
        p.j = PI;
        let f = swap_form(p.h, p.h_prime, p.phi, p.jz);
        let g = f.gate();
        assert!(max_abs_diff(&as_mat(g.matrix()), &as_mat(build_gate(&p).matrix())) < 1e-12);
        for z in [g.center[0][1], g.center[1][0]] {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }
    let f = swap_form(0.0, 0.0, 0.0, 0.0);
    assert_eq!((f.kappa_plus, f.kappa_minus), (0.0, 0.0));
    assert!((f.xi_plus - PI / 2.0).abs() < 1e-15 && (f.xi_minus - PI / 2.0).abs() < 1e-15);
}

// Pauli form: e^{-i th1/2 sz_n} e^{-i th2/2 sz_m} e^{-iJ/4 xx} e^{-iJ/4 yy} e^{-iJz/4 zz}
//             e^{-i th3/2 sz_n} e^{-i th4/2 sz_m}, with sigma = 2 S.
fn four_phase_oracle(th: [f64; 4], j: f64, jz: f64) -> Mat {
    let two = |m: Mat| scale(&m, c(2.0, 0.0));
    let (x, y, z) = (two(sx()), two(sy()), two(sz()));
    let e = |m: Mat, a: f64| expm(&scale(&m, c(0.0, -a)));
    let mut v = e(pair(&z, &id2()), th[0] / 2.0);
    v = matmul(&v, &e(pair(&id2(), &z), th[1] / 2.0));
    v = matmul(&v, &e(pair(&x, &x), j / 4.0));
    v = matmul(&v, &e(pair(&y, &y), j / 4.0));
    v = matmul(&v, &e(pair(&z, &z), jz / 4.0));
    v = matmul(&v, &e(pair(&z, &id2()), th[2] / 2.0));
    matmul(&v, &e(pair(&id2(), &z), th[3] / 2.0))
}

#[test]
fn four_phases_reduce_to_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let th = [0; 4].map(|_| rng.random_range(-PI..PI));
        let (j, jz) = (rng.random_range(0.0..PI), rng.random_range(0.0..PI));
        let p = from_four_phases(th, j, jz);
        let err = diff_up_to_phase(&as_mat(build_gate(&p).matrix()), &four_phase_oracle(th, j, jz));
        assert!(err < 1e-12, "{err}");
    }
}

#[test]
fn two_pi_shift_is_a_field_relabeling() {
    // A 2pi shift of J or Jz multiplies the gate by Z x Z, which is the same as
    // shifting both fields by pi; the disorder ensemble is therefore 2pi periodic.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let p = random_params(&mut rng);
        let relabeled = as_mat(build_gate(&GateParams { h: p.h + PI, h_prime: p.h_prime + PI, ..p }).matrix());
        for q in [GateParams { j: p.j + 2.0 * PI, ..p }, GateParams { jz: p.jz + 2.0 * PI, ..p }] {
            assert!(diff_up_to_phase(&relabeled, &as_mat(build_gate(&q).matrix())) < 1e-12);
        }
        let both = GateParams { j: p.j + 2.0 * PI, jz: p.jz + 2.0 * PI, ..p };
        let a = as_mat(build_gate(&p).matrix());
        assert!(diff_up_to_phase(&a, &as_mat(build_gate(&both).matrix())) < 1e-12);
    }
}

#[test]
fn wrapped_phase_difference_is_uniform() {
    // Kolmogorov-Smirnov against U(-pi, pi]; critical D at alpha = 0.01 is 1.628 / sqrt(n).
    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut xs: Vec<f64> = (0..n)
        .map(|_| {
            let th = [0; 4].map(|_| rng.random_range(-PI..PI));
            floquet_core::gates::wrap_angle(from_four_phases(th, 1.0, 1.0).phi)
        })
        .collect();
    xs.sort_by(f64::total_cmp);
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = (x + PI) / (2.0 * PI);
            (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    assert!(d < 1.628 / (n as f64).sqrt(), "KS D = {d}");
}

proptest! {
    #[test]
    fn gates_are_unitary_and_conserve_magnetization(
        j in -10.0..10.0f64, jz in -10.0..10.0f64, h in -4.0..4.0f64, hp in -4.0..4.0f64, phi in -4.0..4.0f64
    ) {
        let g = build_gate(&GateParams::new(j, jz, h, hp, phi));
        prop_assert!(g.unitarity_error() < 1e-12);
        let m = g.matrix();
        // Only the (ud, du) block may mix.
        for r in 0..4 {
            for col in 0..4 {
                let same_block = r == col || (r == 1 && col == 2) || (r == 2 && col == 1);
                if !same_block {
                    prop_assert_eq!(m[r][col], C64::new(0.0, 0.0));
                }
            }
        }
    }
}
