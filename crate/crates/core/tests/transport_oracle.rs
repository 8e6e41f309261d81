mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::*;
use floquet_core::circular_stats::{background_magnetization, site_angles};
use floquet_core::sector_space::SectorBasis;
use floquet_core::transport::*;
use floquet_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn spec(n: usize, j: f64, jz: f64, seed: u64, t_max: u64) -> TrajectorySpec {
    TrajectorySpec { n_sites: n, magnetization: 0.0, j, jz, seed, t_max, initial: InitialKind::Gaussian }
}

#[test]
fn trajectory_matches_dense_evolution() {
    let n = 6;
    for (k, m) in [0.0, 1.0, -1.0].into_iter().enumerate() {
        let s = TrajectorySpec { magnetization: m, ..spec(n, 1.1, 0.6, 40 + k as u64, 150) };
        let (circuit, state) = trajectory_setup(&s).unwrap();
        let trace = record_trace(&s, &circuit, state.clone()).unwrap();
        let mut psi = embed(state.basis().states(), state.amplitudes(), n);
        let m_b = (m - 0.5) / (n as f64 - 1.0);
        let angles: Vec<f64> = (0..n).map(|i| 2.0 * PI * (i as f64 - 3.0) / 6.0).collect();
        let mut t_prev = 0;
        for (i, &t) in trace.times.iter().enumerate() {
            for _ in t_prev..t {
                dense_floquet(circuit.bonds(), circuit.permutation(), &mut psi);
            }
            t_prev = t;
            let prof = dense_profile(&psi, n);
            let p: Vec<f64> = prof.iter().map(|x| 2.0 * (x - m_b) / (1.0 - 2.0 * m_b)).collect();
            let r: C64 = p.iter().zip(&angles).map(|(w, a)| C64::from_polar(*w, *a)).sum();
            let pmax = p.iter().copied().fold(f64::MIN, f64::max);
            assert!((r - trace.r[i]).norm() < 1e-9);
            assert!((pmax - trace.pmax[i]).abs() < 1e-9);
            // Negative quasi-probabilities can push |R| above 1 at small N; sigma clamps to 0.
            let sig = (-2.0 * r.norm().ln()).max(0.0).sqrt();
            assert!((sig - trace.sigma[i]).abs() < 1e-9, "t={t} m={m} R={r} sig={sig} lib={}", trace.sigma[i]);
            for (a, b) in prof.iter().zip(&trace.profiles[i]) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn swap_line_keeps_a_single_site_peak() {
    for seed in 0..5 {
        let s = TrajectorySpec { initial: InitialKind::RandomPhase, ..spec(12, PI, 0.3 * seed as f64, seed, 300) };
        let trace = run_trajectory(&s).unwrap();
        let m_b = background_magnetization(12, 0.0);
        for (i, prof) in trace.profiles.iter().enumerate() {
            assert!((trace.r[i].norm() - 1.0).abs() < 1e-9);
            assert!((trace.pmax[i] - 1.0).abs() < 1e-9);
            let support = prof.iter().filter(|x| (2.0 * (*x - m_b) / (1.0 - 2.0 * m_b)).abs() > 1e-9).count();
            assert_eq!(support, 1);
        }
        let e = ensemble_average(&[trace.clone(), trace]).unwrap();
        let pt = prethermal_times(&e, &Thresholds::default());
        assert_eq!((pt.t_sigma, pt.t_p), (None, None));
    }
}

#[test]
fn swap_line_permutes_a_gaussian_profile() {
    let trace = run_trajectory(&spec(10, PI, 1.0, 3, 60)).unwrap();
    let mut p0 = trace.initial_profile.clone();
    p0.sort_by(f64::total_cmp);
    for prof in &trace.profiles {
        let mut p = prof.clone();
        p.sort_by(f64::total_cmp);
        for (a, b) in p.iter().zip(&p0) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn no_transport_without_hopping() {
    let trace = run_trajectory(&spec(10, 0.0, PI, 4, 200)).unwrap();
    for (i, &t) in trace.times.iter().enumerate() {
        assert!((trace.sigma[i] - trace.initial.sigma).abs() < 1e-10);
        if t <= DENSE_UNTIL {
            assert!(trace.nu[i].abs() < 1e-10);
        } else {
            assert!(trace.nu[i].is_nan());
        }
    }
}

#[test]
fn initial_state_profile() {
    let n = 16;
    let basis = Arc::new(SectorBasis::new(n, 8).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut profiles = Vec::new();
    for _ in 0..100 {
        let s = initial_state_with(&basis, InitialKind::Gaussian, &mut rng).unwrap();
        let p = s.profile();
        assert!((p[n / 2] - 0.5).abs() < 1e-12);
        profiles.push(p);
    }
    // Pooled background at 3 sigma; per site at 4 sigma to cover 15 comparisons.
    let want = -1.0 / 30.0;
    let off: Vec<usize> = (0..n).filter(|&s| s != n / 2).collect();
    for &site in &off {
        let (mean, se) = mean_stderr(profiles.iter().map(|p| p[site]));
        assert!((mean - want).abs() < 4.0 * se, "site {site}: {mean} +- {se}");
    }
    let (mean, se) =
        mean_stderr(profiles.iter().map(|p| off.iter().map(|&s| p[s]).sum::<f64>() / off.len() as f64));
    assert!((mean - want).abs() < 3.0 * se + 1e-12, "pooled: {mean} +- {se}");
    // The delta-peak check at 1e-3 needs ~4000 samples to beat the per-site noise.
    for _ in 100..4000 {
        profiles.push(initial_state_with(&basis, InitialKind::Gaussian, &mut rng).unwrap().profile());
    }
    let k = profiles.len() as f64;
    let avg: Vec<f64> = (0..n).map(|s| profiles.iter().map(|p| p[s]).sum::<f64>() / k).collect();
    let m_b = background_magnetization(n, 0.0);
    for (s, x) in avg.iter().enumerate() {
        let p = 2.0 * (x - m_b) / (1.0 - 2.0 * m_b);
        assert!((p - if s == n / 2 { 1.0 } else { 0.0 }).abs() < 1e-3);
    }
    let s = initial_state(12, 0.0, 5).unwrap();
    assert!((s.profile()[6] - 0.5).abs() < 1e-12);
    assert!(initial_state(8, -4.0, 1).is_err());
}

#[test]
fn magnetization_is_conserved_and_peak_bounded() {
    let n = 12;
    let trace = run_trajectory(&spec(n, 1.374, PI, 9, 1000)).unwrap();
    let m_b = background_magnetization(n, 0.0);
    for (i, prof) in trace.profiles.iter().enumerate() {
        assert!(prof.iter().sum::<f64>().abs() < 1e-11);
        assert!(trace.pmax[i] >= 1.0 / n as f64 - 2.0 * m_b.abs());
        assert!(trace.pmax[i] <= 1.0 + 1e-9);
    }
}

#[test]
fn ensemble_arithmetic() {
    let a = run_trajectory(&spec(8, 1.0, 1.0, 1, 20)).unwrap();
    let e = ensemble_average(&[a.clone(), a.clone(), a.clone()]).unwrap();
    for i in 0..a.times.len() {
        assert!((e.sigma_mean[i] - a.sigma[i]).abs() < 1e-14);
        assert!(e.sigma_stderr[i] < 1e-14);
    }
    let mut b = a.clone();
    let mut c = a.clone();
    b.sigma[3] = 1.0;
    c.sigma[3] = 3.0;
    let e = ensemble_average(&[b, c]).unwrap();
    assert_eq!((e.sigma_mean[3], e.sigma_stderr[3]), (2.0, 1.0));
    let short = run_trajectory(&spec(8, 1.0, 1.0, 1, 10)).unwrap();
    assert!(ensemble_average(&[a, short]).is_err());
}

fn synthetic(alpha: f64, noise: f64, n_traj: usize, seed: u64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let times: Vec<f64> = stroboscopic_schedule(200).iter().map(|&t| t as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Normal::new(0.0, noise).unwrap();
    let series = (0..n_traj)
        .map(|_| times.iter().map(|t| t.powf(alpha) * (1.0 + g.sample(&mut rng))).collect())
        .collect();
    (times, series)
}

#[test]
fn exponent_fit_calibration() {
    let cfg = FitConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (t, s) = synthetic(0.5, 0.0, 10, 0);
    let f = fit_exponent(&t, &s, (4.0, 40.0), &mut rng, &cfg).unwrap();
    assert!((f.alpha - 0.5).abs() < 1e-12 && f.stderr < 1e-12);
    let (t, s) = synthetic(0.0, 0.0, 10, 0);
    assert!(fit_exponent(&t, &s, (4.0, 40.0), &mut rng, &cfg).unwrap().alpha.abs() < 1e-12);
    let (t, s) = synthetic(0.5, 0.05, 100, 1);
    let f = fit_exponent(&t, &s, (4.0, 40.0), &mut rng, &cfg).unwrap();
    assert!((f.alpha - 0.5).abs() < 0.03, "{f:?}");
    for (k, alpha) in [0.0, 0.25, 0.5, 1.0].into_iter().enumerate() {
        let (t, s) = synthetic(alpha, 0.05, 100, 20 + k as u64);
        let f = fit_exponent(&t, &s, (4.0, 40.0), &mut rng, &cfg).unwrap();
        assert!((f.alpha - alpha).abs() < 0.05, "{alpha}: {f:?}");
    }
    assert!(fit_exponent(&t, &s, (1000.0, 2000.0), &mut rng, &cfg).is_err());
}

#[test]
fn constant_speed_averages_to_itself() {
    let a = run_trajectory(&spec(8, 1.0, 1.0, 1, 30)).unwrap();
    let mut e = ensemble_average(&[a.clone(), a]).unwrap();
    e.nu_mean.iter_mut().for_each(|v| *v = 1.7);
    for nu_typ in [2.0, 2.027, 3.0] {
        assert!((time_averaged_drift(&e, nu_typ).unwrap() - 1.7).abs() < 1e-12);
    }
    assert!(time_averaged_drift(&e, 0.1).is_err());
}

// Tr[P_M S^z_n(t) S^z_c] from the full-space evolution of every sector basis state.
fn dense_correlation(bonds: &[floquet_core::gates::GateParams], perm: &[usize], states: &[u64], t: u64) -> Vec<f64> {
    let n = bonds.len();
    let c = n / 2;
    let mut out = vec![0.0; n];
    for &s in states {
        let mut psi = vec![C64::new(0.0, 0.0); 1 << n];
        psi[s as usize] = C64::new(1.0, 0.0);
        for _ in 0..t {
            dense_floquet(bonds, perm, &mut psi);
        }
        let sc = if s >> c & 1 == 1 { 0.5 } else { -0.5 };
        for (o, p) in out.iter_mut().zip(dense_profile(&psi, n)) {
            *o += sc * p;
        }
    }
    out
}

#[test]
fn correlation_relation_holds_exactly() {
    for (n, n_up) in [(4usize, 3usize), (5, 2), (6, 3), (6, 4)] {
        let basis = Arc::new(SectorBasis::new(n, n_up).unwrap());
        let circuit = floquet_core::circuit::FloquetCircuit::from_seed(n, 1.2, 0.8, n as u64 * 7 + n_up as u64);
        for t in [0u64, 1, 3] {
            let prof = trace_profile(&circuit, &basis, n / 2, t).unwrap();
            let c = correlation_from_profile(&prof, basis.magnetization()).unwrap();
            let want = dense_correlation(circuit.bonds(), circuit.permutation(), basis.states(), t);
            for (a, b) in c.iter().zip(&want) {
                assert!((a - b).abs() < 1e-10, "N={n} n_up={n_up} t={t}: {c:?} vs {want:?}");
            }
        }
    }
}

#[test]
fn swap_expansion_is_second_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let psi = [0; 4].map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        assert!(swap_point_expansion_check(0.0, psi) < 1e-12);
        assert!(swap_point_expansion_check(0.05, psi) < 0.01);
        let ratio = swap_point_expansion_check(0.2, psi) / swap_point_expansion_check(0.1, psi);
        assert!((ratio - 4.0).abs() < 1.0, "ratio {ratio}");
    }
}

#[test]
fn trajectories_are_reproducible() {
    let a = run_trajectory(&spec(10, 1.374, PI, 77, 150)).unwrap();
    let b = run_trajectory(&spec(10, 1.374, PI, 77, 150)).unwrap();
    assert_eq!(a.sigma, b.sigma);
    assert_eq!(a.r, b.r);
    assert_eq!(site_angles(10).len(), a.profiles[0].len());
}

#[test]
fn lockstep_scan_matches_full_ensemble_crossings() {
    let th = Thresholds::default();
    for j in [1.374, 2.9] {
        let specs: Vec<TrajectorySpec> = (0..6).map(|s| spec(10, j, PI, 100 + s, 600)).collect();
        let traces: Vec<_> = specs.iter().map(|s| run_trajectory(s).unwrap()).collect();
        let want = prethermal_times(&ensemble_average(&traces).unwrap(), &th);
        assert!(want.t_p.is_some());
        assert_eq!(prethermal_scan(&specs, &th).unwrap(), want);
    }
}
