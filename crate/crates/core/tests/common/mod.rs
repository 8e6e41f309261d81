//! Dense full-space oracles shared by integration tests.
//!
//! Everything here works on the 2^N computational basis (bit n = site n up) with
//! plain matrices and never touches sector indexing.
#![allow(dead_code)]

use floquet_core::gates::GateParams;
use floquet_core::C64;

pub type Mat = Vec<Vec<C64>>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn zeros(n: usize) -> Mat {
    vec![vec![c(0.0, 0.0); n]; n]
}

pub fn eye(n: usize) -> Mat {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c(1.0, 0.0);
    }
    m
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for k in 0..n {
            let x = a[i][k];
            if x == c(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += x * b[k][j];
            }
        }
    }
    out
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

pub fn scale(a: &Mat, s: C64) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (na, nb) = (a.len(), b.len());
    let mut out = zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                for l in 0..nb {
                    out[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max)
}

/// Scaling-and-squaring Taylor exponential.
pub fn expm(a: &Mat) -> Mat {
    let n = a.len();
    let norm = a.iter().map(|r| r.iter().map(|x| x.norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let a = scale(a, c(1.0 / 2f64.powi(s), 0.0));
    let mut term = eye(n);
    let mut sum = eye(n);
    for k in 1..30 {
        term = scale(&matmul(&term, &a), c(1.0 / k as f64, 0.0));
        sum = add(&sum, &term);
    }
    for _ in 0..s {
        sum = matmul(&sum, &sum);
    }
    sum
}

// Single-site operators, basis (down, up) = (bit 0, bit 1).
pub fn sz() -> Mat {
    vec![vec![c(-0.5, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.5, 0.0)]]
}
pub fn sp() -> Mat {
    vec![vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]
}
pub fn sm() -> Mat {
    vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]
}
pub fn sx() -> Mat {
    scale(&add(&sp(), &sm()), c(0.5, 0.0))
}
pub fn sy() -> Mat {
    scale(&add(&sp(), &scale(&sm(), c(-1.0, 0.0))), c(0.0, -0.5))
}
pub fn id2() -> Mat {
    eye(2)
}

/// Two-site operator `A_left B_right` in the index `b_left + 2 b_right`.
pub fn pair(left: &Mat, right: &Mat) -> Mat {
    kron(right, left)
}

/// Gate from the Hamiltonian definition via matrix exponentials, index `b_n + 2 b_{n+1}`.
pub fn dense_gate(p: &GateParams) -> Mat {
    let hop = add(
        &scale(&pair(&sp(), &sm()), C64::from_polar(p.j / 2.0, p.phi)),
        &scale(&pair(&sm(), &sp()), C64::from_polar(p.j / 2.0, -p.phi)),
    );
    let h = add(&hop, &scale(&pair(&sz(), &sz()), c(p.jz, 0.0)));
    let u = expm(&scale(&h, c(0.0, -1.0)));
    let f1 = expm(&scale(&pair(&sz(), &id2()), c(0.0, -p.h)));
    let f2 = expm(&scale(&pair(&id2(), &sz()), c(0.0, -p.h_prime)));
    matmul(&matmul(&u, &f1), &f2)
}

/// Applies a 4x4 gate (index `b_a + 2 b_c`) to sites `a, c` of a 2^N vector.
pub fn apply_two_site(g: &Mat, a: usize, cc: usize, psi: &mut [C64]) {
    let (ma, mc) = (1usize << a, 1usize << cc);
    for s in 0..psi.len() {
        if s & ma != 0 || s & mc != 0 {
            continue;
        }
        let idx = [s, s | ma, s | mc, s | ma | mc];
        let v: Vec<C64> = idx.iter().map(|&i| psi[i]).collect();
        for (r, &i) in idx.iter().enumerate() {
            psi[i] = (0..4).map(|k| g[r][k] * v[k]).sum();
        }
    }
}

/// One Floquet period on the full space from per-bond parameters and bond order.
pub fn dense_floquet(bonds: &[GateParams], perm: &[usize], psi: &mut [C64]) {
    let n = bonds.len();
    let gates: Vec<Mat> = bonds.iter().map(dense_gate).collect();
    for &b in perm {
        apply_two_site(&gates[b], b, (b + 1) % n, psi);
    }
}

/// Embeds sector amplitudes into the full space.
pub fn embed(states: &[u64], amps: &[C64], n_sites: usize) -> Vec<C64> {
    let mut full = vec![c(0.0, 0.0); 1 << n_sites];
    for (s, a) in states.iter().zip(amps) {
        full[*s as usize] = *a;
    }
    full
}

/// `<S^z_n>` for every site of a full-space vector.
pub fn dense_profile(psi: &[C64], n_sites: usize) -> Vec<f64> {
    (0..n_sites)
        .map(|n| {
            psi.iter()
                .enumerate()
                .map(|(s, a)| a.norm_sqr() * if s >> n & 1 == 1 { 0.5 } else { -0.5 })
                .sum()
        })
        .collect()
}

/// Max distance between two gates after removing the best global phase.
pub fn diff_up_to_phase(a: &Mat, b: &Mat) -> f64 {
    let overlap: C64 = a.iter().zip(b).flat_map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.conj() * y)).sum();
    let ph = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c(1.0, 0.0) };
    max_abs_diff(&scale(a, ph), b)
}

/// Sector block of the dense Floquet matrix, column j = U |states[j]>, built through
/// the full-space route.
pub fn sector_matrix(bonds: &[GateParams], perm: &[usize], states: &[u64]) -> Vec<Vec<C64>> {
    let n = bonds.len();
    states
        .iter()
        .map(|&s| {
            let mut psi = vec![c(0.0, 0.0); 1 << n];
            psi[s as usize] = c(1.0, 0.0);
            dense_floquet(bonds, perm, &mut psi);
            states.iter().map(|&t| psi[t as usize]).collect()
        })
        .collect()
}
