//! The U(1)-symmetric two-qubit gate
//! `U = exp(-i H) exp(-i h S^z x 1) exp(-i h' 1 x S^z)` with
//! `H = J/2 (e^{i phi} S^+ S^- + h.c.) + Jz S^z S^z`.
//!
//! Two-site basis order is `(dd, ud, du, uu)`, where `ud` means the left site
//! (site n) is up and the right site (n + 1) is down, i.e. index `b_n + 2 b_{n+1}`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::C64;

/// Five gate angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateParams {
    pub j: f64,
    pub jz: f64,
    pub h: f64,
    pub h_prime: f64,
    /// Peierls phase.
    pub phi: f64,
}

impl GateParams {
    pub fn new(j: f64, jz: f64, h: f64, h_prime: f64, phi: f64) -> Self {
        Self { j, jz, h, h_prime, phi }
    }

    /// Disorder-free gate.
    pub fn clean(j: f64, jz: f64) -> Self {
        Self::new(j, jz, 0.0, 0.0, 0.0)
    }

    /// All angles reduced to `(-pi, pi]`.
    pub fn reduced(&self) -> Self {
        Self::new(
            wrap_angle(self.j),
            wrap_angle(self.jz),
            wrap_angle(self.h),
            wrap_angle(self.h_prime),
            wrap_angle(self.phi),
        )
    }
}

/// Reduces an angle to `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Gate stored by its magnetization blocks; the remaining entries are structural zeros.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitGate {
    pub down_down: C64,
    pub up_up: C64,
    /// Rows and columns ordered `(ud, du)`.
    pub center: [[C64; 2]; 2],
}

impl TwoQubitGate {
    /// Dense 4x4 matrix in `(dd, ud, du, uu)` order.
    pub fn matrix(&self) -> [[C64; 4]; 4] {
        let z = C64::new(0.0, 0.0);
        let mut m = [[z; 4]; 4];
        m[0][0] = self.down_down;
        m[1][1] = self.center[0][0];
        m[1][2] = self.center[0][1];
        m[2][1] = self.center[1][0];
        m[2][2] = self.center[1][1];
        m[3][3] = self.up_up;
        m
    }

    /// `max |U^dagger U - 1|` over entries.
    pub fn unitarity_error(&self) -> f64 {
        let m = self.matrix();
        let mut err = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..4 {
                    s += m[k][i].conj() * m[k][j];
                }
                if i == j {
                    s -= 1.0;
                }
                err = err.max(s.norm());
            }
        }
        err
    }
}

pub fn build_gate(p: &GateParams) -> TwoQubitGate {
    let (s, c) = (p.j / 2.0).sin_cos();
    let hs = (p.h + p.h_prime) / 2.0;
    let hd = (p.h - p.h_prime) / 2.0;
    let minus_i = C64::new(0.0, -1.0);

    // The (ud, du) block of H is -Jz/4 + (J/2) sigma_phi with sigma_phi^2 = 1,
    // so its exponential is e^{i Jz/4} (cos(J/2) - i sin(J/2) sigma_phi).
    let ez = C64::from_polar(1.0, p.jz / 4.0);
    let field_ud = C64::from_polar(1.0, -hd);
    let field_du = C64::from_polar(1.0, hd);
    let hop_ud = minus_i * s * C64::from_polar(1.0, p.phi);
    let hop_du = minus_i * s * C64::from_polar(1.0, -p.phi);

    TwoQubitGate {
        down_down: C64::from_polar(1.0, -p.jz / 4.0 + hs),
        up_up: C64::from_polar(1.0, -p.jz / 4.0 - hs),
        center: [
            [ez * c * field_ud, ez * hop_ud * field_du],
            [ez * hop_du * field_ud, ez * c * field_du],
        ],
    }
}

/// Phases of the generalized SWAP gate at `J = pi`.
///
/// `uu -> e^{-i kappa_+}`, `dd -> e^{-i kappa_-}`, `ud -> e^{-i xi_+} du` and
/// `du -> e^{-i xi_-} ud`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapForm {
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub xi_plus: f64,
    pub xi_minus: f64,
}

impl SwapForm {
    pub fn gate(&self) -> TwoQubitGate {
        let z = C64::new(0.0, 0.0);
        TwoQubitGate {
            down_down: C64::from_polar(1.0, -self.kappa_minus),
            up_up: C64::from_polar(1.0, -self.kappa_plus),
            center: [
                [z, C64::from_polar(1.0, -self.xi_minus)],
                [C64::from_polar(1.0, -self.xi_plus), z],
            ],
        }
    }
}

/// Phases of `build_gate` at `J = pi`:
/// `kappa_pm = pm (h + h')/2 + Jz/4`, `xi_pm = pi/2 pm (h - h')/2 - Jz/4 pm phi`.
pub fn swap_form(h: f64, h_prime: f64, phi: f64, jz: f64) -> SwapForm {
    let hs = (h + h_prime) / 2.0;
    let hd = (h - h_prime) / 2.0;
    SwapForm {
        kappa_plus: hs + jz / 4.0,
        kappa_minus: -hs + jz / 4.0,
        xi_plus: FRAC_PI_2 + hd - jz / 4.0 + phi,
        xi_minus: FRAC_PI_2 - hd - jz / 4.0 - phi,
    }
}

/// Gate parameters equivalent to the four-phase form
/// `e^{-i(th1 Sz_n + th2 Sz_m)} e^{-i H(phi = 0)} e^{-i(th3 Sz_n + th4 Sz_m)}`.
///
/// Conjugating `S^+_n S^-_m` by the left rotations gives `phi = th2 - th1`.
pub fn from_four_phases(theta: [f64; 4], j: f64, jz: f64) -> GateParams {
    GateParams {
        j,
        jz,
        h: theta[0] + theta[2],
        h_prime: theta[1] + theta[3],
        phi: theta[1] - theta[0],
    }
}
