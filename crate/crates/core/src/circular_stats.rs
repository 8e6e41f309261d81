//! Circular moments of the site quasi-probability on the ring.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::gates::wrap_angle;
use crate::{Error, Result, C64};

/// Site angles `theta_n = 2 pi (n - floor(N/2)) / N` on `(-pi, pi]`; the excitation
/// site `floor(N/2)` sits at angle zero.
pub fn site_angles(n_sites: usize) -> Vec<f64> {
    let c = (n_sites / 2) as f64;
    (0..n_sites)
        .map(|n| wrap_angle(2.0 * PI * (n as f64 - c) / n_sites as f64))
        .collect()
}

/// Background magnetization per site once the excitation site is fixed up:
/// `M_B = (M - 1/2) / (N - 1)`.
pub fn background_magnetization(n_sites: usize, magnetization: f64) -> f64 {
    (magnetization - 0.5) / (n_sites as f64 - 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiProb {
    pub values: Vec<f64>,
    pub angles: Vec<f64>,
}

impl QuasiProb {
    /// Wraps raw weights with the standard site angles.
    pub fn from_values(values: Vec<f64>) -> Self {
        let angles = site_angles(values.len());
        Self { values, angles }
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `p_n = 2 (M_n - M_B) / (1 - 2 M_B)`.
pub fn quasiprob(profile: &[f64], m_b: f64) -> Result<QuasiProb> {
    let denom = 1.0 - 2.0 * m_b;
    if denom == 0.0 {
        return Err(Error::DegenerateBackground);
    }
    let values = profile.iter().map(|m| 2.0 * (m - m_b) / denom).collect();
    Ok(QuasiProb::from_values(values))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularMoment {
    pub r: C64,
    /// `Arg R`; `None` when `R = 0`.
    pub mu: Option<f64>,
    /// `sqrt(-2 ln |R|)`; `+inf` when `R = 0`.
    pub sigma: f64,
}

pub fn circular_mean(p: &QuasiProb) -> CircularMoment {
    let r: C64 = p
        .values
        .iter()
        .zip(&p.angles)
        .map(|(w, t)| C64::from_polar(*w, *t))
        .sum();
    moment_from_r(r)
}

pub fn moment_from_r(r: C64) -> CircularMoment {
    let a = r.norm();
    if a == 0.0 {
        return CircularMoment { r, mu: None, sigma: f64::INFINITY };
    }
    // |R| can exceed 1 by rounding or quasi-probability negativity; within a few ulps
    // of 1 the square root would only amplify rounding noise.
    let sigma = if (1.0 - a).abs() <= 8.0 * f64::EPSILON {
        0.0
    } else {
        (-2.0 * a.ln()).max(0.0).sqrt()
    };
    CircularMoment { r, mu: Some(r.arg()), sigma }
}

/// `Arg sum_n p_n e^{i |theta_n|}`: position folded onto `[0, pi]`.
pub fn drift_mu_tilde(p: &QuasiProb) -> f64 {
    let z: C64 = p
        .values
        .iter()
        .zip(&p.angles)
        .map(|(w, t)| C64::from_polar(*w, t.abs()))
        .sum();
    z.arg()
}

// Truncation keeps exp(-x^2 / 2 sigma^2) < 1e-16 beyond |x| = K sigma.
const TAIL_SIGMAS: f64 = 8.6;

/// Number of images per side so that the truncated tail is below 1e-14.
pub fn wrapped_normal_k_max(sigma: f64) -> usize {
    (TAIL_SIGMAS * sigma / (2.0 * PI)).ceil() as usize + 1
}

/// Wrapped normal density on the circle, normalized over one period.
pub fn wrapped_normal_pdf(theta: f64, mu: f64, sigma: f64) -> f64 {
    let k_max = wrapped_normal_k_max(sigma) as i64;
    let x = wrap_angle(theta - mu);
    let s: f64 = (-k_max..=k_max)
        .map(|k| {
            let y = x + 2.0 * PI * k as f64;
            (-y * y / (2.0 * sigma * sigma)).exp()
        })
        .sum();
    s / (sigma * (2.0 * PI).sqrt())
}

/// Wrapped normal sampled on the N site angles and normalized to sum 1.
pub fn discrete_wrapped_normal(n_sites: usize, sigma: f64) -> Vec<f64> {
    let raw: Vec<f64> = site_angles(n_sites)
        .iter()
        .map(|&t| wrapped_normal_pdf(t, 0.0, sigma))
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|q| q / total).collect()
}
