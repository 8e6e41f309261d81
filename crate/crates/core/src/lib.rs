//! Simulation and analysis of disordered U(1)-symmetric Floquet circuits on a ring.
//!
//! The state lives in a single magnetization sector ([`sector_space`]); one Floquet
//! period is a product of two-site gates ([`gates`]) applied in a random bond order
//! ([`circuit`]). Transport is read off the magnetization profile through circular
//! moments ([`circular_stats`], [`transport`]); spectral statistics come from a
//! polynomially filtered Arnoldi solver ([`spectral`]). [`drift_mc`] computes the
//! classical excitation drift of pure SWAP circuits and [`runner`] orchestrates runs.

pub mod circuit;
pub mod circular_stats;
pub mod drift_mc;
mod error;
pub mod gates;
pub mod runner;
pub mod sector_space;
pub mod seeding;
pub mod spectral;
pub mod transport;

pub use error::{Error, Result};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
