//! Entanglement detection for ensembles of spin-1/2 particles from collective
//! angular-momentum data.
//!
//! The crate is organised around a dense complex-matrix substrate ([`op`]),
//! collective first/second moments ([`collective`]), the family of spin-squeezing
//! entanglement criteria ([`criteria`]), the separable-region polytope geometry
//! ([`polytope`]), spin-model builders and thermal states ([`models`]) and
//! state-level detectors with a critical-temperature solver ([`detect`]).
//!
//! The crate is `no_std` (with `alloc`); all file formats and the command-line
//! interface live in the companion `spinsq-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod collective;
pub mod criteria;
pub mod detect;
mod error;
pub mod linalg;
pub mod models;
pub mod op;
pub mod polytope;
pub mod rng;
pub mod tol;

pub use error::{Error, Result};
pub use num_complex::Complex64;

use core::sync::atomic::{AtomicUsize, Ordering};

/// Default cap on the number of qubit sites (dimension 2^12 = 4096).
pub const DEFAULT_QUBIT_CAP: usize = 12;

static QUBIT_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_QUBIT_CAP);

/// Current cap on the number of qubit sites for operator construction.
pub fn qubit_cap() -> usize {
    QUBIT_CAP.load(Ordering::Relaxed)
}

/// Overrides the qubit-site cap for the whole process.
///
/// Dense storage grows as 4^n; caps much above 12 sites exhaust memory.
pub fn set_qubit_cap(cap: usize) {
    QUBIT_CAP.store(cap.max(1), Ordering::Relaxed);
}

pub(crate) fn check_capacity(n_sites: usize) -> Result<()> {
    let cap = qubit_cap();
    if n_sites > cap {
        Err(Error::Capacity {
            qubits: n_sites,
            cap,
        })
    } else {
        Ok(())
    }
}
