//! Pulse-sequence design and entanglement analysis for an electron spin coupled to a
//! register of spin-1/2 nuclei.
//!
//! - [`spin_model`]: conditional nuclear rotations under CPMG and UDD units, resonances,
//!   trivial-evolution circles.
//! - [`entanglement`]: Makhlin invariants, one-tangles, maximal-tangle iteration sets.
//! - [`fidelity`]: Kraus gate fidelity of a target subspace against the unwanted bath.
//! - [`designer`]: common-iteration search, constrained register gate design, random
//!   ensembles, position estimates.
//! - [`oracle`]: dense brute-force propagators and numerics used to cross-check the above.
//! - [`qec`]: three-qubit measurement-free bit-flip code.
//! - [`register`] and [`cli`]: register files, bundled datasets and the command line.
//!
//! ```
//! use spinreg::spin_model::{resonance_time, Electron, NuclearSpin, ResonanceVariant};
//!
//! let spin = NuclearSpin::from_khz("c", 80.0, 25.0, 314.0).unwrap();
//! let t = resonance_time(&spin, &Electron::spin_half(), 1, ResonanceVariant::Primary).unwrap();
//! assert!((t * 1e6 - 3.1822).abs() < 1e-3);
//! ```
//!
//! Runnable programs live in `examples/`: `resonances`, `tangle_minima`, `common_iterations`,
//! `unwanted_minimization`, `gate_fidelity`, `design_register`, `bath_error`, `bitflip_code`,
//! `oracle_crosscheck` and `position_estimate`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod designer;
pub mod entanglement;
pub mod error;
pub mod fidelity;
pub mod oracle;
pub mod qec;
pub mod register;
pub mod spin_model;

pub use error::{Error, Result};
