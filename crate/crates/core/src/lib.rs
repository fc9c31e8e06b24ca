//! Weak-measurement entanglement concentration of the two-mode squeezed
//! vacuum.
//!
//! Bob's half of a two-mode squeezed vacuum is coupled to an ancilla by a
//! cross-Kerr interaction `κ n̂_B n̂_C`; post-selecting the ancilla rescales
//! each Schmidt coefficient by a filter `G(n)`. When the coupling is weak
//! the output is again a two-mode squeezed vacuum with
//! `λ → λ e^{−iκ_T n_W}`, so the sign of `Im n_W` decides whether
//! entanglement grows.
//!
//! Modules:
//! * [`hilbert`]: truncated Fock-space states and overlaps
//! * [`weak_values`]: numeric and closed-form weak values, success predicate
//! * [`concentration`]: exact protocol, weak-value prediction, residuals
//! * [`entanglement`]: Schmidt spectra, entropy, purity, majorization
//! * [`oracle`]: brute-force reference computations used for verification

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod concentration;
pub mod entanglement;
pub mod error;
pub mod hilbert;
pub mod oracle;
pub mod weak_values;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
