//! Exact-arithmetic laboratory for counting problems and exponential sums
//! over a prime field `F_p`.
//!
//! The crate computes product and ratio sets of an interval with an
//! arbitrary set, multiplicative and additive energies, complete and
//! incomplete exponential sums with `m * x^{-s}` phases, multiplicative
//! character spectra, and the distribution `T_k(lambda)` of sums of `k`
//! fractions `m_i / x_i^s`. Every fast kernel has a brute-force or
//! independent-route counterpart in the test suite.
//!
//! Module map:
//!
//! * [`modfield`]: modular arithmetic, primitive roots and discrete logs.
//! * [`sets`]: intervals, residue sets and seeded instance generation.
//! * [`prodset`]: product/ratio set cardinalities.
//! * [`energy`]: count vectors and pair-coincidence counts.
//! * [`spectra`]: additive and multiplicative character sums.
//! * [`convolve`]: exact cyclic convolution over `Z_p`.
//! * [`tkcount`]: the `T_k(lambda)` experiment.
//! * [`verify`]: parameter sweeps and exponent fitting.
//! * [`cli`]: command-line front end.

pub mod cli;
pub mod convolve;
pub mod energy;
mod error;
pub mod modfield;
pub mod oracle;
pub mod par;
pub mod prodset;
pub mod report;
pub mod sets;
pub mod spectra;
pub mod tkcount;
pub mod verify;

pub use error::{Error, Result};
pub use modfield::PrimeContext;
pub use sets::{Interval, ResidueSet};

/// Default per-instance work budget, in elementary operations.
pub const DEFAULT_BUDGET: u64 = 4_000_000_000;
