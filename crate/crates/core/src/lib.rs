//! Protograph-based q-ary LDPC block codes and spatially coupled LDPC codes
//! over GF(2^m), decoded with FFT-QSPA belief propagation.
//!
//! The crate covers code construction by protograph lifting, BPSK/AWGN
//! channel priors, full-block and sliding-window decoding, latency and
//! complexity accounting, and a Monte Carlo harness.

pub mod channel;
pub mod construction;
pub mod decoder;
pub mod galois;
pub mod harness;
pub mod metrics;
pub mod oracle;
pub mod rng;
pub mod sparse;

mod error;

pub use error::Error;
pub use galois::FieldTable;
pub use sparse::QaryParityCheck;
