//! Simulation of an atomic (Rydberg) RF receiver used as a radar and a
//! communications front end: spectrum model, coherent readout, waveform
//! synthesis, propagation, range estimation, FSK links and a seeded
//! Monte-Carlo harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod atomic;
pub mod channel;
pub mod comms;
pub mod dsp;
pub mod error;
pub mod frontend;
pub mod harness;
pub mod par;
pub mod radar;
pub mod report;
pub mod seed;
pub mod stats;
pub mod waveform;

pub use error::{Error, Result};
