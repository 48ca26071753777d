//! Cycle-accurate model of a lane-per-row SHA-3 engine built from
//! bitline-computing SRAM subarrays.
//!
//! The pieces, bottom up:
//!
//! - [`keccak`]: software Keccak-f and SHA3-256, the reference oracle.
//! - [`subarray`]: bit matrix with multi-row-activation logic and per-tile
//!   barrel shifters.
//! - [`layout`]: lane-per-row placement and the logical-to-physical lane map.
//! - [`isa`]: controller commands, their binary encoding, and the control
//!   subarray image.
//! - [`exec`]: broadcast executor, cycle accounting, traces, dataflow audit.
//! - [`compiler`]: per-stage command schedules for rounds and absorption.
//! - [`engine`]: end-to-end hashing and permutation on a simulated subarray.
//! - [`perf`]: analytical latency/throughput/area/energy model.

pub mod compiler;
pub mod engine;
pub mod exec;
pub mod isa;
pub mod kat;
pub mod keccak;
pub mod layout;
pub mod perf;
pub mod subarray;
