//! Implementation of the `loocv` command-line tool; the binary in
//! `main.rs` is a thin wrapper so tests can drive the pieces directly.

pub mod args;
pub mod cmd_path;
pub mod cmd_replica;
pub mod cmd_synth;
pub mod errors;
pub mod grids;
pub mod io;
pub mod records;
