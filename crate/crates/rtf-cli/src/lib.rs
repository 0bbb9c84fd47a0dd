//! Std companion to `rtf-core`: file formats, the desk-scale training
//! harness, scaling benchmarks, the self-test, and the command-line surface.

#![forbid(unsafe_code)]

pub mod bench;
pub mod cli;
pub mod io;
pub mod selftest;
pub mod train;
