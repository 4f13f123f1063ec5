//! Library surface of the `ptcubic` command-line tool: run configuration,
//! result envelopes, the cache, and subcommand execution. The binary in
//! `main.rs` is a thin clap wrapper over these modules; integration tests
//! exercise them directly and through the compiled binary.

pub mod cache;
pub mod config;
pub mod envelope;
pub mod error;
pub mod run;
