//! Trace generation, replay and differential checking for `diskconn`.

pub mod generate;
pub mod report;
pub mod runner;
pub mod trace;

pub use generate::{generate, GenParams, GenerateError, Mode};
pub use runner::{run, run_checked, shrink, shrink_prefix, BruteForce, Check, FailureReport, Kind, Mismatch, OpRecord, RunError, RunOutput, Summary};
pub use trace::{Trace, TraceError, TraceOp, TraceShape};
