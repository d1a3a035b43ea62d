//! Discrete-time downlink system-level simulator for 5G NR handover in
//! ultra-dense networks.
//!
//! A single traffic user (TU) moves along a straight route through a field
//! of uniformly deployed gNBs. Every 10 ms tic the TU measures the geometry
//! (SINR) of each covering cell and an A3 / time-to-trigger state machine
//! decides on handovers. The harness repeats this over Monte Carlo
//! iterations and sweeps TTT, gNB density and velocity.

pub mod cli;
pub mod handover;
pub mod harness;
pub mod kpi;
pub mod mobility;
pub mod radio;
pub mod scenario;

pub use handover::{A3Reference, EventKind, HandoverEvent, HandoverParams, HandoverState};
pub use harness::{run_cell, run_sweep, Preset, RunOptions, SweepResult, SweepSpec};
pub use kpi::{GridPoint, KpiCell, RunResult};
pub use radio::{GeometryReport, LinkConfig};
pub use scenario::{validate_config, GnbSite, Point, Route, RouteLabel, SimConfig, ValidConfig};
