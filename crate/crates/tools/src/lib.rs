//! IO, parallel drivers and the command-line front end for `bellpoly-core`.
//!
//! File formats (all UTF-8 text):
//!
//! * behaviors: JSON `{"n", "backend", "entries": [["010", "+-+", "1/8"], ...]}`;
//! * correlators: CSV lines `0,1,I,<value>`;
//! * vertex lists: header `model=<spec> n=<n> count=<k>` then one probability
//!   table (or correlator vector, with `space=correlator`) per line;
//! * inequalities: CSV blocks of `pattern,coefficient` lines closed by
//!   `BOUND,<rational>`;
//! * certificates, quantum setups, family catalogs and checkpoints: JSON.
//!
//! Artifacts carry a [`manifest::RunManifest`] so a run can be traced back to
//! its command line and inputs.

pub mod cli;
pub mod error;
pub mod formats;
pub mod manifest;
pub mod parallel;
pub mod reproduce;

pub use error::{ToolError, ToolResult};
