//! File formats, run reports and the `polyconvex` command line.

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod demos;
pub mod io;
pub mod report;
pub mod theta;
