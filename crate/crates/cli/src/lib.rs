//! Library side of the `sentiparse` command: the run configuration and its
//! snapshot format.

pub mod config;
