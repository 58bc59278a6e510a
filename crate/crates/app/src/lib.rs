//! `riodbg`: command line and HTTP front ends over the debugging core.

pub mod cli;
pub mod service;
