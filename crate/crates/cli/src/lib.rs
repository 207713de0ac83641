//! Configuration files, the instance zoo, the check harness and the
//! command-line front end for `ndspressure`.

pub mod cli;
pub mod config;
pub mod harness;
pub mod instance;
pub mod output;
pub mod zoo;
