//! Model files, reports and the command-line front end for `screening-core`.

#![deny(missing_docs)]

pub mod cli;
pub mod modelfile;
pub mod report;
