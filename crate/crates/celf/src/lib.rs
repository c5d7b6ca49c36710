//! File formats, PNG light-field directories, configuration files and the
//! `celf` command-line tool built on [`celf_core`].

pub mod cli;
pub mod config;
pub mod dataset;
pub mod formats;
pub mod pngio;
