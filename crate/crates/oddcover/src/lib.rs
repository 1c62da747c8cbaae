//! File formats, a checkpointed multi-threaded census driver and the
//! `oddcover` command-line tool built on [`oddcover_core`].

pub mod census;
pub mod cli;
pub mod formats;
