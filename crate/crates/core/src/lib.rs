//! Oblivious distributed joins on a simulated cluster.
//!
//! [`oprims`] holds the local data-oblivious primitives, [`cluster`] the
//! round-based simulator and its transcripts, [`padding`] the message-size
//! bounds, [`relops`] the distributed operators built from them and
//! [`audit`] the executable checks. [`io`] and [`runner`] drive everything
//! from CSV files.

pub mod audit;
pub mod cluster;
pub mod error;
pub mod io;
pub mod oprims;
pub mod padding;
pub mod record;
pub mod relops;
pub mod runner;

pub use error::{Error, Result};
pub use record::{Record, DUMMY_KEY};
