//! Batch front end for periometry: synthetic data generation, measurement,
//! segmentation overlap, agreement reports and classification.
//!
//! Every subcommand returns a [`Status`] that maps onto the process exit code.

pub mod classify;
pub mod dice;
pub mod evaluate;
pub mod io;
pub mod measure;
pub mod plot;
pub mod synth;

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

/// Outcome of a batch run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Everything processed and every value valid.
    Clean,
    /// Output written, but some inputs failed or some values are invalid.
    Partial,
    /// Nothing could be processed.
    Failed,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Clean => 0,
            Status::Partial => 2,
            Status::Failed => 1,
        }
    }
}

pub(crate) fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

/// Shortest decimal that reads back to the same f64; `none` for missing.
pub(crate) fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "none".to_string(), |v| v.to_string())
}
